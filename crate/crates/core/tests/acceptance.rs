//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use mmwave_assoc::channel::{mmw_spectral_efficiency, muw_spectral_efficiency, path_loss_db};
use mmwave_assoc::config::{ExperimentConfig, PolicyKind, QuotaRule};
use mmwave_assoc::experiment::{run_experiment, simulate};
use mmwave_assoc::figures::{bias_sweep, fig3, fig4, FigureOptions};
use mmwave_assoc::los::{update_f, LosEstimate};
use mmwave_assoc::matching::{deferred_acceptance, mmq_match, verify, MatchingInstance};
use mmwave_assoc::policy::{rssi_table, sinr_table};
use mmwave_assoc::scenario::{distance, generate_scenario, PathLossParams, Point, ScenarioConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

type Outcome = (bool, String);
type Check = fn() -> Outcome;

fn random_instance(rng: &mut ChaCha8Rng) -> MatchingInstance {
    loop {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=3);
        let prefs: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let mut p: Vec<usize> = (0..n).collect();
                p.shuffle(rng);
                p.truncate(rng.random_range(1..=n));
                p
            })
            .collect();
        let mut ml: Vec<usize> = (0..m).collect();
        ml.shuffle(rng);
        let q_max: Vec<usize> = (0..n).map(|_| rng.random_range(0..=m)).collect();
        let q_min: Vec<usize> = q_max.iter().map(|&q| rng.random_range(0..=q)).collect();
        if q_min.iter().sum::<usize>() <= m && m <= q_max.iter().sum::<usize>() {
            return MatchingInstance::new(n, prefs, ml, q_min, q_max).unwrap();
        }
    }
}

fn mmq_guarantees() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng);
        let m = mmq_match(&inst).unwrap();
        let r = verify(&inst, &m).unwrap();
        if !(r.feasible && r.blocking_pairs.is_empty() && r.pareto_optimal == Some(true)) {
            failures += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        failures == 0 && secs < 60.0,
        format!("1000 random instances, {failures} failures, {secs:.2} s"),
    )
}

fn counterexample() -> Outcome {
    let inst = MatchingInstance::new(
        3,
        vec![vec![0, 1, 2]; 3],
        vec![0, 1, 2],
        vec![1, 1, 1],
        vec![2, 2, 2],
    )
    .unwrap();
    let da = deferred_acceptance(&inst);
    let da_report = verify(&inst, &da).unwrap();
    let mmq = mmq_match(&inst).unwrap();
    let mmq_report = verify(&inst, &mmq).unwrap();
    let expected: Vec<Vec<usize>> = vec![vec![0, 1], vec![2], vec![]];
    let ok = da.host_to_agents == expected && !da_report.feasible && mmq_report.feasible;
    (
        ok,
        format!(
            "DA {:?} feasible={}, MMQ {:?} feasible={}",
            da.host_to_agents, da_report.feasible, mmq.host_to_agents, mmq_report.feasible
        ),
    )
}

fn sum_rate_gain() -> Outcome {
    let start = Instant::now();
    let rows = fig3(&FigureOptions::default(), &[50]).unwrap();
    let mmq = rows.iter().find(|r| r.policy == PolicyKind::Mmq).unwrap();
    let mut ok = true;
    let mut detail = format!("MMQ {:.4e} bit/s", mmq.mean_sum_rate_bps);
    for bl in rows.iter().filter(|r| r.policy.is_baseline()) {
        let gain = mmq.mean_sum_rate_bps / bl.mean_sum_rate_bps - 1.0;
        let separated = mmq.mean_sum_rate_bps - 1.96 * mmq.se_sum_rate_bps > bl.mean_sum_rate_bps + 1.96 * bl.se_sum_rate_bps;
        ok &= gain >= 0.05 && separated;
        detail += &format!("; vs {} {:+.1}% (CIs disjoint: {separated})", bl.policy, 100.0 * gain);
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    (ok, format!("{detail}; {secs:.1} s"))
}

fn optimal_quota_trend() -> Outcome {
    let m_values: Vec<usize> = (20..=100).step_by(10).collect();
    let table = fig4(&FigureOptions::default(), 10, &m_values).unwrap();
    let q: Vec<usize> = table.iter().map(|t| t.q_star).collect();
    let at_100 = table.iter().find(|t| t.n_ue == 100).map(|t| t.q_star);
    let inversions = q.windows(2).filter(|w| w[1] < w[0]).count();
    let ok = at_100.is_some_and(|v| (6..=10).contains(&v)) && inversions <= 1;
    (ok, format!("q* over M=20..100: {q:?}; {inversions} inversions"))
}

fn load_difference_vs_cre() -> Outcome {
    let opts = FigureOptions::default();
    let rssi: Vec<f64> = (0..=6).map(|k| 10.0 * f64::from(k)).collect();
    let sinr: Vec<f64> = (0..=10).map(|k| 2.0 * f64::from(k)).collect();
    let mut ok = true;
    let mut detail = String::new();
    for (kind, biases) in [(PolicyKind::MaxRssi, rssi), (PolicyKind::MaxSinr, sinr)] {
        let sweep = bias_sweep(&opts, kind, &[70], &biases).unwrap();
        let mmq = sweep.mmq_delta_kappa[0];
        let (bias, best) = sweep.best_baseline(0);
        ok &= mmq <= 0.75 * best;
        detail += &format!(
            "{kind} best {best:.2} at {bias} dB, MMQ {mmq:.2} ({:.0}% lower); ",
            100.0 * (1.0 - mmq / best)
        );
    }
    (ok, detail.trim_end_matches("; ").to_string())
}

fn pigeonhole_balance() -> Outcome {
    let mut cfg = ExperimentConfig {
        n_runs: 1000,
        policies: vec![PolicyKind::Mmq],
        ..Default::default()
    };
    cfg.policy.quota = QuotaRule::Balanced;
    let records = simulate(&cfg).unwrap();
    let worst = records.iter().map(|r| r.row.delta_kappa).max().unwrap();
    (worst <= 1, format!("{} runs, worst delta_kappa {worst}", records.len()))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn numerical_checks() -> Outcome {
    let mut errs = vec![
        rel(distance(Point::new(100.0, 200.0), Point::new(-50.0, -16.0)), 262.975_284_009_733),
        rel(path_loss_db(&PathLossParams::new(2.0, 70.0, 5.2), 100.0, 0.0).unwrap(), 110.0),
        rel(mmw_spectral_efficiency(30.0, 18.0, 110.0, 1e9, -174.0).unwrap(), 7.317_316_001_936_547),
        rel(muw_spectral_efficiency(30.0, 103.0, &[113.0, 120.0], 10e6, -174.0).unwrap(), 3.214_401_905_516_49),
    ];

    // One mmW and one uW BS at the origin, a UE 100 m away, rho = 0.5.
    let cfg = ScenarioConfig {
        n_mmw: 1,
        n_muw: 1,
        n_ue: 1,
        ..Default::default()
    };
    let mut s = generate_scenario(&cfg).unwrap();
    s.ue_positions = vec![Point::new(100.0, 0.0)];
    s.mmw_positions = vec![Point::ORIGIN];
    s.muw_positions = vec![Point::ORIGIN];
    s.los_prob.fill(0.5);
    s.shadow_mmw_los_db.fill(0.0);
    s.shadow_mmw_nlos_db.fill(0.0);
    s.shadow_muw_db.fill(0.0);
    let rssi = rssi_table(&s);
    let sinr = sinr_table(&s);
    errs.push(rel(rssi[[0, 0]], -98.990_134_316_128_81));
    errs.push(rel(rssi[[0, 1]], -68.0));
    errs.push(rel(sinr[[0, 0]], 18.990_134_316_128_81));
    errs.push(rel(sinr[[0, 1]], 36.0));
    let worst = errs.iter().copied().fold(0.0, f64::max);

    // Estimator mean after 20 frames against its closed form.
    let (rho, lambda, k, frames, trials) = (0.3, 0.1, 100u32, 20, 10_000);
    let binomial = Binomial::new(u64::from(k), rho).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let finals: Vec<f64> = (0..trials)
        .map(|_| {
            let mut e = LosEstimate::prior(lambda, k).unwrap();
            for _ in 0..frames {
                e = update_f(&e, binomial.sample(&mut rng) as u32, true).unwrap();
            }
            e.value
        })
        .collect();
    let n = trials as f64;
    let mean = finals.iter().sum::<f64>() / n;
    let se = (finals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    let expected = rho + (1.0 - lambda).powi(frames) * (0.5 - rho);
    let z = (mean - expected).abs() / se;

    (
        worst <= 1e-6 && z <= 3.0,
        format!("worst relative error {worst:.2e} over {} values; estimator |z| = {z:.2}", errs.len()),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: usize| {
        let mut cfg = ExperimentConfig {
            n_runs: 20,
            workers,
            output: dir.path().join(name),
            ..Default::default()
        };
        cfg.scenario.seed = 5;
        cfg.sweep.n_ue = vec![20, 40];
        let summary = run_experiment(&cfg).unwrap();
        (
            std::fs::read(summary.rows_path).unwrap(),
            std::fs::read(summary.aggregate_path).unwrap(),
        )
    };
    let a = run("a.csv", 4);
    let b = run("b.csv", 4);
    let serial = run("serial.csv", 1);
    let ok = a == b && a == serial && !a.0.is_empty();
    (ok, format!("rerun identical: {}; serial == parallel: {}", a == b, a == serial))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("MMQ feasible, stable and Pareto optimal", mmq_guarantees),
        ("deferred acceptance counterexample", counterexample),
        ("sum-rate gain at M=50", sum_rate_gain),
        ("optimal uW minimum quota trend", optimal_quota_trend),
        ("load difference vs CRE baselines at M=70", load_difference_vs_cre),
        ("pigeonhole balance", pigeonhole_balance),
        ("numerical micro-checks", numerical_checks),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("[{}] criterion {}: {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
