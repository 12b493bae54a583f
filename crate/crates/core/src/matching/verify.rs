use super::enumerate::{assignment_count, enumerate_feasible, DEFAULT_ENUMERATION_BUDGET};
use super::{Matching, MatchingInstance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierReport {
    /// Every agent matched and every host within its quotas.
    pub feasible: bool,
    pub unmatched: Vec<usize>,
    /// Hosts whose load lies outside `[q_min, q_max]`.
    pub quota_violations: Vec<usize>,
    /// Pairs `(agent, host)` where the agent prefers the host to its match
    /// and either the host holds an agent of lower master-list priority, or
    /// the host has spare capacity and leaving would not push the agent's
    /// current host below its minimum.
    pub blocking_pairs: Vec<(usize, usize)>,
    /// The subset justified by master-list envy alone.
    pub literal_blocking_pairs: Vec<(usize, usize)>,
    /// Set when the matching is feasible and the instance is small enough to
    /// enumerate.
    pub pareto_optimal: Option<bool>,
}

impl VerifierReport {
    pub fn is_stable(&self) -> bool {
        self.blocking_pairs.is_empty()
    }
}

pub fn verify(instance: &MatchingInstance, matching: &Matching) -> Result<VerifierReport> {
    verify_with_budget(instance, matching, DEFAULT_ENUMERATION_BUDGET)
}

/// Like [`verify`], checking Pareto optimality only when `N^M <= budget`.
pub fn verify_with_budget(
    instance: &MatchingInstance,
    matching: &Matching,
    budget: u64,
) -> Result<VerifierReport> {
    matching.check_consistent()?;
    if matching.n_agents() != instance.n_agents() || matching.n_hosts() != instance.n_hosts() {
        return Err(Error::Structural(format!(
            "matching is {}x{} but instance is {}x{}",
            matching.n_agents(),
            matching.n_hosts(),
            instance.n_agents(),
            instance.n_hosts()
        )));
    }

    let (q_min, q_max) = (instance.q_min(), instance.q_max());
    let loads = &matching.loads;
    let unmatched: Vec<usize> = (0..instance.n_agents())
        .filter(|&a| matching.host_of(a).is_none())
        .collect();
    let quota_violations: Vec<usize> = (0..instance.n_hosts())
        .filter(|&h| loads[h] < q_min[h] || loads[h] > q_max[h])
        .collect();
    let feasible = unmatched.is_empty() && quota_violations.is_empty();

    let mut blocking_pairs = Vec::new();
    let mut literal_blocking_pairs = Vec::new();
    for agent in 0..instance.n_agents() {
        let current = matching.host_of(agent);
        let can_leave = current.is_none_or(|c| loads[c] > q_min[c]);
        for &host in instance.prefs(agent) {
            if Some(host) == current {
                break; // remaining hosts are worse
            }
            let envy = matching.host_to_agents[host]
                .iter()
                .any(|&other| instance.ml_rank(agent) < instance.ml_rank(other));
            let room = loads[host] < q_max[host] && can_leave;
            if envy {
                literal_blocking_pairs.push((agent, host));
            }
            if envy || room {
                blocking_pairs.push((agent, host));
            }
        }
    }

    let pareto_optimal = if feasible && assignment_count(instance) <= budget as f64 {
        Some(is_pareto_optimal(instance, matching, budget)?)
    } else {
        None
    };

    Ok(VerifierReport {
        feasible,
        unmatched,
        quota_violations,
        blocking_pairs,
        literal_blocking_pairs,
        pareto_optimal,
    })
}

/// No feasible matching leaves every agent at least as well off and some
/// agent strictly better off.
fn is_pareto_optimal(instance: &MatchingInstance, matching: &Matching, budget: u64) -> Result<bool> {
    let ranks: Vec<usize> = (0..instance.n_agents())
        .map(|a| instance.rank_of(a, matching.host_of(a)))
        .collect();
    for other in enumerate_feasible(instance, budget)? {
        let mut strictly_better = false;
        let mut weakly_better = true;
        for (a, &r) in ranks.iter().enumerate() {
            let r2 = instance.rank_of(a, other.host_of(a));
            if r2 > r {
                weakly_better = false;
                break;
            }
            strictly_better |= r2 < r;
        }
        if weakly_better && strictly_better {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::fixtures::three_by_three;
    use crate::matching::{deferred_acceptance, mmq_match};

    #[test]
    fn da_on_counterexample_is_infeasible() {
        let inst = three_by_three(1);
        let report = verify(&inst, &deferred_acceptance(&inst)).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.quota_violations, vec![2]);
        assert!(report.unmatched.is_empty());
        assert_eq!(report.pareto_optimal, None);
    }

    #[test]
    fn mmq_on_counterexample_is_feasible_stable_and_efficient() {
        let inst = three_by_three(1);
        let report = verify(&inst, &mmq_match(&inst).unwrap()).unwrap();
        assert!(report.feasible);
        assert!(report.blocking_pairs.is_empty());
        assert!(report.literal_blocking_pairs.is_empty());
        assert_eq!(report.pareto_optimal, Some(true));
    }

    #[test]
    fn empty_instance_is_trivially_fine() {
        let inst = MatchingInstance::new(2, vec![], vec![], vec![0, 0], vec![1, 1]).unwrap();
        let report = verify(&inst, &Matching::empty(0, 2)).unwrap();
        assert!(report.feasible);
        assert!(report.blocking_pairs.is_empty());
        assert_eq!(report.pareto_optimal, Some(true));
    }

    #[test]
    fn envy_and_capacity_blocking() {
        // h0 holds a2 although a0 (ML-top) prefers h0: literal blocking pair.
        let inst = three_by_three(0);
        let m = Matching::from_assignment(3, &[Some(1), Some(1), Some(0)]).unwrap();
        let report = verify(&inst, &m).unwrap();
        assert!(report.literal_blocking_pairs.contains(&(0, 0)));
        assert!(report.literal_blocking_pairs.contains(&(1, 0)));
        assert!(!report.literal_blocking_pairs.contains(&(2, 0)));
        assert_eq!(report.pareto_optimal, Some(false));

        // a2 sits on h2 while h1 has room: capacity blocking only.
        let m = Matching::from_assignment(3, &[Some(0), Some(0), Some(2)]).unwrap();
        let report = verify(&inst, &m).unwrap();
        assert_eq!(report.blocking_pairs, vec![(2, 1)]);
        assert!(report.literal_blocking_pairs.is_empty());

        // Same pair is not blocking when leaving would break h2's minimum.
        let inst = MatchingInstance::new(3, vec![vec![0, 1, 2]; 3], vec![0, 1, 2], vec![0, 0, 1], vec![2; 3]).unwrap();
        let report = verify(&inst, &m).unwrap();
        assert!(report.blocking_pairs.is_empty());
        assert!(report.feasible);
    }

    #[test]
    fn unmatched_agents_block_with_any_host_with_room() {
        let inst = MatchingInstance::new(2, vec![vec![0, 1]], vec![0], vec![0, 0], vec![1, 1]).unwrap();
        let report = verify(&inst, &Matching::empty(1, 2)).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.unmatched, vec![0]);
        assert_eq!(report.blocking_pairs, vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn structural_errors() {
        let inst = three_by_three(1);
        let mut m = mmq_match(&inst).unwrap();
        m.agent_to_host[0] = Some(2);
        assert!(matches!(verify(&inst, &m), Err(Error::Structural(_))));
        let wrong_size = Matching::empty(2, 3);
        assert!(matches!(verify(&inst, &wrong_size), Err(Error::Structural(_))));
    }

    #[test]
    fn large_instances_skip_pareto() {
        let n = 4;
        let agents = 12;
        let inst = MatchingInstance::new(n, vec![vec![0, 1, 2, 3]; agents], (0..agents).collect(), vec![3; n], vec![3; n]).unwrap();
        let report = verify(&inst, &mmq_match(&inst).unwrap()).unwrap();
        assert!(report.feasible);
        assert_eq!(report.pareto_optimal, None);
    }
}
