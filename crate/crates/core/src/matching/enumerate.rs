//! Exhaustive enumeration of feasible matchings, used as a test oracle.

use super::{Matching, MatchingInstance};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// `N^M`, the number of full assignments, as a float so it cannot overflow.
pub fn assignment_count(instance: &MatchingInstance) -> f64 {
    (instance.n_hosts() as f64).powi(instance.n_agents() as i32)
}

/// Every assignment that matches all agents and respects both quotas,
/// each exactly once.
pub fn enumerate_feasible(instance: &MatchingInstance, budget: u64) -> Result<FeasibleMatchings<'_>> {
    let size = assignment_count(instance);
    if size > budget as f64 {
        return Err(Error::EnumerationBudget { size, budget });
    }
    let exhausted = instance.n_hosts() == 0 && instance.n_agents() > 0;
    Ok(FeasibleMatchings {
        instance,
        digits: vec![0; instance.n_agents()],
        loads: {
            let mut loads = vec![0; instance.n_hosts()];
            if !exhausted && instance.n_agents() > 0 {
                loads[0] = instance.n_agents();
            }
            loads
        },
        done: exhausted,
    })
}

pub struct FeasibleMatchings<'a> {
    instance: &'a MatchingInstance,
    /// Current assignment as a base-N odometer.
    digits: Vec<usize>,
    loads: Vec<usize>,
    done: bool,
}

impl FeasibleMatchings<'_> {
    fn current_is_feasible(&self) -> bool {
        let (q_min, q_max) = (self.instance.q_min(), self.instance.q_max());
        self.loads
            .iter()
            .enumerate()
            .all(|(h, &k)| q_min[h] <= k && k <= q_max[h])
    }

    fn advance(&mut self) {
        let n = self.instance.n_hosts();
        for d in self.digits.iter_mut() {
            self.loads[*d] -= 1;
            *d += 1;
            if *d < n {
                self.loads[*d] += 1;
                return;
            }
            *d = 0;
            self.loads[0] += 1;
        }
        self.done = true;
    }
}

impl Iterator for FeasibleMatchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        while !self.done {
            let hit = self.current_is_feasible();
            let assignment: Option<Vec<Option<usize>>> =
                hit.then(|| self.digits.iter().map(|&h| Some(h)).collect());
            self.advance();
            if let Some(a) = assignment {
                return Some(
                    Matching::from_assignment(self.instance.n_hosts(), &a).expect("hosts in range"),
                );
            }
        }
        None
    }
}
