use std::collections::VecDeque;

use super::{Matching, MatchingInstance};

/// Agent-proposing deferred acceptance against maximum quotas only. Hosts
/// hold their best proposers by master-list rank; minimum quotas are ignored,
/// so the result may be infeasible.
pub fn deferred_acceptance(instance: &MatchingInstance) -> Matching {
    let n_hosts = instance.n_hosts();
    let mut matching = Matching::empty(instance.n_agents(), n_hosts);
    let mut next_choice = vec![0usize; instance.n_agents()];
    let mut free: VecDeque<usize> = instance.master_list().iter().copied().collect();

    while let Some(agent) = free.pop_front() {
        let Some(&host) = instance.prefs(agent).get(next_choice[agent]) else {
            continue; // exhausted every host
        };
        next_choice[agent] += 1;

        if matching.loads[host] < instance.q_max()[host] {
            matching.assign(agent, host);
            continue;
        }
        let worst = matching.host_to_agents[host]
            .iter()
            .copied()
            .max_by_key(|&a| instance.ml_rank(a));
        match worst {
            Some(w) if instance.ml_rank(w) > instance.ml_rank(agent) => {
                matching.unassign(w);
                matching.assign(agent, host);
                free.push_back(w);
            }
            _ => free.push_back(agent),
        }
    }
    matching
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::fixtures::three_by_three;

    #[test]
    fn counterexample_leaves_last_host_empty() {
        let m = deferred_acceptance(&three_by_three(1));
        assert_eq!(m.host_to_agents, vec![vec![0, 1], vec![2], vec![]]);
    }

    #[test]
    fn distinct_first_choices_all_granted() {
        let prefs = vec![vec![1, 0, 2], vec![2, 1, 0], vec![0, 2, 1]];
        let inst = MatchingInstance::new(3, prefs, vec![2, 0, 1], vec![0; 3], vec![1; 3]).unwrap();
        let m = deferred_acceptance(&inst);
        assert_eq!(m.agent_to_host, vec![Some(1), Some(2), Some(0)]);
    }

    #[test]
    fn higher_priority_proposer_displaces_holder() {
        // Agent 0 proposes first, then agent 1 (ML-top) displaces it.
        let inst = MatchingInstance::new(2, vec![vec![0, 1], vec![0, 1]], vec![0, 1], vec![0, 0], vec![1, 1]).unwrap();
        assert_eq!(deferred_acceptance(&inst).agent_to_host, vec![Some(0), Some(1)]);
        let inst = MatchingInstance::new(2, vec![vec![0, 1], vec![0, 1]], vec![1, 0], vec![0, 0], vec![1, 1]).unwrap();
        assert_eq!(deferred_acceptance(&inst).agent_to_host, vec![Some(1), Some(0)]);
    }

    #[test]
    fn zero_capacity_leaves_agents_unmatched() {
        let inst = MatchingInstance::new(1, vec![vec![0]], vec![0], vec![0], vec![0]).unwrap();
        assert_eq!(deferred_acceptance(&inst).agent_to_host, vec![None]);
    }
}
