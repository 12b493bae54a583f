use super::{Matching, MatchingInstance};
use crate::error::{Error, Result};

/// Matching with minimum quotas.
///
/// Agents are served in master-list order. While more agents remain than
/// seats still needed to reach every host's minimum, each agent takes its
/// favourite host with spare maximum capacity. Once the two are equal, each
/// remaining agent takes its favourite host still below its minimum.
pub fn mmq_match(instance: &MatchingInstance) -> Result<Matching> {
    instance.require_quota_feasibility()?;
    let q_min = instance.q_min();
    let q_max = instance.q_max();
    let mut matching = Matching::empty(instance.n_agents(), instance.n_hosts());

    let mut deficit: usize = q_min.iter().sum();
    let mut remaining = instance.n_agents();
    let mut queue = instance.master_list().iter().copied();

    while deficit < remaining {
        let agent = queue.next().expect("remaining agents in queue");
        let host = pick(instance, &matching, agent, |h, load| load < q_max[h])?;
        if matching.loads[host] < q_min[host] {
            deficit -= 1;
        }
        matching.assign(agent, host);
        remaining -= 1;
    }

    for agent in queue {
        let host = pick(instance, &matching, agent, |h, load| load < q_min[h])?;
        matching.assign(agent, host);
        deficit -= 1;
    }
    debug_assert_eq!(deficit, 0);

    Ok(matching)
}

fn pick(
    instance: &MatchingInstance,
    matching: &Matching,
    agent: usize,
    admissible: impl Fn(usize, usize) -> bool,
) -> Result<usize> {
    instance
        .prefs(agent)
        .iter()
        .copied()
        .find(|&h| admissible(h, matching.loads[h]))
        // Unreachable with complete rankings and feasible quota sums.
        .ok_or_else(|| Error::Instance(format!("no admissible host left for agent {agent}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::fixtures::three_by_three;

    #[test]
    fn minimum_quotas_bind_immediately() {
        let m = mmq_match(&three_by_three(1)).unwrap();
        assert_eq!(m.host_to_agents, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn without_minimum_quotas_capacity_still_binds() {
        let m = mmq_match(&three_by_three(0)).unwrap();
        assert_eq!(m.host_to_agents, vec![vec![0, 1], vec![2], vec![]]);
    }

    #[test]
    fn unconstrained_regime_gives_first_choices() {
        let prefs = vec![vec![2, 0, 1], vec![0, 1, 2], vec![2, 1, 0], vec![1, 2, 0]];
        let inst = MatchingInstance::new(3, prefs.clone(), vec![3, 1, 0, 2], vec![0; 3], vec![4; 3]).unwrap();
        let m = mmq_match(&inst).unwrap();
        for (a, p) in prefs.iter().enumerate() {
            assert_eq!(m.host_of(a), Some(p[0]));
        }
    }

    #[test]
    fn single_pair() {
        let inst = MatchingInstance::new(1, vec![vec![0]], vec![0], vec![1], vec![1]).unwrap();
        assert_eq!(mmq_match(&inst).unwrap().agent_to_host, vec![Some(0)]);
    }

    #[test]
    fn empty_instance() {
        let inst = MatchingInstance::new(2, vec![], vec![], vec![0, 0], vec![1, 1]).unwrap();
        let m = mmq_match(&inst).unwrap();
        assert_eq!(m.loads, vec![0, 0]);
    }

    #[test]
    fn infeasible_quota_sums_are_errors() {
        let too_many_minima = MatchingInstance::new(2, vec![vec![0]], vec![0], vec![1, 1], vec![1, 1]).unwrap();
        assert!(matches!(
            mmq_match(&too_many_minima),
            Err(Error::InfeasibleInstance { sum_min: 2, agents: 1, sum_max: 2 })
        ));
        let too_few_seats = MatchingInstance::new(1, vec![vec![0], vec![0]], vec![0, 1], vec![0], vec![1]).unwrap();
        assert!(mmq_match(&too_few_seats).is_err());
    }

    #[test]
    fn master_list_order_decides_contested_seats() {
        // Two agents want host 0 (capacity 1); the master list favours agent 1.
        let inst = MatchingInstance::new(2, vec![vec![0, 1], vec![0, 1]], vec![1, 0], vec![0, 0], vec![1, 1]).unwrap();
        let m = mmq_match(&inst).unwrap();
        assert_eq!(m.agent_to_host, vec![Some(1), Some(0)]);
    }

    #[test]
    fn partial_list_falls_back_to_unlisted_hosts() {
        // Agent 1 only lists host 0, which is full after agent 0.
        let inst = MatchingInstance::new(2, vec![vec![0], vec![0]], vec![0, 1], vec![0, 0], vec![1, 1]).unwrap();
        let m = mmq_match(&inst).unwrap();
        assert_eq!(m.agent_to_host, vec![Some(0), Some(1)]);
    }
}
