//! One-to-many matching with minimum and maximum host quotas under a master
//! list shared by all hosts.
//!
//! Agents are UEs and hosts are base stations in the association setting,
//! but nothing here depends on that.

mod da;
mod enumerate;
mod mmq;
mod text;
pub use text::describe;
mod verify;

pub use da::deferred_acceptance;
pub use enumerate::{assignment_count, enumerate_feasible, FeasibleMatchings, DEFAULT_ENUMERATION_BUDGET};
pub use mmq::mmq_match;
pub use verify::{verify, verify_with_budget, VerifierReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingInstance {
    n_hosts: usize,
    /// Complete strict rankings, most preferred first.
    agent_prefs: Vec<Vec<usize>>,
    /// How many leading entries of each ranking were given explicitly.
    listed: Vec<usize>,
    master_list: Vec<usize>,
    q_min: Vec<usize>,
    q_max: Vec<usize>,
    /// `pref_rank[a][h]`: position of host `h` in agent `a`'s ranking.
    pref_rank: Vec<Vec<usize>>,
    /// `ml_rank[a]`: position of agent `a` in the master list.
    ml_rank: Vec<usize>,
}

impl MatchingInstance {
    /// Builds an instance. An agent's ranking may cover only a subset of the
    /// hosts; unlisted hosts are appended in index order so every agent can
    /// always be placed.
    pub fn new(
        n_hosts: usize,
        agent_prefs: Vec<Vec<usize>>,
        master_list: Vec<usize>,
        q_min: Vec<usize>,
        q_max: Vec<usize>,
    ) -> Result<Self> {
        let n_agents = agent_prefs.len();
        if q_min.len() != n_hosts || q_max.len() != n_hosts {
            return Err(Error::Instance(format!(
                "expected {n_hosts} quotas, got {} minima and {} maxima",
                q_min.len(),
                q_max.len()
            )));
        }
        if let Some(h) = (0..n_hosts).find(|&h| q_min[h] > q_max[h]) {
            return Err(Error::Instance(format!(
                "host {h} has minimum quota {} above maximum quota {}",
                q_min[h], q_max[h]
            )));
        }

        let ml_rank = permutation_ranks(&master_list, n_agents)
            .ok_or_else(|| Error::Instance("master list is not a permutation of the agents".into()))?;

        let mut listed = Vec::with_capacity(n_agents);
        let mut complete = Vec::with_capacity(n_agents);
        let mut pref_rank = Vec::with_capacity(n_agents);
        for (a, prefs) in agent_prefs.into_iter().enumerate() {
            if n_hosts > 0 && prefs.is_empty() {
                return Err(Error::Instance(format!("agent {a} ranks no host")));
            }
            let mut seen = vec![false; n_hosts];
            for &h in &prefs {
                if h >= n_hosts {
                    return Err(Error::Instance(format!("agent {a} ranks unknown host {h}")));
                }
                if std::mem::replace(&mut seen[h], true) {
                    return Err(Error::Instance(format!("agent {a} ranks host {h} twice")));
                }
            }
            listed.push(prefs.len());
            let mut full = prefs;
            full.extend((0..n_hosts).filter(|&h| !seen[h]));
            let mut rank = vec![0; n_hosts];
            for (pos, &h) in full.iter().enumerate() {
                rank[h] = pos;
            }
            complete.push(full);
            pref_rank.push(rank);
        }

        Ok(MatchingInstance {
            n_hosts,
            agent_prefs: complete,
            listed,
            master_list,
            q_min,
            q_max,
            pref_rank,
            ml_rank,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.agent_prefs.len()
    }

    pub fn n_hosts(&self) -> usize {
        self.n_hosts
    }

    /// Complete ranking of `agent`, most preferred first.
    pub fn prefs(&self, agent: usize) -> &[usize] {
        &self.agent_prefs[agent]
    }

    /// The explicitly listed prefix of `agent`'s ranking.
    pub fn listed_prefs(&self, agent: usize) -> &[usize] {
        &self.agent_prefs[agent][..self.listed[agent]]
    }

    pub fn master_list(&self) -> &[usize] {
        &self.master_list
    }

    pub fn q_min(&self) -> &[usize] {
        &self.q_min
    }

    pub fn q_max(&self) -> &[usize] {
        &self.q_max
    }

    /// Position of `host` in `agent`'s ranking (0 = favourite).
    pub fn pref_rank(&self, agent: usize, host: usize) -> usize {
        self.pref_rank[agent][host]
    }

    /// Position of `agent` in the master list (0 = highest priority).
    pub fn ml_rank(&self, agent: usize) -> usize {
        self.ml_rank[agent]
    }

    /// `true` if `agent` strictly prefers `a` to `b`; `None` means unmatched,
    /// which is worse than any host.
    pub fn prefers(&self, agent: usize, a: Option<usize>, b: Option<usize>) -> bool {
        self.rank_of(agent, a) < self.rank_of(agent, b)
    }

    pub(crate) fn rank_of(&self, agent: usize, host: Option<usize>) -> usize {
        host.map_or(self.n_hosts, |h| self.pref_rank[agent][h])
    }

    /// Whether `sum(q_min) <= M <= sum(q_max)`.
    pub fn quota_sums_admit_feasibility(&self) -> bool {
        let (lo, hi) = self.quota_sums();
        lo <= self.n_agents() && self.n_agents() <= hi
    }

    pub(crate) fn quota_sums(&self) -> (usize, usize) {
        (self.q_min.iter().sum(), self.q_max.iter().sum())
    }

    pub(crate) fn require_quota_feasibility(&self) -> Result<()> {
        if self.quota_sums_admit_feasibility() {
            Ok(())
        } else {
            let (sum_min, sum_max) = self.quota_sums();
            Err(Error::InfeasibleInstance {
                sum_min,
                agents: self.n_agents(),
                sum_max,
            })
        }
    }
}

fn permutation_ranks(order: &[usize], n: usize) -> Option<Vec<usize>> {
    if order.len() != n {
        return None;
    }
    let mut rank = vec![usize::MAX; n];
    for (pos, &a) in order.iter().enumerate() {
        if a >= n || rank[a] != usize::MAX {
            return None;
        }
        rank[a] = pos;
    }
    Some(rank)
}

/// An assignment of agents to hosts, kept in both directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    pub agent_to_host: Vec<Option<usize>>,
    /// Agents of each host in ascending index order.
    pub host_to_agents: Vec<Vec<usize>>,
    pub loads: Vec<usize>,
}

impl Matching {
    pub fn empty(n_agents: usize, n_hosts: usize) -> Self {
        Matching {
            agent_to_host: vec![None; n_agents],
            host_to_agents: vec![Vec::new(); n_hosts],
            loads: vec![0; n_hosts],
        }
    }

    pub fn from_assignment(n_hosts: usize, agent_to_host: &[Option<usize>]) -> Result<Self> {
        let mut m = Matching::empty(agent_to_host.len(), n_hosts);
        for (a, h) in agent_to_host.iter().enumerate() {
            if let Some(h) = *h {
                if h >= n_hosts {
                    return Err(Error::Structural(format!("agent {a} assigned to unknown host {h}")));
                }
                m.assign(a, h);
            }
        }
        Ok(m)
    }

    pub fn n_agents(&self) -> usize {
        self.agent_to_host.len()
    }

    pub fn n_hosts(&self) -> usize {
        self.host_to_agents.len()
    }

    pub fn host_of(&self, agent: usize) -> Option<usize> {
        self.agent_to_host[agent]
    }

    pub(crate) fn assign(&mut self, agent: usize, host: usize) {
        debug_assert!(self.agent_to_host[agent].is_none());
        self.agent_to_host[agent] = Some(host);
        let members = &mut self.host_to_agents[host];
        let pos = members.partition_point(|&x| x < agent);
        members.insert(pos, agent);
        self.loads[host] += 1;
    }

    pub(crate) fn unassign(&mut self, agent: usize) {
        if let Some(host) = self.agent_to_host[agent].take() {
            let members = &mut self.host_to_agents[host];
            let pos = members.binary_search(&agent).expect("consistent matching");
            members.remove(pos);
            self.loads[host] -= 1;
        }
    }

    /// Checks that both directions and the loads agree.
    pub fn check_consistent(&self) -> Result<()> {
        let n_hosts = self.n_hosts();
        if self.loads.len() != n_hosts {
            return Err(Error::Structural(format!(
                "{} loads for {n_hosts} hosts",
                self.loads.len()
            )));
        }
        let mut seen = vec![false; self.n_agents()];
        for (h, members) in self.host_to_agents.iter().enumerate() {
            if members.len() != self.loads[h] {
                return Err(Error::Structural(format!(
                    "host {h} lists {} agents but has load {}",
                    members.len(),
                    self.loads[h]
                )));
            }
            for &a in members {
                if a >= self.n_agents() {
                    return Err(Error::Structural(format!("host {h} lists unknown agent {a}")));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return Err(Error::Structural(format!("agent {a} listed more than once")));
                }
                if self.agent_to_host[a] != Some(h) {
                    return Err(Error::Structural(format!(
                        "agent {a} is in host {h}'s set but mapped to {:?}",
                        self.agent_to_host[a]
                    )));
                }
            }
        }
        if let Some(a) = (0..self.n_agents()).find(|&a| self.agent_to_host[a].is_some() && !seen[a]) {
            return Err(Error::Structural(format!(
                "agent {a} is mapped to {:?} but missing from its host set",
                self.agent_to_host[a]
            )));
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_rankings_are_completed_by_index() {
        let inst = MatchingInstance::new(4, vec![vec![2], vec![3, 0]], vec![1, 0], vec![0; 4], vec![2; 4]).unwrap();
        assert_eq!(inst.prefs(0), &[2, 0, 1, 3]);
        assert_eq!(inst.listed_prefs(0), &[2]);
        assert_eq!(inst.prefs(1), &[3, 0, 1, 2]);
        assert_eq!(inst.pref_rank(1, 2), 3);
        assert_eq!(inst.ml_rank(1), 0);
        assert!(inst.prefers(0, Some(2), Some(0)));
        assert!(inst.prefers(0, Some(3), None));
    }

    #[test]
    fn malformed_instances_are_rejected() {
        let ok = |prefs: Vec<Vec<usize>>, ml: Vec<usize>, qmin: Vec<usize>, qmax: Vec<usize>| {
            MatchingInstance::new(2, prefs, ml, qmin, qmax)
        };
        assert!(ok(vec![vec![0, 0]], vec![0], vec![0, 0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![2]], vec![0], vec![0, 0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![]], vec![0], vec![0, 0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![0]], vec![1], vec![0, 0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![0], vec![1]], vec![0, 0], vec![0, 0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![0]], vec![0], vec![2, 0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![0]], vec![0], vec![0], vec![1, 1]).is_err());
        assert!(ok(vec![vec![1]], vec![0], vec![0, 0], vec![1, 1]).is_ok());
    }

    #[test]
    fn matching_bookkeeping() {
        let mut m = Matching::from_assignment(2, &[Some(1), None, Some(1), Some(0)]).unwrap();
        assert_eq!(m.loads, vec![1, 2]);
        assert_eq!(m.host_to_agents, vec![vec![3], vec![0, 2]]);
        m.check_consistent().unwrap();
        m.unassign(0);
        m.assign(1, 0);
        assert_eq!(m.host_to_agents, vec![vec![1, 3], vec![2]]);
        m.check_consistent().unwrap();
        assert!(Matching::from_assignment(2, &[Some(2)]).is_err());
    }

    #[test]
    fn inconsistencies_are_detected() {
        let good = Matching::from_assignment(2, &[Some(0), Some(1)]).unwrap();
        let mut bad = good.clone();
        bad.agent_to_host[0] = Some(1);
        assert!(bad.check_consistent().is_err());
        let mut bad = good.clone();
        bad.loads[0] = 3;
        assert!(bad.check_consistent().is_err());
        let mut bad = good.clone();
        bad.host_to_agents[1].push(0);
        bad.loads[1] += 1;
        assert!(bad.check_consistent().is_err());
        let mut bad = good;
        bad.host_to_agents[0].clear();
        bad.loads[0] = 0;
        assert!(bad.check_consistent().is_err());
    }
}
