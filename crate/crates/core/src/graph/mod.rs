//! Nomination graphs and the delegation subgraphs chosen from them.
//!
//! A [`NominationGraph`] is immutable once built. Every agent is either a
//! voter (a sink) or a delegator with one or more ordered nominations.
//! Parallel nominations are kept as distinct entries, so a resolved choice is
//! an index into the nomination list rather than a target id.

mod activity;
mod flow;
mod io;
mod scc;
mod weights;

pub use activity::{active_nodes, restrict_to_active, shortest_path_assignment, ActiveSubgraph};
pub use flow::{delegation_to_flow, flow_to_delegation, Flow, FLOW_TOLERANCE};
pub use io::{AgentRecord, GraphFile};
pub use scc::scc_reverse_topological;
pub use weights::{compute_weights, WeightReport};

use crate::error::{Error, Result};

/// Dense agent index, `0..n`.
pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NominationGraph {
    is_voter: Vec<bool>,
    nominations: Vec<Vec<AgentId>>,
    /// `(source, nomination index)` for every edge ending at the agent.
    reverse: Vec<Vec<(AgentId, usize)>>,
}

impl NominationGraph {
    pub fn new(is_voter: Vec<bool>, nominations: Vec<Vec<AgentId>>) -> Result<Self> {
        let n = is_voter.len();
        if nominations.len() != n {
            return Err(Error::NonContiguousIds {
                n,
                found: (0..nominations.len()).collect(),
            });
        }
        let mut reverse = vec![Vec::new(); n];
        for (agent, targets) in nominations.iter().enumerate() {
            if is_voter[agent] && !targets.is_empty() {
                return Err(Error::VoterWithNominations { agent });
            }
            if !is_voter[agent] && targets.is_empty() {
                return Err(Error::DelegatorWithoutNominations { agent });
            }
            for (idx, &target) in targets.iter().enumerate() {
                if target >= n {
                    return Err(Error::UnknownTarget { agent, target });
                }
                if target == agent {
                    return Err(Error::SelfLoop { agent });
                }
                reverse[target].push((agent, idx));
            }
        }
        Ok(Self {
            is_voter,
            nominations,
            reverse,
        })
    }

    /// Convenience constructor: `None` marks a voter.
    pub fn from_lists(agents: Vec<Option<Vec<AgentId>>>) -> Result<Self> {
        let is_voter = agents.iter().map(Option::is_none).collect();
        let nominations = agents.into_iter().map(Option::unwrap_or_default).collect();
        Self::new(is_voter, nominations)
    }

    pub fn len(&self) -> usize {
        self.is_voter.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_voter.is_empty()
    }

    pub fn is_voter(&self, agent: AgentId) -> bool {
        self.is_voter[agent]
    }

    pub fn voters(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.len()).filter(|&a| self.is_voter[a])
    }

    pub fn delegators(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.len()).filter(|&a| !self.is_voter[a])
    }

    pub fn voter_count(&self) -> usize {
        self.is_voter.iter().filter(|&&v| v).count()
    }

    pub fn nominations(&self, agent: AgentId) -> &[AgentId] {
        &self.nominations[agent]
    }

    /// Edges ending at `agent`, as `(source, index into source's nominations)`.
    pub fn nominators(&self, agent: AgentId) -> &[(AgentId, usize)] {
        &self.reverse[agent]
    }

    pub fn edge_count(&self) -> usize {
        self.nominations.iter().map(Vec::len).sum()
    }

    /// The graph induced on agents `0..t`. Only meaningful for graphs whose
    /// edges point to lower ids, such as generated ones.
    pub fn prefix(&self, t: usize) -> Result<Self> {
        let t = t.min(self.len());
        Self::new(
            self.is_voter[..t].to_vec(),
            self.nominations[..t].to_vec(),
        )
    }

    /// Relabel agents: agent `a` becomes `perm[a]`. Nomination order is kept.
    pub fn relabel(&self, perm: &[AgentId]) -> Result<Self> {
        let n = self.len();
        let mut is_voter = vec![false; n];
        let mut nominations = vec![Vec::new(); n];
        for a in 0..n {
            is_voter[perm[a]] = self.is_voter[a];
            nominations[perm[a]] = self.nominations[a].iter().map(|&t| perm[t]).collect();
        }
        Self::new(is_voter, nominations)
    }
}

/// One materialised nomination per delegator, or `None` when the delegator's
/// vote is left unused. Voters always hold `None`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DelegationAssignment {
    choice: Vec<Option<usize>>,
}

impl DelegationAssignment {
    pub fn unused(n: usize) -> Self {
        Self {
            choice: vec![None; n],
        }
    }

    pub fn from_choices(choice: Vec<Option<usize>>) -> Self {
        Self { choice }
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn choice(&self, agent: AgentId) -> Option<usize> {
        self.choice[agent]
    }

    pub fn choices(&self) -> &[Option<usize>] {
        &self.choice
    }

    pub fn set(&mut self, agent: AgentId, choice: Option<usize>) {
        self.choice[agent] = choice;
    }

    /// Agent that `agent` delegates to, if resolved.
    pub fn target(&self, g: &NominationGraph, agent: AgentId) -> Option<AgentId> {
        self.choice[agent].map(|i| g.nominations(agent)[i])
    }

    /// Edges of the delegation subgraph as `(delegator, delegate)`.
    pub fn edges<'a>(
        &'a self,
        g: &'a NominationGraph,
    ) -> impl Iterator<Item = (AgentId, AgentId)> + 'a {
        (0..self.len()).filter_map(move |a| self.target(g, a).map(|t| (a, t)))
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_voter_with_nominations() {
        let err = NominationGraph::new(vec![true, true], vec![vec![1], vec![]]).unwrap_err();
        assert!(matches!(err, Error::VoterWithNominations { agent: 0 }));
    }

    #[test]
    fn rejects_empty_delegator_self_loop_and_bad_target() {
        assert!(matches!(
            NominationGraph::new(vec![false], vec![vec![]]),
            Err(Error::DelegatorWithoutNominations { agent: 0 })
        ));
        assert!(matches!(
            NominationGraph::new(vec![true, false], vec![vec![], vec![1]]),
            Err(Error::SelfLoop { agent: 1 })
        ));
        assert!(matches!(
            NominationGraph::new(vec![true, false], vec![vec![], vec![7]]),
            Err(Error::UnknownTarget { agent: 1, target: 7 })
        ));
    }

    #[test]
    fn keeps_parallel_edges() {
        let g = NominationGraph::from_lists(vec![None, Some(vec![0, 0])]).unwrap();
        assert_eq!(g.nominations(1), &[0, 0]);
        assert_eq!(g.nominators(0), &[(1, 0), (1, 1)]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn relabel_round_trip() {
        let g = fixtures::intro_example();
        let perm = [3, 1, 0, 2];
        let h = g.relabel(&perm).unwrap();
        assert!(h.is_voter(3));
        assert_eq!(h.nominations(2), &[0]);
        let mut inv = [0; 4];
        for (a, &p) in perm.iter().enumerate() {
            inv[p] = a;
        }
        assert_eq!(h.relabel(&inv).unwrap(), g);
    }
}
