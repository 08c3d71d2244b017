use serde::Serialize;

use super::{AgentId, DelegationAssignment, NominationGraph};
use crate::error::{Error, Result};

/// Weights of a resolved delegation subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    /// `w(n)` for every agent in the delegation subgraph, 0 for unused agents.
    pub weight: Vec<u64>,
    pub voters: Vec<AgentId>,
    pub max_weight: u64,
    pub utilized_votes: u64,
}

impl WeightReport {
    pub fn voter_weights(&self) -> impl Iterator<Item = u64> + '_ {
        self.voters.iter().map(|&v| self.weight[v])
    }
}

/// Check that `a` is a valid (not necessarily maximal) assignment for `g`.
pub(crate) fn validate_assignment(g: &NominationGraph, a: &DelegationAssignment) -> Result<()> {
    if a.len() != g.len() {
        return Err(Error::AssignmentSize {
            expected: g.len(),
            got: a.len(),
        });
    }
    for agent in 0..g.len() {
        if let Some(choice) = a.choice(agent) {
            if g.is_voter(agent) || choice >= g.nominations(agent).len() {
                return Err(Error::InvalidChoice { agent, choice });
            }
        }
    }
    for agent in 0..g.len() {
        if let Some(t) = a.target(g, agent) {
            if !g.is_voter(t) && a.choice(t).is_none() {
                return Err(Error::DeadEnd { agent });
            }
        }
    }
    Ok(())
}

/// Weight of every node, accumulated from the leaves of the delegation
/// forest towards the voters.
pub fn compute_weights(g: &NominationGraph, a: &DelegationAssignment) -> Result<WeightReport> {
    validate_assignment(g, a)?;
    let n = g.len();
    let in_subgraph: Vec<bool> = (0..n).map(|x| g.is_voter(x) || a.choice(x).is_some()).collect();

    let mut pending = vec![0usize; n];
    for (_, t) in a.edges(g) {
        pending[t] += 1;
    }
    let mut weight: Vec<u64> = in_subgraph.iter().map(|&on| u64::from(on)).collect();
    let mut stack: Vec<AgentId> = (0..n).filter(|&x| in_subgraph[x] && pending[x] == 0).collect();
    let mut done = 0usize;
    while let Some(x) = stack.pop() {
        done += 1;
        if let Some(t) = a.target(g, x) {
            weight[t] += weight[x];
            pending[t] -= 1;
            if pending[t] == 0 {
                stack.push(t);
            }
        }
    }
    let total = in_subgraph.iter().filter(|&&on| on).count();
    if done != total {
        let agent = (0..n).find(|&x| in_subgraph[x] && pending[x] > 0).unwrap();
        return Err(Error::Cycle { agent });
    }

    let voters: Vec<AgentId> = g.voters().collect();
    let max_weight = voters.iter().map(|&v| weight[v]).max().unwrap_or(0);
    Ok(WeightReport {
        weight,
        voters,
        max_weight,
        utilized_votes: total as u64,
    })
}
