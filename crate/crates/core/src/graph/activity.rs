use std::collections::VecDeque;

use super::{AgentId, DelegationAssignment, NominationGraph};

/// Agents from which some voter is reachable along nominations, as a mask.
/// Voters are always active.
pub fn active_mask(g: &NominationGraph) -> Vec<bool> {
    let mut active = vec![false; g.len()];
    let mut queue: VecDeque<AgentId> = g.voters().collect();
    for &v in &queue {
        active[v] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &(src, _) in g.nominators(a) {
            if !active[src] {
                active[src] = true;
                queue.push_back(src);
            }
        }
    }
    active
}

/// Sorted list of active agents.
pub fn active_nodes(g: &NominationGraph) -> Vec<AgentId> {
    active_mask(g)
        .into_iter()
        .enumerate()
        .filter_map(|(a, on)| on.then_some(a))
        .collect()
}

/// The subgraph induced on the active agents, with ids remapped densely in
/// their original order.
#[derive(Debug, Clone)]
pub struct ActiveSubgraph {
    pub graph: NominationGraph,
    /// New id -> original id.
    pub to_original: Vec<AgentId>,
    /// Original id -> new id, `None` for inactive agents.
    pub from_original: Vec<Option<AgentId>>,
    /// For every kept nomination, its index in the original nomination list.
    pub edge_origin: Vec<Vec<usize>>,
}

impl ActiveSubgraph {
    pub fn original_len(&self) -> usize {
        self.from_original.len()
    }

    /// Map an assignment on the subgraph back onto the original graph.
    /// Inactive agents stay unused.
    pub fn lift(&self, sub: &DelegationAssignment) -> DelegationAssignment {
        let mut out = DelegationAssignment::unused(self.original_len());
        for (new, &orig) in self.to_original.iter().enumerate() {
            out.set(orig, sub.choice(new).map(|i| self.edge_origin[new][i]));
        }
        out
    }
}

pub fn restrict_to_active(g: &NominationGraph) -> ActiveSubgraph {
    let active = active_mask(g);
    let mut from_original = vec![None; g.len()];
    let mut to_original = Vec::new();
    for a in 0..g.len() {
        if active[a] {
            from_original[a] = Some(to_original.len());
            to_original.push(a);
        }
    }
    let mut is_voter = Vec::with_capacity(to_original.len());
    let mut nominations = Vec::with_capacity(to_original.len());
    let mut edge_origin = Vec::with_capacity(to_original.len());
    for &orig in &to_original {
        is_voter.push(g.is_voter(orig));
        let mut targets = Vec::new();
        let mut origin = Vec::new();
        for (idx, &t) in g.nominations(orig).iter().enumerate() {
            if let Some(nt) = from_original[t] {
                targets.push(nt);
                origin.push(idx);
            }
        }
        nominations.push(targets);
        edge_origin.push(origin);
    }
    let graph = NominationGraph::new(is_voter, nominations)
        .expect("active delegators keep at least one active nomination");
    ActiveSubgraph {
        graph,
        to_original,
        from_original,
        edge_origin,
    }
}

/// BFS distance (in edges) from every agent to the voter set; `None` when
/// no voter is reachable.
pub(crate) fn distance_to_voters(g: &NominationGraph) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.len()];
    let mut queue = VecDeque::new();
    for v in g.voters() {
        dist[v] = Some(0);
        queue.push_back(v);
    }
    while let Some(a) = queue.pop_front() {
        let da = dist[a].unwrap();
        for &(src, _) in g.nominators(a) {
            if dist[src].is_none() {
                dist[src] = Some(da + 1);
                queue.push_back(src);
            }
        }
    }
    dist
}

/// Every active delegator follows its first nomination that lies on a
/// shortest path to the voter set. Inactive agents are left unused.
pub fn shortest_path_assignment(g: &NominationGraph) -> DelegationAssignment {
    let dist = distance_to_voters(g);
    let mut out = DelegationAssignment::unused(g.len());
    for a in g.delegators() {
        let Some(da) = dist[a] else { continue };
        let pick = g
            .nominations(a)
            .iter()
            .position(|&t| dist[t] == Some(da - 1))
            .expect("an active delegator has a successor one step closer");
        out.set(a, Some(pick));
    }
    out
}
