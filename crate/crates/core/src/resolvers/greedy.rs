use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{finish, Mechanism, ResolutionResult};
use crate::error::{Error, Result};
use crate::generator::{Arrival, ArrivalTrace};
use crate::graph::{
    compute_weights, restrict_to_active, scc_reverse_topological, AgentId, DelegationAssignment,
    NominationGraph,
};

/// Among the options of `a` that already lead to a voter, the one whose
/// voter is lightest; ties go to the lower voter id, then the earlier
/// nomination.
fn lightest(
    targets: &[AgentId],
    root: &[Option<AgentId>],
    weight: &[u64],
) -> Option<(usize, AgentId)> {
    targets
        .iter()
        .enumerate()
        .filter_map(|(i, &t)| root[t].map(|v| (i, v)))
        .min_by_key(|&(i, v)| (weight[v], v, i))
}

/// The greedy mechanism fed one arrival at a time. Every agent remembers the
/// voter it ends at, so a new delegator compares its options in constant
/// time each.
#[derive(Debug, Clone, Default)]
pub struct GreedyOnline {
    choice: Vec<Option<usize>>,
    root: Vec<Option<AgentId>>,
    /// Current weight of every voter, 0 for delegators.
    weight: Vec<u64>,
    max_weight: u64,
}

impl GreedyOnline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    /// Weights of the voters inserted so far.
    pub fn voter_weights(&self) -> impl Iterator<Item = u64> + '_ {
        self.weight.iter().copied().filter(|&w| w > 0)
    }

    pub fn push(&mut self, event: &Arrival) -> Result<()> {
        let me = self.len();
        match event {
            Arrival::Voter => {
                self.choice.push(None);
                self.root.push(Some(me));
                self.weight.push(1);
                self.max_weight = self.max_weight.max(1);
            }
            Arrival::Delegator(targets) => {
                if let Some(&target) = targets.iter().find(|&&t| t >= me) {
                    return Err(Error::FutureReference { step: me, target });
                }
                let Some((i, v)) = lightest(targets, &self.root, &self.weight) else {
                    return Err(Error::DelegatorWithoutNominations { agent: me });
                };
                self.choice.push(Some(i));
                self.root.push(Some(v));
                self.weight.push(0);
                self.weight[v] += 1;
                self.max_weight = self.max_weight.max(self.weight[v]);
            }
        }
        Ok(())
    }

    pub fn assignment(&self) -> DelegationAssignment {
        DelegationAssignment::from_choices(self.choice.clone())
    }
}

/// Resolve agents in arrival order, each picking the option whose voter is
/// currently lightest.
pub fn resolve_greedy_online(trace: &ArrivalTrace) -> Result<ResolutionResult> {
    let start = Instant::now();
    let mut greedy = GreedyOnline::new();
    for ev in &trace.events {
        greedy.push(ev)?;
    }
    let g = trace.to_graph()?;
    let assignment = greedy.assignment();
    let report = compute_weights(&g, &assignment)?;
    Ok(ResolutionResult {
        assignment,
        report,
        mechanism: Mechanism::Greedy,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Greedy delegation of a fully active graph. Components are visited from
/// the voters outwards; inside a component, the lowest id agent with an
/// option into the resolved region goes next.
pub(crate) fn greedy_on_active(h: &NominationGraph) -> DelegationAssignment {
    let n = h.len();
    let sccs = scc_reverse_topological(h);
    let mut comp = vec![0; n];
    for (c, members) in sccs.iter().enumerate() {
        for &a in members {
            comp[a] = c;
        }
    }
    let mut out = DelegationAssignment::unused(n);
    let mut root: Vec<Option<AgentId>> = vec![None; n];
    let mut weight = vec![0u64; n];
    for v in h.voters() {
        root[v] = Some(v);
        weight[v] = 1;
    }
    let mut queued = vec![false; n];
    for (c, members) in sccs.iter().enumerate() {
        let mut ready: BinaryHeap<Reverse<AgentId>> = BinaryHeap::new();
        for &a in members {
            if root[a].is_none() && h.nominations(a).iter().any(|&t| root[t].is_some()) {
                queued[a] = true;
                ready.push(Reverse(a));
            }
        }
        while let Some(Reverse(a)) = ready.pop() {
            let (i, v) = lightest(h.nominations(a), &root, &weight)
                .expect("queued agents have a resolved option");
            out.set(a, Some(i));
            root[a] = Some(v);
            weight[v] += 1;
            for &(src, _) in h.nominators(a) {
                if comp[src] == c && !queued[src] {
                    queued[src] = true;
                    ready.push(Reverse(src));
                }
            }
        }
    }
    out
}

/// Greedy over strongly connected components in reverse topological order.
/// Agents that cannot reach a voter stay unused.
pub fn resolve_greedy_generalized(g: &NominationGraph) -> Result<ResolutionResult> {
    let start = Instant::now();
    let active = restrict_to_active(g);
    let sub = greedy_on_active(&active.graph);
    finish(g, &active, &sub, Mechanism::Greedy, start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, GeneratorParams};
    use crate::graph::fixtures;

    fn trace(text: &str) -> ArrivalTrace {
        text.parse().unwrap()
    }

    #[test]
    fn tie_goes_to_lowest_voter() {
        let r = resolve_greedy_online(&trace("V\nV\nD 0 1\n")).unwrap();
        assert_eq!(r.assignment.choice(2), Some(0));
        assert_eq!((r.report.weight[0], r.report.weight[1]), (2, 1));
    }

    #[test]
    fn forced_chain() {
        let r = resolve_greedy_online(&trace("V\nD 0\nD 0\n")).unwrap();
        assert_eq!(r.max_weight(), 3);
    }

    #[test]
    fn balances_two_voters() {
        let r = resolve_greedy_online(&trace("V\nV\nD 0 1\nD 0 1\n")).unwrap();
        assert_eq!((r.report.weight[0], r.report.weight[1]), (2, 2));
        assert_eq!(r.max_weight(), 2);
    }

    #[test]
    fn follows_delegations_to_the_voter() {
        // Agent 3 compares voter 0 (weight 2 through agent 2) with voter 1.
        let r = resolve_greedy_online(&trace("V\nV\nD 0\nD 2 1\n")).unwrap();
        assert_eq!(r.assignment.choice(3), Some(1));
    }

    #[test]
    fn online_rejects_future_references() {
        let mut greedy = GreedyOnline::new();
        greedy.push(&Arrival::Voter).unwrap();
        assert!(matches!(
            greedy.push(&Arrival::Delegator(vec![1])),
            Err(Error::FutureReference { step: 1, target: 1 })
        ));
    }

    #[test]
    fn generalized_matches_online_on_generated_graphs() {
        for seed in 0..100 {
            let p = GeneratorParams::new(0.6, 2, (seed % 3) as f64, seed);
            let (g, tr) = generate(&p, 200).unwrap();
            let online = resolve_greedy_online(&tr).unwrap();
            let general = resolve_greedy_generalized(&g).unwrap();
            assert_eq!(online.assignment, general.assignment, "seed {seed}");
        }
    }

    #[test]
    fn cycle_resolved_through_its_exit() {
        // Voter 0; 1 <-> 2, and 1 also nominates the voter.
        let g = NominationGraph::from_lists(vec![None, Some(vec![2, 0]), Some(vec![1])]).unwrap();
        let r = resolve_greedy_generalized(&g).unwrap();
        assert_eq!(r.assignment.choice(1), Some(1));
        assert_eq!(r.assignment.choice(2), Some(0));
        assert_eq!(r.max_weight(), 3);
    }

    #[test]
    fn dead_cycle_unused() {
        let r = resolve_greedy_generalized(&fixtures::dead_pair()).unwrap();
        assert_eq!(r.max_weight(), 1);
        assert_eq!(r.assignment.choices(), &[None, None, None]);
    }
}
