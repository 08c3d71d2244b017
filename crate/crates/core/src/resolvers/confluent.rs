//! Search for confluent delegations under a fixed weight cap, guided by
//! integral maximum flows.
//!
//! For a cap `W`, every agent sends one unit towards the voters and each
//! voter absorbs at most `W`. A feasible integral flow in which every
//! delegator uses a single outgoing edge is a delegation of maximum weight at
//! most `W`. Otherwise some delegator splits, and we branch on its options by
//! restricting it to one of them.

use std::collections::BTreeSet;

use super::splittable::{distinct_options, FeasibilityNet};
use crate::graph::{scc_reverse_topological, shortest_path_assignment, AgentId, DelegationAssignment, NominationGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reach {
    Unset,
    One(AgentId),
    Many,
}

impl Reach {
    fn merge(self, other: Reach) -> Reach {
        match (self, other) {
            (Reach::Unset, x) | (x, Reach::Unset) => x,
            (Reach::One(a), Reach::One(b)) if a == b => Reach::One(a),
            _ => Reach::Many,
        }
    }
}

/// Option flows of one relaxation.
struct Relaxed {
    flows: Vec<Vec<i64>>,
}

impl Relaxed {
    fn positive(&self, a: AgentId) -> impl Iterator<Item = usize> + '_ {
        self.flows[a]
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > 0)
            .map(|(i, _)| i)
    }

    fn heaviest(&self, a: AgentId) -> usize {
        let row = &self.flows[a];
        (0..row.len()).max_by_key(|&i| (row[i], std::cmp::Reverse(i))).unwrap()
    }

    fn outflow(&self, a: AgentId) -> i64 {
        self.flows[a].iter().sum()
    }
}

pub(crate) struct ConfluentSearch<'a> {
    h: &'a NominationGraph,
    options: Vec<Vec<(AgentId, usize)>>,
    /// Delegators whose choice can change which voter they end at.
    branchable: Vec<bool>,
    /// Used for delegators whose choice cannot matter.
    fallback: DelegationAssignment,
    /// Number of maximum flow computations so far.
    pub flows_solved: usize,
}

impl<'a> ConfluentSearch<'a> {
    /// `h` must be fully active.
    pub fn new(h: &'a NominationGraph) -> Self {
        let options = distinct_options(h);
        let mut reach = vec![Reach::Unset; h.len()];
        let sccs = scc_reverse_topological(h);
        let mut comp = vec![0; h.len()];
        for (c, members) in sccs.iter().enumerate() {
            for &a in members {
                comp[a] = c;
            }
        }
        for (c, members) in sccs.iter().enumerate() {
            let mut r = Reach::Unset;
            for &a in members {
                if h.is_voter(a) {
                    r = r.merge(Reach::One(a));
                }
                for &t in h.nominations(a) {
                    if comp[t] != c {
                        r = r.merge(reach[t]);
                    }
                }
            }
            for &a in members {
                reach[a] = r;
            }
        }
        let branchable = (0..h.len())
            .map(|a| !h.is_voter(a) && reach[a] == Reach::Many && options[a].len() > 1)
            .collect();
        Self {
            h,
            options,
            branchable,
            fallback: shortest_path_assignment(h),
            flows_solved: 0,
        }
    }

    /// A solved relaxation in which the delegators in `fixed` are
    /// restricted to their committed option.
    fn network(&mut self, cap: u64, fixed: &[Option<usize>]) -> Option<FeasibilityNet> {
        self.flows_solved += 1;
        let mut fnet = FeasibilityNet::build(self.h, &self.options, 1, cap as i64, |a, i| {
            fixed[a].is_none_or(|c| c == i)
        });
        fnet.solve().then_some(fnet)
    }

    fn snapshot(&self, fnet: &FeasibilityNet) -> Relaxed {
        let flows = (0..self.h.len())
            .map(|a| (0..self.options[a].len()).map(|i| fnet.option_flow(a, i)).collect())
            .collect();
        Relaxed { flows }
    }

    /// Restrict `a` to `fixed[a]` and re-solve. When that is infeasible,
    /// return the committed delegators responsible: the minimum cut isolates
    /// a closed set of agents too heavy for its voters, and it can only be
    /// closed because these delegators lost their options leaving it.
    fn commit(
        &mut self,
        fnet: &mut FeasibilityNet,
        fixed: &[Option<usize>],
        a: AgentId,
    ) -> Result<(), Vec<AgentId>> {
        self.flows_solved += 1;
        fnet.restrict(a, fixed[a].expect("committed"));
        if fnet.solve() {
            return Ok(());
        }
        let side = fnet.net.source_side(fnet.source);
        Err((0..self.h.len())
            .filter(|&x| {
                side[x] && fixed[x].is_some() && self.options[x].iter().any(|&(t, _)| !side[t])
            })
            .collect())
    }

    /// The branchable delegator carrying the most flow among those that
    /// split, lowest id on ties.
    fn split_agent(&self, r: &Relaxed) -> Option<AgentId> {
        (0..self.h.len())
            .filter(|&a| self.branchable[a] && r.positive(a).nth(1).is_some())
            .max_by_key(|&a| (r.outflow(a), std::cmp::Reverse(a)))
    }

    fn assignment(&self, r: &Relaxed) -> DelegationAssignment {
        let mut out = self.fallback.clone();
        for a in 0..self.h.len() {
            if self.branchable[a] {
                let i = r.positive(a).next().expect("delegators send at least their own unit");
                out.set(a, Some(self.options[a][i].1));
            }
        }
        out
    }

    /// Branching order for `a`: options by decreasing flow, then the rest.
    fn candidates(&self, r: &Relaxed, a: AgentId) -> Vec<usize> {
        let mut c: Vec<usize> = (0..self.options[a].len()).collect();
        c.sort_by_key(|&i| (std::cmp::Reverse(r.flows[a][i]), i));
        c
    }

    /// Deterministic rounding: repeatedly commit every delegator that uses a
    /// single option, then try to commit all splitting delegators to their
    /// heaviest option at once. If that fails, commit only the heaviest
    /// splitting delegator, trying its used options in order, first on top
    /// of everything committed so far and then releasing the delegators that
    /// were only committed because they did not split. Gives up when none of
    /// that is feasible.
    pub fn dive(&mut self, cap: u64) -> Option<DelegationAssignment> {
        let n = self.h.len();
        // Branching decisions, and those plus the committed single users.
        let mut decided: Vec<Option<usize>> = vec![None; n];
        let mut fixed = decided.clone();
        let mut fnet = self.network(cap, &fixed)?;
        'dive: loop {
            let relaxed = self.snapshot(&fnet);
            for (a, slot) in fixed.iter_mut().enumerate() {
                if self.branchable[a] && slot.is_none() {
                    let mut pos = relaxed.positive(a);
                    if let (Some(i), None) = (pos.next(), pos.next()) {
                        *slot = Some(i);
                        fnet.restrict(a, i);
                    }
                }
            }
            let Some(a) = self.split_agent(&relaxed) else {
                return Some(self.assignment(&relaxed));
            };
            let mark = fnet.mark();
            for b in (0..n).filter(|&b| self.branchable[b] && fixed[b].is_none()) {
                fnet.restrict(b, relaxed.heaviest(b));
            }
            self.flows_solved += 1;
            if fnet.solve() {
                return Some(self.assignment(&self.snapshot(&fnet)));
            }
            fnet.undo(mark);
            let used: Vec<usize> = self
                .candidates(&relaxed, a)
                .into_iter()
                .filter(|&i| relaxed.flows[a][i] > 0)
                .collect();
            for release in [false, true] {
                if release {
                    fixed = decided.clone();
                    fnet = self.network(cap, &fixed)?;
                }
                for &i in &used {
                    let mark = fnet.mark();
                    fixed[a] = Some(i);
                    if self.commit(&mut fnet, &fixed, a).is_ok() {
                        decided[a] = Some(i);
                        continue 'dive;
                    }
                    fnet.undo(mark);
                }
                fixed[a] = None;
            }
            return None;
        }
    }

    /// Exhaustive depth-first search with conflict-directed backjumping:
    /// finds a delegation within `cap` if one exists.
    ///
    /// Every frame collects the committed delegators blamed for the
    /// failures below it. Once its options are exhausted, the search jumps
    /// straight back to the deepest blamed frame, so choices that play no
    /// part in the conflict are not revisited.
    pub fn exhaustive(&mut self, cap: u64) -> Option<DelegationAssignment> {
        struct Frame {
            agent: AgentId,
            candidates: Vec<usize>,
            next: usize,
            conflict: BTreeSet<AgentId>,
            mark: (usize, i64),
        }
        let n = self.h.len();
        let mut fixed: Vec<Option<usize>> = vec![None; n];
        let mut depth: Vec<Option<usize>> = vec![None; n];
        let mut fnet = self.network(cap, &fixed)?;
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            let relaxed = self.snapshot(&fnet);
            let Some(a) = self.split_agent(&relaxed) else {
                return Some(self.assignment(&relaxed));
            };
            depth[a] = Some(stack.len());
            stack.push(Frame {
                agent: a,
                candidates: self.candidates(&relaxed, a),
                next: 0,
                conflict: BTreeSet::new(),
                mark: fnet.mark(),
            });
            loop {
                let frame = stack.last_mut()?;
                let agent = frame.agent;
                if frame.next < frame.candidates.len() {
                    fnet.undo(frame.mark);
                    fixed[agent] = Some(frame.candidates[frame.next]);
                    frame.next += 1;
                    match self.commit(&mut fnet, &fixed, agent) {
                        Ok(()) => break,
                        Err(reason) => {
                            let blames_me = reason.contains(&agent);
                            frame.conflict.extend(reason.into_iter().filter(|&x| x != agent));
                            if blames_me {
                                continue;
                            }
                            // The other options would fail the same way.
                            frame.next = frame.candidates.len();
                        }
                    }
                }
                // Exhausted: jump back to the deepest blamed frame.
                let conflict = std::mem::take(&mut stack.last_mut().unwrap().conflict);
                let target = conflict.iter().filter_map(|&x| depth[x]).max()?;
                while stack.len() > target + 1 {
                    let f = stack.pop().unwrap();
                    fixed[f.agent] = None;
                    depth[f.agent] = None;
                }
                let top = stack.last_mut().unwrap();
                let top_agent = top.agent;
                top.conflict.extend(conflict.into_iter().filter(|&x| x != top_agent));
            }
        }
    }
}
