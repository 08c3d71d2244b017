use serde::Serialize;

use crate::graph::{restrict_to_active, AgentId, Flow, NominationGraph};
use crate::maxflow::MaxFlow;

/// Optimal fractional flow when delegators may split their weight.
#[derive(Debug, Clone, Serialize)]
pub struct SplittableSolution {
    /// Flow on the edges of the original graph.
    pub flow: Flow,
    /// `1 + inflow` for every agent.
    pub congestion: Vec<f64>,
    pub max_congestion: f64,
    /// `max_congestion` as an exact fraction.
    pub ratio: (u64, u64),
}

impl SplittableSolution {
    /// Smallest integer at or above the optimum, a lower bound for every
    /// confluent resolution.
    pub fn ceil(&self) -> u64 {
        let (p, q) = self.ratio;
        p.div_ceil(q)
    }
}

/// Distinct nominated agents of every agent, each with the index of its
/// first occurrence in the nomination list.
pub(crate) fn distinct_options(h: &NominationGraph) -> Vec<Vec<(AgentId, usize)>> {
    (0..h.len())
        .map(|a| {
            let mut opts: Vec<(AgentId, usize)> = Vec::new();
            for (idx, &t) in h.nominations(a).iter().enumerate() {
                if !opts.iter().any(|&(u, _)| u == t) {
                    opts.push((t, idx));
                }
            }
            opts
        })
        .collect()
}

/// Every agent supplies `supply` units, every voter absorbs up to
/// `voter_cap`. Option edges are uncapacitated; `allowed` filters them.
pub(crate) struct FeasibilityNet {
    pub net: MaxFlow,
    pub option_edges: Vec<Vec<Option<usize>>>,
    pub source: usize,
    pub sink: usize,
    pub demand: i64,
    /// Flow currently routed.
    pub value: i64,
}

impl FeasibilityNet {
    pub fn build(
        h: &NominationGraph,
        options: &[Vec<(AgentId, usize)>],
        supply: i64,
        voter_cap: i64,
        allowed: impl Fn(AgentId, usize) -> bool,
    ) -> Self {
        let n = h.len();
        let (source, sink) = (n, n + 1);
        let demand = n as i64 * supply;
        let inf = demand + 1;
        let mut net = MaxFlow::new(n + 2);
        let mut option_edges = Vec::with_capacity(n);
        for (a, opts) in options.iter().enumerate() {
            net.add_edge(source, a, supply);
            if h.is_voter(a) {
                net.add_edge(a, sink, voter_cap);
            }
            option_edges.push(
                opts.iter()
                    .enumerate()
                    .map(|(i, &(t, _))| allowed(a, i).then(|| net.add_edge(a, t, inf)))
                    .collect(),
            );
        }
        Self {
            net,
            option_edges,
            source,
            sink,
            demand,
            value: 0,
        }
    }

    /// Route the remaining supply; true when all of it reaches the voters.
    pub fn solve(&mut self) -> bool {
        self.value += self.net.run(self.source, self.sink);
        self.value == self.demand
    }

    pub fn option_flow(&self, a: AgentId, i: usize) -> i64 {
        self.option_edges[a][i].map_or(0, |e| self.net.flow(e))
    }

    /// Close every option of `a` except `keep`, cancelling their flow.
    pub fn restrict(&mut self, a: AgentId, keep: usize) {
        for i in 0..self.option_edges[a].len() {
            if let Some(e) = self.option_edges[a][i] {
                if i != keep && self.net.is_open(e) {
                    self.value -= self.net.close_edge(e, self.source, self.sink);
                }
            }
        }
    }

    pub fn mark(&mut self) -> (usize, i64) {
        (self.net.mark(), self.value)
    }

    pub fn undo(&mut self, (mark, value): (usize, i64)) {
        self.net.undo(mark);
        self.value = value;
    }
}

fn reduced(p: u64, q: u64) -> (u64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(p, q).max(1);
    (p / g, q / g)
}

/// Minimum maximum congestion on a fully active graph, as `(p, q)`, and a
/// network holding a flow that attains it.
///
/// The optimum is the largest ratio `|S| / |voters in S|` over sets `S`
/// closed under nominations. Starting from the whole graph, each infeasible
/// flow exposes a denser closed set through its minimum cut, until the
/// ratio is feasible.
pub(crate) fn optimal_ratio(
    h: &NominationGraph,
    options: &[Vec<(AgentId, usize)>],
) -> ((u64, u64), Option<FeasibilityNet>) {
    let n = h.len();
    let voters = h.voter_count();
    if n == 0 || voters == 0 {
        return ((0, 1), None);
    }
    let (mut p, mut q) = reduced(n as u64, voters as u64);
    loop {
        let mut fnet = FeasibilityNet::build(h, options, q as i64, p as i64, |_, _| true);
        if fnet.solve() {
            return ((p, q), Some(fnet));
        }
        let side = fnet.net.source_side(fnet.source);
        let size = (0..n).filter(|&a| side[a]).count() as u64;
        let voters_in = (0..n).filter(|&a| side[a] && h.is_voter(a)).count() as u64;
        debug_assert!(voters_in > 0 && size * q > p * voters_in);
        (p, q) = reduced(size, voters_in);
    }
}

/// Solve the splittable relaxation exactly by parametric maximum flow.
pub fn resolve_splittable(g: &NominationGraph) -> SplittableSolution {
    let active = restrict_to_active(g);
    let h = &active.graph;
    let options = distinct_options(h);
    let (ratio, fnet) = optimal_ratio(h, &options);

    let mut flow = Flow::zero(g);
    if let Some(fnet) = fnet {
        let scale = ratio.1 as f64;
        for a in h.delegators() {
            let orig = active.to_original[a];
            for (i, &(_, idx)) in options[a].iter().enumerate() {
                let f = fnet.option_flow(a, i);
                if f > 0 {
                    flow.values[orig][active.edge_origin[a][idx]] = f as f64 / scale;
                }
            }
        }
    }
    let congestion = flow.congestion(g);
    SplittableSolution {
        flow,
        congestion,
        max_congestion: ratio.0 as f64 / ratio.1 as f64,
        ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{active_nodes, fixtures, FLOW_TOLERANCE};

    fn check(g: &NominationGraph, s: &SplittableSolution) {
        assert!(s.flow.conservation_error(g) < FLOW_TOLERANCE);
        assert!(s.flow.values.iter().flatten().all(|&x| x >= 0.0));
        for v in g.voters() {
            assert!(s.congestion[v] <= s.max_congestion + 1e-9);
        }
        let voters = g.voter_count();
        if voters > 0 {
            let lb = active_nodes(g).len() as f64 / voters as f64;
            assert!(s.max_congestion >= lb - 1e-12);
        }
    }

    #[test]
    fn one_delegator_splits_evenly() {
        let g = fixtures::diamond_one();
        let s = resolve_splittable(&g);
        assert_eq!(s.ratio, (3, 2));
        assert_eq!(s.max_congestion, 1.5);
        assert_eq!(s.flow.values[2].iter().sum::<f64>(), 1.0);
        assert_eq!(s.ceil(), 2);
        check(&g, &s);
    }

    #[test]
    fn no_delegators() {
        let g = NominationGraph::from_lists(vec![None, None]).unwrap();
        let s = resolve_splittable(&g);
        assert_eq!(s.max_congestion, 1.0);
        check(&g, &s);
    }

    #[test]
    fn two_delegators_reach_two() {
        let g = fixtures::diamond_two();
        let s = resolve_splittable(&g);
        assert_eq!(s.max_congestion, 2.0);
        check(&g, &s);
    }

    #[test]
    fn dense_closed_set_dominates_average() {
        // Voters 0, 1. Agents 2..=5 can only reach voter 0; agent 6 reaches both.
        // The closed set {0, 2, 3, 4, 5} forces congestion 5 at voter 0.
        let g = NominationGraph::from_lists(vec![
            None,
            None,
            Some(vec![0]),
            Some(vec![2]),
            Some(vec![0, 3]),
            Some(vec![4]),
            Some(vec![5, 1]),
        ])
        .unwrap();
        let s = resolve_splittable(&g);
        assert_eq!(s.ratio, (5, 1));
        assert!((s.congestion[1] - 2.0).abs() < 1e-9);
        check(&g, &s);
    }

    #[test]
    fn inactive_agents_carry_nothing() {
        let g = fixtures::dead_pair();
        let s = resolve_splittable(&g);
        assert_eq!(s.max_congestion, 1.0);
        assert!(s.flow.values[1].iter().chain(&s.flow.values[2]).all(|&x| x == 0.0));
    }

    #[test]
    fn no_voters() {
        let g = NominationGraph::new(vec![false, false], vec![vec![1], vec![0]]).unwrap();
        assert_eq!(resolve_splittable(&g).max_congestion, 0.0);
    }
}
