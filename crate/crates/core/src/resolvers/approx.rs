use std::time::Instant;

use super::confluent::ConfluentSearch;
use super::splittable::{distinct_options, optimal_ratio};
use super::{finish, Mechanism, ResolutionResult};
use crate::error::Result;
use crate::graph::{compute_weights, restrict_to_active, shortest_path_assignment, DelegationAssignment, NominationGraph};

/// Round the splittable optimum to a confluent delegation.
///
/// Starting at the rounded-up fractional optimum, the cap grows by one and
/// then by doubling steps until the rounding dive succeeds, and a bisection
/// over the last gap follows. The shortest path forest is returned if the
/// cap reaches its weight first.
pub fn resolve_approx(g: &NominationGraph) -> Result<ResolutionResult> {
    let start = Instant::now();
    let active = restrict_to_active(g);
    let h = &active.graph;
    if h.delegators().next().is_none() {
        return finish(g, &active, &DelegationAssignment::unused(h.len()), Mechanism::Approx, start);
    }
    let fallback = shortest_path_assignment(h);
    let upper = compute_weights(h, &fallback)?.max_weight;
    let ((p, q), _) = optimal_ratio(h, &distinct_options(h));
    let base = p.div_ceil(q);
    let mut search = ConfluentSearch::new(h);
    let mut step = 0;
    let mut failed = None;
    let (mut cap, mut best) = loop {
        let cap = base + step;
        if cap >= upper {
            break (upper, fallback);
        }
        if let Some(a) = search.dive(cap) {
            break (cap, a);
        }
        failed = Some(cap);
        step = (2 * step).max(1);
    };
    if let Some(mut lo) = failed {
        while cap - lo > 1 {
            let mid = lo + (cap - lo) / 2;
            match search.dive(mid) {
                Some(a) => (cap, best) = (mid, a),
                None => lo = mid,
            }
        }
    }
    finish(g, &active, &best, Mechanism::Approx, start)
}
