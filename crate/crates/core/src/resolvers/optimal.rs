use std::time::Instant;

use super::confluent::ConfluentSearch;
use super::greedy::greedy_on_active;
use super::splittable::{distinct_options, optimal_ratio};
use super::{finish, Mechanism, ResolutionResult};
use crate::error::Result;
use crate::graph::{compute_weights, restrict_to_active, DelegationAssignment, NominationGraph};

/// Minimise the maximum voter weight exactly.
///
/// Caps are tried upwards from the rounded-up splittable optimum. For each
/// cap a rounding dive looks for a delegation first, and an exhaustive
/// branch-and-bound over the splitting delegators settles the cap when the
/// dive fails. The generalized greedy delegation is the incumbent: once the
/// cap reaches its value it is optimal.
pub fn resolve_optimal(g: &NominationGraph) -> Result<ResolutionResult> {
    let start = Instant::now();
    let active = restrict_to_active(g);
    let h = &active.graph;
    if h.delegators().next().is_none() {
        return finish(g, &active, &DelegationAssignment::unused(h.len()), Mechanism::Optimal, start);
    }
    let incumbent = greedy_on_active(h);
    let upper = compute_weights(h, &incumbent)?.max_weight;
    let ((p, q), _) = optimal_ratio(h, &distinct_options(h));
    let mut search = ConfluentSearch::new(h);
    let mut cap = p.div_ceil(q);
    let best = loop {
        if cap >= upper {
            break incumbent;
        }
        if let Some(a) = search.dive(cap).or_else(|| search.exhaustive(cap)) {
            break a;
        }
        cap += 1;
    };
    finish(g, &active, &best, Mechanism::Optimal, start)
}
