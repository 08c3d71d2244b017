use std::time::Instant;

use super::splittable::distinct_options;
use super::{finish, Mechanism, ResolutionResult};
use crate::error::{Error, Result};
use crate::graph::{compute_weights, restrict_to_active, DelegationAssignment, NominationGraph};

/// Largest number of delegations the brute force oracle will enumerate.
pub const BRUTE_FORCE_BUDGET: u128 = 1 << 20;

/// Enumerate every delegation of the active subgraph and keep the first one
/// with the smallest maximum weight. Parallel nominations count once.
pub fn resolve_brute_force(g: &NominationGraph) -> Result<ResolutionResult> {
    let start = Instant::now();
    let active = restrict_to_active(g);
    let h = &active.graph;
    let options = distinct_options(h);
    let delegators: Vec<_> = h.delegators().collect();
    let combinations = delegators
        .iter()
        .map(|&a| options[a].len() as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX);
    if combinations > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded {
            delegators: delegators.len(),
            combinations,
        });
    }

    let mut digits = vec![0usize; delegators.len()];
    let mut current = DelegationAssignment::unused(h.len());
    let mut best: Option<(u64, DelegationAssignment)> = None;
    loop {
        for (j, &a) in delegators.iter().enumerate() {
            current.set(a, Some(options[a][digits[j]].1));
        }
        // Choices that close a cycle are not delegations.
        if let Ok(report) = compute_weights(h, &current) {
            if best.as_ref().is_none_or(|(w, _)| report.max_weight < *w) {
                best = Some((report.max_weight, current.clone()));
            }
        }
        let mut j = 0;
        while j < digits.len() {
            digits[j] += 1;
            if digits[j] < options[delegators[j]].len() {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
        if j == digits.len() {
            break;
        }
    }
    let (_, sub) = best.expect("an active graph has at least one delegation");
    finish(g, &active, &sub, Mechanism::BruteForce, start)
}
