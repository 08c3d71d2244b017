use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{finish, Mechanism, ResolutionResult};
use crate::error::Result;
use crate::graph::{restrict_to_active, shortest_path_assignment, AgentId, DelegationAssignment, NominationGraph};

/// Resampling rounds for delegators caught in cycles before they fall back
/// to shortest path choices.
const MAX_RESAMPLES: usize = 100;

/// Agents whose chosen delegations never reach a voter.
fn stuck(h: &NominationGraph, a: &DelegationAssignment) -> Vec<AgentId> {
    const UNKNOWN: u8 = 0;
    const VISITING: u8 = 1;
    const REACHES: u8 = 2;
    const STUCK: u8 = 3;
    let mut state: Vec<u8> = (0..h.len())
        .map(|x| if h.is_voter(x) { REACHES } else { UNKNOWN })
        .collect();
    let mut path = Vec::new();
    for start in 0..h.len() {
        let mut x = start;
        let verdict = loop {
            match state[x] {
                REACHES | STUCK => break state[x],
                VISITING => break STUCK,
                _ => {}
            }
            state[x] = VISITING;
            path.push(x);
            x = a.target(h, x).expect("every active delegator has a choice");
        };
        for y in path.drain(..) {
            state[y] = verdict;
        }
    }
    (0..h.len()).filter(|&x| state[x] == STUCK).collect()
}

/// Every delegator picks one of its nominations uniformly at random.
///
/// Random picks can only get stuck on cyclic graphs; the stuck delegators
/// are resampled up to a fixed number of times and then follow shortest
/// paths.
pub fn resolve_random(g: &NominationGraph, seed: u64) -> Result<ResolutionResult> {
    let start = Instant::now();
    let active = restrict_to_active(g);
    let h = &active.graph;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sub = DelegationAssignment::unused(h.len());
    for a in h.delegators() {
        sub.set(a, Some(rng.gen_range(0..h.nominations(a).len())));
    }
    let mut bad = stuck(h, &sub);
    for _ in 0..MAX_RESAMPLES {
        if bad.is_empty() {
            break;
        }
        for &a in &bad {
            sub.set(a, Some(rng.gen_range(0..h.nominations(a).len())));
        }
        bad = stuck(h, &sub);
    }
    if !bad.is_empty() {
        let shortest = shortest_path_assignment(h);
        for a in bad {
            sub.set(a, shortest.choice(a));
        }
    }
    finish(g, &active, &sub, Mechanism::Random, start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{active_nodes, fixtures};

    #[test]
    fn single_options_are_forced() {
        let g = fixtures::intro_example();
        let r = resolve_random(&g, 5).unwrap();
        assert_eq!(r.assignment, shortest_path_assignment(&g));
    }

    #[test]
    fn duplicate_pair_always_hits_the_same_agent() {
        let g = NominationGraph::from_lists(vec![None, None, Some(vec![1, 1])]).unwrap();
        for seed in 0..20 {
            let r = resolve_random(&g, seed).unwrap();
            assert_eq!(r.assignment.target(&g, 2), Some(1));
        }
    }

    #[test]
    fn deterministic_and_uses_both_options() {
        let g = fixtures::diamond_one();
        assert_eq!(
            resolve_random(&g, 9).unwrap().assignment,
            resolve_random(&g, 9).unwrap().assignment
        );
        let picks: std::collections::HashSet<_> =
            (0..50).map(|s| resolve_random(&g, s).unwrap().assignment.choice(2)).collect();
        assert_eq!(picks.len(), 2);
    }

    #[test]
    fn cycles_are_escaped() {
        // A ring of delegators where only agent 1 can leave towards voter 0.
        let g = NominationGraph::from_lists(vec![
            None,
            Some(vec![2, 0]),
            Some(vec![3]),
            Some(vec![4]),
            Some(vec![1]),
        ])
        .unwrap();
        for seed in 0..20 {
            let r = resolve_random(&g, seed).unwrap();
            assert_eq!(r.report.utilized_votes as usize, active_nodes(&g).len());
            assert_eq!(r.max_weight(), 5);
        }
    }
}
