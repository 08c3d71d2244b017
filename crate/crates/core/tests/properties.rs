use liquid_core::generator::{generate, identical_pair_fraction, ArrivalTrace, GeneratorParams};
use liquid_core::graph::{
    active_nodes, compute_weights, delegation_to_flow, flow_to_delegation, restrict_to_active, DelegationAssignment,
    NominationGraph,
};
use liquid_core::resolvers::{
    resolve_approx, resolve_brute_force, resolve_greedy_generalized, resolve_optimal, resolve_random,
    resolve_shortest, resolve_splittable,
};
use proptest::prelude::*;

/// Arbitrary graphs, cycles and dead ends included. Each agent is a voter
/// with probability 1/4; delegators name one to three agents, duplicates
/// allowed.
fn any_graph(max_n: usize) -> impl Strategy<Value = NominationGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let agent = (any::<u8>(), prop::collection::vec(0..n, 1..=3));
        prop::collection::vec(agent, n).prop_map(move |specs| {
            let lists = specs
                .into_iter()
                .enumerate()
                .map(|(i, (coin, targets))| {
                    let targets: Vec<usize> = targets.into_iter().filter(|&t| t != i).collect();
                    (coin % 4 != 0 && !targets.is_empty()).then_some(targets)
                })
                .collect();
            NominationGraph::from_lists(lists).unwrap()
        })
    })
}

fn generated_graph() -> impl Strategy<Value = NominationGraph> {
    (1usize..=3, 0u8..=2, any::<u64>(), 1usize..=60).prop_map(|(k, gamma, seed, t)| {
        generate(&GeneratorParams::new(0.5, k, f64::from(gamma), seed), t).unwrap().0
    })
}

/// Weight of every agent by walking each agent's delegation chain.
fn walk_weights(g: &NominationGraph, a: &DelegationAssignment) -> Vec<u64> {
    let mut w = vec![0u64; g.len()];
    for start in 0..g.len() {
        if !g.is_voter(start) && a.choice(start).is_none() {
            continue;
        }
        let mut x = start;
        loop {
            w[x] += 1;
            match a.target(g, x) {
                Some(t) => x = t,
                None => break,
            }
        }
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn resolutions_use_every_active_agent(g in any_graph(14), seed in any::<u64>()) {
        let active = active_nodes(&g).len() as u64;
        for r in [
            resolve_optimal(&g).unwrap(),
            resolve_approx(&g).unwrap(),
            resolve_greedy_generalized(&g).unwrap(),
            resolve_random(&g, seed).unwrap(),
            resolve_shortest(&g).unwrap(),
        ] {
            prop_assert_eq!(r.report.utilized_votes, active);
            prop_assert_eq!(r.report.voter_weights().sum::<u64>(), active);
            let voters = g.voter_count() as u64;
            if voters > 0 {
                prop_assert!(r.max_weight() >= active.div_ceil(voters));
            }
            prop_assert_eq!(compute_weights(&g, &r.assignment).unwrap(), r.report.clone());
            prop_assert_eq!(walk_weights(&g, &r.assignment), r.report.weight.clone());
        }
    }

    #[test]
    fn optimal_matches_brute_force(g in any_graph(11)) {
        let opt = resolve_optimal(&g).unwrap();
        let brute = resolve_brute_force(&g).unwrap();
        prop_assert_eq!(opt.max_weight(), brute.max_weight());
    }

    #[test]
    fn mechanisms_are_ordered(g in any_graph(16), seed in any::<u64>()) {
        let split = resolve_splittable(&g);
        let opt = resolve_optimal(&g).unwrap().max_weight();
        let approx = resolve_approx(&g).unwrap().max_weight();
        prop_assert!(split.max_congestion <= opt as f64 + 1e-9);
        prop_assert!(split.ceil() <= opt);
        prop_assert!(opt <= approx);
        prop_assert!(opt <= resolve_greedy_generalized(&g).unwrap().max_weight());
        prop_assert!(opt <= resolve_random(&g, seed).unwrap().max_weight());
        prop_assert!(opt <= resolve_shortest(&g).unwrap().max_weight());
        let active = active_nodes(&g).len() as f64;
        let bound = (1.0 + (g.voter_count().max(1) as f64).ln()) * opt as f64;
        prop_assert!(approx as f64 <= bound || active == 0.0);
    }

    #[test]
    fn optimal_is_invariant_under_relabelling(g in any_graph(12), shift in 0usize..12) {
        let n = g.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(resolve_optimal(&g).unwrap().max_weight(), resolve_optimal(&h).unwrap().max_weight());
        prop_assert_eq!(resolve_splittable(&g).ratio, resolve_splittable(&h).ratio);
    }

    #[test]
    fn restricting_twice_changes_nothing(g in any_graph(14)) {
        let once = restrict_to_active(&g);
        let twice = restrict_to_active(&once.graph);
        prop_assert_eq!(&twice.graph, &once.graph);
        prop_assert_eq!(twice.to_original, (0..once.graph.len()).collect::<Vec<_>>());
    }

    #[test]
    fn flow_round_trip(g in any_graph(14)) {
        // Flows are defined on fully active graphs.
        let h = restrict_to_active(&g).graph;
        let a = resolve_greedy_generalized(&h).unwrap().assignment;
        let f = delegation_to_flow(&h, &a).unwrap();
        prop_assert_eq!(flow_to_delegation(&h, &f).unwrap(), a);
    }

    #[test]
    fn json_round_trip(g in any_graph(14)) {
        prop_assert_eq!(NominationGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn generated_graphs_are_acyclic_and_active(g in generated_graph()) {
        prop_assert_eq!(active_nodes(&g).len(), g.len());
        for a in g.delegators() {
            prop_assert!(g.nominations(a).iter().all(|&t| t < a));
        }
        let f = identical_pair_fraction(&g);
        prop_assert!(f.map_or(true, |x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn trace_text_round_trip(k in 1usize..=3, seed in any::<u64>(), t in 1usize..80) {
        let (g, trace) = generate(&GeneratorParams::new(0.5, k, 1.0, seed), t).unwrap();
        let parsed: ArrivalTrace = trace.to_text().parse().unwrap();
        prop_assert_eq!(&parsed, &trace);
        prop_assert_eq!(parsed.to_graph().unwrap(), g);
    }

    #[test]
    fn prefixes_resolve_to_nondecreasing_optimum(g in generated_graph()) {
        let mut prev = 0;
        for t in 1..=g.len() {
            let w = resolve_optimal(&g.prefix(t).unwrap()).unwrap().max_weight();
            prop_assert!(w >= prev);
            prev = w;
        }
    }
}
