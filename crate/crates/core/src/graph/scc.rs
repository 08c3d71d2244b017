use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{AgentId, NominationGraph};

/// Tarjan's algorithm, iterative so deep delegation chains cannot overflow
/// the stack. Returns the component index of every agent and the number of
/// components.
fn tarjan(g: &NominationGraph) -> (Vec<usize>, usize) {
    const UNVISITED: usize = usize::MAX;
    let n = g.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut call: Vec<(AgentId, usize)> = Vec::new();
    let mut next_index = 0;
    let mut n_comp = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNVISITED {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let targets = g.nominations(v);
            if *edge < targets.len() {
                let w = targets[*edge];
                *edge += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == v {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    (comp, n_comp)
}

/// Strongly connected components, ordered so that every nomination leaving
/// a component points into an earlier one. Components with voters come
/// first. Among components that are ready at the same time, the one with
/// the smallest agent id goes first, so on graphs whose edges all point to
/// lower ids this is plain id order. Members of each component are sorted.
pub fn scc_reverse_topological(g: &NominationGraph) -> Vec<Vec<AgentId>> {
    let (comp, n_comp) = tarjan(g);
    let mut members = vec![Vec::new(); n_comp];
    for a in 0..g.len() {
        members[comp[a]].push(a);
    }

    // Count outgoing condensation edges; a component is ready once all of
    // its successors are placed.
    let mut waiting = vec![0usize; n_comp];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for a in 0..g.len() {
        for &t in g.nominations(a) {
            if comp[a] != comp[t] {
                waiting[comp[a]] += 1;
                preds[comp[t]].push(comp[a]);
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(AgentId, usize)>> = (0..n_comp)
        .filter(|&c| waiting[c] == 0)
        .map(|c| Reverse((members[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(n_comp);
    while let Some(Reverse((_, c))) = ready.pop() {
        order.push(c);
        for &p in &preds[c] {
            waiting[p] -= 1;
            if waiting[p] == 0 {
                ready.push(Reverse((members[p][0], p)));
            }
        }
    }
    debug_assert_eq!(order.len(), n_comp);
    order.into_iter().map(|c| std::mem::take(&mut members[c])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    fn check_order(g: &NominationGraph, sccs: &[Vec<AgentId>]) {
        let mut pos = vec![usize::MAX; g.len()];
        for (i, c) in sccs.iter().enumerate() {
            for &a in c {
                pos[a] = i;
            }
        }
        assert!(pos.iter().all(|&p| p != usize::MAX));
        for a in 0..g.len() {
            for &t in g.nominations(a) {
                assert!(pos[t] <= pos[a]);
            }
        }
    }

    #[test]
    fn dag_gives_singletons_in_id_order() {
        let g = NominationGraph::from_lists(vec![None, Some(vec![0]), Some(vec![1, 0]), None])
            .unwrap();
        let sccs = scc_reverse_topological(&g);
        assert_eq!(sccs, vec![vec![0], vec![1], vec![2], vec![3]]);
        check_order(&g, &sccs);
    }

    #[test]
    fn cycle_pair_after_voter() {
        let sccs = scc_reverse_topological(&fixtures::dead_pair());
        assert_eq!(sccs, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn single_agent() {
        let g = NominationGraph::from_lists(vec![None]).unwrap();
        assert_eq!(scc_reverse_topological(&g), vec![vec![0]]);
    }

    #[test]
    fn cycle_pointing_at_later_voter() {
        // 0 <-> 1, 1 -> 3 (voter), 2 -> 0
        let g = NominationGraph::from_lists(vec![Some(vec![1]), Some(vec![0, 3]), Some(vec![0]), None])
            .unwrap();
        let sccs = scc_reverse_topological(&g);
        assert_eq!(sccs, vec![vec![3], vec![0, 1], vec![2]]);
        check_order(&g, &sccs);
    }

    #[test]
    fn long_chain_does_not_overflow() {
        let n = 200_000;
        let lists = (0..n).map(|a| (a > 0).then(|| vec![a - 1])).collect();
        let g = NominationGraph::from_lists(lists).unwrap();
        assert_eq!(scc_reverse_topological(&g).len(), n);
    }
}
