//! Dinic's maximum flow on integer capacities, with an undo trail so a
//! search can modify the network and roll back.

use std::collections::{HashSet, VecDeque};

#[derive(Debug, Clone)]
pub(crate) struct MaxFlow {
    to: Vec<usize>,
    /// Residual capacity; edge `e ^ 1` is the reverse of edge `e`.
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    seen: Vec<u32>,
    stamp: u32,
    trail: Vec<(usize, i64)>,
    logging: bool,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        Self {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
            seen: vec![0; n],
            stamp: 0,
            trail: Vec::new(),
            logging: false,
        }
    }

    /// Add an edge and return its id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.to.len();
        self.to.extend([to, from]);
        self.cap.extend([cap, 0]);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently pushed through edge `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.cap[id ^ 1]
    }

    /// Whether edge `e` has not been closed.
    pub fn is_open(&self, e: usize) -> bool {
        self.cap[e] + self.cap[e ^ 1] > 0
    }

    fn set(&mut self, e: usize, value: i64) {
        if self.logging {
            self.trail.push((e, self.cap[e]));
        }
        self.cap[e] = value;
    }

    fn shift(&mut self, e: usize, amount: i64) {
        self.set(e, self.cap[e] - amount);
        self.set(e ^ 1, self.cap[e ^ 1] + amount);
    }

    /// Start recording changes and return a point to roll back to.
    pub fn mark(&mut self) -> usize {
        self.logging = true;
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (e, old) = self.trail.pop().unwrap();
            self.cap[e] = old;
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let to = self.to[e];
                if self.cap[e] > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, s: usize, t: usize) -> i64 {
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let push = path.iter().map(|&e| self.cap[e]).min().unwrap();
                for &e in &path {
                    self.shift(e, push);
                }
                return push;
            }
            let mut advanced = false;
            while self.iter[v] < self.adj[v].len() {
                let e = self.adj[v][self.iter[v]];
                let to = self.to[e];
                if self.cap[e] > 0 && self.level[to] == self.level[v] + 1 {
                    path.push(e);
                    v = to;
                    advanced = true;
                    break;
                }
                self.iter[v] += 1;
            }
            if !advanced {
                if v == s {
                    return 0;
                }
                self.level[v] = -1;
                let e = path.pop().unwrap();
                v = self.to[e ^ 1];
                self.iter[v] += 1;
            }
        }
    }

    /// Push as much additional flow from `s` to `t` as possible and return
    /// the amount.
    pub fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// A simple path of flow-carrying edges from `from` to the first node
    /// satisfying `goal`, walking along edges or, with `backward`, against
    /// them. Returns the forward edge ids in walking order and the end node.
    fn flow_path(
        &mut self,
        from: usize,
        goal: impl Fn(usize) -> bool,
        backward: bool,
    ) -> (Vec<usize>, usize) {
        self.stamp += 1;
        let stamp = self.stamp;
        self.seen[from] = stamp;
        let mut path = Vec::new();
        let mut cursor = vec![0usize];
        let mut v = from;
        while !goal(v) {
            let i = cursor.last_mut().unwrap();
            let Some(&e) = self.adj[v].get(*i) else {
                cursor.pop();
                let back = path.pop().expect("conserved flow reaches the goal");
                v = if backward { self.to[back] } else { self.to[back ^ 1] };
                continue;
            };
            *i += 1;
            let forward_edge = if backward { e ^ 1 } else { e };
            if e % 2 != usize::from(backward) || self.cap[forward_edge ^ 1] <= 0 {
                continue;
            }
            let next = self.to[e];
            if self.seen[next] == stamp {
                continue;
            }
            self.seen[next] = stamp;
            path.push(forward_edge);
            cursor.push(0);
            v = next;
        }
        (path, v)
    }

    /// Cancel all flow through edge `e` and close it. Flow on `s`-`t` paths
    /// is removed; flow on cycles through `e` is cancelled. Returns the
    /// reduction of the `s`-`t` flow value.
    pub fn close_edge(&mut self, e: usize, s: usize, t: usize) -> i64 {
        let (tail, head) = (self.to[e ^ 1], self.to[e]);
        let mut removed = 0;
        while self.flow(e) > 0 {
            let (down, end) = self.flow_path(head, |v| v == t || v == tail, false);
            let (edges, through_sink) = if end == tail {
                (down, false)
            } else {
                let on_down: HashSet<usize> = std::iter::once(head)
                    .chain(down.iter().map(|&x| self.to[x]))
                    .collect();
                let (up, top) = self.flow_path(tail, |v| v == s || on_down.contains(&v), true);
                if top == s {
                    (down.into_iter().chain(up).collect(), true)
                } else {
                    // `top` lies on the way down: a cycle through `e`.
                    let keep = down.iter().position(|&x| self.to[x] == top).map_or(0, |p| p + 1);
                    (down[..keep].iter().copied().chain(up).collect(), false)
                }
            };
            let amount = edges.iter().map(|&x| self.flow(x)).fold(self.flow(e), i64::min);
            for &x in edges.iter().chain([&e]) {
                self.shift(x, -amount);
            }
            if through_sink {
                removed += amount;
            }
        }
        self.set(e, 0);
        removed
    }

    /// Nodes reachable from `s` in the residual graph.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in &self.adj[v] {
                let to = self.to[e];
                if self.cap[e] > 0 && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }
}
