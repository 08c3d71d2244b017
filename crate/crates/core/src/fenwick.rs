/// Prefix sums over non-negative weights with point updates, used to draw an
/// index with probability proportional to its weight.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
    len: usize,
}

impl Fenwick {
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            tree: vec![0.0; capacity + 1],
            len: 0,
        }
    }

    /// Append a new slot holding `weight`.
    pub fn push(&mut self, weight: f64) {
        if self.len + 1 >= self.tree.len() {
            self.grow();
        }
        self.len += 1;
        self.add(self.len - 1, weight);
    }

    fn grow(&mut self) {
        let values: Vec<f64> = (0..self.len).map(|i| self.get(i)).collect();
        self.tree = vec![0.0; 2 * self.tree.len().max(1) + 1];
        let len = self.len;
        self.len = 0;
        for v in values.into_iter().take(len) {
            self.len += 1;
            self.add(self.len - 1, v);
        }
    }

    pub fn add(&mut self, index: usize, delta: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of slots `0..end`.
    pub fn prefix(&self, end: usize) -> f64 {
        let mut i = end;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    pub fn get(&self, index: usize) -> f64 {
        self.prefix(index + 1) - self.prefix(index)
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.len)
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`, for
    /// `target` in `[0, total)`. Clamped to the last slot against rounding.
    pub fn find(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && next <= self.len && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos.min(self.len - 1)
    }
}
