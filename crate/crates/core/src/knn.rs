//! Exact k-nearest-neighbour search over delay vectors.
//!
//! Candidates are ranked by `(squared distance, time index)` so that ties at
//! the k-th distance always resolve toward the earlier sample. A kd-tree is
//! used above a small size threshold; the ranking is identical either way.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;
const BRUTE_FORCE_BELOW: usize = 64;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub d2: f64,
    pub time: usize,
    pub row: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.time.cmp(&other.time))
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

enum Node {
    Leaf { start: usize, end: usize },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

/// Index over the rows of a row-major point matrix.
pub(crate) struct NeighborIndex<'a> {
    points: &'a [f64],
    times: &'a [usize],
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> NeighborIndex<'a> {
    pub fn build(points: &'a [f64], times: &'a [usize], dim: usize) -> Self {
        let n = times.len();
        let mut index = Self {
            points,
            times,
            dim,
            order: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n >= BRUTE_FORCE_BELOW {
            index.build_node(0, n);
        }
        index
    }

    fn coord(&self, row: usize, d: usize) -> f64 {
        self.points[row * self.dim + d]
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // split on the axis of largest spread
        let mut best = (0, f64::NEG_INFINITY);
        for d in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &r in &self.order[start..end] {
                let v = self.coord(r, d);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > best.1 {
                best = (d, hi - lo);
            }
        }
        let dim = best.0;
        if best.1 <= 0.0 {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let (points, stride) = (self.points, self.dim);
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a * stride + dim].total_cmp(&points[b * stride + dim])
        });
        let value = self.coord(self.order[mid], dim);
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split { dim, value, left, right };
        id
    }

    /// The `k` best admissible rows for `query`, ascending. `admissible`
    /// receives a row's time index.
    pub fn nearest<F>(&self, query: &[f64], k: usize, admissible: F) -> Vec<Candidate>
    where
        F: Fn(usize) -> bool,
    {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if self.nodes.is_empty() {
            for row in 0..self.times.len() {
                self.offer(&mut heap, query, row, k, &admissible);
            }
        } else {
            self.search(0, query, k, &admissible, &mut heap);
        }
        heap.into_sorted_vec()
    }

    #[inline]
    fn offer<F: Fn(usize) -> bool>(
        &self,
        heap: &mut BinaryHeap<Candidate>,
        query: &[f64],
        row: usize,
        k: usize,
        admissible: &F,
    ) {
        let time = self.times[row];
        if !admissible(time) {
            return;
        }
        let d2 = squared_distance(query, &self.points[row * self.dim..(row + 1) * self.dim]);
        let cand = Candidate { d2, time, row };
        if heap.len() < k {
            heap.push(cand);
        } else if let Some(worst) = heap.peek() {
            if cand < *worst {
                heap.pop();
                heap.push(cand);
            }
        }
    }

    fn search<F: Fn(usize) -> bool>(
        &self,
        node: usize,
        query: &[f64],
        k: usize,
        admissible: &F,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &row in &self.order[start..end] {
                    self.offer(heap, query, row, k, admissible);
                }
            }
            Node::Split { dim, value, left, right } => {
                let diff = query[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, k, admissible, heap);
                // `<=` keeps equal-distance candidates reachable for the
                // time-index tie break.
                let plane = diff * diff;
                let visit = heap.len() < k || heap.peek().is_some_and(|w| plane <= w.d2);
                if visit {
                    self.search(far, query, k, admissible, heap);
                }
            }
        }
    }
}
