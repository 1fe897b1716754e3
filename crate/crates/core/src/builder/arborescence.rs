//! Minimum cost arborescence (Chu-Liu/Edmonds) rooted at the virtual row.
//!
//! Contraction-based formulation with one mergeable heap of incoming edges per
//! (super)vertex and a union-find with rollback to expand contracted cycles
//! at the end, giving O(E log V).
//!
//! Vertex 0 is the virtual row; row `x` is vertex `x + 1`. Edges are solved
//! under the key `weight * K + source vertex` with `K` larger than any sum of
//! source vertices, so among minimum-weight arborescences the one with the
//! smallest sum of source vertices wins. Equal-weight choices thus favour the
//! virtual row and then smaller source rows.

use crate::builder::{CandidateEdge, CompressionChain};
use crate::error::{Error, Result};

const NIL: u32 = u32::MAX;

/// Finds a minimum-weight spanning arborescence of the candidate graph over
/// `m` rows.
///
/// Every row needs its virtual edge in `edges`; a missing one is reported as
/// an internal error. Any row whose chosen edge is no cheaper than its
/// virtual edge is attached to the root instead, which keeps the total weight
/// and makes the choice between equal-weight options explicit.
pub fn find_min_arborescence(edges: &[CandidateEdge], m: usize) -> Result<CompressionChain> {
    if m == 0 {
        return Ok(CompressionChain::star(0));
    }
    let n = m + 1;
    let mut virtual_weight: Vec<Option<u32>> = vec![None; m];
    let mut heaps = LeftistHeaps::with_capacity(edges.len());
    let mut heap = vec![NIL; n];
    let scale = (m as i128) * (n as i128) + 1;

    for (idx, e) in edges.iter().enumerate() {
        let dst = e.dst as usize;
        let src = e.src.map_or(0, |s| s as usize + 1);
        if dst >= m || src > m || src == dst + 1 {
            return Err(Error::Internal(format!(
                "candidate edge {idx} ({:?} -> {}) is not an edge between distinct rows of {m}",
                e.src, e.dst
            )));
        }
        if e.src.is_none() {
            virtual_weight[dst] = Some(e.weight);
        }
        let node = heaps.push(
            e.weight as i128 * scale + src as i128,
            src as u32,
            dst as u32 + 1,
            idx as u32,
        );
        heap[dst + 1] = heaps.merge(heap[dst + 1], node);
    }
    if let Some(x) = virtual_weight.iter().position(Option::is_none) {
        return Err(Error::Internal(format!("row {x} has no virtual edge")));
    }

    let mut uf = RollbackUnionFind::new(n);
    let mut seen = vec![usize::MAX; n];
    seen[0] = 0;
    let mut chosen = vec![NIL; n];
    let mut queue: Vec<u32> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut cycles: Vec<(usize, usize, Vec<u32>)> = Vec::new();

    for start in 0..n {
        let mut u = start;
        queue.clear();
        path.clear();
        while seen[u] == usize::MAX {
            let top = heap[u];
            if top == NIL {
                return Err(Error::Internal(format!(
                    "vertex {u} is unreachable from the virtual row"
                )));
            }
            let w = heaps.top_weight(top);
            heaps.add_lazy(top, -w);
            heap[u] = heaps.pop(top);
            queue.push(top);
            path.push(u);
            seen[u] = start;
            u = uf.find(heaps.nodes[top as usize].src as usize);
            if seen[u] == start {
                // Contract the cycle closed by this edge into one vertex.
                let end = queue.len();
                let time = uf.time();
                let mut cycle_heap = NIL;
                let mut qi = end;
                loop {
                    qi -= 1;
                    let w = path[qi];
                    cycle_heap = heaps.merge(cycle_heap, heap[w]);
                    if !uf.join(u, w) {
                        break;
                    }
                }
                u = uf.find(u);
                heap[u] = cycle_heap;
                seen[u] = usize::MAX;
                cycles.push((u, time, queue[qi..end].to_vec()));
                queue.truncate(qi);
                path.truncate(qi);
            }
        }
        for &e in &queue {
            let dst = heaps.nodes[e as usize].dst as usize;
            chosen[uf.find(dst)] = e;
        }
    }

    // Expand contracted cycles, innermost last.
    for (u, time, members) in cycles.iter().rev() {
        uf.rollback(*time);
        let entering = chosen[*u];
        for &e in members {
            let dst = heaps.nodes[e as usize].dst as usize;
            chosen[uf.find(dst)] = e;
        }
        let dst = heaps.nodes[entering as usize].dst as usize;
        chosen[uf.find(dst)] = entering;
    }

    let mut parent = Vec::with_capacity(m);
    for x in 0..m {
        let node = chosen[x + 1];
        if node == NIL {
            return Err(Error::Internal(format!("row {x} received no incoming edge")));
        }
        let e = &edges[heaps.nodes[node as usize].edge as usize];
        debug_assert_eq!(e.dst as usize, x);
        let keep = match e.src {
            Some(_) => e.weight < virtual_weight[x].unwrap_or(0),
            None => false,
        };
        parent.push(if keep { e.src } else { None });
    }
    CompressionChain::from_parents(parent)
}

struct HeapNode {
    weight: i128,
    src: u32,
    dst: u32,
    edge: u32,
    lazy: i128,
    left: u32,
    right: u32,
    rank: u32,
}

/// Arena of leftist heaps with lazy additive weight updates.
struct LeftistHeaps {
    nodes: Vec<HeapNode>,
}

impl LeftistHeaps {
    fn with_capacity(n: usize) -> Self {
        Self {
            nodes: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, weight: i128, src: u32, dst: u32, edge: u32) -> u32 {
        self.nodes.push(HeapNode {
            weight,
            src,
            dst,
            edge,
            lazy: 0,
            left: NIL,
            right: NIL,
            rank: 1,
        });
        (self.nodes.len() - 1) as u32
    }

    fn rank(&self, h: u32) -> u32 {
        if h == NIL {
            0
        } else {
            self.nodes[h as usize].rank
        }
    }

    fn push_down(&mut self, h: u32) {
        let node = &mut self.nodes[h as usize];
        let lazy = std::mem::take(&mut node.lazy);
        if lazy == 0 {
            return;
        }
        node.weight += lazy;
        let (l, r) = (node.left, node.right);
        for c in [l, r] {
            if c != NIL {
                self.nodes[c as usize].lazy += lazy;
            }
        }
    }

    fn key(&self, h: u32) -> (i128, u32) {
        let n = &self.nodes[h as usize];
        (n.weight, n.src)
    }

    fn add_lazy(&mut self, h: u32, delta: i128) {
        self.nodes[h as usize].lazy += delta;
    }

    fn top_weight(&mut self, h: u32) -> i128 {
        self.push_down(h);
        self.nodes[h as usize].weight
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        self.push_down(a);
        self.push_down(b);
        let (a, b) = if self.key(b) < self.key(a) { (b, a) } else { (a, b) };
        let right = self.nodes[a as usize].right;
        let merged = self.merge(right, b);
        self.nodes[a as usize].right = merged;
        let left = self.nodes[a as usize].left;
        if self.rank(left) < self.rank(merged) {
            let node = &mut self.nodes[a as usize];
            node.left = merged;
            node.right = left;
        }
        let right = self.nodes[a as usize].right;
        self.nodes[a as usize].rank = self.rank(right) + 1;
        a
    }

    fn pop(&mut self, h: u32) -> u32 {
        self.push_down(h);
        let (l, r) = (self.nodes[h as usize].left, self.nodes[h as usize].right);
        self.merge(l, r)
    }
}

/// Union by size without path compression, so unions can be undone.
struct RollbackUnionFind {
    // Negative size for roots, parent index otherwise.
    link: Vec<i64>,
    history: Vec<(usize, i64)>,
}

impl RollbackUnionFind {
    fn new(n: usize) -> Self {
        Self {
            link: vec![-1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.link[x] >= 0 {
            x = self.link[x] as usize;
        }
        x
    }

    fn time(&self) -> usize {
        self.history.len()
    }

    fn rollback(&mut self, t: usize) {
        while self.history.len() > t {
            let (i, v) = self.history.pop().expect("non-empty history");
            self.link[i] = v;
        }
    }

    fn join(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.link[a] > self.link[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.history.push((a, self.link[a]));
        self.history.push((b, self.link[b]));
        self.link[a] += self.link[b];
        self.link[b] = a as i64;
        true
    }
}
