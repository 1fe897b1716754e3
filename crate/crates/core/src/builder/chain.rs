use crate::error::{Error, Result};
use crate::matrix::{hamming_distance, CsrBinaryMatrix};

/// Spanning arborescence over the rows, rooted at the virtual all-zero row.
///
/// `topo_order` is the DFS preorder with children visited in ascending row
/// index, so every root subtree occupies one contiguous segment of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionChain {
    parent: Vec<Option<u32>>,
    topo_order: Vec<u32>,
    root_children: Vec<u32>,
    // root_offsets[i]..root_offsets[i + 1] is the segment of topo_order
    // holding the subtree of root_children[i].
    root_offsets: Vec<usize>,
}

impl CompressionChain {
    /// Builds the chain from a parent array (`None` = virtual root).
    ///
    /// Fails if a parent is out of range or the relation has a cycle.
    pub fn from_parents(parent: Vec<Option<u32>>) -> Result<Self> {
        let m = parent.len();
        let mut child_ptr = vec![0usize; m + 2];
        for (x, p) in parent.iter().enumerate() {
            let slot = match *p {
                None => 0,
                Some(p) if (p as usize) < m && p as usize != x => p as usize + 1,
                Some(p) => {
                    return Err(Error::InvalidMatrix(format!(
                        "row {x} has invalid parent {p} (rows: {m})"
                    )))
                }
            };
            child_ptr[slot + 1] += 1;
        }
        for i in 0..=m {
            child_ptr[i + 1] += child_ptr[i];
        }
        // Slot 0 lists the children of the virtual root, slot p + 1 those of
        // row p; ascending x keeps each list sorted.
        let mut next = child_ptr.clone();
        let mut children = vec![0u32; m];
        for (x, p) in parent.iter().enumerate() {
            let slot = p.map_or(0, |p| p as usize + 1);
            children[next[slot]] = x as u32;
            next[slot] += 1;
        }
        let kids = |slot: usize| &children[child_ptr[slot]..child_ptr[slot + 1]];

        let root_children = kids(0).to_vec();
        let mut topo_order = Vec::with_capacity(m);
        let mut root_offsets = Vec::with_capacity(root_children.len() + 1);
        let mut stack = Vec::new();
        for &r in &root_children {
            root_offsets.push(topo_order.len());
            stack.push(r);
            while let Some(x) = stack.pop() {
                topo_order.push(x);
                stack.extend(kids(x as usize + 1).iter().rev());
            }
        }
        root_offsets.push(topo_order.len());

        if topo_order.len() != m {
            return Err(Error::InvalidMatrix(format!(
                "parent relation has a cycle: only {} of {m} rows reachable from the root",
                topo_order.len()
            )));
        }
        Ok(Self {
            parent,
            topo_order,
            root_children,
            root_offsets,
        })
    }

    /// Every row attached directly to the root.
    pub fn star(m: usize) -> Self {
        Self::from_parents(vec![None; m]).expect("star is acyclic")
    }

    pub fn n_rows(&self) -> usize {
        self.parent.len()
    }

    pub fn parents(&self) -> &[Option<u32>] {
        &self.parent
    }

    #[inline]
    pub fn parent(&self, x: usize) -> Option<u32> {
        self.parent[x]
    }

    pub fn topo_order(&self) -> &[u32] {
        &self.topo_order
    }

    pub fn root_children(&self) -> &[u32] {
        &self.root_children
    }

    /// Segments of `topo_order`, one per root subtree.
    pub fn root_segments(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.root_offsets.windows(2).map(move |w| &self.topo_order[w[0]..w[1]])
    }

    /// Number of rows compressed against another row.
    pub fn non_virtual_edges(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// Sum of edge weights: Hamming distance to the parent row, or nnz for
    /// root-attached rows.
    pub fn total_weight(&self, a: &CsrBinaryMatrix) -> Result<usize> {
        if a.n_rows() != self.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "chain spans {} rows, matrix has {}",
                self.n_rows(),
                a.n_rows()
            )));
        }
        let mut total = 0;
        for (x, p) in self.parent.iter().enumerate() {
            total += match p {
                None => a.row_nnz(x),
                Some(p) => hamming_distance(a, *p as usize, x)?,
            };
        }
        Ok(total)
    }
}
