//! Unrooted subcubic trees with labeled leaves.
//!
//! A [`TreeLayout`] over `n` leaves assigns leaf vertices `0..n` (one per
//! graph vertex or qubit) and internal vertices `n..`, every internal vertex
//! of degree 3 except at most one of degree 2 (the conventional root seat).
//! Removing any edge splits the leaves in two; those splits are the
//! bipartitions a layout can certify. There are exactly `(2n-5)!!` layouts,
//! produced by inserting each new leaf into every edge of every smaller tree.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::graph::Bipartition;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TreeLayoutJson", into = "TreeLayoutJson")]
pub struct TreeLayout {
    n_leaves: usize,
    edges: Vec<(usize, usize)>,
}

impl TreeLayout {
    pub fn new(n_leaves: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let t = TreeLayout { n_leaves, edges };
        t.validate()?;
        Ok(t)
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| a.max(b) + 1)
            .max()
            .unwrap_or(self.n_leaves)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_leaves;
        if n < 2 {
            return Err(Error::InvalidTree("need at least 2 leaves".into()));
        }
        let v = self.num_vertices();
        if self.edges.len() + 1 != v {
            return Err(Error::InvalidTree("edge count must be vertices - 1".into()));
        }
        let adj = self.adjacency();
        for (a, b) in self.edges.iter().copied() {
            if a == b {
                return Err(Error::InvalidTree(format!("self loop at {a}")));
            }
            if a >= v || b >= v {
                return Err(Error::InvalidTree("vertex id out of range".into()));
            }
        }
        // connected + |E| = |V| - 1 => tree
        let mut seen = vec![false; v];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut cnt = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    cnt += 1;
                    stack.push(y);
                }
            }
        }
        if cnt != v {
            return Err(Error::InvalidTree("not connected".into()));
        }
        let mut deg2 = 0;
        for (x, nb) in adj.iter().enumerate() {
            if x < n {
                if nb.len() != 1 {
                    return Err(Error::InvalidTree(format!(
                        "leaf {x} has degree {}",
                        nb.len()
                    )));
                }
            } else {
                match nb.len() {
                    3 => {}
                    2 => deg2 += 1,
                    d => {
                        return Err(Error::InvalidTree(format!(
                            "internal vertex {x} has degree {d}"
                        )))
                    }
                }
            }
        }
        if deg2 > 1 {
            return Err(Error::InvalidTree(
                "more than one degree-2 internal vertex".into(),
            ));
        }
        Ok(())
    }

    /// Leaf set on the `a`-side of edge `idx`, as a bit mask over leaves.
    pub fn edge_leaf_side(&self, idx: usize) -> BitVec {
        let (a, b) = self.edges[idx];
        let adj = self.adjacency();
        let mut mask = BitVec::zeros(self.n_leaves);
        let mut seen = vec![false; self.num_vertices()];
        seen[a] = true;
        seen[b] = true; // block the far endpoint
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            if x < self.n_leaves {
                mask.set(x, true);
            }
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        mask
    }

    /// One leaf-side mask per edge, in edge order. A leaf edge yields the
    /// singleton cut of that leaf; the two edges at a degree-2 vertex yield
    /// complementary masks of the same bipartition, which is harmless for
    /// the max/min sweeps these feed.
    pub fn edge_cuts(&self) -> Vec<BitVec> {
        (0..self.edges.len())
            .map(|i| self.edge_leaf_side(i))
            .collect()
    }

    pub fn bipartition_of_edge(&self, idx: usize) -> Result<Bipartition> {
        Bipartition::from_mask(self.edge_leaf_side(idx))
    }

    /// Root the layout at its degree-2 internal vertex, inserting one on the
    /// first edge when absent. Children are ordered by the smallest leaf in
    /// their subtree, so traversals are deterministic.
    pub fn rooted(&self) -> RootedTree {
        let mut edges = self.edges.clone();
        let mut v = self.num_vertices();
        let adj = self.adjacency();
        let root = match (self.n_leaves..v).find(|&x| adj[x].len() == 2) {
            Some(r) => r,
            None => {
                let (a, b) = edges[0];
                let r = v;
                v += 1;
                edges[0] = (a, r);
                edges.push((r, b));
                r
            }
        };
        let mut adj = vec![Vec::new(); v];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![usize::MAX; v];
        let mut order = Vec::with_capacity(v);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        // min leaf under each vertex, then sort children by it
        let mut min_leaf = vec![usize::MAX; v];
        for &x in order.iter().rev() {
            if x < self.n_leaves {
                min_leaf[x] = x;
            }
            if x != root {
                let p = parent[x];
                min_leaf[p] = min_leaf[p].min(min_leaf[x]);
            }
        }
        let mut children = vec![Vec::new(); v];
        for x in 0..v {
            if x != root {
                children[parent[x]].push(x);
            }
        }
        for ch in children.iter_mut() {
            ch.sort_by_key(|&c| min_leaf[c]);
        }
        RootedTree {
            n_leaves: self.n_leaves,
            root,
            parent,
            children,
        }
    }
}

impl std::fmt::Debug for TreeLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TreeLayout(leaves={}, edges={:?})", self.n_leaves, self.edges)
    }
}

/// Rooted view of a layout. The root has two children; every other internal
/// vertex has a parent and two children; leaves are `0..n_leaves`.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub n_leaves: usize,
    pub root: usize,
    pub parent: Vec<usize>,
    pub children: Vec<Vec<usize>>,
}

impl RootedTree {
    /// Vertices in post order (children before parents).
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.parent.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded || self.children[x].is_empty() {
                out.push(x);
            } else {
                stack.push((x, true));
                for &c in self.children[x].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Leaves under each vertex as bit masks.
    pub fn subtree_leaves(&self) -> Vec<BitVec> {
        let mut masks = vec![BitVec::zeros(self.n_leaves); self.parent.len()];
        for x in self.post_order() {
            if x < self.n_leaves {
                masks[x].set(x, true);
            } else {
                let combined = self.children[x]
                    .iter()
                    .fold(BitVec::zeros(self.n_leaves), |mut acc, &c| {
                        acc.xor_assign(&masks[c]);
                        acc
                    });
                masks[x] = combined;
            }
        }
        masks
    }
}

/// Number of layouts over `n` leaves: `(2n-5)!!`.
pub fn layout_count(n: usize) -> u128 {
    assert!(n >= 2);
    (3..=n).map(|k| (2 * k - 5) as u128).product()
}

/// Exhaustive stream of every layout over `n` leaves, each exactly once.
///
/// Enumeration inserts leaf `k` into each edge of each tree over `k` leaves;
/// the odometer over insertion choices is replayed per item, so the iterator
/// holds O(n) state.
pub struct TreeLayouts {
    n: usize,
    choices: Vec<usize>,
    done: bool,
}

impl TreeLayouts {
    pub fn new(n: usize, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTree("need at least 2 leaves".into()));
        }
        if n > cap {
            return Err(Error::CapExceeded {
                what: "tree enumeration",
                limit: cap,
                requested: n,
            });
        }
        Ok(TreeLayouts {
            n,
            choices: vec![0; n.saturating_sub(2)],
            done: false,
        })
    }

    fn build(&self) -> TreeLayout {
        let n = self.n;
        let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
        for (i, &choice) in self.choices.iter().enumerate() {
            let leaf = i + 2;
            let internal = n + i;
            let (a, b) = edges[choice];
            edges[choice] = (a, internal);
            edges.push((internal, b));
            edges.push((internal, leaf));
        }
        TreeLayout { n_leaves: n, edges }
    }
}

impl Iterator for TreeLayouts {
    type Item = TreeLayout;

    fn next(&mut self) -> Option<TreeLayout> {
        if self.done {
            return None;
        }
        let t = self.build();
        // odometer: digit i counts edges of the tree with i+2 leaves
        let mut i = self.choices.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            let base = 2 * (i + 2) - 3;
            self.choices[i] += 1;
            if self.choices[i] < base {
                break;
            }
            self.choices[i] = 0;
        }
        Some(t)
    }
}

#[derive(Serialize, Deserialize)]
struct TreeLayoutJson {
    leaves: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<TreeLayoutJson> for TreeLayout {
    type Error = Error;

    fn try_from(j: TreeLayoutJson) -> Result<TreeLayout> {
        TreeLayout::new(j.leaves, j.edges)
    }
}

impl From<TreeLayout> for TreeLayoutJson {
    fn from(t: TreeLayout) -> TreeLayoutJson {
        TreeLayoutJson {
            leaves: t.n_leaves,
            edges: t.edges,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_double_factorial() {
        assert_eq!(layout_count(2), 1);
        assert_eq!(layout_count(3), 1);
        assert_eq!(layout_count(4), 3);
        assert_eq!(layout_count(5), 15);
        assert_eq!(layout_count(6), 105);
        for n in 2..=7 {
            let got = TreeLayouts::new(n, 9).unwrap().count() as u128;
            assert_eq!(got, layout_count(n), "n = {n}");
        }
    }

    #[test]
    fn enumeration_is_valid_and_duplicate_free() {
        for n in 2..=6 {
            let mut seen = HashSet::new();
            for t in TreeLayouts::new(n, 9).unwrap() {
                t.validate().unwrap();
                let mut key: Vec<(usize, usize)> = t
                    .edges()
                    .iter()
                    .map(|&(a, b)| (a.min(b), a.max(b)))
                    .collect();
                key.sort_unstable();
                assert!(seen.insert(key), "duplicate layout for n = {n}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            TreeLayouts::new(10, 9),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn edge_cuts_cover_both_leaf_and_internal_splits() {
        // the unique 4-leaf tree pairing {0,1} and {2,3}
        let t = TreeLayout::new(4, vec![(0, 4), (1, 4), (4, 5), (5, 2), (5, 3)]).unwrap();
        let cuts: Vec<Vec<usize>> = t
            .edge_cuts()
            .iter()
            .map(|m| m.iter_ones().collect())
            .collect();
        assert!(cuts.contains(&vec![0]));
        assert!(cuts.contains(&vec![0, 1]) || cuts.contains(&vec![2, 3]));
    }

    #[test]
    fn rooted_inserts_and_orders() {
        let t = TreeLayout::new(2, vec![(0, 1)]).unwrap();
        let r = t.rooted();
        assert_eq!(r.children[r.root], vec![0, 1]);

        // 5-leaf layout with an explicit degree-2 vertex, the shape used for
        // the four-tensor chain example elsewhere
        let t = TreeLayout::new(
            5,
            vec![(0, 5), (1, 5), (5, 6), (2, 6), (6, 7), (7, 8), (3, 8), (4, 8)],
        )
        .unwrap();
        let r = t.rooted();
        assert_eq!(r.root, 7);
        let masks = r.subtree_leaves();
        let side: Vec<usize> = masks[r.children[r.root][0]].iter_ones().collect();
        assert_eq!(side, vec![0, 1, 2]);
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        assert!(TreeLayout::new(3, vec![(0, 1), (1, 2)]).is_err()); // leaf degree 2
        assert!(TreeLayout::new(2, vec![(0, 1), (0, 1)]).is_err());
        assert!(TreeLayout::new(4, vec![(0, 4), (1, 4), (2, 5), (3, 5)]).is_err()); // forest
    }
}
