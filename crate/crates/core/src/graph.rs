//! Undirected simple graphs with bit-row adjacency.
//!
//! Vertices are `0..n`. The two cut quantities that drive everything else
//! live here: `crossing_edges` (plain edge count across a bipartition) and
//! `cut_rank` (GF(2) rank of the bipartite adjacency block). For a graph
//! state, `2^cut_rank` is exactly the Schmidt rank across that cut, which is
//! what ties the combinatorics to the physics.

use crate::bits::{gf2_rank, BitVec};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    rows: Vec<BitVec>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            rows: (0..n).map(|_| BitVec::zeros(n)).collect(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(Error::InvalidGraph(format!("self loop at {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            g.rows[u].set(v, true);
            g.rows[v].set(u, true);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut g = Graph::path(n);
        g.add_edge(0, n - 1);
        g
    }

    /// Star with `leaves` leaves; the hub is vertex 0.
    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::empty(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        g
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: v, n: self.n })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].get(v)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.rows[u].set(v, true);
        self.rows[v].set(u, true);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].set(v, false);
        self.rows[v].set(u, false);
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        assert!(u != v);
        self.rows[u].toggle(v);
        self.rows[v].toggle(u);
    }

    /// Adjacency row of `v` as a bit set.
    pub fn row(&self, v: usize) -> &BitVec {
        &self.rows[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v].iter_ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges as (u, v) pairs with u < v, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.rows[u].iter_ones() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones()).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = BitVec::zeros(self.n);
        let mut stack = vec![0];
        seen.set(0, true);
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen.get(w) {
                    seen.set(w, true);
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Complement the subgraph induced on the neighborhood of `v`.
    pub fn local_complement(&self, v: usize) -> Result<Graph> {
        self.check_vertex(v)?;
        let mut g = self.clone();
        let nv = self.rows[v].clone();
        for a in nv.iter_ones() {
            g.rows[a].xor_assign(&nv);
            g.rows[a].set(a, false); // no self loops
        }
        Ok(g)
    }

    /// Remove `v`; survivors are relabeled downward. Returns the new graph
    /// and the map from new index to old index.
    pub fn delete_vertex(&self, v: usize) -> Result<(Graph, Vec<usize>)> {
        self.check_vertex(v)?;
        let new_to_old: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        let mut g = Graph::empty(self.n - 1);
        for (i, &u) in new_to_old.iter().enumerate() {
            for (j, &w) in new_to_old.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, w) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok((g, new_to_old))
    }

    /// Clear every edge incident to `v`, keeping the vertex in place.
    /// This is how a z-measurement acts on a graph state up to local
    /// corrections, and it keeps indices stable where `delete_vertex`
    /// would shift them.
    pub fn isolate_vertex(&mut self, v: usize) {
        let nv = self.rows[v].clone();
        for w in nv.iter_ones() {
            self.rows[w].set(v, false);
        }
        self.rows[v] = BitVec::zeros(self.n);
    }

    /// Number of edges with one endpoint on each side.
    pub fn crossing_edges(&self, p: &Bipartition) -> usize {
        p.side_a()
            .iter_ones()
            .map(|a| self.rows[a].and_count(p.side_b()))
            .sum()
    }

    /// GF(2) rank of the bipartite adjacency block A x B.
    pub fn cut_rank(&self, p: &Bipartition) -> usize {
        let mut rows: Vec<BitVec> = p
            .side_a()
            .iter_ones()
            .map(|a| self.rows[a].and(p.side_b()))
            .collect();
        gf2_rank(&mut rows)
    }

    /// Same as [`cut_rank`](Self::cut_rank) but for one-sided masks that need
    /// not cover the graph; rank of the block `side x (V \ side)`.
    pub fn cut_rank_of_side(&self, side: &BitVec) -> usize {
        let other = side.not();
        let mut rows: Vec<BitVec> = side
            .iter_ones()
            .map(|a| self.rows[a].and(&other))
            .collect();
        gf2_rank(&mut rows)
    }

    pub fn crossing_edges_of_side(&self, side: &BitVec) -> usize {
        let other = side.not();
        side.iter_ones()
            .map(|a| self.rows[a].and_count(&other))
            .sum()
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// All labeled graphs on `n` vertices, one per subset of the n(n-1)/2
/// vertex pairs, pairs ordered (0,1),(0,2),..,(1,2),... Exhaustive sweeps
/// only; n is capped where 2^(n choose 2) stays enumerable.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= 7, "labeled-graph enumeration is for n <= 7");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let slots = pairs.len();
    (0u64..1 << slots).map(move |mask| {
        let mut g = Graph::empty(n);
        for (k, &(u, v)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                g.add_edge(u, v);
            }
        }
        g
    })
}

pub fn all_connected_graphs(n: usize) -> impl Iterator<Item = Graph> {
    all_graphs(n).filter(|g| g.is_connected())
}

/// A two-sided split of `0..n` with both sides nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    side_a: BitVec,
    side_b: BitVec,
}

impl Bipartition {
    pub fn new(n: usize, side_a_vertices: &[usize]) -> Result<Self> {
        for &v in side_a_vertices {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        Self::from_mask(BitVec::from_indices(n, side_a_vertices))
    }

    pub fn from_mask(side_a: BitVec) -> Result<Self> {
        let side_b = side_a.not();
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidBipartition(
                "both sides must be nonempty".into(),
            ));
        }
        Ok(Bipartition { side_a, side_b })
    }

    pub fn n(&self) -> usize {
        self.side_a.len()
    }

    pub fn side_a(&self) -> &BitVec {
        &self.side_a
    }

    pub fn side_b(&self) -> &BitVec {
        &self.side_b
    }

    pub fn flipped(&self) -> Bipartition {
        Bipartition {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }

    pub fn side_of(&self, v: usize) -> bool {
        self.side_a.get(v)
    }
}

/// Wire format: `{"n": 4, "edges": [[0,1],[2,3]]}` with `u < v`, no
/// duplicates, indices in range.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Graph> {
        for &(u, v) in &j.edges {
            if u >= v {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) must be listed with u < v"
                )));
            }
        }
        Graph::from_edges(j.n, &j.edges)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> GraphJson {
        GraphJson {
            n: g.n,
            edges: g.edges(),
        }
    }
}
