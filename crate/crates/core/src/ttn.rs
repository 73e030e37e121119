//! Tree tensor networks: exact hierarchical Schmidt decompositions.
//!
//! A [`Ttn`] lives on a rooted layout. Every non-root vertex carries an
//! isometry mapping its two lower bonds (or the physical index, at a leaf)
//! into the bond toward the root; the root holds a plain matrix coupling its
//! two children. Construction is exact, no truncation: each bond dimension
//! equals the Schmidt rank of the edge's bipartition. Local measurements
//! update tensors along the leaf-to-root path only, so bonds off the path
//! keep their dimension even when the post-measurement rank drops.

use crate::bits::BitVec;
use crate::dense::{PovmElement, StateVector, DEGENERATE_FLOOR, SCHMIDT_REL_TOL};
use crate::error::{Error, Result};
use crate::svd::svd_jacobi;
use crate::tree::{RootedTree, TreeLayout};
use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

#[derive(Clone)]
enum Node {
    /// 2 x chi, physical index on rows.
    Leaf { iso: CMat },
    /// (d1*d2) x chi, rows fuse the child bonds as a1 * d2 + a2.
    Internal { iso: CMat, d1: usize, d2: usize },
    /// d1 x d2 coupling the root's two children.
    Root { core: CMat },
}

impl Node {
    fn bond_up(&self) -> Option<usize> {
        match self {
            Node::Leaf { iso } | Node::Internal { iso, .. } => Some(iso.ncols()),
            Node::Root { .. } => None,
        }
    }

    fn entries(&self) -> usize {
        match self {
            Node::Leaf { iso } | Node::Internal { iso, .. } => iso.len(),
            Node::Root { core } => core.len(),
        }
    }
}

#[derive(Clone)]
pub struct Ttn {
    n: usize,
    rooted: RootedTree,
    masks: Vec<BitVec>,
    nodes: Vec<Node>,
}

struct SvdSplit {
    iso: CMat,
    carry: CMat,
}

/// Economy SVD truncated at the relative rank threshold: m = iso * carry
/// with iso an isometry holding the surviving left singular vectors.
fn split_isometry(m: &CMat, tol: f64) -> SvdSplit {
    let svd = svd_jacobi(m);
    let top = svd.sigma.first().copied().unwrap_or(0.0);
    let rank = svd.sigma.iter().filter(|&&s| s > tol * top).count().max(1);
    let iso = svd.u.columns(0, rank).into_owned();
    let mut carry = svd.v_h.rows(0, rank).into_owned();
    for (i, mut row) in carry.row_iter_mut().enumerate() {
        row *= Complex64::new(svd.sigma[i], 0.0);
    }
    SvdSplit { iso, carry }
}

impl Ttn {
    /// Exact decomposition of a dense state along a layout. Splits the
    /// amplitude matrix at the root edge, then pushes isometries down the
    /// tree, re-splitting at every internal vertex.
    pub fn from_dense(s: &StateVector, t: &TreeLayout) -> Ttn {
        assert_eq!(s.n(), t.n_leaves(), "one leaf per qubit");
        let rooted = t.rooted();
        let masks = rooted.subtree_leaves();
        let mut nodes: Vec<Option<Node>> = vec![None; rooted.parent.len()];

        let c1 = rooted.children[rooted.root][0];
        let c2 = rooted.children[rooted.root][1];
        let p = crate::graph::Bipartition::from_mask(masks[c1].clone())
            .expect("root split has both sides");
        let m = s.bipartition_matrix(&p);
        let svd = svd_jacobi(&m);
        let top = svd.sigma.first().copied().unwrap_or(0.0);
        let rank = svd
            .sigma
            .iter()
            .filter(|&&x| x > SCHMIDT_REL_TOL * top)
            .count()
            .max(1);
        let u = svd.u.columns(0, rank).into_owned();
        // conj(V): transpose of v_h without conjugation
        let w2 = svd.v_h.rows(0, rank).transpose();
        let mut core = CMat::zeros(rank, rank);
        for k in 0..rank {
            core[(k, k)] = Complex64::new(svd.sigma[k], 0.0);
        }
        nodes[rooted.root] = Some(Node::Root { core });
        Self::push_down(&rooted, &masks, &mut nodes, c1, u);
        Self::push_down(&rooted, &masks, &mut nodes, c2, w2);

        Ttn {
            n: s.n(),
            rooted,
            masks,
            nodes: nodes.into_iter().map(Option::unwrap).collect(),
        }
    }

    /// iso: 2^(leaves under v) x r, rows packed by ascending leaf id.
    fn push_down(
        rooted: &RootedTree,
        masks: &[BitVec],
        nodes: &mut [Option<Node>],
        v: usize,
        iso: CMat,
    ) {
        if v < rooted.n_leaves {
            nodes[v] = Some(Node::Leaf { iso });
            return;
        }
        let r = iso.ncols();
        let c1 = rooted.children[v][0];
        let c2 = rooted.children[v][1];
        let all: Vec<usize> = masks[v].iter_ones().collect();
        let left: Vec<usize> = masks[c1].iter_ones().collect();
        let right: Vec<usize> = masks[c2].iter_ones().collect();
        let pos = |leaf: usize| all.iter().position(|&x| x == leaf).unwrap();
        let row_of = |i1: usize, i2: usize| {
            let mut row = 0usize;
            for (j, &leaf) in left.iter().enumerate() {
                row |= ((i1 >> j) & 1) << pos(leaf);
            }
            for (j, &leaf) in right.iter().enumerate() {
                row |= ((i2 >> j) & 1) << pos(leaf);
            }
            row
        };
        let (n1, n2) = (1usize << left.len(), 1usize << right.len());

        // split off the first child: rows i1, columns (i2, p)
        let mut m1 = CMat::zeros(n1, n2 * r);
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                for p in 0..r {
                    m1[(i1, i2 * r + p)] = iso[(row_of(i1, i2), p)];
                }
            }
        }
        let s1 = split_isometry(&m1, SCHMIDT_REL_TOL);
        let chi1 = s1.iso.ncols();

        // then the second: rows i2, columns (a1, p)
        let mut m2 = CMat::zeros(n2, chi1 * r);
        for i2 in 0..n2 {
            for a1 in 0..chi1 {
                for p in 0..r {
                    m2[(i2, a1 * r + p)] = s1.carry[(a1, i2 * r + p)];
                }
            }
        }
        let s2 = split_isometry(&m2, SCHMIDT_REL_TOL);
        let chi2 = s2.iso.ncols();

        let mut own = CMat::zeros(chi1 * chi2, r);
        for a1 in 0..chi1 {
            for a2 in 0..chi2 {
                for p in 0..r {
                    own[(a1 * chi2 + a2, p)] = s2.carry[(a2, a1 * r + p)];
                }
            }
        }
        nodes[v] = Some(Node::Internal {
            iso: own,
            d1: chi1,
            d2: chi2,
        });
        Self::push_down(rooted, masks, nodes, c1, s1.iso);
        Self::push_down(rooted, masks, nodes, c2, s2.iso);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rooted(&self) -> &RootedTree {
        &self.rooted
    }

    pub fn subtree_mask(&self, v: usize) -> &BitVec {
        &self.masks[v]
    }

    /// (vertex, bond dimension toward the root) for every non-root vertex.
    pub fn bond_dims(&self) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(v, n)| n.bond_up().map(|d| (v, d)))
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().iter().map(|&(_, d)| d).max().unwrap_or(1)
    }

    pub fn parameter_count(&self) -> usize {
        self.nodes.iter().map(Node::entries).sum()
    }

    fn subtree_vector(&self, v: usize, bits: usize) -> Vec<Complex64> {
        match &self.nodes[v] {
            Node::Leaf { iso } => {
                let x = (bits >> v) & 1;
                (0..iso.ncols()).map(|k| iso[(x, k)]).collect()
            }
            Node::Internal { iso, d1, d2 } => {
                let v1 = self.subtree_vector(self.rooted.children[v][0], bits);
                let v2 = self.subtree_vector(self.rooted.children[v][1], bits);
                (0..iso.ncols())
                    .map(|p| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a1 in 0..*d1 {
                            for a2 in 0..*d2 {
                                acc += v1[a1] * v2[a2] * iso[(a1 * d2 + a2, p)];
                            }
                        }
                        acc
                    })
                    .collect()
            }
            Node::Root { .. } => unreachable!("root handled by amplitude"),
        }
    }

    pub fn amplitude(&self, bits: usize) -> Complex64 {
        let core = match &self.nodes[self.rooted.root] {
            Node::Root { core } => core,
            _ => unreachable!(),
        };
        let v1 = self.subtree_vector(self.rooted.children[self.rooted.root][0], bits);
        let v2 = self.subtree_vector(self.rooted.children[self.rooted.root][1], bits);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in v1.iter().enumerate() {
            for (j, b) in v2.iter().enumerate() {
                acc += a * core[(i, j)] * b;
            }
        }
        acc
    }

    /// Full contraction; test-sized states only.
    pub fn to_dense(&self) -> StateVector {
        let amp = (0..1usize << self.n).map(|x| self.amplitude(x)).collect();
        StateVector::from_amplitudes(self.n, amp)
    }

    /// Generalized single-qubit measurement: applies sqrt(E) at the leaf and
    /// restores the isometric gauge along the leaf-to-root path. Returns the
    /// outcome probability and the normalized updated network. Bond
    /// dimensions along the path can only shrink; bonds elsewhere are
    /// untouched.
    pub fn measure_qubit(&self, e: &PovmElement) -> Result<(f64, Ttn)> {
        let q = e.qubit;
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, n: self.n });
        }
        let mut nodes = self.nodes.clone();
        let k = e.sqrt_matrix();

        let leaf_iso = match &nodes[q] {
            Node::Leaf { iso } => iso,
            _ => unreachable!("qubits are leaves"),
        };
        let mut touched = CMat::zeros(2, leaf_iso.ncols());
        for r in 0..2 {
            for col in 0..leaf_iso.ncols() {
                touched[(r, col)] = k[(r, 0)] * leaf_iso[(0, col)] + k[(r, 1)] * leaf_iso[(1, col)];
            }
        }
        let split = split_isometry(&touched, SCHMIDT_REL_TOL);
        nodes[q] = Node::Leaf { iso: split.iso };
        let mut carry = split.carry;
        let mut child = q;

        loop {
            let parent = self.rooted.parent[child];
            let slot = self.rooted.children[parent]
                .iter()
                .position(|&c| c == child)
                .unwrap();
            match &nodes[parent] {
                Node::Internal { iso, d1, d2 } => {
                    let (d1, d2) = (*d1, *d2);
                    let r = iso.ncols();
                    let dnew = carry.nrows();
                    let (e1, e2) = if slot == 0 { (dnew, d2) } else { (d1, dnew) };
                    let mut merged = CMat::zeros(e1 * e2, r);
                    for a1 in 0..e1 {
                        for a2 in 0..e2 {
                            for p in 0..r {
                                let mut acc = Complex64::new(0.0, 0.0);
                                if slot == 0 {
                                    for old in 0..d1 {
                                        acc += carry[(a1, old)] * iso[(old * d2 + a2, p)];
                                    }
                                } else {
                                    for old in 0..d2 {
                                        acc += carry[(a2, old)] * iso[(a1 * d2 + old, p)];
                                    }
                                }
                                merged[(a1 * e2 + a2, p)] = acc;
                            }
                        }
                    }
                    let split = split_isometry(&merged, SCHMIDT_REL_TOL);
                    nodes[parent] = Node::Internal {
                        iso: split.iso,
                        d1: e1,
                        d2: e2,
                    };
                    carry = split.carry;
                    child = parent;
                }
                Node::Root { core } => {
                    let merged = if slot == 0 {
                        &carry * core
                    } else {
                        core * carry.transpose()
                    };
                    let p = merged.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    if p < DEGENERATE_FLOOR {
                        return Err(Error::DegenerateBranch { probability: p });
                    }
                    let scale = Complex64::new(p.sqrt().recip(), 0.0);
                    nodes[parent] = Node::Root {
                        core: merged * scale,
                    };
                    let updated = Ttn {
                        n: self.n,
                        rooted: self.rooted.clone(),
                        masks: self.masks.clone(),
                        nodes,
                    };
                    return Ok((p, updated));
                }
                Node::Leaf { .. } => unreachable!("leaves have no children"),
            }
        }
    }

    /// Worst deviation of any non-root tensor from exact isometry; the
    /// gauge every construction and update must preserve.
    pub fn gauge_error(&self) -> f64 {
        self.gauge_errors()
            .into_iter()
            .map(|(_, e)| e)
            .fold(0.0, f64::max)
    }

    fn gauge_errors(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (v, node) in self.nodes.iter().enumerate() {
            let iso = match node {
                Node::Leaf { iso } | Node::Internal { iso, .. } => iso,
                Node::Root { .. } => continue,
            };
            let gram = iso.adjoint() * iso;
            let mut worst = 0.0f64;
            for i in 0..gram.nrows() {
                for j in 0..gram.ncols() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((gram[(i, j)] - Complex64::new(want, 0.0)).norm());
                }
            }
            out.push((v, worst));
        }
        out
    }
}

impl std::fmt::Debug for Ttn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ttn(n={}, max bond={})", self.n, self.max_bond_dim())
    }
}
