//! Dense labeled tensors and contraction sequences.
//!
//! A network's labels are its edges: a label on two tensors is a contracted
//! bond, a label on one tensor stays open. Sequences merge tensor sets
//! pairwise; the cost ledger L tracks, per merged set, how many bonds cross
//! to the rest of the network. The planner lives elsewhere (width module);
//! this module only prices and executes.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::tree::TreeLayout;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Label = u32;

#[derive(Clone)]
pub struct Tensor {
    labels: Vec<Label>,
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    /// Row-major data in label order (first label slowest).
    pub fn new(labels: Vec<Label>, dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::MalformedSequence(
                "labels and dims length mismatch".into(),
            ));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::MalformedSequence(
                "repeated label within one tensor".into(),
            ));
        }
        let want: usize = dims.iter().product();
        if data.len() != want {
            return Err(Error::MalformedSequence(format!(
                "data length {} but dims want {}",
                data.len(),
                want
            )));
        }
        Ok(Tensor { labels, dims, data })
    }

    pub fn scalar(z: Complex64) -> Self {
        Tensor {
            labels: Vec::new(),
            dims: Vec::new(),
            data: vec![z],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn entries(&self) -> usize {
        self.data.len()
    }

    pub fn dim_of(&self, label: Label) -> Option<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.dims[i])
    }

    pub fn scale(&self, z: Complex64) -> Tensor {
        Tensor {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    /// Reorder axes so labels appear in `order` (a permutation of ours).
    fn permuted(&self, order: &[usize]) -> Tensor {
        debug_assert_eq!(order.len(), self.labels.len());
        let labels: Vec<Label> = order.iter().map(|&i| self.labels[i]).collect();
        let dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        // strides of the old layout, walked in the new axis order
        let mut old_strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            old_strides[i] = old_strides[i + 1] * self.dims[i + 1];
        }
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; dims.len()];
        loop {
            let off: usize = idx
                .iter()
                .zip(order)
                .map(|(&v, &o)| v * old_strides[o])
                .sum();
            data.push(self.data[off]);
            let mut axis = dims.len();
            loop {
                if axis == 0 {
                    return Tensor { labels, dims, data };
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < dims[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tensor(labels={:?}, dims={:?})", self.labels, self.dims)
    }
}

/// Sum over all shared labels; disjoint labels give the outer product.
/// Result labels: a's own (in a's order), then b's own.
pub fn contract_pair(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let shared: Vec<Label> = a
        .labels
        .iter()
        .copied()
        .filter(|l| b.labels.contains(l))
        .collect();
    for &l in &shared {
        let (da, db) = (a.dim_of(l).unwrap(), b.dim_of(l).unwrap());
        if da != db {
            return Err(Error::DimMismatch {
                label: l,
                a: da,
                b: db,
            });
        }
    }
    // a -> (own, shared), b -> (shared, own), then one matrix product
    let a_own: Vec<usize> = (0..a.labels.len())
        .filter(|&i| !shared.contains(&a.labels[i]))
        .collect();
    let a_order: Vec<usize> = a_own
        .iter()
        .copied()
        .chain(shared.iter().map(|l| {
            a.labels.iter().position(|x| x == l).unwrap()
        }))
        .collect();
    let b_own: Vec<usize> = (0..b.labels.len())
        .filter(|&i| !shared.contains(&b.labels[i]))
        .collect();
    let b_order: Vec<usize> = shared
        .iter()
        .map(|l| b.labels.iter().position(|x| x == l).unwrap())
        .chain(b_own.iter().copied())
        .collect();
    let pa = a.permuted(&a_order);
    let pb = b.permuted(&b_order);
    let shared_dim: usize = shared.iter().map(|&l| a.dim_of(l).unwrap()).product();
    let rows = pa.data.len() / shared_dim;
    let cols = pb.data.len() / shared_dim;
    let ma = DMatrix::from_row_slice(rows, shared_dim, &pa.data);
    let mb = DMatrix::from_row_slice(shared_dim, cols, &pb.data);
    let prod = ma * mb;
    let mut labels = Vec::with_capacity(a_own.len() + b_own.len());
    let mut dims = Vec::new();
    for &i in &a_own {
        labels.push(a.labels[i]);
        dims.push(a.dims[i]);
    }
    for &i in &b_own {
        labels.push(b.labels[i]);
        dims.push(b.dims[i]);
    }
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for col in 0..cols {
            data.push(prod[(r, col)]);
        }
    }
    Ok(Tensor { labels, dims, data })
}

#[derive(Clone, Debug)]
pub struct TensorNetwork {
    pub tensors: Vec<Tensor>,
}

impl TensorNetwork {
    pub fn new(tensors: Vec<Tensor>) -> Result<Self> {
        let net = TensorNetwork { tensors };
        net.validate()?;
        Ok(net)
    }

    /// Label degree must be 1 (open) or 2 (bond), with agreeing dims.
    pub fn validate(&self) -> Result<()> {
        let mut seen: std::collections::BTreeMap<Label, (usize, usize)> =
            std::collections::BTreeMap::new();
        for t in &self.tensors {
            for (&l, &d) in t.labels.iter().zip(&t.dims) {
                let entry = seen.entry(l).or_insert((0, d));
                entry.0 += 1;
                if entry.1 != d {
                    return Err(Error::DimMismatch {
                        label: l,
                        a: entry.1,
                        b: d,
                    });
                }
                if entry.0 > 2 {
                    return Err(Error::MalformedSequence(format!(
                        "label {l} appears on more than two tensors"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bond labels (degree 2) per tensor, the network's edge structure.
    fn bond_endpoints(&self) -> std::collections::BTreeMap<Label, Vec<usize>> {
        let mut map: std::collections::BTreeMap<Label, Vec<usize>> =
            std::collections::BTreeMap::new();
        for (i, t) in self.tensors.iter().enumerate() {
            for &l in &t.labels {
                map.entry(l).or_default().push(i);
            }
        }
        map.retain(|_, v| v.len() == 2);
        map
    }

    /// Bonds from tensors in `set` to tensors outside it.
    pub fn crossing_bonds(&self, set: &BitVec) -> usize {
        self.bond_endpoints()
            .values()
            .filter(|ends| set.get(ends[0]) != set.get(ends[1]))
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Leaf(usize),
    Step(usize),
}

/// Pairwise merge schedule. Step i merges two operands into set s^i; the
/// final step must cover every tensor.
#[derive(Clone, Debug)]
pub struct ContractionSequence {
    pub steps: Vec<(Operand, Operand)>,
}

impl ContractionSequence {
    /// Checks shape against a network of `n_leaves` tensors and returns the
    /// member set of each step.
    pub fn step_sets(&self, n_leaves: usize) -> Result<Vec<BitVec>> {
        if n_leaves == 0 {
            return Err(Error::MalformedSequence("empty network".into()));
        }
        if self.steps.len() + 1 != n_leaves {
            return Err(Error::MalformedSequence(format!(
                "{} steps cannot cover {} tensors",
                self.steps.len(),
                n_leaves
            )));
        }
        let mut leaf_used = vec![false; n_leaves];
        let mut step_used = vec![false; self.steps.len()];
        let mut sets: Vec<BitVec> = Vec::with_capacity(self.steps.len());
        for (i, &(x, y)) in self.steps.iter().enumerate() {
            let mut set = BitVec::zeros(n_leaves);
            for op in [x, y] {
                match op {
                    Operand::Leaf(v) => {
                        if v >= n_leaves {
                            return Err(Error::MalformedSequence(format!(
                                "leaf {v} out of range"
                            )));
                        }
                        if leaf_used[v] {
                            return Err(Error::MalformedSequence(format!(
                                "leaf {v} used twice"
                            )));
                        }
                        leaf_used[v] = true;
                        set.set(v, true);
                    }
                    Operand::Step(s) => {
                        if s >= i {
                            return Err(Error::MalformedSequence(format!(
                                "step {i} references step {s} before it exists"
                            )));
                        }
                        if step_used[s] {
                            return Err(Error::MalformedSequence(format!(
                                "step {s} consumed twice"
                            )));
                        }
                        step_used[s] = true;
                        set.xor_assign(&sets[s]);
                    }
                }
            }
            sets.push(set);
        }
        if let Some(last) = sets.last() {
            if last.count_ones() != n_leaves {
                return Err(Error::MalformedSequence(
                    "final step does not cover the network".into(),
                ));
            }
        }
        Ok(sets)
    }
}

/// Outcome of executing a sequence: the contracted tensor plus the cost
/// ledger. `l_trace[i]` is the bond cut of step i's set; `l_max` also folds
/// in the singleton cuts of the input tensors, so it equals the carving-style
/// tree maximum when the sequence came from a layout.
pub struct Execution {
    pub result: Tensor,
    pub l_max: usize,
    pub l_trace: Vec<usize>,
}

pub fn execute_sequence(
    net: &TensorNetwork,
    seq: &ContractionSequence,
    entry_cap: usize,
) -> Result<Execution> {
    net.validate()?;
    let n = net.tensors.len();
    if n == 1 && seq.steps.is_empty() {
        let singleton = net.crossing_bonds(&BitVec::from_indices(1, &[0]));
        return Ok(Execution {
            result: net.tensors[0].clone(),
            l_max: singleton,
            l_trace: Vec::new(),
        });
    }
    let sets = seq.step_sets(n)?;
    let mut l_max = 0;
    for v in 0..n {
        l_max = l_max.max(net.crossing_bonds(&BitVec::from_indices(n, &[v])));
    }
    let mut l_trace = Vec::with_capacity(sets.len());
    for set in &sets {
        let l = net.crossing_bonds(set);
        l_trace.push(l);
        l_max = l_max.max(l);
    }
    let mut partial: Vec<Option<Tensor>> = vec![None; sets.len()];
    for (i, &(x, y)) in seq.steps.iter().enumerate() {
        let ta = take_operand(net, &mut partial, x);
        let tb = take_operand(net, &mut partial, y);
        let out_entries: u128 = result_entries(&ta, &tb);
        if out_entries > entry_cap as u128 {
            return Err(Error::EntryCapExceeded {
                step: i,
                entries: out_entries,
                cap: entry_cap,
            });
        }
        partial[i] = Some(contract_pair(&ta, &tb)?);
    }
    Ok(Execution {
        result: partial.pop().unwrap().unwrap(),
        l_max,
        l_trace,
    })
}

fn take_operand(net: &TensorNetwork, partial: &mut [Option<Tensor>], op: Operand) -> Tensor {
    match op {
        Operand::Leaf(v) => net.tensors[v].clone(),
        Operand::Step(s) => partial[s].take().expect("validated: consumed once"),
    }
}

fn result_entries(a: &Tensor, b: &Tensor) -> u128 {
    let mut out = 1u128;
    for (&l, &d) in a.labels.iter().zip(&a.dims) {
        if !b.labels.contains(&l) {
            out *= d as u128;
        }
    }
    for (&l, &d) in b.labels.iter().zip(&b.dims) {
        if !a.labels.contains(&l) {
            out *= d as u128;
        }
    }
    out
}

/// Root the layout and merge children bottom-up: one step per internal
/// vertex, in post order. Step sets are exactly the layout's edge
/// bipartitions seen from below.
pub fn sequence_from_tree(t: &TreeLayout) -> ContractionSequence {
    let rooted = t.rooted();
    let mut step_of = vec![usize::MAX; rooted.parent.len()];
    let mut steps = Vec::with_capacity(t.n_leaves().saturating_sub(1));
    for v in rooted.post_order() {
        if v < t.n_leaves() {
            continue;
        }
        let ops: Vec<Operand> = rooted.children[v]
            .iter()
            .map(|&ch| {
                if ch < t.n_leaves() {
                    Operand::Leaf(ch)
                } else {
                    Operand::Step(step_of[ch])
                }
            })
            .collect();
        debug_assert_eq!(ops.len(), 2);
        step_of[v] = steps.len();
        steps.push((ops[0], ops[1]));
    }
    ContractionSequence { steps }
}

/// Inverse of [`sequence_from_tree`] up to where the degree-2 vertex sits:
/// the edge bipartition families agree.
pub fn tree_from_sequence(seq: &ContractionSequence, n_leaves: usize) -> Result<TreeLayout> {
    seq.step_sets(n_leaves)?; // shape check
    if n_leaves == 2 {
        return TreeLayout::new(2, vec![(0, 1)]);
    }
    let vertex_of = |op: Operand| match op {
        Operand::Leaf(v) => v,
        Operand::Step(s) => n_leaves + s,
    };
    let mut edges = Vec::with_capacity(2 * n_leaves - 3);
    for (i, &(x, y)) in seq.steps.iter().enumerate() {
        edges.push((n_leaves + i, vertex_of(x)));
        edges.push((n_leaves + i, vertex_of(y)));
    }
    // the last merge vertex is the degree-2 root
    TreeLayout::new(n_leaves, edges)
}
