//! Tensor networks attached to a graph: the state network (one tensor per
//! vertex, topology equal to the graph) and its doubled probability network.

use crate::dense::PovmElement;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tensor::{Label, Tensor, TensorNetwork};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// One tensor per vertex. Edge e carries bond label e (dim 2); vertex v
/// keeps open physical label edge_count + v. Each edge puts a copy tensor
/// at its lower endpoint and a sign factor (-1)^(bond * phys) at the upper
/// one, so the full contraction reproduces the state's amplitudes and every
/// bond of the network is an edge of the graph.
pub fn peps_tensors(g: &Graph) -> Result<TensorNetwork> {
    let edges = g.edges();
    let m = edges.len();
    let norm = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut tensors = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let incident: Vec<usize> = (0..m)
            .filter(|&e| edges[e].0 == v || edges[e].1 == v)
            .collect();
        let mut labels: Vec<Label> = incident.iter().map(|&e| e as Label).collect();
        labels.push((m + v) as Label);
        let rank = labels.len();
        let mut data = Vec::with_capacity(1 << rank);
        for idx in 0..(1usize << rank) {
            // first label slowest
            let bit = |axis: usize| (idx >> (rank - 1 - axis)) & 1;
            let i = bit(rank - 1);
            let mut val = norm;
            for (axis, &e) in incident.iter().enumerate() {
                let alpha = bit(axis);
                if v == edges[e].0 {
                    if alpha != i {
                        val = Complex64::new(0.0, 0.0);
                        break;
                    }
                } else if alpha & i == 1 {
                    val = -val;
                }
            }
            data.push(val);
        }
        tensors.push(Tensor::new(labels, vec![2; rank], data)?);
    }
    TensorNetwork::new(tensors)
}

/// Doubled network for a Born probability: bond labels keep their edge
/// index but fuse ket and bra indices (dim 4, beta = alpha + 2 alpha'), and
/// the physical legs are consumed by the measurement operator, identity on
/// unlisted qubits. Contracting to a scalar yields the probability, and the
/// network's topology is exactly the graph again.
pub fn probability_network(g: &Graph, elements: &[PovmElement]) -> Result<TensorNetwork> {
    let n = g.n();
    let mut op: Vec<nalgebra::Matrix2<Complex64>> = vec![nalgebra::Matrix2::identity(); n];
    let mut listed = vec![false; n];
    for e in elements {
        if e.qubit >= n {
            return Err(Error::IndexOutOfRange { index: e.qubit, n });
        }
        if listed[e.qubit] {
            return Err(Error::InvalidPovm(format!(
                "two elements on qubit {}",
                e.qubit
            )));
        }
        listed[e.qubit] = true;
        op[e.qubit] = *e.matrix();
    }
    let state = peps_tensors(g)?;
    let mut tensors = Vec::with_capacity(n);
    for (v, a) in state.tensors.iter().enumerate() {
        let k = a.rank() - 1;
        let labels: Vec<Label> = a.labels()[..k].to_vec();
        let mut data = Vec::with_capacity(1usize << (2 * k));
        for idx in 0..(1usize << (2 * k)) {
            // beta digit for axis j, base 4, first label slowest
            let beta = |axis: usize| (idx >> (2 * (k - 1 - axis))) & 3;
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..2usize {
                for i_bra in 0..2usize {
                    let mut ket_off = 0usize;
                    let mut bra_off = 0usize;
                    for axis in 0..k {
                        ket_off = ket_off << 1 | (beta(axis) & 1);
                        bra_off = bra_off << 1 | (beta(axis) >> 1);
                    }
                    ket_off = ket_off << 1 | i;
                    bra_off = bra_off << 1 | i_bra;
                    sum += a.data()[ket_off]
                        * a.data()[bra_off].conj()
                        * op[v][(i_bra, i)];
                }
            }
            data.push(sum);
        }
        tensors.push(Tensor::new(labels, vec![4; k], data)?);
    }
    TensorNetwork::new(tensors)
}

/// Splices out degree-2 vertices whose neighbors are not already adjacent,
/// lowest index first, until none remain. Returns the reduced graph and the
/// surviving original vertex ids in order.
pub fn suppress_degree2(g: &Graph) -> (Graph, Vec<usize>) {
    let n = g.n();
    let mut adj: Vec<std::collections::BTreeSet<usize>> =
        (0..n).map(|v| g.neighbors(v).collect()).collect();
    let mut alive = vec![true; n];
    loop {
        let mut pick = None;
        for v in 0..n {
            if !alive[v] || adj[v].len() != 2 {
                continue;
            }
            let mut it = adj[v].iter();
            let a = *it.next().unwrap();
            let b = *it.next().unwrap();
            if !adj[a].contains(&b) {
                pick = Some((v, a, b));
                break;
            }
        }
        let Some((v, a, b)) = pick else { break };
        alive[v] = false;
        adj[v].clear();
        adj[a].remove(&v);
        adj[b].remove(&v);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let kept: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut newid = vec![usize::MAX; n];
    for (i, &v) in kept.iter().enumerate() {
        newid[v] = i;
    }
    let mut edges = Vec::new();
    for &v in &kept {
        for &w in &adj[v] {
            if v < w {
                edges.push((newid[v], newid[w]));
            }
        }
    }
    let reduced = Graph::from_edges(kept.len(), &edges).expect("splice keeps the graph simple");
    (reduced, kept)
}
