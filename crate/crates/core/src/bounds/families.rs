//! Named sources of benchmark graphs.
//!
//! Each family turns one parameter set into a fixed, ordered list of
//! (id, graph) instances, so suite output is reproducible line for line.
//! Families are looked up by name; the verification CLI exposes the same
//! names.

use crate::circuit::{CircuitIR, Gate};
use crate::dense::{gate, Basis};
use crate::error::{Error, Result};
use crate::graph::{all_connected_graphs, Graph};
use crate::mqc::compile_to_pattern;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Knobs shared by every family. Families ignore what they do not need.
#[derive(Debug, Clone)]
pub struct FamilyParams {
    /// Largest vertex count for the sized families.
    pub n_max: usize,
    /// Instance count for the sampled families.
    pub samples: usize,
    /// Degree bound for the random family.
    pub max_degree: usize,
    pub seed: u64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            n_max: 6,
            samples: 10,
            max_degree: 3,
            seed: 0,
        }
    }
}

/// A graph source the suite can iterate. Implementations must produce the
/// same instances in the same order for equal parameters.
pub trait GraphFamily {
    fn name(&self) -> &'static str;
    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>>;
}

struct Complete;

impl GraphFamily for Complete {
    fn name(&self) -> &'static str {
        "complete"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        Ok((2..=params.n_max)
            .map(|n| (format!("K{n}"), Graph::complete(n)))
            .collect())
    }
}

struct Path;

impl GraphFamily for Path {
    fn name(&self) -> &'static str {
        "path"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        Ok((2..=params.n_max)
            .map(|n| (format!("P{n}"), Graph::path(n)))
            .collect())
    }
}

struct Cycle;

impl GraphFamily for Cycle {
    fn name(&self) -> &'static str {
        "cycle"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        Ok((3..=params.n_max.max(2))
            .map(|n| (format!("C{n}"), Graph::cycle(n)))
            .collect())
    }
}

struct Star;

impl GraphFamily for Star {
    fn name(&self) -> &'static str {
        "star"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        Ok((2..params.n_max)
            .map(|leaves| (format!("S{leaves}"), Graph::star(leaves)))
            .collect())
    }
}

struct AllConnected;

impl GraphFamily for AllConnected {
    fn name(&self) -> &'static str {
        "all-connected"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        let mut out = Vec::new();
        for n in 2..=params.n_max.min(6) {
            for (i, g) in all_connected_graphs(n).enumerate() {
                out.push((format!("G{n}-{i}"), g));
            }
        }
        Ok(out)
    }
}

struct RandomBounded;

/// Erdos-Renyi conditioned on connectivity and the degree bound, by
/// rejection. The edge probability is scaled so the degree condition is not
/// hopeless at the larger sizes.
fn sample_bounded(rng: &mut ChaCha8Rng, n: usize, max_degree: usize) -> Graph {
    let p = (max_degree as f64 * 0.55 / (n as f64 - 1.0)).min(0.5);
    loop {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        if g.is_connected() && g.max_degree() <= max_degree {
            return g;
        }
    }
}

impl GraphFamily for RandomBounded {
    fn name(&self) -> &'static str {
        "random"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        if params.n_max < 3 {
            return Err(Error::InvalidGraph(
                "random family needs n_max >= 3".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let sizes: Vec<usize> = (3..=params.n_max).collect();
        Ok((0..params.samples)
            .map(|i| {
                let n = sizes[i % sizes.len()];
                let g = sample_bounded(&mut rng, n, params.max_degree);
                (format!("R{n}-{i}"), g)
            })
            .collect())
    }
}

struct CompiledCircuit;

fn random_circuit(rng: &mut ChaCha8Rng) -> CircuitIR {
    let qubits = rng.gen_range(2..=3);
    let len = rng.gen_range(2..=4);
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        if qubits > 1 && rng.gen_bool(0.4) {
            let a = rng.gen_range(0..qubits);
            let mut b = rng.gen_range(0..qubits - 1);
            if b >= a {
                b += 1;
            }
            gates.push(Gate::Cz {
                a: a.min(b),
                b: a.max(b),
            });
        } else {
            let target = rng.gen_range(0..qubits);
            let matrix = match rng.gen_range(0..3) {
                0 => gate::h(),
                1 => gate::rz(rng.gen_range(-PI..PI)),
                _ => gate::rz(rng.gen_range(-PI..PI)) * gate::h(),
            };
            gates.push(Gate::U { target, matrix });
        }
    }
    CircuitIR::new(qubits, gates, vec![Basis::Z; qubits]).expect("sampled gates are unitary")
}

impl GraphFamily for CompiledCircuit {
    fn name(&self) -> &'static str {
        "circuit"
    }

    fn instances(&self, params: &FamilyParams) -> Result<Vec<(String, Graph)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut out = Vec::new();
        for i in 0..params.samples {
            // reject circuits whose pattern graph splits (the width
            // parameters downstream want connected input) or outgrows the
            // default tree-enumeration cap of 9 leaves
            loop {
                let c = random_circuit(&mut rng);
                let pattern = compile_to_pattern(&c)?;
                if pattern.graph().is_connected() && pattern.graph().n() <= 9 {
                    out.push((
                        format!("T{}q{}g-{i}", c.qubits(), c.gates().len()),
                        pattern.graph().clone(),
                    ));
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// All registered families, in listing order.
pub fn registry() -> Vec<Box<dyn GraphFamily>> {
    vec![
        Box::new(Complete),
        Box::new(Path),
        Box::new(Cycle),
        Box::new(Star),
        Box::new(AllConnected),
        Box::new(RandomBounded),
        Box::new(CompiledCircuit),
    ]
}

pub fn family(name: &str) -> Result<Box<dyn GraphFamily>> {
    registry()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::UnknownFamily(name.into()))
}
