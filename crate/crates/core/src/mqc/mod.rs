//! Measurement-based evaluation of circuits on graph states.
//!
//! A circuit compiles to a pattern: one chain of physical qubits per logical
//! qubit, single-qubit gates realized by measured chain steps, CZ gates by
//! edges between chain fronts. Submodules: [`compile`] builds patterns and
//! circuit graphs, [`networks`] the tensor networks whose contraction cost
//! the widths control, [`eval`] the exact branch-by-branch pattern runner.

pub mod compile;
pub mod eval;
pub mod networks;

pub use compile::{build_circuit_graph, compile_to_pattern, insert_output_qubits};
pub use eval::{evaluate_pattern, pattern_distribution, PatternBranch};
pub use networks::{peps_tensors, probability_network, suppress_degree2};

use crate::dense::Basis;
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

/// A measurement pattern over a graph state. Chains partition the vertices
/// into vertex-disjoint paths, one per logical qubit; consecutive chain
/// entries are graph edges. Every qubit is either planned for measurement
/// or an output, never both.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPattern {
    graph: Graph,
    chains: Vec<Vec<usize>>,
    plan: Vec<Option<Basis>>,
    outputs: BTreeSet<usize>,
}

impl MeasurementPattern {
    pub fn new(
        graph: Graph,
        chains: Vec<Vec<usize>>,
        plan: Vec<Option<Basis>>,
        outputs: BTreeSet<usize>,
    ) -> Result<Self> {
        let p = MeasurementPattern {
            graph,
            chains,
            plan,
            outputs,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.plan.len() != n {
            return Err(Error::InvalidGraph(format!(
                "plan covers {} qubits, graph has {n}",
                self.plan.len()
            )));
        }
        let mut seen = vec![false; n];
        for chain in &self.chains {
            for (i, &q) in chain.iter().enumerate() {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, n });
                }
                if seen[q] {
                    return Err(Error::InvalidGraph(format!("qubit {q} in two chains")));
                }
                seen[q] = true;
                if i > 0 && !self.graph.has_edge(chain[i - 1], q) {
                    return Err(Error::InvalidGraph(format!(
                        "chain entries {} and {q} are not adjacent",
                        chain[i - 1]
                    )));
                }
            }
        }
        if let Some(q) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidGraph(format!("qubit {q} is in no chain")));
        }
        for q in 0..n {
            let out = self.outputs.contains(&q);
            if out && self.plan[q].is_some() {
                return Err(Error::InvalidGraph(format!("output {q} has a plan")));
            }
            if !out && self.plan[q].is_none() {
                return Err(Error::InvalidGraph(format!("qubit {q} has no plan")));
            }
        }
        if let Some(&q) = self.outputs.iter().find(|&&q| q >= n) {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
        Ok(())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn plan(&self, qubit: usize) -> Option<Basis> {
        self.plan[qubit]
    }

    pub fn outputs(&self) -> &BTreeSet<usize> {
        &self.outputs
    }

    pub fn logical_qubits(&self) -> usize {
        self.chains.len()
    }
}

#[derive(Serialize, Deserialize)]
struct PlanEntryJson {
    qubit: usize,
    basis: Basis,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    graph: Graph,
    chains: Vec<Vec<usize>>,
    plan: Vec<PlanEntryJson>,
    outputs: Vec<usize>,
}

impl Serialize for MeasurementPattern {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let plan = (0..self.graph.n())
            .filter_map(|q| self.plan[q].map(|basis| PlanEntryJson { qubit: q, basis }))
            .collect();
        PatternJson {
            graph: self.graph.clone(),
            chains: self.chains.clone(),
            plan,
            outputs: self.outputs.iter().copied().collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MeasurementPattern {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = PatternJson::deserialize(de)?;
        let mut plan = vec![None; raw.graph.n()];
        for e in &raw.plan {
            if e.qubit >= plan.len() {
                return Err(D::Error::custom(format!("plan qubit {} out of range", e.qubit)));
            }
            if plan[e.qubit].replace(e.basis).is_some() {
                return Err(D::Error::custom(format!("qubit {} planned twice", e.qubit)));
            }
        }
        MeasurementPattern::new(
            raw.graph,
            raw.chains,
            plan,
            raw.outputs.into_iter().collect(),
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Input,
    Gate1,
    Gate2,
    Measure,
}

/// The circuit's wiring diagram as a graph: a vertex per input, gate and
/// final measurement, an edge per wire segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitGraph {
    pub graph: Graph,
    pub roles: Vec<Role>,
}
