//! Circuit-to-pattern compilation and the circuit wiring graph.

use super::{CircuitGraph, MeasurementPattern, Role};
use crate::circuit::{j_steps, CircuitIR, Gate};
use crate::dense::Basis;
use crate::error::{Error, Result};
use crate::graph::Graph;
use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

/// One vertex per input, gate and final measurement, one edge per wire
/// segment. Back-to-back repeated CZ on the same pair would need a parallel
/// edge, which a simple graph cannot carry.
pub fn build_circuit_graph(c: &CircuitIR) -> Result<CircuitGraph> {
    let n = c.qubits();
    let mut roles: Vec<Role> = vec![Role::Input; n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut last: Vec<usize> = (0..n).collect();
    for gate in c.gates() {
        let v = roles.len();
        match gate {
            Gate::U { target, .. } => {
                roles.push(Role::Gate1);
                edges.push((last[*target], v));
                last[*target] = v;
            }
            Gate::Cz { a, b } => {
                if last[*a] == last[*b] {
                    return Err(Error::InvalidCircuit(format!(
                        "repeated cz on {a},{b} needs a parallel wire edge"
                    )));
                }
                roles.push(Role::Gate2);
                edges.push((last[*a], v));
                edges.push((last[*b], v));
                last[*a] = v;
                last[*b] = v;
            }
        }
    }
    for &wire in &last {
        let v = roles.len();
        roles.push(Role::Measure);
        edges.push((wire, v));
    }
    let graph = Graph::from_edges(roles.len(), &edges)?;
    Ok(CircuitGraph { graph, roles })
}

/// Measurement angle reduced to a named basis where one exists. The plan
/// stores the negated step angle: measuring at angle a realizes H Rz(-a)
/// on the chain, so a step J(theta) plans angle -theta.
fn plan_basis(step: f64) -> Basis {
    let mut a = (-step) % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    if a.abs() < 1e-12 {
        Basis::X
    } else if (a - FRAC_PI_2).abs() < 1e-12 {
        Basis::Y
    } else {
        Basis::Angle(a)
    }
}

struct PatternBuilder {
    edges: Vec<(usize, usize)>,
    chains: Vec<Vec<usize>>,
    plan: Vec<Option<Basis>>,
    next: usize,
}

impl PatternBuilder {
    fn new(qubits: usize) -> Self {
        PatternBuilder {
            edges: Vec::new(),
            chains: (0..qubits).map(|q| vec![q]).collect(),
            plan: vec![None; qubits],
            next: qubits,
        }
    }

    fn front(&self, chain: usize) -> usize {
        *self.chains[chain].last().unwrap()
    }

    /// Extend the chain by a fresh unplanned qubit; returns (old front, new).
    fn advance(&mut self, chain: usize) -> (usize, usize) {
        let f = self.front(chain);
        let w = self.next;
        self.next += 1;
        self.plan.push(None);
        self.edges.push((f, w));
        self.chains[chain].push(w);
        (f, w)
    }

    /// Measure the current front at the planned basis and extend the chain
    /// by a fresh qubit the logical state teleports into.
    fn step(&mut self, chain: usize, basis: Basis) {
        let (f, _) = self.advance(chain);
        self.plan[f] = Some(basis);
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b)) || self.edges.contains(&(b, a))
    }

    fn apply(&mut self, gate: &Gate, downstream: bool) {
        let basis_for = |step: f64| if downstream { Basis::Z } else { plan_basis(step) };
        match gate {
            Gate::U { target, matrix } => {
                for theta in j_steps(matrix) {
                    self.step(*target, basis_for(theta));
                }
            }
            Gate::Cz { a, b } => {
                // a repeated CZ on unmoved fronts pads chain `a` with an
                // identity (two J(0) steps) so the graph stays simple
                if self.has_edge(self.front(*a), self.front(*b)) {
                    self.step(*a, basis_for(0.0));
                    self.step(*a, basis_for(0.0));
                }
                self.edges.push((self.front(*a), self.front(*b)));
            }
        }
    }

    fn finish(self, outputs: BTreeSet<usize>) -> Result<MeasurementPattern> {
        let graph = Graph::from_edges(self.next, &self.edges)?;
        MeasurementPattern::new(graph, self.chains, self.plan, outputs)
    }
}

/// Compiles a circuit to a measurement pattern: every single-qubit gate
/// becomes at most three measured chain steps, every CZ one inter-chain
/// edge. Chain ends are the outputs.
pub fn compile_to_pattern(c: &CircuitIR) -> Result<MeasurementPattern> {
    let mut b = PatternBuilder::new(c.qubits());
    for gate in c.gates() {
        b.apply(gate, false);
    }
    let outputs = (0..c.qubits()).map(|q| b.front(q)).collect();
    b.finish(outputs)
}

/// Splices one output qubit per chain right after the given gate prefix and
/// re-plans everything downstream as z measurements. Running the result
/// leaves the spliced qubits holding the circuit's state after the prefix,
/// up to the tracked Pauli frame and one H per chain (the link step).
pub fn insert_output_qubits(c: &CircuitIR, cut: usize) -> Result<MeasurementPattern> {
    if cut > c.gates().len() {
        return Err(Error::InvalidPrefix {
            cut,
            gates: c.gates().len(),
        });
    }
    let mut b = PatternBuilder::new(c.qubits());
    for gate in &c.gates()[..cut] {
        b.apply(gate, false);
    }
    let mut outputs = BTreeSet::new();
    for q in 0..c.qubits() {
        // link step: J(0) = H teleports the prefix state into the splice
        b.step(q, Basis::X);
        outputs.insert(b.front(q));
    }
    for gate in &c.gates()[cut..] {
        let touched = match gate {
            Gate::U { target, .. } => vec![*target],
            Gate::Cz { a, b } => vec![*a, *b],
        };
        for q in touched {
            // nothing may attach at a spliced output; move past it first
            if outputs.contains(&b.front(q)) {
                b.advance(q);
            }
        }
        b.apply(gate, true);
    }
    for q in 0..b.plan.len() {
        if !outputs.contains(&q) && b.plan[q].is_none() {
            b.plan[q] = Some(Basis::Z);
        }
    }
    b.finish(outputs)
}
