//! Circuit IR: single-qubit unitaries and CZ gates on |+>-initialized
//! registers, with a per-qubit final measurement basis.

use crate::dense::{gate, Basis, Mat2, PovmElement, StateVector, UNITARY_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    U { target: usize, matrix: Mat2 },
    Cz { a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitIR {
    qubits: usize,
    gates: Vec<Gate>,
    measure: Vec<Basis>,
}

impl CircuitIR {
    pub fn new(qubits: usize, gates: Vec<Gate>, measure: Vec<Basis>) -> Result<Self> {
        if measure.len() != qubits {
            return Err(Error::InvalidCircuit(format!(
                "{} final measurements for {qubits} qubits",
                measure.len()
            )));
        }
        for (i, gate) in gates.iter().enumerate() {
            match gate {
                Gate::U { target, matrix } => {
                    if *target >= qubits {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i} targets qubit {target} of {qubits}"
                        )));
                    }
                    let gram = matrix.adjoint() * matrix;
                    let dev = (gram - Mat2::identity())
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0f64, f64::max);
                    if dev > UNITARY_TOL {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i} is not unitary (deviation {dev:.2e})"
                        )));
                    }
                }
                Gate::Cz { a, b } => {
                    if *a >= qubits || *b >= qubits || a == b {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i} connects {a} and {b} on {qubits} qubits"
                        )));
                    }
                }
            }
        }
        Ok(CircuitIR {
            qubits,
            gates,
            measure,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measure(&self) -> &[Basis] {
        &self.measure
    }

    /// State after running every gate on the |+>^n register, measurements
    /// not yet applied.
    pub fn run_dense(&self, cap: usize) -> Result<StateVector> {
        self.run_prefix_dense(self.gates.len(), cap)
    }

    /// Same, stopping after the first `cut` gates.
    pub fn run_prefix_dense(&self, cut: usize, cap: usize) -> Result<StateVector> {
        if cut > self.gates.len() {
            return Err(Error::InvalidPrefix {
                cut,
                gates: self.gates.len(),
            });
        }
        if self.qubits > cap {
            return Err(Error::CapExceeded {
                what: "dense circuit run",
                limit: cap,
                requested: self.qubits,
            });
        }
        let mut s = StateVector::plus_state(self.qubits);
        for gate in &self.gates[..cut] {
            match gate {
                Gate::U { target, matrix } => s = s.apply_single_qubit(*target, matrix)?,
                Gate::Cz { a, b } => s = s.apply_cz(*a, *b)?,
            }
        }
        Ok(s)
    }

    /// Exact joint distribution of the final measurements, indexed by the
    /// packed outcome bits.
    pub fn final_distribution(&self, cap: usize) -> Result<Vec<f64>> {
        let s = self.run_dense(cap)?;
        let mut out = Vec::with_capacity(1 << self.qubits);
        for bits in 0..1usize << self.qubits {
            let els: Vec<PovmElement> = (0..self.qubits)
                .map(|q| PovmElement::basis_projector(q, self.measure[q], (bits >> q & 1) as u8))
                .collect();
            out.push(s.born_probability(&els)?);
        }
        Ok(out)
    }
}

// {"qubits": n, "gates": [...], "measure": ["z", ...]} with each gate either
// {"kind": "u", "target": t, "matrix": [[re,im]x4 row-major]} or
// {"kind": "cz", "targets": [a, b]}
#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    targets: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<[[f64; 2]; 4]>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    qubits: usize,
    gates: Vec<GateJson>,
    measure: Vec<Basis>,
}

impl Serialize for CircuitIR {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::U { target, matrix } => GateJson {
                    kind: "u".into(),
                    target: Some(*target),
                    targets: None,
                    matrix: Some([
                        [matrix[(0, 0)].re, matrix[(0, 0)].im],
                        [matrix[(0, 1)].re, matrix[(0, 1)].im],
                        [matrix[(1, 0)].re, matrix[(1, 0)].im],
                        [matrix[(1, 1)].re, matrix[(1, 1)].im],
                    ]),
                },
                Gate::Cz { a, b } => GateJson {
                    kind: "cz".into(),
                    target: None,
                    targets: Some([*a, *b]),
                    matrix: None,
                },
            })
            .collect();
        CircuitJson {
            qubits: self.qubits,
            gates,
            measure: self.measure.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CircuitIR {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = CircuitJson::deserialize(de)?;
        let mut gates = Vec::with_capacity(raw.gates.len());
        for (i, g) in raw.gates.iter().enumerate() {
            match g.kind.as_str() {
                "u" => {
                    let target = g
                        .target
                        .ok_or_else(|| D::Error::custom(format!("gate {i}: missing target")))?;
                    let m = g
                        .matrix
                        .ok_or_else(|| D::Error::custom(format!("gate {i}: missing matrix")))?;
                    let c = |k: usize| Complex64::new(m[k][0], m[k][1]);
                    gates.push(Gate::U {
                        target,
                        matrix: Mat2::new(c(0), c(1), c(2), c(3)),
                    });
                }
                "cz" => {
                    let [a, b] = g
                        .targets
                        .ok_or_else(|| D::Error::custom(format!("gate {i}: missing targets")))?;
                    gates.push(Gate::Cz { a, b });
                }
                other => return Err(D::Error::custom(format!("gate {i}: unknown kind {other}"))),
            }
        }
        CircuitIR::new(raw.qubits, gates, raw.measure).map_err(D::Error::custom)
    }
}

/// Angles (a, b, c) with u proportional to Rz(a) * Rx(b) * Rz(c).
pub fn zxz(u: &Mat2) -> (f64, f64, f64) {
    let b = 2.0 * u[(1, 0)].norm().atan2(u[(0, 0)].norm());
    if u[(1, 0)].norm() < 1e-12 {
        // diagonal up to phase
        let theta = (u[(1, 1)] / u[(0, 0)]).arg();
        return (theta, 0.0, 0.0);
    }
    if u[(0, 0)].norm() < 1e-12 {
        // antidiagonal: b = pi, split of a+c is a free phase choice
        let a = u[(1, 0)].arg() + std::f64::consts::FRAC_PI_2;
        let c = u[(0, 1)].arg() + std::f64::consts::FRAC_PI_2;
        return (a, std::f64::consts::PI, c);
    }
    let strip = Complex64::from_polar(1.0, -u[(0, 0)].arg());
    let a = (u[(1, 0)] * strip).arg() + std::f64::consts::FRAC_PI_2;
    let c = (u[(0, 1)] * strip).arg() + std::f64::consts::FRAC_PI_2;
    (a, b, c)
}

/// Chain angles realizing u as a product of J(theta) = H * Rz(theta) steps,
/// first entry measured first. Diagonal and X-rotation gates take two steps,
/// H * diagonal one, anything else three. Empty when u is a global phase.
pub fn j_steps(u: &Mat2) -> Vec<f64> {
    let phase_fid = |m: &Mat2| (m[(0, 0)] + m[(1, 1)]).norm() / 2.0;
    let off = |m: &Mat2| m[(0, 1)].norm().max(m[(1, 0)].norm());
    if off(u) < 1e-12 && phase_fid(u) > 1.0 - 1e-12 {
        return vec![];
    }
    let hu = gate::h() * u;
    if off(&hu) < 1e-12 {
        return vec![(hu[(1, 1)] / hu[(0, 0)]).arg()];
    }
    if off(u) < 1e-12 {
        return vec![(u[(1, 1)] / u[(0, 0)]).arg(), 0.0];
    }
    let huh = gate::h() * u * gate::h();
    if off(&huh) < 1e-12 {
        return vec![0.0, (huh[(1, 1)] / huh[(0, 0)]).arg()];
    }
    let (a, b, c) = zxz(&hu);
    vec![c, b, a]
}

/// Rebuilds the unitary a step list encodes; the compile path's oracle.
pub fn j_product(steps: &[f64]) -> Mat2 {
    let mut u = Mat2::identity();
    for &theta in steps {
        u = gate::h() * gate::rz(theta) * u;
    }
    u
}
