//! Exact dense state vectors. Ground truth for everything else at small n.
//!
//! Qubit ordering is little-endian throughout the crate: qubit k is bit k of
//! the basis index. Nothing here scales past the dense cap; this module is a
//! reference oracle, not a simulator.

use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph};
use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub type Mat2 = Matrix2<Complex64>;

pub const SCHMIDT_REL_TOL: f64 = 1e-10;
pub const DEGENERATE_FLOOR: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit measurement basis. The planar bases are
/// {(|0> + (-1)^m e^{i a}|1>)/sqrt(2)}; x is a = 0, y is a = pi/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Basis {
    X,
    Y,
    Z,
    Angle(f64),
}

impl Basis {
    /// Equator angle for planar bases, None for z.
    pub fn plane_angle(&self) -> Option<f64> {
        match self {
            Basis::X => Some(0.0),
            Basis::Y => Some(std::f64::consts::FRAC_PI_2),
            Basis::Angle(a) => Some(*a),
            Basis::Z => None,
        }
    }

    /// Basis vector for outcome m.
    pub fn vector(&self, m: u8) -> Vector2<Complex64> {
        assert!(m < 2);
        match self.plane_angle() {
            None => {
                if m == 0 {
                    Vector2::new(c(1.0, 0.0), c(0.0, 0.0))
                } else {
                    Vector2::new(c(0.0, 0.0), c(1.0, 0.0))
                }
            }
            Some(a) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let phase = Complex64::from_polar(s, a);
                Vector2::new(c(s, 0.0), if m == 0 { phase } else { -phase })
            }
        }
    }

    pub fn projector(&self, m: u8) -> Mat2 {
        let v = self.vector(m);
        v * v.adjoint()
    }
}

impl Serialize for Basis {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Basis::X => ser.serialize_str("x"),
            Basis::Y => ser.serialize_str("y"),
            Basis::Z => ser.serialize_str("z"),
            Basis::Angle(a) => ser.serialize_str(&format!("angle {a}")),
        }
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        match s.as_str() {
            "x" => Ok(Basis::X),
            "y" => Ok(Basis::Y),
            "z" => Ok(Basis::Z),
            other => {
                if let Some(num) = other.strip_prefix("angle ") {
                    num.parse::<f64>()
                        .map(Basis::Angle)
                        .map_err(|_| serde::de::Error::custom(format!("bad angle `{num}`")))
                } else {
                    Err(serde::de::Error::custom(format!("unknown basis `{other}`")))
                }
            }
        }
    }
}

/// One POVM element acting on one qubit: Hermitian, PSD, at most identity.
#[derive(Clone, Debug)]
pub struct PovmElement {
    pub qubit: usize,
    matrix: Mat2,
}

impl PovmElement {
    pub fn new(qubit: usize, matrix: Mat2) -> Result<Self> {
        if (matrix[(0, 1)] - matrix[(1, 0)].conj()).norm() > HERMITIAN_TOL
            || matrix[(0, 0)].im.abs() > HERMITIAN_TOL
            || matrix[(1, 1)].im.abs() > HERMITIAN_TOL
        {
            return Err(Error::InvalidPovm("not Hermitian".into()));
        }
        let (lo, hi) = hermitian_eigenvalues(&matrix);
        if lo < -HERMITIAN_TOL || hi > 1.0 + HERMITIAN_TOL {
            return Err(Error::InvalidPovm(format!(
                "eigenvalues [{lo:.3e}, {hi:.3e}] outside [0, 1]"
            )));
        }
        Ok(PovmElement { qubit, matrix })
    }

    pub fn identity(qubit: usize) -> Self {
        PovmElement {
            qubit,
            matrix: Mat2::identity(),
        }
    }

    pub fn basis_projector(qubit: usize, basis: Basis, m: u8) -> Self {
        PovmElement {
            qubit,
            matrix: basis.projector(m),
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Principal square root, via the 2x2 identity
    /// sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
    pub fn sqrt_matrix(&self) -> Mat2 {
        let det = (self.matrix[(0, 0)] * self.matrix[(1, 1)]
            - self.matrix[(0, 1)] * self.matrix[(1, 0)])
            .re
            .max(0.0);
        let tr = (self.matrix[(0, 0)] + self.matrix[(1, 1)]).re;
        let denom = (tr + 2.0 * det.sqrt()).sqrt();
        if denom < 1e-15 {
            return Mat2::zeros();
        }
        (self.matrix + Mat2::identity() * c(det.sqrt(), 0.0)) / c(denom, 0.0)
    }
}

fn hermitian_eigenvalues(m: &Mat2) -> (f64, f64) {
    let mid = (m[(0, 0)] + m[(1, 1)]).re / 2.0;
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let r = (mid * mid - det).max(0.0).sqrt();
    (mid - r, mid + r)
}

/// Common single-qubit unitaries. Rz(a) = diag(1, e^{ia}); Rx(a) = H Rz(a) H,
/// so Rx(pi) is exactly X with no stray global phase.
pub mod gate {
    use super::{c, Mat2};

    pub fn i() -> Mat2 {
        Mat2::identity()
    }

    pub fn h() -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::new(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0))
    }

    pub fn x() -> Mat2 {
        Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn y() -> Mat2 {
        Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
    }

    pub fn z() -> Mat2 {
        Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
    }

    pub fn rz(a: f64) -> Mat2 {
        Mat2::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            num_complex::Complex64::from_polar(1.0, a),
        )
    }

    pub fn rx(a: f64) -> Mat2 {
        h() * rz(a) * h()
    }

    /// sqrt(-iX), the vertex half of the local-complementation Clifford.
    pub fn sqrt_neg_ix() -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::new(c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0))
    }

    /// sqrt(iZ), applied to each neighbor under local complementation.
    pub fn sqrt_iz() -> Mat2 {
        let q = std::f64::consts::FRAC_PI_4;
        Mat2::new(
            num_complex::Complex64::from_polar(1.0, q),
            c(0.0, 0.0),
            c(0.0, 0.0),
            num_complex::Complex64::from_polar(1.0, -q),
        )
    }
}

#[derive(Clone)]
pub struct StateVector {
    n: usize,
    amp: Vec<Complex64>,
}

impl StateVector {
    pub fn basis_state(n: usize, index: usize) -> Self {
        let mut amp = vec![c(0.0, 0.0); 1 << n];
        amp[index] = c(1.0, 0.0);
        StateVector { n, amp }
    }

    pub fn plus_state(n: usize) -> Self {
        let a = 2f64.powf(-(n as f64) / 2.0);
        StateVector {
            n,
            amp: vec![c(a, 0.0); 1 << n],
        }
    }

    pub fn from_amplitudes(n: usize, amp: Vec<Complex64>) -> Self {
        assert_eq!(amp.len(), 1 << n);
        StateVector { n, amp }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amp[index]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sq(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> StateVector {
        let norm = self.norm_sq().sqrt();
        StateVector {
            n: self.n,
            amp: self.amp.iter().map(|a| a / norm).collect(),
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest |<self|e^{i phi} other>| over phases; 1 means equal up to
    /// global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        // other's qubits go above self's: index = hi << self.n | lo
        let mut amp = Vec::with_capacity(1 << (self.n + other.n));
        for hi in &other.amp {
            for lo in &self.amp {
                amp.push(hi * lo);
            }
        }
        StateVector {
            n: self.n + other.n,
            amp,
        }
    }

    pub fn apply_single_qubit(&self, q: usize, u: &Mat2) -> Result<StateVector> {
        self.check_qubit(q)?;
        let dev = (u.adjoint() * u - Mat2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > UNITARY_TOL {
            return Err(Error::NonUnitary);
        }
        Ok(self.apply_matrix_unchecked(q, u))
    }

    /// Same action without the unitarity gate, for projectors and POVM
    /// square roots. Output is generally unnormalized.
    pub fn apply_matrix_unchecked(&self, q: usize, m: &Mat2) -> StateVector {
        let mut amp = self.amp.clone();
        let step = 1usize << q;
        for base in 0..self.amp.len() {
            if base & step == 0 {
                let a = self.amp[base];
                let b = self.amp[base | step];
                amp[base] = m[(0, 0)] * a + m[(0, 1)] * b;
                amp[base | step] = m[(1, 0)] * a + m[(1, 1)] * b;
            }
        }
        StateVector { n: self.n, amp }
    }

    pub fn apply_cz(&self, q1: usize, q2: usize) -> Result<StateVector> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        assert_ne!(q1, q2);
        let mut amp = self.amp.clone();
        let mask = (1usize << q1) | (1 << q2);
        for (i, a) in amp.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
        Ok(StateVector { n: self.n, amp })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange {
                index: q,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Probability of elements applied jointly: tr((⊗E) |psi><psi|).
    /// Qubits not named get the identity; naming a qubit twice is an error.
    pub fn born_probability(&self, elements: &[PovmElement]) -> Result<f64> {
        let mut seen = vec![false; self.n];
        let mut phi = self.clone();
        for e in elements {
            self.check_qubit(e.qubit)?;
            if seen[e.qubit] {
                return Err(Error::InvalidPovm(format!(
                    "qubit {} named twice",
                    e.qubit
                )));
            }
            seen[e.qubit] = true;
            phi = phi.apply_matrix_unchecked(e.qubit, &e.matrix);
        }
        Ok(self.inner(&phi).re)
    }

    /// Generalized measurement by one POVM element: probability and the
    /// normalized post-state via sqrt(E).
    pub fn apply_povm_element(&self, e: &PovmElement) -> Result<(f64, StateVector)> {
        self.check_qubit(e.qubit)?;
        let post = self.apply_matrix_unchecked(e.qubit, &e.sqrt_matrix());
        let p = post.norm_sq();
        if p < DEGENERATE_FLOOR {
            return Err(Error::DegenerateBranch { probability: p });
        }
        Ok((p, post.normalized()))
    }

    fn project(&self, q: usize, basis: &Basis, m: u8) -> (f64, StateVector) {
        let post = self.apply_matrix_unchecked(q, &basis.projector(m));
        (post.norm_sq(), post)
    }

    /// Projective measurement with a forced outcome, for deterministic
    /// branch replay.
    pub fn measure_forced(
        &self,
        q: usize,
        basis: &Basis,
        outcome: u8,
    ) -> Result<(f64, StateVector)> {
        self.check_qubit(q)?;
        let (p, post) = self.project(q, basis, outcome);
        if p < DEGENERATE_FLOOR {
            return Err(Error::DegenerateBranch { probability: p });
        }
        Ok((p, post.normalized()))
    }

    pub fn measure_sampled(
        &self,
        q: usize,
        basis: &Basis,
        rng: &mut impl Rng,
    ) -> Result<(u8, f64, StateVector)> {
        self.check_qubit(q)?;
        let (p0, post0) = self.project(q, basis, 0);
        if rng.gen::<f64>() < p0 {
            Ok((0, p0, post0.normalized()))
        } else {
            let (p1, post1) = self.project(q, basis, 1);
            Ok((1, p1, post1.normalized()))
        }
    }

    /// Project qubit q onto |keep> in the z basis and drop the qubit.
    /// Unnormalized: the squared norm of the result is the branch
    /// probability.
    pub fn collapse_qubit(&self, q: usize, keep: u8) -> StateVector {
        assert!(q < self.n);
        let step = 1usize << q;
        let low = step - 1;
        let mut amp = Vec::with_capacity(1 << (self.n - 1));
        for i in 0..1usize << (self.n - 1) {
            let full = (i & low) | ((i & !low) << 1) | if keep == 1 { step } else { 0 };
            amp.push(self.amp[full]);
        }
        StateVector {
            n: self.n - 1,
            amp,
        }
    }

    /// Amplitude matrix of a bipartition: rows indexed by side-A bits
    /// (packed ascending), columns by side-B bits.
    pub fn bipartition_matrix(&self, p: &Bipartition) -> DMatrix<Complex64> {
        assert_eq!(p.n(), self.n);
        let a_bits: Vec<usize> = p.side_a().iter_ones().collect();
        let b_bits: Vec<usize> = p.side_b().iter_ones().collect();
        let rows = 1usize << a_bits.len();
        let cols = 1usize << b_bits.len();
        let mut m = DMatrix::zeros(rows, cols);
        for idx in 0..self.amp.len() {
            let mut r = 0;
            for (k, &bit) in a_bits.iter().enumerate() {
                r |= ((idx >> bit) & 1) << k;
            }
            let mut col = 0;
            for (k, &bit) in b_bits.iter().enumerate() {
                col |= ((idx >> bit) & 1) << k;
            }
            m[(r, col)] = self.amp[idx];
        }
        m
    }

    /// Schmidt rank across p: singular values above tol * (largest).
    pub fn schmidt_rank(&self, p: &Bipartition, tol: f64) -> usize {
        let m = self.bipartition_matrix(p);
        let sv = m.singular_values();
        let max = sv.iter().cloned().fold(0.0f64, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * max).count()
    }
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StateVector(n={}, norm²={:.6})", self.n, self.norm_sq())
    }
}

/// The graph state of g: amplitude of basis x is
/// 2^{-n/2} (-1)^{sum over edges (u,v) of x_u x_v}.
pub fn graph_state(g: &Graph, cap: usize) -> Result<StateVector> {
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "dense state",
            limit: cap,
            requested: n,
        });
    }
    let scale = 2f64.powf(-(n as f64) / 2.0);
    let edges = g.edges();
    let amp = (0..1usize << n)
        .map(|x| {
            let mut sign = 1.0;
            for &(u, v) in &edges {
                if x >> u & 1 == 1 && x >> v & 1 == 1 {
                    sign = -sign;
                }
            }
            c(scale * sign, 0.0)
        })
        .collect();
    Ok(StateVector { n, amp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_graphs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const CAP: usize = 14;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn graph_state_small_examples() {
        let s = graph_state(&Graph::empty(1), CAP).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitude(0), c(r, 0.0)));
        assert!(close(s.amplitude(1), c(r, 0.0)));

        let k2 = graph_state(&Graph::complete(2), CAP).unwrap();
        for (idx, want) in [(0, 0.5), (1, 0.5), (2, 0.5), (3, -0.5)] {
            assert!(close(k2.amplitude(idx), c(want, 0.0)));
        }

        let tri = graph_state(&Graph::complete(3), CAP).unwrap();
        let a = 8f64.sqrt().recip();
        for x in 0..8usize {
            let (x0, x1, x2) = (x & 1, x >> 1 & 1, x >> 2 & 1);
            let sign = if (x0 * x1 + x1 * x2 + x0 * x2) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            assert!(close(tri.amplitude(x), c(a * sign, 0.0)), "x = {x}");
        }
    }

    #[test]
    fn graph_state_matches_sequential_cz_oracle() {
        for n in 1..=4 {
            for g in all_graphs(n) {
                let direct = graph_state(&g, CAP).unwrap();
                let mut built = StateVector::plus_state(n);
                for (u, v) in g.edges() {
                    built = built.apply_cz(u, v).unwrap();
                }
                for x in 0..1usize << n {
                    assert!(close(direct.amplitude(x), built.amplitude(x)), "{g:?}");
                }
            }
        }
    }

    #[test]
    fn cz_order_is_irrelevant_and_cz_squares_to_identity() {
        let g = Graph::cycle(5);
        let mut fwd = StateVector::plus_state(5);
        for (u, v) in g.edges() {
            fwd = fwd.apply_cz(u, v).unwrap();
        }
        let mut rev = StateVector::plus_state(5);
        for (u, v) in g.edges().into_iter().rev() {
            rev = rev.apply_cz(u, v).unwrap();
        }
        assert!((fwd.inner(&rev).re - 1.0).abs() < 1e-12);

        let twice = fwd.apply_cz(0, 1).unwrap().apply_cz(0, 1).unwrap();
        assert!((fwd.inner(&twice).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_takes_zero_to_plus() {
        let s = StateVector::basis_state(1, 0)
            .apply_single_qubit(0, &gate::h())
            .unwrap();
        assert!(close(s.amplitude(0), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitude(1), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn non_unitary_rejected() {
        let bad = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0));
        assert!(matches!(
            StateVector::plus_state(1).apply_single_qubit(0, &bad),
            Err(Error::NonUnitary)
        ));
    }

    #[test]
    fn local_complement_unitary_oracle() {
        // sqrt(-iX) on v and sqrt(iZ) on each neighbor sends |g> to |LC_v(g)>
        // up to global phase
        for g in [
            Graph::path(3),
            Graph::complete(4),
            Graph::cycle(5),
            Graph::star(4),
        ] {
            for v in 0..g.n() {
                let mut s = graph_state(&g, CAP).unwrap();
                s = s.apply_single_qubit(v, &gate::sqrt_neg_ix()).unwrap();
                for u in g.neighbors(v) {
                    s = s.apply_single_qubit(u, &gate::sqrt_iz()).unwrap();
                }
                let target = graph_state(&g.local_complement(v).unwrap(), CAP).unwrap();
                assert!(s.fidelity(&target) > 1.0 - 1e-10, "{g:?} v={v}");
            }
        }
    }

    #[test]
    fn schmidt_rank_examples() {
        let p = Bipartition::new(3, &[0]).unwrap();
        assert_eq!(
            StateVector::basis_state(3, 0).schmidt_rank(&p, SCHMIDT_REL_TOL),
            1
        );

        for n in 2..=6 {
            let s = graph_state(&Graph::complete(n), CAP).unwrap();
            for mask in 1..(1u32 << n) - 1 {
                let p = Bipartition::from_mask(crate::bits::BitVec::from_indices(
                    n,
                    &(0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>(),
                ))
                .unwrap();
                assert_eq!(s.schmidt_rank(&p, SCHMIDT_REL_TOL), 2, "K_{n} mask {mask}");
            }
        }

        let c6 = graph_state(&Graph::cycle(6), CAP).unwrap();
        let p = Bipartition::new(6, &[0, 1, 2]).unwrap();
        assert_eq!(c6.schmidt_rank(&p, SCHMIDT_REL_TOL), 4);
    }

    #[test]
    fn measurement_basics() {
        let plus = StateVector::plus_state(1);
        let (p, post) = plus.measure_forced(0, &Basis::Z, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(close(post.amplitude(0), c(1.0, 0.0)));

        // K2: z on qubit 0 with outcome 0 leaves |+> on qubit 1
        let k2 = graph_state(&Graph::complete(2), CAP).unwrap();
        let (p, post) = k2.measure_forced(0, &Basis::Z, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(post.amplitude(0), c(r, 0.0)));
        assert!(close(post.amplitude(2), c(r, 0.0)));

        // P3: z on the middle matches deleting the middle vertex
        let p3 = graph_state(&Graph::path(3), CAP).unwrap();
        let (p, post) = p3.measure_forced(1, &Basis::Z, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let survivors = graph_state(&Graph::empty(2), CAP).unwrap();
        let collapsed = post.collapse_qubit(1, 0).normalized();
        assert!(collapsed.fidelity(&survivors) > 1.0 - 1e-12);
    }

    #[test]
    fn forced_degenerate_branch_errors() {
        let zero = StateVector::basis_state(1, 0);
        assert!(matches!(
            zero.measure_forced(0, &Basis::Z, 1),
            Err(Error::DegenerateBranch { .. })
        ));
    }

    #[test]
    fn sampling_follows_forced_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = graph_state(&Graph::path(3), CAP).unwrap();
        let mut counts = [0usize; 2];
        for _ in 0..2000 {
            let (m, p, _) = s.measure_sampled(0, &Basis::X, &mut rng).unwrap();
            counts[m as usize] += 1;
            assert!((p - 0.5).abs() < 1e-12);
        }
        assert!(counts[0] > 800 && counts[1] > 800);
    }

    #[test]
    fn born_probability_examples() {
        let k3 = graph_state(&Graph::complete(3), CAP).unwrap();
        assert!((k3.born_probability(&[]).unwrap() - 1.0).abs() < 1e-12);

        let plus = StateVector::plus_state(1);
        let e = PovmElement::basis_projector(0, Basis::Z, 0);
        assert!((plus.born_probability(&[e]).unwrap() - 0.5).abs() < 1e-12);

        let zeros: Vec<PovmElement> = (0..3)
            .map(|q| PovmElement::basis_projector(q, Basis::Z, 0))
            .collect();
        assert!((k3.born_probability(&zeros).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn complete_projective_outcomes_sum_to_one() {
        let s = graph_state(&Graph::cycle(5), CAP).unwrap();
        let mut total = 0.0;
        for outcome in 0..1usize << 5 {
            let elements: Vec<PovmElement> = (0..5)
                .map(|q| PovmElement::basis_projector(q, Basis::X, (outcome >> q & 1) as u8))
                .collect();
            total += s.born_probability(&elements).unwrap();
        }
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn povm_validation_and_sqrt() {
        assert!(PovmElement::new(0, Basis::X.projector(0)).is_ok());
        assert!(PovmElement::new(0, gate::x()).is_err()); // eigenvalue -1
        assert!(PovmElement::new(0, Mat2::identity() * c(2.0, 0.0)).is_err());
        assert!(PovmElement::new(0, Mat2::new(c(1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0))).is_err());

        let e = PovmElement::new(0, Mat2::new(c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)))
            .unwrap();
        let s = e.sqrt_matrix();
        let dev = (s * s - e.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn single_qubit_measurement_never_raises_schmidt_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [Graph::cycle(5), Graph::complete(4), Graph::path(5)] {
            let s = graph_state(&g, CAP).unwrap();
            for _ in 0..20 {
                let q = rng.gen_range(0..g.n());
                let basis = match rng.gen_range(0..3) {
                    0 => Basis::X,
                    1 => Basis::Z,
                    _ => Basis::Angle(rng.gen::<f64>() * std::f64::consts::TAU),
                };
                let forced = rng.gen_range(0..2) as u8;
                let post = match s.measure_forced(q, &basis, forced) {
                    Ok((_, post)) => post,
                    Err(_) => continue,
                };
                for mask in 1..(1u32 << g.n()) - 1 {
                    let side: Vec<usize> = (0..g.n()).filter(|&i| mask >> i & 1 == 1).collect();
                    let p = Bipartition::new(g.n(), &side).unwrap();
                    assert!(
                        post.schmidt_rank(&p, SCHMIDT_REL_TOL)
                            <= s.schmidt_rank(&p, SCHMIDT_REL_TOL)
                    );
                }
            }
        }
    }

    #[test]
    fn basis_serde_round_trips() {
        for b in [Basis::X, Basis::Y, Basis::Z, Basis::Angle(1.234567890123)] {
            let s = serde_json::to_string(&b).unwrap();
            let back: Basis = serde_json::from_str(&s).unwrap();
            assert_eq!(b, back);
        }
        assert_eq!(serde_json::to_string(&Basis::Z).unwrap(), r#""z""#);
        let y: Basis = serde_json::from_str(r#""angle 0.5""#).unwrap();
        assert_eq!(y, Basis::Angle(0.5));
        assert!(serde_json::from_str::<Basis>(r#""w""#).is_err());
    }
}
