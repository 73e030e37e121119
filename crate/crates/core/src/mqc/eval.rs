//! Exact pattern evaluation by forced-outcome branch enumeration.
//!
//! Measurements on distinct qubits commute, so the schedule is free as long
//! as every entangling edge incident to a qubit lands before that qubit is
//! measured. The evaluator plays z-planned qubits first (each deletes its
//! vertex and queues Z corrections on the neighbors), then walks the chains
//! with a lazily grown register: a qubit enters as |+> only when an edge or
//! a measurement needs it. Byproducts stay classical: an X^x Z^z frame per
//! chain, folded into later measurement angles and outcome labels instead of
//! ever touching the register.

use super::MeasurementPattern;
use crate::dense::{Basis, Mat2, PovmElement, StateVector};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Probability floor below which a forced branch is dropped as unreachable.
const BRANCH_FLOOR: f64 = 1e-12;

/// One forced-outcome run. `state` holds the surviving output qubits,
/// reordered so qubit k belongs to chain k; the recorded frame relates it
/// to the intended logical state as physical = X^x Z^z logical, with any
/// leftover physical Z corrections on outputs folded into z_frame.
#[derive(Clone, Debug)]
pub struct PatternBranch {
    pub probability: f64,
    /// (qubit, raw outcome) in schedule order, z stage first.
    pub outcomes: Vec<(usize, u8)>,
    pub state: StateVector,
    pub x_frame: Vec<u8>,
    pub z_frame: Vec<u8>,
}

struct Ctx<'a> {
    p: &'a MeasurementPattern,
    cap: usize,
    /// Chains truncated at their output; the z tail is gone by stage A.
    chains: Vec<Vec<usize>>,
    /// Chain index per surviving qubit, usize::MAX for z-planned ones.
    chain_of: Vec<usize>,
    /// Surviving edges that are not consecutive chain links, ascending.
    vertical: Vec<(usize, usize)>,
    vertical_at: Vec<Vec<usize>>,
    z_list: Vec<usize>,
}

#[derive(Clone)]
struct SchedState {
    reg: StateVector,
    /// slots[j] = pattern qubit sitting at register position j.
    slots: Vec<usize>,
    front: Vec<usize>,
    applied: Vec<bool>,
    pending_z: Vec<u8>,
    x: Vec<u8>,
    z: Vec<u8>,
    prob: f64,
    outcomes: Vec<(usize, u8)>,
}

fn prepare(p: &MeasurementPattern, cap: usize) -> Result<Ctx<'_>> {
    let n = p.graph().n();
    let mut z_mask = vec![false; n];
    let mut z_list = Vec::new();
    for (q, masked) in z_mask.iter_mut().enumerate() {
        if p.plan(q) == Some(Basis::Z) {
            *masked = true;
            z_list.push(q);
        }
    }
    let mut chains = Vec::with_capacity(p.chains().len());
    let mut chain_of = vec![usize::MAX; n];
    let mut pos_of = vec![usize::MAX; n];
    for (c, chain) in p.chains().iter().enumerate() {
        let outs: Vec<usize> = (0..chain.len())
            .filter(|&i| p.outputs().contains(&chain[i]))
            .collect();
        if outs.len() != 1 {
            return Err(Error::OutcomeSpec(format!(
                "chain {c} holds {} outputs, evaluation needs exactly one",
                outs.len()
            )));
        }
        let op = outs[0];
        for (i, &q) in chain.iter().enumerate() {
            let ok = if i < op {
                p.plan(q).and_then(|b| b.plane_angle()).is_some()
            } else if i == op {
                true
            } else {
                z_mask[q]
            };
            if !ok {
                return Err(Error::OutcomeSpec(format!(
                    "chain {c}: qubits need planar plans before the output and z after it, qubit {q} breaks this"
                )));
            }
        }
        for (i, &q) in chain[..=op].iter().enumerate() {
            chain_of[q] = c;
            pos_of[q] = i;
        }
        chains.push(chain[..=op].to_vec());
    }
    let mut vertical = Vec::new();
    let mut vertical_at = vec![Vec::new(); n];
    for (u, v) in p.graph().edges() {
        if z_mask[u] || z_mask[v] {
            continue;
        }
        if chain_of[u] == chain_of[v] && pos_of[u].abs_diff(pos_of[v]) == 1 {
            continue;
        }
        vertical_at[u].push(vertical.len());
        vertical_at[v].push(vertical.len());
        vertical.push((u, v));
    }
    Ok(Ctx {
        p,
        cap,
        chains,
        chain_of,
        vertical,
        vertical_at,
        z_list,
    })
}

fn slot_of(st: &SchedState, q: usize) -> usize {
    st.slots.iter().position(|&s| s == q).expect("active qubit")
}

fn ensure_active(ctx: &Ctx, st: &mut SchedState, q: usize) -> Result<()> {
    if st.slots.contains(&q) {
        return Ok(());
    }
    if st.slots.len() + 1 > ctx.cap {
        return Err(Error::CapExceeded {
            what: "pattern evaluation register",
            limit: ctx.cap,
            requested: st.slots.len() + 1,
        });
    }
    st.reg = st.reg.kron(&StateVector::plus_state(1));
    st.slots.push(q);
    Ok(())
}

fn is_front(ctx: &Ctx, st: &SchedState, q: usize) -> bool {
    let c = ctx.chain_of[q];
    c != usize::MAX && ctx.chains[c][st.front[c]] == q
}

/// Rows are the planar basis vectors at the given angle, so applying this
/// and collapsing in the computational basis measures that plane.
fn plane_rotation(beta: f64) -> Mat2 {
    let s = FRAC_1_SQRT_2;
    let e = Complex64::from_polar(s, -beta);
    Mat2::new(Complex64::new(s, 0.0), e, Complex64::new(s, 0.0), -e)
}

fn apply_ready_edges(ctx: &Ctx, st: &mut SchedState) -> Result<()> {
    for e in 0..ctx.vertical.len() {
        let (u, v) = ctx.vertical[e];
        if st.applied[e] || !is_front(ctx, st, u) || !is_front(ctx, st, v) {
            continue;
        }
        ensure_active(ctx, st, u)?;
        ensure_active(ctx, st, v)?;
        st.reg = st.reg.apply_cz(slot_of(st, u), slot_of(st, v))?;
        let (a, b) = (ctx.chain_of[u], ctx.chain_of[v]);
        st.z[a] ^= st.x[b];
        st.z[b] ^= st.x[a];
        st.applied[e] = true;
    }
    Ok(())
}

/// Lowest chain whose front can be measured: not the output, and every
/// cross edge at it already applied.
fn measurable_chain(ctx: &Ctx, st: &SchedState) -> Option<usize> {
    (0..ctx.chains.len()).find(|&c| {
        let f = st.front[c];
        if f + 1 == ctx.chains[c].len() {
            return false;
        }
        let q = ctx.chains[c][f];
        ctx.vertical_at[q].iter().all(|&e| st.applied[e])
    })
}

fn run_schedule(ctx: &Ctx, mut st: SchedState, out: &mut Vec<PatternBranch>) -> Result<()> {
    apply_ready_edges(ctx, &mut st)?;
    if let Some(c) = measurable_chain(ctx, &st) {
        let q = ctx.chains[c][st.front[c]];
        let next = ctx.chains[c][st.front[c] + 1];
        ensure_active(ctx, &mut st, q)?;
        ensure_active(ctx, &mut st, next)?;
        st.reg = st.reg.apply_cz(slot_of(&st, q), slot_of(&st, next))?;
        let alpha = ctx.p.plan(q).unwrap().plane_angle().unwrap();
        let beta = if st.x[c] == 1 { -alpha } else { alpha };
        let pos = slot_of(&st, q);
        let rotated = st.reg.apply_single_qubit(pos, &plane_rotation(beta))?;
        for m in 0..2u8 {
            let collapsed = rotated.collapse_qubit(pos, m);
            let p = collapsed.norm_sq();
            if p < BRANCH_FLOOR {
                continue;
            }
            let mut child = st.clone();
            child.reg = collapsed.normalized();
            child.slots.remove(pos);
            child.prob *= p;
            child.outcomes.push((q, m));
            let m_eff = m ^ st.pending_z[q];
            child.x[c] = m_eff ^ st.z[c];
            child.z[c] = st.x[c];
            child.front[c] += 1;
            run_schedule(ctx, child, out)?;
        }
        return Ok(());
    }
    if (0..ctx.chains.len()).all(|c| st.front[c] + 1 == ctx.chains[c].len()) {
        debug_assert!(st.applied.iter().all(|&a| a));
        return finalize(ctx, st, out);
    }
    let stuck: Vec<usize> = (0..ctx.chains.len())
        .map(|c| ctx.chains[c][st.front[c]])
        .collect();
    let waiting: Vec<(usize, usize)> = (0..ctx.vertical.len())
        .filter(|&e| !st.applied[e])
        .map(|e| ctx.vertical[e])
        .collect();
    Err(Error::PatternDeadlock(format!(
        "fronts {stuck:?} all wait on cross edges {waiting:?}"
    )))
}

fn finalize(ctx: &Ctx, mut st: SchedState, out: &mut Vec<PatternBranch>) -> Result<()> {
    let k = ctx.chains.len();
    for c in 0..k {
        ensure_active(ctx, &mut st, *ctx.chains[c].last().unwrap())?;
    }
    // z corrections queued on never-measured outputs become part of the
    // state here, and of the frame below; the two must move together
    let mut amp = vec![Complex64::new(0.0, 0.0); 1 << k];
    for idx in 0..1usize << k {
        let mut target = 0usize;
        let mut sign = 1.0;
        for (j, &q) in st.slots.iter().enumerate() {
            if (idx >> j) & 1 == 1 {
                target |= 1 << ctx.chain_of[q];
                if st.pending_z[q] == 1 {
                    sign = -sign;
                }
            }
        }
        amp[target] = st.reg.amplitude(idx) * sign;
    }
    let mut z_frame = st.z;
    for (c, chain) in ctx.chains.iter().enumerate() {
        z_frame[c] ^= st.pending_z[*chain.last().unwrap()];
    }
    out.push(PatternBranch {
        probability: st.prob,
        outcomes: st.outcomes,
        state: StateVector::from_amplitudes(k, amp),
        x_frame: st.x,
        z_frame,
    });
    Ok(())
}

fn z_stage(ctx: &Ctx, i: usize, st: SchedState, out: &mut Vec<PatternBranch>) -> Result<()> {
    if i == ctx.z_list.len() {
        return run_schedule(ctx, st, out);
    }
    let u = ctx.z_list[i];
    for m in 0..2u8 {
        let mut child = st.clone();
        child.prob *= 0.5;
        child.outcomes.push((u, m));
        if m == 1 {
            for v in ctx.p.graph().neighbors(u) {
                child.pending_z[v] ^= 1;
            }
        }
        z_stage(ctx, i + 1, child, out)?;
    }
    Ok(())
}

/// Enumerates every outcome branch, in a fixed order: z-planned qubits
/// ascending, then schedule order, outcome 0 before 1 at each fork. `cap`
/// bounds the simultaneously active register qubits.
pub fn evaluate_pattern(p: &MeasurementPattern, cap: usize) -> Result<Vec<PatternBranch>> {
    let ctx = prepare(p, cap)?;
    let k = ctx.chains.len();
    let base = SchedState {
        reg: StateVector::basis_state(0, 0),
        slots: Vec::new(),
        front: vec![0; k],
        applied: vec![false; ctx.vertical.len()],
        pending_z: vec![0; p.graph().n()],
        x: vec![0; k],
        z: vec![0; k],
        prob: 1.0,
        outcomes: Vec::new(),
    };
    let mut out = Vec::new();
    z_stage(&ctx, 0, base, &mut out)?;
    Ok(out)
}

/// Physical basis and outcome-flip bit that realize a logical measurement
/// through the frame: planar angles conjugate under X and relabel under Z,
/// z-basis outcomes relabel under X.
fn adapted_readout(basis: Basis, x: u8, z: u8) -> (Basis, u8) {
    match basis.plane_angle() {
        None => (Basis::Z, x),
        Some(a) => {
            let phys = if x == 1 { Basis::Angle(-a) } else { basis };
            (phys, z)
        }
    }
}

/// Exact distribution over final measurement outcomes, bit c of the index
/// being chain c's outcome. Branch enumeration runs through
/// [`evaluate_pattern`]; each branch's outputs are then read out in the
/// given bases, corrected per the branch's byproduct frame.
pub fn pattern_distribution(
    p: &MeasurementPattern,
    finals: &[Basis],
    cap: usize,
) -> Result<Vec<f64>> {
    let k = p.logical_qubits();
    if finals.len() != k {
        return Err(Error::OutcomeSpec(format!(
            "{} final bases for {k} logical qubits",
            finals.len()
        )));
    }
    let mut dist = vec![0.0; 1 << k];
    for branch in evaluate_pattern(p, cap)? {
        for (r, slot) in dist.iter_mut().enumerate() {
            let els: Vec<PovmElement> = (0..k)
                .map(|c| {
                    let (phys, flip) =
                        adapted_readout(finals[c], branch.x_frame[c], branch.z_frame[c]);
                    let m = ((r >> c) & 1) as u8 ^ flip;
                    PovmElement::basis_projector(c, phys, m)
                })
                .collect();
            *slot += branch.probability * branch.state.born_probability(&els)?;
        }
    }
    Ok(dist)
}
