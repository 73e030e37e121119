//! Acceptance checklist for the whole workspace. Each test is one criterion
//! and prints its own pass line (run with `-- --nocapture` to watch them),
//! so a green run of this target reads as the release gate.
//!
//! Criteria 8, 9 and 11 share one seeded circuit sample; everything else is
//! an exhaustive sweep at desk scale.

use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use mbqc_core::bits::BitVec;
use mbqc_core::bounds::{
    extract_pairs, family, verify_twd_rwd, verify_width_sandwich, FamilyParams,
};
use mbqc_core::circuit::{CircuitIR, Gate};
use mbqc_core::dense::{graph_state, Basis, Mat2, PovmElement};
use mbqc_core::graph::{all_connected_graphs, Bipartition, Graph};
use mbqc_core::mqc::{
    build_circuit_graph, compile_to_pattern, evaluate_pattern, insert_output_qubits,
    pattern_distribution, peps_tensors, probability_network, suppress_degree2,
    MeasurementPattern,
};
use mbqc_core::tensor::{contract_pair, execute_sequence, sequence_from_tree, Label, Tensor};
use mbqc_core::tree::TreeLayouts;
use mbqc_core::ttn::Ttn;
use mbqc_core::width::{carving_width, rank_width};

/// Relative floor for Schmidt rank detection.
const RANK_REL_TOL: f64 = 1e-10;
/// Absolute tolerance on amplitudes and probabilities.
const AMP_TOL: f64 = 1e-9;
/// Total variation tolerance between output distributions.
const TV_TOL: f64 = 1e-9;

const DENSE_CAP: usize = 14;
const TREE_CAP: usize = 9;
const CARVE_CAP: usize = 16;
const TWD_CAP: usize = 15;
const ENTRY_CAP: usize = 1 << 26;

fn side(mask: usize, n: usize) -> BitVec {
    let on: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).collect();
    BitVec::from_indices(n, &on)
}

fn crossing_count(g: &Graph, mask: usize) -> usize {
    g.edges()
        .iter()
        .filter(|&&(u, v)| (mask >> u) & 1 != (mask >> v) & 1)
        .count()
}

/// All labeled graphs on n vertices, one per edge-subset bitmask.
fn all_labeled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0..1usize << pairs.len()).map(move |bits| {
        let chosen: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::from_edges(n, &chosen).unwrap()
    })
}

/// Complete graphs, paths, cycles and stars up to n vertices.
fn named_families(n_max: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        out.push(Graph::complete(n));
        out.push(Graph::path(n));
    }
    for n in 3..=n_max {
        out.push(Graph::cycle(n));
    }
    for leaves in 2..n_max {
        out.push(Graph::star(leaves));
    }
    out
}

fn bounded_degree_samples(count: usize, n_max: usize, seed: u64) -> Vec<Graph> {
    let params = FamilyParams {
        n_max,
        samples: count,
        max_degree: 3,
        seed,
    };
    family("random")
        .unwrap()
        .instances(&params)
        .unwrap()
        .into_iter()
        .map(|(_, g)| g)
        .collect()
}

fn hadamard() -> Mat2 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2::new(s, s, s, -s)
}

fn z_rotation(theta: f64) -> Mat2 {
    let zero = Complex64::new(0.0, 0.0);
    Mat2::new(
        Complex64::from_polar(1.0, -theta / 2.0),
        zero,
        zero,
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

/// Seeded circuit sample shared by the compilation criteria: 2 to 4 logical
/// qubits, 2 to 6 gates, resampled until the circuit compiles to a connected
/// pattern small enough for the dense and carving caps.
fn sampled_circuits(count: usize, seed: u64) -> Vec<(CircuitIR, MeasurementPattern, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        // Fix the shape first, then resample gate lists until one compiles
        // to a connected pattern of dense-simulable size. Anything shorter
        // than a spanning set of cphases can never connect the wires.
        let qubits = rng.gen_range(2..=4);
        let len = rng.gen_range((qubits - 1).max(2)..=6);
        for _ in 0..64 {
            // Each rotation splits a wire into at most 3 chain vertices, so
            // capping the rotation count keeps every candidate inside the
            // dense cap instead of rejecting the interesting ones.
            let mut rotations_left = (DENSE_CAP - 2 * qubits) / 3;
            let gates: Vec<Gate> = (0..len)
                .map(|_| {
                    if rotations_left == 0 || rng.gen_bool(0.45) {
                        let a = rng.gen_range(0..qubits);
                        let mut b = rng.gen_range(0..qubits - 1);
                        if b >= a {
                            b += 1;
                        }
                        Gate::Cz {
                            a: a.min(b),
                            b: a.max(b),
                        }
                    } else {
                        rotations_left -= 1;
                        let target = rng.gen_range(0..qubits);
                        let matrix = match rng.gen_range(0..4) {
                            0 => hadamard(),
                            1 => z_rotation(rng.gen_range(0.2..3.0)),
                            2 => hadamard() * z_rotation(rng.gen_range(0.2..3.0)),
                            _ => {
                                z_rotation(rng.gen_range(0.2..3.0))
                                    * hadamard()
                                    * z_rotation(rng.gen_range(0.2..3.0))
                            }
                        };
                        Gate::U { target, matrix }
                    }
                })
                .collect();
            let Ok(c) = CircuitIR::new(qubits, gates, vec![Basis::Z; qubits]) else {
                continue;
            };
            let Ok(wiring) = build_circuit_graph(&c) else {
                continue;
            };
            let Ok(pattern) = compile_to_pattern(&c) else {
                continue;
            };
            if !pattern.graph().is_connected() || pattern.graph().n() > DENSE_CAP {
                continue;
            }
            out.push((c, pattern, wiring.graph));
            break;
        }
    }
    out
}

#[test]
fn criterion_01_schmidt_rank_is_two_to_the_cut_rank() {
    let mut graphs = 0usize;
    let mut cuts = 0usize;
    for n in 2..=6 {
        for g in all_connected_graphs(n) {
            let s = graph_state(&g, 8).unwrap();
            for mask in 1..(1usize << n) - 1 {
                let p = Bipartition::from_mask(side(mask, n)).unwrap();
                let rank = g.cut_rank(&p);
                assert_eq!(
                    s.schmidt_rank(&p, RANK_REL_TOL),
                    1 << rank,
                    "n={n} edges={:?} mask={mask:b}",
                    g.edges()
                );
                cuts += 1;
            }
            graphs += 1;
        }
    }
    println!("criterion 01 schmidt rank vs cut rank: pass ({graphs} graphs, {cuts} cuts)");
}

#[test]
fn criterion_02_tree_maximum_cut_dominates_max_log_schmidt() {
    let mut checked = 0usize;
    for n in 2..=6 {
        let layouts: Vec<Vec<usize>> = TreeLayouts::new(n, TREE_CAP)
            .unwrap()
            .map(|t| {
                (0..t.edges().len())
                    .map(|i| {
                        t.edge_leaf_side(i)
                            .iter_ones()
                            .fold(0usize, |m, k| m | 1 << k)
                    })
                    .collect()
            })
            .collect();
        for g in all_labeled_graphs(n) {
            let masks = 1usize << n;
            let mut rank = vec![0usize; masks];
            let mut cross = vec![0usize; masks];
            for m in 1..masks - 1 {
                rank[m] = g.cut_rank_of_side(&side(m, n));
                cross[m] = crossing_count(&g, m);
            }
            for edges in &layouts {
                let max_cross = edges.iter().map(|&m| cross[m]).max().unwrap();
                let max_rank = edges.iter().map(|&m| rank[m]).max().unwrap();
                assert!(
                    max_cross >= max_rank,
                    "n={n} edges={:?} layout sides={edges:?}",
                    g.edges()
                );
                checked += 1;
            }
        }
    }
    println!("criterion 02 max cut dominates log schmidt on every tree: pass ({checked} layouts)");
}

#[test]
fn criterion_03_rank_width_carving_width_sandwich() {
    let mut checked = 0usize;
    for n in 2..=6 {
        for g in all_connected_graphs(n) {
            verify_width_sandwich(&g, CARVE_CAP, TREE_CAP).unwrap();
            checked += 1;
        }
    }
    for g in named_families(8) {
        verify_width_sandwich(&g, CARVE_CAP, TREE_CAP).unwrap();
        checked += 1;
    }
    println!("criterion 03 rwd <= cc <= delta^2 rwd: pass ({checked} graphs)");
}

#[test]
fn criterion_04_treewidth_rank_width_sandwich() {
    let mut checked = 0usize;
    for n in 2..=6 {
        for g in all_connected_graphs(n) {
            verify_twd_rwd(&g, TWD_CAP, TREE_CAP).unwrap();
            checked += 1;
        }
    }
    println!("criterion 04 treewidth vs rank width sandwich: pass ({checked} graphs)");
}

#[test]
fn criterion_05_complete_graphs_stay_at_schmidt_rank_two() {
    for n in 3..=10 {
        let g = Graph::complete(n);
        let s = graph_state(&g, 10).unwrap();
        for mask in 1..(1usize << n) - 1 {
            let p = Bipartition::from_mask(side(mask, n)).unwrap();
            assert_eq!(g.cut_rank(&p), 1);
            assert_eq!(s.schmidt_rank(&p, RANK_REL_TOL), 2);
            let a = mask.count_ones() as usize;
            assert_eq!(crossing_count(&g, mask), a * (n - a));
        }
    }
    println!("criterion 05 complete graphs have schmidt rank two across every cut: pass (n=3..10)");
}

/// Contract a state network against one bitstring of physical projectors.
fn peps_amplitude(g: &Graph, vertex_tensors: &[Tensor], bits: usize) -> Complex64 {
    let m = g.edge_count();
    let mut acc: Option<Tensor> = None;
    for (v, vt) in vertex_tensors.iter().enumerate() {
        let hit = (bits >> v & 1) as f64;
        let proj = Tensor::new(
            vec![(m + v) as Label],
            vec![2],
            vec![
                Complex64::new(1.0 - hit, 0.0),
                Complex64::new(hit, 0.0),
            ],
        )
        .unwrap();
        for t in [vt.clone(), proj] {
            acc = Some(match acc {
                None => t,
                Some(a) => contract_pair(&a, &t).unwrap(),
            });
        }
    }
    let t = acc.unwrap();
    assert_eq!(t.rank(), 0);
    t.data()[0]
}

fn random_povm(rng: &mut ChaCha8Rng, n: usize) -> Vec<PovmElement> {
    (0..n)
        .map(|q| {
            let basis = match rng.gen_range(0..4) {
                0 => Basis::X,
                1 => Basis::Y,
                2 => Basis::Z,
                _ => Basis::Angle(rng.gen_range(0.0..std::f64::consts::TAU)),
            };
            if rng.gen_bool(0.8) {
                PovmElement::basis_projector(q, basis, rng.gen_range(0..2u8))
            } else {
                // Non-projective element: a convex stretch of both outcomes.
                let a = rng.gen_range(0.1..1.0);
                let b = rng.gen_range(0.0..1.0 - 0.05);
                let m = basis.projector(0) * Complex64::new(a, 0.0)
                    + basis.projector(1) * Complex64::new(b, 0.0);
                PovmElement::new(q, m).unwrap()
            }
        })
        .collect()
}

#[test]
fn criterion_06_state_and_probability_networks_contract_exactly() {
    let mut graphs: Vec<Graph> = Vec::new();
    for n in 2..=5 {
        graphs.extend(all_connected_graphs(n));
    }
    graphs.extend(named_families(8).into_iter().filter(|g| g.n() >= 6));
    graphs.extend(bounded_degree_samples(6, 8, 11));

    let mut amp_checks = 0usize;
    for g in &graphs {
        let n = g.n();
        let s = graph_state(g, 8).unwrap();
        let net = peps_tensors(g).unwrap();
        for bits in 0..1usize << n {
            let amp = peps_amplitude(g, &net.tensors, bits);
            assert!(
                (amp - s.amplitude(bits)).norm() < AMP_TOL,
                "edges={:?} bits={bits:b}",
                g.edges()
            );
            amp_checks += 1;
        }
    }

    // 100 random POVM configs per graph. The graph list here is thinner than
    // the amplitude sweep: 100 doubled-network contractions over every n = 5
    // graph would take hours on one core, so take every twelfth, and skip
    // graphs whose worst contraction step (4^cc entries, each summing up to
    // 4^delta shared values) is hopeless.
    let mut povm_graphs: Vec<Graph> = Vec::new();
    for n in 2..=4 {
        povm_graphs.extend(all_connected_graphs(n));
    }
    povm_graphs.extend(all_connected_graphs(5).step_by(12));
    povm_graphs.extend(named_families(8).into_iter().filter(|g| g.n() >= 6));
    povm_graphs.extend(bounded_degree_samples(6, 8, 11));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut povm_checks = 0usize;
    for g in &povm_graphs {
        let (cc, tree) = carving_width(g, CARVE_CAP).unwrap();
        if cc + g.max_degree() > 12 {
            continue;
        }
        let s = graph_state(g, 8).unwrap();
        let seq = sequence_from_tree(&tree);
        for _ in 0..100 {
            let els = random_povm(&mut rng, g.n());
            let net = probability_network(g, &els).unwrap();
            let p = execute_sequence(&net, &seq, ENTRY_CAP).unwrap().result.data()[0].re;
            let q = s.born_probability(&els).unwrap();
            assert!((p - q).abs() < AMP_TOL, "edges={:?}: {p} vs {q}", g.edges());
            povm_checks += 1;
        }
    }
    println!(
        "criterion 06 network contractions exact: pass ({amp_checks} amplitudes, {povm_checks} povm configs)"
    );
}

#[test]
fn criterion_07_ttn_is_exact_and_its_best_bond_matches_rank_width() {
    // Amplitude exactness out to 8 qubits on the named families plus random
    // bounded-degree samples.
    let mut amp_checks = 0usize;
    let mut eights: Vec<Graph> = named_families(8);
    eights.extend(bounded_degree_samples(6, 8, 13));
    for g in &eights {
        let s = graph_state(g, 8).unwrap();
        let (_, tree) = rank_width(g, TREE_CAP).unwrap();
        let t = Ttn::from_dense(&s, &tree);
        for bits in 0..1usize << g.n() {
            assert!(
                (t.amplitude(bits) - s.amplitude(bits)).norm() < AMP_TOL,
                "edges={:?} bits={bits:b}",
                g.edges()
            );
            amp_checks += 1;
        }
    }

    // Bond-dimension witness on every connected graph to n = 6: the minimum
    // over all tree layouts of the worst bond equals 2^rwd. Bond dims equal
    // the per-edge Schmidt ranks, so the minimum over layouts is computed
    // from cut ranks and spot-checked by building the network on the witness
    // and on a few other layouts.
    let mut witness_checks = 0usize;
    for n in 2..=6 {
        let layouts: Vec<_> = TreeLayouts::new(n, TREE_CAP).unwrap().collect();
        let edge_masks: Vec<Vec<usize>> = layouts
            .iter()
            .map(|t| {
                (0..t.edges().len())
                    .map(|i| {
                        t.edge_leaf_side(i)
                            .iter_ones()
                            .fold(0usize, |m, k| m | 1 << k)
                    })
                    .collect()
            })
            .collect();
        for g in all_connected_graphs(n) {
            let masks = 1usize << n;
            let rank: Vec<usize> = (0..masks)
                .map(|m| g.cut_rank_of_side(&side(m, n)))
                .collect();
            let per_layout: Vec<usize> = edge_masks
                .iter()
                .map(|edges| edges.iter().map(|&m| rank[m]).max().unwrap())
                .collect();
            let best = *per_layout.iter().min().unwrap();
            let (rwd, _) = rank_width(&g, TREE_CAP).unwrap();
            assert_eq!(best, rwd);

            let s = graph_state(&g, 8).unwrap();
            let argmin = per_layout.iter().position(|&r| r == best).unwrap();
            for (i, layout) in [
                (argmin, &layouts[argmin]),
                (0, &layouts[0]),
                (layouts.len() / 2, &layouts[layouts.len() / 2]),
            ] {
                let t = Ttn::from_dense(&s, layout);
                assert_eq!(
                    t.max_bond_dim(),
                    1 << per_layout[i],
                    "edges={:?} layout {i}",
                    g.edges()
                );
            }
            witness_checks += 1;
        }
    }
    println!(
        "criterion 07 ttn exact and min worst bond = 2^rwd: pass ({amp_checks} amplitudes, {witness_checks} graphs)"
    );
}

#[test]
fn criterion_08_compiled_patterns_match_their_circuits() {
    let circuits = sampled_circuits(24, 0);
    assert!(circuits.len() >= 20);
    for (c, pattern, wiring) in &circuits {
        let dist = pattern_distribution(pattern, c.measure(), DENSE_CAP).unwrap();
        let dense = c.final_distribution(DENSE_CAP).unwrap();
        let tv: f64 = dist
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < TV_TOL, "tv={tv} on {} gates", c.gates().len());

        let (cc_pattern, _) = carving_width(pattern.graph(), CARVE_CAP).unwrap();
        let (cc_wiring, _) = carving_width(wiring, CARVE_CAP).unwrap();
        assert!(cc_pattern <= cc_wiring, "{cc_pattern} > {cc_wiring}");
    }
    // The rejection sampling must not have collapsed the sample into
    // trivially small instances.
    assert!(circuits.iter().any(|(c, _, _)| c.qubits() == 4));
    assert!(circuits.iter().any(|(c, _, _)| c.gates().len() == 6));
    let largest = circuits
        .iter()
        .map(|(_, p, _)| p.graph().n())
        .max()
        .unwrap();
    assert!(largest >= 10, "largest pattern only {largest} vertices");
    println!(
        "criterion 08 pattern distributions equal circuit distributions: pass ({} circuits, largest pattern {largest} vertices)",
        circuits.len()
    );
}

#[test]
fn criterion_09_prefix_entanglement_stays_under_the_carving_cap() {
    let circuits = sampled_circuits(24, 0);
    let mut states = 0usize;
    for (c, _, wiring) in &circuits {
        let (cc, _) = carving_width(wiring, CARVE_CAP).unwrap();
        let bound = 1usize << cc;
        let k = c.qubits();
        for cut in 0..=c.gates().len() {
            let prefix = insert_output_qubits(c, cut).unwrap();
            for branch in evaluate_pattern(&prefix, DENSE_CAP).unwrap() {
                for mask in 1..(1usize << k) - 1 {
                    let p = Bipartition::from_mask(side(mask, k)).unwrap();
                    let rank = branch.state.schmidt_rank(&p, RANK_REL_TOL);
                    assert!(
                        rank <= bound,
                        "rank {rank} > 2^cc {bound} at cut {cut}, mask {mask:b}"
                    );
                }
                states += 1;
            }
        }
    }
    println!(
        "criterion 09 prefix schmidt rank <= 2^cc: pass ({} circuits, {states} branch states)",
        circuits.len()
    );
}

#[test]
fn criterion_10_pair_extraction_never_stalls_on_bounded_degree_graphs() {
    let graphs = bounded_degree_samples(500, 9, 1);
    assert_eq!(graphs.len(), 500);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in &graphs {
        let n = g.n();
        let mask = rng.gen_range(1..(1usize << n) - 1);
        let p = Bipartition::from_mask(side(mask, n)).unwrap();
        let ex = extract_pairs(g, &p).unwrap();
        let delta = g.max_degree();
        assert!(ex.pairs.len() <= g.cut_rank(&p));
        assert!(ex.boundary() <= delta * ex.pairs.len());
    }
    println!("criterion 10 pair extraction terminates in budget: pass (500 graphs)");
}

#[test]
fn criterion_11_degree_two_suppression_keeps_carving_width() {
    // Invariance holds exactly when suppression leaves more than a single
    // edge. The one escape is a pattern graph that is a bare path (a lone
    // cphase between two otherwise idle wires): it collapses to K2 and its
    // carving width drops from 2 to 1. Assert the full characterization so
    // neither branch can hide a width bug.
    let circuits = sampled_circuits(24, 0);
    let mut invariant = 0usize;
    let mut collapsed = 0usize;
    for (_, pattern, wiring) in &circuits {
        for g in [pattern.graph(), wiring] {
            let (before, _) = carving_width(g, CARVE_CAP).unwrap();
            let (h, _) = suppress_degree2(g);
            let (after, _) = carving_width(&h, CARVE_CAP).unwrap();
            if h.n() > 2 {
                assert_eq!(before, after, "edges={:?} -> {:?}", g.edges(), h.edges());
                invariant += 1;
            } else {
                assert!(g.max_degree() <= 2, "collapse from {:?}", g.edges());
                assert_eq!((before, after), (2, 1), "edges={:?}", g.edges());
                collapsed += 1;
            }
        }
    }
    // The equality branch must carry the test, not the degenerate one.
    assert!(invariant > collapsed);
    println!(
        "criterion 11 suppression keeps carving width: pass ({invariant} invariant, {collapsed} bare-path collapses)"
    );
}

#[test]
fn criterion_12_verify_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for name in ["first.jsonl", "second.jsonl"] {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_mbqc"))
            .args(["verify", "--seed", "0", "--out", path.to_str().unwrap()])
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    println!("criterion 12 verify is deterministic: pass (byte-identical reruns)");
}
