//! Command line front end. Everything here is plumbing around mbqc-core:
//! width reports, exact simulation by contraction, pattern compilation and
//! the inequality verification suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mbqc_core::bits::BitVec;
use mbqc_core::bounds::{
    extract_pairs, run_suite, write_csv, write_json_lines, SuiteConfig, SuiteItem,
};
use mbqc_core::circuit::CircuitIR;
use mbqc_core::dense::{graph_state, Basis, PovmElement, StateVector};
use mbqc_core::graph::{Bipartition, Graph};
use mbqc_core::mqc::{compile_to_pattern, pattern_distribution, probability_network, MeasurementPattern};
use mbqc_core::tensor::{execute_sequence, sequence_from_tree};
use mbqc_core::ttn::Ttn;
use mbqc_core::width::{carving_width, carving_width_enumerated, rank_width, treewidth};
use mbqc_core::{Caps, Error};

type Result<T> = std::result::Result<T, Error>;

/// Agreement threshold for every --check cross-validation.
const CHECK_TOL: f64 = 1e-9;

const LONG_ABOUT: &str = "\
Width bounds and exact simulation for graph states and measurement patterns.

Inputs are JSON files. `simulate` accepts a graph ({n, edges}), a circuit
({qubits, gates, measure}) or a compiled pattern ({graph, chains, plan,
outputs}) and tells them apart by their keys. Outcome strings are little
endian: qubit 0 is the leftmost character.

CSV columns per subcommand (JSON is the default format):
  widths         n,delta,cc,rwd,twd
  simulate       outcome,probability
  ttn            vertex,bond
  verify         graphId,n,delta,cc,rwd,twd,max,chiwd,min,min2,twdRwd
  extract-pairs  step,label,cut_rank,edges
`compile` always writes pattern JSON.

Exit codes: 0 ok, 1 failed verdict or cross-check, 2 parse or usage error,
3 cap exceeded, 4 inconsistent outcome specification.";

#[derive(Parser)]
#[command(name = "mbqc", version, about = "Width bounds for graph states", long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for sampled suite instances (default 0; overrides the config
    /// file's seed when given).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Max qubit count for dense states and cross-checks.
    #[arg(long, global = true)]
    dense_cap: Option<usize>,
    /// Max leaf count for exhaustive tree-layout enumeration.
    #[arg(long, global = true)]
    tree_cap: Option<usize>,
    /// Output format for tables and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cross-validate against an independent dense or enumerated oracle.
    #[arg(long, global = true)]
    check: bool,
    /// Write output to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact carving width, rank width and treewidth with witness trees.
    Widths {
        /// Graph JSON file.
        graph: PathBuf,
    },
    /// Exact outcome probabilities by contraction along the carving witness.
    Simulate {
        /// Graph, circuit or pattern JSON file.
        input: PathBuf,
        /// JSON list of measurement bases, one per qubit ("x", "y", "z" or
        /// "angle t"). Defaults to all z. Circuit files carry their own.
        outcomes: Option<PathBuf>,
    },
    /// Compile a circuit to a measurement pattern.
    Compile {
        /// Circuit JSON file.
        circuit: PathBuf,
    },
    /// Build a tree tensor network on the rank-width witness and dump its
    /// bond dimensions.
    Ttn {
        /// Graph JSON file.
        graph: PathBuf,
    },
    /// Run the width-inequality suite over graph families.
    Verify {
        /// Suite config JSON; defaults cover the standard families.
        config: Option<PathBuf>,
    },
    /// Distill entangled pairs across a cut and dump the rewrite trace.
    ExtractPairs {
        /// Graph JSON file.
        graph: PathBuf,
        /// Comma separated vertex list for side A of the cut.
        #[arg(long)]
        side: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } | Error::EntryCapExceeded { .. } => 3,
        Error::OutcomeSpec(_) | Error::DegenerateBranch { .. } => 4,
        Error::BoundViolated { .. } => 1,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let text = match &cli.command {
        Command::Widths { graph } => cmd_widths(cli, graph)?,
        Command::Simulate { input, outcomes } => cmd_simulate(cli, input, outcomes.as_deref())?,
        Command::Compile { circuit } => cmd_compile(cli, circuit)?,
        Command::Ttn { graph } => cmd_ttn(cli, graph)?,
        Command::Verify { config } => {
            let (text, all_pass) = cmd_verify(cli, config.as_deref())?;
            emit(cli, &text)?;
            return Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::ExtractPairs { graph, side } => cmd_extract(cli, graph, side)?,
    };
    emit(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn caps(cli: &Cli) -> Caps {
    let mut caps = Caps::default();
    if let Some(d) = cli.dense_cap {
        caps.dense = d;
    }
    if let Some(t) = cli.tree_cap {
        caps.tree = t;
    }
    caps
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Write to a sibling temp file and rename it into place, so a crashed or
/// failed run never leaves a partial file under the requested name.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = PathBuf::from(tmp);
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn pretty(v: &Value) -> Result<String> {
    let mut out = serde_json::to_string_pretty(v)?;
    out.push('\n');
    Ok(out)
}

fn cmd_widths(cli: &Cli, path: &Path) -> Result<String> {
    let g: Graph = read_json(path)?;
    let caps = caps(cli);
    let (cc, cc_tree) = carving_width(&g, caps.carve)?;
    let (rwd, rwd_tree) = rank_width(&g, caps.tree)?;
    let twd = treewidth(&g, caps.twd)?;
    if cli.check {
        let (cc2, _) = carving_width_enumerated(&g, caps.tree)?;
        if cc2 != cc {
            return Err(Error::BoundViolated {
                name: "carving-width-cross-check",
                detail: format!("subset dp says {cc}, tree enumeration says {cc2}"),
            });
        }
    }
    match cli.format {
        Format::Json => pretty(&json!({
            "n": g.n(),
            "delta": g.max_degree(),
            "cc": cc,
            "rwd": rwd,
            "twd": twd,
            "ccTree": cc_tree.edges(),
            "rwdTree": rwd_tree.edges(),
        })),
        Format::Csv => Ok(format!(
            "n,delta,cc,rwd,twd\n{},{},{cc},{rwd},{twd}\n",
            g.n(),
            g.max_degree()
        )),
    }
}

enum SimInput {
    Bare(Graph),
    Wired(CircuitIR),
    Compiled(MeasurementPattern),
}

fn sniff(path: &Path) -> Result<SimInput> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let keys = v
        .as_object()
        .ok_or_else(|| Error::InvalidGraph("input must be a JSON object".into()))?;
    if keys.contains_key("chains") {
        Ok(SimInput::Compiled(serde_json::from_value(v)?))
    } else if keys.contains_key("gates") {
        Ok(SimInput::Wired(serde_json::from_value(v)?))
    } else if keys.contains_key("edges") {
        Ok(SimInput::Bare(serde_json::from_value(v)?))
    } else {
        Err(Error::InvalidGraph(
            "expected a graph, circuit or pattern file".into(),
        ))
    }
}

fn load_bases(path: Option<&Path>, qubits: usize) -> Result<Vec<Basis>> {
    let bases = match path {
        Some(p) => read_json::<Vec<Basis>>(p)?,
        None => vec![Basis::Z; qubits],
    };
    if bases.len() != qubits {
        return Err(Error::OutcomeSpec(format!(
            "{} bases for {qubits} qubits",
            bases.len()
        )));
    }
    Ok(bases)
}

fn cmd_simulate(cli: &Cli, input: &Path, outcomes: Option<&Path>) -> Result<String> {
    let caps = caps(cli);
    let (qubits, bases, table) = match sniff(input)? {
        SimInput::Bare(g) => {
            let n = g.n();
            if n > caps.dense {
                return Err(Error::CapExceeded {
                    what: "dense",
                    limit: caps.dense,
                    requested: n,
                });
            }
            let bases = load_bases(outcomes, n)?;
            let (_, tree) = carving_width(&g, caps.carve)?;
            let seq = sequence_from_tree(&tree);
            let oracle: Option<StateVector> =
                cli.check.then(|| graph_state(&g, caps.dense)).transpose()?;
            let mut table = Vec::with_capacity(1 << n);
            for r in 0..1usize << n {
                let els: Vec<PovmElement> = (0..n)
                    .map(|q| PovmElement::basis_projector(q, bases[q], ((r >> q) & 1) as u8))
                    .collect();
                let net = probability_network(&g, &els)?;
                let p = execute_sequence(&net, &seq, caps.entries)?.result.data()[0].re;
                if let Some(s) = &oracle {
                    let q = s.born_probability(&els)?;
                    if (p - q).abs() > CHECK_TOL {
                        return Err(Error::BoundViolated {
                            name: "dense-cross-check",
                            detail: format!("outcome {r}: contraction {p}, dense {q}"),
                        });
                    }
                }
                table.push(p);
            }
            (n, bases, table)
        }
        SimInput::Wired(c) => {
            if outcomes.is_some() {
                return Err(Error::OutcomeSpec(
                    "circuit files carry their own measurement bases".into(),
                ));
            }
            let bases = c.measure().to_vec();
            let pattern = compile_to_pattern(&c)?;
            let dist = pattern_distribution(&pattern, &bases, caps.dense)?;
            if cli.check {
                let dense = c.final_distribution(caps.dense)?;
                let tv: f64 = dist
                    .iter()
                    .zip(&dense)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
                    / 2.0;
                if tv > CHECK_TOL {
                    return Err(Error::BoundViolated {
                        name: "dense-cross-check",
                        detail: format!("total variation {tv} between pattern and circuit"),
                    });
                }
            }
            (c.qubits(), bases, dist)
        }
        SimInput::Compiled(p) => {
            let k = p.logical_qubits();
            let bases = load_bases(outcomes, k)?;
            let dist = pattern_distribution(&p, &bases, caps.dense)?;
            if cli.check {
                let total: f64 = dist.iter().sum();
                if (total - 1.0).abs() > CHECK_TOL {
                    return Err(Error::BoundViolated {
                        name: "normalization",
                        detail: format!("branch probabilities sum to {total}"),
                    });
                }
            }
            (k, bases, dist)
        }
    };
    render_table(cli.format, qubits, &bases, &table)
}

fn bitstring(r: usize, n: usize) -> String {
    (0..n)
        .map(|k| if (r >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn render_table(format: Format, qubits: usize, bases: &[Basis], table: &[f64]) -> Result<String> {
    match format {
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .enumerate()
                .map(|(r, p)| json!({ "outcome": bitstring(r, qubits), "probability": p }))
                .collect();
            pretty(&json!({ "qubits": qubits, "bases": bases, "table": rows }))
        }
        Format::Csv => {
            let mut out = String::from("outcome,probability\n");
            for (r, p) in table.iter().enumerate() {
                out.push_str(&format!("{},{p}\n", bitstring(r, qubits)));
            }
            Ok(out)
        }
    }
}

fn cmd_compile(cli: &Cli, path: &Path) -> Result<String> {
    let c: CircuitIR = read_json(path)?;
    let pattern = compile_to_pattern(&c)?;
    if cli.check {
        let caps = caps(cli);
        let dist = pattern_distribution(&pattern, c.measure(), caps.dense)?;
        let dense = c.final_distribution(caps.dense)?;
        let tv: f64 = dist
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        if tv > CHECK_TOL {
            return Err(Error::BoundViolated {
                name: "dense-cross-check",
                detail: format!("total variation {tv} between pattern and circuit"),
            });
        }
    }
    let mut out = serde_json::to_string_pretty(&pattern)?;
    out.push('\n');
    Ok(out)
}

fn cmd_ttn(cli: &Cli, path: &Path) -> Result<String> {
    let g: Graph = read_json(path)?;
    let caps = caps(cli);
    let (rwd, tree) = rank_width(&g, caps.tree)?;
    let s = graph_state(&g, caps.dense)?;
    let t = Ttn::from_dense(&s, &tree);
    if cli.check {
        for bits in 0..1usize << g.n() {
            let err = (t.amplitude(bits) - s.amplitude(bits)).norm();
            if err > CHECK_TOL {
                return Err(Error::BoundViolated {
                    name: "dense-cross-check",
                    detail: format!("amplitude {bits} off by {err}"),
                });
            }
        }
    }
    match cli.format {
        Format::Json => {
            let bonds: Vec<Value> = t
                .bond_dims()
                .iter()
                .map(|&(v, d)| json!({ "vertex": v, "dim": d }))
                .collect();
            pretty(&json!({
                "n": g.n(),
                "rwd": rwd,
                "tree": tree.edges(),
                "bonds": bonds,
                "maxBond": t.max_bond_dim(),
                "parameters": t.parameter_count(),
            }))
        }
        Format::Csv => {
            let mut out = String::from("vertex,bond\n");
            for (v, d) in t.bond_dims() {
                out.push_str(&format!("{v},{d}\n"));
            }
            Ok(out)
        }
    }
}

fn cmd_verify(cli: &Cli, config: Option<&Path>) -> Result<(String, bool)> {
    let mut cfg: SuiteConfig = match config {
        Some(path) => read_json(path)?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(d) = cli.dense_cap {
        cfg.caps.dense = d;
    }
    if let Some(t) = cli.tree_cap {
        cfg.caps.tree = t;
    }
    let items = run_suite(&cfg)?;
    let mut buf = Vec::new();
    match cli.format {
        Format::Json => write_json_lines(&items, &mut buf)?,
        Format::Csv => write_csv(&items, &mut buf)?,
    }
    let mut all_pass = true;
    for item in &items {
        if let SuiteItem::Report(r) = item {
            let v = r.verdicts();
            if !v.all_pass() {
                all_pass = false;
                eprintln!(
                    "verdict failure on {}: max={} chiwd={} min={} min2={} twdRwd={}",
                    r.graph_id, v.max, v.chiwd, v.min, v.min2, v.twd_rwd
                );
            }
        }
    }
    Ok((String::from_utf8(buf).expect("reports are utf8"), all_pass))
}

fn cmd_extract(cli: &Cli, path: &Path, side: &str) -> Result<String> {
    let g: Graph = read_json(path)?;
    let mut indices = Vec::new();
    for part in side.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: usize = part
            .parse()
            .map_err(|_| Error::InvalidBipartition(format!("bad vertex index `{part}`")))?;
        if v >= g.n() {
            return Err(Error::IndexOutOfRange { index: v, n: g.n() });
        }
        indices.push(v);
    }
    let p = Bipartition::from_mask(BitVec::from_indices(g.n(), &indices))?;
    let ex = extract_pairs(&g, &p)?;
    match cli.format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(&ex)?;
            out.push('\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = String::from("step,label,cut_rank,edges\n");
            for (i, step) in ex.trace.iter().enumerate() {
                let edges: Vec<String> =
                    step.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                out.push_str(&format!(
                    "{i},\"{}\",{},{}\n",
                    step.label,
                    step.cut_rank,
                    edges.join(";")
                ));
            }
            Ok(out)
        }
    }
}
