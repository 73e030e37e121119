//! Width inequalities with machine-checkable witnesses.
//!
//! The chain being certified: for any tree layout the peak crossing-edge
//! count dominates the peak log Schmidt rank; minimized over trees that
//! says rank width is at most carving width; pair distillation gives the
//! reverse direction up to a factor of max degree squared; and treewidth
//! sandwiches rank width with the same flavor of constants. Each check
//! either returns a record of the raw numbers or an error naming the
//! violated bound and its witness.

pub mod extract;
pub mod families;
pub mod suite;

pub use extract::{extract_pairs, Extraction, RoundPlan, TraceStep};
pub use families::{family, registry, FamilyParams, GraphFamily};
pub use suite::{run_suite, write_csv, write_json_lines, SuiteConfig, SuiteItem};

use crate::dense::{StateVector, SCHMIDT_REL_TOL};
use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph};
use crate::tree::TreeLayout;
use crate::width::{carving_width, rank_width, treewidth};
use serde::Serialize;

/// Edge-maxima of one tree layout: peak crossing-edge count and peak
/// GF(2) cut rank over all tree edges, maximized independently.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeRecord {
    pub max_crossing: usize,
    pub max_rank: usize,
}

/// Peak crossing-edge count and peak cut rank over the edges of `t`.
pub fn tree_maxima(g: &Graph, t: &TreeLayout) -> (usize, usize) {
    let mut max_crossing = 0;
    let mut max_rank = 0;
    for idx in 0..t.edges().len() {
        let side = t.edge_leaf_side(idx);
        max_crossing = max_crossing.max(g.crossing_edges_of_side(&side));
        max_rank = max_rank.max(g.cut_rank_of_side(&side));
    }
    (max_crossing, max_rank)
}

/// Check the per-tree inequality: the layout's peak crossing count is at
/// least its peak cut rank. With a dense state supplied, additionally check
/// on every tree edge that the Schmidt rank equals two to the cut rank.
pub fn verify_tree_inequality(
    g: &Graph,
    t: &TreeLayout,
    state: Option<&StateVector>,
) -> Result<TreeRecord> {
    if t.n_leaves() != g.n() {
        return Err(Error::InvalidTree(format!(
            "layout has {} leaves for a graph on {} vertices",
            t.n_leaves(),
            g.n()
        )));
    }
    if let Some(psi) = state {
        for idx in 0..t.edges().len() {
            let side = t.edge_leaf_side(idx);
            let rank = g.cut_rank_of_side(&side);
            let p = Bipartition::from_mask(side)?;
            let schmidt = psi.schmidt_rank(&p, SCHMIDT_REL_TOL);
            if schmidt != 1 << rank {
                return Err(Error::BoundViolated {
                    name: "schmidt-vs-cut-rank",
                    detail: format!(
                        "tree edge {idx}: schmidt rank {schmidt}, cut rank {rank}"
                    ),
                });
            }
        }
    }
    let (max_crossing, max_rank) = tree_maxima(g, t);
    if max_crossing < max_rank {
        return Err(Error::BoundViolated {
            name: "max",
            detail: format!("peak crossing {max_crossing} < peak rank {max_rank}"),
        });
    }
    Ok(TreeRecord {
        max_crossing,
        max_rank,
    })
}

/// Exact widths plus the witness layouts attaining them.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SandwichRecord {
    pub rwd: usize,
    pub cc: usize,
    pub max_degree: usize,
    pub cc_tree: Vec<(usize, usize)>,
    pub rwd_tree: Vec<(usize, usize)>,
}

/// Compute rank width and carving width exactly and check
/// rwd <= cc <= max_degree^2 * rwd.
pub fn verify_width_sandwich(g: &Graph, carve_cap: usize, tree_cap: usize) -> Result<SandwichRecord> {
    let (cc, cc_tree) = carving_width(g, carve_cap)?;
    let (rwd, rwd_tree) = rank_width(g, tree_cap)?;
    let d = g.max_degree();
    if rwd > cc {
        return Err(Error::BoundViolated {
            name: "chiwd",
            detail: format!("rwd {rwd} > cc {cc}, witness {:?}", rwd_tree.edges()),
        });
    }
    if cc > d * d * rwd {
        return Err(Error::BoundViolated {
            name: "min2",
            detail: format!(
                "cc {cc} > {d}^2 * rwd {rwd}, witness {:?}",
                cc_tree.edges()
            ),
        });
    }
    Ok(SandwichRecord {
        rwd,
        cc,
        max_degree: d,
        cc_tree: cc_tree.edges().to_vec(),
        rwd_tree: rwd_tree.edges().to_vec(),
    })
}

/// Treewidth next to rank width.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwdRecord {
    pub twd: usize,
    pub rwd: usize,
    pub max_degree: usize,
}

/// Check (twd - 1) / (2 max_degree^2) <= rwd <= max_degree * (twd + 1) - 1,
/// with the division cleared to keep everything in integers.
pub fn verify_twd_rwd(g: &Graph, twd_cap: usize, tree_cap: usize) -> Result<TwdRecord> {
    let twd = treewidth(g, twd_cap)?;
    let (rwd, _) = rank_width(g, tree_cap)?;
    let d = g.max_degree();
    if twd.saturating_sub(1) > 2 * d * d * rwd {
        return Err(Error::BoundViolated {
            name: "twd-rwd",
            detail: format!("twd {twd} too large for rwd {rwd} at max degree {d}"),
        });
    }
    if d * (twd + 1) < rwd + 1 {
        return Err(Error::BoundViolated {
            name: "twd-rwd",
            detail: format!("rwd {rwd} exceeds {d} * (twd {twd} + 1) - 1"),
        });
    }
    Ok(TwdRecord {
        twd,
        rwd,
        max_degree: d,
    })
}

/// One recorded tree in a [`BoundsReport`].
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PerTreeRecord {
    pub tree: String,
    pub max_crossing: usize,
    pub max_rank: usize,
}

/// One pair-distillation run across a tree-edge cut.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairRecord {
    pub cut: String,
    pub crossing: usize,
    pub cut_rank: usize,
    pub pairs: usize,
    pub boundary: usize,
}

/// Wall-clock phase costs. Kept out of the serialized reports so identical
/// inputs serialize identically.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub widths_ms: f64,
    pub trees_ms: f64,
    pub pairs_ms: f64,
}

/// Everything measured about one graph instance. Verdicts are always
/// recomputed from these raw fields, never stored.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundsReport {
    pub graph_id: String,
    pub n: usize,
    pub delta: usize,
    pub cc: usize,
    pub rwd: usize,
    pub twd: usize,
    pub per_tree: Vec<PerTreeRecord>,
    pub pair_extraction: Vec<PairRecord>,
    #[serde(skip)]
    pub timings: Timings,
}

/// Pass/fail of each inequality, derived from a report.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdicts {
    /// Peak crossing count >= peak cut rank on every recorded tree.
    pub max: bool,
    /// rwd <= cc.
    pub chiwd: bool,
    /// Peak crossing count <= delta^2 * peak cut rank on every recorded tree.
    pub min: bool,
    /// rwd <= cc <= delta^2 * rwd.
    pub min2: bool,
    /// (twd - 1) / (2 delta^2) <= rwd <= delta * (twd + 1) - 1.
    pub twd_rwd: bool,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.max && self.chiwd && self.min && self.min2 && self.twd_rwd
    }
}

impl BoundsReport {
    pub fn verdicts(&self) -> Verdicts {
        let d2 = self.delta * self.delta;
        Verdicts {
            max: self
                .per_tree
                .iter()
                .all(|r| r.max_crossing >= r.max_rank),
            chiwd: self.rwd <= self.cc,
            min: self
                .per_tree
                .iter()
                .all(|r| r.max_crossing <= d2 * r.max_rank),
            min2: self.rwd <= self.cc && self.cc <= d2 * self.rwd,
            twd_rwd: self.twd.saturating_sub(1) <= 2 * d2 * self.rwd
                && self.rwd < self.delta * (self.twd + 1),
        }
    }

    /// Serialized form with the derived verdicts attached.
    pub fn json_line(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        value["verdicts"] = serde_json::to_value(self.verdicts())?;
        Ok(value.to_string())
    }
}
