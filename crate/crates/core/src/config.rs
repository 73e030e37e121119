use serde::{Deserialize, Serialize};

/// Hard limits for the exhaustive and dense routines. Everything here is a
/// plain configuration constant: callers may raise a cap when they know what
/// they are doing (tests do), the defaults keep desk-scale runs snappy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Max qubit count for dense state vectors.
    pub dense: usize,
    /// Max leaf count for exhaustive tree-layout enumeration ((2n-5)!! trees).
    pub tree: usize,
    /// Max vertex count for the subset-DP carving width.
    pub carve: usize,
    /// Max vertex count for the subset-DP treewidth.
    pub twd: usize,
    /// Max entries a single contraction step may materialize.
    pub entries: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            dense: 14,
            tree: 9,
            carve: 16,
            twd: 15,
            entries: 1 << 26,
        }
    }
}
