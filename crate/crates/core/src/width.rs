//! Exact width parameters of small graphs.
//!
//! Carving width (cc) is the min over leaf-labeled subcubic trees of the
//! largest edge cut induced by a tree edge; rank width swaps the edge count
//! for GF(2) cut-rank. Both are exact here: rank width by exhausting the
//! (2n-5)!! layouts, carving width by a subset DP over merge trees that
//! reaches a few more vertices. Treewidth comes from the elimination-order
//! DP. Everything rejects disconnected input; decompose first.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tree::{TreeLayout, TreeLayouts};

/// Cost of a leaf-side bipartition, the quantity maximized over tree edges.
/// Strategies plug into [`min_over_layouts`] so the enumeration loop is
/// written once.
pub trait CutCost {
    fn name(&self) -> &'static str;
    fn cost(&self, g: &Graph, side: &BitVec) -> usize;
}

/// Crossing-edge count; minimizing its tree maximum gives carving width.
pub struct EdgeCut;

impl CutCost for EdgeCut {
    fn name(&self) -> &'static str {
        "edges"
    }

    fn cost(&self, g: &Graph, side: &BitVec) -> usize {
        g.crossing_edges_of_side(side)
    }
}

/// GF(2) cut-rank; minimizing its tree maximum gives rank width.
pub struct RankCut;

impl CutCost for RankCut {
    fn name(&self) -> &'static str {
        "rank"
    }

    fn cost(&self, g: &Graph, side: &BitVec) -> usize {
        g.cut_rank_of_side(side)
    }
}

/// Max cost over all tree edges of `t`, leaf edges included (their singleton
/// cuts put max degree on the floor of every width here).
pub fn layout_width(g: &Graph, t: &TreeLayout, cost: &dyn CutCost) -> usize {
    assert_eq!(t.n_leaves(), g.n());
    t.edge_cuts()
        .iter()
        .map(|side| cost.cost(g, side))
        .max()
        .expect("layout has at least one edge")
}

/// Exact minimum of [`layout_width`] over every layout, with one optimal
/// witness. The per-layout scan aborts as soon as the running max ties the
/// incumbent.
pub fn min_over_layouts(
    g: &Graph,
    cost: &dyn CutCost,
    cap: usize,
) -> Result<(usize, TreeLayout)> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.n() < 2 {
        return Err(Error::InvalidGraph(
            "width minimization needs at least 2 vertices".into(),
        ));
    }
    let mut best: Option<(usize, TreeLayout)> = None;
    for t in TreeLayouts::new(g.n(), cap)? {
        let bound = best.as_ref().map_or(usize::MAX, |&(w, _)| w);
        let mut max = 0;
        for side in t.edge_cuts() {
            max = max.max(cost.cost(g, &side));
            if max >= bound {
                break;
            }
        }
        if max < bound {
            best = Some((max, t));
        }
    }
    Ok(best.expect("enumeration yields at least one layout"))
}

/// Carving width by layout enumeration. Slower than [`carving_width`] but
/// an independent route; kept as the cross-check oracle.
pub fn carving_width_enumerated(g: &Graph, cap: usize) -> Result<(usize, TreeLayout)> {
    min_over_layouts(g, &EdgeCut, cap)
}

/// Rank width, exact by enumeration. For graph states this is the log of
/// the minimal worst Schmidt rank any tree layout must route.
pub fn rank_width(g: &Graph, cap: usize) -> Result<(usize, TreeLayout)> {
    min_over_layouts(g, &RankCut, cap)
}

fn rows64(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).fold(0u64, |m, u| m | 1 << u))
        .collect()
}

/// Carving width by subset DP: `best[S]` is the cheapest way to merge the
/// vertex set S into one cluster, paying the boundary of every intermediate
/// cluster. Binary merge trees are exactly rooted layouts, so this agrees
/// with [`carving_width_enumerated`] while reaching n = 16. Also returns an
/// optimal witness layout rebuilt from the DP choices.
pub fn carving_width(g: &Graph, cap: usize) -> Result<(usize, TreeLayout)> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidGraph(
            "width minimization needs at least 2 vertices".into(),
        ));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "carving-width DP",
            limit: cap,
            requested: n,
        });
    }
    let rows = rows64(g);
    let full: usize = (1 << n) - 1;
    let mut cut = vec![0u32; 1 << n];
    for s in 1..=full {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let deg = rows[v].count_ones();
        cut[s] = cut[rest] + deg - 2 * (rows[v] & rest as u64).count_ones();
    }
    let mut best = vec![u32::MAX; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    for s in 1..=full {
        if s & (s - 1) == 0 {
            best[s] = cut[s];
            continue;
        }
        let low = s & s.wrapping_neg();
        let mut inner = u32::MAX;
        let mut sub = (s - 1) & s;
        while sub != 0 {
            if sub & low != 0 {
                let m = best[sub].max(best[s ^ sub]);
                if m < inner {
                    inner = m;
                    choice[s] = sub;
                }
            }
            sub = (sub - 1) & s;
        }
        best[s] = cut[s].max(inner);
    }

    // rebuild one optimal layout from the recorded splits
    let mut edges = Vec::with_capacity(2 * n - 2);
    let mut next_internal = n;
    let mut stack = vec![(full, usize::MAX)];
    while let Some((s, parent)) = stack.pop() {
        let me = if s & (s - 1) == 0 {
            s.trailing_zeros() as usize
        } else {
            let id = next_internal;
            next_internal += 1;
            stack.push((choice[s], id));
            stack.push((s ^ choice[s], id));
            id
        };
        if parent != usize::MAX {
            edges.push((parent, me));
        }
    }
    let witness = TreeLayout::new(n, edges)?;
    Ok((best[full] as usize, witness))
}

fn reachable_degree(rows: &[u64], through: u64, v: usize) -> u32 {
    let mut absorbed = 0u64;
    let mut reach = rows[v];
    loop {
        let fresh = reach & through & !absorbed;
        if fresh == 0 {
            break;
        }
        absorbed |= fresh;
        let mut m = fresh;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            reach |= rows[u];
        }
    }
    (reach & !through & !(1 << v)).count_ones()
}

/// Exact treewidth via the elimination-order subset DP: dp[S] is the best
/// worst forward-degree over orders that eliminate S first, where the
/// degree of v counts vertices outside S reachable from v through S.
pub fn treewidth(g: &Graph, cap: usize) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "treewidth DP",
            limit: cap,
            requested: n,
        });
    }
    let rows = rows64(g);
    let full: usize = (1 << n) - 1;
    let mut dp = vec![0u32; 1 << n];
    for s in 1..=full {
        let mut bestv = u32::MAX;
        let mut m = s;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let rest = s & !(1 << v);
            bestv = bestv.min(dp[rest].max(reachable_degree(&rows, rest as u64, v)));
        }
        dp[s] = bestv;
    }
    Ok(dp[full] as usize)
}

/// Treewidth by trying every elimination order with explicit fill-in.
/// Factorial; the oracle for the DP at n <= 8.
pub fn treewidth_brute(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 8, "factorial oracle");
    fn go(rows: &mut Vec<u64>, alive: u64, best: &mut u32, sofar: u32) {
        if alive == 0 {
            *best = (*best).min(sofar);
            return;
        }
        let mut m = alive;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let nb = rows[v] & alive & !(1 << v);
            let worst = sofar.max(nb.count_ones());
            if worst >= *best {
                continue;
            }
            let saved = rows.clone();
            let mut a = nb;
            while a != 0 {
                let x = a.trailing_zeros() as usize;
                a &= a - 1;
                rows[x] |= nb & !(1 << x);
            }
            go(rows, alive & !(1 << v), best, worst);
            *rows = saved;
        }
    }
    let mut rows = rows64(g);
    let mut best = u32::MAX;
    go(&mut rows, (1u64 << n) - 1, &mut best, 0);
    best as usize
}
