//! Exhaustive ground-truth solvers for desk-scale instances.
//!
//! Everything here is deliberately brute force: these functions are the
//! reference the production pipeline is judged against, so they share no
//! code with it beyond the graph container. Each solver refuses inputs
//! above its size limit rather than approximating.
//!
//! Internally graphs are recompiled into bitmask adjacency (`BitGraph`) so
//! subset enumeration stays cheap; the verify harness calls `exact_tds`
//! millions of times.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{
    delete_vertices, has_cycle_through, Decision, Instance, MultiGraph, Solution, VertexId,
};

/// Default vertex cap for the subset-enumeration solvers.
pub const DEFAULT_ORACLE_LIMIT: usize = 15;

/// Vertex cap for `exact_flower` (cycle enumeration is the expensive part).
pub const FLOWER_ORACLE_LIMIT: usize = 9;

/// Vertex cap for `exact_cycle_cover`.
pub const COVER_ORACLE_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {vertices} vertices, above the exhaustive-search limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

/// Result of an exhaustive decision query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleAnswer {
    pub decision: Decision,
    /// Minimum-weight deletion set on YES (ties broken by lexicographically
    /// smallest sorted id list); `None` on NO.
    pub witness: Option<Solution>,
    /// Weight of the witness on YES; `None` on NO (the search is capped at
    /// budget `k`, so the true optimum of a NO instance is not computed).
    pub optimum_weight: Option<u64>,
}

impl OracleAnswer {
    fn no() -> Self {
        OracleAnswer {
            decision: Decision::No,
            witness: None,
            optimum_weight: None,
        }
    }
}

/// Graph recompiled to bitmask adjacency over vertices `0..n` (sorted-id
/// order). `u32` masks suffice for every oracle limit in this module.
struct BitGraph {
    ids: Vec<VertexId>,
    /// Simple adjacency: bit `j` of `nbr[i]` set iff `{i, j}` is an edge.
    nbr: Vec<u32>,
    /// Subset of `nbr` marking multiplicity-2 edges.
    dbl: Vec<u32>,
}

impl BitGraph {
    fn new(g: &MultiGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let pos = |v: VertexId| ids.binary_search(&v).expect("vertex indexed") as u32;
        let mut nbr = vec![0u32; ids.len()];
        let mut dbl = vec![0u32; ids.len()];
        for (u, v, m) in g.edges() {
            let (i, j) = (pos(u), pos(v));
            nbr[i as usize] |= 1 << j;
            nbr[j as usize] |= 1 << i;
            if m == 2 {
                dbl[i as usize] |= 1 << j;
                dbl[j as usize] |= 1 << i;
            }
        }
        BitGraph { ids, nbr, dbl }
    }

    /// Total edge slots inside `mask`, doubles counted twice.
    fn edge_slots_within(&self, mask: u32) -> u32 {
        let mut twice = 0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice += (self.nbr[i] & mask).count_ones() + (self.dbl[i] & mask).count_ones();
        }
        twice / 2
    }

    /// Number of connected components of the subgraph induced on `mask`.
    fn components_within(&self, mask: u32) -> u32 {
        let mut comps = 0;
        let mut unseen = mask;
        while unseen != 0 {
            comps += 1;
            let mut comp = unseen & unseen.wrapping_neg();
            loop {
                let mut grown = comp;
                let mut rest = comp;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    grown |= self.nbr[i] & mask;
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            unseen &= !comp;
        }
        comps
    }

    fn is_tree_mask(&self, mask: u32) -> bool {
        mask != 0
            && self.components_within(mask) == 1
            && self.edge_slots_within(mask) == mask.count_ones() - 1
    }

    fn is_forest_mask(&self, mask: u32) -> bool {
        self.edge_slots_within(mask) == mask.count_ones() - self.components_within(mask)
    }

    fn ids_of_mask(&self, mask: u32) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out.insert(self.ids[i]);
        }
        out
    }
}

/// All `n`-bit masks with exactly `size` bits set, in increasing numeric
/// order (Gosper's hack).
fn masks_of_size(n: usize, size: usize) -> impl Iterator<Item = u32> {
    let limit = 1u32 << n;
    let mut cur = if size > n {
        limit // exhausted from the start
    } else if size == 0 {
        0
    } else {
        (1u32 << size) - 1
    };
    let mut zero_pending = size == 0 && size <= n;
    std::iter::from_fn(move || {
        if zero_pending {
            zero_pending = false;
            return Some(0);
        }
        if size == 0 || cur >= limit {
            return None;
        }
        let out = cur;
        let c = cur & cur.wrapping_neg();
        let r = cur + c;
        cur = (((r ^ cur) >> 2) / c) | r;
        Some(out)
    })
}

fn check_limit(vertices: usize, limit: usize) -> Result<(), OracleError> {
    if vertices > limit {
        Err(OracleError::TooLarge { vertices, limit })
    } else {
        Ok(())
    }
}

/// Exhaustive weighted tree-deletion-set solver with the default size cap.
pub fn exact_tds(inst: &Instance) -> Result<OracleAnswer, OracleError> {
    exact_tds_with_limit(inst, DEFAULT_ORACLE_LIMIT)
}

/// Exhaustive solver with an explicit vertex cap. Enumerates deletion sets
/// in increasing size — weights are positive, so sets larger than `k` can
/// never fit the budget — and keeps the best `(weight, sorted ids)` pair.
pub fn exact_tds_with_limit(inst: &Instance, limit: usize) -> Result<OracleAnswer, OracleError> {
    let n = inst.graph.vertex_count();
    check_limit(n, limit)?;
    if inst.k < 0 {
        return Ok(OracleAnswer::no());
    }
    let k = inst.k as u64;
    let bg = BitGraph::new(&inst.graph);
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let weights: Vec<u64> = bg.ids.iter().map(|&v| inst.weight(v)).collect();
    let max_size = n.min(k.min(n as u64) as usize);

    let mut best: Option<(u64, Vec<VertexId>)> = None;
    for size in 0..=max_size {
        for mask in masks_of_size(n, size) {
            let mut w = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                w += weights[i];
            }
            if w > k || !bg.is_tree_mask(full & !mask) {
                continue;
            }
            let ids: Vec<VertexId> = bg.ids_of_mask(mask).into_iter().collect();
            let cand = (w, ids);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }

    Ok(match best {
        None => OracleAnswer::no(),
        Some((w, ids)) => {
            let witness = Solution::new(ids.into_iter().collect());
            assert!(
                witness.is_valid(inst),
                "oracle witness failed structural re-verification"
            );
            OracleAnswer {
                decision: Decision::Yes,
                witness: Some(witness),
                optimum_weight: Some(w),
            }
        }
    })
}

/// Size of a minimum feedback vertex set (minimum deletions leaving a
/// forest), by exhaustive search in increasing size.
pub fn exact_fvs(g: &MultiGraph) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    check_limit(n, DEFAULT_ORACLE_LIMIT)?;
    let bg = BitGraph::new(g);
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    for size in 0..=n {
        if masks_of_size(n, size).any(|mask| bg.is_forest_mask(full & !mask)) {
            return Ok(size);
        }
    }
    unreachable!("deleting every vertex leaves the empty forest");
}

/// All vertex sets (as masks over the non-`x` vertices) of cycles through
/// `x`: multiplicity-2 neighbors alone, plus every simple path between two
/// distinct neighbors of `x` avoiding `x`.
fn cycle_masks_through(g: &MultiGraph, x: VertexId) -> Vec<u32> {
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != x).collect();
    let pos = |v: VertexId| others.binary_search(&v).expect("non-x vertex indexed");
    let mut masks: BTreeSet<u32> = BTreeSet::new();
    for (y, m) in g.neighbors(x) {
        if m == 2 {
            masks.insert(1 << pos(y));
        }
    }
    let nbrs: Vec<VertexId> = g.neighbors(x).map(|(y, _)| y).collect();
    // Adjacency among the others (multiplicity irrelevant for paths).
    let adj: Vec<u32> = others
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .filter(|&(u, _)| u != x)
                .fold(0u32, |acc, (u, _)| acc | (1 << pos(u)))
        })
        .collect();

    // Depth-first enumeration of simple paths from `start` to `goal`.
    fn dfs(cur: usize, goal: usize, visited: u32, adj: &[u32], masks: &mut BTreeSet<u32>) {
        if cur == goal {
            masks.insert(visited);
            return;
        }
        let mut cand = adj[cur] & !visited;
        while cand != 0 {
            let next = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            dfs(next, goal, visited | (1 << next), adj, masks);
        }
    }
    for (a, &u) in nbrs.iter().enumerate() {
        for &v in &nbrs[a + 1..] {
            let (s, t) = (pos(u), pos(v));
            dfs(s, t, 1 << s, &adj, &mut masks);
        }
    }
    masks.into_iter().collect()
}

/// Maximum number of cycles through `x` that pairwise share only `x`
/// (the flower order at `x`), by set-packing DP over vertex masks.
pub fn exact_flower(g: &MultiGraph, x: VertexId) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    check_limit(n, FLOWER_ORACLE_LIMIT)?;
    assert!(g.has_vertex(x), "exact_flower: unknown vertex {x}");
    let cycles = cycle_masks_through(g, x);
    let m = n - 1;
    // Cycles grouped by lowest vertex so the DP only scans relevant masks.
    let mut by_low: Vec<Vec<u32>> = vec![Vec::new(); m.max(1)];
    for &c in &cycles {
        by_low[c.trailing_zeros() as usize].push(c);
    }
    let mut dp = vec![0u8; 1usize << m];
    for s in 1u32..(1u32 << m) {
        let low = s.trailing_zeros() as usize;
        let mut best = dp[(s & (s - 1)) as usize];
        for &c in &by_low[low] {
            if c & s == c {
                best = best.max(1 + dp[(s & !c) as usize]);
            }
        }
        dp[s as usize] = best;
    }
    Ok(dp[(1usize << m) - 1] as usize)
}

/// Minimum number of non-`x` vertices whose deletion destroys every cycle
/// through `x`, by exhaustive search in increasing size.
pub fn exact_cycle_cover(g: &MultiGraph, x: VertexId) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    check_limit(n, COVER_ORACLE_LIMIT)?;
    assert!(g.has_vertex(x), "exact_cycle_cover: unknown vertex {x}");
    if !has_cycle_through(g, x) {
        return Ok(0);
    }
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != x).collect();
    let m = others.len();
    for size in 1..=m {
        for mask in masks_of_size(m, size) {
            let del: BTreeSet<VertexId> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| others[i])
                .collect();
            if !has_cycle_through(&delete_vertices(g, &del), x) {
                return Ok(size);
            }
        }
    }
    unreachable!("deleting all other vertices leaves x alone, with no cycle");
}
