//! 2-approximate feedback vertex set on multigraphs, unit weights.
//!
//! Local-ratio scheme in the Becker–Geiger / Bafna–Berman–Fujito family:
//! repeatedly clean degree-≤1 vertices, then either pay a uniform weight
//! layer on a semidisjoint cycle (a cycle all of whose vertices except at
//! most one have degree exactly 2) or pay `degree − 1` proportionally on
//! the whole cleaned graph; vertices whose weight hits zero are harvested.
//! A reverse-delete pass restores inclusion-wise minimality against the
//! original graph, which both certifies the factor-2 analysis (it needs a
//! minimal solution) and shrinks the set in practice.
//!
//! Double edges are 2-cycles here: both endpoints count as cycle vertices,
//! degrees count multiplicity, and acyclicity means no double edges either.
//! That matches subdividing every edge (which preserves cycles and turns
//! the multigraph simple) while never letting a subdivision point into the
//! solution.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Zero};

use crate::graph::{delete_vertices, MultiGraph, VertexId};

/// An inclusion-wise minimal feedback vertex set within twice the optimum
/// cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvsResult {
    pub fvs: BTreeSet<VertexId>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Removes vertices of degree ≤ 1 until none remain; such vertices lie on
/// no cycle. Degrees count multiplicity, so a vertex kept alive only by a
/// double edge survives.
fn cleanup(g: &mut MultiGraph) {
    loop {
        let drop: Vec<VertexId> = g.vertices().filter(|&v| g.degree(v) <= 1).collect();
        if drop.is_empty() {
            return;
        }
        for v in drop {
            g.remove_vertex(v);
        }
    }
}

/// Finds a semidisjoint cycle in a graph of minimum degree ≥ 2, if one
/// exists: every cycle vertex has degree exactly 2 except at most one.
/// Scans degree-2 vertices in id order and walks both arms of the chain,
/// so the answer is deterministic.
fn find_semidisjoint_cycle(g: &MultiGraph) -> Option<BTreeSet<VertexId>> {
    debug_assert!(g.vertices().all(|v| g.degree(v) >= 2));
    for u in g.vertices() {
        if g.degree(u) != 2 {
            continue;
        }
        // A double edge at a degree-2 vertex is itself the cycle {u, y},
        // and y is the only vertex allowed to have higher degree.
        if let Some((y, _)) = g.neighbors(u).find(|&(_, m)| m == 2) {
            return Some(BTreeSet::from([u, y]));
        }
        // Two simple slots to distinct neighbors: follow each arm through
        // degree-2 vertices until it hits a branching vertex or loops back.
        let arms: Vec<VertexId> = g.neighbors(u).map(|(x, _)| x).collect();
        let mut chain = BTreeSet::from([u]);
        let mut ends = Vec::new();
        let mut closed = false;
        'arm: for &start in &arms {
            let (mut prev, mut cur) = (u, start);
            loop {
                if cur == u {
                    closed = true; // walked a full cycle of degree-2 vertices
                    break 'arm;
                }
                if g.degree(cur) != 2 {
                    ends.push(cur);
                    break;
                }
                chain.insert(cur);
                // In-chain edges are simple (a double here would raise the
                // degree above 2), so there is a unique forward neighbor.
                let next = g
                    .neighbors(cur)
                    .map(|(x, _)| x)
                    .find(|&x| x != prev)
                    .expect("degree-2 chain vertex has a forward neighbor");
                prev = cur;
                cur = next;
            }
        }
        if closed {
            return Some(chain);
        }
        if ends.len() == 2 && ends[0] == ends[1] {
            chain.insert(ends[0]);
            return Some(chain);
        }
    }
    None
}

/// Feedback vertex set of `g` with |result| ≤ 2 · (minimum FVS size).
/// Deleting the result leaves a graph where every component is a tree (in
/// particular, no double edges survive).
pub fn approx_fvs(g: &MultiGraph) -> FvsResult {
    let mut work = g.clone();
    let mut weight: BTreeMap<VertexId, BigRational> =
        work.vertices().map(|v| (v, rat(1))).collect();
    let mut stack: Vec<VertexId> = Vec::new();

    loop {
        cleanup(&mut work);
        if work.vertex_count() == 0 {
            break;
        }
        // (vertex, layer coefficient) pairs; γ is chosen so the cheapest
        // vertex per coefficient is driven exactly to zero.
        let layer: Vec<(VertexId, BigRational)> = match find_semidisjoint_cycle(&work) {
            Some(cycle) => cycle.into_iter().map(|v| (v, rat(1))).collect(),
            None => work
                .vertices()
                .map(|v| (v, rat(work.degree(v) as i64 - 1)))
                .collect(),
        };
        let gamma = layer
            .iter()
            .map(|(v, coef)| &weight[v] / coef)
            .min()
            .expect("layer is non-empty");
        for (v, coef) in &layer {
            let next = &weight[v] - &(&gamma * coef);
            weight.insert(*v, next);
        }
        let zeros: Vec<VertexId> = layer
            .iter()
            .map(|(v, _)| *v)
            .filter(|v| weight[v].is_zero())
            .collect();
        assert!(!zeros.is_empty(), "the argmin vertex reaches weight zero");
        for &v in &zeros {
            work.remove_vertex(v);
            stack.push(v);
        }
    }

    // Reverse delete: return vertices (most recent first) whenever the rest
    // still breaks every cycle of the original graph.
    let mut fvs: BTreeSet<VertexId> = stack.iter().copied().collect();
    for &v in stack.iter().rev() {
        let mut trial = fvs.clone();
        trial.remove(&v);
        if delete_vertices(g, &trial).is_forest() {
            fvs = trial;
        }
    }
    FvsResult { fvs }
}
