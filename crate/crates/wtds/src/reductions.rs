//! Reduction Rules 1–6 and the fixpoint driver (`semi_reduce`).
//!
//! Each rule is a pure function from an instance to a [`RuleOutcome`];
//! the driver cycles them in fixed priority order 1..6, restarting after
//! every application, until all six report `NotApplicable`. Every
//! application strictly shrinks the lexicographic measure
//! (vertex count, edge count, total weight above the k+1 cap), which the
//! driver asserts, so the loop always terminates.
//!
//! Degree counts edge multiplicity throughout: a vertex kept alive only
//! by a double edge has degree 2 but is *not* a compressible path vertex
//! (Rule 4 needs two simple edges to distinct neighbors — a double edge is
//! a cycle and must survive for Rule 5 and the flower machinery to see).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::flower::max_flower_order;
use crate::graph::{Instance, MultiGraph, VertexId};

/// Result of attempting one reduction rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOutcome {
    NotApplicable,
    Applied {
        instance: Instance,
        /// Vertices the application touched (deleted, reweighted, or
        /// created), in the rule's deterministic order.
        affected: Vec<VertexId>,
    },
    DecidedNo,
}

/// One recorded application, sufficient to replay deterministically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: u8,
    pub affected: Vec<VertexId>,
    pub k_before: i64,
    pub k_after: i64,
}

/// Ordered record of every application the driver performed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTrace {
    pub steps: Vec<RuleApplication>,
}

impl RuleTrace {
    /// Re-applies the recorded rules to `start`. Returns the final
    /// instance, or `None` if any step fails to reproduce its record
    /// (which would mean the trace does not belong to this instance).
    pub fn replay(&self, start: &Instance) -> Option<Instance> {
        let mut cur = start.clone();
        for step in &self.steps {
            match apply_rule(step.rule, &cur) {
                RuleOutcome::Applied { instance, affected }
                    if affected == step.affected
                        && cur.k == step.k_before
                        && instance.k == step.k_after =>
                {
                    cur = instance;
                }
                _ => return None,
            }
        }
        Some(cur)
    }
}

/// Dispatches a rule by number (1–6).
pub fn apply_rule(rule: u8, inst: &Instance) -> RuleOutcome {
    match rule {
        1 => rule1_negative_k(inst),
        2 => rule2_small_components(inst),
        3 => rule3_degree_one(inst),
        4 => rule4_path_compress(inst),
        5 => rule5_flower(inst),
        6 => rule6_weight_cap(inst),
        _ => panic!("no such reduction rule: {rule}"),
    }
}

fn sub_k(k: i64, by: u64) -> i64 {
    (k as i128 - by as i128).clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

fn heavier_than_k(w: u64, k: i64) -> bool {
    w as i128 > k as i128
}

/// Rule 1: a negative budget can never be met (weights are positive).
pub fn rule1_negative_k(inst: &Instance) -> RuleOutcome {
    if inst.k < 0 {
        RuleOutcome::DecidedNo
    } else {
        RuleOutcome::NotApplicable
    }
}

/// Rule 2: with several components, all but one must be deleted entirely,
/// so any component of weight below (total − k) cannot be the survivor and
/// is deleted, paying its weight out of k. All qualifying components go in
/// one batch against the threshold computed up front.
pub fn rule2_small_components(inst: &Instance) -> RuleOutcome {
    let comps = inst.graph.connected_components();
    if comps.len() <= 1 {
        return RuleOutcome::NotApplicable;
    }
    let total = inst.total_weight() as i128;
    let threshold = total - inst.k as i128;
    let mut doomed: BTreeSet<VertexId> = BTreeSet::new();
    for comp in &comps {
        if (inst.set_weight_of(comp) as i128) < threshold {
            doomed.extend(comp.iter().copied());
        }
    }
    if doomed.is_empty() {
        return RuleOutcome::NotApplicable;
    }
    let paid = inst.set_weight_of(&doomed);
    let mut out = inst.delete_vertices(&doomed);
    out.k = sub_k(inst.k, paid);
    RuleOutcome::Applied {
        instance: out,
        affected: doomed.into_iter().collect(),
    }
}

/// Rule 3: a degree-1 vertex lies on no cycle; fold its weight into its
/// neighbor. One vertex (smallest id) per application.
pub fn rule3_degree_one(inst: &Instance) -> RuleOutcome {
    let Some(v) = inst.graph.vertices().find(|&v| inst.graph.degree(v) == 1) else {
        return RuleOutcome::NotApplicable;
    };
    let (u, _) = inst.graph.neighbors(v).next().expect("degree-1 vertex has a neighbor");
    let mut out = inst.delete_vertices(&BTreeSet::from([v]));
    out.set_weight(u, inst.weight(u) + inst.weight(v));
    RuleOutcome::Applied {
        instance: out,
        affected: vec![v, u],
    }
}

/// A vertex eligible to sit inside a Rule-4 path: degree exactly 2 through
/// two simple edges to two distinct neighbors.
fn chain_eligible(g: &MultiGraph, v: VertexId) -> bool {
    g.degree(v) == 2 && g.simple_degree(v) == 2
}

/// Walks away from `start` through chain-eligible vertices, first step
/// onto `first`. Collects the eligible vertices passed, in walk order;
/// sets `cycle` if the walk returns to `start` (a pure cycle component).
fn walk_chain(
    g: &MultiGraph,
    eligible: &BTreeSet<VertexId>,
    seen: &mut BTreeSet<VertexId>,
    start: VertexId,
    first: VertexId,
    cycle: &mut bool,
) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut prev = start;
    let mut cur = first;
    while eligible.contains(&cur) {
        if cur == start {
            *cycle = true;
            break;
        }
        if seen.contains(&cur) {
            break;
        }
        seen.insert(cur);
        out.push(cur);
        let next = g
            .neighbors(cur)
            .map(|(u, _)| u)
            .find(|&u| u != prev)
            .expect("chain vertex has two distinct neighbors");
        prev = cur;
        cur = next;
    }
    out
}

/// Maximal runs of chain-eligible vertices. Returns (run, is_pure_cycle);
/// a pure cycle run lists the cycle starting at its minimum vertex and
/// walking toward that vertex's smaller neighbor.
fn chain_runs(g: &MultiGraph) -> Vec<(Vec<VertexId>, bool)> {
    let eligible: BTreeSet<VertexId> =
        g.vertices().filter(|&v| chain_eligible(g, v)).collect();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut runs = Vec::new();
    for &start in &eligible {
        if seen.contains(&start) {
            continue;
        }
        seen.insert(start);
        let nbrs: Vec<VertexId> = g.neighbors(start).map(|(u, _)| u).collect();
        let mut cycle = false;
        let fwd = walk_chain(g, &eligible, &mut seen, start, nbrs[0], &mut cycle);
        let mut run = if cycle {
            // fwd circled the whole component: minimum vertex first,
            // heading toward its smaller neighbor.
            Vec::new()
        } else {
            let mut back =
                walk_chain(g, &eligible, &mut seen, start, nbrs[1], &mut cycle);
            back.reverse();
            back
        };
        run.push(start);
        run.extend(fwd);
        if cycle && run[0] != start {
            unreachable!("cycle runs start at the scan vertex");
        }
        runs.push((run, cycle));
    }
    runs
}

/// One candidate path v₀, v₁ … v_l, v_{l+1} whose inner vertices all have
/// degree 2; `inner.len()` is l.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct PathCandidate {
    v0: VertexId,
    inner: Vec<VertexId>,
    vend: VertexId,
}

/// Enumerates candidate paths from the maximal runs. A run attached to two
/// distinct vertices is taken whole; a run whose both ends attach to the
/// same vertex a (a pendant cycle) donates its first vertex as v₀ and uses
/// a as the far endpoint; a component that is itself a cycle uses its
/// minimum vertex and that vertex's larger neighbor as the endpoints.
fn path_candidates(g: &MultiGraph) -> Vec<PathCandidate> {
    let mut cands = Vec::new();
    for (mut run, is_cycle) in chain_runs(g) {
        let r = run.len();
        if is_cycle {
            if r >= 4 {
                cands.push(PathCandidate {
                    v0: run[0],
                    inner: run[1..r - 1].to_vec(),
                    vend: run[r - 1],
                });
            }
            continue;
        }
        let attach = |end: VertexId, inward: Option<VertexId>| -> VertexId {
            g.neighbors(end)
                .map(|(u, _)| u)
                .find(|&u| Some(u) != inward)
                .expect("chain vertex has an outside attachment")
        };
        let front = attach(run[0], run.get(1).copied());
        let back = attach(run[r - 1], r.checked_sub(2).map(|i| run[i]));
        if front == back {
            // Pendant cycle: run + {front} is a cycle; the run's smaller
            // endpoint serves as v₀ so only r−1 vertices count as inner.
            if run[0] > run[r - 1] {
                run.reverse();
            }
            if r >= 2 {
                cands.push(PathCandidate {
                    v0: run[0],
                    inner: run[1..].to_vec(),
                    vend: front,
                });
            }
        } else {
            let (v0, vend) = if front <= back {
                (front, back)
            } else {
                run.reverse();
                (back, front)
            };
            cands.push(PathCandidate {
                v0,
                inner: run,
                vend,
            });
        }
    }
    // Longest inner section first; ids break ties.
    cands.sort_by(|a, b| {
        b.inner
            .len()
            .cmp(&a.inner.len())
            .then_with(|| (a.v0, &a.inner, a.vend).cmp(&(b.v0, &b.inner, b.vend)))
    });
    cands
}

/// Rule 4: compress a path of degree-2 vertices. Part (a), for l ≥ 3,
/// replaces the inner vertices by u₁ carrying the minimum inner weight and
/// u₂ carrying the rest. Part (b) applies when l ≥ 2 and an endpoint
/// weighs more than k: after (a), u₂ is dropped and u₁ connects directly
/// to the far endpoint.
pub fn rule4_path_compress(inst: &Instance) -> RuleOutcome {
    for cand in path_candidates(&inst.graph) {
        let l = cand.inner.len();
        let heavy = heavier_than_k(inst.weight(cand.v0), inst.k)
            || heavier_than_k(inst.weight(cand.vend), inst.k);
        if !(l >= 3 || (l >= 2 && heavy)) {
            continue;
        }
        let inner_weights: Vec<u64> = cand.inner.iter().map(|&v| inst.weight(v)).collect();
        let min_w = *inner_weights.iter().min().expect("inner is non-empty");
        let sum_w: u64 = inner_weights.iter().sum();
        let doomed: BTreeSet<VertexId> = cand.inner.iter().copied().collect();
        let mut out = inst.delete_vertices(&doomed);
        let u1 = out.add_vertex(min_w);
        let mut affected: Vec<VertexId> = cand.inner.clone();
        if heavy {
            out.graph.add_edge(cand.v0, u1).expect("endpoint survives");
            out.graph.add_edge(u1, cand.vend).expect("endpoint survives");
            affected.push(u1);
        } else {
            let u2 = out.add_vertex(sum_w - min_w);
            out.graph.add_edge(cand.v0, u1).expect("endpoint survives");
            out.graph.add_edge(u1, u2).expect("fresh vertices");
            out.graph.add_edge(u2, cand.vend).expect("endpoint survives");
            affected.push(u1);
            affected.push(u2);
        }
        return RuleOutcome::Applied {
            instance: out,
            affected,
        };
    }
    RuleOutcome::NotApplicable
}

/// Rule 5: a vertex with a flower of order ≥ k+1 must belong to every
/// solution — its k+1 cycles would otherwise each need a separate deletion
/// — so it is removed and its weight paid. First qualifying vertex in id
/// order. Not applicable while k < 0 (Rule 1's territory).
pub fn rule5_flower(inst: &Instance) -> RuleOutcome {
    if inst.k < 0 {
        return RuleOutcome::NotApplicable;
    }
    let need = inst.k as usize + 1;
    for x in inst.graph.vertices() {
        if max_flower_order(&inst.graph, x) >= need {
            let mut out = inst.delete_vertices(&BTreeSet::from([x]));
            out.k = sub_k(inst.k, inst.weight(x));
            return RuleOutcome::Applied {
                instance: out,
                affected: vec![x],
            };
        }
    }
    RuleOutcome::NotApplicable
}

/// Rule 6: any weight above k+1 acts exactly like k+1 (either way the
/// vertex is unaffordable), so cap it. Batch over all offenders.
pub fn rule6_weight_cap(inst: &Instance) -> RuleOutcome {
    if inst.k < 0 {
        return RuleOutcome::NotApplicable;
    }
    let cap = inst.k as u64 + 1;
    let heavy: Vec<VertexId> = inst
        .graph
        .vertices()
        .filter(|&v| inst.weight(v) > cap)
        .collect();
    if heavy.is_empty() {
        return RuleOutcome::NotApplicable;
    }
    let mut out = inst.clone();
    for &v in &heavy {
        out.set_weight(v, cap);
    }
    RuleOutcome::Applied {
        instance: out,
        affected: heavy,
    }
}

/// Termination measure; every Applied outcome must shrink it strictly.
fn measure(inst: &Instance) -> (usize, usize, u128) {
    let cap = if inst.k < 0 { 0 } else { inst.k as u128 + 1 };
    let excess = inst
        .weights()
        .values()
        .map(|&w| (w as u128).saturating_sub(cap))
        .sum();
    (inst.graph.vertex_count(), inst.graph.edge_count(), excess)
}

/// Outcome of running the rules to fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemiReduceResult {
    Reduced { instance: Instance, trace: RuleTrace },
    DecidedNo { trace: RuleTrace },
}

/// Applies Rules 1–6 in priority order, restarting after every
/// application, until none applies. Preserves the YES/NO answer.
pub fn semi_reduce(inst: &Instance) -> SemiReduceResult {
    let mut cur = inst.clone();
    let mut trace = RuleTrace::default();
    'outer: loop {
        for rule in 1..=6u8 {
            match apply_rule(rule, &cur) {
                RuleOutcome::NotApplicable => {}
                RuleOutcome::DecidedNo => return SemiReduceResult::DecidedNo { trace },
                RuleOutcome::Applied { instance, affected } => {
                    assert!(
                        measure(&instance) < measure(&cur),
                        "rule {rule} failed to shrink the termination measure"
                    );
                    trace.steps.push(RuleApplication {
                        rule,
                        affected,
                        k_before: cur.k,
                        k_after: instance.k,
                    });
                    cur = instance;
                    continue 'outer;
                }
            }
        }
        return SemiReduceResult::Reduced {
            instance: cur,
            trace,
        };
    }
}

/// All six rules refuse the instance.
pub fn is_semi_reduced(inst: &Instance) -> bool {
    (1..=6u8).all(|r| matches!(apply_rule(r, inst), RuleOutcome::NotApplicable))
}
