//! End-to-end kernelization: semi-reduce, decompose, encode the contracted
//! vertices as linear equations, keep a violation-preserving subset, and
//! assemble the kernel instance with every size bound recorded.

use std::collections::{BTreeMap, BTreeSet};

use crate::decomposition::{
    decompose, BoundLedger, Decomposition, DecompositionError, DecomposeOutcome,
};
use crate::graph::{Decision, Instance, MultiGraph, VertexId};
use crate::lineq::{coeff, reduce_equations, Coeff, LinearSystem};
use crate::reductions::{rule6_weight_cap, semi_reduce, RuleOutcome, RuleTrace, SemiReduceResult};

/// The linear system standing in for the contracted independent set: one
/// variable per core vertex, one equation per contracted vertex saying
/// "exactly one neighbor survives" (Σ x_u − 1 = 0 over its neighborhood,
/// where x_u = 0 when u is deleted).
#[derive(Clone, Debug, PartialEq)]
pub struct EquationEncoding {
    /// Core vertex → its column in the system.
    pub variable_index: BTreeMap<VertexId, usize>,
    /// Contracted vertex → its row in the system.
    pub equation_index: BTreeMap<VertexId, usize>,
    /// Width is |C_m| + 1; the last column carries the constant −1.
    pub system: LinearSystem,
}

/// Encodes the decomposition's independent set as equations over the core.
/// Column order is ascending core id; row order is ascending I-vertex id.
///
/// Panics if an I-vertex has a neighbor outside the core or no neighbor at
/// all — both would contradict the decomposition's guarantees.
pub fn encode_equations(dec: &Decomposition) -> EquationEncoding {
    let g = &dec.instance.graph;
    let variable_index: BTreeMap<VertexId, usize> = dec
        .c_m
        .iter()
        .enumerate()
        .map(|(j, &u)| (u, j))
        .collect();
    let width = dec.c_m.len() + 1;
    let mut system = LinearSystem::new(width);
    let mut equation_index: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, &v) in dec.i_set.iter().enumerate() {
        let mut row: Vec<Coeff> = vec![coeff(0); width];
        let mut support = 0usize;
        for (u, _) in g.neighbors(v) {
            let j = *variable_index
                .get(&u)
                .unwrap_or_else(|| panic!("I-vertex {v} has non-core neighbor {u}"));
            row[j] = coeff(1);
            support += 1;
        }
        assert!(support >= 1, "I-vertex {v} is isolated");
        assert!(
            dec.instance.k < 0 || support as i128 <= 2 * dec.instance.k as i128 + 1,
            "equation support exceeds 2k+1"
        );
        row[width - 1] = coeff(-1);
        system.push_row(row, Some(v));
        equation_index.insert(v, i);
    }
    EquationEncoding {
        variable_index,
        equation_index,
        system,
    }
}

/// Everything `kernelize` produces: the kernel instance, which contracted
/// vertices survived, the reduction trace, the asserted inequalities, and
/// an early decision when one was reached.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub kernel: Instance,
    /// Core vertices (modulator) of the decomposition; empty when the
    /// cascade settled the instance before decomposing.
    pub c_m: BTreeSet<VertexId>,
    /// Garnish vertices kept verbatim alongside the core.
    pub c_g: BTreeSet<VertexId>,
    pub i_kept: BTreeSet<VertexId>,
    pub trace: RuleTrace,
    pub bounds: BoundLedger,
    pub decided: Option<Decision>,
}

fn empty_instance(k: i64) -> Instance {
    Instance::new(MultiGraph::new(), BTreeMap::new(), k)
}

/// Runs the complete kernelization pipeline. The returned kernel is
/// decision-equivalent to the input at the same budget; `decided` is set
/// when the cascade already settled the answer.
///
/// Degenerate fixpoints are passed through unchanged as their own kernel:
/// a single vertex is a trivial YES, and a disconnected fixpoint has total
/// weight at most 2k (each component's weight is at least total − k once
/// the component rule is exhausted), so it is already kernel-sized.
pub fn kernelize(inst: &Instance) -> Result<KernelReport, DecompositionError> {
    let (reduced, trace) = match semi_reduce(inst) {
        SemiReduceResult::DecidedNo { trace } => {
            return Ok(KernelReport {
                kernel: empty_instance(inst.k),
                c_m: BTreeSet::new(),
                c_g: BTreeSet::new(),
                i_kept: BTreeSet::new(),
                trace,
                bounds: BoundLedger::default(),
                decided: Some(Decision::No),
            });
        }
        SemiReduceResult::Reduced { instance, trace } => (instance, trace),
    };
    let k = reduced.k;

    if reduced.graph.vertex_count() <= 1 {
        let decided = if reduced.graph.vertex_count() == 1 {
            Decision::Yes
        } else {
            Decision::No
        };
        return Ok(KernelReport {
            kernel: reduced,
            c_m: BTreeSet::new(),
            c_g: BTreeSet::new(),
            i_kept: BTreeSet::new(),
            trace,
            bounds: BoundLedger::default(),
            decided: Some(decided),
        });
    }
    if !reduced.graph.is_connected() {
        let mut bounds = BoundLedger::default();
        bounds.record(
            "disconnected fixpoint total weight <= 2k",
            reduced.total_weight() as i128,
            2 * k as i128,
        )?;
        return Ok(KernelReport {
            kernel: reduced,
            c_m: BTreeSet::new(),
            c_g: BTreeSet::new(),
            i_kept: BTreeSet::new(),
            trace,
            bounds,
            decided: None,
        });
    }

    let dec = match decompose(&reduced)? {
        DecomposeOutcome::DecidedNo => {
            return Ok(KernelReport {
                kernel: empty_instance(k),
                c_m: BTreeSet::new(),
                c_g: BTreeSet::new(),
                i_kept: BTreeSet::new(),
                trace,
                bounds: BoundLedger::default(),
                decided: Some(Decision::No),
            });
        }
        DecomposeOutcome::Done(dec) => dec,
    };
    let mut bounds = dec.bounds.clone();

    let enc = encode_equations(&dec);
    let budget = k.clamp(0, u32::MAX as i64) as u32;
    let (_, kept_rows) = reduce_equations(&enc.system, budget);
    bounds.record(
        "kept equations <= (|C_m|+1)(k+1)",
        kept_rows.len() as i128,
        (dec.c_m.len() as i128 + 1) * (k as i128 + 1),
    )?;
    let i_kept: BTreeSet<VertexId> = kept_rows
        .iter()
        .map(|&r| enc.system.tag(r).expect("every row is tagged"))
        .collect();
    bounds.record(
        "|I'| <= 8k^3+10k^2+3k+1",
        i_kept.len() as i128,
        8 * (k as i128).pow(3) + 10 * (k as i128).pow(2) + 3 * k as i128 + 1,
    )?;

    let dropped: BTreeSet<VertexId> = dec.i_set.difference(&i_kept).copied().collect();
    let mut kernel = dec.instance.delete_vertices(&dropped);

    // Contraction can push weights past the k+1 cap; re-capping is the
    // same equivalence-preserving step the cascade already uses.
    if let RuleOutcome::Applied { instance, .. } = rule6_weight_cap(&kernel) {
        kernel = instance;
    }
    let max_weight = kernel.weights().values().copied().max().unwrap_or(0);
    bounds.record("kernel weights <= k+1", max_weight as i128, k as i128 + 1)?;
    bounds.record(
        "|V(kernel)| <= bound(|C_m|)+bound(|C_g|)+bound(|I'|)",
        kernel.graph.vertex_count() as i128,
        (8 * (k as i128).pow(2) + 2 * k as i128)
            + (160 * (k as i128).pow(4) + 248 * (k as i128).pow(3) + 80 * (k as i128).pow(2)
                - 16 * k as i128
                - 8)
            + (8 * (k as i128).pow(3) + 10 * (k as i128).pow(2) + 3 * k as i128 + 1),
    )?;
    assert_eq!(
        kernel.k, k,
        "decomposition and equation reduction never change the budget"
    );

    Ok(KernelReport {
        kernel,
        c_m: dec.c_m.clone(),
        c_g: dec.c_g.clone(),
        i_kept,
        trace,
        bounds,
        decided: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_tds;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn path(n: usize) -> MultiGraph {
        let mut g = MultiGraph::new();
        let vs = g.add_vertices(n);
        for w in vs.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
        g
    }

    fn cycle(n: usize) -> MultiGraph {
        let mut g = path(n);
        let vs: Vec<_> = g.vertices().collect();
        g.add_edge(vs[0], vs[n - 1]).unwrap();
        g
    }

    fn decision_of(report: &KernelReport) -> Decision {
        report
            .decided
            .unwrap_or_else(|| exact_tds(&report.kernel).unwrap().decision)
    }

    #[test]
    fn tree_inputs_decide_yes() {
        let inst = Instance::unit_weights(path(6), 0);
        let report = kernelize(&inst).unwrap();
        assert_eq!(report.decided, Some(Decision::Yes));
        assert_eq!(exact_tds(&inst).unwrap().decision, Decision::Yes);
    }

    #[test]
    fn negative_budget_decides_no() {
        let inst = Instance::unit_weights(path(3), -1);
        let report = kernelize(&inst).unwrap();
        assert_eq!(report.decided, Some(Decision::No));
        assert!(report.kernel.graph.vertex_count() == 0);
    }

    #[test]
    fn cycle_too_expensive_decides_no() {
        // C4 with k=0: the cycle survives reduction (it only compresses),
        // and the FVS gate rejects it.
        let inst = Instance::unit_weights(cycle(4), 0);
        let report = kernelize(&inst).unwrap();
        assert_eq!(decision_of(&report), Decision::No);
        assert_eq!(exact_tds(&inst).unwrap().decision, Decision::No);
    }

    #[test]
    fn encoding_shape_on_synthetic_decomposition() {
        // Build a graph whose decomposition has a non-empty I: a long
        // double-clique core pattern is hard to force by hand, so instead
        // check the encoder directly on whatever a random campaign yields;
        // here just assert empty-I encodes to an empty system via a
        // butterfly (whose components all land in C_g or C_m).
        let mut g = MultiGraph::new();
        let vs = g.add_vertices(5);
        for pair in [[vs[1], vs[2]], [vs[3], vs[4]]] {
            g.add_edge(vs[0], pair[0]).unwrap();
            g.add_edge(vs[0], pair[1]).unwrap();
            g.add_edge(pair[0], pair[1]).unwrap();
        }
        let inst = Instance::unit_weights(g, 2);
        let report = kernelize(&inst).unwrap();
        assert!(report.bounds.all_hold());
        assert_eq!(decision_of(&report), exact_tds(&inst).unwrap().decision);
    }

    fn random_instance(rng: &mut ChaCha20Rng, max_n: usize, max_k: i64) -> Instance {
        let n = rng.gen_range(1..=max_n);
        let mut g = MultiGraph::new();
        let vs = g.add_vertices(n);
        let p = rng.gen_range(0.1..0.5);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    let m = if rng.gen_bool(0.2) { 2 } else { 1 };
                    g.add_edge_with_multiplicity(vs[i], vs[j], m).unwrap();
                }
            }
        }
        let weights: BTreeMap<_, _> = vs
            .iter()
            .map(|&v| (v, rng.gen_range(1..=3u64)))
            .collect();
        Instance::new(g, weights, rng.gen_range(0..=max_k))
    }

    #[test]
    fn kernelize_preserves_decision_and_is_idempotent() {
        let mut rng = ChaCha20Rng::seed_from_u64(0xca11);
        for _ in 0..500 {
            let inst = random_instance(&mut rng, 12, 3);
            let report = kernelize(&inst).unwrap();
            assert!(report.bounds.all_hold());
            assert_eq!(
                decision_of(&report),
                exact_tds(&inst).unwrap().decision,
                "kernel decision differs on {inst:?}"
            );
            // Idempotence: kernelizing the kernel cannot grow it.
            if report.decided.is_none() {
                let again = kernelize(&report.kernel).unwrap();
                assert!(
                    again.kernel.graph.vertex_count() <= report.kernel.graph.vertex_count(),
                    "re-kernelization grew the kernel"
                );
            }
        }
    }

    /// Two hubs joined by `m` internally disjoint paths of `len` interior
    /// vertices each. With m ≥ k+2 the hub pair is heavy, its path
    /// components dodge C_g, and they get contracted into I-vertices.
    fn theta(m: usize, len: usize, k: i64) -> Instance {
        let mut g = MultiGraph::new();
        let a = g.add_vertex();
        let b = g.add_vertex();
        for _ in 0..m {
            let inner = g.add_vertices(len);
            g.add_edge(a, inner[0]).unwrap();
            for w in inner.windows(2) {
                g.add_edge(w[0], w[1]).unwrap();
            }
            g.add_edge(*inner.last().unwrap(), b).unwrap();
        }
        Instance::unit_weights(g, k)
    }

    #[test]
    fn equation_encoding_fields_are_consistent() {
        let mut exercised = 0usize;
        for k in 1..=3i64 {
            for m in (k as usize + 2)..=(k as usize + 4) {
                for len in 1..=2usize {
                    let inst = theta(m, len, k);
                    let SemiReduceResult::Reduced { instance: red, .. } = semi_reduce(&inst)
                    else {
                        panic!("theta graphs are not decided by the cascade");
                    };
                    let Ok(DecomposeOutcome::Done(dec)) = decompose(&red) else {
                        panic!("theta graphs decompose");
                    };
                    assert!(
                        !dec.i_set.is_empty(),
                        "a heavy hub pair must produce I-vertices (m={m}, len={len}, k={k})"
                    );
                    exercised += 1;
                    let enc = encode_equations(&dec);
                    assert_eq!(enc.system.len(), dec.i_set.len());
                    assert_eq!(enc.system.width(), dec.c_m.len() + 1);
                    for (&v, &i) in &enc.equation_index {
                        let row = enc.system.row(i);
                        assert_eq!(*row.last().unwrap(), coeff(-1));
                        assert_eq!(enc.system.tag(i), Some(v));
                        let nbrs: BTreeSet<VertexId> =
                            dec.instance.graph.neighbors(v).map(|(u, _)| u).collect();
                        for (&u, &j) in &enc.variable_index {
                            let expected =
                                if nbrs.contains(&u) { coeff(1) } else { coeff(0) };
                            assert_eq!(row[j], expected);
                        }
                    }
                }
            }
        }
        assert!(exercised >= 10);
    }

    #[test]
    fn theta_kernel_drops_redundant_equations() {
        // Five parallel hub paths at k=1: all five contracted vertices
        // share the equation x_a + x_b = 1; peeling keeps two of them.
        let inst = theta(5, 1, 1);
        let report = kernelize(&inst).unwrap();
        assert!(report.decided.is_none());
        assert_eq!(report.i_kept.len(), 2);
        assert!(report.kernel.graph.vertex_count() < inst.graph.vertex_count());
        assert_eq!(
            exact_tds(&report.kernel).unwrap().decision,
            exact_tds(&inst).unwrap().decision
        );
        assert!(report.bounds.all_hold());
    }
}
