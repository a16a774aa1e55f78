//! Structural decomposition of a semi-reduced instance.
//!
//! From a semi-reduced, connected instance this module produces an
//! equivalent instance whose vertices split into three sets:
//!
//! * `c_m` — a small core: an approximate feedback vertex set F together
//!   with the LCA-closures Q̂ of the per-vertex cycle covers Qˣ;
//! * `c_g` — whole components of G∖C_m that either witness a light pair
//!   of core vertices or touch two closure vertices; they induce a forest;
//! * `i_set` — each remaining component contracted to a single weighted
//!   vertex whose neighborhood is a double clique inside the core.
//!
//! Every size bound the construction promises is recorded in a
//! [`BoundLedger`] and enforced: a violated bound is a hard error naming
//! the inequality, never a silent pass.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flower::{flower_or_cover, FlowerOrCover};
use crate::fvs_approx::approx_fvs;
use crate::graph::{contract_component, delete_vertices, Instance, MultiGraph, VertexId};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("bound violated: {name} ({lhs} > {rhs})")]
    BoundViolated { name: String, lhs: i128, rhs: i128 },
    #[error("structural invariant violated: {0}")]
    Structural(String),
}

/// One asserted inequality `lhs ≤ rhs`, kept with its evaluated sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: i128,
    pub rhs: i128,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Record of every inequality asserted during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundLedger {
    pub checks: Vec<BoundCheck>,
}

impl BoundLedger {
    /// Records the inequality and fails if it does not hold.
    pub fn record(&mut self, name: &str, lhs: i128, rhs: i128) -> Result<(), DecompositionError> {
        self.checks.push(BoundCheck {
            name: name.to_string(),
            lhs,
            rhs,
        });
        if lhs <= rhs {
            Ok(())
        } else {
            Err(DecompositionError::BoundViolated {
                name: name.to_string(),
                lhs,
                rhs,
            })
        }
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(BoundCheck::holds)
    }

    pub fn extend(&mut self, other: BoundLedger) {
        self.checks.extend(other.checks);
    }
}

/// A tree with a fixed root, parent pointers and depths, enough for LCA
/// queries at desk scale.
#[derive(Clone, Debug)]
pub struct RootedTree {
    root: VertexId,
    parent: BTreeMap<VertexId, Option<VertexId>>,
    depth: BTreeMap<VertexId, usize>,
}

impl RootedTree {
    /// Roots the tree `g` at `root`. Panics if `g` is not a tree or the
    /// root is missing — callers hold both by construction.
    pub fn new(g: &MultiGraph, root: VertexId) -> Self {
        assert!(g.is_tree(), "RootedTree requires a tree");
        assert!(g.has_vertex(root), "root must belong to the tree");
        let mut parent: BTreeMap<VertexId, Option<VertexId>> = BTreeMap::new();
        let mut depth: BTreeMap<VertexId, usize> = BTreeMap::new();
        parent.insert(root, None);
        depth.insert(root, 0);
        let mut queue = vec![root];
        while let Some(v) = queue.pop() {
            let d = depth[&v];
            for (u, _) in g.neighbors(v) {
                if let Entry::Vacant(slot) = parent.entry(u) {
                    slot.insert(Some(v));
                    depth.insert(u, d + 1);
                    queue.push(u);
                }
            }
        }
        RootedTree {
            root,
            parent,
            depth,
        }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.parent.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.parent.keys().copied()
    }

    fn up(&self, v: VertexId) -> Option<VertexId> {
        self.parent[&v]
    }

    /// Least common ancestor by lifting the deeper vertex, then walking
    /// both upward in lockstep.
    pub fn lca(&self, u: VertexId, v: VertexId) -> VertexId {
        assert!(self.contains(u) && self.contains(v), "lca of foreign vertices");
        let (mut a, mut b) = (u, v);
        while self.depth[&a] > self.depth[&b] {
            a = self.up(a).expect("deeper vertex has a parent");
        }
        while self.depth[&b] > self.depth[&a] {
            b = self.up(b).expect("deeper vertex has a parent");
        }
        while a != b {
            a = self.up(a).expect("non-root vertices have parents");
            b = self.up(b).expect("non-root vertices have parents");
        }
        a
    }
}

/// Closes `m` under pairwise least common ancestors by repeatedly adding
/// missing LCAs until a fixpoint. The closure M′ satisfies |M′| ≤ 2|m| and
/// leaves every component of tree∖M′ with at most two neighbors in M′;
/// both guarantees are asserted.
pub fn lca_closure(tree: &RootedTree, m: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    for &v in m {
        assert!(tree.contains(v), "closure of vertices outside the tree");
    }
    let mut closed: BTreeSet<VertexId> = m.clone();
    loop {
        let mut added = false;
        let current: Vec<VertexId> = closed.iter().copied().collect();
        for (i, &u) in current.iter().enumerate() {
            for &v in &current[i + 1..] {
                if closed.insert(tree.lca(u, v)) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    assert!(
        closed.len() <= 2 * m.len(),
        "LCA closure grew past twice the seed size"
    );
    // Residual components see at most two closure vertices.
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for v in tree.vertices() {
        if let Some(p) = tree.up(v) {
            adj.entry(v).or_default().push(p);
            adj.entry(p).or_default().push(v);
        }
    }
    let mut unvisited: BTreeSet<VertexId> =
        tree.vertices().filter(|v| !closed.contains(v)).collect();
    while let Some(&start) = unvisited.iter().next() {
        let mut stack = vec![start];
        unvisited.remove(&start);
        let mut boundary: BTreeSet<VertexId> = BTreeSet::new();
        while let Some(v) = stack.pop() {
            for &u in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if closed.contains(&u) {
                    boundary.insert(u);
                } else if unvisited.remove(&u) {
                    stack.push(u);
                }
            }
        }
        assert!(
            boundary.len() <= 2,
            "a residual component touches {} closure vertices",
            boundary.len()
        );
    }
    closed
}

/// Class of a component of G∖C_m by its number of Q̂-neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentClass {
    C0,
    C1,
    C2,
}

/// For a core pair {y,y′}: the components witnessing it and their count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairStat {
    pub components: Vec<BTreeSet<VertexId>>,
    pub count: usize,
}

/// Intermediate structure: the core and everything needed to classify the
/// rest of the graph around it. Exposed for tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaffold {
    pub f: BTreeSet<VertexId>,
    pub q: BTreeSet<VertexId>,
    pub q_hat: BTreeSet<VertexId>,
    pub classification: BTreeMap<BTreeSet<VertexId>, ComponentClass>,
    pub pair_stats: BTreeMap<(VertexId, VertexId), PairStat>,
}

impl Scaffold {
    pub fn c_m(&self) -> BTreeSet<VertexId> {
        self.q_hat.union(&self.f).copied().collect()
    }
}

/// Scaffold construction either succeeds or certifies a NO instance
/// (the approximate feedback vertex set came out larger than 2k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaffoldOutcome {
    Built(Scaffold),
    DecidedNo,
}

/// Builds the core C_m = Q̂ ∪ F of a semi-reduced instance along with the
/// component classification and pair statistics.
pub fn build_scaffold(inst: &Instance) -> Result<ScaffoldOutcome, DecompositionError> {
    build_scaffold_recording(inst, &mut BoundLedger::default())
}

fn build_scaffold_recording(
    inst: &Instance,
    bounds: &mut BoundLedger,
) -> Result<ScaffoldOutcome, DecompositionError> {
    debug_assert!(
        crate::reductions::is_semi_reduced(inst),
        "scaffold construction expects a semi-reduced instance"
    );
    let g = &inst.graph;
    let k = inst.k;
    if k < 0 {
        return Err(DecompositionError::Structural(
            "semi-reduced instances never carry a negative budget".into(),
        ));
    }

    let f = approx_fvs(g).fvs;
    if f.len() as i128 > 2 * k as i128 {
        return Ok(ScaffoldOutcome::DecidedNo);
    }
    bounds.record("|F| <= 2k", f.len() as i128, 2 * k as i128)?;

    // Per-core-vertex cycle covers. Semi-reducedness rules out a flower of
    // order k+1, so the dichotomy must come back with a cover.
    let mut q: BTreeSet<VertexId> = BTreeSet::new();
    let mut max_cover = 0usize;
    for &x in &f {
        match flower_or_cover(g, x, k as usize) {
            FlowerOrCover::Flower(_) => {
                return Err(DecompositionError::Structural(format!(
                    "found a flower of order > k at vertex {x} in a supposedly semi-reduced instance"
                )));
            }
            FlowerOrCover::Cover(z) => {
                max_cover = max_cover.max(z.len());
                q.extend(z);
            }
        }
    }
    bounds.record("max_x |Q^x| <= 2k", max_cover as i128, 2 * k as i128)?;
    bounds.record("|Q| <= 4k^2", q.len() as i128, 4 * (k as i128).pow(2))?;

    // LCA-closures inside the trees of G∖F (rooted at their minimum
    // vertex). Cover vertices that landed inside F are already core.
    let forest = delete_vertices(g, &f);
    let mut q_hat: BTreeSet<VertexId> = BTreeSet::new();
    for comp in forest.connected_components() {
        let tree_graph = forest.induced(&comp);
        if !tree_graph.is_tree() {
            return Err(DecompositionError::Structural(
                "approx_fvs left a cycle behind".into(),
            ));
        }
        let root = *comp.iter().next().expect("components are non-empty");
        let tree = RootedTree::new(&tree_graph, root);
        let q_i: BTreeSet<VertexId> = comp.intersection(&q).copied().collect();
        q_hat.extend(lca_closure(&tree, &q_i));
    }
    debug_assert!(q_hat.is_disjoint(&f));
    bounds.record("|Q_hat| <= 2|Q|", q_hat.len() as i128, 2 * q.len() as i128)?;
    bounds.record("|Q_hat| <= 8k^2", q_hat.len() as i128, 8 * (k as i128).pow(2))?;

    let c_m: BTreeSet<VertexId> = q_hat.union(&f).copied().collect();
    bounds.record(
        "|C_m| <= 8k^2+2k",
        c_m.len() as i128,
        8 * (k as i128).pow(2) + 2 * k as i128,
    )?;

    // Classification of the components of G∖C_m, with the structural
    // guarantees that make the later contraction sound.
    let residue = delete_vertices(g, &c_m);
    let mut classification: BTreeMap<BTreeSet<VertexId>, ComponentClass> = BTreeMap::new();
    let mut comp_core_nbrs: BTreeMap<BTreeSet<VertexId>, BTreeSet<VertexId>> = BTreeMap::new();
    let mut largest_comp = 0usize;
    for comp in residue.connected_components() {
        largest_comp = largest_comp.max(comp.len());
        // Every core vertex reaches a component through at most one vertex.
        for &y in &c_m {
            let hits = g
                .neighbors(y)
                .filter(|(u, _)| comp.contains(u))
                .count();
            if hits > 1 {
                return Err(DecompositionError::Structural(format!(
                    "core vertex {y} has {hits} neighbors in one residual component"
                )));
            }
        }
        let core_nbrs: BTreeSet<VertexId> = comp
            .iter()
            .flat_map(|&v| g.neighbors(v).map(|(u, _)| u))
            .filter(|u| c_m.contains(u))
            .collect();
        let hat_nbrs = core_nbrs.intersection(&q_hat).count();
        let class = match hat_nbrs {
            0 => ComponentClass::C0,
            1 => ComponentClass::C1,
            2 => ComponentClass::C2,
            n => {
                return Err(DecompositionError::Structural(format!(
                    "a residual component touches {n} closure vertices"
                )))
            }
        };
        classification.insert(comp.clone(), class);
        comp_core_nbrs.insert(comp, core_nbrs);
    }
    bounds.record(
        "max residual component size <= 8k+8",
        largest_comp as i128,
        8 * k as i128 + 8,
    )?;
    let c2_count = classification
        .values()
        .filter(|&&c| c == ComponentClass::C2)
        .count();
    bounds.record(
        "|C2| <= |Q_hat|-1",
        c2_count as i128,
        if c2_count == 0 {
            0
        } else {
            q_hat.len() as i128 - 1
        },
    )?;

    // Pair statistics over core pairs with at most one endpoint in Q̂.
    let core: Vec<VertexId> = c_m.iter().copied().collect();
    let mut pair_stats: BTreeMap<(VertexId, VertexId), PairStat> = BTreeMap::new();
    for (i, &y) in core.iter().enumerate() {
        for &y2 in &core[i + 1..] {
            if q_hat.contains(&y) && q_hat.contains(&y2) {
                continue;
            }
            let mut stat = PairStat::default();
            for (comp, class) in &classification {
                if *class == ComponentClass::C2 {
                    continue;
                }
                let nbrs = &comp_core_nbrs[comp];
                if nbrs.contains(&y) && nbrs.contains(&y2) {
                    stat.components.push(comp.clone());
                }
            }
            stat.count = stat.components.len();
            pair_stats.insert((y, y2), stat);
        }
    }

    Ok(ScaffoldOutcome::Built(Scaffold {
        f,
        q,
        q_hat,
        classification,
        pair_stats,
    }))
}

/// Adds a double edge between every core pair witnessed by at least k+2
/// light-class components: any solution avoiding both endpoints would need
/// more than k deletions to break their shared cycles, so one endpoint is
/// forced into every solution, which is exactly what a double edge says.
pub fn augment_heavy_pairs(inst: &Instance, scaffold: &Scaffold) -> Instance {
    let mut out = inst.clone();
    for (&(y, y2), stat) in &scaffold.pair_stats {
        if stat.count as i128 >= inst.k as i128 + 2 {
            out.graph
                .add_edge_with_multiplicity(y, y2, 2)
                .expect("core vertices exist");
        }
    }
    out
}

/// The finished decomposition: an equivalent instance partitioned into
/// core, forest, and contracted independent set.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub instance: Instance,
    pub c_m: BTreeSet<VertexId>,
    pub c_g: BTreeSet<VertexId>,
    pub i_set: BTreeSet<VertexId>,
    pub augmented_pairs: BTreeSet<(VertexId, VertexId)>,
    pub contraction_map: BTreeMap<VertexId, BTreeSet<VertexId>>,
    /// The scaffold the decomposition was built from, for inspection.
    pub scaffold: Scaffold,
    /// Every inequality asserted along the way.
    pub bounds: BoundLedger,
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)] // returned once per call; boxing buys nothing
pub enum DecomposeOutcome {
    Done(Decomposition),
    DecidedNo,
}

/// Runs the full decomposition on a semi-reduced, connected instance with
/// at least two vertices. Any failed size bound or structural guarantee is
/// a hard error naming the culprit.
pub fn decompose(inst: &Instance) -> Result<DecomposeOutcome, DecompositionError> {
    if !inst.graph.is_connected() {
        return Err(DecompositionError::Structural(
            "decomposition expects a connected instance".into(),
        ));
    }
    if inst.graph.vertex_count() < 2 {
        return Err(DecompositionError::Structural(
            "decomposition expects at least two vertices".into(),
        ));
    }
    let mut bounds = BoundLedger::default();
    let scaffold = match build_scaffold_recording(inst, &mut bounds)? {
        ScaffoldOutcome::DecidedNo => return Ok(DecomposeOutcome::DecidedNo),
        ScaffoldOutcome::Built(s) => s,
    };
    if scaffold.f.is_empty() {
        return Err(DecompositionError::Structural(
            "a connected semi-reduced instance with >= 2 vertices must contain a cycle".into(),
        ));
    }
    let k = inst.k;
    let c_m = scaffold.c_m();

    let augmented_pairs: BTreeSet<(VertexId, VertexId)> = scaffold
        .pair_stats
        .iter()
        .filter(|(_, stat)| stat.count as i128 >= k as i128 + 2)
        .map(|(&pair, _)| pair)
        .collect();
    let ghat = augment_heavy_pairs(inst, &scaffold);

    // C_g: components named by some light pair, plus every two-closure
    // component.
    let mut c_g_comps: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
    for stat in scaffold.pair_stats.values() {
        if stat.count as i128 <= k as i128 + 1 {
            c_g_comps.extend(stat.components.iter().cloned());
        }
    }
    for (comp, class) in &scaffold.classification {
        if *class == ComponentClass::C2 {
            c_g_comps.insert(comp.clone());
        }
    }
    let c_g: BTreeSet<VertexId> = c_g_comps.iter().flatten().copied().collect();
    bounds.record(
        "|C_g| <= 160k^4+248k^3+80k^2-16k-8",
        c_g.len() as i128,
        160 * (k as i128).pow(4) + 248 * (k as i128).pow(3) + 80 * (k as i128).pow(2)
            - 16 * k as i128
            - 8,
    )?;
    if !ghat.graph.induced(&c_g).is_forest() {
        return Err(DecompositionError::Structural(
            "C_g does not induce a forest".into(),
        ));
    }

    // Contract every remaining component to a single vertex.
    let keep: BTreeSet<VertexId> = c_m.union(&c_g).copied().collect();
    let remaining: Vec<BTreeSet<VertexId>> = ghat
        .graph
        .induced(
            &ghat
                .graph
                .vertex_set()
                .difference(&keep)
                .copied()
                .collect(),
        )
        .connected_components();
    let mut cur = ghat;
    let mut i_set: BTreeSet<VertexId> = BTreeSet::new();
    let mut contraction_map: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for comp in remaining {
        let outside: BTreeSet<VertexId> = comp
            .iter()
            .flat_map(|&v| cur.graph.neighbors(v).map(|(u, _)| u))
            .filter(|u| !comp.contains(u))
            .collect();
        if let Some(bad) = outside.iter().find(|u| !c_m.contains(u)) {
            return Err(DecompositionError::Structural(format!(
                "a contracted component touches non-core vertex {bad}"
            )));
        }
        let (g2, fresh, w) = contract_component(&cur.graph, &comp, cur.weights())
            .map_err(|e| DecompositionError::Structural(e.to_string()))?;
        let mut weights = cur.weights().clone();
        for v in &comp {
            weights.remove(v);
        }
        weights.insert(fresh, w);
        cur = Instance::new(g2, weights, cur.k);
        i_set.insert(fresh);
        contraction_map.insert(fresh, comp);
    }

    // Final structural verification on the produced instance.
    let verts = cur.graph.vertex_set();
    let union: BTreeSet<VertexId> = c_m
        .union(&c_g)
        .copied()
        .chain(i_set.iter().copied())
        .collect();
    if union != verts || c_m.len() + c_g.len() + i_set.len() != verts.len() {
        return Err(DecompositionError::Structural(
            "C_m, C_g, I do not partition the decomposed instance".into(),
        ));
    }
    let mut max_i_degree = 0usize;
    for &v in &i_set {
        let nbrs: Vec<VertexId> = cur.graph.neighbors(v).map(|(u, _)| u).collect();
        max_i_degree = max_i_degree.max(nbrs.len());
        for &u in &nbrs {
            if i_set.contains(&u) {
                return Err(DecompositionError::Structural(
                    "I is not an independent set".into(),
                ));
            }
            if !c_m.contains(&u) {
                return Err(DecompositionError::Structural(
                    "an I-vertex has a neighbor outside C_m".into(),
                ));
            }
        }
        for (i, &u) in nbrs.iter().enumerate() {
            for &u2 in &nbrs[i + 1..] {
                if cur.graph.multiplicity(u, u2) != 2 {
                    return Err(DecompositionError::Structural(format!(
                        "the neighborhood of I-vertex {v} is not a double clique"
                    )));
                }
            }
        }
    }
    bounds.record("max I-vertex degree <= 2k+1", max_i_degree as i128, 2 * k as i128 + 1)?;
    assert_eq!(cur.k, inst.k, "decomposition never changes the budget");

    Ok(DecomposeOutcome::Done(Decomposition {
        instance: cur,
        c_m,
        c_g,
        i_set,
        augmented_pairs,
        contraction_map,
        scaffold,
        bounds,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Decision, Instance};
    use crate::oracle::exact_tds;
    use crate::reductions::{semi_reduce, SemiReduceResult};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn path_graph(n: usize) -> (MultiGraph, Vec<VertexId>) {
        let mut g = MultiGraph::new();
        let vs = g.add_vertices(n);
        for w in vs.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
        (g, vs)
    }

    #[test]
    fn lca_closure_trivial_cases() {
        // Star rooted at the center: the closure of two leaves adds the
        // root.
        let mut g = MultiGraph::new();
        let r = g.add_vertex();
        let a = g.add_vertex();
        let b = g.add_vertex();
        g.add_edge(r, a).unwrap();
        g.add_edge(r, b).unwrap();
        let tree = RootedTree::new(&g, r);
        assert_eq!(
            lca_closure(&tree, &BTreeSet::from([a, b])),
            BTreeSet::from([a, b, r])
        );

        // Path rooted at one end: an ancestor pair closes to itself.
        let (pg, vs) = path_graph(5);
        let tree = RootedTree::new(&pg, vs[0]);
        assert_eq!(
            lca_closure(&tree, &BTreeSet::from([vs[2], vs[4]])),
            BTreeSet::from([vs[2], vs[4]])
        );

        assert_eq!(lca_closure(&tree, &BTreeSet::new()), BTreeSet::new());
    }

    #[test]
    fn lca_closure_random_trees() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=14);
            let mut g = MultiGraph::new();
            let vs = g.add_vertices(n);
            for i in 1..n {
                let p = rng.gen_range(0..i);
                g.add_edge(vs[i], vs[p]).unwrap();
            }
            let root = vs[0];
            let tree = RootedTree::new(&g, root);
            let m: BTreeSet<VertexId> = vs
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            let closed = lca_closure(&tree, &m);
            assert!(closed.is_superset(&m));
            assert!(closed.len() <= 2 * m.len());
            let closed_vec: Vec<VertexId> = closed.iter().copied().collect();
            for (i, &u) in closed_vec.iter().enumerate() {
                for &v in &closed_vec[i + 1..] {
                    assert!(closed.contains(&tree.lca(u, v)), "closure not closed");
                }
            }
        }
    }

    /// Butterfly: two triangles sharing a center. Semi-reduced for k = 2.
    fn butterfly() -> Instance {
        let mut g = MultiGraph::new();
        let vs = g.add_vertices(5);
        for pair in [[vs[1], vs[2]], [vs[3], vs[4]]] {
            g.add_edge(vs[0], pair[0]).unwrap();
            g.add_edge(vs[0], pair[1]).unwrap();
            g.add_edge(pair[0], pair[1]).unwrap();
        }
        Instance::unit_weights(g, 2)
    }

    #[test]
    fn scaffold_on_butterfly() {
        let inst = butterfly();
        assert!(crate::reductions::is_semi_reduced(&inst));
        let ScaffoldOutcome::Built(scaffold) = build_scaffold(&inst).unwrap() else {
            panic!("butterfly at k=2 is not a NO instance");
        };
        assert!(scaffold.f.len() <= 4);
        let c_m = scaffold.c_m();
        // Classification is total over the residual components.
        let residue = delete_vertices(&inst.graph, &c_m);
        assert_eq!(
            residue.connected_components().len(),
            scaffold.classification.len()
        );
    }

    #[test]
    fn scaffold_double_edge_core() {
        // Double edge a=b extended to a triangle a–b–c: semi-reduced at
        // k=1; the core must cover the double-edge pair, and no component
        // can see two closure vertices.
        let mut g = MultiGraph::new();
        let a = g.add_vertex();
        let b = g.add_vertex();
        let c = g.add_vertex();
        g.add_edge_with_multiplicity(a, b, 2).unwrap();
        g.add_edge(a, c).unwrap();
        g.add_edge(b, c).unwrap();
        let inst = Instance::unit_weights(g, 1);
        assert!(crate::reductions::is_semi_reduced(&inst));
        let ScaffoldOutcome::Built(scaffold) = build_scaffold(&inst).unwrap() else {
            panic!("triangle with a doubled side is YES at k=1");
        };
        let c_m = scaffold.c_m();
        assert!(c_m.contains(&a) || c_m.contains(&b));
        let c2 = scaffold
            .classification
            .values()
            .filter(|&&cl| cl == ComponentClass::C2)
            .count();
        assert_eq!(c2, 0);
    }

    #[test]
    fn augment_boundary() {
        // Hand-built scaffold: augmentation triggers at count = k+2 and
        // not at k+1, and does nothing without qualifying pairs.
        let (g, vs) = path_graph(2);
        let inst = Instance::unit_weights(g, 1);
        let mk_scaffold = |count: usize| Scaffold {
            f: BTreeSet::from([vs[0], vs[1]]),
            q: BTreeSet::new(),
            q_hat: BTreeSet::new(),
            classification: BTreeMap::new(),
            pair_stats: BTreeMap::from([(
                (vs[0], vs[1]),
                PairStat {
                    components: vec![BTreeSet::new(); count],
                    count,
                },
            )]),
        };
        let heavy = augment_heavy_pairs(&inst, &mk_scaffold(3)); // k+2 = 3
        assert_eq!(heavy.graph.multiplicity(vs[0], vs[1]), 2);
        let light = augment_heavy_pairs(&inst, &mk_scaffold(2)); // k+1 = 2
        assert_eq!(light.graph.multiplicity(vs[0], vs[1]), 1);
        let none = augment_heavy_pairs(
            &inst,
            &Scaffold {
                pair_stats: BTreeMap::new(),
                ..mk_scaffold(0)
            },
        );
        assert_eq!(none.graph, inst.graph);
    }

    #[test]
    fn decompose_butterfly_partitions() {
        let inst = butterfly();
        let DecomposeOutcome::Done(dec) = decompose(&inst).unwrap() else {
            panic!("butterfly at k=2 decomposes");
        };
        let verts = dec.instance.graph.vertex_set();
        let union: BTreeSet<VertexId> = dec
            .c_m
            .union(&dec.c_g)
            .copied()
            .chain(dec.i_set.iter().copied())
            .collect();
        assert_eq!(union, verts);
        assert!(dec.bounds.all_hold());
        assert_eq!(dec.instance.k, inst.k);
        // Equivalence with the input.
        assert_eq!(
            exact_tds(&dec.instance).unwrap().decision,
            exact_tds(&inst).unwrap().decision
        );
    }

    #[test]
    fn decompose_rejects_disconnected_and_tiny() {
        let mut g = MultiGraph::new();
        g.add_vertices(2);
        assert!(matches!(
            decompose(&Instance::unit_weights(g, 1)),
            Err(DecompositionError::Structural(_))
        ));
        let mut g1 = MultiGraph::new();
        g1.add_vertex();
        assert!(matches!(
            decompose(&Instance::unit_weights(g1, 1)),
            Err(DecompositionError::Structural(_))
        ));
    }

    fn random_instance(rng: &mut ChaCha20Rng, max_n: usize, max_k: i64) -> Instance {
        let n = rng.gen_range(2..=max_n);
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
        let weights: std::collections::BTreeMap<_, _> =
            vs.iter().map(|&v| (v, rng.gen_range(1..=3u64))).collect();
        Instance::new(g, weights, rng.gen_range(0..=max_k))
    }

    #[test]
    fn decompose_preserves_decision_on_random_instances() {
        let mut rng = ChaCha20Rng::seed_from_u64(0xdeca);
        let mut reached = 0usize;
        for _ in 0..1000 {
            let inst = random_instance(&mut rng, 12, 3);
            let SemiReduceResult::Reduced { instance: reduced, .. } = semi_reduce(&inst) else {
                continue;
            };
            if reduced.graph.vertex_count() < 2 || !reduced.graph.is_connected() {
                continue;
            }
            reached += 1;
            let expected = exact_tds(&reduced).unwrap().decision;
            match decompose(&reduced).unwrap() {
                DecomposeOutcome::DecidedNo => {
                    assert_eq!(expected, Decision::No, "wrong NO on {reduced:?}");
                }
                DecomposeOutcome::Done(dec) => {
                    assert!(dec.bounds.all_hold());
                    assert_eq!(
                        exact_tds(&dec.instance).unwrap().decision,
                        expected,
                        "decision changed on {reduced:?}"
                    );
                    // Contracted weights are conserved.
                    for (v, comp) in &dec.contraction_map {
                        let total: u64 = comp.iter().map(|u| reduced.weight(*u)).sum();
                        assert_eq!(dec.instance.weight(*v), total);
                    }
                    // Each light-pair component really touches both
                    // endpoints of its pair.
                    for (&(y, y2), stat) in &dec.scaffold.pair_stats {
                        for comp in &stat.components {
                            for &end in &[y, y2] {
                                assert!(comp
                                    .iter()
                                    .any(|&h| reduced.graph.has_edge(end, h)));
                            }
                        }
                    }
                }
            }
        }
        assert!(reached >= 50, "only {reached} instances reached decomposition");
    }
}
