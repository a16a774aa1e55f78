//! Multigraph primitives shared by every stage of the pipeline.
//!
//! Graphs are undirected, loopless, and carry edge multiplicities capped at
//! 2: a third parallel edge never changes which vertex sets are solutions,
//! so insertion saturates. Self-loops are rejected at the API boundary and
//! therefore unrepresentable. Adjacency lives in `BTreeMap`s so every
//! iteration order is the sorted-id order; nothing downstream has to sort
//! defensively to stay deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Stable vertex handle. Ids are never reused within a graph's lifetime,
/// so sets of ids taken before a mutation stay meaningful after it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(raw: u32) -> Self {
        VertexId(raw)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Normalizes an unordered vertex pair so it can key a map.
pub fn ordered_pair(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("self-loop on vertex {0} is not representable")]
    SelfLoop(VertexId),
    #[error("component is empty")]
    EmptyComponent,
    #[error("component {{{0}, ...}} is not connected")]
    DisconnectedComponent(VertexId),
    #[error("contracting the whole graph would leave no outside vertex")]
    ContractWholeGraph,
    #[error("vertex {outside} has a multiplicity-{multiplicity} connection into the component being contracted")]
    MultiEdgeIntoComponent { outside: VertexId, multiplicity: u8 },
}

/// Undirected multigraph with multiplicities in {1, 2}.
#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    adj: BTreeMap<VertexId, BTreeMap<VertexId, u8>>,
    next_id: u32,
}

impl PartialEq for MultiGraph {
    /// Structural equality on vertices and edges; the internal id allocator
    /// is deliberately ignored so a parsed copy compares equal to the
    /// original it was serialized from.
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for MultiGraph {}

impl MultiGraph {
    pub fn new() -> Self {
        MultiGraph {
            adj: BTreeMap::new(),
            next_id: 1,
        }
    }

    /// Creates a fresh vertex and returns its id. Ids count up from 1 and
    /// are never handed out twice, even after deletions.
    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_id);
        self.next_id += 1;
        self.adj.insert(id, BTreeMap::new());
        id
    }

    /// Creates `n` fresh vertices at once.
    pub fn add_vertices(&mut self, n: usize) -> Vec<VertexId> {
        (0..n).map(|_| self.add_vertex()).collect()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.adj.keys().copied().collect()
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if self.has_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    /// Adds one parallel edge between `u` and `v`, saturating at
    /// multiplicity 2.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.add_edge_with_multiplicity(u, v, 1)
    }

    /// Merges `mult` parallel edges (1 or 2) into the existing multiplicity,
    /// saturating at 2.
    pub fn add_edge_with_multiplicity(
        &mut self,
        u: VertexId,
        v: VertexId,
        mult: u8,
    ) -> Result<(), GraphError> {
        assert!(mult == 1 || mult == 2, "edge multiplicity must be 1 or 2");
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let m = self.adj.get_mut(&u).unwrap().entry(v).or_insert(0);
        *m = (*m + mult).min(2);
        let m2 = self.adj.get_mut(&v).unwrap().entry(u).or_insert(0);
        *m2 = (*m2 + mult).min(2);
        Ok(())
    }

    /// Multiplicity of the edge `{u, v}`; 0 when absent or either endpoint
    /// is unknown.
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u8 {
        self.adj
            .get(&u)
            .and_then(|nb| nb.get(&v))
            .copied()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.multiplicity(u, v) > 0
    }

    /// Neighbors of `v` with multiplicities, in sorted id order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u8)> + '_ {
        self.adj
            .get(&v)
            .into_iter()
            .flat_map(|nb| nb.iter().map(|(&u, &m)| (u, m)))
    }

    /// Degree counting multiplicities: a double edge contributes 2.
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).map(|(_, m)| m as usize).sum()
    }

    /// Number of distinct neighbors, ignoring multiplicities.
    pub fn simple_degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |nb| nb.len())
    }

    /// All edges as `(u, v, multiplicity)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, u8)> + '_ {
        self.adj.iter().flat_map(|(&u, nb)| {
            nb.iter()
                .filter(move |(&v, _)| u < v)
                .map(move |(&v, &m)| (u, v, m))
        })
    }

    /// Total edge count with double edges counted twice.
    pub fn edge_count(&self) -> usize {
        self.edges().map(|(_, _, m)| m as usize).sum()
    }

    /// Number of distinct adjacent pairs.
    pub fn distinct_edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Removes a vertex and all incident edges. Unknown ids are a caller
    /// bug and panic.
    pub fn remove_vertex(&mut self, v: VertexId) {
        let nb = self.adj.remove(&v).expect("remove_vertex: unknown vertex");
        for u in nb.keys() {
            self.adj.get_mut(u).unwrap().remove(&v);
        }
    }

    /// Removes one or both parallel edges; panics if fewer exist.
    pub fn remove_edge_multiplicity(&mut self, u: VertexId, v: VertexId, mult: u8) {
        let cur = self.multiplicity(u, v);
        assert!(
            cur >= mult && mult >= 1,
            "remove_edge_multiplicity: edge {{{u}, {v}}} has multiplicity {cur}, asked to remove {mult}"
        );
        if cur == mult {
            self.adj.get_mut(&u).unwrap().remove(&v);
            self.adj.get_mut(&v).unwrap().remove(&u);
        } else {
            *self.adj.get_mut(&u).unwrap().get_mut(&v).unwrap() = cur - mult;
            *self.adj.get_mut(&v).unwrap().get_mut(&u).unwrap() = cur - mult;
        }
    }

    /// The subgraph induced on `keep`. Ids (and the id allocator) carry
    /// over unchanged.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> MultiGraph {
        let mut adj = BTreeMap::new();
        for &v in keep {
            assert!(self.has_vertex(v), "induced: unknown vertex {v}");
            let nb: BTreeMap<VertexId, u8> = self
                .neighbors(v)
                .filter(|(u, _)| keep.contains(u))
                .collect();
            adj.insert(v, nb);
        }
        MultiGraph {
            adj,
            next_id: self.next_id,
        }
    }

    /// Connected components as sorted vertex sets, ordered by smallest
    /// member.
    pub fn connected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut comps = Vec::new();
        for start in self.vertices() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for (u, _) in self.neighbors(v) {
                    if seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Connected and acyclic. A double edge is a cycle, and the empty graph
    /// is not a tree (it has no vertex).
    pub fn is_tree(&self) -> bool {
        if self.adj.is_empty() {
            return false;
        }
        self.is_connected() && self.edge_count() == self.vertex_count() - 1
    }

    /// Acyclic (double edges count as cycles). The empty graph is a forest.
    pub fn is_forest(&self) -> bool {
        self.connected_components().iter().all(|comp| {
            let sub = self.induced(comp);
            sub.edge_count() == sub.vertex_count() - 1
        })
    }

    /// Vertices of the component containing `v`.
    pub fn component_of(&self, v: VertexId) -> BTreeSet<VertexId> {
        assert!(self.has_vertex(v), "component_of: unknown vertex {v}");
        let mut comp = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(w) = queue.pop_front() {
            for (u, _) in self.neighbors(w) {
                if comp.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        comp
    }

    /// Whether `a` and `b` are connected by a path.
    pub fn connected_pair(&self, a: VertexId, b: VertexId) -> bool {
        self.has_vertex(a) && self.has_vertex(b) && self.component_of(a).contains(&b)
    }
}

/// Copy of `g` with `vs` (and incident edges) removed. Ids of survivors are
/// untouched; deleting an unknown id is a no-op by design so callers can
/// pass solution sets that mention already-removed vertices.
pub fn delete_vertices(g: &MultiGraph, vs: &BTreeSet<VertexId>) -> MultiGraph {
    let keep: BTreeSet<VertexId> = g.vertices().filter(|v| !vs.contains(v)).collect();
    g.induced(&keep)
}

/// Replaces a connected set of vertices by a single fresh vertex whose
/// weight is the component's total weight.
///
/// Intended for tree components hanging off the core: the contraction is
/// only faithful when no outside vertex reaches the component with two or
/// more edge slots, so that situation is an error, as is contracting a
/// disconnected set or the entire graph. Outside vertices adjacent to the
/// component end up adjacent to the new vertex (multiplicity 1).
pub fn contract_component(
    g: &MultiGraph,
    comp: &BTreeSet<VertexId>,
    weights: &BTreeMap<VertexId, u64>,
) -> Result<(MultiGraph, VertexId, u64), GraphError> {
    let first = *comp.iter().next().ok_or(GraphError::EmptyComponent)?;
    for &v in comp {
        if !g.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
    }
    if comp.len() == g.vertex_count() {
        return Err(GraphError::ContractWholeGraph);
    }
    // Connectivity within the induced subgraph.
    if g.induced(comp).connected_components().len() != 1 {
        return Err(GraphError::DisconnectedComponent(first));
    }
    // Each outside vertex may touch the component through at most one edge
    // slot in total, otherwise contraction would have to fabricate a double
    // edge that the original graph does not justify.
    let mut boundary: BTreeMap<VertexId, u8> = BTreeMap::new();
    for &v in comp {
        for (u, m) in g.neighbors(v) {
            if !comp.contains(&u) {
                *boundary.entry(u).or_insert(0) += m;
            }
        }
    }
    if let Some((&outside, &multiplicity)) = boundary.iter().find(|(_, &m)| m > 1) {
        return Err(GraphError::MultiEdgeIntoComponent {
            outside,
            multiplicity,
        });
    }

    let mut out = delete_vertices(g, comp);
    out.next_id = g.next_id;
    let fresh = out.add_vertex();
    for &u in boundary.keys() {
        out.add_edge(fresh, u).expect("boundary vertex survived deletion");
    }
    let weight = comp
        .iter()
        .map(|v| weights.get(v).copied().expect("component vertex has a weight"))
        .sum();
    Ok((out, fresh, weight))
}

/// A wTDS instance: multigraph, positive vertex weights, budget `k`.
///
/// `k` is signed because Rule 1 style reasoning temporarily drives it
/// negative before the instance is rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: MultiGraph,
    weights: BTreeMap<VertexId, u64>,
    pub k: i64,
}

impl Instance {
    pub fn new(graph: MultiGraph, weights: BTreeMap<VertexId, u64>, k: i64) -> Self {
        for v in graph.vertices() {
            let w = weights.get(&v).copied();
            assert!(
                w.is_some() && w.unwrap() >= 1,
                "vertex {v} must carry a positive weight"
            );
        }
        assert!(
            weights.keys().all(|v| graph.has_vertex(*v)),
            "weight table mentions a vertex missing from the graph"
        );
        Instance { graph, weights, k }
    }

    /// Convenience constructor with all weights 1.
    pub fn unit_weights(graph: MultiGraph, k: i64) -> Self {
        let weights = graph.vertices().map(|v| (v, 1)).collect();
        Instance { graph, weights, k }
    }

    pub fn weight(&self, v: VertexId) -> u64 {
        *self.weights.get(&v).expect("weight of unknown vertex")
    }

    pub fn set_weight(&mut self, v: VertexId, w: u64) {
        assert!(w >= 1, "weights must stay positive");
        assert!(self.graph.has_vertex(v), "set_weight: unknown vertex {v}");
        self.weights.insert(v, w);
    }

    pub fn weights(&self) -> &BTreeMap<VertexId, u64> {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn set_weight_of(&self, vs: &BTreeSet<VertexId>) -> u64 {
        vs.iter().map(|v| self.weight(*v)).sum()
    }

    /// Adds a fresh vertex with the given weight.
    pub fn add_vertex(&mut self, w: u64) -> VertexId {
        assert!(w >= 1, "weights must stay positive");
        let v = self.graph.add_vertex();
        self.weights.insert(v, w);
        v
    }

    /// Instance with `vs` deleted from graph and weight table; `k` is
    /// unchanged (deletion here is structural, not "spending budget").
    pub fn delete_vertices(&self, vs: &BTreeSet<VertexId>) -> Instance {
        let graph = delete_vertices(&self.graph, vs);
        let weights = self
            .weights
            .iter()
            .filter(|(v, _)| graph.has_vertex(**v))
            .map(|(&v, &w)| (v, w))
            .collect();
        Instance {
            graph,
            weights,
            k: self.k,
        }
    }
}

/// Outcome of a decision-problem query: does a deletion set within budget
/// exist?
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Yes,
    No,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Yes => write!(f, "YES"),
            Decision::No => write!(f, "NO"),
        }
    }
}

/// Whether some cycle of `g` passes through `x`: either a double edge at
/// `x`, or two distinct neighbors of `x` that stay connected once `x` is
/// removed.
pub fn has_cycle_through(g: &MultiGraph, x: VertexId) -> bool {
    assert!(g.has_vertex(x), "has_cycle_through: unknown vertex {x}");
    if g.neighbors(x).any(|(_, m)| m == 2) {
        return true;
    }
    let rest = delete_vertices(g, &BTreeSet::from([x]));
    let nbs: Vec<VertexId> = g.neighbors(x).map(|(u, _)| u).collect();
    for comp in rest.connected_components() {
        if nbs.iter().filter(|u| comp.contains(u)).count() >= 2 {
            return true;
        }
    }
    false
}

/// A candidate deletion set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Solution {
    pub deleted: BTreeSet<VertexId>,
}

impl Solution {
    pub fn new(deleted: BTreeSet<VertexId>) -> Self {
        Solution { deleted }
    }

    pub fn weight(&self, inst: &Instance) -> u64 {
        inst.set_weight_of(&self.deleted)
    }

    /// Whether deleting this set leaves a tree and the weight fits in `k`.
    pub fn is_valid(&self, inst: &Instance) -> bool {
        if inst.k < 0 || self.weight(inst) > inst.k as u64 {
            return false;
        }
        if !self.deleted.iter().all(|v| inst.graph.has_vertex(*v)) {
            return false;
        }
        delete_vertices(&inst.graph, &self.deleted).is_tree()
    }
}
