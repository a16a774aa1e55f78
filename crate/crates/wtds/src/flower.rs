//! Flower-or-cover dichotomy at a vertex x.
//!
//! An x-flower of order t is a set of t cycles through x that pairwise
//! share only x. This module either exhibits a flower of order ≥ k+1 or
//! returns a set Z of at most 2k non-x vertices meeting every cycle
//! through x.
//!
//! Construction: subdivide each edge slot at x into a fresh terminal (a
//! double edge yields two terminals on the same neighbor) and delete x;
//! x-flowers correspond exactly to packings of vertex-disjoint paths
//! between terminals. Such path packings are solved by Gallai's classical
//! reduction: every interior vertex is doubled and joined by a "twin"
//! edge, so a maximum matching of the auxiliary graph has size
//! (#interior) + (#disjoint terminal paths). The matching comes from the
//! blossom implementation in [`crate::matching`].
//!
//! The cover comes from Gallai's min–max formula
//! ν = min_B (|B| + Σ_components ⌊#terminals/2⌋): interior vertices whose
//! deletion drops ν belong to an optimal B and are peeled off one at a
//! time; at the fixpoint the formula needs no interior vertices at all, so
//! taking all-but-one terminal per remaining component finishes a cover of
//! size ≤ 2ν. Both outputs are structurally validated before being
//! returned; a validation failure is a bug and panics rather than
//! returning a wrong answer.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{delete_vertices, has_cycle_through, MultiGraph, VertexId};
use crate::matching::{augment_exposed, matching_size, maximum_matching};

/// Either a flower of order ≥ k+1 (each cycle listed as `[x, y₁, …, yₘ]`)
/// or a cover Z ⊆ V∖{x} of every cycle through x with |Z| ≤ 2k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowerOrCover {
    Flower(Vec<Vec<VertexId>>),
    Cover(BTreeSet<VertexId>),
}

/// The terminal/interior view of cycles through `x`, restricted to x's
/// connected component.
struct Aux {
    /// Non-x vertices of x's component, sorted; "interior" candidates.
    reals: Vec<VertexId>,
    /// Simple adjacency among `reals`, as indices into `reals`.
    real_adj: Vec<Vec<usize>>,
    /// One entry per edge slot at x: the owning real's index. A double
    /// edge contributes two terminals on the same owner.
    owners: Vec<usize>,
}

impl Aux {
    fn build(g: &MultiGraph, x: VertexId) -> Aux {
        assert!(g.has_vertex(x), "flower construction at unknown vertex {x}");
        let comp = g.component_of(x);
        let reals: Vec<VertexId> = comp.iter().copied().filter(|&v| v != x).collect();
        let pos: BTreeMap<VertexId, usize> =
            reals.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let real_adj: Vec<Vec<usize>> = reals
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .filter(|&(u, _)| u != x)
                    .map(|(u, _)| pos[&u])
                    .collect()
            })
            .collect();
        let mut owners = Vec::new();
        for (y, m) in g.neighbors(x) {
            for _ in 0..m {
                owners.push(pos[&y]);
            }
        }
        Aux {
            reals,
            real_adj,
            owners,
        }
    }
}

/// One matching run over the auxiliary doubled graph, with some interior
/// vertices deleted (the cover peeling needs restricted reruns).
struct AuxMatch {
    /// Surviving interior vertices (indices into `Aux::reals`), sorted.
    alive: Vec<usize>,
    /// Surviving terminals (indices into `Aux::owners`): owner not deleted.
    terms: Vec<usize>,
    mate: Vec<Option<usize>>,
    /// Node ids < `real_nodes` are interior copies (interior p ↦ 2p, 2p+1);
    /// node `real_nodes + j` is terminal `terms[j]`.
    real_nodes: usize,
    /// Auxiliary adjacency, kept for incremental re-matching.
    adj: Vec<Vec<usize>>,
}

impl AuxMatch {
    fn run(aux: &Aux, dead: &BTreeSet<usize>) -> AuxMatch {
        let alive: Vec<usize> = (0..aux.reals.len()).filter(|i| !dead.contains(i)).collect();
        let mut apos: Vec<Option<usize>> = vec![None; aux.reals.len()];
        for (p, &i) in alive.iter().enumerate() {
            apos[i] = Some(p);
        }
        let terms: Vec<usize> = (0..aux.owners.len())
            .filter(|t| !dead.contains(&aux.owners[*t]))
            .collect();
        let real_nodes = 2 * alive.len();
        let n = real_nodes + terms.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let link = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| {
            adj[a].push(b);
            adj[b].push(a);
        };
        for (p, &i) in alive.iter().enumerate() {
            link(&mut adj, 2 * p, 2 * p + 1); // twin edge
            for &j in &aux.real_adj[i] {
                if let Some(q) = apos[j] {
                    if q > p {
                        for c in 0..2 {
                            for d in 0..2 {
                                link(&mut adj, 2 * p + c, 2 * q + d);
                            }
                        }
                    }
                }
            }
        }
        for (tp, &t) in terms.iter().enumerate() {
            let o = apos[aux.owners[t]].expect("terminal owner survives");
            link(&mut adj, real_nodes + tp, 2 * o);
            link(&mut adj, real_nodes + tp, 2 * o + 1);
        }
        let mate = maximum_matching(n, &adj);
        AuxMatch {
            alive,
            terms,
            mate,
            real_nodes,
            adj,
        }
    }

    /// Maximum number of disjoint terminal-terminal paths: the matching
    /// exceeds the all-twins baseline by exactly that much.
    fn nu(&self) -> usize {
        matching_size(&self.mate) - self.alive.len()
    }

    /// Whether additionally deleting the interior vertex `i` (an index into
    /// `Aux::reals`, currently alive) lowers ν. Deleting one interior pair
    /// lowers the maximum matching by exactly 1 (ν unchanged) or 2 (ν
    /// drops), and an augmenting path in the masked graph must start at one
    /// of the newly exposed mates, so two re-augmentation attempts settle
    /// the new size exactly.
    fn nu_drops_without(&self, i: usize) -> bool {
        let p = self.alive.binary_search(&i).expect("candidate interior is alive");
        let (a, b) = (2 * p, 2 * p + 1);
        let mut mate = self.mate.clone();
        let mut skip = vec![false; mate.len()];
        skip[a] = true;
        skip[b] = true;
        let mut newly: Vec<usize> = Vec::new();
        for node in [a, b] {
            if let Some(w) = mate[node] {
                mate[node] = None;
                mate[w] = None;
                if w != a && w != b {
                    newly.push(w);
                }
            }
        }
        let mut size = matching_size(&mate);
        for w in newly {
            if mate[w].is_none() && augment_exposed(w, &self.adj, &mut mate, &skip) {
                size += 1;
            }
        }
        let s = matching_size(&self.mate);
        debug_assert!(size == s - 1 || size == s - 2);
        size == s - 2
    }

    /// Rewrites the matching so every interior pair is matched as a unit,
    /// then reads off the ν disjoint paths (as interior index sequences).
    fn extract_paths(&mut self) -> Vec<Vec<usize>> {
        let expect = self.nu();
        let rn = self.real_nodes;
        // Half-matched pairs rematch onto their twin edge: size is
        // preserved, and the twin count rises each round, so this stops.
        loop {
            let mut changed = false;
            for p in 0..rn / 2 {
                let (a, b) = (2 * p, 2 * p + 1);
                let rewire = match (self.mate[a], self.mate[b]) {
                    (Some(w), None) => Some((a, b, w)),
                    (None, Some(w)) => Some((b, a, w)),
                    _ => None,
                };
                if let Some((m_end, free_end, w)) = rewire {
                    self.mate[w] = None;
                    self.mate[m_end] = Some(free_end);
                    self.mate[free_end] = Some(m_end);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // In a maximum matching no pair can be fully exposed (its twin
        // edge would extend the matching), so now every pair is matched
        // and each matched terminal starts a unique alternating path that
        // ends at another matched terminal. Projected all-interior cycles
        // may remain, but they carry no terminals and are simply unused.
        let mut used = vec![false; self.terms.len()];
        let mut paths = Vec::new();
        for tp in 0..self.terms.len() {
            if used[tp] {
                continue;
            }
            let Some(mut cur) = self.mate[rn + tp] else {
                continue;
            };
            used[tp] = true;
            let mut path = Vec::new();
            loop {
                debug_assert!(cur < rn, "path interior is an interior copy");
                path.push(self.alive[cur / 2]);
                let partner = self.mate[cur ^ 1].expect("interior pair fully matched");
                if partner >= rn {
                    used[partner - rn] = true;
                    break;
                }
                cur = partner;
            }
            paths.push(path);
        }
        assert_eq!(
            paths.len(),
            expect,
            "normalized matching must yield exactly ν terminal paths"
        );
        paths
    }
}

/// Maximum x-flower order (the packing number ν at x).
pub fn max_flower_order(g: &MultiGraph, x: VertexId) -> usize {
    AuxMatch::run(&Aux::build(g, x), &BTreeSet::new()).nu()
}

/// Maximum-cardinality matching of the underlying simple graph, as sorted
/// vertex pairs.
pub fn max_matching(g: &MultiGraph) -> BTreeSet<(VertexId, VertexId)> {
    let ids: Vec<VertexId> = g.vertices().collect();
    let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for (u, v, _) in g.edges() {
        adj[pos[&u]].push(pos[&v]);
        adj[pos[&v]].push(pos[&u]);
    }
    let mate = maximum_matching(ids.len(), &adj);
    let mut out = BTreeSet::new();
    for (i, m) in mate.iter().enumerate() {
        if let Some(j) = m {
            if i < *j {
                out.insert((ids[i], ids[*j]));
            }
        }
    }
    out
}

/// Peels an optimal interior set B off Gallai's min–max formula by
/// self-reduction (v belongs to an optimal B iff deleting v drops ν), then
/// covers each remaining component with all but one of its terminals.
fn cover_from(aux: &Aux, base: AuxMatch) -> BTreeSet<VertexId> {
    let mut dead: BTreeSet<usize> = BTreeSet::new();
    let mut b: Vec<usize> = Vec::new();
    let mut m = base;
    let mut nu = m.nu();
    while nu > 0 {
        // Any deletable vertex lies on every maximum packing, so testing
        // the vertices of one extracted packing suffices.
        let candidates: BTreeSet<usize> = m.extract_paths().into_iter().flatten().collect();
        let mut hit = None;
        for &v in &candidates {
            if m.nu_drops_without(v) {
                hit = Some(v);
                break;
            }
        }
        match hit {
            Some(v) => {
                b.push(v);
                dead.insert(v);
                nu -= 1;
                m = AuxMatch::run(aux, &dead);
                debug_assert_eq!(m.nu(), nu);
            }
            None => break,
        }
    }

    // Components of the remaining interior, each with its terminal list
    // (terminals of deleted owners are isolated and need no covering).
    let alive: BTreeSet<usize> = (0..aux.reals.len()).filter(|i| !dead.contains(i)).collect();
    let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_count = 0;
    for &start in &alive {
        if comp_of.contains_key(&start) {
            continue;
        }
        let id = comp_count;
        comp_count += 1;
        let mut queue = vec![start];
        comp_of.insert(start, id);
        while let Some(v) = queue.pop() {
            for &u in &aux.real_adj[v] {
                if alive.contains(&u) && !comp_of.contains_key(&u) {
                    comp_of.insert(u, id);
                    queue.push(u);
                }
            }
        }
    }
    let mut comp_terms: Vec<Vec<usize>> = vec![Vec::new(); comp_count];
    for (t, &o) in aux.owners.iter().enumerate() {
        if let Some(&c) = comp_of.get(&o) {
            comp_terms[c].push(t);
        }
    }
    // At the fixpoint no interior vertex improves the formula, so the
    // optimum is attained by B = ∅: ν must equal Σ ⌊#terminals/2⌋.
    let formula: usize = comp_terms.iter().map(|ts| ts.len() / 2).sum();
    assert_eq!(
        nu, formula,
        "Gallai fixpoint identity violated (cover construction bug)"
    );

    let mut z: BTreeSet<VertexId> = b.iter().map(|&i| aux.reals[i]).collect();
    for ts in &comp_terms {
        for &t in ts.iter().skip(1) {
            z.insert(aux.reals[aux.owners[t]]);
        }
    }
    z
}

fn validate_flower(g: &MultiGraph, x: VertexId, cycles: &[Vec<VertexId>]) {
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for cyc in cycles {
        assert!(cyc.len() >= 2 && cyc[0] == x, "cycle must start at x");
        let inner = &cyc[1..];
        if inner.len() == 1 {
            assert_eq!(
                g.multiplicity(x, inner[0]),
                2,
                "a 2-cycle needs a double edge"
            );
        } else {
            assert!(g.has_edge(x, inner[0]) && g.has_edge(x, *inner.last().unwrap()));
            for w in inner.windows(2) {
                assert!(g.has_edge(w[0], w[1]), "cycle edge missing");
            }
        }
        for &v in inner {
            assert!(v != x && seen.insert(v), "cycles must overlap only in x");
        }
    }
}

/// Either a flower of order ≥ k+1 at x, or a validated cover of all cycles
/// through x of size ≤ 2k. Panics (never misreports) if internal
/// validation fails.
pub fn flower_or_cover(g: &MultiGraph, x: VertexId, k: usize) -> FlowerOrCover {
    let aux = Aux::build(g, x);
    let mut m = AuxMatch::run(&aux, &BTreeSet::new());
    let nu = m.nu();
    if nu > k {
        let cycles: Vec<Vec<VertexId>> = m
            .extract_paths()
            .into_iter()
            .map(|path| {
                std::iter::once(x)
                    .chain(path.into_iter().map(|i| aux.reals[i]))
                    .collect()
            })
            .collect();
        validate_flower(g, x, &cycles);
        FlowerOrCover::Flower(cycles)
    } else {
        let z = cover_from(&aux, m);
        assert!(z.len() <= 2 * nu && z.len() <= 2 * k, "cover exceeds 2k");
        assert!(
            !has_cycle_through(&delete_vertices(g, &z), x),
            "cover validation failed: a cycle through {x} survives"
        );
        FlowerOrCover::Cover(z)
    }
}
