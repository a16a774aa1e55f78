//! Deterministic instance generators for the verification campaigns.
//!
//! Four families:
//! * `Random` — Erdős–Rényi-style multigraphs with occasional double edges;
//! * `PlantedTds` — a random tree plus decoy vertices whose total weight is
//!   the budget, so the instance is YES by construction (the optimum may be
//!   cheaper; the planted weight is only an upper bound);
//! * `Theta` — two hubs joined by parallel paths, exercising path
//!   compression, flowers, and the heavy-pair machinery;
//! * `DoubleEdgeGadgets` — random trees with doubled edges and a few extra
//!   chords, exercising forced-deletion structure.
//!
//! The stream is a pure function of (spec, seed): identical inputs yield
//! identical instances.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Instance, MultiGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Random,
    PlantedTds,
    Theta,
    DoubleEdgeGadgets,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n_min: usize,
    pub n_max: usize,
    /// Edge probability for the Random family; other families ignore it.
    pub edge_probability: f64,
    pub weight_min: u64,
    pub weight_max: u64,
    pub k_min: i64,
    pub k_max: i64,
    pub seed: u64,
}

impl GenSpec {
    /// Sane small-campaign defaults for the given family and seed.
    pub fn small(family: Family, seed: u64) -> Self {
        GenSpec {
            family,
            n_min: 1,
            n_max: 12,
            edge_probability: 0.3,
            weight_min: 1,
            weight_max: 3,
            k_min: 0,
            k_max: 3,
            seed,
        }
    }
}

/// A generated instance; `planted_budget` is set by the planted family and
/// bounds the optimum from above.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub instance: Instance,
    pub planted_budget: Option<u64>,
}

/// Infinite deterministic stream of instances for the spec.
pub fn generate(spec: &GenSpec) -> impl Iterator<Item = Generated> {
    assert!(spec.weight_min >= 1, "weights must be positive");
    assert!(spec.n_min >= 1 && spec.n_min <= spec.n_max, "bad n range");
    assert!(spec.k_min <= spec.k_max, "bad k range");
    let spec = spec.clone();
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    std::iter::from_fn(move || {
        Some(match spec.family {
            Family::Random => gen_random(&spec, &mut rng),
            Family::PlantedTds => gen_planted(&spec, &mut rng),
            Family::Theta => gen_theta(&spec, &mut rng),
            Family::DoubleEdgeGadgets => gen_gadgets(&spec, &mut rng),
        })
    })
}

fn rand_weight(spec: &GenSpec, rng: &mut ChaCha20Rng) -> u64 {
    rng.gen_range(spec.weight_min..=spec.weight_max)
}

fn rand_k(spec: &GenSpec, rng: &mut ChaCha20Rng) -> i64 {
    rng.gen_range(spec.k_min..=spec.k_max)
}

fn weighted(spec: &GenSpec, rng: &mut ChaCha20Rng, g: MultiGraph, k: i64) -> Instance {
    let weights: BTreeMap<VertexId, u64> = g
        .vertices()
        .map(|v| (v, rand_weight(spec, rng)))
        .collect();
    Instance::new(g, weights, k)
}

/// Attaches vertices 1..n to a random earlier vertex: a uniform-ish tree.
fn random_tree(rng: &mut ChaCha20Rng, g: &mut MultiGraph, vs: &[VertexId]) {
    for i in 1..vs.len() {
        let p = rng.gen_range(0..i);
        g.add_edge(vs[i], vs[p]).expect("fresh tree edge");
    }
}

fn gen_random(spec: &GenSpec, rng: &mut ChaCha20Rng) -> Generated {
    let n = rng.gen_range(spec.n_min..=spec.n_max);
    let mut g = MultiGraph::new();
    let vs = g.add_vertices(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(spec.edge_probability) {
                let m = if rng.gen_bool(0.15) { 2 } else { 1 };
                g.add_edge_with_multiplicity(vs[i], vs[j], m).unwrap();
            }
        }
    }
    let k = rand_k(spec, rng);
    Generated {
        instance: weighted(spec, rng, g, k),
        planted_budget: None,
    }
}

fn gen_planted(spec: &GenSpec, rng: &mut ChaCha20Rng) -> Generated {
    let n = rng.gen_range(spec.n_min..=spec.n_max);
    // Decide decoys first: keep their total weight within the k range so
    // deleting all of them is affordable.
    let k_cap = spec.k_max.max(0) as u64;
    let mut decoy_weights: Vec<u64> = Vec::new();
    let mut planted: u64 = 0;
    while decoy_weights.len() + 1 < n {
        let w = rand_weight(spec, rng);
        if planted + w > k_cap || !rng.gen_bool(0.7) {
            break;
        }
        planted += w;
        decoy_weights.push(w);
    }
    let t = n - decoy_weights.len();
    let mut g = MultiGraph::new();
    let base = g.add_vertices(t);
    random_tree(rng, &mut g, &base);
    let mut weights: BTreeMap<VertexId, u64> =
        base.iter().map(|&v| (v, rand_weight(spec, rng))).collect();
    for &w in &decoy_weights {
        let d = g.add_vertex();
        weights.insert(d, w);
        let others: Vec<VertexId> = g.vertices().filter(|&v| v != d).collect();
        let attach = rng.gen_range(1..=3.min(others.len()));
        for _ in 0..attach {
            let target = others[rng.gen_range(0..others.len())];
            let m = if rng.gen_bool(0.2) { 2 } else { 1 };
            let _ = g.add_edge_with_multiplicity(d, target, m);
        }
    }
    let k = (planted as i64).max(spec.k_min);
    Generated {
        instance: Instance::new(g, weights, k),
        planted_budget: Some(planted),
    }
}

fn gen_theta(spec: &GenSpec, rng: &mut ChaCha20Rng) -> Generated {
    if spec.n_max < 4 {
        // No room for two hubs and two paths; a plain cycle-ish fallback.
        return gen_random(spec, rng);
    }
    let max_interior = spec.n_max - 2;
    let m = rng.gen_range(2..=4usize.min(max_interior));
    let len = rng.gen_range(1..=3usize.min(max_interior / m));
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
    let k = rand_k(spec, rng);
    Generated {
        instance: weighted(spec, rng, g, k),
        planted_budget: None,
    }
}

fn gen_gadgets(spec: &GenSpec, rng: &mut ChaCha20Rng) -> Generated {
    let n = rng.gen_range(spec.n_min..=spec.n_max);
    let mut g = MultiGraph::new();
    let vs = g.add_vertices(n);
    random_tree(rng, &mut g, &vs);
    if n >= 2 {
        let doubles = rng.gen_range(1..=3usize);
        for _ in 0..doubles {
            let i = rng.gen_range(1..n);
            // Tree edges found via any neighbor; doubling one makes a
            // forced 2-cycle gadget.
            let (u, _) = g.neighbors(vs[i]).next().expect("tree vertex has a neighbor");
            let _ = g.add_edge_with_multiplicity(vs[i], u, 2);
        }
        let chords = rng.gen_range(0..=2usize);
        for _ in 0..chords {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                let _ = g.add_edge(vs[i], vs[j]);
            }
        }
    }
    let k = rand_k(spec, rng);
    Generated {
        instance: weighted(spec, rng, g, k),
        planted_budget: None,
    }
}
