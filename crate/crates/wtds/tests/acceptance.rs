//! Acceptance gate: six release criteria, one test each. Every test prints
//! a single `criterion N ...: PASS` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`); a violated criterion
//! panics with the failing evidence instead.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use wtds::flower::{flower_or_cover, FlowerOrCover};
use wtds::fvs_approx::approx_fvs;
use wtds::generate::{generate, Family, GenSpec};
use wtds::graph::{delete_vertices, has_cycle_through, MultiGraph, VertexId};
use wtds::io::serialize_instance;
use wtds::kernel::kernelize;
use wtds::lineq::{coeff, reduce_equations, LinearSystem};
use wtds::oracle::{exact_flower, exact_fvs, exact_tds};

const CAMPAIGN_SAMPLES: usize = 2000;
const CAMPAIGN_SEED: u64 = 0xACCE_0001;

/// Ledger entries every decomposition-backed kernelization must record.
const REQUIRED_DECOMPOSITION_BOUNDS: [&str; 12] = [
    "|F| <= 2k",
    "max_x |Q^x| <= 2k",
    "|Q| <= 4k^2",
    "|Q_hat| <= 2|Q|",
    "|Q_hat| <= 8k^2",
    "|C_m| <= 8k^2+2k",
    "max residual component size <= 8k+8",
    "|C2| <= |Q_hat|-1",
    "|C_g| <= 160k^4+248k^3+80k^2-16k-8",
    "max I-vertex degree <= 2k+1",
    "kept equations <= (|C_m|+1)(k+1)",
    "|I'| <= 8k^3+10k^2+3k+1",
];

struct Campaign {
    samples: usize,
    disagreements: Vec<String>,
    errors: Vec<String>,
    decomposed: usize,
    bound_checks: usize,
    bound_failures: Vec<String>,
    missing_bounds: Vec<String>,
}

static CAMPAIGN: OnceLock<Campaign> = OnceLock::new();

fn campaign() -> &'static Campaign {
    CAMPAIGN.get_or_init(run_campaign)
}

fn run_campaign() -> Campaign {
    let families = [
        Family::Random,
        Family::PlantedTds,
        Family::Theta,
        Family::DoubleEdgeGadgets,
    ];
    let mut streams: Vec<_> = families
        .iter()
        .enumerate()
        .map(|(i, &family)| {
            generate(&GenSpec {
                family,
                n_min: 1,
                n_max: 12,
                edge_probability: 0.3,
                weight_min: 1,
                weight_max: 3,
                k_min: 0,
                k_max: 3,
                seed: CAMPAIGN_SEED.wrapping_add(i as u64),
            })
        })
        .collect();

    let mut c = Campaign {
        samples: 0,
        disagreements: Vec::new(),
        errors: Vec::new(),
        decomposed: 0,
        bound_checks: 0,
        bound_failures: Vec::new(),
        missing_bounds: Vec::new(),
    };
    for i in 0..CAMPAIGN_SAMPLES {
        let gen = streams[i % families.len()].next().expect("infinite stream");
        let inst = gen.instance;
        c.samples += 1;
        let want = exact_tds(&inst).expect("campaign sizes fit the oracle").decision;
        let rep = match kernelize(&inst) {
            Err(e) => {
                c.errors
                    .push(format!("instance {i}: {e}\n{}", serialize_instance(&inst)));
                continue;
            }
            Ok(rep) => rep,
        };
        let got = exact_tds(&rep.kernel)
            .expect("kernels never outgrow their input")
            .decision;
        if let Some(decided) = rep.decided {
            if decided != got {
                c.errors.push(format!(
                    "instance {i}: early decision {decided} contradicts its own kernel {got}\n{}",
                    serialize_instance(&inst)
                ));
            }
        }
        if got != want {
            c.disagreements.push(format!(
                "instance {i}: input is {want}, kernel is {got}\n{}",
                serialize_instance(&inst)
            ));
        }
        c.bound_checks += rep.bounds.checks.len();
        for chk in &rep.bounds.checks {
            if !chk.holds() {
                c.bound_failures.push(format!(
                    "instance {i}: {} (lhs {} > rhs {})\n{}",
                    chk.name,
                    chk.lhs,
                    chk.rhs,
                    serialize_instance(&inst)
                ));
            }
        }
        if !rep.c_m.is_empty() {
            c.decomposed += 1;
            let names: BTreeSet<&str> =
                rep.bounds.checks.iter().map(|b| b.name.as_str()).collect();
            for required in REQUIRED_DECOMPOSITION_BOUNDS {
                if !names.contains(required) {
                    c.missing_bounds.push(format!(
                        "instance {i}: ledger lacks {required:?}\n{}",
                        serialize_instance(&inst)
                    ));
                }
            }
        }
    }
    c
}

#[test]
fn criterion_1_kernel_decision_equivalence() {
    let c = campaign();
    assert_eq!(c.samples, CAMPAIGN_SAMPLES);
    assert!(
        c.errors.is_empty(),
        "kernelization errors:\n{}",
        c.errors.join("\n")
    );
    assert!(
        c.disagreements.is_empty(),
        "{} disagreements:\n{}",
        c.disagreements.len(),
        c.disagreements.join("\n")
    );
    println!(
        "criterion 1 (kernel decision equivalence): PASS — {} instances, {} decomposition-backed, 0 disagreements",
        c.samples, c.decomposed
    );
}

#[test]
fn criterion_2_bound_ledger_holds() {
    let c = campaign();
    assert!(
        c.bound_failures.is_empty(),
        "violated bounds:\n{}",
        c.bound_failures.join("\n")
    );
    assert!(
        c.missing_bounds.is_empty(),
        "missing ledger entries:\n{}",
        c.missing_bounds.join("\n")
    );
    assert!(c.decomposed > 0, "campaign never exercised a decomposition");
    println!(
        "criterion 2 (bound ledger): PASS — {} checks across {} instances, all satisfied",
        c.bound_checks, c.samples
    );
}

#[test]
fn criterion_3_equation_reduction_soundness() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xACCE_0003);
    let systems = 500usize;
    let mut assignments = 0usize;
    for trial in 0..systems {
        let nvars = rng.gen_range(1..=6usize);
        let m = rng.gen_range(1..=40usize);
        let k = rng.gen_range(0..=2u32);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| {
                let mut row: Vec<i64> = (0..nvars).map(|_| rng.gen_range(0..=1)).collect();
                row.push(-rng.gen_range(0..=1i64));
                row
            })
            .collect();
        let sys = LinearSystem::from_int_rows(&rows);
        let (kept_sys, kept_idx) = reduce_equations(&sys, k);
        assert!(
            kept_idx.len() <= (nvars + 1) * (k as usize + 1),
            "trial {trial}: kept {} rows, width {} budget {k}",
            kept_idx.len(),
            nvars + 1
        );
        let kept: BTreeSet<usize> = kept_idx.iter().copied().collect();
        for bits in 0u32..(1 << nvars) {
            let z: Vec<_> = (0..nvars)
                .map(|i| coeff((bits >> i & 1) as i64))
                .chain(std::iter::once(coeff(1)))
                .collect();
            let violated = sys.violated(&z);
            let kept_violated = violated.iter().filter(|i| kept.contains(i)).count();
            assert_eq!(
                kept_sys.violated(&z).len(),
                kept_violated,
                "trial {trial}: subsetting changed the violation count"
            );
            if kept_violated <= k as usize {
                assert_eq!(
                    kept_violated,
                    violated.len(),
                    "trial {trial}, assignment {bits:#b}: a violated equation was dropped \
                     although only {kept_violated} <= k = {k} kept equations are violated"
                );
            }
            assignments += 1;
        }
    }
    println!(
        "criterion 3 (equation reduction soundness): PASS — {systems} systems, {assignments} assignments"
    );
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect()
}

fn graph_from_mask(n: usize, pairs: &[(usize, usize)], mask: u64) -> MultiGraph {
    let mut g = MultiGraph::new();
    let vs = g.add_vertices(n);
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            g.add_edge(vs[u], vs[v]).unwrap();
        }
    }
    g
}

/// Calls `f` on every connected simple graph with 1..=7 labeled vertices
/// and returns how many there were.
fn for_each_connected_up_to_7(mut f: impl FnMut(&MultiGraph)) -> usize {
    let mut count = 0usize;
    for n in 1..=7usize {
        let pairs = pair_list(n);
        for mask in 0u64..(1u64 << pairs.len()) {
            let g = graph_from_mask(n, &pairs, mask);
            if g.is_connected() {
                count += 1;
                f(&g);
            }
        }
    }
    count
}

fn random_multigraph(rng: &mut ChaCha20Rng, max_n: usize) -> MultiGraph {
    let n = rng.gen_range(2..=max_n);
    let mut g = MultiGraph::new();
    let vs = g.add_vertices(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.35) {
                let m = if rng.gen_bool(0.25) { 2 } else { 1 };
                g.add_edge_with_multiplicity(vs[i], vs[j], m).unwrap();
            }
        }
    }
    g
}

#[test]
fn criterion_4_flower_or_cover_dichotomy() {
    let mut checks = 0usize;
    let mut check_graph = |g: &MultiGraph| {
        let xs: Vec<VertexId> = g.vertices().collect();
        for x in xs {
            let nu = exact_flower(g, x).expect("suite fits the flower oracle");
            for k in 0..=2usize {
                match flower_or_cover(g, x, k) {
                    FlowerOrCover::Flower(cycles) => {
                        assert!(
                            nu > k,
                            "flower returned at x={x}, k={k} but packing number is {nu}"
                        );
                        assert_eq!(cycles.len(), nu, "flower order must match ν");
                    }
                    FlowerOrCover::Cover(z) => {
                        assert!(
                            nu <= k,
                            "cover returned at x={x}, k={k} but packing number is {nu}"
                        );
                        assert!(z.len() <= 2 * k, "cover size {} exceeds 2k={}", z.len(), 2 * k);
                        assert!(!z.contains(&x), "cover must avoid x");
                        assert!(
                            !has_cycle_through(&delete_vertices(g, &z), x),
                            "a cycle through x survives its cover"
                        );
                    }
                }
                checks += 1;
            }
        }
    };
    let enumerated = for_each_connected_up_to_7(&mut check_graph);
    assert_eq!(
        enumerated, 1_893_732,
        "enumeration must visit every connected labeled graph on <= 7 vertices"
    );
    let mut rng = ChaCha20Rng::seed_from_u64(0xACCE_0004);
    for _ in 0..200 {
        let g = random_multigraph(&mut rng, 9);
        check_graph(&g);
    }
    println!(
        "criterion 4 (flower-or-cover dichotomy): PASS — {} connected graphs + 200 multigraphs, {checks} checks",
        enumerated
    );
}

#[test]
fn criterion_5_fvs_approximation_ratio() {
    let mut worst_num = 0usize;
    let mut worst_den = 1usize;
    let mut check_graph = |g: &MultiGraph| {
        let opt = exact_fvs(g).expect("suite fits the FVS oracle");
        let approx = approx_fvs(g).fvs;
        assert!(
            delete_vertices(g, &approx).is_forest(),
            "approximate FVS does not hit every cycle"
        );
        assert!(
            approx.len() <= 2 * opt,
            "approximation {} exceeds twice the optimum {opt}",
            approx.len()
        );
        if approx.len() * worst_den > worst_num * opt.max(1) {
            worst_num = approx.len();
            worst_den = opt.max(1);
        }
    };
    let enumerated = for_each_connected_up_to_7(&mut check_graph);
    assert_eq!(enumerated, 1_893_732);
    let mut rng = ChaCha20Rng::seed_from_u64(0xACCE_0005);
    for _ in 0..200 {
        let g = random_multigraph(&mut rng, 9);
        check_graph(&g);
    }
    println!(
        "criterion 5 (FVS 2-approximation): PASS — {} connected graphs + 200 multigraphs, worst ratio {worst_num}/{worst_den}",
        enumerated
    );
}

#[test]
fn criterion_6_verify_report_reproducibility() {
    let exe = env!("CARGO_BIN_EXE_wtds");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs: Vec<Vec<u8>> = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("report_{run}.json"));
        let status = std::process::Command::new(exe)
            .args([
                "verify",
                "--samples",
                "64",
                "--seed",
                "20260814",
                "--max-n",
                "9",
                "--max-k",
                "2",
                "--oracle-limit",
                "12",
                "--quiet",
                "--report",
            ])
            .arg(&path)
            .status()
            .expect("verify subprocess runs");
        assert!(status.success(), "verify campaign reported failures");
        outputs.push(std::fs::read(&path).expect("report written"));
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(
        outputs[0], outputs[1],
        "verify reports with a fixed seed must be byte-identical"
    );
    println!(
        "criterion 6 (report reproducibility): PASS — two runs, {} identical bytes",
        outputs[0].len()
    );
}
