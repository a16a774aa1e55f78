//! Verification campaigns: generate a mixed stream of instances, kernelize
//! each, and check the kernel is decision-equivalent to its input using the
//! brute-force oracle. Work fans out across threads; the report is merged
//! in instance order, so a fixed (config, seed) always produces the same
//! report bytes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{generate, Family, GenSpec, Generated};
use crate::io::serialize_instance;
use crate::kernel::kernelize;
use crate::oracle::{exact_tds_with_limit, DEFAULT_ORACLE_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_k: i64,
    pub max_weight: u64,
    pub oracle_limit: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 1000,
            seed: 0,
            max_n: 10,
            max_k: 3,
            max_weight: 3,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("max_n {max_n} exceeds the oracle limit {limit}: the campaign could not check its answers")]
    Config { max_n: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// A failing instance, serialized in full so it can be replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: usize,
    pub family: String,
    pub input_decision: String,
    pub kernel_decision: String,
    pub instance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub samples_run: usize,
    pub yes_instances: usize,
    pub no_instances: usize,
    pub early_decisions: usize,
    pub proper_kernels: usize,
    pub bound_checks: usize,
    pub bounds_all_satisfied: bool,
    pub errors: Vec<String>,
    pub disagreements: Vec<Disagreement>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty() && self.errors.is_empty() && self.bounds_all_satisfied
    }
}

const FAMILIES: [Family; 4] = [
    Family::Random,
    Family::PlantedTds,
    Family::Theta,
    Family::DoubleEdgeGadgets,
];

fn family_name(f: Family) -> String {
    format!("{f:?}")
}

struct SampleResult {
    yes: bool,
    early: bool,
    bound_checks: usize,
    bounds_ok: bool,
    error: Option<String>,
    disagreement: Option<Disagreement>,
}

fn run_sample(index: usize, family: Family, gen: &Generated, cfg: &VerifyConfig) -> SampleResult {
    let inst = &gen.instance;
    let input = exact_tds_with_limit(inst, cfg.oracle_limit)
        .expect("campaign instances stay within the oracle limit");
    let mut out = SampleResult {
        yes: input.decision == crate::graph::Decision::Yes,
        early: false,
        bound_checks: 0,
        bounds_ok: true,
        error: None,
        disagreement: None,
    };
    match kernelize(inst) {
        Err(e) => {
            out.error = Some(format!(
                "instance {index} ({}): kernelization failed: {e}\n{}",
                family_name(family),
                serialize_instance(inst)
            ));
        }
        Ok(rep) => {
            out.early = rep.decided.is_some();
            out.bound_checks = rep.bounds.checks.len();
            out.bounds_ok = rep.bounds.all_hold();
            let kernel_decision = match rep.decided {
                Some(d) => d,
                None => {
                    exact_tds_with_limit(&rep.kernel, cfg.oracle_limit)
                        .expect("kernels never outgrow their input")
                        .decision
                }
            };
            if kernel_decision != input.decision {
                out.disagreement = Some(Disagreement {
                    index,
                    family: family_name(family),
                    input_decision: input.decision.to_string(),
                    kernel_decision: kernel_decision.to_string(),
                    instance: serialize_instance(inst),
                });
            }
        }
    }
    out
}

/// Runs the campaign described by `cfg` and returns the merged report.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport, VerifyError> {
    if cfg.max_n > cfg.oracle_limit {
        return Err(VerifyError::Config {
            max_n: cfg.max_n,
            limit: cfg.oracle_limit,
        });
    }
    if cfg.max_n == 0 {
        return Err(VerifyError::Invalid("max_n must be at least 1".into()));
    }
    if cfg.max_k < 0 {
        return Err(VerifyError::Invalid("max_k must be nonnegative".into()));
    }
    if cfg.max_weight == 0 {
        return Err(VerifyError::Invalid("max_weight must be positive".into()));
    }

    // Interleave the four families round-robin; each family has its own
    // seeded stream so the mix is independent of the sample count.
    let mut streams: Vec<_> = FAMILIES
        .iter()
        .enumerate()
        .map(|(f, &family)| {
            let spec = GenSpec {
                family,
                n_min: 1,
                n_max: cfg.max_n,
                edge_probability: 0.3,
                weight_min: 1,
                weight_max: cfg.max_weight,
                k_min: 0,
                k_max: cfg.max_k,
                seed: cfg.seed.wrapping_add(f as u64),
            };
            generate(&spec)
        })
        .collect();
    let jobs: Vec<(usize, Family, Generated)> = (0..cfg.samples)
        .map(|i| {
            let f = i % FAMILIES.len();
            (
                i,
                FAMILIES[f],
                streams[f].next().expect("streams are infinite"),
            )
        })
        .collect();

    let results: Vec<SampleResult> = jobs
        .par_iter()
        .map(|(i, family, gen)| run_sample(*i, *family, gen, cfg))
        .collect();

    let mut report = VerifyReport {
        config: cfg.clone(),
        samples_run: results.len(),
        yes_instances: 0,
        no_instances: 0,
        early_decisions: 0,
        proper_kernels: 0,
        bound_checks: 0,
        bounds_all_satisfied: true,
        errors: Vec::new(),
        disagreements: Vec::new(),
    };
    for r in results {
        if r.yes {
            report.yes_instances += 1;
        } else {
            report.no_instances += 1;
        }
        if r.error.is_none() {
            if r.early {
                report.early_decisions += 1;
            } else {
                report.proper_kernels += 1;
            }
        }
        report.bound_checks += r.bound_checks;
        report.bounds_all_satisfied &= r.bounds_ok;
        if let Some(e) = r.error {
            report.errors.push(e);
        }
        if let Some(d) = r.disagreement {
            report.disagreements.push(d);
        }
    }
    Ok(report)
}

/// Pretty JSON with a trailing newline; deterministic for a fixed config.
pub fn report_json(report: &VerifyReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(samples: usize, seed: u64) -> VerifyConfig {
        VerifyConfig {
            samples,
            seed,
            max_n: 9,
            max_k: 2,
            max_weight: 3,
            oracle_limit: 12,
        }
    }

    #[test]
    fn campaign_is_clean_and_deterministic() {
        let cfg = small_cfg(48, 123);
        let a = run_verify(&cfg).unwrap();
        let b = run_verify(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(report_json(&a), report_json(&b));
        assert!(a.ok(), "unexpected failures: {:?}", a);
        assert_eq!(a.samples_run, 48);
        assert!(a.yes_instances > 0 && a.no_instances > 0);
        assert!(a.bound_checks > 0);
    }

    #[test]
    fn different_seeds_differ() {
        let a = run_verify(&small_cfg(24, 1)).unwrap();
        let b = run_verify(&small_cfg(24, 2)).unwrap();
        assert_ne!(report_json(&a), report_json(&b));
    }

    #[test]
    fn oversized_max_n_is_a_config_error() {
        let cfg = VerifyConfig {
            max_n: 20,
            oracle_limit: 15,
            ..VerifyConfig::default()
        };
        assert_eq!(
            run_verify(&cfg),
            Err(VerifyError::Config {
                max_n: 20,
                limit: 15
            })
        );
    }

    #[test]
    fn disagreements_serialize_the_full_instance() {
        let d = Disagreement {
            index: 7,
            family: "Random".into(),
            input_decision: "YES".into(),
            kernel_decision: "NO".into(),
            instance: "p wtds 1 0 0\nv 1 1\n".into(),
        };
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("p wtds 1 0 0"));
    }
}
