//! Text instance files and JSON reports.
//!
//! Instance format (DIMACS-like, line oriented):
//!
//! ```text
//! c free-form comment
//! p wtds <n> <m> <k>
//! v <id> <weight>        (ids 1..=n; omitted vertices default to weight 1)
//! e <u> <v> [mult]       (mult 1 or 2, default 1; duplicates merge, capped at 2)
//! ```
//!
//! Self-loops are rejected; `m` must equal the number of `e` lines.
//! Serialization renumbers vertices to contiguous ids 1..=n by ascending
//! original id; the kernel writer appends the id map as comments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Decision, Instance, MultiGraph, VertexId};
use crate::kernel::KernelReport;
use crate::reductions::RuleApplication;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, what: &str, token: &str) -> Result<T, ParseError> {
    token
        .parse::<T>()
        .map_err(|_| err(line, format!("expected {what}, found `{token}`")))
}

/// Parses the text instance format with line-numbered diagnostics.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize, i64)> = None; // line, n, m, k
    let mut graph = MultiGraph::new();
    let mut ids: Vec<VertexId> = Vec::new();
    let mut weights: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut weighted: BTreeMap<usize, usize> = BTreeMap::new(); // id -> line of its v entry
    let mut edge_lines = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let Some(&first) = tokens.first() else {
            continue;
        };
        match first {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(err(line, "duplicate `p` header"));
                }
                if tokens.len() != 5 || tokens[1] != "wtds" {
                    return Err(err(line, "expected `p wtds <n> <m> <k>`"));
                }
                let n: usize = parse_num(line, "vertex count", tokens[2])?;
                let m: usize = parse_num(line, "edge count", tokens[3])?;
                let k: i64 = parse_num(line, "budget", tokens[4])?;
                ids = graph.add_vertices(n);
                for &v in &ids {
                    weights.insert(v, 1);
                }
                header = Some((line, n, m, k));
            }
            "v" => {
                let Some(&(_, n, _, _)) = header.as_ref() else {
                    return Err(err(line, "`v` before `p wtds` header"));
                };
                if tokens.len() < 2 || tokens.len() > 3 {
                    return Err(err(line, "expected `v <id> <weight>`"));
                }
                let id: usize = parse_num(line, "vertex id", tokens[1])?;
                if id < 1 || id > n {
                    return Err(err(line, format!("vertex id {id} outside 1..={n}")));
                }
                let w: u64 = match tokens.get(2) {
                    Some(tok) => parse_num(line, "weight", tok)?,
                    None => 1,
                };
                if w == 0 {
                    return Err(err(line, "weights must be positive"));
                }
                if let Some(prev) = weighted.insert(id, line) {
                    return Err(err(
                        line,
                        format!("duplicate weight for vertex {id} (first set on line {prev})"),
                    ));
                }
                weights.insert(ids[id - 1], w);
            }
            "e" => {
                let Some(&(_, n, _, _)) = header.as_ref() else {
                    return Err(err(line, "`e` before `p wtds` header"));
                };
                if tokens.len() < 3 || tokens.len() > 4 {
                    return Err(err(line, "expected `e <u> <v> [mult]`"));
                }
                let u: usize = parse_num(line, "vertex id", tokens[1])?;
                let v: usize = parse_num(line, "vertex id", tokens[2])?;
                for id in [u, v] {
                    if id < 1 || id > n {
                        return Err(err(line, format!("vertex id {id} outside 1..={n}")));
                    }
                }
                if u == v {
                    return Err(err(line, format!("self-loop at vertex {u} is not allowed")));
                }
                let mult: u8 = match tokens.get(3) {
                    Some(tok) => parse_num(line, "multiplicity", tok)?,
                    None => 1,
                };
                if mult != 1 && mult != 2 {
                    return Err(err(line, format!("multiplicity must be 1 or 2, found {mult}")));
                }
                graph
                    .add_edge_with_multiplicity(ids[u - 1], ids[v - 1], mult)
                    .map_err(|e| err(line, e.to_string()))?;
                edge_lines += 1;
            }
            other => {
                return Err(err(line, format!("unknown directive `{other}`")));
            }
        }
    }

    let Some((p_line, _, m, k)) = header else {
        return Err(err(1, "missing `p wtds <n> <m> <k>` header"));
    };
    if edge_lines != m {
        return Err(err(
            p_line,
            format!("header declares {m} edges but {edge_lines} `e` lines follow"),
        ));
    }
    Ok(Instance::new(graph, weights, k))
}

fn render(inst: &Instance, with_id_map: bool) -> String {
    let old: Vec<VertexId> = inst.graph.vertices().collect();
    let new_of: BTreeMap<VertexId, usize> =
        old.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let mut edges: Vec<(usize, usize, u8)> = inst
        .graph
        .edges()
        .map(|(u, v, m)| {
            let (a, b) = (new_of[&u], new_of[&v]);
            (a.min(b), a.max(b), m)
        })
        .collect();
    edges.sort();

    let mut out = String::new();
    out.push_str(&format!(
        "p wtds {} {} {}\n",
        old.len(),
        edges.len(),
        inst.k
    ));
    for &v in &old {
        out.push_str(&format!("v {} {}\n", new_of[&v], inst.weight(v)));
    }
    for &(u, v, m) in &edges {
        if m == 2 {
            out.push_str(&format!("e {u} {v} 2\n"));
        } else {
            out.push_str(&format!("e {u} {v}\n"));
        }
    }
    if with_id_map {
        for &v in &old {
            out.push_str(&format!("c map {} {}\n", new_of[&v], v.index()));
        }
    }
    out
}

/// Serializes with fresh contiguous ids 1..=n (ascending original id).
pub fn serialize_instance(inst: &Instance) -> String {
    render(inst, false)
}

/// Like [`serialize_instance`], plus trailing `c map <new> <old>` comments
/// recording the renumbering.
pub fn serialize_instance_with_id_map(inst: &Instance) -> String {
    render(inst, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSummary {
    pub vertices: usize,
    pub edges: usize,
    pub k: i64,
    pub total_weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSizes {
    pub vertices: usize,
    pub edges: usize,
    pub core: usize,
    pub garnish: usize,
    pub equations_kept: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub lhs: i128,
    pub rhs: i128,
    pub satisfied: bool,
}

/// The machine-readable kernelization report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub input: InputSummary,
    /// "YES" / "NO" when the cascade decided the instance, else "kernel".
    pub decided: String,
    pub kernel: KernelSizes,
    pub bounds: Vec<BoundEntry>,
    pub trace: Vec<RuleApplication>,
    /// Wall-clock timings; omitted entirely from deterministic reports.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub timings_ms: BTreeMap<String, u64>,
}

pub fn build_report(
    input: &Instance,
    rep: &KernelReport,
    timings_ms: BTreeMap<String, u64>,
) -> ReportFile {
    ReportFile {
        input: InputSummary {
            vertices: input.graph.vertex_count(),
            edges: input.graph.distinct_edge_count(),
            k: input.k,
            total_weight: input.total_weight(),
        },
        decided: match rep.decided {
            Some(Decision::Yes) => "YES".to_string(),
            Some(Decision::No) => "NO".to_string(),
            None => "kernel".to_string(),
        },
        kernel: KernelSizes {
            vertices: rep.kernel.graph.vertex_count(),
            edges: rep.kernel.graph.distinct_edge_count(),
            core: rep.c_m.len(),
            garnish: rep.c_g.len(),
            equations_kept: rep.i_kept.len(),
        },
        bounds: rep
            .bounds
            .checks
            .iter()
            .map(|c| BoundEntry {
                name: c.name.clone(),
                lhs: c.lhs,
                rhs: c.rhs,
                satisfied: c.holds(),
            })
            .collect(),
        trace: rep.trace.steps.clone(),
        timings_ms,
    }
}

/// Pretty JSON with a trailing newline.
pub fn report_to_json(report: &ReportFile) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family, GenSpec};
    use crate::kernel::kernelize;

    #[test]
    fn parses_a_basic_instance() {
        let text = "c demo\n\
                    p wtds 4 4 2\n\
                    v 1 3\n\
                    v 4 2\n\
                    e 1 2\n\
                    e 2 3 2\n\
                    e 3 4\n\
                    e 4 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.graph.vertex_count(), 4);
        assert_eq!(inst.graph.distinct_edge_count(), 4);
        assert_eq!(inst.k, 2);
        let ids: Vec<VertexId> = inst.graph.vertices().collect();
        assert_eq!(inst.weight(ids[0]), 3);
        assert_eq!(inst.weight(ids[1]), 1, "unlisted vertices default to weight 1");
        assert_eq!(inst.weight(ids[3]), 2);
        assert_eq!(inst.graph.multiplicity(ids[1], ids[2]), 2);
    }

    #[test]
    fn duplicate_edges_merge_and_saturate() {
        let text = "p wtds 2 3 0\ne 1 2\ne 2 1\ne 1 2 2\n";
        let inst = parse_instance(text).unwrap();
        let ids: Vec<VertexId> = inst.graph.vertices().collect();
        assert_eq!(inst.graph.multiplicity(ids[0], ids[1]), 2);
        assert_eq!(inst.graph.distinct_edge_count(), 1);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let cases: Vec<(&str, usize, &str)> = vec![
            ("p wtds 2 0 0\nq 1 2\n", 2, "unknown directive"),
            ("p wtds 2 1 0\ne 1 1\n", 2, "self-loop"),
            ("p wtds 2 1 0\ne 1 3\n", 2, "outside 1..="),
            ("p wtds 2 1 0\ne 1 2 3\n", 2, "multiplicity must be 1 or 2"),
            ("p wtds 2 0 0\nv 1 2\nv 1 3\n", 3, "duplicate weight"),
            ("p wtds 2 0 0\nv 1 0\n", 2, "positive"),
            ("c nothing\n", 1, "missing `p wtds"),
            ("p wtds 2 2 0\ne 1 2\n", 1, "declares 2 edges but 1"),
            ("v 1 2\np wtds 2 0 0\n", 1, "before `p wtds` header"),
            ("p wtds 2 0 0\np wtds 2 0 0\n", 2, "duplicate `p` header"),
            ("p wtds x 0 0\n", 1, "expected vertex count"),
        ];
        for (text, line, needle) in cases {
            let e = parse_instance(text).expect_err(text);
            assert_eq!(e.line, line, "wrong line for {text:?}: {e}");
            assert!(
                e.message.contains(needle),
                "missing {needle:?} in {e} for {text:?}"
            );
        }
    }

    #[test]
    fn empty_instance_round_trips() {
        let inst = parse_instance("p wtds 0 0 5\n").unwrap();
        assert_eq!(inst.graph.vertex_count(), 0);
        assert_eq!(serialize_instance(&inst), "p wtds 0 0 5\n");
    }

    #[test]
    fn generated_instances_round_trip_exactly() {
        for family in [
            Family::Random,
            Family::PlantedTds,
            Family::Theta,
            Family::DoubleEdgeGadgets,
        ] {
            let spec = GenSpec::small(family, 21);
            for gen in generate(&spec).take(60) {
                let text = serialize_instance(&gen.instance);
                let parsed = parse_instance(&text).expect(&text);
                assert_eq!(parsed, gen.instance, "round trip changed the instance");
                assert_eq!(serialize_instance(&parsed), text);
            }
        }
    }

    #[test]
    fn kernel_serialization_renumbers_and_maps() {
        let spec = GenSpec::small(Family::Theta, 33);
        let gen = generate(&spec)
            .take(50)
            .find(|g| {
                kernelize(&g.instance)
                    .map(|r| r.decided.is_none() && r.kernel.graph.vertex_count() > 0)
                    .unwrap_or(false)
            })
            .expect("some theta instance yields a proper kernel");
        let rep = kernelize(&gen.instance).unwrap();
        let text = serialize_instance_with_id_map(&rep.kernel);
        assert!(text.lines().any(|l| l.starts_with("c map ")));
        // Comments do not affect parsing, and the serialized kernel uses
        // contiguous ids starting at 1.
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed.graph.vertex_count(), rep.kernel.graph.vertex_count());
        assert_eq!(parsed.k, rep.kernel.k);
        let reparsed = serialize_instance(&parsed);
        let plain = serialize_instance(&rep.kernel);
        assert_eq!(reparsed, plain);
    }

    #[test]
    fn report_json_round_trips() {
        let text = "p wtds 4 5 1\ne 1 2\ne 2 3\ne 3 1\ne 3 4 2\ne 1 4\n";
        let inst = parse_instance(text).unwrap();
        let rep = kernelize(&inst).unwrap();
        let report = build_report(&inst, &rep, BTreeMap::new());
        assert!(report.bounds.iter().all(|b| b.satisfied));
        let json = report_to_json(&report);
        let back: ReportFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(!json.contains("timings"), "empty timings are omitted");
        let timed = build_report(&inst, &rep, BTreeMap::from([("total".into(), 3u64)]));
        assert!(report_to_json(&timed).contains("timings_ms"));
    }
}
