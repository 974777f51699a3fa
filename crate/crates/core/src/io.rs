//! Text formats: edge lists, JSON traces and reports, CSV tables and the run
//! manifest written at the top of every result file.
//!
//! Edge lists hold one `H x y` or `V x y` per line. Blank lines and anything
//! after `#` are ignored; repeated edges are kept once.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversarial::{BoundsReport, RadiusReport};
use crate::channel::TrialResult;
use crate::decoder::{DecodeTrace, RuleFiring, StageRecord};
use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeSet, SyndromeSet, TorusLevel, Vertex};
use crate::reduced_weight::Lemma4Report;

pub const RESULTS_HEADER: &str = "k,p,trials,failures,rate,ci_low,ci_high,seed";
pub const LEMMA4_HEADER: &str = "stage,wt_r,P,combined,ratio_to_next";
pub const BOUNDS_HEADER: &str = "k,u_k,v_k,witness_weight,certified_lower,certified_upper";

pub fn parse_edge_list(text: &str, level: TorusLevel) -> Result<EdgeSet> {
    let mut e = EdgeSet::empty(level);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: i + 1, message };
        let edge: Edge = line.parse().map_err(|_| err(format!("expected `H x y` or `V x y`, got `{line}`")))?;
        if !level.contains_edge(edge) {
            return Err(err(format!("edge {edge} is outside the torus {level}")));
        }
        e.insert(edge);
    }
    Ok(e)
}

pub fn write_edge_list(e: &EdgeSet) -> String {
    let mut out = format!("# k={} weight={}\n", e.level().k(), e.weight());
    for edge in e.iter() {
        writeln!(out, "{edge}").expect("writing to a String");
    }
    out
}

pub fn read_edge_list_file(path: &Path, level: TorusLevel) -> Result<EdgeSet> {
    parse_edge_list(&std::fs::read_to_string(path)?, level)
}

/// Serialized form of one trace stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StageJson {
    stage: u32,
    flipped_edges: Vec<Edge>,
    syndrome_after: Vec<[u32; 2]>,
    firings: Vec<RuleFiring>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TraceJson {
    k: u32,
    input: Vec<[u32; 2]>,
    stages: Vec<StageJson>,
}

fn vertex_pairs(s: &SyndromeSet) -> Vec<[u32; 2]> {
    s.iter().map(|v| [v.x, v.y]).collect()
}

fn syndrome_from_pairs(level: TorusLevel, pairs: &[[u32; 2]]) -> Result<SyndromeSet> {
    SyndromeSet::from_vertices(level, pairs.iter().map(|&[x, y]| Vertex::new(x, y)))
}

pub fn trace_to_json(trace: &DecodeTrace) -> String {
    let level = trace.level();
    let json = TraceJson {
        k: level.k(),
        input: vertex_pairs(&trace.input),
        stages: trace
            .stages
            .iter()
            .map(|st| StageJson {
                stage: st.stage,
                flipped_edges: st.correction.to_vec(),
                syndrome_after: vertex_pairs(&st.syndrome_after),
                firings: st.firings.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&json).expect("trace serializes")
}

pub fn trace_from_json(text: &str) -> Result<DecodeTrace> {
    let json: TraceJson = serde_json::from_str(text)?;
    let level = TorusLevel::new(json.k)?;
    let stages = json
        .stages
        .into_iter()
        .map(|st| {
            if let Some(e) = st.flipped_edges.iter().find(|e| !level.contains_edge(**e)) {
                return Err(Error::InvalidArgument(format!("edge {e} is outside the torus {level}")));
            }
            Ok(StageRecord {
                stage: st.stage,
                correction: EdgeSet::from_edges(level, st.flipped_edges),
                syndrome_after: syndrome_from_pairs(level, &st.syndrome_after)?,
                firings: st.firings,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecodeTrace {
        input: syndrome_from_pairs(level, &json.input)?,
        stages,
    })
}

pub fn radius_report_to_json(r: &RadiusReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}

pub fn radius_report_from_json(text: &str) -> Result<RadiusReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn bounds_report_to_json(r: &BoundsReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}

pub fn bounds_report_from_json(text: &str) -> Result<BoundsReport> {
    Ok(serde_json::from_str(text)?)
}

/// Provenance written as `# key: value` lines at the top of result files.
/// Everything but `timestamp` is a function of the inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub grid: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, seed: u64, grid: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            seed,
            version: concat!("toric-renorm ", env!("CARGO_PKG_VERSION")).to_string(),
            grid: grid.into(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn to_comment_lines(&self) -> String {
        format!(
            "# command: {}\n# seed: {}\n# version: {}\n# grid: {}\n# timestamp: {}\n",
            self.command, self.seed, self.version, self.grid, self.timestamp
        )
    }

    /// Reads the manifest back from the leading comment lines of a file.
    pub fn from_comment_lines(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let Some(rest) = line.strip_prefix("# ") else { break };
            if let Some((key, value)) = rest.split_once(": ") {
                fields.insert(key.to_string(), (i + 1, value.to_string()));
            }
        }
        let get = |key: &str| {
            fields.get(key).map(|(_, v)| v.clone()).ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("manifest lacks `{key}`"),
            })
        };
        let number = |key: &str| -> Result<u64> {
            let (line, v) = fields.get(key).ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("manifest lacks `{key}`"),
            })?;
            v.parse().map_err(|_| Error::Parse {
                line: *line,
                message: format!("`{key}` is not an integer"),
            })
        };
        Ok(Self {
            command: get("command")?,
            seed: number("seed")?,
            version: get("version")?,
            grid: get("grid")?,
            timestamp: number("timestamp")?,
        })
    }
}

/// Results CSV with manifest lines first. Floats use the shortest
/// representation that reads back exactly.
pub fn write_results_csv(results: &[TrialResult], manifest: &RunManifest) -> String {
    let mut out = manifest.to_comment_lines();
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.k, r.p, r.trials, r.failures, r.rate, r.ci_low, r.ci_high, r.seed
        )
        .expect("writing to a String");
    }
    out
}

pub fn parse_results_csv(text: &str) -> Result<Vec<TrialResult>> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| Error::Parse { line: i + 1, message };
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line != RESULTS_HEADER {
                return Err(err(format!("expected header `{RESULTS_HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(err(format!("expected 8 columns, found {}", cols.len())));
        }
        let f = |j: usize| cols[j].parse::<f64>().map_err(|_| err(format!("bad number `{}`", cols[j])));
        let u = |j: usize| cols[j].parse::<u64>().map_err(|_| err(format!("bad integer `{}`", cols[j])));
        rows.push(TrialResult {
            k: u(0)? as u32,
            p: f(1)?,
            trials: u(2)?,
            failures: u(3)?,
            rate: f(4)?,
            ci_low: f(5)?,
            ci_high: f(6)?,
            seed: u(7)?,
        });
    }
    Ok(rows)
}

/// Per-sample reduced-weight tables under one header, each introduced by a
/// `# sample=i` line.
pub fn write_lemma4_csv(samples: &[(u64, &Lemma4Report)], manifest: &RunManifest) -> String {
    let mut out = manifest.to_comment_lines();
    out.push_str(LEMMA4_HEADER);
    out.push('\n');
    for (index, rep) in samples {
        writeln!(out, "# sample={index} flagged={:?}", rep.flagged).expect("writing to a String");
        for row in &rep.rows {
            let ratio = row.ratio_to_next.map(|r| format!("{r:.6}")).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", row.stage, row.wt_r, row.paths, row.combined, ratio)
                .expect("writing to a String");
        }
    }
    out
}

pub fn write_bounds_table(report: &BoundsReport) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{:.6},{},{},{}",
            r.k,
            r.u_k,
            r.v_k.as_f64(),
            r.witness_weight,
            r.certified_lower,
            r.certified_upper
        )
        .expect("writing to a String");
    }
    out
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversarial::{fractal_error, radius_1d, verify_bounds, VerifyOptions};
    use crate::channel::{grid, run_experiment};
    use crate::decoder::decode_with_trace;
    use crate::lattice::syndrome;
    use proptest::prelude::*;

    fn lvl(k: u32) -> TorusLevel {
        TorusLevel::new(k).unwrap()
    }

    #[test]
    fn edge_list_basics() {
        let l = lvl(3);
        let text = "# an error\nH 1 0\n\nV 2 3  # trailing\nH 1 0\n";
        let e = parse_edge_list(text, l).unwrap();
        assert_eq!(e.to_vec(), vec![Edge::h(1, 0), Edge::v(2, 3)]);
        assert!(parse_edge_list("", l).unwrap().is_empty());
    }

    #[test]
    fn edge_list_errors_name_the_line() {
        let l = lvl(3);
        match parse_edge_list("H 1 1\nH 99 0\n", l) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        for bad in ["X 1 1", "H 1", "H 1 2 3", "H -1 0", "H a b"] {
            assert!(matches!(parse_edge_list(bad, l), Err(Error::Parse { line: 1, .. })), "{bad}");
        }
    }

    #[test]
    fn trace_round_trip() {
        let e = fractal_error(5).unwrap();
        let trace = decode_with_trace(&syndrome(&e)).unwrap();
        let json = trace_to_json(&trace);
        assert!(json.contains("\"flipped_edges\""));
        let first = trace.stages[0].correction.to_vec()[0];
        assert!(json.contains(&format!("\"{first}\"")));
        assert_eq!(trace_from_json(&json).unwrap(), trace);
    }

    #[test]
    fn report_round_trips() {
        let r = radius_1d(3).unwrap();
        assert_eq!(radius_report_from_json(&radius_report_to_json(&r)).unwrap(), r);
        let b = verify_bounds(&[2, 3], &VerifyOptions::default()).unwrap();
        assert_eq!(bounds_report_from_json(&bounds_report_to_json(&b)).unwrap(), b);
        let table = write_bounds_table(&b);
        assert_eq!(table.lines().next().unwrap(), BOUNDS_HEADER);
        assert_eq!(table.lines().nth(2).unwrap(), "3,3,1.440000,3,1,2");
    }

    #[test]
    fn results_csv_round_trip() {
        let results = run_experiment(&grid(&[2, 3], &[0.0, 0.1, 0.035 + 0.005], 50), 4).unwrap();
        let manifest = RunManifest::new("toric-renorm simulate", 4, "k=2,3");
        let csv = write_results_csv(&results, &manifest);
        assert_eq!(parse_results_csv(&csv).unwrap(), results);
        assert_eq!(RunManifest::from_comment_lines(&csv).unwrap(), manifest);
        assert!(csv.contains(RESULTS_HEADER));
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(ix in proptest::collection::vec(0usize..128, 0..40)) {
            let l = lvl(3);
            let e = EdgeSet::from_indices(l, ix);
            prop_assert_eq!(parse_edge_list(&write_edge_list(&e), l).unwrap(), e);
        }
    }
}
