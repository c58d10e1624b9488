//! Report envelope shared by all subcommands. Everything outside `meta` is
//! deterministic for a fixed config and input; `meta` carries the timestamp
//! and wall-clock timings and is the only field excluded from byte-for-byte
//! comparisons.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use kanon::cascade::CascadeSummary;
use kanon::equivalence::AnonymityReport;
use kanon::graph::LoadReport;
use kanon::twins::{TwinSummary, TwinUniqueReport};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    /// Effective configuration, echoed for provenance.
    pub config: serde_json::Value,
    pub graph: GraphInfo,
    pub results: T,
    pub meta: Meta,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
pub struct GraphInfo {
    pub nodes: u64,
    pub edges: u64,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub load_report: Option<LoadReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub giant_dropped: Option<usize>,
}

#[derive(Serialize)]
pub struct Meta {
    pub timestamp_unix: u64,
    /// Wall-clock seconds per phase; twin detection is itemized separately
    /// from the measure it accompanies.
    pub timing_seconds: BTreeMap<String, f64>,
}

impl Meta {
    pub fn new(timing_seconds: BTreeMap<String, f64>) -> Meta {
        Meta {
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            timing_seconds,
        }
    }
}

#[derive(Serialize)]
pub struct StatsResults {
    pub nodes: u64,
    pub edges: u64,
    pub degree_min: u64,
    pub degree_mean: f64,
    pub degree_max: u64,
    pub twin_fraction: f64,
}

#[derive(Serialize)]
pub struct DkResults {
    pub per_d: Vec<DkEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twins: Option<TwinSummary>,
    /// Plain vs twin-unique fractions side by side, one entry per measure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twin_unique_report: Option<TwinUniqueReport>,
}

#[derive(Serialize)]
pub struct DkEntry {
    #[serde(flatten)]
    pub report: AnonymityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twin_unique_fraction: Option<f64>,
}

#[derive(Serialize)]
pub struct CascadeResults {
    #[serde(flatten)]
    pub summary: CascadeSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twin: Option<CascadeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twins: Option<TwinSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twin_unique_report: Option<TwinUniqueReport>,
}

/// dk CSV rows: `measure,d,k,value` (k is empty for twin_unique rows).
pub fn dk_csv(entries: &[DkEntry]) -> String {
    let mut out = String::from("measure,d,k,value\n");
    for e in entries {
        for (i, f) in e.report.fractions.iter().enumerate() {
            out.push_str(&format!(
                "fraction_at_most,{},{},{:.6}\n",
                e.report.d,
                i + 1,
                f
            ));
        }
        if let Some(t) = e.twin_unique_fraction {
            out.push_str(&format!("twin_unique,{},,{:.6}\n", e.report.d, t));
        }
    }
    out
}
