//! JSON and CSV representations.
//!
//! JSON numbers use serde_json's shortest round-trip form, so values read
//! back bit-identical. CSV cells use a fixed 12 decimal digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use routed_bell_core::bounds::{RegionFlags, Verdict};
use routed_bell_core::lhs_geometry::LhsPolytope;
use routed_bell_core::lhv_models::{SampleBatch, VerifyReport, VerifyStatus};
use routed_bell_core::strategies::{CorrelationTable, LongRow, ShortTable};
use routed_bell_core::{RoutedStats, SettingCount};

/// `{"S": .., "Wn": .., "Tn": .., "n": ..}`; `n = null` is the continuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsFile {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "Wn")]
    pub wn: f64,
    #[serde(rename = "Tn")]
    pub tn: f64,
    pub n: Option<u32>,
}

impl StatsFile {
    pub fn from_stats(st: &RoutedStats) -> Self {
        let n = match st.n() {
            SettingCount::Finite(n) => Some(n),
            SettingCount::Continuous => None,
        };
        StatsFile { s: st.s(), wn: st.wn(), tn: st.tn(), n }
    }

    pub fn to_stats(&self) -> Result<RoutedStats> {
        let n = match self.n {
            Some(n) => SettingCount::finite(n)?,
            None => SettingCount::Continuous,
        };
        Ok(RoutedStats::new(self.s, self.wn, self.tn, n)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionJson {
    pub hessian_ok: bool,
    pub envelope_iff: bool,
    pub simple_suff: bool,
    pub linear_suff: bool,
}

impl From<RegionFlags> for RegionJson {
    fn from(r: RegionFlags) -> Self {
        RegionJson {
            hessian_ok: r.hessian_ok,
            envelope_iff: r.envelope_iff,
            simple_suff: r.simple_suff,
            linear_suff: r.linear_suff,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub certified: bool,
    pub bound_name: String,
    pub bound_value: f64,
    pub margin: f64,
    pub region: RegionJson,
    pub s_effective: f64,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            certified: v.certified,
            bound_name: v.bound.name().to_owned(),
            bound_value: v.bound_value,
            margin: v.margin,
            region: v.region.into(),
            s_effective: v.s_effective,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRow {
    pub k: usize,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "W_upper")]
    pub w_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub n: u32,
    pub vertices: Vec<VertexRow>,
}

impl From<&LhsPolytope> for PolytopeJson {
    fn from(p: &LhsPolytope) -> Self {
        let vertices = p.vertices().enumerate().map(|(k, (t, w_upper))| VertexRow { k, t, w_upper }).collect();
        PolytopeJson { n: p.n(), vertices }
    }
}

impl PolytopeJson {
    pub fn to_polytope(&self) -> Result<LhsPolytope> {
        Ok(LhsPolytope::from_upper(self.n, self.vertices.iter().map(|v| v.w_upper).collect())?)
    }
}

/// `short[x][y][a][b]`, `long[y][x][a][b]` with `b = 2` the no-click.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableJson {
    pub n: usize,
    pub short: ShortTable,
    pub long: Vec<LongRow>,
}

impl From<&CorrelationTable> for TableJson {
    fn from(t: &CorrelationTable) -> Self {
        TableJson { n: t.n(), short: *t.short_table(), long: t.long_rows().to_vec() }
    }
}

impl TableJson {
    pub fn to_table(&self) -> Result<CorrelationTable> {
        anyhow::ensure!(
            self.long.len() == self.n,
            "table lists {} long-path settings, expected {}",
            self.long.len(),
            self.n
        );
        Ok(CorrelationTable::new(self.short, self.long.clone())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvReportJson {
    pub model: String,
    pub eta_target: f64,
    /// Mean click rate over all settings.
    pub eta_empirical: f64,
    pub samples: u64,
    pub seed: u64,
    pub settings: usize,
    pub max_dev: f64,
    pub sigma: f64,
    pub max_z: f64,
    pub pass: bool,
    pub status: String,
}

impl LhvReportJson {
    pub fn new(report: &VerifyReport, batch: &SampleBatch) -> Self {
        let eta_empirical =
            batch.tallies.iter().map(|t| t.click_rate()).sum::<f64>() / batch.tallies.len().max(1) as f64;
        let status = match report.status {
            VerifyStatus::Pass => "pass",
            VerifyStatus::Fail => "fail",
            VerifyStatus::InsufficientSamples => "insufficient-samples",
        };
        LhvReportJson {
            model: report.kind.name().to_owned(),
            eta_target: report.eta_target,
            eta_empirical,
            samples: batch.count,
            seed: batch.seed,
            settings: batch.settings.len(),
            max_dev: report.max_dev,
            sigma: report.sigma,
            max_z: report.max_z,
            pass: report.passed(),
            status: status.to_owned(),
        }
    }
}

/// Output encoding for tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn fixed(x: f64) -> String {
    format!("{x:.12}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// CSV text from a header and pre-formatted rows.
pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes `text` to `path`, or to `fallback` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, fallback: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => fallback.write_all(text.as_bytes()).context("writing output"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use routed_bell_core::strategies::{correlations, ideal_strategy, routed_stats};

    #[test]
    fn stats_round_trip_is_exact() {
        let st = routed_stats(&correlations(&ideal_strategy(5).unwrap()).unwrap(), 5).unwrap();
        let text = to_json(&StatsFile::from_stats(&st)).unwrap();
        let back: StatsFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_stats().unwrap(), st);
    }

    #[test]
    fn stats_schema_field_names() {
        let f: StatsFile = serde_json::from_str(r#"{"S":2.5,"Wn":0.1,"Tn":0.2,"n":4}"#).unwrap();
        assert_eq!(f.n, Some(4));
        assert!(serde_json::from_str::<StatsFile>(r#"{"S":2.5,"W":0.1,"Tn":0.2,"n":4}"#).is_err());
        let f: StatsFile = serde_json::from_str(r#"{"S":2.5,"Wn":0.1,"Tn":0.2,"n":null}"#).unwrap();
        assert_eq!(f.to_stats().unwrap().n(), SettingCount::Continuous);
    }

    #[test]
    fn table_round_trip() {
        let t = correlations(&ideal_strategy(3).unwrap()).unwrap();
        let text = to_json(&TableJson::from(&t)).unwrap();
        let back: TableJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_table().unwrap(), t);
    }

    #[test]
    fn polytope_round_trip() {
        let p = routed_bell_core::lhs_geometry::lhs_vertices(6).unwrap();
        let j = PolytopeJson::from(&p);
        let back: PolytopeJson = serde_json::from_str(&to_json(&j).unwrap()).unwrap();
        assert_eq!(back.to_polytope().unwrap(), p);
    }

    #[test]
    fn csv_uses_fixed_digits() {
        let text = to_csv(&["x"], [vec![fixed(1.0 / 3.0)]]).unwrap();
        assert_eq!(text, "x\n0.333333333333\n");
    }
}
