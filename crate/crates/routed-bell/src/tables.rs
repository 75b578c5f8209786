//! Threshold scans and the tables behind the `emit` command.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::Serialize;

use routed_bell_core::bounds::{
    critical_eta_explicit, critical_eta_small, min_linear_bound, nonlinear_bound, region_conditions, RegionFlags,
};
use routed_bell_core::lhs_geometry::continuous_lhs_bound;
use routed_bell_core::SettingCount;

use crate::format::fixed;

const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaScanRow {
    pub n: u32,
    /// `None` when no efficiency up to 1 violates the condition.
    pub eta_crit_exact: Option<f64>,
    pub eta_crit_small: f64,
}

impl EtaScanRow {
    pub fn csv(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.eta_crit_exact.map_or_else(|| "none".to_owned(), fixed),
            fixed(self.eta_crit_small),
        ]
    }
}

pub const ETA_SCAN_HEADER: [&str; 3] = ["n", "eta_crit_exact", "eta_crit_small"];

/// Critical long-path efficiencies for each `n`, in input order.
pub fn scan_eta(ns: &[u32], eps: f64, delta: f64) -> Result<Vec<EtaScanRow>> {
    ensure!(!ns.is_empty(), "no setting counts given");
    ns.par_iter()
        .map(|&n| {
            Ok(EtaScanRow {
                n,
                eta_crit_exact: critical_eta_explicit(eps, delta, n)?,
                eta_crit_small: critical_eta_small(eps, delta, n)?,
            })
        })
        .collect()
}

/// `i`-th of `m` evenly spaced points on `[lo, hi]`.
fn lin(lo: f64, hi: f64, i: usize, m: usize) -> f64 {
    if m == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (m - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub t: f64,
    pub s: f64,
    pub hessian_ok: bool,
    pub envelope_iff: bool,
    pub simple_suff: bool,
    pub linear_suff: bool,
}

impl EnvelopeRow {
    fn new(t: f64, s: f64, r: RegionFlags) -> Self {
        EnvelopeRow {
            t,
            s,
            hessian_ok: r.hessian_ok,
            envelope_iff: r.envelope_iff,
            simple_suff: r.simple_suff,
            linear_suff: r.linear_suff,
        }
    }

    pub fn csv(&self) -> Vec<String> {
        let b = |x: bool| u8::from(x).to_string();
        vec![
            fixed(self.t),
            fixed(self.s),
            b(self.hessian_ok),
            b(self.envelope_iff),
            b(self.simple_suff),
            b(self.linear_suff),
        ]
    }
}

pub const ENVELOPE_HEADER: [&str; 6] = ["t", "s", "hessian_ok", "envelope_iff", "simple_suff", "linear_suff"];

/// Region flags on a `grid × grid` lattice over `t ∈ [0,1]`, `s ∈ [2, 2√2]`.
pub fn envelope_map(grid: usize) -> Result<Vec<EnvelopeRow>> {
    ensure!(grid >= 1, "grid must be positive");
    (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid, idx % grid);
            let t = lin(0.0, 1.0, i, grid);
            let s = lin(2.0, TSIRELSON, j, grid);
            Ok(EnvelopeRow::new(t, s, region_conditions(t, s)?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearBoundRow {
    pub t: f64,
    pub s: f64,
    pub nonlinear: f64,
    pub min_linear: f64,
    pub envelope_iff: bool,
    pub linear_suff: bool,
}

impl LinearBoundRow {
    pub fn csv(&self) -> Vec<String> {
        let b = |x: bool| u8::from(x).to_string();
        vec![
            fixed(self.t),
            fixed(self.s),
            fixed(self.nonlinear),
            fixed(self.min_linear),
            b(self.envelope_iff),
            b(self.linear_suff),
        ]
    }
}

pub const LINEAR_HEADER: [&str; 6] = ["t", "s", "nonlinear", "min_linear", "envelope_iff", "linear_suff"];

/// Nonlinear bound and linear-family cap side by side on a `(t, s)` grid.
pub fn linear_bounds(grid: usize, n: SettingCount, beta_grid: usize) -> Result<Vec<LinearBoundRow>> {
    ensure!(grid >= 1, "grid must be positive");
    (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid, idx % grid);
            let t = lin(0.0, 1.0, i, grid);
            let s = lin(2.0, TSIRELSON, j, grid);
            let r = region_conditions(t, s)?;
            Ok(LinearBoundRow {
                t,
                s,
                nonlinear: nonlinear_bound(t, s, n)?,
                min_linear: min_linear_bound(s, t, n, beta_grid)?,
                envelope_iff: r.envelope_iff,
                linear_suff: r.linear_suff,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

/// `(2/π) sin(πT/2)` at `points` evenly spaced click rates.
pub fn continuous_bound(points: usize) -> Result<Vec<CurvePoint>> {
    ensure!(points >= 2, "need at least two points");
    (0..points)
        .map(|i| {
            let t = lin(0.0, 1.0, i, points);
            Ok(CurvePoint { t, w: continuous_lhs_bound(t)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ideal_scan() {
        let rows = scan_eta(&[2, 4, 8], 0.0, 0.0).unwrap();
        for (r, want) in rows.iter().zip([0.5, 0.25, 0.125]) {
            assert!((r.eta_crit_exact.unwrap() - want).abs() < 1e-9);
            assert!((r.eta_crit_small - want).abs() < 1e-15);
        }
    }

    #[test]
    fn continuous_points() {
        let pts = continuous_bound(5).unwrap();
        assert_eq!(pts.len(), 5);
        assert_eq!((pts[0].t, pts[0].w), (0.0, 0.0));
        assert!((pts[2].w - 2.0 / PI * (PI / 4.0).sin()).abs() < 1e-15);
        assert!((pts[4].w - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn envelope_map_counts_nest() {
        let rows = envelope_map(100).unwrap();
        assert_eq!(rows.len(), 10_000);
        let count = |f: fn(&EnvelopeRow) -> bool| rows.iter().filter(|r| f(r)).count();
        let simple = count(|r| r.simple_suff);
        let linear = count(|r| r.linear_suff);
        let env = count(|r| r.envelope_iff);
        let hess = count(|r| r.hessian_ok);
        assert!(simple <= linear && linear <= env && env <= hess);
    }
}
