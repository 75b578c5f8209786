//! Closed-form bounds on short-range quantum (SRQ) correlations.
//!
//! Everything here is a function of the short-path CHSH value `S`, the
//! long-path click rate `T_n` and the number of long-path settings `n`.

use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use libm::{acos, cos, sin, sqrt, tan};

use crate::error::{check_unit, Error, Result};
use crate::numeric::{bisect, golden_min};
use crate::strategies::{RoutedStats, SettingCount};
use crate::tol;

const TSIRELSON: f64 = 2.0 * SQRT_2;

/// Maps `S` onto `[2, 2√2]`: local values use the local bound, values a hair
/// above Tsirelson are rounding noise, anything further is rejected.
pub fn clamp_chsh(s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::OutOfRange { name: "S", value: s });
    }
    if s > TSIRELSON + tol::TSIRELSON_SLACK {
        return Err(Error::SuperQuantum(s));
    }
    Ok(s.clamp(2.0, TSIRELSON))
}

/// `γ(S) = (S + √(8 − S²))/4`, with `S < 2` treated as `S = 2`.
pub fn gamma(s: f64) -> Result<f64> {
    let s = clamp_chsh(s)?;
    Ok((s + sqrt(((TSIRELSON - s) * (TSIRELSON + s)).max(0.0))) / 4.0)
}

/// `λ_n = 1/(n sin(π/2n))`.
pub fn lambda_n(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSetting { name: "setting count", value: 0 });
    }
    let nf = n as f64;
    Ok(1.0 / (nf * sin(PI / (2.0 * nf))))
}

/// `√2 sin(πT/2) γ(S) λ_n`, the routed Bell bound on `W_n`.
pub fn nonlinear_bound(tn: f64, s: f64, n: SettingCount) -> Result<f64> {
    let tn = check_unit("T_n", tn)?;
    let g = gamma(s)?;
    Ok(SQRT_2 * sin(FRAC_PI_2 * tn) * g * n.lambda())
}

/// Which of the four region conditions hold at a point `(T, S)`.
///
/// `envelope_iff` is the exact condition for the nonlinear bound to coincide
/// with its concave envelope. The others are necessary (`hessian_ok`) or
/// sufficient (`simple_suff`, `linear_suff`) conditions for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RegionFlags {
    pub hessian_ok: bool,
    pub envelope_iff: bool,
    pub simple_suff: bool,
    pub linear_suff: bool,
}

impl RegionFlags {
    /// `simple_suff ⇒ linear_suff ⇒ envelope_iff ⇒ hessian_ok`.
    pub fn is_nested(&self) -> bool {
        (!self.simple_suff || self.linear_suff)
            && (!self.linear_suff || self.envelope_iff)
            && (!self.envelope_iff || self.hessian_ok)
    }
}

/// `ε = 1 − S/(2√2)`.
pub fn chsh_deficit(s: f64) -> Result<f64> {
    Ok(1.0 - clamp_chsh(s)? / TSIRELSON)
}

/// Right-hand side of the envelope condition `tan(u)/u ≥ R(ε)`.
pub fn envelope_threshold(eps: f64) -> f64 {
    (2.0 + sqrt((2.0 - eps) * eps) - eps * (5.0 - 2.0 * eps)) / (2.0 * (1.0 - eps))
}

/// Right-hand side of the Hessian condition `cos(πt) ≤ R(ε)`.
pub fn hessian_threshold(eps: f64) -> f64 {
    let q = (3.0 - eps) * eps;
    (1.0 + eps * (3.0 - 2.0 * q)) / (1.0 + 2.0 * sqrt((2.0 - eps) * eps) - eps * (5.0 - 2.0 * q))
}

fn tan_over_u(u: f64) -> f64 {
    if u < 1e-6 {
        1.0 + u * u / 3.0
    } else if u >= FRAC_PI_2 {
        f64::INFINITY
    } else {
        tan(u) / u
    }
}

fn u_over_sin(u: f64) -> f64 {
    if u < 1e-6 {
        1.0 + u * u / 6.0
    } else {
        u / sin(u)
    }
}

pub fn region_conditions(t: f64, s: f64) -> Result<RegionFlags> {
    let t = check_unit("T_n", t)?;
    let eps = chsh_deficit(s)?;
    let g2 = SQRT_2 * gamma(s)?;
    let u = FRAC_PI_2 * t;
    Ok(RegionFlags {
        hessian_ok: cos(PI * t) <= hessian_threshold(eps),
        envelope_iff: tan_over_u(u) >= envelope_threshold(eps),
        simple_suff: u_over_sin(u) >= g2,
        linear_suff: g2 * cos(u) <= 1.0,
    })
}

fn check_beta_x(beta: f64, x: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::OutOfRange { name: "beta", value: beta });
    }
    if !(FRAC_1_SQRT_2 - tol::ARITHMETIC..=1.0 + tol::ARITHMETIC).contains(&x) {
        return Err(Error::OutOfRange { name: "x", value: x });
    }
    Ok(())
}

/// `f_β(x) = (x + √(1 − x²))/β`.
pub fn f_beta(beta: f64, x: f64) -> Result<f64> {
    check_beta_x(beta, x)?;
    let f = (x + sqrt((1.0 - x * x).max(0.0))) / beta;
    if f < 1.0 - tol::ARITHMETIC {
        return Err(Error::Domain("f_beta(x) < 1"));
    }
    Ok(f.max(1.0))
}

/// `h_β(x) = √(f² − 1) − arccos(1/f)`.
pub fn h_beta(beta: f64, x: f64) -> Result<f64> {
    let f = f_beta(beta, x)?;
    Ok(sqrt(f * f - 1.0) - acos(1.0 / f))
}

/// `h'_β(x) = f'·√(f² − 1)/f`, `f' = (1 − x/√(1 − x²))/β`.
///
/// Diverges to `−∞` as `x → 1`.
pub fn h_beta_prime(beta: f64, x: f64) -> Result<f64> {
    let f = f_beta(beta, x)?;
    let r = sqrt((1.0 - x * x).max(0.0));
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let fp = (1.0 - x / r) / beta;
    Ok(fp * sqrt(f * f - 1.0) / f)
}

/// One member of the linear family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    beta: f64,
    xi: f64,
}

impl BoundParams {
    pub fn new(beta: f64, xi: f64) -> Result<Self> {
        check_beta_x(beta, xi)?;
        Ok(BoundParams { beta, xi: xi.clamp(FRAC_1_SQRT_2, 1.0) })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Right-hand side `h_β(ξ) + (S/2√2 − ξ) h'_β(ξ)` of the linear inequality
/// `(1/(λ_n β)) W_n − (π/2) T_n ≤ RHS`.
pub fn linear_bound(p: BoundParams, s: f64) -> Result<f64> {
    let x = clamp_chsh(s)? / TSIRELSON;
    let h = h_beta(p.beta, p.xi)?;
    let dx = x - p.xi;
    if dx == 0.0 {
        return Ok(h);
    }
    Ok(h + dx * h_beta_prime(p.beta, p.xi)?)
}

/// The cap on `W_n` implied by one linear inequality.
pub fn linear_w_cap(p: BoundParams, s: f64, tn: f64, n: SettingCount) -> Result<f64> {
    let tn = check_unit("T_n", tn)?;
    Ok(n.lambda() * p.beta * (FRAC_PI_2 * tn + linear_bound(p, s)?))
}

/// Default number of log-spaced `β` grid points.
pub const DEFAULT_BETA_GRID: usize = 10_000;
const BETA_MIN: f64 = 1e-8;

/// Tightest cap on `W_n` over the linear family, with `ξ` at the evaluation
/// point. Scans a log-spaced `β` grid, then refines with golden-section
/// search around the best grid point.
pub fn min_linear_bound(s: f64, tn: f64, n: SettingCount, beta_grid: usize) -> Result<f64> {
    let s = clamp_chsh(s)?;
    let tn = check_unit("T_n", tn)?;
    if beta_grid < 2 {
        return Err(Error::InvalidSetting { name: "beta grid", value: beta_grid });
    }
    let xi = (s / TSIRELSON).clamp(FRAC_1_SQRT_2, 1.0);
    let cap = |beta: f64| -> f64 {
        BoundParams::new(beta, xi).and_then(|p| linear_w_cap(p, s, tn, n)).unwrap_or(f64::INFINITY)
    };
    let log_lo = libm::log(BETA_MIN);
    let step = -log_lo / (beta_grid - 1) as f64;
    let beta_at = |i: usize| if i + 1 == beta_grid { 1.0 } else { libm::exp(log_lo + step * i as f64) };
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..beta_grid {
        let v = cap(beta_at(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = beta_at(best_i.saturating_sub(1));
    let hi = beta_at((best_i + 1).min(beta_grid - 1));
    let (_, refined) = golden_min(cap, lo, hi, 1e-12);
    Ok(best.min(refined))
}

/// Steering bound for Alice measuring `cos α H ± sin α M`, whose CHSH value
/// is `s_α = 2(cos α + sin α)`.
///
/// Since `8 − s_α² = 4(cos α − sin α)²`, `γ(s_α) = max(cos α, sin α)`
/// exactly, which avoids the square root's sensitivity near `α = π/4`.
pub fn steering_bound(alpha: f64, tn: f64, n: SettingCount) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    let tn = check_unit("T_n", tn)?;
    let g = cos(alpha).max(sin(alpha));
    Ok(SQRT_2 * sin(FRAC_PI_2 * tn) * g * n.lambda())
}

fn check_noise(eps: f64, delta: f64) -> Result<()> {
    check_unit("epsilon", eps)?;
    check_unit("delta", delta)?;
    if delta >= 1.0 {
        return Err(Error::OutOfRange { name: "delta", value: delta });
    }
    Ok(())
}

fn explicit_rhs(eps: f64, delta: f64, n: u32) -> Result<f64> {
    check_noise(eps, delta)?;
    let lambda = lambda_n(n)?;
    Ok((1.0 - eps + sqrt(eps * (2.0 - eps))) * lambda / (1.0 - delta))
}

fn explicit_lhs(eta: f64) -> f64 {
    if eta == 0.0 {
        2.0 / PI
    } else {
        eta / sin(FRAC_PI_2 * eta)
    }
}

/// `true` when the qubit model with long-path efficiency `eta` and local
/// noise `(ε, δ)` violates `η/sin(πη/2) ≤ (1−ε+√(ε(2−ε)))/((1−δ) n sin(π/2n))`.
pub fn violation_condition_explicit(eta: f64, eps: f64, delta: f64, n: u32) -> Result<bool> {
    let eta = check_unit("eta", eta)?;
    Ok(explicit_lhs(eta) > explicit_rhs(eps, delta, n)?)
}

/// Smallest `η` violating the explicit condition, or `None` if no `η ≤ 1` does.
pub fn critical_eta_explicit(eps: f64, delta: f64, n: u32) -> Result<Option<f64>> {
    let rhs = explicit_rhs(eps, delta, n)?;
    if rhs >= 1.0 {
        return Ok(None);
    }
    if rhs < 2.0 / PI {
        return Ok(Some(0.0));
    }
    Ok(bisect(|eta| explicit_lhs(eta) - rhs, 1e-6, 1.0, tol::BISECTION))
}

/// `(1/n)√(1 + (24/π²) n² (δ + √(2ε)))`.
pub fn critical_eta_small(eps: f64, delta: f64, n: u32) -> Result<f64> {
    check_noise(eps, delta)?;
    if n == 0 {
        return Err(Error::InvalidSetting { name: "setting count", value: 0 });
    }
    let nf = n as f64;
    Ok(sqrt(1.0 + 24.0 / (PI * PI) * nf * nf * (delta + sqrt(2.0 * eps))) / nf)
}

/// Small-noise violation condition `η > critical_eta_small(ε, δ, n)`.
pub fn violation_condition_small(eta: f64, eps: f64, delta: f64, n: u32) -> Result<bool> {
    let eta = check_unit("eta", eta)?;
    Ok(eta > critical_eta_small(eps, delta, n)?)
}

/// Which bound decided a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Nonlinear,
    LinearFamily,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Nonlinear => "nonlinear",
            BoundKind::LinearFamily => "linear-family",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub certified: bool,
    pub bound: BoundKind,
    /// Cap on `W_n` for SRQ correlations.
    pub bound_value: f64,
    /// `W_n − bound_value`.
    pub margin: f64,
    pub region: RegionFlags,
    /// `S` after clamping onto `[2, 2√2]`.
    pub s_effective: f64,
}

/// Decides whether `stats` certify long-range quantum correlations.
pub fn certify(stats: &RoutedStats) -> Result<Verdict> {
    certify_with_tol(stats, tol::CERTIFY_MARGIN)
}

/// As [`certify`], requiring `margin > rel_tol · bound_value`, with the cap
/// also evaluated at `S` lowered by a rounding allowance.
pub fn certify_with_tol(stats: &RoutedStats, rel_tol: f64) -> Result<Verdict> {
    if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
        return Err(Error::OutOfRange { name: "tolerance", value: rel_tol });
    }
    let s = clamp_chsh(stats.s())?;
    let tn = stats.tn();
    let n = stats.n();
    let region = region_conditions(tn, s)?;
    let bound = if region.envelope_iff { BoundKind::Nonlinear } else { BoundKind::LinearFamily };
    let cap = |s: f64| match bound {
        BoundKind::Nonlinear => nonlinear_bound(tn, s, n),
        BoundKind::LinearFamily => min_linear_bound(s, tn, n, DEFAULT_BETA_GRID),
    };
    let bound_value = cap(s)?;
    let margin = stats.wn() - bound_value;
    let threshold = rel_tol * bound_value.abs();
    // Near 2√2 a few ulps of error in S move the cap by far more than
    // rel_tol, so the witness must also beat the cap at a slightly lower S.
    let certified = margin > threshold && {
        let s_low = clamp_chsh(s - tol::CHSH_ROUNDING_ULPS * f64::EPSILON * s)?;
        stats.wn() - cap(s_low)? > threshold
    };
    Ok(Verdict { certified, bound, bound_value, margin, region, s_effective: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_PI_4;
    use proptest::prelude::*;

    const INF: SettingCount = SettingCount::Continuous;

    fn fin(n: u32) -> SettingCount {
        SettingCount::Finite(n)
    }

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(gamma(2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma(TSIRELSON).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma(2.5).unwrap(), 0.955_718_9, epsilon = 1e-7);
        assert_eq!(gamma(1.2).unwrap(), 1.0);
        assert_eq!(gamma(TSIRELSON + 5e-10).unwrap(), FRAC_1_SQRT_2);
        assert!(matches!(gamma(TSIRELSON + 1e-8), Err(Error::SuperQuantum(_))));
    }

    #[test]
    fn gamma_monotone() {
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let s = 2.0 + (TSIRELSON - 2.0) * i as f64 / 1000.0;
            let g = gamma(s).unwrap();
            assert!(g <= prev + 1e-15);
            prev = g;
        }
    }

    #[test]
    fn lambda_values() {
        assert_abs_diff_eq!(lambda_n(1).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_n(2).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_n(1_000_000).unwrap(), 2.0 / PI, epsilon = 1e-12);
        assert!(lambda_n(0).is_err());
        for n in 1..200 {
            assert!(lambda_n(n + 1).unwrap() < lambda_n(n).unwrap());
        }
    }

    #[test]
    fn nonlinear_values() {
        assert_abs_diff_eq!(nonlinear_bound(1.0, TSIRELSON, fin(4)).unwrap(), 0.653_281_482, epsilon = 1e-9);
        assert_eq!(nonlinear_bound(0.0, 2.3, fin(7)).unwrap(), 0.0);
        assert_abs_diff_eq!(nonlinear_bound(1.0, 2.0, INF).unwrap(), 2.0 * SQRT_2 / PI, epsilon = 1e-15);
        assert!(nonlinear_bound(1.1, 2.0, INF).is_err());
    }

    #[test]
    fn region_examples() {
        assert_abs_diff_eq!(envelope_threshold(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(envelope_threshold(0.1), 1.086_605_5, epsilon = 1e-7);
        assert_abs_diff_eq!(hessian_threshold(0.0), 1.0, epsilon = 1e-15);
        for i in 1..=100 {
            let t = i as f64 / 100.0;
            assert!(region_conditions(t, TSIRELSON).unwrap().envelope_iff);
        }
        for i in 0..=50 {
            let s = 2.0 + (TSIRELSON - 2.0) * i as f64 / 50.0;
            let r = region_conditions(1.0, s).unwrap();
            assert!(r.linear_suff && r.envelope_iff && r.hessian_ok);
        }
    }

    #[test]
    fn region_nesting_on_grid() {
        let m = 400;
        let mut counts = [0usize; 4];
        for i in 0..=m {
            for j in 0..=m {
                let t = i as f64 / m as f64;
                let s = 2.0 + (TSIRELSON - 2.0) * j as f64 / m as f64;
                let r = region_conditions(t, s).unwrap();
                assert!(r.is_nested(), "t={t} s={s} {r:?}");
                counts[0] += r.simple_suff as usize;
                counts[1] += r.linear_suff as usize;
                counts[2] += r.envelope_iff as usize;
                counts[3] += r.hessian_ok as usize;
            }
        }
        assert!(counts[0] < counts[1] && counts[1] < counts[2] && counts[2] < counts[3]);
    }

    #[test]
    fn h_examples() {
        assert_abs_diff_eq!(h_beta(1.0, FRAC_1_SQRT_2).unwrap(), 1.0 - FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(h_beta(1.0, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h_beta(0.5, 1.0).unwrap(), libm::sqrt(3.0) - PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h_beta_prime(1.0, FRAC_1_SQRT_2).unwrap(), 0.0, epsilon = 1e-12);
        assert!(h_beta(0.0, 0.8).is_err());
        assert!(h_beta(1.0, 0.5).is_err());
    }

    #[test]
    fn h_prime_matches_finite_difference() {
        for beta in [0.1, 0.35, 0.7, 1.0] {
            for x in [0.72, 0.8, 0.9, 0.97] {
                let d = 1e-6;
                let fd = (h_beta(beta, x + d).unwrap() - h_beta(beta, x - d).unwrap()) / (2.0 * d);
                assert_abs_diff_eq!(h_beta_prime(beta, x).unwrap(), fd, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn h_nonincreasing_and_concave() {
        let m = 1000;
        for k in 1..=10 {
            let beta = k as f64 / 10.0;
            let xs: alloc::vec::Vec<f64> =
                (0..m).map(|i| FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * i as f64 / (m - 1) as f64).collect();
            let h: alloc::vec::Vec<f64> = xs.iter().map(|&x| h_beta(beta, x).unwrap()).collect();
            for i in 1..m {
                assert!(h[i] - h[i - 1] <= 1e-10, "beta={beta} i={i}");
            }
            for i in 1..m - 1 {
                assert!(h[i + 1] - 2.0 * h[i] + h[i - 1] <= 1e-8, "beta={beta} i={i}");
            }
        }
    }

    #[test]
    fn linear_examples() {
        let p = BoundParams::new(1.0, FRAC_1_SQRT_2).unwrap();
        assert_abs_diff_eq!(linear_bound(p, TSIRELSON).unwrap(), 1.0 - FRAC_PI_4, epsilon = 1e-12);
        let p = BoundParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(linear_bound(p, TSIRELSON).unwrap(), 0.0, epsilon = 1e-15);
        // Ideal statistics W = T = 1 at β = 1 sit well inside this member.
        let p = BoundParams::new(1.0, FRAC_1_SQRT_2).unwrap();
        let lhs = FRAC_PI_2 * 1.0 - FRAC_PI_2 * 1.0;
        assert!(lhs <= linear_bound(p, TSIRELSON).unwrap());
        assert!(BoundParams::new(1.2, 0.8).is_err());
        assert!(BoundParams::new(0.5, 0.6).is_err());
    }

    /// Closed-form minimum over β of `β(πT/2 + h_β(x))`; the objective is
    /// convex in β with stationary point `β = F cos(πT/2)`, `F = √2 γ(S)`.
    fn linear_family_oracle(s: f64, tn: f64, n: SettingCount) -> f64 {
        let f = SQRT_2 * gamma(s).unwrap();
        let u = FRAC_PI_2 * tn;
        let beta = f * cos(u);
        let inner = if beta <= 1.0 { f * sin(u) } else { u + libm::sqrt(f * f - 1.0) - acos(1.0 / f) };
        n.lambda() * inner
    }

    #[test]
    fn min_linear_examples() {
        let got = min_linear_bound(TSIRELSON, 0.5, INF, DEFAULT_BETA_GRID).unwrap();
        assert_abs_diff_eq!(got, 2.0 / PI * sin(FRAC_PI_4), epsilon = 1e-9);
        let got = min_linear_bound(TSIRELSON, 1.0, fin(4), DEFAULT_BETA_GRID).unwrap();
        assert_abs_diff_eq!(got, 0.653_281_482, epsilon = 1e-6);
        // At S = 2, T = 0 the best member is β = 1 and leaves a positive cap.
        let got = min_linear_bound(2.0, 0.0, fin(5), DEFAULT_BETA_GRID).unwrap();
        assert_abs_diff_eq!(got, lambda_n(5).unwrap() * (1.0 - FRAC_PI_4), epsilon = 1e-12);
    }

    #[test]
    fn min_linear_matches_oracle() {
        for i in 0..=20 {
            for j in 0..=20 {
                let t = i as f64 / 20.0;
                let s = 2.0 + (TSIRELSON - 2.0) * j as f64 / 20.0;
                let got = min_linear_bound(s, t, fin(3), 2000).unwrap();
                assert_abs_diff_eq!(got, linear_family_oracle(s, t, fin(3)), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn steering_examples() {
        for t in [0.1, 0.5, 0.9] {
            let l = lambda_n(6).unwrap();
            assert_abs_diff_eq!(steering_bound(FRAC_PI_4, t, fin(6)).unwrap(), sin(FRAC_PI_2 * t) * l, epsilon = 1e-12);
            assert_abs_diff_eq!(
                steering_bound(0.0, t, fin(6)).unwrap(),
                SQRT_2 * sin(FRAC_PI_2 * t) * l,
                epsilon = 1e-12
            );
        }
        assert_eq!(steering_bound(0.3, 0.0, fin(2)).unwrap(), 0.0);
        assert!(steering_bound(2.0, 0.5, fin(2)).is_err());
        for alpha in [0.0, 0.2, 0.6, 1.0, 1.4] {
            let s = 2.0 * (cos(alpha) + sin(alpha));
            let direct = nonlinear_bound(0.7, s, fin(5)).unwrap();
            assert_abs_diff_eq!(steering_bound(alpha, 0.7, fin(5)).unwrap(), direct, epsilon = 1e-7);
        }
    }

    #[test]
    fn explicit_condition_examples() {
        assert!(!violation_condition_explicit(0.25, 0.0, 0.0, 4).unwrap());
        assert!(violation_condition_explicit(0.30, 0.0, 0.0, 4).unwrap());
        assert_abs_diff_eq!(explicit_lhs(0.3), 0.660_81, epsilon = 1e-5);
        assert!(!violation_condition_explicit(0.20, 0.0, 0.0, 4).unwrap());
    }

    #[test]
    fn ideal_threshold_is_one_over_n() {
        for n in 2..=32 {
            let eta = critical_eta_explicit(0.0, 0.0, n).unwrap().unwrap();
            assert_abs_diff_eq!(eta, 1.0 / n as f64, epsilon = 1e-10);
            assert_abs_diff_eq!(critical_eta_small(0.0, 0.0, n).unwrap(), 1.0 / n as f64, epsilon = 1e-15);
        }
        assert_eq!(critical_eta_explicit(0.0, 0.0, 1).unwrap(), None);
    }

    #[test]
    fn small_condition_examples() {
        assert_abs_diff_eq!(critical_eta_small(0.0, 0.01, 4).unwrap(), 0.294_647_4, epsilon = 1e-7);
        assert!(violation_condition_small(0.3, 0.0, 0.01, 4).unwrap());
        assert!(!violation_condition_small(0.29, 0.0, 0.01, 4).unwrap());
        // Equal local imperfections ζ give ε ≈ 4ζ and δ ≈ 2ζ, so to first
        // order the threshold is (1/n)(1 + (24/π²) n² √(2ζ)).
        let zeta: f64 = 1e-10;
        let exact = critical_eta_small(4.0 * zeta, 2.0 * zeta, 4).unwrap() * 4.0;
        let approx = 1.0 + 24.0 / (PI * PI) * 16.0 * libm::sqrt(2.0 * zeta);
        assert_abs_diff_eq!(exact, approx, epsilon = 3e-7);
    }

    #[test]
    fn certify_examples() {
        let st = RoutedStats::new(TSIRELSON, 0.3, 0.3, fin(4)).unwrap();
        let v = certify(&st).unwrap();
        assert!(v.certified && v.bound == BoundKind::Nonlinear && v.margin > 0.0);

        // At S = 2 the cap is 2√2/π, reached by an SRQ model; W = 1 beats it.
        let st = RoutedStats::new(2.0, 1.0, 1.0, INF).unwrap();
        let v = certify(&st).unwrap();
        assert_abs_diff_eq!(v.bound_value, 2.0 * SQRT_2 / PI, epsilon = 1e-12);
        assert!(v.certified);
        let st = RoutedStats::new(2.0, 2.0 * SQRT_2 / PI, 1.0, INF).unwrap();
        assert!(!certify(&st).unwrap().certified);

        for (s, t) in [(2.0, 0.4), (2.7, 0.9), (TSIRELSON, 0.0)] {
            let v = certify(&RoutedStats::new(s, 0.0, t, fin(3)).unwrap()).unwrap();
            assert!(!v.certified);
        }
    }

    #[test]
    fn certify_below_local_uses_local_value() {
        let a = certify(&RoutedStats::new(1.5, 0.2, 0.5, fin(3)).unwrap()).unwrap();
        let b = certify(&RoutedStats::new(2.0, 0.2, 0.5, fin(3)).unwrap()).unwrap();
        assert_eq!(a.s_effective, 2.0);
        assert_eq!(a.bound_value, b.bound_value);
    }

    #[test]
    fn certify_uses_linear_family_outside_envelope_region() {
        let s = 2.05;
        let t = 0.05;
        let st = RoutedStats::new(s, 0.01, t, fin(8)).unwrap();
        let v = certify(&st).unwrap();
        assert!(!v.region.envelope_iff);
        assert_eq!(v.bound, BoundKind::LinearFamily);
        assert!(v.bound_value >= nonlinear_bound(t, s, fin(8)).unwrap());
    }

    #[test]
    fn certify_rejects_super_quantum() {
        let st = RoutedStats::new(2.9, 0.1, 0.5, fin(2)).unwrap();
        assert!(matches!(certify(&st), Err(Error::SuperQuantum(_))));
    }

    proptest! {
        #[test]
        fn linear_never_below_nonlinear(t in 0.0f64..=1.0, s in 2.0f64..=TSIRELSON, n in 1u32..64) {
            let lin = min_linear_bound(s, t, fin(n), 500).unwrap();
            let nl = nonlinear_bound(t, s, fin(n)).unwrap();
            prop_assert!(lin >= nl - 1e-9);
        }

        #[test]
        fn linear_matches_nonlinear_in_linear_region(t in 0.0f64..=1.0, s in 2.0f64..=TSIRELSON) {
            prop_assume!(region_conditions(t, s).unwrap().linear_suff);
            let lin = min_linear_bound(s, t, INF, 2000).unwrap();
            let nl = nonlinear_bound(t, s, INF).unwrap();
            prop_assert!((lin - nl).abs() <= 1e-8);
        }

        #[test]
        fn regions_nested(t in 0.0f64..=1.0, s in 2.0f64..=TSIRELSON) {
            prop_assert!(region_conditions(t, s).unwrap().is_nested());
        }

        #[test]
        fn zero_witness_never_certified(t in 0.0f64..=1.0, s in 0.0f64..=TSIRELSON, n in 1u32..40) {
            let st = RoutedStats::new(s, 0.0, t, fin(n)).unwrap();
            prop_assert!(!certify(&st).unwrap().certified);
        }
    }

    #[test]
    fn rounding_guard_only_bites_near_tsirelson() {
        let n = SettingCount::Finite(8);
        let barely_above = |s: f64| {
            let w = nonlinear_bound(0.5, s, n).unwrap() * (1.0 + 1e-10);
            certify(&RoutedStats::new(s, w, 0.5, n).unwrap()).unwrap()
        };
        assert!(barely_above(2.5).certified);
        let v = barely_above(TSIRELSON - 1e-14);
        assert!(v.margin > 0.0 && !v.certified);
    }
}
