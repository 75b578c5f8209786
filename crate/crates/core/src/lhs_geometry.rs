//! Geometry of the `(T_n, W_n)` values reachable by local hidden state (LHS)
//! models, and an explicit SRQ model that saturates the routed bounds.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use libm::{cos, fabs, sin};

use crate::bounds::lambda_n;
use crate::error::{check_unit, Error, Result};
use crate::qmath::{born_expectation, kron, CMatrix, DensityMatrix, Povm};
use crate::strategies::{routed_stats, CorrelationTable, LongRow, RoutedStats, SettingCount, ShortTable};

/// Upper boundary of the LHS polytope: vertices `(k/n, Ŵ_k)` for `k = 0..=n`.
/// The lower boundary is the mirror image `W → −W`.
#[derive(Clone, Debug, PartialEq)]
pub struct LhsPolytope {
    n: u32,
    w: Vec<f64>,
}

impl LhsPolytope {
    pub fn from_upper(n: u32, w: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSetting { name: "setting count", value: 0 });
        }
        if w.len() != n as usize + 1 {
            return Err(Error::MissingSettings { expected: n as usize + 1, found: w.len() });
        }
        Ok(LhsPolytope { n, w })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `T̂_k = k/n`.
    pub fn t(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn w(&self, k: usize) -> f64 {
        self.w[k]
    }

    pub fn upper(&self) -> &[f64] {
        &self.w
    }

    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.w.iter().enumerate().map(|(k, &w)| (self.t(k), w))
    }

    /// Piecewise-linear upper boundary at click rate `t`.
    pub fn boundary_at(&self, t: f64) -> Result<f64> {
        let t = check_unit("T_n", t)?;
        let pos = t * self.n as f64;
        let k = (libm::floor(pos) as usize).min(self.n as usize - 1);
        let frac = pos - k as f64;
        Ok(self.w[k] + frac * (self.w[k + 1] - self.w[k]))
    }

    pub fn contains(&self, t: f64, w: f64) -> Result<bool> {
        Ok(fabs(w) <= self.boundary_at(t)? + crate::tol::STRUCTURAL)
    }

    /// Slopes between consecutive vertices.
    pub fn slopes(&self) -> Vec<f64> {
        self.w.windows(2).map(|p| (p[1] - p[0]) * self.n as f64).collect()
    }
}

/// Vertices `Ŵ_k = sin(πk/2n)/(n sin(π/2n))`.
pub fn lhs_vertices(n: u32) -> Result<LhsPolytope> {
    let lambda = lambda_n(n)?;
    let nf = n as f64;
    let w = (0..=n).map(|k| sin(PI * k as f64 / (2.0 * nf)) * lambda).collect();
    LhsPolytope::from_upper(n, w)
}

/// `true` when `(T_n, W_n)` lies in the LHS polytope for `n` settings.
pub fn lhs_membership(tn: f64, wn: f64, n: u32) -> Result<bool> {
    lhs_vertices(n)?.contains(tn, wn)
}

/// `(2/π) sin(πT/2)`, the LHS bound with a continuum of settings.
pub fn continuous_lhs_bound(t: f64) -> Result<f64> {
    let t = check_unit("T", t)?;
    Ok(2.0 / PI * sin(FRAC_PI_2 * t))
}

/// Largest setting count the brute-force scan accepts.
pub const BRUTE_FORCE_MAX_N: u32 = 12;
/// Default number of `ζ` grid points on `[0, π)`.
pub const DEFAULT_ZETA_GRID: usize = 100_000;

fn zeta_points(n: u32, grid: usize) -> Vec<f64> {
    let mut z: Vec<f64> = (0..grid).map(|i| PI * i as f64 / grid as f64).collect();
    z.push(PI / (2.0 * n as f64));
    z.sort_by(|a, b| a.total_cmp(b));
    z.dedup();
    z
}

/// Scans hidden-state directions `ζ` and, for every `k`, keeps the best
/// `(1/n)·Σ` of the `k` largest `|cos(θ_y − ζ)|`, together with its `ζ`.
fn scan(n: u32, grid: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n > BRUTE_FORCE_MAX_N {
        return Err(Error::InvalidSetting { name: "brute-force setting count", value: n as usize });
    }
    if grid == 0 {
        return Err(Error::InvalidSetting { name: "zeta grid", value: 0 });
    }
    let nf = n as f64;
    let thetas: Vec<f64> = (0..n).map(|y| y as f64 * PI / nf).collect();
    let mut best = alloc::vec![(0.0, f64::NEG_INFINITY); n as usize + 1];
    let mut c = alloc::vec![0.0; n as usize];
    for zeta in zeta_points(n, grid) {
        for (cy, th) in c.iter_mut().zip(&thetas) {
            *cy = fabs(cos(th - zeta)) / nf;
        }
        c.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        for k in 0..=n as usize {
            if k > 0 {
                acc += c[k - 1];
            }
            // Lowest ζ wins ties.
            if acc > best[k].1 + 1e-14 {
                best[k] = (zeta, acc);
            }
        }
    }
    Ok(best)
}

/// Independent oracle for [`lhs_vertices`] maximizing over deterministic
/// LHS responses.
pub fn brute_force_lhs(n: u32, zeta_grid: usize) -> Result<LhsPolytope> {
    let best = scan(n, zeta_grid)?;
    LhsPolytope::from_upper(n, best.into_iter().map(|(_, w)| w).collect())
}

/// `(ζ, Ŵ)` attaining the brute-force maximum for `k` clicks.
pub fn brute_force_argmax(n: u32, k: u32, zeta_grid: usize) -> Result<(f64, f64)> {
    if k > n {
        return Err(Error::InvalidSetting { name: "click count", value: k as usize });
    }
    Ok(scan(n, zeta_grid)?[k as usize])
}

/// Parameters of the saturating SRQ model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrqModelParams {
    alpha: f64,
    omega: f64,
    n: SettingCount,
}

impl SrqModelParams {
    /// `alpha ∈ [0, π/4]` tilts Alice's measurements, `omega ∈ [0, π/2]` is
    /// the half-width of the long-path acceptance window.
    pub fn new(alpha: f64, omega: f64, n: SettingCount) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&alpha) {
            return Err(Error::OutOfRange { name: "alpha", value: alpha });
        }
        if !(0.0..=FRAC_PI_2).contains(&omega) {
            return Err(Error::OutOfRange { name: "omega", value: omega });
        }
        if n == SettingCount::Finite(0) {
            return Err(Error::InvalidSetting { name: "setting count", value: 0 });
        }
        Ok(SrqModelParams { alpha, omega, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n(&self) -> SettingCount {
        self.n
    }
}

const WINDOW_TIE: f64 = 1e-12;

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = libm::fmod(fabs(a - b), 2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Response of the long-path device to the hidden `H` eigenvalue `+`:
/// `Some(0)` near `π/4`, `Some(1)` near `π/4 + π`, `None` otherwise.
/// The `−` eigenvalue flips the outcome.
fn window(theta: f64, omega: f64) -> Option<usize> {
    if angular_distance(theta, FRAC_PI_4) <= omega + WINDOW_TIE {
        Some(0)
    } else if angular_distance(theta, FRAC_PI_4 + PI) <= omega + WINDOW_TIE {
        Some(1)
    } else {
        None
    }
}

/// Statistics of an SRQ model on `Φ⁺`: Alice measures `cos α H ± sin α M`,
/// `B^S` measures `H` and `M`, and a device next to the source measures the
/// long-path qubit in the `H` basis and forwards a classical instruction.
/// `B^L` answers only when its angle lies in one of two windows of half-width
/// `Ω`, giving `T = Ω/(π/2)` and `W = √2 cos α sin Ω/(π/2)` as `n → ∞`.
pub fn srq_saturating_stats(p: SrqModelParams) -> Result<RoutedStats> {
    match p.n {
        SettingCount::Continuous => {
            let (a, o) = (p.alpha, p.omega);
            RoutedStats::new(
                2.0 * (cos(a) + sin(a)),
                SQRT_2 * cos(a) * sin(o) / FRAC_PI_2,
                o / FRAC_PI_2,
                SettingCount::Continuous,
            )
        }
        SettingCount::Finite(n) => routed_stats(&srq_saturating_table(p.alpha, p.omega, n)?, n),
    }
}

/// Born-rule correlation table of the saturating model with `n` settings.
pub fn srq_saturating_table(alpha: f64, omega: f64, n: u32) -> Result<CorrelationTable> {
    SrqModelParams::new(alpha, omega, SettingCount::finite(n)?)?;
    let rho = DensityMatrix::phi_plus();
    let h = CMatrix::h_axis();
    let m = CMatrix::m_axis();
    let alice = [h * cos(alpha) + m * sin(alpha), h * cos(alpha) - m * sin(alpha)];
    let alice: Vec<Povm> = alice.iter().map(Povm::from_observable).collect::<Result<_>>()?;
    let short: Vec<Povm> = [h, m].iter().map(Povm::from_observable).collect::<Result<_>>()?;
    let h_proj = Povm::from_observable(&h)?;
    let (plus, minus) = (h_proj.elements()[0], h_proj.elements()[1]);
    let zero = CMatrix::zeros(2)?;
    let id = CMatrix::eye2();

    let joint = |a: &CMatrix, b: &CMatrix| -> Result<f64> { born_expectation(&rho, &kron(a, b)?) };

    let mut sp: ShortTable = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    sp[x][y][a][b] = joint(&alice[x].elements()[a], &short[y].elements()[b])?;
                }
            }
        }
    }

    let mut lp = Vec::with_capacity(n as usize);
    for y in 0..n {
        let theta = y as f64 * PI / n as f64;
        let elems: [CMatrix; 3] = match window(theta, omega) {
            Some(0) => [plus, minus, zero],
            Some(_) => [minus, plus, zero],
            None => [zero, zero, id],
        };
        let mut row: LongRow = [[[0.0; 3]; 2]; 2];
        for x in 0..2 {
            for a in 0..2 {
                for b in 0..3 {
                    row[x][a][b] = joint(&alice[x].elements()[a], &elems[b])?;
                }
            }
        }
        lp.push(row);
    }
    CorrelationTable::new(sp, lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{certify, nonlinear_bound};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;

    #[test]
    fn vertex_examples() {
        let p = lhs_vertices(2).unwrap();
        let v: Vec<(f64, f64)> = p.vertices().collect();
        assert_eq!(v.len(), 3);
        assert_abs_diff_eq!(v[1].0, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2].1, FRAC_1_SQRT_2, epsilon = 1e-15);

        let p = lhs_vertices(3).unwrap();
        for (got, want) in p.upper().iter().zip([0.0, 1.0 / 3.0, 0.577_350_269, 2.0 / 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        let p = lhs_vertices(1).unwrap();
        assert_eq!(p.vertices().collect::<Vec<_>>(), [(0.0, 0.0), (1.0, 1.0)]);
        assert!(lhs_vertices(0).is_err());
    }

    #[test]
    fn membership_examples() {
        assert_abs_diff_eq!(lhs_vertices(2).unwrap().boundary_at(0.75).unwrap(), 0.603_553_4, epsilon = 1e-7);
        assert!(lhs_membership(0.75, 0.60, 2).unwrap());
        assert!(lhs_membership(0.75, -0.60, 2).unwrap());
        assert!(!lhs_membership(0.75, 0.61, 2).unwrap());
        for n in 2..20 {
            assert!(!lhs_membership(1.0, 1.0, n).unwrap());
        }
        assert!(lhs_membership(1.0, 1.0, 1).unwrap());
    }

    #[test]
    fn continuous_limit() {
        assert_abs_diff_eq!(continuous_lhs_bound(1.0).unwrap(), 2.0 / PI, epsilon = 1e-15);
        assert_eq!(continuous_lhs_bound(0.0).unwrap(), 0.0);
        let n = 10_000;
        let p = lhs_vertices(n).unwrap();
        for k in (0..=n as usize).step_by(97) {
            assert_abs_diff_eq!(p.w(k), continuous_lhs_bound(p.t(k)).unwrap(), epsilon = 1e-7);
        }
    }

    #[test]
    fn slopes_strictly_decrease() {
        for n in 1..40 {
            let s = lhs_vertices(n).unwrap().slopes();
            for w in s.windows(2) {
                assert!(w[1] < w[0]);
            }
        }
    }

    #[test]
    fn boundary_tightens_with_n() {
        for t in [0.1, 0.33, 0.5, 0.8, 1.0] {
            let mut prev = f64::INFINITY;
            for n in [1, 2, 4, 8, 16, 32, 64] {
                let b = lhs_vertices(n).unwrap().boundary_at(t).unwrap();
                assert!(b <= prev + 1e-12);
                assert!(b >= continuous_lhs_bound(t).unwrap() - 1e-12 || b >= 0.0);
                prev = b;
            }
        }
    }

    #[test]
    fn brute_force_matches_small_n() {
        for n in 1..=4 {
            let bf = brute_force_lhs(n, 2_000).unwrap();
            let ex = lhs_vertices(n).unwrap();
            for k in 0..=n as usize {
                assert_abs_diff_eq!(bf.w(k), ex.w(k), epsilon = 1e-12);
            }
        }
        assert!(brute_force_lhs(13, 10).is_err());
    }

    #[test]
    fn parity_of_optimal_direction() {
        let (zeta, _) = brute_force_argmax(5, 3, 10_000).unwrap();
        assert_abs_diff_eq!(zeta, 0.0, epsilon = 1e-12);
        let (zeta, _) = brute_force_argmax(4, 2, 10_000).unwrap();
        assert_abs_diff_eq!(zeta, PI / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn srq_continuous_examples() {
        let inf = SettingCount::Continuous;
        let st = srq_saturating_stats(SrqModelParams::new(0.0, FRAC_PI_2, inf).unwrap()).unwrap();
        assert_abs_diff_eq!(st.s(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(st.tn(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(st.wn(), 2.0 * SQRT_2 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(st.wn(), nonlinear_bound(1.0, 2.0, inf).unwrap(), epsilon = 1e-15);

        let st = srq_saturating_stats(SrqModelParams::new(FRAC_PI_4, FRAC_PI_2, inf).unwrap()).unwrap();
        assert_abs_diff_eq!(st.s(), 2.0 * SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(st.wn(), 2.0 / PI, epsilon = 1e-15);

        let st = srq_saturating_stats(SrqModelParams::new(0.3, 0.0, inf).unwrap()).unwrap();
        assert_eq!((st.tn(), st.wn()), (0.0, 0.0));
    }

    #[test]
    fn srq_finite_empty_window() {
        let st = srq_saturating_stats(SrqModelParams::new(0.3, 0.0, SettingCount::Finite(6)).unwrap()).unwrap();
        assert_abs_diff_eq!(st.s(), 2.0 * (cos(0.3) + sin(0.3)), epsilon = 1e-12);
        // Only θ = π/4 could fall in a zero-width window, and it is not on this grid.
        assert_eq!(st.tn(), 0.0);
    }

    #[test]
    fn srq_finite_matches_vertices_when_pi_over_4_on_grid() {
        // n = 8 puts π/4 on the grid; a window holding k settings hits vertex k.
        let n = 8;
        let poly = lhs_vertices(n).unwrap();
        for k in [1usize, 3, 5, 7] {
            let omega = (k as f64 - 1.0) / 2.0 * PI / n as f64;
            let st =
                srq_saturating_stats(SrqModelParams::new(FRAC_PI_4, omega, SettingCount::Finite(n)).unwrap()).unwrap();
            assert_abs_diff_eq!(st.tn(), k as f64 / n as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(st.wn(), poly.w(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn srq_table_is_no_signalling() {
        let t = srq_saturating_table(0.2, 1.0, 7).unwrap();
        for x in 0..2 {
            let pa: [f64; 2] = core::array::from_fn(|a| t.sp(x, 0, a, 0) + t.sp(x, 0, a, 1));
            for y in 0..7 {
                for a in 0..2 {
                    let m: f64 = (0..3).map(|b| t.lp(x, y, a, b)).sum();
                    assert_abs_diff_eq!(m, pa[a], epsilon = 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn srq_never_certified(alpha in 0.0f64..=FRAC_PI_4, omega in 0.0f64..=FRAC_PI_2, n in 1u32..40) {
            for count in [SettingCount::Finite(n), SettingCount::Continuous] {
                let st = srq_saturating_stats(SrqModelParams::new(alpha, omega, count).unwrap()).unwrap();
                let v = certify(&st).unwrap();
                prop_assert!(!v.certified);
                prop_assert!(v.margin <= 1e-9);
            }
        }

        #[test]
        fn vertices_satisfy_smooth_bound(n in 1u32..200, frac in 0.0f64..=1.0) {
            let p = lhs_vertices(n).unwrap();
            let k = libm::round(frac * n as f64) as usize;
            let smooth = sin(PI * k as f64 / (2.0 * n as f64)) * lambda_n(n).unwrap();
            prop_assert!((p.w(k) - smooth).abs() <= 1e-15);
            // Interior points of the polytope lie below the smooth curve.
            let t = (k as f64 + 0.5).min(n as f64) / n as f64;
            prop_assert!(p.boundary_at(t).unwrap() <= sin(FRAC_PI_2 * t) * lambda_n(n).unwrap() + 1e-15);
        }
    }
}
