//! Qubit strategies for the routed scenario and the statistics they produce.
//!
//! Alice and the short-path device `B^S` have two binary measurements each.
//! The long-path device `B^L` has `n` settings measuring along
//! `cos θ_y Z + sin θ_y X` with `θ_y = yπ/n`, and reports a no-click outcome
//! when the photon is lost. No-clicks at Alice and `B^S` are binned into a
//! fixed outcome; `B^L` keeps them as a third outcome.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use libm::{cos, sin};

use crate::error::{check_unit, Error, Result};
use crate::qmath::{bloch_observable, born_expectation, kron, CMatrix, DensityMatrix, Outcome, Povm, C64};
use crate::tol;

/// Number of long-path settings; `Continuous` is the `n → ∞` limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SettingCount {
    Finite(u32),
    Continuous,
}

impl SettingCount {
    pub fn finite(n: u32) -> Result<Self> {
        if n == 0 {
            Err(Error::InvalidSetting { name: "setting count", value: 0 })
        } else {
            Ok(SettingCount::Finite(n))
        }
    }

    /// `1 / (n sin(π/2n))`, or `2/π` in the continuous limit.
    pub fn lambda(self) -> f64 {
        match self {
            SettingCount::Finite(n) => crate::bounds::lambda_n(n).unwrap_or(f64::NAN),
            SettingCount::Continuous => 2.0 / PI,
        }
    }
}

/// Outcome that a no-click is binned into, for Alice and `B^S`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Binning {
    pub alice: u8,
    pub short: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitStrategy {
    state: DensityMatrix,
    alice_obs: [CMatrix; 2],
    bs_obs: [CMatrix; 2],
    bl_angles: Vec<f64>,
    eta: f64,
    alice_eff: f64,
    short_eff: f64,
    binning: Binning,
}

fn check_observable(obs: &CMatrix) -> Result<()> {
    if obs.dim() != 2 {
        return Err(Error::Dimension { expected: 2, found: obs.dim() });
    }
    Povm::from_observable(obs).map(|_| ())
}

impl QubitStrategy {
    /// Strategy with lossless local devices and long-path efficiency `eta`.
    pub fn new(
        state: DensityMatrix,
        alice_obs: [CMatrix; 2],
        bs_obs: [CMatrix; 2],
        bl_angles: Vec<f64>,
        eta: f64,
    ) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::Dimension { expected: 4, found: state.dim() });
        }
        if bl_angles.is_empty() {
            return Err(Error::InvalidSetting { name: "setting count", value: 0 });
        }
        if bl_angles.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("long-path angles must be finite"));
        }
        for obs in alice_obs.iter().chain(&bs_obs) {
            check_observable(obs)?;
        }
        check_unit("eta", eta)?;
        Ok(QubitStrategy {
            state,
            alice_obs,
            bs_obs,
            bl_angles,
            eta,
            alice_eff: 1.0,
            short_eff: 1.0,
            binning: Binning::default(),
        })
    }

    /// Detection efficiencies of Alice's device and of the whole short path.
    pub fn with_local_efficiencies(mut self, alice: f64, short: f64) -> Result<Self> {
        self.alice_eff = check_unit("alice efficiency", alice)?;
        self.short_eff = check_unit("short-path efficiency", short)?;
        Ok(self)
    }

    pub fn with_binning(mut self, binning: Binning) -> Result<Self> {
        if binning.alice > 1 || binning.short > 1 {
            return Err(Error::InvalidSetting { name: "binning outcome", value: 2 });
        }
        self.binning = binning;
        Ok(self)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn alice_obs(&self) -> &[CMatrix; 2] {
        &self.alice_obs
    }

    pub fn bs_obs(&self) -> &[CMatrix; 2] {
        &self.bs_obs
    }

    pub fn bl_angles(&self) -> &[f64] {
        &self.bl_angles
    }

    pub fn n(&self) -> usize {
        self.bl_angles.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn local_efficiencies(&self) -> (f64, f64) {
        (self.alice_eff, self.short_eff)
    }

    pub fn binning(&self) -> Binning {
        self.binning
    }
}

/// Long-path angles `θ_y = yπ/n`.
pub fn long_path_angles(n: u32) -> Vec<f64> {
    (0..n).map(|y| y as f64 * PI / n as f64).collect()
}

/// `Φ⁺`, Alice `{Z, X}`, `B^S` `{(Z+X)/√2, (Z−X)/√2}`, `B^L` along `yπ/n`, no loss.
pub fn ideal_strategy(n: u32) -> Result<QubitStrategy> {
    SettingCount::finite(n)?;
    QubitStrategy::new(
        DensityMatrix::phi_plus(),
        [CMatrix::pauli_z(), CMatrix::pauli_x()],
        [CMatrix::h_axis(), CMatrix::m_axis()],
        long_path_angles(n),
        1.0,
    )
}

/// Imperfections of a physical implementation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// Efficiency of every local detector.
    pub eta_d: f64,
    /// Visibility of the source (weight of `Φ⁺` against white noise).
    pub nu: f64,
    /// Short-path transmission.
    pub eta_sp: f64,
    /// Long-path transmission.
    pub eta_lp: f64,
}

impl NoiseModel {
    pub fn new(eta_d: f64, nu: f64, eta_sp: f64, eta_lp: f64) -> Result<Self> {
        Ok(NoiseModel {
            eta_d: check_unit("eta_d", eta_d)?,
            nu: check_unit("nu", nu)?,
            eta_sp: check_unit("eta_sp", eta_sp)?,
            eta_lp: check_unit("eta_lp", eta_lp)?,
        })
    }

    pub fn noiseless() -> Self {
        NoiseModel { eta_d: 1.0, nu: 1.0, eta_sp: 1.0, eta_lp: 1.0 }
    }

    /// Local imperfections all equal to `1 − zeta`.
    pub fn uniform(zeta: f64, eta_lp: f64) -> Result<Self> {
        let q = 1.0 - zeta;
        Self::new(q, q, q, eta_lp)
    }

    /// Total long-path click probability, `η_LP η_d`.
    pub fn eta(&self) -> f64 {
        self.eta_lp * self.eta_d
    }

    /// `1 − η_d ν`.
    pub fn delta(&self) -> f64 {
        1.0 - self.eta_d * self.nu
    }

    /// `1 − η_d² η_SP ν − (1−η_d)²(1−η_SP)/√2`.
    ///
    /// Drops part of the both-no-click contribution; compare
    /// [`NoiseModel::epsilon_binned`], which is what [`apply_noise`] produces.
    pub fn epsilon_closed_form(&self) -> f64 {
        let miss = 1.0 - self.eta_d;
        1.0 - self.eta_d * self.eta_d * self.eta_sp * self.nu - miss * miss * (1.0 - self.eta_sp) * FRAC_1_SQRT_2
    }

    /// CHSH deficit of the binned model: both no-clicks map to outcome 0, so
    /// the event "Alice misses and `B^S` does not click" adds a constant
    /// `+1` to every correlator.
    pub fn epsilon_binned(&self) -> f64 {
        let short_click = self.eta_d * self.eta_sp;
        1.0 - self.eta_d * short_click * self.nu - (1.0 - self.eta_d) * (1.0 - short_click) * FRAC_1_SQRT_2
    }
}

/// Applies source white noise and detector/transmission losses to a strategy.
pub fn apply_noise(base: &QubitStrategy, nm: &NoiseModel) -> Result<QubitStrategy> {
    let white = DensityMatrix::maximally_mixed(4)?;
    let state = base.state.mix(&white, nm.nu)?;
    let mut out = base.clone();
    out.state = state;
    out.eta = base.eta * nm.eta();
    out.alice_eff = base.alice_eff * nm.eta_d;
    out.short_eff = base.short_eff * nm.eta_d * nm.eta_sp;
    Ok(out)
}

/// Index of the no-click outcome in long-path rows.
pub const NO_CLICK: usize = 2;

/// Short-path block `[x][y][a][b]`.
pub type ShortTable = [[[[f64; 2]; 2]; 2]; 2];
/// One long-path setting `[x][a][b]`, `b = 2` is no-click.
pub type LongRow = [[[f64; 3]; 2]; 2];

/// Joint distributions `p(a,b|x,y,r)` for both paths.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    sp: ShortTable,
    lp: Vec<LongRow>,
}

impl CorrelationTable {
    pub fn new(sp: ShortTable, lp: Vec<LongRow>) -> Result<Self> {
        if lp.is_empty() {
            return Err(Error::MissingSettings { expected: 1, found: 0 });
        }
        let ok_prob = |p: f64| p.is_finite() && (-tol::STRUCTURAL..=1.0 + tol::STRUCTURAL).contains(&p);
        for x in 0..2 {
            for y in 0..2 {
                let cell = &sp[x][y];
                let total: f64 = cell.iter().flatten().sum();
                if cell.iter().flatten().any(|p| !ok_prob(*p)) || (total - 1.0).abs() > tol::STRUCTURAL {
                    return Err(Error::InconsistentStats("short-path distribution not normalized"));
                }
            }
        }
        for row in &lp {
            for cell in row {
                let total: f64 = cell.iter().flatten().sum();
                if cell.iter().flatten().any(|p| !ok_prob(*p)) || (total - 1.0).abs() > tol::STRUCTURAL {
                    return Err(Error::InconsistentStats("long-path distribution not normalized"));
                }
            }
        }
        Ok(CorrelationTable { sp, lp })
    }

    pub fn n(&self) -> usize {
        self.lp.len()
    }

    pub fn sp(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.sp[x][y][a][b]
    }

    pub fn lp(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.lp[y][x][a][b]
    }

    pub fn short_table(&self) -> &ShortTable {
        &self.sp
    }

    pub fn long_rows(&self) -> &[LongRow] {
        &self.lp
    }

    /// `⟨A_x B^S_y⟩`.
    pub fn sp_correlator(&self, x: usize, y: usize) -> f64 {
        let c = &self.sp[x][y];
        c[0][0] - c[0][1] - c[1][0] + c[1][1]
    }

    /// `⟨A_x B^L_y⟩` summed over clicked outcomes only.
    pub fn lp_correlator(&self, x: usize, y: usize) -> f64 {
        let c = &self.lp[y][x];
        c[0][0] - c[0][1] - c[1][0] + c[1][1]
    }

    /// Click probability of `B^L` at setting `y`, averaged over Alice's input.
    pub fn click_prob(&self, y: usize) -> f64 {
        let row = &self.lp[y];
        0.5 * row.iter().map(|c| c[0][0] + c[0][1] + c[1][0] + c[1][1]).sum::<f64>()
    }
}

impl CorrelationTable {
    /// Largest `|Σ p − 1|` over all conditional distributions.
    pub fn normalization_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                gap = gap.max((self.sp[x][y].iter().flatten().sum::<f64>() - 1.0).abs());
            }
            for row in &self.lp {
                gap = gap.max((row[x].iter().flatten().sum::<f64>() - 1.0).abs());
            }
        }
        gap
    }

    /// Most negative entry, or zero.
    pub fn negativity(&self) -> f64 {
        let short = self.sp.iter().flatten().flatten().flatten();
        let long = self.lp.iter().flatten().flatten().flatten();
        short.chain(long).fold(0.0f64, |m, p| m.max(-p))
    }

    /// Largest change of one party's marginal under the other party's
    /// setting or path choice.
    pub fn signalling_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        // Alice's marginal p(a|x) across every Bob setting and both paths.
        for x in 0..2 {
            let mut marginals = Vec::new();
            for y in 0..2 {
                let c = &self.sp[x][y];
                marginals.push([c[0][0] + c[0][1], c[1][0] + c[1][1]]);
            }
            for row in &self.lp {
                let c = &row[x];
                marginals.push([c[0].iter().sum(), c[1].iter().sum()]);
            }
            for m in &marginals[1..] {
                gap = gap.max((m[0] - marginals[0][0]).abs()).max((m[1] - marginals[0][1]).abs());
            }
        }
        // Bob's marginals across Alice's setting.
        for y in 0..2 {
            for b in 0..2 {
                let p = |x: usize| self.sp[x][y][0][b] + self.sp[x][y][1][b];
                gap = gap.max((p(0) - p(1)).abs());
            }
        }
        for row in &self.lp {
            for b in 0..3 {
                let p = |x: usize| row[x][0][b] + row[x][1][b];
                gap = gap.max((p(0) - p(1)).abs());
            }
        }
        gap
    }
}

/// A reproducible random strategy: random pure state mixed with white
/// noise, observables with random Bloch vectors of norm at most one, random
/// long-path angles, efficiencies and binning.
pub fn random_strategy(seed: u64) -> Result<QubitStrategy> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..4).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
    let amps: Vec<C64> = amps.iter().map(|a| a / norm).collect();
    let state = DensityMatrix::pure(&amps)?.mix(&DensityMatrix::maximally_mixed(4)?, rng.random())?;
    let mut obs = || {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi = 2.0 * PI * rng.random::<f64>();
        let len: f64 = rng.random();
        let rho = libm::sqrt(1.0 - z * z);
        crate::qmath::bloch_observable_3d([len * rho * cos(phi), len * rho * sin(phi), len * z])
    };
    let alice_obs = [obs(), obs()];
    let bs_obs = [obs(), obs()];
    let n = rng.random_range(1..=8);
    let bl_angles: Vec<f64> = (0..n).map(|_| PI * rng.random::<f64>()).collect();
    let binning = Binning { alice: rng.random_range(0..2), short: rng.random_range(0..2) };
    QubitStrategy::new(state, alice_obs, bs_obs, bl_angles, rng.random())?
        .with_local_efficiencies(rng.random(), rng.random())?
        .with_binning(binning)
}

/// Born-rule correlation table of a strategy.
pub fn correlations(s: &QubitStrategy) -> Result<CorrelationTable> {
    let rho = &s.state;
    let alice: Vec<Povm> = s
        .alice_obs
        .iter()
        .map(|a| Povm::from_observable(a)?.lossy(s.alice_eff)?.binned(Outcome::Value(s.binning.alice)))
        .collect::<Result<_>>()?;
    let short: Vec<Povm> = s
        .bs_obs
        .iter()
        .map(|b| Povm::from_observable(b)?.lossy(s.short_eff)?.binned(Outcome::Value(s.binning.short)))
        .collect::<Result<_>>()?;

    let joint = |ea: &CMatrix, eb: &CMatrix| -> Result<f64> { born_expectation(rho, &kron(ea, eb)?) };

    let mut sp = [[[[0.0; 2]; 2]; 2]; 2];
    for (x, ax) in alice.iter().enumerate() {
        for (y, by) in short.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    sp[x][y][a][b] = joint(&ax.elements()[a], &by.elements()[b])?;
                }
            }
        }
    }

    let mut lp = Vec::with_capacity(s.bl_angles.len());
    for &theta in &s.bl_angles {
        let long = Povm::from_observable(&bloch_observable(theta))?.lossy(s.eta)?;
        let mut row = [[[0.0; 3]; 2]; 2];
        for (x, ax) in alice.iter().enumerate() {
            for a in 0..2 {
                for (b, eb) in long.elements().iter().enumerate() {
                    row[x][a][b] = joint(&ax.elements()[a], eb)?;
                }
            }
        }
        lp.push(row);
    }
    CorrelationTable::new(sp, lp)
}

/// The certification input: short-path CHSH value `S`, long-path witness
/// `W_n` and long-path click rate `T_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoutedStats {
    s: f64,
    wn: f64,
    tn: f64,
    n: SettingCount,
}

impl RoutedStats {
    /// Checks `0 ≤ T_n ≤ 1`, `|S| ≤ 4` and `|W_n| ≤ √2·T_n`. The last bound is
    /// algebraic: each term of `W_n` is at most `(|cos θ|+|sin θ|)` times the
    /// click probability of its setting.
    pub fn new(s: f64, wn: f64, tn: f64, n: SettingCount) -> Result<Self> {
        if !(s.is_finite() && wn.is_finite() && tn.is_finite()) {
            return Err(Error::InconsistentStats("non-finite value"));
        }
        if let SettingCount::Finite(0) = n {
            return Err(Error::InvalidSetting { name: "setting count", value: 0 });
        }
        if !(-tol::STRUCTURAL..=1.0 + tol::STRUCTURAL).contains(&tn) {
            return Err(Error::InconsistentStats("T_n outside [0, 1]"));
        }
        if s.abs() > 4.0 + tol::STRUCTURAL {
            return Err(Error::InconsistentStats("|S| exceeds the algebraic maximum 4"));
        }
        if wn.abs() > SQRT_2 * tn.max(0.0) + tol::STRUCTURAL {
            return Err(Error::InconsistentStats("|W_n| exceeds √2·T_n"));
        }
        Ok(RoutedStats { s, wn, tn: tn.clamp(0.0, 1.0), n })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn wn(&self) -> f64 {
        self.wn
    }

    pub fn tn(&self) -> f64 {
        self.tn
    }

    pub fn n(&self) -> SettingCount {
        self.n
    }

    pub fn exceeds_tsirelson(&self) -> bool {
        self.s.abs() > 2.0 * SQRT_2 + tol::STRUCTURAL
    }
}

/// `S`, `W_n` and `T_n` of a correlation table with `n` long-path settings.
pub fn routed_stats(t: &CorrelationTable, n: u32) -> Result<RoutedStats> {
    SettingCount::finite(n)?;
    if t.n() != n as usize {
        return Err(Error::MissingSettings { expected: n as usize, found: t.n() });
    }
    let s = t.sp_correlator(0, 0) + t.sp_correlator(0, 1) + t.sp_correlator(1, 0) - t.sp_correlator(1, 1);
    let nf = n as f64;
    let mut wn = 0.0;
    let mut tn = 0.0;
    for y in 0..t.n() {
        let theta = y as f64 * PI / nf;
        wn += cos(theta) * t.lp_correlator(0, y) + sin(theta) * t.lp_correlator(1, y);
        tn += t.click_prob(y);
    }
    RoutedStats::new(s, wn / nf, tn / nf, SettingCount::Finite(n))
}

/// Chained Bell value of `Φ⁺` with Alice at angles `xπ/n` and Bob at
/// `(2y+1)π/2n`, summed term by term from the Born rule.
pub fn chained_ideal_score(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSetting { name: "chained setting count", value: n as usize });
    }
    let rho = DensityMatrix::phi_plus();
    let nf = n as f64;
    let alice: Vec<CMatrix> = (0..n).map(|x| bloch_observable(x as f64 * PI / nf)).collect();
    let bob: Vec<CMatrix> = (0..n).map(|y| bloch_observable((2 * y + 1) as f64 * PI / (2.0 * nf))).collect();
    let corr = |x: usize, y: usize| -> Result<f64> { born_expectation(&rho, &kron(&alice[x], &bob[y])?) };
    let last = n as usize - 1;
    let mut total = 0.0;
    for k in 0..=last {
        total += corr(k, k)?;
        if k < last {
            total += corr(k + 1, k)?;
        }
    }
    total -= corr(0, last)?;
    Ok(total)
}

/// Bob's qubit after Alice obtains `a` for setting `x` on `Φ⁺`:
/// `½(I + (−1)^a (cos(xπ/n) Z + sin(xπ/n) X))`.
pub fn conditional_state(x: u32, a: u8, n: u32) -> Result<DensityMatrix> {
    SettingCount::finite(n)?;
    if x >= n {
        return Err(Error::InvalidSetting { name: "setting", value: x as usize });
    }
    if a > 1 {
        return Err(Error::InvalidSetting { name: "outcome", value: a as usize });
    }
    let sign = if a == 0 { 1.0 } else { -1.0 };
    let obs = bloch_observable(x as f64 * PI / n as f64) * sign;
    DensityMatrix::new((CMatrix::eye2() + obs) * 0.5)
}
