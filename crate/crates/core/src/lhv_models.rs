//! Local hidden variable models for lossy maximally entangled qubits.
//!
//! Four constructions are provided. Each reproduces the quantum correlations
//! exactly once Bob's detector efficiency drops to the model's critical value:
//!
//! | model           | state   | Bob measures          | critical η |
//! |-----------------|---------|-----------------------|------------|
//! | `GisinGisin`    | singlet | any projective        | 1/2        |
//! | `PovmExtension` | singlet | any extremal POVM     | 1/4        |
//! | `Planar`        | `Φ⁺`    | projective, XZ plane  | 2/π        |
//! | `PlanarPovm`    | `Φ⁺`    | extremal POVM, XZ     | 1/π        |
//!
//! Alice's outcome is `a = sign(x·λ)`. Bob clicks with probability `|y·λ'|`
//! and outputs `sign(y·λ')`, where `λ' = −λ` for the singlet and `λ' = λ` for
//! `Φ⁺`. The POVM variants first pick an element `b'` with probability
//! `α_{b'}/2` and report `b'` only if the projective model answers `+1`.
//!
//! Outcome index `0` stands for `+1` and `1` for `−1`. Bob's last index is
//! the no-click outcome.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::{cos, fabs, sin, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_unit, Error, Result};
use crate::qmath::{bloch_projector, CMatrix, Outcome, Povm};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LhvModelKind {
    GisinGisin,
    PovmExtension,
    Planar,
    PlanarPovm,
}

impl LhvModelKind {
    pub const ALL: [LhvModelKind; 4] =
        [LhvModelKind::GisinGisin, LhvModelKind::PovmExtension, LhvModelKind::Planar, LhvModelKind::PlanarPovm];

    pub fn critical_eta(self) -> f64 {
        match self {
            LhvModelKind::GisinGisin => 0.5,
            LhvModelKind::PovmExtension => 0.25,
            LhvModelKind::Planar => 2.0 / PI,
            LhvModelKind::PlanarPovm => 1.0 / PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LhvModelKind::GisinGisin => "gisin-gisin",
            LhvModelKind::PovmExtension => "povm-extension",
            LhvModelKind::Planar => "planar",
            LhvModelKind::PlanarPovm => "planar-povm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_planar(self) -> bool {
        matches!(self, LhvModelKind::Planar | LhvModelKind::PlanarPovm)
    }

    pub fn uses_povm(self) -> bool {
        matches!(self, LhvModelKind::PovmExtension | LhvModelKind::PlanarPovm)
    }

    /// `+1` for `Φ⁺` (Bob reads `λ`), `−1` for the singlet (Bob reads `−λ`).
    fn bob_sign(self) -> f64 {
        if self.is_planar() {
            1.0
        } else {
            -1.0
        }
    }
}

/// A model together with extra i.i.d. click loss on Bob's side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LhvModel {
    kind: LhvModelKind,
    keep: f64,
}

impl LhvModel {
    pub fn new(kind: LhvModelKind) -> Self {
        LhvModel { kind, keep: 1.0 }
    }

    /// Discards each click independently with probability `1 − keep`,
    /// simulating any efficiency below the critical one.
    pub fn with_keep(mut self, keep: f64) -> Result<Self> {
        self.keep = check_unit("keep", keep)?;
        Ok(self)
    }

    pub fn kind(&self) -> LhvModelKind {
        self.kind
    }

    pub fn keep(&self) -> f64 {
        self.keep
    }

    /// Bob's overall click probability.
    pub fn eta(&self) -> f64 {
        self.kind.critical_eta() * self.keep
    }
}

/// Bloch vector `(sin φ, 0, cos φ)` of the observable `cos φ Z + sin φ X`.
pub fn planar(angle: f64) -> [f64; 3] {
    [sin(angle), 0.0, cos(angle)]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit_vector(v: &[f64; 3]) -> Result<()> {
    let n = sqrt(dot(v, v));
    if !n.is_finite() || fabs(n - 1.0) > tol::UNIT_NORM {
        return Err(Error::OutOfRange { name: "unit vector norm", value: n });
    }
    Ok(())
}

/// Extremal qubit POVM `E_b = (α_b/2)(I + y_b·σ)` with `Σ α_b = 2` and
/// `Σ α_b y_b = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalPovm {
    alphas: Vec<f64>,
    dirs: Vec<[f64; 3]>,
}

impl ExtremalPovm {
    pub fn new(alphas: Vec<f64>, dirs: Vec<[f64; 3]>) -> Result<Self> {
        if alphas.len() != dirs.len() || !(2..=4).contains(&alphas.len()) {
            return Err(Error::InvalidOperator("extremal POVM needs 2 to 4 weighted directions"));
        }
        if alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidOperator("POVM weights must be positive"));
        }
        for d in &dirs {
            check_unit_vector(d)?;
        }
        let total: f64 = alphas.iter().sum();
        if fabs(total - 2.0) > tol::STRUCTURAL {
            return Err(Error::InvalidOperator("POVM weights must sum to 2"));
        }
        let mut centroid = [0.0; 3];
        for (a, d) in alphas.iter().zip(&dirs) {
            for i in 0..3 {
                centroid[i] += a * d[i];
            }
        }
        if centroid.iter().any(|c| fabs(*c) > tol::STRUCTURAL) {
            return Err(Error::InvalidOperator("weighted POVM directions must sum to zero"));
        }
        Ok(ExtremalPovm { alphas, dirs })
    }

    /// Projective measurement along `y`.
    pub fn projective(y: [f64; 3]) -> Result<Self> {
        Self::new(alloc::vec![1.0, 1.0], alloc::vec![y, [-y[0], -y[1], -y[2]]])
    }

    /// Three directions 120° apart in the XZ plane, starting at `offset`.
    pub fn planar_trine(offset: f64) -> Result<Self> {
        let dirs = (0..3).map(|k| planar(offset + TAU * k as f64 / 3.0)).collect();
        Self::new(alloc::vec![2.0 / 3.0; 3], dirs)
    }

    /// Three directions 120° apart in the plane spanned by orthonormal `u, v`.
    pub fn trine(u: [f64; 3], v: [f64; 3]) -> Result<Self> {
        let dirs = (0..3)
            .map(|k| {
                let t = TAU * k as f64 / 3.0;
                core::array::from_fn(|i| cos(t) * u[i] + sin(t) * v[i])
            })
            .collect();
        Self::new(alloc::vec![2.0 / 3.0; 3], dirs)
    }

    pub fn tetrahedral() -> Result<Self> {
        let s = 1.0 / sqrt(3.0);
        Self::new(alloc::vec![0.5; 4], alloc::vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]])
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn dirs(&self) -> &[[f64; 3]] {
        &self.dirs
    }

    fn is_planar(&self) -> bool {
        self.dirs.iter().all(|d| fabs(d[1]) <= tol::UNIT_NORM)
    }

    /// The POVM behind a detector of efficiency `eta`; no-click is last.
    pub fn lossy_operators(&self, eta: f64) -> Result<Povm> {
        let eta = check_unit("eta", eta)?;
        let mut elements: Vec<CMatrix> =
            self.alphas.iter().zip(&self.dirs).map(|(a, d)| bloch_projector(*d) * (a * eta)).collect();
        elements.push(CMatrix::eye2() * (1.0 - eta));
        let mut labels: Vec<Outcome> = (0..self.len()).map(|b| Outcome::Value(b as u8)).collect();
        labels.push(Outcome::NoClick);
        Povm::new(elements, labels)
    }
}

/// A lossy POVM written as a mixture of lossy projective measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmMixture {
    /// `p_{b'} = α_{b'}/2`.
    pub weights: Vec<f64>,
    /// Two-outcome projective measurement along `y_{b'}`.
    pub components: Vec<Povm>,
    /// Efficiency at which each component is simulated.
    pub base_efficiency: f64,
}

impl PovmMixture {
    /// Keeps outcome `+1` of component `b'` as POVM outcome `b'` and sends
    /// every other event to no-click. The result equals
    /// `ExtremalPovm::lossy_operators(base_efficiency / 2)`.
    pub fn reconstruct(&self) -> Result<Povm> {
        let m = self.components.len();
        let mut elements = Vec::with_capacity(m + 1);
        let mut clicked = CMatrix::zeros(2)?;
        for (p, c) in self.weights.iter().zip(&self.components) {
            let e = c.elements()[0] * (p * self.base_efficiency);
            clicked = clicked + e;
            elements.push(e);
        }
        elements.push(CMatrix::eye2() - clicked);
        let mut labels: Vec<Outcome> = (0..m).map(|b| Outcome::Value(b as u8)).collect();
        labels.push(Outcome::NoClick);
        Povm::new(elements, labels)
    }
}

/// Decomposes the extremal POVM `(α_b, y_b)` into projective measurements
/// chosen with probability `α_b/2`, each run at efficiency `base_efficiency`.
pub fn povm_mixture(alphas: &[f64], dirs: &[[f64; 3]], base_efficiency: f64) -> Result<PovmMixture> {
    let povm = ExtremalPovm::new(alphas.to_vec(), dirs.to_vec())?;
    let base_efficiency = check_unit("efficiency", base_efficiency)?;
    let components = povm
        .dirs
        .iter()
        .map(|d| Povm::from_observable(&crate::qmath::bloch_observable_3d(*d)))
        .collect::<Result<_>>()?;
    Ok(PovmMixture { weights: povm.alphas.iter().map(|a| a / 2.0).collect(), components, base_efficiency })
}

/// Bob's measurement for one setting pair.
#[derive(Clone, Debug, PartialEq)]
pub enum BobSetting {
    Direction([f64; 3]),
    Povm(ExtremalPovm),
}

/// One `(Alice, Bob)` setting pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LhvSetting {
    pub alice: [f64; 3],
    pub bob: BobSetting,
}

impl LhvSetting {
    pub fn directions(alice: [f64; 3], bob: [f64; 3]) -> Self {
        LhvSetting { alice, bob: BobSetting::Direction(bob) }
    }

    /// Alice at angle `phi`, Bob at angle `theta`, both in the XZ plane.
    pub fn angles(phi: f64, theta: f64) -> Self {
        Self::directions(planar(phi), planar(theta))
    }

    pub fn povm(alice: [f64; 3], povm: ExtremalPovm) -> Self {
        LhvSetting { alice, bob: BobSetting::Povm(povm) }
    }

    /// Number of Bob outcomes excluding no-click.
    pub fn bob_outcomes(&self) -> usize {
        match &self.bob {
            BobSetting::Direction(_) => 2,
            BobSetting::Povm(p) => p.len(),
        }
    }

    fn validate(&self, kind: LhvModelKind) -> Result<()> {
        check_unit_vector(&self.alice)?;
        let in_plane = |v: &[f64; 3]| fabs(v[1]) <= tol::UNIT_NORM;
        match (&self.bob, kind.uses_povm()) {
            (BobSetting::Direction(y), false) => {
                check_unit_vector(y)?;
                if kind.is_planar() && !(in_plane(&self.alice) && in_plane(y)) {
                    return Err(Error::Domain("planar model needs settings in the XZ plane"));
                }
            }
            (BobSetting::Povm(p), true) => {
                if kind.is_planar() && !(in_plane(&self.alice) && p.is_planar()) {
                    return Err(Error::Domain("planar model needs settings in the XZ plane"));
                }
            }
            _ => return Err(Error::Domain("setting type does not match the model")),
        }
        Ok(())
    }
}

/// Exact target distribution `p(a, b)` as a row-major `2 × (m+1)` table,
/// where column `m` is no-click.
pub fn lhv_analytic_target(model: &LhvModel, setting: &LhvSetting) -> Result<Vec<f64>> {
    setting.validate(model.kind)?;
    let eta = model.eta();
    let sign = model.kind.bob_sign();
    let m = setting.bob_outcomes();
    let mut out = alloc::vec![0.0; 2 * (m + 1)];
    for (ai, a) in [1.0, -1.0].into_iter().enumerate() {
        let row = &mut out[ai * (m + 1)..(ai + 1) * (m + 1)];
        match &setting.bob {
            BobSetting::Direction(y) => {
                let c = dot(&setting.alice, y);
                for (bi, b) in [1.0, -1.0].into_iter().enumerate() {
                    row[bi] = eta / 4.0 * (1.0 + sign * a * b * c);
                }
            }
            BobSetting::Povm(p) => {
                for (bi, (alpha, y)) in p.alphas.iter().zip(&p.dirs).enumerate() {
                    row[bi] = eta * alpha / 4.0 * (1.0 + sign * a * dot(&setting.alice, y));
                }
            }
        }
        row[m] = (1.0 - eta) / 2.0;
    }
    Ok(out)
}

/// Outcome counts for one setting, laid out like [`lhv_analytic_target`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub bob_outcomes: usize,
    pub counts: Vec<u64>,
}

impl Tally {
    pub fn new(bob_outcomes: usize) -> Self {
        Tally { bob_outcomes, counts: alloc::vec![0; 2 * (bob_outcomes + 1)] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.counts[a * (self.bob_outcomes + 1) + b]
    }

    /// Adds `other` cell by cell.
    pub fn merge(&mut self, other: &Tally) -> Result<()> {
        if other.bob_outcomes != self.bob_outcomes {
            return Err(Error::Dimension { expected: self.bob_outcomes, found: other.bob_outcomes });
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total().max(1) as f64;
        self.counts.iter().map(|c| *c as f64 / n).collect()
    }

    /// Fraction of rounds in which Bob clicked.
    pub fn click_rate(&self) -> f64 {
        let m = self.bob_outcomes;
        let none = self.get(0, m) + self.get(1, m);
        1.0 - none as f64 / self.total().max(1) as f64
    }
}

/// Merges per-setting tallies from two disjoint sample ranges.
pub fn merge_tallies(acc: &mut [Tally], other: &[Tally]) -> Result<()> {
    if acc.len() != other.len() {
        return Err(Error::MissingSettings { expected: acc.len(), found: other.len() });
    }
    for (a, o) in acc.iter_mut().zip(other) {
        a.merge(o)?;
    }
    Ok(())
}

/// Number of hidden-variable draws in one RNG stream.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// Validated model and settings, ready to be sampled chunk by chunk.
///
/// Chunk `i` always uses ChaCha8 stream `i` of the seed, so any split of the
/// chunks across workers reproduces the sequential tallies exactly.
#[derive(Clone, Debug)]
pub struct SamplePlan {
    model: LhvModel,
    settings: Vec<LhvSetting>,
}

impl SamplePlan {
    pub fn new(model: LhvModel, settings: Vec<LhvSetting>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::MissingSettings { expected: 1, found: 0 });
        }
        for s in &settings {
            s.validate(model.kind)?;
        }
        Ok(SamplePlan { model, settings })
    }

    pub fn model(&self) -> &LhvModel {
        &self.model
    }

    pub fn settings(&self) -> &[LhvSetting] {
        &self.settings
    }

    pub fn empty_tallies(&self) -> Vec<Tally> {
        self.settings.iter().map(|s| Tally::new(s.bob_outcomes())).collect()
    }

    /// `(chunk index, draws)` pairs covering `count` draws.
    pub fn chunks(count: u64) -> impl Iterator<Item = (u64, u64)> {
        let full = count / CHUNK_SIZE;
        let rest = count % CHUNK_SIZE;
        (0..full).map(|i| (i, CHUNK_SIZE)).chain((rest > 0).then_some((full, rest)))
    }

    fn draw_lambda(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        if self.model.kind.is_planar() {
            planar(TAU * rng.random::<f64>())
        } else {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let phi = TAU * rng.random::<f64>();
            let r = sqrt((1.0 - z * z).max(0.0));
            [r * cos(phi), r * sin(phi), z]
        }
    }

    /// Tallies for draws `chunk·CHUNK_SIZE .. chunk·CHUNK_SIZE + len`.
    pub fn sample_chunk(&self, seed: u64, chunk: u64, len: u64) -> Vec<Tally> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut tallies = self.empty_tallies();
        let sign = self.model.kind.bob_sign();
        let keep = self.model.keep;
        for _ in 0..len {
            let lambda = self.draw_lambda(&mut rng);
            let bob_lambda = [sign * lambda[0], sign * lambda[1], sign * lambda[2]];
            for (s, t) in self.settings.iter().zip(tallies.iter_mut()) {
                let a = usize::from(dot(&s.alice, &lambda) < 0.0);
                let m = t.bob_outcomes;
                let mut b = match &s.bob {
                    BobSetting::Direction(y) => {
                        let d = dot(y, &bob_lambda);
                        if rng.random::<f64>() < fabs(d) {
                            usize::from(d < 0.0)
                        } else {
                            m
                        }
                    }
                    BobSetting::Povm(p) => {
                        let mut u = 2.0 * rng.random::<f64>();
                        let mut pick = p.len() - 1;
                        for (i, alpha) in p.alphas.iter().enumerate() {
                            if u < *alpha {
                                pick = i;
                                break;
                            }
                            u -= alpha;
                        }
                        let d = dot(&p.dirs[pick], &bob_lambda);
                        if rng.random::<f64>() < fabs(d) && d >= 0.0 {
                            pick
                        } else {
                            m
                        }
                    }
                };
                if b != m && keep < 1.0 && rng.random::<f64>() >= keep {
                    b = m;
                }
                t.counts[a * (m + 1) + b] += 1;
            }
        }
        tallies
    }
}

/// Tallies of `count` hidden-variable draws, each applied to every setting.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub count: u64,
    pub settings: Vec<LhvSetting>,
    pub tallies: Vec<Tally>,
}

pub fn lhv_sample(model: &LhvModel, settings: &[LhvSetting], count: u64, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidSetting { name: "sample count", value: 0 });
    }
    let plan = SamplePlan::new(*model, settings.to_vec())?;
    let mut tallies = plan.empty_tallies();
    for (chunk, len) in SamplePlan::chunks(count) {
        merge_tallies(&mut tallies, &plan.sample_chunk(seed, chunk, len))?;
    }
    Ok(SampleBatch { seed, count, settings: settings.to_vec(), tallies })
}

/// How far empirical frequencies may sit from the target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// Binomial standard deviations per cell.
    Sigma(f64),
    /// Absolute deviation per cell.
    Absolute(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Sigma(4.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyStatus {
    Pass,
    Fail,
    /// Too few draws for the comparison to mean anything.
    InsufficientSamples,
}

/// Expected count of the rarest cell below which a comparison is unreliable.
pub const MIN_EXPECTED_COUNT: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyReport {
    pub kind: LhvModelKind,
    pub eta_target: f64,
    /// Largest `|frequency − target|` over all cells.
    pub max_dev: f64,
    /// Binomial standard deviation of that cell.
    pub sigma: f64,
    /// Largest deviation in units of its cell's standard deviation.
    pub max_z: f64,
    pub status: VerifyStatus,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.status == VerifyStatus::Pass
    }
}

/// Compares a sample batch with the analytic targets.
pub fn verify_batch(model: &LhvModel, batch: &SampleBatch, tolerance: Tolerance) -> Result<VerifyReport> {
    let n = batch.count as f64;
    let mut max_dev = 0.0;
    let mut sigma_at_max = 0.0;
    let mut max_z: f64 = 0.0;
    let mut min_expected = f64::INFINITY;
    let mut within = true;
    for (setting, tally) in batch.settings.iter().zip(&batch.tallies) {
        let target = lhv_analytic_target(model, setting)?;
        for (p, f) in target.iter().zip(tally.frequencies()) {
            let dev = fabs(f - p);
            let sigma = sqrt(p * (1.0 - p) / n);
            let z = if sigma > 0.0 {
                dev / sigma
            } else if dev > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if *p > 0.0 {
                min_expected = min_expected.min(p * n);
            }
            if dev > max_dev {
                max_dev = dev;
                sigma_at_max = sigma;
            }
            max_z = max_z.max(z);
            within &= match tolerance {
                Tolerance::Sigma(k) => z <= k,
                Tolerance::Absolute(t) => dev <= t,
            };
        }
    }
    let status = if min_expected < MIN_EXPECTED_COUNT {
        VerifyStatus::InsufficientSamples
    } else if within {
        VerifyStatus::Pass
    } else {
        VerifyStatus::Fail
    };
    Ok(VerifyReport { kind: model.kind, eta_target: model.eta(), max_dev, sigma: sigma_at_max, max_z, status })
}

/// Samples and compares in one go.
pub fn lhv_verify(
    model: &LhvModel,
    settings: &[LhvSetting],
    count: u64,
    seed: u64,
    tolerance: Tolerance,
) -> Result<VerifyReport> {
    verify_batch(model, &lhv_sample(model, settings, count, seed)?, tolerance)
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    let r = sqrt((1.0 - z * z).max(0.0));
    [r * cos(phi), r * sin(phi), z]
}

fn orthonormal_to(u: &[f64; 3], rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let w = random_unit(rng);
        let d = dot(&w, u);
        let v: [f64; 3] = core::array::from_fn(|i| w[i] - d * u[i]);
        let n = sqrt(dot(&v, &v));
        if n > 1e-3 {
            return core::array::from_fn(|i| v[i] / n);
        }
    }
}

/// Reproducible random settings suited to `kind`. POVM models cycle through
/// trines, projective pairs and, off the plane, the tetrahedral POVM.
pub fn random_settings(kind: LhvModelKind, count: usize, seed: u64) -> Result<Vec<LhvSetting>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let setting = match kind {
            LhvModelKind::GisinGisin => LhvSetting::directions(random_unit(&mut rng), random_unit(&mut rng)),
            LhvModelKind::Planar => LhvSetting::angles(TAU * rng.random::<f64>(), TAU * rng.random::<f64>()),
            LhvModelKind::PovmExtension => {
                let x = random_unit(&mut rng);
                let povm = match i % 3 {
                    0 => {
                        let u = random_unit(&mut rng);
                        let v = orthonormal_to(&u, &mut rng);
                        ExtremalPovm::trine(u, v)?
                    }
                    1 => ExtremalPovm::projective(random_unit(&mut rng))?,
                    _ => ExtremalPovm::tetrahedral()?,
                };
                LhvSetting::povm(x, povm)
            }
            LhvModelKind::PlanarPovm => {
                let x = planar(TAU * rng.random::<f64>());
                let povm = if i % 2 == 0 {
                    ExtremalPovm::planar_trine(TAU * rng.random::<f64>())?
                } else {
                    ExtremalPovm::projective(planar(TAU * rng.random::<f64>()))?
                };
                LhvSetting::povm(x, povm)
            }
        };
        out.push(setting);
    }
    Ok(out)
}
