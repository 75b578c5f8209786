//! Command-line interface.
//!
//! Exit codes: `0` success (for `certify`, LRQ certified; for `lhv`, the
//! model passed), `1` negative outcome, `2` bad input. Machine-readable
//! output goes to stdout or `--out`; human summaries go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use routed_bell_core::bounds::certify_with_tol;
use routed_bell_core::lhs_geometry::{brute_force_lhs, lhs_vertices, DEFAULT_ZETA_GRID};
use routed_bell_core::lhv_models::{random_settings, LhvModel, LhvModelKind, Tolerance};
use routed_bell_core::strategies::{apply_noise, correlations, ideal_strategy, routed_stats, NoiseModel};
use routed_bell_core::{RoutedStats, SettingCount};

use crate::format::{
    emit, fixed, read_json, to_csv, to_json, Format, LhvReportJson, PolytopeJson, StatsFile, TableJson, VerdictJson,
};
use crate::sampling::par_lhv_verify;
use crate::tables;

/// Environment variable overriding the relative certification tolerance.
pub const TOL_ENV: &str = "ROUTED_BELL_TOL";

/// Setting count given as an integer or `inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SettingArg(pub SettingCount);

impl FromStr for SettingArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "inf" | "infinity" | "continuous" => Ok(SettingArg(SettingCount::Continuous)),
            _ => {
                let n: u32 = s.parse().map_err(|_| format!("expected a positive integer or `inf`, got `{s}`"))?;
                SettingCount::finite(n).map(SettingArg).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "routed-bell", version, about = "Certify long-range quantum correlations in routed Bell tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether observed statistics certify long-range quantum correlations.
    Certify(CertifyArgs),
    /// Critical long-path efficiency per setting count.
    ScanEta(ScanArgs),
    /// Write a bound or geometry table.
    Emit(EmitArgs),
    /// Monte Carlo check of a local hidden variable model.
    Lhv(LhvArgs),
    /// Statistics of the qubit strategy under a noise model.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CertifyArgs {
    /// Short-path CHSH value.
    #[arg(long = "S")]
    pub s: Option<f64>,
    /// Long-path witness.
    #[arg(long = "W")]
    pub w: Option<f64>,
    /// Long-path click rate.
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Number of long-path settings, or `inf`.
    #[arg(long)]
    pub n: Option<SettingArg>,
    /// JSON file `{"S", "Wn", "Tn", "n"}` instead of inline values.
    #[arg(long, conflicts_with_all = ["s", "w", "t", "n"])]
    pub stats: Option<PathBuf>,
    /// Also write the verdict here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Local detector efficiency.
    #[arg(long = "eta-d")]
    pub eta_d: Option<f64>,
    /// Source visibility.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Short-path transmission.
    #[arg(long = "eta-sp")]
    pub eta_sp: Option<f64>,
}

impl NoiseArgs {
    fn any(&self) -> bool {
        self.eta_d.is_some() || self.nu.is_some() || self.eta_sp.is_some()
    }

    fn model(&self, eta_lp: f64) -> Result<NoiseModel> {
        Ok(NoiseModel::new(self.eta_d.unwrap_or(1.0), self.nu.unwrap_or(1.0), self.eta_sp.unwrap_or(1.0), eta_lp)?)
    }
}

/// How `ε` follows from a noise model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EpsForm {
    /// CHSH deficit of the simulated binned model.
    Binned,
    /// The published closed form.
    ClosedForm,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Comma-separated setting counts.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8,16,32")]
    pub n: Vec<u32>,
    /// CHSH deficit `1 − S/(2√2)`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Long-path correlation deficit.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sets every local imperfection to `zeta`.
    #[arg(long, conflicts_with_all = ["eps", "delta", "eta_d", "nu", "eta_sp"])]
    pub zeta: Option<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long = "eps-form", value_enum, default_value = "binned")]
    pub eps_form: EpsForm,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EmitKind {
    Vertices,
    EnvelopeMap,
    LinearBounds,
    ContinuousBound,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    #[arg(value_enum)]
    pub kind: EmitKind,
    /// Setting count (`vertices` needs a finite one).
    #[arg(long)]
    pub n: Option<SettingArg>,
    /// Points per axis for grid tables.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Points for `continuous-bound`.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// `β` grid for the linear family.
    #[arg(long = "beta-grid", default_value_t = routed_bell_core::bounds::DEFAULT_BETA_GRID)]
    pub beta_grid: usize,
    /// Compute vertices by brute force over hidden-state directions.
    #[arg(long)]
    pub brute_force: bool,
    #[arg(long = "zeta-grid", default_value_t = DEFAULT_ZETA_GRID)]
    pub zeta_grid: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    GisinGisin,
    PovmExtension,
    Planar,
    PlanarPovm,
}

impl From<ModelName> for LhvModelKind {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::GisinGisin => LhvModelKind::GisinGisin,
            ModelName::PovmExtension => LhvModelKind::PovmExtension,
            ModelName::Planar => LhvModelKind::Planar,
            ModelName::PlanarPovm => LhvModelKind::PlanarPovm,
        }
    }
}

#[derive(Debug, Args)]
pub struct LhvArgs {
    #[arg(value_enum)]
    pub model: ModelName,
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random setting pairs.
    #[arg(long, default_value_t = 20)]
    pub settings: usize,
    /// Fraction of clicks kept, to simulate efficiencies below critical.
    #[arg(long, default_value_t = 1.0)]
    pub keep: f64,
    /// Allowed deviation per cell in binomial standard deviations.
    #[arg(long, default_value_t = 4.0)]
    pub sigmas: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: u32,
    /// Long-path efficiency; alias of `--eta-lp`.
    #[arg(long, conflicts_with = "eta_lp")]
    pub eta: Option<f64>,
    #[arg(long = "eta-lp")]
    pub eta_lp: Option<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Where to write the statistics JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the full correlation table JSON.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Certify(a) => cmd_certify(a, out, err),
        Command::ScanEta(a) => cmd_scan_eta(a, out).map(|()| 0),
        Command::Emit(a) => cmd_emit(a, out).map(|()| 0),
        Command::Lhv(a) => cmd_lhv(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out).map(|()| 0),
    }
}

/// Relative certification tolerance, from the environment if set.
pub fn certify_tolerance() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(v) => {
            let tol: f64 = v.trim().parse().with_context(|| format!("{TOL_ENV}={v} is not a number"))?;
            if !(tol.is_finite() && tol >= 0.0) {
                bail!("{TOL_ENV} must be a non-negative number");
            }
            Ok(tol)
        }
        Err(std::env::VarError::NotPresent) => Ok(routed_bell_core::tol::CERTIFY_MARGIN),
        Err(e) => bail!("{TOL_ENV}: {e}"),
    }
}

fn certify_stats(a: &CertifyArgs) -> Result<RoutedStats> {
    if let Some(path) = &a.stats {
        let f: StatsFile = read_json(path)?;
        return f.to_stats();
    }
    let (Some(s), Some(w), Some(t), Some(n)) = (a.s, a.w, a.t, a.n) else {
        bail!("give --S, --W, --T and --n, or --stats FILE");
    };
    Ok(RoutedStats::new(s, w, t, n.0)?)
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let stats = certify_stats(&a)?;
    let verdict = certify_with_tol(&stats, certify_tolerance()?)?;
    let text = to_json(&VerdictJson::from(&verdict))?;
    out.write_all(text.as_bytes())?;
    if let Some(p) = &a.out {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    writeln!(
        err,
        "{}: W = {} vs {} bound {} (margin {:+.3e})",
        if verdict.certified { "LRQ certified" } else { "SRQ compatible" },
        stats.wn(),
        verdict.bound.name(),
        verdict.bound_value,
        verdict.margin,
    )?;
    if stats.exceeds_tsirelson() {
        writeln!(err, "warning: S = {} exceeds 2√2", stats.s())?;
    }
    Ok(if verdict.certified { 0 } else { 1 })
}

fn scan_noise(a: &ScanArgs) -> Result<(f64, f64)> {
    if let Some(z) = a.zeta {
        let nm = NoiseModel::uniform(z, 1.0)?;
        return Ok((eps_of(&nm, a.eps_form), nm.delta()));
    }
    if a.noise.any() {
        if a.eps.is_some() || a.delta.is_some() {
            bail!("give either --eps/--delta or detector parameters, not both");
        }
        let nm = a.noise.model(1.0)?;
        return Ok((eps_of(&nm, a.eps_form), nm.delta()));
    }
    Ok((a.eps.unwrap_or(0.0), a.delta.unwrap_or(0.0)))
}

fn eps_of(nm: &NoiseModel, form: EpsForm) -> f64 {
    match form {
        EpsForm::Binned => nm.epsilon_binned(),
        EpsForm::ClosedForm => nm.epsilon_closed_form(),
    }
}

fn cmd_scan_eta(a: ScanArgs, out: &mut dyn Write) -> Result<()> {
    let (eps, delta) = scan_noise(&a)?;
    let rows = tables::scan_eta(&a.n, eps, delta)?;
    let text = match a.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => to_csv(&tables::ETA_SCAN_HEADER, rows.iter().map(|r| r.csv()))?,
    };
    emit(&text, a.out.as_deref(), out)
}

fn cmd_emit(a: EmitArgs, out: &mut dyn Write) -> Result<()> {
    let text = match a.kind {
        EmitKind::Vertices => {
            let n = match a.n.map(|s| s.0) {
                Some(SettingCount::Finite(n)) => n,
                None => 4,
                Some(SettingCount::Continuous) => bail!("vertices need a finite --n"),
            };
            let poly = if a.brute_force { brute_force_lhs(n, a.zeta_grid)? } else { lhs_vertices(n)? };
            let j = PolytopeJson::from(&poly);
            match a.format {
                Format::Json => to_json(&j)?,
                Format::Csv => to_csv(
                    &["k", "T", "W_upper"],
                    j.vertices.iter().map(|v| vec![v.k.to_string(), fixed(v.t), fixed(v.w_upper)]),
                )?,
            }
        }
        EmitKind::EnvelopeMap => {
            let rows = tables::envelope_map(a.grid)?;
            match a.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&tables::ENVELOPE_HEADER, rows.iter().map(|r| r.csv()))?,
            }
        }
        EmitKind::LinearBounds => {
            let n = a.n.map_or(SettingCount::Continuous, |s| s.0);
            let rows = tables::linear_bounds(a.grid, n, a.beta_grid)?;
            match a.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&tables::LINEAR_HEADER, rows.iter().map(|r| r.csv()))?,
            }
        }
        EmitKind::ContinuousBound => {
            let pts = tables::continuous_bound(a.points)?;
            match a.format {
                Format::Json => to_json(&pts)?,
                Format::Csv => to_csv(&["T", "W"], pts.iter().map(|p| vec![fixed(p.t), fixed(p.w)]))?,
            }
        }
    };
    emit(&text, a.out.as_deref(), out)
}

fn cmd_lhv(a: LhvArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let kind = LhvModelKind::from(a.model);
    let model = LhvModel::new(kind).with_keep(a.keep)?;
    let settings = random_settings(kind, a.settings, a.seed)?;
    let (report, batch) = par_lhv_verify(&model, &settings, a.samples, a.seed, Tolerance::Sigma(a.sigmas))?;
    let json = LhvReportJson::new(&report, &batch);
    emit(&to_json(&json)?, a.out.as_deref(), out)?;
    writeln!(
        err,
        "{}: {} (click rate {:.6}, target {:.6}, max deviation {:.2}σ)",
        json.model, json.status, json.eta_empirical, json.eta_target, json.max_z
    )?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let eta_lp = a.eta.or(a.eta_lp).unwrap_or(1.0);
    let nm = a.noise.model(eta_lp)?;
    let strategy = apply_noise(&ideal_strategy(a.n)?, &nm)?;
    let table = correlations(&strategy)?;
    let stats = routed_stats(&table, a.n)?;
    if let Some(p) = &a.table {
        std::fs::write(p, to_json(&TableJson::from(&table))?).with_context(|| format!("writing {}", p.display()))?;
    }
    emit(&to_json(&StatsFile::from_stats(&stats))?, a.out.as_deref(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("routed-bell").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn setting_arg_parsing() {
        assert_eq!("inf".parse::<SettingArg>().unwrap().0, SettingCount::Continuous);
        assert_eq!("7".parse::<SettingArg>().unwrap().0, SettingCount::Finite(7));
        assert!("0".parse::<SettingArg>().is_err());
        assert!("x".parse::<SettingArg>().is_err());
    }

    #[test]
    fn certify_exit_codes() {
        assert_eq!(run_str(&["certify", "--S", "2.8284", "--W", "0.30", "--T", "0.30", "--n", "4"]).0, 0);
        assert_eq!(run_str(&["certify", "--S", "2.8284", "--W", "0.20", "--T", "0.20", "--n", "4"]).0, 1);
        assert_eq!(run_str(&["certify", "--S", "2.0", "--W", "0", "--T", "0", "--n", "4"]).0, 1);
        assert_eq!(run_str(&["certify", "--S", "2.0", "--W", "-0.5", "--T", "0.1", "--n", "4"]).0, 2);
        assert_eq!(run_str(&["certify", "--S", "3.5", "--W", "0.1", "--T", "0.1", "--n", "4"]).0, 2);
        assert_eq!(run_str(&["certify", "--S", "2.5"]).0, 2);
        assert_eq!(run_str(&["certify", "--S", "abc", "--W", "0", "--T", "0", "--n", "4"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("certify"));
    }

    #[test]
    fn unknown_model_is_input_error() {
        assert_eq!(run_str(&["lhv", "bohm", "--samples", "10"]).0, 2);
    }
}
