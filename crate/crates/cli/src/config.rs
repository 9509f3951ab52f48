//! Command-line and config-file parsing into a validated [`SweepSpec`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use ncf2fd_core::{
    complete_constellation, DescentConfig, GridResolution, Method, SimConfig, SystemParams,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Closed-form error rates of a fixed constellation.
    Analyze,
    /// Optimized constellation per point.
    Optimize,
    /// Monte Carlo run of a fixed or optimized constellation.
    Simulate,
    /// Optimize and simulate every point.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Algorithm,
    Exhaustive,
    Both,
}

impl MethodChoice {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Algorithm => vec![Method::Algorithm],
            MethodChoice::Exhaustive => vec![Method::Exhaustive],
            MethodChoice::Both => vec![Method::Algorithm, Method::Exhaustive],
        }
    }
}

/// Raw options. Everything is optional here so that flags can be layered
/// over a config file before defaults are filled in.
#[derive(Debug, Default, Parser)]
#[command(
    name = "ncf2fd",
    version,
    about = "Design and evaluate the relay constellation over SNR and antenna sweeps"
)]
struct Options {
    /// analyze | optimize | simulate | sweep
    #[arg(value_enum)]
    command: Option<Mode>,
    /// Same as the positional mode.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Read `key = value` settings from a file; flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// SNR values in dB, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    snr: Vec<f64>,
    /// Receive antenna counts at Bob, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    nr: Vec<u32>,
    #[arg(long = "sigma-ac2")]
    sigma_ac2: Option<f64>,
    #[arg(long = "lambda-sic")]
    lambda_sic: Option<f64>,
    /// Use the exact outer thresholds.
    #[arg(long = "exact-thresholds", num_args = 0..=1, default_missing_value = "true")]
    exact_thresholds: Option<bool>,

    #[arg(long)]
    method: Option<MethodChoice>,
    #[arg(long = "delta-pe")]
    delta_pe: Option<f64>,
    #[arg(long = "delta-eta1")]
    delta_eta1: Option<f64>,
    #[arg(long = "eta2-init")]
    eta2_init: Option<f64>,
    #[arg(long = "alpha-init")]
    alpha_init: Option<f64>,
    #[arg(long = "max-inner")]
    max_inner: Option<usize>,
    #[arg(long = "max-outer")]
    max_outer: Option<usize>,
    #[arg(long = "grid-alpha")]
    grid_alpha: Option<f64>,
    /// Step for both eta1 and eta2 in the grid search.
    #[arg(long = "grid-eta")]
    grid_eta: Option<f64>,
    #[arg(long = "max-grid-points")]
    max_grid_points: Option<u128>,

    /// Fixed constellation for analyze and simulate.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,

    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Jammer noise power on the direct band for the baseline.
    #[arg(long = "jam-power")]
    jam_power: Option<f64>,
    /// Add a jammed on-off keying row per point (simulate and sweep).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    baseline: Option<bool>,

    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Fill the wall_time_s column. Off by default so output is reproducible.
    #[arg(long = "record-timing", num_args = 0..=1, default_missing_value = "true")]
    record_timing: Option<bool>,
}

impl Options {
    /// Fields set here win over `other`.
    fn layered_over(self, other: Options) -> Options {
        fn list<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Options {
            command: self.command.or(other.command),
            mode: self.mode.or(other.mode),
            config: self.config,
            snr: list(self.snr, other.snr),
            nr: list(self.nr, other.nr),
            sigma_ac2: self.sigma_ac2.or(other.sigma_ac2),
            lambda_sic: self.lambda_sic.or(other.lambda_sic),
            exact_thresholds: self.exact_thresholds.or(other.exact_thresholds),
            method: self.method.or(other.method),
            delta_pe: self.delta_pe.or(other.delta_pe),
            delta_eta1: self.delta_eta1.or(other.delta_eta1),
            eta2_init: self.eta2_init.or(other.eta2_init),
            alpha_init: self.alpha_init.or(other.alpha_init),
            max_inner: self.max_inner.or(other.max_inner),
            max_outer: self.max_outer.or(other.max_outer),
            grid_alpha: self.grid_alpha.or(other.grid_alpha),
            grid_eta: self.grid_eta.or(other.grid_eta),
            max_grid_points: self.max_grid_points.or(other.max_grid_points),
            alpha: self.alpha.or(other.alpha),
            eta1: self.eta1.or(other.eta1),
            eta2: self.eta2.or(other.eta2),
            trials: self.trials.or(other.trials),
            seed: self.seed.or(other.seed),
            jam_power: self.jam_power.or(other.jam_power),
            baseline: self.baseline.or(other.baseline),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
            record_timing: self.record_timing.or(other.record_timing),
        }
    }
}

/// A fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    pub snr_db: Vec<f64>,
    pub n_r: Vec<u32>,
    pub sigma_ac2: f64,
    pub lambda_sic: f64,
    pub exact_thresholds: bool,
    pub methods: Vec<Method>,
    pub descent: DescentConfig,
    pub grid: GridResolution,
    pub sim: SimConfig,
    /// `(alpha, eta1, eta2)` of a fixed constellation.
    pub fixed: Option<(f64, f64, f64)>,
    pub baseline: bool,
    pub record_timing: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_SEED: u64 = 42;
/// Constellation used by `analyze` when none is given.
pub const DEFAULT_FIXED: (f64, f64, f64) = (0.5, 0.1, 1.5);

impl SweepSpec {
    pub fn params(&self, snr_db: f64, n_r: u32) -> SystemParams {
        let mode = if self.exact_thresholds {
            ncf2fd_core::ThresholdMode::Exact
        } else {
            ncf2fd_core::ThresholdMode::Approximate
        };
        SystemParams::new(snr_db, n_r)
            .with_sigma_ac2(self.sigma_ac2)
            .with_lambda_sic(self.lambda_sic)
            .with_threshold_mode(mode)
    }

    /// Every resolved setting as `(key, value)` pairs, in a fixed order.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let join = |v: Vec<String>| v.join(",");
        let mode = format!("{:?}", self.mode).to_lowercase();
        let methods = join(self.methods.iter().map(|m| m.tag().to_string()).collect());
        let d = &self.descent;
        let mut m = vec![
            ("generator", format!("ncf2fd {}", env!("CARGO_PKG_VERSION"))),
            ("mode", mode),
            (
                "snr",
                join(self.snr_db.iter().map(f64::to_string).collect()),
            ),
            ("nr", join(self.n_r.iter().map(u32::to_string).collect())),
            ("sigma-ac2", self.sigma_ac2.to_string()),
            ("lambda-sic", self.lambda_sic.to_string()),
            ("exact-thresholds", self.exact_thresholds.to_string()),
            ("method", methods),
            ("delta-pe", d.delta_pe.to_string()),
            ("delta-eta1", d.delta_eta1.to_string()),
            ("eta2-init", d.eta2_init.to_string()),
            ("alpha-init", d.alpha_init.to_string()),
            ("max-inner", d.max_inner.to_string()),
            ("max-outer", d.max_outer.to_string()),
            ("grid-alpha", self.grid.alpha.to_string()),
            ("grid-eta", self.grid.eta1.to_string()),
            ("max-grid-points", self.grid.max_points.to_string()),
            ("trials", self.sim.trials.to_string()),
            ("seed", self.sim.seed.to_string()),
            ("jam-power", self.sim.jam_power.to_string()),
            ("baseline", self.baseline.to_string()),
        ];
        if let Some((a, e1, e2)) = self.fixed {
            m.push(("alpha", a.to_string()));
            m.push(("eta1", e1.to_string()));
            m.push(("eta2", e2.to_string()));
        }
        m.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

/// Turns `key = value` lines into the equivalent `--key value` arguments.
fn config_file_args(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut args = vec![OsString::from("ncf2fd")];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                i + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(CliError::Usage(format!(
                "{}:{}: config files cannot include other config files",
                path.display(),
                i + 1
            )));
        }
        args.push(format!("--{key}").into());
        let value: Vec<&str> = value.split(',').map(str::trim).collect();
        args.push(value.join(",").into());
    }
    Ok(args)
}

/// clap's rendered message without its own `error: ` prefix.
fn clap_message(e: &clap::Error) -> String {
    let text = e.to_string();
    text.strip_prefix("error: ")
        .unwrap_or(&text)
        .trim_end()
        .to_string()
}

fn usage(e: clap::Error) -> CliError {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(clap_message(&e)),
    }
}

/// Parses `args` (program name first), layering flags over an optional
/// config file and then defaults, and checks every field.
pub fn parse_config<I, T>(args: I) -> Result<SweepSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let flags = Options::try_parse_from(args).map_err(usage)?;
    let opts = match &flags.config {
        Some(path) => {
            let file = Options::try_parse_from(config_file_args(path)?).map_err(|e| {
                CliError::Usage(format!(
                    "in config file {}: {}",
                    path.display(),
                    clap_message(&e)
                ))
            })?;
            flags.layered_over(file)
        }
        None => flags,
    };
    resolve(opts)
}

fn resolve(o: Options) -> Result<SweepSpec, CliError> {
    let mut problems = Vec::new();
    let mut bad = |msg: String| problems.push(msg);

    let mode = match (o.command, o.mode) {
        (Some(a), Some(b)) if a != b => {
            bad(format!(
                "mode given twice with different values ({a:?} and {b:?})"
            ));
            a
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => {
            bad("mode: one of analyze, optimize, simulate, sweep is required".into());
            Mode::Analyze
        }
    };

    let snr_db = if o.snr.is_empty() { vec![30.0] } else { o.snr };
    for s in &snr_db {
        if !s.is_finite() {
            bad(format!("snr: values must be finite (got {s})"));
        }
    }
    let n_r = if o.nr.is_empty() { vec![4] } else { o.nr };
    for &n in &n_r {
        if n < 1 {
            bad(format!("nr: values must be >= 1 (got {n})"));
        }
    }

    let sigma_ac2 = o.sigma_ac2.unwrap_or(SystemParams::DEFAULT_SIGMA_AC2);
    if !(sigma_ac2.is_finite() && sigma_ac2 > 1.0) {
        bad(format!(
            "sigma-ac2: must be finite and > 1 (got {sigma_ac2})"
        ));
    }
    let lambda_sic = o.lambda_sic.unwrap_or(SystemParams::DEFAULT_LAMBDA_SIC);
    if !(lambda_sic.is_finite() && lambda_sic > 0.0) {
        bad(format!(
            "lambda-sic: must be finite and > 0 (got {lambda_sic})"
        ));
    }

    let defaults = DescentConfig::default();
    let descent = DescentConfig {
        delta_pe: o.delta_pe.unwrap_or(defaults.delta_pe),
        delta_eta1: o.delta_eta1.unwrap_or(defaults.delta_eta1),
        eta2_init: o.eta2_init.unwrap_or(defaults.eta2_init),
        alpha_init: o.alpha_init.unwrap_or(defaults.alpha_init),
        max_inner: o.max_inner.unwrap_or(defaults.max_inner),
        max_outer: o.max_outer.unwrap_or(defaults.max_outer),
        ..defaults
    };
    if !(descent.delta_pe > 0.0) {
        bad(format!("delta-pe: must be > 0 (got {})", descent.delta_pe));
    }
    if !(descent.delta_eta1 > 0.0 && descent.delta_eta1 < 1.0) {
        bad(format!(
            "delta-eta1: must lie in (0, 1) (got {})",
            descent.delta_eta1
        ));
    }
    if !(descent.alpha_init > 0.0 && descent.alpha_init < 1.0) {
        bad(format!(
            "alpha-init: must lie in (0, 1) (got {})",
            descent.alpha_init
        ));
    }
    if !(descent.eta2_init > 0.0 && descent.eta2_init.is_finite()) {
        bad(format!(
            "eta2-init: must be > 0 (got {})",
            descent.eta2_init
        ));
    } else if descent.alpha_init > 0.0 && descent.alpha_init < 1.0 {
        let ub = ncf2fd_core::Constellation::eta2_upper_bound(descent.alpha_init, 0.0);
        if descent.eta2_init >= ub {
            bad(format!(
                "eta2-init: must be below {ub} for alpha-init {} (got {})",
                descent.alpha_init, descent.eta2_init
            ));
        }
    }
    if descent.max_inner == 0 {
        bad("max-inner: must be >= 1".into());
    }
    if descent.max_outer == 0 {
        bad("max-outer: must be >= 1".into());
    }

    let grid_defaults = GridResolution::default();
    let eta_step = o.grid_eta.unwrap_or(grid_defaults.eta1);
    let grid = GridResolution {
        alpha: o.grid_alpha.unwrap_or(grid_defaults.alpha),
        eta1: eta_step,
        eta2: eta_step,
        max_points: o.max_grid_points.unwrap_or(grid_defaults.max_points),
    };
    if !(grid.alpha > 0.0 && grid.alpha < 1.0) {
        bad(format!(
            "grid-alpha: must lie in (0, 1) (got {})",
            grid.alpha
        ));
    }
    if !(eta_step > 0.0 && eta_step < 1.0) {
        bad(format!("grid-eta: must lie in (0, 1) (got {eta_step})"));
    }

    let fixed = match (o.alpha, o.eta1, o.eta2) {
        (None, None, None) if mode == Mode::Analyze => Some(DEFAULT_FIXED),
        (None, None, None) => None,
        (a, e1, e2) => {
            let c = (
                a.unwrap_or(DEFAULT_FIXED.0),
                e1.unwrap_or(0.0),
                e2.unwrap_or(DEFAULT_FIXED.2),
            );
            if let Err(e) = complete_constellation(c.0, c.1, c.2) {
                bad(format!("alpha/eta1/eta2: {e}"));
            }
            Some(c)
        }
    };

    let sim_defaults = SimConfig::default();
    let sim = SimConfig {
        trials: o.trials.unwrap_or(sim_defaults.trials),
        seed: o.seed.unwrap_or(DEFAULT_SEED),
        stream: 0,
        jam_power: o.jam_power.unwrap_or(sim_defaults.jam_power),
        exact_thresholds: o.exact_thresholds.unwrap_or(false),
    };
    if sim.trials < 1 {
        bad("trials: must be >= 1".into());
    }
    if !(sim.jam_power >= 0.0 && sim.jam_power.is_finite()) {
        bad(format!("jam-power: must be >= 0 (got {})", sim.jam_power));
    }

    if let Some(out) = &o.out {
        let parent = out.parent().filter(|p| !p.as_os_str().is_empty());
        if parent.is_some_and(|p| !p.is_dir()) {
            bad(format!(
                "out: directory of {} does not exist",
                out.display()
            ));
        }
    }

    if !problems.is_empty() {
        let mut msg = String::from("invalid settings:");
        for p in &problems {
            let _ = write!(msg, "\n  {p}");
        }
        return Err(CliError::Usage(msg));
    }

    Ok(SweepSpec {
        mode,
        snr_db,
        n_r,
        sigma_ac2,
        lambda_sic,
        exact_thresholds: sim.exact_thresholds,
        methods: o.method.unwrap_or(MethodChoice::Algorithm).methods(),
        descent,
        grid,
        sim,
        fixed,
        baseline: o.baseline.unwrap_or(false),
        record_timing: o.record_timing.unwrap_or(false),
        out: o.out,
        format: o.format.unwrap_or(Format::Csv),
    })
}
