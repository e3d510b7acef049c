//! Subcommand arguments, their resolution against the config file, and the
//! sweeps that produce each table.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cv_triparty::asym_tw::{key_window, tw_covariance, AsymParams, CoefficientMode, KeyWindow};
use cv_triparty::cavity::{self, build_system, critical_pump, CavityParams, ORDERED_PAIRS};
use cv_triparty::criteria::{duan_simon, key_rate, reid_product, vlf_pair, vlf_trio, wang_bound};
use cv_triparty::symmetric::{build_symmetric_state, verify_consistency, SymmetricParams, SYMMETRIC_MU, SYMMETRIC_NU};

use crate::config::ConfigFile;
use crate::plot::{render_plot, PlotSpec};
use crate::table::Table;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "cv-triparty", version, about = "Tripartite Gaussian entanglement, steering and key-rate sweeps")]
pub struct Cli {
    /// TOML file with one table per subcommand; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetric beamsplitter network, swept over the squeezing parameter.
    Symmetric(SymmetricArgs),
    /// Asymmetric travelling-wave model, swept over ζt.
    AsymTw(AsymArgs),
    /// Intracavity model: spectra over ω, or extremal values over the pump.
    Cavity(CavityArgs),
    /// Render table columns to an SVG line plot.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SymmetricArgs {
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// First beamsplitter reflectivity.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Second beamsplitter reflectivity.
    #[arg(long)]
    pub nu: Option<f64>,
    /// CSV output path (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot of the table.
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coefficients {
    Canonical,
    PaperLiteral,
}

impl From<Coefficients> for CoefficientMode {
    fn from(c: Coefficients) -> Self {
        match c {
            Coefficients::Canonical => CoefficientMode::Canonical,
            Coefficients::PaperLiteral => CoefficientMode::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct AsymArgs {
    /// κ₂/κ₁ with κ₁ = 1.
    #[arg(long)]
    pub kappa_ratio: Option<f64>,
    #[arg(long)]
    pub zt_min: Option<f64>,
    #[arg(long)]
    pub zt_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub coefficients: Option<Coefficients>,
    /// Append the positive key-rate windows for both directions.
    #[arg(long)]
    pub find_window: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CavityArgs {
    /// κ₂/κ₁ with κ₁ = 0.01.
    #[arg(long)]
    pub kappa_ratio: Option<f64>,
    /// Pump as a fraction of threshold.
    #[arg(long)]
    pub eps_frac: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    /// Number of ω points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sweep ε/ε_c as `lo:hi:steps`, reporting extremal values over ω.
    #[arg(long, value_name = "LO:HI:STEPS")]
    pub sweep_pump: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PlotArgs {
    /// CSV table to plot.
    pub input: PathBuf,
    /// Comma-separated columns (default: all but the x column).
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Column for the horizontal axis (default: the first).
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub title: Option<String>,
    /// SVG output path (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Inclusive evenly spaced range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn new(name: &str, min: f64, max: f64, steps: usize) -> Result<Self, CliError> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(CliError::Usage(format!("{name}: bounds must be finite")));
        }
        if min >= max {
            return Err(CliError::Usage(format!("{name}: min {min} must be below max {max}")));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!("{name}: need at least 2 steps, got {steps}")));
        }
        Ok(Sweep { min, max, steps })
    }

    /// Parses `lo:hi:steps`.
    pub fn parse(name: &str, s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Usage(format!("{name}: expected lo:hi:steps, got {s:?}"));
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        Sweep::new(
            name,
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
            n.trim().parse().map_err(|_| bad())?,
        )
    }

    pub fn points(&self) -> Vec<f64> {
        cavity::linspace(self.min, self.max, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricConfig {
    pub r: Sweep,
    pub mu: f64,
    pub nu: f64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl SymmetricConfig {
    pub fn resolve(args: &SymmetricArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let f = &file.symmetric;
        let r = Sweep::new(
            "r",
            args.r_min.or(f.r_min).unwrap_or(0.0),
            args.r_max.or(f.r_max).unwrap_or(2.0),
            args.steps.or(f.steps).unwrap_or(201),
        )?;
        if r.min < 0.0 {
            return Err(CliError::Usage(format!("r: squeezing must be >= 0, got {}", r.min)));
        }
        Ok(SymmetricConfig {
            r,
            mu: args.mu.or(f.mu).unwrap_or(SYMMETRIC_MU),
            nu: args.nu.or(f.nu).unwrap_or(SYMMETRIC_NU),
            out: args.out.clone().or_else(|| f.out.clone()),
            plot: args.plot.clone().or_else(|| f.plot.clone()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymConfig {
    pub kappa_ratio: f64,
    pub zt: Sweep,
    pub mode: CoefficientMode,
    pub find_window: bool,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl AsymConfig {
    pub fn resolve(args: &AsymArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let f = &file.asym_tw;
        let zt = Sweep::new(
            "zt",
            args.zt_min.or(f.zt_min).unwrap_or(0.0),
            args.zt_max.or(f.zt_max).unwrap_or(3.0),
            args.steps.or(f.steps).unwrap_or(301),
        )?;
        if zt.min < 0.0 {
            return Err(CliError::Usage(format!("zt: must be >= 0, got {}", zt.min)));
        }
        let mode = match (args.coefficients, f.coefficients.as_deref()) {
            (Some(c), _) => c.into(),
            (None, None) => CoefficientMode::Canonical,
            (None, Some(s)) => Coefficients::from_str(s, true)
                .map_err(|_| CliError::Usage(format!("coefficients: unknown mode {s:?}")))?
                .into(),
        };
        Ok(AsymConfig {
            kappa_ratio: args.kappa_ratio.or(f.kappa_ratio).unwrap_or(0.6),
            zt,
            mode,
            find_window: args.find_window || f.find_window.unwrap_or(false),
            out: args.out.clone().or_else(|| f.out.clone()),
            plot: args.plot.clone().or_else(|| f.plot.clone()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub kappa_ratio: f64,
    pub eps_frac: f64,
    pub omega: Sweep,
    pub sweep_pump: Option<Sweep>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl CavityConfig {
    pub fn resolve(args: &CavityArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let f = &file.cavity;
        let omega = Sweep::new(
            "omega",
            args.omega_min.or(f.omega_min).unwrap_or(cavity::DEFAULT_OMEGA_MIN),
            args.omega_max.or(f.omega_max).unwrap_or(cavity::DEFAULT_OMEGA_MAX),
            args.steps.or(f.steps).unwrap_or(cavity::DEFAULT_OMEGA_POINTS),
        )?;
        let sweep_pump = args
            .sweep_pump
            .as_deref()
            .or(f.sweep_pump.as_deref())
            .map(|s| Sweep::parse("sweep-pump", s))
            .transpose()?;
        if let Some(s) = sweep_pump {
            if s.min < 0.0 {
                return Err(CliError::Usage(format!("sweep-pump: fractions must be >= 0, got {}", s.min)));
            }
        }
        let eps_frac = args.eps_frac.or(f.eps_frac).unwrap_or(0.8);
        if !(eps_frac >= 0.0 && eps_frac.is_finite()) {
            return Err(CliError::Usage(format!("eps-frac: must be finite and >= 0, got {eps_frac}")));
        }
        Ok(CavityConfig {
            kappa_ratio: args.kappa_ratio.or(f.kappa_ratio).unwrap_or(0.6),
            eps_frac,
            omega,
            sweep_pump,
            out: args.out.clone().or_else(|| f.out.clone()),
            plot: args.plot.clone().or_else(|| f.plot.clone()),
        })
    }

    pub fn params(&self) -> Result<CavityParams, CliError> {
        let base = CavityParams::reference();
        if !(self.kappa_ratio >= 0.0 && self.kappa_ratio.is_finite()) {
            return Err(CliError::Usage(format!("kappa-ratio: must be finite and >= 0, got {}", self.kappa_ratio)));
        }
        Ok(CavityParams {
            kappa2: self.kappa_ratio * base.kappa1,
            ..base
        })
    }
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

/// Rows over r of the pair and trio criteria on the network output. Pair
/// and trio columns report the minimum over mode assignments, which is the
/// common value when the network is fully symmetric.
pub fn run_symmetric(cfg: &SymmetricConfig) -> Result<Table, CliError> {
    let symmetric = SymmetricParams::symmetric(0.0);
    let fully_symmetric = cfg.mu == symmetric.mu && cfg.nu == symmetric.nu;
    let mut columns = vec!["r", "ds_plus", "ds_minus", "reid", "v_ij", "v_ijk", "wang_3_1", "wang_3_2"];
    if fully_symmetric {
        columns.push("closed_form_gap");
    }
    let mut table = Table::new("symmetric", &columns);
    table.param_num("r_min", cfg.r.min);
    table.param_num("r_max", cfg.r.max);
    table.param("steps", cfg.r.steps);
    table.param_num("mu", cfg.mu);
    table.param_num("nu", cfg.nu);
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let trios = [(0, 1, 2), (1, 0, 2), (2, 0, 1)];
    for r in cfg.r.points() {
        let state = build_symmetric_state(&SymmetricParams { r, mu: cfg.mu, nu: cfg.nu })?;
        let mut ds_plus = f64::INFINITY;
        let mut ds_minus = f64::INFINITY;
        for (i, j) in pairs {
            let (p, m) = duan_simon(&state, i, j)?;
            ds_plus = ds_plus.min(p.value);
            ds_minus = ds_minus.min(m.value);
        }
        let reid = min_of(
            ORDERED_PAIRS
                .iter()
                .map(|&(s, t)| reid_product(&state, s, t).map(|c| c.value))
                .collect::<Result<Vec<_>, _>>()?,
        );
        let v_ij = min_of(
            trios
                .iter()
                .map(|&(i, j, k)| vlf_pair(&state, i.min(j), i.max(j), k).map(|c| c.value))
                .collect::<Result<Vec<_>, _>>()?,
        );
        let v_ijk = min_of(
            trios
                .iter()
                .map(|&(i, j, k)| vlf_trio(&state, i, j, k).map(|c| c.value))
                .collect::<Result<Vec<_>, _>>()?,
        );
        let mut row = vec![r, ds_plus, ds_minus, reid, v_ij, v_ijk, wang_bound(3, 1, r)?, wang_bound(3, 2, r)?];
        if fully_symmetric {
            row.push(verify_consistency(&[r])?);
        }
        table.push_row(row);
    }
    Ok(table)
}

fn mode_name(mode: CoefficientMode) -> &'static str {
    match mode {
        CoefficientMode::Canonical => "canonical",
        CoefficientMode::PaperLiteral => "paper-literal",
    }
}

/// Windows for (steered 3, steerer 1) and (steered 1, steerer 3), 1-based.
pub fn asym_windows(cfg: &AsymConfig) -> Result<[(usize, usize, Option<KeyWindow>); 2], CliError> {
    let params = AsymParams::with_ratio(cfg.kappa_ratio, cfg.mode)?;
    Ok([
        (3, 1, key_window(&params, 2, 0, cfg.zt.max)?),
        (1, 3, key_window(&params, 0, 2, cfg.zt.max)?),
    ])
}

/// Rows over ζt of the Alice–Clare criteria. With `find_window`, the key
/// windows are appended as comment lines; finding none in either direction
/// is a regime failure.
pub fn run_asym_tw(cfg: &AsymConfig) -> Result<Table, CliError> {
    let params = AsymParams::with_ratio(cfg.kappa_ratio, cfg.mode)?;
    let mut table = Table::new(
        "asym-tw",
        &["zt", "ds_minus_13", "v_123", "v_312", "v_13", "reid_1_3", "reid_3_1", "key_1_3", "key_3_1"],
    );
    table.param_num("kappa_ratio", cfg.kappa_ratio);
    table.param_num("zt_min", cfg.zt.min);
    table.param_num("zt_max", cfg.zt.max);
    table.param("steps", cfg.zt.steps);
    table.param("coefficients", mode_name(cfg.mode));
    table.param("find_window", cfg.find_window);
    for zt in cfg.zt.points() {
        let cov = tw_covariance(&params, zt)?;
        let (_, ds_minus) = duan_simon(&cov, 0, 2)?;
        let reid13 = reid_product(&cov, 0, 2)?.value;
        let reid31 = reid_product(&cov, 2, 0)?.value;
        table.push_row(vec![
            zt,
            ds_minus.value,
            vlf_trio(&cov, 0, 1, 2)?.value,
            vlf_trio(&cov, 2, 0, 1)?.value,
            vlf_pair(&cov, 0, 2, 1)?.value,
            reid13,
            reid31,
            key_rate(reid13)?.value,
            key_rate(reid31)?.value,
        ]);
    }
    if cfg.find_window {
        let windows = asym_windows(cfg)?;
        if windows.iter().all(|(_, _, w)| w.is_none()) {
            return Err(CliError::Physical(format!(
                "no positive key-rate window on [0, {}]",
                cfg.zt.max
            )));
        }
        for (steered, steerer, w) in windows {
            table.notes.push(match w {
                Some(w) => format!(
                    "window steered={steered} steerer={steerer} lo={} hi={} closed={}",
                    crate::table::format_number(w.lo),
                    crate::table::format_number(w.hi),
                    w.closed
                ),
                None => format!("window steered={steered} steerer={steerer} none"),
            });
        }
    }
    Ok(table)
}

fn pair_columns(prefix: &str) -> Vec<String> {
    ORDERED_PAIRS
        .iter()
        .map(|(s, t)| format!("{prefix}_{}_{}", s + 1, t + 1))
        .collect()
}

/// Steering products and key rates for all ordered pairs, either over ω at
/// a fixed pump or, with a pump sweep, as extremal-over-ω values per pump.
pub fn run_cavity(cfg: &CavityConfig) -> Result<Table, CliError> {
    let params = cfg.params()?;
    let epsilon_c = critical_pump(&params)?;
    let (x_name, reid_prefix, key_prefix) = match cfg.sweep_pump {
        Some(_) => ("eps_frac", "min_reid", "max_key"),
        None => ("omega", "reid", "key"),
    };
    let mut columns = vec![x_name.to_string()];
    columns.extend(pair_columns(reid_prefix));
    columns.extend(pair_columns(key_prefix));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("cavity", &columns);
    let [g0, g1, g2, g3] = params.gamma;
    for (k, g) in [("gamma0", g0), ("gamma1", g1), ("gamma2", g2), ("gamma3", g3)] {
        table.param_num(k, g);
    }
    table.param_num("kappa1", params.kappa1);
    table.param_num("kappa2", params.kappa2);
    table.param_num("epsilon_c", epsilon_c);
    table.param_num("omega_min", cfg.omega.min);
    table.param_num("omega_max", cfg.omega.max);
    table.param("steps", cfg.omega.steps);

    match cfg.sweep_pump {
        Some(sweep) => {
            if sweep.max >= 1.0 {
                return Err(CliError::Physical(format!(
                    "pump sweep reaches ε/ε_c = {} at or above threshold (ε_c = {epsilon_c})",
                    sweep.max
                )));
            }
            table.param("sweep_pump", format!("{}:{}:{}", sweep.min, sweep.max, sweep.steps));
            let rows = cavity::pump_sweep(&params, &sweep.points(), &cfg.omega.points())?;
            for row in rows {
                let mut out = vec![row.eps_frac];
                out.extend(row.pairs.iter().map(|p| p.min_reid));
                out.extend(row.pairs.iter().map(|p| p.max_key));
                table.push_row(out);
            }
        }
        None => {
            table.param_num("eps_frac", cfg.eps_frac);
            let system = build_system(&params.with_pump_fraction(cfg.eps_frac)?)?;
            for omega in cfg.omega.points() {
                let reid = cavity::reid_products_at(&system, omega)?;
                let mut out = vec![omega];
                out.extend(reid);
                for v in reid {
                    out.push(key_rate(v)?.value);
                }
                table.push_row(out);
            }
        }
    }
    Ok(table)
}

pub fn write_plot(table: &Table, path: &std::path::Path) -> Result<(), CliError> {
    let spec = PlotSpec { x: None, columns: Vec::new(), title: None };
    std::fs::write(path, render_plot(table, &spec)?)?;
    Ok(())
}

fn emit(table: &Table, out: Option<&std::path::Path>, plot: Option<&std::path::Path>) -> Result<(), CliError> {
    table.write(out)?;
    if let Some(p) = plot {
        write_plot(table, p)?;
    }
    Ok(())
}

/// Executes one parsed invocation.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = ConfigFile::load_optional(cli.config.as_deref())?;
    match &cli.command {
        Command::Symmetric(args) => {
            let cfg = SymmetricConfig::resolve(args, &file)?;
            emit(&run_symmetric(&cfg)?, cfg.out.as_deref(), cfg.plot.as_deref())
        }
        Command::AsymTw(args) => {
            let cfg = AsymConfig::resolve(args, &file)?;
            emit(&run_asym_tw(&cfg)?, cfg.out.as_deref(), cfg.plot.as_deref())
        }
        Command::Cavity(args) => {
            let cfg = CavityConfig::resolve(args, &file)?;
            emit(&run_cavity(&cfg)?, cfg.out.as_deref(), cfg.plot.as_deref())
        }
        Command::Plot(args) => {
            let f = &file.plot;
            let table = Table::read(&args.input)?;
            let spec = PlotSpec {
                x: args.x.clone().or_else(|| f.x.clone()),
                columns: if args.columns.is_empty() { f.columns.clone().unwrap_or_default() } else { args.columns.clone() },
                title: args.title.clone().or_else(|| f.title.clone()),
            };
            let svg = render_plot(&table, &spec)?;
            match args.out.clone().or_else(|| f.out.clone()) {
                Some(p) => std::fs::write(p, svg)?,
                None => print!("{svg}"),
            }
            Ok(())
        }
    }
}
