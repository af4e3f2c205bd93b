//! Scenario runner behind the `nlmem` binary: config ingestion, trajectory
//! and measure computation, CSV emission.
//!
//! Configs are flat `key = value` files. Blank lines and `#` comments are
//! ignored. Every key is optional; the defaults describe the sequential
//! two-window setup with `α₁ = α₂ = 1` and window length `2.5·10⁻²`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::coherence::{CoherenceSet, DephasingModel, Engine, InteractionSchedule, OhmicBath, QubitParams};
use crate::dynamics::BellSector;
use crate::gaussian::{check_rs_uncertainty, is_standard_form, make_standard_form, SqueezingParam, StandardFormParams};
use crate::nonmarkov::{
    backflow_integral, maximize_measure, pair_trajectory, uniform_grid, CoherenceTrajectory, Convention,
    OptimizerConfig, StatePair,
};
use crate::Error;

/// Window length of the built-in two-window setup, in units of `1/ω_c`.
pub const FIG1_WINDOW: f64 = 2.5e-2;
pub const FIG1_SQUEEZING: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
pub const DEFAULT_GRID_POINTS: usize = 4000;
/// Default `t_max` as a multiple of the end of the last window.
pub const T_MAX_FACTOR: f64 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed config or command line (exit 1).
    Parse(String),
    /// Physically invalid scenario (exit 2).
    Physics(String),
    /// Numerical failure or I/O trouble (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Physics(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Physics(m) => write!(f, "invalid scenario: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validity(_) | Error::Unsupported(_) => CliError::Physics(e.to_string()),
            Error::Numerical(_) | Error::Truncation { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Numerical(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub r: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub omega_c: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub windows: [(f64, f64); 2],
    pub grid_points: usize,
    /// `None` means `T_MAX_FACTOR` times the end of the last window.
    pub t_max: Option<f64>,
    pub convention: Convention,
    pub engine: Engine,
    pub out_path: Option<PathBuf>,
    /// Hand-entered standard-form covariance `(a, b, c₊, c₋)`; replaces the
    /// squeezed vacuum when all four keys are given.
    pub covariance: Option<[f64; 4]>,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let opt = OptimizerConfig::default();
        Self {
            r: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            omega_c: 1.0,
            epsilon1: 0.0,
            epsilon2: 0.0,
            windows: [(0.0, FIG1_WINDOW), (FIG1_WINDOW, 2.0 * FIG1_WINDOW)],
            grid_points: DEFAULT_GRID_POINTS,
            t_max: None,
            convention: Convention::Squared,
            engine: Engine::ClosedForm,
            out_path: None,
            covariance: None,
            random_starts: opt.random_starts,
            seed: opt.seed,
        }
    }
}

const COVARIANCE_KEYS: [&str; 4] = ["a", "b", "c_plus", "c_minus"];

impl ScenarioConfig {
    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut cov: [Option<f64>; 4] = [None; 4];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("line {line_no}: expected key = value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = |msg: String| CliError::Parse(format!("line {line_no}, key '{key}': {msg}"));
            if let Some(k) = COVARIANCE_KEYS.iter().position(|c| *c == key) {
                cov[k] = Some(parse_float(value).map_err(ctx)?);
                continue;
            }
            cfg.set(key, value).map_err(ctx)?;
        }
        match cov {
            [Some(a), Some(b), Some(cp), Some(cm)] => cfg.covariance = Some([a, b, cp, cm]),
            [None, None, None, None] => {}
            _ => {
                return Err(CliError::Parse(
                    "covariance keys a, b, c_plus, c_minus must be given together".into(),
                ))
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "r" => self.r = parse_float(value)?,
            "alpha1" => self.alpha1 = parse_float(value)?,
            "alpha2" => self.alpha2 = parse_float(value)?,
            "omega_c" => self.omega_c = parse_float(value)?,
            "epsilon1" => self.epsilon1 = parse_float(value)?,
            "epsilon2" => self.epsilon2 = parse_float(value)?,
            "t1_start" => self.windows[0].0 = parse_float(value)?,
            "t1_end" => self.windows[0].1 = parse_float(value)?,
            "t2_start" => self.windows[1].0 = parse_float(value)?,
            "t2_end" => self.windows[1].1 = parse_float(value)?,
            "grid_points" => {
                self.grid_points = value.parse().map_err(|_| format!("'{value}' is not a non-negative integer"))?
            }
            "t_max" => self.t_max = Some(parse_float(value)?),
            "convention" => self.convention = value.parse().map_err(|e: Error| e.to_string())?,
            "engine" => self.engine = value.parse().map_err(|e: Error| e.to_string())?,
            "out_path" => self.out_path = Some(PathBuf::from(value)),
            "starts" => {
                self.random_starts = value.parse().map_err(|_| format!("'{value}' is not a non-negative integer"))?
            }
            "seed" => self.seed = value.parse().map_err(|_| format!("'{value}' is not a non-negative integer"))?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Two back-to-back windows of length `dt`, the first starting at 0.
    pub fn set_sequential_windows(&mut self, dt: f64) {
        self.windows = [(0.0, dt), (dt, 2.0 * dt)];
    }

    pub fn standard_form(&self) -> Result<StandardFormParams, CliError> {
        Ok(match self.covariance {
            Some([a, b, cp, cm]) => StandardFormParams::new(a, b, cp, cm)?,
            None => StandardFormParams::epr(SqueezingParam::new(self.r)?),
        })
    }

    pub fn schedule(&self) -> Result<InteractionSchedule, CliError> {
        Ok(InteractionSchedule::new(self.windows[0], self.windows[1])?)
    }

    pub fn model(&self) -> Result<DephasingModel, CliError> {
        Ok(DephasingModel {
            covariance: self.standard_form()?,
            bath: OhmicBath::new(self.alpha1, self.alpha2, self.omega_c)?,
            schedule: self.schedule()?,
            qubits: QubitParams::new(self.epsilon1, self.epsilon2),
        })
    }

    pub fn effective_t_max(&self) -> Result<f64, CliError> {
        match self.t_max {
            Some(t) => Ok(t),
            None => Ok(T_MAX_FACTOR * self.schedule()?.last_end()),
        }
    }

    pub fn time_grid(&self) -> Result<Vec<f64>, CliError> {
        Ok(uniform_grid(self.effective_t_max()?, self.grid_points)?)
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig { random_starts: self.random_starts, seed: self.seed, ..OptimizerConfig::default() }
    }

    fn coherences(&self) -> Result<CoherenceTrajectory, CliError> {
        let model = self.model()?;
        Ok(CoherenceTrajectory::compute(&model, self.engine, self.time_grid()?)?)
    }
}

fn parse_float(value: &str) -> Result<f64, String> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{value}' is not a finite number")),
    }
}

/// C-style `%.16e`: 17 significant digits, signed two-digit exponent.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:.16e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Result of `validate`: human-readable `key=value` lines and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    pub report: String,
    pub passes: bool,
}

/// Checks the covariance against the uncertainty relation, the standard-form
/// predicate and the windows. Parse-level problems are errors; physics
/// failures are reported in the outcome.
pub fn cmd_validate(cfg: &ScenarioConfig) -> Result<ValidationOutcome, CliError> {
    let mut report = String::new();
    let mut passes = true;
    let mut line = |key: &str, value: String| {
        let _ = writeln!(report, "{key}={value}");
    };

    match cfg.standard_form().and_then(|p| Ok(make_standard_form(p)?)) {
        Ok(s) => {
            let rs = check_rs_uncertainty(&s);
            line("rs_min_eigenvalue", format_float(rs.min_eigenvalue));
            line("rs_passes", rs.passes.to_string());
            line("standard_form", is_standard_form(&s, 1e-12).to_string());
            passes &= rs.passes;
        }
        Err(e) => {
            line("covariance_error", e.to_string());
            passes = false;
        }
    }
    let windows = cfg.schedule();
    line("windows_valid", windows.is_ok().to_string());
    if let Err(e) = &windows {
        line("windows_error", e.to_string());
        passes = false;
    }
    let bath = OhmicBath::new(cfg.alpha1, cfg.alpha2, cfg.omega_c);
    line("bath_valid", bath.is_ok().to_string());
    passes &= bath.is_ok();
    let grid = windows.is_ok() && cfg.time_grid().is_ok();
    line("grid_valid", grid.to_string());
    passes &= grid;
    line("result", if passes { "pass" } else { "fail" }.into());
    Ok(ValidationOutcome { report, passes })
}

const FACTOR_NAMES: [&str; 6] = ["kappa1", "kappa2", "kappa1_tilde", "kappa2_tilde", "kappa12", "lambda12"];

fn factors(c: &CoherenceSet) -> [crate::C64; 6] {
    [c.kappa1, c.kappa2, c.kappa1_tilde, c.kappa2_tilde, c.kappa12, c.lambda12]
}

/// Coherence-factor trajectory as CSV text.
pub fn cmd_evolve(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let coh = cfg.coherences()?;
    let mut out = String::from(
        "t,abs_kappa1,abs_kappa2,abs_kappa12,abs_lambda12,abs_kappa12_sq,abs_lambda12_sq",
    );
    for name in FACTOR_NAMES {
        let _ = write!(out, ",re_{name},im_{name}");
    }
    out.push('\n');
    for (t, c) in coh.times().iter().zip(coh.sets()) {
        let mut row = vec![*t, c.kappa1.norm(), c.kappa2.norm(), c.kappa12.norm(), c.lambda12.norm()];
        row.push(c.kappa12.norm_sqr());
        row.push(c.lambda12.norm_sqr());
        for z in factors(c) {
            row.push(z.re);
            row.push(z.im);
        }
        push_row(&mut out, &row);
    }
    Ok(out)
}

fn push_row(out: &mut String, row: &[f64]) {
    let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Measure summary: Bell pairs and optimizer, both conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSummary {
    pub text: String,
    pub converged: bool,
}

pub fn cmd_measure(cfg: &ScenarioConfig) -> Result<MeasureSummary, CliError> {
    let coh = cfg.coherences()?;
    let mut text = String::new();
    let mut line = |key: &str, value: String| {
        let _ = writeln!(text, "{key}={value}");
    };
    line("engine", cfg.engine.to_string());
    line("grid_points", cfg.grid_points.to_string());
    line("t_max", format_float(cfg.effective_t_max()?));
    line("headline_convention", cfg.convention.to_string());

    let mut converged = true;
    for conv in [Convention::Squared, Convention::Linear] {
        for (label, sector) in [("I", BellSector::I), ("II", BellSector::II)] {
            let n = backflow_integral(&pair_trajectory(&StatePair::bell(sector), &coh, conv)?);
            line(&format!("N_bell_{label}_{conv}"), format_float(n));
        }
        let best = maximize_measure(&coh, conv, &cfg.optimizer())?;
        line(&format!("N_opt_{conv}"), format_float(best.n_value));
        line(&format!("opt_converged_{conv}"), best.converged.to_string());
        for (name, state) in [("first", best.pair.first), ("second", best.pair.second)] {
            let amps: Vec<String> = state
                .to_vector()
                .iter()
                .flat_map(|z| [format_float(z.re), format_float(z.im)])
                .collect();
            line(&format!("opt_pair_{name}_{conv}"), amps.join(" "));
        }
        converged &= best.converged;
    }
    if !converged {
        line("warning", "optimizer budget exhausted before convergence".into());
    }
    Ok(MeasureSummary { text, converged })
}

/// Writes one `|Λ₁₂(t)|²` CSV per squeezing value plus a summary of the
/// Bell-pair measure, and returns the paths written.
pub fn cmd_fig1(out_dir: &Path, grid_points: usize) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let mut written = Vec::new();
    let mut summary = String::from("r,N_squared,N_linear\n");
    for r in FIG1_SQUEEZING {
        let cfg = ScenarioConfig { r, grid_points, ..ScenarioConfig::default() };
        let coh = cfg.coherences()?;
        let pair = StatePair::bell(BellSector::II);
        let lin = pair_trajectory(&pair, &coh, Convention::Linear)?;
        let sq = pair_trajectory(&pair, &coh, Convention::Squared)?;

        let mut csv = String::from("t,abs_lambda12_sq,abs_lambda12\n");
        for ((t, s), l) in lin.times().iter().zip(sq.values()).zip(lin.values()) {
            push_row(&mut csv, &[*t, *s, *l]);
        }
        let path = out_dir.join(format!("fig1_r{r}.csv"));
        std::fs::write(&path, csv).map_err(|e| io_error(&path, e))?;
        written.push(path);
        push_row(&mut summary, &[r, backflow_integral(&sq), backflow_integral(&lin)]);
    }
    let path = out_dir.join("fig1_summary.csv");
    std::fs::write(&path, summary).map_err(|e| io_error(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Writes `text` to `path`, or to stdout when no path is set.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
