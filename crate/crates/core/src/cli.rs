//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage / parse / IO error, 2 physics-level
//! failure (regime check failed, oracle mismatch, truncation).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::Error;
use crate::params::{coupling_constants, validate_regime, Couplings, PhysicalParams};
use crate::protocol::{self, HomodyneSettings, SimultaneousOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PHYSICS: i32 = 2;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "entpulse", version, about = "Entangled light pulses from a cavity-coupled trapped ion")]
pub struct Cli {
    /// Run configuration (defaults to the bundled indium example).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for data files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Factor used for ">>" in the regime check.
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    /// Run even when hard regime constraints fail.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the approximations behind the effective model.
    Validate,
    /// Print the effective couplings and derived rates.
    Couplings,
    /// Drive both sidebands for T_pi and report the cavity state.
    Simulate {
        /// Rescale |chi2| to this multiple of |chi1|.
        #[arg(long)]
        r: Option<f64>,
        /// Initial thermal phonon number.
        #[arg(long)]
        nbar: Option<f64>,
    },
    /// Homodyne difference-current noise C(t) for several r.
    Fig3 {
        /// Comma-separated r values.
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
    },
    /// Entangled subsequent pulses with the motion as memory.
    Sequential {
        /// |chi1| t1 of the first pulse.
        #[arg(long)]
        squeeze: Option<f64>,
        /// kappa T12 (`inf` for complete extraction).
        #[arg(long)]
        kappa_t12: Option<f64>,
        /// |chi2| t2 of the exchange pulse.
        #[arg(long)]
        swap_area: Option<f64>,
    },
    /// Compare the Gaussian engine against the Fock-space oracle.
    OracleCheck {
        #[arg(long)]
        r: Option<f64>,
        /// Truncation `d1,d2,db`.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Physics(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RegimeViolation(_) | Error::Truncation { .. } | Error::Unphysical(_) => Failure::Physics(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A report plus the exit code it implies.
struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{e}");
            return code;
        }
    };
    let _ = writeln!(err, "entpulse {}", env!("CARGO_PKG_VERSION"));
    match execute(&cli) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            outcome.code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Physics(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_PHYSICS
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::indium()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = load_config(cli.config.as_deref())?;
    let ratio = cli.ratio.unwrap_or(cfg.ratio);
    let (name, outcome) = match &cli.command {
        Command::Validate => ("validate", cmd_validate(&cfg, ratio)?),
        Command::Couplings => ("couplings", cmd_couplings(&cfg)?),
        Command::Simulate { r, nbar } => {
            let opts = SimultaneousOptions {
                ratio,
                soft_ratio: cfg.soft_ratio,
                force: cli.force,
                r_override: r.or(cfg.r_override),
                decay_during_drive: false,
            };
            ("simulate", cmd_simulate(&cfg, &opts, *nbar)?)
        }
        Command::Fig3 { r } => {
            let r_list = if r.is_empty() { cfg.r_list.clone() } else { r.clone() };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            return cmd_fig3(&r_list, &cfg.homodyne, &dir);
        }
        Command::Sequential {
            squeeze,
            kappa_t12,
            swap_area,
        } => (
            "sequential",
            cmd_sequential(
                &cfg,
                squeeze.unwrap_or(cfg.seq_squeeze),
                kappa_t12.unwrap_or(cfg.seq_kappa_t12),
                swap_area.unwrap_or(cfg.seq_swap_area),
            )?,
        ),
        Command::OracleCheck { r, dims } => {
            let dims = match dims.as_deref() {
                Some(&[a, b, c]) => Some([a, b, c]),
                Some(_) => return Err(Failure::Usage("--dims takes exactly three values d1,d2,db".into())),
                None => cfg.oracle_dims,
            };
            ("oracle-check", cmd_oracle_check(r.unwrap_or(cfg.oracle_r), dims, cfg.oracle_tol)?)
        }
    };
    if let Some(dir) = &cli.out {
        write_file(&dir.join(format!("{name}.txt")), &outcome.text)?;
    }
    Ok(outcome)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Failure::Usage(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn physical(cfg: &RunConfig) -> Result<&PhysicalParams, Failure> {
    let p = cfg.params()?;
    p.validate()?;
    Ok(p)
}

fn hz(rate: f64) -> f64 {
    rate / TWO_PI
}

fn couplings_text(c: &Couplings, kappa: f64) -> String {
    let mut s = String::new();
    if let Some(eta) = c.eta {
        let _ = writeln!(s, "eta            = {eta:.6}");
    }
    let _ = writeln!(
        s,
        "chi1           = 2pi x {:.6e} Hz, phase {:.6}",
        hz(c.chi1.norm()),
        c.chi1.arg()
    );
    let _ = writeln!(
        s,
        "chi2           = 2pi x {:.6e} Hz, phase {:.6}",
        hz(c.chi2.norm()),
        c.chi2.arg()
    );
    let _ = writeln!(s, "r = |chi2/chi1| = {:.6}", c.r);
    let _ = writeln!(s, "beta           = {:.6}", c.beta);
    match (c.theta_rate, c.t_pi, c.n_mean) {
        (Some(th), Some(tp), Some(n)) => {
            let _ = writeln!(s, "Theta          = 2pi x {:.6e} Hz", hz(th));
            let _ = writeln!(s, "T_pi           = {:.6e} s ({:.3} us)", tp, tp * 1e6);
            let _ = writeln!(s, "<n> per mode   = {n:.6}");
            let _ = writeln!(s, "Theta / kappa  = {:.4}", th / kappa);
            let _ = writeln!(s, "kappa T_pi     = {:.4}", kappa * tp);
        }
        _ => {
            let _ = writeln!(s, "Theta          = undefined (r <= 1)");
        }
    }
    s
}

fn cmd_couplings(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let p = cfg.params()?;
    let mut c = coupling_constants(p)?;
    if let Some(r) = cfg.r_override {
        c = c.with_ratio(r)?;
    }
    Ok(Outcome::ok(couplings_text(&c, p.kappa)))
}

fn cmd_validate(cfg: &RunConfig, ratio: f64) -> Result<Outcome, Failure> {
    let p = physical(cfg)?;
    let mut c = coupling_constants(p)?;
    if let Some(r) = cfg.r_override {
        c = c.with_ratio(r)?;
    }
    let report = validate_regime(p, &c, ratio, cfg.soft_ratio);
    let mut text = couplings_text(&c, p.kappa);
    let _ = writeln!(
        text,
        "gamma g1^2/Delta^2 = 2pi x {:.4} Hz",
        hz(p.gamma * p.g1.norm_sqr() / (p.delta * p.delta))
    );
    let _ = writeln!(text, "{report}");
    Ok(Outcome {
        text,
        code: if report.pass() { EXIT_OK } else { EXIT_PHYSICS },
    })
}

fn cmd_simulate(cfg: &RunConfig, opts: &SimultaneousOptions, nbar: Option<f64>) -> Result<Outcome, Failure> {
    let mut p = physical(cfg)?.clone();
    if let Some(n) = nbar {
        p.nbar_motion = n;
    }
    let run = protocol::run_simultaneous(&p, opts)?;
    let d = &run.diagnostics;
    let mut text = couplings_text(&run.couplings, p.kappa);
    if let Some(report) = &run.regime {
        if !report.pass() {
            let _ = writeln!(text, "warning: regime check failed ({}), forced", report.failures().join(", "));
        }
    }
    let _ = writeln!(text, "pulse length   = {:.6e} s", run.duration);
    let _ = writeln!(
        text,
        "mean photons per mode: cav1 = {:.4}, cav2 = {:.4}",
        d.mean_photons_cav1, d.mean_photons_cav2
    );
    let _ = writeln!(text, "mean phonons   = {:.6}", d.mean_photons_motion);
    let _ = writeln!(text, "E_N(cav1|cav2) = {:.6}", d.log_negativity);
    let _ = writeln!(text, "Var(X1 - X2)   = {:.6e}", d.epr_x);
    let _ = writeln!(text, "Var(P1 + P2)   = {:.6e}", d.epr_p);
    let _ = writeln!(text, "Var(q1 - q2) at theta1 = -beta = {:.6e}", d.epr_matched);
    let _ = writeln!(text, "motion decorrelation norm = {:.3e}", d.motion_decorrelation);
    let _ = writeln!(text, "deviation from tmss(r, beta) = {:.3e}", d.tmss_deviation);
    Ok(Outcome::ok(text))
}

fn cmd_fig3(r_list: &[f64], settings: &HomodyneSettings, dir: &Path) -> Result<Outcome, Failure> {
    let traces = protocol::fig3_sweep(r_list, settings)?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let mut text = String::new();
    for tr in &traces {
        let path = dir.join(format!("fig3_r{}.csv", tr.r));
        write_file(&path, &tr.to_csv())?;
        let (t_min, c_min) = tr.min();
        let crossing = tr
            .first_crossing_above(0.5)
            .map_or_else(|| "none".to_string(), |t| format!("{t:.4}"));
        let _ = writeln!(
            text,
            "r = {}: min C = {:.6} at kappa t = {:.2}; C back above 0.5 at kappa t = {}; {}",
            tr.r,
            c_min,
            t_min,
            crossing,
            path.display()
        );
    }
    Ok(Outcome::ok(text))
}

fn cmd_sequential(cfg: &RunConfig, squeeze: f64, kappa_t12: f64, swap_area: f64) -> Result<Outcome, Failure> {
    let p = physical(cfg)?;
    let c = coupling_constants(p)?;
    if c.chi1.norm() == 0.0 {
        return Err(Failure::Usage("sequential protocol needs chi1 != 0".into()));
    }
    let t1 = squeeze / c.chi1.norm();
    let delay = kappa_t12 / p.kappa;
    let res = protocol::run_sequential(p, t1, delay, Some(swap_area))?;
    let mut text = String::new();
    let _ = writeln!(text, "t1             = {t1:.6e} s (|chi1| t1 = {:.6})", res.squeeze);
    let _ = writeln!(text, "kappa T12      = {kappa_t12}");
    let _ = writeln!(text, "transmittance  = {:.12}", res.transmittance);
    let _ = writeln!(text, "swap area      = {:.6}", res.swap_area);
    let _ = writeln!(text, "E_N(motion|cavity) after first pulse = {:.9}", res.stage_a_log_negativity);
    let _ = writeln!(text, "E_N(pulse1|cavity) after swap        = {:.9}", res.final_log_negativity);
    let _ = writeln!(text, "E_N(pulse1|motion) after swap        = {:.9}", res.pulse1_motion_log_negativity);
    let _ = writeln!(text, "motion decorrelation norm = {:.3e}", res.motion_decorrelation);
    Ok(Outcome::ok(text))
}

fn cmd_oracle_check(r: f64, dims: Option<[usize; 3]>, leakage_tol: f64) -> Result<Outcome, Failure> {
    let cmp = protocol::oracle_check(r, dims, leakage_tol)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "r = {}, dims = {:?}, active subspace = {}, steps = {}, max leakage = {:.3e}",
        cmp.r, cmp.dims, cmp.propagation.active_dim, cmp.propagation.steps, cmp.propagation.max_leakage
    );
    let _ = writeln!(text, "{:<14} {:>22} {:>22} {:>10}", "observable", "gaussian", "fock", "|diff|");
    for row in &cmp.rows {
        let _ = writeln!(
            text,
            "{:<14} {:>22.15e} {:>22.15e} {:>10.2e}",
            row.observable,
            row.gaussian,
            row.fock,
            row.diff()
        );
    }
    let pass = cmp.max_diff() <= ORACLE_TOL;
    let _ = writeln!(
        text,
        "max |diff| = {:.3e} (tolerance {ORACLE_TOL:.0e}): {}",
        cmp.max_diff(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome {
        text,
        code: if pass { EXIT_OK } else { EXIT_PHYSICS },
    })
}
