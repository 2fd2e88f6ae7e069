//! Physical parameters of the atom–cavity system, the effective Raman
//! couplings they produce, and the validity-regime checks.
//!
//! All rates are angular (rad/s). Conversion from the `2π × f` form used in
//! config files happens at ingestion (see [`crate::config`]).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Everything an experimenter can set: trap, laser, atom and cavity constants.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Trap frequency ν.
    pub nu: f64,
    /// Atomic linewidth γ.
    pub gamma: f64,
    /// Laser–atom detuning Δ (signed).
    pub delta: f64,
    /// Laser Rabi frequency Ω.
    pub omega_rabi: f64,
    /// Cavity field (amplitude) decay rate κ.
    pub kappa: f64,
    /// Vacuum Rabi frequencies of the two cavity modes.
    pub g1: Complex64,
    pub g2: Complex64,
    /// Field-gradient scalars of the cavity modes at the trap centre.
    pub alpha1: f64,
    pub alpha2: f64,
    /// Angle between trap axis and laser wave vector.
    pub theta_l: f64,
    /// Angle between trap axis and cavity wave vector.
    pub theta_c: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Optical wavenumber k, 1/m.
    pub wavenumber: f64,
    /// Initial mean thermal phonon number.
    pub nbar_motion: f64,
    /// Laser pulse length T in seconds; `None` means T_π.
    pub pulse_length: Option<f64>,
}

impl PhysicalParams {
    /// Indium ion example: ν = 2π·3 MHz, γ = 2π·360 kHz, Ω = 2π·18 MHz,
    /// Δ = −2π·60 MHz, g = 2π·500 kHz, κ = 2π·1 kHz, λ = 230.6 nm, M = 115 u.
    ///
    /// The detuning is negative so that |χ₂| > |χ₁| for this geometry.
    pub fn indium() -> Self {
        let two_pi = 2.0 * PI;
        let g = Complex64::new(two_pi * 500e3, 0.0);
        Self {
            nu: two_pi * 3e6,
            gamma: two_pi * 360e3,
            delta: -two_pi * 60e6,
            omega_rabi: two_pi * 18e6,
            kappa: two_pi * 1e3,
            g1: g,
            g2: g,
            alpha1: 0.0,
            alpha2: 0.0,
            theta_l: 0.0,
            theta_c: FRAC_PI_2,
            mass: 115.0 * ATOMIC_MASS_UNIT,
            wavenumber: two_pi / 230.6e-9,
            nbar_motion: 0.0,
            pulse_length: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_rabi.is_finite() && self.omega_rabi > 0.0) {
            return Err(invalid("omega_rabi", format!("must be finite and > 0, got {}", self.omega_rabi)));
        }
        self.validate_geometry()
    }

    /// All invariants except Ω > 0; the couplings are linear in Ω and a dark
    /// laser simply gives χ₁ = χ₂ = 0.
    fn validate_geometry(&self) -> Result<()> {
        let positive = [
            ("nu", self.nu),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("mass", self.mass),
            ("wavenumber", self.wavenumber),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.omega_rabi.is_finite() && self.omega_rabi >= 0.0) {
            return Err(invalid("omega_rabi", "must be finite and >= 0"));
        }
        let finite = [
            ("delta", self.delta),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("theta_l", self.theta_l),
            ("theta_c", self.theta_c),
            ("g1", self.g1.norm()),
            ("g2", self.g2.norm()),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(self.nbar_motion.is_finite() && self.nbar_motion >= 0.0) {
            return Err(invalid("nbar_motion", "must be >= 0"));
        }
        if let Some(t) = self.pulse_length {
            if !(t.is_finite() && t > 0.0) {
                return Err(invalid("pulse_length_T", "must be > 0 when given"));
            }
        }
        for (label, d) in [("delta - nu", self.delta - self.nu), ("delta + nu", self.delta + self.nu)] {
            if d.abs() < self.gamma {
                return Err(invalid(
                    "delta",
                    format!("|{label}| = {:.3e} rad/s is inside the atomic linewidth (sideband pole)", d.abs()),
                ));
            }
        }
        Ok(())
    }
}

/// Lamb-Dicke parameter η = √(ħk²/(2Mν)).
pub fn lamb_dicke(mass: f64, wavenumber: f64, nu: f64) -> Result<f64> {
    for (name, v) in [("mass", mass), ("wavenumber", wavenumber), ("nu", nu)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(name, format!("must be finite and > 0, got {v}")));
        }
    }
    Ok((HBAR * wavenumber * wavenumber / (2.0 * mass * nu)).sqrt())
}

/// Θ, r, β and the quantities derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub theta_rate: Option<f64>,
    pub r: f64,
    pub beta: f64,
    pub t_pi: Option<f64>,
    pub n_mean: Option<f64>,
}

pub fn derived_rates(chi1: Complex64, chi2: Complex64) -> Result<DerivedRates> {
    let a1 = chi1.norm();
    let a2 = chi2.norm();
    if !(a1 > 0.0) || !a1.is_finite() || !a2.is_finite() {
        return Err(Error::DegenerateCoupling);
    }
    let r = a2 / a1;
    let beta = chi1.arg() + chi2.arg();
    if r > 1.0 {
        // factorised to avoid cancellation near r = 1
        let theta = ((a2 - a1) * (a2 + a1)).sqrt();
        let r2 = r * r;
        Ok(DerivedRates {
            theta_rate: Some(theta),
            r,
            beta,
            t_pi: Some(PI / theta),
            n_mean: Some(4.0 * r2 / ((1.0 - r2) * (1.0 - r2))),
        })
    } else {
        Ok(DerivedRates {
            theta_rate: None,
            r,
            beta,
            t_pi: None,
            n_mean: None,
        })
    }
}

/// Effective Raman couplings χ₁ (pair creation, mode 1 + phonon) and
/// χ₂ (exchange, mode 2 ↔ phonon), with everything derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub chi1: Complex64,
    pub chi2: Complex64,
    /// Lamb-Dicke parameter; absent when the couplings were given directly.
    pub eta: Option<f64>,
    pub theta_rate: Option<f64>,
    /// |χ₂/χ₁|; NaN only when both couplings vanish.
    pub r: f64,
    pub beta: f64,
    pub t_pi: Option<f64>,
    pub n_mean: Option<f64>,
}

impl Couplings {
    pub fn from_chi(chi1: Complex64, chi2: Complex64, eta: Option<f64>) -> Result<Self> {
        let d = derived_rates(chi1, chi2)?;
        Ok(Self {
            chi1,
            chi2,
            eta,
            theta_rate: d.theta_rate,
            r: d.r,
            beta: d.beta,
            t_pi: d.t_pi,
            n_mean: d.n_mean,
        })
    }

    /// Real couplings χ₁ = 1, χ₂ = r in arbitrary rate units.
    pub fn unit_ratio(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("r", format!("must be finite and > 0, got {r}")));
        }
        Self::from_chi(Complex64::new(1.0, 0.0), Complex64::new(r, 0.0), None)
    }

    /// Keeps χ₁ and the phase of χ₂ but rescales |χ₂| so that |χ₂/χ₁| = r.
    pub fn with_ratio(&self, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("r", format!("must be finite and > 0, got {r}")));
        }
        let chi2 = Complex64::from_polar(r * self.chi1.norm(), self.chi2.arg());
        Self::from_chi(self.chi1, chi2, self.eta)
    }

    /// Requires r > 1 and returns (Θ, T_π).
    pub fn period(&self) -> Result<(f64, f64)> {
        match (self.theta_rate, self.t_pi) {
            (Some(th), Some(tp)) => Ok((th, tp)),
            _ => Err(Error::ProtocolUndefined { r: self.r }),
        }
    }
}

/// χ₁, χ₂ from the laser and cavity sideband amplitudes.
pub fn coupling_constants(params: &PhysicalParams) -> Result<Couplings> {
    params.validate_geometry()?;
    let eta = lamb_dicke(params.mass, params.wavenumber, params.nu)?;
    let half_gamma = 0.5 * params.gamma;
    let denom = |offset: f64, what: &'static str| -> Result<Complex64> {
        let d = Complex64::new(params.delta + offset, half_gamma);
        if d.norm() == 0.0 {
            return Err(Error::DivisionByZero(what));
        }
        Ok(d)
    };
    let red = denom(-params.nu, "delta - nu")?;
    let blue = denom(params.nu, "delta + nu")?;
    let carrier = denom(0.0, "delta")?;

    let cos_l = params.theta_l.cos();
    let cos_c = params.theta_c.cos();
    let amp = |g: Complex64, sideband: Complex64, alpha: f64| {
        eta * g.conj() * params.omega_rabi * (cos_l / sideband - alpha * cos_c / carrier)
    };
    let chi1 = amp(params.g1, red, params.alpha1);
    let chi2 = amp(params.g2, blue, params.alpha2);
    if chi1.norm() == 0.0 {
        // Ω = 0 or a fully cancelled geometry: report zero couplings without rates.
        return Ok(Couplings {
            chi1,
            chi2,
            eta: Some(eta),
            theta_rate: None,
            r: f64::NAN,
            beta: chi2.arg(),
            t_pi: None,
            n_mean: None,
        });
    }
    Couplings::from_chi(chi1, chi2, Some(eta))
}

/// One `left ≥ ratio · right` comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: &'static str,
    pub left: f64,
    pub right: f64,
    /// left / right.
    pub margin: f64,
    /// The factor the margin had to reach.
    pub required: f64,
    pub pass: bool,
}

impl Constraint {
    fn new(name: &'static str, left: f64, right: f64, required: f64) -> Self {
        let margin = left / right;
        Self {
            name,
            left,
            right,
            margin,
            required,
            pass: margin >= required,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub ratio: f64,
    pub soft_ratio: f64,
    pub hard: Vec<Constraint>,
    /// Checks the bundled example is known to satisfy only loosely; they do
    /// not affect [`RegimeReport::pass`].
    pub soft: Vec<Constraint>,
}

impl RegimeReport {
    pub fn pass(&self) -> bool {
        self.hard.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Constraint> {
        self.hard.iter().chain(&self.soft).find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.hard.iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }
}

impl fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "regime check (>> means factor {}, soft factor {})",
            self.ratio, self.soft_ratio
        )?;
        writeln!(
            f,
            "  {:<24} {:>14} {:>14} {:>12} {:>8}  {}",
            "constraint", "left", "right", "margin", "need", "status"
        )?;
        let row = |f: &mut fmt::Formatter<'_>, c: &Constraint, tag: &str| {
            writeln!(
                f,
                "  {:<24} {:>14.6e} {:>14.6e} {:>12.4} {:>8.3}  {}{}",
                c.name,
                c.left,
                c.right,
                c.margin,
                c.required,
                if c.pass { "ok" } else { "FAIL" },
                tag
            )
        };
        for c in &self.hard {
            row(f, c, "")?;
        }
        for c in &self.soft {
            row(f, c, " (soft)")?;
        }
        write!(f, "verdict: {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

pub const DEFAULT_RATIO: f64 = 10.0;
pub const DEFAULT_SOFT_RATIO: f64 = 2.0;

/// Evaluates every approximation the effective model rests on.
///
/// `ratio` quantifies "≫"; `soft_ratio` is used for κT_π ≪ 1 only.
pub fn validate_regime(
    params: &PhysicalParams,
    couplings: &Couplings,
    ratio: f64,
    soft_ratio: f64,
) -> RegimeReport {
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    let abs_delta = params.delta.abs();
    let delta2 = params.delta * params.delta;

    hard.push(Constraint::new("|chi2| > |chi1|", couplings.chi2.norm(), couplings.chi1.norm(), 1.0 + f64::EPSILON));
    hard.push(Constraint::new("|Delta| >> nu", abs_delta, params.nu, ratio));
    hard.push(Constraint::new("|Delta| >> gamma", abs_delta, params.gamma, ratio));
    hard.push(Constraint::new(
        "kappa >> gamma g1^2/D^2",
        params.kappa,
        params.gamma * params.g1.norm_sqr() / delta2,
        ratio,
    ));
    hard.push(Constraint::new(
        "kappa >> gamma g2^2/D^2",
        params.kappa,
        params.gamma * params.g2.norm_sqr() / delta2,
        ratio,
    ));
    let eta = couplings.eta.unwrap_or(f64::NAN);
    hard.push(Constraint::new("eta << 1", 1.0, eta, ratio));

    if let Some(theta) = couplings.theta_rate {
        let t_pi = PI / theta;
        let pulse = params.pulse_length.unwrap_or(t_pi);
        hard.push(Constraint::new("nu >> Theta", params.nu, theta, ratio));
        hard.push(Constraint::new("Theta >> kappa", theta, params.kappa, ratio));
        hard.push(Constraint::new(
            "Theta >> eta^2 g W^2/D^2",
            theta,
            eta * eta * params.gamma * params.omega_rabi * params.omega_rabi / delta2,
            ratio,
        ));
        hard.push(Constraint::new("nu T >> 1", params.nu * pulse, 1.0, ratio));
        soft.push(Constraint::new("kappa T_pi << 1", 1.0, params.kappa * t_pi, soft_ratio));
    }

    RegimeReport {
        ratio,
        soft_ratio,
        hard,
        soft,
    }
}
