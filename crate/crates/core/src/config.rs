//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment. Frequencies are linear (`_hz`
//! keys) and are multiplied by 2π on ingestion. Unknown or repeated keys are
//! errors.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `nu_hz`, `gamma_hz`, `delta_hz`, `omega_rabi_hz`, `kappa_hz` | ν, γ, Δ, Ω, κ | required |
//! | `g1_hz`, `g2_hz` | vacuum Rabi frequencies | required |
//! | `g1_phase`, `g2_phase` | phases of g₁, g₂ (rad) | 0 |
//! | `mass_u` or `mass_kg` | ion mass | required |
//! | `wavelength_nm` or `wavenumber` (1/m) | optical wavelength | required |
//! | `alpha1`, `alpha2` | field-gradient scalars | 0 |
//! | `theta_l`, `theta_c` | laser / cavity angle to the trap axis (rad) | 0, π/2 |
//! | `nbar_motion` | initial thermal phonon number | 0 |
//! | `pulse_length_s` | drive length | T_π |
//! | `much_greater_ratio`, `soft_ratio` | factors for ≫ and ≪ | 10, 2 |
//! | `r_override` | rescale |χ₂| to this multiple of |χ₁| | none |
//! | `theta1`, `theta2` | local-oscillator phases (rad) | 0 |
//! | `kappa_dt` | detection bin κ·δt | 0.1 |
//! | `t_max`, `t_step` | C(t) grid in units of 1/κ | 8, 0.02 |
//! | `r_list` | comma-separated r values for `fig3` | 1.8, 1.5, 1.3, 1.1, 1.05 |
//! | `oracle_r`, `oracle_dims`, `oracle_tol` | Fock comparison point, dims `d1,d2,db`, leakage tolerance | 3, automatic, 1e-10 |
//! | `seq_squeeze` | |χ₁|·t₁ of the first sequential pulse | 1 |
//! | `seq_kappa_t12` | κ·T₁₂ (`inf` for complete extraction) | 10 |
//! | `seq_swap_area` | |χ₂|·t₂ | π/2 |

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::Dims;
use crate::params::{PhysicalParams, ATOMIC_MASS_UNIT, DEFAULT_RATIO, DEFAULT_SOFT_RATIO};
use crate::protocol::{HomodyneSettings, FIG3_R_VALUES};

/// The indium-ion example.
pub const INDIUM_CFG: &str = include_str!("../configs/indium.cfg");

const PHYSICAL_REQUIRED: [&str; 7] = ["nu_hz", "gamma_hz", "delta_hz", "omega_rabi_hz", "kappa_hz", "g1_hz", "g2_hz"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    params: std::result::Result<PhysicalParams, String>,
    pub ratio: f64,
    pub soft_ratio: f64,
    pub r_override: Option<f64>,
    pub homodyne: HomodyneSettings,
    pub r_list: Vec<f64>,
    pub oracle_r: f64,
    pub oracle_dims: Option<Dims>,
    pub oracle_tol: f64,
    pub seq_squeeze: f64,
    pub seq_kappa_t12: f64,
    pub seq_swap_area: f64,
}

#[derive(Default)]
struct Raw {
    values: Vec<(String, String, usize)>,
}

impl Raw {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let i = self.values.iter().position(|(k, _, _)| k == key)?;
        let (_, v, line) = self.values.remove(i);
        Some((v, line))
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => parse_float(&v, line, key).map(Some),
        }
    }

    fn float_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    fn list(&mut self, key: &str) -> Result<Option<(Vec<f64>, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => {
                let items = v
                    .split(',')
                    .map(|s| parse_float(s.trim(), line, key))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Some((items, line)))
            }
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.values.iter().find(|(k, _, _)| k == key).map(|x| x.2)
    }
}

fn parse_float(v: &str, line: usize, key: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| Error::Config {
        line,
        msg: format!("`{key}`: expected a number, got `{v}`"),
    })
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

impl RunConfig {
    pub fn indium() -> Self {
        Self::parse(INDIUM_CFG).expect("bundled config parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Raw::default();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| config_err(n, format!("expected `key = value`, got `{body}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(config_err(n, format!("expected `key = value`, got `{body}`")));
            }
            if !seen.insert(k.to_string()) {
                return Err(config_err(n, format!("duplicate key `{k}`")));
            }
            raw.values.push((k.to_string(), v.to_string(), n));
        }

        let params = physical(&mut raw)?;

        let ratio = raw.float_or("much_greater_ratio", DEFAULT_RATIO)?;
        let soft_ratio = raw.float_or("soft_ratio", DEFAULT_SOFT_RATIO)?;
        let r_override = raw.float("r_override")?;
        let defaults = HomodyneSettings::default();
        let t_max = raw.float_or("t_max", 8.0)?;
        let t_step = raw.float_or("t_step", 0.02)?;
        if !(t_step > 0.0 && t_max >= 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_step",
                reason: format!("need t_step > 0 and t_max >= 0, got {t_step}, {t_max}"),
            });
        }
        let homodyne = HomodyneSettings {
            theta1: raw.float_or("theta1", defaults.theta1)?,
            theta2: raw.float_or("theta2", defaults.theta2)?,
            kappa_dt: raw.float_or("kappa_dt", defaults.kappa_dt)?,
            t_grid: HomodyneSettings::uniform_grid(t_max, t_step),
        };
        let r_list = raw.list("r_list")?.map(|(v, _)| v).unwrap_or_else(|| FIG3_R_VALUES.to_vec());
        let oracle_r = raw.float_or("oracle_r", 3.0)?;
        let oracle_dims = match raw.list("oracle_dims")? {
            None => None,
            Some((v, line)) => {
                if v.len() != 3 || v.iter().any(|d| d.fract() != 0.0 || *d < 2.0) {
                    return Err(config_err(line, "`oracle_dims`: expected three integers >= 2"));
                }
                Some([v[0] as usize, v[1] as usize, v[2] as usize])
            }
        };
        let oracle_tol = raw.float_or("oracle_tol", 1e-10)?;
        let seq_squeeze = raw.float_or("seq_squeeze", 1.0)?;
        let seq_kappa_t12 = raw.float_or("seq_kappa_t12", 10.0)?;
        let seq_swap_area = raw.float_or("seq_swap_area", FRAC_PI_2)?;

        if let Some((k, _, line)) = raw.values.first() {
            return Err(config_err(*line, format!("unknown key `{k}`")));
        }
        homodyne.validate()?;
        Ok(Self {
            params,
            ratio,
            soft_ratio,
            r_override,
            homodyne,
            r_list,
            oracle_r,
            oracle_dims,
            oracle_tol,
            seq_squeeze,
            seq_kappa_t12,
            seq_swap_area,
        })
    }

    /// The physical parameters, or an error naming the missing keys.
    pub fn params(&self) -> Result<&PhysicalParams> {
        self.params.as_ref().map_err(|keys| Error::MissingKeys(keys.clone()))
    }

    pub fn params_mut(&mut self) -> Result<&mut PhysicalParams> {
        self.params.as_mut().map_err(|keys| Error::MissingKeys(keys.clone()))
    }
}

/// Missing physical keys are only an error once a subcommand asks for them;
/// malformed values are reported immediately.
fn physical(raw: &mut Raw) -> Result<std::result::Result<PhysicalParams, String>> {
    let two_pi = 2.0 * PI;
    let mut missing: Vec<&str> = PHYSICAL_REQUIRED.iter().copied().filter(|k| raw.line_of(k).is_none()).collect();

    let hz = |raw: &mut Raw, key: &str| -> Result<f64> { Ok(raw.float(key)?.unwrap_or(f64::NAN) * two_pi) };
    let nu = hz(raw, "nu_hz")?;
    let gamma = hz(raw, "gamma_hz")?;
    let delta = hz(raw, "delta_hz")?;
    let omega_rabi = hz(raw, "omega_rabi_hz")?;
    let kappa = hz(raw, "kappa_hz")?;
    let g1 = hz(raw, "g1_hz")?;
    let g2 = hz(raw, "g2_hz")?;
    let g1_phase = raw.float_or("g1_phase", 0.0)?;
    let g2_phase = raw.float_or("g2_phase", 0.0)?;

    let either = |raw: &mut Raw, a: &str, b: &str| -> Result<Option<(bool, f64)>> {
        match (raw.line_of(a), raw.line_of(b)) {
            (Some(_), Some(line)) => Err(config_err(line, format!("give only one of `{a}` and `{b}`"))),
            (Some(_), None) => Ok(raw.float(a)?.map(|v| (true, v))),
            (None, Some(_)) => Ok(raw.float(b)?.map(|v| (false, v))),
            (None, None) => Ok(None),
        }
    };
    let mass = match either(raw, "mass_u", "mass_kg")? {
        Some((true, u)) => u * ATOMIC_MASS_UNIT,
        Some((false, kg)) => kg,
        None => {
            missing.push("mass_u");
            f64::NAN
        }
    };
    let wavenumber = match either(raw, "wavelength_nm", "wavenumber")? {
        Some((true, nm)) => two_pi / (nm * 1e-9),
        Some((false, k)) => k,
        None => {
            missing.push("wavelength_nm");
            f64::NAN
        }
    };
    let params = PhysicalParams {
        nu,
        gamma,
        delta,
        omega_rabi,
        kappa,
        g1: Complex64::from_polar(g1, g1_phase),
        g2: Complex64::from_polar(g2, g2_phase),
        alpha1: raw.float_or("alpha1", 0.0)?,
        alpha2: raw.float_or("alpha2", 0.0)?,
        theta_l: raw.float_or("theta_l", 0.0)?,
        theta_c: raw.float_or("theta_c", FRAC_PI_2)?,
        mass,
        wavenumber,
        nbar_motion: raw.float_or("nbar_motion", 0.0)?,
        pulse_length: raw.float("pulse_length_s")?,
    };
    if missing.is_empty() {
        Ok(Ok(params))
    } else {
        Ok(Err(missing.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_matches_builtin_indium() {
        let cfg = RunConfig::indium();
        let p = cfg.params().unwrap();
        let q = PhysicalParams::indium();
        for (a, b) in [
            (p.nu, q.nu),
            (p.gamma, q.gamma),
            (p.delta, q.delta),
            (p.omega_rabi, q.omega_rabi),
            (p.kappa, q.kappa),
            (p.g1.re, q.g1.re),
            (p.g2.re, q.g2.re),
            (p.mass, q.mass),
            (p.wavenumber, q.wavenumber),
            (p.theta_c, q.theta_c),
        ] {
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        }
        assert_eq!(cfg.ratio, 5.0);
        assert_eq!(cfg.homodyne, HomodyneSettings::default());
        assert_eq!(cfg.r_list, FIG3_R_VALUES.to_vec());
    }

    #[test]
    fn missing_key_is_deferred_and_named() {
        let text = INDIUM_CFG.replace("nu_hz", "# nu_hz");
        let cfg = RunConfig::parse(&text).unwrap();
        let err = cfg.params().unwrap_err().to_string();
        assert!(err.contains("nu_hz"), "{err}");
    }

    #[test]
    fn line_numbered_errors() {
        let err = RunConfig::parse("kappa_dt = 0.1\nbogus = 3\n").unwrap_err();
        assert_eq!(err, Error::Config { line: 2, msg: "unknown key `bogus`".into() });
        let err = RunConfig::parse("\n\nnu_hz = fast\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }));
        let err = RunConfig::parse("theta1 = 0\ntheta1 = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = RunConfig::parse("just words\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
        let err = RunConfig::parse("mass_u = 115\nmass_kg = 1e-25\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
    }

    #[test]
    fn lists_and_overrides() {
        let cfg = RunConfig::parse("r_list = 1.05\noracle_dims = 10, 12, 6\nseq_kappa_t12 = inf # ideal\n").unwrap();
        assert_eq!(cfg.r_list, vec![1.05]);
        assert_eq!(cfg.oracle_dims, Some([10, 12, 6]));
        assert!(cfg.seq_kappa_t12.is_infinite());
        assert!(RunConfig::parse("oracle_dims = 10, 1, 6\n").is_err());
        assert!(RunConfig::parse("kappa_dt = 2\n").is_err());
    }
}
