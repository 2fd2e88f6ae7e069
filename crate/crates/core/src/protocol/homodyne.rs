//! Balanced homodyne read-out of the emitted pulse pair.
//!
//! After the drive the intracavity field leaks out as `a_j(T_π) e^{−κt}`.
//! A detection bin of length δt starting at time t collects the fraction
//! `w(t) = 2κδt e^{−2κt}` of the source mode, superposed on the unit-variance
//! free vacuum field. With `S = ⟨q₁²⟩ + ⟨q₂²⟩`, `K = ⟨q₁q₂⟩` and
//! `R(t) = κδt e^{−2κt} S` the normalised difference-current noise is
//!
//! ```text
//! C(t) = Var(Q₁ − Q₂) / (Var Q₁ + Var Q₂) = 1 − R/(1 + R) · 2K/S
//! ```
//!
//! `C = 1` is the shot-noise level of independent vacua and `C < 1`
//! witnesses EPR correlations.

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;
use crate::params::Couplings;

/// Squeezing parameters of the reference sweep, left to right in time.
pub const FIG3_R_VALUES: [f64; 5] = [1.8, 1.5, 1.3, 1.1, 1.05];

#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneSettings {
    /// Local-oscillator phases.
    pub theta1: f64,
    pub theta2: f64,
    /// Bin length in units of the cavity lifetime, κ·δt.
    pub kappa_dt: f64,
    /// Sample times in units of 1/κ, measured from the end of the drive.
    pub t_grid: Vec<f64>,
}

impl Default for HomodyneSettings {
    /// θ₁ = θ₂ = 0, κδt = 0.1, κt ∈ [0, 8] in steps of 0.02.
    fn default() -> Self {
        Self {
            theta1: 0.0,
            theta2: 0.0,
            kappa_dt: 0.1,
            t_grid: Self::uniform_grid(8.0, 0.02),
        }
    }
}

impl HomodyneSettings {
    /// `0, step, 2·step, …` up to and including `t_max` (within rounding).
    pub fn uniform_grid(t_max: f64, step: f64) -> Vec<f64> {
        if !(step > 0.0 && t_max >= 0.0) {
            return vec![0.0];
        }
        let n = (t_max / step + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * step).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_dt > 0.0 && self.kappa_dt <= 1.0) {
            return Err(invalid("kappa_dt", format!("must lie in (0, 1], got {}", self.kappa_dt)));
        }
        if !(self.theta1.is_finite() && self.theta2.is_finite()) {
            return Err(invalid("theta", "phases must be finite"));
        }
        if self.t_grid.is_empty() {
            return Err(invalid("t_grid", "empty time grid"));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(invalid("t_grid", format!("times must be >= 0, got {t}")));
        }
        Ok(())
    }

    /// Source-mode fraction collected by the bin starting at κt.
    pub fn bin_weight(&self, kappa_t: f64) -> f64 {
        2.0 * self.kappa_dt * (-2.0 * kappa_t).exp()
    }
}

/// `C(t)` on a time grid, with the per-point ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTrace {
    pub r: f64,
    pub kappa_dt: f64,
    pub theta_sum: f64,
    /// κt.
    pub times: Vec<f64>,
    pub c: Vec<f64>,
    pub big_r: Vec<f64>,
    pub q1_sq: Vec<f64>,
    pub q1q2: Vec<f64>,
}

impl SignalTrace {
    /// `(κt, C)` at the smallest C.
    pub fn min(&self) -> (f64, f64) {
        self.times
            .iter()
            .zip(&self.c)
            .fold((f64::NAN, f64::INFINITY), |acc, (&t, &c)| if c < acc.1 { (t, c) } else { acc })
    }

    /// First κt at which C rises to `level` or above after having been
    /// below it, linearly interpolated between grid points.
    pub fn first_crossing_above(&self, level: f64) -> Option<f64> {
        let mut was_below = false;
        for i in 0..self.c.len() {
            if self.c[i] < level {
                was_below = true;
            } else if was_below {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let (c0, c1) = (self.c[i - 1], self.c[i]);
                return Some(t0 + (level - c0) / (c1 - c0) * (t1 - t0));
            }
        }
        None
    }

    /// Length of the longest run of consecutive grid points with C < `level`
    /// inside `[t_lo, t_hi]`, measured between first and last point.
    pub fn longest_window_below(&self, level: f64, t_lo: f64, t_hi: f64) -> f64 {
        let mut best = 0.0f64;
        let mut start: Option<f64> = None;
        for (&t, &c) in self.times.iter().zip(&self.c) {
            if t < t_lo || t > t_hi {
                continue;
            }
            if c < level {
                let s = *start.get_or_insert(t);
                best = best.max(t - s);
            } else {
                start = None;
            }
        }
        best
    }

    /// C at the grid point closest to κt.
    pub fn at(&self, kappa_t: f64) -> f64 {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - kappa_t).abs().total_cmp(&(b.1 - kappa_t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.c[i]
    }

    /// CSV with a `# r=…, kappa_dt=…, theta_sum=…` header line, then
    /// `kappa_t,C,R,q1_sq,q1q2`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# r={}, kappa_dt={}, theta_sum={}\nkappa_t,C,R,q1_sq,q1q2\n",
            self.r, self.kappa_dt, self.theta_sum
        );
        for i in 0..self.times.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.times[i], self.c[i], self.big_r[i], self.q1_sq[i], self.q1q2[i]
            );
        }
        out
    }
}

/// Source-field moments at the end of the drive:
///
/// ```text
/// ⟨q₁²⟩ = ⟨q₂²⟩ = [(|χ₁|² + |χ₂|²)² + 4|χ₁χ₂|²] / Θ⁴
/// ⟨q₁q₂⟩ = Re{4χ₁χ₂(|χ₁|² + |χ₂|²) e^{i(θ₁+θ₂)}} / Θ⁴
/// ```
pub fn quadrature_moments(chi1: Complex64, chi2: Complex64, theta1: f64, theta2: f64) -> Result<(f64, f64)> {
    let (a1, a2) = (chi1.norm(), chi2.norm());
    if !(a2 > a1) {
        return Err(Error::ProtocolUndefined { r: a2 / a1 });
    }
    let th2 = (a2 - a1) * (a2 + a1);
    let th4 = th2 * th2;
    let sum = a1 * a1 + a2 * a2;
    let q_sq = (sum * sum + 4.0 * a1 * a1 * a2 * a2) / th4;
    let phase = Complex64::from_polar(1.0, theta1 + theta2);
    let q12 = (4.0 * chi1 * chi2 * sum * phase).re / th4;
    Ok((q_sq, q12))
}

/// `C(t)` from the closed-form moments.
pub fn output_signal(couplings: &Couplings, kappa: f64, settings: &HomodyneSettings) -> Result<SignalTrace> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    settings.validate()?;
    let (q_sq, q12) = quadrature_moments(couplings.chi1, couplings.chi2, settings.theta1, settings.theta2)?;
    let s = 2.0 * q_sq;
    let n = settings.t_grid.len();
    let mut trace = SignalTrace {
        r: couplings.r,
        kappa_dt: settings.kappa_dt,
        theta_sum: settings.theta1 + settings.theta2,
        times: settings.t_grid.clone(),
        c: Vec::with_capacity(n),
        big_r: Vec::with_capacity(n),
        q1_sq: vec![q_sq; n],
        q1q2: vec![q12; n],
    };
    for &t in &settings.t_grid {
        let big_r = settings.kappa_dt * (-2.0 * t).exp() * s;
        trace.big_r.push(big_r);
        trace.c.push(1.0 - big_r / (1.0 + big_r) * 2.0 * q12 / s);
    }
    Ok(trace)
}

/// `C(t)` computed directly from a Gaussian state of the two source modes:
/// each detected quadrature is `Q_j = √w(t)·q_j(θ_j) + δq_j(θ_j)` with an
/// independent vacuum `δq_j`, and `C = Var(Q₁ − Q₂)/(Var Q₁ + Var Q₂)`.
///
/// Independent of [`quadrature_moments`]; the two agree when the state is
/// the one produced by the drive.
pub fn attenuate_and_mix_signal(
    source: &GaussianState,
    mode1: &str,
    mode2: &str,
    settings: &HomodyneSettings,
) -> Result<Vec<f64>> {
    settings.validate()?;
    let pair = source.reduce(&[mode1, mode2])?;
    let free = GaussianState::vacuum_labeled(vec!["free1".into(), "free2".into()])?;
    let joint = pair.tensor(&free)?;
    let cov = joint.cov();
    let quad = |mode: usize, theta: f64, scale: f64, v: &mut DVector<f64>| {
        v[2 * mode] += scale * theta.cos();
        v[2 * mode + 1] -= scale * theta.sin();
    };
    let mut out = Vec::with_capacity(settings.t_grid.len());
    for &t in &settings.t_grid {
        let amp = settings.bin_weight(t).sqrt();
        let mut big_q1 = DVector::zeros(8);
        quad(0, settings.theta1, amp, &mut big_q1);
        quad(2, settings.theta1, 1.0, &mut big_q1);
        let mut big_q2 = DVector::zeros(8);
        quad(1, settings.theta2, amp, &mut big_q2);
        quad(3, settings.theta2, 1.0, &mut big_q2);
        let var = |v: &DVector<f64>| v.dot(&(cov * v));
        let diff = &big_q1 - &big_q2;
        out.push(var(&diff) / (var(&big_q1) + var(&big_q2)));
    }
    Ok(out)
}

/// One trace per r, with real couplings χ₁ = 1, χ₂ = r.
pub fn fig3_sweep(r_list: &[f64], settings: &HomodyneSettings) -> Result<Vec<SignalTrace>> {
    settings.validate()?;
    if let Some(&r) = r_list.iter().find(|&&r| !(r > 1.0 && r.is_finite())) {
        return Err(Error::ProtocolUndefined { r });
    }
    r_list
        .par_iter()
        .map(|&r| output_signal(&Couplings::unit_ratio(r)?, 1.0, settings))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn moments_weak_pair_creation() {
        let (q_sq, q12) = quadrature_moments(Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.5), 0.3, 0.1).unwrap();
        assert_relative_eq!(q_sq, 1.0, epsilon = 1e-15);
        assert_eq!(q12, 0.0);
    }

    #[test]
    fn moments_r_1p1() {
        let (q_sq, q12) = quadrature_moments(Complex64::new(1.0, 0.0), Complex64::new(1.1, 0.0), 0.0, 0.0).unwrap();
        let expect_sq = (2.21f64.powi(2) + 4.84) / 0.0441;
        let expect_12 = 4.0 * 1.1 * 2.21 / 0.0441;
        assert_relative_eq!(q_sq, expect_sq, max_relative = 1e-12);
        assert_relative_eq!(q12, expect_12, max_relative = 1e-12);
        assert!((q_sq - 220.5).abs() < 0.1 && (q12 - 220.5).abs() < 0.1);
    }

    #[test]
    fn moments_quarter_phase() {
        let (_, q12) = quadrature_moments(Complex64::new(1.0, 0.0), Complex64::new(1.7, 0.0), FRAC_PI_2, 0.0).unwrap();
        assert!(q12.abs() < 1e-12);
        assert!(quadrature_moments(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn signal_limits() {
        let c = Couplings::unit_ratio(1.1).unwrap();
        let settings = HomodyneSettings {
            t_grid: vec![0.0, 10.0],
            ..Default::default()
        };
        let tr = output_signal(&c, 1.0, &settings).unwrap();
        assert!(tr.c[0] < 0.1);
        assert!((tr.c[1] - 1.0).abs() < 1e-3);

        let weak = Couplings::from_chi(Complex64::new(1e-12, 0.0), Complex64::new(1.0, 0.0), None).unwrap();
        let tr = output_signal(&weak, 1.0, &settings).unwrap();
        assert!(tr.c.iter().all(|c| (c - 1.0).abs() < 1e-10));

        assert!(output_signal(&c, 0.0, &settings).is_err());
        let bad = HomodyneSettings {
            kappa_dt: 1.5,
            ..Default::default()
        };
        assert!(output_signal(&c, 1.0, &bad).is_err());
        assert!(output_signal(&Couplings::unit_ratio(0.8).unwrap(), 1.0, &settings).is_err());
    }

    #[test]
    fn crossing_and_window_helpers() {
        let tr = SignalTrace {
            r: 2.0,
            kappa_dt: 0.1,
            theta_sum: 0.0,
            times: vec![0.0, 1.0, 2.0, 3.0],
            c: vec![0.2, 0.4, 0.6, 0.9],
            big_r: vec![0.0; 4],
            q1_sq: vec![0.0; 4],
            q1q2: vec![0.0; 4],
        };
        assert_relative_eq!(tr.first_crossing_above(0.5).unwrap(), 1.5, epsilon = 1e-12);
        assert_eq!(tr.longest_window_below(0.5, 0.0, 3.0), 1.0);
        assert_eq!(tr.min(), (0.0, 0.2));
        assert_eq!(tr.at(2.2), 0.6);
        assert!(tr.first_crossing_above(0.1).is_none());
    }

    #[test]
    fn csv_layout() {
        let tr = output_signal(
            &Couplings::unit_ratio(1.5).unwrap(),
            1.0,
            &HomodyneSettings {
                t_grid: vec![0.0, 0.5],
                ..Default::default()
            },
        )
        .unwrap();
        let csv = tr.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# r=1.5, kappa_dt=0.1, theta_sum=0");
        assert_eq!(lines[1], "kappa_t,C,R,q1_sq,q1q2");
        assert_eq!(lines.len(), 4);
        let row: Vec<f64> = lines[3].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], 0.5);
        assert_eq!(row[1], tr.c[1]);
    }

    #[test]
    fn default_grid() {
        let g = HomodyneSettings::default().t_grid;
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert!((g[400] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_r_below_one() {
        assert!(matches!(
            fig3_sweep(&[1.5, 0.9], &HomodyneSettings::default()),
            Err(Error::ProtocolUndefined { .. })
        ));
    }
}
