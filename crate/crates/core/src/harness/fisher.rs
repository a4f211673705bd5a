use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{float, CsvRow};
use crate::algebra::{QuditDim, WeylOp};
use crate::echo::{fisher_from_expectation, fisher_information};
use crate::error::{Error, Result};
use crate::fourier::{
    classification_distribution, default_cutoff, full_distribution, QftPlan, Window, DEFAULT_EPSILON,
};
use crate::statevec::{Register, StateVector};

/// Phase-sensing study: a signal rate `φ` imprints the phase `φT`, and
/// coherence decays as `e^{−T/T₂}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherConfig {
    /// Ancilla dimension for the classifier comparison.
    pub d: usize,
    pub cutoff: Option<usize>,
    pub epsilon: f64,
    pub window: Window,
    pub t2: f64,
    /// Signal rate; `None` picks `π/(4T₂)`.
    pub phi: Option<f64>,
    pub step: f64,
    /// Accumulation times; `None` doubles from `T₂/16` to `4T₂`.
    pub times: Option<Vec<f64>>,
}

impl Default for FisherConfig {
    fn default() -> Self {
        Self {
            d: 8,
            cutoff: None,
            epsilon: DEFAULT_EPSILON,
            window: Window::HardCutoff,
            t2: 1.0,
            phi: None,
            step: 1e-5,
            times: None,
        }
    }
}

impl FisherConfig {
    pub fn phi(&self) -> f64 {
        self.phi.unwrap_or(std::f64::consts::FRAC_PI_4 / self.t2)
    }

    pub fn times(&self) -> Vec<f64> {
        self.times.clone().unwrap_or_else(|| (0..7).map(|i| self.t2 / 16.0 * f64::from(1 << i)).collect())
    }

    pub fn plan(&self) -> Result<QftPlan> {
        let dim = QuditDim::new(self.d)?;
        let cutoff = self.cutoff.unwrap_or_else(|| default_cutoff(dim));
        QftPlan::new(dim, cutoff, self.epsilon, self.window)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherRow {
    pub t: f64,
    pub fisher_projective: f64,
    pub fisher_nd: f64,
    pub fisher_full: f64,
    pub fisher_adaptive: f64,
    pub gap: f64,
}

impl CsvRow for FisherRow {
    const HEADER: &'static [&'static str] =
        &["t", "fisher_projective", "fisher_nd", "fisher_full", "fisher_adaptive", "gap"];

    fn fields(&self) -> Vec<String> {
        vec![
            float(self.t),
            float(self.fisher_projective),
            float(self.fisher_nd),
            float(self.fisher_full),
            float(self.fisher_adaptive),
            float(self.gap),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherSummary {
    pub d: usize,
    pub cutoff: usize,
    pub epsilon: f64,
    pub t2: f64,
    pub phi: f64,
    /// Time at which the accumulated estimate peaks.
    pub knee_t: f64,
    /// Whether the accumulated estimate never decreases before the knee.
    pub nd_monotone_to_knee: bool,
    pub max_abs_gap: f64,
}

/// `(|0⟩ + e^{iθ}|1⟩)/√2`.
fn two_level(theta: f64) -> Result<StateVector> {
    let mut psi = StateVector::normalized(Register::new(vec![2])?, vec![Complex64::new(1.0, 0.0); 2])?;
    psi.apply_site_phases(0, &[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)])?;
    Ok(psi)
}

/// Fisher information of the two-level phase family read out along `X`,
/// which is `4 sin²θ`.
pub fn phase_family_fisher(theta: f64, step: f64) -> Result<f64> {
    let x = WeylOp::x(QuditDim::new(2)?).hermitized_matrix();
    fisher_information(two_level, 0, &x, theta, step)
}

/// `Σ_k e^{ikθ}|k⟩/√d`, whose inverse transform peaks at bin `θd/2π`.
fn phase_ancilla(dim: QuditDim, theta: f64) -> Result<StateVector> {
    let amps = (0..dim.get()).map(|k| Complex64::from_polar(1.0, k as f64 * theta)).collect();
    StateVector::normalized(Register::new(vec![dim.get()])?, amps)
}

fn full_mean_bin(dim: QuditDim, theta: f64) -> Result<f64> {
    let probs = full_distribution(&phase_ancilla(dim, theta)?, 0)?;
    Ok(probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum())
}

fn adaptive_mean_bin(plan: &QftPlan, theta: f64) -> Result<f64> {
    Ok(classification_distribution(&phase_ancilla(plan.dim(), theta)?, 0, plan)?.mean_bin())
}

/// Fisher information of the mean reported bin for a phase-encoded ancilla,
/// under the full read-out and under the adaptive classifier.
pub fn classifier_fisher(plan: &QftPlan, theta: f64, step: f64) -> Result<(f64, f64)> {
    Ok((
        fisher_from_expectation(|t| full_mean_bin(plan.dim(), t), theta, step)?,
        fisher_from_expectation(|t| adaptive_mean_bin(plan, t), theta, step)?,
    ))
}

fn check(config: &FisherConfig, times: &[f64]) -> Result<()> {
    if !config.t2.is_finite() || config.t2 <= 0.0 {
        return Err(Error::InvalidParameter(format!("t2={} must be positive", config.t2)));
    }
    if !config.phi().is_finite() {
        return Err(Error::NonFinite("phi"));
    }
    if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::InvalidParameter("times must be a non-empty list of positive values".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Fisher information about `φ` against accumulation time.
///
/// `fisher_nd` accumulates the phase `φT` coherently with visibility
/// `e^{−T/T₂}` and reads out once. `fisher_projective` instead repeats
/// independent readouts of length `τ₀ = times[0]`, `T/τ₀` of them.
/// `fisher_full` and `fisher_adaptive` read the same accumulated phase from a
/// `d`-level ancilla through the two classifiers.
pub fn run_fisher_trend(config: &FisherConfig) -> Result<(Vec<FisherRow>, FisherSummary)> {
    let times = config.times();
    check(config, &times)?;
    let plan = config.plan()?;
    let phi = config.phi();
    let step = config.step;
    let x = WeylOp::x(QuditDim::new(2)?).hermitized_matrix();
    let visibility = |t: f64| (-t / config.t2).exp();
    let accumulated = |t: f64, p: f64| -> Result<f64> { Ok(visibility(t) * two_level(p * t)?.expectation(0, &x)?) };

    let tau0 = times[0];
    let single_shot = fisher_from_expectation(|p| accumulated(tau0, p), phi, step)?;
    let rows = times
        .iter()
        .map(|&t| {
            let fisher_nd = fisher_from_expectation(|p| accumulated(t, p), phi, step)?;
            let v = visibility(t);
            let full = fisher_from_expectation(|p| Ok(v * full_mean_bin(plan.dim(), p * t)?), phi, step)?;
            let adaptive = fisher_from_expectation(|p| Ok(v * adaptive_mean_bin(&plan, p * t)?), phi, step)?;
            Ok(FisherRow {
                t,
                fisher_projective: single_shot * t / tau0,
                fisher_nd,
                fisher_full: full,
                fisher_adaptive: adaptive,
                gap: full - adaptive,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let knee =
        rows.iter().enumerate().fold(0, |best, (i, r)| if r.fisher_nd > rows[best].fisher_nd { i } else { best });
    let summary = FisherSummary {
        d: plan.dim().get(),
        cutoff: plan.cutoff(),
        epsilon: plan.epsilon(),
        t2: config.t2,
        phi,
        knee_t: rows[knee].t,
        nd_monotone_to_knee: rows[..=knee].windows(2).all(|w| w[1].fisher_nd >= w[0].fisher_nd),
        max_abs_gap: rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max),
    };
    Ok((rows, summary))
}
