//! Qudit Fourier transform, truncated read-out, and the adaptive two-stage
//! syndrome classifier with its gate-cost accounting.
//!
//! Cost accounting rule: the coarse stage is charged `ceil(log₂ d)·K`
//! controlled-phase gates, the full transform `d(d−1)/2`. An escalated trial
//! pays for both stages.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{QuditDim, WeylOp};
use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, CMatrix};
use crate::statevec::{sample_index, StateVector};

/// Slack on the coarse-acceptance comparison so that a pure in-window bin
/// (mass 1 up to rounding) is accepted even at `epsilon = 0`.
pub const MASS_TOL: f64 = 1e-12;

/// Default escalation threshold.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Shape of the truncation function applied to frequency bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    /// `f(k) = 1` for `k < K`, else 0. The truncated transform then equals
    /// `Π_K F†`.
    #[default]
    HardCutoff,
    /// `f(k) = (1 + cos(πk/K))/2` for `k < K`, else 0.
    RaisedCosine,
}

impl Window {
    /// Amplitude weight `f(k)` for cutoff `K`.
    pub fn amplitude(self, k: usize, cutoff: usize) -> f64 {
        if k >= cutoff {
            return 0.0;
        }
        match self {
            Window::HardCutoff => 1.0,
            Window::RaisedCosine => 0.5 * (1.0 + (std::f64::consts::PI * k as f64 / cutoff as f64).cos()),
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hard" | "hard-cutoff" => Ok(Window::HardCutoff),
            "raised-cosine" | "cosine" => Ok(Window::RaisedCosine),
            other => Err(Error::InvalidParameter(format!("unknown window '{other}'"))),
        }
    }
}

/// Parameters of the adaptive transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QftPlan {
    dim: QuditDim,
    cutoff: usize,
    epsilon: f64,
    window: Window,
}

impl QftPlan {
    pub fn new(dim: QuditDim, cutoff: usize, epsilon: f64, window: Window) -> Result<Self> {
        if cutoff == 0 || cutoff > dim.get() {
            return Err(Error::InvalidParameter(format!("cutoff K={cutoff} must satisfy 1 <= K <= d={dim}")));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon={epsilon} must lie in [0, 1)")));
        }
        Ok(Self { dim, cutoff, epsilon, window })
    }

    /// `K = ceil(log₂ d)`, `ε = 0.05`, hard cutoff.
    pub fn with_defaults(dim: QuditDim) -> Self {
        Self::new(dim, default_cutoff(dim), DEFAULT_EPSILON, Window::HardCutoff).expect("defaults are valid")
    }

    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Probability weights `f(k)²` per bin.
    pub fn bin_weights(&self) -> Vec<f64> {
        (0..self.dim.get()).map(|k| self.window.amplitude(k, self.cutoff).powi(2)).collect()
    }

    fn accepts(&self, mass: f64) -> bool {
        mass >= 1.0 - self.epsilon - MASS_TOL
    }

    /// Whether a noiseless shift `m` is resolved by the coarse stage.
    pub fn coarse_accepts_bin(&self, m: usize) -> bool {
        self.accepts(self.window.amplitude(m % self.dim.get(), self.cutoff).powi(2))
    }
}

pub fn ceil_log2(d: usize) -> usize {
    if d <= 1 {
        0
    } else {
        (usize::BITS - (d - 1).leading_zeros()) as usize
    }
}

pub fn default_cutoff(dim: QuditDim) -> usize {
    ceil_log2(dim.get()).clamp(1, dim.get())
}

pub fn coarse_cost(d: usize, cutoff: usize) -> u64 {
    (ceil_log2(d) * cutoff) as u64
}

pub fn full_cost(d: usize) -> u64 {
    (d * (d - 1) / 2) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Coarse,
    Full,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Coarse => "coarse",
            Stage::Full => "full",
        })
    }
}

/// Gate accounting for one classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub controlled_phase_count: u64,
    pub single_site_count: u64,
    pub escalated: bool,
    pub stage: Stage,
}

impl CostReport {
    pub fn coarse(d: usize, cutoff: usize) -> Self {
        Self {
            controlled_phase_count: coarse_cost(d, cutoff),
            single_site_count: ceil_log2(d) as u64,
            escalated: false,
            stage: Stage::Coarse,
        }
    }

    pub fn escalated(d: usize, cutoff: usize) -> Self {
        Self {
            controlled_phase_count: coarse_cost(d, cutoff) + full_cost(d),
            single_site_count: (ceil_log2(d) + d) as u64,
            escalated: true,
            stage: Stage::Full,
        }
    }

    /// The figure used for mean-cost reporting.
    pub fn gate_cost(&self) -> u64 {
        self.controlled_phase_count
    }
}

/// `F[k, j] = e^{2πijk/d}/√d`.
pub fn full_qft_matrix(dim: QuditDim) -> CMatrix {
    let d = dim.get();
    let scale = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |k, j| root_of_unity(j * k, d) * scale)
}

pub fn inverse_qft_matrix(dim: QuditDim) -> CMatrix {
    full_qft_matrix(dim).adjoint()
}

/// `F X^m F†`, which is `diag(e^{2πimk/d})`.
pub fn conjugate_shift(dim: QuditDim, m: usize) -> Result<CMatrix> {
    if m >= dim.get() {
        return Err(Error::IndexOutOfRange { index: m, bound: dim.get() });
    }
    let f = full_qft_matrix(dim);
    let x = WeylOp::from_exponents(dim, m as i64, 0).matrix();
    Ok(&f * x * f.adjoint())
}

/// The discarded tail `Σ_{k=K}^{d−1} e^{2πikΔj/d}` in closed form.
pub fn truncation_error(d: usize, cutoff: usize, delta_j: i64) -> Result<Complex64> {
    QuditDim::new(d)?;
    if cutoff == 0 || cutoff > d {
        return Err(Error::InvalidParameter(format!("cutoff K={cutoff} must satisfy 1 <= K <= d={d}")));
    }
    let shift = delta_j.rem_euclid(d as i64) as usize;
    if shift == 0 {
        return Ok(Complex64::new((d - cutoff) as f64, 0.0));
    }
    let lead = root_of_unity(cutoff * shift, d);
    let numer = Complex64::new(1.0, 0.0) - root_of_unity((d - cutoff) * shift, d);
    let denom = Complex64::new(1.0, 0.0) - root_of_unity(shift, d);
    Ok(lead * numer / denom)
}

/// Largest `|δ|` over all shifts `Δj ∈ Z_d`.
pub fn max_truncation_error(d: usize, cutoff: usize) -> Result<f64> {
    (0..d as i64)
        .map(|j| truncation_error(d, cutoff, j).map(|z| z.norm()))
        .try_fold(0.0, |acc, v| Ok(f64::max(acc, v?)))
}

fn check_ancilla(state: &StateVector, site: usize, plan: &QftPlan) -> Result<()> {
    let d = state.register().site_dim(site)?;
    if d != plan.dim.get() {
        return Err(Error::DimensionMismatch { expected: plan.dim.get(), found: d });
    }
    Ok(())
}

/// Outcome law of the adaptive classifier without sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// Probability of each reported bin.
    pub probabilities: Vec<f64>,
    /// Window-weighted mass inside the coarse region.
    pub coarse_mass: f64,
    pub escalated: bool,
}

impl Classification {
    pub fn mean_bin(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

/// The law of the bin the adaptive classifier would report for `state`.
pub fn classification_distribution(state: &StateVector, anc_site: usize, plan: &QftPlan) -> Result<Classification> {
    check_ancilla(state, anc_site, plan)?;
    let mut st = state.clone();
    st.apply_site_matrix_unchecked(anc_site, &inverse_qft_matrix(plan.dim));
    let probs = st.site_probabilities(anc_site)?;
    let weights = plan.bin_weights();
    let weighted: Vec<f64> = probs.iter().zip(&weights).map(|(p, w)| p * w).collect();
    let mass: f64 = weighted.iter().sum();
    if weights.iter().all(|&w| w == 1.0) {
        // Nothing is truncated, so renormalizing would only add rounding.
        Ok(Classification { probabilities: probs, coarse_mass: mass, escalated: false })
    } else if plan.accepts(mass) {
        Ok(Classification {
            probabilities: weighted.iter().map(|w| w / mass).collect(),
            coarse_mass: mass,
            escalated: false,
        })
    } else {
        Ok(Classification { probabilities: probs, coarse_mass: mass, escalated: true })
    }
}

/// Law of the bin reported by the full inverse transform alone.
pub fn full_distribution(state: &StateVector, anc_site: usize) -> Result<Vec<f64>> {
    let d = QuditDim::new(state.register().site_dim(anc_site)?)?;
    let mut st = state.clone();
    st.apply_site_matrix_unchecked(anc_site, &inverse_qft_matrix(d));
    st.site_probabilities(anc_site)
}

/// Two-stage classification of a Fourier-encoded ancilla.
///
/// After `F†` the ancilla's bin distribution is inspected. If the
/// window-weighted mass over the first `K` bins is at least `1 − ε`, a bin is
/// drawn from the windowed distribution and only the coarse stage is paid
/// for. Otherwise the full transform is charged and a bin is drawn from all
/// `d` outcomes. The ancilla is left collapsed on the reported bin.
pub fn adaptive_qft<R: Rng + ?Sized>(
    state: StateVector,
    anc_site: usize,
    plan: &QftPlan,
    rng: &mut R,
) -> Result<(usize, CostReport, StateVector)> {
    check_ancilla(&state, anc_site, plan)?;
    let d = plan.dim.get();
    let mut st = state;
    st.apply_site_matrix_unchecked(anc_site, &inverse_qft_matrix(plan.dim));
    let probs = st.site_probabilities(anc_site)?;
    let weights = plan.bin_weights();
    let weighted: Vec<f64> = probs.iter().zip(&weights).map(|(p, w)| p * w).collect();
    let mass: f64 = weighted.iter().sum();

    let (bin, report) = if plan.accepts(mass) {
        (sample_index(&weighted, rng), CostReport::coarse(d, plan.cutoff))
    } else {
        (sample_index(&probs, rng), CostReport::escalated(d, plan.cutoff))
    };
    st.collapse_site(anc_site, bin)?;
    Ok((bin, report, st))
}

/// Reference classifier: full inverse transform and a measurement over all
/// `d` bins.
pub fn full_qft_classify<R: Rng + ?Sized>(
    state: StateVector,
    anc_site: usize,
    rng: &mut R,
) -> Result<(usize, StateVector)> {
    let d = QuditDim::new(state.register().site_dim(anc_site)?)?;
    let mut st = state;
    st.apply_site_matrix_unchecked(anc_site, &inverse_qft_matrix(d));
    let bin = st.measure_site(anc_site, rng)?;
    Ok((bin, st))
}

/// Mean gate cost and escalation fraction over a batch of trials.
pub fn expected_cost(trials: &[CostReport]) -> Result<(f64, f64)> {
    if trials.is_empty() {
        return Err(Error::EmptyInput("no cost reports"));
    }
    let n = trials.len() as f64;
    let total: u64 = trials.iter().map(CostReport::gate_cost).sum();
    let escalated = trials.iter().filter(|t| t.escalated).count();
    Ok((total as f64 / n, escalated as f64 / n))
}
