use rayon::prelude::*;
use serde::Serialize;

use super::report::{float, CsvRow};
use super::ExperimentConfig;
use crate::algebra::QuditDim;
use crate::error::{Error, Result};
use crate::fourier::{adaptive_qft, expected_cost, full_cost, full_qft_matrix, CostReport, QftPlan};
use crate::noise::{sample_weyl_error, trial_rng, wrapped_gaussian_weights, NoiseModel};
use crate::statevec::{Register, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub d: usize,
    pub k: usize,
    pub epsilon: f64,
    pub mean_cost: f64,
    pub full_cost: u64,
    pub escalation_rate: f64,
    pub analytic_escalation: f64,
    /// Binomial standard error of the escalation rate at the analytic value.
    pub escalation_sigma: f64,
}

impl CsvRow for BenchRow {
    const HEADER: &'static [&'static str] = &["d", "k", "epsilon", "mean_cost", "full_cost", "escalation_rate"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            self.k.to_string(),
            float(self.epsilon),
            float(self.mean_cost),
            self.full_cost.to_string(),
            float(self.escalation_rate),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub trials: usize,
    pub seed: u64,
    pub sigma_shift: f64,
    /// Largest escalation-rate deviation from the analytic value, in
    /// binomial standard errors.
    pub max_escalation_z: f64,
}

/// Probability that a wrapped-Gaussian shift lands outside the region the
/// coarse stage accepts.
pub fn analytic_escalation_rate(plan: &QftPlan, sigma_shift: f64) -> f64 {
    let d = plan.dim().get();
    wrapped_gaussian_weights(d, sigma_shift)
        .iter()
        .enumerate()
        .filter(|(m, _)| !plan.coarse_accepts_bin(*m))
        .map(|(_, p)| p)
        .sum()
}

fn bench_trial(
    seed: u64,
    trial: usize,
    noise: &NoiseModel,
    plan: &QftPlan,
    f: &crate::linalg::CMatrix,
) -> Result<CostReport> {
    let dim = plan.dim();
    let mut rng = trial_rng(seed, trial as u64);
    let error = sample_weyl_error(noise, dim, &mut rng);
    // The shift ancilla after extraction holds F|m⟩.
    let mut ancilla = StateVector::basis_state(Register::new(vec![dim.get()])?, &[error.m()])?;
    ancilla.apply_site_unitary(0, f)?;
    let (_, report, _) = adaptive_qft(ancilla, 0, plan, &mut rng)?;
    Ok(report)
}

fn bench_dim(config: &ExperimentConfig, d: usize) -> Result<BenchRow> {
    let plan = config.plan_for(d)?;
    let noise = NoiseModel::weyl(config.sigma_shift, 0.0)?;
    let f = full_qft_matrix(QuditDim::new(d)?);
    let reports: Vec<CostReport> = if config.parallel {
        (0..config.trials)
            .into_par_iter()
            .map(|t| bench_trial(config.seed, t, &noise, &plan, &f))
            .collect::<Result<_>>()?
    } else {
        (0..config.trials).map(|t| bench_trial(config.seed, t, &noise, &plan, &f)).collect::<Result<_>>()?
    };
    let (mean_cost, escalation_rate) = expected_cost(&reports)?;
    let analytic = analytic_escalation_rate(&plan, config.sigma_shift);
    Ok(BenchRow {
        d,
        k: plan.cutoff(),
        epsilon: plan.epsilon(),
        mean_cost,
        full_cost: full_cost(d),
        escalation_rate,
        analytic_escalation: analytic,
        escalation_sigma: (analytic * (1.0 - analytic) / config.trials as f64).sqrt(),
    })
}

/// Adaptive-QFT cost over a sweep of dimensions, with shift errors drawn
/// at `config.sigma_shift`.
pub fn run_qft_bench(config: &ExperimentConfig, dims: &[usize]) -> Result<(Vec<BenchRow>, BenchSummary)> {
    if dims.is_empty() {
        return Err(Error::EmptyInput("dimension sweep"));
    }
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    config.noise()?;
    let rows = dims.iter().map(|&d| bench_dim(config, d)).collect::<Result<Vec<_>>>()?;
    let max_escalation_z = rows
        .iter()
        .map(|r| {
            let diff = (r.escalation_rate - r.analytic_escalation).abs();
            if r.escalation_sigma > 0.0 {
                diff / r.escalation_sigma
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let summary =
        BenchSummary { trials: config.trials, seed: config.seed, sigma_shift: config.sigma_shift, max_escalation_z };
    Ok((rows, summary))
}
