//! Seedable stochastic error generation.
//!
//! Weyl exponents follow a wrapped discrete Gaussian on `Z_d`; Hamiltonian
//! amplitudes are zero-mean normals. Every trial gets its own generator,
//! derived from `(seed, trial)` by selecting a ChaCha stream, so results do
//! not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::algebra::{QuditDim, WeylOp};
use crate::echo::ErrorHamiltonian;
use crate::error::{Error, Result};
use crate::statevec::sample_index;

/// Winding numbers `|w| ≤ WINDING_CUTOFF` are summed when folding the
/// Gaussian onto `Z_d`.
pub const WINDING_CUTOFF: i64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma_shift: f64,
    pub sigma_phase: f64,
    pub omega_scale: f64,
    pub lambda_scale: f64,
}

impl NoiseModel {
    pub fn new(sigma_shift: f64, sigma_phase: f64, omega_scale: f64, lambda_scale: f64) -> Result<Self> {
        let fields = [
            ("sigma_shift", sigma_shift),
            ("sigma_phase", sigma_phase),
            ("omega_scale", omega_scale),
            ("lambda_scale", lambda_scale),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name}={v} must be finite and non-negative")));
            }
        }
        Ok(Self { sigma_shift, sigma_phase, omega_scale, lambda_scale })
    }

    /// Only discrete Weyl errors, no Hamiltonian amplitudes.
    pub fn weyl(sigma_shift: f64, sigma_phase: f64) -> Result<Self> {
        Self::new(sigma_shift, sigma_phase, 0.0, 0.0)
    }
}

/// `P(k) ∝ Σ_{|w|≤6} exp(−(k + wd)² / 2σ²)`, normalized. `σ = 0` is the
/// point mass at 0.
pub fn wrapped_gaussian_weights(d: usize, sigma: f64) -> Vec<f64> {
    let mut weights = vec![0.0; d];
    if sigma == 0.0 {
        weights[0] = 1.0;
        return weights;
    }
    let two_var = 2.0 * sigma * sigma;
    for (k, w) in weights.iter_mut().enumerate() {
        *w = (-WINDING_CUTOFF..=WINDING_CUTOFF)
            .map(|wind| {
                let x = k as f64 + (wind * d as i64) as f64;
                (-x * x / two_var).exp()
            })
            .sum();
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// Per-trial generator: ChaCha8 seeded from `seed`, stream `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws `X^m Z^n` with `m`, `n` independent wrapped Gaussians (in that
/// order) and no global phase.
pub fn sample_weyl_error<R: Rng + ?Sized>(model: &NoiseModel, dim: QuditDim, rng: &mut R) -> WeylOp {
    let d = dim.get();
    let m = sample_index(&wrapped_gaussian_weights(d, model.sigma_shift), rng);
    let n = sample_index(&wrapped_gaussian_weights(d, model.sigma_phase), rng);
    WeylOp::from_exponents(dim, m as i64, n as i64)
}

/// One hermitized Weyl term per site with amplitude `~ N(0, ω²)`, and one
/// symmetrized `X⊗X` term per pair `i < j` with amplitude `~ N(0, λ²)`.
pub fn sample_hamiltonian<R: Rng + ?Sized>(
    model: &NoiseModel,
    sites: usize,
    dim: QuditDim,
    rng: &mut R,
) -> Result<ErrorHamiltonian> {
    if sites == 0 {
        return Err(Error::InvalidParameter("at least one site is required".into()));
    }
    let omega = Normal::new(0.0, model.omega_scale).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let lambda = Normal::new(0.0, model.lambda_scale).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut h = ErrorHamiltonian::new(dim, sites)?;
    for site in 0..sites {
        let op = sample_weyl_error(model, dim, rng);
        let amplitude = omega.sample(rng);
        h.add_site_term(site, op, amplitude)?;
    }
    for i in 0..sites {
        for j in i + 1..sites {
            let amplitude = lambda.sample(rng);
            h.add_pair_term(i, j, WeylOp::x(dim), WeylOp::x(dim), amplitude)?;
        }
    }
    Ok(h)
}
