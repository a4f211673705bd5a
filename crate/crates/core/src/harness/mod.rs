//! Seeded experiment runners behind the `qudit-mem` command line.
//!
//! Every runner derives per-trial generators from `(seed, trial)`, so output
//! is identical between serial and parallel execution.

mod bench;
mod cycle;
mod echo_verify;
mod fisher;
pub mod report;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::algebra::QuditDim;
use crate::correction::SubgroupSpec;
use crate::error::{Error, Result};
use crate::fourier::{default_cutoff, QftPlan, Window, DEFAULT_EPSILON};
use crate::noise::NoiseModel;
use crate::statevec::DEFAULT_AMPLITUDE_CAP;

pub use bench::{analytic_escalation_rate, run_qft_bench, BenchRow, BenchSummary};
pub use cycle::{run_cycle, run_pipeline, run_trial, CycleRecord, CycleSummary, PipelineOutcome, CORRECTED_THRESHOLD};
pub use echo_verify::{run_echo_verify, EchoConfig, EchoRow, EchoStatus, EchoSummary, DEGENERATE_FLOOR};
pub use fisher::{classifier_fisher, phase_family_fisher, run_fisher_trend, FisherConfig, FisherRow, FisherSummary};

/// Settings shared by the `cycle` and `qft-bench` runners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub sigma_shift: f64,
    pub sigma_phase: f64,
    /// Coarse cutoff `K`; `None` picks `ceil(log₂ d)`.
    pub cutoff: Option<usize>,
    pub epsilon: f64,
    pub window: Window,
    pub subgroup: SubgroupSpec,
    pub output: Option<PathBuf>,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 5,
            trials: 1000,
            seed: 42,
            sigma_shift: 0.5,
            sigma_phase: 0.5,
            cutoff: None,
            epsilon: DEFAULT_EPSILON,
            window: Window::HardCutoff,
            subgroup: SubgroupSpec::Clock,
            output: None,
            parallel: true,
        }
    }
}

impl ExperimentConfig {
    pub fn dim(&self) -> Result<QuditDim> {
        QuditDim::new(self.d)
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::weyl(self.sigma_shift, self.sigma_phase)
    }

    /// The adaptive-QFT plan at dimension `d`; an explicit cutoff larger
    /// than `d` is clamped.
    pub fn plan_for(&self, d: usize) -> Result<QftPlan> {
        let dim = QuditDim::new(d)?;
        let cutoff = self.cutoff.map(|k| k.min(d)).unwrap_or_else(|| default_cutoff(dim));
        QftPlan::new(dim, cutoff, self.epsilon, self.window)
    }

    /// Checks everything a cycle run needs: one data qudit plus two
    /// ancillas must fit in the amplitude cap.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim()?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        let total = self.d.checked_pow(3).unwrap_or(usize::MAX);
        if total > DEFAULT_AMPLITUDE_CAP {
            return Err(Error::RegisterTooLarge { total, cap: DEFAULT_AMPLITUDE_CAP });
        }
        if let Some(k) = self.cutoff {
            if k == 0 || k > self.d {
                return Err(Error::InvalidParameter(format!("cutoff K={k} must satisfy 1 <= K <= d={}", self.d)));
            }
        }
        self.noise()?;
        self.plan_for(self.d)?;
        if let SubgroupSpec::Generator(m, n) = self.subgroup {
            if dim.reduce(m) == 0 && dim.reduce(n) == 0 {
                return Err(Error::InvalidParameter("subgroup generator is the identity; use singleton".into()));
            }
        }
        Ok(())
    }
}
