use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::report::{float, CsvRow};
use super::ExperimentConfig;
use crate::algebra::WeylOp;
use crate::correction::{apply_correction, build_cosets, classify, plan_correction, CorrectionPlan, CosetTable};
use crate::echo::{encode_syndrome, AncillaCoupling, SyndromeSites};
use crate::error::{Error, Result};
use crate::fourier::{adaptive_qft, CostReport, QftPlan, Stage};
use crate::noise::{sample_weyl_error, trial_rng, NoiseModel};
use crate::statevec::{Register, StateVector};

/// Fidelity at or above this counts as corrected.
pub const CORRECTED_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleRecord {
    pub trial: usize,
    pub error_m: usize,
    pub error_n: usize,
    pub syndrome: usize,
    pub stage: Stage,
    pub gate_cost: u64,
    pub fidelity_after: f64,
    pub corrected: bool,
}

impl CsvRow for CycleRecord {
    const HEADER: &'static [&'static str] =
        &["trial", "error_m", "error_n", "syndrome", "stage", "gate_cost", "fidelity_after", "corrected"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.error_m.to_string(),
            self.error_n.to_string(),
            self.syndrome.to_string(),
            self.stage.to_string(),
            self.gate_cost.to_string(),
            float(self.fidelity_after),
            self.corrected.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleSummary {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub subgroup: String,
    pub cutoff: usize,
    pub epsilon: f64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub corrected_rate: f64,
    pub escalation_rate: f64,
    pub mean_gate_cost: f64,
}

impl CycleSummary {
    fn from_records(config: &ExperimentConfig, plan: &QftPlan, records: &[CycleRecord]) -> Self {
        let n = records.len() as f64;
        Self {
            d: config.d,
            trials: records.len(),
            seed: config.seed,
            subgroup: config.subgroup.to_string(),
            cutoff: plan.cutoff(),
            epsilon: plan.epsilon(),
            mean_fidelity: records.iter().map(|r| r.fidelity_after).sum::<f64>() / n,
            min_fidelity: records.iter().map(|r| r.fidelity_after).fold(f64::INFINITY, f64::min),
            corrected_rate: records.iter().filter(|r| r.corrected).count() as f64 / n,
            escalation_rate: records.iter().filter(|r| r.stage == Stage::Full).count() as f64 / n,
            mean_gate_cost: records.iter().map(|r| r.gate_cost as f64).sum::<f64>() / n,
        }
    }
}

struct CycleSetup {
    noise: NoiseModel,
    plan: QftPlan,
    table: CosetTable,
    correction: CorrectionPlan,
}

impl CycleSetup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim()?;
        let table = build_cosets(dim, &config.subgroup.build(dim))?;
        Ok(Self {
            noise: config.noise()?,
            plan: config.plan_for(config.d)?,
            correction: plan_correction(&table)?,
            table,
        })
    }
}

fn basis(d: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Result of one pass through the memory pipeline.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub alpha: usize,
    pub beta: usize,
    pub syndrome: usize,
    pub shift_cost: CostReport,
    pub phase_cost: CostReport,
    /// Full register `[data, shift, phase]` after correction.
    pub state: StateVector,
}

impl PipelineOutcome {
    pub fn escalated(&self) -> bool {
        self.shift_cost.escalated || self.phase_cost.escalated
    }

    pub fn gate_cost(&self) -> u64 {
        self.shift_cost.gate_cost() + self.phase_cost.gate_cost()
    }
}

/// Applies `error` to `data`, extracts the syndrome into two fresh
/// ancillas, classifies both with the adaptive transform, and applies the
/// coset correction.
pub fn run_pipeline<R: Rng + ?Sized>(
    data: &StateVector,
    error: &WeylOp,
    plan: &QftPlan,
    table: &CosetTable,
    correction: &CorrectionPlan,
    rng: &mut R,
) -> Result<PipelineOutcome> {
    let dim = plan.dim();
    let d = dim.get();
    if data.register().dims() != [d] {
        return Err(Error::DimensionMismatch { expected: d, found: data.register().total_dim() });
    }
    let register = Register::uniform(d, 3)?;
    let mut state = StateVector::product(register, &[data.amplitudes().to_vec(), basis(d, 0), basis(d, 0)])?;
    state.apply_site_unitary(0, &error.matrix())?;
    let encoded = encode_syndrome(&state, SyndromeSites::new(0, 1, 2), error, &AncillaCoupling::default())?;

    let (alpha, shift_cost, state) = adaptive_qft(encoded, 1, plan, rng)?;
    let (beta, phase_cost, state) = adaptive_qft(state, 2, plan, rng)?;
    let syndrome = classify(&WeylOp::from_exponents(dim, alpha as i64, beta as i64), table)?;
    let state = apply_correction(&state, &[1, 2], 0, correction)?;
    Ok(PipelineOutcome { alpha, beta, syndrome, shift_cost, phase_cost, state })
}

fn trial_record(config: &ExperimentConfig, setup: &CycleSetup, trial: usize) -> Result<CycleRecord> {
    let dim = setup.plan.dim();
    let mut rng = trial_rng(config.seed, trial as u64);
    let pristine = StateVector::random(Register::new(vec![dim.get()])?, &mut rng)?;
    let error = sample_weyl_error(&setup.noise, dim, &mut rng);
    let outcome = run_pipeline(&pristine, &error, &setup.plan, &setup.table, &setup.correction, &mut rng)?;
    let fidelity_after = outcome.state.site_fidelity(0, pristine.amplitudes())?;
    if !(-1e-9..=1.0 + 1e-9).contains(&fidelity_after) {
        return Err(Error::Invariant(format!("trial {trial}: fidelity {fidelity_after} outside [0, 1]")));
    }
    Ok(CycleRecord {
        trial,
        error_m: error.m(),
        error_n: error.n(),
        syndrome: outcome.syndrome,
        stage: if outcome.escalated() { Stage::Full } else { Stage::Coarse },
        gate_cost: outcome.gate_cost(),
        fidelity_after,
        corrected: fidelity_after >= CORRECTED_THRESHOLD,
    })
}

/// Replays a single trial of a cycle run.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<CycleRecord> {
    trial_record(config, &CycleSetup::new(config)?, trial)
}

/// Runs `config.trials` memory cycles: random data state, Weyl error,
/// non-demolition extraction, adaptive classification of both ancillas,
/// coset lookup and controlled correction.
pub fn run_cycle(config: &ExperimentConfig) -> Result<(Vec<CycleRecord>, CycleSummary)> {
    let setup = CycleSetup::new(config)?;
    let records: Vec<CycleRecord> = if config.parallel {
        (0..config.trials).into_par_iter().map(|t| trial_record(config, &setup, t)).collect::<Result<_>>()?
    } else {
        (0..config.trials).map(|t| trial_record(config, &setup, t)).collect::<Result<_>>()?
    };
    let summary = CycleSummary::from_records(config, &setup.plan, &records);
    Ok((records, summary))
}
