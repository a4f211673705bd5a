use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{float, CsvRow};
use crate::algebra::{QuditDim, WeylOp};
use crate::echo::{evolve_echo, infidelity, ErrorHamiltonian, PulseSequence};
use crate::error::{Error, Result};
use crate::statevec::{Register, StateVector};

/// Infidelities below this are treated as exact zeros by the fit.
pub const DEGENERATE_FLOOR: f64 = 1e-14;

const REQUIRED_SEPARATION: f64 = 1.5;

/// Single-qudit clock noise `Ω(1 + drift·t)·(Z + Z†)/2` with and without the
/// cyclic shift sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig {
    pub d: usize,
    pub omega: f64,
    pub drift: f64,
    pub trotter_steps: usize,
    pub times: Vec<f64>,
}

impl Default for EchoConfig {
    fn default() -> Self {
        Self { d: 2, omega: 1.0, drift: 1.0, trotter_steps: 1, times: vec![0.01, 0.02, 0.04, 0.08] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoRow {
    pub t: f64,
    pub infidelity_free: f64,
    pub infidelity_echo: f64,
}

impl CsvRow for EchoRow {
    const HEADER: &'static [&'static str] = &["t", "infidelity_free", "infidelity_echo"];

    fn fields(&self) -> Vec<String> {
        vec![float(self.t), float(self.infidelity_free), float(self.infidelity_echo)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EchoStatus {
    /// Both slopes fitted and the echoed one exceeds the free one by at
    /// least 1.5.
    Ok,
    /// The free evolution never leaves the numerical floor.
    Degenerate,
    /// The pulsed evolution stays at the floor while the free one does not.
    Refocused,
    /// Both slopes fitted but separated by less than 1.5.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoSummary {
    pub d: usize,
    pub omega: f64,
    pub drift: f64,
    pub trotter_steps: usize,
    pub slope_free: Option<f64>,
    pub slope_echo: Option<f64>,
    pub separation: Option<f64>,
    pub status: EchoStatus,
}

/// Least-squares slope of `ln y` against `ln x`, skipping points at the
/// floor. `None` if fewer than two points remain.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(_, &y)| y > DEGENERATE_FLOOR).map(|(&x, &y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Infidelity of `|+⟩` against time, free and under `{X^k}`, with
/// log-log slopes.
pub fn run_echo_verify(config: &EchoConfig) -> Result<(Vec<EchoRow>, EchoSummary)> {
    let dim = QuditDim::new(config.d)?;
    if config.times.len() < 2 {
        return Err(Error::InvalidParameter("at least two times are needed for a slope".into()));
    }
    if config.times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::InvalidParameter("times must be positive".into()));
    }
    if !config.omega.is_finite() || !config.drift.is_finite() {
        return Err(Error::NonFinite("echo noise parameters"));
    }
    let h = ErrorHamiltonian::single(WeylOp::z(dim), config.omega).with_drift(config.drift);
    let plus = StateVector::normalized(Register::new(vec![config.d])?, vec![Complex64::new(1.0, 0.0); config.d])?;
    let free = PulseSequence::free(dim);
    let echo = PulseSequence::cyclic_shifts(dim);

    let rows = config
        .times
        .iter()
        .map(|&t| {
            let unpulsed = evolve_echo(&plus, &h, &free, t, config.trotter_steps)?;
            let pulsed = evolve_echo(&plus, &h, &echo, t, config.trotter_steps)?;
            Ok(EchoRow {
                t,
                infidelity_free: infidelity(&unpulsed, &plus)?,
                infidelity_echo: infidelity(&pulsed, &plus)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let free_y: Vec<f64> = rows.iter().map(|r| r.infidelity_free).collect();
    let echo_y: Vec<f64> = rows.iter().map(|r| r.infidelity_echo).collect();
    let slope_free = loglog_slope(&config.times, &free_y);
    let slope_echo = loglog_slope(&config.times, &echo_y);
    let separation = slope_free.zip(slope_echo).map(|(f, e)| e - f);
    let status = match (slope_free, slope_echo, separation) {
        (None, _, _) => EchoStatus::Degenerate,
        (Some(_), None, _) => EchoStatus::Refocused,
        (_, _, Some(s)) if s >= REQUIRED_SEPARATION => EchoStatus::Ok,
        _ => EchoStatus::Failed,
    };
    let summary = EchoSummary {
        d: config.d,
        omega: config.omega,
        drift: config.drift,
        trotter_steps: config.trotter_steps,
        slope_free,
        slope_echo,
        separation,
        status,
    };
    Ok((rows, summary))
}
