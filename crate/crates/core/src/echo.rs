//! Refocusing sequences, the first-order average Hamiltonian, echo
//! evolution, non-demolition syndrome extraction, and a finite-difference
//! Fisher-information estimator.

use num_complex::Complex64;

use crate::algebra::{all_projective, QuditDim, WeylOp};
use crate::error::{Error, Result};
use crate::fourier::{conjugate_shift, full_qft_matrix, inverse_qft_matrix};
use crate::linalg::{ensure_hermitian, ensure_unitary, hermitian_evolution_from, identity, kron, CMatrix, ZERO};
use crate::statevec::{Register, StateVector, OPERATOR_TOL};

const HERMITIAN_TOL: f64 = 1e-12;

/// A single-site noise term `Ω·(T + T†)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTerm {
    pub site: usize,
    pub op: WeylOp,
    pub amplitude: f64,
}

/// A two-site noise term `Λ·(A⊗B + h.c.)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerm {
    pub first: usize,
    pub second: usize,
    pub ops: (WeylOp, WeylOp),
    pub amplitude: f64,
}

/// Error Hamiltonian on `sites` qudits of equal dimension.
///
/// All amplitudes share the time profile `1 + drift·t`; with the default
/// `drift = 0` the Hamiltonian is static.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorHamiltonian {
    dim: QuditDim,
    sites: usize,
    single_site_terms: Vec<SiteTerm>,
    pair_terms: Vec<PairTerm>,
    dense: Option<CMatrix>,
    drift: f64,
}

impl ErrorHamiltonian {
    pub fn new(dim: QuditDim, sites: usize) -> Result<Self> {
        Register::uniform(dim.get(), sites)?;
        Ok(Self { dim, sites, single_site_terms: Vec::new(), pair_terms: Vec::new(), dense: None, drift: 0.0 })
    }

    /// A single site carrying `Ω·(op + op†)/2`.
    pub fn single(op: WeylOp, amplitude: f64) -> Self {
        let mut h = Self::new(op.dim(), 1).expect("one site always fits");
        h.add_site_term(0, op, amplitude).expect("site 0 exists");
        h
    }

    pub fn add_site_term(&mut self, site: usize, op: WeylOp, amplitude: f64) -> Result<()> {
        self.check_site(site)?;
        self.check_op(&op)?;
        self.single_site_terms.push(SiteTerm { site, op, amplitude });
        Ok(())
    }

    pub fn add_pair_term(&mut self, first: usize, second: usize, a: WeylOp, b: WeylOp, amplitude: f64) -> Result<()> {
        self.check_site(first)?;
        self.check_site(second)?;
        if first == second {
            return Err(Error::SiteCollision(first));
        }
        self.check_op(&a)?;
        self.check_op(&b)?;
        self.pair_terms.push(PairTerm { first, second, ops: (a, b), amplitude });
        Ok(())
    }

    /// Adds an arbitrary dense term. It is not hermitized; [`Self::matrix`]
    /// rejects it if it is not Hermitian.
    pub fn add_dense_term(&mut self, term: CMatrix) -> Result<()> {
        let n = self.total_dim();
        if term.nrows() != n || term.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: term.nrows() });
        }
        self.dense = Some(match self.dense.take() {
            Some(existing) => existing + term,
            None => term,
        });
        Ok(())
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = drift;
        self
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        Ok(())
    }

    fn check_op(&self, op: &WeylOp) -> Result<()> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim.get(), found: op.dim().get() });
        }
        Ok(())
    }

    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn total_dim(&self) -> usize {
        self.dim.get().pow(self.sites as u32)
    }

    pub fn single_site_terms(&self) -> &[SiteTerm] {
        &self.single_site_terms
    }

    pub fn pair_terms(&self) -> &[PairTerm] {
        &self.pair_terms
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// `∫_{t0}^{t1} (1 + drift·t) dt`.
    pub fn amplitude_integral(&self, t0: f64, t1: f64) -> f64 {
        (t1 - t0) + 0.5 * self.drift * (t1 * t1 - t0 * t0)
    }

    /// Dense matrix of the `t = 0` Hamiltonian; Hermitian within `1e-12`.
    pub fn matrix(&self) -> Result<CMatrix> {
        let d = self.dim.get();
        let n = self.total_dim();
        let mut h = CMatrix::from_element(n, n, ZERO);
        for term in &self.single_site_terms {
            let local = term.op.hermitized_matrix();
            h += embed(d, self.sites, &[(term.site, &local)]) * Complex64::new(term.amplitude, 0.0);
        }
        for term in &self.pair_terms {
            let product =
                embed(d, self.sites, &[(term.first, &term.ops.0.matrix()), (term.second, &term.ops.1.matrix())]);
            let herm = (&product + product.adjoint()) * Complex64::new(0.5, 0.0);
            h += herm * Complex64::new(term.amplitude, 0.0);
        }
        if let Some(dense) = &self.dense {
            h += dense;
        }
        ensure_hermitian(&h, HERMITIAN_TOL)?;
        Ok(h)
    }
}

/// Tensor product placing `ops` on their sites and identity elsewhere.
pub fn embed(d: usize, sites: usize, ops: &[(usize, &CMatrix)]) -> CMatrix {
    let id = identity(d);
    let mut out = CMatrix::identity(1, 1);
    for s in 0..sites {
        let factor = ops.iter().find(|(site, _)| *site == s).map(|(_, m)| *m).unwrap_or(&id);
        out = kron(&out, factor);
    }
    out
}

/// A refocusing pulse.
#[derive(Debug, Clone, PartialEq)]
pub enum Pulse {
    /// The same Weyl operator on every site.
    Weyl(WeylOp),
    /// A unitary on the full register.
    Unitary(CMatrix),
}

impl Pulse {
    pub fn matrix(&self, d: usize, sites: usize) -> Result<CMatrix> {
        match self {
            Pulse::Weyl(op) => {
                if op.dim().get() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: op.dim().get() });
                }
                let local = op.matrix();
                let ops: Vec<(usize, &CMatrix)> = (0..sites).map(|s| (s, &local)).collect();
                Ok(embed(d, sites, &ops))
            }
            Pulse::Unitary(u) => {
                let n = d.pow(sites as u32);
                if u.nrows() != n || u.ncols() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: u.nrows() });
                }
                ensure_unitary(u, OPERATOR_TOL)?;
                Ok(u.clone())
            }
        }
    }
}

/// Ordered pulses `{P_k}`; each free segment is conjugated by one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pulses: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<Pulse>) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::EmptyInput("pulse sequence"));
        }
        Ok(Self { pulses })
    }

    /// `{X^0, X^1, …, X^{d−1}}`.
    pub fn cyclic_shifts(dim: QuditDim) -> Self {
        let pulses = (0..dim.get()).map(|k| Pulse::Weyl(WeylOp::from_exponents(dim, k as i64, 0))).collect();
        Self { pulses }
    }

    /// Only the identity: free evolution.
    pub fn free(dim: QuditDim) -> Self {
        Self { pulses: vec![Pulse::Weyl(WeylOp::identity(dim))] }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Duration of one free segment when `total_time` is split over
    /// `trotter_steps` passes through the sequence.
    pub fn segment_duration(&self, total_time: f64, trotter_steps: usize) -> f64 {
        total_time / (trotter_steps * self.pulses.len()) as f64
    }

    fn matrices(&self, d: usize, sites: usize) -> Result<Vec<CMatrix>> {
        self.pulses.iter().map(|p| p.matrix(d, sites)).collect()
    }
}

/// First-order average Hamiltonian `(1/L) Σ_k P_k† H P_k`.
pub fn average_hamiltonian(h: &ErrorHamiltonian, seq: &PulseSequence) -> Result<CMatrix> {
    let hm = h.matrix()?;
    let pulses = seq.matrices(h.dim.get(), h.sites)?;
    let mut acc = CMatrix::from_element(hm.nrows(), hm.ncols(), ZERO);
    for p in &pulses {
        acc += p.adjoint() * &hm * p;
    }
    Ok(acc / Complex64::new(pulses.len() as f64, 0.0))
}

/// Evolves `state` for `total_time` under `h`, toggling the frame with each
/// pulse: every segment applies `P_k† exp(−i H τ_k) P_k`, cycling through the
/// sequence `trotter_steps` times. Segment exponentials are exact (dense
/// eigendecomposition), including the linear amplitude drift.
pub fn evolve_echo(
    state: &StateVector,
    h: &ErrorHamiltonian,
    seq: &PulseSequence,
    total_time: f64,
    trotter_steps: usize,
) -> Result<StateVector> {
    if trotter_steps == 0 {
        return Err(Error::InvalidParameter("trotter_steps must be at least 1".into()));
    }
    if !total_time.is_finite() || total_time < 0.0 {
        return Err(Error::InvalidParameter(format!("total_time={total_time} must be finite and non-negative")));
    }
    let n = h.total_dim();
    if state.register().total_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: state.register().total_dim() });
    }
    let hm = h.matrix()?;
    let eig = hm.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let pulses = seq.matrices(h.dim.get(), h.sites)?;
    let tau = seq.segment_duration(total_time, trotter_steps);

    let mut out = state.clone();
    let mut t = 0.0;
    for _ in 0..trotter_steps {
        for p in &pulses {
            let s = h.amplitude_integral(t, t + tau);
            let free = hermitian_evolution_from(&eig.eigenvectors, &values, s);
            out.apply_full_unchecked(&(p.adjoint() * free * p));
            t += tau;
        }
    }
    Ok(out)
}

/// Time profile of the ancilla coupling `g(t)`, piecewise constant.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaCoupling {
    pub g_profile: Vec<f64>,
    pub segment_duration: f64,
}

impl Default for AncillaCoupling {
    /// Constant coupling with unit integral.
    fn default() -> Self {
        Self { g_profile: vec![1.0], segment_duration: 1.0 }
    }
}

impl AncillaCoupling {
    pub fn integral(&self) -> f64 {
        self.g_profile.iter().sum::<f64>() * self.segment_duration
    }
}

/// Site assignment for syndrome extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyndromeSites {
    pub data: usize,
    pub shift_ancilla: usize,
    pub phase_ancilla: usize,
}

impl SyndromeSites {
    pub fn new(data: usize, shift_ancilla: usize, phase_ancilla: usize) -> Self {
        Self { data, shift_ancilla, phase_ancilla }
    }

    fn validate(&self, register: &Register, dim: QuditDim) -> Result<()> {
        let sites = [self.data, self.shift_ancilla, self.phase_ancilla];
        for (i, &a) in sites.iter().enumerate() {
            if register.site_dim(a)? != dim.get() {
                return Err(Error::DimensionMismatch { expected: dim.get(), found: register.site_dim(a)? });
            }
            if sites[i + 1..].contains(&a) {
                return Err(Error::SiteCollision(a));
            }
        }
        Ok(())
    }
}

/// Ladder phases imprinted on the shift ancilla: the spectrum of `F X^α F†`
/// raised to the coupling integral.
fn shift_ladder(dim: QuditDim, alpha: usize, strength: f64) -> Result<Vec<Complex64>> {
    let diag = conjugate_shift(dim, alpha)?;
    Ok((0..dim.get()).map(|k| scale_phase(diag[(k, k)], strength)).collect())
}

/// Ladder phases imprinted on the phase ancilla: the spectrum of `Z^β`.
fn phase_ladder(dim: QuditDim, beta: usize, strength: f64) -> Vec<Complex64> {
    let z = WeylOp::from_exponents(dim, 0, beta as i64).matrix();
    (0..dim.get()).map(|j| scale_phase(z[(j, j)], strength)).collect()
}

fn scale_phase(z: Complex64, strength: f64) -> Complex64 {
    if strength == 1.0 {
        z / z.norm()
    } else {
        Complex64::from_polar(1.0, z.arg() * strength)
    }
}

/// The extraction circuit without precondition checks. Leaves both
/// ancillas Fourier-encoded (`F|α⟩`, `F|β⟩` when started in `|0⟩`).
fn encode_circuit(
    state: &mut StateVector,
    sites: SyndromeSites,
    error: &WeylOp,
    coupling: &AncillaCoupling,
) -> Result<()> {
    let dim = error.dim();
    let f = full_qft_matrix(dim);
    let strength = coupling.integral();
    state.apply_site_matrix_unchecked(sites.shift_ancilla, &f);
    state.apply_site_matrix_unchecked(sites.phase_ancilla, &f);

    // Shift readout: in the Fourier frame of the data qudit the shift X^α is
    // diagonal, and its eigenphases are accumulated level by level.
    state.apply_site_matrix_unchecked(sites.data, &f);
    state.apply_site_phases(sites.shift_ancilla, &shift_ladder(dim, error.m(), strength)?)?;
    state.apply_site_matrix_unchecked(sites.data, &f.adjoint());

    // Phase readout: Z^β is already diagonal.
    state.apply_site_phases(sites.phase_ancilla, &phase_ladder(dim, error.n(), strength))?;
    Ok(())
}

fn check_ancillas_ready(state: &StateVector, sites: SyndromeSites) -> Result<()> {
    for site in [sites.shift_ancilla, sites.phase_ancilla] {
        let p0 = state.site_probabilities(site)?[0];
        if (p0 - 1.0).abs() > 1e-10 {
            return Err(Error::AncillaNotReady { site });
        }
    }
    Ok(())
}

/// Non-demolition extraction leaving the syndrome in the ancilla phases.
/// The adaptive classifier reads these out with `F†`.
pub fn encode_syndrome(
    state: &StateVector,
    sites: SyndromeSites,
    error: &WeylOp,
    coupling: &AncillaCoupling,
) -> Result<StateVector> {
    sites.validate(state.register(), error.dim())?;
    check_ancillas_ready(state, sites)?;
    let mut out = state.clone();
    encode_circuit(&mut out, sites, error, coupling)?;
    Ok(out)
}

/// Non-demolition extraction followed by `F†` on both ancillas, which then
/// hold `|α⟩` and `|β⟩` in the computational basis. The data qudit keeps
/// its (errored) state.
pub fn extract_syndrome(
    state: &StateVector,
    data_site: usize,
    shift_anc_site: usize,
    phase_anc_site: usize,
    error: &WeylOp,
) -> Result<StateVector> {
    let sites = SyndromeSites::new(data_site, shift_anc_site, phase_anc_site);
    let mut out = encode_syndrome(state, sites, error, &AncillaCoupling::default())?;
    let f_inv = inverse_qft_matrix(error.dim());
    out.apply_site_matrix_unchecked(shift_anc_site, &f_inv);
    out.apply_site_matrix_unchecked(phase_anc_site, &f_inv);
    Ok(out)
}

/// Dense extraction unitary on the register `[data, shift, phase]`, built
/// column by column from the circuit.
pub fn extraction_unitary(error: &WeylOp) -> Result<CMatrix> {
    let d = error.dim().get();
    let register = Register::uniform(d, 3)?;
    let sites = SyndromeSites::new(0, 1, 2);
    let f_inv = inverse_qft_matrix(error.dim());
    let n = register.total_dim();
    let mut u = CMatrix::from_element(n, n, ZERO);
    for col in 0..n {
        let labels = [register.digit(col, 0), register.digit(col, 1), register.digit(col, 2)];
        let mut st = StateVector::basis_state(register.clone(), &labels)?;
        encode_circuit(&mut st, sites, error, &AncillaCoupling::default())?;
        st.apply_site_matrix_unchecked(1, &f_inv);
        st.apply_site_matrix_unchecked(2, &f_inv);
        for (row, a) in st.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// Slot of the `[data, shift, phase]` register an observable is placed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Data,
    ShiftAncilla,
    PhaseAncilla,
}

impl Slot {
    fn index(self) -> usize {
        match self {
            Slot::Data => 0,
            Slot::ShiftAncilla => 1,
            Slot::PhaseAncilla => 2,
        }
    }
}

/// Frobenius norms of `[S, X⊗I⊗I]` and `[S, Z⊗I⊗I]` where
/// `S = U† O U`, `U` is the extraction unitary for `error`, and
/// `O = diag(0..d−1)` sits on `observable_slot`.
pub fn snd_commutator_norms_for(error: &WeylOp, observable_slot: Slot) -> Result<(f64, f64)> {
    let dim = error.dim();
    let d = dim.get();
    let u = extraction_unitary(error)?;
    let register = Register::uniform(d, 3)?;
    // O is diagonal, so O·U is a row scaling.
    let mut ou = u.clone();
    for r in 0..ou.nrows() {
        let level = register.digit(r, observable_slot.index()) as f64;
        ou.row_mut(r).scale_mut(level);
    }
    let s = u.adjoint() * ou;
    Ok((data_commutator_norm(&s, &WeylOp::x(dim), &register), data_commutator_norm(&s, &WeylOp::z(dim), &register)))
}

/// `‖[S, P⊗I⊗I]‖_F` for a Weyl operator `P` on site 0, using that `P⊗I⊗I`
/// has one nonzero entry per column.
fn data_commutator_norm(s: &CMatrix, op: &WeylOp, register: &Register) -> f64 {
    let n = register.total_dim();
    let stride = register.stride(0);
    let mut target = vec![0; n];
    let mut phase = vec![ZERO; n];
    let mut source = vec![0; n];
    for j in 0..n {
        let a = register.digit(j, 0);
        let (a2, p) = op.apply_to_basis(a).expect("digit below d");
        target[j] = j - a * stride + a2 * stride;
        phase[j] = op.dim().omega_pow(p);
        source[target[j]] = j;
    }
    let mut total = 0.0;
    for j in 0..n {
        for r in 0..n {
            let sp = s[(r, target[j])] * phase[j];
            let ps = phase[source[r]] * s[(source[r], j)];
            total += (sp - ps).norm_sqr();
        }
    }
    total.sqrt()
}

/// Largest commutator norms over all `d²` errors with the number
/// observable on the shift ancilla.
pub fn snd_commutator_norms(dim: QuditDim) -> Result<(f64, f64)> {
    all_projective(dim).try_fold((0.0f64, 0.0f64), |(mx, mz), e| {
        let (cx, cz) = snd_commutator_norms_for(&e, Slot::ShiftAncilla)?;
        Ok((mx.max(cx), mz.max(cz)))
    })
}

/// `4 (∂⟨O⟩/∂θ)²` from a central difference of `expectation`.
pub fn fisher_from_expectation<F>(expectation: F, theta: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter(format!("step={step} must be positive")));
    }
    let plus = expectation(theta + step)?;
    let minus = expectation(theta - step)?;
    if !plus.is_finite() || !minus.is_finite() {
        return Err(Error::NonFinite("expectation"));
    }
    let derivative = (plus - minus) / (2.0 * step);
    Ok(4.0 * derivative * derivative)
}

/// Fisher information of the family `θ ↦ model(θ)` for a single-site
/// observable.
pub fn fisher_information<M>(model: M, site: usize, observable: &CMatrix, theta: f64, step: f64) -> Result<f64>
where
    M: Fn(f64) -> Result<StateVector>,
{
    fisher_from_expectation(|t| model(t)?.expectation(site, observable), theta, step)
}

/// `1 − |⟨a|b⟩|²`.
pub fn infidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok((1.0 - crate::statevec::fidelity(a, b)?).max(0.0))
}
