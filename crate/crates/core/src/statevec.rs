//! Dense state-vector simulation of a register of qudits.
//!
//! Amplitudes are flattened row-major with site 0 most significant, so for
//! dims `(5, 3)` the label `(4, 2)` lives at index `4·3 + 2 = 14`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, ensure_unitary, CMatrix, ZERO};

/// Default ceiling on the number of amplitudes in a register.
pub const DEFAULT_AMPLITUDE_CAP: usize = 1 << 20;

/// Tolerance used when validating caller-supplied unitaries and observables.
pub const OPERATOR_TOL: f64 = 1e-10;

const NORM_TOL: f64 = 1e-10;
const MARGINAL_FLOOR: f64 = 1e-15;

/// Ordered site dimensions of a qudit register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Register {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_AMPLITUDE_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyInput("register needs at least one site"));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(bad));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cap)
                .ok_or(Error::RegisterTooLarge { total: total.saturating_mul(d), cap })?;
        }
        let mut strides = vec![1; dims.len()];
        for s in (0..dims.len() - 1).rev() {
            strides[s] = strides[s + 1] * dims[s + 1];
        }
        Ok(Self { dims, strides, total })
    }

    /// `count` sites of equal dimension `d`.
    pub fn uniform(d: usize, count: usize) -> Result<Self> {
        Self::new(vec![d; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn site_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn site_dim(&self, site: usize) -> Result<usize> {
        self.check_site(site)?;
        Ok(self.dims[site])
    }

    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.dims.len() {
            return Err(Error::SiteOutOfRange { site, sites: self.dims.len() });
        }
        Ok(())
    }

    pub fn flatten(&self, labels: &[usize]) -> Result<usize> {
        if labels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), found: labels.len() });
        }
        let mut idx = 0;
        for (s, (&l, &d)) in labels.iter().zip(&self.dims).enumerate() {
            if l >= d {
                return Err(Error::IndexOutOfRange { index: l, bound: d });
            }
            idx += l * self.strides[s];
        }
        Ok(idx)
    }

    /// Label of `site` within flattened index `idx`.
    #[inline]
    pub fn digit(&self, idx: usize, site: usize) -> usize {
        (idx / self.strides[site]) % self.dims[site]
    }
}

/// A normalized pure state on a [`Register`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    register: Register,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis_state(register: Register, labels: &[usize]) -> Result<Self> {
        let idx = register.flatten(labels)?;
        let mut amps = vec![ZERO; register.total_dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { register, amps })
    }

    /// Wraps caller amplitudes; they must already be unit-norm.
    pub fn from_amplitudes(register: Register, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != register.total_dim() {
            return Err(Error::DimensionMismatch { expected: register.total_dim(), found: amps.len() });
        }
        let norm = norm(&amps);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { register, amps })
    }

    /// Normalizes `amps` before wrapping them.
    pub fn normalized(register: Register, mut amps: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amps);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotNormalized { norm: n });
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::from_amplitudes(register, amps)
    }

    /// Haar-random pure state from normalized complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(register: Register, rng: &mut R) -> Result<Self> {
        use rand_distr::StandardNormal;
        let amps = (0..register.total_dim())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(register, amps)
    }

    /// Product state from one amplitude vector per site.
    pub fn product(register: Register, factors: &[Vec<Complex64>]) -> Result<Self> {
        if factors.len() != register.site_count() {
            return Err(Error::DimensionMismatch { expected: register.site_count(), found: factors.len() });
        }
        for (f, &d) in factors.iter().zip(register.dims()) {
            if f.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: f.len() });
            }
        }
        let amps = (0..register.total_dim())
            .map(|idx| factors.iter().enumerate().map(|(s, f)| f[register.digit(idx, s)]).product::<Complex64>())
            .collect();
        Self::normalized(register, amps)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Applies a `d×d` unitary to one site.
    pub fn apply_site_unitary(&mut self, site: usize, u: &CMatrix) -> Result<()> {
        let d = self.register.site_dim(site)?;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: u.nrows() });
        }
        ensure_unitary(u, OPERATOR_TOL)?;
        self.apply_site_matrix_unchecked(site, u);
        Ok(())
    }

    /// Applies a unitary acting on the whole register.
    pub fn apply_unitary(&mut self, u: &CMatrix) -> Result<()> {
        let n = self.register.total_dim();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: u.nrows() });
        }
        ensure_unitary(u, OPERATOR_TOL)?;
        self.apply_full_unchecked(u);
        Ok(())
    }

    pub(crate) fn apply_full_unchecked(&mut self, u: &CMatrix) {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let out = u * v;
        self.amps.copy_from_slice(out.as_slice());
    }

    /// Applies a diagonal site operator given by its entries. Used for phase
    /// ladders where building a full matrix is wasteful.
    pub fn apply_site_phases(&mut self, site: usize, phases: &[Complex64]) -> Result<()> {
        let d = self.register.site_dim(site)?;
        if phases.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: phases.len() });
        }
        if let Some(bad) = phases.iter().find(|z| (z.norm() - 1.0).abs() > OPERATOR_TOL) {
            return Err(Error::NotUnitary { deviation: (bad.norm() - 1.0).abs() });
        }
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= phases[self.register.digit(idx, site)];
        }
        Ok(())
    }

    pub(crate) fn apply_site_matrix_unchecked(&mut self, site: usize, u: &CMatrix) {
        let d = self.register.dims[site];
        let stride = self.register.strides[site];
        let block = stride * d;
        let mut buf = vec![ZERO; d];
        for outer in (0..self.amps.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, b) in buf.iter_mut().enumerate() {
                    *b = self.amps[base + k * stride];
                }
                for r in 0..d {
                    let mut acc = ZERO;
                    for (c, b) in buf.iter().enumerate() {
                        acc += u[(r, c)] * b;
                    }
                    self.amps[base + r * stride] = acc;
                }
            }
        }
    }

    /// Block-diagonal controlled operation `Σ_s |s⟩⟨s| ⊗ U_s`. Control values
    /// without an entry in `branches` act as identity.
    pub fn apply_controlled(
        &mut self,
        control_site: usize,
        target_site: usize,
        branches: &BTreeMap<usize, CMatrix>,
    ) -> Result<()> {
        let cd = self.register.site_dim(control_site)?;
        let td = self.register.site_dim(target_site)?;
        if control_site == target_site {
            return Err(Error::SiteCollision(control_site));
        }
        for (&value, u) in branches {
            if value >= cd {
                return Err(Error::IndexOutOfRange { index: value, bound: cd });
            }
            if u.nrows() != td || u.ncols() != td {
                return Err(Error::DimensionMismatch { expected: td, found: u.nrows() });
            }
            ensure_unitary(u, OPERATOR_TOL)?;
        }
        self.apply_multi_controlled_unchecked(&[control_site], target_site, |values| branches.get(&values[0]));
        Ok(())
    }

    /// Applies `branch(control_values)` to the target for each joint control
    /// configuration; `None` means identity. Validation is the caller's job.
    pub(crate) fn apply_multi_controlled_unchecked<'a, F>(&mut self, controls: &[usize], target: usize, branch: F)
    where
        F: Fn(&[usize]) -> Option<&'a CMatrix>,
    {
        let td = self.register.dims[target];
        let tstride = self.register.strides[target];
        let mut values = vec![0; controls.len()];
        let mut buf = vec![ZERO; td];
        for base in 0..self.amps.len() {
            if self.register.digit(base, target) != 0 {
                continue;
            }
            for (v, &c) in values.iter_mut().zip(controls) {
                *v = self.register.digit(base, c);
            }
            let Some(u) = branch(&values) else { continue };
            for (k, b) in buf.iter_mut().enumerate() {
                *b = self.amps[base + k * tstride];
            }
            for r in 0..td {
                let mut acc = ZERO;
                for (c, b) in buf.iter().enumerate() {
                    acc += u[(r, c)] * b;
                }
                self.amps[base + r * tstride] = acc;
            }
        }
    }

    /// Marginal outcome probabilities of one site.
    pub fn site_probabilities(&self, site: usize) -> Result<Vec<f64>> {
        let d = self.register.site_dim(site)?;
        let mut probs = vec![0.0; d];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[self.register.digit(idx, site)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Reduced density matrix of a single site.
    pub fn reduced_density_matrix(&self, site: usize) -> Result<CMatrix> {
        let d = self.register.site_dim(site)?;
        let stride = self.register.strides[site];
        let mut rho = CMatrix::from_element(d, d, ZERO);
        for base in 0..self.amps.len() {
            if self.register.digit(base, site) != 0 {
                continue;
            }
            for r in 0..d {
                let ar = self.amps[base + r * stride];
                if ar == ZERO {
                    continue;
                }
                for c in 0..d {
                    rho[(r, c)] += ar * self.amps[base + c * stride].conj();
                }
            }
        }
        Ok(rho)
    }

    /// `⟨φ|ρ_site|φ⟩` for a pure single-site target `φ`.
    pub fn site_fidelity(&self, site: usize, target: &[Complex64]) -> Result<f64> {
        let rho = self.reduced_density_matrix(site)?;
        if target.len() != rho.nrows() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), found: target.len() });
        }
        let mut acc = ZERO;
        for r in 0..target.len() {
            for c in 0..target.len() {
                acc += target[r].conj() * rho[(r, c)] * target[c];
            }
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// `⟨ψ|O_site|ψ⟩` for a Hermitian single-site observable.
    pub fn expectation(&self, site: usize, observable: &CMatrix) -> Result<f64> {
        let d = self.register.site_dim(site)?;
        if observable.nrows() != d || observable.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: observable.nrows() });
        }
        ensure_hermitian(observable, OPERATOR_TOL)?;
        let rho = self.reduced_density_matrix(site)?;
        let value = (rho * observable).trace();
        if value.im.abs() > OPERATOR_TOL {
            return Err(Error::NotHermitian { deviation: value.im.abs() });
        }
        if !value.re.is_finite() {
            return Err(Error::NonFinite("expectation"));
        }
        Ok(value.re)
    }

    /// Projects `site` onto `outcome` and renormalizes. Returns the
    /// pre-collapse probability of that outcome.
    pub fn collapse_site(&mut self, site: usize, outcome: usize) -> Result<f64> {
        let d = self.register.site_dim(site)?;
        if outcome >= d {
            return Err(Error::IndexOutOfRange { index: outcome, bound: d });
        }
        let prob: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.register.digit(*idx, site) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if prob < MARGINAL_FLOOR {
            return Err(Error::ZeroMarginal { site, outcome });
        }
        let scale = 1.0 / prob.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if self.register.digit(idx, site) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        Ok(prob)
    }

    /// Born-rule measurement of one site in the computational basis.
    pub fn measure_site<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<usize> {
        let probs = self.site_probabilities(site)?;
        let outcome = sample_index(&probs, rng);
        self.collapse_site(site, outcome)?;
        Ok(outcome)
    }

    /// One line per nonzero amplitude: `index<TAB>real<TAB>imag`, ascending.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (idx, a) in self.amps.iter().enumerate() {
            if *a != ZERO {
                let _ = writeln!(out, "{idx}\t{}\t{}", format_float(a.re), format_float(a.im));
            }
        }
        out
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.register != b.register {
        return Err(Error::DimensionMismatch { expected: a.register.total_dim(), found: b.register.total_dim() });
    }
    let overlap: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Formats a float with 17 significant digits and a lowercase exponent.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Samples an index from (possibly unnormalized) non-negative weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_nonzero = k;
        }
        acc += w;
        if u < acc {
            return k;
        }
    }
    last_nonzero
}

fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{QuditDim, WeylOp};
    use crate::linalg::{identity, kron, real_diagonal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        use rand_distr::StandardNormal;
        let a = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        a.qr().q()
    }

    #[test]
    fn basis_state_flattening() {
        let s = StateVector::basis_state(Register::new(vec![3]).unwrap(), &[0]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0), c(0.0)]);
        let s = StateVector::basis_state(Register::new(vec![2, 2]).unwrap(), &[1, 0]).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0));
        let s = StateVector::basis_state(Register::new(vec![5, 3]).unwrap(), &[4, 2]).unwrap();
        assert_eq!(s.amplitudes()[14], c(1.0));
        assert!(matches!(
            StateVector::basis_state(Register::new(vec![5, 3]).unwrap(), &[4, 3]),
            Err(Error::IndexOutOfRange { index: 3, bound: 3 })
        ));
    }

    #[test]
    fn register_cap_enforced() {
        assert!(matches!(Register::new(vec![2; 21]), Err(Error::RegisterTooLarge { .. })));
        assert!(Register::new(vec![2; 20]).is_ok());
        assert!(Register::with_cap(vec![3, 3], 8).is_err());
        assert!(Register::new(vec![]).is_err());
        assert!(matches!(Register::new(vec![3, 1]), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn shift_on_qutrit() {
        let d = QuditDim::new(3).unwrap();
        let mut s = StateVector::basis_state(Register::new(vec![3]).unwrap(), &[0]).unwrap();
        s.apply_site_unitary(0, &WeylOp::x(d).matrix()).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0));
        s.apply_site_unitary(0, &identity(3)).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0));
    }

    #[test]
    fn site_unitary_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let reg = Register::new(vec![3, 4]).unwrap();
        let psi = StateVector::random(reg, &mut rng).unwrap();
        let u = random_unitary(4, &mut rng);
        let full = kron(&identity(3), &u);
        let v = nalgebra::DVector::from_vec(psi.amplitudes().to_vec());
        let expected = &full * v;
        let mut out = psi.clone();
        out.apply_site_unitary(1, &u).unwrap();
        for (a, b) in out.amplitudes().iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let mut s = StateVector::basis_state(Register::new(vec![2]).unwrap(), &[0]).unwrap();
        let bad = real_diagonal(&[1.0, 2.0]);
        assert!(matches!(s.apply_site_unitary(0, &bad), Err(Error::NotUnitary { .. })));
        assert!(matches!(s.apply_site_unitary(0, &identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cnot_truth_table() {
        let d = QuditDim::new(2).unwrap();
        let branches = BTreeMap::from([(1, WeylOp::x(d).matrix())]);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut s = StateVector::basis_state(Register::new(vec![2, 2]).unwrap(), &[a, b]).unwrap();
            s.apply_controlled(0, 1, &branches).unwrap();
            let expected = 2 * a + (b ^ a);
            assert_eq!(s.amplitudes()[expected], c(1.0));
        }
    }

    #[test]
    fn controlled_identity_and_collision() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = StateVector::random(Register::new(vec![3, 3]).unwrap(), &mut rng).unwrap();
        let mut s = psi.clone();
        let branches = BTreeMap::from([(0, identity(3)), (2, identity(3))]);
        s.apply_controlled(0, 1, &branches).unwrap();
        assert!((fidelity(&s, &psi).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(s.apply_controlled(1, 1, &branches), Err(Error::SiteCollision(1))));
    }

    #[test]
    fn controlled_shift_matches_block_matrix() {
        let d = QuditDim::new(3).unwrap();
        let x = WeylOp::x(d).matrix();
        let branches = BTreeMap::from([(0, identity(3)), (1, x.clone()), (2, &x * &x)]);
        let reg = Register::new(vec![3, 3]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let uniform = vec![c(s); 3];
        let zero = vec![c(1.0), c(0.0), c(0.0)];
        let mut psi = StateVector::product(reg, &[uniform, zero]).unwrap();
        let input = nalgebra::DVector::from_vec(psi.amplitudes().to_vec());
        // Σ_s |s⟩⟨s| ⊗ X^s assembled block by block.
        let mut block = CMatrix::from_element(9, 9, ZERO);
        for sv in 0..3 {
            let u = &branches[&sv];
            for r in 0..3 {
                for col in 0..3 {
                    block[(sv * 3 + r, sv * 3 + col)] = u[(r, col)];
                }
            }
        }
        let expected = block * input;
        psi.apply_controlled(0, 1, &branches).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn fidelity_basics() {
        let reg = Register::new(vec![2]).unwrap();
        let zero = StateVector::basis_state(reg.clone(), &[0]).unwrap();
        let one = StateVector::basis_state(reg.clone(), &[1]).unwrap();
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = StateVector::random(Register::new(vec![3, 2]).unwrap(), &mut rng).unwrap();
        let phase = Complex64::from_polar(1.0, 0.7);
        let rotated =
            StateVector::from_amplitudes(psi.register().clone(), psi.amplitudes().iter().map(|a| a * phase).collect())
                .unwrap();
        assert!((fidelity(&psi, &rotated).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&psi, &zero).is_err());
    }

    #[test]
    fn measurement_of_basis_state_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = StateVector::basis_state(Register::new(vec![4]).unwrap(), &[2]).unwrap();
        for _ in 0..10 {
            assert_eq!(s.measure_site(0, &mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn bell_correlation() {
        let h = 1.0 / 2f64.sqrt();
        let reg = Register::new(vec![2, 2]).unwrap();
        let bell = StateVector::from_amplitudes(reg, vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        let mut seen = [false; 2];
        for seed in 0..32 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = bell.clone();
            let a = s.measure_site(0, &mut rng).unwrap();
            let b = s.measure_site(1, &mut rng).unwrap();
            assert_eq!(a, b);
            seen[a] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn born_rule_frequencies() {
        let reg = Register::new(vec![5]).unwrap();
        let uniform = StateVector::normalized(reg, vec![c(1.0); 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            let mut s = uniform.clone();
            counts[s.measure_site(0, &mut rng).unwrap()] += 1;
        }
        let p = 0.2;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for &n in &counts {
            assert!((n as f64 - draws as f64 * p).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn measurement_transcripts_are_seeded() {
        let reg = Register::new(vec![3, 3]).unwrap();
        let transcript = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = StateVector::random(reg.clone(), &mut rng).unwrap();
            (0..20)
                .map(|_| {
                    let mut s = psi.clone();
                    (s.measure_site(0, &mut rng).unwrap(), s.measure_site(1, &mut rng).unwrap())
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(transcript(5), transcript(5));
    }

    #[test]
    fn zero_marginal_collapse_errors() {
        let mut s = StateVector::basis_state(Register::new(vec![3]).unwrap(), &[0]).unwrap();
        assert!(matches!(s.collapse_site(0, 2), Err(Error::ZeroMarginal { .. })));
    }

    #[test]
    fn expectation_values() {
        let zero = StateVector::basis_state(Register::new(vec![2]).unwrap(), &[0]).unwrap();
        assert!((zero.expectation(0, &real_diagonal(&[1.0, -1.0])).unwrap() - 1.0).abs() < 1e-15);
        let uniform = StateVector::normalized(Register::new(vec![3]).unwrap(), vec![c(1.0); 3]).unwrap();
        assert!((uniform.expectation(0, &real_diagonal(&[0.0, 1.0, 2.0])).unwrap() - 1.0).abs() < 1e-14);
        let d = QuditDim::new(3).unwrap();
        assert!(matches!(uniform.expectation(0, &WeylOp::x(d).matrix()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn expectation_matches_dense_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let reg = Register::new(vec![2, 3, 2]).unwrap();
        let psi = StateVector::random(reg, &mut rng).unwrap();
        let a = random_unitary(3, &mut rng);
        let obs = (&a + a.adjoint()) * c(0.5);
        let full = kron(&kron(&identity(2), &obs), &identity(2));
        let v = nalgebra::DVector::from_vec(psi.amplitudes().to_vec());
        let oracle = (v.adjoint() * (&full * &v))[(0, 0)].re;
        assert!((psi.expectation(1, &obs).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn dump_format() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let reg = Register::new(vec![2, 2]).unwrap();
        let s = StateVector::from_amplitudes(reg, vec![c(h), c(0.0), c(0.0), Complex64::new(0.0, -h)]).unwrap();
        assert_eq!(
            s.dump(),
            "0\t7.0710678118654757e-1\t0.0000000000000000e0\n3\t0.0000000000000000e0\t-7.0710678118654757e-1\n"
        );
    }
}
