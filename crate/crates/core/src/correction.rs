//! Coset decomposition of the Weyl error group and controlled correction.
//!
//! All group arithmetic here is projective: operators are identified by their
//! `(m, n)` exponents and global phases are dropped.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{all_projective, QuditDim, WeylOp};
use crate::error::{Error, Result};
use crate::linalg::{ensure_unitary, CMatrix};
use crate::statevec::StateVector;

type Key = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerSubgroup {
    dim: QuditDim,
    generators: Vec<WeylOp>,
    elements: BTreeSet<Key>,
}

impl StabilizerSubgroup {
    /// The closure of `generators` under composition.
    pub fn generated(dim: QuditDim, generators: &[WeylOp]) -> Result<Self> {
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim.get(), found: g.dim().get() });
            }
        }
        let d = dim.get();
        let mut elements = BTreeSet::from([(0, 0)]);
        let mut queue = VecDeque::from([(0, 0)]);
        while let Some((m, n)) = queue.pop_front() {
            for g in generators {
                let next = ((m + g.m()) % d, (n + g.n()) % d);
                if elements.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        Ok(Self { dim, generators: generators.iter().map(WeylOp::without_phase).collect(), elements })
    }

    /// Accepts an explicit element list only if it is already a subgroup.
    pub fn from_elements(dim: QuditDim, elements: &[WeylOp]) -> Result<Self> {
        let d = dim.get();
        let mut set: BTreeSet<Key> = BTreeSet::new();
        for e in elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: d, found: e.dim().get() });
            }
            set.insert(e.projective_key());
        }
        if !set.contains(&(0, 0)) {
            return Err(Error::NonClosedSubgroup);
        }
        for a in &set {
            for b in &set {
                if !set.contains(&((a.0 + b.0) % d, (a.1 + b.1) % d)) {
                    return Err(Error::NonClosedSubgroup);
                }
            }
        }
        let generators = set.iter().map(|&(m, n)| WeylOp::from_exponents(dim, m as i64, n as i64)).collect();
        Ok(Self { dim, generators, elements: set })
    }

    pub fn singleton(dim: QuditDim) -> Self {
        Self::generated(dim, &[]).expect("empty generator set")
    }

    /// `⟨Z⟩`, the clock subgroup.
    pub fn clock(dim: QuditDim) -> Self {
        Self::generated(dim, &[WeylOp::z(dim)]).expect("Z has the right dimension")
    }

    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    pub fn generators(&self) -> &[WeylOp] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, op: &WeylOp) -> bool {
        op.dim() == self.dim && self.elements.contains(&op.projective_key())
    }

    pub fn elements(&self) -> impl Iterator<Item = WeylOp> + '_ {
        self.elements.iter().map(|&(m, n)| WeylOp::from_exponents(self.dim, m as i64, n as i64))
    }
}

/// Textual subgroup choice: `z`, `singleton`, or a generator `m,n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgroupSpec {
    Singleton,
    Clock,
    Generator(i64, i64),
}

impl SubgroupSpec {
    pub fn build(self, dim: QuditDim) -> StabilizerSubgroup {
        match self {
            SubgroupSpec::Singleton => StabilizerSubgroup::singleton(dim),
            SubgroupSpec::Clock => StabilizerSubgroup::clock(dim),
            SubgroupSpec::Generator(m, n) => StabilizerSubgroup::generated(dim, &[WeylOp::from_exponents(dim, m, n)])
                .expect("generator built with the same dimension"),
        }
    }
}

impl FromStr for SubgroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "singleton" | "trivial" | "none" => Ok(SubgroupSpec::Singleton),
            "z" => Ok(SubgroupSpec::Clock),
            other => {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::InvalidParameter(format!("bad subgroup generator '{s}'")))
                };
                match other.split_once(',') {
                    Some((m, n)) => Ok(SubgroupSpec::Generator(parse(m)?, parse(n)?)),
                    None => {
                        Err(Error::InvalidParameter(format!("unknown subgroup '{s}' (expected z, singleton, or m,n)")))
                    }
                }
            }
        }
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupSpec::Singleton => f.write_str("singleton"),
            SubgroupSpec::Clock => f.write_str("z"),
            SubgroupSpec::Generator(m, n) => write!(f, "{m},{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransversalKind {
    DiagonalTable,
    Canonical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetEntry {
    pub label: usize,
    pub representative: WeylOp,
    pub correction: WeylOp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    dim: QuditDim,
    subgroup: StabilizerSubgroup,
    cosets: Vec<CosetEntry>,
    kind: TransversalKind,
    lookup: BTreeMap<Key, usize>,
}

impl CosetTable {
    /// Builds a table from representatives in label order. Fails if two
    /// representatives share a coset or some coset is missed.
    fn from_representatives(subgroup: StabilizerSubgroup, reps: Vec<WeylOp>, kind: TransversalKind) -> Result<Self> {
        let dim = subgroup.dim;
        let d = dim.get();
        let mut lookup = BTreeMap::new();
        let mut cosets = Vec::with_capacity(reps.len());
        for (label, rep) in reps.into_iter().enumerate() {
            for (hm, hn) in &subgroup.elements {
                let key = ((rep.m() + hm) % d, (rep.n() + hn) % d);
                if lookup.insert(key, label).is_some() {
                    return Err(Error::DuplicateLabel(label));
                }
            }
            let representative = rep.without_phase();
            cosets.push(CosetEntry { label, correction: representative.inverse().without_phase(), representative });
        }
        if lookup.len() != d * d {
            return Err(Error::InvalidParameter("representatives do not cover the error group".into()));
        }
        Ok(Self { dim, subgroup, cosets, kind, lookup })
    }

    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    pub fn subgroup(&self) -> &StabilizerSubgroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &[CosetEntry] {
        &self.cosets
    }

    pub fn kind(&self) -> TransversalKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn entry(&self, label: usize) -> Option<&CosetEntry> {
        self.cosets.get(label)
    }

    /// The label of the coset holding the identity.
    pub fn identity_label(&self) -> usize {
        self.lookup[&(0, 0)]
    }

    /// Writes `syndrome,rep_m,rep_n,corr_m,corr_n`, one row per coset.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["syndrome", "rep_m", "rep_n", "corr_m", "corr_n"]).map_err(io)?;
        for c in &self.cosets {
            w.write_record([
                c.label.to_string(),
                c.representative.m().to_string(),
                c.representative.n().to_string(),
                c.correction.m().to_string(),
                c.correction.n().to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Partitions the `d²` errors into cosets `H·E`. Each coset is represented
/// by its lexicographically least `(m, n)`; labels follow that order.
pub fn build_cosets(dim: QuditDim, subgroup: &StabilizerSubgroup) -> Result<CosetTable> {
    if subgroup.dim != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: subgroup.dim.get() });
    }
    let d = dim.get();
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    // all_projective walks (m, n) lexicographically, so the first unseen
    // element of each coset is its least member.
    for e in all_projective(dim) {
        if seen.contains(&e.projective_key()) {
            continue;
        }
        for (hm, hn) in &subgroup.elements {
            seen.insert(((e.m() + hm) % d, (e.n() + hn) % d));
        }
        reps.push(e);
    }
    CosetTable::from_representatives(subgroup.clone(), reps, TransversalKind::Canonical)
}

/// The diagonal transversal of `⟨Z⟩`: label `i` holds `X^{i+1} Z^i`.
///
/// Followed literally the pattern wraps at `i = d−1` to `X^0 Z^{d−1}`; for
/// `d ≥ 4` the last two labels are exchanged so that the final row is
/// `X^{d−1} Z^{d−2}`. For `d ≤ 3` that row would repeat an earlier label, so
/// the plain pattern is kept.
pub fn diagonal_table(dim: QuditDim) -> CosetTable {
    let d = dim.get();
    let mut reps: Vec<WeylOp> = (0..d).map(|i| WeylOp::from_exponents(dim, i as i64 + 1, i as i64)).collect();
    if d >= 4 {
        reps.swap(d - 2, d - 1);
    }
    CosetTable::from_representatives(StabilizerSubgroup::clock(dim), reps, TransversalKind::DiagonalTable)
        .expect("X^{i+1} Z^i hits every shift exactly once")
}

/// Label of the coset containing `error`.
pub fn classify(error: &WeylOp, table: &CosetTable) -> Result<usize> {
    if error.dim() != table.dim {
        return Err(Error::DimensionMismatch { expected: table.dim.get(), found: error.dim().get() });
    }
    Ok(table.lookup[&error.projective_key()])
}

/// Residual `correction(classify(E))·E`, which lies in the subgroup.
pub fn residual(error: &WeylOp, table: &CosetTable) -> Result<WeylOp> {
    let label = classify(error, table)?;
    table.cosets[label].correction.compose(error)
}

/// Controlled branches keyed by syndrome label, plus the map from ancilla
/// readouts to labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionPlan {
    dim: QuditDim,
    entries: BTreeMap<usize, CMatrix>,
    readout: BTreeMap<Key, usize>,
}

impl CorrectionPlan {
    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &CMatrix)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn branch(&self, label: usize) -> Option<&CMatrix> {
        self.entries.get(&label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Label for the ancilla readout `(α, β)`.
    pub fn label_for(&self, alpha: usize, beta: usize) -> Option<usize> {
        self.readout.get(&(alpha, beta)).copied()
    }

    /// Drops the branch for `label`; used to exercise missing-branch handling.
    pub fn without_branch(mut self, label: usize) -> Self {
        self.entries.remove(&label);
        self
    }
}

/// One branch per syndrome label carrying the correction matrix.
pub fn plan_correction(table: &CosetTable) -> Result<CorrectionPlan> {
    let mut entries = BTreeMap::new();
    for c in &table.cosets {
        let u = c.correction.matrix();
        ensure_unitary(&u, 1e-12)?;
        if entries.insert(c.label, u).is_some() {
            return Err(Error::DuplicateLabel(c.label));
        }
    }
    Ok(CorrectionPlan { dim: table.dim, entries, readout: table.lookup.clone() })
}

/// `Σ_s |s⟩⟨s| ⊗ U_s` with the syndrome held in the ancillas.
///
/// With one ancilla its value is the label. With two, they hold `(α, β)` and
/// the label is looked up from the table. Populated syndromes without a
/// branch are an error.
pub fn apply_correction(
    state: &StateVector,
    syndrome_anc_sites: &[usize],
    data_site: usize,
    plan: &CorrectionPlan,
) -> Result<StateVector> {
    let reg = state.register();
    let d = plan.dim.get();
    if reg.site_dim(data_site)? != d {
        return Err(Error::DimensionMismatch { expected: d, found: reg.site_dim(data_site)? });
    }
    if syndrome_anc_sites.is_empty() || syndrome_anc_sites.len() > 2 {
        return Err(Error::InvalidParameter(format!(
            "expected one or two syndrome ancillas, got {}",
            syndrome_anc_sites.len()
        )));
    }
    for (i, &a) in syndrome_anc_sites.iter().enumerate() {
        reg.site_dim(a)?;
        if a == data_site || syndrome_anc_sites[i + 1..].contains(&a) {
            return Err(Error::SiteCollision(a));
        }
    }

    let label_of = |values: &[usize]| -> Option<usize> {
        match values {
            [s] => Some(*s),
            [a, b] => plan.label_for(*a, *b),
            _ => None,
        }
    };
    for idx in 0..state.amplitudes().len() {
        if state.amplitudes()[idx].norm_sqr() < 1e-24 {
            continue;
        }
        let values: Vec<usize> = syndrome_anc_sites.iter().map(|&s| reg.digit(idx, s)).collect();
        match label_of(&values) {
            Some(label) if plan.entries.contains_key(&label) => {}
            Some(label) => return Err(Error::MissingBranch(label)),
            None => return Err(Error::MissingBranch(values[0])),
        }
    }

    let mut out = state.clone();
    out.apply_multi_controlled_unchecked(syndrome_anc_sites, data_site, |values| {
        label_of(values).and_then(|l| plan.entries.get(&l))
    });
    Ok(out)
}
