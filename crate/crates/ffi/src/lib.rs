//! C interface to `qudit-memory`.
//!
//! Every fallible function returns a [`QmStatus`] and writes results through
//! out-pointers. On failure, [`qm_last_error_message`] describes the most
//! recent error on the calling thread. Handles returned by `*_new` or `*_run`
//! must be released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qudit_memory::algebra::{QuditDim, WeylOp};
use qudit_memory::correction::{build_cosets, classify, diagonal_table, CosetTable, StabilizerSubgroup, SubgroupSpec};
use qudit_memory::fourier::{truncation_error, Stage};
use qudit_memory::harness::{run_cycle, CycleRecord, CycleSummary, ExperimentConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 2,
    /// A simulation produced a state that breaks a physical invariant.
    InvariantViolation = 3,
    /// The library panicked; this is a bug.
    Panic = 4,
}

/// The Weyl operator `ω^p X^m Z^n`. Outputs are reduced into `[0, d)`;
/// inputs may be any integers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QmWeyl {
    pub m: i64,
    pub n: i64,
    pub p: i64,
}

/// Which syndrome table to build.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmTableKind {
    /// The `d` diagonal cosets `X^{i+1}Z^i`, one per syndrome.
    Diagonal = 0,
    /// Every error is its own coset.
    Singleton = 1,
    /// Cosets of the clock subgroup generated by `Z`.
    Clock = 2,
    /// Cosets of the cyclic subgroup generated by a given operator.
    Generator = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QmCosetEntry {
    pub label: usize,
    pub representative: QmWeyl,
    pub correction: QmWeyl,
}

/// Opaque syndrome table.
pub struct QmCosetTable {
    inner: CosetTable,
}

/// Settings for a batch of memory cycles. `cutoff = 0` picks the default
/// coarse cutoff. `subgroup` must not be `Diagonal`; `generator` is read
/// only when it is `Generator`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmCycleConfig {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub sigma_shift: f64,
    pub sigma_phase: f64,
    pub cutoff: usize,
    pub epsilon: f64,
    pub subgroup: QmTableKind,
    pub generator: QmWeyl,
    pub parallel: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmCycleRecord {
    pub trial: usize,
    pub error_m: usize,
    pub error_n: usize,
    pub syndrome: usize,
    pub escalated: bool,
    pub gate_cost: u64,
    pub fidelity_after: f64,
    pub corrected: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmCycleSummary {
    pub trials: usize,
    pub cutoff: usize,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub corrected_rate: f64,
    pub escalation_rate: f64,
    pub mean_gate_cost: f64,
}

/// Opaque per-trial records and summary of a cycle run.
pub struct QmCycleResults {
    records: Vec<CycleRecord>,
    summary: CycleSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: QmStatus,
    message: String,
}

impl From<qudit_memory::Error> for Failure {
    fn from(e: qudit_memory::Error) -> Self {
        let status = if e.is_invariant_violation() { QmStatus::InvariantViolation } else { QmStatus::InvalidArgument };
        Failure { status, message: e.to_string() }
    }
}

fn null(name: &str) -> Failure {
    Failure { status: QmStatus::NullPointer, message: format!("{name} is null") }
}

fn invalid(message: String) -> Failure {
    Failure { status: QmStatus::InvalidArgument, message }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QmStatus::Ok,
        Ok(Err(f)) => {
            set_last_error(f.message);
            f.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {what}"));
            QmStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(name))
}

fn to_weyl(dim: QuditDim, w: QmWeyl) -> WeylOp {
    WeylOp::new(dim, w.m, w.n, w.p)
}

fn from_weyl(w: &WeylOp) -> QmWeyl {
    QmWeyl { m: w.m() as i64, n: w.n() as i64, p: w.p() as i64 }
}

/// Message of the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// `out = a·b` in dimension `d`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_weyl_compose(d: usize, a: QmWeyl, b: QmWeyl, out: *mut QmWeyl) -> QmStatus {
    guard(|| {
        let dim = QuditDim::new(d)?;
        let c = to_weyl(dim, a).compose(&to_weyl(dim, b))?;
        write(out, "out", from_weyl(&c))
    })
}

/// `out = a⁻¹` in dimension `d`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_weyl_inverse(d: usize, a: QmWeyl, out: *mut QmWeyl) -> QmStatus {
    guard(|| {
        let dim = QuditDim::new(d)?;
        write(out, "out", from_weyl(&to_weyl(dim, a).inverse()))
    })
}

/// Amplitude `Σ_{j=K}^{d−1} ω^{jΔ}` dropped by truncating the transform to
/// its first `K` frequencies.
///
/// # Safety
/// `re` and `im` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_truncation_error(
    d: usize,
    cutoff: usize,
    delta: i64,
    re: *mut f64,
    im: *mut f64,
) -> QmStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let z = truncation_error(d, cutoff, delta)?;
        write(re, "re", z.re)?;
        write(im, "im", z.im)
    })
}

/// Builds a syndrome table. `generator` is read only for
/// `QM_TABLE_KIND_GENERATOR`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_coset_table_new(
    d: usize,
    kind: QmTableKind,
    generator: QmWeyl,
    out: *mut *mut QmCosetTable,
) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dim = QuditDim::new(d)?;
        let inner = match kind {
            QmTableKind::Diagonal => diagonal_table(dim),
            QmTableKind::Singleton => build_cosets(dim, &StabilizerSubgroup::singleton(dim))?,
            QmTableKind::Clock => build_cosets(dim, &StabilizerSubgroup::clock(dim))?,
            QmTableKind::Generator => {
                build_cosets(dim, &StabilizerSubgroup::generated(dim, &[to_weyl(dim, generator)])?)?
            }
        };
        write(out, "out", Box::into_raw(Box::new(QmCosetTable { inner })))
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must be null or a handle from `qm_coset_table_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qm_coset_table_free(table: *mut QmCosetTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of cosets, which is also the number of syndrome labels.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_coset_table_len(table: *const QmCosetTable, out: *mut usize) -> QmStatus {
    guard(|| write(out, "out", borrow(table, "table")?.inner.len()))
}

/// The coset with syndrome `label`.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_coset_table_entry(
    table: *const QmCosetTable,
    label: usize,
    out: *mut QmCosetEntry,
) -> QmStatus {
    guard(|| {
        let t = &borrow(table, "table")?.inner;
        let e = t.entry(label).ok_or_else(|| invalid(format!("label {label} out of range (table has {})", t.len())))?;
        write(
            out,
            "out",
            QmCosetEntry {
                label: e.label,
                representative: from_weyl(&e.representative),
                correction: from_weyl(&e.correction),
            },
        )
    })
}

/// Syndrome label of `error`.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_coset_table_classify(
    table: *const QmCosetTable,
    error: QmWeyl,
    out: *mut usize,
) -> QmStatus {
    guard(|| {
        let t = &borrow(table, "table")?.inner;
        write(out, "out", classify(&to_weyl(t.dim(), error), t)?)
    })
}

/// The command-line defaults: `d = 5`, 1000 trials, seed 42, `σ = 0.5`,
/// clock subgroup, parallel.
#[no_mangle]
pub extern "C" fn qm_cycle_config_default() -> QmCycleConfig {
    let c = ExperimentConfig::default();
    QmCycleConfig {
        d: c.d,
        trials: c.trials,
        seed: c.seed,
        sigma_shift: c.sigma_shift,
        sigma_phase: c.sigma_phase,
        cutoff: 0,
        epsilon: c.epsilon,
        subgroup: QmTableKind::Clock,
        generator: QmWeyl { m: 0, n: 1, p: 0 },
        parallel: c.parallel,
    }
}

fn experiment(c: &QmCycleConfig) -> Result<ExperimentConfig, Failure> {
    let subgroup = match c.subgroup {
        QmTableKind::Singleton => SubgroupSpec::Singleton,
        QmTableKind::Clock => SubgroupSpec::Clock,
        QmTableKind::Generator => SubgroupSpec::Generator(c.generator.m, c.generator.n),
        QmTableKind::Diagonal => return Err(invalid("the diagonal table cannot drive a memory cycle".into())),
    };
    Ok(ExperimentConfig {
        d: c.d,
        trials: c.trials,
        seed: c.seed,
        sigma_shift: c.sigma_shift,
        sigma_phase: c.sigma_phase,
        cutoff: (c.cutoff != 0).then_some(c.cutoff),
        epsilon: c.epsilon,
        subgroup,
        parallel: c.parallel,
        ..ExperimentConfig::default()
    })
}

/// Runs `config.trials` seeded memory cycles.
///
/// # Safety
/// `config` must point to a valid config; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_cycle_run(config: *const QmCycleConfig, out: *mut *mut QmCycleResults) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = experiment(borrow(config, "config")?)?;
        let (records, summary) = run_cycle(&config)?;
        write(out, "out", Box::into_raw(Box::new(QmCycleResults { records, summary })))
    })
}

/// Releases cycle results. Null is ignored.
///
/// # Safety
/// `results` must be null or a handle from `qm_cycle_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qm_cycle_results_free(results: *mut QmCycleResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Number of trial records.
///
/// # Safety
/// `results` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_cycle_results_len(results: *const QmCycleResults, out: *mut usize) -> QmStatus {
    guard(|| write(out, "out", borrow(results, "results")?.records.len()))
}

/// Record of trial `index`.
///
/// # Safety
/// `results` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_cycle_results_record(
    results: *const QmCycleResults,
    index: usize,
    out: *mut QmCycleRecord,
) -> QmStatus {
    guard(|| {
        let records = &borrow(results, "results")?.records;
        let r = records
            .get(index)
            .ok_or_else(|| invalid(format!("record {index} out of range ({} trials)", records.len())))?;
        write(
            out,
            "out",
            QmCycleRecord {
                trial: r.trial,
                error_m: r.error_m,
                error_n: r.error_n,
                syndrome: r.syndrome,
                escalated: r.stage == Stage::Full,
                gate_cost: r.gate_cost,
                fidelity_after: r.fidelity_after,
                corrected: r.corrected,
            },
        )
    })
}

/// Aggregate statistics of the run.
///
/// # Safety
/// `results` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_cycle_results_summary(
    results: *const QmCycleResults,
    out: *mut QmCycleSummary,
) -> QmStatus {
    guard(|| {
        let s = &borrow(results, "results")?.summary;
        write(
            out,
            "out",
            QmCycleSummary {
                trials: s.trials,
                cutoff: s.cutoff,
                mean_fidelity: s.mean_fidelity,
                min_fidelity: s.min_fidelity,
                corrected_rate: s.corrected_rate,
                escalation_rate: s.escalation_rate,
                mean_gate_cost: s.mean_gate_cost,
            },
        )
    })
}
