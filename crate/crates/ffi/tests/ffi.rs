use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qudit_memory::algebra::{all_projective, QuditDim, WeylOp};
use qudit_memory::correction::{build_cosets, classify, StabilizerSubgroup};
use qudit_memory::fourier::truncation_error;
use qudit_memory::harness::{run_cycle, ExperimentConfig};
use qudit_memory_ffi::*;

fn last_error() -> String {
    let p = qm_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn weyl(m: i64, n: i64, p: i64) -> QmWeyl {
    QmWeyl { m, n, p }
}

#[test]
fn weyl_arithmetic_matches_core() {
    for d in 2..=7usize {
        let dim = QuditDim::new(d).unwrap();
        for (a, b) in [((1, 0, 0), (0, 1, 0)), ((0, 1, 0), (1, 0, 0)), ((3, -2, 5), (-7, 4, 1))] {
            let mut out = weyl(0, 0, 0);
            let status = unsafe { qm_weyl_compose(d, weyl(a.0, a.1, a.2), weyl(b.0, b.1, b.2), &mut out) };
            assert_eq!(status, QmStatus::Ok);
            let expected = WeylOp::new(dim, a.0, a.1, a.2).compose(&WeylOp::new(dim, b.0, b.1, b.2)).unwrap();
            assert_eq!((out.m, out.n, out.p), (expected.m() as i64, expected.n() as i64, expected.p() as i64));

            let mut inv = weyl(0, 0, 0);
            assert_eq!(unsafe { qm_weyl_inverse(d, out, &mut inv) }, QmStatus::Ok);
            let mut id = weyl(9, 9, 9);
            assert_eq!(unsafe { qm_weyl_compose(d, out, inv, &mut id) }, QmStatus::Ok);
            assert_eq!((id.m, id.n, id.p), (0, 0, 0));
        }
    }
}

#[test]
fn truncation_error_matches_core() {
    let (mut re, mut im) = (0.0, 0.0);
    for (d, k, delta) in [(16, 4, 3), (7, 7, 2), (5, 2, 0)] {
        assert_eq!(unsafe { qm_truncation_error(d, k, delta, &mut re, &mut im) }, QmStatus::Ok);
        let z = truncation_error(d, k, delta).unwrap();
        assert_eq!((re, im), (z.re, z.im));
    }
    assert_eq!(unsafe { qm_truncation_error(4, 9, 1, &mut re, &mut im) }, QmStatus::InvalidArgument);
    assert_eq!(unsafe { qm_truncation_error(4, 2, 1, ptr::null_mut(), &mut im) }, QmStatus::NullPointer);
}

#[test]
fn coset_table_handle_round_trip() {
    let d = 5;
    let dim = QuditDim::new(d).unwrap();
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { qm_coset_table_new(d, QmTableKind::Clock, weyl(0, 0, 0), &mut table) }, QmStatus::Ok);
    let core = build_cosets(dim, &StabilizerSubgroup::clock(dim)).unwrap();
    let mut len = 0;
    assert_eq!(unsafe { qm_coset_table_len(table, &mut len) }, QmStatus::Ok);
    assert_eq!(len, core.len());
    for e in all_projective(dim) {
        let mut label = usize::MAX;
        let status = unsafe { qm_coset_table_classify(table, weyl(e.m() as i64, e.n() as i64, 0), &mut label) };
        assert_eq!(status, QmStatus::Ok);
        assert_eq!(label, classify(&e, &core).unwrap());
        let mut entry = QmCosetEntry { label: 0, representative: weyl(0, 0, 0), correction: weyl(0, 0, 0) };
        assert_eq!(unsafe { qm_coset_table_entry(table, label, &mut entry) }, QmStatus::Ok);
        assert_eq!(entry.label, label);
    }
    let mut entry = QmCosetEntry { label: 0, representative: weyl(0, 0, 0), correction: weyl(0, 0, 0) };
    assert_eq!(unsafe { qm_coset_table_entry(table, len, &mut entry) }, QmStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));
    unsafe { qm_coset_table_free(table) };
    unsafe { qm_coset_table_free(ptr::null_mut()) };
}

#[test]
fn generator_tables_and_bad_arguments() {
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { qm_coset_table_new(4, QmTableKind::Generator, weyl(1, 1, 0), &mut table) }, QmStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { qm_coset_table_len(table, &mut len) }, QmStatus::Ok);
    assert_eq!(len, 4);
    unsafe { qm_coset_table_free(table) };

    let mut table = ptr::null_mut();
    assert_eq!(
        unsafe { qm_coset_table_new(1, QmTableKind::Clock, weyl(0, 0, 0), &mut table) },
        QmStatus::InvalidArgument
    );
    assert!(table.is_null());
    assert!(last_error().contains("dimension"));
    assert_eq!(
        unsafe { qm_coset_table_new(3, QmTableKind::Clock, weyl(0, 0, 0), ptr::null_mut()) },
        QmStatus::NullPointer
    );
    assert_eq!(unsafe { qm_coset_table_len(ptr::null(), &mut len) }, QmStatus::NullPointer);
    assert!(last_error().contains("table"));
}

#[test]
fn cycle_results_match_core() {
    let mut config = qm_cycle_config_default();
    config.d = 4;
    config.trials = 64;
    config.sigma_shift = 0.9;
    let mut results = ptr::null_mut();
    assert_eq!(unsafe { qm_cycle_run(&config, &mut results) }, QmStatus::Ok);

    let core_config = ExperimentConfig { d: 4, trials: 64, sigma_shift: 0.9, ..Default::default() };
    let (records, summary) = run_cycle(&core_config).unwrap();
    let mut len = 0;
    assert_eq!(unsafe { qm_cycle_results_len(results, &mut len) }, QmStatus::Ok);
    assert_eq!(len, records.len());
    for (i, r) in records.iter().enumerate() {
        let mut out = QmCycleRecord {
            trial: 0,
            error_m: 0,
            error_n: 0,
            syndrome: 0,
            escalated: false,
            gate_cost: 0,
            fidelity_after: 0.0,
            corrected: false,
        };
        assert_eq!(unsafe { qm_cycle_results_record(results, i, &mut out) }, QmStatus::Ok);
        assert_eq!((out.trial, out.error_m, out.error_n, out.syndrome), (r.trial, r.error_m, r.error_n, r.syndrome));
        assert_eq!((out.gate_cost, out.fidelity_after, out.corrected), (r.gate_cost, r.fidelity_after, r.corrected));
    }
    let mut s = QmCycleSummary {
        trials: 0,
        cutoff: 0,
        mean_fidelity: 0.0,
        min_fidelity: 0.0,
        corrected_rate: 0.0,
        escalation_rate: 0.0,
        mean_gate_cost: 0.0,
    };
    assert_eq!(unsafe { qm_cycle_results_summary(results, &mut s) }, QmStatus::Ok);
    assert_eq!(
        (s.trials, s.mean_fidelity, s.escalation_rate),
        (summary.trials, summary.mean_fidelity, summary.escalation_rate)
    );
    unsafe { qm_cycle_results_free(results) };
}

#[test]
fn cycle_config_errors() {
    let mut results = ptr::null_mut();
    for tweak in [
        |c: &mut QmCycleConfig| c.trials = 0,
        |c: &mut QmCycleConfig| c.subgroup = QmTableKind::Diagonal,
        |c: &mut QmCycleConfig| c.epsilon = 2.0,
        |c: &mut QmCycleConfig| c.cutoff = 99,
    ] {
        let mut config = qm_cycle_config_default();
        tweak(&mut config);
        assert_eq!(unsafe { qm_cycle_run(&config, &mut results) }, QmStatus::InvalidArgument, "{config:?}");
        assert!(results.is_null());
        assert!(!last_error().is_empty());
    }
    assert_eq!(unsafe { qm_cycle_run(ptr::null(), &mut results) }, QmStatus::NullPointer);
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(qm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qudit_memory.h")).unwrap();
    for name in [
        "qm_last_error_message",
        "qm_version",
        "qm_weyl_compose",
        "qm_weyl_inverse",
        "qm_truncation_error",
        "qm_coset_table_new",
        "qm_coset_table_free",
        "qm_coset_table_len",
        "qm_coset_table_entry",
        "qm_coset_table_classify",
        "qm_cycle_config_default",
        "qm_cycle_run",
        "qm_cycle_results_free",
        "qm_cycle_results_len",
        "qm_cycle_results_record",
        "qm_cycle_results_summary",
        "typedef struct QmCosetTable QmCosetTable;",
        "QM_STATUS_INVARIANT_VIOLATION = 3",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles the C smoke program against the generated header and the shared
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let profile_dir: PathBuf = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libqudit_memory_ffi.so");
    assert!(lib.exists(), "{} missing", lib.display());
    let rpath = format!("-Wl,-rpath,{}", profile_dir.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("qm_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .arg(rpath)
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("ok {}\n", env!("CARGO_PKG_VERSION")));
}
