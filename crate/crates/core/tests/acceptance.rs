//! Acceptance suite. Runs every criterion, prints one line per criterion,
//! and exits non-zero if any of them fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use qudit_memory::algebra::{all_projective, QuditDim, WeylOp};
use qudit_memory::correction::{build_cosets, plan_correction, StabilizerSubgroup};
use qudit_memory::echo::{
    average_hamiltonian, extract_syndrome, snd_commutator_norms, ErrorHamiltonian, PulseSequence,
};
use qudit_memory::fourier::{conjugate_shift, full_cost, truncation_error, QftPlan, Window};
use qudit_memory::harness::{
    classifier_fisher, phase_family_fisher, run_echo_verify, run_pipeline, run_qft_bench, EchoConfig, EchoStatus,
    ExperimentConfig,
};
use qudit_memory::linalg::{frobenius, max_abs, off_diagonal_norm, root_of_unity};
use qudit_memory::noise::trial_rng;
use qudit_memory::{Register, StateVector};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dim(d: usize) -> QuditDim {
    QuditDim::new(d).unwrap()
}

fn unit(d: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

fn weyl_commutation() -> Check {
    let mut worst = 0.0f64;
    for d in 2..=9 {
        let q = dim(d);
        let (x, z) = (WeylOp::x(q).matrix(), WeylOp::z(q).matrix());
        let diff = max_abs(&(&z * &x - (&x * &z) * root_of_unity(1, d)));
        worst = worst.max(diff);
    }
    ensure(worst < 1e-13, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.3e}"))
}

fn qft_diagonalization() -> Check {
    let (mut off, mut diag) = (0.0f64, 0.0f64);
    for d in 2..=9 {
        for m in 0..d {
            let c = conjugate_shift(dim(d), m).map_err(|e| e.to_string())?;
            off = off.max(off_diagonal_norm(&c));
            for k in 0..d {
                let expected = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (m * k) as f64 / d as f64);
                diag = diag.max((c[(k, k)] - expected).norm());
            }
        }
    }
    ensure(off < 1e-12 && diag < 1e-12, || format!("off-diagonal {off:.3e}, diagonal {diag:.3e}"))?;
    Ok(format!("off-diagonal {off:.3e}, diagonal {diag:.3e}"))
}

fn truncation_closed_form() -> Check {
    let mut rng = trial_rng(3, 0);
    let mut worst = 0.0f64;
    let mut max_delta: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for _ in 0..1000 {
        let d = rng.random_range(2..=64usize);
        let k = rng.random_range(1..=d);
        let delta = rng.random_range(-(d as i64)..(d as i64));
        let closed = truncation_error(d, k, delta).map_err(|e| e.to_string())?;
        let sum: Complex64 = (k..d)
            .map(|j| {
                let r = (j as i64 * delta).rem_euclid(d as i64);
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d as f64)
            })
            .sum();
        worst = worst.max((closed - sum).norm());
        let at_zero = truncation_error(d, k, 0).map_err(|e| e.to_string())?;
        ensure(at_zero == Complex64::new((d - k) as f64, 0.0), || format!("delta(0) = {at_zero} at d={d}, K={k}"))?;
        let entry = max_delta.entry((d, k)).or_insert(0.0);
        *entry = entry.max(closed.norm());
    }
    ensure(worst < 1e-12, || format!("closed form off by {worst:.3e}"))?;
    let table: String = std::iter::once("d,k,max_abs_delta\n".to_string())
        .chain(max_delta.iter().map(|((d, k), m)| format!("{d},{k},{m:.16e}\n")))
        .collect();
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("truncation_max_delta.csv");
    std::fs::write(&path, table).map_err(|e| e.to_string())?;
    let (&(d, k), &m) = max_delta.iter().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    Ok(format!(
        "max |closed - sum| {worst:.3e}; max |delta| {m:.3} at d={d}, K={k}; {} (d,K) pairs written to {}",
        max_delta.len(),
        path.display()
    ))
}

fn non_demolition_extraction() -> Check {
    let mut rng = trial_rng(4, 0);
    let mut worst_fid = 1.0f64;
    let mut worst_comm = 0.0f64;
    for d in [2, 3, 5, 7] {
        let q = dim(d);
        for error in all_projective(q) {
            for _ in 0..5 {
                let data = StateVector::random(Register::new(vec![d]).unwrap(), &mut rng).map_err(|e| e.to_string())?;
                let mut errored = data.clone();
                errored.apply_site_unitary(0, &error.matrix()).map_err(|e| e.to_string())?;
                let psi = StateVector::product(
                    Register::uniform(d, 3).unwrap(),
                    &[errored.amplitudes().to_vec(), unit(d), unit(d)],
                )
                .map_err(|e| e.to_string())?;
                let out = extract_syndrome(&psi, 0, 1, 2, &error).map_err(|e| e.to_string())?;
                let pa = out.site_probabilities(1).unwrap()[error.m()];
                let pb = out.site_probabilities(2).unwrap()[error.n()];
                ensure((pa - 1.0).abs() < 1e-10 && (pb - 1.0).abs() < 1e-10, || {
                    format!("d={d} error {error}: ancilla probabilities {pa}, {pb}")
                })?;
                worst_fid = worst_fid.min(out.site_fidelity(0, errored.amplitudes()).unwrap());
            }
        }
        let (cx, cz) = snd_commutator_norms(q).map_err(|e| e.to_string())?;
        worst_comm = worst_comm.max(cx).max(cz);
    }
    ensure(worst_fid >= 1.0 - 1e-10, || format!("data fidelity {worst_fid}"))?;
    ensure(worst_comm < 1e-10, || format!("commutator norm {worst_comm:.3e}"))?;
    Ok(format!("min data fidelity {worst_fid:.17}, max commutator {worst_comm:.3e}"))
}

fn echo_cancellation() -> Check {
    let mut worst = 0.0f64;
    for d in 2..=8 {
        let q = dim(d);
        let mut h = ErrorHamiltonian::new(q, 1).unwrap();
        for n in 1..d {
            h.add_site_term(0, WeylOp::from_exponents(q, 0, n as i64), 1.0 / n as f64).unwrap();
        }
        let avg = average_hamiltonian(&h, &PulseSequence::cyclic_shifts(q)).map_err(|e| e.to_string())?;
        worst = worst.max(frobenius(&avg));
    }
    ensure(worst < 1e-12, || format!("average Hamiltonian norm {worst:.3e}"))?;
    let mut slopes = Vec::new();
    for d in [2, 3] {
        let (_, summary) = run_echo_verify(&EchoConfig { d, ..EchoConfig::default() }).map_err(|e| e.to_string())?;
        let sep = summary.separation.unwrap_or(f64::NAN);
        ensure(summary.status == EchoStatus::Ok && sep >= 1.5, || format!("d={d}: {summary:?}"))?;
        slopes.push(format!("d={d} free {:.3} echo {:.3}", summary.slope_free.unwrap(), summary.slope_echo.unwrap()));
    }
    Ok(format!("max |H_avg| {worst:.3e}; slopes {}", slopes.join(", ")))
}

fn coset_recovery() -> Check {
    let mut rng = trial_rng(6, 0);
    let mut worst = 1.0f64;
    for d in [2, 3, 5, 7] {
        let q = dim(d);
        let plan = QftPlan::with_defaults(q);
        let table = build_cosets(q, &StabilizerSubgroup::singleton(q)).map_err(|e| e.to_string())?;
        let correction = plan_correction(&table).map_err(|e| e.to_string())?;
        for error in all_projective(q) {
            let psi = StateVector::random(Register::new(vec![d]).unwrap(), &mut rng).unwrap();
            let out = run_pipeline(&psi, &error, &plan, &table, &correction, &mut rng).map_err(|e| e.to_string())?;
            worst = worst.min(out.state.site_fidelity(0, psi.amplitudes()).unwrap());
        }
    }
    ensure(worst >= 1.0 - 1e-9, || format!("singleton recovery fidelity {worst}"))?;
    for d in 2..=5 {
        let q = dim(d);
        let plan = QftPlan::with_defaults(q);
        let h = StabilizerSubgroup::clock(q);
        let table = build_cosets(q, &h).map_err(|e| e.to_string())?;
        let correction = plan_correction(&table).map_err(|e| e.to_string())?;
        for error in all_projective(q) {
            let psi = StateVector::random(Register::new(vec![d]).unwrap(), &mut rng).unwrap();
            let out = run_pipeline(&psi, &error, &plan, &table, &correction, &mut rng).map_err(|e| e.to_string())?;
            let applied = table.entry(out.syndrome).unwrap().correction;
            let residual = applied.compose(&error).unwrap();
            ensure(h.contains(&residual), || format!("d={d}: residual {residual} for error {error} not in H"))?;
            let mut expected = psi.clone();
            expected.apply_site_unitary(0, &residual.matrix()).unwrap();
            let f = out.state.site_fidelity(0, expected.amplitudes()).unwrap();
            ensure(f >= 1.0 - 1e-9, || format!("d={d}: state is not the residual image ({f})"))?;
        }
    }
    Ok(format!("min singleton fidelity {worst:.17}; all clock-subgroup residuals in H"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qudit-mem"))
}

fn stdout_of(args: &[&str]) -> Result<String, String> {
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited with {:?}", out.status.code()))?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn table_reproduction() -> Check {
    let golden_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for d in [4, 5, 8] {
        let out = stdout_of(&["coset-table", "--d", &d.to_string()])?;
        let golden =
            std::fs::read_to_string(golden_dir.join(format!("coset_table_d{d}.csv"))).map_err(|e| e.to_string())?;
        ensure(out == golden, || format!("d={d}: output differs from golden file"))?;
    }
    for d in 4..=16usize {
        let out = stdout_of(&["coset-table", "--d", &d.to_string()])?;
        let rows: Vec<Vec<usize>> =
            out.lines().skip(1).map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
        ensure(rows.len() == d, || format!("d={d}: {} rows", rows.len()))?;
        ensure(rows[1] == vec![1, 2, 1, d - 2, d - 1], || format!("d={d}: row 1 is {:?}", rows[1]))?;
        ensure(rows[d - 1] == vec![d - 1, d - 1, d - 2, 1, 2], || format!("d={d}: last row is {:?}", rows[d - 1]))?;
    }
    Ok("golden files for d=4,5,8 match; first and last pattern rows hold for d=4..16".into())
}

fn adaptive_cost() -> Check {
    let config = ExperimentConfig {
        trials: 10_000,
        seed: 42,
        sigma_shift: 0.5,
        cutoff: Some(4),
        epsilon: 0.05,
        window: Window::HardCutoff,
        ..Default::default()
    };
    let (rows, _) = run_qft_bench(&config, &[16]).map_err(|e| e.to_string())?;
    let r = &rows[0];
    let z = (r.escalation_rate - r.analytic_escalation).abs() / r.escalation_sigma;
    ensure(z <= 3.0, || {
        format!("escalation {} vs analytic {} ({z:.2} sigma)", r.escalation_rate, r.analytic_escalation)
    })?;
    ensure(r.mean_cost < full_cost(16) as f64, || format!("mean cost {}", r.mean_cost))?;
    let (full_k, _) =
        run_qft_bench(&ExperimentConfig { cutoff: Some(16), ..config }, &[16]).map_err(|e| e.to_string())?;
    ensure(full_k[0].escalation_rate == 0.0, || format!("K=d escalation {}", full_k[0].escalation_rate))?;
    Ok(format!(
        "escalation {:.4} vs analytic {:.4} ({z:.2} sigma), mean cost {:.2} < {}",
        r.escalation_rate,
        r.analytic_escalation,
        r.mean_cost,
        full_cost(16)
    ))
}

fn fisher_estimator() -> Check {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let theta = -1.5 + 0.17 * i as f64;
        let est = phase_family_fisher(theta, 1e-4).map_err(|e| e.to_string())?;
        worst = worst.max((est - 4.0 * theta.sin().powi(2)).abs());
    }
    ensure(worst < 1e-5, || format!("max error {worst:.3e}"))?;
    let mut gap = 0.0f64;
    for d in [4, 8, 16] {
        let plan = QftPlan::new(dim(d), d, 0.0, Window::HardCutoff).unwrap();
        for theta in [0.1, 0.7, 1.9, 3.0] {
            let (full, adaptive) = classifier_fisher(&plan, theta, 1e-5).map_err(|e| e.to_string())?;
            gap = gap.max((full - adaptive).abs());
        }
    }
    ensure(gap < 1e-9, || format!("adaptive/full gap {gap:.3e}"))?;
    Ok(format!("max error {worst:.3e}, max gap {gap:.3e}"))
}

fn determinism() -> Check {
    let args = ["cycle", "--d", "5", "--trials", "2000", "--seed", "42"];
    let a = stdout_of(&args)?;
    let b = stdout_of(&args)?;
    let mut serial = args.to_vec();
    serial.push("--serial");
    let c = stdout_of(&serial)?;
    ensure(a == b, || "repeated runs differ".into())?;
    ensure(a == c, || "parallel and serial runs differ".into())?;
    Ok(format!("{} bytes identical across 3 runs", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 weyl commutation", weyl_commutation, Duration::from_secs(1)),
        ("2 qft diagonalization", qft_diagonalization, Duration::from_secs(5)),
        ("3 truncation error", truncation_closed_form, Duration::from_secs(2)),
        ("4 non-demolition extraction", non_demolition_extraction, Duration::from_secs(60)),
        ("5 echo cancellation", echo_cancellation, Duration::from_secs(30)),
        ("6 coset recovery", coset_recovery, Duration::from_secs(120)),
        ("7 table reproduction", table_reproduction, Duration::from_secs(1)),
        ("8 adaptive cost model", adaptive_cost, Duration::from_secs(60)),
        ("9 fisher estimator", fisher_estimator, Duration::from_secs(10)),
        ("10 determinism", determinism, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.2?}, budget {budget:?}; {detail}"))
            }
        });
        match result {
            Ok(detail) => println!("acceptance {name}: PASS ({elapsed:.2?}) {detail}"),
            Err(why) => {
                failed += 1;
                println!("acceptance {name}: FAIL ({elapsed:.2?}) {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
