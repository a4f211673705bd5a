use qudit_memory::algebra::QuditDim;
use qudit_memory::fourier::{adaptive_qft, full_qft_matrix, QftPlan, Window};
use qudit_memory::noise::{sample_weyl_error, trial_rng, wrapped_gaussian_weights, NoiseModel};
use qudit_memory::{Register, StateVector};
use rayon::prelude::*;

#[test]
fn weights_normalize_everywhere() {
    for d in 2..=64 {
        for sigma in [0.0, 0.05, 0.5, 1.0, 3.0, 10.0, 40.0] {
            let w = wrapped_gaussian_weights(d, sigma);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12, "d={d} sigma={sigma}");
            assert!(w.iter().all(|p| *p >= 0.0));
        }
    }
}

#[test]
fn samples_ignore_thread_schedule() {
    let model = NoiseModel::weyl(0.9, 1.3).unwrap();
    let q = QuditDim::new(7).unwrap();
    let draw = |t: u64| {
        let mut rng = trial_rng(2024, t);
        (0..5).map(|_| sample_weyl_error(&model, q, &mut rng).projective_key()).collect::<Vec<_>>()
    };
    let serial: Vec<_> = (0..500).map(draw).collect();
    let parallel: Vec<_> = (0..500u64).into_par_iter().map(draw).collect();
    assert_eq!(serial, parallel);
}

#[test]
fn coarse_success_matches_analytic_mass() {
    let d = 16;
    let q = QuditDim::new(d).unwrap();
    let sigma = 1.2;
    let plan = QftPlan::new(q, 4, 0.05, Window::HardCutoff).unwrap();
    let model = NoiseModel::weyl(sigma, 0.0).unwrap();
    let f = full_qft_matrix(q);
    let p_small: f64 = wrapped_gaussian_weights(d, sigma).iter().take(4).sum();

    let trials = 10_000;
    let coarse = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(77, t);
            let m = sample_weyl_error(&model, q, &mut rng).m();
            let mut anc = StateVector::basis_state(Register::new(vec![d]).unwrap(), &[m]).unwrap();
            anc.apply_site_unitary(0, &f).unwrap();
            !adaptive_qft(anc, 0, &plan, &mut rng).unwrap().1.escalated
        })
        .count();
    let rate = coarse as f64 / trials as f64;
    let sigma_binomial = (p_small * (1.0 - p_small) / trials as f64).sqrt();
    assert!((rate - p_small).abs() <= 3.0 * sigma_binomial, "rate={rate} p_small={p_small}");
}
