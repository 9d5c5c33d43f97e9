//! End-to-end pipelines across generators, wavelets, leaders and the formalism.

use mfleaders::formalism::{linspace, measure_tau, predicted_scaling, scaling_function, structure_function};
use mfleaders::generators::{davenport, prescribed_series, transference_series, HolderProfile};
use mfleaders::leaders::{compute_leaders, estimate_exponent, local_leaders, EstimateMode, FitWindow};
use mfleaders::measures::multinomial;
use mfleaders::wavelet::{analyze, synthesize, WaveletSpec};

#[test]
fn davenport_leaders_stall_at_dyadic_points() {
    let lp = compute_leaders(&analyze(&davenport(2.0, 16, None).unwrap().data, &WaveletSpec::daubechies(4).unwrap()).unwrap())
        .unwrap();
    let window = FitWindow::default_for(16);
    for x in [0.5, 0.25, 0.375] {
        let e = estimate_exponent(&local_leaders(&lp, x).unwrap(), window, EstimateMode::Limit).unwrap();
        assert!(e.limit.unwrap().abs() < 0.05, "x = {x}: {e:?}");
    }
    // Off the dyadics the same window sees a positive exponent.
    let e = estimate_exponent(&local_leaders(&lp, 0.3).unwrap(), window, EstimateMode::Limit).unwrap();
    assert!(e.limit.unwrap() > 1.0);
}

#[test]
fn generated_pyramid_survives_the_signal_domain() {
    let w = WaveletSpec::daubechies(4).unwrap();
    let g = prescribed_series(&HolderProfile::affine(0.3, 0.4), &w, 12).unwrap();
    let back = analyze(&synthesize(&g.data, &w).unwrap(), &w).unwrap();
    for j in 0..12 {
        for (a, b) in g.data.level(j).iter().zip(back.level(j).iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn transference_leaders_dominate_coefficients_and_follow_the_prediction() {
    let w = WaveletSpec::daubechies(4).unwrap();
    let weights = [0.25, 0.75];
    let m = multinomial(2, &weights, 13).unwrap();
    let g = transference_series(&m, 1.0, 2.0, &w, 14).unwrap();
    let lp = compute_leaders(&g.data).unwrap();
    for j in 0..14 {
        for (k, d) in lp.level(j).iter().enumerate() {
            assert!(*d >= g.data.coefficient(j, k).abs());
        }
    }
    let p = linspace(-4.0, 4.0, 33);
    let omega = scaling_function(&structure_function(&lp, &p, 1..=13).unwrap(), FitWindow::default_for(14)).unwrap();
    let tau = measure_tau(&m, &linspace(-2.0, 2.0, 33), 7..=13).unwrap();
    let pred = predicted_scaling(&tau, &p, 1.0, 2.0, 1.0).unwrap();
    for (a, b) in omega.omega.iter().zip(&pred.omega) {
        assert!((a - b).abs() < 0.05, "{a} vs {b}");
    }
}
