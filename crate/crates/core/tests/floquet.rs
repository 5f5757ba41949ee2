use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use polarmol::floquet::{
    antisymmetric_crossing, build_rwa_ac, collision_levels, cubic_by_eigensolver,
    cubic_closed_form, dressed_ground, m0_detunings, perturbative_ground,
    perturbative_ground_asymptotic, shielding_gap, three_state_resonant_model, AcFieldConfig,
};
use polarmol::linalg::{eigvalsh, hermiticity_defect};
use polarmol::pair::PairBasis;
use polarmol::surface::Sigma;
use proptest::prelude::*;

const DELTA: f64 = 3e-6;

fn cfg(q: i32, ratio: f64) -> AcFieldConfig {
    AcFieldConfig::new(q, DELTA, DELTA * ratio).unwrap()
}

fn basis() -> PairBasis {
    PairBasis::new(2, 0.0).unwrap()
}

#[test]
fn cardano_agrees_with_eigensolver_on_grid() {
    let c = cfg(0, 0.25);
    let rc = c.r_condon();
    let mut worst = 0.0f64;
    let mut closed = 0;
    for i in 0..100 {
        let r = rc * (0.5 + 2.5 * i as f64 / 99.0);
        for k in 0..20 {
            let th = PI * k as f64 / 19.0;
            let det = m0_detunings(r, th, &c, 0.1);
            let d = [det[0], det[1], det[2]];
            let ev = cubic_by_eigensolver(d, c.omega_rabi);
            if let Some(cf) = cubic_closed_form(d, c.omega_rabi) {
                closed += 1;
                for j in 0..3 {
                    worst = worst.max((cf[j] - ev[j]).abs());
                }
            }
        }
    }
    assert_eq!(closed, 2000);
    assert!(worst < 1e-10 * DELTA, "{worst:e}");
}

#[test]
fn linear_gap_follows_sin_theta() {
    let b = basis();
    let c = cfg(0, 0.25);
    for th in [0.26, 0.52, 1.0, FRAC_PI_2] {
        let g = shielding_gap(&b, th, &c).unwrap().gap;
        let ratio = g / (c.omega_rabi * th.sin());
        assert!(
            (ratio / (2.0 * SQRT_2) - 1.0).abs() < 0.03,
            "theta={th} ratio={ratio}"
        );
    }
    // no |Y| = 1 coupling along the field: a true crossing near r_C
    let g0 = shielding_gap(&b, 0.0, &c).unwrap();
    assert!(
        g0.gap < 1e-6 * c.omega_rabi,
        "{:e} at r/r_C={}",
        g0.gap,
        g0.r / c.r_condon()
    );
}

#[test]
fn circular_gap_is_isotropic() {
    let b = basis();
    let c = cfg(1, 0.25);
    let gaps: Vec<f64> = [0.26, 0.52, 1.0, FRAC_PI_2]
        .iter()
        .map(|&th| shielding_gap(&b, th, &c).unwrap().gap / c.omega_rabi)
        .collect();
    for g in &gaps {
        assert!((g / (2.0 * SQRT_2) - 1.0).abs() < 0.03, "{gaps:?}");
    }
}

#[test]
fn antisymmetric_crossing_at_shifted_condon_radius() {
    let b = basis();
    let c = cfg(0, 1.0 / 50.0);
    let x = antisymmetric_crossing(&b, FRAC_PI_2, &c).unwrap();
    let ratio = x / (2f64.cbrt() * c.r_condon());
    assert!((ratio - 1.0).abs() < 0.005, "{ratio}");
    // drift with Ω comes from dressing of the antisymmetric partner
    let x4 = antisymmetric_crossing(&b, FRAC_PI_2, &cfg(0, 0.25)).unwrap();
    println!(
        "crossing / 2^(1/3) r_C at Omega = Delta/4: {:.5}",
        x4 / (2f64.cbrt() * c.r_condon())
    );
}

#[test]
fn three_state_model_near_condon_point() {
    let b = basis();
    let c = cfg(0, 0.25);
    let rc = c.r_condon();
    let mut worst = 0.0f64;
    for i in 0..=60 {
        let r = rc * (0.8 + 1.2 * i as f64 / 60.0);
        let lv = collision_levels(&b, Sigma::Plus, r).unwrap();
        let e = dressed_ground(&lv, FRAC_PI_2, 0.0, &c).unwrap();
        let m = three_state_resonant_model(r, FRAC_PI_2, &c);
        worst = worst.max((e - m).abs() / c.omega_rabi);
    }
    assert!(worst < 0.05, "worst |dE|/Omega = {worst}");
}

#[test]
fn perturbative_ground_error_is_fourth_order() {
    let b = basis();
    let ratios = [0.1, 0.05, 0.025];
    let mut err = Vec::new();
    for &x in &ratios {
        let c = cfg(0, x);
        let r = 3.0 * c.r_condon();
        let lv = collision_levels(&b, Sigma::Plus, r).unwrap();
        let exact = dressed_ground(&lv, 1.1, 0.0, &c).unwrap();
        let pert = perturbative_ground(&lv, 1.1, 0.0, &c).unwrap();
        err.push((exact - pert).abs());
    }
    for k in 0..2 {
        let slope = (err[k] / err[k + 1]).ln() / (ratios[k] / ratios[k + 1]).ln();
        assert!((slope - 4.0).abs() < 0.4, "slope {slope} from {err:?}");
    }
}

#[test]
fn asymptotic_ground_matches_second_order_far_out() {
    let b = basis();
    for q in [0, 1] {
        let c = cfg(q, 0.05);
        let r = 6.0 * c.r_condon();
        for th in [0.0, 0.7, FRAC_PI_2] {
            let lv = collision_levels(&b, Sigma::Plus, r).unwrap();
            let p = perturbative_ground(&lv, th, 0.0, &c).unwrap();
            let a = perturbative_ground_asymptotic(r, th, &c);
            // remainder is O(1/r⁶) relative to the 1/r³ term
            let dip = a - 2.0 * c.omega_rabi.powi(2) / c.delta;
            assert!(
                (p - a).abs() < 0.05 * dip.abs().max(1e-3 * a),
                "q={q} th={th} {p} {a}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rwa_is_hermitian_and_phi_blind(
        x in 0.6f64..4.0, th in 0.0f64..PI, ph in 0.0f64..(2.0 * PI),
        q in -1i32..=1, ratio in 0.0f64..0.5, anti in any::<bool>()
    ) {
        let b = basis();
        let c = cfg(q, ratio);
        let sigma = if anti { Sigma::Minus } else { Sigma::Plus };
        let lv = collision_levels(&b, sigma, x * c.r_condon()).unwrap();
        let h = build_rwa_ac(&lv, th, ph, &c).unwrap();
        prop_assert!(hermiticity_defect(&h) < 1e-20);
        let h0 = build_rwa_ac(&lv, th, 0.0, &c).unwrap();
        for (a, z) in eigvalsh(&h).iter().zip(eigvalsh(&h0)) {
            prop_assert!((a - z).abs() < 1e-9 * DELTA);
        }
    }

    #[test]
    fn cardano_roots_solve_the_cubic(
        d0 in -5e-6f64..5e-6, d1 in -5e-6f64..5e-6, d2 in -5e-6f64..5e-6, om in 1e-8f64..2e-6
    ) {
        let d = [d0, d1, d2];
        let cf = cubic_closed_form(d, om).unwrap();
        let ev = cubic_by_eigensolver(d, om);
        for k in 0..3 {
            prop_assert!((cf[k] - ev[k]).abs() < 1e-10 * 5e-6);
        }
    }
}
