use std::f64::consts::FRAC_PI_2;

use polarmol::confinement::{
    adiabaticity_margin, saddle_geometry, v_eff_2d, v_trapped, z_band_spectrum, PotentialMode,
    SaddleRegime, TrapConfig,
};
use polarmol::fit::linspace;
use polarmol::floquet::{condon_points, AcFieldConfig};
use polarmol::instanton::omega_c;
use polarmol::pair::{v_eff_3d_dc, GroundCoefficients};
use polarmol::rotor::MoleculeParams;
use proptest::prelude::*;

const DELTA: f64 = 3e-6;
const BETA_AC: f64 = 0.1;

fn mass() -> f64 {
    MoleculeParams::sro().natural_mass()
}

fn trap(omega_perp: f64) -> TrapConfig {
    TrapConfig::new(omega_perp, mass()).unwrap()
}

fn quarter_drive() -> AcFieldConfig {
    AcFieldConfig::new(0, DELTA, DELTA / 4.0).unwrap()
}

fn r_c(ac: &AcFieldConfig) -> f64 {
    condon_points(FRAC_PI_2, ac, BETA_AC).0.unwrap()
}

#[test]
fn trace_is_converged_in_node_count() {
    let dc = PotentialMode::Dc { beta: 0.2 };
    let ac = quarter_drive();
    let dcac = PotentialMode::DcAc { beta: BETA_AC, ac };
    let t = trap(15e-6);
    let mut t2 = t;
    t2.trace_nodes *= 2;
    let a = t.a_perp();
    for (mode, rhos) in [
        (dc, vec![3.0 * a, 5.0 * a, 10.0 * a, 20.0 * a]),
        (dcac, vec![0.6 * r_c(&ac), r_c(&ac), 2.0 * r_c(&ac)]),
    ] {
        for rho in rhos {
            let v1 = v_eff_2d(rho, &mode, &t).unwrap();
            let v2 = v_eff_2d(rho, &mode, &t2).unwrap();
            assert!((v1 - v2).abs() <= 1e-10 * v2.abs(), "rho={rho} {v1} {v2}");
        }
    }
}

#[test]
fn trace_far_out_equals_in_plane() {
    let beta = 0.2;
    let t = trap(15e-6);
    let rho = 20.0 * t.a_perp();
    let v2 = v_eff_2d(rho, &PotentialMode::Dc { beta }, &t).unwrap();
    let v3 = v_eff_3d_dc(rho, FRAC_PI_2, beta);
    let rel = ((v2 - v3) / v3).abs();
    println!("relative trace correction at 20 a_perp: {rel:.5}");
    assert!(rel < 0.01, "{rel}");
}

#[test]
fn trace_second_moment() {
    let beta = 0.2;
    let g = GroundCoefficients::from_beta(beta);
    let t = trap(15e-6);
    let a = t.a_perp();
    let rho = 10.0 * a;
    let v2 = v_eff_2d(rho, &PotentialMode::Dc { beta }, &t).unwrap();
    let v3 = v_eff_3d_dc(rho, FRAC_PI_2, beta);
    let curv = -9.0 * g.c3 / rho.powi(5) - 6.0 * g.c6 / rho.powi(8);
    let want = 0.5 * a * a * curv;
    assert!(
        ((v2 - v3) / want - 1.0).abs() < 0.1,
        "{} vs {want}",
        v2 - v3
    );
}

#[test]
fn trace_thin_trap_limit() {
    let beta = 0.15;
    let g = GroundCoefficients::from_beta(beta);
    let t = TrapConfig::new(1.0, 1e9).unwrap();
    for rho in [3.0, 8.0, 30.0] {
        let v = v_eff_2d(rho, &PotentialMode::Dc { beta }, &t).unwrap();
        let want = g.c3 / rho.powi(3) + g.c6 / rho.powi(6);
        assert!((v - want).abs() < 1e-6 * want.abs());
    }
}

#[test]
fn band_asymptotes_are_oscillator_ladders() {
    let ac = quarter_drive();
    let rc = r_c(&ac);
    let t = trap(5.0 * DELTA);
    let s = z_band_spectrum(&[9.5 * rc, 10.0 * rc], &ac, BETA_AC, &t, 4).unwrap();
    let last = s.rho.len() - 1;
    for k in 0..=4 {
        let e = s.surface.tracks[k].energies[last];
        let d = (e - s.asymptotes[0] - k as f64 * t.omega_perp).abs();
        assert!(
            d < 1e-4 * t.omega_perp,
            "k={k} off by {:e} hbar w",
            d / t.omega_perp
        );
    }
}

#[test]
fn undressed_zero_field_bands_are_exact() {
    let ac = AcFieldConfig::new(0, DELTA, 0.0).unwrap();
    let t = trap(5.0 * DELTA);
    // the DC table diverges as β → 0, so a weak field stands in
    assert!(z_band_spectrum(&[1e6], &ac, 0.0, &t, 3).is_err());
    let s = z_band_spectrum(&[1e6, 2e6], &ac, BETA_AC, &t, 3).unwrap();
    let want = [0.0, -DELTA, -2.0 * DELTA, -DELTA];
    for branch in 0..4 {
        assert!((s.asymptotes[branch] - want[branch]).abs() < 1e-18);
        for k in 0..=3 {
            let e = s.surface.tracks[branch * 4 + k].energies[1];
            let d = e - want[branch] - k as f64 * t.omega_perp;
            assert!(
                d.abs() < 1e-12 * t.omega_perp,
                "branch {branch} k {k} {d:e}"
            );
        }
    }
}

#[test]
fn ground_band_isolated_in_tight_trap() {
    let ac = quarter_drive();
    let rc = r_c(&ac);
    let t = trap(5.0 * DELTA);
    let grid = linspace(0.5 * rc, 4.0 * rc, 120);
    let s = z_band_spectrum(&grid, &ac, BETA_AC, &t, 4).unwrap();
    let all = s
        .separation_all
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        / DELTA;
    let coupled = s
        .separation_coupled
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        / DELTA;
    println!("min separation over rho > r_C/2: all bands {all:.4} Delta, coupled bands {coupled:.4} Delta");
    assert!(coupled >= 0.8, "coupled bands {coupled}");
    assert!(all >= 0.8, "all bands {all}");
}

#[test]
fn adiabaticity_budget() {
    let ac = quarter_drive();
    let rc = r_c(&ac);
    let (m, ok) = adiabaticity_margin(2.0 * rc, &ac, BETA_AC, &trap(5.0 * DELTA), 0.1).unwrap();
    assert!(ok && m > 0.0);
    for rho in [0.7 * rc, 2.0 * rc, 10.0 * rc] {
        let (m, ok) = adiabaticity_margin(rho, &ac, BETA_AC, &trap(2.0 * DELTA), 0.1).unwrap();
        assert!(!ok && m <= 0.0);
    }
    let bare = AcFieldConfig::new(0, DELTA, 0.0).unwrap();
    let t = trap(5.0 * DELTA);
    let (m, _) = adiabaticity_margin(1e5 * rc, &bare, BETA_AC, &t, 0.1).unwrap();
    assert!((m - 3.0 * DELTA).abs() < 1e-12 * DELTA);
}

#[test]
fn saddle_regimes_merge_continuously() {
    let beta = 0.2;
    let g = GroundCoefficients::from_beta(beta);
    let wc = omega_c(&g, mass());
    let mut prev: Option<f64> = None;
    for i in 0..=200 {
        let w = wc * (0.5 + i as f64 / 200.0);
        let s = saddle_geometry(beta, &trap(w)).unwrap();
        let n = s
            .numeric
            .unwrap_or_else(|| panic!("{:?} at {}", s.diagnostic, w / wc));
        assert_eq!(s.hessian_negative, 1, "w/wc={}", w / wc);
        assert_eq!(s.regime == SaddleRegime::SingleSaddle, w >= wc);
        if w >= wc {
            assert!(n.z.abs() < 1e-8 * g.r_star());
        }
        if let Some(z) = prev {
            // √ onset at ω_c: a step of 0.005 ω_c moves z by at most ~0.1 r⋆
            assert!((n.z - z).abs() < 0.1 * g.r_star(), "jump at {}", w / wc);
        }
        prev = Some(n.z);
    }
}

#[test]
fn two_saddles_at_tenth_of_critical() {
    let beta = 0.2;
    let g = GroundCoefficients::from_beta(beta);
    let s = saddle_geometry(beta, &trap(omega_c(&g, mass()) / 10.0)).unwrap();
    assert_eq!(s.regime, SaddleRegime::TwoSaddles);
    let n = s.numeric.unwrap();
    let c = s.closed_form;
    assert!((n.rho / c.rho - 1.0).abs() < 0.01 && (n.z / c.z - 1.0).abs() < 0.01);
    assert!(c.barrier > 0.0 && n.barrier > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trapped_potential_is_mirror_symmetric(rho in 0.5f64..50.0, z in 0.0f64..50.0, beta in 0.01f64..0.5) {
        let t = trap(15e-6);
        let m = PotentialMode::Dc { beta };
        let a = v_trapped(rho, z, &m, &t).unwrap();
        let b = v_trapped(rho, -z, &m, &t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        prop_assert!(a >= v_eff_3d_dc(rho.hypot(z), rho.atan2(z), beta) - 1e-18);
    }
}
