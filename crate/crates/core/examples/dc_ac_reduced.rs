//! Reduced M = 0 model of the DC + AC problem: closed-form cubic against diagonalization.

use std::f64::consts::FRAC_PI_2;

use polarmol::floquet::{condon_points, cubic_by_eigensolver, reduced_m0_model, AcFieldConfig};

fn main() -> polarmol::Result<()> {
    let beta = 0.2;
    let cfg = AcFieldConfig::new(0, 3e-5, 1e-5)?;
    let (rc, _) = condon_points(FRAC_PI_2, &cfg, beta);
    let rc = rc.expect("in-plane Condon point");
    println!("in-plane r_C = {rc:.4} r_B");
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let r = rc * (0.3 + 2.7 * i as f64 / 99.0);
        for k in 0..20 {
            let theta = FRAC_PI_2 * k as f64 / 19.0;
            let m = reduced_m0_model(r, theta, &cfg, beta);
            let d = [m.detunings[0], m.detunings[1], m.detunings[2]];
            let e = cubic_by_eigensolver(d, cfg.omega_rabi);
            for j in 0..3 {
                worst = worst.max((e[j] - m.symmetric[j]).abs() / cfg.delta);
            }
        }
    }
    println!("closed form vs eigensolver, worst |diff|/Delta = {worst:.2e}");
    for x in [0.5, 0.9, 1.0, 1.1, 2.0] {
        let m = reduced_m0_model(x * rc, FRAC_PI_2, &cfg, beta);
        println!(
            "  r/r_C {x:>4}  top {:>12.5e}  anti {:>12.5e}",
            m.symmetric[0], m.antisymmetric
        );
    }
    Ok(())
}
