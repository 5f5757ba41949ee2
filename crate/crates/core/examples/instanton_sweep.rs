//! Tunneling action against trap frequency, and the SrO suppression estimate.

use std::f64::consts::PI;

use polarmol::instanton::{in_plane_constant, solve_reduced, tunneling_exponent, InstantonOptions};
use polarmol::rotor::MoleculeParams;

fn main() -> polarmol::Result<()> {
    let opts = InstantonOptions::default();
    println!("in-plane constant {:.5}", in_plane_constant());
    for w in [0.05, 0.1, 0.2, 0.4, 0.8, 1.0, 1.5, 3.0] {
        let r = solve_reduced(w, &opts)?;
        println!(
            "w {w:>5}  S/S0 {:>8.5}  7.01 w^(1/5) {:>8.5}  {:?}",
            r.action,
            7.01 * w.powf(0.2),
            r.regime
        );
    }
    let sro = MoleculeParams::sro();
    let scale = sro.scale().expect("SI parameters");
    let w = scale.angular_frequency_to_natural(2.0 * PI * 150e3);
    for beta in [1.0 / 3.0, 1.0 / 6.0] {
        let t = tunneling_exponent(&sro, beta, w, &opts)?;
        println!(
            "SrO beta {beta:.4}: factor {:.3}, S/hbar {:.3}, suppression {:.2e}",
            t.exponent_factor, t.action_formula, t.suppression
        );
    }
    Ok(())
}
