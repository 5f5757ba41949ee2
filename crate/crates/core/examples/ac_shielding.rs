//! Microwave shielding: avoided-crossing gap against polar angle.

use std::f64::consts::FRAC_PI_2;

use polarmol::floquet::{
    ac_only_condon_radii, antisymmetric_crossing, shielding_gap, AcFieldConfig,
};
use polarmol::pair::PairBasis;

fn main() -> polarmol::Result<()> {
    let basis = PairBasis::new(2, 0.0)?;
    let (delta, omega) = (3e-6, 3e-7);
    for q in [0, 1] {
        let cfg = AcFieldConfig::new(q, delta, omega)?;
        println!("q = {q}, r_C = {:.3} r_B", cfg.r_condon());
        for k in 1..=6 {
            let theta = FRAC_PI_2 * k as f64 / 6.0;
            let g = shielding_gap(&basis, theta, &cfg)?;
            println!(
                "  theta {theta:.4}  gap/Omega {:.5}  at r/r_C {:.4}",
                g.gap / omega,
                g.r / cfg.r_condon()
            );
        }
    }
    let cfg = AcFieldConfig::new(0, delta, omega)?;
    let (rc, rcp) = ac_only_condon_radii(&cfg);
    let x = antisymmetric_crossing(&basis, FRAC_PI_2, &cfg)?;
    println!(
        "\nantisymmetric crossing {:.5} r_C (expected {:.5})",
        x / rc,
        rcp / rc
    );
    Ok(())
}
