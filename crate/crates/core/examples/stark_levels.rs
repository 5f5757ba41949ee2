//! Pendulum levels and dipole moments of one molecule in a DC field.

use polarmol::rotor::{dipole_moments, pendulum_spectrum, DipoleMoments, DEFAULT_JMAX};

fn main() -> polarmol::Result<()> {
    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "beta", "delta/B", "3b^2/20", "ratio"
    );
    for beta in [0.05, 0.1, 0.2, 0.4] {
        let rot = pendulum_spectrum(beta, DEFAULT_JMAX)?;
        let pert = 3.0 * beta * beta / 20.0;
        println!(
            "{beta:>6} {:>14.6e} {pert:>14.6e} {:>10.6}",
            rot.delta,
            rot.delta / pert
        );
    }
    let beta = 0.1;
    let num = dipole_moments(&pendulum_spectrum(beta, DEFAULT_JMAX)?).as_array();
    let ana = DipoleMoments::perturbative(beta).as_array();
    println!("\nmoments at beta = {beta} (units of d)");
    for k in 0..6 {
        println!(
            "{:>3} numeric {:>12.9} cubic {:>12.9} diff {:.1e}",
            DipoleMoments::NAMES[k],
            num[k],
            ana[k],
            (num[k] - ana[k]).abs()
        );
    }
    Ok(())
}
