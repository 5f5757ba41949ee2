//! Effective 2D potential under transverse confinement and the saddle geometry.

use polarmol::confinement::{saddle_geometry, v_eff_2d, PotentialMode, TrapConfig};
use polarmol::rotor::MoleculeParams;

fn main() -> polarmol::Result<()> {
    let m = MoleculeParams::sro().natural_mass();
    let trap = TrapConfig::new(15e-6, m)?;
    println!("mass {m:.1}, a_perp {:.3} r_B", trap.a_perp());
    let betas = [0.0, 0.1, 0.15, 0.2, 0.3, 0.4];
    print!("{:>8}", "rho");
    for b in betas {
        print!("{b:>14}");
    }
    println!();
    for rho in [6.0, 8.0, 12.0, 20.0, 40.0] {
        print!("{rho:>8}");
        for beta in betas {
            print!(
                "{:>14.5e}",
                v_eff_2d(rho, &PotentialMode::Dc { beta }, &trap)?
            );
        }
        println!();
    }
    for beta in [0.1, 0.2, 0.3] {
        let g = saddle_geometry(beta, &trap)?;
        println!(
            "beta {beta}: {:?}, saddle (rho, z) = ({:.3}, {:.3}), barrier {:.3e} B",
            g.regime, g.closed_form.rho, g.closed_form.z, g.closed_form.barrier
        );
    }
    Ok(())
}
