//! Natural-unit scales of SrO converted to SI.

use polarmol::pair::characteristic_scales;
use polarmol::rotor::MoleculeParams;

fn main() -> polarmol::Result<()> {
    let sro = MoleculeParams::sro();
    let s = characteristic_scales(&sro, Some(0.2), Some(3e-6), Some(15e-6))?;
    let si = s.si.clone().expect("SI parameters");
    println!("kappa    {:.4e}", s.kappa);
    println!("r_B      {:.3} nm", si.r_b_m * 1e9);
    println!("r_star   {:.3} nm", si.r_star_m.unwrap() * 1e9);
    println!("r_C      {:.3} um", si.r_c_m.unwrap() * 1e6);
    println!("a_perp   {:.3} nm", si.a_perp_m.unwrap() * 1e9);
    println!("ell_perp {:.3} nm", si.ell_perp_m.unwrap() * 1e9);
    println!("omega_c  {:.4e} rad/s", si.omega_c_rad_s.unwrap());
    Ok(())
}
