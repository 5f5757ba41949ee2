//! Zero-field and DC pair surfaces with fitted long-range coefficients.

use std::f64::consts::FRAC_PI_2;

use polarmol::fit::{linspace, DEFAULT_WINDOW};
use polarmol::pair::{bare_surfaces, fit_tracks, SurfaceOptions};
use polarmol::tables::compare_zero_field;

fn main() -> polarmol::Result<()> {
    let rs = linspace(DEFAULT_WINDOW.0, DEFAULT_WINDOW.1, 60);
    for (beta, theta) in [(0.0, 0.0), (0.2, FRAC_PI_2)] {
        let s = bare_surfaces(&rs, theta, beta, &SurfaceOptions::default())?;
        let fits = fit_tracks(&s, DEFAULT_WINDOW)?;
        println!(
            "beta = {beta}, theta = {theta:.4}: {} tracks",
            s.tracks.len()
        );
        for (t, f) in s.tracks.iter().zip(&fits) {
            println!(
                "  {:<16} E0 {:>10.6} C3 {:>10.6} 6C6 {:>10.6}",
                t.label.tag(),
                f.e0,
                f.c3,
                6.0 * f.c6
            );
        }
    }
    println!("\nzero-field table, worst deviations");
    let rows = compare_zero_field(DEFAULT_WINDOW)?;
    let worst_c3 = rows.iter().map(|r| r.dev_c3).fold(0.0, f64::max);
    let worst_c6 = rows.iter().map(|r| r.dev_c6).fold(0.0, f64::max);
    println!("  C3 {worst_c3:.2e}  C6 {worst_c6:.2e}");
    Ok(())
}
