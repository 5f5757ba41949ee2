//! One function per subcommand: config in, tables out.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::confinement::{
    adiabaticity_margin, saddle_geometry, v_eff_2d, z_band_spectrum, PotentialMode, TrapConfig,
};
use crate::error::{Error, Result};
use crate::floquet::{
    dressed_surfaces, reduced_m0_model, AcFieldConfig, DressedOptions, DressingMode,
};
use crate::instanton::{solve_reduced, tunneling_exponent, Regime};
use crate::pair::{bare_surfaces_in, characteristic_scales, PairBasis, SurfaceOptions};
use crate::rotor::{
    dipole_moments, pendulum_spectrum, pendulum_spectrum_with_tensor, perturbative_energy,
    DipoleMoments,
};
use crate::scan::config::{
    Eff2dConfig, Eff2dMode, InstantonConfig, PotentialKind, RadialUnit, RunConfig, StarkConfig,
    SurfaceMode, TablesConfig,
};
use crate::scan::output::{col, Cell, Column, CommandOutput, Failure, Table};
use crate::surface::{Sigma, Surface};
use crate::tables::{compare_dc, compare_zero_field, dc_table, zero_field_table, RowComparison};

/// Pendulum states reported by `stark`.
const STARK_STATES: [(u32, i32); 6] = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)];

/// Relative deviation above which a table row is flagged.
const TABLE_TOLERANCE: f64 = 0.05;

fn at_point(e: Error, point: &str) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("{point}: {m}")),
        Error::Config(m) => Error::Config(format!("{point}: {m}")),
        Error::Convergence { what, residual } => Error::Convergence {
            what: format!("{point}: {what}"),
            residual,
        },
        other => other,
    }
}

fn ac_config(cfg: &RunConfig) -> Result<AcFieldConfig> {
    let f = &cfg.fields;
    AcFieldConfig::new(
        f.q,
        cfg.require("fields.delta", f.delta)?,
        cfg.require("fields.omega_rabi", f.omega_rabi)?,
    )
    .map_err(|e| at_point(e, "fields"))
}

pub fn stark(cfg: &RunConfig) -> Result<CommandOutput> {
    let opts = cfg.stark.clone().unwrap_or_default();
    let StarkConfig { grid, jmax } = opts;
    let betas = cfg.grid(&grid)?;
    let v2 = cfg.fields.v2;
    let mut columns = vec![col("beta", "1", "beta = dE/B")];
    for (j, m) in STARK_STATES {
        columns.push(col(
            &format!("E_{j}_{m}"),
            "B",
            "eigenvalue of B J^2 - dE cos(theta) + V2 C2_0",
        ));
    }
    for (j, m) in STARK_STATES {
        columns.push(col(
            &format!("E_{j}_{m}_pert"),
            "B",
            "J(J+1) + (beta^2/2)(J(J+1) - 3M^2)/(J(J+1)(2J-1)(2J+3))",
        ));
    }
    columns.push(col("delta", "B", "E_1_0 - E_1_1"));
    columns.push(col("delta_pert", "B", "3 beta^2/20"));
    for name in DipoleMoments::NAMES {
        columns.push(col(name, "d", "<phi| d_0 |phi'> between pendulum states"));
    }
    for name in DipoleMoments::NAMES {
        columns.push(col(
            &format!("{name}_pert"),
            "d",
            "third-order expansion in beta",
        ));
    }
    columns.push(col("cutoff_ok", "bool", "plumbing"));
    let rows: Vec<Result<Vec<Cell>>> = betas
        .par_iter()
        .map(|&beta| {
            let rot = pendulum_spectrum_with_tensor(beta, v2, jmax)
                .map_err(|e| at_point(e, &format!("beta={beta}")))?;
            let mut row: Vec<Cell> = vec![beta.into()];
            row.extend(
                STARK_STATES
                    .iter()
                    .map(|&(j, m)| Cell::from(rot.energy(j, m))),
            );
            row.extend(
                STARK_STATES
                    .iter()
                    .map(|&(j, m)| Cell::from(perturbative_energy(j, m, beta))),
            );
            row.push(rot.delta.into());
            row.push((3.0 * beta * beta / 20.0).into());
            row.extend(dipole_moments(&rot).as_array().map(Cell::from));
            row.extend(DipoleMoments::perturbative(beta).as_array().map(Cell::from));
            row.push(rot.cutoff_ok.into());
            Ok(row)
        })
        .collect();
    let mut t = Table::new("stark", columns);
    for r in rows {
        t.push(r?);
    }
    let mut notes = vec![format!("rotor cutoff J_max = {jmax}")];
    if v2 != 0.0 {
        notes.push(format!("tensor shift V2 = {v2} B included"));
    }
    Ok(CommandOutput {
        tables: vec![t],
        notes,
        failures: vec![],
    })
}

fn surface_columns() -> Vec<Column> {
    vec![
        col("r", "r_B", "intermolecular distance"),
        col("r_scaled", "r_unit", "r in the configured length unit"),
        col("theta", "rad", "polar angle to the field axis"),
        col("label", "1", "plumbing"),
        col("jtot", "1", "J1 + J2 of the asymptotic state"),
        col("proj", "1", "|Y| at zero field, |M1| + |M2| otherwise"),
        col("mu", "1", "plumbing"),
        col("sigma", "1", "exchange symmetry"),
        col(
            "energy",
            "B",
            "adiabatic eigenvalue of H_rot + V_dd (+ H_AC)",
        ),
        col("overlap", "1", "|<psi(r_i)|psi(r_i+1)>|^2"),
        col("crossing", "bool", "plumbing"),
        col("photon_offset", "B", "J Delta"),
        col("core", "bool", "r < r_B"),
    ]
}

fn push_surface(t: &mut Table, s: &Surface, scale: f64, offset: f64) {
    for tr in &s.tracks {
        for (i, &r) in s.r.iter().enumerate() {
            t.push(vec![
                r.into(),
                (r / scale).into(),
                s.theta.into(),
                tr.label.tag().into(),
                tr.label.jtot.into(),
                tr.label.proj.into(),
                tr.label.mu.into(),
                tr.label.sigma.symbol().to_string().into(),
                (tr.energies[i] - offset).into(),
                tr.overlaps[i].into(),
                tr.crossings.contains(&i).into(),
                tr.photon_offset.into(),
                s.core[i].into(),
            ]);
        }
    }
}

pub fn surfaces(cfg: &RunConfig) -> Result<CommandOutput> {
    let opts = cfg
        .surfaces
        .clone()
        .ok_or_else(|| Error::Config("surfaces: section required".into()))?;
    let scale = match opts.r_unit {
        RadialUnit::RB => 1.0,
        RadialUnit::RC => ac_config(cfg)?.r_condon(),
    };
    let rs: Vec<f64> = cfg.grid(&opts.grid)?.iter().map(|x| x * scale).collect();
    if rs[0] <= 0.0 {
        return Err(Error::Config(format!(
            "grids.{}: radii must be positive",
            opts.grid
        )));
    }
    let thetas = match &opts.theta_grid {
        Some(name) => cfg.grid(name)?,
        None => vec![opts.theta],
    };
    let mut notes = vec![format!(
        "mode {:?}, length unit {:?}",
        opts.mode, opts.r_unit
    )];
    let mut t;
    match opts.mode {
        SurfaceMode::ZeroField | SurfaceMode::Dc => {
            let beta = if opts.mode == SurfaceMode::Dc {
                cfg.require("fields.beta", cfg.fields.beta)?
            } else {
                0.0
            };
            let sopts = SurfaceOptions {
                jmax_single: opts.jmax_single,
                ..SurfaceOptions::default()
            };
            let basis = PairBasis::new(opts.jmax_single, beta)?;
            let offset = 2.0 * basis.e00;
            t = Table::new("surfaces", surface_columns());
            for &theta in &thetas {
                let s = bare_surfaces_in(&basis, &rs, theta, &sopts)
                    .map_err(|e| at_point(e, &format!("theta={theta}")))?;
                push_surface(&mut t, &s, scale, offset);
            }
            notes.push("energies relative to two ground-state molecules".into());
        }
        SurfaceMode::Ac | SurfaceMode::DcAc => {
            let ac = ac_config(cfg)?;
            let mode = if opts.mode == SurfaceMode::Ac {
                DressingMode::AcOnly
            } else {
                DressingMode::DcAc {
                    beta: cfg.require("fields.beta", cfg.fields.beta)?,
                }
            };
            let dopts = DressedOptions {
                jmax_single: opts.jmax_single,
                ..DressedOptions::default()
            };
            t = Table::new("surfaces", surface_columns());
            for &theta in &thetas {
                let s = dressed_surfaces(&rs, theta, &ac, mode, &dopts)
                    .map_err(|e| at_point(e, &format!("theta={theta}")))?;
                push_surface(&mut t, &s, scale, 0.0);
            }
            notes.push(
                "energies in the rotating frame, zero at twice the single-molecule ground energy"
                    .into(),
            );
        }
        SurfaceMode::ReducedM0 => {
            let ac = ac_config(cfg)?;
            let beta = cfg.require("fields.beta", cfg.fields.beta)?;
            t = Table::new(
                "surfaces",
                vec![
                    col("r", "r_B", "intermolecular distance"),
                    col("r_scaled", "r_unit", "r in the configured length unit"),
                    col("theta", "rad", "polar angle to the field axis"),
                    col("sym_0", "B", "largest root of the M=0 symmetric cubic"),
                    col("sym_1", "B", "middle root of the M=0 symmetric cubic"),
                    col("sym_2", "B", "smallest root of the M=0 symmetric cubic"),
                    col("anti", "B", "-Delta_{1;0;-}"),
                    col("fallback", "bool", "plumbing"),
                ],
            );
            let mut fallbacks = 0;
            for &theta in &thetas {
                for &r in &rs {
                    let m = reduced_m0_model(r, theta, &ac, beta);
                    fallbacks += m.fallback as usize;
                    t.push(vec![
                        r.into(),
                        (r / scale).into(),
                        theta.into(),
                        m.symmetric[0].into(),
                        m.symmetric[1].into(),
                        m.symmetric[2].into(),
                        m.antisymmetric.into(),
                        m.fallback.into(),
                    ]);
                }
            }
            notes.push(format!(
                "closed-form cubic replaced by the eigensolver at {fallbacks} points"
            ));
        }
    }
    Ok(CommandOutput {
        tables: vec![t],
        notes,
        failures: vec![],
    })
}

fn trap_for(cfg: &RunConfig, e: &Eff2dConfig) -> Result<TrapConfig> {
    let mut trap = TrapConfig::new(
        cfg.require("fields.omega_perp", cfg.fields.omega_perp)?,
        cfg.molecule.natural_mass(),
    )?;
    trap.n_osc = e.n_osc;
    trap.trace_nodes = e.trace_nodes;
    Ok(trap)
}

pub fn eff2d(cfg: &RunConfig) -> Result<CommandOutput> {
    let e = cfg
        .eff2d
        .clone()
        .ok_or_else(|| Error::Config("eff2d: section required".into()))?;
    let rho = cfg.grid(&e.grid)?;
    if rho[0] <= 0.0 {
        return Err(Error::Config(format!(
            "grids.{}: rho must be positive",
            e.grid
        )));
    }
    let trap = trap_for(cfg, &e)?;
    match e.mode {
        Eff2dMode::GaussianTrace => gaussian_trace(cfg, &e, &rho, &trap),
        Eff2dMode::ZBands => z_bands(cfg, &e, &rho, &trap),
    }
}

fn gaussian_trace(
    cfg: &RunConfig,
    e: &Eff2dConfig,
    rho: &[f64],
    trap: &TrapConfig,
) -> Result<CommandOutput> {
    let betas = if e.betas.is_empty() {
        vec![cfg.require("fields.beta", cfg.fields.beta)?]
    } else {
        e.betas.clone()
    };
    let ac = match e.potential {
        PotentialKind::Dc => None,
        PotentialKind::DcAc => Some(ac_config(cfg)?),
    };
    let points: Vec<(f64, f64)> = betas
        .iter()
        .flat_map(|&b| rho.iter().map(move |&r| (b, r)))
        .collect();
    let results: Vec<Result<(f64, f64, f64, bool)>> = points
        .par_iter()
        .map(|&(beta, r)| {
            let mode = match ac {
                None => PotentialMode::Dc { beta },
                Some(ac) => PotentialMode::DcAc { beta, ac },
            };
            let v = v_eff_2d(r, &mode, trap)?;
            let v3 = mode.v3d(r, 0.0);
            let (margin, ok) = match ac {
                None => {
                    let m = trap.omega_perp - v;
                    (m, v < e.threshold * trap.omega_perp)
                }
                Some(ac) => adiabaticity_margin(r, &ac, beta, trap, e.threshold)?,
            };
            Ok((v, v3, margin, ok))
        })
        .collect();
    let (margin_unit, margin_ref) = match e.potential {
        PotentialKind::Dc => ("B", "hbar omega_perp - V_2D"),
        PotentialKind::DcAc => ("B", "hbar omega_perp - 2 hbar Delta - V_2D"),
    };
    let mut t = Table::new(
        "eff2d",
        vec![
            col("beta", "1", "beta = dE/B"),
            col("rho", "r_B", "in-plane distance"),
            col(
                "v2d",
                "B",
                "Gaussian trace of V_3D over the trap ground state",
            ),
            col("v3d_plane", "B", "V_3D(rho, z=0)"),
            col("margin", margin_unit, margin_ref),
            col(
                "adiabatic",
                "bool",
                "V_2D below threshold times the margin budget",
            ),
            col("status", "1", "plumbing"),
        ],
    );
    let mut failures = Vec::new();
    for (&(beta, r), res) in points.iter().zip(results) {
        match res {
            Ok((v, v3, m, ok)) => t.push(vec![
                beta.into(),
                r.into(),
                v.into(),
                v3.into(),
                m.into(),
                ok.into(),
                "ok".into(),
            ]),
            Err(err) => {
                failures.push(Failure {
                    file: "eff2d".into(),
                    point: format!("beta={beta}, rho={r}"),
                    error: err.to_string(),
                });
                t.push(vec![
                    beta.into(),
                    r.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    false.into(),
                    "failed".into(),
                ]);
            }
        }
    }
    let mut notes = vec![format!(
        "a_perp = {:.6e} r_B, relative oscillator length {:.6e} r_B",
        trap.a_perp(),
        trap.relative_length()
    )];
    for &beta in &betas {
        if beta > 0.0 {
            if let Ok(g) = saddle_geometry(beta, trap) {
                notes.push(format!(
                    "beta={beta}: {:?} saddle at rho={:.6e}, z={:.6e}, barrier {:.6e} B",
                    g.regime, g.closed_form.rho, g.closed_form.z, g.closed_form.barrier
                ));
            }
        }
    }
    Ok(CommandOutput {
        tables: vec![t],
        notes,
        failures,
    })
}

fn z_bands(
    cfg: &RunConfig,
    e: &Eff2dConfig,
    rho: &[f64],
    trap: &TrapConfig,
) -> Result<CommandOutput> {
    let ac = ac_config(cfg)?;
    let beta = cfg.require("fields.beta", cfg.fields.beta)?;
    let b = z_band_spectrum(rho, &ac, beta, trap, e.kmax)?;
    let margins: Vec<Result<(f64, bool)>> = b
        .rho
        .par_iter()
        .map(|&r| adiabaticity_margin(r, &ac, beta, trap, e.threshold))
        .collect();
    let mut t = Table::new(
        "eff2d",
        vec![
            col("rho", "r_B", "in-plane distance"),
            col("label", "1", "plumbing"),
            col(
                "branch",
                "1",
                "internal M=0 branch: 0..2 symmetric, 3 antisymmetric",
            ),
            col("k", "1", "transverse oscillator index"),
            col(
                "energy",
                "B",
                "eigenvalue of p_z^2/m + m omega^2 z^2/4 - hbar omega/2 + H_int(rho, z)",
            ),
            col("energy_rel", "B", "E_k(rho) - E_branch(infinity)"),
            col("ground", "B", "lowest band energy at rho"),
            col(
                "separation_all",
                "B",
                "distance from the ground band to the nearest k > 0 band",
            ),
            col(
                "separation_coupled",
                "B",
                "same, symmetric branch and even k only",
            ),
            col("margin", "B", "hbar omega_perp - 2 hbar Delta - V_2D"),
            col(
                "adiabatic",
                "bool",
                "V_2D below threshold times the margin budget",
            ),
        ],
    );
    let mut failures = Vec::new();
    let margins: Vec<(f64, bool)> = margins
        .into_iter()
        .zip(&b.rho)
        .map(|(m, &r)| {
            m.unwrap_or_else(|err| {
                failures.push(Failure {
                    file: "eff2d".into(),
                    point: format!("rho={r}"),
                    error: err.to_string(),
                });
                (f64::NAN, false)
            })
        })
        .collect();
    for (i, &r) in b.rho.iter().enumerate() {
        for tr in &b.surface.tracks {
            let branch = match tr.label.sigma {
                Sigma::Minus => 3,
                Sigma::Plus => tr.label.jtot as usize,
            };
            t.push(vec![
                r.into(),
                tr.label.tag().into(),
                branch.into(),
                tr.label.band.unwrap_or(0).into(),
                tr.energies[i].into(),
                (tr.energies[i] - b.asymptotes[branch]).into(),
                b.ground[i].into(),
                b.separation_all[i].into(),
                b.separation_coupled[i].into(),
                margins[i].0.into(),
                margins[i].1.into(),
            ]);
        }
    }
    let notes = vec![
        format!("asymptotes {:?}", b.asymptotes),
        format!("kmax = {}, oscillator basis {}", e.kmax, trap.n_osc),
    ];
    Ok(CommandOutput {
        tables: vec![t],
        notes,
        failures,
    })
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::InPlane => "in_plane",
        Regime::OffPlane => "off_plane",
    }
}

pub fn instanton(cfg: &RunConfig) -> Result<CommandOutput> {
    let icfg: InstantonConfig = cfg.instanton.clone().unwrap_or_default();
    let ws = cfg.grid(&icfg.grid)?;
    if ws[0] <= 0.0 {
        return Err(Error::Config(format!(
            "grids.{}: ratios must be positive",
            icfg.grid
        )));
    }
    let opts = icfg.solver;
    let results: Vec<Result<_>> = ws.par_iter().map(|&w| solve_reduced(w, &opts)).collect();
    let mut t = Table::new(
        "instanton",
        vec![
            col("omega_ratio", "1", "omega_perp/omega_c"),
            col(
                "action_s0",
                "S0",
                "2 int sqrt(m V) ds along the minimal path",
            ),
            col("low_omega_law", "S0", "7.01 (omega_perp/omega_c)^(1/5)"),
            col("regime", "1", "in_plane or off_plane bounce"),
            col("bounce_rho", "r_star", "bounce point rho"),
            col("bounce_z", "r_star", "bounce point z"),
            col(
                "bounce_angle",
                "rad",
                "polar angle of the bounce from the trap axis",
            ),
            col("residual", "1", "relative action gradient"),
            col("status", "1", "plumbing"),
        ],
    );
    let mut failures = Vec::new();
    for (&w, res) in ws.iter().zip(results) {
        let law = 7.01 * w.powf(0.2);
        match res {
            Ok(r) => t.push(vec![
                w.into(),
                r.action.into(),
                law.into(),
                regime_name(r.regime).into(),
                r.path[0].0.into(),
                r.path[0].1.into(),
                r.bounce_angle.into(),
                r.residual.into(),
                "ok".into(),
            ]),
            Err(err) => {
                let (action, bounce, residual) = match &err {
                    Error::Instanton {
                        residual,
                        best_action,
                        best_path,
                    } => (
                        *best_action,
                        best_path.first().copied().unwrap_or((f64::NAN, f64::NAN)),
                        *residual,
                    ),
                    _ => (f64::NAN, (f64::NAN, f64::NAN), f64::NAN),
                };
                failures.push(Failure {
                    file: "instanton".into(),
                    point: format!("omega_ratio={w}"),
                    error: err.to_string(),
                });
                t.push(vec![
                    w.into(),
                    action.into(),
                    law.into(),
                    "unknown".into(),
                    bounce.0.into(),
                    bounce.1.into(),
                    bounce.1.atan2(bounce.0).into(),
                    residual.into(),
                    "unconverged".into(),
                ]);
            }
        }
    }
    let mut tables = vec![t];
    let mut notes = vec![format!("solver {opts:?}")];
    if !icfg.physical.is_empty() {
        let scale = cfg.molecule.scale().ok_or_else(|| {
            Error::Config("instanton.physical: needs molecule parameters in SI units".into())
        })?;
        let mut p = Table::new(
            "instanton_physical",
            vec![
                col("beta", "1", "beta = dE/B"),
                col("omega_perp_hz", "Hz", "omega_perp/2pi"),
                col("omega_perp", "B/hbar", "omega_perp in natural units"),
                col("omega_ratio", "1", "omega_perp/omega_c"),
                col(
                    "exponent_factor",
                    "1",
                    "(C3^2 m^3 omega_perp/8 hbar^5)^(1/5)",
                ),
                col(
                    "action_formula",
                    "hbar",
                    "5.86 factor below the crossover, 5.78 S0 above",
                ),
                col(
                    "action_numeric",
                    "hbar",
                    "2 int sqrt(m V) ds along the minimal path",
                ),
                col("action_trap_lengths", "hbar", "1.43 (ell_perp/a_perp)^2"),
                col("suppression", "1", "exp(-S_E/hbar)"),
                col("regime", "1", "in_plane or off_plane bounce"),
            ],
        );
        let rows: Vec<Result<Vec<Cell>>> = icfg
            .physical
            .par_iter()
            .map(|pt| {
                let w = scale.angular_frequency_to_natural(2.0 * PI * pt.omega_perp_hz);
                let est = tunneling_exponent(&cfg.molecule, pt.beta, w, &opts)?;
                let g = crate::pair::GroundCoefficients::from_beta(pt.beta);
                let ratio = w / crate::instanton::omega_c(&g, cfg.molecule.natural_mass());
                Ok(vec![
                    pt.beta.into(),
                    pt.omega_perp_hz.into(),
                    w.into(),
                    ratio.into(),
                    est.exponent_factor.into(),
                    est.action_formula.into(),
                    est.action_numeric.into(),
                    est.action_trap_lengths.into(),
                    est.suppression.into(),
                    regime_name(est.regime).into(),
                ])
            })
            .collect();
        for (pt, r) in icfg.physical.iter().zip(rows) {
            match r {
                Ok(row) => p.push(row),
                Err(err) => {
                    failures.push(Failure {
                        file: "instanton_physical".into(),
                        point: format!("beta={}, omega_perp_hz={}", pt.beta, pt.omega_perp_hz),
                        error: err.to_string(),
                    });
                    let mut row: Vec<Cell> = vec![pt.beta.into(), pt.omega_perp_hz.into()];
                    row.extend((0..7).map(|_| Cell::Num(f64::NAN)));
                    row.push("unknown".into());
                    p.push(row);
                }
            }
        }
        tables.push(p);
        notes.push("suppression excludes the prefactor Gamma_0".into());
    }
    Ok(CommandOutput {
        tables,
        notes,
        failures,
    })
}

fn comparison_columns(first: Vec<Column>) -> Vec<Column> {
    let mut c = first;
    c.extend([
        col("e0_analytic", "B", "asymptotic pair energy"),
        col("c3_analytic", "d^2", "tabulated C3"),
        col("c6x6_analytic", "d^4/B", "tabulated 6 B C6/d^4"),
        col("e0_fit", "B", "least squares E0 + C3/r^3 + C6/r^6"),
        col("c3_fit", "d^2", "least squares E0 + C3/r^3 + C6/r^6"),
        col("c6x6_fit", "d^4/B", "6 x fitted C6"),
        col(
            "dev_c3",
            "1",
            "|fit - analytic|/|analytic|, or /(d^2/3) when analytic vanishes",
        ),
        col("dev_c6", "1", "|fit - analytic|/|analytic|"),
        col("rms", "B", "fit residual"),
        col("status", "1", "plumbing"),
    ]);
    c
}

fn comparison_cells(c: &RowComparison) -> Vec<Cell> {
    let flag = if c.dev_c3 <= TABLE_TOLERANCE && c.dev_c6 <= TABLE_TOLERANCE {
        "ok"
    } else {
        "deviates"
    };
    vec![
        c.table_e0.into(),
        c.table_c3.into(),
        c.table_c6x6.into(),
        c.fit.e0.into(),
        c.fit.c3.into(),
        (6.0 * c.fit.c6).into(),
        c.dev_c3.into(),
        c.dev_c6.into(),
        c.fit.rms.into(),
        flag.into(),
    ]
}

pub fn tables(cfg: &RunConfig) -> Result<CommandOutput> {
    let tc: TablesConfig = cfg.tables.clone().unwrap_or_default();
    let window = (tc.window[0], tc.window[1]);
    let mut notes = vec![format!("fit window r/r_B in [{}, {}]", window.0, window.1)];

    let mut t1 = Table::new(
        "tables_1",
        vec![
            col("beta", "1", "beta = dE/B"),
            col("moment", "1", "plumbing"),
            col("numeric", "d", "<phi| d_0 |phi'> between pendulum states"),
            col("analytic", "d", "third-order expansion in beta"),
            col("abs_dev", "d", "|numeric - analytic|"),
        ],
    );
    let moments: Vec<Result<DipoleMoments>> = tc
        .betas
        .par_iter()
        .map(|&b| pendulum_spectrum(b, crate::rotor::DEFAULT_JMAX).map(|r| dipole_moments(&r)))
        .collect();
    for (&b, m) in tc.betas.iter().zip(moments) {
        let num = m?.as_array();
        let ana = DipoleMoments::perturbative(b).as_array();
        for k in 0..6 {
            t1.push(vec![
                b.into(),
                DipoleMoments::NAMES[k].into(),
                num[k].into(),
                ana[k].into(),
                (num[k] - ana[k]).abs().into(),
            ]);
        }
    }

    let zero = zero_field_table();
    let mut t2 = Table::new(
        "tables_2",
        comparison_columns(vec![
            col("n", "1", "plumbing"),
            col("jtot", "1", "J1 + J2 of the asymptotic state"),
            col("y", "1", "projection Y on the collision axis"),
            col("sigma", "1", "exchange symmetry"),
            col("term", "1", "molecular term symbol"),
        ]),
    );
    let mut failures = Vec::new();
    let c2 = compare_zero_field(window)?;
    for c in &c2 {
        let row = &zero[c.n as usize];
        let mut cells: Vec<Cell> = vec![
            row.n.into(),
            row.jtot.into(),
            (row.y as i64).into(),
            row.sigma.symbol().to_string().into(),
            row.term.into(),
        ];
        cells.extend(comparison_cells(c));
        t2.push(cells);
    }

    let mut t3 = Table::new(
        "tables_3",
        comparison_columns(vec![
            col("beta", "1", "beta = dE/B"),
            col("theta", "rad", "polar angle to the field axis"),
            col("n", "1", "plumbing"),
            col("jtot", "1", "J1 + J2 of the asymptotic state"),
            col("m", "1", "|M1| + |M2|"),
            col("mu", "1", "plumbing"),
            col("sigma", "1", "exchange symmetry"),
        ]),
    );
    let dc: Vec<Result<Vec<RowComparison>>> = tc
        .dc_betas
        .par_iter()
        .map(|&b| compare_dc(b, tc.theta, window))
        .collect();
    for (&b, res) in tc.dc_betas.iter().zip(dc) {
        match res {
            Ok(rows) => {
                let table = dc_table(b, tc.theta);
                for c in &rows {
                    let row = table
                        .iter()
                        .find(|r| r.n == c.n)
                        .expect("comparison rows come from the table");
                    let mut cells: Vec<Cell> = vec![
                        b.into(),
                        tc.theta.into(),
                        row.n.into(),
                        row.jtot.into(),
                        row.m.into(),
                        row.mu.into(),
                        row.sigma.symbol().to_string().into(),
                    ];
                    cells.extend(comparison_cells(c));
                    t3.push(cells);
                }
            }
            Err(err) => failures.push(Failure {
                file: "tables_3".into(),
                point: format!("beta={b}"),
                error: err.to_string(),
            }),
        }
    }
    let flagged = t2
        .rows
        .iter()
        .chain(&t3.rows)
        .filter(|r| r.last() == Some(&Cell::from("deviates")))
        .count();
    notes.push(format!(
        "{flagged} rows deviate by more than {TABLE_TOLERANCE} from the tabulated coefficients"
    ));
    Ok(CommandOutput {
        tables: vec![t1, t2, t3],
        notes,
        failures,
    })
}

pub fn scales(cfg: &RunConfig) -> Result<CommandOutput> {
    let f = &cfg.fields;
    let beta = f.beta.filter(|&b| b > 0.0);
    let s = characteristic_scales(&cfg.molecule, beta, f.delta, f.omega_perp)?;
    let si = s.si.clone();
    let mut t = Table::new(
        "scales",
        vec![
            col("quantity", "1", "plumbing"),
            col("natural", "natural", "value with B = d = hbar = 1"),
            col("natural_unit", "1", "plumbing"),
            col("si", "si", "value converted with the recorded constants"),
            col("si_unit", "1", "plumbing"),
        ],
    );
    let mut add = |name: &str, nat: Option<f64>, nu: &str, siv: Option<f64>, su: &str| {
        if nat.is_some() {
            t.push(vec![
                name.into(),
                nat.into(),
                nu.into(),
                siv.into(),
                su.into(),
            ]);
        }
    };
    let g = |sel: fn(&crate::pair::CharScalesSi) -> Option<f64>| si.as_ref().and_then(sel);
    add("r_B", Some(s.r_b), "r_B", si.as_ref().map(|x| x.r_b_m), "m");
    add("r_star", s.r_star, "r_B", g(|x| x.r_star_m), "m");
    add("r_delta", s.r_delta, "r_B", g(|x| x.r_delta_m), "m");
    add("r_C", s.r_c, "r_B", g(|x| x.r_c_m), "m");
    add("V_star", s.v_star, "B", g(|x| x.v_star_j), "J");
    add(
        "omega_c",
        s.omega_c,
        "B/hbar",
        g(|x| x.omega_c_rad_s),
        "rad/s",
    );
    add("ell_perp", s.ell_perp, "r_B", g(|x| x.ell_perp_m), "m");
    add("a_perp", s.a_perp, "r_B", g(|x| x.a_perp_m), "m");
    add("S0", s.s0, "hbar", s.s0, "hbar");
    add("kappa", Some(s.kappa), "1", Some(s.kappa), "1");
    let mass_kg = si.as_ref().map(|_| cfg.molecule.m * crate::units::AMU);
    add(
        "mass",
        Some(cfg.molecule.natural_mass()),
        "hbar^2/(B r_B^2)",
        mass_kg,
        "kg",
    );
    if let Some(u) = cfg.molecule.scale() {
        add("B", Some(1.0), "B", Some(u.energy_j), "J");
        add("hbar/B", Some(1.0), "hbar/B", Some(u.time_s), "s");
    }
    let scale_refs = [
        "r_star = (2|C6|/C3)^(1/3)",
        "r_delta = (d^2/hbar delta)^(1/3)",
        "r_C = (d^2/3 hbar Delta)^(1/3)",
        "V_star = C3^2/4|C6|",
        "omega_c = (12 C3/m r_star^5)^(1/2)",
        "ell_perp = (12 C3/m omega_perp^2)^(1/5)",
        "a_perp = (hbar/m omega_perp)^(1/2)",
        "S0 = (m|C6|)^(1/2)/r_star^2",
        "kappa = (d^4 m^3 B/hbar^6)^(1/2)",
    ];
    Ok(CommandOutput {
        tables: vec![t],
        notes: scale_refs.iter().map(|s| s.to_string()).collect(),
        failures: vec![],
    })
}
