//! Zero-energy euclidean paths through the trapped DC barrier.
//!
//! Work is done in reduced units: lengths in `r⋆`, energies in `V⋆`, actions
//! in `S₀ = √(m|C₆;0|)/r⋆²`. The trapped potential becomes
//! `v = 2Υ/x³ − 1/x⁶ + 6w²ζ²` with `w = ω⊥/ω_c`, so every result depends on
//! `w` alone; physical values follow by rescaling.

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::confinement::{v_trapped, PotentialMode, TrapConfig};
use crate::error::{domain, Error, Result};
use crate::pair::GroundCoefficients;
use crate::quadrature::minimize_bounded;
use crate::rotor::MoleculeParams;

/// Constant of the in-plane action `2^{5/3}√π Γ(7/6)/Γ(5/3)`.
pub fn in_plane_constant() -> f64 {
    2f64.powf(5.0 / 3.0) * std::f64::consts::PI.sqrt() * gamma(7.0 / 6.0) / gamma(5.0 / 3.0)
}

/// Strong-confinement bounce radius `r⋆/2^{1/3}` (distinct from the saddle length).
pub fn bounce_radius(g: &GroundCoefficients) -> f64 {
    g.r_star() / 2f64.cbrt()
}

/// `ω_c = (12C₃;0/m r⋆⁵)^{1/2}`.
pub fn omega_c(g: &GroundCoefficients, mass: f64) -> f64 {
    (12.0 * g.c3 / (mass * g.r_star().powi(5))).sqrt()
}

/// `S₀ = √(m|C₆;0|)/r⋆²`.
pub fn action_unit(g: &GroundCoefficients, mass: f64) -> f64 {
    (mass * g.c6.abs()).sqrt() / g.r_star().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    InPlane,
    OffPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstantonOptions {
    /// Path segments between the bounce and `r_max`.
    pub segments: usize,
    /// Outer end of the discretized path in units of `r⋆`; the rest is an analytic tail.
    pub r_max: f64,
    /// Bounce angles sampled before the golden-section refinement.
    pub angle_scan: usize,
    /// Largest relative gradient accepted at the end of the relaxation.
    pub tol: f64,
}

impl Default for InstantonOptions {
    fn default() -> Self {
        InstantonOptions {
            segments: 200,
            r_max: 40.0,
            angle_scan: 32,
            tol: 1e-7,
        }
    }
}

/// Minimal-action path in reduced units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedInstanton {
    pub omega_ratio: f64,
    /// `(ρ, z)/r⋆` from the bounce outward.
    pub path: Vec<(f64, f64)>,
    /// Polar angle of the bounce point from the trap axis.
    pub bounce_angle: f64,
    /// `S_E/S₀`.
    pub action: f64,
    pub regime: Regime,
    pub residual: f64,
}

/// Minimal-action path in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantonResult {
    pub path: Vec<(f64, f64)>,
    pub bounce: (f64, f64),
    /// `S_E` in units of `ħ`.
    pub action: f64,
    /// `S_E/S₀`.
    pub action_s0: f64,
    pub regime: Regime,
    pub omega_ratio: f64,
    pub residual: f64,
}

struct Reduced {
    six_w2: f64,
    rule: GaussLegendre,
}

impl Reduced {
    fn new(w: f64) -> Reduced {
        Reduced {
            six_w2: 6.0 * w * w,
            rule: GaussLegendre::new(NonZeroUsize::new(4).expect("4 > 0")),
        }
    }

    fn v(&self, rho: f64, z: f64) -> f64 {
        let x2 = rho * rho + z * z;
        let x = x2.sqrt();
        2.0 * (rho * rho - 2.0 * z * z) / (x2 * x2 * x) - 1.0 / (x2 * x2 * x2) + self.six_w2 * z * z
    }

    fn grad(&self, rho: f64, z: f64) -> (f64, f64) {
        let x2 = rho * rho + z * z;
        let x = x2.sqrt();
        let u = rho * rho - 2.0 * z * z;
        let x5 = x2 * x2 * x;
        let x7 = x5 * x2;
        let x8 = x2 * x2 * x2 * x2;
        (
            2.0 * (2.0 * rho / x5 - 5.0 * rho * u / x7) + 6.0 * rho / x8,
            2.0 * (-4.0 * z / x5 - 5.0 * z * u / x7) + 6.0 * z / x8 + 2.0 * self.six_w2 * z,
        )
    }

    /// `∫√|v| ds` along a straight segment; the absolute value makes excursions
    /// into the classically allowed region cost action instead of being free.
    fn segment(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        if len == 0.0 {
            return 0.0;
        }
        len * self.rule.integrate(0.0, 1.0, |s| {
            self.v(a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s)
                .abs()
                .sqrt()
        })
    }

    /// Radius of the inner `v = 0` surface along the direction `theta`.
    fn surface_radius(&self, theta: f64) -> Result<f64> {
        let (s, c) = theta.sin_cos();
        let f = |x: f64| self.v(x * s, x * c);
        let mut lo = 0.3;
        if f(lo) >= 0.0 {
            return domain(format!("no inner zero surface along theta={theta}"));
        }
        let mut hi = lo * 1.05;
        while f(hi) < 0.0 {
            lo = hi;
            hi *= 1.05;
            if hi > 1e4 {
                return domain(format!("zero surface not bracketed along theta={theta}"));
            }
        }
        let mut conv = roots::SimpleConvergency {
            eps: 1e-15,
            max_iter: 200,
        };
        roots::find_root_brent(lo, hi, f, &mut conv).map_err(|e| Error::Convergence {
            what: format!("zero surface at theta={theta}: {e:?}"),
            residual: f64::NAN,
        })
    }
}

/// `2∫_X^∞ √(2/x³ − 1/x⁶) dx` to the first two orders in `1/X³`.
fn reduced_tail(x: f64) -> f64 {
    2.0 * (2.0 * 2f64.sqrt() / x.sqrt() - 2f64.sqrt() / 14.0 * x.powf(-3.5))
}

fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    c[0] = if n > 1 { off[0] / denom } else { 0.0 };
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        c[i] = if i + 1 < n { off[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Path with fixed bounce angle, radii `x_b e^{L t²}` and free interior angles.
struct AnglePath<'a> {
    p: &'a Reduced,
    radii: Vec<f64>,
}

impl AnglePath<'_> {
    fn point(&self, i: usize, theta: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        (self.radii[i] * s, self.radii[i] * c)
    }

    fn seg(&self, i: usize, ta: f64, tb: f64) -> f64 {
        self.p.segment(self.point(i, ta), self.point(i + 1, tb))
    }

    fn total(&self, th: &[f64]) -> f64 {
        (0..th.len() - 1)
            .map(|i| self.seg(i, th[i], th[i + 1]))
            .sum()
    }

    /// Last node touching the classically allowed region: the end of the leading
    /// run on the `v = 0` surface or the last node with `v < 0`. A path started
    /// below the true bounce rides the surface or cuts through the allowed region.
    fn contact(&self, th: &[f64]) -> usize {
        let vs: Vec<f64> = (0..th.len())
            .map(|i| {
                let q = self.point(i, th[i]);
                self.p.v(q.0, q.1)
            })
            .collect();
        let thr = 1e-4 * vs.iter().fold(0.0f64, |a, &v| a.max(v));
        let riding = vs
            .iter()
            .position(|&v| v >= thr)
            .unwrap_or(vs.len())
            .saturating_sub(1);
        let dipping = vs[..vs.len() - 1]
            .iter()
            .rposition(|&v| v < 0.0)
            .unwrap_or(0);
        riding.max(dipping)
    }

    /// Damped Newton on the interior angles; returns the action sum and the relative gradient.
    fn relax(&self, th: &mut [f64], tol: f64) -> (f64, f64) {
        let n = th.len() - 1;
        let h = 1e-5;
        let mut s = self.total(th);
        let mut mu = 1e-3;
        let mut resid = f64::INFINITY;
        for _ in 0..500 {
            let base: Vec<f64> = (0..n).map(|i| self.seg(i, th[i], th[i + 1])).collect();
            let m = n - 1;
            let mut g = vec![0.0; m];
            let mut d = vec![0.0; m];
            for j in 1..n {
                let sp = self.seg(j - 1, th[j - 1], th[j] + h) + self.seg(j, th[j] + h, th[j + 1]);
                let sm = self.seg(j - 1, th[j - 1], th[j] - h) + self.seg(j, th[j] - h, th[j + 1]);
                let s0 = base[j - 1] + base[j];
                g[j - 1] = (sp - sm) / (2.0 * h);
                d[j - 1] = (sp - 2.0 * s0 + sm) / (h * h);
            }
            let mut off = vec![0.0; m.saturating_sub(1)];
            for j in 1..n - 1 {
                let pp = self.seg(j, th[j] + h, th[j + 1] + h);
                let pm = self.seg(j, th[j] + h, th[j + 1] - h);
                let mp = self.seg(j, th[j] - h, th[j + 1] + h);
                let mm = self.seg(j, th[j] - h, th[j + 1] - h);
                off[j - 1] = (pp - pm - mp + mm) / (4.0 * h * h);
            }
            let c = self.contact(th);
            resid = g[(c + 1).min(m)..]
                .iter()
                .fold(0.0f64, |a, x| a.max(x.abs()))
                / s.max(f64::MIN_POSITIVE);
            if resid < tol {
                break;
            }
            let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
            let mut accepted = false;
            let mut step_size = 0.0;
            while mu < 1e10 {
                let damped: Vec<f64> = d.iter().map(|&x| x + mu * x.abs().max(1e-12)).collect();
                if let Some(step) = solve_tridiagonal(&damped, &off, &rhs) {
                    let mut trial = th.to_vec();
                    for j in 0..m {
                        trial[j + 1] += step[j];
                    }
                    let st = self.total(&trial);
                    if st < s {
                        th.copy_from_slice(&trial);
                        step_size = step.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                        s = st;
                        mu = (mu / 3.0).max(1e-12);
                        accepted = true;
                        break;
                    }
                }
                mu *= 4.0;
            }
            if !accepted || step_size < 1e-12 {
                break;
            }
        }
        (s, resid)
    }
}

struct Trial {
    angles: Vec<f64>,
    radii: Vec<f64>,
    residual: f64,
    /// Path from the exit point on the zero surface outward, and its action `S/S₀`.
    path: Vec<(f64, f64)>,
    action: f64,
}

/// Warm start: previous angles interpolated in radius, pulled to `theta0` near the bounce.
fn initial_angles(radii: &[f64], theta0: f64, warm: Option<&Trial>) -> Vec<f64> {
    let n = radii.len() - 1;
    let Some(w) = warm else {
        return (0..=n)
            .map(|i| theta0 + (FRAC_PI_2 - theta0) * (i as f64 / n as f64).sqrt())
            .collect();
    };
    let interp = |x: f64| -> f64 {
        let k = w.radii.partition_point(|&r| r < x);
        if k == 0 {
            w.angles[0]
        } else if k > n {
            w.angles[n]
        } else {
            let f = (x - w.radii[k - 1]) / (w.radii[k] - w.radii[k - 1]);
            w.angles[k - 1] + f * (w.angles[k] - w.angles[k - 1])
        }
    };
    let xb = radii[0];
    let shift = theta0 - interp(xb);
    radii
        .iter()
        .map(|&x| interp(x) + shift * (-3.0 * (x - xb) / xb).exp())
        .collect()
}

fn trial_at(
    p: &Reduced,
    theta0: f64,
    warm: Option<&Trial>,
    opts: &InstantonOptions,
) -> Result<Trial> {
    let xb = p.surface_radius(theta0)?;
    if xb >= opts.r_max {
        return domain(format!("bounce radius {xb} beyond r_max"));
    }
    let n = opts.segments.max(8);
    let l = (opts.r_max / xb).ln();
    let radii: Vec<f64> = (0..=n)
        .map(|i| xb * (l * (i as f64 / n as f64).powi(2)).exp())
        .collect();
    let mut th = initial_angles(&radii, theta0, warm);
    th[0] = theta0;
    th[n] = FRAC_PI_2;
    let ap = AnglePath { p, radii };
    let (_, residual) = ap.relax(&mut th, opts.tol);
    let full: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            if th[i] == FRAC_PI_2 {
                (ap.radii[i], 0.0)
            } else {
                ap.point(i, th[i])
            }
        })
        .collect();
    let c = ap.contact(&th);
    let mut path = full[c..].to_vec();
    if c > 0 {
        path[0] = exit_point(p, full[c + 1], full[c]);
    }
    let action = 2.0 * path.windows(2).map(|w| p.segment(w[0], w[1])).sum::<f64>()
        + reduced_tail(opts.r_max);
    Ok(Trial {
        angles: th,
        radii: ap.radii,
        residual,
        path,
        action,
    })
}

/// Minimal-action zero-energy path at `w = ω⊥/ω_c`, in reduced units.
pub fn solve_reduced(w: f64, opts: &InstantonOptions) -> Result<ReducedInstanton> {
    if !(w > 0.0) {
        return Err(Error::Config(format!(
            "omega ratio must be positive, got {w}"
        )));
    }
    let p = Reduced::new(w);
    let accept = opts.tol * 1e3;
    let plane = trial_at(&p, FRAC_PI_2, None, opts)?;
    let k = opts.angle_scan.max(4);
    let lowest = 0.08;
    let grid: Vec<f64> = (0..=k)
        .map(|i| FRAC_PI_2 - (FRAC_PI_2 - lowest) * i as f64 / k as f64)
        .collect();
    let best: RefCell<Option<Trial>> = RefCell::new(None);
    let keep = |tr: Trial| {
        let mut b = best.borrow_mut();
        let better = match b.as_ref() {
            None => true,
            Some(o) => {
                let ok_new = tr.residual <= accept;
                let ok_old = o.residual <= accept;
                (ok_new && !ok_old) || (ok_new == ok_old && tr.action < o.action)
            }
        };
        if better {
            *b = Some(tr);
        }
    };
    let mut scan = Vec::with_capacity(k + 1);
    let mut prev: Option<Trial> = None;
    for &t in &grid[1..] {
        let tr = trial_at(&p, t, prev.as_ref(), opts)?;
        scan.push(tr.action);
        prev = Some(tr);
        keep(trial_at(&p, t, prev.as_ref(), opts)?);
    }
    let i = (0..scan.len())
        .min_by(|&a, &b| scan[a].total_cmp(&scan[b]))
        .expect("non-empty");
    let (lo, hi) = (grid[(i + 2).min(k)], grid[i]);
    let fails = RefCell::new(None);
    minimize_bounded(lo, hi, 1e-7, |t| {
        let start = best.borrow_mut().take();
        let out = trial_at(&p, t, start.as_ref(), opts);
        if let Some(s) = start {
            keep(s);
        }
        match out {
            Ok(tr) => {
                let a = tr.action;
                keep(tr);
                a
            }
            Err(e) => {
                *fails.borrow_mut() = Some(e);
                f64::INFINITY
            }
        }
    });
    if let Some(e) = fails.into_inner() {
        return Err(e);
    }
    // re-anchor the bounce where the best path leaves the zero surface
    for _ in 0..8 {
        let start = best.borrow_mut().take().expect("scan keeps a trial");
        let (r0, z0) = start.path[0];
        let t0 = r0.atan2(z0);
        let moved = (t0 - start.angles[0]).abs() > 1e-9;
        let tr = if moved {
            Some(trial_at(&p, t0, Some(&start), opts)?)
        } else {
            None
        };
        keep(start);
        match tr {
            Some(tr) => keep(tr),
            None => break,
        }
    }
    let refined = best.into_inner().expect("scan keeps a trial");
    let off_plane = refined.action < plane.action * (1.0 - 1e-9)
        && FRAC_PI_2 - refined.path[0].0.atan2(refined.path[0].1) > 1e-4;
    let (chosen, regime) = if off_plane {
        (refined, Regime::OffPlane)
    } else {
        (plane, Regime::InPlane)
    };
    let path = chosen.path;
    let action = chosen.action;
    let out = ReducedInstanton {
        omega_ratio: w,
        bounce_angle: path[0].0.atan2(path[0].1),
        action,
        regime,
        residual: chosen.residual,
        path,
    };
    if out.residual > opts.tol * 1e3 {
        return Err(Error::Instanton {
            residual: out.residual,
            best_action: out.action,
            best_path: out.path,
        });
    }
    Ok(out)
}

/// Point where the line from `inside` (`v > 0`) towards `towards` first meets `v = 0`.
fn exit_point(p: &Reduced, inside: (f64, f64), towards: (f64, f64)) -> (f64, f64) {
    let at = |s: f64| {
        (
            inside.0 + s * (towards.0 - inside.0),
            inside.1 + s * (towards.1 - inside.1),
        )
    };
    let f = |s: f64| {
        let q = at(s);
        p.v(q.0, q.1)
    };
    let mut lo = 0.0;
    let mut hi = 0.05;
    while f(hi) > 0.0 {
        lo = hi;
        hi += 0.05;
        if hi > 3.0 {
            return towards;
        }
    }
    let mut conv = roots::SimpleConvergency {
        eps: 1e-15,
        max_iter: 200,
    };
    roots::find_root_brent(lo, hi, f, &mut conv)
        .map(at)
        .unwrap_or(towards)
}

/// Minimal-action instanton of the trapped DC ground potential.
pub fn find_instanton(
    beta: f64,
    trap: &TrapConfig,
    opts: &InstantonOptions,
) -> Result<InstantonResult> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!(
            "instanton needs beta > 0, got {beta}"
        )));
    }
    let g = GroundCoefficients::from_beta(beta);
    let rs = g.r_star();
    let s0 = action_unit(&g, trap.mass);
    let w = trap.omega_perp / omega_c(&g, trap.mass);
    let red = solve_reduced(w, opts).map_err(|e| match e {
        Error::Instanton {
            residual,
            best_action,
            best_path,
        } => Error::Instanton {
            residual,
            best_action: best_action * s0,
            best_path: best_path
                .into_iter()
                .map(|(a, b)| (a * rs, b * rs))
                .collect(),
        },
        other => other,
    })?;
    let path: Vec<(f64, f64)> = red.path.iter().map(|&(a, b)| (a * rs, b * rs)).collect();
    Ok(InstantonResult {
        bounce: path[0],
        path,
        action: red.action * s0,
        action_s0: red.action,
        regime: red.regime,
        omega_ratio: w,
        residual: red.residual,
    })
}

/// `2∫√(mV) ds` along a polyline in `(ρ, z)`, with `V` the trapped DC potential.
/// Points where `V < −10⁻⁸V⋆` are rejected with the offending segment index.
pub fn jacobi_action(path: &[(f64, f64)], beta: f64, trap: &TrapConfig) -> Result<f64> {
    if path.len() < 2 {
        return Ok(0.0);
    }
    let g = GroundCoefficients::from_beta(beta);
    let floor = -1e-8 * g.v_star();
    let mode = PotentialMode::Dc { beta };
    let rule = GaussLegendre::new(NonZeroUsize::new(8).expect("8 > 0"));
    let mut total = 0.0;
    for (i, w) in path.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        if len == 0.0 {
            continue;
        }
        let mut bad = None;
        let seg = rule.integrate(0.0, 1.0, |s| {
            let v = v_trapped(a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s, &mode, trap)
                .unwrap_or(f64::NEG_INFINITY);
            if v < floor {
                bad = Some(v);
            }
            (trap.mass * v.max(0.0)).sqrt()
        });
        for p in [a, b] {
            let v = v_trapped(p.0, p.1, &mode, trap)?;
            if v < floor {
                bad = Some(v);
            }
        }
        if let Some(v) = bad {
            return domain(format!("path segment {i} enters V < 0 (V = {v:e})"));
        }
        total += 2.0 * len * seg;
    }
    Ok(total)
}

/// Analytic in-plane tail `2∫_ρ^∞ √(mV(ρ', 0)) dρ'` beyond `rho_end`.
pub fn in_plane_tail(rho_end: f64, beta: f64, trap: &TrapConfig) -> f64 {
    let g = GroundCoefficients::from_beta(beta);
    action_unit(&g, trap.mass) * reduced_tail(rho_end / g.r_star())
}

/// Zero-energy euclidean trajectory from rest at the bounce point, integrated
/// with RK4 until it crosses the plane, turns away from it, or passes `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Crossed,
    Turned,
    Escaped,
}

fn shoot(p: &Reduced, theta0: f64, r_max: f64) -> Result<(Shot, Vec<(f64, f64)>)> {
    let xb = p.surface_radius(theta0)?;
    let mut y = [xb * theta0.sin(), xb * theta0.cos(), 0.0, 0.0];
    let f = |y: &[f64; 4]| {
        let (gr, gz) = p.grad(y[0], y[1]);
        [y[2], y[3], gr, gz]
    };
    let mut path = vec![(y[0], y[1])];
    let mut descending = false;
    for _ in 0..2_000_000 {
        let x = y[0].hypot(y[1]);
        let speed = y[2].hypot(y[3]);
        let (gr, gz) = p.grad(y[0], y[1]);
        let acc = gr.hypot(gz);
        let dt = (2e-3 * x / speed.max(1e-300)).min((2e-3 * x / acc.max(1e-300)).sqrt());
        let k1 = f(&y);
        let y2: [f64; 4] = std::array::from_fn(|i| y[i] + 0.5 * dt * k1[i]);
        let k2 = f(&y2);
        let y3: [f64; 4] = std::array::from_fn(|i| y[i] + 0.5 * dt * k2[i]);
        let k3 = f(&y3);
        let y4: [f64; 4] = std::array::from_fn(|i| y[i] + dt * k3[i]);
        let k4 = f(&y4);
        y = std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if y[1] <= 0.0 {
            return Ok((Shot::Crossed, path));
        }
        path.push((y[0], y[1]));
        if y[3] < 0.0 {
            descending = true;
        } else if descending {
            return Ok((Shot::Turned, path));
        }
        if y[0].hypot(y[1]) > r_max {
            return Ok((Shot::Escaped, path));
        }
    }
    Err(Error::Convergence {
        what: format!("shooting at theta0={theta0}"),
        residual: f64::NAN,
    })
}

/// Action `S_E/S₀` of the off-plane instanton found by shooting the euclidean
/// equation of motion, bisecting on the bounce angle near `theta_guess`.
/// The trajectory is followed until it peels off the plane, then continued in-plane.
pub fn shooting_action(w: f64, theta_guess: f64, r_max: f64) -> Result<f64> {
    let p = Reduced::new(w);
    let mut lo = (theta_guess - 0.02).max(0.01);
    let mut hi = (theta_guess + 0.02).min(FRAC_PI_2 - 1e-9);
    let mut widen = 0;
    while shoot(&p, lo, r_max)?.0 == Shot::Crossed {
        lo = (lo - 0.05).max(0.01);
        widen += 1;
        if widen > 40 {
            return domain("shooting: no turning trajectory below the guess");
        }
    }
    while shoot(&p, hi, r_max)?.0 == Shot::Turned {
        hi = (hi + 0.05).min(FRAC_PI_2 - 1e-9);
        widen += 1;
        if widen > 80 {
            return domain("shooting: no crossing trajectory above the guess");
        }
    }
    let mut best = shoot(&p, lo, r_max)?.1;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (shot, path) = shoot(&p, mid, r_max)?;
        match shot {
            Shot::Crossed => hi = mid,
            Shot::Turned | Shot::Escaped => {
                lo = mid;
                best = path;
            }
        }
    }
    // cut where the trajectory comes closest to the plane
    let cut = (0..best.len())
        .min_by(|&a, &b| best[a].1.total_cmp(&best[b].1))
        .expect("non-empty");
    let mut s: f64 = best[..=cut].windows(2).map(|w| p.segment(w[0], w[1])).sum();
    let rho_cut = best[cut].0;
    if rho_cut < r_max {
        let rule = GaussLegendre::new(NonZeroUsize::new(40).expect("40 > 0"));
        let n = 64;
        let l = (r_max / rho_cut).ln();
        for i in 0..n {
            let a = rho_cut * (l * i as f64 / n as f64).exp();
            let b = rho_cut * (l * (i + 1) as f64 / n as f64).exp();
            s += rule.integrate(a, b, |x| p.v(x, 0.0).max(0.0).sqrt());
        }
        Ok(2.0 * s + reduced_tail(r_max))
    } else {
        Ok(2.0 * s + reduced_tail(rho_cut.hypot(best[cut].1)))
    }
}

/// Tunneling estimate for a given molecule, field strength and trap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelingEstimate {
    /// `(C₃;0² m³ ω⊥ / 8ħ⁵)^{1/5}`.
    pub exponent_factor: f64,
    /// `S_E/ħ` from the low-ω law `5.86·factor` below the crossover, the plateau `5.78 S₀` above it.
    pub action_formula: f64,
    /// `S_E/ħ` of the numerically minimized path.
    pub action_numeric: f64,
    /// `e^{−S_E/ħ}` from `action_formula`; the prefactor `Γ₀` is left to the caller.
    pub suppression: f64,
    pub regime: Regime,
    /// `1.43(ℓ⊥/a⊥)²`, the same low-ω law written with trap lengths.
    pub action_trap_lengths: f64,
}

/// Crossover ratio `ω'_c/ω_c` separating off-plane and in-plane bounces.
pub const CROSSOVER_RATIO: f64 = 0.88;

/// Tunneling exponent for `params` at field `beta` and trap frequency `omega_perp` (natural units).
pub fn tunneling_exponent(
    params: &MoleculeParams,
    beta: f64,
    omega_perp: f64,
    opts: &InstantonOptions,
) -> Result<TunnelingEstimate> {
    params.validate()?;
    let m = params.natural_mass();
    let trap = TrapConfig::new(omega_perp, m)?;
    let g = GroundCoefficients::from_beta(beta);
    let factor = (g.c3 * g.c3 * m.powi(3) * omega_perp / 8.0).powf(0.2);
    let inst = find_instanton(beta, &trap, opts)?;
    let s0 = action_unit(&g, m);
    let action_formula = if inst.omega_ratio < CROSSOVER_RATIO {
        5.86 * factor
    } else {
        5.78 * s0
    };
    let ell = crate::confinement::saddle_length(&g, &trap);
    Ok(TunnelingEstimate {
        exponent_factor: factor,
        action_formula,
        action_numeric: inst.action,
        suppression: (-action_formula).exp(),
        regime: inst.regime,
        action_trap_lengths: 1.43 * (ell / trap.a_perp()).powi(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_constant() {
        assert!(
            (in_plane_constant() - 5.783).abs() < 1e-3,
            "{}",
            in_plane_constant()
        );
    }

    #[test]
    fn in_plane_quadrature_matches_constant() {
        let beta = 0.2;
        let trap = TrapConfig::new(1e-6, 1e4).unwrap();
        let g = GroundCoefficients::from_beta(beta);
        let x0 = bounce_radius(&g);
        let end = 40.0 * g.r_star();
        let n = 400;
        let l = (end / x0).ln();
        let path: Vec<(f64, f64)> = (0..=n)
            .map(|i| (x0 * (l * (i as f64 / n as f64).powi(2)).exp(), 0.0))
            .collect();
        let s = jacobi_action(&path, beta, &trap).unwrap() + in_plane_tail(end, beta, &trap);
        let ratio = s / action_unit(&g, trap.mass);
        assert!((ratio - in_plane_constant()).abs() < 5e-4, "{ratio}");
    }

    #[test]
    fn zero_length_and_negative_region() {
        let trap = TrapConfig::new(1e-6, 1e4).unwrap();
        assert_eq!(jacobi_action(&[(3.0, 0.0)], 0.2, &trap).unwrap(), 0.0);
        let g = GroundCoefficients::from_beta(0.2);
        let inner = 0.5 * g.r_star();
        assert!(jacobi_action(&[(inner, 0.0), (g.r_star(), 0.0)], 0.2, &trap).is_err());
    }

    #[test]
    fn strong_confinement_plateau() {
        let r = solve_reduced(3.0, &InstantonOptions::default()).unwrap();
        assert_eq!(r.regime, Regime::InPlane);
        assert!((r.path[0].0 - 2f64.cbrt().recip()).abs() < 1e-9);
        assert!((r.action / 5.78 - 1.0).abs() < 0.01, "{}", r.action);
    }

    #[test]
    fn weak_confinement_law() {
        let r = solve_reduced(0.1, &InstantonOptions::default()).unwrap();
        assert_eq!(r.regime, Regime::OffPlane);
        assert!(r.path[0].1 > 0.0);
        let law = 7.01 * 0.1f64.powf(0.2);
        assert!((r.action / law - 1.0).abs() < 0.03, "{} vs {law}", r.action);
    }
}
