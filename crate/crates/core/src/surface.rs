//! Labeled, adiabatically tracked eigenvalue curves.

use serde::{Deserialize, Serialize};

use crate::linalg::{CVector, Eigen};

/// Permutation symmetry of a pair state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn sign(self) -> i32 {
        match self {
            Sigma::Plus => 1,
            Sigma::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sigma::Plus => '+',
            Sigma::Minus => '-',
        }
    }
}

/// Symmetry bookkeeping for one track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLabel {
    /// Manifold index `J₁ + J₂`.
    pub jtot: u32,
    /// `|Y|` on the collision axis (zero field) or `|M₁| + |M₂|` (DC field).
    pub proj: u32,
    /// Sub-index among tracks sharing `(jtot, proj, sigma)`, by ascending asymptotic energy.
    pub mu: u32,
    pub sigma: Sigma,
    /// `σ(−1)^J`, defined only at zero field.
    pub parity: Option<i8>,
    /// Transverse oscillator band.
    pub band: Option<u32>,
}

impl StateLabel {
    pub fn tag(&self) -> String {
        let mut s = format!(
            "J{}_P{}_mu{}_{}",
            self.jtot,
            self.proj,
            self.mu,
            self.sigma.symbol()
        );
        if let Some(k) = self.band {
            s.push_str(&format!("_k{k}"));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Track {
    pub label: StateLabel,
    pub energies: Vec<f64>,
    /// Overlap with the same track at the previous (outer) grid point.
    pub overlaps: Vec<f64>,
    /// Grid points where the overlap dropped below one half.
    pub crossings: Vec<usize>,
    /// Asymptotic photon-dressing offset `J·Δ` for dressed tracks.
    pub photon_offset: Option<f64>,
}

/// A radial cut through a surface at fixed polar angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Surface {
    pub theta: f64,
    pub r: Vec<f64>,
    pub tracks: Vec<Track>,
    /// Points inside the molecular core `r < r_B`.
    pub core: Vec<bool>,
}

/// Raw tracking result before labels are attached.
#[derive(Debug, Clone)]
pub struct RawTrack {
    pub energies: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub crossings: Vec<usize>,
    pub vectors: Vec<CVector>,
}

/// Follow the eigenvectors `start` of `eigs[0]` through the sequence by
/// maximal overlap. Near-degenerate eigenvalues are grouped into clusters and
/// a track entering a cluster continues along its projection onto it, so
/// tracking through exact degeneracies stays smooth.
pub fn track(eigs: &[Eigen], start: &[usize], degeneracy_tol: f64) -> Vec<RawTrack> {
    let mut out: Vec<RawTrack> = start
        .iter()
        .map(|&i| RawTrack {
            energies: vec![eigs[0].values[i]],
            overlaps: vec![1.0],
            crossings: vec![],
            vectors: vec![eigs[0].vectors.column(i).into_owned()],
        })
        .collect();
    for (step, e) in eigs.iter().enumerate().skip(1) {
        let clusters = clusters(&e.values, degeneracy_tol);
        let prev: Vec<CVector> = out
            .iter()
            .map(|t| t.vectors.last().unwrap().clone())
            .collect();
        // weight of each previous vector on each cluster
        let mut cand: Vec<(f64, usize, usize)> = Vec::new();
        for (t, v) in prev.iter().enumerate() {
            for (c, members) in clusters.iter().enumerate() {
                let w: f64 = members
                    .iter()
                    .map(|&k| e.vectors.column(k).dotc(v).norm_sqr())
                    .sum();
                if w > 1e-14 {
                    cand.push((w, t, c));
                }
            }
        }
        cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used = vec![0usize; clusters.len()];
        let mut assigned: Vec<Option<(usize, f64)>> = vec![None; prev.len()];
        for &(w, t, c) in &cand {
            if assigned[t].is_none() && used[c] < clusters[c].len() {
                assigned[t] = Some((c, w));
                used[c] += 1;
            }
        }
        // tracks with no candidate left take any cluster with free capacity
        for t in 0..prev.len() {
            if assigned[t].is_none() {
                if let Some(c) = (0..clusters.len()).find(|&c| used[c] < clusters[c].len()) {
                    assigned[t] = Some((c, 0.0));
                    used[c] += 1;
                }
            }
        }
        // Gram-Schmidt the projections of tracks sharing a cluster
        let mut taken: Vec<Vec<CVector>> = vec![Vec::new(); clusters.len()];
        for t in 0..prev.len() {
            let (c, w) = assigned[t].expect("cluster capacity covers all tracks");
            let members = &clusters[c];
            let mut v = CVector::zeros(prev[t].len());
            for &k in members {
                let col = e.vectors.column(k);
                v += col * col.dotc(&prev[t]);
            }
            for u in &taken[c] {
                let p = u.dotc(&v);
                v -= u * p;
            }
            let mut nrm = v.norm();
            if nrm < 1e-8 {
                // fall back to a cluster member orthogonal to the ones already used
                for &k in members {
                    let mut cand = e.vectors.column(k).into_owned();
                    for u in &taken[c] {
                        let p = u.dotc(&cand);
                        cand -= u * p;
                    }
                    if cand.norm() > 1e-4 {
                        v = cand;
                        break;
                    }
                }
                nrm = v.norm();
            }
            let v = v / num_complex::Complex64::new(nrm, 0.0);
            taken[c].push(v.clone());
            let energy = members.iter().map(|&k| e.values[k]).sum::<f64>() / members.len() as f64;
            let tr = &mut out[t];
            tr.energies.push(energy);
            tr.overlaps.push(w);
            if w < 0.5 {
                tr.crossings.push(step);
            }
            tr.vectors.push(v);
        }
    }
    out
}

fn clusters(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[*c.last().unwrap()]).abs() <= tol => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Assign `mu` sub-indices: tracks sharing `(jtot, proj, sigma)` are numbered
/// by ascending asymptotic energy.
pub fn assign_mu(labels: &mut [StateLabel], asymptotic: &[f64]) {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| asymptotic[a].total_cmp(&asymptotic[b]).then(a.cmp(&b)));
    let mut seen: std::collections::HashMap<(u32, u32, Sigma), u32> = Default::default();
    for i in order {
        let key = (labels[i].jtot, labels[i].proj, labels[i].sigma);
        let c = seen.entry(key).or_insert(0);
        labels[i].mu = *c;
        *c += 1;
    }
}
