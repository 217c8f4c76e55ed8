//! Correlation kernels, determinantal correlation functions, histogram
//! estimators of ρ₁ and ρ₂, and a windowed sine-kernel DPP sampler.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::point_process::PointConfiguration;
use crate::stats::OnlineMoments;
use crate::{Error, Result};

/// Below this separation removable singularities are filled analytically.
pub const SINGULAR_TOL: f64 = 1e-8;
/// Tolerance on eigenvalues of the discretized sine operator.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// Minimum number of samples for a correlation estimate.
pub const MIN_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CorrelationKernel {
    Sine,
    SinePlus,
    SineMinus,
    /// Kernel of Haar SO(n)·e^{iψ} on the arc [ψ, ψ + π]; arguments are angles.
    SOnFinite { n: usize, psi: f64 },
}

/// sin(πd)/(πd).
pub fn sinc_pi(d: f64) -> f64 {
    if d.abs() < SINGULAR_TOL {
        let z = PI * d;
        1.0 - z * z / 6.0
    } else {
        (PI * d).sin() / (PI * d)
    }
}

/// sin(m·u/2)/sin(u/2), continued through the zeros of the denominator.
fn dirichlet(m: f64, u: f64) -> f64 {
    let den = (u / 2.0).sin();
    if den.abs() < SINGULAR_TOL {
        m * (m * u / 2.0).cos() / (u / 2.0).cos()
    } else {
        (m * u / 2.0).sin() / den
    }
}

impl CorrelationKernel {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Sine => sinc_pi(x - y),
            Self::SinePlus => sinc_pi(x - y) + sinc_pi(x + y),
            Self::SineMinus => sinc_pi(x - y) - sinc_pi(x + y),
            Self::SOnFinite { n, psi } => {
                let m = (n - 1) as f64;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                dirichlet(m, y - x) + sign * dirichlet(m, x + y - 2.0 * psi)
            }
        }
    }
}

pub fn kernel_eval(k: &CorrelationKernel, x: f64, y: f64) -> f64 {
    k.eval(x, y)
}

/// det(K(xₐ, x_b)). Round-off negatives down to −1e-9 are reported as 0.
pub fn correlation_det(k: &CorrelationKernel, points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::arg("correlation order must be at least 1"));
    }
    let r = points.len();
    let m = DMatrix::from_fn(r, r, |i, j| k.eval(points[i], points[j]));
    let d = m.determinant();
    Ok(if (-SPECTRUM_TOL..0.0).contains(&d) { 0.0 } else { d })
}

/// Histogram layout for correlation estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBins {
    /// Observation window [−window, window].
    pub window: f64,
    /// Bin width.
    pub width: f64,
    /// Largest separation binned for ρ₂.
    pub max_separation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub coords: Vec<f64>,
    pub estimate: f64,
    pub std_error: f64,
    pub theory: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub r: usize,
    pub samples: usize,
    pub values: Vec<CorrelationPoint>,
}

impl CorrelationEstimate {
    /// Fills theoretical values from a kernel. For the difference-variable ρ₂ the
    /// pair (0, u) is used.
    pub fn with_theory(mut self, k: &CorrelationKernel) -> Result<Self> {
        let r = self.r;
        for v in &mut self.values {
            let pts = if r == 2 && v.coords.len() == 1 {
                vec![0.0, v.coords[0]]
            } else {
                v.coords.clone()
            };
            v.theory = Some(correlation_det(k, &pts)?);
        }
        Ok(self)
    }

    /// Value at the bin whose centre is closest to `coords`.
    pub fn nearest(&self, coords: &[f64]) -> Option<&CorrelationPoint> {
        self.values.iter().min_by(|a, b| {
            let da: f64 = a.coords.iter().zip(coords).map(|(p, q)| (p - q).powi(2)).sum();
            let db: f64 = b.coords.iter().zip(coords).map(|(p, q)| (p - q).powi(2)).sum();
            da.total_cmp(&db)
        })
    }

    pub fn to_csv(&self) -> String {
        let dims = self.values.first().map_or(1, |v| v.coords.len());
        let mut out = String::new();
        let names = ["x", "y", "z"];
        for name in names.iter().take(dims) {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("estimate,std_error,theory\n");
        for v in &self.values {
            for c in &v.coords {
                let _ = write!(out, "{c:.10e},");
            }
            let theory = v.theory.map(|t| format!("{t:.10e}")).unwrap_or_default();
            let _ = writeln!(out, "{:.10e},{:.10e},{theory}", v.estimate, v.std_error);
        }
        out
    }
}

fn check_bins(samples: &[PointConfiguration], bins: &CorrelationBins) -> Result<()> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Estimation(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if !(bins.window > 0.0 && bins.width > 0.0) {
        return Err(Error::arg("window and bin width must be positive"));
    }
    Ok(())
}

fn finish(per_bin: Vec<OnlineMoments>, centers: Vec<Vec<f64>>, r: usize, samples: usize) -> CorrelationEstimate {
    let values = per_bin
        .into_iter()
        .zip(centers)
        .map(|(m, coords)| CorrelationPoint {
            coords,
            estimate: m.mean,
            std_error: m.std_error(),
            theory: None,
        })
        .collect();
    CorrelationEstimate { r, samples, values }
}

/// Histogram estimators: ρ₁ on a grid over the window, or ρ₂ as a function of
/// the separation u ≥ 0 with the window correction 1/(2L − u).
pub fn estimate_correlations(
    samples: &[PointConfiguration],
    r: usize,
    bins: &CorrelationBins,
) -> Result<CorrelationEstimate> {
    check_bins(samples, bins)?;
    let (l, h) = (bins.window, bins.width);
    match r {
        1 => {
            let nb = ((2.0 * l) / h).round().max(1.0) as usize;
            let h = 2.0 * l / nb as f64;
            let mut per_bin = vec![OnlineMoments::new(); nb];
            let mut counts = vec![0usize; nb];
            for cfg in samples {
                counts.iter_mut().for_each(|c| *c = 0);
                for &x in cfg.restrict(-l, l).points() {
                    let b = (((x + l) / h) as usize).min(nb - 1);
                    counts[b] += 1;
                }
                for (m, &c) in per_bin.iter_mut().zip(&counts) {
                    m.push(c as f64 / h);
                }
            }
            let centers = (0..nb).map(|i| vec![-l + (i as f64 + 0.5) * h]).collect();
            Ok(finish(per_bin, centers, 1, samples.len()))
        }
        2 => {
            let umax = bins.max_separation.min(2.0 * l);
            if !(umax > 0.0) {
                return Err(Error::arg("max separation must be positive"));
            }
            let nb = (umax / h).floor().max(1.0) as usize;
            let mut per_bin = vec![OnlineMoments::new(); nb];
            let mut counts = vec![0usize; nb];
            let edge = nb as f64 * h;
            for cfg in samples {
                counts.iter_mut().for_each(|c| *c = 0);
                let pts = cfg.restrict(-l, l);
                let p = pts.points();
                for i in 0..p.len() {
                    for &y in &p[i + 1..] {
                        let u = y - p[i];
                        if u >= edge {
                            break;
                        }
                        counts[(u / h) as usize] += 1;
                    }
                }
                for (k, (m, &c)) in per_bin.iter_mut().zip(&counts).enumerate() {
                    let (u0, u1) = (k as f64 * h, (k + 1) as f64 * h);
                    // ∫_{u0}^{u1} (2L − u) du
                    let exposure = 2.0 * l * (u1 - u0) - 0.5 * (u1 * u1 - u0 * u0);
                    m.push(c as f64 / exposure);
                }
            }
            let centers = (0..nb).map(|k| vec![(k as f64 + 0.5) * h]).collect();
            Ok(finish(per_bin, centers, 2, samples.len()))
        }
        _ => Err(Error::arg(format!("correlation order must be 1 or 2, got {r}"))),
    }
}

/// ρ₂(x, y) on a full 2-d grid over [lo, hi]², for processes that are not
/// translation invariant.
pub fn estimate_pair_correlation_grid(
    samples: &[PointConfiguration],
    lo: f64,
    hi: f64,
    width: f64,
) -> Result<CorrelationEstimate> {
    if !(hi > lo) {
        return Err(Error::arg("grid bounds out of order"));
    }
    check_bins(
        samples,
        &CorrelationBins {
            window: hi - lo,
            width,
            max_separation: hi - lo,
        },
    )?;
    let nb = ((hi - lo) / width).round().max(1.0) as usize;
    let h = (hi - lo) / nb as f64;
    let mut per_cell = vec![OnlineMoments::new(); nb * nb];
    let mut counts = vec![0usize; nb];
    let mut cell_counts = vec![0f64; nb * nb];
    for cfg in samples {
        counts.iter_mut().for_each(|c| *c = 0);
        for &x in cfg.restrict(lo, hi).points() {
            counts[(((x - lo) / h) as usize).min(nb - 1)] += 1;
        }
        for i in 0..nb {
            for j in 0..nb {
                let c = if i == j {
                    counts[i] * counts[i].saturating_sub(1)
                } else {
                    counts[i] * counts[j]
                };
                cell_counts[i * nb + j] = c as f64 / (h * h);
            }
        }
        for (m, &c) in per_cell.iter_mut().zip(&cell_counts) {
            m.push(c);
        }
    }
    let centers = (0..nb * nb)
        .map(|k| {
            let (i, j) = (k / nb, k % nb);
            vec![lo + (i as f64 + 0.5) * h, lo + (j as f64 + 0.5) * h]
        })
        .collect();
    Ok(finish(per_cell, centers, 2, samples.len()))
}

/// Sine-kernel determinantal process on [−A, A], sampled through a midpoint
/// discretization of the kernel operator and the spectral (HKPV) algorithm.
#[derive(Clone, Debug)]
pub struct SineDppSampler {
    window: f64,
    cell: f64,
    centers: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SineDppSampler {
    pub fn default_grid(a: f64) -> usize {
        64usize.max((64.0 * a).ceil() as usize)
    }

    pub fn new(a: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::arg(format!("window A must be positive, got {a}")));
        }
        if m < 64 {
            return Err(Error::arg(format!("grid size must be at least 64, got {m}")));
        }
        let h = 2.0 * a / m as f64;
        let centers: Vec<f64> = (0..m).map(|i| -a + (i as f64 + 0.5) * h).collect();
        let k = DMatrix::from_fn(m, m, |i, j| h * sinc_pi(centers[i] - centers[j]));
        let eig = SymmetricEigen::new(k);
        let mut eigenvalues = Vec::with_capacity(m);
        for &l in eig.eigenvalues.iter() {
            if !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&l) {
                return Err(Error::Discretization(format!(
                    "operator eigenvalue {l} outside [0, 1] for A={a}, m={m}"
                )));
            }
            eigenvalues.push(l.clamp(0.0, 1.0));
        }
        Ok(Self {
            window: a,
            cell: h,
            centers,
            eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// Expected number of points, the trace of the discretized operator.
    pub fn expected_count(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointConfiguration> {
        let m = self.centers.len();
        let chosen: Vec<usize> = (0..m)
            .filter(|&k| rng.random::<f64>() < self.eigenvalues[k])
            .collect();
        // Columns of v span the selected eigenspace; rows index grid cells.
        let mut v: Vec<Vec<f64>> = chosen
            .iter()
            .map(|&k| self.eigenvectors.column(k).iter().copied().collect())
            .collect();
        let mut cells = Vec::with_capacity(v.len());
        while !v.is_empty() {
            let k = v.len() as f64;
            let target = rng.random::<f64>() * k;
            let mut acc = 0.0;
            let mut pick = m - 1;
            for i in 0..m {
                acc += v.iter().map(|c| c[i] * c[i]).sum::<f64>();
                if acc > target {
                    pick = i;
                    break;
                }
            }
            cells.push(pick);
            // Eliminate the picked coordinate, then re-orthonormalize.
            let (jmax, _) = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1[pick].abs().total_cmp(&b.1[pick].abs()))
                .expect("non-empty");
            let pivot = v.swap_remove(jmax);
            for col in &mut v {
                let f = col[pick] / pivot[pick];
                for (c, p) in col.iter_mut().zip(&pivot) {
                    *c -= f * p;
                }
                col[pick] = 0.0;
            }
            for j in 0..v.len() {
                for i in 0..j {
                    let dot: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
                    let (head, tail) = v.split_at_mut(j);
                    for (c, p) in tail[0].iter_mut().zip(&head[i]) {
                        *c -= dot * p;
                    }
                }
                let norm = v[j].iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::Sampler {
                        retries: 0,
                        reason: "projection basis collapsed".into(),
                    });
                }
                v[j].iter_mut().for_each(|x| *x /= norm);
            }
        }
        let points = cells
            .into_iter()
            .map(|c| self.centers[c] + (rng.random::<f64>() - 0.5) * self.cell)
            .collect();
        PointConfiguration::new(points)
    }
}

pub fn sample_sine_dpp<R: Rng + ?Sized>(a: f64, m: usize, rng: &mut R) -> Result<PointConfiguration> {
    SineDppSampler::new(a, m)?.sample(rng)
}
