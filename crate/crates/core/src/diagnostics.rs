//! Monte Carlo checks: counting-function moments, growth-exponent fits,
//! stabilization of marginal laws across sizes, tightness and spacing statistics.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compensators::CompensatorMeasure;
use crate::ensembles::{EnsembleKind, EnsembleSampler, EnsembleSpec, RawSample, Realization};
use crate::holo::xi_circle;
use crate::point_process::PointConfiguration;
use crate::quad::integrate;
use crate::rng::{replicate, SeededRng};
use crate::stats::{ks_critical_value, ks_two_sample, linear_fit, quantile, OnlineMoments};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
/// Fits only use |x| at or above this value.
pub const FIT_MIN_ABS_X: f64 = 2.0;
pub const MIN_REPLICAS: usize = 100;
pub const TIGHTNESS_GRID: usize = 32;
pub const SPACING_BINS: usize = 50;
pub const SPACING_MAX: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingStats {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub replicas: usize,
    pub compensator: Vec<f64>,
}

impl CountingStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,mean,variance,compensator,replicas\n");
        for i in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{:.10e},{:.10e},{:.10e},{:.10e},{}",
                self.grid[i], self.mean[i], self.variance[i], self.compensator[i], self.replicas
            );
        }
        out
    }
}

/// Mean and unbiased variance of M(x) over the grid, aggregated in replica order.
pub fn counting_stats(spec: &EnsembleSpec, grid: &[f64], replicas: usize, rng: SeededRng) -> Result<CountingStats> {
    if replicas < MIN_REPLICAS {
        return Err(Error::arg(format!("need at least {MIN_REPLICAS} replicas, got {replicas}")));
    }
    let sampler = EnsembleSampler::new(spec)?;
    let counts = replicate(rng, replicas, |g, _| {
        let cfg = sampler.sample(g)?;
        Ok(grid.iter().map(|&x| cfg.counting(x).value() as f64).collect::<Vec<f64>>())
    })?;
    let mut moments = vec![OnlineMoments::new(); grid.len()];
    for row in &counts {
        for (m, &c) in moments.iter_mut().zip(row) {
            m.push(c);
        }
    }
    let m0 = spec.default_compensator();
    Ok(CountingStats {
        grid: grid.to_vec(),
        mean: moments.iter().map(|m| m.mean).collect(),
        variance: moments.iter().map(|m| m.variance()).collect(),
        replicas,
        compensator: grid.iter().map(|&x| m0.cumulative(x)).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundFit {
    pub c_hat: f64,
    pub exponent_hat: f64,
    pub max_violation_ratio: f64,
    pub pass: bool,
}

/// Fits y ≤ C(1 + r^e) by regressing the log of the running maximum of y
/// against log(1 + r) over r ≥ 2; C is then the largest ratio on the data.
fn fit_growth(rs: &[f64], ys: &[f64]) -> BoundFit {
    let mut order: Vec<usize> = (0..rs.len()).collect();
    order.sort_by(|&a, &b| rs[a].total_cmp(&rs[b]));
    let mut envelope = 0.0f64;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    let mut i = 0;
    while i < order.len() {
        // Group equal radii so each radius contributes once.
        let r = rs[order[i]];
        while i < order.len() && rs[order[i]] == r {
            envelope = envelope.max(ys[order[i]]);
            i += 1;
        }
        if r >= FIT_MIN_ABS_X && envelope > 0.0 {
            lx.push((1.0 + r).ln());
            ly.push(envelope.ln());
        }
    }
    let exponent = if lx.len() >= 2 {
        linear_fit(&lx, &ly).map(|f| f.slope.max(0.0)).unwrap_or(0.0)
    } else {
        0.0
    };
    let c_hat = rs
        .iter()
        .zip(ys)
        .map(|(r, y)| y / (1.0 + r.powf(exponent)))
        .fold(0.0, f64::max);
    let max_violation_ratio = if c_hat > 0.0 {
        rs.iter()
            .zip(ys)
            .map(|(r, y)| y / (c_hat * (1.0 + r.powf(exponent))))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    BoundFit {
        c_hat,
        exponent_hat: exponent,
        max_violation_ratio,
        pass: max_violation_ratio <= 1.0 + 1e-12,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropCritFit {
    /// Fit of |M₀(x) − E M(x)| with exponent α.
    pub mean: BoundFit,
    /// Fit of Var M(x) with exponent 2α.
    pub variance: BoundFit,
    /// Fit of |M₀([x, y])|/(1 + |y − x|) against max(|x|, |y|), exponent ν.
    pub interval: BoundFit,
    pub alpha: f64,
    pub nu: f64,
    /// M₀ vanishes on [−1, 1].
    pub origin_band_empty: bool,
    pub pass: bool,
    pub grid_min: f64,
    pub grid_max: f64,
}

pub fn fit_prop_crit(stats: &CountingStats, m0: &CompensatorMeasure) -> Result<PropCritFit> {
    let g = &stats.grid;
    if g.len() < 2 {
        return Err(Error::Estimation("grid needs at least two points".into()));
    }
    let m0_grid: Vec<f64> = g.iter().map(|&x| m0.cumulative(x)).collect();
    let rs: Vec<f64> = g.iter().map(|x| x.abs()).collect();
    let dev: Vec<f64> = stats.mean.iter().zip(&m0_grid).map(|(m, c)| (c - m).abs()).collect();
    let mean = fit_growth(&rs, &dev);
    let variance = fit_growth(&rs, &stats.variance);

    let (mut pr, mut pq) = (Vec::new(), Vec::new());
    for i in 0..g.len() {
        for j in 0..g.len() {
            if g[j] > g[i] {
                let mass = (m0_grid[j] - m0_grid[i]).abs();
                pr.push(g[i].abs().max(g[j].abs()));
                pq.push(mass / (1.0 + g[j] - g[i]));
            }
        }
    }
    let interval = fit_growth(&pr, &pq);
    let alpha = mean.exponent_hat.max(variance.exponent_hat / 2.0);
    let nu = interval.exponent_hat;
    let origin_band_empty = m0.interval_measure(-1.0, 1.0)? == 0.0;
    let pass = origin_band_empty && mean.pass && variance.pass && interval.pass && alpha + nu < 1.0;
    Ok(PropCritFit {
        mean,
        variance,
        interval,
        alpha,
        nu,
        origin_band_empty,
        pass,
        grid_min: g.iter().copied().fold(f64::INFINITY, f64::min),
        grid_max: g.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// The random function attached to one realization: ξₙ for circular kinds,
/// the fully compensated product for Gaussian kinds, and e^{iπs}∏(1 − s/ρ)
/// over the window for sine kinds.
pub struct MarginalFunction {
    kind: EnsembleKind,
    pv_full: f64,
}

impl MarginalFunction {
    pub fn new(spec: &EnsembleSpec) -> Self {
        let pv_full = if spec.kind == EnsembleKind::GBetaE {
            spec.default_compensator().pv_integral(f64::INFINITY)
        } else {
            0.0
        };
        Self {
            kind: spec.kind,
            pv_full,
        }
    }

    pub fn eval(&self, r: &Realization, s: Complex64) -> Result<Complex64> {
        if self.kind.is_circular() {
            if let RawSample::Circle(c) = &r.raw {
                return xi_circle(c, s);
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let mut log = if self.kind.is_sine() {
            Complex64::new(0.0, PI) * s
        } else {
            s * self.pv_full
        };
        for &rho in r.points.points() {
            let f = one - s / rho;
            if f == Complex64::new(0.0, 0.0) {
                return Ok(f);
            }
            log += f.ln();
        }
        Ok(log.exp())
    }
}

fn sample_function_values(
    spec: &EnsembleSpec,
    s_points: &[Complex64],
    replicas: usize,
    rng: SeededRng,
) -> Result<Vec<Vec<Complex64>>> {
    let sampler = EnsembleSampler::new(spec)?;
    let f = MarginalFunction::new(spec);
    replicate(rng, replicas, |g, _| {
        let r = sampler.sample_realization(g)?;
        s_points.iter().map(|&s| f.eval(&r, s)).collect()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub label_a: String,
    pub label_b: String,
    pub s: Complex64,
    pub ks_modulus: f64,
    pub ks_argument: f64,
    pub replicas_a: usize,
    pub replicas_b: usize,
    /// Two-sample 5% critical value for these sample sizes.
    pub threshold: f64,
}

impl PairDistance {
    pub fn max_ks(&self) -> f64 {
        self.ks_modulus.max(self.ks_argument)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub seed: SeededRng,
    pub s_points: Vec<Complex64>,
    pub labels: Vec<String>,
    pub pairs: Vec<PairDistance>,
    /// For every s and component, distances between consecutive pairs decrease.
    pub decreasing: bool,
    pub final_max_ks: f64,
}

/// KS distances between two empirical laws of function values, per s point.
pub fn compare_laws(
    a: &[Vec<Complex64>],
    b: &[Vec<Complex64>],
    s_points: &[Complex64],
    label_a: &str,
    label_b: &str,
) -> Result<Vec<PairDistance>> {
    let mut out = Vec::with_capacity(s_points.len());
    for (k, &s) in s_points.iter().enumerate() {
        let col = |v: &[Vec<Complex64>], f: fn(&Complex64) -> f64| v.iter().map(|row| f(&row[k])).collect::<Vec<f64>>();
        let (ma, mb) = (col(a, |z| z.norm()), col(b, |z| z.norm()));
        let (aa, ab) = (col(a, |z| z.arg()), col(b, |z| z.arg()));
        out.push(PairDistance {
            label_a: label_a.to_string(),
            label_b: label_b.to_string(),
            s,
            ks_modulus: ks_two_sample(&ma, &mb)?.statistic,
            ks_argument: ks_two_sample(&aa, &ab)?.statistic,
            replicas_a: a.len(),
            replicas_b: b.len(),
            threshold: ks_critical_value(0.05, a.len(), b.len()),
        });
    }
    Ok(out)
}

fn assemble_report(seed: SeededRng, s_points: &[Complex64], labels: Vec<String>, pairs: Vec<PairDistance>) -> ConvergenceReport {
    let ns = s_points.len().max(1);
    let steps = pairs.len() / ns;
    let mut decreasing = steps >= 2;
    for k in 0..ns {
        for step in 1..steps {
            let prev = &pairs[(step - 1) * ns + k];
            let cur = &pairs[step * ns + k];
            if !(cur.ks_modulus < prev.ks_modulus && cur.ks_argument < prev.ks_argument) {
                decreasing = false;
            }
        }
    }
    let final_max_ks = pairs[pairs.len().saturating_sub(ns)..]
        .iter()
        .map(PairDistance::max_ks)
        .fold(0.0, f64::max);
    ConvergenceReport {
        schema_version: SCHEMA_VERSION,
        seed,
        s_points: s_points.to_vec(),
        labels,
        pairs,
        decreasing,
        final_max_ks,
    }
}

/// For consecutive sizes (n, n′), KS distances between the laws of fₙ(s) and
/// f_{n′}(s), separately for modulus and argument.
pub fn marginal_convergence(
    spec: &EnsembleSpec,
    n_list: &[usize],
    s_points: &[Complex64],
    replicas: usize,
    rng: SeededRng,
) -> Result<ConvergenceReport> {
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("n_list must be increasing with at least two entries"));
    }
    if let Some(s) = s_points.iter().find(|s| s.im.abs() < 0.1) {
        return Err(Error::arg(format!("s point {s} is too close to the real axis")));
    }
    if replicas < 2 {
        return Err(Error::arg("need at least two replicas"));
    }
    let mut laws = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let sp = spec.clone().with_n(n);
        laws.push(sample_function_values(&sp, s_points, replicas, rng.child(n as u64))?);
    }
    let labels: Vec<String> = n_list.iter().map(|n| format!("n={n}")).collect();
    let mut pairs = Vec::new();
    for k in 1..n_list.len() {
        pairs.extend(compare_laws(&laws[k - 1], &laws[k], s_points, &labels[k - 1], &labels[k])?);
    }
    Ok(assemble_report(rng, s_points, labels, pairs))
}

/// Builds a report from externally produced laws, in order.
pub fn convergence_from_laws(
    seed: SeededRng,
    s_points: &[Complex64],
    labels: Vec<String>,
    laws: &[Vec<Vec<Complex64>>],
) -> Result<ConvergenceReport> {
    let mut pairs = Vec::new();
    for k in 1..laws.len() {
        pairs.extend(compare_laws(&laws[k - 1], &laws[k], s_points, &labels[k - 1], &labels[k])?);
    }
    Ok(assemble_report(seed, s_points, labels, pairs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessRow {
    pub n: usize,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub radius: f64,
    pub rows: Vec<TightnessRow>,
    /// 99% quantile at the largest n over that at the smallest.
    pub ratio: f64,
    pub bounded: bool,
}

/// Grid points of a 32 × 32 lattice on [−r, r]² inside the closed disc.
pub fn disc_grid(r: f64) -> Vec<Complex64> {
    let m = TIGHTNESS_GRID;
    let mut pts = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let x = -r + 2.0 * r * i as f64 / (m - 1) as f64;
            let y = -r + 2.0 * r * j as f64 / (m - 1) as f64;
            if x * x + y * y <= r * r * (1.0 + 1e-12) {
                pts.push(Complex64::new(x, y));
            }
        }
    }
    pts
}

/// Quantiles of sup_{|s|≤r}|fₙ(s)| over replicas for each n.
pub fn tightness_probe(
    spec: &EnsembleSpec,
    n_list: &[usize],
    radius: f64,
    replicas: usize,
    rng: SeededRng,
) -> Result<TightnessReport> {
    if !(radius > 0.0) {
        return Err(Error::arg(format!("radius must be positive, got {radius}")));
    }
    if n_list.is_empty() || replicas == 0 {
        return Err(Error::arg("need at least one size and one replica"));
    }
    let grid = disc_grid(radius);
    let mut rows = Vec::new();
    for &n in n_list {
        let sp = spec.clone().with_n(n);
        let values = sample_function_values(&sp, &grid, replicas, rng.child(n as u64))?;
        let sups: Vec<f64> = values
            .iter()
            .map(|row| row.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .collect();
        rows.push(TightnessRow {
            n,
            q50: quantile(&sups, 0.5)?,
            q90: quantile(&sups, 0.9)?,
            q99: quantile(&sups, 0.99)?,
        });
    }
    let ratio = rows.last().expect("non-empty").q99 / rows[0].q99;
    Ok(TightnessReport {
        radius,
        rows,
        ratio,
        bounded: ratio < 2.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingHistogram {
    pub edges: Vec<f64>,
    /// Probability density per bin, normalized over all gaps.
    pub density: Vec<f64>,
    /// Fraction of normalized gaps beyond the last edge.
    pub tail: f64,
    pub gaps: usize,
}

impl SpacingHistogram {
    /// L¹ distance between the binned law and a reference density, including the tail.
    pub fn l1_distance<F: Fn(f64) -> f64>(&self, pdf: F) -> f64 {
        let mut total = 0.0;
        let mut covered = 0.0;
        for (k, &d) in self.density.iter().enumerate() {
            let (a, b) = (self.edges[k], self.edges[k + 1]);
            let p = integrate(&pdf, a, b, 1e-12, 1e-10).value;
            covered += p;
            total += (d * (b - a) - p).abs();
        }
        total + (self.tail - (1.0 - covered)).abs()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right,density\n");
        for (k, d) in self.density.iter().enumerate() {
            let _ = writeln!(out, "{:.6},{:.6},{:.10e}", self.edges[k], self.edges[k + 1], d);
        }
        out
    }
}

/// Nearest-neighbour gaps inside [−window, window], rescaled to unit mean and
/// binned on [0, 4].
pub fn spacing_histogram(samples: &[PointConfiguration], window: f64) -> Result<SpacingHistogram> {
    if samples.len() < MIN_REPLICAS {
        return Err(Error::Estimation(format!(
            "need at least {MIN_REPLICAS} samples, got {}",
            samples.len()
        )));
    }
    let mut gaps = Vec::new();
    for cfg in samples {
        let w = cfg.restrict(-window, window);
        gaps.extend(w.points().windows(2).map(|p| p[1] - p[0]));
    }
    if gaps.len() < 2 {
        return Err(Error::Estimation(format!("only {} gaps in the window", gaps.len())));
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let width = SPACING_MAX / SPACING_BINS as f64;
    let mut counts = vec![0usize; SPACING_BINS];
    let mut tail = 0usize;
    for g in &gaps {
        let u = g / mean;
        if u >= SPACING_MAX {
            tail += 1;
        } else {
            counts[(u / width) as usize] += 1;
        }
    }
    let total = gaps.len() as f64;
    Ok(SpacingHistogram {
        edges: (0..=SPACING_BINS).map(|k| k as f64 * width).collect(),
        density: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
        tail: tail as f64 / total,
        gaps: gaps.len(),
    })
}

/// Wigner surmise for β = 2, (32/π²)s² e^{−4s²/π}.
pub fn wigner_surmise_gue(s: f64) -> f64 {
    32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub schema_version: u32,
    pub seed: SeededRng,
    pub spec: EnsembleSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counting: Option<CountingStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prop_crit: Option<PropCritFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tightness: Option<TightnessReport>,
}

impl DiagnosticsReport {
    pub fn new(seed: SeededRng, spec: EnsembleSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed,
            spec,
            counting: None,
            prop_crit: None,
            convergence: None,
            tightness: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Estimation(e.to_string()))
    }
}
