//! Seeded samplers for circular, Gaussian and sine-kernel point processes.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::compensators::{CompensatorKind, CompensatorMeasure};
use crate::kernels::SineDppSampler;
use crate::linalg::tridiagonal_eigenvalues;
use crate::point_process::{
    rescale_bulk, rescale_edge, unfold_circle, wrap_angle, CircleConfiguration, PointConfiguration,
    DUPLICATE_TOL,
};
use crate::{Error, Result};

/// Resampling budget when a sample lands on the origin.
pub const MAX_RESAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    #[serde(rename = "iid-uniform", alias = "poisson")]
    IidUniform,
    #[serde(rename = "cbe", alias = "cue")]
    CBetaE,
    #[serde(rename = "so-n-times-u", alias = "son")]
    SONTimesU,
    #[serde(rename = "gbe", alias = "gue")]
    GBetaE,
    #[serde(rename = "sine-beta-approx")]
    SineBetaApprox,
    #[serde(rename = "sine-kernel-dpp", alias = "sine-dpp")]
    SineKernelDPP,
}

impl EnsembleKind {
    pub fn is_circular(self) -> bool {
        matches!(self, Self::IidUniform | Self::CBetaE | Self::SONTimesU)
    }

    pub fn is_sine(self) -> bool {
        matches!(self, Self::SineBetaApprox | Self::SineKernelDPP)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Scaling {
    #[default]
    CircleUnfold,
    Bulk {
        #[serde(rename = "E")]
        e: f64,
    },
    Edge,
}

fn default_beta() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub psi: f64,
    #[serde(default)]
    pub scaling: Scaling,
    #[serde(rename = "window_A", default, skip_serializing_if = "Option::is_none")]
    pub window_a: Option<f64>,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize) -> Self {
        let scaling = match kind {
            EnsembleKind::GBetaE => Scaling::Bulk { e: 0.0 },
            _ => Scaling::CircleUnfold,
        };
        Self {
            kind,
            n,
            beta: 2.0,
            psi: 0.0,
            scaling,
            window_a: None,
        }
    }

    pub fn cue(n: usize) -> Self {
        Self::new(EnsembleKind::CBetaE, n)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_psi(mut self, psi: f64) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn with_window(mut self, a: f64) -> Self {
        self.window_a = Some(a);
        self
    }

    /// Same spec at a different size.
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Configuration(m));
        if self.n == 0 {
            return cfg("n must be at least 1".into());
        }
        let uses_beta = matches!(
            self.kind,
            EnsembleKind::CBetaE | EnsembleKind::GBetaE | EnsembleKind::SineBetaApprox
        );
        if uses_beta && !(self.beta > 0.0 && self.beta.is_finite()) {
            return cfg(format!("beta must be positive, got {}", self.beta));
        }
        if self.kind == EnsembleKind::SONTimesU {
            if self.n < 2 {
                return cfg("so-n-times-u needs n >= 2".into());
            }
            if !(self.psi > -PI && self.psi <= PI) {
                return cfg(format!("psi must lie in (-pi, pi], got {}", self.psi));
            }
        }
        match (self.kind, self.scaling) {
            (EnsembleKind::GBetaE, Scaling::Bulk { e }) => {
                if !(e.abs() < 2.0) {
                    return cfg(format!("bulk energy E={e} must lie in (-2, 2)"));
                }
            }
            (EnsembleKind::GBetaE, Scaling::Edge) => {}
            (EnsembleKind::GBetaE, Scaling::CircleUnfold) => {
                return cfg("gbe needs bulk or edge scaling".into());
            }
            (_, Scaling::CircleUnfold) => {}
            (k, s) => return cfg(format!("scaling {s:?} is not available for {k:?}")),
        }
        if self.kind.is_sine() {
            match self.window_a {
                Some(a) if a > 0.0 && a.is_finite() => {}
                Some(a) => return cfg(format!("window A must be positive, got {a}")),
                None => return cfg("sine ensembles need a window A".into()),
            }
        }
        Ok(())
    }

    /// Compensator paired with this ensemble's scaling.
    pub fn default_compensator(&self) -> CompensatorMeasure {
        let kind = match (self.kind, self.scaling) {
            (EnsembleKind::GBetaE, Scaling::Bulk { e }) => CompensatorKind::BulkSemicircle { n: self.n, e },
            (EnsembleKind::GBetaE, Scaling::Edge) => CompensatorKind::EdgeFinite { n: self.n },
            (k, _) if k.is_sine() => CompensatorKind::BulkLimit,
            _ => CompensatorKind::CircularLebesgue { cap: None },
        };
        CompensatorMeasure::new(kind)
    }

    /// Size of the circular ensemble actually sampled for the windowed Sine_β approximation.
    pub fn sine_beta_size(&self) -> usize {
        let a = self.window_a.unwrap_or(0.0);
        self.n.max(100).max((20.0 * a).ceil() as usize)
    }
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    PI - 2.0 * PI * rng.random::<f64>()
}

pub fn sample_iid_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CircleConfiguration> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    let angles = (0..n).map(|_| uniform_angle(rng)).collect();
    CircleConfiguration::new(angles, n)
}

/// Verblunsky coefficients α₀..α_{n−1} of the CβE(n, β) CMV model.
pub fn verblunsky_coefficients<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Vec<Complex64> {
    let mut alphas = Vec::with_capacity(n);
    for k in 0..n.saturating_sub(1) {
        let b = beta * (n - k - 1) as f64 / 2.0;
        let u: f64 = rng.random();
        let r2 = 1.0 - (1.0 - u).powf(1.0 / b);
        alphas.push(Complex64::from_polar(r2.sqrt(), uniform_angle(rng)));
    }
    if n > 0 {
        alphas.push(Complex64::from_polar(1.0, uniform_angle(rng)));
    }
    alphas
}

/// Relative Prüfer phase g(θ) = ψ_{n−1}(θ) + arg α_{n−1} and its θ-derivative.
///
/// With b_k = e^{iψ_k} and w_k = 1 − α_k b_k, the recursion reads
/// b_{k+1} = e^{iθ} b_k w̄_k/w_k, so ψ_{n−1} = nθ − 2Σ arg w_k. Since Re w_k > 0
/// the sum of arguments is recovered from the running product ∏w_k by counting
/// its crossings of the negative real axis.
fn prufer_phase(alphas: &[Complex64], theta: f64) -> (f64, f64) {
    let (last, inner) = alphas.split_last().expect("at least one coefficient");
    let z = Complex64::from_polar(1.0, theta);
    let mut b = z;
    let mut dpsi = 1.0;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut turns = 0i64;
    for (k, &a) in inner.iter().enumerate() {
        let w = Complex64::new(1.0, 0.0) - a * b;
        let w2 = w.norm_sqr();
        dpsi = 1.0 + dpsi * (1.0 - a.norm_sqr()) / w2;
        let wc = w.conj();
        b = z * b * (wc * wc) / w2;
        let next = prod * w;
        if next.re < 0.0 && (next.im < 0.0) != (prod.im < 0.0) {
            turns += if next.im < 0.0 { 1 } else { -1 };
        }
        prod = next;
        if k % 16 == 15 {
            prod /= prod.norm();
            b /= b.norm();
        }
    }
    let arg_sum = prod.arg() + 2.0 * PI * turns as f64;
    (alphas.len() as f64 * theta - 2.0 * arg_sum + last.arg(), dpsi)
}

/// Eigenangles of the CMV matrix with the given coefficients, as the solutions in
/// (−π, π] of g(θ) ∈ 2πℤ. The phase g is strictly increasing with total gain 2πn.
pub fn cmv_eigenangles(alphas: &[Complex64]) -> Result<Vec<f64>> {
    let n = alphas.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let cells = 2 * n;
    let grid: Vec<f64> = (0..=cells)
        .map(|j| if j == cells { PI } else { -PI + 2.0 * PI * j as f64 / cells as f64 })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| prufer_phase(alphas, t).0).collect();
    let two_pi = 2.0 * PI;
    let first = (values[0] / two_pi).floor() as i64 + 1;
    let mut roots = Vec::with_capacity(n);
    let mut cell = 0;
    for m in first..first + n as i64 {
        let target = two_pi * m as f64;
        while cell < cells && values[cell + 1] < target {
            cell += 1;
        }
        if cell == cells {
            return Err(Error::Sampler {
                retries: 0,
                reason: format!("Prüfer phase gained less than 2πn; missing root {m}"),
            });
        }
        let (lo, hi) = (grid[cell].max(roots.last().copied().unwrap_or(-PI)), grid[cell + 1]);
        let (g0, g1) = (values[cell], values[cell + 1]);
        let guess = grid[cell] + (target - g0) / (g1 - g0) * (grid[cell + 1] - grid[cell]);
        roots.push(solve_phase(alphas, target, lo, hi, guess.clamp(lo, hi))?);
    }
    Ok(roots)
}

fn solve_phase(alphas: &[Complex64], target: f64, mut lo: f64, mut hi: f64, start: f64) -> Result<f64> {
    let mut x = start;
    for _ in 0..100 {
        let (g, dg) = prufer_phase(alphas, x);
        let f = g - target;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = f / dg;
        let newton = x - step;
        if step.abs() < 1e-11 && newton >= lo && newton <= hi {
            return Ok(newton);
        }
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 {
            return Ok(x);
        }
    }
    Err(Error::Sampler {
        retries: 0,
        reason: "eigenangle iteration did not converge".into(),
    })
}

pub fn sample_cbeta<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<CircleConfiguration> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if !(beta > 0.0) {
        return Err(Error::arg(format!("beta must be positive, got {beta}")));
    }
    let mut last_err = None;
    for attempt in 0..MAX_RESAMPLES {
        let alphas = verblunsky_coefficients(n, beta, rng);
        match cmv_eigenangles(&alphas) {
            Ok(roots) => {
                let angles = roots.into_iter().map(wrap_angle).collect();
                return CircleConfiguration::new(angles, n);
            }
            Err(Error::Sampler { reason, .. }) => last_err = Some((attempt, reason)),
            Err(e) => return Err(e),
        }
    }
    let (retries, reason) = last_err.expect("loop ran");
    Err(Error::Sampler {
        retries: retries + 1,
        reason,
    })
}

/// Haar-distributed element of SO(n) from the QR factorization of a Gaussian matrix.
pub fn haar_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Eigenangles of a Haar SO(n) matrix rotated by e^{iψ}. For odd n the
/// deterministic eigenvalue at e^{iψ} is removed, leaving n − 1 angles.
pub fn sample_son_times_u<R: Rng + ?Sized>(n: usize, psi: f64, rng: &mut R) -> Result<CircleConfiguration> {
    if n < 2 {
        return Err(Error::arg("SO(n) needs n >= 2"));
    }
    let q = haar_special_orthogonal(n, rng);
    let mut raw: Vec<f64> = q.complex_eigenvalues().iter().map(|z| z.arg()).collect();
    if raw.len() != n {
        return Err(Error::Sampler {
            retries: 0,
            reason: format!("orthogonal eigensolve returned {} values", raw.len()),
        });
    }
    if n % 2 == 1 {
        let fixed = raw
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .expect("n >= 2");
        raw.swap_remove(fixed);
    }
    let angles = raw.into_iter().map(|t| wrap_angle(t + psi)).collect();
    CircleConfiguration::new(angles, n)
}

/// Gaussian β-ensemble eigenvalues from the tridiagonal model, normalized so
/// the joint density is ∝ exp(−β Σλ²/4) ∏|λᵢ − λⱼ|^β.
pub fn sample_gbeta<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if !(beta > 0.0) {
        return Err(Error::arg(format!("beta must be positive, got {beta}")));
    }
    let sd = (2.0 / beta).sqrt();
    let diag: Vec<f64> = (0..n)
        .map(|_| sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
        .collect();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let k = beta * (n - i) as f64;
        let gamma = Gamma::new(k / 2.0, 1.0).map_err(|e| Error::arg(e.to_string()))?;
        off.push((2.0 * gamma.sample(rng)).sqrt() / beta.sqrt());
    }
    tridiagonal_eigenvalues(&diag, &off)
}

/// The underlying sample behind a point configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum RawSample {
    Circle(CircleConfiguration),
    Spectrum(Vec<f64>),
    Line,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub raw: RawSample,
    pub points: PointConfiguration,
}

/// A validated spec with any expensive setup done once and shared by replicas.
pub struct EnsembleSampler {
    spec: EnsembleSpec,
    dpp: Option<SineDppSampler>,
}

impl EnsembleSampler {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let dpp = if spec.kind == EnsembleKind::SineKernelDPP {
            let a = spec.window_a.expect("validated");
            Some(SineDppSampler::new(a, SineDppSampler::default_grid(a))?)
        } else {
            None
        };
        Ok(Self {
            spec: spec.clone(),
            dpp,
        })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Realization> {
        let s = &self.spec;
        let circle = |c: CircleConfiguration| -> Result<Realization> {
            let points = unfold_circle(&c)?;
            Ok(Realization {
                raw: RawSample::Circle(c),
                points,
            })
        };
        match s.kind {
            EnsembleKind::IidUniform => circle(sample_iid_uniform(s.n, rng)?),
            EnsembleKind::CBetaE => circle(sample_cbeta(s.n, s.beta, rng)?),
            EnsembleKind::SONTimesU => circle(sample_son_times_u(s.n, s.psi, rng)?),
            EnsembleKind::GBetaE => {
                let lambdas = sample_gbeta(s.n, s.beta, rng)?;
                let points = match s.scaling {
                    Scaling::Bulk { e } => rescale_bulk(&lambdas, s.n, e)?,
                    Scaling::Edge => rescale_edge(&lambdas, s.n)?,
                    Scaling::CircleUnfold => unreachable!("validated"),
                };
                Ok(Realization {
                    raw: RawSample::Spectrum(lambdas),
                    points,
                })
            }
            EnsembleKind::SineBetaApprox => {
                let a = s.window_a.expect("validated");
                let c = sample_cbeta(s.sine_beta_size(), s.beta, rng)?;
                let points = unfold_circle(&c)?.restrict(-a, a);
                Ok(Realization {
                    raw: RawSample::Circle(c),
                    points,
                })
            }
            EnsembleKind::SineKernelDPP => {
                let points = self.dpp.as_ref().expect("built in new").sample(rng)?;
                Ok(Realization {
                    raw: RawSample::Line,
                    points,
                })
            }
        }
    }

    /// Samples and scales, drawing again whenever a point lands on the origin.
    pub fn sample_realization<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Realization> {
        for _ in 0..MAX_RESAMPLES {
            match self.draw(rng) {
                Ok(r) if r.points.origin_excluded() => return Ok(r),
                Ok(_) => {}
                Err(Error::Domain(_)) | Err(Error::Argument(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Err(Error::Sampler {
            retries: MAX_RESAMPLES,
            reason: format!("every draw had a point within {DUPLICATE_TOL} of the origin or a repeated point"),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointConfiguration> {
        Ok(self.sample_realization(rng)?.points)
    }
}

pub fn sample_process<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<PointConfiguration> {
    EnsembleSampler::new(spec)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, OnlineMoments};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Dense CMV matrix C = L·M for the given coefficients.
    fn cmv_matrix(alphas: &[Complex64]) -> DMatrix<Complex64> {
        let n = alphas.len();
        let theta = |k: usize| {
            let a = alphas[k];
            let rho = Complex64::new((1.0 - a.norm_sqr()).max(0.0).sqrt(), 0.0);
            [[a.conj(), rho], [rho, -a]]
        };
        let block_diag = |start: usize| {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            if start == 1 {
                m[(0, 0)] = Complex64::new(1.0, 0.0);
            }
            let mut k = start;
            while k < n {
                if k + 1 < n {
                    let t = theta(k);
                    for i in 0..2 {
                        for j in 0..2 {
                            m[(k + i, k + j)] = t[i][j];
                        }
                    }
                } else {
                    m[(k, k)] = alphas[k].conj();
                }
                k += 2;
            }
            m
        };
        block_diag(0) * block_diag(1)
    }

    #[test]
    fn prufer_roots_match_dense_cmv_spectrum() {
        let mut r = rng(11);
        for &(n, beta) in &[(1usize, 2.0), (2, 2.0), (5, 1.0), (12, 2.0), (30, 4.0), (40, 0.5)] {
            let alphas = verblunsky_coefficients(n, beta, &mut r);
            let c = cmv_matrix(&alphas);
            let unitary_err = (&c * c.adjoint() - DMatrix::<Complex64>::identity(n, n)).norm();
            assert!(unitary_err < 1e-12);
            let (_, t) = c.schur().unpack();
            let mut dense: Vec<f64> = (0..n).map(|i| t[(i, i)].arg()).map(wrap_angle).collect();
            dense.sort_by(f64::total_cmp);
            let mut ours: Vec<f64> = cmv_eigenangles(&alphas).unwrap().into_iter().map(wrap_angle).collect();
            ours.sort_by(f64::total_cmp);
            assert_eq!(ours.len(), n);
            for (a, b) in ours.iter().zip(&dense) {
                let d = wrap_angle(a - b).abs();
                assert!(d < 1e-9, "n={n} beta={beta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(sample_iid_uniform(0, &mut rng(0)).is_err());
        assert!(sample_cbeta(0, 2.0, &mut rng(0)).is_err());
        assert!(sample_gbeta(0, 2.0, &mut rng(0)).is_err());
        assert!(sample_son_times_u(1, 0.0, &mut rng(0)).is_err());
    }

    #[test]
    fn determinism() {
        let a = sample_cbeta(64, 2.0, &mut rng(3)).unwrap();
        let b = sample_cbeta(64, 2.0, &mut rng(3)).unwrap();
        assert_eq!(a, b);
        let a = sample_son_times_u(9, 0.4, &mut rng(3)).unwrap();
        let b = sample_son_times_u(9, 0.4, &mut rng(3)).unwrap();
        assert_eq!(a, b);
        let a = sample_gbeta(30, 1.0, &mut rng(3)).unwrap();
        let b = sample_gbeta(30, 1.0, &mut rng(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iid_arc_count_is_binomial() {
        let n = 10_000;
        let c = sample_iid_uniform(n, &mut rng(5)).unwrap();
        let theta = 1.0;
        let count = c.angles().iter().filter(|t| **t > 0.2 && **t <= 0.2 + theta).count() as f64;
        let p = theta / (2.0 * PI);
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((count - n as f64 * p).abs() < 3.0 * sd);
    }

    #[test]
    fn one_point_cbeta_is_uniform() {
        let mut r = rng(8);
        let xs: Vec<f64> = (0..4000).map(|_| sample_cbeta(1, 2.0, &mut r).unwrap().angles()[0]).collect();
        let ks = ks_one_sample(&xs, |t| ((t + PI) / (2.0 * PI)).clamp(0.0, 1.0)).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn cue_arc_mean_matches_length() {
        let mut r = rng(9);
        let theta = 1.3;
        let m: OnlineMoments = (0..2000)
            .map(|_| {
                let c = sample_cbeta(50, 2.0, &mut r).unwrap();
                c.angles().iter().filter(|t| **t > -0.4 && **t <= -0.4 + theta).count() as f64
            })
            .collect();
        let expect = 50.0 * theta / (2.0 * PI);
        assert!((m.mean - expect).abs() < 4.0 * m.std_error(), "{} vs {expect}", m.mean);
        // Rigidity: far below the Poisson variance.
        assert!(m.variance() < 0.5 * expect);
    }

    #[test]
    fn so2_eigenvalues_are_conjugate_pair() {
        let c = sample_son_times_u(2, 0.0, &mut rng(4)).unwrap();
        let a = c.angles();
        assert_eq!(a.len(), 2);
        assert!((a[0] + a[1]).abs() < 1e-12);
        let psi = 0.7;
        let c = sample_son_times_u(2, psi, &mut rng(4)).unwrap();
        let a = c.angles();
        assert!((wrap_angle(a[0] - psi) + wrap_angle(a[1] - psi)).abs() < 1e-12);
    }

    #[test]
    fn odd_so_removes_fixed_point() {
        let c = sample_son_times_u(7, 0.5, &mut rng(2)).unwrap();
        assert_eq!(c.angles().len(), 6);
        assert_eq!(c.n(), 7);
        // The remaining angles pair up symmetrically about ψ.
        let mut rel: Vec<f64> = c.angles().iter().map(|t| wrap_angle(t - 0.5)).collect();
        rel.sort_by(f64::total_cmp);
        for i in 0..3 {
            assert!((rel[i] + rel[5 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn haar_so_is_orthogonal() {
        let q = haar_special_orthogonal(6, &mut rng(1));
        assert!((&q * q.transpose() - DMatrix::<f64>::identity(6, 6)).norm() < 1e-12);
        assert!((q.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gbeta_one_point_variance() {
        for beta in [1.0, 2.0, 4.0] {
            let mut r = rng(12);
            let m: OnlineMoments = (0..20_000).map(|_| sample_gbeta(1, beta, &mut r).unwrap()[0]).collect();
            let var = 2.0 / beta;
            // Standard error of a sample variance for Gaussian data is var·√(2/(N−1)).
            assert!((m.variance() - var).abs() < 4.0 * var * (2.0 / 20_000f64).sqrt());
            assert!(m.mean.abs() < 4.0 * m.std_error());
        }
    }

    #[test]
    fn gbeta_trace_is_centered() {
        let mut r = rng(13);
        let m: OnlineMoments = (0..2000)
            .map(|_| sample_gbeta(40, 2.0, &mut r).unwrap().iter().sum::<f64>())
            .collect();
        assert!(m.mean.abs() < 3.0 * m.std_error());
    }

    #[test]
    fn spec_validation_and_json() {
        let bad = EnsembleSpec::new(EnsembleKind::GBetaE, 10).with_scaling(Scaling::Bulk { e: 3.0 });
        assert!(matches!(bad.validate(), Err(Error::Configuration(_))));
        assert!(EnsembleSpec::new(EnsembleKind::SineKernelDPP, 1).validate().is_err());
        assert!(EnsembleSpec::cue(0).validate().is_err());
        assert!(EnsembleSpec::cue(5).with_scaling(Scaling::Edge).validate().is_err());

        let json = r#"{"kind":"gue","n":100,"beta":2,"scaling":{"type":"bulk","E":1.0}}"#;
        let s: EnsembleSpec = serde_json::from_str(json).unwrap();
        assert_eq!(s.kind, EnsembleKind::GBetaE);
        assert_eq!(s.scaling, Scaling::Bulk { e: 1.0 });
        let back: EnsembleSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<EnsembleSpec>(r#"{"kind":"cue","n":3,"bogus":1}"#).is_err());
    }

    #[test]
    fn sample_process_ranges() {
        let spec = EnsembleSpec::new(EnsembleKind::IidUniform, 10);
        let p = sample_process(&spec, &mut rng(1)).unwrap();
        assert_eq!(p.len(), 10);
        assert!(p.points().iter().all(|x| *x > -5.0 && *x <= 5.0));
        assert!(p.origin_excluded());

        let spec = EnsembleSpec::new(EnsembleKind::SineBetaApprox, 10).with_window(5.0);
        let p = sample_process(&spec, &mut rng(1)).unwrap();
        assert!(p.points().iter().all(|x| x.abs() <= 5.0));
        assert_eq!(spec.sine_beta_size(), 100);
    }

    #[test]
    fn gbe_bulk_mean_spacing_near_origin() {
        let spec = EnsembleSpec::new(EnsembleKind::GBetaE, 100).with_scaling(Scaling::Bulk { e: 0.0 });
        let sampler = EnsembleSampler::new(&spec).unwrap();
        let mut r = rng(21);
        let m: OnlineMoments = (0..300)
            .map(|_| sampler.sample(&mut r).unwrap().interval_count(-5.0, 5.0, true, true).unwrap() as f64)
            .collect();
        assert!((m.mean / 10.0 - 1.0).abs() < 0.05, "{}", m.mean);
    }
}
