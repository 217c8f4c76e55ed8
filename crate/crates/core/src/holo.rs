//! Compensated truncated products, their Weierstrass form, logarithmic
//! derivatives, ratio statistics and argument-principle zero counting.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compensators::CompensatorMeasure;
use crate::point_process::{CircleConfiguration, PointConfiguration};
use crate::rng::splitmix64;
use crate::{Error, Result};

/// Default truncation schedule.
pub const DEFAULT_SCHEDULE: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];
/// Default relative tolerance for [`ProductEvaluator::eval_limit`].
pub const DEFAULT_REL_TOL: f64 = 0.02;
/// Schedule entries are kept at least this far from every point.
pub const COLLISION_TOL: f64 = 1e-9;

const MIN_CONTOUR_POINTS: usize = 256;
const MAX_CONTOUR_POINTS: usize = 1 << 20;
const WINDING_RESIDUAL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    #[default]
    None,
    /// Multiplies by e^{iπs}.
    ExpIPiS,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloValue {
    pub value: Complex64,
    pub at: Complex64,
    pub a_used: f64,
    pub converged: bool,
}

/// Offset in (0, 0.1) derived from the bits of `a`.
pub fn hash_offset(a: f64) -> f64 {
    let u = (splitmix64(a.to_bits()) >> 11) as f64 / (1u64 << 53) as f64;
    0.1 * (u * 0.98 + 0.01)
}

#[derive(Clone, Debug)]
pub struct ProductEvaluator {
    config: PointConfiguration,
    compensator: Option<CompensatorMeasure>,
    prefactor: Prefactor,
    schedule: Vec<f64>,
    pv_cache: Vec<f64>,
}

impl ProductEvaluator {
    /// Builds an evaluator. Schedule entries are shifted by [`hash_offset`] and
    /// nudged further if they still sit on a point.
    pub fn new(
        config: PointConfiguration,
        compensator: Option<CompensatorMeasure>,
        prefactor: Prefactor,
        schedule: &[f64],
    ) -> Result<Self> {
        if !config.origin_excluded() {
            return Err(Error::arg("configuration has a point at the origin"));
        }
        if schedule.is_empty() {
            return Err(Error::arg("truncation schedule is empty"));
        }
        if schedule.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::arg("schedule entries must be positive and finite"));
        }
        if schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("schedule must be strictly increasing"));
        }
        let schedule: Vec<f64> = schedule
            .iter()
            .map(|&a| {
                let mut shifted = a + hash_offset(a);
                while config.distance_to(shifted) < COLLISION_TOL || config.distance_to(-shifted) < COLLISION_TOL {
                    shifted += 1e-6;
                }
                shifted
            })
            .collect();
        let pv_cache = schedule
            .iter()
            .map(|&a| compensator.map_or(0.0, |m| m.pv_integral(a)))
            .collect();
        Ok(Self {
            config,
            compensator,
            prefactor,
            schedule,
            pv_cache,
        })
    }

    /// Plain product ∏(1 − s/ρ) with the default schedule.
    pub fn pure(config: PointConfiguration) -> Result<Self> {
        Self::new(config, None, Prefactor::None, &DEFAULT_SCHEDULE)
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn compensator(&self) -> Option<&CompensatorMeasure> {
        self.compensator.as_ref()
    }

    pub fn prefactor(&self) -> Prefactor {
        self.prefactor
    }

    /// The shifted schedule actually used.
    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn last_a(&self) -> f64 {
        *self.schedule.last().expect("non-empty schedule")
    }

    fn pv(&self, a: f64) -> f64 {
        if let Some(i) = self.schedule.iter().position(|&b| b == a) {
            return self.pv_cache[i];
        }
        self.compensator.map_or(0.0, |m| m.pv_integral(a))
    }

    fn prefactor_log(&self, s: Complex64) -> Complex64 {
        match self.prefactor {
            Prefactor::None => Complex64::new(0.0, 0.0),
            Prefactor::ExpIPiS => Complex64::new(0.0, PI) * s,
        }
    }

    /// Logarithm of the truncated product, or `None` when s is one of its zeros.
    pub fn log_truncated(&self, s: Complex64, a: f64) -> Option<Complex64> {
        let mut acc = s * self.pv(a) + self.prefactor_log(s);
        for &rho in self.config.restrict(-a, a).points() {
            let factor = Complex64::new(1.0, 0.0) - s / rho;
            if factor == Complex64::new(0.0, 0.0) {
                return None;
            }
            acc += factor.ln();
        }
        Some(acc)
    }

    /// exp(s∫_{[−A,A]} dM₀/ρ) ∏_{|ρ|≤A}(1 − s/ρ), times e^{iπs} if requested.
    pub fn eval_truncated(&self, s: Complex64, a: f64) -> Complex64 {
        self.log_truncated(s, a).map_or(Complex64::new(0.0, 0.0), |l| l.exp())
    }

    /// Evaluates along the schedule; converged when the last two relative
    /// increments are below `rel_tol`.
    pub fn eval_limit(&self, s: Complex64, rel_tol: f64) -> Result<HoloValue> {
        if self.schedule.len() < 3 {
            return Err(Error::arg("eval_limit needs a schedule of at least 3 entries"));
        }
        let values: Vec<Complex64> = self.schedule.iter().map(|&a| self.eval_truncated(s, a)).collect();
        let k = values.len();
        let close = |i: usize| {
            let d = (values[i] - values[i - 1]).norm();
            d == 0.0 || d < rel_tol * values[i].norm()
        };
        Ok(HoloValue {
            value: values[k - 1],
            at: s,
            a_used: self.schedule[k - 1],
            converged: close(k - 1) && close(k - 2),
        })
    }

    /// Σ_{|ρ|≤A} 1/(s − ρ) + ∫_{[−A,A]} dM₀/ρ, plus iπ with the e^{iπs} prefactor.
    pub fn log_derivative(&self, s: Complex64, a: f64) -> Result<Complex64> {
        if s.im == 0.0 {
            return Err(Error::Domain(format!("log-derivative needs non-real s, got {s}")));
        }
        let mut acc = Complex64::new(self.pv(a), 0.0);
        if self.prefactor == Prefactor::ExpIPiS {
            acc += Complex64::new(0.0, PI);
        }
        for &rho in self.config.restrict(-a, a).points() {
            acc += (s - rho).inv();
        }
        Ok(acc)
    }

    /// ∏ f(sⱼ) / ∏ f(tⱼ) at truncation A, accumulated in log space.
    pub fn ratio_statistic(&self, s_list: &[Complex64], t_list: &[Complex64], a: f64) -> Result<Complex64> {
        if let Some(t) = t_list.iter().find(|t| t.im == 0.0) {
            return Err(Error::Domain(format!("denominator point {t} is real")));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &t in t_list {
            acc -= self.log_truncated(t, a).expect("non-real points are never zeros");
        }
        for &s in s_list {
            match self.log_truncated(s, a) {
                Some(l) => acc += l,
                None => return Ok(Complex64::new(0.0, 0.0)),
            }
        }
        Ok(acc.exp())
    }

    /// `Re s,Im s,Re f,Im f,A_used,converged` rows for a grid of points.
    pub fn grid_csv(&self, points: &[Complex64], rel_tol: f64) -> Result<String> {
        let mut out = String::from("re_s,im_s,re_f,im_f,A_used,converged\n");
        for &s in points {
            let v = self.eval_limit(s, rel_tol)?;
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                s.re, s.im, v.value.re, v.value.im, v.a_used, v.converged
            );
        }
        Ok(out)
    }
}

/// Weierstrass product ∏(1 − s/ρ)e^{s/ρ} over the points of [−A, A] times
/// exp(s∫_{[−A,A]}(M₀(x) − M_X(x))/x² dx).
pub fn eval_weierstrass(
    config: &PointConfiguration,
    m0: &CompensatorMeasure,
    s: Complex64,
    a_max: f64,
) -> Result<Complex64> {
    if !config.origin_excluded() {
        return Err(Error::arg("configuration has a point at the origin"));
    }
    let window = config.restrict(-a_max, a_max);
    let pts = window.points();
    let one = Complex64::new(1.0, 0.0);
    let mut log = Complex64::new(0.0, 0.0);
    for &rho in pts {
        let factor = one - s / rho;
        if factor == Complex64::new(0.0, 0.0) {
            return Ok(factor);
        }
        log += factor.ln() + s / rho;
    }
    // M_X is piecewise constant: on each step segment [a, b] with value c the
    // integral of c/x² is c(1/a − 1/b).
    let split = pts.partition_point(|&p| p < 0.0);
    let (neg, pos) = pts.split_at(split);
    let mut mx = 0.0;
    for (k, &start) in pos.iter().enumerate() {
        let end = pos.get(k + 1).copied().unwrap_or(a_max);
        mx += (k + 1) as f64 * (1.0 / start - 1.0 / end);
    }
    for (k, &end) in neg.iter().rev().enumerate() {
        let start = neg.len().checked_sub(k + 2).map_or(-a_max, |i| neg[i]);
        mx += -((k + 1) as f64) * (1.0 / start - 1.0 / end);
    }
    log += s * (m0.cumulative_over_square(a_max) - mx);
    Ok(log.exp())
}

/// Winding number of `f` around the rectangle [x0, x1] × [y0, y1], from the
/// trapezoidal rule applied to f′/f with a central-difference derivative.
/// The node count starts at `m` and doubles until the result is within 0.1 of an integer.
pub fn count_zeros_rect<F: Fn(Complex64) -> Complex64>(f: F, rect: (f64, f64, f64, f64), m: usize) -> Result<i64> {
    let (x0, x1, y0, y1) = rect;
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::arg(format!("degenerate rectangle {rect:?}")));
    }
    if m < MIN_CONTOUR_POINTS {
        return Err(Error::arg(format!("need at least {MIN_CONTOUR_POINTS} contour points, got {m}")));
    }
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let perimeter = 2.0 * ((x1 - x0) + (y1 - y0));
    let mut m = m;
    let mut last = f64::NAN;
    while m <= MAX_CONTOUR_POINTS {
        let spacing = perimeter / m as f64;
        let h = perimeter / (10.0 * m as f64);
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            let len = (b - a).norm();
            let steps = ((len / spacing).round() as usize).max(1);
            let dir = (b - a) / len;
            let dz = (b - a) / steps as f64;
            for j in 0..=steps {
                let z = a + dz * j as f64;
                let fz = f(z);
                if fz == Complex64::new(0.0, 0.0) || !fz.is_finite() {
                    return Err(Error::Contour(format!("f vanishes or is not finite on the contour at {z}")));
                }
                let df = (f(z + dir * h) - f(z - dir * h)) / (2.0 * h) * dir.conj();
                let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
                total += df / fz * dz * w;
            }
        }
        let winding = total.im / (2.0 * PI);
        last = winding;
        if (winding - winding.round()).abs() <= WINDING_RESIDUAL {
            return Ok(winding.round() as i64);
        }
        m *= 2;
    }
    Err(Error::Contour(format!(
        "winding estimate {last} not within {WINDING_RESIDUAL} of an integer at {MAX_CONTOUR_POINTS} nodes"
    )))
}

/// ξₙ(s) = Zₙ(e^{2iπs/n})/Zₙ(1) with Zₙ(z) = ∏(1 − z e^{−iθⱼ}), computed from the angles.
pub fn xi_circle(circle: &CircleConfiguration, s: Complex64) -> Result<Complex64> {
    let n = circle.n() as f64;
    let one = Complex64::new(1.0, 0.0);
    let z = (Complex64::new(0.0, 2.0 * PI / n) * s).exp();
    let mut log = Complex64::new(0.0, 0.0);
    for &t in circle.angles() {
        let rot = Complex64::from_polar(1.0, -t);
        let den = one - rot;
        if den.norm() == 0.0 {
            return Err(Error::Domain("angle 0 makes the normalization vanish".into()));
        }
        let num = one - z * rot;
        if num == Complex64::new(0.0, 0.0) {
            return Ok(num);
        }
        log += num.ln() - den.ln();
    }
    Ok(log.exp())
}

/// The same ratio written as e^{iπs}∏ sin(π(xⱼ − s)/n)/sin(πxⱼ/n) over unfolded points.
pub fn xi_circle_sine_form(unfolded: &[f64], n: usize, s: Complex64) -> Complex64 {
    let nf = n as f64;
    let mut log = Complex64::new(0.0, PI) * s;
    for &x in unfolded {
        let num = (Complex64::new(x, 0.0) - s) * (PI / nf);
        let num = num.sin();
        if num == Complex64::new(0.0, 0.0) {
            return num;
        }
        log += num.ln() - Complex64::new((PI * x / nf).sin(), 0.0).ln();
    }
    log.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::sample_cbeta;
    use crate::point_process::{periodic_extension, unfold_circle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(v: &[f64]) -> PointConfiguration {
        PointConfiguration::new(v.to_vec()).unwrap()
    }

    #[test]
    fn truncated_examples() {
        let ev = ProductEvaluator::pure(cfg(&[1.0, -1.0])).unwrap();
        assert!((ev.eval_truncated(c(2.0, 0.0), 2.0) - c(-3.0, 0.0)).norm() < 1e-14);
        assert_eq!(ev.eval_truncated(c(0.0, 0.0), 5.0), c(1.0, 0.0));
        let ev = ProductEvaluator::pure(cfg(&[2.5])).unwrap();
        assert_eq!(ev.eval_truncated(c(2.5, 0.0), 5.0), c(0.0, 0.0));
        assert!(ProductEvaluator::pure(cfg(&[0.0])).is_err());
    }

    #[test]
    fn schedule_validation_and_shift() {
        let base = cfg(&[10.05, -3.0]);
        assert!(ProductEvaluator::new(base.clone(), None, Prefactor::None, &[10.0, 5.0]).is_err());
        assert!(ProductEvaluator::new(base.clone(), None, Prefactor::None, &[]).is_err());
        let ev = ProductEvaluator::new(base, None, Prefactor::None, &[10.0, 20.0, 40.0]).unwrap();
        for (a, b) in ev.schedule().iter().zip([10.0, 20.0, 40.0]) {
            assert!(*a > b && *a < b + 0.1 + 1e-3);
            assert!(ev.config().distance_to(*a) >= COLLISION_TOL);
        }
    }

    #[test]
    fn limit_of_stationary_sequence() {
        let ev = ProductEvaluator::new(
            cfg(&[-2.0, 1.5, 3.0]),
            Some(CompensatorMeasure::lebesgue()),
            Prefactor::None,
            &[5.0, 10.0, 20.0],
        )
        .unwrap();
        let v = ev.eval_limit(c(0.5, 1.0), 1e-12).unwrap();
        assert!(v.converged);
        let direct = (c(1.0, 0.0) - c(0.5, 1.0) / -2.0) * (c(1.0, 0.0) - c(0.5, 1.0) / 1.5) * (c(1.0, 0.0) - c(0.5, 1.0) / 3.0);
        assert!((v.value - direct).norm() < 1e-13);
        let zero = ev.eval_limit(c(0.0, 0.0), 1e-12).unwrap();
        assert!(zero.converged && zero.value == c(1.0, 0.0));
        let short = ProductEvaluator::new(cfg(&[1.0]), None, Prefactor::None, &[5.0, 10.0]).unwrap();
        assert!(short.eval_limit(c(0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn log_derivative_examples() {
        let ev = ProductEvaluator::pure(cfg(&[1.7])).unwrap();
        let s = c(0.3, 0.8);
        assert!((ev.log_derivative(s, 5.0).unwrap() - (s - 1.7).inv()).norm() < 1e-15);
        assert!(matches!(ev.log_derivative(c(0.5, 0.0), 5.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<f64> = (0..40).map(|_| rng.random_range(-30.0..30.0)).collect();
        let ev = ProductEvaluator::new(
            cfg(&pts),
            Some(CompensatorMeasure::new(crate::compensators::CompensatorKind::EdgeLimit)),
            Prefactor::ExpIPiS,
            &DEFAULT_SCHEDULE,
        )
        .unwrap();
        let (s, h, a) = (c(0.0, 2.0), 1e-5, 25.0);
        let fd = (ev.log_truncated(s + h, a).unwrap() - ev.log_truncated(s - h, a).unwrap()) / (2.0 * h);
        let ld = ev.log_derivative(s, a).unwrap();
        assert!((fd - ld).norm() / ld.norm() < 1e-6);
    }

    #[test]
    fn ratio_examples() {
        let ev = ProductEvaluator::pure(cfg(&[-1.2, 0.7, 2.2])).unwrap();
        let s = [c(0.3, 1.0), c(-2.0, 0.5)];
        assert!((ev.ratio_statistic(&s, &s, 10.0).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let i = c(0.0, 1.0);
        let r = ev.ratio_statistic(&[c(0.0, 0.0)], &[i], 10.0).unwrap();
        assert!((r - ev.eval_truncated(i, 10.0).inv()).norm() < 1e-14);
        assert_eq!(ev.ratio_statistic(&[], &[], 10.0).unwrap(), c(1.0, 0.0));
        assert!(ev.ratio_statistic(&[i], &[c(1.0, 0.0)], 10.0).is_err());
    }

    #[test]
    fn symmetric_weierstrass_equals_truncated() {
        let pts = [-3.3, -1.4, 1.4, 3.3, -7.1, 7.1];
        let config = cfg(&pts);
        let ev = ProductEvaluator::new(config.clone(), Some(CompensatorMeasure::lebesgue()), Prefactor::None, &[20.0, 40.0, 80.0])
            .unwrap();
        for s in [c(0.4, 1.1), c(-2.0, -0.3), c(0.0, 0.0)] {
            let w = eval_weierstrass(&config, &CompensatorMeasure::lebesgue(), s, 20.0).unwrap();
            assert!((w - ev.eval_truncated(s, 20.0)).norm() < 1e-12 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn weierstrass_boundary_identity() {
        // Truncated and Weierstrass values differ exactly by exp(s·(N₋ − N₊ + M₀(A) + M₀(−A))/A).
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<f64> = (0..60).map(|_| rng.random_range(-40.0..40.0)).collect();
        let config = cfg(&pts);
        let a = 30.0;
        let s = c(0.7, 0.9);
        for kind in [
            crate::compensators::CompensatorKind::CircularLebesgue { cap: None },
            crate::compensators::CompensatorKind::EdgeLimit,
            crate::compensators::CompensatorKind::BulkSemicircle { n: 400, e: 0.5 },
        ] {
            let m0 = CompensatorMeasure::new(kind);
            let ev = ProductEvaluator::new(config.clone(), Some(m0), Prefactor::None, &[a]).unwrap();
            let t = ev.eval_truncated(s, a);
            let w = eval_weierstrass(&config, &m0, s, a).unwrap();
            let win = config.restrict(-a, a);
            let n_pos = win.points().iter().filter(|x| **x > 0.0).count() as f64;
            let n_neg = win.len() as f64 - n_pos;
            let delta = (n_pos - n_neg - m0.cumulative(a) - m0.cumulative(-a)) / a;
            let expect = t * (s * delta).exp();
            assert!((w - expect).norm() < 1e-9 * w.norm(), "{kind:?}: {w} vs {expect}");
        }
    }

    #[test]
    fn argument_principle_examples() {
        let ev = ProductEvaluator::pure(cfg(&[1.0, 2.0])).unwrap();
        let f = |s| ev.eval_truncated(s, 10.0);
        assert_eq!(count_zeros_rect(f, (0.5, 2.5, -1.0, 1.0), 256).unwrap(), 2);
        assert_eq!(count_zeros_rect(f, (2.5, 4.0, -1.0, 1.0), 256).unwrap(), 0);
        assert_eq!(count_zeros_rect(|_| c(1.0, 0.0), (0.0, 1.0, 0.0, 1.0), 256).unwrap(), 0);
        assert!(count_zeros_rect(f, (0.5, 2.5, -1.0, 1.0), 100).is_err());
    }

    #[test]
    fn conjugate_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<f64> = (0..30).map(|_| rng.random_range(-20.0..20.0)).collect();
        let plain = ProductEvaluator::new(cfg(&pts), Some(CompensatorMeasure::lebesgue()), Prefactor::None, &[25.0]).unwrap();
        let pref = ProductEvaluator::new(cfg(&pts), Some(CompensatorMeasure::lebesgue()), Prefactor::ExpIPiS, &[25.0]).unwrap();
        for _ in 0..20 {
            let s = c(rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0));
            let f = plain.eval_truncated(s, 25.0);
            assert!((plain.eval_truncated(s.conj(), 25.0) - f.conj()).norm() < 1e-10 * f.norm());
            let g = pref.eval_truncated(s, 25.0);
            let lhs = pref.eval_truncated(s.conj(), 25.0) * (c(0.0, -2.0 * PI) * s.conj()).exp();
            assert!((lhs - g.conj()).norm() < 1e-10 * g.norm());
        }
    }

    #[test]
    fn xi_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [5usize, 20, 50] {
            let circle = sample_cbeta(n, 2.0, &mut rng).unwrap();
            let x = unfold_circle(&circle).unwrap();
            for _ in 0..10 {
                let s = c(rng.random_range(-2.0..2.0), rng.random_range(-1.4..1.4));
                let a = xi_circle(&circle, s).unwrap();
                let b = xi_circle_sine_form(x.points(), n, s);
                assert!((a - b).norm() < 1e-10 * a.norm().max(1e-300), "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn xi_is_limit_over_periodic_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 20;
        let circle = sample_cbeta(n, 2.0, &mut rng).unwrap();
        let x = unfold_circle(&circle).unwrap();
        let s = c(0.6, 1.0);
        let exact = xi_circle(&circle, s).unwrap();
        let mut prev = f64::INFINITY;
        for a in [100.0, 400.0, 1600.0, 6400.0] {
            let ext = periodic_extension(&x, n as f64, a).unwrap();
            let ev = ProductEvaluator::new(ext, Some(CompensatorMeasure::lebesgue()), Prefactor::ExpIPiS, &[a]).unwrap();
            let a_used = ev.schedule()[0];
            let err = (ev.eval_truncated(s, a_used) - exact).norm() / exact.norm();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 5e-3, "{prev}");
    }

    #[test]
    fn grid_export() {
        let ev = ProductEvaluator::pure(cfg(&[1.0, -2.0])).unwrap();
        let csv = ev.grid_csv(&[c(0.0, 1.0), c(1.0, 1.0)], 0.02).unwrap();
        assert!(csv.starts_with("re_s,im_s,re_f,im_f,A_used,converged\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().ends_with(",true"));
    }
}
