//! Sampled point configurations on the real line, their signed counting
//! function, and the maps that carry circle or spectrum samples onto the line.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Points closer than this are treated as a repeated point.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// A finite simple point configuration, stored in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    points: Vec<f64>,
    origin_excluded: bool,
}

/// Signed count M(x): #[0,x] for x ≥ 0 and −#(x,0) for x < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedCount(pub i64);

impl SignedCount {
    pub fn value(self) -> i64 {
        self.0
    }
}

impl PointConfiguration {
    /// Sorts the input and rejects non-finite values and near-duplicates.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::arg(format!("non-finite point {bad}")));
        }
        points.sort_by(f64::total_cmp);
        if let Some(w) = points.windows(2).find(|w| w[1] - w[0] < DUPLICATE_TOL) {
            return Err(Error::arg(format!(
                "configuration is not simple: points {} and {} coincide within {DUPLICATE_TOL}",
                w[0], w[1]
            )));
        }
        let origin_excluded = !points.iter().any(|x| x.abs() < DUPLICATE_TOL);
        Ok(Self {
            points,
            origin_excluded,
        })
    }

    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            origin_excluded: true,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn into_points(self) -> Vec<f64> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn origin_excluded(&self) -> bool {
        self.origin_excluded
    }

    fn below(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p < x)
    }

    fn at_most(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p <= x)
    }

    pub fn counting(&self, x: f64) -> SignedCount {
        let zero = self.below(0.0);
        if x >= 0.0 {
            SignedCount((self.at_most(x) - zero) as i64)
        } else {
            SignedCount(-((zero - self.at_most(x)) as i64))
        }
    }

    pub fn interval_count(&self, a: f64, b: f64, closed_left: bool, closed_right: bool) -> Result<usize> {
        if a > b || a.is_nan() || b.is_nan() {
            return Err(Error::arg(format!("interval bounds out of order: a={a}, b={b}")));
        }
        let lo = if closed_left { self.below(a) } else { self.at_most(a) };
        let hi = if closed_right { self.at_most(b) } else { self.below(b) };
        Ok(hi.saturating_sub(lo))
    }

    /// Points inside the closed window [a, b].
    pub fn restrict(&self, a: f64, b: f64) -> PointConfiguration {
        let lo = self.below(a);
        let hi = self.at_most(b).max(lo);
        let points = self.points[lo..hi].to_vec();
        let origin_excluded = !points.iter().any(|x| x.abs() < DUPLICATE_TOL);
        PointConfiguration {
            points,
            origin_excluded,
        }
    }

    /// Distance from the nearest point to `x`, or infinity when empty.
    pub fn distance_to(&self, x: f64) -> f64 {
        let i = self.below(x);
        let mut d = f64::INFINITY;
        if i < self.points.len() {
            d = d.min(self.points[i] - x);
        }
        if i > 0 {
            d = d.min(x - self.points[i - 1]);
        }
        d
    }

    /// One coordinate per line with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 24);
        for p in &self.points {
            let _ = writeln!(out, "{p:.16e}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let x: f64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                reason: format!("not a number: {line:?}"),
            })?;
            points.push(x);
        }
        Self::new(points)
    }
}

/// Eigenangles on the unit circle with the unfolding scale `n`.
///
/// `n` is normally the number of angles; it exceeds it when a deterministic
/// eigenvalue has been removed from the spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleConfiguration {
    angles: Vec<f64>,
    n: usize,
}

/// Reduces an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t == -PI {
        t = PI;
    }
    t
}

impl CircleConfiguration {
    pub fn new(angles: Vec<f64>, n: usize) -> Result<Self> {
        if angles.len() > n {
            return Err(Error::arg(format!(
                "{} angles exceed the ensemble size {n}",
                angles.len()
            )));
        }
        if let Some(bad) = angles.iter().find(|t| !(t.is_finite() && **t > -PI && **t <= PI)) {
            return Err(Error::arg(format!("angle {bad} outside (-pi, pi]")));
        }
        Ok(Self { angles, n })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

pub fn unfold_circle(circle: &CircleConfiguration) -> Result<PointConfiguration> {
    let scale = circle.n as f64 / (2.0 * PI);
    let mut points = Vec::with_capacity(circle.angles.len());
    for &t in &circle.angles {
        if t == 0.0 {
            return Err(Error::Domain(
                "eigenangle 0 present; remove the point at 1 before unfolding".into(),
            ));
        }
        points.push(scale * t);
    }
    PointConfiguration::new(points)
}

pub fn rescale_bulk(lambdas: &[f64], n: usize, e: f64) -> Result<PointConfiguration> {
    if !(e.abs() < 2.0) {
        return Err(Error::arg(format!("bulk energy E={e} must lie in (-2, 2)")));
    }
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let nf = n as f64;
    let center = e * nf.sqrt();
    let scale = (nf * (4.0 - e * e)).sqrt() / (2.0 * PI);
    PointConfiguration::new(lambdas.iter().map(|l| (l - center) * scale).collect())
}

pub fn rescale_edge(lambdas: &[f64], n: usize) -> Result<PointConfiguration> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let nf = n as f64;
    let edge = 2.0 * nf.sqrt();
    let scale = nf.powf(1.0 / 6.0) / (2.0 * PI);
    PointConfiguration::new(lambdas.iter().map(|l| (l - edge) * scale).collect())
}

/// Translates of `cfg` by multiples of `period` that fall in [−a, a].
pub fn periodic_extension(cfg: &PointConfiguration, period: f64, a: f64) -> Result<PointConfiguration> {
    if !(period > 0.0) {
        return Err(Error::arg(format!("period must be positive, got {period}")));
    }
    let k_max = (a / period).ceil() as i64 + 1;
    let mut points = Vec::new();
    for k in -k_max..=k_max {
        let shift = k as f64 * period;
        points.extend(cfg.points.iter().map(|p| p + shift).filter(|x| x.abs() <= a));
    }
    PointConfiguration::new(points)
}
