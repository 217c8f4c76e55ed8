//! Deterministic compensator measures, their cumulative functions and
//! principal-value integrals ∫_{[−A,A]} dM₀(ρ)/ρ.
//!
//! Every density vanishes on [−1, 1], so the principal value never meets a pole.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::quad::integrate;
use crate::{Error, Result};

const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CompensatorKind {
    /// Lebesgue measure off [−1, 1], optionally restricted to [−cap, cap].
    CircularLebesgue { cap: Option<f64> },
    BulkSemicircle { n: usize, #[serde(rename = "E")] e: f64 },
    BulkLimit,
    EdgeFinite { n: usize },
    EdgeLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompensatorMeasure {
    kind: CompensatorKind,
}

fn sqrt_8pi() -> f64 {
    (8.0 * PI).sqrt()
}

impl CompensatorMeasure {
    pub fn new(kind: CompensatorKind) -> Self {
        Self { kind }
    }

    pub fn lebesgue() -> Self {
        Self::new(CompensatorKind::CircularLebesgue { cap: None })
    }

    pub fn kind(&self) -> CompensatorKind {
        self.kind
    }

    fn semicircle_scale(e: f64) -> f64 {
        1.0 / (4.0 - e * e).sqrt()
    }

    /// Closed support interval of the density in x, possibly unbounded.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            CompensatorKind::CircularLebesgue { cap } => {
                let c = cap.unwrap_or(f64::INFINITY);
                (-c, c)
            }
            CompensatorKind::BulkLimit => (f64::NEG_INFINITY, f64::INFINITY),
            CompensatorKind::BulkSemicircle { n, e } => {
                let k = n as f64 * (4.0 - e * e).sqrt() / (2.0 * PI);
                ((-2.0 - e) * k, (2.0 - e) * k)
            }
            CompensatorKind::EdgeFinite { n } => (-4.0 * (n as f64).powf(2.0 / 3.0) / (2.0 * PI), -1.0),
            CompensatorKind::EdgeLimit => (f64::NEG_INFINITY, -1.0),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        if x.abs() <= 1.0 {
            return 0.0;
        }
        match self.kind {
            CompensatorKind::CircularLebesgue { cap } => {
                if cap.is_some_and(|c| x.abs() > c) {
                    0.0
                } else {
                    1.0
                }
            }
            CompensatorKind::BulkLimit => 1.0,
            CompensatorKind::BulkSemicircle { n, e } => {
                let c = Self::semicircle_scale(e);
                let t = e + 2.0 * PI * x * c / n as f64;
                c * (4.0 - t * t).max(0.0).sqrt()
            }
            CompensatorKind::EdgeFinite { n } => {
                if x > 0.0 {
                    return 0.0;
                }
                let nf = n as f64;
                let t = 2.0 + 2.0 * PI * x * nf.powf(-2.0 / 3.0);
                nf.powf(1.0 / 3.0) * (4.0 - t * t).max(0.0).sqrt()
            }
            CompensatorKind::EdgeLimit => {
                if x > 0.0 {
                    0.0
                } else {
                    (-8.0 * PI * x).sqrt()
                }
            }
        }
    }

    /// Breakpoints of the density inside [lo, hi]: the ends, ±1 and the support ends.
    fn breaks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (s0, s1) = self.support();
        let mut b = vec![lo, hi];
        for p in [-1.0, 1.0, s0, s1] {
            if p > lo && p < hi {
                b.push(p);
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// ∫ₐᵇ density by adaptive quadrature over the bounded part of the support.
    fn quad_mass(&self, a: f64, b: f64) -> f64 {
        let (s0, s1) = self.support();
        let (lo, hi) = (a.max(s0), b.min(s1));
        if !(hi > lo) {
            return 0.0;
        }
        self.breaks(lo, hi)
            .windows(2)
            .map(|w| integrate(|x| self.density(x), w[0], w[1], QUAD_ABS, QUAD_REL).value)
            .sum()
    }

    fn has_closed_form(&self) -> bool {
        matches!(
            self.kind,
            CompensatorKind::CircularLebesgue { .. } | CompensatorKind::BulkLimit | CompensatorKind::EdgeLimit
        )
    }

    /// Signed cumulative M₀(x): mass of [0, x] for x ≥ 0, minus the mass of (x, 0) for x < 0.
    pub fn cumulative(&self, x: f64) -> f64 {
        match self.kind {
            CompensatorKind::CircularLebesgue { cap } => {
                let r = x.abs().min(cap.unwrap_or(f64::INFINITY));
                (r - 1.0).max(0.0).copysign(x)
            }
            CompensatorKind::BulkLimit => (x.abs() - 1.0).max(0.0).copysign(x),
            CompensatorKind::EdgeLimit => {
                if x >= -1.0 {
                    0.0
                } else {
                    -(2.0 / 3.0) * sqrt_8pi() * ((-x).powf(1.5) - 1.0)
                }
            }
            _ => self.cumulative_quadrature(x),
        }
    }

    /// Cumulative by quadrature regardless of kind, for cross-checks.
    pub fn cumulative_quadrature(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.quad_mass(0.0, x)
        } else {
            -self.quad_mass(x, 0.0)
        }
    }

    pub fn interval_measure(&self, a: f64, b: f64) -> Result<f64> {
        if a > b || a.is_nan() || b.is_nan() {
            return Err(Error::arg(format!("interval bounds out of order: a={a}, b={b}")));
        }
        if self.has_closed_form() {
            Ok((self.cumulative(b) - self.cumulative(a)).max(0.0))
        } else {
            Ok(self.quad_mass(a, b))
        }
    }

    /// ∫_{[−A,A]} density(ρ)/ρ dρ. Zero when A ≤ 1; `A = ∞` covers the whole support.
    pub fn pv_integral(&self, a: f64) -> f64 {
        if !(a > 1.0) {
            return 0.0;
        }
        match self.kind {
            CompensatorKind::CircularLebesgue { .. } | CompensatorKind::BulkLimit => 0.0,
            CompensatorKind::EdgeLimit => 4.0 * (2.0 * PI).sqrt() * (1.0 - a.sqrt()),
            _ => self.pv_integral_quadrature(a),
        }
    }

    /// The principal-value integral by quadrature of the odd part, for any kind.
    pub fn pv_integral_quadrature(&self, a: f64) -> f64 {
        if !(a > 1.0) {
            return 0.0;
        }
        let (s0, s1) = self.support();
        let hi = a.min(s0.abs().max(s1.abs()));
        if !hi.is_finite() {
            return f64::NAN;
        }
        if hi <= 1.0 {
            return 0.0;
        }
        let mut b = vec![1.0, hi];
        for p in [s0.abs(), s1.abs()] {
            if p > 1.0 && p < hi {
                b.push(p);
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b.windows(2)
            .map(|w| {
                integrate(
                    |x| (self.density(x) - self.density(-x)) / x,
                    w[0],
                    w[1],
                    QUAD_ABS,
                    QUAD_REL,
                )
                .value
            })
            .sum()
    }

    /// ∫_{[−A,A]} M₀(x)/x² dx, the compensator part of the Weierstrass exponent.
    pub fn cumulative_over_square(&self, a: f64) -> f64 {
        if !(a > 1.0) {
            return 0.0;
        }
        match self.kind {
            CompensatorKind::CircularLebesgue { .. } | CompensatorKind::BulkLimit => 0.0,
            CompensatorKind::EdgeLimit => -(2.0 / 3.0) * sqrt_8pi() * (2.0 * a.sqrt() + 1.0 / a - 3.0),
            _ => self.pv_integral(a) - (self.cumulative(a) + self.cumulative(-a)) / a,
        }
    }

    /// Density sampled on a grid as `x,density` CSV rows.
    pub fn density_csv(&self, xs: &[f64]) -> String {
        let mut out = String::from("x,density\n");
        for &x in xs {
            let _ = writeln!(out, "{x:.16e},{:.16e}", self.density(x));
        }
        out
    }
}
