//! Zeta-zero tables, the counting main term N(u), rescaled windows around a
//! random height, and their comparison with the sine-kernel process.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{convergence_from_laws, ConvergenceReport};
use crate::holo::{Prefactor, ProductEvaluator};
use crate::kernels::SineDppSampler;
use crate::point_process::PointConfiguration;
use crate::rng::{replicate, SeededRng};
use crate::{Error, Result};

/// Smallest scale accepted by [`make_window`].
pub const MIN_T: f64 = 1000.0;
/// Window points closer than this to the origin trigger a shift of t.
pub const ORIGIN_TOL: f64 = 1e-9;
/// Tables whose first entry is below this are taken to start at the first zero.
const FIRST_ZERO_BOUND: f64 = 14.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
    source: Option<PathBuf>,
}

impl ZeroTable {
    pub fn new(ordinates: Vec<f64>) -> Result<Self> {
        if ordinates.is_empty() {
            return Err(Error::Range("zero table is empty".into()));
        }
        for (i, w) in ordinates.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::Parse {
                    line: i + 2,
                    reason: format!("ordinates not ascending: {} then {}", w[0], w[1]),
                });
            }
        }
        if ordinates[0] <= 0.0 {
            return Err(Error::Parse {
                line: 1,
                reason: "ordinates must be positive".into(),
            });
        }
        Ok(Self {
            ordinates,
            source: None,
        })
    }

    /// Parses one ordinate per line; blank lines and lines starting with '#' are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ordinates = Vec::new();
        let mut prev: Option<f64> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| Error::Parse { line: i + 1, reason };
            let x: f64 = line.parse().map_err(|_| bad(format!("not a number: {line:?}")))?;
            if !(x.is_finite() && x > 0.0) {
                return Err(bad(format!("ordinate {x} is not positive")));
            }
            if prev.is_some_and(|p| x <= p) {
                return Err(bad(format!("ordinate {x} does not exceed the previous one")));
            }
            prev = Some(x);
            ordinates.push(x);
        }
        if ordinates.is_empty() {
            return Err(Error::Parse {
                line: 0,
                reason: "no ordinates found".into(),
            });
        }
        Ok(Self {
            ordinates,
            source: None,
        })
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn count(&self) -> usize {
        self.ordinates.len()
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn starts_at_first_zero(&self) -> bool {
        self.ordinates[0] < FIRST_ZERO_BOUND
    }

    /// Shortest round-trip decimal form, one ordinate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for x in &self.ordinates {
            let _ = writeln!(out, "{x}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub fn ingest_zeros(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    let mut table = ZeroTable::parse(&text)?;
    table.source = Some(path.to_path_buf());
    Ok(table)
}

/// (u/2π)·log(u/(2πe)), with 0·log 0 = 0.
pub fn counting_main_term(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    u / (2.0 * PI) * (u / (2.0 * PI * std::f64::consts::E)).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaWindow {
    pub t: f64,
    pub big_t: f64,
    pub log_scale: f64,
    pub cap: f64,
    pub points: PointConfiguration,
}

/// Ordinate range the table must cover for a window at height t with the given cap.
pub fn required_coverage(t: f64, big_t: f64, cap: f64) -> (f64, f64) {
    let half = 2.0 * PI * cap / big_t.ln();
    (t - half, t + half)
}

/// Rescaled zeros {(γ − t)·log T/(2π)} with |·| ≤ log²T.
pub fn make_window(table: &ZeroTable, t: f64, big_t: f64) -> Result<ZetaWindow> {
    let cap = big_t.ln().powi(2);
    make_window_capped(table, t, big_t, cap)
}

/// As [`make_window`] with an explicit cap instead of log²T.
pub fn make_window_capped(table: &ZeroTable, t: f64, big_t: f64, cap: f64) -> Result<ZetaWindow> {
    if !(big_t >= MIN_T) {
        return Err(Error::arg(format!("T must be at least {MIN_T}, got {big_t}")));
    }
    let log_t = big_t.ln();
    if !(t >= big_t / log_t && t <= big_t) {
        return Err(Error::arg(format!(
            "t={t} outside [T/log T, T] = [{}, {big_t}]",
            big_t / log_t
        )));
    }
    if !(cap > 0.0) {
        return Err(Error::arg(format!("cap must be positive, got {cap}")));
    }
    let (lo, hi) = required_coverage(t, big_t, cap);
    let ords = &table.ordinates;
    let low_ok = table.starts_at_first_zero() || ords[0] <= lo;
    if !low_ok || *ords.last().expect("non-empty") < hi {
        return Err(Error::Range(format!(
            "zero table covers [{}, {}] but the window needs [{lo}, {hi}]",
            ords[0],
            ords.last().expect("non-empty")
        )));
    }
    let scale = log_t / (2.0 * PI);
    let points: Vec<f64> = ords
        .iter()
        .map(|g| (g - t) * scale)
        .filter(|x| x.abs() <= cap)
        .collect();
    Ok(ZetaWindow {
        t,
        big_t,
        log_scale: log_t,
        cap,
        points: PointConfiguration::new(points)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaRatio {
    pub value: Complex64,
    /// Amount added to t to move window points off the origin.
    pub t_shift: f64,
}

/// e^{iπs}∏(1 − s/γ) over the window points; t is shifted minimally if a point
/// sits within 1e-9 of the origin.
pub fn empirical_zeta_ratio(window: &ZetaWindow, s: Complex64) -> Result<ZetaRatio> {
    if window.points.is_empty() {
        return Err(Error::Range("window contains no zeros".into()));
    }
    let nearest = window
        .points
        .points()
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("non-empty");
    let (points, t_shift) = if nearest.abs() < ORIGIN_TOL {
        let margin = ORIGIN_TOL * (1.0 + 1e-6);
        let d = [nearest - margin, nearest + margin]
            .into_iter()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .expect("two candidates");
        let shifted: Vec<f64> = window.points.points().iter().map(|p| p - d).collect();
        (PointConfiguration::new(shifted)?, d * 2.0 * PI / window.log_scale)
    } else {
        (window.points.clone(), 0.0)
    };
    let ev = ProductEvaluator::new(points, None, Prefactor::ExpIPiS, &[window.cap])?;
    Ok(ZetaRatio {
        value: ev.eval_truncated(s, f64::INFINITY),
        t_shift,
    })
}

/// Tunables for [`compare_to_sine_kernel`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZetaCompareOptions {
    /// Truncation used on both sides; defaults to log²T.
    pub cap: Option<f64>,
    /// Sine-kernel replicas; defaults to the number of windows.
    pub dpp_replicas: Option<usize>,
    /// Discretization grid of the sine-kernel sampler; defaults to max(64, 64·cap).
    pub dpp_grid: Option<usize>,
}

/// KS distances between the law of the empirical zeta ratio over random heights
/// t ∈ [T/log T, T] and the law of e^{iπs}∏(1 − s/x) over sine-kernel samples.
pub fn compare_to_sine_kernel(
    table: &ZeroTable,
    big_t: f64,
    num_windows: usize,
    s_points: &[Complex64],
    rng: SeededRng,
    options: &ZetaCompareOptions,
) -> Result<ConvergenceReport> {
    if num_windows < 2 {
        return Err(Error::arg("need at least two windows"));
    }
    let log_t = big_t.ln();
    let cap = options.cap.unwrap_or(log_t * log_t);
    let (_, hi) = required_coverage(big_t, big_t, cap);
    if *table.ordinates.last().expect("non-empty") < hi {
        return Err(Error::Range(format!(
            "heights up to T={big_t} need zeros up to {hi}, table ends at {}",
            table.ordinates.last().expect("non-empty")
        )));
    }
    let t_lo = big_t / log_t;
    let zeta_values = replicate(rng.child(1), num_windows, |g, _| {
        let t = t_lo + (big_t - t_lo) * g.random::<f64>();
        let w = make_window_capped(table, t, big_t, cap)?;
        s_points
            .iter()
            .map(|&s| empirical_zeta_ratio(&w, s).map(|r| r.value))
            .collect::<Result<Vec<_>>>()
    })?;
    let dpp = SineDppSampler::new(cap, options.dpp_grid.unwrap_or(SineDppSampler::default_grid(cap)))?;
    let dpp_values = replicate(rng.child(2), options.dpp_replicas.unwrap_or(num_windows), |g, _| {
        let pts = dpp.sample(g)?;
        let ev = ProductEvaluator::new(pts, None, Prefactor::ExpIPiS, &[cap])?;
        Ok(s_points.iter().map(|&s| ev.eval_truncated(s, f64::INFINITY)).collect::<Vec<_>>())
    })?;
    convergence_from_laws(
        rng,
        s_points,
        vec![format!("zeta T={big_t}"), "sine-kernel".to_string()],
        &[zeta_values, dpp_values],
    )
}
