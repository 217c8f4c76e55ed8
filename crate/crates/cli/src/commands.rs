//! One function per subcommand. Each returns the bytes to write and, where the
//! command has one, a pass/fail verdict.

use std::fmt::Write as _;

use serde::Serialize;
use stozeta_core::diagnostics::{
    self, counting_stats, fit_prop_crit, marginal_convergence, ConvergenceReport, DiagnosticsReport,
};
use stozeta_core::ensembles::{EnsembleKind, EnsembleSampler, EnsembleSpec, Scaling};
use stozeta_core::holo::{Prefactor, ProductEvaluator, DEFAULT_REL_TOL, DEFAULT_SCHEDULE};
use stozeta_core::kernels::{estimate_correlations, CorrelationBins, CorrelationKernel, MIN_SAMPLES};
use stozeta_core::rng::{replicate, SeededRng};
use stozeta_core::zeta::{self, ZetaCompareOptions};
use stozeta_core::Complex64;

use crate::complex::format_complex;
use crate::config::{Command, ExperimentConfig, Format};
use crate::CliError;

/// Final KS bound for `converge --assert`.
pub const CONVERGE_KS_BOUND: f64 = 0.05;
/// Final KS bound for `zeta-compare --assert`.
pub const ZETA_KS_BOUND: f64 = 0.1;

pub struct Outcome {
    pub bytes: Vec<u8>,
    pub verdict: Option<(bool, String)>,
}

impl Outcome {
    fn plain(text: String) -> Self {
        Self {
            bytes: text.into_bytes(),
            verdict: None,
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime("io", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn format_or(cfg: &ExperimentConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn rng(cfg: &ExperimentConfig) -> SeededRng {
    SeededRng::new(cfg.seed.unwrap_or(0))
}

fn min_replicas(r: usize, min: usize) -> Result<usize, CliError> {
    if r < min {
        return Err(CliError::config(format!("need at least {min} replicas, got {r}")));
    }
    Ok(r)
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::config(format!(
                "config file is for {c:?} but {command:?} was invoked"
            )));
        }
    }
    match command {
        Command::Sample => sample(cfg),
        Command::Evaluate => evaluate(cfg),
        Command::Converge => converge(cfg),
        Command::Propcrit => propcrit(cfg),
        Command::Kernels => kernels(cfg),
        Command::ZetaCompare => zeta_compare(cfg),
    }
}

#[derive(Serialize)]
struct SampleReport<'a> {
    schema_version: u32,
    seed: SeededRng,
    spec: &'a EnsembleSpec,
    configurations: Vec<Vec<f64>>,
}

fn sample(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.ensemble()?;
    let replicas = cfg.replicas(1)?;
    let sampler = EnsembleSampler::new(&spec)?;
    let seed = rng(cfg);
    let samples = replicate(seed, replicas, |g, _| sampler.sample(g))?;
    let text = match format_or(cfg, Format::Csv) {
        Format::Csv => {
            let mut out = String::from("replica,x\n");
            for (k, c) in samples.iter().enumerate() {
                for x in c.points() {
                    let _ = writeln!(out, "{k},{x:.16e}");
                }
            }
            out
        }
        Format::Json => json(&SampleReport {
            schema_version: diagnostics::SCHEMA_VERSION,
            seed,
            spec: &spec,
            configurations: samples.into_iter().map(|c| c.into_points()).collect(),
        })?,
    };
    Ok(Outcome::plain(text))
}

#[derive(Serialize)]
struct EvaluateRow {
    replica: usize,
    s: Complex64,
    value: Complex64,
    a_used: f64,
    converged: bool,
}

#[derive(Serialize)]
struct EvaluateReport<'a> {
    schema_version: u32,
    seed: SeededRng,
    spec: &'a EnsembleSpec,
    schedule: &'a [f64],
    rel_tol: f64,
    prefactor: Prefactor,
    values: Vec<EvaluateRow>,
}

fn evaluate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.ensemble()?;
    let replicas = cfg.replicas(1)?;
    let s_points = cfg.s_points(&["0+1i"])?;
    let schedule = cfg.schedule.clone().unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
    let rel_tol = cfg.rel_tol.unwrap_or(DEFAULT_REL_TOL);
    if !(rel_tol > 0.0) {
        return Err(CliError::config(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let prefactor: Prefactor = cfg.prefactor.map(Into::into).unwrap_or_default();
    let sampler = EnsembleSampler::new(&spec)?;
    let m0 = spec.default_compensator();
    let seed = rng(cfg);
    let rows = replicate(seed, replicas, |g, _| {
        let pts = sampler.sample(g)?;
        let ev = ProductEvaluator::new(pts, Some(m0), prefactor, &schedule)?;
        s_points.iter().map(|&s| ev.eval_limit(s, rel_tol)).collect::<stozeta_core::Result<Vec<_>>>()
    })?;
    let values: Vec<EvaluateRow> = rows
        .into_iter()
        .enumerate()
        .flat_map(|(replica, vs)| {
            vs.into_iter().map(move |v| EvaluateRow {
                replica,
                s: v.at,
                value: v.value,
                a_used: v.a_used,
                converged: v.converged,
            })
        })
        .collect();
    let all = values.iter().all(|v| v.converged);
    let unconverged = values.iter().filter(|v| !v.converged).count();
    let text = match format_or(cfg, Format::Csv) {
        Format::Csv => {
            let mut out = String::from("replica,s,re,im,a_used,converged\n");
            for v in &values {
                let _ = writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{},{}",
                    v.replica,
                    format_complex(v.s),
                    v.value.re,
                    v.value.im,
                    v.a_used,
                    v.converged
                );
            }
            out
        }
        Format::Json => json(&EvaluateReport {
            schema_version: diagnostics::SCHEMA_VERSION,
            seed,
            spec: &spec,
            schedule: &schedule,
            rel_tol,
            prefactor,
            values,
        })?,
    };
    Ok(Outcome {
        bytes: text.into_bytes(),
        verdict: Some((all, format!("{unconverged} evaluations did not converge"))),
    })
}

fn convergence_csv(r: &ConvergenceReport) -> String {
    let mut out = String::from("label_a,label_b,s,ks_modulus,ks_argument,threshold,replicas_a,replicas_b\n");
    for p in &r.pairs {
        let _ = writeln!(
            out,
            "{},{},{},{:.10e},{:.10e},{:.10e},{},{}",
            p.label_a,
            p.label_b,
            format_complex(p.s),
            p.ks_modulus,
            p.ks_argument,
            p.threshold,
            p.replicas_a,
            p.replicas_b
        );
    }
    out
}

fn converge(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.ensemble()?;
    let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![spec.n, 2 * spec.n, 4 * spec.n]);
    let s_points = cfg.s_points(&["0+1i"])?;
    let replicas = min_replicas(cfg.replicas(2000)?, 2)?;
    let report = marginal_convergence(&spec, &n_list, &s_points, replicas, rng(cfg))?;
    let pass = report.decreasing && report.final_max_ks < CONVERGE_KS_BOUND;
    let why = format!(
        "decreasing={} final_max_ks={:.4} (bound {CONVERGE_KS_BOUND})",
        report.decreasing, report.final_max_ks
    );
    let text = match format_or(cfg, Format::Json) {
        Format::Csv => convergence_csv(&report),
        Format::Json => json(&report)?,
    };
    Ok(Outcome {
        bytes: text.into_bytes(),
        verdict: Some((pass, why)),
    })
}

fn propcrit(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.ensemble()?;
    let max = cfg.grid.max.unwrap_or(50.0);
    let step = cfg.grid.step.unwrap_or(1.0);
    if !(max > 0.0 && step > 0.0 && max.is_finite()) {
        return Err(CliError::config("grid max and step must be positive"));
    }
    let k = (max / step).floor() as i64;
    if k < 2 {
        return Err(CliError::config("grid needs at least two steps on each side"));
    }
    let grid: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    let replicas = min_replicas(cfg.replicas(2000)?, diagnostics::MIN_REPLICAS)?;
    let seed = rng(cfg);
    let stats = counting_stats(&spec, &grid, replicas, seed)?;
    let fit = fit_prop_crit(&stats, &spec.default_compensator())?;
    let pass = fit.pass;
    let why = format!("alpha={:.4} nu={:.4} origin_band_empty={}", fit.alpha, fit.nu, fit.origin_band_empty);
    let text = match format_or(cfg, Format::Json) {
        Format::Csv => stats.to_csv(),
        Format::Json => {
            let mut report = DiagnosticsReport::new(seed, spec);
            report.counting = Some(stats);
            report.prop_crit = Some(fit);
            json(&report)?
        }
    };
    Ok(Outcome {
        bytes: text.into_bytes(),
        verdict: Some((pass, why)),
    })
}

/// Kernel of the limiting determinantal process, when there is one.
fn theory_kernel(spec: &EnsembleSpec) -> Option<CorrelationKernel> {
    let two = spec.beta == 2.0;
    match (spec.kind, spec.scaling) {
        (EnsembleKind::CBetaE, _) | (EnsembleKind::SineBetaApprox, _) if two => Some(CorrelationKernel::Sine),
        (EnsembleKind::GBetaE, Scaling::Bulk { .. }) if two => Some(CorrelationKernel::Sine),
        (EnsembleKind::SineKernelDPP, _) => Some(CorrelationKernel::Sine),
        _ => None,
    }
}

fn kernels(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.ensemble()?;
    let replicas = min_replicas(cfg.replicas(1000)?, MIN_SAMPLES)?;
    let c = &cfg.correlation;
    let r = c.r.unwrap_or(2);
    if r != 1 && r != 2 {
        return Err(CliError::config(format!("correlation order must be 1 or 2, got {r}")));
    }
    let default_window = spec.window_a.unwrap_or(10.0);
    let bins = CorrelationBins {
        window: c.window.unwrap_or(default_window),
        width: c.width.unwrap_or(0.05),
        max_separation: c.max_separation.unwrap_or(3.0),
    };
    let sampler = EnsembleSampler::new(&spec)?;
    let samples = replicate(rng(cfg), replicas, |g, _| sampler.sample(g))?;
    let mut est = estimate_correlations(&samples, r, &bins)?;
    if let Some(k) = theory_kernel(&spec) {
        est = est.with_theory(&k)?;
    }
    let text = match format_or(cfg, Format::Csv) {
        Format::Csv => est.to_csv(),
        Format::Json => json(&est)?,
    };
    Ok(Outcome::plain(text))
}

/// Largest T whose windows stay inside a table ending at `last`.
fn default_t_max(last: f64, cap: Option<f64>) -> f64 {
    let mut t = last;
    for _ in 0..50 {
        let lt = t.ln();
        let half = 2.0 * std::f64::consts::PI * cap.unwrap_or(lt * lt) / lt;
        t = last - half;
    }
    t
}

fn zeta_compare(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let z = &cfg.zeta;
    let path = z
        .zeros
        .as_ref()
        .ok_or_else(|| CliError::config("a zeros file is required (--zeros)"))?;
    let table = zeta::ingest_zeros(path)?;
    let last = *table.ordinates().last().expect("non-empty table");
    let t_max = z.t_max.unwrap_or_else(|| default_t_max(last, z.cap));
    if !(t_max >= zeta::MIN_T) {
        return Err(CliError::config(format!(
            "T={t_max} is below {}; supply a longer zeros table",
            zeta::MIN_T
        )));
    }
    let windows = z.windows.unwrap_or(2000);
    if windows < 2 {
        return Err(CliError::config("need at least two windows"));
    }
    let s_points = cfg.s_points(&["0+1i"])?;
    let opts = ZetaCompareOptions {
        cap: z.cap,
        dpp_replicas: z.dpp_replicas,
        dpp_grid: z.dpp_grid,
    };
    let report = zeta::compare_to_sine_kernel(&table, t_max, windows, &s_points, rng(cfg), &opts)?;
    let pass = report.final_max_ks < ZETA_KS_BOUND;
    let why = format!("final_max_ks={:.4} (bound {ZETA_KS_BOUND})", report.final_max_ks);
    let text = match format_or(cfg, Format::Json) {
        Format::Csv => convergence_csv(&report),
        Format::Json => json(&report)?,
    };
    Ok(Outcome {
        bytes: text.into_bytes(),
        verdict: Some((pass, why)),
    })
}
