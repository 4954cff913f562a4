//! Staircase path integration of `𝒟F`.
//!
//! A path is cut into `N` chords at uniform parameter spacing. On chord `n`
//! the increment `δ = xₙ − xₙ₋₁` is split into its slice-parallel and
//! slice-perpendicular parts and `𝒟F` is applied at the evaluation point.
//! Summing the chords approximates `F(x_b) − F(x_a)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differential::differential;
use crate::error::{Error, Result};
use crate::function::{eval_function, AnalyticFunction, NamedKind};
use crate::path::Path;
use crate::quaternion::{CompensatedSum, Quaternion};
use crate::slice::{UnitImaginary, EPS_AXIS};
use crate::stats::convergence_order;

/// Segments summed per work unit. Fixed so that results do not depend on
/// the thread count.
const CHUNK: usize = 1024;

/// Parameter step for the finite differences in [`Integrator::slice_quadrature`].
const FD_STEP: f64 = 1e-5;

/// Errors at or below this count as exact in a convergence study.
pub const EXACT_ERROR: f64 = 1e-12;

/// Where on each chord `𝒟F` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Start of the chord, `xₙ₋₁`.
    #[default]
    Left,
    /// Chord midpoint `(xₙ₋₁ + xₙ)/2`.
    Midpoint,
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Rule::Left),
            "midpoint" | "mid" => Ok(Rule::Midpoint),
            other => Err(Error::Invalid(format!("unknown rule `{other}` (left|midpoint)"))),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Left => "left",
            Rule::Midpoint => "midpoint",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub steps: usize,
    pub value: Quaternion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationReport {
    pub steps: usize,
    pub value: Quaternion,
    /// Closed form `F(x_b) − F(x_a)`, when it can be evaluated.
    pub reference: Option<Quaternion>,
    pub abs_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<StudyRow>,
    /// Observed convergence order (negated log-log slope).
    pub est_order: Option<f64>,
    /// Set by a convergence study when every error is at rounding level.
    #[serde(default)]
    pub exact: bool,
}

impl IntegrationReport {
    fn single(steps: usize, value: Quaternion, reference: Option<Quaternion>) -> Self {
        Self {
            steps,
            value,
            reference,
            abs_error: reference.map(|r| (value - r).norm()),
            rows: Vec::new(),
            est_order: None,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Integrator {
    pub rule: Rule,
    /// Worker threads for segment evaluation; `1` runs inline.
    pub threads: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rule: Rule::Left,
            threads: 1,
        }
    }
}

impl Integrator {
    pub fn new(rule: Rule) -> Self {
        Self { rule, threads: 1 }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    /// `Σₙ 𝒟F(x_eval)[xₙ − xₙ₋₁]` over `steps` chords.
    pub fn integrate(&self, f: &AnalyticFunction, path: &Path, steps: usize) -> Result<IntegrationReport> {
        check_steps(steps)?;
        let nodes = path.nodes(steps);
        let n_steps = steps as f64;
        let value = self.sum_indexed(steps, |n| {
            let (x0, x1) = (nodes[n], nodes[n + 1]);
            let (xe, s) = match self.rule {
                Rule::Left => (x0, n as f64 / n_steps),
                Rule::Midpoint => ((x0 + x1).scale(0.5), (n as f64 + 0.5) / n_steps),
            };
            check_axis(f, xe)
                .and_then(|_| differential(f, xe, x1 - x0))
                .map_err(|e| e.at(s))
        })?;
        Ok(IntegrationReport::single(steps, value, closed_form(f, path)))
    }

    /// Trapezoidal quadrature of `dF(x(s))/ds` over `s ∈ [0, 1]`, with the
    /// derivative taken by finite differences of `F` along the path.
    ///
    /// Shares no code with the chord construction beyond evaluating `F`, so
    /// it serves as an independent check on [`Integrator::integrate`].
    pub fn slice_quadrature(
        &self,
        f: &AnalyticFunction,
        path: &Path,
        steps: usize,
    ) -> Result<IntegrationReport> {
        check_steps(steps)?;
        let n_steps = steps as f64;
        let value = self.sum_indexed(steps + 1, |n| {
            let s = n as f64 / n_steps;
            let weight = if n == 0 || n == steps { 0.5 } else { 1.0 } / n_steps;
            check_axis(f, path.point(s))
                .and_then(|_| ds_derivative(f, path, s))
                .map(|g| g.scale(weight))
                .map_err(|e| e.at(s))
        })?;
        Ok(IntegrationReport::single(steps, value, closed_form(f, path)))
    }

    /// Runs [`Integrator::integrate`] for each step count and fits the
    /// convergence order against the closed form.
    pub fn convergence_study(
        &self,
        f: &AnalyticFunction,
        path: &Path,
        step_counts: &[usize],
    ) -> Result<IntegrationReport> {
        if step_counts.len() < 3 {
            return Err(Error::Invalid("a convergence study needs at least three step counts".into()));
        }
        if step_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("step counts must be strictly ascending".into()));
        }
        let reference = closed_form(f, path)
            .ok_or_else(|| Error::MissingReference(format!("{f} at the endpoints of the path")))?;
        let rows = step_counts
            .iter()
            .map(|&n| {
                let value = self.integrate(f, path, n)?.value;
                Ok(StudyRow {
                    steps: n,
                    value,
                    abs_error: Some((value - reference).norm()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(summarize(rows, reference))
    }

    /// Applies `term` to `0..count` and sums in fixed-size chunks.
    fn sum_indexed<T>(&self, count: usize, term: T) -> Result<Quaternion>
    where
        T: Fn(usize) -> Result<Quaternion> + Sync,
    {
        let chunk_sum = |c: usize| -> Result<CompensatedSum> {
            let mut acc = CompensatedSum::new();
            for n in c * CHUNK..((c + 1) * CHUNK).min(count) {
                acc.add(term(n)?);
            }
            Ok(acc)
        };
        let chunks = count.div_ceil(CHUNK);
        let partials: Vec<Result<CompensatedSum>> = if self.threads > 1 && chunks > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build()
                .map_err(|e| Error::Invalid(format!("cannot start worker threads: {e}")))?;
            pool.install(|| (0..chunks).into_par_iter().map(chunk_sum).collect())
        } else {
            (0..chunks).map(chunk_sum).collect()
        };
        let mut total = CompensatedSum::new();
        for p in partials {
            total.merge(&p?);
        }
        Ok(total.value())
    }
}

fn summarize(rows: Vec<StudyRow>, reference: Quaternion) -> IntegrationReport {
    let errors: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.steps as f64, r.abs_error.unwrap_or(f64::NAN)))
        .collect();
    let exact = errors.iter().all(|&(_, e)| e <= EXACT_ERROR);
    let fit: Vec<(f64, f64)> = errors.iter().copied().filter(|&(_, e)| e > 0.0).collect();
    let est_order = (!exact && fit.len() >= 2).then(|| convergence_order(&fit));
    let last = rows.last().expect("at least three rows");
    IntegrationReport {
        steps: last.steps,
        value: last.value,
        reference: Some(reference),
        abs_error: last.abs_error,
        est_order,
        exact,
        rows,
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::Invalid("steps must be at least 1".into()));
    }
    Ok(())
}

/// Only entire functions may be evaluated on the real axis, via the limit form.
fn check_axis(f: &AnalyticFunction, x: Quaternion) -> Result<()> {
    let r = x.imag_norm();
    if r <= EPS_AXIS && !f.is_entire() {
        return Err(Error::DegenerateSlice { r });
    }
    Ok(())
}

/// `F(x_b) − F(x_a)` when both endpoint values exist.
pub fn closed_form(f: &AnalyticFunction, path: &Path) -> Option<Quaternion> {
    let a = eval_function(f, path.start()).ok()?;
    let b = eval_function(f, path.end()).ok()?;
    Some(b - a)
}

/// Second-order finite difference of `s ↦ F(x(s))`, one-sided at the ends.
fn ds_derivative(f: &AnalyticFunction, path: &Path, s: f64) -> Result<Quaternion> {
    let h = FD_STEP;
    let at = |t: f64| eval_function(f, path.point(t));
    if s - h < 0.0 {
        let d = at(s)?.scale(-3.0) + at(s + h)?.scale(4.0) - at(s + 2.0 * h)?;
        Ok(d.scale(0.5 / h))
    } else if s + h > 1.0 {
        let d = at(s)?.scale(3.0) - at(s - h)?.scale(4.0) + at(s - 2.0 * h)?;
        Ok(d.scale(0.5 / h))
    } else {
        Ok((at(s + h)? - at(s - h)?).scale(0.5 / h))
    }
}

/// Integrates `𝒟 ln` along a path that stays in one slice, following the
/// logarithm continuously instead of using its principal branch.
///
/// Inside the slice of `u` every point is `z = ξ₀ + i·ρ` with signed `ρ`.
/// The argument of `z` is unwrapped step by step; a closed loop that winds
/// `m` times around the origin yields `2π·m·u`.
pub fn integrate_with_branch_tracking(
    f: &AnalyticFunction,
    path: &Path,
    steps: usize,
) -> Result<IntegrationReport> {
    let scale = match f {
        AnalyticFunction::Named {
            kind: NamedKind::Ln,
            scale,
        } => *scale,
        other => {
            return Err(Error::Unsupported(format!(
                "branch tracking is implemented for ln only, got {other}"
            )))
        }
    };
    check_steps(steps)?;
    let nodes = path.nodes(steps);
    let u = path
        .slice_unit()
        .or_else(|| nodes.iter().find_map(|x| UnitImaginary::new(*x).ok()))
        .unwrap_or(UnitImaginary::I);
    let uq = u.get();
    let n_steps = steps as f64;

    let to_complex = |n: usize| -> Result<Complex64> {
        let x = nodes[n];
        let s = n as f64 / n_steps;
        let rho = x.imag().dot(uq);
        let off_slice = (x.imag() - uq.scale(rho)).norm();
        if off_slice > 1e-9 * x.norm().max(1.0) {
            return Err(Error::SliceEscape { s });
        }
        let z = Complex64::new(x.w, rho);
        if z.norm() == 0.0 {
            return Err(Error::domain("ln is singular at 0").at(s));
        }
        Ok(z)
    };

    let z0 = to_complex(0)?;
    let mut prev = z0;
    let mut winding_angle = 0.0;
    for n in 1..=steps {
        let z = to_complex(n)?;
        let dphi = (z / prev).arg();
        if dphi.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::StepTooCoarse {
                s: n as f64 / n_steps,
                dphi,
            });
        }
        winding_angle += dphi;
        prev = z;
    }
    let log_modulus = prev.norm().ln() - z0.norm().ln();
    let value = (Quaternion::real(log_modulus) + uq.scale(winding_angle)).scale(scale);
    Ok(IntegrationReport::single(steps, value, None))
}

/// Left-rule staircase integral with a single thread.
pub fn integrate(f: &AnalyticFunction, path: &Path, steps: usize, rule: Rule) -> Result<IntegrationReport> {
    Integrator::new(rule).integrate(f, path, steps)
}

pub fn integrate_slice_quadrature(f: &AnalyticFunction, path: &Path, steps: usize) -> Result<IntegrationReport> {
    Integrator::default().slice_quadrature(f, path, steps)
}

pub fn convergence_study(
    f: &AnalyticFunction,
    path: &Path,
    step_counts: &[usize],
    rule: Rule,
) -> Result<IntegrationReport> {
    Integrator::new(rule).convergence_study(f, path, step_counts)
}
