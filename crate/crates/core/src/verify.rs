//! Numerical checks of the identities that follow from `∫𝒟F = F(x_b) − F(x_a)`.
//!
//! Each check returns a [`CheckReport`] with the measured residuals and the
//! tolerance it was judged against. All thresholds live in [`Tolerances`].

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::differential::{differential, sym_product_sum};
use crate::error::{Error, Result};
use crate::function::{antiderivative, eval_function, perp_quotient, AnalyticFunction, PowerSeries};
use crate::integrate::{integrate_with_branch_tracking, Integrator, Rule};
use crate::path::Path;
use crate::quaternion::{CompensatedSum, Quaternion};
use crate::slice::{decompose_delta, slice_point, UnitImaginary, EPS_AXIS};
use crate::stats::least_squares_slope;

/// Environment variable holding either one number (applied to every
/// tolerance) or a JSON object overriding individual fields.
pub const TOLERANCE_ENV: &str = "QINT_TOL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Final error of a forward check, relative to `max(1, |F(x_b) − F(x_a)|)`.
    pub ftc_forward: f64,
    pub ftc_inverse: f64,
    pub integration_by_parts: f64,
    pub antiderivative: f64,
    /// Staircase against slice quadrature.
    pub mutual_agreement: f64,
    pub path_independence: f64,
    pub closed_loop: f64,
    /// Per unit of `max(1, |m|)`.
    pub winding: f64,
    pub exact_identity: f64,
    /// Forward check for `F = x`.
    pub exact_zero: f64,
    pub min_order: f64,
    pub inverse_slope_band: f64,
    pub rule_upgrade_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ftc_forward: 1e-3,
            ftc_inverse: 1e-3,
            integration_by_parts: 2e-3,
            antiderivative: 1e-3,
            mutual_agreement: 2e-3,
            path_independence: 2e-3,
            closed_loop: 2e-3,
            winding: 1e-2,
            exact_identity: 1e-10,
            exact_zero: 1e-12,
            min_order: 0.9,
            inverse_slope_band: 0.3,
            rule_upgrade_margin: 0.5,
        }
    }
}

impl Tolerances {
    /// Every residual tolerance set to `tol`; order thresholds are untouched.
    pub fn uniform(tol: f64) -> Self {
        Self {
            ftc_forward: tol,
            ftc_inverse: tol,
            integration_by_parts: tol,
            antiderivative: tol,
            mutual_agreement: tol,
            path_independence: tol,
            closed_loop: tol,
            winding: tol,
            exact_identity: tol,
            exact_zero: tol,
            ..Self::default()
        }
    }

    pub fn parse_override(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Ok(t) = text.parse::<f64>() {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Invalid(format!("tolerance must be positive, got {t}")));
            }
            return Ok(Self::uniform(t));
        }
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad tolerance record: {e}")))
    }

    /// Defaults, overridden by `QINT_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(v) => Self::parse_override(&v),
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Outcome of one check; serializes to the report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub config: Value,
}

impl CheckReport {
    fn judged(check: impl Into<String>, residuals: Vec<f64>, tolerance: f64, config: Value) -> Self {
        let pass = residuals.iter().all(|r| r.is_finite() && *r <= tolerance);
        Self {
            check: check.into(),
            pass,
            residuals,
            tolerance,
            config,
        }
    }

    /// A check that could not run; reported as a failure.
    fn errored(check: impl Into<String>, err: &Error, config: Value) -> Self {
        let mut config = config;
        if let Value::Object(map) = &mut config {
            map.insert("error".into(), Value::String(err.to_string()));
        }
        Self {
            check: check.into(),
            pass: false,
            residuals: Vec::new(),
            tolerance: f64::NAN,
            config,
        }
    }
}

/// Step count and threading shared by every check in a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub tolerances: Tolerances,
    pub steps: usize,
    pub study_steps: Vec<usize>,
    pub threads: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            steps: 10_000,
            study_steps: vec![100, 1_000, 10_000],
            threads: 1,
        }
    }
}

impl VerifyConfig {
    fn integrator(&self, rule: Rule) -> Integrator {
        Integrator::new(rule).with_threads(self.threads)
    }
}

/// Forward direction: the staircase converges to `F(x_b) − F(x_a)`.
///
/// Passes when the error never increases over the study and the final error
/// is within `ftc_forward` relative to `max(1, |reference|)`. Identically
/// exact studies (errors at rounding level) pass outright.
pub fn verify_ftc_forward(
    f: &AnalyticFunction,
    path: &Path,
    step_counts: &[usize],
    cfg: &VerifyConfig,
) -> Result<CheckReport> {
    let study = cfg.integrator(Rule::Left).convergence_study(f, path, step_counts)?;
    let errors: Vec<f64> = study.rows.iter().filter_map(|r| r.abs_error).collect();
    let reference = study.reference.expect("study always has a reference");
    let tol = &cfg.tolerances;
    let scale = reference.norm().max(1.0);
    let (pass, tolerance) = if study.exact {
        (errors.iter().all(|e| *e <= tol.exact_zero), tol.exact_zero)
    } else {
        let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
        let last = *errors.last().expect("non-empty study");
        (monotone && last <= tol.ftc_forward * scale, tol.ftc_forward * scale)
    };
    Ok(CheckReport {
        check: format!("ftc_forward[{f}]"),
        pass,
        residuals: errors,
        tolerance,
        config: json!({
            "function": f,
            "path": path,
            "steps": step_counts,
            "rule": Rule::Left,
            "reference": reference,
            "value": study.value,
            "est_order": study.est_order,
            "exact": study.exact,
        }),
    })
}

/// Inverse direction: differentiating the integral function reproduces the
/// integrand.
///
/// `G(y) = ∫ 𝒟F` along the line from `base` to `y`. The increment is applied
/// in two legs, first `δ∥` and then `δ⊥`, and the summed change of `G` is
/// compared against `𝒟F(x)[δ]`.
pub fn verify_ftc_inverse(
    f: &AnalyticFunction,
    x: Quaternion,
    delta: Quaternion,
    base: Quaternion,
    cfg: &VerifyConfig,
) -> Result<CheckReport> {
    if delta.norm() > 1e-2 * (1.0 + 1e-12) {
        return Err(Error::Invalid(format!(
            "increment must satisfy |δ| ≤ 1e-2, got {}",
            delta.norm()
        )));
    }
    let residual = inverse_residual(f, x, delta, base, cfg)?;
    Ok(CheckReport::judged(
        format!("ftc_inverse[{f}]"),
        vec![residual],
        cfg.tolerances.ftc_inverse,
        json!({"function": f, "x": x, "delta": delta, "base": base, "steps": cfg.steps}),
    ))
}

fn inverse_residual(
    f: &AnalyticFunction,
    x: Quaternion,
    delta: Quaternion,
    base: Quaternion,
    cfg: &VerifyConfig,
) -> Result<f64> {
    let integrator = cfg.integrator(Rule::Left);
    let g = |y: Quaternion| -> Result<Quaternion> {
        Ok(integrator.integrate(f, &Path::line(base, y), cfg.steps)?.value)
    };
    let (parallel, perp) = if x.imag_norm() <= EPS_AXIS {
        (delta, Quaternion::ZERO)
    } else {
        let split = decompose_delta(x, delta)?;
        (split.parallel, split.perp)
    };
    let g_x = g(x)?;
    let g_mid = g(x + parallel)?;
    let g_end = g(x + parallel + perp)?;
    let change = (g_mid - g_x) + (g_end - g_mid);
    Ok((change - differential(f, x, delta)?).norm())
}

/// Residual of the inverse check must fall off as `|δ|²`.
///
/// Fits the log-log slope over `|δ| = 1e-2 · 2⁻ᵏ`, `k = 0..=halvings`.
pub fn verify_ftc_inverse_order(
    f: &AnalyticFunction,
    x: Quaternion,
    direction: Quaternion,
    base: Quaternion,
    halvings: u32,
    cfg: &VerifyConfig,
) -> Result<CheckReport> {
    let unit = direction.scale(1.0 / direction.norm());
    let mut pts = Vec::new();
    let mut residuals = Vec::new();
    for k in 0..=halvings {
        let size = 1e-2 / f64::from(1u32 << k);
        let r = inverse_residual(f, x, unit.scale(size), base, cfg)?;
        residuals.push(r);
        pts.push((size.ln(), r.ln()));
    }
    let slope = least_squares_slope(&pts);
    let band = cfg.tolerances.inverse_slope_band;
    Ok(CheckReport {
        check: format!("ftc_inverse_order[{f}]"),
        pass: (slope - 2.0).abs() <= band,
        residuals,
        tolerance: band,
        config: json!({"function": f, "x": x, "direction": unit, "slope": slope, "expected_slope": 2.0, "steps": cfg.steps}),
    })
}

/// `∫F·𝒟G + ∫(𝒟F)·G = F(x_b)G(x_b) − F(x_a)G(x_a)` on a shared partition
/// with left-endpoint values.
pub fn verify_integration_by_parts(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    path: &Path,
    cfg: &VerifyConfig,
) -> Result<CheckReport> {
    let nodes = path.nodes(cfg.steps);
    let mut left_sum = CompensatedSum::new();
    let mut right_sum = CompensatedSum::new();
    for (n, w) in nodes.windows(2).enumerate() {
        let s = n as f64 / cfg.steps as f64;
        let (x, delta) = (w[0], w[1] - w[0]);
        let terms = (|| -> Result<(Quaternion, Quaternion)> {
            let fx = eval_function(f, x)?;
            let gx = eval_function(g, x)?;
            Ok((fx * differential(g, x, delta)?, differential(f, x, delta)? * gx))
        })()
        .map_err(|e| e.at(s))?;
        left_sum.add(terms.0);
        right_sum.add(terms.1);
    }
    let (a, b) = (path.start(), path.end());
    let boundary = eval_function(f, b)? * eval_function(g, b)? - eval_function(f, a)? * eval_function(g, a)?;
    let total = left_sum.value() + right_sum.value();
    Ok(CheckReport::judged(
        format!("integration_by_parts[{f},{g}]"),
        vec![(total - boundary).norm()],
        cfg.tolerances.integration_by_parts,
        json!({
            "f": f, "g": g, "path": path, "steps": cfg.steps,
            "f_dg": left_sum.value(), "df_g": right_sum.value(), "boundary": boundary,
        }),
    ))
}

/// The real rule `∫f dt = h` carried over as `∫𝒟h = h(x_b) − h(x_a)`.
pub fn verify_antiderivative_map(f: &AnalyticFunction, path: &Path, cfg: &VerifyConfig) -> Result<CheckReport> {
    let h = antiderivative(f)?;
    let report = cfg.integrator(Rule::Left).integrate(&h, path, cfg.steps)?;
    let reference = report
        .reference
        .ok_or_else(|| Error::MissingReference(format!("{h} at the endpoints of the path")))?;
    Ok(CheckReport::judged(
        format!("antiderivative[{f}]"),
        vec![(report.value - reference).norm()],
        cfg.tolerances.antiderivative,
        json!({"f": f, "h": h, "path": path, "steps": cfg.steps, "value": report.value, "reference": reference}),
    ))
}

/// Staircase and slice quadrature agree.
pub fn verify_mutual_agreement(f: &AnalyticFunction, path: &Path, cfg: &VerifyConfig) -> Result<CheckReport> {
    let integrator = cfg.integrator(Rule::Left);
    let staircase = integrator.integrate(f, path, cfg.steps)?.value;
    let quadrature = integrator.slice_quadrature(f, path, cfg.steps)?.value;
    Ok(CheckReport::judged(
        format!("mutual_agreement[{f}]"),
        vec![(staircase - quadrature).norm()],
        cfg.tolerances.mutual_agreement,
        json!({"function": f, "path": path, "steps": cfg.steps, "staircase": staircase, "slice_quadrature": quadrature}),
    ))
}

/// Paths sharing endpoints give the same integral, and each matches the
/// closed form.
pub fn verify_path_independence(f: &AnalyticFunction, paths: &[Path], cfg: &VerifyConfig) -> Result<CheckReport> {
    if paths.len() < 2 {
        return Err(Error::Invalid("path independence needs at least two paths".into()));
    }
    let (a, b) = (paths[0].start(), paths[0].end());
    if paths.iter().any(|p| !p.start().approx_eq(a, 1e-12) || !p.end().approx_eq(b, 1e-12)) {
        return Err(Error::Invalid("paths must share their endpoints".into()));
    }
    if !f.is_single_valued() {
        return Err(Error::Unsupported(format!("{f} is not single-valued")));
    }
    let reference = eval_function(f, b)? - eval_function(f, a)?;
    let integrator = cfg.integrator(Rule::Left);
    let values = paths
        .iter()
        .map(|p| Ok(integrator.integrate(f, p, cfg.steps)?.value))
        .collect::<Result<Vec<_>>>()?;
    let mut residuals = Vec::new();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            residuals.push((values[i] - values[j]).norm());
        }
    }
    residuals.extend(values.iter().map(|v| (*v - reference).norm()));
    Ok(CheckReport::judged(
        format!("path_independence[{f}]"),
        residuals,
        cfg.tolerances.path_independence,
        json!({"function": f, "paths": paths, "steps": cfg.steps, "values": values, "reference": reference}),
    ))
}

/// A single-valued function integrates to zero around a closed loop.
pub fn verify_closed_loop(f: &AnalyticFunction, path: &Path, cfg: &VerifyConfig) -> Result<CheckReport> {
    if !path.is_closed() {
        return Err(Error::Invalid("closed-loop check needs a closed path".into()));
    }
    if !f.is_single_valued() {
        return Err(Error::Unsupported(format!("{f} is not single-valued")));
    }
    let value = cfg.integrator(Rule::Left).integrate(f, path, cfg.steps)?.value;
    Ok(CheckReport::judged(
        format!("closed_loop[{f}]"),
        vec![value.norm()],
        cfg.tolerances.closed_loop,
        json!({"function": f, "path": path, "steps": cfg.steps, "value": value}),
    ))
}

/// `ln` tracked continuously around a loop of `turns` windings about the
/// origin picks up `2π·turns·u`.
pub fn verify_winding(u: UnitImaginary, turns: i32, cfg: &VerifyConfig) -> Result<CheckReport> {
    let path = Path::slice_circle(0.0, 1.0, u, f64::from(turns))?;
    let value = integrate_with_branch_tracking(&AnalyticFunction::ln(), &path, cfg.steps)?.value;
    let expected = u.get().scale(TAU * f64::from(turns));
    Ok(CheckReport::judged(
        format!("winding[m={turns}]"),
        vec![(value - expected).norm()],
        cfg.tolerances.winding * f64::from(turns.unsigned_abs()).max(1.0),
        json!({"u": u, "turns": turns, "steps": cfg.steps, "value": value, "expected": expected}),
    ))
}

/// The chord-midpoint rule converges faster than the left rule.
pub fn verify_rule_upgrade(
    f: &AnalyticFunction,
    path: &Path,
    step_counts: &[usize],
    cfg: &VerifyConfig,
) -> Result<CheckReport> {
    let left = cfg.integrator(Rule::Left).convergence_study(f, path, step_counts)?;
    let mid = cfg.integrator(Rule::Midpoint).convergence_study(f, path, step_counts)?;
    let (lo, mo) = match (left.est_order, mid.est_order) {
        (Some(l), Some(m)) => (l, m),
        _ => {
            return Err(Error::Invalid(
                "rule comparison needs a function with non-zero discretization error".into(),
            ))
        }
    };
    let margin = cfg.tolerances.rule_upgrade_margin;
    Ok(CheckReport {
        check: format!("rule_upgrade[{f}]"),
        pass: mo - lo >= margin,
        residuals: vec![lo, mo],
        tolerance: margin,
        config: json!({"function": f, "path": path, "steps": step_counts, "order_left": lo, "order_midpoint": mo}),
    })
}

/// Identities that hold to machine precision, over seeded random samples:
/// `𝒟xⁿ⁺¹ = Σ xᵏδxⁿ⁻ᵏ` for `n ≤ 6`, the Leibniz rule for polynomials of
/// degree ≤ 4, the commutation properties of `δ∥`/`δ⊥`, and the
/// perpendicular quotient against its conjugate-difference form.
pub fn verify_exact_identities(samples: usize, seed: u64, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let tol = cfg.tolerances.exact_identity;
    let mut rng = StdRng::seed_from_u64(seed);
    let quat = |rng: &mut StdRng, scale: f64| {
        Quaternion::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    };
    let rel = |a: Quaternion, b: Quaternion| (a - b).max_norm() / a.max_norm().max(b.max_norm()).max(1.0);

    let mut sym = Vec::new();
    let mut leibniz = Vec::new();
    let mut split = Vec::new();
    let mut quotient = Vec::new();
    let fns = [
        AnalyticFunction::exp(),
        AnalyticFunction::sin(),
        AnalyticFunction::cos(),
        AnalyticFunction::monomial(3),
    ];
    for _ in 0..samples {
        let x = loop {
            let x = quat(&mut rng, 1.5);
            if x.imag_norm() > 1e-3 {
                break x;
            }
        };
        let delta = quat(&mut rng, 1.0);
        let worst = (0..=6u32)
            .map(|n| {
                let d = differential(&AnalyticFunction::monomial(n + 1), x, delta)?;
                Ok(rel(d, sym_product_sum(x, delta, n)))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        sym.push(worst);

        let poly = |rng: &mut StdRng| {
            let degree = rng.random_range(0..=4usize);
            let coeffs = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
            PowerSeries::polynomial(coeffs).expect("finite coefficients")
        };
        let (fs, gs) = (poly(&mut rng), poly(&mut rng));
        let fg = AnalyticFunction::Series(fs.product(&gs, 12));
        let (fa, ga) = (AnalyticFunction::Series(fs), AnalyticFunction::Series(gs));
        let lhs = differential(&fg, x, delta)?;
        let rhs = differential(&fa, x, delta)? * eval_function(&ga, x)? + eval_function(&fa, x)? * differential(&ga, x, delta)?;
        leibniz.push(rel(lhs, rhs));

        let u = slice_point(x)?.u.get();
        let d = decompose_delta(x, delta)?;
        split.push(
            [
                rel(d.parallel + d.perp, delta),
                rel(u * d.parallel, d.parallel * u),
                rel(u * d.perp, -(d.perp * u)),
            ]
            .into_iter()
            .fold(0.0, f64::max),
        );

        let mut worst_q: f64 = 0.0;
        for f in &fns {
            let pq = perp_quotient(f, x)?;
            let full = (eval_function(f, x)? - eval_function(f, x.conj())?) * (x - x.conj()).inverse()?;
            worst_q = worst_q.max(rel(full, Quaternion::real(pq)));
        }
        quotient.push(worst_q);
    }
    let config = json!({"samples": samples, "seed": seed});
    Ok(vec![
        CheckReport::judged("symmetric_product_sum", sym, tol, config.clone()),
        CheckReport::judged("leibniz_rule", leibniz, tol, config.clone()),
        CheckReport::judged("delta_split", split, tol, config.clone()),
        CheckReport::judged("perp_quotient", quotient, tol, config),
    ])
}

/// Functions of the default catalog.
pub fn catalog_functions() -> Vec<AnalyticFunction> {
    vec![
        AnalyticFunction::monomial(1),
        AnalyticFunction::monomial(2),
        AnalyticFunction::monomial(3),
        AnalyticFunction::exp(),
        AnalyticFunction::sin(),
        AnalyticFunction::cos(),
    ]
}

/// The straight line `α + iβ + jγs`, `s ∈ [0, 1]`.
pub fn staircase_line(alpha: f64, beta: f64, gamma: f64) -> Path {
    Path::line(
        Quaternion::new(alpha, beta, 0.0, 0.0),
        Quaternion::new(alpha, beta, gamma, 0.0),
    )
}

/// Paths of the default catalog: three lines, one polyline, one closed circle.
pub fn catalog_paths() -> Vec<(&'static str, Path)> {
    let q = Quaternion::new;
    let diag = UnitImaginary::new(q(0.0, 1.0, 1.0, 1.0)).expect("non-real");
    vec![
        ("line_alpha_beta_gamma", staircase_line(1.0, 1.0, 1.0)),
        ("line_origin", Path::line(Quaternion::ZERO, q(1.0, 1.0, 1.0, 0.0))),
        ("line_i_to_j", Path::line(Quaternion::I, Quaternion::J)),
        (
            "polyline",
            Path::polyline(vec![q(1.0, 1.0, 0.0, 0.0), q(1.0, 0.5, 0.5, 0.5), q(1.0, 0.0, 1.0, 0.0), q(0.5, 0.0, 1.0, 0.0)])
                .expect("four points"),
        ),
        ("circle", Path::slice_circle(1.0, 1.0, diag, 1.0).expect("valid circle")),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Catalog sweep plus one instance of every identity.
    Default,
    /// Everything in `Default` and the extended checks.
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Suite::Default),
            "all" => Ok(Suite::All),
            other => Err(Error::Invalid(format!("unknown suite `{other}` (default|all)"))),
        }
    }
}

type Job = Box<dyn Fn(&VerifyConfig) -> Vec<CheckReport> + Send + Sync>;

fn job<F>(name: String, config: Value, run: F) -> Job
where
    F: Fn(&VerifyConfig) -> Result<CheckReport> + Send + Sync + 'static,
{
    Box::new(move |cfg| vec![run(cfg).unwrap_or_else(|e| CheckReport::errored(name.clone(), &e, config.clone()))])
}

fn suite_jobs(suite: Suite) -> Vec<Job> {
    let q = Quaternion::new;
    let mut jobs: Vec<Job> = Vec::new();

    for f in catalog_functions() {
        for (name, path) in catalog_paths() {
            let (f1, p1) = (f.clone(), path.clone());
            let (f2, p2) = (f.clone(), path.clone());
            let cfg_json = json!({"function": &f, "path": name});
            jobs.push(job(format!("ftc_forward[{f}]"), cfg_json.clone(), move |cfg| {
                verify_ftc_forward(&f1, &p1, &cfg.study_steps, cfg)
            }));
            jobs.push(job(format!("mutual_agreement[{f}]"), cfg_json, move |cfg| {
                verify_mutual_agreement(&f2, &p2, cfg)
            }));
        }
    }

    let x3 = AnalyticFunction::monomial(3);
    let base = q(1.0, 1.0, 0.0, 0.0);
    {
        let f = x3.clone();
        jobs.push(job("ftc_inverse[x^3]".into(), json!({}), move |cfg| {
            verify_ftc_inverse(&f, base, Quaternion::J.scale(1e-2), base, cfg)
        }));
        let f = x3.clone();
        jobs.push(job("ftc_inverse_order[x^3]".into(), json!({}), move |cfg| {
            verify_ftc_inverse_order(&f, base, Quaternion::J, base, 3, cfg)
        }));
    }
    let by_parts_path = Path::line(Quaternion::ZERO, q(1.0, 1.0, 1.0, 0.0));
    for (f, g) in [
        (AnalyticFunction::monomial(1), AnalyticFunction::monomial(1)),
        (AnalyticFunction::monomial(2), AnalyticFunction::monomial(1)),
    ] {
        let p = by_parts_path.clone();
        jobs.push(job(format!("integration_by_parts[{f},{g}]"), json!({}), move |cfg| {
            verify_integration_by_parts(&f, &g, &p, cfg)
        }));
    }
    let i_to_j = Path::line(Quaternion::I, Quaternion::J);
    for f in [
        AnalyticFunction::polynomial(vec![0.0, 0.0, 1.0]).expect("finite"),
        AnalyticFunction::cos(),
    ] {
        let p = i_to_j.clone();
        jobs.push(job(format!("antiderivative[{f}]"), json!({}), move |cfg| {
            verify_antiderivative_map(&f, &p, cfg)
        }));
    }
    jobs.push(job("winding[m=1]".into(), json!({}), |cfg| verify_winding(UnitImaginary::I, 1, cfg)));

    if suite == Suite::All {
        let a = q(1.0, 1.0, 0.0, 0.0);
        let b = q(0.5, 0.0, 1.0, 0.0);
        let paths = independence_paths(a, b);
        jobs.push(job("path_independence[exp]".into(), json!({}), move |cfg| {
            verify_path_independence(&AnalyticFunction::exp(), &paths, cfg)
        }));
        jobs.push(job("closed_loop[x^3]".into(), json!({}), |cfg| {
            let c = Path::slice_circle(2.0, 1.0, UnitImaginary::I, 1.0)?;
            verify_closed_loop(&AnalyticFunction::monomial(3), &c, cfg)
        }));
        let diag = UnitImaginary::new(q(0.0, 1.0, 1.0, 1.0)).expect("non-real");
        for u in [UnitImaginary::I, UnitImaginary::J, diag] {
            for m in [-1, 1, 2] {
                jobs.push(job(format!("winding[m={m}]"), json!({}), move |cfg| verify_winding(u, m, cfg)));
            }
        }
        for n in 1..=3 {
            jobs.push(job(format!("ftc_forward[x^{n}]"), json!({}), move |cfg| {
                verify_ftc_forward(
                    &AnalyticFunction::monomial(n),
                    &staircase_line(1.0, 1.0, 1.0),
                    &[100, 1_000, 10_000, 100_000],
                    cfg,
                )
            }));
        }
        jobs.push(job("rule_upgrade[x^3]".into(), json!({}), |cfg| {
            verify_rule_upgrade(
                &AnalyticFunction::monomial(3),
                &staircase_line(1.0, 1.0, 1.0),
                &[100, 200, 400, 800],
                cfg,
            )
        }));
        jobs.push(Box::new(|cfg| {
            verify_exact_identities(100, 0x5eed, cfg).unwrap_or_else(|e| {
                vec![CheckReport::errored("exact_identities", &e, json!({}))]
            })
        }));
    }
    jobs
}

/// Line, three-segment polyline and slice-sweeping arc between `a` and `b`.
pub fn independence_paths(a: Quaternion, b: Quaternion) -> Vec<Path> {
    let bump = Quaternion::new(0.0, 0.0, 0.0, FRAC_1_SQRT_2);
    let third = |t: f64| a + (b - a).scale(t);
    vec![
        Path::line(a, b),
        Path::polyline(vec![a, third(1.0 / 3.0) + bump, third(2.0 / 3.0) - bump.scale(0.5), b]).expect("four points"),
        Path::arc(a, b).expect("non-real endpoints with distinct slices"),
    ]
}

/// Runs every check of `suite`, concurrently when `cfg.threads > 1`.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let jobs = suite_jobs(suite);
    // checks parallelize across jobs; each integration stays single-threaded
    let inner = VerifyConfig {
        threads: 1,
        ..cfg.clone()
    };
    let run = |j: &Job| j(&inner);
    if cfg.threads > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
            Ok(pool) => pool.install(|| jobs.par_iter().flat_map(run).collect()),
            Err(_) => jobs.iter().flat_map(run).collect(),
        }
    } else {
        jobs.iter().flat_map(run).collect()
    }
}

/// Aggregate written by `qint verify --out`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub suite: String,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(suite: Suite, cfg: &VerifyConfig, checks: Vec<CheckReport>) -> Self {
        Self {
            pass: checks.iter().all(|c| c.pass),
            suite: match suite {
                Suite::Default => "default".into(),
                Suite::All => "all".into(),
            },
            tolerances: cfg.tolerances.clone(),
            checks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, a: f64, b: f64, c: f64) -> Quaternion {
        Quaternion::new(w, a, b, c)
    }

    #[test]
    fn tolerance_overrides() {
        assert_eq!(Tolerances::parse_override("1e-30").unwrap().ftc_forward, 1e-30);
        let t = Tolerances::parse_override(r#"{"winding": 0.5}"#).unwrap();
        assert_eq!(t.winding, 0.5);
        assert_eq!(t.closed_loop, Tolerances::default().closed_loop);
        assert!(Tolerances::parse_override("-1").is_err());
        assert!(Tolerances::parse_override(r#"{"nope": 1}"#).is_err());
    }

    #[test]
    fn ftc_forward_examples() {
        let cfg = VerifyConfig::default();
        let r = verify_ftc_forward(&AnalyticFunction::monomial(3), &staircase_line(2.0, 1.0, 1.0), &[100, 1000, 10_000], &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_ftc_forward(&AnalyticFunction::monomial(1), &Path::line(q(1., 2., 3., 4.), q(-1., 0., 2., 0.)), &[10, 100, 1000], &cfg).unwrap();
        assert!(r.pass);
        assert!(r.residuals.iter().all(|e| *e <= 1e-12));

        let recip = AnalyticFunction::series(vec![1.0; 80], 1.0).unwrap();
        let leaving = Path::line(q(0., 0.5, 0., 0.), q(0., 0., 2.0, 0.));
        let e = verify_ftc_forward(&recip, &leaving, &[10, 100, 1000], &cfg).unwrap_err();
        assert!(matches!(e, Error::MissingReference(_) | Error::Domain(_) | Error::AtParameter { .. }), "{e}");
    }

    #[test]
    fn ftc_inverse_examples() {
        let cfg = VerifyConfig::default();
        let base = q(1., 1., 0., 0.);
        let r = verify_ftc_inverse(&AnalyticFunction::monomial(3), base, q(0., 0., 0.01, 0.), base, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_ftc_inverse(&AnalyticFunction::monomial(1), q(0.3, 0.2, -0.5, 1.), q(0.004, -0.002, 0.001, 0.003), base, &cfg).unwrap();
        assert!(r.residuals[0] < 1e-12);
        let r = verify_ftc_inverse(&AnalyticFunction::exp(), q(0.3, 0.2, -0.5, 1.), Quaternion::ZERO, base, &cfg).unwrap();
        assert_eq!(r.residuals[0], 0.0);
        assert!(verify_ftc_inverse(&AnalyticFunction::exp(), base, Quaternion::J, base, &cfg).is_err());
    }

    #[test]
    fn by_parts_examples() {
        let cfg = VerifyConfig::default();
        let p = Path::line(Quaternion::ZERO, q(1., 1., 1., 0.));
        let x = AnalyticFunction::monomial(1);
        let r = verify_integration_by_parts(&x, &x, &p, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let b = q(1., 1., 1., 0.);
        let boundary: Quaternion = serde_json::from_value(r.config["boundary"].clone()).unwrap();
        assert!(boundary.approx_eq(b * b, 1e-14));

        let one = AnalyticFunction::polynomial(vec![1.0]).unwrap();
        let r = verify_integration_by_parts(&one, &AnalyticFunction::exp(), &p, &cfg).unwrap();
        let fwd = Integrator::default().integrate(&AnalyticFunction::exp(), &p, cfg.steps).unwrap();
        assert!((r.residuals[0] - fwd.abs_error.unwrap()).abs() < 1e-12);

        let loop_path = Path::slice_circle(0.5, 0.8, UnitImaginary::J, 1.0).unwrap();
        let r = verify_integration_by_parts(&AnalyticFunction::monomial(2), &x, &loop_path, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn antiderivative_examples() {
        let cfg = VerifyConfig::default();
        let p = Path::line(Quaternion::I, Quaternion::J);
        let t2 = AnalyticFunction::polynomial(vec![0., 0., 1.]).unwrap();
        let r = verify_antiderivative_map(&t2, &p, &cfg).unwrap();
        assert!(r.pass);
        let reference: Quaternion = serde_json::from_value(r.config["reference"].clone()).unwrap();
        assert!(reference.approx_eq(q(0., 1. / 3., -1. / 3., 0.), 1e-15));

        let r = verify_antiderivative_map(&AnalyticFunction::cos(), &p, &cfg).unwrap();
        assert!(r.pass);
        let reference: Quaternion = serde_json::from_value(r.config["reference"].clone()).unwrap();
        // sin(j) − sin(i) = (j − i)·sinh 1
        assert!(reference.approx_eq(q(0., -1., 1., 0.).scale(1f64.sinh()), 1e-14));

        let zero = AnalyticFunction::polynomial(vec![0.0]).unwrap();
        let r = verify_antiderivative_map(&zero, &p, &cfg).unwrap();
        assert_eq!(r.residuals, vec![0.0]);
        let v: Quaternion = serde_json::from_value(r.config["value"].clone()).unwrap();
        assert_eq!(v, Quaternion::ZERO);

        assert!(matches!(verify_antiderivative_map(&AnalyticFunction::ln(), &p, &cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn report_json_shape() {
        let cfg = VerifyConfig::default();
        let r = verify_winding(UnitImaginary::I, 1, &cfg).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["check", "pass", "residuals", "tolerance", "config"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn broken_tolerance_fails() {
        let cfg = VerifyConfig {
            tolerances: Tolerances::uniform(1e-30),
            ..VerifyConfig::default()
        };
        let r = verify_winding(UnitImaginary::I, 1, &cfg).unwrap();
        assert!(!r.pass);
    }
}
