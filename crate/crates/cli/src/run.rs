//! The subcommands, as pure functions from a validated spec to a rendered
//! report.

use std::f64::consts::PI;

use floquet_core::floquet::{
    integrate_fundamental, monodromy_decompose, BasisOptions, FloquetBasis, DEFAULT_STEPS,
};
use floquet_core::linalg;
use floquet_core::linalg::CVector;
use floquet_core::models::Splitting;
use floquet_core::ode::{self, FloquetReport, Forcing, FundamentalMatrix};
use floquet_core::perturb::{
    direct_candidates, direct_eigensolve, rs_solve, wb_solve, Method, PerturbationProblem,
    PerturbationSolution, WbOptions,
};
use floquet_core::BasisIndex;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::problem::{MethodChoice, ProblemSpec, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Command-line settings that override the problem file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub method: Option<MethodChoice>,
    pub order: Option<usize>,
    pub cutoff: Option<usize>,
    /// Convergence tolerance of the series and of the cutoff check.
    pub tol: Option<f64>,
    /// Sweep points per axis (range sweeps) or solve points per period.
    pub grid: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut ProblemSpec) -> Result<()> {
        if let Some(m) = self.method {
            spec.method = m;
        }
        if let Some(o) = self.order {
            if o != 1 && o != 2 {
                return Err(CliError::Usage(format!("--order must be 1 or 2, got {o}")));
            }
            spec.order = o;
        }
        if let Some(k) = self.cutoff {
            if k > crate::problem::MAX_CUTOFF {
                return Err(CliError::Usage(format!(
                    "--cutoff must be at most {}",
                    crate::problem::MAX_CUTOFF
                )));
            }
            spec.cutoff = k;
            spec.basis_cutoff = spec.basis_cutoff.max(k);
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
            spec.tolerances.wb = t;
            spec.tolerances.cutoff = t;
        }
        if let Some(g) = self.grid {
            if g == 0 {
                return Err(CliError::Usage("--grid must be positive".into()));
            }
            for s in &mut spec.sweep {
                s.regrid(g);
            }
            spec.solve.points_per_period = g.max(4);
        }
        Ok(())
    }
}

/// A rendered report; `failed` marks partial results.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn cx(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cell(s: &str) -> String {
    s.replace([',', '\n', '"'], ";")
}

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e6)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e6).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn build_problem(
    spec: &ProblemSpec,
    split: &Splitting,
) -> floquet_core::Result<PerturbationProblem> {
    let basis = FloquetBasis::new(
        &split.a0,
        BasisOptions {
            cutoff: spec.basis_cutoff,
            ..Default::default()
        },
    )?;
    Ok(
        PerturbationProblem::new(basis, split.v.clone(), spec.cutoff)?
            .with_cutoff_tol(spec.tolerances.cutoff)
            .with_degeneracy_threshold(spec.degeneracy_threshold()),
    )
}

fn wb_options(tol: &Tolerances) -> WbOptions {
    WbOptions {
        tol: tol.wb,
        max_iter: tol.max_iter,
        newton: tol.newton,
        ..Default::default()
    }
}

pub fn solve_with(
    p: &PerturbationProblem,
    method: Method,
    target: BasisIndex,
    order: usize,
    tol: &Tolerances,
) -> floquet_core::Result<PerturbationSolution> {
    match method {
        Method::Rs => rs_solve(p, target, order),
        Method::Wb => wb_solve(p, target, order, wb_options(tol)),
        Method::Direct => direct_eigensolve(p, target),
    }
}

fn k0(j: usize) -> BasisIndex {
    BasisIndex { j, k: 0 }
}

// ---------------------------------------------------------------- exponents

#[derive(Debug, Serialize)]
pub struct Gap {
    pub j: usize,
    pub k: i64,
    pub gap: f64,
}

#[derive(Debug, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub order: usize,
    pub mu: Option<[f64; 2]>,
    pub converged: bool,
    pub iterations: usize,
    pub order_contributions: Vec<[f64; 2]>,
    pub cutoff_shift: Option<f64>,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TargetReport {
    pub j: usize,
    pub aleph: [f64; 2],
    pub small_denominators: Vec<Gap>,
    pub results: Vec<MethodResult>,
}

#[derive(Debug, Serialize)]
pub struct ExponentsReport {
    pub omega: f64,
    pub cutoff: usize,
    pub targets: Vec<TargetReport>,
}

fn method_result(
    method: Method,
    order: usize,
    r: floquet_core::Result<PerturbationSolution>,
) -> MethodResult {
    match r {
        Ok(s) => MethodResult {
            method: method.to_string(),
            order: s.order,
            mu: Some(cx(s.mu)),
            converged: s.converged,
            iterations: s.iterations,
            order_contributions: s.order_contributions.iter().copied().map(cx).collect(),
            cutoff_shift: Some(s.cutoff_shift),
            residual: s.residual.is_finite().then_some(s.residual),
            error: None,
        },
        Err(e) => MethodResult {
            method: method.to_string(),
            order: if method == Method::Direct { 0 } else { order },
            mu: None,
            converged: false,
            iterations: 0,
            order_contributions: Vec::new(),
            cutoff_shift: None,
            residual: None,
            error: Some(e.to_string()),
        },
    }
}

/// Per-target exponents by each requested method. With `all`, the dense
/// eigensolve runs as the in-run oracle.
pub fn exponents_report(spec: &ProblemSpec) -> Result<ExponentsReport> {
    let p = build_problem(spec, &spec.splitting()?)?;
    let targets = spec
        .targets
        .iter()
        .map(|&j| {
            let t = k0(j);
            let small_denominators = p
                .scan_small_denominators(t)
                .into_iter()
                .map(|(q, g)| Gap {
                    j: q.j + 1,
                    k: q.k,
                    gap: g.norm(),
                })
                .collect();
            let results = spec
                .method
                .methods()
                .into_iter()
                .map(|m| {
                    method_result(
                        m,
                        spec.order,
                        solve_with(&p, m, t, spec.order, &spec.tolerances),
                    )
                })
                .collect();
            TargetReport {
                j: j + 1,
                aleph: cx(p.aleph(t)),
                small_denominators,
                results,
            }
        })
        .collect();
    Ok(ExponentsReport {
        omega: spec.omega,
        cutoff: spec.cutoff,
        targets,
    })
}

pub fn cmd_exponents(spec: &ProblemSpec, format: Format) -> Result<Output> {
    let report = exponents_report(spec)?;
    let failed = report
        .targets
        .iter()
        .flat_map(|t| &t.results)
        .any(|r| r.error.is_some());
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("j,method,order,mu_re,mu_im,aleph_re,aleph_im,converged,iterations,cutoff_shift,min_gap,error\n");
            for t in &report.targets {
                let min_gap = t
                    .small_denominators
                    .iter()
                    .map(|g| g.gap)
                    .fold(None, |a: Option<f64>, g| Some(a.map_or(g, |a| a.min(g))));
                for r in &t.results {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        t.j,
                        r.method,
                        r.order,
                        opt(r.mu.map(|m| m[0])),
                        opt(r.mu.map(|m| m[1])),
                        num(t.aleph[0]),
                        num(t.aleph[1]),
                        r.converged,
                        r.iterations,
                        opt(r.cutoff_shift),
                        opt(min_gap),
                        cell(r.error.as_deref().unwrap_or("")),
                    ));
                }
            }
            s
        }
    };
    Ok(Output { text, failed })
}

// -------------------------------------------------------------------- solve

#[derive(Debug, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub y: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub exponents: Vec<[f64; 2]>,
    pub residual_max: f64,
    pub residual_tol: f64,
    pub semigroup_deviation: f64,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Fundamental matrix built from one `k = 0` solution per mode.
pub fn fundamental(
    spec: &ProblemSpec,
    p: &PerturbationProblem,
) -> floquet_core::Result<FundamentalMatrix> {
    let method = spec.method.primary();
    let sols = (0..spec.n)
        .map(|j| solve_with(p, method, k0(j), spec.order, &spec.tolerances))
        .collect::<floquet_core::Result<Vec<_>>>()?;
    FundamentalMatrix::from_solutions(p, &sols)
}

pub fn solve_report(spec: &ProblemSpec) -> Result<SolveReport> {
    let forcing = spec.forcing_series()?;
    if forcing.is_none() && spec.y0.is_none() {
        return Err(CliError::Usage(
            "solve needs a forcing or an initial state y0".into(),
        ));
    }
    let split = spec.splitting()?;
    let p = build_problem(spec, &split)?;
    let fm = fundamental(spec, &p)?;
    let period = 2.0 * PI / spec.omega;
    let grid = ode::time_grid(
        period * spec.solve.periods as f64,
        spec.solve.periods * spec.solve.points_per_period,
    );
    let forcing = forcing.map(Forcing::Periodic).unwrap_or(Forcing::Zero);
    let y0 = spec.y0.clone().unwrap_or_else(|| CVector::zeros(spec.n));
    let sol = ode::solve_inhomogeneous(&fm, &split.full()?, &forcing, &y0, &grid)?;
    let check = ode::floquet_property_check(&fm, 64);
    Ok(SolveReport {
        method: spec.method.primary().to_string(),
        exponents: fm.exponents().iter().copied().map(cx).collect(),
        residual_max: sol.residual_max,
        residual_tol: spec.tolerances.residual,
        semigroup_deviation: check.semigroup_deviation,
        trajectory: sol
            .t_grid
            .iter()
            .zip(&sol.y_values)
            .map(|(&t, y)| TrajectoryPoint {
                t,
                y: y.iter().copied().map(cx).collect(),
            })
            .collect(),
    })
}

pub fn cmd_solve(spec: &ProblemSpec, format: Format) -> Result<Output> {
    let report = solve_report(spec)?;
    let failed = !(report.residual_max <= report.residual_tol);
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("t");
            for i in 1..=spec.n {
                s.push_str(&format!(",y{i}_re,y{i}_im"));
            }
            s.push('\n');
            for pt in &report.trajectory {
                s.push_str(&num(pt.t));
                for z in &pt.y {
                    s.push_str(&format!(",{},{}", num(z[0]), num(z[1])));
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Output { text, failed })
}

// ---------------------------------------------------------- stability chart

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartPoint {
    pub p1: f64,
    pub p2: f64,
    /// `min_j Re mu_j`; growth means a negative value.
    pub re_mu_min: Option<f64>,
    pub growth_rate: Option<f64>,
    pub unstable: Option<bool>,
    pub method: String,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ChartReport {
    pub p1: String,
    pub p2: String,
    pub points: Vec<ChartPoint>,
}

/// Exponents of one mode for the chart: degenerate pairs the dense solve
/// cannot tell apart contribute every candidate.
fn chart_mode(
    p: &PerturbationProblem,
    method: Method,
    j: usize,
    spec: &ProblemSpec,
) -> floquet_core::Result<(Vec<Complex64>, bool, Method)> {
    let t = k0(j);
    match method {
        Method::Direct => match direct_eigensolve(p, t) {
            Ok(s) => Ok((vec![s.mu], s.converged, Method::Direct)),
            Err(floquet_core::Error::AmbiguousMatch { .. }) => {
                let here = direct_candidates(p, t)?;
                let wider = direct_candidates(&p.with_cutoff(spec.cutoff + 2), t)?;
                let min_re = |v: &[Complex64]| v.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                let shift = (min_re(&here) - min_re(&wider)).abs();
                if shift > 10.0 * spec.tolerances.cutoff {
                    return Err(floquet_core::Error::CutoffUnstable { target: t, shift });
                }
                Ok((here, shift <= spec.tolerances.cutoff, Method::Direct))
            }
            Err(e) => Err(e),
        },
        Method::Rs => match rs_solve(p, t, spec.order) {
            Ok(s) => Ok((vec![s.mu], s.converged, Method::Rs)),
            Err(floquet_core::Error::SmallDenominator { .. }) => chart_mode(p, Method::Wb, j, spec),
            Err(e) => Err(e),
        },
        Method::Wb => {
            let s = wb_solve(p, t, spec.order, wb_options(&spec.tolerances))?;
            Ok((vec![s.mu], s.converged, Method::Wb))
        }
    }
}

/// `min_j Re mu_j` from the multipliers of the integrated monodromy matrix,
/// for points whose unperturbed part has no Floquet basis (a Jordan block).
/// Converged when doubling the step count moves it by at most `tol`.
fn multiplier_growth(split: &Splitting, tol: f64) -> floquet_core::Result<(f64, bool)> {
    let full = split.full()?;
    let period = full.period();
    let growth = |steps: usize| -> floquet_core::Result<f64> {
        let path = integrate_fundamental(&full, steps)?;
        let e = linalg::eig(path.monodromy())?;
        Ok(e.values
            .iter()
            .map(|rho| -rho.norm().ln() / period)
            .fold(f64::INFINITY, f64::min))
    };
    let coarse = growth(DEFAULT_STEPS)?;
    let fine = growth(2 * DEFAULT_STEPS)?;
    Ok((fine, (fine - coarse).abs() <= tol))
}

/// One grid point, computed from the spec alone. Points where the
/// unperturbed basis does not exist fall back to the monodromy multipliers
/// and report method `monodromy`.
pub fn chart_point(spec: &ProblemSpec, x1: f64, x2: f64) -> ChartPoint {
    let method = spec.method.primary();
    let mut point = ChartPoint {
        p1: x1,
        p2: x2,
        re_mu_min: None,
        growth_rate: None,
        unstable: None,
        method: method.to_string(),
        converged: false,
        error: None,
    };
    let result = (|| -> floquet_core::Result<(f64, bool, Vec<Method>)> {
        let split = spec.splitting_with(&[(&spec.sweep[0].path, x1), (&spec.sweep[1].path, x2)])?;
        let p = match build_problem(spec, &split) {
            Err(
                floquet_core::Error::DefectiveMonodromy { .. }
                | floquet_core::Error::SingularBasis { .. },
            ) => {
                let (re_min, converged) = multiplier_growth(&split, spec.tolerances.cutoff)?;
                return Ok((re_min, converged, Vec::new()));
            }
            other => other?,
        };
        let mut re_min = f64::INFINITY;
        let mut converged = true;
        let mut used = Vec::new();
        for &j in &spec.targets {
            let (mus, conv, m) = chart_mode(&p, method, j, spec)?;
            re_min = mus.iter().map(|z| z.re).fold(re_min, f64::min);
            converged &= conv;
            if !used.contains(&m) {
                used.push(m);
            }
        }
        Ok((re_min, converged, used))
    })();
    match result {
        Ok((re_min, converged, used)) => {
            point.re_mu_min = Some(re_min);
            point.growth_rate = Some(0.0 - re_min);
            point.unstable = Some(re_min < -spec.tolerances.stability);
            point.converged = converged;
            point.method = if used.is_empty() {
                "monodromy".to_string()
            } else {
                used.iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join("+")
            };
        }
        Err(e) => point.error = Some(e.to_string()),
    }
    point
}

/// Row-major grid: the first swept scalar indexes rows, the second columns.
pub fn chart_report(spec: &ProblemSpec, jobs: Option<usize>) -> Result<ChartReport> {
    if spec.sweep.len() != 2 {
        return Err(CliError::Usage(format!(
            "stability-chart needs exactly 2 swept scalars, the spec has {}",
            spec.sweep.len()
        )));
    }
    let grid: Vec<(f64, f64)> = spec.sweep[0]
        .values
        .iter()
        .flat_map(|&a| spec.sweep[1].values.iter().map(move |&b| (a, b)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let points = pool.install(|| {
        grid.par_iter()
            .map(|&(a, b)| chart_point(spec, a, b))
            .collect()
    });
    Ok(ChartReport {
        p1: spec.sweep[0].path.to_string(),
        p2: spec.sweep[1].path.to_string(),
        points,
    })
}

pub fn cmd_stability_chart(
    spec: &ProblemSpec,
    jobs: Option<usize>,
    format: Format,
) -> Result<Output> {
    let report = chart_report(spec, jobs)?;
    let failed = report.points.iter().any(|p| p.error.is_some());
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s =
                String::from("p1,p2,re_mu_min,growth_rate,unstable,method,converged,error\n");
            for p in &report.points {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    num(p.p1),
                    num(p.p2),
                    opt(p.re_mu_min),
                    opt(p.growth_rate),
                    p.unstable.map(|u| u.to_string()).unwrap_or_default(),
                    p.method,
                    p.converged,
                    cell(p.error.as_deref().unwrap_or("")),
                ));
            }
            s
        }
    };
    Ok(Output { text, failed })
}

// ------------------------------------------------------------------ compare

/// An error against the oracle, or the name of the failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Value(f64),
    Failure(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Value(x) => write!(f, "{}", num(*x)),
            Cell::Failure(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub j: usize,
    pub scale: f64,
    /// Dense-eigensolve exponents matched to the target (two for a
    /// degenerate pair).
    pub oracle: Vec<[f64; 2]>,
    pub rs1: Cell,
    pub rs2: Cell,
    pub wb1: Cell,
    pub wb2: Cell,
}

#[derive(Debug, Serialize)]
pub struct Fit {
    pub j: usize,
    pub column: String,
    /// Least-squares slope of `ln error` against `ln scale`.
    pub exponent: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub fits: Vec<Fit>,
}

/// Slope of `ln y` against `ln x` over the positive pairs; `None` with fewer
/// than two.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn compare_report(spec: &ProblemSpec) -> Result<CompareReport> {
    let base = spec.splitting()?;
    let mut rows = Vec::new();
    for &scale in &spec.scales {
        let p = build_problem(spec, &base.scaled(scale))?;
        for &j in &spec.targets {
            let t = k0(j);
            // A degenerate pair has two equally weighted genuine exponents;
            // each estimate is then measured against the nearer one.
            let oracle = match direct_eigensolve(&p, t) {
                Ok(s) => vec![s.mu],
                Err(floquet_core::Error::AmbiguousMatch { .. }) => direct_candidates(&p, t)?,
                Err(e) => return Err(e.into()),
            };
            let distance = |mu: Complex64| {
                oracle
                    .iter()
                    .map(|o| (mu - o).norm())
                    .fold(f64::INFINITY, f64::min)
            };
            let err = |method: Method, order: usize| match solve_with(
                &p,
                method,
                t,
                order,
                &spec.tolerances,
            ) {
                Ok(s) if s.converged || method == Method::Rs => Cell::Value(distance(s.mu)),
                Ok(_) => Cell::Failure("NotConverged".into()),
                Err(e) => Cell::Failure(e.name().into()),
            };
            rows.push(CompareRow {
                j: j + 1,
                scale,
                oracle: oracle.iter().copied().map(cx).collect(),
                rs1: err(Method::Rs, 1),
                rs2: err(Method::Rs, 2),
                wb1: err(Method::Wb, 1),
                wb2: err(Method::Wb, 2),
            });
        }
    }
    let mut fits = Vec::new();
    for &j in &spec.targets {
        let mine: Vec<&CompareRow> = rows.iter().filter(|r| r.j == j + 1).collect();
        let columns: [(&str, fn(&CompareRow) -> &Cell); 4] = [
            ("rs1", |r| &r.rs1),
            ("rs2", |r| &r.rs2),
            ("wb1", |r| &r.wb1),
            ("wb2", |r| &r.wb2),
        ];
        for (name, get) in columns {
            let pts: Vec<(f64, f64)> = mine
                .iter()
                .filter_map(|r| match get(r) {
                    Cell::Value(e) => Some((r.scale, *e)),
                    Cell::Failure(_) => None,
                })
                .collect();
            fits.push(Fit {
                j: j + 1,
                column: name.to_string(),
                exponent: fit_exponent(&pts),
            });
        }
    }
    Ok(CompareReport { rows, fits })
}

pub fn cmd_compare(spec: &ProblemSpec, format: Format) -> Result<Output> {
    let report = compare_report(spec)?;
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("j,scale,rs1,rs2,wb1,wb2\n");
            for r in &report.rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.j,
                    num(r.scale),
                    r.rs1,
                    r.rs2,
                    r.wb1,
                    r.wb2
                ));
            }
            for j in &spec.targets {
                let e: Vec<String> = report
                    .fits
                    .iter()
                    .filter(|f| f.j == j + 1)
                    .map(|f| opt(f.exponent))
                    .collect();
                s.push_str(&format!("{},fit,{}\n", j + 1, e.join(",")));
            }
            s
        }
    };
    Ok(Output {
        text,
        failed: false,
    })
}

// -------------------------------------------------------------------- check

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    pub error: Option<String>,
}

fn check(name: &str, value: floquet_core::Result<f64>, threshold: f64) -> Check {
    match value {
        Ok(v) => Check {
            name: name.into(),
            value: Some(v),
            threshold,
            pass: v <= threshold,
            error: None,
        },
        Err(e) => Check {
            name: name.into(),
            value: None,
            threshold,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Largest distance from a multiplier `exp(-mu T)` to the nearest oracle
/// multiplier, relative to its size.
pub fn multiplier_mismatch(mus: &[Complex64], oracle: &[Complex64], period: f64) -> f64 {
    mus.iter()
        .map(|mu| {
            let rho = (-mu * period).exp();
            oracle
                .iter()
                .map(|r| (rho - r).norm() / r.norm().max(1.0))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// The invariant suite: basis biorthogonality and residuals, cutoff
/// stability, agreement with the monodromy oracle, the Floquet identity and,
/// when the spec drives the system, the ODE residual.
pub fn check_report(spec: &ProblemSpec) -> Result<Vec<Check>> {
    let split = spec.splitting()?;
    let p = build_problem(spec, &split)?;
    let basis = p.basis();
    let kmax = spec.cutoff.min(3) as i64;
    let mut checks = vec![
        check("biorthogonality", basis.biorthogonality_error(kmax), 1e-9),
        check(
            "basis_eigen_residual",
            Ok((0..spec.n)
                .flat_map(|j| (-kmax..=kmax).map(move |k| BasisIndex { j, k }))
                .map(|idx| basis.eigen_residual(idx, 512))
                .fold(0.0, f64::max)),
            1e-7,
        ),
    ];
    let direct: floquet_core::Result<Vec<PerturbationSolution>> =
        (0..spec.n).map(|j| direct_eigensolve(&p, k0(j))).collect();
    checks.push(check(
        "cutoff_stability",
        direct
            .as_ref()
            .map(|s| s.iter().map(|x| x.cutoff_shift).fold(0.0, f64::max))
            .map_err(Clone::clone),
        10.0 * spec.tolerances.cutoff,
    ));
    let period = 2.0 * PI / spec.omega;
    let full = split.full()?;
    checks.push(check(
        "monodromy_consistency",
        direct.as_ref().map_err(Clone::clone).and_then(|s| {
            let mono = monodromy_decompose(&full, DEFAULT_STEPS)?;
            let mus: Vec<Complex64> = s.iter().map(|x| x.mu).collect();
            Ok(multiplier_mismatch(&mus, &mono.multipliers, period))
        }),
        1e-6,
    ));
    let fm = fundamental(spec, &p);
    let report: floquet_core::Result<FloquetReport> = fm
        .as_ref()
        .map(|f| ode::floquet_property_check(f, 64))
        .map_err(Clone::clone);
    checks.push(check(
        "floquet_identity",
        report.map(|r| r.semigroup_deviation),
        1e-6,
    ));
    if spec.forcing.is_some() || spec.y0.is_some() {
        let residual = solve_report(spec)
            .map(|r| r.residual_max)
            .map_err(|e| match e {
                CliError::Numerical(e) => e,
                other => floquet_core::Error::InvalidArgument(other.to_string()),
            });
        checks.push(check("solve_residual", residual, spec.tolerances.residual));
    }
    Ok(checks)
}

pub fn cmd_check(spec: &ProblemSpec, format: Format) -> Result<Output> {
    let checks = check_report(spec)?;
    let failed = checks.iter().any(|c| !c.pass);
    let text = match format {
        Format::Json => json(&checks),
        Format::Csv => {
            let mut s = String::from("check,value,threshold,pass,error\n");
            for c in &checks {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.name,
                    opt(c.value),
                    num(c.threshold),
                    c.pass,
                    cell(c.error.as_deref().unwrap_or(""))
                ));
            }
            s
        }
    };
    Ok(Output { text, failed })
}
