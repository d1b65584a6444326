//! Problem files: JSON text with explicit harmonic lists or a named template,
//! validated into a [`ProblemSpec`].

use std::collections::BTreeMap;

use floquet_core::linalg::{CMatrix, CVector};
use floquet_core::models::{self, Splitting};
use floquet_core::perturb::Method;
use floquet_core::series::{PeriodicMatrixSeries, PeriodicVectorSeries};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Limits that keep a hostile file from requesting absurd allocations.
pub const MAX_DIM: usize = 32;
pub const MAX_CUTOFF: usize = 256;
pub const MAX_SWEEP_POINTS: usize = 10_000;

type RawComplex = [f64; 2];
type RawMatrix = Vec<Vec<RawComplex>>;
type RawHarmonics = Vec<(i64, RawMatrix)>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    n: usize,
    omega: f64,
    #[serde(rename = "K", alias = "cutoff")]
    cutoff: usize,
    basis_cutoff: Option<usize>,
    a0: Option<RawHarmonics>,
    #[serde(rename = "V")]
    v: Option<RawHarmonics>,
    template: Option<RawTemplate>,
    forcing: Option<RawForcing>,
    y0: Option<Vec<RawComplex>>,
    method: Option<String>,
    order: Option<usize>,
    targets: Option<Vec<usize>>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    solve: SolveGrid,
    #[serde(default)]
    sweep: Vec<RawSweep>,
    scales: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    name: String,
    #[serde(default)]
    params: BTreeMap<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawForcing {
    Keyword(String),
    Harmonics(Vec<(i64, Vec<RawComplex>)>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    path: String,
    values: Option<Vec<f64>>,
    from: Option<f64>,
    to: Option<f64>,
    count: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Fixed-point tolerance of the self-consistent series.
    pub wb: f64,
    pub max_iter: usize,
    pub newton: bool,
    /// Allowed exponent move when the cutoff grows by 2.
    pub cutoff: f64,
    /// Gap below which two unperturbed exponents count as degenerate;
    /// defaults to `1e-3 * omega`.
    pub degeneracy: Option<f64>,
    /// `Re mu` below `-stability` marks a chart point unstable.
    pub stability: f64,
    /// Acceptable ODE residual of a driven solve.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            wb: 1e-12,
            max_iter: 500,
            newton: false,
            cutoff: 1e-10,
            degeneracy: None,
            stability: 1e-6,
            residual: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveGrid {
    pub periods: usize,
    pub points_per_period: usize,
}

impl Default for SolveGrid {
    fn default() -> Self {
        Self {
            periods: 3,
            points_per_period: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    One(Method),
    All,
}

impl MethodChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rs" => Some(Self::One(Method::Rs)),
            "wb" => Some(Self::One(Method::Wb)),
            "direct" => Some(Self::One(Method::Direct)),
            "all" => Some(Self::All),
            _ => None,
        }
    }

    pub fn methods(self) -> Vec<Method> {
        match self {
            Self::One(m) => vec![m],
            Self::All => vec![Method::Rs, Method::Wb, Method::Direct],
        }
    }

    /// The single method used when one set of modes is needed; `all` means
    /// the dense oracle.
    pub fn primary(self) -> Method {
        match self {
            Self::One(m) => m,
            Self::All => Method::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Mathieu,
    MeissnerSmoothed,
    Constant,
}

impl TemplateKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "mathieu" => Some(Self::Mathieu),
            "meissner-smoothed" => Some(Self::MeissnerSmoothed),
            "constant" => Some(Self::Constant),
            _ => None,
        }
    }

    fn dim(self, params: &BTreeMap<String, Param>) -> Option<usize> {
        match self {
            Self::Mathieu | Self::MeissnerSmoothed => Some(2),
            Self::Constant => match params.get("a0") {
                Some(Param::Matrix(m)) => Some(m.nrows()),
                _ => None,
            },
        }
    }

    fn scalar_params(self) -> &'static [&'static str] {
        match self {
            Self::Mathieu => &["delta", "eps"],
            Self::MeissnerSmoothed => &["delta", "eps", "harmonics"],
            Self::Constant => &[],
        }
    }

    fn matrix_params(self) -> &'static [&'static str] {
        match self {
            Self::Constant => &["a0", "V"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Number(f64),
    Matrix(CMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub kind: TemplateKind,
    pub params: BTreeMap<String, Param>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    A0,
    V,
}

/// A swept scalar: a template parameter, or the real part of one entry of
/// a harmonic matrix (`row`, `col` 0-based here, 1-based in the file).
#[derive(Debug, Clone, PartialEq)]
pub enum ParamPath {
    Template(String),
    Entry {
        which: Which,
        m: i64,
        row: usize,
        col: usize,
    },
}

impl std::fmt::Display for ParamPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamPath::Template(name) => write!(f, "params.{name}"),
            ParamPath::Entry { which, m, row, col } => {
                let w = match which {
                    Which::A0 => "a0",
                    Which::V => "V",
                };
                write!(f, "{w}:{m}:{}:{}", row + 1, col + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub path: ParamPath,
    pub values: Vec<f64>,
    /// Range sweeps can be re-gridded from the command line.
    pub range: Option<(f64, f64)>,
}

impl Sweep {
    pub fn regrid(&mut self, count: usize) {
        if let Some((from, to)) = self.range {
            self.values = linspace(from, to, count);
        }
    }
}

fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| (from * (last - i as f64) + to * i as f64) / last)
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub n: usize,
    pub omega: f64,
    pub cutoff: usize,
    pub basis_cutoff: usize,
    pub template: Option<Template>,
    pub a0: Vec<(i64, CMatrix)>,
    pub v: Vec<(i64, CMatrix)>,
    pub forcing: Option<Vec<(i64, CVector)>>,
    pub y0: Option<CVector>,
    pub method: MethodChoice,
    pub order: usize,
    /// 0-based mode indices `j`.
    pub targets: Vec<usize>,
    pub tolerances: Tolerances,
    pub solve: SolveGrid,
    pub sweep: Vec<Sweep>,
    pub scales: Vec<f64>,
}

/// Line of the first `"key"` found after the previous keys of `path`.
fn line_of(text: &str, path: &[&str]) -> usize {
    let mut pos = 0;
    for key in path {
        let needle = format!("\"{key}\"");
        match text[pos..].find(&needle) {
            Some(off) => pos += off,
            None => break,
        }
    }
    text[..pos].matches('\n').count() + 1
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn fail<T>(&self, path: &[&str], message: impl Into<String>) -> Result<T> {
        Err(CliError::Validation {
            line: line_of(self.text, path),
            field: path.join("."),
            message: message.into(),
        })
    }

    fn complex(&self, path: &[&str], z: RawComplex) -> Result<Complex64> {
        if !(z[0].is_finite() && z[1].is_finite()) {
            return self.fail(path, "contains a non-finite entry");
        }
        Ok(Complex64::new(z[0], z[1]))
    }

    fn matrix(&self, path: &[&str], n: usize, raw: &RawMatrix) -> Result<CMatrix> {
        if raw.len() != n || raw.iter().any(|r| r.len() != n) {
            let shape = raw
                .iter()
                .map(|r| r.len().to_string())
                .collect::<Vec<_>>()
                .join(",");
            return self.fail(
                path,
                format!("must be a {n}x{n} matrix, got rows of length [{shape}]"),
            );
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in raw.iter().enumerate() {
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = self.complex(path, z)?;
            }
        }
        Ok(m)
    }

    fn harmonics(
        &self,
        key: &str,
        n: usize,
        cutoff: usize,
        raw: &RawHarmonics,
    ) -> Result<Vec<(i64, CMatrix)>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(raw.len());
        for (m, mat) in raw {
            if m.unsigned_abs() > cutoff as u64 {
                return self.fail(
                    &[key],
                    format!("harmonic {m} exceeds the declared cutoff K = {cutoff}"),
                );
            }
            if !seen.insert(*m) {
                return self.fail(&[key], format!("harmonic {m} is listed twice"));
            }
            out.push((*m, self.matrix(&[key], n, mat)?));
        }
        Ok(out)
    }

    fn template(&self, raw: &RawTemplate) -> Result<Template> {
        let path = ["template", "name"];
        let Some(kind) = TemplateKind::parse(&raw.name) else {
            return self.fail(
                &path,
                format!(
                    "unknown template `{}` (expected mathieu, meissner-smoothed or constant)",
                    raw.name
                ),
            );
        };
        let mut params = BTreeMap::new();
        for (name, value) in &raw.params {
            let ppath = ["template", "params", name.as_str()];
            let param = if kind.scalar_params().contains(&name.as_str()) {
                match value.as_f64() {
                    Some(x) if x.is_finite() => Param::Number(x),
                    _ => return self.fail(&ppath, "must be a finite number"),
                }
            } else if kind.matrix_params().contains(&name.as_str()) {
                let Ok(raw_m) = RawMatrix::deserialize(value) else {
                    return self.fail(&ppath, "must be a matrix of [re, im] pairs");
                };
                let n = raw_m.len();
                if n == 0 || n > MAX_DIM {
                    return self.fail(&ppath, format!("dimension must be in 1..={MAX_DIM}"));
                }
                Param::Matrix(self.matrix(&ppath, n, &raw_m)?)
            } else {
                return self.fail(
                    &ppath,
                    format!("is not a parameter of template `{}`", raw.name),
                );
            };
            params.insert(name.clone(), param);
        }
        let required: &[&str] = match kind {
            TemplateKind::Mathieu | TemplateKind::MeissnerSmoothed => &["delta"],
            TemplateKind::Constant => &["a0", "V"],
        };
        for r in required {
            if !params.contains_key(*r) {
                return self.fail(&["template", "params"], format!("is missing `{r}`"));
            }
        }
        if let Some(Param::Number(h)) = params.get("harmonics") {
            if *h < 1.0 || h.fract() != 0.0 || *h > MAX_CUTOFF as f64 {
                return self.fail(
                    &["template", "params", "harmonics"],
                    format!("must be an integer in 1..={MAX_CUTOFF}"),
                );
            }
        }
        if let (Some(Param::Matrix(a)), Some(Param::Matrix(v))) =
            (params.get("a0"), params.get("V"))
        {
            if a.nrows() != v.nrows() {
                return self.fail(
                    &["template", "params", "V"],
                    "must have the same dimension as `a0`",
                );
            }
        }
        Ok(Template { kind, params })
    }

    fn path(&self, s: &str, template: Option<&Template>, spec: &ProblemSpec) -> Result<ParamPath> {
        let key = ["sweep", "path"];
        if let Some(name) = s.strip_prefix("params.") {
            let Some(t) = template else {
                return self.fail(&key, format!("`{s}` needs a template"));
            };
            if !t.kind.scalar_params().contains(&name) {
                return self.fail(
                    &key,
                    format!("`{name}` is not a scalar parameter of the template"),
                );
            }
            return Ok(ParamPath::Template(name.to_string()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let parsed = match parts.as_slice() {
            [w, m, r, c] => {
                let which = match *w {
                    "a0" => Some(Which::A0),
                    "V" => Some(Which::V),
                    _ => None,
                };
                match (
                    which,
                    m.parse::<i64>(),
                    r.parse::<usize>(),
                    c.parse::<usize>(),
                ) {
                    (Some(which), Ok(m), Ok(r), Ok(c)) => Some((which, m, r, c)),
                    _ => None,
                }
            }
            _ => None,
        };
        let Some((which, m, row, col)) = parsed else {
            return self.fail(
                &key,
                format!("`{s}` is neither `params.<name>` nor `a0|V:m:row:col`"),
            );
        };
        if row == 0 || col == 0 || row > spec.n || col > spec.n {
            return self.fail(
                &key,
                format!("`{s}` indexes outside a {n}x{n} matrix", n = spec.n),
            );
        }
        let list = match which {
            Which::A0 => &spec.a0,
            Which::V => &spec.v,
        };
        if !list.iter().any(|(mm, _)| *mm == m) {
            return self.fail(
                &key,
                format!("`{s}` refers to harmonic {m}, which is not listed"),
            );
        }
        Ok(ParamPath::Entry {
            which,
            m,
            row: row - 1,
            col: col - 1,
        })
    }
}

fn number(params: &BTreeMap<String, Param>, name: &str, default: f64) -> f64 {
    match params.get(name) {
        Some(Param::Number(x)) => *x,
        _ => default,
    }
}

fn matrix(params: &BTreeMap<String, Param>, name: &str) -> CMatrix {
    match params.get(name) {
        Some(Param::Matrix(m)) => m.clone(),
        _ => CMatrix::zeros(1, 1),
    }
}

fn split_harmonics(s: &PeriodicMatrixSeries) -> Vec<(i64, CMatrix)> {
    s.harmonics().map(|(m, c)| (m, c.clone())).collect()
}

/// Expands a template into `(a0, V)` harmonic lists.
pub fn expand_template(
    t: &Template,
    omega: f64,
) -> floquet_core::Result<(Vec<(i64, CMatrix)>, Vec<(i64, CMatrix)>)> {
    let p = &t.params;
    let split: Splitting = match t.kind {
        TemplateKind::Mathieu => {
            models::mathieu(number(p, "delta", 0.0), number(p, "eps", 0.0), omega)?
        }
        TemplateKind::MeissnerSmoothed => models::meissner_smoothed(
            number(p, "delta", 0.0),
            number(p, "eps", 0.0),
            omega,
            number(p, "harmonics", 15.0) as usize,
        )?,
        TemplateKind::Constant => models::constant(matrix(p, "a0"), matrix(p, "V"), omega)?,
    };
    Ok((split_harmonics(&split.a0), split_harmonics(&split.v)))
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let val = Validator { text };

    if !(raw.omega.is_finite() && raw.omega > 0.0) {
        return val.fail(
            &["omega"],
            format!("must be finite and positive, got {}", raw.omega),
        );
    }
    if raw.n == 0 || raw.n > MAX_DIM {
        return val.fail(&["n"], format!("must be in 1..={MAX_DIM}, got {}", raw.n));
    }
    if raw.cutoff > MAX_CUTOFF {
        return val.fail(
            &["K"],
            format!("must be at most {MAX_CUTOFF}, got {}", raw.cutoff),
        );
    }
    let n = raw.n;
    let cutoff = raw.cutoff;
    let basis_cutoff = raw.basis_cutoff.unwrap_or(cutoff.max(16));
    if basis_cutoff > MAX_CUTOFF {
        return val.fail(&["basis_cutoff"], format!("must be at most {MAX_CUTOFF}"));
    }

    let template = raw.template.as_ref().map(|t| val.template(t)).transpose()?;
    let (a0, v) = match (&template, &raw.a0, &raw.v) {
        (Some(t), None, None) => {
            if t.kind.dim(&t.params) != Some(n) {
                return val.fail(
                    &["n"],
                    format!(
                        "does not match the template dimension {:?}",
                        t.kind.dim(&t.params)
                    ),
                );
            }
            let (a0, v) = match expand_template(t, raw.omega) {
                Ok(x) => x,
                Err(e) => return val.fail(&["template"], e.to_string()),
            };
            for (key, list) in [("a0", &a0), ("V", &v)] {
                if let Some((m, _)) = list.iter().find(|(m, _)| m.unsigned_abs() > cutoff as u64) {
                    return val.fail(
                        &["template"],
                        format!(
                            "expands to {key} harmonic {m} beyond the declared cutoff K = {cutoff}"
                        ),
                    );
                }
            }
            (a0, v)
        }
        (Some(_), _, _) => {
            return val.fail(&["template"], "cannot be combined with explicit `a0`/`V`")
        }
        (None, Some(a0), v) => {
            let a0 = val.harmonics("a0", n, cutoff, a0)?;
            let v = match v {
                Some(v) => val.harmonics("V", n, cutoff, v)?,
                None => Vec::new(),
            };
            (a0, v)
        }
        (None, None, _) => return val.fail(&["a0"], "is required unless a template is given"),
    };
    if a0.is_empty() {
        return val.fail(&["a0"], "must list at least one harmonic");
    }

    let forcing = match &raw.forcing {
        None => None,
        Some(RawForcing::Keyword(k)) if k == "none" => None,
        Some(RawForcing::Keyword(k)) => {
            return val.fail(
                &["forcing"],
                format!("must be \"none\" or a harmonic list, got \"{k}\""),
            )
        }
        Some(RawForcing::Harmonics(list)) => {
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::new();
            for (m, vec) in list {
                if m.unsigned_abs() > cutoff as u64 {
                    return val.fail(
                        &["forcing"],
                        format!("harmonic {m} exceeds the declared cutoff K = {cutoff}"),
                    );
                }
                if !seen.insert(*m) {
                    return val.fail(&["forcing"], format!("harmonic {m} is listed twice"));
                }
                if vec.len() != n {
                    return val.fail(&["forcing"], format!("vectors must have length {n}"));
                }
                let entries = vec
                    .iter()
                    .map(|&z| val.complex(&["forcing"], z))
                    .collect::<Result<Vec<_>>>()?;
                out.push((*m, CVector::from_vec(entries)));
            }
            Some(out)
        }
    };
    let y0 = match &raw.y0 {
        None => None,
        Some(y) if y.len() != n => return val.fail(&["y0"], format!("must have length {n}")),
        Some(y) => Some(CVector::from_vec(
            y.iter()
                .map(|&z| val.complex(&["y0"], z))
                .collect::<Result<Vec<_>>>()?,
        )),
    };

    let method = match &raw.method {
        None => MethodChoice::All,
        Some(s) => match MethodChoice::parse(s) {
            Some(m) => m,
            None => {
                return val.fail(
                    &["method"],
                    format!("must be rs, wb, direct or all, got `{s}`"),
                )
            }
        },
    };
    let order = raw.order.unwrap_or(2);
    if order != 1 && order != 2 {
        return val.fail(&["order"], format!("must be 1 or 2, got {order}"));
    }
    let targets = match &raw.targets {
        None => (0..n).collect(),
        Some(t) if t.is_empty() => return val.fail(&["targets"], "must not be empty"),
        Some(t) => {
            if let Some(bad) = t.iter().find(|&&j| j == 0 || j > n) {
                return val.fail(&["targets"], format!("mode {bad} is outside 1..={n}"));
            }
            t.iter().map(|j| j - 1).collect()
        }
    };

    let tol = raw.tolerances;
    for (name, x) in [
        ("wb", tol.wb),
        ("cutoff", tol.cutoff),
        ("stability", tol.stability),
        ("residual", tol.residual),
    ] {
        if !(x.is_finite() && x > 0.0) {
            return val.fail(&["tolerances", name], "must be finite and positive");
        }
    }
    if let Some(d) = tol.degeneracy {
        if !(d.is_finite() && d >= 0.0) {
            return val.fail(
                &["tolerances", "degeneracy"],
                "must be finite and non-negative",
            );
        }
    }
    if tol.max_iter == 0 {
        return val.fail(&["tolerances", "max_iter"], "must be positive");
    }
    let solve = raw.solve;
    if solve.periods == 0
        || solve.points_per_period < 4
        || solve.periods.saturating_mul(solve.points_per_period) > 1 << 20
    {
        return val.fail(
            &["solve"],
            "needs periods >= 1, points_per_period >= 4 and at most 2^20 points in total",
        );
    }

    let scales = raw.scales.clone().unwrap_or_else(|| vec![0.01, 0.02, 0.04]);
    if scales.is_empty() || scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return val.fail(&["scales"], "must be a non-empty list of positive numbers");
    }

    let mut spec = ProblemSpec {
        n,
        omega: raw.omega,
        cutoff,
        basis_cutoff,
        template,
        a0,
        v,
        forcing,
        y0,
        method,
        order,
        targets,
        tolerances: tol,
        solve,
        sweep: Vec::new(),
        scales,
    };

    if raw.sweep.len() > 2 {
        return val.fail(
            &["sweep"],
            format!("at most 2 swept scalars, got {}", raw.sweep.len()),
        );
    }
    let mut sweep = Vec::new();
    for s in &raw.sweep {
        let path = val.path(&s.path, spec.template.as_ref(), &spec)?;
        let (values, range) = match (&s.values, s.from, s.to, s.count) {
            (Some(v), None, None, None) => (v.clone(), None),
            (None, Some(from), Some(to), Some(count)) => {
                if !(from.is_finite() && to.is_finite()) || count == 0 || count > MAX_SWEEP_POINTS {
                    return val.fail(
                        &["sweep"],
                        format!("range needs finite bounds and a count in 1..={MAX_SWEEP_POINTS}"),
                    );
                }
                (linspace(from, to, count), Some((from, to)))
            }
            _ => {
                return val.fail(
                    &["sweep"],
                    "give either `values` or all of `from`, `to`, `count`",
                )
            }
        };
        if values.is_empty()
            || values.len() > MAX_SWEEP_POINTS
            || values.iter().any(|x| !x.is_finite())
        {
            return val.fail(
                &["sweep", "values"],
                format!("must hold 1..={MAX_SWEEP_POINTS} finite numbers"),
            );
        }
        sweep.push(Sweep {
            path,
            values,
            range,
        });
    }
    if sweep.len() == 2 && sweep[0].path == sweep[1].path {
        return val.fail(&["sweep"], "sweeps the same scalar twice");
    }
    spec.sweep = sweep;
    Ok(spec)
}

/// Decodes a standalone harmonic list `[[m, matrix], ...]` of `n x n`
/// matrices.
pub fn decode_harmonics(text: &str, n: usize, cutoff: usize) -> Result<Vec<(i64, CMatrix)>> {
    let raw: RawHarmonics = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Validator { text }.harmonics("harmonics", n, cutoff, &raw)
}

impl ProblemSpec {
    /// The splitting with the given swept scalars substituted.
    pub fn splitting_with(
        &self,
        overrides: &[(&ParamPath, f64)],
    ) -> floquet_core::Result<Splitting> {
        let (mut a0, mut v) = match &self.template {
            Some(t)
                if overrides
                    .iter()
                    .any(|(p, _)| matches!(p, ParamPath::Template(_))) =>
            {
                let mut t = t.clone();
                for (p, x) in overrides {
                    if let ParamPath::Template(name) = p {
                        if name == "harmonics"
                            && !(*x >= 1.0 && x.fract() == 0.0 && *x <= self.cutoff as f64)
                        {
                            return Err(floquet_core::Error::InvalidArgument(format!(
                                "harmonics must be an integer in 1..={}",
                                self.cutoff
                            )));
                        }
                        t.params.insert(name.clone(), Param::Number(*x));
                    }
                }
                expand_template(&t, self.omega)?
            }
            _ => (self.a0.clone(), self.v.clone()),
        };
        for (p, x) in overrides {
            if let ParamPath::Entry { which, m, row, col } = p {
                let list = match which {
                    Which::A0 => &mut a0,
                    Which::V => &mut v,
                };
                if let Some((_, mat)) = list.iter_mut().find(|(mm, _)| mm == m) {
                    mat[(*row, *col)].re = *x;
                }
            }
        }
        let zero = CMatrix::zeros(self.n, self.n);
        Ok(Splitting::new(
            PeriodicMatrixSeries::from_harmonics(self.omega, zero.clone(), a0, None)?,
            PeriodicMatrixSeries::from_harmonics(self.omega, zero, v, None)?,
        ))
    }

    pub fn splitting(&self) -> floquet_core::Result<Splitting> {
        self.splitting_with(&[])
    }

    pub fn forcing_series(&self) -> floquet_core::Result<Option<PeriodicVectorSeries>> {
        self.forcing
            .as_ref()
            .map(|list| {
                PeriodicVectorSeries::from_harmonics(
                    self.omega,
                    CVector::zeros(self.n),
                    list.clone(),
                    None,
                )
            })
            .transpose()
    }

    pub fn degeneracy_threshold(&self) -> f64 {
        self.tolerances.degeneracy.unwrap_or(1e-3 * self.omega)
    }
}
