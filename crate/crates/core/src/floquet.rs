//! The unperturbed problem `H0 = d/dt - a0(t)`: monodromy matrix, canonical
//! Floquet exponents, periodic mode shapes and the biorthogonal dual basis.
//!
//! Solutions are written `y(t) = phi(t) exp(-aleph t)` with `phi` periodic, so
//! a multiplier `rho` of the monodromy matrix corresponds to the exponent
//! `aleph = -ln(rho) / T`. Growth means `Re aleph < 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::series::{
    self, default_samples, dual_pairing, PeriodicMatrixSeries, PeriodicVectorSeries,
    DEFAULT_ALIASING_THRESHOLD,
};
use crate::BasisIndex;

pub const DEFAULT_STEPS: usize = 2048;
pub const DEFAULT_DEFECT_THRESHOLD: f64 = 1e8;

/// `U(t_i)` on the equispaced grid `t_i = i T / steps`, `i = 0..=steps`.
#[derive(Debug, Clone)]
pub struct FundamentalPath {
    pub times: Vec<f64>,
    pub values: Vec<CMatrix>,
}

impl FundamentalPath {
    pub fn monodromy(&self) -> &CMatrix {
        self.values.last().expect("path always holds U(0)")
    }
}

/// Classical RK4 for `U' = a(t) U`, `U(0) = I`, over one period.
pub fn integrate_fundamental(a: &PeriodicMatrixSeries, steps: usize) -> Result<FundamentalPath> {
    integrate_over(a, steps, a.period())
}

/// RK4 for `U' = a(t) U` on `[0, t_end]` with a fixed step count.
pub fn integrate_over(
    a: &PeriodicMatrixSeries,
    steps: usize,
    t_end: f64,
) -> Result<FundamentalPath> {
    if steps < 64 {
        return Err(Error::InvalidArgument(format!(
            "steps must be >= 64, got {steps}"
        )));
    }
    let n = a.dim();
    let h = t_end / steps as f64;
    let mut u = CMatrix::identity(n, n);
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(u.clone());
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    for i in 0..steps {
        let t = i as f64 * h;
        let a0 = a.eval(t);
        let am = a.eval(t + 0.5 * h);
        let a1 = a.eval(t + h);
        let k1 = &a0 * &u;
        let k2 = &am * (&u + &k1 * half);
        let k3 = &am * (&u + &k2 * half);
        let k4 = &a1 * (&u + &k3 * full);
        u += (k1 + (k2 + k3) * two + k4) * sixth;
        let t_next = (i + 1) as f64 * h;
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteState { t: t_next });
        }
        times.push(t_next);
        values.push(u.clone());
    }
    Ok(FundamentalPath { times, values })
}

/// Moves `z` by a multiple of `i omega` so that `Im z` lies in
/// `(-omega/2, omega/2]`. Returns the new value and the integer `s` with
/// `z_canonical = z - i s omega`.
pub fn canonical_exponent(z: Complex64, omega: f64) -> (Complex64, i64) {
    let s = ((z.im - 0.5 * omega) / omega).ceil();
    let mut im = z.im - s * omega;
    let mut s = s as i64;
    // Guard the half-open interval against round-off in the subtraction.
    if im <= -0.5 * omega {
        im += omega;
        s -= 1;
    } else if im > 0.5 * omega {
        im -= omega;
        s += 1;
    }
    (Complex64::new(z.re, im), s)
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub omega: f64,
    /// `U(T)`.
    pub monodromy: CMatrix,
    pub multipliers: Vec<Complex64>,
    /// Canonical exponents, `rho_j = exp(-aleph_j T)`.
    pub exponents: Vec<Complex64>,
    /// Unit-norm initial vectors `y0^(j)(0)` as columns.
    pub eigvecs: CMatrix,
    /// Condition number of `eigvecs`.
    pub condition: f64,
    /// Integer `s_j` with `aleph_j = aleph_j^raw - i s_j omega`, where
    /// `aleph_j^raw` is the principal-branch exponent.
    pub shifts: Vec<i64>,
}

impl MonodromyResult {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// Decomposes a monodromy matrix into multipliers and canonical exponents.
pub fn decompose_monodromy_matrix(
    monodromy: CMatrix,
    omega: f64,
    defect_threshold: f64,
) -> Result<MonodromyResult> {
    let period = 2.0 * PI / omega;
    let e = linalg::eig(&monodromy)?;
    if e.values.iter().any(|rho| rho.norm() == 0.0) {
        return Err(Error::InvalidArgument(
            "monodromy matrix is singular".into(),
        ));
    }
    let condition = linalg::condition_number(&e.vectors);
    if !(condition <= defect_threshold) {
        return Err(Error::DefectiveMonodromy { condition });
    }
    let (exponents, shifts) = e
        .values
        .iter()
        .map(|rho| canonical_exponent(-rho.ln() / period, omega))
        .unzip();
    Ok(MonodromyResult {
        omega,
        monodromy,
        multipliers: e.values,
        exponents,
        eigvecs: e.vectors,
        condition,
        shifts,
    })
}

/// Floquet decomposition of `y' = a(t) y`. Constant generators are handled
/// in closed form; otherwise `U(T)` comes from [`integrate_fundamental`].
pub fn monodromy_decompose(a: &PeriodicMatrixSeries, steps: usize) -> Result<MonodromyResult> {
    monodromy_decompose_with(a, steps, DEFAULT_DEFECT_THRESHOLD)
}

pub fn monodromy_decompose_with(
    a: &PeriodicMatrixSeries,
    steps: usize,
    defect_threshold: f64,
) -> Result<MonodromyResult> {
    let omega = a.omega();
    let period = a.period();
    if a.is_constant() {
        let gen = a.coeff(0).expect("harmonic 0 always stored");
        let e = linalg::eig(gen)?;
        let condition = linalg::condition_number(&e.vectors);
        if !(condition <= defect_threshold) {
            return Err(Error::DefectiveMonodromy { condition });
        }
        let multipliers: Vec<Complex64> = e.values.iter().map(|l| (l * period).exp()).collect();
        let (exponents, shifts) = e
            .values
            .iter()
            .map(|l| canonical_exponent(-l, omega))
            .unzip();
        let inv = linalg::inverse(&e.vectors).ok_or(Error::DefectiveMonodromy { condition })?;
        let diag = CMatrix::from_diagonal(&CVector::from_vec(multipliers.clone()));
        let monodromy = &e.vectors * diag * inv;
        return Ok(MonodromyResult {
            omega,
            monodromy,
            multipliers,
            exponents,
            eigvecs: e.vectors,
            condition,
            shifts,
        });
    }
    let path = integrate_fundamental(a, steps)?;
    decompose_monodromy_matrix(path.monodromy().clone(), omega, defect_threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMode {
    /// Zero-based mode index.
    pub j: usize,
    /// Canonical exponent `aleph_j`.
    pub exponent: Complex64,
    /// Periodic shape `phi^(j)(t)`.
    pub shape: PeriodicVectorSeries,
}

/// Scales a vector series so its largest-magnitude coefficient entry is 1.
fn normalize_shape(shape: &PeriodicVectorSeries) -> PeriodicVectorSeries {
    let mut best = Complex64::new(0.0, 0.0);
    for (_, c) in shape.harmonics() {
        for z in c.iter() {
            if z.norm() > best.norm() * (1.0 + 1e-12) {
                best = *z;
            }
        }
    }
    if best.norm() == 0.0 {
        shape.clone()
    } else {
        shape.scaled(best.inv())
    }
}

/// Periodic shapes `phi^(j)(t) = U(t) v_j exp(aleph_j t)` projected onto
/// harmonics `|m| <= cutoff`.
pub fn periodic_eigenvectors(
    a0: &PeriodicMatrixSeries,
    mono: &MonodromyResult,
    cutoff: usize,
    steps: usize,
) -> Result<Vec<FloquetMode>> {
    let n = a0.dim();
    let omega = a0.omega();
    let mut modes = Vec::with_capacity(n);
    if a0.is_constant() {
        for j in 0..n {
            let v: CVector = mono.eigvecs.column(j).into_owned();
            // U(t) v = exp(-aleph_raw t) v with aleph_raw = aleph + i s omega,
            // which leaves the single harmonic exp(-i s omega t).
            let s = mono.shifts[j];
            let width = cutoff.max(s.unsigned_abs() as usize);
            let shape = PeriodicVectorSeries::from_harmonics(
                omega,
                CVector::zeros(n),
                [(-s, v)],
                Some(width),
            )?;
            modes.push(FloquetMode {
                j,
                exponent: mono.exponents[j],
                shape: normalize_shape(&shape),
            });
        }
        return Ok(modes);
    }
    let path = integrate_fundamental(a0, steps)?;
    for j in 0..n {
        let v: CVector = mono.eigvecs.column(j).into_owned();
        let aleph = mono.exponents[j];
        let samples: Vec<CVector> = path.values[..steps]
            .iter()
            .zip(&path.times)
            .map(|(u, &t)| (u * &v) * (aleph * t).exp())
            .collect();
        let proj = series::project_samples(&samples, omega, cutoff, DEFAULT_ALIASING_THRESHOLD)?;
        let shape = proj.checked()?;
        modes.push(FloquetMode {
            j,
            exponent: aleph,
            shape: normalize_shape(&shape),
        });
    }
    Ok(modes)
}

/// Mode matrix `[phi^(1)(t) ... phi^(n)(t)]`.
pub fn mode_matrix(shapes: &[&PeriodicVectorSeries], t: f64) -> CMatrix {
    let n = shapes.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, s) in shapes.iter().enumerate() {
        m.set_column(j, &s.eval(t));
    }
    m
}

/// Rows of the pointwise inverse of the mode matrix, as periodic series.
pub fn build_dual_basis(modes: &[FloquetMode], cutoff: usize) -> Result<Vec<PeriodicVectorSeries>> {
    let n = modes.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no modes".into()));
    }
    let omega = modes[0].shape.omega();
    for m in modes {
        if m.shape.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.shape.dim(),
            });
        }
    }
    let shapes: Vec<&PeriodicVectorSeries> = modes.iter().map(|m| &m.shape).collect();
    let width = cutoff + shapes.iter().map(|s| s.bandwidth()).max().unwrap_or(0);
    let samples = 2 * default_samples(width);
    let period = 2.0 * PI / omega;
    let mut rows: Vec<Vec<CVector>> = vec![Vec::with_capacity(samples); n];
    for i in 0..samples {
        let t = period * i as f64 / samples as f64;
        let m = mode_matrix(&shapes, t);
        let inv = linalg::inverse(&m).ok_or(Error::SingularBasis { t })?;
        if linalg::max_abs(&inv) * linalg::max_abs(&m) > 1e12 {
            return Err(Error::SingularBasis { t });
        }
        for (j, row) in rows.iter_mut().enumerate() {
            row.push(inv.row(j).transpose());
        }
    }
    rows.iter()
        .map(|samples| {
            series::project_samples(samples, omega, cutoff, DEFAULT_ALIASING_THRESHOLD)?.checked()
        })
        .collect()
}

/// `aleph_jk = aleph_j + i k omega`.
pub fn basis_eigenvalue(idx: BasisIndex, modes: &[FloquetMode], omega: f64) -> Complex64 {
    modes[idx.j].exponent + Complex64::new(0.0, idx.k as f64 * omega)
}

#[derive(Debug, Clone, Copy)]
pub struct BasisOptions {
    /// Harmonic cutoff for mode shapes and duals.
    pub cutoff: usize,
    /// RK4 steps per period for non-constant generators.
    pub steps: usize,
    pub defect_threshold: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self {
            cutoff: 16,
            steps: DEFAULT_STEPS,
            defect_threshold: DEFAULT_DEFECT_THRESHOLD,
        }
    }
}

/// Periodic eigenbasis `|jk> = exp(i k omega t) phi^(j)(t)` of `H0` together
/// with its biorthogonal dual `<jk|`.
#[derive(Debug, Clone)]
pub struct FloquetBasis {
    generator: PeriodicMatrixSeries,
    pub modes: Vec<FloquetMode>,
    pub duals: Vec<PeriodicVectorSeries>,
    pub monodromy: MonodromyResult,
    pub cutoff: usize,
}

impl FloquetBasis {
    pub fn new(a0: &PeriodicMatrixSeries, opts: BasisOptions) -> Result<Self> {
        let monodromy = monodromy_decompose_with(a0, opts.steps, opts.defect_threshold)?;
        let mut modes = periodic_eigenvectors(a0, &monodromy, opts.cutoff, opts.steps)?;
        order_modes(&mut modes);
        let duals = build_dual_basis(&modes, opts.cutoff)?;
        Ok(Self {
            generator: a0.clone(),
            modes,
            duals,
            monodromy,
            cutoff: opts.cutoff,
        })
    }

    /// Builds a basis from explicit mode shapes and exponents.
    pub fn from_modes(
        a0: &PeriodicMatrixSeries,
        modes: Vec<FloquetMode>,
        cutoff: usize,
    ) -> Result<Self> {
        let monodromy = monodromy_decompose(a0, DEFAULT_STEPS)?;
        let duals = build_dual_basis(&modes, cutoff)?;
        Ok(Self {
            generator: a0.clone(),
            modes,
            duals,
            monodromy,
            cutoff,
        })
    }

    pub fn generator(&self) -> &PeriodicMatrixSeries {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn omega(&self) -> f64 {
        self.generator.omega()
    }

    pub fn eigenvalue(&self, idx: BasisIndex) -> Complex64 {
        basis_eigenvalue(idx, &self.modes, self.omega())
    }

    /// `phi_jk(t) = exp(i k omega t) phi^(j)(t)`.
    pub fn ket(&self, idx: BasisIndex) -> PeriodicVectorSeries {
        self.modes[idx.j].shape.shifted(idx.k)
    }

    /// `Phi^(+)_jk(t) = exp(-i k omega t) Phi^(+)j(t)`.
    pub fn bra(&self, idx: BasisIndex) -> PeriodicVectorSeries {
        self.duals[idx.j].shifted(-idx.k)
    }

    pub fn pairing(&self, row: BasisIndex, col: BasisIndex) -> Result<Complex64> {
        dual_pairing(&self.bra(row), &self.ket(col))
    }

    /// Max-abs deviation of `<jk|j'k'>` from the Kronecker delta over
    /// `|k|, |k'| <= kmax`.
    pub fn biorthogonality_error(&self, kmax: i64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let idx: Vec<BasisIndex> = (0..self.dim())
            .flat_map(|j| (-kmax..=kmax).map(move |k| BasisIndex { j, k }))
            .collect();
        for &r in &idx {
            for &c in &idx {
                let expect = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((self.pairing(r, c)? - expect).norm());
            }
        }
        Ok(worst)
    }

    /// Max over `points` grid times of `|(d/dt - a0 - aleph_jk) phi_jk(t)|`.
    pub fn eigen_residual(&self, idx: BasisIndex, points: usize) -> f64 {
        let ket = self.ket(idx);
        let deriv = ket.derivative();
        let aleph = self.eigenvalue(idx);
        let period = self.generator.period();
        (0..points)
            .map(|i| {
                let t = period * i as f64 / points as f64;
                let phi = ket.eval(t);
                let r = deriv.eval(t) - self.generator.eval(t) * &phi - &phi * aleph;
                r.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Deterministic ordering: dominant component of the shape, then exponent.
fn order_modes(modes: &mut [FloquetMode]) {
    let key = |m: &FloquetMode| {
        let mut best = (0usize, 0.0f64);
        for (_, c) in m.shape.harmonics() {
            for (i, z) in c.iter().enumerate() {
                if z.norm() > best.1 * (1.0 + 1e-9) {
                    best = (i, z.norm());
                }
            }
        }
        best.0
    };
    modes.sort_by(|a, b| {
        key(a)
            .cmp(&key(b))
            .then(a.exponent.im.total_cmp(&b.exponent.im))
            .then(a.exponent.re.total_cmp(&b.exponent.re))
    });
    for (j, m) in modes.iter_mut().enumerate() {
        m.j = j;
    }
}

/// Generates the mode shape in the `k`-shifted gauge.
pub fn gauge_shift(mode: &FloquetMode, k: i64) -> FloquetMode {
    FloquetMode {
        j: mode.j,
        exponent: mode.exponent + Complex64::new(0.0, k as f64 * mode.shape.omega()),
        shape: mode.shape.shifted(k),
    }
}
