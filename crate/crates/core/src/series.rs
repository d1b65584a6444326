//! Truncated Fourier series of T-periodic complex scalar, vector and matrix
//! functions: `A(t) = sum_{|m| <= K} C_m exp(i m omega t)`.

use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Default fraction of sampled power allowed beyond the retained harmonics.
pub const DEFAULT_ALIASING_THRESHOLD: f64 = 1e-8;

/// Coefficient types a Fourier series can carry.
pub trait Coefficient: Clone + Debug + PartialEq {
    fn zeros_like(&self) -> Self;
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: Complex64, x: &Self);
    fn norm_sqr(&self) -> f64;
    fn max_abs(&self) -> f64;
    /// Leading dimension (`n` of an n-vector or n x n matrix, 1 for scalars).
    fn dim(&self) -> usize;
    fn shape(&self) -> (usize, usize);
}

impl Coefficient for Complex64 {
    fn zeros_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        *self += alpha * x;
    }
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
    fn dim(&self) -> usize {
        1
    }
    fn shape(&self) -> (usize, usize) {
        (1, 1)
    }
}

impl Coefficient for CVector {
    fn zeros_like(&self) -> Self {
        CVector::zeros(self.len())
    }
    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        self.axpy(alpha, x, Complex64::new(1.0, 0.0));
    }
    fn norm_sqr(&self) -> f64 {
        self.norm_squared()
    }
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
    fn dim(&self) -> usize {
        self.len()
    }
    fn shape(&self) -> (usize, usize) {
        (self.len(), 1)
    }
}

impl Coefficient for CMatrix {
    fn zeros_like(&self) -> Self {
        CMatrix::zeros(self.nrows(), self.ncols())
    }
    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        self.zip_apply(x, |a, b| *a += alpha * b);
    }
    fn norm_sqr(&self) -> f64 {
        self.norm_squared()
    }
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn shape(&self) -> (usize, usize) {
        self.shape()
    }
}

/// Coefficients that an n x n matrix coefficient can multiply from the left.
pub trait LeftMul: Coefficient {
    fn left_mul(m: &CMatrix, x: &Self) -> Self;
}

impl LeftMul for CVector {
    fn left_mul(m: &CMatrix, x: &Self) -> Self {
        m * x
    }
}

impl LeftMul for CMatrix {
    fn left_mul(m: &CMatrix, x: &Self) -> Self {
        m * x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<C> {
    omega: f64,
    cutoff: usize,
    /// `coeffs[m + cutoff]` holds harmonic `m`.
    coeffs: Vec<C>,
}

pub type PeriodicScalarSeries = FourierSeries<Complex64>;
pub type PeriodicVectorSeries = FourierSeries<CVector>;
pub type PeriodicMatrixSeries = FourierSeries<CMatrix>;

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "omega must be finite and positive, got {omega}"
        )))
    }
}

fn check_same_omega(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() <= 1e-14 * a.abs().max(b.abs()) {
        Ok(())
    } else {
        Err(Error::FrequencyMismatch { left: a, right: b })
    }
}

impl<C: Coefficient> FourierSeries<C> {
    /// Dense constructor; `coeffs` must have odd length `2K + 1`.
    pub fn new(omega: f64, coeffs: Vec<C>) -> Result<Self> {
        check_omega(omega)?;
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidArgument(format!(
                "expected 2K+1 coefficients, got {}",
                coeffs.len()
            )));
        }
        let shape = coeffs[0].shape();
        if shape.0 == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        for c in &coeffs {
            if c.shape() != shape {
                return Err(Error::DimensionMismatch {
                    expected: shape.0,
                    found: c.dim(),
                });
            }
        }
        Ok(Self {
            omega,
            cutoff: coeffs.len() / 2,
            coeffs,
        })
    }

    /// Sparse constructor. Harmonics absent from the list are zero; repeated
    /// indices accumulate. The cutoff is `max |m|` unless `cutoff` is larger.
    pub fn from_harmonics(
        omega: f64,
        zero: C,
        harmonics: impl IntoIterator<Item = (i64, C)>,
        cutoff: Option<usize>,
    ) -> Result<Self> {
        check_omega(omega)?;
        let list: Vec<(i64, C)> = harmonics.into_iter().collect();
        let needed = list
            .iter()
            .map(|(m, _)| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let k = match cutoff {
            Some(k) if k < needed => {
                return Err(Error::InvalidArgument(format!(
                    "harmonic {needed} exceeds cutoff {k}"
                )))
            }
            Some(k) => k,
            None => needed,
        };
        let mut coeffs = vec![zero.zeros_like(); 2 * k + 1];
        for (m, c) in list {
            if c.shape() != zero.shape() {
                return Err(Error::DimensionMismatch {
                    expected: zero.dim(),
                    found: c.dim(),
                });
            }
            coeffs[(m + k as i64) as usize].axpy(Complex64::new(1.0, 0.0), &c);
        }
        Self::new(omega, coeffs)
    }

    pub fn constant(omega: f64, value: C) -> Result<Self> {
        Self::new(omega, vec![value])
    }

    pub fn zeros(omega: f64, template: &C, cutoff: usize) -> Result<Self> {
        Self::new(omega, vec![template.zeros_like(); 2 * cutoff + 1])
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    pub fn coeff(&self, m: i64) -> Option<&C> {
        if m.unsigned_abs() as usize > self.cutoff {
            None
        } else {
            Some(&self.coeffs[(m + self.cutoff as i64) as usize])
        }
    }

    pub fn coeff_mut(&mut self, m: i64) -> Option<&mut C> {
        if m.unsigned_abs() as usize > self.cutoff {
            None
        } else {
            Some(&mut self.coeffs[(m + self.cutoff as i64) as usize])
        }
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (i64, &C)> {
        let k = self.cutoff as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 - k, c))
    }

    /// Largest `|m|` whose coefficient is not exactly zero.
    pub fn bandwidth(&self) -> usize {
        self.harmonics()
            .filter(|(_, c)| c.max_abs() > 0.0)
            .map(|(m, _)| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.bandwidth() == 0
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: f64) -> C {
        let mut out = self.coeffs[0].zeros_like();
        for (m, c) in self.harmonics() {
            let phase = m as f64 * self.omega * t;
            out.axpy(Complex64::from_polar(1.0, phase), c);
        }
        out
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            let src = c.clone();
            *c = c.zeros_like();
            c.axpy(alpha, &src);
        }
        out
    }

    /// `self + alpha * other`; the cutoff is the larger of the two.
    pub fn add_scaled(&self, alpha: Complex64, other: &Self) -> Result<Self> {
        check_same_omega(self.omega, other.omega)?;
        if self.coeffs[0].shape() != other.coeffs[0].shape() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let k = self.cutoff.max(other.cutoff);
        let mut out = self.extended(k);
        for (m, c) in other.harmonics() {
            out.coeffs[(m + k as i64) as usize].axpy(alpha, c);
        }
        Ok(out)
    }

    /// Same function with a larger storage cutoff.
    pub fn extended(&self, cutoff: usize) -> Self {
        if cutoff <= self.cutoff {
            return self.clone();
        }
        let mut coeffs = vec![self.coeffs[0].zeros_like(); 2 * cutoff + 1];
        for (m, c) in self.harmonics() {
            coeffs[(m + cutoff as i64) as usize] = c.clone();
        }
        Self {
            omega: self.omega,
            cutoff,
            coeffs,
        }
    }

    /// Multiplies the function by `exp(i k omega t)`.
    pub fn shifted(&self, k: i64) -> Self {
        let new_cutoff = self.cutoff + k.unsigned_abs() as usize;
        let mut coeffs = vec![self.coeffs[0].zeros_like(); 2 * new_cutoff + 1];
        for (m, c) in self.harmonics() {
            coeffs[(m + k + new_cutoff as i64) as usize] = c.clone();
        }
        Self {
            omega: self.omega,
            cutoff: new_cutoff,
            coeffs,
        }
    }

    /// Drops harmonics beyond `cutoff`, reporting the discarded power.
    pub fn truncated(&self, cutoff: usize) -> Truncation<C> {
        if cutoff >= self.cutoff {
            return Truncation {
                series: self.extended(cutoff),
                discarded_power: 0.0,
            };
        }
        let mut discarded = 0.0;
        let mut coeffs = Vec::with_capacity(2 * cutoff + 1);
        for (m, c) in self.harmonics() {
            if m.unsigned_abs() as usize <= cutoff {
                coeffs.push(c.clone());
            } else {
                discarded += c.norm_sqr();
            }
        }
        Truncation {
            series: Self {
                omega: self.omega,
                cutoff,
                coeffs,
            },
            discarded_power: discarded,
        }
    }

    pub fn derivative(&self) -> Self {
        let mut out = self.clone();
        let k = self.cutoff as i64;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let factor = Complex64::new(0.0, (i as i64 - k) as f64 * self.omega);
            let src = c.clone();
            *c = c.zeros_like();
            c.axpy(factor, &src);
        }
        out
    }

    /// Sum of squared coefficient norms (mean power over one period).
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Truncation<C> {
    pub series: FourierSeries<C>,
    pub discarded_power: f64,
}

/// Result of sampling a periodic function and keeping `2K + 1` harmonics.
#[derive(Debug, Clone)]
pub struct Projection<C> {
    pub series: FourierSeries<C>,
    /// Fraction of the sampled power in DFT bins beyond the cutoff.
    pub discarded_fraction: f64,
    pub threshold: f64,
}

impl<C> Projection<C> {
    pub fn warning(&self) -> Option<Error> {
        (self.discarded_fraction > self.threshold).then_some(Error::Aliasing {
            fraction: self.discarded_fraction,
            cutoff: self.series.cutoff,
        })
    }

    /// Returns the series, or the aliasing warning as an error.
    pub fn checked(self) -> Result<FourierSeries<C>> {
        match self.warning() {
            Some(w) => Err(w),
            None => Ok(self.series),
        }
    }
}

/// Minimum sample count used by [`project`] for a given cutoff.
pub fn default_samples(cutoff: usize) -> usize {
    (4 * (2 * cutoff + 1)).max(32)
}

/// Discrete Fourier coefficients of `samples`, taken at `t_n = n T / N`.
pub fn project_samples<C: Coefficient>(
    samples: &[C],
    omega: f64,
    cutoff: usize,
    threshold: f64,
) -> Result<Projection<C>> {
    check_omega(omega)?;
    let n = samples.len();
    if n < 2 * (2 * cutoff + 1) {
        return Err(Error::InvalidArgument(format!(
            "{n} samples cannot resolve cutoff {cutoff}; need at least {}",
            2 * (2 * cutoff + 1)
        )));
    }
    let inv_n = 1.0 / n as f64;
    let total: f64 = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * inv_n;
    let mut coeffs = Vec::with_capacity(2 * cutoff + 1);
    for m in -(cutoff as i64)..=(cutoff as i64) {
        let mut acc = samples[0].zeros_like();
        for (idx, s) in samples.iter().enumerate() {
            // exp(-i m omega t_n) with omega t_n = 2 pi idx / N; reduce the
            // integer phase first to keep the argument small.
            let phase = -2.0 * PI * ((m * idx as i64).rem_euclid(n as i64)) as f64 * inv_n;
            acc.axpy(Complex64::from_polar(inv_n, phase), s);
        }
        coeffs.push(acc);
    }
    let series = FourierSeries::new(omega, coeffs)?;
    let kept = series.power();
    let discarded_fraction = if total > 0.0 {
        ((total - kept) / total).max(0.0)
    } else {
        0.0
    };
    Ok(Projection {
        series,
        discarded_fraction,
        threshold,
    })
}

/// Samples `sampler` on `samples` equispaced points of one period and keeps
/// harmonics `|m| <= cutoff`.
pub fn project<C: Coefficient>(
    sampler: impl Fn(f64) -> C,
    omega: f64,
    cutoff: usize,
    samples: Option<usize>,
) -> Result<Projection<C>> {
    check_omega(omega)?;
    let n = samples.unwrap_or_else(|| default_samples(cutoff));
    let period = 2.0 * PI / omega;
    let values: Vec<C> = (0..n)
        .map(|i| sampler(period * i as f64 / n as f64))
        .collect();
    let dim = values[0].shape();
    if values.iter().any(|v| v.shape() != dim) {
        return Err(Error::InvalidArgument("sampler changed shape".into()));
    }
    project_samples(&values, omega, cutoff, DEFAULT_ALIASING_THRESHOLD)
}

/// Coefficient-space product `a(t) b(t)`, cutoff `K_a + K_b`.
pub fn series_product<C: LeftMul>(
    a: &PeriodicMatrixSeries,
    b: &FourierSeries<C>,
) -> Result<FourierSeries<C>> {
    check_same_omega(a.omega, b.omega)?;
    if a.coeffs[0].ncols() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.coeffs[0].ncols(),
            found: b.dim(),
        });
    }
    let k = a.cutoff + b.cutoff;
    let mut coeffs: Vec<Option<C>> = vec![None; 2 * k + 1];
    for (ma, ca) in a.harmonics() {
        if ca.max_abs() == 0.0 {
            continue;
        }
        for (mb, cb) in b.harmonics() {
            let term = C::left_mul(ca, cb);
            let slot = &mut coeffs[(ma + mb + k as i64) as usize];
            match slot {
                Some(acc) => acc.axpy(Complex64::new(1.0, 0.0), &term),
                None => *slot = Some(term),
            }
        }
    }
    let zero = C::left_mul(&a.coeffs[0], &b.coeffs[0]).zeros_like();
    let coeffs = coeffs
        .into_iter()
        .map(|c| c.unwrap_or_else(|| zero.clone()))
        .collect();
    FourierSeries::new(a.omega, coeffs)
}

/// Pointwise unconjugated dot product `sum_j a_j(t) b_j(t)` as a scalar series.
pub fn bilinear_product(
    a: &PeriodicVectorSeries,
    b: &PeriodicVectorSeries,
) -> Result<PeriodicScalarSeries> {
    check_same_omega(a.omega, b.omega)?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let k = a.cutoff + b.cutoff;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
    for (ma, ca) in a.harmonics() {
        for (mb, cb) in b.harmonics() {
            coeffs[(ma + mb + k as i64) as usize] += ca.dot(cb);
        }
    }
    FourierSeries::new(a.omega, coeffs)
}

/// The bilinear pairing `(1/T) int_period sum_j phi_j(t) chi_j(t) dt`.
/// Neither argument is conjugated.
pub fn dual_pairing(
    phi_plus: &PeriodicVectorSeries,
    chi: &PeriodicVectorSeries,
) -> Result<Complex64> {
    check_same_omega(phi_plus.omega, chi.omega)?;
    if phi_plus.dim() != chi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi_plus.dim(),
            found: chi.dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in chi.harmonics() {
        if let Some(p) = phi_plus.coeff(-m) {
            acc += p.dot(c);
        }
    }
    Ok(acc)
}
