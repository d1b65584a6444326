//! Ready-made splittings `a(t) = a0(t) - V(t)` for common periodic systems.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{c, CMatrix};
use crate::series::PeriodicMatrixSeries;

#[derive(Debug, Clone)]
pub struct Splitting {
    pub a0: PeriodicMatrixSeries,
    pub v: PeriodicMatrixSeries,
}

impl Splitting {
    pub fn new(a0: PeriodicMatrixSeries, v: PeriodicMatrixSeries) -> Self {
        Self { a0, v }
    }

    /// The full generator `a(t) = a0(t) - V(t)`.
    pub fn full(&self) -> Result<PeriodicMatrixSeries> {
        self.a0.add_scaled(c(-1.0, 0.0), &self.v)
    }

    /// Same `a0` with `V` scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a0: self.a0.clone(),
            v: self.v.scaled(c(s, 0.0)),
        }
    }
}

fn companion(delta: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(1.0, 0.0), c(-delta, 0.0), c(0.0, 0.0)],
    )
}

/// `y'' + (delta + eps cos(omega t)) y = 0` as `x = (y, y')`, with the
/// autonomous part as `a0` and the periodic drive as the perturbation.
pub fn mathieu(delta: f64, eps: f64, omega: f64) -> Result<Splitting> {
    let a0 = PeriodicMatrixSeries::constant(omega, companion(delta))?;
    let mut h = CMatrix::zeros(2, 2);
    h[(1, 0)] = c(0.5 * eps, 0.0);
    let v = PeriodicMatrixSeries::from_harmonics(
        omega,
        CMatrix::zeros(2, 2),
        [(1, h.clone()), (-1, h)],
        None,
    )?;
    Ok(Splitting { a0, v })
}

/// Meissner's equation `y'' + (delta + eps sgn cos(omega t)) y = 0` with the
/// square wave replaced by its odd harmonics up to `harmonics`, weighted by
/// Lanczos sigma factors to suppress Gibbs ringing.
pub fn meissner_smoothed(delta: f64, eps: f64, omega: f64, harmonics: usize) -> Result<Splitting> {
    let a0 = PeriodicMatrixSeries::constant(omega, companion(delta))?;
    let mut list = Vec::new();
    for m in (1..=harmonics).step_by(2) {
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let x = PI * m as f64 / (harmonics + 1) as f64;
        let sigma = x.sin() / x;
        // sgn cos = (4/pi) sum (-1)^((m-1)/2) cos(m t) / m; each cosine splits
        // into +/- m with half the weight.
        let amp = eps * sigma * sign * 2.0 / (PI * m as f64);
        let mut h = CMatrix::zeros(2, 2);
        h[(1, 0)] = c(amp, 0.0);
        list.push((m as i64, h.clone()));
        list.push((-(m as i64), h));
    }
    let v = PeriodicMatrixSeries::from_harmonics(omega, CMatrix::zeros(2, 2), list, None)?;
    Ok(Splitting { a0, v })
}

/// Constant `a0` and constant `V`.
pub fn constant(a0: CMatrix, v: CMatrix, omega: f64) -> Result<Splitting> {
    Ok(Splitting {
        a0: PeriodicMatrixSeries::constant(omega, a0)?,
        v: PeriodicMatrixSeries::constant(omega, v)?,
    })
}

/// Scalar `a(t) = a0 - eps cos(omega t)`; the exact exponent is `-a0`.
pub fn scalar_cosine(a0: Complex64, eps: f64, omega: f64) -> Result<Splitting> {
    let zero = CMatrix::zeros(1, 1);
    let h = CMatrix::from_element(1, 1, c(0.5 * eps, 0.0));
    Ok(Splitting {
        a0: PeriodicMatrixSeries::constant(omega, CMatrix::from_element(1, 1, a0))?,
        v: PeriodicMatrixSeries::from_harmonics(omega, zero, [(1, h.clone()), (-1, h)], None)?,
    })
}
