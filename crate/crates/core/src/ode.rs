//! Fundamental matrices assembled from Floquet modes and the
//! variation-of-constants solution of the driven system
//! `y' = a(t) y + f(t)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::{mode_matrix, FloquetBasis};
use crate::linalg::{self, CMatrix, CVector};
use crate::perturb::{PerturbationProblem, PerturbationSolution};
use crate::series::{PeriodicMatrixSeries, PeriodicVectorSeries};

/// `U(t) = Psi(t) diag(exp(-mu_l t)) C` with `C = Psi(0)^-1`, so `U(0) = I`.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    exponents: Vec<Complex64>,
    shapes: Vec<PeriodicVectorSeries>,
    duals: Option<Vec<PeriodicVectorSeries>>,
    connection: CMatrix,
    connection_inv: CMatrix,
    omega: f64,
}

impl FundamentalMatrix {
    /// `duals`, when given, must be the rows of `Psi(t)^-1` as series; they
    /// provide an alternative route to `U(t)^-1`.
    pub fn assemble(
        modes: Vec<(Complex64, PeriodicVectorSeries)>,
        duals: Option<Vec<PeriodicVectorSeries>>,
    ) -> Result<Self> {
        let n = modes.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no modes".into()));
        }
        let omega = modes[0].1.omega();
        for (_, s) in &modes {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.dim(),
                });
            }
        }
        if let Some(d) = &duals {
            if d.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d.len(),
                });
            }
        }
        let (exponents, shapes): (Vec<_>, Vec<_>) = modes.into_iter().unzip();
        let refs: Vec<&PeriodicVectorSeries> = shapes.iter().collect();
        let psi0 = mode_matrix(&refs, 0.0);
        let connection = linalg::inverse(&psi0).ok_or(Error::SingularBasis { t: 0.0 })?;
        if linalg::condition_number(&psi0) > 1e12 {
            return Err(Error::SingularBasis { t: 0.0 });
        }
        Ok(Self {
            exponents,
            shapes,
            duals,
            connection,
            connection_inv: psi0,
            omega,
        })
    }

    /// Unperturbed fundamental matrix of `y' = a0(t) y`.
    pub fn from_basis(basis: &FloquetBasis) -> Result<Self> {
        let modes = basis
            .modes
            .iter()
            .map(|m| (m.exponent, m.shape.clone()))
            .collect();
        Self::assemble(modes, Some(basis.duals.clone()))
    }

    /// Fundamental matrix of the perturbed system from one solution per mode,
    /// `psi^(j) = F(mu_j)|j0>`.
    pub fn from_solutions(
        problem: &PerturbationProblem,
        solutions: &[PerturbationSolution],
    ) -> Result<Self> {
        let modes = solutions
            .iter()
            .map(|s| Ok((s.mu, problem.eigenfunction(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(modes, None)
    }

    pub fn dim(&self) -> usize {
        self.shapes.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn exponents(&self) -> &[Complex64] {
        &self.exponents
    }

    pub fn shapes(&self) -> &[PeriodicVectorSeries] {
        &self.shapes
    }

    pub fn connection(&self) -> &CMatrix {
        &self.connection
    }

    fn psi(&self, t: f64) -> CMatrix {
        let refs: Vec<&PeriodicVectorSeries> = self.shapes.iter().collect();
        mode_matrix(&refs, t)
    }

    fn decay(&self, t: f64, sign: f64) -> CMatrix {
        let d = CVector::from_iterator(
            self.dim(),
            self.exponents.iter().map(|mu| (-mu * t * sign).exp()),
        );
        CMatrix::from_diagonal(&d)
    }

    pub fn eval(&self, t: f64) -> CMatrix {
        self.psi(t) * self.decay(t, 1.0) * &self.connection
    }

    pub fn monodromy(&self) -> CMatrix {
        self.eval(self.period())
    }

    /// `U(t)^-1`, from a direct LU of `U(t)` or from
    /// `C^-1 diag(exp(mu t)) Psi(t)^-1`, whichever factor is better
    /// conditioned.
    pub fn inverse_at(&self, t: f64) -> Result<CMatrix> {
        let u = self.eval(t);
        let psi = self.psi(t);
        let cond_u = linalg::condition_number(&u);
        let cond_psi = linalg::condition_number(&psi);
        let inv = if cond_psi < cond_u {
            let psi_inv = match &self.duals {
                Some(d) => {
                    let mut m = CMatrix::zeros(self.dim(), self.dim());
                    for (j, row) in d.iter().enumerate() {
                        m.set_row(j, &row.eval(t).transpose());
                    }
                    Some(m)
                }
                None => linalg::inverse(&psi),
            };
            psi_inv.map(|pi| &self.connection_inv * self.decay(t, -1.0) * pi)
        } else {
            linalg::inverse(&u)
        };
        inv.ok_or(Error::SingularFundamental { t })
    }

    /// Replaces `(mu_l, psi_l)` by `(mu_l + i m omega, exp(i m omega t) psi_l)`.
    pub fn gauge_shifted(&self, l: usize, m: i64) -> Self {
        let mut out = self.clone();
        out.exponents[l] += Complex64::new(0.0, m as f64 * self.omega);
        out.shapes[l] = self.shapes[l].shifted(m);
        out.duals = None;
        out
    }

    /// Shifts an exponent by `i m omega` without touching its shape.
    pub fn with_exponent_shift(&self, l: usize, m: i64) -> Self {
        let mut out = self.clone();
        out.exponents[l] += Complex64::new(0.0, m as f64 * self.omega);
        out
    }
}

/// `points + 1` equispaced times on `[0, t_end]`.
pub fn time_grid(t_end: f64, points: usize) -> Vec<f64> {
    (0..=points)
        .map(|i| t_end * i as f64 / points as f64)
        .collect()
}

/// `y(t_i) = U(t_i) y0`.
pub fn solve_homogeneous(fm: &FundamentalMatrix, y0: &CVector, grid: &[f64]) -> Vec<CVector> {
    grid.iter().map(|&t| fm.eval(t) * y0).collect()
}

#[derive(Debug, Clone)]
pub enum Forcing {
    Zero,
    Periodic(PeriodicVectorSeries),
    /// Values on the solution grid.
    Sampled(Vec<CVector>),
}

impl Forcing {
    fn values(&self, grid: &[f64], n: usize) -> Result<Vec<CVector>> {
        match self {
            Forcing::Zero => Ok(vec![CVector::zeros(n); grid.len()]),
            Forcing::Periodic(f) => {
                if f.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: f.dim(),
                    });
                }
                Ok(grid.iter().map(|&t| f.eval(t)).collect())
            }
            Forcing::Sampled(v) => {
                if v.len() != grid.len() {
                    return Err(Error::InvalidArgument(format!(
                        "forcing has {} samples for a grid of {}",
                        v.len(),
                        grid.len()
                    )));
                }
                if let Some(bad) = v.iter().find(|x| x.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: bad.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct InhomogeneousSolution {
    pub t_grid: Vec<f64>,
    pub y_values: Vec<CVector>,
    pub y0: CVector,
    /// Max of `|y' - a y - f|` over interior points, `y'` by fourth-order
    /// centred differences.
    pub residual_max: f64,
}

fn check_grid(grid: &[f64]) -> Result<f64> {
    if grid.len() < 5 {
        return Err(Error::InvalidArgument(
            "grid needs at least 5 points".into(),
        ));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidArgument("grid must start at t = 0".into()));
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("grid must be increasing".into()));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::InvalidArgument("grid must be equispaced".into()));
        }
    }
    Ok(h)
}

/// Cumulative integral of equispaced samples: Simpson pairs at even nodes and
/// the matching third-order panel rule at odd nodes.
fn cumulative_simpson(values: &[CVector], h: f64) -> Vec<CVector> {
    let n = values[0].len();
    let mut out = vec![CVector::zeros(n); values.len()];
    let last = values.len() - 1;
    for i in 1..=last {
        if i % 2 == 0 {
            out[i] = &out[i - 2]
                + (&values[i - 2] + &values[i - 1] * c4() + &values[i])
                    * Complex64::new(h / 3.0, 0.0);
        } else if i < last {
            let panel = &values[i - 1] * Complex64::new(5.0, 0.0)
                + &values[i] * Complex64::new(8.0, 0.0)
                - &values[i + 1];
            out[i] = &out[i - 1] + panel * Complex64::new(h / 12.0, 0.0);
        } else {
            let panel = -&values[i - 2]
                + &values[i - 1] * Complex64::new(8.0, 0.0)
                + &values[i] * Complex64::new(5.0, 0.0);
            out[i] = &out[i - 1] + panel * Complex64::new(h / 12.0, 0.0);
        }
    }
    out
}

fn c4() -> Complex64 {
    Complex64::new(4.0, 0.0)
}

/// `y(t) = U(t) y0 + U(t) int_0^t U(s)^-1 f(s) ds`. The residual is measured
/// against the generator `a`.
pub fn solve_inhomogeneous(
    fm: &FundamentalMatrix,
    a: &PeriodicMatrixSeries,
    forcing: &Forcing,
    y0: &CVector,
    grid: &[f64],
) -> Result<InhomogeneousSolution> {
    let n = fm.dim();
    if y0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y0.len(),
        });
    }
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.dim(),
        });
    }
    let h = check_grid(grid)?;
    let f = forcing.values(grid, n)?;
    let us: Vec<CMatrix> = grid.iter().map(|&t| fm.eval(t)).collect();
    let integrand = grid
        .iter()
        .zip(&f)
        .map(|(&t, ft)| Ok(fm.inverse_at(t)? * ft))
        .collect::<Result<Vec<CVector>>>()?;
    let integral = cumulative_simpson(&integrand, h);
    let mut y_values: Vec<CVector> = us
        .iter()
        .zip(&integral)
        .map(|(u, i)| u * (y0 + i))
        .collect();
    y_values[0] = y0.clone();

    let mut residual_max: f64 = 0.0;
    for i in 2..grid.len() - 2 {
        let d = (&y_values[i - 2] - &y_values[i - 1] * Complex64::new(8.0, 0.0)
            + &y_values[i + 1] * Complex64::new(8.0, 0.0)
            - &y_values[i + 2])
            * Complex64::new(1.0 / (12.0 * h), 0.0);
        let r = d - a.eval(grid[i]) * &y_values[i] - &f[i];
        residual_max = residual_max.max(r.norm());
    }
    Ok(InhomogeneousSolution {
        t_grid: grid.to_vec(),
        y_values,
        y0: y0.clone(),
        residual_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetReport {
    /// `max_t ||U(t + T) - U(t) U(T)||`.
    pub semigroup_deviation: f64,
    /// `max_t ||Psi(t + T) - Psi(t)||`.
    pub periodicity_deviation: f64,
    /// Largest 2-norm condition number of `U(t)` on the grid.
    pub max_condition: f64,
}

/// Checks the Floquet identity on `points` equispaced times in `[0, T)`.
pub fn floquet_property_check(fm: &FundamentalMatrix, points: usize) -> FloquetReport {
    let period = fm.period();
    let ut = fm.monodromy();
    let mut report = FloquetReport {
        semigroup_deviation: 0.0,
        periodicity_deviation: 0.0,
        max_condition: 0.0,
    };
    for i in 0..points {
        let t = period * i as f64 / points as f64;
        let u = fm.eval(t);
        let lhs = fm.eval(t + period);
        report.semigroup_deviation = report.semigroup_deviation.max((lhs - &u * &ut).norm());
        report.periodicity_deviation = report
            .periodicity_deviation
            .max((fm.psi(t + period) - fm.psi(t)).norm());
        report.max_condition = report.max_condition.max(linalg::condition_number(&u));
    }
    report
}
