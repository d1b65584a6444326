//! Perturbation theory for `H = H0 + V` in the biorthogonal basis `|jk>`.
//!
//! The splitting follows `a(t) = a0(t) - V(t)`, so `H = d/dt - a(t)` picks up
//! `+V` as a multiplication operator. Matrix elements
//! `<jk|V|j'k'> = (1/T) int Phi+_jk(t) V(t) phi_j'k'(t) dt` depend on `k, k'`
//! only through `k - k'`; they are tabulated once as the Fourier
//! coefficients of `Phi+_j(t) V(t) phi_j'(t)`.
//!
//! Three solvers share the same element table:
//!
//! * [`rs_solve`] - Rayleigh-Schroedinger, unperturbed gaps in the denominators.
//! * [`wb_solve`] - Wigner-Brillouin, `mu - aleph_p` in the denominators,
//!   solved as a scalar fixed point.
//! * [`direct_eigensolve`] - dense eigensolve of the truncated operator.
//!
//! Series sums and truncated operators are taken over the window
//! `k' in [k - K, k + K]` centred on the target, which makes every solver
//! exactly covariant under the relabelling `(j, k) -> (j, k + m)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::FloquetBasis;
use crate::linalg::{self, CMatrix};
use crate::series::{
    bilinear_product, dual_pairing, series_product, PeriodicMatrixSeries, PeriodicScalarSeries,
    PeriodicVectorSeries,
};
use crate::BasisIndex;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative size below which a coupling counts as structurally zero.
const COUPLING_FLOOR: f64 = 1e-13;
/// Distance to an unperturbed eigenvalue that aborts the WB iteration.
const DENOMINATOR_HIT: f64 = 1e-12;
/// Relative target-weight gap below which two eigenvectors are ambiguous.
const AMBIGUITY_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rs,
    Wb,
    Direct,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rs => "rs",
            Method::Wb => "wb",
            Method::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationProblem {
    basis: FloquetBasis,
    perturbation: PeriodicMatrixSeries,
    cutoff: usize,
    pub degeneracy_threshold: f64,
    /// Tolerance for the cutoff-stability check (`K -> K + 2`).
    pub cutoff_tol: f64,
    /// `couplings[j * n + j']` = series of `Phi+_j(t) V(t) phi_j'(t)`.
    couplings: Vec<PeriodicScalarSeries>,
    coupling_scale: f64,
}

impl PerturbationProblem {
    pub fn new(
        basis: FloquetBasis,
        perturbation: PeriodicMatrixSeries,
        cutoff: usize,
    ) -> Result<Self> {
        let n = basis.dim();
        if perturbation.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perturbation.dim(),
            });
        }
        if (perturbation.omega() - basis.omega()).abs() > 1e-14 * basis.omega() {
            return Err(Error::FrequencyMismatch {
                left: basis.omega(),
                right: perturbation.omega(),
            });
        }
        let mut couplings = Vec::with_capacity(n * n);
        for j in 0..n {
            for jp in 0..n {
                let v_phi = series_product(&perturbation, &basis.modes[jp].shape)?;
                couplings.push(bilinear_product(&basis.duals[j], &v_phi)?);
            }
        }
        let coupling_scale = couplings.iter().map(|s| s.max_abs()).fold(0.0, f64::max);
        let degeneracy_threshold = 1e-3 * basis.omega();
        Ok(Self {
            basis,
            perturbation,
            cutoff,
            degeneracy_threshold,
            cutoff_tol: 1e-10,
            couplings,
            coupling_scale,
        })
    }

    pub fn with_degeneracy_threshold(mut self, threshold: f64) -> Self {
        self.degeneracy_threshold = threshold;
        self
    }

    pub fn with_cutoff_tol(mut self, tol: f64) -> Self {
        self.cutoff_tol = tol;
        self
    }

    /// Same problem with a different working cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut p = self.clone();
        p.cutoff = cutoff;
        p
    }

    pub fn basis(&self) -> &FloquetBasis {
        &self.basis
    }

    pub fn perturbation(&self) -> &PeriodicMatrixSeries {
        &self.perturbation
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn omega(&self) -> f64 {
        self.basis.omega()
    }

    /// `aleph_jk = aleph_j + i k omega`.
    pub fn aleph(&self, idx: BasisIndex) -> Complex64 {
        self.basis.eigenvalue(idx)
    }

    /// `<row|V|col>` from the tabulated coupling series.
    pub fn element(&self, row: BasisIndex, col: BasisIndex) -> Complex64 {
        let s = &self.couplings[row.j * self.dim() + col.j];
        s.coeff(row.k - col.k).copied().unwrap_or(ZERO)
    }

    /// `<row|V|col>` evaluated as the dual pairing of `<row|` with `V |col>`.
    pub fn v_matrix_element(&self, row: BasisIndex, col: BasisIndex) -> Result<Complex64> {
        let v_ket = series_product(&self.perturbation, &self.basis.ket(col))?;
        dual_pairing(&self.basis.bra(row), &v_ket)
    }

    fn is_coupling(&self, z: Complex64) -> bool {
        z.norm() > COUPLING_FLOOR * self.coupling_scale.max(f64::MIN_POSITIVE)
    }

    /// Basis indices `j = 0..n`, `k in [center - K, center + K]`, ordered by
    /// `j` then `k`.
    pub fn window(&self, center: i64, cutoff: usize) -> Vec<BasisIndex> {
        let k = cutoff as i64;
        (0..self.dim())
            .flat_map(|j| (center - k..=center + k).map(move |k| BasisIndex { j, k }))
            .collect()
    }

    /// Truncated `H` over `|k| <= K`.
    pub fn assemble_truncated_h(&self) -> Result<TruncatedOperator> {
        self.assemble_window(0, self.cutoff)
    }

    /// Truncated `H` over `k in [center - K, center + K]`.
    pub fn assemble_window(&self, center: i64, cutoff: usize) -> Result<TruncatedOperator> {
        let bandwidth = self.perturbation.bandwidth();
        if bandwidth > 2 * cutoff {
            return Err(Error::CutoffTooSmall { cutoff, bandwidth });
        }
        let indices = self.window(center, cutoff);
        let dim = indices.len();
        let mut entries = CMatrix::zeros(dim, dim);
        for (r, &row) in indices.iter().enumerate() {
            for (c, &col) in indices.iter().enumerate() {
                entries[(r, c)] = self.element(row, col);
            }
            entries[(r, r)] += self.aleph(row);
        }
        Ok(TruncatedOperator {
            cutoff,
            center,
            n: self.dim(),
            indices,
            entries,
        })
    }

    /// Every `j'k' != target` in the target window with
    /// `|aleph_target - aleph_j'k'| < degeneracy_threshold`, nearest first.
    pub fn scan_small_denominators(&self, target: BasisIndex) -> Vec<(BasisIndex, Complex64)> {
        let a0 = self.aleph(target);
        let mut hits: Vec<(BasisIndex, Complex64)> = self
            .window(target.k, self.cutoff)
            .into_iter()
            .filter(|&p| p != target)
            .map(|p| (p, a0 - self.aleph(p)))
            .filter(|(_, gap)| gap.norm() < self.degeneracy_threshold)
            .collect();
        hits.sort_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(a.0.cmp(&b.0)));
        hits
    }

    /// `psi(t) = sum_p c_p phi_p(t)` for a solution's coefficients.
    pub fn eigenfunction(&self, sol: &PerturbationSolution) -> Result<PeriodicVectorSeries> {
        let first = self.basis.ket(sol.target);
        let mut acc = first.scaled(ZERO);
        for (&idx, &c) in &sol.vector {
            if c != ZERO {
                acc = acc.add_scaled(c, &self.basis.ket(idx))?;
            }
        }
        Ok(acc)
    }

    /// `||(H_window - mu) c|| / ||c||` over the target window.
    pub fn eigen_residual(
        &self,
        target: BasisIndex,
        mu: Complex64,
        vector: &BTreeMap<BasisIndex, Complex64>,
    ) -> Result<f64> {
        let op = self.assemble_window(target.k, self.cutoff)?;
        let v = op.vector_from(vector);
        let r = &op.entries * &v - &v * mu;
        Ok(r.norm() / v.norm())
    }
}

/// Finite matrix of an operator in the `|jk>` basis.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub cutoff: usize,
    pub center: i64,
    n: usize,
    pub indices: Vec<BasisIndex>,
    pub entries: CMatrix,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn index_of(&self, idx: BasisIndex) -> Option<usize> {
        let width = 2 * self.cutoff as i64 + 1;
        let offset = idx.k - self.center + self.cutoff as i64;
        if idx.j >= self.n || offset < 0 || offset >= width {
            return None;
        }
        Some(idx.j * width as usize + offset as usize)
    }

    fn vector_from(&self, coeffs: &BTreeMap<BasisIndex, Complex64>) -> crate::linalg::CVector {
        let mut v = crate::linalg::CVector::zeros(self.dim());
        for (&idx, &c) in coeffs {
            if let Some(i) = self.index_of(idx) {
                v[i] = c;
            }
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationSolution {
    pub target: BasisIndex,
    pub mu: Complex64,
    /// Coefficients of `F(mu)|target>` in the `|j'k'>` basis, with
    /// `vector[target] == 1`.
    pub vector: BTreeMap<BasisIndex, Complex64>,
    /// Eigenvalue correction per order, starting at order 1.
    pub order_contributions: Vec<Complex64>,
    pub method: Method,
    pub order: usize,
    pub iterations: usize,
    pub converged: bool,
    pub small_denominators: Vec<(BasisIndex, f64)>,
    /// `||(H - mu) c|| / ||c||` on the truncated window.
    pub residual: f64,
    /// `|mu - aleph - R(mu)|` with `R` the partial sum that was solved.
    pub shift_residual: f64,
    /// `|mu(K + 2) - mu(K)|`.
    pub cutoff_shift: f64,
}

fn check_order(order: usize) -> Result<()> {
    if order == 1 || order == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "series order must be 1 or 2, got {order}"
        )))
    }
}

/// Couplings of the target to every other window member.
struct Neighbourhood {
    aleph: Complex64,
    diagonal: Complex64,
    partners: Vec<BasisIndex>,
    partner_alephs: Vec<Complex64>,
    /// `<target|V|p>`
    up: Vec<Complex64>,
    /// `<p|V|target>`
    down: Vec<Complex64>,
}

fn neighbourhood(p: &PerturbationProblem, target: BasisIndex, cutoff: usize) -> Neighbourhood {
    let partners: Vec<BasisIndex> = p
        .window(target.k, cutoff)
        .into_iter()
        .filter(|&q| q != target)
        .collect();
    Neighbourhood {
        aleph: p.aleph(target),
        diagonal: p.element(target, target),
        partner_alephs: partners.iter().map(|&q| p.aleph(q)).collect(),
        up: partners.iter().map(|&q| p.element(target, q)).collect(),
        down: partners.iter().map(|&q| p.element(q, target)).collect(),
        partners,
    }
}

/// Series eigenvector coefficients for a given set of denominators
/// `1 / d_p`. Order 2 adds the two-step term `sum_q V_pq V_q0 / (d_p d_q)`
/// and, for RS, the renormalisation `- V_00 V_p0 / d_p^2`.
fn series_vector(
    p: &PerturbationProblem,
    target: BasisIndex,
    nb: &Neighbourhood,
    denominators: &[Complex64],
    order: usize,
    rs_renormalisation: bool,
) -> BTreeMap<BasisIndex, Complex64> {
    let mut vector = BTreeMap::new();
    vector.insert(target, ONE);
    for (i, &q) in nb.partners.iter().enumerate() {
        let mut c = nb.down[i] / denominators[i];
        if order >= 2 {
            let mut two_step = ZERO;
            for (l, &r) in nb.partners.iter().enumerate() {
                if nb.down[l] != ZERO {
                    two_step += p.element(q, r) * nb.down[l] / denominators[l];
                }
            }
            c += two_step / denominators[i];
            if rs_renormalisation {
                c -= nb.diagonal * nb.down[i] / (denominators[i] * denominators[i]);
            }
        }
        vector.insert(q, c);
    }
    vector
}

fn rs_core(
    p: &PerturbationProblem,
    target: BasisIndex,
    order: usize,
    cutoff: usize,
) -> Result<PerturbationSolution> {
    check_order(order)?;
    let nb = neighbourhood(p, target, cutoff);
    let gaps: Vec<Complex64> = nb.partner_alephs.iter().map(|&a| nb.aleph - a).collect();

    let mut blocked = Vec::new();
    for (i, &q) in nb.partners.iter().enumerate() {
        if gaps[i].norm() >= p.degeneracy_threshold {
            continue;
        }
        let mut numerators = vec![nb.down[i]];
        if order >= 2 {
            numerators.push(nb.up[i] * nb.down[i]);
            let two_step: Complex64 = nb
                .partners
                .iter()
                .zip(&nb.down)
                .map(|(&r, &d)| p.element(q, r) * d)
                .sum();
            numerators.push(two_step);
        }
        if numerators.into_iter().any(|z| p.is_coupling(z)) {
            blocked.push((q, gaps[i].norm()));
        }
    }
    if !blocked.is_empty() {
        blocked.sort_by(|a, b| a.1.total_cmp(&b.1));
        return Err(Error::SmallDenominator {
            target,
            gaps: blocked,
        });
    }

    let first = nb.diagonal;
    let mut contributions = vec![first];
    if order >= 2 {
        let second: Complex64 = (0..nb.partners.len())
            .filter(|&i| nb.up[i] != ZERO && nb.down[i] != ZERO)
            .map(|i| nb.up[i] * nb.down[i] / gaps[i])
            .sum();
        contributions.push(second);
    }
    let mu = nb.aleph + contributions.iter().sum::<Complex64>();
    let vector = series_vector(p, target, &nb, &gaps, order, true);
    Ok(PerturbationSolution {
        target,
        mu,
        vector,
        order_contributions: contributions,
        method: Method::Rs,
        order,
        iterations: 0,
        converged: true,
        small_denominators: Vec::new(),
        residual: f64::NAN,
        shift_residual: 0.0,
        cutoff_shift: 0.0,
    })
}

/// Rayleigh-Schroedinger eigenvalue and eigenvector through `order` (1 or 2).
pub fn rs_solve(
    p: &PerturbationProblem,
    target: BasisIndex,
    order: usize,
) -> Result<PerturbationSolution> {
    let mut sol = rs_core(p, target, order, p.cutoff)?;
    let wider = rs_core(p, target, order, p.cutoff + 2)?;
    finish(p, &mut sol, wider.mu)?;
    Ok(sol)
}

fn finish(
    p: &PerturbationProblem,
    sol: &mut PerturbationSolution,
    wider_mu: Complex64,
) -> Result<()> {
    sol.cutoff_shift = (wider_mu - sol.mu).norm();
    sol.residual = p.eigen_residual(sol.target, sol.mu, &sol.vector)?;
    if sol.cutoff_shift > p.cutoff_tol {
        sol.converged = false;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct WbOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// `mu <- (1 - damping) mu + damping * rhs(mu)`.
    pub damping: f64,
    /// Newton steps on `mu - rhs(mu) = 0` instead of damped iteration.
    pub newton: bool,
}

impl Default for WbOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 500,
            damping: 0.5,
            newton: false,
        }
    }
}

/// Right-hand side `aleph + V_00 + sum_p V_0p V_p0 / (mu - aleph_p)` and its
/// derivative in `mu`.
struct WbEquation {
    aleph: Complex64,
    diagonal: Complex64,
    products: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl WbEquation {
    fn second(&self, mu: Complex64) -> Complex64 {
        self.products
            .iter()
            .zip(&self.poles)
            .map(|(c, a)| c / (mu - a))
            .sum()
    }

    fn rhs(&self, mu: Complex64) -> Complex64 {
        self.aleph + self.diagonal + self.second(mu)
    }

    fn rhs_derivative(&self, mu: Complex64) -> Complex64 {
        -self
            .products
            .iter()
            .zip(&self.poles)
            .map(|(c, a)| c / ((mu - a) * (mu - a)))
            .sum::<Complex64>()
    }
}

/// Seed for the WB iteration. Away from degeneracies this is
/// `aleph + V_00`. When coupled partners lie within the degeneracy
/// threshold, the seed is an eigenvalue of `H` restricted to the target and
/// those partners: the one whose eigenvector weighs most on the target, or,
/// when that is ambiguous, the eigenvalue whose rank (ordered by real then
/// imaginary part) equals the target's rank among the block members.
fn wb_seed(p: &PerturbationProblem, target: BasisIndex, nb: &Neighbourhood) -> Result<Complex64> {
    let default = nb.aleph + nb.diagonal;
    let mut block: Vec<BasisIndex> = vec![target];
    for (i, &q) in nb.partners.iter().enumerate() {
        let gap = (nb.aleph - nb.partner_alephs[i]).norm();
        if gap < p.degeneracy_threshold && (p.is_coupling(nb.up[i]) || p.is_coupling(nb.down[i])) {
            block.push(q);
        }
    }
    if block.len() == 1 {
        return Ok(default);
    }
    block.sort();
    let m = CMatrix::from_fn(block.len(), block.len(), |r, c| {
        let mut z = p.element(block[r], block[c]);
        if r == c {
            z += p.aleph(block[r]);
        }
        z
    });
    let e = linalg::eig(&m)?;
    let pos = block
        .iter()
        .position(|&b| b == target)
        .expect("target is in its block");
    let weights: Vec<f64> = (0..e.values.len())
        .map(|i| e.vectors[(pos, i)].norm())
        .collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let (best, second) = (weights[order[0]], weights[order[1]]);
    if second < (1.0 - AMBIGUITY_MARGIN) * best {
        return Ok(e.values[order[0]]);
    }
    let mut ranked = e.values.clone();
    ranked.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ranked[pos])
}

fn wb_core(
    p: &PerturbationProblem,
    target: BasisIndex,
    order: usize,
    opts: WbOptions,
    cutoff: usize,
) -> Result<PerturbationSolution> {
    check_order(order)?;
    let nb = neighbourhood(p, target, cutoff);
    let mut eq = WbEquation {
        aleph: nb.aleph,
        diagonal: nb.diagonal,
        products: Vec::new(),
        poles: Vec::new(),
    };
    if order >= 2 {
        for i in 0..nb.partners.len() {
            let prod = nb.up[i] * nb.down[i];
            if prod != ZERO {
                eq.products.push(prod);
                eq.poles.push(nb.partner_alephs[i]);
            }
        }
    }
    let contributing: Vec<usize> = (0..nb.partners.len())
        .filter(|&i| nb.down[i] != ZERO)
        .collect();
    let hit = |mu: Complex64| -> Option<BasisIndex> {
        contributing
            .iter()
            .find(|&&i| (mu - nb.partner_alephs[i]).norm() < DENOMINATOR_HIT)
            .map(|&i| nb.partners[i])
    };

    let mut mu = if order >= 2 {
        wb_seed(p, target, &nb)?
    } else {
        nb.aleph + nb.diagonal
    };
    let mut iterations = 0;
    let mut converged = false;
    let mut last_step = f64::INFINITY;
    while iterations < opts.max_iter {
        if let Some(index) = hit(mu) {
            return Err(Error::DenominatorHit { index });
        }
        let next = if opts.newton {
            let f = mu - eq.rhs(mu);
            let df = ONE - eq.rhs_derivative(mu);
            if df.norm() == 0.0 {
                eq.rhs(mu)
            } else {
                mu - f / df
            }
        } else {
            mu * (1.0 - opts.damping) + eq.rhs(mu) * opts.damping
        };
        iterations += 1;
        last_step = (next - mu).norm();
        mu = next;
        if !mu.re.is_finite() || !mu.im.is_finite() {
            break;
        }
        if last_step <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            last_iterate: mu,
            last_step,
        });
    }
    if let Some(index) = hit(mu) {
        return Err(Error::DenominatorHit { index });
    }

    let denominators: Vec<Complex64> = nb.partner_alephs.iter().map(|&a| mu - a).collect();
    let vector = series_vector(p, target, &nb, &denominators, order, false);
    let mut contributions = vec![nb.diagonal];
    if order >= 2 {
        contributions.push(eq.second(mu));
    }
    let shift_residual = (mu - eq.rhs(mu)).norm();
    let small_denominators = p
        .scan_small_denominators(target)
        .into_iter()
        .map(|(q, g)| (q, g.norm()))
        .collect();
    Ok(PerturbationSolution {
        target,
        mu,
        vector,
        order_contributions: contributions,
        method: Method::Wb,
        order,
        iterations,
        converged,
        small_denominators,
        residual: f64::NAN,
        shift_residual,
        cutoff_shift: 0.0,
    })
}

/// Wigner-Brillouin eigenvalue through `order`, solved self-consistently.
pub fn wb_solve(
    p: &PerturbationProblem,
    target: BasisIndex,
    order: usize,
    opts: WbOptions,
) -> Result<PerturbationSolution> {
    let mut sol = wb_core(p, target, order, opts, p.cutoff)?;
    let wider = wb_core(p, target, order, opts, p.cutoff + 2)?;
    finish(p, &mut sol, wider.mu)?;
    Ok(sol)
}

/// Eigenpair of the truncated operator whose eigenvector is largest on
/// `target`.
struct Matched {
    mu: Complex64,
    vector: BTreeMap<BasisIndex, Complex64>,
    residual: f64,
}

fn direct_core(p: &PerturbationProblem, target: BasisIndex, cutoff: usize) -> Result<Matched> {
    let op = p.assemble_window(target.k, cutoff)?;
    let e = linalg::eig(&op.entries)?;
    let pos = op.index_of(target).expect("target is the window centre");
    let weights: Vec<f64> = (0..op.dim()).map(|i| e.vectors[(pos, i)].norm()).collect();
    let mut ranked: Vec<usize> = (0..weights.len()).collect();
    ranked.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let best = ranked[0];
    if let Some(&second) = ranked.get(1) {
        if weights[second] >= (1.0 - AMBIGUITY_MARGIN) * weights[best] {
            return Err(Error::AmbiguousMatch {
                target,
                best: weights[best],
                second: weights[second],
            });
        }
    }
    let mu = e.values[best];
    let scale = e.vectors[(pos, best)].inv();
    let col = e.vectors.column(best) * scale;
    let residual = {
        let r = &op.entries * &col - &col * mu;
        r.norm() / col.norm()
    };
    let mut vector: BTreeMap<BasisIndex, Complex64> = op
        .indices
        .iter()
        .zip(col.iter())
        .map(|(&i, &c)| (i, c))
        .collect();
    vector.insert(target, ONE);
    Ok(Matched {
        mu,
        vector,
        residual,
    })
}

/// Dense eigensolve of the truncated operator matched to `target` by maximal
/// eigenvector weight, re-checked at cutoff `K + 2`.
pub fn direct_eigensolve(
    p: &PerturbationProblem,
    target: BasisIndex,
) -> Result<PerturbationSolution> {
    let m = direct_core(p, target, p.cutoff)?;
    let wider = direct_core(p, target, p.cutoff + 2)?;
    let cutoff_shift = (wider.mu - m.mu).norm();
    if cutoff_shift > 10.0 * p.cutoff_tol {
        return Err(Error::CutoffUnstable {
            target,
            shift: cutoff_shift,
        });
    }
    let small_denominators = p
        .scan_small_denominators(target)
        .into_iter()
        .map(|(q, g)| (q, g.norm()))
        .collect();
    Ok(PerturbationSolution {
        target,
        mu: m.mu,
        vector: m.vector,
        order_contributions: Vec::new(),
        method: Method::Direct,
        order: 0,
        iterations: 0,
        converged: cutoff_shift <= p.cutoff_tol,
        small_denominators,
        residual: m.residual,
        shift_residual: 0.0,
        cutoff_shift,
    })
}

/// Eigenvalues of the truncated operator whose eigenvectors weigh most on
/// `target`: a single value, or every candidate within the ambiguity margin
/// of the best. Each candidate is a genuine exponent; with degenerate
/// unperturbed partners the candidates are the split pair.
pub fn direct_candidates(p: &PerturbationProblem, target: BasisIndex) -> Result<Vec<Complex64>> {
    let op = p.assemble_window(target.k, p.cutoff)?;
    let e = linalg::eig(&op.entries)?;
    let pos = op.index_of(target).expect("target is the window centre");
    let weights: Vec<f64> = (0..op.dim()).map(|i| e.vectors[(pos, i)].norm()).collect();
    let best = weights.iter().cloned().fold(0.0, f64::max);
    Ok((0..op.dim())
        .filter(|&i| weights[i] >= (1.0 - AMBIGUITY_MARGIN) * best)
        .map(|i| e.values[i])
        .collect())
}
