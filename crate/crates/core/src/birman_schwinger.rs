//! Discretized Birman–Schwinger operators `V^{1/2} (-∂² + μ)^{-1} |V|^{1/2}`.
//!
//! `λ = -μ` is an eigenvalue of `-∂² - V` exactly when this operator has the
//! eigenvalue 1. Its operator norm is bounded by `‖V‖₁ · sup|K| `, and the
//! supremum of the resolvent kernel is explicit for each boundary condition.
//! The Nyström discretization weights rows and columns by `√w_i` so that
//! matrix singular values approximate those of the integral operator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::delta::sqrt_mu;
use crate::error::{Error, Result};
use crate::gfun::g_value;
use crate::optimize::scan_then_refine_max;
use crate::potential::{Domain, PotentialFn};
use crate::region::BoundaryCondition;

/// Potential values on a quadrature grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPotential {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl SampledPotential {
    pub fn new(nodes: Vec<f64>, values: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() != weights.len() {
            return Err(Error::domain("nodes, values and weights must have equal length"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("nodes must be strictly increasing"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::domain("quadrature weights must be positive"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::domain("potential values must be finite"));
        }
        Ok(SampledPotential { nodes, values, weights })
    }

    /// Composite trapezoid weights on arbitrary increasing nodes.
    pub fn trapezoid(nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 {
            return Err(Error::domain("trapezoid rule needs at least two nodes"));
        }
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = nodes[i + 1] - nodes[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Self::new(nodes, values, weights)
    }

    /// Single node of unit weight: the point interaction `c δ(x - b)`.
    pub fn point_mass(b: f64, c: Complex64) -> Result<Self> {
        Self::new(vec![b], vec![c], vec![1.0])
    }

    /// Samples `potential` on `n` equispaced trapezoid nodes over its support
    /// (`[0, L]` on the halfline, `[-L, L]` on the whole line).
    pub fn from_fn(potential: &dyn PotentialFn, n: usize) -> Result<Self> {
        let l = potential.support_radius();
        let lo = match potential.domain() {
            Domain::HalfLine => 0.0,
            Domain::WholeLine => -l,
        };
        Self::sample_interval(potential, lo, l, n)
    }

    pub fn sample_interval(potential: &dyn PotentialFn, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::domain(format!(
                "bad sampling interval [{lo}, {hi}] with {n} nodes"
            )));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + h * i as f64 })
            .collect();
        let values = nodes.iter().map(|&x| potential.evaluate(x)).collect();
        Self::trapezoid(nodes, values)
    }

    /// Discrete `‖V‖₁ = Σ w_i |V(x_i)|`.
    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().zip(&self.values).map(|(w, v)| w * v.norm()).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsMatrix {
    pub entries: DMatrix<Complex64>,
    pub mu: Complex64,
    pub bc: BoundaryCondition,
}

/// Resolvent kernel of `-∂² + μ` for the given boundary condition.
pub fn kernel(x: f64, y: f64, mu: Complex64, bc: BoundaryCondition) -> Result<Complex64> {
    let s = sqrt_mu(mu)?;
    bc.validate()?;
    if bc.is_halfline() && (x < 0.0 || y < 0.0) {
        return Err(Error::domain(format!(
            "halfline kernel needs x, y >= 0, got ({x}, {y})"
        )));
    }
    Ok(kernel_unchecked(x, y, s, bc))
}

#[inline]
fn kernel_unchecked(x: f64, y: f64, s: Complex64, bc: BoundaryCondition) -> Complex64 {
    let direct = (-s * (x - y).abs()).exp();
    let reflected = match bc {
        BoundaryCondition::WholeLine => return direct / (2.0 * s),
        BoundaryCondition::Dirichlet => -(-s * (x + y)).exp(),
        BoundaryCondition::Neumann => (-s * (x + y)).exp(),
        BoundaryCondition::Robin { sigma } => (s - sigma) / (s + sigma) * (-s * (x + y)).exp(),
    };
    (direct + reflected) / (2.0 * s)
}

/// `sup_{x,y>=0} |2√μ K_D(x, y; μ)| = g(cot(θ/2))` with `-μ = |μ| e^{iθ}`.
pub fn dirichlet_kernel_sup(mu: Complex64) -> Result<f64> {
    let s = sqrt_mu(mu)?;
    // s = |s| e^{i(θ-π)/2}, so cot(θ/2) = -Im s / Re s
    g_value(-s.im / s.re)
}

/// `sup_{y>=0} |1 + r e^{-2√μ y}|`, `r = (√μ - σ)/(√μ + σ)`; at most 2.
pub fn robin_sup_factor(mu: Complex64, sigma: f64) -> Result<f64> {
    let s = sqrt_mu(mu)?;
    BoundaryCondition::robin(sigma)?;
    let r = (s - sigma) / (s + sigma);
    let r_abs = r.norm();
    let at_zero = (1.0 + r).norm();
    if r_abs == 0.0 {
        return Ok(1.0);
    }
    // beyond y_max the oscillating term is below 1e-17 of the constant
    let y_max = ((r_abs * 1e17).ln() / (2.0 * s.re)).max(0.0);
    if y_max == 0.0 {
        return Ok(at_zero.max(1.0));
    }
    let turns = s.im.abs() * y_max / std::f64::consts::PI;
    let n = ((64.0 * turns.ceil()) as usize).clamp(2048, 400_000);
    let objective = |y: f64| (1.0 + r * (-2.0 * s * y).exp()).norm();
    let (_, interior) = scan_then_refine_max(objective, 0.0, y_max, n, true, 4, 1e-14);
    Ok(interior.max(at_zero).max(1.0))
}

/// Builds `A_ij = √w_i V^{1/2}(x_i) K(x_i, x_j) |V(x_j)|^{1/2} √w_j`
/// with `V^{1/2} = (V/|V|) |V|^{1/2}` (zero where `V = 0`).
pub fn assemble(potential: &SampledPotential, mu: Complex64, bc: BoundaryCondition) -> Result<BsMatrix> {
    let s = sqrt_mu(mu)?;
    bc.validate()?;
    if bc.is_halfline() && potential.nodes.iter().any(|&x| x < 0.0) {
        return Err(Error::domain("halfline operator needs non-negative nodes"));
    }
    let n = potential.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (v, w) in potential.values.iter().zip(&potential.weights) {
        let modulus = v.norm();
        let root = (w * modulus).sqrt();
        right.push(root);
        left.push(if modulus > 0.0 {
            v / modulus * root
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    let x = &potential.nodes;
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if left[i] == Complex64::new(0.0, 0.0) || right[j] == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            left[i] * kernel_unchecked(x[i], x[j], s, bc) * right[j]
        }
    });
    Ok(BsMatrix { entries, mu, bc })
}

pub const NORM_REL_TOL: f64 = 1e-10;
pub const NORM_MAX_ITER: usize = 10_000;
const NORM_SEED: u64 = 0x005e_edb5;

/// Number of vectors in the power-iteration block.
pub const NORM_BLOCK: usize = 6;

/// Largest singular value by block power iteration on `A^H A`.
///
/// The block is re-orthonormalized every step and the estimate is the top
/// Rayleigh–Ritz value of `A^H A` on it, so a nearly repeated top singular
/// value (even potentials on the whole line) does not stall convergence.
/// Stops once the estimate changes by at most `1e-10` relative.
pub fn operator_norm(matrix: &BsMatrix) -> Result<f64> {
    largest_singular_value(&matrix.entries)
}

pub fn largest_singular_value(a: &DMatrix<Complex64>) -> Result<f64> {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 || a.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let k = NORM_BLOCK.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(NORM_SEED);
    let start = DMatrix::from_fn(n, k, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mut v = start.qr().q();
    let ah = a.adjoint();
    let mut rho_prev = f64::NAN;
    for _ in 0..NORM_MAX_ITER {
        let b = a * &v;
        let gram = b.adjoint() * &b;
        let rho = gram.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
        if rho > 0.0 && ((rho - rho_prev) / rho).abs() <= NORM_REL_TOL {
            return Ok(rho.sqrt());
        }
        rho_prev = rho;
        v = (&ah * b).qr().q();
    }
    Err(Error::NonConvergence {
        method: "power iteration",
        iterations: NORM_MAX_ITER,
        detail: "largest singular value".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    pub norm: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Quadrature allowance added to the right-hand side.
pub const QUADRATURE_ALLOWANCE: f64 = 1e-6;

/// Checks `‖BS(μ)‖ <= ‖V‖₁ · S(μ) / (2√|μ|)` where `S` is the kernel supremum
/// for `bc` (`g(cot(θ/2))`, the Robin factor, or 1 on the whole line).
pub fn verify_norm_bound(
    potential: &SampledPotential,
    mu: Complex64,
    bc: BoundaryCondition,
) -> Result<NormBoundReport> {
    let matrix = assemble(potential, mu, bc)?;
    let norm = operator_norm(&matrix)?;
    let sup = match bc {
        BoundaryCondition::Dirichlet => dirichlet_kernel_sup(mu)?,
        BoundaryCondition::Neumann => robin_sup_factor(mu, 0.0)?,
        BoundaryCondition::Robin { sigma } => robin_sup_factor(mu, sigma)?,
        BoundaryCondition::WholeLine => 1.0,
    };
    let rhs = potential.l1_norm() * sup / (2.0 * mu.norm().sqrt());
    Ok(NormBoundReport {
        norm,
        rhs,
        ok: norm <= rhs * (1.0 + 1e-8) + QUADRATURE_ALLOWANCE,
    })
}

/// All eigenvalues of a complex square matrix via the Schur form.
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let schur = nalgebra::Schur::try_new(a.clone(), 1e-14, 100 * n.max(10)).ok_or_else(|| Error::NonConvergence {
        method: "Schur decomposition",
        iterations: 100 * n.max(10),
        detail: format!("{n}x{n} matrix"),
    })?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let sub = if i + 1 < n {
            t[(i + 1, i)]
        } else {
            Complex64::new(0.0, 0.0)
        };
        let scale = t[(i, i)].norm() + if i + 1 < n { t[(i + 1, i + 1)].norm() } else { 0.0 };
        if i + 1 < n && sub.norm() > 1e-14 * scale.max(1e-300) {
            // unreduced 2x2 block
            let (p, q, r, u) = (t[(i, i)], t[(i, i + 1)], sub, t[(i + 1, i + 1)]);
            let half_tr = 0.5 * (p + u);
            let disc = (0.25 * (p - u) * (p - u) + q * r).sqrt();
            out.push(half_tr + disc);
            out.push(half_tr - disc);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(out)
}

const INVERSE_ITER_MAX: usize = 60;

/// Eigenvalue of `a` nearest `shift` by inverse iteration; `None` when the
/// iteration does not settle (e.g. two eigenvalues equidistant from the shift).
fn nearest_eigenvalue(a: &DMatrix<Complex64>, shift: Complex64) -> Option<Complex64> {
    let n = a.nrows();
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut rng = ChaCha8Rng::seed_from_u64(NORM_SEED ^ 0xa5a5);
    let mut v = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    v /= Complex64::new(v.norm(), 0.0);
    let scale = a.norm().max(1e-300);
    for _ in 0..INVERSE_ITER_MAX {
        let w = lu.solve(&v)?;
        let wn = w.norm();
        if !(wn.is_finite()) || wn == 0.0 {
            return None;
        }
        v = w / Complex64::new(wn, 0.0);
        let av = a * &v;
        let nu = v.dotc(&av);
        let residual = (&av - &v * nu).norm();
        if residual <= 1e-11 * scale {
            return Some(nu);
        }
    }
    None
}

/// `min_ν |ν - 1|` over the eigenvalues of the Birman–Schwinger matrix at
/// `μ = -λ`. Small values certify that `λ` is close to an eigenvalue.
pub fn eigenvalue_certificate(potential: &SampledPotential, lambda: Complex64, bc: BoundaryCondition) -> Result<f64> {
    crate::region::SpectralPoint::new(lambda)?;
    let matrix = assemble(potential, -lambda, bc)?;
    certificate_of(&matrix.entries)
}

fn certificate_of(a: &DMatrix<Complex64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(1.0);
    }
    Ok((eigenvalue_nearest_one(a)? - 1.0).norm())
}

/// The eigenvalue of `a` closest to 1.
pub fn eigenvalue_nearest_one(a: &DMatrix<Complex64>) -> Result<Complex64> {
    if a.nrows() == 0 {
        return Err(Error::domain("empty matrix has no eigenvalues"));
    }
    let one = Complex64::new(1.0, 0.0);
    if let Some(nu) = nearest_eigenvalue(a, one) {
        // trust the fast path only when it is clearly the nearest eigenvalue
        if (nu - 1.0).norm() < 0.05 {
            return Ok(nu);
        }
    }
    eigenvalues(a)?
        .into_iter()
        .min_by(|x, y| (x - 1.0).norm().total_cmp(&(y - 1.0).norm()))
        .ok_or_else(|| Error::domain("empty spectrum"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_examples() {
        let d = BoundaryCondition::Dirichlet;
        assert_eq!(kernel(0.0, 2.0, c(1.0, 0.5), d).unwrap(), c(0.0, 0.0));
        assert_eq!(kernel(3.0, 0.0, c(1.0, 0.5), d).unwrap(), c(0.0, 0.0));
        let k = kernel(0.0, 0.0, c(4.0, 0.0), BoundaryCondition::Neumann).unwrap();
        assert!((k - 0.5).norm() < 1e-16);
        let k = kernel(1.0, 1.0, c(1.0, 0.0), d).unwrap();
        assert!((k - 0.5 * (1.0 - (-2f64).exp())).norm() < 1e-16);
        let k = kernel(-1.0, 2.0, c(1.0, 0.0), BoundaryCondition::WholeLine).unwrap();
        assert!((k - 0.5 * (-3f64).exp()).norm() < 1e-16);
    }

    #[test]
    fn kernel_domain_errors() {
        assert!(kernel(1.0, 1.0, c(-1.0, 0.0), BoundaryCondition::Dirichlet).is_err());
        assert!(kernel(-1.0, 1.0, c(1.0, 0.0), BoundaryCondition::Dirichlet).is_err());
        assert!(kernel(1.0, 1.0, c(1.0, 0.0), BoundaryCondition::Robin { sigma: -1.0 }).is_err());
    }

    #[test]
    fn dirichlet_sup_examples() {
        assert_eq!(dirichlet_kernel_sup(c(2.5, 0.0)).unwrap(), 1.0);
        // θ = π/2 ⇔ μ = e^{-iπ/2}
        let v = dirichlet_kernel_sup(c(0.0, -1.0)).unwrap();
        assert!((v - g_value(1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_sup_matches_grid() {
        let mu = c(0.0, -1.0);
        let s = mu.sqrt();
        let n = 2000;
        let mut best: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=i {
                let (x, y) = (20.0 * i as f64 / n as f64, 20.0 * j as f64 / n as f64);
                let k = kernel(x, y, mu, BoundaryCondition::Dirichlet).unwrap();
                best = best.max((2.0 * s * k).norm());
            }
        }
        assert!((best - dirichlet_kernel_sup(mu).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn robin_factor_examples() {
        let v = robin_sup_factor(c(3.0, 0.0), 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        let mu = c(-0.3, 1.7);
        let big = robin_sup_factor(mu, 1e9).unwrap();
        assert!((big - dirichlet_kernel_sup(mu).unwrap()).abs() < 1e-6);
        assert!(robin_sup_factor(mu, -1.0).is_err());
    }

    #[test]
    fn single_node_is_bs_number() {
        let (b, cc, mu) = (1.3, c(0.4, -0.9), c(0.2, 0.7));
        let m = assemble(
            &SampledPotential::point_mass(b, cc).unwrap(),
            mu,
            BoundaryCondition::Dirichlet,
        )
        .unwrap();
        let delta = crate::delta::DeltaPotential::new(cc, b).unwrap();
        let expected = crate::delta::dirichlet_bs_number(&delta, mu).unwrap();
        assert!((m.entries[(0, 0)] - expected).norm() <= 1e-15 * expected.norm());
    }

    #[test]
    fn zero_potential_gives_zero_matrix() {
        let p = SampledPotential::trapezoid(vec![0.0, 1.0, 2.0], vec![c(0.0, 0.0); 3]).unwrap();
        let m = assemble(&p, c(1.0, 1.0), BoundaryCondition::Dirichlet).unwrap();
        assert!(m.entries.iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(operator_norm(&m).unwrap(), 0.0);
        let r = verify_norm_bound(&p, c(1.0, 1.0), BoundaryCondition::Dirichlet).unwrap();
        assert_eq!((r.norm, r.rhs, r.ok), (0.0, 0.0, true));
        let cert = eigenvalue_certificate(&p, c(-1.0, 0.5), BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(cert, 1.0);
    }

    #[test]
    fn norm_of_small_matrices() {
        let m = DMatrix::from_element(1, 1, c(3.0, -4.0));
        assert!((largest_singular_value(&m).unwrap() - 5.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.0, -2.0), c(1.0, 1.0)]));
        assert!((largest_singular_value(&d).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn eigenvalues_of_triangular_similarity() {
        let diag = [c(1.0, 2.0), c(-0.5, 0.1), c(0.3, -0.7), c(2.0, 0.0)];
        let mut t = DMatrix::from_fn(4, 4, |i, j| {
            if j > i {
                c(0.3 * (i + j) as f64, 0.1)
            } else {
                c(0.0, 0.0)
            }
        });
        for (i, d) in diag.iter().enumerate() {
            t[(i, i)] = *d;
        }
        let p = DMatrix::from_fn(4, 4, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 + 1.0, (i as f64 - j as f64) * 0.2)
                + if i == j { c(5.0, 0.0) } else { c(0.0, 0.0) }
        });
        let a = &p * t * p.clone().try_inverse().unwrap();
        let ev = eigenvalues(&a).unwrap();
        for d in &diag {
            assert!(ev.iter().any(|e| (e - d).norm() < 1e-9), "missing {d}: {ev:?}");
        }
    }

    #[test]
    fn certificate_detects_point_interaction_eigenvalue() {
        let r = crate::delta::extremal_delta(1.0, PI / 2.0).unwrap();
        let p = SampledPotential::point_mass(r.delta.b, r.delta.c).unwrap();
        let cert = eigenvalue_certificate(&p, r.lambda, BoundaryCondition::Dirichlet).unwrap();
        assert!(cert < 1e-10);
        assert!(eigenvalue_certificate(&p, c(1.0, 0.0), BoundaryCondition::Dirichlet).is_err());
    }
}
