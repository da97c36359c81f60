//! Point interactions `V = c δ(x - b)`.
//!
//! The Birman–Schwinger operator of a point interaction is a number, so the
//! eigenvalue condition becomes a scalar equation in `s = √μ`, `μ = -λ`:
//!
//! * Dirichlet: `c (1 - e^{-2sb}) / (2s) = 1`
//! * Robin `σ` with `b = 0`: `c / (s + σ) = 1`, i.e. `s = c - σ`
//!
//! This module solves those equations and builds the potentials for which
//! the halfline bounds are attained.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfun::g;
use crate::region::half_angle_cot;
use crate::winding::{find_roots, Rect, RootFinderOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaPotential {
    /// Strength; `‖V‖₁ = |c|`.
    pub c: Complex64,
    /// Location, `b >= 0`.
    pub b: f64,
}

impl DeltaPotential {
    pub fn new(c: Complex64, b: f64) -> Result<Self> {
        if !(b >= 0.0) || !b.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::domain(format!("invalid delta potential c = {c}, b = {b}")));
        }
        Ok(DeltaPotential { c, b })
    }

    pub fn l1_norm(&self) -> f64 {
        self.c.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub delta: DeltaPotential,
    pub lambda: Complex64,
    pub g_value: f64,
    /// `|dirichlet_bs_number - 1|`.
    pub bs_residual: f64,
}

/// Principal square root of μ, rejected unless its real part is positive.
pub(crate) fn sqrt_mu(mu: Complex64) -> Result<Complex64> {
    let s = mu.sqrt();
    if !(s.re > 0.0) {
        return Err(Error::domain(format!("need Re sqrt(mu) > 0, got mu = {mu}")));
    }
    Ok(s)
}

/// The Dirichlet Birman–Schwinger number `c (1 - e^{-2√μ b}) / (2√μ)`.
pub fn dirichlet_bs_number(delta: &DeltaPotential, mu: Complex64) -> Result<Complex64> {
    let s = sqrt_mu(mu)?;
    Ok(delta.c * (1.0 - (-2.0 * s * delta.b).exp()) / (2.0 * s))
}

/// Search rectangle in the `s = √μ` half-plane.
pub type SearchBox = Rect;

/// `Re s ∈ [1e-6, 2|c|]`, `|Im s| <= 2|c|`. Every root obeys `|s| < |c|`
/// because `|1 - e^{-2sb}| < 2` when `Re s > 0`.
pub fn default_search_box(delta: &DeltaPotential) -> Result<SearchBox> {
    let r = 2.0 * delta.c.norm();
    Rect::new(1e-6, r.max(2e-6), -r.max(1e-6), r.max(1e-6))
}

/// Eigenvalues `λ = -s²` of the Dirichlet operator with a point interaction,
/// from all roots of `h(s) = c(1 - e^{-2sb}) - 2s` inside `search`
/// (the default box when `None`). Sorted by real part, then imaginary part.
pub fn dirichlet_delta_eigenvalues(delta: &DeltaPotential, search: Option<SearchBox>) -> Result<Vec<Complex64>> {
    let rect = match search {
        Some(r) => r,
        None => {
            if delta.c.norm() == 0.0 || delta.b == 0.0 {
                return Ok(Vec::new());
            }
            default_search_box(delta)?
        }
    };
    if !(rect.re_lo > 0.0) {
        return Err(Error::domain(format!("search box {rect} must lie in Re s > 0")));
    }
    let (c, b) = (delta.c, delta.b);
    let h = |s: Complex64| c * (1.0 - (-2.0 * s * b).exp()) - 2.0 * s;
    let dh = |s: Complex64| 2.0 * c * b * (-2.0 * s * b).exp() - 2.0;

    let scale = 1.0 + c.norm();
    let longest = (rect.re_hi - rect.re_lo).max(rect.im_hi - rect.im_lo);
    let opts = RootFinderOptions {
        // e^{-2sb} turns once per π/b along the imaginary direction
        edge_pieces: (64.0 + 8.0 * b * longest / PI).min(1e5) as usize,
        contour_floor: 1e-14 * scale,
        residual_tol: 1e-12 * scale,
        merge_dist: 1e-9,
        max_depth: 20,
    };
    let search = find_roots(&h, &dh, rect, &opts)?;
    let mut lambdas: Vec<Complex64> = search.roots.iter().map(|s| -s * s).collect();
    sort_complex(&mut lambdas);
    Ok(lambdas)
}

pub(crate) fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Point interaction of L¹ norm `m` whose unique Dirichlet eigenvalue is
/// `(m²/4) g(cot(θ/2))² e^{iθ}`, on the boundary of the enclosure.
pub fn extremal_delta(m: f64, theta: f64) -> Result<ExtremalResult> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::domain(format!("mass must be positive, got {m}")));
    }
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::domain(format!("theta must lie in (0, 2pi), got {theta}")));
    }
    let gr = g(half_angle_cot(theta))?;
    let y0 = match gr.argmax {
        // g = 1 in double precision means b would be astronomically large
        Some(y0) if gr.attained && gr.value > 1.0 => y0,
        _ => {
            return Err(Error::domain(format!(
                "no extremal point interaction at theta = {theta}: the supremum is not attained"
            )))
        }
    };
    let modulus = 0.25 * m * m * gr.value * gr.value;
    let root = modulus.sqrt();
    let s = Complex64::from_polar(root, 0.5 * (theta - PI));
    let b = y0 / (2.0 * root * (0.5 * theta).sin());
    let c = 2.0 * s / (1.0 - (-2.0 * s * b).exp());
    let delta = DeltaPotential::new(c, b)?;
    let bs = dirichlet_bs_number(&delta, s * s)?;
    Ok(ExtremalResult {
        delta,
        lambda: Complex64::from_polar(modulus, theta),
        g_value: gr.value,
        bs_residual: (bs - 1.0).norm(),
    })
}

/// Neumann eigenvalue `-c²` of `c δ(x)`; requires `Re c > 0`.
pub fn neumann_delta_eigenvalue(c: Complex64) -> Result<Complex64> {
    robin_delta_eigenvalue(c, 0.0)
}

/// Robin eigenvalue `-(c - σ)²` of `c δ(x)`; requires `Re(c - σ) > 0`.
pub fn robin_delta_eigenvalue(c: Complex64, sigma: f64) -> Result<Complex64> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("Robin parameter must be >= 0, got {sigma}")));
    }
    let s = c - sigma;
    if !(s.re > 0.0) {
        return Err(Error::domain(format!("no eigenvalue: Re(c - sigma) = {} <= 0", s.re)));
    }
    Ok(-s * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessStep {
    pub k: f64,
    pub lambda: Complex64,
    /// `|λ_k|^{1/2} / k`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSequence {
    pub steps: Vec<SharpnessStep>,
    /// Strengths skipped because `Re(c_k - σ) <= 0`.
    pub skipped: Vec<f64>,
}

/// Robin eigenvalues of `c_k δ(x)` with `c_k = -i k e^{iθ/2}`; as `k` grows
/// the eigenvalue argument tends to θ and `|λ_k|^{1/2}/k` tends to 1.
pub fn robin_sharpness_sequence(theta: f64, sigma: f64, k_values: &[f64]) -> Result<SharpnessSequence> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::domain(format!("theta must lie in (0, 2pi), got {theta}")));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("Robin parameter must be >= 0, got {sigma}")));
    }
    let dir = -Complex64::i() * Complex64::from_polar(1.0, 0.5 * theta);
    let mut steps = Vec::with_capacity(k_values.len());
    let mut skipped = Vec::new();
    for &k in k_values {
        if !(k > 0.0) {
            skipped.push(k);
            continue;
        }
        match robin_delta_eigenvalue(k * dir, sigma) {
            Ok(lambda) => steps.push(SharpnessStep {
                k,
                lambda,
                ratio: lambda.norm().sqrt() / k,
            }),
            Err(_) => skipped.push(k),
        }
    }
    Ok(SharpnessSequence { steps, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bs_number_vanishes_at_boundary() {
        let d = DeltaPotential::new(c(3.0, -1.0), 0.0).unwrap();
        assert_eq!(dirichlet_bs_number(&d, c(2.0, 1.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn bs_number_far_delta_matches_whole_line() {
        let d = DeltaPotential::new(c(2.0, 0.0), 50.0).unwrap();
        let v = dirichlet_bs_number(&d, c(1.0, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn bs_number_rejects_bad_mu() {
        let d = DeltaPotential::new(c(1.0, 0.0), 1.0).unwrap();
        assert!(dirichlet_bs_number(&d, c(-1.0, 0.0)).is_err());
        assert!(DeltaPotential::new(c(1.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn strong_far_delta_has_root_near_two() {
        let d = DeltaPotential::new(c(4.0, 0.0), 10.0).unwrap();
        let eigs = dirichlet_delta_eigenvalues(&d, None).unwrap();
        assert_eq!(eigs.len(), 1);
        // fixed-point oracle s = (c/2)(1 - e^{-2sb}) converges to 2 - 8.5e-18
        assert!((eigs[0] - c(-4.0, 0.0)).norm() < 1e-12, "{}", eigs[0]);
    }

    #[test]
    fn weak_delta_has_no_roots_in_box() {
        let d = DeltaPotential::new(c(1e-3, 0.0), 1.0).unwrap();
        let rect = Rect::new(0.5, 5.0, -5.0, 5.0).unwrap();
        assert!(dirichlet_delta_eigenvalues(&d, Some(rect)).unwrap().is_empty());
    }

    #[test]
    fn extremal_quarter_turn() {
        let r = extremal_delta(1.0, PI / 2.0).unwrap();
        assert!((r.delta.c.norm() - 1.0).abs() < 1e-12);
        assert!(r.bs_residual <= 1e-10);
        let gv = r.g_value;
        assert!((r.lambda - c(0.0, 0.25 * gv * gv)).norm() < 1e-12);
        let eigs = dirichlet_delta_eigenvalues(&r.delta, None).unwrap();
        assert_eq!(eigs.len(), 1);
        assert!((eigs[0] - r.lambda).norm() < 1e-10);
    }

    #[test]
    fn extremal_attains_g_modulus() {
        for &theta in &[0.4, 1.0, 2.5, 3.5, 5.0, 6.0] {
            let r = extremal_delta(1.7, theta).unwrap();
            let s = (-r.lambda).sqrt();
            let v = (1.0 - (-2.0 * s * r.delta.b).exp()).norm();
            assert!((v - r.g_value).abs() < 1e-10, "theta {theta}");
        }
    }

    #[test]
    fn extremal_scaling() {
        let a = extremal_delta(1.3, 2.0).unwrap();
        let b = extremal_delta(2.6, 2.0).unwrap();
        assert!((b.lambda - 4.0 * a.lambda).norm() < 1e-12 * b.lambda.norm());
        assert!((b.delta.b - 0.5 * a.delta.b).abs() < 1e-12 * a.delta.b);
    }

    #[test]
    fn extremal_rejects_half_turn() {
        assert!(extremal_delta(1.0, PI).is_err());
        assert!(extremal_delta(0.0, 1.0).is_err());
        assert!(extremal_delta(1.0, 0.0).is_err());
    }

    #[test]
    fn neumann_examples() {
        assert_eq!(neumann_delta_eigenvalue(c(1.0, 0.0)).unwrap(), c(-1.0, 0.0));
        let l = neumann_delta_eigenvalue(c(1.0, 1.0)).unwrap();
        assert!((l - c(0.0, -2.0)).norm() < 1e-15);
        assert!((l.norm().sqrt() - 2f64.sqrt()).abs() < 1e-15);
        for &phi in &[-1.4, -0.5, 0.3, 1.2] {
            let l = neumann_delta_eigenvalue(Complex64::from_polar(1.0, phi)).unwrap();
            assert!((l + Complex64::from_polar(1.0, 2.0 * phi)).norm() < 1e-15);
        }
        assert!(neumann_delta_eigenvalue(c(0.0, 1.0)).is_err());
    }

    #[test]
    fn robin_examples() {
        assert_eq!(robin_delta_eigenvalue(c(2.0, 0.0), 1.0).unwrap(), c(-1.0, 0.0));
        let z = c(0.7, -0.4);
        assert_eq!(
            robin_delta_eigenvalue(z, 0.0).unwrap(),
            neumann_delta_eigenvalue(z).unwrap()
        );
        assert!(robin_delta_eigenvalue(c(1.0, 0.0), 1.0).is_err());
        assert!(robin_delta_eigenvalue(c(3.0, 0.0), -1.0).is_err());

        let theta = PI / 2.0;
        let cc = -Complex64::i() * 1e3 * Complex64::from_polar(1.0, theta / 2.0);
        let l = robin_delta_eigenvalue(cc, 1.0).unwrap();
        let ratio = l.norm().sqrt() / cc.norm();
        assert!((1.0 - 5e-3..=1.0).contains(&ratio));
        assert!((l.arg() - theta).abs() < 2e-3);
    }

    #[test]
    fn sharpness_sequence_examples() {
        let seq = robin_sharpness_sequence(PI, 0.0, &[1.0, 10.0, 1e3]).unwrap();
        for s in &seq.steps {
            assert!((s.ratio - 1.0).abs() < 1e-15);
            assert!((s.lambda + s.k * s.k).norm() < 1e-12 * s.k * s.k);
        }
        let seq = robin_sharpness_sequence(1.5 * PI, 0.0, &[2.0, 20.0]).unwrap();
        assert!(seq.steps.iter().all(|s| (s.ratio - 1.0).abs() < 1e-15));

        let seq = robin_sharpness_sequence(PI / 2.0, 2.0, &[10.0, 1e2, 1e3]).unwrap();
        let r: Vec<f64> = seq.steps.iter().map(|s| s.ratio).collect();
        assert!(r[0] < r[1] && r[1] < r[2] && r[2] < 1.0);

        // Re c_k = k sin(θ/2) falls below σ = 5 at k = 1
        let seq = robin_sharpness_sequence(0.1, 5.0, &[1.0, 1e3]).unwrap();
        assert_eq!(seq.skipped, vec![1.0]);
        assert_eq!(seq.steps.len(), 1);
    }
}
