//! Enclosure regions for non-positive eigenvalues.
//!
//! An eigenvalue `λ = |λ| e^{iθ}`, `θ ∈ (0, 2π)`, of `-∂² - V` with
//! `‖V‖₁ = m` satisfies `|λ| <= R(θ)`, where
//!
//! | boundary condition | `R(θ)`                      |
//! |--------------------|-----------------------------|
//! | Dirichlet          | `(m g(cot(θ/2)) / 2)²`      |
//! | Neumann, Robin σ≥0 | `m²`                        |
//! | whole line         | `(m / 2)²`                  |
//!
//! The Dirichlet curve `4|λ| = g(cot(θ/2))²` at `m = 1` runs from `-1`
//! (where it agrees with a semicircle up to exponentially small terms) to the
//! point 4 on the positive axis, which it meets with slope `2/π`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfun::{self, g_value};
use crate::optimize::scan_then_refine_max;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// `ψ'(0) = σ ψ(0)` with `σ >= 0`.
    Robin {
        sigma: f64,
    },
    WholeLine,
}

impl BoundaryCondition {
    pub fn robin(sigma: f64) -> Result<Self> {
        let bc = BoundaryCondition::Robin { sigma };
        bc.validate()?;
        Ok(bc)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundaryCondition::Robin { sigma } if !(sigma >= 0.0) || !sigma.is_finite() => Err(Error::domain(format!(
                "Robin parameter must be finite and >= 0, got {sigma}"
            ))),
            _ => Ok(()),
        }
    }

    /// Robin parameter; 0 for Neumann, `None` for Dirichlet and the whole line.
    pub fn robin_sigma(&self) -> Option<f64> {
        match *self {
            BoundaryCondition::Neumann => Some(0.0),
            BoundaryCondition::Robin { sigma } => Some(sigma),
            _ => None,
        }
    }

    pub fn is_halfline(&self) -> bool {
        !matches!(self, BoundaryCondition::WholeLine)
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
            BoundaryCondition::Neumann => write!(f, "neumann"),
            BoundaryCondition::Robin { sigma } => write!(f, "robin({sigma})"),
            BoundaryCondition::WholeLine => write!(f, "whole-line"),
        }
    }
}

/// A point `λ = |λ| e^{iθ}` off the closed positive half-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub modulus: f64,
    /// Argument in the open interval `(0, 2π)`.
    pub theta: f64,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::domain(format!("non-finite spectral point {lambda}")));
        }
        let arg = lambda.arg();
        let theta = if arg > 0.0 { arg } else { arg + TAU };
        if lambda == Complex64::new(0.0, 0.0) || !(theta > 0.0 && theta < TAU) {
            return Err(Error::domain(format!("{lambda} lies on [0, inf)")));
        }
        Ok(SpectralPoint {
            lambda,
            modulus: lambda.norm(),
            theta,
        })
    }

    /// `μ = -λ`; its principal square root has positive real part.
    pub fn mu(&self) -> Complex64 {
        -self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub theta: f64,
    /// Maximal `4|λ|` at unit L¹ norm.
    pub radius4: f64,
    /// `radius4 · e^{iθ}`.
    pub z: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    /// Dirichlet halfline curve, ordered by θ.
    pub halfline: Vec<CurvePoint>,
    /// Whole-line reference circle `radius4 = 1` on the same angles.
    pub whole_line: Vec<CurvePoint>,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < TAU {
        Ok(())
    } else {
        Err(Error::domain(format!("theta must lie in (0, 2pi), got {theta}")))
    }
}

/// `cot(θ/2)`, the argument fed to `g` for an eigenvalue of argument θ.
pub fn half_angle_cot(theta: f64) -> f64 {
    1.0 / (0.5 * theta).tan()
}

/// Largest admissible `|λ|` at argument θ for potentials of L¹ norm `v_norm`.
pub fn bound_radius(theta: f64, v_norm: f64, bc: BoundaryCondition) -> Result<f64> {
    check_theta(theta)?;
    bc.validate()?;
    if !(v_norm >= 0.0) || !v_norm.is_finite() {
        return Err(Error::domain(format!("L1 norm must be finite and >= 0, got {v_norm}")));
    }
    Ok(match bc {
        BoundaryCondition::Dirichlet => {
            let r = 0.5 * v_norm * g_value(half_angle_cot(theta))?;
            r * r
        }
        BoundaryCondition::Neumann | BoundaryCondition::Robin { .. } => v_norm * v_norm,
        BoundaryCondition::WholeLine => 0.25 * v_norm * v_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub inside: bool,
    /// `bound_radius - |λ|`; non-negative inside, boundary included.
    pub margin: f64,
}

pub fn contains(point: &SpectralPoint, v_norm: f64, bc: BoundaryCondition) -> Result<Containment> {
    let margin = bound_radius(point.theta, v_norm, bc)? - point.modulus;
    Ok(Containment {
        inside: margin >= 0.0,
        margin,
    })
}

/// The Dirichlet curve point at argument θ.
pub fn curve_point(theta: f64) -> Result<CurvePoint> {
    check_theta(theta)?;
    let gv = g_value(half_angle_cot(theta))?;
    let radius4 = gv * gv;
    Ok(CurvePoint {
        theta,
        radius4,
        z: Complex64::from_polar(radius4, theta),
    })
}

/// Samples the curve at `θ_k = 2πk/(n+1)`, `k = 1..=n`.
pub fn curve_sample(n: usize) -> Result<CurveSample> {
    use rayon::prelude::*;

    if n < 2 {
        return Err(Error::domain(format!("curve sample needs n >= 2, got {n}")));
    }
    let step = TAU / (n + 1) as f64;
    let halfline = (1..=n)
        .into_par_iter()
        .map(|k| curve_point(step * k as f64))
        .collect::<Result<Vec<_>>>()?;
    let whole_line = halfline
        .iter()
        .map(|p| CurvePoint {
            theta: p.theta,
            radius4: 1.0,
            z: Complex64::from_polar(1.0, p.theta),
        })
        .collect();
    Ok(CurveSample { halfline, whole_line })
}

fn check_gamma(gamma_exp: f64) -> Result<()> {
    if gamma_exp > 0.5 && gamma_exp.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("gamma must exceed 1/2, got {gamma_exp}")))
    }
}

/// Sharp self-adjoint constant in `|λ|^γ <= C_γ ∫|V|^{γ+1/2}` on the line.
pub fn keller_constant(gamma_exp: f64) -> Result<f64> {
    check_gamma(gamma_exp)?;
    let ratio = gamma(gamma_exp + 1.0) / (PI.sqrt() * gamma(gamma_exp + 1.5));
    let x = gamma_exp - 0.5;
    let factor = (x / (gamma_exp + 0.5)).powf(x);
    Ok(ratio * factor)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoshRatioSup {
    pub sup: f64,
    pub t_star: f64,
}

/// `(1/2) t^{γ-1/2} / (1+t²)^{(γ+1/2)/2}`, the `|λ|^γ / ∫|V|^{γ+1/2}`
/// ratio for `V = α(α+1)/cosh² x` along `α = it`.
pub fn cosh_ratio_objective(gamma_exp: f64, t: f64) -> f64 {
    0.5 * t.powf(gamma_exp - 0.5) / (1.0 + t * t).powf(0.5 * (gamma_exp + 0.5))
}

/// Supremum of [`cosh_ratio_objective`] over `t > 0`, attained at
/// `t* = sqrt(γ - 1/2)`.
pub fn cosh_ratio_sup(gamma_exp: f64) -> Result<CoshRatioSup> {
    check_gamma(gamma_exp)?;
    let t_star = (gamma_exp - 0.5).sqrt();
    Ok(CoshRatioSup {
        sup: cosh_ratio_objective(gamma_exp, t_star),
        t_star,
    })
}

/// Grid-search cross-check of [`cosh_ratio_sup`] on `t ∈ (0, t_max]`.
pub fn cosh_ratio_sup_by_search(gamma_exp: f64, t_max: f64) -> Result<CoshRatioSup> {
    check_gamma(gamma_exp)?;
    let (t_star, sup) = scan_then_refine_max(
        |t| cosh_ratio_objective(gamma_exp, t),
        0.0,
        t_max,
        20_000,
        false,
        1,
        gfun::REFINE_TOL,
    );
    Ok(CoshRatioSup { sup, t_star })
}
