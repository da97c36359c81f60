//! The extremal function `g(a) = sup_{y >= 0} |e^{iay} - e^{-y}|`.
//!
//! For `a != 0` the supremum is attained at some `y0` with
//! `pi/3 < |a| y0 <= pi`, so the search is confined to that bracket: a dense
//! scan locates the peak and golden-section search polishes it. At `a = 0`
//! the objective is `1 - e^{-y}` and the value 1 is only reached as
//! `y -> infinity`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::scan_then_refine_max;

/// Number of scan points across the maximizer bracket.
pub const SCAN_POINTS: usize = 4096;

/// Relative bracket width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GResult {
    pub a: f64,
    /// The supremum, in `[1, 2)`.
    pub value: f64,
    /// Maximizer `y0`, absent when the supremum is not attained.
    pub argmax: Option<f64>,
    pub attained: bool,
}

/// `|e^{iay} - e^{-y}|`, evaluated as `sqrt(1 - 2 e^{-y} cos(ay) + e^{-2y})`.
pub fn g_objective(a: f64, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::domain(format!("g objective needs y >= 0, got {y}")));
    }
    Ok(objective(a, y))
}

#[inline]
fn objective(a: f64, y: f64) -> f64 {
    let e = (-y).exp();
    (1.0 - 2.0 * e * (a * y).cos() + e * e).max(0.0).sqrt()
}

/// Computes `g(a)` together with its maximizer.
pub fn g(a: f64) -> Result<GResult> {
    if !a.is_finite() {
        return Err(Error::domain(format!("g needs a finite argument, got {a}")));
    }
    let abs_a = a.abs();
    let unattained = GResult {
        a,
        value: 1.0,
        argmax: None,
        attained: false,
    };
    if abs_a == 0.0 {
        return Ok(unattained);
    }

    let mut hi = PI / abs_a;
    if !hi.is_finite() {
        // the bracket lies beyond any representable y; the objective is 1 there
        return Ok(unattained);
    }
    while abs_a * hi > PI {
        hi = hi.next_down();
    }
    let mut lo = PI / (3.0 * abs_a);
    while abs_a * lo <= PI / 3.0 {
        lo = lo.next_up();
    }

    let (y0, value) = scan_then_refine_max(|y| objective(abs_a, y), lo, hi, SCAN_POINTS, false, 2, REFINE_TOL);
    let y0 = y0.clamp(lo, hi);
    Ok(GResult {
        a,
        value: value.max(1.0),
        argmax: Some(y0),
        attained: true,
    })
}

/// Convenience accessor for `g(a).value`.
pub fn g_value(a: f64) -> Result<f64> {
    g(a).map(|r| r.value)
}

/// Lower and upper envelopes `1 + e^{-pi/a} <= g(a) <= min(2, 1 + e^{-pi/(3a)})`.
pub fn g_envelopes(a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("g envelopes need a > 0, got {a}")));
    }
    let lower = 1.0 + (-PI / a).exp();
    let upper = (1.0 + (-PI / (3.0 * a)).exp()).min(2.0);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_examples() {
        assert_eq!(g_objective(5.0, 0.0).unwrap(), 0.0);
        let v = g_objective(1.0, PI).unwrap();
        assert!((v - (1.0 + (-PI).exp())).abs() < 1e-15);
        let v = g_objective(0.0, 2f64.ln()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_negative_y() {
        assert!(matches!(g_objective(1.0, -0.1), Err(Error::Domain(_))));
        assert!(g_objective(1.0, f64::NAN).is_err());
    }

    #[test]
    fn zero_is_unattained_one() {
        let r = g(0.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(!r.attained);
        assert!(r.argmax.is_none());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(g(f64::INFINITY).is_err());
        assert!(g(f64::NAN).is_err());
    }

    // Dense-grid oracle (10^6 points on (0, pi], mpmath refinement).
    const G_AT_ONE: f64 = 1.069_432_244_918_415;
    const ARGMAX_AT_ONE: f64 = 2.284_102_297_393_826;

    #[test]
    fn g_at_one_matches_regression_constant() {
        let r = g(1.0).unwrap();
        assert!((r.value - G_AT_ONE).abs() < 1e-12, "{}", r.value);
        assert!((r.argmax.unwrap() - ARGMAX_AT_ONE).abs() < 1e-6);
        assert!(r.value >= 1.0 + (-PI).exp());
    }

    #[test]
    fn g_at_hundred_near_two() {
        let v = g_value(100.0).unwrap();
        assert!((2.0 - PI / 100.0 - 0.002..2.0).contains(&v));
        assert!((v - 1.969_167_845_013_199_1).abs() < 1e-12);
    }

    #[test]
    fn argmax_bracket_is_strict() {
        for &a in &[1e-3, 0.01, 0.3, 1.0, 7.0, 123.0, 1e4, 1e6] {
            let r = g(a).unwrap();
            let t = a * r.argmax.unwrap();
            assert!(t > PI / 3.0 && t <= PI, "a = {a}, a*y0 = {t}");
        }
    }

    #[test]
    fn envelopes_examples() {
        let (lo, hi) = g_envelopes(1.0).unwrap();
        assert_eq!(lo, 1.0 + (-PI).exp());
        assert_eq!(hi, 1.0 + (-PI / 3.0).exp());
        let (_, hi) = g_envelopes(0.1).unwrap();
        assert!((hi - 1.0 - (-10.0 * PI / 3.0).exp()).abs() < 1e-16);
        assert!((hi - 1.0 - 2.8e-5).abs() < 1e-6);
        assert!(g_envelopes(0.0).is_err());
        assert!(g_envelopes(-1.0).is_err());
    }

    #[test]
    fn envelopes_contain_g() {
        for &a in &[0.2, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let (lo, hi) = g_envelopes(a).unwrap();
            let v = g_value(a).unwrap();
            assert!(lo <= v && v <= hi, "a = {a}: {lo} <= {v} <= {hi}");
        }
    }
}
