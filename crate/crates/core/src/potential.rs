//! Potentials as functions of position, for the shooting solver.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_with_breaks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    HalfLine,
    WholeLine,
}

/// A complex potential `V(x)` that is negligible beyond `support_radius`.
pub trait PotentialFn: Send + Sync {
    fn evaluate(&self, x: f64) -> Complex64;

    /// `|V|` is treated as zero for `|x| > support_radius()`.
    fn support_radius(&self) -> f64;

    fn domain(&self) -> Domain {
        Domain::HalfLine
    }

    /// Abscissae the integrators must not step across (kinks, narrow bumps).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Bound on `∫ |V|` outside the support interval.
    fn tail_bound(&self) -> f64 {
        0.0
    }

    /// `∫ |V|` over the support interval by adaptive quadrature.
    fn l1_norm(&self) -> f64 {
        let l = self.support_radius();
        let lo = match self.domain() {
            Domain::HalfLine => 0.0,
            Domain::WholeLine => -l,
        };
        integrate_with_breaks(&|x| self.evaluate(x).norm(), lo, l, &self.breakpoints(), 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPotential {
    pub support: f64,
}

impl PotentialFn for ZeroPotential {
    fn evaluate(&self, _x: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn support_radius(&self) -> f64 {
        self.support
    }
    fn l1_norm(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: Complex64,
    pub center: f64,
    pub width: f64,
}

/// `Σ a_k exp(-(x - c_k)² / (2 w_k²))` on the halfline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBumps {
    pub bumps: Vec<Bump>,
    pub support: f64,
}

impl GaussianBumps {
    pub fn new(bumps: Vec<Bump>) -> Result<Self> {
        for b in &bumps {
            if !(b.width > 0.0) || !b.center.is_finite() {
                return Err(Error::domain(format!("invalid bump {b:?}")));
            }
        }
        let support = bumps.iter().map(|b| b.center + 10.0 * b.width).fold(1.0, f64::max);
        Ok(GaussianBumps { bumps, support })
    }

    /// A unit-area Gaussian of width `width` carrying mass `c` at `b`.
    pub fn mollified_delta(c: Complex64, b: f64, width: f64) -> Result<Self> {
        if !(b >= 0.0) {
            return Err(Error::domain(format!("delta location must be >= 0, got {b}")));
        }
        let amplitude = c / (width * (2.0 * PI).sqrt());
        Self::new(vec![Bump {
            amplitude,
            center: b,
            width,
        }])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        GaussianBumps {
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump {
                    amplitude: b.amplitude * factor,
                    ..*b
                })
                .collect(),
            support: self.support,
        }
    }
}

impl PotentialFn for GaussianBumps {
    fn evaluate(&self, x: f64) -> Complex64 {
        self.bumps
            .iter()
            .map(|b| {
                let t = (x - b.center) / b.width;
                b.amplitude * (-0.5 * t * t).exp()
            })
            .sum()
    }

    fn support_radius(&self) -> f64 {
        self.support
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        for b in &self.bumps {
            for k in -8..=8 {
                let x = b.center + k as f64 * b.width;
                if x > 0.0 && x < self.support {
                    pts.push(x);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn tail_bound(&self) -> f64 {
        // mass of each Gaussian beyond its 10-width cutoff
        self.bumps.iter().map(|b| b.amplitude.norm() * b.width * 1e-22).sum()
    }
}

/// `α(α+1) / cosh² x` on the whole line; `λ = -α²` is an eigenvalue with
/// eigenfunction `(cosh x)^{-α}` when `Re α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sech2 {
    pub alpha: Complex64,
    pub support: f64,
}

impl Sech2 {
    /// Support radius chosen so that `sech²(L) <= 1e-14`.
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !(alpha.re > 0.0) {
            return Err(Error::domain(format!("need Re alpha > 0, got {alpha}")));
        }
        Ok(Sech2 {
            alpha,
            support: 1e7f64.acosh(),
        })
    }

    pub fn eigenvalue(&self) -> Complex64 {
        -self.alpha * self.alpha
    }
}

impl PotentialFn for Sech2 {
    fn evaluate(&self, x: f64) -> Complex64 {
        let s = 1.0 / x.cosh();
        self.alpha * (self.alpha + 1.0) * (s * s)
    }
    fn support_radius(&self) -> f64 {
        self.support
    }
    fn domain(&self) -> Domain {
        Domain::WholeLine
    }
    fn tail_bound(&self) -> f64 {
        // ∫_L^∞ sech² = 1 - tanh L, both sides
        2.0 * (self.alpha * (self.alpha + 1.0)).norm() * (1.0 - self.support.tanh())
    }
}

/// `V(|x|)` on the whole line, built from a halfline potential.
pub struct EvenExtension<'a> {
    pub inner: &'a dyn PotentialFn,
}

impl PotentialFn for EvenExtension<'_> {
    fn evaluate(&self, x: f64) -> Complex64 {
        self.inner.evaluate(x.abs())
    }
    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }
    fn domain(&self) -> Domain {
        Domain::WholeLine
    }
    fn breakpoints(&self) -> Vec<f64> {
        let inner = self.inner.breakpoints();
        let mut pts: Vec<f64> = inner.iter().map(|x| -x).chain(inner.iter().copied()).collect();
        pts.push(0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
    fn tail_bound(&self) -> f64 {
        2.0 * self.inner.tail_bound()
    }
}

/// Piecewise-linear interpolation of tabulated values, zero outside the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl PiecewiseLinear {
    pub fn new(nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::domain(
                "piecewise-linear potential needs >= 2 matching nodes and values",
            ));
        }
        if nodes[0] < 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("nodes must be non-negative and strictly increasing"));
        }
        Ok(PiecewiseLinear { nodes, values })
    }
}

impl PotentialFn for PiecewiseLinear {
    fn evaluate(&self, x: f64) -> Complex64 {
        let n = self.nodes.len();
        if x < self.nodes[0] || x > self.nodes[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let i = self.nodes.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let t = (x - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }
    fn support_radius(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }
    fn l1_norm(&self) -> f64 {
        // |V| is not linear between nodes; integrate each panel adaptively
        integrate_with_breaks(
            &|x| self.evaluate(x).norm(),
            self.nodes[0],
            self.support_radius(),
            &self.nodes,
            1e-12,
        )
    }
}

/// Parameters for [`random_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomPotentialSpec {
    pub n_bumps: usize,
    pub amplitude_scale: f64,
    /// Bumps are centred in `[0.15 L, 0.65 L]` with widths in `[0.04 L, 0.12 L]`.
    pub support: f64,
    pub rng_seed: u64,
}

impl Default for RandomPotentialSpec {
    fn default() -> Self {
        RandomPotentialSpec {
            n_bumps: 3,
            amplitude_scale: 1.0,
            support: 8.0,
            rng_seed: 0,
        }
    }
}

/// Sum of Gaussian bumps with random complex amplitudes, reproducible for a
/// fixed seed. Amplitude phases lie in `[-3π/4, 3π/4]`, moduli in
/// `[0.5, 1] · amplitude_scale`.
pub fn random_potential(spec: &RandomPotentialSpec) -> Result<GaussianBumps> {
    if !(spec.support > 0.0) || !spec.amplitude_scale.is_finite() {
        return Err(Error::domain(format!("invalid random potential spec {spec:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let l = spec.support;
    let bumps = (0..spec.n_bumps)
        .map(|_| {
            let center = rng.gen_range(0.15 * l..0.65 * l);
            let width = rng.gen_range(0.04 * l..0.12 * l);
            let modulus = rng.gen_range(0.5..1.0) * spec.amplitude_scale;
            let phase = rng.gen_range(-0.75 * PI..0.75 * PI);
            Bump {
                amplitude: Complex64::from_polar(modulus, phase),
                center,
                width,
            }
        })
        .collect();
    let mut v = GaussianBumps::new(bumps)?;
    v.support = v.support.max(l);
    Ok(v)
}

/// Writes `x,re_v,im_v` rows with 17 significant digits.
pub fn write_potential_csv<W: Write>(mut w: W, nodes: &[f64], values: &[Complex64]) -> std::io::Result<()> {
    writeln!(w, "x,re_v,im_v")?;
    for (x, v) in nodes.iter().zip(values) {
        writeln!(w, "{},{},{}", fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im))?;
    }
    Ok(())
}

/// Locale-independent 17-significant-digit rendering.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reads `x,re_v,im_v` rows (header required).
pub fn read_potential_csv<R: BufRead>(r: R) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == "x,re_v,im_v" => {}
        Some((_, Ok(h))) => {
            return Err(Error::Parse {
                line: 1,
                detail: format!("expected header x,re_v,im_v, got {h:?}"),
            })
        }
        _ => {
            return Err(Error::Parse {
                line: 1,
                detail: "missing header".into(),
            })
        }
    }
    for (i, line) in lines {
        let line = line.map_err(|e| Error::Parse {
            line: i + 1,
            detail: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: i + 1,
                detail: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                detail: format!("{s:?}: {e}"),
            })
        };
        nodes.push(parse(fields[0])?);
        values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
    }
    Ok((nodes, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bumps_is_zero() {
        let v = random_potential(&RandomPotentialSpec {
            n_bumps: 0,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(v.l1_norm(), 0.0);
        assert_eq!(v.evaluate(1.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn seed_is_reproducible() {
        let spec = RandomPotentialSpec {
            rng_seed: 42,
            ..Default::default()
        };
        let a = random_potential(&spec).unwrap();
        let b = random_potential(&spec).unwrap();
        for k in 0..100 {
            let x = 0.1 * k as f64;
            assert_eq!(a.evaluate(x).re.to_bits(), b.evaluate(x).re.to_bits());
            assert_eq!(a.evaluate(x).im.to_bits(), b.evaluate(x).im.to_bits());
        }
    }

    #[test]
    fn norm_is_linear_in_amplitude() {
        let base = RandomPotentialSpec {
            rng_seed: 9,
            ..Default::default()
        };
        let n1 = random_potential(&base).unwrap().l1_norm();
        for s in [0.5, 2.0, 7.0] {
            let ns = random_potential(&RandomPotentialSpec {
                amplitude_scale: s,
                ..base
            })
            .unwrap()
            .l1_norm();
            assert!((ns - s * n1).abs() < 1e-9 * s.max(1.0));
        }
    }

    #[test]
    fn mollified_delta_carries_mass() {
        let c = Complex64::new(0.6, -0.8);
        let v = GaussianBumps::mollified_delta(c, 3.0, 1e-3).unwrap();
        assert!((v.l1_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sech2_support_is_wide_enough() {
        let v = Sech2::new(Complex64::new(0.7, 0.4)).unwrap();
        let s = 1.0 / v.support.cosh();
        assert!(s * s <= 1e-14);
        assert!(Sech2::new(Complex64::new(-0.1, 1.0)).is_err());
    }

    #[test]
    fn piecewise_linear_interpolates() {
        let v = PiecewiseLinear::new(
            vec![0.0, 1.0, 3.0],
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, 2.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(v.evaluate(0.5), Complex64::new(1.0, 1.0));
        assert_eq!(v.evaluate(2.0), Complex64::new(1.0, 1.0));
        assert_eq!(v.evaluate(3.5), Complex64::new(0.0, 0.0));
        assert!((v.l1_norm() - 3.0 * 2f64.sqrt()).abs() < 1e-10);
        assert!(PiecewiseLinear::new(vec![0.0, 0.0], vec![Complex64::new(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(read_potential_csv("x,v\n".as_bytes()).is_err());
        assert!(read_potential_csv("x,re_v,im_v\n1,2\n".as_bytes()).is_err());
        assert!(read_potential_csv("x,re_v,im_v\n1,a,2\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_preserves_bits() {
        let nodes = vec![0.0, 0.1, 1.0 / 3.0];
        let values = vec![
            Complex64::new(PI, -1e-300),
            Complex64::new(1.0 / 7.0, 2.5),
            Complex64::new(-0.0, 6.02e23),
        ];
        let mut buf = Vec::new();
        write_potential_csv(&mut buf, &nodes, &values).unwrap();
        let (n2, v2) = read_potential_csv(buf.as_slice()).unwrap();
        assert_eq!(nodes, n2);
        assert_eq!(values, v2);
    }
}
