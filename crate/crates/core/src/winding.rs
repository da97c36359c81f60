//! Zeros of analytic functions in axis-aligned rectangles.
//!
//! The number of zeros enclosed by a rectangle is the winding number of the
//! image of its boundary, `(1/2πi) ∮ f'/f dz`. Each boundary edge is split
//! adaptively until the phase increment over every panel is small and
//! consistent under bisection; the increment `arg(f(z1)/f(z0))` is then the
//! exact value of `∫ f'/f` over that panel. Cells holding more than one zero
//! are quartered, and single zeros are polished by Newton's method.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Self> {
        let finite = [re_lo, re_hi, im_lo, im_hi].iter().all(|v| v.is_finite());
        if !finite || !(re_lo < re_hi) || !(im_lo < im_hi) {
            return Err(Error::domain(format!(
                "degenerate rectangle [{re_lo}, {re_hi}] x [{im_lo}, {im_hi}]"
            )));
        }
        Ok(Rect {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        })
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_lo - slack
            && z.re <= self.re_hi + slack
            && z.im >= self.im_lo - slack
            && z.im <= self.im_hi + slack
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }

    fn diameter(&self) -> f64 {
        (self.re_hi - self.re_lo).hypot(self.im_hi - self.im_lo)
    }

    /// Corners in counter-clockwise order starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }

    fn quarter(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re_lo + fx * (self.re_hi - self.re_lo);
        let ym = self.im_lo + fy * (self.im_hi - self.im_lo);
        [
            Rect {
                re_hi: xm,
                im_hi: ym,
                ..*self
            },
            Rect {
                re_lo: xm,
                im_hi: ym,
                ..*self
            },
            Rect {
                re_lo: xm,
                im_lo: ym,
                ..*self
            },
            Rect {
                re_hi: xm,
                im_lo: ym,
                ..*self
            },
        ]
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{:e}, {:e}] x [{:e}, {:e}]",
            self.re_lo, self.re_hi, self.im_lo, self.im_hi
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootFinderOptions {
    /// Initial panels per edge before adaptive refinement.
    pub edge_pieces: usize,
    /// `|f|` below this on the contour counts as a zero on the boundary.
    pub contour_floor: f64,
    /// Newton stops once `|f| <= residual_tol`.
    pub residual_tol: f64,
    /// Roots closer than this are merged.
    pub merge_dist: f64,
    pub max_depth: usize,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        RootFinderOptions {
            edge_pieces: 64,
            contour_floor: 1e-14,
            residual_tol: 1e-12,
            merge_dist: 1e-9,
            max_depth: 20,
        }
    }
}

const MAX_PANEL_DEPTH: usize = 48;
const PANEL_PHASE: f64 = std::f64::consts::FRAC_PI_4;

/// Raised when the contour passes (numerically) through a zero.
#[derive(Debug)]
struct ContourHit;

fn panel_phase<F>(
    f: &F,
    z0: Complex64,
    z1: Complex64,
    f0: Complex64,
    f1: Complex64,
    depth: usize,
    floor: f64,
) -> std::result::Result<f64, ContourHit>
where
    F: Fn(Complex64) -> Complex64,
{
    let zm = 0.5 * (z0 + z1);
    let fm = f(zm);
    if !(fm.norm() > floor) {
        return Err(ContourHit);
    }
    let whole = (f1 / f0).arg();
    let left = (fm / f0).arg();
    let right = (f1 / fm).arg();
    let consistent = whole.abs() < PANEL_PHASE
        && left.abs() < PANEL_PHASE
        && right.abs() < PANEL_PHASE
        && (left + right - whole).abs() < 1e-9;
    if consistent {
        return Ok(whole);
    }
    if depth >= MAX_PANEL_DEPTH {
        return Err(ContourHit);
    }
    Ok(panel_phase(f, z0, zm, f0, fm, depth + 1, floor)? + panel_phase(f, zm, z1, fm, f1, depth + 1, floor)?)
}

fn winding<F>(f: &F, rect: &Rect, opts: &RootFinderOptions) -> std::result::Result<i64, ContourHit>
where
    F: Fn(Complex64) -> Complex64,
{
    let corners = rect.corners();
    let pieces = opts.edge_pieces.max(4);
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let mut z_prev = a;
        let mut f_prev = f(a);
        if !(f_prev.norm() > opts.contour_floor) {
            return Err(ContourHit);
        }
        for k in 1..=pieces {
            let z = if k == pieces {
                b
            } else {
                a + (b - a) * (k as f64 / pieces as f64)
            };
            let fz = f(z);
            if !(fz.norm() > opts.contour_floor) {
                return Err(ContourHit);
            }
            total += panel_phase(f, z_prev, z, f_prev, fz, 0, opts.contour_floor)?;
            z_prev = z;
            f_prev = fz;
        }
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-3 {
        return Err(ContourHit);
    }
    Ok(rounded as i64)
}

/// Number of zeros of `f` enclosed by `rect`.
pub fn winding_number<F>(f: &F, rect: &Rect, opts: &RootFinderOptions) -> Result<i64>
where
    F: Fn(Complex64) -> Complex64,
{
    winding(f, rect, opts).map_err(|_| Error::domain(format!("contour of {rect} passes through or near a zero")))
}

/// Newton iteration; returns the polished point when `|f| <= tol` is reached.
pub fn newton<F, D>(f: &F, df: &D, mut z: Complex64, tol: f64, max_iter: usize) -> Option<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut fz = f(z);
    for _ in 0..max_iter {
        if fz.norm() <= tol {
            // one extra step typically lands on the rounding floor
            let d = df(z);
            if d.norm() > 0.0 {
                let z2 = z - fz / d;
                let f2 = f(z2);
                if f2.norm() < fz.norm() {
                    return Some(z2);
                }
            }
            return Some(z);
        }
        let d = df(z);
        if !(d.norm() > 0.0) {
            return None;
        }
        z -= fz / d;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        fz = f(z);
    }
    (fz.norm() <= tol).then_some(z)
}

const SPLIT_OFFSETS: [f64; 5] = [0.013_7, -0.021_1, 0.031_3, -0.043_9, 0.057_1];

fn solve_cell<F, D>(
    f: &F,
    df: &D,
    rect: Rect,
    count: i64,
    depth: usize,
    opts: &RootFinderOptions,
    out: &mut Vec<Complex64>,
) -> Result<()>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    if count <= 0 {
        return Ok(());
    }
    let slack = 1e-12 * rect.diameter();
    if count == 1 {
        let c = rect.center();
        let (w, h) = (rect.re_hi - rect.re_lo, rect.im_hi - rect.im_lo);
        let mut starts = vec![c];
        for i in [-1.0, 0.0, 1.0] {
            for j in [-1.0, 0.0, 1.0] {
                if i != 0.0 || j != 0.0 {
                    starts.push(c + Complex64::new(0.3 * i * w, 0.3 * j * h));
                }
            }
        }
        for z0 in starts {
            if let Some(z) = newton(f, df, z0, opts.residual_tol, 100) {
                if rect.contains(z, slack) {
                    out.push(z);
                    return Ok(());
                }
            }
        }
    }
    if depth >= opts.max_depth {
        return Err(Error::RootCount {
            winding: count,
            found: 0,
            region: rect.to_string(),
        });
    }

    for &off in &SPLIT_OFFSETS {
        let children = rect.quarter(0.5 + off, 0.5 - off);
        let counts: std::result::Result<Vec<i64>, ContourHit> = children.iter().map(|r| winding(f, r, opts)).collect();
        if let Ok(counts) = counts {
            if counts.iter().sum::<i64>() == count {
                for (child, &n) in children.iter().zip(&counts) {
                    solve_cell(f, df, *child, n, depth + 1, opts, out)?;
                }
                return Ok(());
            }
        }
    }
    Err(Error::RootCount {
        winding: count,
        found: 0,
        region: format!("{rect} (no clean subdivision)"),
    })
}

/// Outcome of a rectangle search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSearch {
    pub roots: Vec<Complex64>,
    /// Winding number of the (possibly slightly enlarged) search contour.
    pub winding: i64,
    pub rect: Rect,
}

/// All zeros of `f` in `rect`, located by winding numbers and polished by
/// Newton. Fails when the polished count disagrees with the winding number.
pub fn find_roots<F, D>(f: &F, df: &D, rect: Rect, opts: &RootFinderOptions) -> Result<RootSearch>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    // a zero sitting on the contour: enlarge the rectangle slightly
    let mut rect = rect;
    let mut count = None;
    for attempt in 0..6 {
        match winding(f, &rect, opts) {
            Ok(n) => {
                count = Some(n);
                break;
            }
            Err(ContourHit) => {
                let grow = 1e-7 * (attempt as f64 + 1.0) * rect.diameter();
                rect = Rect {
                    re_lo: rect.re_lo - grow * 0.37,
                    re_hi: rect.re_hi + grow * 0.61,
                    im_lo: rect.im_lo - grow * 0.53,
                    im_hi: rect.im_hi + grow * 0.71,
                };
            }
        }
    }
    let count = count.ok_or_else(|| Error::domain(format!("could not place a zero-free contour around {rect}")))?;

    let mut roots = Vec::new();
    solve_cell(f, df, rect, count, 0, opts, &mut roots)?;

    let mut merged: Vec<Complex64> = Vec::with_capacity(roots.len());
    for z in roots {
        if !merged.iter().any(|m| (m - z).norm() <= opts.merge_dist) {
            merged.push(z);
        }
    }
    if merged.len() as i64 != count {
        return Err(Error::RootCount {
            winding: count,
            found: merged.len(),
            region: rect.to_string(),
        });
    }
    Ok(RootSearch {
        roots: merged,
        winding: count,
        rect,
    })
}
