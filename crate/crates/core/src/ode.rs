//! Dormand–Prince 5(4) integration of `ψ'' = q(x) ψ` for complex `q`.
//!
//! The state `(ψ, ψ')` is rescaled by a real factor whenever its size leaves
//! `[1e-100, 1e100]`; the accumulated logarithm is returned separately so the
//! true solution is `state · e^{log_scale}`. Because the equation is linear,
//! the rescaling commutes with the Runge–Kutta map.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: State,
    /// Natural log of the factor removed by rescaling.
    pub log_scale: f64,
    /// Natural log of the largest `|ψ|` met at a mesh point, true scale.
    pub log_peak: f64,
    /// Accepted step endpoints, from the initial to the final abscissa.
    pub mesh: Vec<f64>,
}

const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;
const MAX_STEPS: usize = 1_000_000;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[inline]
fn rhs(q: Complex64, y: &State) -> State {
    [y[1], q * y[0]]
}

/// One Dormand–Prince step; returns the fifth-order update and the error
/// estimate vector.
fn dp_step<Q>(q: &Q, x: f64, y: &State, h: f64) -> (State, State)
where
    Q: Fn(f64) -> Complex64,
{
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
    let q_end = q(x + h);
    for i in 0..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                yi[0] += kj[0] * (h * a);
                yi[1] += kj[1] * (h * a);
            }
        }
        let qi = if C[i] == 1.0 { q_end } else { q(x + C[i] * h) };
        k[i] = rhs(qi, &yi);
    }
    // the last stage is evaluated at the fifth-order solution
    let y_new = {
        let mut acc = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[6][j];
            acc[0] += kj[0] * (h * b);
            acc[1] += kj[1] * (h * b);
        }
        acc
    };
    let mut err = [Complex64::new(0.0, 0.0); 2];
    for (j, kj) in k.iter().enumerate() {
        err[0] += kj[0] * (h * E[j]);
        err[1] += kj[1] * (h * E[j]);
    }
    (y_new, err)
}

fn rescale(y: &mut State, log_scale: &mut f64) {
    let size = y[0].norm().max(y[1].norm());
    if size > RESCALE_HI || (size < RESCALE_LO && size > 0.0) {
        y[0] /= size;
        y[1] /= size;
        *log_scale += size.ln();
    }
}

fn log_modulus(y: &State, log_scale: f64) -> f64 {
    y[0].norm().ln() + log_scale
}

fn segments(x0: f64, x1: f64, breakpoints: &[f64]) -> Vec<f64> {
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > lo && b < hi).collect();
    pts.push(x0);
    pts.push(x1);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if x1 < x0 {
        pts.reverse();
    }
    pts
}

/// Adaptive integration from `x0` to `x1` (either direction), never stepping
/// across a breakpoint.
pub fn integrate_adaptive<Q>(
    q: &Q,
    x0: f64,
    x1: f64,
    y0: State,
    breakpoints: &[f64],
    tol: Tolerances,
) -> Result<Trajectory>
where
    Q: Fn(f64) -> Complex64,
{
    let mut y = y0;
    let mut log_scale = 0.0;
    let mut log_peak = log_modulus(&y, 0.0);
    let mut mesh = vec![x0];
    let mut steps = 0usize;
    let edges = segments(x0, x1, breakpoints);

    let mut h = 0.1 / (1.0 + q(x0).norm().sqrt());
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let dir = (b - a).signum();
        let mut x = a;
        loop {
            let remaining = (b - x).abs();
            if remaining <= 1e-15 * (1.0 + b.abs()) {
                break;
            }
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let (y_new, err) = dp_step(q, x, &y, dir * step);
            let mut acc = 0.0;
            for i in 0..2 {
                let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                acc += (err[i].norm() / sc).powi(2);
            }
            let err_norm = (0.5 * acc).sqrt();
            if !err_norm.is_finite() {
                return Err(Error::NonConvergence {
                    method: "Dormand-Prince",
                    iterations: steps,
                    detail: format!("non-finite error estimate at x = {x}"),
                });
            }
            if err_norm <= 1.0 {
                x = if last { b } else { x + dir * step };
                y = y_new;
                rescale(&mut y, &mut log_scale);
                log_peak = log_peak.max(log_modulus(&y, log_scale));
                mesh.push(x);
            }
            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = step * factor;
            if h < 1e-13 * (1.0 + x.abs()) {
                return Err(Error::StepUnderflow { x, h });
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergence {
                    method: "Dormand-Prince",
                    iterations: steps,
                    detail: "step budget exhausted".into(),
                });
            }
        }
    }
    Ok(Trajectory {
        state: y,
        log_scale,
        log_peak,
        mesh,
    })
}

/// Replays the fifth-order map on a fixed mesh (no error control).
pub fn integrate_on_mesh<Q>(q: &Q, mesh: &[f64], y0: State) -> Trajectory
where
    Q: Fn(f64) -> Complex64,
{
    let mut y = y0;
    let mut log_scale = 0.0;
    let mut log_peak = log_modulus(&y, 0.0);
    for w in mesh.windows(2) {
        let (y_new, _) = dp_step(q, w[0], &y, w[1] - w[0]);
        y = y_new;
        rescale(&mut y, &mut log_scale);
        log_peak = log_peak.max(log_modulus(&y, log_scale));
    }
    Trajectory {
        state: y,
        log_scale,
        log_peak,
        mesh: mesh.to_vec(),
    }
}
