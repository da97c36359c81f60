//! Shooting eigensolver for `-ψ'' - Vψ = λψ` with decaying complex `V`.
//!
//! The decaying solution is started at `x = L` from the free solution
//! `e^{-√μ x}` (`μ = -λ`) and integrated inward to the boundary. The miss
//! functional is normalized so that it equals 1 for `V ≡ 0` and is analytic
//! in `λ` off `[0, ∞)`; it is further divided by the peak modulus of the
//! solution (held fixed within each Newton step) so that residuals are
//! comparable across `λ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::birman_schwinger::{assemble, eigenvalue_nearest_one, SampledPotential};
use crate::delta::sort_complex;
use crate::error::{Error, Result};
use crate::ode::{integrate_adaptive, integrate_on_mesh, State, Tolerances, Trajectory};
use crate::potential::{Domain, PotentialFn};
use crate::region::{contains, BoundaryCondition, SpectralPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub step_control: Tolerances,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            step_control: Tolerances::default(),
            newton_tol: 1e-10,
            max_newton: 50,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let t = self.step_control;
        if !(t.rtol > 0.0 && t.atol > 0.0 && self.newton_tol > 0.0) || self.max_newton == 0 {
            return Err(Error::domain("shooting tolerances must be positive"));
        }
        Ok(())
    }
}

/// Boundary data of the decaying solution normalized by `ψ(L) = e^{-√μ L}`.
///
/// True values are `psi · e^{log_factor}` and `dpsi · e^{log_factor}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InwardSolution {
    pub psi: Complex64,
    pub dpsi: Complex64,
    pub log_factor: Complex64,
    /// `ln max |ψ|` over the mesh, true scale.
    pub log_peak: f64,
    pub mesh: Vec<f64>,
}

impl InwardSolution {
    fn from_trajectory(t: Trajectory, s: Complex64, l: f64) -> Self {
        let shift = s * l;
        InwardSolution {
            psi: t.state[0],
            dpsi: t.state[1],
            log_factor: Complex64::new(t.log_scale, 0.0) - shift,
            log_peak: t.log_peak - shift.re,
            mesh: t.mesh,
        }
    }

    pub fn psi0(&self) -> Complex64 {
        self.psi * self.log_factor.exp()
    }

    pub fn dpsi0(&self) -> Complex64 {
        self.dpsi * self.log_factor.exp()
    }

    /// `ψ'(0)/ψ(0)`, free of any scaling.
    pub fn log_derivative(&self) -> Complex64 {
        self.dpsi / self.psi
    }
}

fn mu_and_root(lambda: Complex64) -> Result<(Complex64, Complex64)> {
    let point = SpectralPoint::new(lambda)?;
    let mu = point.mu();
    let s = mu.sqrt();
    if !(s.re > 0.0) {
        return Err(Error::domain(format!(
            "Re sqrt(mu) must be positive at lambda = {lambda}"
        )));
    }
    Ok((mu, s))
}

/// Integrates from `start` (`±L`) to 0; `sign` is +1 for `x > 0`.
fn run(
    potential: &dyn PotentialFn,
    mu: Complex64,
    s: Complex64,
    sign: f64,
    tol: Tolerances,
    mesh: Option<&[f64]>,
) -> Result<InwardSolution> {
    let l = potential.support_radius();
    let q = |x: f64| mu - potential.evaluate(x);
    let y0: State = [Complex64::new(1.0, 0.0), -sign * s];
    let traj = match mesh {
        Some(m) => integrate_on_mesh(&q, m, y0),
        None => {
            let bps: Vec<f64> = potential.breakpoints();
            integrate_adaptive(&q, sign * l, 0.0, y0, &bps, tol)?
        }
    };
    if !(traj.state[0].norm().is_finite() && traj.state[1].norm().is_finite()) {
        return Err(Error::NonConvergence {
            method: "inward integration",
            iterations: traj.mesh.len(),
            detail: "overflow despite renormalization".into(),
        });
    }
    Ok(InwardSolution::from_trajectory(traj, s, l))
}

/// The decaying solution on `x >= 0`, integrated from `L` to 0.
pub fn integrate_inward(
    potential: &dyn PotentialFn,
    lambda: Complex64,
    config: &ShootingConfig,
) -> Result<InwardSolution> {
    config.validate()?;
    let (mu, s) = mu_and_root(lambda)?;
    run(potential, mu, s, 1.0, config.step_control, None)
}

/// Integration meshes reused for finite-difference derivatives.
#[derive(Debug, Clone, PartialEq)]
struct Meshes {
    right: Vec<f64>,
    left: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
struct MissValue {
    /// Jost-normalized functional, scaled by `e^{-norm_log}`.
    value: Complex64,
    /// Natural log of the peak normalization that was applied.
    norm_log: f64,
}

/// Miss functional as a function of `s = √μ`; for compactly supported `V`
/// it is entire in `s`, so `Re s <= 0` is admissible here.
fn jost_combination(
    potential: &dyn PotentialFn,
    s: Complex64,
    bc: BoundaryCondition,
    config: &ShootingConfig,
    meshes: Option<&Meshes>,
    fixed_norm: Option<f64>,
) -> Result<(MissValue, Meshes)> {
    let mu = s * s;
    let tol = config.step_control;
    let right = run(potential, mu, s, 1.0, tol, meshes.map(|m| m.right.as_slice()))?;
    match bc {
        BoundaryCondition::WholeLine => {
            if potential.domain() != Domain::WholeLine {
                return Err(Error::domain("whole-line miss needs a whole-line potential"));
            }
            let left = run(potential, mu, s, -1.0, tol, meshes.and_then(|m| m.left.as_deref()))?;
            let norm_log = fixed_norm.unwrap_or(right.log_peak.max(0.0) + left.log_peak.max(0.0));
            // W = ψ₊ψ₋' - ψ₊'ψ₋, equal to 2√μ when V ≡ 0
            let w = right.psi * left.dpsi - right.dpsi * left.psi;
            let value = w / (2.0 * s) * (right.log_factor + left.log_factor - norm_log).exp();
            Ok((
                MissValue { value, norm_log },
                Meshes {
                    right: right.mesh,
                    left: Some(left.mesh),
                },
            ))
        }
        _ => {
            bc.validate()?;
            let norm_log = fixed_norm.unwrap_or(right.log_peak.max(0.0));
            let scale = (right.log_factor - norm_log).exp();
            let raw = match bc {
                BoundaryCondition::Dirichlet => right.psi,
                BoundaryCondition::Neumann => right.dpsi / (-s),
                BoundaryCondition::Robin { sigma } => (right.dpsi - sigma * right.psi) / (-s - sigma),
                BoundaryCondition::WholeLine => unreachable!(),
            };
            Ok((
                MissValue {
                    value: raw * scale,
                    norm_log,
                },
                Meshes {
                    right: right.mesh,
                    left: None,
                },
            ))
        }
    }
}

/// Boundary functional whose zeros in `λ` are the eigenvalues.
///
/// Dirichlet: `ψ(0)`; Neumann/Robin: `ψ'(0) - σψ(0)`; whole line: the
/// Wronskian at 0 of the solutions decaying at `±∞`. Each is scaled to equal
/// 1 for `V ≡ 0` and divided by `max(1, max|ψ|)`.
pub fn miss(
    potential: &dyn PotentialFn,
    lambda: Complex64,
    bc: BoundaryCondition,
    config: &ShootingConfig,
) -> Result<Complex64> {
    config.validate()?;
    let (_, s) = mu_and_root(lambda)?;
    Ok(jost_combination(potential, s, bc, config, None, None)?.0.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: Complex64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSearch {
    pub eigenvalues: Vec<Complex64>,
    pub failures: Vec<SeedFailure>,
}

const FREEZE_MESH_BELOW: f64 = 1e-4;
/// Newton runs on loose step control until the residual drops below this.
const COARSE_BELOW: f64 = 1e-2;
const COARSE_TOLERANCES: Tolerances = Tolerances { rtol: 1e-6, atol: 1e-8 };
const DIVERGENCE_FACTOR: f64 = 4.0;
/// Consecutive iterates with `Re s < 0` after which a seed is abandoned.
const RESONANCE_PATIENCE: usize = 10;

/// Newton iteration in `s = √μ` from one seed. `None` means the iterate
/// settled on, or kept heading for, a root with `Re s <= 0`, which is not an
/// eigenvalue.
fn newton_from_seed(
    potential: &dyn PotentialFn,
    bc: BoundaryCondition,
    seed: Complex64,
    config: &ShootingConfig,
    lambda_cap: f64,
) -> Result<Option<Complex64>> {
    let (_, mut s) = mu_and_root(seed)?;
    let s_cap = lambda_cap.sqrt();
    let mut frozen: Option<Meshes> = None;
    let fail = |iterations: usize, detail: String| Error::NonConvergence {
        method: "Newton (shooting)",
        iterations,
        detail,
    };
    let coarse = ShootingConfig {
        step_control: Tolerances {
            rtol: config.step_control.rtol.max(COARSE_TOLERANCES.rtol),
            atol: config.step_control.atol.max(COARSE_TOLERANCES.atol),
        },
        ..*config
    };
    let mut residual = f64::INFINITY;
    let mut outside = 0;
    for it in 0..config.max_newton {
        let stage = if residual > COARSE_BELOW { &coarse } else { config };
        let (centre, meshes) = match &frozen {
            Some(m) => (jost_combination(potential, s, bc, config, Some(m), None)?.0, m.clone()),
            None => jost_combination(potential, s, bc, stage, None, None)?,
        };
        let f = centre.value;
        residual = f.norm();
        if residual <= COARSE_BELOW && std::ptr::eq(stage, &coarse) {
            continue;
        }
        if residual <= config.newton_tol {
            return Ok((s.re > 0.0).then(|| -s * s));
        }
        if residual < FREEZE_MESH_BELOW && frozen.is_none() {
            frozen = Some(meshes.clone());
        }
        // step 1e-7 (1 + |λ|) in λ corresponds to this step in s
        let h = 1e-7 * (1.0 + s.norm_sqr()) / (2.0 * s.norm()).max(1.0);
        let eval = |z: Complex64| {
            jost_combination(potential, z, bc, config, Some(&meshes), Some(centre.norm_log)).map(|(v, _)| v.value)
        };
        let df = (eval(s + h)? - eval(s - h)?) / (2.0 * h);
        if df.norm() == 0.0 || !df.norm().is_finite() {
            return Err(fail(it, format!("vanishing derivative at lambda = {}", -s * s)));
        }
        let mut step = f / df;
        let cap = 0.5 * (1.0 + s.norm());
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        s -= step;
        outside = if s.re < 0.0 { outside + 1 } else { 0 };
        if outside >= RESONANCE_PATIENCE {
            return Ok(None);
        }
        if s.norm() > s_cap {
            return Err(fail(it + 1, format!("iterate escaped to lambda = {}", -s * s)));
        }
    }
    Err(fail(config.max_newton, format!("from seed {seed}")))
}

/// Newton iteration on [`miss`] from every seed, in parallel.
///
/// The iteration runs in `s = √μ`, where the cut `[0, ∞)` of the `λ`-plane
/// becomes the imaginary axis and the miss functional stays analytic across it.
///
/// Converged roots closer than `1e-6 (1 + |λ|)` to `[0, ∞)` are discarded;
/// the rest are deduplicated at `1e-8 (1 + |λ|)` and sorted.
pub fn find_eigenvalues(
    potential: &dyn PotentialFn,
    bc: BoundaryCondition,
    seeds: &[Complex64],
    config: &ShootingConfig,
) -> Result<EigenSearch> {
    config.validate()?;
    bc.validate()?;
    for &seed in seeds {
        SpectralPoint::new(seed)?;
    }
    let norm = potential.l1_norm();
    let seed_max = seeds.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lambda_cap = DIVERGENCE_FACTOR * (1.0 + norm * norm).max(seed_max);
    let outcomes: Vec<Result<Option<Complex64>>> = seeds
        .par_iter()
        .map(|&seed| newton_from_seed(potential, bc, seed, config, lambda_cap))
        .collect();

    let mut roots: Vec<Complex64> = Vec::new();
    let mut failures = Vec::new();
    for (&seed, outcome) in seeds.iter().zip(outcomes) {
        match outcome {
            Ok(Some(z)) => {
                let scale = 1.0 + z.norm();
                let off_axis = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
                if off_axis < 1e-6 * scale {
                    continue;
                }
                if !roots.iter().any(|r| (r - z).norm() <= 1e-8 * scale) {
                    roots.push(z);
                }
            }
            Ok(None) => {}
            Err(e) => failures.push(SeedFailure {
                seed,
                reason: e.to_string(),
            }),
        }
    }
    sort_complex(&mut roots);
    Ok(EigenSearch {
        eigenvalues: roots,
        failures,
    })
}

pub const SEED_RADII: [f64; 4] = [0.01, 0.1, 1.0, 10.0];
pub const SEED_ANGLES: usize = 16;

/// Log-polar lattice `λ = -μ`, `|μ| ∈ {0.01, 0.1, 1, 10} · norm²`,
/// `arg μ = -π + 2π(k + 1/2)/16`.
pub fn default_seeds(v_norm: f64) -> Vec<Complex64> {
    let base = if v_norm > 0.0 { v_norm * v_norm } else { 1.0 };
    let mut out = Vec::with_capacity(SEED_RADII.len() * SEED_ANGLES);
    for r in SEED_RADII {
        for k in 0..SEED_ANGLES {
            let arg = -std::f64::consts::PI + std::f64::consts::TAU * (k as f64 + 0.5) / SEED_ANGLES as f64;
            out.push(-Complex64::from_polar(r * base, arg));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub lambda: Complex64,
    pub margin: f64,
    pub certificate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub bc: BoundaryCondition,
    pub v_norm: f64,
    pub entries: Vec<AuditEntry>,
    pub failures: Vec<SeedFailure>,
    pub passed: bool,
}

impl AuditReport {
    pub fn offending(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries
            .iter()
            .filter(|e| e.margin < AUDIT_MARGIN_FLOOR || !(e.certificate <= AUDIT_CERTIFICATE_CAP))
    }
}

pub const AUDIT_MARGIN_FLOOR: f64 = -1e-6;
pub const AUDIT_CERTIFICATE_CAP: f64 = 1e-3;

/// Base grid spacing for the certificate at eigenvalue `λ`.
fn certificate_spacing(potential: &dyn PotentialFn, lo: f64, hi: f64, lambda: Complex64) -> f64 {
    let vmax = (0..=400)
        .map(|k| potential.evaluate(lo + (hi - lo) * k as f64 / 400.0).norm())
        .fold(0.0, f64::max);
    0.25 / (lambda.norm().sqrt() + vmax.sqrt() + 1.0)
}

/// Uniform nodes of spacing about `h`, plus the breakpoints, with every gap
/// between breakpoints closer than `h` split into four.
fn certificate_nodes(potential: &dyn PotentialFn, lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).ceil().max(8.0) as usize;
    let mut nodes: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let mut bps: Vec<f64> = potential
        .breakpoints()
        .into_iter()
        .filter(|&x| x > lo && x < hi)
        .collect();
    bps.sort_by(f64::total_cmp);
    for w in bps.windows(2) {
        if w[1] - w[0] < h {
            nodes.extend((1..4).map(|k| w[0] + (w[1] - w[0]) * k as f64 / 4.0));
        }
    }
    nodes.extend(bps);
    nodes.sort_by(f64::total_cmp);
    let merge = 1e-9 * (hi - lo);
    nodes.dedup_by(|b, a| *b - *a <= merge);
    *nodes.last_mut().expect("grid is non-empty") = hi;
    nodes
}

fn halve(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len() - 1);
    for w in nodes.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(nodes.last());
    out
}

/// Distance from 1 to the Birman–Schwinger spectrum at `λ`, with the
/// Nyström error removed by Richardson extrapolation over two nested grids.
pub fn extrapolated_certificate(potential: &dyn PotentialFn, lambda: Complex64, bc: BoundaryCondition) -> Result<f64> {
    let hi = potential.support_radius();
    let lo = match potential.domain() {
        Domain::HalfLine => 0.0,
        Domain::WholeLine => -hi,
    };
    let h = certificate_spacing(potential, lo, hi, lambda);
    let coarse = certificate_nodes(potential, lo, hi, 2.0 * h);
    let fine = halve(&coarse);
    let nu = |nodes: Vec<f64>| -> Result<Complex64> {
        let values = nodes.iter().map(|&x| potential.evaluate(x)).collect();
        let sampled = SampledPotential::trapezoid(nodes, values)?;
        eigenvalue_nearest_one(&assemble(&sampled, -lambda, bc)?.entries)
    };
    let (coarse, fine) = (nu(coarse)?, nu(fine)?);
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    Ok((extrapolated - 1.0).norm())
}

/// Finds eigenvalues by shooting and checks each against the enclosure
/// bound and the Birman–Schwinger certificate.
pub fn enclosure_audit(
    potential: &dyn PotentialFn,
    bc: BoundaryCondition,
    seeds: Option<&[Complex64]>,
    config: &ShootingConfig,
) -> Result<AuditReport> {
    let v_norm = potential.l1_norm() + potential.tail_bound();
    let default;
    let seeds = match seeds {
        Some(s) => s,
        None => {
            default = default_seeds(v_norm);
            &default
        }
    };
    let search = find_eigenvalues(potential, bc, seeds, config)?;
    let entries = search
        .eigenvalues
        .par_iter()
        .map(|&lambda| {
            let point = SpectralPoint::new(lambda)?;
            let margin = contains(&point, v_norm, bc)?.margin;
            let certificate = extrapolated_certificate(potential, lambda, bc)?;
            Ok(AuditEntry {
                lambda,
                margin,
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = AuditReport {
        bc,
        v_norm,
        entries,
        failures: search.failures,
        passed: false,
    };
    let passed = report.offending().next().is_none();
    report.passed = passed;
    Ok(report)
}
