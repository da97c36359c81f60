use std::fs::File;
use std::io::BufReader;

use halfline_core::birman_schwinger::{verify_norm_bound, SampledPotential};
use halfline_core::delta::{dirichlet_delta_eigenvalues, extremal_delta, robin_delta_eigenvalue, DeltaPotential};
use halfline_core::gfun::{g, g_envelopes};
use halfline_core::ode::Tolerances;
use halfline_core::potential::{
    random_potential, read_potential_csv, Domain, EvenExtension, GaussianBumps, PiecewiseLinear, PotentialFn,
    RandomPotentialSpec, Sech2,
};
use halfline_core::region::{contains, cosh_ratio_sup, curve_sample, keller_constant, SpectralPoint};
use halfline_core::shooting::{default_seeds, enclosure_audit, find_eigenvalues, ShootingConfig};
use halfline_core::{BoundaryCondition, Complex64, Error};
use serde_json::{json, Map, Value};

use crate::scenario::{
    BcKind, Command, CurveArgs, DeltaEigsArgs, ExtremalArgs, Family, GfunArgs, KellerArgs, PotentialArgs, ShootArgs,
    VerifyBsArgs,
};

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit status 1.
    Invalid(String),
    /// Non-convergence or a failed check: exit status 2.
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// Rows of numbers under named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Suffix for the companion CSV file and key in the JSON object.
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// False when the summary already carries the same values.
    pub in_json: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub summary: Map<String, Value>,
    /// The first table is the primary CSV output.
    pub tables: Vec<Table>,
    /// False when a check failed; the artifact is still written.
    pub passed: bool,
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn required<T>(value: Option<T>, name: &str) -> Result<T, Failure> {
    value.ok_or_else(|| invalid(format!("missing parameter {name}")))
}

pub fn execute(command: &Command) -> Result<Artifact, Failure> {
    match command {
        Command::Curve(a) => curve(a),
        Command::Gfun(a) => gfun(a),
        Command::Extremal(a) => extremal(a),
        Command::DeltaEigs(a) => delta_eigs(a),
        Command::VerifyBs(a) => verify_bs(a),
        Command::Shoot(a) => shoot(a),
        Command::Audit(a) => audit(a),
        Command::Keller(a) => keller(a),
    }
}

fn curve(args: &CurveArgs) -> Result<Artifact, Failure> {
    let sample = curve_sample(args.n.unwrap_or(720))?;
    let table = |name, pts: &[halfline_core::region::CurvePoint]| Table {
        name,
        columns: vec!["theta", "radius4", "re", "im"],
        rows: pts.iter().map(|p| vec![p.theta, p.radius4, p.z.re, p.z.im]).collect(),
        in_json: true,
    };
    let max = sample.halfline.iter().map(|p| p.radius4).fold(0.0, f64::max);
    let mut summary = Map::new();
    summary.insert("n".into(), json!(sample.halfline.len()));
    summary.insert("max_radius4".into(), json!(max));
    Ok(Artifact {
        summary,
        tables: vec![table("curve", &sample.halfline), table("line", &sample.whole_line)],
        passed: true,
    })
}

fn gfun(args: &GfunArgs) -> Result<Artifact, Failure> {
    let points = match &args.a {
        Some(a) if a.is_empty() => return Err(invalid("empty list for a")),
        Some(a) => a.clone(),
        None => {
            let (lo, hi, n) = (
                args.a_min.unwrap_or(1e-2),
                args.a_max.unwrap_or(1e2),
                args.n.unwrap_or(101),
            );
            if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
                return Err(invalid(format!(
                    "need 0 < a-min < a-max and n >= 2, got {lo}, {hi}, {n}"
                )));
            }
            let (l0, l1) = (lo.log10(), hi.log10());
            (0..n)
                .map(|k| 10f64.powf(l0 + (l1 - l0) * k as f64 / (n - 1) as f64))
                .collect()
        }
    };
    let mut rows = Vec::with_capacity(points.len());
    for a in points {
        let r = g(a)?;
        // both envelopes collapse to 1 at a = 0
        let (lower, upper) = if a == 0.0 { (1.0, 1.0) } else { g_envelopes(a.abs())? };
        rows.push(vec![a, r.value, r.argmax.unwrap_or(f64::NAN), lower, upper]);
    }
    let mut summary = Map::new();
    summary.insert("n".into(), json!(rows.len()));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "g",
            columns: vec!["a", "g", "argmax", "lower", "upper"],
            rows,
            in_json: true,
        }],
        passed: true,
    })
}

fn extremal(args: &ExtremalArgs) -> Result<Artifact, Failure> {
    let m = args.m.unwrap_or(1.0);
    let theta = required(args.theta, "theta")?;
    let r = extremal_delta(m, theta)?;
    let mut summary = Map::new();
    summary.insert("m".into(), json!(m));
    summary.insert("theta".into(), json!(theta));
    summary.insert("c".into(), complex_json(r.delta.c));
    summary.insert("b".into(), json!(r.delta.b));
    summary.insert("lambda".into(), complex_json(r.lambda));
    summary.insert("g_value".into(), json!(r.g_value));
    summary.insert("bs_residual".into(), json!(r.bs_residual));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "extremal",
            columns: vec![
                "m",
                "theta",
                "c_re",
                "c_im",
                "b",
                "lambda_re",
                "lambda_im",
                "g_value",
                "bs_residual",
            ],
            rows: vec![vec![
                m,
                theta,
                r.delta.c.re,
                r.delta.c.im,
                r.delta.b,
                r.lambda.re,
                r.lambda.im,
                r.g_value,
                r.bs_residual,
            ]],
            in_json: false,
        }],
        passed: true,
    })
}

fn boundary(kind: Option<BcKind>, sigma: Option<f64>) -> Result<BoundaryCondition, Failure> {
    let bc = match kind.unwrap_or(BcKind::Dirichlet) {
        BcKind::Dirichlet => BoundaryCondition::Dirichlet,
        BcKind::Neumann => BoundaryCondition::Neumann,
        BcKind::Robin => BoundaryCondition::robin(required(sigma, "sigma")?)?,
        BcKind::WholeLine => BoundaryCondition::WholeLine,
    };
    if sigma.is_some() && !matches!(bc, BoundaryCondition::Robin { .. }) {
        return Err(invalid("sigma is only meaningful with bc robin"));
    }
    Ok(bc)
}

/// Eigenvalue rows `re, im, margin` against the enclosure for `v_norm`.
fn eigenvalue_rows(lambdas: &[Complex64], v_norm: f64, bc: BoundaryCondition) -> Result<Vec<Vec<f64>>, Failure> {
    lambdas
        .iter()
        .map(|&z| {
            let margin = contains(&SpectralPoint::new(z)?, v_norm, bc)?.margin;
            Ok(vec![z.re, z.im, margin])
        })
        .collect()
}

fn delta_eigs(args: &DeltaEigsArgs) -> Result<Artifact, Failure> {
    let c = Complex64::new(required(args.c_re, "c-re")?, args.c_im.unwrap_or(0.0));
    let bc = boundary(args.bc, args.sigma)?;
    let lambdas = match bc {
        BoundaryCondition::Dirichlet => {
            let delta = DeltaPotential::new(c, required(args.b, "b")?)?;
            dirichlet_delta_eigenvalues(&delta, None)?
        }
        BoundaryCondition::Neumann | BoundaryCondition::Robin { .. } => {
            if args.b.is_some() {
                return Err(invalid(
                    "b applies to the Dirichlet problem only; the interaction sits at 0",
                ));
            }
            let sigma = bc.robin_sigma().unwrap_or(0.0);
            if (c - sigma).re > 0.0 {
                vec![robin_delta_eigenvalue(c, sigma)?]
            } else {
                Vec::new()
            }
        }
        BoundaryCondition::WholeLine => return Err(invalid("delta-eigs supports halfline boundary conditions")),
    };
    let mut summary = Map::new();
    summary.insert("bc".into(), json!(bc.to_string()));
    summary.insert("c".into(), complex_json(c));
    summary.insert("count".into(), json!(lambdas.len()));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "eigenvalues",
            columns: vec!["re", "im", "margin"],
            rows: eigenvalue_rows(&lambdas, c.norm(), bc)?,
            in_json: true,
        }],
        passed: true,
    })
}

fn load_potential(args: &PotentialArgs) -> Result<Box<dyn PotentialFn>, Failure> {
    if let Some(path) = &args.csv {
        if args.family.is_some() {
            return Err(invalid("give either a potential family or a CSV file, not both"));
        }
        let file = File::open(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let (nodes, values) = read_potential_csv(BufReader::new(file))?;
        return Ok(Box::new(PiecewiseLinear::new(nodes, values)?));
    }
    let family = required(args.family, "potential")?;
    let foreign = match family {
        Family::GaussianBumps => [
            args.alpha_re,
            args.alpha_im,
            args.delta_re,
            args.delta_im,
            args.delta_at,
            args.width,
        ]
        .iter()
        .any(Option::is_some),
        Family::Sech2 => {
            args.seed.is_some()
                || args.bumps.is_some()
                || [
                    args.scale,
                    args.support,
                    args.delta_re,
                    args.delta_im,
                    args.delta_at,
                    args.width,
                ]
                .iter()
                .any(Option::is_some)
        }
        Family::MollifiedDelta => {
            args.seed.is_some()
                || args.bumps.is_some()
                || [args.scale, args.support, args.alpha_re, args.alpha_im]
                    .iter()
                    .any(Option::is_some)
        }
    };
    if foreign {
        return Err(invalid(format!("parameters given that do not belong to {family:?}")));
    }
    Ok(match family {
        Family::GaussianBumps => {
            let defaults = RandomPotentialSpec::default();
            Box::new(random_potential(&RandomPotentialSpec {
                n_bumps: args.bumps.unwrap_or(defaults.n_bumps),
                amplitude_scale: args.scale.unwrap_or(defaults.amplitude_scale),
                support: args.support.unwrap_or(defaults.support),
                rng_seed: args.seed.unwrap_or(defaults.rng_seed),
            })?)
        }
        Family::Sech2 => Box::new(Sech2::new(Complex64::new(
            args.alpha_re.unwrap_or(1.0),
            args.alpha_im.unwrap_or(0.0),
        ))?),
        Family::MollifiedDelta => Box::new(GaussianBumps::mollified_delta(
            Complex64::new(required(args.delta_re, "delta-re")?, args.delta_im.unwrap_or(0.0)),
            required(args.delta_at, "delta-at")?,
            args.width.unwrap_or(1e-3),
        )?),
    })
}

/// Halfline potentials are extended evenly for the whole line; whole-line
/// potentials are refused for halfline problems.
fn with_potential<T>(
    args: &PotentialArgs,
    bc: BoundaryCondition,
    f: impl FnOnce(&dyn PotentialFn) -> Result<T, Failure>,
) -> Result<T, Failure> {
    let p = load_potential(args)?;
    match (p.domain(), bc) {
        (Domain::HalfLine, BoundaryCondition::WholeLine) => f(&EvenExtension { inner: p.as_ref() }),
        (Domain::WholeLine, bc) if bc.is_halfline() => Err(invalid(format!(
            "this potential lives on the whole line; {bc} needs a halfline one"
        ))),
        _ => f(p.as_ref()),
    }
}

fn verify_bs(args: &VerifyBsArgs) -> Result<Artifact, Failure> {
    let bc = boundary(args.bc, args.sigma)?;
    let mu = Complex64::new(required(args.mu_re, "mu-re")?, args.mu_im.unwrap_or(0.0));
    let nodes = args.nodes.unwrap_or(201);
    let report = with_potential(&args.potential, bc, |p| {
        Ok(verify_norm_bound(&SampledPotential::from_fn(p, nodes)?, mu, bc)?)
    })?;
    let mut summary = Map::new();
    summary.insert("bc".into(), json!(bc.to_string()));
    summary.insert("mu".into(), complex_json(mu));
    summary.insert("nodes".into(), json!(nodes));
    summary.insert("norm".into(), json!(report.norm));
    summary.insert("rhs".into(), json!(report.rhs));
    summary.insert("ok".into(), json!(report.ok));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "bound",
            columns: vec!["mu_re", "mu_im", "norm", "rhs", "ratio"],
            rows: vec![vec![mu.re, mu.im, report.norm, report.rhs, report.norm / report.rhs]],
            in_json: true,
        }],
        passed: report.ok,
    })
}

fn shooting_config(args: &ShootArgs) -> Result<ShootingConfig, Failure> {
    let d = ShootingConfig::default();
    let cfg = ShootingConfig {
        step_control: Tolerances {
            rtol: args.rtol.unwrap_or(d.step_control.rtol),
            atol: args.atol.unwrap_or(d.step_control.atol),
        },
        newton_tol: args.newton_tol.unwrap_or(d.newton_tol),
        max_newton: args.max_newton.unwrap_or(d.max_newton),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn shoot(args: &ShootArgs) -> Result<Artifact, Failure> {
    let bc = boundary(args.bc, args.sigma)?;
    let cfg = shooting_config(args)?;
    let (search, v_norm) = with_potential(&args.potential, bc, |p| {
        let v_norm = p.l1_norm() + p.tail_bound();
        Ok((find_eigenvalues(p, bc, &default_seeds(v_norm), &cfg)?, v_norm))
    })?;
    let mut summary = Map::new();
    summary.insert("bc".into(), json!(bc.to_string()));
    summary.insert("v_norm".into(), json!(v_norm));
    summary.insert("count".into(), json!(search.eigenvalues.len()));
    summary.insert("failed_seeds".into(), json!(search.failures.len()));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "eigenvalues",
            columns: vec!["re", "im", "margin"],
            rows: eigenvalue_rows(&search.eigenvalues, v_norm, bc)?,
            in_json: true,
        }],
        passed: true,
    })
}

fn audit(args: &ShootArgs) -> Result<Artifact, Failure> {
    let bc = boundary(args.bc, args.sigma)?;
    let cfg = shooting_config(args)?;
    let report = with_potential(&args.potential, bc, |p| Ok(enclosure_audit(p, bc, None, &cfg)?))?;
    let offending = report.offending().count();
    let mut summary = Map::new();
    summary.insert("bc".into(), json!(bc.to_string()));
    summary.insert("v_norm".into(), json!(report.v_norm));
    summary.insert("count".into(), json!(report.entries.len()));
    summary.insert("failed_seeds".into(), json!(report.failures.len()));
    summary.insert("offending".into(), json!(offending));
    summary.insert("passed".into(), json!(report.passed));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "audit",
            columns: vec!["re", "im", "margin", "certificate"],
            rows: report
                .entries
                .iter()
                .map(|e| vec![e.lambda.re, e.lambda.im, e.margin, e.certificate])
                .collect(),
            in_json: true,
        }],
        passed: report.passed,
    })
}

fn keller(args: &KellerArgs) -> Result<Artifact, Failure> {
    let gammas = args.gamma.clone().unwrap_or_else(|| vec![1.0]);
    if gammas.is_empty() {
        return Err(invalid("empty list for gamma"));
    }
    let mut rows = Vec::with_capacity(gammas.len());
    let mut all_exceed = true;
    for gamma in gammas {
        let k = keller_constant(gamma)?;
        let s = cosh_ratio_sup(gamma)?;
        all_exceed &= s.sup > k;
        rows.push(vec![gamma, k, s.sup, s.t_star]);
    }
    let mut summary = Map::new();
    summary.insert("n".into(), json!(rows.len()));
    summary.insert("all_exceed_keller".into(), json!(all_exceed));
    Ok(Artifact {
        summary,
        tables: vec![Table {
            name: "keller",
            columns: vec!["gamma", "keller", "sech2_sup", "t_star"],
            rows,
            in_json: true,
        }],
        passed: true,
    })
}
