use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::commands::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
    WholeLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    GaussianBumps,
    Sech2,
    MollifiedDelta,
}

#[derive(Debug, Clone, Subcommand, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Command {
    /// Dirichlet enclosure curve at unit L1 norm, plus the whole-line circle
    Curve(CurveArgs),
    /// Tabulate g(a) with its maximizer and envelopes
    Gfun(GfunArgs),
    /// Point interaction whose eigenvalue sits on the enclosure boundary
    Extremal(ExtremalArgs),
    /// Eigenvalues of a point interaction
    DeltaEigs(DeltaEigsArgs),
    /// Check the Birman-Schwinger norm bound for a sampled potential
    VerifyBs(VerifyBsArgs),
    /// Locate eigenvalues by shooting
    Shoot(ShootArgs),
    /// Shoot, then check every eigenvalue against the enclosure and certificate
    Audit(ShootArgs),
    /// Compare the self-adjoint Keller constant with the sech^2 family
    Keller(KellerArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curve(_) => "curve",
            Command::Gfun(_) => "gfun",
            Command::Extremal(_) => "extremal",
            Command::DeltaEigs(_) => "delta-eigs",
            Command::VerifyBs(_) => "verify-bs",
            Command::Shoot(_) => "shoot",
            Command::Audit(_) => "audit",
            Command::Keller(_) => "keller",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CurveArgs {
    /// Number of angles, θ_k = 2πk/(n+1) [default: 720]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GfunArgs {
    /// Explicit arguments (comma separated); overrides the log grid
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Log grid lower end [default: 0.01]
    #[arg(long)]
    pub a_min: Option<f64>,
    /// Log grid upper end [default: 100]
    #[arg(long)]
    pub a_max: Option<f64>,
    /// Log grid size [default: 101]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExtremalArgs {
    /// L1 norm of the point interaction [default: 1]
    #[arg(long)]
    pub m: Option<f64>,
    /// Eigenvalue argument in radians, in (0, 2π)
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DeltaEigsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub c_re: Option<f64>,
    /// [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub c_im: Option<f64>,
    /// Location of the interaction (Dirichlet only)
    #[arg(long)]
    pub b: Option<f64>,
    /// Boundary condition [default: dirichlet]
    #[arg(long, value_enum)]
    pub bc: Option<BcKind>,
    /// Robin parameter, required with --bc robin
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PotentialArgs {
    /// Built-in potential family
    #[arg(long = "potential", value_enum)]
    pub family: Option<Family>,
    /// Tabulated potential with header x,re_v,im_v (piecewise-linear)
    #[arg(long = "potential-csv", conflicts_with = "family")]
    pub csv: Option<PathBuf>,
    /// gaussian-bumps: RNG seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// gaussian-bumps: number of bumps [default: 3]
    #[arg(long)]
    pub bumps: Option<usize>,
    /// gaussian-bumps: amplitude scale [default: 1]
    #[arg(long)]
    pub scale: Option<f64>,
    /// gaussian-bumps: support length [default: 8]
    #[arg(long)]
    pub support: Option<f64>,
    /// sech2: Re α [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    /// sech2: Im α [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    /// mollified-delta: Re c
    #[arg(long = "delta-re", allow_hyphen_values = true)]
    pub delta_re: Option<f64>,
    /// mollified-delta: Im c [default: 0]
    #[arg(long = "delta-im", allow_hyphen_values = true)]
    pub delta_im: Option<f64>,
    /// mollified-delta: location
    #[arg(long = "delta-at")]
    pub delta_at: Option<f64>,
    /// mollified-delta: Gaussian width [default: 0.001]
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VerifyBsArgs {
    #[command(flatten)]
    #[serde(default)]
    pub potential: PotentialArgs,
    #[arg(long, value_enum)]
    pub bc: Option<BcKind>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Re μ, where μ = -λ
    #[arg(long, allow_hyphen_values = true)]
    pub mu_re: Option<f64>,
    /// Im μ [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub mu_im: Option<f64>,
    /// Quadrature nodes [default: 201]
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ShootArgs {
    #[command(flatten)]
    #[serde(default)]
    pub potential: PotentialArgs,
    #[arg(long, value_enum)]
    pub bc: Option<BcKind>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// ODE relative tolerance [default: 1e-10]
    #[arg(long)]
    pub rtol: Option<f64>,
    /// ODE absolute tolerance [default: 1e-12]
    #[arg(long)]
    pub atol: Option<f64>,
    /// Newton residual tolerance [default: 1e-10]
    #[arg(long)]
    pub newton_tol: Option<f64>,
    /// Newton iteration cap per seed [default: 50]
    #[arg(long)]
    pub max_newton: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct KellerArgs {
    /// Exponents γ > 1/2 (comma separated) [default: 1]
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
}

/// One JSON object describing a single run.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    command: String,
    #[serde(default)]
    parameters: Map<String, Value>,
    output_path: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub command: Command,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Failure::Invalid(format!("scenario: {e}")))?;
        let tagged = serde_json::json!({ "command": file.command, "parameters": file.parameters });
        let command =
            serde_json::from_value(tagged).map_err(|e| Failure::Invalid(format!("scenario parameters: {e}")))?;
        Ok(Scenario {
            command,
            output_path: file.output_path,
            format: file.format,
        })
    }

    /// Explicit format, else `.json` output paths select JSON, else CSV.
    pub fn resolved_format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.output_path {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        })
    }
}
