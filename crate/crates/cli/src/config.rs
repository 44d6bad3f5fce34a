//! Run configuration: a TOML file with command-line overrides on top.

use std::path::PathBuf;

use serde::Deserialize;
use unbiased_jd::harness::SweepParam;
use unbiased_jd::models::*;
use unbiased_jd::parametrix::EstimatorParams;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Estimate,
    Compare,
    Sweep,
    Reference,
    CheckModel,
}

impl Command {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "estimate" => Command::Estimate,
            "compare" => Command::Compare,
            "sweep" => Command::Sweep,
            "reference" => Command::Reference,
            "check-model" | "check_model" => Command::CheckModel,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelId {
    Trig,
    Affine,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PayoffId {
    Indicator,
    Call,
}

/// Model choice with its fully resolved parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Trig(TrigParams),
    Affine(AffineParams),
    Custom(ConstantParams),
}

impl ModelSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ModelSpec::Trig(_) => "trig",
            ModelSpec::Affine(_) => "affine",
            ModelSpec::Custom(_) => "custom",
        }
    }

    pub fn build(&self) -> unbiased_jd::Result<Box<dyn JumpDiffusionModel>> {
        Ok(match self {
            ModelSpec::Trig(p) => Box::new(build_model_trig(p.clone())?),
            ModelSpec::Affine(p) => Box::new(build_model_affine(p.clone())?),
            ModelSpec::Custom(p) => Box::new(ConstantModel::new(p.clone())?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerPair {
    pub trials: u64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceConfig {
    pub trials: u64,
    pub steps: usize,
    /// Known value; when absent, `error_vs_reference` is left empty.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Fully validated run specification.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSpec,
    pub payoff: Payoff,
    pub x0: Vec<f64>,
    pub horizon: f64,
    pub trials: u64,
    pub estimator: EstimatorParams,
    pub euler: Vec<EulerPair>,
    pub reference: ReferenceConfig,
    pub sweep: SweepConfig,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Warnings attached to the run (infinite-variance regime, violated assumptions).
    pub notes: Vec<String>,
}

impl RunConfig {
    pub fn assumption_violating(&self) -> bool {
        self.notes.iter().any(|n| n.starts_with("assumption_violating"))
    }
}

/// Values given on the command line; each one beats the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub model: Option<ModelId>,
    pub payoff: Option<PayoffId>,
    pub strike: Option<f64>,
    pub horizon: Option<f64>,
    pub trials: Option<u64>,
    pub sigma_a: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub euler_steps: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

// ---- file layout ----

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    seed: Option<u64>,
    workers: Option<usize>,
    trials: Option<u64>,
    horizon: Option<f64>,
    x0: Option<Vec<f64>>,
    out: Option<PathBuf>,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    payoff: PayoffSection,
    #[serde(default)]
    estimator: EstimatorSection,
    #[serde(default)]
    euler: EulerSection,
    #[serde(default)]
    reference: ReferenceSection,
    #[serde(default)]
    sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    id: Option<String>,
    // trig
    mu1: Option<f64>,
    mu2: Option<f64>,
    // affine
    mu: Option<[f64; 4]>,
    lambda_floor: Option<f64>,
    lambda_cap: Option<f64>,
    a_floor: Option<f64>,
    // trig and affine
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    lambda: Option<Vec<f64>>,
    // custom
    drift: Option<Vec<f64>>,
    diffusion: Option<Vec<f64>>,
    brownian_dim: Option<usize>,
    intensity: Option<f64>,
    // jump law, all models
    jump_width: Option<f64>,
    jump_fixed: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffSection {
    id: Option<String>,
    strike: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorSection {
    sigma_a: Option<f64>,
    gamma: Option<f64>,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EulerSection {
    /// `[[M, p], ...]`
    pairs: Option<Vec<(u64, usize)>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceSection {
    trials: Option<u64>,
    steps: Option<usize>,
    value: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    param: Option<String>,
    values: Option<Vec<f64>>,
}

pub const DEFAULT_STRIKE: f64 = 1.8;
pub const DEFAULT_TRIALS: u64 = 50_000;
pub const DEFAULT_EULER: EulerPair = EulerPair { trials: 4_000, steps: 200 };
pub const DEFAULT_REFERENCE: (u64, usize) = (400_000, 512);

fn default_sweep_values(p: SweepParam) -> Vec<f64> {
    match p {
        SweepParam::SigmaA => vec![0.01, 0.1, 0.5, 1.0, 5.0],
        SweepParam::Gamma => vec![0.1, 0.25, 0.4],
        SweepParam::Epsilon => vec![0.1, 0.5, 1.0, 5.0],
    }
}

fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config {
        key: key.to_string(),
        msg: msg.to_string(),
    }
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, format!("{v} is not finite")))
    }
}

fn reject(key: &str, present: bool, model: &str) -> Result<(), CliError> {
    if present {
        Err(bad(key, format!("not a parameter of the {model} model")))
    } else {
        Ok(())
    }
}

fn jump_law(m: &ModelSection) -> Result<JumpLaw, CliError> {
    match (m.jump_width, &m.jump_fixed) {
        (Some(_), Some(_)) => Err(bad("model.jump_fixed", "conflicts with model.jump_width")),
        (Some(w), None) if !(w >= 0.0 && w.is_finite()) => Err(bad("model.jump_width", format!("{w} must be finite and >= 0"))),
        (Some(0.0), None) => Ok(JumpLaw::Zero),
        (Some(w), None) => Ok(JumpLaw::UniformBox { width: w }),
        (None, Some(v)) => Ok(JumpLaw::Fixed(v.clone())),
        (None, None) => Ok(JumpLaw::default()),
    }
}

fn model_spec(id: ModelId, m: &ModelSection) -> Result<ModelSpec, CliError> {
    let jump = jump_law(m)?;
    let custom_keys = [
        ("model.drift", m.drift.is_some()),
        ("model.diffusion", m.diffusion.is_some()),
        ("model.brownian_dim", m.brownian_dim.is_some()),
        ("model.intensity", m.intensity.is_some()),
    ];
    match id {
        ModelId::Trig => {
            for (k, p) in custom_keys {
                reject(k, p, "trig")?;
            }
            reject("model.mu", m.mu.is_some(), "trig")?;
            reject("model.lambda_floor", m.lambda_floor.is_some(), "trig")?;
            reject("model.lambda_cap", m.lambda_cap.is_some(), "trig")?;
            reject("model.a_floor", m.a_floor.is_some(), "trig")?;
            let mut p = TrigParams { jump, ..TrigParams::default() };
            p.mu1 = m.mu1.unwrap_or(p.mu1);
            p.mu2 = m.mu2.unwrap_or(p.mu2);
            p.sigma1 = m.sigma1.unwrap_or(p.sigma1);
            p.sigma2 = m.sigma2.unwrap_or(p.sigma2);
            if let Some(l) = &m.lambda {
                p.lambda = l
                    .as_slice()
                    .try_into()
                    .map_err(|_| bad("model.lambda", format!("trig takes 4 entries, got {}", l.len())))?;
            }
            Ok(ModelSpec::Trig(p))
        }
        ModelId::Affine => {
            for (k, p) in custom_keys {
                reject(k, p, "affine")?;
            }
            reject("model.mu1", m.mu1.is_some(), "affine (use model.mu)")?;
            reject("model.mu2", m.mu2.is_some(), "affine (use model.mu)")?;
            let mut p = AffineParams { jump, ..AffineParams::default() };
            p.mu = m.mu.unwrap_or(p.mu);
            p.sigma1 = m.sigma1.unwrap_or(p.sigma1);
            p.sigma2 = m.sigma2.unwrap_or(p.sigma2);
            p.lambda_floor = m.lambda_floor.unwrap_or(p.lambda_floor);
            p.lambda_cap = m.lambda_cap.unwrap_or(p.lambda_cap);
            p.a_floor = m.a_floor.unwrap_or(p.a_floor);
            if let Some(l) = &m.lambda {
                p.lambda = l
                    .as_slice()
                    .try_into()
                    .map_err(|_| bad("model.lambda", format!("affine takes 3 entries, got {}", l.len())))?;
            }
            Ok(ModelSpec::Affine(p))
        }
        ModelId::Custom => {
            for (k, p) in [
                ("model.mu1", m.mu1.is_some()),
                ("model.mu2", m.mu2.is_some()),
                ("model.mu", m.mu.is_some()),
                ("model.sigma1", m.sigma1.is_some()),
                ("model.sigma2", m.sigma2.is_some()),
                ("model.lambda", m.lambda.is_some()),
                ("model.lambda_floor", m.lambda_floor.is_some()),
                ("model.lambda_cap", m.lambda_cap.is_some()),
                ("model.a_floor", m.a_floor.is_some()),
            ] {
                reject(k, p, "custom")?;
            }
            let drift = m.drift.clone().unwrap_or_else(|| vec![0.0, 0.0]);
            let d = drift.len();
            let brownian_dim = m.brownian_dim.unwrap_or(d);
            let diffusion = match &m.diffusion {
                Some(s) => s.clone(),
                None if brownian_dim == d => (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 }).collect(),
                None => return Err(bad("model.diffusion", "required when brownian_dim differs from the dimension")),
            };
            Ok(ModelSpec::Custom(ConstantParams {
                drift,
                diffusion,
                brownian_dim,
                intensity: m.intensity.unwrap_or(0.3),
                jump,
            }))
        }
    }
}

/// Maps a core validation error to the config key that fed it.
fn core_key(section: &str, e: unbiased_jd::Error) -> CliError {
    match &e {
        unbiased_jd::Error::InvalidParameter { name, .. } => bad(&format!("{section}.{name}"), &e),
        _ => bad(section, &e),
    }
}

/// Name of the `[table]` enclosing byte offset `at`, if any.
fn section_at(text: &str, at: usize) -> Option<String> {
    text[..at.min(text.len())]
        .lines()
        .filter_map(|l| {
            let l = l.trim();
            l.strip_prefix('[').and_then(|r| r.split(']').next()).map(|n| n.trim().to_string())
        })
        .last()
}

/// Key assigned on the line containing byte offset `at`.
fn key_at(text: &str, at: usize) -> Option<String> {
    let at = at.min(text.len());
    let line_start = text[..at].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    line.split_once('=').map(|(k, _)| k.trim().to_string())
}

/// Parses `text` (TOML; empty means all defaults) and applies `flags` on top.
pub fn parse_config(text: &str, flags: &Overrides) -> Result<RunConfig, CliError> {
    let file: FileConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        // unknown fields are named in the message, type errors only by span
        let start = e.span().map(|r| r.start);
        let named = msg.contains("field `");
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| named)
            .map(str::to_string)
            .or_else(|| start.and_then(|at| key_at(text, at)))
            .unwrap_or_else(|| "config".to_string());
        let key = match start.map(|at| section_at(text, at)) {
            Some(Some(sec)) if field != sec && !field.contains('.') => format!("{sec}.{field}"),
            _ => field,
        };
        bad(&key, e.to_string().trim_end())
    })?;

    let command = match (flags.command, &file.command) {
        (Some(c), _) => c,
        (None, Some(s)) => Command::parse(s).ok_or_else(|| bad("command", format!("unknown command `{s}`")))?,
        (None, None) => Command::Estimate,
    };

    let model_id = match (flags.model, &file.model.id) {
        (Some(m), _) => m,
        (None, None) => ModelId::Trig,
        (None, Some(s)) => match s.as_str() {
            "trig" => ModelId::Trig,
            "affine" => ModelId::Affine,
            "custom" => ModelId::Custom,
            other => return Err(bad("model.id", format!("unknown model `{other}` (trig, affine, custom)"))),
        },
    };
    let model = model_spec(model_id, &file.model)?;
    let built = model.build().map_err(|e| core_key("model", e))?;

    let payoff_id = match (flags.payoff, &file.payoff.id) {
        (Some(p), _) => p,
        (None, None) => PayoffId::Indicator,
        (None, Some(s)) => match s.as_str() {
            "indicator" => PayoffId::Indicator,
            "call" => PayoffId::Call,
            other => return Err(bad("payoff.id", format!("unknown payoff `{other}` (indicator, call)"))),
        },
    };
    let strike = finite("payoff.strike", flags.strike.or(file.payoff.strike).unwrap_or(DEFAULT_STRIKE))?;
    let payoff = match payoff_id {
        PayoffId::Indicator => payoff_indicator(strike),
        PayoffId::Call => payoff_call(strike),
    };

    let x0 = file.x0.unwrap_or_else(|| vec![0.0; built.dim()]);
    if x0.len() != built.dim() {
        return Err(bad("x0", format!("has {} entries, the {} model has dimension {}", x0.len(), model.id(), built.dim())));
    }
    for &v in &x0 {
        finite("x0", v)?;
    }

    let horizon = flags.horizon.or(file.horizon).unwrap_or(1.0);
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(bad("horizon", format!("{horizon} must be finite and > 0")));
    }
    let trials = flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    if trials < 2 {
        return Err(bad("trials", format!("{trials} must be >= 2")));
    }

    let base = EstimatorParams::default();
    let estimator = EstimatorParams {
        sigma_a: flags.sigma_a.or(file.estimator.sigma_a).unwrap_or(base.sigma_a),
        gamma: flags.gamma.or(file.estimator.gamma).unwrap_or(base.gamma),
        epsilon: flags.epsilon.or(file.estimator.epsilon).unwrap_or(base.epsilon),
        horizon,
        t_min: base.t_min,
    };
    estimator.validate().map_err(|e| core_key("estimator", e))?;

    let mut euler: Vec<EulerPair> = file
        .euler
        .pairs
        .map(|v| v.into_iter().map(|(trials, steps)| EulerPair { trials, steps }).collect())
        .unwrap_or_else(|| vec![DEFAULT_EULER]);
    if let Some(steps) = flags.euler_steps {
        euler = vec![EulerPair {
            trials: euler.first().map_or(DEFAULT_EULER.trials, |p| p.trials),
            steps,
        }];
    }
    if euler.is_empty() {
        return Err(bad("euler.pairs", "must hold at least one [M, p] pair"));
    }
    for p in &euler {
        if p.trials < 2 {
            return Err(bad("euler.pairs", format!("M = {} must be >= 2", p.trials)));
        }
        if p.steps == 0 {
            return Err(bad(if flags.euler_steps.is_some() { "euler-steps" } else { "euler.pairs" }, "p must be >= 1"));
        }
    }

    let reference = ReferenceConfig {
        trials: file.reference.trials.unwrap_or(DEFAULT_REFERENCE.0),
        steps: flags.euler_steps.or(file.reference.steps).unwrap_or(DEFAULT_REFERENCE.1),
        value: file.reference.value.map(|v| finite("reference.value", v)).transpose()?,
    };
    if reference.trials < 2 {
        return Err(bad("reference.trials", format!("{} must be >= 2", reference.trials)));
    }
    if reference.steps == 0 {
        return Err(bad("reference.steps", "must be >= 1"));
    }

    let param = match &file.sweep.param {
        Some(s) => s.parse::<SweepParam>().map_err(|e| bad("sweep.param", e))?,
        None => SweepParam::SigmaA,
    };
    let values = file.sweep.values.unwrap_or_else(|| default_sweep_values(param));
    if values.is_empty() {
        return Err(bad("sweep.values", "must be nonempty"));
    }
    for &v in &values {
        param
            .apply(estimator, v)
            .map_err(|e| bad("sweep.values", format!("{} = {v}: {e}", param.name())))?;
    }
    let sweep = SweepConfig { param, values };

    let workers = flags
        .workers
        .or(file.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(bad("workers", "must be >= 1"));
    }

    let mut notes = Vec::new();
    if !estimator.finite_variance_regime() {
        let msg = format!("gamma = {} is outside (0, 1/2); the estimator variance may be infinite", estimator.gamma);
        log::warn!("{msg}");
        notes.push(format!("finite_variance_warning: {msg}"));
    }
    if built.assumption_violating() {
        let msg = format!("the {} model violates the boundedness/ellipticity assumptions", model.id());
        log::warn!("{msg}");
        notes.push(format!("assumption_violating: {msg}"));
    }

    Ok(RunConfig {
        command,
        model,
        payoff,
        x0,
        horizon,
        trials,
        estimator,
        euler,
        reference,
        sweep,
        seed: flags.seed.or(file.seed).unwrap_or(1),
        workers,
        out: flags.out.clone().or(file.out),
        notes,
    })
}

/// Reads the file at `path` (when given) and parses it with the overrides.
pub fn load_config(path: Option<&std::path::Path>, flags: &Overrides) -> Result<RunConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config(&text, flags)
}
