use super::batch::{check_x0, run_estimator, Estimator};
use super::EstimateStats;
use crate::error::{Error, Result};
use crate::models::{JumpDiffusionModel, Payoff};
use crate::parametrix::EstimatorParams;

/// Model, payoff and starting point of an expectation `E f(X_T)`.
#[derive(Clone)]
pub struct Problem<'a, M: JumpDiffusionModel + ?Sized> {
    pub model: &'a M,
    pub payoff: Payoff,
    pub x0: Vec<f64>,
}

impl<'a, M: JumpDiffusionModel + ?Sized> Problem<'a, M> {
    pub fn new(model: &'a M, payoff: Payoff, x0: Vec<f64>) -> Result<Self> {
        check_x0(model, &x0)?;
        Ok(Self { model, payoff, x0 })
    }

    pub fn run(&self, estimator: Estimator, trials: u64, seed: u64, workers: usize) -> Result<EstimateStats> {
        run_estimator(self.model, &self.payoff, &self.x0, estimator, trials, seed, workers)
    }
}

/// High-effort baseline estimate with its own standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub steps: usize,
    pub provenance: String,
}

/// Euler-baseline reference for `E f(X_T)`.
pub fn compute_reference<M: JumpDiffusionModel + ?Sized>(
    problem: &Problem<'_, M>,
    horizon: f64,
    trials: u64,
    steps: usize,
    seed: u64,
    workers: usize,
) -> Result<Reference> {
    let s = problem.run(Estimator::Euler { horizon, steps }, trials, seed, workers)?;
    Ok(Reference {
        value: s.mean,
        stderr: s.stderr(),
        trials,
        steps,
        provenance: format!("euler p={steps} M={trials} seed={seed}"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    SigmaA,
    Gamma,
    Epsilon,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::SigmaA => "sigma_a",
            SweepParam::Gamma => "gamma",
            SweepParam::Epsilon => "epsilon",
        }
    }

    pub fn apply(&self, base: EstimatorParams, value: f64) -> Result<EstimatorParams> {
        let mut p = base;
        match self {
            SweepParam::SigmaA => p.sigma_a = value,
            SweepParam::Gamma => p.gamma = value,
            SweepParam::Epsilon => p.epsilon = value,
        }
        p.validate()?;
        Ok(p)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sigma_a" | "sigma-a" => Ok(SweepParam::SigmaA),
            "gamma" => Ok(SweepParam::Gamma),
            "epsilon" | "eps" => Ok(SweepParam::Epsilon),
            other => Err(format!("unknown sweep parameter `{other}` (sigma_a, gamma, epsilon)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub stats: Vec<EstimateStats>,
    pub reference: Option<Reference>,
}

/// Parametrix estimates at each grid value, all under the same seed.
#[allow(clippy::too_many_arguments)]
pub fn sweep<M: JumpDiffusionModel + ?Sized>(
    problem: &Problem<'_, M>,
    param: SweepParam,
    grid: &[f64],
    base: EstimatorParams,
    trials: u64,
    seed: u64,
    workers: usize,
    reference: Option<Reference>,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep.values", 0.0, "grid must be nonempty"));
    }
    let params: Vec<EstimatorParams> = grid.iter().map(|&v| param.apply(base, v)).collect::<Result<_>>()?;
    let mut stats = Vec::with_capacity(grid.len());
    for p in params {
        log::info!("sweep {} = {}", param.name(), match param {
            SweepParam::SigmaA => p.sigma_a,
            SweepParam::Gamma => p.gamma,
            SweepParam::Epsilon => p.epsilon,
        });
        stats.push(problem.run(Estimator::Parametrix(p), trials, seed, workers)?);
    }
    Ok(SweepResult {
        param,
        values: grid.to_vec(),
        stats,
        reference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyConfig {
    pub estimator: Estimator,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyPoint {
    pub estimator: &'static str,
    pub trials: u64,
    pub steps: Option<usize>,
    /// Median wall time over the repeats.
    pub wall_seconds: f64,
    pub ci99: f64,
    pub mean: f64,
    pub var: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn measure<M: JumpDiffusionModel + ?Sized>(
    problem: &Problem<'_, M>,
    c: &EfficiencyConfig,
    seed: u64,
    workers: usize,
    repeats: usize,
) -> Result<EfficiencyPoint> {
    let mut walls = Vec::with_capacity(repeats);
    let mut last = EstimateStats::new();
    for _ in 0..repeats.max(1) {
        last = problem.run(c.estimator, c.trials, seed, workers)?;
        walls.push(last.wall_seconds);
    }
    Ok(EfficiencyPoint {
        estimator: c.estimator.name(),
        trials: c.trials,
        steps: match c.estimator {
            Estimator::Euler { steps, .. } => Some(steps),
            Estimator::Parametrix(_) => None,
        },
        wall_seconds: median(walls),
        ci99: last.ci99(),
        mean: last.mean,
        var: last.var(),
    })
}

/// `(wall time, ci99)` per configuration; each wall time is the median of `repeats` runs.
pub fn efficiency_curve<M: JumpDiffusionModel + ?Sized>(
    problem: &Problem<'_, M>,
    configs: &[EfficiencyConfig],
    seed: u64,
    workers: usize,
    repeats: usize,
) -> Result<Vec<EfficiencyPoint>> {
    configs.iter().map(|c| measure(problem, c, seed, workers, repeats)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetOutcome {
    pub reached: Option<EfficiencyPoint>,
    pub tried: Vec<EfficiencyPoint>,
}

/// Walks an increasing-effort schedule until the ci99 half-width is at most
/// `target`; reports the first configuration that gets there.
pub fn time_to_target<M: JumpDiffusionModel + ?Sized>(
    problem: &Problem<'_, M>,
    schedule: &[EfficiencyConfig],
    target: f64,
    seed: u64,
    workers: usize,
    repeats: usize,
) -> Result<TargetOutcome> {
    let mut tried = Vec::new();
    for c in schedule {
        let p = measure(problem, c, seed, workers, repeats)?;
        let hit = p.ci99 <= target;
        tried.push(p.clone());
        if hit {
            return Ok(TargetOutcome { reached: Some(p), tried });
        }
    }
    Ok(TargetOutcome { reached: None, tried })
}
