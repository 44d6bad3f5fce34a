use std::time::Instant;

use rayon::prelude::*;

use super::EstimateStats;
use crate::engine::{EulerEngine, ParametrixEngine, TrialResult};
use crate::error::{Error, Result};
use crate::models::{JumpDiffusionModel, Payoff};
use crate::parametrix::EstimatorParams;
use crate::rng::{trial_rng, TrialRng};

/// Trials per work unit. Chunk boundaries and the merge order depend only on
/// the trial count, which makes results independent of the worker count.
pub const CHUNK_SIZE: u64 = 4096;

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))
}

fn chunks(m: u64) -> Vec<(u64, u64)> {
    (0..m.div_ceil(CHUNK_SIZE))
        .map(|c| (c * CHUNK_SIZE, ((c + 1) * CHUNK_SIZE).min(m)))
        .collect()
}

fn tag(index: u64, e: Error) -> Error {
    Error::Trial {
        index,
        source: Box::new(e),
    }
}

/// Runs trials `0..m`, trial `i` drawing from stream `(seed, i)`.
///
/// `make_worker` builds per-chunk state (engine buffers); the returned closure
/// runs a single trial. The first failing trial index aborts the batch.
pub fn run_batch<F, W>(m: u64, seed: u64, workers: usize, make_worker: F) -> Result<EstimateStats>
where
    F: Fn() -> Result<W> + Sync,
    W: FnMut(&mut TrialRng) -> Result<TrialResult>,
{
    if m < 2 {
        return Err(Error::invalid("trials", m as f64, "must be >= 2"));
    }
    let start = Instant::now();
    let parts: Vec<Result<EstimateStats>> = pool(workers)?.install(|| {
        chunks(m)
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut trial = make_worker().map_err(|e| tag(lo, e))?;
                let mut s = EstimateStats::new();
                for i in lo..hi {
                    let mut rng = trial_rng(seed, i);
                    let r = trial(&mut rng).map_err(|e| tag(i, e))?;
                    s.push_trial(&r);
                }
                Ok(s)
            })
            .collect()
    });
    let mut total = EstimateStats::new();
    for p in parts {
        total = total.merge(&p?);
    }
    total.wall_seconds = start.elapsed().as_secs_f64();
    Ok(total)
}

/// Like [`run_batch`] but returns every trial in index order.
pub fn run_values<F, W>(m: u64, seed: u64, workers: usize, make_worker: F) -> Result<Vec<TrialResult>>
where
    F: Fn() -> Result<W> + Sync,
    W: FnMut(&mut TrialRng) -> Result<TrialResult>,
{
    let parts: Vec<Result<Vec<TrialResult>>> = pool(workers)?.install(|| {
        chunks(m)
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut trial = make_worker().map_err(|e| tag(lo, e))?;
                (lo..hi)
                    .map(|i| trial(&mut trial_rng(seed, i)).map_err(|e| tag(i, e)))
                    .collect()
            })
            .collect()
    });
    let mut out = Vec::with_capacity(m as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Which estimator a batch runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Parametrix(EstimatorParams),
    Euler { horizon: f64, steps: usize },
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Parametrix(_) => "parametrix",
            Estimator::Euler { .. } => "euler",
        }
    }
}

/// Batch of `m` trials of the chosen estimator.
pub fn run_estimator<M: JumpDiffusionModel + ?Sized>(
    model: &M,
    payoff: &Payoff,
    x0: &[f64],
    estimator: Estimator,
    m: u64,
    seed: u64,
    workers: usize,
) -> Result<EstimateStats> {
    check_x0(model, x0)?;
    match estimator {
        Estimator::Parametrix(params) => run_batch(m, seed, workers, || {
            let mut engine = ParametrixEngine::new(model, *payoff, params)?;
            Ok(move |rng: &mut TrialRng| engine.run(x0, rng))
        }),
        Estimator::Euler { horizon, steps } => run_batch(m, seed, workers, || {
            let mut engine = EulerEngine::new(model, *payoff, horizon, steps)?;
            Ok(move |rng: &mut TrialRng| engine.run(x0, rng))
        }),
    }
}

pub(crate) fn check_x0<M: JumpDiffusionModel + ?Sized>(model: &M, x0: &[f64]) -> Result<()> {
    if x0.len() != model.dim() {
        return Err(Error::invalid(
            "x0",
            x0.len() as f64,
            format!("initial state must have {} components", model.dim()),
        ));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("x0", f64::NAN, "initial state must be finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn trial(value: f64) -> TrialResult {
        TrialResult {
            value,
            n_jumps: 0,
            n_grid_points_total: 0,
            n_segments: 1,
            wall_ns: 0,
        }
    }

    fn normal_worker() -> Result<impl FnMut(&mut TrialRng) -> Result<TrialResult>> {
        Ok(|rng: &mut TrialRng| Ok(trial(rng.sample(StandardNormal))))
    }

    #[test]
    fn constant_trial() {
        let s = run_batch(10_000, 1, 2, || Ok(|_: &mut TrialRng| Ok(trial(0.75)))).unwrap();
        assert_eq!(s.n, 10_000);
        assert_eq!(s.mean, 0.75);
        assert_eq!(s.var(), 0.0);
        assert_eq!(s.ci99(), 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let a = run_batch(50_000, 42, 1, normal_worker).unwrap();
        let b = run_batch(50_000, 42, 8, normal_worker).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.m2, b.m2);
    }

    #[test]
    fn failing_trial_is_reported_by_index() {
        let err = run_batch(10_000, 1, 4, || {
            let mut seen = 0u64;
            Ok(move |_: &mut TrialRng| {
                seen += 1;
                if seen == 5 {
                    Err(Error::Numerical("boom".into()))
                } else {
                    Ok(trial(1.0))
                }
            })
        })
        .unwrap_err();
        // the first chunk fails at its fifth trial
        assert!(matches!(err, Error::Trial { index: 4, .. }), "{err}");
        assert!(err.is_numerical());
    }

    #[test]
    fn too_few_trials() {
        assert!(run_batch(1, 1, 1, normal_worker).is_err());
    }

    #[test]
    fn values_match_batch() {
        let v = run_values(9000, 5, 3, normal_worker).unwrap();
        let s = run_batch(9000, 5, 1, normal_worker).unwrap();
        let mut t = EstimateStats::new();
        v.iter().for_each(|r| t.push(r.value));
        assert!((t.mean - s.mean).abs() < 1e-14);
    }
}
