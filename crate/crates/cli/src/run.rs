//! Dispatch of a validated [`RunConfig`].

use std::fmt::Write as _;

use unbiased_jd::harness::{sweep, Estimator, Problem};
use unbiased_jd::models::check_assumptions;

use crate::config::{Command, RunConfig};
use crate::emit::Row;
use crate::CliError;

/// Rows to emit plus any free-form report text.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub report: String,
}

const PROBES: usize = 10_000;

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model.build()?;
    let problem = Problem::new(model.as_ref(), cfg.payoff, cfg.x0.clone())?;
    let (mid, pid) = (cfg.model.id(), cfg.payoff.id());
    let row = |est: &str, steps, s: &_| Row::from_stats(est, steps, mid, pid, s, cfg.seed, cfg.reference.value);
    let parametrix = Estimator::Parametrix(cfg.estimator);
    let mut out = Outcome::default();

    match cfg.command {
        Command::Estimate => {
            let s = problem.run(parametrix, cfg.trials, cfg.seed, cfg.workers)?;
            out.rows.push(row("parametrix", None, &s));
        }
        Command::Compare => {
            let s = problem.run(parametrix, cfg.trials, cfg.seed, cfg.workers)?;
            out.rows.push(row("parametrix", None, &s));
            for p in &cfg.euler {
                let e = Estimator::Euler {
                    horizon: cfg.horizon,
                    steps: p.steps,
                };
                let s = problem.run(e, p.trials, cfg.seed, cfg.workers)?;
                out.rows.push(row("euler", Some(p.steps), &s));
            }
        }
        Command::Sweep => {
            let r = sweep(&problem, cfg.sweep.param, &cfg.sweep.values, cfg.estimator, cfg.trials, cfg.seed, cfg.workers, None)?;
            for (v, s) in r.values.iter().zip(&r.stats) {
                let mut x = row("parametrix", None, s);
                x.parameter = Some((r.param.name().to_string(), *v));
                out.rows.push(x);
            }
        }
        Command::Reference => {
            let r = &cfg.reference;
            let s = problem.run(
                Estimator::Euler {
                    horizon: cfg.horizon,
                    steps: r.steps,
                },
                r.trials,
                cfg.seed,
                cfg.workers,
            )?;
            out.rows.push(row("reference", Some(r.steps), &s));
            let _ = writeln!(
                out.report,
                "reference {:.10} +- {:.3e} (euler p={} M={} seed={})",
                s.mean,
                s.stderr(),
                r.steps,
                r.trials,
                cfg.seed
            );
        }
        Command::CheckModel => {
            let r = check_assumptions(model.as_ref(), PROBES);
            let b = model.bounds();
            let mut t = String::new();
            let _ = writeln!(t, "model {} (dimension {}, brownian dimension {})", mid, model.dim(), model.brownian_dim());
            let _ = writeln!(t, "declared lambda in [{}, {}], a eigenvalues in [{}, {}], |jump| <= {}", b.lambda_min, b.lambda_max, b.a_min, b.a_max, b.jump_sup);
            let flag = |ok: bool| if ok { "ok" } else { "VIOLATED" };
            let _ = writeln!(t, "probes            {}", r.probes);
            let _ = writeln!(t, "intensity         {} observed [{:.6}, {:.6}]", flag(r.intensity_ok), r.lambda_observed.0, r.lambda_observed.1);
            let _ = writeln!(
                t,
                "ellipticity       {} eigenvalues [{:.6}, {:.6}], floor hits {}, cholesky failures {}",
                flag(r.elliptic_ok),
                r.eigen_observed.0,
                r.eigen_observed.1,
                r.ellipticity_floor_hits,
                r.cholesky_failures
            );
            let _ = writeln!(t, "a = sigma sigma^T {} max mismatch {:.3e}", flag(r.symmetric_ok), r.covariance_mismatch);
            let _ = writeln!(t, "jump size         {} observed {:.6}", flag(r.jump_ok), r.jump_observed);
            let _ = writeln!(t, "derivatives       {} max rel err {:.3e}", flag(r.derivatives_ok), r.derivative_max_err);
            let _ = writeln!(t, "assumption_violating {}", model.assumption_violating());
            out.report = t;
        }
    }
    Ok(out)
}
