//! Multi-trial training runs with periodic greedy evaluation.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arena::{Arena, ShapeSpec};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::frameworks::{build_system, AgentSystem, EpisodeMode, FrameworkKind};

pub const CURVES_HEADER: &str = "scenario,framework,trial,episode,score,eps_main,eps_nested";
pub const SUMMARY_HEADER: &str = "scenario,framework,episode,mean,std,min,max,trials_used";

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    /// Training episodes completed before this evaluation.
    pub episode: usize,
    pub score: f64,
    pub eps_main: f64,
    pub eps_nested: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningCurve {
    pub scenario: String,
    pub framework: FrameworkKind,
    pub trial: usize,
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    /// Mean score over the last `k` evaluation points.
    pub fn final_mean(&self, k: usize) -> f64 {
        let tail = &self.points[self.points.len().saturating_sub(k)..];
        tail.iter().map(|p| p.score).sum::<f64>() / tail.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub episode: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub episode: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub trials_used: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub scenario: String,
    pub framework: FrameworkKind,
    /// Surviving trials in trial order.
    pub curves: Vec<LearningCurve>,
    pub failures: Vec<TrialFailure>,
    pub summary: Vec<SummaryRow>,
}

/// Independent random stream for one trial: the experiment seed picks the key,
/// the trial id picks the stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Episode counts at which evaluations happen: every `eval_every` episodes and
/// once more at the end if the last window is partial.
pub fn eval_schedule(episodes: usize, eval_every: usize) -> Vec<usize> {
    let mut points: Vec<usize> = (1..=episodes / eval_every)
        .map(|i| i * eval_every)
        .collect();
    if !episodes.is_multiple_of(eval_every) {
        points.push(episodes);
    }
    points
}

/// Mean score of `n` greedy episodes.
pub fn evaluate(
    system: &mut dyn AgentSystem,
    arena: &mut Arena,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut total = 0.0;
    for _ in 0..n {
        arena.restart();
        total += system.run_episode(arena, EpisodeMode::Evaluate, rng)?.score as f64;
    }
    Ok(total / n as f64)
}

pub enum TrialOutcome {
    Finished(LearningCurve),
    Failed(TrialFailure),
}

pub fn run_trial(cfg: &ExperimentConfig, shape: &ShapeSpec, trial: usize) -> Result<TrialOutcome> {
    let exp = &cfg.experiment;
    let mut rng = trial_rng(exp.seed, trial);
    let mut system = build_system(exp.framework, &cfg.system_config()?, &mut rng)?;
    let mut arena = Arena::reset(shape.clone(), cfg.arena)?;
    let mut curve = LearningCurve {
        scenario: shape.name().to_string(),
        framework: exp.framework,
        trial,
        points: Vec::new(),
    };
    let checkpoints = eval_schedule(exp.episodes, exp.eval_every);
    let mut next_eval = checkpoints.iter().peekable();

    for episode in 0..exp.episodes {
        arena.restart();
        match system.run_episode(&mut arena, EpisodeMode::Train { episode }, &mut rng) {
            Ok(_) => {}
            Err(Error::Training(message)) => {
                return Ok(TrialOutcome::Failed(TrialFailure {
                    trial,
                    episode,
                    message,
                }))
            }
            Err(e) => return Err(e),
        }
        if next_eval.peek() == Some(&&(episode + 1)) {
            next_eval.next();
            let score = evaluate(system.as_mut(), &mut arena, exp.eval_episodes, &mut rng)?;
            let (eps_main, eps_nested) = system.epsilons(episode);
            curve.points.push(CurvePoint {
                episode: episode + 1,
                score,
                eps_main,
                eps_nested,
            });
        }
    }
    Ok(TrialOutcome::Finished(curve))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let shape = cfg.shape()?;
    let trials = cfg.experiment.trials;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.experiment.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<TrialOutcome>> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &shape, t))
            .collect()
    });

    let mut curves = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome? {
            TrialOutcome::Finished(c) => curves.push(c),
            TrialOutcome::Failed(f) => failures.push(f),
        }
    }
    let summary = if curves.is_empty() {
        Vec::new()
    } else {
        aggregate(&curves)?
    };
    Ok(ExperimentReport {
        scenario: shape.name().to_string(),
        framework: cfg.experiment.framework,
        curves,
        failures,
        summary,
    })
}

/// Per-episode mean, population standard deviation, min and max across curves.
pub fn aggregate(curves: &[LearningCurve]) -> Result<Vec<SummaryRow>> {
    let Some(first) = curves.first() else {
        return Err(Error::Contract("no curves to aggregate".into()));
    };
    let episodes: Vec<usize> = first.points.iter().map(|p| p.episode).collect();
    for c in curves {
        if !c
            .points
            .iter()
            .map(|p| p.episode)
            .eq(episodes.iter().copied())
        {
            return Err(Error::Contract(format!(
                "trial {} has different evaluation episodes than trial {}",
                c.trial, first.trial
            )));
        }
    }
    Ok(episodes
        .iter()
        .enumerate()
        .map(|(i, &episode)| {
            // sorted so the result does not depend on trial order
            let mut values: Vec<f64> = curves.iter().map(|c| c.points[i].score).collect();
            values.sort_by(f64::total_cmp);
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            SummaryRow {
                episode,
                mean,
                std: var.sqrt(),
                min: values[0],
                max: values[values.len() - 1],
                trials_used: values.len(),
            }
        })
        .collect())
}

/// Curve rows for every report, trial-major then episode-minor.
pub fn curves_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::new();
    out.push_str(CURVES_HEADER);
    out.push('\n');
    for report in reports {
        for curve in &report.curves {
            for p in &curve.points {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    curve.scenario,
                    curve.framework,
                    curve.trial,
                    p.episode,
                    p.score,
                    p.eps_main,
                    p.eps_nested
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn summary_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for report in reports {
        for row in &report.summary {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                report.scenario,
                report.framework,
                row.episode,
                row.mean,
                row.std,
                row.min,
                row.max,
                row.trials_used
            )
            .unwrap();
        }
    }
    out
}

/// Writes `curves.csv` and `summary.csv` into `dir`, creating it if needed.
pub fn write_reports(dir: &Path, reports: &[ExperimentReport]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    for (name, body) in [
        ("curves.csv", curves_csv(reports)),
        ("summary.csv", summary_csv(reports)),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::file(&path, e))?;
    }
    Ok(())
}
