//! Method comparison: identify on each trial's training samples, design the
//! shaper, drive the evaluation plant through a shaped step and score the
//! residual vibration at the trial's test instants.
//!
//! The score window for a method starts when its shaped command has settled
//! (`ceil(t_N / dt)` samples after the move begins); test index `k` maps to
//! `k` samples into that window. The reference is the final setpoint, so an
//! ideal move scores zero.

use std::sync::Arc;

use rayon::prelude::*;

use shaperlab_core::grid::GridSearch;
use shaperlab_core::ident::{FixedParams, Identification, Identifier};
use shaperlab_core::{
    aggregate_trials, compute_metrics, design_shaper, shape_command, simulate_response,
    wilcoxon_signed_rank, CommandSignal, IdentifyConfig, ImpulseTrain, MetricsTriple,
    SecondOrderParams, ShaperKind, TimeSeries, UkfIdentifier,
};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::protocol::{make_trial_splits, ProtocolParams, TrialSplit};
use crate::report::{
    AggregateOut, DatasetOut, EvalReport, MethodResult, ParamsOut, TrialOutcome, WilcoxonOut,
};
use crate::rng::derive_seed;

/// How a pipeline obtains plant parameters.
#[derive(Clone)]
pub enum IdentifierChoice {
    /// UKF identification from `guess`, or from the record's rough estimate.
    Ukf {
        guess: Option<SecondOrderParams>,
        config: IdentifyConfig,
    },
    /// Preset parameters, no identification.
    Fixed(SecondOrderParams),
    /// The record's rough mean-crossing estimate, no filtering.
    Rough,
    /// Brute-force least squares around the record's rough estimate.
    Grid,
    Custom(Arc<dyn Identifier + Send + Sync>),
}

impl std::fmt::Debug for IdentifierChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IdentifierChoice::Ukf { guess, .. } => {
                f.debug_struct("Ukf").field("guess", guess).finish()
            }
            IdentifierChoice::Fixed(p) => f.debug_tuple("Fixed").field(p).finish(),
            IdentifierChoice::Rough => f.write_str("Rough"),
            IdentifierChoice::Grid => f.write_str("Grid"),
            IdentifierChoice::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Identifier followed by a shaper (`None` leaves the command unshaped).
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub name: String,
    pub identifier: IdentifierChoice,
    pub shaper: Option<ShaperKind>,
}

impl Pipeline {
    pub fn new(
        name: impl Into<String>,
        identifier: IdentifierChoice,
        shaper: Option<ShaperKind>,
    ) -> Self {
        Self {
            name: name.into(),
            identifier,
            shaper,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonConfig {
    pub protocol: ProtocolParams,
    pub seed: u64,
    /// Worker threads for the trial loop.
    pub jobs: usize,
    /// `(candidate, baseline)` method indices for the signed-rank test.
    /// Defaults to `(0, 1)`, or `(0, 0)` with a single method.
    pub compare: Option<(usize, usize)>,
    /// Move size in mm; defaults to each record's final command value (1 mm if zero).
    pub step_level: Option<f64>,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            protocol: ProtocolParams::default(),
            seed: 0,
            jobs: 1,
            compare: None,
            step_level: None,
        }
    }
}

/// Command and response of one method's move on one record.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionTrace {
    pub method: String,
    pub dataset: String,
    pub command: TimeSeries,
    pub position: TimeSeries,
}

#[derive(Debug, Clone)]
pub struct ComparisonOutput {
    pub report: EvalReport,
    /// First trial of every (method, dataset) pair that succeeded.
    pub positions: Vec<PositionTrace>,
}

struct DatasetContext<'a> {
    dataset: &'a Dataset,
    command: CommandSignal,
    rough: SecondOrderParams,
    plant: SecondOrderParams,
    plant_source: &'static str,
    level: f64,
    splits: Vec<TrialSplit>,
}

/// Grid used to fit an evaluation plant when a record has no ground truth.
pub fn reference_grid(rough: &SecondOrderParams) -> GridSearch {
    GridSearch::new((0.5 * rough.omega_n(), 2.0 * rough.omega_n()), (0.0, 0.5))
}

pub fn run_comparison(
    methods: &[Pipeline],
    datasets: &[Dataset],
    cfg: &ComparisonConfig,
) -> Result<ComparisonOutput> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one method is required".into(),
        ));
    }
    if datasets.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one dataset is required".into(),
        ));
    }
    let (candidate, baseline) =
        cfg.compare
            .unwrap_or(if methods.len() > 1 { (0, 1) } else { (0, 0) });
    if candidate >= methods.len() || baseline >= methods.len() {
        return Err(Error::InvalidArgument(
            "comparison pair out of range".into(),
        ));
    }

    let contexts = datasets
        .iter()
        .enumerate()
        .map(|(d, ds)| prepare(d, ds, cfg))
        .collect::<Result<Vec<_>>>()?;

    let tasks: Vec<(usize, usize, usize)> = (0..methods.len())
        .flat_map(|m| {
            let contexts = &contexts;
            (0..contexts.len())
                .flat_map(move |d| (0..contexts[d].splits.len()).map(move |t| (m, d, t)))
        })
        .collect();
    let run = |&(m, d, t): &(usize, usize, usize)| {
        run_trial(&methods[m], &contexts[d], &contexts[d].splits[t])
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcomes: Vec<(TrialOutcome, Option<(TimeSeries, TimeSeries)>)> =
        pool.install(|| tasks.par_iter().map(run).collect());

    let mut results = Vec::new();
    let mut positions = Vec::new();
    let mut it = outcomes.into_iter();
    for method in methods {
        for ctx in &contexts {
            let mut trials = Vec::with_capacity(ctx.splits.len());
            for _ in 0..ctx.splits.len() {
                let (outcome, trace) = it.next().expect("one outcome per task");
                if let Some((command, position)) = trace {
                    if !positions.iter().any(|p: &PositionTrace| {
                        p.method == method.name && p.dataset == ctx.dataset.label()
                    }) {
                        positions.push(PositionTrace {
                            method: method.name.clone(),
                            dataset: ctx.dataset.label().to_string(),
                            command,
                            position,
                        });
                    }
                }
                trials.push(outcome);
            }
            let ok: Vec<MetricsTriple> = trials
                .iter()
                .filter_map(|t| t.metrics.map(Into::into))
                .collect();
            results.push(MethodResult {
                method: method.name.clone(),
                dataset: ctx.dataset.label().to_string(),
                failed: trials.len() - ok.len(),
                aggregate: aggregate_trials(&ok).ok().map(AggregateOut::from),
                trials,
            });
        }
    }

    let wilcoxon = signed_rank_tests(methods, &contexts, &results, candidate, baseline);
    let report = EvalReport {
        seed: cfg.seed,
        protocol: cfg.protocol,
        methods: methods.iter().map(|m| m.name.clone()).collect(),
        datasets: contexts
            .iter()
            .map(|c| DatasetOut {
                label: c.dataset.label().to_string(),
                samples: c.dataset.series.len(),
                dt: c.dataset.series.dt(),
                plant: c.plant.into(),
                plant_source: c.plant_source.to_string(),
                rough_guess: c.rough.into(),
                step_level: c.level,
            })
            .collect(),
        results,
        wilcoxon,
    };
    Ok(ComparisonOutput { report, positions })
}

fn prepare<'a>(d: usize, ds: &'a Dataset, cfg: &ComparisonConfig) -> Result<DatasetContext<'a>> {
    let command = ds.command()?;
    let rough = ds.rough_guess()?;
    let (plant, plant_source) = match ds.ground_truth {
        Some(p) => (p, "ground_truth"),
        None => (
            reference_grid(&rough)
                .search(&ds.observations(), &command)?
                .0,
            "grid_fit",
        ),
    };
    let level = cfg.step_level.unwrap_or_else(|| {
        let l = command.final_value();
        if l.abs() > 1e-12 {
            l
        } else {
            1.0
        }
    });
    let splits = make_trial_splits(
        ds.series.len(),
        &cfg.protocol,
        derive_seed(cfg.seed, 0x5EED_0000 + d as u64),
    )?;
    Ok(DatasetContext {
        dataset: ds,
        command,
        rough,
        plant,
        plant_source,
        level,
        splits,
    })
}

fn identify(
    choice: &IdentifierChoice,
    ctx: &DatasetContext,
    split: &TrialSplit,
) -> shaperlab_core::Result<Identification> {
    let obs = ctx.dataset.observations_at(&split.train_indices);
    match choice {
        IdentifierChoice::Ukf { guess, config } => UkfIdentifier {
            guess: guess.unwrap_or(ctx.rough),
            config: config.clone(),
        }
        .identify(&obs, &ctx.command),
        IdentifierChoice::Fixed(p) => FixedParams(*p).identify(&obs, &ctx.command),
        IdentifierChoice::Rough => FixedParams(ctx.rough).identify(&obs, &ctx.command),
        IdentifierChoice::Grid => reference_grid(&ctx.rough).identify(&obs, &ctx.command),
        IdentifierChoice::Custom(id) => id.identify(&obs, &ctx.command),
    }
}

/// Shaped step of `level` on `n` samples of spacing `dt` and the plant's
/// response from rest. Returns `(command, response, settle_offset)`.
pub fn shaped_move(
    plant: &SecondOrderParams,
    train: &ImpulseTrain,
    level: f64,
    dt: f64,
    n: usize,
) -> shaperlab_core::Result<(TimeSeries, TimeSeries, usize)> {
    let step = TimeSeries::constant(0.0, dt, level, n)?;
    let command = shape_command(&step, train);
    let offset = command.len() - n;
    let response = simulate_response(plant, &command, 0.0, 0.0)?;
    Ok((command, response, offset))
}

fn run_trial(
    pipeline: &Pipeline,
    ctx: &DatasetContext,
    split: &TrialSplit,
) -> (TrialOutcome, Option<(TimeSeries, TimeSeries)>) {
    let mut outcome = TrialOutcome {
        trial: split.trial_index,
        seed: split.seed,
        ok: false,
        error: None,
        params: None,
        metrics: None,
        epoch_errors: Vec::new(),
        stop: None,
        clamp_warning: false,
    };
    let fail = |mut o: TrialOutcome, e: shaperlab_core::Error| {
        o.error = Some(e.to_string());
        (o, None)
    };
    let id = match identify(&pipeline.identifier, ctx, split) {
        Ok(id) => id,
        Err(e) => return fail(outcome, e),
    };
    outcome.params = Some(id.params.into());
    if let Some(conv) = &id.convergence {
        outcome.epoch_errors = conv.errors().collect();
        outcome.stop = Some(format!("{:?}", conv.stop));
        outcome.clamp_warning = conv.clamp_warning;
    }
    let train = pipeline
        .shaper
        .map(|k| design_shaper(k, &id.params).into_train())
        .unwrap_or_else(ImpulseTrain::identity);
    let series = &ctx.dataset.series;
    let (command, response, offset) =
        match shaped_move(&ctx.plant, &train, ctx.level, series.dt(), series.len()) {
            Ok(m) => m,
            Err(e) => return fail(outcome, e),
        };
    let y = response.samples();
    let estimate: Vec<f64> = split.test_indices.iter().map(|&k| y[offset + k]).collect();
    let reference = vec![ctx.level; estimate.len()];
    match compute_metrics(&reference, &estimate) {
        Ok(m) => outcome.metrics = Some(m.into()),
        Err(e) => return fail(outcome, e),
    }
    outcome.ok = true;
    (outcome, Some((command, response)))
}

fn signed_rank_tests(
    methods: &[Pipeline],
    contexts: &[DatasetContext],
    results: &[MethodResult],
    candidate: usize,
    baseline: usize,
) -> Vec<WilcoxonOut> {
    let n_data = contexts.len();
    let pairs_for = |d: usize| -> (Vec<f64>, Vec<f64>) {
        let cand = &results[candidate * n_data + d].trials;
        let base = &results[baseline * n_data + d].trials;
        cand.iter()
            .zip(base)
            .filter_map(|(c, b)| Some((b.metrics?.rmse, c.metrics?.rmse)))
            .unzip()
    };
    let test = |dataset: Option<String>, (base, cand): (Vec<f64>, Vec<f64>)| {
        WilcoxonOut::new(
            &methods[candidate].name,
            &methods[baseline].name,
            dataset,
            wilcoxon_signed_rank(&base, &cand),
        )
    };
    let mut out: Vec<WilcoxonOut> = (0..n_data)
        .map(|d| test(Some(contexts[d].dataset.label().to_string()), pairs_for(d)))
        .collect();
    if n_data > 1 {
        let (mut base, mut cand) = (Vec::new(), Vec::new());
        for d in 0..n_data {
            let (b, c) = pairs_for(d);
            base.extend(b);
            cand.extend(c);
        }
        out.push(test(None, (base, cand)));
    }
    out
}

impl From<SecondOrderParams> for ParamsOut {
    fn from(p: SecondOrderParams) -> Self {
        ParamsOut {
            omega_n: p.omega_n(),
            zeta: p.zeta(),
        }
    }
}
