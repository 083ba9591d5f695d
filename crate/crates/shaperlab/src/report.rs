//! Serializable comparison results and their text, JSON and CSV renderings.

use std::fmt::Write as _;

use serde::Serialize;

use shaperlab_core::{MeanStd, MetricsSummary, MetricsTriple, WilcoxonResult};

use crate::dataset::fmt_f64;
use crate::eval::PositionTrace;
use crate::protocol::ProtocolParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsOut {
    pub omega_n: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsOut {
    pub max_err: f64,
    pub rmse: f64,
    pub mean_err: f64,
}

impl From<MetricsTriple> for MetricsOut {
    fn from(m: MetricsTriple) -> Self {
        Self {
            max_err: m.max_err,
            rmse: m.rmse,
            mean_err: m.mean_err,
        }
    }
}

impl From<MetricsOut> for MetricsTriple {
    fn from(m: MetricsOut) -> Self {
        MetricsTriple {
            max_err: m.max_err,
            rmse: m.rmse,
            mean_err: m.mean_err,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatOut {
    pub mean: f64,
    pub std: f64,
}

impl From<MeanStd> for StatOut {
    fn from(m: MeanStd) -> Self {
        Self {
            mean: m.mean,
            std: m.std,
        }
    }
}

impl StatOut {
    pub fn display(&self) -> String {
        MeanStd {
            mean: self.mean,
            std: self.std,
        }
        .to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateOut {
    pub max_err: StatOut,
    pub rmse: StatOut,
    pub mean_err: StatOut,
    pub trials: usize,
}

impl From<MetricsSummary> for AggregateOut {
    fn from(s: MetricsSummary) -> Self {
        Self {
            max_err: s.max_err.into(),
            rmse: s.rmse.into(),
            mean_err: s.mean_err.into(),
            trials: s.trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub params: Option<ParamsOut>,
    pub metrics: Option<MetricsOut>,
    pub epoch_errors: Vec<f64>,
    pub stop: Option<String>,
    pub clamp_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub dataset: String,
    pub failed: usize,
    pub aggregate: Option<AggregateOut>,
    pub trials: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetOut {
    pub label: String,
    pub samples: usize,
    pub dt: f64,
    pub plant: ParamsOut,
    pub plant_source: String,
    pub rough_guess: ParamsOut,
    pub step_level: f64,
}

/// Signed-rank test on paired RMSE, differences taken baseline minus candidate,
/// so a small one-sided p favours the candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonOut {
    pub candidate: String,
    pub baseline: String,
    /// `None` for the test pooled over all records.
    pub dataset: Option<String>,
    pub pairs: usize,
    pub r_plus: Option<f64>,
    pub r_minus: Option<f64>,
    pub p_two_sided: Option<f64>,
    pub p_one_sided: Option<f64>,
    pub exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl WilcoxonOut {
    pub fn new(
        candidate: &str,
        baseline: &str,
        dataset: Option<String>,
        result: shaperlab_core::Result<WilcoxonResult>,
    ) -> Self {
        let mut out = Self {
            candidate: candidate.to_string(),
            baseline: baseline.to_string(),
            dataset,
            pairs: 0,
            r_plus: None,
            r_minus: None,
            p_two_sided: None,
            p_one_sided: None,
            exact: None,
            error: None,
        };
        match result {
            Ok(w) => {
                out.pairs = w.n_effective;
                out.r_plus = Some(w.r_plus);
                out.r_minus = Some(w.r_minus);
                out.p_two_sided = Some(w.p_two_sided);
                out.p_one_sided = Some(w.p_one_sided);
                out.exact = Some(w.exact);
            }
            Err(e) => out.error = Some(e.to_string()),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub protocol: ProtocolParams,
    pub methods: Vec<String>,
    pub datasets: Vec<DatasetOut>,
    pub results: Vec<MethodResult>,
    pub wilcoxon: Vec<WilcoxonOut>,
}

impl EvalReport {
    pub fn result(&self, method: &str, dataset: &str) -> Option<&MethodResult> {
        self.results
            .iter()
            .find(|r| r.method == method && r.dataset == dataset)
    }

    pub fn to_json(&self) -> crate::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn pad(s: &str, w: usize) -> String {
    format!("{s:<w$}")
}

/// Records as rows, one column per method, a block per metric.
/// `*` marks the lowest mean in each row.
pub fn render_table(report: &EvalReport) -> String {
    let pick: [(&str, fn(&AggregateOut) -> StatOut); 3] = [
        ("MAX ERR (mm)", |a| a.max_err),
        ("RMSE (mm)", |a| a.rmse),
        ("MEAN ERR (mm)", |a| a.mean_err),
    ];
    let cells: Vec<Vec<Vec<String>>> = pick
        .iter()
        .map(|(_, f)| {
            report
                .datasets
                .iter()
                .map(|d| {
                    let stats: Vec<Option<StatOut>> = report
                        .methods
                        .iter()
                        .map(|m| {
                            report
                                .result(m, &d.label)
                                .and_then(|r| r.aggregate.as_ref())
                                .map(f)
                        })
                        .collect();
                    let best = stats
                        .iter()
                        .flatten()
                        .map(|s| s.mean)
                        .fold(f64::INFINITY, f64::min);
                    stats
                        .iter()
                        .map(|s| match s {
                            Some(s) if s.mean == best => format!("{}*", s.display()),
                            Some(s) => s.display(),
                            None => "n/a".to_string(),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let label_w = report
        .datasets
        .iter()
        .map(|d| d.label.len())
        .chain(pick.iter().map(|(n, _)| n.len()))
        .max()
        .unwrap_or(0)
        + 2;
    let col_w: Vec<usize> = (0..report.methods.len())
        .map(|m| {
            cells
                .iter()
                .flatten()
                .map(|row| row[m].len())
                .chain([report.methods[m].len()])
                .max()
                .unwrap_or(0)
                + 2
        })
        .collect();

    let mut out = String::new();
    for (b, (name, _)) in pick.iter().enumerate() {
        let mut line = pad(name, label_w);
        for (m, method) in report.methods.iter().enumerate() {
            line.push_str(&pad(method, col_w[m]));
        }
        let _ = writeln!(out, "{}", line.trim_end());
        for (d, ds) in report.datasets.iter().enumerate() {
            let mut line = pad(&ds.label, label_w);
            for (m, cell) in cells[b][d].iter().enumerate() {
                line.push_str(&pad(cell, col_w[m]));
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out.push('\n');
    }
    for r in report.results.iter().filter(|r| r.failed > 0) {
        let _ = writeln!(
            out,
            "{} on {}: {} failed trial(s)",
            r.method, r.dataset, r.failed
        );
    }
    for w in &report.wilcoxon {
        let scope = w.dataset.as_deref().unwrap_or("all records");
        match (&w.error, w.p_one_sided, w.p_two_sided) {
            (None, Some(p1), Some(p2)) => {
                let _ = writeln!(
                    out,
                    "signed-rank {} vs {} ({scope}): n={} R+={} R-={} p(one-sided)={:.3e} p(two-sided)={:.3e}{}",
                    w.candidate,
                    w.baseline,
                    w.pairs,
                    w.r_plus.unwrap_or(0.0),
                    w.r_minus.unwrap_or(0.0),
                    p1,
                    p2,
                    if w.exact == Some(true) { " exact" } else { " normal approx." },
                );
            }
            (err, _, _) => {
                let _ = writeln!(
                    out,
                    "signed-rank {} vs {} ({scope}): unavailable ({})",
                    w.candidate,
                    w.baseline,
                    err.as_deref().unwrap_or("no result"),
                );
            }
        }
    }
    out
}

/// `method,dataset,trial,epoch,error`, one row per identification epoch.
pub fn convergence_csv(report: &EvalReport) -> String {
    let mut out = String::from("method,dataset,trial,epoch,error\n");
    for r in &report.results {
        for t in &r.trials {
            for (e, err) in t.epoch_errors.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.method,
                    r.dataset,
                    t.trial,
                    e + 1,
                    fmt_f64(*err)
                );
            }
        }
    }
    out
}

/// `method,dataset,time_s,command_mm,position_mm` for each stored move.
pub fn positions_csv(traces: &[PositionTrace]) -> String {
    let mut out = String::from("method,dataset,time_s,command_mm,position_mm\n");
    for tr in traces {
        for ((t, u), y) in tr.command.iter().zip(tr.position.samples()) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                tr.method,
                tr.dataset,
                fmt_f64(t),
                fmt_f64(u),
                fmt_f64(*y)
            );
        }
    }
    out
}
