//! Measures computed from episode logs, plot-ready CSV output and a paired
//! sign test.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::domain::ScenarioProfile;
use crate::environment::EpisodeLog;
use crate::error::{Result, TriageError};
use crate::trainer::TrainReport;

/// `Σ_t γ^{t-1}·cost_t + γ^E·terminal` for an episode of `E` epochs.
pub fn discounted_cost(log: &EpisodeLog, gamma: f64) -> f64 {
    let mut total = 0.0;
    let mut last = 0;
    for r in &log.records {
        total += gamma.powi(r.epoch as i32 - 1) * r.cost;
        last = r.epoch;
    }
    total + gamma.powi(last as i32) * log.terminal_cost
}

/// Percentage of accepted assignments whose class is among the `k` fastest
/// classes for the bug type; classes tied with the `k`-th fastest count too.
pub fn top_k_accuracy(logs: &[EpisodeLog], profile: &ScenarioProfile, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(TriageError::InvalidConfig("k must be at least 1".into()));
    }
    let thresholds: Vec<f64> = (0..profile.n_bug_types)
        .map(|b| {
            let mut costs: Vec<f64> = profile.dev_classes.iter().map(|c| c.costs[b]).collect();
            costs.sort_by(f64::total_cmp);
            costs[(k - 1).min(costs.len() - 1)]
        })
        .collect();
    let mut hits = 0usize;
    let mut total = 0usize;
    for a in logs.iter().flat_map(|l| l.accepted_assignments()) {
        total += 1;
        if profile.cost(a.exp_id, a.type_id) <= thresholds[a.type_id] {
            hits += 1;
        }
    }
    if total == 0 {
        return Err(TriageError::UndefinedMetric(
            "top-k accuracy needs at least one accepted assignment".into(),
        ));
    }
    Ok(100.0 * hits as f64 / total as f64)
}

/// Five-number style summary of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance (zero for a single observation).
    pub variance: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub samples: Vec<f64>,
}

impl Summary {
    pub fn from_samples(samples: Vec<f64>, what: &str) -> Result<Self> {
        if samples.is_empty() {
            return Err(TriageError::UndefinedMetric(format!(
                "no samples for {what}"
            )));
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            count: n,
            mean,
            variance,
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
            samples,
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Fixing times of accepted assignments.
pub fn fixing_time_stats(logs: &[EpisodeLog], profile: &ScenarioProfile) -> Result<Summary> {
    let samples = logs
        .iter()
        .flat_map(|l| l.accepted_assignments())
        .map(|a| profile.cost(a.exp_id, a.type_id))
        .collect();
    Summary::from_samples(samples, "fixing time")
}

/// Due attribute at the moment of each accepted assignment.
pub fn due_date_stats(logs: &[EpisodeLog]) -> Result<Summary> {
    let samples = logs
        .iter()
        .flat_map(|l| l.accepted_assignments())
        .map(|a| a.due as f64)
        .collect();
    Summary::from_samples(samples, "due date")
}

/// Mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One-sided exact sign test: probability of at least `wins` successes out of
/// `wins + losses` fair coin flips. Ties are dropped by the caller.
pub fn sign_test_p(wins: usize, losses: usize) -> f64 {
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in wins..=n {
        p += binomial(n, k);
    }
    p / 2f64.powi(n as i32)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Paired comparison where `better(a, b)` says the first sample wins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub p_value: f64,
}

impl SignTest {
    /// `a[i]` wins when it is strictly below `b[i]`.
    pub fn lower_is_better(a: &[f64], b: &[f64]) -> Self {
        let (mut wins, mut losses, mut ties) = (0, 0, 0);
        for (x, y) in a.iter().zip(b) {
            if x < y {
                wins += 1;
            } else if x > y {
                losses += 1;
            } else {
                ties += 1;
            }
        }
        Self {
            wins,
            losses,
            ties,
            p_value: sign_test_p(wins, losses),
        }
    }

    pub fn higher_is_better(a: &[f64], b: &[f64]) -> Self {
        let na: Vec<f64> = a.iter().map(|x| -x).collect();
        let nb: Vec<f64> = b.iter().map(|x| -x).collect();
        Self::lower_is_better(&na, &nb)
    }
}

/// Per-policy metric row used by `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub episodes: usize,
    pub discounted_cost_mean: f64,
    pub discounted_cost_stderr: f64,
    pub fixing_time_mean: f64,
    pub fixing_time_median: f64,
    pub top1: f64,
    pub top3: f64,
    pub top5: f64,
    pub due_mean: f64,
    pub due_variance: f64,
    pub assignments: usize,
}

pub const SUMMARY_HEADER: [&str; 12] = [
    "policy",
    "episodes",
    "discounted_cost_mean",
    "discounted_cost_stderr",
    "fixing_time_mean",
    "fixing_time_median",
    "top1",
    "top3",
    "top5",
    "due_mean",
    "due_variance",
    "assignments",
];

impl PolicySummary {
    pub fn from_logs(
        policy: &str,
        logs: &[EpisodeLog],
        profile: &ScenarioProfile,
        gamma: f64,
    ) -> Result<Self> {
        let costs: Vec<f64> = logs.iter().map(|l| discounted_cost(l, gamma)).collect();
        let (mean, stderr) = mean_stderr(&costs);
        let fix = fixing_time_stats(logs, profile)?;
        let due = due_date_stats(logs)?;
        Ok(Self {
            policy: policy.to_string(),
            episodes: logs.len(),
            discounted_cost_mean: mean,
            discounted_cost_stderr: stderr,
            fixing_time_mean: fix.mean,
            fixing_time_median: fix.median,
            top1: top_k_accuracy(logs, profile, 1)?,
            top3: top_k_accuracy(logs, profile, 3)?,
            top5: top_k_accuracy(logs, profile, 5)?,
            due_mean: due.mean,
            due_variance: due.variance,
            assignments: fix.count,
        })
    }

    pub fn write_csv<W: Write>(rows: &[PolicySummary], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SUMMARY_HEADER)?;
        for r in rows {
            w.write_record([
                r.policy.clone(),
                r.episodes.to_string(),
                r.discounted_cost_mean.to_string(),
                r.discounted_cost_stderr.to_string(),
                r.fixing_time_mean.to_string(),
                r.fixing_time_median.to_string(),
                r.top1.to_string(),
                r.top3.to_string(),
                r.top5.to_string(),
                r.due_mean.to_string(),
                r.due_variance.to_string(),
                r.assignments.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Figure data that can be emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// `policy,iteration,mean_cost,stderr`
    Convergence,
    /// `policy,episode,fixing_time`
    FixingTimeBox,
    /// `policy,episode,due`
    DueDateBox,
    /// `policy,epoch,type_id,due,iteration,value`
    ValueTrace,
}

impl PlotKind {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "convergence" => Ok(Self::Convergence),
            "fixing-time-box" => Ok(Self::FixingTimeBox),
            "due-date-box" => Ok(Self::DueDateBox),
            "value-trace" => Ok(Self::ValueTrace),
            other => Err(TriageError::InvalidConfig(format!(
                "unknown plot kind `{other}` (expected convergence, fixing-time-box, due-date-box or value-trace)"
            ))),
        }
    }

    pub fn header(&self) -> &'static [&'static str] {
        match self {
            Self::Convergence => &["policy", "iteration", "mean_cost", "stderr"],
            Self::FixingTimeBox => &["policy", "episode", "fixing_time"],
            Self::DueDateBox => &["policy", "episode", "due"],
            Self::ValueTrace => &["policy", "epoch", "type_id", "due", "iteration", "value"],
        }
    }
}

/// Data of one run, as far as it exists.
pub struct RunData<'a> {
    pub label: &'a str,
    pub report: Option<&'a TrainReport>,
    pub logs: &'a [EpisodeLog],
}

/// Writes CSV rows of `kind` for every run.
pub fn emit_plot_data<W: Write>(
    runs: &[RunData<'_>],
    kind: PlotKind,
    profile: &ScenarioProfile,
    out: W,
) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(kind.header())?;
    let mut rows = 0;
    for run in runs {
        match kind {
            PlotKind::Convergence => {
                if let Some(report) = run.report {
                    for p in &report.eval {
                        w.write_record([
                            run.label.to_string(),
                            p.iteration.to_string(),
                            p.mean.to_string(),
                            p.stderr.to_string(),
                        ])?;
                        rows += 1;
                    }
                }
            }
            PlotKind::FixingTimeBox | PlotKind::DueDateBox => {
                for (i, log) in run.logs.iter().enumerate() {
                    for a in log.accepted_assignments() {
                        let v = if kind == PlotKind::FixingTimeBox {
                            profile.cost(a.exp_id, a.type_id)
                        } else {
                            a.due as f64
                        };
                        w.write_record([run.label.to_string(), i.to_string(), v.to_string()])?;
                        rows += 1;
                    }
                }
            }
            PlotKind::ValueTrace => {
                if let Some(report) = run.report {
                    for trace in &report.traces {
                        for (it, v) in trace.values.iter().enumerate() {
                            w.write_record([
                                run.label.to_string(),
                                trace.probe.epoch.to_string(),
                                trace.probe.bug.type_id.to_string(),
                                trace.probe.bug.due.to_string(),
                                it.to_string(),
                                v.to_string(),
                            ])?;
                            rows += 1;
                        }
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(rows)
}
