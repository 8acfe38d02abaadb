//! Stochastic world: exogenous sampling, the two-stage transition and the
//! per-epoch episode log.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    add_count, entries, initial_due, plan_cost_unchecked, postponement_cost, take_count, BugAttr,
    DecisionPlan, DevAttr, ExogenousDraw, Rejection, ScenarioProfile, ScheduleChange, SystemState,
};
use crate::error::{Result, TriageError};

/// State after the decision and before new information arrives.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PostDecisionState {
    pub epoch: u32,
    #[serde(with = "entries")]
    pub bugs: BTreeMap<BugAttr, u32>,
    #[serde(with = "entries")]
    pub devs: BTreeMap<DevAttr, u32>,
}

/// Applies `plan`: postponed bugs age by one epoch, idle developers stay
/// available, busy developers move one epoch closer to availability and
/// assigned developers become busy for their rounded fixing time.
pub fn state_post(
    state: &SystemState,
    plan: &DecisionPlan,
    profile: &ScenarioProfile,
) -> Result<PostDecisionState> {
    plan.check_feasible(state)?;
    let mut post = PostDecisionState {
        epoch: state.epoch,
        ..Default::default()
    };
    for (&b, &n) in &plan.postpone {
        add_count(&mut post.bugs, b.aged(profile.due_floor), n);
    }
    for (&d, &n) in &state.devs {
        if d.sch >= 1 {
            add_count(&mut post.devs, DevAttr::new(d.exp_id, d.sch - 1), n);
        }
    }
    for (&d, &n) in &plan.idle {
        add_count(&mut post.devs, d, n);
    }
    for (&(d, b), &n) in &plan.assign {
        let busy = profile.busy_epochs(d.exp_id, b.type_id);
        add_count(&mut post.devs, DevAttr::new(d.exp_id, busy), n);
    }
    Ok(post)
}

/// Independent random streams so that changing one process leaves the others untouched.
#[derive(Debug, Clone)]
pub struct RngStreams {
    pub arrivals: ChaCha8Rng,
    pub schedules: ChaCha8Rng,
    pub rejections: ChaCha8Rng,
}

pub const STREAM_ARRIVALS: u64 = 1;
pub const STREAM_SCHEDULES: u64 = 2;
pub const STREAM_REJECTIONS: u64 = 3;
pub const STREAM_GENERATOR: u64 = 4;
pub const STREAM_POLICY: u64 = 5;

/// ChaCha generator on a named stream of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            arrivals: stream_rng(seed, STREAM_ARRIVALS),
            schedules: stream_rng(seed, STREAM_SCHEDULES),
            rejections: stream_rng(seed, STREAM_REJECTIONS),
        }
    }
}

/// Child seed number `index` of `seed` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED69));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Geometric absence length with the given mean, at least one epoch.
fn absence_length<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    let p = 1.0 / mean;
    let mut len = 1;
    while len < 10_000 && rng.random::<f64>() >= p {
        len += 1;
    }
    len
}

/// Samples the information revealed after `plan`.
///
/// Rejections flag each of this epoch's assignments independently with
/// probability `epsilon`; schedule changes act on the developers as they stand
/// after rejected developers have returned. No bugs arrive when `has_next` is
/// false (the episode ends with this epoch).
pub fn sample_exogenous(
    post: &PostDecisionState,
    plan: &DecisionPlan,
    profile: &ScenarioProfile,
    epsilon: f64,
    streams: &mut RngStreams,
    has_next: bool,
) -> ExogenousDraw {
    let mut draw = ExogenousDraw::default();
    if has_next {
        let counts = profile
            .arrival_process
            .sample(profile.n_bug_types, &mut streams.arrivals);
        for (k, n) in counts.into_iter().enumerate() {
            if n > 0 {
                draw.new_bugs.insert(k, n);
            }
        }
    }

    let mut devs = post.devs.clone();
    if epsilon > 0.0 {
        for (&(d, b), &n) in &plan.assign {
            let declined = (0..n)
                .filter(|_| streams.rejections.random::<f64>() < epsilon)
                .count() as u32;
            if declined > 0 {
                draw.rejections.push(Rejection {
                    exp_id: d.exp_id,
                    bug: b,
                    count: declined,
                });
                let busy = profile.busy_epochs(d.exp_id, b.type_id);
                take_count(&mut devs, DevAttr::new(d.exp_id, busy), declined);
                add_count(&mut devs, DevAttr::available(d.exp_id), declined);
            }
        }
    }

    let sched = &profile.schedule_process;
    if !sched.is_inert() {
        for (&d, &n) in &devs {
            let rng = &mut streams.schedules;
            if d.sch == 0 {
                let model = &sched.classes[d.exp_id];
                for _ in 0..n {
                    if model.absence_prob > 0.0 && rng.random::<f64>() < model.absence_prob {
                        let len = absence_length(model.mean_absence, rng);
                        draw.sch_changes.push(ScheduleChange {
                            exp_id: d.exp_id,
                            from_sch: 0,
                            to_sch: len,
                        });
                    }
                }
            } else {
                for _ in 0..n {
                    if sched.early_return_prob > 0.0
                        && rng.random::<f64>() < sched.early_return_prob
                    {
                        draw.sch_changes.push(ScheduleChange {
                            exp_id: d.exp_id,
                            from_sch: d.sch,
                            to_sch: 0,
                        });
                    }
                }
            }
        }
    }
    draw
}

/// Moves to epoch `t + 1`: rejected bugs re-open one epoch older, rejecting
/// developers become available, schedule changes apply and arrivals enter with
/// their initial due value.
pub fn state_next(
    post: &PostDecisionState,
    draw: &ExogenousDraw,
    t: u32,
    profile: &ScenarioProfile,
) -> Result<SystemState> {
    let mut next = SystemState {
        epoch: t + 1,
        bugs: post.bugs.clone(),
        devs: post.devs.clone(),
    };
    for r in &draw.rejections {
        if r.bug.type_id >= profile.n_bug_types || r.exp_id >= profile.n_dev_classes() {
            return Err(TriageError::InvalidDraw(format!(
                "rejection {r:?} out of range"
            )));
        }
        let busy = profile.busy_epochs(r.exp_id, r.bug.type_id);
        if !take_count(&mut next.devs, DevAttr::new(r.exp_id, busy), r.count) {
            return Err(TriageError::InvalidDraw(format!(
                "rejection {r:?} does not match an assignment of this epoch"
            )));
        }
        add_count(&mut next.devs, DevAttr::available(r.exp_id), r.count);
        add_count(&mut next.bugs, r.bug.aged(profile.due_floor), r.count);
    }
    for c in &draw.sch_changes {
        if !take_count(&mut next.devs, DevAttr::new(c.exp_id, c.from_sch), 1) {
            return Err(TriageError::InvalidDraw(format!(
                "schedule change {c:?} has no developer to move"
            )));
        }
        add_count(&mut next.devs, DevAttr::new(c.exp_id, c.to_sch), 1);
    }
    let due = initial_due(t + 1, profile);
    for (&k, &n) in &draw.new_bugs {
        if k >= profile.n_bug_types {
            return Err(TriageError::InvalidDraw(format!(
                "bug type {k} out of range"
            )));
        }
        add_count(&mut next.bugs, BugAttr::new(k, due), n);
    }
    Ok(next)
}

/// Penalty charged for bugs still open when an episode ends.
pub fn terminal_cost(state: &SystemState, profile: &ScenarioProfile) -> f64 {
    state
        .bugs
        .iter()
        .map(|(b, &n)| postponement_cost(b.due, profile) * n as f64)
        .sum()
}

/// One assignment as seen by the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub type_id: usize,
    pub due: i32,
    pub exp_id: usize,
    pub cost: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: u32,
    pub state: SystemState,
    pub plan: DecisionPlan,
    pub draw: ExogenousDraw,
    pub cost: f64,
    pub assignments: Vec<AssignmentRecord>,
}

/// Everything that happened in one episode.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub records: Vec<EpochRecord>,
    /// Penalty on bugs left open after the last epoch.
    pub terminal_cost: f64,
}

impl EpisodeLog {
    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cost).collect()
    }

    pub fn accepted_assignments(&self) -> impl Iterator<Item = &AssignmentRecord> {
        self.records
            .iter()
            .flat_map(|r| r.assignments.iter())
            .filter(|a| a.accepted)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonlLine {
    episode: usize,
    #[serde(flatten)]
    record: EpochRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terminal_cost: Option<f64>,
}

/// Writes episodes as one JSON object per epoch; the last epoch of each
/// episode also carries its terminal cost.
pub fn write_jsonl<W: Write>(mut out: W, logs: &[EpisodeLog]) -> Result<()> {
    for (episode, log) in logs.iter().enumerate() {
        let last = log.records.len().saturating_sub(1);
        for (i, record) in log.records.iter().enumerate() {
            let line = JsonlLine {
                episode,
                record: record.clone(),
                terminal_cost: (i == last).then_some(log.terminal_cost),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<EpisodeLog>> {
    let mut logs: Vec<EpisodeLog> = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JsonlLine = serde_json::from_str(&line)?;
        while logs.len() <= parsed.episode {
            logs.push(EpisodeLog::default());
        }
        let log = &mut logs[parsed.episode];
        log.records.push(parsed.record);
        if let Some(t) = parsed.terminal_cost {
            log.terminal_cost = t;
        }
    }
    Ok(logs)
}

/// Runs one episode epoch by epoch, recording everything.
pub struct Simulator<'a> {
    profile: &'a ScenarioProfile,
    epochs: u32,
    epsilon: f64,
    streams: RngStreams,
    state: SystemState,
    log: EpisodeLog,
}

impl<'a> Simulator<'a> {
    /// Episode of `epochs` decision epochs (at most the horizon) starting at
    /// epoch 1 with every developer available and the first arrivals drawn.
    pub fn new(profile: &'a ScenarioProfile, epochs: u32, epsilon: f64, seed: u64) -> Self {
        let mut streams = RngStreams::new(seed);
        let mut state = SystemState::all_available(profile);
        let counts = profile
            .arrival_process
            .sample(profile.n_bug_types, &mut streams.arrivals);
        let due = initial_due(1, profile);
        for (k, n) in counts.into_iter().enumerate() {
            state.add_bugs(BugAttr::new(k, due), n);
        }
        Self {
            profile,
            epochs: epochs.min(profile.horizon).max(1),
            epsilon,
            streams,
            state,
            log: EpisodeLog::default(),
        }
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn profile(&self) -> &ScenarioProfile {
        self.profile
    }

    pub fn epochs(&self) -> u32 {
        self.epochs
    }

    pub fn is_done(&self) -> bool {
        self.log.records.len() as u32 >= self.epochs
    }

    /// Applies `plan`, samples the exogenous draw and advances; returns the epoch cost.
    pub fn step(&mut self, plan: DecisionPlan) -> Result<f64> {
        if self.is_done() {
            return Err(TriageError::InvalidConfig(
                "episode already finished".into(),
            ));
        }
        let t = self.state.epoch;
        let post = state_post(&self.state, &plan, self.profile)?;
        let cost = plan_cost_unchecked(&plan, self.profile);
        let has_next = t < self.epochs;
        let draw = sample_exogenous(
            &post,
            &plan,
            self.profile,
            self.epsilon,
            &mut self.streams,
            has_next,
        );
        let mut assignments = Vec::new();
        let mut rejected: BTreeMap<(usize, BugAttr), u32> = draw
            .rejections
            .iter()
            .map(|r| ((r.exp_id, r.bug), r.count))
            .collect();
        for (&(d, b), &n) in &plan.assign {
            let declined = rejected.remove(&(d.exp_id, b)).unwrap_or(0).min(n);
            let c = self.profile.cost(d.exp_id, b.type_id);
            for i in 0..n {
                assignments.push(AssignmentRecord {
                    type_id: b.type_id,
                    due: b.due,
                    exp_id: d.exp_id,
                    cost: c,
                    accepted: i >= declined,
                });
            }
        }
        let next = state_next(&post, &draw, t, self.profile)?;
        let prev = std::mem::replace(&mut self.state, next);
        self.log.records.push(EpochRecord {
            epoch: t,
            state: prev,
            plan,
            draw,
            cost,
            assignments,
        });
        if self.is_done() {
            self.log.terminal_cost = terminal_cost(&self.state, self.profile);
        }
        Ok(cost)
    }

    /// Log of the epochs played so far.
    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn into_log(self) -> EpisodeLog {
        self.log
    }
}
