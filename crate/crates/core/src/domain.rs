//! Shared value types of the triage model.
//!
//! Bugs are described by `(type, due)` and developers by `(expertise class,
//! epochs until available)`. States and decisions are count maps over those
//! attributes, so developers with identical cost rows collapse into a single
//! class with a head count.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TriageError};

/// Version written into (and required from) every profile document.
pub const PROFILE_SCHEMA_VERSION: u32 = 1;

/// Open bug attribute: LDA category and epochs left until the assignment deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BugAttr {
    pub type_id: usize,
    pub due: i32,
}

impl BugAttr {
    pub fn new(type_id: usize, due: i32) -> Self {
        Self { type_id, due }
    }

    /// Attribute one epoch later, clamped at the profile's due floor.
    pub fn aged(self, due_floor: i32) -> Self {
        Self {
            type_id: self.type_id,
            due: (self.due - 1).max(due_floor),
        }
    }
}

/// Developer attribute: expertise class and epochs until available (0 = now).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DevAttr {
    pub exp_id: usize,
    pub sch: u32,
}

impl DevAttr {
    pub fn new(exp_id: usize, sch: u32) -> Self {
        Self { exp_id, sch }
    }

    pub fn available(exp_id: usize) -> Self {
        Self { exp_id, sch: 0 }
    }

    pub fn is_available(&self) -> bool {
        self.sch == 0
    }
}

/// One expertise class: expected fixing time (epochs) per bug type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevClass {
    pub costs: Vec<f64>,
}

/// Per-epoch bug arrival model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalProcess {
    /// Exactly `counts[k]` bugs of type `k` every epoch.
    Deterministic { counts: Vec<u32> },
    /// Independent per-type histograms; `per_type[k][n]` is P(n arrivals of type k).
    Histogram { per_type: Vec<Vec<f64>> },
    /// Joint empirical distribution over whole arrival vectors.
    Joint { outcomes: Vec<JointOutcome> },
    /// Independent Poisson counts per type.
    Poisson { rates: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointOutcome {
    pub counts: Vec<u32>,
    pub prob: f64,
}

impl ArrivalProcess {
    /// Draws one epoch of arrivals, one count per bug type.
    pub fn sample<R: Rng + ?Sized>(&self, n_types: usize, rng: &mut R) -> Vec<u32> {
        match self {
            ArrivalProcess::Deterministic { counts } => counts.clone(),
            ArrivalProcess::Histogram { per_type } => per_type
                .iter()
                .map(|hist| pick_index(hist, rng.random::<f64>()) as u32)
                .collect(),
            ArrivalProcess::Joint { outcomes } => {
                let probs: Vec<f64> = outcomes.iter().map(|o| o.prob).collect();
                let idx = pick_index(&probs, rng.random::<f64>());
                outcomes[idx].counts.clone()
            }
            ArrivalProcess::Poisson { rates } => {
                let mut counts = Vec::with_capacity(n_types);
                for &rate in rates {
                    if rate > 0.0 {
                        let dist = Poisson::new(rate).expect("validated rate");
                        counts.push(dist.sample(rng) as u32);
                    } else {
                        counts.push(0);
                    }
                }
                counts
            }
        }
    }

    /// Exact outcome list with probabilities, when the support is finite.
    pub fn outcomes(&self) -> Option<Vec<(Vec<u32>, f64)>> {
        match self {
            ArrivalProcess::Deterministic { counts } => Some(vec![(counts.clone(), 1.0)]),
            ArrivalProcess::Joint { outcomes } => Some(
                outcomes
                    .iter()
                    .filter(|o| o.prob > 0.0)
                    .map(|o| (o.counts.clone(), o.prob))
                    .collect(),
            ),
            ArrivalProcess::Histogram { per_type } => {
                let mut acc: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
                for hist in per_type {
                    let mut next = Vec::new();
                    for (counts, p) in &acc {
                        for (n, &q) in hist.iter().enumerate() {
                            if q > 0.0 {
                                let mut c = counts.clone();
                                c.push(n as u32);
                                next.push((c, p * q));
                            }
                        }
                    }
                    acc = next;
                }
                Some(acc)
            }
            ArrivalProcess::Poisson { .. } => None,
        }
    }

    /// Expected arrivals per type and epoch.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            ArrivalProcess::Deterministic { counts } => counts.iter().map(|&c| c as f64).collect(),
            ArrivalProcess::Histogram { per_type } => per_type
                .iter()
                .map(|h| h.iter().enumerate().map(|(n, p)| n as f64 * p).sum())
                .collect(),
            ArrivalProcess::Joint { outcomes } => {
                let n = outcomes.first().map(|o| o.counts.len()).unwrap_or(0);
                let mut mean = vec![0.0; n];
                for o in outcomes {
                    for (m, &c) in mean.iter_mut().zip(&o.counts) {
                        *m += o.prob * c as f64;
                    }
                }
                mean
            }
            ArrivalProcess::Poisson { rates } => rates.clone(),
        }
    }

    /// Largest total number of bugs a single epoch can bring, `None` if unbounded.
    pub fn max_total(&self) -> Option<u32> {
        match self {
            ArrivalProcess::Poisson { rates } => {
                if rates.iter().all(|&r| r == 0.0) {
                    Some(0)
                } else {
                    None
                }
            }
            other => other
                .outcomes()
                .map(|outs| outs.iter().map(|(c, _)| c.iter().sum()).max().unwrap_or(0)),
        }
    }

    fn validate(&self, n_types: usize) -> Result<()> {
        let field = "arrival_process";
        match self {
            ArrivalProcess::Deterministic { counts } => {
                if counts.len() != n_types {
                    return Err(TriageError::profile(
                        format!("{field}.counts"),
                        format!("expected {n_types} entries, found {}", counts.len()),
                    ));
                }
            }
            ArrivalProcess::Histogram { per_type } => {
                if per_type.len() != n_types {
                    return Err(TriageError::profile(
                        format!("{field}.per_type"),
                        format!("expected {n_types} histograms, found {}", per_type.len()),
                    ));
                }
                for (k, hist) in per_type.iter().enumerate() {
                    check_distribution(&format!("{field}.per_type[{k}]"), hist)?;
                }
            }
            ArrivalProcess::Joint { outcomes } => {
                if outcomes.is_empty() {
                    return Err(TriageError::profile(format!("{field}.outcomes"), "empty"));
                }
                for (i, o) in outcomes.iter().enumerate() {
                    if o.counts.len() != n_types {
                        return Err(TriageError::profile(
                            format!("{field}.outcomes[{i}].counts"),
                            format!("expected {n_types} entries, found {}", o.counts.len()),
                        ));
                    }
                }
                let probs: Vec<f64> = outcomes.iter().map(|o| o.prob).collect();
                check_distribution(&format!("{field}.outcomes"), &probs)?;
            }
            ArrivalProcess::Poisson { rates } => {
                if rates.len() != n_types {
                    return Err(TriageError::profile(
                        format!("{field}.rates"),
                        format!("expected {n_types} entries, found {}", rates.len()),
                    ));
                }
                for (k, &r) in rates.iter().enumerate() {
                    if !(r.is_finite() && r >= 0.0) {
                        return Err(TriageError::profile(
                            format!("{field}.rates[{k}]"),
                            format!("rate must be finite and non-negative, got {r}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_distribution(field: &str, probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(TriageError::profile(field, "empty distribution"));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(TriageError::profile(
                format!("{field}[{i}]"),
                format!("probability must lie in [0, 1], got {p}"),
            ));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(TriageError::profile(
            field,
            format!("probabilities sum to {total}, expected 1"),
        ));
    }
    Ok(())
}

/// Inverse-CDF lookup; falls back to the last positive entry on rounding slack.
fn pick_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Absence model of one expertise class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsenceModel {
    /// Probability that an available developer announces an absence for the next epoch.
    pub absence_prob: f64,
    /// Mean absence length in epochs (geometric, at least one epoch).
    pub mean_absence: f64,
}

/// Last-minute schedule changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleProcess {
    /// One entry per expertise class.
    pub classes: Vec<AbsenceModel>,
    /// Probability that an unavailable developer shows up one or more epochs early.
    pub early_return_prob: f64,
}

impl ScheduleProcess {
    /// No schedule perturbation at all.
    pub fn none(n_classes: usize) -> Self {
        Self {
            classes: vec![
                AbsenceModel {
                    absence_prob: 0.0,
                    mean_absence: 1.0,
                };
                n_classes
            ],
            early_return_prob: 0.0,
        }
    }

    pub fn is_inert(&self) -> bool {
        self.early_return_prob == 0.0 && self.classes.iter().all(|c| c.absence_prob == 0.0)
    }
}

/// Shape of the postponement penalty `f(due)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PostponementCost {
    /// `(T - due) / T`
    Linear,
    /// `base^due`
    Exponential { base: f64 },
}

impl PostponementCost {
    pub fn exponential() -> Self {
        PostponementCost::Exponential { base: 0.9 }
    }
}

/// Static description of a triage world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioProfile {
    pub schema_version: u32,
    pub n_bug_types: usize,
    pub dev_classes: Vec<DevClass>,
    pub dev_counts: Vec<u32>,
    /// Number of decision epochs `T`.
    pub horizon: u32,
    /// Real time per epoch; metadata only.
    pub epoch_length: f64,
    /// Largest due attribute `U`.
    pub deadline_cap: i32,
    /// Smallest representable due attribute.
    pub due_floor: i32,
    pub arrival_process: ArrivalProcess,
    pub schedule_process: ScheduleProcess,
    /// Probability that an assigned developer declines the bug.
    pub rejection_prob: f64,
    /// Discount factor `γ`.
    pub discount: f64,
    pub postponement_cost: PostponementCost,
    /// Weight the post-decision value term of the policy LP by `γ`.
    pub gamma_weights_vfa: bool,
    pub rng_seed: u64,
}

impl ScenarioProfile {
    pub fn n_dev_classes(&self) -> usize {
        self.dev_classes.len()
    }

    /// Fixing time `c_b^d` of a class on a bug type.
    pub fn cost(&self, exp_id: usize, type_id: usize) -> f64 {
        self.dev_classes[exp_id].costs[type_id]
    }

    pub fn max_cost(&self) -> f64 {
        self.dev_classes
            .iter()
            .flat_map(|c| c.costs.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Whole epochs a developer stays busy after accepting a bug.
    pub fn busy_epochs(&self, exp_id: usize, type_id: usize) -> u32 {
        (self.cost(exp_id, type_id).round() as u32).max(1)
    }

    pub fn total_devs(&self) -> u32 {
        self.dev_counts.iter().sum()
    }

    /// Number of due values between the floor and the cap, inclusive.
    pub fn n_due_values(&self) -> usize {
        (self.deadline_cap - self.due_floor + 1) as usize
    }

    /// Weight applied to post-decision values inside the policy LP.
    pub fn vfa_weight(&self) -> f64 {
        if self.gamma_weights_vfa {
            self.discount
        } else {
            1.0
        }
    }

    /// Checks every invariant; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != PROFILE_SCHEMA_VERSION {
            return Err(TriageError::SchemaVersion {
                found: self.schema_version,
                expected: PROFILE_SCHEMA_VERSION,
            });
        }
        if self.n_bug_types == 0 {
            return Err(TriageError::profile("n_bug_types", "must be at least 1"));
        }
        if self.dev_classes.is_empty() {
            return Err(TriageError::profile("dev_classes", "must be non-empty"));
        }
        for (d, class) in self.dev_classes.iter().enumerate() {
            if class.costs.len() != self.n_bug_types {
                return Err(TriageError::profile(
                    format!("dev_classes[{d}].costs"),
                    format!(
                        "expected {} entries, found {}",
                        self.n_bug_types,
                        class.costs.len()
                    ),
                ));
            }
            for (b, &c) in class.costs.iter().enumerate() {
                if !(c.is_finite() && c > 0.0) {
                    return Err(TriageError::profile(
                        format!("dev_classes[{d}].costs[{b}]"),
                        format!("fixing time must be positive and finite, got {c}"),
                    ));
                }
            }
        }
        if self.dev_counts.len() != self.dev_classes.len() {
            return Err(TriageError::profile(
                "dev_counts",
                format!(
                    "expected {} entries, found {}",
                    self.dev_classes.len(),
                    self.dev_counts.len()
                ),
            ));
        }
        if self.horizon < 2 {
            return Err(TriageError::profile("horizon", "must be at least 2"));
        }
        if !(self.epoch_length.is_finite() && self.epoch_length > 0.0) {
            return Err(TriageError::profile("epoch_length", "must be positive"));
        }
        if self.deadline_cap < 1 {
            return Err(TriageError::profile("deadline_cap", "must be at least 1"));
        }
        if self.deadline_cap >= self.horizon as i32 {
            return Err(TriageError::profile(
                "deadline_cap",
                format!("must be below the horizon {}", self.horizon),
            ));
        }
        if self.due_floor > 0 {
            return Err(TriageError::profile("due_floor", "must be non-positive"));
        }
        self.arrival_process.validate(self.n_bug_types)?;
        if self.schedule_process.classes.len() != self.dev_classes.len() {
            return Err(TriageError::profile(
                "schedule_process.classes",
                format!(
                    "expected {} entries, found {}",
                    self.dev_classes.len(),
                    self.schedule_process.classes.len()
                ),
            ));
        }
        for (d, m) in self.schedule_process.classes.iter().enumerate() {
            if !(0.0..=1.0).contains(&m.absence_prob) {
                return Err(TriageError::profile(
                    format!("schedule_process.classes[{d}].absence_prob"),
                    "must lie in [0, 1]",
                ));
            }
            if !(m.mean_absence.is_finite() && m.mean_absence >= 1.0) {
                return Err(TriageError::profile(
                    format!("schedule_process.classes[{d}].mean_absence"),
                    "must be at least 1",
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.schedule_process.early_return_prob) {
            return Err(TriageError::profile(
                "schedule_process.early_return_prob",
                "must lie in [0, 1]",
            ));
        }
        if !(0.0..=1.0).contains(&self.rejection_prob) {
            return Err(TriageError::profile("rejection_prob", "must lie in [0, 1]"));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(TriageError::profile(
                "discount",
                format!(
                    "must lie in the open interval (0, 1), got {}",
                    self.discount
                ),
            ));
        }
        if let PostponementCost::Exponential { base } = self.postponement_cost {
            if !(base > 0.0 && base < 1.0) {
                return Err(TriageError::profile(
                    "postponement_cost.base",
                    format!("must lie in (0, 1), got {base}"),
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let profile: ScenarioProfile = serde_json::from_str(text)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Postponement penalty `f(due)`; equals 1 at the deadline for both shapes.
pub fn postponement_cost(due: i32, profile: &ScenarioProfile) -> f64 {
    match profile.postponement_cost {
        PostponementCost::Linear => {
            let t = profile.horizon as f64;
            (t - due as f64) / t
        }
        PostponementCost::Exponential { base } => base.powi(due),
    }
}

/// Due attribute of a bug entering the system at the start of epoch `t`.
pub fn initial_due(t: u32, profile: &ScenarioProfile) -> i32 {
    let remaining = profile.horizon as i64 - t as i64 - 1;
    remaining.min(profile.deadline_cap as i64).max(0) as i32
}

/// Count maps serialize as `[[key, count], ...]` so structured keys survive JSON.
pub(crate) mod entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S, K, V>(map: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        K: Serialize,
        V: Serialize,
    {
        s.collect_seq(map.iter())
    }

    pub fn deserialize<'de, D, K, V>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        D: Deserializer<'de>,
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
    {
        let pairs: Vec<(K, V)> = Vec::deserialize(d)?;
        Ok(pairs.into_iter().collect())
    }
}

pub(crate) fn add_count<K: Ord>(map: &mut BTreeMap<K, u32>, key: K, n: u32) {
    if n > 0 {
        *map.entry(key).or_insert(0) += n;
    }
}

pub(crate) fn take_count<K: Ord + Copy>(map: &mut BTreeMap<K, u32>, key: K, n: u32) -> bool {
    if n == 0 {
        return true;
    }
    match map.get_mut(&key) {
        Some(c) if *c >= n => {
            *c -= n;
            if *c == 0 {
                map.remove(&key);
            }
            true
        }
        _ => false,
    }
}

/// Open bugs and developers at the start of an epoch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SystemState {
    pub epoch: u32,
    #[serde(with = "entries")]
    pub bugs: BTreeMap<BugAttr, u32>,
    #[serde(with = "entries")]
    pub devs: BTreeMap<DevAttr, u32>,
}

impl SystemState {
    pub fn new(epoch: u32) -> Self {
        Self {
            epoch,
            ..Default::default()
        }
    }

    /// Epoch-1 state of a profile before any arrivals: every developer available.
    pub fn all_available(profile: &ScenarioProfile) -> Self {
        let mut state = Self::new(1);
        for (exp_id, &n) in profile.dev_counts.iter().enumerate() {
            add_count(&mut state.devs, DevAttr::available(exp_id), n);
        }
        state
    }

    pub fn add_bugs(&mut self, attr: BugAttr, n: u32) {
        add_count(&mut self.bugs, attr, n);
    }

    pub fn add_devs(&mut self, attr: DevAttr, n: u32) {
        add_count(&mut self.devs, attr, n);
    }

    pub fn total_bugs(&self) -> u32 {
        self.bugs.values().sum()
    }

    pub fn total_devs(&self) -> u32 {
        self.devs.values().sum()
    }

    pub fn available_devs(&self) -> impl Iterator<Item = (DevAttr, u32)> + '_ {
        self.devs
            .iter()
            .filter(|(d, &n)| d.is_available() && n > 0)
            .map(|(&d, &n)| (d, n))
    }

    pub fn total_available(&self) -> u32 {
        self.available_devs().map(|(_, n)| n).sum()
    }
}

/// Assignment, postponement and idle counts for one epoch.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecisionPlan {
    #[serde(with = "entries")]
    pub assign: BTreeMap<(DevAttr, BugAttr), u32>,
    #[serde(with = "entries")]
    pub postpone: BTreeMap<BugAttr, u32>,
    #[serde(with = "entries")]
    pub idle: BTreeMap<DevAttr, u32>,
}

impl DecisionPlan {
    pub fn total_assigned(&self) -> u32 {
        self.assign.values().sum()
    }

    pub fn total_postponed(&self) -> u32 {
        self.postpone.values().sum()
    }

    pub fn total_idle(&self) -> u32 {
        self.idle.values().sum()
    }

    /// Drops zero entries so structurally equal plans compare equal.
    pub fn normalized(mut self) -> Self {
        self.assign.retain(|_, n| *n > 0);
        self.postpone.retain(|_, n| *n > 0);
        self.idle.retain(|_, n| *n > 0);
        self
    }

    /// Verifies developer and bug flow balance against `state`.
    pub fn check_feasible(&self, state: &SystemState) -> Result<()> {
        let mut dev_use: BTreeMap<DevAttr, u32> = BTreeMap::new();
        let mut bug_use: BTreeMap<BugAttr, u32> = BTreeMap::new();
        for (&(d, b), &n) in &self.assign {
            if n == 0 {
                continue;
            }
            if !d.is_available() {
                return Err(TriageError::Infeasible(format!(
                    "developer {d:?} is not available but receives an assignment"
                )));
            }
            add_count(&mut dev_use, d, n);
            add_count(&mut bug_use, b, n);
        }
        for (&d, &n) in &self.idle {
            if !d.is_available() && n > 0 {
                return Err(TriageError::Infeasible(format!(
                    "idle slack recorded for unavailable developer {d:?}"
                )));
            }
            add_count(&mut dev_use, d, n);
        }
        for (&b, &n) in &self.postpone {
            add_count(&mut bug_use, b, n);
        }
        let available: BTreeMap<DevAttr, u32> = state.available_devs().collect();
        if dev_use != available {
            return Err(TriageError::Infeasible(format!(
                "developer balance violated: plan uses {dev_use:?}, state has {available:?}"
            )));
        }
        let open: BTreeMap<BugAttr, u32> = state
            .bugs
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(&b, &n)| (b, n))
            .collect();
        if bug_use != open {
            return Err(TriageError::Infeasible(format!(
                "bug balance violated: plan covers {bug_use:?}, state has {open:?}"
            )));
        }
        Ok(())
    }
}

/// Cost of a plan: postponement penalties plus fixing times.
pub fn decision_cost(
    state: &SystemState,
    plan: &DecisionPlan,
    profile: &ScenarioProfile,
) -> Result<f64> {
    plan.check_feasible(state)?;
    Ok(plan_cost_unchecked(plan, profile))
}

pub(crate) fn plan_cost_unchecked(plan: &DecisionPlan, profile: &ScenarioProfile) -> f64 {
    let postpone: f64 = plan
        .postpone
        .iter()
        .map(|(b, &n)| postponement_cost(b.due, profile) * n as f64)
        .sum();
    let assign: f64 = plan
        .assign
        .iter()
        .map(|((d, b), &n)| profile.cost(d.exp_id, b.type_id) * n as f64)
        .sum();
    postpone + assign
}

/// A developer moving between schedule slots by short notice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleChange {
    pub exp_id: usize,
    pub from_sch: u32,
    pub to_sch: u32,
}

/// `count` assignments of class `exp_id` to bugs with attribute `bug` that were declined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub exp_id: usize,
    pub bug: BugAttr,
    pub count: u32,
}

/// Exogenous information revealed between two decision epochs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExogenousDraw {
    #[serde(with = "entries")]
    pub new_bugs: BTreeMap<usize, u32>,
    pub sch_changes: Vec<ScheduleChange>,
    pub rejections: Vec<Rejection>,
}
