//! Time-indexed post-decision value estimates for bug and developer
//! attributes, with per-cell step-size state.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{postponement_cost, BugAttr, ScenarioProfile};
use crate::environment::PostDecisionState;
use crate::error::{Result, TriageError};
use crate::solver::SolverResult;
use crate::stepsize::{StepRule, StepState};

pub const STORE_SCHEMA_VERSION: u32 = 1;

/// How the estimates start out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Bug cells start at the largest fixing time, developer cells at zero.
    PostponementPenalty,
    Zeros,
    /// Bug cells are set so that every postponement arc costs the Big-M
    /// penalty, which makes the first policy identical to the myopic one.
    BigM,
}

impl InitMode {
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "postponement-penalty" | "postponement_penalty" => Some(Self::PostponementPenalty),
            "zeros" => Some(Self::Zeros),
            "big-m" | "big_m" => Some(Self::BigM),
            _ => None,
        }
    }
}

/// Penalty that makes postponement prohibitive: `10³ × max c`.
pub fn big_m(profile: &ScenarioProfile) -> f64 {
    1e3 * profile.max_cost()
}

/// Value estimates for epochs `0..=T`.
///
/// Slot `T` holds the value of leaving the horizon. Unless the store was
/// initialized with [`InitMode::BigM`], it carries the exact terminal penalty
/// and is never updated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueStore {
    pub schema_version: u32,
    pub horizon: u32,
    pub n_bug_types: usize,
    pub n_dev_classes: usize,
    pub due_floor: i32,
    pub deadline_cap: i32,
    pub init: InitMode,
    pub rule: StepRule,
    bug_values: Vec<f64>,
    dev_values: Vec<f64>,
    bug_steps: Vec<StepState>,
    dev_steps: Vec<StepState>,
}

impl ValueStore {
    pub fn init(profile: &ScenarioProfile, mode: InitMode, rule: StepRule) -> Self {
        let slots = profile.horizon as usize + 1;
        let n_due = profile.n_due_values();
        let n_bug = slots * profile.n_bug_types * n_due;
        let n_dev = slots * profile.n_dev_classes();
        let mut store = Self {
            schema_version: STORE_SCHEMA_VERSION,
            horizon: profile.horizon,
            n_bug_types: profile.n_bug_types,
            n_dev_classes: profile.n_dev_classes(),
            due_floor: profile.due_floor,
            deadline_cap: profile.deadline_cap,
            init: mode,
            rule,
            bug_values: vec![0.0; n_bug],
            dev_values: vec![0.0; n_dev],
            bug_steps: vec![rule.new_state(); n_bug],
            dev_steps: vec![rule.new_state(); n_dev],
        };
        match mode {
            InitMode::Zeros => {}
            InitMode::PostponementPenalty => store.bug_values.fill(profile.max_cost()),
            InitMode::BigM => {
                let m = big_m(profile);
                let w = profile.vfa_weight();
                for t in 0..=profile.horizon {
                    for k in 0..profile.n_bug_types {
                        for due in profile.due_floor..=profile.deadline_cap {
                            let v = (m - postponement_cost(due + 1, profile)) / w;
                            let i = store.bug_index(t, BugAttr::new(k, due));
                            store.bug_values[i] = v;
                        }
                    }
                }
            }
        }
        if mode != InitMode::BigM {
            let t = profile.horizon;
            for k in 0..profile.n_bug_types {
                for due in profile.due_floor..=profile.deadline_cap {
                    let i = store.bug_index(t, BugAttr::new(k, due));
                    store.bug_values[i] = postponement_cost(due, profile);
                }
            }
            for e in 0..profile.n_dev_classes() {
                let i = store.dev_index(t, e);
                store.dev_values[i] = 0.0;
            }
        }
        store
    }

    fn n_due(&self) -> usize {
        (self.deadline_cap - self.due_floor + 1) as usize
    }

    fn bug_index(&self, t: u32, b: BugAttr) -> usize {
        let due = b.due.clamp(self.due_floor, self.deadline_cap);
        ((t as usize * self.n_bug_types) + b.type_id) * self.n_due()
            + (due - self.due_floor) as usize
    }

    fn dev_index(&self, t: u32, exp_id: usize) -> usize {
        t as usize * self.n_dev_classes + exp_id
    }

    /// `v̄_{t,b}`
    pub fn bug_value(&self, t: u32, b: BugAttr) -> f64 {
        self.bug_values[self.bug_index(t, b)]
    }

    /// `v̄_{t,d}` for an available developer of class `exp_id`.
    pub fn dev_value(&self, t: u32, exp_id: usize) -> f64 {
        self.dev_values[self.dev_index(t, exp_id)]
    }

    pub fn set_bug_value(&mut self, t: u32, b: BugAttr, v: f64) {
        let i = self.bug_index(t, b);
        self.bug_values[i] = v;
    }

    pub fn set_dev_value(&mut self, t: u32, exp_id: usize, v: f64) {
        let i = self.dev_index(t, exp_id);
        self.dev_values[i] = v;
    }

    /// Observations absorbed by a bug cell so far.
    pub fn bug_visits(&self, t: u32, b: BugAttr) -> u64 {
        self.bug_steps[self.bug_index(t, b)].n()
    }

    fn check_epoch(&self, t: u32) -> Result<()> {
        if t == 0 || t > self.horizon {
            return Err(TriageError::InvalidConfig(format!(
                "epoch {t} outside 1..={}",
                self.horizon
            )));
        }
        Ok(())
    }

    fn check_result(&self, duals: &SolverResult) -> Result<()> {
        for b in duals.bug_duals.keys() {
            if b.type_id >= self.n_bug_types {
                return Err(TriageError::InvalidConfig(format!(
                    "bug type {} out of range",
                    b.type_id
                )));
            }
        }
        for d in duals.dev_duals.keys() {
            if d.exp_id >= self.n_dev_classes {
                return Err(TriageError::InvalidConfig(format!(
                    "developer class {} out of range",
                    d.exp_id
                )));
            }
        }
        Ok(())
    }

    /// Smooths the epoch `t - 1` cells toward the duals observed at epoch `t`
    /// with a fixed step `alpha`.
    pub fn smooth_update(&mut self, t: u32, duals: &SolverResult, alpha: f64) -> Result<()> {
        self.check_epoch(t)?;
        self.check_result(duals)?;
        for (&b, &obs) in &duals.bug_duals {
            let i = self.bug_index(t - 1, b);
            self.bug_values[i] = (1.0 - alpha) * self.bug_values[i] + alpha * obs;
        }
        for (&d, &obs) in &duals.dev_duals {
            let i = self.dev_index(t - 1, d.exp_id);
            self.dev_values[i] = (1.0 - alpha) * self.dev_values[i] + alpha * obs;
        }
        Ok(())
    }

    /// Like [`smooth_update`](Self::smooth_update) with each cell's step taken
    /// from the store's rule and that cell's own step state.
    pub fn observe(&mut self, t: u32, duals: &SolverResult) -> Result<()> {
        self.check_epoch(t)?;
        self.check_result(duals)?;
        let rule = self.rule;
        for (&b, &obs) in &duals.bug_duals {
            let i = self.bug_index(t - 1, b);
            let prev = self.bug_values[i];
            let alpha = self.bug_steps[i].next_alpha(&rule, obs, prev);
            self.bug_values[i] = prev + alpha * (obs - prev);
        }
        for (&d, &obs) in &duals.dev_duals {
            let i = self.dev_index(t - 1, d.exp_id);
            let prev = self.dev_values[i];
            let alpha = self.dev_steps[i].next_alpha(&rule, obs, prev);
            self.dev_values[i] = prev + alpha * (obs - prev);
        }
        Ok(())
    }

    /// `Σ v̄_{t,b}·bugs[b] + Σ v̄_{t,d}·devs[d]` over available post-decision
    /// developers, multiplied by `weight`.
    pub fn vfa_value(&self, t: u32, post: &PostDecisionState, weight: f64) -> f64 {
        let bugs: f64 = post
            .bugs
            .iter()
            .map(|(&b, &n)| self.bug_value(t, b) * n as f64)
            .sum();
        let devs: f64 = post
            .devs
            .iter()
            .filter(|(d, _)| d.is_available())
            .map(|(d, &n)| self.dev_value(t, d.exp_id) * n as f64)
            .sum();
        weight * (bugs + devs)
    }

    /// Whether the store's dimensions fit `profile`.
    pub fn check_compatible(&self, profile: &ScenarioProfile) -> Result<()> {
        let same = self.horizon == profile.horizon
            && self.n_bug_types == profile.n_bug_types
            && self.n_dev_classes == profile.n_dev_classes()
            && self.due_floor == profile.due_floor
            && self.deadline_cap == profile.deadline_cap;
        if same {
            Ok(())
        } else {
            Err(TriageError::InvalidConfig(
                "value store dimensions do not match the profile".into(),
            ))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let store: ValueStore = serde_json::from_str(text)?;
        if store.schema_version != STORE_SCHEMA_VERSION {
            return Err(TriageError::SchemaVersion {
                found: store.schema_version,
                expected: STORE_SCHEMA_VERSION,
            });
        }
        let slots = store.horizon as usize + 1;
        let n_bug = slots * store.n_bug_types * store.n_due();
        let n_dev = slots * store.n_dev_classes;
        if store.bug_values.len() != n_bug
            || store.dev_values.len() != n_dev
            || store.bug_steps.len() != n_bug
            || store.dev_steps.len() != n_dev
        {
            return Err(TriageError::InvalidConfig(
                "value store arrays do not match its dimensions".into(),
            ));
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
