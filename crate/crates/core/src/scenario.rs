//! Seeded synthetic profiles and profile file I/O.
//!
//! Generated cost matrices give every expertise class one specialty type it
//! fixes several times faster than the others, so assigning the nearest free
//! developer is visibly worse than waiting for a specialist.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{
    AbsenceModel, ArrivalProcess, DevClass, PostponementCost, ScenarioProfile, ScheduleProcess,
    PROFILE_SCHEMA_VERSION,
};
use crate::environment::{stream_rng, STREAM_GENERATOR};
use crate::error::{Result, TriageError};

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub n_dev_classes: usize,
    pub n_bug_types: usize,
    pub devs_per_class: u32,
    /// Median fixing time of a non-specialty type, in epochs.
    pub mean_cost: f64,
    /// Log-normal shape of the cost spread.
    pub cost_sigma: f64,
    /// Cost multiplier on a class's specialty type, in (0, 1).
    pub expert_multiplier: f64,
    pub min_cost: f64,
    pub horizon: u32,
    pub deadline_cap: i32,
    pub due_floor: i32,
    /// Expected arrivals as a fraction of the specialists-only throughput.
    pub load: f64,
    /// Largest per-type arrival count kept in the histograms.
    pub max_arrivals_per_type: u32,
    pub absence_prob: f64,
    pub mean_absence: f64,
    pub early_return_prob: f64,
    pub rejection_prob: f64,
    pub discount: f64,
    pub postponement_cost: PostponementCost,
}

pub const PRESETS: [&str; 3] = ["eclipse-like", "gcc-like", "mozilla-like"];

impl GeneratorSpec {
    fn with_dims(n_dev_classes: usize, n_bug_types: usize) -> Self {
        let horizon: u32 = 30;
        let deadline_cap = 5;
        Self {
            n_dev_classes,
            n_bug_types,
            devs_per_class: 1,
            mean_cost: 8.0,
            cost_sigma: 0.25,
            expert_multiplier: 0.25,
            min_cost: 1.0,
            horizon,
            deadline_cap,
            due_floor: deadline_cap - horizon as i32,
            load: 0.7,
            max_arrivals_per_type: 6,
            absence_prob: 0.02,
            mean_absence: 2.0,
            early_return_prob: 0.0,
            rejection_prob: 0.0,
            discount: 0.99,
            postponement_cost: PostponementCost::Linear,
        }
    }

    /// Named presets sized after three open-source projects.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "eclipse-like" => Ok(Self::with_dims(16, 6)),
            "gcc-like" => Ok(Self::with_dims(47, 5)),
            "mozilla-like" => Ok(Self::with_dims(128, 5)),
            "custom" => Ok(Self::with_dims(4, 3)),
            other => Err(TriageError::InvalidConfig(format!(
                "unknown preset `{other}` (expected {} or custom)",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TriageError::InvalidConfig(m.to_string()));
        if self.n_dev_classes == 0 || self.n_bug_types == 0 {
            return bad("generator needs at least one developer class and one bug type");
        }
        if self.devs_per_class == 0 {
            return bad("devs_per_class must be at least 1");
        }
        if !(self.mean_cost > 0.0 && self.min_cost > 0.0 && self.cost_sigma >= 0.0) {
            return bad("cost parameters must be positive");
        }
        if !(self.expert_multiplier > 0.0 && self.expert_multiplier < 1.0) {
            return bad("expert_multiplier must lie in (0, 1)");
        }
        if !(self.load > 0.0) {
            return bad("load must be positive");
        }
        Ok(())
    }
}

/// Samples a profile; identical inputs give identical profiles.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<ScenarioProfile> {
    spec.validate()?;
    let mut rng = stream_rng(seed, STREAM_GENERATOR);
    let spread = LogNormal::new(0.0, spec.cost_sigma)
        .map_err(|e| TriageError::InvalidConfig(format!("cost spread: {e}")))?;
    let round = |c: f64| (c.max(spec.min_cost) * 100.0).round() / 100.0;

    let mut dev_classes = Vec::with_capacity(spec.n_dev_classes);
    for e in 0..spec.n_dev_classes {
        let expert = e % spec.n_bug_types;
        let costs = (0..spec.n_bug_types)
            .map(|k| {
                let base = spec.mean_cost * spread.sample(&mut rng);
                if k == expert {
                    round(base * spec.expert_multiplier)
                } else {
                    round(base)
                }
            })
            .collect();
        dev_classes.push(DevClass { costs });
    }

    // Throughput when every class only works on its specialty.
    let mut per_type = vec![0.0; spec.n_bug_types];
    for (e, class) in dev_classes.iter().enumerate() {
        let k = e % spec.n_bug_types;
        let busy = class.costs[k].round().max(1.0);
        per_type[k] += spec.devs_per_class as f64 / (busy + 1.0);
    }
    let capacity: f64 = per_type.iter().sum();
    let shares: Vec<f64> = (0..spec.n_bug_types)
        .map(|_| 0.5 + rng.random::<f64>())
        .collect();
    let share_total: f64 = shares.iter().sum();
    let histograms = shares
        .iter()
        .map(|s| {
            let rate = spec.load * capacity * s / share_total;
            truncated_poisson(rate, spec.max_arrivals_per_type)
        })
        .collect::<Result<Vec<_>>>()?;

    let profile = ScenarioProfile {
        schema_version: PROFILE_SCHEMA_VERSION,
        n_bug_types: spec.n_bug_types,
        dev_classes,
        dev_counts: vec![spec.devs_per_class; spec.n_dev_classes],
        horizon: spec.horizon,
        epoch_length: 1.0,
        deadline_cap: spec.deadline_cap,
        due_floor: spec.due_floor,
        arrival_process: ArrivalProcess::Histogram {
            per_type: histograms,
        },
        schedule_process: ScheduleProcess {
            classes: vec![
                AbsenceModel {
                    absence_prob: spec.absence_prob,
                    mean_absence: spec.mean_absence,
                };
                spec.n_dev_classes
            ],
            early_return_prob: spec.early_return_prob,
        },
        rejection_prob: spec.rejection_prob,
        discount: spec.discount,
        postponement_cost: spec.postponement_cost,
        gamma_weights_vfa: true,
        rng_seed: seed,
    };
    profile.validate()?;
    Ok(profile)
}

/// Poisson probabilities on `0..=max`, with the tail folded into `max` and
/// rounded to a grid that sums to exactly one.
fn truncated_poisson(rate: f64, max: u32) -> Result<Vec<f64>> {
    if !rate.is_finite() {
        return Err(TriageError::InvalidConfig(format!("arrival rate {rate}")));
    }
    if rate <= 0.0 {
        return Ok(vec![1.0]);
    }
    let mut probs = Vec::with_capacity(max as usize + 1);
    let mut p = (-rate).exp();
    let mut acc = 0.0;
    for n in 0..max {
        probs.push(p);
        acc += p;
        p *= rate / (n + 1) as f64;
    }
    probs.push((1.0 - acc).max(0.0));
    const GRID: f64 = 1e6;
    let mut rounded: Vec<f64> = probs.iter().map(|q| (q * GRID).round()).collect();
    let diff = GRID - rounded.iter().sum::<f64>();
    let largest = rounded
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    rounded[largest] += diff;
    Ok(rounded.into_iter().map(|q| q / GRID).collect())
}

/// Reads and validates a profile document.
pub fn load(path: &Path) -> Result<ScenarioProfile> {
    let text = std::fs::read_to_string(path)?;
    ScenarioProfile::from_json(&text)
}

pub fn save(profile: &ScenarioProfile, path: &Path) -> Result<()> {
    let mut text = profile.to_json()?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
