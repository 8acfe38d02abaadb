//! Forward-pass ADP training with periodic frozen-policy evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{BugAttr, ScenarioProfile};
use crate::environment::{derive_seed, stream_rng, EpisodeLog, Simulator, STREAM_POLICY};
use crate::error::{Result, TriageError};
use crate::metrics::{discounted_cost, mean_stderr};
use crate::policies::{adp_decide, Policy};
use crate::stepsize::StepRule;
use crate::value_store::{InitMode, ValueStore};

/// A value cell whose estimate is recorded after every iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub epoch: u32,
    pub bug: BugAttr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    /// Training iterations `N`.
    pub iterations: u64,
    /// Evaluate the frozen policy every `M` iterations.
    pub eval_every: u64,
    /// Epochs per evaluation episode `O`.
    pub eval_epochs: u32,
    pub eval_replications: usize,
    pub stepsize: StepRule,
    /// Rejection probability during training.
    pub epsilon: f64,
    /// Discount factor; replaces the profile's value.
    pub gamma: f64,
    pub init: InitMode,
    pub seed: u64,
    pub eval_seed: u64,
    pub probes: Vec<Probe>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            eval_every: 100,
            eval_epochs: 30,
            eval_replications: 30,
            stepsize: StepRule::bakf(),
            epsilon: 0.75,
            gamma: 0.99,
            init: InitMode::PostponementPenalty,
            seed: 0,
            eval_seed: 1,
            probes: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TriageError::InvalidConfig(m.to_string()));
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if self.eval_every == 0 || self.eval_every > self.iterations {
            return bad("eval_every must lie in 1..=iterations");
        }
        if self.eval_epochs == 0 {
            return bad("eval_epochs must be at least 1");
        }
        if self.eval_replications == 0 {
            return bad("eval_replications must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon must lie in [0, 1]");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in the open interval (0, 1)");
        }
        Ok(())
    }
}

/// Frozen-policy evaluation after `iteration` training iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub iteration: u64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrace {
    pub probe: Probe,
    /// Initial value followed by the value after each iteration.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub label: String,
    pub config: TrainConfig,
    /// Realized discounted cost of each training iteration.
    pub realized: Vec<f64>,
    pub eval: Vec<EvalPoint>,
    pub traces: Vec<ProbeTrace>,
}

/// Final report together with the trained store.
pub struct TrainOutcome {
    pub report: TrainReport,
    pub store: ValueStore,
}

/// Incremental trainer; [`train`] drives it to completion.
pub struct Trainer {
    profile: ScenarioProfile,
    config: TrainConfig,
    store: ValueStore,
    iteration: u64,
}

impl Trainer {
    pub fn new(profile: &ScenarioProfile, config: &TrainConfig) -> Result<Self> {
        profile.validate()?;
        config.validate()?;
        let mut profile = profile.clone();
        profile.discount = config.gamma;
        let store = ValueStore::init(&profile, config.init, config.stepsize);
        Ok(Self {
            profile,
            config: config.clone(),
            store,
            iteration: 0,
        })
    }

    /// Profile with the configured discount factor.
    pub fn profile(&self) -> &ScenarioProfile {
        &self.profile
    }

    pub fn store(&self) -> &ValueStore {
        &self.store
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Seed of the sample path used by training iteration `n` (1-based).
    pub fn iteration_seed(&self, n: u64) -> u64 {
        derive_seed(self.config.seed, n)
    }

    /// Plays one full-horizon episode, updating values along the way.
    pub fn run_iteration(&mut self) -> Result<EpisodeLog> {
        self.iteration += 1;
        let n = self.iteration;
        let seed = self.iteration_seed(n);
        let mut sim = Simulator::new(
            &self.profile,
            self.profile.horizon,
            self.config.epsilon,
            seed,
        );
        while !sim.is_done() {
            let t = sim.state().epoch;
            let wrap = |source| TriageError::Training {
                iteration: n,
                epoch: t,
                source: Box::new(source),
            };
            let (plan, result) =
                adp_decide(sim.state(), &self.store, &self.profile).map_err(wrap)?;
            self.store.observe(t, &result).map_err(wrap)?;
            sim.step(plan).map_err(wrap)?;
        }
        Ok(sim.into_log())
    }

    /// Frozen-policy evaluation of the current store.
    pub fn evaluate_current(&self) -> Result<EvalPoint> {
        let costs = evaluate_costs(
            &self.profile,
            &Policy::Adp(self.store.clone()),
            self.config.eval_epochs,
            self.config.eval_replications,
            self.config.eval_seed,
        )?;
        let (mean, stderr) = mean_stderr(&costs);
        Ok(EvalPoint {
            iteration: self.iteration,
            mean,
            stderr,
        })
    }

    pub fn into_store(self) -> ValueStore {
        self.store
    }
}

/// Runs the full training schedule.
pub fn train(profile: &ScenarioProfile, config: &TrainConfig) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(profile, config)?;
    let gamma = config.gamma;
    let mut realized = Vec::with_capacity(config.iterations as usize);
    let mut eval = vec![trainer.evaluate_current()?];
    let mut traces: Vec<ProbeTrace> = config
        .probes
        .iter()
        .map(|&probe| ProbeTrace {
            probe,
            values: vec![trainer.store.bug_value(probe.epoch, probe.bug)],
        })
        .collect();
    for n in 1..=config.iterations {
        let log = trainer.run_iteration()?;
        realized.push(discounted_cost(&log, gamma));
        for trace in &mut traces {
            trace
                .values
                .push(trainer.store.bug_value(trace.probe.epoch, trace.probe.bug));
        }
        if n % config.eval_every == 0 {
            eval.push(trainer.evaluate_current()?);
        }
    }
    let report = TrainReport {
        label: format!("adp-{}", config.stepsize.name()),
        config: config.clone(),
        realized,
        eval,
        traces,
    };
    Ok(TrainOutcome {
        report,
        store: trainer.into_store(),
    })
}

/// One episode of `policy` without learning, using the profile's rejection probability.
pub fn run_episode(
    profile: &ScenarioProfile,
    policy: &Policy,
    epochs: u32,
    seed: u64,
) -> Result<EpisodeLog> {
    let mut sim = Simulator::new(profile, epochs, profile.rejection_prob, seed);
    let mut rng = stream_rng(seed, STREAM_POLICY);
    while !sim.is_done() {
        let plan = policy.decide(sim.state(), profile, &mut rng)?;
        sim.step(plan)?;
    }
    Ok(sim.into_log())
}

/// Seed of evaluation replication `r`.
pub fn replication_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, r as u64)
}

/// Runs `replications` independent episodes in parallel; replication `r`
/// uses the same exogenous path for every policy.
pub fn evaluate(
    profile: &ScenarioProfile,
    policy: &Policy,
    epochs: u32,
    replications: usize,
    seed: u64,
) -> Result<Vec<EpisodeLog>> {
    if let Policy::Adp(store) = policy {
        store.check_compatible(profile)?;
    }
    (0..replications)
        .into_par_iter()
        .map(|r| run_episode(profile, policy, epochs, replication_seed(seed, r)))
        .collect()
}

/// Discounted episode costs of [`evaluate`].
pub fn evaluate_costs(
    profile: &ScenarioProfile,
    policy: &Policy,
    epochs: u32,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(evaluate(profile, policy, epochs, replications, seed)?
        .iter()
        .map(|l| discounted_cost(l, profile.discount))
        .collect())
}
