//! Decision rules: ADP (value-priced assignment), myopic (Big-M
//! postponement) and a random feasible baseline.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::{postponement_cost, DecisionPlan, DevAttr, ScenarioProfile, SystemState};
use crate::error::Result;
use crate::solver::{solve, ArcCosts, SolverResult};
use crate::value_store::{big_m, ValueStore};

/// Arc costs of the ADP problem at the state's epoch.
///
/// Postponing bug `b` costs `f(b.due) + w·v̄_{t,b'}` with `b'` the aged
/// attribute; idling a developer costs `w·v̄_{t,d}`.
pub fn adp_costs(state: &SystemState, store: &ValueStore, profile: &ScenarioProfile) -> ArcCosts {
    let t = state.epoch.min(store.horizon);
    let w = profile.vfa_weight();
    let mut costs = ArcCosts::default();
    let devs: Vec<DevAttr> = state.available_devs().map(|(d, _)| d).collect();
    for (&b, &n) in &state.bugs {
        if n == 0 {
            continue;
        }
        let succ = b.aged(profile.due_floor);
        costs.postpone.insert(
            b,
            postponement_cost(b.due, profile) + w * store.bug_value(t, succ),
        );
        for &d in &devs {
            costs
                .assign
                .insert((d, b), profile.cost(d.exp_id, b.type_id));
        }
    }
    for &d in &devs {
        costs.idle.insert(d, w * store.dev_value(t, d.exp_id));
    }
    costs
}

pub fn adp_decide(
    state: &SystemState,
    store: &ValueStore,
    profile: &ScenarioProfile,
) -> Result<(DecisionPlan, SolverResult)> {
    let result = solve(state, &adp_costs(state, store, profile))?;
    Ok((result.plan.clone(), result))
}

/// Arc costs of the myopic problem: postponement costs Big-M, idling is free.
pub fn myopic_costs(state: &SystemState, profile: &ScenarioProfile) -> ArcCosts {
    let m = big_m(profile);
    let mut costs = ArcCosts::default();
    let devs: Vec<DevAttr> = state.available_devs().map(|(d, _)| d).collect();
    for (&b, &n) in &state.bugs {
        if n == 0 {
            continue;
        }
        costs.postpone.insert(b, m);
        for &d in &devs {
            costs
                .assign
                .insert((d, b), profile.cost(d.exp_id, b.type_id));
        }
    }
    for &d in &devs {
        costs.idle.insert(d, 0.0);
    }
    costs
}

pub fn myopic_decide(state: &SystemState, profile: &ScenarioProfile) -> Result<DecisionPlan> {
    Ok(solve(state, &myopic_costs(state, profile))?.plan)
}

/// Random feasible plan: bugs are visited in random order and each takes a
/// random free developer or waits, each option equally likely.
pub fn random_decide<R: Rng + ?Sized>(state: &SystemState, rng: &mut R) -> DecisionPlan {
    let mut bug_units: Vec<_> = state
        .bugs
        .iter()
        .flat_map(|(&b, &n)| std::iter::repeat_n(b, n as usize))
        .collect();
    let mut dev_units: Vec<DevAttr> = state
        .available_devs()
        .flat_map(|(d, n)| std::iter::repeat_n(d, n as usize))
        .collect();
    bug_units.shuffle(rng);
    let mut plan = DecisionPlan::default();
    for b in bug_units {
        let pick = rng.random_range(0..=dev_units.len());
        if pick == dev_units.len() {
            *plan.postpone.entry(b).or_insert(0) += 1;
        } else {
            let d = dev_units.swap_remove(pick);
            *plan.assign.entry((d, b)).or_insert(0) += 1;
        }
    }
    for d in dev_units {
        *plan.idle.entry(d).or_insert(0) += 1;
    }
    plan
}

/// A decision rule selectable by name.
#[derive(Debug, Clone)]
pub enum Policy {
    Adp(ValueStore),
    Myopic,
    Random,
}

impl Policy {
    pub fn label(&self) -> String {
        match self {
            Policy::Adp(store) => format!("adp-{}", store.rule.name()),
            Policy::Myopic => "myopic".into(),
            Policy::Random => "random".into(),
        }
    }

    pub fn decide<R: Rng + ?Sized>(
        &self,
        state: &SystemState,
        profile: &ScenarioProfile,
        rng: &mut R,
    ) -> Result<DecisionPlan> {
        match self {
            Policy::Adp(store) => Ok(adp_decide(state, store, profile)?.0),
            Policy::Myopic => myopic_decide(state, profile),
            Policy::Random => Ok(random_decide(state, rng)),
        }
    }
}
