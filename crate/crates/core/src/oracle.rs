//! Exact finite-horizon dynamic programming on tiny instances.
//!
//! Values are computed by memoized backward recursion over every reachable
//! state, with the full expectation over arrivals and rejections and an
//! exhaustive search over feasible plans. Bugs still open after the last
//! epoch pay their postponement penalty once.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::{
    initial_due, plan_cost_unchecked, BugAttr, DecisionPlan, ExogenousDraw, Rejection,
    ScenarioProfile, SystemState,
};
use crate::environment::{state_next, state_post, terminal_cost, PostDecisionState};
use crate::error::{Result, TriageError};
use crate::solver::enumerate_plans;

pub const MAX_CLASSES: usize = 2;
pub const MAX_TYPES: usize = 2;
pub const MAX_HORIZON: u32 = 8;
pub const MAX_DEADLINE_CAP: i32 = 3;
pub const MAX_ARRIVALS: u32 = 1;
pub const MAX_DEVELOPERS: u32 = 3;

/// Rejects profiles whose state space is too large to enumerate.
pub fn check_caps(profile: &ScenarioProfile) -> Result<()> {
    profile.validate()?;
    let fail = |m: String| Err(TriageError::TooLarge(m));
    if profile.n_dev_classes() > MAX_CLASSES {
        return fail(format!(
            "{} developer classes (cap {MAX_CLASSES})",
            profile.n_dev_classes()
        ));
    }
    if profile.n_bug_types > MAX_TYPES {
        return fail(format!(
            "{} bug types (cap {MAX_TYPES})",
            profile.n_bug_types
        ));
    }
    if profile.horizon > MAX_HORIZON {
        return fail(format!("horizon {} (cap {MAX_HORIZON})", profile.horizon));
    }
    if profile.deadline_cap > MAX_DEADLINE_CAP {
        return fail(format!(
            "deadline cap {} (cap {MAX_DEADLINE_CAP})",
            profile.deadline_cap
        ));
    }
    match profile.arrival_process.max_total() {
        Some(n) if n <= MAX_ARRIVALS => {}
        Some(n) => return fail(format!("up to {n} arrivals per epoch (cap {MAX_ARRIVALS})")),
        None => return fail("unbounded arrival process".into()),
    }
    if profile.total_devs() > MAX_DEVELOPERS {
        return fail(format!(
            "{} developers (cap {MAX_DEVELOPERS})",
            profile.total_devs()
        ));
    }
    if !profile.schedule_process.is_inert() {
        return fail("schedule changes are not enumerated".into());
    }
    Ok(())
}

/// Every exogenous outcome after `plan` with its probability.
pub fn exogenous_outcomes(
    plan: &DecisionPlan,
    profile: &ScenarioProfile,
    has_next: bool,
) -> Vec<(ExogenousDraw, f64)> {
    let eps = profile.rejection_prob;
    let mut rejection_sets: Vec<(Vec<Rejection>, f64)> = vec![(Vec::new(), 1.0)];
    for (&(d, b), &n) in &plan.assign {
        let mut next = Vec::new();
        for (set, p) in &rejection_sets {
            for k in 0..=n {
                let q = binomial_pmf(n, k, eps);
                if q == 0.0 {
                    continue;
                }
                let mut s = set.clone();
                if k > 0 {
                    s.push(Rejection {
                        exp_id: d.exp_id,
                        bug: b,
                        count: k,
                    });
                }
                next.push((s, p * q));
            }
        }
        rejection_sets = next;
    }
    let arrivals: Vec<(Vec<u32>, f64)> = if has_next {
        profile
            .arrival_process
            .outcomes()
            .expect("caps guarantee a finite arrival support")
    } else {
        vec![(vec![0; profile.n_bug_types], 1.0)]
    };
    let mut out = Vec::new();
    for (rejections, p) in &rejection_sets {
        for (counts, q) in &arrivals {
            let mut draw = ExogenousDraw {
                rejections: rejections.clone(),
                ..Default::default()
            };
            for (k, &n) in counts.iter().enumerate() {
                if n > 0 {
                    draw.new_bugs.insert(k, n);
                }
            }
            out.push((draw, p * q));
        }
    }
    out
}

fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Distribution of the epoch-1 state: all developers available plus the first arrivals.
pub fn initial_states(profile: &ScenarioProfile) -> Result<Vec<(SystemState, f64)>> {
    let outcomes = profile
        .arrival_process
        .outcomes()
        .ok_or_else(|| TriageError::TooLarge("unbounded arrival process".into()))?;
    let due = initial_due(1, profile);
    Ok(outcomes
        .into_iter()
        .map(|(counts, p)| {
            let mut s = SystemState::all_available(profile);
            for (k, n) in counts.into_iter().enumerate() {
                s.add_bugs(BugAttr::new(k, due), n);
            }
            (s, p)
        })
        .collect())
}

/// Optimal values and decisions of every state reached from epoch 1.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    /// Expected optimal discounted cost from epoch 1.
    pub initial_value: f64,
    pub values: HashMap<SystemState, f64>,
    pub policy: HashMap<SystemState, DecisionPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub state: SystemState,
    pub value: f64,
    pub plan: DecisionPlan,
}

impl ExactSolution {
    pub fn value(&self, state: &SystemState) -> Option<f64> {
        self.values.get(state).copied()
    }

    pub fn decision(&self, state: &SystemState) -> Option<&DecisionPlan> {
        self.policy.get(state)
    }

    /// Entries ordered by epoch and then by their JSON text, for stable output.
    pub fn entries(&self) -> Result<Vec<OracleEntry>> {
        let mut keyed = Vec::with_capacity(self.values.len());
        for (state, &value) in &self.values {
            let key = serde_json::to_string(state)?;
            keyed.push((
                state.epoch,
                key,
                OracleEntry {
                    state: state.clone(),
                    value,
                    plan: self.policy[state].clone(),
                },
            ));
        }
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        Ok(keyed.into_iter().map(|(_, _, e)| e).collect())
    }
}

struct Recursion<'a, F> {
    profile: &'a ScenarioProfile,
    memo: HashMap<SystemState, (f64, DecisionPlan)>,
    choose: F,
}

/// Candidate plans for a state; the exact solver searches all of them, policy
/// evaluation supplies a single plan.
type PlanSource<'f> = dyn FnMut(&SystemState) -> Result<Vec<DecisionPlan>> + 'f;

impl<F> Recursion<'_, F>
where
    F: FnMut(&SystemState) -> Result<Vec<DecisionPlan>>,
{
    fn value(&mut self, state: &SystemState) -> Result<f64> {
        if let Some((v, _)) = self.memo.get(state) {
            return Ok(*v);
        }
        let t = state.epoch;
        let horizon = self.profile.horizon;
        let has_next = t < horizon;
        let plans = (self.choose)(state)?;
        let mut best: Option<(f64, DecisionPlan)> = None;
        for plan in plans {
            let post: PostDecisionState = state_post(state, &plan, self.profile)?;
            let mut expected = 0.0;
            for (draw, p) in exogenous_outcomes(&plan, self.profile, has_next) {
                let next = state_next(&post, &draw, t, self.profile)?;
                let v = if has_next {
                    self.value(&next)?
                } else {
                    terminal_cost(&next, self.profile)
                };
                expected += p * v;
            }
            let total = plan_cost_unchecked(&plan, self.profile) + self.profile.discount * expected;
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, plan));
            }
        }
        let (v, plan) = best.expect("at least one feasible plan exists");
        self.memo.insert(state.clone(), (v, plan));
        Ok(v)
    }
}

fn run(profile: &ScenarioProfile, choose: &mut PlanSource<'_>) -> Result<ExactSolution> {
    check_caps(profile)?;
    let mut rec = Recursion {
        profile,
        memo: HashMap::new(),
        choose,
    };
    let mut initial_value = 0.0;
    for (state, p) in initial_states(profile)? {
        initial_value += p * rec.value(&state)?;
    }
    let mut values = HashMap::with_capacity(rec.memo.len());
    let mut policy = HashMap::with_capacity(rec.memo.len());
    for (s, (v, plan)) in rec.memo {
        values.insert(s.clone(), v);
        policy.insert(s, plan);
    }
    Ok(ExactSolution {
        initial_value,
        values,
        policy,
    })
}

/// Optimal values by exhaustive backward induction.
pub fn solve_exact(profile: &ScenarioProfile) -> Result<ExactSolution> {
    run(profile, &mut |s: &SystemState| enumerate_plans(s))
}

/// Exact expected cost of a deterministic decision rule.
pub fn evaluate_policy_exact(
    profile: &ScenarioProfile,
    mut decide: impl FnMut(&SystemState) -> Result<DecisionPlan>,
) -> Result<ExactSolution> {
    run(profile, &mut |s: &SystemState| Ok(vec![decide(s)?]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{
        ArrivalProcess, DevAttr, DevClass, JointOutcome, PostponementCost, ScheduleProcess,
        PROFILE_SCHEMA_VERSION,
    };
    use crate::policies::myopic_decide;

    fn profile(
        costs: Vec<Vec<f64>>,
        counts: Vec<u32>,
        arrivals: ArrivalProcess,
    ) -> ScenarioProfile {
        let n = costs.len();
        ScenarioProfile {
            schema_version: PROFILE_SCHEMA_VERSION,
            n_bug_types: costs[0].len(),
            dev_classes: costs.into_iter().map(|c| DevClass { costs: c }).collect(),
            dev_counts: counts,
            horizon: 4,
            epoch_length: 1.0,
            deadline_cap: 2,
            due_floor: -3,
            arrival_process: arrivals,
            schedule_process: ScheduleProcess::none(n),
            rejection_prob: 0.0,
            discount: 0.9,
            postponement_cost: PostponementCost::Linear,
            gamma_weights_vfa: true,
            rng_seed: 0,
        }
    }

    fn mixed_arrivals() -> ArrivalProcess {
        ArrivalProcess::Joint {
            outcomes: vec![
                JointOutcome {
                    counts: vec![1, 0],
                    prob: 0.4,
                },
                JointOutcome {
                    counts: vec![0, 1],
                    prob: 0.3,
                },
                JointOutcome {
                    counts: vec![0, 0],
                    prob: 0.3,
                },
            ],
        }
    }

    #[test]
    fn no_arrivals_no_cost() {
        let p = profile(
            vec![vec![2.0]],
            vec![1],
            ArrivalProcess::Deterministic { counts: vec![0] },
        );
        let sol = solve_exact(&p).unwrap();
        assert_eq!(sol.initial_value, 0.0);
        assert!(sol.values.values().all(|&v| v == 0.0));
    }

    #[test]
    fn single_bug_last_epoch() {
        let p = profile(
            vec![vec![2.0]],
            vec![1],
            ArrivalProcess::Deterministic { counts: vec![0] },
        );
        let mut s = SystemState::new(4);
        s.add_bugs(BugAttr::new(0, 0), 1);
        s.add_devs(DevAttr::available(0), 1);
        let sol = solve_exact(&p).unwrap();
        assert!(sol.value(&s).is_none());
        // Evaluate the single state directly: postponing costs f(0) + 0.9·f(-1) > 2.
        let mut rec = Recursion {
            profile: &p,
            memo: HashMap::new(),
            choose: |s: &SystemState| enumerate_plans(s),
        };
        let v = rec.value(&s).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(rec.memo[&s].1.total_assigned(), 1);
    }

    #[test]
    fn rejects_oversized_profiles() {
        let p = profile(
            vec![vec![1.0], vec![1.0], vec![1.0]],
            vec![1, 1, 1],
            ArrivalProcess::Deterministic { counts: vec![1] },
        );
        assert!(matches!(solve_exact(&p), Err(TriageError::TooLarge(_))));
        let mut p = profile(
            vec![vec![1.0]],
            vec![1],
            ArrivalProcess::Deterministic { counts: vec![2] },
        );
        assert!(matches!(solve_exact(&p), Err(TriageError::TooLarge(_))));
        p.arrival_process = ArrivalProcess::Deterministic { counts: vec![1] };
        p.horizon = 9;
        assert!(matches!(solve_exact(&p), Err(TriageError::TooLarge(_))));
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let mut p = profile(
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![2, 1],
            mixed_arrivals(),
        );
        p.rejection_prob = 0.3;
        let mut plan = DecisionPlan::default();
        plan.assign
            .insert((DevAttr::available(0), BugAttr::new(0, 1)), 2);
        plan.assign
            .insert((DevAttr::available(1), BugAttr::new(1, 1)), 1);
        let outs = exogenous_outcomes(&plan, &p, true);
        assert_eq!(outs.len(), 3 * 2 * 3);
        let total: f64 = outs.iter().map(|(_, q)| q).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_never_worse_than_myopic() {
        for eps in [0.0, 0.25] {
            let mut p = profile(
                vec![vec![1.0, 5.0], vec![5.0, 2.0]],
                vec![1, 1],
                mixed_arrivals(),
            );
            p.rejection_prob = eps;
            let opt = solve_exact(&p).unwrap();
            let myo = evaluate_policy_exact(&p, |s| myopic_decide(s, &p)).unwrap();
            assert!(opt.initial_value <= myo.initial_value + 1e-12);
            for (s, v) in &myo.values {
                if let Some(o) = opt.value(s) {
                    assert!(o <= v + 1e-9);
                }
            }
        }
    }

    #[test]
    fn extra_bug_never_helps() {
        let p = profile(
            vec![vec![1.0, 5.0], vec![5.0, 2.0]],
            vec![1, 1],
            mixed_arrivals(),
        );
        let sol = solve_exact(&p).unwrap();
        let mut rec = Recursion {
            profile: &p,
            memo: HashMap::new(),
            choose: |s: &SystemState| enumerate_plans(s),
        };
        for s in sol.values.keys() {
            if s.total_bugs() >= 4 {
                continue;
            }
            for k in 0..2 {
                let mut more = s.clone();
                more.add_bugs(BugAttr::new(k, 0), 1);
                assert!(rec.value(&more).unwrap() >= sol.values[s] - 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_under_type_permutation() {
        let p = profile(
            vec![vec![1.0, 5.0], vec![4.0, 2.0]],
            vec![1, 1],
            mixed_arrivals(),
        );
        let mut q = p.clone();
        for c in &mut q.dev_classes {
            c.costs.swap(0, 1);
        }
        if let ArrivalProcess::Joint { outcomes } = &mut q.arrival_process {
            for o in outcomes {
                o.counts.swap(0, 1);
            }
        }
        let a = solve_exact(&p).unwrap().initial_value;
        let b = solve_exact(&q).unwrap().initial_value;
        assert!((a - b).abs() < 1e-12);
    }
}
