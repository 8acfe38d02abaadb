//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Runs with `cargo test --test acceptance`. FAIL lines are reported but do not
//! fail the process unless `ACCEPTANCE_STRICT=1` is set; a panic always does.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use triage_core::domain::{
    initial_due, BugAttr, DevAttr, PostponementCost, ScenarioProfile, SystemState,
};
use triage_core::environment::{EpisodeLog, Simulator};
use triage_core::metrics::{
    discounted_cost, due_date_stats, fixing_time_stats, mean_stderr, top_k_accuracy, SignTest,
};
use triage_core::oracle::solve_exact;
use triage_core::policies::{myopic_decide, Policy};
use triage_core::scenario::{self, GeneratorSpec};
use triage_core::solver::{brute_force_solve, solve, ArcCosts};
use triage_core::stepsize::{bakf_update, harmonic_alpha, BakfState, StepRule};
use triage_core::trainer::{
    evaluate, run_episode, train, Probe, TrainConfig, TrainOutcome, Trainer,
};
use triage_core::value_store::{InitMode, ValueStore};

const ALPHA: f64 = 0.05;
const BENCH_ITERATIONS: u64 = 2_000;
const BENCH_SEED: u64 = 11;
const EVAL_SEED: u64 = 99;
const COMPARE_SEED: u64 = 12_345;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn bench_profile() -> ScenarioProfile {
    scenario::load(&scenario_path("eclipse-like.json")).expect("bundled benchmark")
}

fn bench_config(stepsize: StepRule) -> TrainConfig {
    TrainConfig {
        iterations: BENCH_ITERATIONS,
        eval_every: 100,
        eval_epochs: 30,
        eval_replications: 30,
        stepsize,
        seed: BENCH_SEED,
        eval_seed: EVAL_SEED,
        probes: vec![probe()],
        ..TrainConfig::default()
    }
}

fn probe() -> Probe {
    Probe {
        epoch: 5,
        bug: BugAttr::new(0, 5),
    }
}

fn final_eval(out: &TrainOutcome) -> f64 {
    out.report.eval.last().expect("evaluation points").mean
}

/// Profile the trained policy acts under (its own discount for VFA weights).
fn with_discount(profile: &ScenarioProfile, gamma: f64) -> ScenarioProfile {
    let mut p = profile.clone();
    p.discount = gamma;
    p
}

fn per_episode(logs: &[EpisodeLog], f: impl Fn(&[EpisodeLog]) -> f64) -> Vec<f64> {
    logs.iter().map(|l| f(std::slice::from_ref(l))).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// ---------------------------------------------------------------------------
// Solver exactness

fn random_instance(rng: &mut ChaCha8Rng) -> (SystemState, ArcCosts) {
    let mut s = SystemState::new(1);
    let n_bugs = rng.random_range(0..=4u32);
    let n_devs = rng.random_range(0..=3u32);
    for _ in 0..n_bugs {
        s.add_bugs(
            BugAttr::new(rng.random_range(0..3), rng.random_range(-2..3)),
            1,
        );
    }
    for _ in 0..n_devs {
        s.add_devs(DevAttr::available(rng.random_range(0..3)), 1);
    }
    let mut costs = ArcCosts::default();
    for &b in s.bugs.keys() {
        costs.postpone.insert(b, rng.random_range(-2.0..15.0));
        for &d in s.devs.keys() {
            costs.assign.insert((d, b), rng.random_range(0.5..12.0));
        }
    }
    for &d in s.devs.keys() {
        costs.idle.insert(d, rng.random_range(-5.0..8.0));
    }
    (s, costs)
}

fn slackness_violation(state: &SystemState, costs: &ArcCosts) -> Option<String> {
    let r = solve(state, costs).ok()?;
    let tol = 1e-9;
    for (&(d, b), &c) in &costs.assign {
        let rc = c - r.dev_duals[&d] - r.bug_duals[&b];
        let used = r.plan.assign.get(&(d, b)).copied().unwrap_or(0) > 0;
        if rc < -tol || (used && rc.abs() > tol) {
            return Some(format!("assign arc {d:?}->{b:?} reduced cost {rc}"));
        }
    }
    for (&b, &p) in &costs.postpone {
        let rc = p - r.bug_duals[&b];
        if rc < -tol || (r.plan.postpone.contains_key(&b) && rc.abs() > tol) {
            return Some(format!("postpone arc {b:?} reduced cost {rc}"));
        }
    }
    for (&d, &h) in &costs.idle {
        let rc = h - r.dev_duals[&d];
        if rc < -tol || (r.plan.idle.contains_key(&d) && rc.abs() > tol) {
            return Some(format!("idle arc {d:?} reduced cost {rc}"));
        }
    }
    None
}

fn solver_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..1000 {
        let (s, costs) = random_instance(&mut rng);
        let flow = solve(&s, &costs).expect("solve");
        let bf = brute_force_solve(&s, &costs).expect("brute force");
        let gap = (flow.objective - bf.objective).abs();
        worst = worst.max(gap);
        if gap > 1e-9 {
            failures.push(format!("instance {i}: gap {gap:e}"));
        }
        if let Some(v) = slackness_violation(&s, &costs) {
            failures.push(format!("instance {i}: {v}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "1000 instances, max |objective gap| {worst:.1e}, {} violations, {:.2}s{}",
            failures.len(),
            elapsed.as_secs_f64(),
            failures
                .first()
                .map(|f| format!(", first: {f}"))
                .unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------------
// Exact DP gap

fn exact_dp_gap() -> Outcome {
    let start = Instant::now();
    let profile = scenario::load(&scenario_path("specialist-tiny.json")).expect("tiny scenario");
    let optimum = solve_exact(&profile).expect("oracle").initial_value;
    let config = TrainConfig {
        iterations: 5_000,
        eval_every: 1_000,
        eval_epochs: profile.horizon,
        gamma: profile.discount,
        seed: 3,
        eval_seed: 4,
        ..TrainConfig::default()
    };
    let out = train(&profile, &config).expect("training");
    let cost = |policy: &Policy| {
        let logs = evaluate(&profile, policy, profile.horizon, 200, 777).expect("evaluation");
        mean(&per_episode(&logs, |l| {
            discounted_cost(&l[0], profile.discount)
        }))
    };
    let adp = cost(&Policy::Adp(out.store));
    let myopic = cost(&Policy::Myopic);
    let gap = adp / optimum - 1.0;
    let elapsed = start.elapsed();
    let pass = gap <= 0.05 && adp < myopic && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "optimum {optimum:.4}, ADP {adp:.4} (gap {:.2}%), myopic {myopic:.4}, 200 episodes, {:.1}s",
            gap * 100.0,
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// Iteration zero against myopic

fn iteration_zero_matches_myopic() -> Outcome {
    let profile = bench_profile();
    let config = TrainConfig {
        init: InitMode::BigM,
        seed: BENCH_SEED,
        ..TrainConfig::default()
    };
    let mut trainer = Trainer::new(&profile, &config).expect("trainer");
    let log = trainer.run_iteration().expect("iteration");
    let mut mismatches = 0;
    let mut assigned = 0;
    for r in &log.records {
        let m = myopic_decide(&r.state, trainer.profile()).expect("myopic");
        if m.normalized() != r.plan.clone().normalized() {
            mismatches += 1;
        }
        assigned += r.plan.total_assigned();
    }
    outcome(
        mismatches == 0 && assigned > 0,
        format!(
            "{} epochs, {mismatches} plan mismatches, {assigned} assignments compared",
            log.records.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// Convergence protocol

struct Bench {
    runs: Vec<TrainOutcome>,
    elapsed: Duration,
}

fn train_bench() -> Bench {
    let start = Instant::now();
    let profile = bench_profile();
    let runs = [StepRule::bakf(), StepRule::harmonic(), StepRule::constant()]
        .into_iter()
        .map(|rule| train(&profile, &bench_config(rule)).expect("training"))
        .collect();
    Bench {
        runs,
        elapsed: start.elapsed(),
    }
}

fn convergence(bench: &Bench) -> Outcome {
    let mut improved = true;
    let mut parts = Vec::new();
    let mut endpoints = Vec::new();
    for out in &bench.runs {
        let first = out.report.eval[0].mean;
        let last = final_eval(out);
        improved &= last < first;
        let end = *out.report.traces[0].values.last().expect("trace");
        endpoints.push(end);
        parts.push(format!(
            "{} {first:.1}->{last:.1} probe {end:.3}",
            out.report.label
        ));
    }
    let lo = endpoints.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = endpoints.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo.abs();
    let pass = improved && spread <= 0.10 && bench.elapsed < Duration::from_secs(15 * 60);
    outcome(
        pass,
        format!(
            "{}; probe spread {:.2}%, {:.1}s",
            parts.join(", "),
            spread * 100.0,
            bench.elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// Directional metrics

fn directional(bench: &Bench) -> Vec<(&'static str, Outcome)> {
    let profile = bench_profile();
    let bakf = &bench.runs[0];
    let adp = evaluate(
        &profile,
        &Policy::Adp(bakf.store.clone()),
        30,
        30,
        COMPARE_SEED,
    )
    .expect("evaluation");
    let myo = evaluate(&profile, &Policy::Myopic, 30, 30, COMPARE_SEED).expect("evaluation");

    let fixing = |l: &[EpisodeLog]| {
        fixing_time_stats(l, &profile)
            .map(|s| s.mean)
            .unwrap_or(f64::NAN)
    };
    let fa = per_episode(&adp, fixing);
    let fm = per_episode(&myo, fixing);
    let fix_test = SignTest::lower_is_better(&fa, &fm);
    let pooled_a = fixing(&adp);
    let pooled_m = fixing(&myo);
    let fix_gap = 1.0 - pooled_a / pooled_m;

    let top1 = |l: &[EpisodeLog]| top_k_accuracy(l, &profile, 1).unwrap_or(f64::NAN);
    let top_test = SignTest::higher_is_better(&per_episode(&adp, top1), &per_episode(&myo, top1));

    let due_var = |l: &[EpisodeLog]| due_date_stats(l).map(|s| s.variance).unwrap_or(f64::NAN);
    let due_test =
        SignTest::lower_is_better(&per_episode(&adp, due_var), &per_episode(&myo, due_var));

    vec![
        (
            "directional: fixing time",
            outcome(
                fix_test.p_value < ALPHA && fix_gap >= 0.05,
                format!(
                    "ADP {pooled_a:.3} vs myopic {pooled_m:.3} epochs (gap {:.1}%), wins {}/{} p={:.2e}",
                    fix_gap * 100.0,
                    fix_test.wins,
                    fa.len(),
                    fix_test.p_value
                ),
            ),
        ),
        (
            "directional: top-1 accuracy",
            outcome(
                top_test.p_value < ALPHA,
                format!(
                    "ADP {:.1}% vs myopic {:.1}%, wins {}/30 p={:.2e}",
                    top1(&adp),
                    top1(&myo),
                    top_test.wins,
                    top_test.p_value
                ),
            ),
        ),
        (
            "directional: due-date variance",
            outcome(
                due_test.p_value < ALPHA,
                format!(
                    "ADP {:.2} vs myopic {:.2}, wins {}/30 p={:.3}",
                    due_var(&adp),
                    due_var(&myo),
                    due_test.wins,
                    due_test.p_value
                ),
            ),
        ),
    ]
}

// ---------------------------------------------------------------------------
// Step sizes

/// Straight-line transcription of the bias-adjusted Kalman filter recursion.
fn bakf_transcript(stream: &[f64]) -> Vec<[f64; 4]> {
    let (nu_bar, mut nu) = (0.2_f64, 0.01_f64);
    let (mut beta, mut delta, mut lambda) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut estimate = 0.0_f64;
    let mut rows = Vec::new();
    for (i, &obs) in stream.iter().enumerate() {
        let n = (i + 1) as f64;
        let err = obs - estimate;
        nu = nu / (1.0 + nu - nu_bar);
        beta = (1.0 - nu) * beta + nu * err;
        delta = (1.0 - nu) * delta + nu * err * err;
        let sigma2 = (delta - beta * beta) / (1.0 + lambda);
        let alpha = if i == 0 {
            1.0
        } else {
            (1.0 - sigma2 / delta).clamp(1.0 / n, 1.0)
        };
        lambda = if i == 0 {
            alpha * alpha
        } else {
            (1.0 - alpha).powi(2) * lambda + alpha * alpha
        };
        estimate += alpha * (obs - estimate);
        rows.push([alpha, beta, delta, lambda]);
    }
    rows
}

fn run_bakf(stream: &[f64]) -> Vec<[f64; 4]> {
    let mut state = BakfState::new(0.01, 0.2);
    let mut estimate = 0.0;
    stream
        .iter()
        .map(|&obs| {
            let (next, alpha) = bakf_update(state, obs, estimate);
            state = next;
            estimate += alpha * (obs - estimate);
            [alpha, state.beta_bar, state.delta_bar, state.lambda_bar]
        })
        .collect()
}

fn step_sizes() -> Outcome {
    let harmonic = [1, 26, 1_000_000].map(|n| harmonic_alpha(n, 25.0, 0.05));
    let harmonic_ok = harmonic == [1.0, 0.5, 0.05];

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bound_violations = 0;
    for _ in 0..100 {
        let level = rng.random_range(-50.0..50.0);
        let noise = rng.random_range(0.0..20.0);
        let stream: Vec<f64> = (0..200)
            .map(|_| level + noise * rng.random_range(-1.0..1.0))
            .collect();
        let alphas = run_bakf(&stream);
        if alphas[0][0] != 1.0 {
            bound_violations += 1;
        }
        for (i, row) in alphas.iter().enumerate() {
            if row[0] < 1.0 / (i + 1) as f64 {
                bound_violations += 1;
            }
        }
    }

    let reference = [10.0, 8.0, 9.0, 7.5, 8.2];
    let worst = run_bakf(&reference)
        .iter()
        .zip(bakf_transcript(&reference))
        .flat_map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0_f64, f64::max);

    outcome(
        harmonic_ok && bound_violations == 0 && worst <= 1e-12,
        format!(
            "harmonic {harmonic:?}, BAKF bound violations {bound_violations} over 100 streams, reference max diff {worst:.1e}"
        ),
    )
}

// ---------------------------------------------------------------------------
// Discount sensitivity

fn discount_sensitivity(bench: &Bench) -> Outcome {
    let profile = bench_profile();
    let gamma_bench = profile.discount;
    let low = train(
        &profile,
        &TrainConfig {
            gamma: 0.9,
            ..bench_config(StepRule::bakf())
        },
    )
    .expect("training");
    // Both policies are scored with the benchmark's own discount so the
    // improvements are on one scale.
    let score = |p: &ScenarioProfile, policy: &Policy| {
        let logs = evaluate(p, policy, 30, 30, COMPARE_SEED).expect("evaluation");
        mean(&per_episode(&logs, |l| discounted_cost(&l[0], gamma_bench)))
    };
    let myopic = score(&profile, &Policy::Myopic);
    let high_cost = score(
        &with_discount(&profile, 0.99),
        &Policy::Adp(bench.runs[0].store.clone()),
    );
    let low_cost = score(&with_discount(&profile, 0.9), &Policy::Adp(low.store));
    let high_gain = myopic - high_cost;
    let low_gain = myopic - low_cost;
    let pass = high_cost < myopic && (low_cost >= myopic || low_gain < high_gain);
    outcome(
        pass,
        format!(
            "myopic {myopic:.2}, ADP(0.99) {high_cost:.2} (gain {high_gain:.2}), ADP(0.9) {low_cost:.2} (gain {low_gain:.2})"
        ),
    )
}

// ---------------------------------------------------------------------------
// Exploration

fn exploration() -> Outcome {
    let profile = bench_profile();
    let mut explore = Vec::new();
    let mut greedy = Vec::new();
    for seed in 1..=10 {
        for (eps, sink) in [(0.75, &mut explore), (0.0, &mut greedy)] {
            let config = TrainConfig {
                epsilon: eps,
                seed,
                probes: Vec::new(),
                ..bench_config(StepRule::bakf())
            };
            sink.push(final_eval(&train(&profile, &config).expect("training")));
        }
    }
    let test = SignTest::lower_is_better(&explore, &greedy);
    let (me, _) = mean_stderr(&explore);
    let (mg, _) = mean_stderr(&greedy);
    outcome(
        test.p_value < ALPHA && me <= mg,
        format!(
            "mean final cost eps=0.75 {me:.2} vs eps=0 {mg:.2}, wins {}/10 p={:.3}",
            test.wins, test.p_value
        ),
    )
}

// ---------------------------------------------------------------------------
// Cost-function insensitivity

fn cost_function(bench: &Bench) -> Outcome {
    let linear = bench_profile();
    let mut exponential = linear.clone();
    exponential.postponement_cost = PostponementCost::exponential();
    let trained = train(&exponential, &bench_config(StepRule::bakf())).expect("training");
    let top1 = |p: &ScenarioProfile, store: &ValueStore| {
        let logs =
            evaluate(p, &Policy::Adp(store.clone()), 30, 30, COMPARE_SEED).expect("evaluation");
        top_k_accuracy(&logs, p, 1).expect("accuracy")
    };
    let a = top1(&linear, &bench.runs[0].store);
    let b = top1(&exponential, &trained.store);
    outcome(
        (a - b).abs() < 2.0,
        format!(
            "top-1 linear {a:.2}% vs exponential {b:.2}% (diff {:.2}pp)",
            (a - b).abs()
        ),
    )
}

// ---------------------------------------------------------------------------
// Simulation invariants

fn random_profile(rng: &mut ChaCha8Rng, seed: u64) -> ScenarioProfile {
    let mut spec = GeneratorSpec::preset("custom").expect("preset");
    spec.n_dev_classes = rng.random_range(1..=4);
    spec.n_bug_types = rng.random_range(1..=3);
    spec.devs_per_class = rng.random_range(1..=2);
    spec.mean_cost = rng.random_range(1.0..6.0);
    spec.horizon = rng.random_range(2..=10);
    spec.deadline_cap = rng.random_range(1..spec.horizon as i32);
    spec.due_floor = -rng.random_range(0..=4);
    spec.load = rng.random_range(0.2..2.0);
    spec.max_arrivals_per_type = rng.random_range(1..=3);
    spec.absence_prob = rng.random_range(0.0..0.3);
    spec.mean_absence = rng.random_range(1.0..3.0);
    spec.early_return_prob = rng.random_range(0.0..0.3);
    spec.rejection_prob = rng.random_range(0.0..0.8);
    if rng.random_bool(0.5) {
        spec.postponement_cost = PostponementCost::exponential();
    }
    scenario::generate(&spec, seed).expect("generated profile")
}

fn check_episode(log: &EpisodeLog, profile: &ScenarioProfile) -> Result<(), String> {
    let devs_per_class = |s: &SystemState| {
        let mut v = vec![0u32; profile.n_dev_classes()];
        for (d, &n) in &s.devs {
            v[d.exp_id] += n;
        }
        v
    };
    let classes = profile.dev_counts.clone();
    for (i, r) in log.records.iter().enumerate() {
        r.plan
            .check_feasible(&r.state)
            .map_err(|e| format!("epoch {}: {e}", r.epoch))?;
        if devs_per_class(&r.state) != classes {
            return Err(format!("epoch {}: developer count changed", r.epoch));
        }
        let Some(next) = log.records.get(i + 1).map(|n| &n.state) else {
            continue;
        };
        // Every open bug is postponed, rejected or new; survivors age by one.
        let mut expected = std::collections::BTreeMap::new();
        for (b, &n) in &r.plan.postpone {
            *expected.entry(b.aged(profile.due_floor)).or_insert(0) += n;
        }
        for rej in &r.draw.rejections {
            *expected.entry(rej.bug.aged(profile.due_floor)).or_insert(0) += rej.count;
        }
        let due = initial_due(r.epoch + 1, profile);
        for (&k, &n) in &r.draw.new_bugs {
            *expected.entry(BugAttr::new(k, due)).or_insert(0) += n;
        }
        if expected != next.bugs {
            return Err(format!("epoch {}: bug flow not conserved", r.epoch));
        }
        let accepted = r.assignments.iter().filter(|a| a.accepted).count() as u32;
        let arrived: u32 = r.draw.new_bugs.values().sum();
        if next.total_bugs() + accepted != r.state.total_bugs() + arrived {
            return Err(format!("epoch {}: bug totals do not balance", r.epoch));
        }
        for b in next.bugs.keys() {
            if b.due > profile.deadline_cap || b.due < profile.due_floor {
                return Err(format!("epoch {}: due {} out of range", r.epoch, b.due));
            }
        }
    }
    Ok(())
}

fn simulation_invariants() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut violations = Vec::new();
    let episodes = 10_000;
    let (mut epochs, mut assigned) = (0usize, 0usize);
    for i in 0..episodes {
        let seed = rng.random::<u64>();
        let profile = random_profile(&mut rng, seed);
        let policy = match i % 3 {
            0 => Policy::Random,
            1 => Policy::Myopic,
            _ => Policy::Adp(ValueStore::init(
                &profile,
                InitMode::PostponementPenalty,
                StepRule::bakf(),
            )),
        };
        let a = run_episode(&profile, &policy, profile.horizon, seed).expect("episode");
        let b = run_episode(&profile, &policy, profile.horizon, seed).expect("episode");
        if a != b {
            violations.push(format!("episode {i}: not deterministic"));
        }
        epochs += a.records.len();
        assigned += a.records.iter().map(|r| r.assignments.len()).sum::<usize>();
        if let Err(e) = check_episode(&a, &profile) {
            violations.push(format!("episode {i}: {e}"));
        }
        // Changing the rejection probability leaves the arrival stream intact.
        let mut calm = profile.clone();
        calm.rejection_prob = 0.0;
        let sim = Simulator::new(&calm, calm.horizon, 0.0, seed);
        if sim.state().bugs != a.records[0].state.bugs {
            violations.push(format!("episode {i}: arrivals depend on epsilon"));
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{episodes} randomized episodes ({epochs} epochs, {assigned} assignments), {} violations, {:.1}s{}",
            violations.len(),
            start.elapsed().as_secs_f64(),
            violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------------

fn report(name: &str, o: &Outcome, failed: &mut Vec<String>) {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("{tag} {name}: {}", o.detail);
    if !o.pass {
        failed.push(name.to_string());
    }
}

fn main() {
    // `cargo test` forwards harness flags such as `--nocapture`; none apply here.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failed = Vec::new();
    report("solver exactness", &solver_exactness(), &mut failed);
    report("exact-DP optimality gap", &exact_dp_gap(), &mut failed);
    report(
        "iteration-0 equals myopic",
        &iteration_zero_matches_myopic(),
        &mut failed,
    );
    let bench = train_bench();
    report("convergence protocol", &convergence(&bench), &mut failed);
    for (name, o) in directional(&bench) {
        report(name, &o, &mut failed);
    }
    report("step-size suite", &step_sizes(), &mut failed);
    report(
        "discount sensitivity",
        &discount_sensitivity(&bench),
        &mut failed,
    );
    report("exploration effect", &exploration(), &mut failed);
    report(
        "cost-function insensitivity",
        &cost_function(&bench),
        &mut failed,
    );
    report(
        "simulation invariants",
        &simulation_invariants(),
        &mut failed,
    );

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", failed.len(), failed.join(", "));
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
