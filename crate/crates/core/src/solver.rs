//! Exact solver for the per-epoch assignment problem.
//!
//! The transportation LP is solved as a min-cost flow: a super source feeds
//! each bug node with its count, each developer node drains its count into a
//! super sink, and a hub node `Z` carries postponed bugs (bug -> Z) and idle
//! developers (Z -> dev). Balancing arcs S -> Z and Z -> T absorb the
//! difference between the bug and developer totals. Successive shortest paths
//! with Bellman-Ford keeps the solution integral. Dual prices are read off the
//! final residual graph as shortest-path distances from `Z`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{BugAttr, DecisionPlan, DevAttr, SystemState};
use crate::error::{Result, TriageError};

/// Objective coefficients of one epoch's assignment problem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArcCosts {
    #[serde(with = "crate::domain::entries")]
    pub assign: BTreeMap<(DevAttr, BugAttr), f64>,
    #[serde(with = "crate::domain::entries")]
    pub postpone: BTreeMap<BugAttr, f64>,
    #[serde(with = "crate::domain::entries")]
    pub idle: BTreeMap<DevAttr, f64>,
}

impl ArcCosts {
    /// Objective value of `plan` under these coefficients.
    pub fn evaluate(&self, plan: &DecisionPlan) -> Result<f64> {
        let mut total = 0.0;
        for (key, &n) in &plan.assign {
            if n > 0 {
                total += n as f64 * self.assign_cost(key.0, key.1)?;
            }
        }
        for (b, &n) in &plan.postpone {
            if n > 0 {
                total += n as f64 * self.postpone_cost(*b)?;
            }
        }
        for (d, &n) in &plan.idle {
            if n > 0 {
                total += n as f64 * self.idle_cost(*d)?;
            }
        }
        Ok(total)
    }

    pub fn assign_cost(&self, d: DevAttr, b: BugAttr) -> Result<f64> {
        self.assign
            .get(&(d, b))
            .copied()
            .ok_or_else(|| TriageError::MissingCost(format!("assignment {d:?} -> {b:?}")))
    }

    pub fn postpone_cost(&self, b: BugAttr) -> Result<f64> {
        self.postpone
            .get(&b)
            .copied()
            .ok_or_else(|| TriageError::MissingCost(format!("postponement of {b:?}")))
    }

    pub fn idle_cost(&self, d: DevAttr) -> Result<f64> {
        self.idle
            .get(&d)
            .copied()
            .ok_or_else(|| TriageError::MissingCost(format!("idling of {d:?}")))
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            assign: self.assign.iter().map(|(k, v)| (*k, v * factor)).collect(),
            postpone: self
                .postpone
                .iter()
                .map(|(k, v)| (*k, v * factor))
                .collect(),
            idle: self.idle.iter().map(|(k, v)| (*k, v * factor)).collect(),
        }
    }
}

/// Optimal plan with objective and dual prices of both constraint families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub plan: DecisionPlan,
    pub objective: f64,
    #[serde(with = "crate::domain::entries")]
    pub dev_duals: BTreeMap<DevAttr, f64>,
    #[serde(with = "crate::domain::entries")]
    pub bug_duals: BTreeMap<BugAttr, f64>,
}

/// Optimal plan found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub plan: DecisionPlan,
    pub objective: f64,
}

const INF_CAP: u64 = u64::MAX / 4;

struct Edge {
    to: usize,
    cap: u64,
    cost: f64,
}

struct Network {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.adj[from].push(id);
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[to].push(id + 1);
        id
    }

    fn flow(&self, edge: usize) -> u64 {
        self.edges[edge ^ 1].cap
    }

    /// Bellman-Ford (queue based) restricted to nodes accepted by `keep`.
    ///
    /// Improvements smaller than `eps` are ignored so floating-point noise on
    /// zero-cost cycles cannot loop forever; ties resolve by adjacency order.
    fn shortest_paths(
        &self,
        source: usize,
        eps: f64,
        keep: impl Fn(usize) -> bool,
    ) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut in_queue = vec![false; n];
        let mut relax_count = vec![0usize; n];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0.0;
        queue.push_back(source);
        in_queue[source] = true;
        while let Some(u) = queue.pop_front() {
            in_queue[u] = false;
            for &e in &self.adj[u] {
                let edge = &self.edges[e];
                if edge.cap == 0 || !keep(edge.to) {
                    continue;
                }
                let cand = dist[u] + edge.cost;
                if cand < dist[edge.to] - eps {
                    dist[edge.to] = cand;
                    pred[edge.to] = Some(e);
                    relax_count[edge.to] += 1;
                    if relax_count[edge.to] > n + 1 {
                        // Only reachable through accumulated rounding; stop relaxing.
                        continue;
                    }
                    if !in_queue[edge.to] {
                        in_queue[edge.to] = true;
                        queue.push_back(edge.to);
                    }
                }
            }
        }
        (dist, pred)
    }
}

/// Solves the assignment problem exactly and returns primal plan plus duals.
pub fn solve(state: &SystemState, costs: &ArcCosts) -> Result<SolverResult> {
    let bugs: Vec<(BugAttr, u32)> = state
        .bugs
        .iter()
        .filter(|(_, &n)| n > 0)
        .map(|(&b, &n)| (b, n))
        .collect();
    let devs: Vec<(DevAttr, u32)> = state.available_devs().collect();

    const SRC: usize = 0;
    const SINK: usize = 1;
    const HUB: usize = 2;
    let bug_node = |i: usize| 3 + i;
    let dev_node = |j: usize| 3 + bugs.len() + j;
    let n_nodes = 3 + bugs.len() + devs.len();

    let mut net = Network::new(n_nodes);
    let mut scale: f64 = 1.0;
    let total_bugs: u64 = bugs.iter().map(|(_, n)| *n as u64).sum();
    let total_devs: u64 = devs.iter().map(|(_, n)| *n as u64).sum();

    for (i, &(_, n)) in bugs.iter().enumerate() {
        net.add_edge(SRC, bug_node(i), n as u64, 0.0);
    }
    for (j, &(_, n)) in devs.iter().enumerate() {
        net.add_edge(dev_node(j), SINK, n as u64, 0.0);
    }
    let mut assign_edges = Vec::with_capacity(bugs.len() * devs.len());
    let mut postpone_edges = Vec::with_capacity(bugs.len());
    for (i, &(b, _)) in bugs.iter().enumerate() {
        for (j, &(d, _)) in devs.iter().enumerate() {
            let c = costs.assign_cost(d, b)?;
            check_finite(c, || format!("assignment {d:?} -> {b:?}"))?;
            scale = scale.max(c.abs());
            assign_edges.push((net.add_edge(bug_node(i), dev_node(j), INF_CAP, c), d, b));
        }
        let p = costs.postpone_cost(b)?;
        check_finite(p, || format!("postponement of {b:?}"))?;
        scale = scale.max(p.abs());
        postpone_edges.push((net.add_edge(bug_node(i), HUB, INF_CAP, p), b));
    }
    let mut idle_edges = Vec::with_capacity(devs.len());
    for (j, &(d, _)) in devs.iter().enumerate() {
        let h = costs.idle_cost(d)?;
        check_finite(h, || format!("idling of {d:?}"))?;
        scale = scale.max(h.abs());
        idle_edges.push((net.add_edge(HUB, dev_node(j), INF_CAP, h), d));
    }
    if total_devs > total_bugs {
        net.add_edge(SRC, HUB, total_devs - total_bugs, 0.0);
    }
    if total_bugs > total_devs {
        net.add_edge(HUB, SINK, total_bugs - total_devs, 0.0);
    }

    let eps = 1e-13 * scale;
    let mut remaining = total_bugs.max(total_devs);
    while remaining > 0 {
        let (dist, pred) = net.shortest_paths(SRC, eps, |_| true);
        if !dist[SINK].is_finite() {
            return Err(TriageError::Infeasible(
                "flow network lost its augmenting path".into(),
            ));
        }
        let mut push = remaining;
        let mut v = SINK;
        while let Some(e) = pred[v] {
            push = push.min(net.edges[e].cap);
            v = net.edges[e ^ 1].to;
        }
        let mut v = SINK;
        while let Some(e) = pred[v] {
            net.edges[e].cap -= push;
            net.edges[e ^ 1].cap += push;
            v = net.edges[e ^ 1].to;
        }
        remaining -= push;
    }

    let mut plan = DecisionPlan::default();
    for &(e, d, b) in &assign_edges {
        let f = net.flow(e) as u32;
        if f > 0 {
            plan.assign.insert((d, b), f);
        }
    }
    for &(e, b) in &postpone_edges {
        let f = net.flow(e) as u32;
        if f > 0 {
            plan.postpone.insert(b, f);
        }
    }
    for &(e, d) in &idle_edges {
        let f = net.flow(e) as u32;
        if f > 0 {
            plan.idle.insert(d, f);
        }
    }

    // Potentials from the hub over bug/dev/hub nodes only.
    let (pot, _) = net.shortest_paths(HUB, 0.0, |v| v >= HUB);
    let mut bug_duals = BTreeMap::new();
    for (i, &(b, _)) in bugs.iter().enumerate() {
        bug_duals.insert(b, -pot[bug_node(i)]);
    }
    let mut dev_duals = BTreeMap::new();
    for (j, &(d, _)) in devs.iter().enumerate() {
        dev_duals.insert(d, pot[dev_node(j)]);
    }

    let objective = costs.evaluate(&plan)?;
    Ok(SolverResult {
        plan,
        objective,
        dev_duals,
        bug_duals,
    })
}

fn check_finite(value: f64, what: impl FnOnce() -> String) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(TriageError::InvalidConfig(format!(
            "non-finite arc cost for {}",
            what()
        )))
    }
}

/// Largest instance the enumerators accept (bugs and available developers).
pub const BRUTE_FORCE_CAP: u32 = 8;

/// Calls `visit` once for every feasible integral plan of `state`.
pub fn for_each_plan(state: &SystemState, mut visit: impl FnMut(&DecisionPlan)) -> Result<()> {
    let bugs: Vec<(BugAttr, u32)> = state
        .bugs
        .iter()
        .filter(|(_, &n)| n > 0)
        .map(|(&b, &n)| (b, n))
        .collect();
    let devs: Vec<(DevAttr, u32)> = state.available_devs().collect();
    let nb: u32 = bugs.iter().map(|(_, n)| n).sum();
    let nd: u32 = devs.iter().map(|(_, n)| n).sum();
    if nb > BRUTE_FORCE_CAP || nd > BRUTE_FORCE_CAP {
        return Err(TriageError::TooLarge(format!(
            "{nb} bugs and {nd} available developers exceed the enumeration cap of {BRUTE_FORCE_CAP}"
        )));
    }
    let mut free: Vec<u32> = devs.iter().map(|(_, n)| *n).collect();
    let mut plan = DecisionPlan::default();
    distribute_bug(&bugs, &devs, 0, 0, &mut free, &mut plan, &mut visit);
    Ok(())
}

/// Assigns the bugs of attribute `bi` to developer classes `dj..` (or postpones them).
fn distribute_bug(
    bugs: &[(BugAttr, u32)],
    devs: &[(DevAttr, u32)],
    bi: usize,
    dj: usize,
    free: &mut Vec<u32>,
    plan: &mut DecisionPlan,
    visit: &mut impl FnMut(&DecisionPlan),
) {
    if bi == bugs.len() {
        let mut full = plan.clone();
        for (j, &(d, _)) in devs.iter().enumerate() {
            if free[j] > 0 {
                full.idle.insert(d, free[j]);
            }
        }
        visit(&full);
        return;
    }
    let (b, total) = bugs[bi];
    let used: u32 = devs
        .iter()
        .map(|&(d, _)| plan.assign.get(&(d, b)).copied().unwrap_or(0))
        .sum();
    let left = total - used;
    if dj == devs.len() {
        if left > 0 {
            plan.postpone.insert(b, left);
        }
        distribute_bug(bugs, devs, bi + 1, 0, free, plan, visit);
        plan.postpone.remove(&b);
        return;
    }
    let d = devs[dj].0;
    for k in 0..=left.min(free[dj]) {
        if k > 0 {
            plan.assign.insert((d, b), k);
        }
        free[dj] -= k;
        distribute_bug(bugs, devs, bi, dj + 1, free, plan, visit);
        free[dj] += k;
        plan.assign.remove(&(d, b));
    }
}

/// Every feasible integral plan of a small state.
pub fn enumerate_plans(state: &SystemState) -> Result<Vec<DecisionPlan>> {
    let mut plans = Vec::new();
    for_each_plan(state, |p| plans.push(p.clone()))?;
    Ok(plans)
}

/// Minimum-cost plan by exhaustive enumeration; the first minimum found wins ties.
pub fn brute_force_solve(state: &SystemState, costs: &ArcCosts) -> Result<BruteForceResult> {
    let mut best: Option<BruteForceResult> = None;
    let mut failure = None;
    for_each_plan(state, |plan| {
        if failure.is_some() {
            return;
        }
        match costs.evaluate(plan) {
            Ok(obj) => {
                if best.as_ref().is_none_or(|b| obj < b.objective) {
                    best = Some(BruteForceResult {
                        plan: plan.clone(),
                        objective: obj,
                    });
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.expect("the all-postpone/all-idle plan always exists"))
}
