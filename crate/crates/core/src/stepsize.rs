//! Step-size rules for the value smoothing update: constant, harmonic and
//! the bias-adjusted Kalman filter (BAKF).

use serde::{Deserialize, Serialize};

/// Selected rule and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepRule {
    Constant { alpha: f64 },
    Harmonic { eta: f64, alpha0: f64 },
    Bakf { nu0: f64, nu_bar: f64 },
}

impl StepRule {
    pub fn constant() -> Self {
        StepRule::Constant { alpha: 0.5 }
    }

    pub fn harmonic() -> Self {
        StepRule::Harmonic {
            eta: 25.0,
            alpha0: 0.05,
        }
    }

    pub fn bakf() -> Self {
        StepRule::Bakf {
            nu0: 0.01,
            nu_bar: 0.2,
        }
    }

    /// Parses `constant`, `harmonic` or `bakf` with default parameters.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "constant" => Some(Self::constant()),
            "harmonic" => Some(Self::harmonic()),
            "bakf" => Some(Self::bakf()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StepRule::Constant { .. } => "constant",
            StepRule::Harmonic { .. } => "harmonic",
            StepRule::Bakf { .. } => "bakf",
        }
    }

    /// Fresh per-entry state for this rule.
    pub fn new_state(&self) -> StepState {
        match *self {
            StepRule::Bakf { nu0, nu_bar } => StepState::Bakf(BakfState::new(nu0, nu_bar)),
            _ => StepState::Counter(0),
        }
    }
}

/// Step state attached to a single value cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepState {
    Counter(u64),
    Bakf(BakfState),
}

impl StepState {
    /// Number of observations already absorbed by this cell.
    pub fn n(&self) -> u64 {
        match self {
            StepState::Counter(n) => *n,
            StepState::Bakf(s) => s.n,
        }
    }

    /// Advances the state with one observation and returns the step size to use.
    ///
    /// `prev` is the cell's current estimate, `obs` the incoming observation.
    pub fn next_alpha(&mut self, rule: &StepRule, obs: f64, prev: f64) -> f64 {
        match (rule, self) {
            (StepRule::Constant { alpha }, StepState::Counter(n)) => {
                *n += 1;
                constant_alpha(*n, *alpha)
            }
            (StepRule::Harmonic { eta, alpha0 }, StepState::Counter(n)) => {
                *n += 1;
                harmonic_alpha(*n, *eta, *alpha0)
            }
            (StepRule::Bakf { .. }, StepState::Bakf(state)) => {
                let (next, alpha) = bakf_update(*state, obs, prev);
                *state = next;
                alpha
            }
            (rule, state) => {
                *state = rule.new_state();
                state.next_alpha(rule, obs, prev)
            }
        }
    }
}

pub fn constant_alpha(_n: u64, alpha: f64) -> f64 {
    alpha
}

/// `max(η / (η + n - 1), α⁰)`
pub fn harmonic_alpha(n: u64, eta: f64, alpha0: f64) -> f64 {
    let n = n.max(1) as f64;
    (eta / (eta + n - 1.0)).max(alpha0)
}

/// Running BAKF statistics of one value cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BakfState {
    pub nu: f64,
    pub nu_bar: f64,
    pub beta_bar: f64,
    pub delta_bar: f64,
    pub lambda_bar: f64,
    pub sigma2: f64,
    /// Initial estimate; carried for completeness, never read by the recursions.
    pub theta_bar: f64,
    pub n: u64,
}

impl BakfState {
    pub fn new(nu0: f64, nu_bar: f64) -> Self {
        Self {
            nu: nu0,
            nu_bar,
            beta_bar: 0.0,
            delta_bar: 0.0,
            lambda_bar: 0.0,
            sigma2: 0.0,
            theta_bar: 0.0,
            n: 0,
        }
    }
}

impl Default for BakfState {
    fn default() -> Self {
        Self::new(0.01, 0.2)
    }
}

/// One BAKF step. `prev_obs` is the estimate the new observation is compared against.
///
/// Returns the advanced state and `α ∈ [1/n, 1]`.
pub fn bakf_update(state: BakfState, new_obs: f64, prev_obs: f64) -> (BakfState, f64) {
    let mut s = state;
    s.n += 1;
    let n = s.n;
    let diff = new_obs - prev_obs;
    s.nu = s.nu / (1.0 + s.nu - s.nu_bar);
    s.beta_bar = (1.0 - s.nu) * s.beta_bar + s.nu * diff;
    s.delta_bar = (1.0 - s.nu) * s.delta_bar + s.nu * diff * diff;
    s.sigma2 = (s.delta_bar - s.beta_bar * s.beta_bar) / (1.0 + s.lambda_bar);
    let floor = 1.0 / n as f64;
    let alpha = if n == 1 {
        1.0
    } else if s.delta_bar == 0.0 {
        floor
    } else {
        (1.0 - s.sigma2 / s.delta_bar).clamp(floor, 1.0)
    };
    s.lambda_bar = if n == 1 {
        alpha * alpha
    } else {
        (1.0 - alpha) * (1.0 - alpha) * s.lambda_bar + alpha * alpha
    };
    (s, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Straight-line transcription of the recursions, used as the reference.
    fn reference_alphas(stream: &[f64]) -> Vec<f64> {
        let (nu_bar, mut nu) = (0.2_f64, 0.01_f64);
        let (mut beta, mut delta, mut lambda) = (0.0_f64, 0.0_f64, 0.0_f64);
        let mut estimate = 0.0_f64;
        let mut out = Vec::new();
        for (i, &v) in stream.iter().enumerate() {
            let n = (i + 1) as f64;
            let d = v - estimate;
            nu /= 1.0 + nu - nu_bar;
            beta = (1.0 - nu) * beta + nu * d;
            delta = (1.0 - nu) * delta + nu * d * d;
            let sigma2 = (delta - beta * beta) / (1.0 + lambda);
            let mut alpha = if i == 0 { 1.0 } else { 1.0 - sigma2 / delta };
            if alpha < 1.0 / n {
                alpha = 1.0 / n;
            }
            if alpha > 1.0 {
                alpha = 1.0;
            }
            lambda = if i == 0 {
                alpha * alpha
            } else {
                (1.0 - alpha) * (1.0 - alpha) * lambda + alpha * alpha
            };
            estimate = (1.0 - alpha) * estimate + alpha * v;
            out.push(alpha);
        }
        out
    }

    fn run_stream(stream: &[f64]) -> Vec<f64> {
        let rule = StepRule::bakf();
        let mut state = rule.new_state();
        let mut estimate = 0.0;
        stream
            .iter()
            .map(|&v| {
                let a = state.next_alpha(&rule, v, estimate);
                estimate += a * (v - estimate);
                a
            })
            .collect()
    }

    #[test]
    fn constant_is_constant() {
        for n in [1, 100, 1_000_000] {
            assert_eq!(constant_alpha(n, 0.5), 0.5);
        }
    }

    #[test]
    fn harmonic_reference_points() {
        assert_eq!(harmonic_alpha(1, 25.0, 0.05), 1.0);
        assert_eq!(harmonic_alpha(26, 25.0, 0.05), 0.5);
        assert_eq!(harmonic_alpha(1_000_000, 25.0, 0.05), 0.05);
    }

    #[test]
    fn bakf_first_step_is_one() {
        let (_, a) = bakf_update(BakfState::default(), 42.0, 0.0);
        assert_eq!(a, 1.0);
    }

    #[test]
    fn bakf_constant_stream_falls_back_to_one_over_n() {
        let rule = StepRule::bakf();
        let mut state = rule.new_state();
        let mut est = 3.0;
        for n in 1..=20u64 {
            let a = state.next_alpha(&rule, 3.0, est);
            est += a * (3.0 - est);
            if n == 1 {
                assert_eq!(a, 1.0);
            } else {
                assert_eq!(a, 1.0 / n as f64);
            }
        }
    }

    #[test]
    fn bakf_matches_reference_stream() {
        let stream = [10.0, 8.0, 9.0, 7.5, 8.2];
        let got = run_stream(&stream);
        let want = reference_alphas(&stream);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn bakf_prefers_biased_low_noise_streams() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let drift: Vec<f64> = (0..100).map(|i| 10.0 + 0.5 * i as f64).collect();
        let noisy: Vec<f64> = drift
            .iter()
            .map(|v| v + rng.random_range(-20.0..20.0))
            .collect();
        let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(run_stream(&drift)) > mean(run_stream(&noisy)));
    }

    proptest! {
        #[test]
        fn all_rules_in_unit_interval(n in 1u64..5_000_000) {
            let c = constant_alpha(n, 0.5);
            let h = harmonic_alpha(n, 25.0, 0.05);
            prop_assert!(c > 0.0 && c <= 1.0);
            prop_assert!(h > 0.0 && h <= 1.0);
        }

        #[test]
        fn harmonic_non_increasing(n in 1u64..1_000_000) {
            prop_assert!(harmonic_alpha(n + 1, 25.0, 0.05) <= harmonic_alpha(n, 25.0, 0.05));
        }

        #[test]
        fn bakf_bounded_below_by_one_over_n(stream in prop::collection::vec(-100.0f64..100.0, 1..200)) {
            for (i, a) in run_stream(&stream).into_iter().enumerate() {
                let n = (i + 1) as f64;
                prop_assert!(a >= 1.0 / n && a <= 1.0);
                if i == 0 { prop_assert_eq!(a, 1.0); }
            }
        }
    }
}
