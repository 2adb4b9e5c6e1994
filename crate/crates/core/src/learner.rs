//! Deviant-mean learner.
//!
//! The learner keeps a single scalar, the deviant mean `m`, and predicts the
//! next class as `previous + m`. After every observation it compares the raw
//! prediction with the observed class:
//!
//! * over-prediction weakens `m` (subtractive `m - k`, or divisive `1 / (m * k)`),
//! * under-prediction reinforces it (additive `m + k`, or multiplicative `m * k`),
//! * an exact hit nudges `m` by the bias `l_p`.
//!
//! `k` ranges over a fixed, uniformly spaced adjustment grid, so every update
//! produces a whole population of candidate deviant means. The candidates
//! whose prediction would have landed closest to the observation win
//! (k-winner-take-all) and become the new deviant mean.

use std::cmp::Ordering;

use thiserror::Error;

use crate::encoder::ClassLevel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnerError {
    #[error("invalid learner configuration: {field} {reason}")]
    BadConfig { field: &'static str, reason: String },
    #[error("value {value} is outside 1..={class_level}")]
    BadValue { value: u32, class_level: u32 },
    #[error("multiplicative/divisive update degenerates at deviant mean zero")]
    DegenerateDivisive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleMode {
    #[default]
    AdditiveSubtractive,
    MultiplicativeDivisive,
}

impl std::str::FromStr for RuleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "addsub" => Ok(RuleMode::AdditiveSubtractive),
            "muldiv" => Ok(RuleMode::MultiplicativeDivisive),
            _ => Err(format!("expected `addsub` or `muldiv`, got `{s}`")),
        }
    }
}

impl std::fmt::Display for RuleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RuleMode::AdditiveSubtractive => "addsub",
            RuleMode::MultiplicativeDivisive => "muldiv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig<S> {
    pub population_size: usize,
    pub max_deviant_adjust: S,
    pub rule_mode: RuleMode,
    /// Added to the deviant mean after an exact prediction.
    pub bias: S,
    pub k_winners: usize,
    /// Upper clamp for predicted classes.
    pub class_level: ClassLevel,
}

impl<S: Scalar> Default for LearnerConfig<S> {
    fn default() -> Self {
        Self {
            population_size: 1000,
            max_deviant_adjust: S::from_f64_lossy(2.0),
            rule_mode: RuleMode::AdditiveSubtractive,
            bias: S::zero(),
            k_winners: 1,
            class_level: ClassLevel::default(),
        }
    }
}

impl<S: Scalar> LearnerConfig<S> {
    pub fn validate(&self) -> Result<(), LearnerError> {
        let bad = |field, reason: &str| {
            Err(LearnerError::BadConfig {
                field,
                reason: reason.to_owned(),
            })
        };
        if self.population_size == 0 {
            return bad("population_size", "must be at least 1");
        }
        if !(self.max_deviant_adjust.is_finite() && self.max_deviant_adjust > S::zero()) {
            return bad("max_deviant_adjust", "must be a positive finite number");
        }
        if !self.bias.is_finite() {
            return bad("bias", "must be finite");
        }
        if self.k_winners == 0 || self.k_winners > self.population_size {
            return bad("k_winners", "must be within 1..=population_size");
        }
        Ok(())
    }
}

/// Which branch of the update rule a step took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateBranch {
    /// Raw prediction above the observation.
    Weaken,
    /// Raw prediction below the observation.
    Reinforce,
    /// Exact hit; only the bias was applied.
    Bias,
    /// Learning disabled for this step.
    Frozen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState<S> {
    pub deviant_mean: S,
    adjustment_grid: Vec<S>,
    pub steps_seen: usize,
}

impl<S: Scalar> LearnerState<S> {
    /// Fresh state: zero deviant mean and the grid
    /// `{A/N, 2A/N, ..., A}` for `N = population_size`, `A = max_deviant_adjust`.
    pub fn new(config: &LearnerConfig<S>) -> Result<Self, LearnerError> {
        config.validate()?;
        let n = S::from_count(config.population_size);
        let adjustment_grid = (1..=config.population_size)
            .map(|i| config.max_deviant_adjust * S::from_count(i) / n)
            .collect();
        Ok(Self {
            deviant_mean: S::zero(),
            adjustment_grid,
            steps_seen: 0,
        })
    }

    pub fn adjustment_grid(&self) -> &[S] {
        &self.adjustment_grid
    }

    /// Raw `current + m` and the class it rounds to (half away from zero),
    /// clamped to `1..=class_level`.
    pub fn predict_next(&self, current: u32, class_level: ClassLevel) -> (S, u32) {
        let raw = S::from_class(current) + self.deviant_mean;
        (raw, clamp_class(raw, class_level))
    }

    /// Candidate deviant means for a non-zero signed difference.
    pub fn adjust_candidates(&self, signed_diff: S, mode: RuleMode) -> Result<Vec<S>, LearnerError> {
        let m = self.deviant_mean;
        let weaken = signed_diff > S::zero();
        match mode {
            RuleMode::AdditiveSubtractive => Ok(self
                .adjustment_grid
                .iter()
                .map(|&k| if weaken { m - k } else { m + k })
                .collect()),
            RuleMode::MultiplicativeDivisive => self
                .adjustment_grid
                .iter()
                .map(|&k| {
                    let product = m * k;
                    if product == S::zero() || !product.is_finite() {
                        Err(LearnerError::DegenerateDivisive)
                    } else if weaken {
                        Ok(product.recip())
                    } else {
                        Ok(product)
                    }
                })
                .collect(),
        }
    }

    pub fn apply_bias(&mut self, bias: S) {
        self.deviant_mean = self.deviant_mean + bias;
    }
}

pub fn clamp_class<S: Scalar>(raw: S, class_level: ClassLevel) -> u32 {
    let rounded = raw.round();
    let level = class_level.get();
    if rounded.is_nan() || rounded < S::one() {
        1
    } else if rounded >= S::from_class(level) {
        level
    } else {
        rounded.to_u32().unwrap_or(1)
    }
}

fn residual<S: Scalar>(candidate: S, previous: S, expected: S) -> S {
    (previous + candidate - expected).abs()
}

fn total_order<S: Scalar>(a: S, b: S) -> Ordering {
    match a.partial_cmp(&b) {
        Some(o) => o,
        None => a.is_nan().cmp(&b.is_nan()),
    }
}

/// Indices of the `k` candidates with the smallest residual
/// `|previous + candidate - expected|`, best first. Ties go to the smaller
/// `|candidate|`, then to the earlier position.
pub fn select_winner_indices<S: Scalar>(candidates: &[S], previous: u32, expected: u32, k: usize) -> Vec<usize> {
    let prev = S::from_class(previous);
    let exp = S::from_class(expected);
    let key = |i: usize| (residual(candidates[i], prev, exp), candidates[i].abs(), i);
    let cmp = |a: &usize, b: &usize| {
        let (ra, ma, ia) = key(*a);
        let (rb, mb, ib) = key(*b);
        total_order(ra, rb).then_with(|| total_order(ma, mb)).then(ia.cmp(&ib))
    };
    let k = k.min(candidates.len());
    if k == 0 {
        return Vec::new();
    }
    if k == 1 {
        return (0..candidates.len()).min_by(cmp).into_iter().collect();
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, cmp);
        order.truncate(k);
    }
    order.sort_by(cmp);
    order
}

pub fn select_winners<S: Scalar>(candidates: &[S], previous: u32, expected: u32, k: usize) -> Vec<S> {
    select_winner_indices(candidates, previous, expected, k)
        .into_iter()
        .map(|i| candidates[i])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<S> {
    pub raw_prediction: S,
    pub predicted_class: u32,
    pub expected: u32,
    /// `raw_prediction - expected`.
    pub signed_diff: S,
    pub winner_candidates: Vec<S>,
    pub new_deviant_mean: S,
    pub branch: UpdateBranch,
    /// Multiplicative/divisive mode hit a zero product and the step used the
    /// additive/subtractive rule instead.
    pub fell_back: bool,
}

/// Configuration plus state; one [`Learner::step`] per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner<S> {
    config: LearnerConfig<S>,
    state: LearnerState<S>,
}

impl<S: Scalar> Learner<S> {
    pub fn new(config: LearnerConfig<S>) -> Result<Self, LearnerError> {
        let state = LearnerState::new(&config)?;
        Ok(Self { config, state })
    }

    pub fn config(&self) -> &LearnerConfig<S> {
        &self.config
    }

    pub fn state(&self) -> &LearnerState<S> {
        &self.state
    }

    pub fn deviant_mean(&self) -> S {
        self.state.deviant_mean
    }

    fn check(&self, value: u32) -> Result<(), LearnerError> {
        let class_level = self.config.class_level.get();
        if value < 1 || value > class_level {
            return Err(LearnerError::BadValue { value, class_level });
        }
        Ok(())
    }

    pub fn predict(&self, current: u32) -> Result<(S, u32), LearnerError> {
        self.check(current)?;
        Ok(self.state.predict_next(current, self.config.class_level))
    }

    /// Predicts from `previous`, scores against `expected` and updates the
    /// deviant mean.
    pub fn step(&mut self, previous: u32, expected: u32) -> Result<StepOutcome<S>, LearnerError> {
        self.check(previous)?;
        self.check(expected)?;
        let (raw, predicted) = self.state.predict_next(previous, self.config.class_level);
        let diff = raw - S::from_class(expected);

        let mut winners = Vec::new();
        let mut fell_back = false;
        let branch = if diff == S::zero() {
            self.state.apply_bias(self.config.bias);
            UpdateBranch::Bias
        } else {
            let candidates = match self.state.adjust_candidates(diff, self.config.rule_mode) {
                Ok(c) => c,
                Err(LearnerError::DegenerateDivisive) => {
                    fell_back = true;
                    self.state.adjust_candidates(diff, RuleMode::AdditiveSubtractive)?
                }
                Err(e) => return Err(e),
            };
            winners = select_winners(&candidates, previous, expected, self.config.k_winners);
            self.state.deviant_mean = if winners.len() == 1 {
                winners[0]
            } else {
                winners.iter().fold(S::zero(), |acc, &w| acc + w) / S::from_count(winners.len())
            };
            if diff > S::zero() {
                UpdateBranch::Weaken
            } else {
                UpdateBranch::Reinforce
            }
        };
        self.state.steps_seen += 1;

        Ok(StepOutcome {
            raw_prediction: raw,
            predicted_class: predicted,
            expected,
            signed_diff: diff,
            winner_candidates: winners,
            new_deviant_mean: self.state.deviant_mean,
            branch,
            fell_back,
        })
    }

    /// Prediction only; the state is left untouched.
    pub fn observe_frozen(&self, previous: u32, expected: u32) -> Result<StepOutcome<S>, LearnerError> {
        self.check(expected)?;
        let (raw, predicted) = self.predict(previous)?;
        Ok(StepOutcome {
            raw_prediction: raw,
            predicted_class: predicted,
            expected,
            signed_diff: raw - S::from_class(expected),
            winner_candidates: Vec::new(),
            new_deviant_mean: self.state.deviant_mean,
            branch: UpdateBranch::Frozen,
            fell_back: false,
        })
    }
}
