//! Outcome rewards, the self-critical advantage, and the two stabilizers
//! (advantage floor and teacher-force threshold).

use serde::{Deserialize, Serialize};

use crate::scoring::F1Pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    ArgF1,
    AvgF1,
    ProdF1,
}

impl RewardKind {
    pub fn label(&self) -> &'static str {
        match self {
            RewardKind::ArgF1 => "Arg-F1",
            RewardKind::AvgF1 => "AVG-F1",
            RewardKind::ProdF1 => "Prod-F1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub f1: F1Pair,
    pub kind: RewardKind,
    pub reward: f64,
}

/// Reward on the 0–100 scale. The product is divided by 100 so that all
/// three kinds share the scale the threshold and floor are expressed in.
pub fn reward_value(f1: &F1Pair, kind: RewardKind) -> f64 {
    match kind {
        RewardKind::ArgF1 => f1.argument_f1,
        RewardKind::AvgF1 => (f1.trigger_f1 + f1.argument_f1) / 2.0,
        RewardKind::ProdF1 => f1.trigger_f1 * f1.argument_f1 / 100.0,
    }
}

pub fn compute_reward(f1: F1Pair, kind: RewardKind) -> RewardBreakdown {
    RewardBreakdown {
        f1,
        kind,
        reward: reward_value(&f1, kind),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipMode {
    /// `max(A, A_min)`, applied to negative advantages as well.
    #[default]
    Literal,
    /// `sign(A) * max(|A|, A_min)`; zero counts as positive.
    SignPreserving,
}

pub fn clip_advantage(raw: f64, a_min: f64, mode: ClipMode) -> f64 {
    match mode {
        ClipMode::Literal => raw.max(a_min),
        ClipMode::SignPreserving => {
            let magnitude = raw.abs().max(a_min);
            if raw < 0.0 {
                -magnitude
            } else {
                magnitude
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageRecord {
    pub sampled_reward: f64,
    /// Greedy-decode reward of the current model on the same sample.
    pub baseline: f64,
    pub raw_advantage: f64,
    pub clipped_advantage: f64,
    pub a_min: f64,
}

pub fn compute_advantage(sampled_reward: f64, greedy_reward: f64, a_min: f64) -> AdvantageRecord {
    compute_advantage_with(sampled_reward, greedy_reward, a_min, ClipMode::Literal)
}

pub fn compute_advantage_with(
    sampled_reward: f64,
    greedy_reward: f64,
    a_min: f64,
    mode: ClipMode,
) -> AdvantageRecord {
    let raw_advantage = sampled_reward - greedy_reward;
    AdvantageRecord {
        sampled_reward,
        baseline: greedy_reward,
        raw_advantage,
        clipped_advantage: clip_advantage(raw_advantage, a_min, mode),
        a_min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    TeacherForce,
    RlUpdate,
}

/// Teacher-force exactly when the greedy reward falls below `tau`.
pub fn teacher_force_decision(greedy_reward: f64, tau: f64) -> StepMode {
    if greedy_reward < tau {
        StepMode::TeacherForce
    } else {
        StepMode::RlUpdate
    }
}
