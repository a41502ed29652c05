//! Trigger-F1 and Argument-F1 on a 0–100 scale.
//!
//! Triggers and arguments are projected to exact keys and matched as
//! multisets: with exact-key equality the multiset intersection is a maximum
//! one-to-one matching.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::EventList;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerMode {
    /// A trigger is correct when its event type matches.
    #[default]
    TypeOnly,
    TypeAndMention,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgumentMode {
    /// An argument is correct when its event type and role match.
    #[default]
    TypeAndRole,
    TypeRoleAndFiller,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchCriteria {
    pub trigger_mode: TriggerMode,
    pub argument_mode: ArgumentMode,
}

impl MatchCriteria {
    pub const STRICT: MatchCriteria = MatchCriteria {
        trigger_mode: TriggerMode::TypeAndMention,
        argument_mode: ArgumentMode::TypeRoleAndFiller,
    };
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub pred: usize,
    pub gold: usize,
}

impl Counts {
    /// F1 on a 0–100 scale. Both sides empty scores 100.
    pub fn f1(&self) -> f64 {
        if self.pred == 0 && self.gold == 0 {
            return 100.0;
        }
        // 2PR/(P+R) with P = tp/pred, R = tp/gold simplifies to 2tp/(pred+gold).
        200.0 * self.tp as f64 / (self.pred + self.gold) as f64
    }

    pub fn precision(&self) -> Option<f64> {
        (self.pred > 0).then(|| self.tp as f64 / self.pred as f64)
    }

    pub fn recall(&self) -> Option<f64> {
        (self.gold > 0).then(|| self.tp as f64 / self.gold as f64)
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, rhs: Counts) -> Counts {
        Counts {
            tp: self.tp + rhs.tp,
            pred: self.pred + rhs.pred,
            gold: self.gold + rhs.gold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Pair {
    pub trigger_f1: f64,
    pub argument_f1: f64,
    pub trigger_counts: Counts,
    pub argument_counts: Counts,
}

impl F1Pair {
    pub fn from_counts(trigger_counts: Counts, argument_counts: Counts) -> Self {
        Self {
            trigger_f1: trigger_counts.f1(),
            argument_f1: argument_counts.f1(),
            trigger_counts,
            argument_counts,
        }
    }

    /// A pair carrying only scores, e.g. values quoted from a results table.
    pub fn from_scores(trigger_f1: f64, argument_f1: f64) -> Self {
        Self {
            trigger_f1,
            argument_f1,
            trigger_counts: Counts::default(),
            argument_counts: Counts::default(),
        }
    }

    pub fn average(&self) -> f64 {
        average_f1(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("cannot score an empty corpus")]
    EmptyCorpus,
}

/// Projection of one trigger under a [`TriggerMode`].
pub fn trigger_keys(events: &EventList, mode: TriggerMode) -> Vec<Vec<&str>> {
    events
        .iter()
        .map(|e| match mode {
            TriggerMode::TypeOnly => vec![e.type_name()],
            TriggerMode::TypeAndMention => vec![e.type_name(), e.mention()],
        })
        .collect()
}

/// Projection of every argument under an [`ArgumentMode`].
pub fn argument_keys(events: &EventList, mode: ArgumentMode) -> Vec<Vec<&str>> {
    events
        .iter()
        .flat_map(|e| {
            e.arguments().map(move |(role, filler)| match mode {
                ArgumentMode::TypeAndRole => vec![e.type_name(), role],
                ArgumentMode::TypeRoleAndFiller => vec![e.type_name(), role, filler],
            })
        })
        .collect()
}

fn multiset_counts<K: Ord>(pred: Vec<K>, gold: Vec<K>) -> Counts {
    let (pred_n, gold_n) = (pred.len(), gold.len());
    let mut bag: BTreeMap<K, usize> = BTreeMap::new();
    for k in gold {
        *bag.entry(k).or_default() += 1;
    }
    let mut tp = 0;
    for k in pred {
        if let Some(n) = bag.get_mut(&k) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    Counts {
        tp,
        pred: pred_n,
        gold: gold_n,
    }
}

pub fn sample_counts(pred: &EventList, gold: &EventList, criteria: MatchCriteria) -> (Counts, Counts) {
    let trig = multiset_counts(
        trigger_keys(pred, criteria.trigger_mode),
        trigger_keys(gold, criteria.trigger_mode),
    );
    let arg = multiset_counts(
        argument_keys(pred, criteria.argument_mode),
        argument_keys(gold, criteria.argument_mode),
    );
    (trig, arg)
}

/// Scores one prediction (already validated) against its gold events.
pub fn score_sample(pred: &EventList, gold: &EventList, criteria: MatchCriteria) -> F1Pair {
    let (t, a) = sample_counts(pred, gold, criteria);
    F1Pair::from_counts(t, a)
}

/// Micro-averaged scores: counts are summed before computing F1.
pub fn score_corpus<'a, I>(samples: I, criteria: MatchCriteria) -> Result<F1Pair, ScoringError>
where
    I: IntoIterator<Item = (&'a EventList, &'a EventList)>,
{
    let mut n = 0usize;
    let mut trig = Counts::default();
    let mut arg = Counts::default();
    for (pred, gold) in samples {
        let (t, a) = sample_counts(pred, gold, criteria);
        trig = trig + t;
        arg = arg + a;
        n += 1;
    }
    if n == 0 {
        return Err(ScoringError::EmptyCorpus);
    }
    Ok(F1Pair::from_counts(trig, arg))
}

/// Micro F1 from pre-aggregated per-sample counts.
pub fn micro_from_counts<I>(counts: I) -> Result<F1Pair, ScoringError>
where
    I: IntoIterator<Item = (Counts, Counts)>,
{
    let mut n = 0usize;
    let (mut trig, mut arg) = (Counts::default(), Counts::default());
    for (t, a) in counts {
        trig = trig + t;
        arg = arg + a;
        n += 1;
    }
    if n == 0 {
        return Err(ScoringError::EmptyCorpus);
    }
    Ok(F1Pair::from_counts(trig, arg))
}

/// Mean of Trigger-F1 and Argument-F1.
pub fn average_f1(pair: &F1Pair) -> f64 {
    (pair.trigger_f1 + pair.argument_f1) / 2.0
}
