//! A linear softmax policy over a finite set of candidate outputs.
//!
//! Each candidate gets the logit `<weights, features>`; the policy is the
//! tempered softmax of those logits. Greedy decoding, nucleus sampling and
//! the score-function gradient all work on that distribution.

mod checkpoint;
mod features;

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{serialize_output, EventList};
use crate::schema::EventSchema;

pub use checkpoint::{
    content_hash, load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CheckpointError,
};
pub use features::{extract_features, FeatureId, FeatureVector};

pub const DEFAULT_K_MAX: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("non-finite logit for candidate {0}")]
    NonFiniteLogit(usize),
    #[error("update produced a non-finite weight")]
    NonFiniteUpdate,
    #[error("invalid candidate set: {0}")]
    InvalidCandidateSet(String),
    #[error("temperature must be positive, got {0}")]
    InvalidTemperature(f64),
}

/// The action space for one input: distinct candidate outputs with their features.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    candidates: Vec<EventList>,
    features: Vec<FeatureVector>,
    gold_index: Option<usize>,
}

impl CandidateSet {
    pub fn new(
        candidates: Vec<EventList>,
        features: Vec<FeatureVector>,
        gold_index: Option<usize>,
    ) -> Result<Self, PolicyError> {
        if candidates.is_empty() {
            return Err(PolicyError::InvalidCandidateSet("no candidates".into()));
        }
        if candidates.len() != features.len() {
            return Err(PolicyError::InvalidCandidateSet(format!(
                "{} candidates but {} feature vectors",
                candidates.len(),
                features.len()
            )));
        }
        if let Some(g) = gold_index {
            if g >= candidates.len() {
                return Err(PolicyError::InvalidCandidateSet(format!(
                    "gold index {g} out of range"
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &candidates {
            if !seen.insert(serialize_output(c)) {
                return Err(PolicyError::InvalidCandidateSet(format!(
                    "duplicate candidate {}",
                    serialize_output(c)
                )));
            }
        }
        Ok(Self {
            candidates,
            features,
            gold_index,
        })
    }

    /// Builds the set, extracting features of every candidate against `text`.
    pub fn with_features(
        text: &str,
        schema: &EventSchema,
        candidates: Vec<EventList>,
        gold_index: Option<usize>,
    ) -> Result<Self, PolicyError> {
        let features = candidates
            .iter()
            .map(|c| extract_features(text, c, schema))
            .collect();
        Self::new(candidates, features, gold_index)
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[EventList] {
        &self.candidates
    }

    pub fn candidate(&self, i: usize) -> &EventList {
        &self.candidates[i]
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn gold_index(&self) -> Option<usize> {
        self.gold_index
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyParams {
    pub weights: FeatureVector,
    pub step_count: u64,
}

impl PolicyParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn logits(&self, cset: &CandidateSet) -> Vec<f64> {
        cset.features.iter().map(|f| self.weights.dot(f)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeSettings {
    pub temperature: f64,
    pub top_p: f64,
}

impl Default for DecodeSettings {
    fn default() -> Self {
        Self {
            temperature: 0.5,
            top_p: 0.95,
        }
    }
}

fn check_temperature(t: f64) -> Result<(), PolicyError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(PolicyError::InvalidTemperature(t))
    }
}

fn tempered_logits(
    params: &PolicyParams,
    cset: &CandidateSet,
    temperature: f64,
) -> Result<Vec<f64>, PolicyError> {
    check_temperature(temperature)?;
    params
        .logits(cset)
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let z = l / temperature;
            if z.is_finite() {
                Ok(z)
            } else {
                Err(PolicyError::NonFiniteLogit(i))
            }
        })
        .collect()
}

fn log_softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    z.iter().map(|v| v - lse).collect()
}

/// `softmax(logits / temperature)`.
pub fn distribution(
    params: &PolicyParams,
    cset: &CandidateSet,
    temperature: f64,
) -> Result<Vec<f64>, PolicyError> {
    let z = tempered_logits(params, cset, temperature)?;
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

pub fn log_prob(
    params: &PolicyParams,
    cset: &CandidateSet,
    index: usize,
    temperature: f64,
) -> Result<f64, PolicyError> {
    Ok(log_softmax(&tempered_logits(params, cset, temperature)?)[index])
}

/// Argmax of the untempered logits, lowest index on ties.
pub fn greedy_decode<'a>(params: &PolicyParams, cset: &'a CandidateSet) -> (usize, &'a EventList) {
    let logits = params.logits(cset);
    let mut best = 0;
    for (i, &l) in logits.iter().enumerate().skip(1) {
        if l > logits[best] {
            best = i;
        }
    }
    (best, &cset.candidates[best])
}

/// Truncates `probs` to its top-p nucleus and renormalizes. Ranks by
/// descending probability with a stable sort, keeps the shortest prefix
/// reaching `top_p`, and returns a full-length vector with zeros outside
/// the nucleus.
pub fn nucleus_distribution(probs: &[f64], top_p: f64) -> Vec<f64> {
    if top_p >= 1.0 {
        return probs.to_vec();
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    let mut kept = Vec::new();
    let mut mass = 0.0;
    for &i in &order {
        kept.push(i);
        mass += probs[i];
        if mass >= top_p {
            break;
        }
    }
    let mut out = vec![0.0; probs.len()];
    for i in kept {
        out[i] = probs[i] / mass;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampled {
    pub index: usize,
    /// Log-probability under the full tempered distribution, before truncation.
    pub log_prob: f64,
}

pub fn nucleus_sample<R: Rng + ?Sized>(
    params: &PolicyParams,
    cset: &CandidateSet,
    settings: DecodeSettings,
    rng: &mut R,
) -> Result<Sampled, PolicyError> {
    let z = tempered_logits(params, cset, settings.temperature)?;
    let logp = log_softmax(&z);
    let probs: Vec<f64> = logp.iter().map(|l| l.exp()).collect();
    let nucleus = nucleus_distribution(&probs, settings.top_p);
    let index = draw(&nucleus, rng);
    Ok(Sampled {
        index,
        log_prob: logp[index],
    })
}

fn draw<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// `d/dθ log π(index) = (φ(index) - Σ_j p_j φ(j)) / temperature`.
pub fn log_prob_gradient(
    params: &PolicyParams,
    cset: &CandidateSet,
    index: usize,
    temperature: f64,
) -> Result<FeatureVector, PolicyError> {
    let probs = distribution(params, cset, temperature)?;
    let mut expected = FeatureVector::new();
    for (p, f) in probs.iter().zip(&cset.features) {
        expected.axpy(*p, f);
    }
    let mut grad = cset.features[index].clone();
    grad.axpy(-1.0, &expected);
    Ok(grad.scaled(1.0 / temperature))
}

/// `weights += learning_rate * scale * gradient`.
pub fn apply_update(
    params: &PolicyParams,
    gradient: &FeatureVector,
    scale: f64,
    learning_rate: f64,
) -> Result<PolicyParams, PolicyError> {
    let coef = learning_rate * scale;
    if !coef.is_finite() || !gradient.is_finite() {
        return Err(PolicyError::NonFiniteUpdate);
    }
    let mut weights = params.weights.clone();
    weights.axpy(coef, gradient);
    if !weights.is_finite() {
        return Err(PolicyError::NonFiniteUpdate);
    }
    Ok(PolicyParams {
        weights,
        step_count: params.step_count + 1,
    })
}
