//! SFT initialization and the EventRL loop.
//!
//! Each EventRL step decodes greedily and scores the result. Below the
//! teacher-force threshold the step supervises on gold; otherwise it samples
//! from the nucleus and reinforces the sample by its clipped self-critical
//! advantage.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{derive_seed, PreparedSample};
use crate::events::{check_output, serialize_output, ErrorCounts, EventList, ValidationReport};
use crate::policy::{
    apply_update, content_hash, greedy_decode, log_prob, log_prob_gradient, nucleus_sample, DecodeSettings,
    FeatureVector, PolicyError, PolicyParams,
};
use crate::reward::{
    compute_advantage_with, reward_value, teacher_force_decision, AdvantageRecord, ClipMode, RewardKind, StepMode,
};
use crate::scoring::{micro_from_counts, sample_counts, F1Pair, MatchCriteria};

#[derive(Debug, Error)]
pub enum TrainerError {
    #[error("sample {0} has no gold candidate")]
    MissingGold(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Reals that may be the `±inf` sentinels the ablations use. JSON has no
/// infinity, so those are written as the strings `"inf"` and `"-inf"`.
mod extended_real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(serde::de::Error::custom(format!("expected a number, \"inf\" or \"-inf\", got {t:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub reward_kind: RewardKind,
    /// Teacher-force threshold.
    #[serde(with = "extended_real")]
    pub tau: f64,
    #[serde(with = "extended_real")]
    pub a_min: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub micro_batch: usize,
    pub global_batch: usize,
    pub decode: DecodeSettings,
    pub seed: u64,
    pub clip_mode: ClipMode,
    /// Multiplier on the gold gradient in teacher-force steps.
    pub tf_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            reward_kind: RewardKind::ProdF1,
            tau: 70.0,
            a_min: 10.0,
            learning_rate: 0.5,
            epochs: 10,
            micro_batch: 2,
            global_batch: 32,
            decode: DecodeSettings::default(),
            seed: 42,
            clip_mode: ClipMode::Literal,
            tf_scale: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn check(&self) -> Result<(), TrainerError> {
        let bad = |m: &str| Err(TrainerError::InvalidConfig(m.to_string()));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if self.micro_batch == 0 || self.global_batch == 0 {
            return bad("batch sizes must be positive");
        }
        if !self.global_batch.is_multiple_of(self.micro_batch) {
            return bad("micro_batch must divide global_batch");
        }
        if !(self.decode.temperature > 0.0 && self.decode.temperature.is_finite()) {
            return bad("temperature must be positive");
        }
        if self.decode.top_p.is_nan() || self.decode.top_p <= 0.0 {
            return bad("top_p must be positive");
        }
        if self.tau.is_nan() || self.a_min.is_nan() || !self.tf_scale.is_finite() {
            return bad("tau, a_min and tf_scale must be numbers");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ablation {
    pub no_teacher_force: bool,
    pub no_advantage_clip: bool,
}

/// Applies ablation toggles: without teacher forcing `tau` becomes `-inf`
/// so the threshold never fires; without clipping `a_min` becomes `-inf` so
/// clipping is the identity.
pub fn ablate(config: &TrainConfig, toggles: Ablation) -> TrainConfig {
    let mut out = *config;
    if toggles.no_teacher_force {
        out.tau = f64::NEG_INFINITY;
    }
    if toggles.no_advantage_clip {
        out.a_min = f64::NEG_INFINITY;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingStep {
    pub sample_id: String,
    pub mode: StepMode,
    pub greedy_reward: f64,
    pub sampled_reward: Option<f64>,
    /// Present for RL updates only.
    pub advantage: Option<AdvantageRecord>,
    /// Norm of the scaled gradient this step contributes.
    pub gradient_norm: f64,
    /// Gold index in teacher-force mode, the sampled index otherwise.
    pub chosen_index: usize,
}

#[derive(Serialize)]
struct StepLine<'a> {
    sample_id: &'a str,
    mode: StepMode,
    greedy_reward: f64,
    sampled_reward: Option<f64>,
    raw_advantage: Option<f64>,
    #[serde(serialize_with = "optional_extended_real")]
    clipped_advantage: Option<f64>,
    gradient_norm: f64,
}

fn optional_extended_real<S: serde::Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => extended_real::serialize(v, s),
        None => s.serialize_none(),
    }
}

impl TrainingStep {
    /// The step as one line of the training log.
    pub fn log_line(&self) -> String {
        let line = StepLine {
            sample_id: &self.sample_id,
            mode: self.mode,
            greedy_reward: self.greedy_reward,
            sampled_reward: self.sampled_reward,
            raw_advantage: self.advantage.map(|a| a.raw_advantage),
            clipped_advantage: self.advantage.map(|a| a.clipped_advantage),
            gradient_norm: self.gradient_norm,
        };
        serde_json::to_string(&line).expect("step lines serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub epoch: usize,
    pub mean_greedy_reward: f64,
    /// Mean over RL updates; `None` when every step was teacher-forced.
    pub mean_sampled_reward: Option<f64>,
    pub teacher_force_fraction: f64,
    pub dev: F1Pair,
    pub checkpoint_id: String,
}

impl EpochReport {
    pub fn log_line(&self) -> String {
        let mut value = serde_json::to_value(self).expect("epoch reports serialize");
        let map = value.as_object_mut().expect("struct serializes to an object");
        let mut line = serde_json::Map::new();
        line.insert("record".into(), "epoch".into());
        line.append(map);
        serde_json::to_string(&line).expect("epoch lines serialize")
    }
}

/// Greedy-decode quality of `params` on `samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub f1: F1Pair,
    pub errors: ErrorCounts,
    pub reports: Vec<ValidationReport>,
}

/// Greedy-decodes every sample and scores the decodes with [`evaluate_outputs`].
pub fn evaluate(
    params: &PolicyParams,
    samples: &[PreparedSample],
    criteria: MatchCriteria,
) -> Result<Evaluation, TrainerError> {
    let outputs: Vec<&EventList> = samples.iter().map(|s| greedy_decode(params, &s.cset).1).collect();
    evaluate_outputs(&outputs, samples, criteria)
}

/// Round-trips each output through its textual form, validates it against
/// its sample's task schema and micro-scores what survives validation.
pub fn evaluate_outputs(
    outputs: &[&EventList],
    samples: &[PreparedSample],
    criteria: MatchCriteria,
) -> Result<Evaluation, TrainerError> {
    let mut counts = Vec::with_capacity(samples.len());
    let mut reports = Vec::with_capacity(samples.len());
    for (output, s) in outputs.iter().zip(samples) {
        let report = check_output(&serialize_output(output), &s.schema);
        counts.push(sample_counts(&report.valid_events, &s.gold, criteria));
        reports.push(report);
    }
    let f1 = micro_from_counts(counts).map_err(|_| TrainerError::EmptyCorpus)?;
    let errors = reports.iter().map(ErrorCounts::from).sum();
    Ok(Evaluation { f1, errors, reports })
}

fn gold_of(sample: &PreparedSample) -> Result<usize, TrainerError> {
    sample
        .gold_index()
        .ok_or_else(|| TrainerError::MissingGold(sample.id.clone()))
}

fn shuffled_order(n: usize, seed: u64, tag: &str, epoch: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("{tag}/epoch/{epoch}")));
    order.shuffle(&mut rng);
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SftConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Temperature of the distribution whose NLL is minimized.
    pub temperature: f64,
}

impl Default for SftConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            learning_rate: 0.1,
            seed: 42,
            temperature: 1.0,
        }
    }
}

/// Mean gold NLL over `corpus`.
pub fn mean_nll(params: &PolicyParams, corpus: &[PreparedSample], temperature: f64) -> Result<f64, TrainerError> {
    if corpus.is_empty() {
        return Err(TrainerError::EmptyCorpus);
    }
    let mut total = 0.0;
    for s in corpus {
        total -= log_prob(params, &s.cset, gold_of(s)?, temperature)?;
    }
    Ok(total / corpus.len() as f64)
}

/// Per-sample gradient descent on `-log π(gold)`, one seeded shuffled pass per
/// epoch. Returns the final params and the corpus mean NLL after each epoch.
pub fn sft_train(
    params: &PolicyParams,
    corpus: &[PreparedSample],
    config: &SftConfig,
) -> Result<(PolicyParams, Vec<f64>), TrainerError> {
    if corpus.is_empty() {
        return Err(TrainerError::EmptyCorpus);
    }
    let gold: Vec<usize> = corpus.iter().map(gold_of).collect::<Result<_, _>>()?;
    let mut params = params.clone();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        for i in shuffled_order(corpus.len(), config.seed, "sft", epoch) {
            let g = log_prob_gradient(&params, &corpus[i].cset, gold[i], config.temperature)?;
            params = apply_update(&params, &g, 1.0, config.learning_rate)?;
        }
        history.push(mean_nll(&params, corpus, config.temperature)?);
    }
    Ok((params, history))
}

/// The scaled gradient one sample contributes, without applying it.
pub fn step_gradient<R: Rng + ?Sized>(
    params: &PolicyParams,
    sample: &PreparedSample,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<(FeatureVector, TrainingStep), TrainerError> {
    let gold = gold_of(sample)?;
    let t = config.decode.temperature;
    let (greedy, _) = greedy_decode(params, &sample.cset);
    let greedy_reward = reward_value(&sample.scores[greedy], config.reward_kind);
    let mode = teacher_force_decision(greedy_reward, config.tau);

    let (gradient, sampled_reward, advantage, chosen_index) = match mode {
        StepMode::TeacherForce => {
            let g = log_prob_gradient(params, &sample.cset, gold, t)?.scaled(config.tf_scale);
            (g, None, None, gold)
        }
        StepMode::RlUpdate => {
            let drawn = nucleus_sample(params, &sample.cset, config.decode, rng)?;
            let sampled = reward_value(&sample.scores[drawn.index], config.reward_kind);
            let adv = compute_advantage_with(sampled, greedy_reward, config.a_min, config.clip_mode);
            let g = log_prob_gradient(params, &sample.cset, drawn.index, t)?.scaled(adv.clipped_advantage / 100.0);
            (g, Some(sampled), Some(adv), drawn.index)
        }
    };
    if !gradient.is_finite() {
        return Err(PolicyError::NonFiniteUpdate.into());
    }
    let step = TrainingStep {
        sample_id: sample.id.clone(),
        mode,
        greedy_reward,
        sampled_reward,
        advantage,
        gradient_norm: gradient.norm(),
        chosen_index,
    };
    Ok((gradient, step))
}

/// One EventRL update on a single sample.
pub fn eventrl_step<R: Rng + ?Sized>(
    params: &PolicyParams,
    sample: &PreparedSample,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<(PolicyParams, TrainingStep), TrainerError> {
    let (gradient, step) = step_gradient(params, sample, config, rng)?;
    let next = apply_update(params, &gradient, 1.0, config.learning_rate)?;
    Ok((next, step))
}

/// Applies one global batch: every per-sample gradient is computed at
/// `params`, summed per micro-batch, and the total is averaged over the
/// batch before a single update.
pub fn batch_update<R: Rng + ?Sized>(
    params: &PolicyParams,
    batch: &[&PreparedSample],
    config: &TrainConfig,
    rng: &mut R,
) -> Result<(PolicyParams, Vec<TrainingStep>), TrainerError> {
    let mut total = FeatureVector::new();
    let mut steps = Vec::with_capacity(batch.len());
    for micro in batch.chunks(config.micro_batch) {
        let mut acc = FeatureVector::new();
        for sample in micro {
            let (g, step) = step_gradient(params, sample, config, rng)?;
            acc.axpy(1.0, &g);
            steps.push(step);
        }
        total.axpy(1.0, &acc);
    }
    let next = apply_update(params, &total, 1.0 / batch.len() as f64, config.learning_rate)?;
    Ok((next, steps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Epoch checkpoint with the best dev AVG F1, earliest on ties; the
    /// initial params when there were no epochs.
    pub params: PolicyParams,
    pub reports: Vec<EpochReport>,
    /// Steps of each epoch, in execution order.
    pub steps: Vec<Vec<TrainingStep>>,
    pub initial_dev: F1Pair,
    pub best_epoch: Option<usize>,
}

impl TrainOutcome {
    /// The JSON-lines log: each epoch's steps followed by its report.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for (steps, report) in self.steps.iter().zip(&self.reports) {
            for s in steps {
                out.push_str(&s.log_line());
                out.push('\n');
            }
            out.push_str(&report.log_line());
            out.push('\n');
        }
        out
    }
}

fn epoch_report(epoch: usize, steps: &[TrainingStep], dev: F1Pair, params: &PolicyParams) -> EpochReport {
    let n = steps.len() as f64;
    let mean_greedy_reward = steps.iter().map(|s| s.greedy_reward).sum::<f64>() / n;
    let sampled: Vec<f64> = steps.iter().filter_map(|s| s.sampled_reward).collect();
    let mean_sampled_reward = (!sampled.is_empty()).then(|| sampled.iter().sum::<f64>() / sampled.len() as f64);
    let tf = steps.iter().filter(|s| s.mode == StepMode::TeacherForce).count();
    EpochReport {
        epoch,
        mean_greedy_reward,
        mean_sampled_reward,
        teacher_force_fraction: tf as f64 / n,
        dev,
        checkpoint_id: content_hash(params),
    }
}

/// Runs `config.epochs` seeded shuffled passes of batched EventRL updates,
/// evaluating on `dev` after each epoch.
pub fn eventrl_train(
    params: &PolicyParams,
    corpus: &[PreparedSample],
    dev: &[PreparedSample],
    config: &TrainConfig,
) -> Result<TrainOutcome, TrainerError> {
    config.check()?;
    if corpus.is_empty() || dev.is_empty() {
        return Err(TrainerError::EmptyCorpus);
    }
    for s in corpus {
        gold_of(s)?;
    }
    let criteria = MatchCriteria::default();
    let initial_dev = evaluate(params, dev, criteria)?.f1;
    let mut best: Option<(PolicyParams, f64, usize)> = None;
    let mut current = params.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "eventrl/sampling"));
    let mut reports = Vec::with_capacity(config.epochs);
    let mut all_steps = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let order = shuffled_order(corpus.len(), config.seed, "eventrl", epoch);
        let mut steps = Vec::with_capacity(corpus.len());
        for chunk in order.chunks(config.global_batch) {
            let batch: Vec<&PreparedSample> = chunk.iter().map(|&i| &corpus[i]).collect();
            let (next, batch_steps) = batch_update(&current, &batch, config, &mut rng)?;
            current = next;
            steps.extend(batch_steps);
        }
        let dev_f1 = evaluate(&current, dev, criteria)?.f1;
        if best.as_ref().is_none_or(|b| dev_f1.average() > b.1) {
            best = Some((current.clone(), dev_f1.average(), epoch));
        }
        reports.push(epoch_report(epoch, &steps, dev_f1, &current));
        all_steps.push(steps);
    }
    let (best_params, best_epoch) = match best {
        Some((p, _, e)) => (p, Some(e)),
        None => (params.clone(), None),
    };
    Ok(TrainOutcome {
        params: best_params,
        reports,
        steps: all_steps,
        initial_dev,
        best_epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::EventInstance;
    use crate::policy::CandidateSet;
    use crate::schema::parse_schema;
    use crate::scoring::score_sample;

    fn toy_sample(weights_gold: f64) -> (PolicyParams, PreparedSample) {
        let schema = parse_schema(r#"event Attack "a" { attacker: list "x"; }"#).unwrap();
        let gold = EventList::new(vec![EventInstance::new("Attack", "bombed")
            .unwrap()
            .with_role("attacker", ["rebels"])
            .unwrap()]);
        let wrong = EventList::new(vec![EventInstance::new("Attack", "bombed").unwrap()]);
        let candidates = vec![EventList::default(), wrong, gold.clone()];
        let mut feats = vec![FeatureVector::new(), FeatureVector::new(), FeatureVector::new()];
        feats[0].add("a", 1.0);
        feats[1].add("b", 1.0);
        feats[2].add("c", 1.0);
        let cset = CandidateSet::new(candidates, feats, Some(2)).unwrap();
        let scores = cset
            .candidates()
            .iter()
            .map(|c| score_sample(c, &gold, MatchCriteria::default()))
            .collect();
        let mut params = PolicyParams::new();
        params.weights.add("c", weights_gold);
        let sample = PreparedSample {
            id: "toy".into(),
            text: "rebels bombed".into(),
            gold,
            split: crate::corpus::Split::Train,
            schema,
            cset,
            scores,
        };
        (params, sample)
    }

    #[test]
    fn nll_of_half_is_ln2() {
        // Logits (0, 0, ln 2) give gold probability 2 / 4.
        let (params, sample) = toy_sample(2f64.ln());
        let nll = mean_nll(&params, std::slice::from_ref(&sample), 1.0).unwrap();
        assert!((nll - 2f64.ln()).abs() < 1e-4, "{nll}");
    }

    #[test]
    fn teacher_force_below_tau() {
        let (params, sample) = toy_sample(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let config = TrainConfig::default();
        // Greedy is index 0 (empty output), reward 0.
        let (next, step) = eventrl_step(&params, &sample, &config, &mut rng).unwrap();
        assert_eq!(step.mode, StepMode::TeacherForce);
        assert_eq!(step.chosen_index, 2);
        assert!(step.advantage.is_none());
        let expected = log_prob_gradient(&params, &sample.cset, 2, 0.5).unwrap().scaled(0.1);
        assert!((step.gradient_norm - expected.norm()).abs() < 1e-15);
        assert_eq!(next.step_count, 1);
    }

    #[test]
    fn rl_when_greedy_clears_tau() {
        let (params, sample) = toy_sample(20.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, step) = eventrl_step(&params, &sample, &TrainConfig::default(), &mut rng).unwrap();
        assert_eq!(step.mode, StepMode::RlUpdate);
        let adv = step.advantage.unwrap();
        assert_eq!(adv.raw_advantage, 0.0);
        assert_eq!(adv.clipped_advantage, 10.0);
    }

    #[test]
    fn no_teacher_force_always_rl() {
        let (params, sample) = toy_sample(0.0);
        let config = ablate(
            &TrainConfig::default(),
            Ablation {
                no_teacher_force: true,
                no_advantage_clip: false,
            },
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, step) = eventrl_step(&params, &sample, &config, &mut rng).unwrap();
        assert_eq!(step.greedy_reward, 0.0);
        assert_eq!(step.mode, StepMode::RlUpdate);
    }

    #[test]
    fn config_json_keeps_sentinels() {
        let config = ablate(
            &TrainConfig::default(),
            Ablation {
                no_teacher_force: true,
                no_advantage_clip: true,
            },
        );
        let json = serde_json::to_string(&config).unwrap();
        assert!(json.contains(r#""tau":"-inf""#), "{json}");
        let back: TrainConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn config_checks() {
        let with = |micro_batch| TrainConfig {
            micro_batch,
            ..TrainConfig::default()
        };
        assert!(with(3).check().is_err());
        assert!(with(4).check().is_ok());
    }

    #[test]
    fn epoch_line_is_tagged() {
        let r = EpochReport {
            epoch: 0,
            mean_greedy_reward: 1.0,
            mean_sampled_reward: None,
            teacher_force_fraction: 0.5,
            dev: F1Pair::from_scores(1.0, 2.0),
            checkpoint_id: "x".into(),
        };
        assert!(r.log_line().starts_with(r#"{"record":"epoch","epoch":0,"#));
    }
}
