//! Synthetic corpus with seen/unseen event-type splits, candidate-set
//! construction, and the JSON-lines interchange format.

mod candidates;
mod jsonl;
pub(crate) mod lexicon;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::events::{validate, EventInstance, EventList};
use crate::policy::CandidateSet;
use crate::schema::{EventSchema, EventTypeSpec, SchemaError};
use crate::scoring::{score_sample, F1Pair, MatchCriteria};

pub use candidates::build_candidates;
pub use jsonl::{load_jsonl, read_jsonl, save_jsonl, write_jsonl, JsonlError};

use lexicon::{Category, PREFIXES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Dev,
    HeldIn,
    HeldOut,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Dev, Split::HeldIn, Split::HeldOut];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::HeldIn => "held_in",
            Split::HeldOut => "held_out",
        }
    }

    /// Held-out samples are drawn from unseen types; all others from seen types.
    pub fn uses_unseen_types(&self) -> bool {
        matches!(self, Split::HeldOut)
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown split `{s}`"))
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub text: String,
    pub gold: EventList,
    pub split: Split,
    /// Fields not understood by this crate, kept for re-emission.
    pub extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seen_types: Vec<String>,
    pub unseen_types: Vec<String>,
    pub train_per_type: usize,
    pub dev_per_type: usize,
    pub held_in_per_type: usize,
    pub held_out_per_type: usize,
}

impl SplitPlan {
    pub const DEFAULT_SEEN: usize = 7;
    pub const DEFAULT_UNSEEN: usize = 19;

    /// Seen types are the first 7 declared types, unseen types the next 19.
    pub fn for_schema(schema: &EventSchema) -> Self {
        let names: Vec<String> = schema.type_names().map(str::to_string).collect();
        let seen_end = Self::DEFAULT_SEEN.min(names.len());
        let unseen_end = (seen_end + Self::DEFAULT_UNSEEN).min(names.len());
        Self {
            seen_types: names[..seen_end].to_vec(),
            unseen_types: names[seen_end..unseen_end].to_vec(),
            train_per_type: 50,
            dev_per_type: 10,
            held_in_per_type: 20,
            held_out_per_type: 20,
        }
    }

    pub fn per_type(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train_per_type,
            Split::Dev => self.dev_per_type,
            Split::HeldIn => self.held_in_per_type,
            Split::HeldOut => self.held_out_per_type,
        }
    }

    pub fn types_for(&self, split: Split) -> &[String] {
        if split.uses_unseen_types() {
            &self.unseen_types
        } else {
            &self.seen_types
        }
    }

    pub fn expected_count(&self, split: Split) -> usize {
        self.types_for(split).len() * self.per_type(split)
    }

    pub fn check(&self, schema: &EventSchema) -> Result<(), CorpusError> {
        for name in self.seen_types.iter().chain(&self.unseen_types) {
            if !schema.contains(name) {
                return Err(CorpusError::Schema(SchemaError::UnknownTypeName(name.clone())));
            }
        }
        let seen: BTreeSet<&String> = self.seen_types.iter().collect();
        if let Some(t) = self.unseen_types.iter().find(|t| seen.contains(t)) {
            return Err(CorpusError::InvalidPlan(format!("`{t}` is both seen and unseen")));
        }
        if seen.len() != self.seen_types.len()
            || self.unseen_types.iter().collect::<BTreeSet<_>>().len() != self.unseen_types.len()
        {
            return Err(CorpusError::InvalidPlan("duplicate type in plan".into()));
        }
        if Split::ALL.iter().any(|s| self.per_type(*s) == 0) {
            return Err(CorpusError::InvalidPlan("per-type counts must be positive".into()));
        }
        Ok(())
    }

    /// Schema shown to the model for samples of `split`.
    pub fn task_schema(&self, schema: &EventSchema, split: Split) -> Result<EventSchema, SchemaError> {
        schema.subset(self.types_for(split))
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("invalid split plan: {0}")]
    InvalidPlan(String),
}

/// The bundled 33-type schema: 7 seen types, then 19 unseen, then 7 spare.
pub const DEFAULT_SCHEMA: &str = include_str!("../../data/ace33.schema");

/// Deterministic 64-bit seed for a named sub-stream of `base`.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update(tag.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Fraction of samples that carry a second event of the same type.
pub const TWO_EVENT_RATE: f64 = 0.2;

pub fn generate_corpus(
    schema: &EventSchema,
    plan: &SplitPlan,
    seed: u64,
) -> Result<Vec<Sample>, CorpusError> {
    plan.check(schema)?;
    let mut out = Vec::new();
    for split in Split::ALL {
        let seen = !split.uses_unseen_types();
        for type_name in plan.types_for(split) {
            let spec = schema
                .lookup(type_name)
                .ok_or_else(|| SchemaError::UnknownTypeName(type_name.clone()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("{split}/{type_name}")));
            for i in 0..plan.per_type(split) {
                let (text, gold) = generate_sample(spec, seen, &mut rng);
                out.push(Sample {
                    id: format!("{split}-{type_name}-{i:03}"),
                    text,
                    gold,
                    split,
                    extra: Default::default(),
                });
            }
        }
    }
    Ok(out)
}

fn generate_sample(spec: &EventTypeSpec, seen: bool, rng: &mut ChaCha8Rng) -> (String, EventList) {
    let n_events = if rng.gen_bool(TWO_EVENT_RATE) { 2 } else { 1 };
    let triggers = lexicon::triggers(spec.name());
    let mut trigger_choice: Vec<usize> = (0..triggers.len()).collect();
    trigger_choice.shuffle(rng);
    let mut used_fillers: BTreeSet<&'static str> = BTreeSet::new();
    let mut phrases = Vec::new();
    let mut events = Vec::new();
    for k in 0..n_events {
        let trigger = triggers[trigger_choice[k]].to_string();
        let mut roles: Vec<&str> = spec
            .roles()
            .iter()
            .map(|r| r.name())
            .filter(|_| rng.gen_bool(0.6))
            .collect();
        if roles.is_empty() && !spec.roles().is_empty() {
            roles.push(spec.roles()[rng.gen_range(0..spec.roles().len())].name());
        }
        let mut ev = EventInstance::new(spec.name(), trigger.clone()).expect("valid type and trigger");
        let mut subject: Option<String> = None;
        let mut tail: Vec<String> = Vec::new();
        for role in roles {
            let cat = Category::of_role(role);
            let pool: Vec<&'static str> = cat
                .fillers(seen)
                .into_iter()
                .filter(|f| !used_fillers.contains(f))
                .collect();
            let n = if rng.gen_bool(0.1) { 2 } else { 1 };
            let fillers: Vec<&'static str> = pool.choose_multiple(rng, n).copied().collect();
            used_fillers.extend(&fillers);
            let joined = fillers.join(" and ");
            if subject.is_none() && cat.is_actor() {
                subject = Some(joined);
            } else {
                tail.push(format!("{} {joined}", cat.preposition()));
            }
            ev = ev.with_role(role, fillers).expect("valid role");
        }
        let mut phrase = String::new();
        if let Some(s) = subject {
            phrase.push_str(&s);
            phrase.push(' ');
        }
        phrase.push_str(&trigger);
        for t in tail {
            phrase.push(' ');
            phrase.push_str(&t);
        }
        phrases.push(phrase);
        events.push(ev);
    }
    let prefix = PREFIXES[rng.gen_range(0..PREFIXES.len())];
    let text = format!("{prefix} {}.", phrases.join(", and later "));
    (text, EventList::new(events))
}

/// A sample bundled with everything training and evaluation need: the task
/// schema it is posed under, its candidate set, and each candidate's scores
/// against gold (after validation).
#[derive(Debug, Clone)]
pub struct PreparedSample {
    pub id: String,
    pub text: String,
    pub gold: EventList,
    pub split: Split,
    pub schema: EventSchema,
    pub cset: CandidateSet,
    pub scores: Vec<F1Pair>,
}

impl PreparedSample {
    pub fn gold_index(&self) -> Option<usize> {
        self.cset.gold_index()
    }
}

pub fn prepare_sample(
    sample: &Sample,
    task_schema: &EventSchema,
    k_max: usize,
    seed: u64,
    criteria: MatchCriteria,
) -> PreparedSample {
    let cset = build_candidates(sample, task_schema, k_max, derive_seed(seed, &sample.id));
    let scores = cset
        .candidates()
        .iter()
        .map(|c| score_sample(&validate(c, task_schema).valid_events, &sample.gold, criteria))
        .collect();
    PreparedSample {
        id: sample.id.clone(),
        text: sample.text.clone(),
        gold: sample.gold.clone(),
        split: sample.split,
        schema: task_schema.clone(),
        cset,
        scores,
    }
}

/// Prepares every sample under the task schema its split implies.
pub fn prepare_corpus(
    samples: &[Sample],
    schema: &EventSchema,
    plan: &SplitPlan,
    k_max: usize,
    seed: u64,
) -> Result<Vec<PreparedSample>, SchemaError> {
    let seen = plan.task_schema(schema, Split::Train)?;
    let unseen = plan.task_schema(schema, Split::HeldOut)?;
    Ok(samples
        .iter()
        .map(|s| {
            let view = if s.split.uses_unseen_types() { &unseen } else { &seen };
            prepare_sample(s, view, k_max, seed, MatchCriteria::default())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_schema;

    pub(crate) fn ace() -> EventSchema {
        parse_schema(include_str!("../../data/ace33.schema")).unwrap()
    }

    #[test]
    fn ace_schema_shape() {
        let s = ace();
        assert_eq!(s.len(), 33);
        assert!(s.lookup("ArrestJail").is_some());
        let plan = SplitPlan::for_schema(&s);
        assert_eq!(plan.seen_types.len(), 7);
        assert_eq!(plan.unseen_types.len(), 19);
        assert_eq!(s.subset(&plan.seen_types).unwrap().len(), 7);
    }

    #[test]
    fn default_plan_counts() {
        let s = ace();
        let plan = SplitPlan::for_schema(&s);
        let corpus = generate_corpus(&s, &plan, 42).unwrap();
        let count = |sp: Split| corpus.iter().filter(|x| x.split == sp).count();
        assert_eq!(count(Split::Train), 350);
        assert_eq!(count(Split::Dev), 70);
        assert_eq!(count(Split::HeldIn), 140);
        assert_eq!(count(Split::HeldOut), 380);
    }

    #[test]
    fn gold_grounded_in_text() {
        let s = ace();
        let corpus = generate_corpus(&s, &SplitPlan::for_schema(&s), 3).unwrap();
        let mut two = 0;
        for sample in &corpus {
            assert!(!sample.gold.is_empty());
            two += usize::from(sample.gold.len() == 2);
            for ev in &sample.gold {
                assert!(sample.text.contains(ev.mention()), "{}", sample.id);
                for (_, f) in ev.arguments() {
                    assert!(sample.text.contains(f), "{}: {f}", sample.id);
                }
                assert!(validate(&EventList::new(vec![ev.clone()]), &s).is_clean());
            }
        }
        let rate = two as f64 / corpus.len() as f64;
        assert!((0.15..0.25).contains(&rate), "two-event rate {rate}");
    }

    #[test]
    fn split_hygiene() {
        let s = ace();
        let plan = SplitPlan::for_schema(&s);
        for sample in generate_corpus(&s, &plan, 11).unwrap() {
            let allowed = plan.types_for(sample.split);
            for ev in &sample.gold {
                assert!(allowed.iter().any(|t| t == ev.type_name()));
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let s = ace();
        let plan = SplitPlan::for_schema(&s);
        let a = generate_corpus(&s, &plan, 5).unwrap();
        assert_eq!(a, generate_corpus(&s, &plan, 5).unwrap());
        assert_ne!(a, generate_corpus(&s, &plan, 6).unwrap());
    }

    #[test]
    fn plan_errors() {
        let s = ace();
        let mut plan = SplitPlan::for_schema(&s);
        plan.unseen_types.push("Nope".into());
        assert!(matches!(
            generate_corpus(&s, &plan, 1),
            Err(CorpusError::Schema(SchemaError::UnknownTypeName(_)))
        ));
        let mut plan = SplitPlan::for_schema(&s);
        plan.unseen_types.push("Attack".into());
        assert!(matches!(generate_corpus(&s, &plan, 1), Err(CorpusError::InvalidPlan(_))));
        let mut plan = SplitPlan::for_schema(&s);
        plan.dev_per_type = 0;
        assert!(matches!(generate_corpus(&s, &plan, 1), Err(CorpusError::InvalidPlan(_))));
    }
}
