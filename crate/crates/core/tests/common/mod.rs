#![allow(dead_code)]

use eventrl::corpus::{generate_corpus, prepare_corpus, PreparedSample, Sample, Split, SplitPlan, DEFAULT_SCHEMA};
use eventrl::events::{EventInstance, EventList};
use eventrl::policy::{CandidateSet, FeatureVector, PolicyParams, DEFAULT_K_MAX};
use eventrl::schema::{parse_schema, EventSchema};
use eventrl::scoring::{ArgumentMode, MatchCriteria, TriggerMode};
use rand::seq::SliceRandom;
use rand::Rng;

/// Published reference scores: trigger, argument and AVG for held-in, then
/// the same for held-out.
pub const REPORTED_SCORES: &[(&str, [f64; 6])] = &[
    ("GPT4 + FSP (0-Shot)", [6.04, 22.08, 14.06, 15.42, 17.69, 16.56]),
    ("GPT4 + FSP (1-Shot)", [23.02, 22.82, 22.92, 19.32, 17.83, 18.58]),
    ("GPT4 + FSP (2-Shot)", [24.65, 23.48, 24.06, 24.12, 18.31, 21.22]),
    ("GPT4 + FSP (3-Shot)", [31.58, 23.53, 27.55, 27.07, 18.61, 22.84]),
    ("LLaMa-7B + SFT", [71.33, 40.74, 56.03, 48.51, 26.18, 37.35]),
    ("LLaMa-7B + EventRL (Arg-F1)", [73.06, 42.34, 57.70, 51.15, 29.32, 40.23]),
    ("LLaMa-7B + EventRL (AVG-F1)", [72.34, 42.29, 57.32, 54.59, 29.81, 42.20]),
    ("LLaMa-7B + EventRL (Prod-F1)", [72.03, 49.41, 60.72, 51.71, 29.97, 40.84]),
    ("LLaMa-13B + SFT", [76.23, 51.16, 63.69, 51.61, 32.46, 42.04]),
    ("LLaMa-13B + EventRL (Arg-F1)", [77.61, 51.93, 64.77, 53.07, 32.83, 42.95]),
    ("LLaMa-13B + EventRL (AVG-F1)", [77.26, 54.55, 65.90, 51.53, 34.93, 43.23]),
    ("LLaMa-13B + EventRL (Prod-F1)", [76.23, 51.66, 63.94, 53.79, 35.03, 44.41]),
    ("CodeLLaMa-7B + SFT", [74.31, 44.16, 59.23, 62.21, 37.26, 49.74]),
    ("CodeLLaMa-7B + EventRL (Arg-F1)", [75.35, 50.84, 63.09, 61.64, 37.93, 49.78]),
    ("CodeLLaMa-7B + EventRL (AVG-F1)", [77.14, 47.06, 62.10, 61.62, 39.01, 50.32]),
    ("CodeLLaMa-7B + EventRL (Prod-F1)", [76.60, 48.39, 62.49, 60.34, 39.69, 50.01]),
    ("CodeLLaMa-13B + SFT", [77.70, 47.21, 62.46, 61.40, 41.98, 51.69]),
    ("CodeLLaMa-13B + EventRL (Arg-F1)", [80.88, 50.51, 65.69, 62.56, 41.39, 51.97]),
    ("CodeLLaMa-13B + EventRL (AVG-F1)", [76.98, 48.18, 62.58, 60.86, 42.37, 51.62]),
    ("CodeLLaMa-13B + EventRL (Prod-F1)", [77.03, 50.78, 63.91, 62.57, 42.14, 52.35]),
    ("CodeLLaMa-34B + SFT", [74.65, 56.69, 65.67, 57.98, 39.52, 48.75]),
];

pub fn ace() -> EventSchema {
    parse_schema(DEFAULT_SCHEMA).unwrap()
}

pub struct Seeded {
    pub schema: EventSchema,
    pub plan: SplitPlan,
    pub samples: Vec<Sample>,
    pub prepared: Vec<PreparedSample>,
}

impl Seeded {
    pub fn split(&self, split: Split) -> Vec<PreparedSample> {
        self.prepared.iter().filter(|s| s.split == split).cloned().collect()
    }
}

/// The default corpus at `seed`, prepared with the default candidate budget.
pub fn seeded(seed: u64) -> Seeded {
    let schema = ace();
    let plan = SplitPlan::for_schema(&schema);
    let samples = generate_corpus(&schema, &plan, seed).unwrap();
    let prepared = prepare_corpus(&samples, &schema, &plan, DEFAULT_K_MAX, seed).unwrap();
    Seeded {
        schema,
        plan,
        samples,
        prepared,
    }
}

// ---- scoring oracle ----

fn trigger_items(events: &EventList, mode: TriggerMode) -> Vec<(String, Option<String>)> {
    events
        .iter()
        .map(|e| {
            let mention = (mode == TriggerMode::TypeAndMention).then(|| e.mention().to_string());
            (e.type_name().to_string(), mention)
        })
        .collect()
}

fn argument_items(events: &EventList, mode: ArgumentMode) -> Vec<(String, String, Option<String>)> {
    let mut out = Vec::new();
    for e in events.iter() {
        for (role, fillers) in e.args() {
            for f in fillers {
                let filler = (mode == ArgumentMode::TypeRoleAndFiller).then(|| f.clone());
                out.push((e.type_name().to_string(), role.clone(), filler));
            }
        }
    }
    out
}

/// Size of a maximum one-to-one matching between `pred` and `gold` where
/// items match when equal, by dynamic programming over subsets of `gold`.
pub fn max_matching<T: PartialEq>(pred: &[T], gold: &[T]) -> usize {
    assert!(gold.len() <= 20, "oracle is exponential in gold size");
    let full = 1usize << gold.len();
    // best[mask] = largest matching of the first i preds using exactly gold set `mask`.
    let mut best = vec![i64::MIN; full];
    best[0] = 0;
    for p in pred {
        let mut next = best.clone();
        for (mask, &here) in best.iter().enumerate() {
            if here == i64::MIN {
                continue;
            }
            for (j, g) in gold.iter().enumerate() {
                if mask & (1 << j) == 0 && p == g {
                    let m = mask | (1 << j);
                    next[m] = next[m].max(here + 1);
                }
            }
        }
        best = next;
    }
    best.into_iter().max().unwrap() as usize
}

pub fn oracle_f1(tp: usize, pred: usize, gold: usize) -> f64 {
    if pred == 0 && gold == 0 {
        return 100.0;
    }
    let p = if pred == 0 { 0.0 } else { tp as f64 / pred as f64 };
    let r = if gold == 0 { 0.0 } else { tp as f64 / gold as f64 };
    if p + r == 0.0 {
        0.0
    } else {
        100.0 * 2.0 * p * r / (p + r)
    }
}

/// `(trigger (tp, pred, gold), argument (tp, pred, gold))` by exhaustive matching.
pub fn oracle_counts(
    pred: &EventList,
    gold: &EventList,
    criteria: MatchCriteria,
) -> ((usize, usize, usize), (usize, usize, usize)) {
    let (tp, tg) = (
        trigger_items(pred, criteria.trigger_mode),
        trigger_items(gold, criteria.trigger_mode),
    );
    let (ap, ag) = (
        argument_items(pred, criteria.argument_mode),
        argument_items(gold, criteria.argument_mode),
    );
    (
        (max_matching(&tp, &tg), tp.len(), tg.len()),
        (max_matching(&ap, &ag), ap.len(), ag.len()),
    )
}

/// A random event list over a tiny vocabulary so that collisions are common.
pub fn random_events<R: Rng>(rng: &mut R, max_events: usize) -> EventList {
    const TYPES: &[&str] = &["Attack", "Die", "Meet"];
    const WORDS: &[&str] = &["a", "b", "c"];
    const ROLES: &[&str] = &["agent", "place", "victim"];
    let n = rng.gen_range(0..=max_events);
    let mut events = Vec::with_capacity(n);
    for _ in 0..n {
        let mut ev = EventInstance::new(*TYPES.choose(rng).unwrap(), *WORDS.choose(rng).unwrap()).unwrap();
        // At most two fillers per event keeps the oracle's subset DP small.
        let roles = rng.gen_range(0..=2);
        for role in ROLES.choose_multiple(rng, roles) {
            let k = if roles == 1 { rng.gen_range(1..=2) } else { 1 };
            let fillers: Vec<&str> = WORDS.choose_multiple(rng, k).copied().collect();
            ev = ev.with_role(*role, fillers).unwrap();
        }
        events.push(ev);
    }
    EventList::new(events)
}

// ---- policy helpers ----

/// A candidate set of `n` distinct placeholder outputs with random dense
/// features over `dim` named features.
pub fn random_cset<R: Rng>(rng: &mut R, n: usize, dim: usize) -> CandidateSet {
    let candidates: Vec<EventList> = (0..n)
        .map(|i| EventList::new(vec![EventInstance::new("T", format!("m{i}")).unwrap()]))
        .collect();
    let features = (0..n)
        .map(|_| {
            let mut f = FeatureVector::new();
            for d in 0..dim {
                if rng.gen_bool(0.7) {
                    f.add(&format!("f{d}"), rng.gen_range(-1.0..1.0));
                }
            }
            f
        })
        .collect();
    CandidateSet::new(candidates, features, Some(0)).unwrap()
}

pub fn random_params<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> PolicyParams {
    let mut p = PolicyParams::new();
    for d in 0..dim {
        p.weights.add(&format!("f{d}"), rng.gen_range(-scale..scale));
    }
    p
}

/// Softmax of `logits / t` computed directly, independent of the library.
pub fn reference_softmax(logits: &[f64], t: f64) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| ((l - max) / t).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Top-p truncation: sort descending (stable), keep the shortest prefix with
/// mass at least `top_p`, renormalize.
pub fn reference_nucleus(probs: &[f64], top_p: f64) -> Vec<f64> {
    if top_p >= 1.0 {
        return probs.to_vec();
    }
    let mut idx: Vec<usize> = (0..probs.len()).collect();
    idx.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).unwrap());
    let mut keep = vec![false; probs.len()];
    let mut mass = 0.0;
    for i in idx {
        keep[i] = true;
        mass += probs[i];
        if mass >= top_p {
            break;
        }
    }
    probs
        .iter()
        .zip(&keep)
        .map(|(p, k)| if *k { p / mass } else { 0.0 })
        .collect()
}

/// Central finite-difference gradient of `log π(index)` w.r.t. each named weight.
pub fn finite_difference(
    params: &PolicyParams,
    cset: &CandidateSet,
    index: usize,
    temperature: f64,
    names: &[String],
    h: f64,
) -> Vec<f64> {
    let logp = |p: &PolicyParams| {
        let logits: Vec<f64> = cset.features().iter().map(|f| p.weights.dot(f)).collect();
        reference_softmax(&logits, temperature)[index].ln()
    };
    names
        .iter()
        .map(|name| {
            let mut plus = params.clone();
            plus.weights.add(name, h);
            let mut minus = params.clone();
            minus.weights.add(name, -h);
            (logp(&plus) - logp(&minus)) / (2.0 * h)
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

// ---- artifact generators ----

fn random_ident<R: Rng>(rng: &mut R) -> String {
    const FIRST: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    const REST: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_";
    let len = rng.gen_range(0..8);
    let mut s = String::new();
    s.push(*FIRST.choose(rng).unwrap() as char);
    for _ in 0..len {
        s.push(*REST.choose(rng).unwrap() as char);
    }
    s
}

/// Text exercising escapes, `#`, braces, unicode and inner whitespace.
fn random_text<R: Rng>(rng: &mut R, allow_empty: bool) -> String {
    const PIECES: &[&str] = &[
        "a", "bombed", " ", "\"", "\\", "#", "{", "}", "(", ")", "[", "]", ",", ";", "=", "é", "事件", "\t", "\n",
        "x y",
    ];
    let min = usize::from(!allow_empty);
    let n = rng.gen_range(min..6);
    let s: String = (0..n).map(|_| *PIECES.choose(rng).unwrap()).collect();
    s
}

/// A random schema. Guidelines and descriptions are trimmed the way the
/// parser trims them, so the schema is in canonical form.
pub fn random_schema<R: Rng>(rng: &mut R) -> EventSchema {
    use eventrl::schema::{EventTypeSpec, RoleSpec};
    let n = rng.gen_range(0..5);
    let mut types: Vec<EventTypeSpec> = Vec::new();
    while types.len() < n {
        let name = random_ident(rng);
        if types.iter().any(|t| t.name() == name) {
            continue;
        }
        let mut roles: Vec<RoleSpec> = Vec::new();
        for _ in 0..rng.gen_range(0..4) {
            let role = random_ident(rng);
            if role == "mention" || roles.iter().any(|r| r.name() == role) {
                continue;
            }
            roles.push(RoleSpec::new(role, random_text(rng, true)).unwrap());
        }
        types.push(EventTypeSpec::new(name, random_text(rng, true), roles).unwrap());
    }
    EventSchema::new(types).unwrap()
}

/// A random output with identifiers and strings that need escaping.
pub fn random_output<R: Rng>(rng: &mut R) -> EventList {
    let n = rng.gen_range(0..4);
    let mut events = Vec::with_capacity(n);
    for _ in 0..n {
        let mut ev = EventInstance::new(random_ident(rng), random_text(rng, false)).unwrap();
        let mut used: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(0..4) {
            let role = random_ident(rng);
            if role == "mention" || used.contains(&role) {
                continue;
            }
            used.push(role.clone());
            let k = rng.gen_range(1..4);
            let fillers: Vec<String> = (0..k).map(|_| random_text(rng, false)).collect();
            ev = ev.with_role(role, fillers).unwrap();
        }
        events.push(ev);
    }
    EventList::new(events)
}
