use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lexicon::{INVENTED_TYPES, STRAY_ROLES, TRIGGERS};
use super::Sample;
use crate::events::{serialize_output, validate, EventInstance, EventList};
use crate::policy::CandidateSet;
use crate::schema::EventSchema;

/// Distractor types per event that lie outside the task schema.
const OUTSIDE_TYPES_PER_EVENT: usize = 6;

fn text_words(text: &str) -> Vec<String> {
    let mut seen = BTreeSet::new();
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty() && seen.insert(w.to_string()))
        .map(str::to_string)
        .collect()
}

fn replace_event(gold: &EventList, i: usize, ev: EventInstance) -> EventList {
    let mut out = gold.clone();
    out.events[i] = ev;
    out
}

/// All single-edit perturbations of `gold`.
fn perturbations(
    sample: &Sample,
    schema: &EventSchema,
    rng: &mut ChaCha8Rng,
) -> Vec<EventList> {
    let gold = &sample.gold;
    let words = text_words(&sample.text);
    let all_fillers: Vec<&str> = gold.iter().flat_map(|e| e.arguments().map(|(_, f)| f)).collect();
    let mut outside: Vec<&str> = TRIGGERS
        .iter()
        .map(|(t, _)| *t)
        .chain(INVENTED_TYPES.iter().copied())
        .filter(|t| !schema.contains(t))
        .collect();
    let mut out = Vec::new();

    for (i, ev) in gold.iter().enumerate() {
        // Swap to another defined type, keeping the roles it shares.
        for other in schema.types() {
            if other.name() == ev.type_name {
                continue;
            }
            let mut swapped = ev.clone();
            swapped.type_name = other.name().to_string();
            swapped.args.retain(|(r, _)| other.has_role(r));
            out.push(replace_event(gold, i, swapped));
        }
        // Swap to a type the schema does not define.
        outside.shuffle(rng);
        for t in outside.iter().take(OUTSIDE_TYPES_PER_EVENT) {
            let mut swapped = ev.clone();
            swapped.type_name = t.to_string();
            out.push(replace_event(gold, i, swapped));
        }
        let defined = schema.lookup(&ev.type_name);
        let stray: Vec<&str> = STRAY_ROLES
            .iter()
            .copied()
            .filter(|r| !defined.is_some_and(|s| s.has_role(r)) && ev.fillers(r).is_none())
            .collect();
        for (j, (_, fillers)) in ev.args.iter().enumerate() {
            let mut dropped = ev.clone();
            dropped.args.remove(j);
            out.push(replace_event(gold, i, dropped));

            // Relabel an argument with a role the type does not define.
            if let Some(new_role) = stray.choose(rng) {
                let mut renamed = ev.clone();
                renamed.args[j].0 = new_role.to_string();
                out.push(replace_event(gold, i, renamed));
            }

            let alternatives: Vec<&str> = all_fillers
                .iter()
                .copied()
                .chain(words.iter().map(String::as_str))
                .filter(|f| !fillers.iter().any(|g| g == f) && *f != ev.mention)
                .collect();
            if let Some(f) = alternatives.choose(rng) {
                let mut swapped = ev.clone();
                swapped.args[j].1[0] = f.to_string();
                out.push(replace_event(gold, i, swapped));
            }
        }
        // Add a role the type does not define.
        for new_role in stray.choose_multiple(rng, 2) {
            if let Some(f) = words.choose(rng) {
                let mut added = ev.clone();
                added.args.push((new_role.to_string(), vec![f.clone()]));
                out.push(replace_event(gold, i, added));
            }
        }
        // Point the trigger at another word of the text.
        let others: Vec<&String> = words.iter().filter(|w| **w != ev.mention).collect();
        for w in others.choose_multiple(rng, 2) {
            let mut swapped = ev.clone();
            swapped.mention = (*w).clone();
            out.push(replace_event(gold, i, swapped));
        }
        if gold.len() > 1 {
            let mut fewer = gold.clone();
            fewer.events.remove(i);
            out.push(fewer);
        }
    }
    out
}

/// Candidate outputs for `sample`: gold, the empty output, and perturbations
/// of gold (type swaps inside and outside `schema`, role drops, stray roles,
/// filler and trigger swaps). Gold is always kept; when `k_max >= 8` at least
/// one undefined-type and one structural-mismatch candidate are kept too.
pub fn build_candidates(sample: &Sample, schema: &EventSchema, k_max: usize, seed: u64) -> CandidateSet {
    let k_max = k_max.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gold = sample.gold.clone();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(serialize_output(&gold));

    let mut chosen = vec![gold.clone()];
    let empty = EventList::default();
    if k_max >= 2 && seen.insert(serialize_output(&empty)) {
        chosen.push(empty);
    }

    let mut pool: Vec<EventList> = perturbations(sample, schema, &mut rng)
        .into_iter()
        .filter(|c| seen.insert(serialize_output(c)))
        .collect();
    pool.shuffle(&mut rng);

    if k_max >= 8 {
        let undefined = pool
            .iter()
            .position(|c| !validate(c, schema).undefined_type_errors.is_empty());
        if let Some(i) = undefined {
            chosen.push(pool.remove(i));
        }
        let mismatch = pool
            .iter()
            .position(|c| !validate(c, schema).mismatch_errors.is_empty());
        if let Some(i) = mismatch {
            chosen.push(pool.remove(i));
        }
    }
    let room = k_max.saturating_sub(chosen.len());
    chosen.extend(pool.into_iter().take(room));
    chosen.truncate(k_max);

    chosen.shuffle(&mut rng);
    let gold_index = chosen.iter().position(|c| *c == gold).expect("gold retained");
    CandidateSet::with_features(&sample.text, schema, chosen, Some(gold_index))
        .expect("candidates are distinct and nonempty")
}
