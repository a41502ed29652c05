use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::events::EventList;
use crate::schema::EventSchema;

/// Stable 64-bit id of a feature string (leading bytes of its SHA-256).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(pub u64);

impl FeatureId {
    pub fn of(name: &str) -> Self {
        let digest = Sha256::digest(name.as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        FeatureId(u64::from_be_bytes(bytes))
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    name: Arc<str>,
    value: f64,
}

/// Sparse vector over hashed features. The readable name is kept next to
/// every value so weights can be written out as text. Exact zeros are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: BTreeMap<FeatureId, Entry>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: FeatureId) -> f64 {
        self.entries.get(&id).map_or(0.0, |e| e.value)
    }

    pub fn get_named(&self, name: &str) -> f64 {
        self.get(FeatureId::of(name))
    }

    /// Adds `value` to the named feature.
    pub fn add(&mut self, name: &str, value: f64) {
        self.add_id(FeatureId::of(name), || Arc::from(name), value);
    }

    fn add_id(&mut self, id: FeatureId, name: impl FnOnce() -> Arc<str>, value: f64) {
        if value == 0.0 {
            return;
        }
        match self.entries.get_mut(&id) {
            Some(e) => {
                e.value += value;
                if e.value == 0.0 {
                    self.entries.remove(&id);
                }
            }
            None => {
                self.entries.insert(
                    id,
                    Entry {
                        name: name(),
                        value,
                    },
                );
            }
        }
    }

    /// `self += coef * other`
    pub fn axpy(&mut self, coef: f64, other: &FeatureVector) {
        for (id, e) in &other.entries {
            self.add_id(*id, || e.name.clone(), coef * e.value);
        }
    }

    pub fn scaled(&self, coef: f64) -> FeatureVector {
        let mut out = FeatureVector::new();
        out.axpy(coef, self);
        out
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .map(|(id, e)| e.value * large.get(*id))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|e| e.value * e.value).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.values().all(|e| e.value.is_finite())
    }

    pub fn ids(&self) -> impl Iterator<Item = FeatureId> + '_ {
        self.entries.keys().copied()
    }

    /// `(id, name, value)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, &str, f64)> + '_ {
        self.entries
            .iter()
            .map(|(id, e)| (*id, e.name.as_ref(), e.value))
    }
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

fn words(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Features of one candidate output for one input. The schema is part of the
/// input: the guidelines shown to the model decide which types and roles are
/// defined and which triggers a type's guideline lists.
pub fn extract_features(text: &str, candidate: &EventList, schema: &EventSchema) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let bucket = match candidate.len() {
        n @ 0..=2 => n.to_string(),
        _ => "3+".to_string(),
    };
    fv.add(&format!("count={bucket}"), 1.0);
    if candidate.is_empty() {
        fv.add("empty", 1.0);
        return fv;
    }
    for ev in candidate {
        let ty = ev.type_name();
        let mention = ev.mention();
        let trig_in_text = flag(text.contains(mention));
        fv.add(&format!("type={ty}"), 1.0);
        fv.add(&format!("type={ty}|trigger={}", mention.to_lowercase()), 1.0);
        fv.add(&format!("type={ty}|trigger_in_text={trig_in_text}"), 1.0);
        fv.add(&format!("trigger_in_text={trig_in_text}"), 1.0);
        let spec = schema.lookup(ty);
        fv.add(&format!("type_defined={}", flag(spec.is_some())), 1.0);
        if let Some(spec) = spec {
            let guide = words(spec.guideline());
            let listed = words(mention).iter().all(|w| guide.contains(w));
            fv.add(&format!("trigger_in_guideline={}", flag(listed)), 1.0);
        }
        for (role, filler) in ev.arguments() {
            let filler_in_text = flag(text.contains(filler));
            fv.add(&format!("type={ty}|role={role}"), 1.0);
            fv.add(
                &format!("type={ty}|role={role}|filler_in_text={filler_in_text}"),
                1.0,
            );
            fv.add(&format!("filler_in_text={filler_in_text}"), 1.0);
            if let Some(spec) = spec {
                fv.add(&format!("role_defined={}", flag(spec.has_role(role))), 1.0);
            }
        }
    }
    fv
}
