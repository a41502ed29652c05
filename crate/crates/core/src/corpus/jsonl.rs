//! JSON-lines interchange: one sample per line.
//!
//! ```text
//! {"id":"s1","text":"...","split":"train","events":[{"type":"Attack","mention":"bombed","args":{"place":["Baghdad"]}}]}
//! ```
//!
//! Unknown top-level fields survive a load/save round trip.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{Sample, Split};
use crate::events::{EventInstance, EventList};

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("jsonl i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct EventRecord {
    #[serde(rename = "type")]
    type_name: String,
    mention: String,
    #[serde(default)]
    args: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    id: String,
    text: String,
    split: Split,
    events: Vec<EventRecord>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

fn to_event(rec: EventRecord) -> Result<EventInstance, String> {
    let mut ev = EventInstance::new(rec.type_name, rec.mention).map_err(|e| e.to_string())?;
    for (role, value) in rec.args {
        let fillers: Vec<String> =
            serde_json::from_value(value).map_err(|_| format!("args.{role} must be an array of strings"))?;
        ev = ev.with_role(role, fillers).map_err(|e| e.to_string())?;
    }
    Ok(ev)
}

fn from_event(ev: &EventInstance) -> EventRecord {
    EventRecord {
        type_name: ev.type_name().to_string(),
        mention: ev.mention().to_string(),
        args: ev
            .args()
            .iter()
            .map(|(r, fs)| (r.clone(), Value::from(fs.clone())))
            .collect(),
    }
}

pub fn parse_record(line: &str) -> Result<Sample, String> {
    let rec: SampleRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let events = rec
        .events
        .into_iter()
        .map(to_event)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sample {
        id: rec.id,
        text: rec.text,
        gold: EventList::new(events),
        split: rec.split,
        extra: rec.extra,
    })
}

pub fn record_line(sample: &Sample) -> String {
    let rec = SampleRecord {
        id: sample.id.clone(),
        text: sample.text.clone(),
        split: sample.split,
        events: sample.gold.iter().map(from_event).collect(),
        extra: sample.extra.clone(),
    };
    serde_json::to_string(&rec).expect("sample records always serialize")
}

/// Parses a whole file; blank lines are skipped, line numbers are 1-based.
pub fn read_jsonl(text: &str) -> Result<Vec<Sample>, JsonlError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_record(l).map_err(|message| JsonlError::SchemaViolation {
                line: i + 1,
                message,
            })
        })
        .collect()
}

pub fn write_jsonl(samples: &[Sample]) -> String {
    samples.iter().map(|s| record_line(s) + "\n").collect()
}

pub fn load_jsonl(path: &Path) -> Result<Vec<Sample>, JsonlError> {
    read_jsonl(&fs::read_to_string(path)?)
}

pub fn save_jsonl(samples: &[Sample], path: &Path) -> Result<(), JsonlError> {
    fs::write(path, write_jsonl(samples))?;
    Ok(())
}
