//! Plain-text checkpoints.
//!
//! ```text
//! eventrl-checkpoint v1
//! step_count<TAB>42
//! content_hash<TAB><sha256 of the weight lines>
//! <feature string><TAB><weight>
//! ...
//! ```
//!
//! Weight lines are sorted by feature string. Tabs, newlines and backslashes
//! inside feature strings are backslash-escaped.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{FeatureVector, PolicyParams};

const MAGIC: &str = "eventrl-checkpoint v1";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("content hash mismatch: header says {expected}, weights hash to {actual}")]
    HashMismatch { expected: String, actual: String },
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

fn body(params: &PolicyParams) -> String {
    let mut lines: Vec<String> = params
        .weights
        .iter()
        .map(|(_, name, w)| format!("{}\t{w:e}\n", escape(name)))
        .collect();
    lines.sort();
    lines.concat()
}

pub fn write_checkpoint(params: &PolicyParams) -> String {
    let body = body(params);
    let hash = hex::encode(Sha256::digest(body.as_bytes()));
    format!(
        "{MAGIC}\nstep_count\t{}\ncontent_hash\t{hash}\n{body}",
        params.step_count
    )
}

/// Hex digest identifying the weights of `params`.
pub fn content_hash(params: &PolicyParams) -> String {
    hex::encode(Sha256::digest(body(params).as_bytes()))
}

pub fn read_checkpoint(text: &str) -> Result<PolicyParams, CheckpointError> {
    let malformed = |line: usize, message: &str| CheckpointError::Malformed {
        line,
        message: message.to_string(),
    };
    let mut lines = text.split_inclusive('\n');
    let mut header = |n: usize, key: &str| -> Result<String, CheckpointError> {
        let line = lines
            .next()
            .ok_or_else(|| malformed(n, "missing header line"))?;
        let line = line
            .strip_suffix('\n')
            .ok_or_else(|| malformed(n, "missing newline"))?;
        if key.is_empty() {
            return Ok(line.to_string());
        }
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('\t'))
            .map(str::to_string)
            .ok_or_else(|| malformed(n, &format!("expected `{key}`")))
    };
    if header(1, "")? != MAGIC {
        return Err(malformed(1, "not an eventrl checkpoint"));
    }
    let step_count: u64 = header(2, "step_count")?
        .parse()
        .map_err(|_| malformed(2, "bad step_count"))?;
    let expected = header(3, "content_hash")?;

    let rest: String = lines.collect();
    let actual = hex::encode(Sha256::digest(rest.as_bytes()));
    if actual != expected {
        return Err(CheckpointError::HashMismatch { expected, actual });
    }
    let mut weights = FeatureVector::new();
    for (i, line) in rest.lines().enumerate() {
        let n = i + 4;
        let (name, value) = line
            .rsplit_once('\t')
            .ok_or_else(|| malformed(n, "expected `feature<TAB>weight`"))?;
        let name = unescape(name).ok_or_else(|| malformed(n, "bad escape in feature"))?;
        let value: f64 = value.parse().map_err(|_| malformed(n, "bad weight"))?;
        if !value.is_finite() || value == 0.0 {
            return Err(malformed(n, "weight must be finite and nonzero"));
        }
        if weights.get_named(&name) != 0.0 {
            return Err(malformed(n, "duplicate feature"));
        }
        weights.add(&name, value);
    }
    Ok(PolicyParams {
        weights,
        step_count,
    })
}

pub fn save_checkpoint(params: &PolicyParams, path: &Path) -> Result<(), CheckpointError> {
    fs::write(path, write_checkpoint(params))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<PolicyParams, CheckpointError> {
    read_checkpoint(&fs::read_to_string(path)?)
}
