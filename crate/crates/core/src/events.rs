//! Extracted events: the `result = [...]` output format, schema validation,
//! and the undefined-type / structural-mismatch error taxonomy.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexer::{self, Cursor, Position};
use crate::schema::EventSchema;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("event mention must be nonempty")]
    EmptyMention,
    #[error("filler for role `{0}` must be nonempty")]
    EmptyFiller(String),
    #[error("role `{0}` appears more than once")]
    DuplicateRole(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
}

/// A generation that does not match the output grammar.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unparseable output at {position}: {message}")]
pub struct OutputParseError {
    pub position: Position,
    pub message: String,
}

/// One extracted event: a type, its trigger mention, and role fillers.
///
/// Roles keep their insertion order. A role with no fillers is never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventInstance {
    pub(crate) type_name: String,
    pub(crate) mention: String,
    pub(crate) args: Vec<(String, Vec<String>)>,
}

impl EventInstance {
    pub fn new(type_name: impl Into<String>, mention: impl Into<String>) -> Result<Self, EventError> {
        let type_name = type_name.into();
        let mention = mention.into();
        if !lexer::is_ident(&type_name) {
            return Err(EventError::InvalidIdentifier(type_name));
        }
        if mention.is_empty() {
            return Err(EventError::EmptyMention);
        }
        Ok(Self {
            type_name,
            mention,
            args: Vec::new(),
        })
    }

    /// Appends a role. An empty filler list is a no-op.
    pub fn with_role<I, S>(mut self, role: impl Into<String>, fillers: I) -> Result<Self, EventError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let role = role.into();
        let fillers: Vec<String> = fillers.into_iter().map(Into::into).collect();
        if !lexer::is_ident(&role) || role == "mention" {
            return Err(EventError::InvalidIdentifier(role));
        }
        if self.args.iter().any(|(r, _)| *r == role) {
            return Err(EventError::DuplicateRole(role));
        }
        if fillers.iter().any(String::is_empty) {
            return Err(EventError::EmptyFiller(role));
        }
        if !fillers.is_empty() {
            self.args.push((role, fillers));
        }
        Ok(self)
    }

    pub fn type_name(&self) -> &str {
        &self.type_name
    }

    pub fn mention(&self) -> &str {
        &self.mention
    }

    pub fn args(&self) -> &[(String, Vec<String>)] {
        &self.args
    }

    pub fn fillers(&self, role: &str) -> Option<&[String]> {
        self.args
            .iter()
            .find(|(r, _)| r == role)
            .map(|(_, f)| f.as_slice())
    }

    /// Iterates `(role, filler)` pairs, one per argument.
    pub fn arguments(&self) -> impl Iterator<Item = (&str, &str)> {
        self.args
            .iter()
            .flat_map(|(r, fs)| fs.iter().map(move |f| (r.as_str(), f.as_str())))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventList {
    pub events: Vec<EventInstance>,
}

impl EventList {
    pub fn new(events: Vec<EventInstance>) -> Self {
        Self { events }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EventInstance> {
        self.events.iter()
    }
}

impl FromIterator<EventInstance> for EventList {
    fn from_iter<T: IntoIterator<Item = EventInstance>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a EventList {
    type Item = &'a EventInstance;
    type IntoIter = std::slice::Iter<'a, EventInstance>;

    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

/// Parses `result = [Type(mention="...", role=["..."]), ...]`.
pub fn parse_output(text: &str) -> Result<EventList, OutputParseError> {
    let mut cur = Cursor::new(text);
    let lex = |e: crate::lexer::LexError| OutputParseError {
        position: e.position,
        message: format!("expected {}", e.expected),
    };
    cur.keyword("result").map_err(lex)?;
    cur.skip_ws();
    cur.expect('=').map_err(lex)?;
    cur.skip_ws();
    cur.expect('[').map_err(lex)?;
    cur.skip_ws();
    let mut events = Vec::new();
    if !cur.eat(']') {
        loop {
            events.push(parse_call(&mut cur)?);
            cur.skip_ws();
            if cur.eat(']') {
                break;
            }
            cur.expect(',').map_err(|e| OutputParseError {
                position: e.position,
                message: "expected ',' or ']'".into(),
            })?;
            cur.skip_ws();
        }
    }
    if !cur.at_end() {
        return Err(OutputParseError {
            position: cur.position(),
            message: "trailing input after ']'".into(),
        });
    }
    Ok(EventList::new(events))
}

fn parse_call(cur: &mut Cursor<'_>) -> Result<EventInstance, OutputParseError> {
    let lex = |e: crate::lexer::LexError| OutputParseError {
        position: e.position,
        message: format!("expected {}", e.expected),
    };
    let start = cur.position();
    let type_name = cur.ident().map_err(lex)?;
    cur.expect('(').map_err(lex)?;
    cur.skip_ws();
    let mut mention: Option<String> = None;
    let mut args: Vec<(String, Vec<String>)> = Vec::new();
    loop {
        let key_pos = cur.position();
        let key = cur.ident().map_err(lex)?;
        cur.skip_ws();
        cur.expect('=').map_err(lex)?;
        cur.skip_ws();
        let dup = |what: &str| OutputParseError {
            position: key_pos,
            message: format!("duplicate key `{what}`"),
        };
        if key == "mention" {
            if mention.is_some() {
                return Err(dup(&key));
            }
            let value_pos = cur.position();
            let value = cur.string().map_err(lex)?;
            if value.is_empty() {
                return Err(OutputParseError {
                    position: value_pos,
                    message: "mention must be nonempty".into(),
                });
            }
            mention = Some(value);
        } else {
            if args.iter().any(|(r, _)| *r == key) {
                return Err(dup(&key));
            }
            let fillers = parse_string_list(cur)?;
            if !fillers.is_empty() {
                args.push((key, fillers));
            }
        }
        cur.skip_ws();
        if cur.eat(')') {
            break;
        }
        cur.expect(',').map_err(|e| OutputParseError {
            position: e.position,
            message: "expected ',' or ')'".into(),
        })?;
        cur.skip_ws();
    }
    let mention = mention.ok_or_else(|| OutputParseError {
        position: start,
        message: format!("event `{type_name}` has no mention"),
    })?;
    Ok(EventInstance {
        type_name,
        mention,
        args,
    })
}

fn parse_string_list(cur: &mut Cursor<'_>) -> Result<Vec<String>, OutputParseError> {
    let lex = |e: crate::lexer::LexError| OutputParseError {
        position: e.position,
        message: format!("expected {}", e.expected),
    };
    cur.expect('[').map_err(lex)?;
    cur.skip_ws();
    let mut out = Vec::new();
    if cur.eat(']') {
        return Ok(out);
    }
    loop {
        let pos = cur.position();
        let s = cur.string().map_err(lex)?;
        if s.is_empty() {
            return Err(OutputParseError {
                position: pos,
                message: "fillers must be nonempty".into(),
            });
        }
        out.push(s);
        cur.skip_ws();
        if cur.eat(']') {
            return Ok(out);
        }
        cur.expect(',').map_err(|e| OutputParseError {
            position: e.position,
            message: "expected ',' or ']'".into(),
        })?;
        cur.skip_ws();
    }
}

/// Canonical text: mention first, then roles in stored order.
pub fn serialize_output(events: &EventList) -> String {
    let mut out = String::from("result = [");
    for (i, ev) in events.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}(mention={}", ev.type_name, lexer::quote(&ev.mention));
        for (role, fillers) in &ev.args {
            let _ = write!(out, ", {role}=[");
            for (j, f) in fillers.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&lexer::quote(f));
            }
            out.push(']');
        }
        out.push(')');
    }
    out.push(']');
    out
}

/// Outcome of checking one output against a schema.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `(event index, type name)` for every event whose type is not defined.
    pub undefined_type_errors: Vec<(usize, String)>,
    /// `(event index, role)` for every role not permitted by its event type.
    pub mismatch_errors: Vec<(usize, String)>,
    pub parse_error: Option<(usize, String)>,
    #[serde(skip)]
    pub valid_events: EventList,
}

impl ValidationReport {
    /// Report for a generation that failed to parse: no events survive.
    pub fn unparseable(err: &OutputParseError) -> Self {
        Self {
            parse_error: Some((err.position.offset, err.message.clone())),
            ..Self::default()
        }
    }

    pub fn is_clean(&self) -> bool {
        self.undefined_type_errors.is_empty()
            && self.mismatch_errors.is_empty()
            && self.parse_error.is_none()
    }
}

/// Undefined-type events are dropped whole; out-of-schema roles are dropped
/// from otherwise valid events.
pub fn validate(events: &EventList, schema: &EventSchema) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, ev) in events.iter().enumerate() {
        let Some(spec) = schema.lookup(&ev.type_name) else {
            report.undefined_type_errors.push((i, ev.type_name.clone()));
            continue;
        };
        let mut kept = ev.clone();
        kept.args.retain(|(role, _)| {
            let ok = spec.has_role(role);
            if !ok {
                report.mismatch_errors.push((i, role.clone()));
            }
            ok
        });
        report.valid_events.events.push(kept);
    }
    report
}

/// Parses and validates a raw generation in one go.
pub fn check_output(text: &str, schema: &EventSchema) -> ValidationReport {
    match parse_output(text) {
        Ok(events) => validate(&events, schema),
        Err(e) => ValidationReport::unparseable(&e),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub undefined: usize,
    pub mismatch: usize,
    pub parse_error: usize,
}

impl ErrorCounts {
    pub fn structural(&self) -> usize {
        self.undefined + self.mismatch
    }
}

impl std::ops::Add for ErrorCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            undefined: self.undefined + rhs.undefined,
            mismatch: self.mismatch + rhs.mismatch,
            parse_error: self.parse_error + rhs.parse_error,
        }
    }
}

impl std::iter::Sum for ErrorCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

impl From<&ValidationReport> for ErrorCounts {
    fn from(r: &ValidationReport) -> Self {
        Self {
            undefined: r.undefined_type_errors.len(),
            mismatch: r.mismatch_errors.len(),
            parse_error: usize::from(r.parse_error.is_some()),
        }
    }
}

pub fn count_errors<'a, I>(reports: I) -> ErrorCounts
where
    I: IntoIterator<Item = &'a ValidationReport>,
{
    reports.into_iter().map(ErrorCounts::from).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_schema;

    fn attack_schema() -> EventSchema {
        parse_schema(
            r#"event Attack "An attack" { attacker: list "who"; target: list "whom"; place: list "where"; }
               event Die "A death" { victim: list "who died"; }"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_attack_output() {
        let out = parse_output(
            r#"result = [Attack(mention="bombed", attacker=["militants"], place=["Baghdad"])]"#,
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        let ev = &out.events[0];
        assert_eq!(ev.type_name(), "Attack");
        assert_eq!(ev.mention(), "bombed");
        assert_eq!(ev.args().len(), 2);
        assert_eq!(ev.fillers("place").unwrap(), ["Baghdad"]);
    }

    #[test]
    fn parses_empty_result() {
        assert!(parse_output("result = []").unwrap().is_empty());
        assert!(parse_output("result=[ ]").unwrap().is_empty());
    }

    #[test]
    fn truncated_output_fails_at_end() {
        let text = r#"result = [Attack(mention="fired""#;
        let err = parse_output(text).unwrap_err();
        assert_eq!(err.position.offset, text.len());
    }

    #[test]
    fn grammar_violations() {
        for bad in [
            "",
            "result = [",
            "results = []",
            "result = [] extra",
            r#"result = [Attack()]"#,
            r#"result = [Attack(place=["x"])]"#,
            r#"result = [Attack(mention=["x"])]"#,
            r#"result = [Attack(mention="x", place="y")]"#,
            r#"result = [Attack(mention="")]"#,
            r#"result = [Attack(mention="x", place=[""])]"#,
            r#"result = [Attack(mention="x", mention="y")]"#,
            r#"result = [Attack(mention="x", a=["1"], a=["2"])]"#,
            r#"result = [Attack(mention="x"),]"#,
            r#"result = [Attack (mention="x")]"#,
        ] {
            assert!(parse_output(bad).is_err(), "accepted: {bad:?}");
        }
    }

    #[test]
    fn empty_role_lists_are_not_stored() {
        let out = parse_output(r#"result = [Die(victim=[], mention="died")]"#).unwrap();
        assert!(out.events[0].args().is_empty());
        assert_eq!(serialize_output(&out), r#"result = [Die(mention="died")]"#);
    }

    #[test]
    fn serialize_canonical_forms() {
        assert_eq!(serialize_output(&EventList::default()), "result = []");
        let ev = EventInstance::new("Attack", "bombed")
            .unwrap()
            .with_role("place", ["Baghdad"])
            .unwrap()
            .with_role("attacker", ["militants", "a \"cell\""])
            .unwrap();
        let list = EventList::new(vec![ev]);
        let text = serialize_output(&list);
        assert_eq!(
            text,
            r#"result = [Attack(mention="bombed", place=["Baghdad"], attacker=["militants", "a \"cell\""])]"#
        );
        assert_eq!(parse_output(&text).unwrap(), list);
    }

    #[test]
    fn undefined_type_is_dropped() {
        let list = parse_output(r#"result = [Vote(mention="voted", voter=["citizens"])]"#).unwrap();
        let report = validate(&list, &attack_schema());
        assert_eq!(report.undefined_type_errors, vec![(0, "Vote".to_string())]);
        assert!(report.mismatch_errors.is_empty());
        assert!(report.valid_events.is_empty());
    }

    #[test]
    fn mismatched_role_is_dropped_event_kept() {
        let list = parse_output(
            r#"result = [Attack(mention="shot", attacker=["gunman"], entity=["crowd"])]"#,
        )
        .unwrap();
        let report = validate(&list, &attack_schema());
        assert!(report.undefined_type_errors.is_empty());
        assert_eq!(report.mismatch_errors, vec![(0, "entity".to_string())]);
        let kept = &report.valid_events.events[0];
        assert_eq!(kept.type_name(), "Attack");
        assert_eq!(kept.args().len(), 1);
        assert!(kept.fillers("entity").is_none());
    }

    #[test]
    fn conforming_passes_through() {
        let list = parse_output(
            r#"result = [Attack(mention="shot", attacker=["gunman"]), Die(mention="killed", victim=["a", "b"])]"#,
        )
        .unwrap();
        let report = validate(&list, &attack_schema());
        assert!(report.is_clean());
        assert_eq!(report.valid_events, list);
    }

    #[test]
    fn counts_sum_componentwise() {
        let mk = |u: usize, m: usize, p: bool| ValidationReport {
            undefined_type_errors: (0..u).map(|i| (i, "X".into())).collect(),
            mismatch_errors: (0..m).map(|i| (i, "r".into())).collect(),
            parse_error: p.then(|| (0, "bad".into())),
            valid_events: EventList::default(),
        };
        // Hand-summed fixture: undefined 2+0+1+3+0 = 6, mismatch 1+0+4+0+2 = 7, parse 2.
        let reports = [
            mk(2, 1, false),
            mk(0, 0, true),
            mk(1, 4, false),
            mk(3, 0, false),
            mk(0, 2, true),
        ];
        assert_eq!(
            count_errors(&reports),
            ErrorCounts {
                undefined: 6,
                mismatch: 7,
                parse_error: 2
            }
        );
        assert_eq!(count_errors(&[ValidationReport::default()]), ErrorCounts::default());
    }

    #[test]
    fn reported_totals_aggregate() {
        // 133 undefined and 51 mismatch spread across reports.
        let reports: Vec<ValidationReport> = (0..133)
            .map(|i| ValidationReport {
                undefined_type_errors: vec![(0, "Vote".into())],
                mismatch_errors: if i < 51 { vec![(1, "entity".into())] } else { vec![] },
                ..Default::default()
            })
            .collect();
        let c = count_errors(&reports);
        assert_eq!((c.undefined, c.mismatch, c.parse_error), (133, 51, 0));
    }

    #[test]
    fn unparseable_counts_as_parse_error() {
        let report = check_output("result = [Attack(", &attack_schema());
        assert!(report.parse_error.is_some());
        assert!(report.valid_events.is_empty());
        assert_eq!(ErrorCounts::from(&report).parse_error, 1);
    }
}
