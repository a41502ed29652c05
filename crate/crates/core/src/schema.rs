//! Event-type schemas: the inventory of types and roles every extraction is
//! checked against, plus the small definition language they are written in.
//!
//! ```text
//! # comments run to end of line
//! event Attack "A violent physical act." {
//!     attacker: list "who attacks";
//!     place: list "where it happened";
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lexer::{self, Cursor, LexError};

/// Fixed task paragraph appended after the definitions when rendering a prompt.
pub const TASK_INSTRUCTION: &str = "\
# Task: read the text and extract every event it mentions, using only the
# event types defined above. Reply with one line of the form
#   result = [Type(mention=\"trigger\", role=[\"filler\", ...]), ...]
# where each role is one of the roles listed for that type and every filler
# is copied from the text. Reply `result = []` when no defined event occurs.
";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("event type `{0}` is defined more than once")]
    DuplicateTypeName(String),
    #[error("role `{role}` is defined more than once in event type `{event_type}`")]
    DuplicateRoleName { event_type: String, role: String },
    #[error("role name `mention` is reserved (event type `{0}`)")]
    ReservedRoleName(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("unknown event type `{0}`")]
    UnknownTypeName(String),
}

impl From<LexError> for SchemaError {
    fn from(e: LexError) -> Self {
        SchemaError::Syntax {
            line: e.position.line,
            col: e.position.col,
            expected: e.expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleSpec {
    name: String,
    description: String,
}

impl RoleSpec {
    pub fn new(name: impl Into<String>, description: impl AsRef<str>) -> Result<Self, SchemaError> {
        let name = name.into();
        if !lexer::is_ident(&name) {
            return Err(SchemaError::InvalidIdentifier(name));
        }
        Ok(Self {
            name,
            description: description.as_ref().trim().to_string(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

/// One event type. Every type implicitly carries a `mention` (trigger) slot,
/// which is why no role may be called `mention`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventTypeSpec {
    name: String,
    guideline: String,
    roles: Vec<RoleSpec>,
}

impl EventTypeSpec {
    pub fn new(
        name: impl Into<String>,
        guideline: impl AsRef<str>,
        roles: Vec<RoleSpec>,
    ) -> Result<Self, SchemaError> {
        let name = name.into();
        if !lexer::is_ident(&name) {
            return Err(SchemaError::InvalidIdentifier(name));
        }
        for (i, role) in roles.iter().enumerate() {
            if role.name == "mention" {
                return Err(SchemaError::ReservedRoleName(name));
            }
            if roles[..i].iter().any(|r| r.name == role.name) {
                return Err(SchemaError::DuplicateRoleName {
                    event_type: name,
                    role: role.name.clone(),
                });
            }
        }
        Ok(Self {
            name,
            guideline: guideline.as_ref().trim().to_string(),
            roles,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn guideline(&self) -> &str {
        &self.guideline
    }

    pub fn roles(&self) -> &[RoleSpec] {
        &self.roles
    }

    pub fn has_role(&self, role: &str) -> bool {
        self.roles.iter().any(|r| r.name == role)
    }
}

/// An ordered, immutable set of event types with unique names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSchema {
    types: Arc<[EventTypeSpec]>,
    index: BTreeMap<String, usize>,
    version: String,
}

impl EventSchema {
    pub fn new(types: Vec<EventTypeSpec>) -> Result<Self, SchemaError> {
        let mut index = BTreeMap::new();
        for (i, t) in types.iter().enumerate() {
            if index.insert(t.name.clone(), i).is_some() {
                return Err(SchemaError::DuplicateTypeName(t.name.clone()));
            }
        }
        let definitions = render_definitions(&types);
        let digest = Sha256::digest(definitions.as_bytes());
        let version = hex::encode(&digest[..6]);
        Ok(Self {
            types: types.into(),
            index,
            version,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new()).expect("empty schema is valid")
    }

    pub fn types(&self) -> &[EventTypeSpec] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Short content digest of the canonical definitions.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn lookup(&self, name: &str) -> Option<&EventTypeSpec> {
        self.index.get(name).map(|&i| &self.types[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.iter().map(|t| t.name.as_str())
    }

    /// Restricts the schema to `names`, in the order given.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<EventSchema, SchemaError> {
        let types = names
            .iter()
            .map(|n| {
                self.lookup(n.as_ref())
                    .cloned()
                    .ok_or_else(|| SchemaError::UnknownTypeName(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        EventSchema::new(types)
    }

    /// Canonical definitions followed by the task instruction. The output is
    /// itself valid schema source (the instruction is a comment block).
    pub fn render_guidelines(&self) -> String {
        let mut out = render_definitions(&self.types);
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(TASK_INSTRUCTION);
        out
    }

    /// Canonical schema source without the instruction block.
    pub fn to_source(&self) -> String {
        render_definitions(&self.types)
    }
}

fn render_definitions(types: &[EventTypeSpec]) -> String {
    let mut out = String::new();
    for (i, t) in types.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "event {} {} {{", t.name, lexer::quote(&t.guideline));
        for r in &t.roles {
            let _ = writeln!(out, "    {}: list {};", r.name, lexer::quote(&r.description));
        }
        out.push_str("}\n");
    }
    out
}

pub fn parse_schema(source: &str) -> Result<EventSchema, SchemaError> {
    let mut cur = Cursor::new(source);
    let mut types: Vec<EventTypeSpec> = Vec::new();
    cur.skip_ws();
    while !cur.at_end() {
        let spec = parse_eventdef(&mut cur)?;
        if types.iter().any(|t| t.name == spec.name) {
            return Err(SchemaError::DuplicateTypeName(spec.name));
        }
        types.push(spec);
        cur.skip_ws();
    }
    EventSchema::new(types)
}

fn parse_eventdef(cur: &mut Cursor<'_>) -> Result<EventTypeSpec, SchemaError> {
    cur.keyword("event")?;
    cur.skip_ws();
    let name = cur.ident()?;
    cur.skip_ws();
    let guideline = cur.string()?;
    cur.skip_ws();
    cur.expect('{')?;
    cur.skip_ws();
    let mut roles = Vec::new();
    while !cur.eat('}') {
        if cur.at_end() {
            return cur.error("role definition or '}'").map_err(Into::into);
        }
        let role = cur.ident()?;
        cur.skip_ws();
        cur.expect(':')?;
        cur.skip_ws();
        cur.keyword("list")?;
        cur.skip_ws();
        let description = cur.string()?;
        cur.skip_ws();
        cur.expect(';')?;
        cur.skip_ws();
        roles.push(RoleSpec::new(role, description)?);
    }
    EventTypeSpec::new(name, guideline, roles)
}
