//! Line-oriented text format for systems, morphisms, and relations.
//!
//! Documents are UTF-8. `#` starts a comment running to the end of the line;
//! blank lines are ignored; tokens are separated by whitespace. Identifiers
//! (names, states, labels) must not contain whitespace or `#`.
//!
//! System documents:
//!
//! ```text
//! system vending
//! labels coin tea
//! states idle busy
//! init idle
//! trans idle coin busy
//! trans busy tea idle
//! ```
//!
//! Morphism documents (`maplabel` lines may be omitted for labels mapped to
//! themselves) and relation documents follow the same shape with `morphism`
//! / `source` / `target` / `mapstate` / `maplabel` and `relation` / `left` /
//! `right` / `pair` lines. Serialization is canonical: sections in the order
//! above, entries sorted, single spaces, a trailing newline, and identity
//! `maplabel` lines omitted, so equal values serialize to equal bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::morphism::Morphism;
use crate::relation::Relation;
use crate::ts::{Label, StateId, Transition, TransitionSystem};

/// A parse failure with its 1-based line and character column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    line: usize,
    column: usize,
    message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn at(tok: &Tok<'_>, message: impl Into<String>) -> Self {
        Self::new(tok.line, tok.column, message)
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// The kind of document a text begins with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    System,
    Morphism,
    Relation,
}

/// Reads the leading keyword to classify a document.
pub fn detect_kind(text: &str) -> Result<DocumentKind, ParseError> {
    let lines = significant_lines(text);
    let Some(first) = lines.first().and_then(|l| l.first()) else {
        return Err(ParseError::new(1, 1, "empty document"));
    };
    match first.text {
        "system" => Ok(DocumentKind::System),
        "morphism" => Ok(DocumentKind::Morphism),
        "relation" => Ok(DocumentKind::Relation),
        other => Err(ParseError::at(
            first,
            format!("expected `system`, `morphism`, or `relation`, found `{other}`"),
        )),
    }
}

#[derive(Clone, Copy, Debug)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

/// Tokenizes into significant lines: comments stripped, blank lines dropped,
/// columns counted in characters starting at 1.
fn significant_lines(text: &str) -> Vec<Vec<Tok<'_>>> {
    let mut lines = Vec::new();
    for (line_idx, raw) in text.lines().enumerate() {
        let mut toks: Vec<Tok<'_>> = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        for (char_idx, (byte_idx, ch)) in raw.char_indices().enumerate() {
            if ch == '#' || ch.is_whitespace() {
                if let Some((col, byte_start)) = start.take() {
                    toks.push(Tok {
                        text: &raw[byte_start..byte_idx],
                        line: line_idx + 1,
                        column: col + 1,
                    });
                }
                if ch == '#' {
                    break;
                }
            } else if start.is_none() {
                start = Some((char_idx, byte_idx));
            }
        }
        if let Some((col, byte_start)) = start {
            toks.push(Tok {
                text: &raw[byte_start..],
                line: line_idx + 1,
                column: col + 1,
            });
        }
        if !toks.is_empty() {
            lines.push(toks);
        }
    }
    lines
}

struct Doc<'a> {
    lines: Vec<Vec<Tok<'a>>>,
    pos: usize,
    end_line: usize,
}

impl<'a> Doc<'a> {
    fn new(text: &'a str) -> Self {
        let lines = significant_lines(text);
        let end_line = text.lines().count() + 1;
        Doc {
            lines,
            pos: 0,
            end_line,
        }
    }

    fn peek(&self) -> Option<&[Tok<'a>]> {
        self.lines.get(self.pos).map(Vec::as_slice)
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn at_end(&self) -> ParseError {
        ParseError::new(self.end_line, 1, "unexpected end of document")
    }

    /// Consumes a line that must start with `keyword`; `argc` of `None`
    /// accepts any number of arguments.
    fn expect(&mut self, keyword: &str, argc: Option<usize>) -> Result<Vec<Tok<'a>>, ParseError> {
        let Some(line) = self.peek() else {
            return Err(ParseError::new(
                self.end_line,
                1,
                format!("expected a `{keyword}` line"),
            ));
        };
        let head = line[0];
        if head.text != keyword {
            return Err(ParseError::at(
                &head,
                format!("expected `{keyword}`, found `{}`", head.text),
            ));
        }
        if let Some(n) = argc {
            if line.len() - 1 != n {
                return Err(ParseError::at(
                    &head,
                    format!(
                        "`{keyword}` takes exactly {n} argument{}, found {}",
                        if n == 1 { "" } else { "s" },
                        line.len() - 1
                    ),
                ));
            }
        }
        let line = line.to_vec();
        self.advance();
        Ok(line)
    }
}

/// Parses a system document and rejects semantic errors (undeclared states
/// or labels, empty sections) with the position of the offending token.
pub fn parse_system(text: &str) -> Result<TransitionSystem, ParseError> {
    parse_system_inner(text, true)
}

/// Parses a system document checking only the syntax; semantic problems are
/// left for [`TransitionSystem::validate`] to report. Useful for examining
/// ill-formed systems.
pub fn parse_system_lenient(text: &str) -> Result<TransitionSystem, ParseError> {
    parse_system_inner(text, false)
}

fn parse_system_inner(text: &str, strict: bool) -> Result<TransitionSystem, ParseError> {
    let mut doc = Doc::new(text);
    let name_line = doc.expect("system", Some(1))?;
    let name = name_line[1].text;

    let labels_line = doc.expect("labels", None)?;
    if strict && labels_line.len() == 1 {
        return Err(ParseError::at(&labels_line[0], "at least one label is required"));
    }
    let labels: BTreeSet<Label> = labels_line[1..].iter().map(|t| Label::new(t.text)).collect();

    let states_line = doc.expect("states", None)?;
    if strict && states_line.len() == 1 {
        return Err(ParseError::at(&states_line[0], "at least one state is required"));
    }
    let states: BTreeSet<StateId> =
        states_line[1..].iter().map(|t| StateId::new(t.text)).collect();

    let init_line = doc.expect("init", Some(1))?;
    let init_tok = init_line[1];
    if strict && !states.contains(init_tok.text) {
        return Err(ParseError::at(
            &init_tok,
            format!("initial state `{}` is not a declared state", init_tok.text),
        ));
    }

    let mut transitions = Vec::new();
    while doc.peek().is_some() {
        let line = doc.expect("trans", Some(3))?;
        let (src, label, dst) = (line[1], line[2], line[3]);
        if strict {
            if !states.contains(src.text) {
                return Err(ParseError::at(
                    &src,
                    format!("unknown state `{}`", src.text),
                ));
            }
            if !labels.contains(label.text) {
                return Err(ParseError::at(
                    &label,
                    format!("unknown label `{}`", label.text),
                ));
            }
            if !states.contains(dst.text) {
                return Err(ParseError::at(
                    &dst,
                    format!("unknown state `{}`", dst.text),
                ));
            }
        }
        transitions.push(Transition::new(src.text, label.text, dst.text));
    }

    Ok(TransitionSystem::new(
        name,
        labels,
        states,
        init_tok.text,
        transitions,
    ))
}

/// Parses a morphism document against its already-parsed source and target
/// systems. The document must name them correctly, map every source state,
/// and may omit `maplabel` lines for labels mapped to themselves.
///
/// The result has total maps into the target; whether it satisfies the
/// morphism conditions is a separate check ([`Morphism::check`]).
pub fn parse_morphism(
    text: &str,
    source: &Arc<TransitionSystem>,
    target: &Arc<TransitionSystem>,
) -> Result<Morphism, ParseError> {
    let mut doc = Doc::new(text);
    doc.expect("morphism", Some(0))?;
    let source_line = doc.expect("source", Some(1))?;
    if source_line[1].text != source.name() {
        return Err(ParseError::at(
            &source_line[1],
            format!(
                "document names source `{}`, expected `{}`",
                source_line[1].text,
                source.name()
            ),
        ));
    }
    let target_line = doc.expect("target", Some(1))?;
    if target_line[1].text != target.name() {
        return Err(ParseError::at(
            &target_line[1],
            format!(
                "document names target `{}`, expected `{}`",
                target_line[1].text,
                target.name()
            ),
        ));
    }

    let mut state_map: BTreeMap<StateId, StateId> = BTreeMap::new();
    let mut label_map: BTreeMap<Label, Label> = BTreeMap::new();
    while let Some(line) = doc.peek() {
        match line[0].text {
            "mapstate" => {
                let line = doc.expect("mapstate", Some(2))?;
                let (from, to) = (line[1], line[2]);
                if !source.states().contains(from.text) {
                    return Err(ParseError::at(
                        &from,
                        format!("unknown source state `{}`", from.text),
                    ));
                }
                if !target.states().contains(to.text) {
                    return Err(ParseError::at(
                        &to,
                        format!("unknown target state `{}`", to.text),
                    ));
                }
                if state_map
                    .insert(StateId::new(from.text), StateId::new(to.text))
                    .is_some()
                {
                    return Err(ParseError::at(
                        &from,
                        format!("duplicate mapstate for `{}`", from.text),
                    ));
                }
            }
            "maplabel" => {
                let line = doc.expect("maplabel", Some(2))?;
                let (from, to) = (line[1], line[2]);
                if !source.labels().contains(from.text) {
                    return Err(ParseError::at(
                        &from,
                        format!("unknown source label `{}`", from.text),
                    ));
                }
                if !target.labels().contains(to.text) {
                    return Err(ParseError::at(
                        &to,
                        format!("unknown target label `{}`", to.text),
                    ));
                }
                if label_map
                    .insert(Label::new(from.text), Label::new(to.text))
                    .is_some()
                {
                    return Err(ParseError::at(
                        &from,
                        format!("duplicate maplabel for `{}`", from.text),
                    ));
                }
            }
            other => {
                return Err(ParseError::at(
                    &line[0],
                    format!("expected `mapstate` or `maplabel`, found `{other}`"),
                ));
            }
        }
    }

    for state in source.states() {
        if !state_map.contains_key(state) {
            return Err(doc
                .at_end_with(format!("missing mapstate for state `{state}`")));
        }
    }
    for label in source.labels() {
        if !label_map.contains_key(label) {
            if !target.labels().contains(label) {
                return Err(doc.at_end_with(format!(
                    "missing maplabel for label `{label}` (no identically named target label)"
                )));
            }
            label_map.insert(label.clone(), label.clone());
        }
    }

    Ok(
        Morphism::new(Arc::clone(source), Arc::clone(target), state_map, label_map)
            .expect("maps were checked token by token"),
    )
}

/// Parses a relation document against its already-parsed left and right
/// systems. Duplicate `pair` lines are set-idempotent.
pub fn parse_relation(
    text: &str,
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
) -> Result<Relation, ParseError> {
    let mut doc = Doc::new(text);
    doc.expect("relation", Some(0))?;
    let left_line = doc.expect("left", Some(1))?;
    if left_line[1].text != left.name() {
        return Err(ParseError::at(
            &left_line[1],
            format!(
                "document names left system `{}`, expected `{}`",
                left_line[1].text,
                left.name()
            ),
        ));
    }
    let right_line = doc.expect("right", Some(1))?;
    if right_line[1].text != right.name() {
        return Err(ParseError::at(
            &right_line[1],
            format!(
                "document names right system `{}`, expected `{}`",
                right_line[1].text,
                right.name()
            ),
        ));
    }

    let mut pairs: BTreeSet<(StateId, StateId)> = BTreeSet::new();
    while doc.peek().is_some() {
        let line = doc.expect("pair", Some(2))?;
        let (l, r) = (line[1], line[2]);
        if !left.states().contains(l.text) {
            return Err(ParseError::at(&l, format!("unknown left state `{}`", l.text)));
        }
        if !right.states().contains(r.text) {
            return Err(ParseError::at(&r, format!("unknown right state `{}`", r.text)));
        }
        pairs.insert((StateId::new(l.text), StateId::new(r.text)));
    }

    Ok(Relation::new(Arc::clone(left), Arc::clone(right), pairs)
        .expect("pairs were checked token by token"))
}

impl Doc<'_> {
    fn at_end_with(&self, message: String) -> ParseError {
        let mut err = self.at_end();
        err.message = message;
        err
    }
}

/// Canonical system serialization; `parse_system` inverts it.
pub fn serialize_system(ts: &TransitionSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {}", ts.name());
    let _ = write!(out, "labels");
    for label in ts.labels() {
        let _ = write!(out, " {label}");
    }
    out.push('\n');
    let _ = write!(out, "states");
    for state in ts.states() {
        let _ = write!(out, " {state}");
    }
    out.push('\n');
    let _ = writeln!(out, "init {}", ts.initial());
    for t in ts.transitions() {
        let _ = writeln!(out, "trans {} {} {}", t.source, t.label, t.target);
    }
    out
}

/// Canonical morphism serialization; identity label entries are omitted.
pub fn serialize_morphism(m: &Morphism) -> String {
    let mut out = String::new();
    out.push_str("morphism\n");
    let _ = writeln!(out, "source {}", m.source().name());
    let _ = writeln!(out, "target {}", m.target().name());
    for (from, to) in m.state_map() {
        let _ = writeln!(out, "mapstate {from} {to}");
    }
    for (from, to) in m.label_map() {
        if from != to {
            let _ = writeln!(out, "maplabel {from} {to}");
        }
    }
    out
}

/// Canonical relation serialization.
pub fn serialize_relation(rel: &Relation) -> String {
    let mut out = String::new();
    out.push_str("relation\n");
    let _ = writeln!(out, "left {}", rel.left().name());
    let _ = writeln!(out, "right {}", rel.right().name());
    for (l, r) in rel.pairs() {
        let _ = writeln!(out, "pair {l} {r}");
    }
    out
}
