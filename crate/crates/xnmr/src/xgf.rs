//! XGF, the canonical text interchange format for ground programs.
//!
//! A document is line-oriented ASCII with LF endings:
//!
//! ```text
//! xgf 1
//! a <id> <atom-text>            one per atom, ids dense from 1
//! r <head> <npos> <nneg> <ids>  one per rule, canonical order
//! e
//! ```
//!
//! Emission is byte-deterministic, and parsing is strict: the only
//! accepted documents are exactly the ones [`emit_xgf`] produces, so a
//! parsed program always re-emits to the input bytes. Atom ids follow
//! the ascending lexicographic order of the atom texts, rule records are
//! sorted by `(head, pos, neg)` without duplicates, and every atom text
//! must be a canonical ground atom such as `win(1)`.

use std::fmt::Write as _;

use crate::ground::{AtomProgram, AtomTable, GroundRule};
use crate::syntax::parse_program;
use crate::wfs::ResidualProgram;

/// Rejection of a malformed or non-canonical XGF document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("xgf line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

/// Serializes any ground program to canonical XGF text.
pub fn emit_xgf<P: AtomProgram + ?Sized>(program: &P) -> String {
    let mut out = String::from("xgf 1\n");
    for id in 1..=program.atom_count() {
        writeln!(out, "a {id} {}", program.atom_text(id)).unwrap();
    }
    for rule in program.rules() {
        write!(out, "r {} {} {}", rule.head, rule.pos.len(), rule.neg.len()).unwrap();
        for id in rule.pos.iter().chain(&rule.neg) {
            write!(out, " {id}").unwrap();
        }
        out.push('\n');
    }
    out.push_str("e\n");
    out
}

/// A canonically printed unsigned integer: digits only, no leading zero.
fn parse_count(field: &str) -> Option<usize> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if field.len() > 1 && field.starts_with('0') {
        return None;
    }
    field.parse().ok()
}

/// An atom text is valid when it reads back as a single ground fact that
/// prints to exactly the same characters.
fn valid_atom_text(text: &str) -> bool {
    if text.is_empty() || text.chars().any(char::is_whitespace) {
        return false;
    }
    match parse_program(&format!("{text}.")) {
        Ok(program) if program.len() == 1 => {
            let rule = &program.rules()[0];
            rule.is_fact() && rule.head.is_ground() && rule.head.to_string() == text
        }
        _ => false,
    }
}

/// Parses a strict XGF document back into a program.
pub fn parse_xgf(text: &str) -> Result<ResidualProgram, FormatError> {
    let mut lines = text.split('\n').enumerate();
    let mut next = || lines.next().map(|(i, l)| (i + 1, l));

    let Some((_, header)) = next() else {
        return Err(error(1, "empty document"));
    };
    if header != "xgf 1" {
        if let Some(version) = header.strip_prefix("xgf ") {
            return Err(error(1, format!("unsupported version `{version}`")));
        }
        return Err(error(1, "expected header `xgf 1`"));
    }

    let mut texts: Vec<String> = Vec::new();
    let mut rules: Vec<GroundRule> = Vec::new();
    let mut saw_rule = false;
    loop {
        let Some((line_no, line)) = next() else {
            return Err(error(texts.len() + rules.len() + 2, "missing terminator"));
        };
        if line == "e" {
            match next() {
                Some((_, "")) if lines.next().is_none() => break,
                _ => return Err(error(line_no + 1, "content after terminator")),
            }
        } else if let Some(rest) = line.strip_prefix("a ") {
            if saw_rule {
                return Err(error(line_no, "atom record after rule records"));
            }
            let Some((id_field, atom_text)) = rest.split_once(' ') else {
                return Err(error(line_no, "atom record needs an id and a text"));
            };
            let id = parse_count(id_field)
                .ok_or_else(|| error(line_no, format!("bad atom id `{id_field}`")))?;
            if id != texts.len() + 1 {
                return Err(error(
                    line_no,
                    format!("atom ids must be dense: expected {}", texts.len() + 1),
                ));
            }
            if !valid_atom_text(atom_text) {
                return Err(error(
                    line_no,
                    format!("`{atom_text}` is not a canonical ground atom"),
                ));
            }
            if let Some(prev) = texts.last() {
                if prev.as_str() >= atom_text {
                    return Err(error(line_no, "atom texts must ascend lexicographically"));
                }
            }
            texts.push(atom_text.to_string());
        } else if let Some(rest) = line.strip_prefix("r ") {
            saw_rule = true;
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() < 3 {
                return Err(error(line_no, "rule record needs head and two counts"));
            }
            let mut ids = fields.iter().map(|f| {
                parse_count(f).ok_or_else(|| error(line_no, format!("bad rule field `{f}`")))
            });
            let head = ids.next().unwrap()?;
            let npos = ids.next().unwrap()?;
            let nneg = ids.next().unwrap()?;
            let body = ids.collect::<Result<Vec<usize>, FormatError>>()?;
            if body.len() != npos + nneg {
                return Err(error(
                    line_no,
                    format!("expected {} body ids, found {}", npos + nneg, body.len()),
                ));
            }
            let (pos, neg) = body.split_at(npos);
            for &id in std::iter::once(&head).chain(pos).chain(neg) {
                if id == 0 || id > texts.len() {
                    return Err(error(line_no, format!("unknown atom id {id}")));
                }
            }
            for part in [pos, neg] {
                if part.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(error(line_no, "body ids must ascend without duplicates"));
                }
            }
            let rule = GroundRule {
                head,
                pos: pos.to_vec(),
                neg: neg.to_vec(),
            };
            if let Some(prev) = rules.last() {
                if *prev >= rule {
                    return Err(error(line_no, "rule records must ascend without duplicates"));
                }
            }
            rules.push(rule);
        } else {
            return Err(error(line_no, format!("unrecognized record `{line}`")));
        }
    }

    let atoms = AtomTable::from_sorted_texts(texts);
    Ok(ResidualProgram::from_parts(atoms, rules))
}
