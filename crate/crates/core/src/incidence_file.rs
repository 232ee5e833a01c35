//! Incidence files and enumeration certificates.
//!
//! An incidence file is a JSON object with keys `degree` and `points`, plus
//! optional `name` and `expect`:
//!
//! ```text
//! {
//!   "name": "fano",
//!   "degree": 7,
//!   "points": [
//!     [0, 1, 2],
//!     [0, 3, 4]
//!   ],
//!   "expect": "fail"
//! }
//! ```
//!
//! Files written by [`write_incidence`] parse back to the same structure and
//! re-serialize to the same bytes.

use crate::enumerate::EnumerationCertificate;
use crate::lattice::{IncidenceStructure, LatticeError, LatticeResidue};
use crate::report::Outcome;
use serde::Deserialize;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

/// Parsed incidence file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceFile {
    pub name: Option<String>,
    pub structure: IncidenceStructure,
    pub expect: Option<Outcome>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    degree: usize,
    points: Vec<Vec<usize>>,
    expect: Option<Outcome>,
}

pub fn parse_incidence(text: &str) -> Result<IncidenceFile, ParseError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        ParseError {
            line,
            column,
            token: token_at(text, line, column),
            message: e
                .to_string()
                .split(" at line")
                .next()
                .unwrap_or_default()
                .to_string(),
        }
    })?;
    let structure = IncidenceStructure::new(raw.degree, raw.points).map_err(|e| {
        let (line, column, token) = locate_semantic(text, &e);
        ParseError {
            line,
            column,
            token,
            message: e.to_string(),
        }
    })?;
    Ok(IncidenceFile {
        name: raw.name,
        structure,
        expect: raw.expect,
    })
}

fn token_at(text: &str, line: usize, column: usize) -> String {
    let Some(src) = text.lines().nth(line.saturating_sub(1)) else {
        return "<end of input>".to_string();
    };
    let chars: Vec<char> = src.chars().collect();
    if chars.is_empty() {
        return "<empty line>".to_string();
    }
    // serde_json reports the column just past the offending character
    let mut at = column.saturating_sub(1).min(chars.len() - 1);
    while at > 0 && chars[at].is_whitespace() {
        at -= 1;
    }
    let is_word = |c: char| c.is_alphanumeric() || c == '_' || c == '-' || c == '"' || c == '.';
    if !is_word(chars[at]) {
        return chars[at].to_string();
    }
    let mut lo = at;
    while lo > 0 && is_word(chars[lo - 1]) {
        lo -= 1;
    }
    let mut hi = at + 1;
    while hi < chars.len() && is_word(chars[hi]) {
        hi += 1;
    }
    chars[lo..hi].iter().collect()
}

/// Line, column and text of the `index`-th inner array of `"points"`.
fn point_span(text: &str, index: usize) -> Option<(usize, usize, String)> {
    let key = text.find("\"points\"")?;
    let open = key + text[key..].find('[')?;
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut start = None;
    for (i, &b) in bytes.iter().enumerate().skip(open) {
        match b {
            b'[' => {
                depth += 1;
                if depth == 2 {
                    if seen == index {
                        start = Some(i);
                    }
                    seen += 1;
                }
            }
            b']' => {
                if depth == 2 {
                    if let Some(s) = start {
                        let (line, column) = line_col(text, s);
                        return Some((line, column, text[s..=i].to_string()));
                    }
                }
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    None
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

fn locate_semantic(text: &str, err: &LatticeError) -> (usize, usize, String) {
    let point = match err {
        LatticeError::PointTooSmall { point, .. }
        | LatticeError::LineOutOfRange { point, .. }
        | LatticeError::RepeatedLine { point, .. } => Some(*point),
        LatticeError::PairCoveredTwice { second, .. } => Some(*second),
        _ => None,
    };
    if let Some(span) = point.and_then(|p| point_span(text, p)) {
        return span;
    }
    match text.find("\"degree\"") {
        Some(off) => {
            let (line, column) = line_col(text, off);
            let token = text[off..]
                .lines()
                .next()
                .unwrap_or_default()
                .trim()
                .to_string();
            (line, column, token)
        }
        None => (1, 1, String::new()),
    }
}

fn write_points(out: &mut String, indent: &str, points: &[Vec<usize>]) {
    if points.is_empty() {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    for (i, p) in points.iter().enumerate() {
        let body: Vec<String> = p.iter().map(usize::to_string).collect();
        let _ = write!(out, "{indent}  [{}]", body.join(", "));
        out.push_str(if i + 1 < points.len() { ",\n" } else { "\n" });
    }
    let _ = write!(out, "{indent}]");
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// One object, its fields at `indent + 2`. `extra` values are raw JSON.
fn write_entry(
    out: &mut String,
    indent: &str,
    name: Option<&str>,
    inc: &IncidenceStructure,
    extra: &[(&str, String)],
) {
    let inner = format!("{indent}  ");
    let mut fields: Vec<String> = Vec::new();
    if let Some(name) = name {
        fields.push(format!("{inner}\"name\": {}", json_string(name)));
    }
    fields.push(format!("{inner}\"degree\": {}", inc.degree()));
    let mut pts = format!("{inner}\"points\": ");
    write_points(&mut pts, &inner, inc.points());
    fields.push(pts);
    for (k, v) in extra {
        fields.push(format!("{inner}{}: {v}", json_string(k)));
    }
    let _ = write!(out, "{{\n{}\n{indent}}}", fields.join(",\n"));
}

pub fn write_incidence(file: &IncidenceFile) -> String {
    let mut out = String::new();
    let extra: Vec<(&str, String)> = file
        .expect
        .map(|e| ("expect", json_string(e.as_str())))
        .into_iter()
        .collect();
    write_entry(&mut out, "", file.name.as_deref(), &file.structure, &extra);
    out.push('\n');
    out
}

/// Certificate document: degree, optional reason, deterministic stats, and
/// one incidence entry per class. With `verification`, each entry carries
/// its lattice residue and verdict.
pub fn write_certificate(
    cert: &EnumerationCertificate,
    verification: Option<&[LatticeResidue]>,
) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"degree\": {},", cert.degree);
    if let Some(reason) = &cert.reason {
        let _ = writeln!(out, "  \"reason\": {},", json_string(reason));
    }
    let _ = writeln!(out, "  \"classes\": {},", cert.structures.len());
    let _ = writeln!(
        out,
        "  \"stats\": {},",
        serde_json::to_string(&cert.stats).expect("stats serialize")
    );
    if cert.structures.is_empty() {
        out.push_str("  \"structures\": []\n}\n");
        return out;
    }
    out.push_str("  \"structures\": [\n");
    for (i, s) in cert.structures.iter().enumerate() {
        let name = format!("triple-only-d{}-class{}", cert.degree, i);
        let extra: Vec<(&str, String)> = match verification.and_then(|v| v.get(i)) {
            Some(r) => vec![
                ("lattice_residue", r.residue.value.to_string()),
                (
                    "verdict",
                    json_string(Outcome::from_bool(r.passes()).as_str()),
                ),
            ],
            None => Vec::new(),
        };
        out.push_str("    ");
        write_entry(&mut out, "    ", Some(&name), s, &extra);
        out.push_str(if i + 1 < cert.structures.len() {
            ",\n"
        } else {
            "\n"
        });
    }
    out.push_str("  ]\n}\n");
    out
}

/// Reads the structures back out of a certificate document.
pub fn parse_certificate_structures(text: &str) -> Result<Vec<IncidenceStructure>, ParseError> {
    #[derive(Deserialize)]
    struct Entry {
        degree: usize,
        points: Vec<Vec<usize>>,
    }
    #[derive(Deserialize)]
    struct Doc {
        structures: Vec<Entry>,
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        token: token_at(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    doc.structures
        .into_iter()
        .map(|e| {
            IncidenceStructure::new(e.degree, e.points).map_err(|err| ParseError {
                line: 1,
                column: 1,
                token: String::new(),
                message: err.to_string(),
            })
        })
        .collect()
}
