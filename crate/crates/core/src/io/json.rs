//! JSON inputs: energy ledgers and reactions, transition tables, spin-site
//! models and level lists. Schema violations report the line and column
//! from the JSON reader plus a JSON pointer to the offending value.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_path_to_error::Segment;

use super::{line_col, ParseDiagnostic, ParseResult};
use crate::optics::TransitionRecord;
use crate::thermo::{EnergyLedger, LedgerEntry, LevelInput, Reaction, ThermoError};
use crate::zfs::SpinSiteModel;

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// serde_json counts columns in bytes; diagnostics count characters. The
/// reader's own " at line L column C" suffix is dropped for the same reason.
fn located(text: &str, e: &serde_json::Error) -> ParseDiagnostic {
    let line = e.line().max(1);
    let src = text.split('\n').nth(line - 1).unwrap_or("");
    let mut b = e.column().min(src.len());
    while !src.is_char_boundary(b) {
        b += 1;
    }
    let column = src[..b].chars().count() + e.column().saturating_sub(src.len()).min(1);
    let mut msg = e.to_string();
    if let Some(i) = msg.rfind(" at line ") {
        msg.truncate(i);
    }
    ParseDiagnostic::error(line, column.max(1), msg)
}

/// Deserialize `T`, mapping every failure to a located diagnostic.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> ParseResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let ptr = pointer(e.path());
        located(text, &e.into_inner()).with_pointer(ptr)
    })?;
    de.end().map_err(|e| located(text, &e))?;
    Ok(value)
}

/// Byte offsets of the elements of an array: the top-level array when
/// `key` is `None`, otherwise the array under that top-level key.
fn array_element_offsets(text: &str, key: Option<&str>) -> Vec<usize> {
    let b = text.as_bytes();
    let target = if key.is_some() { 2 } else { 1 };
    let mut depth = 0usize;
    let mut i = 0;
    let mut out = Vec::new();
    let mut last_key: Option<&str> = None;
    let mut collecting = false;
    let mut expect = false;
    while i < b.len() {
        let c = b[i];
        if collecting && depth == target && expect && !c.is_ascii_whitespace() && c != b']' {
            out.push(i);
            expect = false;
        }
        match c {
            b'"' => {
                let start = i + 1;
                i += 1;
                while i < b.len() && b[i] != b'"' {
                    if b[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                if depth == 1 && !collecting {
                    last_key = text.get(start..i.min(b.len()));
                }
            }
            b'[' | b'{' => {
                depth += 1;
                if c == b'[' && depth == target && out.is_empty() && !collecting && (key.is_none() || last_key == key) {
                    collecting = true;
                    expect = true;
                }
            }
            b']' | b'}' => {
                if collecting && depth == target {
                    break;
                }
                depth = depth.saturating_sub(1);
            }
            b',' if collecting && depth == target => expect = true,
            _ => {}
        }
        i += 1;
    }
    out
}

fn locate_element(text: &str, key: Option<&str>, index: usize, message: String) -> ParseDiagnostic {
    let offsets = array_element_offsets(text, key);
    let (line, col) = offsets.get(index).map_or((1, 1), |&o| line_col(text, o));
    let ptr = match key {
        Some(k) => format!("/{k}/{index}"),
        None => format!("/{index}"),
    };
    ParseDiagnostic::error(line, col, message).with_pointer(ptr)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerDoc {
    entries: Vec<LedgerEntry>,
}

fn ledger_from(entries: Vec<LedgerEntry>, text: &str, key: Option<&str>) -> ParseResult<EnergyLedger> {
    EnergyLedger::new(entries.clone()).map_err(|e| {
        let idx = match &e {
            ThermoError::DuplicateLabel(l) => entries.iter().rposition(|x| &x.label == l),
            ThermoError::NonFinite(l) => entries.iter().position(|x| &x.label == l),
            _ => None,
        };
        locate_element(text, key, idx.unwrap_or(0), e.to_string())
    })
}

/// A bare array of entries or `{"entries": [...]}`.
pub fn parse_ledger(text: &str) -> ParseResult<EnergyLedger> {
    let v: serde_json::Value = parse_json(text)?;
    if v.is_array() {
        ledger_from(parse_json(text)?, text, None)
    } else {
        ledger_from(parse_json::<LedgerDoc>(text)?.entries, text, Some("entries"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionInput {
    pub ledger: EnergyLedger,
    /// Not yet checked for balance; that is a domain question.
    pub reaction: Reaction,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReactionDoc {
    ledger: Vec<LedgerEntry>,
    reaction: Reaction,
}

/// `{"ledger": [...], "reaction": {"lhs": [...], "rhs": [...]}}`.
pub fn parse_reaction_input(text: &str) -> ParseResult<ReactionInput> {
    let d: ReactionDoc = parse_json(text)?;
    let ledger = ledger_from(d.ledger, text, Some("ledger"))?;
    Ok(ReactionInput { ledger, reaction: d.reaction })
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsInput {
    pub transitions: Vec<TransitionRecord>,
    /// Refractive index for records that do not carry their own.
    #[serde(default)]
    pub n_r: Option<f64>,
}

/// A bare array of records or `{"transitions": [...], "n_r": ...}`.
pub fn parse_transitions(text: &str) -> ParseResult<TransitionsInput> {
    let v: serde_json::Value = parse_json(text)?;
    let (input, key) = if v.is_array() {
        (TransitionsInput { transitions: parse_json(text)?, n_r: None }, None)
    } else {
        (parse_json::<TransitionsInput>(text)?, Some("transitions"))
    };
    for (k, t) in input.transitions.iter().enumerate() {
        t.validate().map_err(|e| locate_element(text, key, k, e.to_string()))?;
    }
    if let Some(n) = input.n_r {
        if !(n.is_finite() && n > 0.0) {
            return Err(ParseDiagnostic::error(1, 1, "n_r must be positive").with_pointer("/n_r"));
        }
    }
    Ok(input)
}

pub fn parse_spinsites(text: &str) -> ParseResult<SpinSiteModel> {
    let m: SpinSiteModel = parse_json(text)?;
    m.validate().map_err(|e| ParseDiagnostic::error(1, 1, e.to_string()).with_pointer("/sites"))?;
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsInput {
    pub levels: Vec<LevelInput>,
    #[serde(default)]
    pub anchor: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
}

/// A bare array of levels or `{"levels": [...], "anchor": ..., "gap": ...}`.
pub fn parse_levels(text: &str) -> ParseResult<LevelsInput> {
    let v: serde_json::Value = parse_json(text)?;
    let (input, key) = if v.is_array() {
        (LevelsInput { levels: parse_json(text)?, anchor: None, gap: None }, None)
    } else {
        (parse_json::<LevelsInput>(text)?, Some("levels"))
    };
    if input.levels.is_empty() {
        return Err(ParseDiagnostic::error(1, 1, "at least one level is required").with_pointer(format!("/{}", key.unwrap_or(""))));
    }
    for (k, l) in input.levels.iter().enumerate() {
        if l.delta_e_ct.is_some() == l.level.is_some() {
            return Err(locate_element(text, key, k, ThermoError::AmbiguousLevel(l.label.clone()).to_string()));
        }
    }
    Ok(input)
}
