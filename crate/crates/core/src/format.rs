//! Sequence file formats.
//!
//! Text form:
//!
//! ```text
//! N 4
//! T 16
//! 0 3 2 1 0 3 2 1 0 3 2 1 0 3 2 1
//! ```
//!
//! JSON form: `{"n_channels": 4, "entries": [0, 3, 2, 1, ...]}`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::sequence::ChannelSequence;

pub fn to_text(seq: &ChannelSequence) -> String {
    let body: Vec<String> = seq.entries().iter().map(|c| c.to_string()).collect();
    format!(
        "N {}\nT {}\n{}\n",
        seq.n_channels(),
        seq.period(),
        body.join(" ")
    )
}

pub fn parse_text(input: &str) -> Result<ChannelSequence> {
    let mut lines = input.lines().filter(|l| !l.trim().is_empty());
    let n = header_value(lines.next(), "N")?;
    let t = header_value(lines.next(), "T")?;
    let body = lines
        .next()
        .ok_or_else(|| Error::Parse("missing entries line".into()))?;
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("unexpected trailing line {extra:?}")));
    }
    let entries = body
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad channel entry {tok:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != t {
        return Err(Error::Parse(format!(
            "header declares T = {t} but {} entries follow",
            entries.len()
        )));
    }
    ChannelSequence::new(n, entries).map_err(|e| Error::Parse(e.to_string()))
}

fn header_value(line: Option<&str>, key: &str) -> Result<usize> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing `{key}` header")))?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| Error::Parse(format!("bad `{key}` value {v:?}"))),
        _ => Err(Error::Parse(format!(
            "expected `{key} <int>`, got {line:?}"
        ))),
    }
}

pub fn to_json(seq: &ChannelSequence) -> Result<String> {
    Ok(serde_json::to_string(seq)?)
}

pub fn parse_json(input: &str) -> Result<ChannelSequence> {
    serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses either format, choosing JSON when the first non-blank byte is `{`.
pub fn parse_any(input: &str) -> Result<ChannelSequence> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

pub fn read_sequence(path: &Path) -> Result<ChannelSequence> {
    let text = std::fs::read_to_string(path)?;
    parse_any(&text)
}
