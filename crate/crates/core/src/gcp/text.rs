//! Line-oriented text form of sequences.
//!
//! Binary sequences print as `+`/`-` (value 0 is `+`, value 1 is `-`); the
//! Unicode minus sign is accepted on input. Sequences over larger alphabets
//! print one digit per element when `q <= 10` and whitespace-separated
//! integers otherwise.

use super::ZqSequence;
use crate::error::{Error, Result};

pub fn format_sequence(seq: &ZqSequence) -> String {
    let q = seq.modulus();
    if q == 2 {
        seq.values()
            .iter()
            .map(|&v| if v == 0 { '+' } else { '-' })
            .collect()
    } else if q <= 10 {
        seq.values()
            .iter()
            .map(|&v| char::from_digit(v, 10).expect("value below 10"))
            .collect()
    } else {
        seq.values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn parse_sequence(line: &str, q: u32) -> Result<ZqSequence> {
    let line = line.trim();
    if line.is_empty() {
        return Err(Error::EmptySequence);
    }
    let values = if q == 2 {
        line.chars()
            .map(|ch| match ch {
                '+' => Ok(0),
                '-' | '\u{2212}' => Ok(1),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u32>>>()?
    } else if q <= 10 && !line.contains(char::is_whitespace) {
        line.chars()
            .map(|ch| {
                ch.to_digit(10)
                    .ok_or_else(|| Error::Parse(format!("unexpected character {ch:?}")))
            })
            .collect::<Result<Vec<u32>>>()?
    } else {
        line.split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<u32>>>()?
    };
    ZqSequence::new(q, values)
}

/// Parses every non-empty, non-comment line of `text`.
pub fn parse_sequences(text: &str, q: u32) -> Result<Vec<ZqSequence>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_sequence(l, q))
        .collect()
}
