//! Text lines with special drafting symbols.
//!
//! Symbols are stored inline as named escapes: `{SLOPE_LEFT}`,
//! `{SLOPE_RIGHT}`, `{DEGREE}`, `{DIAMETER}`. A literal brace is doubled.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialSymbol {
    SlopeLeft,
    SlopeRight,
    Degree,
    Diameter,
}

impl SpecialSymbol {
    pub const ALL: [SpecialSymbol; 4] = [
        SpecialSymbol::SlopeLeft,
        SpecialSymbol::SlopeRight,
        SpecialSymbol::Degree,
        SpecialSymbol::Diameter,
    ];

    pub fn escape_name(self) -> &'static str {
        match self {
            SpecialSymbol::SlopeLeft => "SLOPE_LEFT",
            SpecialSymbol::SlopeRight => "SLOPE_RIGHT",
            SpecialSymbol::Degree => "DEGREE",
            SpecialSymbol::Diameter => "DIAMETER",
        }
    }

    pub fn escape(self) -> String {
        format!("{{{}}}", self.escape_name())
    }

    pub fn is_slope(self) -> bool {
        matches!(self, SpecialSymbol::SlopeLeft | SpecialSymbol::SlopeRight)
    }

    fn from_escape_name(name: &str) -> Option<SpecialSymbol> {
        SpecialSymbol::ALL
            .into_iter()
            .find(|s| s.escape_name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TextPiece {
    Plain(String),
    Symbol(SpecialSymbol),
}

/// Splits an escaped line into plain runs and symbols.
///
/// Unknown escapes are kept as plain text.
pub fn parse(line: &str) -> Vec<TextPiece> {
    let mut out = Vec::new();
    let mut plain = String::new();
    let mut rest = line;
    while let Some(c) = rest.chars().next() {
        if rest.starts_with("{{") {
            plain.push('{');
            rest = &rest[2..];
        } else if rest.starts_with("}}") {
            plain.push('}');
            rest = &rest[2..];
        } else if c == '{' {
            match rest[1..].find('}').and_then(|end| {
                SpecialSymbol::from_escape_name(&rest[1..1 + end]).map(|s| (s, end))
            }) {
                Some((sym, end)) => {
                    if !plain.is_empty() {
                        out.push(TextPiece::Plain(std::mem::take(&mut plain)));
                    }
                    out.push(TextPiece::Symbol(sym));
                    rest = &rest[end + 2..];
                }
                None => {
                    plain.push('{');
                    rest = &rest[1..];
                }
            }
        } else {
            plain.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    if !plain.is_empty() {
        out.push(TextPiece::Plain(plain));
    }
    out
}

/// Inverse of [`parse`].
pub fn join(pieces: &[TextPiece]) -> String {
    let mut out = String::new();
    for piece in pieces {
        match piece {
            TextPiece::Plain(s) => {
                for c in s.chars() {
                    match c {
                        '{' => out.push_str("{{"),
                        '}' => out.push_str("}}"),
                        _ => out.push(c),
                    }
                }
            }
            TextPiece::Symbol(sym) => {
                let _ = write!(out, "{{{}}}", sym.escape_name());
            }
        }
    }
    out
}

/// Number of character cells the line occupies; each symbol counts as one.
pub fn cell_count(pieces: &[TextPiece]) -> usize {
    pieces
        .iter()
        .map(|p| match p {
            TextPiece::Plain(s) => s.chars().count(),
            TextPiece::Symbol(_) => 1,
        })
        .sum()
}

pub fn contains_slope_symbol(line: &str) -> bool {
    parse(line)
        .iter()
        .any(|p| matches!(p, TextPiece::Symbol(s) if s.is_slope()))
}
