use crate::model::rich::{self, SpecialSymbol, TextPiece};
use crate::model::*;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SlopeError {
    #[error("vertical pipe has no {0} slope")]
    Vertical(&'static str),
}

/// Slope of a pipe as `(|dz|, horizontal length)`.
pub fn pipe_slope(s: &Scheme, pipe: PipeId) -> Result<(f64, f64), ModelError> {
    let g = s.pipe_geom(pipe)?;
    let d = g.end - g.start;
    Ok((d.z.abs(), d.x.hypot(d.y)))
}

/// Slope value as stored in text lines (escaped form).
///
/// Percent prints `100·dz/h` with a `%` sign, ratio prints `1:n` with
/// `n = h/dz`, angle prints `atan(dz/h)` in degrees. A level pipe prints a
/// bare zero in every format.
pub fn format_slope(dz: f64, horizontal: f64, format: SlopeFormat) -> Result<String, SlopeError> {
    let p = format.precision as usize;
    let degree = SpecialSymbol::Degree.escape();
    if dz == 0.0 && horizontal > 0.0 {
        return Ok(match format.kind {
            SlopeKind::Percent => "0%".to_string(),
            SlopeKind::Ratio => "0".to_string(),
            SlopeKind::Angle => format!("0{degree}"),
        });
    }
    match format.kind {
        SlopeKind::Percent if horizontal == 0.0 => Err(SlopeError::Vertical("percent")),
        SlopeKind::Ratio if horizontal == 0.0 => Err(SlopeError::Vertical("ratio")),
        SlopeKind::Percent => Ok(format!("{:.p$}%", 100.0 * dz / horizontal)),
        SlopeKind::Ratio => Ok(format!("1:{:.p$}", horizontal / dz)),
        SlopeKind::Angle => Ok(format!("{:.p$}{degree}", dz.atan2(horizontal).to_degrees())),
    }
}

fn is_value_char(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '.' | ':' | '%' | '-' | ',')
}

/// Replaces the value after every slope symbol of `line`.
///
/// The value is the run of digits, separators and `%` after the symbol
/// and optional spaces, plus a directly following degree symbol.
fn rewrite_line(line: &str, value: &str) -> String {
    let pieces = rich::parse(line);
    let value_pieces = rich::parse(value);
    let mut out: Vec<TextPiece> = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let piece = pieces[i].clone();
        i += 1;
        let TextPiece::Symbol(sym) = piece else {
            out.push(piece);
            continue;
        };
        out.push(piece);
        if !sym.is_slope() {
            continue;
        }
        let mut spaces = String::from(" ");
        let mut tail = String::new();
        let mut consumed_to_end = true;
        if let Some(TextPiece::Plain(s)) = pieces.get(i) {
            let lead = s.len() - s.trim_start_matches(' ').len();
            spaces = s[..lead].to_string();
            let rest = &s[lead..];
            let end = rest.find(|c| !is_value_char(c)).unwrap_or(rest.len());
            consumed_to_end = end == rest.len();
            tail = rest[end..].to_string();
            i += 1;
        }
        if consumed_to_end && matches!(pieces.get(i), Some(TextPiece::Symbol(SpecialSymbol::Degree))) {
            i += 1;
        }
        out.push(TextPiece::Plain(spaces));
        out.extend(value_pieces.iter().cloned());
        if !tail.is_empty() {
            out.push(TextPiece::Plain(tail));
        }
    }
    // Merge adjacent plain runs so the stored form stays canonical.
    let mut merged: Vec<TextPiece> = Vec::new();
    for p in out {
        match (merged.last_mut(), p) {
            (Some(TextPiece::Plain(a)), TextPiece::Plain(b)) => a.push_str(&b),
            (_, p) => merged.push(p),
        }
    }
    rich::join(&merged)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlopeSync {
    pub updated: usize,
    /// Texts left unchanged because the pipe is vertical.
    pub flagged: Vec<TextId>,
}

/// Rewrites slope values in texts whose main leader points at `pipe`.
pub fn sync_slope_texts(s: &mut Scheme, pipe: PipeId) -> Result<SlopeSync, ModelError> {
    let (dz, h) = pipe_slope(s, pipe)?;
    let mut out = SlopeSync::default();
    let targets: Vec<(TextId, SlopeFormat)> = s
        .texts
        .iter()
        .filter(|(_, t)| s.main_leader_pipe(t) == Some(pipe) && t.has_slope_symbol())
        .filter_map(|(id, t)| t.slope_format.map(|f| (id, f)))
        .collect();
    for (id, format) in targets {
        let text = s.texts.get_mut(id).expect("collected above");
        match format_slope(dz, h, format) {
            Ok(value) => {
                let lines: Vec<String> = text
                    .lines
                    .iter()
                    .map(|l| {
                        if rich::contains_slope_symbol(l) {
                            rewrite_line(l, &value)
                        } else {
                            l.clone()
                        }
                    })
                    .collect();
                if lines != text.lines {
                    text.lines = lines;
                    out.updated += 1;
                }
            }
            Err(_) => out.flagged.push(id),
        }
    }
    Ok(out)
}

pub fn sync_all_slope_texts(s: &mut Scheme) -> SlopeSync {
    let mut out = SlopeSync::default();
    let pipes: Vec<PipeId> = s.pipes.ids().collect();
    for p in pipes {
        if let Ok(r) = sync_slope_texts(s, p) {
            out.updated += r.updated;
            out.flagged.extend(r.flagged);
        }
    }
    out
}
