use std::collections::{BTreeSet, VecDeque};

use super::{invalid, EditError};
use crate::constraints::{self, LegalityReport};
use crate::model::*;

/// Offset letters in generation order.
const LETTERS: [char; 28] = [
    'а', 'б', 'в', 'г', 'д', 'е', 'ж', 'з', 'и', 'к', 'л', 'м', 'н', 'о', 'п', 'р', 'с', 'т', 'у', 'ф', 'х', 'ц',
    'ч', 'ш', 'щ', 'э', 'ю', 'я',
];

/// The `n`-th letter of the sequence: single letters first, then doubled ones (`аа`, `бб`, ...).
pub fn letter_at(n: usize) -> String {
    let c = LETTERS[n % LETTERS.len()];
    std::iter::repeat_n(c, n / LETTERS.len() + 1).collect()
}

/// First letter of the sequence not used by any offset.
pub fn next_letter(s: &Scheme) -> String {
    let used: BTreeSet<&str> = s.offsets.values().map(|o| o.letter.as_str()).collect();
    (0..)
        .map(letter_at)
        .find(|l| !used.contains(l.as_str()))
        .expect("sequence is unbounded")
}

#[derive(Debug, Clone, PartialEq)]
pub enum OffsetSpecKind {
    General { axis: Axis, plane_coord: f64 },
    /// Breaks as `(pipe, position from its start)`; the displaced side is
    /// everything reachable from `seed` without crossing a broken pipe.
    Local { breaks: Vec<(PipeId, f64)>, seed: PointId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffsetSpec {
    pub ort: Vec3,
    pub magnitude: f64,
    pub kind: OffsetSpecKind,
    /// Explicit letter; the next free one otherwise.
    pub letter: Option<String>,
}

impl OffsetSpec {
    pub fn general(axis: Axis, plane_coord: f64, positive: bool, magnitude: f64) -> Self {
        OffsetSpec {
            ort: if positive { axis.unit() } else { -axis.unit() },
            magnitude,
            kind: OffsetSpecKind::General { axis, plane_coord },
            letter: None,
        }
    }
}

fn side_from(s: &Scheme, seed: PointId, broken: &BTreeSet<PipeId>) -> BTreeSet<PointId> {
    let adj = s.point_adjacency();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([seed]);
    while let Some(p) = queue.pop_front() {
        if !seen.insert(p) {
            continue;
        }
        for (q, via) in adj.get(&p).into_iter().flatten() {
            if !broken.contains(via) && !seen.contains(q) {
                queue.push_back(*q);
            }
        }
    }
    seen
}

fn new_break(s: &Scheme, pipe: PipeId, offset: OffsetId, placement: f64, magnitude: f64) -> BreakLine {
    let o = &s.settings.objects;
    BreakLine {
        pipe,
        offset,
        paper_len: if magnitude < 0.0 { o.break_paper_len } else { 0.0 },
        placement,
        label_shift_axial: o.break_label_axial,
        label_shift_normal: o.break_label_normal,
        glyph: BreakGlyph::Dots,
    }
}

/// Adds an offset with its break lines.
///
/// General offsets get a break on every crossing pipe; local offsets get
/// the requested ones and store the displaced side explicitly.
pub fn add_offset(s: &mut Scheme, spec: OffsetSpec) -> Result<OffsetId, EditError> {
    if !(spec.ort.iter().all(|v| v.is_finite()) && spec.magnitude.is_finite()) {
        return Err(EditError::NonFinite);
    }
    if (spec.ort.norm() - 1.0).abs() > 1e-9 {
        return Err(invalid("offset direction must be a unit vector"));
    }
    if spec.magnitude == 0.0 {
        return Err(invalid("offset magnitude must be non-zero"));
    }
    let letter = match spec.letter {
        Some(l) if s.offsets.values().any(|o| o.letter == l) => {
            return Err(invalid(format!("letter {l:?} is already used")))
        }
        Some(l) => l,
        None => next_letter(s),
    };
    match spec.kind {
        OffsetSpecKind::General { axis, plane_coord } => {
            if !plane_coord.is_finite() {
                return Err(EditError::NonFinite);
            }
            if (spec.ort.dot(&axis.unit()).abs() - 1.0).abs() > 1e-9 {
                return Err(invalid("general offset must move along the plane normal"));
            }
            let offset = Offset {
                letter,
                ort: spec.ort,
                magnitude: spec.magnitude,
                kind: OffsetKind::General { axis, plane_coord },
            };
            let violations = constraints::general_offset_geometry(s, &offset);
            if !violations.is_empty() {
                return Err(EditError::IllegalOffset(violations));
            }
            let crossing = constraints::crossing_pipes(s, &offset);
            let id = s.offsets.insert(offset);
            for pipe in crossing {
                let b = new_break(s, pipe, id, 0.0, spec.magnitude);
                s.breaks.insert(b);
            }
            Ok(id)
        }
        OffsetSpecKind::Local { breaks, seed } => {
            s.point(seed)?;
            for &(pipe, t) in &breaks {
                let len = s.pipe_length(pipe)?;
                if !(t > 0.0 && t < len) {
                    return Err(invalid(format!("break position {t} not inside {pipe}")));
                }
            }
            let broken: BTreeSet<PipeId> = breaks.iter().map(|(p, _)| *p).collect();
            let displaced_points = side_from(s, seed, &broken);
            let id = s.offsets.insert(Offset {
                letter,
                ort: spec.ort,
                magnitude: spec.magnitude,
                kind: OffsetKind::Local { displaced_points },
            });
            let mut added = Vec::new();
            for (pipe, t) in breaks {
                let b = new_break(s, pipe, id, t, spec.magnitude);
                added.push(s.breaks.insert(b));
            }
            let report: LegalityReport = constraints::check_local_offset(s, id);
            if !report.is_ok() {
                for b in added {
                    s.breaks.remove(b);
                }
                s.offsets.remove(id);
                return Err(EditError::IllegalOffset(vec![report]));
            }
            Ok(id)
        }
    }
}

/// Removes an offset together with all its break lines.
pub fn delete_offset(s: &mut Scheme, id: OffsetId) -> Result<usize, EditError> {
    s.offsets.remove(id).ok_or(ModelError::UnknownOffset(id))?;
    let before = s.breaks.len();
    s.breaks.retain(|_, b| b.offset != id);
    Ok(before - s.breaks.len())
}
