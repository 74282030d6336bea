use std::collections::{BTreeMap, BTreeSet};

use super::{LegalityReport, Rule};
use crate::model::{DimDir, DimPoint, PointId, Offset, OffsetId, OffsetKind, PipeId, Scheme, Subject, Vec3};

const PARALLEL_EPS: f64 = 1e-9;

/// Pipes with exactly one endpoint on the displaced side of `offset`.
pub fn crossing_pipes(scheme: &Scheme, offset: &Offset) -> Vec<PipeId> {
    scheme
        .pipes
        .ids()
        .filter(|id| {
            scheme
                .pipe_geom(*id)
                .map(|g| offset.displaces(g.start_id, &g.start) != offset.displaces(g.end_id, &g.end))
                .unwrap_or(false)
        })
        .collect()
}

fn parallel(a: &Vec3, b: &Vec3) -> bool {
    a.cross(b).norm() <= PARALLEL_EPS * a.norm() * b.norm()
}

/// Crossing pipes and dimension lines of a general offset that are not
/// normal to its plane. Break lines are not considered.
pub fn general_offset_geometry(scheme: &Scheme, offset: &Offset) -> Vec<LegalityReport> {
    let OffsetKind::General { axis, .. } = offset.kind else {
        return Vec::new();
    };
    let normal = axis.unit();
    let mut out = Vec::new();
    for pipe in crossing_pipes(scheme, offset) {
        let dir = scheme.pipe_geom(pipe).map(|g| g.dir()).unwrap_or_default();
        if !parallel(&dir, &normal) {
            out.push(LegalityReport::violation(
                Subject::Pipe(pipe),
                Rule::ObliqueCrossing,
                format!("{pipe} crosses the {axis} plane of offset {:?} obliquely", offset.letter),
            ));
        }
    }
    for (id, d) in scheme.dimensions.iter() {
        let moved: Vec<bool> = d
            .points
            .iter()
            .filter_map(|p| dim_point_moved(scheme, offset, p))
            .collect();
        let split = moved.iter().any(|m| *m) && moved.iter().any(|m| !*m);
        if !split {
            continue;
        }
        let dir = match d.dim_dir {
            DimDir::Axis(a) => a.unit(),
            DimDir::AlongPipe(p) => scheme.pipe_geom(p).map(|g| g.dir()).unwrap_or_default(),
        };
        if !parallel(&dir, &normal) {
            out.push(LegalityReport::violation(
                Subject::Dimension(id),
                Rule::DimensionCrossing,
                format!("dimension line crosses the {axis} plane of offset {:?} obliquely", offset.letter),
            ));
        }
    }
    out
}

/// Displacement test for a dimension point under a general offset, which
/// may not be stored yet.
fn dim_point_moved(scheme: &Scheme, offset: &Offset, p: &DimPoint) -> Option<bool> {
    let at = scheme.dim_point_position(p).ok()?;
    let id = match p {
        DimPoint::Spatial(pt) => *pt,
        DimPoint::BlockAnchor(_) => PointId(u32::MAX),
    };
    Some(offset.displaces(id, &at))
}

/// Violations of a stored general offset, including crossing pipes without a break.
pub fn check_general_offset(scheme: &Scheme, id: OffsetId) -> Vec<LegalityReport> {
    let Some(offset) = scheme.offsets.get(id) else {
        return Vec::new();
    };
    let mut out = general_offset_geometry(scheme, offset);
    let broken: BTreeSet<PipeId> = scheme
        .breaks
        .values()
        .filter(|b| b.offset == id)
        .map(|b| b.pipe)
        .collect();
    for pipe in crossing_pipes(scheme, offset) {
        if !broken.contains(&pipe) {
            out.push(LegalityReport::violation(
                Subject::Pipe(pipe),
                Rule::MissingBreak,
                format!("{pipe} crosses offset {:?} without a break line", offset.letter),
            ));
        }
    }
    out
}

/// Graph-cut check of a local offset: its breaks must separate the
/// displaced points from all others.
///
/// Returns the first violation found, or an ok report.
pub fn check_local_offset(scheme: &Scheme, id: OffsetId) -> LegalityReport {
    let subject = Subject::Offset(id);
    let Some(offset) = scheme.offsets.get(id) else {
        return LegalityReport::violation(subject, Rule::EmptyCut, "unknown offset");
    };
    let OffsetKind::Local { displaced_points } = &offset.kind else {
        return LegalityReport::ok(subject, Rule::EmptyCut);
    };
    let mut broken: BTreeMap<PipeId, usize> = BTreeMap::new();
    for b in scheme.breaks.values().filter(|b| b.offset == id) {
        *broken.entry(b.pipe).or_default() += 1;
    }
    if broken.is_empty() {
        return LegalityReport::violation(subject, Rule::EmptyCut, "local offset without break lines");
    }
    if let Some((pipe, _)) = broken.iter().find(|(_, n)| **n > 1) {
        return LegalityReport::violation(
            subject,
            Rule::DuplicateBreak,
            format!("{pipe} carries more than one break of this offset"),
        );
    }
    for (pid, pipe) in scheme.pipes.iter() {
        let sides = (
            displaced_points.contains(&pipe.start),
            displaced_points.contains(&pipe.end),
        );
        let across = sides.0 != sides.1;
        match (broken.contains_key(&pid), across) {
            (true, false) => {
                return LegalityReport::violation(
                    subject,
                    Rule::BreakOffBoundary,
                    format!("break on {pid} does not separate displaced and fixed points"),
                )
            }
            (false, true) => {
                return LegalityReport::violation(
                    subject,
                    Rule::UnbrokenConnection,
                    format!("{pid} joins both sides without a break"),
                )
            }
            _ => {}
        }
    }
    if broken.keys().any(|p| !scheme.pipes.contains(*p)) {
        return LegalityReport::violation(subject, Rule::BreakOffBoundary, "break on a missing pipe");
    }
    LegalityReport::ok(subject, Rule::EmptyCut)
}
