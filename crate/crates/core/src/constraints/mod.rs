//! Compatibility rules between objects: pipe overlap, offsets,
//! dimension orientations and block orientations.

mod blocks;
mod dimensions;
mod offsets;

use std::fmt;

use crate::model::{ModelError, Pipe, Scheme, Subject, Vec3, MERGE_EPS};

pub use blocks::{enumerate_block_orientations, frame_for, resolve_block_frame, BlockTemplate, Frame};
pub use dimensions::{legal_dimension_orientations, legal_orientations_for, DimLegality, Orientation};
pub use offsets::{check_general_offset, check_local_offset, crossing_pipes, general_offset_geometry};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} is not attached, cannot orient towards it")]
    MissingAttachedPipe(&'static str),
    #[error("up direction {0} is parallel to the host pipe")]
    DegenerateUpdir(&'static str),
    #[error("zero-length host pipe")]
    DegenerateHost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    ZeroLengthPipe,
    PipeOverlap,
    ObliqueCrossing,
    DimensionCrossing,
    MissingBreak,
    EmptyCut,
    DuplicateBreak,
    BreakOffBoundary,
    UnbrokenConnection,
    DimCoincident,
    DimNonCoplanar,
    DimPlaneOblique,
    DimNoPipeAxis,
    DimSplitByOffset,
    DimOrientation,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::ZeroLengthPipe => "zero-length-pipe",
            Rule::PipeOverlap => "pipe-overlap",
            Rule::ObliqueCrossing => "oblique-crossing",
            Rule::DimensionCrossing => "dimension-crossing",
            Rule::MissingBreak => "missing-break",
            Rule::EmptyCut => "empty-cut",
            Rule::DuplicateBreak => "duplicate-break",
            Rule::BreakOffBoundary => "break-off-boundary",
            Rule::UnbrokenConnection => "unbroken-connection",
            Rule::DimCoincident => "dim-coincident",
            Rule::DimNonCoplanar => "dim-non-coplanar",
            Rule::DimPlaneOblique => "dim-plane-oblique",
            Rule::DimNoPipeAxis => "dim-no-pipe-axis",
            Rule::DimSplitByOffset => "dim-split-by-offset",
            Rule::DimOrientation => "dim-orientation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegalityReport {
    pub subject: Subject,
    pub rule: Rule,
    pub verdict: Verdict,
    pub note: String,
}

impl LegalityReport {
    pub fn ok(subject: Subject, rule: Rule) -> Self {
        LegalityReport {
            subject,
            rule,
            verdict: Verdict::Ok,
            note: String::new(),
        }
    }

    pub fn violation(subject: Subject, rule: Rule, note: impl Into<String>) -> Self {
        LegalityReport {
            subject,
            rule,
            verdict: Verdict::Violation,
            note: note.into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.verdict == Verdict::Ok
    }
}

impl fmt::Display for LegalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Ok => write!(f, "{}: {}: ok", self.subject, self.rule.id()),
            Verdict::Violation => write!(f, "{}: {}: {}", self.subject, self.rule.id(), self.note),
        }
    }
}

/// Whether two segments share a collinear piece of positive length.
pub fn segments_overlap(a0: &Vec3, a1: &Vec3, b0: &Vec3, b1: &Vec3) -> bool {
    let d = a1 - a0;
    let len = d.norm();
    if len < MERGE_EPS {
        return false;
    }
    let u = d / len;
    let eps = MERGE_EPS * len.max(1.0);
    let off_line = |p: &Vec3| (p - a0).cross(&u).norm() > eps;
    if off_line(b0) || off_line(b1) {
        return false;
    }
    let t0 = (b0 - a0).dot(&u);
    let t1 = (b1 - a0).dot(&u);
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(len);
    hi - lo > MERGE_EPS
}

/// Zero length or collinear overlap of a candidate pipe with stored pipes.
pub fn check_pipe_overlap(scheme: &Scheme, candidate: &Pipe) -> Result<LegalityReport, ConstraintError> {
    let a = scheme.point(candidate.start)?;
    let b = scheme.point(candidate.end)?;
    if candidate.start == candidate.end || (a - b).norm() < MERGE_EPS {
        return Ok(LegalityReport::violation(
            Subject::Scheme,
            Rule::ZeroLengthPipe,
            "pipe of zero length",
        ));
    }
    for (id, g) in scheme.pipes.ids().filter_map(|id| scheme.pipe_geom(id).ok().map(|g| (id, g))) {
        if segments_overlap(&a, &b, &g.start, &g.end) {
            return Ok(LegalityReport::violation(
                Subject::Pipe(id),
                Rule::PipeOverlap,
                format!("candidate overlaps {id}"),
            ));
        }
    }
    Ok(LegalityReport::ok(Subject::Scheme, Rule::PipeOverlap))
}

/// Every offset and dimension rule violated in the scheme.
pub fn check_scheme(scheme: &Scheme) -> Vec<LegalityReport> {
    let mut out = Vec::new();
    for (id, o) in scheme.offsets.iter() {
        if o.is_general() {
            out.extend(check_general_offset(scheme, id));
        } else {
            let r = check_local_offset(scheme, id);
            if !r.is_ok() {
                out.push(r);
            }
        }
    }
    for (id, d) in scheme.dimensions.iter() {
        let subject = Subject::Dimension(id);
        match legal_dimension_orientations(scheme, &d.points) {
            Ok(legal) => {
                let wanted = (d.ext_axis, d.dim_dir);
                if legal.violations.is_empty() && !legal.pairs.contains(&wanted) {
                    out.push(LegalityReport::violation(
                        subject,
                        Rule::DimOrientation,
                        format!("extension {} with dimension {:?} is not a legal orientation", d.ext_axis, d.dim_dir),
                    ));
                }
                out.extend(legal.violations.into_iter().map(|mut r| {
                    r.subject = subject;
                    r
                }));
            }
            Err(e) => out.push(LegalityReport::violation(subject, Rule::DimOrientation, e.to_string())),
        }
    }
    out
}
