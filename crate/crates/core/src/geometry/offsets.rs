use std::collections::BTreeMap;

use crate::constraints::{self, LegalityReport};
use crate::model::*;

/// Displacement of every point and pipe position under all offsets.
///
/// Several offsets acting on one point add up.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetField {
    shifts: Vec<(OffsetId, Vec3)>,
    points: BTreeMap<PointId, Vec3>,
}

impl OffsetField {
    /// Field without legality checks.
    pub fn build(s: &Scheme) -> Self {
        let shifts: Vec<(OffsetId, Vec3)> = s.offsets.iter().map(|(id, o)| (id, o.shift())).collect();
        let points = s
            .points
            .iter()
            .map(|(id, p)| {
                let d = s
                    .offsets
                    .iter()
                    .filter(|(_, o)| o.displaces(id, p))
                    .fold(Vec3::zeros(), |acc, (_, o)| acc + o.shift());
                (id, p + d)
            })
            .collect();
        OffsetField { shifts, points }
    }

    /// Identity field.
    pub fn none(s: &Scheme) -> Self {
        OffsetField {
            shifts: Vec::new(),
            points: s.points.iter().map(|(id, p)| (id, *p)).collect(),
        }
    }

    pub fn point(&self, id: PointId) -> Option<Vec3> {
        self.points.get(&id).copied()
    }

    pub fn points(&self) -> &BTreeMap<PointId, Vec3> {
        &self.points
    }

    /// Displacement of the position `t` along `pipe`.
    pub fn shift_on_pipe(&self, s: &Scheme, pipe: PipeId, t: f64) -> Vec3 {
        self.shifts
            .iter()
            .filter(|(id, _)| s.offset_moves_on_pipe(*id, pipe, t).unwrap_or(false))
            .fold(Vec3::zeros(), |acc, (_, d)| acc + d)
    }

    /// Displaced position of `t` along `pipe`.
    pub fn on_pipe(&self, s: &Scheme, pipe: PipeId, t: f64) -> Result<Vec3, ModelError> {
        Ok(s.point_on_pipe(pipe, t)? + self.shift_on_pipe(s, pipe, t))
    }

    pub fn block_point(&self, s: &Scheme, block: BlockId) -> Result<Vec3, ModelError> {
        let b = s.block(block)?;
        self.on_pipe(s, b.pipe, b.dist_from_start)
    }

    pub fn dim_point(&self, s: &Scheme, p: &DimPoint) -> Result<Vec3, ModelError> {
        match *p {
            DimPoint::Spatial(id) => self.point(id).ok_or(ModelError::UnknownPoint(id)),
            DimPoint::BlockAnchor(b) => self.block_point(s, b),
        }
    }

    pub fn target(&self, s: &Scheme, target: &MarkTarget) -> Result<Vec3, ModelError> {
        match *target {
            MarkTarget::Pipe { pipe, t } => self.on_pipe(s, pipe, t),
            MarkTarget::Block { block, .. } => self.block_point(s, block),
        }
    }

    pub fn elevation_anchor(&self, s: &Scheme, a: &ElevationAnchor) -> Result<Vec3, ModelError> {
        match *a {
            ElevationAnchor::OnPipe { pipe, t } => self.on_pipe(s, pipe, t),
            ElevationAnchor::Block(b) => self.block_point(s, b),
        }
    }
}

/// Displaced positions of all points, after checking every offset.
pub fn apply_offsets(s: &Scheme) -> Result<OffsetField, Vec<LegalityReport>> {
    let violations: Vec<LegalityReport> = s
        .offsets
        .iter()
        .flat_map(|(id, o)| {
            if o.is_general() {
                constraints::check_general_offset(s, id)
            } else {
                let r = constraints::check_local_offset(s, id);
                if r.is_ok() {
                    Vec::new()
                } else {
                    vec![r]
                }
            }
        })
        .collect();
    if violations.is_empty() {
        Ok(OffsetField::build(s))
    } else {
        Err(violations)
    }
}
