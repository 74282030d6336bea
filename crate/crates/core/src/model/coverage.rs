//! Pipe spans hidden by blocks and fillets.
//!
//! Pipes are never split geometrically; coverage is a rendering mask
//! expressed as intervals of the pipe parameter (nature mm from the start).

use super::ids::*;
use super::scheme::Scheme;
use super::types::*;
use super::{ModelError, Vec3};
use crate::interval::{self, Interval};

/// Interval on `pipe` hidden by a leg of length `cut_nature` at point `at`.
///
/// Axial legs are centred on the attachment point. Other legs run inward
/// from the attachment point when it is a pipe end, and are centred otherwise.
fn leg_interval(
    scheme: &Scheme,
    pipe: PipeId,
    at: &Vec3,
    cut_nature: f64,
    centred: bool,
) -> Result<Option<Interval>, ModelError> {
    let g = scheme.pipe_geom(pipe)?;
    let len = g.length();
    let t = (at - g.start).dot(&g.dir());
    let raw = if centred {
        Interval::centered(t, cut_nature)
    } else if t.abs() < MERGE_EPS {
        Interval::new(0.0, cut_nature)
    } else if (t - len).abs() < MERGE_EPS {
        Interval::new(len - cut_nature, len)
    } else {
        Interval::centered(t, cut_nature)
    };
    Ok(raw.clamp(0.0, len))
}

/// Coverage intervals of one block on every pipe it is attached to.
pub fn block_coverage(scheme: &Scheme, id: BlockId) -> Result<Vec<(PipeId, Interval)>, ModelError> {
    let block = scheme.block(id)?;
    let symbol = scheme.symbol(block.symbol)?;
    let at = scheme.block_point(id)?;
    let scale = scheme.settings.mode.scale;
    let axial = symbol.attach == Attach::Axial;
    let mut out = Vec::new();
    for (leg, pipe) in block.attached_pipes().enumerate() {
        let cut = symbol.cut_lengths.get(leg).copied().unwrap_or(0.0) * block.stretch;
        if cut <= 0.0 {
            continue;
        }
        if let Some(i) = leg_interval(scheme, pipe, &at, cut / scale, axial)? {
            out.push((pipe, i));
        }
    }
    Ok(out)
}

/// Tangent length of a fillet joint: how far each pipe is trimmed back
/// from the shared point. Zero for butt joints and straight continuations.
pub fn fillet_tangent_length(scheme: &Scheme, id: JointId) -> Result<Option<FilletGeom>, ModelError> {
    let joint = scheme.joints.get(id).ok_or(ModelError::UnknownJoint(id))?;
    let JointKind::Fillet { radius } = joint.kind else {
        return Ok(None);
    };
    let a = scheme.pipe(joint.pipe_a)?;
    let b = scheme.pipe(joint.pipe_b)?;
    let Some(shared) = [a.start, a.end].into_iter().find(|p| b.has_endpoint(*p)) else {
        return Ok(None);
    };
    let q = scheme.point(shared)?;
    let ua = scheme.leg_direction(joint.pipe_a, &q)?;
    let ub = scheme.leg_direction(joint.pipe_b, &q)?;
    let cos = ua.dot(&ub).clamp(-1.0, 1.0);
    let angle = cos.acos();
    // Straight continuation or folded back: no arc.
    if angle > std::f64::consts::PI - 1e-9 || angle < 1e-9 {
        return Ok(None);
    }
    let tangent = radius / (angle / 2.0).tan();
    Ok(Some(FilletGeom {
        shared,
        dir_a: ua,
        dir_b: ub,
        radius,
        tangent,
    }))
}

/// Fillet geometry around the shared point of two pipes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilletGeom {
    pub shared: PointId,
    pub dir_a: Vec3,
    pub dir_b: Vec3,
    pub radius: f64,
    pub tangent: f64,
}

fn fillet_coverage(scheme: &Scheme, id: JointId) -> Result<Vec<(PipeId, Interval)>, ModelError> {
    let Some(f) = fillet_tangent_length(scheme, id)? else {
        return Ok(Vec::new());
    };
    let joint = &scheme.joints.get(id).ok_or(ModelError::UnknownJoint(id))?;
    let q = scheme.point(f.shared)?;
    let mut out = Vec::new();
    for pipe in [joint.pipe_a, joint.pipe_b] {
        if let Some(i) = leg_interval(scheme, pipe, &q, f.tangent, false)? {
            out.push((pipe, i));
        }
    }
    Ok(out)
}

/// Merged coverage of one pipe by all blocks and fillet joints.
pub fn pipe_masks(scheme: &Scheme, pipe: PipeId) -> Vec<Interval> {
    let mut parts = Vec::new();
    for id in scheme.blocks.ids() {
        if let Ok(cov) = block_coverage(scheme, id) {
            parts.extend(cov.into_iter().filter(|(p, _)| *p == pipe).map(|(_, i)| i));
        }
    }
    for (id, joint) in scheme.joints.iter() {
        if joint.pipe_a != pipe && joint.pipe_b != pipe {
            continue;
        }
        if let Ok(cov) = fillet_coverage(scheme, id) {
            parts.extend(cov.into_iter().filter(|(p, _)| *p == pipe).map(|(_, i)| i));
        }
    }
    interval::merge(parts)
}

pub fn is_fully_covered(scheme: &Scheme, pipe: PipeId) -> bool {
    match scheme.pipe_length(pipe) {
        Ok(len) => interval::covers(0.0, len, &pipe_masks(scheme, pipe), MERGE_EPS),
        Err(_) => false,
    }
}
