use crate::interval::Interval;
use crate::model::*;

use super::{OffsetField, Projection};

/// A gap on `pipe` where it passes behind `over`.
#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionGap {
    pub pipe: PipeId,
    pub over: PipeId,
    /// Crossing on the sheet (paper mm).
    pub at: Vec2,
    /// Gap as a distance along the drawn pipe from its start (paper mm).
    pub interval: Interval,
}

/// Intersection of two closed 2D segments, as parameters in `[0, 1]` on
/// each. Parallel segments never intersect here.
pub fn segment_crossing(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> Option<(f64, f64)> {
    const EPS: f64 = 1e-9;
    let r = a1 - a0;
    let q = b1 - b0;
    let den = r.perp(&q);
    let scale = r.norm() * q.norm();
    if scale == 0.0 || den.abs() <= EPS * scale {
        return None;
    }
    let w = b0 - a0;
    let t = w.perp(&q) / den;
    let u = w.perp(&r) / den;
    let on = |v: f64| (-EPS..=1.0 + EPS).contains(&v);
    (on(t) && on(u)).then_some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
}

/// Occlusion gaps between the displaced pipes of `pipes`.
///
/// Where two drawn pipes intersect, the one farther from the viewer gets a
/// gap of `gap_len` paper mm centred on the crossing and clipped to the
/// pipe. Pipes meeting in space are left alone.
pub fn occlusion_gaps(
    s: &Scheme,
    proj: &Projection,
    field: &OffsetField,
    pipes: &[PipeId],
    gap_len: f64,
) -> Vec<OcclusionGap> {
    let scale = s.settings.mode.scale;
    let segs: Vec<(PipeId, Vec3, Vec3)> = pipes
        .iter()
        .filter_map(|id| {
            let p = s.pipes.get(*id)?;
            Some((*id, field.point(p.start)?, field.point(p.end)?))
        })
        .collect();
    let flat: Vec<(Vec2, Vec2)> = segs
        .iter()
        .map(|(_, a, b)| (proj.project(a) * scale, proj.project(b) * scale))
        .collect();
    let mut out = Vec::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let Some((t, u)) = segment_crossing(flat[i].0, flat[i].1, flat[j].0, flat[j].1) else {
                continue;
            };
            let (pi, a0, a1) = segs[i];
            let (pj, b0, b1) = segs[j];
            let da = proj.depth(&(a0 + (a1 - a0) * t));
            let db = proj.depth(&(b0 + (b1 - b0) * u));
            let tol = MERGE_EPS * (1.0 + da.abs().max(db.abs()));
            if (da - db).abs() <= tol {
                continue;
            }
            let (pipe, over, k, (p0, p1)) = if da < db {
                (pi, pj, t, flat[i])
            } else {
                (pj, pi, u, flat[j])
            };
            let len = (p1 - p0).norm();
            let Some(interval) = Interval::centered(k * len, gap_len).clamp(0.0, len) else {
                continue;
            };
            out.push(OcclusionGap {
                pipe,
                over,
                at: p0 + (p1 - p0) * k,
                interval,
            });
        }
    }
    out
}
