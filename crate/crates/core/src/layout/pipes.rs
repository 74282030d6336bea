use std::collections::BTreeMap;

use crate::constraints;
use crate::interval::{self, Interval};
use crate::model::coverage;
use crate::model::*;

use super::text::emit_line;
use super::{upward_normal, Ctx, Layer, LayoutError, Shape, TextAnchor, Weight};

/// One break on a pipe, in the pipe's own parameter.
struct Cut {
    t: f64,
    /// The displaced side lies after `t`.
    after: bool,
    shift: Vec3,
    /// Length of pipe swallowed by a compression along the pipe.
    band: f64,
    line: BreakLine,
    letter: String,
    /// Shift of the break centre along the offset direction (nature mm).
    centre_shift: f64,
}

fn cuts_on(ctx: &Ctx, pipe: PipeId) -> Result<Vec<Cut>, ModelError> {
    let s = ctx.s;
    let g = s.pipe_geom(pipe)?;
    let len = g.length();
    let u = g.dir();
    let mut out = Vec::new();
    for (_, b) in s.breaks.iter().filter(|(id, b)| b.pipe == pipe && ctx.sel.breaks.contains(id)) {
        let o = s.offsets.get(b.offset).ok_or(ModelError::UnknownOffset(b.offset))?;
        let (t, centre_shift) = match o.kind {
            OffsetKind::General { axis, plane_coord } => {
                let i = axis.index();
                if u[i].abs() < 1e-12 {
                    continue;
                }
                (((plane_coord - g.start[i]) / u[i]).clamp(0.0, len), b.placement)
            }
            OffsetKind::Local { .. } => (b.placement, 0.0),
        };
        let after = s.offset_moves_on_pipe(b.offset, pipe, len)?;
        let shift = o.shift();
        let side = if after { u } else { -u };
        let along = shift.dot(&side);
        let sideways = (shift - u * shift.dot(&u)).norm();
        let room = if after { len - t } else { t };
        let band = if along < 0.0 && sideways <= 1e-9 * shift.norm() {
            (-along).min(room)
        } else {
            0.0
        };
        out.push(Cut {
            t,
            after,
            shift,
            band,
            line: b.clone(),
            letter: o.letter.clone(),
            centre_shift,
        });
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

/// Parameter intervals of `[0, len]` between cuts, minus bands and masks.
fn solid_spans(len: f64, cuts: &[Cut], masks: &[Interval]) -> Vec<Interval> {
    let mut removed: Vec<Interval> = masks.to_vec();
    for c in cuts {
        if c.band > 0.0 {
            removed.push(if c.after {
                Interval::new(c.t, c.t + c.band)
            } else {
                Interval::new(c.t - c.band, c.t)
            });
        }
    }
    let mut stops: Vec<f64> = cuts.iter().map(|c| c.t).collect();
    stops.push(len);
    let mut out = Vec::new();
    let mut at = 0.0;
    for stop in stops {
        if stop > at {
            out.extend(interval::subtract(at, stop, &removed));
        }
        at = at.max(stop);
    }
    out.retain(|i| i.len() > MERGE_EPS);
    out
}

/// Splits the 2D segment `a`–`b` by masks given as distances along the
/// line `origin + w·λ`.
fn mask_segment(a: Vec2, b: Vec2, origin: Vec2, w: Vec2, masks: &[Interval]) -> Vec<(Vec2, Vec2)> {
    let la = (a - origin).dot(&w);
    let lb = (b - origin).dot(&w);
    if (lb - la).abs() < 1e-9 || masks.is_empty() {
        return vec![(a, b)];
    }
    let (lo, hi) = (la.min(lb), la.max(lb));
    let at = |l: f64| a + (b - a) * ((l - la) / (lb - la));
    let mut parts: Vec<(Vec2, Vec2)> = interval::subtract(lo, hi, masks)
        .into_iter()
        .filter(|i| i.len() > 1e-9)
        .map(|i| (at(i.lo), at(i.hi)))
        .collect();
    if la > lb {
        parts.reverse();
        for p in &mut parts {
            *p = (p.1, p.0);
        }
    }
    parts
}

pub(crate) fn layout_pipes(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let vis = s.settings.mode.visibility;
    let o = &s.settings.objects;
    let mut gaps: BTreeMap<PipeId, Vec<Interval>> = BTreeMap::new();
    if vis.occlusion && vis.pipes {
        let pipes: Vec<PipeId> = ctx.sel.pipes.iter().copied().collect();
        let found = crate::geometry::occlusion_gaps(s, ctx.proj, &ctx.field, &pipes, s.settings.mode.occlusion_gap_len);
        for g in found {
            gaps.entry(g.pipe).or_default().push(g.interval);
        }
    }
    let pipes: Vec<PipeId> = ctx.sel.pipes.iter().copied().collect();
    for pipe in pipes {
        let p = s.pipe(pipe)?.clone();
        let geom = s.pipe_geom(pipe)?;
        let len = geom.length();
        let cuts = cuts_on(ctx, pipe)?;
        let spans = solid_spans(len, &cuts, &coverage::pipe_masks(s, pipe));
        let s0 = ctx.to2d(&ctx.field.point(p.start).ok_or(ModelError::UnknownPoint(p.start))?);
        let e0 = ctx.to2d(&ctx.field.point(p.end).ok_or(ModelError::UnknownPoint(p.end))?);
        let w = {
            let d = e0 - s0;
            let n = d.norm();
            if n > 1e-9 {
                d / n
            } else {
                ctx.dir2d(&geom.dir()).unwrap_or(Vec2::x())
            }
        };
        let mut lambda_masks = gaps.remove(&pipe).unwrap_or_default();
        let mut glyphs: Vec<(Cut, Vec2, Vec2)> = Vec::new();
        for c in cuts {
            let fixed = ctx.to2d(&ctx.field.on_pipe(s, pipe, c.t)?);
            let moved = fixed + ctx.proj.project(&c.shift) * ctx.scale;
            let centre_off = ctx.proj.project(&(c.shift.normalize() * c.centre_shift)) * ctx.scale;
            if c.band > 0.0 {
                let centre = fixed + centre_off;
                let half = c.line.paper_len / 2.0;
                let lc = (centre - s0).dot(&w);
                if half > 0.0 {
                    lambda_masks.push(Interval::new(lc - half, lc + half));
                }
                glyphs.push((c, centre - w * half, centre + w * half));
            } else {
                glyphs.push((c, fixed, moved));
            }
        }
        let covered = coverage::is_fully_covered(s, pipe);
        if vis.pipes && (vis.covered_pipes || !covered) {
            for span in spans {
                let mid = (span.lo + span.hi) / 2.0;
                let d = ctx.field.shift_on_pipe(s, pipe, mid);
                let a = ctx.to2d(&(geom.at(span.lo) + d));
                let b = ctx.to2d(&(geom.at(span.hi) + d));
                for (a, b) in mask_segment(a, b, s0, w, &lambda_masks) {
                    if (b - a).norm() > 1e-9 {
                        ctx.push(Layer::Pipes, p.style.color, p.style.line_type, Weight::Thick, Shape::Stroke(vec![a, b]));
                    }
                }
            }
        }
        if !vis.breaks {
            continue;
        }
        for (c, a, b) in glyphs {
            let shape = match (c.band > 0.0, c.line.glyph) {
                (true, BreakGlyph::Waves) => Shape::WavePair {
                    a,
                    b,
                    diameter: o.break_wave_diameter,
                },
                _ => Shape::DotRun {
                    from: a,
                    to: b,
                    step: o.break_dot_step,
                },
            };
            ctx.push(Layer::Breaks, p.style.color, LineType::Solid, Weight::Thick, shape);
            if vis.break_letters {
                let mid = if c.band > 0.0 {
                    (a + b) / 2.0
                } else {
                    (a + b) / 2.0 + ctx.proj.project(&(c.shift.normalize() * c.centre_shift)) * ctx.scale
                };
                let n = upward_normal(w);
                let font = o.break_font.clone();
                for side in [-1.0, 1.0] {
                    let at = mid + w * (side * c.line.label_shift_axial) + n * c.line.label_shift_normal;
                    emit_line(ctx, Layer::BreakLetters, p.style.color, &c.letter, at, &font, TextAnchor::Middle, 0.0);
                }
            }
        }
    }
    Ok(())
}

/// Fillet arcs, sampled in their spatial plane.
pub(crate) fn layout_joints(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let joints: Vec<JointId> = ctx.sel.joints.iter().copied().collect();
    for id in joints {
        let Some(f) = coverage::fillet_tangent_length(s, id)? else {
            continue;
        };
        let joint = s.joints.get(id).ok_or(ModelError::UnknownJoint(id))?;
        let style = s.pipe(joint.pipe_a)?.style;
        let q = s.point(f.shared)?;
        let shift = ctx.field.point(f.shared).unwrap_or(q) - q;
        let theta = f.dir_a.dot(&f.dir_b).clamp(-1.0, 1.0).acos();
        let bis = (f.dir_a + f.dir_b).normalize();
        let centre = q + bis * (f.radius / (theta / 2.0).sin());
        let ta = q + f.dir_a * f.tangent;
        let tb = q + f.dir_b * f.tangent;
        let e1 = (ta - centre) / f.radius;
        let vb = tb - centre;
        let e2 = (vb - e1 * vb.dot(&e1)).normalize();
        let sweep = std::f64::consts::PI - theta;
        const N: usize = 16;
        let pts = (0..=N)
            .map(|k| {
                let phi = sweep * k as f64 / N as f64;
                ctx.to2d(&(centre + (e1 * phi.cos() + e2 * phi.sin()) * f.radius + shift))
            })
            .collect();
        ctx.push(Layer::Joints, style.color, style.line_type, Weight::Thick, Shape::Stroke(pts));
    }
    Ok(())
}

/// Maps symbol-image points of a block onto the sheet.
pub(crate) struct BlockMap {
    origin: Vec2,
    ex: Vec2,
    ey: Vec2,
}

impl BlockMap {
    pub fn new(ctx: &Ctx, id: BlockId) -> Result<Self, LayoutError> {
        let block = ctx.s.block(id)?;
        let frame = constraints::resolve_block_frame(ctx.s, id)?;
        let origin = ctx.to2d(&ctx.field.block_point(ctx.s, id)?);
        Ok(BlockMap {
            origin,
            ex: ctx.proj.project(&frame.ex) * block.stretch,
            ey: ctx.proj.project(&frame.ey) * block.stretch,
        })
    }

    pub fn map(&self, p: Vec2) -> Vec2 {
        self.origin + self.ex * p.x + self.ey * p.y
    }
}

pub(crate) fn layout_blocks(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let blocks: Vec<BlockId> = ctx.sel.blocks.iter().copied().collect();
    for id in blocks {
        let block = s.block(id)?.clone();
        let symbol = s.symbol(block.symbol)?.clone();
        let m = BlockMap::new(ctx, id)?;
        for stroke in &symbol.graphics {
            let pts: Vec<Vec2> = match *stroke {
                SymbolStroke::Line { a, b } => vec![m.map(a), m.map(b)],
                SymbolStroke::Arc {
                    center,
                    radius,
                    start_deg,
                    sweep_deg,
                } => {
                    let n = ((sweep_deg.abs() / 11.25).ceil() as usize).max(4);
                    (0..=n)
                        .map(|k| {
                            let a = (start_deg + sweep_deg * k as f64 / n as f64).to_radians();
                            m.map(center + Vec2::new(a.cos(), a.sin()) * radius)
                        })
                        .collect()
                }
            };
            ctx.push(Layer::Blocks, block.style.color, block.style.line_type, Weight::Thin, Shape::Stroke(pts));
        }
    }
    Ok(())
}
