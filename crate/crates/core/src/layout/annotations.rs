use crate::edit::{format_slope, pipe_slope};
use crate::model::*;

use super::pipes::BlockMap;
use super::text::{emit_line, text_width};
use super::{readable_angle, upward_normal, ArrowKind, Ctx, Layer, LayoutError, Shape, TextAnchor, Weight};

/// Elevation value in metres with an explicit sign: `+2.500`, `±0.000`, `−0.300`.
pub fn format_elevation(z_mm: f64) -> String {
    let m = z_mm / 1000.0;
    let body = format!("{:.3}", m.abs());
    if body.bytes().all(|b| b == b'0' || b == b'.') {
        format!("\u{00B1}{body}")
    } else if m > 0.0 {
        format!("+{body}")
    } else {
        format!("\u{2212}{body}")
    }
}

/// Up direction of the sheet image of model Z, `(0, 1)` when seen end-on.
fn up2d(ctx: &Ctx) -> Vec2 {
    ctx.dir2d(&Vec3::z()).unwrap_or(Vec2::y())
}

pub(crate) fn layout_elevations(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let o = &s.settings.objects;
    let ids: Vec<ElevationId> = ctx.sel.elevations.iter().copied().collect();
    for id in ids {
        let Some(m) = s.elevations.get(id).cloned() else {
            continue;
        };
        let z = s.elevation_anchor_position(&m.anchor)?.z;
        let a = ctx.to2d(&ctx.field.elevation_anchor(s, &m.anchor)?);
        let ext = ctx.dir2d(&m.ext_axis.axis().unit()).unwrap_or(Vec2::x());
        let up = up2d(ctx);
        let shelf = ctx.dir2d(&m.shelf_dir.vector()).unwrap_or(Vec2::x());
        let b = a + ext * m.arrow_shift;
        let c = b + up * m.shelf_shift;
        let text = format_elevation(z);
        let w = text_width(&text, &o.elev_font);
        let d = c + shelf * w;
        let color = o.elev_color;
        ctx.push(Layer::Elevations, color, m.line_type, Weight::Thin, Shape::Stroke(vec![a, b]));
        ctx.thin(
            Layer::Elevations,
            color,
            Shape::Arrow {
                kind: ArrowKind::Arrow,
                at: b,
                dir: -up,
                len: o.elev_arrow_len,
                half_width: o.elev_arrow_len / 2.0,
            },
        );
        ctx.thin(Layer::Elevations, color, Shape::Stroke(vec![b, c, d]));
        let start = if shelf.x >= 0.0 { c } else { d };
        let angle = readable_angle(shelf);
        let font = o.elev_font.clone();
        emit_line(ctx, Layer::Elevations, color, &text, start + upward_normal(shelf) * (0.25 * font.height), &font, TextAnchor::Start, angle);
    }
    Ok(())
}

pub(crate) fn layout_slopes(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let o = &s.settings.objects;
    let ids: Vec<SlopeId> = ctx.sel.slopes.iter().copied().collect();
    for id in ids {
        let Some(m) = s.slopes.get(id).cloned() else {
            continue;
        };
        let (dz, h) = pipe_slope(s, m.pipe)?;
        let text = match format_slope(dz, h, m.format) {
            Ok(t) => t,
            Err(e) => {
                ctx.warn(format!("{id}: {e}"));
                continue;
            }
        };
        let g = s.pipe_geom(m.pipe)?;
        let Some(w) = ctx.dir2d(&g.dir()) else {
            ctx.warn(format!("{id}: pipe seen end-on, not drawn"));
            continue;
        };
        let n = upward_normal(w);
        let centre = ctx.to2d(&ctx.field.on_pipe(s, m.pipe, m.t)?) + n * m.shift;
        let half = w * (o.slope_arrow_len / 2.0);
        let color = o.slope_color;
        ctx.thin(Layer::Slopes, color, Shape::Stroke(vec![centre - half, centre + half]));
        if dz > 0.0 {
            // The arrow points downhill.
            let down = if g.end.z < g.start.z { w } else { -w };
            ctx.thin(
                Layer::Slopes,
                color,
                Shape::Arrow {
                    kind: ArrowKind::Arrow,
                    at: centre + down * (o.slope_arrow_len / 2.0),
                    dir: down,
                    len: o.slope_arrow_wing * 2.0,
                    half_width: o.slope_arrow_wing / 2.0,
                },
            );
        }
        let font = o.slope_font.clone();
        let angle = readable_angle(w);
        let text_n = upward_normal(Vec2::new(angle.to_radians().cos(), angle.to_radians().sin()));
        emit_line(ctx, Layer::Slopes, color, &text, centre + text_n * (0.25 * font.height), &font, TextAnchor::Middle, angle);
    }
    Ok(())
}

/// Sheet point a leader points at.
fn leader_point(ctx: &Ctx, l: LeaderRef) -> Result<Vec2, LayoutError> {
    let s = ctx.s;
    match l {
        LeaderRef::Pipe(id) => {
            let lp = s.pipe_leaders.get(id).ok_or(ModelError::UnknownLeader(l))?;
            Ok(ctx.to2d(&ctx.field.on_pipe(s, lp.pipe, lp.t)?))
        }
        LeaderRef::Block(id) => {
            let lb = s.block_leaders.get(id).ok_or(ModelError::UnknownLeader(l))?;
            Ok(BlockMap::new(ctx, lb.block)?.map(lb.anchor))
        }
    }
}

fn target_point(ctx: &Ctx, t: &MarkTarget) -> Result<Vec2, LayoutError> {
    match *t {
        MarkTarget::Pipe { pipe, t } => Ok(ctx.to2d(&ctx.field.on_pipe(ctx.s, pipe, t)?)),
        MarkTarget::Block { block, anchor } => Ok(BlockMap::new(ctx, block)?.map(anchor)),
    }
}

struct Shelved<'a> {
    layer: Layer,
    color: u8,
    lines: &'a [String],
    font: &'a FontSetting,
    line_step: f64,
    shelf_from: ShelfFrom,
    second_shelf: bool,
}

/// Draws lines over a horizontal shelf that starts at `origin`, with
/// leaders from `targets` to the chosen shelf end.
fn shelved(ctx: &mut Ctx, t: &Shelved, origin: Vec2, targets: &[Vec2]) {
    let w = t.lines.iter().map(|l| text_width(l, t.font)).fold(0.0, f64::max);
    let end = origin + Vec2::new(w, 0.0);
    ctx.thin(t.layer, t.color, Shape::Stroke(vec![origin, end]));
    let lift = 0.25 * t.font.height;
    // The first line sits on the shelf, the rest hang below it.
    let below = |i: usize| -lift - t.font.height - (i - 1) as f64 * t.line_step;
    for (i, line) in t.lines.iter().enumerate() {
        let y = if i == 0 { lift } else { below(i) };
        emit_line(ctx, t.layer, t.color, line, origin + Vec2::new(0.0, y), t.font, TextAnchor::Start, 0.0);
    }
    if t.second_shelf && t.lines.len() == 2 {
        let y = below(1) - lift;
        ctx.thin(t.layer, t.color, Shape::Stroke(vec![origin + Vec2::new(0.0, y), end + Vec2::new(0.0, y)]));
    }
    let foot = match t.shelf_from {
        ShelfFrom::Start => origin,
        ShelfFrom::End => end,
    };
    for p in targets {
        ctx.thin(t.layer, t.color, Shape::Stroke(vec![*p, foot]));
    }
}

pub(crate) fn layout_texts(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let ids: Vec<TextId> = ctx.sel.texts.iter().copied().collect();
    for id in ids {
        let text = s.texts.get(id).ok_or(ModelError::UnknownText(id))?.clone();
        let origin = leader_point(ctx, text.main_leader)? + text.offset_vec * ctx.scale;
        let mut targets = Vec::new();
        for l in s.leaders_of_text(id) {
            if ctx.sel.leader_selected(l) {
                targets.push(leader_point(ctx, l)?);
            }
        }
        let t = Shelved {
            layer: Layer::Texts,
            color: text.color,
            lines: &text.lines,
            font: &text.font,
            line_step: text.line_step,
            shelf_from: text.shelf_from,
            second_shelf: s.settings.objects.text_second_shelf,
        };
        shelved(ctx, &t, origin, &targets);
    }
    Ok(())
}

/// Text of a position mark: its positions joined by commas.
pub fn mark_label(s: &Scheme, m: &PositionMark) -> Result<String, ModelError> {
    let mut out = Vec::new();
    for id in &m.props {
        out.push(s.spec_props.get(*id).ok_or(ModelError::UnknownSpecProps(*id))?.position.to_string());
    }
    Ok(out.join(", "))
}

pub(crate) fn layout_marks(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let show_hidden = s.settings.mode.visibility.hidden_marks;
    let ids: Vec<MarkId> = ctx.sel.marks.iter().copied().collect();
    for id in ids {
        let m = s.marks.get(id).ok_or(ModelError::UnknownMark(id))?.clone();
        if !m.visible && !show_hidden {
            continue;
        }
        let lines = [mark_label(s, &m)?];
        let p = target_point(ctx, &m.target)?;
        let t = Shelved {
            layer: Layer::Marks,
            color: m.color,
            lines: &lines,
            font: &m.font,
            line_step: m.line_step,
            shelf_from: m.shelf_from,
            second_shelf: false,
        };
        shelved(ctx, &t, p + m.offset_vec * ctx.scale, &[p]);
    }
    Ok(())
}

/// Length of each axis image in the axes picture (paper mm).
pub const AXES_PICTURE_LEN: f64 = 15.0;
const AXES_PICTURE_MARGIN: f64 = 10.0;

/// Three axis images with labels, left of and below the selected pipes.
pub(crate) fn layout_axes_picture(ctx: &mut Ctx) {
    let s = ctx.s;
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    for pipe in &ctx.sel.pipes {
        let Ok(p) = s.pipe(*pipe) else { continue };
        for id in [p.start, p.end] {
            if let Some(q) = ctx.field.point(id) {
                let q = ctx.to2d(&q);
                lo = Vec2::new(lo.x.min(q.x), lo.y.min(q.y));
            }
        }
    }
    if !lo.x.is_finite() {
        lo = Vec2::zeros();
    }
    let origin = lo - Vec2::new(AXES_PICTURE_MARGIN + AXES_PICTURE_LEN, AXES_PICTURE_MARGIN + AXES_PICTURE_LEN);
    let font = s.settings.objects.text_font.clone();
    let color = s.settings.objects.text_color;
    for axis in Axis::ALL {
        let v = ctx.proj.project(&axis.unit());
        let n = v.norm();
        if n < 1e-9 {
            continue;
        }
        let tip = origin + v * AXES_PICTURE_LEN;
        ctx.thin(Layer::AxesPicture, color, Shape::Stroke(vec![origin, tip]));
        ctx.thin(
            Layer::AxesPicture,
            color,
            Shape::Arrow {
                kind: ArrowKind::Arrow,
                at: tip,
                dir: v / n,
                len: 2.5,
                half_width: 0.5,
            },
        );
        let label_at = tip + v / n * 1.5;
        emit_line(ctx, Layer::AxesPicture, color, axis.name(), label_at, &font, TextAnchor::Middle, 0.0);
    }
}
