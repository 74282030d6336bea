use crate::model::*;

use super::text::emit_line;
use super::{readable_angle, Ctx, Layer, LayoutError, Shape, TextAnchor};
use super::ArrowKind;

/// Arrow style of one chain segment from its paper length.
///
/// Inside arrows need twice the arrow length, outside arrows at least one
/// arrow length; shorter segments get ticks.
pub fn segment_arrows(gap: f64, arrow_len: f64) -> SegmentArrows {
    if gap >= 2.0 * arrow_len {
        SegmentArrows::Inside
    } else if gap >= arrow_len {
        SegmentArrows::Outside
    } else {
        SegmentArrows::Ticks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentArrows {
    Inside,
    Outside,
    Ticks,
}

/// Chain segment values: distances between neighbouring dimension points
/// measured along `u`, in point order along `u`.
pub fn chain_values(points: &[Vec3], u: &Vec3) -> Vec<f64> {
    let mut along: Vec<f64> = points.iter().map(|p| p.dot(u)).collect();
    along.sort_by(f64::total_cmp);
    along.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn format_length(v: f64, precision: u8) -> String {
    format!("{:.*}", precision as usize, v.abs())
}

fn dim_dir(s: &Scheme, d: &Dimension) -> Result<Vec3, ModelError> {
    Ok(match d.dim_dir {
        DimDir::Axis(a) => a.unit(),
        DimDir::AlongPipe(p) => s.pipe_geom(p)?.dir(),
    })
}

/// Draws a two-ended dimension segment set as used by chains and grids.
#[allow(clippy::too_many_arguments)]
pub(crate) fn draw_chain(
    ctx: &mut Ctx,
    layer: Layer,
    color: u8,
    feet: &[Vec2],
    values: &[String],
    away: Vec2,
    font: &FontSetting,
    force_ticks: bool,
) {
    let o = &ctx.s.settings.objects;
    let arrow_len = o.dim_arrow_len;
    let text_offset = o.dim_text_offset;
    let (first, last) = (feet[0], feet[feet.len() - 1]);
    let Some(dir) = (last - first).try_normalize(1e-12) else {
        return;
    };
    let half_width = arrow_len / 6.0;
    let mut line_from = first;
    let mut line_to = last;
    for (i, w) in feet.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let gap = (b - a).norm();
        let mode = if force_ticks {
            SegmentArrows::Ticks
        } else {
            segment_arrows(gap, arrow_len)
        };
        let arrow = |at: Vec2, d: Vec2, kind| Shape::Arrow {
            kind,
            at,
            dir: d,
            len: arrow_len,
            half_width,
        };
        match mode {
            SegmentArrows::Inside => {
                ctx.thin(layer, color, arrow(a, -dir, ArrowKind::Arrow));
                ctx.thin(layer, color, arrow(b, dir, ArrowKind::Arrow));
            }
            SegmentArrows::Outside => {
                ctx.thin(layer, color, arrow(a, dir, ArrowKind::Arrow));
                ctx.thin(layer, color, arrow(b, -dir, ArrowKind::Arrow));
                if i == 0 {
                    line_from = a - dir * arrow_len;
                }
                if i + 2 == feet.len() {
                    line_to = b + dir * arrow_len;
                }
            }
            SegmentArrows::Ticks => {
                ctx.thin(layer, color, arrow(a, dir, ArrowKind::Tick));
                ctx.thin(layer, color, arrow(b, dir, ArrowKind::Tick));
            }
        }
        let n = if Vec2::new(-dir.y, dir.x).dot(&away) >= 0.0 {
            Vec2::new(-dir.y, dir.x)
        } else {
            Vec2::new(dir.y, -dir.x)
        };
        let angle = readable_angle(dir);
        // Text sits on the side of `away`; a text below the line hangs from it.
        let baseline = if n.dot(&Vec2::new(-angle.to_radians().sin(), angle.to_radians().cos())) >= 0.0 {
            (a + b) / 2.0 + n * text_offset
        } else {
            (a + b) / 2.0 + n * (text_offset + font.height)
        };
        emit_line(ctx, layer, color, &values[i], baseline, font, TextAnchor::Middle, angle);
    }
    ctx.thin(layer, color, Shape::Stroke(vec![line_from, line_to]));
}

pub(crate) fn layout_dimensions(ctx: &mut Ctx) -> Result<(), LayoutError> {
    let s = ctx.s;
    let o = &s.settings.objects;
    let ids: Vec<DimensionId> = ctx.sel.dimensions.iter().copied().collect();
    for id in ids {
        let d = s.dimensions.get(id).ok_or(ModelError::UnknownDimension(id))?.clone();
        let u = dim_dir(s, &d)?;
        let e = d.ext_axis.unit();
        let true_pos: Vec<Vec3> = d.points.iter().map(|p| s.dim_point_position(p)).collect::<Result<_, _>>()?;
        let shown: Vec<Vec3> = d.points.iter().map(|p| ctx.field.dim_point(s, p)).collect::<Result<_, _>>()?;
        let (Some(_), Some(e2)) = (ctx.dir2d(&u), ctx.dir2d(&e)) else {
            ctx.warn(format!("{id}: dimension seen end-on, not drawn"));
            continue;
        };
        let off = d.line_offset / ctx.scale;
        let level = shown[0].dot(&e) + off;
        let perpendicular = u.dot(&e).abs() < 1e-9;
        let mut order: Vec<usize> = (0..shown.len()).collect();
        order.sort_by(|a, b| shown[*a].dot(&u).total_cmp(&shown[*b].dot(&u)));
        let mut feet = Vec::new();
        for &i in &order {
            let p = shown[i];
            let q = if perpendicular { p + e * (level - p.dot(&e)) } else { p + e * off };
            let (p2, q2) = (ctx.to2d(&p), ctx.to2d(&q));
            let sign = if (q - p).dot(&e) >= 0.0 { 1.0 } else { -1.0 };
            let over = q2 + e2 * (sign * o.dim_ext_overshoot);
            if (q2 - p2).norm() > 1e-9 {
                ctx.thin(Layer::Dimensions, o.dim_color, Shape::Stroke(vec![p2, over]));
            }
            feet.push(q2);
        }
        // Values follow drawing order even if an offset reorders points.
        let along: Vec<f64> = order.iter().map(|i| true_pos[*i].dot(&u)).collect();
        let values: Vec<String> = along
            .windows(2)
            .map(|w| format_length(w[1] - w[0], o.dim_precision))
            .collect();
        let away = e2 * if off >= 0.0 { 1.0 } else { -1.0 };
        let font = o.dim_font.clone();
        draw_chain(ctx, Layer::Dimensions, o.dim_color, &feet, &values, away, &font, false);
    }
    Ok(())
}
