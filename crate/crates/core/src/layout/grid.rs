use crate::model::settings::GridSettings;
use crate::model::*;

use super::dimensions::{draw_chain, format_length};
use super::text::emit_line;
use super::{Ctx, Layer, Shape, TextAnchor, Weight};

/// Letters used for grid axes, in order.
pub const GRID_LETTERS: &str = "АБВГДЕЖИКЛМНПРСТУФЭЮЯ";

/// Label of the `k`-th lettered axis starting from `first`. After the
/// alphabet runs out the letters repeat with a number suffix.
pub fn grid_letter(first: char, k: u32) -> String {
    let letters: Vec<char> = GRID_LETTERS.chars().collect();
    let start = letters.iter().position(|c| *c == first).unwrap_or(0);
    let i = start + k as usize;
    let n = letters.len();
    let c = letters[i % n];
    if i < n {
        c.to_string()
    } else {
        format!("{c}{}", i / n)
    }
}

/// One axis family: lines at `positions` along `along`, running along
/// `across` from the label end `span.0` to `span.1`.
struct Family<'a> {
    along: Vec3,
    across: Vec3,
    positions: Vec<f64>,
    visible: Vec<bool>,
    labels: Vec<String>,
    span: (f64, f64),
    lead: f64,
    dim_offset: f64,
    overall: bool,
    settings: &'a GridSettings,
}

fn label_list(g: &GridSettings, count: usize, digits: bool) -> Vec<String> {
    (0..count as u32)
        .map(|k| {
            if digits {
                (g.first_number + k).to_string()
            } else {
                grid_letter(g.first_letter, k)
            }
        })
        .collect()
}

fn signed(groups: &[AxisGroup], positive: bool) -> Vec<f64> {
    let sign = if positive { 1.0 } else { -1.0 };
    AxisGrid::positions(groups).into_iter().map(|p| p * sign).collect()
}

/// First and last visible coordinates, in axis order.
fn ends(pos: &[f64], visible: &[bool]) -> Option<(f64, f64)> {
    let mut v = pos.iter().zip(visible).filter(|(_, v)| **v).map(|(p, _)| *p);
    let first = v.next()?;
    Some((first, v.last().unwrap_or(first)))
}

fn draw_family(ctx: &mut Ctx, f: &Family) {
    let g = f.settings;
    let z = Vec3::z() * g.plane_z;
    let Some(across2) = ctx.dir2d(&f.across) else {
        return;
    };
    let up = ctx.dir2d(&Vec3::z()).unwrap_or(Vec2::y());
    let out = if f.span.0 <= f.span.1 { -across2 } else { across2 };
    let r = g.bubble_diameter / 2.0;
    let mut feet = Vec::new();
    let mut dims_at = Vec::new();
    for (i, &p) in f.positions.iter().enumerate() {
        if !f.visible[i] {
            continue;
        }
        let a = ctx.to2d(&(f.along * p + f.across * f.span.0 + z));
        let b = ctx.to2d(&(f.along * p + f.across * f.span.1 + z));
        let lead_end = a + out * f.lead;
        ctx.push(Layer::Grid, g.color, LineType::DashDot, Weight::Thin, Shape::Stroke(vec![lead_end, b - out * f.lead]));
        let lifted = lead_end + up * g.bend_shift_z;
        if g.bend_shift_z != 0.0 {
            ctx.thin(Layer::Grid, g.color, Shape::Stroke(vec![lead_end, lifted]));
        }
        let centre = lifted + out * r;
        ctx.thin(Layer::Grid, g.color, Shape::Circle { center: centre, radius: r });
        let font = g.font.clone();
        emit_line(
            ctx,
            Layer::Grid,
            g.color,
            &f.labels[i],
            centre - Vec2::new(0.0, font.height / 2.0),
            &font,
            TextAnchor::Middle,
            0.0,
        );
        dims_at.push(p);
        feet.push(a + out * f.dim_offset);
    }
    if f.overall && dims_at.len() >= 2 {
        let v = (dims_at[dims_at.len() - 1] - dims_at[0]).abs();
        let values = [format_length(v, ctx.s.settings.objects.dim_precision)];
        let font = g.font.clone();
        draw_chain(ctx, Layer::Grid, g.color, &[feet[0], feet[feet.len() - 1]], &values, out, &font, true);
    }
}

pub(crate) fn layout_grid(ctx: &mut Ctx) {
    let s = ctx.s;
    let Some(grid) = s.grid.clone() else {
        return;
    };
    let g = s.settings.objects.grid.clone();
    let xs = signed(&grid.x_groups, g.dir_positive_x);
    let ys = signed(&grid.y_groups, g.dir_positive_y);
    let vx: Vec<bool> = (1..=xs.len() as u32).map(|i| grid.is_x_visible(i)).collect();
    let vy: Vec<bool> = (1..=ys.len() as u32).map(|i| grid.is_y_visible(i)).collect();
    let (Some(ex), Some(ey)) = (ends(&xs, &vx), ends(&ys, &vy)) else {
        return;
    };
    let label_first = |(first, last): (f64, f64)| if g.labels_at_first { (first, last) } else { (last, first) };
    let x_family = Family {
        along: Vec3::x(),
        across: Vec3::y(),
        labels: label_list(&g, xs.len(), g.digits_label_x),
        positions: xs,
        visible: vx,
        span: label_first(ey),
        lead: g.lead_len_y,
        dim_offset: g.dim_offset_x,
        overall: g.overall_dim_x,
        settings: &g,
    };
    let y_family = Family {
        along: Vec3::y(),
        across: Vec3::x(),
        labels: label_list(&g, ys.len(), !g.digits_label_x),
        positions: ys,
        visible: vy,
        span: label_first(ex),
        lead: g.lead_len_x,
        dim_offset: g.dim_offset_y,
        overall: g.overall_dim_y,
        settings: &g,
    };
    draw_family(ctx, &x_family);
    draw_family(ctx, &y_family);
}
