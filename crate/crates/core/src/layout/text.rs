use crate::model::rich::{self, SpecialSymbol, TextPiece};
use crate::model::{FontSetting, Vec2};

use super::{Ctx, Layer, Shape, TextAnchor};

/// Box-model width of one stored line (paper mm).
pub fn text_width(line: &str, font: &FontSetting) -> f64 {
    rich::cell_count(&rich::parse(line)) as f64 * font.char_width()
}

/// Slope sign in a unit cell, the low end on the falling side.
fn slope_glyph(sym: SpecialSymbol) -> [Vec2; 4] {
    let (hi, lo) = if sym == SpecialSymbol::SlopeRight { (0.1, 0.9) } else { (0.9, 0.1) };
    [
        Vec2::new(hi, 0.7),
        Vec2::new(lo, 0.1),
        Vec2::new(hi, 0.1),
        Vec2::new(hi, 0.7),
    ]
}

/// Emits one line: plain runs as text, slope signs as strokes.
pub(crate) fn emit_line(
    ctx: &mut Ctx,
    layer: Layer,
    color: u8,
    line: &str,
    at: Vec2,
    font: &FontSetting,
    anchor: TextAnchor,
    angle_deg: f64,
) {
    let pieces = rich::parse(line);
    let cw = font.char_width();
    let width = rich::cell_count(&pieces) as f64 * cw;
    let x0 = match anchor {
        TextAnchor::Start => 0.0,
        TextAnchor::Middle => -width / 2.0,
        TextAnchor::End => -width,
    };
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let place = |x: f64, y: f64| at + Vec2::new(x * cos - y * sin, x * sin + y * cos);
    let mut run: Vec<TextPiece> = Vec::new();
    let mut run_x = x0;
    let mut x = x0;
    let flush = |ctx: &mut Ctx, run: &mut Vec<TextPiece>, run_x: f64| {
        if !run.is_empty() {
            ctx.thin(
                layer,
                color,
                Shape::Text {
                    text: rich::join(run),
                    at: place(run_x, 0.0),
                    font: font.clone(),
                    anchor: TextAnchor::Start,
                    angle_deg,
                },
            );
            run.clear();
        }
    };
    for piece in pieces {
        match piece {
            TextPiece::Symbol(sym) if sym.is_slope() => {
                flush(ctx, &mut run, run_x);
                let pts = slope_glyph(sym)
                    .iter()
                    .map(|p| place(x + p.x * cw, p.y * font.height))
                    .collect();
                ctx.thin(layer, color, Shape::Stroke(pts));
                x += cw;
                run_x = x;
            }
            p => {
                x += rich::cell_count(std::slice::from_ref(&p)) as f64 * cw;
                run.push(p);
            }
        }
    }
    flush(ctx, &mut run, run_x);
}
