//! Deterministic SVG output for laid-out drawings.
//!
//! Layers become groups in [`Layer::ALL`] order. Coordinates are printed
//! with three decimals, the sheet y axis is flipped, and attributes are
//! written in sorted order.

use std::fmt::Write;

use crate::layout::{ArrowKind, Layer, Primitive, Shape, TextAnchor, Weight};
use crate::model::rich::{self, SpecialSymbol, TextPiece};
use crate::model::{LineType, Vec2};

/// Fixed colour table for palette indices 0..16.
pub const PALETTE: [&str; 16] = [
    "#000000", "#ff0000", "#ffff00", "#00ff00", "#00ffff", "#0000ff", "#ff00ff", "#000000", "#808080", "#c0c0c0",
    "#800000", "#808000", "#008000", "#008080", "#000080", "#800080",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PageSetup {
    /// Blank border around the drawing bounds (paper mm).
    pub margin: f64,
    pub thick_width: f64,
    pub thin_width: f64,
    /// Radius of the dots of a dot run.
    pub dot_radius: f64,
}

impl Default for PageSetup {
    fn default() -> Self {
        PageSetup {
            margin: 10.0,
            thick_width: 0.5,
            thin_width: 0.25,
            dot_radius: 0.3,
        }
    }
}

pub fn color_hex(index: u8) -> &'static str {
    PALETTE[index as usize % PALETTE.len()]
}

/// Dash pattern in paper mm, `None` for solid lines.
pub fn dash_pattern(t: LineType) -> Option<&'static str> {
    match t {
        LineType::Solid => None,
        LineType::Dashed => Some("4.000 1.500"),
        LineType::DashDot => Some("8.000 1.500 1.000 1.500"),
        LineType::Dotted => Some("0.500 1.000"),
    }
}

/// Number of dots in a run of length `len` with spacing `step`.
pub fn dot_count(len: f64, step: f64) -> usize {
    if step <= 0.0 || !step.is_finite() {
        return if len > 0.0 { 2 } else { 1 };
    }
    (len / step + 1e-9).floor() as usize + 1
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// Sheet point to SVG user space.
fn pt(p: Vec2) -> String {
    format!("{} {}", num(p.x), num(-p.y))
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Display form of an escaped text line. Slope signs are drawn by layout
/// as strokes and are dropped here.
pub fn display_text(line: &str) -> String {
    let mut out = String::new();
    for piece in rich::parse(line) {
        match piece {
            TextPiece::Plain(p) => out.push_str(&p),
            TextPiece::Symbol(SpecialSymbol::Diameter) => out.push('\u{2205}'),
            TextPiece::Symbol(SpecialSymbol::Degree) => out.push('\u{00B0}'),
            TextPiece::Symbol(_) => {}
        }
    }
    out
}

struct Writer<'a> {
    out: String,
    page: &'a PageSetup,
}

impl Writer<'_> {
    fn width(&self, w: Weight) -> String {
        num(match w {
            Weight::Thick => self.page.thick_width,
            Weight::Thin => self.page.thin_width,
        })
    }

    fn path(&mut self, d: &str, p: &Primitive) {
        let dash = dash_pattern(p.line_type)
            .map(|d| format!(" stroke-dasharray=\"{d}\""))
            .unwrap_or_default();
        let _ = writeln!(
            self.out,
            "<path d=\"{d}\" stroke=\"{}\"{dash} stroke-width=\"{}\"/>",
            color_hex(p.color),
            self.width(p.weight)
        );
    }

    fn filled_path(&mut self, d: &str, color: u8) {
        let c = color_hex(color);
        let _ = writeln!(self.out, "<path d=\"{d}\" fill=\"{c}\" stroke=\"none\"/>");
    }

    fn primitive(&mut self, p: &Primitive) {
        match &p.shape {
            Shape::Stroke(pts) => {
                if pts.len() < 2 {
                    return;
                }
                let mut d = format!("M {}", pt(pts[0]));
                for q in &pts[1..] {
                    let _ = write!(d, " L {}", pt(*q));
                }
                self.path(&d, p);
            }
            Shape::Arc {
                center,
                radius,
                start_deg,
                sweep_deg,
            } => {
                let at = |deg: f64| {
                    let a = deg.to_radians();
                    center + Vec2::new(a.cos(), a.sin()) * *radius
                };
                let r = num(*radius);
                // Sheet counter-clockwise is clockwise once y is flipped.
                let sweep_flag = if *sweep_deg >= 0.0 { 0 } else { 1 };
                let n = if sweep_deg.abs() > 180.0 { 2 } else { 1 };
                let mut d = format!("M {}", pt(at(*start_deg)));
                for k in 1..=n {
                    let end = at(start_deg + sweep_deg * k as f64 / n as f64);
                    let _ = write!(d, " A {r} {r} 0 0 {sweep_flag} {}", pt(end));
                }
                self.path(&d, p);
            }
            Shape::Circle { center, radius } => {
                let dash = dash_pattern(p.line_type)
                    .map(|d| format!(" stroke-dasharray=\"{d}\""))
                    .unwrap_or_default();
                let _ = writeln!(
                    self.out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"{}\"{dash} stroke-width=\"{}\"/>",
                    num(center.x),
                    num(-center.y),
                    num(*radius),
                    color_hex(p.color),
                    self.width(p.weight)
                );
            }
            Shape::DotRun { from, to, step } => {
                let len = (to - from).norm();
                let n = dot_count(len, *step);
                let dir = if len > 0.0 { (to - from) / len } else { Vec2::zeros() };
                let spacing = if *step > 0.0 && step.is_finite() { *step } else { len };
                let c = color_hex(p.color);
                for k in 0..n {
                    let q = from + dir * (spacing * k as f64).min(len);
                    let _ = writeln!(
                        self.out,
                        "<circle cx=\"{}\" cy=\"{}\" fill=\"{c}\" r=\"{}\" stroke=\"none\"/>",
                        num(q.x),
                        num(-q.y),
                        num(self.page.dot_radius)
                    );
                }
            }
            Shape::WavePair { a, b, diameter } => {
                let along = (b - a).try_normalize(1e-12).unwrap_or(Vec2::x());
                let n = Vec2::new(-along.y, along.x);
                let h = diameter / 2.0;
                let r = num(diameter / 4.0);
                let mut d = String::new();
                for end in [a, b] {
                    let (p0, p1) = (end - n * h, end + n * h);
                    let _ = write!(
                        d,
                        "{}M {} A {r} {r} 0 0 1 {} A {r} {r} 0 0 0 {}",
                        if d.is_empty() { "" } else { " " },
                        pt(p0),
                        pt(*end),
                        pt(p1)
                    );
                }
                self.path(&d, p);
            }
            Shape::Text {
                text,
                at,
                font,
                anchor,
                angle_deg,
            } => {
                let shown = display_text(text);
                if shown.is_empty() {
                    return;
                }
                let width = rich::cell_count(&rich::parse(text)) as f64 * font.char_width();
                let anchor = match anchor {
                    TextAnchor::Start => "start",
                    TextAnchor::Middle => "middle",
                    TextAnchor::End => "end",
                };
                let style = if font.slant { " font-style=\"italic\"" } else { "" };
                let rotate = if angle_deg.abs() > 1e-12 {
                    format!(" transform=\"rotate({} {})\"", num(-angle_deg), pt(*at))
                } else {
                    String::new()
                };
                let _ = writeln!(
                    self.out,
                    "<text fill=\"{}\" font-family=\"{}\" font-size=\"{}\"{style} lengthAdjust=\"spacingAndGlyphs\" stroke=\"none\" text-anchor=\"{anchor}\" textLength=\"{}\"{rotate} x=\"{}\" y=\"{}\">{}</text>",
                    color_hex(p.color),
                    xml_escape(&font.face),
                    num(font.height),
                    num(width),
                    num(at.x),
                    num(-at.y),
                    xml_escape(&shown)
                );
            }
            Shape::Arrow {
                kind,
                at,
                dir,
                len,
                half_width,
            } => {
                let dir = dir.try_normalize(1e-12).unwrap_or(Vec2::x());
                let n = Vec2::new(-dir.y, dir.x);
                match kind {
                    ArrowKind::Arrow => {
                        let base = at - dir * *len;
                        let d = format!(
                            "M {} L {} L {} Z",
                            pt(*at),
                            pt(base + n * *half_width),
                            pt(base - n * *half_width)
                        );
                        self.filled_path(&d, p.color);
                    }
                    ArrowKind::Tick => {
                        let slash = (dir + n) * (len / 2.0 / std::f64::consts::SQRT_2);
                        let d = format!("M {} L {}", pt(at - slash), pt(at + slash));
                        let mut tick = p.clone();
                        tick.weight = Weight::Thick;
                        self.path(&d, &tick);
                    }
                }
            }
        }
    }
}

/// Renders primitives into one SVG document.
pub fn render(prims: &[Primitive], page: &PageSetup) -> String {
    let m = page.margin;
    let (lo, hi) = crate::layout::bounds(prims).unwrap_or((Vec2::zeros(), Vec2::zeros()));
    let (w, h) = (hi.x - lo.x + 2.0 * m, hi.y - lo.y + 2.0 * m);
    let mut wr = Writer {
        out: String::new(),
        page,
    };
    let _ = writeln!(wr.out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        wr.out,
        "<svg height=\"{}mm\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"{}mm\" xmlns=\"http://www.w3.org/2000/svg\">",
        num(h),
        num(lo.x - m),
        num(-hi.y - m),
        num(w),
        num(h),
        num(w)
    );
    let _ = writeln!(wr.out, "<g fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">");
    for layer in Layer::ALL {
        let mut in_layer = prims.iter().filter(|p| p.layer == layer).peekable();
        if in_layer.peek().is_none() {
            continue;
        }
        let _ = writeln!(wr.out, "<g id=\"{}\">", layer.name());
        for p in in_layer {
            wr.primitive(p);
        }
        let _ = writeln!(wr.out, "</g>");
    }
    let _ = writeln!(wr.out, "</g>");
    let _ = writeln!(wr.out, "</svg>");
    wr.out
}
