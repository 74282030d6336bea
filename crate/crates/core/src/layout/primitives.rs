use crate::model::{FontSetting, LineType, Vec2};

/// Object class a primitive was produced for, in drawing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Grid,
    Pipes,
    Joints,
    Breaks,
    BreakLetters,
    Blocks,
    Dimensions,
    Elevations,
    Slopes,
    Texts,
    Marks,
    AxesPicture,
}

impl Layer {
    pub const ALL: [Layer; 12] = [
        Layer::Grid,
        Layer::Pipes,
        Layer::Joints,
        Layer::Breaks,
        Layer::BreakLetters,
        Layer::Blocks,
        Layer::Dimensions,
        Layer::Elevations,
        Layer::Slopes,
        Layer::Texts,
        Layer::Marks,
        Layer::AxesPicture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Grid => "grid",
            Layer::Pipes => "pipes",
            Layer::Joints => "joints",
            Layer::Breaks => "breaks",
            Layer::BreakLetters => "break-letters",
            Layer::Blocks => "blocks",
            Layer::Dimensions => "dimensions",
            Layer::Elevations => "elevations",
            Layer::Slopes => "slopes",
            Layer::Texts => "texts",
            Layer::Marks => "marks",
            Layer::AxesPicture => "axes-picture",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    Thick,
    Thin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArrowKind {
    Arrow,
    Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextAnchor {
    Start,
    Middle,
    End,
}

/// Resolved geometry in paper mm, y up.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Open polyline.
    Stroke(Vec<Vec2>),
    /// Circular arc, counter-clockwise from `start_deg` by `sweep_deg`.
    Arc {
        center: Vec2,
        radius: f64,
        start_deg: f64,
        sweep_deg: f64,
    },
    Circle {
        center: Vec2,
        radius: f64,
    },
    /// Dots every `step` from `from` towards `to`, both ends included.
    DotRun {
        from: Vec2,
        to: Vec2,
        step: f64,
    },
    /// Two opposed half waves at the ends `a` and `b` of a pipe gap.
    WavePair {
        a: Vec2,
        b: Vec2,
        diameter: f64,
    },
    /// One line of text. Diameter and degree signs stay escaped; slope
    /// signs are drawn as strokes.
    Text {
        text: String,
        at: Vec2,
        font: FontSetting,
        anchor: TextAnchor,
        angle_deg: f64,
    },
    /// Arrowhead with its tip at `at`, pointing along `dir`; a tick is a
    /// slash of length `len` across `dir`.
    Arrow {
        kind: ArrowKind,
        at: Vec2,
        dir: Vec2,
        len: f64,
        half_width: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub layer: Layer,
    pub color: u8,
    pub line_type: LineType,
    pub weight: Weight,
    pub shape: Shape,
}

impl Primitive {
    /// Every point the primitive touches, for bounds.
    pub fn extent(&self) -> Vec<Vec2> {
        match &self.shape {
            Shape::Stroke(pts) => pts.clone(),
            Shape::Arc { center, radius, .. } | Shape::Circle { center, radius } => {
                let r = Vec2::new(*radius, *radius);
                vec![center - r, center + r]
            }
            Shape::DotRun { from, to, .. } => vec![*from, *to],
            Shape::WavePair { a, b, diameter } => {
                let r = Vec2::new(diameter / 2.0, diameter / 2.0);
                vec![a - r, a + r, b - r, b + r]
            }
            Shape::Text {
                text,
                at,
                font,
                anchor,
                angle_deg,
            } => {
                let w = crate::model::rich::cell_count(&crate::model::rich::parse(text)) as f64 * font.char_width();
                let x0 = match anchor {
                    TextAnchor::Start => 0.0,
                    TextAnchor::Middle => -w / 2.0,
                    TextAnchor::End => -w,
                };
                let (sin, cos) = angle_deg.to_radians().sin_cos();
                [
                    Vec2::new(x0, 0.0),
                    Vec2::new(x0 + w, 0.0),
                    Vec2::new(x0, font.height),
                    Vec2::new(x0 + w, font.height),
                ]
                .iter()
                .map(|p| at + Vec2::new(p.x * cos - p.y * sin, p.x * sin + p.y * cos))
                .collect()
            }
            Shape::Arrow { at, dir, len, .. } => vec![*at, at - dir * *len],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.extent().iter().all(|p| p.x.is_finite() && p.y.is_finite())
    }
}

/// Bounding box `(min, max)` of a primitive list.
pub fn bounds(prims: &[Primitive]) -> Option<(Vec2, Vec2)> {
    let mut it = prims.iter().flat_map(|p| p.extent());
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (Vec2::new(lo.x.min(p.x), lo.y.min(p.y)), Vec2::new(hi.x.max(p.x), hi.y.max(p.y)))
    }))
}
