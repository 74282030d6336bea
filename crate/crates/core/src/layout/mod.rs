//! Resolves a projected scheme into drawing primitives in paper mm.
//!
//! Input order is fixed: grid, pipes with joints and breaks, blocks,
//! dimensions, elevation marks, slope marks, texts and position marks,
//! then the axes picture. Within a class objects follow creation order.

mod annotations;
mod dimensions;
mod grid;
mod pipes;
mod primitives;
mod text;

use crate::constraints::{ConstraintError, LegalityReport};
use crate::geometry::{self, OffsetField, Projection, Selection};
use crate::model::*;

pub use primitives::{bounds, ArrowKind, Layer, Primitive, Shape, TextAnchor, Weight};
pub use annotations::{format_elevation, mark_label, AXES_PICTURE_LEN};
pub use dimensions::{chain_values, format_length, segment_arrows, SegmentArrows};
pub use grid::{grid_letter, GRID_LETTERS};
pub use text::text_width;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("illegal offsets: {}", .0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; "))]
    IllegalOffsets(Vec<LegalityReport>),
}

/// Primitives of one drawing plus notes on objects that could not be drawn.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drawing {
    pub primitives: Vec<Primitive>,
    pub warnings: Vec<String>,
}

impl Drawing {
    pub fn of_layer(&self, layer: Layer) -> impl Iterator<Item = &Primitive> {
        self.primitives.iter().filter(move |p| p.layer == layer)
    }
}

pub(crate) struct Ctx<'a> {
    pub s: &'a Scheme,
    pub proj: &'a Projection,
    pub field: OffsetField,
    pub sel: Selection,
    pub scale: f64,
    pub out: Drawing,
}

impl Ctx<'_> {
    pub fn to2d(&self, p: &Vec3) -> Vec2 {
        self.proj.project(p) * self.scale
    }

    /// Unit image of a model direction, `None` when seen end-on.
    pub fn dir2d(&self, d: &Vec3) -> Option<Vec2> {
        let v = self.proj.project(d);
        let n = v.norm();
        (n > 1e-9).then(|| v / n)
    }

    pub fn push(&mut self, layer: Layer, color: u8, line_type: LineType, weight: Weight, shape: Shape) {
        self.out.primitives.push(Primitive {
            layer,
            color,
            line_type,
            weight,
            shape,
        });
    }

    pub fn thin(&mut self, layer: Layer, color: u8, shape: Shape) {
        self.push(layer, color, LineType::Solid, Weight::Thin, shape);
    }

    pub fn warn(&mut self, msg: String) {
        self.out.warnings.push(msg);
    }
}

/// Left normal of a unit 2D vector, turned to point up (or right).
pub(crate) fn upward_normal(d: Vec2) -> Vec2 {
    let n = Vec2::new(-d.y, d.x);
    if n.y < -1e-12 || (n.y.abs() <= 1e-12 && n.x < 0.0) {
        -n
    } else {
        n
    }
}

/// Text angle for a direction, kept readable (within (-90°, 90°]).
pub(crate) fn readable_angle(d: Vec2) -> f64 {
    let mut a = d.y.atan2(d.x).to_degrees();
    if a > 90.0 + 1e-9 {
        a -= 180.0;
    } else if a <= -90.0 + 1e-9 {
        a += 180.0;
    }
    a
}

/// Lays out the scheme in `proj`, restricted to the height layer `slice`.
pub fn layout_scheme(s: &Scheme, proj: &Projection, slice: Option<(f64, f64)>) -> Result<Drawing, LayoutError> {
    let field = geometry::apply_offsets(s).map_err(LayoutError::IllegalOffsets)?;
    let sel = geometry::slice_scheme(s, slice);
    let mut ctx = Ctx {
        s,
        proj,
        field,
        sel,
        scale: s.settings.mode.scale,
        out: Drawing::default(),
    };
    let vis = s.settings.mode.visibility;
    if vis.grid && ctx.sel.grid {
        grid::layout_grid(&mut ctx);
    }
    pipes::layout_pipes(&mut ctx)?;
    if vis.joints {
        pipes::layout_joints(&mut ctx)?;
    }
    if vis.blocks {
        pipes::layout_blocks(&mut ctx)?;
    }
    if vis.dimensions {
        dimensions::layout_dimensions(&mut ctx)?;
    }
    if vis.elevations {
        annotations::layout_elevations(&mut ctx)?;
    }
    if vis.slopes {
        annotations::layout_slopes(&mut ctx)?;
    }
    if vis.texts {
        annotations::layout_texts(&mut ctx)?;
    }
    if vis.marks {
        annotations::layout_marks(&mut ctx)?;
    }
    if vis.axes_picture {
        annotations::layout_axes_picture(&mut ctx);
    }
    Ok(ctx.out)
}
