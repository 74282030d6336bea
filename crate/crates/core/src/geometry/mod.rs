//! Projections, offset displacement, height-layer selection and
//! occlusion gaps.

mod occlusion;
mod offsets;
mod projection;
mod slice;

pub use occlusion::{occlusion_gaps, segment_crossing, OcclusionGap};
pub use offsets::{apply_offsets, OffsetField};
pub use projection::{projection_by_name, projection_catalog, projection_names, Projection, ProjectionFamily};
pub use slice::{slice_scheme, Selection};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("unknown projection {0:?}")]
    UnknownProjection(String),
    #[error("projection direction must be a finite nonzero vector")]
    BadDirection,
}
