//! Domain types, identifier registries and integrity queries.

mod compact;
pub mod coverage;
pub mod ids;
mod integrity;
pub mod rich;
mod scheme;
pub mod settings;
pub mod types;

use std::fmt;

pub use ids::*;
pub use integrity::{integrity_check, Issue, IntegrityRule};
pub use scheme::{Counts, PipeGeom, Scheme};
pub use settings::Settings;
pub use types::*;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown point {0}")]
    UnknownPoint(PointId),
    #[error("unknown pipe {0}")]
    UnknownPipe(PipeId),
    #[error("unknown joint {0}")]
    UnknownJoint(JointId),
    #[error("unknown offset {0}")]
    UnknownOffset(OffsetId),
    #[error("unknown symbol {0}")]
    UnknownSymbol(SymbolId),
    #[error("unknown block {0}")]
    UnknownBlock(BlockId),
    #[error("unknown text {0}")]
    UnknownText(TextId),
    #[error("unknown spec props {0}")]
    UnknownSpecProps(SpecPropsId),
    #[error("unknown dimension {0}")]
    UnknownDimension(DimensionId),
    #[error("unknown position mark {0}")]
    UnknownMark(MarkId),
    #[error("unknown leader {0:?}")]
    UnknownLeader(LeaderRef),
}

/// The object a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Scheme,
    Settings,
    Grid,
    Point(PointId),
    Pipe(PipeId),
    Joint(JointId),
    Offset(OffsetId),
    Break(BreakId),
    Symbol(SymbolId),
    Block(BlockId),
    Text(TextId),
    PipeLeader(PipeLeaderId),
    BlockLeader(BlockLeaderId),
    Mark(MarkId),
    SpecProps(SpecPropsId),
    Dimension(DimensionId),
    Elevation(ElevationId),
    Slope(SlopeId),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Scheme => f.write_str("scheme"),
            Subject::Settings => f.write_str("settings"),
            Subject::Grid => f.write_str("grid"),
            Subject::Point(id) => id.fmt(f),
            Subject::Pipe(id) => id.fmt(f),
            Subject::Joint(id) => id.fmt(f),
            Subject::Offset(id) => id.fmt(f),
            Subject::Break(id) => id.fmt(f),
            Subject::Symbol(id) => id.fmt(f),
            Subject::Block(id) => id.fmt(f),
            Subject::Text(id) => id.fmt(f),
            Subject::PipeLeader(id) => id.fmt(f),
            Subject::BlockLeader(id) => id.fmt(f),
            Subject::Mark(id) => id.fmt(f),
            Subject::SpecProps(id) => id.fmt(f),
            Subject::Dimension(id) => id.fmt(f),
            Subject::Elevation(id) => id.fmt(f),
            Subject::Slope(id) => id.fmt(f),
        }
    }
}
