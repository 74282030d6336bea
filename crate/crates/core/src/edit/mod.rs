//! Mutating operations: defaults, automatic letters and numbering,
//! cascade deletion and slope-text synchronisation.
//!
//! Every operation either succeeds and leaves the scheme sound, or fails
//! and leaves it untouched.

mod annotations;
mod delete;
mod offsets;
mod slope;

use crate::constraints::{self, ConstraintError, LegalityReport};
use crate::model::*;

pub use annotations::*;
pub use delete::{delete_block, delete_pipe, delete_point, DeletionReport};
pub use offsets::{add_offset, delete_offset, letter_at, next_letter, OffsetSpec, OffsetSpecKind};
pub use slope::{format_slope, pipe_slope, sync_all_slope_texts, sync_slope_texts, SlopeError, SlopeSync};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EditError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("{0}")]
    Illegal(LegalityReport),
    #[error("offset rejected: {}", .0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; "))]
    IllegalOffset(Vec<LegalityReport>),
    #[error("{0}")]
    Invalid(String),
    #[error("positions are numbered manually")]
    ManualNumbering,
    #[error("change rejected: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Rejected(Vec<Issue>),
}

fn invalid(msg: impl Into<String>) -> EditError {
    EditError::Invalid(msg.into())
}

/// Adds a point, or returns the stored point within `MERGE_EPS` of it.
pub fn add_point(s: &mut Scheme, p: Vec3) -> Result<PointId, EditError> {
    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
        return Err(EditError::NonFinite);
    }
    if let Some(id) = find_point(s, &p) {
        return Ok(id);
    }
    Ok(s.points.insert(p))
}

pub fn find_point(s: &Scheme, p: &Vec3) -> Option<PointId> {
    s.points
        .iter()
        .find(|(_, q)| (*q - p).norm() < MERGE_EPS)
        .map(|(id, _)| id)
}

pub fn add_pipe(s: &mut Scheme, a: PointId, b: PointId, style: Option<LineStyle>) -> Result<PipeId, EditError> {
    let style = style.unwrap_or(s.settings.objects.pipe_style);
    if style.color >= PALETTE_SIZE {
        return Err(invalid(format!("colour {} outside palette", style.color)));
    }
    let pipe = Pipe { start: a, end: b, style };
    let report = constraints::check_pipe_overlap(s, &pipe)?;
    if !report.is_ok() {
        return Err(EditError::Illegal(report));
    }
    Ok(s.pipes.insert(pipe))
}

/// Adds the pipe between two coordinates, merging endpoints with stored points.
pub fn add_pipe_between(s: &mut Scheme, a: Vec3, b: Vec3, style: Option<LineStyle>) -> Result<PipeId, EditError> {
    let had = (find_point(s, &a), find_point(s, &b));
    let pa = add_point(s, a)?;
    let pb = add_point(s, b)?;
    add_pipe(s, pa, pb, style).inspect_err(|_| {
        if had.0.is_none() {
            s.points.remove(pa);
        }
        if had.1.is_none() && pb != pa {
            s.points.remove(pb);
        }
    })
}

pub fn add_joint(s: &mut Scheme, a: PipeId, b: PipeId, kind: Option<JointKind>) -> Result<JointId, EditError> {
    let kind = kind.unwrap_or(s.settings.objects.joint_kind);
    let pa = s.pipe(a)?.clone();
    let pb = s.pipe(b)?.clone();
    if a == b {
        return Err(invalid("a joint needs two different pipes"));
    }
    let shared = [pa.start, pa.end].iter().filter(|p| pb.has_endpoint(**p)).count();
    if shared != 1 {
        return Err(invalid(format!("{a} and {b} do not share exactly one endpoint")));
    }
    if let JointKind::Fillet { radius } = kind {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("fillet radius must be positive"));
        }
    }
    let joint = Joint { pipe_a: a, pipe_b: b, kind };
    if s.joints.values().any(|j| j.pair() == joint.pair()) {
        return Err(invalid(format!("{a} and {b} are already joined")));
    }
    Ok(s.joints.insert(joint))
}

pub fn delete_joint(s: &mut Scheme, id: JointId) -> Result<(), EditError> {
    s.joints.remove(id).map(|_| ()).ok_or(ModelError::UnknownJoint(id).into())
}

pub fn add_symbol(s: &mut Scheme, def: SymbolDef) -> Result<SymbolId, EditError> {
    if def.graphics.is_empty() {
        return Err(invalid("symbol without graphics"));
    }
    if def.cut_lengths.len() != def.attach.legs() || def.cut_lengths.iter().any(|c| !(*c >= 0.0)) {
        return Err(invalid(format!(
            "{} attachment needs {} non-negative cut lengths",
            def.attach.name(),
            def.attach.legs()
        )));
    }
    if !(def.stretch_default > 0.0) {
        return Err(invalid("stretch must be positive"));
    }
    Ok(s.symbols.insert(def))
}

/// Requested placement of a block; omitted style and stretch come from settings.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub symbol: SymbolId,
    pub pipe: PipeId,
    pub pipe2: Option<PipeId>,
    pub pipe3: Option<PipeId>,
    pub dist_from_start: f64,
    pub flip: bool,
    pub updir: UpDir,
    pub style: Option<LineStyle>,
    pub stretch: Option<f64>,
}

impl BlockSpec {
    pub fn axial(symbol: SymbolId, pipe: PipeId, dist_from_start: f64, updir: UpDir) -> Self {
        BlockSpec {
            symbol,
            pipe,
            pipe2: None,
            pipe3: None,
            dist_from_start,
            flip: false,
            updir,
            style: None,
            stretch: None,
        }
    }
}

pub fn place_block(s: &mut Scheme, spec: BlockSpec) -> Result<BlockId, EditError> {
    let symbol = s.symbol(spec.symbol)?;
    let attach = symbol.attach;
    let stretch = spec.stretch.unwrap_or(symbol.stretch_default * s.settings.objects.block_stretch);
    let len = s.pipe_length(spec.pipe)?;
    if !(spec.dist_from_start >= 0.0 && spec.dist_from_start <= len) {
        return Err(invalid(format!(
            "distance {} outside pipe {} of length {len}",
            spec.dist_from_start, spec.pipe
        )));
    }
    let needs2 = attach != Attach::Axial;
    let needs3 = attach == Attach::Tee;
    if spec.pipe2.is_some() != needs2 || spec.pipe3.is_some() != needs3 {
        return Err(invalid(format!("{} attachment with wrong set of attached pipes", attach.name())));
    }
    if !(stretch > 0.0) {
        return Err(invalid("stretch must be positive"));
    }
    let block = Block {
        symbol: spec.symbol,
        pipe: spec.pipe,
        pipe2: spec.pipe2,
        pipe3: spec.pipe3,
        style: spec.style.unwrap_or(s.settings.objects.block_style),
        dist_from_start: spec.dist_from_start,
        flip: spec.flip,
        updir: spec.updir,
        stretch,
    };
    let at = s.point_on_pipe(spec.pipe, spec.dist_from_start)?;
    for p in block.pipe2.into_iter().chain(block.pipe3) {
        if p == block.pipe || s.pipe_geom(p)?.endpoint_at(&at).is_none() {
            return Err(invalid(format!("{p} does not meet {} at the attachment point", block.pipe)));
        }
    }
    let variants = constraints::enumerate_block_orientations(s, &constraints::BlockTemplate::of(&block))?;
    if !variants.contains(&(block.flip, block.updir)) {
        return Err(invalid(format!(
            "orientation (flip={}, {}) is not admissible",
            block.flip,
            block.updir.name()
        )));
    }
    Ok(s.blocks.insert(block))
}

/// Moves a point, keeping dependent positions on shortened pipes in range
/// and slope texts current. Rejected when the result would be unsound.
pub fn move_point(s: &mut Scheme, id: PointId, to: Vec3) -> Result<SlopeSync, EditError> {
    if !(to.x.is_finite() && to.y.is_finite() && to.z.is_finite()) {
        return Err(EditError::NonFinite);
    }
    s.point(id)?;
    if let Some(other) = find_point(s, &to).filter(|o| *o != id) {
        return Err(invalid(format!("{id} would coincide with {other}")));
    }
    let before = s.clone();
    *s.points.get_mut(id).expect("checked above") = to;
    let pipes = s.pipes_at_point(id);
    for &pipe in &pipes {
        let Ok(len) = s.pipe_length(pipe) else { continue };
        let clamp = |t: &mut f64| *t = t.clamp(0.0, len);
        for (_, l) in s.pipe_leaders.iter_mut() {
            if l.pipe == pipe {
                clamp(&mut l.t);
            }
        }
        for (_, m) in s.marks.iter_mut() {
            if let MarkTarget::Pipe { pipe: p, t } = &mut m.target {
                if *p == pipe {
                    clamp(t);
                }
            }
        }
        for (_, b) in s.blocks.iter_mut() {
            if b.pipe == pipe {
                clamp(&mut b.dist_from_start);
            }
        }
        for (_, e) in s.elevations.iter_mut() {
            if let ElevationAnchor::OnPipe { pipe: p, t } = &mut e.anchor {
                if *p == pipe {
                    clamp(t);
                }
            }
        }
        for (_, m) in s.slopes.iter_mut() {
            if m.pipe == pipe {
                clamp(&mut m.t);
            }
        }
        for (_, b) in s.breaks.iter_mut() {
            if b.pipe == pipe && is_local(&before, b.offset) {
                clamp(&mut b.placement);
            }
        }
    }
    let issues = integrity_check(s);
    if !issues.is_empty() {
        *s = before;
        return Err(EditError::Rejected(issues));
    }
    let mut sync = SlopeSync::default();
    for pipe in pipes {
        let r = sync_slope_texts(s, pipe)?;
        sync.updated += r.updated;
        sync.flagged.extend(r.flagged);
    }
    Ok(sync)
}

fn is_local(s: &Scheme, offset: OffsetId) -> bool {
    s.offsets.get(offset).is_some_and(|o| !o.is_general())
}
