use super::ConstraintError;
use crate::model::{Block, BlockId, PipeId, Scheme, SymbolId, UpDir, Vec3};

const PARALLEL_EPS: f64 = 1e-9;

/// Placement data of a block without its orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTemplate {
    pub symbol: SymbolId,
    pub pipe: PipeId,
    pub pipe2: Option<PipeId>,
    pub pipe3: Option<PipeId>,
    pub dist_from_start: f64,
}

impl BlockTemplate {
    pub fn of(block: &Block) -> Self {
        BlockTemplate {
            symbol: block.symbol,
            pipe: block.pipe,
            pipe2: block.pipe2,
            pipe3: block.pipe3,
            dist_from_start: block.dist_from_start,
        }
    }
}

/// Block frame in model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Vec3,
    pub ex: Vec3,
    pub ey: Vec3,
    pub ez: Vec3,
    /// The unit direction `ey` makes an acute angle with.
    pub target: Vec3,
}

fn target(scheme: &Scheme, t: &BlockTemplate, at: &Vec3, updir: UpDir) -> Result<Vec3, ConstraintError> {
    if let Some(v) = updir.axis_vector() {
        return Ok(v);
    }
    let pipe = match updir {
        UpDir::Pipe2 => t.pipe2,
        _ => t.pipe3,
    }
    .ok_or(ConstraintError::MissingAttachedPipe(updir.name()))?;
    Ok(scheme.leg_direction(pipe, at)?)
}

fn host(scheme: &Scheme, t: &BlockTemplate) -> Result<(Vec3, Vec3), ConstraintError> {
    let g = scheme.pipe_geom(t.pipe)?;
    let dir = g.dir();
    if dir == Vec3::zeros() {
        return Err(ConstraintError::DegenerateHost);
    }
    Ok((g.at(t.dist_from_start), dir))
}

/// All admissible `(flip, updir)` pairs, at most 16.
///
/// Up directions parallel to the host pipe are dropped. Axis symmetry
/// keeps `flip = false` only; normal symmetry keeps the positive axes only.
pub fn enumerate_block_orientations(scheme: &Scheme, t: &BlockTemplate) -> Result<Vec<(bool, UpDir)>, ConstraintError> {
    let symbol = scheme.symbol(t.symbol)?;
    let (at, dir) = host(scheme, t)?;
    let flips: &[bool] = if symbol.sym_axis { &[false] } else { &[false, true] };
    let mut out = Vec::new();
    for &flip in flips {
        for updir in UpDir::ALL {
            let attached = match updir {
                UpDir::Pipe2 => t.pipe2.is_some(),
                UpDir::Pipe3 => t.pipe3.is_some(),
                _ => true,
            };
            if !attached || (symbol.sym_normal && updir.is_negative_axis()) {
                continue;
            }
            let v = target(scheme, t, &at, updir)?;
            if v.cross(&dir).norm() <= PARALLEL_EPS {
                continue;
            }
            out.push((flip, updir));
        }
    }
    Ok(out)
}

/// Frame of a template under a given orientation.
pub fn frame_for(scheme: &Scheme, t: &BlockTemplate, flip: bool, updir: UpDir) -> Result<Frame, ConstraintError> {
    let (origin, dir) = host(scheme, t)?;
    let ex = if flip { -dir } else { dir };
    let target = target(scheme, t, &origin, updir)?;
    let ortho = target - ex * target.dot(&ex);
    if ortho.norm() <= PARALLEL_EPS {
        return Err(ConstraintError::DegenerateUpdir(updir.name()));
    }
    let ey = ortho.normalize();
    Ok(Frame {
        origin,
        ex,
        ey,
        ez: ex.cross(&ey),
        target,
    })
}

pub fn resolve_block_frame(scheme: &Scheme, id: BlockId) -> Result<Frame, ConstraintError> {
    let b = scheme.block(id)?;
    frame_for(scheme, &BlockTemplate::of(b), b.flip, b.updir)
}
