use std::collections::BTreeSet;

use crate::model::*;

/// Objects taking part in a drawing of a height layer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub pipes: BTreeSet<PipeId>,
    pub joints: BTreeSet<JointId>,
    pub breaks: BTreeSet<BreakId>,
    pub blocks: BTreeSet<BlockId>,
    pub texts: BTreeSet<TextId>,
    pub pipe_leaders: BTreeSet<PipeLeaderId>,
    pub block_leaders: BTreeSet<BlockLeaderId>,
    pub marks: BTreeSet<MarkId>,
    pub dimensions: BTreeSet<DimensionId>,
    pub elevations: BTreeSet<ElevationId>,
    pub slopes: BTreeSet<SlopeId>,
    pub grid: bool,
}

impl Selection {
    pub fn leader_selected(&self, l: LeaderRef) -> bool {
        match l {
            LeaderRef::Pipe(id) => self.pipe_leaders.contains(&id),
            LeaderRef::Block(id) => self.block_leaders.contains(&id),
        }
    }

    fn target_selected(&self, t: &MarkTarget) -> bool {
        match *t {
            MarkTarget::Pipe { pipe, .. } => self.pipes.contains(&pipe),
            MarkTarget::Block { block, .. } => self.blocks.contains(&block),
        }
    }
}

/// Selects what a height layer `[z_min, z_max]` shows; `None` selects all.
///
/// Membership is decided on undisplaced coordinates with closed bounds.
pub fn slice_scheme(s: &Scheme, slab: Option<(f64, f64)>) -> Selection {
    let inside = |z: f64| slab.is_none_or(|(lo, hi)| z >= lo && z <= hi);
    let mut sel = Selection::default();
    for (id, _) in s.pipes.iter() {
        let Ok(g) = s.pipe_geom(id) else { continue };
        let touches = slab.is_none_or(|(lo, hi)| g.start.z.min(g.end.z) <= hi && g.start.z.max(g.end.z) >= lo);
        if touches {
            sel.pipes.insert(id);
        }
    }
    sel.joints = s
        .joints
        .iter()
        .filter(|(_, j)| sel.pipes.contains(&j.pipe_a) && sel.pipes.contains(&j.pipe_b))
        .map(|(id, _)| id)
        .collect();
    sel.breaks = s
        .breaks
        .iter()
        .filter(|(_, b)| sel.pipes.contains(&b.pipe))
        .map(|(id, _)| id)
        .collect();
    sel.blocks = s
        .blocks
        .ids()
        .filter(|id| s.block_point(*id).is_ok_and(|p| inside(p.z)))
        .collect();
    sel.pipe_leaders = s
        .pipe_leaders
        .iter()
        .filter(|(_, l)| sel.pipes.contains(&l.pipe))
        .map(|(id, _)| id)
        .collect();
    sel.block_leaders = s
        .block_leaders
        .iter()
        .filter(|(_, l)| sel.blocks.contains(&l.block))
        .map(|(id, _)| id)
        .collect();
    sel.texts = s
        .texts
        .ids()
        .filter(|t| s.leaders_of_text(*t).into_iter().any(|l| sel.leader_selected(l)))
        .collect();
    sel.marks = s
        .marks
        .iter()
        .filter(|(_, m)| sel.target_selected(&m.target))
        .map(|(id, _)| id)
        .collect();
    sel.dimensions = s
        .dimensions
        .iter()
        .filter(|(_, d)| d.points.iter().any(|p| s.dim_point_position(p).is_ok_and(|q| inside(q.z))))
        .map(|(id, _)| id)
        .collect();
    sel.elevations = s
        .elevations
        .iter()
        .filter(|(_, e)| s.elevation_anchor_position(&e.anchor).is_ok_and(|q| inside(q.z)))
        .map(|(id, _)| id)
        .collect();
    sel.slopes = s
        .slopes
        .iter()
        .filter(|(_, m)| sel.pipes.contains(&m.pipe))
        .map(|(id, _)| id)
        .collect();
    sel.grid = s.grid.is_some() && inside(s.settings.objects.grid.plane_z);
    sel
}
