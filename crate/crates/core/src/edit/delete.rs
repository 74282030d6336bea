use std::collections::BTreeSet;

use super::annotations::{drop_orphan_props, repair_text};
use super::EditError;
use crate::model::*;

/// Objects removed by one cascade, by list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeletionReport {
    pub points: Vec<PointId>,
    pub pipes: Vec<PipeId>,
    pub joints: Vec<JointId>,
    pub offsets: Vec<OffsetId>,
    pub breaks: Vec<BreakId>,
    pub blocks: Vec<BlockId>,
    pub texts: Vec<TextId>,
    pub pipe_leaders: Vec<PipeLeaderId>,
    pub block_leaders: Vec<BlockLeaderId>,
    pub marks: Vec<MarkId>,
    pub spec_props: Vec<SpecPropsId>,
    pub dimensions: Vec<DimensionId>,
    pub elevations: Vec<ElevationId>,
    pub slopes: Vec<SlopeId>,
}

impl DeletionReport {
    pub fn total(&self) -> usize {
        self.points.len()
            + self.pipes.len()
            + self.joints.len()
            + self.offsets.len()
            + self.breaks.len()
            + self.blocks.len()
            + self.texts.len()
            + self.pipe_leaders.len()
            + self.block_leaders.len()
            + self.marks.len()
            + self.spec_props.len()
            + self.dimensions.len()
            + self.elevations.len()
            + self.slopes.len()
    }
}

/// Removes matching entries from a store and records their ids.
fn take<I: EntityId, T>(store: &mut Store<I, T>, out: &mut Vec<I>, mut hit: impl FnMut(&T) -> bool) {
    let ids: Vec<I> = store.iter().filter(|(_, v)| hit(v)).map(|(id, _)| id).collect();
    for id in ids {
        store.remove(id);
        out.push(id);
    }
}

fn cascade(s: &mut Scheme, points: BTreeSet<PointId>, mut pipes: BTreeSet<PipeId>, mut blocks: BTreeSet<BlockId>) -> DeletionReport {
    let mut r = DeletionReport::default();
    for p in &points {
        if s.points.remove(*p).is_some() {
            r.points.push(*p);
        }
    }
    pipes.extend(s.pipes.iter().filter(|(_, p)| points.contains(&p.start) || points.contains(&p.end)).map(|(id, _)| id));
    for (id, b) in s.blocks.iter() {
        if b.attached_pipes().any(|p| pipes.contains(&p)) {
            blocks.insert(id);
        }
    }
    for p in &pipes {
        if s.pipes.remove(*p).is_some() {
            r.pipes.push(*p);
        }
    }
    for b in &blocks {
        if s.blocks.remove(*b).is_some() {
            r.blocks.push(*b);
        }
    }

    take(&mut s.joints, &mut r.joints, |j| pipes.contains(&j.pipe_a) || pipes.contains(&j.pipe_b));
    take(&mut s.breaks, &mut r.breaks, |b| pipes.contains(&b.pipe));
    for (_, o) in s.offsets.iter_mut() {
        if let OffsetKind::Local { displaced_points } = &mut o.kind {
            displaced_points.retain(|p| !points.contains(p));
        }
    }
    // Local offsets survive only while they still cut something.
    let cut: BTreeSet<OffsetId> = s.breaks.values().map(|b| b.offset).collect();
    let uncut: Vec<OffsetId> = s
        .offsets
        .iter()
        .filter(|(id, o)| !o.is_general() && !cut.contains(id))
        .map(|(id, _)| id)
        .collect();
    for id in uncut {
        s.offsets.remove(id);
        r.offsets.push(id);
    }

    let mut touched_texts = BTreeSet::new();
    take(&mut s.pipe_leaders, &mut r.pipe_leaders, |l| {
        let hit = pipes.contains(&l.pipe);
        if hit {
            touched_texts.insert(l.text);
        }
        hit
    });
    take(&mut s.block_leaders, &mut r.block_leaders, |l| {
        let hit = blocks.contains(&l.block);
        if hit {
            touched_texts.insert(l.text);
        }
        hit
    });
    for t in touched_texts {
        if repair_text(s, t) {
            r.texts.push(t);
        }
    }

    let on_removed = |m: &MarkTarget| match *m {
        MarkTarget::Pipe { pipe, .. } => pipes.contains(&pipe),
        MarkTarget::Block { block, .. } => blocks.contains(&block),
    };
    let mut props = Vec::new();
    let marks: Vec<MarkId> = s.marks.iter().filter(|(_, m)| on_removed(&m.target)).map(|(id, _)| id).collect();
    for id in marks {
        if let Some(m) = s.marks.remove(id) {
            props.extend(m.props);
            r.marks.push(id);
        }
    }
    let before: BTreeSet<SpecPropsId> = s.spec_props.ids().collect();
    drop_orphan_props(s, &props);
    r.spec_props = before.into_iter().filter(|p| !s.spec_props.contains(*p)).collect();

    take(&mut s.elevations, &mut r.elevations, |e| match e.anchor {
        ElevationAnchor::OnPipe { pipe, .. } => pipes.contains(&pipe),
        ElevationAnchor::Block(b) => blocks.contains(&b),
    });
    take(&mut s.slopes, &mut r.slopes, |m| pipes.contains(&m.pipe));

    let mut dims = Vec::new();
    for (id, d) in s.dimensions.iter_mut() {
        d.points.retain(|p| match *p {
            DimPoint::Spatial(pt) => !points.contains(&pt),
            DimPoint::BlockAnchor(b) => !blocks.contains(&b),
        });
        let lost_dir = matches!(d.dim_dir, DimDir::AlongPipe(p) if pipes.contains(&p));
        if d.points.len() < 2 || lost_dir {
            dims.push(id);
        }
    }
    for id in dims {
        s.dimensions.remove(id);
        r.dimensions.push(id);
    }
    r
}

pub fn delete_point(s: &mut Scheme, id: PointId) -> Result<DeletionReport, EditError> {
    s.point(id)?;
    Ok(cascade(s, BTreeSet::from([id]), BTreeSet::new(), BTreeSet::new()))
}

/// Removes a pipe and everything that depends on it; its endpoints stay.
pub fn delete_pipe(s: &mut Scheme, id: PipeId) -> Result<DeletionReport, EditError> {
    s.pipe(id)?;
    Ok(cascade(s, BTreeSet::new(), BTreeSet::from([id]), BTreeSet::new()))
}

pub fn delete_block(s: &mut Scheme, id: BlockId) -> Result<DeletionReport, EditError> {
    s.block(id)?;
    Ok(cascade(s, BTreeSet::new(), BTreeSet::new(), BTreeSet::from([id])))
}
