use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ids::*;
use super::settings::Settings;
use super::types::*;
use super::{ModelError, Vec3};

/// Root document: all object lists, the symbol library and settings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scheme {
    pub points: Store<PointId, Vec3>,
    pub pipes: Store<PipeId, Pipe>,
    pub joints: Store<JointId, Joint>,
    pub offsets: Store<OffsetId, Offset>,
    pub breaks: Store<BreakId, BreakLine>,
    pub symbols: Store<SymbolId, SymbolDef>,
    pub blocks: Store<BlockId, Block>,
    pub texts: Store<TextId, Text>,
    pub pipe_leaders: Store<PipeLeaderId, LeaderToPipe>,
    pub block_leaders: Store<BlockLeaderId, LeaderToBlock>,
    pub marks: Store<MarkId, PositionMark>,
    pub spec_props: Store<SpecPropsId, SpecProps>,
    pub dimensions: Store<DimensionId, Dimension>,
    pub elevations: Store<ElevationId, ElevationMark>,
    pub slopes: Store<SlopeId, SlopeMark>,
    pub grid: Option<AxisGrid>,
    pub settings: Settings,
}

/// Resolved geometry of one pipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipeGeom {
    pub start_id: PointId,
    pub end_id: PointId,
    pub start: Vec3,
    pub end: Vec3,
}

impl PipeGeom {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Unit direction start -> end (zero for a degenerate pipe).
    pub fn dir(&self) -> Vec3 {
        let d = self.end - self.start;
        let n = d.norm();
        if n > 0.0 {
            d / n
        } else {
            Vec3::zeros()
        }
    }

    /// Point at distance `t` from the start.
    pub fn at(&self, t: f64) -> Vec3 {
        self.start + self.dir() * t
    }

    /// Endpoint id at which this pipe touches `p` (within tolerance), if any.
    pub fn endpoint_at(&self, p: &Vec3) -> Option<PointId> {
        if (self.start - p).norm() < MERGE_EPS {
            Some(self.start_id)
        } else if (self.end - p).norm() < MERGE_EPS {
            Some(self.end_id)
        } else {
            None
        }
    }
}

/// Object counts per list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub points: usize,
    pub pipes: usize,
    pub joints: usize,
    pub offsets: usize,
    pub breaks: usize,
    pub symbols: usize,
    pub blocks: usize,
    pub texts: usize,
    pub pipe_leaders: usize,
    pub block_leaders: usize,
    pub marks: usize,
    pub spec_props: usize,
    pub dimensions: usize,
    pub elevations: usize,
    pub slopes: usize,
    pub grid: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.rows().iter().map(|(_, n)| n).sum()
    }

    pub fn rows(&self) -> [(&'static str, usize); 16] {
        [
            ("points", self.points),
            ("pipes", self.pipes),
            ("joints", self.joints),
            ("offsets", self.offsets),
            ("breaks", self.breaks),
            ("symbols", self.symbols),
            ("blocks", self.blocks),
            ("texts", self.texts),
            ("pipe_leaders", self.pipe_leaders),
            ("block_leaders", self.block_leaders),
            ("position_marks", self.marks),
            ("spec_props", self.spec_props),
            ("dimensions", self.dimensions),
            ("elevations", self.elevations),
            ("slopes", self.slopes),
            ("grid", self.grid),
        ]
    }
}

impl Scheme {
    pub fn new() -> Self {
        Scheme::default()
    }

    pub fn with_settings(settings: Settings) -> Self {
        Scheme {
            settings,
            ..Scheme::default()
        }
    }

    pub fn counts(&self) -> Counts {
        Counts {
            points: self.points.len(),
            pipes: self.pipes.len(),
            joints: self.joints.len(),
            offsets: self.offsets.len(),
            breaks: self.breaks.len(),
            symbols: self.symbols.len(),
            blocks: self.blocks.len(),
            texts: self.texts.len(),
            pipe_leaders: self.pipe_leaders.len(),
            block_leaders: self.block_leaders.len(),
            marks: self.marks.len(),
            spec_props: self.spec_props.len(),
            dimensions: self.dimensions.len(),
            elevations: self.elevations.len(),
            slopes: self.slopes.len(),
            grid: usize::from(self.grid.is_some()),
        }
    }

    pub fn point(&self, id: PointId) -> Result<Vec3, ModelError> {
        self.points
            .get(id)
            .copied()
            .ok_or(ModelError::UnknownPoint(id))
    }

    pub fn pipe(&self, id: PipeId) -> Result<&Pipe, ModelError> {
        self.pipes.get(id).ok_or(ModelError::UnknownPipe(id))
    }

    pub fn block(&self, id: BlockId) -> Result<&Block, ModelError> {
        self.blocks.get(id).ok_or(ModelError::UnknownBlock(id))
    }

    pub fn symbol(&self, id: SymbolId) -> Result<&SymbolDef, ModelError> {
        self.symbols.get(id).ok_or(ModelError::UnknownSymbol(id))
    }

    pub fn pipe_geom(&self, id: PipeId) -> Result<PipeGeom, ModelError> {
        let pipe = self.pipe(id)?;
        Ok(PipeGeom {
            start_id: pipe.start,
            end_id: pipe.end,
            start: self.point(pipe.start)?,
            end: self.point(pipe.end)?,
        })
    }

    pub fn pipe_length(&self, id: PipeId) -> Result<f64, ModelError> {
        Ok(self.pipe_geom(id)?.length())
    }

    pub fn point_on_pipe(&self, id: PipeId, t: f64) -> Result<Vec3, ModelError> {
        Ok(self.pipe_geom(id)?.at(t))
    }

    /// Attachment point of a block on its host pipe.
    pub fn block_point(&self, id: BlockId) -> Result<Vec3, ModelError> {
        let block = self.block(id)?;
        self.point_on_pipe(block.pipe, block.dist_from_start)
    }

    pub fn dim_point_position(&self, p: &DimPoint) -> Result<Vec3, ModelError> {
        match *p {
            DimPoint::Spatial(id) => self.point(id),
            DimPoint::BlockAnchor(id) => self.block_point(id),
        }
    }

    pub fn elevation_anchor_position(&self, a: &ElevationAnchor) -> Result<Vec3, ModelError> {
        match *a {
            ElevationAnchor::OnPipe { pipe, t } => self.point_on_pipe(pipe, t),
            ElevationAnchor::Block(b) => self.block_point(b),
        }
    }

    pub fn pipes_at_point(&self, p: PointId) -> Vec<PipeId> {
        self.pipes
            .iter()
            .filter(|(_, pipe)| pipe.has_endpoint(p))
            .map(|(id, _)| id)
            .collect()
    }

    /// Point adjacency through pipes, each neighbour paired with the pipe.
    pub fn point_adjacency(&self) -> BTreeMap<PointId, Vec<(PointId, PipeId)>> {
        let mut adj: BTreeMap<PointId, Vec<(PointId, PipeId)>> = BTreeMap::new();
        for (id, pipe) in self.pipes.iter() {
            adj.entry(pipe.start).or_default().push((pipe.end, id));
            adj.entry(pipe.end).or_default().push((pipe.start, id));
        }
        adj
    }

    /// Pipes reachable from `pipe` through shared endpoints. Joint records
    /// play no part: pipes leaving one point are connected.
    pub fn connected_component(&self, pipe: PipeId) -> Result<BTreeSet<PipeId>, ModelError> {
        let first = self.pipe(pipe)?;
        let adj = self.point_adjacency();
        let mut seen_points = BTreeSet::new();
        let mut pipes = BTreeSet::from([pipe]);
        let mut queue = VecDeque::from([first.start, first.end]);
        while let Some(p) = queue.pop_front() {
            if !seen_points.insert(p) {
                continue;
            }
            for &(q, via) in adj.get(&p).into_iter().flatten() {
                pipes.insert(via);
                if !seen_points.contains(&q) {
                    queue.push_back(q);
                }
            }
        }
        Ok(pipes)
    }

    /// Pipe leaders and block leaders belonging to a text, in id order.
    pub fn leaders_of_text(&self, text: TextId) -> Vec<LeaderRef> {
        let pipe = self
            .pipe_leaders
            .iter()
            .filter(|(_, l)| l.text == text)
            .map(|(id, _)| LeaderRef::Pipe(id));
        let block = self
            .block_leaders
            .iter()
            .filter(|(_, l)| l.text == text)
            .map(|(id, _)| LeaderRef::Block(id));
        pipe.chain(block).collect()
    }

    pub fn leader_text(&self, leader: LeaderRef) -> Option<TextId> {
        match leader {
            LeaderRef::Pipe(id) => self.pipe_leaders.get(id).map(|l| l.text),
            LeaderRef::Block(id) => self.block_leaders.get(id).map(|l| l.text),
        }
    }

    pub fn leader_exists(&self, leader: LeaderRef) -> bool {
        self.leader_text(leader).is_some()
    }

    /// The pipe a text's main leader points at, if it points at a pipe.
    pub fn main_leader_pipe(&self, text: &Text) -> Option<PipeId> {
        match text.main_leader {
            LeaderRef::Pipe(id) => self.pipe_leaders.get(id).map(|l| l.pipe),
            LeaderRef::Block(_) => None,
        }
    }

    pub fn marks_referencing(&self, props: SpecPropsId) -> impl Iterator<Item = (MarkId, &PositionMark)> {
        self.marks
            .iter()
            .filter(move |(_, m)| m.props.contains(&props))
    }

    /// Unit direction from the attachment point of `block` along an attached pipe.
    pub fn leg_direction(&self, pipe: PipeId, at: &Vec3) -> Result<Vec3, ModelError> {
        let g = self.pipe_geom(pipe)?;
        let to_start = (g.start - at).norm();
        let to_end = (g.end - at).norm();
        let far = if to_start < to_end { g.end } else { g.start };
        let d = far - at;
        let n = d.norm();
        Ok(if n > 0.0 { d / n } else { Vec3::zeros() })
    }

    /// Whether offset `id` displaces the point at distance `t` along `pipe`.
    ///
    /// On a pipe cut by a local offset the break placement divides the sides.
    pub fn offset_moves_on_pipe(&self, id: OffsetId, pipe: PipeId, t: f64) -> Result<bool, ModelError> {
        let offset = self.offsets.get(id).ok_or(ModelError::UnknownOffset(id))?;
        let g = self.pipe_geom(pipe)?;
        Ok(match &offset.kind {
            OffsetKind::General { .. } => offset.displaces(g.start_id, &g.at(t)),
            OffsetKind::Local { displaced_points } => {
                let s = displaced_points.contains(&g.start_id);
                let e = displaced_points.contains(&g.end_id);
                if s == e {
                    s
                } else {
                    let cut = self
                        .breaks
                        .values()
                        .find(|b| b.offset == id && b.pipe == pipe)
                        .map(|b| b.placement)
                        .unwrap_or(g.length() / 2.0);
                    if s {
                        t < cut
                    } else {
                        t > cut
                    }
                }
            }
        })
    }

    pub fn offset_moves_dim_point(&self, id: OffsetId, p: &DimPoint) -> Result<bool, ModelError> {
        match *p {
            DimPoint::Spatial(pt) => {
                let offset = self.offsets.get(id).ok_or(ModelError::UnknownOffset(id))?;
                Ok(offset.displaces(pt, &self.point(pt)?))
            }
            DimPoint::BlockAnchor(b) => {
                let block = self.block(b)?;
                self.offset_moves_on_pipe(id, block.pipe, block.dist_from_start)
            }
        }
    }

    /// Same scheme with every list renumbered densely in order.
    pub fn compacted(&self) -> Scheme {
        super::compact::compact(self)
    }
}
