//! Dense renumbering of all identifiers.

use std::collections::BTreeMap;

use super::ids::*;
use super::scheme::Scheme;
use super::types::*;

struct IdMaps {
    points: BTreeMap<PointId, PointId>,
    pipes: BTreeMap<PipeId, PipeId>,
    offsets: BTreeMap<OffsetId, OffsetId>,
    symbols: BTreeMap<SymbolId, SymbolId>,
    blocks: BTreeMap<BlockId, BlockId>,
    texts: BTreeMap<TextId, TextId>,
    pipe_leaders: BTreeMap<PipeLeaderId, PipeLeaderId>,
    block_leaders: BTreeMap<BlockLeaderId, BlockLeaderId>,
    spec_props: BTreeMap<SpecPropsId, SpecPropsId>,
}

fn map<I: EntityId>(m: &BTreeMap<I, I>, id: I) -> I {
    // Dangling ids are kept as-is so integrity checks still see them.
    m.get(&id).copied().unwrap_or(id)
}

fn rebuild<I: EntityId, T: Clone>(store: &Store<I, T>, f: impl Fn(&T) -> T) -> Store<I, T> {
    store.values().map(f).collect()
}

pub(crate) fn compact(s: &Scheme) -> Scheme {
    let m = IdMaps {
        points: s.points.dense_map(),
        pipes: s.pipes.dense_map(),
        offsets: s.offsets.dense_map(),
        symbols: s.symbols.dense_map(),
        blocks: s.blocks.dense_map(),
        texts: s.texts.dense_map(),
        pipe_leaders: s.pipe_leaders.dense_map(),
        block_leaders: s.block_leaders.dense_map(),
        spec_props: s.spec_props.dense_map(),
    };
    let target = |t: &MarkTarget| match *t {
        MarkTarget::Pipe { pipe, t } => MarkTarget::Pipe {
            pipe: map(&m.pipes, pipe),
            t,
        },
        MarkTarget::Block { block, anchor } => MarkTarget::Block {
            block: map(&m.blocks, block),
            anchor,
        },
    };
    Scheme {
        points: rebuild(&s.points, |p| *p),
        pipes: rebuild(&s.pipes, |p| Pipe {
            start: map(&m.points, p.start),
            end: map(&m.points, p.end),
            style: p.style,
        }),
        joints: rebuild(&s.joints, |j| Joint {
            pipe_a: map(&m.pipes, j.pipe_a),
            pipe_b: map(&m.pipes, j.pipe_b),
            kind: j.kind,
        }),
        offsets: rebuild(&s.offsets, |o| Offset {
            kind: match &o.kind {
                OffsetKind::General { .. } => o.kind.clone(),
                OffsetKind::Local { displaced_points } => OffsetKind::Local {
                    displaced_points: displaced_points
                        .iter()
                        .map(|p| map(&m.points, *p))
                        .collect(),
                },
            },
            ..o.clone()
        }),
        breaks: rebuild(&s.breaks, |b| BreakLine {
            pipe: map(&m.pipes, b.pipe),
            offset: map(&m.offsets, b.offset),
            ..b.clone()
        }),
        symbols: rebuild(&s.symbols, |d| d.clone()),
        blocks: rebuild(&s.blocks, |b| Block {
            symbol: map(&m.symbols, b.symbol),
            pipe: map(&m.pipes, b.pipe),
            pipe2: b.pipe2.map(|p| map(&m.pipes, p)),
            pipe3: b.pipe3.map(|p| map(&m.pipes, p)),
            ..b.clone()
        }),
        texts: rebuild(&s.texts, |t| Text {
            main_leader: match t.main_leader {
                LeaderRef::Pipe(l) => LeaderRef::Pipe(map(&m.pipe_leaders, l)),
                LeaderRef::Block(l) => LeaderRef::Block(map(&m.block_leaders, l)),
            },
            ..t.clone()
        }),
        pipe_leaders: rebuild(&s.pipe_leaders, |l| LeaderToPipe {
            text: map(&m.texts, l.text),
            pipe: map(&m.pipes, l.pipe),
            t: l.t,
        }),
        block_leaders: rebuild(&s.block_leaders, |l| LeaderToBlock {
            text: map(&m.texts, l.text),
            block: map(&m.blocks, l.block),
            anchor: l.anchor,
        }),
        marks: rebuild(&s.marks, |mk| PositionMark {
            target: target(&mk.target),
            props: mk.props.iter().map(|p| map(&m.spec_props, *p)).collect(),
            ..mk.clone()
        }),
        spec_props: rebuild(&s.spec_props, |p| p.clone()),
        dimensions: rebuild(&s.dimensions, |d| Dimension {
            points: d
                .points
                .iter()
                .map(|p| match *p {
                    DimPoint::Spatial(id) => DimPoint::Spatial(map(&m.points, id)),
                    DimPoint::BlockAnchor(id) => DimPoint::BlockAnchor(map(&m.blocks, id)),
                })
                .collect(),
            dim_dir: match d.dim_dir {
                DimDir::AlongPipe(p) => DimDir::AlongPipe(map(&m.pipes, p)),
                axis => axis,
            },
            ..d.clone()
        }),
        elevations: rebuild(&s.elevations, |e| ElevationMark {
            anchor: match e.anchor {
                ElevationAnchor::OnPipe { pipe, t } => ElevationAnchor::OnPipe {
                    pipe: map(&m.pipes, pipe),
                    t,
                },
                ElevationAnchor::Block(b) => ElevationAnchor::Block(map(&m.blocks, b)),
            },
            ..e.clone()
        }),
        slopes: rebuild(&s.slopes, |sl| SlopeMark {
            pipe: map(&m.pipes, sl.pipe),
            ..sl.clone()
        }),
        grid: s.grid.clone(),
        settings: s.settings.clone(),
    }
}
