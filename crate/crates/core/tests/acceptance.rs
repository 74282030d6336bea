//! Acceptance suite. Every test prints one `PASS`/`FAIL` line on stderr,
//! outside the test harness capture, so the run log lists all of them.

mod support;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write as _;
use std::time::{Duration, Instant};

use asts_core::constraints::{
    enumerate_block_orientations, frame_for, legal_dimension_orientations, BlockTemplate, DimLegality, Orientation,
    Rule,
};
use asts_core::edit::{self, MarkSpec, TextSpec};
use asts_core::geometry::{occlusion_gaps, projection_by_name, projection_catalog, slice_scheme, OffsetField, Selection};
use asts_core::layout::layout_scheme;
use asts_core::model::*;
use asts_core::persist::{load_binary, load_text, save_binary, save_text};
use asts_core::render_svg::{render, PageSetup};
use asts_core::specgen::{generate_spec, SpecMode};
use rand::seq::SliceRandom;
use rand::Rng;
use support::{grid, rng};

fn report(id: &str, name: &str, failures: &[String], detail: &str) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "{id} {name}: {verdict} ({detail})");
    let shown: Vec<&String> = failures.iter().take(5).collect();
    assert!(failures.is_empty(), "{} failures, first: {shown:#?}", failures.len());
}

// ---------------------------------------------------------------------------
// 1. Binary and text round trips

const AC1_SCHEMES: u64 = 10_000;
const AC1_BUDGET: Duration = Duration::from_secs(60);

#[test]
fn ac01_round_trip() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut objects = 0;
    for seed in 0..AC1_SCHEMES {
        let mut r = rng(seed);
        let s = support::random_scheme(&mut r, 1 + (seed % 20) as usize);
        objects += s.counts().total();
        let want = s.compacted();
        match save_binary(&s).map(|b| load_binary(&b)) {
            Ok(Ok(back)) if back == want => {}
            other => failures.push(format!("seed {seed}: binary {:?}", other.map(|r| r.map(|_| "differs"))))
        }
        let text = save_text(&s);
        match load_text(&text) {
            Ok(back) if back == want => {}
            Ok(_) => failures.push(format!("seed {seed}: text differs")),
            Err(e) => failures.push(format!("seed {seed}: text {e}")),
        }
    }
    let took = start.elapsed();
    if took > AC1_BUDGET {
        failures.push(format!("took {took:?}"));
    }
    report(
        "AC1",
        "round-trip",
        &failures,
        &format!("{AC1_SCHEMES} schemes, {objects} objects, {:.1} s", took.as_secs_f64()),
    );
}

// ---------------------------------------------------------------------------
// 2. Reference scheme size

const AC2_LIMIT: usize = 2500;
const AC2_REFERENCE_BYTES: usize = 1066;
const AC2_REFERENCE_OBJECTS: usize = 40;

#[test]
fn ac02_compactness() {
    let s = support::reference_scheme();
    let bytes = save_binary(&s).unwrap();
    let mut failures = Vec::new();
    if s.counts().total() != AC2_REFERENCE_OBJECTS {
        failures.push(format!("{} objects", s.counts().total()));
    }
    if bytes.len() > AC2_LIMIT {
        failures.push(format!("{} bytes over the limit", bytes.len()));
    }
    if bytes.len() != AC2_REFERENCE_BYTES {
        failures.push(format!("{} bytes, pinned {AC2_REFERENCE_BYTES}", bytes.len()));
    }
    report(
        "AC2",
        "compactness",
        &failures,
        &format!("{} objects, {} bytes, limit {AC2_LIMIT}", s.counts().total(), bytes.len()),
    );
}

// ---------------------------------------------------------------------------
// 3. Dimension legality against an integer oracle on a 5x5x5 lattice

const AC3_BUDGET: Duration = Duration::from_secs(120);
const AC3_STEP: f64 = 100.0;
const AC3_RANDOM_SETS: usize = 50_000;

type P3 = [i64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: P3, b: P3) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn is_zero(a: P3) -> bool {
    a == [0, 0, 0]
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Direction with coprime components and a positive first nonzero one.
fn primitive(v: P3) -> P3 {
    let g = gcd(gcd(v[0], v[1]), v[2]);
    let mut v = [v[0] / g, v[1] / g, v[2] / g];
    if v.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
        v = [-v[0], -v[1], -v[2]];
    }
    v
}

struct Lattice {
    s: Scheme,
    coords: Vec<P3>,
    ids: Vec<PointId>,
    /// Duplicate of lattice point (2,2,2) under another id.
    twin: PointId,
    pipes: Vec<(PipeId, P3, P3)>,
    /// For each offset in id order: its ort axis and which lattice points it moves.
    offsets: Vec<(usize, fn(P3) -> bool)>,
}

fn lattice() -> Lattice {
    let mut s = Scheme::new();
    let mut coords = Vec::new();
    let mut ids = Vec::new();
    for x in 0..5 {
        for y in 0..5 {
            for z in 0..5 {
                let p = [x, y, z];
                coords.push(p);
                ids.push(s.points.insert(Vec3::new(x as f64, y as f64, z as f64) * AC3_STEP));
            }
        }
    }
    let twin = s.points.insert(Vec3::new(2.0, 2.0, 2.0) * AC3_STEP);
    let idx = |p: P3| (p[0] * 25 + p[1] * 5 + p[2]) as usize;
    let mut pipes = Vec::new();
    for (a, b) in [
        ([0, 0, 0], [4, 4, 4]),
        ([0, 0, 1], [4, 2, 1]),
        ([0, 2, 0], [4, 2, 4]),
        ([0, 4, 0], [4, 0, 4]),
        ([1, 0, 0], [3, 4, 4]),
        ([0, 0, 0], [4, 0, 0]),
        ([0, 1, 3], [2, 1, 4]),
    ] {
        let id = s.pipes.insert(Pipe {
            start: ids[idx(a)],
            end: ids[idx(b)],
            style: LineStyle::default(),
        });
        pipes.push((id, a, b));
    }
    s.offsets.insert(Offset {
        letter: "А".into(),
        ort: Vec3::x(),
        magnitude: 300.0,
        kind: OffsetKind::General { axis: Axis::X, plane_coord: 2.5 * AC3_STEP },
    });
    s.offsets.insert(Offset {
        letter: "Б".into(),
        ort: -Vec3::z(),
        magnitude: -200.0,
        kind: OffsetKind::General { axis: Axis::Z, plane_coord: 1.5 * AC3_STEP },
    });
    let displaced = coords.iter().zip(&ids).filter(|(p, _)| p[1] >= 3).map(|(_, id)| *id).collect();
    s.offsets.insert(Offset {
        letter: "В".into(),
        ort: Vec3::y(),
        magnitude: 500.0,
        kind: OffsetKind::Local { displaced_points: displaced },
    });
    let offsets: Vec<(usize, fn(P3) -> bool)> = vec![(0, |p| p[0] >= 3), (2, |p| p[2] <= 1), (1, |p| p[1] >= 3)];
    Lattice {
        s,
        coords,
        ids,
        twin,
        pipes,
        offsets,
    }
}

fn others(a: usize) -> (usize, usize) {
    match a {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn ax(i: usize) -> Axis {
    Axis::ALL[i]
}

/// Orientation rules restated on integer coordinates.
fn dimension_oracle(lat: &Lattice, pts: &[P3]) -> Result<BTreeSet<Orientation>, Rule> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                return Err(Rule::DimCoincident);
            }
        }
    }
    let splitting: Vec<usize> = lat
        .offsets
        .iter()
        .filter(|(_, moves)| pts.iter().any(|p| moves(*p)) && pts.iter().any(|p| !moves(*p)))
        .map(|(axis, _)| *axis)
        .collect();
    let p0 = pts[0];
    let d = sub(pts[1], p0);
    let normal = pts
        .iter()
        .map(|p| cross(d, sub(*p, p0)))
        .find(|n| !is_zero(*n));
    let mut pairs = BTreeSet::new();
    if let Some(n) = normal {
        if pts.iter().any(|p| dot(sub(*p, p0), n) != 0) {
            return Err(Rule::DimNonCoplanar);
        }
        let nonzero: Vec<usize> = (0..3).filter(|i| n[*i] != 0).collect();
        let [axis] = nonzero[..] else { return Err(Rule::DimPlaneOblique) };
        if splitting.contains(&axis) {
            return Err(Rule::DimSplitByOffset);
        }
        let (p, q) = others(axis);
        pairs.insert((ax(p), DimDir::Axis(ax(q))));
        pairs.insert((ax(q), DimDir::Axis(ax(p))));
        return Ok(pairs);
    }
    // Collinear: an offset splitting the points must run along their line.
    let along: Vec<usize> = (0..3).filter(|i| d[*i] != 0).collect();
    if splitting.iter().any(|a| along != [*a]) {
        return Err(Rule::DimSplitByOffset);
    }
    let carriers: Vec<PipeId> = lat
        .pipes
        .iter()
        .filter(|(_, a, b)| {
            let e = sub(*b, *a);
            is_zero(cross(e, d)) && pts.iter().all(|p| is_zero(cross(sub(*p, *a), e)))
        })
        .map(|(id, _, _)| *id)
        .collect();
    let zero: Vec<usize> = (0..3).filter(|i| d[*i] == 0).collect();
    match zero[..] {
        [z1, z2] => {
            let a = along[0];
            pairs.insert((ax(z1), DimDir::Axis(ax(a))));
            pairs.insert((ax(z2), DimDir::Axis(ax(a))));
        }
        [z] => {
            let (p, q) = others(z);
            pairs.insert((ax(p), DimDir::Axis(ax(q))));
            pairs.insert((ax(q), DimDir::Axis(ax(p))));
            for c in &carriers {
                pairs.insert((ax(p), DimDir::AlongPipe(*c)));
                pairs.insert((ax(q), DimDir::AlongPipe(*c)));
            }
        }
        _ => {
            if carriers.is_empty() {
                return Err(Rule::DimNoPipeAxis);
            }
            for c in &carriers {
                for a in 0..3 {
                    pairs.insert((ax(a), DimDir::AlongPipe(*c)));
                }
            }
        }
    }
    Ok(pairs)
}

fn matches_oracle(got: &DimLegality, want: &Result<BTreeSet<Orientation>, Rule>) -> bool {
    match want {
        Ok(pairs) => got.pairs == *pairs && got.violations.is_empty(),
        Err(rule) => got.pairs.is_empty() && got.violations.first().map(|v| v.rule) == Some(*rule),
    }
}

/// Calls `f` with every `k`-subset of `items`.
fn subsets(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(items: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in from..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    go(items, k, 0, &mut Vec::with_capacity(k), f);
}

#[test]
fn ac03_dimension_legality() {
    let start = Instant::now();
    let lat = lattice();
    let n = lat.coords.len();
    let mut failures = Vec::new();
    let checked = std::cell::Cell::new(0usize);
    let mut legal = 0usize;
    let mut rules: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut check = |idx: &[usize], points: Vec<DimPoint>, failures: &mut Vec<String>| {
        let pts: Vec<P3> = idx.iter().map(|i| lat.coords[*i]).collect();
        let got = legal_dimension_orientations(&lat.s, &points).unwrap();
        let want = dimension_oracle(&lat, &pts);
        checked.set(checked.get() + 1);
        match &want {
            Ok(_) => legal += 1,
            Err(r) => *rules.entry(r.id()).or_default() += 1,
        }
        if !matches_oracle(&got, &want) && failures.len() < 20 {
            failures.push(format!("{pts:?}: got {:?} / {:?}, want {want:?}", got.pairs, got.violations));
        }
    };
    let dim = |idx: &[usize]| -> Vec<DimPoint> { idx.iter().map(|i| DimPoint::Spatial(lat.ids[*i])).collect() };

    // Each non-collinear coplanar set spans exactly one plane.
    let mut planes: HashSet<(P3, i64)> = HashSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (lat.coords[i], lat.coords[j], lat.coords[k]);
                let nrm = cross(sub(b, a), sub(c, a));
                if is_zero(nrm) {
                    continue;
                }
                let nrm = primitive(nrm);
                if !planes.insert((nrm, dot(nrm, a))) {
                    continue;
                }
                let on: Vec<usize> = (0..n).filter(|q| dot(nrm, sub(lat.coords[*q], a)) == 0).collect();
                for size in 3..=5 {
                    subsets(&on, size, &mut |idx| {
                        let p0 = lat.coords[idx[0]];
                        let flat = idx
                            .iter()
                            .any(|q| idx.iter().any(|r| !is_zero(cross(sub(lat.coords[*q], p0), sub(lat.coords[*r], p0)))));
                        if flat {
                            check(idx, dim(idx), &mut failures);
                        }
                    });
                }
            }
        }
    }
    // Collinear sets, one line at a time.
    let mut lines: HashSet<Vec<usize>> = HashSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = sub(lat.coords[j], lat.coords[i]);
            let on: Vec<usize> = (0..n).filter(|q| is_zero(cross(sub(lat.coords[*q], lat.coords[i]), d))).collect();
            if !lines.insert(on.clone()) {
                continue;
            }
            for size in 2..=on.len().min(5) {
                subsets(&on, size, &mut |idx| check(idx, dim(idx), &mut failures));
            }
        }
    }
    let exhaustive = checked.get();
    // Arbitrary sets, mostly neither planar nor collinear, in shuffled order.
    let mut r = rng(3);
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..AC3_RANDOM_SETS {
        let size = r.gen_range(2..=5);
        let idx: Vec<usize> = all.choose_multiple(&mut r, size).copied().collect();
        check(&idx, dim(&idx), &mut failures);
    }
    // Coincident points, by id and by position.
    let center = 2 * 25 + 2 * 5 + 2;
    for i in 0..n {
        let got = legal_dimension_orientations(&lat.s, &[DimPoint::Spatial(lat.ids[i]), DimPoint::Spatial(lat.ids[(i + 7) % n]), DimPoint::Spatial(lat.ids[i])]).unwrap();
        if !matches_oracle(&got, &Err(Rule::DimCoincident)) {
            failures.push(format!("repeated point {i}: {got:?}"));
        }
    }
    let got = legal_dimension_orientations(&lat.s, &[DimPoint::Spatial(lat.ids[0]), DimPoint::Spatial(lat.twin), DimPoint::Spatial(lat.ids[center])]).unwrap();
    if !matches_oracle(&got, &Err(Rule::DimCoincident)) {
        failures.push(format!("twin point: {got:?}"));
    }
    let took = start.elapsed();
    if took > AC3_BUDGET {
        failures.push(format!("took {took:?}"));
    }
    report(
        "AC3",
        "dimension legality",
        &failures,
        &format!(
            "{exhaustive} planar and collinear sets, {} random, {legal} legal, rejections {rules:?}, {:.1} s",
            checked.get() - exhaustive,
            took.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. Delete cascade closure

const AC4_SEQUENCES: u64 = 1000;

/// Ids present in every list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Ids {
    points: BTreeSet<PointId>,
    pipes: BTreeSet<PipeId>,
    joints: BTreeSet<JointId>,
    offsets: BTreeSet<OffsetId>,
    breaks: BTreeSet<BreakId>,
    symbols: BTreeSet<SymbolId>,
    blocks: BTreeSet<BlockId>,
    texts: BTreeSet<TextId>,
    pipe_leaders: BTreeSet<PipeLeaderId>,
    block_leaders: BTreeSet<BlockLeaderId>,
    marks: BTreeSet<MarkId>,
    spec_props: BTreeSet<SpecPropsId>,
    dimensions: BTreeSet<DimensionId>,
    elevations: BTreeSet<ElevationId>,
    slopes: BTreeSet<SlopeId>,
    grid: bool,
}

fn ids_of(s: &Scheme) -> Ids {
    Ids {
        points: s.points.ids().collect(),
        pipes: s.pipes.ids().collect(),
        joints: s.joints.ids().collect(),
        offsets: s.offsets.ids().collect(),
        breaks: s.breaks.ids().collect(),
        symbols: s.symbols.ids().collect(),
        blocks: s.blocks.ids().collect(),
        texts: s.texts.ids().collect(),
        pipe_leaders: s.pipe_leaders.ids().collect(),
        block_leaders: s.block_leaders.ids().collect(),
        marks: s.marks.ids().collect(),
        spec_props: s.spec_props.ids().collect(),
        dimensions: s.dimensions.ids().collect(),
        elevations: s.elevations.ids().collect(),
        slopes: s.slopes.ids().collect(),
        grid: s.grid.is_some(),
    }
}

/// What must be left after deleting `p`, derived from the dependency graph
/// of the scheme before the deletion.
fn survivors_after_delete(s: &Scheme, p: PointId) -> Ids {
    let all = ids_of(s);
    let points: BTreeSet<PointId> = all.points.iter().copied().filter(|q| *q != p).collect();
    let pipes: BTreeSet<PipeId> = s.pipes.iter().filter(|(_, x)| x.start != p && x.end != p).map(|(id, _)| id).collect();
    let blocks: BTreeSet<BlockId> = s
        .blocks
        .iter()
        .filter(|(_, b)| [Some(b.pipe), b.pipe2, b.pipe3].into_iter().flatten().all(|q| pipes.contains(&q)))
        .map(|(id, _)| id)
        .collect();
    let joints = s
        .joints
        .iter()
        .filter(|(_, j)| pipes.contains(&j.pipe_a) && pipes.contains(&j.pipe_b))
        .map(|(id, _)| id)
        .collect();
    let breaks: BTreeSet<BreakId> = s.breaks.iter().filter(|(_, b)| pipes.contains(&b.pipe)).map(|(id, _)| id).collect();
    let offsets = s
        .offsets
        .iter()
        .filter(|(id, o)| {
            matches!(o.kind, OffsetKind::General { .. })
                || breaks.iter().any(|b| s.breaks.get(*b).unwrap().offset == *id)
        })
        .map(|(id, _)| id)
        .collect();
    let pipe_leaders: BTreeSet<PipeLeaderId> =
        s.pipe_leaders.iter().filter(|(_, l)| pipes.contains(&l.pipe)).map(|(id, _)| id).collect();
    let block_leaders: BTreeSet<BlockLeaderId> =
        s.block_leaders.iter().filter(|(_, l)| blocks.contains(&l.block)).map(|(id, _)| id).collect();
    let texts = s
        .texts
        .ids()
        .filter(|t| {
            pipe_leaders.iter().any(|l| s.pipe_leaders.get(*l).unwrap().text == *t)
                || block_leaders.iter().any(|l| s.block_leaders.get(*l).unwrap().text == *t)
        })
        .collect();
    let target_alive = |t: &MarkTarget| match *t {
        MarkTarget::Pipe { pipe, .. } => pipes.contains(&pipe),
        MarkTarget::Block { block, .. } => blocks.contains(&block),
    };
    let marks: BTreeSet<MarkId> = s.marks.iter().filter(|(_, m)| target_alive(&m.target)).map(|(id, _)| id).collect();
    let spec_props = s
        .spec_props
        .ids()
        .filter(|props| {
            let users: Vec<MarkId> = s.marks.iter().filter(|(_, m)| m.props.contains(props)).map(|(id, _)| id).collect();
            users.is_empty() || users.iter().any(|m| marks.contains(m))
        })
        .collect();
    let dimensions = s
        .dimensions
        .iter()
        .filter(|(_, d)| {
            let left = d
                .points
                .iter()
                .filter(|q| match **q {
                    DimPoint::Spatial(x) => x != p,
                    DimPoint::BlockAnchor(b) => blocks.contains(&b),
                })
                .count();
            let dir_ok = match d.dim_dir {
                DimDir::AlongPipe(q) => pipes.contains(&q),
                DimDir::Axis(_) => true,
            };
            left >= 2 && dir_ok
        })
        .map(|(id, _)| id)
        .collect();
    let elevations = s
        .elevations
        .iter()
        .filter(|(_, e)| match e.anchor {
            ElevationAnchor::OnPipe { pipe, .. } => pipes.contains(&pipe),
            ElevationAnchor::Block(b) => blocks.contains(&b),
        })
        .map(|(id, _)| id)
        .collect();
    let slopes = s.slopes.iter().filter(|(_, m)| pipes.contains(&m.pipe)).map(|(id, _)| id).collect();
    Ids {
        points,
        pipes,
        joints,
        offsets,
        breaks,
        symbols: all.symbols,
        blocks,
        texts,
        pipe_leaders,
        block_leaders,
        marks,
        spec_props,
        dimensions,
        elevations,
        slopes,
        grid: all.grid,
    }
}

/// Every reference in the scheme, checked against the lists it points into.
fn dangling(s: &Scheme) -> Vec<String> {
    let mut out = Vec::new();
    let mut need = |ok: bool, what: String| {
        if !ok {
            out.push(what);
        }
    };
    for (id, p) in s.pipes.iter() {
        need(s.points.contains(p.start) && s.points.contains(p.end), format!("{id:?} endpoints"));
    }
    for (id, j) in s.joints.iter() {
        need(s.pipes.contains(j.pipe_a) && s.pipes.contains(j.pipe_b), format!("{id:?} pipes"));
    }
    for (id, o) in s.offsets.iter() {
        if let OffsetKind::Local { displaced_points } = &o.kind {
            need(displaced_points.iter().all(|p| s.points.contains(*p)), format!("{id:?} displaced points"));
        }
    }
    for (id, b) in s.breaks.iter() {
        need(s.pipes.contains(b.pipe) && s.offsets.contains(b.offset), format!("{id:?} refs"));
    }
    for (id, b) in s.blocks.iter() {
        need(s.symbols.contains(b.symbol), format!("{id:?} symbol"));
        need(
            [Some(b.pipe), b.pipe2, b.pipe3].into_iter().flatten().all(|p| s.pipes.contains(p)),
            format!("{id:?} pipes"),
        );
    }
    for (id, l) in s.pipe_leaders.iter() {
        need(s.texts.contains(l.text) && s.pipes.contains(l.pipe), format!("{id:?} refs"));
    }
    for (id, l) in s.block_leaders.iter() {
        need(s.texts.contains(l.text) && s.blocks.contains(l.block), format!("{id:?} refs"));
    }
    for (id, t) in s.texts.iter() {
        let main_ok = match t.main_leader {
            LeaderRef::Pipe(l) => s.pipe_leaders.get(l).is_some_and(|l| l.text == id),
            LeaderRef::Block(l) => s.block_leaders.get(l).is_some_and(|l| l.text == id),
        };
        need(main_ok, format!("{id:?} main leader"));
    }
    let target_ok = |t: &MarkTarget| match *t {
        MarkTarget::Pipe { pipe, .. } => s.pipes.contains(pipe),
        MarkTarget::Block { block, .. } => s.blocks.contains(block),
    };
    for (id, m) in s.marks.iter() {
        need(target_ok(&m.target), format!("{id:?} target"));
        need(!m.props.is_empty() && m.props.iter().all(|p| s.spec_props.contains(*p)), format!("{id:?} props"));
    }
    for (id, d) in s.dimensions.iter() {
        need(
            d.points.iter().all(|p| match *p {
                DimPoint::Spatial(q) => s.points.contains(q),
                DimPoint::BlockAnchor(b) => s.blocks.contains(b),
            }),
            format!("{id:?} points"),
        );
        if let DimDir::AlongPipe(p) = d.dim_dir {
            need(s.pipes.contains(p), format!("{id:?} direction"));
        }
    }
    for (id, e) in s.elevations.iter() {
        let ok = match e.anchor {
            ElevationAnchor::OnPipe { pipe, .. } => s.pipes.contains(pipe),
            ElevationAnchor::Block(b) => s.blocks.contains(b),
        };
        need(ok, format!("{id:?} anchor"));
    }
    for (id, m) in s.slopes.iter() {
        need(s.pipes.contains(m.pipe), format!("{id:?} pipe"));
    }
    out
}

fn pick<I: EntityId, T, R: Rng>(r: &mut R, store: &Store<I, T>) -> Option<I> {
    let ids: Vec<I> = store.ids().collect();
    ids.choose(r).copied()
}

/// One random edit; failures of the edit itself are fine.
fn random_edit<R: Rng>(r: &mut R, s: &mut Scheme) {
    match r.gen_range(0..11) {
        0 => {
            if let Some(p) = pick(r, &s.points) {
                let old = *s.points.get(p).unwrap();
                let axis = r.gen_range(0..3);
                let mut to = old;
                to[axis] += grid(r, -10, 10, 100.0);
                let _ = edit::move_point(s, p, to);
            }
        }
        1 => {
            if let Some(p) = pick(r, &s.pipes) {
                edit::delete_pipe(s, p).unwrap();
            }
        }
        2 => {
            if let Some(b) = pick(r, &s.blocks) {
                edit::delete_block(s, b).unwrap();
            }
        }
        3 => {
            if let Some(m) = pick(r, &s.marks) {
                edit::delete_mark(s, m).unwrap();
            }
        }
        4 => {
            support::add_random_mark(r, s);
        }
        5 => {
            if let Some(sym) = pick(r, &s.symbols) {
                support::random_block_placement(r, s, sym);
            }
        }
        6 => {
            if let Some(o) = pick(r, &s.offsets) {
                edit::delete_offset(s, o).unwrap();
            }
        }
        7 => {
            if let Some(p) = pick(r, &s.points) {
                let from = *s.points.get(p).unwrap();
                let mut to = from;
                to[r.gen_range(0..3)] += grid(r, 1, 10, 100.0);
                let _ = edit::add_pipe_between(s, from, to, None);
            }
        }
        8 => {
            let leaders: Vec<LeaderRef> = s
                .pipe_leaders
                .ids()
                .map(LeaderRef::Pipe)
                .chain(s.block_leaders.ids().map(LeaderRef::Block))
                .collect();
            if let Some(l) = leaders.choose(r) {
                let _ = edit::delete_leader(s, *l);
            }
        }
        9 => {
            if let Some(p) = pick(r, &s.points) {
                edit::delete_point(s, p).unwrap();
            }
        }
        _ => {
            if let (Some(text), Some(target)) = (pick(r, &s.texts), support::random_target(r, s)) {
                let _ = edit::add_leader(s, text, target);
            }
        }
    }
}

fn positions(s: &Scheme) -> BTreeMap<SpecPropsId, u32> {
    s.spec_props.iter().map(|(id, p)| (id, p.position)).collect()
}

/// Positions are exactly `1..=K` and keep the relative order of `before`.
fn positions_dense_and_ordered(before: &BTreeMap<SpecPropsId, u32>, after: &BTreeMap<SpecPropsId, u32>) -> Result<(), String> {
    let used: BTreeSet<u32> = after.values().copied().collect();
    let want: BTreeSet<u32> = (1..=used.len() as u32).collect();
    if used != want {
        return Err(format!("positions {used:?}"));
    }
    for (a, pa) in after {
        for (b, pb) in after {
            if let (Some(qa), Some(qb)) = (before.get(a), before.get(b)) {
                if qa.cmp(qb) != pa.cmp(pb) {
                    return Err(format!("{a:?}/{b:?} were {qa}/{qb}, now {pa}/{pb}"));
                }
            }
        }
    }
    Ok(())
}

#[test]
fn ac04_cascade_closure() {
    let mut failures = Vec::new();
    let mut removed = 0;
    let mut edits = 0;
    for seed in 0..AC4_SEQUENCES {
        let mut r = rng(40_000 + seed);
        let mut s = support::random_scheme(&mut r, 4 + (seed % 14) as usize);
        for _ in 0..r.gen_range(0..12) {
            random_edit(&mut r, &mut s);
            edits += 1;
        }
        let Some(p) = pick(&mut r, &s.points) else { continue };
        // Prefer a point with pipes on it.
        let p = s.pipes.values().map(|x| x.start).find(|_| r.gen_bool(0.8)).unwrap_or(p);
        let want = survivors_after_delete(&s, p);
        let before = positions(&s);
        let total = s.counts().total();
        if let Err(e) = edit::delete_point(&mut s, p) {
            failures.push(format!("seed {seed}: {e}"));
            continue;
        }
        removed += total - s.counts().total();
        let got = ids_of(&s);
        if got != want {
            failures.push(format!("seed {seed}: survivors differ: got {got:?}, want {want:?}"));
        }
        let issues = integrity_check(&s);
        if !issues.is_empty() {
            failures.push(format!("seed {seed}: {issues:?}"));
        }
        let d = dangling(&s);
        if !d.is_empty() {
            failures.push(format!("seed {seed}: dangling {d:?}"));
        }
        if s.settings.mode.autonumber {
            if let Err(e) = positions_dense_and_ordered(&before, &positions(&s)) {
                failures.push(format!("seed {seed}: {e}"));
            }
        }
    }
    report(
        "AC4",
        "cascade closure",
        &failures,
        &format!("{AC4_SEQUENCES} sequences, {edits} prior edits, {removed} objects removed by the final delete"),
    );
}

// ---------------------------------------------------------------------------
// 5. Block orientations and frames

const AC5_CONFIGS: u64 = 10_000;
const AC5_MAX_ORIENTATIONS: usize = 16;
const AC5_TOL: f64 = 1e-9;

fn random_dir<R: Rng>(r: &mut R) -> Vec3 {
    match r.gen_range(0..3) {
        0 => {
            let mut v = Vec3::zeros();
            v[r.gen_range(0..3)] = if r.gen() { 1.0 } else { -1.0 };
            v
        }
        1 => loop {
            let v = Vec3::new(r.gen_range(-2..=2) as f64, r.gen_range(-2..=2) as f64, r.gen_range(-2..=2) as f64);
            if v != Vec3::zeros() {
                break v.normalize();
            }
        },
        _ => loop {
            let v = Vec3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            if v.norm() > 0.1 {
                break v.normalize();
            }
        },
    }
}

#[test]
fn ac05_orientation_bound() {
    let mut failures = Vec::new();
    let mut frames = 0;
    let mut most = 0;
    for seed in 0..AC5_CONFIGS {
        let mut r = rng(50_000 + seed);
        let mut s = Scheme::new();
        let origin = Vec3::new(grid(&mut r, -5, 5, 100.0), grid(&mut r, -5, 5, 100.0), grid(&mut r, -5, 5, 100.0));
        let dir = random_dir(&mut r);
        let len = r.gen_range(200.0..3000.0);
        let host = edit::add_pipe_between(&mut s, origin, origin + dir * len, None).unwrap();
        let attach = *[Attach::Axial, Attach::Angular, Attach::Tee].choose(&mut r).unwrap();
        let mut legs = Vec::new();
        for _ in 1..attach.legs() {
            let d = random_dir(&mut r);
            if let Ok(p) = edit::add_pipe_between(&mut s, origin, origin + d * r.gen_range(200.0..3000.0), None) {
                legs.push(p);
            }
        }
        if legs.len() + 1 < attach.legs() {
            continue;
        }
        let symbol = s.symbols.insert(support::random_symbol(&mut r, attach));
        let t = BlockTemplate {
            symbol,
            pipe: host,
            pipe2: legs.first().copied(),
            pipe3: legs.get(1).copied(),
            dist_from_start: if attach == Attach::Axial { r.gen_range(0.0..len) } else { 0.0 },
        };
        let list = match enumerate_block_orientations(&s, &t) {
            Ok(l) => l,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        most = most.max(list.len());
        if list.len() > AC5_MAX_ORIENTATIONS {
            failures.push(format!("seed {seed}: {} orientations", list.len()));
        }
        for (flip, updir) in list {
            let f = match frame_for(&s, &t, flip, updir) {
                Ok(f) => f,
                Err(e) => {
                    failures.push(format!("seed {seed}: {updir:?}: {e}"));
                    continue;
                }
            };
            frames += 1;
            let m = nalgebra::Matrix3::from_columns(&[f.ex, f.ey, f.ez]);
            let gram = m.transpose() * m;
            let orthonormal = (gram - nalgebra::Matrix3::identity()).abs().max() <= AC5_TOL;
            let right = (m.determinant() - 1.0).abs() <= AC5_TOL;
            let acute = f.ey.dot(&f.target) > 0.0;
            let along = (f.ex - if flip { -dir } else { dir }).norm() <= AC5_TOL;
            if !(orthonormal && right && acute && along) {
                failures.push(format!(
                    "seed {seed}: {flip} {updir:?}: orthonormal {orthonormal} right {right} acute {acute} along {along}"
                ));
            }
        }
    }
    report(
        "AC5",
        "orientation bound",
        &failures,
        &format!("{AC5_CONFIGS} configurations, {frames} frames, at most {most} orientations, tol {AC5_TOL:e}"),
    );
}

// ---------------------------------------------------------------------------
// 6. Projection geometry

const AC6_TOL: f64 = 1e-9;
const AC6_SAMPLES: usize = 2000;

#[test]
fn ac06_projection_geometry() {
    let mut failures = Vec::new();
    let iso = projection_by_name("isometric", None).unwrap();
    let axes = [iso.ex, iso.ey, iso.ez];
    let mut worst_angle: f64 = 0.0;
    for i in 0..3 {
        let (a, b) = (axes[i], axes[(i + 1) % 3]);
        let angle = a.perp(&b).abs().atan2(a.dot(&b)).to_degrees();
        worst_angle = worst_angle.max((angle - 120.0).abs());
        if (angle - 120.0).abs() > AC6_TOL {
            failures.push(format!("axes {i}/{}: {angle} degrees", (i + 1) % 3));
        }
        if (a.norm() - b.norm()).abs() > AC6_TOL {
            failures.push(format!("axes {i}/{}: norms {} {}", (i + 1) % 3, a.norm(), b.norm()));
        }
    }
    let mut r = rng(6);
    let mut projections = projection_catalog();
    for _ in 0..20 {
        projections.push(projection_by_name("custom", Some(random_dir(&mut r))).unwrap());
    }
    let mut worst: f64 = 0.0;
    let v = |r: &mut support::Rng8| Vec3::new(r.gen_range(-1e3..1e3), r.gen_range(-1e3..1e3), r.gen_range(-1e3..1e3));
    for p in &projections {
        for _ in 0..AC6_SAMPLES {
            let (a, b) = (v(&mut r), v(&mut r));
            let (x, y) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let err = (p.project(&(a * x + b * y)) - (p.project(&a) * x + p.project(&b) * y)).norm();
            worst = worst.max(err);
            if err > AC6_TOL {
                failures.push(format!("{}: linearity error {err:e}", p.name));
                break;
            }
        }
        if p.project(&Vec3::zeros()) != Vec2::zeros() {
            failures.push(format!("{}: origin moves", p.name));
        }
    }
    report(
        "AC6",
        "projection geometry",
        &failures,
        &format!(
            "isometric angle error {worst_angle:.1e} deg, {} projections, linearity error {worst:.1e}, tol {AC6_TOL:e}",
            projections.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. Slicing

const AC7_SCHEMES: u64 = 1000;

fn on_pipe(s: &Scheme, pipe: PipeId, t: f64) -> Option<Vec3> {
    let p = s.pipes.get(pipe)?;
    let (a, b) = (*s.points.get(p.start)?, *s.points.get(p.end)?);
    let len = (b - a).norm();
    Some(if len == 0.0 { a } else { a + (b - a) * (t / len) })
}

/// Membership rules restated from the raw lists.
fn slice_oracle(s: &Scheme, slab: Option<(f64, f64)>) -> Selection {
    let inside = |z: f64| match slab {
        None => true,
        Some((lo, hi)) => lo <= z && z <= hi,
    };
    let mut sel = Selection::default();
    for (id, p) in s.pipes.iter() {
        let (za, zb) = (s.points.get(p.start).unwrap().z, s.points.get(p.end).unwrap().z);
        let hit = match slab {
            None => true,
            // Segment against slab: no endpoint above and the other below
            // both bounds at once.
            Some((lo, hi)) => !(za > hi && zb > hi) && !(za < lo && zb < lo),
        };
        if hit {
            sel.pipes.insert(id);
        }
    }
    for (id, j) in s.joints.iter() {
        if sel.pipes.contains(&j.pipe_a) && sel.pipes.contains(&j.pipe_b) {
            sel.joints.insert(id);
        }
    }
    for (id, b) in s.breaks.iter() {
        if sel.pipes.contains(&b.pipe) {
            sel.breaks.insert(id);
        }
    }
    for (id, b) in s.blocks.iter() {
        if on_pipe(s, b.pipe, b.dist_from_start).is_some_and(|p| inside(p.z)) {
            sel.blocks.insert(id);
        }
    }
    for (id, l) in s.pipe_leaders.iter() {
        if sel.pipes.contains(&l.pipe) {
            sel.pipe_leaders.insert(id);
        }
    }
    for (id, l) in s.block_leaders.iter() {
        if sel.blocks.contains(&l.block) {
            sel.block_leaders.insert(id);
        }
    }
    for id in s.texts.ids() {
        let hit = s.pipe_leaders.iter().any(|(l, x)| x.text == id && sel.pipe_leaders.contains(&l))
            || s.block_leaders.iter().any(|(l, x)| x.text == id && sel.block_leaders.contains(&l));
        if hit {
            sel.texts.insert(id);
        }
    }
    for (id, m) in s.marks.iter() {
        let hit = match m.target {
            MarkTarget::Pipe { pipe, .. } => sel.pipes.contains(&pipe),
            MarkTarget::Block { block, .. } => sel.blocks.contains(&block),
        };
        if hit {
            sel.marks.insert(id);
        }
    }
    let block_z = |b: BlockId| {
        let b = s.blocks.get(b).unwrap();
        on_pipe(s, b.pipe, b.dist_from_start).unwrap().z
    };
    for (id, d) in s.dimensions.iter() {
        let hit = d.points.iter().any(|p| match *p {
            DimPoint::Spatial(q) => inside(s.points.get(q).unwrap().z),
            DimPoint::BlockAnchor(b) => inside(block_z(b)),
        });
        if hit {
            sel.dimensions.insert(id);
        }
    }
    for (id, e) in s.elevations.iter() {
        let z = match e.anchor {
            ElevationAnchor::OnPipe { pipe, t } => on_pipe(s, pipe, t).unwrap().z,
            ElevationAnchor::Block(b) => block_z(b),
        };
        if inside(z) {
            sel.elevations.insert(id);
        }
    }
    for (id, m) in s.slopes.iter() {
        if sel.pipes.contains(&m.pipe) {
            sel.slopes.insert(id);
        }
    }
    sel.grid = s.grid.is_some() && inside(s.settings.objects.grid.plane_z);
    sel
}

#[test]
fn ac07_slicing() {
    let mut failures = Vec::new();
    let mut selected = 0;
    let mut total = 0;
    for seed in 0..AC7_SCHEMES {
        let mut r = rng(70_000 + seed);
        let mut s = support::random_scheme(&mut r, 4 + (seed % 20) as usize);
        if r.gen_bool(0.3) {
            s.settings.objects.grid.plane_z = grid(&mut r, -10, 10, 100.0);
        }
        for _ in 0..4 {
            let slab = r.gen_bool(0.9).then(|| {
                let lo = grid(&mut r, -20, 20, 50.0);
                (lo, lo + grid(&mut r, 0, 30, 50.0))
            });
            let got = slice_scheme(&s, slab);
            let want = slice_oracle(&s, slab);
            selected += got.pipes.len();
            total += s.pipes.len();
            if got != want {
                failures.push(format!("seed {seed} slab {slab:?}: got {got:?}, want {want:?}"));
            }
        }
    }
    report(
        "AC7",
        "slicing",
        &failures,
        &format!("{AC7_SCHEMES} schemes, 4 slabs each, {selected} of {total} pipe visits selected"),
    );
}

// ---------------------------------------------------------------------------
// 8. Slope texts follow point moves

const AC8_SEQUENCES: u64 = 300;
const AC8_MOVES: usize = 30;

/// Slope value in the stored form, restated from the format definitions.
fn slope_oracle(a: Vec3, b: Vec3, f: SlopeFormat) -> Option<String> {
    let dz = (b.z - a.z).abs();
    let h = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let p = f.precision as usize;
    if dz == 0.0 {
        return Some(
            match f.kind {
                SlopeKind::Percent => "0%",
                SlopeKind::Ratio => "0",
                SlopeKind::Angle => "0{DEGREE}",
            }
            .to_string(),
        );
    }
    match f.kind {
        SlopeKind::Percent => (h > 0.0).then(|| format!("{:.p$}%", dz / h * 100.0)),
        SlopeKind::Ratio => (h > 0.0).then(|| format!("1:{:.p$}", h / dz)),
        SlopeKind::Angle => Some(format!("{:.p$}{{DEGREE}}", (dz / h).atan().to_degrees())),
    }
}

struct SlopeLine {
    text: TextId,
    pipe: PipeId,
    head: String,
    tail: String,
    format: SlopeFormat,
}

#[test]
fn ac08_slope_sync() {
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut vertical = 0;
    let mut moves = 0;
    for seed in 0..AC8_SEQUENCES {
        let mut r = rng(80_000 + seed);
        let mut s = Scheme::new();
        support::random_network(&mut r, &mut s, 6);
        let mut lines = Vec::new();
        let pipes: Vec<PipeId> = s.pipes.ids().collect();
        for pipe in pipes {
            let len = s.pipe_length(pipe).unwrap();
            let kind = *[SlopeKind::Percent, SlopeKind::Ratio, SlopeKind::Angle].choose(&mut r).unwrap();
            let format = SlopeFormat::new(kind, r.gen_range(0..4));
            let head = format!("{}{}", ["", "i ", "уклон "].choose(&mut r).unwrap(), ["{SLOPE_LEFT}", "{SLOPE_RIGHT}"].choose(&mut r).unwrap());
            let tail = ["", " к стояку", "; Т1"].choose(&mut r).unwrap().to_string();
            let text = edit::add_text(
                &mut s,
                TextSpec {
                    lines: vec!["Т1".into(), format!("{head} 0{tail}")],
                    leaders: vec![MarkTarget::Pipe { pipe, t: len / 2.0 }],
                    offset_vec: Vec2::new(5.0, 5.0),
                    slope_format: Some(format),
                    ..TextSpec::default()
                },
            )
            .unwrap();
            lines.push(SlopeLine {
                text,
                pipe,
                head,
                tail,
                format,
            });
        }
        let mut expected: BTreeMap<TextId, String> = lines.iter().map(|l| (l.text, format!("{} 0{}", l.head, l.tail))).collect();
        edit::sync_all_slope_texts(&mut s);
        for step in 0..=AC8_MOVES {
            if step > 0 {
                let p = pick(&mut r, &s.points).unwrap();
                let old = *s.points.get(p).unwrap();
                let mut to = old;
                if r.gen() {
                    to[r.gen_range(0..3)] += grid(&mut r, -20, 20, 50.0);
                } else {
                    to += Vec3::new(grid(&mut r, -10, 10, 50.0), grid(&mut r, -10, 10, 50.0), grid(&mut r, -4, 4, 5.0));
                }
                if edit::move_point(&mut s, p, to).is_err() {
                    continue;
                }
                moves += 1;
            }
            for l in &lines {
                let pipe = s.pipes.get(l.pipe).unwrap();
                let (a, b) = (*s.points.get(pipe.start).unwrap(), *s.points.get(pipe.end).unwrap());
                match slope_oracle(a, b, l.format) {
                    Some(v) => {
                        expected.insert(l.text, format!("{} {v}{}", l.head, l.tail));
                    }
                    None => vertical += 1,
                }
                let got = &s.texts.get(l.text).unwrap().lines;
                checks += 1;
                if got[1] != expected[&l.text] || got[0] != "Т1" {
                    failures.push(format!("seed {seed} step {step}: {:?} vs {:?}", got, expected[&l.text]));
                }
            }
        }
    }
    report(
        "AC8",
        "slope sync",
        &failures,
        &format!("{AC8_SEQUENCES} sequences, {moves} moves, {checks} text checks, {vertical} left unchanged on vertical pipes"),
    );
}

// ---------------------------------------------------------------------------
// 9. Dense positions under autonumbering

const AC9_SEQUENCES: u64 = 200;
const AC9_STEPS: usize = 60;

#[test]
fn ac09_renumbering() {
    let mut failures = Vec::new();
    let mut steps = 0;
    let mut largest = 0;
    for seed in 0..AC9_SEQUENCES {
        let mut r = rng(90_000 + seed);
        let mut s = Scheme::new();
        s.settings.mode.autonumber = true;
        s.settings.mode.spec_extended = r.gen();
        support::random_network(&mut r, &mut s, 10);
        for step in 0..AC9_STEPS {
            let before = positions(&s);
            match r.gen_range(0..6) {
                0 | 1 => {
                    support::add_random_mark(&mut r, &mut s);
                }
                2 => {
                    if let Some(m) = pick(&mut r, &s.marks) {
                        edit::delete_mark(&mut s, m).unwrap();
                    }
                }
                3 => {
                    if let Some(p) = pick(&mut r, &s.spec_props) {
                        edit::delete_spec_props(&mut s, p).unwrap();
                    }
                }
                4 => {
                    if let Some(p) = pick(&mut r, &s.pipes) {
                        if r.gen_bool(0.3) {
                            edit::delete_pipe(&mut s, p).unwrap();
                        }
                    }
                }
                _ => {
                    let n = s.pipes.len() + 1;
                    support::random_network(&mut r, &mut s, n);
                }
            }
            steps += 1;
            let after = positions(&s);
            largest = largest.max(after.len());
            if let Err(e) = positions_dense_and_ordered(&before, &after) {
                failures.push(format!("seed {seed} step {step}: {e}"));
            }
            // New records go after every existing one.
            let top_old = after.iter().filter(|(id, _)| before.contains_key(id)).map(|(_, p)| *p).max().unwrap_or(0);
            for (id, p) in &after {
                if !before.contains_key(id) && *p <= top_old {
                    failures.push(format!("seed {seed} step {step}: new {id:?} at {p}"));
                }
            }
        }
    }
    report(
        "AC9",
        "renumbering",
        &failures,
        &format!("{AC9_SEQUENCES} sequences, {steps} steps, up to {largest} positions"),
    );
}

// ---------------------------------------------------------------------------
// 10. Occlusion gaps in isometric

const AC10_SCHEMES: u64 = 500;
const AC10_TOL: f64 = 1e-7;

struct Expected {
    pipe: PipeId,
    over: PipeId,
    at: Vec2,
    lo: f64,
    hi: f64,
}

/// All pairwise crossings, solved on the isometric picture.
fn occlusion_oracle(s: &Scheme, pipes: &[PipeId], gap: f64) -> Option<Vec<Expected>> {
    let k = s.settings.mode.scale;
    let c = 3f64.sqrt() / 2.0;
    let sheet = |p: Vec3| Vec2::new((p.y - p.x) * c, p.z - (p.x + p.y) / 2.0) * k;
    let depth = |p: Vec3| (p.x + p.y + p.z) / 3f64.sqrt();
    let ends = |id: PipeId| {
        let p = s.pipes.get(id).unwrap();
        (*s.points.get(p.start).unwrap(), *s.points.get(p.end).unwrap())
    };
    let mut out = Vec::new();
    for (i, &a) in pipes.iter().enumerate() {
        for &b in &pipes[i + 1..] {
            let (a0, a1) = ends(a);
            let (b0, b1) = ends(b);
            let (p, q) = (sheet(a0), sheet(a1));
            let (u, v) = (sheet(b0), sheet(b1));
            // p + t (q - p) = u + w (v - u), by Cramer's rule.
            let (m11, m12, m21, m22) = (q.x - p.x, u.x - v.x, q.y - p.y, u.y - v.y);
            let det = m11 * m22 - m12 * m21;
            let (rx, ry) = (u.x - p.x, u.y - p.y);
            if det.abs() < 1e-12 {
                continue;
            }
            let t = (rx * m22 - m12 * ry) / det;
            let w = (m11 * ry - rx * m21) / det;
            let near_edge = |x: f64| x.abs() < 1e-6 || (x - 1.0).abs() < 1e-6;
            if near_edge(t) || near_edge(w) {
                return None;
            }
            if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&w) {
                continue;
            }
            let da = depth(a0 + (a1 - a0) * t);
            let db = depth(b0 + (b1 - b0) * w);
            let (pipe, over, f, s0, s1) = if da < db { (a, b, t, p, q) } else { (b, a, w, u, v) };
            let len = (s1 - s0).norm();
            out.push(Expected {
                pipe,
                over,
                at: s0 + (s1 - s0) * f,
                lo: (f * len - gap / 2.0).max(0.0),
                hi: (f * len + gap / 2.0).min(len),
            });
        }
    }
    Some(out)
}

#[test]
fn ac10_occlusion() {
    let iso = projection_by_name("isometric", None).unwrap();
    let mut failures = Vec::new();
    let mut gaps = 0;
    let mut skipped = 0;
    for seed in 0..AC10_SCHEMES {
        let mut r = rng(100_000 + seed);
        let mut s = Scheme::new();
        s.settings.mode.scale = *[0.01, 0.02, 0.04].choose(&mut r).unwrap();
        s.settings.mode.occlusion_gap_len = r.gen_range(1.0..6.0);
        let v = |r: &mut support::Rng8| Vec3::new(r.gen_range(-3e3..3e3), r.gen_range(-3e3..3e3), r.gen_range(-3e3..3e3));
        for _ in 0..r.gen_range(2..14) {
            let _ = edit::add_pipe_between(&mut s, v(&mut r), v(&mut r), None);
        }
        let pipes: Vec<PipeId> = s.pipes.ids().collect();
        let gap = s.settings.mode.occlusion_gap_len;
        let Some(mut want) = occlusion_oracle(&s, &pipes, gap) else {
            skipped += 1;
            continue;
        };
        let mut got = occlusion_gaps(&s, &iso, &OffsetField::none(&s), &pipes, gap);
        gaps += got.len();
        got.sort_by_key(|g| (g.pipe, g.over));
        want.sort_by_key(|g| (g.pipe, g.over));
        if got.len() != want.len() {
            failures.push(format!("seed {seed}: {} gaps, oracle {}", got.len(), want.len()));
            continue;
        }
        for (g, w) in got.iter().zip(&want) {
            let close = (g.pipe, g.over) == (w.pipe, w.over)
                && (g.at - w.at).norm() <= AC10_TOL
                && (g.interval.lo - w.lo).abs() <= AC10_TOL
                && (g.interval.hi - w.hi).abs() <= AC10_TOL;
            if !close {
                failures.push(format!(
                    "seed {seed}: {g:?} vs {:?} over {:?} at {:?} [{}, {}]",
                    w.pipe, w.over, w.at, w.lo, w.hi
                ));
            }
        }
    }
    report(
        "AC10",
        "occlusion",
        &failures,
        &format!("{AC10_SCHEMES} schemes, {gaps} gaps, {skipped} skipped as near-degenerate, tol {AC10_TOL:e}"),
    );
}

// ---------------------------------------------------------------------------
// 11. Golden drawings

fn straight_run_with_break() -> Scheme {
    let mut s = Scheme::new();
    s.settings.mode.scale = 0.02;
    edit::add_pipe_between(&mut s, Vec3::zeros(), Vec3::new(3000.0, 0.0, 0.0), None).unwrap();
    edit::add_pipe_between(&mut s, Vec3::new(3000.0, 0.0, 0.0), Vec3::new(9000.0, 0.0, 0.0), None).unwrap();
    edit::add_offset(&mut s, edit::OffsetSpec::general(Axis::X, 5000.0, true, -3000.0)).unwrap();
    s
}

fn tee_with_valve() -> Scheme {
    let mut s = Scheme::new();
    s.settings.mode.scale = 0.02;
    let a = edit::add_pipe_between(&mut s, Vec3::zeros(), Vec3::new(2000.0, 0.0, 0.0), None).unwrap();
    let b = edit::add_pipe_between(&mut s, Vec3::new(2000.0, 0.0, 0.0), Vec3::new(4000.0, 0.0, 0.0), None).unwrap();
    let c = edit::add_pipe_between(&mut s, Vec3::new(2000.0, 0.0, 0.0), Vec3::new(2000.0, 2000.0, -20.0), None).unwrap();
    edit::add_joint(&mut s, a, b, None).unwrap();
    let valve = edit::add_symbol(
        &mut s,
        SymbolDef {
            name: "кран".into(),
            graphics: vec![
                SymbolStroke::Line { a: Vec2::new(-3.0, -1.5), b: Vec2::new(3.0, 1.5) },
                SymbolStroke::Line { a: Vec2::new(-3.0, 1.5), b: Vec2::new(3.0, -1.5) },
                SymbolStroke::Line { a: Vec2::new(-3.0, -1.5), b: Vec2::new(-3.0, 1.5) },
                SymbolStroke::Line { a: Vec2::new(3.0, -1.5), b: Vec2::new(3.0, 1.5) },
            ],
            attach: Attach::Axial,
            cut_lengths: vec![6.0],
            sym_axis: true,
            sym_normal: true,
            stretch_default: 1.0,
        },
    )
    .unwrap();
    let blk = edit::place_block(&mut s, edit::BlockSpec::axial(valve, c, 1000.0, UpDir::ZPos)).unwrap();
    let pts: Vec<DimPoint> = [Vec3::zeros(), Vec3::new(2000.0, 0.0, 0.0), Vec3::new(4000.0, 0.0, 0.0)]
        .iter()
        .map(|p| DimPoint::Spatial(edit::find_point(&s, p).unwrap()))
        .collect();
    edit::add_dimension(&mut s, pts, Axis::Y, DimDir::Axis(Axis::X), -10.0).unwrap();
    edit::add_elevation(&mut s, ElevationAnchor::OnPipe { pipe: a, t: 0.0 }).unwrap();
    edit::add_slope_mark(&mut s, c, 1500.0, None, None).unwrap();
    let props = edit::add_spec_props(
        &mut s,
        SpecObject::ForBlock { qty: 1.0 },
        BasicProps { name: "Кран".into(), ..BasicProps::default() },
        None,
        None,
    )
    .unwrap();
    edit::add_mark(
        &mut s,
        MarkSpec {
            target: MarkTarget::Block { block: blk, anchor: Vec2::zeros() },
            props: vec![props],
            offset_vec: Vec2::new(6.0, 6.0),
            visible: true,
        },
    )
    .unwrap();
    s
}

fn axis_grid() -> Scheme {
    let mut s = Scheme::new();
    s.settings.mode.scale = 0.01;
    edit::add_pipe_between(&mut s, Vec3::new(0.0, 0.0, 0.0), Vec3::new(12000.0, 0.0, 0.0), None).unwrap();
    edit::add_pipe_between(&mut s, Vec3::new(12000.0, 0.0, 0.0), Vec3::new(12000.0, 9000.0, 0.0), None).unwrap();
    edit::set_grid(
        &mut s,
        AxisGrid {
            x_groups: vec![AxisGroup { count: 3, step: 6000.0 }],
            y_groups: vec![AxisGroup { count: 2, step: 4500.0 }, AxisGroup { count: 1, step: 3000.0 }],
            visible_x: None,
            visible_y: None,
        },
    )
    .unwrap();
    s
}

fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn ac11_golden_svg() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let iso = projection_by_name("isometric", None).unwrap();
    let mut failures = Vec::new();
    let mut sizes = Vec::new();
    let cases: [(&str, fn() -> Scheme); 3] = [
        ("straight_run_break", straight_run_with_break),
        ("tee_valve_annotations", tee_with_valve),
        ("axis_grid", axis_grid),
    ];
    for (name, make) in cases {
        let draw = || {
            let s = make();
            let d = layout_scheme(&s, &iso, None).unwrap();
            render(&d.primitives, &PageSetup::default())
        };
        let (first, second) = (draw(), draw());
        if first != second {
            failures.push(format!("{name}: two renders differ"));
        }
        let path = golden_dir().join(format!("{name}.svg"));
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &first).unwrap();
        }
        match std::fs::read_to_string(&path) {
            Ok(golden) if golden == first => {}
            Ok(_) => failures.push(format!("{name}: differs from {}", path.display())),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
        sizes.push(format!("{name} {} bytes", first.len()));
    }
    report("AC11", "golden SVG", &failures, &sizes.join(", "));
}

// ---------------------------------------------------------------------------
// 12. Specification sums for the reference scheme

#[test]
fn ac12_spec_sums() {
    let s = support::reference_scheme();
    let table = generate_spec(&s, SpecMode::Extended).unwrap();
    // Position 1 marks pipes 0 and 1: 1000 + 2340 mm. Position 2 rides the
    // valve on pipe 4, 1500 mm long. Position 3 is on both valves, once each.
    let want = [
        "1\tГОСТ 10704-91\tТруба 57x3,5\t3.34\t4.62\t\t57x3,5\tТруба стальная электросварная\tм\t\t",
        "2\tГОСТ 10704-91\tТруба 32x3\t1.50\t2.15\t\t32x3\tТруба стальная электросварная\tм\t\t",
        "3\t11с67п\tКран шаровой Ду32\t2\t1.1\t\t11с67п\tКран шаровой Ду32\tшт\t\t",
    ];
    let tsv = table.to_tsv();
    let got: Vec<&str> = tsv.lines().skip(2).collect();
    let mut failures = Vec::new();
    if got != want {
        failures.push(format!("rows {got:#?}"));
    }
    if tsv.lines().next() != Some("# work_temperature=- work_pressure=-") {
        failures.push("filter line".into());
    }
    // Six-column output shares the first six cells.
    let six = generate_spec(&s, SpecMode::Six).unwrap();
    for (row, w) in six.rows.iter().zip(&want) {
        let head: Vec<&str> = w.split('\t').take(6).collect();
        if row.cells != head {
            failures.push(format!("six-column row {}: {:?}", row.position, row.cells));
        }
    }
    report("AC12", "spec sums", &failures, &format!("{} rows", table.rows.len()));
}
