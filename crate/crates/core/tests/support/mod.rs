//! Random scheme generators shared by the integration tests.
//!
//! All generated numbers are exact in f32 so that the binary form keeps
//! them bit for bit.

#![allow(dead_code)]

use asts_core::constraints::{enumerate_block_orientations, legal_dimension_orientations, BlockTemplate};
use asts_core::edit::{self, BlockSpec, MarkSpec, OffsetSpec, OffsetSpecKind, TextSpec};
use asts_core::model::settings::{SettingValue, ValueKind, FIELDS};
use asts_core::model::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn reference_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/reference.asts")
}

pub fn reference_scheme() -> Scheme {
    let src = std::fs::read_to_string(reference_path()).expect("reference scheme");
    asts_core::persist::load_text(&src).expect("reference scheme parses")
}

const CHARS: &[char] = &[
    'a', 'Z', '0', '9', ' ', 'Т', 'ж', 'Ё', '"', '\\', '\n', '\t', '#', '=', ',', ':', '{', '}', '∅', '°', '界',
];

pub fn random_string<R: Rng>(r: &mut R, max: usize) -> String {
    let n = r.gen_range(0..=max);
    (0..n).map(|_| *CHARS.choose(r).unwrap()).collect()
}

/// Multiple of `step` in `lo..=hi` steps.
pub fn grid<R: Rng>(r: &mut R, lo: i32, hi: i32, step: f64) -> f64 {
    r.gen_range(lo..=hi) as f64 * step
}

fn font<R: Rng>(r: &mut R) -> FontSetting {
    FontSetting {
        face: ["GOST", "ISO 3098", "Шрифт \"A\""].choose(r).unwrap().to_string(),
        height: grid(r, 4, 40, 0.25),
        width_factor: grid(r, 2, 8, 0.125),
        slant: r.gen(),
    }
}

fn style<R: Rng>(r: &mut R) -> LineStyle {
    LineStyle::new(r.gen_range(0..PALETTE_SIZE), *LineType::ALL.choose(r).unwrap())
}

fn slope_format<R: Rng>(r: &mut R) -> SlopeFormat {
    let kind = *[SlopeKind::Angle, SlopeKind::Ratio, SlopeKind::Percent].choose(r).unwrap();
    SlopeFormat::new(kind, r.gen_range(0..4))
}

/// Random value of a settings field that keeps the settings sound.
fn setting_value<R: Rng>(r: &mut R, kind: ValueKind) -> SettingValue {
    match kind {
        ValueKind::F64 => SettingValue::F64(r.gen_range(1..4000) as f64 / 64.0),
        ValueKind::U8 => SettingValue::U8(r.gen_range(0..PALETTE_SIZE)),
        ValueKind::U32 => SettingValue::U32(r.gen_range(1..60)),
        ValueKind::Bool => SettingValue::Bool(r.gen()),
        ValueKind::Str => SettingValue::Str(random_string(r, 12)),
        ValueKind::Char => SettingValue::Char(*['А', 'В', 'Я', 'Д'].choose(r).unwrap()),
        ValueKind::Font => SettingValue::Font(font(r)),
        ValueKind::Style => SettingValue::Style(style(r)),
        ValueKind::LineType => SettingValue::LineType(*LineType::ALL.choose(r).unwrap()),
        ValueKind::Joint => SettingValue::Joint(if r.gen() {
            JointKind::Butt
        } else {
            JointKind::Fillet { radius: grid(r, 1, 40, 5.0) }
        }),
        ValueKind::Shelf => SettingValue::Shelf(if r.gen() { ShelfFrom::Start } else { ShelfFrom::End }),
        ValueKind::Slope => SettingValue::Slope(slope_format(r)),
        ValueKind::PlanAxis => SettingValue::PlanAxis(if r.gen() { PlanAxis::X } else { PlanAxis::Y }),
        ValueKind::PlanDir => SettingValue::PlanDir(*PlanDir::ALL.choose(r).unwrap()),
        ValueKind::OptF64 => SettingValue::OptF64(r.gen_bool(0.5).then(|| grid(r, -400, 400, 0.5))),
        ValueKind::Slice => SettingValue::Slice(r.gen_bool(0.5).then(|| {
            let lo = grid(r, -40, 40, 100.0);
            (lo, lo + grid(r, 1, 60, 100.0))
        })),
    }
}

/// Randomizes about a fifth of the settings fields. The extended-mode flag
/// is left alone because the spec properties must agree with it.
pub fn randomize_settings<R: Rng>(r: &mut R, s: &mut Settings) {
    for f in FIELDS {
        if f.key == "mode.spec_extended" || !r.gen_bool(0.2) {
            continue;
        }
        (f.set)(s, setting_value(r, f.kind));
    }
}

const DIRS: [[f64; 3]; 12] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
    [1.0, 1.0, 0.0],
    [1.0, 0.0, 1.0],
    [0.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [1.0, 0.0, 0.02],
    [0.0, 1.0, -0.05],
];

/// Random pipe network grown from one point on a 100 mm lattice.
pub fn random_network<R: Rng>(r: &mut R, s: &mut Scheme, pipes: usize) {
    let start = Vec3::new(grid(r, -10, 10, 100.0), grid(r, -10, 10, 100.0), grid(r, -10, 10, 100.0));
    edit::add_point(s, start).unwrap();
    let mut tries = 0;
    while s.pipes.len() < pipes && tries < pipes * 10 {
        tries += 1;
        let ids: Vec<PointId> = s.points.ids().collect();
        let from = s.points.get(*ids.choose(r).unwrap()).copied().unwrap();
        let d = Vec3::from(*DIRS.choose(r).unwrap());
        let k = r.gen_range(1..=20) as f64 * 100.0;
        let to = from + d * k;
        let st = r.gen_bool(0.3).then(|| style(r));
        let _ = edit::add_pipe_between(s, from, to, st);
    }
}

fn pipe_t<R: Rng>(r: &mut R, s: &Scheme, pipe: PipeId) -> f64 {
    let len = s.pipe_length(pipe).unwrap();
    let n = (len / 25.0).floor() as i32;
    r.gen_range(0..=n) as f64 * 25.0
}

fn random_pipe<R: Rng>(r: &mut R, s: &Scheme) -> Option<PipeId> {
    let ids: Vec<PipeId> = s.pipes.ids().collect();
    ids.choose(r).copied()
}

fn random_block<R: Rng>(r: &mut R, s: &Scheme) -> Option<BlockId> {
    let ids: Vec<BlockId> = s.blocks.ids().collect();
    ids.choose(r).copied()
}

pub fn random_target<R: Rng>(r: &mut R, s: &Scheme) -> Option<MarkTarget> {
    if r.gen_bool(0.3) {
        if let Some(block) = random_block(r, s) {
            let b = s.blocks.get(block).unwrap();
            let (lo, hi) = s.symbols.get(b.symbol).unwrap().bounds().unwrap();
            let anchor = Vec2::new(
                if r.gen() { lo.x } else { hi.x },
                if r.gen() { (lo.y + hi.y) / 2.0 } else { lo.y },
            );
            return Some(MarkTarget::Block { block, anchor });
        }
    }
    let pipe = random_pipe(r, s)?;
    Some(MarkTarget::Pipe {
        pipe,
        t: pipe_t(r, s, pipe),
    })
}

pub fn random_symbol<R: Rng>(r: &mut R, attach: Attach) -> SymbolDef {
    let mut graphics = vec![SymbolStroke::Line {
        a: Vec2::new(-grid(r, 1, 8, 0.5), -grid(r, 1, 6, 0.5)),
        b: Vec2::new(grid(r, 1, 8, 0.5), grid(r, 1, 6, 0.5)),
    }];
    for _ in 0..r.gen_range(0..3) {
        if r.gen() {
            graphics.push(SymbolStroke::Arc {
                center: Vec2::new(grid(r, -4, 4, 0.5), grid(r, -4, 4, 0.5)),
                radius: grid(r, 1, 6, 0.25),
                start_deg: grid(r, 0, 7, 45.0),
                sweep_deg: grid(r, -8, 8, 45.0),
            });
        } else {
            graphics.push(SymbolStroke::Line {
                a: Vec2::new(grid(r, -8, 8, 0.5), grid(r, -6, 6, 0.5)),
                b: Vec2::new(grid(r, -8, 8, 0.5), grid(r, -6, 6, 0.5)),
            });
        }
    }
    SymbolDef {
        name: random_string(r, 10),
        graphics,
        attach,
        cut_lengths: (0..attach.legs()).map(|_| grid(r, 0, 16, 0.5)).collect(),
        sym_axis: r.gen(),
        sym_normal: r.gen(),
        stretch_default: grid(r, 2, 12, 0.25),
    }
}

/// Places a block of `symbol` at a random admissible spot and orientation.
pub fn random_block_placement<R: Rng>(r: &mut R, s: &mut Scheme, symbol: SymbolId) -> Option<BlockId> {
    let attach = s.symbols.get(symbol)?.attach;
    let pipe = random_pipe(r, s)?;
    let (dist, pipe2, pipe3) = if attach == Attach::Axial {
        (pipe_t(r, s, pipe), None, None)
    } else {
        // Angular and tee blocks sit at the start of the host pipe.
        let g = s.pipe_geom(pipe).ok()?;
        let mut legs: Vec<PipeId> = s.pipes_at_point(g.start_id).into_iter().filter(|p| *p != pipe).collect();
        legs.shuffle(r);
        let need = attach.legs() - 1;
        if legs.len() < need {
            return None;
        }
        (0.0, Some(legs[0]), (need == 2).then(|| legs[1]))
    };
    let t = BlockTemplate {
        symbol,
        pipe,
        pipe2,
        pipe3,
        dist_from_start: dist,
    };
    let variants = enumerate_block_orientations(s, &t).ok()?;
    let &(flip, updir) = variants.choose(r)?;
    let spec = BlockSpec {
        symbol,
        pipe,
        pipe2,
        pipe3,
        dist_from_start: dist,
        flip,
        updir,
        style: r.gen_bool(0.3).then(|| style(r)),
        stretch: r.gen_bool(0.3).then(|| grid(r, 2, 12, 0.25)),
    };
    edit::place_block(s, spec).ok()
}

fn random_lines<R: Rng>(r: &mut R) -> Vec<String> {
    (0..r.gen_range(0..4))
        .map(|_| {
            let mut l = random_string(r, 8).replace(['{', '}'], "");
            if r.gen_bool(0.3) {
                l.push_str(if r.gen() { "{SLOPE_LEFT} 0" } else { "{SLOPE_RIGHT} 0" });
            }
            if r.gen_bool(0.2) {
                l.push_str(" {DIAMETER}57");
            }
            l
        })
        .collect()
}

fn add_random_text<R: Rng>(r: &mut R, s: &mut Scheme) {
    let leaders: Vec<MarkTarget> = (0..r.gen_range(1..=3)).filter_map(|_| random_target(r, s)).collect();
    if leaders.is_empty() {
        return;
    }
    let spec = TextSpec {
        lines: random_lines(r),
        leaders,
        offset_vec: Vec2::new(grid(r, -20, 20, 0.5), grid(r, -20, 20, 0.5)),
        font: r.gen_bool(0.3).then(|| font(r)),
        color: r.gen_bool(0.3).then(|| r.gen_range(0..PALETTE_SIZE)),
        line_step: r.gen_bool(0.3).then(|| grid(r, 4, 20, 0.5)),
        shelf_from: r.gen_bool(0.3).then(|| if r.gen() { ShelfFrom::Start } else { ShelfFrom::End }),
        slope_format: r.gen_bool(0.5).then(|| slope_format(r)),
    };
    let _ = edit::add_text(s, spec);
}

fn add_random_props<R: Rng>(r: &mut R, s: &mut Scheme) -> Option<SpecPropsId> {
    let object = if r.gen() {
        SpecObject::ForPipe
    } else {
        SpecObject::ForBlock { qty: grid(r, 1, 16, 0.5) }
    };
    let basic = BasicProps {
        designation: random_string(r, 10),
        name: random_string(r, 14),
        unit_mass_kg: r.gen_bool(0.5).then(|| r.gen_range(1..10000) as f64 / 100.0),
        note: random_string(r, 6),
    };
    let extended = s.settings.mode.spec_extended.then(|| ExtendedProps {
        type_mark: random_string(r, 6),
        name_and_spec: random_string(r, 14),
        unit_name: random_string(r, 3),
        manufacturer: random_string(r, 8),
        equipment_code: random_string(r, 5),
    });
    edit::add_spec_props(s, object, basic, extended, None).ok()
}

pub fn add_random_mark<R: Rng>(r: &mut R, s: &mut Scheme) -> Option<MarkId> {
    let target = random_target(r, s)?;
    let mut props = Vec::new();
    for _ in 0..r.gen_range(1..=4) {
        let existing: Vec<SpecPropsId> = s.spec_props.ids().collect();
        let p = if !existing.is_empty() && r.gen_bool(0.4) {
            *existing.choose(r).unwrap()
        } else {
            add_random_props(r, s)?
        };
        if !props.contains(&p) {
            props.push(p);
        }
    }
    edit::add_mark(
        s,
        MarkSpec {
            target,
            props,
            offset_vec: Vec2::new(grid(r, -20, 20, 0.5), grid(r, -20, 20, 0.5)),
            visible: r.gen_bool(0.8),
        },
    )
    .ok()
}

fn add_random_offset<R: Rng>(r: &mut R, s: &mut Scheme) {
    let magnitude = grid(r, -8, 8, 50.0);
    if magnitude == 0.0 {
        return;
    }
    if r.gen() {
        let axis = *Axis::ALL.choose(r).unwrap();
        let spec = OffsetSpec::general(axis, grid(r, -20, 20, 100.0) + 50.0, r.gen(), magnitude);
        let _ = edit::add_offset(s, spec);
    } else if let Some(pipe) = random_pipe(r, s) {
        let g = s.pipe_geom(pipe).unwrap();
        let n = (g.length() / 25.0).ceil() as i32 - 1;
        if n < 1 {
            return;
        }
        let t = r.gen_range(1..=n) as f64 * 25.0;
        let seed = if r.gen() { g.start_id } else { g.end_id };
        let ort = Vec3::from(*DIRS[..6].choose(r).unwrap());
        let spec = OffsetSpec {
            ort,
            magnitude,
            kind: OffsetSpecKind::Local {
                breaks: vec![(pipe, t)],
                seed,
            },
            letter: r.gen_bool(0.2).then(|| random_string(r, 2)).filter(|l| !l.is_empty()),
        };
        let _ = edit::add_offset(s, spec);
    }
}

fn add_random_dimension<R: Rng>(r: &mut R, s: &mut Scheme) {
    let Some(pipe) = random_pipe(r, s) else { return };
    let g = s.pipe_geom(pipe).unwrap();
    let mut points = vec![DimPoint::Spatial(g.start_id), DimPoint::Spatial(g.end_id)];
    if r.gen_bool(0.3) {
        if let Some(b) = random_block(r, s) {
            points.push(DimPoint::BlockAnchor(b));
        }
    }
    let Ok(legal) = legal_dimension_orientations(s, &points) else { return };
    let pairs: Vec<_> = legal.pairs.into_iter().collect();
    let Some(&(ext, dir)) = pairs.choose(r) else { return };
    if let Ok(id) = edit::add_dimension(s, points, ext, dir, grid(r, -40, 40, 0.5)) {
        s.dimensions.get_mut(id).unwrap().text_offset = grid(r, 0, 8, 0.5);
    }
}

fn add_random_elevation<R: Rng>(r: &mut R, s: &mut Scheme) {
    let anchor = match random_target(r, s) {
        Some(MarkTarget::Pipe { pipe, t }) => ElevationAnchor::OnPipe { pipe, t },
        Some(MarkTarget::Block { block, .. }) => ElevationAnchor::Block(block),
        None => return,
    };
    if let Ok(id) = edit::add_elevation(s, anchor) {
        let e = s.elevations.get_mut(id).unwrap();
        e.ext_axis = if r.gen() { PlanAxis::X } else { PlanAxis::Y };
        e.shelf_dir = *PlanDir::ALL.choose(r).unwrap();
        e.arrow_shift = grid(r, 0, 20, 0.5);
        e.shelf_shift = grid(r, 0, 20, 0.5);
        e.line_type = *LineType::ALL.choose(r).unwrap();
    }
}

fn add_random_grid<R: Rng>(r: &mut R, s: &mut Scheme) {
    let groups = |r: &mut R| -> Vec<AxisGroup> {
        (0..r.gen_range(0..3))
            .map(|_| AxisGroup {
                count: r.gen_range(1..5),
                step: grid(r, 1, 40, 250.0),
            })
            .collect()
    };
    let x_groups = groups(r);
    let y_groups = groups(r);
    let shown = |r: &mut R, n: u32| -> Option<std::collections::BTreeSet<u32>> {
        (n > 0 && r.gen_bool(0.3)).then(|| (1..=n).filter(|_| r.gen()).collect())
    };
    let nx: u32 = x_groups.iter().map(|g| g.count).sum();
    let ny: u32 = y_groups.iter().map(|g| g.count).sum();
    let grid = AxisGrid {
        visible_x: shown(r, nx),
        visible_y: shown(r, ny),
        x_groups,
        y_groups,
    };
    let _ = edit::set_grid(s, grid);
}

/// Random sound scheme with every kind of object, built through the edit
/// operations. Sizes scale with `size`.
pub fn random_scheme<R: Rng>(r: &mut R, size: usize) -> Scheme {
    let mut s = Scheme::new();
    s.settings.mode.spec_extended = r.gen_bool(0.3);
    random_network(r, &mut s, size.max(1));
    for _ in 0..size / 2 {
        if let (Some(a), Some(b)) = (random_pipe(r, &s), random_pipe(r, &s)) {
            let kind = if r.gen() {
                JointKind::Butt
            } else {
                JointKind::Fillet { radius: grid(r, 1, 20, 5.0) }
            };
            let _ = edit::add_joint(&mut s, a, b, Some(kind));
        }
    }
    for _ in 0..r.gen_range(0..3) {
        add_random_offset(r, &mut s);
    }
    let breaks: Vec<BreakId> = s.breaks.ids().collect();
    for id in breaks {
        let compression = {
            let b = s.breaks.get(id).unwrap();
            s.offsets.get(b.offset).unwrap().magnitude < 0.0
        };
        let b = s.breaks.get_mut(id).unwrap();
        b.label_shift_axial = grid(r, -10, 10, 0.5);
        b.label_shift_normal = grid(r, -10, 10, 0.5);
        if compression && r.gen() {
            b.glyph = BreakGlyph::Waves;
        }
    }
    for attach in [Attach::Axial, Attach::Angular, Attach::Tee] {
        if r.gen_bool(0.7) {
            let def = random_symbol(r, attach);
            let sym = edit::add_symbol(&mut s, def).unwrap();
            for _ in 0..r.gen_range(0..=size / 3 + 1) {
                random_block_placement(r, &mut s, sym);
            }
        }
    }
    for _ in 0..r.gen_range(0..=size / 2) {
        add_random_text(r, &mut s);
    }
    for _ in 0..r.gen_range(0..=size / 2) {
        add_random_mark(r, &mut s);
    }
    for _ in 0..r.gen_range(0..=2) {
        add_random_dimension(r, &mut s);
    }
    for _ in 0..r.gen_range(0..=2) {
        add_random_elevation(r, &mut s);
    }
    for _ in 0..r.gen_range(0..=2) {
        let Some(pipe) = random_pipe(r, &s) else { break };
        let t = pipe_t(r, &s, pipe);
        let f = r.gen_bool(0.5).then(|| slope_format(r));
        let _ = edit::add_slope_mark(&mut s, pipe, t, Some(grid(r, 0, 20, 0.5)), f);
    }
    if r.gen_bool(0.4) {
        add_random_grid(r, &mut s);
    }
    let extended = s.settings.mode.spec_extended;
    randomize_settings(r, &mut s.settings);
    s.settings.mode.spec_extended = extended;
    s
}
