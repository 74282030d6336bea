//! Compact binary parameter set, see `docs/binary-format.md`.

use std::collections::BTreeSet;

use crate::model::settings::{self, SettingValue, FIELDS};
use crate::model::*;

use super::codes::*;
use super::BinaryError;

pub const MAGIC: &[u8; 4] = b"ASTS";
pub const FORMAT_VERSION: u16 = 1;
/// Index value meaning "no object" in optional references.
const NONE16: u16 = u16::MAX;

mod tag {
    /// Zero-length section closing the stream.
    pub const END: u8 = 0;
    pub const SETTINGS: u8 = 1;
    pub const POINTS: u8 = 2;
    pub const PIPES: u8 = 3;
    pub const JOINTS: u8 = 4;
    pub const OFFSETS: u8 = 5;
    pub const BREAKS: u8 = 6;
    pub const SYMBOLS: u8 = 7;
    pub const BLOCKS: u8 = 8;
    pub const TEXTS: u8 = 9;
    pub const PIPE_LEADERS: u8 = 10;
    pub const BLOCK_LEADERS: u8 = 11;
    pub const SPEC_PROPS: u8 = 12;
    pub const MARKS: u8 = 13;
    pub const DIMENSIONS: u8 = 14;
    pub const ELEVATIONS: u8 = 15;
    pub const SLOPES: u8 = 16;
    pub const GRID: u8 = 17;
}

#[derive(Default)]
struct Out {
    buf: Vec<u8>,
}

impl Out {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f32(&mut self, v: f64) {
        self.buf.extend_from_slice(&(v as f32).to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn varint(&mut self, v: u64) {
        leb128::write::unsigned(&mut self.buf, v).expect("writing to a Vec cannot fail");
    }

    fn str(&mut self, s: &str) {
        self.varint(s.len() as u64);
        self.buf.extend_from_slice(s.as_bytes());
    }

    fn bool(&mut self, b: bool) {
        self.u8(b as u8);
    }

    fn v2(&mut self, v: &Vec2) {
        self.f32(v.x);
        self.f32(v.y);
    }

    fn v3(&mut self, v: &Vec3) {
        self.f32(v.x);
        self.f32(v.y);
        self.f32(v.z);
    }

    fn style(&mut self, s: &LineStyle) {
        self.u8(s.color);
        self.u8(line_type_code(s.line_type));
    }

    fn font(&mut self, f: &FontSetting) {
        self.str(&f.face);
        self.f32(f.height);
        self.f32(f.width_factor);
        self.bool(f.slant);
    }

    fn slope(&mut self, f: &SlopeFormat) {
        self.u8(slope_kind_code(f.kind));
        self.u8(f.precision);
    }
}

fn idx<I: EntityId>(id: I) -> u16 {
    // Ids are dense after compaction and bounded by the save-time check.
    id.index() as u16
}

fn opt_idx<I: EntityId>(id: Option<I>) -> u16 {
    id.map(idx).unwrap_or(NONE16)
}

fn setting_value(o: &mut Out, v: &SettingValue) {
    match v {
        SettingValue::F64(x) => o.f64(*x),
        SettingValue::U8(x) => o.u8(*x),
        SettingValue::U32(x) => o.varint(*x as u64),
        SettingValue::Bool(b) => o.bool(*b),
        SettingValue::Str(s) => o.str(s),
        SettingValue::Char(c) => o.varint(*c as u64),
        SettingValue::Font(f) => {
            o.str(&f.face);
            o.f64(f.height);
            o.f64(f.width_factor);
            o.bool(f.slant);
        }
        SettingValue::Style(s) => o.style(s),
        SettingValue::LineType(t) => o.u8(line_type_code(*t)),
        SettingValue::Joint(JointKind::Butt) => o.u8(0),
        SettingValue::Joint(JointKind::Fillet { radius }) => {
            o.u8(1);
            o.f64(*radius);
        }
        SettingValue::Shelf(s) => o.u8(shelf_code(*s)),
        SettingValue::Slope(f) => o.slope(f),
        SettingValue::PlanAxis(a) => o.u8(plan_axis_code(*a)),
        SettingValue::PlanDir(d) => o.u8(plan_dir_code(*d)),
        SettingValue::OptF64(None) | SettingValue::Slice(None) => o.u8(0),
        SettingValue::OptF64(Some(x)) => {
            o.u8(1);
            o.f64(*x);
        }
        SettingValue::Slice(Some((a, b))) => {
            o.u8(1);
            o.f64(*a);
            o.f64(*b);
        }
    }
}

fn settings_section(s: &Settings) -> Out {
    let defaults = Settings::default();
    let changed: Vec<(usize, SettingValue)> = FIELDS
        .iter()
        .enumerate()
        .map(|(i, f)| (i, (f.get)(s)))
        .filter(|(i, v)| *v != (FIELDS[*i].get)(&defaults))
        .collect();
    let mut o = Out::default();
    o.varint(changed.len() as u64);
    for (i, v) in changed {
        let mut field = Out::default();
        setting_value(&mut field, &v);
        o.varint(i as u64);
        o.varint(field.buf.len() as u64);
        o.buf.extend_from_slice(&field.buf);
    }
    o
}

fn target(o: &mut Out, t: &MarkTarget) {
    match *t {
        MarkTarget::Pipe { pipe, t } => {
            o.u8(0);
            o.u16(idx(pipe));
            o.f32(t);
        }
        MarkTarget::Block { block, anchor } => {
            o.u8(1);
            o.u16(idx(block));
            o.v2(&anchor);
        }
    }
}

fn section<I: EntityId, T>(out: &mut Out, tag: u8, store: &Store<I, T>, mut rec: impl FnMut(&mut Out, &T)) {
    if store.is_empty() {
        return;
    }
    let mut body = Out::default();
    body.varint(store.len() as u64);
    for v in store.values() {
        rec(&mut body, v);
    }
    out.u8(tag);
    out.varint(body.buf.len() as u64);
    out.buf.extend_from_slice(&body.buf);
}

fn check_sizes(s: &Scheme) -> Result<(), BinaryError> {
    for (list, n) in s.counts().rows() {
        if n >= NONE16 as usize {
            return Err(BinaryError::TooManyObjects { list, count: n });
        }
    }
    Ok(())
}

/// Serializes the scheme. Identifiers are renumbered densely.
pub fn save_binary(s: &Scheme) -> Result<Vec<u8>, BinaryError> {
    check_sizes(s)?;
    let s = s.compacted();
    let mut out = Out::default();
    out.buf.extend_from_slice(MAGIC);
    out.u16(FORMAT_VERSION);
    let settings = settings_section(&s.settings);
    out.u8(tag::SETTINGS);
    out.varint(settings.buf.len() as u64);
    out.buf.extend_from_slice(&settings.buf);

    section(&mut out, tag::POINTS, &s.points, |o, p| o.v3(p));
    section(&mut out, tag::PIPES, &s.pipes, |o, p| {
        o.u16(idx(p.start));
        o.u16(idx(p.end));
        o.style(&p.style);
    });
    section(&mut out, tag::JOINTS, &s.joints, |o, j| {
        o.u16(idx(j.pipe_a));
        o.u16(idx(j.pipe_b));
        match j.kind {
            JointKind::Butt => o.u8(0),
            JointKind::Fillet { radius } => {
                o.u8(1);
                o.f32(radius);
            }
        }
    });
    section(&mut out, tag::OFFSETS, &s.offsets, |o, off| {
        o.str(&off.letter);
        o.v3(&off.ort);
        o.f32(off.magnitude);
        match &off.kind {
            OffsetKind::General { axis, plane_coord } => {
                o.u8(0);
                o.u8(axis.index() as u8);
                o.f32(*plane_coord);
            }
            OffsetKind::Local { displaced_points } => {
                o.u8(1);
                o.varint(displaced_points.len() as u64);
                for p in displaced_points {
                    o.u16(idx(*p));
                }
            }
        }
    });
    section(&mut out, tag::BREAKS, &s.breaks, |o, b| {
        o.u16(idx(b.pipe));
        o.u16(idx(b.offset));
        o.f32(b.paper_len);
        o.f32(b.placement);
        o.f32(b.label_shift_axial);
        o.f32(b.label_shift_normal);
        o.u8(glyph_code(b.glyph));
    });
    section(&mut out, tag::SYMBOLS, &s.symbols, |o, d| {
        o.str(&d.name);
        o.u8(attach_code(d.attach));
        o.u8(d.sym_axis as u8 | (d.sym_normal as u8) << 1);
        o.f32(d.stretch_default);
        o.varint(d.cut_lengths.len() as u64);
        for c in &d.cut_lengths {
            o.f32(*c);
        }
        o.varint(d.graphics.len() as u64);
        for g in &d.graphics {
            match g {
                SymbolStroke::Line { a, b } => {
                    o.u8(0);
                    o.v2(a);
                    o.v2(b);
                }
                SymbolStroke::Arc {
                    center,
                    radius,
                    start_deg,
                    sweep_deg,
                } => {
                    o.u8(1);
                    o.v2(center);
                    o.f32(*radius);
                    o.f32(*start_deg);
                    o.f32(*sweep_deg);
                }
            }
        }
    });
    section(&mut out, tag::BLOCKS, &s.blocks, |o, b| {
        o.u16(idx(b.symbol));
        o.u16(idx(b.pipe));
        o.u16(opt_idx(b.pipe2));
        o.u16(opt_idx(b.pipe3));
        o.style(&b.style);
        o.f32(b.dist_from_start);
        o.bool(b.flip);
        o.u8(updir_code(b.updir));
        o.f32(b.stretch);
    });
    section(&mut out, tag::TEXTS, &s.texts, |o, t| {
        o.varint(t.lines.len() as u64);
        for l in &t.lines {
            o.str(l);
        }
        o.font(&t.font);
        o.f32(t.line_step);
        o.u8(t.color);
        o.v2(&t.offset_vec);
        match t.main_leader {
            LeaderRef::Pipe(id) => {
                o.u8(0);
                o.u16(idx(id));
            }
            LeaderRef::Block(id) => {
                o.u8(1);
                o.u16(idx(id));
            }
        }
        o.u8(shelf_code(t.shelf_from));
        match &t.slope_format {
            None => o.u8(0),
            Some(f) => {
                o.u8(1);
                o.slope(f);
            }
        }
    });
    section(&mut out, tag::PIPE_LEADERS, &s.pipe_leaders, |o, l| {
        o.u16(idx(l.text));
        o.u16(idx(l.pipe));
        o.f32(l.t);
    });
    section(&mut out, tag::BLOCK_LEADERS, &s.block_leaders, |o, l| {
        o.u16(idx(l.text));
        o.u16(idx(l.block));
        o.v2(&l.anchor);
    });
    section(&mut out, tag::SPEC_PROPS, &s.spec_props, |o, p| {
        o.varint(p.position as u64);
        match p.object {
            SpecObject::ForPipe => o.u8(0),
            SpecObject::ForBlock { qty } => {
                o.u8(1);
                o.f64(qty);
            }
        }
        o.str(&p.basic.designation);
        o.str(&p.basic.name);
        match p.basic.unit_mass_kg {
            None => o.u8(0),
            Some(m) => {
                o.u8(1);
                o.f64(m);
            }
        }
        o.str(&p.basic.note);
        match &p.extended {
            None => o.u8(0),
            Some(e) => {
                o.u8(1);
                for s in [&e.type_mark, &e.name_and_spec, &e.unit_name, &e.manufacturer, &e.equipment_code] {
                    o.str(s);
                }
            }
        }
    });
    section(&mut out, tag::MARKS, &s.marks, |o, m| {
        target(o, &m.target);
        o.varint(m.props.len() as u64);
        for p in &m.props {
            o.u16(idx(*p));
        }
        o.font(&m.font);
        o.f32(m.line_step);
        o.u8(m.color);
        o.v2(&m.offset_vec);
        o.u8(shelf_code(m.shelf_from));
        o.bool(m.visible);
    });
    section(&mut out, tag::DIMENSIONS, &s.dimensions, |o, d| {
        o.varint(d.points.len() as u64);
        for p in &d.points {
            match *p {
                DimPoint::Spatial(id) => {
                    o.u8(0);
                    o.u16(idx(id));
                }
                DimPoint::BlockAnchor(id) => {
                    o.u8(1);
                    o.u16(idx(id));
                }
            }
        }
        o.u8(d.ext_axis.index() as u8);
        match d.dim_dir {
            DimDir::Axis(a) => o.u8(a.index() as u8),
            DimDir::AlongPipe(p) => {
                o.u8(3);
                o.u16(idx(p));
            }
        }
        o.f32(d.line_offset);
        o.f32(d.text_offset);
    });
    section(&mut out, tag::ELEVATIONS, &s.elevations, |o, e| {
        match e.anchor {
            ElevationAnchor::OnPipe { pipe, t } => {
                o.u8(0);
                o.u16(idx(pipe));
                o.f32(t);
            }
            ElevationAnchor::Block(b) => {
                o.u8(1);
                o.u16(idx(b));
            }
        }
        o.u8(plan_axis_code(e.ext_axis));
        o.u8(plan_dir_code(e.shelf_dir));
        o.f32(e.arrow_shift);
        o.f32(e.shelf_shift);
        o.u8(line_type_code(e.line_type));
    });
    section(&mut out, tag::SLOPES, &s.slopes, |o, m| {
        o.u16(idx(m.pipe));
        o.f32(m.t);
        o.f32(m.shift);
        o.slope(&m.format);
    });
    if let Some(g) = &s.grid {
        let mut body = Out::default();
        for (groups, visible) in [(&g.x_groups, &g.visible_x), (&g.y_groups, &g.visible_y)] {
            body.varint(groups.len() as u64);
            for gr in groups {
                body.varint(gr.count as u64);
                body.f32(gr.step);
            }
            match visible {
                None => body.u8(0),
                Some(v) => {
                    body.u8(1);
                    body.varint(v.len() as u64);
                    for i in v {
                        body.varint(*i as u64);
                    }
                }
            }
        }
        out.u8(tag::GRID);
        out.varint(body.buf.len() as u64);
        out.buf.extend_from_slice(&body.buf);
    }
    out.u8(tag::END);
    out.u8(0);
    Ok(out.buf)
}

/// List an index refers to, checked once all sections are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum List {
    Points,
    Pipes,
    Offsets,
    Symbols,
    Blocks,
    Texts,
    PipeLeaders,
    BlockLeaders,
    SpecProps,
}

impl List {
    fn name(self) -> &'static str {
        match self {
            List::Points => "points",
            List::Pipes => "pipes",
            List::Offsets => "offsets",
            List::Symbols => "symbols",
            List::Blocks => "blocks",
            List::Texts => "texts",
            List::PipeLeaders => "pipe_leaders",
            List::BlockLeaders => "block_leaders",
            List::SpecProps => "spec_props",
        }
    }

    fn len(self, s: &Scheme) -> usize {
        match self {
            List::Points => s.points.len(),
            List::Pipes => s.pipes.len(),
            List::Offsets => s.offsets.len(),
            List::Symbols => s.symbols.len(),
            List::Blocks => s.blocks.len(),
            List::Texts => s.texts.len(),
            List::PipeLeaders => s.pipe_leaders.len(),
            List::BlockLeaders => s.block_leaders.len(),
            List::SpecProps => s.spec_props.len(),
        }
    }
}

struct In<'a, 'r> {
    buf: &'a [u8],
    refs: &'r mut Vec<(List, u16)>,
}

fn invalid(what: impl Into<String>) -> BinaryError {
    BinaryError::Invalid(what.into())
}

impl<'a> In<'a, '_> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], BinaryError> {
        if self.buf.len() < n {
            return Err(BinaryError::Truncated);
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, BinaryError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, BinaryError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn f32(&mut self) -> Result<f64, BinaryError> {
        let b = self.take(4)?;
        let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(invalid("non-finite number"))
        }
    }

    fn f64(&mut self) -> Result<f64, BinaryError> {
        let b = self.take(8)?;
        let v = f64::from_le_bytes(b.try_into().expect("8 bytes"));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(invalid("non-finite number"))
        }
    }

    fn varint(&mut self) -> Result<u64, BinaryError> {
        let mut r = self.buf;
        let v = leb128::read::unsigned(&mut r).map_err(|e| match e {
            leb128::read::Error::IoError(_) => BinaryError::Truncated,
            leb128::read::Error::Overflow => invalid("varint overflow"),
        })?;
        self.buf = r;
        Ok(v)
    }

    fn u32v(&mut self) -> Result<u32, BinaryError> {
        u32::try_from(self.varint()?).map_err(|_| invalid("value out of range"))
    }

    /// Element count; each element takes at least one byte.
    fn count(&mut self) -> Result<usize, BinaryError> {
        let n = self.varint()?;
        if n > self.buf.len() as u64 {
            return Err(BinaryError::Truncated);
        }
        Ok(n as usize)
    }

    fn str(&mut self) -> Result<String, BinaryError> {
        let n = self.count()?;
        let b = self.take(n)?;
        String::from_utf8(b.to_vec()).map_err(|_| invalid("string is not UTF-8"))
    }

    fn bool(&mut self) -> Result<bool, BinaryError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(invalid(format!("bad flag {v}"))),
        }
    }

    fn code<T>(&mut self, what: &str, f: impl Fn(u8) -> Option<T>) -> Result<T, BinaryError> {
        let c = self.u8()?;
        f(c).ok_or_else(|| invalid(format!("bad {what} code {c}")))
    }

    fn id<I: EntityId>(&mut self, list: List) -> Result<I, BinaryError> {
        let i = self.u16()?;
        self.refs.push((list, i));
        Ok(I::from_index(i as u32))
    }

    fn opt_id<I: EntityId>(&mut self, list: List) -> Result<Option<I>, BinaryError> {
        let i = self.u16()?;
        if i == NONE16 {
            return Ok(None);
        }
        self.refs.push((list, i));
        Ok(Some(I::from_index(i as u32)))
    }

    fn v2(&mut self) -> Result<Vec2, BinaryError> {
        Ok(Vec2::new(self.f32()?, self.f32()?))
    }

    fn v3(&mut self) -> Result<Vec3, BinaryError> {
        Ok(Vec3::new(self.f32()?, self.f32()?, self.f32()?))
    }

    fn style(&mut self) -> Result<LineStyle, BinaryError> {
        let color = self.u8()?;
        let line_type = self.code("line type", line_type_from)?;
        Ok(LineStyle { color, line_type })
    }

    fn font(&mut self) -> Result<FontSetting, BinaryError> {
        Ok(FontSetting {
            face: self.str()?,
            height: self.f32()?,
            width_factor: self.f32()?,
            slant: self.bool()?,
        })
    }

    fn slope(&mut self) -> Result<SlopeFormat, BinaryError> {
        let kind = self.code("slope kind", slope_kind_from)?;
        Ok(SlopeFormat::new(kind, self.u8()?))
    }

    fn target(&mut self) -> Result<MarkTarget, BinaryError> {
        match self.u8()? {
            0 => Ok(MarkTarget::Pipe {
                pipe: self.id(List::Pipes)?,
                t: self.f32()?,
            }),
            1 => Ok(MarkTarget::Block {
                block: self.id(List::Blocks)?,
                anchor: self.v2()?,
            }),
            c => Err(invalid(format!("bad target code {c}"))),
        }
    }

    fn store<I: EntityId, T>(
        &mut self,
        mut rec: impl FnMut(&mut Self) -> Result<T, BinaryError>,
    ) -> Result<Store<I, T>, BinaryError> {
        let n = self.count()?;
        let mut store = Store::new();
        for _ in 0..n {
            store.insert(rec(self)?);
        }
        Ok(store)
    }

    fn setting(&mut self, kind: settings::ValueKind) -> Result<SettingValue, BinaryError> {
        use settings::ValueKind as K;
        Ok(match kind {
            K::F64 => SettingValue::F64(self.f64()?),
            K::U8 => SettingValue::U8(self.u8()?),
            K::U32 => SettingValue::U32(self.u32v()?),
            K::Bool => SettingValue::Bool(self.bool()?),
            K::Str => SettingValue::Str(self.str()?),
            K::Char => SettingValue::Char(char::from_u32(self.u32v()?).ok_or_else(|| invalid("bad character"))?),
            K::Font => SettingValue::Font(FontSetting {
                face: self.str()?,
                height: self.f64()?,
                width_factor: self.f64()?,
                slant: self.bool()?,
            }),
            K::Style => SettingValue::Style(self.style()?),
            K::LineType => SettingValue::LineType(self.code("line type", line_type_from)?),
            K::Joint => SettingValue::Joint(match self.u8()? {
                0 => JointKind::Butt,
                1 => JointKind::Fillet { radius: self.f64()? },
                c => return Err(invalid(format!("bad joint code {c}"))),
            }),
            K::Shelf => SettingValue::Shelf(self.code("shelf", shelf_from)?),
            K::Slope => SettingValue::Slope(self.slope()?),
            K::PlanAxis => SettingValue::PlanAxis(self.code("plan axis", plan_axis_from)?),
            K::PlanDir => SettingValue::PlanDir(self.code("plan direction", plan_dir_from)?),
            K::OptF64 => SettingValue::OptF64(if self.bool()? { Some(self.f64()?) } else { None }),
            K::Slice => SettingValue::Slice(if self.bool()? {
                Some((self.f64()?, self.f64()?))
            } else {
                None
            }),
        })
    }

    fn finish(&self, what: &str) -> Result<(), BinaryError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(invalid(format!("trailing bytes in {what} section")))
        }
    }
}

fn read_settings(r: &mut In) -> Result<Settings, BinaryError> {
    let mut s = Settings::default();
    let n = r.count()?;
    for _ in 0..n {
        let i = r.varint()?;
        let len = r.count()?;
        let body = r.take(len)?;
        // Fields appended by later versions are skipped.
        let Some(field) = FIELDS.get(i as usize) else {
            continue;
        };
        let mut refs = Vec::new();
        let mut fr = In {
            buf: body,
            refs: &mut refs,
        };
        let v = fr.setting(field.kind)?;
        fr.finish(field.key)?;
        (field.set)(&mut s, v);
    }
    Ok(s)
}

fn read_grid(r: &mut In) -> Result<AxisGrid, BinaryError> {
    let mut halves = Vec::new();
    for _ in 0..2 {
        let n = r.count()?;
        let mut groups = Vec::with_capacity(n);
        for _ in 0..n {
            groups.push(AxisGroup {
                count: r.u32v()?,
                step: r.f32()?,
            });
        }
        let visible = if r.bool()? {
            let n = r.count()?;
            let mut v = BTreeSet::new();
            for _ in 0..n {
                v.insert(r.u32v()?);
            }
            Some(v)
        } else {
            None
        };
        halves.push((groups, visible));
    }
    let (y_groups, visible_y) = halves.pop().expect("two halves");
    let (x_groups, visible_x) = halves.pop().expect("two halves");
    Ok(AxisGrid {
        x_groups,
        y_groups,
        visible_x,
        visible_y,
    })
}

fn read_section(s: &mut Scheme, t: u8, r: &mut In) -> Result<(), BinaryError> {
    match t {
        tag::SETTINGS => s.settings = read_settings(r)?,
        tag::POINTS => s.points = r.store(|r| r.v3())?,
        tag::PIPES => {
            s.pipes = r.store(|r| {
                Ok(Pipe {
                    start: r.id(List::Points)?,
                    end: r.id(List::Points)?,
                    style: r.style()?,
                })
            })?
        }
        tag::JOINTS => {
            s.joints = r.store(|r| {
                let pipe_a = r.id(List::Pipes)?;
                let pipe_b = r.id(List::Pipes)?;
                let kind = match r.u8()? {
                    0 => JointKind::Butt,
                    1 => JointKind::Fillet { radius: r.f32()? },
                    c => return Err(invalid(format!("bad joint code {c}"))),
                };
                Ok(Joint { pipe_a, pipe_b, kind })
            })?
        }
        tag::OFFSETS => {
            s.offsets = r.store(|r| {
                let letter = r.str()?;
                let ort = r.v3()?;
                let magnitude = r.f32()?;
                let kind = match r.u8()? {
                    0 => OffsetKind::General {
                        axis: r.code("axis", axis_from)?,
                        plane_coord: r.f32()?,
                    },
                    1 => {
                        let n = r.count()?;
                        let mut displaced_points = BTreeSet::new();
                        for _ in 0..n {
                            displaced_points.insert(r.id(List::Points)?);
                        }
                        OffsetKind::Local { displaced_points }
                    }
                    c => return Err(invalid(format!("bad offset kind {c}"))),
                };
                Ok(Offset {
                    letter,
                    ort,
                    magnitude,
                    kind,
                })
            })?
        }
        tag::BREAKS => {
            s.breaks = r.store(|r| {
                Ok(BreakLine {
                    pipe: r.id(List::Pipes)?,
                    offset: r.id(List::Offsets)?,
                    paper_len: r.f32()?,
                    placement: r.f32()?,
                    label_shift_axial: r.f32()?,
                    label_shift_normal: r.f32()?,
                    glyph: r.code("glyph", glyph_from)?,
                })
            })?
        }
        tag::SYMBOLS => {
            s.symbols = r.store(|r| {
                let name = r.str()?;
                let attach = r.code("attachment", attach_from)?;
                let flags = r.u8()?;
                if flags > 3 {
                    return Err(invalid(format!("bad symbol flags {flags}")));
                }
                let stretch_default = r.f32()?;
                let n = r.count()?;
                let mut cut_lengths = Vec::with_capacity(n);
                for _ in 0..n {
                    cut_lengths.push(r.f32()?);
                }
                let n = r.count()?;
                let mut graphics = Vec::with_capacity(n);
                for _ in 0..n {
                    graphics.push(match r.u8()? {
                        0 => SymbolStroke::Line { a: r.v2()?, b: r.v2()? },
                        1 => SymbolStroke::Arc {
                            center: r.v2()?,
                            radius: r.f32()?,
                            start_deg: r.f32()?,
                            sweep_deg: r.f32()?,
                        },
                        c => return Err(invalid(format!("bad stroke kind {c}"))),
                    });
                }
                Ok(SymbolDef {
                    name,
                    graphics,
                    attach,
                    cut_lengths,
                    sym_axis: flags & 1 != 0,
                    sym_normal: flags & 2 != 0,
                    stretch_default,
                })
            })?
        }
        tag::BLOCKS => {
            s.blocks = r.store(|r| {
                Ok(Block {
                    symbol: r.id(List::Symbols)?,
                    pipe: r.id(List::Pipes)?,
                    pipe2: r.opt_id(List::Pipes)?,
                    pipe3: r.opt_id(List::Pipes)?,
                    style: r.style()?,
                    dist_from_start: r.f32()?,
                    flip: r.bool()?,
                    updir: r.code("up direction", updir_from)?,
                    stretch: r.f32()?,
                })
            })?
        }
        tag::TEXTS => {
            s.texts = r.store(|r| {
                let n = r.count()?;
                let mut lines = Vec::with_capacity(n);
                for _ in 0..n {
                    lines.push(r.str()?);
                }
                let font = r.font()?;
                let line_step = r.f32()?;
                let color = r.u8()?;
                let offset_vec = r.v2()?;
                let main_leader = match r.u8()? {
                    0 => LeaderRef::Pipe(r.id(List::PipeLeaders)?),
                    1 => LeaderRef::Block(r.id(List::BlockLeaders)?),
                    c => return Err(invalid(format!("bad leader kind {c}"))),
                };
                let shelf_from = r.code("shelf", shelf_from)?;
                let slope_format = if r.bool()? { Some(r.slope()?) } else { None };
                Ok(Text {
                    lines,
                    font,
                    line_step,
                    color,
                    offset_vec,
                    main_leader,
                    shelf_from,
                    slope_format,
                })
            })?
        }
        tag::PIPE_LEADERS => {
            s.pipe_leaders = r.store(|r| {
                Ok(LeaderToPipe {
                    text: r.id(List::Texts)?,
                    pipe: r.id(List::Pipes)?,
                    t: r.f32()?,
                })
            })?
        }
        tag::BLOCK_LEADERS => {
            s.block_leaders = r.store(|r| {
                Ok(LeaderToBlock {
                    text: r.id(List::Texts)?,
                    block: r.id(List::Blocks)?,
                    anchor: r.v2()?,
                })
            })?
        }
        tag::SPEC_PROPS => {
            s.spec_props = r.store(|r| {
                let position = r.u32v()?;
                let object = match r.u8()? {
                    0 => SpecObject::ForPipe,
                    1 => SpecObject::ForBlock { qty: r.f64()? },
                    c => return Err(invalid(format!("bad spec object {c}"))),
                };
                let designation = r.str()?;
                let name = r.str()?;
                let unit_mass_kg = if r.bool()? { Some(r.f64()?) } else { None };
                let note = r.str()?;
                let extended = if r.bool()? {
                    Some(ExtendedProps {
                        type_mark: r.str()?,
                        name_and_spec: r.str()?,
                        unit_name: r.str()?,
                        manufacturer: r.str()?,
                        equipment_code: r.str()?,
                    })
                } else {
                    None
                };
                Ok(SpecProps {
                    position,
                    object,
                    basic: BasicProps {
                        designation,
                        name,
                        unit_mass_kg,
                        note,
                    },
                    extended,
                })
            })?
        }
        tag::MARKS => {
            s.marks = r.store(|r| {
                let target = r.target()?;
                let n = r.count()?;
                let mut props = Vec::with_capacity(n);
                for _ in 0..n {
                    props.push(r.id(List::SpecProps)?);
                }
                Ok(PositionMark {
                    target,
                    props,
                    font: r.font()?,
                    line_step: r.f32()?,
                    color: r.u8()?,
                    offset_vec: r.v2()?,
                    shelf_from: r.code("shelf", shelf_from)?,
                    visible: r.bool()?,
                })
            })?
        }
        tag::DIMENSIONS => {
            s.dimensions = r.store(|r| {
                let n = r.count()?;
                let mut points = Vec::with_capacity(n);
                for _ in 0..n {
                    points.push(match r.u8()? {
                        0 => DimPoint::Spatial(r.id(List::Points)?),
                        1 => DimPoint::BlockAnchor(r.id(List::Blocks)?),
                        c => return Err(invalid(format!("bad dimension point kind {c}"))),
                    });
                }
                let ext_axis = r.code("axis", axis_from)?;
                let dim_dir = match r.u8()? {
                    3 => DimDir::AlongPipe(r.id(List::Pipes)?),
                    c => DimDir::Axis(axis_from(c).ok_or_else(|| invalid(format!("bad dimension direction {c}")))?),
                };
                Ok(Dimension {
                    points,
                    ext_axis,
                    dim_dir,
                    line_offset: r.f32()?,
                    text_offset: r.f32()?,
                })
            })?
        }
        tag::ELEVATIONS => {
            s.elevations = r.store(|r| {
                let anchor = match r.u8()? {
                    0 => ElevationAnchor::OnPipe {
                        pipe: r.id(List::Pipes)?,
                        t: r.f32()?,
                    },
                    1 => ElevationAnchor::Block(r.id(List::Blocks)?),
                    c => return Err(invalid(format!("bad elevation anchor {c}"))),
                };
                Ok(ElevationMark {
                    anchor,
                    ext_axis: r.code("plan axis", plan_axis_from)?,
                    shelf_dir: r.code("plan direction", plan_dir_from)?,
                    arrow_shift: r.f32()?,
                    shelf_shift: r.f32()?,
                    line_type: r.code("line type", line_type_from)?,
                })
            })?
        }
        tag::SLOPES => {
            s.slopes = r.store(|r| {
                Ok(SlopeMark {
                    pipe: r.id(List::Pipes)?,
                    t: r.f32()?,
                    shift: r.f32()?,
                    format: r.slope()?,
                })
            })?
        }
        tag::GRID => s.grid = Some(read_grid(r)?),
        _ => {}
    }
    Ok(())
}

/// Parses a binary parameter set. Unknown section tags are skipped.
pub fn load_binary(bytes: &[u8]) -> Result<Scheme, BinaryError> {
    if bytes.len() < MAGIC.len() {
        return Err(if MAGIC.starts_with(bytes) { BinaryError::Truncated } else { BinaryError::BadMagic });
    }
    if &bytes[..4] != MAGIC {
        return Err(BinaryError::BadMagic);
    }
    let mut refs = Vec::new();
    let mut r = In {
        buf: &bytes[4..],
        refs: &mut refs,
    };
    let version = r.u16()?;
    if version > FORMAT_VERSION {
        return Err(BinaryError::VersionTooNew {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let mut s = Scheme::new();
    let mut seen = BTreeSet::new();
    loop {
        let t = r.u8()?;
        let len = r.count()?;
        if t == tag::END {
            if len != 0 || !r.buf.is_empty() {
                return Err(invalid("data after the end marker"));
            }
            break;
        }
        let body = r.take(len)?;
        if !seen.insert(t) {
            return Err(invalid(format!("section {t} repeated")));
        }
        let mut sub = In {
            buf: body,
            refs: &mut *r.refs,
        };
        read_section(&mut s, t, &mut sub)?;
        if (tag::SETTINGS..=tag::GRID).contains(&t) {
            sub.finish(&format!("{t}"))?;
        }
    }
    if !seen.contains(&tag::SETTINGS) {
        return Err(invalid("settings section missing"));
    }
    for (list, i) in refs {
        let len = list.len(&s);
        if i as usize >= len {
            return Err(BinaryError::DanglingIndex {
                list: list.name(),
                index: i as u32,
                len,
            });
        }
    }
    Ok(s)
}
