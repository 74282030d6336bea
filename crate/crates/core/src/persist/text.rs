//! Line-oriented text format, see `docs/text-format.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::model::settings::{self, SettingValue, ValueKind, FIELDS};
use crate::model::*;

use super::codes::*;
use super::TextError;

pub const TEXT_VERSION: u32 = 1;

// ---------------------------------------------------------------- writing

fn num(v: f64) -> String {
    format!("{v}")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn nums(vs: &[f64]) -> String {
    vs.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

fn font(f: &FontSetting) -> String {
    format!("{},{},{},{}", quote(&f.face), num(f.height), num(f.width_factor), f.slant)
}

fn style(s: &LineStyle) -> String {
    format!("{},{}", s.color, s.line_type.name())
}

fn slope(f: &SlopeFormat) -> String {
    format!("{},{}", f.kind.name(), f.precision)
}

fn joint(k: &JointKind) -> String {
    match k {
        JointKind::Butt => "butt".to_string(),
        JointKind::Fillet { radius } => format!("fillet,{}", num(*radius)),
    }
}

fn target(t: &MarkTarget) -> String {
    match *t {
        MarkTarget::Pipe { pipe, t } => format!("pipe,{},{}", pipe.0, num(t)),
        MarkTarget::Block { block, anchor } => format!("block,{},{},{}", block.0, num(anchor.x), num(anchor.y)),
    }
}

fn setting_value(v: &SettingValue) -> String {
    match v {
        SettingValue::F64(x) => num(*x),
        SettingValue::U8(x) => x.to_string(),
        SettingValue::U32(x) => x.to_string(),
        SettingValue::Bool(b) => b.to_string(),
        SettingValue::Str(s) => quote(s),
        SettingValue::Char(c) => quote(&c.to_string()),
        SettingValue::Font(f) => font(f),
        SettingValue::Style(s) => style(s),
        SettingValue::LineType(t) => t.name().to_string(),
        SettingValue::Joint(k) => joint(k),
        SettingValue::Shelf(s) => shelf_name(*s).to_string(),
        SettingValue::Slope(f) => slope(f),
        SettingValue::PlanAxis(a) => plan_axis_name(*a).to_string(),
        SettingValue::PlanDir(d) => d.name().to_string(),
        SettingValue::OptF64(None) | SettingValue::Slice(None) => "-".to_string(),
        SettingValue::OptF64(Some(x)) => num(*x),
        SettingValue::Slice(Some((a, b))) => format!("{},{}", num(*a), num(*b)),
    }
}

fn ids<I: EntityId>(it: impl IntoIterator<Item = I>) -> String {
    it.into_iter().map(|i| i.index().to_string()).collect::<Vec<_>>().join(",")
}

/// Writes the scheme in normalized form: dense ids, settings that differ
/// from the defaults, lists in a fixed order.
pub fn save_text(s: &Scheme) -> String {
    let s = s.compacted();
    let mut o = String::new();
    let _ = writeln!(o, "asts version={TEXT_VERSION}");
    let defaults = Settings::default();
    for f in FIELDS {
        let v = (f.get)(&s.settings);
        if v != (f.get)(&defaults) {
            let _ = writeln!(o, "set {}={}", f.key, setting_value(&v));
        }
    }
    for (id, p) in s.points.iter() {
        let _ = writeln!(o, "point id={} at={}", id.0, nums(&[p.x, p.y, p.z]));
    }
    for (id, p) in s.pipes.iter() {
        let _ = writeln!(o, "pipe id={} from={} to={} style={}", id.0, p.start.0, p.end.0, style(&p.style));
    }
    for j in s.joints.values() {
        let _ = writeln!(o, "joint a={} b={} kind={}", j.pipe_a.0, j.pipe_b.0, joint(&j.kind));
    }
    for (id, off) in s.offsets.iter() {
        let _ = write!(
            o,
            "offset id={} letter={} ort={} magnitude={}",
            id.0,
            quote(&off.letter),
            nums(&[off.ort.x, off.ort.y, off.ort.z]),
            num(off.magnitude)
        );
        match &off.kind {
            OffsetKind::General { axis, plane_coord } => {
                let _ = writeln!(o, " kind=general axis={axis} plane={}", num(*plane_coord));
            }
            OffsetKind::Local { displaced_points } => {
                let _ = write!(o, " kind=local");
                if !displaced_points.is_empty() {
                    let _ = write!(o, " points={}", ids(displaced_points.iter().copied()));
                }
                o.push('\n');
            }
        }
    }
    for b in s.breaks.values() {
        let _ = writeln!(
            o,
            "break pipe={} offset={} paper_len={} placement={} label={} glyph={}",
            b.pipe.0,
            b.offset.0,
            num(b.paper_len),
            num(b.placement),
            nums(&[b.label_shift_axial, b.label_shift_normal]),
            glyph_name(b.glyph)
        );
    }
    for (id, d) in s.symbols.iter() {
        let _ = write!(
            o,
            "symbol id={} name={} attach={} sym_axis={} sym_normal={} stretch={}",
            id.0,
            quote(&d.name),
            d.attach.name(),
            d.sym_axis,
            d.sym_normal,
            num(d.stretch_default)
        );
        if !d.cut_lengths.is_empty() {
            let _ = write!(o, " cuts={}", nums(&d.cut_lengths));
        }
        o.push('\n');
        for g in &d.graphics {
            match g {
                SymbolStroke::Line { a, b } => {
                    let _ = writeln!(o, "stroke symbol={} line={}", id.0, nums(&[a.x, a.y, b.x, b.y]));
                }
                SymbolStroke::Arc {
                    center,
                    radius,
                    start_deg,
                    sweep_deg,
                } => {
                    let _ = writeln!(
                        o,
                        "stroke symbol={} arc={}",
                        id.0,
                        nums(&[center.x, center.y, *radius, *start_deg, *sweep_deg])
                    );
                }
            }
        }
    }
    for (id, b) in s.blocks.iter() {
        let _ = write!(o, "block id={} symbol={} pipe={}", id.0, b.symbol.0, b.pipe.0);
        if let Some(p) = b.pipe2 {
            let _ = write!(o, " pipe2={}", p.0);
        }
        if let Some(p) = b.pipe3 {
            let _ = write!(o, " pipe3={}", p.0);
        }
        let _ = writeln!(
            o,
            " style={} dist={} flip={} up={} stretch={}",
            style(&b.style),
            num(b.dist_from_start),
            b.flip,
            b.updir.name(),
            num(b.stretch)
        );
    }
    for (id, t) in s.texts.iter() {
        let main = match t.main_leader {
            LeaderRef::Pipe(l) => format!("pleader,{}", l.0),
            LeaderRef::Block(l) => format!("bleader,{}", l.0),
        };
        let _ = write!(o, "text id={} main={main}", id.0);
        if !t.lines.is_empty() {
            let lines: Vec<String> = t.lines.iter().map(|l| quote(l)).collect();
            let _ = write!(o, " lines={}", lines.join(","));
        }
        let _ = write!(
            o,
            " font={} line_step={} color={} offset={} shelf={}",
            font(&t.font),
            num(t.line_step),
            t.color,
            nums(&[t.offset_vec.x, t.offset_vec.y]),
            shelf_name(t.shelf_from)
        );
        if let Some(f) = &t.slope_format {
            let _ = write!(o, " slope={}", slope(f));
        }
        o.push('\n');
    }
    for (id, l) in s.pipe_leaders.iter() {
        let _ = writeln!(o, "pleader id={} text={} pipe={} t={}", id.0, l.text.0, l.pipe.0, num(l.t));
    }
    for (id, l) in s.block_leaders.iter() {
        let _ = writeln!(
            o,
            "bleader id={} text={} block={} anchor={}",
            id.0,
            l.text.0,
            l.block.0,
            nums(&[l.anchor.x, l.anchor.y])
        );
    }
    for (id, p) in s.spec_props.iter() {
        let object = match p.object {
            SpecObject::ForPipe => "pipe".to_string(),
            SpecObject::ForBlock { qty } => format!("block,{}", num(qty)),
        };
        let _ = write!(
            o,
            "props id={} pos={} for={object} designation={} name={}",
            id.0,
            p.position,
            quote(&p.basic.designation),
            quote(&p.basic.name)
        );
        if let Some(m) = p.basic.unit_mass_kg {
            let _ = write!(o, " mass={}", num(m));
        }
        let _ = write!(o, " note={}", quote(&p.basic.note));
        if let Some(e) = &p.extended {
            let parts: Vec<String> = [&e.type_mark, &e.name_and_spec, &e.unit_name, &e.manufacturer, &e.equipment_code]
                .iter()
                .map(|s| quote(s))
                .collect();
            let _ = write!(o, " ext={}", parts.join(","));
        }
        o.push('\n');
    }
    for m in s.marks.values() {
        let _ = writeln!(
            o,
            "mark target={} props={} font={} line_step={} color={} offset={} shelf={} visible={}",
            target(&m.target),
            ids(m.props.iter().copied()),
            font(&m.font),
            num(m.line_step),
            m.color,
            nums(&[m.offset_vec.x, m.offset_vec.y]),
            shelf_name(m.shelf_from),
            m.visible
        );
    }
    for d in s.dimensions.values() {
        let pts: Vec<String> = d
            .points
            .iter()
            .map(|p| match p {
                DimPoint::Spatial(id) => format!("point,{}", id.0),
                DimPoint::BlockAnchor(id) => format!("block,{}", id.0),
            })
            .collect();
        let dir = match d.dim_dir {
            DimDir::Axis(a) => a.name().to_string(),
            DimDir::AlongPipe(p) => format!("pipe,{}", p.0),
        };
        let _ = writeln!(
            o,
            "dim points={} ext={} dir={dir} offset={} text_offset={}",
            pts.join(","),
            d.ext_axis,
            num(d.line_offset),
            num(d.text_offset)
        );
    }
    for e in s.elevations.values() {
        let on = match e.anchor {
            ElevationAnchor::OnPipe { pipe, t } => format!("pipe,{},{}", pipe.0, num(t)),
            ElevationAnchor::Block(b) => format!("block,{}", b.0),
        };
        let _ = writeln!(
            o,
            "elev on={on} ext={} shelf={} arrow_shift={} shelf_shift={} line={}",
            plan_axis_name(e.ext_axis),
            e.shelf_dir.name(),
            num(e.arrow_shift),
            num(e.shelf_shift),
            e.line_type.name()
        );
    }
    for m in s.slopes.values() {
        let _ = writeln!(
            o,
            "slope pipe={} t={} shift={} format={}",
            m.pipe.0,
            num(m.t),
            num(m.shift),
            slope(&m.format)
        );
    }
    if let Some(g) = &s.grid {
        let groups = |gs: &[AxisGroup]| {
            gs.iter()
                .map(|g| format!("{}:{}", g.count, num(g.step)))
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = write!(o, "grid");
        if !g.x_groups.is_empty() {
            let _ = write!(o, " x={}", groups(&g.x_groups));
        }
        if !g.y_groups.is_empty() {
            let _ = write!(o, " y={}", groups(&g.y_groups));
        }
        for (key, v) in [("show_x", &g.visible_x), ("show_y", &g.visible_y)] {
            if let Some(v) = v {
                let list: Vec<String> = v.iter().map(|i| i.to_string()).collect();
                let _ = write!(o, " {key}={}", if list.is_empty() { "-".to_string() } else { list.join(",") });
            }
        }
        o.push('\n');
    }
    o
}

// ---------------------------------------------------------------- reading

#[derive(Debug, Clone)]
struct Atom {
    text: String,
    quoted: bool,
    col: usize,
}

#[derive(Debug)]
struct Field {
    key: String,
    col: usize,
    atoms: Vec<Atom>,
}

#[derive(Debug)]
struct Record {
    kind: String,
    line: usize,
    col: usize,
    fields: Vec<Field>,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> TextError {
    TextError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Splits one line into a record; `None` for blank and comment lines.
fn tokenize(line: &str, no: usize) -> Result<Option<Record>, TextError> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    let bare_end = |c: char| c.is_whitespace() || matches!(c, ',' | '=' | '"' | '#');
    skip_ws(&mut i);
    if i == chars.len() || chars[i] == '#' {
        return Ok(None);
    }
    let kind_col = i + 1;
    let start = i;
    while i < chars.len() && !bare_end(chars[i]) {
        i += 1;
    }
    if i == start {
        return Err(err(no, i + 1, "expected a record kind"));
    }
    let mut rec = Record {
        kind: chars[start..i].iter().collect(),
        line: no,
        col: kind_col,
        fields: Vec::new(),
    };
    loop {
        skip_ws(&mut i);
        if i == chars.len() || chars[i] == '#' {
            break;
        }
        let key_col = i + 1;
        let ks = i;
        while i < chars.len() && !bare_end(chars[i]) {
            i += 1;
        }
        if i == ks || i == chars.len() || chars[i] != '=' {
            return Err(err(no, key_col, "expected key=value"));
        }
        let key: String = chars[ks..i].iter().collect();
        i += 1;
        let mut atoms = Vec::new();
        loop {
            let col = i + 1;
            if i < chars.len() && chars[i] == '"' {
                i += 1;
                let mut text = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err(err(no, col, "unterminated string")),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let c = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                _ => return Err(err(no, i + 1, "bad escape")),
                            };
                            text.push(c);
                            i += 2;
                        }
                        Some(c) => {
                            text.push(*c);
                            i += 1;
                        }
                    }
                }
                atoms.push(Atom { text, quoted: true, col });
            } else {
                let s = i;
                while i < chars.len() && !bare_end(chars[i]) {
                    i += 1;
                }
                if i == s {
                    return Err(err(no, col, "expected a value"));
                }
                atoms.push(Atom {
                    text: chars[s..i].iter().collect(),
                    quoted: false,
                    col,
                });
            }
            if i < chars.len() && chars[i] == ',' {
                i += 1;
                continue;
            }
            break;
        }
        if i < chars.len() && !chars[i].is_whitespace() && chars[i] != '#' {
            return Err(err(no, i + 1, "unexpected character"));
        }
        if rec.fields.iter().any(|f| f.key == key) {
            return Err(err(no, key_col, format!("duplicate key `{key}`")));
        }
        rec.fields.push(Field {
            key,
            col: key_col,
            atoms,
        });
    }
    Ok(Some(rec))
}

/// Checked access to the fields of one record.
struct Fields<'a> {
    rec: &'a Record,
    used: BTreeSet<usize>,
}

impl<'a> Fields<'a> {
    fn new(rec: &'a Record) -> Self {
        Fields {
            rec,
            used: BTreeSet::new(),
        }
    }

    fn opt(&mut self, key: &str) -> Option<&'a Field> {
        let i = self.rec.fields.iter().position(|f| f.key == key)?;
        self.used.insert(i);
        Some(&self.rec.fields[i])
    }

    fn req(&mut self, key: &str) -> Result<&'a Field, TextError> {
        self.opt(key)
            .ok_or_else(|| err(self.rec.line, self.rec.col, format!("`{}` needs `{key}`", self.rec.kind)))
    }

    /// Rejects keys no accessor asked for.
    fn finish(self) -> Result<(), TextError> {
        for (i, f) in self.rec.fields.iter().enumerate() {
            if !self.used.contains(&i) {
                return Err(err(self.rec.line, f.col, format!("unknown key `{}` for `{}`", f.key, self.rec.kind)));
            }
        }
        Ok(())
    }
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn e(&self, col: usize, msg: impl Into<String>) -> TextError {
        err(self.line, col, msg)
    }

    fn arity(&self, f: &Field, n: usize) -> Result<(), TextError> {
        if f.atoms.len() == n {
            Ok(())
        } else {
            Err(self.e(f.col, format!("`{}` takes {n} value(s), got {}", f.key, f.atoms.len())))
        }
    }

    fn single<'f>(&self, f: &'f Field) -> Result<&'f Atom, TextError> {
        self.arity(f, 1)?;
        Ok(&f.atoms[0])
    }

    fn bare<'f>(&self, a: &'f Atom) -> Result<&'f str, TextError> {
        if a.quoted {
            Err(self.e(a.col, "unexpected string"))
        } else {
            Ok(&a.text)
        }
    }

    fn f64(&self, a: &Atom) -> Result<f64, TextError> {
        let v: f64 = self.bare(a)?.parse().map_err(|_| self.e(a.col, format!("bad number `{}`", a.text)))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.e(a.col, "number must be finite"))
        }
    }

    fn int<T: std::str::FromStr>(&self, a: &Atom) -> Result<T, TextError> {
        self.bare(a)?.parse().map_err(|_| self.e(a.col, format!("bad integer `{}`", a.text)))
    }

    fn bool(&self, a: &Atom) -> Result<bool, TextError> {
        match self.bare(a)? {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.e(a.col, format!("expected true or false, got `{}`", a.text))),
        }
    }

    fn string(&self, a: &Atom) -> Result<String, TextError> {
        if a.quoted {
            Ok(a.text.clone())
        } else {
            Err(self.e(a.col, "expected a quoted string"))
        }
    }

    fn name<T>(&self, a: &Atom, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<T, TextError> {
        f(self.bare(a)?).ok_or_else(|| self.e(a.col, format!("unknown {what} `{}`", a.text)))
    }

    fn f64s(&self, f: &Field, n: usize) -> Result<Vec<f64>, TextError> {
        self.arity(f, n)?;
        f.atoms.iter().map(|a| self.f64(a)).collect()
    }

    fn font(&self, f: &Field) -> Result<FontSetting, TextError> {
        self.arity(f, 4)?;
        Ok(FontSetting {
            face: self.string(&f.atoms[0])?,
            height: self.f64(&f.atoms[1])?,
            width_factor: self.f64(&f.atoms[2])?,
            slant: self.bool(&f.atoms[3])?,
        })
    }

    fn style(&self, f: &Field) -> Result<LineStyle, TextError> {
        self.arity(f, 2)?;
        Ok(LineStyle {
            color: self.int(&f.atoms[0])?,
            line_type: self.name(&f.atoms[1], "line type", LineType::from_name)?,
        })
    }

    fn slope(&self, f: &Field) -> Result<SlopeFormat, TextError> {
        self.arity(f, 2)?;
        Ok(SlopeFormat::new(
            self.name(&f.atoms[0], "slope kind", SlopeKind::from_name)?,
            self.int(&f.atoms[1])?,
        ))
    }

    fn joint(&self, f: &Field) -> Result<JointKind, TextError> {
        let a = &f.atoms[0];
        match self.bare(a)? {
            "butt" => {
                self.arity(f, 1)?;
                Ok(JointKind::Butt)
            }
            "fillet" => {
                self.arity(f, 2)?;
                Ok(JointKind::Fillet {
                    radius: self.f64(&f.atoms[1])?,
                })
            }
            _ => Err(self.e(a.col, format!("unknown joint kind `{}`", a.text))),
        }
    }

    fn shelf(&self, f: &Field) -> Result<ShelfFrom, TextError> {
        self.name(self.single(f)?, "shelf end", |s| match s {
            "start" => Some(ShelfFrom::Start),
            "end" => Some(ShelfFrom::End),
            _ => None,
        })
    }

    fn plan_axis(&self, a: &Atom) -> Result<PlanAxis, TextError> {
        self.name(a, "plan axis", |s| match s {
            "x" => Some(PlanAxis::X),
            "y" => Some(PlanAxis::Y),
            _ => None,
        })
    }

    fn axis(&self, a: &Atom) -> Result<Axis, TextError> {
        self.name(a, "axis", |s| Axis::ALL.into_iter().find(|x| x.name() == s))
    }

    fn setting(&self, kind: ValueKind, f: &Field) -> Result<SettingValue, TextError> {
        let none = f.atoms.len() == 1 && !f.atoms[0].quoted && f.atoms[0].text == "-";
        Ok(match kind {
            ValueKind::F64 => SettingValue::F64(self.f64(self.single(f)?)?),
            ValueKind::U8 => SettingValue::U8(self.int(self.single(f)?)?),
            ValueKind::U32 => SettingValue::U32(self.int(self.single(f)?)?),
            ValueKind::Bool => SettingValue::Bool(self.bool(self.single(f)?)?),
            ValueKind::Str => SettingValue::Str(self.string(self.single(f)?)?),
            ValueKind::Char => {
                let a = self.single(f)?;
                let s = self.string(a)?;
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => SettingValue::Char(c),
                    _ => return Err(self.e(a.col, "expected one character")),
                }
            }
            ValueKind::Font => SettingValue::Font(self.font(f)?),
            ValueKind::Style => SettingValue::Style(self.style(f)?),
            ValueKind::LineType => SettingValue::LineType(self.name(self.single(f)?, "line type", LineType::from_name)?),
            ValueKind::Joint => SettingValue::Joint(self.joint(f)?),
            ValueKind::Shelf => SettingValue::Shelf(self.shelf(f)?),
            ValueKind::Slope => SettingValue::Slope(self.slope(f)?),
            ValueKind::PlanAxis => SettingValue::PlanAxis(self.plan_axis(self.single(f)?)?),
            ValueKind::PlanDir => SettingValue::PlanDir(self.name(self.single(f)?, "plan direction", PlanDir::from_name)?),
            ValueKind::OptF64 if none => SettingValue::OptF64(None),
            ValueKind::OptF64 => SettingValue::OptF64(Some(self.f64(self.single(f)?)?)),
            ValueKind::Slice if none => SettingValue::Slice(None),
            ValueKind::Slice => {
                let v = self.f64s(f, 2)?;
                SettingValue::Slice(Some((v[0], v[1])))
            }
        })
    }
}

/// Text ids of one list mapped to dense ids in order of appearance.
struct IdMap<I> {
    tag: &'static str,
    map: BTreeMap<u32, I>,
}

impl<I: EntityId> IdMap<I> {
    fn new(tag: &'static str) -> Self {
        IdMap {
            tag,
            map: BTreeMap::new(),
        }
    }

    fn define(&mut self, c: &Ctx, f: &Field) -> Result<I, TextError> {
        let a = c.single(f)?;
        let n: u32 = c.int(a)?;
        let dense = I::from_index(self.map.len() as u32);
        if self.map.insert(n, dense).is_some() {
            return Err(c.e(a.col, format!("duplicate {} id {n}", self.tag)));
        }
        Ok(dense)
    }

    fn get(&self, c: &Ctx, a: &Atom) -> Result<I, TextError> {
        let n: u32 = c.int(a)?;
        self.map
            .get(&n)
            .copied()
            .ok_or_else(|| c.e(a.col, format!("no {} with id {n}", self.tag)))
    }

    fn one(&self, c: &Ctx, f: &Field) -> Result<I, TextError> {
        self.get(c, c.single(f)?)
    }
}

struct Maps {
    points: IdMap<PointId>,
    pipes: IdMap<PipeId>,
    offsets: IdMap<OffsetId>,
    symbols: IdMap<SymbolId>,
    blocks: IdMap<BlockId>,
    texts: IdMap<TextId>,
    pleaders: IdMap<PipeLeaderId>,
    bleaders: IdMap<BlockLeaderId>,
    props: IdMap<SpecPropsId>,
}

const KINDS: &[&str] = &[
    "asts", "set", "point", "pipe", "joint", "offset", "break", "symbol", "stroke", "block", "text", "pleader", "bleader",
    "props", "mark", "dim", "elev", "slope", "grid",
];

/// Parses a text document. Identifiers are renumbered densely in order of
/// appearance per list.
pub fn load_text(src: &str) -> Result<Scheme, TextError> {
    let mut records = Vec::new();
    for (i, line) in src.lines().enumerate() {
        if let Some(r) = tokenize(line, i + 1)? {
            if !KINDS.contains(&r.kind.as_str()) {
                return Err(err(r.line, r.col, format!("unknown record kind `{}`", r.kind)));
            }
            records.push(r);
        }
    }
    let Some(first) = records.first() else {
        return Err(err(1, 1, "missing `asts` header"));
    };
    if first.kind != "asts" {
        return Err(err(first.line, first.col, "the first record must be `asts`"));
    }
    {
        let c = Ctx { line: first.line };
        let mut f = Fields::new(first);
        let v = f.req("version")?;
        let n: u32 = c.int(c.single(v)?)?;
        if n > TEXT_VERSION {
            return Err(c.e(v.col, format!("version {n} is newer than supported {TEXT_VERSION}")));
        }
        f.finish()?;
    }

    // Ids are assigned first so later records may reference earlier ones
    // and the other way round.
    let mut m = Maps {
        points: IdMap::new("point"),
        pipes: IdMap::new("pipe"),
        offsets: IdMap::new("offset"),
        symbols: IdMap::new("symbol"),
        blocks: IdMap::new("block"),
        texts: IdMap::new("text"),
        pleaders: IdMap::new("pleader"),
        bleaders: IdMap::new("bleader"),
        props: IdMap::new("props"),
    };
    for r in &records[1..] {
        let c = Ctx { line: r.line };
        let Some(idf) = r.fields.iter().find(|f| f.key == "id") else {
            continue;
        };
        match r.kind.as_str() {
            "point" => drop(m.points.define(&c, idf)?),
            "pipe" => drop(m.pipes.define(&c, idf)?),
            "offset" => drop(m.offsets.define(&c, idf)?),
            "symbol" => drop(m.symbols.define(&c, idf)?),
            "block" => drop(m.blocks.define(&c, idf)?),
            "text" => drop(m.texts.define(&c, idf)?),
            "pleader" => drop(m.pleaders.define(&c, idf)?),
            "bleader" => drop(m.bleaders.define(&c, idf)?),
            "props" => drop(m.props.define(&c, idf)?),
            _ => {}
        }
    }

    let mut s = Scheme::new();
    for r in &records[1..] {
        record(&mut s, &m, r)?;
    }
    Ok(s)
}

fn record(s: &mut Scheme, m: &Maps, r: &Record) -> Result<(), TextError> {
    let c = Ctx { line: r.line };
    let mut f = Fields::new(r);
    match r.kind.as_str() {
        "asts" => return Err(c.e(r.col, "repeated `asts` header")),
        "set" => {
            for field in &r.fields {
                let def = settings::field(&field.key).ok_or_else(|| c.e(field.col, format!("unknown setting `{}`", field.key)))?;
                let v = c.setting(def.kind, field)?;
                (def.set)(&mut s.settings, v);
            }
            return Ok(());
        }
        "point" => {
            f.req("id")?;
            let v = c.f64s(f.req("at")?, 3)?;
            s.points.insert(Vec3::new(v[0], v[1], v[2]));
        }
        "pipe" => {
            f.req("id")?;
            let start = m.points.one(&c, f.req("from")?)?;
            let end = m.points.one(&c, f.req("to")?)?;
            let style = c.style(f.req("style")?)?;
            s.pipes.insert(Pipe { start, end, style });
        }
        "joint" => {
            let pipe_a = m.pipes.one(&c, f.req("a")?)?;
            let pipe_b = m.pipes.one(&c, f.req("b")?)?;
            let kind = c.joint(f.req("kind")?)?;
            s.joints.insert(Joint { pipe_a, pipe_b, kind });
        }
        "offset" => {
            f.req("id")?;
            let letter = c.string(c.single(f.req("letter")?)?)?;
            let o = c.f64s(f.req("ort")?, 3)?;
            let magnitude = c.f64(c.single(f.req("magnitude")?)?)?;
            let kf = f.req("kind")?;
            let kind = match c.bare(c.single(kf)?)? {
                "general" => OffsetKind::General {
                    axis: c.axis(c.single(f.req("axis")?)?)?,
                    plane_coord: c.f64(c.single(f.req("plane")?)?)?,
                },
                "local" => {
                    let mut displaced_points = BTreeSet::new();
                    if let Some(pf) = f.opt("points") {
                        for a in &pf.atoms {
                            displaced_points.insert(m.points.get(&c, a)?);
                        }
                    }
                    OffsetKind::Local { displaced_points }
                }
                other => return Err(c.e(kf.col, format!("unknown offset kind `{other}`"))),
            };
            s.offsets.insert(Offset {
                letter,
                ort: Vec3::new(o[0], o[1], o[2]),
                magnitude,
                kind,
            });
        }
        "break" => {
            let label = c.f64s(f.req("label")?, 2)?;
            s.breaks.insert(BreakLine {
                pipe: m.pipes.one(&c, f.req("pipe")?)?,
                offset: m.offsets.one(&c, f.req("offset")?)?,
                paper_len: c.f64(c.single(f.req("paper_len")?)?)?,
                placement: c.f64(c.single(f.req("placement")?)?)?,
                label_shift_axial: label[0],
                label_shift_normal: label[1],
                glyph: c.name(c.single(f.req("glyph")?)?, "glyph", |s| match s {
                    "dots" => Some(BreakGlyph::Dots),
                    "waves" => Some(BreakGlyph::Waves),
                    _ => None,
                })?,
            });
        }
        "symbol" => {
            f.req("id")?;
            let cut_lengths = match f.opt("cuts") {
                Some(cf) => cf.atoms.iter().map(|a| c.f64(a)).collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            s.symbols.insert(SymbolDef {
                name: c.string(c.single(f.req("name")?)?)?,
                graphics: Vec::new(),
                attach: c.name(c.single(f.req("attach")?)?, "attachment", attach_from_name)?,
                cut_lengths,
                sym_axis: c.bool(c.single(f.req("sym_axis")?)?)?,
                sym_normal: c.bool(c.single(f.req("sym_normal")?)?)?,
                stretch_default: c.f64(c.single(f.req("stretch")?)?)?,
            });
        }
        "stroke" => {
            let sym = m.symbols.one(&c, f.req("symbol")?)?;
            let stroke = match (f.opt("line"), f.opt("arc")) {
                (Some(l), None) => {
                    let v = c.f64s(l, 4)?;
                    SymbolStroke::Line {
                        a: Vec2::new(v[0], v[1]),
                        b: Vec2::new(v[2], v[3]),
                    }
                }
                (None, Some(a)) => {
                    let v = c.f64s(a, 5)?;
                    SymbolStroke::Arc {
                        center: Vec2::new(v[0], v[1]),
                        radius: v[2],
                        start_deg: v[3],
                        sweep_deg: v[4],
                    }
                }
                _ => return Err(c.e(r.col, "`stroke` needs exactly one of `line` and `arc`")),
            };
            // Strokes may only follow their symbol.
            let def = s
                .symbols
                .get_mut(sym)
                .ok_or_else(|| c.e(r.col, "stroke before its symbol"))?;
            def.graphics.push(stroke);
        }
        "block" => {
            f.req("id")?;
            let opt_pipe = |f: Option<&Field>| f.map(|f| m.pipes.one(&c, f)).transpose();
            let pipe2 = opt_pipe(f.opt("pipe2"))?;
            let pipe3 = opt_pipe(f.opt("pipe3"))?;
            s.blocks.insert(Block {
                symbol: m.symbols.one(&c, f.req("symbol")?)?,
                pipe: m.pipes.one(&c, f.req("pipe")?)?,
                pipe2,
                pipe3,
                style: c.style(f.req("style")?)?,
                dist_from_start: c.f64(c.single(f.req("dist")?)?)?,
                flip: c.bool(c.single(f.req("flip")?)?)?,
                updir: c.name(c.single(f.req("up")?)?, "up direction", UpDir::from_name)?,
                stretch: c.f64(c.single(f.req("stretch")?)?)?,
            });
        }
        "text" => {
            f.req("id")?;
            let mf = f.req("main")?;
            c.arity(mf, 2)?;
            let main_leader = match c.bare(&mf.atoms[0])? {
                "pleader" => LeaderRef::Pipe(m.pleaders.get(&c, &mf.atoms[1])?),
                "bleader" => LeaderRef::Block(m.bleaders.get(&c, &mf.atoms[1])?),
                other => return Err(c.e(mf.atoms[0].col, format!("unknown leader kind `{other}`"))),
            };
            let lines = match f.opt("lines") {
                Some(lf) => lf.atoms.iter().map(|a| c.string(a)).collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let slope_format = f.opt("slope").map(|sf| c.slope(sf)).transpose()?;
            let o = c.f64s(f.req("offset")?, 2)?;
            s.texts.insert(Text {
                lines,
                font: c.font(f.req("font")?)?,
                line_step: c.f64(c.single(f.req("line_step")?)?)?,
                color: c.int(c.single(f.req("color")?)?)?,
                offset_vec: Vec2::new(o[0], o[1]),
                main_leader,
                shelf_from: c.shelf(f.req("shelf")?)?,
                slope_format,
            });
        }
        "pleader" => {
            f.req("id")?;
            s.pipe_leaders.insert(LeaderToPipe {
                text: m.texts.one(&c, f.req("text")?)?,
                pipe: m.pipes.one(&c, f.req("pipe")?)?,
                t: c.f64(c.single(f.req("t")?)?)?,
            });
        }
        "bleader" => {
            f.req("id")?;
            let a = c.f64s(f.req("anchor")?, 2)?;
            s.block_leaders.insert(LeaderToBlock {
                text: m.texts.one(&c, f.req("text")?)?,
                block: m.blocks.one(&c, f.req("block")?)?,
                anchor: Vec2::new(a[0], a[1]),
            });
        }
        "props" => {
            f.req("id")?;
            let ff = f.req("for")?;
            let object = match c.bare(&ff.atoms[0])? {
                "pipe" => {
                    c.arity(ff, 1)?;
                    SpecObject::ForPipe
                }
                "block" => {
                    c.arity(ff, 2)?;
                    SpecObject::ForBlock {
                        qty: c.f64(&ff.atoms[1])?,
                    }
                }
                other => return Err(c.e(ff.col, format!("unknown spec object `{other}`"))),
            };
            let extended = match f.opt("ext") {
                Some(ef) => {
                    c.arity(ef, 5)?;
                    let v: Vec<String> = ef.atoms.iter().map(|a| c.string(a)).collect::<Result<_, _>>()?;
                    let [type_mark, name_and_spec, unit_name, manufacturer, equipment_code] =
                        <[String; 5]>::try_from(v).expect("five values");
                    Some(ExtendedProps {
                        type_mark,
                        name_and_spec,
                        unit_name,
                        manufacturer,
                        equipment_code,
                    })
                }
                None => None,
            };
            let unit_mass_kg = f.opt("mass").map(|mf| c.f64(c.single(mf)?)).transpose()?;
            s.spec_props.insert(SpecProps {
                position: c.int(c.single(f.req("pos")?)?)?,
                object,
                basic: BasicProps {
                    designation: c.string(c.single(f.req("designation")?)?)?,
                    name: c.string(c.single(f.req("name")?)?)?,
                    unit_mass_kg,
                    note: c.string(c.single(f.req("note")?)?)?,
                },
                extended,
            });
        }
        "mark" => {
            let target = mark_target(&c, m, f.req("target")?)?;
            let props = f
                .req("props")?
                .atoms
                .iter()
                .map(|a| m.props.get(&c, a))
                .collect::<Result<_, _>>()?;
            let o = c.f64s(f.req("offset")?, 2)?;
            s.marks.insert(PositionMark {
                target,
                props,
                font: c.font(f.req("font")?)?,
                line_step: c.f64(c.single(f.req("line_step")?)?)?,
                color: c.int(c.single(f.req("color")?)?)?,
                offset_vec: Vec2::new(o[0], o[1]),
                shelf_from: c.shelf(f.req("shelf")?)?,
                visible: c.bool(c.single(f.req("visible")?)?)?,
            });
        }
        "dim" => {
            let pf = f.req("points")?;
            if pf.atoms.len() % 2 != 0 {
                return Err(c.e(pf.col, "`points` takes kind,id pairs"));
            }
            let mut points = Vec::new();
            for pair in pf.atoms.chunks(2) {
                points.push(match c.bare(&pair[0])? {
                    "point" => DimPoint::Spatial(m.points.get(&c, &pair[1])?),
                    "block" => DimPoint::BlockAnchor(m.blocks.get(&c, &pair[1])?),
                    other => return Err(c.e(pair[0].col, format!("unknown dimension point kind `{other}`"))),
                });
            }
            let df = f.req("dir")?;
            let dim_dir = if df.atoms.len() == 2 && c.bare(&df.atoms[0])? == "pipe" {
                DimDir::AlongPipe(m.pipes.get(&c, &df.atoms[1])?)
            } else {
                DimDir::Axis(c.axis(c.single(df)?)?)
            };
            s.dimensions.insert(Dimension {
                points,
                ext_axis: c.axis(c.single(f.req("ext")?)?)?,
                dim_dir,
                line_offset: c.f64(c.single(f.req("offset")?)?)?,
                text_offset: c.f64(c.single(f.req("text_offset")?)?)?,
            });
        }
        "elev" => {
            let of = f.req("on")?;
            let anchor = match c.bare(&of.atoms[0])? {
                "pipe" => {
                    c.arity(of, 3)?;
                    ElevationAnchor::OnPipe {
                        pipe: m.pipes.get(&c, &of.atoms[1])?,
                        t: c.f64(&of.atoms[2])?,
                    }
                }
                "block" => {
                    c.arity(of, 2)?;
                    ElevationAnchor::Block(m.blocks.get(&c, &of.atoms[1])?)
                }
                other => return Err(c.e(of.col, format!("unknown elevation anchor `{other}`"))),
            };
            s.elevations.insert(ElevationMark {
                anchor,
                ext_axis: c.plan_axis(c.single(f.req("ext")?)?)?,
                shelf_dir: c.name(c.single(f.req("shelf")?)?, "plan direction", PlanDir::from_name)?,
                arrow_shift: c.f64(c.single(f.req("arrow_shift")?)?)?,
                shelf_shift: c.f64(c.single(f.req("shelf_shift")?)?)?,
                line_type: c.name(c.single(f.req("line")?)?, "line type", LineType::from_name)?,
            });
        }
        "slope" => {
            s.slopes.insert(SlopeMark {
                pipe: m.pipes.one(&c, f.req("pipe")?)?,
                t: c.f64(c.single(f.req("t")?)?)?,
                shift: c.f64(c.single(f.req("shift")?)?)?,
                format: c.slope(f.req("format")?)?,
            });
        }
        "grid" => {
            if s.grid.is_some() {
                return Err(c.e(r.col, "only one grid is allowed"));
            }
            let groups = |gf: Option<&Field>| -> Result<Vec<AxisGroup>, TextError> {
                let Some(gf) = gf else { return Ok(Vec::new()) };
                gf.atoms
                    .iter()
                    .map(|a| {
                        let t = c.bare(a)?;
                        let (n, step) = t.split_once(':').ok_or_else(|| c.e(a.col, "expected count:step"))?;
                        let count = n.parse().map_err(|_| c.e(a.col, format!("bad count `{n}`")))?;
                        let step: f64 = step.parse().map_err(|_| c.e(a.col, format!("bad step `{step}`")))?;
                        if !step.is_finite() {
                            return Err(c.e(a.col, "step must be finite"));
                        }
                        Ok(AxisGroup { count, step })
                    })
                    .collect()
            };
            let shown = |sf: Option<&Field>| -> Result<Option<BTreeSet<u32>>, TextError> {
                let Some(sf) = sf else { return Ok(None) };
                if sf.atoms.len() == 1 && !sf.atoms[0].quoted && sf.atoms[0].text == "-" {
                    return Ok(Some(BTreeSet::new()));
                }
                sf.atoms.iter().map(|a| c.int(a)).collect::<Result<_, _>>().map(Some)
            };
            s.grid = Some(AxisGrid {
                x_groups: groups(f.opt("x"))?,
                y_groups: groups(f.opt("y"))?,
                visible_x: shown(f.opt("show_x"))?,
                visible_y: shown(f.opt("show_y"))?,
            });
        }
        other => return Err(c.e(r.col, format!("unknown record kind `{other}`"))),
    }
    f.finish()
}

fn mark_target(c: &Ctx, m: &Maps, f: &Field) -> Result<MarkTarget, TextError> {
    match c.bare(&f.atoms[0])? {
        "pipe" => {
            c.arity(f, 3)?;
            Ok(MarkTarget::Pipe {
                pipe: m.pipes.get(c, &f.atoms[1])?,
                t: c.f64(&f.atoms[2])?,
            })
        }
        "block" => {
            c.arity(f, 4)?;
            Ok(MarkTarget::Block {
                block: m.blocks.get(c, &f.atoms[1])?,
                anchor: Vec2::new(c.f64(&f.atoms[2])?, c.f64(&f.atoms[3])?),
            })
        }
        other => Err(c.e(f.col, format!("unknown target kind `{other}`"))),
    }
}

/// Sets one settings field from its text-form value, as in `set key=value`.
pub fn apply_setting(settings: &mut Settings, key: &str, value: &str) -> Result<(), TextError> {
    let line = format!("set {key}={value}");
    let rec = tokenize(&line, 1)?.ok_or_else(|| err(1, 1, "empty setting"))?;
    let c = Ctx { line: 1 };
    match rec.fields.as_slice() {
        [field] => {
            let def = settings::field(&field.key).ok_or_else(|| c.e(field.col, format!("unknown setting `{}`", field.key)))?;
            let v = c.setting(def.kind, field)?;
            (def.set)(settings, v);
            Ok(())
        }
        _ => Err(c.e(1, "expected one key=value")),
    }
}
