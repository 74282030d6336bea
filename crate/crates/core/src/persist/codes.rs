//! Small enum codes shared by both file formats.

use crate::model::*;

pub fn line_type_code(t: LineType) -> u8 {
    LineType::ALL.iter().position(|x| *x == t).unwrap_or(0) as u8
}

pub fn line_type_from(c: u8) -> Option<LineType> {
    LineType::ALL.get(c as usize).copied()
}

pub fn axis_from(c: u8) -> Option<Axis> {
    Axis::from_index(c as usize)
}

pub fn plan_axis_code(a: PlanAxis) -> u8 {
    match a {
        PlanAxis::X => 0,
        PlanAxis::Y => 1,
    }
}

pub fn plan_axis_from(c: u8) -> Option<PlanAxis> {
    match c {
        0 => Some(PlanAxis::X),
        1 => Some(PlanAxis::Y),
        _ => None,
    }
}

pub fn plan_dir_code(d: PlanDir) -> u8 {
    PlanDir::ALL.iter().position(|x| *x == d).unwrap_or(0) as u8
}

pub fn plan_dir_from(c: u8) -> Option<PlanDir> {
    PlanDir::ALL.get(c as usize).copied()
}

pub fn updir_code(u: UpDir) -> u8 {
    UpDir::ALL.iter().position(|x| *x == u).unwrap_or(0) as u8
}

pub fn updir_from(c: u8) -> Option<UpDir> {
    UpDir::ALL.get(c as usize).copied()
}

pub const SLOPE_KINDS: [SlopeKind; 3] = [SlopeKind::Angle, SlopeKind::Ratio, SlopeKind::Percent];

pub fn slope_kind_code(k: SlopeKind) -> u8 {
    SLOPE_KINDS.iter().position(|x| *x == k).unwrap_or(0) as u8
}

pub fn slope_kind_from(c: u8) -> Option<SlopeKind> {
    SLOPE_KINDS.get(c as usize).copied()
}

pub const ATTACHES: [Attach; 3] = [Attach::Axial, Attach::Angular, Attach::Tee];

pub fn attach_code(a: Attach) -> u8 {
    ATTACHES.iter().position(|x| *x == a).unwrap_or(0) as u8
}

pub fn attach_from(c: u8) -> Option<Attach> {
    ATTACHES.get(c as usize).copied()
}

pub fn attach_from_name(s: &str) -> Option<Attach> {
    ATTACHES.into_iter().find(|a| a.name() == s)
}

pub fn shelf_code(s: ShelfFrom) -> u8 {
    match s {
        ShelfFrom::Start => 0,
        ShelfFrom::End => 1,
    }
}

pub fn shelf_from(c: u8) -> Option<ShelfFrom> {
    match c {
        0 => Some(ShelfFrom::Start),
        1 => Some(ShelfFrom::End),
        _ => None,
    }
}

pub fn shelf_name(s: ShelfFrom) -> &'static str {
    match s {
        ShelfFrom::Start => "start",
        ShelfFrom::End => "end",
    }
}

pub fn glyph_code(g: BreakGlyph) -> u8 {
    match g {
        BreakGlyph::Dots => 0,
        BreakGlyph::Waves => 1,
    }
}

pub fn glyph_from(c: u8) -> Option<BreakGlyph> {
    match c {
        0 => Some(BreakGlyph::Dots),
        1 => Some(BreakGlyph::Waves),
        _ => None,
    }
}

pub fn glyph_name(g: BreakGlyph) -> &'static str {
    match g {
        BreakGlyph::Dots => "dots",
        BreakGlyph::Waves => "waves",
    }
}

pub fn plan_axis_name(a: PlanAxis) -> &'static str {
    match a {
        PlanAxis::X => "x",
        PlanAxis::Y => "y",
    }
}
