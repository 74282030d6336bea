use std::collections::BTreeMap;

use super::{invalid, sync_slope_texts, EditError};
use crate::constraints;
use crate::model::*;

fn check_target(s: &Scheme, target: &MarkTarget) -> Result<(), EditError> {
    match *target {
        MarkTarget::Pipe { pipe, t } => {
            let len = s.pipe_length(pipe)?;
            if !(t >= 0.0 && t <= len) {
                return Err(invalid(format!("position {t} outside {pipe} of length {len}")));
            }
        }
        MarkTarget::Block { block, anchor } => {
            let b = s.block(block)?;
            if let Some((lo, hi)) = s.symbol(b.symbol)?.bounds() {
                if anchor.x < lo.x || anchor.y < lo.y || anchor.x > hi.x || anchor.y > hi.y {
                    return Err(invalid("anchor outside the symbol image"));
                }
            }
        }
    }
    Ok(())
}

/// Text content and placement; omitted styling comes from settings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TextSpec {
    pub lines: Vec<String>,
    /// The first leader becomes the main one.
    pub leaders: Vec<MarkTarget>,
    pub offset_vec: Vec2,
    pub font: Option<FontSetting>,
    pub color: Option<u8>,
    pub line_step: Option<f64>,
    pub shelf_from: Option<ShelfFrom>,
    /// Used when the text carries a slope value; settings default otherwise.
    pub slope_format: Option<SlopeFormat>,
}

fn insert_leader(s: &mut Scheme, text: TextId, target: MarkTarget) -> LeaderRef {
    match target {
        MarkTarget::Pipe { pipe, t } => LeaderRef::Pipe(s.pipe_leaders.insert(LeaderToPipe { text, pipe, t })),
        MarkTarget::Block { block, anchor } => {
            LeaderRef::Block(s.block_leaders.insert(LeaderToBlock { text, block, anchor }))
        }
    }
}

/// Slope format a text must carry given its main leader and content.
pub(crate) fn fixed_slope_format(s: &Scheme, text: &Text, wanted: Option<SlopeFormat>) -> Option<SlopeFormat> {
    (s.main_leader_pipe(text).is_some() && text.has_slope_symbol())
        .then(|| wanted.or(text.slope_format).unwrap_or(s.settings.objects.slope_format))
}

pub fn add_text(s: &mut Scheme, spec: TextSpec) -> Result<TextId, EditError> {
    let Some(first) = spec.leaders.first() else {
        return Err(invalid("a text needs at least one leader"));
    };
    for l in &spec.leaders {
        check_target(s, l)?;
    }
    let o = &s.settings.objects;
    let font = spec.font.unwrap_or_else(|| o.text_font.clone());
    let color = spec.color.unwrap_or(o.text_color);
    if color >= PALETTE_SIZE || !(font.height > 0.0 && font.width_factor > 0.0) {
        return Err(invalid("bad text colour or font"));
    }
    let placeholder = LeaderRef::Pipe(PipeLeaderId(u32::MAX));
    let id = s.texts.insert(Text {
        lines: spec.lines,
        font,
        line_step: spec.line_step.unwrap_or(o.text_line_step),
        color,
        offset_vec: spec.offset_vec,
        main_leader: placeholder,
        shelf_from: spec.shelf_from.unwrap_or(o.text_shelf_from),
        slope_format: None,
    });
    let main = insert_leader(s, id, *first);
    for l in &spec.leaders[1..] {
        insert_leader(s, id, *l);
    }
    let text = s.texts.get(id).expect("just inserted");
    let mut text = text.clone();
    text.main_leader = main;
    text.slope_format = fixed_slope_format(s, &text, spec.slope_format);
    let pipe = s.main_leader_pipe(&text);
    *s.texts.get_mut(id).expect("just inserted") = text;
    if let Some(pipe) = pipe {
        sync_slope_texts(s, pipe)?;
    }
    Ok(id)
}

pub fn add_leader(s: &mut Scheme, text: TextId, target: MarkTarget) -> Result<LeaderRef, EditError> {
    if !s.texts.contains(text) {
        return Err(ModelError::UnknownText(text).into());
    }
    check_target(s, &target)?;
    Ok(insert_leader(s, text, target))
}

/// Removes a leader; the text goes with its last leader, and a removed
/// main leader hands over to the first remaining one.
pub fn delete_leader(s: &mut Scheme, leader: LeaderRef) -> Result<bool, EditError> {
    let text = s
        .leader_text(leader)
        .ok_or_else(|| invalid("unknown leader"))?;
    match leader {
        LeaderRef::Pipe(id) => {
            s.pipe_leaders.remove(id);
        }
        LeaderRef::Block(id) => {
            s.block_leaders.remove(id);
        }
    }
    Ok(repair_text(s, text))
}

/// Restores text invariants after leaders were removed. Returns whether
/// the text was deleted.
pub(crate) fn repair_text(s: &mut Scheme, id: TextId) -> bool {
    let leaders = s.leaders_of_text(id);
    let Some(text) = s.texts.get(id) else { return false };
    let Some(first) = leaders.first() else {
        s.texts.remove(id);
        return true;
    };
    let mut text = text.clone();
    if !leaders.contains(&text.main_leader) {
        text.main_leader = *first;
    }
    text.slope_format = fixed_slope_format(s, &text, None);
    let pipe = s.main_leader_pipe(&text);
    *s.texts.get_mut(id).expect("present") = text;
    if let Some(pipe) = pipe {
        let _ = sync_slope_texts(s, pipe);
    }
    false
}

/// Replaces the lines of a text and refreshes its slope value.
pub fn set_text_lines(s: &mut Scheme, id: TextId, lines: Vec<String>) -> Result<(), EditError> {
    let text = s.texts.get_mut(id).ok_or(ModelError::UnknownText(id))?;
    text.lines = lines;
    repair_text(s, id);
    Ok(())
}

pub fn add_spec_props(
    s: &mut Scheme,
    object: SpecObject,
    basic: BasicProps,
    extended: Option<ExtendedProps>,
    position: Option<u32>,
) -> Result<SpecPropsId, EditError> {
    if let SpecObject::ForBlock { qty } = object {
        if !(qty > 0.0 && qty.is_finite()) {
            return Err(invalid("quantity must be positive"));
        }
    }
    let extended = match (s.settings.mode.spec_extended, extended) {
        (true, e) => Some(e.unwrap_or_default()),
        (false, None) => None,
        (false, Some(_)) => return Err(invalid("extended properties outside extended mode")),
    };
    let position = if s.settings.mode.autonumber {
        s.spec_props.values().map(|p| p.position).max().unwrap_or(0) + 1
    } else {
        let p = position.ok_or_else(|| invalid("manual numbering needs a position"))?;
        if p == 0 || s.spec_props.values().any(|q| q.position == p) {
            return Err(invalid(format!("position {p} is zero or already used")));
        }
        p
    };
    Ok(s.spec_props.insert(SpecProps {
        position,
        object,
        basic,
        extended,
    }))
}

/// Removes specification properties and every reference to them; marks
/// left without positions are removed too.
pub fn delete_spec_props(s: &mut Scheme, id: SpecPropsId) -> Result<(), EditError> {
    s.spec_props.remove(id).ok_or(ModelError::UnknownSpecProps(id))?;
    for (_, m) in s.marks.iter_mut() {
        m.props.retain(|p| *p != id);
    }
    s.marks.retain(|_, m| !m.props.is_empty());
    if s.settings.mode.autonumber {
        renumber_positions(s)?;
    }
    Ok(())
}

/// Mark placement; omitted styling comes from settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkSpec {
    pub target: MarkTarget,
    pub props: Vec<SpecPropsId>,
    pub offset_vec: Vec2,
    pub visible: bool,
}

pub fn add_mark(s: &mut Scheme, spec: MarkSpec) -> Result<MarkId, EditError> {
    check_target(s, &spec.target)?;
    if spec.props.is_empty() || spec.props.len() > MAX_MARK_PROPS {
        return Err(invalid(format!("a mark carries 1..={MAX_MARK_PROPS} positions")));
    }
    for p in &spec.props {
        if !s.spec_props.contains(*p) {
            return Err(ModelError::UnknownSpecProps(*p).into());
        }
    }
    let o = &s.settings.objects;
    Ok(s.marks.insert(PositionMark {
        target: spec.target,
        props: spec.props,
        font: o.mark_font.clone(),
        line_step: o.mark_line_step,
        color: o.mark_color,
        offset_vec: spec.offset_vec,
        shelf_from: o.mark_shelf_from,
        visible: spec.visible,
    }))
}

/// Removes a mark; properties no other mark references go with it.
pub fn delete_mark(s: &mut Scheme, id: MarkId) -> Result<(), EditError> {
    let mark = s.marks.remove(id).ok_or(ModelError::UnknownMark(id))?;
    drop_orphan_props(s, &mark.props);
    Ok(())
}

pub(crate) fn drop_orphan_props(s: &mut Scheme, candidates: &[SpecPropsId]) -> usize {
    let mut n = 0;
    for p in candidates {
        if s.spec_props.contains(*p) && s.marks_referencing(*p).next().is_none() {
            s.spec_props.remove(*p);
            n += 1;
        }
    }
    if n > 0 && s.settings.mode.autonumber {
        let _ = renumber_positions(s);
    }
    n
}

/// Dense order-preserving renumbering onto `1..=K`; returns old → new.
pub fn renumber_positions(s: &mut Scheme) -> Result<BTreeMap<u32, u32>, EditError> {
    if !s.settings.mode.autonumber {
        return Err(EditError::ManualNumbering);
    }
    let mut old: Vec<u32> = s.spec_props.values().map(|p| p.position).collect();
    old.sort_unstable();
    old.dedup();
    let map: BTreeMap<u32, u32> = old.iter().enumerate().map(|(i, p)| (*p, i as u32 + 1)).collect();
    for (_, p) in s.spec_props.iter_mut() {
        p.position = map[&p.position];
    }
    Ok(map)
}

pub fn add_dimension(
    s: &mut Scheme,
    points: Vec<DimPoint>,
    ext_axis: Axis,
    dim_dir: DimDir,
    line_offset: f64,
) -> Result<DimensionId, EditError> {
    let legal = constraints::legal_dimension_orientations(s, &points)?;
    if let Some(v) = legal.violations.into_iter().next() {
        return Err(EditError::Illegal(v));
    }
    if !legal.pairs.contains(&(ext_axis, dim_dir)) {
        return Err(invalid(format!(
            "extension {ext_axis} with dimension {dim_dir:?} is not a legal orientation"
        )));
    }
    if !line_offset.is_finite() {
        return Err(EditError::NonFinite);
    }
    let text_offset = s.settings.objects.dim_text_offset;
    Ok(s.dimensions.insert(Dimension {
        points,
        ext_axis,
        dim_dir,
        line_offset,
        text_offset,
    }))
}

pub fn add_elevation(s: &mut Scheme, anchor: ElevationAnchor) -> Result<ElevationId, EditError> {
    match anchor {
        ElevationAnchor::OnPipe { pipe, t } => check_target(s, &MarkTarget::Pipe { pipe, t })?,
        ElevationAnchor::Block(b) => {
            s.block(b)?;
        }
    }
    let o = &s.settings.objects;
    Ok(s.elevations.insert(ElevationMark {
        anchor,
        ext_axis: o.elev_ext_axis,
        shelf_dir: o.elev_shelf_dir,
        arrow_shift: o.elev_arrow_shift,
        shelf_shift: o.elev_shelf_shift,
        line_type: o.elev_line_type,
    }))
}

pub fn add_slope_mark(
    s: &mut Scheme,
    pipe: PipeId,
    t: f64,
    shift: Option<f64>,
    format: Option<SlopeFormat>,
) -> Result<SlopeId, EditError> {
    check_target(s, &MarkTarget::Pipe { pipe, t })?;
    let o = &s.settings.objects;
    Ok(s.slopes.insert(SlopeMark {
        pipe,
        t,
        shift: shift.unwrap_or(o.slope_shift),
        format: format.unwrap_or(o.slope_format),
    }))
}

pub fn set_grid(s: &mut Scheme, grid: AxisGrid) -> Result<(), EditError> {
    if grid.x_count() == 0 && grid.y_count() == 0 {
        return Err(invalid("grid without axes"));
    }
    if grid.x_groups.iter().chain(&grid.y_groups).any(|g| g.count == 0 || !(g.step > 0.0)) {
        return Err(invalid("axis groups need a positive count and step"));
    }
    for (set, n) in [(&grid.visible_x, grid.x_count()), (&grid.visible_y, grid.y_count())] {
        if set.as_ref().is_some_and(|v| v.iter().any(|i| *i == 0 || *i > n)) {
            return Err(invalid(format!("visible axis index outside 1..={n}")));
        }
    }
    s.grid = Some(grid);
    Ok(())
}

/// The grid is deleted only as a whole.
pub fn delete_grid(s: &mut Scheme) -> bool {
    s.grid.take().is_some()
}
