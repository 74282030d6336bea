//! Object records of a scheme document.
//!
//! Lengths are millimetres. Fields documented as "nature" are model-space
//! millimetres; "paper" fields are sheet-space millimetres. The two are
//! related by `paper = nature * Settings::mode.scale`.

use std::collections::BTreeSet;
use std::fmt;

use super::ids::*;
use super::{Vec2, Vec3};

/// Number of entries in the colour palette.
pub const PALETTE_SIZE: u8 = 16;

/// Distance below which two points are the same point (nature mm).
pub const MERGE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn unit(self) -> Vec3 {
        let mut v = Vec3::zeros();
        v[self.index()] = 1.0;
        v
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum LineType {
    #[default]
    Solid,
    Dashed,
    DashDot,
    Dotted,
}

impl LineType {
    pub const ALL: [LineType; 4] = [
        LineType::Solid,
        LineType::Dashed,
        LineType::DashDot,
        LineType::Dotted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LineType::Solid => "solid",
            LineType::Dashed => "dashed",
            LineType::DashDot => "dash-dot",
            LineType::Dotted => "dotted",
        }
    }

    pub fn from_name(s: &str) -> Option<LineType> {
        LineType::ALL.into_iter().find(|t| t.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineStyle {
    /// Palette index, `< PALETTE_SIZE`.
    pub color: u8,
    pub line_type: LineType,
}

impl LineStyle {
    pub const fn new(color: u8, line_type: LineType) -> Self {
        LineStyle { color, line_type }
    }
}

impl Default for LineStyle {
    fn default() -> Self {
        LineStyle::new(7, LineType::Solid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pipe {
    pub start: PointId,
    pub end: PointId,
    pub style: LineStyle,
}

impl Pipe {
    pub fn has_endpoint(&self, p: PointId) -> bool {
        self.start == p || self.end == p
    }

    /// The endpoint opposite to `p`, if `p` is an endpoint.
    pub fn other_end(&self, p: PointId) -> Option<PointId> {
        if self.start == p {
            Some(self.end)
        } else if self.end == p {
            Some(self.start)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointKind {
    Butt,
    /// Fillet of the given radius (nature mm).
    Fillet { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub pipe_a: PipeId,
    pub pipe_b: PipeId,
    pub kind: JointKind,
}

impl Joint {
    /// Unordered pipe pair, smaller id first.
    pub fn pair(&self) -> (PipeId, PipeId) {
        if self.pipe_a <= self.pipe_b {
            (self.pipe_a, self.pipe_b)
        } else {
            (self.pipe_b, self.pipe_a)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OffsetKind {
    /// Everything strictly on the `ort` side of the plane `axis = plane_coord` moves.
    General { axis: Axis, plane_coord: f64 },
    /// An explicit displaced side, separated from the rest by the offset's breaks.
    Local { displaced_points: BTreeSet<PointId> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Offset {
    pub letter: String,
    /// Unit direction from the fixed side into the displaced side.
    pub ort: Vec3,
    /// Positive stretches, negative compresses (nature mm).
    pub magnitude: f64,
    pub kind: OffsetKind,
}

impl Offset {
    pub fn is_general(&self) -> bool {
        matches!(self.kind, OffsetKind::General { .. })
    }

    pub fn is_compression(&self) -> bool {
        self.magnitude < 0.0
    }

    pub fn shift(&self) -> Vec3 {
        self.ort * self.magnitude
    }

    /// Whether the stored point `id` at `p` lies on the displaced side.
    ///
    /// General offsets move points strictly on the `ort` side of the plane;
    /// points on the plane itself stay fixed.
    pub fn displaces(&self, id: PointId, p: &Vec3) -> bool {
        match &self.kind {
            OffsetKind::General { axis, plane_coord } => {
                let i = axis.index();
                (p[i] - plane_coord) * self.ort[i].signum() > MERGE_EPS
            }
            OffsetKind::Local { displaced_points } => displaced_points.contains(&id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BreakGlyph {
    #[default]
    Dots,
    Waves,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakLine {
    pub pipe: PipeId,
    pub offset: OffsetId,
    /// Drawn length of a compression break (paper mm).
    pub paper_len: f64,
    /// General offsets: shift of the break centre from the plane along `ort`.
    /// Local offsets: position on the pipe measured from its start (nature mm).
    pub placement: f64,
    pub label_shift_axial: f64,
    pub label_shift_normal: f64,
    pub glyph: BreakGlyph,
}

/// One stroke of a library symbol, in the symbol's local frame (paper mm).
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolStroke {
    Line { a: Vec2, b: Vec2 },
    Arc {
        center: Vec2,
        radius: f64,
        start_deg: f64,
        sweep_deg: f64,
    },
}

impl SymbolStroke {
    /// Points bounding the stroke, for extent computations.
    pub fn extent_points(&self) -> Vec<Vec2> {
        match self {
            SymbolStroke::Line { a, b } => vec![*a, *b],
            SymbolStroke::Arc { center, radius, .. } => vec![
                center - Vec2::new(*radius, *radius),
                center + Vec2::new(*radius, *radius),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attach {
    Axial,
    Angular,
    Tee,
}

impl Attach {
    pub fn legs(self) -> usize {
        match self {
            Attach::Axial => 1,
            Attach::Angular => 2,
            Attach::Tee => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Attach::Axial => "axial",
            Attach::Angular => "angular",
            Attach::Tee => "tee",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDef {
    pub name: String,
    pub graphics: Vec<SymbolStroke>,
    pub attach: Attach,
    /// Pipe length hidden by the symbol, one entry per attached leg (paper mm).
    pub cut_lengths: Vec<f64>,
    pub sym_axis: bool,
    pub sym_normal: bool,
    pub stretch_default: f64,
}

impl SymbolDef {
    /// Axis-aligned bounds of the graphics as `(min, max)`.
    pub fn bounds(&self) -> Option<(Vec2, Vec2)> {
        let mut pts = self.graphics.iter().flat_map(|s| s.extent_points());
        let first = pts.next()?;
        Some(pts.fold((first, first), |(lo, hi), p| {
            (
                Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }
}

/// Spatial direction the block's Y+ makes an acute angle with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpDir {
    XPos,
    XNeg,
    YPos,
    YNeg,
    ZPos,
    ZNeg,
    Pipe2,
    Pipe3,
}

impl UpDir {
    pub const ALL: [UpDir; 8] = [
        UpDir::XPos,
        UpDir::XNeg,
        UpDir::YPos,
        UpDir::YNeg,
        UpDir::ZPos,
        UpDir::ZNeg,
        UpDir::Pipe2,
        UpDir::Pipe3,
    ];

    /// Direction for the six signed coordinate axes.
    pub fn axis_vector(self) -> Option<Vec3> {
        let v = match self {
            UpDir::XPos => Vec3::x(),
            UpDir::XNeg => -Vec3::x(),
            UpDir::YPos => Vec3::y(),
            UpDir::YNeg => -Vec3::y(),
            UpDir::ZPos => Vec3::z(),
            UpDir::ZNeg => -Vec3::z(),
            UpDir::Pipe2 | UpDir::Pipe3 => return None,
        };
        Some(v)
    }

    pub fn is_negative_axis(self) -> bool {
        matches!(self, UpDir::XNeg | UpDir::YNeg | UpDir::ZNeg)
    }

    pub fn name(self) -> &'static str {
        match self {
            UpDir::XPos => "x+",
            UpDir::XNeg => "x-",
            UpDir::YPos => "y+",
            UpDir::YNeg => "y-",
            UpDir::ZPos => "z+",
            UpDir::ZNeg => "z-",
            UpDir::Pipe2 => "pipe2",
            UpDir::Pipe3 => "pipe3",
        }
    }

    pub fn from_name(s: &str) -> Option<UpDir> {
        UpDir::ALL.into_iter().find(|u| u.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub symbol: SymbolId,
    pub pipe: PipeId,
    pub pipe2: Option<PipeId>,
    pub pipe3: Option<PipeId>,
    pub style: LineStyle,
    /// Distance of the attachment point from the host pipe start (nature mm).
    pub dist_from_start: f64,
    /// `false`: block X+ runs from pipe start to end; `true`: reversed.
    pub flip: bool,
    pub updir: UpDir,
    pub stretch: f64,
}

impl Block {
    pub fn attached_pipes(&self) -> impl Iterator<Item = PipeId> + '_ {
        std::iter::once(self.pipe).chain(self.pipe2).chain(self.pipe3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FontSetting {
    pub face: String,
    /// Character height (paper mm).
    pub height: f64,
    pub width_factor: f64,
    pub slant: bool,
}

impl FontSetting {
    pub fn new(face: &str, height: f64) -> Self {
        FontSetting {
            face: face.to_string(),
            height,
            width_factor: 1.0,
            slant: false,
        }
    }

    /// Advance width of one character under the box model (paper mm).
    pub fn char_width(&self) -> f64 {
        0.6 * self.height * self.width_factor
    }
}

impl Default for FontSetting {
    fn default() -> Self {
        FontSetting::new("GOST", 3.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeaderRef {
    Pipe(PipeLeaderId),
    Block(BlockLeaderId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SlopeKind {
    Angle,
    Ratio,
    #[default]
    Percent,
}

impl SlopeKind {
    pub fn name(self) -> &'static str {
        match self {
            SlopeKind::Angle => "angle",
            SlopeKind::Ratio => "ratio",
            SlopeKind::Percent => "percent",
        }
    }

    pub fn from_name(s: &str) -> Option<SlopeKind> {
        [SlopeKind::Angle, SlopeKind::Ratio, SlopeKind::Percent]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

/// How a slope value is printed: angle, ratio or percent with a number of decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlopeFormat {
    pub kind: SlopeKind,
    pub precision: u8,
}

impl SlopeFormat {
    pub const fn new(kind: SlopeKind, precision: u8) -> Self {
        SlopeFormat { kind, precision }
    }
}

impl Default for SlopeFormat {
    fn default() -> Self {
        SlopeFormat::new(SlopeKind::Percent, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ShelfFrom {
    #[default]
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Text {
    /// Lines with special symbols stored as named escapes, see [`super::rich`].
    pub lines: Vec<String>,
    pub font: FontSetting,
    pub line_step: f64,
    pub color: u8,
    /// From the main leader's indicated point to the text origin (nature mm).
    pub offset_vec: Vec2,
    pub main_leader: LeaderRef,
    pub shelf_from: ShelfFrom,
    pub slope_format: Option<SlopeFormat>,
}

impl Text {
    pub fn has_slope_symbol(&self) -> bool {
        self.lines.iter().any(|l| super::rich::contains_slope_symbol(l))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderToPipe {
    pub text: TextId,
    pub pipe: PipeId,
    /// Position on the pipe from its start (nature mm).
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderToBlock {
    pub text: TextId,
    pub block: BlockId,
    /// End point on the symbol's library image (paper mm).
    pub anchor: Vec2,
}

/// Where a leader-like annotation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkTarget {
    Pipe { pipe: PipeId, t: f64 },
    Block { block: BlockId, anchor: Vec2 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionMark {
    pub target: MarkTarget,
    /// 1..=8 specification entries.
    pub props: Vec<SpecPropsId>,
    pub font: FontSetting,
    pub line_step: f64,
    pub color: u8,
    pub offset_vec: Vec2,
    pub shelf_from: ShelfFrom,
    pub visible: bool,
}

pub const MAX_MARK_PROPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecObject {
    ForPipe,
    ForBlock { qty: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasicProps {
    pub designation: String,
    pub name: String,
    pub unit_mass_kg: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtendedProps {
    pub type_mark: String,
    pub name_and_spec: String,
    pub unit_name: String,
    pub manufacturer: String,
    pub equipment_code: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecProps {
    pub position: u32,
    pub object: SpecObject,
    pub basic: BasicProps,
    pub extended: Option<ExtendedProps>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DimPoint {
    Spatial(PointId),
    BlockAnchor(BlockId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DimDir {
    Axis(Axis),
    AlongPipe(PipeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub points: Vec<DimPoint>,
    pub ext_axis: Axis,
    pub dim_dir: DimDir,
    /// Dimension line offset from the first point (paper mm).
    pub line_offset: f64,
    /// Text offset from the dimension line (paper mm).
    pub text_offset: f64,
}

/// Indicated point of an elevation mark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElevationAnchor {
    OnPipe { pipe: PipeId, t: f64 },
    Block(BlockId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanAxis {
    X,
    Y,
}

impl PlanAxis {
    pub fn axis(self) -> Axis {
        match self {
            PlanAxis::X => Axis::X,
            PlanAxis::Y => Axis::Y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanDir {
    XPos,
    XNeg,
    YPos,
    YNeg,
}

impl PlanDir {
    pub const ALL: [PlanDir; 4] = [PlanDir::XPos, PlanDir::XNeg, PlanDir::YPos, PlanDir::YNeg];

    pub fn vector(self) -> Vec3 {
        match self {
            PlanDir::XPos => Vec3::x(),
            PlanDir::XNeg => -Vec3::x(),
            PlanDir::YPos => Vec3::y(),
            PlanDir::YNeg => -Vec3::y(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlanDir::XPos => "x+",
            PlanDir::XNeg => "x-",
            PlanDir::YPos => "y+",
            PlanDir::YNeg => "y-",
        }
    }

    pub fn from_name(s: &str) -> Option<PlanDir> {
        PlanDir::ALL.into_iter().find(|d| d.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElevationMark {
    pub anchor: ElevationAnchor,
    pub ext_axis: PlanAxis,
    pub shelf_dir: PlanDir,
    pub arrow_shift: f64,
    pub shelf_shift: f64,
    pub line_type: LineType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeMark {
    pub pipe: PipeId,
    pub t: f64,
    /// Signed distance from the pipe to the middle of the mark (paper mm).
    pub shift: f64,
    pub format: SlopeFormat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGroup {
    pub count: u32,
    /// Axis spacing within the group (nature mm).
    pub step: f64,
}

/// Building grid imported from the plan. A single object: deleted only whole.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisGrid {
    pub x_groups: Vec<AxisGroup>,
    pub y_groups: Vec<AxisGroup>,
    /// 1-based indices of the drawn X axes; `None` draws all.
    pub visible_x: Option<BTreeSet<u32>>,
    pub visible_y: Option<BTreeSet<u32>>,
}

impl AxisGrid {
    pub fn x_count(&self) -> u32 {
        self.x_groups.iter().map(|g| g.count).sum()
    }

    pub fn y_count(&self) -> u32 {
        self.y_groups.iter().map(|g| g.count).sum()
    }

    /// Axis coordinates before the grid direction is applied.
    ///
    /// The first axis sits at 0; every further axis lies one step of its
    /// own group after the previous axis.
    pub fn positions(groups: &[AxisGroup]) -> Vec<f64> {
        let mut out = Vec::new();
        let mut at = 0.0;
        for group in groups {
            for _ in 0..group.count {
                if !out.is_empty() {
                    at += group.step;
                }
                out.push(at);
            }
        }
        out
    }

    pub fn is_x_visible(&self, index: u32) -> bool {
        self.visible_x.as_ref().is_none_or(|s| s.contains(&index))
    }

    pub fn is_y_visible(&self, index: u32) -> bool {
        self.visible_y.as_ref().is_none_or(|s| s.contains(&index))
    }
}
