//! Scheme settings: object defaults and working-mode settings.
//!
//! Every field is also reachable by a stable dotted key through
//! [`FIELDS`]; both file formats and the command line go through it.

use super::types::*;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSettings {
    /// X axes are labelled with digits (Y axes then get letters).
    pub digits_label_x: bool,
    pub plane_z: f64,
    /// Z shift of label risers that bend up or down (paper mm).
    pub bend_shift_z: f64,
    pub dim_offset_x: f64,
    pub dim_offset_y: f64,
    pub lead_len_x: f64,
    pub lead_len_y: f64,
    pub first_number: u32,
    pub first_letter: char,
    pub overall_dim_x: bool,
    pub overall_dim_y: bool,
    pub dir_positive_x: bool,
    pub dir_positive_y: bool,
    /// Labels sit at the first (true) or last visible axis of the other direction.
    pub labels_at_first: bool,
    pub color: u8,
    pub font: FontSetting,
    pub bubble_diameter: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            digits_label_x: true,
            plane_z: 0.0,
            bend_shift_z: 0.0,
            dim_offset_x: 10.0,
            dim_offset_y: 10.0,
            lead_len_x: 10.0,
            lead_len_y: 10.0,
            first_number: 1,
            first_letter: 'А',
            overall_dim_x: false,
            overall_dim_y: false,
            dir_positive_x: true,
            dir_positive_y: true,
            labels_at_first: true,
            color: 8,
            font: FontSetting::new("GOST", 5.0),
            bubble_diameter: 8.0,
        }
    }
}

/// Defaults applied when objects are added, plus scheme-wide object settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSettings {
    pub pipe_style: LineStyle,
    pub joint_kind: JointKind,

    pub break_paper_len: f64,
    pub break_label_axial: f64,
    pub break_label_normal: f64,
    pub break_dot_step: f64,
    pub break_wave_diameter: f64,
    pub break_font: FontSetting,

    pub block_stretch: f64,
    pub block_style: LineStyle,

    pub text_font: FontSetting,
    pub text_color: u8,
    pub text_line_step: f64,
    pub text_shelf_from: ShelfFrom,
    pub text_second_shelf: bool,

    pub mark_font: FontSetting,
    pub mark_color: u8,
    pub mark_line_step: f64,
    pub mark_shelf_from: ShelfFrom,

    pub dim_font: FontSetting,
    pub dim_arrow_len: f64,
    pub dim_ext_overshoot: f64,
    pub dim_precision: u8,
    pub dim_color: u8,
    pub dim_text_offset: f64,

    pub elev_line_type: LineType,
    pub elev_ext_axis: PlanAxis,
    pub elev_shelf_dir: PlanDir,
    pub elev_arrow_shift: f64,
    pub elev_shelf_shift: f64,
    pub elev_font: FontSetting,
    pub elev_arrow_len: f64,
    pub elev_color: u8,

    pub slope_shift: f64,
    pub slope_format: SlopeFormat,
    pub slope_font: FontSetting,
    pub slope_arrow_len: f64,
    pub slope_arrow_wing: f64,
    pub slope_color: u8,

    pub grid: GridSettings,

    /// Default number of positions in a flange-joint position mark.
    pub flange_positions: u8,
}

impl Default for ObjectSettings {
    fn default() -> Self {
        let small = FontSetting::new("GOST", 2.5);
        ObjectSettings {
            pipe_style: LineStyle::new(7, LineType::Solid),
            joint_kind: JointKind::Butt,
            break_paper_len: 10.0,
            break_label_axial: 2.0,
            break_label_normal: 3.0,
            break_dot_step: 1.5,
            break_wave_diameter: 4.0,
            break_font: FontSetting::default(),
            block_stretch: 1.0,
            block_style: LineStyle::new(7, LineType::Solid),
            text_font: FontSetting::default(),
            text_color: 7,
            text_line_step: 5.0,
            text_shelf_from: ShelfFrom::Start,
            text_second_shelf: true,
            mark_font: FontSetting::default(),
            mark_color: 7,
            mark_line_step: 5.0,
            mark_shelf_from: ShelfFrom::Start,
            dim_font: small.clone(),
            dim_arrow_len: 2.5,
            dim_ext_overshoot: 2.0,
            dim_precision: 0,
            dim_color: 7,
            dim_text_offset: 1.0,
            elev_line_type: LineType::Solid,
            elev_ext_axis: PlanAxis::X,
            elev_shelf_dir: PlanDir::XPos,
            elev_arrow_shift: 5.0,
            elev_shelf_shift: 5.0,
            elev_font: small.clone(),
            elev_arrow_len: 3.0,
            elev_color: 7,
            slope_shift: 5.0,
            slope_format: SlopeFormat::default(),
            slope_font: small,
            slope_arrow_len: 10.0,
            slope_arrow_wing: 1.5,
            slope_color: 7,
            grid: GridSettings::default(),
            flange_positions: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visibility {
    pub pipes: bool,
    pub joints: bool,
    pub breaks: bool,
    pub blocks: bool,
    /// Texts together with all their leaders.
    pub texts: bool,
    pub marks: bool,
    pub dimensions: bool,
    pub elevations: bool,
    pub slopes: bool,
    pub grid: bool,
    pub axes_picture: bool,
    pub occlusion: bool,
    pub break_letters: bool,
    /// Pipes fully hidden by blocks and fillets.
    pub covered_pipes: bool,
    pub hidden_marks: bool,
}

impl Default for Visibility {
    fn default() -> Self {
        Visibility {
            pipes: true,
            joints: true,
            breaks: true,
            blocks: true,
            texts: true,
            marks: true,
            dimensions: true,
            elevations: true,
            slopes: true,
            grid: true,
            axes_picture: true,
            occlusion: true,
            break_letters: true,
            covered_pipes: false,
            hidden_marks: false,
        }
    }
}

/// Working-mode settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSettings {
    /// Length of the gaps showing pipes passing behind each other (paper mm).
    pub occlusion_gap_len: f64,
    pub param_file: String,
    /// Name of the current projection in the catalog.
    pub projection: String,
    /// Height layer `(z_min, z_max)`; `None` selects the whole scheme.
    pub slice: Option<(f64, f64)>,
    pub visibility: Visibility,
    pub work_temperature: Option<f64>,
    pub work_pressure: Option<f64>,
    pub autonumber: bool,
    /// Extended (order-sheet) property set is stored and edited.
    pub spec_extended: bool,
    /// Paper mm per nature mm.
    pub scale: f64,
}

impl Default for ModeSettings {
    fn default() -> Self {
        ModeSettings {
            occlusion_gap_len: 3.0,
            param_file: String::new(),
            projection: "isometric".to_string(),
            slice: None,
            visibility: Visibility::default(),
            work_temperature: None,
            work_pressure: None,
            autonumber: true,
            spec_extended: false,
            scale: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Settings {
    pub objects: ObjectSettings,
    pub mode: ModeSettings,
}

impl Settings {
    pub fn to_paper(&self, nature: f64) -> f64 {
        nature * self.mode.scale
    }

    pub fn to_nature(&self, paper: f64) -> f64 {
        paper / self.mode.scale
    }
}

/// Dynamically typed settings value.
#[derive(Debug, Clone, PartialEq)]
pub enum SettingValue {
    F64(f64),
    U8(u8),
    U32(u32),
    Bool(bool),
    Str(String),
    Char(char),
    Font(FontSetting),
    Style(LineStyle),
    LineType(LineType),
    Joint(JointKind),
    Shelf(ShelfFrom),
    Slope(SlopeFormat),
    PlanAxis(PlanAxis),
    PlanDir(PlanDir),
    OptF64(Option<f64>),
    Slice(Option<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    F64,
    U8,
    U32,
    Bool,
    Str,
    Char,
    Font,
    Style,
    LineType,
    Joint,
    Shelf,
    Slope,
    PlanAxis,
    PlanDir,
    OptF64,
    Slice,
}

impl SettingValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            SettingValue::F64(_) => ValueKind::F64,
            SettingValue::U8(_) => ValueKind::U8,
            SettingValue::U32(_) => ValueKind::U32,
            SettingValue::Bool(_) => ValueKind::Bool,
            SettingValue::Str(_) => ValueKind::Str,
            SettingValue::Char(_) => ValueKind::Char,
            SettingValue::Font(_) => ValueKind::Font,
            SettingValue::Style(_) => ValueKind::Style,
            SettingValue::LineType(_) => ValueKind::LineType,
            SettingValue::Joint(_) => ValueKind::Joint,
            SettingValue::Shelf(_) => ValueKind::Shelf,
            SettingValue::Slope(_) => ValueKind::Slope,
            SettingValue::PlanAxis(_) => ValueKind::PlanAxis,
            SettingValue::PlanDir(_) => ValueKind::PlanDir,
            SettingValue::OptF64(_) => ValueKind::OptF64,
            SettingValue::Slice(_) => ValueKind::Slice,
        }
    }
}

/// One addressable settings field.
pub struct Field {
    pub key: &'static str,
    pub kind: ValueKind,
    pub get: fn(&Settings) -> SettingValue,
    /// Returns `false` when the value has the wrong kind.
    pub set: fn(&mut Settings, SettingValue) -> bool,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("key", &self.key)
            .field("kind", &self.kind)
            .finish()
    }
}

macro_rules! settings_fields {
    ($( $key:literal => $variant:ident : $first:ident $(. $rest:ident)* ;)*) => {
        /// Every settings field in its fixed serialization order.
        ///
        /// New fields are only ever appended; the order is part of the
        /// binary format.
        pub const FIELDS: &[Field] = &[
            $(
                Field {
                    key: $key,
                    kind: ValueKind::$variant,
                    get: |s| SettingValue::$variant(s.$first$(.$rest)*.clone()),
                    set: |s, v| match v {
                        SettingValue::$variant(x) => {
                            s.$first$(.$rest)* = x;
                            true
                        }
                        _ => false,
                    },
                },
            )*
        ];
    };
}

settings_fields! {
    "pipe.style" => Style: objects.pipe_style;
    "joint.kind" => Joint: objects.joint_kind;
    "break.paper_len" => F64: objects.break_paper_len;
    "break.label_axial" => F64: objects.break_label_axial;
    "break.label_normal" => F64: objects.break_label_normal;
    "break.dot_step" => F64: objects.break_dot_step;
    "break.wave_diameter" => F64: objects.break_wave_diameter;
    "break.font" => Font: objects.break_font;
    "block.stretch" => F64: objects.block_stretch;
    "block.style" => Style: objects.block_style;
    "text.font" => Font: objects.text_font;
    "text.color" => U8: objects.text_color;
    "text.line_step" => F64: objects.text_line_step;
    "text.shelf_from" => Shelf: objects.text_shelf_from;
    "text.second_shelf" => Bool: objects.text_second_shelf;
    "mark.font" => Font: objects.mark_font;
    "mark.color" => U8: objects.mark_color;
    "mark.line_step" => F64: objects.mark_line_step;
    "mark.shelf_from" => Shelf: objects.mark_shelf_from;
    "dim.font" => Font: objects.dim_font;
    "dim.arrow_len" => F64: objects.dim_arrow_len;
    "dim.ext_overshoot" => F64: objects.dim_ext_overshoot;
    "dim.precision" => U8: objects.dim_precision;
    "dim.color" => U8: objects.dim_color;
    "dim.text_offset" => F64: objects.dim_text_offset;
    "elev.line_type" => LineType: objects.elev_line_type;
    "elev.ext_axis" => PlanAxis: objects.elev_ext_axis;
    "elev.shelf_dir" => PlanDir: objects.elev_shelf_dir;
    "elev.arrow_shift" => F64: objects.elev_arrow_shift;
    "elev.shelf_shift" => F64: objects.elev_shelf_shift;
    "elev.font" => Font: objects.elev_font;
    "elev.arrow_len" => F64: objects.elev_arrow_len;
    "elev.color" => U8: objects.elev_color;
    "slope.shift" => F64: objects.slope_shift;
    "slope.format" => Slope: objects.slope_format;
    "slope.font" => Font: objects.slope_font;
    "slope.arrow_len" => F64: objects.slope_arrow_len;
    "slope.arrow_wing" => F64: objects.slope_arrow_wing;
    "slope.color" => U8: objects.slope_color;
    "grid.digits_label_x" => Bool: objects.grid.digits_label_x;
    "grid.plane_z" => F64: objects.grid.plane_z;
    "grid.bend_shift_z" => F64: objects.grid.bend_shift_z;
    "grid.dim_offset_x" => F64: objects.grid.dim_offset_x;
    "grid.dim_offset_y" => F64: objects.grid.dim_offset_y;
    "grid.lead_len_x" => F64: objects.grid.lead_len_x;
    "grid.lead_len_y" => F64: objects.grid.lead_len_y;
    "grid.first_number" => U32: objects.grid.first_number;
    "grid.first_letter" => Char: objects.grid.first_letter;
    "grid.overall_dim_x" => Bool: objects.grid.overall_dim_x;
    "grid.overall_dim_y" => Bool: objects.grid.overall_dim_y;
    "grid.dir_positive_x" => Bool: objects.grid.dir_positive_x;
    "grid.dir_positive_y" => Bool: objects.grid.dir_positive_y;
    "grid.labels_at_first" => Bool: objects.grid.labels_at_first;
    "grid.color" => U8: objects.grid.color;
    "grid.font" => Font: objects.grid.font;
    "grid.bubble_diameter" => F64: objects.grid.bubble_diameter;
    "flange.positions" => U8: objects.flange_positions;
    "mode.occlusion_gap" => F64: mode.occlusion_gap_len;
    "mode.param_file" => Str: mode.param_file;
    "mode.projection" => Str: mode.projection;
    "mode.slice" => Slice: mode.slice;
    "show.pipes" => Bool: mode.visibility.pipes;
    "show.joints" => Bool: mode.visibility.joints;
    "show.breaks" => Bool: mode.visibility.breaks;
    "show.blocks" => Bool: mode.visibility.blocks;
    "show.texts" => Bool: mode.visibility.texts;
    "show.marks" => Bool: mode.visibility.marks;
    "show.dimensions" => Bool: mode.visibility.dimensions;
    "show.elevations" => Bool: mode.visibility.elevations;
    "show.slopes" => Bool: mode.visibility.slopes;
    "show.grid" => Bool: mode.visibility.grid;
    "show.axes_picture" => Bool: mode.visibility.axes_picture;
    "show.occlusion" => Bool: mode.visibility.occlusion;
    "show.break_letters" => Bool: mode.visibility.break_letters;
    "show.covered_pipes" => Bool: mode.visibility.covered_pipes;
    "show.hidden_marks" => Bool: mode.visibility.hidden_marks;
    "filter.work_temperature" => OptF64: mode.work_temperature;
    "filter.work_pressure" => OptF64: mode.work_pressure;
    "mode.autonumber" => Bool: mode.autonumber;
    "mode.spec_extended" => Bool: mode.spec_extended;
    "mode.scale" => F64: mode.scale;
}

pub fn field(key: &str) -> Option<&'static Field> {
    FIELDS.iter().find(|f| f.key == key)
}
