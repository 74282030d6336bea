//! Referential integrity and per-object invariants.
//!
//! The cross-object legality calculus (offset separation, dimension
//! orientation) lives in [`crate::constraints`]; this check covers what
//! every stored object must satisfy on its own plus identifier resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ids::*;
use super::scheme::Scheme;
use super::types::*;
use super::{Subject, Vec2};
use crate::constraints::{self, BlockTemplate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntegrityRule {
    DanglingReference,
    NonFinite,
    CoincidentPoints,
    ZeroLengthPipe,
    PipeOverlap,
    PaletteIndex,
    JointSamePipe,
    JointNoSharedEndpoint,
    DuplicateJoint,
    BadFillet,
    DuplicateLetter,
    OrtNotUnit,
    ZeroMagnitude,
    OrtNotPlaneNormal,
    BreakPipeUnaffected,
    WavesOnStretch,
    BadSymbol,
    BlockDistOutsidePipe,
    BlockAttachedPipes,
    BlockOrientation,
    BadStretch,
    TextWithoutLeader,
    TextMainLeader,
    TextSlopeFormat,
    LeaderOutsidePipe,
    AnchorOutsideSymbol,
    MarkPropsCount,
    DuplicatePosition,
    PositionsNotDense,
    ExtendedPropsMismatch,
    BadQuantity,
    DimTooFewPoints,
    DimCoincidentPoints,
    DimParallelAxes,
    AnchorOutsidePipe,
    GridEmpty,
    GridVisibleRange,
    BadFont,
    BadSetting,
}

impl IntegrityRule {
    pub fn id(self) -> &'static str {
        use IntegrityRule::*;
        match self {
            DanglingReference => "dangling-reference",
            NonFinite => "non-finite",
            CoincidentPoints => "coincident-points",
            ZeroLengthPipe => "zero-length-pipe",
            PipeOverlap => "pipe-overlap",
            PaletteIndex => "palette-index",
            JointSamePipe => "joint-same-pipe",
            JointNoSharedEndpoint => "joint-no-shared-endpoint",
            DuplicateJoint => "duplicate-joint",
            BadFillet => "bad-fillet",
            DuplicateLetter => "duplicate-letter",
            OrtNotUnit => "ort-not-unit",
            ZeroMagnitude => "zero-magnitude",
            OrtNotPlaneNormal => "ort-not-plane-normal",
            BreakPipeUnaffected => "break-pipe-unaffected",
            WavesOnStretch => "waves-on-stretch",
            BadSymbol => "bad-symbol",
            BlockDistOutsidePipe => "block-dist-outside-pipe",
            BlockAttachedPipes => "block-attached-pipes",
            BlockOrientation => "block-orientation",
            BadStretch => "bad-stretch",
            TextWithoutLeader => "text-without-leader",
            TextMainLeader => "text-main-leader",
            TextSlopeFormat => "text-slope-format",
            LeaderOutsidePipe => "leader-outside-pipe",
            AnchorOutsideSymbol => "anchor-outside-symbol",
            MarkPropsCount => "mark-props-count",
            DuplicatePosition => "duplicate-position",
            PositionsNotDense => "positions-not-dense",
            ExtendedPropsMismatch => "extended-props-mismatch",
            BadQuantity => "bad-quantity",
            DimTooFewPoints => "dim-too-few-points",
            DimCoincidentPoints => "dim-coincident-points",
            DimParallelAxes => "dim-parallel-axes",
            AnchorOutsidePipe => "anchor-outside-pipe",
            GridEmpty => "grid-empty",
            GridVisibleRange => "grid-visible-range",
            BadFont => "bad-font",
            BadSetting => "bad-setting",
        }
    }
}

/// One integrity violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub subject: Subject,
    pub rule: IntegrityRule,
    pub note: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.subject, self.rule.id(), self.note)
    }
}

struct Checker<'a> {
    s: &'a Scheme,
    out: Vec<Issue>,
}

const LEN_EPS: f64 = 1e-6;

impl<'a> Checker<'a> {
    fn push(&mut self, subject: Subject, rule: IntegrityRule, note: impl Into<String>) {
        self.out.push(Issue {
            subject,
            rule,
            note: note.into(),
        });
    }

    fn dangling(&mut self, subject: Subject, what: impl fmt::Display) {
        self.push(
            subject,
            IntegrityRule::DanglingReference,
            format!("references missing {what}"),
        );
    }

    fn color(&mut self, subject: Subject, c: u8) {
        if c >= PALETTE_SIZE {
            self.push(
                subject,
                IntegrityRule::PaletteIndex,
                format!("colour {c} outside palette of {PALETTE_SIZE}"),
            );
        }
    }

    fn font(&mut self, subject: Subject, f: &FontSetting) {
        if !(f.height > 0.0 && f.width_factor > 0.0) {
            self.push(subject, IntegrityRule::BadFont, "font height and width factor must be positive");
        }
    }

    fn finite(&mut self, subject: Subject, values: &[f64]) {
        if values.iter().any(|v| !v.is_finite()) {
            self.push(subject, IntegrityRule::NonFinite, "non-finite value");
        }
    }

    fn pipe_t(&mut self, subject: Subject, pipe: PipeId, t: f64, rule: IntegrityRule) -> bool {
        match self.s.pipe_length(pipe) {
            Ok(len) => {
                if !(t >= -LEN_EPS && t <= len + LEN_EPS) {
                    self.push(subject, rule, format!("position {t} outside pipe {pipe} of length {len}"));
                }
                true
            }
            Err(_) => {
                self.dangling(subject, pipe);
                false
            }
        }
    }

    fn block_anchor(&mut self, subject: Subject, block: BlockId, anchor: &Vec2) {
        let Some(b) = self.s.blocks.get(block) else {
            self.dangling(subject, block);
            return;
        };
        if let Some((lo, hi)) = self.s.symbols.get(b.symbol).and_then(|d| d.bounds()) {
            let eps = 1e-9;
            if anchor.x < lo.x - eps || anchor.y < lo.y - eps || anchor.x > hi.x + eps || anchor.y > hi.y + eps {
                self.push(
                    subject,
                    IntegrityRule::AnchorOutsideSymbol,
                    format!("anchor ({}, {}) outside symbol bounds", anchor.x, anchor.y),
                );
            }
        }
    }

    fn points(&mut self) {
        let pts: Vec<_> = self.s.points.iter().collect();
        for (id, p) in &pts {
            self.finite(Subject::Point(*id), &[p.x, p.y, p.z]);
        }
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.1.x.total_cmp(&b.1.x));
        for (i, (a, pa)) in sorted.iter().enumerate() {
            for (b, pb) in &sorted[i + 1..] {
                if pb.x - pa.x >= MERGE_EPS {
                    break;
                }
                if (*pa - *pb).norm() < MERGE_EPS {
                    self.push(
                        Subject::Point(*a.min(b)),
                        IntegrityRule::CoincidentPoints,
                        format!("coincides with {}", a.max(b)),
                    );
                }
            }
        }
    }

    fn pipes(&mut self) {
        let mut segments = Vec::new();
        for (id, pipe) in self.s.pipes.iter() {
            let subject = Subject::Pipe(id);
            self.color(subject, pipe.style.color);
            let (Ok(a), Ok(b)) = (self.s.point(pipe.start), self.s.point(pipe.end)) else {
                for p in [pipe.start, pipe.end] {
                    if !self.s.points.contains(p) {
                        self.dangling(subject, p);
                    }
                }
                continue;
            };
            if pipe.start == pipe.end || (a - b).norm() < MERGE_EPS {
                self.push(subject, IntegrityRule::ZeroLengthPipe, "pipe has zero length");
                continue;
            }
            segments.push((id, a, b));
        }
        for (i, (ia, a0, a1)) in segments.iter().enumerate() {
            for (ib, b0, b1) in &segments[i + 1..] {
                if constraints::segments_overlap(a0, a1, b0, b1) {
                    self.push(
                        Subject::Pipe(*ib),
                        IntegrityRule::PipeOverlap,
                        format!("overlaps {ia}"),
                    );
                }
            }
        }
    }

    fn joints(&mut self) {
        let mut pairs = BTreeSet::new();
        for (id, j) in self.s.joints.iter() {
            let subject = Subject::Joint(id);
            let (Some(a), Some(b)) = (self.s.pipes.get(j.pipe_a), self.s.pipes.get(j.pipe_b)) else {
                for p in [j.pipe_a, j.pipe_b] {
                    if !self.s.pipes.contains(p) {
                        self.dangling(subject, p);
                    }
                }
                continue;
            };
            if j.pipe_a == j.pipe_b {
                self.push(subject, IntegrityRule::JointSamePipe, "joins a pipe to itself");
                continue;
            }
            let shared = [a.start, a.end].iter().filter(|p| b.has_endpoint(**p)).count();
            if shared != 1 {
                self.push(
                    subject,
                    IntegrityRule::JointNoSharedEndpoint,
                    format!("pipes share {shared} endpoints, expected exactly one"),
                );
            }
            if let JointKind::Fillet { radius } = j.kind {
                if !(radius > 0.0 && radius.is_finite()) {
                    self.push(subject, IntegrityRule::BadFillet, "fillet radius must be positive");
                }
            }
            if !pairs.insert(j.pair()) {
                self.push(
                    subject,
                    IntegrityRule::DuplicateJoint,
                    format!("second joint between {} and {}", j.pipe_a, j.pipe_b),
                );
            }
        }
    }

    fn offsets(&mut self) {
        let mut letters = BTreeMap::new();
        for (id, o) in self.s.offsets.iter() {
            let subject = Subject::Offset(id);
            self.finite(subject, &[o.ort.x, o.ort.y, o.ort.z, o.magnitude]);
            if let Some(prev) = letters.insert(o.letter.clone(), id) {
                self.push(
                    subject,
                    IntegrityRule::DuplicateLetter,
                    format!("letter {:?} already used by {prev}", o.letter),
                );
            }
            if (o.ort.norm() - 1.0).abs() > 1e-9 {
                self.push(subject, IntegrityRule::OrtNotUnit, format!("|ort| = {}", o.ort.norm()));
            }
            if o.magnitude == 0.0 {
                self.push(subject, IntegrityRule::ZeroMagnitude, "offset magnitude is zero");
            }
            match &o.kind {
                OffsetKind::General { axis, .. } => {
                    if (o.ort.dot(&axis.unit()).abs() - 1.0).abs() > 1e-9 {
                        self.push(
                            subject,
                            IntegrityRule::OrtNotPlaneNormal,
                            format!("ort is not along the {axis} plane normal"),
                        );
                    }
                }
                OffsetKind::Local { displaced_points } => {
                    for p in displaced_points {
                        if !self.s.points.contains(*p) {
                            self.dangling(subject, p);
                        }
                    }
                }
            }
        }
    }

    fn breaks(&mut self) {
        for (id, b) in self.s.breaks.iter() {
            let subject = Subject::Break(id);
            self.finite(
                subject,
                &[b.paper_len, b.placement, b.label_shift_axial, b.label_shift_normal],
            );
            let Some(offset) = self.s.offsets.get(b.offset) else {
                self.dangling(subject, b.offset);
                continue;
            };
            let Ok(g) = self.s.pipe_geom(b.pipe) else {
                self.dangling(subject, b.pipe);
                continue;
            };
            if b.glyph == BreakGlyph::Waves && offset.magnitude >= 0.0 {
                self.push(subject, IntegrityRule::WavesOnStretch, "wave glyph on a stretch break");
            }
            let crosses = offset.displaces(g.start_id, &g.start) != offset.displaces(g.end_id, &g.end);
            let affected = match offset.kind {
                OffsetKind::General { .. } => crosses,
                OffsetKind::Local { .. } => {
                    crosses && b.placement >= -LEN_EPS && b.placement <= g.length() + LEN_EPS
                }
            };
            if !affected {
                self.push(
                    subject,
                    IntegrityRule::BreakPipeUnaffected,
                    format!("{} is not cut by offset {:?}", b.pipe, offset.letter),
                );
            }
        }
    }

    fn symbols(&mut self) {
        for (id, d) in self.s.symbols.iter() {
            let subject = Subject::Symbol(id);
            if d.graphics.is_empty() {
                self.push(subject, IntegrityRule::BadSymbol, "symbol has no graphics");
            }
            if d.cut_lengths.len() != d.attach.legs() {
                self.push(
                    subject,
                    IntegrityRule::BadSymbol,
                    format!("{} attachment needs {} cut lengths", d.attach.name(), d.attach.legs()),
                );
            }
            if d.cut_lengths.iter().any(|c| !(*c >= 0.0)) {
                self.push(subject, IntegrityRule::BadSymbol, "negative cut length");
            }
            if !(d.stretch_default > 0.0) {
                self.push(subject, IntegrityRule::BadStretch, "stretch must be positive");
            }
        }
    }

    fn blocks(&mut self) {
        for (id, b) in self.s.blocks.iter() {
            let subject = Subject::Block(id);
            self.color(subject, b.style.color);
            let Some(symbol) = self.s.symbols.get(b.symbol) else {
                self.dangling(subject, b.symbol);
                continue;
            };
            let mut resolved = true;
            for p in b.attached_pipes() {
                if !self.s.pipes.contains(p) {
                    self.dangling(subject, p);
                    resolved = false;
                }
            }
            if !resolved {
                continue;
            }
            if !(b.stretch > 0.0) {
                self.push(subject, IntegrityRule::BadStretch, "stretch must be positive");
            }
            self.pipe_t(subject, b.pipe, b.dist_from_start, IntegrityRule::BlockDistOutsidePipe);
            let needs2 = symbol.attach != Attach::Axial;
            let needs3 = symbol.attach == Attach::Tee;
            if b.pipe2.is_some() != needs2 || b.pipe3.is_some() != needs3 {
                self.push(
                    subject,
                    IntegrityRule::BlockAttachedPipes,
                    format!("{} attachment with wrong set of attached pipes", symbol.attach.name()),
                );
                continue;
            }
            let Ok(at) = self.s.block_point(id) else { continue };
            for p in b.pipe2.into_iter().chain(b.pipe3) {
                let touches = self
                    .s
                    .pipe_geom(p)
                    .map(|g| g.endpoint_at(&at).is_some())
                    .unwrap_or(false);
                if !touches || p == b.pipe {
                    self.push(
                        subject,
                        IntegrityRule::BlockAttachedPipes,
                        format!("{p} does not meet the host pipe at the attachment point"),
                    );
                }
            }
            let template = BlockTemplate::of(b);
            match constraints::enumerate_block_orientations(self.s, &template) {
                Ok(variants) => {
                    if !variants.contains(&(b.flip, b.updir)) {
                        self.push(
                            subject,
                            IntegrityRule::BlockOrientation,
                            format!("orientation (flip={}, {}) is not an admissible variant", b.flip, b.updir.name()),
                        );
                    }
                }
                Err(e) => self.push(subject, IntegrityRule::BlockOrientation, e.to_string()),
            }
        }
    }

    fn texts(&mut self) {
        let mut leaders: BTreeMap<TextId, Vec<LeaderRef>> = BTreeMap::new();
        for (id, l) in self.s.pipe_leaders.iter() {
            let subject = Subject::PipeLeader(id);
            if !self.s.texts.contains(l.text) {
                self.dangling(subject, l.text);
            }
            leaders.entry(l.text).or_default().push(LeaderRef::Pipe(id));
            self.pipe_t(subject, l.pipe, l.t, IntegrityRule::LeaderOutsidePipe);
        }
        for (id, l) in self.s.block_leaders.iter() {
            let subject = Subject::BlockLeader(id);
            if !self.s.texts.contains(l.text) {
                self.dangling(subject, l.text);
            }
            leaders.entry(l.text).or_default().push(LeaderRef::Block(id));
            self.block_anchor(subject, l.block, &l.anchor);
        }
        for (id, t) in self.s.texts.iter() {
            let subject = Subject::Text(id);
            self.color(subject, t.color);
            self.font(subject, &t.font);
            self.finite(subject, &[t.line_step, t.offset_vec.x, t.offset_vec.y]);
            let own = leaders.get(&id).map(Vec::as_slice).unwrap_or(&[]);
            if own.is_empty() {
                self.push(subject, IntegrityRule::TextWithoutLeader, "text has no leader");
            }
            if !own.contains(&t.main_leader) {
                self.push(
                    subject,
                    IntegrityRule::TextMainLeader,
                    "main leader is not one of the text's leaders",
                );
                continue;
            }
            let applicable = self.s.main_leader_pipe(t).is_some() && t.has_slope_symbol();
            if applicable != t.slope_format.is_some() {
                self.push(
                    subject,
                    IntegrityRule::TextSlopeFormat,
                    if applicable {
                        "slope text on a pipe without a slope format"
                    } else {
                        "slope format without a slope symbol on a pipe-led text"
                    },
                );
            }
        }
    }

    fn marks(&mut self) {
        for (id, m) in self.s.marks.iter() {
            let subject = Subject::Mark(id);
            self.color(subject, m.color);
            self.font(subject, &m.font);
            match m.target {
                MarkTarget::Pipe { pipe, t } => {
                    self.pipe_t(subject, pipe, t, IntegrityRule::LeaderOutsidePipe);
                }
                MarkTarget::Block { block, anchor } => self.block_anchor(subject, block, &anchor),
            }
            if m.props.is_empty() || m.props.len() > MAX_MARK_PROPS {
                self.push(
                    subject,
                    IntegrityRule::MarkPropsCount,
                    format!("{} positions, expected 1..={MAX_MARK_PROPS}", m.props.len()),
                );
            }
            for p in &m.props {
                if !self.s.spec_props.contains(*p) {
                    self.dangling(subject, p);
                }
            }
        }
        let mut positions = BTreeMap::new();
        let extended = self.s.settings.mode.spec_extended;
        for (id, p) in self.s.spec_props.iter() {
            let subject = Subject::SpecProps(id);
            if p.position == 0 {
                self.push(subject, IntegrityRule::DuplicatePosition, "position must be positive");
            }
            if let Some(prev) = positions.insert(p.position, id) {
                self.push(
                    subject,
                    IntegrityRule::DuplicatePosition,
                    format!("position {} already used by {prev}", p.position),
                );
            }
            if p.extended.is_some() != extended {
                self.push(
                    subject,
                    IntegrityRule::ExtendedPropsMismatch,
                    if extended {
                        "extended properties missing in extended mode"
                    } else {
                        "extended properties stored outside extended mode"
                    },
                );
            }
            if let SpecObject::ForBlock { qty } = p.object {
                if !(qty > 0.0 && qty.is_finite()) {
                    self.push(subject, IntegrityRule::BadQuantity, "quantity must be positive");
                }
            }
        }
        if self.s.settings.mode.autonumber {
            let dense = positions.keys().copied().eq(1..=positions.len() as u32);
            if !dense {
                self.push(
                    Subject::Scheme,
                    IntegrityRule::PositionsNotDense,
                    "autonumbered positions do not fill 1..K",
                );
            }
        }
    }

    fn dimensions(&mut self) {
        for (id, d) in self.s.dimensions.iter() {
            let subject = Subject::Dimension(id);
            self.finite(subject, &[d.line_offset, d.text_offset]);
            if d.points.len() < 2 {
                self.push(subject, IntegrityRule::DimTooFewPoints, "fewer than two dimension points");
            }
            let mut resolved = Vec::new();
            for p in &d.points {
                match self.s.dim_point_position(p) {
                    Ok(v) => resolved.push(v),
                    Err(e) => self.dangling(subject, e.to_string().trim_start_matches("unknown ")),
                }
            }
            if let DimDir::AlongPipe(p) = d.dim_dir {
                if !self.s.pipes.contains(p) {
                    self.dangling(subject, p);
                }
            }
            for i in 0..resolved.len() {
                for j in i + 1..resolved.len() {
                    if (resolved[i] - resolved[j]).norm() < MERGE_EPS {
                        self.push(
                            subject,
                            IntegrityRule::DimCoincidentPoints,
                            format!("dimension points {i} and {j} coincide"),
                        );
                    }
                }
            }
            let parallel = match d.dim_dir {
                DimDir::Axis(a) => a == d.ext_axis,
                DimDir::AlongPipe(p) => self
                    .s
                    .pipe_geom(p)
                    .map(|g| g.dir().cross(&d.ext_axis.unit()).norm() < 1e-9)
                    .unwrap_or(false),
            };
            if parallel {
                self.push(
                    subject,
                    IntegrityRule::DimParallelAxes,
                    "extension lines parallel to the dimension line",
                );
            }
        }
    }

    fn marks_on_pipes(&mut self) {
        for (id, e) in self.s.elevations.iter() {
            let subject = Subject::Elevation(id);
            self.finite(subject, &[e.arrow_shift, e.shelf_shift]);
            match e.anchor {
                ElevationAnchor::OnPipe { pipe, t } => {
                    self.pipe_t(subject, pipe, t, IntegrityRule::AnchorOutsidePipe);
                }
                ElevationAnchor::Block(b) => {
                    if !self.s.blocks.contains(b) {
                        self.dangling(subject, b);
                    }
                }
            }
        }
        for (id, m) in self.s.slopes.iter() {
            let subject = Subject::Slope(id);
            self.finite(subject, &[m.shift]);
            self.pipe_t(subject, m.pipe, m.t, IntegrityRule::AnchorOutsidePipe);
        }
    }

    fn grid(&mut self) {
        let Some(g) = &self.s.grid else { return };
        if g.x_count() == 0 && g.y_count() == 0 {
            self.push(Subject::Grid, IntegrityRule::GridEmpty, "grid has no axes");
        }
        if g.x_groups.iter().chain(&g.y_groups).any(|gr| gr.count == 0 || !(gr.step > 0.0)) {
            self.push(Subject::Grid, IntegrityRule::GridEmpty, "axis group with no axes or non-positive step");
        }
        for (set, n, name) in [(&g.visible_x, g.x_count(), "X"), (&g.visible_y, g.y_count(), "Y")] {
            if let Some(set) = set {
                if set.iter().any(|i| *i == 0 || *i > n) {
                    self.push(
                        Subject::Grid,
                        IntegrityRule::GridVisibleRange,
                        format!("visible {name} axis index outside 1..={n}"),
                    );
                }
            }
        }
    }

    fn settings(&mut self) {
        let st = &self.s.settings;
        let subject = Subject::Settings;
        if !(st.mode.scale > 0.0 && st.mode.scale.is_finite()) {
            self.push(subject, IntegrityRule::BadSetting, "scale must be positive");
        }
        if !(st.mode.occlusion_gap_len > 0.0) {
            self.push(subject, IntegrityRule::BadSetting, "occlusion gap length must be positive");
        }
        if let Some((lo, hi)) = st.mode.slice {
            if !(lo < hi) {
                self.push(subject, IntegrityRule::BadSetting, "slice bounds are not ordered");
            }
        }
        let o = &st.objects;
        for c in [
            o.pipe_style.color,
            o.block_style.color,
            o.text_color,
            o.mark_color,
            o.dim_color,
            o.elev_color,
            o.slope_color,
            o.grid.color,
        ] {
            self.color(subject, c);
        }
        for f in [
            &o.break_font,
            &o.text_font,
            &o.mark_font,
            &o.dim_font,
            &o.elev_font,
            &o.slope_font,
            &o.grid.font,
        ] {
            self.font(subject, f);
        }
        if !(o.block_stretch > 0.0) {
            self.push(subject, IntegrityRule::BadStretch, "default stretch must be positive");
        }
        if !(o.break_dot_step > 0.0) {
            self.push(subject, IntegrityRule::BadSetting, "dot step must be positive");
        }
    }
}

/// Every violated reference or per-object invariant; empty for a sound scheme.
pub fn integrity_check(scheme: &Scheme) -> Vec<Issue> {
    let mut c = Checker {
        s: scheme,
        out: Vec::new(),
    };
    c.settings();
    c.points();
    c.pipes();
    c.joints();
    c.offsets();
    c.breaks();
    c.symbols();
    c.blocks();
    c.texts();
    c.marks();
    c.dimensions();
    c.marks_on_pipes();
    c.grid();
    c.out
}
