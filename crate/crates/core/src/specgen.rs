//! Specification tables built from position marks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use crate::model::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecMode {
    /// Six columns.
    Six,
    /// Six columns plus the order-form properties.
    Extended,
}

pub const SIX_COLUMNS: [&str; 6] = ["Поз.", "Обозначение", "Наименование", "Кол.", "Масса ед.", "Примеч."];
pub const EXTENDED_COLUMNS: [&str; 5] = [
    "Тип/марка",
    "Наименование и техническая характеристика",
    "ЕдИзм",
    "Завод-изготовитель",
    "Код оборудов.",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("positions without extended properties: {}", list(.0))]
    MissingExtended(Vec<u32>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn list(v: &[u32]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecRow {
    pub position: u32,
    pub cells: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecTable {
    pub mode: SpecMode,
    pub work_temperature: Option<f64>,
    pub work_pressure: Option<f64>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<SpecRow>,
}

impl SpecTable {
    /// Tab-separated text: a filter line, the column names, one line per row.
    pub fn to_tsv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v}"));
        let mut out = format!(
            "# work_temperature={} work_pressure={}\n",
            opt(self.work_temperature),
            opt(self.work_pressure)
        );
        out.push_str(&self.columns.join("\t"));
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.cells.iter().map(|c| cell(c)).collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }
}

/// Tabs and line breaks inside a cell become spaces.
fn cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn format_qty(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

/// Total pipe length in metres with two decimals.
pub fn format_metres(mm: f64) -> String {
    format!("{:.2}", mm / 1000.0)
}

/// Pipe a mark target lies on.
fn marked_pipe(s: &Scheme, t: &MarkTarget) -> Result<PipeId, ModelError> {
    Ok(match *t {
        MarkTarget::Pipe { pipe, .. } => pipe,
        MarkTarget::Block { block, .. } => s.block(block)?.pipe,
    })
}

/// One row per position in ascending order. Hidden marks count too.
pub fn generate_spec(s: &Scheme, mode: SpecMode) -> Result<SpecTable, SpecError> {
    // Props grouped by position; the first record supplies the text fields.
    let mut by_pos: BTreeMap<u32, Vec<SpecPropsId>> = BTreeMap::new();
    for (id, p) in s.spec_props.iter() {
        by_pos.entry(p.position).or_default().push(id);
    }
    if mode == SpecMode::Extended {
        let missing: Vec<u32> = by_pos
            .iter()
            .filter(|(_, ids)| ids.iter().any(|id| s.spec_props.get(*id).is_some_and(|p| p.extended.is_none())))
            .map(|(pos, _)| *pos)
            .collect();
        if !missing.is_empty() {
            return Err(SpecError::MissingExtended(missing));
        }
    }

    let mut pipes: BTreeMap<u32, BTreeSet<PipeId>> = BTreeMap::new();
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    for m in s.marks.values() {
        for pid in &m.props {
            let p = s.spec_props.get(*pid).ok_or(ModelError::UnknownSpecProps(*pid))?;
            match p.object {
                SpecObject::ForPipe => {
                    pipes.entry(p.position).or_default().insert(marked_pipe(s, &m.target)?);
                }
                SpecObject::ForBlock { qty } => *counts.entry(p.position).or_default() += qty,
            }
        }
    }

    let mut columns = SIX_COLUMNS.to_vec();
    if mode == SpecMode::Extended {
        columns.extend(EXTENDED_COLUMNS);
    }
    let mut rows = Vec::new();
    for (pos, ids) in &by_pos {
        let p = s.spec_props.get(ids[0]).expect("grouped from the store");
        let qty = match p.object {
            SpecObject::ForPipe => {
                let mut total = 0.0;
                for pipe in pipes.get(pos).into_iter().flatten() {
                    total += s.pipe_length(*pipe)?;
                }
                format_metres(total)
            }
            SpecObject::ForBlock { .. } => format_qty(counts.get(pos).copied().unwrap_or(0.0)),
        };
        let mut cells = vec![
            pos.to_string(),
            p.basic.designation.clone(),
            p.basic.name.clone(),
            qty,
            p.basic.unit_mass_kg.map(|m| format!("{m}")).unwrap_or_default(),
            p.basic.note.clone(),
        ];
        if mode == SpecMode::Extended {
            let e = p.extended.as_ref().expect("checked above");
            cells.extend([
                e.type_mark.clone(),
                e.name_and_spec.clone(),
                e.unit_name.clone(),
                e.manufacturer.clone(),
                e.equipment_code.clone(),
            ]);
        }
        rows.push(SpecRow { position: *pos, cells });
    }
    Ok(SpecTable {
        mode,
        work_temperature: s.settings.mode.work_temperature,
        work_pressure: s.settings.mode.work_pressure,
        columns,
        rows,
    })
}
