use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use asts_core::constraints;
use asts_core::geometry::{projection_by_name, projection_catalog, projection_names};
use asts_core::layout::layout_scheme;
use asts_core::model::{integrity_check, Scheme, Vec3};
use asts_core::persist;
use asts_core::render_svg::{render, PageSetup};
use asts_core::specgen::{generate_spec, SpecMode};

/// Exit codes. Clap itself exits with 2 on bad arguments.
mod code {
    pub const VALIDATION: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const PARSE: u8 = 4;
}

#[derive(Parser)]
#[command(name = "asts", version, about = "Axonometric piping schemes: check, draw, list, convert")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check integrity and layout rules; prints OK or the violations.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Draw the scheme as SVG.
    Render {
        file: PathBuf,
        /// Output file, `-` for standard output.
        #[arg(short, long)]
        output: PathBuf,
        /// Projection name, see `asts projections`. Defaults to the one stored in the file.
        #[arg(short, long)]
        projection: Option<String>,
        /// Direction towards the viewer for the `custom` projection.
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec3, allow_hyphen_values = true)]
        view_dir: Option<Vec3>,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Write the specification as tab-separated text.
    Spec {
        file: PathBuf,
        /// Table layout; extended when the file says so, six columns otherwise.
        #[arg(short, long, value_enum)]
        mode: Option<SpecArg>,
        /// Output file; standard output when omitted or `-`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        mode_args: ModeArgs,
    },
    /// Convert between text (.asts) and binary (.astsb) files.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List the projection catalog.
    Projections,
    /// Object counts and the size of the binary form.
    Stats { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecArg {
    Six,
    Extended,
}

/// Overrides of the stored mode settings.
#[derive(Args, Default)]
struct ModeArgs {
    /// Sheet scale, paper mm per nature mm.
    #[arg(long)]
    scale: Option<f64>,
    /// Length of occlusion gaps (paper mm).
    #[arg(long)]
    occlusion_gap: Option<f64>,
    /// Only objects between two heights.
    #[arg(long, value_name = "ZMIN:ZMAX", value_parser = parse_slice, allow_hyphen_values = true)]
    slice: Option<(f64, f64)>,
    /// Ignore the slice stored in the file.
    #[arg(long, conflicts_with = "slice")]
    no_slice: bool,
    /// Object classes to hide, e.g. `grid,dimensions`.
    #[arg(long, value_delimiter = ',', value_name = "CLASS,...")]
    hide: Vec<String>,
    /// Object classes to show, e.g. `covered_pipes`.
    #[arg(long, value_delimiter = ',', value_name = "CLASS,...")]
    show: Vec<String>,
    /// Draw marks flagged as hidden.
    #[arg(long)]
    show_hidden_marks: bool,
    /// Catalog filter: working temperature.
    #[arg(long, allow_hyphen_values = true)]
    work_temperature: Option<f64>,
    /// Catalog filter: working pressure.
    #[arg(long)]
    work_pressure: Option<f64>,
    /// Turn automatic position numbering on or off.
    #[arg(long)]
    autonumber: Option<bool>,
    /// Mark the specification as extended.
    #[arg(long)]
    spec_extended: Option<bool>,
    /// Any settings field in text-file syntax, e.g. `dim.precision=1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

struct Failure {
    code: u8,
    err: anyhow::Error,
}

type Res<T> = Result<T, Failure>;

trait Classify<T> {
    fn code(self, code: u8) -> Res<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn code(self, code: u8) -> Res<T> {
        self.map_err(|e| Failure { code, err: e.into() })
    }
}

fn usage(msg: String) -> Failure {
    Failure {
        code: code::USAGE,
        err: anyhow!(msg),
    }
}

fn parse_pair(s: &str, sep: char, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != n {
        return Err(format!("expected {n} numbers separated by `{sep}`"));
    }
    parts
        .iter()
        .map(|p| {
            let v: f64 = p.trim().parse().map_err(|_| format!("bad number `{p}`"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("number must be finite: `{p}`"))
            }
        })
        .collect()
}

fn parse_slice(s: &str) -> Result<(f64, f64), String> {
    let v = parse_pair(s, ':', 2)?;
    if v[0] > v[1] {
        return Err("ZMIN must not exceed ZMAX".into());
    }
    Ok((v[0], v[1]))
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let v = parse_pair(s, ',', 3)?;
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn is_binary_path(p: &Path) -> Option<bool> {
    match p.extension().and_then(|e| e.to_str()) {
        Some("astsb") => Some(true),
        Some("asts") => Some(false),
        _ => None,
    }
}

fn load(path: &Path) -> Res<Scheme> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display())).code(code::IO)?;
    let binary = is_binary_path(path).unwrap_or_else(|| bytes.starts_with(persist::MAGIC));
    if binary {
        persist::load_binary(&bytes)
            .with_context(|| format!("{}", path.display()))
            .code(code::PARSE)
    } else {
        let text = String::from_utf8(bytes)
            .with_context(|| format!("{} is not UTF-8", path.display()))
            .code(code::PARSE)?;
        persist::load_text(&text)
            .with_context(|| format!("{}", path.display()))
            .code(code::PARSE)
    }
}

fn write_out(path: Option<&Path>, data: &[u8]) -> Res<()> {
    match path {
        None => io::stdout().write_all(data).context("writing standard output").code(code::IO),
        Some(p) if p == Path::new("-") => write_out(None, data),
        Some(p) => fs::write(p, data).with_context(|| format!("writing {}", p.display())).code(code::IO),
    }
}

impl ModeArgs {
    fn apply(&self, s: &mut Scheme) -> Res<()> {
        let m = &mut s.settings.mode;
        if let Some(v) = self.scale {
            if !(v > 0.0 && v.is_finite()) {
                return Err(usage(format!("scale must be positive, got {v}")));
            }
            m.scale = v;
        }
        if let Some(v) = self.occlusion_gap {
            m.occlusion_gap_len = v;
        }
        if self.no_slice {
            m.slice = None;
        }
        if let Some(v) = self.slice {
            m.slice = Some(v);
        }
        if self.work_temperature.is_some() {
            m.work_temperature = self.work_temperature;
        }
        if self.work_pressure.is_some() {
            m.work_pressure = self.work_pressure;
        }
        if let Some(v) = self.autonumber {
            m.autonumber = v;
        }
        if let Some(v) = self.spec_extended {
            m.spec_extended = v;
        }
        if self.show_hidden_marks {
            m.visibility.hidden_marks = true;
        }
        for (classes, on) in [(&self.hide, false), (&self.show, true)] {
            for c in classes {
                let key = format!("show.{}", c.trim().replace('-', "_"));
                persist::apply_setting(&mut s.settings, &key, &on.to_string())
                    .map_err(|_| usage(format!("unknown object class `{c}`")))?;
            }
        }
        for kv in &self.sets {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("expected KEY=VALUE, got `{kv}`")))?;
            persist::apply_setting(&mut s.settings, k.trim(), v).map_err(|e| usage(format!("--set {kv}: {}", e.msg)))?;
        }
        Ok(())
    }
}

fn validate(file: &Path, mode: &ModeArgs) -> Res<()> {
    let mut s = load(file)?;
    mode.apply(&mut s)?;
    let mut lines: Vec<String> = integrity_check(&s).iter().map(|i| i.to_string()).collect();
    if lines.is_empty() {
        lines.extend(constraints::check_scheme(&s).iter().filter(|r| !r.is_ok()).map(|r| r.to_string()));
    }
    if lines.is_empty() {
        println!("OK");
        return Ok(());
    }
    for l in &lines {
        println!("{l}");
    }
    Err(Failure {
        code: code::VALIDATION,
        err: anyhow!("{} violation(s)", lines.len()),
    })
}

fn render_cmd(file: &Path, output: &Path, projection: Option<&str>, view_dir: Option<Vec3>, mode: &ModeArgs) -> Res<()> {
    let mut s = load(file)?;
    mode.apply(&mut s)?;
    let name = projection.map(str::to_string).unwrap_or_else(|| s.settings.mode.projection.clone());
    let proj = projection_by_name(&name, view_dir)
        .map_err(|e| usage(format!("{e}; known projections: {}", projection_names().join(", "))))?;
    let drawing = layout_scheme(&s, &proj, s.settings.mode.slice).code(code::VALIDATION)?;
    for w in &drawing.warnings {
        eprintln!("warning: {w}");
    }
    let svg = render(&drawing.primitives, &PageSetup::default());
    write_out(Some(output), svg.as_bytes())
}

fn spec_cmd(file: &Path, mode: Option<SpecArg>, output: Option<&Path>, mode_args: &ModeArgs) -> Res<()> {
    let mut s = load(file)?;
    mode_args.apply(&mut s)?;
    let mode = match mode {
        Some(SpecArg::Six) => SpecMode::Six,
        Some(SpecArg::Extended) => SpecMode::Extended,
        None if s.settings.mode.spec_extended => SpecMode::Extended,
        None => SpecMode::Six,
    };
    let table = generate_spec(&s, mode).code(code::VALIDATION)?;
    write_out(output, table.to_tsv().as_bytes())
}

fn convert(input: &Path, output: &Path) -> Res<()> {
    let binary = is_binary_path(output)
        .ok_or_else(|| usage(format!("{}: output extension must be .asts or .astsb", output.display())))?;
    let s = load(input)?;
    let data = if binary {
        persist::save_binary(&s).code(code::VALIDATION)?
    } else {
        persist::save_text(&s).into_bytes()
    };
    write_out(Some(output), &data)
}

fn projections() -> Res<()> {
    let mut out = String::from("name\tfamily\tx\ty\tz\tkx\tky\tkz\n");
    let v = |p: &asts_core::model::Vec2| format!("{:.4},{:.4}", p.x, p.y);
    for p in projection_catalog() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\n",
            p.name,
            p.family.name(),
            v(&p.ex),
            v(&p.ey),
            v(&p.ez),
            p.ex.norm(),
            p.ey.norm(),
            p.ez.norm()
        ));
    }
    write_out(None, out.as_bytes())
}

fn stats(file: &Path) -> Res<()> {
    let s = load(file)?;
    let bytes = persist::save_binary(&s).code(code::VALIDATION)?;
    let counts = s.counts();
    let mut out = String::new();
    for (name, n) in counts.rows() {
        out.push_str(&format!("{name}\t{n}\n"));
    }
    out.push_str(&format!("total\t{}\nbinary_bytes\t{}\n", counts.total(), bytes.len()));
    write_out(None, out.as_bytes())
}

fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Validate { file, mode } => validate(&file, &mode),
        Command::Render {
            file,
            output,
            projection,
            view_dir,
            mode,
        } => render_cmd(&file, &output, projection.as_deref(), view_dir, &mode),
        Command::Spec {
            file,
            mode,
            output,
            mode_args,
        } => spec_cmd(&file, mode, output.as_deref(), &mode_args),
        Command::Convert { input, output } => convert(&input, &output),
        Command::Projections => projections(),
        Command::Stats { file } => stats(&file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
