//! CSV field dumps and SVG arrow plots.
//!
//! A dump starts with `#` metadata lines followed by a column header and one
//! row per node in flat-index order:
//!
//! ```text
//! # rotelast-field 1
//! # dims 4 4 1
//! # spacing 2.5000000000000000e-1
//! # boundary periodic
//! # kind scalar
//! # components 1
//! x,y,z,v
//! 0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,1.2500000000000000e-1
//! ```
//!
//! Values are written with 17 significant digits so that reading a dump
//! back reproduces every `f64` exactly.

use crate::grid::{Boundary, Field, FieldValue, GridError, GridSpec, RotationField};
use crate::radial::bessel_j0;
use crate::so3::{Mat3, Vec3};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FieldIoError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("missing header entry '{0}'")]
    MissingHeader(&'static str),
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("field kind {found} cannot be read as {wanted}")]
    KindMismatch { found: FieldKind, wanted: FieldKind },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: u64, message: impl Into<String>) -> FieldIoError {
    FieldIoError::Parse { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector,
    Matrix,
    Rotation,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector => "vector",
            FieldKind::Matrix => "matrix",
            FieldKind::Rotation => "rotation",
        }
    }

    pub fn components(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vector => 3,
            FieldKind::Matrix | FieldKind::Rotation => 9,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [FieldKind::Scalar, FieldKind::Vector, FieldKind::Matrix, FieldKind::Rotation]
            .into_iter()
            .find(|k| k.name() == s)
    }

    fn column_names(self) -> Vec<String> {
        match self {
            FieldKind::Scalar => vec!["v".into()],
            FieldKind::Vector => (0..3).map(|i| format!("u{i}")).collect(),
            FieldKind::Matrix | FieldKind::Rotation => {
                (0..9).map(|i| format!("m{}{}", i / 3, i % 3)).collect()
            }
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Field values that can be flattened into CSV columns.
pub trait CsvValue: FieldValue {
    const KIND: FieldKind;
    fn push_components(&self, out: &mut Vec<f64>);
    fn from_components(c: &[f64]) -> Self;
}

impl CsvValue for f64 {
    const KIND: FieldKind = FieldKind::Scalar;
    fn push_components(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
}

impl CsvValue for Vec3 {
    const KIND: FieldKind = FieldKind::Vector;
    fn push_components(&self, out: &mut Vec<f64>) {
        out.extend(self.iter());
    }
    fn from_components(c: &[f64]) -> Self {
        Vec3::new(c[0], c[1], c[2])
    }
}

impl CsvValue for Mat3 {
    const KIND: FieldKind = FieldKind::Matrix;
    fn push_components(&self, out: &mut Vec<f64>) {
        for i in 0..3 {
            for j in 0..3 {
                out.push(self[(i, j)]);
            }
        }
    }
    fn from_components(c: &[f64]) -> Self {
        Mat3::from_row_slice(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Scalar(Field<f64>),
    Vector(Field<Vec3>),
    Matrix(Field<Mat3>),
    Rotation(RotationField),
}

impl AnyField {
    pub fn kind(&self) -> FieldKind {
        match self {
            AnyField::Scalar(_) => FieldKind::Scalar,
            AnyField::Vector(_) => FieldKind::Vector,
            AnyField::Matrix(_) => FieldKind::Matrix,
            AnyField::Rotation(_) => FieldKind::Rotation,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        match self {
            AnyField::Scalar(f) => f.grid(),
            AnyField::Vector(f) => f.grid(),
            AnyField::Matrix(f) => f.grid(),
            AnyField::Rotation(f) => f.grid(),
        }
    }

    pub fn into_scalar(self) -> Result<Field<f64>, FieldIoError> {
        match self {
            AnyField::Scalar(f) => Ok(f),
            other => Err(FieldIoError::KindMismatch { found: other.kind(), wanted: FieldKind::Scalar }),
        }
    }

    pub fn into_vector(self) -> Result<Field<Vec3>, FieldIoError> {
        match self {
            AnyField::Vector(f) => Ok(f),
            other => Err(FieldIoError::KindMismatch { found: other.kind(), wanted: FieldKind::Vector }),
        }
    }

    pub fn into_rotation(self) -> Result<RotationField, FieldIoError> {
        match self {
            AnyField::Rotation(f) => Ok(f),
            AnyField::Matrix(f) => Ok(RotationField::new(f)?),
            other => Err(FieldIoError::KindMismatch { found: other.kind(), wanted: FieldKind::Rotation }),
        }
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::DirichletIdentity => "dirichlet-identity",
    }
}

fn write_rows<W: Write, T: CsvValue>(field: &Field<T>, kind: FieldKind, mut w: W) -> std::io::Result<()> {
    let g = field.grid();
    let [nx, ny, nz] = g.dims();
    let mut out = String::new();
    let _ = writeln!(out, "# rotelast-field {FORMAT_VERSION}");
    let _ = writeln!(out, "# dims {nx} {ny} {nz}");
    let _ = writeln!(out, "# spacing {:.16e}", g.spacing());
    let _ = writeln!(out, "# boundary {}", boundary_name(g.boundary()));
    let _ = writeln!(out, "# kind {kind}");
    let _ = writeln!(out, "# components {}", kind.components());
    let mut cols = vec!["x".to_string(), "y".into(), "z".into()];
    cols.extend(kind.column_names());
    out.push_str(&cols.join(","));
    out.push('\n');
    w.write_all(out.as_bytes())?;
    let mut comps = Vec::with_capacity(12);
    for (i, v) in field.values().iter().enumerate() {
        comps.clear();
        comps.extend(g.position(i));
        v.push_components(&mut comps);
        let mut line = String::with_capacity(comps.len() * 25);
        for (j, c) in comps.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            let _ = write!(line, "{c:.16e}");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

/// Writes `field` in the CSV dump format.
pub fn write_field<W: Write, T: CsvValue>(field: &Field<T>, w: W) -> std::io::Result<()> {
    write_rows(field, T::KIND, w)
}

pub fn write_rotation_field<W: Write>(field: &RotationField, w: W) -> std::io::Result<()> {
    write_rows(field.field(), FieldKind::Rotation, w)
}

pub fn write_any<W: Write>(field: &AnyField, w: W) -> std::io::Result<()> {
    match field {
        AnyField::Scalar(f) => write_field(f, w),
        AnyField::Vector(f) => write_field(f, w),
        AnyField::Matrix(f) => write_field(f, w),
        AnyField::Rotation(f) => write_rotation_field(f, w),
    }
}

pub fn write_field_csv(field: &AnyField, path: &Path) -> Result<(), FieldIoError> {
    let file = std::fs::File::create(path)?;
    write_any(field, std::io::BufWriter::new(file))?;
    Ok(())
}

struct Header {
    dims: [usize; 3],
    spacing: f64,
    boundary: Boundary,
    kind: FieldKind,
}

fn parse_header(text: &str) -> Result<Header, FieldIoError> {
    let (mut version, mut dims, mut spacing, mut boundary, mut kind, mut comps) = (None, None, None, None, None, None);
    for (idx, line) in text.lines().enumerate() {
        let Some(rest) = line.strip_prefix('#') else { break };
        let n = idx as u64 + 1;
        let mut parts = rest.split_whitespace();
        let key = parts.next().unwrap_or("");
        let vals: Vec<&str> = parts.collect();
        let one = || -> Result<&str, FieldIoError> {
            match vals.as_slice() {
                [v] => Ok(v),
                _ => Err(parse_err(n, format!("'{key}' takes one value"))),
            }
        };
        match key {
            "rotelast-field" => {
                let v: u32 = one()?.parse().map_err(|_| parse_err(n, "bad format version"))?;
                if v != FORMAT_VERSION {
                    return Err(parse_err(n, format!("unsupported format version {v}")));
                }
                version = Some(v);
            }
            "dims" => {
                let d: Vec<usize> = vals
                    .iter()
                    .map(|v| v.parse().map_err(|_| parse_err(n, format!("bad dimension '{v}'"))))
                    .collect::<Result<_, _>>()?;
                let d: [usize; 3] = d.try_into().map_err(|_| parse_err(n, "dims takes three values"))?;
                dims = Some(d);
            }
            "spacing" => {
                spacing = Some(one()?.parse::<f64>().map_err(|_| parse_err(n, "bad spacing"))?);
            }
            "boundary" => {
                boundary = Some(match one()? {
                    "periodic" => Boundary::Periodic,
                    "dirichlet-identity" => Boundary::DirichletIdentity,
                    other => return Err(parse_err(n, format!("unknown boundary '{other}'"))),
                });
            }
            "kind" => {
                let v = one()?;
                kind = Some(FieldKind::parse(v).ok_or_else(|| parse_err(n, format!("unknown kind '{v}'")))?);
            }
            "components" => {
                comps = Some((n, one()?.parse::<usize>().map_err(|_| parse_err(n, "bad component count"))?));
            }
            _ => {}
        }
    }
    version.ok_or(FieldIoError::MissingHeader("rotelast-field"))?;
    let kind = kind.ok_or(FieldIoError::MissingHeader("kind"))?;
    let (line, c) = comps.ok_or(FieldIoError::MissingHeader("components"))?;
    if c != kind.components() {
        return Err(parse_err(line, format!("{kind} fields have {} components, header says {c}", kind.components())));
    }
    Ok(Header {
        dims: dims.ok_or(FieldIoError::MissingHeader("dims"))?,
        spacing: spacing.ok_or(FieldIoError::MissingHeader("spacing"))?,
        boundary: boundary.ok_or(FieldIoError::MissingHeader("boundary"))?,
        kind,
    })
}

fn collect_values<T: CsvValue>(rows: &[Vec<f64>], grid: GridSpec) -> Result<Field<T>, FieldIoError> {
    Ok(Field::new(grid, rows.iter().map(|r| T::from_components(&r[3..])).collect())?)
}

/// Reads a dump written by [`write_field`] or [`write_field_csv`].
pub fn read_field<R: Read>(mut r: R) -> Result<AnyField, FieldIoError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let header = parse_header(&text)?;
    let grid = GridSpec::new(header.dims, header.spacing, header.boundary)?;
    let width = 3 + header.kind.components();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let columns = reader.headers().map_err(|e| parse_err(line_of(&e), e.to_string()))?.len();
    if columns != width {
        return Err(parse_err(header_line(&text), format!("expected {width} columns, found {columns}")));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(line_of(&e), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(parse_err(line, format!("expected {width} fields, found {}", record.len())));
        }
        let vals: Vec<f64> = record
            .iter()
            .map(|s| {
                let v: f64 = s.trim().parse().map_err(|_| parse_err(line, format!("bad number '{s}'")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(line, format!("non-finite value '{s}'")))
                }
            })
            .collect::<Result<_, _>>()?;
        let idx = rows.len();
        if idx >= grid.len() {
            return Err(FieldIoError::RowCount { expected: grid.len(), found: idx + 1 });
        }
        let p = grid.position(idx);
        if (0..3).any(|a| (vals[a] - p[a]).abs() > 1e-9 * (1.0 + p[a].abs())) {
            return Err(parse_err(line, format!("coordinates do not match node {idx} of the grid")));
        }
        rows.push(vals);
    }
    if rows.len() != grid.len() {
        return Err(FieldIoError::RowCount { expected: grid.len(), found: rows.len() });
    }
    Ok(match header.kind {
        FieldKind::Scalar => AnyField::Scalar(collect_values(&rows, grid)?),
        FieldKind::Vector => AnyField::Vector(collect_values(&rows, grid)?),
        FieldKind::Matrix => AnyField::Matrix(collect_values(&rows, grid)?),
        FieldKind::Rotation => AnyField::Rotation(RotationField::new(collect_values(&rows, grid)?)?),
    })
}

fn line_of(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

fn header_line(text: &str) -> u64 {
    text.lines().position(|l| !l.starts_with('#')).map_or(0, |i| i as u64 + 1)
}

pub fn read_field_csv(path: &Path) -> Result<AnyField, FieldIoError> {
    read_field(std::fs::File::open(path)?)
}

/// Planar grid of rotation angles about the viewing axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowScene {
    pub nx: usize,
    pub ny: usize,
    /// World distance between neighbouring sample points.
    pub spacing: f64,
    /// World coordinates of sample `(0, 0)`.
    pub origin: [f64; 2],
    /// Row-major angles, `angles[j * nx + i]` at `origin + (i, j)·spacing`.
    pub angles: Vec<f64>,
    /// Glyph length as a fraction of the spacing.
    pub glyph_length: f64,
    /// Pixels per world unit.
    pub pixels_per_unit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Glyph {
    pub x: f64,
    pub y: f64,
    pub angle: f64,
}

impl ArrowScene {
    pub fn from_fn(nx: usize, ny: usize, spacing: f64, origin: [f64; 2], angle: impl Fn(f64, f64) -> f64) -> Self {
        let mut angles = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                angles.push(angle(origin[0] + i as f64 * spacing, origin[1] + j as f64 * spacing));
            }
        }
        ArrowScene { nx, ny, spacing, origin, angles, glyph_length: 0.8, pixels_per_unit: 40.0 }
    }

    /// Square scene of `(2·half_extent/spacing + 1)²` samples centred at the origin.
    pub fn centered(half_extent: f64, spacing: f64, angle: impl Fn(f64, f64) -> f64) -> Self {
        let n = (2.0 * half_extent / spacing).round() as usize + 1;
        Self::from_fn(n, n, spacing, [-half_extent, -half_extent], angle)
    }

    /// Rotation angle `v0 J0(k r)` of the radial standing mode at rest.
    pub fn radial_mode(k: f64, v0: f64, half_extent: f64, spacing: f64) -> Self {
        Self::centered(half_extent, spacing, |x, y| v0 * bessel_j0(k * x.hypot(y)))
    }

    pub fn glyphs(&self) -> Vec<Glyph> {
        let mut out = Vec::with_capacity(self.angles.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(Glyph {
                    x: self.origin[0] + i as f64 * self.spacing,
                    y: self.origin[1] + j as f64 * self.spacing,
                    angle: self.angles[j * self.nx + i],
                });
            }
        }
        out
    }
}

/// Deterministic SVG with one arrow per sample. Angle 0 points along +x;
/// positive angles turn counter-clockwise as seen on screen.
pub fn render_arrow_svg(scene: &ArrowScene) -> String {
    let ppu = scene.pixels_per_unit;
    let margin = scene.spacing * ppu;
    let width = (scene.nx.saturating_sub(1)) as f64 * scene.spacing * ppu + 2.0 * margin;
    let height = (scene.ny.saturating_sub(1)) as f64 * scene.spacing * ppu + 2.0 * margin;
    let half = 0.5 * scene.glyph_length * scene.spacing * ppu;
    let head = 0.35 * half;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<defs><g id="arrow" stroke="black" stroke-width="1.5" fill="black"><line x1="{:.3}" y1="0" x2="{:.3}" y2="0"/><path d="M {:.3} 0 L {:.3} {:.3} L {:.3} {:.3} Z" stroke="none"/></g></defs>"#,
        -half,
        half - head,
        half,
        half - head,
        -0.6 * head,
        half - head,
        0.6 * head
    );
    for g in scene.glyphs() {
        // Screen y grows downwards, so world y and the angle both flip.
        let px = margin + (g.x - scene.origin[0]) * ppu;
        let py = height - margin - (g.y - scene.origin[1]) * ppu;
        let deg = -g.angle.to_degrees();
        let deg = if deg == 0.0 { 0.0 } else { deg };
        let _ = writeln!(s, r##"<use xlink:href="#arrow" transform="translate({px:.3} {py:.3}) rotate({deg:.4})"/>"##);
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_arrow_svg(scene: &ArrowScene, path: &Path) -> Result<(), FieldIoError> {
    std::fs::write(path, render_arrow_svg(scene))?;
    Ok(())
}

/// Angles recovered from the `rotate(…)` attributes of a rendered scene,
/// in radians with the world orientation.
pub fn parse_svg_angles(svg: &str) -> Vec<f64> {
    svg.lines()
        .filter_map(|l| {
            let start = l.find("rotate(")? + "rotate(".len();
            let end = start + l[start..].find(')')?;
            l[start..end].parse::<f64>().ok().map(|d| -d * PI / 180.0)
        })
        .collect()
}
