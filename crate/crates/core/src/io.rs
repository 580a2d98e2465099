//! Input parsing and CSV / SVG export.
//!
//! Input formats:
//! - sparse-binary: one item per line, strictly ascending space-separated
//!   `u32` elements. Blank lines and lines starting with `#` are skipped; the
//!   remaining lines are items `0, 1, ...` in order.
//! - dense-csv: comma-separated finite non-negative reals with a constant
//!   column count. A first line whose first field is not numeric is a header.
//! - edge-list: `u v [w]` per line, whitespace separated, `w` defaults to 1.
//!
//! Outputs are written to a temporary file in the target directory and then
//! renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::hashing::{SparseBinarySet, WeightedVector};
use crate::knng::Edge;
use crate::layout::{bounding_box, LayoutResult};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: row has {found} columns, expected {expected}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("input contains no items")]
    EmptyInput,
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    OutputUnwritable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("metadata has {found} rows, expected {expected}")]
    MetadataLengthMismatch { expected: usize, found: usize },
    #[error("metadata has no column named {0:?}")]
    UnknownColumn(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    SparseBinary,
    DenseCsv,
    EdgeList,
}

/// Parsed input data.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Sets(Vec<SparseBinarySet>),
    Vectors(Vec<WeightedVector>),
    Edges { n: usize, entries: Vec<(u32, u32, f64)> },
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Sets(s) => s.len(),
            Dataset::Vectors(v) => v.len(),
            Dataset::Edges { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn parse_input(path: &Path, format: InputFormat) -> Result<Dataset, IoError> {
    let file = fs::File::open(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_reader(BufReader::new(file), format).map_err(|e| match e {
        IoError::Read { source, .. } => IoError::Read {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Parses from any buffered reader. Line numbers in errors are 1-based.
pub fn parse_reader<R: BufRead>(reader: R, format: InputFormat) -> Result<Dataset, IoError> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line.map_err(|source| IoError::Read {
            path: PathBuf::new(),
            source,
        })?);
    }
    let numbered = lines.iter().enumerate().map(|(i, l)| (i + 1, l.as_str()));
    match format {
        InputFormat::SparseBinary => parse_sparse(numbered),
        InputFormat::DenseCsv => parse_dense(numbered),
        InputFormat::EdgeList => parse_edges(numbered),
    }
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_sparse<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Dataset, IoError> {
    let mut sets = Vec::new();
    for (no, line) in lines {
        if is_skipped(line) {
            continue;
        }
        let elems = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|_| parse_err(no, format!("invalid element {tok:?}")))
            })
            .collect::<Result<Vec<u32>, _>>()?;
        let set = SparseBinarySet::new(elems)
            .map_err(|_| parse_err(no, "elements must be strictly ascending"))?;
        sets.push(set);
    }
    if sets.is_empty() {
        return Err(IoError::EmptyInput);
    }
    Ok(Dataset::Sets(sets))
}

fn parse_dense<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Dataset, IoError> {
    let mut vecs = Vec::new();
    let mut width: Option<(usize, usize)> = None;
    let mut first = true;
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if first {
            first = false;
            if fields[0].parse::<f64>().is_err() {
                continue;
            }
        }
        match width {
            None => width = Some((fields.len(), no)),
            Some((w, _)) if w != fields.len() => {
                return Err(IoError::DimensionMismatch {
                    line: no,
                    expected: w,
                    found: fields.len(),
                })
            }
            _ => {}
        }
        let values = fields
            .iter()
            .map(|f| match f.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
                Ok(_) => Err(parse_err(no, format!("value {f:?} is not a finite non-negative number"))),
                Err(_) => Err(parse_err(no, format!("invalid number {f:?}"))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let v = WeightedVector::new(values).map_err(|e| parse_err(no, e.to_string()))?;
        vecs.push(v);
    }
    if vecs.is_empty() {
        return Err(IoError::EmptyInput);
    }
    Ok(Dataset::Vectors(vecs))
}

fn parse_edges<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Dataset, IoError> {
    let mut entries = Vec::new();
    let mut n = 0usize;
    for (no, line) in lines {
        if is_skipped(line) {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(parse_err(no, "expected `u v [w]`"));
        }
        let node = |tok: &str| {
            tok.parse::<u32>()
                .map_err(|_| parse_err(no, format!("invalid node id {tok:?}")))
        };
        let (u, v) = (node(toks[0])?, node(toks[1])?);
        let w = match toks.get(2) {
            Some(tok) => tok
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite())
                .ok_or_else(|| parse_err(no, format!("invalid weight {tok:?}")))?,
            None => 1.0,
        };
        n = n.max(u.max(v) as usize + 1);
        entries.push((u, v, w));
    }
    if entries.is_empty() {
        return Err(IoError::EmptyInput);
    }
    Ok(Dataset::Edges { n, entries })
}

/// Per-node metadata joined positionally.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Metadata {
    pub fn read(path: &Path) -> Result<Self, IoError> {
        let mut text = String::new();
        fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|source| IoError::Read {
                path: path.to_path_buf(),
                source,
            })?;
        let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = rdr.headers()?.iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Metadata { headers, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<&str>, IoError> {
        let c = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::UnknownColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r.get(c).map_or("", String::as_str)).collect())
    }
}

/// Six-decimal fixed point without a negative zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(buf)
}

pub fn nodes_csv(result: &LayoutResult, metadata: Option<&Metadata>) -> Result<Vec<u8>, IoError> {
    let n = result.n();
    if let Some(m) = metadata {
        if m.rows.len() != n {
            return Err(IoError::MetadataLengthMismatch {
                expected: n,
                found: m.rows.len(),
            });
        }
    }
    let degree = result.degrees();
    let mut buf = Vec::new();
    {
        let mut w = csv_writer(&mut buf);
        let mut header: Vec<&str> = vec!["id", "x", "y", "degree", "component"];
        if let Some(m) = metadata {
            header.extend(m.headers.iter().map(String::as_str));
        }
        w.write_record(&header)?;
        for i in 0..n {
            let mut rec = vec![
                i.to_string(),
                fmt6(result.coords[i][0]),
                fmt6(result.coords[i][1]),
                degree[i].to_string(),
                result.component[i].to_string(),
            ];
            if let Some(m) = metadata {
                rec.extend(m.rows[i].iter().cloned());
                // Short rows are padded so every record has the header's width.
                rec.resize(5 + m.headers.len(), String::new());
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
    }
    Ok(buf)
}

pub fn edges_csv(edges: &[Edge]) -> Result<Vec<u8>, IoError> {
    let mut buf = Vec::new();
    {
        let mut w = csv_writer(&mut buf);
        w.write_record(["source", "target", "weight"])?;
        for e in edges {
            w.write_record([e.u.to_string(), e.v.to_string(), fmt6(e.w)])?;
        }
        w.flush().map_err(csv::Error::from)?;
    }
    Ok(buf)
}

pub const SVG_SIZE: f64 = 1600.0;
pub const SVG_MARGIN: f64 = 40.0;

/// Categorical palette, cycled by first appearance of each category.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#ad494a",
];
const GRADIENT: ([u8; 3], [u8; 3]) = ([0x31, 0x36, 0x95], [0xf4, 0x6d, 0x43]);
const DEFAULT_COLOR: &str = "#1f77b4";

/// Node colors from a metadata column: numeric columns map linearly onto a
/// two-color gradient, anything else is categorical.
pub fn node_colors(values: &[&str]) -> Vec<String> {
    let numeric: Option<Vec<f64>> = values
        .iter()
        .map(|v| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect();
    match numeric {
        Some(xs) if !xs.is_empty() => {
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            xs.iter()
                .map(|&x| {
                    let t = if hi > lo { (x - lo) / (hi - lo) } else { 0.0 };
                    let (a, b) = GRADIENT;
                    let mix = |k: usize| (a[k] as f64 + t * (b[k] as f64 - a[k] as f64)).round() as u8;
                    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
                })
                .collect()
        }
        _ => {
            let mut seen: Vec<&str> = Vec::new();
            values
                .iter()
                .map(|v| {
                    let k = seen.iter().position(|s| s == v).unwrap_or_else(|| {
                        seen.push(v);
                        seen.len() - 1
                    });
                    PALETTE[k % PALETTE.len()].to_string()
                })
                .collect()
        }
    }
}

/// Static drawing: one `line` per tree edge, one `circle` per node, scaled to
/// fit the canvas with a fixed margin.
pub fn render_svg(result: &LayoutResult, colors: Option<&[String]>) -> String {
    let bb = bounding_box(&result.coords);
    let span = (bb[2] - bb[0]).max(bb[3] - bb[1]);
    let inner = SVG_SIZE - 2.0 * SVG_MARGIN;
    let scale = if span > 0.0 && span.is_finite() { inner / span } else { 1.0 };
    let (cx, cy) = if result.coords.is_empty() {
        (0.0, 0.0)
    } else {
        ((bb[0] + bb[2]) / 2.0, (bb[1] + bb[3]) / 2.0)
    };
    let map = |[x, y]: [f64; 2]| (SVG_SIZE / 2.0 + (x - cx) * scale, SVG_SIZE / 2.0 - (y - cy) * scale);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        SVG_SIZE
    )
    .unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    writeln!(s, r##"<g stroke="#888888" stroke-width="0.5">"##).unwrap();
    for e in &result.tree_edges {
        let (x1, y1) = map(result.coords[e.u as usize]);
        let (x2, y2) = map(result.coords[e.v as usize]);
        writeln!(s, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "<g>").unwrap();
    for (i, &c) in result.coords.iter().enumerate() {
        let (x, y) = map(c);
        let fill = colors.map_or(DEFAULT_COLOR, |cs| cs[i].as_str());
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{fill}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    s.push_str("</svg>\n");
    s
}

/// Writes `bytes` to `dir/name` through a temporary file and an atomic rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, IoError> {
    let target = dir.join(name);
    let unwritable = |source| IoError::OutputUnwritable {
        path: target.clone(),
        source,
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(&format!(".{name}."))
        .tempfile_in(dir)
        .map_err(unwritable)?;
    tmp.write_all(bytes).map_err(unwritable)?;
    tmp.as_file().sync_all().map_err(unwritable)?;
    tmp.persist(&target).map_err(|e| unwritable(e.error))?;
    Ok(target)
}

/// Output files requested from [`write_outputs`].
#[derive(Debug, Clone, Default)]
pub struct OutputOptions<'a> {
    pub metadata: Option<&'a Metadata>,
    pub color_by: Option<&'a str>,
    pub svg: bool,
}

/// Writes `nodes.csv`, `edges.csv` and optionally `plot.svg` into `out_dir`.
pub fn write_outputs(result: &LayoutResult, out_dir: &Path, opts: &OutputOptions<'_>) -> Result<Vec<PathBuf>, IoError> {
    fs::create_dir_all(out_dir).map_err(|source| IoError::OutputUnwritable {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let nodes = nodes_csv(result, opts.metadata)?;
    let edges = edges_csv(&result.tree_edges)?;
    let colors = match (opts.color_by, opts.metadata) {
        (Some(col), Some(m)) => Some(node_colors(&m.column(col)?)),
        (Some(col), None) => return Err(IoError::UnknownColumn(col.to_string())),
        _ => None,
    };
    let mut files = vec![
        write_atomic(out_dir, "nodes.csv", &nodes)?,
        write_atomic(out_dir, "edges.csv", &edges)?,
    ];
    if opts.svg {
        let svg = render_svg(result, colors.as_deref());
        files.push(write_atomic(out_dir, "plot.svg", svg.as_bytes())?);
    }
    Ok(files)
}

fn read_csv(path: &Path) -> Result<csv::Reader<fs::File>, IoError> {
    let file = fs::File::open(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().from_reader(file))
}

/// Reads the `x,y` columns of a `nodes.csv`, indexed by the `id` column.
pub fn read_nodes(path: &Path) -> Result<Vec<[f64; 2]>, IoError> {
    let mut rdr = read_csv(path)?;
    let mut coords = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let field = |i: usize| rec.get(i).ok_or_else(|| parse_err(line, "missing column"));
        let id: usize = field(0)?.parse().map_err(|_| parse_err(line, "invalid id"))?;
        if id != k {
            return Err(parse_err(line, format!("expected id {k}, found {id}")));
        }
        let x: f64 = field(1)?.parse().map_err(|_| parse_err(line, "invalid x"))?;
        let y: f64 = field(2)?.parse().map_err(|_| parse_err(line, "invalid y"))?;
        coords.push([x, y]);
    }
    Ok(coords)
}

/// Reads an `edges.csv`.
pub fn read_edges(path: &Path) -> Result<Vec<Edge>, IoError> {
    let mut rdr = read_csv(path)?;
    let mut edges = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let get = |i: usize| rec.get(i).ok_or_else(|| parse_err(line, "missing column"));
        let u = get(0)?.parse().map_err(|_| parse_err(line, "invalid source"))?;
        let v = get(1)?.parse().map_err(|_| parse_err(line, "invalid target"))?;
        let w = get(2)?.parse().map_err(|_| parse_err(line, "invalid weight"))?;
        edges.push(Edge { u, v, w });
    }
    Ok(edges)
}
