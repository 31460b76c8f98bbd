//! Edge-list network files and CSV feature matrices.
//!
//! Network files are plain text:
//!
//! ```text
//! # nodes=5
//! 0 1 G
//! 0 3 NG
//! P 0 1 0
//! ```
//!
//! `i j class` lines list edges with class `G`, `NG` or `U`; `P i x y ...`
//! lines give node coordinates. Other `#` lines are comments.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Edge, EdgeClass, FeatureMatrix, Network};
use crate::{DenseMatrix, Error, Result};

pub fn write_network(net: &Network, mut out: impl Write, comments: &[String]) -> Result<()> {
    writeln!(out, "# nodes={}", net.node_count())?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    for e in net.edges() {
        writeln!(out, "{} {} {}", e.a, e.b, e.class)?;
    }
    if let Some(pos) = net.positions() {
        for (i, p) in pos.iter().enumerate() {
            write!(out, "P {i}")?;
            for x in p {
                // `{}` on f64 prints the shortest string that parses back exactly
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_network(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let file = crate::fs::create(path.as_ref())?;
    write_network(net, BufWriter::new(file), &[])
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let file = crate::fs::open(path)?;
    read_network(BufReader::new(file), path)
}

/// Parses a network file; `origin` only labels error messages.
pub fn read_network(input: impl BufRead, origin: impl AsRef<Path>) -> Result<Network> {
    let origin = origin.as_ref();
    let err = |line: usize, msg: String| Error::parse(origin, line, msg);
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut positions: Vec<Option<Vec<f64>>> = Vec::new();
    let mut any_position = false;

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(value) = rest.trim().strip_prefix("nodes=") {
                if n.is_some() {
                    return Err(err(lineno, "duplicate nodes header".into()));
                }
                let count: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| err(lineno, format!("bad node count {value:?}")))?;
                n = Some(count);
                positions = vec![None; count];
            }
            continue;
        }
        let count = n.ok_or_else(|| err(lineno, "missing \"# nodes=<n>\" header".into()))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let node = |tok: &str| -> Result<usize> {
            let v: usize = tok
                .parse()
                .map_err(|_| err(lineno, format!("bad node index {tok:?}")))?;
            if v >= count {
                return Err(err(lineno, format!("node {v} out of range 0..{count}")));
            }
            Ok(v)
        };
        if tokens[0] == "P" {
            if tokens.len() < 3 {
                return Err(err(
                    lineno,
                    "position line needs a node and coordinates".into(),
                ));
            }
            let i = node(tokens[1])?;
            let coords = tokens[2..]
                .iter()
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(lineno, format!("bad coordinate {t:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if positions[i].replace(coords).is_some() {
                return Err(err(lineno, format!("duplicate position for node {i}")));
            }
            any_position = true;
            continue;
        }
        if tokens.len() != 3 {
            return Err(err(lineno, format!("expected \"i j class\", got {line:?}")));
        }
        let (a, b) = (node(tokens[0])?, node(tokens[1])?);
        let class: EdgeClass = tokens[2].parse().map_err(|m| err(lineno, m))?;
        edges.push(Edge::new(a, b, class));
    }

    let n = n.ok_or_else(|| err(0, "missing \"# nodes=<n>\" header".into()))?;
    let positions = if any_position {
        let mut out = Vec::with_capacity(n);
        for (i, p) in positions.into_iter().enumerate() {
            out.push(p.ok_or_else(|| err(0, format!("node {i} has no position")))?);
        }
        Some(out)
    } else {
        None
    };
    Network::new(n, edges, positions).map_err(|e| match e {
        Error::InvalidArgument(m) => err(0, m),
        other => other,
    })
}

/// Reads a CSV feature matrix with a header row.
///
/// With `labeled`, the first column holds a category label per row.
/// Lines starting with `#` are skipped.
pub fn load_feature_matrix(path: impl AsRef<Path>, labeled: bool) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    read_feature_matrix(crate::fs::open(path)?, path, labeled)
}

pub(crate) fn read_feature_matrix(
    input: impl Read,
    origin: &Path,
    labeled: bool,
) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header_len = reader
        .headers()
        .map_err(|e| Error::parse(origin, 1, e.to_string()))?
        .len();
    let skip = usize::from(labeled);
    if header_len <= skip {
        return Err(Error::parse(origin, 1, "header has no feature columns"));
    }
    let cols = header_len - skip;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != header_len {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {header_len} columns, found {}", record.len()),
            ));
        }
        if labeled {
            labels.push(record[0].to_string());
        }
        for (c, cell) in record.iter().enumerate().skip(skip) {
            let v: f64 = cell.parse().map_err(|_| {
                Error::parse(
                    origin,
                    line,
                    format!("column {}: non-numeric cell {cell:?}", c + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    origin,
                    line,
                    format!("column {}: non-finite cell {cell:?}", c + 1),
                ));
            }
            values.push(v);
        }
        rows += 1;
    }
    let matrix = DenseMatrix::new(rows, cols, values)?;
    FeatureMatrix::new(matrix, labeled.then_some(labels))
}
