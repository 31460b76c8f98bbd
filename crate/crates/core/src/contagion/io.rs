use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::map::symmetric_to_points;
use super::{ActivationRecord, ContagionMap, MapMode};
use crate::{DenseMatrix, Error, Result};

/// JSON metadata stored next to a map CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSidecar {
    pub n: usize,
    pub threshold: f64,
    pub mode: String,
    pub s: Option<usize>,
    pub placeholder: u32,
    pub version: String,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

impl MapSidecar {
    pub fn for_map(map: &ContagionMap, metadata: serde_json::Value) -> Self {
        Self {
            n: map.n(),
            threshold: map.threshold(),
            mode: match map.mode() {
                MapMode::Full => "full".into(),
                MapMode::Truncated(_) => "truncated".into(),
            },
            s: map.mode().steps(),
            placeholder: map.placeholder(),
            version: crate::VERSION.into(),
            metadata,
        }
    }

    pub fn map_mode(&self) -> Result<MapMode> {
        match (self.mode.as_str(), self.s) {
            ("full", _) => Ok(MapMode::Full),
            ("truncated", Some(s)) if s > 0 => Ok(MapMode::Truncated(s)),
            _ => Err(Error::invalid(format!(
                "bad map mode {:?} / s {:?}",
                self.mode, self.s
            ))),
        }
    }
}

/// A symmetric map read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredMap {
    pub sidecar: MapSidecar,
    symmetric: Vec<u32>,
}

impl StoredMap {
    pub fn n(&self) -> usize {
        self.sidecar.n
    }

    pub fn symmetric(&self, i: usize, j: usize) -> u32 {
        self.symmetric[i * self.n() + j]
    }

    pub fn symmetric_points(&self) -> DenseMatrix {
        symmetric_to_points(self.n(), &self.symmetric)
    }
}

/// `maps/m.csv` -> `maps/m.json`.
pub fn map_sidecar_path(csv_path: impl AsRef<Path>) -> PathBuf {
    csv_path.as_ref().with_extension("json")
}

/// Writes the symmetric map as headerless CSV plus its JSON sidecar.
pub fn save_map(
    map: &ContagionMap,
    csv_path: impl AsRef<Path>,
    metadata: serde_json::Value,
) -> Result<()> {
    let csv_path = csv_path.as_ref();
    let mut out = BufWriter::new(crate::fs::create(csv_path)?);
    let n = map.n();
    let data = map.symmetric_data();
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        for (j, v) in data[i * n..(i + 1) * n].iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    let sidecar = MapSidecar::for_map(map, metadata);
    let file = crate::fs::create(&map_sidecar_path(csv_path))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, &sidecar)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn load_map(csv_path: impl AsRef<Path>) -> Result<StoredMap> {
    let csv_path = csv_path.as_ref();
    let sidecar_path = map_sidecar_path(csv_path);
    let sidecar: MapSidecar =
        serde_json::from_reader(BufReader::new(crate::fs::open(&sidecar_path)?))
            .map_err(|e| Error::parse(&sidecar_path, e.line(), e.to_string()))?;
    sidecar.map_mode()?;
    let n = sidecar.n;
    let mut symmetric = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (idx, line) in BufReader::new(crate::fs::open(csv_path)?)
        .lines()
        .enumerate()
    {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let before = symmetric.len();
        for cell in line.split(',') {
            let v: u32 = cell.trim().parse().map_err(|_| {
                Error::parse(csv_path, idx + 1, format!("non-integer cell {cell:?}"))
            })?;
            symmetric.push(v);
        }
        if symmetric.len() - before != n {
            return Err(Error::parse(
                csv_path,
                idx + 1,
                format!("expected {n} columns, found {}", symmetric.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(
            csv_path,
            0,
            format!("expected {n} rows, found {rows}"),
        ));
    }
    Ok(StoredMap { sidecar, symmetric })
}

/// Telemetry CSV: `t,q,e_geometric,e_nongeometric,e_unlabeled`.
///
/// Row `t` holds `q(t)` and the edges that activate nodes at `t + 1`.
pub fn write_telemetry_csv(record: &ActivationRecord, mut out: impl Write) -> Result<()> {
    writeln!(out, "t,q,e_geometric,e_nongeometric,e_unlabeled")?;
    for (t, q) in record.q_series.iter().enumerate() {
        let e = record.edge_series.get(t).copied().unwrap_or_default();
        writeln!(
            out,
            "{t},{q},{},{},{}",
            e.geometric, e.non_geometric, e.unlabeled
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contagion::{cluster_seed, contagion_map, wtm_run};
    use crate::graph::noisy_ring_lattice;

    #[test]
    fn map_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let net = noisy_ring_lattice(30, 4, 2, 3).unwrap();
        let map = contagion_map(&net, 0.3, MapMode::Truncated(4)).unwrap();
        save_map(&map, &path, serde_json::json!({"seed": 3})).unwrap();
        let stored = load_map(&path).unwrap();
        assert_eq!(stored.sidecar.mode, "truncated");
        assert_eq!(stored.sidecar.s, Some(4));
        assert_eq!(stored.sidecar.placeholder, 8);
        assert_eq!(stored.sidecar.metadata["seed"], 3);
        assert_eq!(stored.symmetric_points(), map.symmetric_points());
    }

    #[test]
    fn telemetry_csv_layout() {
        let net = noisy_ring_lattice(20, 2, 0, 0).unwrap();
        let rec = wtm_run(&net, &cluster_seed(&net, 0).unwrap(), 0.0, Some(2)).unwrap();
        let mut buf = Vec::new();
        write_telemetry_csv(&rec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,q,e_geometric,e_nongeometric,e_unlabeled");
        assert_eq!(lines[1], "0,0.15,2,0,0");
        assert_eq!(lines[2], "1,0.25,2,0,0");
        assert_eq!(lines[3], "2,0.35,0,0,0");
    }
}
