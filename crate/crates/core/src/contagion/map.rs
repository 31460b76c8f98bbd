use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::wtm::{check_threshold, cluster_seed, Engine, NoTelemetry, UNACTIVATED};
use crate::graph::Network;
use crate::{DenseMatrix, Error, Result};

/// Whether contagions run to a fixed point or stop after `s` sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", content = "s", rename_all = "lowercase")]
pub enum MapMode {
    Full,
    Truncated(usize),
}

impl MapMode {
    /// Value stored for nodes that never activate (or activate after `s`).
    pub fn placeholder(self, n: usize) -> u32 {
        match self {
            MapMode::Full => 2 * n as u32,
            MapMode::Truncated(s) => 2 * s as u32,
        }
    }

    pub fn steps(self) -> Option<usize> {
        match self {
            MapMode::Full => None,
            MapMode::Truncated(s) => Some(s),
        }
    }
}

impl std::fmt::Display for MapMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapMode::Full => f.write_str("full"),
            MapMode::Truncated(s) => write!(f, "trunc:{s}"),
        }
    }
}

impl std::str::FromStr for MapMode {
    type Err = String;

    /// Parses `full` or `trunc:<s>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "full" {
            return Ok(MapMode::Full);
        }
        let steps = s
            .strip_prefix("trunc:")
            .ok_or_else(|| format!("expected \"full\" or \"trunc:<s>\", got {s:?}"))?;
        match steps.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(MapMode::Truncated(v)),
            _ => Err(format!(
                "truncation steps must be a positive integer, got {steps:?}"
            )),
        }
    }
}

/// Activation-time embedding of a network.
///
/// `raw(i, j)` is node `i`'s activation time in the contagion seeded at the
/// cluster of node `j`; `symmetric(i, j) = raw(i, j) + raw(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContagionMap {
    n: usize,
    threshold: f64,
    mode: MapMode,
    // contagion-major: columns[j * n + i] = raw(i, j)
    columns: Vec<u32>,
    symmetric: Vec<u32>,
}

impl ContagionMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn mode(&self) -> MapMode {
        self.mode
    }

    pub fn placeholder(&self) -> u32 {
        self.mode.placeholder(self.n)
    }

    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.columns[j * self.n + i]
    }

    /// Activation times of contagion `j`, indexed by node.
    pub fn contagion(&self, j: usize) -> &[u32] {
        &self.columns[j * self.n..(j + 1) * self.n]
    }

    pub fn symmetric(&self, i: usize, j: usize) -> u32 {
        self.symmetric[i * self.n + j]
    }

    pub fn symmetric_row(&self, i: usize) -> &[u32] {
        &self.symmetric[i * self.n..(i + 1) * self.n]
    }

    /// Symmetric map as an `n x n` matrix of points, one row per node.
    pub fn symmetric_points(&self) -> DenseMatrix {
        symmetric_to_points(self.n, &self.symmetric)
    }

    pub(crate) fn symmetric_data(&self) -> &[u32] {
        &self.symmetric
    }
}

pub(crate) fn symmetric_to_points(n: usize, data: &[u32]) -> DenseMatrix {
    DenseMatrix::new(n, n, data.iter().map(|&v| v as f64).collect())
        .expect("square matrix has n * n entries")
}

/// Builds a full or truncated contagion map with threshold `threshold`.
///
/// One contagion runs per node, seeded at its cluster. Contagions run on the
/// current rayon pool; the result does not depend on the worker count.
pub fn contagion_map(net: &Network, threshold: f64, mode: MapMode) -> Result<ContagionMap> {
    check_threshold(threshold)?;
    if mode == MapMode::Truncated(0) {
        return Err(Error::invalid("truncation steps must be at least 1"));
    }
    let n = net.node_count();
    let placeholder = mode.placeholder(n);
    let cutoff = mode
        .steps()
        .map_or(u32::MAX, |s| s.min(u32::MAX as usize) as u32);

    let mut columns = vec![UNACTIVATED; n * n];
    columns.par_chunks_mut(n).enumerate().for_each_init(
        || (Engine::new(net, threshold), Vec::new()),
        |(engine, seeds), (j, column)| {
            seeds.clear();
            seeds.extend(cluster_seed(net, j).expect("j < n"));
            engine.run(seeds, mode.steps(), column, &mut NoTelemetry);
            for t in column.iter_mut() {
                if *t == UNACTIVATED || *t > cutoff {
                    *t = placeholder;
                }
            }
        },
    );

    let symmetric = symmetrize(n, &columns);
    Ok(ContagionMap {
        n,
        threshold,
        mode,
        columns,
        symmetric,
    })
}

/// `out[i][j] = m[i][j] + m[j][i]`, walked in tiles to stay cache friendly.
fn symmetrize(n: usize, m: &[u32]) -> Vec<u32> {
    const TILE: usize = 64;
    let mut out = vec![0u32; n * n];
    out.par_chunks_mut(TILE * n.max(1))
        .enumerate()
        .for_each(|(block, rows)| {
            let i0 = block * TILE;
            let height = rows.len() / n.max(1);
            for j0 in (0..n).step_by(TILE) {
                let j1 = (j0 + TILE).min(n);
                for di in 0..height {
                    let i = i0 + di;
                    let row = &mut rows[di * n..(di + 1) * n];
                    for j in j0..j1 {
                        row[j] = m[i * n + j] + m[j * n + i];
                    }
                }
            }
        });
    out
}
