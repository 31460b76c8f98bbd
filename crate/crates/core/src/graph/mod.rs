//! Networks with classified edges, and the generators that produce them.

mod io;
mod knn;
mod nrl;

pub use io::{load_feature_matrix, load_network, read_network, save_network, write_network};
pub use knn::knn_graph;
pub use nrl::{noisy_ring_lattice, MAX_STUB_RESTARTS};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Whether an edge follows the embedding manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeClass {
    Geometric,
    NonGeometric,
    Unlabeled,
}

impl EdgeClass {
    pub const ALL: [EdgeClass; 3] = [
        EdgeClass::Geometric,
        EdgeClass::NonGeometric,
        EdgeClass::Unlabeled,
    ];

    /// Short tag used in edge-list files.
    pub fn tag(self) -> &'static str {
        match self {
            EdgeClass::Geometric => "G",
            EdgeClass::NonGeometric => "NG",
            EdgeClass::Unlabeled => "U",
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EdgeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "G" => Ok(EdgeClass::Geometric),
            "NG" => Ok(EdgeClass::NonGeometric),
            "U" => Ok(EdgeClass::Unlabeled),
            other => Err(format!("unknown edge class {other:?}")),
        }
    }
}

/// An undirected edge, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub class: EdgeClass,
}

impl Edge {
    pub fn new(u: usize, v: usize, class: EdgeClass) -> Self {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        Edge { a, b, class }
    }
}

/// A simple undirected network whose edges carry an [`EdgeClass`].
///
/// Immutable once built. Adjacency is kept in compressed form with each
/// node's neighbours sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    neighbor_class: Vec<EdgeClass>,
    positions: Option<Vec<Vec<f64>>>,
}

impl Network {
    /// Builds a network, rejecting self-loops, parallel edges (of any class
    /// combination) and out-of-range endpoints.
    pub fn new(n: usize, edges: Vec<Edge>, positions: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("network needs at least one node"));
        }
        if n > u32::MAX as usize {
            return Err(Error::invalid("too many nodes"));
        }
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge::new(e.a, e.b, e.class))
            .collect();
        edges.sort_unstable();
        for w in edges.windows(2) {
            if (w[0].a, w[0].b) == (w[1].a, w[1].b) {
                return Err(Error::invalid(format!(
                    "parallel edge {}-{}",
                    w[0].a, w[0].b
                )));
            }
        }
        let mut degree = vec![0usize; n];
        for e in &edges {
            if e.a == e.b {
                return Err(Error::invalid(format!("self-loop at node {}", e.a)));
            }
            if e.b >= n {
                return Err(Error::invalid(format!(
                    "edge endpoint {} out of range 0..{n}",
                    e.b
                )));
            }
            degree[e.a] += 1;
            degree[e.b] += 1;
        }
        if let Some(pos) = &positions {
            if pos.len() != n {
                return Err(Error::invalid(format!(
                    "{} positions given for {n} nodes",
                    pos.len()
                )));
            }
            let dim = pos.first().map_or(0, Vec::len);
            if pos.iter().any(|p| p.len() != dim) {
                return Err(Error::invalid("positions have inconsistent dimension"));
            }
        }

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        let mut neighbor_class = vec![EdgeClass::Unlabeled; offsets[n]];
        for e in &edges {
            for (u, v) in [(e.a, e.b), (e.b, e.a)] {
                neighbors[cursor[u]] = v as u32;
                neighbor_class[cursor[u]] = e.class;
                cursor[u] += 1;
            }
        }
        for u in 0..n {
            let range = offsets[u]..offsets[u + 1];
            let mut pairs: Vec<(u32, EdgeClass)> = neighbors[range.clone()]
                .iter()
                .copied()
                .zip(neighbor_class[range.clone()].iter().copied())
                .collect();
            pairs.sort_unstable_by_key(|p| p.0);
            for (k, (v, c)) in pairs.into_iter().enumerate() {
                neighbors[range.start + k] = v;
                neighbor_class[range.start + k] = c;
            }
        }

        Ok(Self {
            n,
            edges,
            offsets,
            neighbors,
            neighbor_class,
            positions,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Degree counting only edges of one class.
    pub fn class_degree(&self, node: usize, class: EdgeClass) -> usize {
        self.neighbor_classes(node)
            .iter()
            .filter(|&&c| c == class)
            .count()
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Classes of the edges to [`Network::neighbors`], index-aligned.
    pub fn neighbor_classes(&self, node: usize) -> &[EdgeClass] {
        &self.neighbor_class[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    pub fn positions(&self) -> Option<&[Vec<f64>]> {
        self.positions.as_deref()
    }

    pub fn count_class(&self, class: EdgeClass) -> usize {
        self.edges.iter().filter(|e| e.class == class).count()
    }
}

/// A sample-by-feature matrix with optional per-row category labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: crate::DenseMatrix,
    labels: Option<Vec<String>>,
}

impl FeatureMatrix {
    pub fn new(values: crate::DenseMatrix, labels: Option<Vec<String>>) -> Result<Self> {
        if !values.is_finite() {
            return Err(Error::NonFinite(
                "feature matrix contains NaN or infinity".into(),
            ));
        }
        if let Some(l) = &labels {
            if l.len() != values.rows() {
                return Err(Error::invalid(format!(
                    "{} labels for {} rows",
                    l.len(),
                    values.rows()
                )));
            }
        }
        Ok(Self { values, labels })
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &crate::DenseMatrix {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Mean non-geometric degree over mean geometric degree.
pub fn noisiness(net: &Network) -> Result<f64> {
    let geometric = net.count_class(EdgeClass::Geometric);
    if geometric == 0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(net.count_class(EdgeClass::NonGeometric) as f64 / geometric as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Network {
        let edges = (0..n - 1)
            .map(|i| Edge::new(i, i + 1, EdgeClass::Unlabeled))
            .collect();
        Network::new(n, edges, None).unwrap()
    }

    #[test]
    fn adjacency_matches_edges() {
        let net = Network::new(
            4,
            vec![
                Edge::new(3, 0, EdgeClass::Geometric),
                Edge::new(0, 1, EdgeClass::NonGeometric),
                Edge::new(2, 0, EdgeClass::Geometric),
            ],
            None,
        )
        .unwrap();
        assert_eq!(net.neighbors(0), &[1, 2, 3]);
        assert_eq!(
            net.neighbor_classes(0),
            &[
                EdgeClass::NonGeometric,
                EdgeClass::Geometric,
                EdgeClass::Geometric
            ]
        );
        assert_eq!(net.degree(0), 3);
        assert_eq!(net.degree(1), 1);
        assert!(net.has_edge(3, 0));
        assert!(!net.has_edge(1, 2));
        let total: usize = (0..4).map(|u| net.degree(u)).sum();
        assert_eq!(total, 2 * net.edge_count());
    }

    #[test]
    fn rejects_self_loops_and_parallel_edges() {
        let e = Network::new(3, vec![Edge::new(1, 1, EdgeClass::Unlabeled)], None);
        assert!(e.unwrap_err().is_invalid_argument());
        let e = Network::new(
            3,
            vec![
                Edge::new(0, 1, EdgeClass::Geometric),
                Edge::new(1, 0, EdgeClass::NonGeometric),
            ],
            None,
        );
        assert!(e.unwrap_err().is_invalid_argument());
        let e = Network::new(3, vec![Edge::new(0, 3, EdgeClass::Unlabeled)], None);
        assert!(e.unwrap_err().is_invalid_argument());
    }

    #[test]
    fn noisiness_requires_geometric_edges() {
        assert!(matches!(noisiness(&path(4)), Err(Error::UndefinedRatio)));
    }

    #[test]
    fn edge_class_tags_round_trip() {
        for c in EdgeClass::ALL {
            assert_eq!(c.tag().parse::<EdgeClass>().unwrap(), c);
        }
        assert!("X".parse::<EdgeClass>().is_err());
    }
}
