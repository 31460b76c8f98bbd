use std::collections::BTreeSet;

use super::{Edge, EdgeClass, FeatureMatrix, Network};
use crate::matrix::euclidean;
use crate::{Error, Result};

/// Union-symmetrised k-nearest-neighbour graph on the rows of `features`.
///
/// `{i, j}` is an edge when either row is among the other's `k` nearest
/// rows by Euclidean distance. Equal distances rank the lower row index
/// first. All edges are [`EdgeClass::Unlabeled`].
pub fn knn_graph(features: &FeatureMatrix, k: usize) -> Result<Network> {
    let rows = features.rows();
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if k >= rows {
        return Err(Error::invalid(format!(
            "k = {k} must be below the row count {rows}"
        )));
    }
    let values = features.values();
    let mut pairs = BTreeSet::new();
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(rows - 1);
    for i in 0..rows {
        dist.clear();
        dist.extend(
            (0..rows)
                .filter(|&j| j != i)
                .map(|j| (euclidean(values.row(i), values.row(j)), j)),
        );
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        dist.select_nth_unstable_by(k - 1, cmp);
        for &(_, j) in &dist[..k] {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| Edge::new(a, b, EdgeClass::Unlabeled))
        .collect();
    Network::new(rows, edges, None)
}
