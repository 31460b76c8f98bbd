//! Vietoris-Rips persistence without materialising the triangles.
//!
//! H1 is computed by reducing the coboundary matrix (persistent cohomology):
//! columns are the cycle-creating edges in reverse filtration order and the
//! pivot of a column is its earliest coface triangle. The resulting pairs are
//! the same as those of the homology reduction in [`super::persistence`],
//! because both use the total order (value, dimension, vertex tuple).
//!
//! Most columns are already reduced when first built, so the earliest coface
//! is found with a linear scan and a heap is only built on a pivot clash.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use super::union_find::ElderUnionFind;
use super::{Barcode, DistanceMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Key {
    value: f64,
    index: u64,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.index.cmp(&other.index))
    }
}

struct Complex<'a> {
    dist: &'a DistanceMatrix,
    n: u64,
    max_scale: f64,
    // sorted by (value, a, b)
    edges: Vec<(f64, u32, u32)>,
}

impl Complex<'_> {
    /// Lexicographic index of the sorted triple `x < y < z`.
    fn triangle_index(&self, mut v: [u32; 3]) -> u64 {
        v.sort_unstable();
        (v[0] as u64 * self.n + v[1] as u64) * self.n + v[2] as u64
    }

    fn for_each_coface(&self, edge: usize, mut f: impl FnMut(Key)) {
        let (dab, a, b) = self.edges[edge];
        let (ra, rb) = (self.dist.row(a as usize), self.dist.row(b as usize));
        for v in 0..self.n as u32 {
            if v == a || v == b {
                continue;
            }
            let value = dab.max(ra[v as usize]).max(rb[v as usize]);
            if value <= self.max_scale {
                f(Key {
                    value,
                    index: self.triangle_index([a, b, v]),
                });
            }
        }
    }

    fn earliest_coface(&self, edge: usize) -> Option<Key> {
        let mut best: Option<Key> = None;
        self.for_each_coface(edge, |k| {
            if best.is_none_or(|b| k < b) {
                best = Some(k);
            }
        });
        best
    }

    fn push_coboundary(&self, edge: usize, heap: &mut BinaryHeap<Reverse<Key>>) {
        self.for_each_coface(edge, |k| heap.push(Reverse(k)));
    }
}

/// Pops the smallest entry with odd multiplicity.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<Key>>) -> Option<Key> {
    while let Some(Reverse(top)) = heap.pop() {
        match heap.peek() {
            Some(Reverse(next)) if *next == top => {
                heap.pop();
            }
            _ => return Some(top),
        }
    }
    None
}

/// Vietoris-Rips barcode (dimensions 0 and 1) of a distance matrix,
/// filtered up to `max_scale`.
pub fn rips_persistence(dist: &DistanceMatrix, max_scale: f64) -> Result<Barcode> {
    if max_scale.is_nan() || max_scale < 0.0 {
        return Err(Error::invalid(format!(
            "max_scale {max_scale} must be non-negative"
        )));
    }
    let n = dist.len();
    if n as u64 > 2_000_000 {
        return Err(Error::invalid("too many points for triangle indexing"));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        let row = dist.row(a);
        for (b, &d) in row.iter().enumerate().skip(a + 1) {
            if d <= max_scale {
                edges.push((d, a as u32, b as u32));
            }
        }
    }
    edges.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let complex = Complex {
        dist,
        n: n as u64,
        max_scale,
        edges,
    };

    let mut barcode = Barcode::default();
    let mut uf = ElderUnionFind::new(&vec![0.0; n]);
    let mut cycle_edges = Vec::new();
    for (e, &(d, a, b)) in complex.edges.iter().enumerate() {
        match uf.union(a as usize, b as usize) {
            Some(birth) => barcode.push(0, birth, d),
            None => cycle_edges.push(e),
        }
    }
    for v in 0..n {
        if uf.find(v) == v {
            barcode.push(0, 0.0, f64::INFINITY);
        }
    }

    // pivot triangle -> reduction column (edges whose coboundaries were summed)
    let mut pivots: HashMap<u64, usize> = HashMap::new();
    let mut reductions: Vec<Vec<usize>> = Vec::new();
    let mut heap = BinaryHeap::new();

    for &e in cycle_edges.iter().rev() {
        let birth = complex.edges[e].0;
        let pivot = match complex.earliest_coface(e) {
            None => None,
            Some(k) if !pivots.contains_key(&k.index) => Some((k, vec![e])),
            Some(_) => {
                heap.clear();
                complex.push_coboundary(e, &mut heap);
                let mut reduction = vec![e];
                loop {
                    let Some(k) = pop_pivot(&mut heap) else {
                        break None;
                    };
                    let Some(&slot) = pivots.get(&k.index) else {
                        break Some((k, cancel_pairs(reduction)));
                    };
                    heap.push(Reverse(k));
                    for &f in &reductions[slot] {
                        complex.push_coboundary(f, &mut heap);
                    }
                    reduction.extend_from_slice(&reductions[slot]);
                }
            }
        };
        match pivot {
            Some((k, reduction)) => {
                pivots.insert(k.index, reductions.len());
                reductions.push(reduction);
                barcode.push(1, birth, k.value);
            }
            None => barcode.push(1, birth, f64::INFINITY),
        }
    }

    barcode.canonicalize();
    Ok(barcode)
}

/// Drops entries that appear an even number of times.
fn cancel_pairs(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tda::{persistence, rips_filtration, PointCloud};
    use crate::DenseMatrix;

    fn circle(n: usize) -> DenseMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        DenseMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn circle_has_one_dominant_loop() {
        let d = DistanceMatrix::from_points(&circle(24)).unwrap();
        let bc = rips_persistence(&d, d.max_distance()).unwrap();
        assert!(!bc.h1.is_empty());
        let mut lifetimes: Vec<f64> = bc.h1.iter().map(|i| i.death - i.birth).collect();
        lifetimes.sort_by(|a, b| b.total_cmp(a));
        assert!(lifetimes[0] > 1.0);
        assert!(lifetimes.get(1).copied().unwrap_or(0.0) < 0.1 * lifetimes[0]);
        assert_eq!(bc.h0.iter().filter(|i| i.death.is_infinite()).count(), 1);
    }

    #[test]
    fn agrees_with_explicit_reduction() {
        let pts = DenseMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![2.0, 0.1],
            vec![3.9, 0.0],
            vec![4.1, 2.0],
            vec![2.1, 3.7],
            vec![0.2, 2.2],
            vec![1.9, 1.8],
            vec![6.0, 1.0],
            vec![5.1, 3.3],
        ])
        .unwrap();
        let pc = PointCloud::Points(pts.clone());
        let d = DistanceMatrix::from_points(&pts).unwrap();
        for scale in [1.5, 2.5, 3.0, d.max_distance()] {
            let explicit = persistence(&rips_filtration(&pc, scale).unwrap()).unwrap();
            assert_eq!(
                rips_persistence(&d, scale).unwrap(),
                explicit,
                "scale {scale}"
            );
        }
    }

    #[test]
    fn parity_cancellation() {
        assert_eq!(cancel_pairs(vec![3, 1, 3, 2, 1, 1]), vec![1, 2]);
    }
}
