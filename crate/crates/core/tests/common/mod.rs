//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand_distr::{Distribution, StandardNormal};
use tcmap::tda::{Barcode, DistanceMatrix};
use tcmap::DenseMatrix;

/// Barcode as plain `(birth, death)` lists, each sorted.
pub type Bars = (Vec<(f64, f64)>, Vec<(f64, f64)>);

pub fn bars(bc: &Barcode) -> Bars {
    let pick = |v: &[tcmap::tda::Interval]| v.iter().map(|i| (i.birth, i.death)).collect();
    (pick(&bc.h0), pick(&bc.h1))
}

/// Rips persistence by reducing the full boundary matrix of every simplex of
/// dimension 0, 1 and 2, with no shortcuts: no clearing, no union-find, no
/// cohomology. Simplices are ordered by (value, dimension, vertex tuple).
pub fn brute_force_barcode(dist: &DistanceMatrix, max_scale: f64) -> Bars {
    let n = dist.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|v| (0.0, vec![v])).collect();
    for a in 0..n {
        for b in a + 1..n {
            simplices.push((dist.get(a, b), vec![a, b]));
            for c in b + 1..n {
                let v = dist.get(a, b).max(dist.get(a, c)).max(dist.get(b, c));
                simplices.push((v, vec![a, b, c]));
            }
        }
    }
    simplices.retain(|s| s.0 <= max_scale);
    simplices.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.len().cmp(&y.1.len()))
            .then(x.1.cmp(&y.1))
    });
    let position = |verts: &[usize]| simplices.iter().position(|s| s.1 == verts).unwrap();

    let mut columns: Vec<Vec<bool>> = simplices
        .iter()
        .map(|(_, verts)| {
            let mut col = vec![false; simplices.len()];
            if verts.len() > 1 {
                for skip in 0..verts.len() {
                    let face: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    col[position(&face)] = true;
                }
            }
            col
        })
        .collect();
    let low = |col: &[bool]| col.iter().rposition(|&x| x);

    let m = simplices.len();
    for j in 0..m {
        while let Some(l) = low(&columns[j]) {
            let Some(k) = (0..j).find(|&k| low(&columns[k]) == Some(l)) else {
                break;
            };
            let other = columns[k].clone();
            for (x, y) in columns[j].iter_mut().zip(other) {
                *x ^= y;
            }
        }
    }

    let mut paired = vec![false; m];
    let (mut h0, mut h1) = (Vec::new(), Vec::new());
    for j in 0..m {
        if let Some(i) = low(&columns[j]) {
            paired[i] = true;
            paired[j] = true;
            let (birth, death) = (simplices[i].0, simplices[j].0);
            if death > birth {
                match simplices[i].1.len() {
                    1 => h0.push((birth, death)),
                    2 => h1.push((birth, death)),
                    _ => {}
                }
            }
        }
    }
    for j in 0..m {
        if !paired[j] {
            match simplices[j].1.len() {
                1 => h0.push((simplices[j].0, f64::INFINITY)),
                2 => h1.push((simplices[j].0, f64::INFINITY)),
                _ => {}
            }
        }
    }
    let by_birth = |x: &(f64, f64), y: &(f64, f64)| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1));
    h0.sort_by(by_birth);
    h1.sort_by(by_birth);
    (h0, h1)
}

/// Uniform points in `[0, 10)^dim`.
pub fn random_cloud(rng: &mut impl rand::Rng, n: usize, dim: usize) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..10.0)).collect())
        .collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

/// `n` evenly spaced points on a circle of radius `r`.
pub fn circle(n: usize, r: f64) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

/// Synthetic differentiation trajectory: `clusters` Gaussian blobs of
/// `per_cluster` points in `dim` dimensions with unit variance per
/// coordinate, centred at `spacing * c * u` for a random unit vector `u`.
/// Labels name the blob.
pub fn trajectory(
    seed: u64,
    clusters: usize,
    per_cluster: usize,
    dim: usize,
    spacing: f64,
) -> (DenseMatrix, Vec<String>) {
    let mut rng = tcmap::seeded_rng(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let dir: Vec<f64> = (0..dim).map(|_| normal()).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut rows = Vec::with_capacity(clusters * per_cluster);
    let mut labels = Vec::with_capacity(clusters * per_cluster);
    for c in 0..clusters {
        for _ in 0..per_cluster {
            rows.push(
                (0..dim)
                    .map(|d| dir[d] / norm * spacing * c as f64 + normal())
                    .collect(),
            );
            labels.push(format!("stage{c}"));
        }
    }
    (DenseMatrix::from_rows(&rows).unwrap(), labels)
}

/// Median of a non-empty list.
pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
