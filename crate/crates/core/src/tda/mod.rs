//! Vietoris-Rips persistent homology in dimensions 0 and 1.
//!
//! Two routes compute the same barcode: [`rips_filtration`] followed by
//! [`persistence`] materialises every simplex and reduces the boundary
//! matrix, while [`rips_persistence`] works on the distance matrix directly
//! and is the one used for contagion maps with hundreds of points.

mod filtration;
mod persistence;
mod rips;
mod union_find;

pub use filtration::{rips_filtration, Filtration, Simplex};
pub use persistence::persistence;
pub use rips::rips_persistence;

use std::io::Write;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::contagion::ContagionMap;
use crate::matrix::euclidean;
use crate::{seeded_rng, DenseMatrix, Error, Result};

/// Symmetric, non-negative distances with a zero diagonal. The triangle
/// inequality is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::invalid(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry {i} is not zero")));
            }
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !a.is_finite() {
                    return Err(Error::NonFinite(format!("distance ({i}, {j}) is {a}")));
                }
                if a != b {
                    return Err(Error::invalid(format!(
                        "distance ({i}, {j}) is not symmetric"
                    )));
                }
                if a < 0.0 {
                    return Err(Error::invalid(format!("distance ({i}, {j}) is negative")));
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Pairwise Euclidean distances between rows.
    pub fn from_points(points: &DenseMatrix) -> Result<Self> {
        if !points.is_finite() {
            return Err(Error::NonFinite("point coordinates".into()));
        }
        let n = points.rows();
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n.max(1))
            .enumerate()
            .for_each(|(i, row)| {
                for (j, d) in row.iter_mut().enumerate() {
                    if i != j {
                        // same operand order for (i, j) and (j, i) keeps it symmetric
                        let (a, b) = (i.min(j), i.max(j));
                        *d = euclidean(points.row(a), points.row(b));
                    }
                }
            });
        Ok(Self { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_distance(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every distance by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|d| d * c).collect(),
        }
    }
}

/// Input to the Rips construction: coordinates or precomputed distances.
#[derive(Debug, Clone, PartialEq)]
pub enum PointCloud {
    Points(DenseMatrix),
    Distances(DistanceMatrix),
}

impl PointCloud {
    pub fn distances(&self) -> Result<DistanceMatrix> {
        match self {
            PointCloud::Points(p) => DistanceMatrix::from_points(p),
            PointCloud::Distances(d) => Ok(d.clone()),
        }
    }
}

/// A persistence interval; `death` is `f64::INFINITY` for classes that
/// survive the whole filtration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }
}

/// Persistence intervals in dimensions 0 and 1, each sorted by
/// `(birth, death)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Barcode {
    pub h0: Vec<Interval>,
    pub h1: Vec<Interval>,
}

impl Barcode {
    /// Adds an interval unless it has zero length.
    pub(crate) fn push(&mut self, dim: usize, birth: f64, death: f64) {
        if death <= birth {
            return;
        }
        let target = if dim == 0 { &mut self.h0 } else { &mut self.h1 };
        target.push(Interval::new(birth, death));
    }

    pub(crate) fn canonicalize(&mut self) {
        for list in [&mut self.h0, &mut self.h1] {
            list.sort_by(|a, b| {
                a.birth
                    .total_cmp(&b.birth)
                    .then(a.death.total_cmp(&b.death))
            });
        }
    }

    pub fn dim(&self, dim: usize) -> &[Interval] {
        match dim {
            0 => &self.h0,
            _ => &self.h1,
        }
    }

    /// CSV with columns `dim,birth,death`; infinite deaths are written `inf`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "dim,birth,death")?;
        for dim in 0..2 {
            for i in self.dim(dim) {
                if i.death.is_finite() {
                    writeln!(out, "{dim},{},{}", i.birth, i.death)?;
                } else {
                    writeln!(out, "{dim},{},inf", i.birth)?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Ring stability: longest minus second-longest H1 lifetime.
///
/// No H1 intervals gives 0; a single interval gives its own lifetime.
pub fn ring_stability(bc: &Barcode) -> Result<f64> {
    if let Some(i) = bc.h1.iter().find(|i| !i.death.is_finite()) {
        return Err(Error::InfiniteInterval { birth: i.birth });
    }
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for i in &bc.h1 {
        let l = i.lifetime();
        if l > first {
            second = first;
            first = l;
        } else if l > second {
            second = l;
        }
    }
    Ok(first - second)
}

/// Barcode of the rows of `points`, optionally on a seeded uniform subsample
/// of `max_points` rows, filtered up to the largest pairwise distance.
pub fn barcode_of_rows(
    points: &DenseMatrix,
    max_points: Option<usize>,
    seed: u64,
) -> Result<Barcode> {
    let dist = match max_points {
        Some(m) if m < points.rows() => {
            if m == 0 {
                return Err(Error::invalid("max_points must be positive"));
            }
            let mut idx = sample(&mut seeded_rng(seed), points.rows(), m).into_vec();
            idx.sort_unstable();
            DistanceMatrix::from_points(&points.select_rows(&idx))?
        }
        _ => DistanceMatrix::from_points(points)?,
    };
    rips_persistence(&dist, dist.max_distance())
}

/// Ring stability of the symmetric map, treating each row as a point.
pub fn ring_stability_of_map(
    cm: &ContagionMap,
    max_points: Option<usize>,
    seed: u64,
) -> Result<f64> {
    ring_stability_of_rows(&cm.symmetric_points(), max_points, seed)
}

pub fn ring_stability_of_rows(
    points: &DenseMatrix,
    max_points: Option<usize>,
    seed: u64,
) -> Result<f64> {
    ring_stability(&barcode_of_rows(points, max_points, seed)?)
}
