use std::cmp::Ordering;

use super::{DistanceMatrix, PointCloud};
use crate::{Error, Result};

/// A simplex of dimension 0, 1 or 2 with its filtration value.
///
/// Vertices are kept in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl Simplex {
    pub fn new(mut vertices: Vec<usize>, value: f64) -> Self {
        vertices.sort_unstable();
        Self { vertices, value }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Filtration order: value, then dimension, then vertex tuple.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// An ordered list of simplices. [`rips_filtration`] always produces a valid
/// one; hand-built filtrations are checked by [`super::persistence`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Filtration {
    simplices: Vec<Simplex>,
}

impl Filtration {
    /// Wraps simplices in the given order without validating it.
    pub fn from_simplices(simplices: Vec<Simplex>) -> Self {
        Self { simplices }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }
}

/// Vietoris-Rips filtration up to triangles, truncated at `max_scale`.
///
/// Vertices enter at 0, an edge at its length, a triangle at its longest
/// edge. Materialises every simplex, so it is meant for small clouds; the
/// persistence of large clouds goes through [`super::rips_persistence`].
pub fn rips_filtration(pc: &PointCloud, max_scale: f64) -> Result<Filtration> {
    if max_scale.is_nan() || max_scale < 0.0 {
        return Err(Error::invalid(format!(
            "max_scale {max_scale} must be non-negative"
        )));
    }
    let dist = pc.distances()?;
    Ok(rips_from_distances(&dist, max_scale))
}

pub(crate) fn rips_from_distances(dist: &DistanceMatrix, max_scale: f64) -> Filtration {
    let n = dist.len();
    let mut simplices: Vec<Simplex> = (0..n).map(|i| Simplex::new(vec![i], 0.0)).collect();
    for a in 0..n {
        for b in a + 1..n {
            let dab = dist.get(a, b);
            if dab > max_scale {
                continue;
            }
            simplices.push(Simplex::new(vec![a, b], dab));
            for c in b + 1..n {
                let value = dab.max(dist.get(a, c)).max(dist.get(b, c));
                if value <= max_scale {
                    simplices.push(Simplex::new(vec![a, b, c], value));
                }
            }
        }
    }
    simplices.sort_by(Simplex::filtration_cmp);
    Filtration { simplices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DenseMatrix;

    fn square() -> PointCloud {
        PointCloud::Points(
            DenseMatrix::from_rows(&[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn two_points() {
        let pc = PointCloud::Points(DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap());
        let f = rips_filtration(&pc, 2.0).unwrap();
        assert_eq!(f.count_dim(0), 2);
        assert_eq!(f.count_dim(1), 1);
        assert_eq!(f.simplices()[2].value, 1.0);
    }

    #[test]
    fn unit_square_enumeration() {
        let f = rips_filtration(&square(), 2.0).unwrap();
        assert_eq!(f.len(), 14);
        let edges: Vec<f64> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1)
            .map(|s| s.value)
            .collect();
        assert_eq!(&edges[..4], &[1.0; 4]);
        assert_eq!(&edges[4..], &[2f64.sqrt(); 2]);
        let tris: Vec<&Simplex> = f.simplices().iter().filter(|s| s.dim() == 2).collect();
        assert_eq!(tris.len(), 4);
        assert!(tris.iter().all(|t| t.value == 2f64.sqrt()));
        // faces come before cofaces
        for w in f.simplices().windows(2) {
            assert_ne!(w[0].filtration_cmp(&w[1]), Ordering::Greater);
        }
    }

    #[test]
    fn zero_scale_keeps_vertices_only() {
        let f = rips_filtration(&square(), 0.0).unwrap();
        assert_eq!(f.len(), 4);
        assert!(rips_filtration(&square(), -1.0).is_err());
    }
}
