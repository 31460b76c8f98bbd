//! Low-dimensional projections of contagion maps and label-aware scoring.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::matrix::euclidean;
use crate::{DenseMatrix, Error, Result};

/// QR sweeps allowed per matrix dimension before giving up.
const EIGEN_SWEEPS_PER_DIM: usize = 100;

/// Principal-component scores and the variance they carry.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// `n x k` scores; every column has zero mean.
    pub points: DenseMatrix,
    /// Leading covariance eigenvalues, descending.
    pub explained: Vec<f64>,
}

/// Projects the rows of `matrix` onto their top `k` principal components.
///
/// Components come from the eigendecomposition of the sample covariance (or
/// of the Gram matrix when there are more columns than rows, which has the
/// same non-zero spectrum). Each component is oriented so that its loading
/// with the largest magnitude is positive.
pub fn pca_project(matrix: &DenseMatrix, k: usize) -> Result<Projection> {
    let (n, m) = (matrix.rows(), matrix.cols());
    if k == 0 || k > n.min(m) {
        return Err(Error::invalid(format!(
            "k = {k} must be in 1..={}",
            n.min(m)
        )));
    }
    if n < 2 {
        return Err(Error::invalid("PCA needs at least two rows"));
    }
    if !matrix.is_finite() {
        return Err(Error::NonFinite("PCA input".into()));
    }

    let centered = {
        let mut x = DMatrix::from_row_slice(n, m, matrix.as_slice());
        for mut col in x.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        x
    };
    let scale = 1.0 / (n as f64 - 1.0);
    let use_gram = m > n;
    let small = if use_gram {
        &centered * centered.transpose() * scale
    } else {
        centered.transpose() * &centered * scale
    };
    let dim = small.nrows();
    let max_iterations = EIGEN_SWEEPS_PER_DIM * dim;
    let eig = SymmetricEigen::try_new(small, f64::EPSILON, max_iterations)
        .ok_or(Error::NoConvergence { max_iterations })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let mut points = DenseMatrix::zeros(n, k);
    let mut explained = Vec::with_capacity(k);
    for (c, &idx) in order.iter().take(k).enumerate() {
        let lambda = eig.eigenvalues[idx].abs();
        explained.push(lambda);
        let vector = eig.eigenvectors.column(idx);
        let loading = if use_gram {
            let v = centered.transpose() * vector;
            let norm = v.norm();
            if norm <= f64::EPSILON * (1.0 + lambda) {
                continue;
            }
            v / norm
        } else {
            vector.into_owned()
        };
        let pivot = loading
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &v)| {
                if v.abs() > best.1.abs() {
                    (i, v)
                } else {
                    best
                }
            });
        let sign = if pivot.1 < 0.0 { -1.0 } else { 1.0 };
        let scores = &centered * loading * sign;
        for (i, s) in scores.iter().enumerate() {
            points.set(i, c, *s);
        }
    }
    Ok(Projection { points, explained })
}

/// Ratio of the median inter-label distance to the median intra-label
/// distance between rows.
pub fn cell_group_separation<S: AsRef<str>>(points: &DenseMatrix, labels: &[S]) -> Result<f64> {
    if labels.len() != points.rows() {
        return Err(Error::invalid(format!(
            "{} labels for {} rows",
            labels.len(),
            points.rows()
        )));
    }
    let mut class_of: HashMap<&str, usize> = HashMap::new();
    let mut sizes = Vec::new();
    let ids: Vec<usize> = labels
        .iter()
        .map(|l| {
            let next = class_of.len();
            let id = *class_of.entry(l.as_ref()).or_insert(next);
            if id == sizes.len() {
                sizes.push(0usize);
            }
            sizes[id] += 1;
            id
        })
        .collect();
    if sizes.len() < 2 {
        return Err(Error::DegenerateLabels(
            "need at least two distinct labels".into(),
        ));
    }
    if let Some((label, _)) = class_of.iter().find(|(_, &id)| sizes[id] < 2) {
        return Err(Error::DegenerateLabels(format!(
            "label {label:?} has a single member"
        )));
    }

    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for i in 0..points.rows() {
        for j in i + 1..points.rows() {
            let d = euclidean(points.row(i), points.row(j));
            if ids[i] == ids[j] {
                intra.push(d);
            } else {
                inter.push(d);
            }
        }
    }
    let intra_median = median(&mut intra);
    if intra_median == 0.0 {
        return Err(Error::ZeroIntraMedian);
    }
    Ok(median(&mut inter) / intra_median)
}

/// Median of a non-empty pool; even sizes average the two central values.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Suggested truncation `max(1, round(n / 10))`.
pub fn heuristic_truncation(n: usize) -> usize {
    ((n + 5) / 10).max(1)
}

/// CSV with columns `node,pc1..pck`, then `label` and `activation_time` when
/// given. Unactivated nodes have an empty activation time.
pub fn write_projection_csv(
    proj: &Projection,
    labels: Option<&[String]>,
    activation: Option<&[Option<u32>]>,
    mut out: impl Write,
) -> Result<()> {
    let k = proj.points.cols();
    let mut header = vec!["node".to_string()];
    header.extend((1..=k).map(|c| format!("pc{c}")));
    if labels.is_some() {
        header.push("label".into());
    }
    if activation.is_some() {
        header.push("activation_time".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for i in 0..proj.points.rows() {
        write!(out, "{i}")?;
        for v in proj.points.row(i) {
            write!(out, ",{v}")?;
        }
        if let Some(l) = labels {
            write!(out, ",{}", l[i])?;
        }
        if let Some(a) = activation {
            match a[i] {
                Some(t) => write!(out, ",{t}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn line_in_the_plane() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![i as f64, 2.0 * i as f64 + 1.0])
            .collect();
        let p = pca_project(&matrix(&rows), 1).unwrap();
        // total variance: var(x) + var(2x) = 5 * 3.5
        assert!((p.explained[0] - 17.5).abs() < 1e-9);
        let full = pca_project(&matrix(&rows), 2).unwrap();
        assert!(full.explained[1].abs() < 1e-9);
        let mean: f64 = (0..6).map(|i| p.points.get(i, 0)).sum::<f64>() / 6.0;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn gram_route_matches_covariance_route() {
        let rows = vec![
            vec![1.0, 0.0, 2.0, 5.0],
            vec![0.5, 1.0, -1.0, 2.0],
            vec![3.0, 2.0, 0.0, 1.0],
        ];
        let wide = pca_project(&matrix(&rows), 2).unwrap();
        let tall_rows: Vec<Vec<f64>> = rows.iter().chain(rows.iter()).cloned().collect();
        let tall = pca_project(&matrix(&tall_rows), 2).unwrap();
        for c in 0..2 {
            // duplicating rows scales the covariance by 2(n-1)/(2n-1) = 4/5
            assert!((wide.explained[c] * 0.8 - tall.explained[c]).abs() < 1e-9);
            for i in 0..3 {
                assert!((wide.points.get(i, c) - tall.points.get(i, c)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pca_errors() {
        let m = matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(pca_project(&m, 3).unwrap_err().is_invalid_argument());
        assert!(pca_project(&m, 0).unwrap_err().is_invalid_argument());
    }

    #[test]
    fn separation_of_two_clusters() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            rows.push(vec![(i % 3) as f64 * 0.1, (i % 2) as f64 * 0.1]);
            labels.push("a");
            rows.push(vec![100.0 + (i % 3) as f64 * 0.1, (i % 2) as f64 * 0.1]);
            labels.push("b");
        }
        let c = cell_group_separation(&matrix(&rows), &labels).unwrap();
        assert!(c > 100.0);
    }

    #[test]
    fn separation_errors() {
        let m = matrix(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        assert!(matches!(
            cell_group_separation(&m, &["a", "a", "a", "a"]),
            Err(Error::DegenerateLabels(_))
        ));
        assert!(matches!(
            cell_group_separation(&m, &["a", "a", "a", "b"]),
            Err(Error::DegenerateLabels(_))
        ));
        let dup = matrix(&[vec![0.0], vec![0.0], vec![1.0], vec![1.0]]);
        assert!(matches!(
            cell_group_separation(&dup, &["a", "a", "b", "b"]),
            Err(Error::ZeroIntraMedian)
        ));
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn heuristic() {
        assert_eq!(heuristic_truncation(400), 40);
        assert_eq!(heuristic_truncation(223), 22);
        assert_eq!(heuristic_truncation(5), 1);
        assert_eq!(heuristic_truncation(1), 1);
    }
}
