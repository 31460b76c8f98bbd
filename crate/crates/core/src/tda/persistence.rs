use std::collections::HashMap;

use super::union_find::ElderUnionFind;
use super::{Barcode, Filtration};
use crate::{Error, Result};

/// Persistent homology of an explicit filtration in dimensions 0 and 1.
///
/// H0 comes from a union-find sweep over the edges (elder rule, ties to the
/// lower vertex). H1 comes from reducing the triangle-to-edge boundary matrix
/// over GF(2). Zero-length intervals are dropped; cycles that never die get
/// an infinite death.
pub fn persistence(f: &Filtration) -> Result<Barcode> {
    let simplices = f.simplices();
    let mut index: HashMap<&[usize], usize> = HashMap::with_capacity(simplices.len());
    let mut vertex_slot: HashMap<usize, usize> = HashMap::new();
    let mut births = Vec::new();

    for (pos, s) in simplices.iter().enumerate() {
        if !s.value.is_finite() {
            return Err(Error::NonFinite(format!(
                "simplex {:?} has value {}",
                s.vertices, s.value
            )));
        }
        if s.vertices.is_empty() || s.vertices.len() > 3 {
            return Err(Error::FaceOrder(format!(
                "simplex {:?} must have 1 to 3 vertices",
                s.vertices
            )));
        }
        if s.vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::FaceOrder(format!(
                "simplex {:?} vertices must be strictly ascending",
                s.vertices
            )));
        }
        if pos > 0 && simplices[pos - 1].value > s.value {
            return Err(Error::FaceOrder(format!(
                "value of simplex {:?} decreases along the filtration",
                s.vertices
            )));
        }
        for face in facets(&s.vertices) {
            match index.get(face.as_slice()) {
                Some(&fp) if simplices[fp].value <= s.value => {}
                _ => {
                    return Err(Error::FaceOrder(format!(
                        "face {face:?} of {:?} does not precede it",
                        s.vertices
                    )))
                }
            }
        }
        if index.insert(&s.vertices, pos).is_some() {
            return Err(Error::FaceOrder(format!(
                "duplicate simplex {:?}",
                s.vertices
            )));
        }
        if s.dim() == 0 {
            vertex_slot.insert(s.vertices[0], births.len());
            births.push(s.value);
        }
    }

    let mut barcode = Barcode::default();

    // H0 and the split of edges into component-merging and cycle-creating.
    let mut uf = ElderUnionFind::new(&births);
    let mut creates_cycle = vec![false; simplices.len()];
    for (pos, s) in simplices.iter().enumerate() {
        if s.dim() != 1 {
            continue;
        }
        let (a, b) = (vertex_slot[&s.vertices[0]], vertex_slot[&s.vertices[1]]);
        match uf.union(a, b) {
            Some(birth) => barcode.push(0, birth, s.value),
            None => creates_cycle[pos] = true,
        }
    }
    let mut roots: Vec<usize> = (0..births.len()).map(|v| uf.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    for r in roots {
        barcode.push(0, uf.birth(r), f64::INFINITY);
    }

    // H1: standard column reduction, columns are triangles in order.
    let mut low_owner: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut killed = vec![false; simplices.len()];
    for s in simplices.iter().filter(|s| s.dim() == 2) {
        let mut column: Vec<usize> = facets(&s.vertices)
            .iter()
            .map(|face| index[face.as_slice()])
            .collect();
        column.sort_unstable();
        while let Some(&low) = column.last() {
            match low_owner.get(&low) {
                Some(other) => column = symmetric_difference(&column, other),
                None => break,
            }
        }
        if let Some(&low) = column.last() {
            killed[low] = true;
            barcode.push(1, simplices[low].value, s.value);
            low_owner.insert(low, column);
        }
    }
    for (pos, s) in simplices.iter().enumerate() {
        if creates_cycle[pos] && !killed[pos] {
            barcode.push(1, s.value, f64::INFINITY);
        }
    }

    barcode.canonicalize();
    Ok(barcode)
}

fn facets(vertices: &[usize]) -> Vec<Vec<usize>> {
    if vertices.len() < 2 {
        return Vec::new();
    }
    (0..vertices.len())
        .map(|skip| {
            vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// GF(2) sum of two sorted index lists.
fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
