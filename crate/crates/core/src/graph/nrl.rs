use std::collections::HashSet;
use std::f64::consts::PI;

use rand::Rng as _;

use super::{Edge, EdgeClass, Network};
use crate::{seeded_rng, Error, Result, Rng};

/// Restarts allowed before stub matching gives up.
pub const MAX_STUB_RESTARTS: usize = 1000;

/// Noisy ring lattice `NRL(n, d_g, d_ng)`.
///
/// Nodes sit at `(cos 2πi/n, sin 2πi/n)`. Each node is joined to its `d_g`
/// nearest ring neighbours by geometric edges and receives exactly `d_ng`
/// non-geometric edges from stub matching. Candidate pairs that would form a
/// self-loop, repeat a non-geometric edge, or duplicate a geometric edge are
/// rejected; a dead end restarts the matching from scratch.
pub fn noisy_ring_lattice(n: usize, d_g: usize, d_ng: usize, seed: u64) -> Result<Network> {
    if d_g == 0 || !d_g.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "geometric degree {d_g} must be even and positive"
        )));
    }
    if d_g >= n {
        return Err(Error::invalid(format!(
            "geometric degree {d_g} must be below n = {n}"
        )));
    }
    if !(d_ng * n).is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "d_ng * n = {} must be even",
            d_ng * n
        )));
    }
    if d_g + d_ng >= n {
        return Err(Error::invalid(format!(
            "total degree {} must be below n = {n}",
            d_g + d_ng
        )));
    }

    let half = d_g / 2;
    let mut edges = Vec::with_capacity(n * (d_g + d_ng) / 2);
    for i in 0..n {
        for r in 1..=half {
            edges.push(Edge::new(i, (i + r) % n, EdgeClass::Geometric));
        }
    }

    let ring_distance = |u: usize, v: usize| {
        let d = u.abs_diff(v);
        d.min(n - d)
    };
    let mut rng = seeded_rng(seed);
    let pairs = stub_matching(
        n,
        d_ng,
        |u, v| ring_distance(u, v) <= half,
        MAX_STUB_RESTARTS,
        &mut rng,
    )?;
    edges.extend(
        pairs
            .into_iter()
            .map(|(u, v)| Edge::new(u, v, EdgeClass::NonGeometric)),
    );

    let positions = (0..n)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / n as f64;
            vec![theta.cos(), theta.sin()]
        })
        .collect();
    Network::new(n, edges, Some(positions))
}

/// Pairs up `degree` stubs per node uniformly at random.
///
/// `forbidden(u, v)` marks pairs that already share an edge. Self-loops and
/// repeated pairs are always rejected.
pub(crate) fn stub_matching(
    n: usize,
    degree: usize,
    forbidden: impl Fn(usize, usize) -> bool,
    max_restarts: usize,
    rng: &mut Rng,
) -> Result<Vec<(usize, usize)>> {
    for _ in 0..=max_restarts {
        if let Some(pairs) = match_once(n, degree, &forbidden, rng) {
            return Ok(pairs);
        }
    }
    Err(Error::GenerationFailed {
        restarts: max_restarts,
    })
}

fn match_once(
    n: usize,
    degree: usize,
    forbidden: &impl Fn(usize, usize) -> bool,
    rng: &mut Rng,
) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n)
        .flat_map(|i| std::iter::repeat_n(i, degree))
        .collect();
    let mut pairs = Vec::with_capacity(stubs.len() / 2);
    let mut used: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len() / 2);
    let valid = |u: usize, v: usize, used: &HashSet<(usize, usize)>| {
        u != v && !forbidden(u, v) && !used.contains(&(u.min(v), u.max(v)))
    };

    let mut rejections = 0usize;
    while stubs.len() >= 2 {
        let len = stubs.len();
        let i = rng.random_range(0..len);
        let mut j = rng.random_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        let (u, v) = (stubs[i], stubs[j]);
        if valid(u, v, &used) {
            used.insert((u.min(v), u.max(v)));
            pairs.push((u, v));
            stubs.swap_remove(i.max(j));
            stubs.swap_remove(i.min(j));
            rejections = 0;
            continue;
        }
        rejections += 1;
        if rejections > 64 * len {
            // Confirm we are stuck before throwing the attempt away.
            let stuck = !(0..len).any(|a| (a + 1..len).any(|b| valid(stubs[a], stubs[b], &used)));
            if stuck {
                return None;
            }
            rejections = 0;
        }
    }
    Some(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_ring_lattice() {
        let net = noisy_ring_lattice(400, 6, 0, 1).unwrap();
        assert_eq!(net.count_class(EdgeClass::NonGeometric), 0);
        assert!((0..400).all(|i| net.degree(i) == 6));
        assert_eq!(super::super::noisiness(&net).unwrap(), 0.0);
    }

    #[test]
    fn small_lattice_has_exact_degrees() {
        let net = noisy_ring_lattice(50, 2, 2, 3).unwrap();
        for i in 0..50 {
            assert_eq!(net.class_degree(i, EdgeClass::Geometric), 2);
            assert_eq!(net.class_degree(i, EdgeClass::NonGeometric), 2);
        }
        assert_eq!(super::super::noisiness(&net).unwrap(), 1.0);
    }

    #[test]
    fn positions_lie_on_unit_circle() {
        let net = noisy_ring_lattice(12, 2, 1, 0).unwrap();
        let pos = net.positions().unwrap();
        assert!((pos[3][0]).abs() < 1e-15 && (pos[3][1] - 1.0).abs() < 1e-15);
        for p in pos {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_errors() {
        for (n, dg, dng) in [(10, 3, 0), (10, 0, 2), (10, 10, 0), (9, 2, 1), (10, 6, 4)] {
            let err = noisy_ring_lattice(n, dg, dng, 0).unwrap_err();
            assert!(err.is_invalid_argument(), "{n} {dg} {dng}: {err}");
        }
    }

    #[test]
    fn dense_matching_still_succeeds() {
        // complement of the ring is a single perfect matching of antipodes
        let net = noisy_ring_lattice(8, 6, 1, 11).unwrap();
        for e in net
            .edges()
            .iter()
            .filter(|e| e.class == EdgeClass::NonGeometric)
        {
            assert_eq!(e.b - e.a, 4);
        }
    }

    #[test]
    fn impossible_matching_reports_failure() {
        let mut rng = seeded_rng(0);
        let err = stub_matching(6, 2, |_, _| true, MAX_STUB_RESTARTS, &mut rng).unwrap_err();
        assert!(matches!(err, Error::GenerationFailed { restarts: 1000 }));
    }

    #[test]
    fn seed_controls_output() {
        let a = noisy_ring_lattice(200, 6, 2, 5).unwrap();
        let b = noisy_ring_lattice(200, 6, 2, 5).unwrap();
        let c = noisy_ring_lattice(200, 6, 2, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.edges(), c.edges());
    }
}
