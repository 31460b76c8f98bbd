//! Derived quantities checked against values computed independently here.

mod common;

use rand::Rng;
use tcmap::bench::loglog_fit;
use tcmap::contagion::{contagion_map, load_map, map_sidecar_path, save_map, MapMode};
use tcmap::embed::cell_group_separation;
use tcmap::graph::{load_network, noisy_ring_lattice, save_network};
use tcmap::tda::{barcode_of_rows, ring_stability, rips_persistence, DistanceMatrix};

use common::{bars, brute_force_barcode, circle, random_cloud};

fn ols_slope(samples: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn noisy_power_law_recovers_exponent() {
    let mut rng = tcmap::seeded_rng(17);
    let samples: Vec<(f64, f64)> = (3..13)
        .map(|k| {
            let x = (1u64 << k) as f64;
            let noise = rng.random_range(0.95..1.05);
            (x, 2e-7 * x.powf(1.79) * noise)
        })
        .collect();
    let fit = loglog_fit(&samples).unwrap();
    assert!((fit.gamma - 1.79).abs() <= 0.15, "gamma {}", fit.gamma);
    assert!((fit.gamma - ols_slope(&samples)).abs() <= 1e-12);
    assert!(fit.r_squared > 0.99);
}

#[test]
fn random_labels_give_separation_near_one() {
    let mut rng = tcmap::seeded_rng(5);
    let cloud = random_cloud(&mut rng, 240, 3);
    let labels: Vec<String> = (0..240)
        .map(|_| format!("g{}", rng.random_range(0..4)))
        .collect();
    let c = cell_group_separation(&cloud, &labels).unwrap();
    assert!((c - 1.0).abs() < 0.1, "C = {c}");
}

#[test]
fn circle_has_one_long_loop() {
    let n = 24;
    let dist = DistanceMatrix::from_points(&circle(n, 1.0)).unwrap();
    let bc = rips_persistence(&dist, dist.max_distance()).unwrap();
    assert_eq!(bc.h1.len(), 1);
    // born when neighbouring points join, filled once a triangle spans the
    // centre: the shortest chord skipping just under a third of the circle
    let chord = |k: usize| 2.0 * (std::f64::consts::PI * k as f64 / n as f64).sin();
    let loop_bar = bc.h1[0];
    assert!((loop_bar.birth - chord(1)).abs() < 1e-12);
    assert!((loop_bar.death - chord(n / 3)).abs() < 1e-12);
    assert_eq!(bc.h0.len(), n);
    assert!((ring_stability(&bc).unwrap() - (chord(n / 3) - chord(1))).abs() < 1e-12);
}

#[test]
fn clean_ring_map_has_a_single_loop() {
    let net = noisy_ring_lattice(60, 4, 0, 0).unwrap();
    let map = contagion_map(&net, 0.3, MapMode::Full).unwrap();
    let bc = barcode_of_rows(&map.symmetric_points(), None, 0).unwrap();
    let span = DistanceMatrix::from_points(&map.symmetric_points())
        .unwrap()
        .max_distance();
    let long: Vec<_> = bc.h1.iter().filter(|i| i.lifetime() > 0.1 * span).collect();
    assert_eq!(long.len(), 1, "{:?}", bc.h1);
}

#[test]
fn subsampled_barcode_matches_oracle_on_the_subsample() {
    let mut rng = tcmap::seeded_rng(3);
    let cloud = random_cloud(&mut rng, 12, 2);
    let fast = bars(&barcode_of_rows(&cloud, Some(7), 11).unwrap());
    assert_eq!(fast.0.len(), 7);
    // same seed, same subset
    assert_eq!(fast, bars(&barcode_of_rows(&cloud, Some(7), 11).unwrap()));
    // a full-size "subsample" is the whole cloud
    let dist = DistanceMatrix::from_points(&cloud).unwrap();
    let oracle = brute_force_barcode(&dist, dist.max_distance());
    let whole = bars(&barcode_of_rows(&cloud, Some(12), 0).unwrap());
    assert_eq!(whole.0.len(), oracle.0.len());
    assert_eq!(whole.1.len(), oracle.1.len());
    for (a, b) in whole
        .0
        .iter()
        .chain(&whole.1)
        .zip(oracle.0.iter().chain(&oracle.1))
    {
        assert!((a.0 - b.0).abs() < 1e-9 && (a.1 == b.1 || (a.1 - b.1).abs() < 1e-9));
    }
}

#[test]
fn network_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.edges");
    let net = noisy_ring_lattice(50, 4, 2, 8).unwrap();
    save_network(&net, &path).unwrap();
    let back = load_network(&path).unwrap();
    assert_eq!(back.node_count(), 50);
    assert_eq!(back.edges(), net.edges());
}

#[test]
fn map_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let net = noisy_ring_lattice(40, 4, 2, 1).unwrap();
    let map = contagion_map(&net, 0.3, MapMode::Truncated(6)).unwrap();
    save_map(&map, &path, serde_json::json!({"note": "x"})).unwrap();
    assert!(map_sidecar_path(&path).exists());
    let back = load_map(&path).unwrap();
    assert_eq!(back.sidecar.map_mode().unwrap(), MapMode::Truncated(6));
    assert_eq!(back.sidecar.placeholder, 12);
    assert_eq!(back.sidecar.metadata["note"], "x");
    assert_eq!(back.symmetric_points(), map.symmetric_points());
}

#[test]
fn missing_files_name_the_path() {
    let err = load_network("/nonexistent/dir/net.edges").unwrap_err();
    assert!(
        err.to_string().contains("/nonexistent/dir/net.edges"),
        "{err}"
    );
    let err = load_map("/nonexistent/dir/map.csv").unwrap_err();
    assert!(
        err.to_string().contains("/nonexistent/dir/map.json"),
        "{err}"
    );
}
