use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use tcmap::bench::{self, AlphaConfig, ScalingReport, TimingConfig};
use tcmap::contagion::{self, contagion_map, ContagionMap, MapMode};
use tcmap::embed::{self, Projection};
use tcmap::graph::{self, EdgeClass, FeatureMatrix, Network};
use tcmap::tda::{self, Barcode};
use tcmap::{DenseMatrix, Error, Result};

use crate::{
    Bench, BifurcationArgs, Command, EmbedArgs, Generate, KnnArgs, MapArgs, NrlArgs, PersistArgs,
    PipelineArgs, SizeArgs, StepsArgs, TimingArgs,
};

pub fn run(command: Command, workers: Option<usize>) -> Result<()> {
    match command {
        Command::Generate(Generate::Nrl(a)) => generate_nrl(&a),
        Command::Generate(Generate::Knn(a)) => generate_knn(&a),
        Command::Map(a) => map(&a),
        Command::Persist(a) => persist(&a),
        Command::Embed(a) => embed_cmd(&a),
        Command::Bifurcation(a) => bifurcation(&a),
        Command::Bench(Bench::Size(a)) => bench_size(&a, workers),
        Command::Bench(Bench::Steps(a)) => bench_steps(&a, workers),
        Command::Pipeline(a) => pipeline(&a),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(BufWriter::new(file))
}

/// `# tcmap <version>` followed by one `# key=value` line per entry.
fn write_header(out: &mut impl Write, params: &[(&str, String)]) -> Result<()> {
    writeln!(out, "# tcmap {}", tcmap::VERSION)?;
    for (k, v) in params {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn write_json(value: &impl serde::Serialize, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            let mut out = create(path)?;
            writeln!(out, "{text}")?;
            out.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn nrl_comments(a: &NrlArgs) -> Vec<String> {
    vec![
        format!("tcmap {}", tcmap::VERSION),
        format!(
            "source=nrl n={} d_g={} d_ng={} seed={}",
            a.n, a.dg, a.dng, a.seed
        ),
    ]
}

fn write_network_file(net: &Network, path: &Path, comments: &[String]) -> Result<()> {
    graph::write_network(net, create(path)?, comments)
}

fn network_summary(net: &Network) -> String {
    let n = net.node_count();
    let (min_deg, max_deg) = (0..n).fold((usize::MAX, 0), |(lo, hi), i| {
        let d = net.degree(i);
        (lo.min(d), hi.max(d))
    });
    let mut line = format!(
        "nodes={n} edges={} geometric={} non_geometric={} unlabeled={} degree={min_deg}..{max_deg}",
        net.edge_count(),
        net.count_class(EdgeClass::Geometric),
        net.count_class(EdgeClass::NonGeometric),
        net.count_class(EdgeClass::Unlabeled),
    );
    if let Ok(alpha) = graph::noisiness(net) {
        line.push_str(&format!(" alpha={alpha}"));
    }
    line
}

fn generate_nrl(a: &NrlArgs) -> Result<()> {
    let net = graph::noisy_ring_lattice(a.n, a.dg, a.dng, a.seed)?;
    write_network_file(&net, &a.out, &nrl_comments(a))?;
    println!("{}", network_summary(&net));
    Ok(())
}

fn knn_comments(input: &Path, k: usize) -> Vec<String> {
    vec![
        format!("tcmap {}", tcmap::VERSION),
        format!("source=knn input={} k={k}", input.display()),
    ]
}

fn generate_knn(a: &KnnArgs) -> Result<()> {
    let features = graph::load_feature_matrix(&a.input, a.labeled)?;
    let net = graph::knn_graph(&features, a.k)?;
    write_network_file(&net, &a.out, &knn_comments(&a.input, a.k))?;
    println!("{}", network_summary(&net));
    Ok(())
}

fn map_mode(truncate: Option<usize>) -> Result<MapMode> {
    match truncate {
        None => Ok(MapMode::Full),
        Some(0) => Err(invalid("--truncate must be at least 1")),
        Some(s) => Ok(MapMode::Truncated(s)),
    }
}

fn map_metadata(net_path: &Path, threshold: f64, mode: MapMode) -> Value {
    json!({
        "network": net_path.display().to_string(),
        "threshold": threshold,
        "mode": mode.to_string(),
    })
}

fn map(a: &MapArgs) -> Result<()> {
    let mode = map_mode(a.truncate)?;
    let net = graph::load_network(&a.net)?;
    let cm = contagion_map(&net, a.threshold, mode)?;
    contagion::save_map(&cm, &a.out, map_metadata(&a.net, a.threshold, mode))?;
    if let Some(path) = &a.telemetry {
        let seeds = contagion::cluster_seed(&net, a.telemetry_node)?;
        let record = contagion::wtm_run(&net, &seeds, a.threshold, mode.steps())?;
        let mut out = create(path)?;
        write_header(
            &mut out,
            &[
                ("network", a.net.display().to_string()),
                ("T", a.threshold.to_string()),
                ("mode", mode.to_string()),
                ("seed_node", a.telemetry_node.to_string()),
            ],
        )?;
        contagion::write_telemetry_csv(&record, out)?;
    }
    println!(
        "n={} T={} mode={mode} placeholder={} out={}",
        cm.n(),
        a.threshold,
        cm.placeholder(),
        a.out.display()
    );
    Ok(())
}

fn write_barcode(bc: &Barcode, path: &Path, params: &[(&str, String)]) -> Result<()> {
    let mut out = create(path)?;
    write_header(&mut out, params)?;
    bc.write_csv(out)
}

fn barcode_params(map: &Path, subsample: Option<usize>, seed: u64) -> Vec<(&'static str, String)> {
    vec![
        ("map", map.display().to_string()),
        (
            "subsample",
            subsample.map_or("none".into(), |m| m.to_string()),
        ),
        ("seed", seed.to_string()),
    ]
}

fn persist(a: &PersistArgs) -> Result<()> {
    let stored = contagion::load_map(&a.map)?;
    let bc = tda::barcode_of_rows(&stored.symmetric_points(), a.subsample, a.seed)?;
    let delta = tda::ring_stability(&bc)?;
    write_barcode(&bc, &a.out, &barcode_params(&a.map, a.subsample, a.seed))?;
    println!("h0_intervals={} h1_intervals={}", bc.h0.len(), bc.h1.len());
    if let Some(top) = bc
        .h1
        .iter()
        .max_by(|x, y| x.lifetime().total_cmp(&y.lifetime()))
    {
        println!(
            "dominant_h1 birth={} death={} lifetime={}",
            top.birth,
            top.death,
            top.lifetime()
        );
    }
    println!("delta={delta}");
    Ok(())
}

fn load_labels(path: &Path, n: usize) -> Result<Vec<String>> {
    let features = graph::load_feature_matrix(path, true)?;
    let labels = features.labels().unwrap_or_default().to_vec();
    if labels.len() != n {
        return Err(invalid(format!(
            "{} has {} labels for a map of {n} nodes",
            path.display(),
            labels.len()
        )));
    }
    Ok(labels)
}

fn write_projection(
    proj: &Projection,
    labels: Option<&[String]>,
    activation: Option<&[Option<u32>]>,
    path: &Path,
    params: &[(&str, String)],
) -> Result<()> {
    let mut out = create(path)?;
    write_header(&mut out, params)?;
    embed::write_projection_csv(proj, labels, activation, out)
}

fn embed_cmd(a: &EmbedArgs) -> Result<()> {
    let stored = contagion::load_map(&a.map)?;
    let points = stored.symmetric_points();
    let labels = a
        .labels
        .as_deref()
        .map(|p| load_labels(p, stored.n()))
        .transpose()?;
    let activation = match (&a.net, a.color_node) {
        (Some(net_path), Some(j)) => {
            let net = graph::load_network(net_path)?;
            let mode = stored.sidecar.map_mode()?;
            let seeds = contagion::cluster_seed(&net, j)?;
            Some(contagion::wtm_run(&net, &seeds, stored.sidecar.threshold, mode.steps())?.times)
        }
        _ => None,
    };
    let proj = embed::pca_project(&points, a.k)?;
    write_projection(
        &proj,
        labels.as_deref(),
        activation.as_deref(),
        &a.out,
        &[("map", a.map.display().to_string()), ("k", a.k.to_string())],
    )?;
    let explained: Vec<String> = proj.explained.iter().map(f64::to_string).collect();
    println!("explained_variance={}", explained.join(","));
    if a.score {
        let labels = labels.as_deref().unwrap_or_default();
        println!("C={}", embed::cell_group_separation(&points, labels)?);
    }
    Ok(())
}

fn bifurcation(a: &BifurcationArgs) -> Result<()> {
    let alphas = bench::parse_range(&a.alphas)?;
    let thresholds = bench::parse_range(&a.thresholds)?;
    let grid = bench::bifurcation_sweep(a.n, a.dg, &thresholds, &alphas, a.s, a.seed)?;
    let mut out = create(&a.out)?;
    write_header(
        &mut out,
        &[
            ("n", a.n.to_string()),
            ("d_g", a.dg.to_string()),
            ("alphas", a.alphas.clone()),
            ("Ts", a.thresholds.clone()),
            ("s", a.s.to_string()),
            ("seed", a.seed.to_string()),
        ],
    )?;
    grid.write_csv(out)?;
    let wfp = grid.mean_delta(|r| r == contagion::Regime::WfpOnly);
    let rest = grid.mean_delta(|r| r != contagion::Regime::WfpOnly);
    let fmt = |v: Option<f64>| v.map_or("n/a".into(), |d| d.to_string());
    println!(
        "cells={} mean_delta_wfp_only={} mean_delta_other={}",
        alphas.len() * thresholds.len(),
        fmt(wfp),
        fmt(rest)
    );
    Ok(())
}

fn timing_config(t: &TimingArgs, workers: Option<usize>) -> TimingConfig {
    TimingConfig {
        repeats: t.repeats,
        workers,
    }
}

fn bench_size(a: &SizeArgs, workers: Option<usize>) -> Result<()> {
    let t = &a.timing;
    let alpha = AlphaConfig::new(t.dg, t.dng);
    let timing = timing_config(t, workers);
    let mut reports = Vec::new();
    for &mode in &a.modes {
        let fit = bench::scaling_experiment(&a.sizes, mode, t.threshold, alpha, &timing, t.seed)?;
        eprintln!("{mode}: gamma={:.3} r2={:.3}", fit.gamma, fit.r_squared);
        let config = json!({
            "experiment": "size",
            "mode": mode.to_string(),
            "sizes": a.sizes,
            "T": t.threshold,
            "d_g": t.dg,
            "d_ng": t.dng,
            "repeats": t.repeats,
            "seed": t.seed,
        });
        reports.push(ScalingReport::new(
            config,
            fit,
            bench::resolve_workers(workers),
        ));
    }
    write_json(&reports, t.out.as_deref())
}

fn bench_steps(a: &StepsArgs, workers: Option<usize>) -> Result<()> {
    let t = &a.timing;
    let timing = timing_config(t, workers);
    let net = graph::noisy_ring_lattice(a.n, t.dg, t.dng, t.seed)?;
    let fit = bench::step_scaling_on(&net, &a.steps, t.threshold, &timing)?;
    let full = bench::time_contagion_map(&net, t.threshold, MapMode::Full, &timing)?;
    eprintln!(
        "steps: gamma={:.3} r2={:.3} full_seconds={full}",
        fit.gamma, fit.r_squared
    );
    let config = json!({
        "experiment": "steps",
        "n": a.n,
        "steps": a.steps,
        "T": t.threshold,
        "d_g": t.dg,
        "d_ng": t.dng,
        "repeats": t.repeats,
        "seed": t.seed,
        "full_seconds": full,
    });
    write_json(
        &ScalingReport::new(config, fit, bench::resolve_workers(workers)),
        t.out.as_deref(),
    )
}

/// Scores of one map inside a pipeline run.
fn map_summary(
    cm: &ContagionMap,
    points: &DenseMatrix,
    labels: Option<&[String]>,
    a: &PipelineArgs,
) -> Result<(Value, Barcode, Projection)> {
    let bc = tda::barcode_of_rows(points, a.subsample, a.seed)?;
    let delta = tda::ring_stability(&bc)?;
    let proj = embed::pca_project(points, a.pcs)?;
    let separation = labels
        .map(|l| embed::cell_group_separation(points, l))
        .transpose()?;
    let summary = json!({
        "mode": cm.mode().to_string(),
        "s": cm.mode().steps(),
        "placeholder": cm.placeholder(),
        "delta": delta,
        "h1_intervals": bc.h1.len(),
        "explained_variance": proj.explained,
        "separation": separation,
    });
    Ok((summary, bc, proj))
}

fn pipeline(a: &PipelineArgs) -> Result<()> {
    let (net, labels, source, comments) = match &a.features {
        Some(path) => {
            let features: FeatureMatrix = graph::load_feature_matrix(path, a.labeled)?;
            let net = graph::knn_graph(&features, a.k)?;
            let labels = features.labels().map(<[String]>::to_vec);
            let source = json!({"kind": "knn", "features": path.display().to_string(), "k": a.k});
            (net, labels, source, knn_comments(path, a.k))
        }
        None => {
            let nrl = NrlArgs {
                n: a.n,
                dg: a.dg,
                dng: a.dng,
                seed: a.seed,
                out: Default::default(),
            };
            let net = graph::noisy_ring_lattice(a.n, a.dg, a.dng, a.seed)?;
            let source =
                json!({"kind": "nrl", "n": a.n, "d_g": a.dg, "d_ng": a.dng, "seed": a.seed});
            (net, None, source, nrl_comments(&nrl))
        }
    };
    let n = net.node_count();
    let s = a.truncate.unwrap_or_else(|| embed::heuristic_truncation(n));
    let mut modes = vec![map_mode(Some(s))?];
    if a.compare_full {
        modes.push(MapMode::Full);
    }

    if let Some(dir) = &a.save_dir {
        fs::create_dir_all(dir).map_err(|source| Error::File {
            path: dir.clone(),
            source,
        })?;
        write_network_file(&net, &dir.join("network.edges"), &comments)?;
    }
    let mut maps = Vec::new();
    for mode in modes {
        let cm = contagion_map(&net, a.threshold, mode)?;
        let points = cm.symmetric_points();
        let (summary, bc, proj) = map_summary(&cm, &points, labels.as_deref(), a)?;
        if let Some(dir) = &a.save_dir {
            let stem = match mode {
                MapMode::Full => "full".to_string(),
                MapMode::Truncated(s) => format!("trunc{s}"),
            };
            let map_path = dir.join(format!("map_{stem}.csv"));
            let net_path = dir.join("network.edges");
            contagion::save_map(&cm, &map_path, map_metadata(&net_path, a.threshold, mode))?;
            write_barcode(
                &bc,
                &dir.join(format!("barcode_{stem}.csv")),
                &barcode_params(&map_path, a.subsample, a.seed),
            )?;
            write_projection(
                &proj,
                labels.as_deref(),
                None,
                &dir.join(format!("projection_{stem}.csv")),
                &[
                    ("map", map_path.display().to_string()),
                    ("k", a.pcs.to_string()),
                ],
            )?;
        }
        maps.push(summary);
    }

    let report = json!({
        "version": tcmap::VERSION,
        "config": {
            "source": source,
            "T": a.threshold,
            "truncate": s,
            "compare_full": a.compare_full,
            "subsample": a.subsample,
            "seed": a.seed,
            "pcs": a.pcs,
        },
        "network": {
            "nodes": n,
            "edges": net.edge_count(),
            "noisiness": graph::noisiness(&net).ok(),
        },
        "maps": maps,
    });
    write_json(&report, a.out.as_deref())
}
