//! Scaling experiments, bifurcation sweeps and truncation search.

mod fit;

pub use fit::{loglog_fit, ScalingFit};

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contagion::{contagion_map, regime, MapMode, Regime};
use crate::graph::{noisiness, noisy_ring_lattice, Network};
use crate::tda::ring_stability_of_map;
use crate::{Error, Result};

/// Degrees of the noisy ring lattices used by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaConfig {
    pub d_g: usize,
    pub d_ng: usize,
}

impl AlphaConfig {
    pub fn new(d_g: usize, d_ng: usize) -> Self {
        Self { d_g, d_ng }
    }

    pub fn alpha(&self) -> f64 {
        self.d_ng as f64 / self.d_g as f64
    }
}

/// Timing setup shared by the scaling experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub repeats: usize,
    /// Worker threads for the contagion map; `None` uses every core.
    pub workers: Option<usize>,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            repeats: 3,
            workers: None,
        }
    }
}

/// Where the timings were taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostInfo {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    pub workers: usize,
    pub version: String,
}

impl HostInfo {
    pub fn current(workers: usize) -> Self {
        Self {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            workers,
            version: crate::VERSION.into(),
        }
    }
}

/// A fitted timing sweep ready to be written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub config: serde_json::Value,
    pub samples: Vec<(f64, f64)>,
    pub zeta: f64,
    pub gamma: f64,
    pub r_squared: f64,
    pub host: HostInfo,
}

impl ScalingReport {
    pub fn new(config: serde_json::Value, fit: ScalingFit, workers: usize) -> Self {
        Self {
            config,
            samples: fit.samples,
            zeta: fit.zeta,
            gamma: fit.gamma,
            r_squared: fit.r_squared,
            host: HostInfo::current(workers),
        }
    }
}

/// Resolves a worker count, falling back to the number of logical cores.
pub fn resolve_workers(workers: Option<usize>) -> usize {
    workers
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn check_repeats(timing: &TimingConfig) -> Result<()> {
    if timing.repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    Ok(())
}

/// Minimum wall-clock seconds of `contagion_map` over `repeats` runs on a
/// pool of `workers` threads.
pub fn time_contagion_map(
    net: &Network,
    threshold: f64,
    mode: MapMode,
    timing: &TimingConfig,
) -> Result<f64> {
    check_repeats(timing)?;
    let best = crate::with_workers(timing.workers, || -> Result<f64> {
        let mut best = f64::INFINITY;
        for _ in 0..timing.repeats {
            let start = Instant::now();
            let map = contagion_map(net, threshold, mode)?;
            let elapsed = start.elapsed().as_secs_f64();
            drop(map);
            best = best.min(elapsed);
        }
        Ok(best)
    })??;
    // keep the fit defined even for sub-resolution timings
    Ok(best.max(1e-9))
}

fn network_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// Times the contagion map of `NRL(n, d_g, d_ng)` for each size and fits
/// `seconds ~ zeta * n^gamma`. Network generation is not timed.
pub fn scaling_experiment(
    sizes: &[usize],
    mode: MapMode,
    threshold: f64,
    alpha: AlphaConfig,
    timing: &TimingConfig,
    seed: u64,
) -> Result<ScalingFit> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid(
            "size sweep needs at least two distinct sizes",
        ));
    }
    check_repeats(timing)?;
    let mut samples = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let net = noisy_ring_lattice(n, alpha.d_g, alpha.d_ng, network_seed(seed, i))?;
        let secs = time_contagion_map(&net, threshold, mode, timing)?;
        samples.push((n as f64, secs));
    }
    loglog_fit(&samples)
}

/// Times truncated maps of a single network for each step budget and fits
/// `seconds ~ zeta * s^gamma`.
pub fn step_scaling_experiment(
    n: usize,
    steps: &[usize],
    threshold: f64,
    alpha: AlphaConfig,
    timing: &TimingConfig,
    seed: u64,
) -> Result<ScalingFit> {
    let net = noisy_ring_lattice(n, alpha.d_g, alpha.d_ng, seed)?;
    step_scaling_on(&net, steps, threshold, timing)
}

/// Step sweep on a prepared network.
pub fn step_scaling_on(
    net: &Network,
    steps: &[usize],
    threshold: f64,
    timing: &TimingConfig,
) -> Result<ScalingFit> {
    check_repeats(timing)?;
    let mut samples = Vec::with_capacity(steps.len());
    for &s in steps {
        let secs = time_contagion_map(net, threshold, MapMode::Truncated(s), timing)?;
        samples.push((s as f64, secs));
    }
    loglog_fit(&samples)
}

/// Ring stability over a noisiness-by-threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationGrid {
    pub alphas: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// `delta[a][t]` for `alphas[a]` and `thresholds[t]`.
    pub delta: Vec<Vec<f64>>,
    pub regimes: Vec<Vec<Regime>>,
}

impl BifurcationGrid {
    /// Mean ring stability of the cells that fall in (or outside) `regime`.
    pub fn mean_delta(&self, pick: impl Fn(Regime) -> bool) -> Option<f64> {
        let values: Vec<f64> = self
            .delta
            .iter()
            .flatten()
            .zip(self.regimes.iter().flatten())
            .filter(|(_, &r)| pick(r))
            .map(|(&d, _)| d)
            .collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    /// CSV with columns `alpha,T,delta,regime`, one row per cell.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "alpha,T,delta,regime")?;
        for (a, &alpha) in self.alphas.iter().enumerate() {
            for (t, &threshold) in self.thresholds.iter().enumerate() {
                writeln!(
                    out,
                    "{alpha},{threshold},{},{}",
                    self.delta[a][t],
                    self.regimes[a][t].as_str()
                )?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Builds `NRL(n, d_g, round(alpha * d_g))` for each alpha and measures the
/// ring stability of its `s`-step truncated map at every threshold. Regimes
/// are evaluated at the realised noisiness of each network.
pub fn bifurcation_sweep(
    n: usize,
    d_g: usize,
    thresholds: &[f64],
    alphas: &[f64],
    s: usize,
    seed: u64,
) -> Result<BifurcationGrid> {
    if thresholds.is_empty() || alphas.is_empty() {
        return Err(Error::invalid(
            "bifurcation grid needs at least one alpha and one T",
        ));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(Error::invalid(format!(
            "alpha {a} must be finite and non-negative"
        )));
    }
    let networks = alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let d_ng = (alpha * d_g as f64).round() as usize;
            noisy_ring_lattice(n, d_g, d_ng, network_seed(seed, i))
        })
        .collect::<Result<Vec<_>>>()?;
    let realised: Vec<f64> = networks.iter().map(noisiness).collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..alphas.len())
        .flat_map(|a| (0..thresholds.len()).map(move |t| (a, t)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(a, t)| {
            let map = contagion_map(&networks[a], thresholds[t], MapMode::Truncated(s))?;
            ring_stability_of_map(&map, None, seed)
        })
        .collect::<Result<Vec<f64>>>()?;

    let width = thresholds.len();
    Ok(BifurcationGrid {
        alphas: alphas.to_vec(),
        thresholds: thresholds.to_vec(),
        delta: values.chunks(width).map(<[f64]>::to_vec).collect(),
        regimes: realised
            .iter()
            .map(|&alpha| thresholds.iter().map(|&t| regime(alpha, t)).collect())
            .collect(),
    })
}

/// Outcome of a truncation search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSearch {
    pub s_star: usize,
    pub delta: f64,
    /// Ring stability for every candidate, in input order.
    pub candidates: Vec<(usize, f64)>,
}

/// Ring stability of `NRL(n, d_g, d_ng)` for each candidate step budget;
/// the best candidate wins, ties going to the smallest `s`.
pub fn optimal_truncation(
    n: usize,
    threshold: f64,
    alpha: AlphaConfig,
    candidates: &[usize],
    seed: u64,
) -> Result<TruncationSearch> {
    let net = noisy_ring_lattice(n, alpha.d_g, alpha.d_ng, seed)?;
    optimal_truncation_on(&net, threshold, candidates, seed)
}

/// Truncation search on a prepared network.
pub fn optimal_truncation_on(
    net: &Network,
    threshold: f64,
    candidates: &[usize],
    seed: u64,
) -> Result<TruncationSearch> {
    if candidates.is_empty() {
        return Err(Error::invalid("no truncation candidates"));
    }
    let deltas = candidates
        .par_iter()
        .map(|&s| {
            let map = contagion_map(net, threshold, MapMode::Truncated(s))?;
            Ok((s, ring_stability_of_map(&map, None, seed)?))
        })
        .collect::<Result<Vec<(usize, f64)>>>()?;
    let &(s_star, delta) = deltas
        .iter()
        .reduce(|best, c| {
            if c.1 > best.1 || (c.1 == best.1 && c.0 < best.0) {
                c
            } else {
                best
            }
        })
        .expect("non-empty");
    Ok(TruncationSearch {
        s_star,
        delta,
        candidates: deltas,
    })
}

/// Parses `start:end:step` into an inclusive sequence. The end point is kept
/// when it lies within 1e-9 of a step; a bare number is a single value.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("range {text:?}: {s:?} is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(format!(
                "range {text:?}: {s:?} is not finite"
            )))
        }
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            if step <= 0.0 {
                return Err(Error::invalid(format!(
                    "range {text:?}: step must be positive"
                )));
            }
            if end < start {
                return Err(Error::invalid(format!(
                    "range {text:?}: end is before start"
                )));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count)
                .map(|i| {
                    // snap to 12 decimals so 0.1 * 3 comes out as 0.3
                    let v = start + i as f64 * step;
                    (v * 1e12).round() / 1e12
                })
                .collect())
        }
        _ => Err(Error::invalid(format!(
            "range {text:?} must be a number or start:end:step"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contagion::critical_thresholds;

    #[test]
    fn ranges() {
        assert_eq!(
            parse_range("0:1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let r = parse_range("0:1:0.1").unwrap();
        assert_eq!(r.len(), 11);
        assert_eq!(r[3], 0.3);
        assert_eq!(r[10], 1.0);
        assert_eq!(parse_range("0:0.6:0.05").unwrap().len(), 13);
        assert_eq!(parse_range("0.3").unwrap(), vec![0.3]);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("a:b").is_err());
    }

    #[test]
    fn single_candidate_is_returned() {
        let r = optimal_truncation(40, 0.3, AlphaConfig::new(6, 2), &[7], 3).unwrap();
        assert_eq!(r.s_star, 7);
        assert_eq!(r.candidates.len(), 1);
        assert!(optimal_truncation(40, 0.3, AlphaConfig::new(6, 2), &[], 3).is_err());
    }

    #[test]
    fn small_grid_shape_and_regimes() {
        let alphas = [0.0, 0.5];
        let ts = [0.1, 0.45];
        let g = bifurcation_sweep(60, 6, &ts, &alphas, 5, 1).unwrap();
        assert_eq!(g.delta.len(), 2);
        assert!(g.delta.iter().all(|row| row.len() == 2));
        assert!(g.delta.iter().flatten().all(|&d| d >= 0.0));
        for (a, &alpha) in alphas.iter().enumerate() {
            let (wfp, anc) = critical_thresholds(alpha);
            for (t, &th) in ts.iter().enumerate() {
                let r = g.regimes[a][t];
                assert_eq!(matches!(r, Regime::WfpOnly | Regime::WfpAndAnc), th < wfp);
                assert_eq!(matches!(r, Regime::AncOnly | Regime::WfpAndAnc), th < anc);
            }
        }
        let mut out = Vec::new();
        g.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("alpha,T,delta,regime\n0,0.1,"));
    }

    #[test]
    fn timing_rejects_zero_repeats() {
        let net = noisy_ring_lattice(20, 2, 0, 0).unwrap();
        let t = TimingConfig {
            repeats: 0,
            workers: Some(1),
        };
        assert!(time_contagion_map(&net, 0.3, MapMode::Full, &t).is_err());
    }

    #[test]
    fn size_sweep_needs_distinct_sizes() {
        let t = TimingConfig {
            repeats: 1,
            workers: Some(1),
        };
        let err = scaling_experiment(
            &[32, 32, 32],
            MapMode::Full,
            0.3,
            AlphaConfig::new(6, 2),
            &t,
            0,
        );
        assert!(err.unwrap_err().is_invalid_argument());
        let fit = scaling_experiment(
            &[32, 64, 128],
            MapMode::Full,
            0.3,
            AlphaConfig::new(6, 2),
            &t,
            0,
        )
        .unwrap();
        assert_eq!(fit.samples.len(), 3);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}
