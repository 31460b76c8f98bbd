use crate::graph::{EdgeClass, Network};
use crate::{Error, Result};

pub(crate) const UNACTIVATED: u32 = u32::MAX;

/// Activating-edge counts for one synchronous step, by edge class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeCounts {
    pub geometric: usize,
    pub non_geometric: usize,
    pub unlabeled: usize,
}

impl EdgeCounts {
    pub fn get(&self, class: EdgeClass) -> usize {
        match class {
            EdgeClass::Geometric => self.geometric,
            EdgeClass::NonGeometric => self.non_geometric,
            EdgeClass::Unlabeled => self.unlabeled,
        }
    }

    fn bump(&mut self, class: EdgeClass) {
        match class {
            EdgeClass::Geometric => self.geometric += 1,
            EdgeClass::NonGeometric => self.non_geometric += 1,
            EdgeClass::Unlabeled => self.unlabeled += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.geometric + self.non_geometric + self.unlabeled
    }
}

/// Outcome of one threshold contagion.
///
/// `q_series[t]` is the active fraction after `t` sweeps, for
/// `t = 0..=steps_run`. `edge_series[t]` counts edges joining a node active at
/// `t` to a node that activates at `t + 1`; each edge is counted at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationRecord {
    pub times: Vec<Option<u32>>,
    pub q_series: Vec<f64>,
    pub edge_series: Vec<EdgeCounts>,
    pub steps_run: usize,
}

impl ActivationRecord {
    pub fn active_count(&self) -> usize {
        self.times.iter().filter(|t| t.is_some()).count()
    }

    /// First step at which every node is active, if that happens.
    pub fn time_to_global_cascade(&self) -> Option<usize> {
        self.q_series.iter().position(|&q| q >= 1.0)
    }
}

/// The seed cluster of node `j`: `j` together with its neighbours, ascending.
pub fn cluster_seed(net: &Network, j: usize) -> Result<Vec<usize>> {
    if j >= net.node_count() {
        return Err(Error::invalid(format!(
            "node {j} out of range 0..{}",
            net.node_count()
        )));
    }
    let mut seeds: Vec<usize> = net.neighbors(j).iter().map(|&v| v as usize).collect();
    let pos = seeds.partition_point(|&v| v < j);
    seeds.insert(pos, j);
    Ok(seeds)
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Runs the synchronous Watts threshold model from `seeds`.
///
/// An inactive node with `d > 0` neighbours activates when strictly more than
/// `threshold * d` of them are active. The run stops at a fixed point or after
/// `max_steps` sweeps.
pub fn wtm_run(
    net: &Network,
    seeds: &[usize],
    threshold: f64,
    max_steps: Option<usize>,
) -> Result<ActivationRecord> {
    check_threshold(threshold)?;
    if seeds.is_empty() {
        return Err(Error::invalid("seed set is empty"));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= net.node_count()) {
        return Err(Error::invalid(format!("seed {bad} out of range")));
    }
    if max_steps == Some(0) {
        return Err(Error::invalid("max_steps must be positive"));
    }

    let n = net.node_count();
    let mut engine = Engine::new(net, threshold);
    let mut times = vec![UNACTIVATED; n];
    let mut telemetry = Telemetry {
        net,
        n,
        active: 0,
        q_series: Vec::new(),
        edge_series: Vec::new(),
    };
    let steps_run = engine.run(seeds, max_steps, &mut times, &mut telemetry);

    Ok(ActivationRecord {
        times: times
            .into_iter()
            .map(|t| (t != UNACTIVATED).then_some(t))
            .collect(),
        q_series: telemetry.q_series,
        edge_series: telemetry.edge_series,
        steps_run,
    })
}

/// Hook called after the seeds are placed (`t = 0`) and after every
/// productive sweep with the nodes that just activated.
pub(crate) trait StepObserver {
    fn on_step(&mut self, t: u32, newly: &[u32], times: &[u32]);
}

pub(crate) struct NoTelemetry;

impl StepObserver for NoTelemetry {
    #[inline]
    fn on_step(&mut self, _: u32, _: &[u32], _: &[u32]) {}
}

struct Telemetry<'a> {
    net: &'a Network,
    n: usize,
    active: usize,
    q_series: Vec<f64>,
    edge_series: Vec<EdgeCounts>,
}

impl StepObserver for Telemetry<'_> {
    fn on_step(&mut self, t: u32, newly: &[u32], times: &[u32]) {
        if t > 0 {
            let mut counts = EdgeCounts::default();
            for &v in newly {
                let v = v as usize;
                for (&u, &class) in self
                    .net
                    .neighbors(v)
                    .iter()
                    .zip(self.net.neighbor_classes(v))
                {
                    if times[u as usize] < t {
                        counts.bump(class);
                    }
                }
            }
            self.edge_series.push(counts);
        }
        self.active += newly.len();
        self.q_series.push(self.active as f64 / self.n as f64);
    }
}

/// Reusable buffers for running many contagions on one network.
pub(crate) struct Engine<'a> {
    net: &'a Network,
    threshold: f64,
    counts: Vec<u32>,
    touched: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    newly: Vec<u32>,
    candidates: Vec<u32>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(net: &'a Network, threshold: f64) -> Self {
        let n = net.node_count();
        Self {
            net,
            threshold,
            counts: vec![0; n],
            touched: Vec::new(),
            stamp: vec![0; n],
            epoch: 0,
            newly: Vec::new(),
            candidates: Vec::new(),
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// Activates `newly` at time `t`: bumps neighbour counts and collects the
    /// inactive neighbours as next-step candidates.
    fn spread(&mut self, times: &[u32]) {
        let epoch = self.next_epoch();
        self.candidates.clear();
        for &v in &self.newly {
            for &u in self.net.neighbors(v as usize) {
                let ui = u as usize;
                if self.counts[ui] == 0 {
                    self.touched.push(u);
                }
                self.counts[ui] += 1;
                if times[ui] == UNACTIVATED && self.stamp[ui] != epoch {
                    self.stamp[ui] = epoch;
                    self.candidates.push(u);
                }
            }
        }
    }

    /// Runs one contagion. `times` must be filled with [`UNACTIVATED`] and
    /// receives activation times. Returns the number of productive sweeps.
    pub(crate) fn run(
        &mut self,
        seeds: &[usize],
        max_steps: Option<usize>,
        times: &mut [u32],
        observer: &mut impl StepObserver,
    ) -> usize {
        for &u in &self.touched {
            self.counts[u as usize] = 0;
        }
        self.touched.clear();

        self.newly.clear();
        for &s in seeds {
            if times[s] == UNACTIVATED {
                times[s] = 0;
                self.newly.push(s as u32);
            }
        }
        observer.on_step(0, &self.newly, times);
        self.spread(times);

        let limit = max_steps.unwrap_or(usize::MAX);
        let mut t = 0usize;
        while t < limit {
            self.newly.clear();
            for &c in &self.candidates {
                let ci = c as usize;
                let degree = self.net.degree(ci);
                if degree > 0 && self.counts[ci] as f64 / degree as f64 > self.threshold {
                    self.newly.push(c);
                }
            }
            if self.newly.is_empty() {
                break;
            }
            t += 1;
            for &v in &self.newly {
                times[v as usize] = t as u32;
            }
            observer.on_step(t as u32, &self.newly, times);
            self.spread(times);
        }
        t
    }
}
