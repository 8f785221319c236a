//! Discrete-event simulation of the polling system, used as an independent
//! oracle for the analytic results.
//!
//! The engine processes one visit at a time. During a visit to queue i every
//! customer present draws a fresh service time and leaves iff it fits in the
//! visit; customers arriving during the visit start service at once and
//! leave iff their service ends before the visit does. Everyone else waits.
//! No event heap is needed.

pub mod rng;
mod throughput;

pub use throughput::single_cycle_throughput;

use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::SystemSpec;
use rng::{stream, Purpose};

/// Batches per replication when only one replication is run.
const SINGLE_RUN_BATCHES: u64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub warmup_cycles: u64,
    pub measured_cycles: u64,
    pub replications: u32,
    pub master_seed: u64,
    /// Queue lengths at polling instants (`X_i_j`).
    pub record_polling: bool,
    /// Queue lengths at visit ends (`Y_i_j`), completion fractions and in-visit leftovers.
    pub record_visit_end: bool,
    /// Sojourn times, overall and per arrival phase.
    pub record_sojourn: bool,
    pub record_throughput: bool,
    /// Point `z` at which to estimate `E[Π_j z_j^{X_i^j}]` for every `i`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pgf_probe: Option<Vec<f64>>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            warmup_cycles: 1_000,
            measured_cycles: 100_000,
            replications: 10,
            master_seed: 0x5EED_2007,
            record_polling: true,
            record_visit_end: true,
            record_sojourn: true,
            record_throughput: true,
            pgf_probe: None,
        }
    }
}

impl SimConfig {
    fn validate(&self, sys: &SystemSpec) -> Result<()> {
        if self.measured_cycles == 0 {
            return Err(Error::Config("measured_cycles must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if let Some(z) = &self.pgf_probe {
            if z.len() != sys.len() || z.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Config(format!(
                    "pgf_probe needs {} entries in [0, 1]",
                    sys.len()
                )));
            }
        }
        Ok(())
    }
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Mean and standard error of independent unit values; NaN units
    /// (no observations) are skipped.
    pub fn from_units(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let stderr = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr }
    }

    /// `|mean - target| <= k * stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub estimate: Estimate,
}

/// Aggregated estimates plus the per-replication values behind them.
///
/// Metric names use 1-based queue numbers: `X_i_j`, `Y_i_j`, `S_i`,
/// `S_i_served`, `S_i_missed`, `S_i_elsewhere`, `share_i_served` (and
/// `_missed`, `_elsewhere`), `p_i`, `leftover_mean_i`, `leftover_var_i`,
/// `throughput`, `pgf_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub master_seed: u64,
    pub replications: u32,
    pub metrics: Vec<Metric>,
    /// `per_replication[r]` lists `(name, value)` in the order of `metrics`.
    pub per_replication: Vec<Vec<f64>>,
}

impl SimulationReport {
    pub fn get(&self, name: &str) -> Option<Estimate> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.estimate)
    }

    fn expect(&self, name: String) -> Estimate {
        self.get(&name)
            .unwrap_or_else(|| panic!("metric {name} was not recorded"))
    }

    /// `E[X_i^j]`, 0-based indices. Panics if polling snapshots were off.
    pub fn polling_mean(&self, i: usize, j: usize) -> Estimate {
        self.expect(format!("X_{}_{}", i + 1, j + 1))
    }

    pub fn visit_end_mean(&self, i: usize, j: usize) -> Estimate {
        self.expect(format!("Y_{}_{}", i + 1, j + 1))
    }

    pub fn sojourn_mean(&self, i: usize) -> Estimate {
        self.expect(format!("S_{}", i + 1))
    }

    /// Conditional sojourn mean per arrival phase: 0 served on arrival,
    /// 1 missed on arrival, 2 arrived elsewhere.
    pub fn sojourn_phase_mean(&self, i: usize, phase: usize) -> Estimate {
        self.expect(format!("S_{}_{}", i + 1, PHASES[phase]))
    }

    pub fn sojourn_phase_share(&self, i: usize, phase: usize) -> Estimate {
        self.expect(format!("share_{}_{}", i + 1, PHASES[phase]))
    }

    pub fn completion_fraction(&self, i: usize) -> Estimate {
        self.expect(format!("p_{}", i + 1))
    }

    pub fn leftover_mean(&self, i: usize) -> Estimate {
        self.expect(format!("leftover_mean_{}", i + 1))
    }

    pub fn leftover_variance(&self, i: usize) -> Estimate {
        self.expect(format!("leftover_var_{}", i + 1))
    }

    pub fn throughput(&self) -> Estimate {
        self.expect("throughput".into())
    }

    pub fn pgf(&self, i: usize) -> Estimate {
        self.expect(format!("pgf_{}", i + 1))
    }

    /// CSV with columns `replication,metric,estimate,stderr`: one row per
    /// replication and metric (empty stderr), then `all` rows with the
    /// aggregate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("replication,metric,estimate,stderr\n");
        for (r, values) in self.per_replication.iter().enumerate() {
            for (m, v) in self.metrics.iter().zip(values) {
                let _ = writeln!(out, "{},{},{},", r + 1, m.name, v);
            }
        }
        for m in &self.metrics {
            let _ = writeln!(out, "all,{},{},{}", m.name, m.estimate.mean, m.estimate.stderr);
        }
        out
    }
}

const PHASES: [&str; 3] = ["served", "missed", "elsewhere"];

#[derive(Debug, Clone, Copy)]
struct Customer {
    arrival: f64,
    /// Index into `PHASES`.
    phase: u8,
}

struct ArrivalStream {
    next: f64,
    gap: Option<Exp<f64>>,
    rng: ChaCha8Rng,
}

impl ArrivalStream {
    fn new(rate: f64, mut rng: ChaCha8Rng) -> Self {
        let gap = (rate > 0.0).then(|| Exp::new(rate).expect("positive rate"));
        let next = gap.as_ref().map_or(f64::INFINITY, |g| g.sample(&mut rng));
        Self { next, gap, rng }
    }

    /// Next arrival strictly before `until`.
    fn take_before(&mut self, until: f64) -> Option<f64> {
        if self.next < until {
            let a = self.next;
            self.next += self.gap.as_ref().expect("finite arrivals need a rate").sample(&mut self.rng);
            Some(a)
        } else {
            None
        }
    }
}

#[derive(Clone)]
struct Tally {
    n: usize,
    cycles: u64,
    x: Vec<f64>,
    y: Vec<f64>,
    sojourn_sum: Vec<f64>,
    sojourn_count: Vec<u64>,
    phase_sum: Vec<[f64; 3]>,
    phase_count: Vec<[u64; 3]>,
    present: Vec<u64>,
    completed: Vec<u64>,
    visits: Vec<u64>,
    leftover_sum: Vec<f64>,
    leftover_sq: Vec<f64>,
    departures: u64,
    pgf: Vec<f64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            n,
            cycles: 0,
            x: vec![0.0; n * n],
            y: vec![0.0; n * n],
            sojourn_sum: vec![0.0; n],
            sojourn_count: vec![0; n],
            phase_sum: vec![[0.0; 3]; n],
            phase_count: vec![[0; 3]; n],
            present: vec![0; n],
            completed: vec![0; n],
            visits: vec![0; n],
            leftover_sum: vec![0.0; n],
            leftover_sq: vec![0.0; n],
            departures: 0,
            pgf: vec![0.0; n],
        }
    }

    fn values(&self, cfg: &SimConfig) -> Vec<(String, f64)> {
        let n = self.n;
        let ratio = |a: f64, b: u64| if b == 0 { f64::NAN } else { a / b as f64 };
        let mut out = Vec::new();
        if cfg.record_polling {
            for i in 0..n {
                for j in 0..n {
                    out.push((format!("X_{}_{}", i + 1, j + 1), ratio(self.x[i * n + j], self.cycles)));
                }
            }
        }
        if cfg.record_visit_end {
            for i in 0..n {
                for j in 0..n {
                    out.push((format!("Y_{}_{}", i + 1, j + 1), ratio(self.y[i * n + j], self.cycles)));
                }
            }
            for i in 0..n {
                out.push((format!("p_{}", i + 1), ratio(self.completed[i] as f64, self.present[i])));
            }
            for i in 0..n {
                let mean = ratio(self.leftover_sum[i], self.visits[i]);
                let var = if self.visits[i] > 1 {
                    let k = self.visits[i] as f64;
                    (self.leftover_sq[i] - k * mean * mean) / (k - 1.0)
                } else {
                    f64::NAN
                };
                out.push((format!("leftover_mean_{}", i + 1), mean));
                out.push((format!("leftover_var_{}", i + 1), var));
            }
        }
        if cfg.record_sojourn {
            for i in 0..n {
                out.push((format!("S_{}", i + 1), ratio(self.sojourn_sum[i], self.sojourn_count[i])));
                for (k, name) in PHASES.iter().enumerate() {
                    out.push((
                        format!("S_{}_{}", i + 1, name),
                        ratio(self.phase_sum[i][k], self.phase_count[i][k]),
                    ));
                }
                for (k, name) in PHASES.iter().enumerate() {
                    out.push((
                        format!("share_{}_{}", i + 1, name),
                        ratio(self.phase_count[i][k] as f64, self.sojourn_count[i]),
                    ));
                }
            }
        }
        if cfg.record_throughput {
            out.push(("throughput".into(), ratio(self.departures as f64, self.cycles)));
        }
        if cfg.pgf_probe.is_some() {
            for i in 0..n {
                out.push((format!("pgf_{}", i + 1), ratio(self.pgf[i], self.cycles)));
            }
        }
        out
    }
}

struct Replication<'a> {
    sys: &'a SystemSpec,
    cfg: &'a SimConfig,
    arrivals: Vec<ArrivalStream>,
    service_rng: Vec<ChaCha8Rng>,
    visit_rng: Vec<ChaCha8Rng>,
    switch_rng: Vec<ChaCha8Rng>,
    waiting: Vec<Vec<Customer>>,
    clock: f64,
    measure_from: f64,
}

impl<'a> Replication<'a> {
    fn new(sys: &'a SystemSpec, cfg: &'a SimConfig, rep: u64) -> Self {
        let n = sys.len();
        let seed = cfg.master_seed;
        Self {
            sys,
            cfg,
            arrivals: (0..n)
                .map(|k| ArrivalStream::new(sys.queue(k).arrival_rate, stream(seed, rep, k, Purpose::Arrivals)))
                .collect(),
            service_rng: (0..n).map(|k| stream(seed, rep, k, Purpose::Service)).collect(),
            visit_rng: (0..n).map(|k| stream(seed, rep, k, Purpose::Visit)).collect(),
            switch_rng: (0..n).map(|k| stream(seed, rep, k, Purpose::Switch)).collect(),
            waiting: vec![Vec::new(); n],
            clock: 0.0,
            measure_from: f64::INFINITY,
        }
    }

    fn depart(&self, tally: Option<&mut Tally>, queue: usize, customer: Customer, at: f64) {
        if let Some(t) = tally {
            t.departures += 1;
            if customer.arrival >= self.measure_from {
                let sojourn = at - customer.arrival;
                t.sojourn_sum[queue] += sojourn;
                t.sojourn_count[queue] += 1;
                t.phase_sum[queue][customer.phase as usize] += sojourn;
                t.phase_count[queue][customer.phase as usize] += 1;
            }
        }
    }

    fn enqueue_arrivals(&mut self, queue: usize, until: f64) {
        while let Some(a) = self.arrivals[queue].take_before(until) {
            self.waiting[queue].push(Customer { arrival: a, phase: 2 });
        }
    }

    fn cycle(&mut self, mut tally: Option<&mut Tally>) {
        let n = self.sys.len();
        for i in 0..n {
            let q = self.sys.queue(i);
            if let Some(t) = tally.as_deref_mut() {
                if self.cfg.record_polling {
                    for j in 0..n {
                        t.x[i * n + j] += self.waiting[j].len() as f64;
                    }
                }
                if let Some(z) = &self.cfg.pgf_probe {
                    t.pgf[i] += (0..n).map(|j| z[j].powi(self.waiting[j].len() as i32)).product::<f64>();
                }
            }

            let start = self.clock;
            let visit = q.visit.sample(&mut self.visit_rng[i]);
            let end = start + visit;

            let present = std::mem::take(&mut self.waiting[i]);
            let mut kept = Vec::with_capacity(present.len());
            let mut completed = 0u64;
            for c in &present {
                let b = q.service.sample(&mut self.service_rng[i]);
                if b <= visit {
                    completed += 1;
                    self.depart(tally.as_deref_mut(), i, *c, start + b);
                } else {
                    kept.push(*c);
                }
            }

            let mut leftover = 0u64;
            while let Some(a) = self.arrivals[i].take_before(end) {
                let b = q.service.sample(&mut self.service_rng[i]);
                if b <= end - a {
                    self.depart(tally.as_deref_mut(), i, Customer { arrival: a, phase: 0 }, a + b);
                } else {
                    kept.push(Customer { arrival: a, phase: 1 });
                    leftover += 1;
                }
            }
            self.waiting[i] = kept;
            for j in (0..n).filter(|&j| j != i) {
                self.enqueue_arrivals(j, end);
            }
            self.clock = end;

            if let Some(t) = tally.as_deref_mut() {
                t.present[i] += present.len() as u64;
                t.completed[i] += completed;
                t.visits[i] += 1;
                t.leftover_sum[i] += leftover as f64;
                t.leftover_sq[i] += (leftover * leftover) as f64;
                if self.cfg.record_visit_end {
                    for j in 0..n {
                        t.y[i * n + j] += self.waiting[j].len() as f64;
                    }
                }
            }

            let switch = q.switch.sample(&mut self.switch_rng[i]);
            let end = self.clock + switch;
            for j in 0..n {
                self.enqueue_arrivals(j, end);
            }
            self.clock = end;
        }
        if let Some(t) = tally {
            t.cycles += 1;
        }
    }

    fn run(mut self, batches: u64) -> Vec<Vec<(String, f64)>> {
        for _ in 0..self.cfg.warmup_cycles {
            self.cycle(None);
        }
        self.measure_from = self.clock;
        let measured = self.cfg.measured_cycles;
        let mut tallies = vec![Tally::new(self.sys.len()); batches as usize];
        for c in 0..measured {
            let unit = (c * batches / measured) as usize;
            self.cycle(Some(&mut tallies[unit]));
        }
        tallies.iter().map(|t| t.values(self.cfg)).collect()
    }
}

/// Simulates `cfg.replications` independent runs and aggregates them.
///
/// Replications run in parallel on the current rayon pool and are reduced in
/// replication order, so the report does not depend on the thread count.
pub fn run(sys: &SystemSpec, cfg: &SimConfig) -> Result<SimulationReport> {
    cfg.validate(sys)?;
    let batches = if cfg.replications == 1 {
        SINGLE_RUN_BATCHES.min(cfg.measured_cycles)
    } else {
        1
    };
    let units: Vec<Vec<Vec<(String, f64)>>> = (0..u64::from(cfg.replications))
        .into_par_iter()
        .map(|rep| Replication::new(sys, cfg, rep).run(batches))
        .collect();

    let names: Vec<String> = units[0][0].iter().map(|(name, _)| name.clone()).collect();
    let flat: Vec<&Vec<(String, f64)>> = units.iter().flatten().collect();
    let metrics = names
        .iter()
        .enumerate()
        .map(|(k, name)| Metric {
            name: name.clone(),
            estimate: Estimate::from_units(flat.iter().map(|u| u[k].1)),
        })
        .collect();
    let per_replication = units
        .iter()
        .map(|batches| {
            (0..names.len())
                .map(|k| {
                    let vals: Vec<f64> = batches.iter().map(|b| b[k].1).filter(|v| !v.is_nan()).collect();
                    if vals.is_empty() {
                        f64::NAN
                    } else {
                        vals.iter().sum::<f64>() / vals.len() as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok(SimulationReport {
        master_seed: cfg.master_seed,
        replications: cfg.replications,
        metrics,
        per_replication,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution;
    use crate::system::QueueSpec;

    fn exp(r: f64) -> Distribution {
        Distribution::exponential(r).unwrap()
    }

    fn det(v: f64) -> Distribution {
        Distribution::deterministic(v).unwrap()
    }

    fn small_cfg() -> SimConfig {
        SimConfig {
            warmup_cycles: 100,
            measured_cycles: 2_000,
            replications: 4,
            ..SimConfig::default()
        }
    }

    #[test]
    fn empty_system_stays_empty() {
        let sys = SystemSpec::new(vec![
            QueueSpec::new(0.0, exp(1.0), exp(1.0), det(0.25)),
            QueueSpec::new(0.0, exp(1.0), det(1.0), det(0.25)),
        ])
        .unwrap();
        let r = run(&sys, &small_cfg()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r.polling_mean(i, j).mean, 0.0);
                assert_eq!(r.visit_end_mean(i, j).mean, 0.0);
            }
            assert!(r.sojourn_mean(i).mean.is_nan());
        }
        assert_eq!(r.throughput().mean, 0.0);
    }

    #[test]
    fn same_seed_same_report() {
        let sys = SystemSpec::new(vec![
            QueueSpec::new(0.8, exp(1.0), exp(1.0), det(0.25)),
            QueueSpec::new(0.5, exp(1.5), exp(1.5), det(0.25)),
        ])
        .unwrap();
        let a = run(&sys, &small_cfg()).unwrap();
        let b = run(&sys, &small_cfg()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let c = run(&sys, &SimConfig { master_seed: 1, ..small_cfg() }).unwrap();
        assert_ne!(a.to_csv(), c.to_csv());
    }

    #[test]
    fn single_replication_uses_batches() {
        let sys = SystemSpec::new(vec![
            QueueSpec::new(0.8, exp(1.0), exp(1.0), det(0.25)),
            QueueSpec::new(0.5, exp(1.5), exp(1.5), det(0.25)),
        ])
        .unwrap();
        let r = run(&sys, &SimConfig { replications: 1, ..small_cfg() }).unwrap();
        assert!(r.polling_mean(0, 0).stderr > 0.0);
        assert_eq!(r.per_replication.len(), 1);
    }

    #[test]
    fn config_validation() {
        let sys = SystemSpec::new(vec![
            QueueSpec::new(0.8, exp(1.0), exp(1.0), det(0.25)),
            QueueSpec::new(0.5, exp(1.5), exp(1.5), det(0.25)),
        ])
        .unwrap();
        assert!(run(&sys, &SimConfig { measured_cycles: 0, ..small_cfg() }).is_err());
        assert!(run(&sys, &SimConfig { replications: 0, ..small_cfg() }).is_err());
        assert!(run(&sys, &SimConfig { pgf_probe: Some(vec![0.5]), ..small_cfg() }).is_err());
    }

    #[test]
    fn estimate_statistics() {
        let e = Estimate::from_units([1.0, 2.0, 3.0, f64::NAN]);
        assert_eq!(e.mean, 2.0);
        assert!((e.stderr - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.5, 1.0));
        assert!(!e.within(3.5, 1.0));
    }
}
