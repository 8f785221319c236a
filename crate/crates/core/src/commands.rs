//! The reports behind the `polling` subcommands.
//!
//! Every command takes a parsed [`ConfigFile`] plus command-line overrides
//! and returns text for the terminal and, where there is one, a CSV table.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analytic::{
    self, exponential, pgf_eval, polling_means, sojourn_lst, sojourn_mean, sojourn_phases,
};
use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::optimizer::{self, one_based, Objective};
use crate::quadrature::QuadratureConfig;
use crate::simulator::{self, Estimate, SimConfig};
use crate::sweep;
use crate::system::SystemSpec;

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub cycles: Option<u64>,
    pub s_grid: Option<Vec<f64>>,
    pub objective: Option<Objective>,
    pub brute_force: bool,
    /// Multiplies every tolerance of `validate`.
    pub tolerance_scale: f64,
}

impl Default for Overrides {
    fn default() -> Self {
        Self {
            seed: None,
            cycles: None,
            s_grid: None,
            objective: None,
            brute_force: false,
            tolerance_scale: 1.0,
        }
    }
}

impl Overrides {
    fn sim(&self, cfg: &SimConfig) -> SimConfig {
        let mut sim = cfg.clone();
        if let Some(seed) = self.seed {
            sim.master_seed = seed;
        }
        if let Some(cycles) = self.cycles {
            sim.measured_cycles = cycles;
        }
        sim
    }
}

/// Parses `"0.1,0.5,1"`.
pub fn parse_s_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("--s-grid: {t:?} is not a number")))?;
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Config(format!("--s-grid: {v} must be finite and >= 0")));
            }
            Ok(v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub csv: Option<String>,
    /// False when a validation check failed.
    pub success: bool,
}

impl Output {
    fn ok(text: String, csv: Option<String>) -> Self {
        Self { text, csv, success: true }
    }
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

pub fn analyze(config: &ConfigFile, o: &Overrides) -> Result<Output> {
    let sys = &config.system;
    let cfg = quad();
    let n = sys.len();
    let s_grid = o.s_grid.clone().unwrap_or_else(|| config.analyze.s_grid.clone());
    let means = polling_means(sys, &cfg)?;
    let cycle = analytic::cycle_moments(sys);

    let mut text = String::new();
    let _ = writeln!(text, "{n} queues, mean cycle {:.6}", cycle.mean);
    let _ = writeln!(text, "\nqueue  lambda    p         E[Lambda(V)]  E[S]        lambda*E[S]");
    let mut sojourn = Vec::with_capacity(n);
    for i in 0..n {
        let d = &means.derived[i];
        let es = sojourn_mean(sys, i, &cfg)?;
        let lambda = sys.queue(i).arrival_rate;
        sojourn.push(es);
        let _ = writeln!(
            text,
            "{:<6} {:<9.4} {:<9.6} {:<13.6} {:<11.6} {:.6}",
            i + 1,
            lambda,
            d.completion_probability,
            d.mean_leftover,
            es,
            lambda * es
        );
    }
    let _ = writeln!(text, "\nE[X_i^j] (row i: polled queue, column j)");
    for (i, row) in means.at_polling.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:10.6}")).collect();
        let _ = writeln!(text, "  {:<4}{}", i + 1, cells.join(" "));
    }
    let _ = writeln!(text, "\nE[Y_i^j] (row i: queue whose visit ends)");
    for (i, row) in means.at_visit_end.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:10.6}")).collect();
        let _ = writeln!(text, "  {:<4}{}", i + 1, cells.join(" "));
    }

    let mut lst = vec![Vec::with_capacity(s_grid.len()); n];
    if !s_grid.is_empty() {
        let _ = writeln!(text, "\nE[exp(-s S_i)]");
        let header: Vec<String> = s_grid.iter().map(|s| format!("s={s:<8}")).collect();
        let _ = writeln!(text, "  queue {}", header.join(" "));
        for (i, row) in lst.iter_mut().enumerate() {
            for &s in &s_grid {
                row.push(sojourn_lst(sys, i, s, &cfg)?);
            }
            let cells: Vec<String> = row.iter().map(|v| format!("{v:<10.6}")).collect();
            let _ = writeln!(text, "  {:<5} {}", i + 1, cells.join(" "));
        }
    }

    let mut csv = String::from("queue,lambda,p,mean_leftover,ES,lambda_ES");
    for s in &s_grid {
        let _ = write!(csv, ",LST_{s}");
    }
    csv.push('\n');
    for i in 0..n {
        let lambda = sys.queue(i).arrival_rate;
        let d = &means.derived[i];
        let _ = write!(
            csv,
            "{},{},{},{},{},{}",
            i + 1,
            lambda,
            d.completion_probability,
            d.mean_leftover,
            sojourn[i],
            lambda * sojourn[i]
        );
        for v in &lst[i] {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    Ok(Output::ok(text, Some(csv)))
}

pub fn simulate(config: &ConfigFile, o: &Overrides) -> Result<Output> {
    let sim = o.sim(&config.sim);
    let report = simulator::run(&config.system, &sim)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} replications x {} cycles (warmup {}), master seed {}",
        sim.replications, sim.measured_cycles, sim.warmup_cycles, sim.master_seed
    );
    let _ = writeln!(text, "\n{:<22} {:>12} {:>12}", "metric", "estimate", "stderr");
    for m in &report.metrics {
        let _ = writeln!(text, "{:<22} {:>12.6} {:>12.6}", m.name, m.estimate.mean, m.estimate.stderr);
    }
    Ok(Output::ok(text, Some(report.to_csv())))
}

pub fn sweep(config: &ConfigFile, _o: &Overrides) -> Result<Output> {
    let block = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("the config has no sweep block".into()))?;
    let table = sweep::run_sweep(&config.system, block, &quad())?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "sweep of {:?} at queue {} ({} points)",
        block.target,
        block.queue,
        table.rows.len()
    );
    for r in &table.rows {
        let _ = writeln!(text, "  {:<10.4} {:.6}", r.grid_value, r.weighted);
    }
    Ok(Output::ok(text, Some(table.to_csv())))
}

pub fn optimize(config: &ConfigFile, o: &Overrides) -> Result<Output> {
    let block = config
        .optimize
        .as_ref()
        .ok_or_else(|| Error::Config("the config has no optimize block".into()))?;
    let sys = &config.system;
    let state = block.state();
    let objective = o.objective.unwrap_or(block.objective);
    let cfg = quad();
    let best = optimizer::optimal_order(sys, &state, objective, &cfg)?;

    let mut text = String::new();
    let _ = writeln!(text, "mode {}, objective {objective}, n = {:?}", state.mode, state.n);
    let _ = writeln!(text, "\nqueue  index");
    for (i, v) in best.indices.iter().enumerate() {
        let _ = writeln!(text, "{:<6} {v:.6}", i + 1);
    }
    let _ = writeln!(text, "\norder {}", one_based(&best.order));
    let _ = writeln!(text, "E[theta] = {:.6} (constant part {:.6})", best.expected, best.constant);
    for &i in &best.order {
        let _ = writeln!(text, "  E[theta_{}] = {:.6}", i + 1, best.per_queue[i]);
    }
    let visited = &best.order;
    let all_tie = visited.windows(2).all(|w| {
        let (a, b) = (best.indices[w[0]], best.indices[w[1]]);
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
    });
    if visited.len() > 1 && all_tie {
        let _ = writeln!(text, "all indices are equal, so every order gives the same E[theta]");
    }

    let mut csv = String::from("rank,order,expected_throughput\n");
    if o.brute_force {
        let brute = optimizer::brute_force_order(sys, &state, objective, &cfg)?;
        let _ = writeln!(text, "\nall {} orders:", brute.ranking.len());
        for (k, (order, v)) in brute.ranking.iter().enumerate() {
            let mark = if brute.contains_optimum(order) { " *" } else { "" };
            let _ = writeln!(text, "  {:<4} {:<24} {v:.6}{mark}", k + 1, one_based(order));
            let _ = writeln!(csv, "{},{},{v}", k + 1, one_based(order).replace(", ", " "));
        }
    } else {
        let _ = writeln!(csv, "1,{},{}", one_based(&best.order).replace(", ", " "), best.expected);
    }
    Ok(Output::ok(text, Some(csv)))
}

/// One row of the validation table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    /// Allowed `|observed - expected|`.
    pub tolerance: f64,
    /// How the tolerance was set, e.g. "3 se" or "1e-8 rel".
    pub rule: String,
    pub passed: bool,
}

impl Check {
    fn new(name: String, expected: f64, observed: f64, tolerance: f64, rule: String) -> Self {
        let passed = (observed - expected).abs() <= tolerance;
        Self { name, expected, observed, tolerance, rule, passed }
    }

    fn stat(name: String, expected: f64, est: Estimate, k: f64) -> Self {
        Self::new(name, expected, est.mean, k * est.stderr, format!("{k} se"))
    }

    fn relative(name: String, expected: f64, observed: f64, rel: f64) -> Self {
        Self::new(name, expected, observed, rel * expected.abs(), format!("{rel:e} rel"))
    }
}

/// Analytic results against simulation, closed forms and internal identities.
pub fn validation_checks(sys: &SystemSpec, sim: &SimConfig, scale: f64) -> Result<Vec<Check>> {
    let cfg = quad();
    let n = sys.len();
    let se = 3.0 * scale;
    let mut checks = Vec::new();
    let means = polling_means(sys, &cfg)?;

    let pgf_supported = sys.queues().iter().all(|q| q.visit.atoms().is_some());
    let mut sim = sim.clone();
    if pgf_supported {
        sim.pgf_probe = Some(vec![0.5; n]);
    }
    let report = simulator::run(sys, &sim)?;

    for i in 0..n {
        for j in 0..n {
            checks.push(Check::stat(
                format!("sim X_{}_{}", i + 1, j + 1),
                means.at_polling[i][j],
                report.polling_mean(i, j),
                se,
            ));
        }
    }
    for i in 0..n {
        for j in 0..n {
            checks.push(Check::stat(
                format!("sim Y_{}_{}", i + 1, j + 1),
                means.at_visit_end[i][j],
                report.visit_end_mean(i, j),
                se,
            ));
        }
    }
    for i in 0..n {
        let d = &means.derived[i];
        checks.push(Check::stat(
            format!("sim p_{}", i + 1),
            d.completion_probability,
            report.completion_fraction(i),
            se,
        ));
        checks.push(Check::stat(
            format!("sim leftover mean {}", i + 1),
            d.mean_leftover,
            report.leftover_mean(i),
            se,
        ));
        if sys.queue(i).visit.atoms().is_some_and(|a| a.len() == 1) {
            checks.push(Check::stat(
                format!("sim leftover variance {}", i + 1),
                d.mean_leftover,
                report.leftover_variance(i),
                se,
            ));
        }
    }
    for i in 0..n {
        if sys.queue(i).arrival_rate == 0.0 {
            continue;
        }
        let es = sojourn_mean(sys, i, &cfg)?;
        checks.push(Check::stat(format!("sim E[S_{}]", i + 1), es, report.sojourn_mean(i), se));
        let ph = sojourn_phases(sys, i, &cfg)?;
        let terms = [ph.served_on_arrival, ph.missed_on_arrival, ph.arrived_elsewhere];
        for (k, (t, label)) in terms.iter().zip(["served", "missed", "elsewhere"]).enumerate() {
            checks.push(Check::stat(
                format!("sim share {} {label}", i + 1),
                t.probability,
                report.sojourn_phase_share(i, k),
                se,
            ));
            if t.probability > 0.0 {
                checks.push(Check::stat(
                    format!("sim E[S_{} | {label}]", i + 1),
                    t.conditional_mean,
                    report.sojourn_phase_mean(i, k),
                    se,
                ));
            }
        }
    }

    for i in 0..n {
        let es = sojourn_mean(sys, i, &cfg)?;
        if let Some(closed) = exponential::sojourn_mean(sys, i) {
            checks.push(Check::relative(format!("closed form E[S_{}]", i + 1), closed, es, 1e-8 * scale));
            for s in [0.1, 0.5, 1.0, 2.0] {
                let want = exponential::sojourn_lst(sys, i, s).expect("exponential queue")?;
                let got = sojourn_lst(sys, i, s, &cfg)?;
                checks.push(Check::relative(
                    format!("closed form LST_{}({s})", i + 1),
                    want,
                    got,
                    1e-8 * scale,
                ));
            }
        }
        let h = 1e-6;
        let slope = (1.0 - sojourn_lst(sys, i, h, &QuadratureConfig::tight())?) / h;
        checks.push(Check::relative(format!("LST_{} slope at 0", i + 1), es, slope, 1e-4 * scale));
        checks.push(Check::new(
            format!("LST_{}(0)", i + 1),
            1.0,
            sojourn_lst(sys, i, 0.0, &cfg)?,
            1e-12 * scale,
            format!("{:e} abs", 1e-12 * scale),
        ));
    }

    if pgf_supported {
        let ones = vec![1.0; n];
        let half = vec![0.5; n];
        for i in 0..n {
            checks.push(Check::new(
                format!("G_{}(1)", i + 1),
                1.0,
                pgf_eval(sys, i, &ones, &cfg)?,
                1e-12 * scale,
                format!("{:e} abs", 1e-12 * scale),
            ));
            checks.push(Check::stat(
                format!("sim G_{}(0.5)", i + 1),
                pgf_eval(sys, i, &half, &cfg)?,
                report.pgf(i),
                se,
            ));
        }
    }
    Ok(checks)
}

pub fn format_checks(checks: &[Check]) -> String {
    let mut text = format!(
        "{:<28} {:>14} {:>14} {:>12} {:<12} status\n",
        "check", "expected", "observed", "tolerance", "rule"
    );
    for c in checks {
        let _ = writeln!(
            text,
            "{:<28} {:>14.8} {:>14.8} {:>12.3e} {:<12} {}",
            c.name,
            c.expected,
            c.observed,
            c.tolerance,
            c.rule,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        let _ = writeln!(text, "\nall {} checks passed", checks.len());
    } else {
        let _ = writeln!(text, "\n{} of {} checks failed: {}", failed.len(), checks.len(), failed.join("; "));
    }
    text
}

pub fn validate(config: &ConfigFile, o: &Overrides) -> Result<Output> {
    if !(o.tolerance_scale > 0.0) {
        return Err(Error::Config("tolerance scale must be > 0".into()));
    }
    let checks = validation_checks(&config.system, &o.sim(&config.sim), o.tolerance_scale)?;
    let mut csv = String::from("check,expected,observed,tolerance,rule,status\n");
    for c in &checks {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            c.name.replace(',', ";"),
            c.expected,
            c.observed,
            c.tolerance,
            c.rule,
            if c.passed { "pass" } else { "fail" }
        );
    }
    Ok(Output {
        text: format_checks(&checks),
        csv: Some(csv),
        success: checks.iter().all(|c| c.passed),
    })
}
