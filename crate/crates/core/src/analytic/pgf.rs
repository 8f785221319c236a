//! Joint generating function of the queue lengths at a polling instant.
//!
//! `G_{k+1}(z)` is the expectation over the visit time of queue k of a
//! product of Poisson and thinning factors times `G_k` at a thinned point, so
//! evaluating `G_i` means walking the cycle backwards. Cutting the walk after
//! `K` whole cycles and substituting the constant 1 for the remaining factor
//! gives a sequence of approximations that we extend until two consecutive
//! cycles agree.
//!
//! With a single visit-time atom per queue the walk is a chain. With several
//! atoms it branches at every step, and the cut-off factor is replaced by the
//! first-order expansion `1 - Σ_j E[X_i^j](1 - z_j)` instead: its error is
//! quadratic in `1 - z`, which the thinning shrinks geometrically every
//! cycle, so far fewer cycles are needed. The limit is the same.

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::system::SystemSpec;

use super::{completion_probability, polling_means};

const TOLERANCE: f64 = 1e-12;
const MAX_CYCLES: usize = 100_000;
const NODE_BUDGET: usize = 20_000_000;
/// Branches lighter than this are dropped.
const PRUNE_WEIGHT: f64 = 1e-18;

struct VisitAtom {
    prob: f64,
    length: f64,
    completion: f64,
    leftover: f64,
}

struct Walker<'a> {
    sys: &'a SystemSpec,
    atoms: Vec<Vec<VisitAtom>>,
    lambda: Vec<f64>,
    /// Row `i` of the polling-instant means when leaves use the expansion.
    leaf_means: Option<Vec<f64>>,
    /// `bucket[K]` accumulates the approximation after K cycles.
    bucket: Vec<f64>,
    nodes: usize,
}

impl Walker<'_> {
    /// Visits a node whose generating function is `G_queue` at `z`, reached
    /// after `steps` backward steps with accumulated factor `weight`.
    fn descend(&mut self, queue: usize, z: &mut [f64], weight: f64, steps: usize, max_steps: usize) -> Result<()> {
        let n = self.sys.len();
        if steps > 0 && steps.is_multiple_of(n) {
            let leaf = match &self.leaf_means {
                Some(means) => {
                    let drop: f64 = means.iter().zip(z.iter()).map(|(m, zj)| m * (1.0 - zj)).sum();
                    (1.0 - drop).clamp(0.0, 1.0)
                }
                None => 1.0,
            };
            self.bucket[steps / n] += weight * leaf;
        }
        if steps == max_steps || weight < PRUNE_WEIGHT {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Error::NoConvergence(format!(
                "generating function needs more than {NODE_BUDGET} branch evaluations; \
                 use visit laws with fewer atoms"
            )));
        }
        let prev = (queue + n - 1) % n;
        let all: f64 = (0..n).map(|j| self.lambda[j] * (1.0 - z[j])).sum();
        let others = all - self.lambda[prev] * (1.0 - z[prev]);
        let switch = self.sys.queue(prev).switch.lst(all)?;
        let saved = z[prev];
        for a in 0..self.atoms[prev].len() {
            let atom = &self.atoms[prev][a];
            let factor = switch
                * atom.prob
                * (-atom.length * others).exp()
                * (-atom.leftover * (1.0 - saved)).exp();
            z[prev] = atom.completion + (1.0 - atom.completion) * saved;
            self.descend(prev, z, weight * factor, steps + 1, max_steps)?;
        }
        z[prev] = saved;
        Ok(())
    }
}

/// `G_i(z) = E[Π_j z_j^{X_i^j}]` for visit laws that are deterministic or
/// finite-discrete; switch-over laws may be arbitrary.
pub fn pgf_eval(sys: &SystemSpec, i: usize, z: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    sys.check_index(i)?;
    let n = sys.len();
    if z.len() != n {
        return Err(Error::Domain(format!("z has {} entries, expected {n}", z.len())));
    }
    if z.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Domain("every z_j must lie in [0, 1]".into()));
    }
    let mut atoms: Vec<Vec<VisitAtom>> = Vec::with_capacity(n);
    for (k, q) in sys.queues().iter().enumerate() {
        let Some(visit_atoms) = q.visit.atoms() else {
            return Err(Error::Unsupported(format!(
                "generating function needs deterministic or discrete visit times; queue {} has {}",
                k + 1,
                q.visit.label()
            )));
        };
        let p = completion_probability(&q.service, &q.visit, cfg)?;
        if p <= 0.0 {
            return Err(Error::Model {
                queue: k + 1,
                reason: "services never complete within a visit (p = 0)".into(),
            });
        }
        atoms.push(
            visit_atoms
                .into_iter()
                .filter(|&(_, prob)| prob > 0.0)
                .map(|(v, prob)| VisitAtom {
                    prob,
                    length: v,
                    completion: q.service.cdf(v),
                    leftover: q.arrival_rate * q.service.truncated_mean(v),
                })
                .collect(),
        );
    }
    if z.iter().all(|&v| v == 1.0) {
        return Ok(1.0);
    }

    let branching = atoms.iter().any(|a| a.len() > 1);
    let leaf_means = if branching {
        Some(polling_means(sys, cfg)?.at_polling.swap_remove(i))
    } else {
        None
    };
    let mut walker = Walker {
        sys,
        atoms,
        lambda: sys.arrival_rates(),
        leaf_means,
        bucket: Vec::new(),
        nodes: 0,
    };
    let mut cycles = 4;
    loop {
        walker.bucket = vec![0.0; cycles + 1];
        walker.nodes = 0;
        let mut point = z.to_vec();
        walker.descend(i, &mut point, 1.0, 0, cycles * n)?;
        let hit = (2..=cycles).find(|&k| (walker.bucket[k] - walker.bucket[k - 1]).abs() < TOLERANCE);
        if let Some(k) = hit {
            return Ok(walker.bucket[k]);
        }
        if cycles >= MAX_CYCLES {
            return Err(Error::NoConvergence(format!(
                "generating function did not settle within {MAX_CYCLES} cycles"
            )));
        }
        // A branching walk costs exponentially many nodes per cycle, so grow slowly.
        cycles = if branching { cycles + 2 } else { cycles * 2 };
    }
}
