//! Nonnegative probability laws used for service, visit, switch-over and
//! travel times, with closed-form moments, survival functions and
//! Laplace–Stieltjes transforms.

mod fit;
mod integrals;

pub use fit::{fit_hyperexponential, fit_mixed_erlang, fit_two_moments};
pub use integrals::{expected_min, joint_survival_integral, min_lst};

use rand::Rng;
use rand_distr::{Distribution as _, Exp, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, QuadratureConfig};

const ATOM_SUM_TOL: f64 = 1e-12;

/// Parameters of a law, as written in config files.
///
/// `MixedErlang` is Erlang(`phases - 1`, `rate`) with probability `p` and
/// Erlang(`phases`, `rate`) otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Law {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    Erlang { phases: u32, rate: f64 },
    MixedErlang { p: f64, phases: u32, rate: f64 },
    #[serde(rename = "hyperexp", alias = "hyperexponential")]
    Hyperexponential { p: f64, rate1: f64, rate2: f64 },
    /// `(value, probability)` pairs with strictly increasing values.
    Discrete { atoms: Vec<(f64, f64)> },
}

/// A validated nonnegative law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Law", into = "Law")]
pub struct Distribution {
    law: Law,
}

impl TryFrom<Law> for Distribution {
    type Error = Error;

    fn try_from(law: Law) -> Result<Self> {
        fn rate_ok(name: &str, r: f64) -> Result<()> {
            if r.is_finite() && r > 0.0 {
                Ok(())
            } else {
                domain(format!("{name} must be a positive finite rate, got {r}"))
            }
        }
        fn prob_ok(p: f64) -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                domain(format!("probability must lie in [0, 1], got {p}"))
            }
        }
        match &law {
            Law::Exponential { rate } => rate_ok("rate", *rate)?,
            Law::Deterministic { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return domain(format!("deterministic value must be finite and >= 0, got {value}"));
                }
            }
            Law::Erlang { phases, rate } => {
                if *phases == 0 {
                    return domain("erlang needs at least one phase");
                }
                rate_ok("rate", *rate)?;
            }
            Law::MixedErlang { p, phases, rate } => {
                if *phases < 2 {
                    return domain("mixed_erlang needs phases >= 2");
                }
                prob_ok(*p)?;
                rate_ok("rate", *rate)?;
            }
            Law::Hyperexponential { p, rate1, rate2 } => {
                prob_ok(*p)?;
                rate_ok("rate1", *rate1)?;
                rate_ok("rate2", *rate2)?;
            }
            Law::Discrete { atoms } => {
                if atoms.is_empty() {
                    return domain("discrete law needs at least one atom");
                }
                let mut total = 0.0;
                let mut previous = f64::NEG_INFINITY;
                for &(v, p) in atoms {
                    if !(v.is_finite() && v >= 0.0) {
                        return domain(format!("atom value must be finite and >= 0, got {v}"));
                    }
                    if v <= previous {
                        return domain("atom values must be strictly increasing");
                    }
                    prob_ok(p)?;
                    previous = v;
                    total += p;
                }
                if (total - 1.0).abs() > ATOM_SUM_TOL {
                    return domain(format!("atom probabilities sum to {total}, not 1"));
                }
            }
        }
        Ok(Self { law })
    }
}

impl From<Distribution> for Law {
    fn from(d: Distribution) -> Self {
        d.law
    }
}

/// `exp(-rx) (rx)^j / j!` for `j = 0..k`, evaluated in log space.
fn poisson_terms(rate: f64, x: f64, k: u32) -> impl Iterator<Item = f64> {
    let rx = rate * x;
    let log_rx = rx.ln();
    (0..k).scan(-rx, move |log_term, j| {
        if j > 0 {
            *log_term += log_rx - f64::from(j).ln();
        }
        Some(log_term.exp())
    })
}

fn erlang_survival(k: u32, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    poisson_terms(rate, x, k).sum::<f64>().min(1.0)
}

fn erlang_density(k: u32, rate: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if k == 1 { rate } else { 0.0 };
    }
    rate * poisson_terms(rate, x, k).last().unwrap_or(0.0)
}

/// `E[(Y - x)^+]` for Y ~ Erlang(k, rate).
fn erlang_excess(k: u32, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::from(k) / rate;
    }
    poisson_terms(rate, x, k)
        .enumerate()
        .map(|(m, t)| f64::from(k - m as u32) * t)
        .sum::<f64>()
        / rate
}

/// `1 - (rate / (rate + s))^k` without cancellation.
fn erlang_lst_complement(k: u32, rate: f64, s: f64) -> f64 {
    -(-f64::from(k) * (s / rate).ln_1p()).exp_m1()
}

impl Distribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Law::Exponential { rate }.try_into()
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        Law::Deterministic { value }.try_into()
    }

    pub fn erlang(phases: u32, rate: f64) -> Result<Self> {
        Law::Erlang { phases, rate }.try_into()
    }

    pub fn mixed_erlang(p: f64, phases: u32, rate: f64) -> Result<Self> {
        Law::MixedErlang { p, phases, rate }.try_into()
    }

    pub fn hyperexponential(p: f64, rate1: f64, rate2: f64) -> Result<Self> {
        Law::Hyperexponential { p, rate1, rate2 }.try_into()
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Law::Discrete { atoms }.try_into()
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// Short human-readable description, e.g. `exp(1.5)`.
    pub fn label(&self) -> String {
        match &self.law {
            Law::Exponential { rate } => format!("exp({rate})"),
            Law::Deterministic { value } => format!("det({value})"),
            Law::Erlang { phases, rate } => format!("erlang({phases}, {rate})"),
            Law::MixedErlang { p, phases, rate } => format!("mixed_erlang({p}, {phases}, {rate})"),
            Law::Hyperexponential { p, rate1, rate2 } => format!("hyperexp({p}, {rate1}, {rate2})"),
            Law::Discrete { atoms } => format!("discrete({} atoms)", atoms.len()),
        }
    }

    /// The exponential rate, when the law is exponential.
    pub fn exponential_rate(&self) -> Option<f64> {
        match self.law {
            Law::Exponential { rate } => Some(rate),
            _ => None,
        }
    }

    /// Atoms of a purely discrete law (a deterministic law is a single atom).
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match &self.law {
            Law::Deterministic { value } => Some(vec![(*value, 1.0)]),
            Law::Discrete { atoms } => Some(atoms.clone()),
            _ => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.law, Law::Deterministic { .. } | Law::Discrete { .. })
    }

    /// Points where the survival function jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.atoms()
            .map(|a| a.into_iter().map(|(v, _)| v).collect())
            .unwrap_or_default()
    }

    pub fn mean(&self) -> f64 {
        match &self.law {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Deterministic { value } => *value,
            Law::Erlang { phases, rate } => f64::from(*phases) / rate,
            Law::MixedErlang { p, phases, rate } => (f64::from(*phases) - p) / rate,
            Law::Hyperexponential { p, rate1, rate2 } => p / rate1 + (1.0 - p) / rate2,
            Law::Discrete { atoms } => atoms.iter().map(|(v, p)| v * p).sum(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match &self.law {
            Law::Exponential { rate } => 2.0 / (rate * rate),
            Law::Deterministic { value } => value * value,
            Law::Erlang { phases, rate } => {
                let k = f64::from(*phases);
                k * (k + 1.0) / (rate * rate)
            }
            Law::MixedErlang { p, phases, rate } => {
                let n = f64::from(*phases);
                (p * (n - 1.0) * n + (1.0 - p) * n * (n + 1.0)) / (rate * rate)
            }
            Law::Hyperexponential { p, rate1, rate2 } => {
                2.0 * p / (rate1 * rate1) + 2.0 * (1.0 - p) / (rate2 * rate2)
            }
            Law::Discrete { atoms } => atoms.iter().map(|(v, p)| v * v * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match &self.law {
            Law::Deterministic { .. } => 0.0,
            _ => {
                let m = self.mean();
                (self.second_moment() - m * m).max(0.0)
            }
        }
    }

    /// Squared coefficient of variation.
    pub fn scv(&self) -> Result<f64> {
        let m = self.mean();
        if m <= 0.0 {
            return domain("scv is undefined for a law with zero mean");
        }
        Ok(self.variance() / (m * m))
    }

    /// `P[Y > x]`.
    pub fn survival(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        match &self.law {
            Law::Exponential { rate } => (-rate * x).exp(),
            Law::Deterministic { value } => {
                if x < *value {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Erlang { phases, rate } => erlang_survival(*phases, *rate, x),
            Law::MixedErlang { p, phases, rate } => {
                p * erlang_survival(phases - 1, *rate, x)
                    + (1.0 - p) * erlang_survival(*phases, *rate, x)
            }
            Law::Hyperexponential { p, rate1, rate2 } => {
                p * (-rate1 * x).exp() + (1.0 - p) * (-rate2 * x).exp()
            }
            Law::Discrete { atoms } => atoms.iter().filter(|(v, _)| *v > x).fold(0.0, |s, (_, p)| s + p),
        }
    }

    /// `P[Y <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Exponential { rate } => -(-rate * x).exp_m1(),
            Law::Discrete { atoms } => atoms.iter().filter(|(v, _)| *v <= x).fold(0.0, |s, (_, p)| s + p),
            _ => 1.0 - self.survival(x),
        }
    }

    /// Density of an absolutely continuous law; `None` for discrete laws.
    pub fn density(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return (!self.is_discrete()).then_some(0.0);
        }
        match &self.law {
            Law::Exponential { rate } => Some(rate * (-rate * x).exp()),
            Law::Erlang { phases, rate } => Some(erlang_density(*phases, *rate, x)),
            Law::MixedErlang { p, phases, rate } => Some(
                p * erlang_density(phases - 1, *rate, x)
                    + (1.0 - p) * erlang_density(*phases, *rate, x),
            ),
            Law::Hyperexponential { p, rate1, rate2 } => {
                Some(p * rate1 * (-rate1 * x).exp() + (1.0 - p) * rate2 * (-rate2 * x).exp())
            }
            Law::Deterministic { .. } | Law::Discrete { .. } => None,
        }
    }

    /// `E[(Y - x)^+] = ∫_x^∞ P[Y > y] dy`.
    pub fn excess_mean(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.mean() - x.min(0.0);
        }
        match &self.law {
            Law::Exponential { rate } => (-rate * x).exp() / rate,
            Law::Deterministic { value } => (value - x).max(0.0),
            Law::Erlang { phases, rate } => erlang_excess(*phases, *rate, x),
            Law::MixedErlang { p, phases, rate } => {
                p * erlang_excess(phases - 1, *rate, x)
                    + (1.0 - p) * erlang_excess(*phases, *rate, x)
            }
            Law::Hyperexponential { p, rate1, rate2 } => {
                p * (-rate1 * x).exp() / rate1 + (1.0 - p) * (-rate2 * x).exp() / rate2
            }
            Law::Discrete { atoms } => atoms.iter().map(|(v, p)| p * (v - x).max(0.0)).sum(),
        }
    }

    /// `∫_0^x P[Y > y] dy = E[min(Y, x)]`.
    pub fn truncated_mean(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Exponential { rate } => -(-rate * x).exp_m1() / rate,
            Law::Deterministic { value } => value.min(x),
            Law::Discrete { atoms } => atoms.iter().map(|(v, p)| p * v.min(x)).sum(),
            _ => (self.mean() - self.excess_mean(x)).max(0.0),
        }
    }

    /// Laplace–Stieltjes transform `E[exp(-sY)]` for `s >= 0`.
    pub fn lst(&self, s: f64) -> Result<f64> {
        Ok(1.0 - self.lst_complement(s)?)
    }

    /// `1 - E[exp(-sY)]`, accurate for small `s`.
    pub fn lst_complement(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return domain(format!("transform argument must be >= 0, got {s}"));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let exp_comp = |rate: f64| s / (rate + s);
        Ok(match &self.law {
            Law::Exponential { rate } => exp_comp(*rate),
            Law::Deterministic { value } => -(-s * value).exp_m1(),
            Law::Erlang { phases, rate } => erlang_lst_complement(*phases, *rate, s),
            Law::MixedErlang { p, phases, rate } => {
                p * erlang_lst_complement(phases - 1, *rate, s)
                    + (1.0 - p) * erlang_lst_complement(*phases, *rate, s)
            }
            Law::Hyperexponential { p, rate1, rate2 } => {
                p * exp_comp(*rate1) + (1.0 - p) * exp_comp(*rate2)
            }
            Law::Discrete { atoms } => atoms.iter().map(|(v, p)| -p * (-s * v).exp_m1()).sum(),
        })
    }

    /// Transform of the stationary residual (equilibrium excess) law,
    /// `(1 - lst(s)) / (s E[Y])`, continuous at `s = 0`.
    pub fn residual_lst(&self, s: f64) -> Result<f64> {
        let m = self.mean();
        if m <= 0.0 {
            return domain("residual law is undefined for a law with zero mean");
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        Ok(self.lst_complement(s)? / (s * m))
    }

    /// Smallest `x` with `P[Y > x] < level`; the largest atom for discrete laws.
    pub fn truncation_point(&self, level: f64) -> f64 {
        if let Some(atoms) = self.atoms() {
            return atoms.last().map_or(0.0, |a| a.0);
        }
        let mut hi = self.mean().max(f64::MIN_POSITIVE);
        while self.survival(hi) >= level {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.survival(mid) < level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `E[g(Y)]`: a finite sum over atoms for discrete laws, quadrature of
    /// `g · density` otherwise. `g_breaks` lists kinks or jumps of `g`.
    pub fn expect<G>(&self, g: G, g_breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64>
    where
        G: Fn(f64) -> f64,
    {
        if let Some(atoms) = self.atoms() {
            return Ok(atoms.iter().map(|&(v, p)| p * g(v)).sum());
        }
        let upper = self.truncation_point(cfg.tail_level);
        quadrature::integrate(
            |x| g(x) * self.density(x).unwrap_or(0.0),
            0.0,
            upper,
            g_breaks,
            cfg,
        )
    }

    /// `∫_0^∞ P[Y > x] dx` by quadrature; used to cross-check `mean`.
    pub fn integrated_survival(&self, cfg: &QuadratureConfig) -> Result<f64> {
        quadrature::integrate(
            |x| self.survival(x),
            0.0,
            self.truncation_point(cfg.tail_level),
            &self.breakpoints(),
            cfg,
        )
    }

    /// Draws one variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        fn gamma<R: Rng + ?Sized>(k: u32, rate: f64, rng: &mut R) -> f64 {
            if k == 1 {
                return Exp::new(rate).expect("validated rate").sample(rng);
            }
            Gamma::new(f64::from(k), 1.0 / rate)
                .expect("validated shape and rate")
                .sample(rng)
        }
        match &self.law {
            Law::Exponential { rate } => Exp::new(*rate).expect("validated rate").sample(rng),
            Law::Deterministic { value } => *value,
            Law::Erlang { phases, rate } => gamma(*phases, *rate, rng),
            Law::MixedErlang { p, phases, rate } => {
                let k = if rng.random::<f64>() < *p { phases - 1 } else { *phases };
                gamma(k, *rate, rng)
            }
            Law::Hyperexponential { p, rate1, rate2 } => {
                let rate = if rng.random::<f64>() < *p { rate1 } else { rate2 };
                Exp::new(*rate).expect("validated rate").sample(rng)
            }
            Law::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(v, p) in atoms {
                    acc += p;
                    if u < acc {
                        return v;
                    }
                }
                atoms.last().expect("non-empty").0
            }
        }
    }
}
