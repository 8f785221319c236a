use super::Distribution;
use crate::error::{domain, Result};
use crate::quadrature::{self, QuadratureConfig};

/// `∫_0^∞ w(x) P[Y1 > x] P[Y2 > x] dx`, split at every atom of either law.
pub fn joint_survival_integral<W>(
    d1: &Distribution,
    d2: &Distribution,
    weight: W,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    W: Fn(f64) -> f64,
{
    let upper = d1
        .truncation_point(cfg.tail_level)
        .min(d2.truncation_point(cfg.tail_level));
    let mut breaks = d1.breakpoints();
    breaks.extend(d2.breakpoints());
    quadrature::integrate(
        |x| weight(x) * d1.survival(x) * d2.survival(x),
        0.0,
        upper,
        &breaks,
        cfg,
    )
}

/// `E[min(Y1, Y2)]` for independent `Y1`, `Y2`.
pub fn expected_min(d1: &Distribution, d2: &Distribution, cfg: &QuadratureConfig) -> Result<f64> {
    if let (Some(r1), Some(r2)) = (d1.exponential_rate(), d2.exponential_rate()) {
        return Ok(1.0 / (r1 + r2));
    }
    joint_survival_integral(d1, d2, |_| 1.0, cfg)
}

/// `E[exp(-s min(Y1, Y2))] = 1 - s ∫ exp(-sx) P[Y1 > x] P[Y2 > x] dx`.
pub fn min_lst(d1: &Distribution, d2: &Distribution, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("transform argument must be >= 0, got {s}"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    if let (Some(r1), Some(r2)) = (d1.exponential_rate(), d2.exponential_rate()) {
        return Ok((r1 + r2) / (r1 + r2 + s));
    }
    let integral = joint_survival_integral(d1, d2, |x| (-s * x).exp(), cfg)?;
    Ok(1.0 - s * integral)
}
