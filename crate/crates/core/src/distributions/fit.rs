//! Two-moment fits: mixed Erlang below scv 1, balanced-means
//! hyperexponential above, exponential at exactly 1.

use super::Distribution;
use crate::error::{domain, Result};

fn check_mean(mean: f64) -> Result<()> {
    if mean.is_finite() && mean > 0.0 {
        Ok(())
    } else {
        domain(format!("mean must be positive and finite, got {mean}"))
    }
}

/// Mixture of Erlang(n-1, ζ) and Erlang(n, ζ) with `1/n <= scv <= 1/(n-1)`.
pub fn fit_mixed_erlang(mean: f64, scv: f64) -> Result<Distribution> {
    check_mean(mean)?;
    if !(scv > 0.0 && scv <= 1.0) {
        return domain(format!("mixed-Erlang fit needs scv in (0, 1], got {scv}"));
    }
    if scv == 1.0 {
        return Distribution::exponential(1.0 / mean);
    }
    let n = ((1.0 / scv).ceil() as u32).max(2);
    let nf = f64::from(n);
    let disc = (nf * (1.0 + scv) - nf * nf * scv).max(0.0);
    let p = ((nf * scv - disc.sqrt()) / (1.0 + scv)).clamp(0.0, 1.0);
    Distribution::mixed_erlang(p, n, (nf - p) / mean)
}

/// Hyperexponential with balanced means, `p/ζ1 = q/ζ2`.
pub fn fit_hyperexponential(mean: f64, scv: f64) -> Result<Distribution> {
    check_mean(mean)?;
    if !(scv > 1.0) || !scv.is_finite() {
        return domain(format!("hyperexponential fit needs scv > 1, got {scv}"));
    }
    let p = 0.5 * (1.0 + ((scv - 1.0) / (scv + 1.0)).sqrt());
    let q = 1.0 - p;
    Distribution::hyperexponential(p, 2.0 * p / mean, 2.0 * q / mean)
}

/// Picks the family by scv.
pub fn fit_two_moments(mean: f64, scv: f64) -> Result<Distribution> {
    if scv > 1.0 {
        fit_hyperexponential(mean, scv)
    } else {
        fit_mixed_erlang(mean, scv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Law;

    #[test]
    fn scv_one_half_is_erlang_two() {
        let d = fit_mixed_erlang(1.0, 0.5).unwrap();
        assert_eq!(*d.law(), Law::MixedErlang { p: 0.0, phases: 2, rate: 2.0 });
    }

    #[test]
    fn scv_one_is_exponential() {
        let d = fit_mixed_erlang(2.0, 1.0).unwrap();
        assert_eq!(*d.law(), Law::Exponential { rate: 0.5 });
        assert_eq!(fit_two_moments(2.0, 1.0).unwrap(), d);
    }

    #[test]
    fn scv_point_three_uses_four_phases() {
        let d = fit_mixed_erlang(1.0, 0.3).unwrap();
        let Law::MixedErlang { phases, .. } = *d.law() else {
            panic!("expected mixed Erlang");
        };
        assert_eq!(phases, 4);
        assert!((d.mean() - 1.0).abs() < 1e-12);
        assert!((d.scv().unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn hyperexponential_parameters() {
        let d = fit_hyperexponential(1.0, 3.0).unwrap();
        let Law::Hyperexponential { p, rate1, rate2 } = *d.law() else {
            panic!("expected hyperexponential");
        };
        assert!((p - 0.853_553_390_593_273_7).abs() < 1e-12);
        assert!((rate1 - 1.707_106_781_186_547_5).abs() < 1e-12);
        assert!((rate2 - 0.292_893_218_813_452_5).abs() < 1e-12);
    }

    #[test]
    fn hyperexponential_tends_to_exponential() {
        let d = fit_hyperexponential(1.0, 1.0 + 1e-12).unwrap();
        let Law::Hyperexponential { rate1, rate2, .. } = *d.law() else {
            panic!("expected hyperexponential");
        };
        assert!((rate1 - 1.0).abs() < 1e-5 && (rate2 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(fit_mixed_erlang(1.0, 0.0).is_err());
        assert!(fit_mixed_erlang(1.0, 1.5).is_err());
        assert!(fit_mixed_erlang(-1.0, 0.5).is_err());
        assert!(fit_hyperexponential(1.0, 1.0).is_err());
        assert!(fit_hyperexponential(1.0, 0.5).is_err());
    }
}
