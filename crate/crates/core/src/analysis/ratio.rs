//! The two ratio functions, their max-min in closed form, and a grid search
//! used to cross-check it.

use crate::error::{CarpError, Result};

fn check_domain(alpha: f64, l: usize, k: usize) -> Result<()> {
    if k < 3 {
        return Err(CarpError::input(format!("ratio analysis needs k >= 3, got {k}")));
    }
    if l == 0 {
        return Err(CarpError::input("l must be at least 1"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CarpError::input(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn tau_unchecked(alpha: f64, l: f64, k: f64) -> f64 {
    (5.0 * k - 3.0) / (2.0 * k) - (2.0 * l * l - 2.0 * l + k - 1.0) * alpha / (2.0 * k * l)
}

fn eta_unchecked(alpha: f64, l: f64, k: f64) -> f64 {
    (2.0 * k - 1.0) / k - (l * l + l - 2.0 * k * l + k - 1.0) * alpha / (k * l)
}

pub fn tau(alpha: f64, l: usize, k: usize) -> Result<f64> {
    check_domain(alpha, l, k)?;
    Ok(tau_unchecked(alpha, l as f64, k as f64))
}

pub fn eta(alpha: f64, l: usize, k: usize) -> Result<f64> {
    check_domain(alpha, l, k)?;
    Ok(eta_unchecked(alpha, l as f64, k as f64))
}

/// The α at which `tau` and `eta` meet for a given `l`.
pub fn crossing_alpha(l: usize) -> f64 {
    l as f64 / (4.0 * l as f64 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub k: usize,
    pub l_tilde: usize,
    pub ratio: f64,
    /// The same value through the `eta`-based expression.
    pub ratio_alt: f64,
}

/// Smallest `l >= 1` with `4l + 1 >= sqrt(8k - 7)`, i.e. the ceiling of
/// `(sqrt(8k - 7) - 1) / 4`, computed in integers.
pub fn l_tilde(k: usize) -> usize {
    let target = 8 * k as u128 - 7;
    let mut l = (((8.0 * k as f64 - 7.0).sqrt() - 1.0) / 4.0).ceil().max(1.0) as u128;
    while l > 1 && (4 * (l - 1) + 1).pow(2) >= target {
        l -= 1;
    }
    while (4 * l + 1).pow(2) < target {
        l += 1;
    }
    l as usize
}

pub fn ratio_closed_form(k: usize) -> Result<RatioPoint> {
    if k < 3 {
        return Err(CarpError::input(format!("closed-form ratio needs k >= 3, got {k}")));
    }
    let l = l_tilde(k);
    let (lf, kf) = (l as f64, k as f64);
    let ratio = 2.5 - (2.0 * lf * lf + 10.0 * lf + kf - 4.0) / (2.0 * kf * (4.0 * lf - 1.0));
    let ratio_alt =
        (2.0 * kf - 1.0) / kf - (lf * lf + lf - 2.0 * kf * lf + kf - 1.0) / (kf * (4.0 * lf - 1.0));
    assert!(
        (ratio - ratio_alt).abs() <= 1e-12,
        "closed forms disagree at k = {k}: {ratio} vs {ratio_alt}"
    );
    Ok(RatioPoint {
        k,
        l_tilde: l,
        ratio,
        ratio_alt,
    })
}

/// `max min(tau, eta)` over `l in 1..=l_max` and an α grid of `alpha_steps`
/// intervals, with 0, 1 and each crossing point always included.
pub fn ratio_grid_search(k: usize, l_max: usize, alpha_steps: usize) -> Result<f64> {
    check_domain(0.0, l_max.max(1), k)?;
    if alpha_steps == 0 {
        return Err(CarpError::input("alpha_steps must be positive"));
    }
    let kf = k as f64;
    let mut best = f64::NEG_INFINITY;
    for l in 1..=l_max {
        let lf = l as f64;
        let value = |a: f64| tau_unchecked(a, lf, kf).min(eta_unchecked(a, lf, kf));
        best = best.max(value(crossing_alpha(l)));
        for j in 0..=alpha_steps {
            best = best.max(value(j as f64 / alpha_steps as f64));
        }
    }
    Ok(best)
}

/// `eta` evaluated at the crossing point for each `l in 1..=l_max`.
pub fn eta_at_crossings(k: usize, l_max: usize) -> Result<Vec<f64>> {
    (1..=l_max).map(|l| eta(crossing_alpha(l), l, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_values() {
        for k in 3..20 {
            for l in 1..6 {
                let kf = k as f64;
                assert!((tau(0.0, l, k).unwrap() - (5.0 * kf - 3.0) / (2.0 * kf)).abs() < 1e-15);
                assert!((eta(0.0, l, k).unwrap() - (2.0 * kf - 1.0) / kf).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn functions_cross_at_crossing_alpha() {
        for k in 3..=100 {
            for l in 1..=20 {
                let a = crossing_alpha(l);
                assert!((tau(a, l, k).unwrap() - eta(a, l, k).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(tau(0.5, 1, 2).is_err());
        assert!(eta(0.5, 0, 5).is_err());
        assert!(tau(1.5, 1, 5).is_err());
        assert!(eta(-0.1, 1, 5).is_err());
        assert!(ratio_closed_form(2).is_err());
    }

    #[test]
    fn l_tilde_matches_float_ceiling() {
        for k in 3..5000usize {
            let direct = ((((8 * k - 7) as f64).sqrt() - 1.0) / 4.0).ceil() as usize;
            assert_eq!(l_tilde(k), direct.max(1), "k = {k}");
        }
        assert_eq!(l_tilde(4), 1);
        assert_eq!(l_tilde(5), 2);
        assert_eq!(l_tilde(11), 2);
        assert_eq!(l_tilde(12), 3);
    }

    #[test]
    fn small_k_values() {
        let r3 = ratio_closed_form(3).unwrap();
        assert_eq!(r3.l_tilde, 1);
        assert!((r3.ratio - (2.5 - 11.0 / 18.0)).abs() < 1e-12);
        let r4 = ratio_closed_form(4).unwrap();
        assert!((r4.ratio - 2.0).abs() < 1e-12);
        let r6 = ratio_closed_form(6).unwrap();
        assert_eq!(r6.l_tilde, 2);
        assert!((r6.ratio - (2.5 - 30.0 / 84.0)).abs() < 1e-12);
    }

    #[test]
    fn grid_search_agrees_for_small_k() {
        for k in [3, 4, 7, 20, 100] {
            let l_max = (4.0 * (k as f64).sqrt()).ceil() as usize;
            let grid = ratio_grid_search(k, l_max, 10_000).unwrap();
            assert!((grid - ratio_closed_form(k).unwrap().ratio).abs() < 1e-6, "k = {k}");
        }
    }

    #[test]
    fn grid_search_rejects_zero_steps() {
        assert!(ratio_grid_search(5, 3, 0).is_err());
    }
}
