//! Bridge functions linking a latent correlation to the population Kendall's
//! tau of the observed pair, and their monotone inverses.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::dists::{bivariate_dependence, Correlation};
use crate::error::Result;

/// Root-finding controls shared by the bridge inversions.
#[derive(Debug, Clone, Copy)]
pub struct InversionConfig {
    /// Search interval is `[−1 + delta, 1 − delta]`.
    pub delta: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            delta: 0.01,
            x_tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Binary/binary bridge `F(t; Δj, Δk) = 2{Φ2(Δj, Δk, t) − Φ(Δj)Φ(Δk)}`.
pub fn bridge_f(t: f64, dj: f64, dk: f64) -> Result<f64> {
    Ok(2.0 * bivariate_dependence(dj, dk, t)?)
}

/// Binary/continuous bridge `H(t; Δj) = 4Φ2(Δj, 0, t/√2) − 2Φ(Δj)`.
pub fn bridge_h(t: f64, dj: f64) -> Result<f64> {
    Correlation::new(t)?;
    // Φ(0) = 1/2, so H is four times the dependence term at (Δj, 0, t/√2)
    Ok(4.0 * bivariate_dependence(dj, 0.0, t * FRAC_1_SQRT_2)?)
}

/// Continuous/continuous transform `sin(π τ / 2)`.
pub fn continuous_pair_transform(tau: f64) -> f64 {
    (0.5 * PI * tau).sin()
}

/// Bisection for the root of an increasing function on `[lo, hi]`;
/// targets outside `[f(lo), f(hi)]` return the nearer endpoint.
pub fn invert_increasing(
    f: impl Fn(f64) -> f64,
    target: f64,
    lo: f64,
    hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo >= f_hi {
        // flat (saturated) function carries no information
        return 0.5 * (lo + hi);
    }
    if target <= f_lo {
        return lo;
    }
    if target >= f_hi {
        return hi;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid) - target;
        if fm == 0.0 {
            return mid;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= x_tol {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn bounds(cfg: &InversionConfig) -> (f64, f64) {
    (-1.0 + cfg.delta, 1.0 - cfg.delta)
}

/// `F⁻¹(τ; Δj, Δk)` clamped to `[−1 + δ, 1 − δ]`.
pub fn bridge_f_inverse(tau: f64, dj: f64, dk: f64) -> Correlation {
    bridge_f_inverse_with(tau, dj, dk, &InversionConfig::default())
}

pub fn bridge_f_inverse_with(tau: f64, dj: f64, dk: f64, cfg: &InversionConfig) -> Correlation {
    let (lo, hi) = bounds(cfg);
    let f = |t: f64| bridge_f(t, dj, dk).expect("bracket lies inside (-1, 1)");
    let t = invert_increasing(f, tau, lo, hi, cfg.x_tol, cfg.max_iter);
    Correlation::new(t).expect("root lies inside the bracket")
}

/// `H⁻¹(τ; Δj)` clamped to `[−1 + δ, 1 − δ]`.
pub fn bridge_h_inverse(tau: f64, dj: f64) -> Correlation {
    bridge_h_inverse_with(tau, dj, &InversionConfig::default())
}

pub fn bridge_h_inverse_with(tau: f64, dj: f64, cfg: &InversionConfig) -> Correlation {
    let (lo, hi) = bounds(cfg);
    let f = |t: f64| bridge_h(t, dj).expect("bracket lies inside (-1, 1)");
    let t = invert_increasing(f, tau, lo, hi, cfg.x_tol, cfg.max_iter);
    Correlation::new(t).expect("root lies inside the bracket")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn f_closed_form_and_zero() {
        assert!((bridge_f(0.5, 0.0, 0.0).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(bridge_f(0.0, 1.2, -0.7).unwrap(), 0.0);
        assert!(bridge_f(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn h_closed_form_and_zero() {
        assert!((bridge_h(0.7071, 0.0).unwrap() - (2.0 / PI) * (0.7071 / 2f64.sqrt()).asin()).abs() < 1e-12);
        assert!((bridge_h(2f64.sqrt() * 0.5, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(bridge_h(0.0, 2.0).unwrap(), 0.0);
        assert!(bridge_h(-1.0, 0.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!((bridge_f_inverse(1.0 / 6.0, 0.0, 0.0).value() - 0.5).abs() < 1e-9);
        for &(dj, dk) in &[(0.0, 0.0), (1.3, -0.4), (-2.0, 2.5)] {
            assert!(bridge_f_inverse(0.0, dj, dk).value().abs() < 1e-9);
        }
        assert!((bridge_h_inverse(1.0 / 3.0, 0.0).value() - 0.70711).abs() < 1e-5);
        assert!(bridge_h_inverse(0.0, -1.1).value().abs() < 1e-9);
    }

    #[test]
    fn inverse_round_trips() {
        for &t in &[-0.9, -0.4, 0.2, 0.7] {
            let tau = bridge_f(t, 0.3, -0.8).unwrap();
            assert!((bridge_f_inverse(tau, 0.3, -0.8).value() - t).abs() < 1e-6);
        }
        for &t in &[-0.9, 0.3, 0.8] {
            for &dj in &[-1.0, 0.0, 1.5] {
                let tau = bridge_h(t, dj).unwrap();
                assert!((bridge_h_inverse(tau, dj).value() - t).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn inverse_clamps_out_of_range() {
        assert_eq!(bridge_f_inverse(0.9, 0.0, 0.0).value(), 0.99);
        assert_eq!(bridge_f_inverse(-0.9, 0.0, 0.0).value(), -0.99);
        assert_eq!(bridge_h_inverse(5.0, 0.5).value(), 0.99);
    }

    #[test]
    fn continuous_transform_values() {
        assert_eq!(continuous_pair_transform(0.0), 0.0);
        assert!((continuous_pair_transform(1.0 / 3.0) - 0.5).abs() < 1e-15);
        assert_eq!(continuous_pair_transform(-1.0), -1.0);
    }

    fn correlated_pair(rng: &mut ChaCha8Rng, t: f64) -> (f64, f64) {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        (a, t * a + (1.0 - t * t).sqrt() * b)
    }

    #[test]
    fn f_matches_monte_carlo() {
        let (t, dj, dk) = (0.8, 0.5, -0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut both, mut first, mut second) = (0u64, 0u64, 0u64);
        for _ in 0..n {
            let (z1, z2) = correlated_pair(&mut rng, t);
            let a = z1 > dj;
            let b = z2 > dk;
            both += (a && b) as u64;
            first += a as u64;
            second += b as u64;
        }
        let nf = n as f64;
        let (pab, pa, pb) = (both as f64 / nf, first as f64 / nf, second as f64 / nf);
        let estimate = 2.0 * (pab - pa * pb);
        // delta-method standard error of 2(p_ab − p_a p_b) is below 2·sqrt(p_ab(1−p_ab)/n)
        let se = 2.0 * (pab * (1.0 - pab) / nf).sqrt() + 2.0 * (pa * (1.0 - pa) / nf).sqrt();
        let exact = bridge_f(t, dj, dk).unwrap();
        assert!((estimate - exact).abs() < 3.0 * se, "{estimate} vs {exact} (se {se})");
    }

    #[test]
    fn h_matches_monte_carlo() {
        // E{(X_i − X_i′) sign(Y_i − Y_i′)} over independent pairs of draws
        let (t, dj) = (0.5, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let (z1, y1) = correlated_pair(&mut rng, t);
            let (z2, y2) = correlated_pair(&mut rng, t);
            let x1 = (z1 > dj) as i32 as f64;
            let x2 = (z2 > dj) as i32 as f64;
            let v = (x1 - x2) * (y1 - y2).signum();
            sum += v;
            sum_sq += v * v;
        }
        let nf = n as f64;
        let mean = sum / nf;
        let se = ((sum_sq / nf - mean * mean) / nf).sqrt();
        let exact = bridge_h(t, dj).unwrap();
        assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
    }
}
