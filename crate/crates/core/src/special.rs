//! Gamma-function helpers for ball volumes.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

/// Volume of the Euclidean unit ball in `n` dimensions, `pi^{n/2} / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    (half * PI.ln() - ln_gamma(half + 1.0)).exp()
}

/// Surface measure of the unit sphere in `n` dimensions, `n * omega_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Lebesgue volume of `{y : ||y||_p < 1}` in `n` dimensions.
pub fn lp_ball_volume(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    (nf * (2.0 * gamma(1.0 + 1.0 / p)).ln() - ln_gamma(1.0 + nf / p)).exp()
}

/// `int_0^inf t^k e^{-t^2} dt = Gamma((k+1)/2) / 2`.
pub fn gaussian_moment(k: f64) -> f64 {
    0.5 * gamma((k + 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes_low_dimension() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn lp_ball_reduces_to_known_cases() {
        // p = 2 is the round ball, p = 1 the cross-polytope 2^n / n!.
        assert!((lp_ball_volume(3, 2.0) - unit_ball_volume(3)).abs() < 1e-13);
        assert!((lp_ball_volume(3, 1.0) - 8.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_moments() {
        assert!((gaussian_moment(0.0) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gaussian_moment(1.0) - 0.5).abs() < 1e-15);
        assert!((gaussian_moment(3.0) - 0.5).abs() < 1e-15);
    }
}
