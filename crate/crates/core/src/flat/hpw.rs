use serde::{Deserialize, Serialize};

use super::test_function::{general_integral, TestFunction, TestKind};
use crate::error::{LabError, Result};
use crate::norm::MinkowskiNorm;
use crate::quadrature::{
    flat_radial_volume_integral, radial_integral, try_fd_derivative, Decay, IntegralResult,
    OriginClass, QuadratureSpec, RadialProfile, Weight,
};
use crate::report::InequalityReport;
use crate::special::{gaussian_moment, unit_ball_volume};

/// `T(lambda)` by quadrature next to its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianT {
    pub n: usize,
    pub lambda: f64,
    pub value: IntegralResult,
    pub closed_form: f64,
    /// `|T - closed| / T`
    pub relative_gap: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )))
    }
}

/// `2 (2 lambda)^{-n/2} omega_n int_0^inf t^{n+1} exp(-t^2) dt`.
pub fn gaussian_t_closed_form(n: usize, lambda: f64) -> f64 {
    2.0 * (2.0 * lambda).powf(-(n as f64) / 2.0)
        * unit_ball_volume(n)
        * gaussian_moment((n + 1) as f64)
}

fn t_quadrature(n: usize, lambda: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    check_lambda(lambda)?;
    let f = RadialProfile::gaussian(2.0 * lambda);
    Ok(radial_integral(&f, Weight::Power((n + 1) as f64), spec)?
        .ensure_converged(spec.relative_tolerance)?
        .scaled(4.0 * lambda * unit_ball_volume(n)))
}

/// `T(lambda) = 4 lambda omega_n int_0^inf rho^{n+1} exp(-2 lambda rho^2) drho`.
pub fn gaussian_t(n: usize, lambda: f64, spec: &QuadratureSpec) -> Result<GaussianT> {
    let value = t_quadrature(n, lambda, spec)?;
    let closed_form = gaussian_t_closed_form(n, lambda);
    Ok(GaussianT {
        n,
        lambda,
        value,
        closed_form,
        relative_gap: (value.value - closed_form).abs() / value.value.abs(),
    })
}

/// `|-lambda T'(lambda) - (n/2) T(lambda)| / T(lambda)` with `T'` by finite differences.
pub fn gaussian_t_ode_residual(n: usize, lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    let tight = spec.with_relative_tolerance(spec.relative_tolerance.min(1e-13));
    let t = t_quadrature(n, lambda, &tight)?.value;
    let dt = try_fd_derivative(|l| t_quadrature(n, l, &tight).map(|r| r.value), lambda)?;
    Ok((-lambda * dt - 0.5 * n as f64 * t).abs() / t)
}

/// `2 lambda int F^2 e^{-2 lambda F^2}` against `(n/2) int e^{-2 lambda F^2}` as a ratio with target 1.
pub fn hpw_moment_identity(
    n: usize,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    check_lambda(lambda)?;
    let a = 2.0 * lambda;
    let second = RadialProfile::new(
        move |r| r * r * (-a * r * r).exp(),
        Decay::Gaussian(a),
        OriginClass::Bounded,
    );
    let lhs = flat_radial_volume_integral(&second, n, spec)?
        .ensure_converged(spec.relative_tolerance)?
        .scaled(2.0 * lambda);
    let rhs = flat_radial_volume_integral(&RadialProfile::gaussian(a), n, spec)?
        .ensure_converged(spec.relative_tolerance)?
        .scaled(0.5 * n as f64);
    Ok(
        InequalityReport::new("HPW moment identity", lambda, lhs.value, rhs.value, 1.0)
            .with_errors(
                &[lhs.value, rhs.value],
                &[lhs.error, rhs.error],
                &[1.0, 1.0],
            ),
    )
}

/// `(int F*(Du)^2)(int F^2 u^2) / (int u^2)^2` against `n^2 / 4`.
pub fn hpw_report(
    norm: &MinkowskiNorm,
    n: usize,
    u: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    if norm.dimension() != n {
        return Err(LabError::DimensionMismatch {
            expected: n,
            got: norm.dimension(),
        });
    }
    u.ensure_nonzero()?;
    let [grad, moment, mass] = match u.kind() {
        TestKind::Radial(r) => {
            let profiles = [
                r.profile(|_, du, _| du * du, 0.0, 2.0, 0.0),
                r.profile(|u, _, rho| rho * rho * u * u, 2.0, 0.0, 2.0),
                r.profile(|u, _, _| u * u, 2.0, 0.0, 0.0),
            ];
            let mut out = [IntegralResult::exact(0.0); 3];
            for (slot, p) in out.iter_mut().zip(&profiles) {
                *slot = flat_radial_volume_integral(p, n, spec)?
                    .ensure_converged(spec.relative_tolerance)?;
            }
            out
        }
        TestKind::General(_) => {
            let density = norm.bh_density(spec)?;
            [
                general_integral(norm, u, density, spec, |_, d, _| d * d)?,
                general_integral(norm, u, density, spec, |v, _, rho| rho * rho * v * v)?,
                general_integral(norm, u, density, spec, |v, _, _| v * v)?,
            ]
        }
    };
    let nf = n as f64;
    Ok(InequalityReport::new(
        "HPW",
        0.0,
        grad.value * moment.value,
        mass.value * mass.value,
        nf * nf / 4.0,
    )
    .with_errors(
        &[grad.value, moment.value, mass.value],
        &[grad.error, moment.error, mass.error],
        &[1.0, 1.0, 2.0],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn t_examples() {
        let spec = QuadratureSpec::default();
        let t = gaussian_t(2, 0.5, &spec).unwrap();
        assert!((t.value.value - PI).abs() < 1e-12);
        let t = gaussian_t(3, 0.5, &spec).unwrap();
        assert!((t.value.value - PI.powf(1.5)).abs() < 1e-11);
        assert!(t.relative_gap < 1e-9);
    }
}
