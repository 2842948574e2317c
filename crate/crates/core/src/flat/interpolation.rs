use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::test_function::{general_integral, RadialTest, TestFunction, TestKind};
use super::ExponentTriple;
use crate::error::{LabError, Result};
use crate::norm::MinkowskiNorm;
use crate::quadrature::{
    flat_radial_volume_integral, radial_integral, try_fd_derivative, Decay, IntegralResult,
    OriginClass, QuadratureSpec, RadialProfile, Weight,
};
use crate::report::InequalityReport;
use crate::special::unit_ball_volume;

/// Relative tolerance used for quadratures that are differentiated numerically.
const DIFFERENTIATED_TOLERANCE: f64 = 1e-13;

/// `h(lambda, rho) = (lambda + rho^{2-q})^{(2p-2)/(2-p)} rho^{-(q+1)} (2 rho^{2-q} (p-q)/(p-2) + q lambda)`.
pub fn kernel_h(t: &ExponentTriple, lambda: f64, rho: f64) -> f64 {
    let (p, q) = (t.p(), t.q());
    let s = rho.powf(2.0 - q);
    (lambda + s).powf((2.0 * p - 2.0) / (2.0 - p))
        * rho.powf(-(q + 1.0))
        * (2.0 * s * (p - q) / (p - 2.0) + q * lambda)
}

/// `g(lambda, rho) = (lambda + rho^{2-q})^{(3p-4)/(2-p)} rho^{1-2q}
/// (rho^{2-q} ((2p-2)(2-q)/(p-2) + 2(q-1)) + 2(q-1) lambda)`.
///
/// Negative near the origin when `q < 1`.
pub fn kernel_g(t: &ExponentTriple, lambda: f64, rho: f64) -> f64 {
    let (p, q) = (t.p(), t.q());
    let s = rho.powf(2.0 - q);
    let coeff = (2.0 * p - 2.0) * (2.0 - q) / (p - 2.0) + 2.0 * (q - 1.0);
    (lambda + s).powf((3.0 * p - 4.0) / (2.0 - p))
        * rho.powf(1.0 - 2.0 * q)
        * (s * coeff + 2.0 * (q - 1.0) * lambda)
}

/// Selector for [`pqr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pqr {
    P,
    Q,
    R,
}

fn kernel_profile(t: &ExponentTriple, lambda: f64, which: Pqr) -> RadialProfile {
    let (p, q) = (t.p(), t.q());
    let t = *t;
    match which {
        Pqr::P => {
            let sigma = (2.0 - q) * (2.0 * p - 2.0) / (p - 2.0) + 2.0 * q - 1.0;
            RadialProfile::new(
                move |r| kernel_h(&t, lambda, r),
                Decay::Algebraic(sigma),
                OriginClass::PowerSingular(q + 1.0),
            )
        }
        Pqr::Q | Pqr::R => {
            let sigma = (2.0 - q) * (3.0 * p - 4.0) / (p - 2.0) + 3.0 * q - 3.0;
            let tau = 2.0 * q - 1.0;
            let origin = if tau > 0.0 {
                OriginClass::PowerSingular(tau)
            } else {
                OriginClass::Bounded
            };
            RadialProfile::new(
                move |r| kernel_g(&t, lambda, r),
                Decay::Algebraic(sigma),
                origin,
            )
        }
    }
}

fn effective_spec(t: &ExponentTriple, spec: &QuadratureSpec) -> QuadratureSpec {
    if t.slow_decay() {
        spec.doubled_budget()
    } else {
        *spec
    }
}

/// `P = omega_n int rho^n h`, `R = omega_n int rho^n g`, `Q = ((2-q)/(p-2))^2 R`.
pub fn pqr(
    t: &ExponentTriple,
    lambda: f64,
    which: Pqr,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(LabError::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let spec = effective_spec(t, spec);
    let profile = kernel_profile(t, lambda, which);
    let base = radial_integral(&profile, Weight::Power(t.nf()), &spec)?
        .ensure_converged(spec.relative_tolerance)?
        .scaled(unit_ball_volume(t.n()));
    Ok(match which {
        Pqr::P | Pqr::R => base,
        Pqr::Q => base.scaled(((2.0 - t.q()) / (t.p() - 2.0)).powi(2)),
    })
}

/// `Q R / P^2` against `(n - q)^2 / p^2` for each `lambda`.
pub fn check_pqr_identity(
    t: &ExponentTriple,
    lambdas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<InequalityReport>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let p = pqr(t, lambda, Pqr::P, spec)?;
            let r = pqr(t, lambda, Pqr::R, spec)?;
            let q = r.scaled(((2.0 - t.q()) / (t.p() - 2.0)).powi(2));
            Ok(InequalityReport::new(
                "QR/P^2",
                lambda,
                q.value * r.value,
                p.value * p.value,
                t.sharp_constant(),
            )
            .with_errors(
                &[q.value, r.value, p.value],
                &[q.error, r.error, p.error],
                &[1.0, 1.0, 2.0],
            ))
        })
        .collect()
}

/// Residual of `(2(p-q)/(p-2) - n)/(2-q) P + lambda P'` at one `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeResidual {
    pub lambda: f64,
    pub value: f64,
    pub derivative: f64,
    pub residual: f64,
    /// `|residual| / P`
    pub relative: f64,
}

/// Checks the first-order ODE satisfied by `P`; the derivative is a
/// Richardson-extrapolated central difference of quadratures at tolerance 1e-13.
pub fn check_p_ode(
    t: &ExponentTriple,
    lambdas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<OdeResidual>> {
    let tight = QuadratureSpec {
        max_subdivisions: spec.max_subdivisions.max(200),
        ..spec.with_relative_tolerance(spec.relative_tolerance.min(DIFFERENTIATED_TOLERANCE))
    };
    let coeff = (t.upper_dimension_bound() - t.nf()) / (2.0 - t.q());
    lambdas
        .par_iter()
        .map(|&lambda| {
            let value = pqr(t, lambda, Pqr::P, &tight)?.value;
            let derivative =
                try_fd_derivative(|l| pqr(t, l, Pqr::P, &tight).map(|r| r.value), lambda)?;
            let residual = coeff * value + lambda * derivative;
            Ok(OdeResidual {
                lambda,
                value,
                derivative,
                residual,
                relative: residual.abs() / value.abs(),
            })
        })
        .collect()
}

/// Least-squares fit of `y = c x^e` on log-log axes; returns `(e, c)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(LabError::InvalidArgument(
            "power fit needs at least two matching points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(LabError::InvalidArgument(
            "power fit needs positive data".into(),
        ));
    }
    let design = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i].ln() });
    let rhs = DVector::from_iterator(ys.len(), ys.iter().map(|y| y.ln()));
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| LabError::InvalidArgument(e.to_string()))?;
    Ok((sol[1], sol[0].exp()))
}

/// The extremal family `w_lambda(rho) = (lambda + rho^{2-q})^{1/(2-p)}`.
pub fn extremal(t: &ExponentTriple, lambda: f64) -> TestFunction {
    let (p, q) = (t.p(), t.q());
    TestFunction::radial(
        move |r| (lambda + r.powf(2.0 - q)).powf(1.0 / (2.0 - p)),
        move |r| {
            (2.0 - q) / (2.0 - p)
                * (lambda + r.powf(2.0 - q)).powf(1.0 / (2.0 - p) - 1.0)
                * r.powf(1.0 - q)
        },
        Decay::Algebraic((2.0 - q) / (p - 2.0)),
    )
    .with_origin(0.0, (q - 1.0).max(0.0))
}

fn radial_integrals(
    r: &RadialTest,
    t: &ExponentTriple,
    spec: &QuadratureSpec,
) -> Result<[IntegralResult; 3]> {
    let (p, q, n) = (t.p(), t.q(), t.n());
    let a = r.profile(|_, du, _| du * du, 0.0, 2.0, 0.0);
    let b = r.profile(
        move |u, _, rho| u.abs().powf(2.0 * p - 2.0) * rho.powf(2.0 - 2.0 * q),
        2.0 * p - 2.0,
        0.0,
        2.0 - 2.0 * q,
    );
    let c = r.profile(move |u, _, rho| u.abs().powf(p) * rho.powf(-q), p, 0.0, -q);
    let mut out = [IntegralResult::exact(0.0); 3];
    for (slot, (name, prof)) in out.iter_mut().zip([("A", a), ("B", b), ("C", c)]) {
        *slot = flat_radial_volume_integral(&prof, n, spec)
            .map_err(|e| match e {
                LabError::NonIntegrable(m) => {
                    LabError::NonIntegrable(format!("integral {name}: {m}"))
                }
                other => other,
            })?
            .ensure_converged(spec.relative_tolerance)?;
    }
    Ok(out)
}

/// `A B / C^2` against `(n - q)^2 / p^2`, where
/// `A = int F*(Du)^2`, `B = int |u|^{2p-2} / F^{2q-2}`, `C = int |u|^p / F^q`.
pub fn interpolation_report(
    norm: &MinkowskiNorm,
    t: &ExponentTriple,
    u: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    if norm.dimension() != t.n() {
        return Err(LabError::DimensionMismatch {
            expected: t.n(),
            got: norm.dimension(),
        });
    }
    u.ensure_nonzero()?;
    let spec = effective_spec(t, spec);
    let [a, b, c] = match u.kind() {
        TestKind::Radial(r) => radial_integrals(r, t, &spec)?,
        TestKind::General(_) => {
            let (p, q) = (t.p(), t.q());
            let density = norm.bh_density(&spec)?;
            [
                general_integral(norm, u, density, &spec, |_, d, _| d * d)?,
                general_integral(norm, u, density, &spec, move |v, _, rho| {
                    v.abs().powf(2.0 * p - 2.0) * rho.powf(2.0 - 2.0 * q)
                })?,
                general_integral(norm, u, density, &spec, move |v, _, rho| {
                    v.abs().powf(p) * rho.powf(-q)
                })?,
            ]
        }
    };
    Ok(InequalityReport::new(
        "interpolation AB/C^2",
        0.0,
        a.value * b.value,
        c.value * c.value,
        t.sharp_constant(),
    )
    .with_errors(
        &[a.value, b.value, c.value],
        &[a.error, b.error, c.error],
        &[1.0, 1.0, 2.0],
    ))
}
