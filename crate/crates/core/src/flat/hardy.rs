use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::test_function::{general_integral, TestFunction, TestKind};
use crate::error::{LabError, Result};
use crate::norm::MinkowskiNorm;
use crate::quadrature::{
    flat_radial_volume_integral, Decay, IntegralResult, OriginClass, QuadratureSpec, RadialProfile,
};
use crate::report::InequalityReport;
use crate::special::unit_sphere_area;

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        Err(LabError::Precondition(format!(
            "Hardy inequalities need n >= 3, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn gamma(n: usize) -> f64 {
    (n as f64 - 2.0) / 2.0
}

/// Cutoff equal to 1 on `[0, r]` and 0 on `[R, inf)`, a quintic smoothstep in
/// between; returns `(psi, psi')`.
pub fn quintic_cutoff(r: f64, big_r: f64, rho: f64) -> (f64, f64) {
    if rho <= r {
        (1.0, 0.0)
    } else if rho >= big_r {
        (0.0, 0.0)
    } else {
        let w = big_r - r;
        let s = (rho - r) / w;
        let step = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let dstep = 30.0 * s * s * (1.0 - s) * (1.0 - s) / w;
        (1.0 - step, -dstep)
    }
}

/// `int F*(Du)^2 / int u^2/F^2` against `(n-2)^2/4` on flat space (`c = 0`).
pub fn hardy_report(
    norm: &MinkowskiNorm,
    n: usize,
    u: &TestFunction,
    c: f64,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    if c != 0.0 {
        return Err(LabError::InvalidArgument(format!(
            "flat space has curvature 0; got c = {c} (use the hyperbolic reports for c < 0)"
        )));
    }
    check_dimension(n)?;
    if norm.dimension() != n {
        return Err(LabError::DimensionMismatch {
            expected: n,
            got: norm.dimension(),
        });
    }
    u.ensure_nonzero()?;
    let (grad, weighted, lower) = match u.kind() {
        TestKind::Radial(r) => {
            let g = r.profile(|_, du, _| du * du, 0.0, 2.0, 0.0);
            let h = r.profile(|u, _, rho| u * u / (rho * rho), 2.0, 0.0, -2.0);
            (
                flat_radial_volume_integral(&g, n, spec)?
                    .ensure_converged(spec.relative_tolerance)?,
                flat_radial_volume_integral(&h, n, spec)?
                    .ensure_converged(spec.relative_tolerance)?,
                r.lower(),
            )
        }
        TestKind::General(_) => {
            let density = norm.bh_density(spec)?;
            (
                general_integral(norm, u, density, spec, |_, d, _| d * d)?,
                general_integral(norm, u, density, spec, |v, _, rho| v * v / (rho * rho))?,
                0.0,
            )
        }
    };
    let g = gamma(n);
    Ok(
        InequalityReport::new("Hardy", lower, grad.value, weighted.value, g * g).with_errors(
            &[grad.value, weighted.value],
            &[grad.error, weighted.error],
            &[1.0, 1.0],
        ),
    )
}

/// One `epsilon` of the sharpness sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub i1: IntegralResult,
    pub i2: IntegralResult,
    /// `int_{eps < F < r} u^2 / F^2` by quadrature.
    pub i2_annulus: IntegralResult,
    /// `n omega_n (ln r - ln eps)`.
    pub i2_annulus_closed: f64,
    pub quotient: f64,
}

/// Least-squares extrapolation `quotient ~ limit + b x + c x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub limit: f64,
    pub b: f64,
    pub c: f64,
    /// Root-mean-square residual of the fit.
    pub rms: f64,
}

/// Quotients `I1/I2` for `u_eps = psi max(eps, F)^{-(n-2)/2}` and their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardySweep {
    pub n: usize,
    pub r: f64,
    pub big_r: f64,
    pub points: Vec<SweepPoint>,
    pub reports: Vec<InequalityReport>,
    /// `x = 1/ln(1/eps)`, linear model.
    pub first_order: SweepFit,
    /// `x = 1/ln(1/eps)`, quadratic model; its limit is the reported one.
    pub second_order: SweepFit,
    /// `x = 1/I2`, linear model.
    pub inverse_i2: SweepFit,
    pub limit: f64,
    pub target: f64,
    pub non_increasing: bool,
    pub min_quotient: f64,
}

fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<SweepFit> {
    if xs.len() < degree + 1 {
        return Err(LabError::InvalidArgument(format!(
            "a degree-{degree} fit needs at least {} points, got {}",
            degree + 1,
            xs.len()
        )));
    }
    let design = DMatrix::from_fn(xs.len(), degree + 1, |i, j| xs[i].powi(j as i32));
    let rhs = DVector::from_column_slice(ys);
    let sol = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| LabError::InvalidArgument(e.to_string()))?;
    let resid = &design * &sol - rhs;
    Ok(SweepFit {
        limit: sol[0],
        b: sol[1],
        c: if degree >= 2 { sol[2] } else { 0.0 },
        rms: (resid.norm_squared() / xs.len() as f64).sqrt(),
    })
}

/// Evaluates the Hardy quotient along the sharpness family for each `epsilon`.
pub fn hardy_sharpness_sweep(
    norm: &MinkowskiNorm,
    n: usize,
    r: f64,
    big_r: f64,
    epsilons: &[f64],
    spec: &QuadratureSpec,
) -> Result<HardySweep> {
    check_dimension(n)?;
    if norm.dimension() != n {
        return Err(LabError::DimensionMismatch {
            expected: n,
            got: norm.dimension(),
        });
    }
    if !(r > 0.0 && big_r > r && big_r.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "need 0 < r < R, got r = {r}, R = {big_r}"
        )));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && **e < r)) {
        return Err(LabError::InvalidArgument(format!(
            "need 0 < epsilon < r, got epsilon = {e}, r = {r}"
        )));
    }
    let g = gamma(n);
    let area = unit_sphere_area(n);
    let points: Vec<SweepPoint> = epsilons
        .par_iter()
        .map(|&eps| {
            let breaks = vec![eps, r, big_r];
            let u = move |rho: f64| quintic_cutoff(r, big_r, rho).0 * rho.max(eps).powf(-g);
            let du = move |rho: f64| {
                let (psi, dpsi) = quintic_cutoff(r, big_r, rho);
                let m = rho.max(eps);
                let inner = if rho > eps {
                    -g * rho.powf(-g - 1.0)
                } else {
                    0.0
                };
                dpsi * m.powf(-g) + psi * inner
            };
            let grad = RadialProfile::new(
                move |rho| du(rho).powi(2),
                Decay::Compact(big_r),
                OriginClass::Bounded,
            )
            .with_breakpoints(breaks.clone());
            let weighted = RadialProfile::new(
                move |rho| u(rho).powi(2) / (rho * rho),
                Decay::Compact(big_r),
                OriginClass::PowerSingular(2.0),
            )
            .with_breakpoints(breaks);
            let nf = n as f64;
            let annulus = RadialProfile::new(
                move |rho| rho.powf(-nf),
                Decay::Algebraic(nf),
                OriginClass::PowerSingular(nf),
            )
            .restricted(eps, r);
            let i1 = flat_radial_volume_integral(&grad, n, spec)?
                .ensure_converged(spec.relative_tolerance)?;
            let i2 = flat_radial_volume_integral(&weighted, n, spec)?
                .ensure_converged(spec.relative_tolerance)?;
            let i2_annulus = flat_radial_volume_integral(&annulus, n, spec)?
                .ensure_converged(spec.relative_tolerance)?;
            Ok(SweepPoint {
                epsilon: eps,
                i1,
                i2,
                i2_annulus,
                i2_annulus_closed: area * (r.ln() - eps.ln()),
                quotient: i1.value / i2.value,
            })
        })
        .collect::<Result<_>>()?;

    let reports = points
        .iter()
        .map(|p| {
            InequalityReport::new(
                "Hardy sharpness quotient",
                p.epsilon,
                p.i1.value,
                p.i2.value,
                g * g,
            )
            .with_errors(
                &[p.i1.value, p.i2.value],
                &[p.i1.error, p.i2.error],
                &[1.0, 1.0],
            )
        })
        .collect();

    // order by decreasing epsilon for the monotonicity check
    let mut ordered: Vec<&SweepPoint> = points.iter().collect();
    ordered.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let non_increasing = ordered.windows(2).all(|w| {
        let tol = 10.0 * (w[0].i1.relative_error() + w[0].i2.relative_error()) * w[0].quotient;
        w[1].quotient <= w[0].quotient + tol
    });
    let min_quotient = points
        .iter()
        .map(|p| p.quotient)
        .fold(f64::INFINITY, f64::min);

    let xs: Vec<f64> = points
        .iter()
        .map(|p| 1.0 / (1.0 / p.epsilon).ln())
        .collect();
    let inv: Vec<f64> = points.iter().map(|p| 1.0 / p.i2.value).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.quotient).collect();
    let fallback = SweepFit {
        limit: f64::NAN,
        b: f64::NAN,
        c: f64::NAN,
        rms: f64::NAN,
    };
    let first_order = polyfit(&xs, &ys, 1).unwrap_or(fallback);
    let second_order = polyfit(&xs, &ys, 2).unwrap_or(fallback);
    let inverse_i2 = polyfit(&inv, &ys, 1).unwrap_or(fallback);
    Ok(HardySweep {
        n,
        r,
        big_r,
        points,
        reports,
        first_order,
        second_order,
        inverse_i2,
        limit: second_order.limit,
        target: g * g,
        non_increasing,
        min_quotient,
    })
}

/// `int F*(Du)^2` against `(n-2)^2/4 int u^2/F^2 + (l/4) int u^2/(F^2 ln^2(eR/F))`
/// as a ratio with target 1; `l` is the uniformity constant of the dual norm.
pub fn double_hardy_report(
    norm: &MinkowskiNorm,
    n: usize,
    u: &TestFunction,
    big_r: f64,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    check_dimension(n)?;
    if norm.dimension() != n {
        return Err(LabError::DimensionMismatch {
            expected: n,
            got: norm.dimension(),
        });
    }
    u.ensure_nonzero()?;
    let support = match u.kind() {
        TestKind::Radial(r) => match r.decay() {
            Decay::Compact(s) => s,
            _ => {
                return Err(LabError::Precondition(
                    "double Hardy needs a compactly supported u".into(),
                ))
            }
        },
        TestKind::General(g) => {
            // the norm is convex, so its maximum over the box sits at a corner
            let n = g.support().dimension();
            let mut worst = 0.0f64;
            for mask in 0..(1usize << n) {
                let corner: Vec<f64> = (0..n)
                    .map(|i| {
                        let c = if mask >> i & 1 == 1 {
                            g.support().upper[i]
                        } else {
                            g.support().lower[i]
                        };
                        c - u.basepoint()[i]
                    })
                    .collect();
                worst = worst.max(norm.norm_value(&corner)?);
            }
            worst
        }
    };
    if !(big_r > support) {
        return Err(LabError::InvalidArgument(format!(
            "need R > support radius, got R = {big_r}, support radius = {support}"
        )));
    }
    let l = norm.uniformity_constant(spec)?;
    let log_weight = move |rho: f64| {
        let lg = (std::f64::consts::E * big_r / rho).ln();
        1.0 / (rho * rho * lg * lg)
    };
    let (grad, hardy, remainder) = match u.kind() {
        TestKind::Radial(r) => {
            let g = r.profile(|_, du, _| du * du, 0.0, 2.0, 0.0);
            let h = r.profile(|u, _, rho| u * u / (rho * rho), 2.0, 0.0, -2.0);
            let m = r.profile(move |u, _, rho| u * u * log_weight(rho), 2.0, 0.0, -2.0);
            (
                flat_radial_volume_integral(&g, n, spec)?
                    .ensure_converged(spec.relative_tolerance)?,
                flat_radial_volume_integral(&h, n, spec)?
                    .ensure_converged(spec.relative_tolerance)?,
                flat_radial_volume_integral(&m, n, spec)?
                    .ensure_converged(spec.relative_tolerance)?,
            )
        }
        TestKind::General(_) => {
            let density = norm.bh_density(spec)?;
            (
                general_integral(norm, u, density, spec, |_, d, _| d * d)?,
                general_integral(norm, u, density, spec, |v, _, rho| v * v / (rho * rho))?,
                general_integral(norm, u, density, spec, move |v, _, rho| {
                    v * v * log_weight(rho)
                })?,
            )
        }
    };
    let g = gamma(n);
    let rhs = g * g * hardy.value + 0.25 * l * remainder.value;
    let rhs_error = g * g * hardy.error + 0.25 * l * remainder.error;
    let mut report = InequalityReport::new("double Hardy", big_r, grad.value, rhs, 1.0)
        .with_errors(&[grad.value, rhs], &[grad.error, rhs_error], &[1.0, 1.0]);
    report.integral_errors = vec![grad.error, hardy.error, remainder.error];
    Ok(report)
}
