//! Radial calculus and inequality checks on the Poincare ball model of
//! hyperbolic space, curvature -1.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::{
    hyperbolic_radial_volume_integral, monte_carlo_integral, try_fd_derivative, BoxRegion, Decay,
    IntegralResult, OriginClass, QuadratureSpec, RadialProfile,
};
use crate::report::InequalityReport;
use crate::special::unit_ball_volume;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Below this argument `D` is evaluated from its Taylor series.
const SERIES_CUTOFF: f64 = 0.05;

/// Largest exponent `(n-1)^2 / (4 alpha)` tolerated by the alpha scan before
/// `C_n(alpha)` leaves floating-point range.
pub const KO_EXPONENT_LIMIT: f64 = 600.0;

fn check_curvature(c: f64) -> Result<()> {
    if c <= 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!(
            "curvature bound must be <= 0, got {c}"
        )))
    }
}

/// `ct_c` and `D_c` for a curvature bound `c <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFunctions {
    c: f64,
}

impl CurvatureFunctions {
    pub fn new(c: f64) -> Result<Self> {
        check_curvature(c)?;
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `1/rho` for `c = 0`, `sqrt|c| coth(sqrt|c| rho)` otherwise.
    pub fn ct(&self, rho: f64) -> f64 {
        if self.c == 0.0 {
            return 1.0 / rho;
        }
        let s = (-self.c).sqrt();
        s / (s * rho).tanh()
    }

    /// `rho ct_c(rho) - 1`, with `D(0) = 0`.
    pub fn d(&self, rho: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let x = (-self.c).sqrt() * rho;
        if x < SERIES_CUTOFF {
            let x2 = x * x;
            x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)))
        } else {
            x / x.tanh() - 1.0
        }
    }
}

/// `ct_c(rho)`; `rho > 0`.
pub fn ct(c: f64, rho: f64) -> Result<f64> {
    if rho <= 0.0 || rho.is_nan() {
        return Err(LabError::InvalidArgument(format!(
            "ct needs rho > 0, got {rho}"
        )));
    }
    Ok(CurvatureFunctions::new(c)?.ct(rho))
}

/// `D_c(rho)`; `rho >= 0`.
pub fn d_c(c: f64, rho: f64) -> Result<f64> {
    if rho < 0.0 || rho.is_nan() {
        return Err(LabError::InvalidArgument(format!(
            "D needs rho >= 0, got {rho}"
        )));
    }
    Ok(CurvatureFunctions::new(c)?.d(rho))
}

fn d_minus_one(rho: f64) -> f64 {
    CurvatureFunctions { c: -1.0 }.d(rho)
}

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coordinates: Vec<f64>,
}

impl BallPoint {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(LabError::InvalidArgument("empty coordinate vector".into()));
        }
        if coordinates.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite("ball point coordinates".into()));
        }
        let r = euclidean(&coordinates);
        if r >= 1.0 {
            return Err(LabError::InvalidArgument(format!(
                "|x| = {r} is not inside the unit ball"
            )));
        }
        Ok(Self { coordinates })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coordinates: vec![0.0; n],
        }
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn euclidean_norm(&self) -> f64 {
        euclidean(&self.coordinates)
    }

    /// `p(x) = 2 / (1 - |x|^2)`.
    pub fn conformal_factor(&self) -> f64 {
        conformal_factor(&self.coordinates)
    }
}

fn euclidean(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn conformal_factor(x: &[f64]) -> f64 {
    2.0 / (1.0 - x.iter().map(|v| v * v).sum::<f64>())
}

/// `d(0, x) = ln((1 + |x|) / (1 - |x|))`.
pub fn hyp_distance(x: &BallPoint) -> f64 {
    2.0 * x.euclidean_norm().atanh()
}

/// Euclidean radius of the hyperbolic ball of radius `rho` about the origin.
pub fn euclidean_radius(rho: f64) -> f64 {
    (0.5 * rho).tanh()
}

/// A function `u(d(0, x))` with derivatives.
#[derive(Clone)]
pub struct RadialHypFunction {
    u: ScalarFn,
    du: ScalarFn,
    d2u: Option<ScalarFn>,
    decay: Decay,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialHypFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialHypFunction")
            .field("decay", &self.decay)
            .field("d2u", &self.d2u.is_some())
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl RadialHypFunction {
    /// `decay` must be `Gaussian(a)` for `|u| <= C e^{-a rho^2}` or `Compact(R)`.
    pub fn new<U, D>(u: U, du: D, decay: Decay) -> Result<Self>
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Decay::Algebraic(_) = decay {
            return Err(LabError::NonIntegrable(
                "algebraic decay cannot beat exponential volume growth; Gaussian decay is required"
                    .into(),
            ));
        }
        Ok(Self {
            u: Arc::new(u),
            du: Arc::new(du),
            d2u: None,
            decay,
            breakpoints: Vec::new(),
        })
    }

    pub fn with_second_derivative<D2>(mut self, d2u: D2) -> Self
    where
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.d2u = Some(Arc::new(d2u));
        self
    }

    pub fn with_breakpoints(mut self, points: Vec<f64>) -> Self {
        self.breakpoints = points;
        self
    }

    /// `e^{-alpha d^2}`.
    pub fn gaussian(alpha: f64) -> Result<Self> {
        Self::gaussian_with_linear(alpha, 0.0)
    }

    /// `e^{-alpha d^2 - beta d}`.
    pub fn gaussian_with_linear(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta >= 0.0 && beta.is_finite()) {
            return Err(LabError::InvalidArgument(format!(
                "need alpha > 0 and beta >= 0, got ({alpha}, {beta})"
            )));
        }
        let e = move |r: f64| (-alpha * r * r - beta * r).exp();
        Ok(Self::new(
            e,
            move |r| -(2.0 * alpha * r + beta) * e(r),
            Decay::Gaussian(alpha),
        )?
        .with_second_derivative(move |r| {
            let s = 2.0 * alpha * r + beta;
            (s * s - 2.0 * alpha) * e(r)
        }))
    }

    /// `d e^{-alpha d^2}`.
    pub fn linear_gaussian(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LabError::InvalidArgument(format!(
                "need alpha > 0, got {alpha}"
            )));
        }
        let e = move |r: f64| (-alpha * r * r).exp();
        Ok(Self::new(
            move |r| r * e(r),
            move |r| (1.0 - 2.0 * alpha * r * r) * e(r),
            Decay::Gaussian(alpha),
        )?
        .with_second_derivative(move |r| {
            (4.0 * alpha * alpha * r * r * r - 6.0 * alpha * r) * e(r)
        }))
    }

    pub fn u(&self, rho: f64) -> f64 {
        (self.u)(rho)
    }

    pub fn du(&self, rho: f64) -> f64 {
        (self.du)(rho)
    }

    /// Supplied `u''`, or a finite difference of `u'`.
    pub fn d2u(&self, rho: f64) -> Result<f64> {
        match &self.d2u {
            Some(f) => Ok(f(rho)),
            None => try_fd_derivative(|r| Ok((self.du)(r)), rho),
        }
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    /// Profile of a quadratic expression `g(u, u', rho)`.
    fn quadratic(
        &self,
        g: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        origin: OriginClass,
    ) -> RadialProfile {
        let decay = match self.decay {
            Decay::Gaussian(a) => Decay::Gaussian(2.0 * a),
            other => other,
        };
        let (u, du) = (Arc::clone(&self.u), Arc::clone(&self.du));
        RadialProfile::new(move |r| g(u(r), du(r), r), decay, origin)
            .with_breakpoints(self.breakpoints.clone())
    }

    fn ensure_nonzero(&self) -> Result<()> {
        if (0..400).any(|k| self.u(1e-3 * 1.03f64.powi(k)) != 0.0) {
            Ok(())
        } else {
            Err(LabError::Precondition(
                "test function vanishes identically".into(),
            ))
        }
    }
}

/// `u'' + (n - 1) coth(rho) u'`.
pub fn radial_laplacian(u: &RadialHypFunction, n: usize, rho: f64) -> Result<f64> {
    if rho <= 0.0 || rho.is_nan() {
        return Err(LabError::InvalidArgument(format!(
            "radial Laplacian needs rho > 0, got {rho}"
        )));
    }
    Ok(u.d2u(rho)? + (n as f64 - 1.0) / rho.tanh() * u.du(rho))
}

/// `Delta d` against `(n - 1) ct_c(d)` at every grid point; one report per `(c, rho)`.
pub fn laplace_comparison_check(
    n: usize,
    curvatures: &[f64],
    grid: &[f64],
) -> Result<Vec<InequalityReport>> {
    if n < 2 {
        return Err(LabError::InvalidArgument(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    let distance = RadialHypFunction::new(|r| r, |_| 1.0, Decay::Compact(f64::MAX))?
        .with_second_derivative(|_| 0.0);
    let mut out = Vec::with_capacity(curvatures.len() * grid.len());
    for &c in curvatures {
        let k = CurvatureFunctions::new(c)?;
        for &rho in grid {
            let lhs = radial_laplacian(&distance, n, rho)?;
            let rhs = (n as f64 - 1.0) * k.ct(rho);
            out.push(InequalityReport::new(
                format!("Laplacian comparison, c = {c}"),
                rho,
                lhs,
                rhs,
                1.0,
            ));
        }
    }
    Ok(out)
}

/// `Vol(B(rho)) = n omega_n int_0^rho sinh^{n-1}`.
pub fn hyp_ball_volume(n: usize, rho: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "radius must be finite and >= 0, got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(IntegralResult::exact(0.0));
    }
    hyperbolic_radial_volume_integral(&RadialProfile::indicator(rho), n, spec)?
        .ensure_converged(spec.relative_tolerance)
}

/// Monte Carlo of `int_{|x| < tanh(rho/2)} p(x)^n dx` over the Euclidean ball.
pub fn hyp_ball_volume_mc(n: usize, rho: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "radius must be finite and positive, got {rho}"
        )));
    }
    let r = euclidean_radius(rho);
    let region = BoxRegion::centered_cube(n, r)?;
    let result = monte_carlo_integral(
        |x: &[f64]| {
            if euclidean(x) < r {
                conformal_factor(x).powi(n as i32)
            } else {
                0.0
            }
        },
        &region,
        spec,
    )?;
    if result.relative_error() > spec.mc_relative_tolerance {
        return Err(LabError::MonteCarloTolerance {
            relative_error: result.relative_error(),
            tolerance: spec.mc_relative_tolerance,
        });
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeRatioPoint {
    pub rho: f64,
    pub volume: IntegralResult,
    /// `Vol(B(rho)) / rho^n`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeRatioCheck {
    pub n: usize,
    pub omega_n: f64,
    pub points: Vec<VolumeRatioPoint>,
    /// `ratio[i+1] >= ratio[i] - 1e-10` for every consecutive pair.
    pub non_decreasing: bool,
    /// `ratio >= omega_n` at every point.
    pub above_euclidean: bool,
}

/// Monotonicity of `Vol(B(rho)) / rho^n` along an increasing grid.
pub fn hyp_volume_ratio_check(
    n: usize,
    grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<VolumeRatioCheck> {
    if grid.iter().any(|&r| !(r > 0.0 && r.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::InvalidArgument(
            "radius grid must be positive and increasing".into(),
        ));
    }
    let points = grid
        .par_iter()
        .map(|&rho| {
            let volume = hyp_ball_volume(n, rho, spec)?;
            Ok(VolumeRatioPoint {
                rho,
                volume,
                ratio: volume.value / rho.powi(n as i32),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let omega_n = unit_ball_volume(n);
    let non_decreasing = points.windows(2).all(|w| w[1].ratio >= w[0].ratio - 1e-10);
    let above_euclidean = points
        .iter()
        .all(|p| p.ratio >= omega_n * (1.0 - 10.0 * spec.relative_tolerance));
    Ok(VolumeRatioCheck {
        n,
        omega_n,
        points,
        non_decreasing,
        above_euclidean,
    })
}

fn integrate(profile: &RadialProfile, n: usize, spec: &QuadratureSpec) -> Result<IntegralResult> {
    hyperbolic_radial_volume_integral(profile, n, spec)?.ensure_converged(spec.relative_tolerance)
}

/// `int |grad u|^2`, `int d^2 u^2`, `int u^2` over `H^n`.
fn hpw_integrals(
    u: &RadialHypFunction,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<[IntegralResult; 3]> {
    u.ensure_nonzero()?;
    Ok([
        integrate(
            &u.quadratic(|_, du, _| du * du, OriginClass::Bounded),
            n,
            spec,
        )?,
        integrate(
            &u.quadratic(|u, _, r| r * r * u * u, OriginClass::Bounded),
            n,
            spec,
        )?,
        integrate(&u.quadratic(|u, _, _| u * u, OriginClass::Bounded), n, spec)?,
    ])
}

fn check_dimension(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(LabError::InvalidArgument(format!(
            "dimension must be at least {min}, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// `(int |grad u|^2)(int d^2 u^2) / (int u^2)^2` on `H^n` against `n^2 / 4`.
pub fn hpw_hyperbolic_report(
    u: &RadialHypFunction,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    check_dimension(n, 2)?;
    let [grad, moment, mass] = hpw_integrals(u, n, spec)?;
    let nf = n as f64;
    Ok(InequalityReport::new(
        "hyperbolic HPW",
        f64::NAN,
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

/// HPW with the curvature-weighted mass `int (1 + ((n-1)/n) D_{-1}(d)) u^2`.
pub fn modified_hpw_report_for(
    u: &RadialHypFunction,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    check_dimension(n, 2)?;
    u.ensure_nonzero()?;
    let nf = n as f64;
    let k = (nf - 1.0) / nf;
    let grad = integrate(
        &u.quadratic(|_, du, _| du * du, OriginClass::Bounded),
        n,
        spec,
    )?;
    let moment = integrate(
        &u.quadratic(|u, _, r| r * r * u * u, OriginClass::Bounded),
        n,
        spec,
    )?;
    let mass = integrate(
        &u.quadratic(
            move |u, _, r| (1.0 + k * d_minus_one(r)) * u * u,
            OriginClass::Bounded,
        ),
        n,
        spec,
    )?;
    Ok(InequalityReport::new(
        "modified hyperbolic HPW",
        f64::NAN,
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

/// Modified HPW for the hyperbolic Gaussian `e^{-alpha d^2}`.
pub fn modified_hpw_report(
    alpha: f64,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    let mut r = modified_hpw_report_for(&RadialHypFunction::gaussian(alpha)?, n, spec)?;
    r.param = alpha;
    Ok(r)
}

/// Curvature-improved Hardy inequalities on `H^n`, `n >= 3`:
/// the `D_{-1}` weighted form and the `pi^2 + d^2` form, each as `lhs / rhs >= 1`.
pub fn hardy_hyperbolic_report(
    u: &RadialHypFunction,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<[InequalityReport; 2]> {
    check_dimension(n, 3)?;
    u.ensure_nonzero()?;
    let nf = n as f64;
    let c0 = (nf - 2.0) * (nf - 2.0) / 4.0;
    let k = 2.0 * (nf - 1.0) / (nf - 2.0);
    let singular = OriginClass::PowerSingular(2.0);
    let grad = integrate(
        &u.quadratic(|_, du, _| du * du, OriginClass::Bounded),
        n,
        spec,
    )?;
    let weighted = integrate(
        &u.quadratic(
            move |u, _, r| (1.0 + k * d_minus_one(r)) * u * u / (r * r),
            singular,
        ),
        n,
        spec,
    )?;
    let plain = integrate(&u.quadratic(|u, _, r| u * u / (r * r), singular), n, spec)?;
    let shifted = integrate(
        &u.quadratic(|u, _, r| u * u / (PI * PI + r * r), OriginClass::Bounded),
        n,
        spec,
    )?;

    let rhs1 = c0 * weighted.value;
    let first = InequalityReport::new(
        "hyperbolic quantitative Hardy",
        f64::NAN,
        grad.value,
        rhs1,
        1.0,
    )
    .with_errors(
        &[grad.value, weighted.value],
        &[grad.error, weighted.error],
        &[1.0, 1.0],
    );
    let c1 = 1.5 * (nf - 1.0) * (nf - 2.0);
    let rhs2 = c0 * plain.value + c1 * shifted.value;
    let rhs2_error = c0 * plain.error + c1 * shifted.error;
    let second =
        InequalityReport::new("hyperbolic improved Hardy", f64::NAN, grad.value, rhs2, 1.0)
            .with_errors(&[grad.value, rhs2], &[grad.error, rhs2_error], &[1.0, 1.0]);
    Ok([first, second])
}

/// `C_k(alpha) = k omega_k int_0^inf e^{-alpha rho^2} sinh^{k-1}(rho) drho`.
pub fn gaussian_mass(k: usize, alpha: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let m = k.saturating_sub(1) as f64;
    if m * m / (4.0 * alpha) > KO_EXPONENT_LIMIT {
        return Err(LabError::NonIntegrable(format!(
            "alpha = {alpha} too small: peak of e^(-alpha rho^2) sinh^{m}(rho) exceeds floating-point range"
        )));
    }
    integrate(&RadialProfile::gaussian(alpha), k, spec)
}

/// `Phi(alpha) = ((n-1)/(n-2)) (n - 1 + 2 pi C_{n-2}(alpha) / C_n(alpha)) - alpha`.
pub fn ko_phi(n: usize, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_dimension(n, 3)?;
    let nf = n as f64;
    let low = gaussian_mass(n - 2, alpha, spec)?;
    let high = gaussian_mass(n, alpha, spec)?;
    Ok((nf - 1.0) / (nf - 2.0) * (nf - 1.0 + 2.0 * PI * low.value / high.value) - alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoNode {
    pub alpha: f64,
    /// `None` where `C_n(alpha)` is out of floating-point range.
    pub phi: Option<f64>,
}

/// A sign change of `Phi` refined by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoBracket {
    pub lo: f64,
    pub hi: f64,
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoScan {
    pub n: usize,
    pub nodes: Vec<KoNode>,
    pub brackets: Vec<KoBracket>,
    /// Nodes skipped as out of range.
    pub flagged: usize,
}

/// Scans `Phi` on `grid_size` equispaced nodes of `(lo, hi]` and bisects every sign change.
pub fn ko_alpha_scan(
    n: usize,
    lo: f64,
    hi: f64,
    grid_size: usize,
    spec: &QuadratureSpec,
) -> Result<KoScan> {
    check_dimension(n, 3)?;
    if !(lo >= 0.0) || !hi.is_finite() {
        return Err(LabError::InvalidArgument(format!(
            "alpha range must be positive, got ({lo}, {hi}]"
        )));
    }
    if hi <= lo || grid_size == 0 {
        return Ok(KoScan {
            n,
            nodes: Vec::new(),
            brackets: Vec::new(),
            flagged: 0,
        });
    }
    let step = (hi - lo) / grid_size as f64;
    let nodes = (1..=grid_size)
        .into_par_iter()
        .map(|i| {
            let alpha = if i == grid_size {
                hi
            } else {
                lo + step * i as f64
            };
            match ko_phi(n, alpha, spec) {
                Ok(phi) => Ok(KoNode {
                    alpha,
                    phi: Some(phi),
                }),
                Err(LabError::NonIntegrable(_)) => Ok(KoNode { alpha, phi: None }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged = nodes.iter().filter(|k| k.phi.is_none()).count();
    let mut brackets = Vec::new();
    for w in nodes.windows(2) {
        let (Some(fa), Some(fb)) = (w[0].phi, w[1].phi) else {
            continue;
        };
        if fa == 0.0 || fa.signum() != fb.signum() {
            let (mut a, mut b, mut fa) = (w[0].alpha, w[1].alpha, fa);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = ko_phi(n, m, spec)?;
                if fm.signum() == fa.signum() && fm != 0.0 {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            brackets.push(KoBracket {
                lo: w[0].alpha,
                hi: w[1].alpha,
                root: 0.5 * (a + b),
            });
        }
    }
    Ok(KoScan {
        n,
        nodes,
        brackets,
        flagged,
    })
}

/// Bounds for the sharp hyperbolic HPW constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpwBounds {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub argmin_alpha: f64,
    pub argmin_beta: f64,
    /// `(alpha, beta, ratio)` for every trial function.
    pub trials: Vec<(f64, f64, f64)>,
}

/// Lower bound `n^2/4`; upper bound the least HPW ratio over `e^{-alpha d^2 - beta d}`.
pub fn hpw_constant_bounds(
    n: usize,
    alphas: &[f64],
    betas: &[f64],
    spec: &QuadratureSpec,
) -> Result<HpwBounds> {
    check_dimension(n, 2)?;
    if alphas.is_empty() || betas.is_empty() {
        return Err(LabError::InvalidArgument("empty trial family".into()));
    }
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let trials = grid
        .par_iter()
        .map(|&(a, b)| {
            let u = RadialHypFunction::gaussian_with_linear(a, b)?;
            Ok((a, b, hpw_hyperbolic_report(&u, n, spec)?.ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = trials
        .iter()
        .copied()
        .fold((f64::NAN, f64::NAN, f64::INFINITY), |acc, t| {
            if t.2 < acc.2 {
                t
            } else {
                acc
            }
        });
    let nf = n as f64;
    Ok(HpwBounds {
        n,
        lower: nf * nf / 4.0,
        upper: best.2,
        argmin_alpha: best.0,
        argmin_beta: best.1,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF_0499: f64 = 0.000_829_865_584_892_467_2;
    const REF_05: f64 = 0.000_833_194_477_504_962_5;

    #[test]
    fn d_branches_near_cutoff() {
        // 40-digit reference values
        let below = d_minus_one(0.0499);
        assert!((below - REF_0499).abs() < 1e-14 * REF_0499, "{below}");
        let above = d_minus_one(0.05);
        assert!((above - REF_05).abs() < 1e-12 * REF_05, "{above}");
    }

    #[test]
    fn curvature_examples() {
        assert_eq!(ct(0.0, 2.0).unwrap(), 0.5);
        assert_eq!(d_c(0.0, 3.0).unwrap(), 0.0);
        assert!((d_c(-1.0, 1.0).unwrap() - 0.313_035_285_499_331_3).abs() < 1e-15);
        assert!((d_c(-4.0, 1.0).unwrap() - 1.074_629_441_455_096).abs() < 1e-14);
        assert_eq!(d_c(-1.0, 0.0).unwrap(), 0.0);
        assert!(ct(0.0, 0.0).is_err());
        assert!(d_c(1.0, 1.0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_distance(&BallPoint::origin(3)), 0.0);
        let x = BallPoint::new(vec![0.3, 0.4, 0.0]).unwrap();
        assert!((hyp_distance(&x) - 3f64.ln()).abs() < 1e-15);
        assert!(BallPoint::new(vec![0.6, 0.8]).is_err());
        assert!((euclidean_radius(hyp_distance(&x)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_inputs() {
        assert!(laplace_comparison_check(3, &[-1.0, 0.0], &[])
            .unwrap()
            .is_empty());
        let spec = QuadratureSpec::default();
        assert!(ko_alpha_scan(4, 5.0, 5.0, 10, &spec)
            .unwrap()
            .nodes
            .is_empty());
    }
}
