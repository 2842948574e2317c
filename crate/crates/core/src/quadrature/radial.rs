use std::fmt;
use std::sync::Arc;

use super::gk::adaptive;
use super::{IntegralResult, QuadratureSpec};
use crate::error::{LabError, Result};
use crate::special::unit_sphere_area;

/// Behaviour of a radial profile as `rho -> inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `f = O(rho^{-sigma})`.
    Algebraic(f64),
    /// `f = O(exp(-a rho^2))`.
    Gaussian(f64),
    /// `f = 0` for `rho >= R`.
    Compact(f64),
}

/// Behaviour of a radial profile as `rho -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginClass {
    Bounded,
    /// `f = O(rho^{-tau})`.
    PowerSingular(f64),
}

impl OriginClass {
    fn exponent(self) -> f64 {
        match self {
            OriginClass::Bounded => 0.0,
            OriginClass::PowerSingular(tau) => tau,
        }
    }
}

/// Radial weight multiplying the profile under the integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    /// `rho^k`
    Power(f64),
    /// `exp(-a rho^2)`
    Gaussian(f64),
    /// `sinh(rho)^m`
    SinhPower(u32),
}

impl Weight {
    pub fn eval(self, rho: f64) -> f64 {
        match self {
            Weight::Power(k) => {
                if k == 0.0 {
                    1.0
                } else {
                    rho.powf(k)
                }
            }
            Weight::Gaussian(a) => (-a * rho * rho).exp(),
            Weight::SinhPower(0) => 1.0,
            Weight::SinhPower(m) => rho.sinh().powi(m as i32),
        }
    }

    fn ln_eval(self, rho: f64) -> f64 {
        match self {
            Weight::Power(k) => k * rho.ln(),
            Weight::Gaussian(a) => -a * rho * rho,
            Weight::SinhPower(0) => 0.0,
            Weight::SinhPower(m) => {
                // ln sinh(rho) = rho + ln(1 - e^{-2 rho}) - ln 2
                m as f64 * (rho + (-(-2.0 * rho).exp()).ln_1p() - std::f64::consts::LN_2)
            }
        }
    }

    /// Power of `rho` the weight behaves like at the origin.
    fn origin_exponent(self) -> f64 {
        match self {
            Weight::Power(k) => k,
            Weight::Gaussian(_) => 0.0,
            Weight::SinhPower(m) => m as f64,
        }
    }
}

/// A scalar function of the distance `rho` with declared asymptotics.
#[derive(Clone)]
pub struct RadialProfile {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    decay: Decay,
    origin: OriginClass,
    lower: f64,
    upper: f64,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("decay", &self.decay)
            .field("origin", &self.origin)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl RadialProfile {
    pub fn new<F>(f: F, decay: Decay, origin: OriginClass) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            decay,
            origin,
            lower: 0.0,
            upper: match decay {
                Decay::Compact(r) => r,
                _ => f64::INFINITY,
            },
            breakpoints: Vec::new(),
        }
    }

    /// `f(rho) = exp(-a rho^2)`.
    pub fn gaussian(a: f64) -> Self {
        Self::new(
            move |r| (-a * r * r).exp(),
            Decay::Gaussian(a),
            OriginClass::Bounded,
        )
    }

    /// `f = 1` on `[0, R)`, zero beyond.
    pub fn indicator(radius: f64) -> Self {
        Self::new(
            move |r| if r < radius { 1.0 } else { 0.0 },
            Decay::Compact(radius),
            OriginClass::Bounded,
        )
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, Decay::Compact(0.0), OriginClass::Bounded)
    }

    /// Points where the profile is not smooth; each one starts a new panel.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|p| p.is_finite() && *p > 0.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    /// Restricts integration to `[lo, hi]`; the profile itself is unchanged.
    pub fn restricted(mut self, lo: f64, hi: f64) -> Self {
        self.lower = lo.max(0.0);
        self.upper = hi.min(self.upper);
        self
    }

    /// Profile `rho -> f(s rho)`.
    pub fn scaled(&self, s: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        let decay = match self.decay {
            Decay::Algebraic(sigma) => Decay::Algebraic(sigma),
            Decay::Gaussian(a) => Decay::Gaussian(a * s * s),
            Decay::Compact(r) => Decay::Compact(r / s),
        };
        Self {
            eval: Arc::new(move |r| inner(s * r)),
            decay,
            origin: self.origin,
            lower: self.lower / s,
            upper: self.upper / s,
            breakpoints: self.breakpoints.iter().map(|b| b / s).collect(),
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        (self.eval)(rho)
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn origin(&self) -> OriginClass {
        self.origin
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    fn is_truncated(&self) -> bool {
        self.upper.is_finite() && !matches!(self.decay, Decay::Compact(_))
    }

    /// Spot-checks the declared decay and origin classes at three probe radii each.
    ///
    /// Measured log-slopes must be within a factor 2 of the declared ones; a
    /// profile that decays faster than declared passes.
    pub fn verify_classes(&self) -> Result<()> {
        let probe = |r: f64| -> Result<f64> {
            let v = self.eval(r);
            if v.is_finite() {
                Ok(v.abs())
            } else {
                Err(LabError::NonFinite(format!(
                    "profile returned {v} at probe radius {r:e}"
                )))
            }
        };
        let slope = |r1: f64, v1: f64, r2: f64, v2: f64| (v2.ln() - v1.ln()) / (r2.ln() - r1.ln());

        let last_bp = self
            .breakpoints
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(self.lower);
        match self.decay {
            _ if self.is_truncated() => {}
            Decay::Algebraic(sigma) => {
                let base = (16.0f64).max(4.0 * last_bp);
                let radii = [base, 8.0 * base, 64.0 * base];
                let vals = [probe(radii[0])?, probe(radii[1])?, probe(radii[2])?];
                for k in 0..2 {
                    if vals[k] > 0.0 && vals[k + 1] > 0.0 {
                        let s = -slope(radii[k], vals[k], radii[k + 1], vals[k + 1]);
                        if s < 0.5 * sigma {
                            return Err(LabError::DecayMismatch(format!(
                                "declared algebraic decay {sigma}, measured log-slope {s:.4} near rho = {:e}",
                                radii[k + 1]
                            )));
                        }
                    } else if vals[k] == 0.0 && vals[k + 1] > 0.0 {
                        return Err(LabError::DecayMismatch(format!(
                            "profile reappears at rho = {:e} after vanishing",
                            radii[k + 1]
                        )));
                    }
                }
            }
            Decay::Gaussian(a) => {
                if !(a > 0.0) {
                    return Err(LabError::DecayMismatch(format!(
                        "Gaussian rate must be positive, got {a}"
                    )));
                }
                let scale = (6.0 / a.sqrt()).max(2.0 * last_bp);
                let radii = [scale, 4.0 / 3.0 * scale, 5.0 / 3.0 * scale];
                let vals = [probe(radii[0])?, probe(radii[1])?, probe(radii[2])?];
                for k in 0..2 {
                    if vals[k] > 0.0 && vals[k + 1] > 0.0 {
                        let measured = (vals[k + 1].ln() - vals[k].ln())
                            / (radii[k + 1].powi(2) - radii[k].powi(2));
                        if measured > -0.5 * a {
                            return Err(LabError::DecayMismatch(format!(
                                "declared Gaussian rate {a}, measured {:.4} near rho = {:e}",
                                -measured,
                                radii[k + 1]
                            )));
                        }
                    }
                }
            }
            Decay::Compact(radius) => {
                for r in [
                    radius * (1.0 + 1e-9) + 1e-300,
                    1.5 * radius + 1e-12,
                    2.0 * radius + 1e-9,
                ] {
                    if probe(r)? != 0.0 {
                        return Err(LabError::DecayMismatch(format!(
                            "declared support radius {radius} but profile is nonzero at {r:e}"
                        )));
                    }
                }
            }
        }

        if self.lower == 0.0 {
            let first = self
                .breakpoints
                .first()
                .copied()
                .unwrap_or(1.0)
                .min(self.upper());
            let r0 = (1e-4f64).min(1e-2 * first);
            if r0 > 0.0 {
                let radii = [r0 * 1e-4, r0 * 1e-2, r0];
                let vals = [probe(radii[0])?, probe(radii[1])?, probe(radii[2])?];
                let tau = self.origin.exponent();
                for k in 0..2 {
                    if vals[k] > 0.0 && vals[k + 1] > 0.0 {
                        let blowup = -slope(radii[k], vals[k], radii[k + 1], vals[k + 1]);
                        let allowed = if tau > 0.0 { 2.0 * tau } else { 0.1 };
                        if blowup > allowed {
                            return Err(LabError::DecayMismatch(format!(
                                "declared origin exponent {tau}, measured blow-up rate {blowup:.4} near rho = {:e}",
                                radii[k]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Transform {
    Identity,
    /// `rho = s u^beta` on `u in [0, 1]`.
    OriginPower {
        s: f64,
        beta: f64,
    },
    /// `rho = T + t / (1 - t)` on `t in [0, 1)`.
    GaussTail {
        t0: f64,
    },
    /// `rho = T t^{-beta}` on `t in (0, 1]`.
    AlgebraicTail {
        t0: f64,
        beta: f64,
    },
}

impl Transform {
    fn map(self, t: f64) -> (f64, f64) {
        match self {
            Transform::Identity => (t, 1.0),
            Transform::OriginPower { s, beta } => (s * t.powf(beta), s * beta * t.powf(beta - 1.0)),
            Transform::GaussTail { t0 } => {
                let one_minus = 1.0 - t;
                (t0 + t / one_minus, 1.0 / (one_minus * one_minus))
            }
            Transform::AlgebraicTail { t0, beta } => {
                (t0 * t.powf(-beta), t0 * beta * t.powf(-beta - 1.0))
            }
        }
    }
}

/// Radius after which the profile's log-slope stops changing.
fn log_slope_stabilization(f: &RadialProfile, start: f64) -> f64 {
    let mut r = start.max(1.0);
    let mut prev: Option<f64> = None;
    for _ in 0..24 {
        let (a, b) = (f.eval(r).abs(), f.eval(2.0 * r).abs());
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return r;
        }
        let s = (b / a).log2();
        if let Some(p) = prev {
            if (s - p).abs() < 0.02 * s.abs().max(1.0) {
                return r;
            }
        }
        prev = Some(s);
        r *= 2.0;
    }
    r
}

fn weighted_value(f: &RadialProfile, w: Weight, rho: f64, jac: f64) -> f64 {
    if !rho.is_finite() {
        return 0.0;
    }
    let fv = f.eval(rho);
    if fv == 0.0 || jac == 0.0 {
        return 0.0;
    }
    let v = fv * w.eval(rho) * jac;
    if v.is_finite() {
        return v;
    }
    if !fv.is_finite() {
        return fv;
    }
    // magnitudes out of range individually but not necessarily jointly
    fv.signum() * (fv.abs().ln() + w.ln_eval(rho) + jac.ln()).exp()
}

/// `int_0^inf f(rho) w(rho) drho` by adaptive Gauss-Kronrod on a split domain.
///
/// The origin panel absorbs a declared power singularity through
/// `rho = s u^beta`; the tail is mapped onto a finite interval, by
/// `rho = T + t/(1-t)` for Gaussian decay and by `rho = T t^{-beta}` for
/// algebraic decay.
pub fn radial_integral(
    f: &RadialProfile,
    weight: Weight,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    f.verify_classes()?;

    let lower = f.lower;
    let upper = f.upper();
    if upper <= lower {
        return Ok(IntegralResult::exact(0.0));
    }

    let tau = f.origin.exponent();
    let origin_total = weight.origin_exponent() - tau;
    if lower == 0.0 && origin_total <= -1.0 {
        return Err(LabError::NonIntegrable(format!(
            "integrand behaves like rho^{origin_total} at the origin"
        )));
    }
    let tail = match (f.decay, weight) {
        _ if f.is_truncated() => None,
        (Decay::Compact(_), _) => None,
        (Decay::Gaussian(a), Weight::Gaussian(b)) => Some(Decay::Gaussian(a + b)),
        (Decay::Gaussian(a), _) => Some(Decay::Gaussian(a)),
        (Decay::Algebraic(_), Weight::Gaussian(b)) => Some(Decay::Gaussian(b)),
        (Decay::Algebraic(_), Weight::SinhPower(m)) if m > 0 => {
            return Err(LabError::NonIntegrable(
                "algebraic decay cannot beat exponential volume growth; Gaussian decay is required"
                    .into(),
            ))
        }
        (Decay::Algebraic(sigma), _) => {
            let k = weight.origin_exponent();
            let m = sigma - k;
            if m <= 1.0 {
                return Err(LabError::NonIntegrable(format!(
                    "integrand decays like rho^-{m} at infinity"
                )));
            }
            Some(Decay::Algebraic(m))
        }
    };

    // interior split points
    let mut cuts: Vec<f64> = f
        .breakpoints
        .iter()
        .copied()
        .filter(|&b| b > lower && b < upper)
        .collect();
    let head_end = if lower == 0.0 {
        let first = cuts.first().copied().unwrap_or(f64::INFINITY);
        1.0f64.min(first).min(upper)
    } else {
        lower
    };
    let tail_start = match tail {
        None => upper,
        Some(Decay::Gaussian(a)) => {
            let peak = match weight {
                Weight::SinhPower(m) => m as f64 / a,
                Weight::Power(k) if k > 0.0 => (k / (2.0 * a)).sqrt(),
                _ => 0.0,
            };
            (8.0 / a.sqrt())
                .max(peak)
                .max(head_end)
                .max(cuts.last().copied().unwrap_or(0.0))
        }
        Some(_) => log_slope_stabilization(f, head_end.max(cuts.last().copied().unwrap_or(0.0))),
    };
    cuts.retain(|&c| c > head_end && c < tail_start);

    let mut segments: Vec<((f64, f64), Transform)> = Vec::new();
    if lower == 0.0 {
        let beta = if tau > 0.0 && origin_total < 0.0 {
            (1.0 / (origin_total + 1.0)).min(20.0)
        } else {
            1.0
        };
        if beta > 1.0 {
            segments.push(((0.0, 1.0), Transform::OriginPower { s: head_end, beta }));
        } else {
            segments.push(((0.0, head_end), Transform::Identity));
        }
    }
    let mut left = head_end;
    for &c in &cuts {
        segments.push(((left, c), Transform::Identity));
        left = c;
    }
    if tail_start > left {
        segments.push(((left, tail_start), Transform::Identity));
    }
    match tail {
        None => {}
        Some(Decay::Gaussian(_)) => {
            segments.push(((0.0, 1.0), Transform::GaussTail { t0: tail_start }))
        }
        Some(Decay::Algebraic(m)) => {
            let beta = (1.0 / (m - 1.0)).clamp(1.0, 4.0);
            segments.push((
                (0.0, 1.0),
                Transform::AlgebraicTail {
                    t0: tail_start,
                    beta,
                },
            ));
        }
        Some(Decay::Compact(_)) => unreachable!(),
    }

    let ranges: Vec<(f64, f64)> = segments.iter().map(|s| s.0).collect();
    let transforms: Vec<Transform> = segments.iter().map(|s| s.1).collect();
    let integrand = |seg: usize, t: f64| {
        let (rho, jac) = transforms[seg].map(t);
        weighted_value(f, weight, rho, jac)
    };
    let outcome = adaptive(
        integrand,
        &ranges,
        spec.relative_tolerance,
        1e-300,
        spec.max_subdivisions * ranges.len(),
    )?;
    if !outcome.converged && outcome.error > outcome.value.abs() {
        return Err(LabError::NonIntegrable(format!(
            "divergent panel refinement (value {}, error {:e})",
            outcome.value, outcome.error
        )));
    }
    Ok(IntegralResult {
        value: outcome.value,
        error: outcome.error,
        nodes: outcome.nodes,
        converged: outcome.converged,
    })
}

/// `n omega_n int_0^inf f(rho) rho^{n-1} drho`: the integral of `x -> f(F(x - x0))`
/// over flat n-space against the Busemann-Hausdorff measure of any reversible norm.
pub fn flat_radial_volume_integral(
    f: &RadialProfile,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    if n == 0 {
        return Err(LabError::InvalidArgument(
            "dimension must be positive".into(),
        ));
    }
    Ok(radial_integral(f, Weight::Power((n - 1) as f64), spec)?.scaled(unit_sphere_area(n)))
}

/// `n omega_n int_0^inf f(rho) sinh(rho)^{n-1} drho`: the integral of a radial
/// function over the hyperbolic space of curvature -1.
pub fn hyperbolic_radial_volume_integral(
    f: &RadialProfile,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    if n == 0 {
        return Err(LabError::InvalidArgument(
            "dimension must be positive".into(),
        ));
    }
    Ok(radial_integral(f, Weight::SinhPower((n - 1) as u32), spec)?.scaled(unit_sphere_area(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// Composite trapezoid on `[0, b]`, used as an independent oracle.
    fn trapezoid(f: impl Fn(f64) -> f64, b: f64, nodes: usize) -> f64 {
        let h = b / nodes as f64;
        let inner: f64 = (1..nodes).map(|i| f(i as f64 * h)).sum();
        h * (0.5 * (f(0.0) + f(b)) + inner)
    }

    #[test]
    fn gaussian_against_odd_powers() {
        let g = RadialProfile::gaussian(1.0);
        let r3 = radial_integral(&g, Weight::Power(3.0), &spec()).unwrap();
        let r1 = radial_integral(&g, Weight::Power(1.0), &spec()).unwrap();
        assert!((r3.value - 0.5).abs() < 1e-12);
        assert!((r1.value - 0.5).abs() < 1e-12);
        assert!(r3.converged && r1.converged);
    }

    #[test]
    fn gaussian_against_sinh_matches_trapezoid_oracle() {
        let g = RadialProfile::gaussian(1.0);
        let r = radial_integral(&g, Weight::SinhPower(1), &spec()).unwrap();
        let oracle = trapezoid(|x| (-x * x).exp() * x.sinh(), 12.0, 1_000_000);
        assert!(
            (r.value - oracle).abs() < 1e-10,
            "{} vs {}",
            r.value,
            oracle
        );
        // closed form (sqrt(pi)/2) e^{1/4} erf(1/2)
        // (sqrt(pi)/2) e^{1/4} erf(1/2), evaluated at 30 digits
        let closed = 0.592_296_536_469_326_6;
        assert!(
            (r.value - closed).abs() < 1e-14,
            "{} vs {}",
            r.value,
            closed
        );
    }

    #[test]
    fn flat_volume_integrals() {
        let lam = 0.5;
        let g = RadialProfile::new(
            move |r| (-2.0 * lam * r * r).exp(),
            Decay::Gaussian(2.0 * lam),
            OriginClass::Bounded,
        );
        let v = flat_radial_volume_integral(&g, 2, &spec()).unwrap();
        assert!((v.value - PI).abs() < 1e-11);

        let ball = flat_radial_volume_integral(&RadialProfile::indicator(1.0), 3, &spec()).unwrap();
        assert!((ball.value - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn restricted_log_integral() {
        let n = 3;
        let (eps, r) = (1e-6, 1.0);
        let f = RadialProfile::new(
            move |x| x.powi(-(n as i32)),
            Decay::Algebraic(n as f64),
            OriginClass::PowerSingular(n as f64),
        )
        .restricted(eps, r);
        let v = flat_radial_volume_integral(&f, n, &spec()).unwrap();
        let expected = 4.0 * PI * (r.ln() - eps.ln());
        assert!((v.value - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn hyperbolic_indicator_volumes() {
        for radius in [0.3, 1.0, 2.5] {
            let v =
                hyperbolic_radial_volume_integral(&RadialProfile::indicator(radius), 2, &spec())
                    .unwrap();
            let expected = 2.0 * PI * (radius.cosh() - 1.0);
            assert!((v.value - expected).abs() < 1e-11 * expected);
        }
        let z = hyperbolic_radial_volume_integral(&RadialProfile::zero(), 3, &spec()).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn algebraic_tail_is_integrated_to_infinity() {
        // int_0^inf rho^2 / (1 + rho^2)^3 drho = pi / 16
        let f = RadialProfile::new(
            |r| (1.0 + r * r).powi(-3),
            Decay::Algebraic(6.0),
            OriginClass::Bounded,
        );
        let v = radial_integral(&f, Weight::Power(2.0), &spec()).unwrap();
        assert!((v.value - PI / 16.0).abs() < 1e-11, "{}", v.value);
        // slow tail: int_0^inf 1/(1+rho)^2 = 1
        let f = RadialProfile::new(
            |r| (1.0 + r).powi(-2),
            Decay::Algebraic(2.0),
            OriginClass::Bounded,
        );
        let v = radial_integral(&f, Weight::Power(0.0), &spec()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-11, "{}", v.value);
    }

    #[test]
    fn origin_singularity_is_absorbed() {
        // int_0^inf rho^{-1/2} e^{-rho^2} drho = Gamma(1/4) / 2
        let f = RadialProfile::new(
            |r| r.powf(-0.5) * (-r * r).exp(),
            Decay::Gaussian(1.0),
            OriginClass::PowerSingular(0.5),
        );
        let v = radial_integral(&f, Weight::Power(0.0), &spec()).unwrap();
        let expected = statrs::function::gamma::gamma(0.25) / 2.0;
        assert!((v.value - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn declared_integrability_violations() {
        let f = RadialProfile::new(
            |r| 1.0 / (1.0 + r),
            Decay::Algebraic(1.0),
            OriginClass::Bounded,
        );
        assert!(matches!(
            radial_integral(&f, Weight::Power(0.0), &spec()),
            Err(LabError::NonIntegrable(_))
        ));
        let g = RadialProfile::new(
            |r| if r < 1.0 { r.powi(-2) } else { 0.0 },
            Decay::Compact(1.0),
            OriginClass::PowerSingular(2.0),
        );
        assert!(matches!(
            radial_integral(&g, Weight::Power(0.0), &spec()),
            Err(LabError::NonIntegrable(_))
        ));
        let h = RadialProfile::new(
            |r| (1.0 + r).powi(-8),
            Decay::Algebraic(8.0),
            OriginClass::Bounded,
        );
        assert!(matches!(
            radial_integral(&h, Weight::SinhPower(2), &spec()),
            Err(LabError::NonIntegrable(_))
        ));
    }

    #[test]
    fn misdeclared_classes_are_detected() {
        let slow = RadialProfile::new(
            |r| 1.0 / (1.0 + r * r),
            Decay::Algebraic(6.0),
            OriginClass::Bounded,
        );
        assert!(matches!(
            slow.verify_classes(),
            Err(LabError::DecayMismatch(_))
        ));
        let not_gauss =
            RadialProfile::new(|r| (-r).exp(), Decay::Gaussian(1.0), OriginClass::Bounded);
        assert!(matches!(
            not_gauss.verify_classes(),
            Err(LabError::DecayMismatch(_))
        ));
        let singular = RadialProfile::new(|r| 1.0 / r, Decay::Gaussian(1.0), OriginClass::Bounded);
        assert!(singular.verify_classes().is_err());
        let leaky = RadialProfile::new(
            |r| (-r * r).exp(),
            Decay::Compact(1.0),
            OriginClass::Bounded,
        );
        assert!(matches!(
            leaky.verify_classes(),
            Err(LabError::DecayMismatch(_))
        ));
    }
}
