use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::norm::{Covector, MinkowskiNorm};
use crate::quadrature::{
    monte_carlo_integral, BoxRegion, Decay, IntegralResult, OriginClass, QuadratureSpec,
    RadialProfile,
};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A function of the distance `rho = F(x - x0)` together with its derivative.
#[derive(Clone)]
pub struct RadialTest {
    u: ScalarFn,
    du: ScalarFn,
    decay: Decay,
    origin_u: f64,
    origin_du: f64,
    lower: f64,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialTest")
            .field("decay", &self.decay)
            .field("origin_u", &self.origin_u)
            .field("origin_du", &self.origin_du)
            .field("lower", &self.lower)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl RadialTest {
    pub fn u(&self, rho: f64) -> f64 {
        (self.u)(rho)
    }

    pub fn du(&self, rho: f64) -> f64 {
        (self.du)(rho)
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// Origin blow-up exponents of `u` and `u'`.
    pub fn origin_exponents(&self) -> (f64, f64) {
        (self.origin_u, self.origin_du)
    }

    /// Profile `rho -> g(u, u', rho)` for an integrand behaving like
    /// `|u|^a |u'|^b rho^c`; decay and origin classes are derived from those of `u`.
    pub fn profile<G>(&self, g: G, a: f64, b: f64, c: f64) -> RadialProfile
    where
        G: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        let decay = match self.decay {
            Decay::Gaussian(rate) => Decay::Gaussian((a + b) * rate),
            Decay::Algebraic(sigma) => Decay::Algebraic(a * sigma + b * (sigma + 1.0) - c),
            Decay::Compact(r) => Decay::Compact(r),
        };
        let tau = a * self.origin_u + b * self.origin_du - c;
        let origin = if tau > 0.0 {
            OriginClass::PowerSingular(tau)
        } else {
            OriginClass::Bounded
        };
        let (u, du) = (Arc::clone(&self.u), Arc::clone(&self.du));
        let p = RadialProfile::new(move |r| g(u(r), du(r), r), decay, origin)
            .with_breakpoints(self.breakpoints.clone());
        if self.lower > 0.0 {
            p.restricted(self.lower, f64::INFINITY)
        } else {
            p
        }
    }
}

/// A non-radial function with gradient, supported in a box.
#[derive(Clone)]
pub struct GeneralTest {
    value: FieldFn,
    gradient: Option<GradFn>,
    support: BoxRegion,
}

impl fmt::Debug for GeneralTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralTest")
            .field("support", &self.support)
            .field("gradient", &self.gradient.is_some())
            .finish_non_exhaustive()
    }
}

impl GeneralTest {
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn support(&self) -> &BoxRegion {
        &self.support
    }

    /// Supplied gradient, or central differences with step `1e-5 x` support diameter.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        if let Some(g) = &self.gradient {
            return g(x);
        }
        let h = 1e-5 * self.support.diameter();
        let mut y = x.to_vec();
        (0..x.len())
            .map(|i| {
                y[i] = x[i] + h;
                let fp = (self.value)(&y);
                y[i] = x[i] - h;
                let fm = (self.value)(&y);
                y[i] = x[i];
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum TestKind {
    Radial(RadialTest),
    General(GeneralTest),
}

/// A test function `u` with its basepoint `x0`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    kind: TestKind,
    basepoint: Vec<f64>,
}

impl TestFunction {
    /// Radial function `u(rho)` with derivative `du`, bounded at the origin.
    pub fn radial<U, D>(u: U, du: D, decay: Decay) -> Self
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: TestKind::Radial(RadialTest {
                u: Arc::new(u),
                du: Arc::new(du),
                decay,
                origin_u: 0.0,
                origin_du: 0.0,
                lower: 0.0,
                breakpoints: Vec::new(),
            }),
            basepoint: Vec::new(),
        }
    }

    /// `exp(-lambda rho^2)`.
    pub fn gaussian(lambda: f64) -> Self {
        Self::radial(
            move |r| (-lambda * r * r).exp(),
            move |r| -2.0 * lambda * r * (-lambda * r * r).exp(),
            Decay::Gaussian(lambda),
        )
    }

    /// General function with optional gradient, supported in `support`.
    pub fn general<V>(value: V, gradient: Option<GradFn>, support: BoxRegion) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let n = support.dimension();
        Self {
            kind: TestKind::General(GeneralTest {
                value: Arc::new(value),
                gradient,
                support,
            }),
            basepoint: vec![0.0; n],
        }
    }

    /// Declares `u = O(rho^{-tau_u})` and `u' = O(rho^{-tau_du})` at the origin.
    pub fn with_origin(mut self, tau_u: f64, tau_du: f64) -> Self {
        if let TestKind::Radial(r) = &mut self.kind {
            r.origin_u = tau_u;
            r.origin_du = tau_du;
        }
        self
    }

    /// Non-smooth points of a radial function.
    pub fn with_breakpoints(mut self, points: Vec<f64>) -> Self {
        if let TestKind::Radial(r) = &mut self.kind {
            r.breakpoints = points;
        }
        self
    }

    /// Integrate radial quantities on `rho >= lower` only.
    pub fn restricted_below(mut self, lower: f64) -> Self {
        if let TestKind::Radial(r) = &mut self.kind {
            r.lower = lower;
        }
        self
    }

    /// Moves the basepoint; general functions are translated with it.
    pub fn at(self, basepoint: Vec<f64>) -> Self {
        match self.kind {
            TestKind::Radial(r) => Self {
                kind: TestKind::Radial(r),
                basepoint,
            },
            TestKind::General(g) => {
                let shift: Vec<f64> = basepoint
                    .iter()
                    .zip(&self.basepoint)
                    .map(|(a, b)| a - b)
                    .collect();
                let value = Arc::clone(&g.value);
                let s1 = shift.clone();
                let new_value: FieldFn = Arc::new(move |x: &[f64]| value(&unshift(x, &s1)));
                let new_grad = g.gradient.clone().map(|gr| {
                    let s2 = shift.clone();
                    Arc::new(move |x: &[f64]| gr(&unshift(x, &s2))) as GradFn
                });
                Self {
                    kind: TestKind::General(GeneralTest {
                        value: new_value,
                        gradient: new_grad,
                        support: g.support.translated(&shift),
                    }),
                    basepoint,
                }
            }
        }
    }

    pub fn kind(&self) -> &TestKind {
        &self.kind
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn as_radial(&self) -> Option<&RadialTest> {
        match &self.kind {
            TestKind::Radial(r) => Some(r),
            TestKind::General(_) => None,
        }
    }

    /// Rejects functions that vanish identically on a probe set.
    pub(crate) fn ensure_nonzero(&self) -> Result<()> {
        let nonzero = match &self.kind {
            TestKind::Radial(r) => {
                let start = r.lower.max(1e-3);
                (0..400).any(|k| r.u(start * 1.05f64.powi(k)) != 0.0)
            }
            TestKind::General(g) => {
                let n = g.support.dimension();
                let rng = crate::quadrature::CounterRng::new(7);
                let (lo, hi) = (&g.support.lower, &g.support.upper);
                (0..4096u64).any(|k| {
                    let x: Vec<f64> = (0..n)
                        .map(|i| lo[i] + (hi[i] - lo[i]) * rng.uniform(k * n as u64 + i as u64))
                        .collect();
                    g.value(&x) != 0.0
                })
            }
        };
        if nonzero {
            Ok(())
        } else {
            Err(LabError::Precondition(
                "test function vanishes identically".into(),
            ))
        }
    }
}

fn unshift(x: &[f64], s: &[f64]) -> Vec<f64> {
    x.iter().zip(s).map(|(a, b)| a - b).collect()
}

/// Monte Carlo integral of `phi(u(x), F*(Du(x)), F(x - x0))` against the
/// Busemann-Hausdorff measure of `norm`, over the support box of `u`.
pub(crate) fn general_integral<G>(
    norm: &MinkowskiNorm,
    u: &TestFunction,
    density: f64,
    spec: &QuadratureSpec,
    phi: G,
) -> Result<IntegralResult>
where
    G: Fn(f64, f64, f64) -> f64 + Sync,
{
    let TestKind::General(g) = &u.kind else {
        return Err(LabError::InvalidArgument(
            "expected a general test function".into(),
        ));
    };
    if g.support.dimension() != norm.dimension() || u.basepoint.len() != norm.dimension() {
        return Err(LabError::DimensionMismatch {
            expected: norm.dimension(),
            got: g.support.dimension(),
        });
    }
    let x0 = &u.basepoint;
    let integrand = |x: &[f64]| {
        let v = g.value(x);
        let grad = g.gradient(x);
        let dual = Covector::new(grad)
            .and_then(|c| norm.dual_norm_value(&c))
            .unwrap_or(f64::NAN);
        let rel: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
        let rho = norm.norm_value(&rel).unwrap_or(f64::NAN);
        phi(v, dual, rho)
    };
    Ok(monte_carlo_integral(integrand, &g.support, spec)?.scaled(density))
}
