//! Minkowski norms on flat `R^n`: values, dual norms, the Legendre map,
//! the uniformity constant of the dual norm and the Busemann-Hausdorff density.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LabError, Result};
use crate::quadrature::{monte_carlo_integral, BoxRegion, CounterRng, QuadratureSpec};
use crate::special::{lp_ball_volume, unit_ball_volume};

/// Scalar function of a vector, used for custom norm handles.
pub type VectorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Gradient handle of a custom norm.
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Restarts of the dual-norm maximizer for custom norms.
pub const DUAL_RESTARTS: usize = 32;
/// Relative Hessian step used by [`MinkowskiNorm::uniformity_constant`].
pub const HESSIAN_RELATIVE_STEP: f64 = 1e-4;

const ASCENT_MAX_ITERATIONS: usize = 20_000;
const ASCENT_TOLERANCE: f64 = 1e-9;
const POLISH_TOLERANCE: f64 = 1e-15;
const POLISH_ACCEPT: f64 = 1e-11;
const POLISH_MAX_ITERATIONS: usize = 60;
const AXIOM_SAMPLES: u64 = 256;

/// A linear functional acting on vectors by the dot pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covector(Vec<f64>);

impl Covector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|c| !c.is_finite()) {
            return Err(LabError::NonFinite(format!("covector component {bad}")));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// `alpha(y) = sum alpha_i y_i`.
    pub fn pair(&self, y: &[f64]) -> f64 {
        dot(&self.0, y)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl From<Covector> for Vec<f64> {
    fn from(c: Covector) -> Self {
        c.0
    }
}

/// Output of the Legendre map: `y = J*(alpha)` with the duality identities
/// `F(y) = F*(alpha)` and `alpha(y) = F(y) F*(alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityCertificate {
    /// `F(y)`
    pub primal_value: f64,
    /// `F*(alpha)`
    pub dual_value: f64,
    pub maximizer: Vec<f64>,
    /// `alpha(y)`
    pub pairing: f64,
}

impl DualityCertificate {
    /// Largest relative defect of the two duality identities.
    pub fn defect(&self) -> f64 {
        let scale = self.dual_value.abs().max(f64::MIN_POSITIVE);
        let value_gap = (self.primal_value - self.dual_value).abs() / scale;
        let product = self.primal_value * self.dual_value;
        let pairing_gap = (self.pairing - product).abs() / product.abs().max(f64::MIN_POSITIVE);
        value_gap.max(pairing_gap)
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.defect() <= tolerance
    }
}

/// The three supported norm families.
#[derive(Clone)]
pub enum NormFamily {
    /// `F(y) = sqrt(y^T A y)`.
    WeightedEuclidean { matrix: DMatrix<f64> },
    /// `F(y) = (sum |y_i|^p)^{1/p}`.
    Lp { p: f64 },
    /// User-supplied value and gradient handles.
    Custom {
        value: VectorFn,
        gradient: GradientFn,
    },
}

impl fmt::Debug for NormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormFamily::WeightedEuclidean { matrix } => f
                .debug_struct("WeightedEuclidean")
                .field("matrix", matrix)
                .finish(),
            NormFamily::Lp { p } => f.debug_struct("Lp").field("p", p).finish(),
            NormFamily::Custom { .. } => f.debug_struct("Custom").finish_non_exhaustive(),
        }
    }
}

/// A reversible norm on `R^n`, immutable after construction.
#[derive(Clone, Debug)]
pub struct MinkowskiNorm {
    dimension: usize,
    family: NormFamily,
    // A^{-1} and sqrt(det A) for the weighted-euclidean family
    inverse: Option<DMatrix<f64>>,
    sqrt_det: f64,
}

impl MinkowskiNorm {
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::weighted_euclidean(DMatrix::identity(n, n))
    }

    /// `sqrt(y^T A y)` for a symmetric positive-definite `A`.
    pub fn weighted_euclidean(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        check_dimension(n)?;
        if matrix.ncols() != n {
            return Err(LabError::InvalidNorm(format!(
                "matrix must be square, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidNorm(
                "matrix has non-finite entries".into(),
            ));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        if (&matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(LabError::InvalidNorm("matrix is not symmetric".into()));
        }
        let chol = matrix
            .clone()
            .cholesky()
            .ok_or_else(|| LabError::InvalidNorm("matrix is not positive definite".into()))?;
        let sqrt_det = chol.l().diagonal().product();
        let inverse = chol.inverse();
        Ok(Self {
            dimension: n,
            family: NormFamily::WeightedEuclidean { matrix },
            inverse: Some(inverse),
            sqrt_det,
        })
    }

    /// Diagonal weighted-euclidean norm `sqrt(sum d_i y_i^2)`.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::weighted_euclidean(DMatrix::from_diagonal(&DVector::from_column_slice(weights)))
    }

    pub fn lp(n: usize, p: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(p > 1.0) || !p.is_finite() {
            return Err(LabError::InvalidNorm(format!(
                "lp exponent must be finite and > 1, got {p}"
            )));
        }
        Ok(Self {
            dimension: n,
            family: NormFamily::Lp { p },
            inverse: None,
            sqrt_det: f64::NAN,
        })
    }

    /// A norm given by value and gradient handles.
    ///
    /// Homogeneity, reversibility, positivity and the triangle inequality
    /// are spot-checked on deterministic samples.
    pub fn custom<V, G>(n: usize, value: V, gradient: G) -> Result<Self>
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        check_dimension(n)?;
        let norm = Self {
            dimension: n,
            family: NormFamily::Custom {
                value: Arc::new(value),
                gradient: Arc::new(gradient),
            },
            inverse: None,
            sqrt_det: f64::NAN,
        };
        norm.verify_axioms(0xA110, AXIOM_SAMPLES)?;
        Ok(norm)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.family, NormFamily::Custom { .. })
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.dimension {
            Ok(())
        } else {
            Err(LabError::DimensionMismatch {
                expected: self.dimension,
                got: len,
            })
        }
    }

    /// `F(y)`.
    pub fn norm_value(&self, y: &[f64]) -> Result<f64> {
        self.check(y.len())?;
        Ok(self.value_unchecked(y))
    }

    fn value_unchecked(&self, y: &[f64]) -> f64 {
        if y.iter().all(|&v| v == 0.0) {
            return 0.0;
        }
        match &self.family {
            NormFamily::WeightedEuclidean { matrix } => quadratic_form(matrix, y).max(0.0).sqrt(),
            NormFamily::Lp { p } => lp_value(y, *p),
            NormFamily::Custom { value, .. } => value(y),
        }
    }

    /// Gradient of `F` at `y != 0`.
    pub fn norm_gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y.len())?;
        if y.iter().all(|&v| v == 0.0) {
            return Err(LabError::Precondition(
                "norm gradient is undefined at the origin".into(),
            ));
        }
        Ok(self.gradient_unchecked(y))
    }

    fn gradient_unchecked(&self, y: &[f64]) -> Vec<f64> {
        match &self.family {
            NormFamily::WeightedEuclidean { matrix } => {
                let f = self.value_unchecked(y);
                mat_vec(matrix, y).into_iter().map(|v| v / f).collect()
            }
            NormFamily::Lp { p } => lp_gradient(y, *p),
            NormFamily::Custom { gradient, .. } => gradient(y),
        }
    }

    /// `F*(alpha) = sup_{y != 0} alpha(y) / F(y)`.
    pub fn dual_norm_value(&self, alpha: &Covector) -> Result<f64> {
        self.check(alpha.dimension())?;
        if alpha.is_zero() {
            return Ok(0.0);
        }
        match &self.family {
            NormFamily::WeightedEuclidean { .. } => {
                let inv = self.inverse.as_ref().expect("weighted-euclidean inverse");
                Ok(quadratic_form(inv, alpha.components()).max(0.0).sqrt())
            }
            NormFamily::Lp { p } => Ok(lp_value(alpha.components(), conjugate(*p))),
            NormFamily::Custom { .. } => Ok(self.maximize_pairing(alpha.components())?.0),
        }
    }

    /// `J*(alpha)`, the gradient of `F*^2 / 2` at `alpha`, with its duality certificate.
    pub fn legendre_map(&self, alpha: &Covector) -> Result<DualityCertificate> {
        self.check(alpha.dimension())?;
        if alpha.is_zero() {
            return Err(LabError::ZeroCovector);
        }
        let (dual_value, y) = self.legendre_unchecked(alpha.components())?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite(format!("Legendre map produced {y:?}")));
        }
        Ok(DualityCertificate {
            primal_value: self.value_unchecked(&y),
            dual_value,
            pairing: alpha.pair(&y),
            maximizer: y,
        })
    }

    fn legendre_unchecked(&self, alpha: &[f64]) -> Result<(f64, Vec<f64>)> {
        match &self.family {
            NormFamily::WeightedEuclidean { .. } => {
                let inv = self.inverse.as_ref().expect("weighted-euclidean inverse");
                let y = mat_vec(inv, alpha);
                Ok((dot(alpha, &y).max(0.0).sqrt(), y))
            }
            NormFamily::Lp { p } => {
                let q = conjugate(*p);
                let dual = lp_value(alpha, q);
                let y = alpha
                    .iter()
                    .map(|&a| dual.powf(2.0 - q) * a.signum() * a.abs().powf(q - 1.0))
                    .collect();
                Ok((dual, y))
            }
            NormFamily::Custom { .. } => {
                // Danskin: the gradient of F* is the unit-sphere maximizer.
                let (dual, unit) = self.maximize_pairing(alpha)?;
                Ok((dual, unit.into_iter().map(|v| dual * v).collect()))
            }
        }
    }

    /// Maximizes `alpha(y)` over `{F(y) = 1}`; returns `(F*(alpha), argmax)`.
    ///
    /// Projected gradient ascent of `alpha(y)/F(y)` on the euclidean unit
    /// sphere, restarted from a fixed sphere lattice; the best restart is
    /// polished by Newton steps on `F(y) grad F(y) = alpha`.
    fn maximize_pairing(&self, alpha: &[f64]) -> Result<(f64, Vec<f64>)> {
        let n = self.dimension;
        let alpha_len = dot(alpha, alpha).sqrt();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for start in sphere_lattice(n, DUAL_RESTARTS) {
            let (value, y) = self.ascend(alpha, alpha_len, start);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, y));
            }
        }
        let (value, unit) = best.expect("at least one restart");
        let f = self.value_unchecked(&unit);
        let start: Vec<f64> = unit.iter().map(|v| value * v / f).collect();
        let y = self.polish(alpha, alpha_len, start, value)?;
        let fy = self.value_unchecked(&y);
        Ok((dot(alpha, &y) / fy, y.into_iter().map(|v| v / fy).collect()))
    }

    fn ratio(&self, alpha: &[f64], y: &[f64]) -> f64 {
        dot(alpha, y) / self.value_unchecked(y)
    }

    // returns (value, y on the euclidean sphere)
    fn ascend(&self, alpha: &[f64], alpha_len: f64, mut y: Vec<f64>) -> (f64, Vec<f64>) {
        let mut value = self.ratio(alpha, &y);
        let mut step = 1.0;
        for _ in 0..ASCENT_MAX_ITERATIONS {
            let f = self.value_unchecked(&y);
            let grad_f = self.gradient_unchecked(&y);
            let pair = dot(alpha, &y);
            let mut g: Vec<f64> = alpha
                .iter()
                .zip(&grad_f)
                .map(|(a, d)| a / f - pair * d / (f * f))
                .collect();
            let radial = dot(&g, &y);
            for (gi, yi) in g.iter_mut().zip(&y) {
                *gi -= radial * yi;
            }
            if dot(&g, &g).sqrt() / alpha_len * f <= ASCENT_TOLERANCE {
                break;
            }
            let mut accepted = false;
            step *= 2.0;
            while step > 1e-20 {
                let mut trial: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                let len = dot(&trial, &trial).sqrt();
                trial.iter_mut().for_each(|v| *v /= len);
                let tv = self.ratio(alpha, &trial);
                if tv > value && tv >= value + 1e-4 * step * dot(&g, &g) {
                    y = trial;
                    value = tv;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (value, y)
    }

    fn stationarity(&self, alpha: &[f64], y: &[f64]) -> Vec<f64> {
        let f = self.value_unchecked(y);
        self.gradient_unchecked(y)
            .iter()
            .zip(alpha)
            .map(|(d, a)| f * d - a)
            .collect()
    }

    // damped Newton on F grad F (y) = alpha, Jacobian by central differences
    fn polish(
        &self,
        alpha: &[f64],
        alpha_len: f64,
        mut y: Vec<f64>,
        estimate: f64,
    ) -> Result<Vec<f64>> {
        let n = self.dimension;
        let mut r = self.stationarity(alpha, &y);
        let mut res = dot(&r, &r).sqrt();
        let mut iterations = 0;
        while res > POLISH_TOLERANCE * alpha_len && iterations < POLISH_MAX_ITERATIONS {
            iterations += 1;
            let h = 1e-6 * dot(&y, &y).sqrt();
            let mut jac = DMatrix::zeros(n, n);
            for j in 0..n {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[j] += h;
                ym[j] -= h;
                let rp = self.stationarity(alpha, &yp);
                let rm = self.stationarity(alpha, &ym);
                for i in 0..n {
                    jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            let Some(delta) = jac.lu().solve(&DVector::from_column_slice(&r)) else {
                break;
            };
            let mut t = 1.0;
            let mut improved = false;
            while t > 1e-4 {
                let trial: Vec<f64> = y.iter().zip(delta.iter()).map(|(a, d)| a - t * d).collect();
                let tr = self.stationarity(alpha, &trial);
                let tres = dot(&tr, &tr).sqrt();
                if tres < res {
                    y = trial;
                    r = tr;
                    res = tres;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if res > POLISH_ACCEPT * alpha_len || y.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonConvergence {
                iterations,
                best: estimate,
                residual: res / alpha_len,
            });
        }
        Ok(y)
    }

    /// Hessian of `F*^2 / 2` at `alpha` by central differences of the
    /// Legendre map with step `1e-4 F*(alpha)`, symmetrized.
    pub fn dual_hessian(&self, alpha: &Covector) -> Result<DMatrix<f64>> {
        self.check(alpha.dimension())?;
        if alpha.is_zero() {
            return Err(LabError::ZeroCovector);
        }
        let n = self.dimension;
        let a = alpha.components();
        let h = HESSIAN_RELATIVE_STEP * self.dual_norm_value(alpha)?;
        let mut hess = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut plus = a.to_vec();
            let mut minus = a.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let (_, jp) = self.legendre_unchecked(&plus)?;
            let (_, jm) = self.legendre_unchecked(&minus)?;
            for i in 0..n {
                hess[(i, j)] = (jp[i] - jm[i]) / (2.0 * h);
            }
        }
        let sym = (&hess + hess.transpose()) * 0.5;
        if sym.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite(format!("dual Hessian at {a:?}")));
        }
        Ok(sym)
    }

    /// Lattice estimate of `l_{F*} = inf g*_alpha(beta, beta) / F*(beta)^2`
    /// over `alpha, beta` on the unit sphere, `spec.sphere_lattice` points each.
    ///
    /// The estimate is an upper bound for the true infimum, never above 1
    /// because `beta = alpha` gives exactly 1.
    pub fn uniformity_constant(&self, spec: &QuadratureSpec) -> Result<f64> {
        spec.validate()?;
        let n = self.dimension;
        let lattice = sphere_lattice(n, spec.sphere_lattice);
        let betas: Vec<(Vec<f64>, f64)> = lattice
            .iter()
            .map(|b| {
                let c = Covector(b.clone());
                self.dual_norm_value(&c).map(|d| (b.clone(), d))
            })
            .collect::<Result<_>>()?;
        let per_alpha: Vec<Result<f64>> = lattice
            .par_iter()
            .map(|a| {
                let alpha = Covector(a.clone());
                let hess = self.dual_hessian(&alpha)?;
                let eig = hess.clone().symmetric_eigen();
                let min_eig = eig.eigenvalues.min();
                if !(min_eig > 0.0) {
                    return Err(LabError::NotPositiveDefinite {
                        sample: a.clone(),
                        min_eigenvalue: min_eig,
                    });
                }
                let dual_a = self.dual_norm_value(&alpha)?;
                let mut best = quadratic_form(&hess, a) / (dual_a * dual_a);
                for (b, db) in &betas {
                    best = best.min(quadratic_form(&hess, b) / (db * db));
                }
                Ok(best)
            })
            .collect();
        let mut inf = f64::INFINITY;
        for r in per_alpha {
            inf = inf.min(r?);
        }
        Ok(inf)
    }

    /// Busemann-Hausdorff density `c_n = omega_n / Vol{F < 1}`.
    ///
    /// Closed form for the weighted-euclidean and lp families, Monte Carlo
    /// over the bounding box `|y_i| <= F*(e_i)` for custom norms.
    pub fn bh_density(&self, spec: &QuadratureSpec) -> Result<f64> {
        let n = self.dimension;
        match &self.family {
            NormFamily::WeightedEuclidean { .. } => Ok(self.sqrt_det),
            NormFamily::Lp { p } => Ok(unit_ball_volume(n) / lp_ball_volume(n, *p)),
            NormFamily::Custom { .. } => {
                let vol = self.unit_ball_volume_mc(spec)?;
                Ok(unit_ball_volume(n) / vol.value)
            }
        }
    }

    /// Monte Carlo volume of `{F < 1}` with its standard error.
    pub fn unit_ball_volume_mc(
        &self,
        spec: &QuadratureSpec,
    ) -> Result<crate::quadrature::IntegralResult> {
        spec.validate()?;
        let n = self.dimension;
        let mut half = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            half.push(self.dual_norm_value(&Covector(e))? * (1.0 + 1e-9));
        }
        let region = BoxRegion::new(half.iter().map(|h| -h).collect(), half)?;
        let vol = monte_carlo_integral(
            |y| {
                if self.value_unchecked(y) < 1.0 {
                    1.0
                } else {
                    0.0
                }
            },
            &region,
            spec,
        )?;
        let rel = vol.relative_error();
        if rel > spec.mc_relative_tolerance {
            return Err(LabError::MonteCarloTolerance {
                relative_error: rel,
                tolerance: spec.mc_relative_tolerance,
            });
        }
        Ok(vol)
    }

    /// Checks the norm axioms on deterministic pseudo-random samples.
    pub fn verify_axioms(&self, seed: u64, samples: u64) -> Result<()> {
        let n = self.dimension;
        let rng = CounterRng::new(seed);
        let draw = |k: u64| -> Vec<f64> {
            (0..n as u64)
                .map(|i| 4.0 * rng.uniform(k * (2 * n as u64 + 1) + i) - 2.0)
                .collect()
        };
        for s in 0..samples {
            let y1 = draw(2 * s);
            let y2 = draw(2 * s + 1);
            let t = 6.0 * rng.uniform(u64::MAX - s) - 3.0;
            let f1 = self.value_unchecked(&y1);
            let f2 = self.value_unchecked(&y2);
            if !(f1 > 0.0) || !f1.is_finite() {
                return Err(LabError::InvalidNorm(format!(
                    "F({y1:?}) = {f1} is not positive"
                )));
            }
            let scaled: Vec<f64> = y1.iter().map(|v| t * v).collect();
            let fs = self.value_unchecked(&scaled);
            if (fs - t.abs() * f1).abs() > 1e-10 * t.abs() * f1 {
                return Err(LabError::InvalidNorm(format!(
                    "homogeneity fails: F({t} y) = {fs}, |t| F(y) = {}",
                    t.abs() * f1
                )));
            }
            let neg: Vec<f64> = y1.iter().map(|v| -v).collect();
            if (self.value_unchecked(&neg) - f1).abs() > 1e-12 * f1 {
                return Err(LabError::InvalidNorm(format!(
                    "F is not reversible at {y1:?}"
                )));
            }
            let sum: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| a + b).collect();
            if self.value_unchecked(&sum) > (f1 + f2) * (1.0 + 1e-12) {
                return Err(LabError::InvalidNorm(format!(
                    "triangle inequality fails at {y1:?}, {y2:?}"
                )));
            }
        }
        Ok(())
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        Err(LabError::InvalidNorm(format!(
            "dimension must be at least 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Holder conjugate `p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(y)).as_slice().to_vec()
}

fn quadratic_form(m: &DMatrix<f64>, y: &[f64]) -> f64 {
    dot(y, &mat_vec(m, y))
}

/// `(sum |y_i|^p)^{1/p}`, scaled by `max |y_i|` against overflow.
pub fn lp_value(y: &[f64], p: f64) -> f64 {
    let m = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * y
        .iter()
        .map(|v| (v.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

fn lp_gradient(y: &[f64], p: f64) -> Vec<f64> {
    let f = lp_value(y, p);
    y.iter()
        .map(|v| v.signum() * (v.abs() / f).powf(p - 1.0))
        .collect()
}

/// Deterministic, roughly uniform points on the euclidean unit sphere of `R^n`.
///
/// Equally spaced angles in the plane; in higher dimension an additive
/// golden-ratio sequence pushed through the normal quantile and normalized.
pub fn sphere_lattice(n: usize, count: usize) -> Vec<Vec<f64>> {
    if n == 2 {
        return (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
    }
    // generalized golden ratio: the unique positive root of x^{n+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (n as f64 + 1.0));
    }
    let steps: Vec<f64> = (1..=n).map(|j| phi.powi(-(j as i32)).fract()).collect();
    let normal = Normal::standard();
    (0..count)
        .map(|k| {
            let z: Vec<f64> = steps
                .iter()
                .map(|s| {
                    normal.inverse_cdf(
                        (0.5 + (k as f64 + 1.0) * s)
                            .fract()
                            .clamp(1e-12, 1.0 - 1e-12),
                    )
                })
                .collect();
            let len = dot(&z, &z).sqrt();
            z.into_iter().map(|v| v / len).collect()
        })
        .collect()
}

/// Family selector of a [`NormConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    WeightedEuclidean,
    Lp,
    Custom,
}

/// One term `weight * ||y||_p^2` of a custom norm `F = sqrt(sum of terms)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormTerm {
    pub weight: f64,
    pub p: f64,
}

/// Text-configurable description of a norm.
///
/// - `weighted-euclidean`: `matrix` row-major with `dimension^2` entries (identity if omitted);
/// - `lp`: exponent `p > 1`;
/// - `custom`: `terms`, giving `F(y) = sqrt(sum_j weight_j ||y||_{p_j}^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub family: FamilyName,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<NormTerm>>,
}

impl NormConfig {
    pub fn euclidean(n: usize) -> Self {
        Self {
            family: FamilyName::WeightedEuclidean,
            dimension: n,
            p: None,
            matrix: None,
            terms: None,
        }
    }

    pub fn lp(n: usize, p: f64) -> Self {
        Self {
            family: FamilyName::Lp,
            dimension: n,
            p: Some(p),
            matrix: None,
            terms: None,
        }
    }

    pub fn build(&self) -> Result<MinkowskiNorm> {
        let n = self.dimension;
        let unexpected = |field: &str| {
            Err(LabError::InvalidNorm(format!(
                "field `{field}` is not used by family {:?}",
                self.family
            )))
        };
        match self.family {
            FamilyName::WeightedEuclidean => {
                if self.p.is_some() {
                    return unexpected("p");
                }
                if self.terms.is_some() {
                    return unexpected("terms");
                }
                match &self.matrix {
                    None => MinkowskiNorm::euclidean(n),
                    Some(m) => {
                        if m.len() != n * n {
                            return Err(LabError::InvalidNorm(format!(
                                "matrix needs {} entries for dimension {n}, got {}",
                                n * n,
                                m.len()
                            )));
                        }
                        MinkowskiNorm::weighted_euclidean(DMatrix::from_row_slice(n, n, m))
                    }
                }
            }
            FamilyName::Lp => {
                if self.matrix.is_some() {
                    return unexpected("matrix");
                }
                if self.terms.is_some() {
                    return unexpected("terms");
                }
                let p = self
                    .p
                    .ok_or_else(|| LabError::InvalidNorm("family lp requires `p`".into()))?;
                MinkowskiNorm::lp(n, p)
            }
            FamilyName::Custom => {
                if self.matrix.is_some() {
                    return unexpected("matrix");
                }
                if self.p.is_some() {
                    return unexpected("p");
                }
                let terms = self
                    .terms
                    .clone()
                    .filter(|t| !t.is_empty())
                    .ok_or_else(|| {
                        LabError::InvalidNorm("family custom requires non-empty `terms`".into())
                    })?;
                for t in &terms {
                    if !(t.weight > 0.0) || !t.weight.is_finite() {
                        return Err(LabError::InvalidNorm(format!(
                            "term weight must be positive, got {}",
                            t.weight
                        )));
                    }
                    if !(t.p > 1.0) || !t.p.is_finite() {
                        return Err(LabError::InvalidNorm(format!(
                            "term exponent must be > 1, got {}",
                            t.p
                        )));
                    }
                }
                custom_from_terms(n, terms)
            }
        }
    }
}

fn custom_from_terms(n: usize, terms: Vec<NormTerm>) -> Result<MinkowskiNorm> {
    let value_terms = terms.clone();
    let value = move |y: &[f64]| {
        value_terms
            .iter()
            .map(|t| t.weight * lp_value(y, t.p).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let value_for_grad = value.clone();
    let gradient = move |y: &[f64]| {
        let f = value_for_grad(y);
        let mut g = vec![0.0; y.len()];
        for t in &terms {
            let norm = lp_value(y, t.p);
            for (gi, d) in g.iter_mut().zip(lp_gradient(y, t.p)) {
                *gi += t.weight * norm * d / f;
            }
        }
        g
    };
    MinkowskiNorm::custom(n, value, gradient)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cov(v: &[f64]) -> Covector {
        Covector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn value_examples() {
        let e = MinkowskiNorm::euclidean(2).unwrap();
        assert_eq!(e.norm_value(&[3.0, 4.0]).unwrap(), 5.0);
        let l4 = MinkowskiNorm::lp(2, 4.0).unwrap();
        assert!((l4.norm_value(&[1.0, 1.0]).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(l4.norm_value(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            e.norm_value(&[1.0, 2.0, 3.0]),
            Err(LabError::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn dual_examples() {
        let e = MinkowskiNorm::euclidean(2).unwrap();
        assert!((e.dual_norm_value(&cov(&[3.0, 4.0])).unwrap() - 5.0).abs() < 1e-15);
        let l4 = MinkowskiNorm::lp(2, 4.0).unwrap();
        assert!((l4.dual_norm_value(&cov(&[1.0, 1.0])).unwrap() - 2f64.powf(0.75)).abs() < 1e-14);
        let w = MinkowskiNorm::diagonal(&[4.0, 1.0]).unwrap();
        assert!((w.dual_norm_value(&cov(&[1.0, 0.0])).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(w.dual_norm_value(&cov(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn legendre_examples() {
        let e = MinkowskiNorm::euclidean(2).unwrap();
        let c = e.legendre_map(&cov(&[1.0, 0.0])).unwrap();
        assert_eq!(c.maximizer, vec![1.0, 0.0]);
        assert!((c.pairing - 1.0).abs() < 1e-15);

        let l4 = MinkowskiNorm::lp(2, 4.0).unwrap();
        let c = l4.legendre_map(&cov(&[1.0, 1.0])).unwrap();
        assert!((c.primal_value - 2f64.powf(0.75)).abs() < 1e-12);
        assert!((c.pairing - 2f64.powf(1.5)).abs() < 1e-12);

        assert!(matches!(
            e.legendre_map(&cov(&[0.0, 0.0])),
            Err(LabError::ZeroCovector)
        ));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(MinkowskiNorm::weighted_euclidean(DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 2.0, 0.0, 1.0]
        ))
        .is_err());
        assert!(MinkowskiNorm::weighted_euclidean(DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 0.0, 0.0, -1.0]
        ))
        .is_err());
        assert!(MinkowskiNorm::lp(2, 1.0).is_err());
        assert!(MinkowskiNorm::lp(1, 2.0).is_err());
    }

    #[test]
    fn custom_rejects_non_norms() {
        let r = MinkowskiNorm::custom(
            2,
            |y: &[f64]| y[0] * y[0] + y[1] * y[1],
            |y: &[f64]| vec![2.0 * y[0], 2.0 * y[1]],
        );
        assert!(matches!(r, Err(LabError::InvalidNorm(_))));
    }

    #[test]
    fn custom_euclidean_matches_analytic_dual() {
        let c = MinkowskiNorm::custom(
            3,
            |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>().sqrt(),
            |y: &[f64]| {
                let f = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                y.iter().map(|v| v / f).collect()
            },
        )
        .unwrap();
        let a = cov(&[0.3, -1.2, 2.0]);
        let d = c.dual_norm_value(&a).unwrap();
        let exact = (0.09f64 + 1.44 + 4.0).sqrt();
        assert!((d - exact).abs() < 1e-12 * exact, "{d} vs {exact}");
    }

    #[test]
    fn sphere_lattice_is_normalized() {
        for n in [2, 3, 5] {
            let pts = sphere_lattice(n, 64);
            assert_eq!(pts.len(), 64);
            for p in pts {
                assert!((dot(&p, &p) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn config_builds_each_family() {
        let we = NormConfig {
            family: FamilyName::WeightedEuclidean,
            dimension: 2,
            p: None,
            matrix: Some(vec![4.0, 0.0, 0.0, 1.0]),
            terms: None,
        };
        assert!(
            (we.build()
                .unwrap()
                .bh_density(&QuadratureSpec::default())
                .unwrap()
                - 2.0)
                .abs()
                < 1e-14
        );
        let custom = NormConfig {
            family: FamilyName::Custom,
            dimension: 2,
            p: None,
            matrix: None,
            terms: Some(vec![
                NormTerm {
                    weight: 1.0,
                    p: 2.0,
                },
                NormTerm {
                    weight: 0.5,
                    p: 4.0,
                },
            ]),
        };
        assert!(custom.build().unwrap().is_custom());
        let mut bad = NormConfig::lp(2, 4.0);
        bad.matrix = Some(vec![1.0; 4]);
        assert!(bad.build().is_err());
        assert!(NormConfig {
            p: None,
            ..NormConfig::lp(2, 3.0)
        }
        .build()
        .is_err());
    }
}
