//! Interpolation, Heisenberg-Pauli-Weyl and Hardy inequalities on flat
//! Minkowski-normed space.

mod hardy;
mod hpw;
mod interpolation;
mod test_function;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use hardy::{
    double_hardy_report, hardy_report, hardy_sharpness_sweep, quintic_cutoff, HardySweep, SweepFit,
    SweepPoint,
};
pub use hpw::{
    gaussian_t, gaussian_t_closed_form, gaussian_t_ode_residual, hpw_moment_identity, hpw_report,
    GaussianT,
};
pub use interpolation::{
    check_p_ode, check_pqr_identity, extremal, fit_power_law, interpolation_report, kernel_g,
    kernel_h, pqr, OdeResidual, Pqr,
};
pub use test_function::{GeneralTest, RadialTest, ScalarFn, TestFunction, TestKind};

/// Distance to the admissibility boundary below which a triple is flagged slow-decay.
pub const SLOW_DECAY_MARGIN: f64 = 1e-3;

/// Parameters `(n, p, q)` with `0 < q < 2 < p` and `2 < n < 2(p - q)/(p - 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct ExponentTriple {
    n: usize,
    p: f64,
    q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriple {
    n: usize,
    p: f64,
    q: f64,
}

impl TryFrom<RawTriple> for ExponentTriple {
    type Error = LabError;

    fn try_from(raw: RawTriple) -> Result<Self> {
        ExponentTriple::new(raw.n, raw.p, raw.q)
    }
}

impl From<ExponentTriple> for RawTriple {
    fn from(t: ExponentTriple) -> Self {
        RawTriple {
            n: t.n,
            p: t.p,
            q: t.q,
        }
    }
}

impl ExponentTriple {
    /// Validates the admissibility chain, naming the first inequality that fails.
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(LabError::Inadmissible(format!(
                "p and q must be finite, got p = {p}, q = {q}"
            )));
        }
        if !(q > 0.0) {
            return Err(LabError::Inadmissible(format!("0 < q fails: q = {q}")));
        }
        if !(q < 2.0) {
            return Err(LabError::Inadmissible(format!("q < 2 fails: q = {q}")));
        }
        if !(p > 2.0) {
            return Err(LabError::Inadmissible(format!("2 < p fails: p = {p}")));
        }
        if n <= 2 {
            return Err(LabError::Inadmissible(format!("2 < n fails: n = {n}")));
        }
        let bound = 2.0 * (p - q) / (p - 2.0);
        if !((n as f64) < bound) {
            return Err(LabError::Inadmissible(format!(
                "n < 2(p - q)/(p - 2) fails: n = {n}, 2(p - q)/(p - 2) = {bound}"
            )));
        }
        Ok(Self { n, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `2(p - q)/(p - 2)`
    pub fn upper_dimension_bound(&self) -> f64 {
        2.0 * (self.p - self.q) / (self.p - 2.0)
    }

    /// Smallest distance to any of the admissibility inequalities.
    pub fn margin(&self) -> f64 {
        [
            self.q,
            2.0 - self.q,
            self.p - 2.0,
            self.nf() - 2.0,
            self.upper_dimension_bound() - self.nf(),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    /// Within [`SLOW_DECAY_MARGIN`] of the admissibility boundary.
    pub fn slow_decay(&self) -> bool {
        self.margin() < SLOW_DECAY_MARGIN
    }

    /// Sharp constant `(n - q)^2 / p^2`.
    pub fn sharp_constant(&self) -> f64 {
        ((self.nf() - self.q) / self.p).powi(2)
    }

    /// Exponent `e` in `P(lambda) = P(1) lambda^e`.
    pub fn p_power_exponent(&self) -> f64 {
        (self.nf() - self.q) / (2.0 - self.q) - self.p / (self.p - 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(ExponentTriple::new(3, 3.0, 1.0).is_ok());
        assert!(ExponentTriple::new(3, 2.5, 0.5).is_ok());
        let e = ExponentTriple::new(5, 3.0, 1.0).unwrap_err().to_string();
        assert!(e.contains("n < 2(p - q)/(p - 2)"), "{e}");
        let e = ExponentTriple::new(3, 3.0, 2.5).unwrap_err().to_string();
        assert!(e.contains("q < 2"), "{e}");
        assert!(ExponentTriple::new(3, 2.0, 1.0).is_err());
        assert!(ExponentTriple::new(2, 3.0, 1.0).is_err());
        assert!(ExponentTriple::new(3, 3.0, 0.0).is_err());
    }

    #[test]
    fn derived_constants() {
        let t = ExponentTriple::new(3, 3.0, 1.0).unwrap();
        assert!((t.sharp_constant() - 4.0 / 9.0).abs() < 1e-16);
        assert!((t.p_power_exponent() + 1.0).abs() < 1e-16);
        assert!(!t.slow_decay());
        let t = ExponentTriple::new(3, 2.5, 0.5).unwrap();
        assert!((t.sharp_constant() - 1.0).abs() < 1e-16);
        // 2(p-q)/(p-2) = 3.00025 against n = 3
        assert!(ExponentTriple::new(3, 3.9995, 1.0).unwrap().slow_decay());
    }

    #[test]
    fn raw_conversion_validates() {
        assert!(ExponentTriple::try_from(RawTriple {
            n: 5,
            p: 3.0,
            q: 1.0
        })
        .is_err());
        let t = ExponentTriple::try_from(RawTriple {
            n: 3,
            p: 3.0,
            q: 1.0,
        })
        .unwrap();
        assert_eq!(
            RawTriple::from(t),
            RawTriple {
                n: 3,
                p: 3.0,
                q: 1.0
            }
        );
    }
}
