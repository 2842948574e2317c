//! The record produced by every inequality evaluation.

use serde::{Deserialize, Serialize};

/// One evaluation of an inequality `ratio >= target`.
///
/// `ratio` is arranged so that the inequality claims `ratio >= target`;
/// `slack = ratio - target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub label: String,
    /// Grid parameter of the evaluation (lambda, epsilon, alpha, ...), or NaN if none.
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub target: f64,
    pub slack: f64,
    /// Error estimates of the integrals entering the report, in order of use.
    pub integral_errors: Vec<f64>,
    /// Propagated absolute error of `ratio`.
    pub ratio_error: f64,
}

impl InequalityReport {
    pub fn new(label: impl Into<String>, param: f64, lhs: f64, rhs: f64, target: f64) -> Self {
        let ratio = lhs / rhs;
        Self {
            label: label.into(),
            param,
            lhs,
            rhs,
            ratio,
            target,
            slack: ratio - target,
            integral_errors: Vec::new(),
            ratio_error: 0.0,
        }
    }

    /// Attaches integral errors; `relative_weights[i]` is the power with
    /// which integral `i` enters the ratio, used for first-order propagation.
    pub fn with_errors(mut self, values: &[f64], errors: &[f64], relative_weights: &[f64]) -> Self {
        self.integral_errors = errors.to_vec();
        let rel: f64 = values
            .iter()
            .zip(errors)
            .zip(relative_weights)
            .map(|((v, e), w)| {
                if *v == 0.0 {
                    0.0
                } else {
                    w.abs() * e / v.abs()
                }
            })
            .sum();
        self.ratio_error = rel * self.ratio.abs();
        self
    }

    /// Combined numerical tolerance used by the equality and validity tests,
    /// never below a few ulps of the ratio.
    pub fn combined_tolerance(&self) -> f64 {
        self.ratio_error.max(8.0 * f64::EPSILON * self.ratio.abs())
    }

    /// Inequality holds up to numerics: `slack >= -10 x combined error`.
    pub fn holds(&self) -> bool {
        self.slack >= -10.0 * self.combined_tolerance()
    }

    /// Equality up to numerics: `|slack| <= 10 x combined error`.
    pub fn is_equality(&self) -> bool {
        self.slack.abs() <= 10.0 * self.combined_tolerance()
    }

    pub fn relative_slack(&self) -> f64 {
        self.slack / self.target.abs()
    }

    pub fn is_finite(&self) -> bool {
        [
            self.lhs,
            self.rhs,
            self.ratio,
            self.target,
            self.slack,
            self.ratio_error,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}
