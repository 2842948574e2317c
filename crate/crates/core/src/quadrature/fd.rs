use crate::error::{LabError, Result};

/// Relative step of the central difference.
pub const FD_RELATIVE_STEP: f64 = 1e-5;

/// Central difference at `x` with relative step `1e-5`, Richardson-extrapolated once.
pub fn try_fd_derivative<F>(f: F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = if x == 0.0 {
        FD_RELATIVE_STEP
    } else {
        FD_RELATIVE_STEP * x.abs()
    };
    let eval = |t: f64| -> Result<f64> {
        let v = f(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::NonFinite(format!(
                "derivative target returned {v} at {t:e}"
            )))
        }
    };
    let coarse = (eval(x + h)? - eval(x - h)?) / (2.0 * h);
    let fine = (eval(x + 0.5 * h)? - eval(x - 0.5 * h)?) / h;
    Ok((4.0 * fine - coarse) / 3.0)
}

pub fn fd_derivative<F>(f: F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_fd_derivative(|t| Ok(f(t)), x)
}
