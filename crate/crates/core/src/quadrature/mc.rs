use rayon::prelude::*;

use super::{IntegralResult, QuadratureSpec};
use crate::error::{LabError, Result};

const CHUNK: usize = 4096;

/// Counter-based generator: the `i`-th draw is a pure function of `(seed, i)`.
///
/// Each draw is the SplitMix64 output for state `key + (i + 1) * GOLDEN`, so
/// streams can be split at arbitrary indices without sharing state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix(seed ^ 0x6A09_E667_F3BC_C909),
        }
    }

    pub fn bits(&self, counter: u64) -> u64 {
        mix(self
            .key
            .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.bits(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Axis-aligned box `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(LabError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() || lower.iter().zip(&upper).any(|(a, b)| !(b > a)) {
            return Err(LabError::InvalidArgument(
                "box must be non-empty with lower < upper".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[-h, h]^n`.
    pub fn centered_cube(n: usize, half_width: f64) -> Result<Self> {
        Self::new(vec![-half_width; n], vec![half_width; n])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| (b - a).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        Self {
            lower: self.lower.iter().zip(shift).map(|(a, s)| a + s).collect(),
            upper: self.upper.iter().zip(shift).map(|(a, s)| a + s).collect(),
        }
    }
}

/// Plain Monte Carlo: box volume times the sample mean, with its standard error.
///
/// Samples are processed in fixed chunks whose partial sums are combined in
/// chunk order, so the result is bit-identical for any thread count.
pub fn monte_carlo_integral<F>(
    integrand: F,
    region: &BoxRegion,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    let dim = region.dimension();
    let rng = CounterRng::new(spec.mc_seed);
    let samples = spec.mc_samples;
    let chunks = samples.div_ceil(CHUNK);

    let partials: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut x = vec![0.0; dim];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                for (j, xj) in x.iter_mut().enumerate() {
                    let u = rng.uniform((i * dim + j) as u64);
                    *xj = region.lower[j] + (region.upper[j] - region.lower[j]) * u;
                }
                let v = integrand(&x);
                if !v.is_finite() {
                    return Err(LabError::NonFinite(format!(
                        "integrand returned {v} at {x:?}"
                    )));
                }
                sum += v;
                sum_sq += v * v;
            }
            Ok((sum, sum_sq))
        })
        .collect();

    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for p in partials {
        let (s, q) = p?;
        sum += s;
        sum_sq += q;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let volume = region.volume();
    Ok(IntegralResult {
        value: volume * mean,
        error: volume * (variance / n).sqrt(),
        nodes: samples,
        converged: true,
    })
}
