//! Gauss-Kronrod 21-point rule and a global adaptive driver.

use crate::error::{LabError, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], ...
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

pub(crate) const NODES_PER_PANEL: usize = 21;

#[derive(Debug, Clone, Copy)]
pub(crate) struct RuleEstimate {
    pub value: f64,
    pub error: f64,
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::NonFinite(format!(
            "integrand returned {v} at {x:e}"
        )))
    }
}

/// Applies the 21-point Kronrod rule with the embedded 10-point Gauss rule on `[a, b]`.
pub(crate) fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<RuleEstimate> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = checked(f, center)?;

    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = checked(f, center - x)?;
        let f2 = checked(f, center + x)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        let scale = (200.0 * error / res_asc).powf(1.5);
        error = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(RuleEstimate { value, error })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    segment: usize,
    a: f64,
    b: f64,
    est: RuleEstimate,
    exhausted: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AdaptiveOutcome {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// Global adaptive integration of `f(segment, t)` over several segments at once.
///
/// The panel with the largest error estimate is bisected until the summed
/// error meets `max(rel_tol * |I|, abs_tol)` or `max_panels` is reached.
pub(crate) fn adaptive<F>(
    f: F,
    segments: &[(f64, f64)],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<AdaptiveOutcome>
where
    F: Fn(usize, f64) -> f64,
{
    let mut panels = Vec::with_capacity(max_panels.max(segments.len()) + 1);
    let mut nodes = 0;
    for (segment, &(a, b)) in segments.iter().enumerate() {
        if b <= a {
            continue;
        }
        let g = |t: f64| f(segment, t);
        let est = qk21(&g, a, b)?;
        nodes += NODES_PER_PANEL;
        panels.push(Panel {
            segment,
            a,
            b,
            est,
            exhausted: false,
        });
    }

    let totals = |panels: &[Panel]| {
        panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error))
    };

    loop {
        let (value, error) = totals(&panels);
        if error <= (rel_tol * value.abs()).max(abs_tol) {
            break;
        }
        if panels.len() >= max_panels {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.exhausted)
            .max_by(|x, y| x.1.est.error.total_cmp(&y.1.est.error))
            .map(|(i, _)| i);
        let Some(i) = worst else { break };
        let p = panels[i];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b || (p.b - p.a) <= 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs())
        {
            panels[i].exhausted = true;
            continue;
        }
        let g = |t: f64| f(p.segment, t);
        let left = qk21(&g, p.a, mid)?;
        let right = qk21(&g, mid, p.b)?;
        nodes += 2 * NODES_PER_PANEL;
        panels[i] = Panel {
            segment: p.segment,
            a: p.a,
            b: mid,
            est: left,
            exhausted: false,
        };
        panels.push(Panel {
            segment: p.segment,
            a: mid,
            b: p.b,
            est: right,
            exhausted: false,
        });
    }

    // sum in (segment, left endpoint) order so the result does not depend on refinement history
    panels.sort_by(|x, y| x.segment.cmp(&y.segment).then(x.a.total_cmp(&y.a)));
    let (value, error) = totals(&panels);
    Ok(AdaptiveOutcome {
        value,
        error,
        nodes,
        converged: error <= (rel_tol * value.abs()).max(abs_tol),
    })
}
