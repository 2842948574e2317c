use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use sharplab::norm::{sphere_lattice, FamilyName, NormConfig, NormTerm};
use sharplab::quadrature::{monte_carlo_integral, BoxRegion};
use sharplab::special::{lp_ball_volume, unit_ball_volume};
use sharplab::{Covector, LabError, MinkowskiNorm, QuadratureSpec};

fn cov(v: &[f64]) -> Covector {
    Covector::new(v.to_vec()).unwrap()
}

/// sup of alpha(y)/F(y) over a dense angle sweep of the plane.
fn brute_force_dual(norm: &MinkowskiNorm, alpha: &[f64]) -> f64 {
    let m = 200_000;
    (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            let y = [t.cos(), t.sin()];
            (alpha[0] * y[0] + alpha[1] * y[1]) / norm.norm_value(&y).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn mixed_custom() -> MinkowskiNorm {
    NormConfig {
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
    }
    .build()
    .unwrap()
}

#[test]
fn analytic_duals_match_sphere_maximization() {
    let l4 = MinkowskiNorm::lp(2, 4.0).unwrap();
    let w = MinkowskiNorm::diagonal(&[4.0, 1.0]).unwrap();
    for (norm, alpha, closed) in [
        (&l4, [1.0, 1.0], 2f64.powf(0.75)),
        (&w, [1.0, 0.0], 0.5),
        (&w, [0.3, -2.0], (0.09f64 / 4.0 + 4.0).sqrt()),
    ] {
        let d = norm.dual_norm_value(&cov(&alpha)).unwrap();
        assert!((d - closed).abs() < 1e-12 * closed);
        let brute = brute_force_dual(norm, &alpha);
        assert!((d - brute).abs() < 1e-8 * closed, "{d} vs brute {brute}");
    }
}

#[test]
fn custom_dual_matches_brute_force() {
    let c = mixed_custom();
    for alpha in [[1.0, 0.0], [1.0, 1.0], [-0.4, 2.5], [3.0, -0.1]] {
        let d = c.dual_norm_value(&cov(&alpha)).unwrap();
        let brute = brute_force_dual(&c, &alpha);
        assert!(d >= brute * (1.0 - 1e-12), "{d} below brute {brute}");
        assert!((d - brute).abs() < 1e-8 * brute, "{d} vs {brute}");
        let cert = c.legendre_map(&cov(&alpha)).unwrap();
        assert!(cert.holds(1e-6), "defect {}", cert.defect());
    }
}

#[test]
fn weighted_euclidean_legendre_is_inverse_matrix() {
    let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
    let norm = MinkowskiNorm::weighted_euclidean(a.clone()).unwrap();
    let alpha = [0.7, -1.1, 0.4];
    let y = norm.legendre_map(&cov(&alpha)).unwrap();
    // independent oracle: solve A y = alpha by LU
    let expected = a
        .lu()
        .solve(&nalgebra::DVector::from_column_slice(&alpha))
        .unwrap();
    for i in 0..3 {
        assert!((y.maximizer[i] - expected[i]).abs() < 1e-13);
    }
    assert!(y.holds(1e-12));
}

#[test]
fn dual_of_dual_restores_quadratic_form() {
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
    let norm = MinkowskiNorm::weighted_euclidean(a.clone()).unwrap();
    let inv = a.clone().try_inverse().unwrap();
    let dual = MinkowskiNorm::weighted_euclidean(inv).unwrap();
    for y in [[1.0, 0.0], [0.2, -3.0], [5.0, 5.0]] {
        // the dual norm of F* is computed as the dual value of the A^{-1} norm
        let back = dual.dual_norm_value(&cov(&y)).unwrap();
        let f = norm.norm_value(&y).unwrap();
        assert!((back - f).abs() < 1e-8 * f);
    }
}

#[test]
fn uniformity_constant_is_one_for_inner_products() {
    let spec = QuadratureSpec::default();
    for norm in [
        MinkowskiNorm::euclidean(2).unwrap(),
        MinkowskiNorm::diagonal(&[4.0, 1.0]).unwrap(),
        MinkowskiNorm::weighted_euclidean(DMatrix::from_row_slice(
            3,
            3,
            &[3.0, 1.0, 0.0, 1.0, 2.0, 0.2, 0.0, 0.2, 1.0],
        ))
        .unwrap(),
    ] {
        let l = norm.uniformity_constant(&spec).unwrap();
        assert!((l - 1.0).abs() < 1e-6, "{l}");
    }
}

/// Analytic Hessian of ||a||_q^2 / 2 in the plane.
fn lq_hessian_ratio(a: [f64; 2], b: [f64; 2], q: f64) -> f64 {
    let nq = |v: [f64; 2]| (v[0].abs().powf(q) + v[1].abs().powf(q)).powf(1.0 / q);
    let n = nq(a);
    let s = |x: f64| x.signum() * x.abs().powf(q - 1.0);
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = (2.0 - q) * n.powf(2.0 - 2.0 * q) * s(a[i]) * s(a[j]);
            if i == j {
                h[i][j] += (q - 1.0) * n.powf(2.0 - q) * a[i].abs().powf(q - 2.0);
            }
        }
    }
    let quad = b[0] * (h[0][0] * b[0] + h[0][1] * b[1]) + b[1] * (h[1][0] * b[0] + h[1][1] * b[1]);
    quad / nq(b).powi(2)
}

#[test]
fn lp_uniformity_constant_against_analytic_hessian() {
    let spec = QuadratureSpec::default();
    for p in [3.0, 4.0] {
        let q = p / (p - 1.0);
        let norm = MinkowskiNorm::lp(2, p).unwrap();
        let l = norm.uniformity_constant(&spec).unwrap();

        // same lattice, analytic Hessian
        let pts = sphere_lattice(2, spec.sphere_lattice);
        let mut lattice_inf = f64::INFINITY;
        for a in &pts {
            for b in pts.iter().chain(std::iter::once(a)) {
                lattice_inf = lattice_inf.min(lq_hessian_ratio([a[0], a[1]], [b[0], b[1]], q));
            }
        }
        assert!(
            (l - lattice_inf).abs() < 1e-6 * lattice_inf,
            "p={p}: {l} vs {lattice_inf}"
        );

        // dense angle grid: the true infimum lies below the lattice estimate
        let m = 720;
        let mut dense = f64::INFINITY;
        for i in 0..m {
            let ta = 2.0 * PI * (i as f64 + 0.25) / m as f64;
            for j in 0..m {
                let tb = 2.0 * PI * j as f64 / m as f64;
                dense = dense.min(lq_hessian_ratio(
                    [ta.cos(), ta.sin()],
                    [tb.cos(), tb.sin()],
                    q,
                ));
            }
        }
        assert!(dense <= l + 1e-6);
        assert!(l < 1.0 - 1e-3, "p={p}: {l}");
        println!(
            "p = {p}: lattice l = {l:.10}, dense-grid l = {dense:.10}, q - 1 = {:.10}",
            q - 1.0
        );
    }
}

#[test]
fn lp4_uniformity_regression_value() {
    let l = MinkowskiNorm::lp(2, 4.0)
        .unwrap()
        .uniformity_constant(&QuadratureSpec::default())
        .unwrap();
    assert!((l - LP4_LATTICE_UNIFORMITY).abs() < 1e-6, "{l}");
}

const LP4_LATTICE_UNIFORMITY: f64 = 0.336_190_138_652_911_6;

#[test]
fn bh_density_examples() {
    let spec = QuadratureSpec::default();
    assert!(
        (MinkowskiNorm::euclidean(3)
            .unwrap()
            .bh_density(&spec)
            .unwrap()
            - 1.0)
            .abs()
            < 1e-14
    );
    assert!(
        (MinkowskiNorm::diagonal(&[4.0, 1.0])
            .unwrap()
            .bh_density(&spec)
            .unwrap()
            - 2.0)
            .abs()
            < 1e-14
    );

    // Monte Carlo oracle for the quartic ball area against the Gamma formula
    let region = BoxRegion::centered_cube(2, 1.0).unwrap();
    let mc = monte_carlo_integral(
        |y| {
            if y[0].powi(4) + y[1].powi(4) < 1.0 {
                1.0
            } else {
                0.0
            }
        },
        &region,
        &spec,
    )
    .unwrap();
    let exact = lp_ball_volume(2, 4.0);
    assert!(
        (mc.value - exact).abs() < 3.0 * mc.error,
        "{} +- {} vs {exact}",
        mc.value,
        mc.error
    );
    let c = MinkowskiNorm::lp(2, 4.0)
        .unwrap()
        .bh_density(&spec)
        .unwrap();
    assert!((c - PI / exact).abs() < 1e-14);
}

#[test]
fn custom_bh_density_by_monte_carlo() {
    let spec = QuadratureSpec::default();
    let round = NormConfig {
        family: FamilyName::Custom,
        dimension: 3,
        p: None,
        matrix: None,
        terms: Some(vec![NormTerm {
            weight: 1.0,
            p: 2.0,
        }]),
    }
    .build()
    .unwrap();
    let vol = round.unit_ball_volume_mc(&spec).unwrap();
    assert!((vol.value - unit_ball_volume(3)).abs() < 3.0 * vol.error);

    let mixed = mixed_custom();
    let vol = mixed.unit_ball_volume_mc(&spec).unwrap();
    // polar-coordinate oracle: Vol = (1/2) int_0^{2pi} F(theta)^{-2} dtheta
    let m = 100_000;
    let polar: f64 = (0..m)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / m as f64;
            0.5 * mixed.norm_value(&[t.cos(), t.sin()]).unwrap().powi(-2)
        })
        .sum::<f64>()
        * 2.0
        * PI
        / m as f64;
    assert!(
        (vol.value - polar).abs() < 3.0 * vol.error,
        "{} +- {} vs {polar}",
        vol.value,
        vol.error
    );

    let strict = spec.with_mc_samples(1 << 10);
    let tight = sharplab::QuadratureSpec {
        mc_relative_tolerance: 1e-5,
        ..strict
    };
    assert!(matches!(
        mixed.bh_density(&tight),
        Err(LabError::MonteCarloTolerance { .. })
    ));
}

#[test]
fn uniformity_rejects_non_strongly_convex_dual() {
    // near-l1 norm: the dual Hessian degenerates, so the estimate is either
    // positive and below 1 or reported as an error
    let spec = QuadratureSpec::default();
    let near_l1 = MinkowskiNorm::lp(2, 1.05).unwrap();
    match near_l1.uniformity_constant(&spec) {
        Ok(l) => assert!(l > 0.0 && l < 1.0),
        Err(e) => assert!(matches!(
            e,
            LabError::NotPositiveDefinite { .. } | LabError::NonFinite(_)
        )),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneity_and_reversibility(
        y in prop::collection::vec(-5.0f64..5.0, 3),
        t in -4.0f64..4.0,
        p in 1.2f64..6.0,
    ) {
        let norms = [
            MinkowskiNorm::lp(3, p).unwrap(),
            MinkowskiNorm::diagonal(&[1.0, 2.0, 0.5]).unwrap(),
        ];
        let ty: Vec<f64> = y.iter().map(|v| t * v).collect();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        for n in &norms {
            let f = n.norm_value(&y).unwrap();
            prop_assert!((n.norm_value(&ty).unwrap() - t.abs() * f).abs() <= 1e-10 * (t.abs() * f).max(1e-300));
            prop_assert_eq!(n.norm_value(&neg).unwrap(), f);
            let a = Covector::new(y.clone()).unwrap();
            let ta = Covector::new(ty.clone()).unwrap();
            let d = n.dual_norm_value(&a).unwrap();
            prop_assert!((n.dual_norm_value(&ta).unwrap() - t.abs() * d).abs() <= 1e-10 * (t.abs() * d).max(1e-300));
        }
    }

    #[test]
    fn certificate_chain(alpha in prop::collection::vec(-3.0f64..3.0, 2), p in 1.3f64..6.0) {
        prop_assume!(alpha.iter().any(|v| v.abs() > 1e-3));
        let a = Covector::new(alpha).unwrap();
        for n in [MinkowskiNorm::lp(2, p).unwrap(), MinkowskiNorm::diagonal(&[4.0, 1.0]).unwrap(), mixed_custom()] {
            let c = n.legendre_map(&a).unwrap();
            prop_assert!(c.holds(1e-6), "defect {}", c.defect());
            // Fenchel-Young: alpha(y) <= F*(alpha) F(y) for any y, equality at J*
            prop_assert!(a.pair(&[1.0, -0.5]) <= n.dual_norm_value(&a).unwrap() * n.norm_value(&[1.0, -0.5]).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn triangle_inequality(y1 in prop::collection::vec(-5.0f64..5.0, 2), y2 in prop::collection::vec(-5.0f64..5.0, 2)) {
        let n = mixed_custom();
        let s: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| a + b).collect();
        prop_assert!(n.norm_value(&s).unwrap() <= (n.norm_value(&y1).unwrap() + n.norm_value(&y2).unwrap()) * (1.0 + 1e-12));
    }
}
