use sharplab::norm::{FamilyName, NormTerm};
use sharplab::quadrature::{flat_radial_volume_integral, monte_carlo_integral, BoxRegion};
use sharplab::{MinkowskiNorm, NormConfig, QuadratureSpec, RadialProfile};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn norms() -> Vec<MinkowskiNorm> {
    let custom = NormConfig {
        family: FamilyName::Custom,
        dimension: 3,
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
    .unwrap();
    vec![
        MinkowskiNorm::euclidean(3).unwrap(),
        MinkowskiNorm::diagonal(&[4.0, 1.0, 0.25]).unwrap(),
        MinkowskiNorm::lp(3, 4.0).unwrap(),
        MinkowskiNorm::lp(3, 1.5).unwrap(),
        custom,
    ]
}

#[test]
fn integral_of_radial_function_is_norm_independent() {
    let radial = flat_radial_volume_integral(&RadialProfile::gaussian(1.0), 3, &spec())
        .unwrap()
        .value;
    assert!((radial - std::f64::consts::PI.powf(1.5)).abs() < 1e-12);
    for norm in norms() {
        let density = norm.bh_density(&spec()).unwrap();
        let region = BoxRegion::centered_cube(3, 12.0).unwrap();
        let mc = monte_carlo_integral(
            |x: &[f64]| (-norm.norm_value(x).unwrap().powi(2)).exp(),
            &region,
            &spec(),
        )
        .unwrap()
        .scaled(density);
        assert!(
            (mc.value - radial).abs() < 3.0 * mc.error,
            "{:?}: {} +- {} vs {radial}",
            norm.family(),
            mc.value,
            mc.error
        );
    }
}

#[test]
fn scaling_law() {
    let f = |s: f64| {
        RadialProfile::new(
            move |r| (1.0 + s * r).powi(2) * (-(s * r).powi(2)).exp(),
            sharplab::Decay::Gaussian(s * s),
            sharplab::OriginClass::Bounded,
        )
    };
    for n in [2, 3, 5] {
        let base = flat_radial_volume_integral(&f(1.0), n, &spec())
            .unwrap()
            .value;
        for s in [0.5, 2.0] {
            let scaled = flat_radial_volume_integral(&f(s), n, &spec())
                .unwrap()
                .value;
            assert!((scaled - s.powi(-(n as i32)) * base).abs() < 1e-8 * scaled);
        }
    }
}

#[test]
fn monte_carlo_is_bit_identical_across_thread_counts() {
    let region = BoxRegion::centered_cube(4, 2.0).unwrap();
    let f = |x: &[f64]| x.iter().map(|v| v.sin().powi(2)).product::<f64>();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo_integral(f, &region, &spec()).unwrap())
    };
    let one = run(1);
    let many = run(7);
    assert_eq!(one.value.to_bits(), many.value.to_bits());
    assert_eq!(one.error.to_bits(), many.error.to_bits());
    let other = monte_carlo_integral(f, &region, &spec().with_seed(1)).unwrap();
    assert_ne!(other.value, one.value);
}
