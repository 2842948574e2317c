use std::fs;
use std::path::Path;

use proptest::prelude::*;
use sharplab::flat::ExponentTriple;
use sharplab::norm::FamilyName;
use sharplab::{NormConfig, QuadratureSpec};
use sharplab_cli::config::{Grids, HardyConfig, KoConfig};
use sharplab_cli::{parse_config, render_config, ConfigError, RunConfig, Suite};

const MINIMAL: &str = "suite = \"identities\"\n\n[triple]\nn = 3\np = 3.0\nq = 1.0\n";

fn message(e: ConfigError) -> String {
    e.to_string()
}

#[test]
fn minimal_identities_config() {
    let c = parse_config(MINIMAL).unwrap();
    assert_eq!(c.suite, Suite::Identities);
    assert_eq!(c.triple.unwrap().p(), 3.0);
    assert_eq!(c.quadrature(), QuadratureSpec::default());
}

#[test]
fn inadmissible_triples_name_the_inequality() {
    let e =
        parse_config("suite = \"identities\"\n\n[triple]\nn = 5\np = 3.0\nq = 1.0\n").unwrap_err();
    let m = message(e);
    assert!(
        m.contains("n < 2(p - q)/(p - 2) fails") && m.contains("line 3"),
        "{m}"
    );
    let m = message(
        parse_config("suite = \"identities\"\n[triple]\nn = 3\np = 3.0\nq = 2.5\n").unwrap_err(),
    );
    assert!(m.contains("q < 2 fails"), "{m}");
}

#[test]
fn syntax_and_unknown_keys_report_lines() {
    let m = message(parse_config("suite = \"identities\"\nbogus = 1\n").unwrap_err());
    assert!(m.contains("line 2") && m.contains("bogus"), "{m}");
    let m = message(parse_config("suite = \"identities\"\n[triple\n").unwrap_err());
    assert!(m.starts_with("line 2"), "{m}");
    let m = message(parse_config("suite = \"everything\"\n").unwrap_err());
    assert!(m.contains("line 1"), "{m}");
}

#[test]
fn suite_requirements_are_enforced() {
    let m =
        message(parse_config("suite = \"all\"\n[triple]\nn = 3\np = 3.0\nq = 1.0\n").unwrap_err());
    assert!(m.contains("[grids]"), "{m}");
    let m = message(parse_config("suite = \"identities\"\n").unwrap_err());
    assert!(m.contains("[triple]"), "{m}");
    let m = message(parse_config("suite = \"flat-hpw\"\n[grids]\nlambda = []\n").unwrap_err());
    assert!(m.contains("grids.lambda is empty"), "{m}");
    let m = message(
        parse_config("suite = \"ko-refute\"\n[ko]\ndimension = 2\nlower = 5.0\nupper = 1.0\n")
            .unwrap_err(),
    );
    assert!(
        m.contains("dimension must be >= 3") && m.contains("lower < upper"),
        "{m}"
    );
    let m = message(
        parse_config("suite = \"flat-hpw\"\n[norm]\nfamily = \"lp\"\ndimension = 3\n").unwrap_err(),
    );
    assert!(m.contains("norm"), "{m}");
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let c = parse_config(&fs::read_to_string(&path).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(parse_config(&render_config(&c).unwrap()).unwrap(), c);
            count += 1;
        }
    }
    assert!(count >= 7);
}

#[test]
fn hash_depends_on_content() {
    let a = parse_config(MINIMAL).unwrap();
    let mut b = a.clone();
    b.quadrature = Some(QuadratureSpec::default().with_seed(7));
    assert_eq!(
        a.hash().unwrap(),
        parse_config(MINIMAL).unwrap().hash().unwrap()
    );
    assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    assert_eq!(a.hash().unwrap().len(), 64);
}

fn positive_grid() -> impl Strategy<Value = Option<Vec<f64>>> {
    prop::option::of(prop::collection::vec(1e-3f64..1e3, 1..5))
}

fn triple() -> impl Strategy<Value = ExponentTriple> {
    prop_oneof![
        Just(ExponentTriple::new(3, 3.0, 1.0).unwrap()),
        Just(ExponentTriple::new(3, 2.5, 0.5).unwrap()),
        Just(ExponentTriple::new(4, 2.2, 1.5).unwrap()),
    ]
}

fn norm() -> impl Strategy<Value = NormConfig> {
    prop_oneof![
        (3usize..6).prop_map(NormConfig::euclidean),
        (3usize..6, 1.1f64..8.0).prop_map(|(n, p)| NormConfig::lp(n, p)),
        Just(NormConfig {
            family: FamilyName::WeightedEuclidean,
            dimension: 3,
            p: None,
            matrix: Some(vec![2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 3.0]),
            terms: None,
        }),
    ]
}

fn config() -> impl Strategy<Value = RunConfig> {
    let suite = prop::sample::select(vec![
        Suite::Identities,
        Suite::FlatHpw,
        Suite::FlatHardy,
        Suite::Hyperbolic,
        Suite::KoRefute,
        Suite::ChpwBounds,
        Suite::All,
    ]);
    let grids = (
        positive_grid(),
        prop::option::of(prop::collection::vec(1e-9f64..0.5, 1..5)),
        positive_grid(),
        prop::option::of(prop::collection::vec(0.0f64..3.0, 1..4)),
        prop::option::of(prop::collection::vec(3usize..7, 1..3)),
    )
        .prop_map(|(lambda, epsilon, alpha, beta, dimensions)| Grids {
            lambda,
            epsilon,
            rho: Some(vec![0.1, 0.7, 2.5]),
            alpha,
            beta,
            dimensions,
        });
    let quadrature = (
        1e-12f64..1e-6,
        20usize..200,
        1024usize..1 << 22,
        0u64..i64::MAX as u64,
    )
        .prop_map(|(tol, subdivisions, samples, seed)| QuadratureSpec {
            relative_tolerance: tol,
            max_subdivisions: subdivisions,
            mc_samples: samples,
            mc_seed: seed,
            ..QuadratureSpec::default()
        });
    (
        suite,
        prop::option::of(1e-12f64..1e-2),
        prop::option::of(norm()),
        triple(),
        grids,
        prop::option::of(quadrature),
        prop::option::of((0.5f64..1.0, 1.5f64..4.0, 1.5f64..4.0)),
        prop::option::of((3usize..6, 0.0f64..5.0, 10.0f64..200.0, 2usize..5000)),
    )
        .prop_map(
            |(suite, tolerance, norm, triple, grids, quadrature, hardy, ko)| RunConfig {
                suite,
                output_dir: Some("out/generated".into()),
                tolerance,
                norm,
                triple: Some(triple),
                grids: Some(grids),
                quadrature,
                hardy: hardy.map(|(inner_radius, outer_radius, double_radius)| HardyConfig {
                    inner_radius,
                    outer_radius,
                    double_radius,
                }),
                ko: ko.map(|(dimension, lower, upper, nodes)| KoConfig {
                    dimension,
                    lower,
                    upper,
                    nodes,
                }),
            },
        )
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(c in config()) {
        c.validate().unwrap();
        let text = render_config(&c).unwrap();
        prop_assert_eq!(parse_config(&text).unwrap(), c);
    }
}
