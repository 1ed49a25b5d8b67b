use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use hiddenspin::fields::FieldConfiguration;
use hiddenspin::scenario::{parse_scenario, ParseErrorKind};
use hiddenspin::Vec3;
use proptest::prelude::*;

fn fixtures(kind: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(kind);
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    files
}

/// Expected kind from the `# expect:` header and line from the `# <<` marker.
fn expectation(text: &str) -> (String, usize) {
    let kind = text
        .lines()
        .find_map(|l| l.strip_prefix("# expect:"))
        .expect("fixture declares its error kind")
        .trim()
        .to_string();
    let line = text
        .lines()
        .position(|l| l.contains("# <<"))
        .expect("fixture marks the failing line")
        + 1;
    (kind, line)
}

#[test]
fn corpus_is_large_enough() {
    assert!(fixtures("valid").len() >= 15);
    assert!(fixtures("invalid").len() >= 10);
}

#[test]
fn valid_fixtures_parse_and_canonicalize() {
    for path in fixtures("valid") {
        let text = fs::read_to_string(&path).unwrap();
        let first = parse_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_scenario(&first.to_text()).unwrap();
        assert_eq!(again, first, "{}", path.display());
        assert_eq!(again.to_text(), first.to_text());
    }
}

#[test]
fn invalid_fixtures_fail_with_documented_kind_and_line() {
    for path in fixtures("invalid") {
        let text = fs::read_to_string(&path).unwrap();
        let (kind, line) = expectation(&text);
        let err = parse_scenario(&text).expect_err(&path.display().to_string());
        assert_eq!(err.kind.name(), kind, "{}: {err}", path.display());
        assert_eq!(err.line, line, "{}: {err}", path.display());
    }
}

#[test]
fn every_error_kind_is_covered() {
    let mut seen = std::collections::HashSet::new();
    for path in fixtures("invalid") {
        let text = fs::read_to_string(&path).unwrap();
        seen.insert(parse_scenario(&text).unwrap_err().kind);
    }
    for kind in [
        ParseErrorKind::Syntax,
        ParseErrorKind::UnknownSection,
        ParseErrorKind::UnknownKey,
        ParseErrorKind::DuplicateKey,
        ParseErrorKind::MissingKey,
        ParseErrorKind::NonFinite,
        ParseErrorKind::Constraint,
        ParseErrorKind::Normalization,
    ] {
        assert!(seen.contains(&kind), "no fixture for {kind}");
    }
}

#[test]
fn spot_check_parsed_values() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/valid");
    let s = parse_scenario(&fs::read_to_string(dir.join("near_unit_spin.scn")).unwrap()).unwrap();
    assert!((s.particle.spin.norm() - 1.0).abs() < 1e-15);

    let s = parse_scenario(&fs::read_to_string(dir.join("reopened_section.scn")).unwrap()).unwrap();
    assert_eq!(s.field, FieldConfiguration::CoulombPotential { z: 0.5 });

    let s = parse_scenario(&fs::read_to_string(dir.join("with_outputs.scn")).unwrap()).unwrap();
    assert_eq!(s.output.csv.as_deref(), Some(Path::new("out/traj.csv")));

    let s = parse_scenario(&fs::read_to_string(dir.join("circular_wave_negative_helicity.scn")).unwrap())
        .unwrap();
    assert!(matches!(s.field, FieldConfiguration::PlaneWaveCircular { helicity: -1, .. }));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        (-300i32..300).prop_map(|e| 10f64.powi(e)),
        Just(0.0),
        Just(-0.0),
    ]
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (finite(), finite(), finite()).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #[test]
    fn canonical_text_is_a_fixed_point(
        e in vec3(), b in vec3(), pos in vec3(),
        px in -0.5..0.5f64, py in -0.5..0.5f64,
        theta in 0.0..PI, phi in -PI..PI,
        t0 in -10.0..10.0f64, span in 0.1..100.0f64, frac in 0.001..1.0f64,
        flags in proptest::array::uniform5(any::<bool>()),
    ) {
        let spin = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let text = format!(
            "[field]\nfamily = uniform_static\ne_field = ({:?}, {:?}, {:?})\nb_field = ({:?}, {:?}, {:?})\n\
             [particle]\nposition = ({:?}, {:?}, {:?})\nmomentum = ({:?}, {:?}, 0)\nspin = ({:?}, {:?}, {:?})\n\
             [terms]\nso = {}\nh1 = {}\nh2 = {}\ndv = {}\nzeeman = {}\n\
             [integration]\nt0 = {:?}\nt1 = {:?}\ndt = {:?}\n",
            e.x, e.y, e.z, b.x, b.y, b.z, pos.x, pos.y, pos.z, px, py,
            spin.x, spin.y, spin.z, flags[0], flags[1], flags[2], flags[3], flags[4],
            t0, t0 + span, span * frac,
        );
        let first = parse_scenario(&text).unwrap();
        let second = parse_scenario(&first.to_text()).unwrap();
        prop_assert_eq!(&second, &first);
    }
}
