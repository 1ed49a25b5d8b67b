use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hiddenspin"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("process exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ZERO_FIELD: &str = "\
[field]
family = uniform_static
e_field = (0, 0, 0)
b_field = (0, 0, 0)
[particle]
position = (0.3, 0.2, -0.1)
momentum = (0.1, -0.2, 0.05)
spin = (0.6, 0, 0.8)
[terms]
so = true
h1 = true
h2 = true
dv = true
zeeman = true
[integration]
t1 = 1
dt = 0.1
";

#[test]
fn terms_all_zero_field_prints_zero_corrections() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "zero.scn", ZERO_FIELD);
    let o = run(&["terms", s(&p), "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    for key in ["so", "h1", "h2", "dv", "zeeman"] {
        assert_eq!(v["terms"][key].as_f64().unwrap(), 0.0, "{key}");
    }
    let table = stdout(&run(&["terms", s(&p)]));
    assert!(table.lines().any(|l| l.starts_with("h1") && l.contains("+0.000000000000000e0")));
}

#[test]
fn terms_circular_wave_h1_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (e0, omega) = (0.3, 1.5);
    for h in [1.0, -1.0] {
        let p = write(
            dir.path(),
            "wave.scn",
            &format!(
                "[field]\nfamily = plane_wave_circular\ne0 = {e0}\nomega = {omega}\nhelicity = {h}\n\
                 [particle]\nposition = (0.1, 0.4, 0.7)\nmomentum = (0, 0, 0)\nspin = (0.6, 0, 0.8)\n\
                 [terms]\nh1 = true\n[integration]\nt1 = 1\ndt = 0.1\n"
            ),
        );
        let o = run(&["terms", s(&p), "--at", "2.5", "--json"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v = json(&o);
        // ħ = m = c = 1, e = -1; E×A = h E0²/(cω) ẑ
        let sz = v["sigma"]["z"].as_f64().unwrap();
        let want = h * e0 * e0 / (4.0 * omega) * sz;
        let got = v["terms"]["h1"].as_f64().unwrap();
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        assert_eq!(v["t"].as_f64().unwrap(), 2.5);
    }
}

#[test]
fn terms_missing_file_names_the_path() {
    let o = run(&["terms", "/definitely/not/here.scn"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/definitely/not/here.scn"));
    assert!(o.stdout.is_empty());
}

#[test]
fn terms_at_coulomb_centre_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "centre.scn",
        "[field]\nfamily = coulomb_potential\nz = 1\n[particle]\nposition = (0, 0, 0)\n\
         momentum = (0, 0, 0)\nspin = (0, 0, 1)\n[terms]\nso = true\n[integration]\nt1 = 1\ndt = 0.1\n",
    );
    let o = run(&["terms", s(&p)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("singular"));
}

#[test]
fn every_invalid_fixture_exits_with_usage_code_and_location() {
    let dir = fixtures().join("invalid");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let kind = text.lines().find_map(|l| l.strip_prefix("# expect:")).unwrap().trim();
        let line = text.lines().position(|l| l.contains("# <<")).unwrap() + 1;
        for cmd in ["terms", "evolve"] {
            let o = run(&[cmd, s(&path)]);
            assert_eq!(code(&o), 2, "{}", path.display());
            let err = stderr(&o);
            assert!(err.contains(&format!("line {line}: {kind} error")), "{}: {err}", path.display());
        }
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn every_valid_fixture_evaluates() {
    for entry in fs::read_dir(fixtures().join("valid")).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&["terms", s(&path)]);
        assert_eq!(code(&o), 0, "{}: {}", path.display(), stderr(&o));
    }
}

#[test]
fn evolve_free_particle_writes_linear_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "free.scn",
        "[field]\nfamily = uniform_static\n[particle]\nposition = (1, 2, 3)\nmomentum = (0.5, -0.25, 0.125)\n\
         spin = (0, 0, 1)\n[integration]\nt1 = 4\ndt = 0.25\n[output]\ncsv = runs/free.csv\n",
    );
    let o = run(&["evolve", s(&p)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("runs/free.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("t,rx,ry,rz"));
    let mut rows = 0;
    for l in lines {
        let c: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        let t = c[0];
        assert!((c[1] - (1.0 + 0.5 * t)).abs() < 1e-14);
        assert!((c[2] - (2.0 - 0.25 * t)).abs() < 1e-14);
        assert!((c[3] - (3.0 + 0.125 * t)).abs() < 1e-14);
        rows += 1;
    }
    assert_eq!(rows, 17);
}

#[test]
fn evolve_cyclotron_reports_conserved_momentum() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(fixtures().join("valid/cyclotron.scn")).unwrap();
    let p = write(dir.path(), "cyc.scn", &src);
    let o = run(&["evolve", s(&p), "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let p0 = v["initial_momentum_norm"].as_f64().unwrap();
    let fin = &v["final"]["p"];
    let p1 = (fin["x"].as_f64().unwrap().powi(2) + fin["y"].as_f64().unwrap().powi(2)
        + fin["z"].as_f64().unwrap().powi(2))
    .sqrt();
    assert!((p1 - p0).abs() < 1e-10);
    assert!(v["max_norm_drift"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["completed"], Value::Bool(true));
    let table = stdout(&run(&["evolve", s(&p)]));
    assert!(table.contains("|p| change"));
}

#[test]
fn evolve_bad_dt_is_a_usage_error() {
    let o = run(&["evolve", s(&fixtures().join("invalid/negative_dt.scn"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn evolve_singular_abort_flushes_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "fall.scn",
        "[constants]\nc = 10\n[field]\nfamily = coulomb_potential\nz = 1\n[particle]\n\
         position = (1, 0, 0)\nmomentum = (0, 0, 0)\nspin = (0, 0, 1)\n[integration]\nt1 = 5\n\
         dt = 0.001\nsample_every = 100\nr_min = 0.1\n[output]\ncsv = fall.csv\njsonl = fall.jsonl\n",
    );
    let o = run(&["evolve", s(&p)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("singular"));
    assert!(stdout(&o).contains("aborted"));
    let csv = fs::read_to_string(dir.path().join("fall.csv")).unwrap();
    let jsonl = fs::read_to_string(dir.path().join("fall.jsonl")).unwrap();
    assert!(csv.lines().count() > 10);
    assert_eq!(csv.lines().count() - 1, jsonl.lines().count());
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let r = (last[1] * last[1] + last[2] * last[2] + last[3] * last[3]).sqrt();
    assert!((0.1..0.2).contains(&r), "last radius {r}");
}

#[test]
fn verify_single_suites() {
    let o = run(&["verify", "--suite", "eq16-identity", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let check = &v["suites"][0]["checks"][0];
    assert!(check["max_residual"].as_f64().unwrap() < 1e-14);
    assert_eq!(v["samples"].as_u64().unwrap(), 10_000);

    let o = run(&["verify", "--suite", "ssc-factor-half"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn verify_all_is_seeded_and_deterministic() {
    let args = ["verify", "--all", "--seed", "42", "--samples", "300"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let suites: Vec<&str> = text.lines().filter_map(|l| l.split_whitespace().nth(1)).collect();
    for name in ["eq13-forms", "eq14-eq15-route", "eq16-identity", "eq17-eq18-route", "ssc-factor-half", "c-scaling", "gauge"] {
        assert!(suites.contains(&name), "{name}");
    }
}

#[test]
fn verify_usage_errors() {
    assert_eq!(code(&run(&["verify", "--suite", "nonexistent"])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
    assert_eq!(code(&run(&["verify", "--all", "--suite", "gauge"])), 2);
    assert_eq!(code(&run(&["verify", "--all", "--samples", "0"])), 2);
    assert_eq!(code(&run(&["verify", "--all", "--seed", "abc"])), 2);
}

#[test]
fn tensor_at_rest_has_zero_residuals() {
    for ssc in ["moller", "dirac"] {
        let o = run(&["tensor", "--spin", "(0.2,-0.5,0.7)", "--beta", "(0,0,0)", "--ssc", ssc, "--json"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(json(&o)["residual_max"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn tensor_boosted_moller_residual_and_round_trip() {
    let o = run(&["tensor", "--spin", "(0,1,0)", "--beta", "(0.3,0,0)", "--ssc", "moller", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["residual_max"].as_f64().unwrap() < 1e-12);
    let back: Vec<f64> = v["round_trip"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let s4: Vec<f64> = v["spin_vector"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in back.iter().zip(&s4) {
        assert!((a - b).abs() < 1e-12);
    }
    // Dirac's condition is not met by the same tensor once moving
    let o = run(&["tensor", "--spin", "0,1,0", "--beta", "0.3,0,0", "--ssc", "dirac", "--json"]);
    assert!(json(&o)["residual_max"].as_f64().unwrap() > 1e-3);
}

#[test]
fn tensor_usage_errors() {
    assert_eq!(code(&run(&["tensor", "--spin", "(0,0,1)", "--beta", "(1,0,0)"])), 2);
    assert_eq!(code(&run(&["tensor", "--spin", "(0,0,1)", "--beta", "(0.8,0.8,0)"])), 2);
    assert_eq!(code(&run(&["tensor", "--spin", "(0,0)", "--beta", "(0,0,0)"])), 2);
    assert_eq!(code(&run(&["tensor", "--spin", "(0,0,x)", "--beta", "(0,0,0)"])), 2);
    assert_eq!(code(&run(&["tensor", "--spin", "(0,0,1)", "--beta", "(0,0,0)", "--ssc", "bogus"])), 2);
    assert_eq!(code(&run(&["tensor", "--spin", "(0,0,1)"])), 2);
}

#[test]
fn stdout_is_deterministic_unless_timestamped() {
    let p = fixtures().join("valid/all_terms_uniform.scn");
    let a = run(&["terms", s(&p)]);
    let b = run(&["terms", s(&p)]);
    assert_eq!(a.stdout, b.stdout);
    let t = run(&["--timestamps", "terms", s(&p)]);
    let plain = stdout(&a);
    let stamped = stdout(&t);
    assert!(stamped.starts_with(&plain));
    assert!(stamped[plain.len()..].starts_with("# finished at"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&[])), 2);
}
