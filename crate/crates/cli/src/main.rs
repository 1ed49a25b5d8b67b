use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{ArgGroup, Parser, Subcommand};
use hiddenspin::covariant::{
    boosted_spin, hidden_momentum_quantum, hidden_position_quantum, spin_tensor_from_vector,
    spin_vector_from_tensor, ssc_residual, SscKind,
};
use hiddenspin::dynamics::{acceleration, evolve, PrecessionDecomposition, TrajectoryRecord};
use hiddenspin::output::{write_trajectory, Format, OutputError};
use hiddenspin::scenario::{parse_scenario, parse_vector, Scenario};
use hiddenspin::verify::{run_all, run_suite, SuiteReport, DEFAULT_SAMPLES, DEFAULT_SEED};
use hiddenspin::{FourVector, TermBreakdown, Vec3};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hiddenspin", version, about = "Hidden-momentum spin energy terms and spin precession")]
struct Cli {
    /// Append wall-clock and elapsed time to the output.
    #[arg(long, global = true)]
    timestamps: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy terms and precession vectors for a scenario's particle.
    Terms {
        scenario: PathBuf,
        /// Field time at which to evaluate (defaults to t0).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Integrate a scenario and write its [output] files.
    Evolve {
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in identity suites.
    #[command(group(ArgGroup::new("which").required(true).args(["suite", "all"])))]
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
    /// Spin tensor of a boosted rest-frame spin and its supplementary-condition residual.
    Tensor {
        /// Rest-frame spin, `(sx,sy,sz)`.
        #[arg(long, allow_hyphen_values = true)]
        spin: String,
        /// Boost velocity in units of c, `(bx,by,bz)`.
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value = "moller")]
        ssc: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    Verification,
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(format!("write failed: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn load(path: &Path) -> CliResult<Scenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn vector_arg(name: &str, s: &str) -> CliResult<Vec3> {
    let s = s.trim();
    let wrapped = if s.starts_with('(') { s.to_string() } else { format!("({s})") };
    parse_vector(&wrapped).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn vec_cell(v: Vec3) -> String {
    format!("({:+.15e}, {:+.15e}, {:+.15e})", v.x, v.y, v.z)
}

fn emit_json(out: &mut impl Write, value: &serde_json::Value) -> CliResult {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json values serialize"))?;
    Ok(())
}

fn terms(out: &mut impl Write, path: &Path, at: Option<f64>, as_json: bool) -> CliResult {
    let s = load(path)?;
    let t = at.unwrap_or(s.integration.t0);
    if !t.is_finite() {
        return Err(CliError::Usage(format!("--at {t} is not finite")));
    }
    let prop = s.propagator();
    let st = s.state_at(t);
    let k = &s.constants;
    let runtime = |e: hiddenspin::Error| CliError::Runtime(e.to_string());
    let b = prop.terms_at(&st).map_err(runtime)?;
    let d = prop.precession_at(&st).map_err(runtime)?;
    let f = prop.sample(st.r, st.t).map_err(runtime)?;
    let sigma = st.bloch().map_err(runtime)?;
    let accel = acceleration(&f, st.p, k, prop.accel);
    let dr = hidden_position_quantum(sigma, st.velocity(k), k).map_err(runtime)?;
    let dp = hidden_momentum_quantum(sigma, accel, k);

    if as_json {
        return emit_json(
            out,
            &json!({
                "t": t,
                "sigma": sigma,
                "terms": b,
                "precession": d,
                "acceleration": accel,
                "hidden_position": dr,
                "hidden_momentum": dp,
            }),
        );
    }
    write_terms_table(out, t, sigma, &b, &d)?;
    writeln!(out)?;
    writeln!(out, "{:<16} {}", "acceleration", vec_cell(accel))?;
    writeln!(out, "{:<16} {}", "hidden position", vec_cell(dr))?;
    writeln!(out, "{:<16} {}", "hidden momentum", vec_cell(dp))?;
    Ok(())
}

fn write_terms_table(
    out: &mut impl Write,
    t: f64,
    sigma: Vec3,
    b: &TermBreakdown,
    d: &PrecessionDecomposition,
) -> CliResult {
    writeln!(out, "t = {t:?}")?;
    writeln!(out, "sigma = {}", vec_cell(sigma))?;
    writeln!(out)?;
    writeln!(out, "{:<8} {:>23}  precession vector", "term", "energy")?;
    let rows = [
        ("h0", b.h0, None),
        ("so", b.so, Some(d.omega_so)),
        ("h1", b.h1, Some(d.omega_h1)),
        ("h2", b.h2, Some(d.omega_h2)),
        ("dv", b.dv, Some(d.omega_dv)),
        ("zeeman", b.zeeman, Some(d.omega_zeeman)),
        ("total", b.total, Some(d.omega_total)),
    ];
    for (name, energy, omega) in rows {
        let omega = omega.map(vec_cell).unwrap_or_default();
        writeln!(out, "{name:<8} {energy:>+23.15e}  {omega}")?;
    }
    Ok(())
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn write_file(path: &Path, rec: &TrajectoryRecord, fmt: Format) -> CliResult {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
    }
    let file = File::create(path)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    match write_trajectory(rec, fmt, &mut w) {
        Ok(()) => {}
        Err(OutputError::EmptyRecord) => return Ok(()),
        Err(e) => return Err(CliError::Runtime(format!("{}: {e}", path.display()))),
    }
    w.flush()
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn evolve_cmd(out: &mut impl Write, path: &Path, as_json: bool) -> CliResult {
    let s = load(path)?;
    let (rec, abort) = match evolve(&s) {
        Ok(rec) => (rec, None),
        Err(e) => (e.partial.clone(), Some(e)),
    };

    let base = path.parent().unwrap_or(Path::new("."));
    let mut written = Vec::new();
    for (target, fmt) in [(&s.output.csv, Format::Csv), (&s.output.jsonl, Format::Jsonl)] {
        if let Some(p) = target {
            let full = resolve(base, p);
            write_file(&full, &rec, fmt)?;
            written.push(full);
        }
    }

    let p0 = s.particle.momentum.norm();
    let last = rec.last();
    if as_json {
        emit_json(
            out,
            &json!({
                "completed": abort.is_none(),
                "error": abort.as_ref().map(|e| e.error.to_string()),
                "steps": rec.steps,
                "samples": rec.samples.len(),
                "max_norm_drift": rec.max_norm_drift,
                "initial_momentum_norm": p0,
                "final": last,
                "outputs": written,
            }),
        )?;
    } else {
        writeln!(out, "status          {}", if abort.is_none() { "completed" } else { "aborted" })?;
        writeln!(out, "steps           {}", rec.steps)?;
        writeln!(out, "samples         {}", rec.samples.len())?;
        writeln!(out, "max norm drift  {:.3e}", rec.max_norm_drift)?;
        if let Some(l) = last {
            writeln!(out, "final t         {:?}", l.t)?;
            writeln!(out, "final r         {}", vec_cell(l.r))?;
            writeln!(out, "final p         {}", vec_cell(l.p))?;
            writeln!(out, "final sigma     {}", vec_cell(l.sigma))?;
            writeln!(out, "final total     {:+.15e}", l.terms.total)?;
            writeln!(out, "|p| change      {:+.3e}", l.p.norm() - p0)?;
        }
        for w in &written {
            writeln!(out, "wrote           {}", w.display())?;
        }
    }
    match abort {
        None => Ok(()),
        Some(e) => Err(CliError::Runtime(e.to_string())),
    }
}

fn verify_cmd(
    out: &mut impl Write,
    suite: Option<&str>,
    seed: u64,
    samples: usize,
    as_json: bool,
) -> CliResult {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let reports: Vec<SuiteReport> = match suite {
        Some(name) => vec![run_suite(name, seed, samples).map_err(|e| CliError::Usage(e.to_string()))?],
        None => run_all(seed, samples).map_err(|e| CliError::Runtime(e.to_string()))?,
    };
    let passed = reports.iter().all(SuiteReport::passed);
    if as_json {
        emit_json(out, &json!({ "seed": seed, "samples": samples, "passed": passed, "suites": reports }))?;
    } else {
        for rep in &reports {
            for c in &rep.checks {
                writeln!(
                    out,
                    "{} {:<16} {:<48} max residual {:.3e}  tol {:.0e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    rep.suite,
                    c.name,
                    c.max_residual,
                    c.tolerance
                )?;
            }
        }
        writeln!(out, "{}", if passed { "all checks passed" } else { "some checks failed" })?;
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn tensor_cmd(out: &mut impl Write, spin: &str, beta: &str, ssc: &str, as_json: bool) -> CliResult {
    let spin = vector_arg("spin", spin)?;
    let beta = vector_arg("beta", beta)?;
    let kind: SscKind = ssc
        .parse()
        .map_err(|e: hiddenspin::Error| CliError::Usage(format!("--ssc: {e}")))?;
    let usage = |e: hiddenspin::Error| CliError::Usage(e.to_string());
    let u = FourVector::four_velocity(beta).map_err(usage)?;
    let s4 = boosted_spin(spin, beta).map_err(usage)?;
    let runtime = |e: hiddenspin::Error| CliError::Runtime(e.to_string());
    let t = spin_tensor_from_vector(&s4, &u).map_err(runtime)?;
    let back = spin_vector_from_tensor(&t, &u).map_err(runtime)?;
    let res = ssc_residual(&t, &u, kind).map_err(runtime)?;
    let kind_name = match kind {
        SscKind::Moller => "moller",
        SscKind::Dirac => "dirac",
    };

    if as_json {
        return emit_json(
            out,
            &json!({
                "four_velocity": u.0,
                "spin_vector": s4.0,
                "tensor": t.to_matrix(),
                "round_trip": back.0,
                "ssc": kind_name,
                "residual": res.components(),
                "residual_max": res.max_abs(),
            }),
        );
    }
    let four = |v: [f64; 4]| {
        v.iter().map(|x| format!("{x:+.15e}")).collect::<Vec<_>>().join("  ")
    };
    writeln!(out, "U^mu       {}", four(u.0))?;
    writeln!(out, "S^mu       {}", four(s4.0))?;
    writeln!(out, "S^{{mu nu}}")?;
    for row in t.to_matrix() {
        writeln!(out, "           {}", four(row))?;
    }
    writeln!(out, "round trip {}", four(back.0))?;
    let comps = res.components().iter().map(|x| format!("{x:+.15e}")).collect::<Vec<_>>().join("  ");
    writeln!(out, "{kind_name} residual  {comps}")?;
    writeln!(out, "max |residual|   {:.3e}", res.max_abs())?;
    Ok(())
}

fn run(cli: &Cli, out: &mut impl Write) -> CliResult {
    match &cli.command {
        Command::Terms { scenario, at, json } => terms(out, scenario, *at, *json),
        Command::Evolve { scenario, json } => evolve_cmd(out, scenario, *json),
        Command::Verify { suite, all: _, seed, samples, json } => {
            verify_cmd(out, suite.as_deref(), *seed, *samples, *json)
        }
        Command::Tensor { spin, beta, ssc, json } => tensor_cmd(out, spin, beta, ssc, *json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    if cli.timestamps {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        let _ = writeln!(out, "# finished at unix {}.{:03}, elapsed {:.3?}", now.as_secs(), now.subsec_millis(), start.elapsed());
    }
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verification) {
                eprintln!("hiddenspin: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
