//! Scenario files.
//!
//! INI-style text with the sections `[constants]`, `[field]`, `[particle]`,
//! `[terms]`, `[integration]` and `[output]`. Each entry is `key = value`;
//! vectors are written `(a, b, c)`; `#` starts a comment. Keys are
//! case-sensitive and unknown keys are rejected.
//!
//! ```text
//! [field]
//! family = plane_wave_circular
//! e0 = 0.1
//! omega = 1
//! helicity = 1
//!
//! [particle]
//! position = (0, 0, 0)
//! momentum = (0, 0, 0)
//! spin = (1, 0, 0)
//!
//! [terms]
//! h1 = true
//!
//! [integration]
//! t1 = 62.83185307179586
//! dt = 0.01
//! ```
//!
//! Required: `field.family` with its parameters, `particle.position`,
//! `particle.momentum`, `particle.spin`, `integration.t1`, `integration.dt`.
//! Everything else has a default (`ħ = m = c = 1`, `e = -1`, all terms off,
//! `acceleration = total_force`, `t0 = 0`, `sample_every = 1`,
//! `r_min = 1e-6`, no output files).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use crate::covariant::Constants;
use crate::dynamics::{AccelerationChoice, Propagator};
use crate::fields::{FieldConfiguration, FieldFamily};
use crate::hamiltonian::{ParticleState, TermMask};
use crate::math::{Spinor, Vec3};

/// Bloch vectors within this distance of unit length are renormalized.
pub const SPIN_NORM_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSection,
    UnknownKey,
    DuplicateKey,
    MissingKey,
    NonFinite,
    Constraint,
    Normalization,
}

impl ParseErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownSection => "unknown-section",
            ParseErrorKind::UnknownKey => "unknown-key",
            ParseErrorKind::DuplicateKey => "duplicate-key",
            ParseErrorKind::MissingKey => "missing-key",
            ParseErrorKind::NonFinite => "non-finite",
            ParseErrorKind::Constraint => "constraint",
            ParseErrorKind::Normalization => "normalization",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind} error: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, line: usize, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line,
            message: message.into(),
        }
    }
}

type ParseResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialParticle {
    pub position: Vec3,
    pub momentum: Vec3,
    /// Unit Bloch vector.
    pub spin: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integration {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub r_min: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub constants: Constants,
    pub field: FieldConfiguration,
    pub particle: InitialParticle,
    pub mask: TermMask,
    pub acceleration: AccelerationChoice,
    pub integration: Integration,
    pub output: OutputSpec,
}

impl Scenario {
    pub fn propagator(&self) -> Propagator {
        Propagator {
            field: self.field,
            constants: self.constants,
            mask: self.mask,
            accel: self.acceleration,
            r_min: self.integration.r_min,
        }
    }

    /// Particle state at `t0`.
    pub fn initial_state(&self) -> ParticleState {
        self.state_at(self.integration.t0)
    }

    pub fn state_at(&self, t: f64) -> ParticleState {
        let spinor = Spinor::from_bloch(self.particle.spin).expect("spin validated on parse");
        ParticleState::new(self.particle.position, self.particle.momentum, t, spinor)
    }

    /// Canonical text form; parsing it yields an equal scenario.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let k = &self.constants;
        let _ = writeln!(s, "[constants]");
        let _ = writeln!(s, "hbar = {:?}\nm = {:?}\nc = {:?}\ne = {:?}\n", k.hbar, k.m, k.c, k.e);
        let _ = writeln!(s, "[field]\nfamily = {}", self.field.family().name());
        match self.field {
            FieldConfiguration::CoulombPotential { z } => {
                let _ = writeln!(s, "z = {z:?}");
            }
            FieldConfiguration::UniformStatic { e, b } => {
                let _ = writeln!(s, "e_field = {}\nb_field = {}", fmt_vec(e), fmt_vec(b));
            }
            FieldConfiguration::PlaneWaveCircular { e0, omega, helicity } => {
                let _ = writeln!(s, "e0 = {e0:?}\nomega = {omega:?}\nhelicity = {helicity}");
            }
            FieldConfiguration::PlaneWaveLinear { e0, omega } => {
                let _ = writeln!(s, "e0 = {e0:?}\nomega = {omega:?}");
            }
        }
        let p = &self.particle;
        let _ = writeln!(
            s,
            "\n[particle]\nposition = {}\nmomentum = {}\nspin = {}\n",
            fmt_vec(p.position),
            fmt_vec(p.momentum),
            fmt_vec(p.spin)
        );
        let m = &self.mask;
        let _ = writeln!(
            s,
            "[terms]\nso = {}\nh1 = {}\nh2 = {}\ndv = {}\nzeeman = {}\nacceleration = {}\n",
            m.so,
            m.h1,
            m.h2,
            m.dv,
            m.zeeman,
            self.acceleration.name()
        );
        let i = &self.integration;
        let _ = writeln!(
            s,
            "[integration]\nt0 = {:?}\nt1 = {:?}\ndt = {:?}\nsample_every = {}\nr_min = {:?}",
            i.t0, i.t1, i.dt, i.sample_every, i.r_min
        );
        if self.output.csv.is_some() || self.output.jsonl.is_some() {
            let _ = writeln!(s, "\n[output]");
            if let Some(p) = &self.output.csv {
                let _ = writeln!(s, "csv = {}", p.display());
            }
            if let Some(p) = &self.output.jsonl {
                let _ = writeln!(s, "jsonl = {}", p.display());
            }
        }
        s
    }
}

pub fn fmt_vec(v: Vec3) -> String {
    format!("({:?}, {:?}, {:?})", v.x, v.y, v.z)
}

const SECTIONS: [&str; 6] = ["constants", "field", "particle", "terms", "integration", "output"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "constants" => &["hbar", "m", "c", "e"],
        "field" => &["family", "z", "e_field", "b_field", "e0", "omega", "helicity"],
        "particle" => &["position", "momentum", "spin"],
        "terms" => &["so", "h1", "h2", "dv", "zeeman", "acceleration"],
        "integration" => &["t0", "t1", "dt", "sample_every", "r_min"],
        "output" => &["csv", "jsonl"],
        _ => &[],
    }
}

struct Entry {
    line: usize,
    value: String,
}

/// Raw `section.key -> value` table with line numbers.
struct Table {
    entries: BTreeMap<(String, String), Entry>,
    section_lines: BTreeMap<String, usize>,
    last_line: usize,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn tokenize(text: &str) -> ParseResult<Table> {
    use ParseErrorKind::*;
    let mut table = Table {
        entries: BTreeMap::new(),
        section_lines: BTreeMap::new(),
        last_line: 0,
    };
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        table.last_line = line;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| is_identifier(n))
                .ok_or_else(|| ParseError::new(Syntax, line, format!("malformed section header '{content}'")))?;
            if !SECTIONS.contains(&name) {
                return Err(ParseError::new(UnknownSection, line, format!("unknown section [{name}]")));
            }
            table.section_lines.entry(name.to_string()).or_insert(line);
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ParseError::new(Syntax, line, format!("expected 'key = value', found '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !is_identifier(key) {
            return Err(ParseError::new(Syntax, line, format!("invalid key '{key}'")));
        }
        if value.is_empty() {
            return Err(ParseError::new(Syntax, line, format!("missing value for '{key}'")));
        }
        let sec = section
            .clone()
            .ok_or_else(|| ParseError::new(Syntax, line, format!("key '{key}' outside any section")))?;
        if !allowed_keys(&sec).contains(&key) {
            return Err(ParseError::new(UnknownKey, line, format!("unknown key '{key}' in [{sec}]")));
        }
        let slot = (sec.clone(), key.to_string());
        if let Some(prev) = table.entries.get(&slot) {
            return Err(ParseError::new(
                DuplicateKey,
                line,
                format!("'{key}' in [{sec}] already set on line {}", prev.line),
            ));
        }
        table.entries.insert(
            slot,
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(table)
}

fn parse_number(s: &str, key: &str, line: usize) -> ParseResult<f64> {
    let v: f64 = s.trim().parse().map_err(|_| {
        ParseError::new(ParseErrorKind::Syntax, line, format!("'{key}': '{}' is not a number", s.trim()))
    })?;
    if !v.is_finite() {
        return Err(ParseError::new(
            ParseErrorKind::NonFinite,
            line,
            format!("'{key}': '{}' is not finite", s.trim()),
        ));
    }
    Ok(v)
}

/// Parses `(a, b, c)`.
pub fn parse_vector(s: &str) -> std::result::Result<Vec3, String> {
    parse_vector_at(s, "vector", 0).map_err(|e| e.message)
}

fn parse_vector_at(s: &str, key: &str, line: usize) -> ParseResult<Vec3> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseError::new(ParseErrorKind::Syntax, line, format!("'{key}': expected (x, y, z)")))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(ParseError::new(
            ParseErrorKind::Syntax,
            line,
            format!("'{key}': expected 3 components, found {}", parts.len()),
        ));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_number(p, key, line)?;
    }
    Ok(Vec3::from(out))
}

struct Reader<'a> {
    table: &'a Table,
}

impl Reader<'_> {
    fn entry(&self, sec: &str, key: &str) -> Option<&Entry> {
        self.table.entries.get(&(sec.to_string(), key.to_string()))
    }

    fn line_of(&self, sec: &str, key: &str) -> usize {
        self.entry(sec, key).map(|e| e.line).unwrap_or(0)
    }

    fn missing(&self, sec: &str, key: &str) -> ParseError {
        let line = self
            .table
            .section_lines
            .get(sec)
            .copied()
            .unwrap_or(self.table.last_line.max(1));
        ParseError::new(ParseErrorKind::MissingKey, line, format!("missing required key '{key}' in [{sec}]"))
    }

    fn number(&self, sec: &str, key: &str) -> ParseResult<Option<f64>> {
        self.entry(sec, key)
            .map(|e| parse_number(&e.value, key, e.line))
            .transpose()
    }

    fn require_number(&self, sec: &str, key: &str) -> ParseResult<f64> {
        self.number(sec, key)?.ok_or_else(|| self.missing(sec, key))
    }

    fn vector(&self, sec: &str, key: &str) -> ParseResult<Option<Vec3>> {
        self.entry(sec, key)
            .map(|e| parse_vector_at(&e.value, key, e.line))
            .transpose()
    }

    fn require_vector(&self, sec: &str, key: &str) -> ParseResult<Vec3> {
        self.vector(sec, key)?.ok_or_else(|| self.missing(sec, key))
    }

    fn boolean(&self, sec: &str, key: &str) -> ParseResult<bool> {
        match self.entry(sec, key) {
            None => Ok(false),
            Some(e) => match e.value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    e.line,
                    format!("'{key}': expected true or false, found '{other}'"),
                )),
            },
        }
    }

    fn integer(&self, sec: &str, key: &str) -> ParseResult<Option<(i64, usize)>> {
        self.entry(sec, key)
            .map(|e| {
                let v = e.value.strip_prefix('+').unwrap_or(&e.value);
                v.parse::<i64>().map(|n| (n, e.line)).map_err(|_| {
                    ParseError::new(
                        ParseErrorKind::Syntax,
                        e.line,
                        format!("'{key}': '{}' is not an integer", e.value),
                    )
                })
            })
            .transpose()
    }

    /// Rejects keys that do not belong to the selected field family.
    fn reject_foreign(&self, family: FieldFamily, allowed: &[&str]) -> ParseResult<()> {
        for key in allowed_keys("field") {
            if *key == "family" || allowed.contains(key) {
                continue;
            }
            if let Some(e) = self.entry("field", key) {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownKey,
                    e.line,
                    format!("'{key}' is not a parameter of {}", family.name()),
                ));
            }
        }
        Ok(())
    }
}

fn constraint(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Constraint, line, msg)
}

fn parse_constants(rd: &Reader) -> ParseResult<Constants> {
    let mut k = Constants::default();
    for (key, slot) in [("hbar", &mut k.hbar), ("m", &mut k.m), ("c", &mut k.c)] {
        if let Some(v) = rd.number("constants", key)? {
            if v <= 0.0 {
                return Err(constraint(rd.line_of("constants", key), format!("'{key}' must be > 0")));
            }
            *slot = v;
        }
    }
    if let Some(e) = rd.number("constants", "e")? {
        k.e = e;
    }
    Ok(k)
}

fn parse_field(rd: &Reader) -> ParseResult<FieldConfiguration> {
    let entry = rd.entry("field", "family").ok_or_else(|| rd.missing("field", "family"))?;
    let family: FieldFamily = entry.value.parse().map_err(|_| {
        constraint(entry.line, format!("unknown field family '{}'", entry.value))
    })?;
    let non_negative = |key: &str, v: f64| {
        if v < 0.0 {
            Err(constraint(rd.line_of("field", key), format!("'{key}' must be >= 0")))
        } else {
            Ok(v)
        }
    };
    let positive = |key: &str, v: f64| {
        if v <= 0.0 {
            Err(constraint(rd.line_of("field", key), format!("'{key}' must be > 0")))
        } else {
            Ok(v)
        }
    };
    let cfg = match family {
        FieldFamily::CoulombPotential => {
            rd.reject_foreign(family, &["z"])?;
            FieldConfiguration::CoulombPotential {
                z: rd.require_number("field", "z")?,
            }
        }
        FieldFamily::UniformStatic => {
            rd.reject_foreign(family, &["e_field", "b_field"])?;
            FieldConfiguration::UniformStatic {
                e: rd.vector("field", "e_field")?.unwrap_or_default(),
                b: rd.vector("field", "b_field")?.unwrap_or_default(),
            }
        }
        FieldFamily::PlaneWaveCircular => {
            rd.reject_foreign(family, &["e0", "omega", "helicity"])?;
            let helicity = match rd.integer("field", "helicity")? {
                None => 1,
                Some((h @ (1 | -1), _)) => h as i8,
                Some((_, line)) => return Err(constraint(line, "'helicity' must be +1 or -1")),
            };
            FieldConfiguration::PlaneWaveCircular {
                e0: non_negative("e0", rd.require_number("field", "e0")?)?,
                omega: positive("omega", rd.require_number("field", "omega")?)?,
                helicity,
            }
        }
        FieldFamily::PlaneWaveLinear => {
            rd.reject_foreign(family, &["e0", "omega"])?;
            FieldConfiguration::PlaneWaveLinear {
                e0: non_negative("e0", rd.require_number("field", "e0")?)?,
                omega: positive("omega", rd.require_number("field", "omega")?)?,
            }
        }
    };
    Ok(cfg)
}

fn parse_particle(rd: &Reader, k: &Constants) -> ParseResult<InitialParticle> {
    let position = rd.require_vector("particle", "position")?;
    let momentum = rd.require_vector("particle", "momentum")?;
    let speed = momentum.norm() / k.m;
    if speed.is_nan() || speed >= k.c {
        return Err(constraint(
            rd.line_of("particle", "momentum"),
            "initial speed |p|/m must be below c",
        ));
    }
    let raw = rd.require_vector("particle", "spin")?;
    let norm = raw.norm();
    if (norm - 1.0).abs() > SPIN_NORM_BAND {
        return Err(ParseError::new(
            ParseErrorKind::Normalization,
            rd.line_of("particle", "spin"),
            format!("spin Bloch vector has norm {norm}, outside 1 ± {SPIN_NORM_BAND}"),
        ));
    }
    // Leave vectors that are already unit to rounding untouched so that
    // canonical text round-trips bit-exactly.
    let spin = if (norm - 1.0).abs() <= 1e-15 { raw } else { raw / norm };
    Ok(InitialParticle {
        position,
        momentum,
        spin,
    })
}

fn parse_terms(rd: &Reader) -> ParseResult<(TermMask, AccelerationChoice)> {
    let mask = TermMask {
        so: rd.boolean("terms", "so")?,
        h1: rd.boolean("terms", "h1")?,
        h2: rd.boolean("terms", "h2")?,
        dv: rd.boolean("terms", "dv")?,
        zeeman: rd.boolean("terms", "zeeman")?,
    };
    let accel = match rd.entry("terms", "acceleration") {
        None => AccelerationChoice::default(),
        Some(e) => match e.value.as_str() {
            "total_force" => AccelerationChoice::TotalForce,
            "electric_only" => AccelerationChoice::ElectricOnly,
            other => {
                return Err(constraint(
                    e.line,
                    format!("'acceleration' must be total_force or electric_only, found '{other}'"),
                ))
            }
        },
    };
    Ok((mask, accel))
}

fn parse_integration(rd: &Reader) -> ParseResult<Integration> {
    let sec = "integration";
    let t0 = rd.number(sec, "t0")?.unwrap_or(0.0);
    let t1 = rd.require_number(sec, "t1")?;
    let dt = rd.require_number(sec, "dt")?;
    if t1 <= t0 {
        return Err(constraint(rd.line_of(sec, "t1"), "'t1' must be greater than 't0'"));
    }
    if dt <= 0.0 {
        return Err(constraint(rd.line_of(sec, "dt"), "'dt' must be > 0"));
    }
    if dt > t1 - t0 {
        return Err(constraint(rd.line_of(sec, "dt"), "'dt' must not exceed t1 - t0"));
    }
    let sample_every = match rd.integer(sec, "sample_every")? {
        None => 1,
        Some((n, _)) if n >= 1 => n as usize,
        Some((_, line)) => return Err(constraint(line, "'sample_every' must be >= 1")),
    };
    let r_min = rd.number(sec, "r_min")?.unwrap_or(1e-6);
    if r_min <= 0.0 {
        return Err(constraint(rd.line_of(sec, "r_min"), "'r_min' must be > 0"));
    }
    Ok(Integration {
        t0,
        t1,
        dt,
        sample_every,
        r_min,
    })
}

pub fn parse_scenario(text: &str) -> ParseResult<Scenario> {
    let table = tokenize(text)?;
    let rd = Reader { table: &table };
    let constants = parse_constants(&rd)?;
    let field = parse_field(&rd)?;
    let particle = parse_particle(&rd, &constants)?;
    let (mask, acceleration) = parse_terms(&rd)?;
    let integration = parse_integration(&rd)?;
    let output = OutputSpec {
        csv: rd.entry("output", "csv").map(|e| PathBuf::from(&e.value)),
        jsonl: rd.entry("output", "jsonl").map(|e| PathBuf::from(&e.value)),
    };
    Ok(Scenario {
        constants,
        field,
        particle,
        mask,
        acceleration,
        integration,
        output,
    })
}
