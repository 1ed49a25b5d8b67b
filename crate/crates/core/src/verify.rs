//! Self-contained identity suites with seeded random populations.
//!
//! Residuals between two routes to the same energy are measured as
//! `|a - b| / max(1, |b|)` in normalized units (`ħ = m = c = 1`, `e = -1`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covariant::{
    hidden_momentum_classical, hidden_momentum_quantum, hidden_position_classical,
    hidden_position_quantum, Constants,
};
use crate::error::{Error, Result};
use crate::fields::{check_coulomb_gauge, check_field_consistency, sample, FieldConfiguration, FieldSample};
use crate::hamiltonian::{
    delta_h1_from_sigma, delta_h1_via_hidden_momentum, delta_h2_electric, delta_h2_from_sigma,
    delta_h2_via_hidden_momentum, delta_v_from_sigma, moment_product_from_sigma, spin_orbit_sigma_rv,
    spin_orbit_sl,
};
use crate::math::Vec3;

pub const DEFAULT_SEED: u64 = 0x5eed_2016;
pub const DEFAULT_SAMPLES: usize = 10_000;

pub const SUITES: [&str; 7] = [
    "eq13-forms",
    "eq14-eq15-route",
    "eq16-identity",
    "eq17-eq18-route",
    "ssc-factor-half",
    "c-scaling",
    "gauge",
];

/// Tolerances for each identity.
pub mod tol {
    /// Moment product against the coefficient form of `ΔH₁`.
    pub const MOMENT_PRODUCT: f64 = 1e-14;
    /// Spin-orbit printed forms and the potential-shift route.
    pub const SPIN_ORBIT_FORMS: f64 = 1e-13;
    /// Hidden-momentum routes against closed forms.
    pub const ROUTES: f64 = 1e-14;
    /// Quantum/classical ratio against `-1/2`.
    pub const SSC_RATIO: f64 = 1e-15;
    /// Relative deviation from a factor 100 under `c → 10c`.
    pub const C_SCALING: f64 = 1e-12;
    /// Finite-difference gauge and field residuals at `h = 1e-4`.
    pub const GAUGE: f64 = 1e-6;
    pub const FD_STEP: f64 = 1e-4;
    /// Radius below which random states are excluded from spin-orbit checks.
    pub const MIN_RADIUS: f64 = 0.1;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// One random point of the test population.
#[derive(Debug, Clone, Copy)]
pub struct RandomCase {
    pub sigma: Vec3,
    pub r: Vec3,
    pub p: Vec3,
    /// Random `E`, `A`, `B` with a Coulomb `V`, `∇V` at `r`.
    pub field: FieldSample,
    pub accel: Vec3,
}

fn uniform_vec(rng: &mut ChaCha8Rng, half_width: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-half_width..half_width),
        rng.gen_range(-half_width..half_width),
        rng.gen_range(-half_width..half_width),
    )
}

fn unit_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = uniform_vec(rng, 1.0);
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random population in normalized units with `|r| > min_radius` and
/// `|v| < 0.9 c`.
pub fn population(seed: u64, count: usize, min_radius: f64) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = Constants::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = uniform_vec(&mut rng, 2.0);
        if r.norm() <= min_radius {
            continue;
        }
        let p = unit_vec(&mut rng) * rng.gen_range(0.0..0.9);
        let z = rng.gen_range(0.5..2.0);
        let coulomb = sample(&FieldConfiguration::CoulombPotential { z }, r, 0.0, &k)
            .expect("radius is bounded away from zero");
        let field = FieldSample {
            e: uniform_vec(&mut rng, 1.0),
            a: uniform_vec(&mut rng, 1.0),
            b: uniform_vec(&mut rng, 1.0),
            ..coulomb
        };
        out.push(RandomCase {
            sigma: unit_vec(&mut rng),
            r,
            p,
            field,
            accel: uniform_vec(&mut rng, 1.0),
        });
    }
    out
}

pub fn mixed_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn spin_orbit_forms(cases: &[RandomCase], k: &Constants) -> Result<Vec<Check>> {
    let mut forms = 0.0_f64;
    let mut shift = 0.0_f64;
    for c in cases {
        let sl = spin_orbit_sl(c.sigma, c.r, c.p, &c.field, k)?;
        let rv = spin_orbit_sigma_rv(c.sigma, c.r, c.p / k.m, &c.field, k)?;
        let dv = delta_v_from_sigma(c.sigma, c.r, c.p / k.m, &c.field, k)?;
        forms = forms.max(mixed_residual(rv, sl));
        shift = shift.max(mixed_residual(dv, sl));
    }
    Ok(vec![
        Check::new("S·L form = σ·(r×v) form", forms, tol::SPIN_ORBIT_FORMS),
        Check::new("potential shift = spin-orbit", shift, tol::SPIN_ORBIT_FORMS),
    ])
}

fn h1_route(cases: &[RandomCase], k: &Constants) -> Vec<Check> {
    let worst = cases
        .iter()
        .map(|c| {
            mixed_residual(
                delta_h1_via_hidden_momentum(c.sigma, &c.field, k),
                delta_h1_from_sigma(c.sigma, &c.field, k),
            )
        })
        .fold(0.0, f64::max);
    vec![Check::new("-eA·ΔP/m = (e²ħ/4m²c²) σ·(E×A)", worst, tol::ROUTES)]
}

fn moment_product_identity(cases: &[RandomCase], k: &Constants) -> Vec<Check> {
    let worst = cases
        .iter()
        .map(|c| {
            mixed_residual(
                moment_product_from_sigma(c.sigma, &c.field, k).dot,
                delta_h1_from_sigma(c.sigma, &c.field, k),
            )
        })
        .fold(0.0, f64::max);
    vec![Check::new("M_em·M_e = ΔH₁", worst, tol::MOMENT_PRODUCT)]
}

fn h2_routes(cases: &[RandomCase], k: &Constants) -> Vec<Check> {
    let mut electric = 0.0_f64;
    let mut hidden = 0.0_f64;
    for c in cases {
        let p_can = c.p + c.field.a * k.e;
        let a_e = c.field.e * (k.e / k.m);
        let general = delta_h2_from_sigma(c.sigma, a_e, p_can, k);
        electric = electric.max(mixed_residual(general, delta_h2_electric(c.sigma, c.field.e, p_can, k)));
        let any_a = delta_h2_from_sigma(c.sigma, c.accel, p_can, k);
        hidden = hidden.max(mixed_residual(
            delta_h2_via_hidden_momentum(c.sigma, c.accel, p_can, k),
            any_a,
        ));
    }
    vec![
        Check::new("-ħσ·(a×P)/4mc² at a=eE/m = -eħσ·(E×P)/4m²c²", electric, tol::ROUTES),
        Check::new("P·ΔP/m = -ħσ·(a×P)/4mc²", hidden, tol::ROUTES),
    ]
}

/// Largest `|q_i/c_i + 1/2|` over components where the classical value is
/// not negligible.
fn ratio_deviation(q: Vec3, c: Vec3) -> f64 {
    let scale = c.max_abs();
    q.to_array()
        .iter()
        .zip(c.to_array())
        .filter(|(_, ci)| ci.abs() > 1e-3 * scale)
        .map(|(qi, ci)| (qi / ci + 0.5).abs())
        .fold(0.0, f64::max)
}

fn ssc_factor(cases: &[RandomCase], k: &Constants) -> Result<Vec<Check>> {
    let mut pos = 0.0_f64;
    let mut mom = 0.0_f64;
    for c in cases {
        let v = c.p / k.m;
        let spin = k.spin_of(c.sigma);
        let q = hidden_position_quantum(c.sigma, v, k)?;
        let cl = hidden_position_classical(spin, v, k)?;
        pos = pos.max(ratio_deviation(q, cl));
        let qm = hidden_momentum_quantum(c.sigma, c.accel, k);
        let cm = hidden_momentum_classical(spin, c.accel * k.m, k);
        mom = mom.max(ratio_deviation(qm, cm));
    }
    Ok(vec![
        Check::new("hidden position quantum/classical = -1/2", pos, tol::SSC_RATIO),
        Check::new("hidden momentum quantum/classical = -1/2", mom, tol::SSC_RATIO),
    ])
}

/// `|x(c) / (100 x(10c)) - 1|`, zero when both vanish.
fn scaling_deviation(at_c: f64, at_10c: f64) -> f64 {
    if at_c == 0.0 && at_10c == 0.0 {
        return 0.0;
    }
    (at_c / (100.0 * at_10c) - 1.0).abs()
}

fn vec_scaling_deviation(at_c: Vec3, at_10c: Vec3) -> f64 {
    scaling_deviation(at_c.norm(), at_10c.norm())
}

fn c_scaling(cases: &[RandomCase], k: &Constants) -> Result<Vec<Check>> {
    let k10 = k.with_c(10.0 * k.c);
    let mut worst = [0.0_f64; 6];
    for c in cases {
        let v = c.p / k.m;
        let p_can = c.p + c.field.a * k.e;
        let pair = |kk: &Constants| -> Result<[f64; 4]> {
            Ok([
                spin_orbit_sl(c.sigma, c.r, c.p, &c.field, kk)?,
                delta_h1_from_sigma(c.sigma, &c.field, kk),
                delta_h2_from_sigma(c.sigma, c.accel, p_can, kk),
                delta_v_from_sigma(c.sigma, c.r, v, &c.field, kk)?,
            ])
        };
        let (lo, hi) = (pair(k)?, pair(&k10)?);
        for i in 0..4 {
            worst[i] = worst[i].max(scaling_deviation(lo[i], hi[i]));
        }
        worst[4] = worst[4].max(vec_scaling_deviation(
            hidden_position_quantum(c.sigma, v, k)?,
            hidden_position_quantum(c.sigma, v, &k10)?,
        ));
        worst[5] = worst[5].max(vec_scaling_deviation(
            hidden_momentum_quantum(c.sigma, c.accel, k),
            hidden_momentum_quantum(c.sigma, c.accel, &k10),
        ));
    }
    let names = ["so", "h1", "h2", "dv", "hidden position", "hidden momentum"];
    Ok(names
        .iter()
        .zip(worst)
        .map(|(n, w)| Check::new(format!("{n} ∝ c⁻²"), w, tol::C_SCALING))
        .collect())
}

/// Built-in field families with representative parameters.
pub fn reference_fields() -> [FieldConfiguration; 4] {
    [
        FieldConfiguration::CoulombPotential { z: 1.0 },
        FieldConfiguration::UniformStatic {
            e: Vec3::new(0.3, -0.2, 0.1),
            b: Vec3::new(0.4, 0.5, -1.2),
        },
        FieldConfiguration::PlaneWaveCircular {
            e0: 0.7,
            omega: 1.3,
            helicity: 1,
        },
        FieldConfiguration::PlaneWaveLinear { e0: 0.7, omega: 1.3 },
    ]
}

/// Random `(r, t)` points in a shell `0.5 < |r| < 2`, `t ∈ [0, 10)`.
pub fn field_points(seed: u64, count: usize) -> Vec<(Vec3, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = uniform_vec(&mut rng, 2.0);
        let n = r.norm();
        if n > 0.5 && n < 2.0 {
            out.push((r, rng.gen_range(0.0..10.0)));
        }
    }
    out
}

fn gauge(seed: u64) -> Result<Vec<Check>> {
    let k = Constants::default();
    let pts = field_points(seed, 100);
    let mut checks = Vec::new();
    for cfg in reference_fields() {
        let name = cfg.family().name();
        let div = check_coulomb_gauge(&cfg, &pts, tol::FD_STEP, &k)?;
        checks.push(Check::new(format!("{name}: ∇·A = 0"), div, tol::GAUGE));
        let cons = check_field_consistency(&cfg, &pts, tol::FD_STEP, &k)?;
        if let Some(e) = cons.e_residual {
            checks.push(Check::new(format!("{name}: E = -(1/c)∂A/∂t"), e, tol::GAUGE));
        }
        checks.push(Check::new(format!("{name}: B = ∇×A"), cons.b_residual, tol::GAUGE));
    }
    Ok(checks)
}

pub fn run_suite(name: &str, seed: u64, samples: usize) -> Result<SuiteReport> {
    let k = Constants::default();
    let cases = || population(seed, samples, tol::MIN_RADIUS);
    let checks = match name {
        "eq13-forms" => spin_orbit_forms(&cases(), &k)?,
        "eq14-eq15-route" => h1_route(&cases(), &k),
        "eq16-identity" => moment_product_identity(&cases(), &k),
        "eq17-eq18-route" => h2_routes(&cases(), &k),
        "ssc-factor-half" => ssc_factor(&cases(), &k)?,
        "c-scaling" => c_scaling(&cases(), &k)?,
        "gauge" => gauge(seed)?,
        other => return Err(Error::Argument(format!("unknown suite '{other}'"))),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}

/// Runs every suite concurrently; reports come back in [`SUITES`] order.
pub fn run_all(seed: u64, samples: usize) -> Result<Vec<SuiteReport>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = SUITES
            .iter()
            .map(|name| scope.spawn(move || run_suite(name, seed, samples)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nonexistent", 1, 10), Err(Error::Argument(_))));
    }

    #[test]
    fn population_respects_bounds() {
        for c in population(3, 500, 0.1) {
            assert!(c.r.norm() > 0.1);
            assert!(c.p.norm() < 0.9);
            assert!((c.sigma.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn every_suite_passes_on_small_population() {
        for name in SUITES {
            let rep = run_suite(name, DEFAULT_SEED, 500).unwrap();
            assert!(rep.passed(), "{rep:#?}");
        }
    }
}
