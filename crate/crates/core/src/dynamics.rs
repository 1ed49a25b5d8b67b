//! Trajectory and spinor co-evolution.
//!
//! The orbit follows non-relativistic Lorentz-force motion
//! `ṙ = p/m`, `ṗ = e(E + (v/c) × B) - ∇V` integrated with classical RK4. The
//! spinor is advanced by an exact SU(2) rotation about the precession vector
//! evaluated at the half-step state. Spin does not act back on the orbit.
//!
//! Every correction term has the form `ΔH_X = (ħ/2)⟨σ⟩·Ω_X`, so the
//! precession vectors are read off the energy expressions:
//!
//! * `Ω_so = (1/2m²c²)(1/r)(dV/dr) L`
//! * `Ω_h1 = (e²/2m²c²)(E × A)`
//! * `Ω_h2 = -(a × P)/(2mc²)`
//! * `Ω_dv = (∇V × v)/(2mc²)`
//! * `Ω_zeeman = -(e/mc) B`

use serde::{Deserialize, Serialize};

use crate::covariant::{hidden_momentum_quantum, hidden_position_quantum, Constants};
use crate::error::{Error, Result};
use crate::fields::{sample, FieldConfiguration, FieldSample};
use crate::hamiltonian::{check_state, term_breakdown, ParticleState, TermBreakdown, TermMask};
use crate::math::{su2_rotate, Vec3};
use crate::scenario::Scenario;

/// Which acceleration feeds the hidden-momentum terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccelerationChoice {
    /// `a = F/m` with the full Lorentz force and `-∇V`.
    #[default]
    TotalForce,
    /// `a = eE/m`.
    ElectricOnly,
}

impl AccelerationChoice {
    pub fn name(self) -> &'static str {
        match self {
            AccelerationChoice::TotalForce => "total_force",
            AccelerationChoice::ElectricOnly => "electric_only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PrecessionDecomposition {
    pub omega_so: Vec3,
    pub omega_h1: Vec3,
    pub omega_h2: Vec3,
    pub omega_dv: Vec3,
    pub omega_zeeman: Vec3,
    pub omega_total: Vec3,
}

/// Lorentz force plus the potential force.
pub fn force(f: &FieldSample, p: Vec3, k: &Constants) -> Vec3 {
    let v = p / k.m;
    (f.e + v.cross(f.b) / k.c) * k.e - f.grad_v
}

pub fn acceleration(f: &FieldSample, p: Vec3, k: &Constants, choice: AccelerationChoice) -> Vec3 {
    match choice {
        AccelerationChoice::TotalForce => force(f, p, k) / k.m,
        AccelerationChoice::ElectricOnly => f.e * (k.e / k.m),
    }
}

/// Precession vectors of the enabled terms; disabled ones are zero.
pub fn precession_vector(
    st: &ParticleState,
    f: &FieldSample,
    k: &Constants,
    mask: TermMask,
    accel: Vec3,
) -> Result<PrecessionDecomposition> {
    let mut d = PrecessionDecomposition::default();
    let mc2 = k.m * k.c * k.c;
    if mask.so {
        let radial = FieldSample { position: st.r, ..*f }.radial_force_factor()?;
        d.omega_so = st.angular_momentum() * (radial / (2.0 * k.m * mc2));
    }
    if mask.h1 {
        d.omega_h1 = f.e.cross(f.a) * (k.e * k.e / (2.0 * k.m * mc2));
    }
    if mask.h2 {
        d.omega_h2 = -accel.cross(st.canonical_momentum(f, k)) / (2.0 * mc2);
    }
    if mask.dv {
        if st.r.norm_sq() == 0.0 {
            return Err(Error::SingularPoint(st.r));
        }
        d.omega_dv = f.grad_v.cross(st.velocity(k)) / (2.0 * mc2);
    }
    if mask.zeeman {
        d.omega_zeeman = -f.b * (k.e / (k.m * k.c));
    }
    d.omega_total = d.omega_so + d.omega_h1 + d.omega_h2 + d.omega_dv + d.omega_zeeman;
    Ok(d)
}

/// Everything a single step needs besides the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub field: FieldConfiguration,
    pub constants: Constants,
    pub mask: TermMask,
    pub accel: AccelerationChoice,
    /// Closest allowed approach to a Coulomb centre.
    pub r_min: f64,
}

impl Propagator {
    pub fn new(field: FieldConfiguration, constants: Constants, mask: TermMask) -> Self {
        Propagator {
            field,
            constants,
            mask,
            accel: AccelerationChoice::default(),
            r_min: 1e-6,
        }
    }

    pub fn sample(&self, r: Vec3, t: f64) -> Result<FieldSample> {
        let r_min = matches!(self.field, FieldConfiguration::CoulombPotential { .. })
            .then_some(self.r_min);
        if let Some(r_min) = r_min {
            if r.norm() < r_min {
                return Err(Error::SingularPoint(r));
            }
        }
        sample(&self.field, r, t, &self.constants)
    }

    fn derivative(&self, r: Vec3, p: Vec3, t: f64) -> Result<(Vec3, Vec3)> {
        let f = self.sample(r, t)?;
        Ok((p / self.constants.m, force(&f, p, &self.constants)))
    }

    /// One RK4 step of the orbit only.
    pub fn orbit_step(&self, r: Vec3, p: Vec3, t: f64, dt: f64) -> Result<(Vec3, Vec3)> {
        let (k1r, k1p) = self.derivative(r, p, t)?;
        let h = 0.5 * dt;
        let (k2r, k2p) = self.derivative(r + k1r * h, p + k1p * h, t + h)?;
        let (k3r, k3p) = self.derivative(r + k2r * h, p + k2p * h, t + h)?;
        let (k4r, k4p) = self.derivative(r + k3r * dt, p + k3p * dt, t + dt)?;
        let w = dt / 6.0;
        Ok((
            r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * w,
            p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * w,
        ))
    }

    pub fn precession_at(&self, st: &ParticleState) -> Result<PrecessionDecomposition> {
        let f = self.sample(st.r, st.t)?;
        let a = acceleration(&f, st.p, &self.constants, self.accel);
        precession_vector(st, &f, &self.constants, self.mask, a)
    }

    pub fn terms_at(&self, st: &ParticleState) -> Result<TermBreakdown> {
        let f = self.sample(st.r, st.t)?;
        let a = acceleration(&f, st.p, &self.constants, self.accel);
        term_breakdown(st, &f, &self.constants, self.mask, a)
    }

    /// Orbit by RK4 over `dt`; spinor rotated about `Ω` at the RK4 half-step
    /// state for the full `dt`.
    pub fn step(&self, st: &ParticleState, dt: f64) -> Result<ParticleState> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Argument(format!("step size {dt} must be > 0")));
        }
        let (r1, p1) = self.orbit_step(st.r, st.p, st.t, dt)?;
        let spinor = if self.mask == TermMask::NONE {
            st.spinor
        } else {
            let (rm, pm) = self.orbit_step(st.r, st.p, st.t, 0.5 * dt)?;
            let mid = ParticleState::new(rm, pm, st.t + 0.5 * dt, st.spinor);
            let omega = self.precession_at(&mid)?.omega_total;
            su2_rotate(&st.spinor, omega, dt)
        };
        let next = ParticleState::new(r1, p1, st.t + dt, spinor);
        self.sample(next.r, next.t)?;
        Ok(next)
    }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub r: Vec3,
    pub p: Vec3,
    pub sigma: Vec3,
    pub terms: TermBreakdown,
    /// Quantum hidden position at this sample (diagnostic only).
    pub hidden_position: Vec3,
    /// Quantum canonical-momentum shift at this sample (diagnostic only).
    pub hidden_momentum: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
    pub steps: usize,
    /// Largest `| |ψ| - 1 |` seen at any step.
    pub max_norm_drift: f64,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }
}

/// An evolution that stopped early, with everything recorded so far.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("evolution aborted at step {}: {error}", .partial.steps)]
pub struct EvolveError {
    pub error: Error,
    pub partial: TrajectoryRecord,
}

fn record_sample(prop: &Propagator, st: &ParticleState) -> Result<TrajectorySample> {
    let k = &prop.constants;
    let f = prop.sample(st.r, st.t)?;
    let a = acceleration(&f, st.p, k, prop.accel);
    let sigma = st.bloch()?;
    Ok(TrajectorySample {
        t: st.t,
        r: st.r,
        p: st.p,
        sigma,
        terms: term_breakdown(st, &f, k, prop.mask, a)?,
        hidden_position: hidden_position_quantum(sigma, st.velocity(k), k)?,
        hidden_momentum: hidden_momentum_quantum(sigma, a, k),
    })
}

/// Number of fixed steps covering `[t0, t1]`; the last one may be shorter.
pub fn step_count(t0: f64, t1: f64, dt: f64) -> usize {
    let ratio = (t1 - t0) / dt;
    ((ratio - 1e-9 * ratio.max(1.0)).ceil() as usize).max(1)
}

/// Fixed-step integration over `[t0, t1]` recording every `sample_every`
/// steps plus the initial and final states. An aborted run also records the
/// last state reached before the failing step.
pub fn evolve(scenario: &Scenario) -> std::result::Result<TrajectoryRecord, EvolveError> {
    let prop = scenario.propagator();
    let integ = &scenario.integration;
    let mut record = TrajectoryRecord::default();
    let fail = |error: Error, record: TrajectoryRecord| EvolveError {
        error,
        partial: record,
    };

    let mut st = scenario.initial_state();
    if let Err(e) = check_state(&st, &prop.constants) {
        return Err(fail(e, record));
    }
    match record_sample(&prop, &st) {
        Ok(s) => record.samples.push(s),
        Err(e) => return Err(fail(e, record)),
    }

    let n = step_count(integ.t0, integ.t1, integ.dt);
    for i in 0..n {
        let t_next = if i + 1 == n {
            integ.t1
        } else {
            integ.t0 + (i + 1) as f64 * integ.dt
        };
        let h = t_next - st.t;
        let next = prop
            .step(&st, h)
            .and_then(|mut s| {
                s.t = t_next;
                check_state(&s, &prop.constants).map(|_| s)
            });
        st = match next {
            Ok(s) => s,
            Err(e) => {
                // keep the last good state even if it fell between samples
                if record.last().is_some_and(|s| s.t != st.t) {
                    if let Ok(s) = record_sample(&prop, &st) {
                        record.samples.push(s);
                    }
                }
                return Err(fail(e, record));
            }
        };
        record.steps = i + 1;
        let drift = (st.spinor.norm_sq().sqrt() - 1.0).abs();
        record.max_norm_drift = record.max_norm_drift.max(drift);
        if (i + 1) % integ.sample_every == 0 || i + 1 == n {
            match record_sample(&prop, &st) {
                Ok(s) => record.samples.push(s),
                Err(e) => return Err(fail(e, record)),
            }
        }
    }
    Ok(record)
}
