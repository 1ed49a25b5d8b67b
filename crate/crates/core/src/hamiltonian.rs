//! Base Hamiltonian and its spin corrections, evaluated semiclassically with
//! the Bloch vector `⟨σ⟩` in place of the Pauli operators.
//!
//! The correction splits as `ΔH = -eA·ΔP/m + P·ΔP/m + ΔV(r)` where `ΔP` is the
//! canonical-momentum shift and `ΔV` the potential shift caused by the hidden
//! position. Their closed forms are
//!
//! | term     | expression                                 |
//! |----------|--------------------------------------------|
//! | `so`     | `(1/2m²c²) (1/r)(dV/dr) S·L`, `S = (ħ/2)σ` |
//! | `h1`     | `(e²ħ/4m²c²) σ·(E × A)`                    |
//! | `h2`     | `-ħ σ·(a × P)/(4mc²)`                      |
//! | `dv`     | `∇V·Δr`                                    |
//! | `zeeman` | `-(eħ/2mc) σ·B` (not a hidden-momentum term) |
//!
//! `so` and `dv` describe the same spin-orbit physics along two routes and are
//! numerically equal; enabling both double-counts it. For a static central
//! potential `h2` with `a = -∇V/m` is yet another spin-orbit form, so
//! `{so, dv, h2}` together counts the coupling up to three times.

use serde::{Deserialize, Serialize};

use crate::covariant::{hidden_momentum_quantum, hidden_position_quantum_unchecked, Constants};
use crate::error::{Error, Result};
use crate::fields::FieldSample;
use crate::math::{pauli_expectation, Spinor, Vec3};

/// Electron state: position, kinetic momentum `p = mv`, time and spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub r: Vec3,
    pub p: Vec3,
    pub t: f64,
    pub spinor: Spinor,
}

impl ParticleState {
    pub fn new(r: Vec3, p: Vec3, t: f64, spinor: Spinor) -> Self {
        ParticleState { r, p, t, spinor }
    }

    pub fn velocity(&self, k: &Constants) -> Vec3 {
        self.p / k.m
    }

    /// Canonical momentum `P = p + eA`.
    pub fn canonical_momentum(&self, f: &FieldSample, k: &Constants) -> Vec3 {
        self.p + f.a * k.e
    }

    /// Orbital angular momentum `L = r × p`.
    pub fn angular_momentum(&self) -> Vec3 {
        self.r.cross(self.p)
    }

    pub fn bloch(&self) -> Result<Vec3> {
        pauli_expectation(&self.spinor)
    }
}

/// Which correction terms are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TermMask {
    pub so: bool,
    pub h1: bool,
    pub h2: bool,
    pub dv: bool,
    pub zeeman: bool,
}

impl TermMask {
    pub const NONE: TermMask = TermMask {
        so: false,
        h1: false,
        h2: false,
        dv: false,
        zeeman: false,
    };

    pub const ALL: TermMask = TermMask {
        so: true,
        h1: true,
        h2: true,
        dv: true,
        zeeman: true,
    };

    /// True when both spin-orbit routes are enabled at once.
    pub fn double_counts_spin_orbit(&self) -> bool {
        self.so && self.dv
    }
}

/// Per-term energies. Disabled terms are reported as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TermBreakdown {
    pub h0: f64,
    pub so: f64,
    pub h1: f64,
    pub h2: f64,
    pub dv: f64,
    pub zeeman: f64,
    pub total: f64,
}

impl TermBreakdown {
    pub fn values(&self) -> [(&'static str, f64); 7] {
        [
            ("h0", self.h0),
            ("so", self.so),
            ("h1", self.h1),
            ("h2", self.h2),
            ("dv", self.dv),
            ("zeeman", self.zeeman),
            ("total", self.total),
        ]
    }
}

fn sigma_of(st: &ParticleState) -> Result<Vec3> {
    st.bloch()
}

/// `(1/2m)(P - eA)² + V(r)`.
pub fn base_hamiltonian(st: &ParticleState, f: &FieldSample, k: &Constants) -> f64 {
    let kinetic = st.canonical_momentum(f, k) - f.a * k.e;
    kinetic.norm_sq() / (2.0 * k.m) + f.v
}

/// Spin-orbit energy written with `S·L`.
pub fn spin_orbit_sl(sigma: Vec3, r: Vec3, p: Vec3, f: &FieldSample, k: &Constants) -> Result<f64> {
    let radial = FieldSample { position: r, ..*f }.radial_force_factor()?;
    let s = k.spin_of(sigma);
    let l = r.cross(p);
    Ok(radial * s.dot(l) / (2.0 * k.m * k.m * k.c * k.c))
}

/// Spin-orbit energy written with `σ·(r × v)`.
pub fn spin_orbit_sigma_rv(
    sigma: Vec3,
    r: Vec3,
    v: Vec3,
    f: &FieldSample,
    k: &Constants,
) -> Result<f64> {
    let radial = FieldSample { position: r, ..*f }.radial_force_factor()?;
    Ok(k.hbar / (4.0 * k.m * k.c * k.c) * radial * sigma.dot(r.cross(v)))
}

pub fn delta_h_spin_orbit(st: &ParticleState, f: &FieldSample, k: &Constants) -> Result<f64> {
    spin_orbit_sl(sigma_of(st)?, st.r, st.p, f, k)
}

/// `(e²ħ/4m²c²) σ·(E × A)`.
pub fn delta_h1(st: &ParticleState, f: &FieldSample, k: &Constants) -> Result<f64> {
    Ok(delta_h1_from_sigma(sigma_of(st)?, f, k))
}

pub fn delta_h1_from_sigma(sigma: Vec3, f: &FieldSample, k: &Constants) -> f64 {
    k.e * k.e * k.hbar / (4.0 * k.m * k.m * k.c * k.c) * sigma.dot(f.e.cross(f.a))
}

/// `-eA·ΔP/m` with `ΔP` from the quantum hidden momentum at `a = eE/m`.
pub fn delta_h1_via_hidden_momentum(sigma: Vec3, f: &FieldSample, k: &Constants) -> f64 {
    let accel = f.e * (k.e / k.m);
    let dp = hidden_momentum_quantum(sigma, accel, k);
    -k.e * f.a.dot(dp) / k.m
}

/// Magnetic moments whose product is `ΔH₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentProduct {
    /// `(e/2mc)(E × A)`.
    pub m_em: Vec3,
    /// `(eħ/2mc) σ`.
    pub m_e: Vec3,
    pub dot: f64,
}

pub fn moment_product(st: &ParticleState, f: &FieldSample, k: &Constants) -> Result<MomentProduct> {
    Ok(moment_product_from_sigma(sigma_of(st)?, f, k))
}

pub fn moment_product_from_sigma(sigma: Vec3, f: &FieldSample, k: &Constants) -> MomentProduct {
    let m_em = f.e.cross(f.a) * (k.e / (2.0 * k.m * k.c));
    let m_e = sigma * (k.e * k.hbar / (2.0 * k.m * k.c));
    MomentProduct {
        m_em,
        m_e,
        dot: m_em.dot(m_e),
    }
}

/// `-ħ σ·(a × P)/(4mc²)` for a caller-supplied acceleration.
pub fn delta_h2(st: &ParticleState, f: &FieldSample, k: &Constants, accel: Vec3) -> Result<f64> {
    let p_can = st.canonical_momentum(f, k);
    Ok(delta_h2_from_sigma(sigma_of(st)?, accel, p_can, k))
}

pub fn delta_h2_from_sigma(sigma: Vec3, accel: Vec3, p_can: Vec3, k: &Constants) -> f64 {
    -k.hbar * sigma.dot(accel.cross(p_can)) / (4.0 * k.m * k.c * k.c)
}

/// `P·ΔP/m`, the second hidden-momentum term before simplification.
pub fn delta_h2_via_hidden_momentum(sigma: Vec3, accel: Vec3, p_can: Vec3, k: &Constants) -> f64 {
    p_can.dot(hidden_momentum_quantum(sigma, accel, k)) / k.m
}

/// `-eħ σ·(E × P)/(4m²c²)`, the electric-acceleration form.
pub fn delta_h2_electric(sigma: Vec3, e_field: Vec3, p_can: Vec3, k: &Constants) -> f64 {
    -k.e * k.hbar * sigma.dot(e_field.cross(p_can)) / (4.0 * k.m * k.m * k.c * k.c)
}

/// Potential shift `V(r + Δr) - V(r) ≈ ∇V·Δr` at the quantum hidden position.
pub fn delta_v_shift(st: &ParticleState, f: &FieldSample, k: &Constants) -> Result<f64> {
    delta_v_from_sigma(sigma_of(st)?, st.r, st.velocity(k), f, k)
}

pub fn delta_v_from_sigma(
    sigma: Vec3,
    r: Vec3,
    v: Vec3,
    f: &FieldSample,
    k: &Constants,
) -> Result<f64> {
    let probe = FieldSample { position: r, ..*f };
    let dv_dr = probe.dv_dr()?;
    let dr = hidden_position_quantum_unchecked(sigma, v, k);
    let r_hat = r / r.norm();
    Ok(dv_dr * dr.dot(r_hat))
}

/// Ordinary Zeeman energy `-(eħ/2mc) σ·B`.
pub fn zeeman(sigma: Vec3, f: &FieldSample, k: &Constants) -> f64 {
    -k.e * k.hbar / (2.0 * k.m * k.c) * sigma.dot(f.b)
}

pub fn term_breakdown(
    st: &ParticleState,
    f: &FieldSample,
    k: &Constants,
    mask: TermMask,
    accel: Vec3,
) -> Result<TermBreakdown> {
    let sigma = sigma_of(st)?;
    let mut out = TermBreakdown {
        h0: base_hamiltonian(st, f, k),
        ..TermBreakdown::default()
    };
    if mask.so {
        out.so = spin_orbit_sl(sigma, st.r, st.p, f, k)?;
    }
    if mask.h1 {
        out.h1 = delta_h1_from_sigma(sigma, f, k);
    }
    if mask.h2 {
        out.h2 = delta_h2_from_sigma(sigma, accel, st.canonical_momentum(f, k), k);
    }
    if mask.dv {
        out.dv = delta_v_from_sigma(sigma, st.r, st.velocity(k), f, k)?;
    }
    if mask.zeeman {
        out.zeeman = zeeman(sigma, f, k);
    }
    out.total = out.h0 + out.so + out.h1 + out.h2 + out.dv + out.zeeman;
    Ok(out)
}

/// Checks `|v| < c` for a state.
pub fn check_state(st: &ParticleState, k: &Constants) -> Result<()> {
    st.spinor.check_normalized()?;
    let speed = st.velocity(k).norm();
    if speed.is_nan() || speed >= k.c || !st.r.is_finite() {
        return Err(Error::Domain(format!("invalid state: |v| = {speed}, c = {}", k.c)));
    }
    Ok(())
}
