//! Hidden position and hidden momentum of a spinning particle, and the
//! duality between the spin tensor `S^{αβ}` and the spin 4-vector `S^μ`.
//!
//! The classical forms shift the centre of mass by `(S × v)/(mc²)`. The
//! quantum forms (Dirac coordinate system, `S → (ħ/2)σ`) carry an extra
//! factor of `-1/2` relative to the classical ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::tensor::{levi_civita4_upper, permutation_sign};
use crate::math::{AntisymTensor4, FourVector, Vec3, METRIC};

/// Allowed deviation of `U·U` from one.
pub const FOUR_VELOCITY_TOLERANCE: f64 = 1e-9;

/// Physical constants. Every formula carries them symbolically; the default
/// is the normalized electron `ħ = m = c = 1`, `e = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    /// Signed charge.
    pub e: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            hbar: 1.0,
            m: 1.0,
            c: 1.0,
            e: -1.0,
        }
    }
}

impl Constants {
    pub fn new(hbar: f64, m: f64, c: f64, e: f64) -> Result<Self> {
        let k = Constants { hbar, m, c, e };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("m", self.m), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and positive")));
            }
        }
        if !self.e.is_finite() {
            return Err(Error::Domain("e must be finite".into()));
        }
        Ok(())
    }

    /// Same constants with a different speed of light.
    pub fn with_c(self, c: f64) -> Self {
        Constants { c, ..self }
    }

    /// Spin angular momentum `(ħ/2)σ` for a Bloch vector.
    pub fn spin_of(&self, sigma: Vec3) -> Vec3 {
        sigma * (0.5 * self.hbar)
    }
}

/// Spin supplementary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SscKind {
    /// `S^{αβ} U_β = 0`, the rest frame of the particle.
    Moller,
    /// `2 S^{i0} + S^{ij} U_j = 0`, the non-rotating frame.
    Dirac,
}

impl std::str::FromStr for SscKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moller" => Ok(SscKind::Moller),
            "dirac" => Ok(SscKind::Dirac),
            other => Err(Error::Argument(format!("unknown SSC kind '{other}'"))),
        }
    }
}

fn check_subluminal(v: Vec3, k: &Constants) -> Result<()> {
    let speed = v.norm();
    if speed.is_nan() || speed >= k.c {
        return Err(Error::Domain(format!(
            "|v| = {speed} is not below c = {}",
            k.c
        )));
    }
    Ok(())
}

/// `Δr = (S × v)/(mc²)`.
pub fn hidden_position_classical(spin: Vec3, v: Vec3, k: &Constants) -> Result<Vec3> {
    check_subluminal(v, k)?;
    Ok(spin.cross(v) / (k.m * k.c * k.c))
}

/// `Δp = (S × F)/(mc²)`, equivalently `(S × a)/c²` with `a = F/m`.
pub fn hidden_momentum_classical(spin: Vec3, force: Vec3, k: &Constants) -> Vec3 {
    spin.cross(force) / (k.m * k.c * k.c)
}

/// `Δr = -(ħ/2)(σ × v)/(2mc²)`.
pub fn hidden_position_quantum(sigma: Vec3, v: Vec3, k: &Constants) -> Result<Vec3> {
    check_subluminal(v, k)?;
    Ok(hidden_position_quantum_unchecked(sigma, v, k))
}

/// Same expression without the `|v| < c` guard, for energy identities that
/// hold at any velocity.
pub(crate) fn hidden_position_quantum_unchecked(sigma: Vec3, v: Vec3, k: &Constants) -> Vec3 {
    sigma.cross(v) * (-0.5 * k.hbar / (2.0 * k.m * k.c * k.c))
}

/// Canonical-momentum shift `ΔP = -(ħ/2)(σ × a)/(2c²)`.
pub fn hidden_momentum_quantum(sigma: Vec3, accel: Vec3, k: &Constants) -> Vec3 {
    sigma.cross(accel) * (-0.5 * k.hbar / (2.0 * k.c * k.c))
}

fn check_four_velocity(u: &FourVector) -> Result<()> {
    let n = u.dot(u);
    if !n.is_finite() || (n - 1.0).abs() > FOUR_VELOCITY_TOLERANCE {
        return Err(Error::Domain(format!("U·U = {n}, expected 1")));
    }
    Ok(())
}

/// Rest-frame spin `(0, S)` boosted to a frame where the particle moves with
/// velocity `β`, so that `S^μ U_μ = 0`.
pub fn boosted_spin(spin: Vec3, beta: Vec3) -> Result<FourVector> {
    let u = FourVector::four_velocity(beta)?;
    let gamma = u.time();
    let b2 = beta.norm_sq();
    let bs = beta.dot(spin);
    let along = if b2 > 0.0 {
        beta * ((gamma - 1.0) * bs / b2)
    } else {
        Vec3::ZERO
    };
    Ok(FourVector::new(gamma * bs, spin + along))
}

/// Spin tensor from the spin 4-vector, `S^{αβ} ∝ ε^{αβστ} S_σ U_τ`.
///
/// With `ε^{0123} = -1` the bare contraction composed with
/// [`spin_vector_from_tensor`] returns `-S^μ`. The contraction here is taken
/// with the opposite overall sign so that the two maps are mutual inverses on
/// `S·U = 0` and a rest-frame spin `S` gives `S^{12} = S_z` (cyclic).
pub fn spin_tensor_from_vector(s4: &FourVector, u: &FourVector) -> Result<AntisymTensor4> {
    check_four_velocity(u)?;
    let s_low = s4.lower();
    let u_low = u.lower();
    let mut m = [[0.0; 4]; 4];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (s, sv) in s_low.iter().enumerate() {
                for (t, uv) in u_low.iter().enumerate() {
                    acc -= levi_civita4_upper([a, b, s, t]) * sv * uv;
                }
            }
            *out = acc;
        }
    }
    Ok(AntisymTensor4::from_matrix_antisymmetrized(&m))
}

/// `S_α = ½ ε_{αβστ} S^{βσ} U^τ`, returned with the index raised.
pub fn spin_vector_from_tensor(t: &AntisymTensor4, u: &FourVector) -> Result<FourVector> {
    check_four_velocity(u)?;
    let mut out = [0.0; 4];
    for (a, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for b in 0..4 {
            for s in 0..4 {
                for (tau, uv) in u.0.iter().enumerate() {
                    let eps = permutation_sign([a, b, s, tau]);
                    if eps != 0 {
                        acc += f64::from(eps) * t.get(b, s) * uv;
                    }
                }
            }
        }
        *o = 0.5 * acc * METRIC[a];
    }
    Ok(FourVector(out))
}

/// Residual of a supplementary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SscResidual {
    /// `S^{αβ} U_β`.
    Moller(FourVector),
    /// `2 S^{i0} + S^{ij} U_j`, `i = 1..3`.
    Dirac(Vec3),
}

impl SscResidual {
    pub fn max_abs(&self) -> f64 {
        match self {
            SscResidual::Moller(v) => v.max_abs(),
            SscResidual::Dirac(v) => v.max_abs(),
        }
    }

    pub fn components(&self) -> Vec<f64> {
        match self {
            SscResidual::Moller(v) => v.0.to_vec(),
            SscResidual::Dirac(v) => v.to_array().to_vec(),
        }
    }
}

pub fn ssc_residual(t: &AntisymTensor4, u: &FourVector, kind: SscKind) -> Result<SscResidual> {
    check_four_velocity(u)?;
    let u_low = u.lower();
    Ok(match kind {
        SscKind::Moller => {
            let mut r = [0.0; 4];
            for (a, out) in r.iter_mut().enumerate() {
                *out = (0..4).map(|b| t.get(a, b) * u_low[b]).sum();
            }
            SscResidual::Moller(FourVector(r))
        }
        SscKind::Dirac => {
            let mut r = [0.0; 3];
            for (i, out) in r.iter_mut().enumerate() {
                let i = i + 1;
                *out = 2.0 * t.get(i, 0) + (1..4).map(|j| t.get(i, j) * u_low[j]).sum::<f64>();
            }
            SscResidual::Dirac(Vec3::from(r))
        }
    })
}
