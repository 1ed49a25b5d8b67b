//! Closed-form field configurations in Coulomb gauge.
//!
//! Gaussian-style factors are used: `E = -(1/c) ∂A/∂t`, `B = ∇ × A`, and the
//! Lorentz force is `e (E + (v/c) × B)`. `V(r)` is a potential energy that is
//! independent of the radiation field.
//!
//! Plane waves propagate along `+ẑ` with phase `θ = kz - ωt`, `k = ω/c`. The
//! circular wave uses `A = (E₀/ω)(cos θ, -h sin θ, 0)` for helicity `h`, which
//! gives `E × A = h E₀²/(cω) ẑ` at every point and time.

use serde::{Deserialize, Serialize};

use crate::covariant::Constants;
use crate::error::{Error, Result};
use crate::math::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFamily {
    CoulombPotential,
    UniformStatic,
    PlaneWaveCircular,
    PlaneWaveLinear,
}

impl FieldFamily {
    pub fn name(self) -> &'static str {
        match self {
            FieldFamily::CoulombPotential => "coulomb_potential",
            FieldFamily::UniformStatic => "uniform_static",
            FieldFamily::PlaneWaveCircular => "plane_wave_circular",
            FieldFamily::PlaneWaveLinear => "plane_wave_linear",
        }
    }

    pub const ALL: [FieldFamily; 4] = [
        FieldFamily::CoulombPotential,
        FieldFamily::UniformStatic,
        FieldFamily::PlaneWaveCircular,
        FieldFamily::PlaneWaveLinear,
    ];
}

impl std::str::FromStr for FieldFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FieldFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown field family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FieldConfiguration {
    /// `V(r) = -Z/|r|`, no electromagnetic field.
    CoulombPotential { z: f64 },
    /// Constant `E` and `B`, with `A = ½ B × r` and `V = 0`.
    UniformStatic { e: Vec3, b: Vec3 },
    PlaneWaveCircular { e0: f64, omega: f64, helicity: i8 },
    /// `A = (E₀/ω) cos θ x̂`.
    PlaneWaveLinear { e0: f64, omega: f64 },
}

impl FieldConfiguration {
    pub fn family(&self) -> FieldFamily {
        match self {
            FieldConfiguration::CoulombPotential { .. } => FieldFamily::CoulombPotential,
            FieldConfiguration::UniformStatic { .. } => FieldFamily::UniformStatic,
            FieldConfiguration::PlaneWaveCircular { .. } => FieldFamily::PlaneWaveCircular,
            FieldConfiguration::PlaneWaveLinear { .. } => FieldFamily::PlaneWaveLinear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Configuration(msg.to_string()));
        match *self {
            FieldConfiguration::CoulombPotential { z } => {
                if !z.is_finite() {
                    return bad("z must be finite");
                }
            }
            FieldConfiguration::UniformStatic { e, b } => {
                if !(e.is_finite() && b.is_finite()) {
                    return bad("uniform fields must be finite");
                }
            }
            FieldConfiguration::PlaneWaveCircular { e0, omega, helicity } => {
                wave_params_ok(e0, omega)?;
                if helicity != 1 && helicity != -1 {
                    return bad("helicity must be +1 or -1");
                }
            }
            FieldConfiguration::PlaneWaveLinear { e0, omega } => wave_params_ok(e0, omega)?,
        }
        Ok(())
    }

    /// Whether `A` depends on time, so that `E = -(1/c) ∂A/∂t` is meaningful.
    pub fn e_derives_from_a(&self) -> bool {
        !matches!(self, FieldConfiguration::UniformStatic { .. })
    }

    pub fn is_static(&self) -> bool {
        matches!(
            self,
            FieldConfiguration::CoulombPotential { .. } | FieldConfiguration::UniformStatic { .. }
        )
    }

    /// Closed form of `E × A` for the circular wave.
    pub fn circular_e_cross_a(&self, k: &Constants) -> Option<Vec3> {
        match *self {
            FieldConfiguration::PlaneWaveCircular { e0, omega, helicity } => {
                Some(Vec3::Z * (f64::from(helicity) * e0 * e0 / (k.c * omega)))
            }
            _ => None,
        }
    }
}

fn wave_params_ok(e0: f64, omega: f64) -> Result<()> {
    if !(e0.is_finite() && e0 >= 0.0) {
        return Err(Error::Configuration("e0 must be finite and >= 0".into()));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Configuration("omega must be finite and > 0".into()));
    }
    Ok(())
}

/// Fields and potential at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub position: Vec3,
    pub time: f64,
    pub a: Vec3,
    pub e: Vec3,
    pub b: Vec3,
    /// Potential energy `V(r)`.
    pub v: f64,
    pub grad_v: Vec3,
}

impl FieldSample {
    /// Sample with every field zero, at the origin.
    pub fn vacuum() -> Self {
        FieldSample {
            position: Vec3::ZERO,
            time: 0.0,
            a: Vec3::ZERO,
            e: Vec3::ZERO,
            b: Vec3::ZERO,
            v: 0.0,
            grad_v: Vec3::ZERO,
        }
    }

    /// `(1/r) dV/dr` for a central potential, computed as `∇V·r / r²`.
    pub fn radial_force_factor(&self) -> Result<f64> {
        let r2 = self.position.norm_sq();
        if r2 == 0.0 {
            return Err(Error::SingularPoint(self.position));
        }
        Ok(self.grad_v.dot(self.position) / r2)
    }

    /// `dV/dr`, the radial component of `∇V`.
    pub fn dv_dr(&self) -> Result<f64> {
        let r = self.position.norm();
        if r == 0.0 {
            return Err(Error::SingularPoint(self.position));
        }
        Ok(self.grad_v.dot(self.position) / r)
    }
}

pub fn sample(cfg: &FieldConfiguration, r: Vec3, t: f64, k: &Constants) -> Result<FieldSample> {
    let mut s = FieldSample {
        position: r,
        time: t,
        ..FieldSample::vacuum()
    };
    match *cfg {
        FieldConfiguration::CoulombPotential { z } => {
            let d = r.norm();
            if d == 0.0 {
                return Err(Error::SingularPoint(r));
            }
            s.v = -z / d;
            s.grad_v = r * (z / (d * d * d));
        }
        FieldConfiguration::UniformStatic { e, b } => {
            s.e = e;
            s.b = b;
            s.a = b.cross(r) * 0.5;
        }
        FieldConfiguration::PlaneWaveCircular { e0, omega, helicity } => {
            let h = f64::from(helicity);
            let kw = omega / k.c;
            let amp = e0 / omega;
            let (sin, cos) = (kw * r.z - omega * t).sin_cos();
            s.a = Vec3::new(amp * cos, -h * amp * sin, 0.0);
            s.e = Vec3::new(sin, h * cos, 0.0) * (-e0 / k.c);
            s.b = Vec3::new(h * cos, -sin, 0.0) * (amp * kw);
        }
        FieldConfiguration::PlaneWaveLinear { e0, omega } => {
            let kw = omega / k.c;
            let amp = e0 / omega;
            let (sin, cos) = (kw * r.z - omega * t).sin_cos();
            s.a = Vec3::new(amp * cos, 0.0, 0.0);
            s.e = Vec3::new(-e0 / k.c * sin, 0.0, 0.0);
            s.b = Vec3::new(0.0, -amp * kw * sin, 0.0);
        }
    }
    Ok(s)
}

fn axis(i: usize) -> Vec3 {
    [Vec3::X, Vec3::Y, Vec3::Z][i]
}

/// Central-difference Jacobian `∂A_j/∂x_i`, indexed `[i][j]`.
fn a_jacobian(cfg: &FieldConfiguration, r: Vec3, t: f64, h: f64, k: &Constants) -> Result<[[f64; 3]; 3]> {
    let mut jac = [[0.0; 3]; 3];
    for (i, row) in jac.iter_mut().enumerate() {
        let plus = sample(cfg, r + axis(i) * h, t, k)?.a.to_array();
        let minus = sample(cfg, r - axis(i) * h, t, k)?.a.to_array();
        for j in 0..3 {
            row[j] = (plus[j] - minus[j]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Argument(format!("finite-difference step {h} must be > 0")));
    }
    Ok(())
}

/// Maximum `|∇·A|` over the sample points by central differences.
pub fn check_coulomb_gauge(
    cfg: &FieldConfiguration,
    points: &[(Vec3, f64)],
    h: f64,
    k: &Constants,
) -> Result<f64> {
    check_step(h)?;
    let mut worst = 0.0_f64;
    for &(r, t) in points {
        sample(cfg, r, t, k)?;
        let jac = a_jacobian(cfg, r, t, h, k)?;
        let div = jac[0][0] + jac[1][1] + jac[2][2];
        worst = worst.max(div.abs());
    }
    Ok(worst)
}

/// Finite-difference residuals of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldConsistency {
    /// Max `|E + (1/c) ∂A/∂t|`; `None` when `E` is an independent parameter.
    pub e_residual: Option<f64>,
    /// Max `|B - ∇ × A|`.
    pub b_residual: f64,
}

pub fn check_field_consistency(
    cfg: &FieldConfiguration,
    points: &[(Vec3, f64)],
    h: f64,
    k: &Constants,
) -> Result<FieldConsistency> {
    check_step(h)?;
    let check_e = cfg.e_derives_from_a();
    let mut e_worst = 0.0_f64;
    let mut b_worst = 0.0_f64;
    for &(r, t) in points {
        let s = sample(cfg, r, t, k)?;
        if check_e {
            let dadt = (sample(cfg, r, t + h, k)?.a - sample(cfg, r, t - h, k)?.a) / (2.0 * h);
            e_worst = e_worst.max((s.e + dadt / k.c).max_abs());
        }
        let j = a_jacobian(cfg, r, t, h, k)?;
        let curl = Vec3::new(j[1][2] - j[2][1], j[2][0] - j[0][2], j[0][1] - j[1][0]);
        b_worst = b_worst.max((s.b - curl).max_abs());
    }
    Ok(FieldConsistency {
        e_residual: check_e.then_some(e_worst),
        b_residual: b_worst,
    })
}
