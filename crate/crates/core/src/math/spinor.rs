use num_complex::Complex64;

use super::Vec3;
use crate::error::{Error, Result};

/// Allowed deviation of `|up|² + |down|²` from one before a spinor is rejected.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Two-component Pauli spinor. The global phase is kept as computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor {
    pub const fn new(up: Complex64, down: Complex64) -> Self {
        Spinor { up, down }
    }

    pub fn spin_up() -> Self {
        Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn spin_down() -> Self {
        Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Pure state whose Bloch vector points along `dir` (normalized here).
    pub fn from_bloch(dir: Vec3) -> Result<Self> {
        let n = dir
            .normalized()
            .filter(|n| n.is_finite())
            .ok_or_else(|| Error::InvalidState("Bloch vector has no direction".into()))?;
        let theta = n.z.clamp(-1.0, 1.0).acos();
        let phi = n.y.atan2(n.x);
        let (s, c) = (0.5 * theta).sin_cos();
        Ok(Spinor::new(
            Complex64::new(c, 0.0),
            Complex64::from_polar(s, phi),
        ))
    }

    pub fn norm_sq(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sq();
        if !n.is_finite() || (n.sqrt() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "spinor norm {} deviates from 1",
                n.sqrt()
            )));
        }
        Ok(())
    }
}

/// Bloch vector `⟨σ⟩` of a normalized spinor.
pub fn pauli_expectation(s: &Spinor) -> Result<Vec3> {
    s.check_normalized()?;
    let cross = s.up.conj() * s.down;
    Ok(Vec3::new(
        2.0 * cross.re,
        2.0 * cross.im,
        s.up.norm_sqr() - s.down.norm_sqr(),
    ))
}

/// Applies `exp(-i (dt/2) Ω·σ)` in closed form.
///
/// The Bloch vector turns by `|Ω| dt` about `Ω̂`, i.e. `d⟨σ⟩/dt = Ω × ⟨σ⟩`.
pub fn su2_rotate(s: &Spinor, omega: Vec3, dt: f64) -> Spinor {
    let w = omega.norm();
    if w == 0.0 || dt == 0.0 {
        return *s;
    }
    let n = omega / w;
    let (sin, cos) = (0.5 * w * dt).sin_cos();
    // U = cos I - i sin (n·σ)
    let i_sin = Complex64::new(0.0, -sin);
    let up = Complex64::new(cos, 0.0) * s.up
        + i_sin * (n.z * s.up + Complex64::new(n.x, -n.y) * s.down);
    let down = Complex64::new(cos, 0.0) * s.down
        + i_sin * (Complex64::new(n.x, n.y) * s.up - n.z * s.down);
    Spinor::new(up, down)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn pauli_eigenstates() {
        let z = pauli_expectation(&Spinor::new(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(z, Vec3::new(0.0, 0.0, 1.0));
        let x = pauli_expectation(&Spinor::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)))
            .unwrap();
        assert!(close(x, Vec3::X, 1e-15));
        let y = pauli_expectation(&Spinor::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)))
            .unwrap();
        assert!(close(y, Vec3::Y, 1e-15));
    }

    #[test]
    fn unnormalized_spinor_is_rejected() {
        let s = Spinor::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(pauli_expectation(&s), Err(Error::InvalidState(_))));
    }

    #[test]
    fn zero_omega_is_identity() {
        let s = Spinor::from_bloch(Vec3::new(0.3, -0.2, 0.9)).unwrap();
        assert_eq!(su2_rotate(&s, Vec3::ZERO, 0.7), s);
    }

    #[test]
    fn up_state_only_picks_up_phase() {
        let w = 2.5;
        let dt = 0.3;
        let out = su2_rotate(&Spinor::spin_up(), Vec3::new(0.0, 0.0, w), dt);
        let expect = Complex64::from_polar(1.0, -w * dt / 2.0);
        assert!((out.up - expect).norm() < 1e-15);
        assert_eq!(out.down, c(0.0, 0.0));
    }

    /// exp(-i H dt) by truncated Taylor series of the 2x2 generator.
    fn matrix_exponential_oracle(s: &Spinor, omega: Vec3, dt: f64) -> Spinor {
        // M = -i (dt/2) Ω·σ
        let k = c(0.0, -0.5 * dt);
        let m = [
            [k * omega.z, k * c(omega.x, -omega.y)],
            [k * c(omega.x, omega.y), -k * omega.z],
        ];
        let mut term = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let mut sum = term;
        for n in 1..40 {
            let mut next = [[c(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        next[i][j] += term[i][l] * m[l][j];
                    }
                    next[i][j] /= n as f64;
                }
            }
            term = next;
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += term[i][j];
                }
            }
        }
        Spinor::new(
            sum[0][0] * s.up + sum[0][1] * s.down,
            sum[1][0] * s.up + sum[1][1] * s.down,
        )
    }

    #[test]
    fn matches_matrix_exponential_and_initial_rate() {
        let s = Spinor::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        let omega = Vec3::Z;
        for dt in [1e-3, 1e-2] {
            let got = su2_rotate(&s, omega, dt);
            let want = matrix_exponential_oracle(&s, omega, dt);
            assert!((got.up - want.up).norm() < 1e-14);
            assert!((got.down - want.down).norm() < 1e-14);
            let sig = pauli_expectation(&got).unwrap();
            // d⟨σ⟩/dt = Ω × ⟨σ⟩ = ŷ at t = 0
            let rate = (sig - Vec3::X) / dt;
            assert!(close(rate, Vec3::Y, dt));
        }
    }

    #[test]
    fn bloch_round_trip() {
        for dir in [Vec3::X, -Vec3::Z, Vec3::new(1.0, 2.0, -0.5)] {
            let s = Spinor::from_bloch(dir).unwrap();
            let back = pauli_expectation(&s).unwrap();
            assert!(close(back, dir.normalized().unwrap(), 1e-15));
        }
    }
}
