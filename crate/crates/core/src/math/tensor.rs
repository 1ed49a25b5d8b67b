//! Four-vectors, the rank-4 Levi-Civita symbol and antisymmetric rank-2
//! tensors.
//!
//! Conventions: index 0 is time, metric signature `(+,-,-,-)`,
//! `ε_{0123} = +1` and therefore `ε^{0123} = -1`. Four-vectors are stored
//! with upper (contravariant) indices.

use super::Vec3;
use crate::error::{Error, Result};

/// Diagonal of the Minkowski metric.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(t: f64, space: Vec3) -> Self {
        FourVector([t, space.x, space.y, space.z])
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn space(&self) -> Vec3 {
        Vec3::new(self.0[1], self.0[2], self.0[3])
    }

    /// Components with the index lowered.
    pub fn lower(&self) -> [f64; 4] {
        let mut out = self.0;
        for (o, g) in out.iter_mut().zip(METRIC) {
            *o *= g;
        }
        out
    }

    /// Minkowski inner product.
    pub fn dot(&self, o: &FourVector) -> f64 {
        self.lower().iter().zip(o.0).map(|(a, b)| a * b).sum()
    }

    /// Dimensionless 4-velocity `(γ, γβ)`.
    pub fn four_velocity(beta: Vec3) -> Result<Self> {
        let b2 = beta.norm_sq();
        if !beta.is_finite() || b2 >= 1.0 {
            return Err(Error::Domain(format!(
                "|beta| = {} is not below 1",
                b2.sqrt()
            )));
        }
        let gamma = 1.0 / (1.0 - b2).sqrt();
        Ok(FourVector::new(gamma, beta * gamma))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// `ε_{abcd}` with `ε_{0123} = +1`; zero on any repeated index.
pub fn levi_civita4(a: usize, b: usize, c: usize, d: usize) -> Result<i8> {
    let idx = [a, b, c, d];
    if let Some(bad) = idx.iter().find(|&&i| i > 3) {
        return Err(Error::Argument(format!("index {bad} out of range 0..=3")));
    }
    Ok(permutation_sign(idx))
}

pub(crate) fn permutation_sign(idx: [usize; 4]) -> i8 {
    let mut sign = 1;
    for i in 0..4 {
        for j in (i + 1)..4 {
            match idx[i].cmp(&idx[j]) {
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

/// `ε^{abcd}`: all four indices raised, which flips the sign.
pub(crate) fn levi_civita4_upper(idx: [usize; 4]) -> f64 {
    -f64::from(permutation_sign(idx))
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_slot(a: usize, b: usize) -> usize {
    PAIRS
        .iter()
        .position(|&p| p == (a, b))
        .expect("ordered pair with a < b")
}

/// Antisymmetric 4x4 tensor with upper indices. Only the six components
/// above the diagonal are stored; the rest are generated on access.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AntisymTensor4 {
    upper: [f64; 6],
}

impl AntisymTensor4 {
    pub const ZERO: AntisymTensor4 = AntisymTensor4 { upper: [0.0; 6] };

    /// Builds from components `T^{01}, T^{02}, T^{03}, T^{12}, T^{13}, T^{23}`.
    pub fn from_components(upper: [f64; 6]) -> Self {
        AntisymTensor4 { upper }
    }

    /// Antisymmetric part of an arbitrary matrix, `(M - Mᵀ)/2`.
    pub fn from_matrix_antisymmetrized(m: &[[f64; 4]; 4]) -> Self {
        let mut upper = [0.0; 6];
        for (slot, &(a, b)) in PAIRS.iter().enumerate() {
            upper[slot] = 0.5 * (m[a][b] - m[b][a]);
        }
        AntisymTensor4 { upper }
    }

    pub fn components(&self) -> [f64; 6] {
        self.upper
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[pair_slot(a, b)],
            std::cmp::Ordering::Greater => -self.upper[pair_slot(b, a)],
        }
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (a, row) in m.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.get(a, b);
            }
        }
        m
    }

    /// Spatial block read as an axial vector: `(T^{23}, T^{31}, T^{12})`.
    pub fn spatial_axial(&self) -> Vec3 {
        Vec3::new(self.get(2, 3), self.get(3, 1), self.get(1, 2))
    }

    /// Mixed block `(T^{01}, T^{02}, T^{03})`.
    pub fn time_space(&self) -> Vec3 {
        Vec3::new(self.get(0, 1), self.get(0, 2), self.get(0, 3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_anchors() {
        assert_eq!(levi_civita4(0, 1, 2, 3).unwrap(), 1);
        assert_eq!(levi_civita4(1, 0, 2, 3).unwrap(), -1);
        assert_eq!(levi_civita4(0, 0, 2, 3).unwrap(), 0);
        assert_eq!(levi_civita4(3, 2, 1, 0).unwrap(), 1);
    }

    #[test]
    fn levi_civita_out_of_range() {
        assert!(matches!(levi_civita4(0, 1, 2, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn levi_civita_swaps_negate_on_all_tuples() {
        for n in 0..256usize {
            let idx = [n & 3, (n >> 2) & 3, (n >> 4) & 3, (n >> 6) & 3];
            let v = levi_civita4(idx[0], idx[1], idx[2], idx[3]).unwrap();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let mut s = idx;
                    s.swap(i, j);
                    assert_eq!(levi_civita4(s[0], s[1], s[2], s[3]).unwrap(), -v);
                }
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn antisymmetry_is_structural() {
        let t = AntisymTensor4::from_components([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let m = t.to_matrix();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(m[a][b], -m[b][a]);
            }
        }
        assert_eq!(t.get(2, 1), -4.0);
    }

    #[test]
    fn four_velocity_is_unit() {
        let u = FourVector::four_velocity(Vec3::new(0.3, -0.4, 0.5)).unwrap();
        assert!((u.dot(&u) - 1.0).abs() < 1e-14);
        assert!(FourVector::four_velocity(Vec3::new(1.0, 0.0, 0.0)).is_err());
    }
}
