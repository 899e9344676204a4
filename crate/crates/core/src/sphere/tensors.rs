//! The first-order tensors built from a pair of points that appear in the
//! vector addition theorem, plus their cancellation-free rescalings.

use super::geometry::{cross, dot, scale, sub, Matrix3, UnitVector3};

/// Below this value of `1 - t²` the rescaled tensors are returned as zero.
/// Every use multiplies them by a coefficient that vanishes at `t = ±1`.
pub const EPS_POLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalTensors {
    /// `-(x×y)(x×y)^T`
    pub q: Matrix3,
    /// `t I - y x^T`
    pub r: Matrix3,
    /// `(y - t x)(x - t y)^T`
    pub v: Matrix3,
    /// `(I - x x^T)(I - y y^T)`
    pub w: Matrix3,
    /// `Q / (1 - t²)`
    pub q_tilde: Matrix3,
    /// `V / (1 - t²)`
    pub v_tilde: Matrix3,
    pub t: f64,
}

pub fn zonal_tensors(x: &UnitVector3, y: &UnitVector3) -> ZonalTensors {
    let xa = x.as_array();
    let ya = y.as_array();
    let t = dot(xa, ya);
    let n = cross(xa, ya);
    // |x × y|² is the accurate value of 1 - t² near the diagonal
    let sin2 = dot(&n, &n);
    let q = Matrix3::outer(&n, &n).scaled(-1.0);
    let r = Matrix3::IDENTITY.scaled(t) - Matrix3::outer(ya, xa);
    let a = sub(ya, &scale(xa, t));
    let b = sub(xa, &scale(ya, t));
    let v = Matrix3::outer(&a, &b);
    let w = Matrix3::tangent_projector(x) * Matrix3::tangent_projector(y);
    let (q_tilde, v_tilde) = if sin2 < EPS_POLE {
        (Matrix3::ZERO, Matrix3::ZERO)
    } else {
        (q.scaled(1.0 / sin2), v.scaled(1.0 / sin2))
    };
    ZonalTensors { q, r, v, w, q_tilde, v_tilde, t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::geometry::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_unit(rng: &mut ChaCha8Rng) -> UnitVector3 {
        let v: Vec3 = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        UnitVector3::normalize(v).unwrap()
    }

    fn spectral_norm(m: &Matrix3) -> f64 {
        let a = nalgebra::Matrix3::from_fn(|i, j| m.0[i][j]);
        a.singular_values().max()
    }

    #[test]
    fn diagonal_values() {
        let x = UnitVector3::from_spherical(0.8, 1.3);
        let z = zonal_tensors(&x, &x);
        let p = Matrix3::tangent_projector(&x);
        assert!(z.q.max_abs() < 1e-15);
        assert!(z.v.max_abs() < 1e-15);
        assert!((z.r - p).max_abs() < 1e-15);
        assert!((z.w - p).max_abs() < 1e-15);
        assert_eq!(z.q_tilde, Matrix3::ZERO);
        assert_eq!(z.v_tilde, Matrix3::ZERO);
    }

    #[test]
    fn annihilation_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = rand_unit(&mut rng);
            let y = rand_unit(&mut rng);
            let z = zonal_tensors(&x, &y);
            for m in [z.q, z.r, z.v, z.w] {
                let left = m.vec_mul(x.as_array());
                let right = m.mul_vec(y.as_array());
                for i in 0..3 {
                    assert!(left[i].abs() < 1e-12 && right[i].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rank_one_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let x = rand_unit(&mut rng);
            let y = rand_unit(&mut rng);
            let z = zonal_tensors(&x, &y);
            assert!((spectral_norm(&z.q) - (1.0 - z.t * z.t)).abs() < 1e-12);
            assert!(spectral_norm(&z.q_tilde) <= 1.0 + 1e-12);
            assert!(spectral_norm(&z.v_tilde) <= 1.0 + 1e-12);
            assert!(z.q.is_finite() && z.v_tilde.is_finite());
        }
    }

    #[test]
    fn antipodal_pair_is_guarded() {
        let x = UnitVector3::from_spherical(0.8, 1.3);
        let z = zonal_tensors(&x, &x.antipode());
        assert_eq!(z.q_tilde, Matrix3::ZERO);
        assert!((z.t + 1.0).abs() < 1e-15);
    }
}
