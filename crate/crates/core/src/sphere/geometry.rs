//! Points, tangent vectors and small dense matrices on the unit sphere.

use crate::error::{Error, Result};
use std::ops::{Add, Mul, Sub};

/// Ambient 3-vector.
pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `a + s * b`
#[inline]
pub fn axpy(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// A point on the unit sphere. Doubles as the outward normal at that point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vec3);

impl UnitVector3 {
    pub const NORTH: UnitVector3 = UnitVector3([0.0, 0.0, 1.0]);

    /// Projects `v` radially onto the sphere.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = norm(&v);
        if !(n > 1e-14) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(UnitVector3(scale(&v, 1.0 / n)))
    }

    /// Point with colatitude `theta` and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        UnitVector3([st * cp, st * sp, ct])
    }

    /// Wraps a vector the caller guarantees to be of unit length.
    #[inline]
    pub(crate) fn new_unchecked(v: Vec3) -> Self {
        UnitVector3(v)
    }

    #[inline]
    pub fn as_array(&self) -> &Vec3 {
        &self.0
    }

    #[inline]
    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    #[inline]
    pub fn x2(&self) -> f64 {
        self.0[1]
    }
    #[inline]
    pub fn x3(&self) -> f64 {
        self.0[2]
    }

    #[inline]
    pub fn dot(&self, other: &UnitVector3) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Great-circle distance, computed via `atan2` so it stays accurate for
    /// nearly coincident and nearly antipodal pairs.
    pub fn geodesic_distance(&self, other: &UnitVector3) -> f64 {
        let c = cross(&self.0, &other.0);
        norm(&c).atan2(self.dot(other))
    }

    /// Colatitude in `[0, pi]`.
    pub fn colatitude(&self) -> f64 {
        (self.0[0].hypot(self.0[1])).atan2(self.0[2])
    }

    pub fn longitude(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    /// Removes the normal component of an ambient vector.
    #[inline]
    pub fn project_tangent(&self, v: &Vec3) -> Vec3 {
        axpy(v, -dot(&self.0, v), &self.0)
    }

    pub fn antipode(&self) -> Self {
        UnitVector3(scale(&self.0, -1.0))
    }
}

impl From<UnitVector3> for Vec3 {
    fn from(u: UnitVector3) -> Vec3 {
        u.0
    }
}

/// A vector attached to a point of the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: UnitVector3,
    pub v: Vec3,
}

impl TangentVector {
    /// Fails when the normal component exceeds `tol`.
    pub fn new(base: UnitVector3, v: Vec3, tol: f64) -> Result<Self> {
        let normal = dot(base.as_array(), &v);
        if normal.abs() > tol {
            return Err(Error::NotTangent { normal });
        }
        Ok(TangentVector { base, v })
    }

    /// Accepts an ambient vector as-is. Noisy samples keep their normal part.
    pub fn ambient(base: UnitVector3, v: Vec3) -> Self {
        TangentVector { base, v }
    }

    pub fn normal_component(&self) -> f64 {
        dot(self.base.as_array(), &self.v)
    }
}

/// Real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const ZERO: Matrix3 = Matrix3([[0.0; 3]; 3]);
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// `a b^T`
    pub fn outer(a: &Vec3, b: &Vec3) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i] * b[j];
            }
        }
        Matrix3(m)
    }

    /// `I - x x^T`
    pub fn tangent_projector(x: &UnitVector3) -> Self {
        Matrix3::IDENTITY - Matrix3::outer(x.as_array(), x.as_array())
    }

    pub fn transpose(&self) -> Self {
        let a = &self.0;
        Matrix3([
            [a[0][0], a[1][0], a[2][0]],
            [a[0][1], a[1][1], a[2][1]],
            [a[0][2], a[1][2], a[2][2]],
        ])
    }

    #[inline]
    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let a = &self.0;
        [dot(&a[0], v), dot(&a[1], v), dot(&a[2], v)]
    }

    /// `v^T M`
    #[inline]
    pub fn vec_mul(&self, v: &Vec3) -> Vec3 {
        let a = &self.0;
        [
            v[0] * a[0][0] + v[1] * a[1][0] + v[2] * a[2][0],
            v[0] * a[0][1] + v[1] * a[1][1] + v[2] * a[2][1],
            v[0] * a[0][2] + v[1] * a[1][2] + v[2] * a[2][2],
        ]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.0;
        m.iter_mut().flatten().for_each(|e| *e *= s);
        Matrix3(m)
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, e| m.max(e.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|e| e.is_finite())
    }
}

impl Add for Matrix3 {
    type Output = Matrix3;
    fn add(self, rhs: Matrix3) -> Matrix3 {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += rhs.0[i][j];
            }
        }
        Matrix3(m)
    }
}

impl Sub for Matrix3 {
    type Output = Matrix3;
    fn sub(self, rhs: Matrix3) -> Matrix3 {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] -= rhs.0[i][j];
            }
        }
        Matrix3(m)
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Matrix3(m)
    }
}

/// Orthonormal right-handed frame `{e1, e2, base}` of the tangent plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame {
    pub base: UnitVector3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl TangentFrame {
    /// Coordinates of a vector in the frame.
    #[inline]
    pub fn project(&self, v: &Vec3) -> [f64; 2] {
        [dot(&self.e1, v), dot(&self.e2, v)]
    }

    #[inline]
    pub fn lift(&self, c: [f64; 2]) -> Vec3 {
        let a = scale(&self.e1, c[0]);
        axpy(&a, c[1], &self.e2)
    }
}

/// Deterministic tangent frame.
///
/// `e1` is the normalized projection of the coordinate axis along which `x`
/// has its smallest component (ties resolved toward the lower axis index);
/// `e2 = x × e1`. The frame jumps where the smallest-component axis changes,
/// a measure-zero set of points with two equal smallest |components|.
pub fn tangent_frame(x: &UnitVector3) -> TangentFrame {
    let a = x.as_array();
    let mut axis = 0;
    for i in 1..3 {
        if a[i].abs() < a[axis].abs() {
            axis = i;
        }
    }
    let mut ek = [0.0; 3];
    ek[axis] = 1.0;
    let p = x.project_tangent(&ek);
    let e1 = scale(&p, 1.0 / norm(&p));
    let e2 = cross(a, &e1);
    TangentFrame { base: *x, e1, e2 }
}
