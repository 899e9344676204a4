//! Real scalar spherical harmonics and the two vector harmonic families.
//!
//! Convention: `Y_{l,k}` is orthonormal under the surface measure of the unit
//! sphere (total area `4π`), without the Condon–Shortley phase. The index
//! `k ∈ 1..=2l+1` maps to the order `m = k - l - 1`; `m > 0` carries
//! `√2 cos(mφ)`, `m < 0` carries `√2 sin(|m|φ)`.
//!
//! The vector harmonics are `z_{l,k} = ∇*Y_{l,k} / √(l(l+1))` (curl-free) and
//! `y_{l,k} = x × z_{l,k}` (divergence-free).

use super::geometry::{UnitVector3, Vec3};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Minimum geodesic distance to either coordinate pole for vector harmonics.
pub const POLE_GUARD: f64 = 1e-8;

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Flat index of `(l, k)` in tables holding all harmonics up to some degree.
#[inline]
pub fn harmonic_index(l: usize, k: usize) -> usize {
    l * l + k - 1
}

/// Orthonormalized associated Legendre values `N_{l,m} P_l^m(cos θ)`, `0 ≤ m ≤ l ≤ lmax+1`,
/// computed with the normalized ascending recurrences (no factorials, no overflow).
struct AssocLegendre {
    vals: Vec<f64>,
}

impl AssocLegendre {
    fn new(lmax: usize, c: f64, s: f64) -> Self {
        let top = lmax + 1;
        let mut vals = vec![0.0; tri(top, top) + 1];
        vals[0] = 0.5 / PI.sqrt();
        for m in 1..=top {
            let mf = m as f64;
            vals[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * vals[tri(m - 1, m - 1)];
        }
        for m in 0..top {
            vals[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * c * vals[tri(m, m)];
            for l in m + 2..=top {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                vals[tri(l, m)] = a * (c * vals[tri(l - 1, m)] - b * vals[tri(l - 2, m)]);
            }
        }
        AssocLegendre { vals }
    }

    #[inline]
    fn get(&self, l: usize, m: usize) -> f64 {
        self.vals[tri(l, m)]
    }

    /// `d/dθ` of the normalized value, from the degree-raising identity
    /// `sin θ · dP̄_l^m/dθ = √((2l+1)/(2l+3)·((l+1)²-m²)) P̄_{l+1}^m - (l+1) cos θ P̄_l^m`.
    #[inline]
    fn dtheta(&self, l: usize, m: usize, c: f64, s: f64) -> f64 {
        let lf = l as f64;
        let mf = m as f64;
        let k = ((2.0 * lf + 1.0) / (2.0 * lf + 3.0) * ((lf + 1.0) * (lf + 1.0) - mf * mf)).sqrt();
        (k * self.get(l + 1, m) - (lf + 1.0) * c * self.get(l, m)) / s
    }
}

struct Chart {
    c: f64,
    s: f64,
    phi: f64,
    e_theta: Vec3,
    e_phi: Vec3,
}

fn chart(x: &UnitVector3) -> Chart {
    let a = x.as_array();
    let s = a[0].hypot(a[1]);
    let c = a[2];
    let phi = a[1].atan2(a[0]);
    let (sp, cp) = phi.sin_cos();
    Chart {
        c,
        s,
        phi,
        e_theta: [c * cp, c * sp, -s],
        e_phi: [-sp, cp, 0.0],
    }
}

fn check_pole(x: &UnitVector3) -> Result<()> {
    if x.colatitude().min(PI - x.colatitude()) <= POLE_GUARD {
        return Err(Error::PoleProximity);
    }
    Ok(())
}

fn check_index(l: usize, k: usize) -> Result<i64> {
    if k < 1 || k > 2 * l + 1 {
        return Err(Error::Index { degree: l, k });
    }
    Ok(k as i64 - l as i64 - 1)
}

/// Trig factor of order `m` and its `φ`-derivative.
#[inline]
fn trig(m: i64, phi: f64) -> (f64, f64) {
    let sq2 = std::f64::consts::SQRT_2;
    match m {
        0 => (1.0, 0.0),
        m if m > 0 => {
            let (sn, cs) = (m as f64 * phi).sin_cos();
            (sq2 * cs, -(m as f64) * sq2 * sn)
        }
        m => {
            let mm = (-m) as f64;
            let (sn, cs) = (mm * phi).sin_cos();
            (sq2 * sn, mm * sq2 * cs)
        }
    }
}

/// Orthonormal real spherical harmonic `Y_{l,k}(x)`.
pub fn real_sph_harm(l: usize, k: usize, x: &UnitVector3) -> Result<f64> {
    let m = check_index(l, k)?;
    let ch = chart(x);
    let leg = AssocLegendre::new(l, ch.c, ch.s);
    Ok(leg.get(l, m.unsigned_abs() as usize) * trig(m, ch.phi).0)
}

/// The pair `(y_{l,k}(x), z_{l,k}(x))`, `l ≥ 1`.
pub fn vec_sph_harms(l: usize, k: usize, x: &UnitVector3) -> Result<(Vec3, Vec3)> {
    if l == 0 {
        return Err(Error::Index { degree: 0, k });
    }
    let m = check_index(l, k)?;
    check_pole(x)?;
    let ch = chart(x);
    let leg = AssocLegendre::new(l, ch.c, ch.s);
    Ok(vector_pair(&leg, &ch, l, m))
}

#[inline]
fn vector_pair(leg: &AssocLegendre, ch: &Chart, l: usize, m: i64) -> (Vec3, Vec3) {
    let am = m.unsigned_abs() as usize;
    let (tv, dtv) = trig(m, ch.phi);
    let d_theta = leg.dtheta(l, am, ch.c, ch.s) * tv;
    let d_phi_over_s = leg.get(l, am) * dtv / ch.s;
    let inv = 1.0 / ((l * (l + 1)) as f64).sqrt();
    let z = [
        inv * (d_theta * ch.e_theta[0] + d_phi_over_s * ch.e_phi[0]),
        inv * (d_theta * ch.e_theta[1] + d_phi_over_s * ch.e_phi[1]),
        inv * (d_theta * ch.e_theta[2] + d_phi_over_s * ch.e_phi[2]),
    ];
    let y = [
        inv * (d_theta * ch.e_phi[0] - d_phi_over_s * ch.e_theta[0]),
        inv * (d_theta * ch.e_phi[1] - d_phi_over_s * ch.e_theta[1]),
        inv * (d_theta * ch.e_phi[2] - d_phi_over_s * ch.e_theta[2]),
    ];
    (y, z)
}

/// All scalar harmonics up to `lmax` at one point, flat-indexed by [`harmonic_index`].
#[derive(Debug, Clone)]
pub struct ScalarHarmonics {
    pub lmax: usize,
    pub values: Vec<f64>,
}

impl ScalarHarmonics {
    pub fn new(lmax: usize, x: &UnitVector3) -> Self {
        let ch = chart(x);
        let leg = AssocLegendre::new(lmax, ch.c, ch.s);
        let mut values = Vec::with_capacity((lmax + 1) * (lmax + 1));
        for l in 0..=lmax {
            for k in 1..=2 * l + 1 {
                let m = k as i64 - l as i64 - 1;
                values.push(leg.get(l, m.unsigned_abs() as usize) * trig(m, ch.phi).0);
            }
        }
        ScalarHarmonics { lmax, values }
    }

    #[inline]
    pub fn get(&self, l: usize, k: usize) -> f64 {
        self.values[harmonic_index(l, k)]
    }
}

/// All vector harmonics `(y, z)` up to `lmax` at one point. Entry for `l = 0` is zero.
#[derive(Debug, Clone)]
pub struct VectorHarmonics {
    pub lmax: usize,
    pub y: Vec<Vec3>,
    pub z: Vec<Vec3>,
}

impl VectorHarmonics {
    pub fn new(lmax: usize, x: &UnitVector3) -> Result<Self> {
        check_pole(x)?;
        let ch = chart(x);
        let leg = AssocLegendre::new(lmax, ch.c, ch.s);
        let n = (lmax + 1) * (lmax + 1);
        let mut y = vec![[0.0; 3]; n];
        let mut z = vec![[0.0; 3]; n];
        for l in 1..=lmax {
            for k in 1..=2 * l + 1 {
                let m = k as i64 - l as i64 - 1;
                let (yy, zz) = vector_pair(&leg, &ch, l, m);
                y[harmonic_index(l, k)] = yy;
                z[harmonic_index(l, k)] = zz;
            }
        }
        Ok(VectorHarmonics { lmax, y, z })
    }

    #[inline]
    pub fn y(&self, l: usize, k: usize) -> &Vec3 {
        &self.y[harmonic_index(l, k)]
    }

    #[inline]
    pub fn z(&self, l: usize, k: usize) -> &Vec3 {
        &self.z[harmonic_index(l, k)]
    }
}
