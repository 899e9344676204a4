//! Benchmark tangent fields with known divergence-free and curl-free parts,
//! built from a stream function `s` and a potential `v` as `f = L* s + ∇* v`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sphere::geometry::{dot, Vec3};
use crate::sphere::harmonics::vec_sph_harms;
use crate::sphere::UnitVector3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldId {
    /// Band-limited: stream and potential are finite harmonic sums.
    Field1,
    /// Same stream function; potential is a sum of compactly supported cubic B-spline bumps.
    Field2,
}

/// Scaling of the real harmonics with `m ≠ 0` inside the field definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarmonicNorm {
    /// Unit `L2` norm for every harmonic.
    #[default]
    Orthonormal,
    /// `m ≠ 0` harmonics taken as the real part of the complex orthonormal
    /// harmonic, so their norm is `1/√2`.
    ComplexRealPart,
}

impl HarmonicNorm {
    fn factor(self, m: i64) -> f64 {
        match self {
            HarmonicNorm::ComplexRealPart if m != 0 => std::f64::consts::FRAC_1_SQRT_2,
            _ => 1.0,
        }
    }
}

impl fmt::Display for HarmonicNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HarmonicNorm::Orthonormal => "orthonormal",
            HarmonicNorm::ComplexRealPart => "complex",
        })
    }
}

impl FromStr for HarmonicNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "orthonormal" => Ok(HarmonicNorm::Orthonormal),
            "complex" => Ok(HarmonicNorm::ComplexRealPart),
            other => Err(Error::Config(format!("unknown harmonic norm '{other}' (expected orthonormal or complex)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub f: Vec3,
    pub div: Vec3,
    pub curl: Vec3,
}

/// `(degree, order m, coefficient)` of a harmonic expansion.
type Term = (usize, i64, f64);

fn stream_terms() -> [Term; 2] {
    [(1, 0, -1.0 / 3f64.sqrt()), (5, 4, 8.0 * 2f64.sqrt() / (3.0 * 385f64.sqrt()))]
}

fn potential_terms() -> [Term; 2] {
    [(4, 0, 1.0 / 25.0), (6, -3, 1.0 / 25.0)]
}

/// `Σ c √(ℓ(ℓ+1))` times the `y` (`pick_z = false`) or `z` vector harmonic.
fn harmonic_part(terms: &[Term], x: &UnitVector3, pick_z: bool, norm: HarmonicNorm) -> Result<Vec3> {
    let mut out = [0.0; 3];
    for &(l, m, c) in terms {
        let c = c * norm.factor(m);
        let (y, z) = vec_sph_harms(l, (l as i64 + 1 + m) as usize, x)?;
        let v = if pick_z { z } else { y };
        let s = c * ((l * (l + 1)) as f64).sqrt();
        for i in 0..3 {
            out[i] += s * v[i];
        }
    }
    Ok(out)
}

/// Cubic B-spline on `[0, 2)` and its derivative.
pub fn cubic_bspline(r: f64) -> (f64, f64) {
    if r < 1.0 {
        ((4.0 - 6.0 * r * r + 3.0 * r * r * r) / 6.0, -2.0 * r + 1.5 * r * r)
    } else if r < 2.0 {
        let u = 2.0 - r;
        (u * u * u / 6.0, -0.5 * u * u)
    } else {
        (0.0, 0.0)
    }
}

/// `B3'(r) / r`, finite at `r = 0`.
fn bspline_slope_over_r(r: f64) -> f64 {
    if r < 1.0 {
        -2.0 + 1.5 * r
    } else if r < 2.0 {
        -0.5 * (2.0 - r).powi(2) / r
    } else {
        0.0
    }
}

/// A radial bump `w · B3(a‖x − c‖)`.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub weight: f64,
    pub sharpness: f64,
    pub center: UnitVector3,
}

impl Bump {
    fn new(weight: f64, sharpness: f64, colatitude: f64, longitude: f64) -> Self {
        Bump { weight, sharpness, center: UnitVector3::from_spherical(colatitude, longitude) }
    }

    /// Chord radius of the support.
    pub fn support_chord(&self) -> f64 {
        2.0 / self.sharpness
    }

    pub fn value(&self, x: &UnitVector3) -> f64 {
        let r = self.sharpness * chord(x, &self.center);
        self.weight * cubic_bspline(r).0
    }

    /// Surface gradient `g'(t)(c − t x)` with `t = x·c`, `g(t) = B3(a√(2−2t))`.
    pub fn gradient(&self, x: &UnitVector3) -> Vec3 {
        let t = x.dot(&self.center);
        let r = self.sharpness * chord(x, &self.center);
        let dg = -self.weight * self.sharpness * self.sharpness * bspline_slope_over_r(r);
        let (xa, c) = (x.as_array(), self.center.as_array());
        [0, 1, 2].map(|i| dg * (c[i] - t * xa[i]))
    }
}

fn chord(x: &UnitVector3, c: &UnitVector3) -> f64 {
    (2.0 - 2.0 * x.dot(c)).max(0.0).sqrt()
}

/// The four bumps making up the second potential. Centers are placed by
/// colatitude and longitude; negative colatitudes go straight into the
/// spherical-to-Cartesian formula.
pub fn potential_bumps() -> [Bump; 4] {
    use std::f64::consts::PI;
    [
        Bump::new(1.0 / 8.0, 5.0, PI / 6.0, 0.0),
        Bump::new(-1.0 / 7.0, 3.0, PI / 5.0, -PI / 7.0),
        Bump::new(1.0 / 9.0, 5.0, -PI / 6.0, PI / 2.0),
        Bump::new(-1.0 / 8.0, 3.0, -PI / 5.0, PI / 3.0),
    ]
}

pub fn field1(x: &UnitVector3) -> Result<FieldValue> {
    field1_with(x, HarmonicNorm::Orthonormal)
}

pub fn field2(x: &UnitVector3) -> Result<FieldValue> {
    field2_with(x, HarmonicNorm::Orthonormal)
}

pub fn field1_with(x: &UnitVector3, norm: HarmonicNorm) -> Result<FieldValue> {
    let div = harmonic_part(&stream_terms(), x, false, norm)?;
    let curl = harmonic_part(&potential_terms(), x, true, norm)?;
    Ok(FieldValue { f: [0, 1, 2].map(|i| div[i] + curl[i]), div, curl })
}

pub fn field2_with(x: &UnitVector3, norm: HarmonicNorm) -> Result<FieldValue> {
    let div = harmonic_part(&stream_terms(), x, false, norm)?;
    let mut curl = [0.0; 3];
    for b in potential_bumps() {
        let g = b.gradient(x);
        for i in 0..3 {
            curl[i] += g[i];
        }
    }
    Ok(FieldValue { f: [0, 1, 2].map(|i| div[i] + curl[i]), div, curl })
}

/// Potential of the second field.
pub fn field2_potential(x: &UnitVector3) -> f64 {
    potential_bumps().iter().map(|b| b.value(x)).sum()
}

impl FieldId {
    pub fn eval(self, x: &UnitVector3) -> Result<FieldValue> {
        self.eval_with(x, HarmonicNorm::Orthonormal)
    }

    pub fn eval_with(self, x: &UnitVector3, norm: HarmonicNorm) -> Result<FieldValue> {
        match self {
            FieldId::Field1 => field1_with(x, norm),
            FieldId::Field2 => field2_with(x, norm),
        }
    }

    /// Largest normal component over the three outputs, for sanity checks.
    pub fn tangency_defect(self, x: &UnitVector3) -> Result<f64> {
        let v = self.eval(x)?;
        Ok([v.f, v.div, v.curl].iter().map(|u| dot(x.as_array(), u).abs()).fold(0.0, f64::max))
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldId::Field1 => "field1",
            FieldId::Field2 => "field2",
        })
    }
}

impl FromStr for FieldId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "field1" => Ok(FieldId::Field1),
            "2" | "field2" => Ok(FieldId::Field2),
            other => Err(Error::Config(format!("unknown field '{other}' (expected field1 or field2)"))),
        }
    }
}
