//! Divergence-free and curl-free matrix kernels
//! `Ψ^div = c_Q Q̃ + κ R`, `Ψ^curl = c_Q Ṽ + κ W`.

use crate::kernels::Zonal;
use crate::sphere::geometry::{cross, dot, Matrix3, UnitVector3, Vec3};
use crate::sphere::tensors::{zonal_tensors, EPS_POLE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixKernelEval {
    pub div: Matrix3,
    pub curl: Matrix3,
    pub combined: Matrix3,
}

pub fn eval_div<K: Zonal + ?Sized>(kernel: &K, x: &UnitVector3, y: &UnitVector3) -> Matrix3 {
    let z = zonal_tensors(x, y);
    let (kappa, cq) = kernel.kappa_cq(z.t);
    z.q_tilde.scaled(cq) + z.r.scaled(kappa)
}

pub fn eval_curl<K: Zonal + ?Sized>(kernel: &K, x: &UnitVector3, y: &UnitVector3) -> Matrix3 {
    let z = zonal_tensors(x, y);
    let (kappa, cq) = kernel.kappa_cq(z.t);
    z.v_tilde.scaled(cq) + z.w.scaled(kappa)
}

pub fn eval_combined<K: Zonal + ?Sized>(kernel: &K, x: &UnitVector3, y: &UnitVector3) -> MatrixKernelEval {
    let z = zonal_tensors(x, y);
    let (kappa, cq) = kernel.kappa_cq(z.t);
    let div = z.q_tilde.scaled(cq) + z.r.scaled(kappa);
    let curl = z.v_tilde.scaled(cq) + z.w.scaled(kappa);
    MatrixKernelEval { div, curl, combined: div + curl }
}

/// Everything about a node pair that does not depend on the data vector.
#[derive(Debug, Clone, Copy)]
pub struct PairTerms {
    x: Vec3,
    y: Vec3,
    t: f64,
    kappa: f64,
    cq: f64,
    n: Vec3,
    sin2: f64,
}

impl PairTerms {
    #[inline]
    pub fn new<K: Zonal + ?Sized>(kernel: &K, x: &Vec3, y: &Vec3) -> Self {
        let t = dot(x, y);
        let (kappa, cq) = kernel.kappa_cq(t);
        let n = cross(x, y);
        PairTerms { x: *x, y: *y, t, kappa, cq, n, sin2: dot(&n, &n) }
    }

    /// `(Ψ^div f, Ψ^curl f)`.
    #[inline]
    pub fn apply(&self, f: &Vec3) -> (Vec3, Vec3) {
        let (x, y, t, kappa, cq) = (&self.x, &self.y, self.t, self.kappa, self.cq);
        let xf = dot(x, f);
        let yf = dot(y, f);
        // g = (I - y y^T) f, so R f = t f - y (x·f) and W f = (I - x x^T) g
        let g = [f[0] - yf * y[0], f[1] - yf * y[1], f[2] - yf * y[2]];
        let xg = dot(x, &g);
        let mut div = [0.0; 3];
        let mut curl = [0.0; 3];
        for i in 0..3 {
            div[i] = kappa * (t * f[i] - y[i] * xf);
            curl[i] = kappa * (g[i] - x[i] * xg);
        }
        if self.sin2 >= EPS_POLE && cq != 0.0 {
            let a = -cq * dot(&self.n, f) / self.sin2;
            // Ṽ f = (y - t x) ((x - t y)·f) / sin²
            let b = cq * (xf - t * yf) / self.sin2;
            for i in 0..3 {
                div[i] += a * self.n[i];
                curl[i] += b * (y[i] - t * x[i]);
            }
        }
        (div, curl)
    }
}

/// `(Ψ^div(x, y) f, Ψ^curl(x, y) f)` without forming either matrix.
/// `f` may carry a component normal to `y`; the kernels remove it.
#[inline]
pub fn apply<K: Zonal + ?Sized>(kernel: &K, x: &Vec3, y: &Vec3, f: &Vec3) -> (Vec3, Vec3) {
    PairTerms::new(kernel, x, y).apply(f)
}

#[cfg(any(test, feature = "diagnostics"))]
pub use series::{eval_curl_series, eval_div_series, series_pair};

#[cfg(any(test, feature = "diagnostics"))]
mod series {
    use crate::error::Result;
    use crate::kernels::FourierCoeffs;
    use crate::sphere::geometry::{Matrix3, UnitVector3};
    use crate::sphere::harmonics::VectorHarmonics;

    /// Degree-`L` partial sums `Σ_ℓ ψ̂(ℓ) Σ_k y_{ℓ,k}(x) y_{ℓ,k}(y)^T` and the
    /// same with `z`, from precomputed harmonics of degree at least `L`.
    pub fn series_pair(coeffs: &[f64], hx: &VectorHarmonics, hy: &VectorHarmonics) -> (Matrix3, Matrix3) {
        let mut div = [[0.0; 3]; 3];
        let mut curl = [[0.0; 3]; 3];
        for (l, &c) in coeffs.iter().enumerate().skip(1) {
            let mut dl = [[0.0; 3]; 3];
            let mut cl = [[0.0; 3]; 3];
            for k in 1..=2 * l + 1 {
                let (yx, yy) = (hx.y(l, k), hy.y(l, k));
                let (zx, zy) = (hx.z(l, k), hy.z(l, k));
                for i in 0..3 {
                    for j in 0..3 {
                        dl[i][j] += yx[i] * yy[j];
                        cl[i][j] += zx[i] * zy[j];
                    }
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    div[i][j] += c * dl[i][j];
                    curl[i][j] += c * cl[i][j];
                }
            }
        }
        (Matrix3(div), Matrix3(curl))
    }

    fn both(coeffs: &FourierCoeffs, x: &UnitVector3, y: &UnitVector3) -> Result<(Matrix3, Matrix3)> {
        let degree = coeffs.degree();
        if degree == 0 {
            return Ok((Matrix3::ZERO, Matrix3::ZERO));
        }
        let hx = VectorHarmonics::new(degree, x)?;
        let hy = VectorHarmonics::new(degree, y)?;
        Ok(series_pair(&coeffs.values, &hx, &hy))
    }

    pub fn eval_div_series(coeffs: &FourierCoeffs, x: &UnitVector3, y: &UnitVector3) -> Result<Matrix3> {
        Ok(both(coeffs, x, y)?.0)
    }

    pub fn eval_curl_series(coeffs: &FourierCoeffs, x: &UnitVector3, y: &UnitVector3) -> Result<Matrix3> {
        Ok(both(coeffs, x, y)?.1)
    }
}
