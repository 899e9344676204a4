use std::f64::consts::PI;

use super::{KernelFamily, ZonalKernel};
use crate::quadrature::GaussLegendre;

/// `ψ̂(ℓ) = 2π ∫_{-1}^{1} ψ(t) P_ℓ(t) dt` for `ℓ = 0..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    pub kernel: String,
    pub values: Vec<f64>,
    /// Gauss–Legendre nodes per panel, `None` when a closed form was used.
    pub n_quad: Option<usize>,
}

impl FourierCoeffs {
    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }
}

pub fn default_quad_nodes(degree: usize) -> usize {
    (4 * degree).max(512)
}

/// Closed forms for the Poisson (`α^ℓ`) and Gaussian (scaled modified
/// spherical Bessel) families; quadrature for the Wendland families. The
/// Gaussian coefficients fall below the rounding floor of any quadrature
/// after a few dozen degrees, so the closed form is the only way to resolve them.
pub fn fourier_coeffs(kernel: &ZonalKernel, degree: usize, n_quad: usize) -> FourierCoeffs {
    let values = match kernel.family() {
        KernelFamily::Poisson => {
            let a = 1.0 - kernel.rho();
            (0..=degree).map(|l| a.powi(l as i32)).collect()
        }
        KernelFamily::Gaussian => {
            let mut acc = vec![0.0; degree + 1];
            for c in kernel.components() {
                for (a, v) in acc.iter_mut().zip(gaussian_coeffs(c.scale, degree)) {
                    *a += c.weight * v;
                }
            }
            acc
        }
        KernelFamily::WE31 | KernelFamily::WE32 => return fourier_coeffs_quadrature(kernel, degree, n_quad),
    };
    FourierCoeffs { kernel: kernel.to_string(), values, n_quad: None }
}

/// `ψ̂(ℓ) = 2z e^{-z} i_ℓ(z) / (1 - e^{-2z})` with `z = 1/ρ²`. The ratios
/// `i_ℓ / i_{ℓ-1}` come from the backward continued fraction, which is stable
/// for the minimal solution; `ψ̂(0) = 1` exactly.
fn gaussian_coeffs(rho: f64, degree: usize) -> Vec<f64> {
    let z = 1.0 / (rho * rho);
    let top = degree + z.ceil() as usize + 60;
    let mut ratio = vec![0.0; degree + 1];
    let mut r = 0.0;
    for l in (1..=top).rev() {
        r = 1.0 / ((2.0 * l as f64 + 1.0) / z + r);
        if l <= degree {
            ratio[l] = r;
        }
    }
    let mut out = vec![1.0; degree + 1];
    for l in 1..=degree {
        out[l] = out[l - 1] * ratio[l];
    }
    out
}

/// Gauss–Legendre in the chord variable `s = √(2 - 2t)`, so `dt = s ds` and
/// the kernel peak at `t = 1` sits at the smooth end `s = 0`. The interval is
/// split at every support radius (Wendland) or at `8ρ` (others), with
/// `n_quad` nodes per panel.
pub fn fourier_coeffs_quadrature(kernel: &ZonalKernel, degree: usize, n_quad: usize) -> FourierCoeffs {
    let rule = GaussLegendre::new(n_quad.max(2));
    let mut breaks = vec![0.0, 2.0];
    for c in kernel.components() {
        let b = if kernel.family().is_compact() { c.scale } else { 8.0 * c.scale };
        if b < 2.0 {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut acc = vec![0.0; degree + 1];
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = mid + half * x;
            let t = 1.0 - 0.5 * s * s;
            let g = w * half * s * kernel.psi(t);
            let (mut p0, mut p1) = (1.0, t);
            acc[0] += g;
            if degree >= 1 {
                acc[1] += g * t;
            }
            for l in 1..degree {
                let lf = l as f64;
                let p2 = ((2.0 * lf + 1.0) * t * p1 - lf * p0) / (lf + 1.0);
                acc[l + 1] += g * p2;
                p0 = p1;
                p1 = p2;
            }
        }
    }
    FourierCoeffs {
        kernel: kernel.to_string(),
        values: acc.into_iter().map(|v| 2.0 * PI * v).collect(),
        n_quad: Some(n_quad),
    }
}
