use std::f64::consts::PI;

use super::{KernelValues, Zonal};
use crate::sphere::legendre::legendre_into;

/// Zonal kernel given by a finite Legendre expansion
/// `ψ(t) = Σ_{ℓ≤L} (2ℓ+1)/(4π) ψ̂(ℓ) P_ℓ(t)`.
///
/// κ and `c_Q = (1-t²)κ'` are summed term by term, so the matrix kernels built
/// from it are exact finite sums of vector harmonic products.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesKernel {
    coeffs: Vec<f64>,
}

impl SeriesKernel {
    pub fn new(coeffs: Vec<f64>) -> Self {
        SeriesKernel { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Zonal for SeriesKernel {
    fn values(&self, t: f64) -> KernelValues {
        let n = self.coeffs.len();
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        legendre_into(t, &mut p, &mut dp);
        let mut psi = 0.0;
        let mut psi_tail = 0.0;
        let mut kappa = 0.0;
        for (l, &c) in self.coeffs.iter().enumerate() {
            let lf = l as f64;
            let term = (2.0 * lf + 1.0) / (4.0 * PI) * c * p[l];
            psi += term;
            if l >= 1 {
                psi_tail += term;
                kappa += (2.0 * lf + 1.0) / (4.0 * PI * lf * (lf + 1.0)) * c * dp[l];
            }
        }
        // (1-t²)P_ℓ'' = 2tP_ℓ' - ℓ(ℓ+1)P_ℓ, summed
        let cq = 2.0 * t * kappa - psi_tail;
        KernelValues { psi, kappa, cq }
    }
}
