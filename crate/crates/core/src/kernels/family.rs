use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Poisson,
    Gaussian,
    WE31,
    WE32,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] =
        [KernelFamily::Poisson, KernelFamily::Gaussian, KernelFamily::WE31, KernelFamily::WE32];

    pub fn is_compact(self) -> bool {
        matches!(self, KernelFamily::WE31 | KernelFamily::WE32)
    }

    /// Poisson needs `α = 1 - ρ > 0`; the Wendland kernels stay well defined
    /// while the support misses the antipode, i.e. `ρ < 2`.
    pub(crate) fn check_rho(self, rho: f64) -> Result<()> {
        let upper = if self.is_compact() { 2.0 } else { 1.0 };
        if rho > 0.0 && rho < upper {
            Ok(())
        } else {
            Err(Error::InvalidKernel(format!("{self}: rho={rho} outside (0, {upper})")))
        }
    }

    /// `ψ(t; ρ)` normalized to unit mass on the sphere.
    #[inline]
    pub fn psi(self, t: f64, rho: f64) -> f64 {
        match self {
            KernelFamily::Poisson => {
                let a = 1.0 - rho;
                let d2 = 1.0 - 2.0 * a * t + a * a;
                (1.0 - a * a) / (FOUR_PI * d2 * d2.sqrt())
            }
            KernelFamily::Gaussian => {
                let r2 = rho * rho;
                let e = (-2.0 / r2).exp();
                (-(1.0 - t) / r2).exp() / (2.0 * PI * r2 * (1.0 - e))
            }
            KernelFamily::WE31 => {
                let r = wendland_r(t, rho);
                if r >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - r;
                let s2 = s * s;
                7.0 * s2 * s2 * (4.0 * r + 1.0) / (PI * rho * rho)
            }
            KernelFamily::WE32 => {
                let r = wendland_r(t, rho);
                if r >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - r;
                let s3 = s * s * s;
                3.0 * s3 * s3 * ((35.0 * r + 18.0) * r + 3.0) / (PI * rho * rho)
            }
        }
    }

    /// κ away from `t = ±1`, in forms that divide out the `1 ∓ t` factor of
    /// the numerator analytically.
    #[inline]
    pub fn kappa(self, t: f64, rho: f64) -> f64 {
        match self {
            KernelFamily::Poisson => {
                let a = 1.0 - rho;
                let d = (1.0 - 2.0 * a * t + a * a).sqrt();
                a * (3.0 + 2.0 * a * t - a * a) / (FOUR_PI * d * ((1.0 + a * t) * d + (1.0 - a * a)))
            }
            KernelFamily::Gaussian => {
                let r2 = rho * rho;
                let mass = 1.0 - (-2.0 / r2).exp();
                let u = (1.0 - t) / r2;
                if t >= 0.0 {
                    (2.0 * expm1_ratio(u) / (r2 * mass) - 1.0) / (FOUR_PI * (1.0 + t))
                } else {
                    let w = (1.0 + t) / r2;
                    (1.0 - 2.0 * (-u).exp() * expm1_ratio(w) / (r2 * mass)) / (FOUR_PI * (1.0 - t))
                }
            }
            KernelFamily::WE31 | KernelFamily::WE32 => {
                let r = wendland_r(t, rho);
                if r >= 1.0 {
                    return 1.0 / (FOUR_PI * (1.0 - t));
                }
                let q = if self == KernelFamily::WE31 { we31_q(r) } else { we32_q(r) };
                (2.0 * q - 0.5 * rho * rho) / (2.0 * PI * rho * rho * (1.0 + t))
            }
        }
    }

    /// `(ψ, κ)` away from the endpoints, sharing work between the two.
    /// `mass` is the Gaussian normalization `1 - e^{-2/ρ²}` and is ignored by
    /// the other families.
    #[inline]
    pub(crate) fn psi_kappa(self, t: f64, rho: f64, mass: f64) -> (f64, f64) {
        match self {
            KernelFamily::Gaussian => {
                let r2 = rho * rho;
                let u = (1.0 - t) / r2;
                let eu = (-u).exp();
                let psi = eu / (2.0 * PI * r2 * mass);
                let kappa = if t >= 0.0 {
                    let ratio = if u < 0.5 { expm1_ratio(u) } else { (1.0 - eu) / u };
                    (2.0 * ratio / (r2 * mass) - 1.0) / (FOUR_PI * (1.0 + t))
                } else {
                    let w = (1.0 + t) / r2;
                    // e^{-u} (1 - e^{-w}) = e^{-u} - e^{-2/ρ²}
                    let tail = if w < 0.5 { eu * expm1_ratio(w) } else { (eu - (1.0 - mass)) / w };
                    (1.0 - 2.0 * tail / (r2 * mass)) / (FOUR_PI * (1.0 - t))
                };
                (psi, kappa)
            }
            _ => (self.psi(t, rho), self.kappa(t, rho)),
        }
    }

    /// Normalization constant passed to [`Self::psi_kappa`].
    pub(crate) fn mass(self, rho: f64) -> f64 {
        match self {
            KernelFamily::Gaussian => -(-2.0 / (rho * rho)).exp_m1(),
            _ => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Poisson => "poisson",
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::WE31 => "we31",
            KernelFamily::WE32 => "we32",
        }
    }
}

#[inline]
fn wendland_r(t: f64, rho: f64) -> f64 {
    (2.0 - 2.0 * t).max(0.0).sqrt() / rho
}

/// `(1 - e^{-u}) / u`, equal to 1 at `u = 0`.
#[inline]
fn expm1_ratio(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        -(-u).exp_m1() / u
    }
}

// (1 - (1-r)^5 (8r² + 5r + 1)) / r²
#[inline]
fn we31_q(r: f64) -> f64 {
    let r2 = r * r;
    7.0 + r2 * (-35.0 + r * (56.0 + r * (-35.0 + 8.0 * r)))
}

// (1 - (1-r)^7 (21r³ + 19r² + 7r + 1)) / r²
#[inline]
fn we32_q(r: f64) -> f64 {
    let r2 = r * r;
    9.0 + r2 * (-42.0 + r2 * (210.0 + r * (-384.0 + r * (315.0 + r * (-128.0 + 21.0 * r)))))
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poisson" => Ok(KernelFamily::Poisson),
            "gaussian" | "gauss" => Ok(KernelFamily::Gaussian),
            "we31" | "we3,1" | "wendland31" => Ok(KernelFamily::WE31),
            "we32" | "we3,2" | "wendland32" => Ok(KernelFamily::WE32),
            other => Err(Error::InvalidKernel(format!("unknown kernel family '{other}'"))),
        }
    }
}
