//! Scaled zonal kernels, their auxiliary antiderivative κ and the
//! cancellation-free coefficient `c_Q = 1/(4π) - ψ + 2tκ`.

mod family;
mod fourier;
mod series;

pub use family::KernelFamily;
pub use fourier::{default_quad_nodes, fourier_coeffs, fourier_coeffs_quadrature, FourierCoeffs};
pub use series::SeriesKernel;

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Width of the band `|1 - t²| < EPS_END` where κ switches to its endpoint
/// limits and `c_Q` is returned as exactly zero.
pub const EPS_END: f64 = 1e-9;

const FOUR_PI: f64 = 4.0 * PI;
const EIGHT_PI: f64 = 8.0 * PI;

/// Default scale sets for the higher-order combinations, indexed by order.
pub fn default_scales(order: u32) -> Option<&'static [f64]> {
    match order {
        4 => Some(&[0.5, 2.0 / 3.0]),
        6 => Some(&[1.0 / 3.0, 2.0 / 3.0, 1.0]),
        8 => Some(&[0.25, 0.5, 0.75, 1.0]),
        _ => None,
    }
}

/// `ψ`, `κ` and `c_Q` at one value of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValues {
    pub psi: f64,
    pub kappa: f64,
    pub cq: f64,
}

/// Anything that can feed the matrix kernels: a zonal function together with
/// its auxiliary function and the `Q̃`/`Ṽ` coefficient.
pub trait Zonal: Sync {
    /// Values at `t`, which the caller guarantees to lie in `[-1, 1]`.
    fn values(&self, t: f64) -> KernelValues;

    /// `(κ, c_Q)` only; the hot path of quasi-interpolation.
    #[inline]
    fn kappa_cq(&self, t: f64) -> (f64, f64) {
        let v = self.values(t);
        (v.kappa, v.cq)
    }
}

/// One term `weight · ψ(t; scale)` of a combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub scale: f64,
    mass: f64,
}

impl Component {
    fn new(family: KernelFamily, weight: f64, scale: f64) -> Self {
        Component { weight, scale, mass: family.mass(scale) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZonalKernel {
    family: KernelFamily,
    rho: f64,
    order: u32,
    components: Vec<Component>,
    scales: Option<Vec<f64>>,
}

impl ZonalKernel {
    /// Base kernel (`order` 1 for Poisson, 2 otherwise) or the default
    /// combination for orders 4, 6, 8.
    pub fn new(family: KernelFamily, rho: f64, order: u32) -> Result<Self> {
        family.check_rho(rho)?;
        if family == KernelFamily::Poisson {
            if order != 1 {
                return Err(Error::InvalidKernel(format!("poisson kernel has order 1, got {order}")));
            }
            return Ok(Self::single(family, rho, 1));
        }
        match order {
            2 => Ok(Self::single(family, rho, 2)),
            4 | 6 | 8 => make_combo(family, rho, default_scales(order).unwrap()),
            _ => Err(Error::InvalidKernel(format!("order {order} not in {{2, 4, 6, 8}}"))),
        }
    }

    fn single(family: KernelFamily, rho: f64, order: u32) -> Self {
        ZonalKernel {
            family,
            rho,
            order,
            components: vec![Component::new(family, 1.0, rho)],
            scales: None,
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The `a_j` of a combination, `None` for a base kernel.
    pub fn scales(&self) -> Option<&[f64]> {
        self.scales.as_deref()
    }

    /// Same family, order and scale set at a different `ρ`.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        match &self.scales {
            Some(a) => make_combo(self.family, rho, a),
            None => {
                self.family.check_rho(rho)?;
                Ok(Self::single(self.family, rho, self.order))
            }
        }
    }

    /// Largest chord length at which `ψ` is non-zero, for compactly supported families.
    pub fn support_chord(&self) -> Option<f64> {
        if self.family.is_compact() {
            self.components.iter().map(|c| c.scale).reduce(f64::max)
        } else {
            None
        }
    }

    #[inline]
    pub fn psi(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for c in &self.components {
            s += c.weight * self.family.psi(t, c.scale);
        }
        s
    }

    #[inline]
    pub fn kappa(&self, t: f64) -> f64 {
        self.values(t).kappa
    }

    #[inline]
    pub fn cq(&self, t: f64) -> f64 {
        self.values(t).cq
    }
}

impl Zonal for ZonalKernel {
    #[inline]
    fn values(&self, t: f64) -> KernelValues {
        let one_minus_t2 = (1.0 - t) * (1.0 + t);
        let endpoint = one_minus_t2 < EPS_END;
        let mut psi = 0.0;
        let mut kappa = 0.0;
        for c in &self.components {
            let (p, k) = if !endpoint {
                self.family.psi_kappa(t, c.scale, c.mass)
            } else if t > 0.0 {
                (self.family.psi(t, c.scale), (FOUR_PI * self.family.psi(1.0, c.scale) - 1.0) / EIGHT_PI)
            } else {
                (self.family.psi(t, c.scale), (1.0 - FOUR_PI * self.family.psi(-1.0, c.scale)) / EIGHT_PI)
            };
            psi += c.weight * p;
            kappa += c.weight * k;
        }
        let cq = if endpoint { 0.0 } else { 1.0 / FOUR_PI - psi + 2.0 * t * kappa };
        KernelValues { psi, kappa, cq }
    }
}

impl fmt::Display for ZonalKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} m={} rho={}", self.family, self.order, self.rho)
    }
}

/// `ψ_m(t; ρ) = Σ_j c_j ψ(t; √a_j ρ)` with `c_j = Π_{k≠j} a_k / (a_k - a_j)`,
/// which keeps `Σ c_j = 1`.
pub fn make_combo(family: KernelFamily, rho: f64, a: &[f64]) -> Result<ZonalKernel> {
    if family == KernelFamily::Poisson {
        return Err(Error::InvalidKernel("combinations need a Gaussian or Wendland base".into()));
    }
    family.check_rho(rho)?;
    if a.is_empty() || a.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidKernel("scale factors must be positive".into()));
    }
    for (j, &aj) in a.iter().enumerate() {
        if a[j + 1..].iter().any(|&ak| (ak - aj).abs() < 1e-12) {
            return Err(Error::DuplicateScale);
        }
    }
    let components = a
        .iter()
        .enumerate()
        .map(|(j, &aj)| {
            let weight = a
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &ak)| ak / (ak - aj))
                .product();
            Component::new(family, weight, aj.sqrt() * rho)
        })
        .collect();
    Ok(ZonalKernel {
        family,
        rho,
        order: 2 * a.len() as u32,
        components,
        scales: Some(a.to_vec()),
    })
}

fn check_t(t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain { t });
    }
    Ok(t.clamp(-1.0, 1.0))
}

pub fn psi_eval(kernel: &ZonalKernel, t: f64) -> Result<f64> {
    Ok(kernel.psi(check_t(t)?))
}

pub fn kappa_eval(kernel: &ZonalKernel, t: f64) -> Result<f64> {
    Ok(kernel.kappa(check_t(t)?))
}

/// `c_Q(t)`; arguments are clamped to `[-1, 1]`.
pub fn cq_eval(kernel: &ZonalKernel, t: f64) -> f64 {
    kernel.cq(t.clamp(-1.0, 1.0))
}
