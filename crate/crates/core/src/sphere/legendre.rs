//! Legendre polynomials `P_l` normalized by `P_l(1) = 1`, and their derivatives.

use crate::error::{Error, Result};

/// Tolerance on `|t| - 1` before a Legendre argument is rejected.
const DOMAIN_SLACK: f64 = 1e-12;

/// Values `P_l(t)` and `P_l'(t)` for `l = 0..=degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTable {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
}

fn check_domain(t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::Domain { t });
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Three-term recurrence for `P_l` and the derivative recurrence
/// `P'_{l+1} = P'_{l-1} + (2l+1) P_l`.
pub fn legendre_all(degree: usize, t: f64) -> Result<LegendreTable> {
    let t = check_domain(t)?;
    let mut p = vec![0.0; degree + 1];
    let mut dp = vec![0.0; degree + 1];
    legendre_into(t, &mut p, &mut dp);
    Ok(LegendreTable { p, dp })
}

/// Fills `p[l] = P_l(t)` and `dp[l] = P_l'(t)` for `l < p.len()`. No domain check.
#[inline]
pub fn legendre_into(t: f64, p: &mut [f64], dp: &mut [f64]) {
    let n = p.len();
    debug_assert_eq!(n, dp.len());
    if n == 0 {
        return;
    }
    p[0] = 1.0;
    dp[0] = 0.0;
    if n == 1 {
        return;
    }
    p[1] = t;
    dp[1] = 1.0;
    for l in 1..n - 1 {
        let lf = l as f64;
        p[l + 1] = ((2.0 * lf + 1.0) * t * p[l] - lf * p[l - 1]) / (lf + 1.0);
        dp[l + 1] = dp[l - 1] + (2.0 * lf + 1.0) * p[l];
    }
}

/// `P_l`, `P_l'` and `P_l''` for `l = 0..=degree`; the second derivative comes
/// from differentiating the derivative recurrence once more.
pub fn legendre_all_with_second(degree: usize, t: f64) -> Result<(LegendreTable, Vec<f64>)> {
    let table = legendre_all(degree, t)?;
    let mut d2 = vec![0.0; degree + 1];
    for l in 1..degree {
        d2[l + 1] = d2[l - 1] + (2.0 * l as f64 + 1.0) * table.dp[l];
    }
    Ok((table, d2))
}

/// Single `P_l(t)`.
pub fn legendre_p(degree: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if degree == 0 {
        return 1.0;
    }
    for l in 1..degree {
        let lf = l as f64;
        let p2 = ((2.0 * lf + 1.0) * t * p1 - lf * p0) / (lf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}
