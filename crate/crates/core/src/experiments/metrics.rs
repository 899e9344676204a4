use std::f64::consts::PI;

use crate::error::Result;
use crate::fields::FieldValue;
use crate::qi::DecompositionResult;
use crate::sphere::{UnitVector3, Vec3};
use crate::sum::pairwise_sum;

fn squared_defects(exact: &[Vec3], approx: &[Vec3]) -> Vec<f64> {
    assert_eq!(exact.len(), approx.len(), "exact and approximate values differ in length");
    exact.iter().zip(approx).map(|(a, b)| (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()).collect()
}

/// `sqrt((4π/|Y|) Σ_y |f(y) − s(y)|²)`.
pub fn l2_error_values(exact: &[Vec3], approx: &[Vec3]) -> f64 {
    (4.0 * PI / exact.len() as f64 * pairwise_sum(&squared_defects(exact, approx))).sqrt()
}

/// `sqrt((1/|Y|) Σ_y |f(y) − s(y)|²)`.
pub fn rmse_values(exact: &[Vec3], approx: &[Vec3]) -> f64 {
    (pairwise_sum(&squared_defects(exact, approx)) / exact.len() as f64).sqrt()
}

/// Discrete `L2` error of the combined output against an exact field.
pub fn l2_error<F: Fn(&UnitVector3) -> Result<Vec3>>(exact: F, approx: &DecompositionResult) -> Result<f64> {
    let e = approx.eval_points.iter().map(exact).collect::<Result<Vec<_>>>()?;
    Ok(l2_error_values(&e, &approx.combined))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    pub combined: f64,
    pub div: f64,
    pub curl: f64,
}

pub fn component_errors(exact: &[FieldValue], approx: &DecompositionResult) -> ErrorTriple {
    let pick = |f: fn(&FieldValue) -> Vec3| exact.iter().map(f).collect::<Vec<_>>();
    ErrorTriple {
        combined: l2_error_values(&pick(|v| v.f), &approx.combined),
        div: l2_error_values(&pick(|v| v.div), &approx.div),
        curl: l2_error_values(&pick(|v| v.curl), &approx.curl),
    }
}

/// `log(e_{i-1}/e_i) / log(h_{i-1}/h_i)`; the first entry is `None`.
pub fn rates(h: &[f64], err: &[f64]) -> Vec<Option<f64>> {
    (0..err.len()).map(|i| (i > 0).then(|| (err[i - 1] / err[i]).ln() / (h[i - 1] / h[i]).ln())).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Cost at which `err` first reaches `target`, interpolated log-linearly
/// between the bracketing runs. `None` if no run reaches it.
pub fn cost_at_error(err: &[f64], cost: &[f64], target: f64) -> Option<f64> {
    if let Some(first) = err.first() {
        if *first <= target {
            return Some(cost[0]);
        }
    }
    for i in 1..err.len() {
        if err[i] <= target && err[i - 1] > target {
            let s = (target.ln() - err[i - 1].ln()) / (err[i].ln() - err[i - 1].ln());
            return Some((cost[i - 1].ln() + s * (cost[i].ln() - cost[i - 1].ln())).exp());
        }
    }
    None
}

/// Cost at `target` from the least-squares log–log line of cost against
/// error; used when no run reaches the target. `None` for fewer than two runs
/// or a fit where cost does not fall as the error grows.
pub fn extrapolate_cost(err: &[f64], cost: &[f64], target: f64) -> Option<f64> {
    if err.len() < 2 {
        return None;
    }
    let slope = loglog_slope(err, cost);
    if !(slope < 0.0) {
        return None;
    }
    let n = err.len() as f64;
    let mx = err.iter().map(|v| v.ln()).sum::<f64>() / n;
    let my = cost.iter().map(|v| v.ln()).sum::<f64>() / n;
    Some((my + slope * (target.ln() - mx)).exp())
}

/// Median of a non-empty sample.
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
