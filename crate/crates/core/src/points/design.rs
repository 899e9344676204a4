//! Antipodal equal-weight designs refined numerically by minimum-norm
//! Gauss–Newton on the even-degree moment equations.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointSet, PointSource};
use crate::error::{Error, Result};
use crate::sphere::geometry::{dot, Vec3};
use crate::sphere::harmonics::{ScalarHarmonics, VectorHarmonics};
use crate::sphere::{tangent_frame, UnitVector3};

#[derive(Debug, Clone)]
pub struct DesignOptions {
    /// Target strength; made odd, since antipodal sets integrate odd degrees exactly.
    pub strength: usize,
    /// Number of antipodal pairs, so the set has `2 * pairs` nodes.
    pub pairs: usize,
    pub max_iter: usize,
    /// Accepted max-abs moment `|(1/N) Σ_j Y_{ℓ,k}(x_j)|`.
    pub tol: f64,
    pub seed: u64,
}

impl DesignOptions {
    /// About 14% more nodes than unknowns needed, which keeps the Jacobian
    /// comfortably full rank.
    pub fn for_strength(strength: usize) -> Self {
        let t = strength | 1;
        let equations: usize = (2..t).step_by(2).map(|l| 2 * l + 1).sum();
        DesignOptions { strength: t, pairs: (equations * 8 / 7).div_ceil(2) + 1, max_iter: 60, tol: 1e-13, seed: 1 }
    }
}

fn rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    // uniform quaternion
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos());
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn start_points(pairs: usize, seed: u64) -> Vec<UnitVector3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = rotation(&mut rng);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..pairs)
        .map(|i| {
            // upper-hemisphere Fibonacci spiral; the antipodes fill the lower half
            let z = 1.0 - (i as f64 + 0.5) / pairs as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let p = [r * phi.cos(), r * phi.sin(), z];
            let q = [dot(&rot[0], &p), dot(&rot[1], &p), dot(&rot[2], &p)];
            UnitVector3::normalize(q).expect("rotated unit vector")
        })
        .collect()
}

fn even_degrees(strength: usize) -> impl Iterator<Item = usize> {
    (2..strength).step_by(2)
}

fn residual(reps: &[UnitVector3], strength: usize) -> Vec<f64> {
    let lmax = strength - 1;
    let mut r = Vec::new();
    let tables: Vec<ScalarHarmonics> = reps.iter().map(|x| ScalarHarmonics::new(lmax, x)).collect();
    for l in even_degrees(strength) {
        for k in 1..=2 * l + 1 {
            r.push(tables.iter().map(|h| h.get(l, k)).sum::<f64>() / reps.len() as f64);
        }
    }
    r
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn jacobian(reps: &[UnitVector3], strength: usize, rows: usize) -> Result<(Mat<f64>, Vec<[Vec3; 2]>)> {
    let lmax = strength - 1;
    let n = reps.len();
    let mut jac = Mat::<f64>::zeros(rows, 2 * n);
    let mut frames = Vec::with_capacity(n);
    for (j, x) in reps.iter().enumerate() {
        let fr = tangent_frame(x);
        let h = VectorHarmonics::new(lmax, x)?;
        let mut row = 0;
        for l in even_degrees(strength) {
            let root = ((l * (l + 1)) as f64).sqrt() / n as f64;
            for k in 1..=2 * l + 1 {
                let g = h.z(l, k);
                jac[(row, 2 * j)] = root * dot(g, &fr.e1);
                jac[(row, 2 * j + 1)] = root * dot(g, &fr.e2);
                row += 1;
            }
        }
        frames.push([fr.e1, fr.e2]);
    }
    Ok((jac, frames))
}

fn moved(reps: &[UnitVector3], frames: &[[Vec3; 2]], step: &Mat<f64>, alpha: f64) -> Result<Vec<UnitVector3>> {
    reps.iter()
        .zip(frames)
        .enumerate()
        .map(|(j, (x, fr))| {
            let (a, b) = (alpha * step[(2 * j, 0)], alpha * step[(2 * j + 1, 0)]);
            let p = x.as_array();
            UnitVector3::normalize([
                p[0] + a * fr[0][0] + b * fr[1][0],
                p[1] + a * fr[0][1] + b * fr[1][1],
                p[2] + a * fr[0][2] + b * fr[1][2],
            ])
        })
        .collect()
}

/// Refines `2·pairs` antipodal nodes until every moment of even degree below
/// `strength` vanishes to `tol`. Odd degrees vanish by symmetry, so the
/// result integrates all polynomials up to degree `strength` exactly.
pub fn antipodal_design(opts: &DesignOptions) -> Result<PointSet> {
    let strength = opts.strength | 1;
    let mut reps = start_points(opts.pairs, opts.seed);
    let mut r = residual(&reps, strength);
    let rows = r.len();
    let mut mu = 1e-10;
    for iter in 0..opts.max_iter {
        let err = max_abs(&r);
        log::debug!("design t={strength} iter={iter} residual={err:e}");
        if err <= opts.tol {
            break;
        }
        let (jac, frames) = jacobian(&reps, strength, rows)?;
        let mut gram = &jac * jac.transpose();
        let diag_scale = (0..rows).map(|i| gram[(i, i)]).sum::<f64>() / rows as f64;
        for i in 0..rows {
            gram[(i, i)] += mu * diag_scale;
        }
        let llt = gram.llt(Side::Lower).map_err(|_| Error::DesignNotConverged { residual: err })?;
        let rhs = Mat::<f64>::from_fn(rows, 1, |i, _| r[i]);
        let w = llt.solve(&rhs);
        let step = jac.transpose() * &w;
        let mut accepted = false;
        let mut alpha = 1.0;
        for _ in 0..12 {
            let cand = moved(&reps, &frames, &step, -alpha)?;
            let rc = residual(&cand, strength);
            if max_abs(&rc) < err {
                reps = cand;
                r = rc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if accepted {
            mu = (mu * 0.1).max(1e-14);
        } else {
            mu *= 100.0;
            if mu > 1.0 {
                return Err(Error::DesignNotConverged { residual: err });
            }
        }
    }
    let err = max_abs(&r);
    if err > opts.tol {
        return Err(Error::DesignNotConverged { residual: err });
    }
    let mut nodes = reps.clone();
    nodes.extend(reps.iter().map(|x| x.antipode()));
    Ok(PointSet::new(nodes, PointSource::Design).with_strength(strength))
}
