//! Matrix-valued SBF interpolation: the dense baseline the quasi-interpolant
//! is compared against. Unknowns are two tangent-frame coefficients per node,
//! and the kernel is `Ψ^div + Ψ^curl`.

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::kernels::Zonal;
use crate::matrix_kernels::apply;
use crate::par::{map_indices, ExecMode};
use crate::points::PointSet;
use crate::qi::{kernel_sums, DecompositionResult, VectorFieldSamples};
use crate::sphere::geometry::{dot, Vec3};
use crate::sphere::{tangent_frame, TangentFrame, UnitVector3};

/// A Cholesky pivot `L_ii²` below this fraction of the largest diagonal entry
/// counts as a failed factorization.
pub const PIVOT_FLOOR: f64 = 1e-14;
/// Diagonal shift for the single retry, relative to the mean diagonal.
pub const JITTER: f64 = 1e-12;

pub struct InterpSystem<K> {
    pub kernel: K,
    pub nodes: PointSet,
    pub frames: Vec<TangentFrame>,
    pub matrix: Mat<f64>,
    pub rhs: Vec<f64>,
    pub factor: Option<Llt<f64>>,
    pub coeffs: Option<Vec<f64>>,
    /// Set when the retry with a diagonal shift was needed.
    pub jittered: bool,
    /// `‖A c − d‖ / ‖d‖` after solving.
    pub residual: Option<f64>,
}

fn block<K: Zonal + ?Sized>(kernel: &K, x: &UnitVector3, fx: &TangentFrame, y: &UnitVector3, fy: &TangentFrame) -> [[f64; 2]; 2] {
    let mut b = [[0.0; 2]; 2];
    for (beta, e) in [fy.e1, fy.e2].iter().enumerate() {
        let (d, c) = apply(kernel, x.as_array(), y.as_array(), e);
        let s = [d[0] + c[0], d[1] + c[1], d[2] + c[2]];
        b[0][beta] = dot(&fx.e1, &s);
        b[1][beta] = dot(&fx.e2, &s);
    }
    b
}

pub fn assemble<K: Zonal + Clone>(kernel: &K, samples: &VectorFieldSamples) -> InterpSystem<K> {
    assemble_with(kernel, samples, ExecMode::Parallel)
}

/// Builds the symmetric `2N × 2N` system. Rows of blocks are computed in
/// parallel for `j ≥ i` and mirrored.
pub fn assemble_with<K: Zonal + Clone>(kernel: &K, samples: &VectorFieldSamples, mode: ExecMode) -> InterpSystem<K> {
    let nodes = &samples.points.nodes;
    let n = nodes.len();
    let frames: Vec<TangentFrame> = nodes.iter().map(tangent_frame).collect();
    let rows = map_indices(n, mode, |i| (i..n).map(|j| block(kernel, &nodes[i], &frames[i], &nodes[j], &frames[j])).collect::<Vec<_>>());
    let mut matrix = Mat::<f64>::zeros(2 * n, 2 * n);
    for (i, row) in rows.iter().enumerate() {
        for (off, b) in row.iter().enumerate() {
            let j = i + off;
            for a in 0..2 {
                for c in 0..2 {
                    matrix[(2 * i + a, 2 * j + c)] = b[a][c];
                    matrix[(2 * j + c, 2 * i + a)] = b[a][c];
                }
            }
        }
    }
    let rhs = samples.values.iter().zip(&frames).flat_map(|(v, f)| [dot(&f.e1, &v.v), dot(&f.e2, &v.v)]).collect();
    InterpSystem {
        kernel: kernel.clone(),
        nodes: samples.points.clone(),
        frames,
        matrix,
        rhs,
        factor: None,
        coeffs: None,
        jittered: false,
        residual: None,
    }
}

fn factorize(a: &Mat<f64>) -> Option<Llt<f64>> {
    let n = a.nrows();
    let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0, f64::max);
    let llt = a.llt(Side::Lower).ok()?;
    let l = llt.L();
    let min_pivot = (0..n).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    (min_pivot > PIVOT_FLOOR * max_diag).then_some(llt)
}

impl<K: Zonal> InterpSystem<K> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Cholesky solve; retries once with a diagonal shift of
    /// `JITTER · trace / 2N` and fails with `NotSpd` if that also fails.
    pub fn solve(mut self) -> Result<Self> {
        let dim = self.matrix.nrows();
        let factor = match factorize(&self.matrix) {
            Some(f) => f,
            None => {
                let shift = JITTER * (0..dim).map(|i| self.matrix[(i, i)]).sum::<f64>() / dim as f64;
                log::warn!("SBF matrix not numerically SPD at N={}, retrying with shift {shift:e}", dim / 2);
                let mut shifted = self.matrix.clone();
                for i in 0..dim {
                    shifted[(i, i)] += shift;
                }
                self.jittered = true;
                factorize(&shifted).ok_or(Error::NotSpd)?
            }
        };
        let rhs = Mat::<f64>::from_fn(dim, 1, |i, _| self.rhs[i]);
        let sol = factor.solve(&rhs);
        let coeffs: Vec<f64> = (0..dim).map(|i| sol[(i, 0)]).collect();
        let ax = &self.matrix * &sol;
        let res: f64 = (0..dim).map(|i| (ax[(i, 0)] - self.rhs[i]).powi(2)).sum::<f64>().sqrt();
        let rn: f64 = self.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.residual = Some(if rn > 0.0 { res / rn } else { res });
        self.coeffs = Some(coeffs);
        self.factor = Some(factor);
        Ok(self)
    }

    /// Frame coefficients for new data on the same nodes, reusing the factorization.
    pub fn coeffs_for(&self, values: &[Vec3]) -> Result<Vec<f64>> {
        let factor = self.factor.as_ref().ok_or_else(unsolved)?;
        if values.len() != self.len() {
            return Err(Error::Config(format!("{} values for {} nodes", values.len(), self.len())));
        }
        let rhs = Mat::<f64>::from_fn(2 * self.len(), 1, |i, _| {
            let f = &self.frames[i / 2];
            dot(if i % 2 == 0 { &f.e1 } else { &f.e2 }, &values[i / 2])
        });
        let sol = factor.solve(&rhs);
        Ok((0..2 * self.len()).map(|i| sol[(i, 0)]).collect())
    }

    /// Interpolant at each point.
    pub fn eval(&self, eval_points: &[UnitVector3]) -> Result<Vec<Vec3>> {
        Ok(self.decompose(eval_points)?.combined)
    }

    /// Divergence-free and curl-free parts of the interpolant.
    pub fn decompose(&self, eval_points: &[UnitVector3]) -> Result<DecompositionResult> {
        self.decompose_with(eval_points, ExecMode::Parallel)
    }

    pub fn decompose_with(&self, eval_points: &[UnitVector3], mode: ExecMode) -> Result<DecompositionResult> {
        let c = self.coeffs.as_ref().ok_or_else(unsolved)?;
        Ok(self.decompose_many(std::slice::from_ref(c), eval_points, mode)?.remove(0))
    }

    /// Interpolants for several coefficient vectors in one pass over node pairs.
    pub fn decompose_many(&self, coeff_sets: &[Vec<f64>], eval_points: &[UnitVector3], mode: ExecMode) -> Result<Vec<DecompositionResult>> {
        let data: Vec<Vec<Vec3>> = coeff_sets
            .iter()
            .map(|c| self.frames.iter().enumerate().map(|(j, f)| f.lift([c[2 * j], c[2 * j + 1]])).collect())
            .collect();
        kernel_sums(&self.kernel, &self.nodes.nodes, &data, 1.0, eval_points, mode)
    }
}

fn unsolved() -> Error {
    Error::Config("interpolation system has not been solved".into())
}

/// Assemble, solve and evaluate in one go.
pub fn interp_eval<K: Zonal + Clone>(kernel: &K, samples: &VectorFieldSamples, eval_points: &[UnitVector3]) -> Result<Vec<Vec3>> {
    assemble(kernel, samples).solve()?.eval(eval_points)
}

#[cfg(test)]
mod tests;
