//! Quasi-interpolation of sampled tangent fields and its split into
//! divergence-free and curl-free parts.

use crate::error::{Error, Result};
use crate::kernels::Zonal;
use crate::matrix_kernels::{apply, PairTerms};
use crate::par::{map_indices, ExecMode};
use crate::points::PointSet;
use crate::sphere::geometry::{dot, Vec3};
use crate::sphere::{TangentVector, UnitVector3};
use crate::sum::{pairwise_range, pairwise_range_dyn};

/// Samples above this normal component are accepted but logged.
pub const TANGENCY_WARN: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct VectorFieldSamples {
    pub points: PointSet,
    pub values: Vec<TangentVector>,
}

impl VectorFieldSamples {
    /// Pairs `values[i]` with `points.nodes[i]`. Normal components are kept.
    pub fn new(points: PointSet, values: Vec<Vec3>) -> Result<Self> {
        if values.len() != points.len() {
            return Err(Error::Config(format!("{} values for {} nodes", values.len(), points.len())));
        }
        let worst = points.nodes.iter().zip(&values).map(|(x, v)| dot(x.as_array(), v).abs()).fold(0.0, f64::max);
        if worst > TANGENCY_WARN {
            log::warn!("samples leave the tangent plane by up to {worst:e}");
        }
        let values = points.nodes.iter().zip(values).map(|(x, v)| TangentVector::ambient(*x, v)).collect();
        Ok(VectorFieldSamples { points, values })
    }

    pub fn from_fn<F: Fn(&UnitVector3) -> Vec3>(points: PointSet, f: F) -> Self {
        let values = points.nodes.iter().map(|x| TangentVector::ambient(*x, f(x))).collect();
        VectorFieldSamples { points, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub eval_points: Vec<UnitVector3>,
    pub div: Vec<Vec3>,
    pub curl: Vec<Vec3>,
    pub combined: Vec<Vec3>,
    /// Number of node-kernel applications performed.
    pub kernel_evals: u64,
}

fn eval_counted<K: Zonal + ?Sized>(kernel: &K, samples: &VectorFieldSamples, x: &UnitVector3) -> (Vec3, Vec3, u64) {
    let xa = x.as_array();
    let mut count = 0u64;
    let mut term = |j: usize| {
        count += 1;
        let s = &samples.values[j];
        let (d, c) = apply(kernel, xa, s.base.as_array(), &s.v);
        [d[0], d[1], d[2], c[0], c[1], c[2]]
    };
    let acc = pairwise_range::<6, _>(0, samples.len(), &mut term);
    let w = samples.points.weight;
    ([w * acc[0], w * acc[1], w * acc[2]], [w * acc[3], w * acc[4], w * acc[5]], count)
}

/// Divergence-free and curl-free parts of the quasi-interpolant at `x`.
pub fn qi_eval_point<K: Zonal + ?Sized>(kernel: &K, samples: &VectorFieldSamples, x: &UnitVector3) -> (Vec3, Vec3) {
    let (d, c, _) = eval_counted(kernel, samples, x);
    (d, c)
}

pub fn qi_decompose<K: Zonal + ?Sized>(kernel: &K, samples: &VectorFieldSamples, eval_points: &[UnitVector3]) -> DecompositionResult {
    qi_decompose_with(kernel, samples, eval_points, ExecMode::Parallel)
}

/// Parallel over evaluation points; each point sums its nodes sequentially in
/// a fixed tree, so both modes give identical bits.
pub fn qi_decompose_with<K: Zonal + ?Sized>(
    kernel: &K,
    samples: &VectorFieldSamples,
    eval_points: &[UnitVector3],
    mode: ExecMode,
) -> DecompositionResult {
    let rows = map_indices(eval_points.len(), mode, |i| eval_counted(kernel, samples, &eval_points[i]));
    let mut div = Vec::with_capacity(rows.len());
    let mut curl = Vec::with_capacity(rows.len());
    let mut combined = Vec::with_capacity(rows.len());
    let mut kernel_evals = 0;
    for (d, c, n) in rows {
        combined.push([d[0] + c[0], d[1] + c[1], d[2] + c[2]]);
        div.push(d);
        curl.push(c);
        kernel_evals += n;
    }
    DecompositionResult { eval_points: eval_points.to_vec(), div, curl, combined, kernel_evals }
}

/// Several data sets on the same nodes in one pass: kernel values are computed
/// once per node pair and applied to every data set. Each result is bitwise
/// equal to a separate [`qi_decompose_with`] call on that data set.
pub fn qi_decompose_batch<K: Zonal + ?Sized>(
    kernel: &K,
    points: &PointSet,
    data: &[Vec<Vec3>],
    eval_points: &[UnitVector3],
    mode: ExecMode,
) -> Result<Vec<DecompositionResult>> {
    kernel_sums(kernel, &points.nodes, data, points.weight, eval_points, mode)
}

/// `weight · Σ_j Ψ^•(x, x_j) d_j` for every data set `d` and evaluation point `x`.
pub(crate) fn kernel_sums<K: Zonal + ?Sized>(
    kernel: &K,
    nodes: &[UnitVector3],
    data: &[Vec<Vec3>],
    weight: f64,
    eval_points: &[UnitVector3],
    mode: ExecMode,
) -> Result<Vec<DecompositionResult>> {
    if let Some(bad) = data.iter().find(|d| d.len() != nodes.len()) {
        return Err(Error::Config(format!("{} values for {} nodes", bad.len(), nodes.len())));
    }
    let sets = data.len();
    let w = weight;
    let rows = map_indices(eval_points.len(), mode, |i| {
        let xa = eval_points[i].as_array();
        let mut term = |j: usize, out: &mut [f64]| {
            let pair = PairTerms::new(kernel, xa, nodes[j].as_array());
            for (s, d) in data.iter().enumerate() {
                let (dv, cv) = pair.apply(&d[j]);
                out[6 * s..6 * s + 3].copy_from_slice(&dv);
                out[6 * s + 3..6 * s + 6].copy_from_slice(&cv);
            }
        };
        pairwise_range_dyn(0, nodes.len(), 6 * sets, &mut term)
    });
    let per_set = (nodes.len() * eval_points.len()) as u64;
    Ok((0..sets)
        .map(|s| {
            let mut div = Vec::with_capacity(rows.len());
            let mut curl = Vec::with_capacity(rows.len());
            let mut combined = Vec::with_capacity(rows.len());
            for r in &rows {
                let a = &r[6 * s..6 * s + 6];
                let d = [w * a[0], w * a[1], w * a[2]];
                let c = [w * a[3], w * a[4], w * a[5]];
                combined.push([d[0] + c[0], d[1] + c[1], d[2] + c[2]]);
                div.push(d);
                curl.push(c);
            }
            DecompositionResult { eval_points: eval_points.to_vec(), div, curl, combined, kernel_evals: per_set }
        })
        .collect())
}
