use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{ExperimentConfig, Method};
use super::metrics::{component_errors, cost_at_error, extrapolate_cost, loglog_slope, median, rates, rmse_values, ErrorTriple};
use super::sources::{acquire, h_value};
use super::table::{fmt_f64, fmt_opt, CsvTable};
use crate::error::{Error, Result};
use crate::fields::FieldValue;
use crate::kernels::{fourier_coeffs, KernelFamily, ZonalKernel};
use crate::par::{map_indices, ExecMode};
use crate::points::{fibonacci_points, mesh_norm, PointSet};
use crate::qi::{qi_decompose_batch, qi_decompose_with, VectorFieldSamples};
use crate::sbf::assemble_with;
use crate::sphere::{UnitVector3, Vec3};

/// Evaluation grid with the exact field cached on it.
pub struct EvalGrid {
    pub nodes: Vec<UnitVector3>,
    pub exact: Vec<FieldValue>,
}

impl EvalGrid {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let nodes = fibonacci_points(cfg.eval_grid)?.nodes;
        let exact = nodes.iter().map(|x| cfg.field.eval_with(x, cfg.harmonic_norm)).collect::<Result<Vec<_>>>()?;
        Ok(EvalGrid { nodes, exact })
    }

    pub fn combined(&self) -> Vec<Vec3> {
        self.exact.iter().map(|v| v.f).collect()
    }
}

fn samples(cfg: &ExperimentConfig, points: &PointSet) -> Result<Vec<Vec3>> {
    points.nodes.iter().map(|x| Ok(cfg.field.eval_with(x, cfg.harmonic_norm)?.f)).collect()
}

fn rho_rule_text(cfg: &ExperimentConfig) -> Result<String> {
    let parts = cfg
        .orders
        .iter()
        .map(|&m| Ok(format!("m{m}:{}*h^{}", cfg.rho_constant(m)?, cfg.rho_p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.join(" "))
}

fn common_meta(t: &mut CsvTable, cfg: &ExperimentConfig) -> Result<()> {
    t.meta("field", format!("{} harmonic_norm={}", cfg.field, cfg.harmonic_norm))
        .meta("kernel", format!("{} orders={:?}", cfg.family, cfg.orders))
        .meta("rho", rho_rule_text(cfg)?)
        .meta("h_mode", cfg.h_mode)
        .meta("points", format!("{} fallback={}", cfg.points, cfg.fallback))
        .meta("eval", format!("fibonacci {}", cfg.eval_grid));
    Ok(())
}

struct Site {
    points: PointSet,
    h: f64,
    data: Vec<Vec3>,
}

fn site(cfg: &ExperimentConfig, n: usize) -> Result<Site> {
    let points = acquire(cfg, n)?;
    let h = h_value(cfg, &points);
    let data = samples(cfg, &points)?;
    Ok(Site { points, h, data })
}

/// Errors of the quasi-interpolant for every (order, N) cell, with observed rates.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let grid = EvalGrid::new(cfg)?;
    let sites = cfg.sizes.iter().map(|&n| site(cfg, n)).collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, u32)> = cfg.orders.iter().flat_map(|&m| (0..sites.len()).map(move |i| (i, m))).collect();
    let run_cell = |&(i, m): &(usize, u32), inner: ExecMode| -> Result<(f64, ErrorTriple, f64)> {
        let s = &sites[i];
        let rho = cfg.rho_rule(m, s.h)?;
        let kernel = ZonalKernel::new(cfg.family, rho, m)?;
        let samples = VectorFieldSamples::new(s.points.clone(), s.data.clone())?;
        let start = Instant::now();
        let r = qi_decompose_with(&kernel, &samples, &grid.nodes, inner);
        let secs = start.elapsed().as_secs_f64();
        log::info!("convergence {kernel} N={} done in {secs:.2}s", s.points.len());
        Ok((rho, component_errors(&grid.exact, &r), secs))
    };
    let results: Vec<Result<_>> = if cfg.cell_parallel {
        map_indices(cells.len(), cfg.exec, |c| run_cell(&cells[c], ExecMode::Sequential))
    } else {
        cells.iter().map(|c| run_cell(c, cfg.exec)).collect()
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut cols = vec![
        "field", "family", "order", "n", "source", "h", "rho", "err_combined", "err_div", "err_curl", "rate_combined", "rate_div", "rate_curl",
    ];
    if cfg.record_time {
        cols.push("seconds");
    }
    let mut t = CsvTable::new(&cols);
    common_meta(&mut t, cfg)?;
    let hs: Vec<f64> = sites.iter().map(|s| s.h).collect();
    for (k, &m) in cfg.orders.iter().enumerate() {
        let block = &results[k * sites.len()..(k + 1) * sites.len()];
        let pick = |f: fn(&ErrorTriple) -> f64| rates(&hs, &block.iter().map(|r| f(&r.1)).collect::<Vec<_>>());
        let (rc, rd, rr) = (pick(|e| e.combined), pick(|e| e.div), pick(|e| e.curl));
        for (i, (rho, e, secs)) in block.iter().enumerate() {
            let s = &sites[i];
            let mut row = vec![
                cfg.field.to_string(),
                cfg.family.to_string(),
                m.to_string(),
                s.points.len().to_string(),
                s.points.source.to_string(),
                fmt_f64(s.h),
                fmt_f64(*rho),
                fmt_f64(e.combined),
                fmt_f64(e.div),
                fmt_f64(e.curl),
                fmt_opt(rc[i]),
                fmt_opt(rd[i]),
                fmt_opt(rr[i]),
            ];
            if cfg.record_time {
                row.push(fmt_f64(*secs));
            }
            t.push(row);
        }
    }
    Ok(t)
}

/// Ambient noise `ε ~ N(0, I₃)` per node; the stream depends only on the
/// master seed, the size index and the realization.
fn noise(seed: u64, size_index: usize, realization: usize, n: usize) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((size_index as u64) << 32) | realization as u64);
    (0..n).map(|_| [0; 3].map(|_| StandardNormal.sample(&mut rng))).collect()
}

/// Mean and sample standard deviation.
fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Mean RMSE over seeded noise realizations for each method, size, order and
/// noise level. Both methods are linear in the data, so each realization is
/// computed once as a response to unit noise and scaled by every `δ`.
pub fn run_noise(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let grid = EvalGrid::new(cfg)?;
    let exact = grid.combined();
    let mut t = CsvTable::new(&["method", "family", "order", "n", "h", "rho", "delta", "realizations", "rmse_mean", "rmse_std"]);
    common_meta(&mut t, cfg)?;
    t.meta("noise", format!("ambient N(0,delta^2 I) seed={} realizations={}", cfg.seed, cfg.realizations));
    t.meta("sbf", format!("order={} sizes={:?} rho=qi schedule", cfg.sbf_order.map_or("same".to_string(), |o| o.to_string()), cfg.sbf_sizes()));
    for method in &cfg.methods {
        let sizes: Vec<usize> = match method {
            Method::Qi => cfg.sizes.clone(),
            Method::Sbf => cfg.sbf_sizes().to_vec(),
        };
        for &m in &cfg.orders {
            for (si, &n) in sizes.iter().enumerate() {
                let s = site(cfg, n)?;
                let rho = cfg.rho_rule(m, s.h)?;
                let mut sets = vec![s.data.clone()];
                sets.extend((0..cfg.realizations).map(|r| noise(cfg.seed, si, r, n)));
                let outs = match method {
                    Method::Qi => {
                        let kernel = ZonalKernel::new(cfg.family, rho, m)?;
                        qi_decompose_batch(&kernel, &s.points, &sets, &grid.nodes, cfg.exec)?
                    }
                    Method::Sbf => {
                        let kernel = ZonalKernel::new(cfg.family, rho, cfg.sbf_order.unwrap_or(m))?;
                        let base = VectorFieldSamples::new(s.points.clone(), s.data.clone())?;
                        let sys = assemble_with(&kernel, &base, cfg.exec).solve()?;
                        let coeffs = sets.iter().map(|d| sys.coeffs_for(d)).collect::<Result<Vec<_>>>()?;
                        sys.decompose_many(&coeffs, &grid.nodes, cfg.exec)?
                    }
                };
                log::info!("noise {method} m={m} N={n} done");
                let clean = &outs[0].combined;
                for &delta in &cfg.deltas {
                    let errs: Vec<f64> = outs[1..]
                        .iter()
                        .map(|o| {
                            let approx: Vec<Vec3> = clean.iter().zip(&o.combined).map(|(c, e)| [0, 1, 2].map(|i| c[i] + delta * e[i])).collect();
                            rmse_values(&exact, &approx)
                        })
                        .collect();
                    let (mean, std) = mean_std(&errs);
                    t.push(vec![
                        method.to_string(),
                        cfg.family.to_string(),
                        m.to_string(),
                        n.to_string(),
                        fmt_f64(s.h),
                        fmt_f64(rho),
                        fmt_f64(delta),
                        cfg.realizations.to_string(),
                        fmt_f64(mean),
                        fmt_f64(std),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

/// Median wall time of `repeats` runs after `warmup` discarded ones, plus
/// the median of the inner time each run reports and the last run's output.
fn timed<T>(warmup: usize, repeats: usize, mut f: impl FnMut() -> Result<(T, f64)>) -> Result<(f64, f64, T)> {
    for _ in 0..warmup {
        f()?;
    }
    let (mut total, mut inner) = (Vec::with_capacity(repeats), Vec::with_capacity(repeats));
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let (out, part) = f()?;
        total.push(start.elapsed().as_secs_f64());
        inner.push(part);
        last = Some(out);
    }
    Ok((median(&total), median(&inner), last.expect("at least one repeat")))
}

/// Wall time against N for the quasi-interpolant and the SBF baseline, with
/// fitted log–log exponents and the time each needs to reach `target_error`.
/// `solve_seconds` is the SBF assembly and factorization alone. Times are
/// wall-clock, so this is the one driver whose output varies between runs.
pub fn run_timing(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let grid = EvalGrid::new(cfg)?;
    let m = cfg.orders[0];
    let mut t = CsvTable::new(&["method", "family", "order", "n", "h", "rho", "seconds", "solve_seconds", "err_combined"]);
    common_meta(&mut t, cfg)?;
    t.meta("timing", format!("median of {} after {} warm-up; eval points {}", cfg.repeats, cfg.warmup, cfg.eval_grid));
    let mut summary = Vec::new();
    for method in &cfg.methods {
        let sizes: Vec<usize> = match method {
            Method::Qi => cfg.sizes.clone(),
            Method::Sbf => cfg.sbf_sizes().to_vec(),
        };
        let (mut ns, mut secs, mut solves, mut errs) = (vec![], vec![], vec![], vec![]);
        for &n in &sizes {
            let points = acquire(cfg, n)?;
            let h = h_value(cfg, &points);
            let rho = cfg.rho_rule(m, h)?;
            let (sec, solve, err) = match method {
                Method::Qi => {
                    let kernel = ZonalKernel::new(cfg.family, rho, m)?;
                    timed(cfg.warmup, cfg.repeats, || {
                        let s = VectorFieldSamples::new(points.clone(), samples(cfg, &points)?)?;
                        let r = qi_decompose_with(&kernel, &s, &grid.nodes, cfg.exec);
                        Ok((component_errors(&grid.exact, &r).combined, 0.0))
                    })?
                }
                Method::Sbf => {
                    let kernel = ZonalKernel::new(cfg.family, rho, cfg.sbf_order.unwrap_or(m))?;
                    timed(cfg.warmup, cfg.repeats, || {
                        let start = Instant::now();
                        let s = VectorFieldSamples::new(points.clone(), samples(cfg, &points)?)?;
                        let sys = assemble_with(&kernel, &s, cfg.exec).solve()?;
                        let solve = start.elapsed().as_secs_f64();
                        let r = sys.decompose_with(&grid.nodes, cfg.exec)?;
                        Ok((component_errors(&grid.exact, &r).combined, solve))
                    })?
                }
            };
            log::info!("timing {method} N={n}: {sec:.3}s err={err:e}");
            t.push(vec![
                method.to_string(),
                cfg.family.to_string(),
                m.to_string(),
                n.to_string(),
                fmt_f64(h),
                fmt_f64(rho),
                fmt_f64(sec),
                if *method == Method::Sbf { fmt_f64(solve) } else { String::new() },
                fmt_f64(err),
            ]);
            ns.push(n as f64);
            secs.push(sec);
            solves.push(solve);
            errs.push(err);
        }
        if ns.len() >= 2 {
            summary.push((format!("{method}_exponent"), fmt_f64(loglog_slope(&ns, &secs))));
            if *method == Method::Sbf {
                summary.push(("sbf_solve_exponent".to_string(), fmt_f64(loglog_slope(&ns, &solves))));
            }
        }
        let (at, how) = match cost_at_error(&errs, &secs, cfg.target_error) {
            Some(c) => (Some(c), "interpolated"),
            None => (extrapolate_cost(&errs, &secs, cfg.target_error), "extrapolated"),
        };
        summary.push((format!("{method}_seconds_at_target"), fmt_opt(at)));
        summary.push((format!("{method}_seconds_at_target_how"), how.to_string()));
    }
    t.meta("target_error", fmt_f64(cfg.target_error));
    for (k, v) in summary {
        t.meta(&k, v);
    }
    Ok(t)
}

/// How the shape parameter of a one-off decomposition is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoChoice {
    Fixed(f64),
    /// `c · h^p` with `h = N^{-1/2}` (`measured = false`) or the mesh norm.
    Rule { c: f64, p: f64, measured: bool },
}

#[derive(Debug, Clone)]
pub struct DecomposeJob {
    pub input: PathBuf,
    pub family: KernelFamily,
    pub order: u32,
    pub rho: RhoChoice,
    /// Fibonacci evaluation grid size; ignored when `eval_file` is set.
    pub eval_grid: usize,
    /// CSV with columns `x1,x2,x3`.
    pub eval_file: Option<PathBuf>,
    pub exec: ExecMode,
}

fn vector_rows(t: &CsvTable, cols: [&str; 3], path: &Path) -> Result<Vec<Vec3>> {
    let idx = cols.map(|c| t.column(c));
    let [Some(a), Some(b), Some(c)] = idx else {
        return Err(Error::Parse { path: path.to_path_buf(), line: 1, msg: format!("missing columns {cols:?}") });
    };
    t.rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = [0.0; 3];
            for (slot, k) in v.iter_mut().zip([a, b, c]) {
                *slot = r[k].parse().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 2 + t.meta.len(),
                    msg: format!("'{}': {e}", r[k]),
                })?;
            }
            Ok(v)
        })
        .collect()
}

fn unit_rows(t: &CsvTable, cols: [&str; 3], path: &Path) -> Result<Vec<UnitVector3>> {
    vector_rows(t, cols, path)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (n - 1.0).abs() > super::sources::FILE_NORM_TOL {
                return Err(Error::Norm { path: path.to_path_buf(), line: i + 2 + t.meta.len(), norm: n });
            }
            UnitVector3::normalize(v)
        })
        .collect()
}

/// Reads samples `x1,x2,x3,f1,f2,f3`, splits the quasi-interpolant into its
/// divergence-free and curl-free parts on the evaluation points.
pub fn run_decompose(job: &DecomposeJob) -> Result<CsvTable> {
    let input = CsvTable::read(&job.input)?;
    let nodes = unit_rows(&input, ["x1", "x2", "x3"], &job.input)?;
    if nodes.is_empty() {
        return Err(Error::EmptyFile(job.input.clone()));
    }
    let values = vector_rows(&input, ["f1", "f2", "f3"], &job.input)?;
    let points = PointSet::new(nodes, crate::points::PointSource::File(job.input.clone()));
    let n = points.len();
    let rho = match job.rho {
        RhoChoice::Fixed(r) => r,
        RhoChoice::Rule { c, p, measured } => {
            let h = if measured { mesh_norm(&points, 10 * n) } else { 1.0 / (n as f64).sqrt() };
            c * h.powf(p)
        }
    };
    let kernel = ZonalKernel::new(job.family, rho, job.order)?;
    let evals = match &job.eval_file {
        Some(p) => unit_rows(&CsvTable::read(p)?, ["x1", "x2", "x3"], p)?,
        None => fibonacci_points(job.eval_grid)?.nodes,
    };
    let samples = VectorFieldSamples::new(points, values)?;
    let r = qi_decompose_with(&kernel, &samples, &evals, job.exec);
    let mut t = CsvTable::new(&[
        "y1", "y2", "y3", "div1", "div2", "div3", "curl1", "curl2", "curl3", "comb1", "comb2", "comb3",
    ]);
    t.meta("kernel", &kernel).meta("rho", fmt_f64(rho)).meta("N", n).meta("input", job.input.display());
    for i in 0..evals.len() {
        let mut row = Vec::with_capacity(12);
        for v in [evals[i].as_array(), &r.div[i], &r.curl[i], &r.combined[i]] {
            row.extend(v.iter().map(|x| fmt_f64(*x)));
        }
        t.push(row);
    }
    Ok(t)
}

/// Fourier–Legendre coefficients `ℓ, ψ̂(ℓ)` for `ℓ = 0..=degree`.
pub fn kernel_info(family: KernelFamily, order: u32, rho: f64, degree: usize, n_quad: Option<usize>) -> Result<CsvTable> {
    let kernel = ZonalKernel::new(family, rho, order)?;
    let nq = n_quad.unwrap_or_else(|| crate::kernels::default_quad_nodes(degree));
    let c = fourier_coeffs(&kernel, degree, nq);
    let mut t = CsvTable::new(&["ell", "coeff"]);
    t.meta("kernel", &kernel).meta("rho", fmt_f64(rho)).meta("route", c.n_quad.map_or("closed form".to_string(), |q| format!("gauss-legendre {q}")));
    for (l, v) in c.values.iter().enumerate() {
        t.push(vec![l.to_string(), fmt_f64(*v)]);
    }
    Ok(t)
}

/// Node coordinates with size, source and both h values in the metadata.
pub fn describe_points(points: &PointSet, probes_per_node: usize) -> CsvTable {
    let mut t = CsvTable::new(&["x1", "x2", "x3"]);
    t.meta("N", points.len())
        .meta("source", &points.source)
        .meta("h_measured", fmt_f64(mesh_norm(points, probes_per_node * points.len())))
        .meta("h_proxy", fmt_f64(1.0 / (points.len() as f64).sqrt()));
    if let Some(s) = points.design_strength {
        t.meta("strength", s);
    }
    for x in &points.nodes {
        t.push(vec![fmt_f64(x.x1()), fmt_f64(x.x2()), fmt_f64(x.x3())]);
    }
    t
}
