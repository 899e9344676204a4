use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fields::field2;
use crate::kernels::{KernelFamily, ZonalKernel};
use crate::points::{fibonacci_points, random_points, PointSource};
use crate::qi::qi_decompose;
use crate::sphere::geometry::{norm, sub};

fn random_tangent(points: &PointSet, seed: u64) -> VectorFieldSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = points.nodes.iter().map(|x| x.project_tangent(&[rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5])).collect();
    VectorFieldSamples::new(points.clone(), vals).unwrap()
}

fn gauss(rho: f64) -> ZonalKernel {
    ZonalKernel::new(KernelFamily::Gaussian, rho, 2).unwrap()
}

#[test]
fn single_node_block_is_scaled_identity() {
    let x = UnitVector3::normalize([0.2, 0.5, -0.7]).unwrap();
    let k = gauss(0.4);
    let f = x.project_tangent(&[1.0, -2.0, 0.5]);
    let s = VectorFieldSamples::new(PointSet::new(vec![x], PointSource::Fibonacci), vec![f]).unwrap();
    let sys = assemble(&k, &s);
    let d = 2.0 * k.kappa(1.0);
    for a in 0..2 {
        for b in 0..2 {
            let want = if a == b { d } else { 0.0 };
            assert!((sys.matrix[(a, b)] - want).abs() < 1e-12 * d);
        }
    }
    let sys = sys.solve().unwrap();
    let v = sys.eval(&[x]).unwrap()[0];
    assert!(norm(&sub(&v, &f)) < 1e-12 * norm(&f));
}

#[test]
fn matrix_is_symmetric() {
    let pts = random_points(50, 1).unwrap();
    let sys = assemble(&ZonalKernel::new(KernelFamily::WE32, 0.8, 2).unwrap(), &random_tangent(&pts, 2));
    let n = sys.matrix.nrows();
    let scale = (0..n).map(|i| sys.matrix[(i, i)]).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            assert!((sys.matrix[(i, j)] - sys.matrix[(j, i)]).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn gaussian_system_is_positive_definite() {
    let pts = random_points(100, 4).unwrap();
    let sys = assemble(&gauss(0.5), &random_tangent(&pts, 5));
    let n = sys.matrix.nrows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| sys.matrix[(i, j)]);
    let eig = m.symmetric_eigenvalues();
    assert!(eig.min() > 0.0, "min eigenvalue {}", eig.min());
}

#[test]
fn solve_has_small_residual_and_interpolates() {
    let pts = random_points(200, 7).unwrap();
    let s = random_tangent(&pts, 8);
    let sys = assemble(&gauss(0.3), &s).solve().unwrap();
    assert!(sys.residual.unwrap() <= 1e-9, "{:e}", sys.residual.unwrap());
    let at_nodes = sys.eval(&pts.nodes).unwrap();
    let scale = s.values.iter().map(|v| norm(&v.v)).fold(0.0, f64::max);
    for (v, f) in at_nodes.iter().zip(&s.values) {
        assert!(norm(&sub(v, &f.v)) < 1e-7 * scale);
    }
    for (x, v) in pts.nodes.iter().zip(&at_nodes) {
        assert!(dot(x.as_array(), v).abs() < 1e-10 * scale);
    }
}

#[test]
fn duplicated_node_is_flagged() {
    let mut nodes = random_points(30, 2).unwrap().nodes;
    nodes.push(nodes[3]);
    let pts = PointSet::new(nodes, PointSource::Fibonacci);
    match assemble(&gauss(0.5), &random_tangent(&pts, 1)).solve() {
        Ok(sys) => assert!(sys.jittered),
        Err(e) => assert!(matches!(e, Error::NotSpd)),
    }
}

#[test]
fn zero_data_gives_zero_interpolant() {
    let pts = fibonacci_points(60).unwrap();
    let s = VectorFieldSamples::from_fn(pts.clone(), |_| [0.0; 3]);
    let sys = assemble(&gauss(0.4), &s).solve().unwrap();
    assert!(sys.coeffs.as_ref().unwrap().iter().all(|c| *c == 0.0));
    assert!(sys.eval(&pts.nodes).unwrap().iter().all(|v| *v == [0.0; 3]));
}

#[test]
fn unsolved_system_refuses_to_evaluate() {
    let pts = fibonacci_points(10).unwrap();
    let sys = assemble(&gauss(0.4), &random_tangent(&pts, 1));
    assert!(sys.eval(&pts.nodes).is_err());
}

#[test]
fn accuracy_comparable_to_quasi_interpolation() {
    let pts = fibonacci_points(800).unwrap();
    let s = VectorFieldSamples::from_fn(pts.clone(), |x| field2(x).unwrap().f);
    let h = (4.0 * std::f64::consts::PI / 800.0).sqrt();
    let rho = 1.2 * h.sqrt();
    let evals = fibonacci_points(3000).unwrap().nodes;
    let err = |v: &[Vec3]| {
        let sq: f64 = evals.iter().zip(v).map(|(x, u)| norm(&sub(&field2(x).unwrap().f, u)).powi(2)).sum();
        (sq / evals.len() as f64).sqrt()
    };
    let qi = qi_decompose(&ZonalKernel::new(KernelFamily::WE32, rho, 4).unwrap(), &s, &evals);
    let sbf = interp_eval(&ZonalKernel::new(KernelFamily::WE32, rho, 2).unwrap(), &s, &evals).unwrap();
    let (eq, es) = (err(&qi.combined), err(&sbf));
    assert!(es < 4.0 * eq, "sbf {es:e} qi {eq:e}");
}

#[test]
fn reused_factor_matches_fresh_solve() {
    let pts = random_points(120, 3).unwrap();
    let (a, b) = (random_tangent(&pts, 1), random_tangent(&pts, 2));
    let k = gauss(0.35);
    let sys_a = assemble(&k, &a).solve().unwrap();
    let sys_b = assemble(&k, &b).solve().unwrap();
    let vals: Vec<Vec3> = b.values.iter().map(|v| v.v).collect();
    let c = sys_a.coeffs_for(&vals).unwrap();
    let fresh = sys_b.coeffs.as_ref().unwrap();
    let scale = fresh.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(c.iter().zip(fresh).all(|(x, y)| (x - y).abs() <= 1e-10 * scale));
    let evals = fibonacci_points(20).unwrap().nodes;
    let many = sys_a.decompose_many(&[sys_a.coeffs.clone().unwrap(), c], &evals, ExecMode::Sequential).unwrap();
    assert_eq!(many[0], sys_a.decompose_with(&evals, ExecMode::Parallel).unwrap());
}
