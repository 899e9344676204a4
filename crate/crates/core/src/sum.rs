//! Pairwise (cascade) summation with a sequential base block. The reduction
//! tree depends only on the length, so results are reproducible bit for bit.

const BLOCK: usize = 32;

pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= BLOCK {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// `Σ_{i ∈ lo..hi} f(i)` componentwise with the same tree shape as
/// [`pairwise_sum`], without materializing the terms.
pub fn pairwise_range<const K: usize, F: FnMut(usize) -> [f64; K]>(lo: usize, hi: usize, f: &mut F) -> [f64; K] {
    if hi - lo <= BLOCK {
        let mut acc = [0.0; K];
        for i in lo..hi {
            let v = f(i);
            for k in 0..K {
                acc[k] += v[k];
            }
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let a = pairwise_range(lo, mid, f);
    let b = pairwise_range(mid, hi, f);
    let mut out = a;
    for k in 0..K {
        out[k] += b[k];
    }
    out
}

/// [`pairwise_range`] for a width known only at run time. `f(i, out)` writes
/// term `i` into `out`. Same tree and operation order, so a column computed
/// here matches the fixed-width version bit for bit.
pub fn pairwise_range_dyn<F: FnMut(usize, &mut [f64])>(lo: usize, hi: usize, width: usize, f: &mut F) -> Vec<f64> {
    if hi - lo <= BLOCK {
        let mut acc = vec![0.0; width];
        let mut term = vec![0.0; width];
        for i in lo..hi {
            f(i, &mut term);
            for (a, v) in acc.iter_mut().zip(&term) {
                *a += v;
            }
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let mut a = pairwise_range_dyn(lo, mid, width, f);
    let b = pairwise_range_dyn(mid, hi, width, f);
    for (x, y) in a.iter_mut().zip(&b) {
        *x += y;
    }
    a
}
