use crate::sphere::{UnitVector3, Vec3};

/// Uniform 3D cell grid over `[-1, 1]³` holding sphere nodes in CSR layout.
#[derive(Debug, Clone)]
pub struct NodeGrid {
    cell: f64,
    dim: usize,
    starts: Vec<u32>,
    members: Vec<u32>,
    coords: Vec<Vec3>,
}

impl NodeGrid {
    /// Cell edge is about twice the mean node spacing.
    pub fn new(nodes: &[UnitVector3]) -> Self {
        let spacing = (4.0 * std::f64::consts::PI / nodes.len().max(1) as f64).sqrt();
        Self::with_cell(nodes, (2.0 * spacing).min(2.0))
    }

    pub fn with_cell(nodes: &[UnitVector3], cell: f64) -> Self {
        let dim = ((2.0 / cell).ceil() as usize).max(1);
        let cell = 2.0 / dim as f64;
        let coords: Vec<Vec3> = nodes.iter().map(|x| *x.as_array()).collect();
        let mut counts = vec![0u32; dim * dim * dim + 1];
        let keys: Vec<usize> = coords.iter().map(|p| Self::key(dim, cell, p)).collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut members = vec![0u32; coords.len()];
        for (i, &k) in keys.iter().enumerate() {
            members[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        NodeGrid { cell, dim, starts, members, coords }
    }

    fn axis(dim: usize, cell: f64, v: f64) -> usize {
        (((v + 1.0) / cell) as usize).min(dim - 1)
    }

    fn key(dim: usize, cell: f64, p: &Vec3) -> usize {
        let (i, j, k) = (Self::axis(dim, cell, p[0]), Self::axis(dim, cell, p[1]), Self::axis(dim, cell, p[2]));
        (i * dim + j) * dim + k
    }

    fn chord2(a: &Vec3, b: &Vec3) -> f64 {
        (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
    }

    /// Index and chord distance of the nearest node.
    pub fn nearest(&self, q: &UnitVector3) -> (usize, f64) {
        self.nearest3(q)[0]
    }

    /// The three nearest nodes, closest first; missing entries (fewer than
    /// three nodes) have index `usize::MAX`. Searches cubic shells of cells
    /// outward until no unvisited cell can hold a closer node.
    pub fn nearest3(&self, q: &UnitVector3) -> [(usize, f64); 3] {
        let qa = q.as_array();
        let c = [
            Self::axis(self.dim, self.cell, qa[0]) as isize,
            Self::axis(self.dim, self.cell, qa[1]) as isize,
            Self::axis(self.dim, self.cell, qa[2]) as isize,
        ];
        let mut best = [(usize::MAX, f64::INFINITY); 3];
        let dim = self.dim as isize;
        for r in 0..=dim {
            for i in (c[0] - r).max(0)..=(c[0] + r).min(dim - 1) {
                for j in (c[1] - r).max(0)..=(c[1] + r).min(dim - 1) {
                    for k in (c[2] - r).max(0)..=(c[2] + r).min(dim - 1) {
                        let on_shell = (i - c[0]).abs() == r || (j - c[1]).abs() == r || (k - c[2]).abs() == r;
                        if !on_shell {
                            continue;
                        }
                        let key = ((i * dim + j) * dim + k) as usize;
                        for &m in &self.members[self.starts[key] as usize..self.starts[key + 1] as usize] {
                            insert3(&mut best, m as usize, Self::chord2(&self.coords[m as usize], qa));
                        }
                    }
                }
            }
            // every cell outside shell r is at least r·cell away from q
            let reach = r as f64 * self.cell;
            if best[2].1 <= reach * reach {
                break;
            }
        }
        best.map(|(j, d)| (j, d.sqrt()))
    }

    /// Calls `f(index)` for every node within chord distance `radius` of `q`.
    pub fn for_each_within<F: FnMut(usize)>(&self, q: &Vec3, radius: f64, mut f: F) {
        let span = |v: f64| {
            let lo = Self::axis(self.dim, self.cell, (v - radius).max(-1.0));
            let hi = Self::axis(self.dim, self.cell, (v + radius).min(1.0));
            lo..=hi
        };
        let r2 = radius * radius;
        for i in span(q[0]) {
            for j in span(q[1]) {
                for k in span(q[2]) {
                    let key = (i * self.dim + j) * self.dim + k;
                    for &m in &self.members[self.starts[key] as usize..self.starts[key + 1] as usize] {
                        if Self::chord2(&self.coords[m as usize], q) <= r2 {
                            f(m as usize);
                        }
                    }
                }
            }
        }
    }
}

/// Keeps `best` sorted by distance with ties broken by index.
#[inline]
pub(crate) fn insert3(best: &mut [(usize, f64); 3], j: usize, d: f64) {
    let worse = |a: (usize, f64), b: (usize, f64)| a.1 > b.1 || (a.1 == b.1 && a.0 > b.0);
    let cand = (j, d);
    if !worse(best[2], cand) {
        return;
    }
    best[2] = cand;
    if worse(best[1], best[2]) {
        best.swap(1, 2);
        if worse(best[0], best[1]) {
            best.swap(0, 1);
        }
    }
}
