//! Locating and generating the node sets an experiment asks for.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, HMode, PointKind, POINTS_DIR_ENV};
use crate::error::{Error, Result};
use crate::points::{fibonacci_points, load_points, mesh_norm_with, random_points, PointSet};

/// Rows of point files are renormalized when this close to unit length.
pub const FILE_NORM_TOL: f64 = 1e-8;

/// A file in `dir` named `<prefix><digits>.<N padded to 5>`, as in the
/// public design and maximum-determinant collections.
pub fn find_point_file(dir: &Path, prefix: &str, n: usize) -> Option<PathBuf> {
    let suffix = format!(".{n:05}");
    let mut hits: Vec<PathBuf> = fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name().and_then(|s| s.to_str()).is_some_and(|name| {
                name.strip_prefix(prefix)
                    .and_then(|rest| rest.strip_suffix(&suffix))
                    .is_some_and(|deg| !deg.is_empty() && deg.bytes().all(|b| b.is_ascii_digit()))
            })
        })
        .collect();
    hits.sort();
    hits.into_iter().next()
}

pub fn acquire(cfg: &ExperimentConfig, n: usize) -> Result<PointSet> {
    match cfg.points {
        PointKind::Fibonacci => fibonacci_points(n),
        PointKind::Random => random_points(n, cfg.seed),
        kind => {
            let prefix = kind.file_prefix().expect("file-backed kind");
            let dir = cfg.points_dir();
            match find_point_file(&dir, prefix, n) {
                Some(path) => load_points(&path, FILE_NORM_TOL),
                None if cfg.fallback => {
                    log::warn!("no {kind} file for N={n} in {}, using Fibonacci nodes", dir.display());
                    fibonacci_points(n)
                }
                None => Err(Error::MissingPointSet(format!("{kind} N={n}: no {prefix}*.{n:05} in {}", dir.display()))),
            }
        }
    }
}

pub fn h_value(cfg: &ExperimentConfig, points: &PointSet) -> f64 {
    match cfg.h_mode {
        HMode::Proxy => 1.0 / (points.len() as f64).sqrt(),
        HMode::Measured => mesh_norm_with(points, cfg.mesh_probes * points.len(), cfg.exec),
    }
}

pub fn fetch_note() -> String {
    format!(
        "Point files are read from the directory given by `points_dir`, else ${POINTS_DIR_ENV}, else ./points.\n\
         Symmetric spherical t-designs: files named ssTTT.NNNNN (t = TTT, N = NNNNN), e.g. ss053.01434,\n\
         ss075.02852, ss107.05780, ss155.12092, ss223.24978.\n\
         Maximum-determinant nodes: files named mdTTT.NNNNN with N = (t+1)^2, e.g. md049.02500.\n\
         Each file holds one node per line as three whitespace-separated coordinates.\n\
         Both collections are published by R. Womersley (UNSW); download them manually, this tool does not fetch.\n\
         Set fallback=true to substitute Fibonacci nodes of the same size when a file is missing.\n"
    )
}
