//! Data-parallel map over index ranges, backed by rayon when the `parallel`
//! feature is on and by a plain loop otherwise.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

impl ExecMode {
    /// `Parallel` only when the crate was built with rayon.
    pub fn effective(self) -> ExecMode {
        if cfg!(feature = "parallel") {
            self
        } else {
            ExecMode::Sequential
        }
    }
}

impl std::fmt::Display for ExecMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExecMode::Parallel => "parallel",
            ExecMode::Sequential => "sequential",
        })
    }
}

impl std::str::FromStr for ExecMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "parallel" => Ok(ExecMode::Parallel),
            "sequential" => Ok(ExecMode::Sequential),
            _ => Err(crate::Error::Config(format!("exec must be parallel or sequential, got '{s}'"))),
        }
    }
}

/// `(0..n).map(f).collect()`, possibly spread over the rayon pool.
/// Output order is the index order regardless of mode.
pub fn map_indices<T, F>(n: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode.effective() {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
