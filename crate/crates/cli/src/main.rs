use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use svqi::experiments::{
    describe_points, fetch_note, find_point_file, kernel_info, run_convergence, run_decompose, run_noise, run_timing, CsvTable,
    DecomposeJob, ExperimentConfig, RhoChoice, FILE_NORM_TOL, POINTS_DIR_ENV,
};
use svqi::kernels::KernelFamily;
use svqi::par::ExecMode;
use svqi::points::{antipodal_design, fibonacci_points, load_points, random_points, save_points, DesignOptions};
use svqi::{Error, Result};

/// Divergence-free / curl-free vector quasi-interpolation on the sphere.
#[derive(Parser)]
#[command(name = "svqi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split sampled vector data into divergence-free and curl-free parts.
    Decompose(DecomposeArgs),
    /// Error and rate table over node counts and kernel orders.
    Convergence(ExperimentArgs),
    /// Mean RMSE under additive Gaussian noise, QI against SBF interpolation.
    Noise(ExperimentArgs),
    /// Wall-time scaling and work-precision of QI against SBF interpolation.
    Bench(ExperimentArgs),
    /// Fourier-Legendre coefficients of a scaled kernel.
    KernelInfo(KernelInfoArgs),
    /// Generate or inspect a node set.
    Points(PointsArgs),
}

/// Each flag overrides the matching key of `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV (stdout when omitted).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print the effective config and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    harmonic_norm: Option<String>,
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated kernel orders.
    #[arg(long)]
    orders: Option<String>,
    /// Comma-separated ρ constants, one per order.
    #[arg(long)]
    rho_c: Option<String>,
    #[arg(long)]
    rho_p: Option<String>,
    /// `measured` or `proxy`.
    #[arg(long)]
    h_mode: Option<String>,
    #[arg(long)]
    mesh_probes: Option<String>,
    /// std, md, fibonacci or random.
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    points_dir: Option<String>,
    #[arg(long)]
    fallback: Option<String>,
    #[arg(long)]
    eval_grid: Option<String>,
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long)]
    realizations: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    sbf_sizes: Option<String>,
    #[arg(long)]
    sbf_order: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    warmup: Option<String>,
    #[arg(long)]
    target_error: Option<String>,
    #[arg(long)]
    exec: Option<String>,
    #[arg(long)]
    cell_parallel: Option<String>,
    #[arg(long)]
    record_time: Option<String>,
}

impl ExperimentArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 25] {
        [
            ("field", &self.field),
            ("harmonic_norm", &self.harmonic_norm),
            ("family", &self.family),
            ("orders", &self.orders),
            ("rho_c", &self.rho_c),
            ("rho_p", &self.rho_p),
            ("h_mode", &self.h_mode),
            ("mesh_probes", &self.mesh_probes),
            ("points", &self.points),
            ("sizes", &self.sizes),
            ("points_dir", &self.points_dir),
            ("fallback", &self.fallback),
            ("eval_grid", &self.eval_grid),
            ("deltas", &self.deltas),
            ("realizations", &self.realizations),
            ("seed", &self.seed),
            ("methods", &self.methods),
            ("sbf_sizes", &self.sbf_sizes),
            ("sbf_order", &self.sbf_order),
            ("repeats", &self.repeats),
            ("warmup", &self.warmup),
            ("target_error", &self.target_error),
            ("exec", &self.exec),
            ("cell_parallel", &self.cell_parallel),
            ("record_time", &self.record_time),
        ]
    }

    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| Error::Config(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct DecomposeArgs {
    /// CSV with columns x1,x2,x3,f1,f2,f3.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "gaussian")]
    family: String,
    #[arg(long, default_value_t = 4)]
    order: u32,
    /// Fixed shape parameter; overrides the `c·h^p` rule.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0.75)]
    rho_c: f64,
    #[arg(long, default_value_t = 0.5)]
    rho_p: f64,
    /// `proxy` (h = N^{-1/2}) or `measured`.
    #[arg(long, default_value = "proxy")]
    h_mode: String,
    /// Fibonacci evaluation grid size.
    #[arg(long, default_value_t = 10000)]
    eval_grid: usize,
    /// CSV with columns x1,x2,x3; replaces the Fibonacci grid.
    #[arg(long)]
    eval_file: Option<PathBuf>,
    #[arg(long, default_value = "parallel")]
    exec: String,
}

#[derive(Args)]
struct KernelInfoArgs {
    #[arg(long, default_value = "gaussian")]
    family: String,
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long)]
    rho: f64,
    /// Highest degree listed.
    #[arg(long, default_value_t = 100)]
    degree: usize,
    /// Gauss-Legendre nodes for families without closed-form coefficients.
    #[arg(long)]
    n_quad: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointsArgs {
    /// fibonacci, random, design, std or md.
    #[arg(long, default_value = "fibonacci")]
    kind: String,
    /// Node count (ignored for `design`).
    #[arg(long, short, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Strength of a generated antipodal design.
    #[arg(long, default_value_t = 21)]
    strength: usize,
    /// Read nodes from this whitespace-separated file instead.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    points_dir: Option<PathBuf>,
    /// Mesh-norm probes per node.
    #[arg(long, default_value_t = 10)]
    probes: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also write the nodes as a whitespace-separated point file.
    #[arg(long)]
    save: Option<PathBuf>,
    /// Explain where external point files come from and exit.
    #[arg(long)]
    fetch_note: bool,
}

fn parse_family(s: &str) -> Result<KernelFamily> {
    s.parse()
}

fn parse_exec(s: &str) -> Result<ExecMode> {
    s.parse()
}

fn experiment(args: &ExperimentArgs, run: fn(&ExperimentConfig) -> Result<CsvTable>) -> Result<()> {
    let cfg = args.config()?;
    if args.print_config {
        print!("{}", cfg.render());
        return Ok(());
    }
    run(&cfg)?.write(args.out.as_deref())
}

fn decompose(a: &DecomposeArgs) -> Result<()> {
    let rho = match a.rho {
        Some(r) if r > 0.0 => RhoChoice::Fixed(r),
        Some(r) => return Err(Error::Config(format!("--rho must be positive, got {r}"))),
        None => {
            let measured = match a.h_mode.as_str() {
                "measured" => true,
                "proxy" => false,
                m => return Err(Error::Config(format!("--h-mode must be measured or proxy, got '{m}'"))),
            };
            RhoChoice::Rule { c: a.rho_c, p: a.rho_p, measured }
        }
    };
    let job = DecomposeJob {
        input: a.input.clone(),
        family: parse_family(&a.family)?,
        order: a.order,
        rho,
        eval_grid: a.eval_grid,
        eval_file: a.eval_file.clone(),
        exec: parse_exec(&a.exec)?,
    };
    run_decompose(&job)?.write(a.out.as_deref())
}

fn points(a: &PointsArgs) -> Result<()> {
    if a.fetch_note {
        print!("{}", fetch_note());
        return Ok(());
    }
    let set = if let Some(f) = &a.file {
        load_points(f, FILE_NORM_TOL)?
    } else {
        match a.kind.as_str() {
            "fibonacci" => fibonacci_points(a.n)?,
            "random" => random_points(a.n, a.seed)?,
            "design" => antipodal_design(&DesignOptions { seed: a.seed, ..DesignOptions::for_strength(a.strength) })?,
            kind @ ("std" | "md") => {
                let prefix = if kind == "std" { "ss" } else { "md" };
                let dir = a
                    .points_dir
                    .clone()
                    .or_else(|| std::env::var_os(POINTS_DIR_ENV).map(PathBuf::from))
                    .unwrap_or_else(|| PathBuf::from("points"));
                let path = find_point_file(&dir, prefix, a.n)
                    .ok_or_else(|| Error::MissingPointSet(format!("{kind} N={}: no {prefix}*.{:05} in {} (see --fetch-note)", a.n, a.n, dir.display())))?;
                load_points(&path, FILE_NORM_TOL)?
            }
            other => return Err(Error::Config(format!("unknown point kind '{other}'"))),
        }
    };
    if let Some(p) = &a.save {
        save_points(p, &set)?;
    }
    describe_points(&set, a.probes.max(1)).write(a.out.as_deref())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose(a) => decompose(&a),
        Command::Convergence(a) => experiment(&a, run_convergence),
        Command::Noise(a) => experiment(&a, run_noise),
        Command::Bench(a) => experiment(&a, run_timing),
        Command::KernelInfo(a) => {
            if !(a.rho > 0.0) {
                return Err(Error::Config(format!("--rho must be positive, got {}", a.rho)));
            }
            kernel_info(parse_family(&a.family)?, a.order, a.rho, a.degree, a.n_quad)?.write(a.out.as_deref())
        }
        Command::Points(a) => points(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
