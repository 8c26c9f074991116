//! `minorkern` command-line tool: kernel evaluation, chain sampling,
//! validation suites, scaling studies and last-passage experiments.
//!
//! Exit codes: 0 success, 1 numerical or validation failure (diagnostic JSON
//! on stderr), 2 usage error.

mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minorkern::kernel::{Gauge, Route};
use minorkern::scaling::Regime;
use minorkern::EnsembleKind;

use commands::{KernelOptions, LimitOptions, LppMode, LppOptions, ProcessKind, SampleOptions, ScalingOptions};
use config::{parse_grid, parse_list, parse_tol, GridSpec, Overrides, RunConfig};
use error::CmdError;

#[derive(Parser, Debug)]
#[command(name = "minorkern", version, about = "Correlation kernels, samplers and scaling limits for minor processes")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    ensemble: Option<EnsembleArg>,
    /// Exponent at 0 (Laguerre, Jacobi).
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Exponent at 1 (Jacobi).
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Number of species.
    #[arg(id = "N", long = "N", global = true)]
    species_count: Option<usize>,
    /// Comma-separated species labels.
    #[arg(long, global = true)]
    species: Option<String>,
    /// Positions as min:max:step.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Falls back to MINORKERN_SEED, then 1.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    draws: Option<u64>,
    /// Output file for machine-readable results.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance override name=value; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    /// Write the merged configuration to this file before running.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-point densities on a grid: CSV species,y,rho1.
    Density {
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Kernel entries between all pairs of the given points.
    Kernel {
        /// Points as s:y,s:y,...
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long, value_enum, default_value = "construction")]
        gauge: GaugeArg,
        #[arg(long, value_enum, default_value = "auto")]
        route: RouteArg,
    },
    /// Correlation function at the given points.
    Correlation {
        #[arg(long, allow_hyphen_values = true)]
        points: String,
    },
    /// Draw interlaced chains.
    Sample {
        #[arg(long, value_enum)]
        process: ProcessArg,
        /// Top species size (defaults to --N).
        #[arg(long = "n")]
        n: Option<usize>,
        /// Projection depth (defaults to n - 1).
        #[arg(long)]
        depth: Option<usize>,
        /// Matrix size of the update chain (defaults to n).
        #[arg(long = "big-n")]
        big_n: Option<usize>,
        /// Row rates of the inhomogeneous chain.
        #[arg(long)]
        pi: Option<String>,
        /// Column rates of the inhomogeneous chain.
        #[arg(long = "pi-hat")]
        pi_hat: Option<String>,
    },
    /// Run a named validation suite; exit 1 if any check fails.
    Validate {
        /// One of biorthogonality, oracle, sampler-vs-kernel, gauge, rsk,
        /// lpp-bridge, bead-det, scaling.
        #[arg(long)]
        suite: String,
    },
    /// Finite-N values against their scaling limit over a list of N.
    Scaling {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long = "N-list")]
        n_list: String,
        /// Species offsets, one per point.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        offsets: String,
        /// Scaled positions, one per point.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        positions: String,
        /// entry:j,k or det:i,j,...
        #[arg(long, default_value = "entry:0,0")]
        quantity: String,
    },
    /// Last-passage experiments with a KS test at 1%.
    Lpp {
        #[arg(long, value_enum, default_value = "bridge")]
        mode: LppModeArg,
        /// Lattice size (defaults to --N).
        #[arg(long = "n")]
        n: Option<usize>,
        /// Factor applied to the last-passage times (bridge mode).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Constant row rate (inhomogeneous mode).
        #[arg(long, default_value_t = 0.3)]
        c: f64,
        /// Constant column rate (inhomogeneous mode).
        #[arg(long = "pi-hat", default_value_t = 0.7)]
        pi_hat: f64,
    },
    /// Scaled discrete law against its continuum density; rate a from --a.
    Limitcheck {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long = "a-s", allow_hyphen_values = true)]
        a_s: String,
        /// Layers separated by ';', entries by ','.
        #[arg(long)]
        points: String,
        #[arg(long, default_value = "50,100,200,400")]
        scales: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Density { .. } => "density",
            Command::Kernel { .. } => "kernel",
            Command::Correlation { .. } => "correlation",
            Command::Sample { .. } => "sample",
            Command::Validate { .. } => "validate",
            Command::Scaling { .. } => "scaling",
            Command::Lpp { .. } => "lpp",
            Command::Limitcheck { .. } => "limitcheck",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EnsembleArg {
    Gaussian,
    Laguerre,
    Jacobi,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GaugeArg {
    Construction,
    Orthonormal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RouteArg {
    Auto,
    Construction,
    Series,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProcessArg {
    GueMinor,
    LueChain,
    Projection,
    Inhomogeneous,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RegimeArg {
    SoftFixed,
    Bulk,
    HardEdge,
    SoftDrift,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LppModeArg {
    Bridge,
    Inhomogeneous,
}

fn overrides(g: GlobalArgs) -> Result<Overrides, CmdError> {
    let species = match g.species {
        Some(s) => {
            let v: Vec<usize> = parse_list(&s).map_err(|e| CmdError::Usage(format!("--species: {e}")))?;
            if v.is_empty() {
                return Err(CmdError::Usage("--species is empty".into()));
            }
            Some(v)
        }
        None => None,
    };
    Ok(Overrides {
        kind: g.ensemble.map(|e| match e {
            EnsembleArg::Gaussian => EnsembleKind::Gaussian,
            EnsembleArg::Laguerre => EnsembleKind::Laguerre,
            EnsembleArg::Jacobi => EnsembleKind::Jacobi,
        }),
        a: g.a,
        b: g.b,
        n: g.species_count,
        species,
        grid: g.grid,
        seed: g.seed,
        draws: g.draws,
        out: g.out,
        threads: g.threads,
        tolerances: g.tolerances,
    })
}

fn run(cli: Cli) -> Result<(), CmdError> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let save = cli.global.save_config.clone();
    cfg.apply(overrides(cli.global)?);
    cfg.subcommand = Some(cli.command.name().to_string());
    if let Some(path) = save {
        cfg.save(&path)?;
    }
    if let Some(t) = cfg.threads.filter(|&t| t > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CmdError::Usage(format!("--threads: {e}")))?;
    }

    match cli.command {
        Command::Density { gnuplot } => commands::density(&cfg, gnuplot),
        Command::Kernel { points, gauge, route } => commands::kernel(
            &cfg,
            &points,
            KernelOptions {
                gauge: match gauge {
                    GaugeArg::Construction => Gauge::Construction,
                    GaugeArg::Orthonormal => Gauge::Orthonormal,
                },
                route: match route {
                    RouteArg::Auto => Route::Auto,
                    RouteArg::Construction => Route::Construction,
                    RouteArg::Series => Route::Series,
                },
            },
        ),
        Command::Correlation { points } => commands::correlation_cmd(&cfg, &points),
        Command::Sample {
            process,
            n,
            depth,
            big_n,
            pi,
            pi_hat,
        } => commands::sample(
            &cfg,
            match process {
                ProcessArg::GueMinor => ProcessKind::GueMinor,
                ProcessArg::LueChain => ProcessKind::LueChain,
                ProcessArg::Projection => ProcessKind::Projection,
                ProcessArg::Inhomogeneous => ProcessKind::Inhomogeneous,
            },
            SampleOptions {
                n,
                depth,
                big_n,
                pi,
                pi_hat,
            },
        ),
        Command::Validate { suite } => commands::validate(&cfg, &suite),
        Command::Scaling {
            regime,
            n_list,
            offsets,
            positions,
            quantity,
        } => commands::scaling(
            &cfg,
            ScalingOptions {
                regime: match regime {
                    RegimeArg::SoftFixed => Regime::SoftFixed,
                    RegimeArg::Bulk => Regime::Bulk,
                    RegimeArg::HardEdge => Regime::HardEdge,
                    RegimeArg::SoftDrift => Regime::SoftDrift,
                },
                n_list,
                offsets,
                positions,
                quantity,
            },
        ),
        Command::Lpp { mode, n, scale, c, pi_hat } => commands::lpp(
            &cfg,
            LppOptions {
                mode: match mode {
                    LppModeArg::Bridge => LppMode::Bridge,
                    LppModeArg::Inhomogeneous => LppMode::Inhomogeneous,
                },
                n,
                scale,
                c,
                pi_hat,
            },
        ),
        Command::Limitcheck {
            n1,
            n2,
            a_s,
            points,
            scales,
        } => commands::limitcheck(
            &cfg,
            LimitOptions {
                n1,
                n2,
                a_s,
                points,
                scales,
            },
        ),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        e.report();
        std::process::exit(e.exit_code());
    }
}
