use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use minorkern::kernel::{correlation, kernel_entry, kernel_k, kernel_matrix, Gauge, Route};
use minorkern::rsklab::{discrete_limit_check, inhomogeneous_homogeneous_test, lpp_bridge_with_scale, JacobiLimitParams};
use minorkern::samplers::{
    fold_draws, sample_gue_minor_draw, sample_lue_draw, sample_projection_draw, sample_wishart_inhomogeneous_draw,
    write_chains_csv, InterlacedChain,
};
use minorkern::scaling::{convergence_report, LimitQuery, Quantity, Regime};
use minorkern::validate::{run_suite, sampler_checks, SamplerProcess, Suite, SuiteConfig, SuiteReport, SUP_NORM_THRESHOLD};
use minorkern::{EnsembleKind, EnsembleSpec, ProcessSpec, SpeciesPoint};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{parse_list, RunConfig};
use crate::error::CmdError;

pub const SUP_NORM_TOL: &str = "sup-norm";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, CmdError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CmdError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn kind_name(kind: EnsembleKind) -> &'static str {
    match kind {
        EnsembleKind::Gaussian => "gaussian",
        EnsembleKind::Laguerre => "laguerre",
        EnsembleKind::Jacobi => "jacobi",
    }
}

fn ensemble_header(w: &mut impl Write, proc: &ProcessSpec) -> std::io::Result<()> {
    let e = proc.ensemble;
    writeln!(w, "# ensemble={} a={} b={}", kind_name(e.kind), e.a, e.b)?;
    writeln!(w, "# N={}", proc.n)
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CmdError> {
    Err(CmdError::Usage(msg.into()))
}

fn list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, CmdError>
where
    T::Err: std::fmt::Display,
{
    let v = parse_list(s).map_err(|e| CmdError::Usage(format!("--{flag}: {e}")))?;
    if v.is_empty() {
        return usage(format!("--{flag} is empty"));
    }
    Ok(v)
}

/// `"s:y,s:y,..."`.
pub fn parse_points(s: &str) -> Result<Vec<SpeciesPoint>, CmdError> {
    let pts = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (sp, y) = p.split_once(':').ok_or_else(|| format!("expected s:y, got '{p}'"))?;
            let sp: usize = sp.trim().parse().map_err(|e| format!("'{sp}': {e}"))?;
            let y: f64 = y.trim().parse().map_err(|e| format!("'{y}': {e}"))?;
            Ok(SpeciesPoint::new(sp, y))
        })
        .collect::<Result<Vec<_>, String>>()
        .map_err(|e| CmdError::Usage(format!("--points: {e}")))?;
    if pts.is_empty() {
        return usage("--points is empty");
    }
    Ok(pts)
}

fn process(cfg: &RunConfig) -> Result<ProcessSpec, CmdError> {
    Ok(ProcessSpec::new(cfg.ensemble()?, cfg.require_n()?)?)
}

pub fn density(cfg: &RunConfig, gnuplot: bool) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let proc = process(cfg)?;
    let species = cfg.species.clone().unwrap_or_else(|| (1..=proc.n).collect());
    for &s in &species {
        proc.check_species(s)?;
    }
    let Some(grid) = cfg.grid else {
        return usage("the --grid option is required");
    };
    let ys = grid.points();
    let (lo, hi) = proc.ensemble.support();
    let jobs: Vec<(usize, f64)> = species.iter().flat_map(|&s| ys.iter().map(move |&y| (s, y))).collect();
    let values = jobs
        .par_iter()
        .map(|&(s, y)| {
            if y < lo || y > hi {
                return Ok(0.0);
            }
            let p = SpeciesPoint::new(s, y);
            kernel_k(&proc, &p, &p).map(|k| k.value)
        })
        .collect::<minorkern::Result<Vec<f64>>>()?;

    let path = cfg.out_or("density.csv");
    let mut w = create(&path)?;
    ensemble_header(&mut w, &proc)?;
    writeln!(w, "species,y,rho1")?;
    for ((s, y), v) in jobs.iter().zip(&values) {
        writeln!(w, "{s},{},{}", num(*y), num(*v))?;
    }
    w.flush()?;

    println!("density: {} species x {} points written to {}", species.len(), ys.len(), path.display());
    if ys.len() > 1 {
        for (i, s) in species.iter().enumerate() {
            let v = &values[i * ys.len()..(i + 1) * ys.len()];
            let mass: f64 = v.windows(2).map(|p| 0.5 * (p[0] + p[1]) * grid.step).sum();
            println!("  species {s}: trapezoid mass over the grid {mass:.6}");
        }
    }
    if gnuplot {
        let script = path.with_extension("gp");
        let words: Vec<String> = species.iter().map(|s| s.to_string()).collect();
        let mut g = create(&script)?;
        writeln!(g, "set datafile separator ','")?;
        writeln!(g, "set xlabel 'y'")?;
        writeln!(g, "set ylabel 'rho1'")?;
        writeln!(
            g,
            "plot for [s in \"{}\"] '{}' skip 3 using (column(1) == s + 0 ? column(2) : 1/0):3 with lines title 'species '.s",
            words.join(" "),
            path.display()
        )?;
        g.flush()?;
        println!("  gnuplot script written to {}", script.display());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct KernelOptions {
    pub gauge: Gauge,
    pub route: Route,
}

pub fn kernel(cfg: &RunConfig, points: &str, opts: KernelOptions) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let proc = process(cfg)?;
    let pts = parse_points(points)?;
    for p in &pts {
        proc.check_point(p)?;
    }
    let pairs: Vec<(SpeciesPoint, SpeciesPoint)> =
        pts.iter().flat_map(|p| pts.iter().map(move |q| (*p, *q))).collect();
    let values = pairs
        .par_iter()
        .map(|(p, q)| kernel_entry(&proc, p, q, opts.route).map(|k| k.to_gauge(&proc, p, q, opts.gauge)))
        .collect::<minorkern::Result<Vec<_>>>()?;

    let gauge = match opts.gauge {
        Gauge::Construction => "construction",
        Gauge::Orthonormal => "orthonormal",
    };
    let path = cfg.out_or("kernel.csv");
    let mut w = create(&path)?;
    ensemble_header(&mut w, &proc)?;
    writeln!(w, "# gauge={gauge}")?;
    writeln!(w, "s1,y1,s2,y2,value,cancellation")?;
    for ((p, q), k) in pairs.iter().zip(&values) {
        writeln!(w, "{},{},{},{},{},{}", p.s, num(p.y), q.s, num(q.y), num(k.value), num(k.cancellation))?;
    }
    w.flush()?;
    let worst = values.iter().map(|k| k.cancellation).fold(1.0, f64::max);
    println!(
        "kernel: {} entries ({gauge} gauge) written to {}; worst cancellation {worst:.2e}",
        values.len(),
        path.display()
    );
    Ok(())
}

pub fn correlation_cmd(cfg: &RunConfig, points: &str) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let proc = process(cfg)?;
    let pts = parse_points(points)?;
    let m = kernel_matrix(&proc, &pts, Route::Auto)?;
    let rho = correlation(&proc, &pts)?;
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    let path = cfg.out_or("correlation.json");
    write_json(
        &path,
        &json!({
            "ensemble": proc.ensemble,
            "N": proc.n,
            "points": pts,
            "kernel_matrix": rows,
            "correlation": rho,
        }),
    )?;
    println!("correlation of {} points: {rho:.12e} (written to {})", pts.len(), path.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    GueMinor,
    LueChain,
    Projection,
    Inhomogeneous,
}

#[derive(Debug, Clone, Default)]
pub struct SampleOptions {
    pub n: Option<usize>,
    pub depth: Option<usize>,
    pub big_n: Option<usize>,
    pub pi: Option<String>,
    pub pi_hat: Option<String>,
}

pub fn sample(cfg: &RunConfig, kind: ProcessKind, opts: SampleOptions) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let seed = cfg.resolved_seed()?;
    let draws = cfg.draws.unwrap_or(1000);
    let top = || {
        opts.n
            .or(cfg.n)
            .ok_or_else(|| CmdError::Usage("--n or --N is required for this process".into()))
    };
    let draw: Box<dyn Fn(u64) -> minorkern::Result<InterlacedChain> + Sync> = match kind {
        ProcessKind::GueMinor => {
            let n = top()?;
            Box::new(move |d| sample_gue_minor_draw(n, seed, d))
        }
        ProcessKind::LueChain => {
            let n = top()?;
            let big_n = opts.big_n.unwrap_or(n);
            Box::new(move |d| sample_lue_draw(big_n, n, seed, d))
        }
        ProcessKind::Projection => {
            let n = top()?;
            if n < 2 {
                return usage("projection chains need --n >= 2");
            }
            let depth = opts.depth.unwrap_or(n - 1);
            let ensemble: EnsembleSpec = cfg.ensemble()?;
            Box::new(move |d| sample_projection_draw(&ensemble, n, depth, seed, d))
        }
        ProcessKind::Inhomogeneous => {
            let (Some(pi), Some(pi_hat)) = (&opts.pi, &opts.pi_hat) else {
                return usage("the inhomogeneous process needs --pi and --pi-hat");
            };
            let pi: Vec<f64> = list("pi", pi)?;
            let pi_hat: Vec<f64> = list("pi-hat", pi_hat)?;
            Box::new(move |d| sample_wishart_inhomogeneous_draw(&pi, &pi_hat, seed, d))
        }
    };
    let chains = fold_draws(
        draws,
        0,
        Vec::new,
        |acc: &mut Vec<InterlacedChain>, d| {
            acc.push(draw(d)?);
            Ok(())
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    let path = cfg.out_or("chains.csv");
    let mut w = create(&path)?;
    write_chains_csv(&mut w, &chains)?;
    w.flush()?;
    let violations: usize = chains.iter().map(|c| c.interlacing_violations()).sum();
    let merges: usize = chains.iter().map(|c| c.degeneracies).sum();
    let rows: usize = chains.iter().map(|c| c.species.values().map(Vec::len).sum::<usize>()).sum();
    println!(
        "sample: {draws} draws, {rows} rows written to {} (seed {seed}); interlacing violations {violations}, pole merges {merges}",
        path.display()
    );
    Ok(())
}

pub fn validate(cfg: &RunConfig, suite: &str) -> Result<(), CmdError> {
    let suite: Suite = suite.parse()?;
    let sup_norm = if suite == Suite::SamplerVsKernel {
        cfg.check_tolerances(&[SUP_NORM_TOL])?;
        cfg.tolerance(SUP_NORM_TOL)
    } else {
        cfg.check_tolerances(&[])?;
        None
    };
    let defaults = SuiteConfig::default();
    let suite_cfg = SuiteConfig {
        ensemble: cfg.ensemble()?,
        n: cfg.n.unwrap_or(defaults.n),
        draws: cfg.draws.unwrap_or(defaults.draws),
        seed: cfg.resolved_seed()?,
        threads: 0,
    };
    let report = match sup_norm {
        Some(t) => {
            let sampler = SamplerProcess::for_ensemble(&suite_cfg.ensemble, suite_cfg.n)?;
            SuiteReport::new(suite, sampler_checks(&sampler, suite_cfg.draws, suite_cfg.seed, 0, t)?)
        }
        None => run_suite(suite, &suite_cfg)?,
    };
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    doc["config"] = serde_json::to_value(&suite_cfg).expect("config serializes");
    if suite == Suite::SamplerVsKernel {
        doc["sup_norm_threshold"] = json!(sup_norm.unwrap_or(SUP_NORM_THRESHOLD));
    }
    let path = cfg.out_or("validate.json");
    write_json(&path, &doc)?;

    for c in &report.checks {
        println!("  {c}");
    }
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    println!("validate {suite}: {verdict} ({} checks, report in {})", report.checks.len(), path.display());
    if report.pass {
        Ok(())
    } else {
        let failures: Vec<_> = report.failures().cloned().collect();
        Err(CmdError::Failed(json!({
            "error": "validation",
            "suite": suite,
            "failures": failures,
        })))
    }
}

/// `"entry:j,k"` or `"det:i,j,..."`, indices into the point list.
pub fn parse_quantity(s: &str) -> Result<Quantity, CmdError> {
    let (kind, idx) = s.split_once(':').unwrap_or((s, ""));
    let idx: Vec<usize> = list("quantity", idx)?;
    match (kind.trim(), idx.as_slice()) {
        ("entry", [j, k]) => Ok(Quantity::Entry { j: *j, k: *k }),
        ("det", _) => Ok(Quantity::Determinant(idx)),
        _ => usage(format!("--quantity: expected entry:j,k or det:i,j,..., got '{s}'")),
    }
}

pub struct ScalingOptions {
    pub regime: Regime,
    pub n_list: String,
    pub offsets: String,
    pub positions: String,
    pub quantity: String,
}

pub fn scaling(cfg: &RunConfig, opts: ScalingOptions) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let ensemble = cfg.ensemble()?;
    let n_list: Vec<usize> = list("N-list", &opts.n_list)?;
    let offsets: Vec<f64> = list("offsets", &opts.offsets)?;
    let positions: Vec<f64> = list("positions", &opts.positions)?;
    let quantity = parse_quantity(&opts.quantity)?;
    let family = |n| LimitQuery::new(opts.regime, ensemble, n, offsets.clone(), positions.clone());
    let report = convergence_report(family, &n_list, &quantity)?;

    let path = cfg.out_or("scaling.csv");
    let mut w = create(&path)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    let json_path = path.with_extension("json");
    write_json(&json_path, &report)?;
    println!(
        "scaling {}: limit {:.12e}, last error {:.3e}, order estimate {:.3}, converging {}",
        serde_json::to_value(opts.regime).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        report.limit.last().copied().unwrap_or(f64::NAN),
        report.errors.last().copied().unwrap_or(f64::NAN),
        report.order_estimate,
        report.converging
    );
    println!("  written to {} and {}", path.display(), json_path.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LppMode {
    Bridge,
    Inhomogeneous,
}

pub struct LppOptions {
    pub mode: LppMode,
    pub n: Option<usize>,
    pub scale: f64,
    pub c: f64,
    pub pi_hat: f64,
}

pub fn lpp(cfg: &RunConfig, opts: LppOptions) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let n = opts
        .n
        .or(cfg.n)
        .ok_or_else(|| CmdError::Usage("--n or --N is required".into()))?;
    let draws = cfg.draws.unwrap_or(10_000);
    let seed = cfg.resolved_seed()?;
    let (mode, report) = match opts.mode {
        LppMode::Bridge => ("bridge", lpp_bridge_with_scale(n, draws, seed, opts.scale)?),
        LppMode::Inhomogeneous => (
            "inhomogeneous",
            inhomogeneous_homogeneous_test(n, opts.c, opts.pi_hat, draws, seed)?,
        ),
    };
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    doc["mode"] = json!(mode);
    doc["n"] = json!(n);
    match opts.mode {
        LppMode::Bridge => doc["scale"] = json!(opts.scale),
        LppMode::Inhomogeneous => {
            doc["c"] = json!(opts.c);
            doc["pi_hat"] = json!(opts.pi_hat);
        }
    }
    let path = cfg.out_or("lpp.json");
    write_json(&path, &doc)?;
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    println!(
        "lpp {mode} n={n}: {verdict} KS {:.4e} vs critical {:.4e} at 1% ({draws} draws, seed {seed}); report in {}",
        report.statistic,
        report.critical_value,
        path.display()
    );
    if report.pass {
        Ok(())
    } else {
        Err(CmdError::Failed(json!({ "error": "validation", "lpp": doc })))
    }
}

pub struct LimitOptions {
    pub n1: usize,
    pub n2: usize,
    pub a_s: String,
    pub points: String,
    pub scales: String,
}

pub fn limitcheck(cfg: &RunConfig, opts: LimitOptions) -> Result<(), CmdError> {
    cfg.check_tolerances(&[])?;
    let Some(a) = cfg.ensemble.map(|e| e.a) else {
        return usage("the --a option is required");
    };
    let params = JacobiLimitParams {
        n1: opts.n1,
        n2: opts.n2,
        a,
        a_s: list("a-s", &opts.a_s)?,
    };
    let points = opts
        .points
        .split(';')
        .map(|layer| list::<f64>("points", layer))
        .collect::<Result<Vec<_>, _>>()?;
    let scales: Vec<f64> = list("scales", &opts.scales)?;
    let checks = scales
        .iter()
        .map(|&l| discrete_limit_check(&params, &points, l))
        .collect::<minorkern::Result<Vec<_>>>()?;

    let path: PathBuf = cfg.out_or("limitcheck.csv");
    let mut w = create(&path)?;
    writeln!(w, "# n1={} n2={} a={} a_s={:?}", params.n1, params.n2, params.a, params.a_s)?;
    writeln!(w, "scale,scaled_discrete,continuum,rel_error")?;
    for c in &checks {
        writeln!(w, "{},{},{},{}", num(c.scale), num(c.scaled_discrete), num(c.continuum), num(c.rel_error))?;
    }
    w.flush()?;
    for c in &checks {
        println!("  L = {:>8}: relative error {:.4e}", c.scale, c.rel_error);
    }
    println!("limitcheck: {} scales written to {}", checks.len(), path.display());
    Ok(())
}
