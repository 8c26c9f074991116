//! Named validation suites. Each returns a list of checks, a check passing
//! when its statistic is strictly below its threshold.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::brute::BruteForceOracle;
use super::empirical::{BinSpec, DensityAccumulator};
use crate::error::{Error, Result};
use crate::kernel::{biorthogonality_check, kernel_direct, kernel_k, Gauge, ProcessSpec, SpeciesPoint};
use crate::linalg;
use crate::orthopoly::{airy, EnsembleKind, EnsembleSpec};
use crate::quad;
use crate::rsklab::{
    discrete_limit_check, eval_discrete_joint, inhomogeneous_homogeneous_test, inhomogeneous_vs_update_chain,
    last_passage, lpp_bridge_with_scale, lpp_eigenvalue_bridge_test, rsk_shape_sequence, sample_lattice_draw,
    to_counts, JacobiLimitParams, LatticeConfig, ShapeSequence, WeightModel,
};
use crate::samplers::{fold_draws, sample_gue_minor_draw, sample_lue_draw, sample_projection_draw, InterlacedChain};
use crate::scaling::{
    bead_kernel, bead_kernel_alt, convergence_report, limit_kernel_gauge_free, scaled_finite_kernel, LimitQuery,
    Quantity, Regime,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `statistic < threshold`; NaN fails.
    pub fn below(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic < threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {:.3e} (threshold {:.3e})", self.name, self.statistic, self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Biorthogonality,
    Oracle,
    SamplerVsKernel,
    Gauge,
    Rsk,
    LppBridge,
    BeadDet,
    Scaling,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Biorthogonality,
        Suite::Oracle,
        Suite::SamplerVsKernel,
        Suite::Gauge,
        Suite::Rsk,
        Suite::LppBridge,
        Suite::BeadDet,
        Suite::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Biorthogonality => "biorthogonality",
            Suite::Oracle => "oracle",
            Suite::SamplerVsKernel => "sampler-vs-kernel",
            Suite::Gauge => "gauge",
            Suite::Rsk => "rsk",
            Suite::LppBridge => "lpp-bridge",
            Suite::BeadDet => "bead-det",
            Suite::Scaling => "scaling",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: Suite, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        SuiteReport { suite, checks, pass }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Inputs shared by the suites; each suite reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub ensemble: EnsembleSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub draws: u64,
    pub seed: u64,
    /// Worker cap for sampling; 0 uses the global pool.
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            ensemble: EnsembleSpec::gaussian(),
            n: 2,
            draws: 100_000,
            seed: 1,
            threads: 0,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let proc = ProcessSpec::new(cfg.ensemble, cfg.n)?;
    let checks = match suite {
        Suite::Biorthogonality => biorthogonality_checks(&proc)?,
        Suite::Oracle => oracle_checks(&proc)?,
        Suite::SamplerVsKernel => {
            let sampler = SamplerProcess::for_ensemble(&cfg.ensemble, cfg.n)?;
            sampler_checks(&sampler, cfg.draws, cfg.seed, cfg.threads, SUP_NORM_THRESHOLD)?
        }
        Suite::Gauge => gauge_checks(&proc, GAUGE_PAIRS, cfg.seed)?,
        Suite::Rsk => {
            let mut c = rsk_checks(cfg.draws, cfg.seed)?;
            c.extend(discrete_limit_checks()?);
            c
        }
        Suite::LppBridge => lpp_bridge_checks(&[cfg.n], cfg.draws, cfg.seed)?,
        Suite::BeadDet => bead_det_checks(BEAD_TRIALS, cfg.seed)?,
        Suite::Scaling => scaling_checks()?,
    };
    Ok(SuiteReport::new(suite, checks))
}

pub const BIORTHOGONALITY_TOL: f64 = 1e-8;

/// `max |int Phi^n_j Psi^n_k - delta_jk|` for every species `n <= N`.
pub fn biorthogonality_checks(proc: &ProcessSpec) -> Result<Vec<Check>> {
    (1..=proc.n)
        .map(|n| {
            let c = biorthogonality_check(proc, n)?;
            Ok(Check::below(format!("species {n}"), c.max_error, BIORTHOGONALITY_TOL))
        })
        .collect()
}

pub const ORACLE_ONE_POINT_TOL: f64 = 1e-4;
pub const ORACLE_TWO_POINT_TOL: f64 = 5e-4;

// Five interior positions per ensemble, spread over the bulk of every species.
fn oracle_grid(proc: &ProcessSpec) -> [f64; 5] {
    let nf = proc.n as f64;
    match proc.ensemble.kind {
        EnsembleKind::Gaussian => {
            let r = (2.0 * nf).sqrt().max(1.0);
            [-0.8 * r, -0.35 * r, 0.1 * r, 0.45 * r, 0.85 * r]
        }
        EnsembleKind::Laguerre => {
            let edge = (nf.sqrt() + (nf + proc.ensemble.a).sqrt()).powi(2);
            [0.08 * edge, 0.25 * edge, 0.45 * edge, 0.7 * edge, 0.95 * edge]
        }
        EnsembleKind::Jacobi => [0.12, 0.3, 0.52, 0.68, 0.86],
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Kernel determinants against brute-force quadrature of the joint density:
/// one-point functions on a five-point grid for every species, and
/// two-point functions for pairs of species.
pub fn oracle_checks(proc: &ProcessSpec) -> Result<Vec<Check>> {
    let oracle = BruteForceOracle::new(proc)?;
    let grid = oracle_grid(proc);
    let mut checks = Vec::new();
    for s in 1..=proc.n {
        let mut worst = 0.0f64;
        for &y in &grid {
            let p = SpeciesPoint::new(s, y);
            let want = oracle.marginal(&[p])?;
            let got = crate::kernel::correlation(proc, &[p])?;
            worst = worst.max(rel_err(got, want));
        }
        checks.push(Check::below(format!("one-point species {s}"), worst, ORACLE_ONE_POINT_TOL));
    }
    for (s, t) in two_point_species(proc.n) {
        let mut worst = 0.0f64;
        for &(i, j) in &[(0usize, 2usize), (1, 3), (3, 1), (2, 4)] {
            let pts = [SpeciesPoint::new(s, grid[i]), SpeciesPoint::new(t, grid[j])];
            let want = oracle.marginal(&pts)?;
            let got = crate::kernel::correlation(proc, &pts)?;
            worst = worst.max(rel_err(got, want));
        }
        checks.push(Check::below(format!("two-point species ({s}, {t})"), worst, ORACLE_TWO_POINT_TOL));
    }
    Ok(checks)
}

fn two_point_species(n: usize) -> Vec<(usize, usize)> {
    match n {
        1 => Vec::new(),
        2 => vec![(1, 2), (2, 2)],
        _ => vec![(1, 2), (2, 3), (1, 3), (3, 3)],
    }
}

pub const SUP_NORM_THRESHOLD: f64 = 0.02;

/// A chain sampler whose species densities are given by a kernel process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "process")]
pub enum SamplerProcess {
    GueMinor { n: usize },
    LueChain { big_n: usize, n: usize },
    Projection { ensemble: EnsembleSpec, top: usize, depth: usize },
}

impl SamplerProcess {
    /// GUE minors for the Gaussian weight, the rank-one update chain for a
    /// Laguerre weight with integer exponent, and projections otherwise.
    pub fn for_ensemble(ensemble: &EnsembleSpec, n: usize) -> Result<Self> {
        Ok(match ensemble.kind {
            EnsembleKind::Gaussian => SamplerProcess::GueMinor { n },
            EnsembleKind::Laguerre if ensemble.a >= 0.0 && ensemble.a.fract() == 0.0 => SamplerProcess::LueChain {
                big_n: n + ensemble.a as usize,
                n,
            },
            _ => {
                if n < 2 {
                    return Err(Error::Argument("projection chains need N >= 2".into()));
                }
                SamplerProcess::Projection {
                    ensemble: *ensemble,
                    top: n,
                    depth: n - 1,
                }
            }
        })
    }

    pub fn draw(&self, seed: u64, draw: u64) -> Result<InterlacedChain> {
        match *self {
            SamplerProcess::GueMinor { n } => sample_gue_minor_draw(n, seed, draw),
            SamplerProcess::LueChain { big_n, n } => sample_lue_draw(big_n, n, seed, draw),
            SamplerProcess::Projection { ensemble, top, depth } => {
                sample_projection_draw(&ensemble, top, depth, seed, draw)
            }
        }
    }

    pub fn species(&self) -> Vec<usize> {
        match *self {
            SamplerProcess::GueMinor { n } | SamplerProcess::LueChain { n, .. } => (1..=n).collect(),
            SamplerProcess::Projection { top, depth, .. } => (top - depth..=top).collect(),
        }
    }

    pub fn kernel_process(&self) -> Result<ProcessSpec> {
        match *self {
            SamplerProcess::GueMinor { n } => ProcessSpec::new(EnsembleSpec::gaussian(), n),
            SamplerProcess::LueChain { big_n, n } => ProcessSpec::new(EnsembleSpec::laguerre((big_n - n) as f64)?, n),
            SamplerProcess::Projection { ensemble, top, .. } => ProcessSpec::new(ensemble, top),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SamplerProcess::GueMinor { n } => format!("gue-minor N={n}"),
            SamplerProcess::LueChain { big_n, n } => format!("lue-chain {big_n}x{big_n} N={n}"),
            SamplerProcess::Projection { ensemble, top, depth } => {
                format!("projection {:?} top={top} depth={depth}", ensemble.kind).to_lowercase()
            }
        }
    }
}

/// Histogram bins covering every species of `proc`. Widths are chosen so the
/// Poisson bound on the per-bin standard error at 10^6 draws,
/// `sqrt(max rho / (draws * width))`, is at most 0.005 for `N <= 4`.
pub fn sampler_bins(proc: &ProcessSpec) -> BinSpec {
    let nf = proc.n as f64;
    let (lo, hi, width) = match proc.ensemble.kind {
        EnsembleKind::Gaussian => {
            let r = (2.0 * nf).sqrt() + 3.0;
            (-r, r, 0.1)
        }
        EnsembleKind::Laguerre => {
            let edge = (nf.sqrt() + (nf + proc.ensemble.a).sqrt()).powi(2);
            (0.0, edge + 4.0 * edge.cbrt() + 6.0, 0.25)
        }
        EnsembleKind::Jacobi => (0.0, 1.0, 0.2),
    };
    let count = ((hi - lo) / width).round().max(1.0) as usize;
    BinSpec { lo, hi, count }
}

/// Bin averages of the kernel density `rho_1(s, .)`.
pub fn predicted_bin_averages(proc: &ProcessSpec, s: usize, bins: &BinSpec) -> Result<Vec<f64>> {
    let w = bins.width();
    let mut out = Vec::with_capacity(bins.count);
    let mut failure = None;
    for b in 0..bins.count {
        let a = bins.lo + b as f64 * w;
        let mass = quad::gl_panels(
            |y| {
                let p = SpeciesPoint::new(s, y);
                match kernel_k(proc, &p, &p) {
                    Ok(k) => k.value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            a,
            a + w,
            2,
            10,
        );
        out.push(mass / w);
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Histograms of every species over `draws` chains against the kernel
/// densities (sup norm of bin averages), plus the interlacing count.
pub fn sampler_checks(
    sampler: &SamplerProcess,
    draws: u64,
    seed: u64,
    threads: usize,
    sup_threshold: f64,
) -> Result<Vec<Check>> {
    let proc = sampler.kernel_process()?;
    let bins = sampler_bins(&proc);
    let species = sampler.species();
    let accs = fold_draws(
        draws,
        threads,
        || species.iter().map(|&s| DensityAccumulator::new(s, bins)).collect::<Vec<_>>(),
        |accs, d| {
            let chain = sampler.draw(seed, d)?;
            for a in accs.iter_mut() {
                a.add(&chain)?;
            }
            Ok(())
        },
        |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
    )?;
    let label = sampler.label();
    let mut checks = Vec::new();
    // Every accumulator sees every chain, so any one of them has the count.
    let violations = accs.first().map_or(0, |a| a.interlacing_violations);
    for acc in &accs {
        let est = acc.finish(seed)?;
        let predicted = predicted_bin_averages(&proc, acc.species, &bins)?;
        let sup = predicted
            .iter()
            .zip(&est.density)
            .map(|(p, e)| (p - e).abs())
            .fold(0.0, f64::max);
        checks.push(Check::below(format!("{label} species {} sup-norm", acc.species), sup, sup_threshold));
    }
    checks.push(Check::below(format!("{label} interlacing violations"), violations as f64, 1.0));
    Ok(checks)
}

pub const GAUGE_TOL: f64 = 1e-8;
pub const GAUGE_PAIRS: usize = 50;
pub const GAUGE_MIN_SEPARATION: f64 = 0.05;

fn bulk_interval(proc: &ProcessSpec) -> (f64, f64) {
    let nf = proc.n as f64;
    match proc.ensemble.kind {
        EnsembleKind::Gaussian => {
            let r = 0.9 * (2.0 * nf).sqrt().max(1.0);
            (-r, r)
        }
        EnsembleKind::Laguerre => (0.05, 0.9 * (nf.sqrt() + (nf + proc.ensemble.a).sqrt()).powi(2)),
        EnsembleKind::Jacobi => (0.03, 0.97),
    }
}

/// The construction kernel converted to the orthonormal gauge against the
/// direct form, on random pairs of species and bulk positions. The statistic
/// is the error relative to `max(|f|, sqrt(f(x,x) f(y,y)))`: the kernel's
/// natural size at that pair of points.
///
/// For `s < t` the kernel is discontinuous (`t - s = 1`) or has a kink across
/// `y = x`, and the filtered series resolves it only slowly; such pairs
/// closer than [`GAUGE_MIN_SEPARATION`] of the sampling interval are redrawn.
pub fn gauge_checks(proc: &ProcessSpec, pairs: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = bulk_interval(proc);
    let mut worst = 0.0f64;
    let mut drawn = 0;
    while drawn < pairs {
        let p1 = SpeciesPoint::new(rng.random_range(1..=proc.n), rng.random_range(lo..hi));
        let p2 = SpeciesPoint::new(rng.random_range(1..=proc.n), rng.random_range(lo..hi));
        if p1.s < p2.s && (p1.y - p2.y).abs() < GAUGE_MIN_SEPARATION * (hi - lo) {
            continue;
        }
        drawn += 1;
        let g = kernel_k(proc, &p1, &p2)?.to_gauge(proc, &p1, &p2, Gauge::Orthonormal).value;
        let f = kernel_direct(proc, &p1, &p2)?.value;
        let d1 = kernel_direct(proc, &p1, &p1)?.value;
        let d2 = kernel_direct(proc, &p2, &p2)?.value;
        let scale = f.abs().max((d1 * d2).abs().sqrt());
        worst = worst.max((g - f).abs() / scale);
    }
    Ok(vec![Check::below(
        format!("{:?} N={}, {pairs} pairs", proc.ensemble.kind, proc.n).to_lowercase(),
        worst,
        GAUGE_TOL,
    )])
}

pub const BEAD_TOL: f64 = 1e-7;
pub const BEAD_TRIALS: usize = 100;

fn bead_det(points: &[(i64, f64)], kernel: fn(i64, f64, i64, f64) -> Result<f64>) -> Result<f64> {
    let r = points.len();
    let mut m = DMatrix::zeros(r, r);
    for a in 0..r {
        for b in 0..r {
            m[(a, b)] = kernel(points[a].0, points[a].1, points[b].0, points[b].1)?;
        }
    }
    Ok(linalg::det(&m))
}

/// Determinants of the two bead kernel forms on random configurations of
/// `r <= 3` points with offsets in `0..=3` and positions in `[-2, 2]`.
pub fn bead_det_checks(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for t in 0..trials {
        let r = 1 + t % 3;
        let pts: Vec<(i64, f64)> = (0..r).map(|_| (rng.random_range(0..=3), rng.random_range(-2.0..2.0))).collect();
        let a = bead_det(&pts, bead_kernel)?;
        let b = bead_det(&pts, bead_kernel_alt)?;
        worst = worst.max((a - b).abs());
    }
    Ok(vec![Check::below(format!("{trials} configurations, max |det difference|"), worst, BEAD_TOL)])
}

fn geometric_lattice() -> Result<LatticeConfig> {
    LatticeConfig::new(
        2,
        1,
        1,
        WeightModel::Geometric {
            z: 0.5,
            t: 0.7,
            alphas: vec![0.6],
        },
    )
}

// Shape sequences (mu^(0), mu^(1)) for n2 = 1, p = 1 with parts at most `max`.
fn small_shape_sequences(max: u64) -> Result<Vec<ShapeSequence>> {
    let mut out = Vec::new();
    for m0 in 0..=max {
        for a in 0..=max {
            for b in 0..=a {
                let seq = ShapeSequence::new(1, vec![vec![m0], vec![a, b]])?;
                if seq.is_interlaced() {
                    out.push(seq);
                }
            }
        }
    }
    Ok(out)
}

/// RSK on sampled geometric lattices: the first row equals the last passage
/// time, consecutive shapes interlace, and shape frequencies match the
/// discrete joint law cell by cell (Bonferroni bound at family-wise 1%).
pub fn rsk_checks(draws: u64, seed: u64) -> Result<Vec<Check>> {
    let cfg = geometric_lattice()?;
    let cols = cfg.cols();
    let mut counts = HashMap::<Vec<Vec<u64>>, u64>::new();
    let mut row_mismatch = 0u64;
    let mut not_interlaced = 0u64;
    for d in 0..draws {
        let grid = sample_lattice_draw(&cfg, seed, d)?;
        let seq = rsk_shape_sequence(&to_counts(&grid)?, cfg.p)?;
        let top = &seq.shapes[cfg.p];
        if top.first().copied().unwrap_or(0) as f64 != last_passage(&grid, cfg.n1, cols)? {
            row_mismatch += 1;
        }
        if !seq.is_interlaced() {
            not_interlaced += 1;
        }
        *counts.entry(seq.shapes).or_default() += 1;
    }
    let n = draws as f64;
    let mut cells = Vec::new();
    for seq in small_shape_sequences(12)? {
        let p = eval_discrete_joint(&cfg, &seq)?;
        if p * n >= 100.0 {
            cells.push((p, *counts.get(&seq.shapes).unwrap_or(&0) as f64 / n));
        }
    }
    if cells.len() < 2 {
        return Err(Error::Argument(format!("{draws} draws leave fewer than two testable cells")));
    }
    let z = Normal::standard().inverse_cdf(1.0 - 0.005 / cells.len() as f64);
    let worst = cells
        .iter()
        .map(|&(p, f)| (f - p).abs() / (p * (1.0 - p) / n).sqrt())
        .fold(0.0, f64::max);
    Ok(vec![
        Check::below("first row equals last passage time (mismatches)", row_mismatch as f64, 1.0),
        Check::below("shapes interlace (failures)", not_interlaced as f64, 1.0),
        Check::below(format!("shape frequencies over {} cells, max |z|", cells.len()), worst, z),
    ])
}

pub const LIMIT_SCALES: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
pub const LIMIT_RATIO_TOL: f64 = 0.3;

/// `(n1, n2, a, a_s, points)` cases for the discrete-to-continuum limit.
pub fn discrete_limit_cases() -> Vec<(JacobiLimitParams, Vec<Vec<f64>>)> {
    let params = |n1, n2, a, a_s: &[f64]| JacobiLimitParams {
        n1,
        n2,
        a,
        a_s: a_s.to_vec(),
    };
    vec![
        (params(4, 2, 0.7, &[0.4]), vec![vec![1.0, 0.4], vec![1.4, 0.6, 0.2]]),
        (params(4, 1, 0.7, &[0.4, 0.9]), vec![vec![0.6], vec![1.0, 0.4], vec![1.2, 0.8, 0.2]]),
    ]
}

/// Relative errors of the scaled discrete law against the continuum density
/// at `L = 50 .. 400`; each doubling of `L` should halve the error.
pub fn discrete_limit_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (params, x) in discrete_limit_cases() {
        let errs = LIMIT_SCALES
            .iter()
            .map(|&l| discrete_limit_check(&params, &x, l).map(|c| c.rel_error))
            .collect::<Result<Vec<_>>>()?;
        let worst = errs.windows(2).map(|w| (w[0] / w[1] - 2.0).abs()).fold(0.0, f64::max);
        checks.push(Check::below(
            format!("(n1, n2, p) = ({}, {}, {}) error ratio per doubling, max |ratio - 2|", params.n1, params.n2, params.p()),
            worst,
            LIMIT_RATIO_TOL,
        ));
    }
    Ok(checks)
}

/// Two-sample KS tests at 1%: `l(n, n)` against the largest eigenvalue of
/// the update chain, and the inhomogeneous chain with constant rates
/// `(0.3, 0.7)` against the homogeneous chain, for each `n`.
pub fn lpp_bridge_checks(ns: &[usize], draws: u64, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &n in ns {
        let r = lpp_eigenvalue_bridge_test(n, draws, seed)?;
        checks.push(Check::below(format!("n={n} l(n,n) vs largest eigenvalue, KS"), r.statistic, r.critical_value));
        let r = inhomogeneous_homogeneous_test(n, 0.3, 0.7, draws, seed)?;
        checks.push(Check::below(
            format!("p={n} constant-rate inhomogeneous vs homogeneous chain, KS"),
            r.statistic,
            r.critical_value,
        ));
    }
    Ok(checks)
}

/// Negative controls for the bridge: the checks pass when the KS test
/// rejects a mismatched pair (last passage times doubled; unequal row rates).
pub fn lpp_bridge_controls(n: usize, draws: u64, seed: u64) -> Result<Vec<Check>> {
    let r = lpp_bridge_with_scale(n, draws, seed, 2.0)?;
    let mut rates = vec![0.1; n];
    rates[n - 1] = 2.5;
    let s = inhomogeneous_vs_update_chain(&rates, &vec![0.0; n], 1.0, draws, seed)?;
    Ok(vec![
        Check::below(format!("n={n} doubled l(n,n) rejected (critical / KS)"), r.critical_value / r.statistic, 1.0),
        Check::below(format!("p={n} unequal row rates rejected (critical / KS)"), s.critical_value / s.statistic, 1.0),
    ])
}

/// `Ai'(0)^2 = int_0^inf Ai(u)^2 du` by quadrature of the integral form.
pub fn airy_diagonal_at_zero() -> Result<f64> {
    let r = quad::adaptive(
        |u| {
            let (ai, _) = airy(u).unwrap_or((f64::NAN, f64::NAN));
            ai * ai
        },
        0.0,
        40.0,
        &[2.0, 5.0, 10.0],
        quad::Tolerance::rel(1e-12).with_abs(1e-16),
    )?;
    Ok(r.value)
}

fn sine_kernel(d: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else {
        (std::f64::consts::PI * d).sin() / (std::f64::consts::PI * d)
    }
}

// Largest ratio of consecutive errors; below 1 means strictly decreasing.
fn worst_error_ratio(errors: &[f64]) -> f64 {
    errors.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

/// Soft edge (Gaussian, fixed species), bulk, hard edge and drifting soft
/// edge (Laguerre) convergence of gauge-free scaled kernels.
pub fn scaling_checks() -> Result<Vec<Check>> {
    let g = EnsembleSpec::gaussian();
    let l0 = EnsembleSpec::laguerre(0.0)?;
    let mut checks = Vec::new();

    let oracle = airy_diagonal_at_zero()?;
    let soft = convergence_report(
        |n| LimitQuery::new(Regime::SoftFixed, g, n, vec![0.0], vec![0.0]),
        &[50, 100, 200],
        &Quantity::Entry { j: 0, k: 0 },
    )?;
    checks.push(Check::below("soft edge: limit vs integral form", (soft.limit[0] - oracle).abs(), 1e-10));
    let errs: Vec<f64> = soft.finite.iter().map(|f| (f - oracle).abs()).collect();
    checks.push(Check::below("soft edge: error ratio over N = 50, 100, 200", worst_error_ratio(&errs), 1.0));
    checks.push(Check::below("soft edge: error at N = 200", errs[2], 5e-2));

    let q = LimitQuery::new(Regime::Bulk, g, 200, vec![0.0, 0.0], vec![0.0, 0.5])?;
    checks.push(Check::below("bulk: |density - 1| at N = 200", (scaled_finite_kernel(&q, 0, 0)? - 1.0).abs(), 0.05));
    checks.push(Check::below(
        "bulk: off-diagonal vs sine kernel at N = 200",
        (scaled_finite_kernel(&q, 0, 1)? - sine_kernel(0.5)).abs(),
        0.05,
    ));

    let q = LimitQuery::new(Regime::HardEdge, l0, 200, vec![0.0], vec![0.0])?;
    checks.push(Check::below("hard edge: |diagonal - 1/4| at N = 200", (scaled_finite_kernel(&q, 0, 0)? - 0.25).abs(), 0.02));
    let q = LimitQuery::new(Regime::HardEdge, l0, 200, vec![0.0, 1.0], vec![1.0, 4.0])?;
    checks.push(Check::below(
        "hard edge: offset-1 cross kernel at N = 200",
        (scaled_finite_kernel(&q, 0, 1)? - limit_kernel_gauge_free(&q, 0, 1)?).abs(),
        0.05,
    ));

    let drift = convergence_report(
        |n| LimitQuery::new(Regime::SoftDrift, l0, n, vec![0.0, 0.25], vec![-0.5, 0.3]),
        &[100, 200, 400],
        &Quantity::Determinant(vec![0, 1]),
    )?;
    checks.push(Check::below("extended Airy: determinant error ratio over N = 100, 200, 400", worst_error_ratio(&drift.errors), 1.0));
    checks.push(Check::below("extended Airy: determinant error at N = 400", drift.errors[2], 0.1));
    Ok(checks)
}
