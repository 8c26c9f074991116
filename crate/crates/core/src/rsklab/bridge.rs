//! Two-sample comparisons between last passage times and the eigenvalue
//! chains: `l(n, n)` for unit exponential sites against the largest
//! eigenvalue of the rank-one update chain, and the inhomogeneous chain with
//! constant row rates against the homogeneous one.

use serde::{Deserialize, Serialize};

use super::{last_passage, sample_lattice_with, LatticeConfig, WeightModel};
use crate::error::Result;
use crate::samplers::{draw_rng, fold_draws, lue_chain_with, wishart_chain_inhomogeneous_with};
use crate::stats::{ks_critical_1pct, ks_two_sample};

// Offset separating the second sample's RNG streams from the first's.
const SECOND_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub critical_value: f64,
    pub draws: u64,
    pub seed: u64,
    pub pass: bool,
}

impl KsReport {
    fn new(a: &[f64], b: &[f64], draws: u64, seed: u64) -> Self {
        let statistic = ks_two_sample(a, b);
        let critical_value = ks_critical_1pct(a.len(), b.len());
        KsReport {
            statistic,
            critical_value,
            draws,
            seed,
            pass: statistic < critical_value,
        }
    }
}

fn collect<F: Fn(u64) -> Result<f64> + Sync>(draws: u64, f: F) -> Result<Vec<f64>> {
    fold_draws(
        draws,
        0,
        Vec::new,
        |acc: &mut Vec<f64>, d| {
            acc.push(f(d)?);
            Ok(())
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

/// `l(n, n)` with unit exponential sites, multiplied by `scale`, against the
/// largest eigenvalue of the `n x n` update chain after `n` steps (weight
/// `e^{-y}`). `scale = 1` is the matched convention.
pub fn lpp_bridge_with_scale(n: usize, draws: u64, seed: u64, scale: f64) -> Result<KsReport> {
    let cfg = LatticeConfig::new(n, n, 0, WeightModel::ExponentialHomogeneous)?;
    let lpp = collect(draws, |d| {
        let grid = sample_lattice_with(&cfg, &mut draw_rng(seed, d))?;
        Ok(scale * last_passage(&grid, n, n)?)
    })?;
    let eig = collect(draws, |d| {
        let (species, _) = lue_chain_with(n, n, &mut draw_rng(seed, d | SECOND_STREAM))?;
        Ok(*species[&n].last().expect("species n is nonempty"))
    })?;
    Ok(KsReport::new(&lpp, &eig, draws, seed))
}

pub fn lpp_eigenvalue_bridge_test(n: usize, draws: u64, seed: u64) -> Result<KsReport> {
    lpp_bridge_with_scale(n, draws, seed, 1.0)
}

/// Largest eigenvalue of the `p x p` inhomogeneous chain (`p = pi.len()`)
/// against the homogeneous update chain with unit rates divided by `rate`.
pub fn inhomogeneous_vs_update_chain(pi: &[f64], pi_hat: &[f64], rate: f64, draws: u64, seed: u64) -> Result<KsReport> {
    let p = pi.len();
    let inh = collect(draws, |d| {
        let (species, _) = wishart_chain_inhomogeneous_with(pi, pi_hat, &mut draw_rng(seed, d))?;
        Ok(*species[&p].last().expect("species p is nonempty"))
    })?;
    let hom = collect(draws, |d| {
        let (species, _) = lue_chain_with(p, p, &mut draw_rng(seed, d | SECOND_STREAM))?;
        Ok(species[&p].last().expect("species p is nonempty") / rate)
    })?;
    Ok(KsReport::new(&inh, &hom, draws, seed))
}

/// Constant row rates `pi_i = c` and column rates `pi_hat`: every site has
/// rate `c + pi_hat`, so the chain is the homogeneous one rescaled.
pub fn inhomogeneous_homogeneous_test(p: usize, c: f64, pi_hat: f64, draws: u64, seed: u64) -> Result<KsReport> {
    inhomogeneous_vs_update_chain(&vec![c; p], &vec![pi_hat; p], c + pi_hat, draws, seed)
}
