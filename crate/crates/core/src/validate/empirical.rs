//! Histogram estimates of one-point densities from sampled chains, and
//! comparisons of predicted grid functions against them.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::samplers::InterlacedChain;
use crate::stats::KS_C_ONE_PERCENT;

/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl BinSpec {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo < hi) || count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!("bad bins [{lo}, {hi}) x {count}")));
        }
        Ok(BinSpec { lo, hi, count })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.count).map(|b| self.lo + (b as f64 + 0.5) * self.width()).collect()
    }

    fn bin(&self, x: f64) -> Option<usize> {
        if x < self.lo || x >= self.hi {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.count - 1))
    }
}

/// Streaming histogram of species-`s` positions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityAccumulator {
    pub species: usize,
    pub bins: BinSpec,
    pub counts: Vec<u64>,
    pub outside: u64,
    pub chains: u64,
    pub interlacing_violations: u64,
}

impl DensityAccumulator {
    pub fn new(species: usize, bins: BinSpec) -> Self {
        DensityAccumulator {
            species,
            bins,
            counts: vec![0; bins.count],
            outside: 0,
            chains: 0,
            interlacing_violations: 0,
        }
    }

    pub fn add(&mut self, chain: &InterlacedChain) -> Result<()> {
        let xs = chain
            .species
            .get(&self.species)
            .filter(|v| !v.is_empty())
            .ok_or_else(|| Error::Argument(format!("chain has no species {}", self.species)))?;
        for &x in xs {
            match self.bins.bin(x) {
                Some(b) => self.counts[b] += 1,
                None => self.outside += 1,
            }
        }
        self.chains += 1;
        self.interlacing_violations += chain.interlacing_violations() as u64;
        Ok(())
    }

    pub fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
        self.chains += other.chains;
        self.interlacing_violations += other.interlacing_violations;
        self
    }

    pub fn finish(&self, seed: u64) -> Result<DensityEstimate> {
        if self.chains == 0 {
            return Err(Error::Argument("no chains accumulated".into()));
        }
        let n = self.chains as f64;
        let s = self.species as f64;
        let width = self.bins.width();
        let slots = n * s;
        let mut density = Vec::with_capacity(self.bins.count);
        let mut lower = Vec::with_capacity(self.bins.count);
        let mut upper = Vec::with_capacity(self.bins.count);
        for &c in &self.counts {
            // Wilson interval for the fraction of particle slots in the bin.
            let p = c as f64 / slots;
            let z2 = Z_99 * Z_99;
            let centre = (p + z2 / (2.0 * slots)) / (1.0 + z2 / slots);
            let half = Z_99 * (p * (1.0 - p) / slots + z2 / (4.0 * slots * slots)).sqrt() / (1.0 + z2 / slots);
            let scale = s / width;
            density.push(p * scale);
            lower.push((centre - half).max(0.0) * scale);
            upper.push((centre + half) * scale);
        }
        let inside: u64 = self.counts.iter().sum();
        Ok(DensityEstimate {
            species: self.species,
            bins: self.bins,
            centers: self.bins.centers(),
            density,
            lower,
            upper,
            counts: self.counts.clone(),
            total_mass: (inside + self.outside) as f64 / n,
            mass_in_range: inside as f64 / n,
            draws: self.chains,
            seed,
            interlacing_violations: self.interlacing_violations,
        })
    }
}

/// Histogram estimate of `rho_1(s, .)`: bin counts over (chains x bin width),
/// so the density integrates to the species size over the whole line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub species: usize,
    pub bins: BinSpec,
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    /// 99% interval per bin.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub counts: Vec<u64>,
    pub total_mass: f64,
    pub mass_in_range: f64,
    pub draws: u64,
    pub seed: u64,
    pub interlacing_violations: u64,
}

impl DensityEstimate {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# species={} draws={} seed={}", self.species, self.draws, self.seed)?;
        writeln!(w, "center,density,lower99,upper99,count")?;
        for b in 0..self.centers.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.centers[b], self.density[b], self.lower[b], self.upper[b], self.counts[b]
            )?;
        }
        Ok(())
    }
}

/// Histogram of species `s` over a chain collection (at least one chain).
pub fn empirical_density(chains: &[InterlacedChain], s: usize, bins: BinSpec, seed: u64) -> Result<DensityEstimate> {
    let mut acc = DensityAccumulator::new(s, bins);
    for c in chains {
        acc.add(c)?;
    }
    acc.finish(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    SupNorm,
    KolmogorovSmirnov,
    ChiSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub test: TestKind,
    pub statistic: f64,
    pub threshold: f64,
    pub draws: u64,
    pub seed: u64,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn new(test: TestKind, statistic: f64, threshold: f64, draws: u64, seed: u64) -> Self {
        ComparisonReport {
            test,
            statistic,
            threshold,
            draws,
            seed,
            pass: statistic < threshold,
        }
    }
}

/// Compares a predicted density at the bin centers with an estimate.
///
/// - `SupNorm`: `max |predicted - estimated|` against `sup_threshold`.
/// - `KolmogorovSmirnov`: sup distance of the cumulative bin masses, each
///   divided by the species size, against `1.628 / sqrt(draws)`.
/// - `ChiSquare`: Pearson statistic over bins with at least 5 expected
///   counts, against the 99% quantile with (bins - 1) degrees of freedom.
///
/// Particles of one chain are dependent, so the KS and chi-square thresholds
/// treat each chain as one observation.
pub fn compare(
    predicted: &[f64],
    estimated: &DensityEstimate,
    test: TestKind,
    sup_threshold: Option<f64>,
) -> Result<ComparisonReport> {
    if predicted.len() != estimated.density.len() {
        return Err(Error::Argument(format!(
            "predicted grid has {} points, estimate has {} bins",
            predicted.len(),
            estimated.density.len()
        )));
    }
    let n = estimated.draws as f64;
    let width = estimated.bins.width();
    let s = estimated.species as f64;
    let (statistic, threshold) = match test {
        TestKind::SupNorm => {
            let t = sup_threshold.ok_or_else(|| Error::Argument("sup-norm comparison needs a threshold".into()))?;
            let d = predicted
                .iter()
                .zip(&estimated.density)
                .map(|(p, e)| (p - e).abs())
                .fold(0.0, f64::max);
            (d, t)
        }
        TestKind::KolmogorovSmirnov => {
            let (mut fp, mut fe, mut d) = (0.0f64, 0.0f64, 0.0f64);
            for (p, e) in predicted.iter().zip(&estimated.density) {
                fp += p * width / s;
                fe += e * width / s;
                d = d.max((fp - fe).abs());
            }
            (d, KS_C_ONE_PERCENT / n.sqrt())
        }
        TestKind::ChiSquare => {
            let mut stat = 0.0;
            let mut used = 0usize;
            for (p, &c) in predicted.iter().zip(&estimated.counts) {
                let expected = p * width * n;
                if expected >= 5.0 {
                    stat += (c as f64 - expected).powi(2) / expected;
                    used += 1;
                }
            }
            if used < 2 {
                return Err(Error::Argument("fewer than two bins with 5 expected counts".into()));
            }
            let chi = ChiSquared::new((used - 1) as f64).map_err(|e| Error::Argument(e.to_string()))?;
            (stat, chi.inverse_cdf(0.99))
        }
    };
    Ok(ComparisonReport::new(test, statistic, threshold, estimated.draws, estimated.seed))
}
