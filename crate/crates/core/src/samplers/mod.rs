//! Seeded Monte Carlo samplers for interlaced eigenvalue chains.
//!
//! Every draw owns a ChaCha8 stream selected by its draw index, so a batch
//! of draws gives the same result regardless of how it is split across
//! threads.

mod secular;

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ProcessSpec;
use crate::orthopoly::{EnsembleKind, EnsembleSpec};

pub use secular::{secular_roots, secular_roots_detailed, SecularForm, SecularProblem, SecularRoots};

/// RNG for draw `draw` of a run seeded with `seed`.
pub fn draw_rng(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "process")]
pub enum ChainKind {
    GueMinor,
    /// Rank-one update chain of `big_n x big_n` matrices.
    LueChain { big_n: usize },
    /// Corank-1 projections of a `top`-point base ensemble draw.
    Projection { top: usize },
    /// Rank-one updates with site-dependent exponential rates.
    InhomogeneousWishart,
}

/// One draw of a multi-species eigenvalue configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacedChain {
    pub kind: ChainKind,
    pub ensemble: EnsembleSpec,
    pub seed: u64,
    pub draw: u64,
    /// Species label -> sorted eigenvalues.
    pub species: BTreeMap<usize, Vec<f64>>,
    /// Pole merges performed by the secular solver.
    pub degeneracies: usize,
}

impl InterlacedChain {
    /// Number of strict interlacing failures between consecutive species.
    pub fn interlacing_violations(&self) -> usize {
        let mut bad = 0;
        for (s, upper) in &self.species {
            if upper.windows(2).any(|w| !(w[0] < w[1])) {
                bad += 1;
            }
            let Some(lower) = self.species.get(&(s - 1)) else { continue };
            if lower.len() + 1 != upper.len() {
                bad += 1;
                continue;
            }
            for (i, &x) in lower.iter().enumerate() {
                if !(upper[i] < x && x < upper[i + 1]) {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// The kernel process whose species one-point functions this chain samples.
    pub fn kernel_process(&self) -> Result<ProcessSpec> {
        match self.kind {
            ChainKind::GueMinor => ProcessSpec::new(EnsembleSpec::gaussian(), self.top_species()),
            ChainKind::LueChain { big_n } => {
                let top = self.top_species();
                ProcessSpec::new(EnsembleSpec::laguerre((big_n - top) as f64)?, top)
            }
            ChainKind::Projection { top } => ProcessSpec::new(self.ensemble, top),
            ChainKind::InhomogeneousWishart => Err(Error::Argument(
                "the inhomogeneous chain has no kernel process".into(),
            )),
        }
    }

    pub fn top_species(&self) -> usize {
        *self.species.keys().next_back().unwrap_or(&0)
    }

    /// Largest eigenvalue of species `s`.
    pub fn largest(&self, s: usize) -> Option<f64> {
        self.species.get(&s).and_then(|v| v.last().copied())
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R, variance_each: f64) -> Complex64 {
    let sd = variance_each.sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

// N x N GUE with density proportional to exp(-tr H^2): diagonal variance 1/2,
// real and imaginary parts of off-diagonal entries variance 1/4 each.
fn gue_matrix<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let diag = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(diag.sample(rng), 0.0);
        for j in i + 1..n {
            let z = complex_gaussian(rng, 0.25);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::numeric("Hermitian eigensolver did not converge", None))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(v)
}

pub fn gue_minor_chain_with<R: Rng>(n: usize, rng: &mut R) -> Result<BTreeMap<usize, Vec<f64>>> {
    if n == 0 || n > 400 {
        return Err(Error::Argument(format!("GUE minor chain needs 1 <= N <= 400, got {n}")));
    }
    let h = gue_matrix(n, rng);
    let mut species = BTreeMap::new();
    for k in 1..=n {
        let minor = h.view((0, 0), (k, k)).into_owned();
        species.insert(k, hermitian_eigenvalues(minor)?);
    }
    Ok(species)
}

/// Eigenvalues of all leading principal minors of one `n x n` GUE matrix.
pub fn sample_gue_minor_chain(n: usize, seed: u64) -> Result<InterlacedChain> {
    sample_gue_minor_draw(n, seed, 0)
}

pub fn sample_gue_minor_draw(n: usize, seed: u64, draw: u64) -> Result<InterlacedChain> {
    let mut rng = draw_rng(seed, draw);
    Ok(InterlacedChain {
        kind: ChainKind::GueMinor,
        ensemble: EnsembleSpec::gaussian(),
        seed,
        draw,
        species: gue_minor_chain_with(n, &mut rng)?,
        degeneracies: 0,
    })
}

/// Rank-one updates `A + x x^dagger` of `big_n x big_n` matrices, species
/// `1..=n_max`. Each step rotates into the eigenbasis of the previous matrix,
/// where the update vector is again a standard complex Gaussian, so only the
/// squared moduli (exponential) and the zero-block mass (gamma) are drawn.
pub fn lue_chain_with<R: Rng>(big_n: usize, n_max: usize, rng: &mut R) -> Result<(BTreeMap<usize, Vec<f64>>, usize)> {
    if n_max == 0 || n_max > big_n {
        return Err(Error::Argument(format!("LUE chain needs 1 <= n_max <= N, got n_max={n_max}, N={big_n}")));
    }
    let rates = vec![1.0; n_max];
    update_chain(big_n, &rates, rng)
}

// Shared by the homogeneous and inhomogeneous-in-time chains: step n uses
// |x_i|^2 ~ Exp(rate_n) for every component.
fn update_chain<R: Rng>(big_n: usize, rates: &[f64], rng: &mut R) -> Result<(BTreeMap<usize, Vec<f64>>, usize)> {
    let mut species = BTreeMap::new();
    let mut current: Vec<f64> = Vec::new();
    let mut merged = 0;
    for (step, &rate) in rates.iter().enumerate() {
        let n = step;
        let weights: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) / rate).collect();
        let zeros = big_n - n;
        let zero_weight = if zeros > 0 {
            Gamma::new(zeros as f64, 1.0 / rate).unwrap().sample(rng)
        } else {
            0.0
        };
        let next = if n == 0 {
            vec![zero_weight]
        } else {
            let prob = SecularProblem::new(current.clone(), weights, SecularForm::LueUpdate { zero_weight })?;
            let r = secular_roots_detailed(&prob)?;
            merged += r.merged_poles;
            // Without zero eigenvalues left the update has one root fewer
            // than species n + 1 needs; that cannot happen for n < big_n.
            r.roots
        };
        species.insert(n + 1, next.clone());
        current = next;
    }
    Ok((species, merged))
}

/// Nonzero eigenvalues of the rank-`s` matrices `A_(s)`, `s = 1..=n_max`.
pub fn sample_lue_chain(big_n: usize, n_max: usize, seed: u64) -> Result<InterlacedChain> {
    sample_lue_draw(big_n, n_max, seed, 0)
}

pub fn sample_lue_draw(big_n: usize, n_max: usize, seed: u64, draw: u64) -> Result<InterlacedChain> {
    let mut rng = draw_rng(seed, draw);
    let (species, degeneracies) = lue_chain_with(big_n, n_max, &mut rng)?;
    Ok(InterlacedChain {
        kind: ChainKind::LueChain { big_n },
        ensemble: EnsembleSpec::laguerre((big_n - n_max) as f64)?,
        seed,
        draw,
        species,
        degeneracies,
    })
}

/// One draw of the `n` eigenvalues of the unitary ensemble with the weight of
/// `ensemble`. Gaussian: dense GUE. Laguerre: the complex bidiagonal model
/// (any `a > -1`). Jacobi: `(S1 + S2)^{-1/2} S1 (S1 + S2)^{-1/2}` with complex
/// Wishart `S1`, `S2` of `n + a` and `n + b` degrees of freedom (integer `a`,
/// `b` only).
pub fn ensemble_eigs_with<R: Rng>(ensemble: &EnsembleSpec, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    ensemble.validate()?;
    if n == 0 {
        return Err(Error::Argument("ensemble size must be >= 1".into()));
    }
    match ensemble.kind {
        EnsembleKind::Gaussian => hermitian_eigenvalues(gue_matrix(n, rng)),
        EnsembleKind::Laguerre => {
            // Bidiagonal B with |B_ii|^2 ~ Gamma(n + a - i + 1), |B_i,i+1|^2 ~ Gamma(n - i);
            // the eigenvalues of B^T B are the squared singular values.
            let a = ensemble.a;
            let mut diag = Vec::with_capacity(n);
            let mut sup = Vec::with_capacity(n);
            for i in 1..=n {
                diag.push(Gamma::new(n as f64 + a - i as f64 + 1.0, 1.0).unwrap().sample(rng).sqrt());
                if i < n {
                    sup.push(Gamma::new((n - i) as f64, 1.0).unwrap().sample(rng).sqrt());
                }
            }
            let mut t = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                t[(i, i)] = diag[i] * diag[i] + if i > 0 { sup[i - 1] * sup[i - 1] } else { 0.0 };
                if i + 1 < n {
                    t[(i, i + 1)] = diag[i] * sup[i];
                    t[(i + 1, i)] = diag[i] * sup[i];
                }
            }
            let mut v: Vec<f64> = t.symmetric_eigenvalues().iter().map(|x| x.max(f64::MIN_POSITIVE)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(v)
        }
        EnsembleKind::Jacobi => {
            let (a, b) = (ensemble.a, ensemble.b);
            if a.fract() != 0.0 || b.fract() != 0.0 || a < 0.0 || b < 0.0 {
                return Err(Error::Parameter(format!(
                    "the Jacobi sampler needs nonnegative integer exponents, got a={a}, b={b}"
                )));
            }
            let s1 = wishart(n, n + a as usize, rng);
            let s2 = wishart(n, n + b as usize, rng);
            let chol = Cholesky::new(&s1 + &s2).ok_or_else(|| Error::numeric("S1 + S2 not positive definite", None))?;
            let l = chol.l();
            // M = L^{-1} S1 L^{-dagger}
            let li = l
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::numeric("singular Cholesky factor", None))?;
            let mut m = &li * s1 * li.adjoint();
            // Symmetrize away rounding.
            let mt = m.adjoint();
            m = (m + mt).scale(0.5);
            let v = hermitian_eigenvalues(m)?;
            Ok(v.into_iter().map(|x| x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)).collect())
        }
    }
}

// X^dagger X with X an m x n matrix of complex Gaussians, E|x|^2 = 1.
fn wishart<R: Rng>(n: usize, m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let x = DMatrix::<Complex64>::from_fn(m, n, |_, _| complex_gaussian(rng, 0.5));
    x.adjoint() * x
}

pub fn sample_ensemble_eigs(ensemble: &EnsembleSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    ensemble_eigs_with(ensemble, n, &mut draw_rng(seed, 0))
}

/// Base draw of `n` eigenvalues followed by `depth` corank-1 projections.
/// In the eigenbasis a uniformly random unit vector has Dirichlet(1,..,1)
/// squared moduli; the projection function is scale-free, so independent
/// exponentials serve as weights.
pub fn projection_chain_with<R: Rng>(
    ensemble: &EnsembleSpec,
    n: usize,
    depth: usize,
    rng: &mut R,
) -> Result<(BTreeMap<usize, Vec<f64>>, usize)> {
    if depth >= n {
        return Err(Error::Argument(format!("projection depth {depth} must be < n = {n}")));
    }
    let mut species = BTreeMap::new();
    let mut current = ensemble_eigs_with(ensemble, n, rng)?;
    species.insert(n, current.clone());
    let mut merged = 0;
    for k in 1..=depth {
        let weights: Vec<f64> = (0..current.len()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let prob = SecularProblem::new(current.clone(), weights, SecularForm::Projection)?;
        let r = secular_roots_detailed(&prob)?;
        merged += r.merged_poles;
        current = r.roots;
        species.insert(n - k, current.clone());
    }
    Ok((species, merged))
}

pub fn sample_projection_chain(ensemble: &EnsembleSpec, n: usize, depth: usize, seed: u64) -> Result<InterlacedChain> {
    sample_projection_draw(ensemble, n, depth, seed, 0)
}

pub fn sample_projection_draw(
    ensemble: &EnsembleSpec,
    n: usize,
    depth: usize,
    seed: u64,
    draw: u64,
) -> Result<InterlacedChain> {
    let mut rng = draw_rng(seed, draw);
    let (species, degeneracies) = projection_chain_with(ensemble, n, depth, &mut rng)?;
    Ok(InterlacedChain {
        kind: ChainKind::Projection { top: n },
        ensemble: *ensemble,
        seed,
        draw,
        species,
        degeneracies,
    })
}

/// `p x p` chain `A_(n+1) = A_(n) + x x^dagger` where component `i` of the
/// `n`-th update vector has squared modulus `Exp(pi_i + pi_hat_n)` and a
/// uniform phase. The previous matrix is diagonalized densely to rotate the
/// update; the new eigenvalues come from the secular equation.
pub fn wishart_chain_inhomogeneous_with<R: Rng>(
    pi: &[f64],
    pi_hat: &[f64],
    rng: &mut R,
) -> Result<(BTreeMap<usize, Vec<f64>>, usize)> {
    inhomogeneous_chain_and_matrix(pi, pi_hat, rng).map(|(s, m, _)| (s, m))
}

fn inhomogeneous_chain_and_matrix<R: Rng>(
    pi: &[f64],
    pi_hat: &[f64],
    rng: &mut R,
) -> Result<(BTreeMap<usize, Vec<f64>>, usize, DMatrix<Complex64>)> {
    let p = pi.len();
    if p == 0 || pi_hat.len() < p {
        return Err(Error::Argument(format!(
            "need p >= 1 row rates and at least p column rates, got {} and {}",
            p,
            pi_hat.len()
        )));
    }
    for &a in pi {
        for &b in &pi_hat[..p] {
            if !(a + b > 0.0) {
                return Err(Error::Parameter(format!("rate pi + pi_hat = {} must be positive", a + b)));
            }
        }
    }
    let mut a = DMatrix::<Complex64>::zeros(p, p);
    let mut species = BTreeMap::new();
    let mut merged = 0;
    for n in 0..p {
        let x: Vec<Complex64> = (0..p)
            .map(|i| {
                let m2: f64 = rng.sample::<f64, _>(Exp1) / (pi[i] + pi_hat[n]);
                let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(m2.sqrt(), phase)
            })
            .collect();
        let roots = if n == 0 {
            vec![x.iter().map(|z| z.norm_sqr()).sum()]
        } else {
            let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 10_000 * p)
                .ok_or_else(|| Error::numeric("Hermitian eigensolver did not converge", None))?;
            // Components of x along each eigenvector.
            let mut poles = Vec::new();
            let mut weights = Vec::new();
            let mut zero_weight = 0.0;
            let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
            // The n largest eigenvalues are the nonzero ones.
            for (rank, &k) in order.iter().enumerate() {
                let v = eig.eigenvectors.column(k);
                let c: Complex64 = v.iter().zip(&x).map(|(vi, xi)| vi.conj() * xi).sum();
                if rank < p - n {
                    zero_weight += c.norm_sqr();
                } else {
                    poles.push(eig.eigenvalues[k].max(1e-300 * scale));
                    weights.push(c.norm_sqr().max(f64::MIN_POSITIVE));
                }
            }
            let prob = SecularProblem::new(poles, weights, SecularForm::LueUpdate { zero_weight })?;
            let r = secular_roots_detailed(&prob)?;
            merged += r.merged_poles;
            r.roots
        };
        for i in 0..p {
            for j in 0..p {
                a[(i, j)] += x[i] * x[j].conj();
            }
        }
        species.insert(n + 1, roots);
    }
    Ok((species, merged, a))
}

pub fn sample_wishart_chain_inhomogeneous(pi: &[f64], pi_hat: &[f64], seed: u64) -> Result<InterlacedChain> {
    sample_wishart_inhomogeneous_draw(pi, pi_hat, seed, 0)
}

pub fn sample_wishart_inhomogeneous_draw(pi: &[f64], pi_hat: &[f64], seed: u64, draw: u64) -> Result<InterlacedChain> {
    let mut rng = draw_rng(seed, draw);
    let (species, degeneracies) = wishart_chain_inhomogeneous_with(pi, pi_hat, &mut rng)?;
    Ok(InterlacedChain {
        kind: ChainKind::InhomogeneousWishart,
        ensemble: EnsembleSpec::laguerre(0.0)?,
        seed,
        draw,
        species,
        degeneracies,
    })
}

/// Runs `f(draw)` for `draw in 0..draws` on at most `threads` workers and
/// folds the results in draw order per chunk, merging chunks in order.
pub fn fold_draws<T, F, M>(draws: u64, threads: usize, init: impl Fn() -> T + Sync, f: F, merge: M) -> Result<T>
where
    T: Send,
    F: Fn(&mut T, u64) -> Result<()> + Sync,
    M: Fn(T, T) -> T,
{
    use rayon::prelude::*;
    let chunk = 4096u64;
    let chunks: Vec<(u64, u64)> = (0..draws.div_ceil(chunk)).map(|c| (c * chunk, ((c + 1) * chunk).min(draws))).collect();
    let run = || -> Result<Vec<T>> {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = init();
                for d in lo..hi {
                    f(&mut acc, d)?;
                }
                Ok(acc)
            })
            .collect()
    };
    let parts = if threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?
            .install(run)?
    };
    Ok(parts.into_iter().fold(init(), merge))
}

/// Chains in the CSV layout `draw_id,species,index,value` with `#` metadata.
pub fn write_chains_csv<W: Write>(out: &mut W, chains: &[InterlacedChain]) -> std::io::Result<()> {
    if let Some(c) = chains.first() {
        writeln!(out, "# process={}", serde_json::to_string(&c.kind).unwrap_or_default())?;
        writeln!(
            out,
            "# ensemble={} a={} b={}",
            serde_json::to_value(c.ensemble.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            c.ensemble.a,
            c.ensemble.b
        )?;
        writeln!(out, "# N={}", c.top_species())?;
        writeln!(out, "# seed={}", c.seed)?;
    }
    writeln!(out, "draw_id,species,index,value")?;
    for c in chains {
        for (s, vals) in &c.species {
            for (i, v) in vals.iter().enumerate() {
                writeln!(out, "{},{},{},{:.16e}", c.draw, s, i + 1, v)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
