//! Independent oracles and statistical comparisons: brute-force quadrature of
//! the joint density at small N, histogram estimates from sampled chains,
//! significance-tested comparisons, and the named validation suites.

mod brute;
mod empirical;
mod suites;
#[cfg(test)]
mod tests;

pub use brute::{brute_force_marginal, BruteForceOracle, BRUTE_FORCE_MAX_DIM, BRUTE_FORCE_MAX_N};
pub use empirical::{
    compare, empirical_density, BinSpec, ComparisonReport, DensityAccumulator, DensityEstimate, TestKind,
};
pub use suites::*;
