//! Lattice side of the minor processes: random site weights, last passage
//! times, RSK shapes of nested sub-blocks, the joint law of those shapes and
//! its continuum limit, and comparisons against the eigenvalue samplers.
//!
//! Grids are `n1 x (n2 + p)` with entry `(i-1, j-1)` holding the site `(i, j)`
//! value (row `i`, column `j`).

mod bridge;
mod joint;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::draw_rng;

pub use bridge::{inhomogeneous_homogeneous_test, inhomogeneous_vs_update_chain, lpp_bridge_with_scale, lpp_eigenvalue_bridge_test, KsReport};
pub use joint::{
    discrete_limit_check, eval_discrete_joint, eval_jacobi_limit_pdf, eval_jacobi_limit_pdf_y, eval_jacobi_limit_weight_form,
    ln_discrete_joint, ln_k_tilde, JacobiLimitParams, LimitCheck,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum WeightModel {
    /// Geometric sites with parameter `z^2 t^{i+j-2}` in the first `n2`
    /// columns and `alpha_s z t^{i-1}` in column `n2 + s`.
    Geometric { z: f64, t: f64, alphas: Vec<f64> },
    /// Unit-rate exponential sites.
    ExponentialHomogeneous,
    /// Exponential sites with rate `i + j - 2 + 2a` (`j <= n2`) and
    /// `i - 1 + a + a_s` in column `n2 + s`.
    ExponentialJacobi { a: f64, a_s: Vec<f64> },
    /// Exponential sites with rate `pi_i + pi_hat_j`.
    ExponentialInhomogeneous { pi: Vec<f64>, pi_hat: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub n1: usize,
    pub n2: usize,
    pub p: usize,
    pub weights: WeightModel,
}

impl LatticeConfig {
    pub fn new(n1: usize, n2: usize, p: usize, weights: WeightModel) -> Result<Self> {
        let cfg = LatticeConfig { n1, n2, p, weights };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cols(&self) -> usize {
        self.n2 + self.p
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.cols() == 0 {
            return Err(Error::Parameter("lattice must have at least one row and column".into()));
        }
        let need_p = |len: usize, what: &str| {
            if len == self.p {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{what}: expected {} values, got {len}", self.p)))
            }
        };
        match &self.weights {
            WeightModel::Geometric { alphas, .. } => {
                need_p(alphas.len(), "alphas")?;
                for i in 1..=self.n1 {
                    for j in 1..=self.cols() {
                        let q = self.site_parameter(i, j);
                        if !(q > 0.0 && q < 1.0) {
                            return Err(Error::Parameter(format!("site ({i},{j}) parameter {q} not in (0,1)")));
                        }
                    }
                }
                if let WeightModel::Geometric { t, .. } = self.weights {
                    if !(t > 0.0 && t < 1.0) {
                        return Err(Error::Parameter(format!("t = {t} not in (0,1)")));
                    }
                }
            }
            WeightModel::ExponentialHomogeneous => {}
            WeightModel::ExponentialJacobi { a_s, .. } => need_p(a_s.len(), "a_s")?,
            WeightModel::ExponentialInhomogeneous { pi, pi_hat } => {
                if pi.len() != self.n1 || pi_hat.len() != self.cols() {
                    return Err(Error::Parameter(format!(
                        "need {} row rates and {} column rates, got {} and {}",
                        self.n1,
                        self.cols(),
                        pi.len(),
                        pi_hat.len()
                    )));
                }
            }
        }
        if !matches!(self.weights, WeightModel::Geometric { .. }) {
            for i in 1..=self.n1 {
                for j in 1..=self.cols() {
                    let r = self.site_parameter(i, j);
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(Error::Parameter(format!("site ({i},{j}) rate {r} must be positive")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Geometric parameter or exponential rate of site `(i, j)`, 1-based.
    pub fn site_parameter(&self, i: usize, j: usize) -> f64 {
        let (fi, fj) = (i as f64, j as f64);
        match &self.weights {
            WeightModel::Geometric { z, t, alphas } => {
                if j <= self.n2 {
                    z * z * t.powf(fi + fj - 2.0)
                } else {
                    alphas[j - self.n2 - 1] * z * t.powf(fi - 1.0)
                }
            }
            WeightModel::ExponentialHomogeneous => 1.0,
            WeightModel::ExponentialJacobi { a, a_s } => {
                if j <= self.n2 {
                    fi + fj - 2.0 + 2.0 * a
                } else {
                    fi - 1.0 + a + a_s[j - self.n2 - 1]
                }
            }
            WeightModel::ExponentialInhomogeneous { pi, pi_hat } => pi[i - 1] + pi_hat[j - 1],
        }
    }
}

pub fn sample_lattice_with<R: Rng>(cfg: &LatticeConfig, rng: &mut R) -> Result<DMatrix<f64>> {
    let mut grid = DMatrix::zeros(cfg.n1, cfg.cols());
    for j in 1..=cfg.cols() {
        for i in 1..=cfg.n1 {
            let q = cfg.site_parameter(i, j);
            grid[(i - 1, j - 1)] = match cfg.weights {
                WeightModel::Geometric { .. } => {
                    let g = Geometric::new(1.0 - q).map_err(|e| Error::Parameter(e.to_string()))?;
                    g.sample(rng) as f64
                }
                _ => rng.sample::<f64, _>(Exp1) / q,
            };
        }
    }
    Ok(grid)
}

/// Site values for draw 0 of `seed`.
pub fn sample_lattice(cfg: &LatticeConfig, seed: u64) -> Result<DMatrix<f64>> {
    sample_lattice_draw(cfg, seed, 0)
}

pub fn sample_lattice_draw(cfg: &LatticeConfig, seed: u64, draw: u64) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    sample_lattice_with(cfg, &mut draw_rng(seed, draw))
}

/// Table of `l(i, j)` for `i <= m`, `j <= n`.
pub fn last_passage_table(grid: &DMatrix<f64>, m: usize, n: usize) -> Result<DMatrix<f64>> {
    if m == 0 || n == 0 || m > grid.nrows() || n > grid.ncols() {
        return Err(Error::Argument(format!(
            "corner ({m},{n}) outside a {}x{} grid",
            grid.nrows(),
            grid.ncols()
        )));
    }
    let mut l = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let before = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => l[(0, j - 1)],
                (_, 0) => l[(i - 1, 0)],
                _ => f64::max(l[(i - 1, j)], l[(i, j - 1)]),
            };
            l[(i, j)] = grid[(i, j)] + before;
        }
    }
    Ok(l)
}

/// Maximum over up/right paths from `(1,1)` to `(m,n)` of the summed site values.
pub fn last_passage(grid: &DMatrix<f64>, m: usize, n: usize) -> Result<f64> {
    Ok(last_passage_table(grid, m, n)?[(m - 1, n - 1)])
}

/// Nonnegative integer copy of a grid of counts.
pub fn to_counts(grid: &DMatrix<f64>) -> Result<DMatrix<u64>> {
    let mut out = DMatrix::zeros(grid.nrows(), grid.ncols());
    for (o, &v) in out.iter_mut().zip(grid.iter()) {
        if !(v >= 0.0 && v.fract() == 0.0 && v < 9.0e15) {
            return Err(Error::Argument(format!("grid value {v} is not a count")));
        }
        *o = v as u64;
    }
    Ok(out)
}

/// RSK shapes `mu^(0), ..., mu^(p)` of the nested `n1 x (n2 + s)` sub-blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeSequence {
    pub n2: usize,
    /// `shapes[s]` has exactly `n2 + s` parts (trailing zeros kept).
    pub shapes: Vec<Vec<u64>>,
}

impl ShapeSequence {
    /// Pads each shape with zeros to `n2 + s` parts; fails if one is longer.
    pub fn new(n2: usize, shapes: Vec<Vec<u64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(shapes.len());
        for (s, mut mu) in shapes.into_iter().enumerate() {
            while mu.len() > n2 + s && mu.last() == Some(&0) {
                mu.pop();
            }
            if mu.len() > n2 + s {
                return Err(Error::Argument(format!("shape {s} has more than {} parts", n2 + s)));
            }
            if mu.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::Argument(format!("shape {s} is not a partition")));
            }
            mu.resize(n2 + s, 0);
            out.push(mu);
        }
        Ok(ShapeSequence { n2, shapes: out })
    }

    pub fn p(&self) -> usize {
        self.shapes.len().saturating_sub(1)
    }

    /// `h_j^(s) = mu_j^(s) + n2 + s - j`, strictly decreasing in `j`.
    pub fn h_variables(&self) -> Vec<Vec<i64>> {
        self.shapes
            .iter()
            .enumerate()
            .map(|(s, mu)| {
                mu.iter()
                    .enumerate()
                    .map(|(j, &m)| m as i64 + (self.n2 + s) as i64 - (j as i64 + 1))
                    .collect()
            })
            .collect()
    }

    /// `h_j^(s) > h_j^(s-1) >= h_{j+1}^(s)` for every consecutive pair, i.e.
    /// each shape grows from the previous one by a horizontal strip.
    pub fn is_interlaced(&self) -> bool {
        let h = self.h_variables();
        (1..h.len()).all(|s| {
            let (hi, lo) = (&h[s], &h[s - 1]);
            (0..lo.len()).all(|j| hi[j] > lo[j] && lo[j] >= hi[j + 1])
        })
    }
}

// Row insertion of `letter` into a semistandard tableau stored row by row.
fn row_insert(rows: &mut Vec<Vec<usize>>, mut letter: usize) {
    for row in rows.iter_mut() {
        let pos = row.partition_point(|&v| v <= letter);
        if pos == row.len() {
            row.push(letter);
            return;
        }
        letter = std::mem::replace(&mut row[pos], letter);
    }
    rows.push(vec![letter]);
}

/// RSK shapes of the principal `n1 x (n2 + s)` sub-blocks, `s = 0..=p`, with
/// `n2 = cols - p`. Columns are fed in order, and within a column the row
/// indices are inserted in increasing order with their multiplicities, so
/// the tableau after column `j` is the insertion tableau of the first `j`
/// columns.
pub fn rsk_shape_sequence(grid: &DMatrix<u64>, p: usize) -> Result<ShapeSequence> {
    let cols = grid.ncols();
    if p >= cols && !(p == 0 && cols == 0) {
        return Err(Error::Argument(format!("p = {p} needs more than {cols} columns")));
    }
    let n2 = cols - p;
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut shapes = Vec::with_capacity(p + 1);
    let record = |rows: &Vec<Vec<usize>>, len: usize| {
        let mut mu: Vec<u64> = rows.iter().map(|r| r.len() as u64).collect();
        mu.resize(len.max(mu.len()), 0);
        mu
    };
    if n2 == 0 {
        shapes.push(Vec::new());
    }
    for j in 0..cols {
        for i in 0..grid.nrows() {
            for _ in 0..grid[(i, j)] {
                row_insert(&mut rows, i);
            }
        }
        if j + 1 >= n2 {
            shapes.push(record(&rows, j + 1));
        }
    }
    ShapeSequence::new(n2, shapes)
}

#[cfg(test)]
mod tests;
