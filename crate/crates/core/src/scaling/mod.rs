//! Scaling limits of the finite-N kernels: the limit kernels themselves, the
//! finite kernels evaluated at scaled points, and convergence reports.
//!
//! Finite kernels carry an N-dependent conjugation relative to their limits,
//! so every comparison goes through gauge-free combinations: diagonal
//! entries, determinants, and the signed geometric mean
//! `sign(K_jk K_kj) sqrt(|K_jk K_kj|)` of an off-diagonal pair.

mod expint;
mod limits;

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use limits::{
    airy_kernel, bead_kernel, bead_kernel_alt, extended_airy, hard_edge_kernel, AIRY_DIAGONAL_SWITCH,
    BEAD_CLOSED_FORM_MAX, EXTENDED_AIRY_DIRECT_MIN,
};

use crate::error::{Error, Result};
use crate::kernel::{kernel_entry, ProcessSpec, Route, SpeciesPoint};
use crate::linalg;
use crate::orthopoly::{EnsembleKind, EnsembleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Gaussian, species `N - c` near the largest eigenvalue.
    SoftFixed,
    /// Gaussian, species `N - c` at the origin.
    Bulk,
    /// Laguerre, species `N - c` at the hard edge.
    HardEdge,
    /// Gaussian or Laguerre, species separated by `O(N^{2/3})` near the soft edge.
    SoftDrift,
}

/// Points `(c_i, Y_i)` of a scaling regime at a given `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitQuery {
    pub regime: Regime,
    pub ensemble: EnsembleSpec,
    #[serde(rename = "N")]
    pub n: usize,
    /// Species offsets: integers for the fixed regimes, reals for `SoftDrift`.
    pub offsets: Vec<f64>,
    /// Scaled positions.
    pub positions: Vec<f64>,
}

impl LimitQuery {
    pub fn new(regime: Regime, ensemble: EnsembleSpec, n: usize, offsets: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        let q = LimitQuery {
            regime,
            ensemble,
            n,
            offsets,
            positions,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.n == 0 {
            return Err(Error::Parameter("N must be at least 1".into()));
        }
        if self.offsets.len() != self.positions.len() || self.positions.is_empty() {
            return Err(Error::Argument(format!(
                "{} offsets for {} positions",
                self.offsets.len(),
                self.positions.len()
            )));
        }
        let kind = self.ensemble.kind;
        let ok = match self.regime {
            Regime::SoftFixed | Regime::Bulk => kind == EnsembleKind::Gaussian,
            Regime::HardEdge => kind == EnsembleKind::Laguerre,
            Regime::SoftDrift => kind != EnsembleKind::Jacobi,
        };
        if !ok {
            return Err(Error::Argument(format!("regime {:?} is not defined for the {kind:?} ensemble", self.regime)));
        }
        if self.positions.iter().chain(&self.offsets).any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite offset or position".into()));
        }
        if self.regime != Regime::SoftDrift && self.offsets.iter().any(|c| c.fract() != 0.0 || *c < 0.0) {
            return Err(Error::Argument(format!("offsets {:?} must be nonnegative integers", self.offsets)));
        }
        for i in 0..self.len() {
            self.point(i)?;
        }
        Ok(())
    }

    /// Species index of point `i`.
    pub fn species(&self, i: usize) -> Result<usize> {
        let n = self.n as f64;
        let c = self.offsets[i];
        let s = match (self.regime, self.ensemble.kind) {
            (Regime::SoftDrift, EnsembleKind::Gaussian) => (n + 2.0 * c * n.powf(2.0 / 3.0)).round(),
            (Regime::SoftDrift, _) => (n - 2.0 * c * (2.0 * n).powf(2.0 / 3.0)).round(),
            _ => n - c,
        };
        if !(s >= 1.0 && s <= n) {
            return Err(Error::Argument(format!(
                "offset {c} maps to species {s}, outside [1, {}]",
                self.n
            )));
        }
        Ok(s as usize)
    }

    /// The offset realized after rounding the species index.
    pub fn realized_offset(&self, i: usize) -> Result<f64> {
        let n = self.n as f64;
        let s = self.species(i)? as f64;
        Ok(match (self.regime, self.ensemble.kind) {
            (Regime::SoftDrift, EnsembleKind::Gaussian) => (s - n) / (2.0 * n.powf(2.0 / 3.0)),
            (Regime::SoftDrift, _) => (n - s) / (2.0 * (2.0 * n).powf(2.0 / 3.0)),
            _ => n - s,
        })
    }

    /// Jacobian of the map from scaled to unscaled position at point `i`.
    pub fn scale_factor(&self, i: usize) -> Result<f64> {
        let n = self.n as f64;
        Ok(match (self.regime, self.ensemble.kind) {
            (Regime::SoftFixed, _) => 1.0 / (2f64.sqrt() * n.powf(1.0 / 6.0)),
            (Regime::Bulk, _) => std::f64::consts::PI / (2.0 * n).sqrt(),
            (Regime::HardEdge, _) => 1.0 / (4.0 * n),
            (Regime::SoftDrift, EnsembleKind::Gaussian) => {
                1.0 / (2f64.sqrt() * (self.species(i)? as f64).powf(1.0 / 6.0))
            }
            (Regime::SoftDrift, _) => 2.0 * (2.0 * n).cbrt(),
        })
    }

    /// The unscaled point of the finite-N process.
    pub fn point(&self, i: usize) -> Result<SpeciesPoint> {
        let s = self.species(i)?;
        let n = self.n as f64;
        let y = self.positions[i];
        let f = self.scale_factor(i)?;
        let pos = match (self.regime, self.ensemble.kind) {
            (Regime::SoftFixed, _) => (2.0 * n).sqrt() + f * y,
            (Regime::Bulk, _) => f * y,
            (Regime::HardEdge, _) => f * y,
            (Regime::SoftDrift, EnsembleKind::Gaussian) => (2.0 * s as f64).sqrt() + f * y,
            (Regime::SoftDrift, _) => {
                let sf = s as f64;
                4.0 * sf + 2.0 * (self.ensemble.a + n - sf) + f * y
            }
        };
        let (lo, hi) = self.ensemble.support();
        if !(pos >= lo && pos <= hi) {
            return Err(Error::Argument(format!(
                "scaled position {y} maps to {pos}, outside the support [{lo}, {hi}]"
            )));
        }
        Ok(SpeciesPoint::new(s, pos))
    }

    fn process(&self) -> Result<ProcessSpec> {
        ProcessSpec::new(self.ensemble, self.n)
    }

    /// The limit kernel between points `j` and `k`, in its own gauge.
    pub fn limit_kernel(&self, j: usize, k: usize) -> Result<f64> {
        let (yj, yk) = (self.positions[j], self.positions[k]);
        match (self.regime, self.ensemble.kind) {
            (Regime::SoftFixed, _) => airy_kernel(yj, yk),
            (Regime::Bulk, _) => bead_kernel(self.offsets[j] as i64, yj, self.offsets[k] as i64, yk),
            (Regime::HardEdge, _) => {
                hard_edge_kernel(self.ensemble.a, self.offsets[j] as i64, yj, self.offsets[k] as i64, yk)
            }
            (Regime::SoftDrift, EnsembleKind::Gaussian) => {
                extended_airy(-self.realized_offset(j)?, yj, -self.realized_offset(k)?, yk)
            }
            (Regime::SoftDrift, _) => {
                // The center 4s + 2(a + N - s) lies (N - s)^2 / (4N) above the
                // species edge (sqrt(s) + sqrt(N + a))^2, i.e. c^2 in scaled units.
                let (cj, ck) = (self.realized_offset(j)?, self.realized_offset(k)?);
                extended_airy(cj, yj + cj * cj, ck, yk + ck * ck)
            }
        }
    }

    /// The finite-N kernel between points `j` and `k` times the Jacobians
    /// `sqrt(f_j f_k)`, in the construction gauge.
    pub fn finite_kernel(&self, j: usize, k: usize) -> Result<f64> {
        let proc = self.process()?;
        let value = kernel_entry(&proc, &self.point(j)?, &self.point(k)?, Route::Auto)?.value;
        Ok(value * (self.scale_factor(j)? * self.scale_factor(k)?).sqrt())
    }

    pub fn finite_matrix(&self, idx: &[usize]) -> Result<DMatrix<f64>> {
        self.matrix(idx, |j, k| self.finite_kernel(j, k))
    }

    pub fn limit_matrix(&self, idx: &[usize]) -> Result<DMatrix<f64>> {
        self.matrix(idx, |j, k| self.limit_kernel(j, k))
    }

    fn matrix(&self, idx: &[usize], entry: impl Fn(usize, usize) -> Result<f64>) -> Result<DMatrix<f64>> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Argument(format!("point index {bad} out of range")));
        }
        let r = idx.len();
        let mut m = DMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                m[(a, b)] = entry(idx[a], idx[b])?;
            }
        }
        Ok(m)
    }
}

/// `sign(K_jk K_kj) sqrt(|K_jk K_kj|)`, or the diagonal entry for `j = k`.
pub fn gauge_free_pair(kjk: f64, kkj: f64) -> f64 {
    let p = kjk * kkj;
    p.signum() * p.abs().sqrt()
}

/// Gauge-free scaled finite-N kernel between points `j` and `k`.
pub fn scaled_finite_kernel(q: &LimitQuery, j: usize, k: usize) -> Result<f64> {
    if j == k {
        return q.finite_kernel(j, j);
    }
    Ok(gauge_free_pair(q.finite_kernel(j, k)?, q.finite_kernel(k, j)?))
}

/// The same gauge-free combination of the limit kernel.
pub fn limit_kernel_gauge_free(q: &LimitQuery, j: usize, k: usize) -> Result<f64> {
    if j == k {
        return q.limit_kernel(j, j);
    }
    Ok(gauge_free_pair(q.limit_kernel(j, k)?, q.limit_kernel(k, j)?))
}

/// Quantity tracked by a convergence report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Gauge-free kernel entry.
    Entry { j: usize, k: usize },
    /// Determinant of the kernel restricted to these points.
    Determinant(Vec<usize>),
}

impl Quantity {
    /// `(finite, limit)` for one query.
    pub fn evaluate(&self, q: &LimitQuery) -> Result<(f64, f64)> {
        match self {
            Quantity::Entry { j, k } => {
                if *j >= q.len() || *k >= q.len() {
                    return Err(Error::Argument(format!("point index ({j}, {k}) out of range")));
                }
                Ok((scaled_finite_kernel(q, *j, *k)?, limit_kernel_gauge_free(q, *j, *k)?))
            }
            Quantity::Determinant(idx) => Ok((
                linalg::det(&q.finite_matrix(idx)?),
                linalg::det(&q.limit_matrix(idx)?),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub regime: Regime,
    pub ensemble: EnsembleSpec,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    /// `(offset, position)` of each point at the largest N, offsets as realized.
    pub points: Vec<[f64; 2]>,
    pub quantity: Quantity,
    pub finite: Vec<f64>,
    pub limit: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `-ln(error)` against `ln N`.
    pub order_estimate: f64,
    /// Errors strictly decreasing with a positive order estimate.
    pub converging: bool,
}

impl ConvergenceReport {
    pub fn from_values(
        regime: Regime,
        ensemble: EnsembleSpec,
        n_list: Vec<usize>,
        points: Vec<[f64; 2]>,
        quantity: Quantity,
        finite: Vec<f64>,
        limit: Vec<f64>,
    ) -> Self {
        let errors: Vec<f64> = finite.iter().zip(&limit).map(|(f, l)| (f - l).abs()).collect();
        let order_estimate = order_estimate(&n_list, &errors);
        let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
        ConvergenceReport {
            regime,
            ensemble,
            n_list,
            points,
            quantity,
            finite,
            limit,
            errors,
            order_estimate,
            converging: decreasing && order_estimate > 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "N,finite,limit,error")?;
        for i in 0..self.n_list.len() {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e}",
                self.n_list[i], self.finite[i], self.limit[i], self.errors[i]
            )?;
        }
        Ok(())
    }
}

fn order_estimate(n_list: &[usize], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = n_list
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(n, e)| ((*n as f64).ln(), -e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Evaluates `quantity` for `family(N)` over `n_list` (at least three values),
/// in parallel over N.
pub fn convergence_report<F>(family: F, n_list: &[usize], quantity: &Quantity) -> Result<ConvergenceReport>
where
    F: Fn(usize) -> Result<LimitQuery> + Sync,
{
    if n_list.len() < 3 {
        return Err(Error::Argument(format!("need at least 3 values of N, got {}", n_list.len())));
    }
    let rows: Vec<(LimitQuery, f64, f64)> = n_list
        .par_iter()
        .map(|&n| {
            let q = family(n)?;
            let (f, l) = quantity.evaluate(&q)?;
            Ok((q, f, l))
        })
        .collect::<Result<_>>()?;
    let last = &rows.last().expect("nonempty").0;
    let points = (0..last.len())
        .map(|i| Ok([last.realized_offset(i)?, last.positions[i]]))
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport::from_values(
        last.regime,
        last.ensemble,
        n_list.to_vec(),
        points,
        quantity.clone(),
        rows.iter().map(|r| r.1).collect(),
        rows.iter().map(|r| r.2).collect(),
    ))
}
