//! Finite-N correlation kernel of the multi-species projection process and
//! its determinantal correlation functions.
//!
//! Species `s` (1 <= s <= N) carries `s` particles; its functions use the
//! classical family with exponents raised by `N - s`. Two independent
//! constructions are provided:
//!
//! - [`kernel_k`]: `K(s,x;t,y) = -phi^{(s,t)}(x,y) + sum_{l=1}^{t} Psi^s_{s-l}(x) Phi^t_{t-l}(y)`,
//!   built from convolution kernels, Rodrigues integrals and dual polynomials,
//!   evaluated in signed-log arithmetic.
//! - [`kernel_direct`]: the orthonormal-function form, a finite sum for
//!   `s >= t` and an infinite series for `s < t`.
//!
//! They agree up to the gauge `f = (-1)^{s-t} (w_t(y)/w_s(x))^{1/2} K`, which
//! leaves every correlation determinant unchanged.

mod biortho;
mod direct;
mod tail;

pub use biortho::{biorthogonality_check, BiorthoCheck};
pub use direct::kernel_direct;
pub(crate) use tail::ln_tail_moment;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::logval::{log_sum, LogValue};
use crate::orthopoly::{ln_factorial, rodrigues_constants, EnsembleKind, EnsembleSpec, ShiftedFamily};

/// Cancellation (largest summand over result) beyond which the automatic
/// route abandons the construction sum for `s < t`.
pub const CANCELLATION_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub ensemble: EnsembleSpec,
    /// Number of species; the top species carries `n` particles.
    pub n: usize,
}

impl ProcessSpec {
    pub fn new(ensemble: EnsembleSpec, n: usize) -> Result<Self> {
        ensemble.validate()?;
        if n == 0 {
            return Err(Error::Parameter("N must be at least 1".into()));
        }
        Ok(ProcessSpec { ensemble, n })
    }

    /// The family used by species `s`.
    pub fn family(&self, s: usize) -> ShiftedFamily {
        self.ensemble.shifted(self.n - s)
    }

    pub fn check_species(&self, s: usize) -> Result<()> {
        if s == 0 || s > self.n {
            Err(Error::Argument(format!("species {s} outside [1, {}]", self.n)))
        } else {
            Ok(())
        }
    }

    pub fn check_point(&self, p: &SpeciesPoint) -> Result<()> {
        self.check_species(p.s)?;
        let (lo, hi) = self.ensemble.support();
        if !p.y.is_finite() || p.y < lo || p.y > hi {
            return Err(Error::Argument(format!(
                "position {} outside the support [{lo}, {hi}]",
                p.y
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesPoint {
    pub s: usize,
    pub y: f64,
}

impl SpeciesPoint {
    pub fn new(s: usize, y: f64) -> Self {
        SpeciesPoint { s, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gauge {
    /// `K` as assembled by [`kernel_k`].
    Construction,
    /// `f = (-1)^{s-t} (w_t(y)/w_s(x))^{1/2} K`, as produced by [`kernel_direct`].
    Orthonormal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub gauge: Gauge,
    /// Largest summand magnitude over `|value|` (1 when nothing cancels).
    pub cancellation: f64,
}

impl KernelValue {
    /// Re-expresses the value in another gauge.
    pub fn to_gauge(self, proc: &ProcessSpec, p1: &SpeciesPoint, p2: &SpeciesPoint, target: Gauge) -> KernelValue {
        if self.gauge == target {
            return self;
        }
        let lw_s = proc.family(p1.s).ln_weight(p1.y);
        let lw_t = proc.family(p2.s).ln_weight(p2.y);
        let sign = parity(p1.s.abs_diff(p2.s));
        // f = sign * exp((lw_t - lw_s)/2) * K
        let ln_factor = 0.5 * (lw_t - lw_s);
        let value = match target {
            Gauge::Orthonormal => sign * self.value * ln_factor.exp(),
            Gauge::Construction => sign * self.value * (-ln_factor).exp(),
        };
        KernelValue {
            value: if self.value == 0.0 { 0.0 } else { value },
            gauge: target,
            cancellation: self.cancellation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Construction sum; for `s < t` switch to the orthonormal series when
    /// the construction loses more than seven digits to cancellation.
    Auto,
    Construction,
    Series,
}

pub(crate) fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn e_log(spec: &EnsembleSpec, j: usize) -> LogValue {
    let r = rodrigues_constants(spec, j);
    LogValue::new(r.sign, r.ln_abs_e)
}

/// `phi^{(n1,n2)}(x, y) = chi_{y > x} (y - x)^{n2-n1-1} / (n2-n1-1)!`, zero for `n1 >= n2`.
pub fn phi_conv(n1: usize, n2: usize, x: f64, y: f64) -> f64 {
    phi_conv_log(n1, n2, x, y).to_f64()
}

fn phi_conv_log(n1: usize, n2: usize, x: f64, y: f64) -> LogValue {
    if n1 >= n2 || !(y > x) {
        return LogValue::ZERO;
    }
    let p = n2 - n1 - 1;
    let lp = if p == 0 { 0.0 } else { p as f64 * (y - x).ln() };
    LogValue::new(1.0, lp - ln_factorial(p))
}

/// `Psi^n_j(x)`: closed form for `j >= 0`, Rodrigues tail integral for `j < 0`.
pub fn psi(proc: &ProcessSpec, n: usize, j: i64, x: f64) -> Result<f64> {
    Ok(psi_log(proc, n, j, x)?.to_f64())
}

pub fn psi_log(proc: &ProcessSpec, n: usize, j: i64, x: f64) -> Result<LogValue> {
    proc.check_species(n)?;
    let m = proc.n - n;
    let spec = &proc.ensemble;
    if j >= 0 {
        let j = j as usize;
        let fam = spec.shifted(m);
        let lw = fam.ln_weight(x);
        if lw == f64::NEG_INFINITY {
            return Ok(LogValue::ZERO);
        }
        let p = fam.poly_log_seq(j, x)[j];
        let pref = LogValue::new(parity(m), lw) * e_log(spec, j) / e_log(spec, m + j);
        return Ok(pref * p);
    }
    let q = m as i64 + j;
    if q < 0 {
        return Err(Error::Argument(format!(
            "Psi index {j} below -(N - n) = -{m}"
        )));
    }
    let q = q as usize;
    let k = (-j - 1) as usize;
    let tail = ln_tail_moment(&spec.shifted(q), k, x)?;
    let pref = LogValue::new(parity(q), tail - ln_factorial(k)) / e_log(spec, q);
    Ok(pref)
}

/// `Phi^n_j(x)` for `0 <= j <= n - 1`.
pub fn phi_cap(proc: &ProcessSpec, n: usize, j: usize, x: f64) -> Result<f64> {
    Ok(phi_cap_log(proc, n, j, x)?.to_f64())
}

pub fn phi_cap_log(proc: &ProcessSpec, n: usize, j: usize, x: f64) -> Result<LogValue> {
    proc.check_species(n)?;
    if j >= n {
        return Err(Error::Argument(format!("Phi index {j} must be below n = {n}")));
    }
    let m = proc.n - n;
    let fam = proc.ensemble.shifted(m);
    let p = fam.poly_log_seq(j, x)[j];
    Ok(dual_prefactor(proc, n, j) * p)
}

// (-1)^{N-n} e_{N-n+j} / (e_j N_j)
fn dual_prefactor(proc: &ProcessSpec, n: usize, j: usize) -> LogValue {
    let m = proc.n - n;
    let spec = &proc.ensemble;
    let norm = LogValue::new(1.0, proc.family(n).ln_norm(j));
    LogValue::new(parity(m), 0.0) * e_log(spec, m + j) / e_log(spec, j) / norm
}

/// `K(s1, y1; s2, y2)` from the construction sum.
#[allow(non_snake_case)]
pub fn kernel_K(proc: &ProcessSpec, p1: SpeciesPoint, p2: SpeciesPoint) -> Result<KernelValue> {
    kernel_k(proc, &p1, &p2)
}

pub fn kernel_k(proc: &ProcessSpec, p1: &SpeciesPoint, p2: &SpeciesPoint) -> Result<KernelValue> {
    proc.check_point(p1)?;
    proc.check_point(p2)?;
    let (s, x, t, y) = (p1.s, p1.y, p2.s, p2.y);
    let spec = &proc.ensemble;
    let big_n = proc.n;
    let fam_s = proc.family(s);
    let fam_t = proc.family(t);

    let mut terms = Vec::with_capacity(t + 1);
    terms.push(-phi_conv_log(s, t, x, y));

    // Phi^t_{t-l}(y) for l = 1..t
    let pt = fam_t.poly_log_seq(t - 1, y);
    let phi_t = |l: usize| dual_prefactor(proc, t, t - l) * pt[t - l];

    let lw_s = fam_s.ln_weight(x);
    if lw_s > f64::NEG_INFINITY {
        let ps = fam_s.poly_log_seq(s - 1, x);
        let w = LogValue::new(parity(big_n - s), lw_s);
        for l in 1..=s.min(t) {
            let psi = w * e_log(spec, s - l) / e_log(spec, big_n - l) * ps[s - l];
            terms.push(psi * phi_t(l));
        }
    }
    for l in s + 1..=t {
        let psi = psi_log(proc, s, s as i64 - l as i64, x)?;
        terms.push(psi * phi_t(l));
    }
    let (sum, ln_max) = log_sum(&terms);
    let value = sum.to_f64();
    let cancellation = if ln_max == f64::NEG_INFINITY {
        1.0
    } else if value == 0.0 {
        f64::INFINITY
    } else {
        (ln_max - sum.ln).exp()
    };
    Ok(KernelValue {
        value,
        gauge: Gauge::Construction,
        cancellation,
    })
}

/// Kernel entry in the construction gauge by the chosen route.
pub fn kernel_entry(proc: &ProcessSpec, p1: &SpeciesPoint, p2: &SpeciesPoint, route: Route) -> Result<KernelValue> {
    match route {
        Route::Construction => kernel_k(proc, p1, p2),
        Route::Series => Ok(kernel_direct(proc, p1, p2)?.to_gauge(proc, p1, p2, Gauge::Construction)),
        Route::Auto => {
            let k = kernel_k(proc, p1, p2)?;
            if p1.s < p2.s && k.cancellation > CANCELLATION_LIMIT {
                let f = kernel_direct(proc, p1, p2)?;
                Ok(f.to_gauge(proc, p1, p2, Gauge::Construction))
            } else {
                Ok(k)
            }
        }
    }
}

/// The `r x r` kernel matrix of a point configuration.
pub fn kernel_matrix(proc: &ProcessSpec, points: &[SpeciesPoint], route: Route) -> Result<DMatrix<f64>> {
    let r = points.len();
    let mut m = DMatrix::zeros(r, r);
    for (i, pi) in points.iter().enumerate() {
        for (j, pj) in points.iter().enumerate() {
            m[(i, j)] = kernel_entry(proc, pi, pj, route)?.value;
        }
    }
    Ok(m)
}

/// `rho({(s_j, y_j)}) = det[K(s_j, y_j; s_k, y_k)]`.
pub fn correlation(proc: &ProcessSpec, points: &[SpeciesPoint]) -> Result<f64> {
    if points.is_empty() || points.len() > 12 {
        return Err(Error::Argument(format!(
            "correlation needs 1 to 12 points, got {}",
            points.len()
        )));
    }
    for (i, a) in points.iter().enumerate() {
        proc.check_point(a)?;
        for b in &points[..i] {
            if a.s == b.s && a.y == b.y {
                return Err(Error::Argument(format!("duplicate point ({}, {})", a.s, a.y)));
            }
        }
    }
    let m = kernel_matrix(proc, points, Route::Auto)?;
    Ok(linalg::correlation_det(&m))
}

/// One-point density of species `s` on a grid.
pub fn density(proc: &ProcessSpec, s: usize, grid: &[f64]) -> Result<Vec<f64>> {
    proc.check_species(s)?;
    grid.iter()
        .map(|&y| {
            let p = SpeciesPoint::new(s, y);
            kernel_k(proc, &p, &p).map(|k| k.value)
        })
        .collect()
}

/// `int rho_1(s, y) dy` by quadrature over the support.
pub fn species_count(proc: &ProcessSpec, s: usize) -> Result<f64> {
    proc.check_species(s)?;
    let rho = |y: f64| {
        let p = SpeciesPoint::new(s, y);
        kernel_k(proc, &p, &p).map(|k| k.value).unwrap_or(f64::NAN)
    };
    let nf = proc.n as f64;
    let r = match proc.ensemble.kind {
        EnsembleKind::Gaussian => {
            let half = (2.0 * nf).sqrt() + 8.0;
            crate::quad::adaptive(rho, -half, half, &[0.0], crate::quad::Tolerance::rel(1e-10))?
        }
        EnsembleKind::Laguerre => {
            let hi = 4.0 * nf + 2.0 * (proc.ensemble.a + nf).max(0.0) + 60.0;
            crate::quad::tanh_sinh(|y, _, _| rho(y), 0.0, hi, 1e-10)?
        }
        EnsembleKind::Jacobi => crate::quad::tanh_sinh(|y, _, _| rho(y), 0.0, 1.0, 1e-10)?,
    };
    Ok(r.value)
}
