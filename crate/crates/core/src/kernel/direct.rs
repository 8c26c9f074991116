//! Orthonormal-function form of the kernel:
//!
//! ```text
//! s >= t:  f = sum_{k=1}^{t} (g^s_{s-k} / g^t_{t-k}) eta^s_{s-k}(x) eta^t_{t-k}(y)
//! s <  t:  f = -sum_{m>=0} (g^s_{s+m} / g^t_{t+m}) eta^s_{s+m}(x) eta^t_{t+m}(y)
//! ```
//!
//! with `g_j = e_j sqrt(N_j)` in the species' shifted family. The `s < t`
//! series converges only algebraically (terms fall like `m^{-(t-s+1)/2}`
//! with oscillating sign), so it is summed with the smooth filter
//! `exp(-36 (m/M)^6)` and `M` doubled until two passes agree.

use super::{Gauge, KernelValue, ProcessSpec, SpeciesPoint};
use crate::error::{Error, Result};
use crate::orthopoly::{rodrigues_constants, EnsembleKind, ShiftedFamily};

const FILTER_ORDER: i32 = 6;
const MAX_CUTOFF: usize = 1 << 21;

fn ln_abs_g(proc: &ProcessSpec, fam: &ShiftedFamily, j: usize) -> f64 {
    rodrigues_constants(&proc.ensemble, j).ln_abs_e + 0.5 * fam.ln_norm(j)
}

fn sign_g(proc: &ProcessSpec, j: usize) -> f64 {
    rodrigues_constants(&proc.ensemble, j).sign
}

// ln |g_j / g_{j-1}|
fn ln_g_step(fam: &ShiftedFamily, j: usize) -> f64 {
    let e_step = match fam.kind() {
        EnsembleKind::Gaussian => 0.0,
        _ => (j as f64).ln(),
    };
    e_step + 0.5 * fam.norm_step(j).ln()
}

/// `f(s, x; t, y)` in the orthonormal gauge.
pub fn kernel_direct(proc: &ProcessSpec, p1: &SpeciesPoint, p2: &SpeciesPoint) -> Result<KernelValue> {
    proc.check_point(p1)?;
    proc.check_point(p2)?;
    let (s, x, t, y) = (p1.s, p1.y, p2.s, p2.y);
    if s < t {
        let (value, abs) = series_sum(proc, s, x, t, y)?;
        let cancellation = if value == 0.0 { f64::INFINITY } else { abs / value.abs() };
        return Ok(KernelValue {
            value,
            gauge: Gauge::Orthonormal,
            cancellation,
        });
    }
    let fam_s = proc.family(s);
    let fam_t = proc.family(t);
    let es = fam_s.eta_seq(s - 1, x);
    let et = fam_t.eta_seq(t - 1, y);
    let mut sum = 0.0;
    let mut biggest = 0.0f64;
    for k in 1..=t {
        let (i, j) = (s - k, t - k);
        let ln_ratio = ln_abs_g(proc, &fam_s, i) - ln_abs_g(proc, &fam_t, j);
        let term = sign_g(proc, i) * sign_g(proc, j) * ln_ratio.exp() * es[i] * et[j];
        biggest = biggest.max(term.abs());
        sum += term;
    }
    let cancellation = if sum == 0.0 { f64::INFINITY } else { (biggest / sum.abs()).max(1.0) };
    Ok(KernelValue {
        value: sum,
        gauge: Gauge::Orthonormal,
        cancellation,
    })
}

/// Filtered sum of the `s < t` series. Returns the value and the filtered
/// sum of term magnitudes.
pub(crate) fn series_sum(proc: &ProcessSpec, s: usize, x: f64, t: usize, y: f64) -> Result<(f64, f64)> {
    debug_assert!(s < t);
    let fam_s = proc.family(s);
    let fam_t = proc.family(t);
    let sign = sign_g(proc, s) * sign_g(proc, t);
    let ln_r0 = ln_abs_g(proc, &fam_s, s) - ln_abs_g(proc, &fam_t, t);
    let pass = |cutoff: usize| -> (f64, f64) {
        // The filter is below e^{-44} past 1.035 cutoff.
        let mmax = (cutoff as f64 * 1.035).ceil() as usize;
        let es = fam_s.eta_seq(s + mmax, x);
        let et = fam_t.eta_seq(t + mmax, y);
        let mut ln_r = ln_r0;
        let mut sum = 0.0;
        let mut abs = 0.0;
        let inv = 1.0 / cutoff as f64;
        for m in 0..=mmax {
            if m > 0 {
                ln_r += ln_g_step(&fam_s, s + m) - ln_g_step(&fam_t, t + m);
            }
            let filt = (-36.0 * (m as f64 * inv).powi(FILTER_ORDER)).exp();
            let term = filt * ln_r.exp() * es[s + m] * et[t + m];
            sum += term;
            abs += term.abs();
        }
        (-sign * sum, abs)
    };
    let mut cutoff = 128;
    let (mut prev, _) = pass(cutoff);
    loop {
        cutoff *= 2;
        let (val, abs) = pass(cutoff);
        let diff = (val - prev).abs();
        if diff <= 1e-12 * val.abs() + 1e-15 * abs {
            return Ok((val, abs));
        }
        if cutoff >= MAX_CUTOFF {
            return Err(Error::numeric(
                format!("s<t series did not settle by cutoff {cutoff}"),
                Some(diff / val.abs().max(1e-300)),
            ));
        }
        prev = val;
    }
}
