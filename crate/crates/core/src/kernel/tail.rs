//! Rodrigues tail moments `int_x^inf (y - x)^k w(y) dy` in log scale.

use crate::error::{Error, Result};
use crate::orthopoly::{EnsembleKind, ShiftedFamily};
use crate::quad;

/// `ln int_x^inf (y - x)^k w(y) dy` for the weight of `fam`; `-inf` when the
/// range of integration misses the support.
pub(crate) fn ln_tail_moment(fam: &ShiftedFamily, k: usize, x: f64) -> Result<f64> {
    let (slo, shi) = fam.base.support();
    let lo = x.max(slo);
    if lo >= shi {
        return Ok(f64::NEG_INFINITY);
    }
    let kind = fam.kind();
    let (alpha, beta) = (fam.alpha(), fam.beta());
    let kf = k as f64;
    let from_x = lo == x;
    let from_support = lo == slo;
    // Log integrand; the distances to the ends come from the quadrature so
    // the endpoint factors keep full relative accuracy.
    let lnf = move |y: f64, dlo: f64, dhi: f64| -> f64 {
        let dx = if from_x { dlo } else { y - x };
        let lk = if k == 0 { 0.0 } else { kf * dx.ln() };
        let ly = if from_support { dlo } else { y };
        let lw = match kind {
            EnsembleKind::Gaussian => -y * y,
            EnsembleKind::Laguerre => xlogy(alpha, ly) - y,
            EnsembleKind::Jacobi => xlogy(alpha, ly) + xlogy(beta, dhi),
        };
        lk + lw
    };

    let (hi, ln_ref) = match kind {
        EnsembleKind::Jacobi => {
            let mut peak = f64::NEG_INFINITY;
            for i in 0..128 {
                let y = lo + (1.0 - lo) * (i as f64 + 0.5) / 128.0;
                peak = peak.max(lnf(y, y - lo, 1.0 - y));
            }
            (1.0, peak)
        }
        _ => {
            // Walk outward until the log integrand has dropped far below
            // its running maximum and is decreasing.
            let mut peak = f64::NEG_INFINITY;
            let mut step = 0.02;
            let mut y = lo;
            let mut prev = f64::NEG_INFINITY;
            let mut iterations = 0;
            loop {
                y += step;
                let g = lnf(y, y - lo, f64::INFINITY);
                peak = peak.max(g);
                if g < peak - 60.0 && g < prev {
                    break;
                }
                prev = g;
                step *= 1.12;
                iterations += 1;
                if iterations > 2000 {
                    return Err(Error::numeric("tail moment cutoff search did not terminate", None));
                }
            }
            (y, peak)
        }
    };
    let r = quad::tanh_sinh(|y, da, db| (lnf(y, da, db) - ln_ref).exp(), lo, hi, 1e-12)?;
    if !(r.value > 0.0) || !r.value.is_finite() {
        return Err(Error::numeric(
            format!("tail moment quadrature returned {}", r.value),
            Some(r.error),
        ));
    }
    Ok(ln_ref + r.value.ln())
}

fn xlogy(a: f64, y: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * y.ln()
    }
}
