//! Limit kernels: Airy, extended Airy, bead (two forms) and hard-edge Bessel.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::expint::{i_pow, power_fourier_tail, power_fourier_unit};
use crate::error::{Error, Result};
use crate::orthopoly::{airy, bessel_j};
use crate::quad::{self, Tolerance};

/// Below this separation the Airy kernel uses the integral form.
pub const AIRY_DIAGONAL_SWITCH: f64 = 1e-4;
/// Largest species offset handled by closed forms in [`bead_kernel`].
pub const BEAD_CLOSED_FORM_MAX: i64 = 6;
/// Smallest `|tau|` for which the `tau < 0` extended Airy kernel is
/// integrated directly over the negative half line.
pub const EXTENDED_AIRY_DIRECT_MIN: f64 = 0.05;

const AIRY_ARG_MAX: f64 = 20.0;
const EXTENDED_TAU_MAX: f64 = 5.0;
const PANEL_ORDER: usize = 20;

fn ai(x: f64) -> f64 {
    airy(x).map(|v| v.0).unwrap_or(0.0)
}

fn check_airy_args(x: f64, y: f64) -> Result<()> {
    if !(x.abs() <= AIRY_ARG_MAX && y.abs() <= AIRY_ARG_MAX) {
        return Err(Error::Range(format!("Airy kernel arguments ({x}, {y}) outside [-20, 20]")));
    }
    Ok(())
}

/// Composite Gauss-Legendre on `[lo, hi]` with panel width adapted to the
/// local wavenumber `sqrt(wave2(t))` of an Airy product.
fn airy_panels(f: impl Fn(f64) -> f64, lo: f64, hi: f64, wave2: impl Fn(f64) -> f64) -> f64 {
    let mut t = lo;
    let mut sum = 0.0;
    while t < hi {
        let width = (1.5 / (1.0 + wave2(t).max(0.0).sqrt())).min(hi - t);
        sum += quad::gl_fixed(&f, t, t + width, PANEL_ORDER);
        t += width;
    }
    sum
}

/// `int_0^inf e^{-tau u} Ai(x + u) Ai(y + u) du` for `tau >= -1`, truncated
/// where both Airy factors are below `1e-19`.
pub(crate) fn airy_damped_integral(tau: f64, x: f64, y: f64) -> f64 {
    let lo_arg = x.min(y);
    let upper = (16.0 - lo_arg).max(4.0);
    airy_panels(|u| (-tau * u).exp() * ai(x + u) * ai(y + u), 0.0, upper, |u| -(lo_arg + u))
}

/// The Airy kernel `(Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y)`, by its integral
/// form `int_0^inf Ai(x+u)Ai(y+u) du` when `|x - y| < 1e-4`.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    check_airy_args(x, y)?;
    if (x - y).abs() < AIRY_DIAGONAL_SWITCH {
        return Ok(airy_damped_integral(0.0, x, y));
    }
    let (ax, dx) = airy(x)?;
    let (ay, dy) = airy(y)?;
    Ok((ax * dy - ay * dx) / (x - y))
}

/// Extended Airy kernel: with `tau = tau_y - tau_x`,
/// `int_0^inf e^{-tau u} Ai(x+u)Ai(y+u) du` for `tau >= 0` and
/// `-int_{-inf}^0 e^{-tau u} Ai(x+u)Ai(y+u) du` for `tau < 0`.
pub fn extended_airy(tau_x: f64, x: f64, tau_y: f64, y: f64) -> Result<f64> {
    check_airy_args(x, y)?;
    let tau = tau_y - tau_x;
    if !(tau.abs() <= EXTENDED_TAU_MAX) {
        return Err(Error::Range(format!("time difference {tau} outside [-5, 5]")));
    }
    if tau >= 0.0 {
        return Ok(airy_damped_integral(tau, x, y));
    }
    let rate = -tau;
    if rate < EXTENDED_AIRY_DIRECT_MIN {
        return Ok(airy_damped_integral(tau, x, y) - airy_full_line(rate, x, y));
    }
    Ok(-negative_half_line(rate, x, y))
}

/// `int_R e^{s u} Ai(x+u) Ai(y+u) du` for `s > 0`.
pub(crate) fn airy_full_line(s: f64, x: f64, y: f64) -> f64 {
    (s.powi(3) / 12.0 - s * (x + y) / 2.0 - (x - y).powi(2) / (4.0 * s)).exp() / (4.0 * PI * s).sqrt()
}

// int_0^inf e^{-s v} Ai(x - v) Ai(y - v) dv, panel by panel until the
// tail bound e^{-sV} / (pi sqrt(V - max(x,y))) / s drops below 1e-14 of the sum.
fn negative_half_line(s: f64, x: f64, y: f64) -> f64 {
    let f = |v: f64| (-s * v).exp() * ai(x - v) * ai(y - v);
    let hi_arg = x.max(y);
    let lo_arg = x.min(y);
    let mut sum = 0.0;
    let mut v = 0.0;
    loop {
        let width = 1.5 / (1.0 + (v - lo_arg).max(0.0).sqrt());
        sum += quad::gl_fixed(f, v, v + width, PANEL_ORDER);
        v += width;
        let r = (v - hi_arg).max(1.0);
        let bound = (-s * v).exp() / (PI * r.sqrt()) / s;
        if bound < 1e-14 * sum.abs() || bound < 1e-17 {
            return sum;
        }
    }
}

fn check_finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Argument(format!("non-finite kernel argument in {vals:?}")))
    }
}

/// Bead kernel. With `m = cy - cx` and `w = pi (x - y)`:
/// `int_0^1 s^m cos(w s - pi m / 2) ds` for `m >= 0` and
/// `-int_1^inf s^m cos(w s - pi m / 2) ds` for `m < 0`.
///
/// For `m = -1` the second integral jumps across `x = y`; the midpoint 0 is
/// returned there.
pub fn bead_kernel(cx: i64, x: f64, cy: i64, y: f64) -> Result<f64> {
    check_finite(&[x, y])?;
    let m = cy - cx;
    let w = PI * (x - y);
    if m >= 0 {
        if m <= BEAD_CLOSED_FORM_MAX {
            return Ok((i_pow(-m) * power_fourier_unit(m as usize, w)).re);
        }
        let phase = -PI * m as f64 / 2.0;
        let panels = 2 + (w.abs() / 2.0) as usize;
        return Ok(quad::gl_panels(|s| s.powi(m as i32) * (w * s + phase).cos(), 0.0, 1.0, panels, 24));
    }
    let k = -m;
    if w == 0.0 {
        return Ok(if k == 1 { 0.0 } else { -i_pow(k).re / (k - 1) as f64 });
    }
    if k <= BEAD_CLOSED_FORM_MAX {
        return Ok(-(i_pow(k) * power_fourier_tail(k as usize, w)).re);
    }
    // Real-axis quadrature out to where s^{1-k}/(k-1) < 1e-16.
    let phase = PI * k as f64 / 2.0;
    let upper = (1e16 / (k - 1) as f64).powf(1.0 / (k - 1) as f64);
    let panels = 4 + ((upper - 1.0) * (1.0 + w.abs() / PI)) as usize;
    Ok(-quad::gl_panels(|s| s.powi(-k as i32) * (w * s + phase).cos(), 1.0, upper, panels, 16))
}

/// Bead kernel in exponential form: with `m = cy - cx`, `w = pi (x - y)`,
/// `(1/2) int_{-1}^{1} (is)^m e^{isw} ds` for `m >= 0` and
/// `-(1/2) int_{|s| > 1} (is)^m e^{isw} ds` for `m < 0`. It equals
/// `(-1)^m` times [`bead_kernel`], so determinants agree.
pub fn bead_kernel_alt(cx: i64, x: f64, cy: i64, y: f64) -> Result<f64> {
    check_finite(&[x, y])?;
    let m = cy - cx;
    let w = PI * (x - y);
    if m >= 0 {
        let rule = quad::gauss_legendre(24);
        let panels = 2 + w.abs() as usize;
        let h = 2.0 / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let c = -1.0 + (p as f64 + 0.5) * h;
            for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
                let s = c + 0.5 * h * t;
                let is = Complex64::new(0.0, s);
                sum += is.powi(m as i32) * Complex64::new(0.0, w * s).exp() * (wt * 0.5 * h);
            }
        }
        return Ok(0.5 * sum.re);
    }
    let k = -m;
    let right = i_pow(-k) * rotated_tail(k, w)?;
    let left = i_pow(k) * rotated_tail(k, -w)?;
    Ok(-0.5 * (right + left).re)
}

// int_1^inf s^{-k} e^{iws} ds along s = 1 + i sign(w) t. At w = 0 the two
// halves of bead_kernel_alt cancel pointwise for odd k, which the zero
// returned for k = 1 reproduces.
fn rotated_tail(k: i64, w: f64) -> Result<Complex64> {
    if w == 0.0 {
        return Ok(if k == 1 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / (k - 1) as f64, 0.0)
        });
    }
    let sigma = w.signum();
    let decay = w.abs();
    let g = |t: f64| Complex64::new(1.0, sigma * t).powi(-k as i32) * (-decay * t).exp();
    let tol = Tolerance::rel(1e-13).with_abs(1e-16);
    let width = (1.0 / decay).min(4.0);
    let re = quad::semi_infinite(|t| g(t).re, 0.0, width, tol)?.value;
    let im = quad::semi_infinite(|t| g(t).im, 0.0, width, tol)?.value;
    Ok(Complex64::new(0.0, sigma) * Complex64::new(0.0, w).exp() * Complex64::new(re, im))
}

/// Hard-edge kernel with `m = cy - cx`, `nu_x = a + cx`, `nu_y = a + cy`:
/// `(1/4) int_0^1 s^{m/2} J_{nu_x}(sqrt(sx)) J_{nu_y}(sqrt(sy)) ds` for
/// `m >= 0` and `-(1/4) int_1^inf` of the same for `m < 0`.
///
/// The `m < 0` branch is `-(1/4)(int_0^inf - int_0^1)` with the full
/// integral from Sonine's discontinuous integral
/// `int_0^inf t^{nu-mu+1} J_mu(at) J_nu(bt) dt
///   = b^nu (a^2-b^2)^{mu-nu-1} / (2^{mu-nu-1} a^mu Gamma(mu-nu))` for `b < a`, 0 for `b > a`.
pub fn hard_edge_kernel(a: f64, cx: i64, x: f64, cy: i64, y: f64) -> Result<f64> {
    check_finite(&[a, x, y])?;
    if a <= -1.0 {
        return Err(Error::Parameter(format!("a = {a} must exceed -1")));
    }
    if x < 0.0 || y < 0.0 {
        return Err(Error::Range(format!("hard-edge positions ({x}, {y}) must be >= 0")));
    }
    let nu_x = a + cx as f64;
    let nu_y = a + cy as f64;
    for (nu, pos) in [(nu_x, x), (nu_y, y)] {
        if nu <= -1.0 || (pos == 0.0 && nu < 0.0) {
            return Err(Error::Range(format!("Bessel order {nu} at position {pos}")));
        }
    }
    let (rx, ry) = (x.sqrt(), y.sqrt());
    let m = cy - cx;
    // s = u^2 turns (1/4) int_0^1 s^{p/2} J J ds into (1/2) int_0^1 u^{p+1} J J du.
    let unit = |p: i64| -> Result<f64> {
        let r = quad::tanh_sinh(
            |u, _, _| u.powi(p as i32 + 1) * bessel_j(nu_x, u * rx) * bessel_j(nu_y, u * ry),
            0.0,
            1.0,
            1e-13,
        )?;
        Ok(0.5 * r.value)
    };
    if m >= 0 {
        return unit(m);
    }
    let k = -m;
    if x == 0.0 {
        return Ok(0.0);
    }
    let full = sonine(k, nu_x, nu_y, x, y);
    Ok(-0.5 * full + unit(-k)?)
}

// Sonine's integral with a = sqrt(x), b = sqrt(y), mu - nu = k >= 1; the
// midpoint of the jump at x = y for k = 1.
fn sonine(k: i64, mu: f64, nu: f64, x: f64, y: f64) -> f64 {
    if y > x {
        return 0.0;
    }
    if y == x {
        return if k == 1 { 0.5 / x.sqrt() } else { 0.0 };
    }
    let kf = k as f64;
    let ln_b_power = if y == 0.0 {
        // b^nu at b = 0: 1 for nu = 0, otherwise 0.
        if nu == 0.0 {
            0.0
        } else {
            return 0.0;
        }
    } else {
        0.5 * nu * y.ln()
    };
    (ln_b_power + (kf - 1.0) * (x - y).ln() - (kf - 1.0) * std::f64::consts::LN_2 - 0.5 * mu * x.ln() - ln_gamma(kf)).exp()
}
