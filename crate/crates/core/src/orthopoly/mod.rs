//! Classical weights (Gaussian, Laguerre, Jacobi), their orthogonal
//! polynomials in the normalization used throughout the crate, Rodrigues
//! data, norms, orthonormal functions, and the Airy / Bessel functions used by
//! the limit kernels.
//!
//! Polynomial conventions:
//! - Gaussian: Hermite `H_j(x)`, weight `e^{-x^2}`.
//! - Laguerre: `L_j^{(a)}(x)`, weight `x^a e^{-x}` on `[0, inf)`.
//! - Jacobi: `P_j^{(a,b)}(1 - 2x)`, weight `x^a (1-x)^b` on `[0, 1]`.

mod airy;
mod bessel;

pub use airy::airy;
pub use bessel::bessel_j;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::logval::LogValue;

/// Exponents must exceed `-1 + PARAM_FLOOR`.
pub const PARAM_FLOOR: f64 = 1e-8;

const LN_PI: f64 = 1.144_729_885_849_400_2;
// Rescaling threshold for the three-term recurrences.
const BIG: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Gaussian,
    Laguerre,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// Laguerre / Jacobi exponent at `x = 0`.
    #[serde(default)]
    pub a: f64,
    /// Jacobi exponent at `x = 1`.
    #[serde(default)]
    pub b: f64,
}

impl EnsembleSpec {
    pub fn gaussian() -> Self {
        EnsembleSpec {
            kind: EnsembleKind::Gaussian,
            a: 0.0,
            b: 0.0,
        }
    }

    pub fn laguerre(a: f64) -> Result<Self> {
        let s = EnsembleSpec {
            kind: EnsembleKind::Laguerre,
            a,
            b: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn jacobi(a: f64, b: f64) -> Result<Self> {
        let s = EnsembleSpec {
            kind: EnsembleKind::Jacobi,
            a,
            b,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| {
            if !v.is_finite() || v <= -1.0 + PARAM_FLOOR {
                Err(Error::Parameter(format!("{name} = {v} must exceed -1")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            EnsembleKind::Gaussian => Ok(()),
            EnsembleKind::Laguerre => check("a", self.a),
            EnsembleKind::Jacobi => {
                check("a", self.a)?;
                check("b", self.b)
            }
        }
    }

    /// Closed support interval.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            EnsembleKind::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            EnsembleKind::Laguerre => (0.0, f64::INFINITY),
            EnsembleKind::Jacobi => (0.0, 1.0),
        }
    }

    /// True for points strictly inside the support.
    pub fn in_open_support(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x.is_finite() && x > lo && x < hi
    }

    pub fn shifted(&self, shift: usize) -> ShiftedFamily {
        ShiftedFamily { base: *self, shift }
    }
}

/// Rodrigues data: `p_j = (e_j w)^{-1} d^j/dy^j (w Q^j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodriguesData {
    pub e: f64,
    pub ln_abs_e: f64,
    pub sign: f64,
    /// Coefficients of `Q(y) = q[0] + q[1] y + q[2] y^2`.
    pub q: [f64; 3],
}

impl RodriguesData {
    pub fn q_at(&self, y: f64) -> f64 {
        self.q[0] + y * (self.q[1] + y * self.q[2])
    }

    pub fn describe_q(&self) -> &'static str {
        match self.q {
            [1.0, 0.0, 0.0] => "1",
            [0.0, 1.0, 0.0] => "y",
            _ => "y(1-y)",
        }
    }
}

/// Rodrigues constant `e_j` and `Q`. Gaussian: `(-1)^j`, `Q = 1`; Laguerre:
/// `j!`, `Q = y`; Jacobi: `j!`, `Q = y(1-y)` (in the `y` variable of
/// `P_j^{(a,b)}(1-2y)`).
pub fn rodrigues_constants(spec: &EnsembleSpec, j: usize) -> RodriguesData {
    let (sign, ln_abs_e, q) = match spec.kind {
        EnsembleKind::Gaussian => (
            if j % 2 == 0 { 1.0 } else { -1.0 },
            0.0,
            [1.0, 0.0, 0.0],
        ),
        EnsembleKind::Laguerre => (1.0, ln_factorial(j), [0.0, 1.0, 0.0]),
        EnsembleKind::Jacobi => (1.0, ln_factorial(j), [0.0, 1.0, -1.0]),
    };
    RodriguesData {
        e: sign * ln_abs_e.exp(),
        ln_abs_e,
        sign,
        q,
    }
}

pub(crate) fn ln_factorial(j: usize) -> f64 {
    if j < 2 {
        0.0
    } else {
        ln_gamma(j as f64 + 1.0)
    }
}

/// A classical family with both exponents raised by `shift` (no effect for
/// the Gaussian weight).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedFamily {
    pub base: EnsembleSpec,
    pub shift: usize,
}

impl ShiftedFamily {
    pub fn new(base: EnsembleSpec, shift: usize) -> Result<Self> {
        base.validate()?;
        Ok(ShiftedFamily { base, shift })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.base.kind
    }

    pub fn alpha(&self) -> f64 {
        self.base.a + self.shift as f64
    }

    pub fn beta(&self) -> f64 {
        self.base.b + self.shift as f64
    }

    /// `ln w(x)`; `-inf` outside the support.
    pub fn ln_weight(&self, x: f64) -> f64 {
        match self.kind() {
            EnsembleKind::Gaussian => -x * x,
            EnsembleKind::Laguerre => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    xlogy(self.alpha(), x) - x
                }
            }
            EnsembleKind::Jacobi => {
                if !(0.0..=1.0).contains(&x) {
                    f64::NEG_INFINITY
                } else {
                    xlogy(self.alpha(), x) + xlogy(self.beta(), 1.0 - x)
                }
            }
        }
    }

    pub fn weight(&self, x: f64) -> f64 {
        self.ln_weight(x).exp()
    }

    /// `p_j(x)` by the three-term recurrence. May overflow for large `j`; see
    /// [`ShiftedFamily::poly_log_seq`].
    pub fn poly(&self, j: usize, x: f64) -> f64 {
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 0..j {
            let (c1, c0, cm) = self.poly_coeffs(k, x);
            let next = c1 * cur - cm * prev + c0 * cur;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `p_0(x) .. p_jmax(x)` as signed logarithms.
    pub fn poly_log_seq(&self, jmax: usize, x: f64) -> Vec<LogValue> {
        let mut out = Vec::with_capacity(jmax + 1);
        let mut scale = 0.0;
        let mut prev = 0.0;
        let mut cur = 1.0;
        out.push(LogValue::ONE);
        for k in 0..jmax {
            let (c1, c0, cm) = self.poly_coeffs(k, x);
            let next = (c1 + c0) * cur - cm * prev;
            prev = cur;
            cur = next;
            rescale(&mut prev, &mut cur, &mut scale);
            let v = LogValue::from_f64(cur);
            out.push(LogValue::new(v.sign, v.ln + scale));
        }
        out
    }

    // p_{k+1} = (c1 + c0) p_k - cm p_{k-1}, with c1 carrying the x dependence.
    fn poly_coeffs(&self, k: usize, x: f64) -> (f64, f64, f64) {
        let kf = k as f64;
        match self.kind() {
            EnsembleKind::Gaussian => (2.0 * x, 0.0, 2.0 * kf),
            EnsembleKind::Laguerre => {
                let a = self.alpha();
                let d = kf + 1.0;
                ((-x) / d, (2.0 * kf + 1.0 + a) / d, (kf + a) / d)
            }
            EnsembleKind::Jacobi => {
                let (a, b) = (self.alpha(), self.beta());
                let t = 1.0 - 2.0 * x;
                let (ak, bk, ck) = jacobi_abc(k, a, b);
                (ak * t, bk, ck)
            }
        }
    }

    /// `ln N_j` where `N_j = int w p_j^2`.
    pub fn ln_norm(&self, j: usize) -> f64 {
        let jf = j as f64;
        match self.kind() {
            EnsembleKind::Gaussian => jf * std::f64::consts::LN_2 + ln_factorial(j) + 0.5 * LN_PI,
            EnsembleKind::Laguerre => ln_gamma(jf + self.alpha() + 1.0) - ln_factorial(j),
            EnsembleKind::Jacobi => {
                let (a, b) = (self.alpha(), self.beta());
                if j == 0 {
                    ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)
                } else {
                    ln_gamma(jf + a + 1.0) + ln_gamma(jf + b + 1.0)
                        - ln_factorial(j)
                        - (2.0 * jf + a + b + 1.0).ln()
                        - ln_gamma(jf + a + b + 1.0)
                }
            }
        }
    }

    /// `N_j / N_{j-1}` for `j >= 1`.
    pub fn norm_step(&self, j: usize) -> f64 {
        assert!(j >= 1);
        let jf = j as f64;
        match self.kind() {
            EnsembleKind::Gaussian => 2.0 * jf,
            EnsembleKind::Laguerre => (jf + self.alpha()) / jf,
            EnsembleKind::Jacobi => jacobi_norm_ratio(j - 1, self.alpha(), self.beta()),
        }
    }

    /// `N_j` in linear scale; range error when it overflows.
    pub fn norm(&self, j: usize) -> Result<f64> {
        let v = self.ln_norm(j).exp();
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Range(format!(
                "norm of degree {j} is outside double range (ln = {})",
                self.ln_norm(j)
            )))
        }
    }

    /// `eta_k(x) = (w(x) / N_k)^{1/2} p_k(x)`.
    pub fn eta(&self, k: usize, x: f64) -> f64 {
        self.eta_seq(k, x)[k]
    }

    /// `eta_0(x) .. eta_kmax(x)`, by the orthonormal recurrence with the
    /// square root of the weight applied in log space at the end.
    pub fn eta_seq(&self, kmax: usize, x: f64) -> Vec<f64> {
        let lw = self.ln_weight(x);
        if lw == f64::NEG_INFINITY {
            return vec![0.0; kmax + 1];
        }
        let half_lw = 0.5 * lw;
        let mut out = Vec::with_capacity(kmax + 1);
        let mut scale = -0.5 * self.ln_norm(0);
        let mut prev = 0.0;
        let mut cur = 1.0;
        out.push((half_lw + scale).exp());
        for k in 0..kmax {
            let (lin, cm) = self.orthonormal_step(k, x);
            let next = lin * cur - cm * prev;
            prev = cur;
            cur = next;
            rescale(&mut prev, &mut cur, &mut scale);
            out.push(cur * (half_lw + scale).exp());
        }
        out
    }

    // q_{k+1} = lin q_k - cm q_{k-1} for q_k = p_k / sqrt(N_k).
    fn orthonormal_step(&self, k: usize, x: f64) -> (f64, f64) {
        let kf = k as f64;
        match self.kind() {
            EnsembleKind::Gaussian => (
                (2.0 / (kf + 1.0)).sqrt() * x,
                (kf / (kf + 1.0)).sqrt(),
            ),
            EnsembleKind::Laguerre => {
                let a = self.alpha();
                let d = ((kf + 1.0) * (kf + a + 1.0)).sqrt();
                (
                    (2.0 * kf + 1.0 + a - x) / d,
                    (kf * (kf + a) / ((kf + 1.0) * (kf + a + 1.0))).sqrt(),
                )
            }
            EnsembleKind::Jacobi => {
                let (a, b) = (self.alpha(), self.beta());
                let t = 1.0 - 2.0 * x;
                let (ak, bk, ck) = jacobi_abc(k, a, b);
                let r = jacobi_norm_ratio(k, a, b).sqrt().recip();
                let cm = if k == 0 {
                    0.0
                } else {
                    ck * r / jacobi_norm_ratio(k - 1, a, b).sqrt()
                };
                ((ak * t + bk) * r, cm)
            }
        }
    }
}

// x * ln(y) with 0 * ln(0) = 0.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn rescale(prev: &mut f64, cur: &mut f64, scale: &mut f64) {
    let m = cur.abs().max(prev.abs());
    if m > BIG {
        *prev /= BIG;
        *cur /= BIG;
        *scale += BIG.ln();
    } else if m < 1.0 / BIG && m > 0.0 {
        *prev *= BIG;
        *cur *= BIG;
        *scale -= BIG.ln();
    }
}

// P_{k+1}(t) = (A_k t + B_k) P_k(t) - C_k P_{k-1}(t) for P^{(a,b)}.
fn jacobi_abc(k: usize, a: f64, b: f64) -> (f64, f64, f64) {
    if k == 0 {
        return ((a + b + 2.0) / 2.0, (a - b) / 2.0, 0.0);
    }
    let n = k as f64;
    let s = 2.0 * n + a + b;
    let d = (n + 1.0) * (n + a + b + 1.0);
    (
        (s + 1.0) * (s + 2.0) / (2.0 * d),
        (s + 1.0) * (a * a - b * b) / (2.0 * d * s),
        (n + a) * (n + b) * (s + 2.0) / (d * s),
    )
}

// N_{k+1} / N_k for the Jacobi family.
fn jacobi_norm_ratio(k: usize, a: f64, b: f64) -> f64 {
    if k == 0 {
        return (a + 1.0) * (b + 1.0) / (a + b + 3.0);
    }
    let n = k as f64;
    (n + a + 1.0) * (n + b + 1.0) * (2.0 * n + a + b + 1.0)
        / ((n + 1.0) * (n + a + b + 1.0) * (2.0 * n + a + b + 3.0))
}

pub fn eval_weight(fam: &ShiftedFamily, x: f64) -> Result<f64> {
    fam.base.validate()?;
    Ok(fam.weight(x))
}

pub fn eval_poly(fam: &ShiftedFamily, j: usize, x: f64) -> Result<f64> {
    fam.base.validate()?;
    Ok(fam.poly(j, x))
}

pub fn norm_constant(fam: &ShiftedFamily, j: usize) -> Result<f64> {
    fam.base.validate()?;
    fam.norm(j)
}

pub fn ln_norm_constant(fam: &ShiftedFamily, j: usize) -> Result<f64> {
    fam.base.validate()?;
    Ok(fam.ln_norm(j))
}

pub fn eval_eta(fam: &ShiftedFamily, k: usize, x: f64) -> Result<f64> {
    fam.base.validate()?;
    Ok(fam.eta(k, x))
}
