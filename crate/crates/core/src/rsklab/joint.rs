//! Joint law of the nested RSK shapes for geometric sites with parameters in
//! geometric progression, and its continuum (Jacobi) limit.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{LatticeConfig, ShapeSequence, WeightModel};
use crate::error::{Error, Result};
use crate::orthopoly::ln_factorial;

// ln (t;t)_l = sum_{k=1}^{l} ln(1 - t^k), with ln_t = ln t < 0.
fn ln_qpoch(ln_t: f64, l: i64) -> f64 {
    (1..=l).map(|k| (-(k as f64 * ln_t).exp_m1()).ln()).sum()
}

// ln(t^lo - t^hi) for lo < hi.
fn ln_tpow_gap(ln_t: f64, lo: i64, hi: i64) -> f64 {
    lo as f64 * ln_t + (-((hi - lo) as f64 * ln_t).exp_m1()).ln()
}

fn ln_vandermonde_t(ln_t: f64, h: &[i64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            acc += ln_tpow_gap(ln_t, h[j], h[i]);
        }
    }
    acc
}

/// `ln P` of the shape sequence under geometric sites
/// (`-inf` when the sequence is impossible).
pub fn ln_discrete_joint(cfg: &LatticeConfig, seq: &ShapeSequence) -> Result<f64> {
    cfg.validate()?;
    let (z, t, alphas) = match &cfg.weights {
        WeightModel::Geometric { z, t, alphas } => (*z, *t, alphas),
        _ => return Err(Error::Argument("discrete joint law needs geometric sites".into())),
    };
    let (n1, n2, p) = (cfg.n1, cfg.n2, cfg.p);
    if n1 < n2 + p {
        return Err(Error::Parameter(format!("need n1 >= n2 + p, got {n1} < {}", n2 + p)));
    }
    if seq.n2 != n2 || seq.p() != p || seq.shapes.len() != p + 1 {
        return Err(Error::Argument(format!(
            "shape sequence has n2 = {}, p = {}; lattice has n2 = {n2}, p = {p}",
            seq.n2,
            seq.p()
        )));
    }
    if !seq.is_interlaced() {
        return Ok(f64::NEG_INFINITY);
    }
    let h = seq.h_variables();
    let (lz, lt) = (z.ln(), t.ln());
    let m = (n1 - n2 - p) as i64;
    let sum = |v: &[i64]| v.iter().sum::<i64>() as f64;
    let tri = |k: i64| (k * (k + 1) / 2) as f64;

    let (n1i, n2i, pi) = (n1 as i64, n2 as i64, p as i64);
    let mut ln_k = -(((n2i + pi) * (n2i + pi - 1) + n2i * (n2i - 1)) as f64) / 2.0 * lz;
    for (s, a) in alphas.iter().enumerate() {
        ln_k -= (n2 + s) as f64 * a.ln();
    }
    let t_exp = (1..=m).map(|j| j * (j - 1)).sum::<i64>() as f64
        + (n2i + pi) as f64 * tri(m)
        + (1..=n2i).map(|j| (j - 1) * (n2i - j)).sum::<i64>() as f64
        + (1..=n1i).map(|j| (j - 1) * (n2i + pi - j)).sum::<i64>() as f64;
    ln_k -= t_exp * lt;
    ln_k -= (1..n2i).map(|l| ln_qpoch(lt, l)).sum::<f64>();
    ln_k -= (1..n1i).map(|l| ln_qpoch(lt, l)).sum::<f64>();
    ln_k += (1..m).map(|l| ln_qpoch(lt, l)).sum::<f64>();
    for i in 1..=n1 {
        for j in 1..=n2 {
            ln_k += (-(z * z * t.powi((i + j - 2) as i32))).ln_1p();
        }
        for a in alphas {
            ln_k += (-(a * z * t.powi(i as i32 - 1))).ln_1p();
        }
    }

    let top = &h[p];
    let mut v = ln_k + (sum(top) + sum(&h[0])) * lz;
    for s in 1..=p {
        v += (sum(&h[s]) - sum(&h[s - 1])) * alphas[s - 1].ln();
    }
    for &hi in top {
        v += ln_qpoch(lt, hi + m) - ln_qpoch(lt, hi);
    }
    v += ln_vandermonde_t(lt, top) + ln_vandermonde_t(lt, &h[0]);
    Ok(v)
}

/// Probability that the nested sub-blocks of a geometric lattice have RSK
/// shapes `seq`; zero when the shapes do not interlace.
pub fn eval_discrete_joint(cfg: &LatticeConfig, seq: &ShapeSequence) -> Result<f64> {
    Ok(ln_discrete_joint(cfg, seq)?.exp())
}

/// Parameters of the continuum limit: `n1 x (n2 + p)` exponential lattice
/// with rates set by `a` and `a_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiLimitParams {
    pub n1: usize,
    pub n2: usize,
    pub a: f64,
    pub a_s: Vec<f64>,
}

impl JacobiLimitParams {
    pub fn p(&self) -> usize {
        self.a_s.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n2 == 0 || self.n1 < self.n2 + self.p() {
            return Err(Error::Parameter(format!(
                "need n2 >= 1 and n1 >= n2 + p (n1 = {}, n2 = {}, p = {})",
                self.n1,
                self.n2,
                self.p()
            )));
        }
        if !(self.a > 0.0) || self.a_s.iter().any(|s| !(s + self.a > 0.0)) {
            return Err(Error::Parameter("need a > 0 and a + a_s > 0".into()));
        }
        Ok(())
    }

    fn check_points(&self, pts: &[Vec<f64>]) -> Result<()> {
        let p = self.p();
        if pts.len() != p + 1 || pts.iter().enumerate().any(|(s, v)| v.len() != self.n2 + s) {
            return Err(Error::Argument(format!("expected {} layers of sizes n2 .. n2 + p", p + 1)));
        }
        Ok(())
    }
}

/// `ln` of the normalization constant of the continuum density.
pub fn ln_k_tilde(params: &JacobiLimitParams) -> f64 {
    let (n1, n2, p, a) = (params.n1, params.n2, params.p(), params.a);
    let m = n1 - n2 - p;
    let mut v = (1..m).map(ln_factorial).sum::<f64>() - (1..n1).map(ln_factorial).sum::<f64>()
        - (1..n2).map(ln_factorial).sum::<f64>();
    for s in &params.a_s {
        v += ln_gamma(s + a + n1 as f64) - ln_gamma(s + a);
    }
    for i in 1..=n1 {
        let fi = i as f64;
        v += ln_gamma(2.0 * a + fi + n2 as f64 - 1.0) - ln_gamma(2.0 * a + fi - 1.0);
    }
    v
}

// x_1^(s) > x_1^(s-1) > x_2^(s) > ... > x_{n2+s}^(s), with `gt` the strict
// comparison in the chosen variables.
fn interlaced(pts: &[Vec<f64>], gt: impl Fn(f64, f64) -> bool) -> bool {
    (1..pts.len()).all(|s| {
        let (hi, lo) = (&pts[s], &pts[s - 1]);
        (0..lo.len()).all(|j| gt(hi[j], lo[j]) && gt(lo[j], hi[j + 1]))
    })
}

/// Density of the continuum limit at `x[s][j] = x_j^(s)` (layer `s` holds
/// `n2 + s` decreasing positive values). Zero off the interlacing region.
pub fn eval_jacobi_limit_pdf(params: &JacobiLimitParams, x: &[Vec<f64>]) -> Result<f64> {
    params.validate()?;
    params.check_points(x)?;
    let ordered = interlaced(x, |u, v| u > v) && x.iter().all(|l| l.windows(2).all(|w| w[0] > w[1]));
    if !ordered || x.iter().flatten().any(|&v| !(v > 0.0)) {
        return Ok(0.0);
    }
    let p = params.p();
    let m = (params.n1 - params.n2 - p) as f64;
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let top = &x[p];
    let mut v = ln_k_tilde(params) - params.a * (sum(top) + sum(&x[0]));
    for s in 1..=p {
        v -= params.a_s[s - 1] * (sum(&x[s]) - sum(&x[s - 1]));
    }
    for &xi in top {
        v += m * (-(-xi).exp_m1()).ln();
    }
    // ln(e^{-x_j} - e^{-x_i}) for x_j < x_i
    let vdm = |l: &[f64]| {
        let mut acc = 0.0;
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                acc += -l[j] + (-(l[j] - l[i]).exp_m1()).ln();
            }
        }
        acc
    };
    v += vdm(top) + vdm(&x[0]);
    Ok(v.exp())
}

/// The continuum density in the variables `y = e^{-x}` (layers increasing in
/// `(0, 1)`), written directly as a product of powers.
pub fn eval_jacobi_limit_pdf_y(params: &JacobiLimitParams, y: &[Vec<f64>]) -> Result<f64> {
    params.validate()?;
    params.check_points(y)?;
    let ordered = interlaced(y, |u, v| u < v) && y.iter().all(|l| l.windows(2).all(|w| w[0] < w[1]));
    if !ordered || y.iter().flatten().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Ok(0.0);
    }
    let p = params.p();
    let m = (params.n1 - params.n2 - p) as f64;
    let a = params.a;
    let mut v = ln_k_tilde(params);
    for &yi in &y[p] {
        v += (a - 1.0) * yi.ln() + m * (1.0 - yi).ln();
    }
    for &yi in &y[0] {
        v += a * yi.ln();
    }
    for s in 1..=p {
        let a_s = params.a_s[s - 1];
        v += a_s * y[s].iter().map(|u| u.ln()).sum::<f64>();
        v -= (a_s + 1.0) * y[s - 1].iter().map(|u| u.ln()).sum::<f64>();
    }
    v += ln_vandermonde(&y[p]) + ln_vandermonde(&y[0]);
    Ok(v.exp())
}

fn ln_vandermonde(l: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            acc += (l[j] - l[i]).ln();
        }
    }
    acc
}

/// With `a_s = a - s` the intermediate layers drop out of the `y` density:
/// `K * prod w(y^(p)) * Delta(y^(p)) * Delta(y^(0))` on the interlacing
/// region, `w(y) = y^{2a-p-1} (1-y)^{n1-n2-p}`.
pub fn eval_jacobi_limit_weight_form(n1: usize, n2: usize, p: usize, a: f64, y: &[Vec<f64>]) -> Result<f64> {
    let params = JacobiLimitParams {
        n1,
        n2,
        a,
        a_s: (1..=p).map(|s| a - s as f64).collect(),
    };
    params.validate()?;
    params.check_points(y)?;
    let ordered = interlaced(y, |u, v| u < v) && y.iter().all(|l| l.windows(2).all(|w| w[0] < w[1]));
    if !ordered || y.iter().flatten().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Ok(0.0);
    }
    let (alpha, beta) = (2.0 * a - p as f64 - 1.0, (n1 - n2 - p) as f64);
    let mut v = ln_k_tilde(&params);
    for &u in &y[p] {
        v += alpha * u.ln() + beta * (1.0 - u).ln();
    }
    v += ln_vandermonde(&y[p]) + ln_vandermonde(&y[0]);
    Ok(v.exp())
}

/// Scaled discrete probability against the continuum density at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub scale: f64,
    /// `L^{(1+p)(n2+p/2)} P(h = round(L x))`.
    pub scaled_discrete: f64,
    pub continuum: f64,
    pub rel_error: f64,
}

/// Evaluates the discrete law with `t = e^{-1/L}`, `z = e^{-a/L}`,
/// `alpha_s = e^{-a_s/L}` at `h = round(L x)` and compares the scaled value
/// with the continuum density at `x`.
pub fn discrete_limit_check(params: &JacobiLimitParams, x: &[Vec<f64>], scale: f64) -> Result<LimitCheck> {
    params.validate()?;
    params.check_points(x)?;
    if !(scale >= 1.0) {
        return Err(Error::Argument(format!("scale L = {scale} must be at least 1")));
    }
    let (n1, n2, p) = (params.n1, params.n2, params.p());
    let cfg = LatticeConfig::new(
        n1,
        n2,
        p,
        WeightModel::Geometric {
            z: (-params.a / scale).exp(),
            t: (-1.0 / scale).exp(),
            alphas: params.a_s.iter().map(|s| (-s / scale).exp()).collect(),
        },
    )?;
    let mut shapes = Vec::with_capacity(p + 1);
    for (s, layer) in x.iter().enumerate() {
        let mut mu = Vec::with_capacity(layer.len());
        for (j, &xj) in layer.iter().enumerate() {
            let h = (scale * xj).round() as i64;
            let part = h - (n2 + s) as i64 + j as i64 + 1;
            if part < 0 {
                return Err(Error::Argument(format!("point {xj} too small for scale {scale}")));
            }
            mu.push(part as u64);
        }
        shapes.push(mu);
    }
    let seq = ShapeSequence::new(n2, shapes)?;
    let dims = x.iter().map(Vec::len).sum::<usize>() as f64;
    let scaled_discrete = (ln_discrete_joint(&cfg, &seq)? + dims * scale.ln()).exp();
    let continuum = eval_jacobi_limit_pdf(params, x)?;
    Ok(LimitCheck {
        scale,
        scaled_discrete,
        continuum,
        rel_error: (scaled_discrete / continuum - 1.0).abs(),
    })
}
