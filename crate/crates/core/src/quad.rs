//! Quadrature: Gauss-Legendre rules, adaptive Gauss-Kronrod (7/15), tanh-sinh
//! for endpoint singularities and semi-infinite integration by growing panels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// n-point Gauss-Legendre rule on [-1, 1]; rules are cached per n.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss-Legendre on [a, b].
pub fn gl_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        s += w * f(c + h * x);
    }
    s * h
}

/// Composite Gauss-Legendre with `panels` equal panels of `order` nodes.
pub fn gl_panels<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        s += gl_fixed(&mut f, lo, lo + h, order);
    }
    s
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod evaluation; returns (estimate, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_intervals: 4000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss-Kronrod on a finite interval. `breaks` lists
/// interior points where the integrand is known to be non-smooth.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(inner);
    pts.push(hi);
    // (a, b, value, error)
    let mut ivs: Vec<(f64, f64, f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&mut f, w[0], w[1]);
            ivs.push((w[0], w[1], v, e));
        }
    }
    loop {
        let total: f64 = ivs.iter().map(|iv| iv.2).sum();
        let err: f64 = ivs.iter().map(|iv| iv.3).sum();
        if !total.is_finite() {
            return Err(Error::numeric("non-finite integrand value", None));
        }
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target {
            return Ok(QuadResult { value: sign * total, error: err });
        }
        if ivs.len() >= tol.max_intervals {
            let rel = if total != 0.0 { err / total.abs() } else { err };
            return Err(Error::numeric(
                format!("adaptive quadrature did not converge (estimate {total:e}, error {err:e})"),
                Some(rel),
            ));
        }
        let (k, _) = ivs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (x0, x1, _, _) = ivs.swap_remove(k);
        let xm = 0.5 * (x0 + x1);
        if !(xm > x0 && xm < x1) {
            // Interval cannot be split further in floating point.
            let rel = if total != 0.0 { err / total.abs() } else { err };
            return Err(Error::numeric("adaptive quadrature hit floating-point resolution", Some(rel)));
        }
        let (v0, e0) = gk15(&mut f, x0, xm);
        let (v1, e1) = gk15(&mut f, xm, x1);
        ivs.push((x0, xm, v0, e0));
        ivs.push((xm, x1, v1, e1));
    }
}

/// Integral over [a, +inf). Panels of doubling width are added until a
/// panel contributes less than `tol.rel` of the accumulated value (and the
/// absolute tolerance), twice in a row.
pub fn semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, first_width: f64, tol: Tolerance) -> Result<QuadResult> {
    let mut total = 0.0f64;
    let mut err = 0.0;
    let mut lo = a;
    let mut width = first_width;
    let mut quiet = 0;
    for _ in 0..200 {
        let hi = lo + width;
        let panel_tol = Tolerance {
            abs: tol.abs * 0.1,
            rel: tol.rel * 0.1,
            max_intervals: tol.max_intervals,
        };
        let r = adaptive(&mut f, lo, hi, &[], panel_tol.with_abs(tol.rel * 0.1 * total.abs() + tol.abs * 0.1))?;
        total += r.value;
        err += r.error;
        if r.value.abs() <= tol.rel * total.abs() * 0.01 + tol.abs * 0.01 {
            quiet += 1;
            if quiet >= 2 {
                return Ok(QuadResult { value: total, error: err });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::numeric("semi-infinite quadrature did not terminate", None))
}

/// Tanh-sinh quadrature on [a, b]. The integrand receives `(x, x - a, b - x)`
/// with the endpoint distances computed without cancellation, so integrable
/// endpoint singularities such as (x - a)^(-1/2) are handled.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    let mut eval = |t: f64| -> f64 {
        // x = c + half * tanh(u), u = pi/2 sinh t
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // 1 - tanh|u| = 2e/(1+e)
        let comp = 2.0 * e / (1.0 + e);
        let w = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if w == 0.0 || comp == 0.0 {
            return 0.0;
        }
        let (x, da, db) = if u >= 0.0 {
            let db = half * comp;
            (b - db, b - a - db, db)
        } else {
            let da = half * comp;
            (a + da, da, b - a - da)
        };
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let v = f(x, da, db);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let tmax = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h * half;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        let mut add = 0.0;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let cur = sum * h * half;
        let diff = (cur - prev).abs();
        if diff <= rel_tol * cur.abs() || (cur == 0.0 && prev == 0.0) {
            return Ok(QuadResult { value: cur, error: diff });
        }
        prev = cur;
    }
    Err(Error::numeric("tanh-sinh quadrature did not converge", Some((prev).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            for k in 0..(2 * n) {
                let v = gl_fixed(|x| x.powi(k as i32), -1.0, 1.0, n);
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((v - exact).abs() < 1e-13, "n={n} k={k} {v} {exact}");
            }
        }
    }

    #[test]
    fn kronrod_exact_to_degree_22() {
        for k in 0..=22 {
            let (v, _) = gk15(&mut |x: f64| x.powi(k), -1.0, 1.0);
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((v - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn adaptive_handles_kink() {
        let r = adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[], Tolerance::rel(1e-12)).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_gaussian_tail() {
        let r = semi_infinite(|x: f64| (-x * x).exp(), 0.0, 1.0, Tolerance::rel(1e-12)).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // Beta(0.2, 0.3) = Gamma(0.2)Gamma(0.3)/Gamma(0.5)
        let r = tanh_sinh(|_, da: f64, db: f64| da.powf(-0.8) * db.powf(-0.7), 0.0, 1.0, 1e-12).unwrap();
        let exact = 4.590843711998803 * 2.991568987687591 / 1.772453850905516;
        assert!((r.value - exact).abs() < 1e-9 * exact, "{} {}", r.value, exact);
    }
}
