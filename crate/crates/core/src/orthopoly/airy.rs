//! Airy function `Ai` and its derivative on the real line.
//!
//! `|x| <= 2`: Maclaurin series. `2 < |x| < 9`: Taylor expansion of the Airy
//! equation about the nearest node of a 0.25-spaced table. `|x| >= 9`:
//! asymptotic expansions. The table for `x < 0` is filled by Taylor stepping
//! outward from the origin; for `x > 0` it is filled by stepping inward from
//! the asymptotic values at `x = 9`, the stable direction for the recessive
//! solution.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;
const TABLE_EDGE: f64 = 9.0;
const STEP: f64 = 0.25;

/// `(Ai(x), Ai'(x))` for `|x| <= 1000`. Far left the phase `2/3 |x|^{3/2}`
/// carries an absolute rounding error of about `|x|^{3/2} * 1e-16`.
pub fn airy(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || x.abs() > 1000.0 {
        return Err(Error::Range(format!("airy argument {x} outside [-1000, 1000]")));
    }
    Ok(airy_unchecked(x))
}

pub(crate) fn airy_unchecked(x: f64) -> (f64, f64) {
    if x.abs() <= 2.0 {
        maclaurin(x)
    } else if x.abs() < TABLE_EDGE {
        let t = table();
        let i = ((x + TABLE_EDGE) / STEP).round() as usize;
        let x0 = -TABLE_EDGE + i as f64 * STEP;
        let (a, ap) = t[i];
        taylor(x0, a, ap, x - x0)
    } else if x > 0.0 {
        asymptotic_right(x)
    } else {
        asymptotic_left(-x)
    }
}

fn maclaurin(x: f64) -> (f64, f64) {
    // a_{n+3} = a_n / ((n+2)(n+3)); a_0 = Ai(0), a_1 = Ai'(0), a_2 = 0.
    // Sixty terms reach 1e-36 at |x| = 2.
    let mut coef = [AI0, AIP0, 0.0];
    let mut val = 0.0;
    let mut der = 0.0;
    let mut xn = 1.0;
    let mut xn1 = 0.0;
    for n in 0..60usize {
        let c = coef[n % 3];
        val += c * xn;
        der += n as f64 * c * xn1;
        coef[n % 3] = c / ((n + 2) as f64 * (n + 3) as f64);
        xn1 = xn;
        xn *= x;
    }
    (val, der)
}

// Taylor series of the Airy-equation solution with y(x0) = a, y'(x0) = ap.
fn taylor(x0: f64, a: f64, ap: f64, h: f64) -> (f64, f64) {
    // c_{k+2} (k+1)(k+2) = x0 c_k + c_{k-1}
    let mut c = [0.0f64; 64];
    c[0] = a;
    c[1] = ap;
    c[2] = x0 * a / 2.0;
    let mut val = c[0] + h * c[1] + h * h * c[2];
    let mut der = c[1] + 2.0 * h * c[2];
    let mut hk = h * h;
    // At x0 = 0 every third coefficient vanishes, so stop only after three
    // consecutive negligible terms.
    let mut quiet = 0;
    for k in 3..c.len() {
        c[k] = (x0 * c[k - 2] + c[k - 3]) / ((k - 1) as f64 * k as f64);
        der += k as f64 * c[k] * hk;
        hk *= h;
        let term = c[k] * hk;
        val += term;
        if term.abs() < 1e-18 * (val.abs() + der.abs()) {
            quiet += 1;
            if quiet == 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    (val, der)
}

fn table() -> &'static Vec<(f64, f64)> {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (2.0 * TABLE_EDGE / STEP).round() as usize;
        let mid = n / 2;
        let mut t = vec![(0.0, 0.0); n + 1];
        t[mid] = (AI0, AIP0);
        // Negative side: outward from the origin to the midpoint, inward
        // from the asymptotic value at -9 for the rest.
        let quarter = mid / 2;
        for i in (quarter..mid).rev() {
            let x0 = -TABLE_EDGE + (i + 1) as f64 * STEP;
            let (a, ap) = t[i + 1];
            t[i] = taylor(x0, a, ap, -STEP);
        }
        t[0] = asymptotic_left(TABLE_EDGE);
        for i in 1..quarter {
            let x0 = -TABLE_EDGE + (i - 1) as f64 * STEP;
            let (a, ap) = t[i - 1];
            t[i] = taylor(x0, a, ap, STEP);
        }
        t[n] = asymptotic_right(TABLE_EDGE);
        for i in (mid + 1..n).rev() {
            let x0 = -TABLE_EDGE + (i + 1) as f64 * STEP;
            let (a, ap) = t[i + 1];
            t[i] = taylor(x0, a, ap, -STEP);
        }
        t
    })
}

// Coefficients u_k, v_k of the standard asymptotic expansions.
fn uv(k: usize) -> (f64, f64) {
    static UV: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    UV.get_or_init(|| {
        let mut out = vec![(1.0, 1.0)];
        let mut u = 1.0f64;
        for k in 1..40 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
            out.push((u, v));
        }
        out
    })[k]
}

fn asymptotic_right(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let mut su = 0.0;
    let mut sv = 0.0;
    let mut p = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..40 {
        let (u, v) = uv(k);
        let tu = u * p;
        if tu.abs() > last {
            break;
        }
        last = tu.abs();
        su += tu;
        sv += v * p;
        if last < 1e-17 {
            break;
        }
        p *= -1.0 / zeta;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * su, -e * q * sv)
}

fn asymptotic_left(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    // Even and odd partial sums of (-1)^k u_k / zeta^k.
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut p = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..40 {
        let (u, v) = uv(k);
        let tu = u * p;
        if tu.abs() > last {
            break;
        }
        last = tu.abs();
        // (-1)^{floor(k/2)} sign pattern
        let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += s * tu;
            ve += s * v * p;
        } else {
            uo += s * tu;
            vo += s * v * p;
        }
        if last < 1e-17 {
            break;
        }
        p /= zeta;
    }
    let phase = zeta - PI / 4.0;
    let (sn, cs) = phase.sin_cos();
    let q = z.powf(0.25);
    let rp = PI.sqrt().recip();
    (
        rp / q * (cs * ue + sn * uo),
        rp * q * (sn * ve - cs * vo),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    // Plain Maclaurin sum with a long accumulator, valid for moderate |x|.
    fn series_oracle(x: f64) -> (f64, f64) {
        let mut a = [AI0, AIP0, 0.0];
        let mut val = 0.0;
        let mut der = 0.0;
        for n in 0..400usize {
            let c = a[n % 3];
            val += c * x.powi(n as i32);
            if n > 0 {
                der += n as f64 * c * x.powi(n as i32 - 1);
            }
            a[n % 3] = c / ((n + 2) as f64 * (n + 3) as f64);
        }
        (val, der)
    }

    #[test]
    fn values_at_origin() {
        let (a, ap) = airy(0.0).unwrap();
        assert!((a - 0.355_028_053_9).abs() < 1e-10);
        assert!((ap + 0.258_819_403_8).abs() < 1e-10);
    }

    #[test]
    fn matches_series_on_moderate_range() {
        for i in -22..=22 {
            let x = i as f64 * 0.2 + 0.013;
            let (a, ap) = airy(x).unwrap();
            let (oa, oap) = series_oracle(x);
            // The plain series loses accuracy as |x| grows; stay where it
            // is good to ~1e-13.
            let tol = if x.abs() > 2.0 { 1e-12 } else { 1e-14 };
            assert!((a - oa).abs() < tol, "x={x}: {a} vs {oa}");
            assert!((ap - oap).abs() < tol * 3.0, "x={x}: {ap} vs {oap}");
        }
    }

    #[test]
    fn table_edges_agree_with_asymptotics() {
        // The two halves of the negative table meet at -4.5.
        let quarter = table().len() / 4;
        let (a, ap) = table()[quarter];
        let (b, bp) = taylor(-TABLE_EDGE / 2.0 - STEP, table()[quarter - 1].0, table()[quarter - 1].1, STEP);
        assert!((a - b).abs() < 1e-14 && (ap - bp).abs() < 1e-14, "{a} {b} {ap} {bp}");
        // Stepping inward from x = 9 must land on the Maclaurin value at 2,
        // and stepping out from 0 must agree with it at -2.
        for (idx, x) in [(44, 2.0), (28, -2.0)] {
            let (m, mp) = maclaurin(x);
            let (t, tp) = table()[idx];
            assert!((m - t).abs() < 1e-14 && (mp - tp).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn known_values() {
        // Reference values to 16 digits.
        let cases = [
            (1.0, 0.135_292_416_312_881_4, -0.159_147_441_296_793_2),
            (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_624_8e-4),
            (-5.0, 0.350_761_009_024_114_3, 0.327_192_818_554_443_1),
            (-4.5, 0.292_152_781_055_959, -0.523_362_532_315_748),
            (4.5, 3.302_503_235_143_09e-4, -7.178_665_675_575_09e-4),
            (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10),
            (-10.0, 0.040_241_238_486_443_19, 0.996_265_044_132_790_1),
            (-20.0, -0.176_406_127_077_984_7, 0.892_862_856_736_471_2),
        ];
        for (x, ai, aip) in cases {
            let (a, ap) = airy(x).unwrap();
            assert!((a - ai).abs() < 1e-14, "Ai({x}) = {a}, want {ai}");
            assert!((ap - aip).abs() < 1e-13, "Ai'({x}) = {ap}, want {aip}");
        }
        let far = [
            (-100.0, 0.176_753_393_239_552_88, -0.242_297_031_660_583_81),
            (-300.0, 0.038_726_362_905_137_907, 2.250_225_513_838_094_1),
            (-1000.0, 0.055_971_895_773_019_919, 2.633_071_019_524_128_7),
        ];
        for (x, ai, aip) in far {
            let (a, ap) = airy(x).unwrap();
            assert!((a - ai).abs() < 1e-11, "Ai({x}) = {a}, want {ai}");
            assert!((ap - aip).abs() < 1e-10, "Ai'({x}) = {ap}, want {aip}");
        }
        let (a, ap) = airy(100.0).unwrap();
        // exp(-zeta) with zeta = 2000/3 loses about zeta ulps.
        assert!((a / 2.634_482_152_088_184_5e-291 - 1.0).abs() < 1e-12);
        assert!((ap / -2.635_140_361_604_41e-290 - 1.0).abs() < 1e-12);
        assert!(airy(1000.5).is_err());
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        for i in -100..=100 {
            let x = i as f64 * 0.1 + 0.0037;
            let f = |t: f64| airy(t).unwrap().0;
            let second = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            // Central-difference truncation error is about h^2 |f''''| / 12.
            assert!((second - x * f(x)).abs() < 1e-7 * (1.0 + x * x), "x={x}");
        }
    }

    #[test]
    fn decays_on_the_right_and_rejects_far_arguments() {
        let a = |x: f64| airy(x).unwrap().0;
        assert!(a(10.0) < a(5.0) && a(5.0) < a(1.0));
        assert!(airy(1000.5).is_err());
        assert!(airy(-1001.0).is_err());
    }
}
