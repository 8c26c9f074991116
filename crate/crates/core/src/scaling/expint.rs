//! Fourier-type integrals of powers over `[0, 1]` and `[1, inf)` in closed
//! form: `int_0^1 s^m e^{iws} ds` by series or recurrence, and
//! `int_1^inf s^{-k} e^{iws} ds = E_k(-iw)` by the generalized exponential
//! integral.

use num_complex::Complex64;

const EULER: f64 = 0.577_215_664_901_532_9;

/// `E_n(z) = int_1^inf e^{-zt} t^{-n} dt` for `n >= 1`, `Re z >= 0`, `z != 0`.
pub(crate) fn expint_n(n: usize, z: Complex64) -> Complex64 {
    assert!(n >= 1 && z.re >= 0.0 && z != Complex64::new(0.0, 0.0));
    if z.norm() <= 1.0 {
        // E_{k+1} = (e^{-z} - z E_k) / k loses nothing for |z| <= 1.
        let ez = (-z).exp();
        let mut e = e1_series(z);
        for k in 1..n {
            e = (ez - z * e) / k as f64;
        }
        e
    } else {
        continued_fraction(n, z)
    }
}

fn e1_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..80 {
        let kf = k as f64;
        term *= -z / kf;
        let add = term / kf;
        sum += add;
        if add.norm() < 1e-17 {
            break;
        }
    }
    -EULER - z.ln() - sum
}

// Modified Lentz on E_n(z) = e^{-z} / (z + n - 1 n / (z + n + 2 - 2 (n + 1) / (z + n + 4 - ...))).
fn continued_fraction(n: usize, z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = z + n as f64;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000usize {
        let an = -((i * (n - 1 + i)) as f64);
        b += 2.0;
        d = 1.0 / (d * an + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

/// `int_0^1 s^m e^{iws} ds`.
pub(crate) fn power_fourier_unit(m: usize, w: f64) -> Complex64 {
    let iw = Complex64::new(0.0, w);
    if w.abs() <= 2.0 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(1.0 / (m + 1) as f64, 0.0);
        for n in 1..80 {
            term *= iw / n as f64;
            let add = term / (m + n + 1) as f64;
            sum += add;
            if add.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        // Integration by parts; the error grows by at most m/|w| < m/2 per step.
        let e = iw.exp();
        let mut j = (e - 1.0) / iw;
        for k in 1..=m {
            j = (e - j * k as f64) / iw;
        }
        j
    }
}

/// `int_1^inf s^{-k} e^{iws} ds` for `k >= 1`; `w = 0` needs `k >= 2`.
pub(crate) fn power_fourier_tail(k: usize, w: f64) -> Complex64 {
    if w == 0.0 {
        assert!(k >= 2);
        return Complex64::new(1.0 / (k - 1) as f64, 0.0);
    }
    expint_n(k, Complex64::new(0.0, -w))
}

/// `i^n` exactly.
pub(crate) fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn exponential_integral_reference_values() {
        // (n, w, Re, Im) of E_n(-iw).
        let table = [
            (1, 0.7, -0.100_514_707_008_897_78, 0.889_574_087_678_285_35),
            (1, -0.4, 0.378_809_346_425_244_28, -1.174_334_862_043_523_7),
            (1, 5.3, 0.165_505_958_558_927_27, 0.073_481_263_219_565_45),
            (1, -12.0, 0.049_780_006_884_113_676, -0.065_825_085_268_523_25),
            (3, 0.2, 0.449_322_243_927_659_05, 0.169_916_518_416_281_52),
            (4, -2.5, -0.222_834_183_012_492_43, 0.013_271_368_016_672_045),
            (6, 9.0, -0.075_087_981_639_561_23, -0.051_386_835_085_391_25),
            (2, 1.5, -0.298_431_991_766_462_5, 0.291_960_510_810_954_6),
        ];
        for (n, w, re, im) in table {
            let v = power_fourier_tail(n, w);
            assert!((v.re - re).abs() < 1e-13 && (v.im - im).abs() < 1e-13, "E_{n}(-i{w}) = {v}");
        }
    }

    #[test]
    fn unit_interval_matches_quadrature() {
        for m in 0..7 {
            for &w in &[0.0, 0.3, -1.9, 2.1, -7.0, 25.0] {
                let v = power_fourier_unit(m, w);
                let re = quad::gl_panels(|s| s.powi(m as i32) * (w * s).cos(), 0.0, 1.0, 20, 20);
                let im = quad::gl_panels(|s| s.powi(m as i32) * (w * s).sin(), 0.0, 1.0, 20, 20);
                assert!((v.re - re).abs() < 1e-13 && (v.im - im).abs() < 1e-13, "m={m} w={w}: {v}");
            }
        }
    }

    #[test]
    fn powers_of_i() {
        for n in -9..9 {
            let want = Complex64::new(0.0, 1.0).powi(n as i32);
            assert!((i_pow(n) - want).norm() < 1e-15);
        }
    }
}
