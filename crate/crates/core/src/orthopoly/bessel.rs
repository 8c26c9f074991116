//! Bessel function of the first kind `J_nu(x)` for real `nu > -1`, `x >= 0`.
//!
//! Small arguments use the ascending series. Otherwise Miller's backward
//! recurrence runs over the orders `mu + n` (`mu` the fractional part of `nu`)
//! and is normalized with `(x/2)^mu = sum_k (mu + 2k) Gamma(mu + k) / k! J_{mu+2k}(x)`.
//! Negative orders take one downward recurrence step from `nu + 1`, `nu + 2`.

use statrs::function::gamma::ln_gamma;

pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu > -1.0 && x >= 0.0, "bessel_j needs nu > -1 and x >= 0");
    if x == 0.0 {
        return match nu {
            0.0 => 1.0,
            v if v > 0.0 => 0.0,
            _ => f64::INFINITY,
        };
    }
    if x <= 2.0 {
        series(nu, x)
    } else if nu < 0.0 {
        2.0 * (nu + 1.0) / x * miller(nu + 1.0, x) - miller(nu + 2.0, x)
    } else {
        miller(nu, x)
    }
}

fn series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum * (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp()
}

fn miller(nu: f64, x: f64) -> f64 {
    let mu = nu.fract();
    let top = nu.floor() as usize;
    let start = (nu.max(x) + 30.0 + 4.0 * nu.max(x).cbrt()).ceil() as usize + 10;
    // Weights c_k = (mu + 2k) Gamma(mu + k) / k! of the even-offset orders,
    // tracked in logs.
    let weight = |k: usize| -> f64 {
        let kf = k as f64;
        if mu == 0.0 {
            if k == 0 {
                1.0
            } else {
                2.0
            }
        } else {
            (mu + 2.0 * kf) * (ln_gamma(mu + kf) - ln_gamma(kf + 1.0)).exp()
        }
    };
    let mut next = 0.0f64; // J~_{n+1}
    let mut cur = 1e-300f64; // J~_n
    let mut norm = 0.0f64;
    let mut want = 0.0f64;
    for n in (0..=start).rev() {
        if n == top {
            want = cur;
        }
        if n % 2 == 0 {
            norm += weight(n / 2) * cur;
        }
        if n == 0 {
            break;
        }
        let prev = 2.0 * (mu + n as f64) / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            want *= 1e-250;
        }
    }
    want * (mu * (0.5 * x).ln()).exp() / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use std::f64::consts::PI;

    // Bessel's integral: J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt
    //   - sin(nu pi)/pi int_0^inf e^{-x sinh t - nu t} dt.
    fn integral_oracle(nu: f64, x: f64) -> f64 {
        let panels = 40 + (x + nu) as usize;
        let first = quad::gl_panels(|t| (nu * t - x * t.sin()).cos(), 0.0, PI, panels, 30) / PI;
        let tail = if nu.fract() == 0.0 {
            0.0
        } else {
            quad::gl_panels(|t| (-x * t.sinh() - nu * t).exp(), 0.0, 12.0, 200, 20)
        };
        first - (nu * PI).sin() / PI * tail
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0), 1.0);
        assert_eq!(bessel_j(1.0, 0.0), 0.0);
        assert!(bessel_j(0.0, 2.404_825_6).abs() < 1e-6);
    }

    #[test]
    fn matches_integral_representation() {
        for &nu in &[0.0, 0.5, 1.0, 2.3, 7.0, 12.75, 30.0, 50.0] {
            for &x in &[0.3, 1.9, 2.1, 5.0, 17.3, 42.0, 77.7, 100.0] {
                let got = bessel_j(nu, x);
                let want = integral_oracle(nu, x);
                assert!((got - want).abs() < 1e-10, "J_{nu}({x}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        for &x in &[0.5, 3.0, 25.0, 99.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((bessel_j(0.5, x) - want).abs() < 1e-13);
            let want = (2.0 / (PI * x)).sqrt() * x.cos();
            assert!((bessel_j(-0.5, x) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_orders() {
        for &nu in &[-0.75, -0.3, -0.01] {
            for &x in &[0.4, 1.9, 2.1, 7.5, 30.0] {
                let got = bessel_j(nu, x);
                let want = integral_oracle(nu, x);
                assert!((got - want).abs() < 1e-10, "J_{nu}({x}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if bessel_j(0.0, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
    }
}
