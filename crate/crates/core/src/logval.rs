//! Signed log-magnitude numbers, used wherever factorial ratios or shifted
//! weights would leave the double-precision range.

use std::ops::{Div, Mul, Neg};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    /// -1, 0 or +1.
    pub sign: f64,
    /// ln|value|; -inf for zero.
    pub ln: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0.0,
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue { sign: 1.0, ln: 0.0 };

    pub fn new(sign: f64, ln: f64) -> Self {
        if sign == 0.0 || ln == f64::NEG_INFINITY {
            LogValue::ZERO
        } else {
            LogValue { sign: sign.signum(), ln }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                sign: v.signum(),
                ln: v.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0.0
    }

    pub fn abs(self) -> Self {
        LogValue {
            sign: self.sign.abs(),
            ln: self.ln,
        }
    }

    pub fn sqrt_abs(self) -> Self {
        if self.is_zero() {
            LogValue::ZERO
        } else {
            LogValue {
                sign: 1.0,
                ln: 0.5 * self.ln,
            }
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, o: LogValue) -> LogValue {
        if self.is_zero() || o.is_zero() {
            LogValue::ZERO
        } else {
            LogValue {
                sign: self.sign * o.sign,
                ln: self.ln + o.ln,
            }
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, o: LogValue) -> LogValue {
        assert!(!o.is_zero(), "division by a zero LogValue");
        if self.is_zero() {
            LogValue::ZERO
        } else {
            LogValue {
                sign: self.sign * o.sign,
                ln: self.ln - o.ln,
            }
        }
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            sign: -self.sign,
            ln: self.ln,
        }
    }
}

/// Sum of signed log values. Also returns ln of the largest term magnitude,
/// which callers use to judge cancellation.
pub fn log_sum(terms: &[LogValue]) -> (LogValue, f64) {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (LogValue::ZERO, max);
    }
    let mut s = 0.0;
    for t in terms {
        if !t.is_zero() {
            s += t.sign * (t.ln - max).exp();
        }
    }
    let v = LogValue::from_f64(s);
    (LogValue::new(v.sign, v.ln + max), max)
}
