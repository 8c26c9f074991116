//! Biorthogonality of the dual polynomials `Phi^n_j` and the functions
//! `Psi^n_k` (`k >= 0`): `int Phi^n_j Psi^n_k = delta_{jk}`.
//!
//! In double precision this integral cannot be resolved to much better than
//! `eps * sqrt(N_k / N_j)` in absolute terms (about 3e-6 for Hermite degree
//! 19 against degree 0), because the integrand's `L^1` mass dwarfs the zero
//! it integrates to. The check therefore evaluates the same prefactors and
//! the same three-term recurrences in double-double arithmetic, integrates
//! with an `n+1`-point Gauss rule for the shifted weight (nodes refined by
//! Newton's method in double-double), and separately bounds the deviation of
//! the production `psi` / `phi_cap` values from the extended evaluation at
//! the quadrature nodes.

use nalgebra::{DMatrix, SymmetricEigen};
use twofloat::TwoFloat;

use super::{dual_prefactor, e_log, parity, phi_cap_log, psi_log, ProcessSpec};
use crate::error::{Error, Result};
use crate::logval::LogValue;
use crate::orthopoly::EnsembleKind;

type Tf = TwoFloat;

#[derive(Debug, Clone)]
pub struct BiorthoCheck {
    pub n: usize,
    /// `[int Phi^n_j Psi^n_k]_{j,k < n}`.
    pub matrix: DMatrix<f64>,
    /// `max |matrix - I|`.
    pub max_error: f64,
    /// Largest Gauss-weighted deviation of the production polynomial parts
    /// of `psi` and `phi_cap` from the double-double values at the nodes.
    pub max_pointwise_deviation: f64,
}

fn tf(v: f64) -> Tf {
    Tf::from(v)
}

// `TwoFloat` division is only accurate to double precision; two correction
// steps on the remainder restore double-double accuracy.
fn div(a: Tf, b: Tf) -> Tf {
    let q1 = a.hi() / b.hi();
    let r = a - b * tf(q1);
    let q2 = r.hi() / b.hi();
    let r = r - b * tf(q2);
    let q3 = r.hi() / b.hi();
    tf(q1) + tf(q2) + tf(q3)
}

fn to_f64(v: Tf) -> f64 {
    v.hi() + v.lo()
}

struct DdFamily {
    kind: EnsembleKind,
    alpha: Tf,
    beta: Tf,
}

impl DdFamily {
    // p_{k+1} = (a y + b) p_k - c p_{k-1}
    fn coeffs(&self, k: usize) -> (Tf, Tf, Tf) {
        let kf = tf(k as f64);
        let one = tf(1.0);
        let two = tf(2.0);
        match self.kind {
            EnsembleKind::Gaussian => (two, tf(0.0), two * kf),
            EnsembleKind::Laguerre => {
                let d = kf + one;
                (-div(one, d), div(two * kf + one + self.alpha, d), div(kf + self.alpha, d))
            }
            EnsembleKind::Jacobi => {
                let (a, b) = (self.alpha, self.beta);
                let (ak, bk, ck) = if k == 0 {
                    (div(a + b + two, two), div(a - b, two), tf(0.0))
                } else {
                    let s = two * kf + a + b;
                    let d = (kf + one) * (kf + a + b + one);
                    (
                        div((s + one) * (s + two), two * d),
                        div((s + one) * (a * a - b * b), two * d * s),
                        div((kf + a) * (kf + b) * (s + two), d * s),
                    )
                };
                // t = 1 - 2y
                (-(two * ak), ak + bk, ck)
            }
        }
    }

    // N_k / N_{k-1}
    fn norm_step(&self, k: usize) -> Tf {
        let kf = tf(k as f64);
        let one = tf(1.0);
        match self.kind {
            EnsembleKind::Gaussian => tf(2.0) * kf,
            EnsembleKind::Laguerre => div(kf + self.alpha, kf),
            EnsembleKind::Jacobi => {
                let (a, b) = (self.alpha, self.beta);
                if k == 1 {
                    div((a + one) * (b + one), a + b + tf(3.0))
                } else {
                    let n = kf - one;
                    div(
                        (n + a + one) * (n + b + one) * (tf(2.0) * n + a + b + one),
                        (n + one) * (n + a + b + one) * (tf(2.0) * n + a + b + tf(3.0)),
                    )
                }
            }
        }
    }

    // p_0..p_m at y, and p_m'(y)
    fn eval(&self, m: usize, y: Tf) -> (Vec<Tf>, Tf) {
        let mut p = vec![tf(1.0)];
        let mut prev = tf(0.0);
        let mut cur = tf(1.0);
        let mut dprev = tf(0.0);
        let mut dcur = tf(0.0);
        for k in 0..m {
            let (a, b, c) = self.coeffs(k);
            let next = (a * y + b) * cur - c * prev;
            let dnext = a * cur + (a * y + b) * dcur - c * dprev;
            prev = cur;
            cur = next;
            dprev = dcur;
            dcur = dnext;
            p.push(cur);
        }
        (p, dcur)
    }
}

/// Computes `[int Phi^n_j Psi^n_k]` for `j, k < n` in double-double precision.
pub fn biorthogonality_check(proc: &ProcessSpec, n: usize) -> Result<BiorthoCheck> {
    proc.check_species(n)?;
    let fam = proc.family(n);
    let dd = DdFamily {
        kind: fam.kind(),
        alpha: tf(proc.ensemble.a) + tf(fam.shift as f64),
        beta: tf(proc.ensemble.b) + tf(fam.shift as f64),
    };
    let m = n + 1;

    // Relative norms R_k = N_k / N_0.
    let mut rel_norm = vec![tf(1.0)];
    for k in 1..=m {
        let last = rel_norm[k - 1];
        rel_norm.push(last * dd.norm_step(k));
    }

    // Initial nodes: eigenvalues of the symmetric Jacobi matrix.
    let mut jm = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let (a, b, _) = dd.coeffs(k);
        jm[(k, k)] = -to_f64(b) / to_f64(a);
        if k + 1 < m {
            let off = to_f64(dd.norm_step(k + 1)).sqrt() / to_f64(a).abs();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut guesses: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    guesses.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for g in guesses {
        let mut y = tf(g);
        for _ in 0..4 {
            let (p, dp) = dd.eval(m, y);
            y -= div(p[m], dp);
        }
        let (p, _) = dd.eval(m, y);
        let mut christoffel = tf(0.0);
        for k in 0..m {
            christoffel += div(p[k] * p[k], rel_norm[k]);
        }
        nodes.push(y);
        weights.push(div(tf(1.0), christoffel));
        values.push(p);
    }
    for w in &nodes {
        if !to_f64(*w).is_finite() {
            return Err(Error::numeric("Gauss node refinement diverged", None));
        }
    }

    let big_n = proc.n;
    let shift = big_n - n;
    let spec = &proc.ensemble;
    let mut matrix = DMatrix::zeros(n, n);
    let mut max_error = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let mut acc = tf(0.0);
            for i in 0..m {
                acc += weights[i] * values[i][j] * values[i][k];
            }
            acc = div(acc, rel_norm[j]);
            // e_k e_{shift+j} / (e_{shift+k} e_j); the (-1)^{N-n} factors cancel.
            let pref = (e_log(spec, k) * e_log(spec, shift + j) / e_log(spec, shift + k) / e_log(spec, j)).to_f64();
            let v = pref * to_f64(acc);
            matrix[(j, k)] = v;
            let want = if j == k { 1.0 } else { 0.0 };
            max_error = max_error.max((v - want).abs());
        }
    }

    // Production values at the nodes against the double-double polynomials.
    let mut max_dev = 0.0f64;
    for i in 0..m {
        let y = to_f64(nodes[i]);
        let lw = fam.ln_weight(y);
        let scale = to_f64(weights[i]).sqrt();
        for k in 0..n {
            let dd_p = to_f64(values[i][k]);
            let unit = to_f64(rel_norm[k]).sqrt();
            let psi_pref = LogValue::new(parity(shift), lw) * e_log(spec, k) / e_log(spec, shift + k);
            let from_psi = (psi_log(proc, n, k as i64, y)? / psi_pref).to_f64();
            let from_phi = (phi_cap_log(proc, n, k, y)? / dual_prefactor(proc, n, k)).to_f64();
            for v in [from_psi, from_phi] {
                max_dev = max_dev.max((v - dd_p).abs() / unit * scale);
            }
        }
    }
    Ok(BiorthoCheck {
        n,
        matrix,
        max_error,
        max_pointwise_deviation: max_dev,
    })
}
