//! Roots of the rational functions behind rank-one eigenvalue updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Poles closer than this (relative to their scale) are merged.
const MERGE_GAP: f64 = 1e-12;
const BISECT_REL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SecularForm {
    /// `lambda - border - sum w_i / (lambda - d_i)`: eigenvalues of a Hermitian
    /// matrix bordered by one row and column.
    GueBordered { border: f64 },
    /// `1 - sum w_i / (lambda - d_i) - zero_weight / lambda`: eigenvalues after
    /// adding `x x^dagger` to a positive semidefinite matrix whose remaining
    /// eigenvalues are zero.
    LueUpdate { zero_weight: f64 },
    /// `sum w_i / (lambda - d_i)`: nonzero eigenvalues after a corank-1
    /// projection.
    Projection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecularProblem {
    pub poles: Vec<f64>,
    pub weights: Vec<f64>,
    pub form: SecularForm,
}

/// Roots together with the number of pole pairs merged on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularRoots {
    pub roots: Vec<f64>,
    pub merged_poles: usize,
}

impl SecularProblem {
    pub fn new(poles: Vec<f64>, weights: Vec<f64>, form: SecularForm) -> Result<SecularProblem> {
        let p = SecularProblem { poles, weights, form };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.poles.len() != self.weights.len() {
            return Err(Error::Argument("poles and weights differ in length".into()));
        }
        if self.poles.iter().chain(&self.weights).any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite pole or weight".into()));
        }
        if self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::Argument("secular weights must be positive".into()));
        }
        if self.poles.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Argument("poles must be sorted".into()));
        }
        match self.form {
            SecularForm::GueBordered { border } if !border.is_finite() => {
                Err(Error::Argument("border must be finite".into()))
            }
            SecularForm::LueUpdate { zero_weight } => {
                if !(zero_weight >= 0.0) || !zero_weight.is_finite() {
                    return Err(Error::Argument("zero-pole weight must be >= 0".into()));
                }
                if self.poles.iter().any(|&d| d <= 0.0) {
                    return Err(Error::Argument("update poles must be positive".into()));
                }
                Ok(())
            }
            SecularForm::Projection if self.poles.is_empty() => {
                Err(Error::Argument("projection needs at least one pole".into()))
            }
            _ => Ok(()),
        }
    }

    /// Value of the secular function at `lambda`.
    pub fn eval(&self, lambda: f64) -> f64 {
        let s: f64 = self.poles.iter().zip(&self.weights).map(|(d, w)| w / (lambda - d)).sum();
        match self.form {
            SecularForm::GueBordered { border } => lambda - border - s,
            SecularForm::LueUpdate { zero_weight } => 1.0 - s - zero_weight / lambda,
            SecularForm::Projection => s,
        }
    }
}

// Working form: c0 + c1 * lambda - sign * sum w_i / (lambda - d_i), with the
// zero pole of the update form folded into the pole list.
struct Normalized {
    poles: Vec<f64>,
    weights: Vec<f64>,
    c0: f64,
    c1: f64,
    // +1: increasing between poles; -1: decreasing (projection).
    sign: f64,
}

impl Normalized {
    // f evaluated at origin + delta, with lambda - d_i = (origin - d_i) + delta.
    fn eval_at(&self, origin: f64, delta: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for (d, w) in self.poles.iter().zip(&self.weights) {
            let r = (origin - d) + delta;
            s += w / r;
            ds += w / (r * r);
        }
        let lambda = origin + delta;
        let f = self.c0 + self.c1 * lambda - self.sign * s;
        let df = self.c1 + self.sign * ds;
        (f, df)
    }
}

/// All real roots, sorted. Roots strictly interlace the (merged) poles; the
/// bordered form has one root beyond each end, the update form one beyond
/// the largest pole.
pub fn secular_roots(prob: &SecularProblem) -> Result<Vec<f64>> {
    Ok(secular_roots_detailed(prob)?.roots)
}

pub fn secular_roots_detailed(prob: &SecularProblem) -> Result<SecularRoots> {
    prob.validate()?;
    let (mut poles, mut weights) = (prob.poles.clone(), prob.weights.clone());
    let (c0, c1, sign) = match prob.form {
        SecularForm::GueBordered { border } => (-border, 1.0, 1.0),
        SecularForm::LueUpdate { zero_weight } => {
            if zero_weight > 0.0 {
                poles.insert(0, 0.0);
                weights.insert(0, zero_weight);
            }
            (1.0, 0.0, 1.0)
        }
        SecularForm::Projection => (0.0, 0.0, -1.0),
    };

    // Merge near-coincident poles; each merge leaves a root at the pole.
    let mut merged_roots = Vec::new();
    let mut mp: Vec<f64> = Vec::with_capacity(poles.len());
    let mut mw: Vec<f64> = Vec::with_capacity(poles.len());
    for (d, w) in poles.into_iter().zip(weights) {
        if let Some(&last) = mp.last() {
            if d - last <= MERGE_GAP * last.abs().max(d.abs()).max(1.0) {
                *mw.last_mut().unwrap() += w;
                merged_roots.push(last);
                continue;
            }
        }
        mp.push(d);
        mw.push(w);
    }
    let merged_poles = merged_roots.len();
    let f = Normalized {
        poles: mp,
        weights: mw,
        c0,
        c1,
        sign,
    };
    let m = f.poles.len();
    let total_w: f64 = f.weights.iter().sum();

    let mut roots = merged_roots;
    // Interior brackets.
    for i in 0..m.saturating_sub(1) {
        roots.push(bracket_root(&f, f.poles[i], f.poles[i + 1])?);
    }
    match prob.form {
        SecularForm::GueBordered { border } => {
            if m == 0 {
                roots.push(border);
            } else {
                let reach = total_w.sqrt() + 1.0;
                let lo = f.poles[0].min(border) - reach;
                let hi = f.poles[m - 1].max(border) + reach;
                roots.push(exterior_root(&f, lo, f.poles[0], false)?);
                roots.push(exterior_root(&f, f.poles[m - 1], hi, true)?);
            }
        }
        SecularForm::LueUpdate { .. } => {
            if m == 0 {
                return Err(Error::Argument("update with no weight has no root".into()));
            }
            let hi = f.poles[m - 1] + total_w * (1.0 + 1e-12) + f64::MIN_POSITIVE;
            roots.push(exterior_root(&f, f.poles[m - 1], hi, true)?);
        }
        SecularForm::Projection => {}
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SecularRoots { roots, merged_poles })
}

// Root in (lo, hi) between two poles, where f runs from -sign*inf to +sign*inf.
fn bracket_root(f: &Normalized, lo: f64, hi: f64) -> Result<f64> {
    let gap = hi - lo;
    // Decide which half holds the root, then work in the offset from the
    // nearer pole so small distances keep full relative accuracy.
    let (fm, _) = f.eval_at(lo, 0.5 * gap);
    let left_half = f.sign * fm > 0.0;
    let (origin, mut a, mut b) = if left_half { (lo, 0.0, 0.5 * gap) } else { (hi, -0.5 * gap, 0.0) };
    if fm == 0.0 {
        return Ok(lo + 0.5 * gap);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b || (b - a) <= BISECT_REL * a.abs().max(b.abs()) {
            break;
        }
        let (fv, _) = f.eval_at(origin, mid);
        if fv == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if f.sign * fv > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let delta = newton_polish(f, origin, a, b);
    let root = origin + delta;
    if !(root >= lo && root <= hi) {
        return Err(Error::numeric(format!("secular root escaped bracket ({lo}, {hi})"), None));
    }
    // A root closer to a pole than one ulp rounds onto it; keep it strictly inside.
    Ok(root.clamp(lo.next_up(), hi.next_down()))
}

// Root beyond the outermost pole; `right` selects (pole, far) vs (far, pole).
fn exterior_root(f: &Normalized, lo: f64, hi: f64, right: bool) -> Result<f64> {
    let origin = if right { lo } else { hi };
    let (mut a, mut b) = (lo - origin, hi - origin);
    // Guard: grow the far end until the sign is right.
    let mut grow = 0;
    loop {
        let far = if right { b } else { a };
        let (fv, _) = f.eval_at(origin, far);
        let ok = if right { f.sign * fv > 0.0 } else { f.sign * fv < 0.0 };
        if ok {
            break;
        }
        grow += 1;
        if grow > 200 {
            return Err(Error::numeric("could not bracket exterior secular root", None));
        }
        if right {
            b = 2.0 * b + 1.0;
        } else {
            a = 2.0 * a - 1.0;
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b || (b - a) <= BISECT_REL * a.abs().max(b.abs()) {
            break;
        }
        let (fv, _) = f.eval_at(origin, mid);
        if fv == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if f.sign * fv > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(origin + newton_polish(f, origin, a, b))
}

// Two Newton steps from the bracket midpoint, rejected if they leave [a, b].
fn newton_polish(f: &Normalized, origin: f64, a: f64, b: f64) -> f64 {
    let mut x = 0.5 * (a + b);
    if a == b {
        return x;
    }
    for _ in 0..2 {
        let (fv, dfv) = f.eval_at(origin, x);
        if fv == 0.0 || dfv == 0.0 || !dfv.is_finite() {
            break;
        }
        let next = x - fv / dfv;
        if next >= a && next <= b {
            x = next;
        } else {
            break;
        }
    }
    x
}
