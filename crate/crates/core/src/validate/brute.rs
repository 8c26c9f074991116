//! Correlations by direct integration of the joint density of all species,
//! `prod_l w(x_l^{(N)}) prod_{j<k} (x_j^{(N)} - x_k^{(N)})` on the interlacing
//! region, with the normalization found the same way.
//!
//! Coordinates are integrated top species first. Given everything outside it,
//! a coordinate ranges between the nearest fixed or already-integrated values
//! below and above it in the interlacing order, so the nested bounds are exact.
//! The integrand depends on the top species only; the lower species contribute
//! piecewise-polynomial volumes whose kinks sit at target positions, and every
//! range is split there.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{ProcessSpec, SpeciesPoint};
use crate::orthopoly::{EnsembleKind, ShiftedFamily};
use crate::quad::{gauss_legendre, GaussRule};

/// Largest `N` handled.
pub const BRUTE_FORCE_MAX_N: usize = 3;
/// Largest number of integrated coordinates for a correlation.
pub const BRUTE_FORCE_MAX_DIM: usize = 5;

const TOP_ORDER: usize = 14;
// Lower-species volumes are polynomials of degree <= 3 on each piece for N <= 3.
const LOWER_ORDER: usize = 3;

struct Layout {
    n: usize,
    /// `(species, index)` with index 1 the largest particle.
    coords: Vec<(usize, usize)>,
    /// `less[u][v]`: `x_u < x_v` on the interlacing region.
    less: Vec<Vec<bool>>,
}

impl Layout {
    fn new(n: usize) -> Self {
        let mut coords = Vec::new();
        for s in (1..=n).rev() {
            for i in 1..=s {
                coords.push((s, i));
            }
        }
        let m = coords.len();
        let id = |s: usize, i: usize| coords.iter().position(|&c| c == (s, i)).unwrap();
        let mut less = vec![vec![false; m]; m];
        for s in 1..n {
            for i in 1..=s {
                // x_{i+1}^{(s+1)} < x_i^{(s)} < x_i^{(s+1)}
                less[id(s, i)][id(s + 1, i)] = true;
                less[id(s + 1, i + 1)][id(s, i)] = true;
            }
        }
        for k in 0..m {
            for a in 0..m {
                for b in 0..m {
                    if less[a][k] && less[k][b] {
                        less[a][b] = true;
                    }
                }
            }
        }
        Layout { n, coords, less }
    }

    fn index(&self, s: usize, i: usize) -> usize {
        self.coords.iter().position(|&c| c == (s, i)).unwrap()
    }
}

struct Integrator<'a> {
    layout: &'a Layout,
    family: ShiftedFamily,
    support: (f64, f64),
    panel: f64,
    /// Whether the weight has a power factor at the lower / upper support end.
    graded: (bool, bool),
    breaks: Vec<f64>,
    top_rule: Arc<GaussRule>,
    lower_rule: Arc<GaussRule>,
}

impl Integrator<'_> {
    fn integrand(&self, vals: &[f64]) -> f64 {
        let top = &vals[..self.layout.n];
        let mut v = 1.0;
        for j in 0..top.len() {
            v *= self.family.weight(top[j]);
            for k in j + 1..top.len() {
                v *= top[j] - top[k];
            }
        }
        v
    }

    fn bounds(&self, v: usize, vals: &[f64], known: &[bool]) -> (f64, f64) {
        let (mut lo, mut hi) = self.support;
        for u in 0..vals.len() {
            if !known[u] {
                continue;
            }
            if self.layout.less[u][v] {
                lo = lo.max(vals[u]);
            }
            if self.layout.less[v][u] {
                hi = hi.min(vals[u]);
            }
        }
        (lo, hi)
    }

    // Splits [lo, hi] at the target values and, for the top species, into
    // panels no wider than `self.panel`.
    fn pieces(&self, lo: f64, hi: f64, top: bool) -> Vec<(f64, f64)> {
        let mut cuts = vec![lo];
        cuts.extend(self.breaks.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let panels = if top { ((w[1] - w[0]) / self.panel).ceil().max(1.0) as usize } else { 1 };
            let h = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let (a, b) = (w[0] + p as f64 * h, w[0] + (p + 1) as f64 * h);
                if top && a == self.support.0 && self.graded.0 {
                    graded(a, b, &mut out);
                } else if top && b == self.support.1 && self.graded.1 {
                    let start = out.len();
                    graded(-b, -a, &mut out);
                    for piece in &mut out[start..] {
                        *piece = (-piece.1, -piece.0);
                    }
                } else {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn nodes(&self, v: usize, vals: &[f64], known: &[bool]) -> Vec<(f64, f64)> {
        let (lo, hi) = self.bounds(v, vals, known);
        if !(lo < hi) {
            return Vec::new();
        }
        let top = self.layout.coords[v].0 == self.layout.n;
        let rule = if top { &self.top_rule } else { &self.lower_rule };
        let mut out = Vec::new();
        for (a, b) in self.pieces(lo, hi, top) {
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((c + h * x, w * h));
            }
        }
        out
    }

    // The top species precede all lower ones in `order`, so the weight is
    // evaluated once the last free top coordinate is placed.
    fn integrate(&self, order: &[usize], vals: &mut Vec<f64>, known: &mut Vec<bool>) -> f64 {
        let Some((&v, rest)) = order.split_first() else {
            return 1.0;
        };
        let last_top = self.is_top(v) && rest.first().is_none_or(|&u| !self.is_top(u));
        let mut sum = 0.0;
        for (x, w) in self.nodes(v, vals, known) {
            vals[v] = x;
            known[v] = true;
            let inner = self.integrate(rest, vals, known);
            sum += w * if last_top { inner * self.integrand(vals) } else { inner };
        }
        known[v] = false;
        sum
    }

    fn is_top(&self, v: usize) -> bool {
        self.layout.coords[v].0 == self.layout.n
    }

    /// Integral over the free coordinates with `fixed` pinned, parallel over
    /// the outermost coordinate.
    fn run(&self, fixed: &[(usize, f64)]) -> f64 {
        let m = self.layout.coords.len();
        let mut vals = vec![0.0; m];
        let mut known = vec![false; m];
        for &(u, x) in fixed {
            vals[u] = x;
            known[u] = true;
        }
        // Feasibility of the pinned values themselves.
        for &(u, xu) in fixed {
            for &(v, xv) in fixed {
                if self.layout.less[u][v] && !(xu < xv) {
                    return 0.0;
                }
            }
        }
        let order: Vec<usize> = (0..m).filter(|u| !known[*u]).collect();
        // With every top coordinate pinned the weight is a constant factor.
        let pinned = if order.first().is_none_or(|&u| !self.is_top(u)) { self.integrand(&vals) } else { 1.0 };
        let Some((&first, rest)) = order.split_first() else {
            return pinned;
        };
        let nodes = self.nodes(first, &vals, &known);
        let last_top = self.is_top(first) && rest.first().is_none_or(|&u| !self.is_top(u));
        let total: f64 = nodes
            .into_par_iter()
            .map(|(x, w)| {
                let mut vals = vals.clone();
                let mut known = known.clone();
                vals[first] = x;
                known[first] = true;
                let inner = self.integrate(rest, &mut vals, &mut known);
                w * if last_top { inner * self.integrand(&vals) } else { inner }
            })
            .sum();
        pinned * total
    }
}

// Panels of [a, b] shrinking geometrically toward `a`, where the weight
// behaves like a non-integer power.
fn graded(a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    const RATIO: f64 = 0.15;
    const LEVELS: i32 = 12;
    let h = b - a;
    out.push((a, a + h * RATIO.powi(LEVELS)));
    for k in (0..LEVELS).rev() {
        out.push((a + h * RATIO.powi(k + 1), a + h * RATIO.powi(k)));
    }
}

// Truncation of unbounded supports where the weight times the largest
// Vandermonde-type growth drops below 1e-16.
fn effective_support(proc: &ProcessSpec) -> (f64, f64) {
    let n = proc.n as f64;
    let e = &proc.ensemble;
    match e.kind {
        EnsembleKind::Gaussian => {
            let mut l = 3.0f64;
            while -l * l + 2.0 * n * (2.0 * l).ln() > -37.0 {
                l += 0.25;
            }
            (-l, l)
        }
        EnsembleKind::Laguerre => {
            let mut l = 10.0f64;
            while -l + (e.a + 2.0 * n) * l.ln() > -37.0 {
                l += 1.0;
            }
            (0.0, l)
        }
        EnsembleKind::Jacobi => (0.0, 1.0),
    }
}

fn panel_width(proc: &ProcessSpec) -> f64 {
    match proc.ensemble.kind {
        EnsembleKind::Gaussian => 1.5,
        EnsembleKind::Laguerre => 2.5,
        EnsembleKind::Jacobi => 0.1,
    }
}

/// Brute-force correlations of one process, with the normalization of the
/// joint density computed once.
pub struct BruteForceOracle {
    proc: ProcessSpec,
    layout: Layout,
    norm: f64,
}

impl BruteForceOracle {
    pub fn new(proc: &ProcessSpec) -> Result<Self> {
        if proc.n > BRUTE_FORCE_MAX_N {
            return Err(Error::Argument(format!("brute force needs N <= {BRUTE_FORCE_MAX_N}, got {}", proc.n)));
        }
        let mut oracle = BruteForceOracle {
            proc: *proc,
            layout: Layout::new(proc.n),
            norm: 1.0,
        };
        oracle.norm = oracle.integrator(Vec::new()).run(&[]);
        if !(oracle.norm > 0.0 && oracle.norm.is_finite()) {
            return Err(Error::numeric("joint density normalization is not positive", Some(oracle.norm)));
        }
        Ok(oracle)
    }

    fn integrator(&self, breaks: Vec<f64>) -> Integrator<'_> {
        Integrator {
            layout: &self.layout,
            family: self.proc.family(self.proc.n),
            support: effective_support(&self.proc),
            panel: panel_width(&self.proc),
            graded: match self.proc.ensemble.kind {
                EnsembleKind::Gaussian => (false, false),
                EnsembleKind::Laguerre => (true, false),
                EnsembleKind::Jacobi => (true, true),
            },
            breaks,
            top_rule: gauss_legendre(TOP_ORDER),
            lower_rule: gauss_legendre(LOWER_ORDER),
        }
    }

    /// The `r`-point correlation of `targets`.
    pub fn marginal(&self, targets: &[SpeciesPoint]) -> Result<f64> {
        let proc = &self.proc;
        let total = proc.n * (proc.n + 1) / 2;
        if targets.is_empty() || targets.len() > total || total - targets.len() > BRUTE_FORCE_MAX_DIM {
            return Err(Error::Argument(format!(
                "{} targets leave {} integrated coordinates (at most {BRUTE_FORCE_MAX_DIM})",
                targets.len(),
                total.saturating_sub(targets.len())
            )));
        }
        for p in targets {
            proc.check_point(p)?;
        }
        let integ = self.integrator(targets.iter().map(|p| p.y).collect());
        let mut sum = 0.0;
        for assignment in assignments(&self.layout, targets) {
            sum += integ.run(&assignment);
        }
        Ok(sum / self.norm)
    }
}

/// The `r`-point correlation of `targets` for `N <= 3` by direct quadrature of
/// the joint density over all other coordinates.
pub fn brute_force_marginal(proc: &ProcessSpec, targets: &[SpeciesPoint]) -> Result<f64> {
    BruteForceOracle::new(proc)?.marginal(targets)
}

// Every way of placing the targets on distinct particles of their species.
fn assignments(layout: &Layout, targets: &[SpeciesPoint]) -> Vec<Vec<(usize, f64)>> {
    let mut out = vec![Vec::new()];
    for p in targets {
        let mut next = Vec::new();
        for partial in &out {
            for i in 1..=p.s {
                let u = layout.index(p.s, i);
                if partial.iter().any(|&(v, _)| v == u) {
                    continue;
                }
                let mut a: Vec<(usize, f64)> = partial.clone();
                a.push((u, p.y));
                next.push(a);
            }
        }
        out = next;
    }
    out
}
