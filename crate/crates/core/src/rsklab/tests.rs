use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::quad::gl_panels;

fn geometric(n1: usize, n2: usize, z: f64, t: f64, alphas: &[f64]) -> LatticeConfig {
    LatticeConfig::new(
        n1,
        n2,
        alphas.len(),
        WeightModel::Geometric {
            z,
            t,
            alphas: alphas.to_vec(),
        },
    )
    .unwrap()
}

#[test]
fn rejects_bad_lattices() {
    let bad = LatticeConfig::new(2, 1, 1, WeightModel::Geometric { z: 1.2, t: 0.5, alphas: vec![0.5] });
    assert!(matches!(bad, Err(Error::Parameter(_))));
    let wrong_len = LatticeConfig::new(2, 1, 1, WeightModel::ExponentialJacobi { a: 1.0, a_s: vec![] });
    assert!(wrong_len.is_err());
    let neg = LatticeConfig::new(
        1,
        1,
        0,
        WeightModel::ExponentialInhomogeneous { pi: vec![-1.0], pi_hat: vec![0.5] },
    );
    assert!(neg.is_err());
}

#[test]
fn geometric_site_has_stated_atom_at_zero() {
    // Single site with parameter q = z^2.
    let cfg = geometric(1, 1, 0.6, 0.5, &[]);
    let q = 0.36;
    let draws = 200_000;
    let zeros = (0..draws)
        .filter(|&d| sample_lattice_draw(&cfg, 3, d).unwrap()[(0, 0)] == 0.0)
        .count() as f64;
    let p0 = zeros / draws as f64;
    let se = ((1.0 - q) * q / draws as f64).sqrt();
    assert!((p0 - (1.0 - q)).abs() < 4.0 * se, "{p0}");
}

#[test]
fn exponential_sites_are_nonnegative_and_deterministic() {
    let cfg = LatticeConfig::new(3, 2, 1, WeightModel::ExponentialJacobi { a: 0.7, a_s: vec![0.4] }).unwrap();
    let g = sample_lattice(&cfg, 5).unwrap();
    assert_eq!(g, sample_lattice(&cfg, 5).unwrap());
    assert!(g.iter().all(|&v| v >= 0.0));
    let h = LatticeConfig::new(4, 4, 0, WeightModel::ExponentialHomogeneous).unwrap();
    assert!(sample_lattice(&h, 1).unwrap().iter().all(|&v| v >= 0.0));
}

#[test]
fn inhomogeneous_site_means() {
    let pi = vec![0.5, 2.0];
    let pi_hat = vec![0.25, 1.0];
    let cfg = LatticeConfig::new(
        2,
        2,
        0,
        WeightModel::ExponentialInhomogeneous { pi: pi.clone(), pi_hat: pi_hat.clone() },
    )
    .unwrap();
    let draws = 1_000_000u64;
    let mut sum = DMatrix::<f64>::zeros(2, 2);
    let mut sq = DMatrix::<f64>::zeros(2, 2);
    for d in 0..draws {
        let g = sample_lattice_draw(&cfg, 17, d).unwrap();
        sum += &g;
        sq += g.component_mul(&g);
    }
    for i in 0..2 {
        for j in 0..2 {
            let n = draws as f64;
            let m = sum[(i, j)] / n;
            let se = ((sq[(i, j)] / n - m * m) / n).sqrt();
            let want = 1.0 / (pi[i] + pi_hat[j]);
            assert!((m - want).abs() < 3.0 * se, "({i},{j}): {m} vs {want}");
        }
    }
}

#[test]
fn last_passage_examples() {
    let one = DMatrix::from_element(1, 1, 2.5);
    assert_eq!(last_passage(&one, 1, 1).unwrap(), 2.5);
    // x11 = 1, x12 = 2, x21 = 3, x22 = 4: paths give 1+3+4 = 8 and 1+2+4 = 7.
    let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(last_passage(&g, 2, 2).unwrap(), 8.0);
    assert!(last_passage(&g, 3, 1).is_err());
    assert!(last_passage(&g, 0, 1).is_err());
}

proptest! {
    #[test]
    fn last_passage_is_monotone(vals in prop::collection::vec(0.0f64..5.0, 12)) {
        let g = DMatrix::from_row_slice(3, 4, &vals);
        let t = last_passage_table(&g, 3, 4).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                if i > 0 { prop_assert!(t[(i, j)] >= t[(i - 1, j)]); }
                if j > 0 { prop_assert!(t[(i, j)] >= t[(i, j - 1)]); }
            }
        }
    }
}

#[test]
fn rsk_of_zero_and_diagonal_grids() {
    let zero = DMatrix::<u64>::zeros(3, 2);
    let seq = rsk_shape_sequence(&zero, 1).unwrap();
    assert!(seq.shapes.iter().flatten().all(|&m| m == 0));
    let mut diag = DMatrix::<u64>::zeros(2, 2);
    diag[(0, 0)] = 1;
    diag[(1, 1)] = 1;
    let seq = rsk_shape_sequence(&diag, 1).unwrap();
    assert_eq!(seq.shapes, vec![vec![1], vec![2, 0]]);
}

// Largest total weight of a union of `l` pairwise disjoint up/right chains
// of sites, by enumerating site subsets. A subset is such a union iff its
// largest antichain (sites pairwise strictly NW/SE of each other) has at
// most `l` elements.
fn disjoint_path_passage(grid: &DMatrix<u64>, l: usize) -> u64 {
    let sites: Vec<(usize, usize)> = (0..grid.nrows()).flat_map(|i| (0..grid.ncols()).map(move |j| (i, j))).collect();
    let n = sites.len();
    assert!(n <= 9);
    let incomparable = |a: (usize, usize), b: (usize, usize)| (a.0 < b.0 && a.1 > b.1) || (a.0 > b.0 && a.1 < b.1);
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).collect();
        let mut width = 0;
        for sub in 0u32..(1 << members.len()) {
            let anti: Vec<usize> = (0..members.len()).filter(|&k| sub >> k & 1 == 1).map(|k| members[k]).collect();
            if anti.len() > width
                && anti.iter().enumerate().all(|(x, &a)| anti[x + 1..].iter().all(|&b| incomparable(sites[a], sites[b])))
            {
                width = anti.len();
            }
        }
        if width <= l {
            best = best.max(members.iter().map(|&k| grid[sites[k]]).sum());
        }
    }
    best
}

#[test]
fn rsk_rows_match_disjoint_path_enumeration() {
    let mut rng = crate::samplers::draw_rng(41, 0);
    for trial in 0..60 {
        let (r, c) = [(2, 2), (3, 2), (2, 3), (3, 3)][trial % 4];
        let grid = DMatrix::<u64>::from_fn(r, c, |_, _| rng.random_range(0..3));
        let seq = rsk_shape_sequence(&grid, 0).unwrap();
        let mu = seq.shapes.last().unwrap();
        let mut prev = 0;
        for l in 1..=mu.len() {
            let big_l = disjoint_path_passage(&grid, l);
            assert_eq!(mu[l - 1], big_l - prev, "grid {grid} row {l}");
            prev = big_l;
        }
    }
}

#[test]
fn first_row_is_last_passage_time() {
    let mut rng = crate::samplers::draw_rng(42, 0);
    for _ in 0..10_000 {
        let (r, c) = (rng.random_range(1..6), rng.random_range(1..6));
        let grid = DMatrix::<u64>::from_fn(r, c, |_, _| rng.random_range(0..4));
        let p = c - 1;
        let seq = rsk_shape_sequence(&grid, p).unwrap();
        let real = grid.map(|v| v as f64);
        for s in 0..=p {
            let lpp = last_passage(&real, r, 1 + s).unwrap();
            assert_eq!(seq.shapes[s][0] as f64, lpp);
        }
        assert!(seq.is_interlaced());
    }
}

#[test]
fn sampled_shapes_interlace() {
    let cfg = geometric(5, 2, 0.7, 0.8, &[0.9, 0.6, 0.5]);
    for d in 0..2000 {
        let g = to_counts(&sample_lattice_draw(&cfg, 9, d).unwrap()).unwrap();
        assert!(rsk_shape_sequence(&g, 3).unwrap().is_interlaced());
    }
}

// Schur polynomial by the bialternant formula.
fn schur(mu: &[u64], xs: &[f64]) -> f64 {
    let n = xs.len();
    if mu.iter().skip(n).any(|&m| m > 0) {
        return 0.0;
    }
    let part = |j: usize| mu.get(j).copied().unwrap_or(0) as i32;
    let num = DMatrix::from_fn(n, n, |i, j| xs[i].powi(part(j) + (n - 1 - j) as i32));
    let den = DMatrix::from_fn(n, n, |i, j| xs[i].powi((n - 1 - j) as i32));
    num.determinant() / den.determinant()
}

// Product of the single-shape law and the successive transition laws, with
// the Schur polynomials evaluated directly.
fn schur_product(n1: usize, n2: usize, z: f64, t: f64, alphas: &[f64], seq: &ShapeSequence) -> f64 {
    if !seq.is_interlaced() {
        return 0.0;
    }
    let a: Vec<f64> = (0..n1).map(|i| z * t.powi(i as i32)).collect();
    let b: Vec<f64> = (0..n2).map(|j| z * t.powi(j as i32)).collect();
    let mut v = schur(&seq.shapes[0], &a) * schur(&seq.shapes[0], &b);
    for ai in &a {
        for bj in &b {
            v *= 1.0 - ai * bj;
        }
    }
    for (s, al) in alphas.iter().enumerate() {
        let (mu, ka) = (&seq.shapes[s + 1], &seq.shapes[s]);
        let grow = mu.iter().sum::<u64>() - ka.iter().sum::<u64>();
        v *= a.iter().map(|ai| 1.0 - ai * al).product::<f64>() * schur(mu, &a) / schur(ka, &a) * al.powi(grow as i32);
    }
    v
}

fn partitions(len: usize, max: u64) -> Vec<Vec<u64>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=max {
        for mut rest in partitions(len - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn shape_sequences(n2: usize, p: usize, max: u64) -> Vec<ShapeSequence> {
    let mut seqs: Vec<Vec<Vec<u64>>> = partitions(n2, max).into_iter().map(|m| vec![m]).collect();
    for s in 1..=p {
        let mut next = Vec::new();
        for sq in &seqs {
            for mu in partitions(n2 + s, max) {
                let mut cand = sq.clone();
                cand.push(mu);
                if ShapeSequence::new(n2, cand.clone()).unwrap().is_interlaced() {
                    next.push(cand);
                }
            }
        }
        seqs = next;
    }
    seqs.into_iter().map(|s| ShapeSequence::new(n2, s).unwrap()).collect()
}

#[test]
fn discrete_joint_matches_schur_product_and_sums_to_one() {
    for &(n1, n2, p, cut) in &[(2, 1, 1, 14u64), (3, 1, 1, 12), (3, 2, 1, 9), (4, 1, 2, 9)] {
        let (z, t) = (0.3, 0.6);
        let alphas = [0.5, 0.4][..p].to_vec();
        let cfg = geometric(n1, n2, z, t, &alphas);
        let mut total = 0.0;
        let mut worst = 0.0f64;
        for seq in shape_sequences(n2, p, cut) {
            let v = eval_discrete_joint(&cfg, &seq).unwrap();
            let oracle = schur_product(n1, n2, z, t, &alphas, &seq);
            if oracle > 1e-12 {
                worst = worst.max((v / oracle - 1.0).abs());
            }
            total += v;
        }
        assert!(worst < 1e-10, "({n1},{n2},{p}) relative gap {worst}");
        // Largest site parameter is alpha_1 z = 0.15; the truncated tail is far below 1e-6.
        assert!((total - 1.0).abs() < 1e-6, "({n1},{n2},{p}) total {total}");
    }
}

#[test]
fn discrete_joint_is_zero_off_interlacing() {
    let cfg = geometric(2, 1, 0.3, 0.6, &[0.5]);
    // mu^(1) = (3, 2) over mu^(0) = (1): 2 > 1 breaks the horizontal strip.
    let seq = ShapeSequence::new(1, vec![vec![1], vec![3, 2]]).unwrap();
    assert!(!seq.is_interlaced());
    assert_eq!(eval_discrete_joint(&cfg, &seq).unwrap(), 0.0);
    assert!(ShapeSequence::new(1, vec![vec![1, 1]]).is_err());
    let expo = LatticeConfig::new(2, 1, 1, WeightModel::ExponentialHomogeneous).unwrap();
    assert!(eval_discrete_joint(&expo, &ShapeSequence::new(1, vec![vec![0], vec![0]]).unwrap()).is_err());
}

#[test]
fn shape_frequencies_match_discrete_joint() {
    let cfg = geometric(2, 1, 0.5, 0.7, &[0.6]);
    let draws = 1_000_000u64;
    let mut counts = std::collections::HashMap::<Vec<Vec<u64>>, u64>::new();
    for d in 0..draws {
        let g = to_counts(&sample_lattice_draw(&cfg, 23, d).unwrap()).unwrap();
        *counts.entry(rsk_shape_sequence(&g, 1).unwrap().shapes).or_default() += 1;
    }
    let cells: Vec<ShapeSequence> = shape_sequences(1, 1, 12)
        .into_iter()
        .filter(|s| eval_discrete_joint(&cfg, s).unwrap() * draws as f64 >= 100.0)
        .collect();
    assert!(cells.len() >= 10);
    // Bonferroni bound over the cells at family-wise level 1%.
    let z = statrs::distribution::ContinuousCDF::inverse_cdf(
        &statrs::distribution::Normal::standard(),
        1.0 - 0.005 / cells.len() as f64,
    );
    for seq in cells {
        let p = eval_discrete_joint(&cfg, &seq).unwrap();
        let f = *counts.get(&seq.shapes).unwrap_or(&0) as f64 / draws as f64;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((f - p).abs() < z * se, "{:?}: {f} vs {p}", seq.shapes);
    }
}

fn params(n1: usize, n2: usize, a: f64, a_s: &[f64]) -> JacobiLimitParams {
    JacobiLimitParams { n1, n2, a, a_s: a_s.to_vec() }
}

#[test]
fn continuum_density_is_zero_off_ordering() {
    let pr = params(3, 1, 0.7, &[0.4]);
    assert_eq!(eval_jacobi_limit_pdf(&pr, &[vec![1.2], vec![1.0, 0.3]]).unwrap(), 0.0);
    assert_eq!(eval_jacobi_limit_pdf(&pr, &[vec![0.6], vec![1.0, -0.3]]).unwrap(), 0.0);
    assert!(eval_jacobi_limit_pdf(&pr, &[vec![0.6, 0.1], vec![1.0, 0.3]]).is_err());
    assert!(eval_jacobi_limit_pdf(&pr, &[vec![0.6], vec![1.0, 0.3]]).unwrap() > 0.0);
}

#[test]
fn continuum_density_normalized_single_point() {
    for &(n1, a) in &[(1usize, 0.5), (3, 0.7), (5, 1.3)] {
        let pr = params(n1, 1, a, &[]);
        let total = gl_panels(|x| eval_jacobi_limit_pdf(&pr, &[vec![x]]).unwrap(), 0.0, 80.0 / a, 400, 20);
        assert!((total - 1.0).abs() < 1e-6, "n1={n1}: {total}");
    }
}

#[test]
fn continuum_density_normalized_two_layers() {
    // n2 = 1, p = 1: x_1^(1) > x_1^(0) > x_2^(1) > 0, nested Gauss-Legendre.
    let pr = params(3, 1, 0.8, &[0.6]);
    let cap = 60.0;
    let total = gl_panels(
        |top| {
            gl_panels(
                |mid| gl_panels(|low| eval_jacobi_limit_pdf(&pr, &[vec![mid], vec![top, low]]).unwrap(), 0.0, mid, 4, 20),
                0.0,
                top,
                4,
                20,
            )
        },
        0.0,
        cap,
        40,
        20,
    );
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn y_form_is_change_of_variables() {
    let pr = params(4, 2, 1.1, &[0.3]);
    let x = vec![vec![1.0, 0.4], vec![1.4, 0.6, 0.2]];
    let y: Vec<Vec<f64>> = x.iter().map(|l| l.iter().map(|v: &f64| (-v).exp()).collect()).collect();
    let jac: f64 = y.iter().flatten().product();
    let fx = eval_jacobi_limit_pdf(&pr, &x).unwrap();
    let fy = eval_jacobi_limit_pdf_y(&pr, &y).unwrap();
    assert!((fy * jac / fx - 1.0).abs() < 1e-12);
    // The weight form at a_s = a - s.
    for (n1, n2, a) in [(4usize, 2usize, 2.3), (5, 1, 1.7)] {
        let p = 2.min(n1 - n2);
        let pr = params(n1, n2, a, &(1..=p).map(|s| a - s as f64).collect::<Vec<_>>());
        let mut rng = crate::samplers::draw_rng(5, n1 as u64);
        for _ in 0..20 {
            // Random interlaced y layers: increasing, built from sorted uniforms.
            let mut pts: Vec<f64> = (0..(n2 + p) * 2).map(|_| rng.random::<f64>()).collect();
            pts.sort_by(f64::total_cmp);
            let mut layers: Vec<Vec<f64>> = vec![Vec::new(); p + 1];
            let mut top: Vec<f64> = pts.iter().step_by(2).take(n2 + p).copied().collect();
            layers[p] = top.clone();
            for s in (0..p).rev() {
                let next: Vec<f64> = (0..n2 + s).map(|j| 0.5 * (top[j] + top[j + 1])).collect();
                layers[s] = next.clone();
                top = next;
            }
            let f1 = eval_jacobi_limit_pdf_y(&pr, &layers).unwrap();
            let fw = eval_jacobi_limit_weight_form(n1, n2, p, a, &layers).unwrap();
            assert!((f1 / fw - 1.0).abs() < 1e-12, "{f1} vs {fw}");
        }
    }
}

#[test]
fn discrete_law_converges_to_continuum_at_first_order() {
    let cases = [
        (params(4, 1, 0.7, &[0.4, 0.9]), vec![vec![0.6], vec![1.0, 0.4], vec![1.2, 0.8, 0.2]]),
        (params(4, 2, 0.7, &[0.4]), vec![vec![1.0, 0.4], vec![1.4, 0.6, 0.2]]),
    ];
    for (pr, x) in cases {
        let errs: Vec<f64> = [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&l| discrete_limit_check(&pr, &x, l).unwrap().rel_error)
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.3, "{errs:?}");
        }
    }
}

#[test]
fn bridge_single_site_and_negative_control() {
    let r = lpp_eigenvalue_bridge_test(1, 20_000, 3).unwrap();
    assert!(r.pass, "{r:?}");
    let r = lpp_eigenvalue_bridge_test(4, 20_000, 3).unwrap();
    assert!(r.pass, "{r:?}");
    let bad = lpp_bridge_with_scale(4, 20_000, 3, 2.0).unwrap();
    assert!(!bad.pass, "{bad:?}");
    let r = inhomogeneous_homogeneous_test(3, 0.3, 0.7, 20_000, 4).unwrap();
    assert!(r.pass, "{r:?}");
    let bad = inhomogeneous_vs_update_chain(&[0.1, 0.1, 2.5], &[0.0, 0.0, 0.0], 1.0, 20_000, 4).unwrap();
    assert!(!bad.pass, "{bad:?}");
}
