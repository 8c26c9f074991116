use super::*;

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn single_species_gue() {
    let c = sample_gue_minor_chain(1, 7).unwrap();
    assert_eq!(c.species.len(), 1);
    assert_eq!(c.species[&1].len(), 1);
}

#[test]
fn deterministic_per_seed_and_draw() {
    let a = sample_gue_minor_draw(4, 11, 5).unwrap();
    let b = sample_gue_minor_draw(4, 11, 5).unwrap();
    assert_eq!(a, b);
    let c = sample_gue_minor_draw(4, 11, 6).unwrap();
    assert_ne!(a.species, c.species);
    let l1 = sample_lue_draw(6, 4, 3, 9).unwrap();
    let l2 = sample_lue_draw(6, 4, 3, 9).unwrap();
    assert_eq!(l1, l2);
    let j = EnsembleSpec::jacobi(1.0, 2.0).unwrap();
    assert_eq!(
        sample_projection_draw(&j, 4, 2, 1, 2).unwrap(),
        sample_projection_draw(&j, 4, 2, 1, 2).unwrap()
    );
}

#[test]
fn chains_interlace_and_stay_in_support() {
    let jac = EnsembleSpec::jacobi(1.0, 1.0).unwrap();
    let lag = EnsembleSpec::laguerre(0.5).unwrap();
    for d in 0..2000 {
        let g = sample_gue_minor_draw(5, 1, d).unwrap();
        assert_eq!(g.interlacing_violations(), 0);
        let l = sample_lue_draw(7, 5, 1, d).unwrap();
        assert_eq!(l.interlacing_violations(), 0);
        assert!(l.species.values().flatten().all(|&x| x > 0.0));
        let p = sample_projection_draw(&jac, 5, 3, 1, d).unwrap();
        assert_eq!(p.interlacing_violations(), 0);
        assert!(p.species.values().flatten().all(|&x| x > 0.0 && x < 1.0));
        let q = sample_projection_draw(&lag, 5, 4, 1, d).unwrap();
        assert_eq!(q.interlacing_violations(), 0);
        let w = sample_wishart_inhomogeneous_draw(&[0.5, 1.0, 2.0], &[0.1, 0.3, 0.2], 1, d).unwrap();
        assert_eq!(w.interlacing_violations(), 0);
        assert!(w.species.values().flatten().all(|&x| x > 0.0));
    }
}

#[test]
fn gue_trace_has_mean_zero() {
    let traces: Vec<f64> = (0..100_000)
        .map(|d| sample_gue_minor_draw(2, 5, d).unwrap().species[&2].iter().sum())
        .collect();
    let (m, se) = mean_se(&traces);
    assert!(m.abs() < 3.0 * se, "{m} +- {se}");
    // Var tr H = 2 * (1/2) for the diagonal of a 2x2 GUE.
    let var = traces.iter().map(|t| t * t).sum::<f64>() / traces.len() as f64;
    assert!((var - 1.0).abs() < 0.02, "{var}");
}

#[test]
fn lue_first_species_is_total_mass() {
    let big_n = 5;
    let v: Vec<f64> = (0..100_000).map(|d| sample_lue_draw(big_n, 1, 2, d).unwrap().species[&1][0]).collect();
    let (m, se) = mean_se(&v);
    assert!((m - big_n as f64).abs() < 3.0 * se, "{m} +- {se}");
}

#[test]
fn lue_species_matches_dense_wishart() {
    // Species n of the update chain should be distributed like the nonzero
    // eigenvalues of X^dagger X with X an N x n complex Gaussian matrix.
    let (big_n, n) = (6, 4);
    let draws = 100_000;
    let chain: Vec<f64> = (0..draws).map(|d| sample_lue_draw(big_n, n, 3, d).unwrap().largest(n).unwrap()).collect();
    let dense: Vec<f64> = (0..draws)
        .map(|d| {
            let mut rng = draw_rng(99, d);
            *hermitian_eigenvalues(wishart(n, big_n, &mut rng)).unwrap().last().unwrap()
        })
        .collect();
    let (m1, s1) = mean_se(&chain);
    let (m2, s2) = mean_se(&dense);
    assert!((m1 - m2).abs() < 3.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
}

#[test]
fn bidiagonal_laguerre_matches_dense_wishart() {
    let (n, a) = (3, 2usize);
    let spec = EnsembleSpec::laguerre(a as f64).unwrap();
    let draws = 50_000;
    let bidiag: Vec<f64> = (0..draws)
        .map(|d| *ensemble_eigs_with(&spec, n, &mut draw_rng(4, d)).unwrap().last().unwrap())
        .collect();
    let dense: Vec<f64> = (0..draws)
        .map(|d| *hermitian_eigenvalues(wishart(n, n + a, &mut draw_rng(5, d))).unwrap().last().unwrap())
        .collect();
    let (m1, s1) = mean_se(&bidiag);
    let (m2, s2) = mean_se(&dense);
    assert!((m1 - m2).abs() < 3.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
    // Trace of an n x n Wishart with n + a degrees of freedom has mean n (n + a).
    let tr: Vec<f64> = (0..draws)
        .map(|d| ensemble_eigs_with(&spec, n, &mut draw_rng(6, d)).unwrap().iter().sum())
        .collect();
    let (m, se) = mean_se(&tr);
    assert!((m - (n * (n + a)) as f64).abs() < 3.0 * se);
}

#[test]
fn gaussian_single_eigenvalue_has_mean_zero() {
    let g = EnsembleSpec::gaussian();
    let v: Vec<f64> = (0..200_000).map(|d| ensemble_eigs_with(&g, 1, &mut draw_rng(8, d)).unwrap()[0]).collect();
    let (m, se) = mean_se(&v);
    assert!(m.abs() < 3.0 * se);
    let var = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    assert!((var - 0.5).abs() < 0.01, "{var}");
}

#[test]
fn jacobi_sampler_support_and_parameters() {
    let j = EnsembleSpec::jacobi(0.0, 3.0).unwrap();
    for d in 0..500 {
        let v = ensemble_eigs_with(&j, 4, &mut draw_rng(1, d)).unwrap();
        assert!(v.iter().all(|&x| x > 0.0 && x < 1.0));
    }
    let frac = EnsembleSpec::jacobi(0.5, 1.0).unwrap();
    assert!(matches!(ensemble_eigs_with(&frac, 2, &mut draw_rng(1, 0)), Err(Error::Parameter(_))));
    // n = 1: Beta(a + 1, b + 1) has mean (a + 1) / (a + b + 2).
    let j1 = EnsembleSpec::jacobi(2.0, 1.0).unwrap();
    let v: Vec<f64> = (0..100_000).map(|d| ensemble_eigs_with(&j1, 1, &mut draw_rng(2, d)).unwrap()[0]).collect();
    let (m, se) = mean_se(&v);
    assert!((m - 0.6).abs() < 3.0 * se, "{m}");
}

#[test]
fn bordered_recurrence_reproduces_next_minor() {
    // Rotating the border into the eigenbasis of a minor and solving the
    // bordered secular equation gives the eigenvalues of the next minor.
    let mut rng = draw_rng(21, 0);
    let h = gue_matrix(6, &mut rng);
    for k in 1..6 {
        let minor = h.view((0, 0), (k, k)).into_owned();
        let eig = nalgebra::SymmetricEigen::new(minor);
        let border = h.view((0, k), (k, 1)).into_owned();
        let w = eig.eigenvectors.adjoint() * border;
        let mut pairs: Vec<(f64, f64)> = (0..k).map(|i| (eig.eigenvalues[i], w[i].norm_sqr())).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let prob = SecularProblem::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
            SecularForm::GueBordered { border: h[(k, k)].re },
        )
        .unwrap();
        let roots = secular_roots(&prob).unwrap();
        let want = hermitian_eigenvalues(h.view((0, 0), (k + 1, k + 1)).into_owned()).unwrap();
        for (r, e) in roots.iter().zip(&want) {
            assert!((r - e).abs() < 1e-12, "k={k}: {r} vs {e}");
        }
    }
}

#[test]
fn inhomogeneous_chain_matches_dense_matrix() {
    let pi = [0.5, 1.0, 2.0, 0.2];
    let pi_hat = [0.1, 0.3, 0.2, 1.0];
    for d in 0..50 {
        let mut rng = draw_rng(3, d);
        let (species, _, a) = inhomogeneous_chain_and_matrix(&pi, &pi_hat, &mut rng).unwrap();
        let dense = hermitian_eigenvalues(a).unwrap();
        for (r, e) in species[&4].iter().zip(&dense) {
            assert!((r - e).abs() < 1e-10 * (1.0 + e.abs()), "{r} vs {e}");
        }
    }
    assert!(sample_wishart_chain_inhomogeneous(&[0.5, -1.0], &[0.2, 0.2], 1).is_err());
}

#[test]
fn csv_layout() {
    let chains: Vec<InterlacedChain> = (0..3).map(|d| sample_gue_minor_draw(3, 4, d).unwrap()).collect();
    let mut buf = Vec::new();
    write_chains_csv(&mut buf, &chains).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data.len(), 3 * (1 + 2 + 3));
    assert!(text.contains("# seed=4"));
    let first: Vec<&str> = data[0].split(',').collect();
    assert_eq!(first[..3], ["0", "1", "1"]);
    assert_eq!(first[3].parse::<f64>().unwrap(), chains[0].species[&1][0]);
}

#[test]
fn fold_draws_is_independent_of_threads() {
    let run = |threads| {
        fold_draws(
            10_000,
            threads,
            Vec::new,
            |acc: &mut Vec<f64>, d| {
                acc.push(sample_lue_draw(4, 3, 8, d)?.largest(3).unwrap());
                Ok(())
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )
        .unwrap()
    };
    assert_eq!(run(1), run(3));
}
