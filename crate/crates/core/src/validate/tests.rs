use super::*;
use crate::kernel::{correlation, density, kernel_k, ProcessSpec, SpeciesPoint};
use crate::orthopoly::EnsembleSpec;
use crate::samplers::{sample_gue_minor_draw, InterlacedChain};
use std::time::Instant;

fn ensembles() -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::gaussian(),
        EnsembleSpec::laguerre(1.0).unwrap(),
        EnsembleSpec::jacobi(1.0, 2.0).unwrap(),
    ]
}

#[test]
fn single_gaussian_point() {
    let p = ProcessSpec::new(EnsembleSpec::gaussian(), 1).unwrap();
    let v = brute_force_marginal(&p, &[SpeciesPoint::new(1, 0.0)]).unwrap();
    assert!((v - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-10, "{v}");
}

#[test]
fn one_point_matches_kernel_for_n2() {
    for e in ensembles() {
        let p = ProcessSpec::new(e, 2).unwrap();
        let grid: Vec<f64> = match e.kind {
            crate::EnsembleKind::Gaussian => vec![-1.5, -0.4, 0.3, 0.9, 2.0],
            crate::EnsembleKind::Laguerre => vec![0.2, 1.0, 2.5, 4.0, 7.5],
            crate::EnsembleKind::Jacobi => vec![0.1, 0.3, 0.5, 0.7, 0.9],
        };
        for s in 1..=2 {
            for &y in &grid {
                let t = Instant::now();
                let bf = brute_force_marginal(&p, &[SpeciesPoint::new(s, y)]).unwrap();
                let k = density(&p, s, &[y]).unwrap()[0];
                assert!((bf - k).abs() < 1e-4 * k.abs().max(1e-2), "{e:?} s={s} y={y}: {bf} vs {k} ({:?})", t.elapsed());
            }
        }
    }
}

#[test]
fn two_point_gaussian_n2() {
    let p = ProcessSpec::new(EnsembleSpec::gaussian(), 2).unwrap();
    for &(y1, y2) in &[(0.3, -0.5), (-0.2, 1.1), (0.8, 0.1), (1.5, -1.0)] {
        let pts = [SpeciesPoint::new(1, y1), SpeciesPoint::new(2, y2)];
        let bf = brute_force_marginal(&p, &pts).unwrap();
        let k = correlation(&p, &pts).unwrap();
        assert!((bf - k).abs() < 5e-4 * k.abs().max(1e-2), "({y1},{y2}): {bf} vs {k}");
    }
}

#[test]
fn gaussian_n3_points() {
    let p = ProcessSpec::new(EnsembleSpec::gaussian(), 3).unwrap();
    let t = Instant::now();
    let bf = brute_force_marginal(&p, &[SpeciesPoint::new(2, 0.4)]).unwrap();
    let k = kernel_k(&p, &SpeciesPoint::new(2, 0.4), &SpeciesPoint::new(2, 0.4)).unwrap().value;
    assert!((bf - k).abs() < 1e-4 * k, "{bf} vs {k}");
    eprintln!("N=3 one point: {:?}", t.elapsed());
    let pts = [SpeciesPoint::new(1, 0.2), SpeciesPoint::new(3, -0.7)];
    let bf = brute_force_marginal(&p, &pts).unwrap();
    let k = correlation(&p, &pts).unwrap();
    assert!((bf - k).abs() < 5e-4 * k, "{bf} vs {k}");
    eprintln!("N=3 total: {:?}", t.elapsed());
}

#[test]
fn species_one_marginal_integrates_to_one() {
    let p = ProcessSpec::new(EnsembleSpec::laguerre(1.0).unwrap(), 2).unwrap();
    let total = crate::quad::gl_panels(|y| brute_force_marginal(&p, &[SpeciesPoint::new(1, y)]).unwrap(), 0.0, 40.0, 40, 10);
    assert!((total - 1.0).abs() < 1e-4, "{total}");
}

#[test]
fn brute_force_rejects_large_problems() {
    let p = ProcessSpec::new(EnsembleSpec::gaussian(), 4).unwrap();
    assert!(brute_force_marginal(&p, &[SpeciesPoint::new(1, 0.0)]).is_err());
    let p = ProcessSpec::new(EnsembleSpec::gaussian(), 2).unwrap();
    assert!(brute_force_marginal(&p, &[]).is_err());
}

fn gue_chains(n: usize, draws: u64) -> Vec<InterlacedChain> {
    (0..draws).map(|d| sample_gue_minor_draw(n, 5, d).unwrap()).collect()
}

#[test]
fn histogram_mass_and_single_chain() {
    let chains = gue_chains(3, 1);
    let est = empirical_density(&chains, 1, BinSpec::new(-10.0, 10.0, 40).unwrap(), 5).unwrap();
    assert_eq!(est.counts.iter().sum::<u64>(), 1);
    assert_eq!(est.total_mass, 1.0);
    let chains = gue_chains(3, 1000);
    let est = empirical_density(&chains, 3, BinSpec::new(-1.0, 1.0, 10).unwrap(), 5).unwrap();
    assert_eq!(est.total_mass, 3.0);
    let integral: f64 = est.density.iter().sum::<f64>() * est.bins.width();
    assert!((integral - est.mass_in_range).abs() < 1e-12);
    assert!(est.lower.iter().zip(&est.density).zip(&est.upper).all(|((l, d), u)| l <= d && d <= u));
    assert!(empirical_density(&chains, 4, BinSpec::new(-1.0, 1.0, 10).unwrap(), 5).is_err());
}

#[test]
fn comparison_contracts() {
    let chains = gue_chains(2, 2000);
    let est = empirical_density(&chains, 1, BinSpec::new(-3.0, 3.0, 12).unwrap(), 5).unwrap();
    let same = compare(&est.density, &est, TestKind::SupNorm, Some(0.02)).unwrap();
    assert_eq!(same.statistic, 0.0);
    assert!(same.pass);
    let shifted: Vec<f64> = est.density.iter().map(|d| d + 0.1).collect();
    assert!(!compare(&shifted, &est, TestKind::SupNorm, Some(0.02)).unwrap().pass);
    assert!(compare(&shifted[1..], &est, TestKind::SupNorm, Some(0.02)).is_err());
    assert!(compare(&est.density, &est, TestKind::SupNorm, None).is_err());
    let ks = compare(&est.density, &est, TestKind::KolmogorovSmirnov, None).unwrap();
    assert!(ks.pass && ks.statistic == 0.0);
}

#[test]
fn sup_norm_pass_is_symmetric() {
    let chains = gue_chains(2, 3000);
    let est = empirical_density(&chains, 2, BinSpec::new(-3.0, 3.0, 12).unwrap(), 5).unwrap();
    let p = ProcessSpec::new(EnsembleSpec::gaussian(), 2).unwrap();
    let pred = density(&p, 2, &est.centers).unwrap();
    let forward = compare(&pred, &est, TestKind::SupNorm, Some(0.08)).unwrap();
    let mut swapped = est.clone();
    swapped.density = pred.clone();
    let backward = compare(&est.density, &swapped, TestKind::SupNorm, Some(0.08)).unwrap();
    assert_eq!(forward.statistic, backward.statistic);
    assert_eq!(forward.pass, backward.pass);
}

#[test]
fn suite_names_round_trip() {
    for suite in Suite::ALL {
        assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        assert_eq!(serde_json::to_string(&suite).unwrap(), format!("\"{}\"", suite.name()));
    }
    assert!("nope".parse::<Suite>().is_err());
    let empty = SuiteReport::new(Suite::Gauge, Vec::new());
    assert!(!empty.pass);
    assert!(!Check::below("nan", f64::NAN, 1.0).pass);
}

#[test]
fn biorthogonality_holds_to_degree_twenty() {
    for spec in ensembles() {
        let proc = ProcessSpec::new(spec, 20).unwrap();
        for c in biorthogonality_checks(&proc).unwrap() {
            assert!(c.statistic < 1e-12, "{spec:?} {c}");
        }
    }
}

#[test]
fn oracle_resolves_power_singularities() {
    for spec in [EnsembleSpec::laguerre(0.5).unwrap(), EnsembleSpec::jacobi(-0.5, 1.5).unwrap()] {
        for c in oracle_checks(&ProcessSpec::new(spec, 2).unwrap()).unwrap() {
            assert!(c.statistic < 1e-6, "{spec:?} {c}");
        }
    }
}

#[test]
fn quick_suites_pass() {
    let cfg = SuiteConfig {
        n: 5,
        ..SuiteConfig::default()
    };
    for suite in [Suite::Gauge, Suite::BeadDet, Suite::Scaling, Suite::Biorthogonality] {
        let r = run_suite(suite, &cfg).unwrap();
        assert!(r.pass, "{}", r.to_json());
    }
}

#[test]
fn sampler_suite_passes_and_shifted_prediction_fails() {
    let good = SamplerProcess::GueMinor { n: 2 };
    let checks = sampler_checks(&good, 20_000, 4, 0, 0.08).unwrap();
    assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    let proc = good.kernel_process().unwrap();
    let bins = sampler_bins(&proc);
    let pred = predicted_bin_averages(&proc, 2, &bins).unwrap();
    let shifted: Vec<f64> = pred.iter().map(|p| p + 0.1).collect();
    let chains: Vec<InterlacedChain> = (0..2000).map(|d| sample_gue_minor_draw(2, 4, d).unwrap()).collect();
    let est = empirical_density(&chains, 2, bins, 4).unwrap();
    assert!(!compare(&shifted, &est, TestKind::SupNorm, Some(0.02)).unwrap().pass);
}
