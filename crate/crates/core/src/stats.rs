//! Two-sample Kolmogorov-Smirnov statistic.

/// Asymptotic 1% critical value of the Kolmogorov distribution.
pub const KS_C_ONE_PERCENT: f64 = 1.628;

/// `sup |F_a - F_b|` over the pooled sample. Inputs need not be sorted.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample critical value at 1% significance for sizes `n`, `m`.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_C_ONE_PERCENT * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_have_zero_distance() {
        let v = [0.3, 1.0, -2.0, 0.3];
        assert_eq!(ks_two_sample(&v, &v), 0.0);
    }

    #[test]
    fn disjoint_samples_have_unit_distance() {
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[2.0, 3.0, 4.0]), 1.0);
    }

    #[test]
    fn hand_computed_distance() {
        // Pooled order: a1=1, b1=2, a2=3, b2=4; F_a - F_b peaks at 1/2.
        assert!((ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]) - 0.5).abs() < 1e-15);
        assert!((ks_critical_1pct(100, 100) - 1.628 * 0.02f64.sqrt()).abs() < 1e-15);
    }
}
