//! Goodness-of-fit statistics used by the verification suite.

/// Result of a Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    /// Supremum distance between the empirical and reference CDFs.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Effective-size correction of Stephens for the asymptotic p-value.
fn p_value(statistic: f64, effective_n: f64) -> f64 {
    let s = effective_n.sqrt();
    kolmogorov_survival((s + 0.12 + 0.11 / s) * statistic)
}

/// One-sample test of `samples` against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsOutcome {
    assert!(!samples.is_empty(), "KS test needs samples");
    let mut x = samples.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = x.len() as f64;
    let statistic = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    KsOutcome { statistic, p_value: p_value(statistic, n) }
}

/// Two-sample test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs samples");
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    y.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    KsOutcome { statistic: d, p_value: p_value(d, ne) }
}

/// CDF of Beta(1, b): `1 − (1 − x)^b` on `[0, 1]`.
///
/// This is the law of `|u^H q|²` for a fixed unit `u` and `q` uniform on the
/// unit sphere of `C^{b+1}`.
pub fn beta_one_cdf(x: f64, b: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        1.0 - (1.0 - x).powf(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn kolmogorov_known_values() {
        // Q(1.36) ≈ 0.0505, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_survival(1.36) - 0.0495).abs() < 0.002);
        assert!((kolmogorov_survival(1.628) - 0.0100).abs() < 0.0005);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(5.0) < 1e-20);
    }

    #[test]
    fn uniform_samples_pass_and_shifted_fail() {
        let mut rng = crate::linalg::rng::seeded(4);
        let u: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_one_sample(&u, |x| x.clamp(0.0, 1.0)).p_value > 0.01);
        let shifted: Vec<f64> = u.iter().map(|x| x * x).collect();
        assert!(ks_one_sample(&shifted, |x| x.clamp(0.0, 1.0)).p_value < 1e-6);
        let v: Vec<f64> = (0..1500).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&u, &v).p_value > 0.01);
        assert!(ks_two_sample(&u, &shifted).p_value < 1e-6);
    }

    #[test]
    fn beta_cdf_edges() {
        assert_eq!(beta_one_cdf(-0.1, 15.0), 0.0);
        assert_eq!(beta_one_cdf(1.5, 15.0), 1.0);
        assert!((beta_one_cdf(0.5, 1.0) - 0.5).abs() < 1e-15);
    }
}
