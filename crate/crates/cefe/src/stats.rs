//! Small statistical helpers shared by the test suites and the attack
//! harness: chi-squared goodness of fit and binomial confidence intervals.

/// Pearson chi-squared statistic for observed counts against expected counts.
pub fn chi2_stat(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            assert!(e > 0.0);
            (o - e) * (o - e) / e
        })
        .sum()
}

/// 95% critical value of the chi-squared distribution by degrees of freedom.
/// Values beyond the table fall back to the Wilson-Hilferty approximation.
pub fn chi2_crit95(df: usize) -> f64 {
    const TABLE: [(usize, f64); 12] = [
        (1, 3.841),
        (2, 5.991),
        (3, 7.815),
        (4, 9.488),
        (5, 11.070),
        (6, 12.592),
        (7, 14.067),
        (15, 24.996),
        (31, 44.985),
        (63, 82.529),
        (127, 154.302),
        (255, 293.248),
    ];
    for &(d, v) in &TABLE {
        if d == df {
            return v;
        }
    }
    // Wilson-Hilferty: chi2_p(df) ~ df (1 - 2/(9 df) + z_p sqrt(2/(9 df)))^3.
    let d = df as f64;
    let z = 1.6449; // 95th percentile of the standard normal
    d * (1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt()).powi(3)
}

/// Wilson score 95% confidence interval for a binomial proportion.
pub fn binomial_ci95(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0);
    let z = 1.959964;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Standard deviation of a binomial count with `trials` draws at rate `p`.
pub fn binomial_sigma(trials: u64, p: f64) -> f64 {
    (trials as f64 * p * (1.0 - p)).sqrt()
}
