//! Small statistical toolbox: chi-square goodness of fit, normal tails,
//! serial correlation. Self-contained so every verdict in the experiment
//! reports is reproducible from this crate alone.

/// Natural log of the gamma function (Lanczos approximation, g=7, n=9).
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + 7.5;
        for (i, c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Regularized lower incomplete gamma P(a, x) by series expansion.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / 1e-300;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < 1e-300 {
            d = 1e-300;
        }
        c = b + an / c;
        if c.abs() < 1e-300 {
            c = 1e-300;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Survival function of the chi-square distribution: P(X > statistic).
///
/// Accurate deep into the upper tail, which the negative-control checks
/// rely on (they assert p-values below 1e-6).
pub fn chi_square_survival(statistic: f64, dof: u64) -> f64 {
    let a = dof as f64 / 2.0;
    let x = statistic / 2.0;
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Pearson chi-square statistic for observed counts against uniform expected.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, u64) {
    let n: u64 = counts.iter().sum();
    let k = counts.len();
    let expected = n as f64 / k as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    (statistic, k as u64 - 1)
}

/// Uniform chi-square test in one call: (statistic, dof, p-value).
pub fn chi_square_uniform_test(counts: &[u64]) -> (f64, u64, f64) {
    let (stat, dof) = chi_square_uniform(counts);
    (stat, dof, chi_square_survival(stat, dof))
}

/// Complementary error function (Abramowitz & Stegun 7.1.26 with refinement),
/// good to ~1e-7 absolute which is ample for z-tests.
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let tau = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87
                                        + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        tau
    } else {
        2.0 - tau
    }
}

/// Two-sided p-value of a standard normal z statistic.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Two-proportion z-test; returns the two-sided p-value.
///
/// Used to compare predictor hit rates between policies.
pub fn two_proportion_p(hits_a: u64, n_a: u64, hits_b: u64, n_b: u64) -> f64 {
    let pa = hits_a as f64 / n_a as f64;
    let pb = hits_b as f64 / n_b as f64;
    let pool = (hits_a + hits_b) as f64 / (n_a + n_b) as f64;
    let se = (pool * (1.0 - pool) * (1.0 / n_a as f64 + 1.0 / n_b as f64)).sqrt();
    if se == 0.0 {
        return 1.0;
    }
    normal_two_sided((pa - pb) / se)
}

/// Lag-1 serial correlation coefficient of a sample.
pub fn serial_correlation(samples: &[f64]) -> f64 {
    let n = samples.len();
    assert!(n >= 3, "need at least 3 samples");
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &s) in samples.iter().enumerate() {
        let d = s - mean;
        den += d * d;
        if i + 1 < n {
            num += d * (samples[i + 1] - mean);
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Mean and population standard deviation.
pub fn mean_stddev(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference tail values computed independently with scipy.stats.chi2.sf.
    #[test]
    fn chi_square_survival_matches_reference() {
        let cases = [
            (6.634896601021213, 1, 0.01),
            (16.811893829770927, 6, 0.01),
            (166.98739013667387, 127, 0.01),
            (310.45738821990585, 255, 0.01),
        ];
        for (x, dof, p) in cases {
            let got = chi_square_survival(x, dof);
            assert!(
                (got - p).abs() < 1e-6,
                "sf({x}, {dof}) = {got}, want {p}"
            );
        }
        // deep tail, reference 7.531973752277973e-30
        let tail = chi_square_survival(600.0, 255);
        assert!((tail / 7.531973752277973e-30 - 1.0).abs() < 1e-6, "{tail}");
    }

    #[test]
    fn chi_square_uniform_counts() {
        let counts = [25u64, 25, 25, 25];
        let (stat, dof, p) = chi_square_uniform_test(&counts);
        assert_eq!(stat, 0.0);
        assert_eq!(dof, 3);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erfc_reference_points() {
        assert!((erfc(0.0) - 1.0).abs() < 1e-7);
        // scipy.special.erfc(1.0) = 0.15729920705028513
        assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-6);
        // normal two-sided at z = 2.5758293035489004 is 0.01
        assert!((normal_two_sided(2.5758293035489004) - 0.01).abs() < 1e-5);
    }

    #[test]
    fn serial_correlation_of_alternating_sequence_is_negative() {
        let s: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(serial_correlation(&s) < -0.9);
    }
}
