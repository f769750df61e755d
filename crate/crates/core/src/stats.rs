//! Statistical tests for the Monte Carlo verification suites:
//! one- and two-sample Kolmogorov-Smirnov, chi-square goodness of fit, and
//! the special functions they need.

/// Log-gamma by the Lanczos approximation (g = 7, n = 9), accurate to
/// ~1e-13 for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x); Q(a, x) = 1 - P(a, x).
/// Series for x < a + 1, continued fraction otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series representation
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
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - gamma_p(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

// Continued fraction for Q(a, x), modified Lentz.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
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

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: the p-value of an observed statistic.
pub fn chi_square_pvalue(stat: f64, df: usize) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, stat / 2.0)
}

/// Asymptotic Kolmogorov distribution tail: P(sqrt(n) D > x).
pub fn kolmogorov_pvalue(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0; // far below any interesting quantile
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        let signed = if k % 2 == 1 { term } else { -term };
        sum += signed;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test against a CDF. Samples need not be sorted.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> KsResult {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len();
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max((f - i as f64 / n as f64).abs())
            .max(((i as f64 + 1.0) / n as f64 - f).abs());
    }
    KsResult {
        statistic: d,
        p_value: kolmogorov_pvalue((n as f64).sqrt() * d),
        n,
    }
}

/// Two-sample KS test.
pub fn ks2_test(a: &mut [f64], b: &mut [f64]) -> KsResult {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    KsResult {
        statistic: d,
        p_value: kolmogorov_pvalue(ne.sqrt() * d),
        n: n.min(m),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Chi-square goodness of fit. Bins with expected count below `min_expected`
/// are pooled into the following bin (the last pools backward).
pub fn chi_square_gof(observed: &[f64], expected: &[f64], min_expected: f64) -> ChiSquareResult {
    assert_eq!(observed.len(), expected.len());
    let mut obs_p: Vec<f64> = Vec::new();
    let mut exp_p: Vec<f64> = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= min_expected {
            obs_p.push(acc_o);
            exp_p.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 {
        if let (Some(o), Some(e)) = (obs_p.last_mut(), exp_p.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            obs_p.push(acc_o);
            exp_p.push(acc_e);
        }
    }
    let stat: f64 = obs_p
        .iter()
        .zip(&exp_p)
        .map(|(&o, &e)| (o - e) * (o - e) / e)
        .sum();
    let df = obs_p.len().saturating_sub(1).max(1);
    ChiSquareResult {
        statistic: stat,
        df,
        p_value: chi_square_pvalue(stat, df),
    }
}

/// z-score of an observed frequency against a binomial null.
pub fn frequency_z(successes: usize, n: usize, p: f64) -> f64 {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    if sigma == 0.0 {
        return if successes as f64 / n as f64 == p {
            0.0
        } else {
            f64::INFINITY
        };
    }
    (successes as f64 / n as f64 - p) / sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn gamma_values() {
        // Gamma(5) = 24
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        // chi-square with 2 df: survival = exp(-x/2)
        for x in [0.5, 1.0, 3.0, 10.0] {
            assert!((chi_square_pvalue(x, 2) - (-x / 2.0f64).exp()).abs() < 1e-10);
        }
        // P + Q = 1
        for (a, x) in [(0.7, 0.3), (2.5, 4.0), (10.0, 3.0)] {
            assert!((gamma_p(a, x) + gamma_q(a, x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kolmogorov_known_quantiles() {
        // Q(1.3581) ~ 0.05 and Q(1.6276) ~ 0.01
        assert!((kolmogorov_pvalue(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_pvalue(1.6276) - 0.01).abs() < 5e-4);
    }

    #[test]
    fn ks_accepts_true_null_and_rejects_wrong_one() {
        let mut rng = Rng::new(3);
        let mut xs: Vec<f64> = (0..20_000).map(|_| rng.exp(1.0)).collect();
        let r = ks_test(&mut xs, |x| 1.0 - (-x).exp());
        assert!(r.p_value > 0.01, "p = {}", r.p_value);
        let r = ks_test(&mut xs, |x| 1.0 - (-1.2 * x).exp());
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn ks2_same_law() {
        let mut rng = Rng::new(9);
        let mut a: Vec<f64> = (0..8000).map(|_| rng.uniform()).collect();
        let mut b: Vec<f64> = (0..6000).map(|_| rng.uniform()).collect();
        let r = ks2_test(&mut a, &mut b);
        assert!(r.p_value > 0.01);
    }

    #[test]
    fn chi_square_pooling() {
        let obs = [50.0, 30.0, 12.0, 5.0, 2.0, 1.0];
        let exp = [48.0, 33.0, 11.0, 4.0, 3.0, 1.0];
        let r = chi_square_gof(&obs, &exp, 5.0);
        assert!(r.p_value > 0.05);
        assert!(r.df < obs.len());
    }

    #[test]
    fn geometric_law_fits_itself() {
        let mut rng = Rng::new(17);
        let p = 0.4;
        let n = 50_000;
        let mut counts = vec![0f64; 30];
        for _ in 0..n {
            let mut k = 0;
            while rng.uniform() >= p && k < 29 {
                k += 1;
            }
            counts[k] += 1.0;
        }
        let expected: Vec<f64> = (0..30)
            .map(|k| n as f64 * p * (1.0 - p).powi(k as i32))
            .collect();
        let r = chi_square_gof(&counts, &expected, 5.0);
        assert!(r.p_value > 0.01, "p = {}", r.p_value);
    }
}
