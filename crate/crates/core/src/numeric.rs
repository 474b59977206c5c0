//! Small numeric helpers shared by the algebra and the oracle.

/// `ln(sum(exp(x)))` with the usual max-shift so that large magnitudes never
/// overflow. Summation runs in slice order; callers pass canonically ordered
/// inputs to keep results reproducible.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "log_sum_exp of an empty slice");
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// Exact value of `sum_{n >= 1} 1/n^2`.
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum_in_safe_range() {
        let xs = [0.3f64, -1.2, 2.0, 0.0];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
    }

    #[test]
    fn survives_large_magnitudes() {
        let xs = [1000.0, 1000.0];
        let got = log_sum_exp(&xs);
        assert!((got - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        let lo = [-1000.0, -1000.0, -1000.0, -1000.0];
        assert!((log_sum_exp(&lo) - (-1000.0 + 4f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let xs = [0.1, 0.7, -0.4];
        let shifted: Vec<f64> = xs.iter().map(|x| x + 50.0).collect();
        assert!((log_sum_exp(&shifted) - log_sum_exp(&xs) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn gcd_lcm() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(lcm(1, 7), 7);
        assert_eq!(lcm(5, 5), 5);
    }

    #[test]
    fn zeta_two_against_series() {
        // Independent check of the closed form: partial sum plus the first
        // Euler-Maclaurin tail corrections.
        let n = 20_000u64;
        let partial: f64 = (1..=n).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let nf = n as f64;
        let tail = 1.0 / nf - 1.0 / (2.0 * nf * nf) + 1.0 / (6.0 * nf * nf * nf);
        assert!((partial + tail - ZETA_2).abs() < 1e-13);
    }
}
