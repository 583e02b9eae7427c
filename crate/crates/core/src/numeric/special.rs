use libm::erfc;

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Standard normal CDF, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// `Φ(hi) - Φ(lo)` without cancellation when both arguments sit in the upper tail.
pub fn norm_interval(lo: f64, hi: f64) -> f64 {
    if lo >= hi {
        return 0.0;
    }
    if lo > 0.0 {
        norm_cdf(-lo) - norm_cdf(-hi)
    } else {
        norm_cdf(hi) - norm_cdf(lo)
    }
}

/// CDF of Gamma(shape 2, rate).
pub fn gamma2_cdf(x: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = rate * x;
    -(-y).exp_m1() - y * (-y).exp()
}

pub fn exp_cdf(x: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-rate * x).exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_cdf_reference_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((norm_cdf(-8.0) - 6.220_960_574_271_785e-16).abs() < 1e-28);
    }

    #[test]
    fn interval_matches_difference() {
        assert!((norm_interval(-1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert_eq!(norm_interval(2.0, 1.0), 0.0);
        let tail = norm_interval(9.0, 10.0);
        assert!(tail > 0.0 && tail < 1.2e-19);
    }

    #[test]
    fn gamma2_cdf_limits() {
        assert_eq!(gamma2_cdf(-1.0, 4.0), 0.0);
        assert!((gamma2_cdf(100.0, 4.0) - 1.0).abs() < 1e-15);
        // 1 - e^{-1}(1 + 1)
        assert!((gamma2_cdf(0.25, 4.0) - (1.0 - 2.0 / std::f64::consts::E)).abs() < 1e-15);
    }
}
