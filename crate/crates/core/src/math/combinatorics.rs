/// Factorials up to this argument are formed by exact products; larger
/// arguments go through the log-gamma route.
const EXACT_FACTORIAL_MAX: u32 = 20;

pub fn factorial(n: u32) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        (1..=n as u64).product::<u64>() as f64
    } else {
        ln_factorial(n).exp()
    }
}

/// ln(n!) via Stirling's series with exact products for small n.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        return ((1..=n as u64).product::<u64>() as f64).ln();
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // lgamma(x) asymptotic series; x >= 22 keeps the truncation error below 1e-16
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= EXACT_FACTORIAL_MAX + 40 {
        // multiplicative form stays exact in u128 for this range
        let mut acc: u128 = 1;
        for i in 0..k as u128 {
            acc = acc * (n as u128 - i) / (i + 1);
        }
        acc as f64
    } else {
        (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
            .exp()
            .round()
    }
}

/// Binomial(n, q) probability masses for k = 0..=n.
pub fn binomial_weights(n: u32, q: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let shared = if k == 0 { 1.0 } else { q.powi(k as i32) };
            let private = if k == n {
                1.0
            } else {
                (1.0 - q).powi((n - k) as i32)
            };
            binomial(n, k) * shared * private
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(10, 0), 1.0);
    }

    #[test]
    fn log_route_matches_exact_products() {
        // 25! = 15511210043330985984000000
        let exact = 15_511_210_043_330_985_984_000_000f64;
        assert!((factorial(25) / exact - 1.0).abs() < 1e-13);
        assert!((ln_factorial(30) - 74.658_236_348_830_16).abs() < 1e-12);
        assert_eq!(binomial(70, 3), 54_740.0);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 0..12 {
            for &q in &[0.0, 0.1, 0.5, 0.77, 1.0] {
                let s: f64 = binomial_weights(n, q).iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "n={n} q={q} sum={s}");
            }
        }
        // 0^0 = 1 at the endpoints
        assert_eq!(binomial_weights(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(binomial_weights(3, 1.0), vec![0.0, 0.0, 0.0, 1.0]);
    }
}
