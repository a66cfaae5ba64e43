//! Gauss-Legendre quadrature on `[0, 1]`.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point rule on `[−1, 1]`, by Newton
/// iteration on the Legendre polynomial from Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_{n-1}(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// The fixed 32-point rule, mapped to `[0, 1]`.
pub fn unit_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(32);
        x.iter()
            .zip(&w)
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect()
    })
}

/// `∫₀¹ g(t) dt` with the 32-point rule.
pub fn integrate_unit<E>(mut g: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
    let mut acc = 0.0;
    for &(t, w) in unit_rule() {
        acc += w * g(t)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 32] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn three_point_rule_known_values() {
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // 32 nodes integrate degree 63 exactly
        let v: f64 = integrate_unit::<()>(|t| Ok(64.0 * t.powi(63))).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        let v: f64 = integrate_unit::<()>(|t| Ok(t.exp())).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }
}
