use std::f64::consts::PI;

/// Normalized oscillator eigenfunctions `psi_0(x) .. psi_{len-1}(x)`.
///
/// Runs the recurrence on the normalized functions, so nothing overflows for
/// the orders and arguments used here (`n <= 100`, `|x| <= 10`).
pub fn hermite_functions(x: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    fill_hermite_functions(x, &mut out);
    out
}

/// In-place variant of [`hermite_functions`]; `out.len()` sets the order.
pub fn fill_hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Physicists' Hermite polynomials by their own recurrence, normalized
    // with factorials; fine at low order.
    fn direct(n: usize, x: f64) -> f64 {
        let mut h = vec![1.0, 2.0 * x];
        for k in 1..n {
            h.push(2.0 * x * h[k] - 2.0 * k as f64 * h[k - 1]);
        }
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        h[n] * (-x * x / 2.0).exp() / (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt()
    }

    #[test]
    fn matches_direct_low_order() {
        for &x in &[-3.0, -0.7, 0.0, 0.4, 2.5] {
            let f = hermite_functions(x, 12);
            for (n, v) in f.iter().enumerate() {
                assert!((v - direct(n, x)).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn orthonormal_on_fine_grid() {
        let len = 60;
        let h = 0.005;
        let xs: Vec<f64> = (0..=5600).map(|i| -14.0 + h * i as f64).collect();
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, len)).collect();
        for m in [0, 1, 7, 30, 59] {
            for n in [0, 1, 7, 30, 59] {
                let s: f64 = table.iter().map(|row| row[m] * row[n]).sum::<f64>() * h;
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-9, "m={m} n={n} s={s}");
            }
        }
    }

    #[test]
    fn finite_at_high_order() {
        for &x in &[-6.0, 6.0, 9.0] {
            assert!(hermite_functions(x, 100).iter().all(|v| v.is_finite()));
        }
    }
}
