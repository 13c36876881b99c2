//! Quadrature rules: Gauss-Legendre panels and double-exponential (tanh-sinh)
//! integration for integrands with algebraic endpoint singularities.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_order(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 1 { x } else { p1 };
            let prev = if order == 1 { 1.0 } else { p0 };
            dp = order as f64 * (x * p - prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Tanh-sinh integral of `f` over `[a, b]`.
///
/// `f` may have an integrable algebraic singularity at `a`.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    tanh_sinh_offset(|u| f(a + u), b - a, rel_tol)
}

/// Tanh-sinh integral of `g(u)` over `u` in `[0, len]`.
///
/// Abscissae near `u = 0` are computed as exact offsets, so singularities at
/// the left end are resolved down to the underflow threshold.
pub fn tanh_sinh_offset(f: impl Fn(f64) -> f64, len: f64, rel_tol: f64) -> Result<f64> {
    let (a, b) = (0.0, len);
    let half = 0.5 * (b - a);
    let t_max = 6.5;
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        if !(w > 0.0) || !w.is_finite() {
            return 0.0;
        }
        // Distance of the node from the nearer endpoint, in units of `half`.
        let gap = (-u.abs()).exp() / cu;
        let x = if t >= 0.0 { b - half * gap } else { a + half * gap };
        if !(x > a && x < b) {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut sum: f64 = (-6..=6).map(|k| node(k as f64)).sum();
    let mut estimate = half * h * sum;
    for _level in 0..12 {
        h *= 0.5;
        let steps = (t_max / h) as i64;
        let mut extra = 0.0;
        let mut k = 1;
        while k <= steps {
            let t = k as f64 * h;
            extra += node(t) + node(-t);
            k += 2;
        }
        sum += extra;
        let next = half * h * sum;
        if (next - estimate).abs() <= rel_tol * next.abs() {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::Accuracy(format!(
        "tanh-sinh did not reach relative tolerance {rel_tol}"
    )))
}

/// Integral of `f` over `[a, inf)` via `x = a / t` on `(0, 1]`, `a > 0`.
pub fn tanh_sinh_to_infinity(f: impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> Result<f64> {
    assert!(a > 0.0);
    tanh_sinh_offset(|t| f(a / t) * a / (t * t), 1.0, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for order in [1, 2, 5, 10, 16] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * order - 1;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((integral - exact).abs() < 1e-13, "order {order}");
        }
    }

    #[test]
    fn endpoint_singularities() {
        let v = tanh_sinh(|x| x.powf(-0.9), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 10.0).abs() < 1e-8, "{v}");
        let v = tanh_sinh_offset(|u| u.powf(-0.5), 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        let v = tanh_sinh(|x| x.exp(), -1.0, 2.0, 1e-13).unwrap();
        assert!((v - (2f64.exp() - (-1f64).exp())).abs() < 1e-12, "{v}");
        let v = tanh_sinh_to_infinity(|x| x.powf(-1.1), 1.0, 1e-12).unwrap();
        assert!((v - 10.0).abs() < 1e-8, "{v}");
    }
}
