//! The exponential-sum multiplier `m_{j,lambda}` and its continuous model
//! `Phi_{j,lambda}`.
//!
//! Sign convention: `m_{j,lambda}(xi) = sum_y e(lambda |y|^{2d} - xi.y) K_j(y)`,
//! the symbol of `f -> sum_y f(x - y) e(lambda |y|^{2d}) K_j(y)` under the
//! forward transform `F(k) = sum_x f(x) e(-x.k/N)`. `Phi` uses the same sign.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{dyadic_cutoff, KernelPiece, KernelSpec};
use crate::error::{Error, Result};
use crate::grid::{centered_unit, e, fft_1d, forward_dft, GridSignal, GridSpec, Multiplier};
use crate::quad::gauss_legendre;
use rustfft::FftDirection;

/// Cap on quadrature nodes for one evaluation of `Phi`.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
/// Agreement required between successive panel refinements.
pub const PHI_REL_TOL: f64 = 1e-6;
const PHI_ORDER: usize = 12;
const MAX_HALVINGS: u32 = 6;

/// Fractional part of `lambda * k`, computed exactly before the final rounding.
pub fn frac_mul(lambda: f64, k: u128) -> f64 {
    if lambda < 0.0 {
        let f = frac_mul(-lambda, k);
        return if f == 0.0 { 0.0 } else { 1.0 - f };
    }
    if lambda == 0.0 || k == 0 {
        return 0.0;
    }
    let bits = lambda.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1u64 << 52), exponent - 1075)
    };
    if exp >= 0 {
        return 0.0;
    }
    let shift = (-exp) as u32;
    if k >= 1u128 << 64 || shift > 117 {
        return (lambda * k as f64).fract();
    }
    let product = mantissa as u128 * k;
    let rem = product & ((1u128 << shift) - 1);
    rem as f64 * (-(shift as f64)).exp2()
}

/// `|y|^{2d}` as an exact integer.
pub fn lattice_power(y: &[i64], d: u32) -> Result<u128> {
    let norm_sq: u128 = y.iter().map(|&c| (c as i128 * c as i128) as u128).sum();
    norm_sq
        .checked_pow(d)
        .filter(|v| *v < 1u128 << 64)
        .ok_or_else(|| Error::Size(format!("|y|^(2d) overflows for y = {y:?}, d = {d}")))
}

/// `K_j(y) e(lambda |y|^{2d})` for every support point.
pub fn chirp(piece: &KernelPiece, lambda: f64) -> Result<Vec<Complex64>> {
    piece
        .points
        .iter()
        .zip(&piece.values)
        .map(|(y, &v)| Ok(e(frac_mul(lambda, lattice_power(y, piece.d)?)) * v))
        .collect()
}

/// `m_{j,lambda}(xi)` by the finite lattice sum.
pub fn multiplier_m(piece: &KernelPiece, lambda: f64, xi: &[f64]) -> Result<Complex64> {
    if xi.len() != piece.n {
        return Err(Error::Dimension(format!("frequency of dimension {} for kernel of dimension {}", xi.len(), piece.n)));
    }
    let c = chirp(piece, lambda)?;
    Ok(piece
        .points
        .iter()
        .zip(c)
        .map(|(y, w)| {
            let dot: f64 = y.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum();
            w * e(-dot)
        })
        .sum())
}

/// The chirped kernel `y -> K_j(y) e(lambda |y|^{2d})` wrapped onto the grid.
pub fn chirp_signal(piece: &KernelPiece, lambda: f64, spec: GridSpec) -> Result<GridSignal> {
    if spec.n != piece.n {
        return Err(Error::Dimension(format!("grid of dimension {} for kernel of dimension {}", spec.n, piece.n)));
    }
    let mut f = GridSignal::zeros(spec);
    for (y, w) in piece.points.iter().zip(chirp(piece, lambda)?) {
        f.values[spec.index_wrapped(y)] += w;
    }
    Ok(f)
}

/// `m_{j,lambda}` at every dual grid point `k/N`; exact, wrap-around included.
pub fn multiplier_m_grid(piece: &KernelPiece, lambda: f64, spec: GridSpec) -> Result<Multiplier> {
    Ok(forward_dft(&chirp_signal(piece, lambda, spec)?))
}

fn check_continuous(kernel: &KernelSpec) -> Result<()> {
    if kernel.n != 1 {
        return Err(Error::Unsupported(format!(
            "the continuous multiplier is implemented for n = 1 only (got n = {}); use the lattice proxy",
            kernel.n
        )));
    }
    if !kernel.is_continuous() {
        return Err(Error::Unsupported("tabulated kernels have no continuous model".into()));
    }
    Ok(())
}

/// Integrand of `Phi_{j,lambda}(xi)` at a real point.
fn phi_integrand(j: u32, lambda: f64, xi: f64, kernel: &KernelSpec, y: f64) -> Complex64 {
    let weight = kernel.value(&[y]) * dyadic_cutoff(j, &[y]);
    if weight == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = lambda * y.abs().powi(2 * kernel.d as i32) - xi * y;
    e(phase) * weight
}

/// Panel rule over the support `2^{j-2} < |y| < 2^j`; returns the value and `int |integrand|`.
fn phi_panels(j: u32, lambda: f64, xi: f64, kernel: &KernelSpec, panels: u64, nodes: &(Vec<f64>, Vec<f64>)) -> (Complex64, f64) {
    let lo = (j as f64 - 2.0).exp2();
    let hi = (j as f64).exp2();
    let h = (hi - lo) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for sign in [-1.0, 1.0] {
        for p in 0..panels {
            let a = lo + h * p as f64;
            for (x, w) in nodes.0.iter().zip(&nodes.1) {
                let y = sign * (a + 0.5 * h * (x + 1.0));
                let v = phi_integrand(j, lambda, xi, kernel, y) * (0.5 * h * w);
                mass += v.norm();
                total += v;
            }
        }
    }
    (total, mass)
}

/// `Phi_{j,lambda}(xi) = int e(lambda |y|^{2d} - xi y) K_j(y) dy` for `n = 1`,
/// by Gauss-Legendre panels refined until two successive halvings agree.
pub fn phi_continuous(j: u32, lambda: f64, xi: f64, kernel: &KernelSpec) -> Result<Complex64> {
    check_continuous(kernel)?;
    if j == 0 || j > 40 {
        return Err(Error::Parameter(format!("scale j must lie in 1..=40, got {j}")));
    }
    let r = (j as f64).exp2();
    let d = kernel.d as f64;
    let rate = 2.0 * d * lambda.abs() * r.powf(2.0 * d - 1.0) + xi.abs() + 1.0;
    let max_h = 1.0 / (10.0 * rate);
    let span = r - r / 4.0;
    let mut panels = (span / max_h).ceil().max(1.0) as u64;
    let nodes = gauss_legendre(PHI_ORDER);
    let cost = |p: u64| 2 * p * PHI_ORDER as u64;
    if cost(panels << 1) > DEFAULT_NODE_BUDGET {
        return Err(Error::Size(format!("Phi_{j} at lambda = {lambda} needs {} nodes", cost(panels << 1))));
    }
    let (mut coarse, _) = phi_panels(j, lambda, xi, kernel, panels, &nodes);
    for _ in 0..MAX_HALVINGS {
        panels <<= 1;
        if cost(panels) > DEFAULT_NODE_BUDGET {
            break;
        }
        let (fine, mass) = phi_panels(j, lambda, xi, kernel, panels, &nodes);
        if (fine - coarse).norm() <= PHI_REL_TOL * fine.norm() + 1e-12 * mass {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::Accuracy(format!("Phi_{j}({xi}) at lambda = {lambda} did not stabilise under panel halving")))
}

/// `Phi_{j,lambda}(xi)` approximated by the Riemann sum over `(1/refine) Z^n`;
/// valid in every dimension but only a proxy for the integral.
pub fn phi_lattice_proxy(j: u32, lambda: f64, xi: &[f64], kernel: &KernelSpec, refine: u32, budget: u64) -> Result<Complex64> {
    if !refine.is_power_of_two() {
        return Err(Error::Parameter(format!("refinement must be a power of two, got {refine}")));
    }
    if xi.len() != kernel.n {
        return Err(Error::Dimension(format!("frequency of dimension {} for kernel of dimension {}", xi.len(), kernel.n)));
    }
    if !kernel.is_continuous() {
        return Err(Error::Unsupported("tabulated kernels have no continuous model".into()));
    }
    let outer = (refine as i64) << j;
    let side = (2 * outer - 1) as u128;
    let count = side.checked_pow(kernel.n as u32).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::Size(format!("lattice proxy needs {count} points, budget {budget}")));
    }
    let h = 1.0 / refine as f64;
    let scaled_lambda = lambda * h.powi(2 * kernel.d as i32);
    let mut z = vec![-(outer - 1); kernel.n];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let m = z.iter().map(|c| c.abs()).max().unwrap_or(0);
        if 4 * m > outer {
            let y: Vec<f64> = z.iter().map(|&c| c as f64 * h).collect();
            let w = kernel.value(&y) * dyadic_cutoff(j, &y);
            if w != 0.0 {
                let dot: f64 = y.iter().zip(xi).map(|(a, b)| a * b).sum();
                total += e(frac_mul(scaled_lambda, lattice_power(&z, kernel.d)?) - dot) * w;
            }
        }
        let mut axis = kernel.n;
        loop {
            if axis == 0 {
                return Ok(total * h.powi(kernel.n as i32));
            }
            axis -= 1;
            if z[axis] < outer - 1 {
                z[axis] += 1;
                break;
            }
            z[axis] = -(outer - 1);
        }
    }
}

/// Where `Phi` values come from when assembling approximants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PhiMethod {
    Quadrature,
    LatticeProxy { refine: u32 },
}

impl PhiMethod {
    pub fn is_proxy(&self) -> bool {
        matches!(self, PhiMethod::LatticeProxy { .. })
    }

    pub fn evaluate(&self, j: u32, lambda: f64, xi: &[f64], kernel: &KernelSpec) -> Result<Complex64> {
        match *self {
            PhiMethod::Quadrature => {
                if xi.len() != 1 {
                    return Err(Error::Unsupported("quadrature for Phi needs n = 1".into()));
                }
                phi_continuous(j, lambda, xi[0], kernel)
            }
            PhiMethod::LatticeProxy { refine } => {
                phi_lattice_proxy(j, lambda, xi, kernel, refine, DEFAULT_NODE_BUDGET)
            }
        }
    }
}

/// `Phi*_{j,lambda'} = Phi_{j,lambda'} 1_{|lambda'| <= radius}`.
pub fn phi_star(j: u32, lambda: f64, xi: &[f64], kernel: &KernelSpec, radius: f64, method: PhiMethod) -> Result<Complex64> {
    if lambda.abs() > radius {
        return Ok(Complex64::new(0.0, 0.0));
    }
    method.evaluate(j, lambda, xi, kernel)
}

/// `Phi_{j,lambda}(centered(k/M - beta))` for every `k` in `[0, M)`, `n = 1`.
///
/// Trapezoid sums on `(1/P) Z` evaluated by one FFT of length `M P`; `M` must
/// exceed the support length `2^{j+1}` and `P` must be a power of two.
pub fn phi_on_dual_grid(j: u32, lambda: f64, beta: f64, kernel: &KernelSpec, m: usize, oversample: usize) -> Result<Vec<Complex64>> {
    check_continuous(kernel)?;
    if !oversample.is_power_of_two() || oversample < 2 {
        return Err(Error::Parameter(format!("oversampling must be a power of two >= 2, got {oversample}")));
    }
    let support = 1usize << (j + 1);
    if m <= support {
        return Err(Error::Resolution(format!("dual grid of size {m} does not exceed the support length {support}")));
    }
    let len = m * oversample;
    let p = oversample as f64;
    let outer = (oversample as i64) << j;
    let scaled_lambda = lambda * p.powi(-2 * kernel.d as i32);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for i in -(outer - 1)..outer {
        if 4 * i.abs() <= outer {
            continue;
        }
        let y = i as f64 / p;
        let w = kernel.value(&[y]) * dyadic_cutoff(j, &[y]);
        if w == 0.0 {
            continue;
        }
        let k = (i as i128 * i as i128) as u128;
        let power = k.checked_pow(kernel.d).filter(|v| *v < 1u128 << 64).ok_or_else(|| {
            Error::Size(format!("phase exponent overflows at y = {y}"))
        })?;
        let shift = frac_mul(beta / p, i.unsigned_abs() as u128);
        let phase = frac_mul(scaled_lambda, power) + if i < 0 { -shift } else { shift };
        let idx = i.rem_euclid(len as i64) as usize;
        buf[idx] += e(phase) * (w / p);
    }
    fft_1d(&mut buf, FftDirection::Forward);
    Ok((0..m)
        .map(|k0| {
            let raw = k0 as f64 / m as f64 - beta;
            let c = centered_unit(raw);
            let shift = (raw - c).round() as i64;
            buf[(k0 as i64 - shift * m as i64).rem_euclid(len as i64) as usize]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::kernel::{kernel_piece, DEFAULT_SUPPORT_BUDGET};

    #[test]
    fn exact_fractional_phase() {
        assert_eq!(frac_mul(0.5, 3), 0.5);
        assert_eq!(frac_mul(0.75, 1 << 40), 0.0);
        assert_eq!(frac_mul(-0.25, 1), 0.75);
        let lambda = 1.0 / 3.0;
        let f = frac_mul(lambda, 1_000_000_007);
        let expected = (lambda * 1_000_000_007f64).fract();
        assert!((f - expected).abs() < 1e-6);
    }

    #[test]
    fn lattice_sum_basics() {
        let spec = KernelSpec::riesz_1d(1);
        let piece = kernel_piece(5, &spec, DEFAULT_SUPPORT_BUDGET).unwrap();
        assert!(multiplier_m(&piece, 0.0, &[0.0]).unwrap().norm() < 1e-14);
        let bound = piece.sum_abs();
        for (lambda, xi) in [(0.3, 0.1), (0.77, -0.4), (1.0, 0.5)] {
            let v = multiplier_m(&piece, lambda, &[xi]).unwrap();
            let w = multiplier_m(&piece, -lambda, &[-xi]).unwrap();
            assert!(v.norm() <= bound);
            assert!((v - w.conj()).norm() < 1e-12);
        }
        let grid = GridSpec::new(1, 128).unwrap();
        let m = multiplier_m_grid(&piece, 0.3, grid).unwrap();
        for k in [0usize, 5, 64, 100] {
            let direct = multiplier_m(&piece, 0.3, &grid.frequency(k)).unwrap();
            assert!((m.values[k] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_routes_agree() {
        let spec = KernelSpec::riesz_1d(1);
        assert!(phi_continuous(4, 0.0, 0.0, &spec).unwrap().norm() < 1e-12);
        let j = 5;
        let lambda = 3e-4;
        let m = 128;
        let grid = phi_on_dual_grid(j, lambda, 1.0 / 3.0, &spec, m, 8).unwrap();
        for k0 in [0usize, 17, 42, 64, 90, 127] {
            let xi = centered_unit(k0 as f64 / m as f64 - 1.0 / 3.0);
            let direct = phi_continuous(j, lambda, xi, &spec).unwrap();
            assert!((grid[k0] - direct).norm() <= 1e-6 * direct.norm().max(1e-3), "k0 = {k0}: {} vs {direct}", grid[k0]);
        }
        let proxy = phi_lattice_proxy(j, lambda, &[0.1], &spec, 8, DEFAULT_NODE_BUDGET).unwrap();
        let direct = phi_continuous(j, lambda, 0.1, &spec).unwrap();
        assert!((proxy - direct).norm() < 1e-6);
        assert!(phi_continuous(3, 0.0, 0.0, &KernelSpec::new(crate::circle::KernelKind::Riesz { component: 0 }, 2, 1).unwrap()).is_err());
        assert_eq!(phi_star(j, 0.5, &[0.0], &spec, 1e-3, PhiMethod::Quadrature).unwrap(), Complex64::new(0.0, 0.0));
    }
}
