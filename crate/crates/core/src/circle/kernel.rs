//! Calderon-Zygmund kernels and their dyadic pieces `K_j = K psi(2^{-j} .)`.

use serde::{Deserialize, Serialize};

use crate::bump::psi;
use crate::error::{param, Error, Result};

/// Default cap on the number of lattice points in one kernel piece.
pub const DEFAULT_SUPPORT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    /// `K(y) = 1/y` on `Z \ {0}`.
    Riesz1d,
    /// `K(y) = y_i / |y|^{n+1}`.
    Riesz { component: usize },
    /// Explicit values on finitely many points, zero elsewhere.
    Table { points: Vec<(Vec<i64>, f64)>, decay_constant: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub n: usize,
    pub d: u32,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, n: usize, d: u32) -> Result<Self> {
        if n == 0 {
            return param("dimension must be positive");
        }
        if d == 0 {
            return param("degree parameter d must be positive");
        }
        match &kind {
            KernelKind::Riesz1d if n != 1 => return param("riesz_1d requires n = 1"),
            KernelKind::Riesz { component } if *component >= n => {
                return param(format!("Riesz component {component} out of range for n = {n}"))
            }
            KernelKind::Table { points, decay_constant } => {
                for (y, v) in points {
                    if y.len() != n {
                        return Err(Error::Dimension(format!("table point {y:?} in dimension {n}")));
                    }
                    if y.iter().all(|&c| c == 0) {
                        return param("kernel tables must not contain the origin");
                    }
                    let norm = y.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
                    if !v.is_finite() || v.abs() > decay_constant * norm.powi(-(n as i32)) * (1.0 + 1e-12) {
                        return param(format!("table value {v} at {y:?} violates the declared decay"));
                    }
                }
            }
            _ => {}
        }
        Ok(Self { kind, n, d })
    }

    pub fn riesz_1d(d: u32) -> Self {
        Self { kind: KernelKind::Riesz1d, n: 1, d }
    }

    /// `K(y)` at a real point (`0` at the origin).
    pub fn value(&self, y: &[f64]) -> f64 {
        let norm_sq: f64 = y.iter().map(|c| c * c).sum();
        if norm_sq == 0.0 {
            return 0.0;
        }
        match &self.kind {
            KernelKind::Riesz1d => 1.0 / y[0],
            KernelKind::Riesz { component } => y[*component] / norm_sq.powf((self.n as f64 + 1.0) / 2.0),
            KernelKind::Table { points, .. } => points
                .iter()
                .find(|(p, _)| p.iter().zip(y).all(|(&a, &b)| a as f64 == b))
                .map_or(0.0, |(_, v)| *v),
        }
    }

    /// Whether `K` is defined off the lattice (needed for the continuous multiplier).
    pub fn is_continuous(&self) -> bool {
        !matches!(self.kind, KernelKind::Table { .. })
    }
}

/// Nonzero values of `K_j` on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPiece {
    pub j: u32,
    pub n: usize,
    pub d: u32,
    pub points: Vec<Vec<i64>>,
    pub values: Vec<f64>,
}

impl KernelPiece {
    pub fn sum_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// Largest `|y|_inf` in the support.
    pub fn radius(&self) -> i64 {
        self.points.iter().flat_map(|y| y.iter().map(|c| c.abs())).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `psi(2^{-j} y)`, exact in the scaling.
pub fn dyadic_cutoff(j: u32, y: &[f64]) -> f64 {
    let scale = (-(j as f64)).exp2();
    let scaled: Vec<f64> = y.iter().map(|c| c * scale).collect();
    psi(&scaled)
}

/// `K_j` on lattice points where `psi(2^{-j} y) > 0`, i.e. `2^{j-2} < |y|_inf < 2^j`.
pub fn kernel_piece(j: u32, spec: &KernelSpec, budget: u64) -> Result<KernelPiece> {
    if j == 0 || j > 40 {
        return param(format!("scale j must lie in 1..=40, got {j}"));
    }
    let outer: i64 = 1 << j;
    let inner = (outer as f64) / 4.0;
    let side = (2 * outer - 1) as u128;
    let count = side.checked_pow(spec.n as u32).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::Size(format!("kernel piece K_{j} spans {count} points, budget {budget}")));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut push = |y: Vec<i64>| {
        let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
        let w = dyadic_cutoff(j, &yf);
        if w > 0.0 {
            let v = spec.value(&yf) * w;
            if v != 0.0 {
                points.push(y);
                values.push(v);
            }
        }
    };
    if let KernelKind::Table { points: table, .. } = &spec.kind {
        for (y, _) in table {
            let m = y.iter().map(|c| c.abs()).max().unwrap_or(0);
            if (m as f64) > inner && m < outer {
                push(y.clone());
            }
        }
        return Ok(KernelPiece { j, n: spec.n, d: spec.d, points, values });
    }
    let mut y = vec![-(outer - 1); spec.n];
    loop {
        let m = y.iter().map(|c| c.abs()).max().unwrap_or(0);
        if (m as f64) > inner {
            push(y.clone());
        }
        let mut axis = spec.n;
        loop {
            if axis == 0 {
                return Ok(KernelPiece { j, n: spec.n, d: spec.d, points, values });
            }
            axis -= 1;
            if y[axis] < outer - 1 {
                y[axis] += 1;
                break;
            }
            y[axis] = -(outer - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::chi0;

    #[test]
    fn riesz_pieces_cancel() {
        let spec = KernelSpec::riesz_1d(1);
        for j in 1..10 {
            let piece = kernel_piece(j, &spec, DEFAULT_SUPPORT_BUDGET).unwrap();
            let total: f64 = piece.values.iter().sum();
            assert!(total.abs() < 1e-14, "j = {j}: {total}");
            assert!(piece.points.iter().all(|y| y[0] != 0));
            assert!(piece.radius() < 1 << j);
        }
        assert_eq!(kernel_piece(1, &spec, 10).unwrap().points, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn pieces_telescope() {
        let spec = KernelSpec::new(KernelKind::Riesz { component: 1 }, 2, 1).unwrap();
        let top = 5;
        let pieces: Vec<KernelPiece> =
            (1..=top).map(|j| kernel_piece(j, &spec, DEFAULT_SUPPORT_BUDGET).unwrap()).collect();
        let scale = (-(top as f64)).exp2();
        for y0 in -40i64..=40 {
            for y1 in [-33i64, -7, -1, 0, 2, 15, 31] {
                let y = vec![y0, y1];
                let total: f64 = pieces
                    .iter()
                    .flat_map(|p| p.points.iter().zip(&p.values).filter(|(pt, _)| **pt == y).map(|(_, v)| *v))
                    .sum();
                let yf = [y0 as f64, y1 as f64];
                let expected = spec.value(&yf) * (chi0(&[yf[0] * scale, yf[1] * scale]) - chi0(&yf));
                assert!((total - expected).abs() < 1e-14, "{y:?}: {total} vs {expected}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(kernel_piece(20, &KernelSpec::new(KernelKind::Riesz { component: 0 }, 2, 1).unwrap(), 1000), Err(Error::Size(_))));
        assert!(KernelSpec::new(KernelKind::Riesz1d, 2, 1).is_err());
        let table = KernelKind::Table { points: vec![(vec![3], 0.5), (vec![-3], -0.5)], decay_constant: 2.0 };
        let spec = KernelSpec::new(table, 1, 1).unwrap();
        let piece = kernel_piece(2, &spec, 100).unwrap();
        assert_eq!(piece.points, vec![vec![3], vec![-3]]);
        let bad = KernelKind::Table { points: vec![(vec![1], 5.0)], decay_constant: 1.0 };
        assert!(KernelSpec::new(bad, 1, 1).is_err());
    }
}
