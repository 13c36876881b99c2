//! Smooth bump functions and the band-limited kernel `phi`.
//!
//! The base bump is the tensor product `chi0(xi) = prod_i eta(xi_i)` with
//! `eta(t) = s(2 - 2|t|)` and the smooth step `s(u) = B(u) / (B(u) + B(1 - u))`,
//! `B(u) = exp(-1/u)` for `u > 0`. It is supported in `[-1, 1]^n` and equals 1
//! on `[-1/2, 1/2]^n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{centered_unit, inverse_dft, GridSignal, GridSpec, Multiplier};

#[inline]
fn exp_bump(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `u <= 0`, 1 for `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = exp_bump(u);
    a / (a + exp_bump(1.0 - u))
}

/// One-dimensional profile of `chi0`.
pub fn eta(t: f64) -> f64 {
    smooth_step(2.0 - 2.0 * t.abs())
}

pub fn chi0(xi: &[f64]) -> f64 {
    xi.iter().map(|&t| eta(t)).product()
}

/// `chi0(xi / 2)`: equals 1 on the support of `chi0`.
pub fn chi0_tilde(xi: &[f64]) -> f64 {
    xi.iter().map(|&t| eta(t / 2.0)).product()
}

/// Dyadic annulus `psi = chi0 - chi0(2 .)`.
pub fn psi(y: &[f64]) -> f64 {
    let doubled: Vec<f64> = y.iter().map(|t| 2.0 * t).collect();
    chi0(y) - chi0(&doubled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    Chi0,
    Chi0Tilde,
    PsiAnnulus,
}

/// A bump `xi -> kind(A^-1 xi)` with a diagonal contraction `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    pub diag: Vec<f64>,
}

impl BumpSpec {
    pub fn new(kind: BumpKind, diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::Parameter(format!(
                "diagonal contraction entries must lie in (0, 1], got {diag:?}"
            )));
        }
        Ok(Self { kind, diag })
    }

    pub fn chi0(n: usize) -> Self {
        Self { kind: BumpKind::Chi0, diag: vec![1.0; n] }
    }

    /// `chi_s = chi0(2^{kappa s} .)`.
    pub fn chi_s(n: usize, kappa: u32, s: u32) -> Self {
        Self { kind: BumpKind::Chi0, diag: vec![scale_for(kappa, s); n] }
    }

    /// `chi0_tilde(2^{kappa s} .)`, equal to 1 on the support of `chi_s`.
    pub fn chi_s_tilde(n: usize, kappa: u32, s: u32) -> Self {
        Self { kind: BumpKind::Chi0Tilde, diag: vec![scale_for(kappa, s); n] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Volume of `U = A([-1/2, 1/2]^n)`.
    pub fn measure_u(&self) -> f64 {
        self.diag.iter().product()
    }

    /// Half-width of the region where the bump equals 1, per axis.
    pub fn plateau_half_width(&self) -> f64 {
        let base = match self.kind {
            BumpKind::Chi0 => 0.5,
            BumpKind::Chi0Tilde => 1.0,
            BumpKind::PsiAnnulus => 0.25,
        };
        base * self.diag.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Half-width of the support, per axis (the largest one).
    pub fn support_half_width(&self) -> f64 {
        let base = match self.kind {
            BumpKind::Chi0 | BumpKind::PsiAnnulus => 1.0,
            BumpKind::Chi0Tilde => 2.0,
        };
        base * self.diag.iter().cloned().fold(0.0, f64::max)
    }

    /// Evaluates the bump at `xi` (a centered representative).
    pub fn value(&self, xi: &[f64]) -> f64 {
        let scaled: Vec<f64> = xi.iter().zip(&self.diag).map(|(x, a)| x / a).collect();
        match self.kind {
            BumpKind::Chi0 => chi0(&scaled),
            BumpKind::Chi0Tilde => chi0_tilde(&scaled),
            BumpKind::PsiAnnulus => psi(&scaled),
        }
    }

    /// Value at `xi - center` on the torus.
    pub fn value_at_offset(&self, xi: &[f64], center: &[f64]) -> f64 {
        let d: Vec<f64> = xi.iter().zip(center).map(|(x, c)| centered_unit(x - c)).collect();
        self.value(&d)
    }

    /// The bump sampled on the dual grid, translated to `center`.
    pub fn multiplier(&self, spec: GridSpec, center: &[f64]) -> Result<Multiplier> {
        if spec.n != self.dim() || center.len() != spec.n {
            return Err(Error::Dimension(format!(
                "bump of dimension {} on grid of dimension {}",
                self.dim(),
                spec.n
            )));
        }
        Ok(Multiplier::from_fn(spec, |xi| Complex64::new(self.value_at_offset(xi, center), 0.0)))
    }
}

/// `2^{-kappa s}`.
pub fn scale_for(kappa: u32, s: u32) -> f64 {
    (-((kappa * s) as f64)).exp2()
}

/// Checks that the grid resolves the plateau of `b` with at least 4 points.
pub fn check_resolution(b: &BumpSpec, spec: GridSpec) -> Result<()> {
    let resolved = spec.side as f64 * b.plateau_half_width();
    if resolved < 4.0 {
        return Err(Error::Resolution(format!(
            "N = {} resolves the bump plateau with only {resolved:.3} points (need 4)",
            spec.side
        )));
    }
    Ok(())
}

/// `phi(y) = N^-n sum_k chi(xi_k) e(y.k/N)`.
pub fn phi_from_bump(b: &BumpSpec, spec: GridSpec) -> Result<GridSignal> {
    check_resolution(b, spec)?;
    let chi = b.multiplier(spec, &vec![0.0; spec.n])?;
    Ok(inverse_dft(&chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(chi0(&[0.0]), 1.0);
        assert_eq!(chi0(&[0.5, -0.5]), 1.0);
        assert_eq!(chi0(&[1.0, 0.0]), 0.0);
        assert_eq!(chi0(&[0.2, -1.3]), 0.0);
        let mid = chi0(&[0.75]);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((mid - 0.5).abs() < 1e-15, "symmetric step gives 1/2 at the midpoint");
    }

    #[test]
    fn scaled_plateau() {
        let b = BumpSpec::chi_s(2, 10, 1);
        let t = (-11f64).exp2();
        assert_eq!(b.value(&[t, -t]), 1.0);
        assert_eq!(b.value(&[(-9f64).exp2(), 0.0]), 0.0);
    }

    #[test]
    fn tilde_dominates() {
        for i in 0..2000 {
            let t = -2.0 + 4.0 * i as f64 / 1999.0;
            assert_eq!(chi0_tilde(&[t]) * chi0(&[t]), chi0(&[t]));
        }
    }

    #[test]
    fn full_band_phi_is_delta() {
        let spec = GridSpec::new(1, 16).unwrap();
        let phi = phi_from_bump(&BumpSpec::chi0(1), spec).unwrap();
        assert!((phi.values[0].re - 1.0).abs() < 1e-14);
        assert!(phi.values[1..].iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn phi_l2_scales_like_measure() {
        let spec = GridSpec::new(1, 64).unwrap();
        let b = BumpSpec::chi_s(1, 2, 1);
        let phi = phi_from_bump(&b, spec).unwrap();
        let ratio = phi.norm_sqr() / b.measure_u();
        assert!((0.125..=8.0).contains(&ratio), "ratio {ratio}");
        assert!(phi.values[0].re > 0.0);
        for p in [1.0, 2.0, f64::INFINITY] {
            let expected = b.measure_u().powf(1.0 - 1.0 / p);
            let r = phi.norm_lp(p) / expected;
            assert!((0.125..=8.0).contains(&r), "p = {p}: {r}");
        }
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let spec = GridSpec::new(1, 16).unwrap();
        let err = phi_from_bump(&BumpSpec::chi_s(1, 3, 1), spec).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
    }

    #[test]
    fn rejects_non_contractions() {
        assert!(BumpSpec::new(BumpKind::Chi0, vec![1.5]).is_err());
        assert!(BumpSpec::new(BumpKind::Chi0, vec![0.0]).is_err());
        assert!(BumpSpec::new(BumpKind::Chi0, vec![0.5, 0.25]).is_ok());
    }
}
