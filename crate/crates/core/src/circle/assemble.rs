//! Major-arc approximants `L^s_{j,lambda}`, `L^s_lambda`, `Phi^s_lambda` and
//! the error term `E_{j,lambda}`.
//!
//! `L^s_{j,lambda}(xi) = sum_{(alpha,beta) in R_s} S(alpha,-beta) Phi*_{j,lambda-alpha}(xi-beta) chi_s(xi-beta)`,
//! with `lambda - alpha` and `xi - beta` taken as centered representatives on
//! the circle. The Gauss sum carries `-beta` to match the sign of `m_{j,lambda}`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::arcs::{circle_distance, circle_offset, first_scale, major_arc_membership, MajorArcParams};
use super::gauss::GaussCache;
use super::kernel::{kernel_piece, KernelPiece, KernelSpec, DEFAULT_SUPPORT_BUDGET};
use super::multiplier::{multiplier_m, multiplier_m_grid, phi_on_dual_grid, phi_star, PhiMethod};
use super::rational::{ReducedRational, RsSet, DEFAULT_ENUMERATION_BUDGET};
use crate::bump::BumpSpec;
use crate::error::{param, Error, Result};
use crate::grid::{centered_unit, GridSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub kernel: KernelSpec,
    pub eps1: f64,
    pub kappa: u32,
    pub method: PhiMethod,
}

impl ApproxParams {
    pub fn new(kernel: KernelSpec, eps1: f64, kappa: u32, method: PhiMethod) -> Result<Self> {
        MajorArcParams::new(eps1, 1, kernel.d)?;
        if kappa == 0 {
            return param("kappa must be positive");
        }
        Ok(Self { kernel, eps1, kappa, method })
    }

    pub fn arcs(&self, j: u32) -> Result<MajorArcParams> {
        MajorArcParams::new(self.eps1, j, self.kernel.d)
    }

    pub fn bump(&self, s: u32) -> BumpSpec {
        BumpSpec::chi_s(self.kernel.n, self.kappa, s)
    }
}

/// Evaluator with memoised `R_s` sets, kernel pieces and Gauss sums.
#[derive(Debug)]
pub struct Assembler {
    pub params: ApproxParams,
    cache: Arc<GaussCache>,
    levels: RwLock<HashMap<u32, Arc<RsSet>>>,
    pieces: RwLock<HashMap<u32, Arc<KernelPiece>>>,
}

impl Assembler {
    pub fn new(params: ApproxParams, cache: Arc<GaussCache>) -> Self {
        Self { params, cache, levels: RwLock::default(), pieces: RwLock::default() }
    }

    pub fn cache(&self) -> &GaussCache {
        &self.cache
    }

    pub fn level(&self, s: u32) -> Result<Arc<RsSet>> {
        if let Some(set) = self.levels.read().expect("level lock").get(&s) {
            return Ok(set.clone());
        }
        let set = Arc::new(RsSet::new(s, self.params.kernel.n, DEFAULT_ENUMERATION_BUDGET)?);
        self.levels.write().expect("level lock").insert(s, set.clone());
        Ok(set)
    }

    pub fn piece(&self, j: u32) -> Result<Arc<KernelPiece>> {
        if let Some(p) = self.pieces.read().expect("piece lock").get(&j) {
            return Ok(p.clone());
        }
        let p = Arc::new(kernel_piece(j, &self.params.kernel, DEFAULT_SUPPORT_BUDGET)?);
        self.pieces.write().expect("piece lock").insert(j, p.clone());
        Ok(p)
    }

    /// The unique `alpha` in `A_s` whose `lambda`-window of radius `radius` holds `lambda`.
    fn active_alpha(&self, set: &RsSet, lambda: f64, radius: f64) -> Result<Option<ReducedRational>> {
        let mut hits = set.alphas().iter().filter(|a| circle_distance(lambda, a.value()) <= radius);
        let first = hits.next().copied();
        if let Some(second) = hits.next() {
            return Err(Error::Invariant(format!(
                "lambda = {lambda} lies in the windows of both {} and {second}",
                first.expect("first hit")
            )));
        }
        Ok(first)
    }

    /// `L^s_{j,lambda}(xi)`.
    pub fn level_term(&self, s: u32, j: u32, lambda: f64, xi: &[f64]) -> Result<Complex64> {
        let n = self.params.kernel.n;
        if xi.len() != n {
            return Err(Error::Dimension(format!("frequency of dimension {} for n = {n}", xi.len())));
        }
        let radius = self.params.arcs(j)?.radius();
        let set = self.level(s)?;
        let zero = Complex64::new(0.0, 0.0);
        let Some(alpha) = self.active_alpha(&set, lambda, radius)? else {
            return Ok(zero);
        };
        let offset = circle_offset(lambda, alpha);
        let bump = self.params.bump(s);
        let mut active = None;
        for point in set.betas(alpha) {
            let beta = point.beta();
            let weight = bump.value_at_offset(xi, &beta);
            if weight != 0.0 {
                if active.is_some() {
                    return Err(Error::Invariant(format!(
                        "bumps around two frequencies of B_{s}({alpha}) overlap at xi = {xi:?}"
                    )));
                }
                active = Some((point, weight));
            }
        }
        let Some((point, weight)) = active else {
            return Ok(zero);
        };
        let shifted: Vec<f64> = xi.iter().zip(point.beta()).map(|(x, b)| centered_unit(x - b)).collect();
        let phi = phi_star(j, offset, &shifted, &self.params.kernel, radius, self.params.method)?;
        if phi == zero {
            return Ok(zero);
        }
        let minus_b: Vec<i64> = point.b.iter().map(|&b| -(b as i64)).collect();
        let gauss = self.cache.get(point.a as i64, &minus_b, point.q, self.params.kernel.d)?;
        Ok(gauss * phi * weight)
    }

    /// `L^s_lambda(xi) = sum_{s/eps1 <= j <= j_max} L^s_{j,lambda}(xi)`.
    pub fn level_sum(&self, s: u32, j_max: u32, lambda: f64, xi: &[f64]) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for j in first_scale(s, self.params.eps1)..=j_max {
            total += self.level_term(s, j, lambda, xi)?;
        }
        Ok(total)
    }

    /// `Phi^s_lambda(xi) = sum_{s/eps1 <= j <= j_max} Phi*_{j,lambda}(xi) chi_s(xi)`.
    pub fn phi_s(&self, s: u32, j_max: u32, lambda: f64, xi: &[f64]) -> Result<Complex64> {
        let weight = self.params.bump(s).value_at_offset(xi, &vec![0.0; xi.len()]);
        let mut total = Complex64::new(0.0, 0.0);
        for j in first_scale(s, self.params.eps1)..=j_max {
            let radius = self.params.arcs(j)?.radius();
            if radius >= 1.0 {
                return Err(Error::Invariant(format!("indicator radius {radius} at j = {j} reaches lambda = 1")));
            }
            if weight != 0.0 {
                total += phi_star(j, lambda, xi, &self.params.kernel, radius, self.params.method)? * weight;
            }
        }
        Ok(total)
    }

    /// `E_{j,lambda}(xi) = m_{j,lambda}(xi) 1_{X_j}(lambda) - sum_{1 <= s <= eps1 j} L^s_{j,lambda}(xi)`.
    pub fn error_term(&self, j: u32, lambda: f64, xi: &[f64]) -> Result<Complex64> {
        let arcs = self.params.arcs(j)?;
        let mut total = if major_arc_membership(lambda, &arcs).is_some() {
            multiplier_m(&*self.piece(j)?, lambda, xi)?
        } else {
            Complex64::new(0.0, 0.0)
        };
        for s in 1..=arcs.max_level() {
            total -= self.level_term(s, j, lambda, xi)?;
        }
        Ok(total)
    }

    /// `sum_{s in levels} L^s_{j,lambda}(k/M)` for every `k`, `n = 1`, via the spectral `Phi` route.
    pub fn level_terms_on_grid(&self, levels: &[u32], j: u32, lambda: f64, m: usize, oversample: usize) -> Result<Vec<Complex64>> {
        if self.params.kernel.n != 1 {
            return Err(Error::Unsupported("grid assembly is implemented for n = 1 only".into()));
        }
        let radius = self.params.arcs(j)?.radius();
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        let mut hits = vec![0u8; m];
        for &s in levels {
            let set = self.level(s)?;
            let Some(alpha) = self.active_alpha(&set, lambda, radius)? else {
                continue;
            };
            let offset = circle_offset(lambda, alpha);
            if offset.abs() > radius {
                continue;
            }
            let bump = self.params.bump(s);
            for point in set.betas(alpha) {
                let beta = point.beta()[0];
                let gauss = self.cache.get(point.a as i64, &[-(point.b[0] as i64)], point.q, self.params.kernel.d)?;
                let phi = phi_on_dual_grid(j, offset, beta, &self.params.kernel, m, oversample)?;
                for (k, slot) in out.iter_mut().enumerate() {
                    let weight = bump.value_at_offset(&[k as f64 / m as f64], &[beta]);
                    if weight != 0.0 {
                        hits[k] += 1;
                        if hits[k] > 1 {
                            return Err(Error::Invariant(format!("approximant supports overlap at k = {k}")));
                        }
                        *slot += gauss * phi[k] * weight;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `E_{j,lambda}(k/M)` for every `k`, `n = 1`; `levels` restricts the subtracted
    /// approximants (all of `1..=eps1 j` when `None`).
    pub fn error_term_on_grid(&self, j: u32, lambda: f64, m: usize, oversample: usize, levels: Option<&[u32]>) -> Result<Vec<Complex64>> {
        let arcs = self.params.arcs(j)?;
        let spec = GridSpec::new(1, m)?;
        let mut total = if major_arc_membership(lambda, &arcs).is_some() {
            multiplier_m_grid(&*self.piece(j)?, lambda, spec)?.values
        } else {
            vec![Complex64::new(0.0, 0.0); m]
        };
        let all: Vec<u32> = (1..=arcs.max_level()).collect();
        let approx = self.level_terms_on_grid(levels.unwrap_or(&all), j, lambda, m, oversample)?;
        for (t, a) in total.iter_mut().zip(approx) {
            *t -= a;
        }
        Ok(total)
    }
}

/// `L^{s,2}_alpha(xi) = sum_{beta in B_s(alpha)} S(alpha, beta) chi_s(xi - beta)`; zero when `alpha` is not in `A_s`.
pub fn weyl_multiplier_l2(set: &RsSet, alpha: ReducedRational, xi: &[f64], d: u32, kappa: u32, cache: &GaussCache) -> Result<Complex64> {
    if xi.len() != set.n {
        return Err(Error::Dimension(format!("frequency of dimension {} for n = {}", xi.len(), set.n)));
    }
    let bump = BumpSpec::chi_s(set.n, kappa, set.s);
    let mut total = Complex64::new(0.0, 0.0);
    for point in set.betas(alpha) {
        let weight = bump.value_at_offset(xi, &point.beta());
        if weight != 0.0 {
            let b: Vec<i64> = point.b.iter().map(|&x| x as i64).collect();
            total += cache.get(point.a as i64, &b, point.q, d)? * weight;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assembler(eps1: f64) -> Assembler {
        let params = ApproxParams::new(KernelSpec::riesz_1d(1), eps1, 2, PhiMethod::Quadrature).unwrap();
        Assembler::new(params, Arc::new(GaussCache::new()))
    }

    #[test]
    fn single_level_reduces_to_phi() {
        let asm = assembler(0.25);
        let j = 5;
        let radius = asm.params.arcs(j).unwrap().radius();
        let lambda = radius / 3.0;
        for xi in [0.0, 0.1, 0.2, 0.3] {
            let l = asm.level_term(1, j, lambda, &[xi]).unwrap();
            let chi = asm.params.bump(1).value(&[xi]);
            let expected = phi_star(j, lambda, &[xi], &asm.params.kernel, radius, PhiMethod::Quadrature).unwrap() * chi;
            assert!((l - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn vanishing_cases() {
        let asm = assembler(0.25);
        assert_eq!(asm.level_term(2, 8, 0.2, &[0.5]).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(asm.level_term(2, 8, 0.5, &[0.25]).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(asm.phi_s(1, 6, 1.0, &[0.0]).unwrap(), Complex64::new(0.0, 0.0));
        let small_j = asm.error_term(3, 0.5, &[0.1]).unwrap();
        assert_eq!(small_j, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn weyl_multiplier_examples() {
        let cache = GaussCache::new();
        let set = RsSet::new(1, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let zero = ReducedRational::new(0, 1).unwrap();
        let v = weyl_multiplier_l2(&set, zero, &[0.0], 1, 2, &cache).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let set3 = RsSet::new(3, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let third = ReducedRational::new(1, 7).unwrap();
        let between = weyl_multiplier_l2(&set3, third, &[0.5 / 7.0], 1, 3, &cache).unwrap();
        assert_eq!(between, Complex64::new(0.0, 0.0));
        let missing = ReducedRational::new(1, 11).unwrap();
        assert_eq!(weyl_multiplier_l2(&set3, missing, &[0.0], 1, 3, &cache).unwrap(), Complex64::new(0.0, 0.0));
    }
}
