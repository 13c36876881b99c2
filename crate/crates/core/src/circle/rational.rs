//! Reduced fractions and the rational frequency sets `R_s`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Default cap on the number of candidate tuples examined by [`enumerate_rs`].
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// `a/q` in lowest terms, `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedRational {
    pub a: i64,
    pub q: u64,
}

impl ReducedRational {
    pub fn new(a: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return param("denominator must be positive");
        }
        let g = (a.unsigned_abs()).gcd(&q).max(1);
        Ok(Self { a: a / g as i64, q: q / g })
    }

    /// Representative with numerator in `[0, q)`.
    pub fn canonical(self) -> Self {
        Self { a: self.a.rem_euclid(self.q as i64), q: self.q }
    }

    pub fn value(self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

impl fmt::Display for ReducedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// `(a/q, b/q)` with `gcd(a, b_1, ..., b_n, q) = 1`, `a, b_i` in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFreqPoint {
    pub a: u64,
    pub b: Vec<u64>,
    pub q: u64,
}

impl RationalFreqPoint {
    pub fn new(a: u64, b: Vec<u64>, q: u64) -> Result<Self> {
        if q == 0 || a >= q || b.iter().any(|&x| x >= q) {
            return param(format!("numerators must lie in [0, q), got a = {a}, b = {b:?}, q = {q}"));
        }
        if joint_gcd(a, &b, q) != 1 {
            return param(format!("gcd(a, b, q) must be 1 for ({a}, {b:?}, {q})"));
        }
        Ok(Self { a, b, q })
    }

    /// `alpha = a/q` as a reduced fraction.
    pub fn alpha(&self) -> ReducedRational {
        ReducedRational::new(self.a as i64, self.q).expect("q > 0")
    }

    pub fn beta(&self) -> Vec<f64> {
        self.b.iter().map(|&b| b as f64 / self.q as f64).collect()
    }

    /// Dyadic level `s` with `q` in `[2^{s-1}, 2^s)`.
    pub fn level(&self) -> u32 {
        level_of(self.q)
    }
}

pub fn level_of(q: u64) -> u32 {
    64 - q.leading_zeros()
}

pub(crate) fn joint_gcd(a: u64, b: &[u64], q: u64) -> u64 {
    b.iter().fold(a.gcd(&q), |g, &x| g.gcd(&x))
}

/// Every point of `R_s` in dimension `n`, ordered by `q`, then `b`, then `a`.
pub fn enumerate_rs(s: u32, n: usize, budget: u64) -> Result<Vec<RationalFreqPoint>> {
    if s == 0 || s > 31 {
        return param(format!("level s must lie in 1..=31, got {s}"));
    }
    if n == 0 {
        return param("dimension must be positive");
    }
    let (lo, hi) = (1u64 << (s - 1), 1u64 << s);
    let mut work: u64 = 0;
    for q in lo..hi {
        let tuples = (q as u128).pow(n as u32 + 1);
        work = work.saturating_add(tuples.min(u64::MAX as u128) as u64);
    }
    if work > budget {
        return Err(Error::Size(format!("enumerating R_{s} in dimension {n} needs {work} > {budget} candidates")));
    }
    let mut out = Vec::new();
    for q in lo..hi {
        for index in 0..q.pow(n as u32) {
            let mut rest = index;
            let mut b = vec![0u64; n];
            for slot in b.iter_mut().rev() {
                *slot = rest % q;
                rest /= q;
            }
            for a in 0..q {
                if joint_gcd(a, &b, q) == 1 {
                    out.push(RationalFreqPoint { a, b: b.clone(), q });
                }
            }
        }
    }
    Ok(out)
}

/// `R_s` with its projections `A_s` and `B_s(alpha)`.
#[derive(Debug, Clone)]
pub struct RsSet {
    pub s: u32,
    pub n: usize,
    pub points: Vec<RationalFreqPoint>,
    alphas: Vec<ReducedRational>,
}

impl RsSet {
    pub fn new(s: u32, n: usize, budget: u64) -> Result<Self> {
        let points = enumerate_rs(s, n, budget)?;
        let mut alphas: Vec<ReducedRational> = points.iter().map(|p| p.alpha()).collect();
        alphas.sort_by(|x, y| x.value().total_cmp(&y.value()));
        alphas.dedup();
        Ok(Self { s, n, points, alphas })
    }

    /// `A_s`, sorted by value in `[0, 1)`.
    pub fn alphas(&self) -> &[ReducedRational] {
        &self.alphas
    }

    /// `B_s(alpha)`: the points whose first coordinate equals `alpha`.
    pub fn betas(&self, alpha: ReducedRational) -> impl Iterator<Item = &RationalFreqPoint> {
        let alpha = alpha.canonical();
        self.points.iter().filter(move |p| p.alpha() == alpha)
    }
}

/// `A_s` without enumerating `R_s`: reduced `a'/q'` whose denominator divides
/// some `q` in `[2^{s-1}, 2^s)`.
pub fn alpha_set(s: u32) -> Result<Vec<ReducedRational>> {
    if s == 0 || s > 24 {
        return param(format!("level s must lie in 1..=24, got {s}"));
    }
    let (lo, hi) = (1u64 << (s - 1), 1u64 << s);
    let mut out = Vec::new();
    for q in 1..hi {
        let divides_some = (lo..hi).any(|m| m % q == 0);
        if !divides_some {
            continue;
        }
        for a in 0..q {
            if a.gcd(&q) == 1 {
                out.push(ReducedRational { a: a as i64, q });
            }
        }
    }
    out.sort_by(|x, y| x.value().total_cmp(&y.value()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        let r1 = enumerate_rs(1, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(r1, vec![RationalFreqPoint { a: 0, b: vec![0], q: 1 }]);
        let r2 = enumerate_rs(2, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(r2.len(), 11);
        assert_eq!(r2.iter().filter(|p| p.q == 2).count(), 3);
        assert_eq!(r2.iter().filter(|p| p.q == 3).count(), 8);
        assert!(r2.iter().all(|p| joint_gcd(p.a, &p.b, p.q) == 1));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(enumerate_rs(6, 2, 1000), Err(Error::Size(_))));
    }

    #[test]
    fn alpha_views() {
        let set = RsSet::new(2, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let values: Vec<String> = set.alphas().iter().map(|a| a.to_string()).collect();
        assert_eq!(values, ["0/1", "1/3", "1/2", "2/3"]);
        assert_eq!(alpha_set(2).unwrap(), set.alphas());
        let zero = ReducedRational::new(0, 1).unwrap();
        let betas: Vec<Vec<u64>> = set.betas(zero).map(|p| p.b.clone()).collect();
        assert_eq!(betas, vec![vec![1], vec![1], vec![2]]);
    }

    #[test]
    fn reduction() {
        let r = ReducedRational::new(6, 4).unwrap();
        assert_eq!((r.a, r.q), (3, 2));
        assert_eq!(ReducedRational::new(-1, 3).unwrap().canonical().a, 2);
        assert!(ReducedRational::new(1, 0).is_err());
        assert!(RationalFreqPoint::new(2, vec![2], 4).is_err());
        assert_eq!(RationalFreqPoint::new(2, vec![1], 4).unwrap().level(), 3);
    }
}
