//! Major arcs `X_j`, best rational approximation, and `lambda` grids.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{alpha_set, ReducedRational};
use crate::error::{param, Result};

/// Slack when flooring `2^{eps1 j}`, so that exact powers of two are kept.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorArcParams {
    pub eps1: f64,
    pub j: u32,
    pub d: u32,
}

impl MajorArcParams {
    pub fn new(eps1: f64, j: u32, d: u32) -> Result<Self> {
        if d == 0 {
            return param("degree parameter d must be positive");
        }
        if !(eps1 > 0.0 && eps1 <= 0.25 / d as f64) {
            return param(format!("eps1 must lie in (0, 1/(4d)], got {eps1}"));
        }
        if j == 0 || j > 60 {
            return param(format!("scale j must lie in 1..=60, got {j}"));
        }
        Ok(Self { eps1, j, d })
    }

    /// Largest admissible denominator `floor(2^{eps1 j})`.
    pub fn q_bound(&self) -> u64 {
        ((self.eps1 * self.j as f64).exp2() + FLOOR_SLACK).floor() as u64
    }

    /// `2^{-2dj + eps1 j}`.
    pub fn radius(&self) -> f64 {
        (-(2.0 * self.d as f64 * self.j as f64) + self.eps1 * self.j as f64).exp2()
    }

    /// Levels `s` with `1 <= s <= eps1 j`.
    pub fn max_level(&self) -> u32 {
        (self.eps1 * self.j as f64 + FLOOR_SLACK).floor() as u32
    }
}

/// Smallest `j` with `j >= s / eps1`.
pub fn first_scale(s: u32, eps1: f64) -> u32 {
    ((s as f64 / eps1) - FLOOR_SLACK).ceil().max(1.0) as u32
}

/// Exact rational value of a finite float.
fn exact_ratio(x: f64) -> (BigInt, BigInt) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1u64 << 52), exponent - 1075)
    };
    let mut num = BigInt::from(mantissa);
    if negative {
        num = -num;
    }
    if exp >= 0 {
        (num << exp as usize, BigInt::one())
    } else {
        (num, BigInt::one() << (-exp) as usize)
    }
}

/// The fraction `p/q` with `q <= max_q` nearest to `x` (ties go to the
/// convergent), by continued-fraction convergents and semiconvergents.
pub fn best_approximation(x: f64, max_q: u64) -> Result<ReducedRational> {
    if !x.is_finite() {
        return param("value must be finite");
    }
    if max_q == 0 {
        return param("denominator bound must be positive");
    }
    let (mut n, mut d) = exact_ratio(x);
    let bound = BigInt::from(max_q);
    if d <= bound {
        let a = n.to_i64().ok_or_else(|| crate::Error::Parameter("value too large".into()))?;
        return ReducedRational::new(a, d.to_u64().expect("small denominator"));
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > bound {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let rem = &n - &a * &d;
        n = std::mem::replace(&mut d, rem);
        if d.is_zero() {
            break;
        }
    }
    let k = (&bound - &q0).div_floor(&q1);
    let semi_p = &p0 + &k * &p1;
    let semi_q = &q0 + &k * &q1;
    let (xn, xd) = exact_ratio(x);
    // |x - p/q| compared exactly after clearing denominators.
    let err_conv = (&xn * &q1 - &p1 * &xd).abs() * &semi_q;
    let err_semi = (&xn * &semi_q - &semi_p * &xd).abs() * &q1;
    let (p, q) = if err_semi < err_conv { (semi_p, semi_q) } else { (p1, q1) };
    let to_i = |v: &BigInt| v.to_i64().ok_or_else(|| crate::Error::Parameter("value too large".into()));
    ReducedRational::new(to_i(&p)?, to_i(&q)? as u64)
}

/// The best approximation `a/q` of `lambda` with `q <= 2^{eps1 j}`, if it lies
/// within the closed radius `2^{-2dj + eps1 j}`.
pub fn major_arc_membership(lambda: f64, p: &MajorArcParams) -> Option<ReducedRational> {
    let best = best_approximation(lambda, p.q_bound()).ok()?;
    if (lambda - best.value()).abs() <= p.radius() {
        Some(best)
    } else {
        None
    }
}

/// Distance on the circle `R/Z`.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let t = (x - y).rem_euclid(1.0);
    t.min(1.0 - t)
}

/// Centered representative of `lambda - a/q` on the circle, with the rounding
/// error of `a/q` compensated.
pub fn circle_offset(lambda: f64, alpha: ReducedRational) -> f64 {
    let q = alpha.q as f64;
    let hi = alpha.a as f64 / q;
    let lo = (-hi).mul_add(q, alpha.a as f64) / q;
    let d = (lambda - hi) - lo;
    d - (d - 0.5).ceil()
}

/// The `alpha` in `A_s` within circle distance `2^{-3s}` of `lambda`.
pub fn alpha_of_x(lambda: f64, s: u32) -> Result<Option<ReducedRational>> {
    let radius = (-3.0 * s as f64).exp2();
    Ok(alpha_set(s)?.into_iter().find(|a| circle_distance(lambda, a.value()) <= radius))
}

/// Rows `(a, q, lo, hi)` of the arcs making up `X_j` inside `[0, 1]`.
pub fn arc_table(p: &MajorArcParams) -> Vec<(ReducedRational, f64, f64)> {
    let r = p.radius();
    let mut rows = Vec::new();
    for q in 1..=p.q_bound() {
        for a in 0..=q {
            if a.gcd(&q) == 1 {
                let center = a as f64 / q as f64;
                let arc = ReducedRational { a: a as i64, q };
                rows.push((arc, (center - r).max(0.0), (center + r).min(1.0)));
            }
        }
    }
    rows.sort_by(|x, y| x.0.value().total_cmp(&y.0.value()));
    rows
}

pub fn arc_table_csv(p: &MajorArcParams) -> String {
    let mut out = String::from("a,q,center,lo,hi\n");
    for (arc, lo, hi) in arc_table(p) {
        out.push_str(&format!("{},{},{:e},{:e},{:e}\n", arc.a, arc.q, arc.value(), lo, hi));
    }
    out
}

/// Points of `(0, 1]`: the dyadic grid `k 2^{-base_bits}` plus `2 refine + 1`
/// equally spaced points across each major arc of `p`.
pub fn lambda_grid(base_bits: u32, p: &MajorArcParams, refine: usize) -> Result<Vec<f64>> {
    if base_bits > 24 {
        return param(format!("base_bits must be at most 24, got {base_bits}"));
    }
    let step = (-(base_bits as f64)).exp2();
    let mut grid: Vec<f64> = (1..=(1u64 << base_bits)).map(|k| k as f64 * step).collect();
    let r = p.radius();
    for (arc, _, _) in arc_table(p) {
        for k in -(refine as i64)..=refine as i64 {
            let offset = if refine == 0 { 0.0 } else { r * k as f64 / refine as f64 };
            let x = arc.value() + offset;
            if x > 0.0 && x <= 1.0 {
                grid.push(x);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

pub fn lambda_grid_csv(grid: &[f64]) -> String {
    let mut out = String::from("lambda\n");
    for x in grid {
        out.push_str(&format!("{x:e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn farey(x: f64, max_q: u64) -> ReducedRational {
        let mut best = ReducedRational { a: 0, q: 1 };
        let mut gap = f64::INFINITY;
        for q in 1..=max_q {
            let a = (x * q as f64).round() as i64;
            let g = (x - a as f64 / q as f64).abs();
            if g < gap {
                gap = g;
                best = ReducedRational::new(a, q).unwrap();
            }
        }
        best
    }

    #[test]
    fn membership_examples() {
        let p = MajorArcParams::new(0.1, 10, 1).unwrap();
        assert_eq!(p.q_bound(), 2);
        assert_eq!(p.radius(), (-19.0f64).exp2());
        assert_eq!(major_arc_membership(0.5, &p), Some(ReducedRational { a: 1, q: 2 }));
        assert_eq!(major_arc_membership(0.5 + (-10.0f64).exp2(), &p), None);
        assert_eq!(major_arc_membership((-25.0f64).exp2(), &p), Some(ReducedRational { a: 0, q: 1 }));
        assert_eq!(major_arc_membership(1.0, &p), Some(ReducedRational { a: 1, q: 1 }));
    }

    #[test]
    fn best_approximation_matches_scan() {
        for i in 1..2000 {
            let x = (i as f64 * 0.618_033_988_749_895).fract();
            for max_q in [1, 2, 3, 7, 16, 33] {
                let cf = best_approximation(x, max_q).unwrap();
                let scan = farey(x, max_q);
                assert!(
                    (x - cf.value()).abs() <= (x - scan.value()).abs(),
                    "x = {x}, Q = {max_q}: {cf} vs {scan}"
                );
            }
        }
        assert_eq!(best_approximation(std::f64::consts::PI, 7).unwrap().to_string(), "22/7");
        assert_eq!(best_approximation(std::f64::consts::PI, 113).unwrap().to_string(), "355/113");
    }

    #[test]
    fn alpha_windows() {
        let half = alpha_of_x(0.5 + (-8.0f64).exp2(), 2).unwrap();
        assert_eq!(half, Some(ReducedRational { a: 1, q: 2 }));
        assert_eq!(alpha_of_x(0.2, 2).unwrap(), None);
        assert_eq!(alpha_of_x(1.0 / 3.0, 2).unwrap(), Some(ReducedRational { a: 1, q: 3 }));
        assert_eq!(alpha_of_x(1.0, 2).unwrap(), Some(ReducedRational { a: 0, q: 1 }));
        let third = ReducedRational { a: 1, q: 3 };
        assert!(circle_offset(1.0 / 3.0, third).abs() < 1e-16);
        assert_eq!(circle_offset(0.0, ReducedRational { a: 1, q: 1 }), 0.0);
        assert_eq!(circle_offset(0.75, ReducedRational { a: 0, q: 1 }), -0.25);
        assert_eq!(circle_offset(0.5, ReducedRational { a: 0, q: 1 }), 0.5);
    }

    #[test]
    fn grids_and_tables() {
        let p = MajorArcParams::new(0.25, 8, 1).unwrap();
        assert_eq!(p.q_bound(), 4);
        let table = arc_table(&p);
        assert_eq!(table.len(), 7);
        let grid = lambda_grid(4, &p, 2).unwrap();
        assert!(grid.iter().all(|&x| x > 0.0 && x <= 1.0));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.contains(&(1.0 / 3.0)));
        assert!(arc_table_csv(&p).starts_with("a,q,center,lo,hi\n0,1,"));
        assert_eq!(first_scale(2, 0.25), 8);
        assert_eq!(p.max_level(), 2);
    }
}
