//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls the routine it is used to check.
#![allow(dead_code)]

use std::f64::consts::TAU;

use mflab::bump::chi0;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    // Box-Muller, kept local so the oracle does not share sampling code.
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random();
    Complex64::from_polar((-2.0 * u.ln()).sqrt(), TAU * v)
}

fn l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `max_{t_0 < ... < t_k} (sum |F(t_i) - F(t_{i-1})|^r)^{1/r}` over all subsets.
pub fn variation_brute(rows: &[Vec<Complex64>], r: f64) -> f64 {
    let len = rows.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << len) {
        let chosen: Vec<usize> = (0..len).filter(|i| mask & (1 << i) != 0).collect();
        let s: f64 = chosen.windows(2).map(|w| l2(&rows[w[0]], &rows[w[1]]).powf(r)).sum();
        best = best.max(s);
    }
    best.powf(1.0 / r)
}

/// Longest chain `t_0 < ... < t_k` with every step of size at least `lambda`.
pub fn max_jumps_brute(rows: &[Vec<Complex64>], lambda: f64) -> usize {
    let len = rows.len();
    let mut best = 0usize;
    for mask in 0u32..(1 << len) {
        let chosen: Vec<usize> = (0..len).filter(|i| mask & (1 << i) != 0).collect();
        if chosen.windows(2).all(|w| l2(&rows[w[0]], &rows[w[1]]) >= lambda) {
            best = best.max(chosen.len().saturating_sub(1));
        }
    }
    best
}

fn coords(mut index: usize, n: usize, side: usize) -> Vec<usize> {
    let mut c = vec![0; n];
    for slot in c.iter_mut().rev() {
        *slot = index % side;
        index /= side;
    }
    c
}

fn index(c: &[usize], side: usize) -> usize {
    c.iter().fold(0, |acc, &x| acc * side + x)
}

/// `sum_x f(x) e(sign x.k / N)` by the defining double loop.
pub fn naive_dft(values: &[Complex64], n: usize, side: usize, sign: f64) -> Vec<Complex64> {
    let len = values.len();
    (0..len)
        .map(|k| {
            let kc = coords(k, n, side);
            (0..len)
                .map(|x| {
                    let xc = coords(x, n, side);
                    let dot: usize = xc.iter().zip(&kc).map(|(a, b)| a * b % side).sum();
                    values[x] * cis(sign * (dot % side) as f64 / side as f64)
                })
                .sum()
        })
        .collect()
}

/// `(K * f)(x) = sum_y K(y) f(x - y)` with periodic wrap.
pub fn periodic_convolution(kernel: &[Complex64], f: &[Complex64], n: usize, side: usize) -> Vec<Complex64> {
    let len = f.len();
    (0..len)
        .map(|x| {
            let xc = coords(x, n, side);
            (0..len)
                .map(|y| {
                    let yc = coords(y, n, side);
                    let d: Vec<usize> = xc.iter().zip(&yc).map(|(a, b)| (a + side - b) % side).collect();
                    kernel[y] * f[index(&d, side)]
                })
                .sum()
        })
        .collect()
}

/// `q^{-n} sum_{r mod q} e((a |r|^{2d} + b.r) / q)` with residues reduced by `u128` arithmetic.
pub fn gauss_sum_brute(a: i64, b: &[i64], q: u64, d: u32) -> Complex64 {
    let n = b.len();
    let qq = q as i128;
    let mut total = Complex64::new(0.0, 0.0);
    for idx in 0..(q as usize).pow(n as u32) {
        let r = coords(idx, n, q as usize);
        let norm2: i128 = r.iter().map(|&x| (x * x) as i128).sum();
        let mut pow = 1i128;
        for _ in 0..d {
            pow = pow * (norm2 % qq) % qq;
        }
        let lin: i128 = r.iter().zip(b).map(|(&x, &bi)| x as i128 * bi as i128).sum();
        let phase = ((a as i128 * pow + lin) % qq + qq) % qq;
        total += cis(phase as f64 / q as f64);
    }
    total / (q as f64).powi(n as i32)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every `(a, b, q)` with `2^{s-1} <= q < 2^s`, `0 <= a, b_i < q`, `gcd(a, b, q) = 1`.
pub fn rs_double_loop(s: u32, n: usize) -> Vec<(u64, Vec<u64>, u64)> {
    let mut out = Vec::new();
    for q in (1u64 << (s - 1))..(1u64 << s) {
        for a in 0..q {
            for idx in 0..(q as usize).pow(n as u32) {
                let b: Vec<u64> = coords(idx, n, q as usize).into_iter().map(|x| x as u64).collect();
                if b.iter().fold(gcd(a, q), |g, &x| gcd(g, x)) == 1 {
                    out.push((a, b, q));
                }
            }
        }
    }
    out
}

/// Closest reduced `a/q` with `q <= q_bound` (ties to the smaller `q`) when it
/// lies within `radius` of `lambda`, by scanning every denominator.
pub fn farey_membership(lambda: f64, q_bound: u64, radius: f64) -> Option<(i64, u64)> {
    let mut best: Option<(i64, u64, f64)> = None;
    for q in 1..=q_bound {
        let center = (lambda * q as f64).round() as i64;
        for a in [center - 1, center, center + 1] {
            if gcd(a.unsigned_abs(), q) != 1 {
                continue;
            }
            let dist = (lambda - a as f64 / q as f64).abs();
            if best.is_none_or(|(_, _, d)| dist < d) {
                best = Some((a, q, dist));
            }
        }
    }
    best.filter(|&(_, _, d)| d <= radius).map(|(a, q, _)| (a, q))
}

/// `psi(2^{-j} t)` in one dimension.
fn cutoff(j: u32, t: f64) -> f64 {
    let s = t / (1u64 << j) as f64;
    chi0(&[s]) - chi0(&[2.0 * s])
}

/// `K_j(y) = psi(2^{-j} y) / y`.
pub fn riesz_piece(j: u32, y: i64) -> f64 {
    if y == 0 {
        0.0
    } else {
        cutoff(j, y as f64) / y as f64
    }
}

/// `sum_y e(lambda y^{2d} - xi y) psi(2^{-j} y) / y` over the integers.
pub fn space_side_multiplier(j: u32, lambda: f64, xi: f64, d: u32) -> Complex64 {
    let outer = 1i64 << j;
    (-outer..=outer)
        .filter(|&y| y != 0)
        .map(|y| {
            let phase = (lambda * (y as f64).powi(2 * d as i32)).rem_euclid(1.0) - (xi * y as f64).rem_euclid(1.0);
            cis(phase) * (cutoff(j, y as f64) / y as f64)
        })
        .sum()
}

/// Midpoint rule for `int e(lambda t^{2d} - xi t) psi(2^{-j} t) / t dt` with
/// `nodes` points on each half of the support.
pub fn phi_riemann(j: u32, lambda: f64, xi: f64, d: u32, nodes: usize) -> Complex64 {
    let (lo, hi) = ((1u64 << j) as f64 / 4.0, (1u64 << j) as f64);
    let h = (hi - lo) / nodes as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let t = lo + (k as f64 + 0.5) * h;
        let w = cutoff(j, t) / t * h;
        let even = lambda * t.powi(2 * d as i32);
        total += (cis(even - xi * t) - cis(even + xi * t)) * w;
    }
    total
}

/// `int_0^inf min(L^{1/2} (a/l)^{r/q}, (a/l)^{r/2}) dl` by Simpson's rule in
/// `u = ln l`, split at the kink.
pub fn splitting_integral_numeric(a: f64, labels: f64, r: f64, q: f64) -> f64 {
    // In logarithms: `l` spans hundreds of e-folds when an exponent is near its limit.
    let f = |u: f64| {
        let log_x = a.ln() - u;
        ((0.5 * labels.ln() + (r / q) * log_x).min(0.5 * r * log_x) + u).exp()
    };
    // `L^{1/2} x^{r/q} = x^{r/2}` at `x = L^{1/(r - 2r/q)}`.
    let kink = (a / labels.powf(1.0 / (r - 2.0 * r / q))).ln();
    let simpson = |lo: f64, hi: f64, m: usize| {
        let h = (hi - lo) / m as f64;
        let mut s = f(lo) + f(hi);
        for k in 1..m {
            s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    // Tails decay like `e^{-(1 - r/q)|u|}` below the kink and `e^{-(r/2 - 1)u}` above.
    let below = 30.0 / (1.0 - r / q);
    let above = 30.0 / (r / 2.0 - 1.0);
    let nodes = |span: f64| 2 * (span * 100.0) as usize;
    simpson(kink - below, kink, nodes(below)) + simpson(kink, kink + above, nodes(above))
}
