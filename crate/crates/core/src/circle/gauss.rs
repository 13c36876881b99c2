//! Complete Gauss sums
//! `S(a/q, b/q) = q^-n sum_{r in [0,q)^n} e((a |r|^{2d} + b.r) / q)`
//! by direct summation in exact residue arithmetic, with a shared cache.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::grid::e;

/// Default cap on the number of summands `q^n`.
pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;

fn pow_mod(mut base: u128, mut exp: u32, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// `S(a/q, b/q)` with `|r|^2 = sum r_i^2`; numerators may be any integers.
pub fn gauss_sum(a: i64, b: &[i64], q: u64, d: u32, budget: u64) -> Result<Complex64> {
    if q == 0 {
        return param("denominator must be positive");
    }
    if d == 0 {
        return param("degree parameter d must be positive");
    }
    let n = b.len();
    if n == 0 {
        return param("dimension must be positive");
    }
    let terms = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if terms > budget as u128 {
        return Err(Error::Size(format!("Gauss sum with {terms} terms exceeds budget {budget}")));
    }
    let m = q as u128;
    let a = (a.rem_euclid(q as i64)) as u128;
    let b: Vec<u128> = b.iter().map(|&x| x.rem_euclid(q as i64) as u128).collect();
    let table: Vec<Complex64> = (0..q).map(|k| e(k as f64 / q as f64)).collect();
    let mut r = vec![0u128; n];
    let mut total = Complex64::new(0.0, 0.0);
    for _ in 0..terms as u64 {
        let sq: u128 = r.iter().map(|x| x * x % m).sum::<u128>() % m;
        let lin: u128 = r.iter().zip(&b).map(|(x, y)| x * y % m).sum::<u128>() % m;
        let phase = (a * pow_mod(sq, d, m) + lin) % m;
        total += table[phase as usize];
        for slot in r.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    Ok(total / (terms as f64))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussKey {
    pub a: u64,
    pub b: Vec<u64>,
    pub q: u64,
    pub d: u32,
}

impl GaussKey {
    pub fn new(a: i64, b: &[i64], q: u64, d: u32) -> Self {
        let m = q as i64;
        Self {
            a: a.rem_euclid(m) as u64,
            b: b.iter().map(|x| x.rem_euclid(m) as u64).collect(),
            q,
            d,
        }
    }
}

/// Memo table for Gauss sums.
///
/// Concurrent lookups are safe; two workers may compute the same entry,
/// which is harmless since values are deterministic.
#[derive(Debug, Default)]
pub struct GaussCache {
    entries: RwLock<HashMap<GaussKey, Complex64>>,
    unsaved: RwLock<Vec<GaussKey>>,
    budget: Option<u64>,
}

impl GaussCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(budget: u64) -> Self {
        Self { budget: Some(budget), ..Self::default() }
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, a: i64, b: &[i64], q: u64, d: u32) -> Result<Complex64> {
        let key = GaussKey::new(a, b, q, d);
        if let Some(v) = self.entries.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let signed: Vec<i64> = key.b.iter().map(|&x| x as i64).collect();
        let value = gauss_sum(key.a as i64, &signed, q, d, self.budget.unwrap_or(DEFAULT_TERM_BUDGET))?;
        let fresh = self.entries.write().expect("cache lock").insert(key.clone(), value).is_none();
        if fresh {
            self.unsaved.write().expect("cache lock").push(key);
        }
        Ok(value)
    }

    /// Reads records `a b_1 .. b_n q d n re im`, one per line.
    pub fn load(path: &Path) -> Result<Self> {
        let cache = Self::new();
        if !path.exists() {
            return Ok(cache);
        }
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut entries = cache.entries.write().expect("cache lock");
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = parse_record(&line)
                .ok_or_else(|| Error::Parameter(format!("malformed cache record at line {}", lineno + 1)))?;
            entries.insert(key, value);
        }
        drop(entries);
        Ok(cache)
    }

    /// Appends every entry computed since loading; returns how many were written.
    pub fn append_to(&self, path: &Path) -> Result<usize> {
        let mut unsaved = self.unsaved.write().expect("cache lock");
        let entries = self.entries.read().expect("cache lock");
        let mut out = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
        unsaved.sort();
        for key in unsaved.iter() {
            writeln!(out, "{}", format_record(key, entries[key]))?;
        }
        out.flush()?;
        let written = unsaved.len();
        unsaved.clear();
        Ok(written)
    }
}

fn format_record(key: &GaussKey, v: Complex64) -> String {
    let b: Vec<String> = key.b.iter().map(u64::to_string).collect();
    format!("{} {} {} {} {} {:e} {:e}", key.a, b.join(" "), key.q, key.d, key.b.len(), v.re, v.im)
}

fn parse_record(line: &str) -> Option<(GaussKey, Complex64)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 7 {
        return None;
    }
    let n: usize = fields[fields.len() - 3].parse().ok()?;
    if fields.len() != n + 6 {
        return None;
    }
    let a = fields[0].parse().ok()?;
    let b = fields[1..=n].iter().map(|f| f.parse().ok()).collect::<Option<Vec<u64>>>()?;
    let q = fields[n + 1].parse().ok()?;
    let d = fields[n + 2].parse().ok()?;
    let re = fields[n + 4].parse().ok()?;
    let im = fields[n + 5].parse().ok()?;
    Some((GaussKey { a, b, q, d }, Complex64::new(re, im)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sums() {
        let one = gauss_sum(0, &[0], 1, 1, DEFAULT_TERM_BUDGET).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let half = gauss_sum(1, &[0], 2, 1, DEFAULT_TERM_BUDGET).unwrap();
        assert!(half.norm() < 1e-15);
        let third = gauss_sum(1, &[0], 3, 1, DEFAULT_TERM_BUDGET).unwrap();
        assert!((third.norm() - 3f64.powf(-0.5)).abs() < 1e-14);
    }

    #[test]
    fn errors_and_budget() {
        assert!(matches!(gauss_sum(1, &[0, 0], 5000, 1, DEFAULT_TERM_BUDGET), Err(Error::Size(_))));
        assert!(gauss_sum(1, &[0], 0, 1, DEFAULT_TERM_BUDGET).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gauss.txt");
        let cache = GaussCache::new();
        let v = cache.get(2, &[1, 4], 5, 1).unwrap();
        cache.get(-3, &[1, 4], 5, 1).unwrap();
        assert_eq!(cache.get(7, &[6, -1], 5, 1).unwrap(), v);
        assert_eq!(cache.append_to(&path).unwrap(), 1);
        assert_eq!(cache.append_to(&path).unwrap(), 0);
        let loaded = GaussCache::load(&path).unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded.get(2, &[1, 4], 5, 1).unwrap(), v);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2 1 4 5 1 2 "));
    }
}
