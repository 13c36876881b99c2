//! r-variation seminorms and lambda-jump counts of finite time series.
//!
//! For samples `F(t_0), ..., F(t_{J-1})` in a finite-dimensional complex
//! Hilbert space,
//!
//! ```text
//! V^r(F) = sup over t_{i_0} < ... < t_{i_k} of ( sum_m |F(t_{i_m}) - F(t_{i_{m-1}})|^r )^{1/r}
//! ```
//!
//! is computed exactly in `O(J^2)` by dynamic programming over the last
//! chosen index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Longest series accepted by [`variation_seminorm_exhaustive`].
pub const EXHAUSTIVE_MAX_LEN: usize = 14;

/// Samples indexed by a strictly increasing list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    dim: usize,
    samples: Vec<Complex64>,
}

impl TimeSeries {
    /// `samples` is row-major: `samples[i * dim + k]` is coordinate `k` at `times[i]`.
    pub fn new(times: Vec<f64>, dim: usize, samples: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return param("sample dimension must be positive");
        }
        if samples.len() != times.len() * dim {
            return Err(Error::Dimension(format!(
                "{} samples for {} times of dimension {dim}",
                samples.len(),
                times.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return param("times must be strictly increasing");
        }
        Ok(Self { times, dim, samples })
    }

    /// Scalar samples at times `0, 1, 2, ...`.
    pub fn from_scalars(values: &[Complex64]) -> Self {
        Self {
            times: (0..values.len()).map(|i| i as f64).collect(),
            dim: 1,
            samples: values.to_vec(),
        }
    }

    /// Real scalar samples at times `0, 1, 2, ...`.
    pub fn from_reals(values: &[f64]) -> Self {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_scalars(&v)
    }

    /// Vector samples at times `0, 1, 2, ...`.
    pub fn from_vectors(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("vector samples of unequal length".into()));
        }
        Self::new((0..rows.len()).map(|i| i as f64).collect(), dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sample(&self, i: usize) -> &[Complex64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    /// `|F(t_j) - F(t_i)|_H`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.sample(i)
            .iter()
            .zip(self.sample(j))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sample_norm(&self, i: usize) -> f64 {
        self.sample(i).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Pointwise sum with a series on the same times.
    pub fn add(&self, other: &TimeSeries) -> Result<TimeSeries> {
        if self.times != other.times || self.dim != other.dim {
            return Err(Error::Dimension("series with different times or dimension".into()));
        }
        Ok(TimeSeries {
            times: self.times.clone(),
            dim: self.dim,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    times: Vec<f64>,
    dim: usize,
    samples: Vec<[f64; 2]>,
}

impl TimeSeries {
    /// JSON form `{times, dim, samples: [[re, im], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson {
            times: self.times.clone(),
            dim: self.dim,
            samples: self.samples.iter().map(|v| [v.re, v.im]).collect(),
        })
        .expect("series serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_value(value.clone())?;
        Self::new(
            raw.times,
            raw.dim,
            raw.samples.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

fn check_exponent(r: f64) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return param(format!("variation exponent must be a finite real > 1, got {r}"));
    }
    Ok(())
}

/// Exact `V^r` via dynamic programming.
///
/// `best[j]` is the largest `sum |increment|^r` over chains ending at `j`.
pub fn variation_seminorm(series: &TimeSeries, r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok(variation_by(series.len(), |i, j| series.distance(i, j), r))
}

/// `V^r` of scalar samples; `r` is assumed valid.
pub(crate) fn scalar_variation(values: &[Complex64], r: f64) -> f64 {
    variation_by(values.len(), |i, j| (values[j] - values[i]).norm(), r)
}

pub(crate) fn variation_by(len: usize, dist: impl Fn(usize, usize) -> f64, r: f64) -> f64 {
    let mut best = vec![0.0f64; len];
    let mut top = 0.0f64;
    for j in 1..len {
        let mut b = 0.0f64;
        for i in 0..j {
            let cand = best[i] + dist(i, j).powf(r);
            if cand > b {
                b = cand;
            }
        }
        best[j] = b;
        top = top.max(b);
    }
    top.powf(1.0 / r)
}

/// Brute force over all `2^J` subsequences; reference for the DP.
pub fn variation_seminorm_exhaustive(series: &TimeSeries, r: f64) -> Result<f64> {
    check_exponent(r)?;
    let len = series.len();
    if len > EXHAUSTIVE_MAX_LEN {
        return Err(Error::Size(format!(
            "exhaustive search limited to {EXHAUSTIVE_MAX_LEN} samples, got {len}"
        )));
    }
    let mut top = 0.0f64;
    for mask in 1u32..(1u32 << len) {
        let mut prev: Option<usize> = None;
        let mut sum = 0.0;
        for j in 0..len {
            if mask & (1 << j) != 0 {
                if let Some(i) = prev {
                    sum += series.distance(i, j).powf(r);
                }
                prev = Some(j);
            }
        }
        top = top.max(sum);
    }
    Ok(top.powf(1.0 / r))
}

fn check_scale(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param(format!("jump scale must be positive, got {lambda}"));
    }
    Ok(())
}

/// Greedy lambda-jump count.
///
/// Starting from the first time, repeatedly jumps to the least later time
/// whose sample is at distance `>= lambda` from the current one.
pub fn greedy_jump_count(series: &TimeSeries, lambda: f64) -> Result<usize> {
    check_scale(lambda)?;
    let mut count = 0;
    let mut anchor = 0;
    for t in 1..series.len() {
        if series.distance(anchor, t) >= lambda {
            count += 1;
            anchor = t;
        }
    }
    Ok(count)
}

/// Largest `J` admitting `t_0 < ... < t_J` with every consecutive increment `>= lambda`.
///
/// Always at least the greedy count; the two differ when the greedy chain
/// is anchored at a poorly placed first sample.
pub fn max_jump_count(series: &TimeSeries, lambda: f64) -> Result<usize> {
    check_scale(lambda)?;
    let len = series.len();
    let mut best = vec![0usize; len];
    for j in 1..len {
        best[j] = (0..j)
            .filter(|&i| series.distance(i, j) >= lambda)
            .map(|i| best[i] + 1)
            .max()
            .unwrap_or(0);
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

/// `|F(t_0)| + V^q(F)`, an upper bound for `max_t |F(t)|`.
pub fn sup_via_first_plus_variation(series: &TimeSeries, q: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Size("empty series".into()));
    }
    Ok(series.sample_norm(0) + variation_seminorm(series, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let s = TimeSeries::from_reals(&[0.0, 1.0, 0.0]);
        assert!((variation_seminorm(&s, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let s = TimeSeries::from_reals(&[0.0, 1.0, 3.0]);
        assert!((variation_seminorm(&s, 2.0).unwrap() - 3.0).abs() < 1e-15);
        let s = TimeSeries::from_reals(&[2.0; 6]);
        assert_eq!(variation_seminorm(&s, 2.5).unwrap(), 0.0);
        let s = TimeSeries::from_reals(&[4.0]);
        assert_eq!(variation_seminorm(&s, 3.0).unwrap(), 0.0);
        assert_eq!(variation_seminorm_exhaustive(&s, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn two_samples_give_the_increment() {
        let s = TimeSeries::from_reals(&[-1.5, 2.0]);
        for r in [1.1, 2.0, 3.7] {
            assert!((variation_seminorm_exhaustive(&s, r).unwrap() - 3.5).abs() < 1e-14);
        }
    }

    #[test]
    fn jump_examples() {
        let s = TimeSeries::from_reals(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(greedy_jump_count(&s, 1.0).unwrap(), 3);
        assert_eq!(max_jump_count(&s, 1.0).unwrap(), 3);
        assert_eq!(greedy_jump_count(&s, 1.5).unwrap(), 0);
        let c = TimeSeries::from_reals(&[1.0; 5]);
        assert_eq!(greedy_jump_count(&c, 0.1).unwrap(), 0);
    }

    #[test]
    fn greedy_can_undercount() {
        let s = TimeSeries::from_reals(&[0.0, 0.9, -0.2, 0.8]);
        assert_eq!(greedy_jump_count(&s, 1.0).unwrap(), 0);
        assert_eq!(max_jump_count(&s, 1.0).unwrap(), 2);
    }

    #[test]
    fn sup_bound_examples() {
        let s = TimeSeries::from_reals(&[0.0, 5.0]);
        assert!((sup_via_first_plus_variation(&s, 3.0).unwrap() - 5.0).abs() < 1e-14);
        let s = TimeSeries::from_reals(&[-2.0; 3]);
        assert_eq!(sup_via_first_plus_variation(&s, 3.0).unwrap(), 2.0);
        let empty = TimeSeries::from_reals(&[]);
        assert!(matches!(sup_via_first_plus_variation(&empty, 3.0), Err(Error::Size(_))));
    }

    #[test]
    fn parameter_errors() {
        let s = TimeSeries::from_reals(&[0.0, 1.0]);
        assert!(matches!(variation_seminorm(&s, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(greedy_jump_count(&s, 0.0), Err(Error::Parameter(_))));
        let long = TimeSeries::from_reals(&[0.0; 15]);
        assert!(matches!(variation_seminorm_exhaustive(&long, 2.0), Err(Error::Size(_))));
        assert!(TimeSeries::new(vec![0.0, 0.0], 1, vec![Complex64::default(); 2]).is_err());
        assert!(TimeSeries::new(vec![0.0, 1.0], 2, vec![Complex64::default(); 2]).is_err());
    }

    #[test]
    fn json_form() {
        let s = TimeSeries::new(
            vec![0.0, 0.5],
            2,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, -1.0)],
        )
        .unwrap();
        let back = TimeSeries::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!((s.distance(0, 1) - 5f64.sqrt()).abs() < 1e-15);
    }
}
