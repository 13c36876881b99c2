//! Periodic model of the lattice and its dual torus.
//!
//! A [`GridSpec`] describes `(Z/NZ)^n`. Signals live on positions, multipliers
//! on the dual points `k/N`. The forward transform is unnormalized,
//! `F(k) = sum_x f(x) e(-x.k/N)`, and the inverse carries the factor `N^-n`,
//! so that l2 norms of signals are plain sums of squared moduli.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `e(t) = exp(2 pi i t)`, exact at multiples of `1/4`.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let quarter = (4.0 * t).round();
    let (s, c) = (TAU * (t - 0.25 * quarter)).sin_cos();
    match quarter.rem_euclid(4.0) as u8 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// Representative of `t mod 1` in `(-1/2, 1/2]`.
#[inline]
pub fn centered_unit(t: f64) -> f64 {
    let mut r = t - t.round();
    if r <= -0.5 {
        r += 1.0;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub side: usize,
}

impl GridSpec {
    pub fn new(n: usize, side: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Parameter(format!("dimension n = {n} outside 1..=3")));
        }
        if side < 2 || side % 2 != 0 {
            return Err(Error::Parameter(format!(
                "side length N = {side} must be even and at least 2"
            )));
        }
        side.checked_pow(n as u32)
            .filter(|&len| len <= 1 << 28)
            .ok_or_else(|| Error::Size(format!("grid {side}^{n} too large")))?;
        Ok(Self { n, side })
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major coordinates of a flat index.
    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for axis in (0..self.n).rev() {
            c[axis] = index % self.side;
            index /= self.side;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.side + c % self.side)
    }

    /// Flat index of an arbitrary integer point, reduced periodically.
    pub fn index_wrapped(&self, point: &[i64]) -> usize {
        let side = self.side as i64;
        point
            .iter()
            .fold(0, |acc, &c| acc * self.side + c.rem_euclid(side) as usize)
    }

    /// Centered representative of a coordinate in `(-N/2, N/2]`.
    pub fn centered(&self, c: usize) -> i64 {
        let half = (self.side / 2) as i64;
        let c = c as i64;
        if c > half {
            c - self.side as i64
        } else {
            c
        }
    }

    /// Centered lattice position of a flat index.
    pub fn position(&self, index: usize) -> Vec<i64> {
        self.coords(index).into_iter().map(|c| self.centered(c)).collect()
    }

    /// Centered frequency `k/N` in `(-1/2, 1/2]^n` of a flat index.
    pub fn frequency(&self, index: usize) -> Vec<f64> {
        self.position(index)
            .into_iter()
            .map(|k| k as f64 / self.side as f64)
            .collect()
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::Dimension(format!(
                "grid mismatch: {}^{} vs {}^{}",
                self.side, self.n, other.side, other.n
            )));
        }
        Ok(())
    }
}

/// A complex function on the periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSignal {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

/// A complex function on the dual grid `{k/N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

macro_rules! grid_array_common {
    ($ty:ident) => {
        impl $ty {
            pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
                if values.len() != spec.len() {
                    return Err(Error::Dimension(format!(
                        "expected {} values, got {}",
                        spec.len(),
                        values.len()
                    )));
                }
                Ok(Self { spec, values })
            }

            pub fn zeros(spec: GridSpec) -> Self {
                Self { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
            }

            pub fn constant(spec: GridSpec, c: Complex64) -> Self {
                Self { spec, values: vec![c; spec.len()] }
            }

            /// Sum of squared moduli.
            pub fn norm_sqr(&self) -> f64 {
                self.values.iter().map(|v| v.norm_sqr()).sum()
            }

            pub fn norm_l2(&self) -> f64 {
                self.norm_sqr().sqrt()
            }

            pub fn norm_sup(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }

            pub fn scale(&self, s: Complex64) -> Self {
                Self { spec: self.spec, values: self.values.iter().map(|v| v * s).collect() }
            }
        }
    };
}

grid_array_common!(GridSignal);
grid_array_common!(Multiplier);

impl GridSignal {
    /// Builds a signal from its values at centered lattice positions.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[i64]) -> Complex64) -> Self {
        let values = (0..spec.len()).map(|i| f(&spec.position(i))).collect();
        Self { spec, values }
    }

    pub fn delta(spec: GridSpec) -> Self {
        let mut s = Self::zeros(spec);
        s.values[0] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn norm_lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.norm_sup();
        }
        self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }

    /// Periodic translate `x -> f(x - shift)`.
    pub fn translate(&self, shift: &[i64]) -> Self {
        let spec = self.spec;
        Self::from_fn(spec, |x| {
            let p: Vec<i64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
            self.values[spec.index_wrapped(&p)]
        })
    }
}

impl Multiplier {
    /// Builds a multiplier from its values at centered frequencies `k/N`.
    pub fn from_fn(spec: GridSpec, mut m: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..spec.len()).map(|i| m(&spec.frequency(i))).collect();
        Self { spec, values }
    }

    pub fn identity(spec: GridSpec) -> Self {
        Self::constant(spec, Complex64::new(1.0, 0.0))
    }

    pub fn conj(&self) -> Self {
        Self { spec: self.spec, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn product(&self, other: &Multiplier) -> Result<Self> {
        self.spec.check_same(&other.spec)?;
        Ok(Self {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place 1-d transform of a contiguous buffer with the thread-local planner.
pub(crate) fn fft_1d(buf: &mut [Complex64], direction: FftDirection) {
    let len = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction));
    fft.process(buf);
}

/// Unnormalized n-d transform along every axis, in place.
fn fft_nd(spec: GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let side = spec.side;
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(side, direction));
    let mut line = vec![Complex64::new(0.0, 0.0); side];
    for axis in 0..spec.n {
        let stride = side.pow((spec.n - 1 - axis) as u32);
        let block = stride * side;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// `F(k) = sum_x f(x) e(-x.k/N)`.
pub fn forward_dft(f: &GridSignal) -> Multiplier {
    let mut values = f.values.clone();
    fft_nd(f.spec, &mut values, FftDirection::Forward);
    Multiplier { spec: f.spec, values }
}

/// `f(x) = N^-n sum_k F(k) e(x.k/N)`.
pub fn inverse_dft(spectrum: &Multiplier) -> GridSignal {
    let mut values = spectrum.values.clone();
    fft_nd(spectrum.spec, &mut values, FftDirection::Inverse);
    let scale = 1.0 / spectrum.spec.len() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    GridSignal { spec: spectrum.spec, values }
}

/// `m(D) f = inverse_dft(m * forward_dft(f))`.
pub fn apply_multiplier(m: &Multiplier, f: &GridSignal) -> Result<GridSignal> {
    m.spec.check_same(&f.spec)?;
    let spectrum = forward_dft(f);
    Ok(apply_to_spectrum(m, &spectrum))
}

/// Applies `m` to an already transformed signal.
pub fn apply_to_spectrum(m: &Multiplier, spectrum: &Multiplier) -> GridSignal {
    let product = Multiplier {
        spec: m.spec,
        values: m.values.iter().zip(&spectrum.values).map(|(a, b)| a * b).collect(),
    };
    inverse_dft(&product)
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    n: usize,
    #[serde(rename = "N")]
    side: usize,
    values: Vec<[f64; 2]>,
}

impl GridSignal {
    /// JSON form `{n, N, values: [[re, im], ...]}` in row-major order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SignalJson {
            n: self.spec.n,
            side: self.spec.side,
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        })
        .expect("signal serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: SignalJson = serde_json::from_value(value.clone())?;
        let spec = GridSpec::new(raw.n, raw.side)?;
        Self::new(spec, raw.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }

    /// Binary form: `n` and `N` as little-endian u64, then `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.spec.n as u64).to_le_bytes())?;
        w.write_all(&(self.spec.side as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let side = u64::from_le_bytes(word) as usize;
        let spec = GridSpec::new(n, side)?;
        let mut values = Vec::with_capacity(spec.len());
        for _ in 0..spec.len() {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            values.push(Complex64::new(re, f64::from_le_bytes(word)));
        }
        Ok(Self { spec, values })
    }
}
