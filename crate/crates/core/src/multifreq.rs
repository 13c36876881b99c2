//! Variable-coefficient multi-frequency estimates.
//!
//! Given coefficient functions `g_beta`, a family of translation-invariant
//! operators `T_t` and band-limited inputs `f_beta`, this module evaluates
//!
//! ```text
//! x -> V^q_t ( sum_beta g_beta(x) (T_t f_beta)(x) )
//! ```
//!
//! computes the exact windowed almost-orthogonality constant `A1` of the
//! coefficients, and provides numerical checkers for the accompanying
//! inequalities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bump::BumpSpec;
use crate::error::{param, Error, Result};
use crate::grid::{apply_to_spectrum, forward_dft, inverse_dft, GridSignal, GridSpec, Multiplier};
use crate::linalg::{fill_lower, largest_singular_value, top_eigenpair};
use crate::quad::{tanh_sinh, tanh_sinh_to_infinity};
use crate::rng::{complex_gaussian, gaussian_signal, seeded, trial_rng};
use rand::Rng;
use crate::variation::{scalar_variation, variation_by};

/// Coefficient functions `g_beta`, one grid signal per label.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    pub labels: Vec<String>,
    pub signals: Vec<GridSignal>,
}

impl CoefficientField {
    pub fn new(labels: Vec<String>, signals: Vec<GridSignal>) -> Result<Self> {
        if signals.is_empty() {
            return param("coefficient field needs at least one label");
        }
        if labels.len() != signals.len() {
            return Err(Error::Dimension("one label per coefficient signal".into()));
        }
        let spec = signals[0].spec;
        if signals.iter().any(|g| g.spec != spec) {
            return Err(Error::Dimension("coefficient signals on different grids".into()));
        }
        Ok(Self { labels, signals })
    }

    pub fn from_signals(signals: Vec<GridSignal>) -> Result<Self> {
        let labels = (0..signals.len()).map(|i| i.to_string()).collect();
        Self::new(labels, signals)
    }

    pub fn spec(&self) -> GridSpec {
        self.signals[0].spec
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Characters `g_beta(x) = e(x . xi_beta)` for dual-grid frequencies.
pub fn classical_coefficients(frequencies: &[Vec<f64>], spec: GridSpec) -> Result<CoefficientField> {
    let side = spec.side as i64;
    let mut signals = Vec::with_capacity(frequencies.len());
    for xi in frequencies {
        if xi.len() != spec.n {
            return Err(Error::Dimension(format!("frequency {xi:?} in dimension {}", spec.n)));
        }
        let ks: Vec<i64> = xi.iter().map(|v| (v * spec.side as f64).round() as i64).collect();
        if xi.iter().zip(&ks).any(|(v, &k)| (v * spec.side as f64 - k as f64).abs() > 1e-9) {
            return param(format!("frequency {xi:?} is not on the dual grid of N = {side}"));
        }
        signals.push(GridSignal::from_fn(spec, |x| {
            let phase: i64 = x.iter().zip(&ks).map(|(a, k)| a * k).sum::<i64>().rem_euclid(side);
            crate::grid::e(phase as f64 / side as f64)
        }));
    }
    let labels = frequencies.iter().map(|xi| format!("{xi:?}")).collect();
    CoefficientField::new(labels, signals)
}

/// Members of a [`MultiplierFamily`]: one operator per time, optionally per label.
#[derive(Debug, Clone)]
pub enum FamilyMembers {
    Shared(Vec<Multiplier>),
    PerLabel(Vec<Vec<Multiplier>>),
}

/// Translation-invariant operators `T_t`, `t` in a finite sorted set.
#[derive(Debug, Clone)]
pub struct MultiplierFamily {
    pub times: Vec<f64>,
    pub members: FamilyMembers,
}

impl MultiplierFamily {
    pub fn shared(times: Vec<f64>, multipliers: Vec<Multiplier>) -> Result<Self> {
        let family = Self { times, members: FamilyMembers::Shared(multipliers) };
        family.validate()?;
        Ok(family)
    }

    /// One family per label; `per_label[beta][t]`.
    pub fn per_label(times: Vec<f64>, per_label: Vec<Vec<Multiplier>>) -> Result<Self> {
        let family = Self { times, members: FamilyMembers::PerLabel(per_label) };
        family.validate()?;
        Ok(family)
    }

    fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times.windows(2).any(|w| !(w[0] < w[1])) {
            return param("family times must be nonempty and strictly increasing");
        }
        let lists: Vec<&Vec<Multiplier>> = match &self.members {
            FamilyMembers::Shared(m) => vec![m],
            FamilyMembers::PerLabel(ms) => ms.iter().collect(),
        };
        if lists.is_empty() {
            return param("empty per-label family");
        }
        let spec = lists[0].first().map(|m| m.spec);
        for list in lists {
            if list.len() != self.times.len() {
                return Err(Error::Dimension("one multiplier per time required".into()));
            }
            if list.iter().any(|m| Some(m.spec) != spec) {
                return Err(Error::Dimension("family members on different grids".into()));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> GridSpec {
        match &self.members {
            FamilyMembers::Shared(m) => m[0].spec,
            FamilyMembers::PerLabel(ms) => ms[0][0].spec,
        }
    }

    pub fn member(&self, time: usize, label: usize) -> &Multiplier {
        match &self.members {
            FamilyMembers::Shared(m) => &m[time],
            FamilyMembers::PerLabel(ms) => &ms[label][time],
        }
    }

    fn label_count(&self) -> Option<usize> {
        match &self.members {
            FamilyMembers::Shared(_) => None,
            FamilyMembers::PerLabel(ms) => Some(ms.len()),
        }
    }
}

/// Inputs `f_beta` whose spectra lie in `U`, the plateau of `bump`.
#[derive(Debug, Clone)]
pub struct FrequencyData {
    pub signals: Vec<GridSignal>,
    pub bump: BumpSpec,
}

/// Relative threshold below which spectral mass counts as vanishing.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

impl FrequencyData {
    pub fn new(signals: Vec<GridSignal>, bump: BumpSpec) -> Result<Self> {
        if signals.is_empty() {
            return param("frequency data needs at least one signal");
        }
        let spec = signals[0].spec;
        if signals.iter().any(|f| f.spec != spec) || bump.dim() != spec.n {
            return Err(Error::Dimension("frequency data on inconsistent grids".into()));
        }
        for (i, f) in signals.iter().enumerate() {
            let spectrum = forward_dft(f);
            let limit = SUPPORT_TOLERANCE * spectrum.norm_l2();
            for (k, v) in spectrum.values.iter().enumerate() {
                if !in_plateau(&bump, &spec.frequency(k)) && v.norm() > limit {
                    return Err(Error::Invariant(format!(
                        "spectrum of input {i} does not vanish outside U at frequency {:?}",
                        spec.frequency(k)
                    )));
                }
            }
        }
        Ok(Self { signals, bump })
    }

    /// Random inputs: complex Gaussian Fourier coefficients on the grid points of `U`.
    pub fn random(labels: usize, bump: BumpSpec, spec: GridSpec, seed: u64) -> Result<Self> {
        let signals = (0..labels)
            .map(|i| {
                let mut rng = trial_rng(seed, i as u64);
                let noise = gaussian_signal(spec, &mut rng);
                let mut spectrum = Multiplier::zeros(spec);
                for k in 0..spec.len() {
                    if in_plateau(&bump, &spec.frequency(k)) {
                        spectrum.values[k] = noise.values[k];
                    }
                }
                inverse_dft(&spectrum)
            })
            .collect();
        Self::new(signals, bump)
    }

    /// `( sum_beta |f_beta|^2 )^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.signals.iter().map(GridSignal::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { signals: self.signals.iter().map(|f| f.scale(s)).collect(), bump: self.bump.clone() }
    }
}

/// `xi` lies in `U = A([-1/2, 1/2]^n)`.
pub fn in_plateau(bump: &BumpSpec, xi: &[f64]) -> bool {
    xi.iter().zip(&bump.diag).all(|(x, a)| x.abs() <= 0.5 * a + 1e-12)
}

/// Which rows of the windowed matrix enter the computation of `A1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowWindow {
    #[default]
    Full,
    /// Rows with `|phi(y)| > 1e-12 |phi|_inf` only.
    Support,
}

/// Result of [`a1_details`].
#[derive(Debug, Clone)]
pub struct A1Report {
    pub a1: f64,
    /// Grid index of the maximizing base point `x`.
    pub argmax: usize,
    /// Top right singular vector `c` at the maximizing `x`.
    pub top_vector: Vec<Complex64>,
}

/// Smallest `A1` with `|sum_beta phi(y) g_beta(x+y) c_beta|_{l2_y} <= A1 |U|^{1/2} |c|`
/// for all `x` and `c`.
pub fn a1_constant(g: &CoefficientField, phi: &GridSignal, measure_u: f64) -> Result<f64> {
    Ok(a1_details(g, phi, measure_u, RowWindow::Full)?.a1)
}

/// [`a1_constant`] with the maximizer and a row-window choice.
///
/// For each `x` the largest singular value of `M_x[y, beta] = phi(y) g_beta(x+y)`
/// is the square root of the top eigenvalue of the `|Xi| x |Xi|` Gram matrix.
pub fn a1_details(
    g: &CoefficientField,
    phi: &GridSignal,
    measure_u: f64,
    window: RowWindow,
) -> Result<A1Report> {
    let spec = g.spec();
    if phi.spec != spec {
        return Err(Error::Dimension("phi and coefficients on different grids".into()));
    }
    if !(measure_u > 0.0) {
        return param(format!("|U| must be positive, got {measure_u}"));
    }
    let labels = g.len();
    let sup = phi.norm_sup();
    if sup == 0.0 {
        return Ok(A1Report { a1: 0.0, argmax: 0, top_vector: vec![Complex64::default(); labels] });
    }
    let rows: Vec<(Vec<usize>, f64)> = (0..spec.len())
        .filter(|&y| window == RowWindow::Full || phi.values[y].norm() > 1e-12 * sup)
        .map(|y| (spec.coords(y), phi.values[y].norm_sqr()))
        .collect();
    let x_coords: Vec<Vec<usize>> = (0..spec.len()).map(|x| spec.coords(x)).collect();

    let gram_at = |x: usize| -> DMatrix<Complex64> {
        let mut gram = DMatrix::<Complex64>::zeros(labels, labels);
        let mut column = vec![Complex64::default(); labels];
        let mut shifted = vec![0usize; spec.n];
        for (y, weight) in &rows {
            for (axis, slot) in shifted.iter_mut().enumerate() {
                *slot = (x_coords[x][axis] + y[axis]) % spec.side;
            }
            let idx = spec.index(&shifted);
            for (b, col) in column.iter_mut().enumerate() {
                *col = g.signals[b].values[idx];
            }
            for a in 0..labels {
                let ca = column[a].conj() * *weight;
                for b in a..labels {
                    gram[(a, b)] += ca * column[b];
                }
            }
        }
        fill_lower(&mut gram);
        gram
    };

    let (argmax, top) = (0..spec.len())
        .into_par_iter()
        .map(|x| (x, top_eigenpair(gram_at(x)).0))
        .reduce(|| (0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let (_, vector) = top_eigenpair(gram_at(argmax));
    Ok(A1Report {
        a1: top.max(0.0).sqrt() / measure_u.sqrt(),
        argmax,
        top_vector: vector.iter().cloned().collect(),
    })
}

/// `|sum_beta phi(y) g_beta(x+y) c_beta|_{l2_y}` at one base point `x`.
pub fn windowed_norm(g: &CoefficientField, phi: &GridSignal, x: usize, c: &[Complex64]) -> f64 {
    let spec = g.spec();
    let xc = spec.coords(x);
    let mut total = 0.0;
    for y in 0..spec.len() {
        let shifted: Vec<usize> = spec.coords(y).iter().zip(&xc).map(|(a, b)| (a + b) % spec.side).collect();
        let idx = spec.index(&shifted);
        let s: Complex64 = g.signals.iter().zip(c).map(|(gb, cb)| gb.values[idx] * cb).sum();
        total += (phi.values[y] * s).norm_sqr();
    }
    total.sqrt()
}

/// `x -> V^q_t ( sum_beta g_beta(x) (T_t f_beta)(x) )`, returned as a real signal.
pub fn multifreq_apply(
    g: &CoefficientField,
    family: &MultiplierFamily,
    data: &FrequencyData,
    q: f64,
) -> Result<GridSignal> {
    if !(q > 2.0 && q.is_finite()) {
        return param(format!("q must lie in (2, inf), got {q}"));
    }
    if g.len() != data.signals.len() {
        return Err(Error::Dimension(format!(
            "{} coefficient labels but {} inputs",
            g.len(),
            data.signals.len()
        )));
    }
    if family.label_count().is_some_and(|n| n != g.len()) {
        return Err(Error::Dimension("per-label family does not match the labels".into()));
    }
    let spec = g.spec();
    if data.signals[0].spec != spec || family.spec() != spec {
        return Err(Error::Dimension("operator inputs on different grids".into()));
    }
    let spectra: Vec<Multiplier> = data.signals.iter().map(forward_dft).collect();
    let times = family.times.len();
    // combined[t][x] = sum_beta g_beta(x) (T_t f_beta)(x)
    let combined: Vec<Vec<Complex64>> = (0..times)
        .into_par_iter()
        .map(|t| {
            let mut acc = vec![Complex64::default(); spec.len()];
            for (b, spectrum) in spectra.iter().enumerate() {
                let out = apply_to_spectrum(family.member(t, b), spectrum);
                for ((slot, v), gv) in acc.iter_mut().zip(&out.values).zip(&g.signals[b].values) {
                    *slot += gv * v;
                }
            }
            acc
        })
        .collect();
    let values = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let series: Vec<Complex64> = (0..times).map(|t| combined[t][x]).collect();
            Complex64::new(scalar_variation(&series, q), 0.0)
        })
        .collect();
    Ok(GridSignal { spec, values })
}

/// `(q (log|Xi| + 1) / (q - 2))^{eta + 1} A1 |f|` with unit implicit constant.
pub fn theorem1_rhs(q: f64, labels: usize, a1: f64, eta: f64, fnorm: f64) -> Result<f64> {
    if !(q > 2.0) {
        return param(format!("q must exceed 2, got {q}"));
    }
    if labels == 0 {
        return param("|Xi| must be at least 1");
    }
    let base = q * ((labels as f64).ln() + 1.0) / (q - 2.0);
    Ok(base.powf(eta + 1.0) * a1 * fnorm)
}

/// The exponent `r` with `r - 2 = (q - 2) / (log|Xi| + 1)`; it equals `q` when `|Xi| = 1`.
pub fn balanced_exponent(q: f64, labels: usize) -> f64 {
    2.0 + (q - 2.0) / ((labels as f64).ln() + 1.0)
}

/// Bound before optimizing over `r`:
/// `(q/(q-r) + 2/(r-2)) |Xi|^{(1/2 - 1/r) q/(q-2)} (r/(r-2))^eta`.
pub fn chained_bound(q: f64, r: f64, labels: usize, eta: f64) -> Result<f64> {
    if !(2.0 < r && r < q) {
        return param(format!("need 2 < r < q, got r = {r}, q = {q}"));
    }
    let growth = (labels as f64).powf((0.5 - 1.0 / r) * q / (q - 2.0));
    Ok((q / (q - r) + 2.0 / (r - 2.0)) * growth * (r / (r - 2.0)).powf(eta))
}

/// Randomized lower estimate of `sup_f | |T_t f|_{V^r_t} |_{l2} / |f|_{l2}`.
///
/// Uses label 0 of a per-label family.
pub fn vr_family_constant(family: &MultiplierFamily, r: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return param(format!("variation exponent must exceed 1, got {r}"));
    }
    if trials == 0 {
        return param("at least one trial required");
    }
    let spec = family.spec();
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let f = gaussian_signal(spec, &mut trial_rng(seed, trial as u64));
            let spectrum = forward_dft(&f);
            let outputs: Vec<GridSignal> = (0..family.times.len())
                .map(|t| apply_to_spectrum(family.member(t, 0), &spectrum))
                .collect();
            let total: f64 = (0..spec.len())
                .map(|x| {
                    let series: Vec<Complex64> = outputs.iter().map(|o| o.values[x]).collect();
                    scalar_variation(&series, r).powi(2)
                })
                .sum();
            total.sqrt() / f.norm_l2()
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// A finite weighted measure space with coefficient functions and
/// time-dependent coefficient sequences.
#[derive(Debug, Clone)]
pub struct Lemma21Instance {
    /// Point masses `w(y) > 0`.
    pub weights: Vec<f64>,
    /// `g[beta][y]`.
    pub g: Vec<Vec<Complex64>>,
    /// `c[t][beta]`.
    pub c: Vec<Vec<Complex64>>,
}

impl Lemma21Instance {
    /// Weights uniform in `[1/2, 3/2)`, Gaussian `g` and Gaussian `c_t` drawn
    /// independently at each time.
    pub fn random(labels: usize, times: usize, points: usize, seed: u64) -> Result<Self> {
        if labels == 0 || times == 0 || points == 0 {
            return param("labels, times and points must be positive");
        }
        let mut rng = seeded(seed);
        let weights = (0..points).map(|_| rng.random_range(0.5..1.5)).collect();
        let g = (0..labels).map(|_| (0..points).map(|_| complex_gaussian(&mut rng)).collect()).collect();
        let c = (0..times).map(|_| (0..labels).map(|_| complex_gaussian(&mut rng)).collect()).collect();
        Ok(Self { weights, g, c })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma21Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Best almost-orthogonality constant of `g` on the weighted space.
    pub a0: f64,
    /// `|c_{t,beta}|_{V^r_t(l2_beta)}`.
    pub c_variation: f64,
}

/// Evaluates both sides of the transfer inequality
/// `| |sum_beta g_beta c_{t,beta}|_{V^q_t} |_{L2} <~ (q/(q-r) + 2/(r-2)) A0 |Xi|^e |c|_{V^r(l2)}`
/// with `e = (1/2)(1/2 - 1/r)/(1/2 - 1/q)`.
pub fn lemma21_check(inst: &Lemma21Instance, q: f64, r: f64) -> Result<Lemma21Outcome> {
    if !(2.0 < r && r < q && q.is_finite()) {
        return param(format!("need 2 < r < q < inf, got r = {r}, q = {q}"));
    }
    let labels = inst.g.len();
    let points = inst.weights.len();
    if labels == 0 || points == 0 || inst.c.is_empty() {
        return param("empty instance");
    }
    if inst.g.iter().any(|row| row.len() != points) || inst.c.iter().any(|row| row.len() != labels) {
        return Err(Error::Dimension("inconsistent instance shapes".into()));
    }
    if inst.weights.iter().any(|&w| !(w > 0.0)) {
        return param("weights must be positive");
    }
    let lhs_sq: f64 = (0..points)
        .map(|y| {
            let series: Vec<Complex64> = inst
                .c
                .iter()
                .map(|ct| ct.iter().zip(&inst.g).map(|(cb, gb)| cb * gb[y]).sum())
                .collect();
            inst.weights[y] * scalar_variation(&series, q).powi(2)
        })
        .sum();
    let lhs = lhs_sq.sqrt();
    let matrix: Vec<Vec<Complex64>> = (0..points)
        .map(|y| inst.g.iter().map(|gb| gb[y] * inst.weights[y].sqrt()).collect())
        .collect();
    let a0 = largest_singular_value(&matrix);
    let c_variation = variation_by(
        inst.c.len(),
        |i, j| {
            inst.c[i].iter().zip(&inst.c[j]).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
        },
        r,
    );
    let exponent = 0.5 * (0.5 - 1.0 / r) / (0.5 - 1.0 / q);
    let rhs = (q / (q - r) + 2.0 / (r - 2.0)) * a0 * (labels as f64).powf(exponent) * c_variation;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(Lemma21Outcome { lhs, rhs, ratio, a0, c_variation })
}

fn check_split_params(a: f64, labels: f64, r: f64, q: f64) -> Result<()> {
    if !(a > 0.0 && labels >= 1.0 && 2.0 < r && r < q && q.is_finite()) {
        return param(format!("need a > 0, |Xi| >= 1, 2 < r < q; got a = {a}, |Xi| = {labels}, r = {r}, q = {q}"));
    }
    Ok(())
}

/// Closed form of `int_0^inf min(|Xi|^{1/2} (a/l)^{r/q}, (a/l)^{r/2}) dl`:
/// `a |Xi|^{(1/2)(1/2 - 1/r)/(1/2 - 1/q)} ((1 - r/q)^-1 + (r/2 - 1)^-1)`.
pub fn jump_integral_closed_form(a: f64, labels: f64, r: f64, q: f64) -> Result<f64> {
    check_split_params(a, labels, r, q)?;
    let exponent = 0.5 * (0.5 - 1.0 / r) / (0.5 - 1.0 / q);
    Ok(a * labels.powf(exponent) * (1.0 / (1.0 - r / q) + 1.0 / (r / 2.0 - 1.0)))
}

/// The same integral by numerical quadrature.
///
/// The crossing point of the two branches is located by bisection and each
/// side is integrated with tanh-sinh quadrature.
pub fn jump_integral_quadrature(a: f64, labels: f64, r: f64, q: f64) -> Result<f64> {
    check_split_params(a, labels, r, q)?;
    let small = |l: f64| labels.sqrt() * (a / l).powf(r / q);
    let large = |l: f64| (a / l).powf(r / 2.0);
    // small(l) <= large(l) exactly for l below the crossing.
    let (mut lo, mut hi) = ((a.ln() - 200.0).exp(), a * 2.0);
    while small(hi) < large(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if small(mid) < large(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let cross = (lo * hi).sqrt();
    // `l = cross e^{-+v / rate}` turns the algebraic ends into `e^{-v}` tails,
    // which tanh-sinh resolves where the raw `l^{-r/q}` singularity underflows.
    // The integrand times `l` is assembled in logarithms to stay finite.
    let side = |rate: f64, sign: f64| -> Result<f64> {
        let g = |v: f64| {
            let log_l = cross.ln() + sign * v / rate;
            let log_ratio = a.ln() - log_l;
            let log_small = 0.5 * labels.ln() + (r / q) * log_ratio;
            let log_large = 0.5 * r * log_ratio;
            (log_small.min(log_large) + log_l).exp() / rate
        };
        Ok(tanh_sinh(g, 0.0, 1.0, 1e-11)? + tanh_sinh_to_infinity(g, 1.0, 1e-11)?)
    };
    Ok(side(1.0 - r / q, -1.0)? + side(r / 2.0 - 1.0, 1.0)?)
}
