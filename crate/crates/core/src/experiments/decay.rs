//! Decay sweeps: Gauss sums in `q`, minor-arc multipliers and major-arc error
//! terms in the scale `j`.

use std::sync::Arc;
use std::time::Instant;

use num_integer::Integer;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::fit_line;
use super::record::ExperimentRecord;
use super::{relative_change, N_DOUBLING_TOLERANCE};
use crate::circle::arcs::{arc_table, major_arc_membership, MajorArcParams};
use crate::circle::assemble::{ApproxParams, Assembler};
use crate::circle::gauss::{gauss_sum, GaussCache, DEFAULT_TERM_BUDGET};
use crate::circle::kernel::KernelSpec;
use crate::circle::multiplier::{multiplier_m_grid, PhiMethod};
use crate::circle::rational::level_of;
use crate::error::{param, Result};
use crate::grid::GridSpec;
use crate::rng::trial_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayKind {
    GaussSum,
    MinorArc,
    ErrorTerm,
}

impl DecayKind {
    pub fn name(self) -> &'static str {
        match self {
            DecayKind::GaussSum => "gauss_sum",
            DecayKind::MinorArc => "minor_arc",
            DecayKind::ErrorTerm => "error_term",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub kind: DecayKind,
    /// Denominators `q` for Gauss sums, scales `j` otherwise.
    pub sweep: Vec<u32>,
    pub eps1: f64,
    pub d: u32,
    pub kappa: u32,
    /// `lambda` samples per scale.
    pub samples: usize,
    pub seed: u64,
    /// Dual grid size `M = grid_factor 2^j`.
    pub grid_factor: usize,
    pub oversample: usize,
    /// Error-term values below `noise_floor * sup|m|` are left out of the fit.
    pub noise_floor: f64,
    /// Relative slack in the non-increasing check.
    pub monotone_slack: f64,
    pub n_doubling: bool,
}

impl DecayParams {
    pub fn gauss_sum(primes: Vec<u32>) -> Self {
        Self { kind: DecayKind::GaussSum, sweep: primes, ..Self::base() }
    }

    pub fn minor_arc(js: Vec<u32>, seed: u64) -> Self {
        Self { kind: DecayKind::MinorArc, sweep: js, seed, eps1: 0.25, ..Self::base() }
    }

    pub fn error_term(js: Vec<u32>, seed: u64) -> Self {
        Self { kind: DecayKind::ErrorTerm, sweep: js, seed, samples: 8, ..Self::base() }
    }

    fn base() -> Self {
        Self {
            kind: DecayKind::GaussSum,
            sweep: Vec::new(),
            eps1: 1.0 / 6.0,
            d: 1,
            kappa: 2,
            samples: 24,
            seed: 0,
            grid_factor: 8,
            oversample: 8,
            noise_floor: 1e-10,
            monotone_slack: 0.01,
            n_doubling: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sweep.len() < 2 {
            return param("a decay sweep needs at least two points");
        }
        if self.kind != DecayKind::GaussSum {
            for &j in &self.sweep {
                MajorArcParams::new(self.eps1, j, self.d)?;
            }
            if self.samples == 0 {
                return param("at least one lambda sample per scale required");
            }
            if !self.grid_factor.is_power_of_two() || self.grid_factor < 4 {
                return param("grid_factor must be a power of two >= 4");
            }
        }
        Ok(())
    }
}

/// Largest `|S(a/q, 0)|` over `a` coprime to `q`, `n = 1`.
fn gauss_quantity(q: u32, d: u32) -> Result<f64> {
    let mut best = 0.0f64;
    for a in 1..q.max(2) {
        if (a as u64).gcd(&(q as u64)) == 1 {
            best = best.max(gauss_sum(a as i64, &[0], q as u64, d, DEFAULT_TERM_BUDGET)?.norm());
        }
    }
    Ok(best)
}

/// `lambda` values outside `X_j`. The first half sit just past the edges of
/// the arcs in order of increasing `q`, where `|m|` peaks; the rest mix random
/// edge offsets with uniform draws.
fn minor_arc_samples(p: &MajorArcParams, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, p.j as u64);
    let mut arcs = arc_table(p);
    arcs.sort_by_key(|(a, _, _)| a.q);
    let r = p.radius();
    let mut out: Vec<f64> = arcs
        .iter()
        .flat_map(|(arc, _, _)| [arc.value() - 1.01 * r, arc.value() + 1.01 * r])
        .filter(|&l| l > 0.0 && l <= 1.0 && major_arc_membership(l, p).is_none())
        .take(samples / 2)
        .collect();
    let mut attempts = 0;
    while out.len() < samples && attempts < 100 * samples {
        attempts += 1;
        let lambda = if out.len() % 2 == 0 {
            let (arc, _, _) = arcs[rng.random_range(0..arcs.len())];
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            arc.value() + side * r * (1.0 + rng.random_range(0.01..1.0))
        } else {
            1.0 - rng.random::<f64>()
        };
        if lambda > 0.0 && lambda <= 1.0 && major_arc_membership(lambda, p).is_none() {
            out.push(lambda);
        }
    }
    out
}

/// `lambda` values inside arcs `a/q` that some approximant level covers.
fn covered_samples(p: &MajorArcParams, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, p.j as u64);
    let top = p.max_level();
    let arcs: Vec<_> = arc_table(p).into_iter().filter(|(a, _, _)| top == 0 || level_of(a.q) <= top).collect();
    let r = p.radius();
    let mut out = Vec::with_capacity(samples);
    let mut attempts = 0;
    while out.len() < samples && attempts < 100 * samples {
        attempts += 1;
        let (arc, _, _) = arcs[rng.random_range(0..arcs.len())];
        let lambda = arc.value() + r * rng.random_range(-1.0..=1.0);
        let lambda = if lambda <= 0.0 { lambda + 1.0 } else if lambda > 1.0 { lambda - 1.0 } else { lambda };
        if major_arc_membership(lambda, p).is_some() {
            out.push(lambda);
        }
    }
    out
}

struct Sweep {
    quantities: Vec<f64>,
    reference: Vec<f64>,
    samples: Vec<usize>,
}

fn run_sweep(p: &DecayParams, factor: usize) -> Result<Sweep> {
    let kernel = KernelSpec::riesz_1d(p.d);
    let approx = ApproxParams::new(kernel, p.eps1, p.kappa, PhiMethod::Quadrature)?;
    let asm = Assembler::new(approx, Arc::new(GaussCache::new()));
    let mut quantities = Vec::new();
    let mut reference = Vec::new();
    let mut counts = Vec::new();
    for &j in &p.sweep {
        let arcs = MajorArcParams::new(p.eps1, j, p.d)?;
        let m = factor << j;
        let spec = GridSpec::new(1, m)?;
        let piece = asm.piece(j)?;
        let lambdas = match p.kind {
            DecayKind::MinorArc => minor_arc_samples(&arcs, p.samples, p.seed),
            _ => covered_samples(&arcs, p.samples, p.seed),
        };
        let rows = lambdas
            .par_iter()
            .map(|&lambda| {
                let sup_m = multiplier_m_grid(&piece, lambda, spec)?.norm_sup();
                let value = match p.kind {
                    DecayKind::MinorArc => sup_m,
                    _ => asm
                        .error_term_on_grid(j, lambda, m, p.oversample, None)?
                        .iter()
                        .map(|v| v.norm())
                        .fold(0.0, f64::max),
                };
                Ok((value, sup_m))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        quantities.push(rows.iter().map(|r| r.0).fold(0.0, f64::max));
        reference.push(rows.iter().map(|r| r.1).fold(0.0, f64::max));
        counts.push(rows.len());
    }
    Ok(Sweep { quantities, reference, samples: counts })
}

/// Runs one decay sweep and fits `log2(quantity)` against `log2 q` (Gauss sums)
/// or `j` (multipliers).
pub fn decay_experiment(p: &DecayParams) -> Result<ExperimentRecord> {
    p.validate()?;
    let start = Instant::now();
    let mut rec = ExperimentRecord::new(&format!("decay_{}", p.kind.name()))
        .param("kind", p.kind)
        .param("sweep", &p.sweep)
        .param("d", p.d)
        .param("n", 1)
        .param("seed", p.seed);
    let fit_slope = |xs: &[f64], ys: &[f64], keep: &[usize]| -> Result<_> {
        let xs: Vec<f64> = keep.iter().map(|&i| xs[i]).collect();
        let ys: Vec<f64> = keep.iter().map(|&i| ys[i].log2()).collect();
        fit_line(&xs, &ys)
    };
    if p.kind == DecayKind::GaussSum {
        let quantities = p.sweep.iter().map(|&q| gauss_quantity(q, p.d)).collect::<Result<Vec<f64>>>()?;
        if quantities.iter().any(|&v| v <= 0.0) {
            return param("a swept denominator has a vanishing Gauss sum; use odd primes");
        }
        let xs: Vec<f64> = p.sweep.iter().map(|&q| (q as f64).log2()).collect();
        let keep: Vec<usize> = (0..xs.len()).collect();
        let fit = fit_slope(&xs, &quantities, &keep)?;
        rec.set("quantity", &quantities);
        rec.set("slope", fit.slope);
        rec.set("fit", &fit);
        rec.bound("quantity", "exact");
        if !(fit.slope < 0.0) {
            rec.flag("slope_not_negative");
        }
        rec.wall_time_s = start.elapsed().as_secs_f64();
        return Ok(rec);
    }
    rec = rec
        .param("eps1", p.eps1)
        .param("kappa", p.kappa)
        .param("samples", p.samples)
        .param("grid_factor", p.grid_factor)
        .param("oversample", p.oversample)
        .param("N", p.sweep.iter().map(|&j| p.grid_factor << j).collect::<Vec<_>>());
    let base = run_sweep(p, p.grid_factor)?;
    let xs: Vec<f64> = p.sweep.iter().map(|&j| j as f64).collect();
    let mut keep: Vec<usize> = (0..xs.len())
        .filter(|&i| base.quantities[i] > 0.0 && base.quantities[i] > p.noise_floor * base.reference[i])
        .collect();
    if keep.len() < 2 {
        rec.flag("fit_uses_points_at_noise_floor");
        keep = (0..xs.len()).filter(|&i| base.quantities[i] > 0.0).collect();
    }
    if keep.len() < 2 {
        return Err(crate::Error::Accuracy("fewer than two nonzero quantities to fit".into()));
    }
    let fit = fit_slope(&xs, &base.quantities, &keep)?;
    rec.set("quantity", &base.quantities);
    rec.set("sup_m", &base.reference);
    rec.set("lambda_samples", &base.samples);
    rec.set("fitted_indices", &keep);
    rec.set("slope", fit.slope);
    rec.set("fit", &fit);
    rec.bound("quantity", "lower");
    match p.kind {
        DecayKind::MinorArc => {
            let increases = base
                .quantities
                .windows(2)
                .filter(|w| w[1] > w[0] * (1.0 + p.monotone_slack))
                .count();
            rec.set("monotone_violations", increases);
            if increases > 0 {
                rec.flag("not_non_increasing");
            }
        }
        _ => {
            rec.flag("samples_restricted_to_covered_arcs");
        }
    }
    if !(fit.slope < 0.0) {
        rec.flag("slope_not_negative");
    }
    if p.n_doubling {
        let doubled = run_sweep(p, 2 * p.grid_factor)?;
        let fit2 = fit_slope(&xs, &doubled.quantities, &keep)?;
        let change = relative_change(fit.slope, fit2.slope);
        rec.set("slope_at_2N", fit2.slope);
        rec.set("n_doubling_change", change);
        if change > N_DOUBLING_TOLERANCE {
            rec.flag("n_doubling_moved");
        }
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rec)
}
