//! Operator norms of linear maps on grid signals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::grid::{apply_multiplier, GridSignal, GridSpec, Multiplier};
use crate::rng::{gaussian_signal, trial_rng};

/// A linear map on one grid, with its adjoint.
pub trait LinearOperator: Sync {
    fn apply(&self, f: &GridSignal) -> Result<GridSignal>;
    fn adjoint(&self, f: &GridSignal) -> Result<GridSignal>;
}

impl LinearOperator for Multiplier {
    fn apply(&self, f: &GridSignal) -> Result<GridSignal> {
        apply_multiplier(self, f)
    }

    fn adjoint(&self, f: &GridSignal) -> Result<GridSignal> {
        apply_multiplier(&self.conj(), f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMethod {
    PowerIteration,
    RandomLowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub method: EstimatorMethod,
    pub iterations: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl EstimatorConfig {
    pub fn new(method: EstimatorMethod, iterations: usize, trials: usize, seed: u64, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return param(format!("tolerance must be positive, got {tolerance}"));
        }
        if trials == 0 || iterations == 0 {
            return param("trials and iterations must be at least 1");
        }
        Ok(Self { method, iterations, trials, seed, tolerance })
    }

    pub fn power_iteration(seed: u64) -> Self {
        Self { method: EstimatorMethod::PowerIteration, iterations: 500, trials: 1, seed, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when the iteration cap was reached first.
    pub converged: bool,
}

/// Largest singular value by iterating `T*T` from a seeded Gaussian start.
pub fn power_iteration_norm(op: &dyn LinearOperator, spec: GridSpec, cfg: &EstimatorConfig) -> Result<NormEstimate> {
    if cfg.method == EstimatorMethod::RandomLowerBound {
        let value = random_lower_bound(op, spec, cfg)?;
        return Ok(NormEstimate { value, iterations: cfg.trials, converged: true });
    }
    let mut v = gaussian_signal(spec, &mut trial_rng(cfg.seed, 0));
    let norm = v.norm_l2();
    v = v.scale((1.0 / norm).into());
    let mut estimate = 0.0f64;
    for it in 1..=cfg.iterations {
        let w = op.adjoint(&op.apply(&v)?)?;
        let lambda = w.norm_l2();
        if lambda == 0.0 {
            return Ok(NormEstimate { value: 0.0, iterations: it, converged: true });
        }
        let next = lambda.sqrt();
        let change = (next - estimate).abs() / next;
        estimate = next;
        v = w.scale((1.0 / lambda).into());
        if change < cfg.tolerance {
            return Ok(NormEstimate { value: estimate, iterations: it, converged: true });
        }
    }
    Ok(NormEstimate { value: estimate, iterations: cfg.iterations, converged: false })
}

/// `max_trial |T f| / |f|` over seeded Gaussian `f`.
pub fn random_lower_bound(op: &dyn LinearOperator, spec: GridSpec, cfg: &EstimatorConfig) -> Result<f64> {
    let ratios = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let f = gaussian_signal(spec, &mut trial_rng(cfg.seed, t as u64));
            Ok(op.apply(&f)?.norm_l2() / f.norm_l2())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}
