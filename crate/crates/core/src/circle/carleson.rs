//! The truncated maximal operator `sup_{lambda in grid} |m_lambda(D) f|`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::kernel::{kernel_piece, KernelSpec};
use super::multiplier::multiplier_m_grid;
use crate::error::{param, Error, Result};
use crate::grid::{apply_multiplier, GridSignal, Multiplier};

/// Pointwise `sup_lambda |sum_{j <= j_max} m_{j,lambda}(D) f|` over a finite
/// `lambda` grid in `(0, 1]`; a lower bound for the supremum over all `lambda`.
pub fn carleson_operator(f: &GridSignal, lambdas: &[f64], j_max: u32, kernel: &KernelSpec, budget: u64) -> Result<GridSignal> {
    if lambdas.is_empty() {
        return param("lambda grid must not be empty");
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && **l <= 1.0)) {
        return param(format!("lambda grid must lie in (0, 1], found {bad}"));
    }
    if f.spec.n != kernel.n {
        return Err(Error::Dimension(format!("signal of dimension {} for kernel of dimension {}", f.spec.n, kernel.n)));
    }
    let pieces = (1..=j_max).map(|j| kernel_piece(j, kernel, budget)).collect::<Result<Vec<_>>>()?;
    let moduli = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut m = Multiplier::zeros(f.spec);
            for piece in &pieces {
                let part = multiplier_m_grid(piece, lambda, f.spec)?;
                for (a, b) in m.values.iter_mut().zip(part.values) {
                    *a += b;
                }
            }
            Ok(apply_multiplier(&m, f)?.values.iter().map(|v| v.norm()).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0f64; f.spec.len()];
    for row in moduli {
        for (o, v) in out.iter_mut().zip(row) {
            *o = o.max(v);
        }
    }
    GridSignal::new(f.spec, out.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::kernel::DEFAULT_SUPPORT_BUDGET;
    use crate::grid::GridSpec;

    #[test]
    fn delta_recovers_kernel_modulus() {
        let spec = GridSpec::new(1, 64).unwrap();
        let kernel = KernelSpec::riesz_1d(1);
        let out = carleson_operator(&GridSignal::delta(spec), &[0.25, 0.5, 1.0], 4, &kernel, DEFAULT_SUPPORT_BUDGET).unwrap();
        let pieces: Vec<_> = (1..=4).map(|j| kernel_piece(j, &kernel, DEFAULT_SUPPORT_BUDGET).unwrap()).collect();
        for x in 1..20i64 {
            let k: f64 = pieces
                .iter()
                .flat_map(|p| p.points.iter().zip(&p.values).filter(|(y, _)| y[0] == x).map(|(_, v)| *v))
                .sum();
            assert!((out.values[spec.index_wrapped(&[x])].re - k.abs()).abs() < 1e-12);
        }
        let zero = carleson_operator(&GridSignal::zeros(spec), &[0.5], 4, &kernel, DEFAULT_SUPPORT_BUDGET).unwrap();
        assert_eq!(zero.norm_sup(), 0.0);
        assert!(carleson_operator(&zero, &[0.0], 4, &kernel, DEFAULT_SUPPORT_BUDGET).is_err());
    }
}
