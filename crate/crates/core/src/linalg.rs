use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
pub fn top_eigenpair(gram: DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let dim = gram.nrows();
    if dim == 1 {
        return (gram[(0, 0)].re, DVector::from_element(1, Complex64::new(1.0, 0.0)));
    }
    let eig = gram.symmetric_eigen();
    let (idx, value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    (value, eig.eigenvectors.column(idx).into_owned())
}

/// Largest singular value of a dense `rows x cols` matrix given row by row.
pub fn largest_singular_value(rows: &[Vec<Complex64>]) -> f64 {
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 {
        return 0.0;
    }
    let mut gram = DMatrix::<Complex64>::zeros(cols, cols);
    for row in rows {
        for a in 0..cols {
            let ca = row[a].conj();
            for b in a..cols {
                gram[(a, b)] += ca * row[b];
            }
        }
    }
    fill_lower(&mut gram);
    top_eigenpair(gram).0.max(0.0).sqrt()
}

/// Mirrors the upper triangle into the lower one.
pub(crate) fn fill_lower(gram: &mut DMatrix<Complex64>) {
    let n = gram.nrows();
    for a in 0..n {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)].conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_value_of_known_matrices() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let rows = vec![vec![c(3.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -2.0)]];
        assert!((largest_singular_value(&rows) - 3.0).abs() < 1e-12);
        let rows = vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]];
        assert!((largest_singular_value(&rows) - 2.0).abs() < 1e-12);
        let rows = vec![vec![c(0.6, 0.8)], vec![c(0.0, 0.0)]];
        assert!((largest_singular_value(&rows) - 1.0).abs() < 1e-12);
    }
}
