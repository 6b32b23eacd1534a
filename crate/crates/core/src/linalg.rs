//! Minimal dense linear algebra for the small symmetric systems that appear
//! in rank decorrelation and least-squares initialization. Matrices are
//! row-major `Vec<f64>` slices; sizes stay in the tens.

use crate::error::{Error, Result};

/// Cholesky factorization of a symmetric positive definite matrix.
/// Returns the lower factor L (row-major) with `a = L L^T`.
pub fn cholesky(a: &[f64], n: usize, context: &'static str) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite { context });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place for lower-triangular L.
pub fn solve_lower(l: &[f64], n: usize, b: &mut [f64]) {
    assert_eq!(b.len(), n);
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves `L^T x = b` in place for lower-triangular L.
pub fn solve_lower_transpose(l: &[f64], n: usize, b: &mut [f64]) {
    assert_eq!(b.len(), n);
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves the symmetric positive definite system `a x = b`.
pub fn solve_spd(a: &[f64], n: usize, b: &[f64], context: &'static str) -> Result<Vec<f64>> {
    let l = cholesky(a, n, context)?;
    let mut x = b.to_vec();
    solve_lower(&l, n, &mut x);
    solve_lower_transpose(&l, n, &mut x);
    Ok(x)
}

/// Least-squares solution of `design x ~ y` via the normal equations with a
/// tiny ridge for rank safety. `design` is `rows x cols`, row-major.
pub fn least_squares(design: &[f64], rows: usize, cols: usize, y: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(design.len(), rows * cols);
    assert_eq!(y.len(), rows);
    let mut ata = vec![0.0; cols * cols];
    let mut aty = vec![0.0; cols];
    for r in 0..rows {
        let row = &design[r * cols..(r + 1) * cols];
        for i in 0..cols {
            aty[i] += row[i] * y[r];
            for j in 0..=i {
                ata[i * cols + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..cols {
        for j in i + 1..cols {
            ata[i * cols + j] = ata[j * cols + i];
        }
    }
    let ridge = 1e-12 * (0..cols).map(|i| ata[i * cols + i]).fold(0.0f64, f64::max).max(1e-300);
    for i in 0..cols {
        ata[i * cols + i] += ridge;
    }
    solve_spd(&ata, cols, &aty, "least squares normal equations")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_recovers_known_factor() {
        // a = L L^T with L = [[2,0],[1,3]] -> a = [[4,2],[2,10]]
        let a = [4.0, 2.0, 2.0, 10.0];
        let l = cholesky(&a, 2, "test").unwrap();
        assert_eq!(l, vec![2.0, 0.0, 1.0, 3.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = [1.0, 2.0, 2.0, 1.0];
        assert!(cholesky(&a, 2, "test").is_err());
        let singular = [1.0, 1.0, 1.0, 1.0];
        assert!(cholesky(&singular, 2, "test").is_err());
    }

    #[test]
    fn spd_solve() {
        let a = [4.0, 2.0, 2.0, 10.0];
        let x = solve_spd(&a, 2, &[8.0, 22.0], "test").unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_exact_on_consistent_system() {
        // y = 3 + 2x sampled without noise.
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let mut design = Vec::new();
        let mut y = Vec::new();
        for &x in &xs {
            design.extend_from_slice(&[1.0, x]);
            y.push(3.0 + 2.0 * x);
        }
        let c = least_squares(&design, xs.len(), 2, &y).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-9);
        assert!((c[1] - 2.0).abs() < 1e-9);
    }
}
