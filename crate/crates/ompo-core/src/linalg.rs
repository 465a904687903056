//! Dense LU solve with partial pivoting.
//!
//! Sized for the tabular occupancy oracle (|S||A| <= 4096); not a general
//! production solver.

use crate::error::{CoreError, Result};
use alloc::vec::Vec;

/// Solves `a * x = b` in place; `a` is row-major n x n and is destroyed.
/// Returns the solution vector.
pub fn lu_solve(a: &mut [f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut x: Vec<f64> = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        // pivot
        let mut pivot = col;
        let mut best = libm::fabs(a[perm[col] * n + col]);
        for row in (col + 1)..n {
            let v = libm::fabs(a[perm[row] * n + col]);
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return Err(CoreError::SingularSystem);
        }
        perm.swap(col, pivot);
        let prow = perm[col];
        let diag = a[prow * n + col];
        for row in (col + 1)..n {
            let r = perm[row];
            let factor = a[r * n + col] / diag;
            if factor != 0.0 {
                a[r * n + col] = factor;
                for k in (col + 1)..n {
                    a[r * n + k] -= factor * a[prow * n + k];
                }
            } else {
                a[r * n + col] = 0.0;
            }
        }
    }

    // forward substitution on permuted rows
    let mut y = alloc::vec![0.0; n];
    for i in 0..n {
        let r = perm[i];
        let mut s = x[r];
        for k in 0..i {
            s -= a[r * n + k] * y[k];
        }
        y[i] = s;
    }
    // back substitution
    for i in (0..n).rev() {
        let r = perm[i];
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= a[r * n + k] * x[k];
        }
        x[i] = s / a[r * n + i];
    }
    Ok(x)
}
