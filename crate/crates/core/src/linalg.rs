//! Rank, nullspace and least-squares routines.
//!
//! Exact routines run Gaussian elimination over any [`Scalar`] (used with
//! rationals). Float routines use the SVD with a singular-value threshold
//! relative to the largest singular value.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::scalar::Scalar;

/// Default relative singular-value threshold for float rank decisions.
pub const SVD_REL_TOL: f64 = 1e-9;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<S: Scalar>(rows: &mut [Vec<S>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        // largest magnitude pivot keeps float use sane; exact use only needs nonzero
        let Some(p) = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .max_by(|&a, &b| rows[a][c].magnitude().total_cmp(&rows[b][c].magnitude()))
        else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for j in c..ncols {
            if !rows[r][j].is_zero() {
                rows[r][j] = rows[r][j].clone() * inv.clone();
            }
        }
        let pivot_row = rows[r].clone();
        let nz: Vec<usize> = (c..ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_exact<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace_exact<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|free| {
            let mut v = vec![S::zero(); ncols];
            v[free] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// A particular solution of `A x = b` (free variables zero), or `None`.
pub fn solve_exact<S: Scalar>(rows: &[Vec<S>], ncols: usize, rhs: &[S]) -> Option<Vec<S>> {
    let mut aug: Vec<Vec<S>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![S::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][ncols].clone();
    }
    Some(x)
}

fn mat_mul_exact<S: Scalar>(a: &[Vec<S>], basis: &[Vec<S>]) -> Vec<Vec<S>> {
    a.iter()
        .map(|row| {
            basis
                .iter()
                .map(|v| {
                    row.iter()
                        .zip(v)
                        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
                })
                .collect()
        })
        .collect()
}

/// Common kernel of several operators on the same space, computed by
/// successive restriction.
pub fn joint_kernel_exact<S: Scalar>(ops: &[Vec<Vec<S>>], dim: usize) -> Vec<Vec<S>> {
    let mut basis: Vec<Vec<S>> = (0..dim)
        .map(|i| {
            let mut v = vec![S::zero(); dim];
            v[i] = S::one();
            v
        })
        .collect();
    for op in ops {
        if basis.is_empty() {
            break;
        }
        let restricted = mat_mul_exact(op, &basis);
        let coeffs = nullspace_exact(&restricted, basis.len());
        basis = coeffs
            .iter()
            .map(|c| {
                let mut v = vec![S::zero(); dim];
                for (ci, b) in c.iter().zip(&basis) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (vj, bj) in v.iter_mut().zip(b) {
                        *vj = vj.clone() + ci.clone() * bj.clone();
                    }
                }
                v
            })
            .collect();
    }
    basis
}

pub fn to_dmatrix<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j].to_f64())
}

fn padded<T: ComplexField>(m: &DMatrix<T>) -> DMatrix<T> {
    if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        let mut p = DMatrix::zeros(m.ncols(), m.ncols());
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    }
}

pub fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    m.clone().svd(false, false).singular_values
}

/// Numerical rank with threshold `rel_tol · σ_max`.
pub fn rank_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * smax).count()
}

/// Orthonormal basis (columns) of the nullspace. Singular values at or below
/// `abs_tol` count as zero.
pub fn nullspace_svd_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, abs_tol: f64) -> DMatrix<T> {
    let ncols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    let p = padded(m);
    let svd = p.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= abs_tol)
        .collect();
    let mut out = DMatrix::zeros(ncols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for j in 0..ncols {
            out[(j, c)] = vt[(i, j)].clone().conjugate();
        }
    }
    out
}

/// Orthonormal nullspace basis with threshold `rel_tol · σ_max`.
pub fn nullspace_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    let smax = singular_values(m).iter().cloned().fold(0.0, f64::max);
    nullspace_svd_abs(m, rel_tol * smax)
}

/// Common kernel of several operators; singular values are compared against
/// `rel_tol` times the largest Frobenius norm among the operators.
pub fn joint_kernel_svd<T: ComplexField<RealField = f64>>(
    ops: &[DMatrix<T>],
    dim: usize,
    rel_tol: f64,
) -> DMatrix<T> {
    let scale = ops.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut basis = DMatrix::<T>::identity(dim, dim);
    for op in ops {
        if basis.ncols() == 0 {
            break;
        }
        let restricted = op * &basis;
        let coeffs = nullspace_svd_abs(&restricted, tol);
        basis = &basis * coeffs;
    }
    basis
}

/// Orthonormal basis (columns) of the column span of `m`.
pub fn column_span(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |i, c| u[(i, keep[c])])
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// orthonormal `q` inside ℝ^dim.
pub fn orthogonal_complement(q: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let proj = DMatrix::<f64>::identity(dim, dim) - q * q.transpose();
    let eig = proj.symmetric_eigen();
    let keep: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    DMatrix::from_fn(dim, keep.len(), |i, c| eig.eigenvectors[(i, keep[c])])
}

/// Minimum-norm least-squares solution via SVD pseudo-inverse.
pub fn lstsq_svd(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(b, rel_tol * smax).expect("u and v_t computed")
}

/// Least-squares solution through the normal equations restricted to the
/// row space; an independent route for uniqueness checks.
pub fn lstsq_normal(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let ata = a.transpose() * a;
    let atb = a.transpose() * b;
    ata.cholesky().map(|c| c.solve(&atb))
}
