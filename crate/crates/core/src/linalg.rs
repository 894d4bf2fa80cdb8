//! Dense helpers backing the spectral operations: a deterministic cyclic
//! Jacobi eigensolver, a pivoted-elimination nullspace, Gram–Schmidt frame
//! completion, and the map a rotation induces on coordinate 2-planes.
//!
//! Everything here is plain f64 on nalgebra storage; determinism matters more
//! than squeezing flops, so sweep and pivot orders are fixed.

use nalgebra::{DMatrix, DVector};

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Operator infinity norm (max absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    let mut best = 0.0f64;
    for r in 0..m.nrows() {
        let mut s = 0.0;
        for c in 0..m.ncols() {
            s += m[(r, c)].abs();
        }
        best = best.max(s);
    }
    best
}

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps in fixed
/// row-major pair order. Returns eigenvalues ascending (ties kept in sweep
/// order) with matching orthonormal eigenvector columns.
///
/// `threshold` is relative to the largest input entry; rotations stop once
/// every off-diagonal entry falls below it.
pub fn jacobi_eigen(a: &DMatrix<f64>, threshold: f64) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigensolver needs a square matrix");
    // average away representation noise; callers hold symmetric operators
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = 0.5 * (a[(r, c)] + a[(c, r)]);
        }
    }
    let mut v = DMatrix::identity(n, n);
    let eps = threshold * max_abs(&m).max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for r in 0..n {
            for c in (r + 1)..n {
                off = off.max(m[(r, c)].abs());
            }
        }
        if off <= eps {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>, threshold: f64) -> f64 {
    jacobi_eigen(a, threshold).0[0]
}

/// Orthonormal basis of the nullspace of `a`, by Gaussian elimination with
/// partial pivoting. A pivot below `threshold` (relative to the largest input
/// entry) ends the rank; free columns seed the basis vectors.
pub fn nullspace(a: &DMatrix<f64>, threshold: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut m = a.clone();
    let eps = threshold * max_abs(a).max(1.0);

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut best_row = row;
        let mut best = m[(row, col)].abs();
        for r in (row + 1)..rows {
            if m[(r, col)].abs() > best {
                best = m[(r, col)].abs();
                best_row = r;
            }
        }
        if best <= eps {
            continue;
        }
        m.swap_rows(row, best_row);
        let pivot = m[(row, col)];
        for r in 0..rows {
            if r == row {
                continue;
            }
            let factor = m[(r, col)] / pivot;
            if factor != 0.0 {
                for c in col..cols {
                    m[(r, c)] -= factor * m[(row, c)];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    let mut basis = Vec::new();
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; cols];
        for &c in &pivot_cols {
            s[c] = true;
        }
        s
    };
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut x = DVector::zeros(cols);
        x[free] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = -m[(r, free)] / m[(r, pc)];
        }
        basis.push(x);
    }
    orthonormalize(&mut basis);
    basis
}

/// In-place modified Gram–Schmidt; vectors that collapse below 1e-10 are dropped.
pub fn orthonormalize(vectors: &mut Vec<DVector<f64>>) {
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors.iter() {
        let mut w = v.clone();
        for u in &kept {
            let c = u.dot(&w);
            w.axpy(-c, u, 1.0);
        }
        // second pass tightens near-dependent inputs
        for u in &kept {
            let c = u.dot(&w);
            w.axpy(-c, u, 1.0);
        }
        let n = w.norm();
        if n > 1e-10 {
            kept.push(w / n);
        }
    }
    *vectors = kept;
}

/// Orthogonal n×n matrix whose first column is `first` (must be nonzero);
/// remaining columns are Gram–Schmidt completions seeded by the standard
/// basis in index order.
pub fn complete_orthonormal(first: &DVector<f64>) -> DMatrix<f64> {
    let n = first.len();
    let norm = first.norm();
    assert!(norm > 1e-12, "cannot complete a zero vector");
    let mut cols: Vec<DVector<f64>> = vec![first / norm];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut w = DVector::zeros(n);
        w[k] = 1.0;
        for u in &cols {
            let c = u.dot(&w);
            w.axpy(-c, u, 1.0);
        }
        let nw = w.norm();
        if nw > 1e-8 {
            cols.push(w / nw);
        }
    }
    assert_eq!(cols.len(), n, "frame completion fell short");
    DMatrix::from_columns(&cols)
}

/// Matrix of the map induced on coordinate 2-planes by a (possibly
/// rectangular) frame matrix `f`: column (a<b) holds the plane coordinates of
/// f(e_a) ∧ f(e_b) over the row space, slots ordered lexicographically.
pub fn plane_map(f: &DMatrix<f64>) -> DMatrix<f64> {
    let rows = pair_list(f.nrows());
    let cols = pair_list(f.ncols());
    let mut out = DMatrix::zeros(rows.len(), cols.len());
    for (col, &(a, b)) in cols.iter().enumerate() {
        for (row, &(u, w)) in rows.iter().enumerate() {
            out[(row, col)] = f[(u, a)] * f[(w, b)] - f[(w, a)] * f[(u, b)];
        }
    }
    out
}

/// Square special case of [`plane_map`] for a linear map on R^n.
pub fn plane_induced_matrix(o: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(o.nrows(), o.ncols());
    plane_map(o)
}

/// Lexicographic list of index pairs (a, b) with a < b, 0-based.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            pairs.push((a, b));
        }
    }
    pairs
}
