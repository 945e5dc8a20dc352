//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::laurent::C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value; 0 for empty matrices.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Orthonormal basis (as columns) of `{x : a x = 0}`, treating singular
/// values below `threshold` as zero.
pub fn nullspace(a: &CMatrix, threshold: f64) -> CMatrix {
    let n = a.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Thin SVD only yields min(rows, n) right singular vectors; pad to square.
    let padded = if a.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.rows_mut(0, a.nrows()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let cols: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < threshold)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Re-expresses an orthonormal column basis of a subspace by pivoted
/// Gram–Schmidt on the projections of the standard basis vectors, so that a
/// coordinate-aligned subspace comes back as standard vectors in index order.
pub fn canonical_basis(k: &CMatrix) -> CMatrix {
    let (n, dim) = k.shape();
    if dim == 0 {
        return k.clone();
    }
    let projector = k * k.adjoint();
    let mut chosen: Vec<CVector> = Vec::with_capacity(dim);
    let mut used = vec![false; n];
    while chosen.len() < dim {
        let mut best: Option<(usize, CVector, f64)> = None;
        for i in (0..n).filter(|i| !used[*i]) {
            let mut v = projector.column(i).into_owned();
            for u in &chosen {
                let c = u.dotc(&v);
                v -= u * c;
            }
            let norm = v.norm();
            // prefer the lowest index among (numerically) equal candidates
            if best.as_ref().is_none_or(|b| norm > b.2 + 1e-9) {
                best = Some((i, v, norm));
            }
        }
        let Some((i, v, norm)) = best else { break };
        if norm < 1e-12 {
            break;
        }
        used[i] = true;
        chosen.push(v / C64::new(norm, 0.0));
    }
    CMatrix::from_columns(&chosen)
}

/// Orthonormal basis of the column span, singular values below `threshold` dropped.
pub fn range_basis(a: &CMatrix, threshold: f64) -> CMatrix {
    if a.ncols() == 0 {
        return a.clone();
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let cols: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s >= threshold)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(a.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Entrywise conjugate (no transpose).
pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|c| c.conj())
}

/// Distance from `v` to the span of the orthonormal columns of `q`.
pub fn distance_to_span(q: &CMatrix, v: &CVector) -> f64 {
    if q.ncols() == 0 {
        return v.norm();
    }
    let proj = q * (q.adjoint() * v);
    (v - proj).norm()
}
