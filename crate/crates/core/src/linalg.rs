//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Symmetric eigendecomposition with eigenvalues ascending and a fixed
/// column sign (the largest-magnitude component of each vector is positive).
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Flip `v` so that its largest-magnitude entry (first one on ties) is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs + 1e-12 {
            best = i;
            best_abs = x.abs();
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// max |CᵀC − I|.
pub fn orthonormality_error(c: &DMatrix<f64>) -> f64 {
    let g = c.transpose() * c;
    let mut err: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((g[(i, j)] - target).abs());
        }
    }
    err
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Horizontal concatenation of column blocks that share a row count.
pub fn hcat(blocks: &[&DMatrix<f64>], rows: usize) -> DMatrix<f64> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, offset), (rows, b.ncols())).copy_from(b);
        offset += b.ncols();
    }
    out
}

/// Columns of `m` selected by index, in the given order.
pub fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_sign_fixed() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let (vals, vecs) = sym_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!(orthonormality_error(&vecs) < 1e-12);
        for j in 0..3 {
            let col = vecs.column(j);
            let imax = col.iamax();
            assert!(col[imax] > 0.0);
            let r = &m * col - col * vals[j];
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn hcat_and_select() {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let b = DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 5.0, 6.0]);
        let c = hcat(&[&a, &b], 2);
        assert_eq!(c.ncols(), 3);
        assert_eq!(c[(1, 2)], 6.0);
        let s = select_columns(&c, &[2, 0]);
        assert_eq!(s[(0, 0)], 4.0);
        assert_eq!(s[(1, 1)], 2.0);
    }
}
