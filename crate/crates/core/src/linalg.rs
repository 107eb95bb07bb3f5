//! Small dense linear-algebra helpers shared by the geometry and normalization code.

use nalgebra::{DMatrix, DVector};

/// Numerical rank of `m` with singular values below `tol * max(1, s_max)` treated as zero.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis of the null space of `m` (rows are constraints).
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    // Pad to a square system so the SVD returns a full set of right singular vectors.
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    (0..n)
        .filter(|&i| svd.singular_values[i] <= cut)
        .map(|i| v_t.row(i).transpose().into_owned())
        .collect()
}

/// Affine dimension of a point set (`-1` for the empty set is reported as `None`).
pub fn affine_dim(points: &[&DVector<f64>], tol: f64) -> Option<usize> {
    let first = points.first()?;
    if points.len() == 1 {
        return Some(0);
    }
    let n = first.len();
    let mut m = DMatrix::zeros(points.len() - 1, n);
    for (r, p) in points[1..].iter().enumerate() {
        m.row_mut(r).copy_from(&(*p - *first).transpose());
    }
    Some(rank(&m, tol))
}

pub fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Symmetric eigen-decomposition with eigenvalues sorted ascending.
pub fn sym_eigen(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (h + h.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = h.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `H^p` for a symmetric positive-definite `H`.
pub fn spd_power(h: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(h);
    let d = DMatrix::from_diagonal(&vals.map(|l| l.powf(p)));
    &vecs * d * vecs.transpose()
}

pub fn max_abs_asymmetry(h: &DMatrix<f64>) -> f64 {
    (h - h.transpose()).abs().max()
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn dmat(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn mat_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_plane() {
        let m = dmat(&[vec![1.0, 1.0, 0.0]]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v[0] + v[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn spd_inverse_sqrt() {
        let h = dmat(&[vec![4.0, 0.0], vec![0.0, 1.0]]);
        let t = spd_power(&h, -0.5);
        assert!((t[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((t[(1, 1)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn affine_dim_of_segment() {
        let a = dvec(&[0.0, 0.0, 0.0]);
        let b = dvec(&[1.0, 1.0, 1.0]);
        let c = dvec(&[2.0, 2.0, 2.0]);
        assert_eq!(affine_dim(&[&a, &b, &c], 1e-12), Some(1));
    }
}
