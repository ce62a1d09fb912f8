//! Dense matrix primitives: storage, submatrix extraction, singular values,
//! the three norms used throughout the crate, and the Nyström extension.
//!
//! Everything here operates on small dense matrices (a few hundred per side
//! at most), so all spectral quantities are computed by full decompositions;
//! there are no iterative or randomized shortcuts. Singular value
//! decompositions and symmetric eigendecompositions are delegated to
//! `nalgebra`; the types and every formula layered on top of them live here.
//!
//! # Norms
//!
//! Three matrix norms appear in the sample-complexity constants and the
//! analysis the algorithms rely on:
//!
//! * `max`: the elementwise maximum absolute entry. This is the
//!   approximation metric for completed matrices.
//! * `one`: the induced 1-norm, i.e. the maximum column absolute sum.
//! * `two`: the spectral norm, i.e. the largest singular value.
//!
//! # Nyström extension
//!
//! Given a K×s column block `C` of a symmetric PSD matrix and the s×s
//! principal block `W` on the same index set, the extension `C W⁻¹ Cᵀ`
//! reconstructs the full matrix exactly whenever the selected columns span
//! the column space. `W⁻¹` is realized as an SVD pseudo-inverse with a
//! relative cutoff so that float-degenerate blocks degrade gracefully
//! instead of blowing up.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Relative singular-value cutoff used by [`pinv`] callers throughout the
/// crate, and the floor below which a principal block counts as singular.
pub const PINV_REL_TOL: f64 = 1e-12;

/// Dense real matrix in row-major order. All entries are finite by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite entry {} at flat index {pos}",
                data[pos]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Builds a matrix entry by entry. The closure must return finite values;
    /// this is checked in debug builds.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                debug_assert!(v.is_finite(), "from_fn produced non-finite entry at ({i},{j})");
                data.push(v);
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Plain triple-loop product. Panics on shape mismatch; public entry
    /// points validate shapes before multiplying.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "cannot subtract {}x{} from {}x{}",
                rhs.rows, rhs.cols, self.rows, self.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `(X + Xᵀ)/2` for square `X`: removes float asymmetry exactly.
    pub fn symmetrize(&self) -> Matrix {
        assert!(self.is_square(), "symmetrize needs a square matrix");
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_na(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// An ordered set of distinct row/column indices into a K×K matrix, kept
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
    k: usize,
}

impl IndexSet {
    /// Validates that `indices` is strictly increasing with every index < `k`.
    pub fn new(indices: Vec<usize>, k: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Argument("index set must be non-empty".into()));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Argument(format!(
                    "indices must be strictly increasing, saw {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let last = *indices.last().expect("non-empty");
        if last >= k {
            return Err(Error::Dimension(format!("index {last} out of range for side {k}")));
        }
        Ok(Self { indices, k })
    }

    /// Sorts on the way in; rejects duplicates. Convenient when columns are
    /// discovered out of order.
    pub fn from_unsorted(mut indices: Vec<usize>, k: usize) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices, k)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Side of the matrix this set indexes into.
    pub fn ambient(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Elementwise maximum absolute entry.
    Max,
    /// Induced 1-norm: maximum column absolute sum.
    One,
    /// Spectral norm: largest singular value.
    Two,
}

/// Computes the requested norm of `m`.
pub fn norm(m: &Matrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Max => m.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
        NormKind::One => {
            let mut best = 0.0_f64;
            for j in 0..m.cols {
                let mut col = 0.0;
                for i in 0..m.rows {
                    col += m.get(i, j).abs();
                }
                best = best.max(col);
            }
            best
        }
        NormKind::Two => singular_extremes(m).0,
    }
}

/// Largest and smallest singular values of `m`, via a full SVD.
///
/// Defined for rectangular input as well; for an n×m matrix the smallest of
/// the min(n,m) singular values is returned.
pub fn singular_extremes(m: &Matrix) -> (f64, f64) {
    let svd = m.to_na().svd(false, false);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for s in svd.singular_values.iter() {
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    (hi, lo)
}

/// Smallest singular value of a square matrix. For symmetric PSD input this
/// equals the smallest eigenvalue.
pub fn sigma_min(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "sigma_min needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(singular_extremes(m).1)
}

/// Smallest eigenvalue of a symmetric matrix (used for PSD validation).
pub fn min_symmetric_eigenvalue(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let eig = SymmetricEigen::new(m.to_na());
    Ok(eig.eigenvalues.iter().fold(f64::INFINITY, |acc, v| acc.min(*v)))
}

/// The |s|×|s| principal submatrix of `m` on the indices of `s`, in `s` order.
pub fn principal_submatrix(m: &Matrix, s: &IndexSet) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "principal submatrix needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if s.ambient() > m.rows {
        return Err(Error::Dimension(format!(
            "index set addresses side {} but matrix side is {}",
            s.ambient(),
            m.rows
        )));
    }
    let idx = s.as_slice();
    Ok(Matrix::from_fn(idx.len(), idx.len(), |i, j| m.get(idx[i], idx[j])))
}

/// The K×|s| block of the columns of `m` selected by `s`, in `s` order.
pub fn column_block(m: &Matrix, s: &IndexSet) -> Result<Matrix> {
    if s.ambient() > m.cols {
        return Err(Error::Dimension(format!(
            "index set addresses {} columns but matrix has {}",
            s.ambient(),
            m.cols
        )));
    }
    let idx = s.as_slice();
    Ok(Matrix::from_fn(m.rows, idx.len(), |i, j| m.get(i, idx[j])))
}

/// Moore–Penrose pseudo-inverse with a relative cutoff: singular values
/// below `tol × σ_max` are treated as exact zeros.
pub fn pinv(m: &Matrix, tol: f64) -> Result<Matrix> {
    if tol < 0.0 || !tol.is_finite() {
        return Err(Error::Argument(format!("pinv tolerance must be finite and >= 0, got {tol}")));
    }
    let svd = m.to_na().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    let cutoff = tol * sigma_max;
    // pinv = V Σ⁺ Uᵀ with Σ⁺ inverting only the values above the cutoff.
    let r = svd.singular_values.len();
    let mut out = DMatrix::<f64>::zeros(m.cols, m.rows);
    for k in 0..r {
        let s = svd.singular_values[k];
        if s > cutoff && s > 0.0 {
            let inv = 1.0 / s;
            for i in 0..m.cols {
                let vik = v_t[(k, i)];
                if vik == 0.0 {
                    continue;
                }
                for j in 0..m.rows {
                    out[(i, j)] += vik * inv * u[(j, k)];
                }
            }
        }
    }
    Ok(Matrix::from_na(&out))
}

/// Nyström extension `c · pinv(w) · cᵀ`, symmetrized exactly.
///
/// `c` holds K×s selected columns and `w` the s×s principal block on the
/// same index set. The result reproduces the source matrix whenever the
/// selected columns are linearly independent and span its column space.
pub fn nystrom_extend(c: &Matrix, w: &Matrix, tol: f64) -> Result<Matrix> {
    if !w.is_square() {
        return Err(Error::Dimension(format!("w must be square, got {}x{}", w.rows, w.cols)));
    }
    if c.cols != w.rows {
        return Err(Error::Dimension(format!(
            "c has {} columns but w has side {}",
            c.cols, w.rows
        )));
    }
    let w_inv = pinv(w, tol)?;
    let ext = c.mul(&w_inv).mul(&c.transpose());
    Ok(ext.symmetrize())
}

/// The two problem-dependent constants that scale the sample counts of the
/// noisy estimation phase:
///
/// ```text
/// C1 = max(‖W⁻¹Cᵀ‖max, ‖W⁻¹Cᵀ‖max², ‖W⁻¹‖max, ‖CW⁻¹‖₁², ‖W⁻¹‖₂·‖W⁻¹‖max)
/// C2 = max(‖W⁻¹‖₂²·‖W⁻¹‖max², ‖W⁻¹‖₂·‖W⁻¹‖max, ‖W⁻¹‖₂, ‖W⁻¹‖₂²)
/// ```
///
/// Requires `w` invertible to working precision (σ_min > [`PINV_REL_TOL`] ×
/// σ_max); use [`c1_c2_from_inverse`] directly when a pseudo-inverse of a
/// possibly-degenerate estimate is all that is available.
pub fn c1_c2_constants(w: &Matrix, c: &Matrix) -> Result<(f64, f64)> {
    if !w.is_square() {
        return Err(Error::Dimension(format!("w must be square, got {}x{}", w.rows, w.cols)));
    }
    if c.cols != w.rows {
        return Err(Error::Dimension(format!(
            "c has {} columns but w has side {}",
            c.cols, w.rows
        )));
    }
    let (hi, lo) = singular_extremes(w);
    if hi == 0.0 || lo <= PINV_REL_TOL * hi {
        return Err(Error::Singular(format!(
            "w is singular to working precision (sigma_min {lo:e}, sigma_max {hi:e})"
        )));
    }
    let w_inv = pinv(w, PINV_REL_TOL)?;
    Ok(c1_c2_from_inverse(&w_inv, c))
}

/// Evaluates the C1/C2 norm formulas on a supplied inverse (or
/// pseudo-inverse) of W. Never errors: degenerate inputs simply produce the
/// norms of whatever inverse was given.
pub fn c1_c2_from_inverse(w_inv: &Matrix, c: &Matrix) -> (f64, f64) {
    let winv_ct = w_inv.mul(&c.transpose());
    let c_winv = c.mul(w_inv);
    let winv_ct_max = norm(&winv_ct, NormKind::Max);
    let winv_max = norm(w_inv, NormKind::Max);
    let winv_two = norm(w_inv, NormKind::Two);
    let c_winv_one = norm(&c_winv, NormKind::One);
    let c1 = winv_ct_max
        .max(winv_ct_max * winv_ct_max)
        .max(winv_max)
        .max(c_winv_one * c_winv_one)
        .max(winv_two * winv_max);
    let c2 = (winv_two * winv_two * winv_max * winv_max)
        .max(winv_two * winv_max)
        .max(winv_two)
        .max(winv_two * winv_two);
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::new(rows, cols, data.to_vec()).unwrap()
    }

    // ---------------------------------------------------------------- shape

    #[test]
    fn constructor_rejects_bad_shapes_and_values() {
        assert!(matches!(Matrix::new(0, 2, vec![]), Err(Error::Dimension(_))));
        assert!(matches!(Matrix::new(2, 2, vec![1.0; 3]), Err(Error::Dimension(_))));
        assert!(matches!(Matrix::new(1, 2, vec![1.0, f64::NAN]), Err(Error::Data(_))));
        assert!(matches!(Matrix::new(1, 1, vec![f64::INFINITY]), Err(Error::Data(_))));
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![0, 2, 5], 6).is_ok());
        assert!(matches!(IndexSet::new(vec![], 4), Err(Error::Argument(_))));
        assert!(matches!(IndexSet::new(vec![2, 2], 4), Err(Error::Argument(_))));
        assert!(matches!(IndexSet::new(vec![3, 1], 4), Err(Error::Argument(_))));
        assert!(matches!(IndexSet::new(vec![0, 4], 4), Err(Error::Dimension(_))));
        let s = IndexSet::from_unsorted(vec![5, 0, 2], 6).unwrap();
        assert_eq!(s.as_slice(), &[0, 2, 5]);
    }

    // ----------------------------------------------------------- sigma_min

    #[test]
    fn sigma_min_identity_is_one() {
        let m = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(sigma_min(&m).unwrap(), 1.0);
    }

    #[test]
    fn sigma_min_zero_matrix_is_zero() {
        assert_eq!(sigma_min(&Matrix::zeros(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn sigma_min_of_diagonal_is_min_abs_diagonal() {
        // Singular values of a diagonal matrix are the absolute diagonal
        // entries, so diag(2,3) has sigma_min exactly 2.
        let m = mat(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!((sigma_min(&m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_min_rejects_rectangular() {
        let m = mat(2, 3, &[1.0; 6]);
        assert!(matches!(sigma_min(&m), Err(Error::Dimension(_))));
    }

    // -------------------------------------------------- principal submatrix

    #[test]
    fn principal_submatrix_of_identity() {
        let m = mat(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let s = IndexSet::new(vec![0, 2], 3).unwrap();
        let sub = principal_submatrix(&m, &s).unwrap();
        assert_eq!(sub, mat(2, 2, &[1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn principal_submatrix_full_selection_is_identity_map() {
        let m = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let s = IndexSet::new(vec![0, 1], 2).unwrap();
        assert_eq!(principal_submatrix(&m, &s).unwrap(), m);
    }

    #[test]
    fn principal_submatrix_direct_readout() {
        let m = mat(3, 3, &[1.0, 2.0, 3.0, 2.0, 5.0, 6.0, 3.0, 6.0, 9.0]);
        let s = IndexSet::new(vec![1, 2], 3).unwrap();
        assert_eq!(principal_submatrix(&m, &s).unwrap(), mat(2, 2, &[5.0, 6.0, 6.0, 9.0]));
    }

    // ----------------------------------------------------------------- norm

    #[test]
    fn norms_of_small_example() {
        let m = mat(2, 2, &[1.0, -3.0, 2.0, 0.0]);
        assert_eq!(norm(&m, NormKind::Max), 3.0);
        // Column sums are |1|+|2| = 3 and |-3|+|0| = 3.
        assert_eq!(norm(&m, NormKind::One), 3.0);
    }

    #[test]
    fn two_norm_of_identity_is_one() {
        let m = mat(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((norm(&m, NormKind::Two) - 1.0).abs() < 1e-12);
    }

    // -------------------------------------------------------------- nystrom

    #[test]
    fn nystrom_full_selection_reproduces_l() {
        // c = w = L for invertible symmetric L gives L L⁻¹ Lᵀ = L.
        let l = mat(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let ext = nystrom_extend(&l, &l, PINV_REL_TOL).unwrap();
        let err = norm(&ext.sub(&l).unwrap(), NormKind::Max);
        assert!(err < 1e-12, "max-norm error {err}");
    }

    #[test]
    fn nystrom_rank1_single_column() {
        // L = vvᵀ; its first column is v·v₁ and W = [v₁²], so
        // (v v₁)(v₁²)⁻¹(v v₁)ᵀ = vvᵀ exactly.
        let v = [0.6, 0.3, 0.9];
        let l = Matrix::from_fn(3, 3, |i, j| v[i] * v[j]);
        let c = Matrix::from_fn(3, 1, |i, _| v[i] * v[0]);
        let w = mat(1, 1, &[v[0] * v[0]]);
        let ext = nystrom_extend(&c, &w, PINV_REL_TOL).unwrap();
        let err = norm(&ext.sub(&l).unwrap(), NormKind::Max);
        assert!(err < 1e-12, "max-norm error {err}");
    }

    #[test]
    fn nystrom_rank2_exactness_against_brute_force() {
        // Rank-2 SPSD L assembled by brute force from two outer products;
        // the first two columns are independent for this choice.
        let a = [0.9, 0.1, 0.4, 0.7, 0.2, 0.5];
        let b = [0.2, 0.8, 0.3, 0.1, 0.6, 0.4];
        let l = Matrix::from_fn(6, 6, |i, j| a[i] * a[j] + b[i] * b[j]);
        let s = IndexSet::new(vec![0, 1], 6).unwrap();
        let c = column_block(&l, &s).unwrap();
        let w = principal_submatrix(&l, &s).unwrap();
        let ext = nystrom_extend(&c, &w, PINV_REL_TOL).unwrap();
        let err = norm(&ext.sub(&l).unwrap(), NormKind::Max);
        assert!(err < 1e-9, "max-norm error {err}");
    }

    #[test]
    fn nystrom_zero_w_degrades_to_zero() {
        // Pseudo-inverse of a zero block is zero; the extension collapses
        // instead of dividing by zero.
        let c = Matrix::zeros(3, 1);
        let w = Matrix::zeros(1, 1);
        let ext = nystrom_extend(&c, &w, PINV_REL_TOL).unwrap();
        assert_eq!(ext, Matrix::zeros(3, 3));
    }

    #[test]
    fn nystrom_dimension_mismatch() {
        let c = Matrix::zeros(3, 2);
        let w = Matrix::zeros(3, 3);
        assert!(matches!(nystrom_extend(&c, &w, 0.0), Err(Error::Dimension(_))));
    }

    // ------------------------------------------------------------------ pinv

    #[test]
    fn pinv_matches_inverse_for_invertible_input() {
        let m = mat(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let inv = pinv(&m, PINV_REL_TOL).unwrap();
        let prod = m.mul(&inv);
        let err = norm(&prod.sub(&mat(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap(), NormKind::Max);
        assert!(err < 1e-12, "M·M⁺ deviates from I by {err}");
    }

    #[test]
    fn pinv_of_rank_deficient_matrix_satisfies_penrose_identity() {
        // Rank-1 input: M M⁺ M = M is the defining property that survives
        // rank deficiency.
        let m = mat(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let p = pinv(&m, PINV_REL_TOL).unwrap();
        let back = m.mul(&p).mul(&m);
        let err = norm(&back.sub(&m).unwrap(), NormKind::Max);
        assert!(err < 1e-12, "M M⁺ M deviates from M by {err}");
    }

    // ------------------------------------------------------------- c1 / c2

    #[test]
    fn c1_c2_identity_case() {
        let i2 = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (c1, c2) = c1_c2_constants(&i2, &i2).unwrap();
        assert_eq!((c1, c2), (1.0, 1.0));
    }

    #[test]
    fn c2_of_half_identity_is_sixteen() {
        // W⁻¹ = 2I: ‖W⁻¹‖₂ = ‖W⁻¹‖max = 2, so C2 = max(16, 4, 2, 4) = 16.
        let w = mat(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        let c = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (c1, c2) = c1_c2_constants(&w, &c).unwrap();
        assert!((c2 - 16.0).abs() < 1e-12, "C2 = {c2}");
        // For this W the C1 list is (2, 4, 2, 4, 4).
        assert!((c1 - 4.0).abs() < 1e-12, "C1 = {c1}");
    }

    #[test]
    fn c1_c2_frozen_cross_check() {
        // Independently evaluated (numpy) for this exact W and C:
        // C1 = ‖CW⁻¹‖₁² = 18.286876731301938, C2 = ‖W⁻¹‖₂²‖W⁻¹‖max² =
        // 60.54723701235613.
        let w = mat(2, 2, &[0.5, 0.1, 0.1, 0.4]);
        let c = mat(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.5, 0.25, 0.125, 0.3]);
        let (c1, c2) = c1_c2_constants(&w, &c).unwrap();
        assert!((c1 - 18.286876731301938).abs() < 1e-9, "C1 = {c1}");
        assert!((c2 - 60.54723701235613).abs() < 1e-9, "C2 = {c2}");
    }

    #[test]
    fn c1_c2_rejects_singular_w() {
        let w = mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let c = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(c1_c2_constants(&w, &c), Err(Error::Singular(_))));
    }

    // -------------------------------------------------------- miscellaneous

    #[test]
    fn symmetrize_averages_off_diagonal() {
        let m = mat(2, 2, &[1.0, 2.0, 4.0, 3.0]);
        assert_eq!(m.symmetrize(), mat(2, 2, &[1.0, 3.0, 3.0, 3.0]));
    }

    #[test]
    fn column_block_extracts_in_order() {
        let m = mat(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = IndexSet::new(vec![0, 2], 3).unwrap();
        assert_eq!(column_block(&m, &s).unwrap(), mat(2, 2, &[1.0, 3.0, 4.0, 6.0]));
    }

    #[test]
    fn min_symmetric_eigenvalue_of_psd_is_nonnegative() {
        let a = [0.9, 0.1, 0.4];
        let l = Matrix::from_fn(3, 3, |i, j| a[i] * a[j]);
        let lambda = min_symmetric_eigenvalue(&l).unwrap();
        assert!(lambda > -1e-12, "min eigenvalue {lambda}");
    }
}
