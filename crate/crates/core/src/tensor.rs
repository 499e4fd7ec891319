//! Dense rank-k tensors and the multilinear operations used by the
//! tensor-normal likelihood: mode-p products, slicing, vectorization.
//!
//! Layout contract: entries are stored flat with the mode-1 index varying
//! fastest, so `vectorize` of `t x_1 A_1 ... x_k A_k` equals
//! `(A_k (x) ... (x) A_1) * vectorize(t)`. Every consumer of flat data in
//! this crate relies on that ordering.

use crate::error::{Error, Result};

/// Dense row-major matrix, the currency for mode products and factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DataLength {
                len: data.len(),
                dims: vec![rows, cols],
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    /// Borrow row `r` as a slice.
    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: vec![self.rows, self.cols],
                right: vec![other.rows, other.cols],
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }
}

/// Dense rank-k tensor with explicit dimensions.
///
/// Rank 0 (empty `dims`, a single entry) is permitted as the degenerate
/// scalar produced by slicing a rank-1 tensor. Operations return new
/// tensors; values are never mutated through a shared reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Build a tensor from dimensions and flat data in the declared layout.
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter(format!(
                "all dimensions must be >= 1, got {dims:?}"
            )));
        }
        let expect: usize = dims.iter().product();
        if data.len() != expect {
            return Err(Error::DataLength {
                len: data.len(),
                dims,
            });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            dims,
            data: vec![0.0; n],
        }
    }

    /// Fill entry-by-entry from a function of the multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dims);
        let rank = t.rank();
        let mut idx = vec![0usize; rank];
        for flat in 0..t.data.len() {
            t.data[flat] = f(&idx);
            // advance multi-index, mode 1 fastest
            for p in 0..rank {
                idx[p] += 1;
                if idx[p] < t.dims[p] {
                    break;
                }
                idx[p] = 0;
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Flat offset of a multi-index under the mode-1-fastest layout.
    fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.rank() {
            return Err(Error::ModeOutOfRange {
                mode: index.len(),
                rank: self.rank(),
            });
        }
        let mut flat = 0usize;
        let mut stride = 1usize;
        for (p, (&i, &d)) in index.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return Err(Error::IndexOutOfRange { index: i, len: d });
            }
            flat += i * stride;
            stride *= self.dims[p];
        }
        Ok(flat)
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.flat_index(index)?])
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let flat = self.flat_index(index)?;
        self.data[flat] = value;
        Ok(())
    }

    /// Contract mode `mode` (1-based) with the columns of `mat`, replacing
    /// that dimension by `mat.rows()`.
    ///
    /// Entry-wise the result is `sum_j mat[a, j] * t[..., j at mode, ...]`.
    pub fn mode_product(&self, mat: &Matrix, mode: usize) -> Result<DenseTensor> {
        let (pre, mid, post) = self.mode_split(mode)?;
        if mat.cols() != mid {
            return Err(Error::ModeDimensionMismatch {
                mode,
                matrix_cols: mat.cols(),
                tensor_dim: mid,
            });
        }
        let r = mat.rows();
        let mut dims = self.dims.clone();
        dims[mode - 1] = r;
        let mut out = vec![0.0; pre * r * post];
        for q in 0..post {
            let in_base = pre * mid * q;
            let out_base = pre * r * q;
            for a in 0..r {
                let row = mat.row(a);
                let out_off = out_base + pre * a;
                for (j, &coeff) in row.iter().enumerate() {
                    if coeff == 0.0 {
                        continue;
                    }
                    let in_off = in_base + pre * j;
                    for k in 0..pre {
                        out[out_off + k] += coeff * self.data[in_off + k];
                    }
                }
            }
        }
        DenseTensor::new(dims, out)
    }

    /// Sum of squared entries.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Flat entries in the declared mode-1-fastest layout.
    pub fn vectorize(&self) -> Vec<f64> {
        self.data.clone()
    }

    /// Rebuild a tensor from a `vectorize` result.
    pub fn devectorize(values: Vec<f64>, dims: Vec<usize>) -> Result<DenseTensor> {
        DenseTensor::new(dims, values)
    }

    pub fn subtract(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<DenseTensor> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        DenseTensor::new(self.dims.clone(), data)
    }

    /// Sub-tensor of rank k-1 at a fixed index of mode `mode` (1-based).
    pub fn slice(&self, mode: usize, index: usize) -> Result<DenseTensor> {
        let (pre, mid, post) = self.mode_split(mode)?;
        if index >= mid {
            return Err(Error::IndexOutOfRange { index, len: mid });
        }
        let mut dims = self.dims.clone();
        dims.remove(mode - 1);
        let mut out = Vec::with_capacity(pre * post);
        for q in 0..post {
            let base = pre * (index + mid * q);
            out.extend_from_slice(&self.data[base..base + pre]);
        }
        DenseTensor::new(dims, out)
    }

    /// Stack rank-(k-1) tensors of equal shape into a rank-k tensor along
    /// `mode` (1-based); inverse of slicing over all indices of that mode.
    pub fn stack(slices: &[DenseTensor], mode: usize) -> Result<DenseTensor> {
        let first = slices
            .first()
            .ok_or_else(|| Error::Precondition("stack requires at least one slice".into()))?;
        let out_rank = first.rank() + 1;
        if mode == 0 || mode > out_rank {
            return Err(Error::ModeOutOfRange {
                mode,
                rank: out_rank,
            });
        }
        for s in slices {
            if s.dims != first.dims {
                return Err(Error::ShapeMismatch {
                    left: first.dims.clone(),
                    right: s.dims.clone(),
                });
            }
        }
        let mut dims = first.dims.clone();
        dims.insert(mode - 1, slices.len());
        let pre: usize = first.dims[..mode - 1].iter().product();
        let post: usize = first.dims[mode - 1..].iter().product();
        let mid = slices.len();
        let mut out = vec![0.0; pre * mid * post];
        for (i, s) in slices.iter().enumerate() {
            for q in 0..post {
                let src = pre * q;
                let dst = pre * (i + mid * q);
                out[dst..dst + pre].copy_from_slice(&s.data[src..src + pre]);
            }
        }
        DenseTensor::new(dims, out)
    }

    /// Strides around `mode`: (product of earlier dims, dims[mode-1],
    /// product of later dims). Validates `1 <= mode <= rank`.
    fn mode_split(&self, mode: usize) -> Result<(usize, usize, usize)> {
        if mode == 0 || mode > self.rank() {
            return Err(Error::ModeOutOfRange {
                mode,
                rank: self.rank(),
            });
        }
        let pre = self.dims[..mode - 1].iter().product();
        let mid = self.dims[mode - 1];
        let post = self.dims[mode..].iter().product();
        Ok((pre, mid, post))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_tensor(rng: &mut impl Rng, dims: &[usize]) -> DenseTensor {
        let n = dims.iter().product();
        let data = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        DenseTensor::new(dims.to_vec(), data).unwrap()
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    /// Index-loop oracle: contracts mode `mode` one entry at a time.
    fn naive_mode_product(t: &DenseTensor, mat: &Matrix, mode: usize) -> DenseTensor {
        let mut dims = t.dims().to_vec();
        dims[mode - 1] = mat.rows();
        DenseTensor::from_fn(dims, |idx| {
            let mut src = idx.to_vec();
            let mut acc = 0.0;
            for j in 0..mat.cols() {
                src[mode - 1] = j;
                acc += mat.get(idx[mode - 1], j) * t.get(&src).unwrap();
            }
            acc
        })
    }

    /// Kronecker product oracle, row-major.
    fn kron(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                for k in 0..b.rows() {
                    for l in 0..b.cols() {
                        out.set(i * b.rows() + k, j * b.cols() + l, a.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn mode_product_identity_leaves_tensor_unchanged() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let t = random_tensor(&mut rng, &[2, 2, 2]);
        for mode in 1..=3 {
            let got = t.mode_product(&Matrix::identity(2), mode).unwrap();
            assert_eq!(got, t, "identity at mode {mode}");
        }
    }

    #[test]
    fn mode_product_ones_matrix_sums_fibers() {
        let t = DenseTensor::new(vec![2, 2, 2], vec![1.0; 8]).unwrap();
        let ones = Matrix::new(2, 2, vec![1.0; 4]).unwrap();
        let got = t.mode_product(&ones, 1).unwrap();
        assert!(got.data().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn mode_product_matches_naive_loop_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let t = random_tensor(&mut rng, &[3, 4, 2]);
        let m = random_matrix(&mut rng, 5, 3);
        let fast = t.mode_product(&m, 1).unwrap();
        let slow = naive_mode_product(&t, &m, 1);
        assert_eq!(fast.dims(), &[5, 4, 2]);
        for (a, b) in fast.data().iter().zip(slow.data()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn mode_product_shape_error_names_mode_and_sizes() {
        let t = DenseTensor::zeros(vec![3, 4, 2]);
        let m = Matrix::zeros(5, 4);
        let err = t.mode_product(&m, 1).unwrap_err();
        match err {
            Error::ModeDimensionMismatch {
                mode,
                matrix_cols,
                tensor_dim,
            } => {
                assert_eq!((mode, matrix_cols, tensor_dim), (1, 4, 3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn distinct_mode_products_commute() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = random_tensor(&mut rng, &[3, 4, 2]);
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 4, 4);
            let ab = t.mode_product(&a, 1).unwrap().mode_product(&b, 2).unwrap();
            let ba = t.mode_product(&b, 2).unwrap().mode_product(&a, 1).unwrap();
            for (x, y) in ab.data().iter().zip(ba.data()) {
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn same_mode_products_compose_as_matrix_product() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..20 {
            let t = random_tensor(&mut rng, &[3, 4, 2]);
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            let composed = t.mode_product(&a.matmul(&b).unwrap(), 1).unwrap();
            let stepwise = t.mode_product(&b, 1).unwrap().mode_product(&a, 1).unwrap();
            for (x, y) in composed.data().iter().zip(stepwise.data()) {
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn vectorized_mode_products_match_kronecker_oracle() {
        // vec(t x_1 A1 x_2 A2 x_3 A3) = (A3 (x) A2 (x) A1) vec(t)
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let t = random_tensor(&mut rng, &[2, 2, 2]);
            let a1 = random_matrix(&mut rng, 2, 2);
            let a2 = random_matrix(&mut rng, 2, 2);
            let a3 = random_matrix(&mut rng, 2, 2);
            let left = t
                .mode_product(&a1, 1)
                .unwrap()
                .mode_product(&a2, 2)
                .unwrap()
                .mode_product(&a3, 3)
                .unwrap()
                .vectorize();
            let big = kron(&a3, &kron(&a2, &a1));
            let v = t.vectorize();
            for (row, &want) in left.iter().enumerate().map(|(r, w)| (r, w)) {
                let got: f64 = (0..8).map(|c| big.get(row, c) * v[c]).sum();
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn frobenius_norm_squared_basics() {
        assert_eq!(DenseTensor::zeros(vec![3, 2]).frobenius_norm_sq(), 0.0);
        let t = DenseTensor::new(vec![2, 2], vec![1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(t.frobenius_norm_sq(), 30.0);
    }

    #[test]
    fn frobenius_equals_vectorized_dot_product() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let t = random_tensor(&mut rng, &[3, 4, 2]);
        let v = t.vectorize();
        let dot: f64 = v.iter().map(|x| x * x).sum();
        assert!((t.frobenius_norm_sq() - dot).abs() <= 1e-12 * dot);
    }

    #[test]
    fn vectorize_follows_mode_1_fastest_layout() {
        // [[1,2],[3,4]] with rows indexing mode 1: t[i][j], flat (1,3,2,4).
        let t = DenseTensor::from_fn(vec![2, 2], |idx| {
            [[1.0, 2.0], [3.0, 4.0]][idx[0]][idx[1]]
        });
        assert_eq!(t.vectorize(), vec![1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn vectorize_devectorize_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let t = random_tensor(&mut rng, &[3, 4, 2]);
        let back = DenseTensor::devectorize(t.vectorize(), t.dims().to_vec()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rank_1_vectorize_is_identity() {
        let t = DenseTensor::new(vec![4], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.vectorize(), t.data());
    }

    #[test]
    fn subtract_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let a = random_tensor(&mut rng, &[2, 3]);
        let zero = DenseTensor::zeros(vec![2, 3]);
        assert_eq!(a.subtract(&a).unwrap(), DenseTensor::zeros(vec![2, 3]));
        assert_eq!(a.subtract(&zero).unwrap(), a);

        let x = DenseTensor::from_fn(vec![2, 2], |i| [[1.0, 2.0], [3.0, 4.0]][i[0]][i[1]]);
        let y = DenseTensor::from_fn(vec![2, 2], |i| [[0.0, 1.0], [1.0, 0.0]][i[0]][i[1]]);
        let want = DenseTensor::from_fn(vec![2, 2], |i| [[1.0, 1.0], [2.0, 4.0]][i[0]][i[1]]);
        assert_eq!(x.subtract(&y).unwrap(), want);

        let bad = DenseTensor::zeros(vec![3, 2]);
        assert!(matches!(a.subtract(&bad), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn slice_then_stack_reproduces_tensor() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let t = random_tensor(&mut rng, &[3, 4, 2]);
        for mode in 1..=3 {
            let parts: Vec<_> = (0..t.dims()[mode - 1])
                .map(|i| t.slice(mode, i).unwrap())
                .collect();
            let rebuilt = DenseTensor::stack(&parts, mode).unwrap();
            assert_eq!(rebuilt, t, "partition along mode {mode}");
        }
    }

    #[test]
    fn slice_of_flat_positions_keeps_layout_order() {
        let t = DenseTensor::new(vec![2, 2, 2], (0..8).map(|v| v as f64).collect()).unwrap();
        let s = t.slice(3, 0).unwrap();
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.data(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn slice_of_rank_1_is_scalar() {
        let t = DenseTensor::new(vec![3], vec![5.0, 6.0, 7.0]).unwrap();
        let s = t.slice(1, 1).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.get(&[]).unwrap(), 6.0);
    }

    #[test]
    fn slice_index_out_of_range() {
        let t = DenseTensor::zeros(vec![2, 2]);
        assert!(matches!(
            t.slice(1, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        assert!(matches!(
            t.slice(3, 0),
            Err(Error::ModeOutOfRange { mode: 3, rank: 2 })
        ));
    }

    #[test]
    fn set_get_round_trip_is_exact() {
        let mut t = DenseTensor::zeros(vec![3, 4, 2]);
        t.set(&[2, 1, 1], 0.123456789).unwrap();
        assert_eq!(t.get(&[2, 1, 1]).unwrap(), 0.123456789);
        // layout consistency: flat position of (2,1,1) is 2 + 3*(1 + 4*1)
        assert_eq!(t.data()[2 + 3 * (1 + 4)], 0.123456789);
    }

    #[test]
    fn new_rejects_bad_lengths_and_zero_dims() {
        assert!(DenseTensor::new(vec![2, 2], vec![0.0; 3]).is_err());
        assert!(DenseTensor::new(vec![2, 0], vec![]).is_err());
    }
}
