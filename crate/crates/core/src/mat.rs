//! Dense matrices over `Rat` with deterministic exact elimination.
//!
//! Pivoting always selects the first nonzero entry in column order, never by
//! magnitude, so every echelon form, kernel basis and solution vector is
//! canonical: the same input yields bit-identical output on every platform.

use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::Error;
use crate::rat::{rat_int, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Mat, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("ragged matrix rows"));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Rat>]) -> Result<Mat, Error> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::input("ragged matrix columns"));
        }
        let mut m = Mat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn neg(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn scale(&self, s: &Rat) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = &out[(i, j)] + &(a * b);
                    out[(i, j)] = cur;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// k-th power by repeated squaring; the k = 0 power of any square matrix
    /// is the identity. Squaring short-circuits once a power vanishes, so
    /// nilpotent inputs stay cheap.
    pub fn pow(&self, k: usize) -> Result<Mat, Error> {
        if !self.is_square() {
            return Err(Error::input("matrix power of a non-square matrix"));
        }
        let mut result = Mat::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if base.is_zero() {
                return Ok(Mat::zeros(self.rows, self.rows));
            }
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// Reduced row echelon form. Pivot search is restricted to the first
    /// `pivot_limit` columns (pass `cols` for a plain RREF); columns past the
    /// limit are carried along as right-hand sides. Returns the reduced
    /// matrix and the pivot columns in increasing order.
    fn rref_limited(&self, pivot_limit: usize) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..pivot_limit.min(self.cols) {
            let Some(pivot_row) = (next_row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(next_row, pivot_row);
            let inv = m[(next_row, col)].recip();
            for j in col..m.cols {
                if !m[(next_row, j)].is_zero() {
                    let v = &m[(next_row, j)] * &inv;
                    m[(next_row, j)] = v;
                }
            }
            for r in 0..m.rows {
                if r == next_row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for j in col..m.cols {
                    if !m[(next_row, j)].is_zero() {
                        let v = &m[(r, j)] - &(&factor * &m[(next_row, j)]);
                        m[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            next_row += 1;
            if next_row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rref(&self) -> (Mat, Vec<usize>) {
        self.rref_limited(self.cols)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the kernel: reduced-echelon construction, one
    /// vector per free column in increasing column order, with a 1 in the
    /// free coordinate.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Rat::zero(); self.cols];
            vec[free] = Rat::one();
            for (row, &col) in pivots.iter().enumerate() {
                vec[col] = -r[(row, free)].clone();
            }
            basis.push(vec);
        }
        basis
    }

    /// One solution of `self * x = b` or `None` when inconsistent.
    /// Deterministic: free variables are set to zero.
    pub fn solve(&self, b: &[Rat]) -> Result<Option<Vec<Rat>>, Error> {
        if b.len() != self.rows {
            return Err(Error::input(format!(
                "solve: right-hand side has {} entries, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let rhs = Mat::from_cols(&[b.to_vec()])?;
        Ok(self.solve_mat(&rhs)?.map(|m| m.col(0)))
    }

    /// Columnwise simultaneous solve; `None` if any column is inconsistent.
    pub fn solve_mat(&self, rhs: &Mat) -> Result<Option<Mat>, Error> {
        if rhs.rows() != self.rows {
            return Err(Error::input(format!(
                "solve: right-hand side has {} rows, matrix has {} rows",
                rhs.rows(),
                self.rows
            )));
        }
        let mut aug = Mat::zeros(self.rows, self.cols + rhs.cols());
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols() {
                aug[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref_limited(self.cols);
        // Inconsistent iff some row is zero on the coefficient side but not on
        // the right-hand side.
        for i in pivots.len()..self.rows {
            for j in 0..rhs.cols() {
                if !r[(i, self.cols + j)].is_zero() {
                    return Ok(None);
                }
            }
        }
        let mut x = Mat::zeros(self.cols, rhs.cols());
        for (row, &col) in pivots.iter().enumerate() {
            for j in 0..rhs.cols() {
                x[(col, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Option<Mat>, Error> {
        if !self.is_square() {
            return Err(Error::input("inverse of a non-square matrix"));
        }
        let sol = self.solve_mat(&Mat::identity(self.rows))?;
        match sol {
            Some(inv) if self.rank() == self.rows => Ok(Some(inv)),
            _ => Ok(None),
        }
    }

    /// Canonical basis of the column space: reduced-echelon basis of the row
    /// space of the transpose.
    pub fn column_space_basis(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.transpose().rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    /// Monic characteristic polynomial, coefficients in ascending degree
    /// (index i holds the coefficient of x^i). Faddeev-LeVerrier; exact.
    pub fn charpoly(&self) -> Result<Vec<Rat>, Error> {
        if !self.is_square() {
            return Err(Error::input(
                "characteristic polynomial of a non-square matrix",
            ));
        }
        let n = self.rows;
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let mut m = Mat::zeros(n, n);
        for k in 1..=n {
            // M_k = A*M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A*M_k)/k
            m = self.mul(&m);
            for i in 0..n {
                let v = &m[(i, i)] + &coeffs[n - k + 1];
                m[(i, i)] = v;
            }
            let am = self.mul(&m);
            let mut trace = Rat::zero();
            for i in 0..n {
                trace += am[(i, i)].clone();
            }
            coeffs[n - k] = -trace / rat_int(k as i64);
        }
        Ok(coeffs)
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(ro + i, co + j)] = b[(i, j)].clone();
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }

    /// Copy without row i and column i.
    pub fn delete_row_col(&self, idx: usize) -> Mat {
        assert!(self.is_square() && idx < self.rows);
        Mat::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let si = if i < idx { i } else { i + 1 };
            let sj = if j < idx { j } else { j + 1 };
            self[(si, sj)].clone()
        })
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Rat;

    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rat::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Incremental span membership tracker (echelon rows, forward reduction
/// only). Used to pick deterministic coset representatives.
pub(crate) struct SpanTracker {
    dim: usize,
    rows: Vec<(usize, Vec<Rat>)>, // (pivot index, echelon row), sorted by pivot
}

impl SpanTracker {
    pub fn new(dim: usize) -> SpanTracker {
        SpanTracker {
            dim,
            rows: Vec::new(),
        }
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts the vector if it enlarges the span; returns whether it did.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let factor = v[*pivot].clone();
                for j in *pivot..self.dim {
                    if !row[j].is_zero() {
                        let nv = &v[j] - &(&factor * &row[j]);
                        v[j] = nv;
                    }
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pos = self.rows.partition_point(|(p, _)| *p < pivot);
        self.rows.insert(pos, (pivot, v));
        true
    }

    #[cfg(test)]
    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut probe = SpanTracker {
            dim: self.dim,
            rows: self.rows.clone(),
        };
        !probe.insert(v)
    }
}

/// Convenience constructor for integer matrices, mainly used in tests.
#[macro_export]
macro_rules! mat {
    ($([$($x:expr),* $(,)?]),* $(,)?) => {
        $crate::mat::Mat::from_rows(vec![
            $(vec![$($crate::rat::rat_int($x)),*]),*
        ]).unwrap()
    };
}

/// Integer vector literal.
#[macro_export]
macro_rules! vec_rat {
    ($($x:expr),* $(,)?) => {{
        #[allow(clippy::useless_vec)]
        let v = vec![$($crate::rat::rat_int($x)),*];
        v
    }};
}
