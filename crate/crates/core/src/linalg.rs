//! Small dense matrices over `F_{q^2}`, stored inline.

use std::fmt;

use arrayvec::ArrayVec;

use crate::field::{Elem, FieldCtx};

/// Maximum number of homogeneous coordinates (ambient dimension `n ≤ 7`).
pub const MAX_COORDS: usize = 8;

/// Homogeneous coordinate vector.
pub type Coords = ArrayVec<Elem, MAX_COORDS>;

/// A `rows × cols` matrix with `rows, cols ≤ MAX_COORDS`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: u8,
    cols: u8,
    data: [[Elem; MAX_COORDS]; MAX_COORDS],
}

/// Result of a row reduction.
#[derive(Clone, Copy, Debug)]
pub struct Rref {
    pub matrix: Mat,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: [u8; MAX_COORDS],
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_COORDS && cols <= MAX_COORDS, "matrix too large");
        Mat { rows: rows as u8, cols: cols as u8, data: [[Elem::ZERO; MAX_COORDS]; MAX_COORDS] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Elem::ONE;
        }
        m
    }

    pub fn from_rows<R: AsRef<[Elem]>>(cols: usize, rows: &[R]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged matrix rows");
            m.data[i][..cols].copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows as usize
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i][j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i][..self.cols()]
    }

    pub fn row_coords(&self, i: usize) -> Coords {
        self.row(i).iter().copied().collect()
    }

    pub fn push_row(&mut self, row: &[Elem]) {
        assert_eq!(row.len(), self.cols());
        assert!(self.rows() < MAX_COORDS, "matrix row capacity exceeded");
        let r = self.rows();
        self.data[r][..row.len()].copy_from_slice(row);
        self.rows += 1;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    pub fn is_zero(&self) -> bool {
        (0..self.rows()).all(|i| self.row(i).iter().all(|e| e.is_zero()))
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols(), self.rows());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                t.data[j][i] = self.data[i][j];
            }
        }
        t
    }

    /// Entrywise Frobenius `A^{(q)}`.
    pub fn frob(&self, f: &FieldCtx) -> Mat {
        let mut m = *self;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                m.data[i][j] = f.frob(self.data[i][j]);
            }
        }
        m
    }

    /// `A^{(q)T}`.
    pub fn conj_transpose(&self, f: &FieldCtx) -> Mat {
        self.frob(f).transpose()
    }

    pub fn mul(&self, f: &FieldCtx, other: &Mat) -> Mat {
        assert_eq!(self.cols(), other.rows(), "shape mismatch");
        let mut out = Mat::zeros(self.rows(), other.cols());
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                let a = self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols() {
                    out.data[i][j] = f.add(out.data[i][j], f.mul(a, other.data[k][j]));
                }
            }
        }
        out
    }

    /// `A v` for a column vector `v`.
    pub fn mul_vec(&self, f: &FieldCtx, v: &[Elem]) -> Coords {
        assert_eq!(self.cols(), v.len());
        (0..self.rows()).map(|i| dot(f, self.row(i), v)).collect()
    }

    /// Reduced row-echelon form (pivot entries 1, zero rows last).
    pub fn rref(&self, f: &FieldCtx) -> Rref {
        let mut m = *self;
        let mut pivots = [0u8; MAX_COORDS];
        let mut rank = 0;
        for col in 0..m.cols() {
            if rank == m.rows() {
                break;
            }
            let Some(p) = (rank..m.rows()).find(|&r| !m.data[r][col].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let inv = f.inv(m.data[rank][col]);
            for j in col..m.cols() {
                m.data[rank][j] = f.mul(m.data[rank][j], inv);
            }
            for r in 0..m.rows() {
                if r == rank {
                    continue;
                }
                let factor = m.data[r][col];
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols() {
                    let t = f.mul(factor, m.data[rank][j]);
                    m.data[r][j] = f.sub(m.data[r][j], t);
                }
            }
            pivots[rank] = col as u8;
            rank += 1;
        }
        Rref { matrix: m, rank, pivots }
    }

    pub fn rank(&self, f: &FieldCtx) -> usize {
        self.rref(f).rank
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self, f: &FieldCtx) -> Option<Mat> {
        let n = self.rows();
        assert_eq!(n, self.cols(), "inverse of a non-square matrix");
        assert!(2 * n <= 2 * MAX_COORDS);
        // Gauss-Jordan on [A | I] done column block by column block.
        let mut a = *self;
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a.data[r][col].is_zero())?;
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let s = f.inv(a.data[col][col]);
            for j in 0..n {
                a.data[col][j] = f.mul(a.data[col][j], s);
                inv.data[col][j] = f.mul(inv.data[col][j], s);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.data[r][col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = f.mul(factor, a.data[col][j]);
                    a.data[r][j] = f.sub(a.data[r][j], t);
                    let t = f.mul(factor, inv.data[col][j]);
                    inv.data[r][j] = f.sub(inv.data[r][j], t);
                }
            }
        }
        Some(inv)
    }

    /// Basis (as rows, in RREF) of `{x : A x = 0}`.
    pub fn kernel(&self, f: &FieldCtx) -> Mat {
        let Rref { matrix, rank, pivots } = self.rref(f);
        let cols = self.cols();
        let mut is_pivot = [false; MAX_COORDS];
        for &p in &pivots[..rank] {
            is_pivot[p as usize] = true;
        }
        let mut basis = Mat::zeros(0, cols);
        for free in (0..cols).filter(|&c| !is_pivot[c]) {
            let mut v = [Elem::ZERO; MAX_COORDS];
            v[free] = Elem::ONE;
            for (r, &p) in pivots[..rank].iter().enumerate() {
                v[p as usize] = f.neg(matrix.data[r][free]);
            }
            basis.push_row(&v[..cols]);
        }
        let red = basis.rref(f);
        red.matrix
    }
}

impl Rref {
    pub fn pivot_cols(&self) -> &[u8] {
        &self.pivots[..self.rank]
    }

    /// The nonzero rows only.
    pub fn basis(&self) -> Mat {
        let mut m = self.matrix;
        m.rows = self.rank as u8;
        m
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u8>> = (0..self.rows()).map(|i| self.row(i).iter().map(|e| e.0).collect()).collect();
        write!(fm, "Mat{}x{}{:?}", self.rows(), self.cols(), rows)
    }
}

/// `sum a_i b_i`.
#[inline]
pub fn dot(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}
