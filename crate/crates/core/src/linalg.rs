//! Exact rational and integer linear algebra.
//!
//! Everything here is arbitrary precision: `Int` is a big integer and
//! `Rational` a reduced big rational with positive denominator. There is no
//! floating point in this module; downstream identities are checked for
//! exact equality and depend on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rational = BigRational;

/// Shorthand for small integer literals.
pub fn int(n: i64) -> Int {
    Int::from(n)
}

/// Shorthand for small rational literals; panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(Int::from(p), Int::from(q))
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    assert_eq!(a.len(), b.len(), "dot product dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greatest common divisor of a slice, nonnegative; 0 for an all-zero slice.
pub fn vec_gcd(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

/// A vector with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatVec {
    entries: Vec<Rational>,
}

impl RatVec {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVec { entries }
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVec {
            entries: entries.iter().map(|&n| rat(n, 1)).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        RatVec {
            entries: vec![Rational::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim());
        RatVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim());
        RatVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> RatVec {
        RatVec::new(self.entries.iter().map(|a| a * c).collect())
    }

    /// Pairing with an integer covector.
    pub fn dot_int(&self, w: &[Int]) -> Rational {
        assert_eq!(self.dim(), w.len());
        self.entries
            .iter()
            .zip(w)
            .map(|(a, n)| a * Rational::from_integer(n.clone()))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|a| a.is_zero())
    }
}

impl std::ops::Index<usize> for RatVec {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl std::fmt::Display for RatVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

/// A dense integer matrix, row-major. Zero-column matrices are allowed so
/// that trivial kernels have a representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        IntMat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&n| Int::from(n)));
        }
        IntMat {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Builds a matrix whose columns are the given integer vectors.
    pub fn from_cols(cols: &[Vec<Int>], dim: usize) -> Self {
        let m = cols.len();
        let mut data = vec![Int::zero(); dim * m];
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column dimension mismatch");
            for i in 0..dim {
                data[i * m + j] = col[i].clone();
            }
        }
        IntMat {
            rows: dim,
            cols: m,
            data,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut out = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn mul_mat(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Int::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec_int(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot_int(self.row(i), v)).collect()
    }

    pub fn mul_vec_rat(&self, v: &RatVec) -> RatVec {
        assert_eq!(self.cols, v.dim());
        RatVec::new((0..self.rows).map(|i| v.dot_int(self.row(i))).collect())
    }

    /// Submatrix given by row indices (all columns).
    pub fn select_rows(&self, idx: &[usize]) -> IntMat {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        IntMat::new(idx.len(), self.cols, data)
    }

    /// Submatrix given by column indices (all rows).
    pub fn select_cols(&self, idx: &[usize]) -> IntMat {
        let mut out = IntMat::zero(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|n| Rational::from_integer(n.clone()))
                    .collect()
            })
            .collect()
    }
}

impl std::fmt::Display for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// All k-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        if k == 0 {
            return out;
        }
        // advance to the next subset
        let mut i = k - 1;
        while idx[i] == i + n - k {
            if i == 0 {
                return out;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Rational Gaussian elimination
// ---------------------------------------------------------------------------

/// Reduced row echelon form in place; returns the pivot columns.
fn row_reduce(mat: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].clone();
        for j in c..cols {
            mat[r][j] = &mat[r][j] / &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in c..cols {
                    let t = &f * &mat[r][j];
                    mat[i][j] = &mat[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a rational matrix.
pub fn rat_rank(mat: &[Vec<Rational>]) -> usize {
    let mut work = mat.to_vec();
    row_reduce(&mut work).len()
}

/// Determinant of a square rational matrix.
pub fn rat_det(mat: &[Vec<Rational>]) -> Rational {
    let n = mat.len();
    let mut work = mat.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !work[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            work.swap(c, p);
            det = -det;
        }
        let pivot = work[c][c].clone();
        det *= &pivot;
        for i in c + 1..n {
            if !work[i][c].is_zero() {
                let f = &work[i][c] / &pivot;
                for j in c..n {
                    let t = &f * &work[c][j];
                    work[i][j] = &work[i][j] - &t;
                }
            }
        }
    }
    det
}

/// Solves `mat * x = rhs` for square `mat`; `None` when singular.
pub fn rat_solve_square(mat: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = mat.len();
    assert_eq!(rhs.len(), n);
    let mut work: Vec<Vec<Rational>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut work);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(work.iter().map(|row| row[n].clone()).collect())
}

// ---------------------------------------------------------------------------
// Integer normal forms
// ---------------------------------------------------------------------------

/// Smith-type diagonalization `U * A * Q = D` with unimodular `U`, `Q`.
/// Only `Q` (the column transform) is tracked; row operations are applied
/// to the work matrix and forgotten.
pub struct SmithForm {
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diag: Vec<Int>,
    pub rank: usize,
    /// Unimodular column transform; its columns from `rank` onward form a
    /// lattice basis of `ker(A) ∩ Z^m`.
    pub col_transform: IntMat,
}

pub fn smith_normal_form(a: &IntMat) -> SmithForm {
    let rows = a.rows();
    let cols = a.cols();
    let mut b = a.clone();
    let mut q = IntMat::identity(cols);
    let kmax = rows.min(cols);
    let mut k = 0;

    fn swap_cols(m: &mut IntMat, c1: usize, c2: usize) {
        for i in 0..m.rows() {
            let t = m.get(i, c1).clone();
            let u = m.get(i, c2).clone();
            m.set(i, c1, u);
            m.set(i, c2, t);
        }
    }

    while k < kmax {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !b.get(i, j).is_zero() {
                    let better = match &pivot {
                        None => true,
                        Some((pi, pj)) => b.get(i, j).abs() < b.get(*pi, *pj).abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        if pi != k {
            for j in 0..cols {
                let t = b.get(k, j).clone();
                let u = b.get(pi, j).clone();
                b.set(k, j, u);
                b.set(pi, j, t);
            }
        }
        if pj != k {
            swap_cols(&mut b, k, pj);
            swap_cols(&mut q, k, pj);
        }

        let mut dirty = false;
        // clear below the pivot with row operations
        for r in k + 1..rows {
            if !b.get(r, k).is_zero() {
                let f = b.get(r, k) / b.get(k, k);
                if !f.is_zero() {
                    for j in k..cols {
                        let t = b.get(r, j) - &f * b.get(k, j);
                        b.set(r, j, t);
                    }
                }
                if !b.get(r, k).is_zero() {
                    dirty = true;
                }
            }
        }
        // clear to the right with column operations, mirrored onto q
        for c in k + 1..cols {
            if !b.get(k, c).is_zero() {
                let f = b.get(k, c) / b.get(k, k);
                if !f.is_zero() {
                    for i in 0..rows {
                        let t = b.get(i, c) - &f * b.get(i, k);
                        b.set(i, c, t);
                    }
                    for i in 0..cols {
                        let t = q.get(i, c) - &f * q.get(i, k);
                        q.set(i, c, t);
                    }
                }
                if !b.get(k, c).is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue; // pivot magnitude strictly decreased; repeat
        }
        // divisibility: fold a non-divisible entry into row k and retry
        let mut fixed = true;
        'scan: for i in k + 1..rows {
            for j in k + 1..cols {
                if !(b.get(i, j) % b.get(k, k)).is_zero() {
                    for c in 0..cols {
                        let t = b.get(k, c) + b.get(i, c);
                        b.set(k, c, t);
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if b.get(k, k).is_negative() {
            for j in 0..cols {
                let t = -b.get(k, j);
                b.set(k, j, t);
            }
        }
        k += 1;
    }

    let diag = (0..k).map(|i| b.get(i, i).clone()).collect();
    SmithForm {
        diag,
        rank: k,
        col_transform: q,
    }
}

/// Rank over the rationals.
pub fn rank(a: &IntMat) -> usize {
    smith_normal_form(a).rank
}

/// A lattice basis of `ker(A) ∩ Z^m`, returned as the columns of an
/// `m × (m - rank A)` matrix. Every integer kernel vector is an integer
/// combination of the columns.
pub fn kernel_lattice_basis(a: &IntMat) -> IntMat {
    let snf = smith_normal_form(a);
    let idx: Vec<usize> = (snf.rank..a.cols()).collect();
    snf.col_transform.select_cols(&idx)
}

/// The index `[Z^d : A(Z^m)]` of the image lattice of an integer matrix of
/// full row rank, i.e. the product of its Smith diagonal entries.
pub fn image_lattice_index(a: &IntMat) -> Result<Int> {
    let snf = smith_normal_form(a);
    if snf.rank != a.rows() {
        return Err(Error::DegenerateWeightSystem {
            rank: snf.rank,
            expected: a.rows(),
        });
    }
    Ok(snf.diag.iter().product())
}

/// Some rational solution of `A x = b`, or `None` when `b` is outside the
/// column span. Free variables are set to zero.
pub fn solve_particular(a: &IntMat, b: &RatVec) -> Option<RatVec> {
    assert_eq!(a.rows(), b.dim(), "rhs dimension mismatch");
    let cols = a.cols();
    let mut work: Vec<Vec<Rational>> = a
        .to_rational_rows()
        .into_iter()
        .zip(b.entries())
        .map(|(mut row, rhs)| {
            row.push(rhs.clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut work);
    // inconsistent iff a pivot landed in the rhs column
    if pivots.last().is_some_and(|&c| c == cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = work[r][cols].clone();
    }
    Some(RatVec::new(x))
}
