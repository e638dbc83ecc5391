//! Exact integer and rational linear algebra.
//!
//! Integer matrices use arbitrary precision entries. Lattice bases are
//! returned in row Hermite normal form so that outputs are canonical.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_int(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

pub fn to_rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

pub fn to_int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn int_to_i64(v: &Int) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::ResourceLimit(format!("integer {v} exceeds 64 bits")))
}

pub fn ints_to_i64(v: &[Int]) -> Result<Vec<i64>> {
    v.iter().map(int_to_i64).collect()
}

/// Returns the integer value of `q` if it is integral.
pub fn rat_to_int(q: &Rat) -> Option<Int> {
    if q.is_integer() {
        Some(q.to_integer())
    } else {
        None
    }
}

/// Formats a rational as `num/den`.
pub fn fmt_rat(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(rows: &[Vec<Int>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let big: Vec<Vec<Int>> = rows.iter().map(|r| to_int_vec(r)).collect();
        Self::from_rows(&big, cols)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Int>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix column");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Int]) -> Result<Vec<Int>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant of a square matrix (fraction-free elimination).
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        determinant(&self.row_vectors())
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row(&mut self, dst: usize, src: usize, factor: &Int) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + factor * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col(&mut self, dst: usize, src: usize, factor: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + factor * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                format!("[{}]", r.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Determinant of a square matrix given by rows (Bareiss).
pub fn determinant(rows: &[Vec<Int>]) -> Int {
    let n = rows.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Smith normal form `U·M·V = S`.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Nonzero diagonal entries of `S`.
    pub fn invariant_factors(&self) -> Vec<Int> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with smallest-absolute-value pivoting (ties broken by
/// row, then column), which makes the output a function of the input.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => x.abs() < a.get(bi, bj).abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_snf(u, a, v);
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = a.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a.get(i, t) / &p;
                if !q.is_zero() {
                    a.add_row(i, t, &-&q);
                    u.add_row(i, t, &-&q);
                }
                dirty |= !a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = a.get(t, j) / &p;
                if !q.is_zero() {
                    a.add_col(j, t, &-&q);
                    v.add_col(j, t, &-&q);
                }
                dirty |= !a.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    a.add_row(t, i, &Int::one());
                    u.add_row(t, i, &Int::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_snf(u, a, v)
}

fn finish_snf(mut u: IntMatrix, mut s: IntMatrix, v: IntMatrix) -> SnfDecomposition {
    for t in 0..s.rows().min(s.cols()) {
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfDecomposition { u, s, v }
}

/// Row Hermite normal form of the lattice spanned by `vectors`: echelon
/// rows with positive pivots and entries above each pivot reduced into
/// `[0, pivot)`. Zero rows are dropped.
pub fn hermite_basis(vectors: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let Some(n) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut pending: Vec<Vec<Int>> =
        vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut basis: Vec<Vec<Int>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for c in 0..n {
        loop {
            let mut idx: Vec<usize> =
                (0..pending.len()).filter(|&i| !pending[i][c].is_zero()).collect();
            if idx.len() <= 1 {
                break;
            }
            idx.sort_by(|&x, &y| pending[x][c].abs().cmp(&pending[y][c].abs()).then(x.cmp(&y)));
            let piv = idx[0];
            let pv = pending[piv].clone();
            for &i in &idx[1..] {
                let q = &pending[i][c] / &pv[c];
                for j in 0..n {
                    let val = &pending[i][j] - &q * &pv[j];
                    pending[i][j] = val;
                }
            }
        }
        if let Some(i) = (0..pending.len()).find(|&i| !pending[i][c].is_zero()) {
            let mut row = pending.remove(i);
            if row[c].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            basis.push(row);
            pivots.push(c);
        }
        pending.retain(|v| v.iter().any(|x| !x.is_zero()));
    }
    for k in 0..basis.len() {
        let c = pivots[k];
        let p = basis[k][c].clone();
        for j in 0..k {
            let q = basis[j][c].div_floor(&p);
            if !q.is_zero() {
                let row_k = basis[k].clone();
                for (x, y) in basis[j].iter_mut().zip(&row_k) {
                    *x -= &q * y;
                }
            }
        }
    }
    basis
}

/// Pivot columns of a Hermite basis.
pub fn hermite_pivots(basis: &[Vec<Int>]) -> Vec<usize> {
    basis
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("zero row in Hermite basis"))
        .collect()
}

/// Integer coordinates of `x` in a Hermite basis, if `x` lies in its lattice.
pub fn hermite_coordinates(basis: &[Vec<Int>], x: &[Int]) -> Option<Vec<Int>> {
    let pivots = hermite_pivots(basis);
    let mut rest = x.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for (row, &c) in basis.iter().zip(&pivots) {
        let (q, r) = rest[c].div_rem(&row[c]);
        if !r.is_zero() {
            return None;
        }
        for j in 0..rest.len() {
            let val = &rest[j] - &q * &row[j];
            rest[j] = val;
        }
        coords.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

/// Canonical representative of `x` modulo the lattice of a Hermite basis.
pub fn hermite_reduce(basis: &[Vec<Int>], x: &[Int]) -> Vec<Int> {
    let pivots = hermite_pivots(basis);
    let mut out = x.to_vec();
    for (row, &c) in basis.iter().zip(&pivots) {
        let q = out[c].div_floor(&row[c]);
        if !q.is_zero() {
            for j in 0..out.len() {
                let val = &out[j] - &q * &row[j];
                out[j] = val;
            }
        }
    }
    out
}

/// ℤ-basis of `{x : M x = 0}` in Hermite normal form.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let raw: Vec<Vec<Int>> = (rank..m.cols()).map(|j| snf.v.column(j)).collect();
    hermite_basis(&raw)
}

/// ℤ-basis of `span_ℚ(vectors) ∩ ℤᵏ`.
pub fn saturate(vectors: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let Some(k) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    let orth = kernel_basis(&IntMatrix::from_rows(vectors, k));
    if orth.is_empty() {
        return hermite_basis(&IntMatrix::identity(k).row_vectors());
    }
    kernel_basis(&IntMatrix::from_rows(&orth, k))
}

/// Splitting data of a surjective lattice map `𝔞: ℤⁿ → N`.
///
/// `inclusion` has the kernel basis as columns; `section` and `lift`
/// satisfy `s·t = id`, `a·g = id`, `a·t = 0`, `s·g = 0`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub inclusion: IntMatrix,
    pub section: IntMatrix,
    pub lift: IntMatrix,
}

pub fn splitting_maps(a: &IntMatrix) -> Result<Splitting> {
    let (d, n) = (a.rows(), a.cols());
    let snf = smith_normal_form(a);
    let diag: Vec<Int> = (0..d)
        .map(|i| if i < n { snf.s.get(i, i).clone() } else { Int::zero() })
        .collect();
    if diag.iter().any(|x| !x.is_one()) {
        let factors = diag.iter().filter(|x| !x.is_one()).map(|x| x.to_string()).collect();
        return Err(Error::NotSurjective { factors });
    }
    let kernel = hermite_basis(&(d..n).map(|j| snf.v.column(j)).collect::<Vec<_>>());
    let v1 = IntMatrix::from_columns(&(0..d).map(|j| snf.v.column(j)).collect::<Vec<_>>(), n);
    let raw_lift = v1.mul(&snf.u)?;
    let lift_cols: Vec<Vec<Int>> = (0..d)
        .map(|j| {
            let c = raw_lift.column(j);
            if kernel.is_empty() {
                c
            } else {
                hermite_reduce(&kernel, &c)
            }
        })
        .collect();
    let lift = IntMatrix::from_columns(&lift_cols, n);
    let mut section = IntMatrix::zeros(kernel.len(), n);
    for i in 0..n {
        let mut x = vec![Int::zero(); n];
        x[i] = Int::one();
        let ai = a.column(i);
        let g_ai = lift.mul_vec(&ai)?;
        for k in 0..n {
            x[k] = &x[k] - &g_ai[k];
        }
        let c = hermite_coordinates(&kernel, &x)
            .ok_or_else(|| Error::Invariant("section does not land in the kernel".into()))?;
        for (r, val) in c.into_iter().enumerate() {
            section.set(r, i, val);
        }
    }
    Ok(Splitting { inclusion: IntMatrix::from_columns(&kernel, n), section, lift })
}

/// `|det|` of `d` vectors in `ℤᵈ`.
pub fn normalized_simplex_volume(vectors: &[Vec<Int>]) -> Result<Int> {
    let d = vectors.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    Ok(determinant(vectors).abs())
}

// ---------------------------------------------------------------------------
// Rational matrices (row-major `Vec<Vec<Rat>>`).

pub type RatMatrix = Vec<Vec<Rat>>;

pub fn rat_matrix_from_ints(rows: &[Vec<Int>]) -> RatMatrix {
    rows.iter().map(|r| r.iter().map(rat_from_int).collect()).collect()
}

pub fn rat_transpose(a: &RatMatrix, cols: usize) -> RatMatrix {
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn rat_mat_vec(a: &RatMatrix, v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|r| r.iter().zip(v).fold(Rat::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn rat_mat_mul(a: &RatMatrix, b: &RatMatrix, b_cols: usize) -> RatMatrix {
    a.iter()
        .map(|r| {
            (0..b_cols)
                .map(|j| r.iter().zip(b).fold(Rat::zero(), |acc, (x, row)| acc + x * &row[j]))
                .collect()
        })
        .collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(a: &RatMatrix, cols: usize) -> (RatMatrix, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row).take(cols) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (m, pivots)
}

pub fn rat_rank(a: &RatMatrix, cols: usize) -> usize {
    rref(a, cols).1.len()
}

/// A particular solution of `A x = b` (free variables set to zero).
pub fn rat_solve(a: &RatMatrix, cols: usize, b: &[Rat]) -> Option<Vec<Rat>> {
    let aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let (m, pivots) = rref(&aug, cols + 1);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// ℚ-basis of `{x : A x = 0}`.
pub fn rat_nullspace(a: &RatMatrix, cols: usize) -> Vec<Vec<Rat>> {
    let (m, pivots) = rref(a, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rat::zero(); cols];
            x[free] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                x[c] = -m[r][free].clone();
            }
            x
        })
        .collect()
}

pub fn rat_inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let aug: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let (m, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Scales a rational vector to the primitive integer vector on its ray.
pub fn primitive_integer(v: &[Rat]) -> Vec<Int> {
    let lcm = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Int> = v.iter().map(|x| (x * rat_from_int(&lcm)).to_integer()).collect();
    let g = ints.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn gcd_of(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check_snf(a: &IntMatrix) -> SnfDecomposition {
        let snf = smith_normal_form(a);
        let prod = snf.u.mul(a).unwrap().mul(&snf.v).unwrap();
        assert_eq!(prod, snf.s);
        assert!(snf.u.is_unimodular() && snf.v.is_unimodular());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    assert!(snf.s.get(i, j).is_zero());
                }
            }
        }
        let f = snf.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        snf
    }

    #[test]
    fn snf_diag_2_3() {
        let snf = check_snf(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(snf.invariant_factors(), vec![int(1), int(6)]);
    }

    #[test]
    fn snf_identity() {
        let snf = check_snf(&IntMatrix::identity(3));
        assert_eq!(snf.u, IntMatrix::identity(3));
        assert_eq!(snf.v, IntMatrix::identity(3));
        assert_eq!(snf.s, IntMatrix::identity(3));
    }

    #[test]
    fn snf_weighted_projective_rays() {
        let snf = check_snf(&m(&[&[1, 0, -1], &[0, 1, -2]]));
        assert_eq!(snf.invariant_factors(), vec![int(1), int(1)]);
        assert!(snf.s.get(0, 2).is_zero() && snf.s.get(1, 2).is_zero());
    }

    #[test]
    fn kernel_of_line() {
        assert_eq!(kernel_basis(&m(&[&[1, -1]])), vec![to_int_vec(&[1, 1])]);
    }

    #[test]
    fn kernel_of_extended_matrix() {
        let k = kernel_basis(&m(&[&[1, 0, -1, 0], &[0, 1, -2, -1]]));
        assert_eq!(k, vec![to_int_vec(&[1, 0, 1, -2]), to_int_vec(&[0, 1, 0, 1])]);
    }

    #[test]
    fn kernel_of_invertible_is_empty() {
        assert!(kernel_basis(&m(&[&[2, 1], &[1, 1]])).is_empty());
    }

    fn check_splitting(a: &IntMatrix) -> Splitting {
        let sp = splitting_maps(a).unwrap();
        let n = a.cols();
        let k = sp.inclusion.cols();
        assert_eq!(sp.section.mul(&sp.inclusion).unwrap(), IntMatrix::identity(k));
        assert_eq!(a.mul(&sp.lift).unwrap(), IntMatrix::identity(a.rows()));
        assert!(a.mul(&sp.inclusion).unwrap().is_zero());
        assert!(sp.section.mul(&sp.lift).unwrap().is_zero());
        assert_eq!(sp.inclusion.rows(), n);
        sp
    }

    #[test]
    fn splitting_projective_line() {
        let sp = check_splitting(&m(&[&[1, -1]]));
        assert_eq!(sp.inclusion.column(0), to_int_vec(&[1, 1]));
    }

    #[test]
    fn splitting_identity() {
        let sp = check_splitting(&IntMatrix::identity(2));
        assert_eq!(sp.section.rows(), 0);
        assert_eq!(sp.lift, IntMatrix::identity(2));
    }

    #[test]
    fn splitting_extended() {
        check_splitting(&m(&[&[1, 0, -1, 0], &[0, 1, -2, -1]]));
    }

    #[test]
    fn splitting_rejects_index_two() {
        let err = splitting_maps(&m(&[&[2, 0], &[0, 1]])).unwrap_err();
        assert_eq!(err, Error::NotSurjective { factors: vec!["2".into()] });
    }

    #[test]
    fn saturate_examples() {
        let s = saturate(&[to_int_vec(&[2, 0]), to_int_vec(&[0, 2])]);
        assert_eq!(s, vec![to_int_vec(&[1, 0]), to_int_vec(&[0, 1])]);
        assert_eq!(saturate(&[to_int_vec(&[1, 1])]), vec![to_int_vec(&[1, 1])]);
        assert_eq!(saturate(&[to_int_vec(&[2, 4, 6])]), vec![to_int_vec(&[1, 2, 3])]);
    }

    #[test]
    fn volumes() {
        let v = |a: &[&[i64]]| {
            normalized_simplex_volume(&a.iter().map(|x| to_int_vec(x)).collect::<Vec<_>>())
                .unwrap()
        };
        assert_eq!(v(&[&[1, 0], &[0, 1]]), int(1));
        assert_eq!(v(&[&[1, 0], &[-1, -2]]), int(2));
        assert_eq!(v(&[&[1]]) + v(&[&[-1]]), int(2));
    }

    #[test]
    fn rational_solve_and_inverse() {
        let a = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]];
        let x = rat_solve(&a, 2, &[rat(5, 1), rat(6, 1)]).unwrap();
        assert_eq!(rat_mat_vec(&a, &x), vec![rat(5, 1), rat(6, 1)]);
        let inv = rat_inverse(&a).unwrap();
        let id = rat_mat_mul(&a, &inv, 2);
        assert_eq!(id, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]);
    }

    #[test]
    fn hermite_coordinates_roundtrip() {
        let b = hermite_basis(&[to_int_vec(&[2, 1]), to_int_vec(&[0, 3])]);
        let c = hermite_coordinates(&b, &to_int_vec(&[4, 5])).unwrap();
        let back: Vec<Int> =
            (0..2).map(|j| b.iter().zip(&c).map(|(r, x)| &r[j] * x).sum()).collect();
        assert_eq!(back, to_int_vec(&[4, 5]));
        assert!(hermite_coordinates(&b, &to_int_vec(&[1, 0])).is_none());
    }
}
