//! Exact linear algebra over the jet ring.
//!
//! Elimination only ever divides by units (nonzero constants).  A column whose
//! remaining entries are nonzero but not units is reported instead of guessed.

use crate::ring::RingElem;
use crate::scalar::{Rational, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix entries are not constant rationals")]
    NotConstant,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pivot in column {0} is not a unit of the ring")]
    NotInvertibleOverRing(usize),
    #[error("no solution")]
    NoSolution { kernel: Option<Vec<RingElem>> },
    #[error("Gram matrix of the frame is not invertible over the ring")]
    GramNotInvertible,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<RingElem>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![RingElem::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, RingElem::one());
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<RingElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }
    pub fn from_scalars(rows: &[Vec<Scalar>]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().cloned().map(RingElem::constant).collect()).collect())
    }
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|v| RingElem::int(*v)).collect()).collect())
    }
    /// Columns given as vectors.
    pub fn from_cols(cols: &[Vec<RingElem>]) -> Self {
        let c = cols.len();
        let r = cols.first().map(|x| x.len()).unwrap_or(0);
        let mut m = Mat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
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
    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> Vec<RingElem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<RingElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn map(&self, f: impl Fn(&RingElem) -> RingElem) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
    pub fn conj(&self) -> Mat {
        self.map(|x| x.conj())
    }
    pub fn scale(&self, c: &Scalar) -> Mat {
        self.map(|x| x.scale(c))
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    pub fn is_constant(&self) -> bool {
        self.data.iter().all(|x| x.is_constant())
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut m = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * m.cols + j;
                    m.data[idx] += &(a * b);
                }
            }
        }
        m
    }
    pub fn mul_vec(&self, v: &[RingElem]) -> Vec<RingElem> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut s = RingElem::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s += &(a * x);
                    }
                }
                s
            })
            .collect()
    }
    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
    pub fn sub(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
    pub fn neg(&self) -> Mat {
        self.map(|x| -x)
    }
    /// Sub-block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut m = Mat::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        m
    }
    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(r, c);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(ro + i, co + j, b.get(i, j).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }
    /// `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        let (r1, c1) = (a.rows, a.cols);
        let mut m = Mat::zeros(a.rows + c.rows, a.cols + b.cols);
        for (blk, ro, co) in [(a, 0, 0), (b, 0, c1), (c, r1, 0), (d, r1, c1)] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    m.set(ro + i, co + j, blk.get(i, j).clone());
                }
            }
        }
        m
    }
    pub fn hcat(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let mut m = Mat::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
    /// Map every entry through a ring reduction.
    pub fn reduce_with(&self, f: impl Fn(&RingElem) -> RingElem) -> Mat {
        self.map(f)
    }

    /// Determinant by unit-pivot elimination, falling back to cofactor
    /// expansion when no unit pivot is available.
    pub fn det(&self) -> RingElem {
        assert!(self.is_square(), "determinant of non-square matrix");
        det_rec(self.clone())
    }

    /// Adjugate, so that `adj(A) A = A adj(A) = det(A) Id` without division.
    pub fn adjugate(&self) -> Mat {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = Mat::zeros(n, n);
        if n == 1 {
            m.set(0, 0, RingElem::one());
            return m;
        }
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let d = minor.det();
                let d = if (i + j) % 2 == 0 { d } else { -d };
                m.set(j, i, d);
            }
        }
        m
    }
    fn minor(&self, r: usize, c: usize) -> Mat {
        let n = self.rows;
        let mut rows = Vec::with_capacity(n - 1);
        for i in 0..n {
            if i == r {
                continue;
            }
            let mut row = Vec::with_capacity(n - 1);
            for j in 0..n {
                if j != c {
                    row.push(self.get(i, j).clone());
                }
            }
            rows.push(row);
        }
        Mat::from_rows(rows)
    }
    pub fn inverse(&self) -> Result<Mat, LinalgError> {
        solve(self, &Mat::identity(self.rows))
    }
}

fn det_rec(mut m: Mat) -> RingElem {
    let n = m.rows;
    if n == 0 {
        return RingElem::one();
    }
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut sign = Scalar::one();
    let mut acc = RingElem::one();
    let mut size = n;
    let mut offset = 0;
    while offset < n {
        let col = offset;
        let piv = (offset..n).find(|&i| m.get(i, col).is_unit());
        match piv {
            Some(p) => {
                if p != offset {
                    swap_rows(&mut m, p, offset);
                    sign = -sign;
                }
                let pv = m.get(offset, col).as_constant().unwrap();
                acc = acc.scale(&pv);
                let inv = pv.inv().unwrap();
                for i in offset + 1..n {
                    let f = m.get(i, col).scale(&inv);
                    if f.is_zero() {
                        continue;
                    }
                    for j in col..n {
                        let v = m.get(i, j) - &(&f * m.get(offset, j));
                        m.set(i, j, v);
                    }
                }
                offset += 1;
                size -= 1;
            }
            None => {
                if (offset..n).all(|i| m.get(i, col).is_zero()) {
                    return RingElem::zero();
                }
                let sub = m.block(offset, n, offset, n);
                return (&acc * &cofactor_det(&sub)).scale(&sign);
            }
        }
    }
    let _ = size;
    acc.scale(&sign)
}

fn cofactor_det(m: &Mat) -> RingElem {
    let n = m.rows;
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut s = RingElem::zero();
    for j in 0..n {
        let a = m.get(0, j);
        if a.is_zero() {
            continue;
        }
        let d = det_rec(m.minor(0, j));
        let t = a * &d;
        if j % 2 == 0 {
            s += &t;
        } else {
            s -= &t;
        }
    }
    s
}

fn swap_rows(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        m.data.swap(a * m.cols + j, b * m.cols + j);
    }
}

/// Reduced row echelon form using unit pivots only.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref {
    pub mat: Mat,
    pub pivots: Vec<usize>,
}

pub fn rref(a: &Mat) -> Result<Rref, LinalgError> {
    rref_limited(a, a.cols)
}

/// Row reduction restricted to the first `ncols` columns as pivot candidates.
pub fn rref_limited(a: &Mat, ncols: usize) -> Result<Rref, LinalgError> {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.rows {
            break;
        }
        let piv = (r..m.rows).find(|&i| m.get(i, c).is_unit());
        let p = match piv {
            Some(p) => p,
            None => {
                if (r..m.rows).all(|i| m.get(i, c).is_zero()) {
                    continue;
                }
                return Err(LinalgError::NotInvertibleOverRing(c));
            }
        };
        swap_rows(&mut m, p, r);
        let inv = m.get(r, c).as_constant().unwrap().inv().unwrap();
        for j in 0..m.cols {
            let v = m.get(r, j).scale(&inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..m.cols {
                let t = m.get(r, j);
                if t.is_zero() {
                    continue;
                }
                let v = m.get(i, j) - &(&f * t);
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(Rref { mat: m, pivots })
}

/// Row echelon form with full pivoting: each step takes the first column that
/// still holds a unit entry, so non-unit columns are skipped rather than
/// fatal.  Fails only when a nonzero row remains without any unit entry.
/// Pivot rows are normalized and their pivot columns cleared elsewhere.
pub fn unit_echelon(a: &Mat) -> Result<Rref, LinalgError> {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    while r < m.rows {
        let found = (0..m.cols).filter(|c| !pivots.contains(c)).find_map(|c| (r..m.rows).find(|&i| m.get(i, c).is_unit()).map(|i| (i, c)));
        let (p, c) = match found {
            Some(x) => x,
            None => {
                if let Some(c) = (0..m.cols).find(|&c| (r..m.rows).any(|i| !m.get(i, c).is_zero())) {
                    return Err(LinalgError::NotInvertibleOverRing(c));
                }
                break;
            }
        };
        swap_rows(&mut m, p, r);
        let inv = m.get(r, c).as_constant().unwrap().inv().unwrap();
        for j in 0..m.cols {
            let v = m.get(r, j).scale(&inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..m.cols {
                let t = m.get(r, j);
                if t.is_zero() {
                    continue;
                }
                let v = m.get(i, j) - &(&f * t);
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(Rref { mat: m, pivots })
}

/// Reduce `x` against the rows of a [`unit_echelon`] form; zero iff `x` is in
/// the row span.
pub fn echelon_reduce(e: &Rref, x: &[RingElem]) -> Vec<RingElem> {
    let mut y = x.to_vec();
    for (row, &pc) in e.pivots.iter().enumerate() {
        let f = y[pc].clone();
        if f.is_zero() {
            continue;
        }
        for (j, slot) in y.iter_mut().enumerate() {
            let t = e.mat.get(row, j);
            if !t.is_zero() {
                *slot -= &(&f * t);
            }
        }
    }
    y
}

/// Kernel basis from a [`unit_echelon`] form.
pub fn echelon_kernel(e: &Rref) -> Vec<Vec<RingElem>> {
    let n = e.mat.cols;
    let mut out = Vec::new();
    for free in 0..n {
        if e.pivots.contains(&free) {
            continue;
        }
        let mut v = vec![RingElem::zero(); n];
        v[free] = RingElem::one();
        for (row, &pc) in e.pivots.iter().enumerate() {
            v[pc] = -e.mat.get(row, free);
        }
        out.push(v);
    }
    out
}

/// Ring-linear kernel basis of `a` (requires unit pivots).
pub fn kernel(a: &Mat) -> Result<Vec<Vec<RingElem>>, LinalgError> {
    let rr = rref(a)?;
    let n = a.cols;
    let mut out = Vec::new();
    for free in 0..n {
        if rr.pivots.contains(&free) {
            continue;
        }
        let mut v = vec![RingElem::zero(); n];
        v[free] = RingElem::one();
        for (row, &pc) in rr.pivots.iter().enumerate() {
            v[pc] = -rr.mat.get(row, free);
        }
        out.push(v);
    }
    Ok(out)
}

/// Constant vectors `c` with `a c = 0`: every monomial coefficient must vanish.
pub fn constant_kernel(a: &Mat) -> Vec<Vec<Scalar>> {
    use crate::ring::Monomial;
    use std::collections::BTreeMap;
    let n = a.cols;
    let mut eqs: BTreeMap<(usize, Monomial), Vec<Scalar>> = BTreeMap::new();
    for i in 0..a.rows {
        for j in 0..n {
            for (m, c) in a.get(i, j).terms() {
                let e = eqs.entry((i, m.clone())).or_insert_with(|| vec![Scalar::zero(); n]);
                e[j] = c.clone();
            }
        }
    }
    let rows: Vec<Vec<Scalar>> = eqs.into_values().collect();
    if rows.is_empty() {
        return (0..n)
            .map(|k| (0..n).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
    }
    let m = Mat::from_scalars(&rows);
    kernel(&m)
        .expect("constant matrices always have unit pivots")
        .into_iter()
        .map(|v| v.into_iter().map(|x| x.as_constant().unwrap()).collect())
        .collect()
}

/// Solve `a x = b` for square `a` invertible over the ring.
pub fn solve(a: &Mat, b: &Mat) -> Result<Mat, LinalgError> {
    if !a.is_square() || a.rows != b.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} system with {} right-hand rows",
            a.rows, a.cols, b.rows
        )));
    }
    let n = a.cols;
    let aug = a.hcat(b);
    let rr = rref_limited(&aug, n)?;
    if rr.pivots.len() < n {
        let k = kernel(a)?;
        return Err(LinalgError::NoSolution { kernel: k.into_iter().next() });
    }
    Ok(rr.mat.block(0, n, n, n + b.cols))
}

/// Some solution of a possibly rectangular `a x = b` (single column), or `None`
/// when inconsistent.
pub fn solve_any(a: &Mat, b: &[RingElem]) -> Result<Option<Vec<RingElem>>, LinalgError> {
    let bcol = Mat::from_cols(&[b.to_vec()]);
    let aug = a.hcat(&bcol);
    let rr = rref_limited(&aug, a.cols)?;
    let r = rr.pivots.len();
    for i in r..aug.rows {
        if !rr.mat.get(i, a.cols).is_zero() {
            return Ok(None);
        }
    }
    let mut x = vec![RingElem::zero(); a.cols];
    for (row, &pc) in rr.pivots.iter().enumerate() {
        x[pc] = rr.mat.get(row, a.cols).clone();
    }
    Ok(Some(x))
}

/// Inertia of a constant symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    Nondegenerate { p: usize, q: usize },
    Degenerate { p: usize, q: usize, nullity: usize },
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signature::Nondegenerate { p, q } => write!(f, "({p},{q})"),
            Signature::Degenerate { p, q, nullity } => write!(f, "degenerate ({p},{q}) with nullity {nullity}"),
        }
    }
}

pub fn signature(g: &Mat) -> Result<Signature, LinalgError> {
    let i = inertia(g)?;
    Ok(if i.zero == 0 {
        Signature::Nondegenerate { p: i.positive, q: i.negative }
    } else {
        Signature::Degenerate { p: i.positive, q: i.negative, nullity: i.zero }
    })
}

/// Fraction-free symmetric elimination with 1x1 and 2x2 pivots.  Each
/// congruence step multiplies the trailing block by the pivot; its sign is
/// tracked so the inertia of the original form is recovered.
pub fn inertia(g: &Mat) -> Result<Inertia, LinalgError> {
    if !g.is_square() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = g.rows;
    let mut q: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let c = g.get(i, j).as_constant().ok_or(LinalgError::NotConstant)?;
            if !c.is_real() {
                return Err(LinalgError::NotConstant);
            }
            *cell = c.real();
        }
    }
    for i in 0..n {
        for j in 0..i {
            if q[i][j] != q[j][i] {
                return Err(LinalgError::NotSymmetric);
            }
        }
    }
    let mut den = BigInt::one();
    for row in &q {
        for v in row {
            den = den.lcm(v.denom());
        }
    }
    let mut a: Vec<Vec<BigInt>> = q
        .iter()
        .map(|row| row.iter().map(|v| (v * Rational::from_integer(den.clone())).to_integer()).collect())
        .collect();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut flip = false;
    let (mut pos, mut neg) = (0usize, 0usize);
    while !idx.is_empty() {
        if let Some(&k) = idx.iter().find(|&&k| !a[k][k].is_zero()) {
            let d = a[k][k].clone();
            let positive = d.is_positive() != flip;
            if positive {
                pos += 1;
            } else {
                neg += 1;
            }
            idx.retain(|&x| x != k);
            let rest = idx.clone();
            let old = a.clone();
            for &i in &rest {
                for &j in &rest {
                    a[i][j] = &d * &old[i][j] - &old[i][k] * &old[j][k];
                }
            }
            if d.is_negative() {
                flip = !flip;
            }
            continue;
        }
        let pair = idx.iter().flat_map(|&k| idx.iter().map(move |&l| (k, l))).find(|&(k, l)| k < l && !a[k][l].is_zero());
        match pair {
            Some((k, l)) => {
                pos += 1;
                neg += 1;
                let gkl = a[k][l].clone();
                idx.retain(|&x| x != k && x != l);
                let rest = idx.clone();
                let old = a.clone();
                for &i in &rest {
                    for &j in &rest {
                        a[i][j] = &gkl * &old[i][j] - (&old[i][k] * &old[j][l] + &old[i][l] * &old[j][k]);
                    }
                }
                if gkl.is_negative() {
                    flip = !flip;
                }
            }
            None => break,
        }
    }
    Ok(Inertia { positive: pos, negative: neg, zero: n - pos - neg })
}

/// Split `x` against the span of `frame` (coordinate vectors) using the
/// ambient Gram matrix `g`.  Returns (coefficients, component, residual).
pub fn gram_project(
    frame: &[Vec<RingElem>],
    g: &Mat,
    x: &[RingElem],
) -> Result<(Vec<RingElem>, Vec<RingElem>, Vec<RingElem>), LinalgError> {
    let s = Mat::from_cols(frame);
    let gs = s.transpose().mul(g).mul(&s);
    let rhs = s.transpose().mul(g).mul_vec(x);
    let inv = solve(&gs, &Mat::from_cols(&[rhs])).map_err(|_| LinalgError::GramNotInvertible)?;
    let coeffs = inv.col(0);
    let comp = s.mul_vec(&coeffs);
    let res: Vec<RingElem> = x.iter().zip(&comp).map(|(a, b)| a - b).collect();
    Ok((coeffs, comp, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures() {
        assert_eq!(signature(&Mat::from_ints(&[&[1, 0], &[0, -1]])).unwrap(), Signature::Nondegenerate { p: 1, q: 1 });
        assert!(matches!(signature(&Mat::from_ints(&[&[1, 0], &[0, 0]])).unwrap(), Signature::Degenerate { .. }));
        assert_eq!(signature(&Mat::from_ints(&[&[0, 1], &[1, 0]])).unwrap(), Signature::Nondegenerate { p: 1, q: 1 });
        assert_eq!(
            signature(&Mat::from_ints(&[&[-2, 1, 0], &[1, -3, 0], &[0, 0, -1]])).unwrap(),
            Signature::Nondegenerate { p: 0, q: 3 }
        );
        assert_eq!(signature(&Mat::from_ints(&[&[0, 1], &[2, 0]])), Err(LinalgError::NotSymmetric));
    }

    #[test]
    fn singular_solve_reports_kernel() {
        let a = Mat::from_ints(&[&[1, 2], &[2, 4]]);
        match solve(&a, &Mat::identity(2)) {
            Err(LinalgError::NoSolution { kernel: Some(k) }) => {
                assert!(a.mul_vec(&k).iter().all(|x| x.is_zero()));
                assert!(k.iter().any(|x| !x.is_zero()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_echelon_skips_non_unit_columns() {
        use crate::ring::{BracketConstants, JetRing};
        let r = JetRing::with_names(&["f"], &["D"], BracketConstants::zero(1), 2).unwrap();
        let f = r.gen(0);
        let a = Mat::from_rows(vec![vec![f.clone(), RingElem::one(), RingElem::zero()], vec![RingElem::zero(), RingElem::zero(), RingElem::one()]]);
        let e = unit_echelon(&a).unwrap();
        assert_eq!(e.pivots, vec![1, 2]);
        let x = vec![f.scale(&Scalar::from_int(3)), RingElem::int(3), f.clone()];
        assert!(echelon_reduce(&e, &x).iter().all(|c| c.is_zero()));
        let k = echelon_kernel(&e);
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = Mat::from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let d = a.det();
        assert_eq!(d, RingElem::int(18));
        let prod = a.adjugate().mul(&a);
        assert_eq!(prod, Mat::identity(3).scale(&Scalar::from_int(18)));
    }
}
