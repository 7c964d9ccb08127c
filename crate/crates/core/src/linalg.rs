//! Exact dense linear algebra over Q and over prime fields.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The active coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

/// One element of a [`Field`]. Values from different fields never meet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    P(u64),
}

impl Field {
    pub const DEFAULT_PRIME: u64 = 2_147_483_629;

    pub fn gf(p: u64) -> Result<Field> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(Error::Format(format!("{p} is not a prime below 2^32")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::zero()),
            Field::Prime(_) => Scalar::P(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::one()),
            Field::Prime(_) => Scalar::P(1),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::P(v.rem_euclid(p as i64) as u64),
        }
    }

    /// `num/den`, failing when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        match *self {
            Field::Rational => {
                if den.is_zero() {
                    return Err(Error::Format("zero denominator".into()));
                }
                Ok(Scalar::Q(BigRational::new(num.clone(), den.clone())))
            }
            Field::Prime(p) => {
                let bp = BigInt::from(p);
                let reduce = |x: &BigInt| {
                    let r = ((x % &bp) + &bp) % &bp;
                    r.to_u64().unwrap()
                };
                let d = reduce(den);
                if d == 0 {
                    return Err(Error::Format(format!("denominator vanishes mod {p}")));
                }
                Ok(Scalar::P(mulmod(reduce(num), powmod(d, p - 2, p), p)))
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(q) => q.is_zero(),
            Scalar::P(v) => *v == 0,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, self) {
            (Scalar::Q(x), Scalar::Q(y), _) => Scalar::Q(x + y),
            (Scalar::P(x), Scalar::P(y), Field::Prime(p)) => Scalar::P((x + y) % p),
            _ => unreachable!("scalars from different fields"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (a, self) {
            (Scalar::Q(x), _) => Scalar::Q(-x),
            (Scalar::P(x), Field::Prime(p)) => Scalar::P((p - x) % p),
            _ => unreachable!("scalars from different fields"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, self) {
            (Scalar::Q(x), Scalar::Q(y), _) => Scalar::Q(x * y),
            (Scalar::P(x), Scalar::P(y), Field::Prime(p)) => Scalar::P(mulmod(*x, *y, *p)),
            _ => unreachable!("scalars from different fields"),
        }
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: &Scalar) -> Scalar {
        match (a, self) {
            (Scalar::Q(x), _) => Scalar::Q(x.recip()),
            (Scalar::P(x), Field::Prime(p)) => Scalar::P(powmod(*x, p - 2, *p)),
            _ => unreachable!("scalars from different fields"),
        }
    }

    /// Integer value of a scalar when it has one (rationals only need den 1;
    /// residues are read in the symmetric range).
    pub fn to_i64(&self, a: &Scalar) -> Option<i64> {
        match (a, self) {
            (Scalar::Q(x), _) => x.is_integer().then(|| x.to_integer().to_i64()).flatten(),
            (Scalar::P(v), Field::Prime(p)) => {
                let v = *v as i64;
                let p = *p as i64;
                Some(if v > p / 2 { v - p } else { v })
            }
            _ => None,
        }
    }

    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Q(x) if x.is_integer() => x.to_integer().to_string(),
            Scalar::Q(x) => format!("{}/{}", x.numer(), x.denom()),
            Scalar::P(v) => v.to_string(),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `q`, `gf` (default prime), `gf:<p>` and `gf<p>`.
    fn from_str(s: &str) -> Result<Field> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" || t == "rational" || t == "rationals" {
            return Ok(Field::Rational);
        }
        if t == "gf" || t == "gfp" {
            return Ok(Field::Prime(Field::DEFAULT_PRIME));
        }
        let digits = t
            .strip_prefix("gf:")
            .or_else(|| t.strip_prefix("gf"))
            .ok_or_else(|| Error::Format(format!("unknown field `{s}`")))?;
        let p: u64 = digits
            .trim_matches(|c| c == '(' || c == ')')
            .parse()
            .map_err(|_| Error::Format(format!("unknown field `{s}`")))?;
        Field::gf(p)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

/// Dense row-major matrix. `0 x n` and `n x 0` are fine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Integer rows; `cols` is needed when `rows` is empty.
    pub fn from_ints(field: Field, rows: &[Vec<i64>], cols: usize) -> Matrix {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix::from_fn(field, rows.len(), cols, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn from_scalars(
        field: Field,
        rows: usize,
        cols: usize,
        data: Vec<Scalar>,
    ) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.field.to_i64(self.get(i, j)))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    /// Matrix product; panics on inner dimension mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape mismatch");
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    /// Side-by-side concatenation; `rows` is used when `parts` is empty.
    pub fn hstack(field: Field, rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, off + j, m.get(i, j).clone());
                }
            }
            off += m.cols;
        }
        out
    }

    /// Stacked vertically; `cols` is used when `parts` is empty.
    pub fn vstack(field: Field, cols: usize, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            data.extend(m.data.iter().cloned());
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, idx.len(), self.cols, |i, j| {
            self.get(idx[i], j).clone()
        })
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, idx.len(), |i, j| {
            self.get(i, idx[j]).clone()
        })
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.select_cols(&[j])
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let idx = r * m.cols + j;
                if !f.is_zero(&m.data[idx]) {
                    m.data[idx] = f.mul(&m.data[idx], &inv);
                }
            }
            let nz: Vec<usize> = (c..m.cols).filter(|&j| !f.is_zero(m.get(r, j))).collect();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for &j in &nz {
                    let t = f.mul(&factor, m.get(r, j));
                    let idx = i * m.cols + j;
                    m.data[idx] = f.sub(&m.data[idx], &t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Columns form a basis of the null space.
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (t, &fc) in free.iter().enumerate() {
            k.set(fc, t, f.one());
            for (pi, &pc) in pivots.iter().enumerate() {
                let v = r.get(pi, fc);
                if !f.is_zero(v) {
                    k.set(pc, t, f.neg(v));
                }
            }
        }
        k
    }

    /// Columns of `self` at pivot positions: a basis of the column span.
    pub fn image_basis(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }

    /// Some `X` with `self * X = b`, or `None`.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "solve: {} rows against {}",
                self.rows, b.rows
            )));
        }
        let f = self.field;
        let aug = Matrix::hstack(f, self.rows, &[self, b]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(f, self.cols, b.cols);
        for (pi, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(pi, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    /// `Q` with `Q * self = 0`, surjective, `rank Q = rows - rank`.
    pub fn cokernel_projection(&self) -> Matrix {
        self.transpose().kernel_basis().transpose()
    }

    /// `S` with `self * S = I`; `self` must have full row rank.
    pub fn right_inverse(&self) -> Option<Matrix> {
        self.solve(&Matrix::identity(self.field, self.rows))
            .ok()
            .flatten()
    }

    /// `L` with `L * self = I`; `self` must have full column rank.
    pub fn left_inverse(&self) -> Option<Matrix> {
        self.transpose().right_inverse().map(|m| m.transpose())
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let r = self.right_inverse()?;
        Some(r)
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }
}

/// Basis of the intersection of the column spans of `bases`.
pub fn subspace_intersection(bases: &[Matrix]) -> Result<Matrix> {
    let first = bases
        .first()
        .ok_or_else(|| Error::ShapeMismatch("no subspaces to intersect".into()))?;
    let n = first.rows;
    let f = first.field;
    let mut acc = first.image_basis();
    for b in &bases[1..] {
        if b.rows != n {
            return Err(Error::ShapeMismatch(format!(
                "ambient dimensions {n} and {}",
                b.rows
            )));
        }
        let b = b.image_basis();
        let stacked = Matrix::hstack(f, n, &[&acc, &b.scale(&f.from_i64(-1))]);
        let k = stacked.kernel_basis();
        let coeffs = k.select_rows(&(0..acc.cols).collect::<Vec<_>>());
        acc = acc.mul(&coeffs).image_basis();
    }
    Ok(acc)
}

/// Rank of the subgroup of Z^n generated by `rows`.
pub fn integer_lattice_rank(rows: &[Vec<i64>]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    Matrix::from_ints(Field::Rational, rows, cols).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> Matrix {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_ints(Field::Rational, rows, c)
    }

    #[test]
    fn ranks() {
        assert_eq!(Matrix::identity(Field::Rational, 3).rank(), 3);
        assert_eq!(Matrix::zeros(Field::Rational, 2, 5).rank(), 0);
        assert_eq!(q(&[vec![1, 2], vec![2, 4]]).rank(), 1);
        assert_eq!(Matrix::zeros(Field::Rational, 0, 3).rank(), 0);
    }

    #[test]
    fn kernel_image_cokernel() {
        assert_eq!(
            Matrix::identity(Field::Rational, 4).kernel_basis().cols(),
            0
        );
        let d = q(&[vec![1], vec![1]]);
        let im = d.image_basis();
        assert_eq!(im.shape(), (2, 1));
        let qm = d.cokernel_projection();
        assert_eq!(qm.shape(), (1, 2));
        assert!(qm.mul(&d).is_zero());
        assert_eq!(qm.rank(), 1);
    }

    #[test]
    fn solve_and_inverse() {
        let a = q(&[vec![2, 1], vec![1, 1]]);
        let b = q(&[vec![3], vec![2]]);
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(a.mul(&x), b);
        assert!(q(&[vec![1, 1], vec![1, 1]])
            .solve(&q(&[vec![1], vec![0]]))
            .unwrap()
            .is_none());
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(Field::Rational, 2));
    }

    #[test]
    fn intersections() {
        let e1 = q(&[vec![1], vec![0]]);
        let e2 = q(&[vec![0], vec![1]]);
        let d = q(&[vec![1], vec![1]]);
        assert_eq!(
            subspace_intersection(&[e1.clone(), e1.clone()])
                .unwrap()
                .cols(),
            1
        );
        assert_eq!(
            subspace_intersection(&[e1.clone(), e2.clone()])
                .unwrap()
                .cols(),
            0
        );
        assert_eq!(subspace_intersection(&[e1, e2, d]).unwrap().cols(), 0);
        let bad = q(&[vec![1]]);
        assert!(subspace_intersection(&[q(&[vec![1], vec![0]]), bad]).is_err());
    }

    #[test]
    fn lattice_rank() {
        assert_eq!(integer_lattice_rank(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(integer_lattice_rank(&[vec![2, 4], vec![1, 2]]), 1);
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Prime(7);
        let a = f.from_i64(3);
        assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
        assert_eq!(f.from_i64(-1), Scalar::P(6));
        let half = f.from_ratio(&BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(f.mul(&half, &f.from_i64(2)), f.one());
        assert!(f.from_ratio(&BigInt::from(1), &BigInt::from(7)).is_err());
        assert_eq!("gf:3".parse::<Field>().unwrap(), Field::Prime(3));
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rational);
        assert!("gf:4".parse::<Field>().is_err());
        assert_eq!(
            "gf".parse::<Field>().unwrap(),
            Field::Prime(Field::DEFAULT_PRIME)
        );
    }
}
