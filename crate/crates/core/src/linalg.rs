//! Dense matrices over `Z`, `Q` and prime fields `F_p`.
//!
//! Everything here is small (side lengths in the tens); the routines favour
//! exactness and simplicity over asymptotics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Row-major integer matrix. Over `F_p` the entries are kept in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matrix shapes do not compose");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_mod(&self, rhs: &Mat, p: u64) -> Mat {
        let mut out = self.mul(rhs);
        out.reduce_mod(p);
        out
    }

    pub fn reduce_mod(&mut self, p: u64) {
        let p = p as i64;
        for x in &mut self.data {
            *x = x.rem_euclid(p);
        }
    }

    pub fn reduced_mod(&self, p: u64) -> Mat {
        let mut m = self.clone();
        m.reduce_mod(p);
        m
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out.set(self.rows + r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<i64>> = (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect();
        json!(rows)
    }

    /// Parses a row-major array of arrays; `rows`/`cols` fix the shape so that
    /// empty matrices are unambiguous.
    pub fn from_json(v: &Value, rows: usize, cols: usize) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("expected a {rows}x{cols} integer matrix"));
        let arr = v.as_array().ok_or_else(bad)?;
        if rows == 0 || cols == 0 {
            return Ok(Mat::zeros(rows, cols));
        }
        if arr.len() != rows {
            return Err(bad());
        }
        let mut data = Vec::with_capacity(rows * cols);
        for row in arr {
            let row = row.as_array().filter(|r| r.len() == cols).ok_or_else(bad)?;
            for x in row {
                data.push(x.as_i64().ok_or_else(bad)?);
            }
        }
        Mat::from_rows(rows, cols, data)
    }
}

/// Inverse of a unit modulo `p` by the extended Euclidean algorithm.
#[inline]
pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i128) as u64
}

#[inline]
pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// In-place reduced row echelon form over `F_p` of a `rows x cols` buffer.
/// Returns the pivot columns.
pub fn rref_mod(buf: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| buf[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for k in 0..cols {
                buf.swap(pr * cols + k, r * cols + k);
            }
        }
        let inv = inv_mod(buf[r * cols + c], p);
        for k in c..cols {
            buf[r * cols + k] = buf[r * cols + k] * inv % p;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = buf[i * cols + c];
            if f == 0 {
                continue;
            }
            for k in c..cols {
                let sub = f * buf[r * cols + k] % p;
                buf[i * cols + k] = (buf[i * cols + k] + p - sub) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank over `F_p` by forward elimination. Entries must already be reduced.
pub fn rank_mod(buf: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| buf[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for k in c..cols {
                buf.swap(pr * cols + k, r * cols + k);
            }
        }
        let inv = inv_mod(buf[r * cols + c], p);
        for i in r + 1..rows {
            let f = buf[i * cols + c];
            if f == 0 {
                continue;
            }
            let f = p - f * inv % p;
            for k in c..cols {
                let x = buf[i * cols + k] + f * buf[r * cols + k] % p;
                buf[i * cols + k] = if x >= p { x - p } else { x };
            }
        }
        r += 1;
    }
    r
}

/// Exact rank over `Q` by fraction-free (Bareiss) elimination.
pub fn rank_rational(rows: usize, cols: usize, entries: &[BigInt]) -> usize {
    let mut a: Vec<BigInt> = entries.to_vec();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for k in 0..cols {
                a.swap(pr * cols + k, r * cols + k);
            }
        }
        let piv = a[r * cols + c].clone();
        for i in r + 1..rows {
            let f = a[i * cols + c].clone();
            for k in c..cols {
                let v = (&piv * &a[i * cols + k] - &f * &a[r * cols + k]) / &prev;
                a[i * cols + k] = v;
            }
        }
        prev = piv;
        r += 1;
    }
    r
}

/// Rank of a list of integer row vectors: certified by a large-prime rank
/// when that is already full, otherwise computed by Bareiss elimination.
pub fn integer_row_rank(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    // rank mod p never exceeds the rank over Q, so a full rank mod p is a proof
    const P: u64 = 2_147_483_629;
    let pb = BigInt::from(P);
    let mut buf: Vec<u64> = rows
        .iter()
        .flat_map(|r| r.iter().map(|x| {
            let m = x % &pb;
            let m = if m.is_negative() { m + &pb } else { m };
            u64::try_from(m).expect("reduced residue")
        }))
        .collect();
    let rk = rank_mod(&mut buf, rows.len(), cols, P);
    if rk == rows.len().min(cols) {
        return rk;
    }
    let flat: Vec<BigInt> = rows.iter().flatten().cloned().collect();
    rank_rational(rows.len(), cols, &flat)
}

/// Reduced row echelon form over `Q`; returns the pivot columns.
pub fn rref_rational(a: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(pr, r);
        let inv = a[r][c].recip();
        for k in c..cols {
            a[r][k] = &a[r][k] * &inv;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for k in c..cols {
                let sub = &f * &a[r][k];
                a[i][k] -= sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `sum_j x_j columns[j] = target` over `Q`. Returns `None` when the
/// system is inconsistent and an error when the solution is not unique.
pub fn solve_rational(columns: &[Vec<BigInt>], target: &[BigInt]) -> Result<Option<Vec<BigRational>>> {
    let n = columns.len();
    let m = target.len();
    if columns.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidInput("columns and target differ in length".into()));
    }
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> = columns.iter().map(|c| BigRational::from_integer(c[i].clone())).collect();
            row.push(BigRational::from_integer(target[i].clone()));
            row
        })
        .collect();
    let pivots = rref_rational(&mut a);
    if pivots.contains(&n) {
        return Ok(None);
    }
    if pivots.len() < n {
        return Err(Error::Consistency("linear system has more than one solution".into()));
    }
    Ok(Some((0..n).map(|i| a[i][n].clone()).collect()))
}

/// A nonzero integer vector `x` with `sum_i x_i rows[i] = 0`, if any.
pub fn integer_left_kernel_vector(rows: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    // transpose: unknowns are the row coefficients
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|j| rows.iter().map(|r| BigRational::from_integer(r[j].clone())).collect())
        .collect();
    let pivots = rref_rational(&mut a);
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut x = vec![BigRational::zero(); n];
    x[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -a[r][free].clone();
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    Some(x.iter().map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer()).collect())
}

/// Determinant of a small integer matrix (Bareiss).
pub fn det(m: &Mat) -> BigInt {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<BigInt> = m.data.iter().map(|&x| BigInt::from(x)).collect();
    let mut prev = BigInt::from(1);
    let mut sign = 1;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
            return BigInt::zero();
        };
        if pr != c {
            for k in 0..n {
                a.swap(pr * n + k, c * n + k);
            }
            sign = -sign;
        }
        for i in c + 1..n {
            for k in c + 1..n {
                let v = (&a[c * n + c] * &a[i * n + k] - &a[i * n + c] * &a[c * n + k]) / &prev;
                a[i * n + k] = v;
            }
        }
        prev = a[c * n + c].clone();
    }
    prev * sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_agree() {
        let rows: Vec<Vec<i64>> = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let flat: Vec<BigInt> = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        assert_eq!(rank_rational(3, 3, &flat), 2);
        let mut buf: Vec<u64> = rows.iter().flatten().map(|&x| x as u64).collect();
        assert_eq!(rank_mod(&mut buf, 3, 3, 7), 2);
        // [[1, 1], [1, 6]] has determinant 5: singular only mod 5
        let mut buf = vec![1, 1, 1, 6 % 5];
        assert_eq!(rank_mod(&mut buf, 2, 2, 5), 1);
        let mut buf = vec![1, 1, 1, 6];
        assert_eq!(rank_mod(&mut buf, 2, 2, 7), 2);
    }

    #[test]
    fn rref_pivots() {
        let mut buf = vec![0, 2, 4, 0, 1, 2];
        let piv = rref_mod(&mut buf, 2, 3, 5);
        assert_eq!(piv, vec![1]);
        assert_eq!(&buf[..3], &[0, 1, 2]);
    }

    #[test]
    fn determinant() {
        let m = Mat::from_rows(3, 3, vec![2, 0, 1, 1, 3, 2, 1, 1, 1]).unwrap();
        // first-row expansion: 2 * 1 - 0 + 1 * (1 - 3)
        assert_eq!(det(&m), BigInt::from(0));
        assert_eq!(det(&Mat::identity(4)), BigInt::from(1));
    }

    #[test]
    fn rational_solve_and_kernel() {
        let b = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let x = solve_rational(&[b(&[1, 0, 1]), b(&[0, 2, 2])], &b(&[3, 4, 7])).unwrap().unwrap();
        assert_eq!(x, vec![BigRational::from_integer(3.into()), BigRational::from_integer(2.into())]);
        assert!(solve_rational(&[b(&[1, 0])], &b(&[0, 1])).unwrap().is_none());
        let k = integer_left_kernel_vector(&[b(&[1, 2]), b(&[0, 1]), b(&[2, 5])]).unwrap();
        assert_eq!(k, b(&[-2, -1, 1]));
        assert!(integer_left_kernel_vector(&[b(&[1, 0]), b(&[0, 1])]).is_none());
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(inv_mod(3, 7) * 3 % 7, 1);
    }
}
