//! Prime fields F_p and dense matrices over them.

use rand::Rng;

use crate::error::{Error, Result};

/// The field F_p for a prime p < 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1u64 << 31) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    pub fn from_i64(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric lift to the integers, in (-p/2, p/2].
    pub fn to_i64(self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> u32 {
        rng.gen_range(1..self.p)
    }
}

/// Row-major dense matrix with entries in `0..p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FpMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(FpMatrix { rows, cols, data })
    }

    /// Builds a matrix from integer rows, reducing mod p.
    pub fn from_rows_i64(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged matrix rows".into()));
            }
            data.extend(row.iter().map(|&x| field.from_i64(x)));
        }
        Ok(FpMatrix { rows: r, cols: c, data })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, field: PrimeField, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        FpMatrix { rows, cols, data }
    }

    pub fn random_invertible<R: Rng + ?Sized>(n: usize, field: PrimeField, rng: &mut R) -> Self {
        loop {
            let m = Self::random(n, n, field, rng);
            if m.rank(field) == n {
                return m;
            }
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u32] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul(&self, other: &FpMatrix, field: PrimeField) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = field.p() as u64;
        let mut out = FpMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] =
                        ((out.data[idx] as u64 + a * other.data[k * other.cols + j] as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FpMatrix, field: PrimeField) -> Result<FpMatrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.add(a, b)).collect();
        Ok(FpMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &FpMatrix, field: PrimeField) -> Result<FpMatrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.sub(a, b)).collect();
        Ok(FpMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: u32, field: PrimeField) -> FpMatrix {
        let data = self.data.iter().map(|&a| field.mul(a, c)).collect();
        FpMatrix { rows: self.rows, cols: self.cols, data }
    }

    fn same_shape(&self, other: &FpMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// `self ⊗ I_s`: entry (a, b) becomes the block `self[a][b] · I_s`.
    pub fn kron_identity(&self, s: usize) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.rows * s, self.cols * s);
        for a in 0..self.rows {
            for b in 0..self.cols {
                let x = self.get(a, b);
                if x != 0 {
                    for k in 0..s {
                        out.set(a * s + k, b * s + k, x);
                    }
                }
            }
        }
        out
    }

    /// `I_n ⊗ self`: block diagonal with n copies.
    pub fn identity_kron(&self, n: usize) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.rows * n, self.cols * n);
        for k in 0..n {
            for a in 0..self.rows {
                for b in 0..self.cols {
                    out.set(k * self.rows + a, k * self.cols + b, self.get(a, b));
                }
            }
        }
        out
    }

    pub fn hstack(parts: &[&FpMatrix]) -> Result<FpMatrix> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::Shape("hstack with differing row counts".into()));
        }
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = FpMatrix::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            for r in 0..rows {
                out.data[r * cols + off..r * cols + off + m.cols].copy_from_slice(m.row(r));
            }
            off += m.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&FpMatrix]) -> Result<FpMatrix> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::Shape("vstack with differing column counts".into()));
        }
        let mut data = Vec::new();
        for m in parts {
            data.extend_from_slice(&m.data);
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        Ok(FpMatrix { rows, cols, data })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> FpMatrix {
        let mut out = FpMatrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, field: PrimeField) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m.data, m.rows, m.cols, field, true);
        (m, pivots)
    }

    pub fn rank(&self, field: PrimeField) -> usize {
        let mut data = self.data.clone();
        rank_in_place(&mut data, self.rows, self.cols, field)
    }

    /// Basis of the right null space {x : self · x = 0}.
    pub fn nullspace(&self, field: PrimeField) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref(field);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    pub fn det(&self, field: PrimeField) -> Result<u32> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("determinant of {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return Ok(0);
            };
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                det = field.neg(det);
            }
            let pv = a[col * n + col];
            det = field.mul(det, pv);
            let inv = field.inv(pv).expect("nonzero pivot");
            for r in col + 1..n {
                let factor = field.mul(a[r * n + col], inv);
                if factor == 0 {
                    continue;
                }
                for c in col..n {
                    a[r * n + c] = field.sub(a[r * n + c], field.mul(factor, a[col * n + c]));
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self, field: PrimeField) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = FpMatrix::hstack(&[self, &FpMatrix::identity(n)]).ok()?;
        let (r, pivots) = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0..n, n..2 * n))
    }
}

/// Rank of a row-major `rows × cols` buffer, destroying it.
pub(crate) fn rank_in_place(a: &mut [u32], rows: usize, cols: usize, field: PrimeField) -> usize {
    let p = field.p() as u64;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if piv != rank {
            for c in col..cols {
                a.swap(piv * cols + c, rank * cols + c);
            }
        }
        let inv = field.inv(a[rank * cols + col]).expect("nonzero pivot") as u64;
        for r in rank + 1..rows {
            let x = a[r * cols + col] as u64;
            if x == 0 {
                continue;
            }
            let factor = p - (x * inv) % p;
            for c in col..cols {
                let y = a[rank * cols + c] as u64;
                if y != 0 {
                    a[r * cols + c] = ((a[r * cols + c] as u64 + factor * y) % p) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// In-place Gauss-Jordan; returns the pivot columns. With `reduce_above`
/// false only row echelon form is produced.
pub(crate) fn rref_in_place(
    a: &mut [u32],
    rows: usize,
    cols: usize,
    field: PrimeField,
    reduce_above: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if piv != rank {
            for c in 0..cols {
                a.swap(piv * cols + c, rank * cols + c);
            }
        }
        let inv = field.inv(a[rank * cols + col]).expect("nonzero pivot");
        for c in col..cols {
            a[rank * cols + c] = field.mul(a[rank * cols + c], inv);
        }
        for r in 0..rows {
            if r == rank || (!reduce_above && r < rank) {
                continue;
            }
            let factor = a[r * cols + col];
            if factor == 0 {
                continue;
            }
            for c in col..cols {
                a[r * cols + c] = field.sub(a[r * cols + c], field.mul(factor, a[rank * cols + c]));
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}
