//! Homogeneous linear systems in matrix unknowns: Σ c · L · X_u · R = 0.

use crate::field::{FpMatrix, PrimeField};

/// One summand `coefficient · left · X_unknown · right`; `None` stands for an identity.
pub struct Term<'a> {
    pub coefficient: u32,
    pub unknown: usize,
    pub left: Option<&'a FpMatrix>,
    pub right: Option<&'a FpMatrix>,
}

impl<'a> Term<'a> {
    pub fn new(coefficient: u32, unknown: usize, left: Option<&'a FpMatrix>, right: Option<&'a FpMatrix>) -> Self {
        Term { coefficient, unknown, left, right }
    }
}

pub struct LinearSystem {
    field: PrimeField,
    shapes: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    n: usize,
    rows: Vec<u32>,
    n_rows: usize,
}

impl LinearSystem {
    pub fn new(field: PrimeField, shapes: Vec<(usize, usize)>) -> Self {
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut n = 0;
        for &(r, c) in &shapes {
            offsets.push(n);
            n += r * c;
        }
        LinearSystem { field, shapes, offsets, n, rows: Vec::new(), n_rows: 0 }
    }

    pub fn num_unknowns(&self) -> usize {
        self.n
    }

    pub fn num_equations(&self) -> usize {
        self.n_rows
    }

    pub fn shapes(&self) -> &[(usize, usize)] {
        &self.shapes
    }

    /// Adds the entrywise equations of an `r × c` matrix identity.
    pub fn add_equation(&mut self, shape: (usize, usize), terms: &[Term<'_>]) {
        let (r, c) = shape;
        let f = self.field;
        let start = self.rows.len();
        self.rows.resize(start + r * c * self.n, 0);
        for t in terms {
            let (a, b) = self.shapes[t.unknown];
            let off = self.offsets[t.unknown];
            let lr = t.left.map_or(a, |m| m.rows());
            let rc = t.right.map_or(b, |m| m.cols());
            assert_eq!((lr, rc), (r, c), "term shape does not match equation shape");
            for i in 0..r {
                for x in 0..a {
                    let lv = match t.left {
                        Some(m) => m.get(i, x),
                        None => (i == x) as u32,
                    };
                    if lv == 0 {
                        continue;
                    }
                    let lv = f.mul(lv, t.coefficient);
                    for y in 0..b {
                        for j in 0..c {
                            let rv = match t.right {
                                Some(m) => m.get(y, j),
                                None => (y == j) as u32,
                            };
                            if rv == 0 {
                                continue;
                            }
                            let idx = start + (i * c + j) * self.n + off + x * b + y;
                            self.rows[idx] = f.add(self.rows[idx], f.mul(lv, rv));
                        }
                    }
                }
            }
        }
        self.n_rows += r * c;
    }

    fn matrix(&self) -> FpMatrix {
        FpMatrix::from_vec(self.n_rows, self.n, self.rows.clone()).expect("consistent system size")
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank(self.field)
    }

    /// Basis of the solution space, each vector in the packed unknown layout.
    pub fn solution_basis(&self) -> Vec<Vec<u32>> {
        if self.n_rows == 0 {
            return (0..self.n)
                .map(|k| {
                    let mut v = vec![0; self.n];
                    v[k] = 1;
                    v
                })
                .collect();
        }
        self.matrix().nullspace(self.field)
    }

    pub fn solution_dim(&self) -> usize {
        self.n - self.rank()
    }

    /// Splits a packed vector into the unknown matrices.
    pub fn unpack(&self, v: &[u32]) -> Vec<FpMatrix> {
        self.shapes
            .iter()
            .zip(&self.offsets)
            .map(|(&(r, c), &off)| FpMatrix::from_vec(r, c, v[off..off + r * c].to_vec()).unwrap())
            .collect()
    }

    pub fn offset(&self, unknown: usize) -> usize {
        self.offsets[unknown]
    }
}

/// Solves `b · x = y` for `x` when `b` has full column rank; `None` if inconsistent.
pub fn solve_left(b: &FpMatrix, y: &FpMatrix, field: PrimeField) -> Option<FpMatrix> {
    let aug = FpMatrix::hstack(&[b, y]).ok()?;
    let (r, pivots) = aug.rref(field);
    let k = b.cols();
    if pivots.iter().any(|&p| p >= k) || pivots.len() < k {
        return None;
    }
    Some(r.submatrix(0..k, k..k + y.cols()))
}
