//! Determinantal semi-invariants assembled from block layouts of the arrow
//! matrices of Q̂, their weights under base change, and the quotient maps of
//! the running example.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FpMatrix, PrimeField};
use crate::oracle::rep::{random_point, FqRep, GroupElement};
use crate::quiver::{build_extended_quiver, ExtDimVector, ExtensionData};

/// A linear combination of products of named matrices, e.g. `m*rho1@1 - rho2@1`.
/// Names are arrows of Q̂. The empty sum is the zero block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockExpr {
    pub terms: Vec<(i64, Vec<String>)>,
}

impl BlockExpr {
    pub fn zero() -> Self {
        BlockExpr { terms: Vec::new() }
    }

    pub fn name(n: &str) -> Self {
        BlockExpr { terms: vec![(1, vec![n.to_string()])] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn evaluate(&self, lookup: &dyn Fn(&str) -> Result<FpMatrix>, field: PrimeField) -> Result<Option<FpMatrix>> {
        let mut acc: Option<FpMatrix> = None;
        for (c, factors) in &self.terms {
            let mut prod = lookup(&factors[0])?;
            for f in &factors[1..] {
                prod = prod.mul(&lookup(f)?, field)?;
            }
            let prod = prod.scale(field.from_i64(*c), field);
            acc = Some(match acc {
                None => prod,
                Some(a) => a.add(&prod, field)?,
            });
        }
        Ok(acc)
    }
}

impl FromStr for BlockExpr {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "0" {
            return Ok(BlockExpr::zero());
        }
        let mut terms = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let mut sign = 1;
            if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if !terms.is_empty() {
                return Err(Error::Parse(format!("expected + or - in '{text}'")));
            }
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            let mut coeff = sign;
            let mut factors = Vec::new();
            for f in term.split('*') {
                if f.is_empty() {
                    return Err(Error::Parse(format!("empty factor in '{text}'")));
                }
                match f.parse::<i64>() {
                    Ok(k) => coeff *= k,
                    Err(_) => factors.push(f.to_string()),
                }
            }
            if factors.is_empty() {
                return Err(Error::Parse(format!("term without a matrix in '{text}'")));
            }
            if coeff != 0 {
                terms.push((coeff, factors));
            }
        }
        Ok(BlockExpr { terms })
    }
}

impl fmt::Display for BlockExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, factors)) in self.terms.iter().enumerate() {
            match (k, *c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// sign · det of a block matrix for a declared dimension vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDetSI {
    pub name: String,
    pub dim: ExtDimVector,
    pub sign: i64,
    pub grid: Vec<Vec<BlockExpr>>,
}

impl BlockDetSI {
    pub fn new(name: &str, dim: ExtDimVector, sign: i64, grid: Vec<Vec<BlockExpr>>) -> Result<Self> {
        let width = grid.first().map_or(0, |r| r.len());
        if grid.is_empty() || width == 0 || grid.iter().any(|r| r.len() != width) {
            return Err(Error::Shape(format!("{name}: block grid must be rectangular and nonempty")));
        }
        Ok(BlockDetSI { name: name.to_string(), dim, sign, grid })
    }

    /// Grid given as strings, one inner vector per block row.
    pub fn parse(name: &str, dim: ExtDimVector, sign: i64, grid: &[Vec<&str>]) -> Result<Self> {
        let grid = grid
            .iter()
            .map(|row| row.iter().map(|e| e.parse()).collect::<Result<Vec<BlockExpr>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, dim, sign, grid)
    }

    /// The assembled square matrix.
    pub fn assemble(&self, ext: &ExtensionData, rep: &FqRep, field: PrimeField) -> Result<FpMatrix> {
        if rep.dim() != self.dim {
            return Err(Error::Shape(format!("{}: declared for {}, got {}", self.name, self.dim, rep.dim())));
        }
        let xq = build_extended_quiver(ext)?;
        let mats = rep.extended_matrices(&xq, ext);
        let lookup = |n: &str| -> Result<FpMatrix> {
            xq.quiver
                .arrow_index(n)
                .map(|k| mats[k].clone())
                .ok_or_else(|| Error::Parse(format!("unknown matrix '{n}'")))
        };
        let blocks = self
            .grid
            .iter()
            .map(|row| row.iter().map(|e| e.evaluate(&lookup, field)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let rows = grid_sizes(&blocks, |b| b.rows(), |r, c| (r, c), blocks.len(), blocks[0].len(), &self.name, "row")?;
        let cols = grid_sizes(&blocks, |b| b.cols(), |c, r| (r, c), blocks[0].len(), blocks.len(), &self.name, "column")?;
        let (n, m) = (rows.iter().sum::<usize>(), cols.iter().sum::<usize>());
        if n != m {
            return Err(Error::Shape(format!("{}: assembled matrix is {n}×{m}", self.name)));
        }
        let mut out = FpMatrix::zeros(n, m);
        let mut r0 = 0;
        for (bi, row) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    for r in 0..b.rows() {
                        for c in 0..b.cols() {
                            out.set(r0 + r, c0 + c, b.get(r, c));
                        }
                    }
                }
                c0 += cols[bj];
            }
            r0 += rows[bi];
        }
        Ok(out)
    }
}

/// Common extent of each block row (or column); zero blocks take the size of
/// their neighbours.
fn grid_sizes(
    blocks: &[Vec<Option<FpMatrix>>],
    extent: impl Fn(&FpMatrix) -> usize,
    index: impl Fn(usize, usize) -> (usize, usize),
    outer: usize,
    inner: usize,
    name: &str,
    what: &str,
) -> Result<Vec<usize>> {
    let mut sizes = Vec::with_capacity(outer);
    for a in 0..outer {
        let mut size = None;
        for b in 0..inner {
            let (r, c) = index(a, b);
            if let Some(m) = &blocks[r][c] {
                let e = extent(m);
                if size.is_some_and(|s| s != e) {
                    return Err(Error::Shape(format!("{name}: inconsistent sizes in block {what} {a}")));
                }
                size = Some(e);
            }
        }
        sizes.push(size.ok_or_else(|| Error::Shape(format!("{name}: block {what} {a} is entirely zero")))?);
    }
    Ok(sizes)
}

/// sign · det of the assembled matrix over F_p.
pub fn evaluate_si(si: &BlockDetSI, ext: &ExtensionData, rep: &FqRep, field: PrimeField) -> Result<u32> {
    let d = si.assemble(ext, rep, field)?.det(field)?;
    Ok(field.mul(field.from_i64(si.sign), d))
}

/// Character exponents: si(g·x) = det(g_∞)^{w_inf} ∏ det(g_i)^{w_i} si(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    pub w_inf: i64,
    pub w: Vec<i64>,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        write!(f, "({}|{})", self.w_inf, w.join(","))
    }
}

/// Largest |exponent| tried when fitting weights.
pub const WEIGHT_RANGE: i64 = 8;

fn signed_pow(field: PrimeField, a: u32, e: i64) -> u32 {
    let base = if e < 0 { field.inv(a).expect("determinant of a group element") } else { a };
    field.pow(base, e.unsigned_abs())
}

/// Fits the character of `si` from `trials` random pairs (g, x). Fails as
/// degenerate when si vanishes on every sample, and as inconsistent when no
/// exponent vector (or more than one) in the search range fits.
pub fn verify_weight(si: &BlockDetSI, ext: &ExtensionData, p: u64, trials: usize, seed: u64) -> Result<Weight> {
    let field = PrimeField::new(p)?;
    let v = &si.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (det g_inf, det g_i, si(x), si(g x)) per informative sample
    let mut samples: Vec<(u32, Vec<u32>, u32, u32)> = Vec::new();
    for _ in 0..trials {
        let x = random_point(ext, v, field, &mut rng)?;
        let g = GroupElement::random(v, field, &mut rng);
        let a = evaluate_si(si, ext, &x, field)?;
        let b = evaluate_si(si, ext, &x.act(&g, ext, field)?, field)?;
        if a == 0 {
            if b != 0 {
                return Err(Error::WeightFit(format!("{}: vanishes at x but not at g·x", si.name)));
            }
            continue;
        }
        let (di, dv) = g.dets(field);
        samples.push((di, dv, a, b));
    }
    if samples.is_empty() {
        return Err(Error::WeightFit(format!("{}: degenerate, zero on all {trials} samples", si.name)));
    }
    // Vertices of dimension 0 carry the trivial group; pin their weight to 0.
    let ranges: Vec<Vec<i64>> = std::iter::once(v.s)
        .chain(v.d.0.iter().copied())
        .map(|n| if n == 0 { vec![0] } else { (-WEIGHT_RANGE..=WEIGHT_RANGE).collect() })
        .collect();
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut idx = vec![0usize; ranges.len()];
    loop {
        let w: Vec<i64> = idx.iter().zip(&ranges).map(|(&k, r)| r[k]).collect();
        let fits = samples.iter().all(|(di, dv, a, b)| {
            let mut chi = signed_pow(field, *di, w[0]);
            for (d, e) in dv.iter().zip(&w[1..]) {
                chi = field.mul(chi, signed_pow(field, *d, *e));
            }
            field.mul(chi, *a) == *b
        });
        if fits {
            found.push(w);
        }
        let Some(pos) = (0..idx.len()).rev().find(|&k| idx[k] + 1 < ranges[k].len()) else { break };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|x| *x = 0);
    }
    match found.len() {
        1 => {
            let w = found.pop().unwrap();
            Ok(Weight { w_inf: w[0], w: w[1..].to_vec() })
        }
        0 => Err(Error::WeightFit(format!("{}: no consistent weight within ±{WEIGHT_RANGE}", si.name))),
        n => Err(Error::WeightFit(format!("{}: {n} weight vectors fit, samples do not separate them", si.name))),
    }
}

/// The two worked families of the running example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Dimension (2,(4,1)), quotient P^4.
    D241,
    /// Dimension (3,(6,2)), quotient P^6.
    D362,
}

impl Family {
    pub fn dim(self) -> ExtDimVector {
        match self {
            Family::D241 => ExtDimVector::new(2, vec![4, 1]),
            Family::D362 => ExtDimVector::new(3, vec![6, 2]),
        }
    }

    pub fn from_dim(v: &ExtDimVector) -> Option<Self> {
        [Family::D241, Family::D362].into_iter().find(|f| &f.dim() == v)
    }

    /// ℏ_0 followed by ℏ_1, ℏ_2, ...
    pub fn functions(self) -> Vec<BlockDetSI> {
        let (a, b, c, ma) = ("rho1@1", "rho2@1", "rho3@1", "m*rho1@1");
        let v = self.dim();
        let pairs: &[(&str, &str)] = match self {
            Family::D241 => &[
                ("rho1@1", "rho2@1"),
                ("rho1@1", "rho3@1"),
                ("rho1@1+rho3@1", "rho2@1"),
                ("rho1@1", "rho2@1+rho3@1"),
                ("rho1@1+rho3@1", "rho2@1+rho3@1"),
            ],
            Family::D362 => &[
                ("rho1@1", "rho2@1"),
                ("rho1@1", "rho3@1"),
                ("rho1@1+rho3@1", "rho2@1"),
                ("rho1@1+rho2@1", "rho3@1"),
                ("rho1@1", "rho2@1+rho3@1"),
                ("rho1@1+rho2@1", "rho2@1+rho3@1"),
                ("rho1@1+rho3@1", "rho2@1+rho3@1"),
            ],
        };
        let neg_ma = "-m*rho1@1";
        let h0 = match self {
            Family::D241 => BlockDetSI::parse("h0", v.clone(), -1, &[vec![a, b, c], vec!["0", ma, "0"], vec!["0", "0", ma]]),
            Family::D362 => BlockDetSI::parse(
                "h0",
                v.clone(),
                1,
                &[
                    vec![ma, "0", "0", "0", neg_ma, "0"],
                    vec!["0", ma, "0", "0", "0", neg_ma],
                    vec!["0", "0", ma, "0", "0", neg_ma],
                    vec![a, "0", c, "0", b, "0"],
                    vec!["0", b, "0", a, "0", c],
                ],
            ),
        }
        .expect("fixed layout");
        let mut out = vec![h0];
        for (k, (x, y)) in pairs.iter().enumerate() {
            out.push(BlockDetSI::parse(&format!("h{}", k + 1), v.clone(), 1, &[vec![x, y]]).expect("fixed layout"));
        }
        out
    }
}

/// (ℏ_0ℏ_1 : ℏ_0ℏ_2 : ...) scaled so the first nonzero coordinate is 1.
pub fn quotient_coords(ext: &ExtensionData, rep: &FqRep, family: Family, field: PrimeField) -> Result<Vec<u32>> {
    let fs = family.functions();
    let h0 = evaluate_si(&fs[0], ext, rep, field)?;
    let mut coords = fs[1..].iter().map(|h| Ok(field.mul(h0, evaluate_si(h, ext, rep, field)?))).collect::<Result<Vec<u32>>>()?;
    let Some(&lead) = coords.iter().find(|&&x| x != 0) else {
        return Err(Error::Assumption("all quotient coordinates vanish".into()));
    };
    let inv = field.inv(lead).expect("nonzero");
    coords.iter_mut().for_each(|x| *x = field.mul(*x, inv));
    Ok(coords)
}
