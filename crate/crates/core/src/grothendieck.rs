//! Exact arithmetic in the localized Grothendieck ring, modelled as rational
//! functions in the Lefschetz class L with integer coefficients, plus the
//! classes of general linear groups, structure groups and parabolics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::quiver::ExtDimVector;

/// Polynomial in L with integer coefficients, ascending, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LPolynomial {
    coeffs: Vec<BigInt>,
}

impl LPolynomial {
    pub fn zero() -> Self {
        LPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The class L itself.
    pub fn l() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// L^k − L^j.
    pub fn l_diff(k: usize, j: usize) -> Self {
        &Self::monomial(BigInt::one(), k) - &Self::monomial(BigInt::one(), j)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Ascending coefficient list.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    fn div_scalar(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x / c).collect())
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        self.div_scalar(&c)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Multiplies by L^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        LPolynomial { coeffs }
    }

    /// Pseudo-remainder of `self` by `b` (b nonzero).
    fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("nonzero divisor");
        let lb = b.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading().unwrap().clone();
            r = &r.scale(&lb) - &b.scale(&lr).shift(dr - db);
        }
        r
    }

    /// Exact division; `None` unless `b` divides `self` in Z[L].
    pub fn div_exact(&self, b: &Self) -> Option<Self> {
        let db = b.degree()?;
        let lb = b.leading().unwrap();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.coeffs.len().saturating_sub(db).max(1)];
        while let Some(dr) = r.degree() {
            if dr < db {
                return None;
            }
            let (qc, rem) = r.leading().unwrap().div_rem(lb);
            if !rem.is_zero() {
                return None;
            }
            r = &r - &b.scale(&qc).shift(dr - db);
            q[dr - db] = qc;
        }
        Some(Self::from_coeffs(q))
    }

    /// Greatest common divisor, primitive with positive leading coefficient.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.primitive_part();
        let mut y = b.primitive_part();
        while !y.is_zero() {
            let r = x.pseudo_rem(&y).primitive_part();
            x = y;
            y = r;
        }
        x
    }

    /// Whether every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

impl Add for &LPolynomial {
    type Output = LPolynomial;
    fn add(self, o: &LPolynomial) -> LPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        LPolynomial::from_coeffs((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &LPolynomial {
    type Output = LPolynomial;
    fn sub(self, o: &LPolynomial) -> LPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        LPolynomial::from_coeffs((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &LPolynomial {
    type Output = LPolynomial;
    fn mul(self, o: &LPolynomial) -> LPolynomial {
        if self.is_zero() || o.is_zero() {
            return LPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LPolynomial::from_coeffs(out)
    }
}

impl Neg for &LPolynomial {
    type Output = LPolynomial;
    fn neg(self) -> LPolynomial {
        LPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $ty {
            type Output = $ty;
            fn $m(self, o: $ty) -> $ty { (&self).$m(&o) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, o: &$ty) -> $ty { (&self).$m(o) }
        }
    )*};
}

forward_owned!(LPolynomial, Add add, Sub sub, Mul mul);

impl fmt::Display for LPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "L")?,
                (1, false) => write!(f, "{mag}*L")?,
                (_, true) => write!(f, "L^{k}")?,
                (_, false) => write!(f, "{mag}*L^{k}")?,
            }
        }
        Ok(())
    }
}

/// Reduced fraction num/den of polynomials in L.
#[derive(Clone, Debug, Hash)]
pub struct MotiveExpr {
    num: LPolynomial,
    den: LPolynomial,
}

impl PartialEq for MotiveExpr {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

impl Eq for MotiveExpr {}

impl From<LPolynomial> for MotiveExpr {
    fn from(p: LPolynomial) -> Self {
        MotiveExpr { num: p, den: LPolynomial::one() }
    }
}

impl MotiveExpr {
    pub fn new(num: LPolynomial, den: LPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: LPolynomial, den: LPolynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = LPolynomial::gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd divides numerator");
        let mut den = den.div_exact(&g).expect("gcd divides denominator");
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        if den.leading().unwrap().is_negative() {
            num = -&num;
            den = -&den;
        }
        MotiveExpr { num, den }
    }

    pub fn zero() -> Self {
        MotiveExpr { num: LPolynomial::zero(), den: LPolynomial::one() }
    }

    pub fn one() -> Self {
        LPolynomial::one().into()
    }

    pub fn l() -> Self {
        LPolynomial::l().into()
    }

    pub fn integer(c: i64) -> Self {
        LPolynomial::constant(BigInt::from(c)).into()
    }

    /// L^k for any integer k.
    pub fn l_pow(k: i64) -> Self {
        let m = LPolynomial::monomial(BigInt::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            m.into()
        } else {
            MotiveExpr { num: LPolynomial::one(), den: m }
        }
    }

    pub fn numerator(&self) -> &LPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &LPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0) && self.den.coeff(0).is_one()
    }

    pub fn as_polynomial(&self) -> Option<LPolynomial> {
        self.is_polynomial().then(|| self.num.clone())
    }

    /// deg num − deg den (the dimension of a class); `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn pow(&self, n: u32) -> Self {
        MotiveExpr { num: self.num.pow(n), den: self.den.pow(n) }
    }

    pub fn eval_at(&self, q: i64) -> Result<BigRational> {
        let x = BigInt::from(q);
        let d = self.den.eval(&x);
        if d.is_zero() {
            return Err(Error::Pole(q));
        }
        Ok(BigRational::new(self.num.eval(&x), d))
    }
}

impl Add for &MotiveExpr {
    type Output = MotiveExpr;
    fn add(self, o: &MotiveExpr) -> MotiveExpr {
        if self.den == o.den {
            return MotiveExpr::normalized(&self.num + &o.num, self.den.clone());
        }
        MotiveExpr::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for &MotiveExpr {
    type Output = MotiveExpr;
    fn sub(self, o: &MotiveExpr) -> MotiveExpr {
        self + &(-o)
    }
}

impl Mul for &MotiveExpr {
    type Output = MotiveExpr;
    fn mul(self, o: &MotiveExpr) -> MotiveExpr {
        MotiveExpr::normalized(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &MotiveExpr {
    type Output = MotiveExpr;
    fn neg(self) -> MotiveExpr {
        MotiveExpr { num: -&self.num, den: self.den.clone() }
    }
}

forward_owned!(MotiveExpr, Add add, Sub sub, Mul mul);

impl fmt::Display for MotiveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for MotiveExpr {
    type Err = Error;

    /// Accepts integers, `L`, `+ - * / ^` and parentheses; `−` counts as minus.
    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in '{s}'")));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    L,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Tok::Num(digits.parse().map_err(|_| Error::Parse(digits.clone()))?));
            }
            'L' => {
                out.push(Tok::L);
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '\u{2212}' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            _ => return Err(Error::Parse(format!("unexpected character '{c}' in '{s}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<MotiveExpr> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MotiveExpr> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { &acc * &rhs } else { acc.checked_div(&rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MotiveExpr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<MotiveExpr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let neg = self.peek_op() == Some('-');
            if neg {
                self.pos += 1;
            }
            let Some(Tok::Num(n)) = self.tokens.get(self.pos).cloned() else {
                return Err(Error::Parse("expected integer exponent".into()));
            };
            self.pos += 1;
            let n: u32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
            let p = base.pow(n);
            return if neg { MotiveExpr::one().checked_div(&p) } else { Ok(p) };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MotiveExpr> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(LPolynomial::constant(n).into()),
            Tok::L => Ok(MotiveExpr::l()),
            Tok::Op('(') => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
        }
    }
}

/// [GL_n] = ∏_{k<n} (L^n − L^k) as a polynomial.
pub fn gl_poly(n: usize) -> LPolynomial {
    (0..n).fold(LPolynomial::one(), |acc, k| &acc * &LPolynomial::l_diff(n, k))
}

pub fn class_gl(n: usize) -> MotiveExpr {
    gl_poly(n).into()
}

/// [GL_s] · ∏_i [GL_{d_i}].
pub fn class_group(v: &ExtDimVector) -> MotiveExpr {
    v.d.entries().iter().fold(gl_poly(v.s), |acc, &d| &acc * &gl_poly(d)).into()
}

/// [G] / (L − 1).
pub fn class_pg(v: &ExtDimVector) -> MotiveExpr {
    let lm1: MotiveExpr = LPolynomial::from_i64(&[-1, 1]).into();
    class_group(v).checked_div(&lm1).expect("L - 1 is nonzero")
}

/// Class of the stabilizer of a flag with subquotient sizes `sizes` in GL_n.
pub fn parabolic_block(sizes: &[usize]) -> LPolynomial {
    let mut e = 0;
    for k in 0..sizes.len() {
        for l in k + 1..sizes.len() {
            e += sizes[k] * sizes[l];
        }
    }
    sizes.iter().fold(LPolynomial::monomial(BigInt::one(), e), |acc, &n| &acc * &gl_poly(n))
}

/// Class of the parabolic subgroup of G fixing a flag of type `steps`,
/// taken blockwise over the extension vertex and each vertex of Q.
pub fn class_parabolic(steps: &[ExtDimVector]) -> MotiveExpr {
    let Some(first) = steps.first() else {
        return MotiveExpr::one();
    };
    let s_sizes: Vec<usize> = steps.iter().map(|v| v.s).collect();
    let mut acc = parabolic_block(&s_sizes);
    for i in 0..first.d.len() {
        let sizes: Vec<usize> = steps.iter().map(|v| v.d.entries()[i]).collect();
        acc = &acc * &parabolic_block(&sizes);
    }
    acc.into()
}

/// Gaussian binomial [n choose k]_L (zero when k > n).
pub fn gaussian_binomial(n: usize, k: usize) -> LPolynomial {
    if k > n {
        return LPolynomial::zero();
    }
    let k = k.min(n - k);
    // Row-by-row Pascal recursion [m,j] = [m-1,j-1] + L^j [m-1,j].
    let mut row = vec![LPolynomial::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity((m + 1).min(k + 1));
        for j in 0..=m.min(k) {
            let a = if j > 0 { row[j - 1].clone() } else { LPolynomial::zero() };
            let b = if j < row.len() { row[j].shift(j) } else { LPolynomial::zero() };
            next.push(&a + &b);
        }
        row = next;
    }
    row[k].clone()
}

/// Number of m × n matrices of rank r, as a polynomial in L.
pub fn count_matrices_of_rank(m: usize, n: usize, r: usize) -> LPolynomial {
    if r > m.min(n) {
        return LPolynomial::zero();
    }
    (0..r).fold(gaussian_binomial(m, r), |acc, k| &acc * &LPolynomial::l_diff(n, k))
}
