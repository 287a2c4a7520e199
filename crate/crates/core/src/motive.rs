//! Motives of Rep^full, the motivic HN recursion and Poincaré polynomials.
//!
//! For a one-arrow quiver the class of Rep^full is assembled from isomorphism
//! classes M ≅ P^r ⊕ S_src^{d_src−r} ⊕ S_tgt^{d_tgt−r}: each contributes the
//! class of its orbit times the class of surjections T^s → M, and the latter
//! comes from the submodule recursion L^{hom(T^s,M)} = Σ_{U ⊆ M} #Epi(T^s, U).

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::grothendieck::{class_group, class_parabolic, class_pg, count_matrices_of_rank, gaussian_binomial, LPolynomial, MotiveExpr};
use crate::oracle::census::count_rep_full_points;
use crate::quiver::{expected_dims, ExtDimVector, ExtensionData};
use crate::stability::{hn_exponent, HNType, StabilityEngine};

/// Isomorphism class of a representation of the one-arrow quiver: dimensions
/// at source and target and the rank of the arrow map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct A2IsoClass {
    pub d1: usize,
    pub d2: usize,
    pub r: usize,
}

impl A2IsoClass {
    pub fn new(d1: usize, d2: usize, r: usize) -> Result<Self> {
        if r > d1.min(d2) {
            return Err(Error::Assumption(format!("rank {r} exceeds min({d1},{d2})")));
        }
        Ok(A2IsoClass { d1, d2, r })
    }

    /// Number of submodules of `self` isomorphic to `c`.
    pub fn submodule_count(&self, c: &A2IsoClass) -> LPolynomial {
        let (a, b, rho) = (self.d1, self.d2, self.r);
        let (i, j, r) = (c.d1, c.d2, c.r);
        if i > a || j > b || r > rho || i - r > a - rho || j < r {
            return LPolynomial::zero();
        }
        let lifts = r * (a - rho - (i - r));
        &(&(&gaussian_binomial(rho, r) * &gaussian_binomial(a - rho, i - r)) * &LPolynomial::monomial(BigInt::one(), lifts))
            * &gaussian_binomial(b - r, j - r)
    }

    /// Class of the orbit: d2 × d1 matrices of rank r.
    pub fn orbit_class(&self) -> LPolynomial {
        count_matrices_of_rank(self.d2, self.d1, self.r)
    }
}

/// Symbolic engine for a one-arrow quiver. Vertex dimensions are given in
/// (source, target) order internally.
#[derive(Debug)]
pub struct A2Engine {
    src: usize,
    tgt: usize,
    p: usize,
    u: usize,
    v: usize,
    epi: Mutex<HashMap<(usize, A2IsoClass), LPolynomial>>,
}

impl A2Engine {
    pub fn new(ext: &ExtensionData) -> Result<Self> {
        let q = ext.quiver();
        if q.num_vertices() != 2 || q.arrows().len() != 1 || q.arrows()[0].source == q.arrows()[0].target {
            return Err(Error::Unsupported("symbolic Rep^full needs a quiver with two vertices and one arrow".into()));
        }
        let a = &q.arrows()[0];
        let t = ext.t().entries();
        let p = ext.require_t_matrices()?[0].rank();
        Ok(A2Engine {
            src: a.source,
            tgt: a.target,
            p,
            u: t[a.source] - p,
            v: t[a.target] - p,
            epi: Mutex::default(),
        })
    }

    /// Invariants (p, u, v) with T ≅ P^p ⊕ S_src^u ⊕ S_tgt^v.
    pub fn t_invariants(&self) -> (usize, usize, usize) {
        (self.p, self.u, self.v)
    }

    /// dim Hom(T, N).
    pub fn hom_t(&self, n: &A2IsoClass) -> usize {
        self.p * n.d1 + self.u * (n.d1 - n.r) + self.v * n.d2
    }

    /// Class of surjections T^s → M.
    pub fn hom_epi_class(&self, s: usize, m: &A2IsoClass) -> LPolynomial {
        if let Some(x) = self.epi.lock().unwrap().get(&(s, *m)) {
            return x.clone();
        }
        let mut acc = LPolynomial::monomial(BigInt::one(), s * self.hom_t(m));
        for i in 0..=m.d1 {
            for j in 0..=m.d2 {
                for r in 0..=i.min(j) {
                    let c = A2IsoClass { d1: i, d2: j, r };
                    if c == *m {
                        continue;
                    }
                    let sigma = m.submodule_count(&c);
                    if sigma.is_zero() {
                        continue;
                    }
                    acc = &acc - &(&sigma * &self.hom_epi_class(s, &c));
                }
            }
        }
        self.epi.lock().unwrap().insert((s, *m), acc.clone());
        acc
    }

    /// [Rep^full_{(s,d)}] = Σ_r [orbit of rank r] · #Epi(T^s, M_r).
    pub fn rep_full(&self, v: &ExtDimVector) -> LPolynomial {
        let (d1, d2) = (v.d.0[self.src], v.d.0[self.tgt]);
        let mut acc = LPolynomial::zero();
        for r in 0..=d1.min(d2) {
            let m = A2IsoClass { d1, d2, r };
            let e = self.hom_epi_class(v.s, &m);
            if !e.is_zero() {
                acc = &acc + &(&m.orbit_class() * &e);
            }
        }
        acc
    }
}

/// Sample primes and degree bound for interpolating [Rep^full] from counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationPlan {
    pub primes: Vec<u32>,
    pub degree_bound: usize,
    pub confirm_prime: u32,
    pub budget: u128,
}

impl InterpolationPlan {
    /// Smallest primes: `degree_bound + 1` samples, then one held out.
    pub fn smallest(degree_bound: usize, budget: u128) -> Self {
        let mut primes = Vec::new();
        let mut n = 2u32;
        while primes.len() < degree_bound + 2 {
            if (2..n).take_while(|k| k * k <= n).all(|k| n % k != 0) {
                primes.push(n);
            }
            n += 1;
        }
        let confirm_prime = primes.pop().unwrap();
        InterpolationPlan { primes, degree_bound, confirm_prime, budget }
    }

    fn validate(&self) -> Result<()> {
        if self.primes.len() < self.degree_bound + 1 {
            return Err(Error::Assumption(format!(
                "{} sample primes cannot determine degree {}",
                self.primes.len(),
                self.degree_bound
            )));
        }
        if self.primes.contains(&self.confirm_prime) {
            return Err(Error::Assumption("confirmation prime must be held out".into()));
        }
        Ok(())
    }
}

/// Where classes of Rep^full come from.
#[derive(Clone, Debug)]
pub enum RepFullMotiveSource {
    SymbolicA2,
    /// Built from [`InterpolationPlan::smallest`] with degree bound dim Rep^full.
    InterpolatedAuto { budget: u128 },
    Interpolated(InterpolationPlan),
    UserTable(BTreeMap<ExtDimVector, MotiveExpr>),
}

/// Lagrange interpolation through (x_k, y_k); `None` unless the result has
/// integer coefficients.
pub fn interpolate_integer(points: &[(BigInt, BigInt)]) -> Option<LPolynomial> {
    let n = points.len();
    let mut coeffs = vec![BigRational::zero(); n];
    for (k, (xk, yk)) in points.iter().enumerate() {
        // basis polynomial ∏_{m≠k} (x − x_m)/(x_k − x_m), coefficients low to high
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (m, (xm, _)) in points.iter().enumerate() {
            if m == k {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (e, c) in basis.iter().enumerate() {
                next[e + 1] += c;
                next[e] -= c * BigRational::from_integer(xm.clone());
            }
            basis = next;
            denom *= BigRational::from_integer(xk - xm);
        }
        let scale = BigRational::from_integer(yk.clone()) / denom;
        for (e, c) in basis.into_iter().enumerate() {
            coeffs[e] += c * &scale;
        }
    }
    coeffs.iter().all(|c| c.is_integer()).then(|| LPolynomial::from_coeffs(coeffs.into_iter().map(|c| c.to_integer()).collect()))
}

/// Interpolates [Rep^full_v] from exact point counts.
pub fn interpolate_rep_full(ext: &ExtensionData, v: &ExtDimVector, plan: &InterpolationPlan) -> Result<LPolynomial> {
    plan.validate()?;
    let bound = expected_dims(ext, v)?.dim_rep_full.max(0) as usize;
    if bound > plan.degree_bound {
        return Err(Error::Assumption(format!(
            "dim Rep^full = {bound} exceeds the interpolation degree bound {}",
            plan.degree_bound
        )));
    }
    let count = |p: u32| -> Result<BigInt> {
        let field = PrimeField::new(p as u64)?;
        Ok(BigInt::from(count_rep_full_points(ext, v, field, plan.budget)?))
    };
    let points = plan.primes.iter().map(|&p| Ok((BigInt::from(p), count(p)?))).collect::<Result<Vec<_>>>()?;
    let poly = interpolate_integer(&points)
        .ok_or_else(|| Error::Assumption(format!("point counts of Rep^full {v} are not polynomial")))?;
    if poly.degree().unwrap_or(0) > plan.degree_bound {
        return Err(Error::Assumption(format!("interpolated degree exceeds {}", plan.degree_bound)));
    }
    if poly.eval(&BigInt::from(plan.confirm_prime)) != count(plan.confirm_prime)? {
        return Err(Error::Assumption(format!("held-out prime {} disagrees with interpolation", plan.confirm_prime)));
    }
    Ok(poly)
}

/// Outcome of [`MotiveEngine::poincare_polynomial`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareResult {
    pub polynomial: LPolynomial,
    pub dim_moduli: i64,
}

/// Motives for one extension, memoized per dimension vector.
pub struct MotiveEngine<'a> {
    stability: &'a StabilityEngine<'a>,
    source: RepFullMotiveSource,
    a2: Option<A2Engine>,
    rep_full: Mutex<HashMap<ExtDimVector, MotiveExpr>>,
    sst: Mutex<HashMap<ExtDimVector, MotiveExpr>>,
}

impl<'a> MotiveEngine<'a> {
    pub fn new(stability: &'a StabilityEngine<'a>, source: RepFullMotiveSource) -> Result<Self> {
        let a2 = match source {
            RepFullMotiveSource::SymbolicA2 => Some(A2Engine::new(stability.ext())?),
            _ => None,
        };
        Ok(MotiveEngine { stability, source, a2, rep_full: Mutex::default(), sst: Mutex::default() })
    }

    pub fn ext(&self) -> &'a ExtensionData {
        self.stability.ext()
    }

    pub fn stability(&self) -> &'a StabilityEngine<'a> {
        self.stability
    }

    pub fn source(&self) -> &RepFullMotiveSource {
        &self.source
    }

    pub fn a2(&self) -> Option<&A2Engine> {
        self.a2.as_ref()
    }

    /// [Rep^full_v].
    pub fn motive_rep_full(&self, v: &ExtDimVector) -> Result<MotiveExpr> {
        let ext = self.ext();
        ext.check_vector(v)?;
        if let Some(m) = self.rep_full.lock().unwrap().get(v) {
            return Ok(m.clone());
        }
        let m: MotiveExpr = match &self.source {
            RepFullMotiveSource::SymbolicA2 => self.a2.as_ref().expect("engine built").rep_full(v).into(),
            RepFullMotiveSource::InterpolatedAuto { budget } => {
                let bound = expected_dims(ext, v)?.dim_rep_full.max(0) as usize;
                interpolate_rep_full(ext, v, &InterpolationPlan::smallest(bound, *budget))?.into()
            }
            RepFullMotiveSource::Interpolated(plan) => interpolate_rep_full(ext, v, plan)?.into(),
            RepFullMotiveSource::UserTable(table) => table
                .get(v)
                .cloned()
                .ok_or_else(|| Error::Unsupported(format!("no user table entry for [Rep^full] at {v}")))?,
        };
        if !m.is_zero() {
            let dim = expected_dims(ext, v)?.dim_rep_full;
            if m.degree() != Some(dim) {
                return Err(Error::Assumption(format!(
                    "[Rep^full] at {v} has degree {:?}, expected {dim}",
                    m.degree()
                )));
            }
        }
        self.rep_full.lock().unwrap().insert(v.clone(), m.clone());
        Ok(m)
    }

    /// L^{exp} · ∏ [Rep^sst_step] / [P_hn].
    pub fn s_term(&self, hn: &HNType) -> Result<MotiveExpr> {
        let mut acc = MotiveExpr::l_pow(hn_exponent(self.ext(), hn));
        for step in hn.steps() {
            acc = &acc * &self.motive_sst(step)?;
        }
        acc.checked_div(&class_parabolic(hn.steps()))
    }

    /// Class of the HN stratum of type `hn` inside Rep^full: [G] · S_hn.
    pub fn stratum_class(&self, hn: &HNType) -> Result<MotiveExpr> {
        Ok(&class_group(hn.weight()) * &self.s_term(hn)?)
    }

    /// [Rep^sst_v]; zero when v is not a semistable type.
    pub fn motive_sst(&self, v: &ExtDimVector) -> Result<MotiveExpr> {
        if let Some(m) = self.sst.lock().unwrap().get(v) {
            return Ok(m.clone());
        }
        let m = if !self.stability.is_semistable_type(v)? {
            MotiveExpr::zero()
        } else {
            let mut acc = self.motive_rep_full(v)?;
            for hn in self.stability.enumerate_hn_types(v)?.iter() {
                acc = &acc - &self.stratum_class(hn)?;
            }
            acc
        };
        self.sst.lock().unwrap().insert(v.clone(), m.clone());
        Ok(m)
    }

    /// [Rep^full_v] / [PG_v].
    pub fn rep_over_pg(&self, v: &ExtDimVector) -> Result<MotiveExpr> {
        self.motive_rep_full(v)?.checked_div(&class_pg(v))
    }

    /// [Rep^full] − [Rep^sst] − Σ strata; zero exactly when the
    /// stratification identity holds.
    pub fn stratification_defect(&self, v: &ExtDimVector) -> Result<MotiveExpr> {
        let mut acc = &self.motive_rep_full(v)? - &self.motive_sst(v)?;
        for hn in self.stability.enumerate_hn_types(v)?.iter() {
            acc = &acc - &self.stratum_class(hn)?;
        }
        Ok(acc)
    }

    /// Σ_i dim H^i(M^sst_v) L^{i/2} as [Rep^sst_v]/[PG_v], with its checks.
    pub fn poincare_polynomial(&self, v: &ExtDimVector) -> Result<PoincareResult> {
        if !self.stability.is_semistable_type(v)? {
            return Err(Error::Assumption(format!("{v} is not a semistable type")));
        }
        if !self.stability.stable_equals_semistable(v)? {
            return Err(Error::Assumption(format!("stability and semistability differ at {v}")));
        }
        let q = self.motive_sst(v)?.checked_div(&class_pg(v))?;
        let poly = q
            .as_polynomial()
            .ok_or_else(|| Error::Assumption(format!("[Rep^sst]/[PG] at {v} is not a polynomial: {q}")))?;
        let dim_moduli = expected_dims(self.ext(), v)?.dim_moduli;
        if !poly.is_nonnegative() {
            return Err(Error::Assumption(format!("negative coefficient in {poly}")));
        }
        if poly.degree().map(|d| d as i64) != Some(dim_moduli) {
            return Err(Error::Assumption(format!("degree of {poly} differs from dim = {dim_moduli}")));
        }
        if !poly.coeff(0).is_one() {
            return Err(Error::Assumption(format!("constant term of {poly} is not 1")));
        }
        Ok(PoincareResult { polynomial: poly, dim_moduli })
    }
}

/// Exact integer value of a motive at L = q, if it is one.
pub fn integer_value(m: &MotiveExpr, q: i64) -> Result<Option<BigInt>> {
    let x = m.eval_at(q)?;
    Ok(x.is_integer().then(|| x.to_integer()))
}

/// Exact value at L = q as u128 when it is a nonnegative integer in range.
pub fn count_value(m: &MotiveExpr, q: i64) -> Result<Option<u128>> {
    Ok(integer_value(m, q)?.filter(|x| !x.is_negative()).and_then(|x| x.to_u128()))
}
