//! Exhaustive enumeration of points of Rep_{(s,d)}(A[T]) over F_p: point
//! counts, stratification by HN type, and orbit representatives of full points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use super::king::{rref_matrices, KingClass, PointAnalyzer};
use super::rep::{structure_map_system, t_field_matrices, FqRep, QRep};
use crate::error::{Error, Result};
use crate::field::{rank_in_place, FpMatrix, PrimeField};
use crate::grothendieck::gl_poly;
use crate::motive::MotiveEngine;
use crate::quiver::{ExtDimVector, ExtensionData};
use crate::stability::HNType;

/// Default cap on enumerated candidate points.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

fn pow_u128(p: u32, e: usize) -> u128 {
    let mut r: u128 = 1;
    for _ in 0..e {
        r = r.saturating_mul(p as u128);
    }
    r
}

/// The matrix tuples M of dimension d, indexed by a base-p odometer.
struct MSpace {
    shapes: Vec<(usize, usize)>,
    count: u128,
}

impl MSpace {
    fn new(ext: &ExtensionData, v: &ExtDimVector, p: u32) -> Self {
        let shapes: Vec<(usize, usize)> =
            ext.quiver().arrows().iter().map(|a| (v.d.0[a.target], v.d.0[a.source])).collect();
        let entries = shapes.iter().map(|(r, c)| r * c).sum();
        MSpace { count: pow_u128(p, entries), shapes }
    }

    fn decode(&self, ext: &ExtensionData, v: &ExtDimVector, mut idx: u128, p: u32) -> QRep {
        let mut matrices = Vec::with_capacity(self.shapes.len());
        for &(r, c) in &self.shapes {
            let data = (0..r * c)
                .map(|_| {
                    let x = (idx % p as u128) as u32;
                    idx /= p as u128;
                    x
                })
                .collect();
            matrices.push(FpMatrix::from_vec(r, c, data).unwrap());
        }
        QRep::new(ext.quiver(), v.d.clone(), matrices).expect("shapes from the quiver")
    }
}

/// Exact number of candidate points Σ_M p^{dim Hom(T^s, M)}, refusing above `budget`.
pub fn candidate_count(ext: &ExtensionData, v: &ExtDimVector, field: PrimeField, budget: u128) -> Result<u128> {
    ext.check_vector(v)?;
    let ms = MSpace::new(ext, v, field.p());
    if ms.count > budget {
        return Err(Error::BudgetExceeded { needed: ms.count, budget });
    }
    let mut total: u128 = 0;
    for idx in 0..ms.count {
        let m = ms.decode(ext, v, idx, field.p());
        let k = structure_map_system(ext, field, &m, v.s)?.solution_dim();
        total = total.saturating_add(pow_u128(field.p(), k));
        if total > budget {
            return Err(Error::BudgetExceeded { needed: total, budget });
        }
    }
    Ok(total)
}

/// Visits every point over one fixed M; `full_only` skips non-surjective f.
fn visit_over_m<F: FnMut(&FqRep, bool)>(
    ext: &ExtensionData,
    v: &ExtDimVector,
    field: PrimeField,
    m: QRep,
    full_only: bool,
    visit: &mut F,
) -> Result<()> {
    let sys = structure_map_system(ext, field, &m, v.s)?;
    let basis = sys.solution_basis();
    let n = sys.num_unknowns();
    let t = ext.t();
    let shapes: Vec<(usize, usize)> = (0..t.len()).map(|i| (v.d.0[i], t.0[i] * v.s)).collect();
    let offsets: Vec<usize> = (0..t.len()).map(|i| sys.offset(i)).collect();
    let mut rep = FqRep {
        base: m,
        s: v.s,
        f: shapes.iter().map(|&(r, c)| FpMatrix::zeros(r, c)).collect(),
    };
    let p = field.p();
    let mut vec = vec![0u32; n];
    let mut digits = vec![0u32; basis.len()];
    let mut scratch: Vec<u32> = Vec::new();
    loop {
        let mut full = true;
        for (i, &(r, c)) in shapes.iter().enumerate() {
            let slice = &vec[offsets[i]..offsets[i] + r * c];
            if r > 0 {
                scratch.clear();
                scratch.extend_from_slice(slice);
                if rank_in_place(&mut scratch, r, c, field) < r {
                    full = false;
                    if full_only {
                        break;
                    }
                }
            }
        }
        if full || !full_only {
            for (i, &(r, c)) in shapes.iter().enumerate() {
                rep.f[i].data_mut().copy_from_slice(&vec[offsets[i]..offsets[i] + r * c]);
            }
            visit(&rep, full);
        }
        // Odometer step: adding basis[k] once per digit increment, with wrap
        // contributing the p-th addition that returns the digit to zero.
        let mut k = 0;
        loop {
            if k == basis.len() {
                return Ok(());
            }
            for (x, y) in vec.iter_mut().zip(&basis[k]) {
                if *y != 0 {
                    *x = field.add(*x, *y);
                }
            }
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Calls `visit(point, is_full)` for every point of Rep_{(s,d)}(A[T]) over
/// F_p (only full points if `full_only`), M first, then f in the solution space.
pub fn for_each_point<F: FnMut(&FqRep, bool)>(
    ext: &ExtensionData,
    v: &ExtDimVector,
    field: PrimeField,
    budget: u128,
    full_only: bool,
    mut visit: F,
) -> Result<()> {
    candidate_count(ext, v, field, budget)?;
    let ms = MSpace::new(ext, v, field.p());
    for idx in 0..ms.count {
        let m = ms.decode(ext, v, idx, field.p());
        visit_over_m(ext, v, field, m, full_only, &mut visit)?;
    }
    Ok(())
}

/// Exact number of full points over F_p.
pub fn count_rep_full_points(ext: &ExtensionData, v: &ExtDimVector, field: PrimeField, budget: u128) -> Result<u128> {
    candidate_count(ext, v, field, budget)?;
    let ms = MSpace::new(ext, v, field.p());
    let indices: Vec<u128> = (0..ms.count).collect();
    indices
        .par_iter()
        .map(|&idx| {
            let m = ms.decode(ext, v, idx, field.p());
            let mut n: u128 = 0;
            visit_over_m(ext, v, field, m, true, &mut |_, _| n += 1)?;
            Ok(n)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Point counts by HN type, with the pointwise consistency checks between the
/// King criterion, HN filtrations and surjectivity of f.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CensusCounts {
    /// All points visited (full and, if requested, non-full).
    pub points: u128,
    pub full: u128,
    /// Full points by HN type.
    pub by_type: BTreeMap<HNType, u128>,
    /// Non-full points by HN type (only when all points are enumerated).
    pub by_type_nonfull: BTreeMap<HNType, u128>,
    pub king_semistable: u128,
    pub king_stable: u128,
    /// King semistable but HN type of length > 1, or the converse.
    pub king_hn_disagreements: u128,
    /// King-semistable points whose f is not surjective.
    pub semistable_not_full: u128,
    /// Points where "f surjective" and "last HN slope ≠ 0" disagree.
    pub surjectivity_hn_disagreements: u128,
}

impl CensusCounts {
    fn merge(mut self, o: CensusCounts) -> CensusCounts {
        self.points += o.points;
        self.full += o.full;
        for (k, v) in o.by_type {
            *self.by_type.entry(k).or_default() += v;
        }
        for (k, v) in o.by_type_nonfull {
            *self.by_type_nonfull.entry(k).or_default() += v;
        }
        self.king_semistable += o.king_semistable;
        self.king_stable += o.king_stable;
        self.king_hn_disagreements += o.king_hn_disagreements;
        self.semistable_not_full += o.semistable_not_full;
        self.surjectivity_hn_disagreements += o.surjectivity_hn_disagreements;
        self
    }

    /// Number of points of the semistable stratum (single-step HN type).
    pub fn semistable_count(&self, v: &ExtDimVector) -> u128 {
        HNType::single(v.clone()).ok().and_then(|h| self.by_type.get(&h).copied()).unwrap_or(0)
    }
}

/// Enumerates points and classifies each one; with `full_only = false` the
/// non-full points are classified too.
pub fn census_counts(
    ext: &ExtensionData,
    v: &ExtDimVector,
    field: PrimeField,
    budget: u128,
    full_only: bool,
) -> Result<CensusCounts> {
    if v.s == 0 {
        return Err(Error::Assumption("census needs s >= 1".into()));
    }
    candidate_count(ext, v, field, budget)?;
    let ms = MSpace::new(ext, v, field.p());
    let indices: Vec<u128> = (0..ms.count).collect();
    indices
        .par_iter()
        .map(|&idx| -> Result<CensusCounts> {
            let m = ms.decode(ext, v, idx, field.p());
            let mut analyzer = PointAnalyzer::new(ext, v.s, field, budget)?;
            let mut c = CensusCounts::default();
            let mut err = None;
            visit_over_m(ext, v, field, m, full_only, &mut |rep, full| {
                if err.is_some() {
                    return;
                }
                c.points += 1;
                let table = analyzer.table(rep);
                let king = analyzer.king(rep, &table);
                let hn = match analyzer.hn(rep, &table) {
                    Ok(h) => h.hn,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                };
                if king.is_semistable() {
                    c.king_semistable += 1;
                    if !full {
                        c.semistable_not_full += 1;
                    }
                }
                if king == KingClass::Stable {
                    c.king_stable += 1;
                }
                if king.is_semistable() != (hn.len() == 1) {
                    c.king_hn_disagreements += 1;
                }
                let last_nonzero = hn.steps().last().unwrap().s != 0;
                if full != last_nonzero {
                    c.surjectivity_hn_disagreements += 1;
                }
                if full {
                    c.full += 1;
                    *c.by_type.entry(hn).or_default() += 1;
                } else {
                    *c.by_type_nonfull.entry(hn).or_default() += 1;
                }
            })?;
            match err {
                Some(e) => Err(e),
                None => Ok(c),
            }
        })
        .try_reduce(CensusCounts::default, |a, b| Ok(a.merge(b)))
}

/// Observed against predicted count for one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumLine {
    pub hn: HNType,
    pub observed: u128,
    pub predicted: BigRational,
}

impl StratumLine {
    pub fn matches(&self) -> bool {
        self.predicted == BigRational::from_integer(BigInt::from(self.observed))
    }
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub prime: u32,
    pub counts: CensusCounts,
    /// One line per predicted or observed stratum, semistable stratum first.
    pub lines: Vec<StratumLine>,
    pub full_predicted: BigRational,
}

impl CensusReport {
    pub fn all_match(&self) -> bool {
        self.lines.iter().all(|l| l.matches())
            && self.full_predicted == BigRational::from_integer(BigInt::from(self.counts.full))
            && self.counts.king_hn_disagreements == 0
            && self.counts.semistable_not_full == 0
            && self.counts.surjectivity_hn_disagreements == 0
    }
}

/// Partitions all full points by HN type and compares each stratum with the
/// value of its predicted class at L = p.
pub fn stratum_census(engine: &MotiveEngine<'_>, v: &ExtDimVector, field: PrimeField, budget: u128) -> Result<CensusReport> {
    let ext = engine.ext();
    let counts = census_counts(ext, v, field, budget, true)?;
    let q = field.p() as i64;
    let single = HNType::single(v.clone())?;
    let mut lines = vec![StratumLine {
        hn: single.clone(),
        observed: counts.by_type.get(&single).copied().unwrap_or(0),
        predicted: engine.motive_sst(v)?.eval_at(q)?,
    }];
    let predicted_types = engine.stability().enumerate_hn_types(v)?;
    for hn in predicted_types.iter() {
        lines.push(StratumLine {
            hn: hn.clone(),
            observed: counts.by_type.get(hn).copied().unwrap_or(0),
            predicted: engine.stratum_class(hn)?.eval_at(q)?,
        });
    }
    for (hn, &n) in &counts.by_type {
        if hn != &single && !predicted_types.contains(hn) {
            lines.push(StratumLine { hn: hn.clone(), observed: n, predicted: BigRational::from_integer(0.into()) });
        }
    }
    let full_predicted = engine.motive_rep_full(v)?.eval_at(q)?;
    Ok(CensusReport { prime: field.p(), counts, lines, full_predicted })
}

/// Visits one representative of each G_d-orbit of full points: f_i in reduced
/// row echelon form, M forced by M_α f_i = f_j (T_α ⊗ I). Returns the number
/// of representatives; each orbit has ∏|GL_{d_i}(F_p)| points.
pub fn for_each_full_orbit_rep<F: FnMut(&FqRep)>(
    ext: &ExtensionData,
    v: &ExtDimVector,
    field: PrimeField,
    budget: u128,
    mut visit: F,
) -> Result<u128> {
    ext.check_vector(v)?;
    let t = ext.t();
    let p = field.p();
    let x = BigInt::from(p);
    let mut total: u128 = 1;
    for i in 0..t.len() {
        let c = crate::grothendieck::gaussian_binomial(t.0[i] * v.s, v.d.0[i]).eval(&x).to_u128().unwrap_or(u128::MAX);
        total = total.saturating_mul(c);
    }
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    let choices: Vec<Vec<FpMatrix>> = (0..t.len()).map(|i| rref_matrices(v.d.0[i], t.0[i] * v.s, field)).collect();
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(0);
    }
    let pivots: Vec<Vec<Vec<usize>>> = choices.iter().map(|cs| cs.iter().map(|m| m.rref(field).1).collect()).collect();
    let big: Vec<FpMatrix> = t_field_matrices(ext, field)?.iter().map(|m| m.kron_identity(v.s)).collect();
    let q = ext.quiver();
    let mut idx = vec![0usize; t.len()];
    let mut valid: u128 = 0;
    loop {
        let f: Vec<FpMatrix> = idx.iter().enumerate().map(|(i, &k)| choices[i][k].clone()).collect();
        let mut mats = Vec::with_capacity(q.arrows().len());
        let mut ok = true;
        for (k, a) in q.arrows().iter().enumerate() {
            let image = f[a.target].mul(&big[k], field)?;
            let m = image.select_columns(&pivots[a.source][idx[a.source]]);
            if m.mul(&f[a.source], field)? != image {
                ok = false;
                break;
            }
            mats.push(m);
        }
        if ok {
            valid += 1;
            let rep = FqRep { base: QRep::new(q, v.d.clone(), mats)?, s: v.s, f };
            visit(&rep);
        }
        let Some(pos) = (0..idx.len()).rev().find(|&i| idx[i] + 1 < choices[i].len()) else { break };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|x| *x = 0);
    }
    Ok(valid)
}

/// |G_d(F_p)| = ∏ |GL_{d_i}(F_p)|.
pub fn group_order_q(v: &ExtDimVector, p: u32) -> BigInt {
    let x = BigInt::from(p);
    v.d.0.iter().fold(BigInt::one(), |acc, &d| acc * gl_poly(d).eval(&x))
}

/// Full-point count via orbit representatives.
pub fn count_full_points_by_orbits(ext: &ExtensionData, v: &ExtDimVector, field: PrimeField, budget: u128) -> Result<BigInt> {
    let reps = for_each_full_orbit_rep(ext, v, field, budget, |_| {})?;
    Ok(BigInt::from(reps) * group_order_q(v, field.p()))
}

/// Stratum counts of full points computed from orbit representatives, each
/// weighted by |G_d(F_p)|. The HN type and King class are G_d-invariant.
pub fn orbit_census(ext: &ExtensionData, v: &ExtDimVector, field: PrimeField, budget: u128) -> Result<CensusCounts> {
    if v.s == 0 {
        return Err(Error::Assumption("census needs s >= 1".into()));
    }
    let weight = group_order_q(v, field.p()).to_u128().ok_or(Error::BudgetExceeded { needed: u128::MAX, budget })?;
    let mut analyzer = PointAnalyzer::new(ext, v.s, field, budget)?;
    let mut c = CensusCounts::default();
    let mut err = None;
    for_each_full_orbit_rep(ext, v, field, budget, |rep| {
        if err.is_some() {
            return;
        }
        let table = analyzer.table(rep);
        let king = analyzer.king(rep, &table);
        match analyzer.hn(rep, &table) {
            Ok(h) => {
                if king.is_semistable() != (h.hn.len() == 1) {
                    c.king_hn_disagreements += weight;
                }
                if h.hn.steps().last().unwrap().s == 0 {
                    c.surjectivity_hn_disagreements += weight;
                }
                *c.by_type.entry(h.hn).or_default() += weight;
            }
            Err(e) => err = Some(e),
        }
        c.points += weight;
        c.full += weight;
        if king.is_semistable() {
            c.king_semistable += weight;
        }
        if king == KingClass::Stable {
            c.king_stable += weight;
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(c),
    }
}

/// Whether some full point over F_p is King-semistable.
pub fn semistable_point_exists(ext: &ExtensionData, v: &ExtDimVector, field: PrimeField, budget: u128) -> Result<bool> {
    if v.s == 0 {
        return Ok(false);
    }
    let mut analyzer = PointAnalyzer::new(ext, v.s, field, budget)?;
    let mut found = false;
    for_each_full_orbit_rep(ext, v, field, budget, |rep| {
        if !found {
            let table = analyzer.table(rep);
            found = analyzer.king(rep, &table).is_semistable();
        }
    })?;
    Ok(found)
}
