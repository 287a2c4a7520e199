//! Subspace lattices of the extension vertex, King-type (semi)stability of
//! explicit points and their Harder–Narasimhan filtrations.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::rep::FqRep;
use crate::error::{Error, Result};
use crate::field::{rank_in_place, FpMatrix, PrimeField};
use crate::grothendieck::gaussian_binomial;
use crate::quiver::{slope_cmp, DimVector, ExtDimVector, ExtensionData};
use crate::stability::HNType;
use std::cmp::Ordering;

/// All subspaces of F_p^s as RREF row bases, ordered by dimension.
pub struct SubspaceLattice {
    s: usize,
    field: PrimeField,
    bases: Vec<FpMatrix>,
    supersets: Option<Vec<Vec<usize>>>,
}

const SUPERSET_TABLE_LIMIT: usize = 512;

/// Number of subspaces of F_p^s.
pub fn subspace_count(s: usize, p: u32) -> u128 {
    let x = BigInt::from(p);
    (0..=s).map(|k| gaussian_binomial(s, k).eval(&x)).sum::<BigInt>().to_u128().unwrap_or(u128::MAX)
}

impl SubspaceLattice {
    pub fn new(s: usize, field: PrimeField, budget: u128) -> Result<Self> {
        let count = subspace_count(s, field.p());
        if count > budget {
            return Err(Error::BudgetExceeded { needed: count, budget });
        }
        let mut bases = Vec::with_capacity(count as usize);
        for k in 0..=s {
            bases.extend(rref_matrices(k, s, field));
        }
        let mut lat = SubspaceLattice { s, field, bases, supersets: None };
        if lat.bases.len() <= SUPERSET_TABLE_LIMIT {
            let n = lat.bases.len();
            let table = (0..n)
                .map(|a| (0..n).filter(|&b| lat.dim(b) > lat.dim(a) && lat.contains(b, a)).collect())
                .collect();
            lat.supersets = Some(table);
        }
        Ok(lat)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis(&self, idx: usize) -> &FpMatrix {
        &self.bases[idx]
    }

    pub fn dim(&self, idx: usize) -> usize {
        self.bases[idx].rows()
    }

    /// Index of the whole space.
    pub fn full(&self) -> usize {
        self.bases.len() - 1
    }

    /// Whether subspace `big` contains subspace `small`.
    pub fn contains(&self, big: usize, small: usize) -> bool {
        let (b, sm) = (&self.bases[big], &self.bases[small]);
        if sm.rows() == 0 {
            return true;
        }
        let stacked = FpMatrix::vstack(&[b, sm]).unwrap();
        stacked.rank(self.field) == b.rows()
    }

    /// Strict supersets of `idx`.
    pub fn strict_supersets(&self, idx: usize) -> Vec<usize> {
        match &self.supersets {
            Some(t) => t[idx].clone(),
            None => (0..self.len()).filter(|&b| self.dim(b) > self.dim(idx) && self.contains(b, idx)).collect(),
        }
    }
}

/// All k × n matrices in reduced row echelon form with k pivots, i.e. the
/// k-dimensional subspaces of F_p^n.
pub fn rref_matrices(k: usize, n: usize, field: PrimeField) -> Vec<FpMatrix> {
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        let mut free = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut m = FpMatrix::zeros(k, n);
            for (r, &pc) in pivots.iter().enumerate() {
                m.set(r, pc, 1);
            }
            for (&(r, c), &x) in free.iter().zip(&digits) {
                m.set(r, c, x);
            }
            out.push(m);
            let Some(pos) = digits.iter().position(|&x| x + 1 < field.p()) else { break };
            digits[pos] += 1;
            digits[..pos].iter_mut().for_each(|x| *x = 0);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Dimension vector of the subobject generated by W: the span of the images
/// of T_i ⊗ W under f_i, for each vertex i.
pub fn generated_dims(rep: &FqRep, t: &[usize], w: &FpMatrix, field: PrimeField, scratch: &mut Vec<u32>) -> Vec<usize> {
    let k = w.rows();
    let s = rep.s;
    let p = field.p() as u64;
    let mut out = Vec::with_capacity(t.len());
    for (i, fi) in rep.f.iter().enumerate() {
        let d = fi.rows();
        let cols = t[i] * k;
        if d == 0 || cols == 0 {
            out.push(0);
            continue;
        }
        scratch.clear();
        scratch.resize(d * cols, 0);
        let fd = fi.data();
        let fc = fi.cols();
        for r in 0..d {
            for l in 0..t[i] {
                for j in 0..k {
                    let mut acc = 0u64;
                    for x in 0..s {
                        acc += fd[r * fc + l * s + x] as u64 * w.get(j, x) as u64;
                    }
                    scratch[r * cols + l * k + j] = (acc % p) as u32;
                }
            }
        }
        out.push(rank_in_place(scratch, d, cols, field));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KingClass {
    Stable,
    SemistableNotStable,
    Unstable,
}

impl KingClass {
    pub fn is_semistable(self) -> bool {
        !matches!(self, KingClass::Unstable)
    }
}

/// Reusable per-(s, p) state for classifying many points.
pub struct PointAnalyzer<'a> {
    pub lattice: SubspaceLattice,
    t: Vec<usize>,
    field: PrimeField,
    scratch: Vec<u32>,
    _ext: &'a ExtensionData,
}

/// HN filtration of a point: the type, plus for each step the subspace of
/// the extension vertex reached and the generated dimension vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnFiltration {
    pub hn: HNType,
    pub subspaces: Vec<FpMatrix>,
    pub generated: Vec<DimVector>,
}

impl<'a> PointAnalyzer<'a> {
    pub fn new(ext: &'a ExtensionData, s: usize, field: PrimeField, budget: u128) -> Result<Self> {
        Ok(PointAnalyzer {
            lattice: SubspaceLattice::new(s, field, budget)?,
            t: ext.t().0.clone(),
            field,
            scratch: Vec::new(),
            _ext: ext,
        })
    }

    /// Generated dimension vectors for every subspace, indexed like the lattice.
    pub fn table(&mut self, rep: &FqRep) -> Vec<Vec<usize>> {
        (0..self.lattice.len())
            .map(|idx| generated_dims(rep, &self.t, self.lattice.basis(idx), self.field, &mut self.scratch))
            .collect()
    }

    /// Compares every subobject (W, W̄) against the whole, skipping W = 0 and
    /// the whole object itself.
    pub fn king(&self, rep: &FqRep, table: &[Vec<usize>]) -> KingClass {
        let s = rep.s;
        let total: usize = rep.base.dims.total();
        let mut strict = true;
        for idx in 1..self.lattice.len() {
            let w = self.lattice.dim(idx);
            let u: usize = table[idx].iter().sum();
            if idx == self.lattice.full() && table[idx] == rep.base.dims.0 {
                continue;
            }
            match ((w * (s + total)) as u128).cmp(&((s * (w + u)) as u128)) {
                Ordering::Greater => return KingClass::Unstable,
                Ordering::Equal => strict = false,
                Ordering::Less => {}
            }
        }
        if strict {
            KingClass::Stable
        } else {
            KingClass::SemistableNotStable
        }
    }

    /// Walks the HN filtration: repeatedly the (slope, dimension)-maximal
    /// generated subobject of the quotient, then a final slope-0 step if the
    /// whole extension space does not generate M.
    pub fn hn(&self, rep: &FqRep, table: &[Vec<usize>]) -> Result<HnFiltration> {
        let d = &rep.base.dims.0;
        let mut cur = 0usize;
        let mut cur_u = vec![0usize; d.len()];
        let mut steps = Vec::new();
        let mut subspaces = Vec::new();
        let mut generated = Vec::new();
        while self.lattice.dim(cur) < rep.s {
            let mut best: Option<(usize, ExtDimVector)> = None;
            for idx in self.lattice.strict_supersets(cur) {
                let step = ExtDimVector::new(
                    self.lattice.dim(idx) - self.lattice.dim(cur),
                    table[idx].iter().zip(&cur_u).map(|(a, b)| a - b).collect(),
                );
                let better = match &best {
                    None => true,
                    Some((_, b)) => match slope_cmp(&step, b) {
                        Ordering::Greater => true,
                        Ordering::Equal => step.total() > b.total(),
                        Ordering::Less => false,
                    },
                };
                if better {
                    best = Some((idx, step));
                }
            }
            let (idx, step) = best.expect("a strict superset exists below the whole space");
            cur = idx;
            cur_u = table[idx].clone();
            steps.push(step);
            subspaces.push(self.lattice.basis(idx).clone());
            generated.push(DimVector(cur_u.clone()));
        }
        if &cur_u != d {
            steps.push(ExtDimVector::new(0, d.iter().zip(&cur_u).map(|(a, b)| a - b).collect()));
            subspaces.push(self.lattice.basis(cur).clone());
            generated.push(rep.base.dims.clone());
        }
        Ok(HnFiltration { hn: HNType::new(steps)?, subspaces, generated })
    }
}

/// King-type classification of one point.
pub fn king_check(ext: &ExtensionData, field: PrimeField, rep: &FqRep, budget: u128) -> Result<KingClass> {
    if rep.s == 0 {
        return Err(Error::Assumption("stability check needs s >= 1".into()));
    }
    let mut a = PointAnalyzer::new(ext, rep.s, field, budget)?;
    let table = a.table(rep);
    Ok(a.king(rep, &table))
}

/// HN filtration of one point.
pub fn hn_filtration_point(ext: &ExtensionData, field: PrimeField, rep: &FqRep, budget: u128) -> Result<HnFiltration> {
    let mut a = PointAnalyzer::new(ext, rep.s, field, budget)?;
    let table = a.table(rep);
    a.hn(rep, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::rep::QRep;
    use crate::quiver::{IntMatrix, Quiver};
    use std::collections::BTreeMap;

    fn running() -> ExtensionData {
        let q = Quiver::new(&["1", "2"], &[("m", "1", "2")]).unwrap();
        let mut map = BTreeMap::new();
        map.insert("m".to_string(), IntMatrix::new(1, 3, vec![1, 0, 0]).unwrap());
        ExtensionData::new(q, DimVector(vec![3, 1]), Some(map), true, true).unwrap()
    }

    #[test]
    fn lattice_sizes() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(SubspaceLattice::new(2, f2, 100).unwrap().len(), 5);
        assert_eq!(SubspaceLattice::new(3, f2, 100).unwrap().len(), 16);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(SubspaceLattice::new(3, f3, 100).unwrap().len(), 28);
        assert!(SubspaceLattice::new(3, f3, 10).is_err());
        let lat = SubspaceLattice::new(3, f2, 100).unwrap();
        // Each line lies in 3 planes of F_2^3, plus the whole space.
        let line = (0..lat.len()).find(|&i| lat.dim(i) == 1).unwrap();
        assert_eq!(lat.strict_supersets(line).len(), 4);
        assert_eq!(lat.strict_supersets(0).len(), 15);
    }

    #[test]
    fn isomorphism_onto_t_is_stable() {
        let e = running();
        let f = PrimeField::new(5).unwrap();
        let base = QRep::new(e.quiver(), DimVector(vec![3, 1]), vec![FpMatrix::from_rows_i64(f, &[vec![1, 0, 0]]).unwrap()]).unwrap();
        let rep = FqRep::new(&e, f, base, 1, vec![FpMatrix::identity(3), FpMatrix::identity(1)]).unwrap();
        assert_eq!(king_check(&e, f, &rep, 1000).unwrap(), KingClass::Stable);
    }

    #[test]
    fn zero_structure_map_is_unstable_with_two_step_type() {
        let e = running();
        let f = PrimeField::new(2).unwrap();
        let rep = FqRep {
            base: QRep::zero(e.quiver(), DimVector(vec![1, 0])),
            s: 1,
            f: vec![FpMatrix::zeros(1, 3), FpMatrix::zeros(0, 1)],
        };
        assert_eq!(king_check(&e, f, &rep, 1000).unwrap(), KingClass::Unstable);
        let h = hn_filtration_point(&e, f, &rep, 1000).unwrap();
        assert_eq!(h.hn.to_string(), "(1|0,0) > (0|1,0)");
    }
}
