//! Stratification identity, census identity on further vectors and
//! extensions, and HN enumeration against a naive search.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{probe, running, v};
use qmod::motive::{MotiveEngine, RepFullMotiveSource};
use qmod::oracle::{stratum_census, ProbeGamma};
use qmod::quiver::{expected_dims, slope_cmp};
use qmod::stability::StabilityEngine;
use qmod::{DimVector, ExtDimVector, ExtensionData, HNType, IntMatrix, PrimeField, Quiver};

fn a2_ext(t: [usize; 2], data: Vec<i64>) -> ExtensionData {
    let q = Quiver::new(&["1", "2"], &[("m", "1", "2")]).unwrap();
    let mut map = BTreeMap::new();
    map.insert("m".to_string(), IntMatrix::new(t[1], t[0], data).unwrap());
    ExtensionData::new(q, DimVector(t.to_vec()), Some(map), true, true).unwrap()
}

fn vectors(max_s: usize, max_d: usize) -> Vec<ExtDimVector> {
    let mut out = Vec::new();
    for s in 1..=max_s {
        for d1 in 0..=max_d {
            for d2 in 0..=max_d {
                out.push(v(s, &[d1, d2]));
            }
        }
    }
    out
}

#[test]
fn stratification_identity_holds_symbolically() {
    for ext in [running(), a2_ext([2, 2], vec![1, 0, 0, 1]), a2_ext([1, 2], vec![1, 0])] {
        let g = probe(&ext);
        let st = StabilityEngine::new(&ext, &g).unwrap();
        let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).unwrap();
        for vv in vectors(3, 6) {
            assert!(me.stratification_defect(&vv).unwrap().is_zero(), "{vv}");
            let sst = me.motive_sst(&vv).unwrap();
            if !sst.is_zero() {
                let dim = expected_dims(&ext, &vv).unwrap().dim_rep_full;
                assert_eq!(sst.degree(), Some(dim), "{vv}");
            }
        }
    }
}

#[test]
fn census_identity_small_vectors() {
    let cases: Vec<(ExtensionData, u64, Vec<ExtDimVector>)> = vec![
        (running(), 2, vec![v(1, &[2, 0]), v(1, &[3, 1]), v(2, &[3, 1]), v(2, &[2, 1]), v(2, &[2, 2])]),
        (running(), 3, vec![v(1, &[2, 1]), v(2, &[2, 1]), v(1, &[3, 1])]),
        (a2_ext([2, 2], vec![1, 0, 0, 1]), 2, vec![v(1, &[2, 1]), v(2, &[3, 2]), v(2, &[2, 2])]),
        (a2_ext([1, 2], vec![1, 0]), 2, vec![v(2, &[1, 2]), v(2, &[2, 3]), v(3, &[2, 3])]),
    ];
    for (ext, p, vs) in cases {
        let g = probe(&ext);
        let st = StabilityEngine::new(&ext, &g).unwrap();
        let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).unwrap();
        for vv in vs {
            let r = stratum_census(&me, &vv, PrimeField::new(p).unwrap(), 1 << 26).unwrap();
            assert!(r.all_match(), "{vv} p={p}: {:?}", r.lines);
        }
    }
}

#[test]
fn poincare_polynomials_where_defined() {
    let ext = running();
    let g = probe(&ext);
    let st = StabilityEngine::new(&ext, &g).unwrap();
    let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).unwrap();
    assert!(me.poincare_polynomial(&v(1, &[3, 1])).unwrap().polynomial.is_one());
    let mut computed = 0;
    for vv in vectors(3, 7) {
        if !st.is_semistable_type(&vv).unwrap() || !st.stable_equals_semistable(&vv).unwrap() {
            assert!(me.poincare_polynomial(&vv).is_err());
            continue;
        }
        let p = me.poincare_polynomial(&vv).unwrap();
        assert!(p.polynomial.is_nonnegative(), "{vv}");
        computed += 1;
    }
    assert!(computed > 5);
}

/// All chains of nonzero vectors with strictly decreasing slopes, semistable
/// steps and nonzero last s, by brute force over all decompositions.
fn naive_types(st: &StabilityEngine<'_>, v: &ExtDimVector) -> BTreeSet<HNType> {
    fn rec(st: &StabilityEngine<'_>, rest: &ExtDimVector, prefix: &mut Vec<ExtDimVector>, out: &mut BTreeSet<HNType>) {
        if rest.is_zero() {
            if prefix.len() > 1 && prefix.last().unwrap().s != 0 {
                out.insert(HNType::new(prefix.clone()).unwrap());
            }
            return;
        }
        for s in 0..=rest.s {
            for d1 in 0..=rest.d.0[0] {
                for d2 in 0..=rest.d.0[1] {
                    let w = ExtDimVector::new(s, vec![d1, d2]);
                    if w.is_zero() {
                        continue;
                    }
                    if prefix.last().is_some_and(|p| slope_cmp(&w, p) != std::cmp::Ordering::Less) {
                        continue;
                    }
                    if !st.is_semistable_type(&w).unwrap() {
                        continue;
                    }
                    prefix.push(w.clone());
                    rec(st, &rest.checked_sub(&w).unwrap(), prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(st, v, &mut Vec::new(), &mut out);
    out
}

#[test]
fn hn_types_match_naive_search() {
    for ext in [running(), a2_ext([2, 2], vec![1, 0, 0, 1])] {
        let g: ProbeGamma = probe(&ext);
        let st = StabilityEngine::new(&ext, &g).unwrap();
        for vv in vectors(3, 5) {
            let fast: BTreeSet<HNType> = st.enumerate_hn_types(&vv).unwrap().iter().cloned().collect();
            assert_eq!(fast, naive_types(&st, &vv), "{vv}");
        }
    }
}
