//! The `check` invariant suite.

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use qmod::motive::{A2Engine, MotiveEngine, RepFullMotiveSource};
use qmod::oracle::census::candidate_count;
use qmod::oracle::rep::{random_full_point, random_point};
use qmod::oracle::{
    end_trivial_check, euler_identity, evaluate_relations, ext2_dim, hom_formula_check, jacobian_check, rigidity_check,
    stratum_census, FqRep,
};
use qmod::quiver::build_extended_quiver;
use qmod::semiinv::{verify_weight, Family};
use qmod::stability::{GammaOracle, StabilityEngine};
use qmod::{ExtDimVector, ExtensionData, PrimeField};

pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

type Outcome = std::result::Result<String, String>;

fn e2s(e: qmod::Error) -> String {
    e.to_string()
}

/// Vectors with s ≤ 2, d ≤ s·t and |d| ≤ 4.
fn default_vectors(ext: &ExtensionData) -> Vec<ExtDimVector> {
    let t = ext.t().entries().to_vec();
    let mut out = Vec::new();
    for s in 1..=2usize {
        let bounds: Vec<usize> = t.iter().map(|&x| (x * s).min(4)).collect();
        let mut cur = vec![0usize; t.len()];
        loop {
            if cur.iter().sum::<usize>() <= 4 {
                out.push(ExtDimVector::new(s, cur.clone()));
            }
            let Some(k) = (0..cur.len()).rev().find(|&k| cur[k] < bounds[k]) else { break };
            cur[k] += 1;
            cur[k + 1..].iter_mut().for_each(|x| *x = 0);
        }
    }
    out
}

fn samples(ext: &ExtensionData, vs: &[ExtDimVector], field: PrimeField, seed: u64, full: bool) -> Result<Vec<FqRep>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for v in vs {
        for _ in 0..3 {
            let p = if full {
                random_full_point(ext, v, field, &mut rng, 30).map_err(e2s)?
            } else {
                Some(random_point(ext, v, field, &mut rng).map_err(e2s)?)
            };
            out.extend(p);
        }
    }
    Ok(out)
}

pub fn run_suite(
    ext: &ExtensionData,
    cfg: &Config,
    gamma: &dyn GammaOracle,
    dim: Option<&str>,
    prime: u64,
    seed: u64,
    budget: u128,
) -> Result<Vec<CheckResult>> {
    let field = PrimeField::new(prime)?;
    let vs = match dim {
        Some(d) => {
            let v = ExtDimVector::parse(d)?;
            ext.check_vector(&v)?;
            vec![v]
        }
        None => default_vectors(ext),
    };
    let mut out = Vec::new();
    let mut record = |name: &str, o: Outcome| {
        let (ok, detail) = match o {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        out.push(CheckResult { name: name.to_string(), ok, detail });
    };
    if ext.t_matrices().is_none() {
        record("explicit-t", Ok("skipped: no matrices for T, sampled checks need them".into()));
        return Ok(out);
    }

    record("rigidity", {
        let r = rigidity_check(ext, field)?;
        match (r, ext.assume_rigid()) {
            (true, _) => Ok(format!("Ext(T,T) = 0 over F_{prime}")),
            (false, true) => Err(format!("rigidity asserted but Ext(T,T) ≠ 0 over F_{prime}")),
            (false, false) => Err("T is not rigid".into()),
        }
    });
    record("end-trivial", {
        let r = end_trivial_check(ext, field)?;
        match (r, ext.assume_end_trivial()) {
            (false, true) => Err("End(T) = k asserted but fails".into()),
            (r, _) => Ok(format!("End(T) = k: {r}")),
        }
    });

    let xq = build_extended_quiver(ext)?;
    let points = samples(ext, &vs, field, seed, false);
    let full = samples(ext, &vs, field, seed ^ 1, true);
    record("relations", (|| {
        let pts = points.clone()?;
        for p in &pts {
            let rel = evaluate_relations(&xq, &p.extended_matrices(&xq, ext), field).map_err(e2s)?;
            if rel.iter().any(|m| !m.is_zero()) {
                return Err(format!("relations fail at a point of {}", p.dim()));
            }
        }
        Ok(format!("{} points", pts.len()))
    })());
    record("euler-identity", (|| {
        let pts = points.clone()?;
        let mut n = 0;
        for a in pts.iter().step_by(2) {
            for b in pts.iter().step_by(5) {
                let c = euler_identity(ext, field, a, b).map_err(e2s)?;
                if !c.holds() {
                    return Err(format!("{} vs {}: {c:?}", a.dim(), b.dim()));
                }
                n += 1;
            }
        }
        Ok(format!("{n} pairs"))
    })());
    record("ext2-vanishing", (|| {
        let pts = full.clone()?;
        let mut n = 0;
        for a in pts.iter().step_by(2) {
            for b in pts.iter().step_by(3) {
                let e = ext2_dim(ext, field, a, b).map_err(e2s)?;
                if e != 0 {
                    return Err(format!("Ext² = {e} between {} and {}", a.dim(), b.dim()));
                }
                n += 1;
            }
        }
        Ok(format!("{n} pairs of full points"))
    })());
    record("tangent-space", (|| {
        let pts = full.clone()?;
        for p in &pts {
            if !jacobian_check(ext, field, p).map_err(e2s)? {
                return Err(format!("tangent dimension formula fails at a point of {}", p.dim()));
            }
        }
        Ok(format!("{} full points", pts.len()))
    })());
    record("hom-formula", (|| {
        for v in &vs {
            if !hom_formula_check(ext, v, field, 3, seed).map_err(e2s)? {
                return Err(format!("fails at {v}"));
            }
        }
        Ok(format!("{} vectors", vs.len()))
    })());

    let st = StabilityEngine::new(ext, gamma);
    record("hn-types", (|| {
        let st = st.as_ref().map_err(|e| e.to_string())?;
        let mut n = 0;
        for v in &vs {
            for hn in st.enumerate_hn_types(v).map_err(e2s)?.iter() {
                if hn.weight() != v || hn.steps().last().unwrap().s == 0 {
                    return Err(format!("malformed type {hn} for {v}"));
                }
                for step in hn.steps() {
                    if !st.is_semistable_type(step).map_err(e2s)? {
                        return Err(format!("{hn}: step {step} not semistable"));
                    }
                }
                n += 1;
            }
        }
        Ok(format!("{n} types over {} vectors", vs.len()))
    })());

    if A2Engine::new(ext).is_err() {
        record("motives", Ok("skipped: symbolic engine needs a one-arrow quiver".into()));
    } else {
        record("motives", (|| {
            let st = st.as_ref().map_err(|e| e.to_string())?;
            let me = MotiveEngine::new(st, RepFullMotiveSource::SymbolicA2).map_err(e2s)?;
            let mut poincare = 0;
            for v in &vs {
                if !me.stratification_defect(v).map_err(e2s)?.is_zero() {
                    return Err(format!("stratification identity fails at {v}"));
                }
                if st.is_semistable_type(v).map_err(e2s)? && st.stable_equals_semistable(v).map_err(e2s)? {
                    me.poincare_polynomial(v).map_err(|e| format!("{v}: {e}"))?;
                    poincare += 1;
                }
            }
            Ok(format!("stratification identity on {} vectors, {poincare} Poincaré polynomials", vs.len()))
        })());
        record("census", (|| {
            let st = st.as_ref().map_err(|e| e.to_string())?;
            let me = MotiveEngine::new(st, RepFullMotiveSource::SymbolicA2).map_err(e2s)?;
            let f2 = PrimeField::new(2).map_err(e2s)?;
            let cap = budget.min(1 << 20);
            let mut n = 0;
            for v in &vs {
                if candidate_count(ext, v, f2, cap).is_err() {
                    continue;
                }
                let r = stratum_census(&me, v, f2, cap).map_err(e2s)?;
                if !r.all_match() {
                    return Err(format!("census at q = 2 disagrees for {v}"));
                }
                n += 1;
            }
            Ok(format!("{n} vectors at q = 2"))
        })());
    }

    let mut sis = Vec::new();
    for f in [Family::D241, Family::D362] {
        if ext.check_vector(&f.dim()).is_ok() {
            sis.extend(f.functions().into_iter().map(|s| (format!("{f:?}/{}", s.name), s)));
        }
    }
    sis.extend(cfg.semi_invariants()?.into_iter().map(|s| (s.name.clone(), s)));
    for (label, si) in sis {
        let o = match verify_weight(&si, ext, prime, 30, seed) {
            Ok(w) => Ok(format!("weight {w}")),
            Err(qmod::Error::Parse(msg)) => Ok(format!("skipped: {msg}")),
            Err(e) => Err(e.to_string()),
        };
        record(&format!("weight {label}"), o);
    }
    Ok(out)
}
