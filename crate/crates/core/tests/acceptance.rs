//! Acceptance criteria 1–10 for the running extension, one line each.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{probe, running, v};
use qmod::grothendieck::{class_group, class_pg};
use qmod::motive::{MotiveEngine, RepFullMotiveSource};
use qmod::oracle::census::{for_each_full_orbit_rep, group_order_q, orbit_census};
use qmod::oracle::rep::{random_full_point, GroupElement};
use qmod::oracle::{
    ext2_dim, euler_identity, hom_formula_check, jacobian_check, king_check, semistable_point_exists, stratum_census,
    CensusReport, KingClass, PointAnalyzer, DEFAULT_BUDGET,
};
use qmod::quiver::expected_dims;
use qmod::semiinv::{quotient_coords, verify_weight, Family, Weight};
use qmod::stability::StabilityEngine;
use qmod::{ExtDimVector, ExtensionData, HNType, LPolynomial, MotiveExpr, PrimeField};

type Outcome = Result<String, String>;

fn m(s: &str) -> MotiveExpr {
    s.parse().unwrap()
}

fn int(x: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {elapsed:.2?} > {limit:?}"))
    }
}

fn c1(ext: &ExtensionData) -> Outcome {
    let t = Instant::now();
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let got: BTreeSet<HNType> = st.enumerate_hn_types(&v(2, &[4, 1])).map_err(|e| e.to_string())?.iter().cloned().collect();
    let want: BTreeSet<HNType> = ["(1|2,0) > (1|2,1)", "(1|1,1) > (1|3,0)", "(1|1,0) > (1|3,1)"]
        .iter()
        .map(|s| HNType::parse(s).unwrap())
        .collect();
    let elapsed = t.elapsed();
    if got != want {
        return Err(format!("got {got:?}"));
    }
    within(elapsed, Duration::from_secs(1), "three types".into())
}

fn c2(ext: &ExtensionData) -> Outcome {
    let t = Instant::now();
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).map_err(|e| e.to_string())?;
    let want = [
        ("(1|2,0) > (1|2,1)", "(L^3-1)*(L^3-L)/(L-1)^4"),
        ("(1|1,1) > (1|3,0)", "1/(L-1)^2"),
        ("(1|1,0) > (1|3,1)", "(L^3-1)/(L*(L-1)^3)"),
    ];
    for (hn, target) in want {
        let s = me.s_term(&HNType::parse(hn).unwrap()).map_err(|e| e.to_string())?;
        if s != m(target) {
            return Err(format!("S[{hn}] = {s}, expected {target}"));
        }
    }
    within(t.elapsed(), Duration::from_secs(1), "three S-terms".into())
}

fn c3(ext: &ExtensionData) -> Outcome {
    let t = Instant::now();
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).map_err(|e| e.to_string())?;
    let got = me.rep_over_pg(&v(2, &[4, 1])).map_err(|e| e.to_string())?;
    let want = m("L^2*(L^4-1)/(L-1)^2 + (L^3-1)*(L^4-1)/((L-1)*(L^2-1)*(L^2-L))");
    if got != want {
        return Err(format!("[Rep]/[PG] = {got}"));
    }
    within(t.elapsed(), Duration::from_secs(1), format!("{got}"))
}

fn c4(ext: &ExtensionData) -> Outcome {
    let t = Instant::now();
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (s, d, n) in [(2, [4, 1], 4), (3, [6, 2], 6)] {
        let p = me.poincare_polynomial(&v(s, &d)).map_err(|e| e.to_string())?.polynomial;
        if p != LPolynomial::from_i64(&vec![1; n + 1]) {
            return Err(format!("P({s}|{},{}) = {p}", d[0], d[1]));
        }
        out.push(p.to_string());
    }
    within(t.elapsed(), Duration::from_secs(10), out.join("; "))
}

fn c5(ext: &ExtensionData) -> Outcome {
    let a = expected_dims(ext, &v(2, &[4, 1])).map_err(|e| e.to_string())?.dim_moduli;
    let b = expected_dims(ext, &v(3, &[6, 2])).map_err(|e| e.to_string())?.dim_moduli;
    if (a, b) != (4, 6) {
        return Err(format!("dim_moduli = {a}, {b}"));
    }
    Ok("4 and 6".into())
}

/// Distinct quotient-map images of King-semistable full points over F_p.
fn image_count(ext: &ExtensionData, vv: &ExtDimVector, family: Family, field: PrimeField) -> Result<usize, String> {
    let mut analyzer = PointAnalyzer::new(ext, vv.s, field, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let mut images = HashSet::new();
    let mut failure = None;
    for_each_full_orbit_rep(ext, vv, field, DEFAULT_BUDGET, |rep| {
        let table = analyzer.table(rep);
        if analyzer.king(rep, &table).is_semistable() {
            match quotient_coords(ext, rep, family, field) {
                Ok(c) => {
                    images.insert(c);
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
    })
    .map_err(|e| e.to_string())?;
    match failure {
        Some(e) => Err(format!("semistable point with {e}")),
        None => Ok(images.len()),
    }
}

fn c6(ext: &ExtensionData, report: &mut Option<CensusReport>, images: &mut Option<usize>) -> Outcome {
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).map_err(|e| e.to_string())?;
    let f2 = PrimeField::new(2).unwrap();
    let vv = v(2, &[4, 1]);
    let r = stratum_census(&me, &vv, f2, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let n = image_count(ext, &vv, Family::D241, f2)?;
    *images = Some(n);
    let strata: Vec<String> = r.lines.iter().map(|l| format!("{}: {}", l.hn, l.observed)).collect();
    let detail = format!("full {} = {}; {}; images {n}", r.counts.full, r.full_predicted, strata.join(", "));
    let ok = r.all_match() && n == 31;
    *report = Some(r);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c7(ext: &ExtensionData) -> Outcome {
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut escalated = Vec::new();
    for s in 1..=2 {
        for total in 0..=5 {
            for d1 in 0..=total {
                let vv = v(s, &[d1, total - d1]);
                let predicted = st.is_semistable_type(&vv).map_err(|e| e.to_string())?;
                let mut found = semistable_point_exists(ext, &vv, PrimeField::new(2).unwrap(), DEFAULT_BUDGET)
                    .map_err(|e| e.to_string())?;
                if found != predicted {
                    escalated.push(vv.to_string());
                    found = semistable_point_exists(ext, &vv, PrimeField::new(3).unwrap(), DEFAULT_BUDGET)
                        .map_err(|e| e.to_string())?;
                }
                if found != predicted {
                    return Err(format!("{vv}: criterion says {predicted}, enumeration says {found}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} vectors agree; escalated to F_3: {escalated:?}"))
}

fn c8(ext: &ExtensionData) -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dims = [v(1, &[2, 0]), v(1, &[2, 1]), v(1, &[3, 1]), v(2, &[3, 1]), v(2, &[4, 1]), v(2, &[2, 2]), v(3, &[6, 2])];
    let mut points = Vec::new();
    for d in &dims {
        for _ in 0..15 {
            let p = random_full_point(ext, d, f, &mut rng, 50).map_err(|e| e.to_string())?;
            points.push(p.ok_or_else(|| format!("no full point of {d} found"))?);
        }
    }
    let mut pairs = 0;
    for (i, a) in points.iter().enumerate().step_by(3) {
        for b in points.iter().skip(i % 7).step_by(11) {
            let e2 = ext2_dim(ext, f, a, b).map_err(|e| e.to_string())?;
            if e2 != 0 {
                return Err(format!("ext2 = {e2} between {} and {}", a.dim(), b.dim()));
            }
            let c = euler_identity(ext, f, a, b).map_err(|e| e.to_string())?;
            if !c.holds() || c.ext1_inferred < 0 {
                return Err(format!("Euler identity fails: {c:?}"));
            }
            pairs += 1;
        }
    }
    for p in &points {
        if !jacobian_check(ext, f, p).map_err(|e| e.to_string())? {
            return Err(format!("tangent formula fails at a point of {}", p.dim()));
        }
    }
    let mut homs = 0;
    for s in 1..=2 {
        for total in 0..=6 {
            for d1 in 0..=total {
                let vv = v(s, &[d1, total - d1]);
                if !hom_formula_check(ext, &vv, f, 3, 17).map_err(|e| e.to_string())? {
                    return Err(format!("hom formula fails at {vv}"));
                }
                homs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs, {} tangent points, {homs} hom-formula vectors", points.len()))
}

fn c9(ext: &ExtensionData) -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let mut weights = Vec::new();
    for family in [Family::D241, Family::D362] {
        let fs = family.functions();
        let mut ws = Vec::new();
        for (k, si) in fs.iter().enumerate() {
            let w = verify_weight(si, ext, 101, 100, 900 + k as u64).map_err(|e| e.to_string())?;
            ws.push(w);
        }
        // products ℏ_0ℏ_i share one character
        let prod: Vec<Weight> = ws[1..]
            .iter()
            .map(|w| Weight { w_inf: ws[0].w_inf + w.w_inf, w: ws[0].w.iter().zip(&w.w).map(|(a, b)| a + b).collect() })
            .collect();
        if prod.iter().any(|w| w != &prod[0]) {
            return Err(format!("{family:?}: products have different weights {prod:?}"));
        }
        weights.push(format!("{family:?} h0 {} h1 {}", ws[0], ws[1]));
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let vv = family.dim();
        let mut stable = 0;
        while stable < 5 {
            let x = random_full_point(ext, &vv, f, &mut rng, 50).map_err(|e| e.to_string())?.ok_or("no full point")?;
            if king_check(ext, f, &x, DEFAULT_BUDGET).map_err(|e| e.to_string())? != KingClass::Stable {
                continue;
            }
            stable += 1;
            let c = quotient_coords(ext, &x, family, f).map_err(|e| e.to_string())?;
            for _ in 0..5 {
                let g = GroupElement::random(&vv, f, &mut rng);
                let y = x.act(&g, ext, f).map_err(|e| e.to_string())?;
                if quotient_coords(ext, &y, family, f).map_err(|e| e.to_string())? != c {
                    return Err(format!("{family:?}: coordinates change along an orbit"));
                }
            }
        }
    }
    Ok(weights.join("; "))
}

fn c10(ext: &ExtensionData, census: Option<&CensusReport>, images: Option<usize>) -> Outcome {
    let g = probe(ext);
    let st = StabilityEngine::new(ext, &g).map_err(|e| e.to_string())?;
    let me = MotiveEngine::new(&st, RepFullMotiveSource::SymbolicA2).map_err(|e| e.to_string())?;
    let f2 = PrimeField::new(2).unwrap();
    let err = |e: qmod::Error| e.to_string();
    let mut checks: Vec<(String, BigRational, BigRational)> = Vec::new();
    let v241 = v(2, &[4, 1]);
    let r = census.ok_or("census of criterion 6 unavailable")?;
    checks.push(("Rep^full(2|4,1)".into(), me.motive_rep_full(&v241).map_err(err)?.eval_at(2).map_err(err)?, int(r.counts.full)));
    checks.push(("Rep^sst(2|4,1)".into(), me.motive_sst(&v241).map_err(err)?.eval_at(2).map_err(err)?, int(r.counts.king_semistable)));
    for line in &r.lines[1..] {
        let s = &me.s_term(&line.hn).map_err(err)? * &class_group(&v241);
        checks.push((format!("stratum {}", line.hn), s.eval_at(2).map_err(err)?, int(line.observed)));
    }
    let pg = class_pg(&v241).eval_at(2).map_err(err)?;
    checks.push((
        "[Rep]/[PG](2|4,1)".into(),
        me.rep_over_pg(&v241).map_err(err)?.eval_at(2).map_err(err)?,
        int(r.counts.full) / &pg,
    ));
    let p241 = me.poincare_polynomial(&v241).map_err(err)?.polynomial;
    let imgs = images.ok_or("image count of criterion 6 unavailable")?;
    checks.push(("P(2|4,1) vs images".into(), MotiveExpr::from(p241).eval_at(2).map_err(err)?, int(imgs as u128)));

    let v362 = v(3, &[6, 2]);
    let oc = orbit_census(ext, &v362, f2, DEFAULT_BUDGET).map_err(err)?;
    checks.push(("Rep^full(3|6,2)".into(), me.motive_rep_full(&v362).map_err(err)?.eval_at(2).map_err(err)?, int(oc.full)));
    checks.push(("Rep^sst(3|6,2)".into(), me.motive_sst(&v362).map_err(err)?.eval_at(2).map_err(err)?, int(oc.king_semistable)));
    let types = st.enumerate_hn_types(&v362).map_err(err)?;
    let mut observed: BTreeMap<HNType, u128> = oc.by_type.clone();
    observed.remove(&HNType::single(v362.clone()).unwrap());
    for hn in types.iter() {
        let s = &me.s_term(hn).map_err(err)? * &class_group(&v362);
        checks.push((format!("stratum {hn}"), s.eval_at(2).map_err(err)?, int(observed.remove(hn).unwrap_or(0))));
    }
    if !observed.is_empty() {
        return Err(format!("(3|6,2): unpredicted strata {observed:?}"));
    }
    let pg362 = class_pg(&v362).eval_at(2).map_err(err)?;
    let p362 = me.poincare_polynomial(&v362).map_err(err)?.polynomial;
    checks.push(("P(3|6,2) vs sst/|PG|".into(), MotiveExpr::from(p362).eval_at(2).map_err(err)?, int(oc.king_semistable) / &pg362));
    if group_order_q(&v362, 2) == BigInt::from(0) {
        return Err("degenerate group order".into());
    }
    let bad: Vec<String> = checks.iter().filter(|(_, a, b)| a != b).map(|(n, a, b)| format!("{n}: {a} vs {b}")).collect();
    if bad.is_empty() {
        Ok(format!("{} values agree", checks.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn main() {
    let ext = running();
    let mut census = None;
    let mut images = None;
    let mut failed = 0;
    let mut report = |n: usize, name: &str, t: Instant, o: Outcome| {
        let secs = t.elapsed().as_secs_f64();
        match o {
            Ok(d) => println!("criterion {n:>2} PASS {name} ({secs:.2}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n:>2} FAIL {name} ({secs:.2}s): {d}");
            }
        }
    };
    let t = Instant::now();
    report(1, "hn-types", t, c1(&ext));
    let t = Instant::now();
    report(2, "s-terms", t, c2(&ext));
    let t = Instant::now();
    report(3, "rep-over-pg", t, c3(&ext));
    let t = Instant::now();
    report(4, "poincare", t, c4(&ext));
    let t = Instant::now();
    report(5, "dimensions", t, c5(&ext));
    let t = Instant::now();
    let r6 = c6(&ext, &mut census, &mut images);
    report(6, "census-q2", t, r6);
    let t = Instant::now();
    report(7, "criterion-vs-king", t, c7(&ext));
    let t = Instant::now();
    report(8, "homological", t, c8(&ext));
    let t = Instant::now();
    report(9, "semi-invariants", t, c9(&ext));
    let t = Instant::now();
    report(10, "motive-vs-count", t, c10(&ext, census.as_ref(), images));
    drop(report);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
