//! Slope stability for A[T]: HN types, the recursive semistability criterion
//! for dimension vectors, and the codimension and exponent of HN strata.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::quiver::{euler_ext_unchecked, euler_q_unchecked, slope_cmp, ExtDimVector, ExtensionData};

/// A sequence of dimension vectors with strictly decreasing slopes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HNType {
    steps: Vec<ExtDimVector>,
    weight: ExtDimVector,
}

impl HNType {
    pub fn new(steps: Vec<ExtDimVector>) -> Result<Self> {
        let first = steps.first().ok_or_else(|| Error::Parse("empty HN type".into()))?;
        let n = first.d.len();
        let mut weight = ExtDimVector::new(0, vec![0; n]);
        for (k, v) in steps.iter().enumerate() {
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            if v.d.len() != n {
                return Err(Error::VertexMismatch { expected: n, got: v.d.len() });
            }
            if k > 0 && slope_cmp(&steps[k - 1], v) != Ordering::Greater {
                return Err(Error::Parse(format!("slopes not strictly decreasing at step {}", k + 1)));
            }
            weight = weight.add(v);
        }
        Ok(HNType { steps, weight })
    }

    pub fn single(v: ExtDimVector) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn steps(&self) -> &[ExtDimVector] {
        &self.steps
    }

    pub fn weight(&self) -> &ExtDimVector {
        &self.weight
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Parses `(1|2,0) > (1|2,1)`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split('>').map(ExtDimVector::parse).collect::<Result<Vec<_>>>()?)
    }
}

impl fmt::Display for HNType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.steps.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" > "))
    }
}

/// How an answer about the general rank was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaEvidence {
    /// A surjective homomorphism found over F_prime with this seed.
    Probe { prime: u32, seed: u64 },
    /// Pinned by a user table.
    Table,
    /// Decided by the bound γ ≤ min(d, s·t) alone.
    Bound,
    /// Sampling found no surjection; best vertexwise ranks attached.
    NotFound { prime: u32, seed: u64, best: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaAnswer {
    pub full: bool,
    pub evidence: GammaEvidence,
}

/// Answers whether the general rank γ_{T^s,d} equals d.
pub trait GammaOracle: Send + Sync {
    fn query(&self, v: &ExtDimVector) -> Result<GammaAnswer>;
}

/// Fixed answers, optionally falling back to another oracle.
pub struct GammaTable {
    entries: HashMap<ExtDimVector, bool>,
    fallback: Option<Box<dyn GammaOracle>>,
}

impl GammaTable {
    pub fn new(entries: HashMap<ExtDimVector, bool>) -> Self {
        GammaTable { entries, fallback: None }
    }

    pub fn with_fallback(entries: HashMap<ExtDimVector, bool>, fallback: Box<dyn GammaOracle>) -> Self {
        GammaTable { entries, fallback: Some(fallback) }
    }
}

impl GammaOracle for GammaTable {
    fn query(&self, v: &ExtDimVector) -> Result<GammaAnswer> {
        if let Some(&full) = self.entries.get(v) {
            return Ok(GammaAnswer { full, evidence: GammaEvidence::Table });
        }
        match &self.fallback {
            Some(f) => f.query(v),
            None => Err(Error::GammaOracle(format!("no table entry for {v}"))),
        }
    }
}

/// Semistability of dimension vectors and HN-type enumeration for one
/// extension, memoized per dimension vector.
pub struct StabilityEngine<'a> {
    ext: &'a ExtensionData,
    gamma: &'a dyn GammaOracle,
    semistable: Mutex<HashMap<ExtDimVector, bool>>,
    types: Mutex<HashMap<ExtDimVector, Arc<Vec<HNType>>>>,
}

impl<'a> StabilityEngine<'a> {
    pub fn new(ext: &'a ExtensionData, gamma: &'a dyn GammaOracle) -> Result<Self> {
        ext.require_rigid()?;
        Ok(StabilityEngine { ext, gamma, semistable: Mutex::default(), types: Mutex::default() })
    }

    pub fn ext(&self) -> &'a ExtensionData {
        self.ext
    }

    pub fn gamma(&self) -> &'a dyn GammaOracle {
        self.gamma
    }

    /// Whether γ_{T^s,d} = d, using the bound d ≤ s·t before asking the oracle.
    pub fn gamma_full(&self, v: &ExtDimVector) -> Result<bool> {
        let t = self.ext.t().entries();
        if v.d.entries().iter().zip(t).any(|(&d, &t)| d > v.s * t) {
            return Ok(false);
        }
        if v.d.is_zero() {
            return Ok(true);
        }
        Ok(self.gamma.query(v)?.full)
    }

    /// The recursive criterion: γ = d and no HN type of weight v has all
    /// pairwise Euler pairings zero.
    pub fn is_semistable_type(&self, v: &ExtDimVector) -> Result<bool> {
        self.ext.check_vector(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        if let Some(&b) = self.semistable.lock().unwrap().get(v) {
            return Ok(b);
        }
        let answer = self.compute_semistable(v)?;
        self.semistable.lock().unwrap().insert(v.clone(), answer);
        Ok(answer)
    }

    fn compute_semistable(&self, v: &ExtDimVector) -> Result<bool> {
        if v.s == 0 || !self.gamma_full(v)? {
            return Ok(false);
        }
        for hn in self.enumerate_hn_types(v)?.iter() {
            let steps = hn.steps();
            let all_zero = (0..steps.len())
                .all(|n| (n + 1..steps.len()).all(|l| euler_ext_unchecked(self.ext, &steps[n], &steps[l]) == 0));
            if all_zero {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All HN types of weight v with at least two steps, semistable steps
    /// and nonzero last s, in lexicographic order.
    pub fn enumerate_hn_types(&self, v: &ExtDimVector) -> Result<Arc<Vec<HNType>>> {
        self.ext.check_vector(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        if let Some(list) = self.types.lock().unwrap().get(v) {
            return Ok(list.clone());
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.extend(v, None, &mut prefix, &mut out)?;
        out.sort();
        let out = Arc::new(out);
        self.types.lock().unwrap().insert(v.clone(), out.clone());
        Ok(out)
    }

    fn extend(
        &self,
        remaining: &ExtDimVector,
        prev: Option<&ExtDimVector>,
        prefix: &mut Vec<ExtDimVector>,
        out: &mut Vec<HNType>,
    ) -> Result<()> {
        let t = self.ext.t().entries().to_vec();
        for w in sub_vectors(remaining, &t) {
            if prev.is_some_and(|p| slope_cmp(&w, p) != Ordering::Less) {
                continue;
            }
            if &w == remaining {
                if !prefix.is_empty() && self.is_semistable_type(&w)? {
                    let mut steps = prefix.clone();
                    steps.push(w);
                    out.push(HNType::new(steps)?);
                }
                continue;
            }
            let rest = remaining.checked_sub(&w).expect("w ≤ remaining");
            if rest.s == 0 || !self.is_semistable_type(&w)? {
                continue;
            }
            prefix.push(w);
            let w = prefix.last().unwrap().clone();
            self.extend(&rest, Some(&w), prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }

    /// True when no equal-slope decomposition v = w + (v − w) into
    /// semistable types exists.
    pub fn stable_equals_semistable(&self, v: &ExtDimVector) -> Result<bool> {
        let t = self.ext.t().entries().to_vec();
        for w in sub_vectors(v, &t) {
            if &w == v || slope_cmp(&w, v) != Ordering::Equal {
                continue;
            }
            let rest = v.checked_sub(&w).unwrap();
            if self.is_semistable_type(&w)? && self.is_semistable_type(&rest)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Drops all memoized answers.
    pub fn clear_cache(&self) {
        self.semistable.lock().unwrap().clear();
        self.types.lock().unwrap().clear();
    }
}

/// Nonzero w ≤ v with w.s ≥ 1 and w.d ≤ w.s·t, in lexicographic order.
fn sub_vectors(v: &ExtDimVector, t: &[usize]) -> Vec<ExtDimVector> {
    let mut out = Vec::new();
    for s in 1..=v.s {
        let bounds: Vec<usize> = v.d.entries().iter().zip(t).map(|(&d, &t)| d.min(s * t)).collect();
        let mut cur = vec![0usize; bounds.len()];
        loop {
            out.push(ExtDimVector::new(s, cur.clone()));
            let Some(k) = (0..bounds.len()).rev().find(|&k| cur[k] < bounds[k]) else { break };
            cur[k] += 1;
            cur[k + 1..].iter_mut().for_each(|x| *x = 0);
        }
    }
    out
}

/// −Σ_{k<l} ⟨step_k, step_l⟩.
pub fn hn_stratum_codim(ext: &ExtensionData, hn: &HNType) -> i64 {
    let s = hn.steps();
    let mut acc = 0;
    for k in 0..s.len() {
        for l in k + 1..s.len() {
            acc -= euler_ext_unchecked(ext, &s[k], &s[l]);
        }
    }
    acc
}

/// Σ_{n<l} (Σ_{α:i→j} d_i^l d_j^n + s^l ⟨t, d^n⟩_Q).
pub fn hn_exponent(ext: &ExtensionData, hn: &HNType) -> i64 {
    let s = hn.steps();
    let q = ext.quiver();
    let mut acc = 0i64;
    for n in 0..s.len() {
        for l in n + 1..s.len() {
            for a in q.arrows() {
                acc += (s[l].d.entries()[a.source] * s[n].d.entries()[a.target]) as i64;
            }
            acc += s[l].s as i64 * euler_q_unchecked(q, ext.t(), &s[n].d);
        }
    }
    acc
}
