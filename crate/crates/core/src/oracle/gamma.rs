//! Randomized estimation of the general rank γ_{T^s,d}.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::rep::random_point;
use crate::error::Result;
use crate::field::PrimeField;
use crate::quiver::{DimVector, ExtDimVector, ExtensionData};
use crate::stability::{GammaAnswer, GammaEvidence, GammaOracle};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaEstimate {
    /// Vertexwise maximum of the ranks seen.
    pub best: DimVector,
    /// Seed of the trial that produced a surjection, if any.
    pub witness_seed: Option<u64>,
}

impl GammaEstimate {
    pub fn full(&self) -> bool {
        self.witness_seed.is_some()
    }
}

/// Per-trial seed derived from the base seed.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Samples M of dimension d and f ∈ Hom(T^s, M) uniformly; a surjective f
/// proves γ = d, otherwise the answer is only probable.
pub fn estimate_gamma(ext: &ExtensionData, v: &ExtDimVector, trials: usize, field: PrimeField, seed: u64) -> Result<GammaEstimate> {
    ext.check_vector(v)?;
    let mut best = vec![0usize; v.d.len()];
    for trial in 0..trials {
        let ts = trial_seed(seed, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let p = random_point(ext, v, field, &mut rng)?;
        let ranks = p.f_ranks(field);
        for (b, r) in best.iter_mut().zip(&ranks) {
            *b = (*b).max(*r);
        }
        if ranks == v.d.0 {
            return Ok(GammaEstimate { best: DimVector(ranks), witness_seed: Some(ts) });
        }
    }
    Ok(GammaEstimate { best: DimVector(best), witness_seed: None })
}

/// [`GammaOracle`] backed by [`estimate_gamma`], memoized.
pub struct ProbeGamma {
    ext: ExtensionData,
    field: PrimeField,
    trials: usize,
    seed: u64,
    memo: Mutex<HashMap<ExtDimVector, GammaAnswer>>,
}

impl ProbeGamma {
    pub fn new(ext: &ExtensionData, field: PrimeField, trials: usize, seed: u64) -> Result<Self> {
        ext.require_t_matrices()?;
        Ok(ProbeGamma { ext: ext.clone(), field, trials, seed, memo: Mutex::default() })
    }
}

impl GammaOracle for ProbeGamma {
    fn query(&self, v: &ExtDimVector) -> Result<GammaAnswer> {
        if let Some(a) = self.memo.lock().unwrap().get(v) {
            return Ok(a.clone());
        }
        let est = estimate_gamma(&self.ext, v, self.trials, self.field, self.seed)?;
        let p = self.field.p();
        let answer = match est.witness_seed {
            Some(seed) => GammaAnswer { full: true, evidence: GammaEvidence::Probe { prime: p, seed } },
            None => GammaAnswer {
                full: false,
                evidence: GammaEvidence::NotFound { prime: p, seed: self.seed, best: est.best.0 },
            },
        };
        self.memo.lock().unwrap().insert(v.clone(), answer.clone());
        Ok(answer)
    }
}
