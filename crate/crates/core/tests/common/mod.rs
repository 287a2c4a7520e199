#![allow(dead_code)]

use std::collections::BTreeMap;

use qmod::oracle::ProbeGamma;
use qmod::{DimVector, ExtDimVector, ExtensionData, IntMatrix, PrimeField, Quiver};

/// Q = 1 → 2, T = (k³ → k) with arrow matrix [1 0 0].
pub fn running() -> ExtensionData {
    let q = Quiver::new(&["1", "2"], &[("m", "1", "2")]).unwrap();
    let mut map = BTreeMap::new();
    map.insert("m".to_string(), IntMatrix::new(1, 3, vec![1, 0, 0]).unwrap());
    ExtensionData::new(q, DimVector(vec![3, 1]), Some(map), true, true).unwrap()
}

pub fn probe(ext: &ExtensionData) -> ProbeGamma {
    ProbeGamma::new(ext, PrimeField::new(101).unwrap(), 20, 2024).unwrap()
}

pub fn v(s: usize, d: &[usize]) -> ExtDimVector {
    ExtDimVector::new(s, d.to_vec())
}
