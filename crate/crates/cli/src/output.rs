//! Text or JSON output, assembled before printing.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use qmod::{LPolynomial, MotiveExpr};

pub struct Out {
    json: bool,
    lines: Vec<String>,
    doc: Option<Value>,
}

impl Out {
    pub fn new(json: bool) -> Self {
        Out { json, lines: Vec::new(), doc: None }
    }

    pub fn line(&mut self, s: &str) {
        self.lines.push(s.to_string());
    }

    pub fn json(&mut self, v: Value) {
        self.doc = Some(v);
    }

    /// Informational message on stderr, text mode only.
    pub fn note(&self, s: &str) {
        if !self.json {
            eprintln!("note: {s}");
        }
    }

    pub fn flush(&mut self) {
        if self.json {
            if let Some(d) = self.doc.take() {
                println!("{}", serde_json::to_string_pretty(&d).expect("serializable"));
            }
        } else {
            for l in self.lines.drain(..) {
                println!("{l}");
            }
        }
    }
}

fn int_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(x) => json!(x),
        None => json!(c.to_string()),
    }
}

/// Nonzero coefficients keyed by degree.
pub fn poly_json(p: &LPolynomial) -> Value {
    let mut m = Map::new();
    for (k, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            m.insert(k.to_string(), int_json(c));
        }
    }
    Value::Object(m)
}

pub fn motive_json(m: &MotiveExpr) -> Value {
    json!({
        "numerator": poly_json(m.numerator()),
        "denominator": poly_json(m.denominator()),
        "text": m.to_string(),
    })
}
