//! Quivers, dimension vectors, the one-point extension A[T] and its
//! extended quiver with relations, Euler forms, slopes and the dimension
//! formulas for representation varieties and moduli.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Name of the extension vertex in the extended quiver.
pub const INFINITY: &str = "inf";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    topological_order: Option<Vec<usize>>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

impl Quiver {
    /// Builds a quiver from vertex names and `(name, source, target)` triples.
    pub fn new<S: AsRef<str>>(vertices: &[S], arrows: &[(S, S, S)]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidQuiver(format!("duplicate vertex '{v}'")));
            }
        }
        let mut names = HashMap::new();
        let mut out = Vec::with_capacity(arrows.len());
        for (name, s, t) in arrows {
            let (name, s, t) = (name.as_ref(), s.as_ref(), t.as_ref());
            if names.insert(name.to_string(), ()).is_some() {
                return Err(Error::InvalidQuiver(format!("duplicate arrow '{name}'")));
            }
            let lookup = |v: &str| {
                vertex_index
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::InvalidQuiver(format!("arrow '{name}' references unknown vertex '{v}'")))
            };
            out.push(Arrow { name: name.to_string(), source: lookup(s)?, target: lookup(t)? });
        }
        let topological_order = topo_sort(vertices.len(), &out);
        Ok(Quiver { vertices, arrows: out, vertex_index, topological_order })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order.is_some()
    }

    pub fn topological_order(&self) -> Option<&[usize]> {
        self.topological_order.as_deref()
    }

    pub fn dim_vector(&self, entries: Vec<usize>) -> Result<DimVector> {
        if entries.len() != self.vertices.len() {
            return Err(Error::VertexMismatch { expected: self.vertices.len(), got: entries.len() });
        }
        Ok(DimVector(entries))
    }

    /// Dimension vector from a map keyed by vertex name; keys must be exactly the vertex set.
    pub fn dim_from_map(&self, map: &BTreeMap<String, usize>) -> Result<DimVector> {
        if map.len() != self.vertices.len() {
            return Err(Error::VertexMismatch { expected: self.vertices.len(), got: map.len() });
        }
        let mut out = vec![0; self.vertices.len()];
        for (k, &v) in map {
            let i = self
                .vertex_index(k)
                .ok_or_else(|| Error::InvalidQuiver(format!("unknown vertex '{k}'")))?;
            out[i] = v;
        }
        Ok(DimVector(out))
    }

    fn check(&self, d: &DimVector) -> Result<()> {
        if d.0.len() != self.vertices.len() {
            return Err(Error::VertexMismatch { expected: self.vertices.len(), got: d.0.len() });
        }
        Ok(())
    }
}

fn topo_sort(n: usize, arrows: &[Arrow]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for a in arrows {
        indeg[a.target] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).rev().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for a in arrows.iter().filter(|a| a.source == v) {
            indeg[a.target] -= 1;
            if indeg[a.target] == 0 {
                ready.push(a.target);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Dimension vector on a quiver, stored in vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DimVector(pub Vec<usize>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &DimVector) -> Option<DimVector> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(DimVector)
    }

    /// Componentwise `≤`.
    pub fn le(&self, other: &DimVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, k: usize) -> DimVector {
        DimVector(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A dimension vector `(s, d)` of A[T]: `s` at the extension vertex, `d` on Q.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtDimVector {
    pub s: usize,
    pub d: DimVector,
}

impl ExtDimVector {
    pub fn new(s: usize, d: Vec<usize>) -> Self {
        ExtDimVector { s, d: DimVector(d) }
    }

    pub fn total(&self) -> usize {
        self.s + self.d.total()
    }

    pub fn is_zero(&self) -> bool {
        self.s == 0 && self.d.is_zero()
    }

    pub fn add(&self, other: &ExtDimVector) -> ExtDimVector {
        ExtDimVector { s: self.s + other.s, d: self.d.add(&other.d) }
    }

    pub fn checked_sub(&self, other: &ExtDimVector) -> Option<ExtDimVector> {
        Some(ExtDimVector { s: self.s.checked_sub(other.s)?, d: self.d.checked_sub(&other.d)? })
    }

    pub fn le(&self, other: &ExtDimVector) -> bool {
        self.s <= other.s && self.d.le(&other.d)
    }

    /// Parses `s:d1,d2,...` or `(s|d1,d2,...)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let (s, d) = if let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            inner.split_once('|').ok_or_else(|| Error::Parse(format!("expected (s|d...) in '{text}'")))?
        } else {
            t.split_once(':').ok_or_else(|| Error::Parse(format!("expected s:d1,d2,... in '{text}'")))?
        };
        let num = |x: &str| usize::from_str(x.trim()).map_err(|_| Error::Parse(format!("bad integer '{x}' in '{text}'")));
        let s = num(s)?;
        let d = if d.trim().is_empty() { Vec::new() } else { d.split(',').map(num).collect::<Result<Vec<_>>>()? };
        Ok(ExtDimVector::new(s, d))
    }
}

impl fmt::Display for ExtDimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.s, self.d)
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// From nested rows; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut data = Vec::new();
        for r in rows {
            if r.len() != cols {
                return Err(Error::Shape(format!("row of length {} where {cols} expected", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect()
    }

    /// Rank over the rationals (fraction-free elimination in i128).
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<i128>> = self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, p);
            for r in rank + 1..self.rows {
                if a[r][c] != 0 {
                    let (x, y) = (a[rank][c], a[r][c]);
                    for k in c..self.cols {
                        a[r][k] = a[r][k] * x - a[rank][k] * y;
                    }
                    let g = a[r].iter().fold(0i128, |g, &v| num_integer::Integer::gcd(&g, &v));
                    if g > 1 {
                        a[r].iter_mut().for_each(|v| *v /= g);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// The data defining A[T]: the quiver Q, the dimension vector t of T, optionally
/// T's matrices, and the assumption flags.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    quiver: Quiver,
    t: DimVector,
    t_matrices: Option<Vec<IntMatrix>>,
    assume_rigid: bool,
    assume_end_trivial: bool,
    pub(crate) rigidity_verified_at: Option<u32>,
}

impl ExtensionData {
    /// `t_matrices`, when given, are keyed by arrow name and must cover every arrow.
    pub fn new(
        quiver: Quiver,
        t: DimVector,
        t_matrices: Option<BTreeMap<String, IntMatrix>>,
        assume_rigid: bool,
        assume_end_trivial: bool,
    ) -> Result<Self> {
        quiver.check(&t)?;
        if quiver.vertex_index(INFINITY).is_some() {
            return Err(Error::InvalidQuiver(format!("vertex name '{INFINITY}' is reserved")));
        }
        let t_matrices = match t_matrices {
            None => None,
            Some(mut map) => {
                let mut out = Vec::with_capacity(quiver.arrows().len());
                for a in quiver.arrows() {
                    let m = map
                        .remove(&a.name)
                        .ok_or_else(|| Error::Shape(format!("no matrix for arrow '{}'", a.name)))?;
                    let (r, c) = (t.0[a.target], t.0[a.source]);
                    if m.rows != r || m.cols != c {
                        return Err(Error::Shape(format!(
                            "matrix of arrow '{}' is {}x{}, expected {r}x{c}",
                            a.name, m.rows, m.cols
                        )));
                    }
                    out.push(m);
                }
                if let Some(extra) = map.keys().next() {
                    return Err(Error::Shape(format!("matrix given for unknown arrow '{extra}'")));
                }
                Some(out)
            }
        };
        Ok(ExtensionData { quiver, t, t_matrices, assume_rigid, assume_end_trivial, rigidity_verified_at: None })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn t(&self) -> &DimVector {
        &self.t
    }

    /// T's matrices aligned with the arrows of Q.
    pub fn t_matrices(&self) -> Option<&[IntMatrix]> {
        self.t_matrices.as_deref()
    }

    pub fn require_t_matrices(&self) -> Result<&[IntMatrix]> {
        self.t_matrices().ok_or(Error::ExplicitTRequired)
    }

    pub fn assume_rigid(&self) -> bool {
        self.assume_rigid
    }

    pub fn assume_end_trivial(&self) -> bool {
        self.assume_end_trivial
    }

    pub fn rigidity_verified_at(&self) -> Option<u32> {
        self.rigidity_verified_at
    }

    /// Succeeds when rigidity is asserted or was verified by the oracle.
    pub fn require_rigid(&self) -> Result<()> {
        if self.assume_rigid || self.rigidity_verified_at.is_some() {
            Ok(())
        } else {
            Err(Error::RigidityUnasserted)
        }
    }

    pub fn check_vector(&self, v: &ExtDimVector) -> Result<()> {
        self.quiver.check(&v.d)
    }
}

/// One term `coefficient · path` of a relation; the path lists arrow
/// indices of Q̂ in order of application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTerm {
    pub coefficient: i64,
    pub path: Vec<usize>,
}

/// A linear relation Σ c·path = 0 between paths from the extension vertex
/// to a vertex of Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub source: usize,
    pub target: usize,
    pub terms: Vec<RelationTerm>,
}

/// Q̂ with its relations. Vertex 0 is the extension vertex, vertex `i + 1` is
/// vertex `i` of Q. Arrows of Q keep their indices; the arrows
/// `rho{l}@{vertex}` from the extension vertex follow, vertex by vertex.
#[derive(Clone, Debug)]
pub struct ExtendedQuiver {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    rho_offsets: Vec<usize>,
}

impl ExtendedQuiver {
    /// Index in Q̂ of the arrow ρ_{l,(i)} (both 0-based).
    pub fn rho(&self, vertex: usize, l: usize) -> usize {
        self.rho_offsets[vertex] + l
    }

    /// Human-readable form of a relation, e.g. `m*rho1@1 - rho1@2`.
    pub fn format_relation(&self, rel: &Relation) -> String {
        let mut out = String::new();
        for (k, term) in rel.terms.iter().enumerate() {
            let path: Vec<&str> = term.path.iter().rev().map(|&a| self.quiver.arrows()[a].name.as_str()).collect();
            let c = term.coefficient;
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if c.abs() != 1 {
                out.push_str(&format!("{}*", c.abs()));
            }
            out.push_str(&path.join("*"));
        }
        if rel.terms.is_empty() {
            out.push('0');
        }
        out
    }
}

pub fn rho_name(l: usize, vertex: &str) -> String {
    format!("rho{}@{}", l + 1, vertex)
}

/// Builds Q̂ and the relations α·ρ_{l,(i)} − Σ_{l'} T_α[l', l] ρ_{l',(j)}.
pub fn build_extended_quiver(ext: &ExtensionData) -> Result<ExtendedQuiver> {
    let tm = ext.require_t_matrices()?;
    let q = ext.quiver();
    let mut vertices = vec![INFINITY.to_string()];
    vertices.extend(q.vertices().iter().cloned());
    let mut arrows: Vec<(String, String, String)> = q
        .arrows()
        .iter()
        .map(|a| (a.name.clone(), q.vertices()[a.source].clone(), q.vertices()[a.target].clone()))
        .collect();
    let mut rho_offsets = Vec::with_capacity(q.num_vertices());
    for (i, name) in q.vertices().iter().enumerate() {
        rho_offsets.push(arrows.len());
        for l in 0..ext.t().0[i] {
            let n = rho_name(l, name);
            if q.arrow_index(&n).is_some() {
                return Err(Error::InvalidQuiver(format!("arrow name '{n}' is reserved")));
            }
            arrows.push((n, INFINITY.to_string(), name.clone()));
        }
    }
    let quiver = Quiver::new(&vertices, &arrows)?;
    let mut relations = Vec::new();
    for (ai, a) in q.arrows().iter().enumerate() {
        let m = &tm[ai];
        for l in 0..ext.t().0[a.source] {
            let mut terms = vec![RelationTerm { coefficient: 1, path: vec![rho_offsets[a.source] + l, ai] }];
            for lp in 0..ext.t().0[a.target] {
                let c = m.get(lp, l);
                if c != 0 {
                    terms.push(RelationTerm { coefficient: -c, path: vec![rho_offsets[a.target] + lp] });
                }
            }
            relations.push(Relation { source: 0, target: a.target + 1, terms });
        }
    }
    Ok(ExtendedQuiver { quiver, relations, rho_offsets })
}

/// ⟨d, e⟩_Q = Σ_i d_i e_i − Σ_{α:i→j} d_i e_j.
pub fn euler_form_q(q: &Quiver, d: &DimVector, e: &DimVector) -> Result<i64> {
    q.check(d)?;
    q.check(e)?;
    Ok(euler_q_unchecked(q, d, e))
}

pub(crate) fn euler_q_unchecked(q: &Quiver, d: &DimVector, e: &DimVector) -> i64 {
    let diag: i64 = d.0.iter().zip(&e.0).map(|(&a, &b)| (a * b) as i64).sum();
    let arr: i64 = q.arrows().iter().map(|a| (d.0[a.source] * e.0[a.target]) as i64).sum();
    diag - arr
}

/// ⟨(s,d),(s',d')⟩ = ss' − s⟨t,d'⟩_Q + ⟨d,d'⟩_Q.
pub fn euler_form_ext(ext: &ExtensionData, a: &ExtDimVector, b: &ExtDimVector) -> Result<i64> {
    ext.check_vector(a)?;
    ext.check_vector(b)?;
    Ok(euler_ext_unchecked(ext, a, b))
}

pub(crate) fn euler_ext_unchecked(ext: &ExtensionData, a: &ExtDimVector, b: &ExtDimVector) -> i64 {
    let q = ext.quiver();
    (a.s * b.s) as i64 - a.s as i64 * euler_q_unchecked(q, ext.t(), &b.d) + euler_q_unchecked(q, &a.d, &b.d)
}

/// μ(s,d) = s / (s + |d|).
pub fn slope(v: &ExtDimVector) -> Result<Ratio<u64>> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(Ratio::new(v.s as u64, v.total() as u64))
}

/// Compares slopes of two nonzero vectors exactly.
pub fn slope_cmp(a: &ExtDimVector, b: &ExtDimVector) -> Ordering {
    ((a.s * b.total()) as u128).cmp(&((b.s * a.total()) as u128))
}

/// Formats a slope as `num/den`.
pub fn format_slope(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedDims {
    pub dim_rep_q: i64,
    pub dim_rep_full: i64,
    pub dim_moduli: i64,
}

pub fn expected_dims(ext: &ExtensionData, v: &ExtDimVector) -> Result<ExpectedDims> {
    ext.check_vector(v)?;
    let q = ext.quiver();
    let dim_rep_q: i64 = q.arrows().iter().map(|a| (v.d.0[a.source] * v.d.0[a.target]) as i64).sum();
    let dim_rep_full = dim_rep_q + v.s as i64 * euler_q_unchecked(q, ext.t(), &v.d);
    let dim_moduli = 1 - euler_ext_unchecked(ext, v, v);
    Ok(ExpectedDims { dim_rep_q, dim_rep_full, dim_moduli })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Quiver {
        Quiver::new(&["1", "2"], &[("m", "1", "2")]).unwrap()
    }

    fn ext_with(t: Vec<usize>, m: Vec<i64>) -> ExtensionData {
        let q = a2();
        let tm = IntMatrix::new(t[1], t[0], m).unwrap();
        let mut map = BTreeMap::new();
        map.insert("m".to_string(), tm);
        ExtensionData::new(q, DimVector(t), Some(map), true, true).unwrap()
    }

    fn running() -> ExtensionData {
        ext_with(vec![3, 1], vec![1, 0, 0])
    }

    #[test]
    fn quiver_validation() {
        assert!(Quiver::new(&["1", "1"], &[]).is_err());
        assert!(Quiver::new(&["1"], &[("a", "1", "2")]).is_err());
        assert!(Quiver::new(&["1", "2"], &[("a", "1", "2"), ("a", "2", "1")]).is_err());
        let cyc = Quiver::new(&["1", "2"], &[("a", "1", "2"), ("b", "2", "1")]).unwrap();
        assert!(!cyc.is_acyclic());
        assert!(a2().is_acyclic());
        let lp = Quiver::new(&["1"], &[("l", "1", "1")]).unwrap();
        assert!(!lp.is_acyclic());
    }

    #[test]
    fn euler_q_examples() {
        let q = a2();
        let d = DimVector(vec![4, 1]);
        assert_eq!(euler_form_q(&q, &d, &d).unwrap(), 13);
        assert_eq!(euler_form_q(&q, &DimVector(vec![3, 1]), &d).unwrap(), 10);
        assert_eq!(euler_form_q(&q, &DimVector::zero(2), &d).unwrap(), 0);
        assert!(euler_form_q(&q, &DimVector(vec![1]), &d).is_err());
    }

    #[test]
    fn euler_ext_examples() {
        let e = running();
        let v = ExtDimVector::new(2, vec![4, 1]);
        assert_eq!(euler_form_ext(&e, &v, &v).unwrap(), -3);
        let w = ExtDimVector::new(3, vec![6, 2]);
        assert_eq!(euler_form_ext(&e, &w, &w).unwrap(), -5);
        let u = ExtDimVector::new(1, vec![0, 0]);
        assert_eq!(euler_form_ext(&e, &u, &u).unwrap(), 1);
    }

    #[test]
    fn slopes() {
        assert_eq!(slope(&ExtDimVector::new(2, vec![4, 1])).unwrap(), Ratio::new(2, 7));
        assert_eq!(format_slope(&slope(&ExtDimVector::new(1, vec![0, 0])).unwrap()), "1/1");
        assert_eq!(slope(&ExtDimVector::new(0, vec![3, 1])).unwrap(), Ratio::new(0, 1));
        assert_eq!(slope(&ExtDimVector::new(0, vec![0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn dims() {
        let e = running();
        let d = expected_dims(&e, &ExtDimVector::new(2, vec![4, 1])).unwrap();
        assert_eq!((d.dim_rep_q, d.dim_rep_full, d.dim_moduli), (4, 24, 4));
        let d = expected_dims(&e, &ExtDimVector::new(3, vec![6, 2])).unwrap();
        assert_eq!((d.dim_rep_q, d.dim_rep_full, d.dim_moduli), (12, 54, 6));
        let d = expected_dims(&e, &ExtDimVector::new(0, vec![2, 3])).unwrap();
        let eq = euler_form_q(e.quiver(), &DimVector(vec![2, 3]), &DimVector(vec![2, 3])).unwrap();
        assert_eq!((d.dim_rep_q, d.dim_rep_full, d.dim_moduli), (6, 6, 1 - eq));
    }

    #[test]
    fn extended_quiver_running() {
        let e = running();
        let xq = build_extended_quiver(&e).unwrap();
        assert_eq!(xq.quiver.num_vertices(), 3);
        let from_inf_to = |v: usize| xq.quiver.arrows().iter().filter(|a| a.source == 0 && a.target == v).count();
        assert_eq!(from_inf_to(1), 3);
        assert_eq!(from_inf_to(2), 1);
        let rels: Vec<String> = xq.relations.iter().map(|r| xq.format_relation(r)).collect();
        assert_eq!(rels, vec!["m*rho1@1 - rho1@2", "m*rho2@1", "m*rho3@1"]);
    }

    #[test]
    fn extended_quiver_single_vertex() {
        let q = Quiver::new::<&str>(&["1"], &[]).unwrap();
        let e = ExtensionData::new(q, DimVector(vec![4]), Some(BTreeMap::new()), true, true).unwrap();
        let xq = build_extended_quiver(&e).unwrap();
        assert_eq!(xq.quiver.arrows().len(), 4);
        assert!(xq.relations.is_empty());
    }

    #[test]
    fn extended_quiver_simple_s1() {
        let e = ext_with(vec![1, 0], vec![]);
        let xq = build_extended_quiver(&e).unwrap();
        assert_eq!(xq.quiver.arrows().len(), 2);
        let rels: Vec<String> = xq.relations.iter().map(|r| xq.format_relation(r)).collect();
        assert_eq!(rels, vec!["m*rho1@1"]);
    }

    #[test]
    fn extended_quiver_requires_matrices() {
        let e = ExtensionData::new(a2(), DimVector(vec![3, 1]), None, true, true).unwrap();
        assert_eq!(build_extended_quiver(&e).unwrap_err(), Error::ExplicitTRequired);
    }

    #[test]
    fn matrix_shapes_checked() {
        let mut map = BTreeMap::new();
        map.insert("m".to_string(), IntMatrix::new(3, 1, vec![1, 0, 0]).unwrap());
        assert!(ExtensionData::new(a2(), DimVector(vec![3, 1]), Some(map), true, true).is_err());
    }

    #[test]
    fn parse_ext_vectors() {
        assert_eq!(ExtDimVector::parse("2:4,1").unwrap(), ExtDimVector::new(2, vec![4, 1]));
        assert_eq!(ExtDimVector::parse("(1|2,0)").unwrap(), ExtDimVector::new(1, vec![2, 0]));
        assert_eq!(ExtDimVector::new(1, vec![2, 0]).to_string(), "(1|2,0)");
        assert!(ExtDimVector::parse("2-4,1").is_err());
    }

    #[test]
    fn int_rank() {
        assert_eq!(IntMatrix::new(1, 3, vec![1, 0, 0]).unwrap().rank(), 1);
        assert_eq!(IntMatrix::new(2, 2, vec![2, 4, 1, 2]).unwrap().rank(), 1);
        assert_eq!(IntMatrix::new(2, 2, vec![2, 4, 1, 3]).unwrap().rank(), 2);
        assert_eq!(IntMatrix::zeros(0, 3).rank(), 0);
    }
}
