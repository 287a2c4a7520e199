//! Explicit representations over F_p: A-modules and A[T]-modules (M, V, f).

use rand::Rng;

use super::linear::{LinearSystem, Term};
use crate::error::{Error, Result};
use crate::field::{FpMatrix, PrimeField};
use crate::quiver::{DimVector, ExtDimVector, ExtendedQuiver, ExtensionData, Quiver};

/// A representation of Q: one matrix per arrow, shape d(target) × d(source).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QRep {
    pub dims: DimVector,
    pub matrices: Vec<FpMatrix>,
}

impl QRep {
    pub fn new(q: &Quiver, dims: DimVector, matrices: Vec<FpMatrix>) -> Result<Self> {
        if dims.len() != q.num_vertices() {
            return Err(Error::VertexMismatch { expected: q.num_vertices(), got: dims.len() });
        }
        if matrices.len() != q.arrows().len() {
            return Err(Error::Shape(format!("{} matrices for {} arrows", matrices.len(), q.arrows().len())));
        }
        for (a, m) in q.arrows().iter().zip(&matrices) {
            let want = (dims.0[a.target], dims.0[a.source]);
            if (m.rows(), m.cols()) != want {
                return Err(Error::Shape(format!(
                    "arrow '{}' has a {}x{} matrix, expected {}x{}",
                    a.name,
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(QRep { dims, matrices })
    }

    pub fn zero(q: &Quiver, dims: DimVector) -> Self {
        let matrices = q.arrows().iter().map(|a| FpMatrix::zeros(dims.0[a.target], dims.0[a.source])).collect();
        QRep { dims, matrices }
    }

    pub fn random<R: Rng + ?Sized>(q: &Quiver, dims: DimVector, field: PrimeField, rng: &mut R) -> Self {
        let matrices =
            q.arrows().iter().map(|a| FpMatrix::random(dims.0[a.target], dims.0[a.source], field, rng)).collect();
        QRep { dims, matrices }
    }

    /// The module T reduced mod p.
    pub fn t_module(ext: &ExtensionData, field: PrimeField) -> Result<Self> {
        let mats = t_field_matrices(ext, field)?;
        QRep::new(ext.quiver(), ext.t().clone(), mats)
    }

    /// T ⊗ k^s, with basis e_l ⊗ v_k at position l·s + k.
    pub fn t_power(ext: &ExtensionData, field: PrimeField, s: usize) -> Result<Self> {
        let mats = t_field_matrices(ext, field)?.iter().map(|m| m.kron_identity(s)).collect();
        QRep::new(ext.quiver(), ext.t().scale(s), mats)
    }
}

/// T's matrices over F_p, aligned with the arrows.
pub fn t_field_matrices(ext: &ExtensionData, field: PrimeField) -> Result<Vec<FpMatrix>> {
    ext.require_t_matrices()?.iter().map(|m| FpMatrix::from_rows_i64(field, &m.to_rows()).map(|x| fix_shape(x, m.rows(), m.cols()))).collect()
}

fn fix_shape(m: FpMatrix, rows: usize, cols: usize) -> FpMatrix {
    if m.rows() == rows && m.cols() == cols {
        m
    } else {
        FpMatrix::zeros(rows, cols)
    }
}

/// An A[T]-module: M on Q, V = k^s at the extension vertex, and
/// f_i: (T ⊗ V)_i → M_i of shape d_i × t_i·s (column l·s + k ↔ e_l ⊗ v_k).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqRep {
    pub base: QRep,
    pub s: usize,
    pub f: Vec<FpMatrix>,
}

impl FqRep {
    /// Checks shapes and the module-map condition M_α f_i = f_j (T_α ⊗ I_s).
    pub fn new(ext: &ExtensionData, field: PrimeField, base: QRep, s: usize, f: Vec<FpMatrix>) -> Result<Self> {
        let t = ext.t();
        if f.len() != t.len() {
            return Err(Error::VertexMismatch { expected: t.len(), got: f.len() });
        }
        for (i, fi) in f.iter().enumerate() {
            if fi.rows() != base.dims.0[i] || fi.cols() != t.0[i] * s {
                return Err(Error::Shape(format!("structure map at vertex {i} has wrong shape")));
            }
        }
        let rep = FqRep { base, s, f };
        if !rep.module_condition_holds(ext, field)? {
            return Err(Error::Assumption("structure map is not a module homomorphism".into()));
        }
        Ok(rep)
    }

    pub fn dim(&self) -> ExtDimVector {
        ExtDimVector { s: self.s, d: self.base.dims.clone() }
    }

    pub fn module_condition_holds(&self, ext: &ExtensionData, field: PrimeField) -> Result<bool> {
        let tm = t_field_matrices(ext, field)?;
        for (k, a) in ext.quiver().arrows().iter().enumerate() {
            let lhs = self.base.matrices[k].mul(&self.f[a.source], field)?;
            let rhs = self.f[a.target].mul(&tm[k].kron_identity(self.s), field)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Vertexwise ranks of f.
    pub fn f_ranks(&self, field: PrimeField) -> Vec<usize> {
        self.f.iter().map(|m| m.rank(field)).collect()
    }

    /// f surjective at every vertex.
    pub fn is_full(&self, field: PrimeField) -> bool {
        self.f.iter().zip(&self.base.dims.0).all(|(m, &d)| m.rank(field) == d)
    }

    /// Matrices of the Q̂ representation, aligned with the arrows of Q̂.
    pub fn extended_matrices(&self, xq: &ExtendedQuiver, ext: &ExtensionData) -> Vec<FpMatrix> {
        let mut out = self.base.matrices.clone();
        for (i, fi) in self.f.iter().enumerate() {
            for l in 0..ext.t().0[i] {
                debug_assert_eq!(xq.rho(i, l), out.len());
                out.push(fi.submatrix(0..fi.rows(), l * self.s..(l + 1) * self.s));
            }
        }
        out
    }

    /// Inverse of [`FqRep::extended_matrices`]; does not check relations.
    pub fn from_extended_matrices(ext: &ExtensionData, s: usize, dims: DimVector, mats: &[FpMatrix]) -> Result<Self> {
        let q = ext.quiver();
        let na = q.arrows().len();
        let base = QRep::new(q, dims.clone(), mats[..na].to_vec())?;
        let mut f = Vec::new();
        let mut k = na;
        for i in 0..q.num_vertices() {
            let blocks: Vec<&FpMatrix> = mats[k..k + ext.t().0[i]].iter().collect();
            k += ext.t().0[i];
            f.push(if blocks.is_empty() { FpMatrix::zeros(dims.0[i], 0) } else { FpMatrix::hstack(&blocks)? });
        }
        Ok(FqRep { base, s, f })
    }

    /// Base change by g = (g_∞, g_i): M_α ↦ g_j M_α g_i⁻¹, f_i ↦ g_i f_i (I ⊗ g_∞⁻¹).
    pub fn act(&self, g: &GroupElement, ext: &ExtensionData, field: PrimeField) -> Result<FqRep> {
        let inv: Vec<FpMatrix> =
            g.g.iter().map(|m| m.inverse(field).ok_or_else(|| Error::Shape("singular group element".into()))).collect::<Result<_>>()?;
        let inf_inv = g.g_inf.inverse(field).ok_or_else(|| Error::Shape("singular group element".into()))?;
        let q = ext.quiver();
        let matrices = q
            .arrows()
            .iter()
            .zip(&self.base.matrices)
            .map(|(a, m)| g.g[a.target].mul(m, field)?.mul(&inv[a.source], field))
            .collect::<Result<Vec<_>>>()?;
        let f = self
            .f
            .iter()
            .enumerate()
            .map(|(i, fi)| g.g[i].mul(fi, field)?.mul(&inf_inv.identity_kron(ext.t().0[i]), field))
            .collect::<Result<Vec<_>>>()?;
        Ok(FqRep { base: QRep { dims: self.base.dims.clone(), matrices }, s: self.s, f })
    }
}

/// An element of GL_s × ∏ GL_{d_i}.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub g_inf: FpMatrix,
    pub g: Vec<FpMatrix>,
}

impl GroupElement {
    pub fn random<R: Rng + ?Sized>(v: &ExtDimVector, field: PrimeField, rng: &mut R) -> Self {
        GroupElement {
            g_inf: FpMatrix::random_invertible(v.s, field, rng),
            g: v.d.0.iter().map(|&d| FpMatrix::random_invertible(d, field, rng)).collect(),
        }
    }

    /// det(g_∞) and det(g_i).
    pub fn dets(&self, field: PrimeField) -> (u32, Vec<u32>) {
        (self.g_inf.det(field).unwrap(), self.g.iter().map(|m| m.det(field).unwrap()).collect())
    }
}

/// The system in the unknowns f_i expressing M_α f_i = f_j (T_α ⊗ I_s).
pub fn structure_map_system(ext: &ExtensionData, field: PrimeField, m: &QRep, s: usize) -> Result<LinearSystem> {
    let tm = t_field_matrices(ext, field)?;
    let t = ext.t();
    let shapes = (0..t.len()).map(|i| (m.dims.0[i], t.0[i] * s)).collect();
    let mut sys = LinearSystem::new(field, shapes);
    let big: Vec<FpMatrix> = tm.iter().map(|x| x.kron_identity(s)).collect();
    for (k, a) in ext.quiver().arrows().iter().enumerate() {
        let shape = (m.dims.0[a.target], t.0[a.source] * s);
        sys.add_equation(
            shape,
            &[
                Term::new(1, a.source, Some(&m.matrices[k]), None),
                Term::new(field.neg(1), a.target, None, Some(&big[k])),
            ],
        );
    }
    Ok(sys)
}

/// A random point (M, f) of Rep_{(s,d)}(A[T]) with M uniform and f uniform in Hom(T^s, M).
pub fn random_point<R: Rng + ?Sized>(ext: &ExtensionData, v: &ExtDimVector, field: PrimeField, rng: &mut R) -> Result<FqRep> {
    ext.check_vector(v)?;
    let base = QRep::random(ext.quiver(), v.d.clone(), field, rng);
    let sys = structure_map_system(ext, field, &base, v.s)?;
    let basis = sys.solution_basis();
    let mut vec = vec![0u32; sys.num_unknowns()];
    for b in &basis {
        let c = field.random(rng);
        for (x, y) in vec.iter_mut().zip(b) {
            *x = field.add(*x, field.mul(c, *y));
        }
    }
    Ok(FqRep { base, s: v.s, f: sys.unpack(&vec) })
}

/// Samples until a full point appears; `None` after `tries` failures.
pub fn random_full_point<R: Rng + ?Sized>(
    ext: &ExtensionData,
    v: &ExtDimVector,
    field: PrimeField,
    rng: &mut R,
    tries: usize,
) -> Result<Option<FqRep>> {
    for _ in 0..tries {
        let p = random_point(ext, v, field, rng)?;
        if p.is_full(field) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Evaluates every relation of Q̂ on the given arrow matrices.
pub fn evaluate_relations(xq: &ExtendedQuiver, mats: &[FpMatrix], field: PrimeField) -> Result<Vec<FpMatrix>> {
    let mut out = Vec::with_capacity(xq.relations.len());
    for rel in &xq.relations {
        let mut acc: Option<FpMatrix> = None;
        for term in &rel.terms {
            let mut prod = mats[term.path[0]].clone();
            for &a in &term.path[1..] {
                prod = mats[a].mul(&prod, field)?;
            }
            let prod = prod.scale(field.from_i64(term.coefficient), field);
            acc = Some(match acc {
                None => prod,
                Some(x) => x.add(&prod, field)?,
            });
        }
        out.push(acc.unwrap_or_else(|| FpMatrix::zeros(0, 0)));
    }
    Ok(out)
}
