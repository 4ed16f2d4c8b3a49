//! Linear algebra over F_q: vectors, matrices, row reduction, span tests, and
//! the change of coordinates that moves a witness pair onto span(Λ).

use crate::error::{Error, Result};
use crate::galois::{same_field, Fe, Field, FieldSpec};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// A vector over a shared field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFq {
    field: Field,
    coords: Vec<Fe>,
}

impl VectorFq {
    pub fn new(field: Field, coords: Vec<Fe>) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|c| c.0 as u32 >= field.q()) {
            return Err(Error::InvalidInput(format!("{bad} is not an element of F_{}", field.q())));
        }
        Ok(VectorFq { field, coords })
    }

    pub fn from_indices(field: Field, idx: &[u32]) -> Result<Self> {
        let coords = idx.iter().map(|&i| field.element(i)).collect::<Result<Vec<_>>>()?;
        Ok(VectorFq { field, coords })
    }

    pub fn zero(field: Field, d: usize) -> Self {
        VectorFq { field, coords: vec![Fe::ZERO; d] }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn coords(&self) -> &[Fe] {
        &self.coords
    }
    pub fn into_coords(self) -> Vec<Fe> {
        self.coords
    }
    pub fn len(&self) -> usize {
        self.coords.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &VectorFq) -> Result<VectorFq> {
        check_pair(self, other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| self.field.add(a, b)).collect();
        Ok(VectorFq { field: self.field.clone(), coords })
    }

    pub fn scale(&self, c: Fe) -> VectorFq {
        let coords = self.coords.iter().map(|&a| self.field.mul(a, c)).collect();
        VectorFq { field: self.field.clone(), coords }
    }
}

fn check_pair(a: &VectorFq, b: &VectorFq) -> Result<()> {
    if !same_field(&a.field, &b.field) {
        return Err(Error::MixedFields);
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(())
}

/// ⟨x, v⟩ = Σ x_i v_i.
pub fn inner_product(x: &VectorFq, v: &VectorFq) -> Result<Fe> {
    check_pair(x, v)?;
    Ok(dot(&x.field, &x.coords, &v.coords))
}

/// Inner product on raw coordinate slices of equal length.
#[inline]
pub fn dot(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> Fe {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// `acc += c * v`, in place.
#[inline]
pub(crate) fn axpy(f: &FieldSpec, acc: &mut [Fe], c: Fe, v: &[Fe]) {
    if let Some(lc) = f.log_of(c) {
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = f.add(*a, f.mul_by_log(x, lc));
        }
    }
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFq {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl MatrixFq {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        MatrixFq { field, rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(field: Field, d: usize) -> Self {
        let mut m = Self::zeros(field, d, d);
        for i in 0..d {
            m.data[i * d + i] = Fe::ONE;
        }
        m
    }

    /// Builds from rows; every row must have `cols` entries.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<Fe>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            if let Some(bad) = r.iter().find(|c| c.0 as u32 >= field.q()) {
                return Err(Error::InvalidInput(format!("{bad} is not an element of F_{}", field.q())));
            }
            data.extend_from_slice(r);
        }
        Ok(MatrixFq { field, rows: rows.len(), cols, data })
    }

    pub fn from_index_rows(field: Field, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let conv = rows
            .iter()
            .map(|r| r.iter().map(|&i| field.element(i)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, cols, &conv)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_index_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|e| e.0 as u32).collect()).collect()
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut t = MatrixFq::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Matrix-vector product on raw coordinates.
    pub fn mul_vec(&self, v: &[Fe]) -> Result<Vec<Fe>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|r| dot(&self.field, self.row(r), v)).collect())
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

/// Row rank by Gaussian elimination.
pub fn rank(m: &MatrixFq) -> usize {
    let mut basis = EchelonBasis::new(m.field.clone(), m.cols);
    for r in 0..m.rows {
        basis.insert(m.row(r));
    }
    basis.dim()
}

/// Dimension of the span of a set of vectors.
pub fn dim_span(vs: &[VectorFq]) -> Result<usize> {
    let Some(first) = vs.first() else { return Ok(0) };
    let mut basis = EchelonBasis::new(first.field.clone(), first.len());
    for v in vs {
        check_pair(first, v)?;
        basis.insert(&v.coords);
    }
    Ok(basis.dim())
}

/// Span dimension on raw coordinate rows.
pub fn span_dim(f: &Field, d: usize, vs: &[Vec<Fe>]) -> usize {
    let mut basis = EchelonBasis::new(f.clone(), d);
    for v in vs {
        basis.insert(v);
    }
    basis.dim()
}

/// An incrementally maintained basis in reduced row echelon form.
///
/// Rows are kept sorted by pivot column with each pivot equal to one and every
/// other row zero in that column, so two bases of the same subspace are equal
/// entry for entry. That canonical form is what [`EchelonBasis::key`] exposes.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: Field,
    d: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: Field, d: usize) -> Self {
        EchelonBasis { field, d, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.d
    }

    fn reduce(&self, v: &[Fe]) -> Vec<Fe> {
        let f = &self.field;
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc];
            if !c.is_zero() {
                axpy(f, &mut w, f.neg(c), row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[Fe]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Fe]) -> bool {
        debug_assert_eq!(v.len(), self.d);
        let f = self.field.clone();
        let mut w = self.reduce(v);
        let Some(pc) = w.iter().position(|c| !c.is_zero()) else { return false };
        let s = f.inv_nz(w[pc]);
        for x in w.iter_mut() {
            *x = f.mul(*x, s);
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if !c.is_zero() {
                axpy(&f, row, f.neg(c), &w);
            }
        }
        let at = self.pivots.partition_point(|&p| p < pc);
        self.rows.insert(at, w);
        self.pivots.insert(at, pc);
        true
    }

    /// The canonical reduced basis.
    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Hashable identity of the subspace.
    pub fn key(&self) -> Vec<Fe> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Solves `A x = b` for `A` given as rows (r × c); returns some solution or `None`.
pub fn solve(f: &Field, a_rows: &[Vec<Fe>], cols: usize, b: &[Fe]) -> Option<Vec<Fe>> {
    let r = a_rows.len();
    debug_assert_eq!(b.len(), r);
    let mut m: Vec<Vec<Fe>> = a_rows
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut v = row.clone();
            v.push(bi);
            v
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        let Some(sel) = (pr..r).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(pr, sel);
        let s = f.inv_nz(m[pr][c]);
        for x in m[pr].iter_mut() {
            *x = f.mul(*x, s);
        }
        let pivot_row = m[pr].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != pr && !row[c].is_zero() {
                let k = f.neg(row[c]);
                axpy(f, row, k, &pivot_row);
            }
        }
        pivot_cols.push(c);
        pr += 1;
        if pr == r {
            break;
        }
    }
    if m[pr..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Fe::ZERO; cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][cols];
    }
    Some(x)
}

/// Coordinates of `v` in the basis `basis` (rows), if `v` lies in their span.
pub fn coordinates(f: &Field, basis: &[Vec<Fe>], v: &[Fe]) -> Option<Vec<Fe>> {
    let d = v.len();
    // Solve Bᵀ c = v: a d × |basis| system.
    let at: Vec<Vec<Fe>> = (0..d).map(|i| basis.iter().map(|b| b[i]).collect()).collect();
    solve(f, &at, basis.len(), v)
}

/// A pair (X, Λ): n row vectors and a set of distinct messages, all in F^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    field: Field,
    d: usize,
    x: Vec<Vec<Fe>>,
    lambda: Vec<Vec<Fe>>,
}

impl WitnessPair {
    pub fn new(field: Field, d: usize, x: Vec<Vec<Fe>>, lambda: Vec<Vec<Fe>>) -> Result<Self> {
        for v in x.iter().chain(&lambda) {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
            if let Some(bad) = v.iter().find(|c| c.0 as u32 >= field.q()) {
                return Err(Error::InvalidInput(format!("{bad} is not an element of F_{}", field.q())));
            }
        }
        let mut seen = HashSet::with_capacity(lambda.len());
        for (i, v) in lambda.iter().enumerate() {
            if !seen.insert(v) {
                return Err(Error::DuplicateVector(i));
            }
        }
        Ok(WitnessPair { field, d, x, lambda })
    }

    pub fn from_vectors(x: &[VectorFq], lambda: &[VectorFq]) -> Result<Self> {
        let first = x.first().or(lambda.first()).ok_or(Error::EmptyLambda)?;
        let field = first.field.clone();
        let d = first.len();
        for v in x.iter().chain(lambda) {
            if !same_field(&v.field, &field) {
                return Err(Error::MixedFields);
            }
        }
        Self::new(
            field,
            d,
            x.iter().map(|v| v.coords.clone()).collect(),
            lambda.iter().map(|v| v.coords.clone()).collect(),
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn n(&self) -> usize {
        self.x.len()
    }
    pub fn x(&self) -> &[Vec<Fe>] {
        &self.x
    }
    pub fn lambda(&self) -> &[Vec<Fe>] {
        &self.lambda
    }

    /// ⟨x_j, v_i⟩ for every message i (rows) and row vector j (columns).
    pub fn inner_product_table(&self) -> Vec<Vec<Fe>> {
        self.lambda.iter().map(|v| self.x.iter().map(|x| dot(&self.field, x, v)).collect()).collect()
    }

    /// The codeword X·v, i.e. (⟨x_1, v⟩, …, ⟨x_n, v⟩).
    pub fn codeword(&self, v: &[Fe]) -> Vec<Fe> {
        self.x.iter().map(|x| dot(&self.field, x, v)).collect()
    }

    /// Whether the rows of X span F^d.
    pub fn x_full_rank(&self) -> bool {
        span_dim(&self.field, self.d, &self.x) == self.d
    }

    pub fn lambda_dim(&self) -> usize {
        span_dim(&self.field, self.d, &self.lambda)
    }
}

/// Output of [`project_pair`].
#[derive(Clone, Debug)]
pub struct Projection {
    /// The projected pair in ambient dimension d′ = dim span(Λ).
    pub pair: WitnessPair,
    /// The d′ × d map A with x′ = A x; its rows are a basis of span(Λ).
    pub map: MatrixFq,
}

/// Re-expresses (X, Λ) inside span(Λ) while keeping every inner product.
///
/// A basis B of span(Λ) is taken greedily from Λ in ascending index-tuple
/// order. Each message is replaced by its coordinates in B and each row x by
/// B x, so ⟨B x, c⟩ = ⟨x, Bᵀ c⟩ = ⟨x, v⟩.
pub fn project_pair(w: &WitnessPair) -> Projection {
    let f = &w.field;
    let mut order: Vec<&Vec<Fe>> = w.lambda.iter().collect();
    order.sort();
    let mut eb = EchelonBasis::new(f.clone(), w.d);
    let mut basis: Vec<Vec<Fe>> = Vec::new();
    for v in order {
        if eb.insert(v) {
            basis.push(v.clone());
        }
    }
    let dp = basis.len();
    let lambda: Vec<Vec<Fe>> = w
        .lambda
        .iter()
        .map(|v| coordinates(f, &basis, v).expect("message lies in the span of the basis"))
        .collect();
    let x: Vec<Vec<Fe>> = w.x.iter().map(|x| basis.iter().map(|b| dot(f, b, x)).collect()).collect();
    let map = MatrixFq::from_rows(f.clone(), w.d, &basis).expect("basis rows have length d");
    let pair = WitnessPair { field: f.clone(), d: dp, x, lambda };
    Projection { pair, map }
}

/// Row-major index rows, the on-disk form of matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct IndexRows(pub Vec<Vec<u32>>);

pub(crate) fn to_indices(v: &[Fe]) -> Vec<u32> {
    v.iter().map(|e| e.0 as u32).collect()
}

pub(crate) fn from_indices(f: &FieldSpec, v: &[u32]) -> Result<Vec<Fe>> {
    v.iter().map(|&i| f.element(i)).collect()
}
