use serde::{Deserialize, Serialize};

use super::matrix::RationalMatrix;
use super::rational::Rational;
use crate::error::{Error, Result};

/// A linear subspace of ℚ^ambient_dim.
///
/// The basis is kept canonical: its columns are the nonzero rows of the
/// reduced row-echelon form of any spanning set. Two subspaces are equal
/// exactly when their stored bases are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RationalMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: RationalMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: RationalMatrix::identity(ambient_dim) }
    }

    /// Span of the columns of `m`.
    pub fn column_span(m: &RationalMatrix) -> Self {
        let rref = m.transpose().rref();
        let rows: Vec<usize> = (0..rref.rank).collect();
        let basis = rref.reduced.select_rows(&rows).transpose();
        Subspace { ambient_dim: m.rows(), basis }
    }

    pub fn span(ambient_dim: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        Ok(Self::column_span(&RationalMatrix::from_columns(ambient_dim, vectors)?))
    }

    /// Coordinate subspace spanned by standard basis vectors `start..start+len`.
    pub fn coordinate(ambient_dim: usize, start: usize, len: usize) -> Self {
        let mut basis = RationalMatrix::zeros(ambient_dim, len);
        for j in 0..len {
            basis[(start + j, j)] = Rational::one();
        }
        Subspace { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.columns()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        if v.iter().all(Rational::is_zero) {
            return true;
        }
        // canonical basis: coordinates are read off at the pivot positions
        let mut residual = v.to_vec();
        for j in 0..self.dim() {
            let col = self.basis.column(j);
            let p = col.iter().position(|x| !x.is_zero()).expect("nonzero basis vector");
            let c = residual[p].clone();
            if c.is_zero() {
                continue;
            }
            for (r, b) in residual.iter_mut().zip(&col) {
                if !b.is_zero() {
                    *r = &*r - &(&c * b);
                }
            }
        }
        residual.iter().all(Rational::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.basis_vectors().iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::column_span(&self.basis.hstack(&other.basis)?))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Self> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient_dim));
        }
        // A·x = B·y  ⇔  [A | −B]·(x, y) = 0
        let neg_b = other.basis.scale(&-Rational::one());
        let kernel = self.basis.hstack(&neg_b)?.kernel_columns();
        let k = self.dim();
        let vectors: Vec<Vec<Rational>> = kernel
            .iter()
            .map(|xy| self.basis.mul_vec(&xy[..k]).expect("shape"))
            .collect();
        Self::span(self.ambient_dim, &vectors)
    }

    /// Image `{m·v : v ∈ self}`.
    pub fn image_under(&self, m: &RationalMatrix) -> Result<Self> {
        if m.cols() != self.ambient_dim {
            return Err(Error::Shape("map does not act on this subspace's ambient".into()));
        }
        Ok(Self::column_span(&m.mul(&self.basis)?))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        self.basis.solve(v).ok().flatten()
    }

    /// Rows `start..start+len` of every basis vector, re-spanned in ℚ^len.
    /// Meaningful as "W ∩ block" only when the subspace is contained in the block.
    pub fn restrict_coordinates(&self, start: usize, len: usize) -> Self {
        Self::column_span(&self.basis.submatrix(start, len, 0, self.dim()))
    }

    /// Embeds ℚ^ambient into ℚ^total at coordinate offset `start`.
    pub fn embed(&self, total: usize, start: usize) -> Self {
        let mut basis = RationalMatrix::zeros(total, self.dim());
        basis.set_block(start, 0, &self.basis);
        Subspace { ambient_dim: total, basis }
    }
}

pub fn kernel_basis(m: &RationalMatrix) -> Subspace {
    Subspace::span(m.cols(), &m.kernel_columns()).expect("kernel vectors have the column length")
}

pub fn image_basis(m: &RationalMatrix) -> Subspace {
    Subspace::column_span(m)
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.sum(b)
}

pub fn subspace_intersection(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersection(b)
}

/// An incrementally grown row space kept in fully reduced echelon form.
///
/// Rows are stored sparsely; once the rank is close to the ambient
/// dimension each row has few nonzeros, so reducing a new vector is cheap.
#[derive(Debug, Clone)]
pub struct RowSpace {
    dim: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    pivot_of_col: Vec<Option<usize>>,
}

impl RowSpace {
    pub fn new(dim: usize) -> Self {
        RowSpace { dim, rows: Vec::new(), pivot_of_col: vec![None; dim] }
    }

    /// Row space of `vectors`, reduced in bulk (multi-modular when large).
    pub fn from_vectors(dim: usize, vectors: &[Vec<Rational>]) -> Self {
        if vectors.len() * dim >= super::matrix::MODULAR_THRESHOLD {
            if let Some((pivots, rows)) = super::modular::modular_rref(vectors, dim) {
                let mut pivot_of_col = vec![None; dim];
                for (i, &c) in pivots.iter().enumerate() {
                    pivot_of_col[c] = Some(i);
                }
                let rows = rows
                    .into_iter()
                    .map(|r| r.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                    .collect();
                return RowSpace { dim, rows, pivot_of_col };
            }
        }
        let mut out = RowSpace::new(dim);
        for v in vectors {
            out.insert(v);
        }
        out
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_of_col[col].is_some()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        (0..self.dim).filter(|&c| self.is_pivot(c)).collect()
    }

    pub fn free_cols(&self) -> Vec<usize> {
        (0..self.dim).filter(|&c| !self.is_pivot(c)).collect()
    }

    /// Reduces `v` against the stored rows; the result is supported on free columns.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = v.to_vec();
        for c in 0..self.dim {
            if out[c].is_zero() {
                continue;
            }
            if let Some(r) = self.pivot_of_col[c] {
                let f = out[c].clone();
                for (j, x) in &self.rows[r] {
                    out[*j] = &out[*j] - &(&f * x);
                }
            }
        }
        out
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let red = self.reduce(v);
        let Some(p) = red.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = red[p].recip();
        let new_row: Vec<(usize, Rational)> = red
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (j, x * &inv))
            .collect();
        // clear column p from the existing rows
        for row in &mut self.rows {
            let Some(pos) = row.iter().position(|(j, _)| *j == p) else {
                continue;
            };
            let f = row[pos].1.clone();
            let mut dense: std::collections::BTreeMap<usize, Rational> = row.drain(..).collect();
            for (j, x) in &new_row {
                let e = dense.entry(*j).or_insert_with(Rational::zero);
                *e = &*e - &(&f * x);
            }
            *row = dense.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        }
        self.pivot_of_col[p] = Some(self.rows.len());
        self.rows.push(new_row);
        true
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Rational::is_zero)
    }

    pub fn to_subspace(&self) -> Subspace {
        let vectors: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|row| {
                let mut v = vec![Rational::zero(); self.dim];
                for (j, x) in row {
                    v[*j] = x.clone();
                }
                v
            })
            .collect();
        Subspace::span(self.dim, &vectors).expect("row lengths match")
    }
}
