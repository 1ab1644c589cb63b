use super::matrix::RationalMatrix;
use super::rational::Rational;
use super::subspace::{kernel_basis, Subspace};
use crate::error::{Error, Result};

/// Joint eigenspace decomposition of pairwise commuting operators with integer
/// spectra drawn from `candidates[k]` for operator `k`.
///
/// Returns the nonzero joint eigenspaces keyed by eigenvalue tuple, in
/// lexicographic order of the tuple. Fails if the operators do not commute or
/// if the eigenspaces do not fill the ambient space (a non-semisimple
/// operator, or an eigenvalue outside the candidate range).
pub fn joint_eigen_decomposition(
    ops: &[RationalMatrix],
    candidates: &[Vec<i64>],
) -> Result<Vec<(Vec<i64>, Subspace)>> {
    let Some(first) = ops.first() else {
        return Err(Error::Shape("no operators supplied".into()));
    };
    let dim = first.rows();
    for op in ops {
        if op.shape() != (dim, dim) {
            return Err(Error::Shape("operators must be square of equal size".into()));
        }
    }
    if candidates.len() != ops.len() {
        return Err(Error::Shape("one candidate list per operator".into()));
    }
    for (a, x) in ops.iter().enumerate() {
        for y in &ops[a + 1..] {
            if !x.commutes_with(y)? {
                return Err(Error::NonCommuting);
            }
        }
    }
    let mut parts: Vec<(Vec<i64>, Subspace)> = vec![(Vec::new(), Subspace::full(dim))];
    for (op, cands) in ops.iter().zip(candidates) {
        let mut next = Vec::new();
        for (key, space) in parts {
            let basis = space.basis().clone();
            // restriction of op to the invariant subspace, in the subspace's basis
            let image = op.mul(&basis)?;
            let restricted = basis
                .solve_matrix(&image)?
                .ok_or_else(|| Error::NotInvariant("joint eigenspace".into()))?;
            let mut found = 0;
            for &lambda in cands {
                let k = kernel_basis(&restricted.shift_diagonal(&Rational::from_int(lambda)));
                if k.is_zero() {
                    continue;
                }
                found += k.dim();
                let ambient = Subspace::column_span(&basis.mul(k.basis())?);
                let mut key2 = key.clone();
                key2.push(lambda);
                next.push((key2, ambient));
            }
            if found != space.dim() {
                return Err(Error::EigenDefect { expected: space.dim(), found });
            }
        }
        parts = next;
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(parts)
}

/// Joint eigenspaces for the requested eigenvalue tuples (possibly zero).
///
/// The decomposition is computed and checked against the ambient dimension
/// using the values occurring in `values` as candidates.
pub fn simultaneous_eigenspaces(
    ops: &[RationalMatrix],
    values: &[Vec<i64>],
) -> Result<Vec<Subspace>> {
    let dim = ops.first().map_or(0, RationalMatrix::rows);
    let mut candidates: Vec<Vec<i64>> = vec![Vec::new(); ops.len()];
    for tuple in values {
        if tuple.len() != ops.len() {
            return Err(Error::Shape("eigenvalue tuple length differs from operator count".into()));
        }
        for (c, v) in candidates.iter_mut().zip(tuple) {
            if !c.contains(v) {
                c.push(*v);
            }
        }
    }
    for c in &mut candidates {
        c.sort_unstable();
    }
    let parts = joint_eigen_decomposition(ops, &candidates)?;
    Ok(values
        .iter()
        .map(|t| {
            parts
                .iter()
                .find(|(k, _)| k == t)
                .map(|(_, s)| s.clone())
                .unwrap_or_else(|| Subspace::zero(dim))
        })
        .collect())
}

/// Largest `i` with `m^i ≠ 0`; 0 for the zero map.
pub fn nilpotence_index(m: &RationalMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Shape("nilpotence index of a non-square matrix".into()));
    }
    let dim = m.rows();
    let mut power = m.clone();
    let mut index = 0;
    while !power.is_zero() {
        index += 1;
        if index > dim {
            return Err(Error::NotNilpotent);
        }
        power = power.mul(m)?;
    }
    Ok(index)
}
