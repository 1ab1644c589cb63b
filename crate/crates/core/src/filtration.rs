//! Weight filtrations of nilpotent operators, the perverse filtration of an
//! isotropic class, and their comparisons with the bigrading.
//!
//! Weight filtrations are built from Jordan chains: a chain
//! `v, Nv, …, N^s v` contributes `N^t v` in weight `k + s − 2t`. The result is
//! checked against the two defining properties before it is returned.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, nilpotence_index, RationalMatrix, Rational, RowSpace, Subspace};
use crate::llv::{Bigrading, GradedOperator};

/// `W_0 ⊆ … ⊆ W_{2k}` for a nilpotent endomorphism, centred at `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFiltration {
    pub centre: usize,
    pub steps: Vec<Subspace>,
}

impl WeightFiltration {
    pub fn ambient_dim(&self) -> usize {
        self.steps.last().map_or(0, Subspace::ambient_dim)
    }

    /// `W_i`, with `W_i = 0` for `i < 0` and the whole space above `2k`.
    pub fn step(&self, i: i64) -> Subspace {
        if i < 0 {
            Subspace::zero(self.ambient_dim())
        } else if i as usize >= self.steps.len() {
            Subspace::full(self.ambient_dim())
        } else {
            self.steps[i as usize].clone()
        }
    }

    /// `dim Gr_i` for `i = 0..=2k`.
    pub fn gr_dims(&self) -> Vec<usize> {
        (0..self.steps.len() as i64).map(|i| self.step(i).dim() - self.step(i - 1).dim()).collect()
    }
}

/// Weight filtration of `nilp` centred at `centre`.
pub fn weight_filtration(nilp: &RationalMatrix, centre: usize) -> Result<WeightFiltration> {
    let dim = nilp.rows();
    let index = nilpotence_index(nilp)?;
    if index > centre {
        return Err(Error::Filtration(format!("nilpotence index {index} exceeds the centre {centre}")));
    }
    let mut powers = vec![RationalMatrix::identity(dim)];
    for _ in 0..=index {
        let next = nilp.mul(powers.last().expect("nonempty"))?;
        powers.push(next);
    }
    let kernels: Vec<Subspace> = powers.iter().map(kernel_basis).collect();

    // chains as (top vector, length), longest first
    let mut chains: Vec<(Vec<Rational>, usize)> = Vec::new();
    for len in (1..=index + 1).rev() {
        let mut covered = RowSpace::new(dim);
        for v in kernels[len - 1].basis_vectors() {
            covered.insert(&v);
        }
        for (v, l) in &chains {
            covered.insert(&powers[l - len].mul_vec(v)?);
        }
        let mut fresh = Vec::new();
        for v in kernels[len].basis_vectors() {
            if covered.insert(&v) {
                fresh.push((v, len));
            }
        }
        chains.extend(fresh);
    }

    let mut by_weight: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); 2 * centre + 1];
    for (v, len) in &chains {
        let s = len - 1;
        for (t, power) in powers.iter().enumerate().take(*len) {
            by_weight[centre + s - 2 * t].push(power.mul_vec(v)?);
        }
    }
    let mut acc: Vec<Vec<Rational>> = Vec::new();
    let mut steps = Vec::with_capacity(by_weight.len());
    for vs in by_weight {
        acc.extend(vs);
        steps.push(Subspace::span(dim, &acc)?);
    }
    let w = WeightFiltration { centre, steps };
    if let Some(why) = weight_filtration_defect(nilp, &w)? {
        return Err(Error::Filtration(format!("constructed filtration fails its axioms: {why}")));
    }
    Ok(w)
}

/// First violated defining property of a weight filtration, if any.
pub fn weight_filtration_defect(nilp: &RationalMatrix, w: &WeightFiltration) -> Result<Option<String>> {
    let dim = nilp.rows();
    let k = w.centre as i64;
    if w.steps.len() != 2 * w.centre + 1 || w.steps.iter().any(|s| s.ambient_dim() != dim) {
        return Ok(Some(format!("expected {} steps in ambient dimension {dim}", 2 * w.centre + 1)));
    }
    for i in 0..2 * k {
        if !w.step(i).is_subspace_of(&w.step(i + 1)) {
            return Ok(Some(format!("W_{i} is not contained in W_{}", i + 1)));
        }
    }
    if w.step(2 * k).dim() != dim {
        return Ok(Some(format!("W_{} is not the whole space", 2 * k)));
    }
    for i in 0..=2 * k {
        if !w.step(i).image_under(nilp)?.is_subspace_of(&w.step(i - 2)) {
            return Ok(Some(format!("N·W_{i} is not contained in W_{}", i - 2)));
        }
    }
    let mut power = RationalMatrix::identity(dim);
    for i in 0..=k {
        let (hi, lo) = (k + i, k - i);
        let gr_hi = w.step(hi).dim() - w.step(hi - 1).dim();
        let gr_lo = w.step(lo).dim() - w.step(lo - 1).dim();
        if gr_hi != gr_lo {
            return Ok(Some(format!("dim Gr_{hi} = {gr_hi} but dim Gr_{lo} = {gr_lo}")));
        }
        // N^i(W_{k+i}) must land in W_{k−i} and fill it modulo W_{k−i−1}
        let image = w.step(hi).image_under(&power)?;
        if !image.is_subspace_of(&w.step(lo)) || image.sum(&w.step(lo - 1))?.dim() != w.step(lo).dim() {
            return Ok(Some(format!("N^{i}: Gr_{hi} -> Gr_{lo} is not an isomorphism")));
        }
        power = nilp.mul(&power)?;
    }
    Ok(None)
}

pub fn verify_weight_filtration(nilp: &RationalMatrix, w: &WeightFiltration) -> bool {
    matches!(weight_filtration_defect(nilp, w), Ok(None))
}

/// Weight filtration of each degree block of a degree-0 operator.
pub fn graded_weight_filtration(op: &GradedOperator, centre: usize) -> Result<Vec<WeightFiltration>> {
    if op.offset() != 0 {
        return Err(Error::Filtration("blockwise weight filtration needs a degree-0 operator".into()));
    }
    op.blocks().iter().map(|b| weight_filtration(b, centre)).collect()
}

/// `P_j H^d` for `j = start, …, start + steps.len() − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerverseFiltration {
    pub degree: usize,
    pub start: i64,
    pub steps: Vec<Subspace>,
}

impl PerverseFiltration {
    pub fn step(&self, j: i64) -> Subspace {
        let ambient = self.steps[0].ambient_dim();
        if j < self.start {
            Subspace::zero(ambient)
        } else if (j - self.start) as usize >= self.steps.len() {
            Subspace::full(ambient)
        } else {
            self.steps[(j - self.start) as usize].clone()
        }
    }

    /// Nonzero `dim Gr^P_j` keyed by `j`.
    pub fn gr_dims(&self) -> BTreeMap<i64, usize> {
        (self.start..self.start + self.steps.len() as i64)
            .map(|j| (j, self.step(j).dim() - self.step(j - 1).dim()))
            .filter(|(_, d)| *d > 0)
            .collect()
    }
}

/// `P_j H^d = Σ_{t≥0} β^t·Ker(β^{n−(d−2t)+j+1} : H^{d−2t} → H^{2n−d+2t+2j+2})`.
/// A non-positive exponent contributes nothing.
pub fn perverse_step(l_beta: &GradedOperator, n: usize, d: usize, j: i64) -> Result<Subspace> {
    let dims = l_beta.dims();
    let mut vectors = Vec::new();
    for t in 0..=d / 2 {
        let src = d - 2 * t;
        let e = n as i64 - src as i64 + j + 1;
        if e <= 0 || dims[src] == 0 {
            continue;
        }
        let ker = kernel_basis(&l_beta.power_block(src, e as usize)?);
        let lift = l_beta.power_block(src, t)?;
        for v in ker.basis_vectors() {
            vectors.push(lift.mul_vec(&v)?);
        }
    }
    Subspace::span(dims[d], &vectors)
}

/// The chain `P_j H^d` for `j` from `d − 2n − 1` to `d`.
pub fn perverse_filtration(l_beta: &GradedOperator, n: usize, d: usize) -> Result<PerverseFiltration> {
    if l_beta.offset() != 2 {
        return Err(Error::Filtration("perverse filtration needs a degree-2 Lefschetz operator".into()));
    }
    let start = d as i64 - 2 * n as i64 - 1;
    let steps = (start..=d as i64).map(|j| perverse_step(l_beta, n, d, j)).collect::<Result<Vec<_>>>()?;
    Ok(PerverseFiltration { degree: d, start, steps })
}

/// `W_i ∩ H^d`, as a subspace of `H^d`, for a filtration of the total space.
pub fn slice_degree(w: &Subspace, op: &GradedOperator, d: usize) -> Result<Subspace> {
    let total = w.ambient_dim();
    let start = op.degree_start(d);
    let block = Subspace::coordinate(total, start, op.dims()[d]);
    Ok(w.intersection(&block)?.restrict_coordinates(start, op.dims()[d]))
}

/// Checks `W^{L_β}_i ∩ H^d = P_{d+i−2n} H^d` for all `i` and `d`; returns the
/// first mismatch.
pub fn perverse_weight_mismatch(l_beta: &GradedOperator, n: usize) -> Result<Option<String>> {
    let w = weight_filtration(&l_beta.to_total_matrix(), n)?;
    for d in 0..l_beta.dims().len() {
        if l_beta.dims()[d] == 0 {
            continue;
        }
        let p = perverse_filtration(l_beta, n, d)?;
        for i in -1..=2 * n as i64 {
            let lhs = slice_degree(&w.step(i), l_beta, d)?;
            let j = d as i64 + i - 2 * n as i64;
            if lhs != p.step(j) {
                return Ok(Some(format!(
                    "degree {d}: dim W_{i} ∩ H^{d} = {} but dim P_{j} = {}",
                    lhs.dim(),
                    p.step(j).dim()
                )));
            }
        }
        if p.step(d as i64).dim() != l_beta.dims()[d] {
            return Ok(Some(format!("P_{d} H^{d} is not exhaustive")));
        }
    }
    Ok(None)
}

pub fn crosscheck_perverse_weight(l_beta: &GradedOperator, n: usize) -> Result<bool> {
    Ok(perverse_weight_mismatch(l_beta, n)?.is_none())
}

/// `⊕ V^{p,q,•}` with `q ≥ q_min`, embedded in the total space.
fn conjugate_hodge_step(big: &Bigrading, dims: &[usize], q_min: i64) -> Result<Subspace> {
    let total: usize = dims.iter().sum();
    let mut vectors = Vec::new();
    for (&(p, q, _), sub) in &big.components {
        if q >= q_min {
            let d = (p + q) as usize;
            let start: usize = dims[..d].iter().sum();
            vectors.extend(sub.embed(total, start).basis_vectors());
        }
    }
    Subspace::span(total, &vectors)
}

/// Checks `W^{L_σ̄}_i = ⊕_{q ≥ 2n−i} V^{p,q,•}`; returns the first mismatch.
pub fn conjugate_hodge_mismatch(l_sbar: &GradedOperator, big: &Bigrading) -> Result<Option<String>> {
    let n = big.n;
    let w = weight_filtration(&l_sbar.to_total_matrix(), n)?;
    for i in 0..=2 * n as i64 {
        let rhs = conjugate_hodge_step(big, l_sbar.dims(), 2 * n as i64 - i)?;
        if w.step(i) != rhs {
            return Ok(Some(format!("dim W_{i} = {} but the q ≥ {} part has dim {}", w.step(i).dim(), 2 * n as i64 - i, rhs.dim())));
        }
    }
    Ok(None)
}

pub fn conjugate_hodge_check(l_sbar: &GradedOperator, big: &Bigrading) -> Result<bool> {
    Ok(conjugate_hodge_mismatch(l_sbar, big)?.is_none())
}

/// Dimensions keyed by `(degree, index)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDimTable {
    pub entries: BTreeMap<(usize, i64), usize>,
}

impl GradedDimTable {
    pub fn get(&self, degree: usize, index: i64) -> usize {
        self.entries.get(&(degree, index)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, degree: usize, index: i64, dim: usize) {
        if dim > 0 {
            *self.entries.entry((degree, index)).or_insert(0) += dim;
        }
    }

    pub fn row_sum(&self, degree: usize) -> usize {
        self.entries.iter().filter(|((d, _), _)| *d == degree).map(|(_, v)| v).sum()
    }

    /// `[[degree, index, dim], …]`, sorted.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<[i64; 3]> = self.entries.iter().map(|(&(d, i), &v)| [d as i64, i, v as i64]).collect();
        serde_json::json!(rows)
    }

    /// Aligned text: one row per degree, one column per index.
    pub fn render_text(&self, row_label: &str, col_label: &str) -> String {
        let degrees: Vec<usize> = self.entries.keys().map(|k| k.0).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let (lo, hi) = match (self.entries.keys().map(|k| k.1).min(), self.entries.keys().map(|k| k.1).max()) {
            (Some(a), Some(b)) => (a, b),
            _ => return String::from("(empty)\n"),
        };
        let width = self.entries.values().map(|v| v.to_string().len()).max().unwrap_or(1).max(3) + 1;
        let mut out = format!("{row_label:>6} |");
        for j in lo..=hi {
            let _ = write!(out, "{:>width$}", format!("{col_label}{j}"));
        }
        out.push('\n');
        for d in degrees {
            let _ = write!(out, "{d:>6} |");
            for j in lo..=hi {
                let v = self.get(d, j);
                let cell = if v == 0 { ".".to_string() } else { v.to_string() };
                let _ = write!(out, "{cell:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

/// Both sides of `dim Gr^M_{n+j} H^ℓ = Σ_{p+q=ℓ} dim Gr^P_{j+q} V^{p,q}`,
/// keyed by `(ℓ, n + j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrComparison {
    pub monodromy: GradedDimTable,
    pub bigraded: GradedDimTable,
    pub holds: bool,
}

pub fn compare_gr_dims(m_filt: &[WeightFiltration], big: &Bigrading) -> GrComparison {
    let n = big.n as i64;
    let mut monodromy = GradedDimTable::default();
    for (d, w) in m_filt.iter().enumerate() {
        for (i, dim) in w.gr_dims().into_iter().enumerate() {
            monodromy.add(d, i as i64, dim);
        }
    }
    let mut bigraded = GradedDimTable::default();
    for (&(p, q, i), sub) in &big.components {
        let j = i - q;
        bigraded.add((p + q) as usize, n + j, sub.dim());
    }
    let holds = monodromy == bigraded;
    GrComparison { monodromy, bigraded, holds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::int_vec;
    use crate::llv::{bigrading, build_frame, FrameOperators, LlvModule};
    use crate::quadratic::{default_tail, make_standard_space};
    use crate::verbitsky::{build_verbitsky, DEFAULT_BUDGET};
    use proptest::prelude::*;

    fn jordan(sizes: &[usize]) -> RationalMatrix {
        let dim: usize = sizes.iter().sum();
        let mut m = RationalMatrix::zeros(dim, dim);
        let mut at = 0;
        for &s in sizes {
            for t in 1..s {
                m[(at + t, at + t - 1)] = Rational::one();
            }
            at += s;
        }
        m
    }

    #[test]
    fn zero_map_is_pure() {
        let w = weight_filtration(&RationalMatrix::zeros(3, 3), 2).unwrap();
        assert_eq!(w.gr_dims(), vec![0, 0, 3, 0, 0]);
        assert!(w.step(1).is_zero());
    }

    #[test]
    fn single_block() {
        let w = weight_filtration(&jordan(&[3]), 2).unwrap();
        assert_eq!(w.gr_dims(), vec![1, 0, 1, 0, 1]);
        // the bottom of the chain sits in weight 0
        assert!(w.step(0).contains(&int_vec(&[0, 0, 1])));
        let shifted = WeightFiltration { centre: 2, steps: (0..5).map(|i| w.step(i - 1)).collect() };
        assert!(!verify_weight_filtration(&jordan(&[3]), &shifted));
    }

    #[test]
    fn index_above_centre_is_rejected() {
        assert!(matches!(weight_filtration(&jordan(&[3]), 1), Err(Error::Filtration(_))));
    }

    #[test]
    fn two_blocks_match_hand_built_filtration() {
        // blocks of sizes 3 and 2 in the scrambled basis g·e_i
        let g = RationalMatrix::from_i64_rows(&[
            &[1, 1, 0, 0, 0],
            &[0, 1, 0, 2, 0],
            &[0, 0, 1, 0, 1],
            &[1, 0, 0, 1, 0],
            &[0, 0, 0, 0, 1],
        ]);
        let gi = g.inverse().unwrap().unwrap();
        let n = g.mul(&jordan(&[3, 2])).unwrap().mul(&gi).unwrap();
        let col = |i: usize| g.column(i);
        // centre 2: block 3 gives weights 4,2,0; block 2 gives 3,1
        let hand = |vs: &[usize]| Subspace::span(5, &vs.iter().map(|&i| col(i)).collect::<Vec<_>>()).unwrap();
        let expected = WeightFiltration {
            centre: 2,
            steps: vec![hand(&[2]), hand(&[2, 4]), hand(&[1, 2, 4]), hand(&[1, 2, 3, 4]), hand(&[0, 1, 2, 3, 4])],
        };
        assert!(verify_weight_filtration(&n, &expected));
        assert_eq!(weight_filtration(&n, 2).unwrap(), expected);
    }

    proptest! {
        #[test]
        fn jordan_types_give_symmetric_gr(sizes in proptest::collection::vec(1usize..4, 1..4), extra in 0usize..2) {
            let centre = sizes.iter().max().unwrap() - 1 + extra;
            let m = jordan(&sizes);
            let w = weight_filtration(&m, centre).unwrap();
            let gr = w.gr_dims();
            let rev: Vec<usize> = gr.iter().rev().copied().collect();
            prop_assert_eq!(&gr, &rev);
            prop_assert!(verify_weight_filtration(&m, &w));
        }
    }

    fn setup(n: usize, b2: usize) -> (LlvModule, FrameOperators, Bigrading) {
        let s = make_standard_space(b2, &default_tail(b2)).unwrap();
        let alg = build_verbitsky(&s, n, DEFAULT_BUDGET, 0).unwrap();
        let module = LlvModule::from_algebra(&alg).unwrap();
        let frame = build_frame(module.space(), 0).unwrap();
        let ops = FrameOperators::new(&module, &module.lambda_linear().unwrap(), &frame).unwrap();
        let big = bigrading(&ops).unwrap();
        (module, ops, big)
    }

    #[test]
    fn perverse_degree_two() {
        for n in 1..=2 {
            let (_, ops, _) = setup(n, 5);
            let p = perverse_filtration(&ops.l_beta, n, 2).unwrap();
            assert_eq!(p.gr_dims(), [(0, 1), (1, 3), (2, 1)].into_iter().collect());
            assert_eq!(perverse_filtration(&ops.l_beta, n, 0).unwrap().gr_dims(), [(0, 1)].into_iter().collect());
        }
    }

    #[test]
    fn perverse_matches_weight_and_conjugate_hodge() {
        for (n, b2) in [(1, 4), (1, 5), (2, 5)] {
            let (_, ops, big) = setup(n, b2);
            assert_eq!(perverse_weight_mismatch(&ops.l_beta, n).unwrap(), None);
            assert_eq!(conjugate_hodge_mismatch(&ops.l_sbar, &big).unwrap(), None);
        }
    }

    #[test]
    fn monodromy_gr_matches_bigrading() {
        let (_, ops, big) = setup(2, 5);
        let wm = graded_weight_filtration(&ops.m().unwrap(), 2).unwrap();
        assert_eq!(wm[2].gr_dims(), vec![0, 2, 1, 2, 0]);
        let cmp = compare_gr_dims(&wm, &big);
        assert!(cmp.holds, "{cmp:?}");
        assert_eq!(cmp.monodromy.row_sum(4), 15);
        let text = cmp.monodromy.render_text("deg", "W");
        assert!(text.lines().count() == 6);
    }
}
