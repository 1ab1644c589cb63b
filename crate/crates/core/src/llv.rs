//! Graded operators, LLV modules and the operators built from a Hodge frame.
//!
//! A module is a graded space `H^0 ⊕ … ⊕ H^{4n}` (any parity) with Lefschetz
//! operators `L_{e_i}` for a basis of `H²`; the grading operator is
//! `h = (d − 2n)` on `H^d`. Dual Lefschetz operators are solved from the
//! primitive decomposition.
//!
//! `x ↦ Λ_x` is not linear (`Λ_{cx} = Λ_x / c`). The linear extension used
//! here is `Λ^lin_x = (q(x)/2) Λ_x` on anisotropic `x`, which is linear in `x`
//! and equals `Λ_x` whenever `q(x) = 2`. With it,
//! `[L_x, Λ^lin_y] + [L_y, Λ^lin_x] = q(x, y)·h`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::{unit_vec, vec_add, vec_sub};
use crate::linalg::{joint_eigen_decomposition, kernel_basis, RationalMatrix, Rational, Subspace};
use crate::quadratic::{Isometry, QuadraticSpace};
use crate::verbitsky::{AlgebraElement, GradedAlgebra};

/// A homogeneous endomorphism of a graded space. `blocks[d]` maps `H^d` to
/// `H^{d+offset}` (an empty-row matrix when the target degree is out of range).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OperatorWire", into = "OperatorWire")]
pub struct GradedOperator {
    offset: i32,
    dims: Vec<usize>,
    blocks: Vec<RationalMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorWire {
    offset: i32,
    dims: Vec<usize>,
    blocks: Vec<RationalMatrix>,
}

impl TryFrom<OperatorWire> for GradedOperator {
    type Error = Error;
    fn try_from(w: OperatorWire) -> Result<Self> {
        GradedOperator::from_blocks(&w.dims, w.offset, w.blocks)
    }
}

impl From<GradedOperator> for OperatorWire {
    fn from(o: GradedOperator) -> Self {
        OperatorWire { offset: o.offset, dims: o.dims, blocks: o.blocks }
    }
}

fn target_degree(dims: &[usize], d: usize, offset: i32) -> Option<usize> {
    let t = d as i64 + offset as i64;
    (t >= 0 && (t as usize) < dims.len()).then_some(t as usize)
}

impl GradedOperator {
    pub fn zero(dims: &[usize], offset: i32) -> Self {
        let blocks = (0..dims.len())
            .map(|d| {
                let rows = target_degree(dims, d, offset).map_or(0, |t| dims[t]);
                RationalMatrix::zeros(rows, dims[d])
            })
            .collect();
        GradedOperator { offset, dims: dims.to_vec(), blocks }
    }

    pub fn from_blocks(dims: &[usize], offset: i32, blocks: Vec<RationalMatrix>) -> Result<Self> {
        if blocks.len() != dims.len() {
            return Err(Error::Shape(format!("{} blocks for {} degrees", blocks.len(), dims.len())));
        }
        for (d, b) in blocks.iter().enumerate() {
            let rows = target_degree(dims, d, offset).map_or(0, |t| dims[t]);
            if b.shape() != (rows, dims[d]) {
                return Err(Error::Shape(format!(
                    "block in degree {d} is {:?}, expected {:?}",
                    b.shape(),
                    (rows, dims[d])
                )));
            }
        }
        Ok(GradedOperator { offset, dims: dims.to_vec(), blocks })
    }

    /// `c(d)·id` on each `H^d`.
    pub fn diagonal(dims: &[usize], c: impl Fn(usize) -> Rational) -> Self {
        let blocks = dims.iter().enumerate().map(|(d, &k)| RationalMatrix::scalar(k, c(d))).collect();
        GradedOperator { offset: 0, dims: dims.to_vec(), blocks }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self::diagonal(dims, |_| Rational::one())
    }

    pub fn offset(&self) -> i32 {
        self.offset
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn blocks(&self) -> &[RationalMatrix] {
        &self.blocks
    }

    pub fn block(&self, d: usize) -> &RationalMatrix {
        &self.blocks[d]
    }

    pub fn target(&self, d: usize) -> Option<usize> {
        target_degree(&self.dims, d, self.offset)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::Shape("operators on different graded spaces".into()));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let offset = self.offset + other.offset;
        let mut out = Self::zero(&self.dims, offset);
        for d in 0..self.dims.len() {
            let (Some(mid), Some(_)) = (other.target(d), target_degree(&self.dims, d, offset)) else {
                continue;
            };
            out.blocks[d] = self.blocks[mid].mul(&other.blocks[d])?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        if self.offset != other.offset {
            return Err(Error::Shape("adding operators of different degrees".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(GradedOperator { offset: self.offset, dims: self.dims.clone(), blocks })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Rational::from_int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        GradedOperator {
            offset: self.offset,
            dims: self.dims.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::identity(&self.dims);
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(RationalMatrix::is_zero)
    }

    /// Offset of `H^d` inside the total space.
    pub fn degree_start(&self, d: usize) -> usize {
        self.dims[..d].iter().sum()
    }

    pub fn to_total_matrix(&self) -> RationalMatrix {
        let total: usize = self.dims.iter().sum();
        let mut m = RationalMatrix::zeros(total, total);
        for d in 0..self.dims.len() {
            if let Some(t) = self.target(d) {
                m.set_block(self.degree_start(t), self.degree_start(d), &self.blocks[d]);
            }
        }
        m
    }

    /// Applies the operator to a vector of `H^d`.
    pub fn apply(&self, d: usize, v: &[Rational]) -> Result<Vec<Rational>> {
        self.blocks[d].mul_vec(v)
    }

    /// `self^k` restricted to `H^d`, as a matrix into `H^{d+k·offset}`.
    pub fn power_block(&self, d: usize, k: usize) -> Result<RationalMatrix> {
        let mut acc = RationalMatrix::identity(self.dims[d]);
        let mut cur = d;
        for _ in 0..k {
            match self.target(cur) {
                Some(t) => {
                    acc = self.blocks[cur].mul(&acc)?;
                    cur = t;
                }
                None => return Ok(RationalMatrix::zeros(0, self.dims[d])),
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sl2Triple {
    pub e: GradedOperator,
    pub f: GradedOperator,
    pub h: GradedOperator,
}

/// Which of `[e,f]=h`, `[h,e]=2e`, `[h,f]=−2f` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Check {
    pub ef_is_h: bool,
    pub he_is_2e: bool,
    pub hf_is_minus_2f: bool,
}

impl Sl2Check {
    pub fn holds(&self) -> bool {
        self.ef_is_h && self.he_is_2e && self.hf_is_minus_2f
    }
}

pub fn check_sl2(t: &Sl2Triple) -> Result<Sl2Check> {
    Ok(Sl2Check {
        ef_is_h: t.e.commutator(&t.f)? == t.h,
        he_is_2e: t.h.commutator(&t.e)? == t.e.scale(&Rational::from_int(2)),
        hf_is_minus_2f: t.h.commutator(&t.f)? == t.f.scale(&Rational::from_int(-2)),
    })
}

pub fn verify_sl2(t: &Sl2Triple) -> bool {
    check_sl2(t).map(|c| c.holds()).unwrap_or(false)
}

/// A graded module with Lefschetz operators for a basis of `H²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlvModule {
    n: usize,
    space: QuadraticSpace,
    dims: Vec<usize>,
    lefschetz_basis: Vec<GradedOperator>,
}

impl LlvModule {
    pub fn new(n: usize, space: QuadraticSpace, dims: Vec<usize>, lefschetz_basis: Vec<GradedOperator>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModule("n must be at least 1".into()));
        }
        if dims.len() != 4 * n + 1 {
            return Err(Error::InvalidModule(format!("{} degrees declared, expected 4n+1 = {}", dims.len(), 4 * n + 1)));
        }
        if lefschetz_basis.len() != space.dim() {
            return Err(Error::InvalidModule(format!(
                "{} Lefschetz operators for b2 = {}",
                lefschetz_basis.len(),
                space.dim()
            )));
        }
        for l in &lefschetz_basis {
            if l.offset != 2 || l.dims != dims {
                return Err(Error::InvalidModule("Lefschetz operators must have degree 2 on the declared space".into()));
            }
        }
        Ok(LlvModule { n, space, dims, lefschetz_basis })
    }

    /// `SH` with its multiplication operators.
    pub fn from_algebra(alg: &GradedAlgebra) -> Result<Self> {
        let n = alg.n();
        let dims: Vec<usize> = (0..=4 * n).map(|d| alg.dim_of_degree(d)).collect();
        let mut basis = Vec::with_capacity(alg.b2());
        for i in 0..alg.b2() {
            let sh_blocks = alg.lefschetz_blocks(&unit_vec(alg.b2(), i))?;
            let blocks = (0..=4 * n)
                .map(|d| {
                    if d % 2 == 0 && d + 2 <= 4 * n {
                        sh_blocks[d / 2].clone()
                    } else {
                        let rows = if d + 2 <= 4 * n { dims[d + 2] } else { 0 };
                        RationalMatrix::zeros(rows, dims[d])
                    }
                })
                .collect();
            basis.push(GradedOperator::from_blocks(&dims, 2, blocks)?);
        }
        LlvModule::new(n, alg.space().clone(), dims, basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn lefschetz_basis(&self) -> &[GradedOperator] {
        &self.lefschetz_basis
    }

    pub fn has_odd_part(&self) -> bool {
        self.dims.iter().enumerate().any(|(d, &k)| d % 2 == 1 && k > 0)
    }

    pub fn lefschetz(&self, x: &[Rational]) -> Result<GradedOperator> {
        if x.len() != self.space.dim() {
            return Err(Error::Shape("class of the wrong length".into()));
        }
        let mut acc = GradedOperator::zero(&self.dims, 2);
        for (c, l) in x.iter().zip(&self.lefschetz_basis) {
            if !c.is_zero() {
                acc = acc.add(&l.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// `h = (d − 2n)` on `H^d`.
    pub fn grading(&self) -> GradedOperator {
        let n2 = 2 * self.n as i64;
        GradedOperator::diagonal(&self.dims, |d| Rational::from_int(d as i64 - n2))
    }

    /// The unique `Λ_x` of degree −2 making `(L_x, Λ_x, h)` an sl2-triple.
    pub fn dual_lefschetz(&self, x: &[Rational]) -> Result<GradedOperator> {
        let l = self.lefschetz(x)?;
        dual_from_lefschetz(&l, self.n)
    }

    pub fn lambda_linear(&self) -> Result<LinearLambda> {
        LinearLambda::new(self, &greedy_anisotropic_basis(&self.space)?)
    }
}

/// `Λ` for a Lefschetz operator `l` of degree 2 on a space graded by `h = d − 2n`.
pub fn dual_from_lefschetz(l: &GradedOperator, n: usize) -> Result<GradedOperator> {
    let dims = l.dims().to_vec();
    let top = 4 * n;
    // primitive parts P^d = ker L^{2n−d+1}, d ≤ 2n; hard Lefschetz checked on the way
    let mut primitive: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); dims.len()];
    for d in 0..=2 * n.min(top / 2) {
        let m = 2 * n - d;
        let lm = l.power_block(d, m)?;
        if dims[d] != dims[top - d] || lm.rank() != dims[d] {
            return Err(Error::NotLefschetz(format!(
                "L^{m}: H^{d} -> H^{} is not bijective (dims {} -> {})",
                top - d,
                dims[d],
                dims[top - d]
            )));
        }
        primitive[d] = kernel_basis(&l.power_block(d, m + 1)?).basis_vectors();
    }
    let mut blocks: Vec<RationalMatrix> = Vec::with_capacity(dims.len());
    for big_d in 0..dims.len() {
        let rows = if big_d >= 2 { dims[big_d - 2] } else { 0 };
        if dims[big_d] == 0 || big_d < 2 {
            blocks.push(RationalMatrix::zeros(rows, dims[big_d]));
            continue;
        }
        let mut basis_cols = Vec::new();
        let mut image_cols = Vec::new();
        for r in 0..=big_d / 2 {
            let d = big_d - 2 * r;
            if d > 2 * n || r > 2 * n - d {
                continue;
            }
            let m = (2 * n - d) as i64;
            let lr = l.power_block(d, r)?;
            let lr1 = if r > 0 { Some(l.power_block(d, r - 1)?) } else { None };
            let coef = Rational::from_int(r as i64 * (m - r as i64 + 1));
            for p in &primitive[d] {
                basis_cols.push(lr.mul_vec(p)?);
                image_cols.push(match &lr1 {
                    Some(m1) => m1.mul_vec(p)?.iter().map(|x| x * &coef).collect(),
                    None => vec![Rational::zero(); rows],
                });
            }
        }
        let b = RationalMatrix::from_columns(dims[big_d], &basis_cols)?;
        let y = RationalMatrix::from_columns(rows, &image_cols)?;
        if b.cols() != dims[big_d] {
            return Err(Error::NotLefschetz(format!(
                "primitive decomposition of H^{big_d} has {} vectors for dimension {}",
                b.cols(),
                dims[big_d]
            )));
        }
        // Λ·B = Y  ⇔  Bᵀ·Λᵀ = Yᵀ
        let lam_t = b
            .transpose()
            .solve_matrix(&y.transpose())?
            .ok_or_else(|| Error::NotLefschetz(format!("primitive decomposition of H^{big_d} is degenerate")))?;
        blocks.push(lam_t.transpose());
    }
    let lam = GradedOperator::from_blocks(&dims, -2, blocks)?;
    let h = GradedOperator::diagonal(&dims, |d| Rational::from_int(d as i64 - 2 * n as i64));
    if l.commutator(&lam)? != h {
        return Err(Error::NotLefschetz("[L, Λ] ≠ h after solving".into()));
    }
    Ok(lam)
}

/// Anisotropic basis from `e_i`, `e_i + e_j`, `e_i − e_j`, chosen greedily.
pub fn greedy_anisotropic_basis(space: &QuadraticSpace) -> Result<Vec<Vec<Rational>>> {
    let b = space.dim();
    let mut candidates: Vec<Vec<Rational>> = (0..b).map(|i| unit_vec(b, i)).collect();
    for i in 0..b {
        for j in i + 1..b {
            candidates.push(vec_add(&unit_vec(b, i), &unit_vec(b, j)));
            candidates.push(vec_sub(&unit_vec(b, i), &unit_vec(b, j)));
        }
    }
    pick_basis(space, candidates)
}

/// Anisotropic basis of small random integer vectors.
pub fn random_anisotropic_basis(space: &QuadraticSpace, seed: u64) -> Result<Vec<Vec<Rational>>> {
    let b = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<Vec<Rational>> = (0..64 * b)
        .map(|_| (0..b).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect())
        .collect();
    pick_basis(space, candidates)
}

fn pick_basis(space: &QuadraticSpace, candidates: Vec<Vec<Rational>>) -> Result<Vec<Vec<Rational>>> {
    let b = space.dim();
    let mut rows = crate::linalg::RowSpace::new(b);
    let mut out = Vec::new();
    for v in candidates {
        if out.len() == b {
            break;
        }
        if space.quadratic(&v)?.is_zero() {
            continue;
        }
        if rows.insert(&v) {
            out.push(v);
        }
    }
    if out.len() < b {
        return Err(Error::InvalidSpace("no anisotropic basis among the candidates".into()));
    }
    Ok(out)
}

/// `y ↦ Λ^lin_y`, assembled from `(q(x_i)/2) Λ_{x_i}` on an anisotropic basis.
#[derive(Debug, Clone)]
pub struct LinearLambda {
    basis: Vec<Vec<Rational>>,
    /// columns are the basis vectors
    basis_matrix: RationalMatrix,
    ops: Vec<GradedOperator>,
    dims: Vec<usize>,
}

impl LinearLambda {
    pub fn new(module: &LlvModule, basis: &[Vec<Rational>]) -> Result<Self> {
        let space = module.space();
        let two = Rational::from_int(2);
        let ops = basis
            .iter()
            .map(|x| Ok(module.dual_lefschetz(x)?.scale(&(&space.quadratic(x)? / &two))))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearLambda {
            basis: basis.to_vec(),
            basis_matrix: RationalMatrix::from_columns(space.dim(), basis)?,
            ops,
            dims: module.dims().to_vec(),
        })
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn at(&self, y: &[Rational]) -> Result<GradedOperator> {
        let c = self
            .basis_matrix
            .solve(y)?
            .ok_or_else(|| Error::Shape("class outside the span of the basis".into()))?;
        let mut acc = GradedOperator::zero(&self.dims, -2);
        for (ci, op) in c.iter().zip(&self.ops) {
            if !ci.is_zero() {
                acc = acc.add(&op.scale(ci))?;
            }
        }
        Ok(acc)
    }

    /// Agreement with another basis on every coordinate vector; returns the
    /// first disagreeing index.
    pub fn agrees_with(&self, other: &LinearLambda) -> Result<Option<usize>> {
        let b = self.basis_matrix.rows();
        for i in 0..b {
            let e = unit_vec(b, i);
            if self.at(&e)? != other.at(&e)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// The rational stand-in for `(σ, σ̄, β, η)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeFrame {
    pub s: Vec<Rational>,
    pub sbar: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub eta: Vec<Rational>,
    pub u_complement: Subspace,
}

impl HodgeFrame {
    pub fn new(space: &QuadraticSpace, s: Vec<Rational>, sbar: Vec<Rational>, beta: Vec<Rational>, eta: Vec<Rational>) -> Result<Self> {
        let u_complement = space.orthogonal_complement(&[s.clone(), sbar.clone(), beta.clone(), eta.clone()]);
        let f = HodgeFrame { s, sbar, beta, eta, u_complement };
        f.validate(space)?;
        Ok(f)
    }

    pub fn validate(&self, space: &QuadraticSpace) -> Result<()> {
        let v = [&self.s, &self.sbar, &self.beta, &self.eta];
        let names = ["s", "sbar", "beta", "eta"];
        // expected Gram: two orthogonal hyperbolic pairs
        let expect = |i: usize, j: usize| -> i64 { i64::from(matches!((i, j), (0, 1) | (1, 0) | (2, 3) | (3, 2))) };
        for i in 0..4 {
            for j in i..4 {
                let got = space.bilinear(v[i], v[j])?;
                if got != Rational::from_int(expect(i, j)) {
                    return Err(Error::Frame(format!("q({}, {}) = {got}, expected {}", names[i], names[j], expect(i, j))));
                }
            }
        }
        let expected_perp = space.orthogonal_complement(&[self.s.clone(), self.sbar.clone(), self.beta.clone(), self.eta.clone()]);
        if expected_perp != self.u_complement {
            return Err(Error::Frame("u_complement is not the orthogonal complement of the frame".into()));
        }
        Ok(())
    }

    /// Image under an isometry.
    pub fn transformed(&self, space: &QuadraticSpace, g: &Isometry) -> Result<Self> {
        HodgeFrame::new(space, g.apply(&self.s), g.apply(&self.sbar), g.apply(&self.beta), g.apply(&self.eta))
    }
}

/// Seed 0 gives the frame read off from the first two hyperbolic pairs found;
/// other seeds move it by a seeded product of an even number of reflections.
pub fn build_frame(space: &QuadraticSpace, seed: u64) -> Result<HodgeFrame> {
    let (s, sbar) = space
        .find_hyperbolic_pair(None)
        .map_err(|e| Error::Frame(format!("first hyperbolic pair: {e}")))?;
    let perp = space.orthogonal_complement(&[s.clone(), sbar.clone()]);
    let (beta, eta) = space
        .find_hyperbolic_pair(Some(&perp))
        .map_err(|e| Error::Frame(format!("second hyperbolic pair: {e}")))?;
    let frame = HodgeFrame::new(space, s, sbar, beta, eta)?;
    if seed == 0 {
        return Ok(frame);
    }
    frame.transformed(space, &random_rotation(space, seed)?)
}

/// Product of two or four reflections in small random anisotropic vectors.
pub fn random_rotation(space: &QuadraticSpace, seed: u64) -> Result<Isometry> {
    let b = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = if rng.gen_bool(0.5) { 2 } else { 4 };
    let mut g = RationalMatrix::identity(b);
    let mut made = 0;
    while made < count {
        let v: Vec<Rational> = (0..b).map(|_| Rational::from_int(rng.gen_range(-1..=1))).collect();
        if space.quadratic(&v)?.is_zero() {
            continue;
        }
        g = space.reflection(&v)?.mul(&g)?;
        made += 1;
    }
    let iso = Isometry { matrix: g };
    iso.validate(space)?;
    Ok(iso)
}

/// Lefschetz and linear dual Lefschetz operators of a frame.
#[derive(Debug, Clone)]
pub struct FrameOperators {
    pub n: usize,
    pub h: GradedOperator,
    pub l_s: GradedOperator,
    pub l_sbar: GradedOperator,
    pub l_beta: GradedOperator,
    pub l_eta: GradedOperator,
    pub lam_s: GradedOperator,
    pub lam_sbar: GradedOperator,
    pub lam_beta: GradedOperator,
    pub lam_eta: GradedOperator,
}

impl FrameOperators {
    pub fn new(module: &LlvModule, lambda: &LinearLambda, frame: &HodgeFrame) -> Result<Self> {
        Ok(FrameOperators {
            n: module.n(),
            h: module.grading(),
            l_s: module.lefschetz(&frame.s)?,
            l_sbar: module.lefschetz(&frame.sbar)?,
            l_beta: module.lefschetz(&frame.beta)?,
            l_eta: module.lefschetz(&frame.eta)?,
            lam_s: lambda.at(&frame.s)?,
            lam_sbar: lambda.at(&frame.sbar)?,
            lam_beta: lambda.at(&frame.beta)?,
            lam_eta: lambda.at(&frame.eta)?,
        })
    }

    /// `M = [L_β, Λ_σ̄]`.
    pub fn m(&self) -> Result<GradedOperator> {
        self.l_beta.commutator(&self.lam_sbar)
    }

    pub fn h_s(&self) -> Result<GradedOperator> {
        self.l_s.commutator(&self.lam_sbar)
    }

    pub fn h_sbar(&self) -> Result<GradedOperator> {
        self.l_sbar.commutator(&self.lam_s)
    }

    pub fn h_beta(&self) -> Result<GradedOperator> {
        self.l_beta.commutator(&self.lam_eta)
    }

    pub fn h_eta(&self) -> Result<GradedOperator> {
        self.l_eta.commutator(&self.lam_beta)
    }

    /// `(M, [Λ_s, L_η], H_β − H_s)`: the normalization in which the pair closes
    /// to an sl2-triple when `H_s = (p − n)·id`.
    pub fn m_triple(&self) -> Result<Sl2Triple> {
        Ok(Sl2Triple { e: self.m()?, f: self.lam_s.commutator(&self.l_eta)?, h: self.h_beta()?.sub(&self.h_s()?)? })
    }

    /// `(2M, 2[Λ_s, L_η], H_β − H_s)`, the doubled scaling. Its bracket
    /// `[E, F]` is `4·(H_β − H_s)` here, see [`m_triple`](Self::m_triple).
    pub fn m_triple_doubled(&self) -> Result<Sl2Triple> {
        let two = Rational::from_int(2);
        let t = self.m_triple()?;
        Ok(Sl2Triple { e: t.e.scale(&two), f: t.f.scale(&two), h: t.h })
    }

    /// All triples used by the bigrading, with names.
    pub fn triples(&self) -> Result<Vec<(&'static str, Sl2Triple)>> {
        Ok(vec![
            ("(L_s, Λ_sbar, H_s)", Sl2Triple { e: self.l_s.clone(), f: self.lam_sbar.clone(), h: self.h_s()? }),
            ("(L_sbar, Λ_s, H_sbar)", Sl2Triple { e: self.l_sbar.clone(), f: self.lam_s.clone(), h: self.h_sbar()? }),
            ("(L_beta, Λ_eta, H_beta)", Sl2Triple { e: self.l_beta.clone(), f: self.lam_eta.clone(), h: self.h_beta()? }),
            ("(L_eta, Λ_beta, H_eta)", Sl2Triple { e: self.l_eta.clone(), f: self.lam_beta.clone(), h: self.h_eta()? }),
            ("(M, [Λ_s, L_eta], H_beta − H_s)", self.m_triple()?),
        ])
    }
}

/// `M` for a module and frame, building the linear Λ on the greedy basis.
pub fn build_m(module: &LlvModule, frame: &HodgeFrame) -> Result<GradedOperator> {
    FrameOperators::new(module, &module.lambda_linear()?, frame)?.m()
}

/// `V^{p,q,i}` as subspaces of `H^{p+q}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bigrading {
    pub n: usize,
    pub components: BTreeMap<(i64, i64, i64), Subspace>,
}

impl Bigrading {
    pub fn dim(&self, p: i64, q: i64, i: i64) -> usize {
        self.components.get(&(p, q, i)).map_or(0, Subspace::dim)
    }

    /// Nonzero dimensions keyed by `(p, q, i)`.
    pub fn dim_table(&self) -> BTreeMap<(i64, i64, i64), usize> {
        self.components.iter().map(|(k, s)| (*k, s.dim())).filter(|(_, d)| *d > 0).collect()
    }

    pub fn degree_components(&self, d: usize) -> impl Iterator<Item = (&(i64, i64, i64), &Subspace)> {
        self.components.iter().filter(move |((p, q, _), _)| (p + q) as usize == d)
    }

    /// First `(p, q, i)` breaking `dim V^{p,q,i} = dim V^{q,p,i} = dim V^{i,p+q−i,p} = dim V^{p+q−i,i,p}`.
    pub fn symmetry_violation(&self) -> Option<(i64, i64, i64)> {
        let keys: Vec<(i64, i64, i64)> = self.dim_table().keys().copied().collect();
        for (p, q, i) in keys {
            let d = self.dim(p, q, i);
            let images = [(q, p, i), (i, p + q - i, p), (p + q - i, i, p)];
            if images.iter().any(|&(a, b, c)| self.dim(a, b, c) != d) {
                return Some((p, q, i));
            }
        }
        None
    }
}

/// Joint eigenspaces of `H_s`, `H_σ̄`, `H_β` per degree.
pub fn bigrading(ops: &FrameOperators) -> Result<Bigrading> {
    let n = ops.n as i64;
    let (hs, hsb, hb) = (ops.h_s()?, ops.h_sbar()?, ops.h_beta()?);
    let cands: Vec<i64> = (-2 * n..=2 * n).collect();
    let mut components = BTreeMap::new();
    for d in 0..hs.dims().len() {
        if hs.dims()[d] == 0 {
            continue;
        }
        let parts = joint_eigen_decomposition(
            &[hs.block(d).clone(), hsb.block(d).clone(), hb.block(d).clone()],
            &[cands.clone(), cands.clone(), cands.clone()],
        )?;
        for (key, sub) in parts {
            let p = key[0] + n;
            let q = key[1] + n;
            let i = p + q - n - key[2];
            if (p + q) as usize != d {
                return Err(Error::Frame(format!("H_s + H_sbar has eigenvalue {} on H^{d}", p + q - 2 * n)));
            }
            components.insert((p, q, i), sub);
        }
    }
    Ok(Bigrading { n: ops.n, components })
}

/// Outcome of a randomized derivation test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub trials: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

impl DerivationReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Tests `op(ab) = op(a)b + a·op(b)` on random homogeneous pairs of `SH`.
pub fn verify_derivation(alg: &GradedAlgebra, op: &GradedOperator, trials: usize, seed: u64) -> Result<DerivationReport> {
    let top = 2 * alg.n();
    let shift = op.offset() / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut witness = None;
    let mut done = 0;
    let random_element = |rng: &mut ChaCha8Rng, k: usize| -> AlgebraElement {
        let coords = (0..alg.dims()[k]).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect();
        AlgebraElement { degree: 2 * k, coords }
    };
    let apply = |x: &AlgebraElement| -> Result<AlgebraElement> {
        let t = op
            .target(x.degree)
            .ok_or_else(|| Error::DegreeOverflow("operator leaves the graded range".into()))?;
        Ok(AlgebraElement { degree: t, coords: op.apply(x.degree, &x.coords)? })
    };
    while done < trials {
        let i = rng.gen_range(0..=top);
        let j = rng.gen_range(0..=top - i);
        let sum = (i + j) as i64 + shift as i64;
        if sum < 0 || sum > top as i64 || i as i64 + (shift as i64) < 0 || j as i64 + (shift as i64) < 0 {
            continue;
        }
        let a = random_element(&mut rng, i);
        let b = random_element(&mut rng, j);
        let lhs = apply(&alg.multiply(&a, &b)?)?;
        let rhs = alg.multiply(&apply(&a)?, &b)?.add(&alg.multiply(&a, &apply(&b)?)?)?;
        if lhs != rhs {
            failures += 1;
            if witness.is_none() {
                witness = Some(format!("degrees ({}, {}): a = {:?}, b = {:?}", 2 * i, 2 * j, fmt_vec(&a.coords), fmt_vec(&b.coords)));
            }
        }
        done += 1;
    }
    Ok(DerivationReport { trials, failures, witness })
}

pub(crate) fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Skew-compatibility `q(Mv, w) + q(v, Mw) = 0` of a degree-0 operator on `H²`.
pub fn is_q_skew_on_h2(space: &QuadraticSpace, op: &GradedOperator) -> Result<bool> {
    let m = op.block(2);
    let g = space.gram();
    Ok(m.transpose().mul(g)?.add(&g.mul(m)?)?.is_zero())
}

/// The rank-2 model `v ↦ q(β, v)·σ̄ − q(σ̄, v)·β` on `H²`.
pub fn rank_two_model(space: &QuadraticSpace, frame: &HodgeFrame) -> RationalMatrix {
    let b = space.dim();
    let db = space.dual(&frame.beta);
    let ds = space.dual(&frame.sbar);
    let mut m = RationalMatrix::zeros(b, b);
    for i in 0..b {
        for j in 0..b {
            m[(i, j)] = &(&frame.sbar[i] * &db[j]) - &(&frame.beta[i] * &ds[j]);
        }
    }
    m
}
