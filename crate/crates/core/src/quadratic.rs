//! Rational quadratic spaces modelling `(H², q)`: standard test spaces, the
//! Mukai extension, isotropic sampling and Witt transport of isotropic planes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, int_vec, is_zero_vec, unit_vec, vec_scale, vec_sub};
use crate::linalg::{RationalMatrix, Rational, Subspace};

/// A nondegenerate symmetric bilinear form on ℚ^dim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceWire", into = "SpaceWire")]
pub struct QuadraticSpace {
    dim: usize,
    gram: RationalMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceWire {
    dim: usize,
    gram: Vec<Vec<Rational>>,
}

impl TryFrom<SpaceWire> for QuadraticSpace {
    type Error = Error;
    fn try_from(w: SpaceWire) -> Result<Self> {
        if w.gram.len() != w.dim {
            return Err(Error::Schema(format!("gram has {} rows, dim is {}", w.gram.len(), w.dim)));
        }
        QuadraticSpace::new(RationalMatrix::from_rows(&w.gram)?)
    }
}

impl From<QuadraticSpace> for SpaceWire {
    fn from(s: QuadraticSpace) -> Self {
        SpaceWire { dim: s.dim, gram: s.gram.to_rows() }
    }
}

impl QuadraticSpace {
    pub fn new(gram: RationalMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::InvalidSpace("gram matrix is not square".into()));
        }
        if gram != gram.transpose() {
            return Err(Error::InvalidSpace("gram matrix is not symmetric".into()));
        }
        if gram.rank() != gram.rows() {
            return Err(Error::InvalidSpace("gram matrix is degenerate".into()));
        }
        Ok(QuadraticSpace { dim: gram.rows(), gram })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn bilinear(&self, v: &[Rational], w: &[Rational]) -> Result<Rational> {
        if v.len() != self.dim || w.len() != self.dim {
            return Err(Error::Shape(format!(
                "vectors of length {} and {} in a {}-dimensional space",
                v.len(),
                w.len(),
                self.dim
            )));
        }
        Ok(dot(v, &self.gram.mul_vec(w)?))
    }

    /// `q(v) = q(v, v)`.
    pub fn quadratic(&self, v: &[Rational]) -> Result<Rational> {
        self.bilinear(v, v)
    }

    // shape-checked callers only
    pub(crate) fn b(&self, v: &[Rational], w: &[Rational]) -> Rational {
        self.bilinear(v, w).expect("vector length")
    }

    /// The linear form `q(v, ·)` as a row vector.
    pub fn dual(&self, v: &[Rational]) -> Vec<Rational> {
        self.gram.transpose().mul_vec(v).expect("vector length")
    }

    /// Orthogonal complement of the span of `vectors`.
    pub fn orthogonal_complement(&self, vectors: &[Vec<Rational>]) -> Subspace {
        if vectors.is_empty() {
            return Subspace::full(self.dim);
        }
        let rows: Vec<Vec<Rational>> = vectors.iter().map(|v| self.dual(v)).collect();
        crate::linalg::kernel_basis(&RationalMatrix::from_rows(&rows).expect("equal lengths"))
    }

    /// An orthogonal basis with the value of `q` on each vector.
    pub fn orthogonal_basis(&self) -> Vec<(Vec<Rational>, Rational)> {
        let mut remaining: Vec<Vec<Rational>> = (0..self.dim).map(|i| unit_vec(self.dim, i)).collect();
        let mut out = Vec::new();
        while !remaining.is_empty() {
            let pick = remaining.iter().position(|v| !self.b(v, v).is_zero());
            let a = match pick {
                Some(i) => remaining.remove(i),
                None => {
                    // all isotropic: some pair pairs nontrivially, by nondegeneracy
                    let (i, j) = (0..remaining.len())
                        .flat_map(|i| (i + 1..remaining.len()).map(move |j| (i, j)))
                        .find(|&(i, j)| !self.b(&remaining[i], &remaining[j]).is_zero())
                        .expect("nondegenerate form");
                    let sum: Vec<Rational> =
                        remaining[i].iter().zip(&remaining[j]).map(|(x, y)| x + y).collect();
                    remaining.remove(i);
                    sum
                }
            };
            let qa = self.b(&a, &a);
            remaining = remaining
                .into_iter()
                .map(|u| {
                    let c = &self.b(&u, &a) / &qa;
                    vec_sub(&u, &vec_scale(&a, &c))
                })
                .filter(|u| !is_zero_vec(u))
                .collect();
            // keep the leftover vectors independent
            let sub = Subspace::span(self.dim, &remaining).expect("lengths");
            remaining = sub.basis_vectors();
            out.push((a, qa));
        }
        out
    }

    /// `(positive, negative)` index of inertia.
    pub fn signature(&self) -> (usize, usize) {
        let basis = self.orthogonal_basis();
        let pos = basis.iter().filter(|(_, q)| !q.is_negative()).count();
        (pos, basis.len() - pos)
    }

    /// The reflection `x ↦ x − 2 q(x,v)/q(v) · v` for anisotropic `v`.
    pub fn reflection(&self, v: &[Rational]) -> Result<RationalMatrix> {
        let qv = self.quadratic(v)?;
        if qv.is_zero() {
            return Err(Error::InvalidSpace("reflection in an isotropic vector".into()));
        }
        let dual = self.dual(v);
        let c = &Rational::from_int(-2) / &qv;
        let mut m = RationalMatrix::identity(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = &m[(i, j)] + &(&c * &(&v[i] * &dual[j]));
            }
        }
        Ok(m)
    }

    pub fn is_isometry(&self, g: &RationalMatrix) -> bool {
        g.shape() == (self.dim, self.dim)
            && g.transpose().mul(&self.gram).and_then(|x| x.mul(g)).ok().as_ref() == Some(&self.gram)
    }

    /// A hyperbolic pair `(e, f)` inside `within` (or the whole space):
    /// `q(e) = q(f) = 0`, `q(e, f) = 1`.
    pub fn find_hyperbolic_pair(&self, within: Option<&Subspace>) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let basis = match within {
            Some(s) => s.basis_vectors(),
            None => (0..self.dim).map(|i| unit_vec(self.dim, i)).collect(),
        };
        let m = basis.len();
        let combine = |coeffs: &[i64]| -> Vec<Rational> {
            let mut v = vec![Rational::zero(); self.dim];
            for (c, b) in coeffs.iter().zip(&basis) {
                if *c != 0 {
                    let c = Rational::from_int(*c);
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = x.add_mul(&c, y);
                    }
                }
            }
            v
        };
        let mut isotropic = None;
        'search: for bound in 1..=2i64 {
            let mut coeffs = vec![-bound; m];
            let mut tried = 0usize;
            loop {
                tried += 1;
                if tried > 400_000 {
                    break;
                }
                if coeffs.iter().any(|&c| c != 0) {
                    let v = combine(&coeffs);
                    if self.b(&v, &v).is_zero() {
                        isotropic = Some(v);
                        break 'search;
                    }
                }
                // odometer over [-bound, bound]^m, low-index digits last so unit vectors come early
                let mut k = m;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    if coeffs[k] < bound {
                        coeffs[k] += 1;
                        for c in coeffs.iter_mut().skip(k + 1) {
                            *c = -bound;
                        }
                        break;
                    }
                    if k == 0 {
                        coeffs.clear();
                    }
                }
                if coeffs.is_empty() {
                    break;
                }
            }
        }
        // unit vectors first: they are the common case for standard spaces
        let unit_hit = basis.iter().find(|b| self.b(b, b).is_zero()).cloned();
        let e = unit_hit
            .or(isotropic)
            .ok_or_else(|| Error::NoHyperbolicPlane("no small rational isotropic vector".into()))?;
        let w = basis
            .iter()
            .find(|b| !self.b(&e, b).is_zero())
            .ok_or_else(|| Error::NoHyperbolicPlane("isotropic vector in the radical".into()))?
            .clone();
        Ok((e.clone(), hyperbolic_partner(self, &e, &w)))
    }

    /// Isotropic vectors `z + λe + μf` with `q(z) + 2λμ = 0`, `z ⊥ ⟨e, f⟩`,
    /// deterministic for a fixed seed. Vectors are scaled to integer entries.
    pub fn sample_isotropic(&self, count: usize, seed: u64) -> Result<Vec<Vec<Rational>>> {
        let mut sampler = IsotropicSampler::new(self, seed)?;
        Ok((0..count).map(|_| sampler.next_vector()).collect())
    }

    /// The transport itself is documented on [`witt_transport`].
    pub fn witt_transport(&self, p1: &IsotropicPlane, p2: &IsotropicPlane) -> Result<Isometry> {
        witt_transport(self, p1, p2)
    }
}

/// Seeded stream of integral isotropic vectors.
pub struct IsotropicSampler<'a> {
    space: &'a QuadraticSpace,
    e: Vec<Rational>,
    f: Vec<Rational>,
    complement: Vec<Vec<Rational>>,
    rng: ChaCha8Rng,
}

impl<'a> IsotropicSampler<'a> {
    pub fn new(space: &'a QuadraticSpace, seed: u64) -> Result<Self> {
        let (e, f) = space.find_hyperbolic_pair(None)?;
        let complement = space.orthogonal_complement(&[e.clone(), f.clone()]).basis_vectors();
        Ok(IsotropicSampler { space, e, f, complement, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn next_vector(&mut self) -> Vec<Rational> {
        let dim = self.space.dim();
        let mut z = vec![Rational::zero(); dim];
        for b in &self.complement {
            let c = Rational::from_int(self.rng.gen_range(-3..=3));
            for (x, y) in z.iter_mut().zip(b) {
                *x = x.add_mul(&c, y);
            }
        }
        let lambda = loop {
            let l: i64 = self.rng.gen_range(-3..=3);
            if l != 0 {
                break Rational::from_int(l);
            }
        };
        let mu = -(&self.space.b(&z, &z) / &(&Rational::from_int(2) * &lambda));
        let v: Vec<Rational> = (0..dim)
            .map(|i| &(&z[i] + &(&lambda * &self.e[i])) + &(&mu * &self.f[i]))
            .collect();
        clear_denominators(&v)
    }
}

/// `U ⊕ U ⊕ diag(tail)` with `U = [[0,1],[1,0]]`.
pub fn make_standard_space(b2: usize, tail: &[Rational]) -> Result<QuadraticSpace> {
    if b2 < 4 {
        return Err(Error::B2TooSmall(b2));
    }
    if tail.len() != b2 - 4 {
        return Err(Error::InvalidSpace(format!(
            "tail has {} entries, b2 - 4 = {}",
            tail.len(),
            b2 - 4
        )));
    }
    if tail.iter().any(Rational::is_zero) {
        return Err(Error::InvalidSpace("tail entries must be nonzero".into()));
    }
    let mut gram = RationalMatrix::zeros(b2, b2);
    for k in 0..2 {
        gram[(2 * k, 2 * k + 1)] = Rational::one();
        gram[(2 * k + 1, 2 * k)] = Rational::one();
    }
    for (i, t) in tail.iter().enumerate() {
        gram[(4 + i, 4 + i)] = t.clone();
    }
    QuadraticSpace::new(gram)
}

/// The default tail used by the instance grid: alternating `2, -2, 2, …`.
pub fn default_tail(b2: usize) -> Vec<Rational> {
    (0..b2.saturating_sub(4))
        .map(|i| Rational::from_int(if i % 2 == 0 { 2 } else { -2 }))
        .collect()
}

/// `space ⊕ U`.
pub fn mukai_extension(space: &QuadraticSpace) -> QuadraticSpace {
    let d = space.dim();
    let mut gram = RationalMatrix::zeros(d + 2, d + 2);
    gram.set_block(0, 0, space.gram());
    gram[(d, d + 1)] = Rational::one();
    gram[(d + 1, d)] = Rational::one();
    QuadraticSpace::new(gram).expect("orthogonal sum of nondegenerate forms")
}

/// `(w − q(w)/(2 q(e,w)) e) / q(e,w)`: isotropic, pairing to 1 with the isotropic `e`.
fn hyperbolic_partner(space: &QuadraticSpace, e: &[Rational], w: &[Rational]) -> Vec<Rational> {
    let b = space.b(e, w);
    let c = &space.b(w, w) / &(&Rational::from_int(2) * &b);
    vec_scale(&vec_sub(w, &vec_scale(e, &c)), &b.recip())
}

pub(crate) fn clear_denominators(v: &[Rational]) -> Vec<Rational> {
    use num_integer::Integer;
    let lcm = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(&x.denom()));
    let s = Rational::from(lcm);
    v.iter().map(|x| x * &s).collect()
}

/// Two independent vectors spanning a totally isotropic plane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicPlane {
    pub v1: Vec<Rational>,
    pub v2: Vec<Rational>,
}

impl IsotropicPlane {
    pub fn new(space: &QuadraticSpace, v1: Vec<Rational>, v2: Vec<Rational>) -> Result<Self> {
        let p = IsotropicPlane { v1, v2 };
        p.validate(space)?;
        Ok(p)
    }

    pub fn from_ints(space: &QuadraticSpace, v1: &[i64], v2: &[i64]) -> Result<Self> {
        Self::new(space, int_vec(v1), int_vec(v2))
    }

    pub fn validate(&self, space: &QuadraticSpace) -> Result<()> {
        let (q11, q22, q12) = (
            space.quadratic(&self.v1)?,
            space.quadratic(&self.v2)?,
            space.bilinear(&self.v1, &self.v2)?,
        );
        if !(q11.is_zero() && q22.is_zero() && q12.is_zero()) {
            return Err(Error::NotIsotropicPlane(format!("q(v1)={q11}, q(v2)={q22}, q(v1,v2)={q12}")));
        }
        if self.span().dim() != 2 {
            return Err(Error::NotIsotropicPlane("v1, v2 are dependent".into()));
        }
        Ok(())
    }

    pub fn span(&self) -> Subspace {
        Subspace::span(self.v1.len(), &[self.v1.clone(), self.v2.clone()]).expect("equal lengths")
    }
}

/// An element of SO(q).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isometry {
    pub matrix: RationalMatrix,
}

impl Isometry {
    pub fn validate(&self, space: &QuadraticSpace) -> Result<()> {
        if !space.is_isometry(&self.matrix) {
            return Err(Error::InvalidSpace("matrix does not preserve the gram matrix".into()));
        }
        let det = self.matrix.det()?;
        if !det.is_one() {
            return Err(Error::InvalidSpace(format!("determinant {det}, expected 1")));
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(v).expect("vector length")
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { matrix: self.matrix.inverse().expect("square").expect("isometries are invertible") }
    }
}

/// Hyperbolic partners `w1, w2` for an isotropic plane: `(v1,w1)` and
/// `(v2,w2)` are mutually orthogonal hyperbolic pairs.
fn hyperbolic_completion(space: &QuadraticSpace, p: &IsotropicPlane) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let solve_pairing = |vs: &[&Vec<Rational>], targets: &[i64]| -> Result<Vec<Rational>> {
        let rows: Vec<Vec<Rational>> = vs.iter().map(|v| space.dual(v)).collect();
        RationalMatrix::from_rows(&rows)?
            .solve(&int_vec(targets))?
            .ok_or_else(|| Error::NotIsotropicPlane("cannot complete to hyperbolic pairs".into()))
    };
    let w = solve_pairing(&[&p.v1, &p.v2], &[1, 0])?;
    let w1 = vec_sub(&w, &vec_scale(&p.v1, &(&space.b(&w, &w) / &Rational::from_int(2))));
    let w = solve_pairing(&[&p.v1, &p.v2, &w1], &[0, 1, 0])?;
    let w2 = vec_sub(&w, &vec_scale(&p.v2, &(&space.b(&w, &w) / &Rational::from_int(2))));
    Ok((w1, w2))
}

/// Some `g ∈ SO(q)` with `g(span p1) = span p2`.
///
/// Both planes are completed to `U ⊕ U` frames `(v1,w1,v2,w2)`; the
/// anisotropic orthogonal bases `v_i ± w_i` are matched one vector at a time
/// by reflections (each fixes the vectors already matched). If the result has
/// determinant −1 it is composed with a reflection in an anisotropic vector
/// orthogonal to `p2`. For `b2 = 4` no such vector exists and the planes are in
/// different SO-orbits.
pub fn witt_transport(space: &QuadraticSpace, p1: &IsotropicPlane, p2: &IsotropicPlane) -> Result<Isometry> {
    let b2 = space.dim();
    if b2 < 4 {
        return Err(Error::B2TooSmall(b2));
    }
    p1.validate(space)?;
    p2.validate(space)?;
    let frame = |p: &IsotropicPlane| -> Result<Vec<Vec<Rational>>> {
        let (w1, w2) = hyperbolic_completion(space, p)?;
        Ok(vec![
            crate::linalg::matrix::vec_add(&p.v1, &w1),
            vec_sub(&p.v1, &w1),
            crate::linalg::matrix::vec_add(&p.v2, &w2),
            vec_sub(&p.v2, &w2),
        ])
    };
    let src = frame(p1)?;
    let dst = frame(p2)?;
    let mut g = RationalMatrix::identity(b2);
    for (x0, y) in src.iter().zip(&dst) {
        let x = g.mul_vec(x0)?;
        if &x == y {
            continue;
        }
        let diff = vec_sub(&x, y);
        let step = if !space.b(&diff, &diff).is_zero() {
            space.reflection(&diff)?
        } else {
            // q(x+y) = 4 q(x) ≠ 0 here; x ↦ −y ↦ y
            let sum = crate::linalg::matrix::vec_add(&x, y);
            space.reflection(y)?.mul(&space.reflection(&sum)?)?
        };
        g = step.mul(&g)?;
    }
    if g.det()?.is_negative() {
        let perp = space.orthogonal_complement(&[p2.v1.clone(), p2.v2.clone()]);
        let fix = perp
            .basis_vectors()
            .into_iter()
            .chain(pairwise_sums(&perp.basis_vectors()))
            .find(|u| !space.b(u, u).is_zero());
        match fix {
            Some(u) => g = space.reflection(&u)?.mul(&g)?,
            None => {
                let meet = p1.span().intersection(&p2.span())?.dim();
                return Err(Error::TwoOrbitObstruction(format!(
                    "every isometry carrying the first plane to the second has determinant -1 \
                     (planes meet in dimension {meet}; same-family planes are transverse or equal)"
                )));
            }
        }
    }
    let iso = Isometry { matrix: g };
    iso.validate(space)?;
    if iso_image(&iso, p1) != p2.span() {
        return Err(Error::InvalidSpace("transport does not carry the planes onto each other".into()));
    }
    Ok(iso)
}

fn pairwise_sums(vs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            out.push(crate::linalg::matrix::vec_add(&vs[i], &vs[j]));
        }
    }
    out
}

fn iso_image(g: &Isometry, p: &IsotropicPlane) -> Subspace {
    p.span().image_under(&g.matrix).expect("square isometry")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn hyperbolic_pair_values() {
        let s = make_standard_space(4, &[]).unwrap();
        let e = int_vec(&[1, 0, 0, 0]);
        let f = int_vec(&[0, 1, 0, 0]);
        assert_eq!(s.bilinear(&e, &f).unwrap(), q(1));
        assert_eq!(s.quadratic(&e).unwrap(), q(0));
        assert_eq!(s.quadratic(&int_vec(&[1, 1, 0, 0])).unwrap(), q(2));
        assert!(s.bilinear(&e, &int_vec(&[1])).is_err());
    }

    #[test]
    fn standard_space_shapes() {
        let s4 = make_standard_space(4, &[]).unwrap();
        assert_eq!(s4.gram().det().unwrap(), q(1));
        // det(U) = −1 per hyperbolic block, times the tail
        let s5 = make_standard_space(5, &[q(2)]).unwrap();
        assert_eq!(s5.gram().det().unwrap(), q(2));
        let s7 = make_standard_space(7, &[q(2), q(2), q(-2)]).unwrap();
        assert_eq!(s7.gram().det().unwrap(), q(-8));
        assert_eq!(s7.signature(), (4, 3));
        assert!(matches!(make_standard_space(3, &[]), Err(Error::B2TooSmall(3))));
        assert!(make_standard_space(5, &[]).is_err());
    }

    #[test]
    fn mukai_adds_hyperbolic_plane() {
        let s = make_standard_space(4, &[]).unwrap();
        let m = mukai_extension(&s);
        assert_eq!(m.dim(), 6);
        assert_eq!(m.signature(), (3, 3));
        let s5 = make_standard_space(5, &[q(2)]).unwrap();
        let m5 = mukai_extension(&s5);
        assert_eq!(m5.dim(), 7);
        assert_eq!(m5.gram().rank(), 7);
        let (p, n) = s5.signature();
        assert_eq!(m5.signature(), (p + 1, n + 1));
    }

    #[test]
    fn isotropic_samples() {
        let s = make_standard_space(6, &[q(2), q(-2)]).unwrap();
        let vs = s.sample_isotropic(50, 11).unwrap();
        assert_eq!(vs.len(), 50);
        for v in &vs {
            assert!(s.quadratic(v).unwrap().is_zero());
            assert!(!is_zero_vec(v));
        }
        assert_eq!(vs, s.sample_isotropic(50, 11).unwrap());
        // z + e − f with q(z) = 2, λ = 1, μ = −1
        let v = int_vec(&[1, -1, 0, 0, 1, 0]);
        assert!(s.quadratic(&v).unwrap().is_zero());
    }

    #[test]
    fn reflections_are_isometries() {
        let s = make_standard_space(5, &[q(3)]).unwrap();
        let r = s.reflection(&int_vec(&[1, 1, 0, 1, 1])).unwrap();
        assert!(s.is_isometry(&r));
        assert_eq!(r.det().unwrap(), q(-1));
    }

    #[test]
    fn transport_identity_and_swap() {
        let s = make_standard_space(5, &[q(2)]).unwrap();
        let p = IsotropicPlane::from_ints(&s, &[1, 0, 0, 0, 0], &[0, 0, 1, 0, 0]).unwrap();
        let g = witt_transport(&s, &p, &p).unwrap();
        assert_eq!(g.matrix, RationalMatrix::identity(5));

        let p2 = IsotropicPlane::from_ints(&s, &[0, 1, 0, 0, 0], &[0, 0, 0, 1, 0]).unwrap();
        let g = witt_transport(&s, &p, &p2).unwrap();
        g.validate(&s).unwrap();
        assert_eq!(p.span().image_under(&g.matrix).unwrap(), p2.span());
        let back = g.inverse();
        assert_eq!(g.matrix.mul(&back.matrix).unwrap(), RationalMatrix::identity(5));
    }

    #[test]
    fn b2_four_orbits() {
        let s = make_standard_space(4, &[]).unwrap();
        let p = IsotropicPlane::from_ints(&s, &[1, 0, 0, 0], &[0, 0, 1, 0]).unwrap();
        // transverse partner: same family
        let transverse = IsotropicPlane::from_ints(&s, &[0, 1, 0, 0], &[0, 0, 0, 1]).unwrap();
        witt_transport(&s, &p, &transverse).unwrap().validate(&s).unwrap();
        // meets p in a line: other family
        let meeting = IsotropicPlane::from_ints(&s, &[1, 0, 0, 0], &[0, 0, 0, 1]).unwrap();
        assert!(matches!(witt_transport(&s, &p, &meeting), Err(Error::TwoOrbitObstruction(_))));
    }

    #[test]
    fn rejects_non_isotropic_plane() {
        let s = make_standard_space(4, &[]).unwrap();
        assert!(IsotropicPlane::from_ints(&s, &[1, 1, 0, 0], &[0, 0, 1, 0]).is_err());
        assert!(IsotropicPlane::from_ints(&s, &[1, 0, 0, 0], &[2, 0, 0, 0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = make_standard_space(5, &[Rational::new(-3, 2)]).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.contains("\"-3/2\""));
        let back: QuadraticSpace = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"dim":2,"gram":[["1","0"],["1","1"]]}"#;
        assert!(serde_json::from_str::<QuadraticSpace>(bad).is_err());
    }
}
