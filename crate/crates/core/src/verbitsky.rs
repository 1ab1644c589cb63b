//! The Verbitsky component `SH = Sym•H² / ⟨v^{n+1} : q(v) = 0⟩`.
//!
//! Degrees are stored in units of two: `SH_k` lives in cohomological degree
//! `2k`, `0 ≤ k ≤ 2n`. Below `n+1` there are no relations. In degree `n+1` the
//! ideal is spanned by `(n+1)`-st powers of sampled isotropic vectors. Above
//! that, `SH_k` is presented as `SH_{k−1} ⊗ H²` modulo the relations that make
//! multiplication commutative, which avoids ever forming `Sym^k` relations.
//!
//! Every basis vector carries a monomial label whose image under the quotient
//! map is that basis vector, so the product of two basis vectors is the
//! projection of the product of their labels.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::modular::{primes, ModRowSpace};
use crate::linalg::{RationalMatrix, Rational, RowSpace};
use crate::quadratic::{IsotropicSampler, QuadraticSpace};

pub const ALGEBRA_SCHEMA_VERSION: u32 = 1;

/// Extra samples drawn after the target dimension is reached.
pub const CONFIRMATION_SAMPLES: usize = 16;

pub const DEFAULT_BUDGET: usize = 4096;

/// Exponent vector of a monomial in the coordinates of `H²`.
pub type Monomial = Vec<u16>;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim SH^{2k} = dim Sym^{min(k, 2n−k)}(ℚ^{b2})`.
pub fn expected_dim(b2: usize, n: usize, k: usize) -> usize {
    if k > 2 * n {
        return 0;
    }
    let m = k.min(2 * n - k);
    binomial(b2 + m - 1, m)
}

/// All monomials of degree `k` in `vars` variables, largest first in
/// graded reverse lexicographic order.
pub fn monomials(vars: usize, k: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; vars];
    fn rec(i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left as u16;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u16;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if vars == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, k, &mut cur, &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    out
}

/// Graded reverse lexicographic comparison.
pub fn grevlex_cmp(a: &[u16], b: &[u16]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let (da, db): (u32, u32) = (a.iter().map(|&x| x as u32).sum(), b.iter().map(|&x| x as u32).sum());
    if da != db {
        return da.cmp(&db);
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            // smaller exponent in the last differing variable is larger
            return if x < y { Ordering::Greater } else { Ordering::Less };
        }
    }
    Ordering::Equal
}

pub fn monomial_label(m: &[u16]) -> String {
    let mut s = String::new();
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !s.is_empty() {
            s.push('*');
        }
        let _ = write!(s, "x{i}");
        if e > 1 {
            let _ = write!(s, "^{e}");
        }
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

pub fn parse_monomial_label(label: &str, vars: usize) -> Result<Monomial> {
    let mut m = vec![0u16; vars];
    if label == "1" {
        return Ok(m);
    }
    let bad = || Error::Schema(format!("bad monomial label {label:?}"));
    for factor in label.split('*') {
        let rest = factor.strip_prefix('x').ok_or_else(bad)?;
        let (var, exp) = match rest.split_once('^') {
            Some((v, e)) => (v, e.parse::<u16>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let var: usize = var.parse().map_err(|_| bad())?;
        if var >= vars || exp == 0 {
            return Err(bad());
        }
        m[var] += exp;
    }
    Ok(m)
}

fn smallest_var(m: &[u16]) -> Option<usize> {
    m.iter().position(|&e| e > 0)
}

fn mono_add(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn factorial(k: usize) -> Rational {
    (1..=k as i64).map(Rational::from_int).product()
}

/// Coordinates of `v^k` in the monomial basis `monos` of `Sym^k`.
pub fn power_in_sym(v: &[Rational], monos: &[Monomial]) -> Vec<Rational> {
    let k: usize = monos.first().map_or(0, |m| m.iter().map(|&e| e as usize).sum());
    let kf = factorial(k);
    monos
        .iter()
        .map(|m| {
            let mut c = kf.clone();
            for (x, &e) in v.iter().zip(m) {
                if e > 0 {
                    c = &(&c * &x.pow(e as u32)) / &factorial(e as usize);
                }
            }
            c
        })
        .collect()
}

/// Structure constants for `SH_left × SH_right → SH_{left+right}`, `left ≤ right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultTable {
    pub left: usize,
    pub right: usize,
    right_dim: usize,
    products: Vec<Vec<(usize, Rational)>>,
}

impl MultTable {
    /// Sparse `(i, j, k, value)` quadruples in row-major `(i, j)` order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for (idx, prod) in self.products.iter().enumerate() {
            let (i, j) = (idx / self.right_dim, idx % self.right_dim);
            for (k, v) in prod {
                out.push((i, j, *k, v.clone()));
            }
        }
        out
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.products[i * self.right_dim + j]
    }
}

/// Sampling statistics for the degree-`n+1` ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingStats {
    pub samples_used: usize,
    pub confirmations: usize,
    pub ideal_dim: usize,
}

#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    n: usize,
    space: QuadraticSpace,
    dims: Vec<usize>,
    labels: Vec<Vec<Monomial>>,
    mult: Vec<MultTable>,
    /// `projections[k]`: `dims[k] × |monomials of degree k|`.
    projections: Vec<RationalMatrix>,
    mono_index: Vec<HashMap<Monomial, usize>>,
    stats: Option<SamplingStats>,
}

impl PartialEq for GradedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.space == other.space
            && self.dims == other.dims
            && self.labels == other.labels
            && self.mult == other.mult
    }
}

/// A homogeneous element; `degree` is the cohomological (even) degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub degree: usize,
    pub coords: Vec<Rational>,
}

impl AlgebraElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rational::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AlgebraElement { degree: self.degree, coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree || self.coords.len() != other.coords.len() {
            return Err(Error::Shape("adding elements of different degrees".into()));
        }
        Ok(AlgebraElement {
            degree: self.degree,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }
}

struct Builder<'a> {
    space: &'a QuadraticSpace,
    n: usize,
    b: usize,
    monos: Vec<Vec<Monomial>>,
    mono_index: Vec<HashMap<Monomial, usize>>,
}

impl Builder<'_> {
    fn unit_projection(&self, k: usize) -> RationalMatrix {
        RationalMatrix::identity(self.monos[k].len())
    }

    fn ideal_degree(&self, budget: usize, seed: u64) -> Result<(RationalMatrix, Vec<Monomial>, SamplingStats)> {
        let k = self.n + 1;
        let monos = &self.monos[k];
        let target = expected_dim(self.b, self.n, k);
        let ideal_target = monos.len() - target;
        // rank is tracked modulo a prime; the exact span is reduced in bulk below
        let mut tracker = ModRowSpace::new(monos.len(), primes()[0]);
        let mut samples = Vec::new();
        let mut sampler = IsotropicSampler::new(self.space, seed)?;
        let mut draw = |samples: &mut Vec<Vec<Rational>>, tracker: &mut ModRowSpace| {
            let v = power_in_sym(&sampler.next_vector(), monos);
            tracker.insert_rational(&v);
            samples.push(v);
        };
        while tracker.rank() < ideal_target {
            if samples.len() == budget {
                return Err(Error::BudgetExhausted {
                    degree: 2 * k,
                    budget,
                    achieved: monos.len() - tracker.rank(),
                    target,
                });
            }
            draw(&mut samples, &mut tracker);
        }
        let used = samples.len();
        for _ in 0..CONFIRMATION_SAMPLES {
            draw(&mut samples, &mut tracker);
        }
        let rows = RowSpace::from_vectors(monos.len(), &samples);
        if rows.rank() > ideal_target {
            return Err(Error::IdealOvershoot { degree: 2 * k, achieved: monos.len() - rows.rank(), target });
        }
        let free = rows.free_cols();
        let mut proj = RationalMatrix::zeros(free.len(), monos.len());
        let mut unit = vec![Rational::zero(); monos.len()];
        for c in 0..monos.len() {
            unit[c] = Rational::one();
            let red = rows.reduce(&unit);
            unit[c] = Rational::zero();
            for (r, &f) in free.iter().enumerate() {
                proj[(r, c)] = red[f].clone();
            }
        }
        let labels = free.iter().map(|&c| monos[c].clone()).collect();
        Ok((proj, labels, SamplingStats { samples_used: used, confirmations: CONFIRMATION_SAMPLES, ideal_dim: rows.rank() }))
    }

    /// `SH_k` as `SH_{k−1} ⊗ H²` modulo commutativity relations.
    fn tensor_degree(&self, k: usize, prev_proj: &RationalMatrix, prev_labels: &[Monomial]) -> Result<(RationalMatrix, Vec<Monomial>)> {
        let b = self.b;
        let prev_dim = prev_labels.len();
        let wdim = prev_dim * b;
        let embed = |m_prev: &Monomial, var: usize| -> Vec<Rational> {
            let col = self.mono_index[k - 1][m_prev];
            let mut w = vec![Rational::zero(); wdim];
            for j in 0..prev_dim {
                let x = &prev_proj[(j, col)];
                if !x.is_zero() {
                    w[j * b + var] = x.clone();
                }
            }
            w
        };
        let divide = |m: &Monomial, var: usize| -> Monomial {
            let mut d = m.clone();
            d[var] -= 1;
            d
        };
        let mut relations = Vec::new();
        for m in &self.monos[k] {
            let support: Vec<usize> = (0..b).filter(|&i| m[i] > 0).collect();
            for pair in support.windows(2) {
                let (i, j) = (pair[0], pair[1]);
                let wi = embed(&divide(m, i), i);
                let wj = embed(&divide(m, j), j);
                relations.push(wi.iter().zip(&wj).map(|(x, y)| x - y).collect::<Vec<Rational>>());
            }
        }
        let rows = RowSpace::from_vectors(wdim, &relations);
        let free = rows.free_cols();
        let target = expected_dim(b, self.n, k);
        if free.len() != target {
            return Err(Error::QuotientMismatch { degree: 2 * k, achieved: free.len(), target });
        }
        let monos = &self.monos[k];
        let mut proj = RationalMatrix::zeros(free.len(), monos.len());
        for (c, m) in monos.iter().enumerate() {
            let var = smallest_var(m).expect("positive degree");
            let red = rows.reduce(&embed(&divide(m, var), var));
            for (r, &f) in free.iter().enumerate() {
                proj[(r, c)] = red[f].clone();
            }
        }
        let labels = free.iter().map(|&f| mono_add(&prev_labels[f / b], &unit_mono(b, f % b))).collect();
        Ok((proj, labels))
    }
}

fn unit_mono(vars: usize, i: usize) -> Monomial {
    let mut m = vec![0; vars];
    m[i] = 1;
    m
}

fn monomial_tables(b: usize, top: usize) -> (Vec<Vec<Monomial>>, Vec<HashMap<Monomial, usize>>) {
    let monos: Vec<Vec<Monomial>> = (0..=top).map(|k| monomials(b, k)).collect();
    let index = monos
        .iter()
        .map(|ms| ms.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect())
        .collect();
    (monos, index)
}

/// Builds `SH` for the given `(H², q)` and `n`.
pub fn build_verbitsky(space: &QuadraticSpace, n: usize, sample_budget: usize, seed: u64) -> Result<GradedAlgebra> {
    if n == 0 {
        return Err(Error::DegreeOverflow("n must be at least 1".into()));
    }
    let b = space.dim();
    let (monos, mono_index) = monomial_tables(b, 2 * n);
    let builder = Builder { space, n, b, monos, mono_index };
    let mut projections = Vec::with_capacity(2 * n + 1);
    let mut labels: Vec<Vec<Monomial>> = Vec::with_capacity(2 * n + 1);
    for k in 0..=n {
        projections.push(builder.unit_projection(k));
        labels.push(builder.monos[k].clone());
    }
    let (proj, lab, stats) = builder.ideal_degree(sample_budget, seed)?;
    projections.push(proj);
    labels.push(lab);
    for k in n + 2..=2 * n {
        let (proj, lab) = builder.tensor_degree(k, &projections[k - 1], &labels[k - 1])?;
        projections.push(proj);
        labels.push(lab);
    }
    let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
    let mut alg = GradedAlgebra {
        n,
        space: space.clone(),
        dims,
        labels,
        mult: Vec::new(),
        projections,
        mono_index: builder.mono_index,
        stats: Some(stats),
    };
    alg.mult = alg.tables_from_projections();
    alg.check_labels()?;
    Ok(alg)
}

impl GradedAlgebra {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }

    pub fn b2(&self) -> usize {
        self.space.dim()
    }

    /// Dimensions indexed by `k`, i.e. of `SH^{2k}`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension of `SH^d`; zero for odd `d` or out of range.
    pub fn dim_of_degree(&self, d: usize) -> usize {
        if d % 2 == 1 || d > 4 * self.n {
            0
        } else {
            self.dims[d / 2]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn labels(&self, k: usize) -> &[Monomial] {
        &self.labels[k]
    }

    pub fn basis_labels(&self, k: usize) -> Vec<String> {
        self.labels[k].iter().map(|m| monomial_label(m)).collect()
    }

    pub fn stats(&self) -> Option<SamplingStats> {
        self.stats
    }

    pub fn mult_tables(&self) -> &[MultTable] {
        &self.mult
    }

    fn table(&self, a: usize, b: usize) -> &MultTable {
        debug_assert!(a <= b && a + b <= 2 * self.n);
        // tables are stored for a in 0.., b in a..=2n−a
        let mut idx = 0;
        for x in 0..a {
            idx += 2 * self.n - 2 * x + 1;
        }
        &self.mult[idx + (b - a)]
    }

    /// Quotient coordinates of a monomial.
    pub fn project_monomial(&self, m: &[u16]) -> Result<Vec<Rational>> {
        let k: usize = m.iter().map(|&e| e as usize).sum();
        if k > 2 * self.n {
            return Err(Error::DegreeOverflow(format!("monomial of degree {} above {}", 2 * k, 4 * self.n)));
        }
        let col = *self.mono_index[k]
            .get(m)
            .ok_or_else(|| Error::Shape("monomial has the wrong number of variables".into()))?;
        Ok(self.projections[k].column(col))
    }

    /// Quotient map `Sym^k → SH^{2k}` as a matrix.
    pub fn projection(&self, k: usize) -> &RationalMatrix {
        &self.projections[k]
    }

    pub fn sym_monomials(&self, k: usize) -> Vec<Monomial> {
        let mut ms: Vec<(Monomial, usize)> = self.mono_index[k].iter().map(|(m, &i)| (m.clone(), i)).collect();
        ms.sort_by_key(|(_, i)| *i);
        ms.into_iter().map(|(m, _)| m).collect()
    }

    pub fn element(&self, degree: usize, coords: Vec<Rational>) -> Result<AlgebraElement> {
        if self.dim_of_degree(degree) != coords.len() || degree % 2 == 1 || degree > 4 * self.n {
            return Err(Error::Shape(format!("{} coordinates in degree {degree}", coords.len())));
        }
        Ok(AlgebraElement { degree, coords })
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement { degree: 0, coords: vec![Rational::one()] }
    }

    pub fn zero(&self, degree: usize) -> AlgebraElement {
        AlgebraElement { degree, coords: vec![Rational::zero(); self.dim_of_degree(degree)] }
    }

    /// A class in `H²` as an element of `SH²`.
    pub fn degree_two(&self, v: &[Rational]) -> Result<AlgebraElement> {
        self.element(2, v.to_vec())
    }

    pub fn basis_element(&self, degree: usize, i: usize) -> AlgebraElement {
        let mut e = self.zero(degree);
        e.coords[i] = Rational::one();
        e
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let (ka, kb) = (a.degree / 2, b.degree / 2);
        if ka + kb > 2 * self.n {
            return Err(Error::DegreeOverflow(format!(
                "{} + {} exceeds top degree {}",
                a.degree,
                b.degree,
                4 * self.n
            )));
        }
        if a.coords.len() != self.dims[ka] || b.coords.len() != self.dims[kb] {
            return Err(Error::Shape("element coordinates do not match the degree".into()));
        }
        let (x, y) = if ka <= kb { (a, b) } else { (b, a) };
        let t = self.table(x.degree / 2, y.degree / 2);
        let mut out = vec![Rational::zero(); self.dims[ka + kb]];
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, v) in t.product(i, j) {
                    out[*k] = out[*k].add_mul(&c, v);
                }
            }
        }
        Ok(AlgebraElement { degree: a.degree + b.degree, coords: out })
    }

    pub fn power(&self, x: &AlgebraElement, k: usize) -> Result<AlgebraElement> {
        if x.degree != 2 {
            return Err(Error::Shape("power expects a degree-2 class".into()));
        }
        if k > 2 * self.n {
            return Err(Error::DegreeOverflow(format!("x^{k} exceeds degree {}", 4 * self.n)));
        }
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.multiply(&acc, x)?;
        }
        Ok(acc)
    }

    /// Coordinate on the one-dimensional top degree.
    pub fn top_functional(&self, a: &AlgebraElement) -> Result<Rational> {
        if a.degree != 4 * self.n {
            return Err(Error::Shape(format!("top functional on degree {}", a.degree)));
        }
        Ok(a.coords[0].clone())
    }

    /// Matrix of multiplication by the `i`-th basis vector of `SH^{2a}`, from `SH^{2b}`.
    pub fn multiplication_matrix(&self, a: usize, i: usize, b: usize) -> Result<RationalMatrix> {
        if a + b > 2 * self.n {
            return Err(Error::DegreeOverflow("multiplication matrix above top degree".into()));
        }
        let mut m = RationalMatrix::zeros(self.dims[a + b], self.dims[b]);
        for j in 0..self.dims[b] {
            let prod = if a <= b { self.table(a, b).product(i, j) } else { self.table(b, a).product(j, i) };
            for (k, v) in prod {
                m[(*k, j)] = v.clone();
            }
        }
        Ok(m)
    }

    /// Blocks of `L_x` from `SH^{2k}` to `SH^{2k+2}`, `k = 0..2n−1`.
    pub fn lefschetz_blocks(&self, x: &[Rational]) -> Result<Vec<RationalMatrix>> {
        if x.len() != self.b2() {
            return Err(Error::Shape("lefschetz class has the wrong length".into()));
        }
        (0..2 * self.n)
            .map(|k| {
                let mut m = RationalMatrix::zeros(self.dims[k + 1], self.dims[k]);
                for (i, xi) in x.iter().enumerate() {
                    if !xi.is_zero() {
                        m = m.add(&self.multiplication_matrix(1, i, k)?.scale(xi))?;
                    }
                }
                Ok(m)
            })
            .collect()
    }

    fn tables_from_projections(&self) -> Vec<MultTable> {
        let mut out = Vec::new();
        for a in 0..=self.n * 2 {
            for b in a..=2 * self.n - a {
                let mut products = Vec::with_capacity(self.dims[a] * self.dims[b]);
                for la in &self.labels[a] {
                    for lb in &self.labels[b] {
                        let m = mono_add(la, lb);
                        let col = self.mono_index[a + b][&m];
                        let proj = &self.projections[a + b];
                        products.push(
                            (0..proj.rows())
                                .filter(|&r| !proj[(r, col)].is_zero())
                                .map(|r| (r, proj[(r, col)].clone()))
                                .collect(),
                        );
                    }
                }
                out.push(MultTable { left: a, right: b, right_dim: self.dims[b], products });
            }
        }
        out
    }

    /// Each label projects to its own basis vector.
    fn check_labels(&self) -> Result<()> {
        for (k, labs) in self.labels.iter().enumerate() {
            for (i, m) in labs.iter().enumerate() {
                let p = self.project_monomial(m)?;
                let ok = p.iter().enumerate().all(|(r, x)| if r == i { x.is_one() } else { x.is_zero() });
                if !ok {
                    return Err(Error::Schema(format!(
                        "label {} does not project to basis vector {i} in degree {}",
                        monomial_label(m),
                        2 * k
                    )));
                }
            }
        }
        Ok(())
    }

    /// Quotient maps rebuilt from the degree-1 multiplication tables.
    fn projections_from_tables(&self) -> Vec<RationalMatrix> {
        let mut out: Vec<RationalMatrix> = vec![RationalMatrix::identity(1)];
        for k in 1..=2 * self.n {
            let monos = self.sym_monomials(k);
            let mut proj = RationalMatrix::zeros(self.dims[k], monos.len());
            for (c, m) in monos.iter().enumerate() {
                let var = smallest_var(m).expect("positive degree");
                let mut d = m.clone();
                d[var] -= 1;
                let prev_col = self.mono_index[k - 1][&d];
                for j in 0..self.dims[k - 1] {
                    let x = &out[k - 1][(j, prev_col)];
                    if x.is_zero() {
                        continue;
                    }
                    let prod = if k == 1 { self.table(0, 1).product(j, var) } else { self.table(1, k - 1).product(var, j) };
                    for (r, v) in prod {
                        proj[(*r, c)] = proj[(*r, c)].add_mul(x, v);
                    }
                }
            }
            out.push(proj);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&AlgebraWire::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: AlgebraWire = serde_json::from_str(s)?;
        GradedAlgebra::try_from(wire)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeWire {
    degree: usize,
    dim: usize,
    basis: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableWire {
    left: usize,
    right: usize,
    entries: Vec<(usize, usize, usize, Rational)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraWire {
    schema_version: u32,
    n: usize,
    space: QuadraticSpace,
    degrees: Vec<DegreeWire>,
    mult: Vec<TableWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sampling: Option<SamplingStats>,
}

impl From<&GradedAlgebra> for AlgebraWire {
    fn from(a: &GradedAlgebra) -> Self {
        AlgebraWire {
            schema_version: ALGEBRA_SCHEMA_VERSION,
            n: a.n,
            space: a.space.clone(),
            degrees: (0..=2 * a.n)
                .map(|k| DegreeWire { degree: 2 * k, dim: a.dims[k], basis: a.basis_labels(k) })
                .collect(),
            mult: a
                .mult
                .iter()
                .map(|t| TableWire { left: 2 * t.left, right: 2 * t.right, entries: t.entries() })
                .collect(),
            sampling: a.stats,
        }
    }
}

impl TryFrom<AlgebraWire> for GradedAlgebra {
    type Error = Error;

    fn try_from(w: AlgebraWire) -> Result<Self> {
        if w.schema_version != ALGEBRA_SCHEMA_VERSION {
            return Err(Error::Schema(format!("unsupported schema_version {}", w.schema_version)));
        }
        let n = w.n;
        if n == 0 || w.degrees.len() != 2 * n + 1 {
            return Err(Error::Schema("expected degrees 0, 2, ..., 4n".into()));
        }
        let b = w.space.dim();
        let mut dims = Vec::new();
        let mut labels = Vec::new();
        for (k, d) in w.degrees.iter().enumerate() {
            if d.degree != 2 * k || d.basis.len() != d.dim {
                return Err(Error::Schema(format!("degree entry {k} is inconsistent")));
            }
            let labs = d
                .basis
                .iter()
                .map(|l| parse_monomial_label(l, b))
                .collect::<Result<Vec<_>>>()?;
            if labs.iter().any(|m| m.iter().map(|&e| e as usize).sum::<usize>() != k) {
                return Err(Error::Schema(format!("basis label of the wrong degree in degree {}", 2 * k)));
            }
            dims.push(d.dim);
            labels.push(labs);
        }
        let (_, mono_index) = monomial_tables(b, 2 * n);
        let mut mult = Vec::new();
        for a in 0..=2 * n {
            for bb in a..=2 * n {
                if a + bb > 2 * n {
                    break;
                }
                let t = w
                    .mult
                    .get(mult.len())
                    .filter(|t| t.left == 2 * a && t.right == 2 * bb)
                    .ok_or_else(|| Error::Schema(format!("missing table for degrees {} x {}", 2 * a, 2 * bb)))?;
                let mut products = vec![Vec::new(); dims[a] * dims[bb]];
                for (i, j, k, v) in &t.entries {
                    if *i >= dims[a] || *j >= dims[bb] || *k >= dims[a + bb] || v.is_zero() {
                        return Err(Error::Schema(format!("bad entry ({i}, {j}, {k}) in table {} x {}", 2 * a, 2 * bb)));
                    }
                    products[i * dims[bb] + j].push((*k, v.clone()));
                }
                mult.push(MultTable { left: a, right: bb, right_dim: dims[bb], products });
            }
        }
        if mult.len() != w.mult.len() {
            return Err(Error::Schema("unexpected extra multiplication tables".into()));
        }
        let mut alg = GradedAlgebra {
            n,
            space: w.space,
            dims,
            labels,
            mult,
            projections: Vec::new(),
            mono_index,
            stats: w.sampling,
        };
        alg.projections = alg.projections_from_tables();
        alg.check_labels()?;
        Ok(alg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::int_vec;
    use crate::quadratic::{default_tail, make_standard_space};

    fn alg(n: usize, b2: usize) -> GradedAlgebra {
        let s = make_standard_space(b2, &default_tail(b2)).unwrap();
        build_verbitsky(&s, n, DEFAULT_BUDGET, 1).unwrap()
    }

    #[test]
    fn monomial_order() {
        let ms = monomials(3, 2);
        let labels: Vec<String> = ms.iter().map(|m| monomial_label(m)).collect();
        assert_eq!(labels, ["x0^2", "x0*x1", "x1^2", "x0*x2", "x1*x2", "x2^2"]);
        for m in &ms {
            assert_eq!(&parse_monomial_label(&monomial_label(m), 3).unwrap(), m);
        }
        assert_eq!(monomials(4, 0).len(), 1);
        assert_eq!(monomials(5, 3).len(), binomial(7, 3));
    }

    #[test]
    fn dimension_tables() {
        assert_eq!(alg(1, 5).dims(), &[1, 5, 1]);
        assert_eq!(alg(2, 5).dims(), &[1, 5, 15, 5, 1]);
        assert_eq!(alg(2, 4).dims(), &[1, 4, 10, 4, 1]);
        assert_eq!(alg(3, 4).dims(), &[1, 4, 10, 20, 10, 4, 1]);
    }

    #[test]
    fn unit_and_isotropic_powers() {
        let a = alg(2, 5);
        let e = a.degree_two(&int_vec(&[1, 0, 0, 0, 0])).unwrap();
        let f = a.degree_two(&int_vec(&[0, 1, 0, 0, 0])).unwrap();
        assert_eq!(a.multiply(&a.one(), &e).unwrap(), e);
        assert!(!a.multiply(&e, &f).unwrap().is_zero());
        assert!(!a.power(&e, 2).unwrap().is_zero());
        assert!(a.power(&e, 3).unwrap().is_zero());
        assert!(a.power(&e, 5).is_err());
        assert_eq!(a.power(&e, 0).unwrap(), a.one());
    }

    #[test]
    fn fujiki_constant() {
        let a = alg(2, 6);
        let x = a.degree_two(&int_vec(&[1, 1, 0, 0, 0, 0])).unwrap();
        let c = a.top_functional(&a.power(&x, 4).unwrap()).unwrap();
        assert!(!c.is_zero());
        for v in [[1, 2, 0, 1, 1, 0], [0, 0, 1, 3, 1, 1], [2, -1, 1, 1, 0, 1]] {
            let y = a.degree_two(&int_vec(&v)).unwrap();
            let qy = a.space().quadratic(&y.coords).unwrap();
            let t = a.top_functional(&a.power(&y, 4).unwrap()).unwrap();
            // q(x) = 2, so top(x^4) = c·4 fixes the constant at c/4
            assert_eq!(&t / &qy.pow(2), &c / &Rational::from_int(4));
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let a = alg(2, 5);
        let js = a.to_json().unwrap();
        let back = GradedAlgebra::from_json(&js).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json().unwrap(), js);
        for k in 0..=4 {
            assert_eq!(back.projection(k), a.projection(k));
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = make_standard_space(5, &default_tail(5)).unwrap();
        match build_verbitsky(&s, 2, 3, 0) {
            Err(Error::BudgetExhausted { degree: 6, budget: 3, achieved, target: 5 }) => assert!(achieved > 5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
