//! Synthetic, non-geometric fixtures for code paths that `SH` cannot reach.
//!
//! `SH` has no odd cohomology, so odd-degree checks run on modules built
//! here: `SH ⊕ S`, where `S` is a Clifford module of `(H², q)` placed in
//! degrees `2n − 1` and `2n + 1` with `L_x = c(x) : H^{2n−1} → H^{2n+1}`.
//! Since `c(x)² = q(x)`, every anisotropic `x` satisfies hard Lefschetz on `S`,
//! and `L_x L_y = 0` there, so the Lefschetz operators commute.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{RationalMatrix, Rational, Subspace};
use crate::llv::{build_frame, Bigrading, GradedOperator, LlvModule};
use crate::module_io::LlvModuleSpec;
use crate::quadratic::make_standard_space;
use crate::verbitsky::GradedAlgebra;

fn kron(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = RationalMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            if a[(i, j)].is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = &a[(i, j)] * &b[(k, l)];
                }
            }
        }
    }
    out
}

/// Clifford generators `c(e_i)` for `U ⊕ U ⊕ diag(tail)`, acting on
/// `(ℚ²)^{⊗(b2 − 2)}` with `c(v)c(w) + c(w)c(v) = 2 q(v, w)`.
pub fn clifford_generators(tail: &[Rational]) -> Vec<RationalMatrix> {
    let two = Rational::from_int(2);
    let grading = RationalMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]);
    let mut factors: Vec<Vec<RationalMatrix>> = Vec::new();
    for _ in 0..2 {
        let e = RationalMatrix::from_i64_rows(&[&[0, 0], &[1, 0]]);
        let mut f = RationalMatrix::zeros(2, 2);
        f[(0, 1)] = two.clone();
        factors.push(vec![e, f]);
    }
    for a in tail {
        let mut g = RationalMatrix::zeros(2, 2);
        g[(0, 1)] = a.clone();
        g[(1, 0)] = Rational::one();
        factors.push(vec![g]);
    }
    let m = factors.len();
    let mut out = Vec::new();
    for (k, gens) in factors.iter().enumerate() {
        for g in gens {
            let mut acc = RationalMatrix::identity(1);
            for j in 0..m {
                let piece = match j.cmp(&k) {
                    std::cmp::Ordering::Less => grading.clone(),
                    std::cmp::Ordering::Equal => g.clone(),
                    std::cmp::Ordering::Greater => RationalMatrix::identity(2),
                };
                acc = kron(&acc, &piece);
            }
            out.push(acc);
        }
    }
    out
}

/// Adds odd pieces to a module: `odd_dims[d]` extra dimensions in degree `d`
/// (odd `d` only) and, per basis vector, the odd blocks of `L`.
fn with_odd_part(
    module: &LlvModule,
    odd_dims: &BTreeMap<usize, usize>,
    odd_blocks: &[BTreeMap<usize, RationalMatrix>],
) -> Result<LlvModule> {
    let mut dims = module.dims().to_vec();
    for (&d, &k) in odd_dims {
        if d % 2 == 0 || d >= dims.len() || dims[d] != 0 {
            return Err(Error::InvalidModule(format!("cannot place odd part in degree {d}")));
        }
        dims[d] = k;
    }
    let mut basis = Vec::new();
    for (l, extra) in module.lefschetz_basis().iter().zip(odd_blocks) {
        let blocks = (0..dims.len())
            .map(|d| {
                let rows = if d + 2 < dims.len() { dims[d + 2] } else { 0 };
                if d % 2 == 0 {
                    l.block(d).clone()
                } else {
                    extra.get(&d).cloned().unwrap_or_else(|| RationalMatrix::zeros(rows, dims[d]))
                }
            })
            .collect();
        basis.push(GradedOperator::from_blocks(&dims, 2, blocks)?);
    }
    LlvModule::new(module.n(), module.space().clone(), dims, basis)
}

/// `SH ⊕ S` with the Clifford module `S` in degrees `2n ∓ 1`. The algebra must
/// be built on `make_standard_space(b2, tail)`.
pub fn clifford_odd_module(alg: &GradedAlgebra, tail: &[Rational]) -> Result<LlvModuleSpec> {
    let n = alg.n();
    let expected = make_standard_space(alg.b2(), tail)?;
    if &expected != alg.space() {
        return Err(Error::InvalidModule("Clifford fixture needs the standard space U ⊕ U ⊕ diag(tail)".into()));
    }
    let gens = clifford_generators(tail);
    let k = gens[0].rows();
    let odd_dims: BTreeMap<usize, usize> = [(2 * n - 1, k), (2 * n + 1, k)].into_iter().collect();
    let blocks: Vec<BTreeMap<usize, RationalMatrix>> =
        gens.into_iter().map(|g| [(2 * n - 1, g)].into_iter().collect()).collect();
    let module = with_odd_part(&LlvModule::from_algebra(alg)?, &odd_dims, &blocks)?;
    let mut spec = LlvModuleSpec::from_module(&module);
    spec.frame = Some(build_frame(module.space(), 0)?);
    spec.description = Some(format!(
        "synthetic, non-geometric: SH(n = {n}, b2 = {}) plus a Clifford module in degrees {} and {}",
        alg.b2(),
        2 * n - 1,
        2 * n + 1
    ));
    Ok(spec)
}

/// `SH ⊕ SH[1]` truncated at the top degree, where the shifted copy keeps the
/// grading of its original degree. Validation must reject it: the grading
/// operator has to be `d − 2n` on `H^d` for the declared `n`.
pub fn shifted_copy_module(alg: &GradedAlgebra) -> Result<LlvModuleSpec> {
    let n = alg.n();
    let top = 4 * n;
    let sh = LlvModule::from_algebra(alg)?;
    let odd_dims: BTreeMap<usize, usize> = (0..top).step_by(2).map(|d| (d + 1, sh.dims()[d])).collect();
    let blocks: Vec<BTreeMap<usize, RationalMatrix>> = sh
        .lefschetz_basis()
        .iter()
        .map(|l| (0..top - 2).step_by(2).map(|d| (d + 1, l.block(d).clone())).collect())
        .collect();
    let module = with_odd_part(&sh, &odd_dims, &blocks)?;
    let mut spec = LlvModuleSpec::from_module(&module);
    let n2 = 2 * n as i64;
    spec.h_action = GradedOperator::diagonal(module.dims(), |d| {
        let original = if d % 2 == 1 { d - 1 } else { d };
        Rational::from_int(original as i64 - n2)
    });
    spec.description = Some("synthetic, non-geometric: SH plus a degree-shifted copy carrying its original grading".into());
    Ok(spec)
}

/// `SH` with the `H² → H⁴` block of `L_{e_0}` zeroed.
pub fn corrupted_sh(alg: &GradedAlgebra) -> Result<LlvModuleSpec> {
    let module = LlvModule::from_algebra(alg)?;
    let mut spec = LlvModuleSpec::from_module(&module);
    let l0 = &spec.l_actions[0];
    let mut blocks = l0.blocks().to_vec();
    blocks[2] = RationalMatrix::zeros(blocks[2].rows(), blocks[2].cols());
    spec.l_actions[0] = GradedOperator::from_blocks(l0.dims(), 2, blocks)?;
    spec.frame = Some(build_frame(module.space(), 0)?);
    spec.description = Some("corrupted: SH with the H^2 -> H^4 block of L_e0 set to zero".into());
    Ok(spec)
}

/// A bigrading with prescribed component dimensions, realized by coordinate
/// blocks inside each degree.
pub fn bigrading_from_dims(n: usize, dims: &BTreeMap<(i64, i64, i64), usize>) -> Bigrading {
    let mut per_degree: BTreeMap<i64, usize> = BTreeMap::new();
    for (&(p, q, _), &k) in dims {
        *per_degree.entry(p + q).or_insert(0) += k;
    }
    let mut cursor: BTreeMap<i64, usize> = BTreeMap::new();
    let mut components = BTreeMap::new();
    for (&(p, q, i), &k) in dims {
        let at = cursor.entry(p + q).or_insert(0);
        components.insert((p, q, i), Subspace::coordinate(per_degree[&(p + q)], *at, k));
        *at += k;
    }
    Bigrading { n, components }
}

/// Closure of `seeds` under `(p,q,i) ↦ (q,p,i)` and `(p,q,i) ↦ (i,p+q−i,p)`.
pub fn symmetric_orbits(seeds: &[(i64, i64, i64)]) -> Vec<(i64, i64, i64)> {
    let mut seen: Vec<(i64, i64, i64)> = Vec::new();
    let mut stack: Vec<(i64, i64, i64)> = seeds.to_vec();
    while let Some(t) = stack.pop() {
        if seen.contains(&t) {
            continue;
        }
        seen.push(t);
        let (p, q, i) = t;
        stack.push((q, p, i));
        stack.push((i, p + q - i, p));
    }
    seen.sort();
    seen
}

/// Odd bigrading with `dim H³ = 4` and `dim H⁵ = 8`, closed under the symmetries.
pub fn symmetric_odd_bigrading() -> Bigrading {
    let dims = symmetric_orbits(&[(1, 2, 1), (1, 4, 2)]).into_iter().map(|t| (t, 1)).collect();
    bigrading_from_dims(3, &dims)
}

/// A single component `V^{1,2,1}`: no symmetry partner.
pub fn asymmetric_odd_bigrading() -> Bigrading {
    bigrading_from_dims(2, &[((1, 2, 1), 1)].into_iter().collect())
}

/// Degree 2 with `V^{2,0,0} ≠ 0`, which breaks the level bound at `i = 0`.
pub fn level_violating_bigrading() -> Bigrading {
    bigrading_from_dims(1, &[((2, 0, 0), 1), ((1, 1, 1), 1)].into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module_io::validate;
    use crate::quadratic::default_tail;
    use crate::verbitsky::{build_verbitsky, DEFAULT_BUDGET};

    fn sh(n: usize, b2: usize) -> GradedAlgebra {
        let s = make_standard_space(b2, &default_tail(b2)).unwrap();
        build_verbitsky(&s, n, DEFAULT_BUDGET, 0).unwrap()
    }

    #[test]
    fn clifford_relations() {
        let tail = default_tail(6);
        let s = make_standard_space(6, &tail).unwrap();
        let gens = clifford_generators(&tail);
        assert_eq!(gens.len(), 6);
        assert_eq!(gens[0].rows(), 16);
        for i in 0..6 {
            for j in 0..6 {
                let ac = gens[i].mul(&gens[j]).unwrap().add(&gens[j].mul(&gens[i]).unwrap()).unwrap();
                let q = &s.gram()[(i, j)] * &Rational::from_int(2);
                assert_eq!(ac, RationalMatrix::scalar(16, q), "{i} {j}");
            }
        }
    }

    #[test]
    fn clifford_module_validates() {
        let alg = sh(2, 5);
        let spec = clifford_odd_module(&alg, &default_tail(5)).unwrap();
        assert_eq!(spec.degrees, vec![1, 0, 5, 8, 15, 8, 5, 0, 1]);
        let report = validate(&spec);
        assert!(report.all_passed(), "{}", report.render_text());
    }

    #[test]
    fn shifted_copy_breaks_the_grading_contract() {
        let report = validate(&shifted_copy_module(&sh(1, 4)).unwrap());
        let first = report.first_failure().unwrap();
        assert_eq!(first.name, "h_eigenvalues");
        assert!(first.witness.as_deref().unwrap().contains("H^1"));
    }

    #[test]
    fn corrupted_sh_fails_commutation() {
        let report = validate(&corrupted_sh(&sh(2, 5)).unwrap());
        let c = report.checks.iter().find(|c| c.name == "L_commute").unwrap();
        assert!(!c.passed && c.witness.is_some());
    }

    #[test]
    fn hand_built_bigradings() {
        let sym = symmetric_odd_bigrading();
        assert_eq!(sym.symmetry_violation(), None);
        let by_degree = |d: i64| sym.components.iter().filter(|((p, q, _), _)| p + q == d).map(|(_, s)| s.dim()).sum::<usize>();
        assert_eq!((by_degree(3), by_degree(5)), (4, 8));
        assert!(asymmetric_odd_bigrading().symmetry_violation().is_some());
    }
}
