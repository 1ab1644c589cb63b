//! Builds instances, runs every theorem-level check and assembles reports.
//!
//! Asserted verdicts decide the exit status. Recorded verdicts are reported
//! without an expected outcome: the kernel condition outside the range where
//! it holds for degree reasons, and the doubled M-triple scaling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{
    compare_gr_dims, conjugate_hodge_mismatch, graded_weight_filtration, perverse_filtration, perverse_weight_mismatch,
    verify_weight_filtration, GradedDimTable, WeightFiltration,
};
use crate::linalg::matrix::vec_add;
use crate::linalg::{image_basis, kernel_basis, nilpotence_index, Rational, RationalMatrix, Subspace};
use crate::llv::{
    bigrading, build_frame, check_sl2, greedy_anisotropic_basis, is_q_skew_on_h2, random_anisotropic_basis,
    rank_two_model, verify_derivation, Bigrading, FrameOperators, GradedOperator, HodgeFrame, LinearLambda, LlvModule,
    Sl2Triple,
};
use crate::module_io::{validate, LlvModuleSpec};
use crate::quadratic::{default_tail, make_standard_space, QuadraticSpace};
use crate::verbitsky::{build_verbitsky, expected_dim, GradedAlgebra, DEFAULT_BUDGET};

pub const REPORT_NOTE: &str = "Operator statements concern the model operator M = [L_beta, Lambda_sbar] built from an \
isotropic frame, a representative of the conjugacy class of type II logarithmic monodromy. No degeneration is computed.";

pub const DEFAULT_DERIVATION_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
    pub asserted: bool,
    pub witness: Option<String>,
}

impl Verdict {
    /// An asserted verdict; a failure without an explicit witness carries the observation.
    pub fn check(claim: impl Into<String>, expected: impl ToString, observed: impl ToString, passed: bool) -> Self {
        let observed = observed.to_string();
        let witness = (!passed).then(|| format!("observed {observed}"));
        Verdict { claim: claim.into(), expected: expected.to_string(), observed, passed, asserted: true, witness }
    }

    /// A verdict reported without an expected outcome.
    pub fn record(claim: impl Into<String>, observed: impl ToString, passed: bool) -> Self {
        let observed = observed.to_string();
        let witness = (!passed).then(|| format!("observed {observed}"));
        Verdict { claim: claim.into(), expected: "(recorded)".into(), observed, passed, asserted: false, witness }
    }

    pub fn witness(mut self, w: Option<String>) -> Self {
        if let Some(w) = w {
            self.witness = Some(w);
        }
        self
    }

    pub fn line(&self) -> String {
        let tag = match (self.asserted, self.passed) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "INFO",
            (false, false) => "NOTE",
        };
        let mut s = format!("{tag} {}: expected {}, observed {}", self.claim, self.expected, self.observed);
        if let (false, Some(w)) = (self.passed, &self.witness) {
            if *w != format!("observed {}", self.observed) {
                s.push_str(&format!(" [{w}]"));
            }
        }
        s
    }
}

/// `nilp(M_d)` for every nonzero degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilpotenceProfile {
    pub by_degree: BTreeMap<usize, usize>,
}

impl NilpotenceProfile {
    pub fn get(&self, d: usize) -> Option<usize> {
        self.by_degree.get(&d).copied()
    }

    pub fn render(&self) -> String {
        self.by_degree.iter().map(|(d, k)| format!("d={d}:{k}")).collect::<Vec<_>>().join(" ")
    }
}

pub fn nilpotence_profile(m: &GradedOperator) -> Result<NilpotenceProfile> {
    if m.offset() != 0 {
        return Err(Error::Shape("nilpotence profile needs a degree-0 operator".into()));
    }
    let mut by_degree = BTreeMap::new();
    for (d, &k) in m.dims().iter().enumerate() {
        if k > 0 {
            by_degree.insert(d, nilpotence_index(m.block(d))?);
        }
    }
    Ok(NilpotenceProfile { by_degree })
}

/// Even-degree claims read off the profile.
pub fn check_even_nagai(profile: &NilpotenceProfile, n: usize) -> Vec<Verdict> {
    let mut out = Vec::new();
    for k in 0..=n {
        if let Some(v) = profile.get(2 * k) {
            out.push(Verdict::check(format!("nilp(M_{}) = k = {k}", 2 * k), k, v, v == k));
        }
    }
    if let Some(v) = profile.get(2 * n) {
        out.push(Verdict::check(format!("nilp(M_{}) = n", 2 * n), n, v, v == n));
    }
    for k in 0..n {
        if let Some(v) = profile.get(2 * k) {
            out.push(Verdict::check(format!("nilp(M_{}) <= n - 1", 2 * k), format!("<= {}", n - 1), v, v < n));
        }
    }
    let bad = profile.by_degree.iter().find(|(&d, &v)| d <= 4 * n && profile.get(4 * n - d).is_some_and(|w| w != v));
    out.push(
        Verdict::check("profile duality nilp(M_d) = nilp(M_{4n-d})", "symmetric", profile.render(), bad.is_none())
            .witness(bad.map(|(d, v)| format!("nilp(M_{d}) = {v}, nilp(M_{}) = {:?}", 4 * n - d, profile.get(4 * n - d)))),
    );
    out
}

/// `M^{n+1} = 0` on every even degree and `M^n = 0` below the middle, as matrix identities.
pub fn check_power_identities(m: &GradedOperator, n: usize) -> Result<Vec<Verdict>> {
    let mut first_a = None;
    let mut first_b = None;
    for d in (0..m.dims().len()).step_by(2) {
        if m.dims()[d] == 0 {
            continue;
        }
        if first_a.is_none() && !m.power_block(d, n + 1)?.is_zero() {
            first_a = Some(d);
        }
        if d < 2 * n && first_b.is_none() && !m.power_block(d, n)?.is_zero() {
            first_b = Some(d);
        }
    }
    Ok(vec![
        Verdict::check("M^(n+1) = 0 on all even degrees", "zero", first_a.map_or("zero".into(), |d| format!("nonzero on H^{d}")), first_a.is_none()),
        Verdict::check("M^n = 0 on H^2k for 2k < 2n", "zero", first_b.map_or("zero".into(), |d| format!("nonzero on H^{d}")), first_b.is_none()),
    ])
}

/// The kernel condition on one bidegree: `dim (Ker L_β ∩ Ker L_σ̄ ∩ H^{p,q})`
/// for `p + q ≤ 2n − 2`, which should vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConditionEntry {
    pub p: i64,
    pub q: i64,
    pub dim_hpq: usize,
    pub kernel_dim: usize,
}

impl KernelConditionEntry {
    pub fn holds(&self) -> bool {
        self.kernel_dim == 0
    }
}

pub fn kernel_condition_table(ops: &FrameOperators, big: &Bigrading) -> Result<Vec<KernelConditionEntry>> {
    let n = big.n as i64;
    let mut hpq: BTreeMap<(i64, i64), Vec<Vec<Rational>>> = BTreeMap::new();
    for (&(p, q, _), sub) in &big.components {
        if p + q <= 2 * n - 2 {
            hpq.entry((p, q)).or_default().extend(sub.basis_vectors());
        }
    }
    let mut out = Vec::new();
    for ((p, q), vectors) in hpq {
        let d = (p + q) as usize;
        let ambient = ops.h.dims()[d];
        let s = Subspace::span(ambient, &vectors)?;
        let both = ops.l_beta.block(d).vstack(ops.l_sbar.block(d))?;
        let k = kernel_basis(&both).intersection(&s)?;
        out.push(KernelConditionEntry { p, q, dim_hpq: s.dim(), kernel_dim: k.dim() });
    }
    Ok(out)
}

/// Verdicts for the kernel condition: asserted where it holds for degree reasons
/// (`q < n`, or the unit class), recorded elsewhere.
pub fn check_kernel_condition(table: &[KernelConditionEntry], n: usize) -> Vec<Verdict> {
    table
        .iter()
        .map(|e| {
            let claim = format!("kernel condition on H^({},{})", e.p, e.q);
            let observed = format!("kernel dim {} of {}", e.kernel_dim, e.dim_hpq);
            if e.q < n as i64 || (e.p, e.q) == (0, 0) {
                Verdict::check(claim + " (q < n: L_sbar injective)", "kernel dim 0", observed, e.holds())
            } else {
                Verdict::record(claim, observed, e.holds())
            }
        })
        .collect()
}

fn level_violation(big: &Bigrading) -> Option<(i64, i64, i64)> {
    big.dim_table().into_keys().find(|&(p, q, i)| {
        let d = p + q;
        d % 2 == 0 && {
            let k = d / 2;
            (p - q).abs() > 2 * k - 2 * (i - k).abs()
        }
    })
}

/// `V^{p,q,i} ≠ 0` with `p + q = 2k` forces `|p − q| ≤ 2k − 2|i − k|`.
pub fn check_level_reformulation(big: &Bigrading) -> Verdict {
    let v = level_violation(big);
    Verdict::check(
        "Gr^P_i H^2k has level <= 2k - 2|i - k|",
        "no violation",
        v.map_or("no violation".into(), |t| format!("V^{t:?} nonzero")),
        v.is_none(),
    )
}

/// Per even degree: the level bound holds iff `Gr^M_{n+j} H^{2k} = 0` for `|j| > k`.
pub fn check_level_gr_consistency(big: &Bigrading, gr_m: &GradedDimTable) -> Verdict {
    let n = big.n as i64;
    let degrees: Vec<usize> = gr_m.entries.keys().map(|k| k.0).filter(|d| d % 2 == 0).collect();
    let mismatch = degrees.into_iter().find(|&d| {
        let k = d as i64 / 2;
        let level_ok = !big.dim_table().into_keys().any(|(p, q, i)| p + q == d as i64 && (p - q).abs() > 2 * k - 2 * (i - k).abs());
        let gr_ok = gr_m.entries.iter().all(|(&(dd, w), &v)| dd != d || v == 0 || (w - n).abs() <= k);
        level_ok != gr_ok
    });
    Verdict::check(
        "level bound <=> Gr^M_{n+j} H^2k = 0 for |j| > k",
        "consistent",
        mismatch.map_or("consistent".into(), |d| format!("inconsistent on H^{d}")),
        mismatch.is_none(),
    )
}

fn odd_degrees(big: &Bigrading) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for (&(p, q, _), s) in &big.components {
        if (p + q) % 2 == 1 && s.dim() > 0 {
            *out.entry((p + q) as usize).or_insert(0) += s.dim();
        }
    }
    out
}

/// The lower-bound formula `min_i max{|k − ℓ − i|, |k + ℓ − 1 − i|}` over the
/// `i` with `V^{k−ℓ, k+ℓ−1, i} ≠ 0`.
pub fn odd_level_formula(big: &Bigrading, k: i64, ell: i64) -> Option<i64> {
    big.dim_table()
        .into_keys()
        .filter(|&(p, q, _)| p == k - ell && q == k + ell - 1)
        .map(|(_, _, i)| (k - ell - i).abs().max((k + ell - 1 - i).abs()))
        .min()
}

/// Odd-degree bounds: the upper bound `min{2k − 3, n − 1}`, `k − 1` under
/// the kernel condition, and the level lower bound with its formula.
pub fn check_odd(profile: &NilpotenceProfile, big: &Bigrading, kernel_condition_holds: bool) -> Vec<Verdict> {
    let n = big.n as i64;
    let odd = odd_degrees(big);
    if odd.is_empty() {
        return vec![Verdict::check("odd-degree bounds", "vacuous", "no odd cohomology", true)];
    }
    let mut out = Vec::new();
    let h3 = odd.contains_key(&3);
    for k in 1..=n {
        let d = (2 * k - 1) as usize;
        if !odd.contains_key(&d) {
            continue;
        }
        let Some(nilp) = profile.get(d).map(|v| v as i64) else { continue };
        let bound = (2 * k - 3).min(n - 1);
        out.push(Verdict::check(format!("nilp(M_{d}) <= min(2k-3, n-1)"), format!("<= {bound}"), nilp, nilp <= bound));
        if kernel_condition_holds {
            out.push(Verdict::check(format!("nilp(M_{d}) <= k-1 under the kernel condition"), format!("<= {}", k - 1), nilp, nilp < k));
        }
        let level = big.dim_table().into_keys().filter(|&(p, q, _)| p + q == d as i64).map(|(p, q, _)| (p - q).abs()).max().unwrap_or(0);
        if level > 0 {
            let ell = (level + 1) / 2;
            out.push(Verdict::check(format!("level lower bound on H^{d}: l <= nilp (level {level})"), format!(">= {ell}"), nilp, ell <= nilp));
            match odd_level_formula(big, k, ell) {
                Some(f) => out.push(Verdict::check(
                    format!("min_i max(|k-l-i|, |k+l-1-i|) <= nilp(M_{d}) (k={k}, l={ell})"),
                    format!("formula {f} <= nilp"),
                    nilp,
                    f <= nilp,
                )),
                None => out.push(Verdict::check(
                    format!("V^(k-l, k+l-1, i) nonzero for some i on H^{d}"),
                    "some i",
                    "none",
                    false,
                )),
            }
            if h3 {
                out.push(Verdict::check(format!("H^3 != 0 gives level of H^{d} = 2(k-1)-1"), 2 * (k - 1) - 1, level, level == 2 * (k - 1) - 1));
                out.push(Verdict::check(format!("H^3 != 0 gives nilp(M_{d}) >= k-1"), format!(">= {}", k - 1), nilp, nilp >= k - 1));
            }
        }
    }
    if h3 {
        if let Some(v) = profile.get(3) {
            out.push(Verdict::check("H^3 != 0 gives nilp(M_3) = 1", 1, v, v == 1));
        }
        if n >= 2 {
            if let Some(v) = profile.get((2 * n - 1) as usize) {
                out.push(Verdict::check(format!("H^3 != 0 gives nilp(M_{}) = n-1", 2 * n - 1), n - 1, v, v as i64 == n - 1));
            }
        }
    }
    out
}

/// `dim H^{2k−1} = 4 Σ_{p<k, i<k} dim V^{p,q,i}`, after the symmetry check.
pub fn check_betti_mod4(big: &Bigrading) -> Vec<Verdict> {
    let odd = odd_degrees(big);
    if odd.is_empty() {
        return vec![Verdict::check("odd Betti numbers divisible by 4", "vacuous", "no odd cohomology", true)];
    }
    let violation = big.symmetry_violation();
    let mut out = vec![Verdict::check(
        "four-fold symmetry of V^{p,q,i}",
        "symmetric",
        violation.map_or("symmetric".into(), |t| format!("V^{t:?} has no matching partner")),
        violation.is_none(),
    )];
    for (&d, &dim) in &odd {
        let k = (d as i64 + 1) / 2;
        let fundamental: usize = big.dim_table().iter().filter(|(&(p, q, i), _)| p + q == d as i64 && p < k && i < k).map(|(_, v)| v).sum();
        let observed = format!("b_{d} = {dim}, 4 x fundamental = {}", 4 * fundamental);
        let ok = dim == 4 * fundamental && dim % 4 == 0;
        if violation.is_none() {
            out.push(Verdict::check(format!("b_{d} divisible by 4"), "b = 4 x fundamental domain", observed, ok));
        } else {
            out.push(Verdict::record(format!("b_{d} divisible by 4 (symmetry failed, not asserted)"), observed, ok));
        }
    }
    out
}

/// `(q, i) ↦ dim V^{d−q, q, i}` for one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondTable {
    pub degree: usize,
    pub cells: BTreeMap<(i64, i64), usize>,
}

impl DiamondTable {
    pub fn get(&self, q: i64, i: i64) -> usize {
        self.cells.get(&(q, i)).copied().unwrap_or(0)
    }

    /// Row sums indexed by `i` (the perverse graded pieces).
    pub fn rows(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (&(_, i), &v) in &self.cells {
            out.entry(i).or_default().push(v);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<[i64; 3]> = self.cells.iter().map(|(&(q, i), &v)| [q, i, v as i64]).collect();
        serde_json::json!({ "degree": self.degree, "cells": cells })
    }

    /// Rows by `i` (top row largest), columns by `q`.
    pub fn render_text(&self) -> String {
        if self.cells.is_empty() {
            return format!("H^{}: empty\n", self.degree);
        }
        let d = self.degree as i64;
        let i_lo = self.cells.keys().map(|k| k.1).min().unwrap_or(0);
        let i_hi = self.cells.keys().map(|k| k.1).max().unwrap_or(0);
        let width = self.cells.values().map(|v| v.to_string().len()).max().unwrap_or(1).max(2) + 2;
        let mut out = format!("V^(p,q,i) in H^{}: rows i, columns q\n", self.degree);
        for i in (i_lo..=i_hi).rev() {
            out.push_str(&format!("{i:>4} |"));
            for q in 0..=d {
                let v = self.get(q, i);
                let cell = if v == 0 { String::new() } else { v.to_string() };
                out.push_str(&format!("{cell:^width$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:>4} +{}\n", "", "-".repeat(width * (d as usize + 1))));
        out.push_str(&format!("{:>4}  ", "q"));
        for q in 0..=d {
            out.push_str(&format!("{q:^width$}"));
        }
        out.push('\n');
        out
    }
}

pub fn diamond_report(big: &Bigrading, degree: usize) -> DiamondTable {
    let cells = big
        .dim_table()
        .into_iter()
        .filter(|((p, q, _), _)| (p + q) as usize == degree)
        .map(|((_, q, i), v)| ((q, i), v))
        .collect();
    DiamondTable { degree, cells }
}

/// Expected degree-2 cells: `β` at `(1,0)`, `σ, U, σ̄` along `i = 1`, `η` at `(1,2)`.
pub fn expected_degree_two_diamond(b2: usize) -> BTreeMap<(i64, i64), usize> {
    let mut m: BTreeMap<(i64, i64), usize> = [((1, 0), 1), ((0, 1), 1), ((2, 1), 1), ((1, 2), 1)].into_iter().collect();
    if b2 > 4 {
        m.insert((1, 1), b2 - 4);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedTable {
    pub name: String,
    pub text: String,
    pub data: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub kind: String,
    pub n: usize,
    pub b2: usize,
    pub dims: Vec<usize>,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub instance: InstanceInfo,
    pub seeds: BTreeMap<String, u64>,
    pub note: String,
    pub profiles: BTreeMap<String, NilpotenceProfile>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<NamedTable>,
}

impl Report {
    pub fn asserted_ok(&self) -> bool {
        self.verdicts.iter().all(|v| !v.asserted || v.passed)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| v.asserted && !v.passed).collect()
    }

    pub fn verdict(&self, claim_prefix: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.claim.starts_with(claim_prefix))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&serde_json::to_value(self)?)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render_text(&self) -> String {
        let i = &self.instance;
        let mut out = format!("== {} n={} b2={} dims={:?}\n", i.kind, i.n, i.b2, i.dims);
        if let Some(d) = &i.description {
            out.push_str(&format!("   {d}\n"));
        }
        out.push_str(&format!("   {}\n", self.note));
        let seeds: Vec<String> = self.seeds.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("   seeds: {}\n", seeds.join(" ")));
        for (name, p) in &self.profiles {
            out.push_str(&format!("   profile {name}: {}\n", p.render()));
        }
        for v in &self.verdicts {
            out.push_str(&v.line());
            out.push('\n');
        }
        for t in &self.tables {
            out.push_str(&format!("-- {}\n{}", t.name, t.text));
        }
        let failures = self.failures().len();
        out.push_str(&format!("== {} asserted failure(s)\n", failures));
        out
    }
}

/// Parameters of one built-in `SH` instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub n: usize,
    pub b2: usize,
    pub tail: Vec<Rational>,
    pub seed: u64,
    pub budget: usize,
    pub derivation_trials: usize,
}

impl InstanceConfig {
    pub fn standard(n: usize, b2: usize, seed: u64) -> Self {
        InstanceConfig {
            n,
            b2,
            tail: default_tail(b2),
            seed,
            budget: DEFAULT_BUDGET,
            derivation_trials: DEFAULT_DERIVATION_TRIALS,
        }
    }
}

/// `(n, b2) ∈ {1,2,3} × {4,5,6,7}`.
pub fn default_grid(seed: u64) -> Vec<InstanceConfig> {
    (1..=3).flat_map(|n| (4..=7).map(move |b2| InstanceConfig::standard(n, b2, seed))).collect()
}

/// Everything derived from a module and a frame.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub module: LlvModule,
    pub lambda: LinearLambda,
    pub frame: HodgeFrame,
    pub ops: FrameOperators,
    pub m: GradedOperator,
    pub big: Bigrading,
}

impl FrameData {
    pub fn new(module: LlvModule, frame: HodgeFrame) -> Result<Self> {
        let lambda = module.lambda_linear()?;
        let ops = FrameOperators::new(&module, &lambda, &frame)?;
        let m = ops.m()?;
        let big = bigrading(&ops)?;
        Ok(FrameData { module, lambda, frame, ops, m, big })
    }

    pub fn n(&self) -> usize {
        self.module.n()
    }

    pub fn space(&self) -> &QuadraticSpace {
        self.module.space()
    }
}

/// A built `SH` instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub config: InstanceConfig,
    pub alg: GradedAlgebra,
    pub data: FrameData,
}

impl Instance {
    pub fn build(config: &InstanceConfig) -> Result<Self> {
        let space = make_standard_space(config.b2, &config.tail)?;
        let alg = build_verbitsky(&space, config.n, config.budget, config.seed)?;
        let module = LlvModule::from_algebra(&alg)?;
        let frame = build_frame(&space, config.seed)?;
        Ok(Instance { config: config.clone(), alg, data: FrameData::new(module, frame)? })
    }

    /// Wraps an algebra loaded from disk; `seed` drives the frame and the randomized checks.
    pub fn from_algebra(alg: GradedAlgebra, seed: u64) -> Result<Self> {
        let gram = alg.space().gram();
        let tail = (4..alg.b2()).map(|i| gram[(i, i)].clone()).collect();
        let config = InstanceConfig {
            n: alg.n(),
            b2: alg.b2(),
            tail,
            seed,
            budget: DEFAULT_BUDGET,
            derivation_trials: DEFAULT_DERIVATION_TRIALS,
        };
        let module = LlvModule::from_algebra(&alg)?;
        let frame = build_frame(alg.space(), seed)?;
        let data = FrameData::new(module, frame)?;
        Ok(Instance { config, alg, data })
    }
}

fn derivation_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0xd1
}

fn second_frame_seed(seed: u64) -> u64 {
    seed.wrapping_add(1)
}

fn lambda_basis_seed(seed: u64) -> u64 {
    seed ^ 0x5eed
}

/// Checks on `M|H²`: proportionality to the rank-2 model, image, squares, skewness.
pub fn h2_verdicts(data: &FrameData) -> Result<Vec<Verdict>> {
    let space = data.space();
    let f = &data.frame;
    let m2 = data.m.block(2);
    let model = rank_two_model(space, f);
    let scalar = m2.proportionality(&model);
    let image = image_basis(m2);
    let plane = Subspace::span(space.dim(), &[f.beta.clone(), f.sbar.clone()])?;
    let isotropic = image.basis_vectors().iter().all(|v| {
        image.basis_vectors().iter().all(|w| space.bilinear(v, w).map(|x| x.is_zero()).unwrap_or(false))
    });
    let ms = m2.mul_vec(&f.s)?;
    let ms_prop = RationalMatrix::from_columns(space.dim(), std::slice::from_ref(&ms))?
        .proportionality(&RationalMatrix::from_columns(space.dim(), std::slice::from_ref(&f.beta))?);
    Ok(vec![
        Verdict::check(
            "M|H^2 = c (q(beta,.) sbar - q(sbar,.) beta)",
            "nonzero c",
            scalar.as_ref().map_or("not proportional".into(), |c| format!("c = {c}")),
            scalar.as_ref().is_some_and(|c| !c.is_zero()),
        ),
        Verdict::check("Im(M|H^2) = <beta, sbar>, dim 2", "<beta, sbar>", format!("dim {}", image.dim()), image == plane && image.dim() == 2),
        Verdict::check("Im(M|H^2) is isotropic", "isotropic", if isotropic { "isotropic" } else { "not isotropic" }, isotropic),
        Verdict::check("M^2 = 0 on H^2", "zero", if m2.mul(m2)?.is_zero() { "zero" } else { "nonzero" }, m2.mul(m2)?.is_zero()),
        Verdict::check("q(Mv, w) + q(v, Mw) = 0 on H^2", "skew", "", is_q_skew_on_h2(space, &data.m)?),
        Verdict::check(
            "M(s) is a nonzero multiple of beta",
            "nonzero multiple",
            ms_prop.as_ref().map_or("not a multiple".into(), |c| format!("M(s) = {c} beta")),
            ms_prop.is_some_and(|c| !c.is_zero()),
        ),
    ])
}

/// The sl2 suite: frame triples, the M-triple, `(L_x, Λ_x, h)` and its
/// `2h` negative control; the doubled M scaling is recorded with its scalar.
pub fn sl2_verdicts(data: &FrameData) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for (name, t) in data.ops.triples()? {
        let c = check_sl2(&t)?;
        out.push(Verdict::check(format!("sl2-triple {name}"), "sl2", format!("{c:?}"), c.holds()));
    }
    let x = greedy_anisotropic_basis(data.space())?.remove(0);
    let t = Sl2Triple { e: data.module.lefschetz(&x)?, f: data.module.dual_lefschetz(&x)?, h: data.module.grading() };
    out.push(Verdict::check("sl2-triple (L_x, Λ_x, h) for anisotropic x", "sl2", "", check_sl2(&t)?.holds()));
    let bad = Sl2Triple { h: t.h.scale(&Rational::from_int(2)), ..t };
    let bad_holds = check_sl2(&bad)?.holds();
    out.push(Verdict::check("(L_x, Λ_x, 2h) is not an sl2-triple", "not sl2", if bad_holds { "sl2" } else { "not sl2" }, !bad_holds));
    let doubled = data.ops.m_triple_doubled()?;
    let c = check_sl2(&doubled)?;
    let ef = doubled.e.commutator(&doubled.f)?;
    let scalar = ef.to_total_matrix().proportionality(&doubled.h.to_total_matrix());
    out.push(Verdict::record(
        "(2M, 2[Λ_s, L_eta], H_beta - H_s) as an sl2-triple",
        format!(
            "[H,E]=2E {}, [H,F]=-2F {}, [E,F] = {} H",
            c.he_is_2e,
            c.hf_is_minus_2f,
            scalar.map_or("(not proportional)".into(), |s| s.to_string())
        ),
        c.holds(),
    ));
    let sum_ok = data.ops.h_s()?.add(&data.ops.h_sbar()?)? == data.ops.h;
    out.push(Verdict::check("H_s + H_sbar = h", "equal", if sum_ok { "equal" } else { "different" }, sum_ok));
    Ok(out)
}

/// Filtration checks: Gr^M against the bigrading, weight axioms, perverse
/// cross-checks and the conjugate Hodge filtration.
pub fn filtration_verdicts(data: &FrameData, extra_beta: Option<&[Rational]>) -> Result<(Vec<Verdict>, Vec<NamedTable>)> {
    let n = data.n();
    let mut out = Vec::new();
    let mut tables = Vec::new();
    let wm: Result<Vec<WeightFiltration>> = graded_weight_filtration(&data.m, n);
    let wm = match wm {
        Ok(w) => w,
        Err(e) => {
            out.push(Verdict::check("weight filtration of M centred at n", "exists", e.to_string(), false));
            return Ok((out, tables));
        }
    };
    let axioms = wm.iter().zip(data.m.blocks()).all(|(w, b)| verify_weight_filtration(b, w));
    out.push(Verdict::check("weight filtration axioms for M (every degree)", "hold", if axioms { "hold" } else { "fail" }, axioms));
    let sym = wm.iter().all(|w| {
        let g = w.gr_dims();
        g.iter().eq(g.iter().rev())
    });
    out.push(Verdict::check("Gr^M dims symmetric about the centre", "symmetric", if sym { "symmetric" } else { "asymmetric" }, sym));
    let cmp = compare_gr_dims(&wm, &data.big);
    let first_diff = cmp
        .monodromy
        .entries
        .keys()
        .chain(cmp.bigraded.entries.keys())
        .find(|&&(d, i)| cmp.monodromy.get(d, i) != cmp.bigraded.get(d, i))
        .copied();
    out.push(
        Verdict::check(
            "dim Gr^M_{n+j} H^l = sum_{p+q=l} dim Gr^P_{j+q} V^{p,q}",
            "equal for all (l, j)",
            if cmp.holds { "equal".to_string() } else { "differs".to_string() },
            cmp.holds,
        )
        .witness(first_diff.map(|(d, i)| {
            format!("H^{d}, index {i}: Gr^M {} vs bigrading {}", cmp.monodromy.get(d, i), cmp.bigraded.get(d, i))
        })),
    );
    if let Some(w2) = wm.get(2) {
        let g = w2.gr_dims();
        let b2 = data.space().dim();
        let expected = (2, b2 - 4, 2);
        let observed = (g[n - 1], g[n], g[n + 1]);
        out.push(Verdict::check("Gr^M_{n-1,n,n+1} H^2 dims", format!("{expected:?}"), format!("{observed:?}"), observed == expected));
    }
    out.push(check_level_gr_consistency(&data.big, &cmp.monodromy));
    tables.push(NamedTable { name: "Gr^M dims (rows: degree, columns: weight)".into(), text: cmp.monodromy.render_text("deg", "W"), data: cmp.monodromy.to_json() });

    let mismatch = perverse_weight_mismatch(&data.ops.l_beta, n)?;
    out.push(Verdict::check("W^{L_beta}_i ∩ H^d = P_{d+i-2n} H^d (frame beta)", "equal", mismatch.clone().unwrap_or("equal".into()), mismatch.is_none()));
    if let Some(b) = extra_beta {
        let l = data.module.lefschetz(b)?;
        let mismatch = perverse_weight_mismatch(&l, n)?;
        out.push(Verdict::check(
            "W^{L_beta}_i ∩ H^d = P_{d+i-2n} H^d (random isotropic beta)",
            "equal",
            mismatch.clone().unwrap_or("equal".into()),
            mismatch.is_none(),
        ));
    }
    let wb = crate::filtration::weight_filtration(&data.ops.l_beta.to_total_matrix(), n)?;
    let ws = crate::filtration::weight_filtration(&data.ops.l_sbar.to_total_matrix(), n)?;
    let ok = verify_weight_filtration(&data.ops.l_beta.to_total_matrix(), &wb)
        && verify_weight_filtration(&data.ops.l_sbar.to_total_matrix(), &ws);
    out.push(Verdict::check("weight filtration axioms for L_beta and L_sbar", "hold", if ok { "hold" } else { "fail" }, ok));
    let mismatch = conjugate_hodge_mismatch(&data.ops.l_sbar, &data.big)?;
    out.push(Verdict::check("W^{L_sbar}_i = sum_{q >= 2n-i} V^{p,q,.}", "equal", mismatch.clone().unwrap_or("equal".into()), mismatch.is_none()));

    // Gr^P refined by (p, q)
    let mut bad = None;
    for d in 0..data.m.dims().len() {
        if data.m.dims()[d] == 0 {
            continue;
        }
        let p = perverse_filtration(&data.ops.l_beta, n, d)?;
        let from_big: BTreeMap<i64, usize> = diamond_report(&data.big, d).rows().into_iter().map(|(i, v)| (i, v.iter().sum())).collect();
        if p.gr_dims() != from_big {
            bad = Some(d);
            break;
        }
    }
    out.push(Verdict::check(
        "dim Gr^P_i H^d = sum_{p+q=d} dim V^{p,q,i}",
        "equal",
        bad.map_or("equal".into(), |d| format!("differs on H^{d}")),
        bad.is_none(),
    ));
    Ok((out, tables))
}

/// Bigrading-level verdicts shared by built and ingested instances.
pub fn bigrading_verdicts(data: &FrameData) -> Vec<Verdict> {
    let mut out = Vec::new();
    let v = data.big.symmetry_violation();
    out.push(Verdict::check(
        "dim V^{p,q,i} = dim V^{q,p,i} = dim V^{i,p+q-i,p}",
        "symmetric",
        v.map_or("symmetric".into(), |t| format!("V^{t:?} unmatched")),
        v.is_none(),
    ));
    let total: usize = data.big.components.values().map(Subspace::dim).sum();
    out.push(Verdict::check("bigrading covers every degree", data.module.total_dim(), total, total == data.module.total_dim()));
    out.push(check_level_reformulation(&data.big));
    out
}

fn degree_two_verdicts(data: &FrameData) -> Vec<Verdict> {
    let table = diamond_report(&data.big, 2);
    let expected = expected_degree_two_diamond(data.space().dim());
    let f = &data.frame;
    let at = |key: (i64, i64, i64), v: &[Rational]| data.big.components.get(&key).is_some_and(|s| s.contains(v));
    let placed = at((1, 1, 0), &f.beta) && at((1, 1, 2), &f.eta) && at((2, 0, 1), &f.s) && at((0, 2, 1), &f.sbar);
    vec![
        Verdict::check("degree-2 diamond (q,i) cells", format!("{expected:?}"), format!("{:?}", table.cells), table.cells == expected),
        Verdict::check("beta in V^{1,1,0}, eta in V^{1,1,2}, s in V^{2,0,1}, sbar in V^{0,2,1}", "placed", if placed { "placed" } else { "misplaced" }, placed),
    ]
}

fn kernel_condition_named_table(entries: &[KernelConditionEntry]) -> NamedTable {
    let mut text = String::from("   p   q  dim H^{p,q}  dim kernel  holds\n");
    for e in entries {
        text.push_str(&format!("{:>4}{:>4}{:>13}{:>12}  {}\n", e.p, e.q, e.dim_hpq, e.kernel_dim, e.holds()));
    }
    NamedTable { name: "kernel condition: Ker L_beta ∩ Ker L_sbar on H^{p,q}, p+q <= 2n-2".into(), text, data: serde_json::to_value(entries).unwrap_or_default() }
}

fn diamond_tables(data: &FrameData) -> Vec<NamedTable> {
    (0..data.module.dims().len())
        .filter(|&d| data.module.dims()[d] > 0)
        .map(|d| {
            let t = diamond_report(&data.big, d);
            NamedTable { name: format!("diamond H^{d}"), text: t.render_text(), data: t.to_json() }
        })
        .collect()
}

/// Verdicts that only need a module and a frame.
fn module_level_report(data: &FrameData, seed: u64, extra_beta: Option<&[Rational]>) -> Result<(Vec<Verdict>, Vec<NamedTable>, NilpotenceProfile)> {
    let n = data.n();
    let mut verdicts = Vec::new();
    let mut tables = Vec::new();

    let other = random_anisotropic_basis(data.space(), lambda_basis_seed(seed)).and_then(|b| LinearLambda::new(&data.module, &b));
    let agree = other.and_then(|o| data.lambda.agrees_with(&o));
    verdicts.push(Verdict::check(
        "Λ extended linearly is independent of the anisotropic basis",
        "agree",
        match &agree {
            Ok(None) => "agree".to_string(),
            Ok(Some(i)) => format!("disagree at e{i}"),
            Err(e) => e.to_string(),
        },
        matches!(agree, Ok(None)),
    ));

    let profile = nilpotence_profile(&data.m)?;
    verdicts.extend(check_even_nagai(&profile, n));
    verdicts.extend(check_power_identities(&data.m, n)?);
    verdicts.extend(h2_verdicts(data)?);
    verdicts.extend(sl2_verdicts(data)?);
    verdicts.extend(bigrading_verdicts(data));
    verdicts.extend(degree_two_verdicts(data));
    let (fv, ft) = filtration_verdicts(data, extra_beta)?;
    verdicts.extend(fv);
    tables.extend(ft);

    let cond = kernel_condition_table(&data.ops, &data.big)?;
    verdicts.extend(check_kernel_condition(&cond, n));
    let cond_all = cond.iter().all(KernelConditionEntry::holds);
    verdicts.extend(check_odd(&profile, &data.big, cond_all));
    verdicts.extend(check_betti_mod4(&data.big));

    tables.push(kernel_condition_named_table(&cond));
    tables.extend(diamond_tables(data));
    Ok((verdicts, tables, profile))
}

pub fn report_instance(inst: &Instance) -> Result<Report> {
    let cfg = &inst.config;
    let data = &inst.data;
    let mut verdicts = Vec::new();
    let expected: Vec<usize> = (0..=2 * cfg.n).map(|k| expected_dim(cfg.b2, cfg.n, k)).collect();
    verdicts.push(Verdict::check("dim SH^2k = dim Sym^min(k,2n-k)", format!("{expected:?}"), format!("{:?}", inst.alg.dims()), inst.alg.dims() == expected.as_slice()));

    let beta2 = data.space().sample_isotropic(1, cfg.seed)?.remove(0);
    let (mv, tables, profile) = module_level_report(data, cfg.seed, Some(&beta2))?;
    verdicts.extend(mv);

    let d = verify_derivation(&inst.alg, &data.m, cfg.derivation_trials, derivation_seed(cfg.seed))?;
    verdicts.push(
        Verdict::check("M(ab) = M(a)b + aM(b)", format!("{} of {} pairs", d.trials, d.trials), format!("{} of {} pairs", d.trials - d.failures, d.trials), d.passed())
            .witness(d.witness.clone()),
    );
    let x = vec_add(&data.frame.s, &data.frame.sbar);
    let lx = verify_derivation(&inst.alg, &data.module.lefschetz(&x)?, cfg.derivation_trials.min(40), derivation_seed(cfg.seed))?;
    verdicts.push(Verdict::check("L_x is not a derivation (x = s + sbar)", "some failures", format!("{} failures", lx.failures), !lx.passed()));

    let frame2 = build_frame(data.space(), second_frame_seed(cfg.seed))?;
    let other = FrameData::new(data.module.clone(), frame2)?;
    let same = other.big.dim_table() == data.big.dim_table();
    verdicts.push(Verdict::check("bigrading dims independent of the frame", "identical tables", if same { "identical" } else { "different" }, same));

    let seeds = [
        ("build".to_string(), cfg.seed),
        ("frame".to_string(), cfg.seed),
        ("second_frame".to_string(), second_frame_seed(cfg.seed)),
        ("derivation".to_string(), derivation_seed(cfg.seed)),
        ("lambda_basis".to_string(), lambda_basis_seed(cfg.seed)),
        ("isotropic_beta".to_string(), cfg.seed),
    ]
    .into_iter()
    .collect();
    Ok(Report {
        instance: InstanceInfo {
            kind: "SH".into(),
            n: cfg.n,
            b2: cfg.b2,
            dims: data.module.dims().to_vec(),
            description: Some(format!("tail {:?}, budget {}", cfg.tail.iter().map(ToString::to_string).collect::<Vec<_>>(), cfg.budget)),
        },
        seeds,
        note: REPORT_NOTE.into(),
        profiles: [("M".to_string(), profile)].into_iter().collect(),
        verdicts,
        tables,
    })
}

pub fn run_instance(config: &InstanceConfig) -> Result<Report> {
    report_instance(&Instance::build(config)?)
}

/// Runs the instances in parallel; results keep the input order.
pub fn run_grid(configs: &[InstanceConfig]) -> Vec<Result<Report>> {
    configs.par_iter().map(run_instance).collect()
}

/// Report for an ingested module. Validation failures stop the analysis.
pub fn run_module(spec: &LlvModuleSpec, seed: u64) -> Result<Report> {
    let validation = validate(spec);
    let mut verdicts: Vec<Verdict> = validation
        .checks
        .iter()
        .map(|c| Verdict::check(format!("validate: {}", c.name), "pass", if c.passed { "pass" } else { "fail" }, c.passed).witness(c.witness.clone()))
        .collect();
    let info = InstanceInfo {
        kind: "module".into(),
        n: spec.n,
        b2: spec.space.dim(),
        dims: spec.degrees.clone(),
        description: spec.description.clone(),
    };
    let mut seeds: BTreeMap<String, u64> = BTreeMap::new();
    if !validation.all_passed() {
        return Ok(Report { instance: info, seeds, note: REPORT_NOTE.into(), profiles: BTreeMap::new(), verdicts, tables: Vec::new() });
    }
    let module = spec.to_module()?;
    let frame = match &spec.frame {
        Some(f) => f.clone(),
        None => {
            seeds.insert("frame".into(), seed);
            build_frame(module.space(), seed)?
        }
    };
    let data = FrameData::new(module, frame)?;
    seeds.insert("lambda_basis".into(), lambda_basis_seed(seed));
    let (mv, tables, profile) = module_level_report(&data, seed, None)?;
    verdicts.extend(mv);
    Ok(Report {
        instance: info,
        seeds,
        note: REPORT_NOTE.into(),
        profiles: [("M".to_string(), profile)].into_iter().collect(),
        verdicts,
        tables,
    })
}
