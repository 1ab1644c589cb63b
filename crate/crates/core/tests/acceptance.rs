//! Acceptance suite: one PASS/FAIL line per criterion, all at exact tolerance.
//!
//! Criteria listed in `KNOWN_RED` are expected to fail for a documented
//! reason; the run fails if any other criterion fails or if a known-red
//! criterion starts passing.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use hklab::filtration::{
    compare_gr_dims, conjugate_hodge_check, crosscheck_perverse_weight, graded_weight_filtration, verify_weight_filtration,
    weight_filtration, WeightFiltration,
};
use hklab::linalg::{image_basis, Rational, RationalMatrix, Subspace};
use hklab::llv::{build_frame, verify_derivation, Sl2Triple};
use hklab::module_io::{export_module, load_module, validate};
use hklab::quadratic::{default_tail, make_standard_space, witt_transport, IsotropicPlane, QuadraticSpace};
use hklab::synthetic::{clifford_odd_module, corrupted_sh, symmetric_odd_bigrading};
use hklab::verifier::{check_betti_mod4, check_kernel_condition, kernel_condition_table, diamond_report, run_module, Instance, InstanceConfig};
use hklab::Error;
use rayon::prelude::*;

/// Criterion 7 asks for `(2M, 2[Λ_s, L_η], H_β − H_s)` to be an sl2-triple.
/// With `M = [L_β, Λ_σ̄]` and the `Λ` that completes `(L_x, Λ_x, h)`, the
/// undoubled triple is exact and the doubled one has `[E, F] = 4H`.
const KNOWN_RED: &[u32] = &[7];

const SEED: u64 = 0;
const PER_INSTANCE_LIMIT: Duration = Duration::from_secs(60);

struct Built {
    inst: Instance,
    build_time: Duration,
}

struct Grid {
    instances: Vec<Built>,
}

impl Grid {
    fn new() -> Self {
        let configs: Vec<InstanceConfig> =
            (1..=3).flat_map(|n| (4..=7).map(move |b2| InstanceConfig::standard(n, b2, SEED))).collect();
        let instances = configs
            .par_iter()
            .map(|c| {
                let start = Instant::now();
                let inst = Instance::build(c).expect("grid instance builds");
                Built { inst, build_time: start.elapsed() }
            })
            .collect();
        Grid { instances }
    }

    fn each(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().map(|b| &b.inst)
    }
}

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn(&Grid) -> Outcome);

fn tag(i: &Instance) -> String {
    format!("n={} b2={}", i.config.n, i.config.b2)
}

// C(b2 + m - 1, m), computed without the library
fn sym_dim(b2: usize, m: usize) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for j in 0..m as u128 {
        num *= b2 as u128 + j;
        den *= j + 1;
    }
    (num / den) as usize
}

// largest i with b^i != 0
fn nilp(b: &RationalMatrix) -> usize {
    let mut p = b.clone();
    let mut k = 0;
    while !p.is_zero() {
        k += 1;
        p = p.mul(b).unwrap();
    }
    k
}

fn block_power_is_zero(b: &RationalMatrix, k: usize) -> bool {
    b.rows() == 0 || b.pow(k).unwrap().is_zero()
}

fn c1_dimensions(g: &Grid) -> Outcome {
    let mut slowest = Duration::ZERO;
    for b in &g.instances {
        let i = &b.inst;
        let n = i.config.n;
        let expected: Vec<usize> = (0..=2 * n).map(|k| sym_dim(i.config.b2, k.min(2 * n - k))).collect();
        if i.alg.dims() != expected.as_slice() {
            return Err(format!("{}: dims {:?}, oracle {:?}", tag(i), i.alg.dims(), expected));
        }
        if b.build_time > PER_INSTANCE_LIMIT {
            return Err(format!("{}: built in {:.1?}", tag(i), b.build_time));
        }
        slowest = slowest.max(b.build_time);
    }
    Ok(format!("12 instances exact, slowest build {slowest:.1?}"))
}

fn even_profile(i: &Instance) -> BTreeMap<usize, usize> {
    (0..=2 * i.config.n).map(|k| (2 * k, nilp(i.data.m.block(2 * k)))).collect()
}

fn c2_theorem(g: &Grid) -> Outcome {
    for i in g.each() {
        let n = i.config.n;
        let p = even_profile(i);
        if p[&(2 * n)] != n {
            return Err(format!("{}: nilp(M_{}) = {}", tag(i), 2 * n, p[&(2 * n)]));
        }
        if let Some(k) = (0..n).find(|&k| p[&(2 * k)] > n - 1) {
            return Err(format!("{}: nilp(M_{}) = {} > n - 1", tag(i), 2 * k, p[&(2 * k)]));
        }
    }
    Ok("nilp(M_2n) = n and nilp(M_2k) <= n-1 below the middle on all 12".into())
}

fn c3_powers(g: &Grid) -> Outcome {
    for i in g.each() {
        let n = i.config.n;
        for k in 0..=2 * n {
            let b = i.data.m.block(2 * k);
            if !block_power_is_zero(b, n + 1) {
                return Err(format!("{}: M^(n+1) != 0 on H^{}", tag(i), 2 * k));
            }
            if k < n && !block_power_is_zero(b, n) {
                return Err(format!("{}: M^n != 0 on H^{}", tag(i), 2 * k));
            }
        }
    }
    Ok("M^(n+1) = 0 on every even degree, M^n = 0 below the middle".into())
}

fn c4_even_nagai(g: &Grid) -> Outcome {
    for i in g.each() {
        let n = i.config.n;
        let p = even_profile(i);
        if let Some(k) = (0..=n).find(|&k| p[&(2 * k)] != k) {
            return Err(format!("{}: nilp(M_{}) = {}, expected {k}", tag(i), 2 * k, p[&(2 * k)]));
        }
    }
    Ok("nilp(M_2k) = k for all k <= n on all 12".into())
}

fn c5_rank_two(g: &Grid) -> Outcome {
    for i in g.each() {
        let space = i.data.space();
        let f = &i.data.frame;
        let b2 = space.dim();
        let cols: Vec<Vec<Rational>> = (0..b2)
            .map(|j| {
                let mut e = vec![Rational::zero(); b2];
                e[j] = Rational::one();
                let a = space.bilinear(&f.beta, &e).unwrap();
                let b = space.bilinear(&f.sbar, &e).unwrap();
                f.sbar.iter().zip(&f.beta).map(|(s, t)| &(&a * s) - &(&b * t)).collect()
            })
            .collect();
        let model = RationalMatrix::from_columns(b2, &cols).unwrap();
        let m2 = i.data.m.block(2);
        match m2.proportionality(&model) {
            Some(c) if !c.is_zero() => {}
            other => return Err(format!("{}: M|H^2 vs model scalar {other:?}", tag(i))),
        }
        let image = image_basis(m2);
        let plane = Subspace::span(b2, &[f.beta.clone(), f.sbar.clone()]).unwrap();
        if image.dim() != 2 || image != plane {
            return Err(format!("{}: image has dim {} or differs from <beta, sbar>", tag(i), image.dim()));
        }
        let v = image.basis_vectors();
        if v.iter().any(|x| v.iter().any(|y| !space.bilinear(x, y).unwrap().is_zero())) {
            return Err(format!("{}: image not isotropic", tag(i)));
        }
    }
    Ok("M|H^2 = c(q(beta,.)sbar - q(sbar,.)beta), c != 0; image = <beta, sbar> isotropic".into())
}

fn c6_derivation(g: &Grid) -> Outcome {
    let mut total = 0;
    for i in g.each() {
        let r = verify_derivation(&i.alg, &i.data.m, 100, 0x0d0e ^ i.config.b2 as u64).unwrap();
        if r.trials < 100 || r.failures > 0 {
            return Err(format!("{}: {} failures in {} trials: {:?}", tag(i), r.failures, r.trials, r.witness));
        }
        total += r.trials;
    }
    Ok(format!("{total} random pairs, no failures"))
}

fn sl2_holds(t: &Sl2Triple) -> bool {
    let two = Rational::from_int(2);
    let ef = t.e.commutator(&t.f).unwrap();
    let he = t.h.commutator(&t.e).unwrap();
    let hf = t.h.commutator(&t.f).unwrap();
    ef == t.h && he == t.e.scale(&two) && hf == t.f.scale(&Rational::from_int(-2))
}

fn c7_sl2(g: &Grid) -> Outcome {
    let mut doubled_scalar = BTreeMap::new();
    for i in g.each() {
        for (name, t) in i.data.ops.triples().unwrap() {
            if !sl2_holds(&t) {
                return Err(format!("{}: {name} is not an sl2-triple", tag(i)));
            }
        }
        let x = {
            let mut v = vec![Rational::zero(); i.config.b2];
            v[0] = Rational::one();
            v[1] = Rational::one();
            v
        };
        let lx = Sl2Triple {
            e: i.data.module.lefschetz(&x).unwrap(),
            f: i.data.module.dual_lefschetz(&x).unwrap(),
            h: i.data.module.grading(),
        };
        if !sl2_holds(&lx) {
            return Err(format!("{}: (L_x, Λ_x, h) fails", tag(i)));
        }
        let d = i.data.ops.m_triple_doubled().unwrap();
        if !sl2_holds(&d) {
            let ef = d.e.commutator(&d.f).unwrap().to_total_matrix();
            doubled_scalar.insert(tag(i), ef.proportionality(&d.h.to_total_matrix()));
        }
    }
    if doubled_scalar.is_empty() {
        return Ok("all frame triples, the M-triple and its doubled form are sl2-triples".into());
    }
    let scalars: Vec<String> = doubled_scalar.values().map(|s| s.as_ref().map_or("?".into(), |c| c.to_string())).collect();
    Err(format!(
        "(2M, 2[Λ_s, L_eta], H_beta - H_s) fails on {} instances with [E,F] = c H, c in {:?}; the undoubled triple passes",
        doubled_scalar.len(),
        scalars.iter().collect::<std::collections::BTreeSet<_>>()
    ))
}

fn m_filtrations(i: &Instance) -> Vec<WeightFiltration> {
    graded_weight_filtration(&i.data.m, i.config.n).unwrap()
}

fn c8_gr_dims(g: &Grid) -> Outcome {
    for i in g.each() {
        let cmp = compare_gr_dims(&m_filtrations(i), &i.data.big);
        if !cmp.holds {
            return Err(format!("{}: Gr^M {:?} vs bigrading {:?}", tag(i), cmp.monodromy.entries, cmp.bigraded.entries));
        }
    }
    Ok("dim Gr^M_{n+j} H^l = sum dim Gr^P_{j+q} V^{p,q} for all (l, j) on all 12".into())
}

fn c9_perverse(g: &Grid) -> Outcome {
    for i in g.each() {
        let n = i.config.n;
        if !crosscheck_perverse_weight(&i.data.ops.l_beta, n).unwrap() {
            return Err(format!("{}: frame beta", tag(i)));
        }
        let beta = i.data.space().sample_isotropic(1, 0xbe7a).unwrap().remove(0);
        if !crosscheck_perverse_weight(&i.data.module.lefschetz(&beta).unwrap(), n).unwrap() {
            return Err(format!("{}: random isotropic beta", tag(i)));
        }
        if !conjugate_hodge_check(&i.data.ops.l_sbar, &i.data.big).unwrap() {
            return Err(format!("{}: conjugate Hodge", tag(i)));
        }
    }
    Ok("W(L_beta) = P after reindexing (frame and random beta), W(L_sbar) = conjugate Hodge, all 12".into())
}

fn c10_figure(g: &Grid) -> Outcome {
    for i in g.each() {
        let b2 = i.config.b2;
        let t = diamond_report(&i.data.big, 2);
        let row = |r: i64| -> Vec<usize> { (0..=2).map(|q| t.get(q, r)).collect() };
        let (top, mid, bottom) = (row(2), row(1), row(0));
        if top != [0, 1, 0] || bottom != [0, 1, 0] || mid[0] != 1 || mid[2] != 1 || mid.iter().sum::<usize>() != b2 - 2 {
            return Err(format!("{}: rows {top:?} / {mid:?} / {bottom:?}", tag(i)));
        }
        let f = &i.data.frame;
        let at = |k: (i64, i64, i64), v: &[Rational]| i.data.big.components.get(&k).is_some_and(|s| s.contains(v));
        if !(at((1, 1, 0), &f.beta) && at((1, 1, 2), &f.eta) && at((2, 0, 1), &f.s) && at((0, 2, 1), &f.sbar)) {
            return Err(format!("{}: frame vectors misplaced", tag(i)));
        }
    }
    Ok("degree 2: 1 / (sigma, U, sbar) with row total b2-2 / 1; beta at i=0, eta at i=2".into())
}

fn two_block_fixture() -> Result<(), String> {
    // chains a0 -> a1 -> a2 -> 0 and b0 -> b1 -> 0 in the basis (a0, a1, a2, b0, b1)
    let mut n = RationalMatrix::zeros(5, 5);
    n[(1, 0)] = Rational::one();
    n[(2, 1)] = Rational::one();
    n[(4, 3)] = Rational::one();
    let g = RationalMatrix::from_i64_rows(&[
        &[1, 2, 0, 1, 0],
        &[0, 1, 3, 0, 1],
        &[1, 0, 1, 2, 0],
        &[0, 1, 0, 1, 1],
        &[2, 0, 1, 0, 1],
    ]);
    let g_inv = g.inverse().unwrap().ok_or("scrambling matrix is singular")?;
    let scrambled = g.mul(&n).unwrap().mul(&g_inv).unwrap();
    // weights centred at 2: a0:4 a1:2 a2:0 b0:3 b1:1
    let weights = [4, 2, 0, 3, 1];
    let computed = weight_filtration(&scrambled, 2).map_err(|e| e.to_string())?;
    for i in 0..=4 {
        let cols: Vec<Vec<Rational>> = (0..5).filter(|&j| weights[j] <= i).map(|j| g.column(j)).collect();
        let hand = Subspace::span(5, &cols).unwrap();
        if computed.step(i) != hand {
            return Err(format!("two-block fixture: W_{i} differs from the hand-built step"));
        }
    }
    if !verify_weight_filtration(&scrambled, &computed) {
        return Err("two-block fixture fails the axioms".into());
    }
    Ok(())
}

fn c11_axioms(g: &Grid) -> Outcome {
    let mut count = 0;
    for i in g.each() {
        let n = i.config.n;
        for (w, b) in m_filtrations(i).iter().zip(i.data.m.blocks()) {
            if !verify_weight_filtration(b, w) {
                return Err(format!("{}: M filtration fails the axioms", tag(i)));
            }
            count += 1;
        }
        for op in [&i.data.ops.l_beta, &i.data.ops.l_sbar] {
            let total = op.to_total_matrix();
            let w = weight_filtration(&total, n).unwrap();
            if !verify_weight_filtration(&total, &w) {
                return Err(format!("{}: L filtration fails the axioms", tag(i)));
            }
            count += 1;
        }
    }
    two_block_fixture()?;
    Ok(format!("{count} filtrations satisfy the axioms; two-block fixture matches the hand-built filtration"))
}

fn isometry_exact(space: &QuadraticSpace, g: &RationalMatrix) -> bool {
    g.transpose().mul(space.gram()).unwrap().mul(g).unwrap() == *space.gram() && g.det().unwrap() == Rational::one()
}

fn frame_plane(space: &QuadraticSpace, seed: u64) -> IsotropicPlane {
    let f = build_frame(space, seed).unwrap();
    IsotropicPlane::new(space, f.s, f.beta).unwrap()
}

fn c12_witt(_: &Grid) -> Outcome {
    let mut transported = 0;
    let mut obstructed = 0;
    for b2 in 4..=7 {
        let space = make_standard_space(b2, &default_tail(b2)).unwrap();
        // reflected copies land in the other family when b2 = 4
        let mut x = vec![Rational::zero(); b2];
        x[0] = Rational::one();
        x[1] = Rational::one();
        let r = space.reflection(&x).unwrap();
        let mut planes: Vec<IsotropicPlane> = (0..4).map(|s| frame_plane(&space, s)).collect();
        let reflected: Vec<IsotropicPlane> = planes
            .iter()
            .map(|p| IsotropicPlane::new(&space, r.mul_vec(&p.v1).unwrap(), r.mul_vec(&p.v2).unwrap()).unwrap())
            .collect();
        planes.extend(reflected);
        for p in &planes {
            for q in &planes {
                let meet = p.span().intersection(&q.span()).unwrap().dim();
                match witt_transport(&space, p, q) {
                    Ok(g) => {
                        let image = Subspace::span(b2, &[g.apply(&p.v1), g.apply(&p.v2)]).unwrap();
                        if !isometry_exact(&space, &g.matrix) || image != q.span() {
                            return Err(format!("b2={b2}: transport is not an SO(q) map onto the target"));
                        }
                        if b2 == 4 && meet % 2 == 1 {
                            return Err("b2=4: planes meeting in a line were transported".into());
                        }
                        transported += 1;
                    }
                    Err(Error::TwoOrbitObstruction(_)) if b2 == 4 && meet % 2 == 1 => obstructed += 1,
                    Err(e) => return Err(format!("b2={b2}: unexpected error {e} (meet dim {meet})")),
                }
            }
        }
    }
    let space = make_standard_space(4, &[]).unwrap();
    let p = IsotropicPlane::from_ints(&space, &[1, 0, 0, 0], &[0, 0, 1, 0]).unwrap();
    let q = IsotropicPlane::from_ints(&space, &[1, 0, 0, 0], &[0, 0, 0, 1]).unwrap();
    if !matches!(witt_transport(&space, &p, &q), Err(Error::TwoOrbitObstruction(_))) {
        return Err("constructed non-transverse pair in b2=4 was not refused".into());
    }
    Ok(format!("{transported} transports exact in SO(q); {obstructed} sampled and 1 constructed b2=4 obstructions detected"))
}

fn c13_modules(g: &Grid) -> Outcome {
    let inst = g.each().find(|i| i.config.n == 2 && i.config.b2 == 5).unwrap();
    let frame = build_frame(inst.alg.space(), SEED).unwrap();
    let json = export_module(&inst.alg, &frame).unwrap();
    let spec = load_module(&json).unwrap();
    if !validate(&spec).all_passed() {
        return Err("exported SH does not validate".into());
    }
    if spec.to_json().unwrap() != json {
        return Err("exported SH does not round-trip byte-exactly".into());
    }
    let bad = validate(&corrupted_sh(&inst.alg).unwrap());
    match bad.first_failure() {
        Some(f) if f.witness.is_some() => {}
        _ => return Err("corrupted fixture passes or lacks a witness".into()),
    }
    let odd = run_module(&clifford_odd_module(&inst.alg, &default_tail(5)).unwrap(), SEED).unwrap();
    let needed = ["nilp(M_3) <= min(2k-3, n-1)", "min_i max(|k-l-i|, |k+l-1-i|) <= nilp(M_3)"];
    for claim in needed {
        match odd.verdict(claim) {
            Some(v) if v.passed => {}
            Some(v) => return Err(format!("odd fixture: {}", v.line())),
            None => return Err(format!("odd fixture: no verdict for {claim}")),
        }
    }
    if !check_betti_mod4(&symmetric_odd_bigrading()).iter().all(|v| v.passed) {
        return Err("symmetric odd bigrading fails the Betti check".into());
    }
    Ok("export validates and round-trips; corrupted copy fails with witness; odd fixtures run the bound and formula checks".into())
}

fn c14_kernel_condition(g: &Grid) -> Outcome {
    let mut rows = 0;
    let mut recorded_failures = 0;
    for i in g.each() {
        let n = i.config.n as i64;
        let table = kernel_condition_table(&i.data.ops, &i.data.big).unwrap();
        let expected: std::collections::BTreeSet<(i64, i64)> =
            i.data.big.components.keys().filter(|(p, q, _)| p + q <= 2 * n - 2).map(|&(p, q, _)| (p, q)).collect();
        let got: std::collections::BTreeSet<(i64, i64)> = table.iter().map(|e| (e.p, e.q)).collect();
        if got != expected {
            return Err(format!("{}: table covers {got:?}, expected {expected:?}", tag(i)));
        }
        for (e, v) in table.iter().zip(check_kernel_condition(&table, n as usize)) {
            let trivial = e.q < n || (e.p, e.q) == (0, 0);
            if v.asserted != trivial {
                return Err(format!("{}: H^({},{}) asserted = {}", tag(i), e.p, e.q, v.asserted));
            }
            if trivial && !e.holds() {
                return Err(format!("{}: L_sbar not injective on H^({},{})", tag(i), e.p, e.q));
            }
            if !e.holds() {
                recorded_failures += 1;
            }
        }
        rows += table.len();
    }
    Ok(format!("{rows} (p,q) rows recorded over 12 instances; {recorded_failures} with nonzero kernel"))
}

fn main() {
    let start = Instant::now();
    let grid = Grid::new();
    println!("acceptance: grid {{1,2,3}} x {{4,5,6,7}} built in {:.1?}, seed {SEED}", start.elapsed());
    let criteria: [Criterion; 14] = [
        (1, "dimension oracle (exact, <= 60 s per instance)", c1_dimensions),
        (2, "nilp(M_2n) = n, nilp(M_2k) <= n-1 (exact)", c2_theorem),
        (3, "M^(n+1) = 0 and M^n = 0 below the middle (exact)", c3_powers),
        (4, "nilp(M_2k) = k for all k <= n (exact)", c4_even_nagai),
        (5, "rank-2 form of M on H^2 (exact)", c5_rank_two),
        (6, "derivation identity on >= 100 pairs (exact)", c6_derivation),
        (7, "sl2 suite including the doubled M-triple (exact)", c7_sl2),
        (8, "Gr^M dims against the bigrading (exact)", c8_gr_dims),
        (9, "perverse and conjugate Hodge cross-checks (exact subspaces)", c9_perverse),
        (10, "degree-2 diamond layout (exact)", c10_figure),
        (11, "weight filtration axioms and two-block uniqueness (exact)", c11_axioms),
        (12, "Witt transport in SO(q), b2=4 obstruction (exact)", c12_witt),
        (13, "module ingestion, round trip, odd fixtures (exact)", c13_modules),
        (14, "kernel condition per-(p,q) report (recorded)", c14_kernel_condition),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let t = Instant::now();
        let outcome = run(&grid);
        let known = KNOWN_RED.contains(&id);
        match (&outcome, known) {
            (Ok(s), false) => println!("PASS {id:>2} {name}: {s} [{:.1?}]", t.elapsed()),
            (Err(w), true) => println!("FAIL {id:>2} {name}: {w} [known red]"),
            (Ok(s), true) => {
                println!("PASS {id:>2} {name}: {s} [listed as known red]");
                unexpected.push(id);
            }
            (Err(w), false) => {
                println!("FAIL {id:>2} {name}: {w}");
                unexpected.push(id);
            }
        }
    }
    println!("acceptance finished in {:.1?}", start.elapsed());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

