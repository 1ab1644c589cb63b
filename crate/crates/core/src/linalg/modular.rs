//! Multi-modular row reduction.
//!
//! Gauss–Jordan over ℚ suffers from intermediate coefficient growth even when
//! the reduced echelon form itself has tiny entries. Here the echelon form is
//! computed modulo several word-sized primes, lifted by CRT and rational
//! reconstruction, and then checked exactly: every input row must reduce to
//! zero against the candidate. Since the rank modulo a prime never exceeds the
//! rank over ℚ, a candidate passing that check is the reduced echelon form.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{mod_pow, Rational};

const MAX_PRIMES: usize = 96;

/// Primes just below `2^31`, largest first.
pub fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let is_prime = |n: u64| n > 1 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        (1u64 << 20..1u64 << 31).rev().filter(|&n| is_prime(n)).take(MAX_PRIMES).collect()
    })
}

/// Incremental fully reduced row echelon form over `ℤ/p`.
#[derive(Debug, Clone)]
pub struct ModRowSpace {
    p: u64,
    dim: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    pivot_of_col: Vec<Option<usize>>,
}

impl ModRowSpace {
    pub fn new(dim: usize, p: u64) -> Self {
        ModRowSpace { p, dim, rows: Vec::new(), pivots: Vec::new(), pivot_of_col: vec![None; dim] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces a rational vector modulo `p` and inserts it. `None` if a
    /// denominator vanishes modulo `p`.
    pub fn insert_rational(&mut self, v: &[Rational]) -> Option<bool> {
        let r: Option<Vec<u64>> = v.iter().map(|x| x.residue(self.p)).collect();
        Some(self.insert(r?))
    }

    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for c in 0..self.dim {
            if v[c] == 0 {
                continue;
            }
            if let Some(r) = self.pivot_of_col[c] {
                let f = p - v[c];
                for (x, y) in v.iter_mut().zip(&self.rows[r]).skip(c) {
                    if *y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_pow(v[c], p - 2, p);
        for x in v.iter_mut().skip(c) {
            *x = *x * inv % p;
        }
        for row in &mut self.rows {
            let f = row[c];
            if f == 0 {
                continue;
            }
            let f = p - f;
            for (x, y) in row.iter_mut().zip(&v).skip(c) {
                if *y != 0 {
                    *x = (*x + f * y) % p;
                }
            }
        }
        self.pivot_of_col[c] = Some(self.rows.len());
        self.pivots.push(c);
        self.rows.push(v);
        true
    }

    /// Pivot columns in increasing order with their rows.
    fn sorted(&self) -> (Vec<usize>, Vec<&Vec<u64>>) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        (order.iter().map(|&i| self.pivots[i]).collect(), order.iter().map(|&i| &self.rows[i]).collect())
    }
}

fn reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    if a.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::from(num_rational::BigRational::new(r1, t1)))
}

/// Reduced row echelon form of the span of `rows` (vectors of length
/// `ncols`): pivot columns and the nonzero reduced rows. `None` if the lift
/// does not stabilise within the prime budget.
pub fn modular_rref(rows: &[Vec<Rational>], ncols: usize) -> Option<(Vec<usize>, Vec<Vec<Rational>>)> {
    let mut best_pivots: Option<Vec<usize>> = None;
    // residues of the non-pivot entries, accumulated by CRT
    let mut acc: Vec<Vec<BigInt>> = Vec::new();
    let mut modulus = BigInt::one();
    let mut last: Option<Vec<Vec<Rational>>> = None;
    for &p in primes() {
        let mut space = ModRowSpace::new(ncols, p);
        let mut ok = true;
        for r in rows {
            if space.insert_rational(r).is_none() {
                ok = false;
                break;
            }
            if space.rank() == ncols {
                break;
            }
        }
        if !ok {
            continue;
        }
        let (pivots, prows) = space.sorted();
        match &best_pivots {
            Some(b) if better(b, &pivots) => continue,
            Some(b) if *b == pivots => {}
            _ => {
                best_pivots = Some(pivots.clone());
                acc = vec![vec![BigInt::zero(); ncols]; pivots.len()];
                modulus = BigInt::one();
                last = None;
            }
        }
        if pivots.is_empty() {
            return Some((pivots, Vec::new()));
        }
        // CRT: x ≡ a (mod M), x ≡ b (mod p)
        let bp = BigInt::from(p);
        let m_inv = BigInt::from(mod_pow((&modulus % &bp).try_into().expect("residue fits"), p - 2, p));
        for (a_row, p_row) in acc.iter_mut().zip(&prows) {
            for (a, &b) in a_row.iter_mut().zip(p_row.iter()) {
                let diff = (BigInt::from(b) - &*a).mod_floor(&bp);
                let t = (diff * &m_inv).mod_floor(&bp);
                *a += &modulus * t;
            }
        }
        modulus *= &bp;
        let candidate: Option<Vec<Vec<Rational>>> = acc
            .iter()
            .map(|row| row.iter().map(|a| reconstruct(a, &modulus)).collect())
            .collect();
        let Some(candidate) = candidate else {
            continue;
        };
        if last.as_ref() == Some(&candidate) && verify(rows, &pivots, &candidate) {
            return Some((pivots, candidate));
        }
        last = Some(candidate);
    }
    None
}

/// `a` beats `b`: higher rank, or equal rank with earlier pivots.
fn better(a: &[usize], b: &[usize]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

fn verify(rows: &[Vec<Rational>], pivots: &[usize], reduced: &[Vec<Rational>]) -> bool {
    for (i, &c) in pivots.iter().enumerate() {
        for (k, row) in reduced.iter().enumerate() {
            let expect_one = k == i;
            if (expect_one && !row[c].is_one()) || (!expect_one && !row[c].is_zero()) {
                return false;
            }
        }
    }
    rows.iter().all(|r| {
        let mut res = r.clone();
        for (&c, row) in pivots.iter().zip(reduced) {
            let f = res[c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in res.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        res.iter().all(Rational::is_zero)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::RationalMatrix;
    use proptest::prelude::*;

    #[test]
    fn primes_are_large_and_distinct() {
        let ps = primes();
        assert_eq!(ps.len(), MAX_PRIMES);
        assert_eq!(ps[0], 2147483647);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn reconstructs_fractions() {
        let m = BigInt::from(2147483647u64) * BigInt::from(2147483629u64);
        for (n, d) in [(3i64, 7i64), (-5, 12), (0, 1), (123456, 1)] {
            let r = Rational::new(n, d);
            let a = (BigInt::from(n) * BigInt::from(d).modinv(&m).unwrap()).mod_floor(&m);
            assert_eq!(reconstruct(&a, &m), Some(r));
        }
    }

    proptest! {
        #[test]
        fn agrees_with_exact_rref(entries in proptest::collection::vec(-9i64..=9, 30), den in 1i64..6) {
            let rows: Vec<Vec<Rational>> = entries
                .chunks(6)
                .map(|c| c.iter().map(|&x| Rational::new(x, den)).collect())
                .collect();
            let exact = RationalMatrix::from_rows(&rows).unwrap().rref();
            let (pivots, reduced) = modular_rref(&rows, 6).unwrap();
            prop_assert_eq!(&pivots, &exact.pivot_cols);
            for (i, row) in reduced.iter().enumerate() {
                prop_assert_eq!(row.as_slice(), exact.reduced.row(i));
            }
        }
    }
}
