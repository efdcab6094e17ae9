//! Prime-field arithmetic: primality, prime ranges, the quadratic character
//! and fast evaluation of integer polynomials over every residue.

use std::fmt;

use crate::error::{Error, Result};

/// Exclusive upper bound on primes accepted by [`Prime`].
pub const PRIME_LIMIT: u64 = 1 << 62;

/// Default cap on the modulus of a [`ResidueTable`].
pub const DEFAULT_TABLE_CAP: u64 = 1 << 31;

/// An odd prime below 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Prime> {
        if !(3..PRIME_LIMIT).contains(&value) || value.is_multiple_of(2) || !is_prime(value) {
            return Err(Error::NotAPrime { value });
        }
        Ok(Prime(value))
    }

    /// For values already certified by the sieve.
    pub(crate) fn from_sieve(value: u64) -> Prime {
        debug_assert!(value >= 3 && value % 2 == 1 && value < PRIME_LIMIT);
        Prime(value)
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are a witness
/// set for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes below `limit` by a plain sieve of Eratosthenes.
fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j < limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

const SEGMENT: u64 = 1 << 16;

/// All primes in `[lo, hi)`, ascending. 2 is included when in range.
///
/// Wide ranges use a segmented sieve; ranges that are narrow compared with
/// `sqrt(hi)` fall back to Miller-Rabin on each odd candidate.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    let hi = hi.min(PRIME_LIMIT);
    if lo >= hi {
        return Vec::new();
    }
    let root = isqrt(hi - 1);
    if (hi - lo).saturating_mul(16) < root {
        return (lo..hi).filter(|&n| is_prime(n)).collect();
    }
    let base = small_primes(root + 1);
    let mut out = Vec::new();
    let mut seg_lo = lo;
    let mut marks = vec![false; SEGMENT as usize];
    while seg_lo < hi {
        let seg_hi = (seg_lo + SEGMENT).min(hi);
        let len = (seg_hi - seg_lo) as usize;
        marks[..len].fill(true);
        for &q in &base {
            if q * q >= seg_hi {
                break;
            }
            let start = (q * q).max(seg_lo.div_ceil(q) * q);
            let mut m = start;
            while m < seg_hi {
                marks[(m - seg_lo) as usize] = false;
                m += q;
            }
        }
        out.extend(
            marks[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| seg_lo + i as u64),
        );
        seg_lo = seg_hi;
    }
    out
}

/// Odd primes `p <= n` as certified [`Prime`] values.
pub fn odd_primes_up_to(n: u64) -> Vec<Prime> {
    primes_in(3, n.saturating_add(1))
        .into_iter()
        .map(Prime::from_sieve)
        .collect()
}

/// Jacobi symbol `(a/n)` for odd `n`, by the binary algorithm.
pub fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// The quadratic character mod `p` with `chi(0) = 0`.
pub fn legendre(a: i64, p: Prime) -> i8 {
    let r = (a as i128).rem_euclid(p.0 as i128) as u64;
    jacobi(r, p.0)
}

/// Horner evaluation of `f(x) mod p` for coefficients already in `0..p`.
#[inline]
pub fn eval_reduced(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| {
        let v = mul_mod(acc, x, p) + c;
        if v >= p {
            v - p
        } else {
            v
        }
    })
}

/// `f(x) mod p` by Horner's rule.
pub fn poly_eval_mod(f: &crate::poly::IntPolynomial, x: u64, p: Prime) -> u64 {
    eval_reduced(&f.reduce_mod(p.0), x % p.0, p.0)
}

/// Iterates `f(0), f(1), ..., f(p - 1)` mod `p` using forward differences:
/// each step costs `deg f` modular additions and no multiplications.
pub struct ResidueValues {
    diffs: Vec<u64>,
    p: u64,
    remaining: u64,
}

impl ResidueValues {
    pub fn new(coeffs: &[u64], p: u64) -> Self {
        let d = coeffs.len().saturating_sub(1);
        let mut diffs: Vec<u64> = (0..=d as u64)
            .map(|x| eval_reduced(coeffs, x % p, p))
            .collect();
        // turn values f(0..=d) into the difference table Δ^k f(0)
        for k in 1..=d {
            for i in (k..=d).rev() {
                diffs[i] = (diffs[i] + p - diffs[i - 1]) % p;
            }
        }
        ResidueValues {
            diffs,
            p,
            remaining: p,
        }
    }
}

impl Iterator for ResidueValues {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.diffs[0];
        let p = self.p;
        for k in 0..self.diffs.len() - 1 {
            let v = self.diffs[k] + self.diffs[k + 1];
            self.diffs[k] = if v >= p { v - p } else { v };
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

impl ExactSizeIterator for ResidueValues {}

/// Bit table of the nonzero squares mod `p`. Residue 0 is never marked and
/// [`ResidueTable::chi`] maps it to 0.
#[derive(Clone)]
pub struct ResidueTable {
    modulus: Prime,
    bits: Vec<u64>,
}

impl fmt::Debug for ResidueTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResidueTable")
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

impl ResidueTable {
    pub fn new(p: Prime) -> Result<Self> {
        Self::with_cap(p, DEFAULT_TABLE_CAP)
    }

    pub fn with_cap(p: Prime, cap: u64) -> Result<Self> {
        let m = p.get();
        if m >= cap {
            return Err(Error::TableTooLarge { p: m, cap });
        }
        let mut bits = vec![0u64; (m as usize).div_ceil(64)];
        let mut sq = 0u64;
        // (x + 1)^2 = x^2 + 2x + 1
        for x in 0..(m - 1) / 2 {
            sq = (sq + 2 * x + 1) % m;
            bits[(sq / 64) as usize] |= 1 << (sq % 64);
        }
        Ok(ResidueTable { modulus: p, bits })
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    /// `a` must already be reduced into `0..p`.
    #[inline]
    pub fn is_nonzero_square(&self, a: u64) -> bool {
        (self.bits[(a / 64) as usize] >> (a % 64)) & 1 == 1
    }

    #[inline]
    pub fn chi(&self, a: u64) -> i8 {
        if a == 0 {
            0
        } else if self.is_nonzero_square(a) {
            1
        } else {
            -1
        }
    }

    /// Number of nonzero squares, always `(p - 1) / 2`.
    pub fn square_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Nonzero squares in ascending order.
    pub fn squares(&self) -> Vec<u64> {
        (1..self.modulus.get())
            .filter(|&a| self.is_nonzero_square(a))
            .collect()
    }

    /// `sum_x chi(v)` over a stream of reduced values.
    #[inline]
    pub fn character_sum<I: Iterator<Item = u64>>(&self, values: I) -> i64 {
        let mut squares = 0i64;
        let mut nonzero = 0i64;
        for v in values {
            squares += self.is_nonzero_square(v) as i64;
            nonzero += (v != 0) as i64;
        }
        2 * squares - nonzero
    }
}

/// The quadratic character mod `p`, backed by a table when the modulus is
/// under the table cap and by the Jacobi algorithm otherwise.
pub enum Character {
    Table(ResidueTable),
    Direct(Prime),
}

impl Character {
    pub fn new(p: Prime) -> Self {
        match ResidueTable::new(p) {
            Ok(t) => Character::Table(t),
            Err(_) => Character::Direct(p),
        }
    }

    #[inline]
    pub fn chi(&self, a: u64) -> i8 {
        match self {
            Character::Table(t) => t.chi(a),
            Character::Direct(p) => jacobi(a, p.get()),
        }
    }

    pub fn character_sum<I: Iterator<Item = u64>>(&self, values: I) -> i64 {
        match self {
            Character::Table(t) => t.character_sum(values),
            Character::Direct(p) => values.map(|v| jacobi(v, p.get()) as i64).sum(),
        }
    }
}

/// Smallest quadratic non-residue mod `p`.
pub fn least_nonresidue(p: Prime) -> u64 {
    (2..p.get())
        .find(|&n| jacobi(n, p.get()) == -1)
        .expect("every odd prime has a non-residue")
}
