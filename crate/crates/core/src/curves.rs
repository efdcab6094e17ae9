//! Curves `y^2 = f(x)` and their Frobenius data at good primes.
//!
//! Traces follow the eigenvalue convention for every genus:
//! `#C(F_p) = p + 1 - a`. For genus 2 the stored `a` is therefore the
//! negative of the linear coefficient of `L_p(T) = 1 + c_1 T + ...`; the
//! second moment `a^2 / p` does not depend on that choice.
//!
//! The smooth projective model of `y^2 = f(x)` with `deg f = n` has one
//! point at infinity when `n` is odd and `1 + chi(lead f)` points when `n` is
//! even, which gives
//!
//! ```text
//! a = -sum_x chi(f(x))                  (n odd)
//! a = -sum_x chi(f(x)) - chi(lead f)    (n even)
//! ```

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{BadReason, Error, Result};
use crate::finite_field::{
    eval_reduced, jacobi, least_nonresidue, mul_mod, Character, Prime, ResidueTable, ResidueValues,
};
use crate::poly::{big_mod, IntPolynomial};

/// Default largest prime for which [`l_polynomial_genus2`] counts over `F_{p^2}`.
pub const DEFAULT_LPOLY_CAP: u64 = 10_000;

/// Largest prime accepted by the brute-force point counter.
pub const EXHAUSTIVE_CAP: u64 = 10_000;

/// The primes of bad reduction of `y^2 = f(x)`: 2, divisors of the
/// discriminant and divisors of the leading coefficient. Stored as a
/// predicate so large discriminants never need factoring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadPrimes {
    discriminant: BigInt,
    leading: i64,
}

impl BadPrimes {
    pub fn of(f: &IntPolynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let discriminant = f.discriminant().unwrap_or_else(|| BigInt::from(1));
        if discriminant.is_zero() {
            return Err(Error::RepeatedRoot {
                poly: f.to_string(),
            });
        }
        Ok(BadPrimes {
            discriminant,
            leading: f.leading(),
        })
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// The first reason `p` is bad, if any.
    pub fn reason(&self, p: u64) -> Option<BadReason> {
        if p == 2 {
            Some(BadReason::Two)
        } else if self.leading.unsigned_abs().is_multiple_of(p) {
            Some(BadReason::LeadingCoefficient)
        } else if big_mod(&self.discriminant, p) == 0 {
            Some(BadReason::Discriminant)
        } else {
            None
        }
    }

    pub fn contains(&self, p: u64) -> bool {
        self.reason(p).is_some()
    }

    /// Bad primes up to `n` inclusive.
    pub fn up_to(&self, n: u64) -> Vec<u64> {
        crate::finite_field::primes_in(2, n.saturating_add(1))
            .into_iter()
            .filter(|&p| self.contains(p))
            .collect()
    }
}

/// A squarefree model `y^2 = f(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    f: IntPolynomial,
    genus: u32,
    bad: BadPrimes,
}

/// `curve_from_poly`: accepts degrees 3 through 6.
pub fn curve_from_poly(f: IntPolynomial) -> Result<CurveSpec> {
    let degree = f.degree().ok_or(Error::ZeroPolynomial)?;
    if !(3..=6).contains(&degree) {
        return Err(Error::DegreeOutOfRange {
            degree,
            min: 3,
            max: 6,
        });
    }
    CurveSpec::hyperelliptic(f)
}

impl CurveSpec {
    /// Any squarefree `f` of degree at least 3, with genus `(deg - 1) / 2`.
    /// Used for the high-degree `D(T)` curves in factorization checks.
    pub fn hyperelliptic(f: IntPolynomial) -> Result<CurveSpec> {
        let degree = f.degree().ok_or(Error::ZeroPolynomial)?;
        if degree < 3 {
            return Err(Error::DegreeOutOfRange {
                degree,
                min: 3,
                max: usize::MAX,
            });
        }
        let bad = BadPrimes::of(&f)?;
        Ok(CurveSpec {
            genus: ((degree - 1) / 2) as u32,
            f,
            bad,
        })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.f
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.f.degree().expect("nonzero by construction")
    }

    pub fn bad_primes(&self) -> &BadPrimes {
        &self.bad
    }

    pub fn is_good(&self, p: u64) -> bool {
        !self.bad.contains(p)
    }

    fn check_good(&self, p: Prime) -> Result<()> {
        match self.bad.reason(p.get()) {
            Some(reason) => Err(Error::BadPrime { p: p.get(), reason }),
            None => Ok(()),
        }
    }

    /// `sqrt(p)` multiple in the Weil bound `|a| <= 2g sqrt(p)`.
    pub fn weil_factor(&self) -> u64 {
        2 * self.genus as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceRecord {
    pub p: u64,
    pub a: i64,
}

/// `true` when `a^2 <= (bound)^2 p`, i.e. `|a| <= bound * sqrt(p)`.
pub fn within_weil_bound(a: i64, p: u64, bound: u64) -> bool {
    (a as i128) * (a as i128) <= (bound as i128) * (bound as i128) * p as i128
}

/// `sum_{x mod p} chi(f(x))` evaluated with the given character.
pub fn character_sum_with(f: &IntPolynomial, p: Prime, chi: &Character) -> i64 {
    let red = f.reduce_mod(p.get());
    chi.character_sum(ResidueValues::new(&red, p.get()))
}

/// Trace from the affine character sum and the points-at-infinity rule.
pub fn trace_from_character_sum(f: &IntPolynomial, p: Prime, chi_sum: i64) -> i64 {
    let odd = f.degree().is_some_and(|d| d % 2 == 1);
    if odd {
        -chi_sum
    } else {
        -chi_sum
            - jacobi(
                (f.leading() as i128).rem_euclid(p.get() as i128) as u64,
                p.get(),
            ) as i64
    }
}

/// Genus-aware trace of Frobenius at a good prime, for any degree.
pub fn trace(c: &CurveSpec, p: Prime) -> Result<TraceRecord> {
    c.check_good(p)?;
    let chi = Character::new(p);
    let s = character_sum_with(&c.f, p, &chi);
    Ok(TraceRecord {
        p: p.get(),
        a: trace_from_character_sum(&c.f, p, s),
    })
}

/// Trace of an elliptic model (genus 1).
pub fn trace_elliptic(c: &CurveSpec, p: Prime) -> Result<TraceRecord> {
    if c.genus != 1 {
        return Err(Error::WrongGenus {
            expected: 1,
            actual: c.genus,
        });
    }
    trace(c, p)
}

/// Trace of a genus-2 model; degree 6 includes the `chi(lead)` correction.
pub fn trace_genus2(c: &CurveSpec, p: Prime) -> Result<TraceRecord> {
    if c.genus != 2 {
        return Err(Error::WrongGenus {
            expected: 2,
            actual: c.genus,
        });
    }
    trace(c, p)
}

/// `L_p` data of a genus-2 Jacobian in the eigenvalue convention:
/// `prod (1 - alpha_i T) = 1 - a T + b T^2 - p a T^3 + p^2 T^4` with
/// `a = sum alpha_i`, `b = sum_{i<j} alpha_i alpha_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LPolynomial2 {
    pub p: u64,
    pub a: i64,
    pub b: i64,
}

impl LPolynomial2 {
    /// Coefficients of `L_p(T)` constant term first.
    pub fn coefficients(&self) -> [i64; 5] {
        let p = self.p as i64;
        [1, -self.a, self.b, -p * self.a, p * p]
    }

    /// The four Frobenius eigenvalues `alpha_i`, i.e. the roots of
    /// `x^4 - a x^3 + b x^2 - p a x + p^2`.
    ///
    /// With `y = x + p/x` the quartic becomes `y^2 - a y + (b - 2p) = 0`,
    /// followed by `x^2 - y x + p = 0`. The sign of each inner discriminant
    /// is decided in exact arithmetic so double roots on the circle stay on
    /// the circle.
    pub fn eigenvalues(&self) -> [Complex64; 4] {
        let p = self.p as i128;
        let a = self.a as i128;
        // y = (a ± sqrt(delta)) / 2
        let delta = a * a - 4 * (self.b as i128 - 2 * p);
        let mut out = [Complex64::zero(); 4];
        let mut idx = 0;
        for sign in [1i128, -1] {
            // inner discriminant y^2 - 4p = (k ± 2a sqrt(delta)) / 4 with
            // k = a^2 + delta - 16p, all over 4
            let k = a * a + delta - 16 * p;
            let (y, disc) = if delta >= 0 {
                let sd = (delta as f64).sqrt();
                let y = Complex64::new((a as f64 + sign as f64 * sd) / 2.0, 0.0);
                // exact sign of k + sign*2a*sqrt(delta)
                let t = 2 * a * sign;
                let exact_sign = exact_sign_of_sum(k, t, delta);
                let magnitude = (k as f64 + t as f64 * sd).abs() / 16.0;
                let disc = match exact_sign {
                    0 => Complex64::zero(),
                    s if s > 0 => Complex64::new(magnitude, 0.0),
                    _ => Complex64::new(-magnitude, 0.0),
                };
                (y, disc)
            } else {
                let sd = ((-delta) as f64).sqrt();
                let y = Complex64::new(a as f64 / 2.0, sign as f64 * sd / 2.0);
                (y, y * y / 4.0 - Complex64::new(p as f64, 0.0))
            };
            let root = disc.sqrt();
            out[idx] = y / 2.0 + root;
            out[idx + 1] = y / 2.0 - root;
            idx += 2;
        }
        out
    }

    /// Exact check that every eigenvalue has absolute value `sqrt(p)`:
    /// both `y` roots are real with `y^2 <= 4p`.
    pub fn is_unitary(&self) -> bool {
        let p = self.p as i128;
        let a = self.a as i128;
        let delta = a * a - 4 * (self.b as i128 - 2 * p);
        if delta < 0 {
            return false;
        }
        let k = a * a + delta - 16 * p;
        [1i128, -1]
            .iter()
            .all(|&s| exact_sign_of_sum(k, 2 * a * s, delta) <= 0)
    }
}

/// Sign of `k + t * sqrt(d)` for integers with `d >= 0`.
fn exact_sign_of_sum(k: i128, t: i128, d: i128) -> i32 {
    let sk = k.signum() as i32;
    let st = if d == 0 { 0 } else { t.signum() as i32 };
    if st == 0 || sk == st {
        return sk;
    }
    if sk == 0 {
        return st;
    }
    // opposite signs: compare k^2 with t^2 d
    let lhs = k * k;
    let rhs = t * t * d;
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => sk,
        std::cmp::Ordering::Less => st,
    }
}

/// Arithmetic in `F_p[u] / (u^2 - n)` for a non-residue `n`.
#[derive(Clone, Copy)]
struct Fp2 {
    p: u64,
    n: u64,
}

impl Fp2 {
    #[inline]
    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        let re = (mul_mod(x.0, y.0, p) + mul_mod(self.n, mul_mod(x.1, y.1, p), p)) % p;
        let im = (mul_mod(x.0, y.1, p) + mul_mod(x.1, y.0, p)) % p;
        (re, im)
    }

    #[inline]
    fn norm(&self, x: (u64, u64)) -> u64 {
        let p = self.p;
        (mul_mod(x.0, x.0, p) + p - mul_mod(self.n, mul_mod(x.1, x.1, p), p)) % p
    }

    fn eval(&self, coeffs: &[u64], x: (u64, u64)) -> (u64, u64) {
        coeffs.iter().rev().fold((0, 0), |acc, &c| {
            let m = self.mul(acc, x);
            ((m.0 + c) % self.p, m.1)
        })
    }
}

/// `#C(F_{p^2})` for the smooth model. A nonzero `z` in `F_{p^2}` is a square
/// exactly when its norm is a square in `F_p`; every element of `F_p` is a
/// square in `F_{p^2}`, so an even-degree model has two points at infinity.
fn count_points_fp2(f: &IntPolynomial, p: Prime, table: &ResidueTable) -> u64 {
    let field = Fp2 {
        p: p.get(),
        n: least_nonresidue(p),
    };
    let coeffs = f.reduce_mod(p.get());
    let mut affine = 0u64;
    for x1 in 0..p.get() {
        for x0 in 0..p.get() {
            let v = field.eval(&coeffs, (x0, x1));
            affine += match table.chi(field.norm(v)) {
                0 if v == (0, 0) => 1,
                1 => 2,
                _ => 0,
            };
        }
    }
    let infinity = if f.degree().unwrap_or(0) % 2 == 1 {
        1
    } else {
        2
    };
    affine + infinity
}

/// `l_polynomial_genus2` with the default cap.
pub fn l_polynomial_genus2(c: &CurveSpec, p: Prime) -> Result<LPolynomial2> {
    l_polynomial_genus2_capped(c, p, DEFAULT_LPOLY_CAP)
}

/// `b = (a^2 - (p^2 + 1 - #C(F_{p^2}))) / 2` from the two point counts.
pub fn l_polynomial_genus2_capped(c: &CurveSpec, p: Prime, cap: u64) -> Result<LPolynomial2> {
    if c.genus != 2 {
        return Err(Error::WrongGenus {
            expected: 2,
            actual: c.genus,
        });
    }
    c.check_good(p)?;
    if p.get() > cap {
        return Err(Error::CapExceeded {
            what: "F_{p^2} point count at p",
            p: p.get(),
            cap,
        });
    }
    let a = trace(c, p)?.a;
    let table = ResidueTable::new(p)?;
    let n2 = count_points_fp2(&c.f, p, &table) as i128;
    let p2 = (p.get() as i128).pow(2);
    // sum alpha_i^2 = p^2 + 1 - #C(F_{p^2}) = a^2 - 2b
    let power_sum = p2 + 1 - n2;
    let twice_b = (a as i128) * (a as i128) - power_sum;
    debug_assert!(twice_b % 2 == 0, "parity of 2b at p = {}", p);
    Ok(LPolynomial2 {
        p: p.get(),
        a,
        b: (twice_b / 2) as i64,
    })
}

/// `theta = arccos(a / (2 sqrt p))` for a genus-1 record.
pub fn normalized_angle(t: TraceRecord) -> Result<f64> {
    if !within_weil_bound(t.a, t.p, 2) {
        return Err(Error::HasseViolation { p: t.p, a: t.a });
    }
    let x = t.a as f64 / (2.0 * (t.p as f64).sqrt());
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Brute-force point counting, independent of the character-sum path.
pub mod oracle {
    use super::*;

    /// Counts `(x, y)` with `y^2 = f(x)` over all pairs, plus the points at
    /// infinity counted as solutions of `y^2 = lead(f)` (even degree) or a
    /// single point (odd degree). Returns `p + 1 - #C(F_p)`.
    pub fn trace_oracle_exhaustive(c: &CurveSpec, p: Prime) -> Result<TraceRecord> {
        c.check_good(p)?;
        let m = p.get();
        if m >= EXHAUSTIVE_CAP {
            return Err(Error::CapExceeded {
                what: "exhaustive point count at p",
                p: m,
                cap: EXHAUSTIVE_CAP,
            });
        }
        let coeffs = c.f.reduce_mod(m);
        let mut count = 0u64;
        for x in 0..m {
            let fx = eval_reduced(&coeffs, x, m);
            for y in 0..m {
                if y * y % m == fx {
                    count += 1;
                }
            }
        }
        let lead = *coeffs.last().expect("nonzero");
        count += if c.degree() % 2 == 1 {
            1
        } else {
            (0..m).filter(|&y| y * y % m == lead).count() as u64
        };
        Ok(TraceRecord {
            p: m,
            a: m as i64 + 1 - count as i64,
        })
    }
}
