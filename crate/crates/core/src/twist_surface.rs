//! Quadratic-twist surfaces `D(T) y^2 = f(x)` over the projective line.
//!
//! The fiber at `T = t` is the quadratic twist of `y^2 = f(x)` by `D(t)`, so
//! its trace is `chi_p(D(t)) a_p(f)`, with fibers where `p | D(t)`
//! contributing 0. Summing over `t` gives the fast identity
//! `p A_p = a_p(f) sum_t chi_p(D(t))`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::curves::{self, curve_from_poly, BadPrimes, CurveSpec};
use crate::error::{BadReason, Error, Result};
use crate::finite_field::{legendre, odd_primes_up_to, poly_eval_mod, Character, Prime};
use crate::poly::{IntPolynomial, RationalPolynomial};

/// Default hard cap on the sweep cutoff.
pub const DEFAULT_N_CAP: u64 = 10_000_000;

/// Number of primes handed to the worker pool per verification block.
const VERIFY_BLOCK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum FiberMode {
    /// `A_p = (a_p(f) / p) sum_t chi(D(t))`.
    #[default]
    FastTwist,
    /// `A_p = (1/p) sum_t fiber_trace(t)`, one fiber at a time.
    Fiberwise,
}

impl FromStr for FiberMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast-twist" => Ok(FiberMode::FastTwist),
            "fiberwise" => Ok(FiberMode::Fiberwise),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode '{}' (expected fast-twist or fiberwise)",
                other
            ))),
        }
    }
}

impl fmt::Display for FiberMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiberMode::FastTwist => "fast-twist",
            FiberMode::Fiberwise => "fiberwise",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TwistSurfaceSpec {
    f: CurveSpec,
    d: IntPolynomial,
    d_bad: BadPrimes,
    mode: FiberMode,
}

impl TwistSurfaceSpec {
    pub fn new(f: IntPolynomial, d: IntPolynomial, mode: FiberMode) -> Result<Self> {
        let f = curve_from_poly(f)?;
        if d.degree().is_none_or(|deg| deg == 0) {
            return Err(Error::InvalidArgument(
                "twisting polynomial D must be nonconstant".into(),
            ));
        }
        let d_bad = BadPrimes::of(&d)?;
        Ok(TwistSurfaceSpec { f, d, d_bad, mode })
    }

    /// The self-twist `f(T) y^2 = f(x)`.
    pub fn self_twist(f: IntPolynomial, mode: FiberMode) -> Result<Self> {
        Self::new(f.clone(), f, mode)
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.f
    }

    pub fn twist(&self) -> &IntPolynomial {
        &self.d
    }

    pub fn mode(&self) -> FiberMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: FiberMode) -> Self {
        self.mode = mode;
        self
    }

    /// Reason `p` lies in `S(f) ∪ S(D)`.
    pub fn bad_reason(&self, p: u64) -> Option<BadReason> {
        self.f
            .bad_primes()
            .reason(p)
            .or_else(|| self.d_bad.reason(p))
    }

    pub fn is_good(&self, p: u64) -> bool {
        self.bad_reason(p).is_none()
    }

    fn check_good(&self, p: Prime) -> Result<()> {
        match self.bad_reason(p.get()) {
            Some(reason) => Err(Error::BadPrime { p: p.get(), reason }),
            None => Ok(()),
        }
    }
}

/// `chi_p(D(t)) a_p(f)` for one fiber.
pub fn fiber_trace(s: &TwistSurfaceSpec, p: Prime, t: u64) -> Result<i64> {
    s.check_good(p)?;
    let a = curves::trace(&s.f, p)?.a;
    Ok(fiber_trace_given(s, p, t, a))
}

fn fiber_trace_given(s: &TwistSurfaceSpec, p: Prime, t: u64, a_f: i64) -> i64 {
    legendre(poly_eval_mod(&s.d, t, p) as i64, p) as i64 * a_f
}

/// `sum_{t mod p} chi_p(D(t))`. Straight evaluation even when `p | lead(D)`.
pub fn char_sum(d: &IntPolynomial, p: Prime) -> i64 {
    curves::character_sum_with(d, p, &Character::new(p))
}

/// `A_p` held as the integer `p A_p`; the denominator is always `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AverageTrace {
    pub p: u64,
    pub scaled: i64,
}

impl AverageTrace {
    /// From `a_p(f)` and `sum_t chi(D(t))`.
    pub fn from_parts(p: u64, a_f: i64, chi_sum_d: i64) -> Self {
        AverageTrace {
            p,
            scaled: a_f * chi_sum_d,
        }
    }

    /// Reduced exact value.
    pub fn value(&self) -> Ratio<i64> {
        Ratio::new(self.scaled, self.p as i64)
    }

    pub fn to_f64(&self) -> f64 {
        self.scaled as f64 / self.p as f64
    }
}

/// `A_p(X)` at a good prime, computed by the surface's mode.
pub fn average_trace(s: &TwistSurfaceSpec, p: Prime) -> Result<AverageTrace> {
    s.check_good(p)?;
    let chi = Character::new(p);
    let f_sum = curves::character_sum_with(s.f.poly(), p, &chi);
    let a_f = curves::trace_from_character_sum(s.f.poly(), p, f_sum);
    match s.mode {
        FiberMode::FastTwist => {
            let d_sum = if s.d == *s.f.poly() {
                f_sum
            } else {
                curves::character_sum_with(&s.d, p, &chi)
            };
            Ok(AverageTrace::from_parts(p.get(), a_f, d_sum))
        }
        FiberMode::Fiberwise => {
            let total: i64 = (0..p.get()).map(|t| fiber_trace_given(s, p, t, a_f)).sum();
            Ok(AverageTrace {
                p: p.get(),
                scaled: total,
            })
        }
    }
}

/// Geometric grid of `k` cutoffs from `lo` to `hi`, rounded and deduplicated.
pub fn geometric_grid(k: usize, lo: u64, hi: u64) -> Vec<u64> {
    if k == 0 || hi < 2 {
        return Vec::new();
    }
    let lo = lo.clamp(2, hi);
    if k == 1 || lo == hi {
        return vec![hi];
    }
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (k - 1) as f64);
    let mut grid: Vec<u64> = (0..k)
        .map(|i| {
            if i == k - 1 {
                hi
            } else {
                ((lo as f64) * ratio.powi(i as i32)).round() as u64
            }
        })
        .collect();
    grid.dedup();
    grid
}

/// The default grid: 20 geometric points from 10^3 to `n_max`.
pub fn default_grid(n_max: u64) -> Vec<u64> {
    geometric_grid(20, 1000, n_max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NagaoPoint {
    /// Cutoff `N`; primes `p <= N` are included.
    pub n: u64,
    /// `(1/N) sum -A_p log p`.
    pub s1: f64,
    /// `(1/n_primes) sum -A_p`.
    pub s2: f64,
    /// Number of good primes `p <= N`.
    pub n_primes: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NagaoSeries {
    pub points: Vec<NagaoPoint>,
    pub records: Vec<AverageTrace>,
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

impl NagaoSeries {
    /// Accumulates both estimators over `records` (ascending in `p`) at
    /// every cutoff of `grid`.
    pub fn accumulate(records: Vec<AverageTrace>, grid: &[u64]) -> Self {
        debug_assert!(records.windows(2).all(|w| w[0].p < w[1].p));
        let mut weighted = Kahan::default();
        let mut plain = Kahan::default();
        let mut count = 0u64;
        let mut idx = 0;
        let mut points = Vec::with_capacity(grid.len());
        for &n in grid {
            while idx < records.len() && records[idx].p <= n {
                let r = &records[idx];
                let neg = -r.to_f64();
                weighted.add(neg * (r.p as f64).ln());
                plain.add(neg);
                count += 1;
                idx += 1;
            }
            points.push(NagaoPoint {
                n,
                s1: weighted.sum / n as f64,
                s2: if count == 0 {
                    0.0
                } else {
                    plain.sum / count as f64
                },
                n_primes: count,
            });
        }
        NagaoSeries { points, records }
    }

    pub fn last(&self) -> Option<&NagaoPoint> {
        self.points.last()
    }
}

/// Checks `grid ⊆ [2, n_max]` and `n_max <= cap`; returns the sorted grid.
pub fn validate_grid(n_max: u64, grid: &[u64], cap: u64) -> Result<Vec<u64>> {
    if n_max > cap {
        return Err(Error::CapExceeded {
            what: "sweep cutoff",
            p: n_max,
            cap,
        });
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if let Some(&bad) = grid.iter().find(|&&n| n < 2 || n > n_max) {
        return Err(Error::InvalidArgument(format!(
            "grid point {} outside [2, {}]",
            bad, n_max
        )));
    }
    Ok(grid)
}

/// Both Nagao estimators over the good primes `p <= n_max`.
pub fn nagao_series(s: &TwistSurfaceSpec, n_max: u64, grid: &[u64]) -> Result<NagaoSeries> {
    nagao_series_capped(s, n_max, grid, DEFAULT_N_CAP)
}

pub fn nagao_series_capped(
    s: &TwistSurfaceSpec,
    n_max: u64,
    grid: &[u64],
    cap: u64,
) -> Result<NagaoSeries> {
    let grid = validate_grid(n_max, grid, cap)?;
    let primes: Vec<Prime> = odd_primes_up_to(n_max)
        .into_iter()
        .filter(|p| s.is_good(p.get()))
        .collect();
    let records = primes
        .par_iter()
        .map(|&p| average_trace(s, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(NagaoSeries::accumulate(records, &grid))
}

/// `x -> (a x + b) / (c x + d)` with `ad - bc != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MobiusTransform {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl MobiusTransform {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if (a as i128) * (d as i128) == (b as i128) * (c as i128) {
            return Err(Error::DegenerateTransform);
        }
        Ok(MobiusTransform { a, b, c, d })
    }

    /// `sigma(x) = 1/x`.
    pub fn inversion() -> Self {
        MobiusTransform {
            a: 0,
            b: 1,
            c: 1,
            d: 0,
        }
    }

    pub fn has_pole_at_infinity(&self) -> bool {
        self.c == 0
    }

    /// `sigma(∞) = a/c`; `None` when `c = 0`.
    pub fn image_of_infinity(&self) -> Option<BigRational> {
        (self.c != 0).then(|| BigRational::new(self.a.into(), self.c.into()))
    }

    /// `sigma^{-1}(∞) = -d/c`; `None` when `c = 0`.
    pub fn preimage_of_infinity(&self) -> Option<BigRational> {
        (self.c != 0).then(|| BigRational::new((-self.d).into(), self.c.into()))
    }

    /// Numerator of `f(sigma(x))` after clearing `(cx + d)^deg f`.
    fn pullback_numerator(&self, f: &IntPolynomial) -> RationalPolynomial {
        let n = f.degree().unwrap_or(0);
        let q = |v: i64| BigRational::from_integer(v.into());
        let num = RationalPolynomial::new(vec![q(self.b), q(self.a)]);
        let den = RationalPolynomial::new(vec![q(self.d), q(self.c)]);
        f.coeffs()
            .iter()
            .enumerate()
            .fold(RationalPolynomial::new(Vec::new()), |acc, (i, &fi)| {
                acc.add(&num.pow(i).mul(&den.pow(n - i)).scale(&q(fi)))
            })
    }

    /// Exact test that `sigma` maps the roots of the squarefree `f` onto
    /// themselves: the pulled-back numerator is a scalar multiple of `f`.
    pub fn permutes_roots_of(&self, f: &IntPolynomial) -> bool {
        self.pullback_numerator(f)
            .is_scalar_multiple_of(&RationalPolynomial::from_int(f))
    }
}

impl fmt::Display for MobiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = IntPolynomial::new(vec![self.b, self.a]);
        let den = IntPolynomial::new(vec![self.d, self.c]);
        write!(f, "({})/({})", num, den)
    }
}

impl FromStr for MobiusTransform {
    type Err = Error;

    /// Accepts `(a x + b)/(c x + d)`, shorthands such as `1/x`, and a bare
    /// linear polynomial (denominator 1).
    fn from_str(text: &str) -> Result<Self> {
        let (num_text, den_text, den_offset) = match text.find('/') {
            Some(i) => (&text[..i], &text[i + 1..], text[..=i].chars().count()),
            None => (text, "1", 0),
        };
        let num = parse_linear(num_text, 0)?;
        let den = parse_linear(den_text, den_offset)?;
        MobiusTransform::new(num.1, num.0, den.1, den.0)
    }
}

/// `parse_mobius`.
pub fn parse_mobius(text: &str) -> Result<MobiusTransform> {
    text.parse()
}

/// Parses `(u x + v)` or `u x + v`; returns `(v, u)`.
fn parse_linear(text: &str, offset: usize) -> Result<(i64, i64)> {
    let trimmed = text.trim();
    let lead_ws = text.chars().take_while(|c| c.is_whitespace()).count();
    let (inner, shift) = match trimmed.strip_prefix('(') {
        Some(rest) => match rest.strip_suffix(')') {
            Some(inner) => (inner, 1),
            None => {
                return Err(Error::Syntax {
                    column: offset + lead_ws + 1,
                    message: "unbalanced parenthesis".into(),
                })
            }
        },
        None => (trimmed, 0),
    };
    let poly: IntPolynomial = inner.parse().map_err(|e| match e {
        Error::Syntax { column, message } => Error::Syntax {
            column: column + offset + lead_ws + shift,
            message,
        },
        other => other,
    })?;
    if poly.degree().is_some_and(|d| d > 1) {
        return Err(Error::Syntax {
            column: offset + lead_ws + 1,
            message: "Möbius numerator and denominator must be linear".into(),
        });
    }
    let c = poly.coeffs();
    Ok((
        c.first().copied().unwrap_or(0),
        c.get(1).copied().unwrap_or(0),
    ))
}

/// Result of the Peterson construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetersonTwist {
    /// Integral model `L^2 D(T)`.
    pub d: IntPolynomial,
    /// `D(T) = f(T^2 / f(sigma(∞)) + sigma^{-1}(∞))` with exact coefficients.
    pub rational: Vec<BigRational>,
    /// `L`, the lcm of the denominators of `rational`.
    pub denominator: BigInt,
}

impl PetersonTwist {
    /// The square `L^2` multiplying the rational `D`.
    pub fn square_multiplier(&self) -> BigInt {
        &self.denominator * &self.denominator
    }

    /// The rational `D` printed in the variable `var`, e.g. `27/8*T^2 - 1`.
    pub fn rational_display(&self, var: char) -> String {
        let mut out = String::new();
        for (k, c) in self.rational.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c < &BigRational::zero();
            let mag = if negative { -c } else { c.clone() };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{}^{}", var, k),
            };
            if k == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", mag, mono));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// `D(T) = f(T^2 / f(sigma(∞)) + sigma^{-1}(∞))`, cleared of denominators by
/// a square so every quadratic character sum is unchanged.
pub fn peterson_d(f: &IntPolynomial, sigma: &MobiusTransform) -> Result<PetersonTwist> {
    match f.degree() {
        Some(3) | Some(5) => {}
        Some(degree) => {
            return Err(Error::DegreeOutOfRange {
                degree,
                min: 3,
                max: 5,
            })
        }
        None => return Err(Error::ZeroPolynomial),
    }
    if f.leading() != 1 {
        return Err(Error::InvalidArgument(format!(
            "the construction needs a monic f, got leading coefficient {}",
            f.leading()
        )));
    }
    if !f.is_squarefree() {
        return Err(Error::RepeatedRoot {
            poly: f.to_string(),
        });
    }
    let (Some(at_inf), Some(shift)) = (sigma.image_of_infinity(), sigma.preimage_of_infinity())
    else {
        return Err(Error::PoleAtInfinity);
    };
    let f_at_inf = RationalPolynomial::eval_int(f, &at_inf);
    if f_at_inf.is_zero() {
        return Err(Error::RootAtSigmaInfinity);
    }
    if !sigma.permutes_roots_of(f) {
        return Err(Error::NotARootPermutation);
    }
    let inner = RationalPolynomial::new(vec![shift, BigRational::zero(), f_at_inf.recip()]);
    let rational = RationalPolynomial::compose_int(f, &inner);
    let denominator = rational.denominator_lcm();
    let square = BigRational::from_integer(&denominator * &denominator);
    let d = rational.scale(&square).to_int()?;
    Ok(PetersonTwist {
        d,
        rational: rational.coeffs,
        denominator,
    })
}

/// Outcome of a trace-identity scan. Passing is a necessary condition for
/// the isogeny, not a proof of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorizationReport {
    Pass {
        primes_checked: usize,
    },
    Fail {
        p: u64,
        /// `a_p(J_D)`.
        lhs: i64,
        /// The predicted combination of factor traces.
        rhs: i64,
        primes_checked: usize,
    },
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        matches!(self, FactorizationReport::Pass { .. })
    }

    pub fn least_failing_prime(&self) -> Option<u64> {
        match self {
            FactorizationReport::Fail { p, .. } => Some(*p),
            FactorizationReport::Pass { .. } => None,
        }
    }

    pub fn primes_checked(&self) -> usize {
        match self {
            FactorizationReport::Pass { primes_checked }
            | FactorizationReport::Fail { primes_checked, .. } => *primes_checked,
        }
    }
}

/// Checks `a_p(J_D) = r a_p(J_f)` at every good `p <= n`.
pub fn verify_factorization(
    d: &IntPolynomial,
    f: &IntPolynomial,
    r: i64,
    n: u64,
) -> Result<FactorizationReport> {
    verify_mixed_factorization(d, f, r, &[], n)
}

/// Checks `a_p(J_D) = r a_p(E) + sum_i a_p(E_i)` at every good `p <= n`.
pub fn verify_mixed_factorization(
    d: &IntPolynomial,
    e: &IntPolynomial,
    r: i64,
    others: &[IntPolynomial],
    n: u64,
) -> Result<FactorizationReport> {
    let jd = CurveSpec::hyperelliptic(d.clone())?;
    let base = curve_from_poly(e.clone())?;
    let factors = others
        .iter()
        .map(|o| {
            let c = curve_from_poly(o.clone())?;
            if c.genus() != 1 {
                return Err(Error::WrongGenus {
                    expected: 1,
                    actual: c.genus(),
                });
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let primes: Vec<Prime> = odd_primes_up_to(n)
        .into_iter()
        .filter(|p| {
            let p = p.get();
            jd.is_good(p) && base.is_good(p) && factors.iter().all(|c| c.is_good(p))
        })
        .collect();

    let mut checked = 0;
    for block in primes.chunks(VERIFY_BLOCK) {
        let results = block
            .par_iter()
            .map(|&p| -> Result<(u64, i64, i64)> {
                let lhs = curves::trace(&jd, p)?.a;
                let mut rhs = r * curves::trace(&base, p)?.a;
                for c in &factors {
                    rhs += curves::trace(c, p)?.a;
                }
                Ok((p.get(), lhs, rhs))
            })
            .collect::<Result<Vec<_>>>()?;
        for (p, lhs, rhs) in results {
            if lhs != rhs {
                return Ok(FactorizationReport::Fail {
                    p,
                    lhs,
                    rhs,
                    primes_checked: checked,
                });
            }
            checked += 1;
        }
    }
    Ok(FactorizationReport::Pass {
        primes_checked: checked,
    })
}

/// `true` if the rational `D` has only integer coefficients.
pub fn is_integral(coeffs: &[BigRational]) -> bool {
    coeffs.iter().all(|c| c.denom().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::new(c.to_vec())
    }

    fn pr(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn cm_surface(mode: FiberMode) -> TwistSurfaceSpec {
        TwistSurfaceSpec::self_twist(poly(&[0, 1, 0, 1]), mode).unwrap()
    }

    #[test]
    fn fiber_trace_examples() {
        let s = cm_surface(FiberMode::FastTwist);
        assert_eq!(fiber_trace(&s, pr(5), 1).unwrap(), -2);
        assert_eq!(fiber_trace(&s, pr(5), 2).unwrap(), 0);
        assert_eq!(fiber_trace(&s, pr(5), 0).unwrap(), 0);
    }

    #[test]
    fn average_trace_examples() {
        for mode in [FiberMode::FastTwist, FiberMode::Fiberwise] {
            let s = cm_surface(mode);
            let a5 = average_trace(&s, pr(5)).unwrap();
            assert_eq!(a5.value(), Ratio::new(-4, 5));
            assert_eq!(average_trace(&s, pr(3)).unwrap().value(), Ratio::new(0, 1));
        }
    }

    #[test]
    fn char_sum_examples() {
        assert_eq!(char_sum(&poly(&[0, 1, 0, 1]), pr(5)), -2);
        for p in [3u64, 7, 101] {
            assert_eq!(char_sum(&poly(&[0, 0, 1]), pr(p)), p as i64 - 1);
            assert_eq!(char_sum(&poly(&[0, 1]), pr(p)), 0);
        }
    }

    #[test]
    fn empty_grid_point_is_zero() {
        let s = cm_surface(FiberMode::FastTwist);
        let series = nagao_series(&s, 2, &[2]).unwrap();
        assert_eq!(
            series.points,
            vec![NagaoPoint {
                n: 2,
                s1: 0.0,
                s2: 0.0,
                n_primes: 0
            }]
        );
        let one = nagao_series(&s, 3, &[3]).unwrap();
        assert_eq!(one.points[0].n_primes, 1);
        assert_eq!(one.points[0].s2, 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            validate_grid(10, &[1], 100),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            validate_grid(1000, &[1000], 100),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(
            validate_grid(100, &[50, 10, 50], 100).unwrap(),
            vec![10, 50]
        );
        let g = default_grid(100_000);
        assert_eq!(g.len(), 20);
        assert_eq!((g[0], g[19]), (1000, 100_000));
        assert_eq!(geometric_grid(3, 10, 1000), vec![10, 100, 1000]);
    }

    #[test]
    fn mobius_parsing() {
        assert_eq!(parse_mobius("1/x").unwrap(), MobiusTransform::inversion());
        assert_eq!(
            parse_mobius("(x+1)/(-3x+1)").unwrap(),
            MobiusTransform {
                a: 1,
                b: 1,
                c: -3,
                d: 1
            }
        );
        assert_eq!(
            parse_mobius(" ( 2*x - 5 ) / ( 7 ) ").unwrap(),
            MobiusTransform {
                a: 2,
                b: -5,
                c: 0,
                d: 7
            }
        );
        assert_eq!(
            parse_mobius("(2x+2)/(x+1)"),
            Err(Error::DegenerateTransform)
        );
        assert!(matches!(
            parse_mobius("(x^2+1)/x"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_mobius("(x+1/x"), Err(Error::Syntax { .. })));
        match parse_mobius("(x+1)/(y)") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 8),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn mobius_root_permutation() {
        let f = poly(&[0, -1, 0, 1]);
        assert!(parse_mobius("(x+1)/(-3x+1)").unwrap().permutes_roots_of(&f));
        assert!(parse_mobius("-x").unwrap().permutes_roots_of(&f));
        assert!(!parse_mobius("(x+1)/(x+2)").unwrap().permutes_roots_of(&f));
    }

    #[test]
    fn peterson_inversion_gives_f_of_t_squared() {
        let f = poly(&[1, 2, 3, 3, 2, 1]);
        let tw = peterson_d(&f, &MobiusTransform::inversion()).unwrap();
        assert_eq!(tw.d, f.substitute_square());
        assert_eq!(tw.denominator, BigInt::one());
    }

    #[test]
    fn peterson_three_cycle() {
        let f = poly(&[0, -1, 0, 1]);
        let sigma = parse_mobius("(x+1)/(-3x+1)").unwrap();
        let tw = peterson_d(&f, &sigma).unwrap();
        // f(27 T^2 / 8 + 1/3) = 19683/512 T^6 + 729/64 T^4 - 9/4 T^2 - 8/27
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(
            tw.rational,
            vec![
                q(-8, 27),
                q(0, 1),
                q(-9, 4),
                q(0, 1),
                q(729, 64),
                q(0, 1),
                q(19683, 512)
            ]
        );
        assert_eq!(tw.denominator, BigInt::from(13824));
        assert_eq!(
            tw.d,
            poly(&[
                -56_623_104,
                0,
                -429_981_696,
                0,
                2_176_782_336,
                0,
                7_346_640_384
            ])
        );
        assert!(!is_integral(&tw.rational));
        assert_eq!(
            tw.rational_display('T'),
            "19683/512*T^6 + 729/64*T^4 - 9/4*T^2 - 8/27"
        );
    }

    #[test]
    fn peterson_errors() {
        let f = poly(&[0, -1, 0, 1]);
        assert_eq!(
            peterson_d(&f, &parse_mobius("-x").unwrap()),
            Err(Error::PoleAtInfinity)
        );
        // sigma(∞) = 1 is a root of f
        assert_eq!(
            peterson_d(&f, &parse_mobius("x/(x+1)").unwrap()),
            Err(Error::RootAtSigmaInfinity)
        );
        assert_eq!(
            peterson_d(&f, &parse_mobius("(2x+1)/(x+3)").unwrap()),
            Err(Error::NotARootPermutation)
        );
        assert!(matches!(
            peterson_d(&poly(&[1, 0, 0, 0, 1]), &MobiusTransform::inversion()),
            Err(Error::DegreeOutOfRange { degree: 4, .. })
        ));
        assert!(matches!(
            peterson_d(&poly(&[3, 0, 0, 0, 0, 3]), &MobiusTransform::inversion()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn factorization_examples() {
        let f = poly(&[1, 2, 3, 3, 2, 1]);
        let d = f.substitute_square();
        assert!(verify_factorization(&d, &f, 2, 1000).unwrap().passed());
        assert!(verify_factorization(&f, &f, 1, 1000).unwrap().passed());
        let e = poly(&[0, 1, 0, 1]);
        let report = verify_factorization(&poly(&[2, 0, 0, 0, 0, 0, 1]), &e, 2, 100).unwrap();
        assert_eq!(report.least_failing_prime(), Some(5));
        assert!(verify_mixed_factorization(&e, &e, 1, &[], 1000)
            .unwrap()
            .passed());
        assert!(matches!(
            verify_factorization(&poly(&[0, 0, -1, 1]), &e, 1, 10),
            Err(Error::RepeatedRoot { .. })
        ));
    }
}
