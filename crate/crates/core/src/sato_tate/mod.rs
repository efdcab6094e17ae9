//! Empirical Sato-Tate statistics, Haar-measure moment integrals, and
//! moment-class identification against the table of Sato-Tate groups.

mod quadrature;
mod table;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::curves::{curve_from_poly, TraceRecord};
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

pub use quadrature::{simpson, simpson_2d};
pub use table::{STGroupRecord, SatoTateTable};

/// Default half-width of a moment class.
pub const DEFAULT_TOLERANCE: f64 = 0.25;

const TOL_1D: f64 = 1e-11;
const TOL_2D: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    /// Largest prime in the input.
    pub n: u64,
    pub n_primes: u64,
    /// `(1/n_primes) sum a_p^2 / p`, exact.
    pub second_moment_exact: BigRational,
    pub second_moment: f64,
    /// `(1/n_primes) sum a_p^4 / p^2`.
    pub fourth_moment: f64,
    pub n_zero: u64,
    pub zero_fraction: f64,
}

/// Sums `num_i / den_i` pairwise without reducing.
fn tree_sum(mut terms: Vec<(BigInt, BigInt)>) -> (BigInt, BigInt) {
    if terms.is_empty() {
        return (BigInt::zero(), BigInt::from(1));
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some((a, b)) = it.next() {
            match it.next() {
                Some((c, d)) => {
                    if b == d {
                        next.push((a + c, b));
                    } else {
                        next.push((a * &d + c * &b, b * d));
                    }
                }
                None => next.push((a, b)),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// `num / den` rounded down to 64 fractional bits, then to the nearest double.
fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    let (q, r) = num.div_mod_floor(den);
    let frac = ((r << 64u32) / den).to_u64().unwrap_or(u64::MAX);
    q.to_f64().unwrap_or(f64::NAN) + frac as f64 / 2f64.powi(64)
}

/// Second and fourth moments of `a_p / sqrt(p)` and the fraction of zero
/// traces.
pub fn empirical_moments(traces: &[TraceRecord]) -> Result<MomentReport> {
    if traces.is_empty() {
        return Err(Error::EmptyInput);
    }
    let count = traces.len() as u64;
    let second = tree_sum(
        traces
            .iter()
            .map(|t| (BigInt::from(t.a) * t.a, BigInt::from(t.p)))
            .collect(),
    );
    let fourth = tree_sum(
        traces
            .iter()
            .map(|t| (BigInt::from(t.a).pow(4), BigInt::from(t.p) * t.p))
            .collect(),
    );
    let n_zero = traces.iter().filter(|t| t.a == 0).count() as u64;
    let second_den = &second.1 * count;
    let fourth_den = &fourth.1 * count;
    Ok(MomentReport {
        n: traces.iter().map(|t| t.p).max().unwrap_or(0),
        n_primes: count,
        second_moment: ratio_to_f64(&second.0, &second_den),
        second_moment_exact: BigRational::new(second.0, second_den),
        fourth_moment: ratio_to_f64(&fourth.0, &fourth_den),
        n_zero,
        zero_fraction: n_zero as f64 / count as f64,
    })
}

/// Limiting distributions of a normalized angle `θ ∈ [0, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum STMeasure1D {
    /// `(2/π) sin^2 θ dθ`.
    SatoTate,
    /// `dθ / π`.
    Uniform,
    /// `dθ / (2π) + δ_{π/2} / 2`, the CM case with CM not defined over the
    /// base field.
    HalfUniformDirac,
}

impl STMeasure1D {
    pub const ALL: [STMeasure1D; 3] = [
        STMeasure1D::SatoTate,
        STMeasure1D::Uniform,
        STMeasure1D::HalfUniformDirac,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            STMeasure1D::SatoTate => "sato-tate",
            STMeasure1D::Uniform => "uniform",
            STMeasure1D::HalfUniformDirac => "half-uniform-dirac",
        }
    }

    /// Density of the absolutely continuous part.
    pub fn density(self, theta: f64) -> f64 {
        match self {
            STMeasure1D::SatoTate => 2.0 / PI * theta.sin().powi(2),
            STMeasure1D::Uniform => 1.0 / PI,
            STMeasure1D::HalfUniformDirac => 0.5 / PI,
        }
    }

    /// Location and mass of the point mass, if any.
    pub fn atom(self) -> Option<(f64, f64)> {
        match self {
            STMeasure1D::HalfUniformDirac => Some((FRAC_PI_2, 0.5)),
            _ => None,
        }
    }

    pub fn cdf(self, theta: f64) -> f64 {
        let t = theta.clamp(0.0, PI);
        match self {
            STMeasure1D::SatoTate => (t - (2.0 * t).sin() / 2.0) / PI,
            STMeasure1D::Uniform => t / PI,
            STMeasure1D::HalfUniformDirac => {
                t / (2.0 * PI) + if t >= FRAC_PI_2 { 0.5 } else { 0.0 }
            }
        }
    }

    /// `∫ g dμ`, quadrature on the continuous part plus the atom.
    pub fn integrate<G: Fn(f64) -> f64>(self, g: G) -> f64 {
        let continuous = simpson(|t| g(t) * self.density(t), 0.0, PI, TOL_1D);
        continuous + self.atom().map_or(0.0, |(at, mass)| g(at) * mass)
    }

    pub fn total_mass(self) -> f64 {
        self.integrate(|_| 1.0)
    }
}

impl fmt::Display for STMeasure1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for STMeasure1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown measure '{}'", s)))
    }
}

/// `∫ 4 cos^2 θ dμ`.
pub fn haar_second_moment(measure: STMeasure1D) -> f64 {
    measure.integrate(|t| 4.0 * t.cos().powi(2))
}

/// Weyl density of `USp(4)` in the eigenangles `(θ1, θ2)`.
pub fn usp4_density(t1: f64, t2: f64) -> f64 {
    let (c1, c2) = (t1.cos(), t2.cos());
    8.0 / (PI * PI) * (c1 - c2).powi(2) * t1.sin().powi(2) * t2.sin().powi(2)
}

/// `∫∫ g(θ1, θ2) dμ_{USp(4)}`.
pub fn usp4_integral<G: Fn(f64, f64) -> f64>(g: G) -> f64 {
    simpson_2d(
        |t1, t2| g(t1, t2) * usp4_density(t1, t2),
        (0.0, PI),
        (0.0, PI),
        TOL_2D,
    )
}

/// `∫∫ 4 (cos θ1 + cos θ2)^2 dμ_{USp(4)}`.
pub fn haar_second_moment_usp4() -> f64 {
    usp4_integral(|t1, t2| 4.0 * (t1.cos() + t2.cos()).powi(2))
}

/// Kolmogorov-Smirnov distance between the angles and `measure`. For a
/// measure with an atom, angles at the atom are removed and the rest are
/// compared with the normalized continuous part; see [`atom_mass_gap`].
pub fn ks_distance(angles: &[f64], measure: STMeasure1D) -> Result<f64> {
    let mut sample: Vec<f64> = match measure.atom() {
        Some((at, _)) => angles.iter().copied().filter(|&t| t != at).collect(),
        None => angles.to_vec(),
    };
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let cdf = |t: f64| match measure.atom() {
        Some((at, mass)) => {
            let jump = if t >= at { mass } else { 0.0 };
            (measure.cdf(t) - jump) / (1.0 - mass)
        }
        None => measure.cdf(t),
    };
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &t) in sample.iter().enumerate() {
        let f = cdf(t);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// `|observed fraction at the atom - atom mass|`; 0 for atomless measures
/// with no sample there.
pub fn atom_mass_gap(angles: &[f64], measure: STMeasure1D) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (at, mass) = measure.atom().unwrap_or((FRAC_PI_2, 0.0));
    let hits = angles.iter().filter(|&&t| t == at).count() as f64;
    Ok((hits / angles.len() as f64 - mass).abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassMatch {
    /// The moment class `1`, `2` or `4`, if one lies within tolerance.
    pub moment_class: Option<u32>,
    pub candidates: Vec<STGroupRecord>,
}

impl ClassMatch {
    pub fn no_class(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Rows of `table` whose second moment is within `tolerance` of `moment`.
pub fn identify_in(table: &SatoTateTable, moment: f64, tolerance: f64) -> Result<ClassMatch> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            tolerance
        )));
    }
    let candidates: Vec<STGroupRecord> = table
        .rows()
        .iter()
        .filter(|r| (r.second_moment as f64 - moment).abs() <= tolerance)
        .cloned()
        .collect();
    let mut classes: Vec<u32> = candidates.iter().map(|r| r.second_moment).collect();
    classes.dedup();
    let moment_class = match classes[..] {
        [] => None,
        _ => classes.iter().copied().min_by(|a, b| {
            (*a as f64 - moment)
                .abs()
                .total_cmp(&(*b as f64 - moment).abs())
        }),
    };
    Ok(ClassMatch {
        moment_class,
        candidates,
    })
}

/// Moment-class identification against the embedded table.
pub fn identify_st_class(report: &MomentReport, tolerance: f64) -> Result<ClassMatch> {
    identify_in(&SatoTateTable::embedded(), report.second_moment, tolerance)
}

/// Predicted rank of `J(X^f)(Q(T))` for the self-twist `f(T) y^2 = f(x)`,
/// equal to the moment class.
pub fn predict_rank(f: &IntPolynomial, moment_class: u32) -> Result<u32> {
    let curve = curve_from_poly(f.clone())?;
    let allowed: &[u32] = if curve.genus() == 1 {
        &[1, 2]
    } else {
        &[1, 2, 4]
    };
    if !allowed.contains(&moment_class) {
        return Err(Error::InvalidArgument(format!(
            "moment class {} is impossible in genus {}",
            moment_class,
            curve.genus()
        )));
    }
    Ok(moment_class)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(p: u64, a: i64) -> TraceRecord {
        TraceRecord { p, a }
    }

    #[test]
    fn moment_examples() {
        let zeros = empirical_moments(&[rec(3, 0), rec(7, 0)]).unwrap();
        assert_eq!(zeros.second_moment, 0.0);
        assert_eq!(zeros.zero_fraction, 1.0);
        let one = empirical_moments(&[rec(5, 2)]).unwrap();
        assert_eq!(
            one.second_moment_exact,
            BigRational::new(4.into(), 5.into())
        );
        assert_eq!(one.second_moment, 0.8);
        assert_eq!(one.fourth_moment, 0.64);
        assert_eq!(one.n, 5);
        assert_eq!(empirical_moments(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn haar_values() {
        for (m, want) in [
            (STMeasure1D::SatoTate, 1.0),
            (STMeasure1D::Uniform, 2.0),
            (STMeasure1D::HalfUniformDirac, 1.0),
        ] {
            assert!((haar_second_moment(m) - want).abs() < 1e-9, "{}", m);
            assert!((m.total_mass() - 1.0).abs() < 1e-9, "{}", m);
        }
        assert!((haar_second_moment_usp4() - 1.0).abs() < 1e-6);
        assert!((usp4_integral(|_, _| 1.0) - 1.0).abs() < 1e-6);
        assert!(usp4_integral(|a, b| 2.0 * (a.cos() + b.cos())).abs() < 1e-6);
    }

    #[test]
    fn cdf_matches_density() {
        for m in STMeasure1D::ALL {
            for t in [0.3, 1.0, 2.0, 3.0] {
                let mut mass = simpson(|x| m.density(x), 0.0, t, 1e-12);
                if let Some((at, w)) = m.atom() {
                    if t >= at {
                        mass += w;
                    }
                }
                assert!((mass - m.cdf(t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ks_examples() {
        let spike = vec![FRAC_PI_2; 100];
        assert!((ks_distance(&spike, STMeasure1D::SatoTate).unwrap() - 0.5).abs() < 1e-12);
        let n = 1000;
        let quantiles: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 * PI).collect();
        assert!(ks_distance(&quantiles, STMeasure1D::Uniform).unwrap() <= 1.0 / n as f64 + 1e-12);
        assert_eq!(
            ks_distance(&[], STMeasure1D::Uniform),
            Err(Error::EmptyInput)
        );
        assert_eq!(
            ks_distance(&[FRAC_PI_2], STMeasure1D::HalfUniformDirac),
            Err(Error::EmptyInput)
        );
        let mut mixed = quantiles.clone();
        mixed.extend(std::iter::repeat_n(FRAC_PI_2, n));
        assert!(
            ks_distance(&mixed, STMeasure1D::HalfUniformDirac).unwrap() <= 1.0 / n as f64 + 1e-12
        );
        assert!(atom_mass_gap(&mixed, STMeasure1D::HalfUniformDirac).unwrap() < 1e-12);
    }

    #[test]
    fn class_examples() {
        let t = SatoTateTable::embedded();
        let four = identify_in(&t, 4.02, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(four.moment_class, Some(4));
        let names: Vec<_> = four.candidates.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["C_{2,1}", "E_1"]);
        let two = identify_in(&t, 1.9, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(two.moment_class, Some(2));
        assert_eq!(two.candidates.len(), 16);
        let none = identify_in(&t, 10.0, DEFAULT_TOLERANCE).unwrap();
        assert!(none.no_class());
        assert_eq!(none.moment_class, None);
        assert!(identify_in(&t, 1.0, 0.0).is_err());
    }

    #[test]
    fn rank_examples() {
        let p = |s: &str| s.parse::<IntPolynomial>().unwrap();
        assert_eq!(predict_rank(&p("x^5 - x + 1"), 1).unwrap(), 1);
        assert_eq!(predict_rank(&p("x^6 + 1"), 4).unwrap(), 4);
        assert_eq!(predict_rank(&p("x^3 + x"), 1).unwrap(), 1);
        assert!(predict_rank(&p("x^3 + x"), 4).is_err());
        assert!(predict_rank(&p("x^5 - x + 1"), 3).is_err());
    }
}
