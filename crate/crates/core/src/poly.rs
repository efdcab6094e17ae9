//! Exact univariate polynomials.
//!
//! [`IntPolynomial`] carries the models `y^2 = f(x)` and the twisting
//! polynomials `D(T)`. Coefficients are stored constant term first and are
//! always exact. The text grammar accepted by [`IntPolynomial::from_str`] is
//!
//! ```text
//! poly := term (('+' | '-') term)*
//! term := ['+' | '-'] ( integer ['*'] [monomial] | monomial )
//! monomial := var ['^' integer]
//! var := 'x' | 'T'
//! ```
//!
//! Whitespace is ignored everywhere. Like terms are combined.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Degree cap for parsed exponents; guards against `x^99999999999`.
const MAX_PARSED_DEGREE: u64 = 4096;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    /// Builds a polynomial from coefficients, constant term first. Trailing
    /// zeros are dropped, so `[]` and `[0, 0]` are both the zero polynomial.
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient; 0 for the zero polynomial.
    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    /// Coefficients reduced into `0..p`.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        self.coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
            .collect()
    }

    /// `f(T^2)`.
    pub fn substitute_square(&self) -> IntPolynomial {
        let mut out = vec![0i64; self.coeffs.len() * 2];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[2 * i] = c;
        }
        IntPolynomial::new(out)
    }

    /// True when the coefficient list reads the same in both directions.
    pub fn is_palindromic(&self) -> bool {
        let c = &self.coeffs;
        !c.is_empty() && c.iter().eq(c.iter().rev())
    }

    pub fn derivative(&self) -> IntPolynomial {
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as i64)
                .collect(),
        )
    }

    pub(crate) fn to_big(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Exact discriminant, or `None` for polynomials of degree < 1.
    ///
    /// Uses `disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lead(f)` with the
    /// resultant computed as a fraction-free Sylvester determinant.
    pub fn discriminant(&self) -> Option<BigInt> {
        let n = self.degree()?;
        if n == 0 {
            return None;
        }
        let f = self.to_big();
        let df = self.derivative().to_big();
        let res = resultant(&f, &df);
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let lead = BigInt::from(self.leading());
        debug_assert!((&res % &lead).is_zero());
        Some(res / lead * sign)
    }

    pub fn is_squarefree(&self) -> bool {
        match self.discriminant() {
            Some(d) => !d.is_zero(),
            // constants have no roots, repeated or otherwise
            None => !self.is_zero(),
        }
    }

    /// Renders with the given variable name.
    pub fn display_with(&self, var: char) -> impl fmt::Display + '_ {
        PolyDisplay { poly: self, var }
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({})", self)
    }
}

struct PolyDisplay<'a> {
    poly: &'a IntPolynomial,
    var: char,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.poly.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            first = false;
            match (k, mag) {
                (0, m) => write!(f, "{}", m)?,
                (1, 1) => write!(f, "{}", self.var)?,
                (1, m) => write!(f, "{}*{}", m, self.var)?,
                (k, 1) => write!(f, "{}^{}", self.var, k)?,
                (k, m) => write!(f, "{}*{}^{}", m, self.var, k)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with('x').fmt(f)
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser::new(s).parse_polynomial()
    }
}

/// Parses the polynomial grammar described in the module docs.
pub fn parse_polynomial(text: &str) -> Result<IntPolynomial> {
    text.parse()
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    var: Option<char>,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let chars = text
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        Parser {
            chars,
            pos: 0,
            var: None,
            text,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(col, _)| col)
            .unwrap_or(self.text.chars().count() + 1)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn parse_polynomial(mut self) -> Result<IntPolynomial> {
        if self.chars.is_empty() {
            return self.error("empty polynomial");
        }
        let mut acc: Vec<i128> = Vec::new();
        let mut first = true;
        while self.peek().is_some() {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                Some(c) => return self.error(format!("expected '+' or '-', found '{}'", c)),
                None => unreachable!(),
            };
            first = false;
            let (coeff, exp) = self.parse_term()?;
            let exp = exp as usize;
            if acc.len() <= exp {
                acc.resize(exp + 1, 0);
            }
            acc[exp] += sign * coeff as i128;
            if acc[exp].abs() > i64::MAX as i128 {
                return Err(Error::CoefficientOverflow);
            }
        }
        Ok(IntPolynomial::new(
            acc.into_iter().map(|c| c as i64).collect(),
        ))
    }

    fn parse_term(&mut self) -> Result<(i64, u64)> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.parse_integer("coefficient")?;
                if self.peek() == Some('.') {
                    return self.error("non-integer coefficient");
                }
                let starred = if self.peek() == Some('*') {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                match self.peek() {
                    Some(c) if self.is_var(c) => {
                        let exp = self.parse_monomial()?;
                        Ok((coeff, exp))
                    }
                    _ if starred => self.error("expected variable after '*'"),
                    _ => Ok((coeff, 0)),
                }
            }
            Some(c) if self.is_var(c) => Ok((1, self.parse_monomial()?)),
            Some(c) => self.error(format!("unexpected character '{}'", c)),
            None => self.error("expected a term"),
        }
    }

    fn is_var(&self, c: char) -> bool {
        c == 'x' || c == 'T'
    }

    fn parse_monomial(&mut self) -> Result<u64> {
        let c = self.peek().expect("caller checked");
        match self.var {
            Some(v) if v != c => {
                return self.error(format!("mixed variables '{}' and '{}'", v, c));
            }
            _ => self.var = Some(c),
        }
        self.pos += 1;
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let start = self.pos;
        let exp = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.parse_integer("exponent")?,
            _ => return self.error("expected a non-negative integer exponent"),
        };
        if self.peek() == Some('.') {
            self.pos = start;
            return self.error("non-integer exponent");
        }
        let exp = exp as u64;
        if exp > MAX_PARSED_DEGREE {
            self.pos = start;
            return self.error(format!("exponent exceeds {}", MAX_PARSED_DEGREE));
        }
        Ok(exp)
    }

    fn parse_integer(&mut self, what: &str) -> Result<i64> {
        let mut value: i64 = 0;
        let start = self.pos;
        while let Some(c) = self.peek() {
            let Some(d) = c.to_digit(10) else { break };
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as i64))
                .ok_or(Error::CoefficientOverflow)?;
            self.pos += 1;
        }
        if self.pos == start {
            return self.error(format!("expected {}", what));
        }
        Ok(value)
    }
}

/// Fraction-free (Bareiss) determinant of the Sylvester matrix of `f` and `g`
/// (coefficients constant term first).
pub(crate) fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    // rows hold coefficients highest degree first
    for row in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            mat[n + row][row + j] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut mat: Vec<Vec<BigInt>>) -> BigInt {
    let size = mat.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..size {
        if mat[k][k].is_zero() {
            let Some(swap) = (k + 1..size).find(|&r| !mat[r][k].is_zero()) else {
                return BigInt::zero();
            };
            mat.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let v = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                mat[i][j] = v / &prev;
            }
        }
        prev = mat[k][k].clone();
    }
    sign * &mat[size - 1][size - 1]
}

/// Dense polynomial with exact rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RationalPolynomial {
    pub(crate) coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub(crate) fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub(crate) fn from_int(p: &IntPolynomial) -> Self {
        Self::new(
            p.to_big()
                .into_iter()
                .map(BigRational::from_integer)
                .collect(),
        )
    }

    pub(crate) fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub(crate) fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Self::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub(crate) fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub(crate) fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Evaluates an integer polynomial at a rational point.
    pub(crate) fn eval_int(f: &IntPolynomial, x: &BigRational) -> BigRational {
        f.to_big().iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    /// `f(g(T))` for integer `f`.
    pub(crate) fn compose_int(f: &IntPolynomial, g: &Self) -> Self {
        f.to_big()
            .iter()
            .rev()
            .fold(Self::new(Vec::new()), |acc, c| {
                acc.mul(g)
                    .add(&Self::constant(BigRational::from_integer(c.clone())))
            })
    }

    /// Least common multiple of the coefficient denominators.
    pub(crate) fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Converts to an integer polynomial when every coefficient is integral
    /// and fits in 64 bits.
    pub(crate) fn to_int(&self) -> Result<IntPolynomial> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.is_integer() {
                return Err(Error::InvalidArgument(
                    "polynomial has non-integral coefficients".into(),
                ));
            }
            out.push(c.to_integer().to_i64().ok_or(Error::CoefficientOverflow)?);
        }
        Ok(IntPolynomial::new(out))
    }

    /// True when `self = lambda * other` for some nonzero rational lambda.
    pub(crate) fn is_scalar_multiple_of(&self, other: &Self) -> bool {
        if self.degree() != other.degree() || other.coeffs.is_empty() {
            return false;
        }
        let lambda = self.leading() / other.leading();
        !lambda.is_zero() && other.scale(&lambda) == *self
    }
}

/// Reduces a big integer modulo a small positive modulus.
pub(crate) fn big_mod(value: &BigInt, p: u64) -> u64 {
    let r = value.mod_floor(&BigInt::from(p));
    r.abs().to_u64().expect("residue below p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::new(c.to_vec())
    }

    #[test]
    fn parses_spec_examples() {
        assert_eq!(
            parse_polynomial("x^5 - x + 1").unwrap(),
            poly(&[1, -1, 0, 0, 0, 1])
        );
        assert_eq!(parse_polynomial("T^3+T").unwrap(), poly(&[0, 1, 0, 1]));
    }

    #[test]
    fn rejects_fractional_exponent_at_exponent_column() {
        match parse_polynomial("x^1.5") {
            Err(Error::Syntax { column, message }) => {
                assert_eq!(column, 3);
                assert!(message.contains("exponent"), "{}", message);
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn rejects_fractional_coefficient_and_junk() {
        assert!(matches!(
            parse_polynomial("1.5x"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_polynomial("x + y"),
            Err(Error::Syntax { column: 5, .. })
        ));
        assert!(matches!(
            parse_polynomial("x + T"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_polynomial(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("3*"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x x"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn accepts_implicit_products_and_whitespace() {
        assert_eq!(
            parse_polynomial(" - 3 x ^ 2 + 2*x - 7 ").unwrap(),
            poly(&[-7, 2, -3])
        );
        assert_eq!(parse_polynomial("x^2 + x^2").unwrap(), poly(&[0, 0, 2]));
        assert_eq!(parse_polynomial("x - x").unwrap(), IntPolynomial::zero());
    }

    #[test]
    fn prints_readably() {
        assert_eq!(poly(&[1, -1, 0, 0, 0, 1]).to_string(), "x^5 - x + 1");
        assert_eq!(
            poly(&[-2, 0, 0, 10, 0, 0, 1]).to_string(),
            "x^6 + 10*x^3 - 2"
        );
        assert_eq!(poly(&[0, -1]).to_string(), "-x");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        assert_eq!(poly(&[0, 1, 0, 1]).display_with('T').to_string(), "T^3 + T");
    }

    #[test]
    fn discriminants_match_closed_forms() {
        // x^3 + ax + b: -4a^3 - 27b^2
        assert_eq!(
            poly(&[0, 1, 0, 1]).discriminant().unwrap(),
            BigInt::from(-4)
        );
        assert_eq!(
            poly(&[1, -1, 0, 1]).discriminant().unwrap(),
            BigInt::from(-23)
        );
        // ax^2 + bx + c: b^2 - 4ac
        assert_eq!(poly(&[3, 5, 2]).discriminant().unwrap(), BigInt::from(1));
        assert_eq!(
            poly(&[0, -1, 0, 0, 0, 1]).discriminant().unwrap(),
            BigInt::from(-256)
        );
        assert_eq!(
            poly(&[0, 1, 0, 0, 0, 1]).discriminant().unwrap(),
            BigInt::from(256)
        );
        assert_eq!(
            poly(&[1, 0, 0, 0, 0, 3]).discriminant().unwrap(),
            BigInt::from(253125)
        );
        assert_eq!(
            poly(&[1, 0, 0, 0, 0, 0, 1]).discriminant().unwrap(),
            BigInt::from(-46656)
        );
        assert_eq!(
            poly(&[0, 0, -1, 1]).discriminant().unwrap(),
            BigInt::from(0)
        );
        assert!(!poly(&[0, 0, -1, 1]).is_squarefree());
    }

    #[test]
    fn palindromes() {
        assert!(poly(&[1, 2, 3, 3, 2, 1]).is_palindromic());
        assert!(!poly(&[1, -1, 0, 0, 0, 1]).is_palindromic());
        assert_eq!(poly(&[1, 2]).substitute_square(), poly(&[1, 0, 2]));
    }
}
