use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::interval::{self, rational_sign, CertifiedInterval};
use crate::error::{Error, Result};

/// Exact real `coeff * pi^(half_pi_exp / 2)`.
///
/// Kept normalized: a zero coefficient always carries a zero exponent, and the
/// coefficient is a reduced fraction. Because `pi` is transcendental, two
/// normalized monomials denote the same real iff their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiMonomial {
    coeff: BigRational,
    half_pi_exp: i64,
}

/// Binary operation accepted by [`monomial_combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    Multiply,
    Divide,
    /// Raise the left operand to an integer power; the right operand is ignored.
    IntegerPower(i64),
}

impl PiMonomial {
    pub fn new(coeff: BigRational, half_pi_exp: i64) -> Self {
        let half_pi_exp = if coeff.is_zero() { 0 } else { half_pi_exp };
        Self { coeff, half_pi_exp }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), 0)
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self::new(coeff, 0)
    }

    pub fn integer(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `pi^(half_pi_exp / 2)`.
    pub fn pi_power(half_pi_exp: i64) -> Self {
        Self::new(BigRational::one(), half_pi_exp)
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn half_pi_exp(&self) -> i64 {
        self.half_pi_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn signum(&self) -> i32 {
        rational_sign(&self.coeff)
    }

    pub fn abs(&self) -> Self {
        Self::new(self.coeff.abs(), self.half_pi_exp)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::new(
            &self.coeff / &other.coeff,
            self.half_pi_exp - other.half_pi_exp,
        ))
    }

    /// Integer power; `0^e` with `e < 0` is rejected.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one());
        }
        if self.is_zero() {
            return if e > 0 {
                Ok(Self::zero())
            } else {
                Err(Error::DivisionByZero)
            };
        }
        let mag = u32::try_from(e.unsigned_abs())
            .map_err(|_| Error::InvalidArgument(format!("exponent {e} too large")))?;
        // powers of a reduced fraction stay reduced
        let num = num_traits::pow(self.coeff.numer().clone(), mag as usize);
        let den = num_traits::pow(self.coeff.denom().clone(), mag as usize);
        let coeff = if e > 0 {
            BigRational::new_raw(num, den)
        } else if num.is_negative() {
            BigRational::new_raw(-den, -num)
        } else {
            BigRational::new_raw(den, num)
        };
        Ok(Self::new(coeff, self.half_pi_exp * e))
    }

    /// Certified enclosure of the value at `precision_bits`.
    pub fn eval(&self, precision_bits: u32) -> CertifiedInterval {
        eval_interval(self, precision_bits)
    }

    /// Certified enclosure of the natural logarithm at `precision_bits`.
    pub fn ln(&self, precision_bits: u32) -> Result<CertifiedInterval> {
        ln_interval(self, precision_bits)
    }

    /// Nearest `f64`, computed through a 64-bit enclosure.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let lnv = ln_interval(&self.abs(), 64).expect("positive").to_f64();
        let v = lnv.exp();
        if self.signum() < 0 {
            -v
        } else {
            v
        }
    }
}

impl Mul for &PiMonomial {
    type Output = PiMonomial;

    fn mul(self, rhs: &PiMonomial) -> PiMonomial {
        PiMonomial::new(&self.coeff * &rhs.coeff, self.half_pi_exp + rhs.half_pi_exp)
    }
}

impl Mul for PiMonomial {
    type Output = PiMonomial;

    fn mul(self, rhs: PiMonomial) -> PiMonomial {
        &self * &rhs
    }
}

impl fmt::Display for PiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.half_pi_exp {
            0 => write!(f, "{}", self.coeff),
            e if e % 2 == 0 => write!(f, "{} pi^{}", self.coeff, e / 2),
            e => write!(f, "{} pi^({}/2)", self.coeff, e),
        }
    }
}

impl Serialize for PiMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PiMonomial", 2)?;
        st.serialize_field("coeff", &self.coeff.to_string())?;
        st.serialize_field("half_pi_exp", &self.half_pi_exp)?;
        st.end()
    }
}

/// `Gamma(two_x / 2)` exactly.
///
/// Integer arguments give `(x-1)!`; half-integers `m + 1/2` give
/// `(2m)! / (4^m m!) * sqrt(pi)`.
pub fn gamma_half(two_x: i64) -> Result<PiMonomial> {
    if two_x <= 0 {
        return Err(Error::InvalidArgument(format!(
            "gamma_half needs a positive doubled argument, got {two_x}"
        )));
    }
    if two_x % 2 == 0 {
        let x = two_x / 2;
        Ok(PiMonomial::rational(BigRational::from_integer(factorial(x - 1))))
    } else {
        let m = (two_x - 1) / 2;
        let num = factorial(2 * m);
        let den = (BigInt::one() << (2 * m as u64)) * factorial(m);
        Ok(PiMonomial::new(BigRational::new(num, den), 1))
    }
}

fn factorial(n: i64) -> BigInt {
    (2..=n.max(1)).fold(BigInt::one(), |acc, j| acc * j)
}

/// Exact product, quotient or power of monomials.
pub fn monomial_combine(a: &PiMonomial, b: &PiMonomial, op: Combine) -> Result<PiMonomial> {
    match op {
        Combine::Multiply => Ok(a * b),
        Combine::Divide => a.checked_div(b),
        Combine::IntegerPower(e) => a.powi(e),
    }
}

/// Certified enclosure of `m` at `precision_bits` (at least 24).
pub fn eval_interval(m: &PiMonomial, precision_bits: u32) -> CertifiedInterval {
    let p = precision_bits.max(24);
    if m.is_zero() {
        return CertifiedInterval::zero(p);
    }
    let w = p + 16;
    let coeff = CertifiedInterval::from_rational(&m.coeff, w);
    let e = m.half_pi_exp;
    let pi = interval::pi(w);
    let mut factor = pi.powi(e.unsigned_abs() / 2);
    if e.unsigned_abs() % 2 == 1 {
        factor = factor.mul(&pi.sqrt());
    }
    let v = if e >= 0 {
        coeff.mul(&factor)
    } else {
        coeff.div(&factor)
    };
    v.with_precision(p)
}

/// Certified enclosure of `ln m` for `m > 0`.
///
/// Only the leading bits of the coefficient's numerator and denominator are
/// touched, so this stays cheap for coefficients with thousands of digits.
pub fn ln_interval(m: &PiMonomial, precision_bits: u32) -> Result<CertifiedInterval> {
    if m.signum() <= 0 {
        return Err(Error::NonPositive(m.to_string()));
    }
    let p = precision_bits.max(24);
    let w = p + 16;
    let num = CertifiedInterval::from_bigint(m.coeff.numer(), w).ln();
    let den = CertifiedInterval::from_bigint(m.coeff.denom(), w).ln();
    let mut v = num.sub(&den);
    if m.half_pi_exp != 0 {
        let ln_pi = interval::pi(w).ln();
        v = v.add(&ln_pi.mul_int(m.half_pi_exp).scale_pow2(-1));
    }
    Ok(v.with_precision(p))
}

/// Starting precision for certified comparisons.
pub const COMPARE_START_BITS: u32 = 64;
/// Precision ceiling for comparison escalation.
pub const COMPARE_MAX_BITS: u32 = 1 << 20;

/// Exact ordering of two monomials.
pub fn monomial_compare(a: &PiMonomial, b: &PiMonomial) -> Ordering {
    compare_products(&[a], &[b])
}

/// Exact ordering of the products `prod(lhs)` and `prod(rhs)`, without
/// forming either product unless the certified logarithms fail to separate.
pub fn compare_products(lhs: &[&PiMonomial], rhs: &[&PiMonomial]) -> Ordering {
    compare_products_from(lhs, rhs, COMPARE_START_BITS)
}

/// As [`compare_products`], starting escalation at `start_bits`.
pub fn compare_products_from(lhs: &[&PiMonomial], rhs: &[&PiMonomial], start_bits: u32) -> Ordering {
    let sign = |xs: &[&PiMonomial]| xs.iter().map(|m| m.signum()).product::<i32>();
    let (sa, sb) = (sign(lhs), sign(rhs));
    if sa != sb || sa == 0 {
        return sa.cmp(&sb);
    }
    let single = lhs.len() == 1 && rhs.len() == 1;
    if single && lhs[0] == rhs[0] {
        return Ordering::Equal;
    }
    let mut bits = start_bits.max(24);
    let mut checked_exact = single;
    loop {
        let sum = |xs: &[&PiMonomial]| {
            xs.iter()
                .map(|m| ln_interval(&m.abs(), bits).expect("nonzero factor"))
                .reduce(|acc, v| acc.add(&v))
                .expect("non-empty product")
        };
        if let Some(ord) = sum(lhs).certified_cmp(&sum(rhs)) {
            return if sa > 0 { ord } else { ord.reverse() };
        }
        if !checked_exact {
            let prod = |xs: &[&PiMonomial]| {
                xs.iter().fold(PiMonomial::one(), |acc, m| &acc * *m)
            };
            let (pa, pb) = (prod(lhs), prod(rhs));
            if pa == pb {
                return Ordering::Equal;
            }
            if pa.half_pi_exp == pb.half_pi_exp {
                return pa.coeff.cmp(&pb.coeff);
            }
            checked_exact = true;
        }
        if single && lhs[0].half_pi_exp == rhs[0].half_pi_exp {
            return lhs[0].coeff.cmp(&rhs[0].coeff);
        }
        assert!(bits < COMPARE_MAX_BITS, "comparison escalation exhausted");
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gamma_at_integers_and_half_integers() {
        let g3 = gamma_half(6).unwrap();
        assert_eq!(g3, PiMonomial::integer(2));
        let g_half = gamma_half(1).unwrap();
        assert_eq!(g_half, PiMonomial::pi_power(1));
        let g52 = gamma_half(5).unwrap();
        assert_eq!(g52, PiMonomial::new(q(3, 4), 1));
        assert_eq!(gamma_half(2).unwrap(), PiMonomial::one());
        assert!(gamma_half(0).is_err());
        assert!(gamma_half(-3).is_err());
    }

    #[test]
    fn combine_examples() {
        let a = PiMonomial::new(q(2, 1), 2);
        let b = PiMonomial::new(q(3, 4), 1);
        assert_eq!(
            monomial_combine(&a, &b, Combine::Multiply).unwrap(),
            PiMonomial::new(q(3, 2), 3)
        );
        let omega3 = PiMonomial::new(q(2, 1), 4);
        assert_eq!(
            monomial_combine(&omega3, &omega3, Combine::IntegerPower(2)).unwrap(),
            PiMonomial::new(q(4, 1), 8)
        );
        let x = PiMonomial::new(q(-5, 7), 3);
        assert_eq!(
            monomial_combine(&x, &x, Combine::IntegerPower(0)).unwrap(),
            PiMonomial::one()
        );
        assert_eq!(
            monomial_combine(&a, &PiMonomial::zero(), Combine::Divide),
            Err(Error::DivisionByZero)
        );
        assert_eq!(x.powi(-1).unwrap(), PiMonomial::new(q(-7, 5), -3));
    }

    #[test]
    fn zero_is_normalized() {
        let z = PiMonomial::new(BigRational::zero(), 7);
        assert_eq!(z, PiMonomial::zero());
        assert_eq!(&z * &PiMonomial::pi_power(3), PiMonomial::zero());
    }

    #[test]
    fn eval_examples() {
        let pi = eval_interval(&PiMonomial::pi_power(2), 64);
        assert!(pi.contains_f64(std::f64::consts::PI));
        assert!(pi.width().to_f64() < 2f64.powi(-60));
        let nu3 = eval_interval(&PiMonomial::new(q(1, 16), 8), 128);
        assert_eq!(nu3.to_decimal(12), "6.08806818963");
        let zero = eval_interval(&PiMonomial::zero(), 64);
        assert!(zero.lo().is_zero() && zero.hi().is_zero());
        let neg = eval_interval(&PiMonomial::new(q(-1, 1), -1), 64);
        assert!((neg.to_f64() + 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ln_examples() {
        let l1 = ln_interval(&PiMonomial::one(), 64).unwrap();
        assert!(l1.lo().is_zero() && l1.hi().is_zero());
        let lpi = ln_interval(&PiMonomial::pi_power(2), 128).unwrap();
        assert_eq!(lpi.to_decimal(9), "1.14472989");
        let l4 = ln_interval(&PiMonomial::integer(4), 128).unwrap();
        let two_ln2 = interval::ln2(128).mul_int(2);
        assert!(l4.overlaps(&two_ln2));
        assert!(ln_interval(&PiMonomial::zero(), 64).is_err());
        assert!(ln_interval(&PiMonomial::integer(-2), 64).is_err());
    }

    #[test]
    fn compare_examples() {
        let pi = PiMonomial::pi_power(2);
        assert_eq!(monomial_compare(&pi, &PiMonomial::ratio(22, 7)), Ordering::Less);
        let nu3 = PiMonomial::new(q(1, 16), 8);
        assert_eq!(monomial_compare(&nu3, &nu3.clone()), Ordering::Equal);
        assert_eq!(monomial_compare(&nu3, &PiMonomial::integer(6)), Ordering::Greater);
        assert_eq!(
            monomial_compare(&PiMonomial::integer(-3), &PiMonomial::zero()),
            Ordering::Less
        );
        assert_eq!(
            monomial_compare(&PiMonomial::integer(-3), &PiMonomial::integer(-2)),
            Ordering::Less
        );
        // rationals that agree to far more than 64 bits
        let a = PiMonomial::rational(BigRational::new(
            (BigInt::one() << 200u32) + 1,
            BigInt::one() << 200u32,
        ));
        assert_eq!(monomial_compare(&a, &PiMonomial::one()), Ordering::Greater);
    }

    #[test]
    fn product_comparison_detects_exact_ties() {
        let a = PiMonomial::new(q(3, 2), 1);
        let b = PiMonomial::new(q(5, 7), 3);
        let ab = &a * &b;
        assert_eq!(compare_products(&[&a, &b], &[&ab]), Ordering::Equal);
        assert_eq!(compare_products(&[&a, &b], &[&b, &a]), Ordering::Equal);
        let c = PiMonomial::new(q(5, 7), 2);
        assert_eq!(compare_products(&[&a, &b], &[&a, &c]), Ordering::Greater);
    }
}
