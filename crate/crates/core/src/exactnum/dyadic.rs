//! Binary floating values `mant * 2^exp` with arbitrary-size mantissas and
//! directed rounding to a bit budget.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for an inexact operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// Exact value `mant * 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let mag = self.cmp_magnitude(other);
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Self { mant, exp }
    }

    pub fn zero() -> Self {
        Self::new(BigInt::zero(), 0)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `t` such that `2^(t-1) <= |self| < 2^t`. Meaningless for zero.
    pub fn top(&self) -> i64 {
        self.bits() as i64 + self.exp
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            return ta.cmp(&tb);
        }
        let e = self.exp.min(other.exp);
        let a = self.mant.magnitude() << ((self.exp - e) as u64);
        let b = other.mant.magnitude() << ((other.exp - e) as u64);
        a.cmp(&b)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.mant, self.exp)
    }

    pub fn abs(&self) -> Self {
        Self::new(self.mant.abs(), self.exp)
    }

    /// Multiplication by `2^k`, exact.
    pub fn scale_pow2(&self, k: i64) -> Self {
        Self::new(self.mant.clone(), self.exp + k)
    }

    /// Exact sum. Callers must keep exponent gaps moderate; see [`Dyadic::add_round`].
    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        Self::new(a + b, e)
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        Self::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let mag = self.mant.magnitude();
        let inexact = mag.trailing_zeros().map_or(false, |tz| tz < shift);
        let mut q: BigUint = mag >> shift;
        let negative = self.mant.is_negative();
        let away = inexact && (negative == (dir == Round::Down));
        if away {
            q += 1u32;
        }
        let mant = if negative {
            -BigInt::from(q)
        } else {
            BigInt::from(q)
        };
        Self::new(mant, self.exp + shift as i64)
    }

    /// Sum rounded in direction `dir`. A summand lying entirely below the
    /// rounding position is replaced by a same-signed bound that is safe for `dir`.
    pub fn add_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        let floor = big.top() - prec as i64 - 4;
        if small.top() < floor && big.exp > small.exp {
            let small_pos = small.signum() > 0;
            let keep = match dir {
                Round::Down => !small_pos,
                Round::Up => small_pos,
            };
            if !keep {
                return big.round(prec, dir);
            }
            let bound = Dyadic::new(BigInt::from(small.signum()), floor);
            return big.add_exact(&bound).round(prec, dir);
        }
        self.add_exact(other).round(prec, dir)
    }

    pub fn sub_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.add_round(&other.neg(), prec, dir)
    }

    pub fn mul_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.mul_exact(other).round(prec, dir)
    }

    /// Quotient rounded in direction `dir`. Panics on a zero divisor.
    pub fn div_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let want = prec as i64 + 2;
        let s = (want + other.bits() as i64 - self.bits() as i64).max(0) as u64;
        let num = self.mant.magnitude() << s;
        let (q, r) = num.div_rem(other.mant.magnitude());
        let negative = self.mant.is_negative() != other.mant.is_negative();
        let inexact = !r.is_zero();
        let away = inexact && (negative == (dir == Round::Down));
        let q = if away { q + 1u32 } else { q };
        let mant = if negative {
            -BigInt::from(q)
        } else {
            BigInt::from(q)
        };
        Self::new(mant, self.exp - other.exp - s as i64).round(prec, dir)
    }

    /// Square root of a nonnegative value, rounded in direction `dir`.
    pub fn sqrt_round(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.mant.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let want = 2 * prec as i64 + 4;
        let mut s = (want - self.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = self.mant.magnitude() << (s as u64);
        let root = m.sqrt();
        let exact = &root * &root == m;
        let root = if !exact && dir == Round::Up {
            root + 1u32
        } else {
            root
        };
        Self::new(BigInt::from(root), (self.exp - s) / 2).round(prec, dir)
    }

    /// Reciprocal rounded in direction `dir`.
    pub fn recip_round(&self, prec: u32, dir: Round) -> Self {
        Self::from_int(1).div_round(self, prec, dir)
    }

    /// Nearest `f64` (saturating to infinities, flushing tiny values to zero).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let shift = bits.saturating_sub(64);
        let top: BigUint = self.mant.magnitude() >> shift;
        let m = top.to_u64().unwrap_or(u64::MAX) as f64;
        let e = self.exp + shift as i64;
        let e = e.clamp(-10_000, 10_000) as i32;
        let v = m * 2f64.powi(e.clamp(-1074, 1023));
        let v = if e > 1023 {
            v * 2f64.powi(e - 1023)
        } else if e < -1074 {
            v * 2f64.powi(e + 1074)
        } else {
            v
        };
        if self.mant.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Approximate base-2 logarithm of the magnitude.
    pub fn log2_approx(&self) -> f64 {
        let bits = self.bits();
        let shift = bits.saturating_sub(60);
        let top: BigUint = self.mant.magnitude() >> shift;
        let m = top.to_u64().unwrap_or(u64::MAX) as f64;
        m.log2() + (self.exp + shift as i64) as f64
    }

    /// Exact midpoint of two values.
    pub fn midpoint(a: &Self, b: &Self) -> Self {
        a.add_exact(b).scale_pow2(-1)
    }

    /// Decimal rendering with at most `sig` significant digits; trailing zeros are dropped.
    pub fn to_decimal(&self, sig: usize, mode: DecimalRounding) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.mant.is_negative();
        let mag_mode = match (mode, negative) {
            (DecimalRounding::Nearest, _) => DecimalRounding::Nearest,
            (DecimalRounding::Floor, false) | (DecimalRounding::Ceil, true) => {
                DecimalRounding::Floor
            }
            _ => DecimalRounding::Ceil,
        };
        let mut d = (self.log2_approx() * std::f64::consts::LOG10_2).floor() as i64;
        let lower = num_traits::pow(BigUint::from(10u32), sig - 1);
        let upper = &lower * 10u32;
        let digits = loop {
            let q = self.scaled_decimal(sig as i64 - 1 - d, mag_mode);
            if q >= upper {
                d += 1;
            } else if q < lower {
                d -= 1;
            } else {
                break q;
            }
        };
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        let digits = digits.to_string();
        let trimmed = digits.trim_end_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
        out.push_str(&layout_decimal(trimmed, d));
        out
    }

    /// `|self| * 10^s` rounded to an integer.
    fn scaled_decimal(&self, s: i64, mode: DecimalRounding) -> BigUint {
        let mut num = self.mant.magnitude().clone();
        let mut den = BigUint::one();
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let ten = BigUint::from(10u32);
        if s >= 0 {
            num *= num_traits::pow(ten, s as usize);
        } else {
            den *= num_traits::pow(ten, (-s) as usize);
        }
        let (q, r) = num.div_rem(&den);
        match mode {
            DecimalRounding::Floor => q,
            DecimalRounding::Ceil => {
                if r.is_zero() {
                    q
                } else {
                    q + 1u32
                }
            }
            DecimalRounding::Nearest => {
                if (r << 1u32) >= den {
                    q + 1u32
                } else {
                    q
                }
            }
        }
    }
}

/// How [`Dyadic::to_decimal`] treats the discarded digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecimalRounding {
    /// Round half away from zero.
    Nearest,
    Floor,
    Ceil,
}

/// Place a decimal point into `digits` (no sign) whose leading digit has weight `10^d`.
fn layout_decimal(digits: &str, d: i64) -> String {
    let n = digits.len() as i64;
    if (0..21).contains(&d) {
        if d + 1 >= n {
            let mut s = digits.to_string();
            s.extend(std::iter::repeat('0').take((d + 1 - n) as usize));
            s
        } else {
            let (int, frac) = digits.split_at((d + 1) as usize);
            format!("{int}.{frac}")
        }
    } else if (-7..0).contains(&d) {
        let zeros = "0".repeat((-d - 1) as usize);
        format!("0.{zeros}{digits}")
    } else {
        let (first, rest) = digits.split_at(1);
        if rest.is_empty() {
            format!("{first}e{d}")
        } else {
            format!("{first}.{rest}e{d}")
        }
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Self::new(v, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn rounding_is_directed() {
        // 0b1011 = 11, rounded to 2 bits
        let x = d(11, 0);
        assert_eq!(x.round(2, Round::Down), d(8, 0));
        assert_eq!(x.round(2, Round::Up), d(12, 0));
        let y = d(-11, 0);
        assert_eq!(y.round(2, Round::Down), d(-12, 0));
        assert_eq!(y.round(2, Round::Up), d(-8, 0));
    }

    #[test]
    fn division_brackets_one_third() {
        let one = d(1, 0);
        let three = d(3, 0);
        let lo = one.div_round(&three, 53, Round::Down);
        let hi = one.div_round(&three, 53, Round::Up);
        assert!(lo < hi);
        assert!(lo.mul_exact(&three) < one);
        assert!(hi.mul_exact(&three) > one);
    }

    #[test]
    fn sqrt_brackets_two() {
        let two = d(2, 0);
        let lo = two.sqrt_round(80, Round::Down);
        let hi = two.sqrt_round(80, Round::Up);
        assert!(lo.mul_exact(&lo) < two);
        assert!(hi.mul_exact(&hi) > two);
        assert!((lo.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn far_apart_addition_stays_safe() {
        let big = d(1, 1000);
        let tiny = d(1, -1000);
        let up = big.add_round(&tiny, 64, Round::Up);
        let down = big.add_round(&tiny.neg(), 64, Round::Down);
        assert!(up > big);
        assert!(down < big);
        assert_eq!(big.add_round(&tiny, 64, Round::Down), big);
    }

    #[test]
    fn decimal_layouts() {
        assert_eq!(d(3, 0).to_decimal(4, DecimalRounding::Nearest), "3");
        assert_eq!(d(1, -1).to_decimal(3, DecimalRounding::Nearest), "0.5");
        assert_eq!(d(5, -4).to_decimal(2, DecimalRounding::Nearest), "0.31");
        assert_eq!(d(5, -4).to_decimal(2, DecimalRounding::Floor), "0.31");
        assert_eq!(d(5, -4).to_decimal(2, DecimalRounding::Ceil), "0.32");
        assert_eq!(d(-5, -4).to_decimal(2, DecimalRounding::Floor), "-0.32");
        assert_eq!(d(1, 100).to_decimal(3, DecimalRounding::Nearest), "1.27e30");
        assert_eq!(d(999, 0).to_decimal(2, DecimalRounding::Nearest), "1000");
    }

    #[test]
    fn to_f64_handles_wide_mantissas() {
        let x = Dyadic::new(BigInt::from(3u64) << 200u32, -200);
        assert_eq!(x.to_f64(), 3.0);
        assert_eq!(d(-1, -3).to_f64(), -0.125);
    }
}
