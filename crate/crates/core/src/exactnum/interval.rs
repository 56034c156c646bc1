//! Outward-rounded intervals over [`Dyadic`] endpoints, with certified
//! enclosures of `pi`, `ln 2`, `ln` and `exp`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::dyadic::{DecimalRounding, Dyadic, Round};

/// A closed interval `[lo, hi]` guaranteed to contain some exact real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
}

/// Decimal rendering of an interval's endpoints for audit trails.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IntervalCertificate {
    pub lo: String,
    pub hi: String,
    pub precision_bits: u32,
}

impl CertifiedInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, precision_bits: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self {
            lo,
            hi,
            precision_bits,
        }
    }

    pub fn point(v: Dyadic, precision_bits: u32) -> Self {
        Self::new(v.round(precision_bits, Round::Down), v.round(precision_bits, Round::Up), precision_bits)
    }

    pub fn zero(precision_bits: u32) -> Self {
        Self::new(Dyadic::zero(), Dyadic::zero(), precision_bits)
    }

    pub fn from_int(v: i64, precision_bits: u32) -> Self {
        Self::point(Dyadic::from_int(v), precision_bits)
    }

    pub fn from_bigint(v: &BigInt, precision_bits: u32) -> Self {
        Self::point(Dyadic::from(v.clone()), precision_bits)
    }

    pub fn from_rational(q: &BigRational, precision_bits: u32) -> Self {
        let num = Self::from_bigint(q.numer(), precision_bits + 8);
        let den = Self::from_bigint(q.denom(), precision_bits + 8);
        num.div(&den).with_precision(precision_bits)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Re-round the endpoints outward to a new bit budget.
    pub fn with_precision(&self, precision_bits: u32) -> Self {
        Self::new(
            self.lo.round(precision_bits, Round::Down),
            self.hi.round(precision_bits, Round::Up),
            precision_bits,
        )
    }

    fn prec_with(&self, other: &Self) -> u32 {
        self.precision_bits.max(other.precision_bits)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.add_exact(&self.lo.neg())
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.lo.to_f64() <= v && v <= self.hi.to_f64()
    }

    /// Exact containment test for a rational.
    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let below = |d: &Dyadic| dyadic_cmp_rational(d, q) != Ordering::Greater;
        let above = |d: &Dyadic| dyadic_cmp_rational(d, q) != Ordering::Less;
        below(&self.lo) && above(&self.hi)
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    /// Certified ordering, or `None` when the intervals overlap.
    pub fn certified_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        Self::new(self.hi.neg(), self.lo.neg(), self.precision_bits)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec_with(other);
        Self::new(
            self.lo.add_round(&other.lo, p, Round::Down),
            self.hi.add_round(&other.hi, p, Round::Up),
            p,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec_with(other);
        if self.lo.signum() >= 0 && other.lo.signum() >= 0 {
            return Self::new(
                self.lo.mul_round(&other.lo, p, Round::Down),
                self.hi.mul_round(&other.hi, p, Round::Up),
                p,
            );
        }
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands
            .iter()
            .map(|(a, b)| a.mul_round(b, p, Round::Down))
            .min()
            .expect("four candidates");
        let hi = cands
            .iter()
            .map(|(a, b)| a.mul_round(b, p, Round::Up))
            .max()
            .expect("four candidates");
        Self::new(lo, hi, p)
    }

    pub fn sqr(&self) -> Self {
        if self.lo.signum() >= 0 {
            return self.mul(self);
        }
        if self.hi.signum() <= 0 {
            return self.neg().mul(&self.neg());
        }
        let p = self.precision_bits;
        let m = self.lo.abs().max(self.hi.abs());
        Self::new(Dyadic::zero(), m.mul_round(&m, p, Round::Up), p)
    }

    /// Quotient; panics when the divisor contains zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(
            other.lo.signum() > 0 || other.hi.signum() < 0,
            "interval division by an interval containing zero"
        );
        let p = self.prec_with(other);
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands
            .iter()
            .map(|(a, b)| a.div_round(b, p, Round::Down))
            .min()
            .expect("four candidates");
        let hi = cands
            .iter()
            .map(|(a, b)| a.div_round(b, p, Round::Up))
            .max()
            .expect("four candidates");
        Self::new(lo, hi, p)
    }

    pub fn div_int(&self, d: i64) -> Self {
        self.div(&Self::from_int(d, self.precision_bits))
    }

    pub fn mul_int(&self, m: i64) -> Self {
        self.mul(&Self::from_int(m, self.precision_bits))
    }

    pub fn scale_pow2(&self, k: i64) -> Self {
        Self::new(self.lo.scale_pow2(k), self.hi.scale_pow2(k), self.precision_bits)
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, e: u64) -> Self {
        let mut result = Self::from_int(1, self.precision_bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn recip(&self) -> Self {
        Self::from_int(1, self.precision_bits).div(self)
    }

    /// Square root of a nonnegative interval.
    pub fn sqrt(&self) -> Self {
        assert!(self.lo.signum() >= 0, "square root of an interval with negative part");
        let p = self.precision_bits;
        Self::new(self.lo.sqrt_round(p, Round::Down), self.hi.sqrt_round(p, Round::Up), p)
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "logarithm of a non-positive interval");
        let p = self.precision_bits;
        let w = p + 32;
        if self.lo == self.hi {
            return ln_point(&self.lo, w).with_precision(p);
        }
        let lo = ln_point(&self.lo, w).lo.round(p, Round::Down);
        let hi = ln_point(&self.hi, w).hi.round(p, Round::Up);
        Self::new(lo, hi, p)
    }

    pub fn exp(&self) -> Self {
        let p = self.precision_bits;
        let w = p + 32;
        if self.lo == self.hi {
            return exp_point(&self.lo, w).with_precision(p);
        }
        let lo = exp_point(&self.lo, w).lo.round(p, Round::Down);
        let hi = exp_point(&self.hi, w).hi.round(p, Round::Up);
        Self::new(lo, hi, p)
    }

    /// `self^(num/den)` for a positive base.
    pub fn pow_ratio(&self, num: i64, den: i64) -> Self {
        assert!(den > 0);
        let p = self.precision_bits;
        let wide = self.with_precision(p + 32);
        wide.ln().mul_int(num).div_int(den).exp().with_precision(p)
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self::new(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.prec_with(other),
        )
    }

    /// Midpoint rounded to `sig` significant decimal digits (half away from zero).
    pub fn to_decimal(&self, sig: usize) -> String {
        self.midpoint().to_decimal(sig, DecimalRounding::Nearest)
    }

    /// Endpoints as decimal strings rounded outward.
    pub fn certificate(&self, sig: usize) -> IntervalCertificate {
        IntervalCertificate {
            lo: self.lo.to_decimal(sig, DecimalRounding::Floor),
            hi: self.hi.to_decimal(sig, DecimalRounding::Ceil),
            precision_bits: self.precision_bits,
        }
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.certificate(20);
        write!(f, "[{}, {}]", c.lo, c.hi)
    }
}

fn dyadic_cmp_rational(d: &Dyadic, q: &BigRational) -> Ordering {
    // d = m 2^e versus a/b with b > 0
    let (a, b) = (q.numer(), q.denom());
    let (lhs, rhs) = if d.exp() >= 0 {
        ((d.mant() << (d.exp() as u64)) * b, a.clone())
    } else {
        (d.mant() * b, a << ((-d.exp()) as u64))
    };
    lhs.cmp(&rhs)
}

/// Cached constants, keyed by working precision (a multiple of 64 bits).
struct ConstantCache {
    pi: RwLock<HashMap<u32, Arc<CertifiedInterval>>>,
    ln2: RwLock<HashMap<u32, Arc<CertifiedInterval>>>,
}

fn cache() -> &'static ConstantCache {
    static CACHE: OnceLock<ConstantCache> = OnceLock::new();
    CACHE.get_or_init(|| ConstantCache {
        pi: RwLock::new(HashMap::new()),
        ln2: RwLock::new(HashMap::new()),
    })
}

fn bucket(prec: u32) -> u32 {
    (prec + 16).div_ceil(64) * 64
}

fn cached(
    map: &RwLock<HashMap<u32, Arc<CertifiedInterval>>>,
    prec: u32,
    compute: fn(u32) -> CertifiedInterval,
) -> CertifiedInterval {
    let w = bucket(prec);
    if let Some(v) = map.read().expect("constant cache poisoned").get(&w) {
        return (**v).with_precision(prec);
    }
    let v = Arc::new(compute(w));
    let mut guard = map.write().expect("constant cache poisoned");
    let v = guard.entry(w).or_insert(v).clone();
    v.with_precision(prec)
}

/// Enclosure of `pi` at `prec` bits, computed once per precision bucket.
pub fn pi(prec: u32) -> CertifiedInterval {
    cached(&cache().pi, prec, compute_pi)
}

/// Enclosure of `ln 2` at `prec` bits, computed once per precision bucket.
pub fn ln2(prec: u32) -> CertifiedInterval {
    cached(&cache().ln2, prec, compute_ln2)
}

/// Fixed-point `2^w * atan(1/x)` (or `atanh` when `hyperbolic`), with an error
/// bound in units of `2^-w`.
fn arctan_recip_fixed(x: u32, w: u32, hyperbolic: bool) -> (BigInt, u64) {
    let scale = BigUint::from(1u32) << w;
    let xx = BigUint::from(x) * BigUint::from(x);
    let mut power = scale / BigUint::from(x);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        let term = BigInt::from(&power / BigUint::from(2 * j + 1));
        if hyperbolic || j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &xx;
        j += 1;
    }
    // each term is off by less than 3 units; the omitted tail is below 2 units
    (sum, 3 * (j + 1) + 2)
}

fn fixed_to_interval(sum: BigInt, err: u64, w: u32) -> CertifiedInterval {
    let e = BigInt::from(err);
    CertifiedInterval::new(
        Dyadic::new(&sum - &e, -(w as i64)),
        Dyadic::new(&sum + &e, -(w as i64)),
        w,
    )
}

fn compute_pi(w: u32) -> CertifiedInterval {
    let g = w + 16;
    let (a, ea) = arctan_recip_fixed(5, g, false);
    let (b, eb) = arctan_recip_fixed(239, g, false);
    let sum = a * 16 - b * 4;
    fixed_to_interval(sum, 16 * ea + 4 * eb, g).with_precision(w)
}

fn compute_ln2(w: u32) -> CertifiedInterval {
    let g = w + 16;
    let (a, ea) = arctan_recip_fixed(3, g, true);
    fixed_to_interval(a * 2, 2 * ea, g).with_precision(w)
}

/// Number of square-root halvings applied before the `atanh` series in `ln`.
const LN_SQRT_STEPS: u32 = 6;
/// Number of halvings applied before the Taylor series in `exp`.
const EXP_HALVINGS: u32 = 8;

/// Enclosure of `ln(d)` for `d > 0` at working precision `w`.
fn ln_point(d: &Dyadic, w: u32) -> CertifiedInterval {
    assert!(d.signum() > 0);
    let b = d.bits() as i64;
    let shift = d.exp() + b;
    // y = mant / 2^b in [1/2, 1)
    let y_exact = Dyadic::new(d.mant().clone(), -b);
    let ln2w = ln2(w);
    let power_of_two = d.mant().magnitude().count_ones() == 1;
    if power_of_two {
        return ln2w.mul_int(shift - 1);
    }
    let g = w + LN_SQRT_STEPS + 16;
    let mut y = CertifiedInterval::point(y_exact, g);
    for _ in 0..LN_SQRT_STEPS {
        y = y.sqrt();
    }
    let one = CertifiedInterval::from_int(1, g);
    let z = y.sub(&one).div(&y.add(&one));
    let ln_y = atanh_series(&z, g).scale_pow2(1).scale_pow2(LN_SQRT_STEPS as i64);
    ln_y.add(&ln2(g).mul_int(shift)).with_precision(w)
}

/// `atanh(z)` for `|z| < 1/2` by its odd power series plus a tail bound.
fn atanh_series(z: &CertifiedInterval, g: u32) -> CertifiedInterval {
    let zmax = z.lo().abs().max(z.hi().abs());
    if zmax.is_zero() {
        return CertifiedInterval::zero(g);
    }
    // |z| < 2^-q
    let q = -zmax.top();
    assert!(q >= 1, "atanh argument out of range");
    let z2 = z.sqr();
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut j: i64 = 1;
    // stop once |z|^(2j+1) < 2^-(g+8)
    while (2 * j + 1) * q < g as i64 + 8 {
        term = term.mul(&z2);
        sum = sum.add(&term.div_int(2 * j + 1));
        j += 1;
    }
    // tail <= |z|^(2j+1) / (1 - z^2) <= 2 * 2^-(q (2j+1))
    let tail = Dyadic::new(BigInt::from(1), 1 - q * (2 * j + 1));
    sum.add(&CertifiedInterval::new(tail.neg(), tail, g))
}

/// Enclosure of `exp(d)` at working precision `w`.
fn exp_point(d: &Dyadic, w: u32) -> CertifiedInterval {
    if d.is_zero() {
        return CertifiedInterval::from_int(1, w);
    }
    let x = d.to_f64();
    assert!(x.is_finite() && x.abs() < 1e15, "exponent argument out of range");
    let k = (x / std::f64::consts::LN_2).round() as i64;
    let g = w + EXP_HALVINGS + 24 + (k.unsigned_abs().max(1).ilog2());
    let r = CertifiedInterval::point(d.clone(), g).sub(&ln2(g).mul_int(k));
    let r = r.scale_pow2(-(EXP_HALVINGS as i64));
    let rmax = r.lo().abs().max(r.hi().abs());
    let mut sum = CertifiedInterval::from_int(1, g);
    if !rmax.is_zero() {
        let q = -rmax.top(); // |r| < 2^-q
        assert!(q >= 1, "exp reduction failed");
        let mut term = CertifiedInterval::from_int(1, g);
        let mut j: i64 = 1;
        loop {
            term = term.mul(&r).div_int(j);
            sum = sum.add(&term);
            j += 1;
            // next term bounded by |r|^j, tail by twice that
            if j * q > g as i64 + 8 {
                break;
            }
        }
        let tail = Dyadic::new(BigInt::from(1), 1 - q * j);
        sum = sum.add(&CertifiedInterval::new(tail.neg(), tail, g));
    }
    for _ in 0..EXP_HALVINGS {
        sum = sum.sqr();
    }
    sum.scale_pow2(k).with_precision(w)
}

/// Significant digits of the endpoints written by `From` and `Serialize`.
pub const CERTIFICATE_DIGITS: usize = 30;

impl From<&CertifiedInterval> for IntervalCertificate {
    fn from(v: &CertifiedInterval) -> Self {
        v.certificate(CERTIFICATE_DIGITS)
    }
}

impl Serialize for CertifiedInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalCertificate::from(self).serialize(s)
    }
}

/// Sign helper used by callers that hold rationals.
pub(crate) fn rational_sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
