//! Exponent arithmetic for power-law singularities along a sphere of
//! codimension 3, and the resulting integrability verdicts for the conformal
//! transplant `u = f^{-1} H` of a Green's function integral.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{eval_interval, CertifiedInterval, PiMonomial};
use crate::invariants::{p_n, sphere_volume};

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Germ `r^a` near a singular set of codimension `codim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GermExponent {
    #[serde(serialize_with = "ser_rational")]
    pub a: BigRational,
    pub codim: i64,
}

impl GermExponent {
    pub fn new(a: BigRational, codim: i64) -> Result<Self> {
        if codim < 1 {
            return Err(Error::InvalidArgument(format!("codimension must be >= 1, got {codim}")));
        }
        Ok(Self { a, codim })
    }

    /// `|g|^q` is integrable near the singular set.
    pub fn integrable(&self, q: &BigRational) -> Result<bool> {
        power_integrable(&self.a, q, self.codim)
    }

    /// Product of two germs along the same singular set.
    pub fn times(&self, other: &GermExponent) -> Result<Self> {
        if self.codim != other.codim {
            return Err(Error::InvalidArgument(format!(
                "singular sets differ: codimension {} vs {}",
                self.codim, other.codim
            )));
        }
        Ok(Self {
            a: &self.a + &other.a,
            codim: self.codim,
        })
    }

    pub fn pow(&self, e: &BigRational) -> Self {
        Self {
            a: &self.a * e,
            codim: self.codim,
        }
    }
}

/// `int_0 r^(a q + d - 1) dr < inf`, i.e. `a q + d > 0`.
pub fn power_integrable(a: &BigRational, q: &BigRational, d: i64) -> Result<bool> {
    if d < 1 || !q.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "need d >= 1 and q > 0, got d = {d}, q = {q}"
        )));
    }
    Ok((a * q + BigRational::from_integer(BigInt::from(d))).is_positive())
}

/// `(4(n-1) omega_{n-1})^{-1}`, the leading coefficient of the Green's
/// function of the conformal Laplacian on the round sphere.
pub fn green_normalization(n: i64, precision_bits: u32) -> Result<CertifiedInterval> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("green_normalization needs n >= 3, got {n}")));
    }
    let w = sphere_volume(n - 1)?;
    let inv = PiMonomial::one().checked_div(&(&PiMonomial::integer(4 * (n - 1)) * &w))?;
    Ok(eval_interval(&inv, precision_bits))
}

/// Asymptotic convention for the conformal factor `f` near the singular set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FConvention {
    /// `f ~ r^{-2/(n-2)}`, as written.
    PaperStated,
    /// `f ~ r^{-(n-2)/2}`, forced by `f^{4/(n-2)} = sin(r)^{-2}` near the set.
    Derived,
}

impl Default for FConvention {
    fn default() -> Self {
        FConvention::Derived
    }
}

impl FConvention {
    pub fn f_exponent(self, n: i64) -> BigRational {
        match self {
            FConvention::PaperStated => q(-2, n - 2),
            FConvention::Derived => q(-(n - 2), 2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FConvention::PaperStated => "paper_stated",
            FConvention::Derived => "derived",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionVerdict {
    pub convention: FConvention,
    pub f: GermExponent,
    pub u: GermExponent,
    /// Exponent of `H^2 f^{p_n - 2}` near the set.
    #[serde(serialize_with = "ser_rational")]
    pub l2_integrand: BigRational,
    pub verdict_l2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub n: i64,
    pub convention: FConvention,
    #[serde(serialize_with = "ser_rational")]
    pub p_n: BigRational,
    /// Green's function germ at its pole.
    pub green: GermExponent,
    pub green_constant: CertifiedInterval,
    /// `H`, the integral of the Green's function over `S^{n-3}`.
    pub h: GermExponent,
    pub f: GermExponent,
    pub u: GermExponent,
    pub verdict_lpn: bool,
    /// The same verdict in the singular metric, with volume weight `f^{p_n}`.
    pub verdict_lpn_singular_metric: bool,
    pub verdict_l2: bool,
    pub by_convention: Vec<ConventionVerdict>,
    /// The selected convention finds `u` square integrable, contradicting the
    /// claim being checked.
    pub discrepancy_flag: bool,
}

fn convention_verdict(n: i64, conv: FConvention, h: &GermExponent, p: &BigRational) -> Result<ConventionVerdict> {
    let f = GermExponent::new(conv.f_exponent(n), h.codim)?;
    let u = f.pow(&q(-1, 1)).times(h)?;
    let weight = f.pow(&(p - q(2, 1)));
    let integrand = h.pow(&q(2, 1)).times(&weight)?;
    let verdict_l2 = integrand.integrable(&q(1, 1))?;
    Ok(ConventionVerdict {
        convention: conv,
        f,
        u,
        l2_integrand: integrand.a,
        verdict_l2,
    })
}

/// Integrability of `u = f^{-1} H` on `H_1^{n-2} x S^2` from the germs near
/// `S^{n-3}`.
pub fn counterexample_report(n: i64, conv: FConvention) -> Result<CounterexampleReport> {
    if n < 5 {
        return Err(Error::InvalidArgument(format!("counterexample_report needs n >= 5, got {n}")));
    }
    let p = p_n(n)?;
    let green = GermExponent::new(q(-(n - 2), 1), n)?;
    // integrating over the n-3 directions along S^{n-3} leaves codimension 3
    let h = GermExponent::new(&green.a + q(n - 3, 1), 3)?;
    let verdict_lpn = h.integrable(&p)?;
    let by_convention = [FConvention::Derived, FConvention::PaperStated]
        .into_iter()
        .map(|c| convention_verdict(n, c, &h, &p))
        .collect::<Result<Vec<_>>>()?;
    let chosen = by_convention
        .iter()
        .find(|v| v.convention == conv)
        .expect("both conventions listed")
        .clone();
    let weighted = chosen.u.pow(&p).times(&chosen.f.pow(&p))?;
    let verdict_lpn_singular_metric = weighted.integrable(&q(1, 1))?;
    Ok(CounterexampleReport {
        n,
        convention: conv,
        p_n: p,
        green_constant: green_normalization(n, 64)?,
        green,
        h,
        f: chosen.f,
        u: chosen.u,
        verdict_lpn,
        verdict_lpn_singular_metric,
        verdict_l2: chosen.verdict_l2,
        discrepancy_flag: chosen.verdict_l2,
        by_convention,
    })
}

/// Exponent of `r` in `H^2 f^{p_n - 2}` plus the codimension; the integral
/// converges iff this is positive.
pub fn l2_margin(n: i64, conv: FConvention) -> Result<BigRational> {
    let r = counterexample_report(n, conv)?;
    Ok(r
        .by_convention
        .iter()
        .find(|v| v.convention == conv)
        .map(|v| &v.l2_integrand + q(3, 1))
        .unwrap_or_else(BigRational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrability_examples() {
        assert!(power_integrable(&q(-1, 1), &q(14, 5), 3).unwrap());
        assert!(!power_integrable(&q(-1, 1), &q(3, 1), 3).unwrap());
        assert!(power_integrable(&q(0, 1), &q(1000, 1), 3).unwrap());
        assert!(power_integrable(&q(-1, 1), &q(0, 1), 3).is_err());
        assert!(power_integrable(&q(-1, 1), &q(1, 1), 0).is_err());
    }

    #[test]
    fn green_constants() {
        let d = |n| green_normalization(n, 80).unwrap().to_decimal(12);
        assert_eq!(d(3), "0.00994718394324");
        assert_eq!(d(4), "0.0042217159851");
        assert_eq!(d(7), "0.0012598255638");
    }

    #[test]
    fn report_examples() {
        let r = counterexample_report(7, FConvention::Derived).unwrap();
        assert!(r.verdict_lpn && !r.verdict_l2 && !r.discrepancy_flag);
        assert_eq!(r.h.a, q(-1, 1));
        assert_eq!(r.u.a, q(3, 2));
        assert_eq!(r.by_convention[0].l2_integrand, q(-4, 1));
        let s = counterexample_report(7, FConvention::PaperStated).unwrap();
        assert!(s.verdict_l2 && s.discrepancy_flag);
        assert_eq!(s.by_convention[1].l2_integrand, q(-58, 25));
        assert!(!counterexample_report(6, FConvention::Derived).unwrap().verdict_lpn);
        assert!(counterexample_report(4, FConvention::Derived).is_err());
    }

    #[test]
    fn margins() {
        assert_eq!(l2_margin(7, FConvention::Derived).unwrap(), q(-1, 1));
        assert_eq!(l2_margin(7, FConvention::PaperStated).unwrap(), q(17, 25));
    }

    #[test]
    fn serializes() {
        let v = serde_json::to_value(counterexample_report(8, FConvention::Derived).unwrap()).unwrap();
        assert_eq!(v["convention"], "derived");
        assert_eq!(v["h"]["a"], "-1");
        assert_eq!(v["f"]["a"], "-3");
        assert_eq!(v["verdict_l2"], false);
    }
}
