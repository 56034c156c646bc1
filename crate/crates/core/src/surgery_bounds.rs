//! Lower bounds for `sigma` obtained by folding the surgery monotonicity
//! formula `sigma(N) >= min(sigma(M), Lambda_{n,k})` along a chain of
//! surgeries starting from the round sphere.
//!
//! All terms of one bound share the dimension `n`, so minima are taken exactly
//! on the `n`-th powers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{monomial_compare, CertifiedInterval, PiMonomial};
use crate::invariants::{
    lambda_hp2_pow, lambda_lower_min, lambda_lower_pow, nth_root, yamabe_sphere_pow,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "dims", rename_all = "snake_case")]
pub enum TopoClass {
    /// Obtained from `S^n` by surgeries of the listed dimensions `k`.
    SurgeryChain(Vec<i64>),
    /// 2-connected and spin-bordant to zero.
    TwoConnectedSpinBoundary,
    TwoConnectedAlphaZero,
    TwoConnectedAlphaNonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TopoInput {
    pub n: i64,
    pub class: TopoClass,
}

/// One candidate in a minimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrailTerm {
    pub id: String,
    pub pow_n: PiMonomial,
    pub value: CertifiedInterval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BoundValue {
    Interval(CertifiedInterval),
    Zero,
    NotCovered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub n: i64,
    pub value: BoundValue,
    /// Identifier of the minimizing trail term.
    pub argmin: Option<String>,
    pub trail: Vec<TrailTerm>,
    pub note: Option<String>,
}

impl BoundResult {
    fn numeric(n: i64, trail: Vec<TrailTerm>, precision_bits: u32) -> Self {
        let best = min_term(&trail).expect("nonempty trail");
        let value = nth_root(&best.pow_n, n, precision_bits);
        Self {
            n,
            value: BoundValue::Interval(value),
            argmin: Some(best.id.clone()),
            trail,
            note: None,
        }
    }

    fn flat(n: i64, value: BoundValue, trail: Vec<TrailTerm>, note: String) -> Self {
        Self {
            n,
            value,
            argmin: None,
            trail,
            note: Some(note),
        }
    }

    pub fn interval(&self) -> Option<&CertifiedInterval> {
        match &self.value {
            BoundValue::Interval(v) => Some(v),
            _ => None,
        }
    }

    /// Exact `n`-th power of the bound. `Zero` maps to zero.
    pub fn pow_n(&self) -> Option<PiMonomial> {
        match &self.value {
            BoundValue::Interval(_) => min_term(&self.trail).map(|t| t.pow_n.clone()),
            BoundValue::Zero => Some(PiMonomial::zero()),
            BoundValue::NotCovered => None,
        }
    }

    /// Certifies `bound > t` on the exact `n`-th powers; `None` if not covered.
    pub fn exceeds(&self, t: &BigRational) -> Option<bool> {
        let p = self.pow_n()?;
        let tn = PiMonomial::rational(t.clone()).powi(self.n).ok()?;
        Some(monomial_compare(&p, &tn) == Ordering::Greater)
    }

    /// The minimum of the trail, recomputed.
    pub fn trail_min(&self) -> Option<&TrailTerm> {
        min_term(&self.trail)
    }
}

fn min_term(trail: &[TrailTerm]) -> Option<&TrailTerm> {
    trail.iter().reduce(|a, b| {
        if monomial_compare(&b.pow_n, &a.pow_n) == Ordering::Less {
            b
        } else {
            a
        }
    })
}

fn term(id: String, pow_n: PiMonomial, n: i64, precision_bits: u32) -> TrailTerm {
    let value = nth_root(&pow_n, n, precision_bits);
    TrailTerm { id, pow_n, value }
}

fn sphere_term(n: i64, precision_bits: u32) -> Result<TrailTerm> {
    Ok(term(format!("mu(S^{n})"), yamabe_sphere_pow(n)?, n, precision_bits))
}

fn lambda_min_term(n: i64, precision_bits: u32) -> Result<TrailTerm> {
    let m = lambda_lower_min(n, precision_bits)?;
    Ok(TrailTerm {
        id: format!("Lambda_{{{n},{}}}", m.argmin[0]),
        pow_n: m.pow_n,
        value: m.value,
    })
}

/// `min(mu(S^n), Lambda_{n,k} for k in dims)`, with `Lambda_{n,0} = mu(S^n)`.
pub fn chain_bound(n: i64, dims: &[i64], precision_bits: u32) -> Result<BoundResult> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("chain_bound needs n >= 3, got {n}")));
    }
    if let Some(&k) = dims.iter().find(|&&k| k < 0 || k > n - 3) {
        return Err(Error::InvalidArgument(format!(
            "surgery dimension {k} outside 0..={} for n = {n}",
            n - 3
        )));
    }
    let mut ks: Vec<i64> = dims.iter().copied().filter(|&k| k != 0).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut trail = vec![sphere_term(n, precision_bits)?];
    let mut uncovered = Vec::new();
    for &k in &ks {
        match lambda_lower_pow(n, k) {
            Ok(p) => trail.push(term(format!("Lambda_{{{n},{k}}}"), p, n, precision_bits)),
            Err(Error::NotCovered { .. }) => uncovered.push(k),
            Err(e) => return Err(e),
        }
    }
    if !uncovered.is_empty() {
        return Ok(BoundResult::flat(
            n,
            BoundValue::NotCovered,
            trail,
            format!("no explicit bound for surgeries of dimension {uncovered:?}"),
        ));
    }
    Ok(BoundResult::numeric(n, trail, precision_bits))
}

/// `KO_n(pt)` is nonzero exactly for `n mod 8` in `{0, 1, 2, 4}`.
pub fn ko_nonzero(n: i64) -> bool {
    matches!(n.rem_euclid(8), 0 | 1 | 2 | 4)
}

pub fn topo_bound(t: &TopoInput, precision_bits: u32) -> Result<BoundResult> {
    let n = t.n;
    if n < 3 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 3, got {n}")));
    }
    let not_covered = |why: &str| {
        Ok(BoundResult::flat(n, BoundValue::NotCovered, Vec::new(), why.to_string()))
    };
    match &t.class {
        TopoClass::SurgeryChain(dims) => chain_bound(n, dims, precision_bits),
        TopoClass::TwoConnectedAlphaNonzero => {
            if !ko_nonzero(n) {
                return Err(Error::InvalidArgument(format!(
                    "alpha takes values in KO_{n} = 0, it cannot be nonzero"
                )));
            }
            Ok(BoundResult::flat(
                n,
                BoundValue::Zero,
                Vec::new(),
                "nonzero alpha invariant forces sigma = 0".into(),
            ))
        }
        TopoClass::TwoConnectedSpinBoundary => {
            if n < 7 {
                return not_covered("spin boundary bound needs n >= 7");
            }
            Ok(BoundResult::numeric(n, vec![lambda_min_term(n, precision_bits)?], precision_bits))
        }
        TopoClass::TwoConnectedAlphaZero => match n {
            7 | 8 => Ok(BoundResult::numeric(
                n,
                vec![lambda_min_term(n, precision_bits)?],
                precision_bits,
            )),
            9 | 10 => not_covered("no bound for alpha = 0 in dimensions 9 and 10"),
            _ if n < 7 => not_covered("alpha = 0 bound needs n >= 7"),
            _ => {
                let hp2 = term(format!("lambda_{n}"), lambda_hp2_pow(n)?, n, precision_bits);
                Ok(BoundResult::numeric(
                    n,
                    vec![lambda_min_term(n, precision_bits)?, hp2],
                    precision_bits,
                ))
            }
        },
    }
}

/// Decimal threshold as an exact rational, e.g. `"135.90"`.
pub fn decimal_threshold(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a decimal number: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = BigInt::from(10).pow(frac.len() as u32);
    let v = BigRational::new(digits, scale);
    Ok(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(r: &BoundResult) -> String {
        r.interval().unwrap().to_decimal(10)
    }

    #[test]
    fn chain_examples() {
        assert_eq!(dec(&chain_bound(7, &[3], 128).unwrap()), "74.50435028");
        let empty = chain_bound(7, &[], 128).unwrap();
        assert_eq!(dec(&empty), "113.5272754");
        assert_eq!(empty.argmin.as_deref(), Some("mu(S^7)"));
        assert_eq!(chain_bound(9, &[1], 128).unwrap().value, BoundValue::NotCovered);
        assert_eq!(chain_bound(9, &[2, 6], 128).unwrap().value, BoundValue::NotCovered);
        assert!(chain_bound(9, &[7], 128).is_err());
        assert!(chain_bound(9, &[-1], 128).is_err());
    }

    #[test]
    fn chain_with_zero_is_the_sphere() {
        let a = chain_bound(8, &[0, 0], 96).unwrap();
        let b = chain_bound(8, &[], 96).unwrap();
        assert_eq!(a.value, b.value);
        let c = chain_bound(3, &[0], 96).unwrap();
        assert_eq!(c.argmin.as_deref(), Some("mu(S^3)"));
    }

    #[test]
    fn topo_examples() {
        let t = |n, class| topo_bound(&TopoInput { n, class }, 128).unwrap();
        let r7 = t(7, TopoClass::TwoConnectedSpinBoundary);
        assert_eq!(dec(&r7), "74.50435028");
        assert_eq!(r7.exceeds(&decimal_threshold("74.5").unwrap()), Some(true));
        assert_eq!(t(8, TopoClass::TwoConnectedAlphaNonzero).value, BoundValue::Zero);
        let r11 = t(11, TopoClass::TwoConnectedAlphaZero);
        assert_eq!(dec(&r11), "135.9033974");
        assert_eq!(r11.argmin.as_deref(), Some("lambda_11"));
        assert_eq!(r11.exceeds(&decimal_threshold("135.90").unwrap()), Some(true));
        assert_eq!(r11.exceeds(&decimal_threshold("135.91").unwrap()), Some(false));
        assert_eq!(t(9, TopoClass::TwoConnectedAlphaZero).value, BoundValue::NotCovered);
        assert_eq!(t(5, TopoClass::TwoConnectedSpinBoundary).value, BoundValue::NotCovered);
        assert_eq!(t(9, TopoClass::TwoConnectedAlphaNonzero).value, BoundValue::Zero);
        assert!(topo_bound(&TopoInput { n: 7, class: TopoClass::TwoConnectedAlphaNonzero }, 64).is_err());
        assert!(topo_bound(&TopoInput { n: 2, class: TopoClass::TwoConnectedAlphaZero }, 64).is_err());
        assert_eq!(t(13, TopoClass::TwoConnectedAlphaZero).argmin.as_deref(), Some("Lambda_{13,2}"));
    }

    #[test]
    fn thresholds_parse() {
        assert_eq!(decimal_threshold("158.72").unwrap(), BigRational::new(15872.into(), 100.into()));
        assert_eq!(decimal_threshold("-2").unwrap(), BigRational::from_integer((-2).into()));
        assert!(decimal_threshold("1e3").is_err());
        assert!(decimal_threshold(".").is_err());
    }

    #[test]
    fn serializes_with_trail() {
        let r = topo_bound(&TopoInput { n: 12, class: TopoClass::TwoConnectedAlphaZero }, 64).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["value"]["kind"], "interval");
        assert_eq!(v["trail"].as_array().unwrap().len(), 2);
        assert_eq!(v["argmin"], "lambda_12");
    }
}
