//! Closed-form constants: sphere volumes and Yamabe constants, `nu_l`, the
//! explicit lower bounds for `Lambda_{n,k}` and for quaternionic-plane bundles,
//! and the curvature constants of the model spaces `H_c^{k+1} x S^{n-k-1}`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{
    compare_products, gamma_half, ln_interval, pi, CertifiedInterval, PiMonomial,
};

/// Significant digits used for decimal output unless a caller asks otherwise.
pub const DEFAULT_DIGITS: usize = 10;

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(big(num), big(den))
}

/// Conformal Laplacian coefficient `a_n = 4(n-1)/(n-2)`.
pub fn a_n(n: i64) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("a_n needs n >= 3, got {n}")));
    }
    Ok(q(4 * (n - 1), n - 2))
}

/// Critical Sobolev exponent `p_n = 2n/(n-2)`.
pub fn p_n(n: i64) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("p_n needs n >= 3, got {n}")));
    }
    Ok(q(2 * n, n - 2))
}

/// `omega_l = vol(S^l) = 2 pi^((l+1)/2) / Gamma((l+1)/2)`.
pub fn sphere_volume(l: i64) -> Result<PiMonomial> {
    if l < 1 {
        return Err(Error::InvalidArgument(format!(
            "sphere dimension must be >= 1, got {l}"
        )));
    }
    let g = gamma_half(l + 1)?;
    PiMonomial::new(BigRational::from_integer(big(2)), l + 1).checked_div(&g)
}

/// `mu(S^n)^n = (n(n-1))^n omega_n^2`, exactly.
pub fn yamabe_sphere_pow(n: i64) -> Result<PiMonomial> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("yamabe_sphere needs n >= 3, got {n}")));
    }
    let w = sphere_volume(n)?;
    let scal = PiMonomial::integer(n * (n - 1)).powi(n)?;
    Ok(&scal * &w.powi(2)?)
}

/// `mu(S^n) = n(n-1) omega_n^(2/n)` as a certified enclosure.
pub fn yamabe_sphere(n: i64, precision_bits: u32) -> Result<CertifiedInterval> {
    Ok(nth_root(&yamabe_sphere_pow(n)?, n, precision_bits))
}

/// Certified `m^(1/n)` for a positive monomial.
pub fn nth_root(m: &PiMonomial, n: i64, precision_bits: u32) -> CertifiedInterval {
    let p = precision_bits.max(24);
    ln_interval(m, p + 32 + m.coeff().numer().bits().ilog2().max(1))
        .expect("positive monomial")
        .div_int(n)
        .exp()
        .with_precision(p)
}

/// `nu_l = (mu(S^l)/(l a_l))^l = omega_l^2 ((l-2)/4)^l`; `nu_2 = 0`.
pub fn nu(l: i64) -> Result<PiMonomial> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!("nu needs l >= 2, got {l}")));
    }
    let w = sphere_volume(l)?;
    let base = PiMonomial::ratio(l - 2, 4).powi(l)?;
    Ok(&w.powi(2)? * &base)
}

/// Exact `n`-th power of a bound together with its certified value.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaBound {
    pub pow_n: PiMonomial,
    pub value: CertifiedInterval,
}

fn check_lambda_range(n: i64, k: i64) -> Result<()> {
    if n < 5 || k < 0 || k > n - 3 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 6 and 2 <= k <= n-4, got (n, k) = ({n}, {k})"
        )));
    }
    if k == 1 || k == n - 3 {
        return Err(Error::NotCovered { n, k });
    }
    if n < 6 || k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 6 and 2 <= k <= n-4, got (n, k) = ({n}, {k})"
        )));
    }
    Ok(())
}

/// `(n a_n)^n`.
fn n_a_n_pow(n: i64) -> Result<PiMonomial> {
    PiMonomial::rational(a_n(n)? * big(n)).powi(n)
}

/// `Lambda_{n,k}^n = (n a_n)^n nu_{k+1} nu_{n-k-1}` for `2 <= k <= n-4`.
///
/// `k` in `{1, n-3}` gives [`Error::NotCovered`].
pub fn lambda_lower_pow(n: i64, k: i64) -> Result<PiMonomial> {
    check_lambda_range(n, k)?;
    Ok(&(&n_a_n_pow(n)? * &nu(k + 1)?) * &nu(n - k - 1)?)
}

/// Lower bound for `Lambda_{n,k}`, `2 <= k <= n-4`.
pub fn lambda_lower(n: i64, k: i64, precision_bits: u32) -> Result<LambdaBound> {
    let pow_n = lambda_lower_pow(n, k)?;
    let value = nth_root(&pow_n, n, precision_bits);
    Ok(LambdaBound { pow_n, value })
}

/// The same bound assembled from sphere Yamabe constants:
/// `n a_n mu(S^{k+1})^{(k+1)/n} mu(S^{n-k-1})^{(n-k-1)/n}
///  / (((k+1) a_{k+1})^{(k+1)/n} ((n-k-1) a_{n-k-1})^{(n-k-1)/n})`.
pub fn lambda_lower_quotient(n: i64, k: i64, precision_bits: u32) -> Result<CertifiedInterval> {
    check_lambda_range(n, k)?;
    let p = precision_bits.max(24);
    let w = p + 32;
    let factor = |l: i64| -> Result<CertifiedInterval> {
        let mu = yamabe_sphere(l, w)?;
        let la = CertifiedInterval::from_rational(&(a_n(l)? * big(l)), w);
        Ok(mu.div(&la).pow_ratio(l, n))
    };
    let lead = CertifiedInterval::from_rational(&(a_n(n)? * big(n)), w);
    Ok(lead
        .mul(&factor(k + 1)?)
        .mul(&factor(n - k - 1)?)
        .with_precision(p))
}

/// Minimum of the bounds over `2 <= k <= n-4` with every minimizing `k`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaMin {
    pub value: CertifiedInterval,
    pub pow_n: PiMonomial,
    pub argmin: Vec<i64>,
}

/// `Lambda_{n,>=2} = min_k Lambda_{n,k}`, minimized exactly on the `n`-th powers.
pub fn lambda_lower_min(n: i64, precision_bits: u32) -> Result<LambdaMin> {
    if n < 6 {
        return Err(Error::InvalidArgument(format!(
            "the range 2 <= k <= n-4 is empty for n = {n}"
        )));
    }
    // the n-th powers share the factor (n a_n)^n, so compare nu products only
    let half = (n - 2) / 2;
    let nus: Vec<PiMonomial> = (0..=n).map(|l| nu(l.max(2))).collect::<Result<_>>()?;
    let mut best: Vec<i64> = vec![2];
    for k in 3..=half {
        let b = best[0];
        let ord = compare_products(
            &[&nus[(k + 1) as usize], &nus[(n - k - 1) as usize]],
            &[&nus[(b + 1) as usize], &nus[(n - b - 1) as usize]],
        );
        match ord {
            Ordering::Less => best = vec![k],
            Ordering::Equal => best.push(k),
            Ordering::Greater => {}
        }
    }
    let mut argmin: Vec<i64> = best.iter().flat_map(|&k| [k, n - k - 2]).collect();
    argmin.sort_unstable();
    argmin.dedup();
    let bound = lambda_lower(n, best[0], precision_bits)?;
    Ok(LambdaMin {
        value: bound.value,
        pow_n: bound.pow_n,
        argmin,
    })
}

/// `3^6 2^18 / (7^8 5^2) pi^8 = (mu(HP^2) / (8 a_8))^8`.
pub fn hp2_constant() -> PiMonomial {
    let num = big(3).pow(6) * big(2).pow(18);
    let den = big(7).pow(8) * big(5).pow(2);
    PiMonomial::new(BigRational::new(num, den), 16)
}

/// `(mu(HP^2)/(8 a_8))^8` computed from `mu(HP^2) = 128 pi / 120^(1/4)`, whose
/// eighth power `128^8 pi^8 / 120^2` is exact.
pub fn hp2_constant_from_mu() -> PiMonomial {
    let mu8 = PiMonomial::new(
        BigRational::new(big(128).pow(8), big(120).pow(2)),
        16,
    );
    let scale = PiMonomial::rational(a_n(8).expect("n = 8") * big(8))
        .powi(8)
        .expect("nonzero");
    mu8.checked_div(&scale).expect("nonzero")
}

/// `mu(HP^2) = 128 pi / 120^(1/4)`.
pub fn mu_hp2(precision_bits: u32) -> CertifiedInterval {
    let p = precision_bits.max(24);
    let w = p + 16;
    pi(w)
        .mul_int(128)
        .div(&CertifiedInterval::from_int(120, w).pow_ratio(1, 4))
        .with_precision(p)
}

/// `lambda_n^n = (n a_n)^n (3^6 2^18 / (7^8 5^2)) pi^8 nu_{n-8}`, `n >= 11`.
pub fn lambda_hp2_pow(n: i64) -> Result<PiMonomial> {
    if n < 11 {
        return Err(Error::InvalidArgument(format!("lambda_hp2 needs n >= 11, got {n}")));
    }
    Ok(&(&n_a_n_pow(n)? * &hp2_constant()) * &nu(n - 8)?)
}

/// Lower bound for `sigma` of total spaces of `HP^2`-bundles, `n >= 11`.
pub fn lambda_hp2(n: i64, precision_bits: u32) -> Result<LambdaBound> {
    let pow_n = lambda_hp2_pow(n)?;
    let value = nth_root(&pow_n, n, precision_bits);
    Ok(LambdaBound { pow_n, value })
}

/// The model space `M_c^{n,k} = H_c^{k+1} x S^{n-k-1}`, stored with `|c|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelSpace {
    n: i64,
    k: i64,
    c: f64,
}

impl ModelSpace {
    pub fn new(n: i64, k: i64, c: f64) -> Result<Self> {
        if n < 3 || k < 0 || k > n - 3 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 3 and 0 <= k <= n-3, got (n, k) = ({n}, {k})"
            )));
        }
        if !(c.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("need |c| <= 1, got {c}")));
        }
        Ok(Self { n, k, c: c.abs() })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Scalar curvature `-c^2 k(k+1) + (n-k-1)(n-k-2)`.
    pub fn scal(&self) -> f64 {
        let (n, k) = (self.n as f64, self.k as f64);
        -self.c * self.c * k * (k + 1.0) + (n - k - 1.0) * (n - k - 2.0)
    }

    pub fn a_n(&self) -> f64 {
        4.0 * (self.n as f64 - 1.0) / (self.n as f64 - 2.0)
    }

    pub fn p_n(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }

    /// Whether `2k|c| < n(n-k-2)`.
    pub fn assumption_ok(&self) -> bool {
        2.0 * self.k as f64 * self.c < (self.n * (self.n - self.k - 2)) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelConstants {
    pub scal: f64,
    /// `k^2 c^2 / 4 + Scal / a_n`.
    pub alpha: f64,
    /// `-(n-k-2) k c^2 / (4(n-1)) + (n-2)(n-k-1)(n-k-2) / (4(n-1))`.
    pub alpha_expanded: f64,
    pub assumption_ok: bool,
    /// `(n-k-2)^2 (n-1) / (8(n-2))`.
    pub d2_threshold: f64,
    /// `(n-k-2)/2`.
    pub tau_threshold: f64,
}

pub fn model_constants(m: &ModelSpace) -> ModelConstants {
    let (n, k, c) = (m.n as f64, m.k as f64, m.c);
    let scal = m.scal();
    ModelConstants {
        scal,
        alpha: k * k * c * c / 4.0 + scal / m.a_n(),
        alpha_expanded: -(n - k - 2.0) * k * c * c / (4.0 * (n - 1.0))
            + (n - 2.0) * (n - k - 1.0) * (n - k - 2.0) / (4.0 * (n - 1.0)),
        assumption_ok: m.assumption_ok(),
        d2_threshold: (n - k - 2.0).powi(2) * (n - 1.0) / (8.0 * (n - 2.0)),
        tau_threshold: (n - k - 2.0) / 2.0,
    }
}

/// Both forms of `alpha_c` in exact rational arithmetic.
pub fn alpha_exact(n: i64, k: i64, c: &BigRational) -> Result<(BigRational, BigRational)> {
    ModelSpace::new(n, k, 0.0)?;
    if c.abs() > BigRational::one() {
        return Err(Error::InvalidArgument(format!("need |c| <= 1, got {c}")));
    }
    let c2 = c * c;
    let scal = -&c2 * big(k * (k + 1)) + BigRational::from_integer(big((n - k - 1) * (n - k - 2)));
    let via_scal = &c2 * q(k * k, 4) + scal / a_n(n)?;
    let expanded = -&c2 * q((n - k - 2) * k, 4 * (n - 1))
        + q((n - 2) * (n - k - 1) * (n - k - 2), 4 * (n - 1));
    Ok((via_scal, expanded))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(v: &CertifiedInterval) -> String {
        v.to_decimal(DEFAULT_DIGITS)
    }

    #[test]
    fn sphere_volumes() {
        assert_eq!(sphere_volume(1).unwrap(), PiMonomial::new(q(2, 1), 2));
        assert_eq!(sphere_volume(2).unwrap(), PiMonomial::new(q(4, 1), 2));
        assert_eq!(sphere_volume(3).unwrap(), PiMonomial::new(q(2, 1), 4));
        assert_eq!(sphere_volume(4).unwrap(), PiMonomial::new(q(8, 3), 4));
        assert_eq!(sphere_volume(6).unwrap(), PiMonomial::new(q(16, 15), 6));
        assert_eq!(sphere_volume(7).unwrap(), PiMonomial::new(q(1, 3), 8));
        assert!(sphere_volume(0).is_err());
    }

    #[test]
    fn nu_values() {
        assert!(nu(2).unwrap().is_zero());
        assert_eq!(nu(3).unwrap(), PiMonomial::new(q(1, 16), 8));
        assert_eq!(nu(4).unwrap(), PiMonomial::new(q(4, 9), 8));
        assert!(nu(1).is_err());
    }

    #[test]
    fn nu_matches_its_sphere_definition() {
        for l in 3..12 {
            let via_mu = yamabe_sphere(l, 128)
                .unwrap()
                .div(&CertifiedInterval::from_rational(&(a_n(l).unwrap() * big(l)), 128))
                .powi(l as u64);
            assert!(via_mu.overlaps(&nu(l).unwrap().eval(128)), "l = {l}");
        }
    }

    #[test]
    fn sphere_yamabe_constants() {
        assert_eq!(digits(&yamabe_sphere(7, 128).unwrap()), "113.5272754");
        assert_eq!(digits(&yamabe_sphere(12, 128).unwrap()), "199.2758712");
        // 6 (2 pi^2)^(2/3)
        assert_eq!(yamabe_sphere(3, 128).unwrap().to_decimal(8), "43.823233");
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(digits(&lambda_lower(7, 2, 128).unwrap().value), "74.50435028");
        assert_eq!(digits(&lambda_lower(8, 2, 128).unwrap().value), "92.2427837");
        assert_eq!(digits(&lambda_lower(8, 3, 128).unwrap().value), "95.76372065");
        assert_eq!(lambda_lower(9, 1, 64).unwrap_err(), Error::NotCovered { n: 9, k: 1 });
        assert_eq!(lambda_lower(9, 6, 64).unwrap_err(), Error::NotCovered { n: 9, k: 6 });
        assert!(matches!(lambda_lower(9, 0, 64), Err(Error::InvalidArgument(_))));
        assert!(matches!(lambda_lower(9, 7, 64), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn quotient_form_agrees() {
        for n in 6..30 {
            for k in 2..=n - 4 {
                let a = lambda_lower(n, k, 96).unwrap().value;
                let b = lambda_lower_quotient(n, k, 96).unwrap();
                assert!(a.overlaps(&b), "(n, k) = ({n}, {k})");
            }
        }
    }

    #[test]
    fn minimum_and_argmin() {
        let m7 = lambda_lower_min(7, 128).unwrap();
        assert_eq!(m7.argmin, vec![2, 3]);
        assert_eq!(m7.value.to_decimal(7), "74.50435");
        let m8 = lambda_lower_min(8, 128).unwrap();
        assert_eq!(m8.argmin, vec![2, 4]);
        let m10 = lambda_lower_min(10, 128).unwrap();
        assert_eq!(m10.argmin, vec![2, 6]);
        assert_eq!(digits(&m10.value), "126.4134025");
        let m6 = lambda_lower_min(6, 128).unwrap();
        assert_eq!(m6.argmin, vec![2]);
        assert!(lambda_lower_min(5, 64).is_err());
    }

    #[test]
    fn hp2_constants() {
        assert_eq!(hp2_constant(), hp2_constant_from_mu());
        assert_eq!(hp2_constant().eval(128).to_decimal(13), "12581.78046416");
        assert_eq!(mu_hp2(128).to_decimal(10), "121.4967136");
        let from_mu = mu_hp2(128)
            .div(&CertifiedInterval::from_rational(&(a_n(8).unwrap() * big(8)), 128))
            .powi(8);
        assert!(from_mu.overlaps(&hp2_constant().eval(128)));
    }

    #[test]
    fn hp2_bounds() {
        assert_eq!(digits(&lambda_hp2(11, 128).unwrap().value), "135.9033974");
        assert_eq!(digits(&lambda_hp2(12, 128).unwrap().value), "158.7256736");
        assert_eq!(digits(&lambda_hp2(18, 128).unwrap().value), "266.0365303");
        assert!(lambda_hp2(10, 64).is_err());
    }

    #[test]
    fn model_constant_examples() {
        let m = model_constants(&ModelSpace::new(7, 2, 1.0).unwrap());
        assert_eq!(m.scal, 6.0);
        assert!((m.alpha - 2.25).abs() < 1e-15);
        assert!((m.alpha_expanded - 2.25).abs() < 1e-15);
        assert!(m.assumption_ok);
        assert!((m.d2_threshold - 1.35).abs() < 1e-15);
        assert_eq!(m.tau_threshold, 1.5);

        assert!(!model_constants(&ModelSpace::new(6, 3, 1.0).unwrap()).assumption_ok);

        let flat = model_constants(&ModelSpace::new(7, 2, 0.0).unwrap());
        assert_eq!(flat.scal, 12.0);
        assert!((flat.alpha - 2.5).abs() < 1e-15);
    }

    #[test]
    fn model_space_canonical_form() {
        assert_eq!(
            ModelSpace::new(7, 2, -0.5).unwrap(),
            ModelSpace::new(7, 2, 0.5).unwrap()
        );
        assert!(ModelSpace::new(7, 5, 0.0).is_err());
        assert!(ModelSpace::new(2, 0, 0.0).is_err());
        assert!(ModelSpace::new(7, 2, 1.5).is_err());
        assert!(ModelSpace::new(7, 2, f64::NAN).is_err());
    }

    #[test]
    fn alpha_forms_agree_exactly() {
        let (a, b) = alpha_exact(7, 2, &q(1, 3)).unwrap();
        assert_eq!(a, b);
        let (a, _) = alpha_exact(7, 2, &q(-1, 1)).unwrap();
        assert_eq!(a, q(9, 4));
    }
}
