//! Range scans over the dimension `n`: location of the minimizing `k`, the
//! comparison of the `HP^2`-bundle bound against `Lambda_{n,>=2}`, and the
//! ratio certificate `lambda_n^n >= 1.43 Lambda_{n,2}^n`.
//!
//! Every comparison is made on `n`-th powers. The common factor `(n a_n)^n`
//! cancels, leaving sums of `ln nu_l` that are compared as certified
//! intervals. When two enclosures overlap, the comparison falls back to the
//! exact monomials.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{
    compare_products_from, gamma_half, ln2, ln_interval, monomial_compare, pi,
    CertifiedInterval, PiMonomial,
};
use crate::invariants::{a_n, hp2_constant, nu};

/// Up to this `l`, `ln nu_l` is taken directly from the exact monomial.
pub const EXACT_LOG_LIMIT: i64 = 500;

/// Default working precision for scans.
pub const SCAN_PRECISION_BITS: u32 = 128;

/// Certified `ln nu_l` for `3 <= l <= l_max`.
#[derive(Clone, Debug)]
pub struct LogNuTable {
    precision_bits: u32,
    ln_nu: Vec<CertifiedInterval>,
}

impl LogNuTable {
    pub fn new(l_max: i64, precision_bits: u32) -> Self {
        let p = precision_bits.max(24);
        let w = p + 32;
        let l_max = l_max.max(3);
        let mut ln_nu = vec![CertifiedInterval::zero(p); 3];
        let exact_top = l_max.min(EXACT_LOG_LIMIT);
        for l in 3..=exact_top {
            let v = nu(l).expect("l >= 3");
            ln_nu.push(ln_interval(&v, w).expect("nu_l > 0").with_precision(p));
        }
        if l_max > exact_top {
            let ln_2 = ln2(w);
            let ln_pi = pi(w).ln();
            // (2x, ln Gamma(x)) for each parity of 2x, advanced by ln Gamma(x+1) = ln Gamma(x) + ln x
            let start = |two_x: i64| {
                let g = gamma_half(two_x).expect("positive argument");
                (two_x, ln_interval(&g, w).expect("positive"))
            };
            let mut lgamma = [start(exact_top + 1), start(exact_top + 2)];
            for l in exact_top + 1..=l_max {
                let (two_x, acc) = &mut lgamma[((l - exact_top) % 2) as usize];
                while *two_x < l + 1 {
                    let ln_x = CertifiedInterval::from_int(*two_x, w).ln().sub(&ln_2);
                    *acc = acc.add(&ln_x);
                    *two_x += 2;
                }
                let ln_omega = ln_2.add(&ln_pi.mul_int(l + 1).scale_pow2(-1)).sub(acc);
                let ln_base = CertifiedInterval::from_int(l - 2, w)
                    .ln()
                    .sub(&ln_2.mul_int(2))
                    .mul_int(l);
                ln_nu.push(ln_omega.scale_pow2(1).add(&ln_base).with_precision(p));
            }
        }
        Self {
            precision_bits: p,
            ln_nu,
        }
    }
}

impl LogNuTable {
    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn l_max(&self) -> i64 {
        self.ln_nu.len() as i64 - 1
    }

    /// Certified `ln nu_l`, `3 <= l <= l_max`.
    pub fn ln_nu(&self, l: i64) -> &CertifiedInterval {
        assert!((3..=self.l_max()).contains(&l), "l = {l} outside the table");
        &self.ln_nu[l as usize]
    }

    /// `ln(nu_{k+1} nu_{n-k-1})`, i.e. `ln Lambda_{n,k}^n - n ln(n a_n)`.
    pub fn ln_pair(&self, n: i64, k: i64) -> CertifiedInterval {
        self.ln_nu(k + 1).add(self.ln_nu(n - k - 1))
    }

    /// Exact ordering of `Lambda_{n,j}` against `Lambda_{n,k}`.
    pub fn compare_pairs(&self, n: i64, j: i64, k: i64) -> Ordering {
        if j == k || j == n - k - 2 {
            return Ordering::Equal;
        }
        self.ln_pair(n, j)
            .certified_cmp(&self.ln_pair(n, k))
            .unwrap_or_else(|| {
                let m = |l: i64| nu(l).expect("l >= 3");
                let (a, b, c, d) = (m(j + 1), m(n - j - 1), m(k + 1), m(n - k - 1));
                compare_products_from(&[&a, &b], &[&c, &d], self.precision_bits)
            })
    }
}

fn ln_n_a_n(n: i64, w: u32) -> CertifiedInterval {
    let v = a_n(n).expect("n >= 3") * BigRational::from_integer(n.into());
    CertifiedInterval::from_rational(&v, w).ln()
}

/// Recover a bound from the log of its `n`-th power with `(n a_n)^n` removed.
fn root_from_log(n: i64, ln_rest: &CertifiedInterval, precision_bits: u32) -> CertifiedInterval {
    let w = precision_bits + 16;
    ln_n_a_n(n, w)
        .add(&ln_rest.with_precision(w).div_int(n))
        .exp()
        .with_precision(precision_bits)
}

/// How one quantity compares with another at a given `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl From<Ordering> for Relation {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Relation::Less,
            Ordering::Equal => Relation::Equal,
            Ordering::Greater => Relation::Greater,
        }
    }
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::Equal => "=",
            Relation::Greater => ">",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    MinLocation,
    CompareSeries,
    Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub n: i64,
    pub detail: String,
}

/// One row of a scan.
///
/// `relation` compares the first entry of `values` with the second: for a
/// minimum-location scan the runner-up `k` against `k = 2`, for the series
/// comparison `lambda_n` against `Lambda_{n,>=2}`, and for the ratio scan the
/// ratio against `1.43`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub n: i64,
    pub relation: Relation,
    pub argmin: Vec<i64>,
    pub values: Vec<(String, CertifiedInterval)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    pub range: (i64, i64),
    pub violations: Vec<Violation>,
    pub per_n: Vec<ScanEntry>,
    #[serde(rename = "wall_time_secs", serialize_with = "secs")]
    pub wall_time: Duration,
}

fn secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl ScanReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Equality of everything except the wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.range == other.range
            && self.violations == other.violations
            && self.per_n == other.per_n
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, F: Fn(i64) -> T + Sync + Send>(lo: i64, hi: i64, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (lo..=hi).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F: Fn(i64) -> T>(lo: i64, hi: i64, f: F) -> Vec<T> {
    (lo..=hi).map(f).collect()
}

/// Minimizers of `Lambda_{n,k}` over `2 <= k <= n-4`, mirror images included,
/// together with the smallest `k` of the runner-up class (if any).
pub fn min_location(table: &LogNuTable, n: i64) -> (Vec<i64>, Option<i64>) {
    let half = (n - 2) / 2;
    let mut best = vec![2];
    let mut runner_up: Option<i64> = None;
    for k in 3..=half {
        match table.compare_pairs(n, k, best[0]) {
            Ordering::Less => {
                runner_up = Some(best[0]);
                best = vec![k];
            }
            Ordering::Equal => best.push(k),
            Ordering::Greater => {
                let better = match runner_up {
                    None => true,
                    Some(r) => table.compare_pairs(n, k, r) == Ordering::Less,
                };
                if better {
                    runner_up = Some(k);
                }
            }
        }
    }
    let mut argmin: Vec<i64> = best.iter().flat_map(|&k| [k, n - k - 2]).collect();
    argmin.sort_unstable();
    argmin.dedup();
    (argmin, runner_up)
}

fn check_range(n_lo: i64, n_hi: i64, min: i64) -> Result<()> {
    if n_lo < min || n_lo > n_hi {
        return Err(Error::InvalidArgument(format!(
            "need {min} <= n_lo <= n_hi, got {n_lo}..{n_hi}"
        )));
    }
    Ok(())
}

/// Checks that `Lambda_{n,2}` attains `Lambda_{n,>=2}` for every `n` in range.
pub fn scan_min_location(n_lo: i64, n_hi: i64) -> Result<ScanReport> {
    scan_min_location_at(n_lo, n_hi, SCAN_PRECISION_BITS)
}

pub fn scan_min_location_at(n_lo: i64, n_hi: i64, precision_bits: u32) -> Result<ScanReport> {
    check_range(n_lo, n_hi, 7)?;
    let t0 = Instant::now();
    let table = LogNuTable::new(n_hi - 3, precision_bits);
    let p = table.precision_bits();
    let rows = par_map(n_lo, n_hi, |n| {
        let (argmin, runner_up) = min_location(&table, n);
        let ok = argmin.iter().all(|&k| k == 2 || k == n - 4);
        let min_value = root_from_log(n, &table.ln_pair(n, 2), p);
        let mut values = vec![];
        let relation = match runner_up {
            Some(r) => {
                values.push((format!("Lambda_{{{n},{r}}}"), root_from_log(n, &table.ln_pair(n, r), p)));
                Relation::from(table.compare_pairs(n, r, 2))
            }
            None => Relation::Equal,
        };
        values.push((format!("Lambda_{{{n},2}}"), min_value));
        let violation = (!ok).then(|| Violation {
            n,
            detail: format!("minimum attained at k in {argmin:?}"),
        });
        (
            ScanEntry {
                n,
                relation,
                argmin,
                values,
            },
            violation,
        )
    });
    Ok(finish(ScanKind::MinLocation, (n_lo, n_hi), rows, t0))
}

fn finish(
    kind: ScanKind,
    range: (i64, i64),
    rows: Vec<(ScanEntry, Option<Violation>)>,
    t0: Instant,
) -> ScanReport {
    let mut per_n = Vec::with_capacity(rows.len());
    let mut violations = vec![];
    for (entry, v) in rows {
        per_n.push(entry);
        violations.extend(v);
    }
    ScanReport {
        kind,
        range,
        violations,
        per_n,
        wall_time: t0.elapsed(),
    }
}

/// The pattern `lambda_n < Lambda_{n,>=2}` for `n in {11, 12}` and
/// `lambda_n >= Lambda_{n,>=2}` for `n >= 13`.
pub fn expected_series_relation(n: i64) -> &'static [Relation] {
    if n <= 12 {
        &[Relation::Less, Relation::Equal]
    } else {
        &[Relation::Greater, Relation::Equal]
    }
}

/// Certified relation between `lambda_n` and `Lambda_{n,>=2}` for each `n`.
pub fn compare_series(n_lo: i64, n_hi: i64) -> Result<ScanReport> {
    compare_series_at(n_lo, n_hi, SCAN_PRECISION_BITS)
}

pub fn compare_series_at(n_lo: i64, n_hi: i64, precision_bits: u32) -> Result<ScanReport> {
    check_range(n_lo, n_hi, 11)?;
    let t0 = Instant::now();
    let table = LogNuTable::new(n_hi - 3, precision_bits);
    let p = table.precision_bits();
    let hp2 = hp2_constant();
    let ln_hp2 = ln_interval(&hp2, p + 32).expect("positive").with_precision(p);
    let rows = par_map(n_lo, n_hi, |n| {
        let (argmin, _) = min_location(&table, n);
        let k = argmin[0];
        let ln_small = ln_hp2.add(table.ln_nu(n - 8));
        let ln_big = table.ln_pair(n, k);
        let ord = ln_small.certified_cmp(&ln_big).unwrap_or_else(|| {
            let m = |l: i64| nu(l).expect("l >= 3");
            let (a, b, c) = (m(n - 8), m(k + 1), m(n - k - 1));
            compare_products_from(&[&hp2, &a], &[&b, &c], p)
        });
        let relation = Relation::from(ord);
        let values = vec![
            (format!("lambda_{n}"), root_from_log(n, &ln_small, p)),
            (format!("Lambda_{{{n},>=2}}"), root_from_log(n, &ln_big, p)),
        ];
        let violation = (!expected_series_relation(n).contains(&relation)).then(|| Violation {
            n,
            detail: format!("lambda_{n} {} Lambda_{{{n},>=2}}", relation.symbol()),
        });
        (
            ScanEntry {
                n,
                relation,
                argmin,
                values,
            },
            violation,
        )
    });
    Ok(finish(ScanKind::CompareSeries, (n_lo, n_hi), rows, t0))
}

/// Outcome of comparing `lambda_n^n / Lambda_{n,2}^n` against a threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioCertificate {
    pub n: i64,
    pub holds: bool,
    pub relation: Relation,
    pub ratio: CertifiedInterval,
}

/// The threshold `143/100`.
pub fn ratio_threshold() -> PiMonomial {
    PiMonomial::ratio(143, 100)
}

/// Exact `lambda_n^n / Lambda_{n,2}^n = C pi^8 nu_{n-8} / (nu_3 nu_{n-3})`.
pub fn ratio_monomial(n: i64) -> Result<PiMonomial> {
    if n < 11 {
        return Err(Error::InvalidArgument(format!("ratio needs n >= 11, got {n}")));
    }
    let num = &hp2_constant() * &nu(n - 8)?;
    let den = &nu(3)? * &nu(n - 3)?;
    num.checked_div(&den)
}

/// Certifies `lambda_n^n >= 1.43 Lambda_{n,2}^n` by exact comparison.
pub fn ratio_certificate(n: i64) -> Result<RatioCertificate> {
    ratio_certificate_at(n, SCAN_PRECISION_BITS)
}

pub fn ratio_certificate_at(n: i64, precision_bits: u32) -> Result<RatioCertificate> {
    let r = ratio_monomial(n)?;
    let ord = monomial_compare(&r, &ratio_threshold());
    Ok(RatioCertificate {
        n,
        holds: ord != Ordering::Less,
        relation: ord.into(),
        ratio: r.eval(precision_bits),
    })
}

/// [`ratio_certificate`] over a range, as a report.
pub fn ratio_scan(n_lo: i64, n_hi: i64) -> Result<ScanReport> {
    ratio_scan_at(n_lo, n_hi, SCAN_PRECISION_BITS)
}

pub fn ratio_scan_at(n_lo: i64, n_hi: i64, precision_bits: u32) -> Result<ScanReport> {
    check_range(n_lo, n_hi, 11)?;
    let t0 = Instant::now();
    let threshold = ratio_threshold().eval(precision_bits);
    let rows = par_map(n_lo, n_hi, |n| {
        let c = ratio_certificate_at(n, precision_bits).expect("n >= 11");
        let violation = (!c.holds).then(|| Violation {
            n,
            detail: format!("ratio {} < 1.43", c.ratio.to_decimal(12)),
        });
        (
            ScanEntry {
                n,
                relation: c.relation,
                argmin: vec![],
                values: vec![("ratio".into(), c.ratio), ("threshold".into(), threshold.clone())],
            },
            violation,
        )
    });
    Ok(finish(ScanKind::Ratio, (n_lo, n_hi), rows, t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{lambda_hp2, lambda_lower, lambda_lower_min};

    #[test]
    fn table_matches_exact_logs_past_the_switch() {
        let t = LogNuTable::new(EXACT_LOG_LIMIT + 40, 96);
        for l in [EXACT_LOG_LIMIT + 1, EXACT_LOG_LIMIT + 2, EXACT_LOG_LIMIT + 39, EXACT_LOG_LIMIT + 40] {
            let exact = ln_interval(&nu(l).unwrap(), 128).unwrap();
            assert!(t.ln_nu(l).overlaps(&exact), "l = {l}");
            assert!(t.ln_nu(l).width().to_f64() < 1e-20);
        }
    }

    #[test]
    fn small_min_location_examples() {
        let r7 = scan_min_location(7, 7).unwrap();
        assert!(r7.holds());
        assert_eq!(r7.per_n[0].argmin, vec![2, 3]);
        let r8 = scan_min_location(8, 8).unwrap();
        assert!(r8.holds());
        assert_eq!(r8.per_n[0].relation, Relation::Greater);
        assert_eq!(r8.per_n[0].values[0].1.to_decimal(10), "95.76372065");
        assert_eq!(r8.per_n[0].values[1].1.to_decimal(10), "92.2427837");
        assert!(scan_min_location(6, 9).is_err());
        assert!(scan_min_location(9, 8).is_err());
    }

    #[test]
    fn table_minimum_agrees_with_exact_minimum() {
        let t = LogNuTable::new(60, 64);
        for n in 7..=60 {
            let exact = lambda_lower_min(n, 64).unwrap();
            assert_eq!(min_location(&t, n).0, exact.argmin, "n = {n}");
        }
    }

    #[test]
    fn series_examples() {
        let r = compare_series(11, 13).unwrap();
        assert!(r.holds());
        let rel: Vec<_> = r.per_n.iter().map(|e| e.relation).collect();
        assert_eq!(rel, vec![Relation::Less, Relation::Less, Relation::Greater]);
        let e13 = &r.per_n[2];
        assert_eq!(e13.values[0].1.to_decimal(10), "178.0562034");
        assert_eq!(e13.values[1].1.to_decimal(10), "177.1071517");
        assert!(compare_series(10, 12).is_err());
    }

    #[test]
    fn log_path_values_match_direct_roots() {
        let r = compare_series(11, 16).unwrap();
        for e in &r.per_n {
            let direct = lambda_hp2(e.n, 128).unwrap().value;
            assert!(direct.overlaps(&e.values[0].1));
            let big = lambda_lower(e.n, 2, 128).unwrap().value;
            assert!(big.overlaps(&e.values[1].1));
        }
    }

    #[test]
    fn ratio_examples() {
        let c11 = ratio_certificate(11).unwrap();
        assert!(!c11.holds);
        assert_eq!(c11.ratio.to_decimal(6), "0.557047");
        assert!(ratio_certificate(1100).unwrap().holds);
        assert!(ratio_certificate(10).is_err());
    }

    #[test]
    fn escalation_start_does_not_change_results() {
        let a = scan_min_location_at(7, 40, 64).unwrap();
        let b = scan_min_location_at(7, 40, 256).unwrap();
        let rel = |r: &ScanReport| {
            r.per_n.iter().map(|e| (e.relation, e.argmin.clone())).collect::<Vec<_>>()
        };
        assert_eq!(rel(&a), rel(&b));
        let a = compare_series_at(11, 40, 64).unwrap();
        let b = compare_series_at(11, 40, 256).unwrap();
        assert_eq!(rel(&a), rel(&b));
    }
}
