//! Exact `rational * pi^(m/2)` constants and certified interval enclosures.

mod dyadic;
mod interval;
mod monomial;

pub use dyadic::{DecimalRounding, Dyadic, Round};
pub use interval::{ln2, pi, CertifiedInterval, IntervalCertificate, CERTIFICATE_DIGITS};
pub use monomial::{
    compare_products, compare_products_from, eval_interval, gamma_half, ln_interval,
    monomial_combine, monomial_compare, Combine, PiMonomial, COMPARE_MAX_BITS,
    COMPARE_START_BITS,
};
