use serde::Serialize;

use super::{drift, sqrt_alpha, Classification, RadialSolution};
use crate::error::{Error, Result};
use crate::invariants::{model_constants, sphere_volume};

/// Fraction of the radial range, counted from the end, used for tail fits.
pub const TAIL_WINDOW: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauProfile {
    pub samples: Vec<(f64, f64)>,
    /// Least-squares line through the tail window, evaluated at its last radius.
    pub tau_inf: f64,
    /// Slope of that line.
    pub tail_slope: f64,
}

/// `tau(r) = (ln omega(r))'` along a positive solution.
pub fn tau_profile(s: &RadialSolution) -> Result<TauProfile> {
    if s.classification.is_crossing() || s.samples.iter().any(|x| x.u <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau needs a positive solution, got {}",
            s.classification.label()
        )));
    }
    if s.samples.len() < 8 {
        return Err(Error::InvalidArgument("too few samples for a tail fit".into()));
    }
    let samples: Vec<(f64, f64)> = s.samples.iter().map(|x| (x.r, s.tau_at(x))).collect();
    let r0 = samples[0].0;
    let r1 = samples[samples.len() - 1].0;
    let cut = r1 - TAIL_WINDOW * (r1 - r0);
    let mut window: Vec<(f64, f64)> = samples.iter().copied().filter(|p| p.0 >= cut).collect();
    if window.len() < 4 {
        window = samples[samples.len() - 4..].to_vec();
    }
    let (slope, intercept) = fit_line(&window);
    Ok(TauProfile {
        tau_inf: intercept + slope * r1,
        tail_slope: slope,
        samples,
    })
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// A power of a norm split into the integrated part and the extrapolated tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub integrated: f64,
    /// `g(r_end) / |beta|` for an integrand decaying like `exp(beta r)`, or infinite.
    pub tail: f64,
    pub value: f64,
    /// Exponential rate `beta` of the integrand at `r_end`.
    pub exponent: f64,
    pub converges: bool,
}

impl NormEstimate {
    fn new(volume: f64, integrated: f64, end_value: f64, exponent: f64) -> Self {
        let converges = exponent < 0.0;
        let tail = if converges {
            volume * end_value / -exponent
        } else {
            f64::INFINITY
        };
        let integrated = volume * integrated;
        Self {
            integrated,
            tail,
            value: integrated + tail,
            exponent,
            converges,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    /// `||u||_{L^2}^2`.
    pub l2: NormEstimate,
    /// `||u||_{L^{p_n}}^{p_n}`.
    pub lpn: NormEstimate,
    /// `||grad u||_{L^2}^2`.
    pub grad: NormEstimate,
    pub tau_inf: f64,
}

/// `omega_k omega_{n-k-1}`, the volume of the fibre over `sh_c = 1`; `omega_0 = 2`.
pub fn fibre_volume(n: i64, k: i64) -> f64 {
    let w = |l: i64| {
        if l == 0 {
            2.0
        } else {
            sphere_volume(l).expect("l >= 1").to_f64()
        }
    };
    w(k) * w(n - k - 1)
}

/// `L^2`, `L^{p_n}` and gradient norms of a decaying solution.
pub fn norms(s: &RadialSolution) -> Result<Norms> {
    if s.classification != Classification::Decaying {
        return Err(Error::InvalidArgument(format!(
            "norms need a decaying solution, got {}",
            s.classification.label()
        )));
    }
    let tau = tau_profile(s)?;
    if !(tau.tau_inf < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "fitted tau_inf = {} is not negative",
            tau.tau_inf
        )));
    }
    let m = s.model();
    let (k, c, p) = (m.k() as f64, m.c(), m.p_n());
    let last = s.last();
    let d = drift(k, c, last.r);
    let shk = (k * super::ln_sh(c, last.r)).exp();
    let vol = fibre_volume(m.n(), m.k());
    // u'/u -> tau - drift/2 along the tail
    let rate_u = tau.tau_inf - 0.5 * d;
    let u2 = last.u * last.u * shk;
    let l2 = NormEstimate::new(vol, last.i2, u2, 2.0 * tau.tau_inf);
    let lpn = NormEstimate::new(
        vol,
        last.ip,
        last.u.powf(p) * shk,
        p * tau.tau_inf + d * (1.0 - p / 2.0),
    );
    let grad = NormEstimate::new(vol, last.igrad, rate_u * rate_u * u2, 2.0 * tau.tau_inf);
    Ok(Norms {
        l2,
        lpn,
        grad,
        tau_inf: tau.tau_inf,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    /// `tau_inf <= -(n-k-2)/2 + delta`.
    Lower,
    /// `tau_inf >= (n-k-2)/2 - delta`.
    Upper,
    Indeterminate,
}

/// Relative margin applied to the dichotomy threshold.
pub const DICHOTOMY_MARGIN: f64 = 0.02;
/// Allowed relative deviation of the functional identity.
pub const FUNCTIONAL_TOLERANCE: f64 = 5e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub n: i64,
    pub k: i64,
    pub c: f64,
    pub classification: Classification,
    pub assumption_ok: bool,
    pub tau_threshold: f64,
    pub tau_inf: Option<f64>,
    pub sqrt_alpha: f64,
    pub dichotomy: Dichotomy,
    pub lpn_finite: Option<bool>,
    pub l2_finite: Option<bool>,
    /// Hypotheses hold (assumption and finite `L^{p_n}` norm) so `L^2` is predicted.
    pub theorem_applies: bool,
    /// `Some(true)` when the prediction is confirmed, `Some(false)` on a counterexample.
    pub theorem_confirmed: Option<bool>,
    /// `b = p_n gamma - 2kc/(n-2)` with `gamma = |tau_inf|`.
    pub exponent_b: Option<f64>,
    /// `F(u) / (mu ||u||_{L^{p_n}}^{p_n-2})`, which is `1` for finite-energy solutions.
    pub functional_ratio: Option<f64>,
    pub functional_ok: Option<bool>,
    pub notes: Vec<String>,
}

/// Evaluates the decay dichotomy and the `L^{p_n} => L^2` statement on `s`.
pub fn theorem_check(s: &RadialSolution) -> TheoremCheck {
    let m = *s.model();
    let consts = model_constants(&m);
    let thr = consts.tau_threshold;
    let mut notes = vec![];
    if !consts.assumption_ok {
        notes.push(format!(
            "2k|c| < n(n-k-2) fails for (n, k, c) = ({}, {}, {}); the theorem is not asserted",
            m.n(),
            m.k(),
            m.c()
        ));
    }
    let tau_inf = match s.classification {
        Classification::Decaying | Classification::Growing => tau_profile(s).ok().map(|t| t.tau_inf),
        _ => None,
    };
    let delta = DICHOTOMY_MARGIN * thr;
    let dichotomy = match tau_inf {
        Some(t) if t <= -thr + delta => Dichotomy::Lower,
        Some(t) if t >= thr - delta => Dichotomy::Upper,
        Some(t) => {
            notes.push(format!("tau_inf = {t} lies inside the forbidden band; tail unresolved"));
            Dichotomy::Indeterminate
        }
        None => {
            notes.push(format!(
                "{} solution: no tail rate to classify",
                s.classification.label()
            ));
            Dichotomy::Indeterminate
        }
    };
    let (mut lpn_finite, mut l2_finite, mut ratio) = (None, None, None);
    match s.classification {
        Classification::Decaying => match norms(s) {
            Ok(nm) => {
                lpn_finite = Some(nm.lpn.converges);
                l2_finite = Some(nm.l2.converges);
                if nm.l2.converges && nm.lpn.converges {
                    let fval = m.a_n() * nm.grad.value + consts.scal * nm.l2.value;
                    ratio = Some(fval / (s.problem.mu * nm.lpn.value));
                }
            }
            Err(e) => notes.push(format!("norms unavailable: {e}")),
        },
        // |u| stays away from zero on an infinite-volume space
        Classification::Growing | Classification::Bounded => {
            lpn_finite = Some(false);
            l2_finite = Some(false);
        }
        Classification::Crossing { .. } => notes.push("sign-changing solution".into()),
    }
    let theorem_applies = consts.assumption_ok && lpn_finite == Some(true);
    let theorem_confirmed = theorem_applies.then(|| l2_finite == Some(true));
    let p = m.p_n();
    let exponent_b = tau_inf.map(|t| {
        p * t.abs() - 2.0 * m.k() as f64 * m.c() / (m.n() as f64 - 2.0)
    });
    TheoremCheck {
        n: m.n(),
        k: m.k(),
        c: m.c(),
        classification: s.classification,
        assumption_ok: consts.assumption_ok,
        tau_threshold: thr,
        tau_inf,
        sqrt_alpha: sqrt_alpha(&m),
        dichotomy,
        lpn_finite,
        l2_finite,
        theorem_applies,
        theorem_confirmed,
        exponent_b,
        functional_ratio: ratio,
        functional_ok: ratio.map(|r| (r - 1.0).abs() <= FUNCTIONAL_TOLERANCE),
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::ModelSpace;
    use crate::yamabe_ode::{integrate, shoot, RadialProblem};

    fn benchmark() -> RadialSolution {
        let m = ModelSpace::new(7, 2, 1.0).unwrap();
        shoot(&m, 42.0, (0.5, 2.0), 1e-8).unwrap().solution
    }

    #[test]
    fn benchmark_tail_rate() {
        let s = benchmark();
        let t = tau_profile(&s).unwrap();
        assert!((t.tau_inf + 1.5).abs() < 0.015, "{}", t.tau_inf);
    }

    #[test]
    fn benchmark_norms() {
        let s = benchmark();
        let nm = norms(&s).unwrap();
        let exact = std::f64::consts::PI.powi(4) / 3.0;
        assert!((nm.lpn.value / exact - 1.0).abs() < 1e-4, "{}", nm.lpn.value);
        assert!(nm.l2.converges && nm.lpn.converges);
    }

    #[test]
    fn benchmark_verdict() {
        let v = theorem_check(&benchmark());
        assert!(v.assumption_ok);
        assert_eq!(v.dichotomy, Dichotomy::Lower);
        assert_eq!(v.l2_finite, Some(true));
        assert_eq!(v.theorem_confirmed, Some(true));
        assert_eq!(v.functional_ok, Some(true), "{:?}", v.functional_ratio);
    }

    #[test]
    fn excluded_case_is_not_asserted() {
        let m = ModelSpace::new(6, 3, 1.0).unwrap();
        let s = integrate(&RadialProblem::new(m, 10.0, 1.0).unwrap(), 10.0, 1e-8).unwrap();
        let v = theorem_check(&s);
        assert!(!v.assumption_ok);
        assert!(!v.theorem_applies);
        assert!(v.theorem_confirmed.is_none());
    }

    #[test]
    fn constant_solution_is_indeterminate() {
        let m = ModelSpace::new(7, 2, 1.0).unwrap();
        let mu = m.scal();
        let s = integrate(&RadialProblem::new(m, mu, 1.0).unwrap(), 10.0, 1e-9).unwrap();
        let v = theorem_check(&s);
        assert_eq!(v.dichotomy, Dichotomy::Indeterminate);
        assert_eq!(v.lpn_finite, Some(false));
        assert!(norms(&s).is_err());
    }

    #[test]
    fn growing_branch_has_upper_tau() {
        let m = ModelSpace::new(7, 2, 1.0).unwrap();
        let s = integrate(&RadialProblem::new(m, 42.0, 1e-5).unwrap(), 40.0, 1e-10).unwrap();
        assert_eq!(s.classification, Classification::Growing);
        let t = tau_profile(&s).unwrap();
        assert!(t.tau_inf >= 1.5 - 0.05, "{}", t.tau_inf);
    }

    #[test]
    fn rescaling_scales_norms() {
        let m = ModelSpace::new(7, 2, 1.0).unwrap();
        let p = m.p_n();
        let a = shoot(&m, 42.0, (0.5, 2.0), 1e-8).unwrap();
        let s = 2.0f64;
        let b = shoot(&m, 42.0 * s.powf(2.0 - p), (1.0, 4.0), 1e-8).unwrap();
        let (na, nb) = (norms(&a.solution).unwrap(), norms(&b.solution).unwrap());
        assert!((nb.l2.value / na.l2.value / 4.0 - 1.0).abs() < 1e-4);
        assert!((nb.lpn.value / na.lpn.value / s.powf(p) - 1.0).abs() < 1e-4);
    }
}
