//! The radial Yamabe equation on `M_c^{n,k}`.
//!
//! For `u = u(r)` depending only on the distance to the core `S^{n-k-1}`,
//! `a_n Delta u + Scal u = mu |u|^{p_n-2} u` with the nonnegative Laplacian
//! `Delta = -d_r^2 - k (ln sh_c)' d_r` on radial functions reduces to
//!
//! ```text
//! u'' + drift(r) u' = (Scal u - mu |u|^{p_n-2} u) / a_n,   drift = k (ln sh_c)'.
//! ```
//!
//! On `M_1^{n,k}` the function `cosh(r)^{-(n-2)/2}` solves this with
//! `mu = n(n-1)` for every `k`, which serves as the benchmark.

mod analysis;
mod integrate;
mod shoot;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{model_constants, ModelSpace};

pub use analysis::{
    norms, tau_profile, theorem_check, Dichotomy, NormEstimate, Norms, TauProfile, TheoremCheck,
};
pub use integrate::{integrate, integrate_with, IntegrateOptions};
pub use shoot::{find_bracket, shoot, shoot_with, ShootOptions, ShootResult};

/// `ln sh_c(r)` with `sh_c(r) = sinh(cr)/c`, or `r` when `c = 0`.
pub fn ln_sh(c: f64, r: f64) -> f64 {
    if c == 0.0 {
        return r.ln();
    }
    let x = c * r;
    if x > 20.0 {
        x - std::f64::consts::LN_2 - c.ln()
    } else {
        (x.sinh() / c).ln()
    }
}

/// `(drift, scal)` at radius `r > 0`, where `drift = k (ln sh_c)'(r)`.
pub fn radial_coefficients(m: &ModelSpace, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    Ok((drift(m.k() as f64, m.c(), r), m.scal()))
}

pub(crate) fn drift(k: f64, c: f64, r: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else if c == 0.0 {
        k / r
    } else {
        k * c / (c * r).tanh()
    }
}

/// `L^{G_c} u = mu u^{p_n-1}` restricted to radial `u` with `u(0) = u0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialProblem {
    pub model: ModelSpace,
    pub mu: f64,
    pub u0: f64,
}

impl RadialProblem {
    pub fn new(model: ModelSpace, mu: f64, u0: f64) -> Result<Self> {
        if !(u0 > 0.0 && u0.is_finite()) {
            return Err(Error::InvalidArgument(format!("u0 must be positive, got {u0}")));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("mu must be finite, got {mu}")));
        }
        Ok(Self { model, mu, u0 })
    }

    /// The constant solution level `(Scal/mu)^{1/(p_n-2)}`, when it exists.
    pub fn equilibrium(model: &ModelSpace, mu: f64) -> Option<f64> {
        let s = model.scal();
        (s > 0.0 && mu > 0.0).then(|| (s / mu).powf(1.0 / (model.p_n() - 2.0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// Positive throughout with `u(r_max) < decay_threshold * u0`.
    Decaying,
    /// First sign change of `u`.
    Crossing { r_cross: f64 },
    /// `|u|` exceeded `growth_factor * u0`; integration stopped there.
    Growing,
    /// None of the above on `[0, r_max]`, e.g. trapped near the constant solution.
    Bounded,
}

impl Classification {
    pub fn is_crossing(&self) -> bool {
        matches!(self, Classification::Crossing { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::Decaying => "decaying",
            Classification::Crossing { .. } => "crossing",
            Classification::Growing => "growing",
            Classification::Bounded => "bounded",
        }
    }
}

/// One accepted integration step.
///
/// `i2`, `ip` and `igrad` are the running integrals of `u^2 sh^k`,
/// `|u|^{p_n} sh^k` and `u'^2 sh^k` from `0` to `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
    pub i2: f64,
    pub ip: f64,
    pub igrad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialSolution {
    pub problem: RadialProblem,
    pub samples: Vec<Sample>,
    pub classification: Classification,
    pub r_max: f64,
    pub tol: f64,
    pub decay_threshold: f64,
    pub growth_factor: f64,
}

impl RadialSolution {
    pub fn model(&self) -> &ModelSpace {
        &self.problem.model
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("solutions carry samples")
    }

    /// `tau = u'/u + (k/2)(ln sh_c)'`, the log-derivative of the fibre `L^2` norm.
    pub fn tau_at(&self, s: &Sample) -> f64 {
        let m = self.model();
        s.du / s.u + 0.5 * drift(m.k() as f64, m.c(), s.r)
    }

    /// Columns `r,u,du,tau`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,du,tau\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", s.r, s.u, s.du, self.tau_at(s));
        }
        out
    }

    /// Keep samples with `r <= r_end` and reclassify the truncated trajectory.
    pub fn truncated(&self, r_end: f64) -> RadialSolution {
        let samples: Vec<Sample> = self.samples.iter().copied().filter(|s| s.r <= r_end).collect();
        let mut out = RadialSolution {
            samples,
            r_max: r_end.min(self.r_max),
            ..self.clone()
        };
        out.classification = integrate::classify_samples(
            &out.samples,
            self.problem.u0,
            self.decay_threshold,
            self.growth_factor,
        );
        out
    }
}

/// `sqrt(alpha_c)`, the asymptotic rate of the fibre norm.
pub fn sqrt_alpha(m: &ModelSpace) -> f64 {
    model_constants(m).alpha.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_examples() {
        let flat = ModelSpace::new(7, 2, 0.0).unwrap();
        assert_eq!(radial_coefficients(&flat, 2.0).unwrap(), (1.0, 12.0));
        let hyp = ModelSpace::new(7, 2, 1.0).unwrap();
        let (d, s) = radial_coefficients(&hyp, 40.0).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert_eq!(s, 6.0);
        // mean curvature H_r = -drift/(n-1)
        assert!((-d / 6.0 + 2.0 / 6.0).abs() < 1e-15);
        let (d, _) = radial_coefficients(&hyp, 1e-3).unwrap();
        let laurent = 2.0 / 1e-3 + 2.0 / 3.0 * 1e-3;
        assert!((d - laurent).abs() < 1e-9);
        assert!(radial_coefficients(&hyp, 0.0).is_err());
        assert!(radial_coefficients(&hyp, -1.0).is_err());
    }

    #[test]
    fn ln_sh_branches_agree() {
        for c in [0.25f64, 0.5, 1.0] {
            let r = 20.5 / c;
            let direct = ((c * r).sinh() / c).ln();
            assert!((ln_sh(c, r) - direct).abs() < 1e-12);
        }
        assert_eq!(ln_sh(0.0, 3.0), 3f64.ln());
    }
}
