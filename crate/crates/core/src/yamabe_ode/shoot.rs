use serde::Serialize;

use super::integrate::{integrate_with, interpolate, IntegrateOptions};
use super::{sqrt_alpha, RadialProblem, RadialSolution};
use crate::error::{Error, Result};
use crate::invariants::ModelSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShootOptions {
    pub integrate_tol: f64,
    /// Classification radius; `None` uses `max(20, 40/sqrt(alpha_c))`.
    pub r_max: Option<f64>,
    pub max_iterations: usize,
    /// Relative gap between the final bracket trajectories at which the
    /// attached solution is cut off.
    pub split_tolerance: f64,
    pub integrate: IntegrateOptions,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            integrate_tol: 1e-10,
            r_max: None,
            max_iterations: 200,
            split_tolerance: 1e-3,
            integrate: IntegrateOptions::default(),
        }
    }
}

impl ShootOptions {
    pub fn radius(&self, m: &ModelSpace) -> f64 {
        self.r_max.unwrap_or_else(|| (40.0 / sqrt_alpha(m)).max(20.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootResult {
    pub u0_star: f64,
    pub bracket_width: f64,
    pub iterations: usize,
    /// Radius where the two bracket trajectories separate; `solution` ends here.
    pub r_split: f64,
    pub solution: RadialSolution,
}

/// Bisection on `u(0)` between crossing and non-crossing initial data.
pub fn shoot(m: &ModelSpace, mu: f64, bracket: (f64, f64), tol: f64) -> Result<ShootResult> {
    shoot_with(m, mu, bracket, tol, &ShootOptions::default())
}

pub fn shoot_with(
    m: &ModelSpace,
    mu: f64,
    bracket: (f64, f64),
    tol: f64,
    opts: &ShootOptions,
) -> Result<ShootResult> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lo < hi and tol > 0, got ({lo}, {hi}), tol = {tol}"
        )));
    }
    let r_max = opts.radius(m);
    let probe_opts = IntegrateOptions {
        stop_at_crossing: true,
        ..opts.integrate
    };
    let run = |u0: f64| -> Result<RadialSolution> {
        integrate_with(&RadialProblem::new(*m, mu, u0)?, r_max, opts.integrate_tol, &probe_opts)
    };
    let mut sol_lo = run(lo)?;
    let mut sol_hi = run(hi)?;
    let lo_crosses = sol_lo.classification.is_crossing();
    if lo_crosses == sol_hi.classification.is_crossing() {
        return Err(Error::InvalidArgument(format!(
            "bracket ends are both {} ({} and {})",
            if lo_crosses { "crossing" } else { "non-crossing" },
            sol_lo.classification.label(),
            sol_hi.classification.label()
        )));
    }
    let mut iterations = 0;
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if iterations >= opts.max_iterations {
            if hi - lo <= tol {
                break;
            }
            return Err(Error::Solver(format!(
                "bisection did not converge in {iterations} iterations, width {}",
                hi - lo
            )));
        }
        iterations += 1;
        let s = run(mid)?;
        if s.classification.is_crossing() == lo_crosses {
            lo = mid;
            sol_lo = s;
        } else {
            hi = mid;
            sol_hi = s;
        }
    }
    let u0_star = lo + 0.5 * (hi - lo);
    let full = integrate_with(
        &RadialProblem::new(*m, mu, u0_star)?,
        r_max,
        opts.integrate_tol,
        &opts.integrate,
    )?;
    let floor = NOISE_FACTOR * opts.integrate_tol * u0_star * opts.integrate.abs_floor;
    let r_split = split_radius(&full, &sol_lo, &sol_hi, opts.split_tolerance, floor);
    Ok(ShootResult {
        u0_star,
        bracket_width: hi - lo,
        iterations,
        r_split,
        solution: full.truncated(r_split),
    })
}

/// Multiple of the absolute error tolerance below which `|u|` is treated as noise.
pub const NOISE_FACTOR: f64 = 1e4;

/// First sample radius of `s` where the bracket trajectories differ by more
/// than `rel` of their size, or where `|u|` drops below `floor`.
fn split_radius(
    s: &RadialSolution,
    a: &RadialSolution,
    b: &RadialSolution,
    rel: f64,
    floor: f64,
) -> f64 {
    for x in &s.samples {
        if x.u.abs() < floor {
            return x.r;
        }
        match (interpolate(&a.samples, x.r), interpolate(&b.samples, x.r)) {
            (Some(ua), Some(ub)) => {
                if (ua - ub).abs() > rel * ua.abs().max(ub.abs()) {
                    return x.r;
                }
            }
            _ => return x.r,
        }
    }
    s.last().r
}

/// Scans a geometric grid of `u(0)` for adjacent non-crossing / crossing data.
pub fn find_bracket(m: &ModelSpace, mu: f64, opts: &ShootOptions) -> Result<Option<(f64, f64)>> {
    let u_ref = RadialProblem::equilibrium(m, mu).unwrap_or(1.0);
    let r_max = opts.radius(m);
    let probe_opts = IntegrateOptions {
        stop_at_crossing: true,
        ..opts.integrate
    };
    let mut prev: Option<(f64, bool)> = None;
    for j in -8..=24 {
        let u0 = u_ref * 10f64.powf(j as f64 / 4.0);
        let s = integrate_with(
            &RadialProblem::new(*m, mu, u0)?,
            r_max,
            opts.integrate_tol,
            &probe_opts,
        )?;
        let crosses = s.classification.is_crossing();
        if let Some((u_prev, false)) = prev {
            if crosses {
                return Ok(Some((u_prev, u0)));
            }
        }
        prev = Some((u0, crosses));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yamabe_ode::Classification;

    #[test]
    fn recovers_the_cosh_separatrix() {
        for (n, k) in [(7, 2), (8, 2), (9, 3)] {
            let m = ModelSpace::new(n, k, 1.0).unwrap();
            let r = shoot(&m, (n * (n - 1)) as f64, (0.5, 2.0), 1e-6).unwrap();
            assert!((r.u0_star - 1.0).abs() < 1e-4, "{n} {k}: {}", r.u0_star);
            assert!(r.bracket_width <= 1e-6);
            assert_eq!(r.solution.classification, Classification::Decaying, "{n} {k} r_split {}", r.r_split);
        }
    }

    #[test]
    fn same_side_bracket_is_rejected() {
        let m = ModelSpace::new(7, 2, 1.0).unwrap();
        assert!(matches!(
            shoot(&m, 42.0, (1.5, 2.0), 1e-6),
            Err(Error::InvalidArgument(_))
        ));
        assert!(shoot(&m, 42.0, (2.0, 1.5), 1e-6).is_err());
    }

    #[test]
    fn bracket_search_finds_the_benchmark() {
        let m = ModelSpace::new(7, 2, 1.0).unwrap();
        let (lo, hi) = find_bracket(&m, 42.0, &ShootOptions::default()).unwrap().unwrap();
        assert!(lo < 1.0 && 1.0 < hi, "({lo}, {hi})");
    }
}
