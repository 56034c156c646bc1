use serde::Serialize;

use super::{drift, Classification, RadialProblem, RadialSolution, Sample};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegrateOptions {
    /// `Decaying` requires `u(r_max) < decay_threshold * u0`.
    pub decay_threshold: f64,
    /// `Growing` once `|u| > growth_factor * u0`.
    pub growth_factor: f64,
    /// Stop at the first sign change instead of continuing to `r_max`.
    pub stop_at_crossing: bool,
    /// Absolute error floor for `u`, as a multiple of `tol * u0`.
    pub abs_floor: f64,
    pub max_steps: usize,
    /// Disable error control and take steps of this size.
    pub fixed_step: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            decay_threshold: 1e-6,
            growth_factor: 10.0,
            stop_at_crossing: false,
            abs_floor: 1e-3,
            max_steps: 2_000_000,
            fixed_step: None,
        }
    }
}

/// Integrates the radial equation from the regular center to `r_max`.
pub fn integrate(p: &RadialProblem, r_max: f64, tol: f64) -> Result<RadialSolution> {
    integrate_with(p, r_max, tol, &IntegrateOptions::default())
}

type State = [f64; 5];

struct Rhs {
    k: f64,
    c: f64,
    scal: f64,
    mu: f64,
    inv_a: f64,
    pm2: f64,
}

impl Rhs {
    fn eval(&self, r: f64, y: &State) -> State {
        let (u, du) = (y[0], y[1]);
        let au = u.abs();
        let upm2 = if au == 0.0 { 0.0 } else { au.powf(self.pm2) };
        let shk = if self.k == 0.0 {
            1.0
        } else {
            (self.k * super::ln_sh(self.c, r)).exp()
        };
        let ddu = (self.scal * u - self.mu * upm2 * u) * self.inv_a - drift(self.k, self.c, r) * du;
        [du, ddu, u * u * shk, upm2 * u * u * shk, du * du * shk]
    }
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub fn integrate_with(
    p: &RadialProblem,
    r_max: f64,
    tol: f64,
    opts: &IntegrateOptions,
) -> Result<RadialSolution> {
    if !(r_max > 0.0 && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need r_max > 0 and tol > 0, got r_max = {r_max}, tol = {tol}"
        )));
    }
    let m = &p.model;
    let rhs = Rhs {
        k: m.k() as f64,
        c: m.c(),
        scal: m.scal(),
        mu: p.mu,
        inv_a: 1.0 / m.a_n(),
        pm2: m.p_n() - 2.0,
    };
    let u0 = p.u0;
    let alpha = super::sqrt_alpha(m).powi(2);
    let eps = 1e-6 * (1.0f64).max(1.0 / alpha.sqrt());

    // regular center: u'(0) = 0, (k+1) u''(0) = (Scal u0 - mu u0^{p-1}) / a_n
    let upp = (rhs.scal * u0 - rhs.mu * u0.powf(rhs.pm2) * u0) * rhs.inv_a / (rhs.k + 1.0);
    let mut r = eps.min(r_max);
    let ue = u0 + 0.5 * upp * r * r;
    let shk_coeff = r.powf(rhs.k + 1.0) / (rhs.k + 1.0);
    let mut y: State = [
        ue,
        upp * r,
        u0 * u0 * shk_coeff,
        u0.powf(rhs.pm2 + 2.0) * shk_coeff,
        0.0,
    ];
    let mut samples = vec![sample(r, &y)];
    let atol = tol * u0 * opts.abs_floor;
    let mut h = opts.fixed_step.unwrap_or(eps);
    let mut k1 = rhs.eval(r, &y);
    let mut crossing: Option<f64> = None;
    let mut growing = false;
    let mut steps = 0usize;
    while r < r_max {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Solver(format!("step cap reached at r = {r}")));
        }
        h = h.min(r_max - r);
        if h < 1e-14 * r.max(1.0) {
            return Err(Error::Solver(format!("step size underflow at r = {r}")));
        }
        let mut ks = [[0.0; 5]; 7];
        ks[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in ks.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..5 {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            ks[s] = rhs.eval(r + C[s] * h, &ys);
        }
        let mut y_new = y;
        for (s, ks_s) in ks.iter().enumerate() {
            if B[s] != 0.0 {
                for i in 0..5 {
                    y_new[i] += h * B[s] * ks_s[i];
                }
            }
        }
        // error on (u, u') only; the integrals are quadratures riding along
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e: f64 = (0..7).map(|s| E[s] * ks[s][i]).sum::<f64>() * h;
            let scale = atol + tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if h < 1e-12 {
                return Err(Error::Solver(format!("non-finite state at r = {r}")));
            }
            h *= 0.25;
            continue;
        }
        if opts.fixed_step.is_some() {
            err = 0.0;
        }
        if err <= 1.0 {
            let r_new = r + h;
            if crossing.is_none() && y_new[0] <= 0.0 && y[0] > 0.0 {
                crossing = Some(locate_crossing(r, &y, r_new, &y_new));
            }
            r = r_new;
            y = y_new;
            k1 = ks[6];
            samples.push(sample(r, &y));
            if y[0].abs() > opts.growth_factor * u0 {
                growing = true;
                break;
            }
            if crossing.is_some() && opts.stop_at_crossing {
                break;
            }
        }
        if let Some(step) = opts.fixed_step {
            h = step;
            continue;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
        h *= factor.clamp(0.2, 5.0);
    }
    let classification = match (crossing, growing) {
        (Some(r_cross), _) => Classification::Crossing { r_cross },
        (None, true) => Classification::Growing,
        (None, false) => classify_end(&samples, u0, opts.decay_threshold),
    };
    Ok(RadialSolution {
        problem: *p,
        r_max: samples.last().map_or(r, |s| s.r),
        samples,
        classification,
        tol,
        decay_threshold: opts.decay_threshold,
        growth_factor: opts.growth_factor,
    })
}

fn sample(r: f64, y: &State) -> Sample {
    Sample {
        r,
        u: y[0],
        du: y[1],
        i2: y[2],
        ip: y[3],
        igrad: y[4],
    }
}

/// Root of the cubic Hermite interpolant of `u` on `[r0, r1]`.
fn locate_crossing(r0: f64, y0: &State, r1: f64, y1: &State) -> f64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let t = 0.5 * (a + b);
        if hermite(r0, y0[0], y0[1], r1, y1[0], y1[1], t) > 0.0 {
            a = t;
        } else {
            b = t;
        }
    }
    r0 + 0.5 * (a + b) * (r1 - r0)
}

/// Cubic Hermite value at fraction `t` of `[r0, r1]`.
pub(crate) fn hermite(r0: f64, u0: f64, du0: f64, r1: f64, u1: f64, du1: f64, t: f64) -> f64 {
    let h = r1 - r0;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * u0
        + (t3 - 2.0 * t2 + t) * h * du0
        + (-2.0 * t3 + 3.0 * t2) * u1
        + (t3 - t2) * h * du1
}

/// `u` at radius `r` by Hermite interpolation between samples.
pub(crate) fn interpolate(samples: &[Sample], r: f64) -> Option<f64> {
    let idx = samples.partition_point(|s| s.r < r);
    if idx == 0 {
        return samples.first().filter(|s| s.r == r).map(|s| s.u);
    }
    let b = samples.get(idx)?;
    let a = &samples[idx - 1];
    let t = (r - a.r) / (b.r - a.r);
    Some(hermite(a.r, a.u, a.du, b.r, b.u, b.du, t))
}

fn classify_end(samples: &[Sample], u0: f64, decay_threshold: f64) -> Classification {
    let last = samples.last().expect("non-empty");
    if last.u > 0.0 && last.u < decay_threshold * u0 {
        Classification::Decaying
    } else {
        Classification::Bounded
    }
}

pub(crate) fn classify_samples(
    samples: &[Sample],
    u0: f64,
    decay_threshold: f64,
    growth_factor: f64,
) -> Classification {
    for w in samples.windows(2) {
        if w[0].u > 0.0 && w[1].u <= 0.0 {
            let y0 = [w[0].u, w[0].du, 0.0, 0.0, 0.0];
            let y1 = [w[1].u, w[1].du, 0.0, 0.0, 0.0];
            return Classification::Crossing {
                r_cross: locate_crossing(w[0].r, &y0, w[1].r, &y1),
            };
        }
    }
    if samples.iter().any(|s| s.u.abs() > growth_factor * u0) {
        return Classification::Growing;
    }
    classify_end(samples, u0, decay_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::ModelSpace;

    fn cosh_problem(n: i64, k: i64) -> RadialProblem {
        let m = ModelSpace::new(n, k, 1.0).unwrap();
        RadialProblem::new(m, (n * (n - 1)) as f64, 1.0).unwrap()
    }

    fn sup_error(s: &RadialSolution, n: i64) -> f64 {
        s.samples
            .iter()
            .map(|x| (x.u - x.r.cosh().powf(-(n as f64 - 2.0) / 2.0)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn cosh_benchmark_is_reproduced() {
        for (n, k) in [(7, 2), (8, 2), (9, 3)] {
            let s = integrate(&cosh_problem(n, k), 10.0, 1e-9).unwrap();
            assert!((s.last().r - 10.0).abs() < 1e-12);
            let e = sup_error(&s, n);
            assert!(e < 1e-6, "(n, k) = ({n}, {k}): {e}");
        }
    }

    #[test]
    fn constant_solution_stays_constant() {
        let m = ModelSpace::new(7, 2, 0.5).unwrap();
        let u0: f64 = 0.7;
        let mu = m.scal() * u0.powf(2.0 - m.p_n());
        let s = integrate(&RadialProblem::new(m, mu, u0).unwrap(), 20.0, 1e-9).unwrap();
        let dev = s.samples.iter().map(|x| (x.u - u0).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-9 * u0, "{dev}");
        assert_eq!(s.classification, Classification::Bounded);
    }

    #[test]
    fn above_the_separatrix_is_not_decaying() {
        let mut p = cosh_problem(7, 2);
        p.u0 = 2.0;
        let s = integrate(&p, 20.0, 1e-10).unwrap();
        assert!(s.classification.is_crossing(), "{:?}", s.classification);
        assert!(s.samples.iter().any(|x| x.u < 0.0));
    }

    #[test]
    fn tiny_data_grows() {
        let mut p = cosh_problem(7, 2);
        p.u0 = 1e-4;
        let s = integrate(&p, 40.0, 1e-10).unwrap();
        assert_eq!(s.classification, Classification::Growing);
    }

    #[test]
    fn halving_the_step_shows_high_order() {
        // k = 0 keeps the center regular, so fixed steps are stable from r = 0
        let p = cosh_problem(7, 0);
        let run = |h: f64| {
            let opts = IntegrateOptions {
                fixed_step: Some(h),
                ..Default::default()
            };
            sup_error(&integrate_with(&p, 6.0, 1e-9, &opts).unwrap(), 7)
        };
        let (e1, e2) = (run(0.1), run(0.05));
        assert!(e2 < e1 / 4.0, "{e1} {e2}");
    }

    #[test]
    fn adaptive_error_tracks_tolerance() {
        let p = cosh_problem(7, 2);
        let e1 = sup_error(&integrate(&p, 6.0, 1e-6).unwrap(), 7);
        let e2 = sup_error(&integrate(&p, 6.0, 1e-9).unwrap(), 7);
        assert!(e2 < e1 / 100.0, "{e1} {e2}");
    }

    #[test]
    fn bad_arguments() {
        let p = cosh_problem(7, 2);
        assert!(integrate(&p, 0.0, 1e-9).is_err());
        assert!(integrate(&p, 1.0, 0.0).is_err());
    }
}
