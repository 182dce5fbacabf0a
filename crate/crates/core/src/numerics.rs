//! Shared numerical kernels: adaptive quadrature, a tanh-sinh rule for
//! endpoint singularities, and the stable sin(wt/2)/(w/2) evaluators used
//! by the coupling, density and tunnelling-time modules.

use crate::error::{Error, Result};

/// Maximum bisection depth for the adaptive rule.
const MAX_DEPTH: u32 = 60;

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Adaptive Simpson integration of `f` over `[a, b]` to relative
/// tolerance `rel_tol`.
///
/// Deterministic for identical inputs. Fails with `ConvergenceFailure`
/// (partial result attached) if the bisection depth cap is exceeded.
pub fn adaptive_quadrature<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::Domain(format!(
            "quadrature interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if rel_tol < 1e-14 {
        return Err(Error::Domain(format!(
            "rel_tol must be >= 1e-14, got {rel_tol}"
        )));
    }

    let mut evals = 0usize;
    let mut eval = |x: f64| {
        evals += 1;
        f(x)
    };

    let fa = eval(a);
    let fb = eval(b);
    let m = 0.5 * (a + b);
    let fm = eval(m);
    let whole = simpson(a, b, fa, fm, fb);

    // Absolute budget anchored on the coarse estimate, with a floor so a
    // genuinely zero integral still terminates.
    let tol = rel_tol * whole.abs().max(1e-300).max(rel_tol);

    let mut state = AdaptiveState {
        f: &mut eval,
        err_sum: 0.0,
        failed: false,
    };
    let value = state.refine(a, b, fa, fm, fb, whole, tol, 0);
    let err_sum = state.err_sum;
    let failed = state.failed;
    drop(state);

    if failed {
        return Err(Error::ConvergenceFailure {
            partial: value,
            error_estimate: err_sum,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate: err_sum,
        evaluations: evals,
    })
}

struct AdaptiveState<'a, F: FnMut(f64) -> f64> {
    f: &'a mut F,
    err_sum: f64,
    failed: bool,
}

impl<F: FnMut(f64) -> f64> AdaptiveState<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        // Richardson: |S2 - S1| / 15 estimates the error of S2.
        if delta.abs() <= 15.0 * tol || m <= a || m >= b {
            self.err_sum += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        if depth >= MAX_DEPTH {
            self.failed = true;
            self.err_sum += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        l + r
    }
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Tanh-sinh (double exponential) quadrature of `f` over `[a, b]`.
///
/// The substitution x = tanh((pi/2) sinh t) clusters nodes exponentially
/// at the endpoints, so integrands with inverse-square-root endpoint
/// singularities converge at the requested relative tolerance.
pub fn endpoint_singular_quadrature<F>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::Domain(format!(
            "quadrature interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if rel_tol < 1e-14 {
        return Err(Error::Domain(format!(
            "rel_tol must be >= 1e-14, got {rel_tol}"
        )));
    }

    const MAX_LEVEL: u32 = 12;
    const T_MAX: f64 = 6.5;
    let half = 0.5 * (b - a);
    let mut evals = 0usize;

    // Nodes closer to an endpoint than this are unreliable: rounding
    // endpoint +/- delta perturbs the argument by a relative amount large
    // enough to corrupt a singular integrand. Such nodes are extrapolated
    // from the innermost two reliable samples on that side instead,
    // assuming local behaviour f ~ C * delta^(-p) with p in [0, 1/2].
    let cut_a = a.abs() * 1e-10;
    let cut_b = b.abs() * 1e-10;
    // innermost two reliable (delta, f) samples per side, [1] is inner
    let mut fit_a: [Option<(f64, f64)>; 2] = [None, None];
    let mut fit_b: [Option<(f64, f64)>; 2] = [None, None];

    fn model_contrib(fit: &[Option<(f64, f64)>; 2], delta: f64, w: f64) -> f64 {
        let (d_in, f_in) = match fit[1] {
            Some(p) => p,
            None => return 0.0,
        };
        if f_in == 0.0 {
            return 0.0;
        }
        let p = match fit[0] {
            Some((d_out, f_out)) if f_out != 0.0 && (f_out > 0.0) == (f_in > 0.0) => {
                ((f_in / f_out).abs().ln() / (d_out / d_in).ln()).clamp(0.0, 0.5)
            }
            _ => 0.0,
        };
        // log space: d_in/delta can overflow for subnormal delta
        let ex = p * (d_in.ln() - delta.ln()) + w.ln() + f_in.abs().ln();
        if ex < -745.0 {
            return 0.0;
        }
        ex.exp().copysign(f_in)
    }

    // Contribution of the node pair at abscissa t (t > 0), or the single
    // node at t = 0. Returns None once the transformed weight underflows.
    let mut node = |t: f64| -> Option<f64> {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let q = (-2.0 * u).exp();
        if q == 0.0 {
            return None;
        }
        let denom = 1.0 + q;
        // distance of the node from the near endpoint, exact for small q
        let delta = (b - a) * q / denom;
        if delta == 0.0 {
            return None;
        }
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() * 4.0 * q / (denom * denom);
        if t == 0.0 {
            evals += 1;
            return Some(w * f(a + half));
        }
        let mut c = 0.0;
        for (endpoint, cut, fit, x) in [
            (a, cut_a, &mut fit_a, a + delta),
            (b, cut_b, &mut fit_b, b - delta),
        ] {
            let mut modelled = true;
            if delta >= cut && x != endpoint {
                evals += 1;
                let fv = f(x);
                if fv.is_finite() {
                    c += w * fv;
                    if fit[1].map_or(true, |(d, _)| delta < d) {
                        fit[0] = fit[1];
                        fit[1] = Some((delta, fv));
                    }
                    modelled = false;
                }
            }
            if modelled {
                c += model_contrib(fit, delta, w);
            }
        }
        Some(c)
    };

    // level 0: h = 1
    let mut sum = node(0.0).unwrap_or(0.0);
    let mut j = 1;
    while (j as f64) <= T_MAX {
        match node(j as f64) {
            Some(c) => sum += c,
            None => break,
        }
        j += 1;
    }
    let mut h = 1.0;
    let mut value = h * sum * half;
    let mut err = f64::INFINITY;

    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        // only the new (odd-index) nodes of this level
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            match node(t) {
                Some(c) => sum += c,
                None => break,
            }
            k += 2;
        }
        let new_value = h * sum * half;
        err = (new_value - value).abs();
        value = new_value;
        if level >= 2 && err <= rel_tol * value.abs().max(1e-300) {
            return Ok(QuadratureResult {
                value,
                error_estimate: err,
                evaluations: evals,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        partial: value,
        error_estimate: err,
    })
}

/// Power of the stable sinc evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SincPower {
    /// sin(wt/2) / (w/2)
    One,
    /// sin^2(wt/2) / (w/2)^2
    Two,
}

/// Series switch point for the small-argument branch. Truncation error of
/// the three-term series at this threshold is ~(wt)^6/322560 < 1e-17,
/// below the cancellation level of the direct branch.
const SINC_SERIES_THRESHOLD: f64 = 1e-4;

/// Numerically stable sin(wt/2)/(w/2) and its square.
///
/// Continuous across the series/direct switch to better than 1e-12
/// relative; even in `omega` for both powers.
pub fn sinc_sq_half(omega: f64, t: f64, power: SincPower) -> f64 {
    let wt = omega * t;
    let s1 = if wt.abs() < SINC_SERIES_THRESHOLD {
        let w2 = wt * wt;
        t * (1.0 - w2 / 24.0 + w2 * w2 / 1920.0)
    } else {
        (0.5 * wt).sin() / (0.5 * omega)
    };
    match power {
        SincPower::One => s1,
        SincPower::Two => s1 * s1,
    }
}
