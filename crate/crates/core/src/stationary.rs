//! Stationary spatial problem: wave vectors, evanescent basis functions
//! and the boundary-matched amplitudes alpha, beta.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{BarrierSpec, Particle};

/// Real incident wave vector K and the magnitude of the imaginary
/// in-barrier wave vector |chi|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVectors {
    pub k: f64,
    pub chi_abs: f64,
}

/// Boundary-matched amplitudes of the transmitted (alpha) and reflected
/// (beta) evanescent components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingCoefficients {
    pub alpha: C64,
    pub beta: C64,
}

/// K = sqrt(2 m E), hbar = 1.
pub fn incident_wavevector(p: &Particle) -> f64 {
    (2.0 * p.mass() * p.energy()).sqrt()
}

/// |chi| = sqrt(2 m (U - E)) for E below the barrier.
pub fn evanescent_kappa(p: &Particle, u: f64) -> Result<f64> {
    if u <= p.energy() {
        return Err(Error::NotEvanescent {
            energy: p.energy(),
            barrier: u,
        });
    }
    Ok((2.0 * p.mass() * (u - p.energy())).sqrt())
}

/// The evanescent pair f(x) = e^(-|chi| x), g(x) = e^(|chi| x).
/// Their product is identically 1.
pub fn evanescent_waves(chi_abs: f64, x: f64) -> (f64, f64) {
    ((-chi_abs * x).exp(), (chi_abs * x).exp())
}

/// Matches the evanescent envelope at the two barrier edges:
/// psi_i(0) = alpha f(0) fixes alpha, and alpha f(L) = beta g(L) gives
/// beta = alpha e^(-2 |chi| L). No derivative condition is imposed.
pub fn match_boundaries(
    incident_amplitude: C64,
    chi_abs: f64,
    length: f64,
) -> Result<MatchingCoefficients> {
    if !(chi_abs > 0.0) {
        return Err(Error::Domain(format!(
            "chi_abs must be positive, got {chi_abs}"
        )));
    }
    if !(length > 0.0) {
        return Err(Error::Domain(format!(
            "barrier length must be positive, got {length}"
        )));
    }
    let alpha = incident_amplitude;
    let beta = alpha * (-2.0 * chi_abs * length).exp();
    Ok(MatchingCoefficients { alpha, beta })
}

/// Per-segment amplitudes of a piecewise-constant barrier.
///
/// chi is evaluated per segment; the transmitted envelope alpha_i e^(-chi_i x)
/// is chained continuously across interior boundaries, the reflected one
/// beta_i e^(chi_i x) likewise, and beta is seeded at x = L by the same
/// edge condition as the rectangular case.
#[derive(Debug, Clone)]
pub struct SegmentAmplitudes {
    pub x_start: f64,
    pub x_end: f64,
    pub chi_abs: f64,
    pub alpha: C64,
    pub beta: C64,
}

pub fn match_piecewise(
    incident_amplitude: C64,
    p: &Particle,
    barrier: &BarrierSpec,
) -> Result<Vec<SegmentAmplitudes>> {
    let mut out: Vec<SegmentAmplitudes> = Vec::with_capacity(barrier.segments().len());
    // forward sweep: transmitted envelope continuity
    for s in barrier.segments() {
        let chi = evanescent_kappa(p, s.u)?;
        let alpha = match out.last() {
            None => incident_amplitude,
            Some(prev) => {
                // alpha_prev e^(-chi_prev x_b) = alpha e^(-chi x_b)
                prev.alpha * ((chi - prev.chi_abs) * s.x_start).exp()
            }
        };
        out.push(SegmentAmplitudes {
            x_start: s.x_start,
            x_end: s.x_end,
            chi_abs: chi,
            alpha,
            beta: C64::new(0.0, 0.0),
        });
    }
    // seed beta at x = L, then backward sweep for the reflected envelope
    let n = out.len();
    {
        let last = &mut out[n - 1];
        last.beta = last.alpha * (-2.0 * last.chi_abs * last.x_end).exp();
    }
    for i in (0..n - 1).rev() {
        let x_b = out[i].x_end;
        // beta_i e^(chi_i x_b) = beta_next e^(chi_next x_b)
        out[i].beta = out[i + 1].beta * ((out[i + 1].chi_abs - out[i].chi_abs) * x_b).exp();
    }
    Ok(out)
}

/// Textbook stationary transmission probability of a rectangular barrier,
/// T = [1 + U0^2 sinh^2(|chi| L) / (4 E (U0 - E))]^-1.
///
/// Reference value for validating the numerical propagator; distinct from
/// the envelope matching above, which imposes no derivative continuity.
pub fn exact_rectangular_transmission(p: &Particle, u0: f64, length: f64) -> Result<f64> {
    let chi = evanescent_kappa(p, u0)?;
    if !(length > 0.0) {
        return Err(Error::Domain(format!(
            "barrier length must be positive, got {length}"
        )));
    }
    let e = p.energy();
    let s = (chi * length).sinh();
    Ok(1.0 / (1.0 + u0 * u0 * s * s / (4.0 * e * (u0 - e))))
}
