//! In-barrier probability density rho(t, x), its oscillation envelope and
//! its spatial derivative.
//!
//! The rectangular forms are evaluated exactly as printed in the source
//! model, including the x-independence of the second and third terms;
//! `rho_general` exposes the pre-substitution three-term form with
//! explicit evanescent factors for callers who want it.

use num_complex::Complex64 as C64;

use crate::coupling::{OverlapMatrix, RabiParameters};
use crate::error::{Error, Result};
use crate::model::BarrierSpec;
use crate::numerics::{sinc_sq_half, SincPower};
use crate::stationary::{MatchingCoefficients, SegmentAmplitudes};

/// Everything needed to evaluate rho(t, x) on one barrier.
#[derive(Debug, Clone)]
pub struct DensitySolution {
    pub mc: MatchingCoefficients,
    pub chi_abs: f64,
    pub rp: RabiParameters,
    pub x: OverlapMatrix,
    pub mass: f64,
    pub barrier: BarrierSpec,
    /// Per-segment amplitudes; required for multi-segment barriers.
    pub segments: Option<Vec<SegmentAmplitudes>>,
}

impl DensitySolution {
    pub fn is_rectangular(&self) -> bool {
        self.barrier.is_rectangular()
    }

    fn require_rectangular(&self) -> Result<()> {
        if self.is_rectangular() {
            Ok(())
        } else {
            Err(Error::UnsupportedBarrier)
        }
    }

    fn check_domain(&self, t: f64, x: f64) -> Result<()> {
        if t < 0.0 {
            return Err(Error::Domain(format!("t must be >= 0, got {t}")));
        }
        if !(0.0..=self.barrier.length()).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} outside barrier [0, {}]",
                self.barrier.length()
            )));
        }
        Ok(())
    }
}

/// rho(t, x) sampled on a rectangular (t, x) lattice. Entries are stored
/// as computed; `negative_count` tallies entries the model drives below
/// zero rather than clipping them.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub t_values: Vec<f64>,
    pub x_values: Vec<f64>,
    /// rho[i][j] = rho(t_i, x_j), t-major.
    pub rho: Vec<Vec<f64>>,
    pub negative_count: usize,
}

/// Three-term density at a point, from the component values phi_T, phi_R:
/// |phi_T|^2 + w0^2 (|X_kk|^2/|X_kj|^2) |phi_R|^2 sin^2(wt/2)/(w/2)^2
/// + 2 w0 (X_kk/X_kj) phi_T* phi_R sin^2(wt/2)/(w/2).
pub fn rho_general(
    phi_t: C64,
    phi_r: C64,
    rp: &RabiParameters,
    x: &OverlapMatrix,
    t: f64,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if x.x_kj.norm() == 0.0 {
        return Err(Error::SingularOverlap { determinant: 0.0 });
    }
    let ratio = x.x_kk / x.x_kj;
    let s1 = sinc_sq_half(rp.omega, t, SincPower::One);
    let s2 = sinc_sq_half(rp.omega, t, SincPower::Two);
    let half_sin = (0.5 * rp.omega * t).sin();
    let term1 = phi_t.norm_sqr();
    let term2 = rp.omega0 * rp.omega0 * ratio.norm_sqr() * phi_r.norm_sqr() * s2;
    // sin^2(wt/2)/(w/2) written as sin(wt/2) * [sin(wt/2)/(w/2)]
    let term3 = 2.0 * rp.omega0 * (ratio * phi_t.conj() * phi_r).re * half_sin * s1;
    Ok(term1 + term2 + term3)
}

/// Rectangular-barrier density, as printed:
/// |a|^2 e^(-2 chi x) + 4 |a|^2 chi^4 / m^2 * sin^2(wt/2)/(w/2)^2
/// + 2 w0 (X_kk/X_kj) a* b sin^2(wt/2)/(w/2).
pub fn rho_rectangular(sol: &DensitySolution, t: f64, x: f64) -> Result<f64> {
    sol.require_rectangular()?;
    sol.check_domain(t, x)?;
    if sol.x.x_kj.norm() == 0.0 {
        return Err(Error::SingularOverlap { determinant: 0.0 });
    }
    let a2 = sol.mc.alpha.norm_sqr();
    let chi = sol.chi_abs;
    let m = sol.mass;
    let s1 = sinc_sq_half(sol.rp.omega, t, SincPower::One);
    let s2 = sinc_sq_half(sol.rp.omega, t, SincPower::Two);
    let half_sin = (0.5 * sol.rp.omega * t).sin();
    let ratio = sol.x.x_kk / sol.x.x_kj;
    let term1 = a2 * (-2.0 * chi * x).exp();
    let term2 = 4.0 * a2 * chi.powi(4) / (m * m) * s2;
    let term3 =
        2.0 * sol.rp.omega0 * (ratio * sol.mc.alpha.conj() * sol.mc.beta).re * half_sin * s1;
    Ok(term1 + term2 + term3)
}

/// Oscillation envelope at a fixed point:
/// rho_min = |a|^2 e^(-2 chi x),
/// rho_max = rho_min + 4 |a|^2 chi^4 / (m^2 (w/2)^2) + 2 w0 (X_kk/X_kj) a* b / (w/2).
pub fn envelope(sol: &DensitySolution, x: f64) -> Result<(f64, f64)> {
    sol.require_rectangular()?;
    sol.check_domain(0.0, x)?;
    if sol.x.x_kj.norm() == 0.0 {
        return Err(Error::SingularOverlap { determinant: 0.0 });
    }
    let a2 = sol.mc.alpha.norm_sqr();
    let chi = sol.chi_abs;
    let m = sol.mass;
    let rho_min = a2 * (-2.0 * chi * x).exp();
    if sol.rp.omega0 == 0.0 {
        return Ok((rho_min, rho_min));
    }
    let half_omega = 0.5 * sol.rp.omega;
    let ratio = sol.x.x_kk / sol.x.x_kj;
    let rho_max = rho_min
        + 4.0 * a2 * chi.powi(4) / (m * m * half_omega * half_omega)
        + 2.0 * sol.rp.omega0 * (ratio * sol.mc.alpha.conj() * sol.mc.beta).re / half_omega;
    Ok((rho_min, rho_max))
}

/// Spatial density gradient, as printed:
/// -2 |a|^2 chi e^(-2 chi x) [1 - 4 chi^4 / m^2 * sin^2(wt/2)/(w/2)^2].
pub fn rho_spatial_derivative(sol: &DensitySolution, t: f64, x: f64) -> Result<f64> {
    sol.require_rectangular()?;
    sol.check_domain(t, x)?;
    let a2 = sol.mc.alpha.norm_sqr();
    let chi = sol.chi_abs;
    let m = sol.mass;
    let s2 = sinc_sq_half(sol.rp.omega, t, SincPower::Two);
    let bracket = 1.0 - 4.0 * chi.powi(4) / (m * m) * s2;
    Ok(-2.0 * a2 * chi * (-2.0 * chi * x).exp() * bracket)
}

/// Uniform lattice evaluation. Rectangular barriers use the printed
/// rectangular form; multi-segment barriers evaluate the three-term form
/// per segment with the chained amplitudes.
pub fn density_grid(
    sol: &DensitySolution,
    t_min: f64,
    t_max: f64,
    nt: usize,
    x_min: f64,
    x_max: f64,
    nx: usize,
) -> Result<DensityGrid> {
    if nt < 2 || nx < 2 {
        return Err(Error::Domain(format!(
            "grid needs nt, nx >= 2, got {nt} x {nx}"
        )));
    }
    if !(t_min < t_max) || t_min < 0.0 {
        return Err(Error::Domain(format!(
            "bad time range [{t_min}, {t_max}]"
        )));
    }
    if !(x_min < x_max) || x_min < 0.0 || x_max > sol.barrier.length() {
        return Err(Error::Domain(format!(
            "bad space range [{x_min}, {x_max}]"
        )));
    }
    let t_values: Vec<f64> = (0..nt)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (nt - 1) as f64)
        .collect();
    let x_values: Vec<f64> = (0..nx)
        .map(|j| x_min + (x_max - x_min) * j as f64 / (nx - 1) as f64)
        .collect();

    let mut rho = Vec::with_capacity(nt);
    let mut negative_count = 0usize;
    for &t in &t_values {
        let mut row = Vec::with_capacity(nx);
        for &x in &x_values {
            let v = if sol.is_rectangular() {
                rho_rectangular(sol, t, x)?
            } else {
                rho_piecewise(sol, t, x)?
            };
            if v < 0.0 {
                negative_count += 1;
            }
            row.push(v);
        }
        rho.push(row);
    }
    Ok(DensityGrid {
        t_values,
        x_values,
        rho,
        negative_count,
    })
}

fn rho_piecewise(sol: &DensitySolution, t: f64, x: f64) -> Result<f64> {
    let segs = sol.segments.as_ref().ok_or(Error::UnsupportedBarrier)?;
    // right-closed segment lookup, x = L falls in the last segment
    let seg = segs
        .iter()
        .find(|s| x < s.x_end)
        .unwrap_or_else(|| segs.last().unwrap());
    let phi_t = seg.alpha * (-seg.chi_abs * x).exp();
    let phi_r = seg.beta * (seg.chi_abs * x).exp();
    rho_general(phi_t, phi_r, &sol.rp, &sol.x, t)
}
