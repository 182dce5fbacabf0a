//! Overlap and transition matrices of the two in-barrier components, the
//! effective frequencies omega0 and omega, and the time-dependent
//! coefficients a_k(t), a_j(t).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{EnergyPair, PerturbationSpec};
use crate::numerics::{adaptive_quadrature, sinc_sq_half, SincPower};
use crate::stationary::MatchingCoefficients;

/// Relative tolerance below which the overlap denominator is treated as
/// singular.
const SINGULARITY_TOL: f64 = 1e-14;

/// Spatial inner products of the transmitted and reflected components
/// over the measurement interval [x_j, x_k].
#[derive(Debug, Clone, Copy)]
pub struct OverlapMatrix {
    pub x_kk: C64,
    pub x_kj: C64,
    pub x_jk: C64,
    pub x_jj: C64,
    pub x_j: f64,
    pub x_k: f64,
}

/// Perturbation-weighted overlaps; the diagonal vanishes identically.
#[derive(Debug, Clone, Copy)]
pub struct TransitionMatrix {
    pub y_kj: C64,
    pub y_jk: C64,
}

/// Effective coupling frequency omega0 and the detuned oscillation
/// frequency omega = omega_jk - omega0, with omega_jk = (E_j - E_k).
#[derive(Debug, Clone, Copy)]
pub struct RabiParameters {
    pub omega0: f64,
    pub omega: f64,
    pub omega_kj: f64,
}

/// How to evaluate the overlap integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    ClosedForm,
    Quadrature,
}

/// Overlap matrix of phi_T(x) = alpha e^(-chi x) and
/// phi_R(x) = beta e^(chi x) on [x_j, x_k].
pub fn overlap_matrix(
    mc: &MatchingCoefficients,
    chi_abs: f64,
    x_j: f64,
    x_k: f64,
    method: OverlapMethod,
) -> Result<OverlapMatrix> {
    if !(x_j < x_k) {
        return Err(Error::Domain(format!(
            "measurement interval needs x_j < x_k, got [{x_j}, {x_k}]"
        )));
    }
    if !(chi_abs > 0.0) {
        return Err(Error::Domain(format!(
            "chi_abs must be positive, got {chi_abs}"
        )));
    }
    let (alpha, beta) = (mc.alpha, mc.beta);
    match method {
        OverlapMethod::ClosedForm => {
            let width = x_k - x_j;
            // phi_T* phi_R is x-independent: the exponentials cancel
            let x_kj = alpha.conj() * beta * width;
            let x_jk = beta.conj() * alpha * width;
            let x_kk = C64::from(alpha.norm_sqr())
                * ((-2.0 * chi_abs * x_j).exp() - (-2.0 * chi_abs * x_k).exp())
                / (2.0 * chi_abs);
            let x_jj = C64::from(beta.norm_sqr())
                * ((2.0 * chi_abs * x_k).exp() - (2.0 * chi_abs * x_j).exp())
                / (2.0 * chi_abs);
            Ok(OverlapMatrix {
                x_kk,
                x_kj,
                x_jk,
                x_jj,
                x_j,
                x_k,
            })
        }
        OverlapMethod::Quadrature => {
            let phi_t = |x: f64| alpha * (-chi_abs * x).exp();
            let phi_r = |x: f64| beta * (chi_abs * x).exp();
            let x_kj = integrate_complex(|x| phi_t(x).conj() * phi_r(x), x_j, x_k)?;
            let x_jk = integrate_complex(|x| phi_r(x).conj() * phi_t(x), x_j, x_k)?;
            let x_kk = integrate_complex(|x| phi_t(x).conj() * phi_t(x), x_j, x_k)?;
            let x_jj = integrate_complex(|x| phi_r(x).conj() * phi_r(x), x_j, x_k)?;
            Ok(OverlapMatrix {
                x_kk,
                x_kj,
                x_jk,
                x_jj,
                x_j,
                x_k,
            })
        }
    }
}

fn integrate_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64) -> Result<C64> {
    let re = adaptive_quadrature(|x| f(x).re, a, b, 1e-12)?;
    let im = adaptive_quadrature(|x| f(x).im, a, b, 1e-12)?;
    Ok(C64::new(re.value, im.value))
}

/// Transition matrix at unit perturbation envelope: the x-independent
/// U(t) factors out of the overlap integral, leaving Y_jk = V0 X_kj and
/// Y_kj = V0 X_jk. The diagonal entries are zero by orthogonality of the
/// evanescent pair under the perturbation weighting.
pub fn transition_matrix(x: &OverlapMatrix, pert: &PerturbationSpec) -> TransitionMatrix {
    let v0 = pert.amplitude();
    TransitionMatrix {
        y_jk: x.x_kj * v0,
        y_kj: x.x_jk * v0,
    }
}

/// omega0 = X_kj Y_jk / (X_kk X_jj - X_kj X_jk) and omega = omega_jk - omega0.
pub fn rabi_frequencies(
    x: &OverlapMatrix,
    y: &TransitionMatrix,
    ep: &EnergyPair,
) -> Result<RabiParameters> {
    let d = x.x_kk * x.x_jj - x.x_kj * x.x_jk;
    let scale = (x.x_kk * x.x_jj).norm();
    if d.norm() <= SINGULARITY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularOverlap {
            determinant: d.norm(),
        });
    }
    let omega0 = (x.x_kj * y.y_jk / d).re;
    let omega_kj = ep.omega_kj();
    let omega_jk = -omega_kj;
    Ok(RabiParameters {
        omega0,
        omega: omega_jk - omega0,
        omega_kj,
    })
}

/// Exact time-dependent coefficients: a_k(t) = e^(i omega0 t) and
/// a_j(t) = -i omega0 (X_kk / X_kj) e^(i omega0 t) sin(omega t / 2) / (omega / 2).
pub fn amplitude_coefficients(
    rp: &RabiParameters,
    x: &OverlapMatrix,
    t: f64,
) -> Result<(C64, C64)> {
    if t < 0.0 {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if x.x_kj.norm() == 0.0 {
        return Err(Error::SingularOverlap { determinant: 0.0 });
    }
    let phase = C64::new(0.0, rp.omega0 * t).exp();
    let a_k = phase;
    let envelope = sinc_sq_half(rp.omega, t, SincPower::One);
    let a_j = C64::new(0.0, -rp.omega0) * (x.x_kk / x.x_kj) * phase * envelope;
    Ok((a_k, a_j))
}

/// Residuals of the coupled amplitude equations when the closed-form
/// a_k, a_j are substituted back, using central finite differences for
/// the time derivatives. Returned as (r1, r2) normalized by the largest
/// term magnitude in each equation. A diagnostic, not an assertion: the
/// magnitude quantifies how closely the closed form solves the system.
pub fn ode_residual(
    rp: &RabiParameters,
    x: &OverlapMatrix,
    y: &TransitionMatrix,
    t: f64,
) -> Result<(f64, f64)> {
    let h = 1e-6;
    let t_minus = (t - h).max(0.0);
    let (ak_p, aj_p) = amplitude_coefficients(rp, x, t + h)?;
    let (ak_m, aj_m) = amplitude_coefficients(rp, x, t_minus)?;
    let (ak, aj) = amplitude_coefficients(rp, x, t)?;
    let dt = t + h - t_minus;
    let dak = (ak_p - ak_m) / dt;
    let daj = (aj_p - aj_m) / dt;

    let i = C64::new(0.0, 1.0);
    let rot = (i * rp.omega_kj * t).exp();

    // i a'_k X_jk + i a'_j X_jj e^(i w_kj t) = a_k Y_kj   (Y_jj = 0)
    let lhs1 = i * dak * x.x_jk + i * daj * x.x_jj * rot;
    let rhs1 = ak * y.y_kj;
    let scale1 = lhs1.norm().max(rhs1.norm()).max(f64::MIN_POSITIVE);
    // i a'_k X_kk + i a'_j X_kj e^(i w_kj t) = a_j Y_jk e^(i w_kj t)   (Y_kk = 0)
    let lhs2 = i * dak * x.x_kk + i * daj * x.x_kj * rot;
    let rhs2 = aj * y.y_jk * rot;
    let scale2 = lhs2.norm().max(rhs2.norm()).max(f64::MIN_POSITIVE);

    Ok(((lhs1 - rhs1).norm() / scale1, (lhs2 - rhs2).norm() / scale2))
}
