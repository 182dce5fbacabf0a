//! Physical inputs of the model: particle, barrier geometry, the
//! time-dependent perturbation and the measured energy pair.
//!
//! All quantities use natural units with hbar = 1; masses and energies
//! are dimensionless.

use crate::error::{Error, Result};

/// Tunnelling particle: mass and incident kinetic energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    mass: f64,
    energy: f64,
}

impl Particle {
    pub fn new(mass: f64, energy: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::Domain(format!(
                "energy must be positive, got {energy}"
            )));
        }
        Ok(Self { mass, energy })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// One piecewise-constant barrier segment `[x_start, x_end)` at height `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x_start: f64,
    pub x_end: f64,
    pub u: f64,
}

/// Static spatial potential: contiguous piecewise-constant segments
/// tiling `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSpec {
    segments: Vec<Segment>,
    length: f64,
}

impl BarrierSpec {
    /// Single-segment rectangular barrier of height `u0` on `[0, length]`.
    pub fn rectangular(u0: f64, length: f64) -> Result<Self> {
        Self::from_segments(vec![Segment {
            x_start: 0.0,
            x_end: length,
            u: u0,
        }])
    }

    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Domain("barrier needs at least one segment".into()));
        }
        if segments[0].x_start != 0.0 {
            return Err(Error::Domain(format!(
                "first segment must start at 0, got {}",
                segments[0].x_start
            )));
        }
        for pair in segments.windows(2) {
            if pair[0].x_end != pair[1].x_start {
                return Err(Error::Domain(format!(
                    "segments must tile contiguously: {} != {}",
                    pair[0].x_end, pair[1].x_start
                )));
            }
        }
        for s in &segments {
            if !(s.x_end > s.x_start) {
                return Err(Error::Domain(format!(
                    "segment [{}, {}] has non-positive width",
                    s.x_start, s.x_end
                )));
            }
            if !s.u.is_finite() {
                return Err(Error::Domain("segment height must be finite".into()));
            }
        }
        let length = segments.last().unwrap().x_end;
        Ok(Self { segments, length })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_rectangular(&self) -> bool {
        self.segments.len() == 1
    }

    /// U(x) lookup. Interior segment boundaries belong to the right
    /// segment; x = L belongs to the last.
    pub fn potential_at(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.length).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} outside barrier [0, {}]",
                self.length
            )));
        }
        for s in &self.segments {
            if x < s.x_end {
                return Ok(s.u);
            }
        }
        Ok(self.segments.last().unwrap().u)
    }
}

/// Time-dependent perturbation U(t) = V0 * w(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationSpec {
    /// w(t) = 1 for t >= 0.
    Constant { v0: f64 },
    /// w(t) = sin(Omega t).
    Sinusoidal { v0: f64, angular_frequency: f64 },
    /// w(t) = exp(-(t - t0)^2 / (2 sigma_t^2)).
    GaussianPulse { v0: f64, center: f64, width: f64 },
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<()> {
        let v0 = self.amplitude();
        if !v0.is_finite() {
            return Err(Error::Domain("V0 must be finite".into()));
        }
        match *self {
            PerturbationSpec::Sinusoidal {
                angular_frequency, ..
            } if !(angular_frequency > 0.0) => Err(Error::Domain(format!(
                "angular frequency must be positive, got {angular_frequency}"
            ))),
            PerturbationSpec::GaussianPulse { width, .. } if !(width > 0.0) => Err(
                Error::Domain(format!("pulse width must be positive, got {width}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            PerturbationSpec::Constant { v0 }
            | PerturbationSpec::Sinusoidal { v0, .. }
            | PerturbationSpec::GaussianPulse { v0, .. } => v0,
        }
    }

    /// U(t) = V0 * w(t).
    pub fn at(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("t must be >= 0, got {t}")));
        }
        Ok(match *self {
            PerturbationSpec::Constant { v0 } => v0,
            PerturbationSpec::Sinusoidal {
                v0,
                angular_frequency,
            } => v0 * (angular_frequency * t).sin(),
            PerturbationSpec::GaussianPulse { v0, center, width } => {
                let z = (t - center) / width;
                v0 * (-0.5 * z * z).exp()
            }
        })
    }

    /// Phase integral int_0^t U(t') dt', closed form (erf form for the
    /// gaussian pulse).
    pub fn phase_integral(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("t must be >= 0, got {t}")));
        }
        Ok(match *self {
            PerturbationSpec::Constant { v0 } => v0 * t,
            PerturbationSpec::Sinusoidal {
                v0,
                angular_frequency,
            } => v0 * (1.0 - (angular_frequency * t).cos()) / angular_frequency,
            PerturbationSpec::GaussianPulse { v0, center, width } => {
                let s = width * std::f64::consts::SQRT_2;
                v0 * width
                    * (std::f64::consts::PI / 2.0).sqrt()
                    * (libm::erf((t - center) / s) - libm::erf(-center / s))
            }
        })
    }
}

/// Pair of measured energies (E_k at the entrance side, E_j at the exit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPair {
    pub e_k: f64,
    pub e_j: f64,
}

impl EnergyPair {
    pub fn new(e_k: f64, e_j: f64) -> Result<Self> {
        if !(e_k > 0.0) || !(e_j > 0.0) {
            return Err(Error::Domain(format!(
                "energies must be positive, got E_k = {e_k}, E_j = {e_j}"
            )));
        }
        Ok(Self { e_k, e_j })
    }

    /// omega_kj = (E_k - E_j) / hbar; antisymmetric under swap.
    pub fn omega_kj(&self) -> f64 {
        self.e_k - self.e_j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn potential_lookup_rectangular() {
        let b = BarrierSpec::rectangular(2.0, 1.0).unwrap();
        assert_eq!(b.potential_at(0.5).unwrap(), 2.0);
        assert!(b.potential_at(1.5).is_err());
        assert!(b.potential_at(-0.1).is_err());
    }

    #[test]
    fn potential_lookup_boundary_belongs_to_right_segment() {
        let b = BarrierSpec::from_segments(vec![
            Segment {
                x_start: 0.0,
                x_end: 0.5,
                u: 1.0,
            },
            Segment {
                x_start: 0.5,
                x_end: 1.0,
                u: 3.0,
            },
        ])
        .unwrap();
        assert_eq!(b.potential_at(0.5).unwrap(), 3.0);
        assert_eq!(b.potential_at(1.0).unwrap(), 3.0);
        assert_eq!(b.potential_at(0.49).unwrap(), 1.0);
    }

    #[test]
    fn potential_piecewise_constant_within_segment() {
        let b = BarrierSpec::rectangular(2.0, 1.0).unwrap();
        assert_eq!(
            b.potential_at(0.123).unwrap(),
            b.potential_at(0.987).unwrap()
        );
    }

    #[test]
    fn bad_tilings_rejected() {
        assert!(BarrierSpec::from_segments(vec![]).is_err());
        assert!(BarrierSpec::from_segments(vec![Segment {
            x_start: 0.5,
            x_end: 1.0,
            u: 1.0
        }])
        .is_err());
        assert!(BarrierSpec::from_segments(vec![
            Segment {
                x_start: 0.0,
                x_end: 0.4,
                u: 1.0
            },
            Segment {
                x_start: 0.5,
                x_end: 1.0,
                u: 1.0
            },
        ])
        .is_err());
    }

    #[test]
    fn perturbation_values() {
        let c = PerturbationSpec::Constant { v0: 0.1 };
        assert_eq!(c.at(7.0).unwrap(), 0.1);
        assert!(c.at(-1.0).is_err());

        let s = PerturbationSpec::Sinusoidal {
            v0: 1.0,
            angular_frequency: 2.0,
        };
        assert_relative_eq!(
            s.at(std::f64::consts::FRAC_PI_4).unwrap(),
            1.0,
            max_relative = 1e-15
        );

        let g = PerturbationSpec::GaussianPulse {
            v0: 1.0,
            center: 5.0,
            width: 1.0,
        };
        assert_eq!(g.at(5.0).unwrap(), 1.0);
    }

    #[test]
    fn phase_integral_closed_forms() {
        let c = PerturbationSpec::Constant { v0: 0.1 };
        assert_relative_eq!(c.phase_integral(2.0).unwrap(), 0.2, max_relative = 1e-15);

        let s = PerturbationSpec::Sinusoidal {
            v0: 1.0,
            angular_frequency: 2.0,
        };
        assert!(s.phase_integral(std::f64::consts::PI).unwrap().abs() < 1e-14);
    }

    #[test]
    fn gaussian_phase_integral_matches_quadrature() {
        let g = PerturbationSpec::GaussianPulse {
            v0: 1.0,
            center: 5.0,
            width: 1.0,
        };
        let q = crate::numerics::adaptive_quadrature(|t| g.at(t).unwrap(), 0.0, 10.0, 1e-12)
            .unwrap();
        assert_relative_eq!(
            g.phase_integral(10.0).unwrap(),
            q.value,
            max_relative = 1e-10
        );
        // frozen 50-digit value
        assert_relative_eq!(
            g.phase_integral(10.0).unwrap(),
            2.5066268375731304227996508765580946481790047815624,
            max_relative = 1e-12
        );
    }

    #[test]
    fn phase_integral_derivative_is_perturbation() {
        let h = 1e-5;
        for pert in [
            PerturbationSpec::Constant { v0: 0.3 },
            PerturbationSpec::Sinusoidal {
                v0: 0.7,
                angular_frequency: 1.3,
            },
            PerturbationSpec::GaussianPulse {
                v0: 0.5,
                center: 2.0,
                width: 0.8,
            },
        ] {
            for &t in &[0.5, 1.0, 2.0, 3.7, 6.0] {
                let num = (pert.phase_integral(t + h).unwrap()
                    - pert.phase_integral(t - h).unwrap())
                    / (2.0 * h);
                assert!(
                    (num - pert.at(t).unwrap()).abs() <= 1e-6,
                    "{pert:?} at t = {t}"
                );
            }
        }
    }

    #[test]
    fn energy_pair_swap_antisymmetry() {
        let a = EnergyPair::new(1.5, 0.7).unwrap();
        let b = EnergyPair::new(0.7, 1.5).unwrap();
        assert_eq!(a.omega_kj(), -b.omega_kj());
    }
}
