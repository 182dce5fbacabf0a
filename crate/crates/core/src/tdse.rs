//! Independent Crank-Nicolson propagator for the time-dependent
//! Schrodinger equation on a uniform 1D grid.
//!
//! Deliberately not derived from the analytic model: it discretizes the
//! Hamiltonian -(1/2m) d^2/dx^2 + U(x) + U(t) directly and is used to
//! validate stationary limits (norm conservation, rectangular
//! transmission) and to provide reference densities.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{BarrierSpec, Particle, PerturbationSpec};

/// Uniform spatial grid and time step.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, dt: f64) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(Error::Domain(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 256 {
            return Err(Error::Domain(format!(
                "grid needs n_points >= 256, got {n_points}"
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dt,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }
}

/// Gaussian packet: exp(-(x - x0)^2 / (4 sigma^2) + i k0 x).
#[derive(Debug, Clone, Copy)]
pub struct WavePacket {
    pub x0: f64,
    pub sigma: f64,
    pub k0: f64,
}

/// Final state plus diagnostics of one propagation.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub psi_final: Vec<C64>,
    pub norm_history: Vec<f64>,
    pub transmission: f64,
    pub reflection: f64,
}

/// Where the time-dependent perturbation acts. The model confines
/// U(t, x) to the barrier; the spatially uniform variant exists to verify
/// that a global offset is a pure gauge phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationRegion {
    BarrierOnly,
    Everywhere,
}

/// Discretely normalized Gaussian packet on the grid.
pub fn init_packet(grid: &GridSpec, wp: &WavePacket) -> Result<Vec<C64>> {
    if !(wp.sigma > 0.0) {
        return Err(Error::Domain(format!(
            "packet width must be positive, got {}",
            wp.sigma
        )));
    }
    // envelope must be negligible at both walls
    let edge = |x: f64| (-(x - wp.x0).powi(2) / (4.0 * wp.sigma * wp.sigma)).exp();
    let worst = edge(grid.x_min).max(edge(grid.x_max));
    if worst >= 1e-12 {
        return Err(Error::GridTooSmall {
            edge_fraction: worst,
        });
    }
    let mut psi: Vec<C64> = (0..grid.n_points)
        .map(|i| {
            let x = grid.x_at(i);
            let envelope = edge(x);
            C64::from_polar(envelope, wp.k0 * x)
        })
        .collect();
    let n = norm(&psi, grid.dx()).sqrt();
    for v in &mut psi {
        *v /= n;
    }
    Ok(psi)
}

/// Trapezoid-rule norm integral of |psi|^2.
pub fn norm(psi: &[C64], dx: f64) -> f64 {
    let sum: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
    let ends = 0.5 * (psi[0].norm_sqr() + psi[psi.len() - 1].norm_sqr());
    dx * (sum - ends)
}

/// Position expectation value on the grid.
pub fn mean_position(psi: &[C64], grid: &GridSpec) -> f64 {
    let dx = grid.dx();
    let s: f64 = psi
        .iter()
        .enumerate()
        .map(|(i, v)| grid.x_at(i) * v.norm_sqr())
        .sum();
    dx * s / norm(psi, dx)
}

/// Momentum expectation value via central differences:
/// <k> = Im int psi* dpsi/dx dx / ||psi||^2.
pub fn mean_momentum(psi: &[C64], grid: &GridSpec) -> f64 {
    let dx = grid.dx();
    let mut s = 0.0;
    for i in 1..psi.len() - 1 {
        let d = (psi[i + 1] - psi[i - 1]) / (2.0 * dx);
        s += (psi[i].conj() * d).im;
    }
    dx * s / norm(psi, dx)
}

/// One reusable Crank-Nicolson stepper:
/// (I + i dt/2 H(t + dt/2)) psi_next = (I - i dt/2 H(t + dt/2)) psi_now,
/// with H on a 3-point stencil and reflecting Dirichlet walls.
pub struct Propagator {
    grid: GridSpec,
    mass: f64,
    /// kinetic diagonal plus static barrier potential
    static_diag: Vec<f64>,
    /// fraction of each grid cell inside the barrier; weights U(t) in
    /// BarrierOnly mode
    pert_weight: Vec<f64>,
    off: f64,
    region: PerturbationRegion,
    // Thomas-solve scratch
    c_prime: Vec<C64>,
    d_prime: Vec<C64>,
    rhs: Vec<C64>,
}

impl Propagator {
    pub fn new(
        grid: GridSpec,
        particle: &Particle,
        barrier: &BarrierSpec,
        region: PerturbationRegion,
    ) -> Result<Self> {
        let length = barrier.length();
        if !(grid.x_min < 0.0 && grid.x_max > length) {
            return Err(Error::Domain(format!(
                "grid [{}, {}] must bracket the barrier [0, {length}]",
                grid.x_min, grid.x_max
            )));
        }
        let dx = grid.dx();
        let mass = particle.mass();
        let kinetic = 1.0 / (mass * dx * dx);
        let n = grid.n_points;
        let mut static_diag = vec![kinetic; n];
        let mut pert_weight = vec![0.0; n];
        // Cell-averaged potential: sampling the sharp edges pointwise
        // perturbs the effective barrier width by O(dx), to which the
        // transmission is exponentially sensitive; averaging U over each
        // cell keeps the integrated barrier strength exact.
        for i in 0..n {
            let x = grid.x_at(i);
            let lo = (x - 0.5 * dx).max(0.0);
            let hi = (x + 0.5 * dx).min(length);
            if hi <= lo {
                continue;
            }
            let mut acc = 0.0;
            for s in barrier.segments() {
                let overlap = hi.min(s.x_end) - lo.max(s.x_start);
                if overlap > 0.0 {
                    acc += overlap * s.u;
                }
            }
            static_diag[i] += acc / dx;
            pert_weight[i] = (hi - lo) / dx;
        }
        Ok(Self {
            grid,
            mass,
            static_diag,
            pert_weight,
            off: -0.5 / (mass * dx * dx),
            region,
            c_prime: vec![C64::new(0.0, 0.0); n],
            d_prime: vec![C64::new(0.0, 0.0); n],
            rhs: vec![C64::new(0.0, 0.0); n],
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Advance psi by one step of size `dt` with the time-dependent
    /// potential value `u_t` (already evaluated at the midpoint time).
    /// Negative `dt` steps backwards.
    pub fn step(&mut self, psi: &mut [C64], u_t: f64, dt: f64) {
        let n = psi.len();
        let a = C64::new(0.0, 0.5 * dt);
        let off_a = a * self.off;
        let u_at = |this: &Self, i: usize| match this.region {
            PerturbationRegion::BarrierOnly => u_t * this.pert_weight[i],
            PerturbationRegion::Everywhere => u_t,
        };

        // rhs = (I - i dt/2 H) psi
        for i in 0..n {
            let d = self.static_diag[i] + u_at(self, i);
            let mut v = (C64::new(1.0, 0.0) - a * d) * psi[i];
            if i > 0 {
                v -= off_a * psi[i - 1];
            }
            if i + 1 < n {
                v -= off_a * psi[i + 1];
            }
            self.rhs[i] = v;
        }

        // Thomas solve of (I + i dt/2 H) x = rhs
        let diag_at =
            |this: &Self, i: usize| C64::new(1.0, 0.0) + a * (this.static_diag[i] + u_at(this, i));
        let mut denom = diag_at(self, 0);
        self.c_prime[0] = off_a / denom;
        self.d_prime[0] = self.rhs[0] / denom;
        for i in 1..n {
            denom = diag_at(self, i) - off_a * self.c_prime[i - 1];
            self.c_prime[i] = off_a / denom;
            self.d_prime[i] = (self.rhs[i] - off_a * self.d_prime[i - 1]) / denom;
        }
        psi[n - 1] = self.d_prime[n - 1];
        for i in (0..n - 1).rev() {
            psi[i] = self.d_prime[i] - self.c_prime[i] * psi[i + 1];
        }
    }
}

/// Propagate `psi` for `steps` Crank-Nicolson steps with U(t) applied
/// inside the barrier, recording the norm every step.
pub fn propagate(
    psi: &[C64],
    grid: &GridSpec,
    particle: &Particle,
    barrier: &BarrierSpec,
    pert: &PerturbationSpec,
    steps: usize,
) -> Result<PropagationResult> {
    propagate_with(
        psi,
        grid,
        particle,
        barrier,
        pert,
        steps,
        PerturbationRegion::BarrierOnly,
    )
}

/// As `propagate`, with an explicit choice of where U(t) acts.
pub fn propagate_with(
    psi: &[C64],
    grid: &GridSpec,
    particle: &Particle,
    barrier: &BarrierSpec,
    pert: &PerturbationSpec,
    steps: usize,
    region: PerturbationRegion,
) -> Result<PropagationResult> {
    let mut prop = Propagator::new(*grid, particle, barrier, region)?;
    let mut state = psi.to_vec();
    let dx = grid.dx();
    let mut norm_history = Vec::with_capacity(steps);
    for step_idx in 0..steps {
        let t_mid = (step_idx as f64 + 0.5) * grid.dt;
        let u_t = pert.at(t_mid)?;
        prop.step(&mut state, u_t, grid.dt);
        let n = norm(&state, dx);
        if !n.is_finite() {
            return Err(Error::NumericalBlowup { step: step_idx });
        }
        norm_history.push(n);
    }
    let length = barrier.length();
    let transmission = region_norm(&state, grid, |x| x > length);
    let reflection = region_norm(&state, grid, |x| x < 0.0);
    Ok(PropagationResult {
        psi_final: state,
        norm_history,
        transmission,
        reflection,
    })
}

fn region_norm(psi: &[C64], grid: &GridSpec, pred: impl Fn(f64) -> bool) -> f64 {
    let dx = grid.dx();
    let s: f64 = psi
        .iter()
        .enumerate()
        .filter(|(i, _)| pred(grid.x_at(*i)))
        .map(|(_, v)| v.norm_sqr())
        .sum();
    dx * s
}

/// Transmitted probability: trapezoid integral of |psi|^2 over x > L.
/// Fails if more than 1% of the norm is still inside the barrier.
pub fn transmission_probability(psi: &[C64], grid: &GridSpec, length: f64) -> Result<f64> {
    let total = norm(psi, grid.dx());
    let inside = region_norm(psi, grid, |x| (0.0..=length).contains(&x));
    if inside >= 0.01 * total {
        return Err(Error::PrematureMeasurement {
            in_barrier_norm: inside / total,
        });
    }
    Ok(region_norm(psi, grid, |x| x > length))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn free_barrier() -> BarrierSpec {
        BarrierSpec::rectangular(0.0, 1.0).unwrap()
    }

    #[test]
    fn packet_is_normalized_and_centered() {
        let grid = GridSpec::new(-100.0, 100.0, 2048, 0.01).unwrap();
        let wp = WavePacket {
            x0: -30.0,
            sigma: 5.0,
            k0: 1.0,
        };
        let psi = init_packet(&grid, &wp).unwrap();
        assert_relative_eq!(norm(&psi, grid.dx()), 1.0, max_relative = 1e-12);
        assert!((mean_position(&psi, &grid) - wp.x0).abs() <= grid.dx());
    }

    #[test]
    fn packet_momentum_matches_spectral_oracle() {
        let grid = GridSpec::new(-120.0, 120.0, 2048, 0.01).unwrap();
        let wp = WavePacket {
            x0: -20.0,
            sigma: 8.0,
            k0: 1.0,
        };
        let psi = init_packet(&grid, &wp).unwrap();
        let k_fd = mean_momentum(&psi, &grid);
        assert!((k_fd - wp.k0).abs() <= 0.01 * wp.k0, "k = {k_fd}");

        // spectral estimate of <k> as an independent check
        use rustfft::FftPlanner;
        let n = psi.len();
        let mut buf: Vec<rustfft::num_complex::Complex64> =
            psi.iter().map(|v| rustfft::num_complex::Complex64::new(v.re, v.im)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let dk = 2.0 * std::f64::consts::PI / (grid.dx() * n as f64);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, v) in buf.iter().enumerate() {
            let k = if j <= n / 2 {
                j as f64 * dk
            } else {
                (j as f64 - n as f64) * dk
            };
            let w = v.norm_sqr();
            num += k * w;
            den += w;
        }
        let k_spectral = num / den;
        assert!((k_fd - k_spectral).abs() <= 0.01 * wp.k0.abs());
    }

    #[test]
    fn packet_too_close_to_wall_is_rejected() {
        let grid = GridSpec::new(-50.0, 50.0, 512, 0.01).unwrap();
        let wp = WavePacket {
            x0: -45.0,
            sigma: 10.0,
            k0: 1.0,
        };
        assert!(matches!(
            init_packet(&grid, &wp),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn free_particle_norm_and_drift() {
        let grid = GridSpec::new(-180.0, 180.0, 3600, 0.01).unwrap();
        let p = Particle::new(1.0, 0.5).unwrap();
        let wp = WavePacket {
            x0: -60.0,
            sigma: 10.0,
            k0: 1.0,
        };
        let psi = init_packet(&grid, &wp).unwrap();
        let steps = 4000;
        let result = propagate(
            &psi,
            &grid,
            &p,
            &free_barrier(),
            &PerturbationSpec::Constant { v0: 0.0 },
            steps,
        )
        .unwrap();
        for n in &result.norm_history {
            assert!((1.0 - n).abs() <= 1e-10, "norm drift {}", (1.0 - n).abs());
        }
        // group velocity k0/m = 1, t = 40
        let t = steps as f64 * grid.dt;
        let x_mean = mean_position(&result.psi_final, &grid);
        let expected = wp.x0 + wp.k0 / p.mass() * t;
        assert!(
            (x_mean - expected).abs() <= 0.01 * expected.abs().max(1.0),
            "<x> = {x_mean}, expected {expected}"
        );
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let grid = GridSpec::new(-120.0, 120.0, 2400, 0.01).unwrap();
        let p = Particle::new(1.0, 0.5).unwrap();
        let barrier = BarrierSpec::rectangular(1.0, 2.0).unwrap();
        let wp = WavePacket {
            x0: -40.0,
            sigma: 6.0,
            k0: 1.0,
        };
        let psi0 = init_packet(&grid, &wp).unwrap();
        let mut prop =
            Propagator::new(grid, &p, &barrier, PerturbationRegion::BarrierOnly).unwrap();
        let mut psi = psi0.clone();
        let n_steps = 2000;
        for _ in 0..n_steps {
            prop.step(&mut psi, 0.0, grid.dt);
        }
        for _ in 0..n_steps {
            prop.step(&mut psi, 0.0, -grid.dt);
        }
        let dist: f64 = psi
            .iter()
            .zip(&psi0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            * grid.dx().sqrt();
        assert!(dist <= 1e-6, "L2 distance after reversal: {dist}");
    }

    #[test]
    fn transmission_measurement_guards() {
        let grid = GridSpec::new(-10.0, 10.0, 256, 0.01).unwrap();
        // all-zero psi beyond L
        let mut psi = vec![C64::new(0.0, 0.0); 256];
        for (i, v) in psi.iter_mut().enumerate() {
            if grid.x_at(i) < -2.0 {
                *v = C64::new(1.0, 0.0);
            }
        }
        assert_eq!(transmission_probability(&psi, &grid, 1.0).unwrap(), 0.0);

        // fully transmitted packet, localized well inside the right region
        let mut psi = vec![C64::new(0.0, 0.0); 256];
        for (i, v) in psi.iter_mut().enumerate() {
            let x = grid.x_at(i);
            *v = C64::new((-(x - 5.0) * (x - 5.0)).exp(), 0.0);
        }
        let total = norm(&psi, grid.dx());
        let t = transmission_probability(&psi, &grid, 1.0).unwrap();
        assert_relative_eq!(t, total, max_relative = 1e-8);

        // packet sitting in the barrier
        let mut psi = vec![C64::new(0.0, 0.0); 256];
        for (i, v) in psi.iter_mut().enumerate() {
            if (0.0..=1.0).contains(&grid.x_at(i)) {
                *v = C64::new(1.0, 0.0);
            }
        }
        assert!(matches!(
            transmission_probability(&psi, &grid, 1.0),
            Err(Error::PrematureMeasurement { .. })
        ));
    }
}
