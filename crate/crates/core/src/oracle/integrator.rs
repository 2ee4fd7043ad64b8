//! Explicit stochastic leapfrog for the 1-D trapped mirror.
//!
//! Per step: velocity-Verlet kick/drift/kick under the (optionally modulated)
//! harmonic force, then a damping-plus-noise update of the velocity,
//! v <- v (1 - gamma dt) + sqrt(q dt) xi with q = 2 kB T gamma / m.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dynamics {
    pub omega_z: f64,
    pub mass: f64,
    pub gamma: f64,
    /// Velocity-noise strength q = 2 kB T gamma / m, m^2 s^-3.
    pub q: f64,
    /// One-sided relative spectrum of trap-frequency-squared modulation, 1/Hz.
    pub s_modulation: f64,
}

impl Dynamics {
    pub fn energy(&self, z: f64, v: f64) -> f64 {
        0.5 * self.mass * (v * v + self.omega_z * self.omega_z * z * z)
    }

    fn thermal(&self) -> bool {
        self.q > 0.0
    }

    fn modulated(&self) -> bool {
        self.s_modulation > 0.0
    }
}

/// Per-trajectory counter-based stream: the master seed picks the key,
/// the trajectory index picks the stream.
pub(crate) fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Deterministic energy with a uniformly random phase.
pub(crate) fn initial_state(dyn_: &Dynamics, energy: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let phase = 2.0 * PI * rng.random::<f64>();
    let amplitude = (2.0 * energy / (dyn_.mass * dyn_.omega_z * dyn_.omega_z)).sqrt();
    (
        amplitude * phase.cos(),
        -amplitude * dyn_.omega_z * phase.sin(),
    )
}

/// Standard normals `(xi, eta)` for the force noise and the modulation.
/// Unused channels stay zero so no stream draws are wasted.
pub(crate) fn draw(dyn_: &Dynamics, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let xi = if dyn_.thermal() {
        rng.sample(StandardNormal)
    } else {
        0.0
    };
    let eta = if dyn_.modulated() {
        rng.sample(StandardNormal)
    } else {
        0.0
    };
    (xi, eta)
}

/// Integrates one trajectory and returns the energy every `stride` steps,
/// starting with the initial energy.
pub(crate) fn integrate<N>(
    dyn_: &Dynamics,
    start: (f64, f64),
    dt: f64,
    n_steps: usize,
    stride: usize,
    mut normals: N,
) -> Vec<f64>
where
    N: FnMut() -> (f64, f64),
{
    let w2 = dyn_.omega_z * dyn_.omega_z;
    let damping = 1.0 - dyn_.gamma * dt;
    let kick = (dyn_.q * dt).sqrt();
    // white modulation flat to the step Nyquist: variance S / (2 dt)
    let mod_std = (dyn_.s_modulation / (2.0 * dt)).sqrt();

    let (mut z, mut v) = start;
    let mut out = Vec::with_capacity(n_steps / stride + 1);
    out.push(dyn_.energy(z, v));
    for step in 1..=n_steps {
        let (xi, eta) = normals();
        let stiffness = w2 * (1.0 + mod_std * eta);
        v -= 0.5 * dt * stiffness * z;
        z += dt * v;
        v -= 0.5 * dt * stiffness * z;
        v = v * damping + kick * xi;
        if step % stride == 0 {
            out.push(dyn_.energy(z, v));
        }
    }
    out
}
