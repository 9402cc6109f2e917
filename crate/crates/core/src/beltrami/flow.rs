use num_complex::Complex64;

use super::mode::spectral_radius;
use crate::error::{Error, Result};
use crate::grid_forms::VectorField3;
use crate::spectral::{curl_hat, noise_filter, relative_divergence, spectral_inner, Fft3, Spectrum};

/// Coefficients below this fraction of the largest one are treated as round-off and removed
/// before evolving; otherwise the fastest-growing resolved modes amplify them.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FlowSeries {
    pub times: Vec<f64>,
    pub slices: Vec<VectorField3>,
    /// `integral |curl A|^2` at every RK4 step (including `t = 0`), for time quadrature.
    pub magnetic_energy: Vec<f64>,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    /// Keep every `save_every`-th step as a slice.
    pub save_every: usize,
    /// Admissible relative divergence of the initial field.
    pub divergence_tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { save_every: 1, divergence_tol: 1e-8 }
    }
}

/// Evolves `dA/dt = curl A` spectrally with classical RK4 and fixed `dt`.
pub fn gradient_flow_evolve(a0: &VectorField3, t_end: f64, dt: f64, opts: FlowOptions) -> Result<FlowSeries> {
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    if !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("final time {t_end} is negative")));
    }
    if opts.save_every == 0 {
        return Err(Error::InvalidArgument("save_every must be positive".into()));
    }
    let grid = *a0.grid();
    let fft = Fft3::new(grid);
    let mut a = fft.forward_vector(a0);
    let div = relative_divergence(&fft, &a);
    if div > opts.divergence_tol {
        return Err(Error::NotSolenoidal { residual: div, tolerance: opts.divergence_tol });
    }
    noise_filter(&mut a, NOISE_FLOOR);
    let kappa_max = spectral_radius(&fft, &a);
    if kappa_max > 0.0 && dt >= 1.0 / kappa_max {
        return Err(Error::UnstableStep { dt, bound: 1.0 / kappa_max });
    }
    let steps = (t_end / dt).round() as usize;
    let norm0 = spectral_inner(&grid, &a, &a).sqrt();
    let mut out = FlowSeries { times: vec![0.0], slices: vec![a0.clone().without_closure()], magnetic_energy: vec![], dt };
    let energy = |a: &[Spectrum; 3]| {
        let b = curl_hat(&fft, a);
        spectral_inner(&grid, &b, &b)
    };
    out.magnetic_energy.push(energy(&a));
    for step in 1..=steps {
        rk4_step(&fft, &mut a, dt);
        let t = step as f64 * dt;
        if norm0 > 0.0 {
            let growth = spectral_inner(&grid, &a, &a).sqrt() / norm0;
            let limit = 10.0 * (kappa_max * t).exp();
            if !growth.is_finite() || growth > limit {
                return Err(Error::Instability { time: t, growth, limit });
            }
        }
        out.magnetic_energy.push(energy(&a));
        if step % opts.save_every == 0 || step == steps {
            out.times.push(t);
            out.slices.push(fft.inverse_vector(a.clone())?);
        }
    }
    Ok(out)
}

fn rk4_step(fft: &Fft3, a: &mut [Spectrum; 3], dt: f64) {
    let axpy = |x: &[Spectrum; 3], s: f64, y: &[Spectrum; 3]| -> [Spectrum; 3] {
        [0, 1, 2].map(|c| x[c].iter().zip(&y[c]).map(|(u, v)| u + v * s).collect())
    };
    let k1 = curl_hat(fft, a);
    let k2 = curl_hat(fft, &axpy(a, 0.5 * dt, &k1));
    let k3 = curl_hat(fft, &axpy(a, 0.5 * dt, &k2));
    let k4 = curl_hat(fft, &axpy(a, dt, &k3));
    let w = dt / 6.0;
    for c in 0..3 {
        for i in 0..a[c].len() {
            let inc: Complex64 = k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i];
            a[c][i] += inc * w;
        }
    }
}
