use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::mode::lambda_1;
use crate::em_fields::fmt17;
use crate::error::{Error, Result};
use crate::grid_forms::VectorField3;
use crate::spectral::{curl_inverse_hat, relative_divergence, spectral_inner, Fft3, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub helicity: f64,
    /// `||v - lambda curl^-1 v|| / ||v||` with `lambda = E / H`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Relaxation {
    pub field: VectorField3,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
}

impl Relaxation {
    pub fn final_row(&self) -> TraceRow {
        *self.trace.last().expect("trace holds the initial row")
    }

    /// `E / |H|` of the limit.
    pub fn ratio(&self) -> f64 {
        let r = self.final_row();
        r.energy / r.helicity.abs()
    }

    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iter,energy,helicity,residual\n");
        for r in &self.trace {
            let _ = writeln!(s, "{},{},{},{}", r.iter, fmt17(r.energy), fmt17(r.helicity), fmt17(r.residual));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Admissible relative divergence of the input.
    pub divergence_tol: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iters: 2000, divergence_tol: 1e-8 }
    }
}

struct State {
    v: [Spectrum; 3],
    energy: f64,
    helicity: f64,
}

fn evaluate(fft: &Fft3, v: [Spectrum; 3]) -> (State, [Spectrum; 3]) {
    let g = *fft.grid();
    let a = curl_inverse_hat(fft, &v);
    let energy = spectral_inner(&g, &v, &v);
    let helicity = spectral_inner(&g, &v, &a);
    (State { v, energy, helicity }, a)
}

fn combine(x: &[Spectrum; 3], s: f64, y: &[Spectrum; 3], t: f64) -> [Spectrum; 3] {
    [0, 1, 2].map(|c| x[c].iter().zip(&y[c]).map(|(u, w)| u * s + w * t).collect())
}

/// Minimizes `E = integral v^2` over divergence-free fields at fixed helicity `H = integral v . curl^-1 v`.
///
/// Steepest descent along `grad E - lambda grad H` (the component of `grad E` orthogonal to
/// `grad H`), backtracking on the step, then rescaling so the helicity is restored exactly.
pub fn relax_to_minimizer(v0: &VectorField3, opts: RelaxOptions) -> Result<Relaxation> {
    let grid = *v0.grid();
    let fft = Fft3::new(grid);
    let spec = fft.forward_vector(v0);
    let div = relative_divergence(&fft, &spec);
    if div > opts.divergence_tol {
        return Err(Error::NotSolenoidal { residual: div, tolerance: opts.divergence_tol });
    }
    let (mut st, mut a) = evaluate(&fft, spec);
    let h0 = st.helicity;
    if st.energy == 0.0 || h0.abs() * lambda_1(grid.lengths()) <= 1e-12 * st.energy {
        return Err(Error::DegenerateHelicity { helicity: h0 });
    }
    let mut trace = Vec::new();
    let mut step = 1.0;
    let mut iterations = 0;
    loop {
        // grad E = 2 v, grad H = 2 curl^-1 v; common factors dropped.
        let ee = st.energy;
        let eh = st.helicity;
        let hh = spectral_inner(&grid, &a, &a);
        let lambda = eh / hh;
        let g = combine(&st.v, 1.0, &a, -lambda);
        let residual = (spectral_inner(&grid, &g, &g) / ee).sqrt();
        trace.push(TraceRow { iter: iterations, energy: st.energy, helicity: st.helicity, residual });
        if residual < opts.tol {
            break;
        }
        if iterations == opts.max_iters {
            return Err(Error::Integration(format!(
                "relaxation did not converge in {} iterations (residual {residual:.3e})",
                opts.max_iters
            )));
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial = combine(&st.v, 1.0, &g, -step);
            let (t, _) = evaluate(&fft, trial);
            if t.helicity * h0 <= 0.0 {
                step *= 0.5;
                continue;
            }
            let s = (h0 / t.helicity).sqrt();
            let scaled = combine(&t.v, s, &t.v, 0.0);
            let (t2, a2) = evaluate(&fft, scaled);
            // Near the minimizer the energy drop falls below rounding; admit that noise.
            if t2.energy <= st.energy * (1.0 + 16.0 * f64::EPSILON) {
                accepted = Some((t2, a2));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_a)) = accepted else {
            // No descent step exists at machine precision: already at the minimizer.
            break;
        };
        st = next;
        a = next_a;
        step = (step * 2.0).min(1.0);
        iterations += 1;
    }
    let field = fft.inverse_vector(st.v)?;
    Ok(Relaxation { field, trace, iterations })
}
