use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::energy::helicity_ab;
use crate::beltrami::FlowSeries;
use crate::error::{Error, Result};
use crate::grid_forms::{simpson, VectorField3};
use crate::linalg::{convergence_order, Vec3};
use crate::spectral::spectral_curl;

/// `1/2 integral A . curl A` (the cubic term vanishes for an Abelian connection).
pub fn chern_simons(a: &VectorField3) -> Result<f64> {
    let b = spectral_curl(a)?;
    Ok(0.5 * helicity_ab(a, &b)?)
}

/// A spacetime 1-form `(A_0, A_1, A_2, A_3)` as a function of `(t, x, y, z)`.
pub type Potential4<'a> = &'a dyn Fn([f64; 4]) -> [f64; 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernIdentity {
    pub steps: Vec<f64>,
    /// Sup over the sample points of `|dA^dA - d(A^dA)|` at each step.
    pub residuals: Vec<f64>,
    pub order: f64,
}

fn levi_civita() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        let inversions = (0..4).map(|i| (i + 1..4).filter(|&j| p[i] > p[j]).count()).sum::<usize>();
                        out.push((p, if inversions % 2 == 0 { 1.0 } else { -1.0 }));
                    }
                }
            }
        }
    }
    out
}

fn shift(x: [f64; 4], axis: usize, h: f64) -> [f64; 4] {
    let mut y = x;
    y[axis] += h;
    y
}

/// Central differences `D[mu][nu] = d_mu A_nu`.
fn jacobian4(a: Potential4, x: [f64; 4], h: f64) -> [[f64; 4]; 4] {
    let mut d = [[0.0; 4]; 4];
    for mu in 0..4 {
        let (p, m) = (a(shift(x, mu, h)), a(shift(x, mu, -h)));
        for nu in 0..4 {
            d[mu][nu] = (p[nu] - m[nu]) / (2.0 * h);
        }
    }
    d
}

/// Checks `dA ^ dA = d(A ^ dA)` as 4-form densities by central differences at step `h` for each
/// `h = L / n` in `divisions`, sampling a `samples^3` lattice of the box `[0, L)^3` at time `t`.
pub fn chern_density_identity_check(
    a: Potential4,
    lengths: [f64; 3],
    t: f64,
    samples: usize,
    divisions: &[usize],
) -> Result<ChernIdentity> {
    if samples == 0 || divisions.len() < 2 {
        return Err(Error::InvalidArgument("need samples and at least two step sizes".into()));
    }
    let eps = levi_civita();
    let l = lengths.iter().cloned().fold(0.0, f64::max);
    let mut steps = Vec::new();
    let mut residuals = Vec::new();
    for &n in divisions {
        let h = l / n as f64;
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            for j in 0..samples {
                for k in 0..samples {
                    let frac = |m: usize, axis: usize| (m as f64 + 0.5) / samples as f64 * lengths[axis];
                    let x = [t, frac(i, 0), frac(j, 1), frac(k, 2)];
                    let d = jacobian4(a, x, h);
                    let lhs: f64 = eps.iter().map(|&([m, nu, r, s], sg)| sg * d[m][nu] * d[r][s]).sum();
                    // K^mu = eps^{mu nu rho sigma} A_nu d_rho A_sigma, then its central divergence.
                    let current = |y: [f64; 4], mu: usize| -> f64 {
                        let av = a(y);
                        let dy = jacobian4(a, y, h);
                        eps.iter().filter(|(p, _)| p[0] == mu).map(|&([_, nu, r, s], sg)| sg * av[nu] * dy[r][s]).sum()
                    };
                    let rhs: f64 =
                        (0..4).map(|mu| (current(shift(x, mu, h), mu) - current(shift(x, mu, -h), mu)) / (2.0 * h)).sum();
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        steps.push(h);
        residuals.push(worst);
    }
    let order = if residuals.iter().all(|&r| r > 0.0) { convergence_order(&steps, &residuals) } else { f64::INFINITY };
    Ok(ChernIdentity { steps, residuals, order })
}

/// Same check for a spatial potential promoted to the temporal-gauge spacetime potential
/// `(0, A(x - t w))` of the field carried rigidly with velocity `w`.
pub fn chern_density_identity_check_field(
    a: &VectorField3,
    w: Vec3,
    samples: usize,
    divisions: &[usize],
) -> Result<ChernIdentity> {
    let f = a.closure().ok_or(Error::ClosureMissing)?.clone();
    let o = a.grid().origin();
    let pot = move |x: [f64; 4]| {
        let t = x[0];
        let v = f([x[1] + o[0] - t * w[0], x[2] + o[1] - t * w[1], x[3] + o[2] - t * w[2]]);
        [0.0, v[0], v[1], v[2]]
    };
    chern_density_identity_check(&pot, a.grid().lengths(), 0.0, samples, divisions)
}

/// Central difference of the Chern-Simons functional under single-node perturbations, divided by
/// the cell volume, against the spectral curl at `probes` random nodes. Returns the largest
/// componentwise error relative to `sup |curl A|` (absolute when `curl A` vanishes).
pub fn cs_variation_check(a: &VectorField3, probes: usize, epsilon: f64, seed: u64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::NonPositive { what: "epsilon", value: epsilon });
    }
    let g = *a.grid();
    let curl = spectral_curl(a)?;
    let scale = curl.sup_norm();
    let dv = g.cell_volume();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = a.clone().without_closure().into_components();
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let idx = rng.gen_range(0..g.len());
        let exact = curl.at(idx);
        for c in 0..3 {
            let perturbed = |s: f64| -> Result<f64> {
                let mut comps = base.clone();
                comps[c][idx] += s * epsilon;
                chern_simons(&VectorField3::from_components(g, comps)?)
            };
            let fd = (perturbed(1.0)? - perturbed(-1.0)?) / (2.0 * epsilon * dv);
            worst = worst.max((fd - exact[c]).abs());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowEquality {
    /// `integral_0^T dt integral |curl A|^2` by composite Simpson over the RK4 steps.
    pub integral: f64,
    pub delta_cs: f64,
    pub relative_gap: f64,
}

/// Along `dA/dt = curl A`, `dCS/dt = integral |curl A|^2`, so the time integral of the magnetic
/// energy must equal the change of the Chern-Simons functional.
pub fn flow_equality_check(series: &FlowSeries) -> Result<FlowEquality> {
    let first = series.slices.first().ok_or(Error::TooFewSlices { needed: 2, got: 0 })?;
    let last = series.slices.last().unwrap();
    if series.slices.len() < 2 {
        return Err(Error::TooFewSlices { needed: 2, got: series.slices.len() });
    }
    let integral = simpson(&series.magnetic_energy, series.dt)?;
    let delta_cs = chern_simons(last)? - chern_simons(first)?;
    let relative_gap = if delta_cs == 0.0 { integral.abs() } else { (integral - delta_cs).abs() / delta_cs.abs() };
    Ok(FlowEquality { integral, delta_cs, relative_gap })
}
