use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_forms::simpson;
use crate::numdiff::{gradient_n, DEFAULT_STEP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechanicalRecord {
    pub times: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    /// `integral_0^T (q'^2 / 2 - V) dt` with `V = -|grad sigma|^2 / 2`, by composite Simpson.
    pub action: f64,
    /// `sigma(q(T)) - sigma(q(0))`.
    pub delta_sigma: f64,
    /// Largest `|q'' + grad V|` along the path, relative to `max(|q''|, 1)`.
    pub newton_residual: f64,
}

impl MechanicalRecord {
    pub fn action_gap(&self) -> f64 {
        (self.action - self.delta_sigma).abs()
    }
}

fn axpy(x: &[f64], s: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + s * b).collect()
}

/// Integrates the gradient flow `q' = grad sigma` with RK4 and evaluates the action of the
/// Newtonian problem with potential `V = -|grad sigma|^2 / 2` along it.
pub fn mechanical_analogy(sigma: &dyn Fn(&[f64]) -> f64, q0: &[f64], t_end: f64, dt: f64) -> Result<MechanicalRecord> {
    if !(t_end > 0.0) {
        return Err(Error::NonPositive { what: "final time", value: t_end });
    }
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    let h = DEFAULT_STEP;
    let grad = |q: &[f64]| gradient_n(sigma, q, h);
    let steps = (t_end / dt).round().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let mut q = q0.to_vec();
    let mut times = vec![0.0];
    let mut trajectory = vec![q.clone()];
    for step in 1..=steps {
        let k1 = grad(&q);
        let k2 = grad(&axpy(&q, 0.5 * dt, &k1));
        let k3 = grad(&axpy(&q, 0.5 * dt, &k2));
        let k4 = grad(&axpy(&q, dt, &k3));
        for i in 0..q.len() {
            q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::Integration(format!("trajectory diverged at t = {}", step as f64 * dt)));
        }
        times.push(step as f64 * dt);
        trajectory.push(q.clone());
    }

    // On the flow q' = grad sigma, so the Lagrangian is |grad sigma|^2.
    let lagrangian: Vec<f64> = trajectory.iter().map(|q| grad(q).iter().map(|g| g * g).sum()).collect();
    let action = simpson(&lagrangian, dt)?;
    let delta_sigma = sigma(&trajectory[steps]) - sigma(q0);

    let potential = |q: &[f64]| -0.5 * grad(q).iter().map(|g| g * g).sum::<f64>();
    let stride = (steps / 50).max(1);
    let mut newton_residual: f64 = 0.0;
    let mut n = 1;
    while n < steps {
        let (qm, q0n, qp) = (&trajectory[n - 1], &trajectory[n], &trajectory[n + 1]);
        let acc: Vec<f64> = (0..q0n.len()).map(|i| (qp[i] - 2.0 * q0n[i] + qm[i]) / (dt * dt)).collect();
        let gv = gradient_n(&potential, q0n, h);
        let scale = acc.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0);
        let r = acc.iter().zip(&gv).map(|(a, g)| (a + g) * (a + g)).sum::<f64>().sqrt();
        newton_residual = newton_residual.max(r / scale);
        n += stride;
    }
    Ok(MechanicalRecord { times, trajectory, action, delta_sigma, newton_residual })
}
