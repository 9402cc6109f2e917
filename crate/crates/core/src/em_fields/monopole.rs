//! Dirac monopole of unit flux described by two hemisphere patches.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_forms::{gauss_legendre, periodic_trapezoid};
use crate::linalg::{norm, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonopolePatch {
    /// `A+`, regular on the northern axis, singular on the southern one.
    North,
    /// `A-`, regular on the southern axis, singular on the northern one.
    South,
}

impl MonopolePatch {
    fn sign(self) -> f64 {
        match self {
            MonopolePatch::North => 1.0,
            MonopolePatch::South => -1.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MonopolePatch::North => "north",
            MonopolePatch::South => "south",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonopolePotential {
    /// Cartesian components `(A_x, A_y, A_z)`.
    pub cartesian: Vec3,
    /// Coefficient of `d phi` in spherical coordinates.
    pub a_phi: f64,
}

/// Relative distance below which a point counts as lying on a singular axis.
const AXIS_FLOOR: f64 = 1e-12;

/// `A = (1 / 4 pi r) (x dy - y dx) / (z +- r)`, equivalently `(1 / 4 pi)(+-1 - cos theta) d phi`.
pub fn monopole_potential(patch: MonopolePatch, p: Vec3) -> Result<MonopolePotential> {
    let r = norm(p);
    let s = patch.sign();
    let denom = p[2] + s * r;
    if r == 0.0 || denom.abs() <= AXIS_FLOOR * r {
        return Err(Error::SingularAxis { patch: patch.name(), point: p });
    }
    let c = 1.0 / (4.0 * PI * r * denom);
    let cos_theta = p[2] / r;
    Ok(MonopolePotential { cartesian: [-p[1] * c, p[0] * c, 0.0], a_phi: (s - cos_theta) / (4.0 * PI) })
}

/// Spherical form alone, as a function of the polar angle.
pub fn monopole_a_phi(patch: MonopolePatch, theta: f64) -> f64 {
    (patch.sign() - theta.cos()) / (4.0 * PI)
}

/// The radial field `r_hat / (4 pi r^2)` both patches share.
pub fn monopole_field(p: Vec3) -> Vec3 {
    let r = norm(p);
    p.map(|x| x / (4.0 * PI * r * r * r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonopoleFlux {
    /// `charge * (loop integral of A+ minus loop integral of A-)` along the equator.
    pub stokes: f64,
    /// `charge * integral of sin(theta) / 4 pi` over the sphere.
    pub direct: f64,
}

pub fn monopole_flux(resolution: usize, charge: f64) -> Result<MonopoleFlux> {
    if resolution < 16 {
        return Err(Error::InvalidArgument(format!("flux quadrature needs at least 16 points per circle, got {resolution}")));
    }
    let loop_integral = |patch: MonopolePatch| -> Result<f64> {
        let mut err = None;
        let v = periodic_trapezoid(
            |phi| {
                let (s, c) = phi.sin_cos();
                match monopole_potential(patch, [c, s, 0.0]) {
                    // Tangent of the unit equator is (-sin, cos, 0).
                    Ok(a) => -a.cartesian[0] * s + a.cartesian[1] * c,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            2.0 * PI,
            resolution,
        );
        err.map_or(Ok(v), Err)
    };
    let stokes = charge * (loop_integral(MonopolePatch::North)? - loop_integral(MonopolePatch::South)?);
    let (x, w) = gauss_legendre(resolution);
    let theta_integral: f64 = x.iter().zip(&w).map(|(x, w)| w * 0.5 * PI * (0.5 * PI * (x + 1.0)).sin()).sum();
    let phi_integral = periodic_trapezoid(|_| 1.0, 2.0 * PI, resolution);
    let direct = charge * theta_integral * phi_integral / (4.0 * PI);
    Ok(MonopoleFlux { stokes, direct })
}
