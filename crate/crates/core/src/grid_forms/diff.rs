//! Second-order central differences on the periodic grid, and the Riemann-sum quadrature.

use crate::error::{Error, Result};
use crate::grid_forms::grid::{GridSpec3, ScalarField3, VectorField3, MIN_COUNT};
use crate::linalg::pairwise_sum;

/// Input to [`exterior_derivative`]: a 0-form (scalar), or a 1-/2-form by vector proxy.
#[derive(Clone, Copy, Debug)]
pub enum FormRef<'a> {
    Scalar(&'a ScalarField3),
    Vector(&'a VectorField3),
}

#[derive(Clone, Debug)]
pub enum Form3 {
    Scalar(ScalarField3),
    Vector(VectorField3),
}

impl Form3 {
    pub fn into_vector(self) -> Option<VectorField3> {
        match self {
            Form3::Vector(v) => Some(v),
            Form3::Scalar(_) => None,
        }
    }

    pub fn into_scalar(self) -> Option<ScalarField3> {
        match self {
            Form3::Scalar(s) => Some(s),
            Form3::Vector(_) => None,
        }
    }
}

/// `d` on 0-, 1- and 2-forms: grad, curl, div respectively.
pub fn exterior_derivative(field: FormRef<'_>, degree: u8) -> Result<Form3> {
    match (degree, field) {
        (0, FormRef::Scalar(f)) => Ok(Form3::Vector(grad(f)?)),
        (1, FormRef::Vector(v)) => Ok(Form3::Vector(curl(v)?)),
        (2, FormRef::Vector(v)) => Ok(Form3::Scalar(div(v)?)),
        (0, _) => Err(Error::DegreeMismatch { degree, expected: "scalar" }),
        (1 | 2, _) => Err(Error::DegreeMismatch { degree, expected: "vector" }),
        (d, _) => Err(Error::InvalidDegree(d)),
    }
}

fn check_stencil(grid: &GridSpec3) -> Result<()> {
    if grid.counts().iter().any(|&n| n < MIN_COUNT) {
        return Err(Error::InvalidGrid("grid too small for the difference stencil".into()));
    }
    Ok(())
}

#[inline]
fn central(grid: &GridSpec3, data: &[f64], idx: usize, axis: usize, inv_2h: f64) -> f64 {
    let ijk = grid.unravel(idx);
    (data[grid.shifted(ijk, axis, 1)] - data[grid.shifted(ijk, axis, -1)]) * inv_2h
}

pub fn grad(f: &ScalarField3) -> Result<VectorField3> {
    let grid = *f.grid();
    check_stencil(&grid)?;
    let h = grid.spacing();
    let inv = h.map(|h| 0.5 / h);
    let data = f.values();
    let comps = [0, 1, 2].map(|a| (0..grid.len()).map(|i| central(&grid, data, i, a, inv[a])).collect());
    VectorField3::from_components(grid, comps)
}

/// Partial derivative of one scalar array along `axis`.
pub fn partial(grid: &GridSpec3, data: &[f64], axis: usize) -> Vec<f64> {
    let inv = 0.5 / grid.spacing()[axis];
    (0..grid.len()).map(|i| central(grid, data, i, axis, inv)).collect()
}

pub fn curl(v: &VectorField3) -> Result<VectorField3> {
    let grid = *v.grid();
    check_stencil(&grid)?;
    let c = v.components();
    let dz_vy = partial(&grid, &c[1], 2);
    let dy_vz = partial(&grid, &c[2], 1);
    let dx_vz = partial(&grid, &c[2], 0);
    let dz_vx = partial(&grid, &c[0], 2);
    let dy_vx = partial(&grid, &c[0], 1);
    let dx_vy = partial(&grid, &c[1], 0);
    let cx = dy_vz.iter().zip(&dz_vy).map(|(a, b)| a - b).collect();
    let cy = dz_vx.iter().zip(&dx_vz).map(|(a, b)| a - b).collect();
    let cz = dx_vy.iter().zip(&dy_vx).map(|(a, b)| a - b).collect();
    VectorField3::from_components(grid, [cx, cy, cz])
}

pub fn div(v: &VectorField3) -> Result<ScalarField3> {
    let grid = *v.grid();
    check_stencil(&grid)?;
    let c = v.components();
    let dx = partial(&grid, &c[0], 0);
    let dy = partial(&grid, &c[1], 1);
    let dz = partial(&grid, &c[2], 2);
    let values = (0..grid.len()).map(|i| dx[i] + dy[i] + dz[i]).collect();
    ScalarField3::from_samples(grid, values)
}

/// Periodic Riemann sum `sum(f) * h_x h_y h_z`.
pub fn integrate(field: &ScalarField3) -> f64 {
    pairwise_sum(field.values()) * field.grid().cell_volume()
}
