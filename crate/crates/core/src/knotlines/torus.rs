use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::trace::FieldLine;
use crate::error::{Error, Result};
use crate::grid_forms::{GridSpec3, VectorField3};
use crate::linalg::{cross, dot, norm, normalize, sub, Vec3};

/// Major radius of the nested tori.
pub const TORUS_MAJOR_RADIUS: f64 = 1.0;
/// Minor radius of the resonant torus.
pub const TORUS_RESONANT_RADIUS: f64 = 0.4;
/// The field vanishes beyond this minor radius.
pub const TORUS_SUPPORT_RADIUS: f64 = 0.8;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Solenoidal field tangent to the tori `rho = const` around the circle `R = 1, z = 0`:
/// `B = h(psi) [grad psi x grad phi + I grad phi]` with `psi = rho^2 / 2` and a compact bump
/// `h`. A line at minor radius `rho` turns `I / sqrt(1 - rho^2)` times around the axis per turn
/// around the tube; `iota` fixes that number on the resonant torus.
pub fn build_torus_field_with_rotation(iota: f64, grid: GridSpec3) -> Result<VectorField3> {
    if !iota.is_finite() || iota == 0.0 {
        return Err(Error::InvalidArgument(format!("rotation number must be finite and nonzero, got {iota}")));
    }
    let r0 = TORUS_MAJOR_RADIUS;
    let current = iota * (r0 * r0 - TORUS_RESONANT_RADIUS * TORUS_RESONANT_RADIUS).sqrt();
    Ok(VectorField3::from_fn(grid, move |p| {
        let r = p[0].hypot(p[1]);
        let (dr, z) = (r - r0, p[2]);
        let s = (dr * dr + z * z) / (TORUS_SUPPORT_RADIUS * TORUS_SUPPORT_RADIUS);
        if s >= 1.0 || r == 0.0 {
            return [0.0; 3];
        }
        let h = (1.0 - s) * (1.0 - s);
        let (c, sn) = (p[0] / r, p[1] / r);
        // ((R - R0) z_hat - Z e_R) / R + I e_phi / R
        let br = -z / r;
        let bphi = current / r;
        let bz = dr / r;
        [h * (br * c - bphi * sn), h * (br * sn + bphi * c), h * bz]
    }))
}

/// Field whose lines on the resonant torus close as `(p, q)` torus knots: `p` turns around
/// the symmetry axis for every `q` turns around the tube.
pub fn build_invariant_torus_field(p: i64, q: i64, grid: GridSpec3) -> Result<VectorField3> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(format!("({p},{q}) is not a torus knot: both windings must be nonzero")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    build_torus_field_with_rotation(p as f64 / q as f64, grid)
}

/// A point on the resonant torus.
pub fn resonant_seed() -> Vec3 {
    [TORUS_MAJOR_RADIUS + TORUS_RESONANT_RADIUS, 0.0, 0.0]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusFrame {
    pub center: Vec3,
    /// Unit symmetry axis.
    pub axis: Vec3,
    pub major_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KnotType {
    Torus { p: i64, q: i64 },
    Unknot,
    Unclassified,
    Open,
}

impl fmt::Display for KnotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotType::Torus { p, q } => write!(f, "({p},{q})"),
            KnotType::Unknot => f.write_str("unknot"),
            KnotType::Unclassified => f.write_str("unclassified"),
            KnotType::Open => f.write_str("open"),
        }
    }
}

/// Length-weighted segment midpoints of a closed polygon.
fn weighted_midpoints(pts: &[Vec3]) -> Vec<(Vec3, f64)> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            ([0, 1, 2].map(|k| 0.5 * (a[k] + b[k])), norm(sub(b, a)))
        })
        .collect()
}

/// Centre and axis from the second moments of the closed polygon (axis along the smallest
/// principal direction), major radius as the middle of the range of distances from the axis.
pub fn fit_torus_frame(points: &[Vec3]) -> Result<TorusFrame> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument("torus frame needs at least 3 points".into()));
    }
    let mids = weighted_midpoints(points);
    let total: f64 = mids.iter().map(|m| m.1).sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("degenerate polygon".into()));
    }
    let mut center = [0.0; 3];
    for (m, w) in &mids {
        for k in 0..3 {
            center[k] += w * m[k] / total;
        }
    }
    let mut cov = Matrix3::zeros();
    for (m, w) in &mids {
        let d = sub(*m, center);
        for i in 0..3 {
            for j in 0..3 {
                cov[(i, j)] += w * d[i] * d[j] / total;
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let col = eig.eigenvectors.column(k);
    let mut axis = normalize([col[0], col[1], col[2]]).ok_or_else(|| Error::InvalidArgument("degenerate frame".into()))?;
    // Fix the sign: positive circulation of the line around the axis.
    let mut circulation = 0.0;
    for i in 0..points.len() {
        let (a, b) = (sub(points[i], center), sub(points[(i + 1) % points.len()], center));
        circulation += dot(cross(a, b), axis);
    }
    if circulation < 0.0 {
        axis = axis.map(|x| -x);
    }
    // On a torus the in-plane radius spans [R0 - rho, R0 + rho] and the height [-rho, rho].
    let (mut r_lo, mut r_hi, mut z_lo, mut z_hi) = (f64::INFINITY, 0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let d = sub(*p, center);
        let r = in_plane_radius(d, axis);
        let z = dot(d, axis);
        r_lo = r_lo.min(r);
        r_hi = r_hi.max(r);
        z_lo = z_lo.min(z);
        z_hi = z_hi.max(z);
    }
    let shift = 0.5 * (z_lo + z_hi);
    let center = [0, 1, 2].map(|k| center[k] + shift * axis[k]);
    Ok(TorusFrame { center, axis, major_radius: 0.5 * (r_lo + r_hi) })
}

fn in_plane_radius(d: Vec3, axis: Vec3) -> f64 {
    let z = dot(d, axis);
    norm([d[0] - z * axis[0], d[1] - z * axis[1], d[2] - z * axis[2]])
}

fn unwrap_total(angles: &[f64]) -> f64 {
    let n = angles.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut d = angles[(i + 1) % n] - angles[i];
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        total += d;
    }
    total
}

/// Relative spread of the tube radius tolerated before a line counts as off-torus.
const TUBE_TOLERANCE: f64 = 0.05;
/// Below this tube radius (relative) the line is a circle around the axis.
const TUBE_DEGENERATE: f64 = 1e-4;

/// Counts signed turns around the frame axis (`p`) and around the tube (`q`) over one period,
/// reduced by their gcd. Mirror images are not distinguished.
pub fn torus_knot_classify(line: &FieldLine, frame: Option<&TorusFrame>) -> KnotType {
    if !line.closed {
        return KnotType::Open;
    }
    let pts = line.polygon();
    let frame = match frame {
        Some(f) => *f,
        None => match fit_torus_frame(pts) {
            Ok(f) => f,
            Err(_) => return KnotType::Unclassified,
        },
    };
    classify_polygon(pts, &frame)
}

pub fn classify_polygon(pts: &[Vec3], frame: &TorusFrame) -> KnotType {
    let axis = frame.axis;
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let (Some(e1), r0) = (normalize(cross(axis, helper)), frame.major_radius) else {
        return KnotType::Unclassified;
    };
    let e2 = cross(axis, e1);
    let mut phi = Vec::with_capacity(pts.len());
    let mut theta = Vec::with_capacity(pts.len());
    let mut tube = Vec::with_capacity(pts.len());
    for p in pts {
        let d = sub(*p, frame.center);
        let (x, y, z) = (dot(d, e1), dot(d, e2), dot(d, axis));
        let r = x.hypot(y);
        phi.push(y.atan2(x));
        theta.push(z.atan2(r - r0));
        tube.push((r - r0).hypot(z));
    }
    let (lo, hi) = tube.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if !(r0 > 0.0) || hi - lo > TUBE_TOLERANCE * r0 {
        return KnotType::Unclassified;
    }
    let p = (unwrap_total(&phi) / (2.0 * PI)).round() as i64;
    let q = if hi < TUBE_DEGENERATE * r0 { 0 } else { (unwrap_total(&theta) / (2.0 * PI)).round() as i64 };
    let g = gcd(p, q);
    if g == 0 {
        return KnotType::Unclassified;
    }
    let (p, q) = ((p / g).abs(), (q / g).abs());
    if p.min(q) <= 1 {
        KnotType::Unknot
    } else {
        KnotType::Torus { p, q }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotlines::trace::{trace_vector_field, TraceOptions};

    fn grid() -> GridSpec3 {
        GridSpec3::centered([16, 16, 8], [4.0, 4.0, 2.0]).unwrap()
    }

    fn torus_curve(p: f64, q: f64, n: usize) -> Vec<Vec3> {
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                let r = 1.0 + 0.4 * (q * t).cos();
                [r * (p * t).cos(), r * (p * t).sin(), 0.4 * (q * t).sin()]
            })
            .collect()
    }

    #[test]
    fn winding_count_oracle() {
        let frame = TorusFrame { center: [0.0; 3], axis: [0.0, 0.0, 1.0], major_radius: 1.0 };
        assert_eq!(classify_polygon(&torus_curve(2.0, 3.0, 600), &frame), KnotType::Torus { p: 2, q: 3 });
        assert_eq!(classify_polygon(&torus_curve(3.0, 2.0, 600), &frame), KnotType::Torus { p: 3, q: 2 });
        assert_eq!(classify_polygon(&torus_curve(4.0, 6.0, 900), &frame), KnotType::Torus { p: 2, q: 3 });
        assert_eq!(classify_polygon(&torus_curve(1.0, 1.0, 300), &frame), KnotType::Unknot);
        let fitted = fit_torus_frame(&torus_curve(2.0, 5.0, 800)).unwrap();
        assert!(norm(fitted.center) < 1e-3 && fitted.axis[2].abs() > 0.999 && (fitted.major_radius - 1.0).abs() < 0.05);
        assert_eq!(classify_polygon(&torus_curve(2.0, 5.0, 800), &fitted), KnotType::Torus { p: 2, q: 5 });
    }

    #[test]
    fn planar_circle_and_off_torus_curve() {
        let circle: Vec<Vec3> = (0..100).map(|k| {
            let t = 2.0 * PI * k as f64 / 100.0;
            [2.0 + 0.5 * t.cos(), 0.5 * t.sin(), 1.0]
        }).collect();
        let f = fit_torus_frame(&circle).unwrap();
        assert_eq!(classify_polygon(&circle, &f), KnotType::Unknot);
        let wobbly: Vec<Vec3> = (0..400).map(|k| {
            let t = 2.0 * PI * k as f64 / 400.0;
            let r = 1.0 + (0.2 + 0.15 * (t).sin()) * (3.0 * t).cos();
            [r * (2.0 * t).cos(), r * (2.0 * t).sin(), 0.3 * (3.0 * t).sin()]
        }).collect();
        let frame = TorusFrame { center: [0.0; 3], axis: [0.0, 0.0, 1.0], major_radius: 1.0 };
        assert_eq!(classify_polygon(&wobbly, &frame), KnotType::Unclassified);
    }

    #[test]
    fn torus_field_is_solenoidal() {
        let v = build_torus_field_with_rotation(1.5, grid()).unwrap();
        let f = v.closure().unwrap().clone();
        for p in crate::grid_forms::Sampler::Halton.points([-1.7; 3], [1.7; 3], 200) {
            assert!(crate::numdiff::divergence(|q| f(q), p, 1e-3).abs() < 1e-8);
        }
        assert!(matches!(build_invariant_torus_field(2, 4, grid()), Err(Error::NotCoprime { .. })));
        assert!(build_invariant_torus_field(1, 0, grid()).is_err());
    }

    #[test]
    fn traced_torus_knots() {
        let opts = TraceOptions { max_arc: 200.0, ..Default::default() };
        let trefoil = trace_vector_field(&build_invariant_torus_field(2, 3, grid()).unwrap(), resonant_seed(), &opts).unwrap();
        assert!(trefoil.closed);
        assert_eq!(torus_knot_classify(&trefoil, None), KnotType::Torus { p: 2, q: 3 });
        let ring = trace_vector_field(&build_invariant_torus_field(1, 1, grid()).unwrap(), resonant_seed(), &opts).unwrap();
        assert!(ring.closed);
        assert_eq!(torus_knot_classify(&ring, None), KnotType::Unknot);
        let diameter = 6.0f64;
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let dense = TraceOptions { max_arc: 64.0 * diameter, ..Default::default() };
        let control = trace_vector_field(&build_torus_field_with_rotation(golden, grid()).unwrap(), resonant_seed(), &dense).unwrap();
        assert!(!control.closed && (control.length() - 64.0 * diameter).abs() < 1e-9);
        assert_eq!(torus_knot_classify(&control, None), KnotType::Open);
    }
}
