use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::clebsch::ClebschData;
use crate::error::{Error, Result};
use crate::grid_forms::{gauss_legendre, GridSpec3};
use crate::linalg::{dot, norm, sub, Vec3};
use crate::numdiff;

/// A point of R^4 as `(x1, y1, x2, y2)`.
pub type Vec4 = [f64; 4];

const SPHERE_TOL: f64 = 1e-12;

fn on_sphere(p: Vec4) -> Result<()> {
    let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (r - 1.0).abs() > SPHERE_TOL {
        return Err(Error::OffSphere { norm: r });
    }
    Ok(())
}

/// `omega = sum_i (x_i dy_i - y_i dx_i)` in the basis `(dx1, dy1, dx2, dy2)`.
pub fn standard_contact_s3(p: Vec4) -> Result<Vec4> {
    on_sphere(p)?;
    Ok([-p[1], p[0], -p[3], p[2]])
}

/// `d omega = 2 (dx1 ^ dy1 + dx2 ^ dy2)` as an antisymmetric matrix.
pub fn standard_contact_s3_d() -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    m[0][1] = 2.0;
    m[1][0] = -2.0;
    m[2][3] = 2.0;
    m[3][2] = -2.0;
    m
}

fn two_form(m: &[[f64; 4]; 4], u: Vec4, v: Vec4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += m[i][j] * u[i] * v[j];
        }
    }
    s
}

fn dot4(a: Vec4, b: Vec4) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

/// Reeb field of the standard form: `omega(R) = 1`, `d omega(R, .) = 0`.
pub fn reeb_vector(p: Vec4) -> Result<Vec4> {
    on_sphere(p)?;
    Ok([-p[1], p[0], -p[3], p[2]])
}

/// Orthonormal basis `(u, i u)` of the contact plane at `p`, with `u = (-conj z1, conj z0)`.
pub fn contact_plane(p: Vec4) -> Result<(Vec4, Vec4)> {
    on_sphere(p)?;
    let u = [-p[2], p[3], p[0], -p[1]];
    let v = [-u[1], u[0], -u[3], u[2]];
    Ok((u, v))
}

/// `d omega` on the contact plane at `p`. With `(R, u, v)` orthonormal this is the Reeb
/// component of the 3-vector proxy of `d omega` restricted to the sphere.
pub fn nondegeneracy(p: Vec4) -> Result<f64> {
    let (u, v) = contact_plane(p)?;
    Ok(two_form(&standard_contact_s3_d(), u, v))
}

/// Fubini-Study density `(C / 2 pi) / (1 + |z|^2)^2` with `C = 2`, relative to `dRe z ^ dIm z`.
pub fn fubini_study_form(z: Complex64) -> f64 {
    fubini_study_with(z, 2.0)
}

fn fubini_study_with(z: Complex64, c: f64) -> f64 {
    let d = 1.0 + z.norm_sqr();
    c / (2.0 * PI) / (d * d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    pub c: Ratio<i64>,
    pub g: Ratio<i64>,
    pub c_numeric: f64,
    pub g_numeric: f64,
    /// Total of the cylindrical form `(1 / 4 pi) dphi ^ dz` over the sphere.
    pub cylindrical_total: f64,
    /// Total of the Fubini-Study form with the solved `C`, by quadrature over the plane.
    pub fubini_study_total: f64,
}

/// Solves for the constants making the Fubini-Study form a unit-total form and matching it to
/// the height chart.
///
/// With `u = 1 + r^2`, `int_0^inf r dr / (1 + r^2)^2 = (1/2) int_1^inf du / u^2 = 1/2`, so
/// `(C / 2 pi) 2 pi (1/2) = 1` fixes `C`. The chart relation `z / 2 = -1 / u + g` with the
/// height starting at `z = 0` where `u = 1` fixes `g`.
pub fn normalization_constants(nodes: usize) -> Result<NormalizationConstants> {
    if nodes < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 quadrature nodes, got {nodes}")));
    }
    // int_1^inf du / u^2 = [-1/u]_1^inf.
    let inv_u = |u: Option<i64>| u.map_or(Ratio::from_integer(0), |u| Ratio::new(1, u));
    let tail = inv_u(Some(1)) - inv_u(None);
    let radial = Ratio::new(1, 2) * tail;
    // (C / 2 pi) * 2 pi * radial = 1.
    let c = Ratio::from_integer(1) / radial;
    // z(u = 1) = 0 in z / 2 = -1/u + g.
    let g = inv_u(Some(1));

    // Same two integrals by Gauss-Legendre after mapping [0, 1) onto [0, inf).
    let radial_num = mapped_half_line(|r| r / ((1.0 + r * r) * (1.0 + r * r)), nodes);
    let c_numeric = 1.0 / radial_num;
    let rise = mapped_half_line(|s| 2.0 / ((1.0 + s) * (1.0 + s)), nodes);
    let g_numeric = 0.5 * rise;

    let cylindrical_total = 1.0 / (4.0 * PI) * (2.0 * PI) * (2.0 * g_numeric);
    let fubini_study_total = 2.0 * PI * mapped_half_line(|r| fubini_study_with(Complex64::new(r, 0.0), c_numeric) * r, nodes);
    Ok(NormalizationConstants { c, g, c_numeric, g_numeric, cylindrical_total, fubini_study_total })
}

/// `int_0^inf f` through `x = t / (1 - t)`.
fn mapped_half_line(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let t = 0.5 * (xi + 1.0);
            let s = 1.0 - t;
            0.5 * wi * f(t / s) / (s * s)
        })
        .sum()
}

/// Point of S^3 over `z = tan(theta / 2) e^{i phi}` with fiber angle `psi`, in the chart
/// `z = z0 / z1`.
pub fn hopf_chart(theta: f64, phi: f64, psi: f64) -> Vec4 {
    let (s, c) = ((0.5 * theta).sin(), (0.5 * theta).cos());
    [s * (phi + psi).cos(), s * (phi + psi).sin(), c * psi.cos(), c * psi.sin()]
}

/// `z0 / z1`, or `z1 / z0` in the opposite chart. The form is invariant under `z -> 1 / z`.
fn hopf_z(p: Vec4, flipped: bool) -> Complex64 {
    let (z0, z1) = (Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]));
    if flipped {
        z1 / z0
    } else {
        z0 / z1
    }
}

/// Pushforward of a tangent vector through the chart by extrapolated central differences.
fn push(p: Vec4, t: Vec4, h: f64, flipped: bool) -> Complex64 {
    let at = |s: f64| hopf_z([p[0] + s * t[0], p[1] + s * t[1], p[2] + s * t[2], p[3] + s * t[3]], flipped);
    let d = |h: f64| (at(h) - at(-h)) / (2.0 * h);
    (d(0.5 * h) * 4.0 - d(h)) / 3.0
}

/// Pullback of the normalized area form through the Hopf map, evaluated on `(u, v)` at `p`.
/// Uses whichever of the charts `z0 / z1`, `z1 / z0` keeps `|z| <= 1`.
pub fn pullback_area(p: Vec4, u: Vec4, v: Vec4) -> f64 {
    let flipped = p[0].hypot(p[1]) > p[2].hypot(p[3]);
    let (a, b) = (push(p, u, 1e-3, flipped), push(p, v, 1e-3, flipped));
    fubini_study_form(hopf_z(p, flipped)) * (a.re * b.im - a.im * b.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackConsistency {
    /// `sup |d omega - 2 pi pi^* F| / |d omega|` on the contact planes of the chart samples.
    pub deviation: f64,
    /// Integral of the normalized form over the sphere, pulled back to the `(theta, phi)` chart.
    pub sphere_total: f64,
    pub samples: usize,
}

/// Compares `d omega` of the standard form with the pulled-back area form on a
/// `resolution x resolution` chart of S^2 (polar caps of width `pi / (4 resolution)` excluded),
/// at several fiber angles.
pub fn pullback_consistency_check(resolution: usize) -> Result<PullbackConsistency> {
    if resolution < 32 {
        return Err(Error::InvalidArgument(format!("chart resolution must be at least 32, got {resolution}")));
    }
    let eps = PI / (4.0 * resolution as f64);
    let n = resolution;
    let mut deviation: f64 = 0.0;
    let mut samples = 0;
    for i in 0..n {
        let theta = eps + (PI - 2.0 * eps) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = 2.0 * PI * j as f64 / n as f64;
            for psi in [0.0, 1.3, 4.1] {
                let p = hopf_chart(theta, phi, psi);
                let (u, v) = contact_plane(p)?;
                let dw = two_form(&standard_contact_s3_d(), u, v);
                let pf = pullback_area(p, u, v);
                deviation = deviation.max((dw - 2.0 * PI * pf).abs() / dw.abs());
                samples += 1;
            }
        }
    }

    // F(d_theta z, d_phi z) over the full chart.
    let (x, w) = gauss_legendre(n);
    let mut sphere_total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let theta = 0.5 * PI * (xi + 1.0);
        let z = Complex64::from_polar((0.5 * theta).tan(), 0.0);
        let dz_theta = Complex64::new(0.5 / (0.5 * theta).cos().powi(2), 0.0);
        let dz_phi = Complex64::i() * z;
        let f = fubini_study_form(z) * (dz_theta.re * dz_phi.im - dz_theta.im * dz_phi.re);
        sphere_total += 0.5 * PI * wi * f * 2.0 * PI;
    }
    Ok(PullbackConsistency { deviation, sphere_total, samples })
}

/// `sup_p |J(p)^T omega(map(p)) - rho(p) omega(p)| / |omega(p)|` over `points`.
pub fn contactomorphism_check(
    map: &dyn Fn(Vec3) -> Vec3,
    rho: &dyn Fn(Vec3) -> f64,
    data: &ClebschData,
    points: &[Vec3],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &p in points {
        let r = rho(p);
        if r == 0.0 || !r.is_finite() {
            return Err(Error::VanishingConformalFactor(p));
        }
        let pulled = pullback_one_form(map, data, p)?;
        let (omega, _) = data.forms(p)?;
        let scaled = [r * omega[0], r * omega[1], r * omega[2]];
        let base = norm(omega);
        if base == 0.0 {
            return Err(Error::InvalidArgument(format!("contact form vanishes at {p:?}")));
        }
        worst = worst.max(norm(sub(pulled, scaled)) / base);
    }
    Ok(worst)
}

/// `J(p)^T omega(map(p))`.
pub fn pullback_one_form(map: &dyn Fn(Vec3) -> Vec3, data: &ClebschData, p: Vec3) -> Result<Vec3> {
    let j = numdiff::jacobian(map, p, data.step);
    let (w, _) = data.forms(map(p))?;
    Ok([0, 1, 2].map(|c| (0..3).map(|r| j[r][c] * w[r]).sum()))
}

/// Density `omega' . curl omega'` of the pulled-back form at `p`.
pub fn pullback_contact_density(map: &dyn Fn(Vec3) -> Vec3, data: &ClebschData, p: Vec3) -> Result<f64> {
    let omega = pullback_one_form(map, data, p)?;
    let h = 4.0 * data.step;
    let curl = numdiff::curl(|q| pullback_one_form(map, data, q).unwrap_or([f64::NAN; 3]), p, h);
    let d = dot(omega, curl);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::UndefinedClosure(p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ContactDomain {
    /// Node sum of `omega . d omega` times the cell volume.
    Box(GridSpec3),
    /// The data pulled back to S^3 by stereographic projection from `(0, 0, 0, 1)` at the given
    /// length scale, integrated in Hopf coordinates with `eta_nodes` Gauss-Legendre nodes and
    /// `xi_nodes` trapezoid nodes per angle.
    S3 { scale: f64, eta_nodes: usize, xi_nodes: usize },
}

/// Hopf coordinates `(xi1, eta, xi2)` on S^3, `eta` in `[0, pi / 2]`.
pub fn hopf_coordinates(xi1: f64, eta: f64, xi2: f64) -> Vec4 {
    [eta.cos() * xi1.cos(), eta.cos() * xi1.sin(), eta.sin() * xi2.cos(), eta.sin() * xi2.sin()]
}

fn hopf_frame(xi1: f64, eta: f64, xi2: f64) -> [Vec4; 3] {
    let (se, ce) = eta.sin_cos();
    [
        [-ce * xi1.sin(), ce * xi1.cos(), 0.0, 0.0],
        [-se * xi1.cos(), -se * xi1.sin(), ce * xi2.cos(), ce * xi2.sin()],
        [0.0, 0.0, -se * xi2.sin(), se * xi2.cos()],
    ]
}

fn s3_quadrature(eta_nodes: usize, xi_nodes: usize, mut density: impl FnMut(f64, f64, f64) -> Result<f64>) -> Result<f64> {
    if eta_nodes < 2 || xi_nodes < 2 {
        return Err(Error::InvalidArgument("S^3 quadrature needs at least 2 nodes per coordinate".into()));
    }
    let (x, w) = gauss_legendre(eta_nodes);
    let dxi = 2.0 * PI / xi_nodes as f64;
    let mut total = 0.0;
    for (xe, we) in x.iter().zip(&w) {
        let eta = 0.25 * PI * (xe + 1.0);
        let mut ring = 0.0;
        for a in 0..xi_nodes {
            for b in 0..xi_nodes {
                ring += density(a as f64 * dxi, eta, b as f64 * dxi)?;
            }
        }
        total += 0.25 * PI * we * ring * dxi * dxi;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct S3Helicity {
    /// `int omega ^ d omega` of the standard form, oriented by `(d xi1, d eta, d xi2)`.
    pub raw: f64,
    /// The same for `omega / 2 pi`, whose `d` is the pulled-back unit-area form.
    pub normalized: f64,
}

/// Helicity of the standard contact form of S^3 in Hopf coordinates.
pub fn helicity_s3_standard(eta_nodes: usize, xi_nodes: usize) -> Result<S3Helicity> {
    let dw = standard_contact_s3_d();
    let raw = s3_quadrature(eta_nodes, xi_nodes, |xi1, eta, xi2| {
        let p = hopf_coordinates(xi1, eta, xi2);
        let w = standard_contact_s3(hopf_renormalize(p))?;
        let [t1, t2, t3] = hopf_frame(xi1, eta, xi2);
        Ok(dot4(w, t1) * two_form(&dw, t2, t3) - dot4(w, t2) * two_form(&dw, t1, t3) + dot4(w, t3) * two_form(&dw, t1, t2))
    })?;
    Ok(S3Helicity { raw, normalized: raw / (4.0 * PI * PI) })
}

fn hopf_renormalize(p: Vec4) -> Vec4 {
    let r = dot4(p, p).sqrt();
    p.map(|x| x / r)
}

/// Stereographic projection from `(0, 0, 0, 1)` onto space with length `scale`.
pub fn stereographic(p: Vec4, scale: f64) -> Vec3 {
    let d = 1.0 - p[3];
    [scale * p[0] / d, scale * p[1] / d, scale * p[2] / d]
}

/// `int omega ^ d omega` of the Clebsch 1-form over `domain`.
pub fn helicity_contact(data: &ClebschData, domain: &ContactDomain) -> Result<f64> {
    match *domain {
        ContactDomain::Box(grid) => {
            let mut values = Vec::with_capacity(grid.len());
            for p in grid.nodes() {
                let (w, dw) = data.forms(p)?;
                values.push(dot(w, dw));
            }
            Ok(crate::linalg::pairwise_sum(&values) * grid.cell_volume())
        }
        ContactDomain::S3 { scale, eta_nodes, xi_nodes } => {
            if !(scale > 0.0) {
                return Err(Error::NonPositive { what: "scale", value: scale });
            }
            s3_quadrature(eta_nodes, xi_nodes, |xi1, eta, xi2| {
                let x = stereographic(hopf_coordinates(xi1, eta, xi2), scale);
                let (w, dw) = data.forms(x)?;
                let chart = |c: Vec3| stereographic(hopf_coordinates(c[0], c[1], c[2]), scale);
                let j = numdiff::jacobian(chart, [xi1, eta, xi2], 1e-4);
                Ok(dot(w, dw) * crate::linalg::det3(&j))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::clebsch::{hopfion_clebsch, ClebschPair};
    use crate::grid_forms::{Sampler, ScalarClosure};
    use std::sync::Arc;

    fn sphere_samples(n: usize) -> Vec<Vec4> {
        Sampler::Random(11)
            .points([0.0; 3], [2.0 * PI, 0.5 * PI, 2.0 * PI], n)
            .into_iter()
            .map(|c| hopf_renormalize(hopf_coordinates(c[0], c[1], c[2])))
            .collect()
    }

    #[test]
    fn standard_form_values() {
        assert_eq!(standard_contact_s3([1.0, 0.0, 0.0, 0.0]).unwrap(), [0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(standard_contact_s3([0.9, 0.0, 0.0, 0.0]), Err(Error::OffSphere { .. })));
        for p in sphere_samples(200) {
            let w = standard_contact_s3(p).unwrap();
            assert!(dot4(w, p).abs() < 1e-15);
            let r = reeb_vector(p).unwrap();
            assert!((dot4(w, r) - 1.0).abs() < 1e-14);
            // Reeb contracts d omega to zero.
            let dw = standard_contact_s3_d();
            for e in [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.3, -0.2, 0.5, 0.1]] {
                let c = dot4(e, p);
                let e = [0, 1, 2, 3].map(|i| e[i] - c * p[i]);
                assert!(two_form(&dw, r, e).abs() < 1e-14);
            }
            assert!((nondegeneracy(p).unwrap() - 2.0).abs() < 1e-14);
            let (u, v) = contact_plane(p).unwrap();
            assert!(dot4(u, p).abs() < 1e-15 && dot4(v, p).abs() < 1e-15 && dot4(u, r).abs() < 1e-15);
        }
    }

    #[test]
    fn fubini_study_profile() {
        let z0 = fubini_study_form(Complex64::new(0.0, 0.0));
        assert!((z0 - 1.0 / PI).abs() < 1e-16);
        let far = fubini_study_form(Complex64::new(1e3, 0.0));
        assert!((far * 1e12 * PI - 1.0).abs() < 1e-5);
        assert!(fubini_study_form(Complex64::new(0.3, 0.4)) < z0);
    }

    #[test]
    fn normalization_constants_are_exact() {
        let k = normalization_constants(64).unwrap();
        assert_eq!(k.c, Ratio::from_integer(2));
        assert_eq!(k.g, Ratio::from_integer(1));
        assert!((k.c_numeric - 2.0).abs() < 1e-10 && (k.g_numeric - 1.0).abs() < 1e-10, "{k:?}");
        assert!((k.cylindrical_total - 1.0).abs() < 1e-10 && (k.fubini_study_total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pullback_matches_hand_value() {
        // At (0, 0, 1, 0): z = z0, u = (-1, 0), so pi^* F(u, i u) = F(0) = 1 / pi.
        let p = [0.0, 0.0, 1.0, 0.0];
        let (u, v) = contact_plane(p).unwrap();
        assert!((pullback_area(p, u, v) - 1.0 / PI).abs() < 1e-12);
        let r = pullback_consistency_check(32).unwrap();
        assert!(r.deviation < 1e-8, "{r:?}");
        assert!((r.sphere_total - 1.0).abs() < 1e-10);
        assert!(pullback_consistency_check(16).is_err());
    }

    fn sc(f: impl Fn(Vec3) -> f64 + Send + Sync + 'static) -> ScalarClosure {
        Arc::new(f)
    }

    fn standard_r3() -> ClebschData {
        ClebschData::new(Some(sc(|p| p[1])), vec![ClebschPair::new(sc(|p| p[2]), sc(|p| p[0]))]).unwrap()
    }

    #[test]
    fn contactomorphisms() {
        let data = standard_r3();
        let pts = Sampler::Halton.points([-1.0; 3], [1.0; 3], 50);
        assert!(contactomorphism_check(&|p| p, &|_| 1.0, &data, &pts).unwrap() < 1e-12);
        // (q, S, p) -> (q, 2S, 2p) doubles dS + p dq.
        let scale = |p: Vec3| [p[0], 2.0 * p[1], 2.0 * p[2]];
        assert!(contactomorphism_check(&scale, &|_| 2.0, &data, &pts).unwrap() < 1e-10);
        assert!(contactomorphism_check(&scale, &|_| 1.0, &data, &pts).unwrap() > 0.5);
        assert!(matches!(
            contactomorphism_check(&|p| p, &|p| p[0], &data, &[[0.0, 0.5, 0.5]]),
            Err(Error::VanishingConformalFactor(_))
        ));
        // The density sign survives.
        for &p in &pts {
            let base = super::super::clebsch::contact_form(&data, p).unwrap().density;
            let moved = pullback_contact_density(&scale, &data, p).unwrap();
            assert!(base.signum() == moved.signum() && (moved - 4.0 * base).abs() < 1e-6);
        }
    }

    #[test]
    fn doubling_the_form_doubles_d_omega() {
        let one = standard_r3();
        let two = ClebschData::new(Some(sc(|p| 2.0 * p[1])), vec![ClebschPair::new(sc(|p| 2.0 * p[2]), sc(|p| p[0]))]).unwrap();
        for p in Sampler::Halton.points([-1.0; 3], [1.0; 3], 20) {
            let (a, b) = (one.forms(p).unwrap(), two.forms(p).unwrap());
            assert!(norm(sub(b.1, [2.0 * a.1[0], 2.0 * a.1[1], 2.0 * a.1[2]])) < 1e-12);
        }
    }

    #[test]
    fn s3_helicity() {
        let h = helicity_s3_standard(16, 16).unwrap();
        assert!((h.raw - 4.0 * PI * PI).abs() < 1e-10 && (h.normalized - 1.0).abs() < 1e-12, "{h:?}");
        let data = hopfion_clebsch(1.0).unwrap();
        let pulled = helicity_contact(&data, &ContactDomain::S3 { scale: 1.0, eta_nodes: 24, xi_nodes: 24 }).unwrap();
        assert!((pulled.abs() - 1.0).abs() < 1e-6, "{pulled}");
    }
}
