//! Fields pulled back from the normalized area form of the Riemann sphere by complex maps
//! `z : R^3 -> C`, the Hopf maps in particular.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::EMField;
use crate::error::{Error, Result};
use crate::grid_forms::{GridSpec3, Signature};
use crate::linalg::{dot, norm, Vec3};
use crate::numdiff;

/// `z = num / den` together with the gradients of numerator and denominator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homogeneous {
    pub num: Complex64,
    pub den: Complex64,
    pub grad_num: [Complex64; 3],
    pub grad_den: [Complex64; 3],
}

pub trait ComplexMap: Send + Sync {
    fn homogeneous(&self, p: Vec3) -> Homogeneous;

    fn value(&self, p: Vec3) -> Complex64 {
        let h = self.homogeneous(p);
        h.num / h.den
    }
}

/// The Hopf map composed with inverse stereographic projection, in homogeneous form
/// `P = 2(u0 + i u1)`, `Q = 2 u2 + i(|u|^2 - 1)` with `u = p / scale`.
/// `shift` cyclically permutes the coordinates `(x, y, z) -> (y, z, x)` that many times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfMap {
    pub scale: f64,
    pub shift: usize,
}

impl HopfMap {
    pub fn magnetic(scale: f64) -> Self {
        Self { scale, shift: 0 }
    }

    /// The second map, obtained by one cyclic permutation of the coordinates.
    pub fn electric(scale: f64) -> Self {
        Self { scale, shift: 1 }
    }
}

impl ComplexMap for HopfMap {
    fn homogeneous(&self, p: Vec3) -> Homogeneous {
        let s = self.scale;
        let u = p.map(|x| x / s);
        let r2 = dot(u, u);
        let ax = [self.shift % 3, (self.shift + 1) % 3, (self.shift + 2) % 3];
        let num = Complex64::new(2.0 * u[ax[0]], 2.0 * u[ax[1]]);
        let den = Complex64::new(2.0 * u[ax[2]], r2 - 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut grad_num = [zero; 3];
        grad_num[ax[0]] = Complex64::new(2.0 / s, 0.0);
        grad_num[ax[1]] = Complex64::new(0.0, 2.0 / s);
        let mut grad_den = [0, 1, 2].map(|a| Complex64::new(0.0, 2.0 * u[a] / s));
        grad_den[ax[2]] += 2.0 / s;
        Homogeneous { num, den, grad_num, grad_den }
    }
}

/// `m(R p)` with `R = diag(-1, 1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reflected<M>(pub M);

impl<M: ComplexMap> ComplexMap for Reflected<M> {
    fn homogeneous(&self, p: Vec3) -> Homogeneous {
        let mut h = self.0.homogeneous([-p[0], p[1], p[2]]);
        h.grad_num[0] = -h.grad_num[0];
        h.grad_den[0] = -h.grad_den[0];
        h
    }
}

/// An arbitrary closure `z(p)`, differentiated numerically.
pub struct FnMap<F>(pub F);

impl<F: Fn(Vec3) -> Complex64 + Send + Sync> ComplexMap for FnMap<F> {
    fn homogeneous(&self, p: Vec3) -> Homogeneous {
        let re = numdiff::gradient(|q| (self.0)(q).re, p, numdiff::DEFAULT_STEP);
        let im = numdiff::gradient(|q| (self.0)(q).im, p, numdiff::DEFAULT_STEP);
        Homogeneous {
            num: (self.0)(p),
            den: Complex64::new(1.0, 0.0),
            grad_num: [0, 1, 2].map(|a| Complex64::new(re[a], im[a])),
            grad_den: [Complex64::new(0.0, 0.0); 3],
        }
    }
}

/// Vector proxy of the pullback of `(i / 2 pi) dz ^ dz* / (1 + |z|^2)^2`.
///
/// With `z = P / Q` and `a = Q grad P - P grad Q` this is `Im(a* x a) / (2 pi (|P|^2 + |Q|^2)^2)`,
/// which stays finite where `Q = 0`.
pub fn pullback_area_form(map: &dyn ComplexMap, p: Vec3) -> Result<Vec3> {
    let h = map.homogeneous(p);
    let a: [Complex64; 3] = [0, 1, 2].map(|i| h.den * h.grad_num[i] - h.num * h.grad_den[i]);
    let c = a.map(|z| z.conj());
    let cross = [c[1] * a[2] - c[2] * a[1], c[2] * a[0] - c[0] * a[2], c[0] * a[1] - c[1] * a[0]];
    let w = h.num.norm_sqr() + h.den.norm_sqr();
    let denom = 2.0 * PI * w * w;
    let out = cross.map(|z| z.im / denom);
    if denom == 0.0 || out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteMap(p));
    }
    Ok(out)
}

fn hopf_closures(magnetic: impl ComplexMap + 'static, electric: impl ComplexMap + 'static) -> (crate::grid_forms::VectorClosure, crate::grid_forms::VectorClosure) {
    let b = Arc::new(move |p: Vec3| pullback_area_form(&magnetic, p).unwrap_or([f64::NAN; 3]));
    let e = Arc::new(move |p: Vec3| pullback_area_form(&electric, p).map(|v| v.map(|x| -x)).unwrap_or([f64::NAN; 3]));
    (e, b)
}

/// The Hopfion: `B` is the pullback through the Hopf map, `E` is minus the pullback through the
/// cyclically permuted map, so that `(E, B)` is the pair `(E(phi), B(phi))` of a dyon pair.
pub fn build_hopfion(grid: GridSpec3, scale: f64) -> Result<EMField> {
    if !(scale > 0.0) {
        return Err(Error::NonPositive { what: "scale", value: scale });
    }
    let (e, b) = hopf_closures(HopfMap::magnetic(scale), HopfMap::electric(scale));
    Ok(EMField::from_closures(grid, e, b, Signature::Minkowski))
}

/// Mirror image of the Hopfion under `x -> -x`; its field lines link with the opposite sign.
pub fn build_mirror_hopfion(grid: GridSpec3, scale: f64) -> Result<EMField> {
    if !(scale > 0.0) {
        return Err(Error::NonPositive { what: "scale", value: scale });
    }
    let (e, b) = hopf_closures(Reflected(HopfMap::magnetic(scale)), Reflected(HopfMap::electric(scale)));
    Ok(EMField::from_closures(grid, e, b, Signature::Minkowski))
}

/// Two complex maps and the four fields they define. `B(m)` is the pulled-back area form;
/// the electric fields are fixed by `E(phi) = -B(theta)` and `E(theta) = B(phi)`.
#[derive(Clone)]
pub struct DyonPair {
    theta: Arc<dyn ComplexMap>,
    phi: Arc<dyn ComplexMap>,
    grid: GridSpec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyonFields {
    pub b_theta: Vec3,
    pub e_theta: Vec3,
    pub b_phi: Vec3,
    pub e_phi: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyonResiduals {
    /// `|B(theta).E(theta) + B(phi).E(phi)|`, relative.
    pub mixed: f64,
    /// `|B(theta)^2 - E(phi)^2|`, relative.
    pub theta_phi: f64,
    /// `|B(phi)^2 - E(theta)^2|`, relative.
    pub phi_theta: f64,
    /// Nullness of the physical pair `(E(phi), B(phi))`: `|B(theta).B(phi)|` and `||B(theta)|^2 - |B(phi)|^2|`.
    pub null_dot: f64,
    pub null_norm: f64,
}

pub fn build_dyon_pair(theta: Arc<dyn ComplexMap>, phi: Arc<dyn ComplexMap>, grid: GridSpec3) -> Result<DyonPair> {
    for p in grid.nodes() {
        pullback_area_form(theta.as_ref(), p)?;
        pullback_area_form(phi.as_ref(), p)?;
    }
    Ok(DyonPair { theta, phi, grid })
}

impl DyonPair {
    pub fn hopf(grid: GridSpec3, scale: f64) -> Result<Self> {
        build_dyon_pair(Arc::new(HopfMap::electric(scale)), Arc::new(HopfMap::magnetic(scale)), grid)
    }

    pub fn grid(&self) -> &GridSpec3 {
        &self.grid
    }

    pub fn swapped(&self) -> DyonPair {
        DyonPair { theta: self.phi.clone(), phi: self.theta.clone(), grid: self.grid }
    }

    pub fn fields(&self, p: Vec3) -> Result<DyonFields> {
        let b_theta = pullback_area_form(self.theta.as_ref(), p)?;
        let b_phi = pullback_area_form(self.phi.as_ref(), p)?;
        Ok(DyonFields { b_theta, e_theta: b_phi, b_phi, e_phi: b_theta.map(|x| -x) })
    }

    /// Sup of the pairing identities and of the nullness of `(E(phi), B(phi))` over `points`.
    pub fn residuals(&self, points: &[Vec3]) -> Result<DyonResiduals> {
        let mut r = DyonResiduals { mixed: 0.0, theta_phi: 0.0, phi_theta: 0.0, null_dot: 0.0, null_norm: 0.0 };
        for &p in points {
            let f = self.fields(p)?;
            let scale = dot(f.b_theta, f.b_theta) + dot(f.b_phi, f.b_phi);
            if scale == 0.0 {
                continue;
            }
            r.mixed = r.mixed.max((dot(f.b_theta, f.e_theta) + dot(f.b_phi, f.e_phi)).abs() / scale);
            r.theta_phi = r.theta_phi.max((dot(f.b_theta, f.b_theta) - dot(f.e_phi, f.e_phi)).abs() / scale);
            r.phi_theta = r.phi_theta.max((dot(f.b_phi, f.b_phi) - dot(f.e_theta, f.e_theta)).abs() / scale);
            let nb = norm(f.b_theta) * norm(f.b_phi);
            if nb > 0.0 {
                r.null_dot = r.null_dot.max(dot(f.b_theta, f.b_phi).abs() / nb);
            }
            r.null_norm = r.null_norm.max((dot(f.b_theta, f.b_theta) - dot(f.b_phi, f.b_phi)).abs() / scale);
        }
        Ok(r)
    }

    /// The physical field `(E(phi), B(phi))` sampled on the pair's grid.
    pub fn em_field(&self) -> EMField {
        let theta = self.theta.clone();
        let phi = self.phi.clone();
        let e = Arc::new(move |p: Vec3| {
            pullback_area_form(theta.as_ref(), p).map(|v| v.map(|x| -x)).unwrap_or([f64::NAN; 3])
        });
        let b = Arc::new(move |p: Vec3| pullback_area_form(phi.as_ref(), p).unwrap_or([f64::NAN; 3]));
        EMField::from_closures(self.grid, e, b, Signature::Minkowski)
    }
}
