//! Antisymmetric rank-2 tensors at a point of a 4D chart (index 0 is time).
//!
//! Components are stored as `(F01, F02, F03, F23, F13, F12)`. Magnetic components
//! follow `-B1 = F23`, `B2 = F13`, `-B3 = F12` in both signatures. The electric
//! block is `E_a = F0a` for Minkowski signature and `E_a = -F0a` for Euclidean
//! signature, where the potential convention `E = -dA/dt` with `F0a = dA_a/dt` applies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    /// `g = diag(1, -1, -1, -1)`.
    Minkowski,
    /// `g = diag(1, 1, 1, 1)`.
    Euclidean,
}

impl Signature {
    fn metric(self) -> [f64; 4] {
        match self {
            Signature::Minkowski => [1.0, -1.0, -1.0, -1.0],
            Signature::Euclidean => [1.0; 4],
        }
    }
}

/// Storage order of the six independent components.
pub const COMPONENT_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (1, 3), (1, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourForm2 {
    pub components: [f64; 6],
    pub signature: Signature,
}

impl FourForm2 {
    pub fn new(components: [f64; 6], signature: Signature) -> Self {
        Self { components, signature }
    }

    pub fn zero(signature: Signature) -> Self {
        Self::new([0.0; 6], signature)
    }

    /// Builds the form carrying the given electric and magnetic vectors.
    pub fn from_eb(e: Vec3, b: Vec3, signature: Signature) -> Self {
        let s = electric_sign(signature);
        Self::new([s * e[0], s * e[1], s * e[2], -b[0], b[1], -b[2]], signature)
    }

    pub fn electric(&self) -> Vec3 {
        let s = electric_sign(self.signature);
        let c = &self.components;
        [s * c[0], s * c[1], s * c[2]]
    }

    pub fn magnetic(&self) -> Vec3 {
        let c = &self.components;
        [-c[3], c[4], -c[5]]
    }

    /// Full antisymmetric 4x4 matrix `F_ij` with lower indices.
    pub fn tensor(&self) -> [[f64; 4]; 4] {
        let mut t = [[0.0; 4]; 4];
        for (&(i, j), &v) in COMPONENT_PAIRS.iter().zip(&self.components) {
            t[i][j] = v;
            t[j][i] = -v;
        }
        t
    }

    pub fn from_tensor(t: &[[f64; 4]; 4], signature: Signature) -> Self {
        let mut c = [0.0; 6];
        for (slot, &(i, j)) in c.iter_mut().zip(COMPONENT_PAIRS.iter()) {
            *slot = t[i][j];
        }
        Self::new(c, signature)
    }

    /// `(*F)_ij = 1/2 eps_ijlm F^lm` with `eps_0123 = 1`, indices raised by the signature metric.
    pub fn hodge_star(&self) -> FourForm2 {
        let g = self.signature.metric();
        let f = self.tensor();
        let mut raised = [[0.0; 4]; 4];
        for l in 0..4 {
            for m in 0..4 {
                raised[l][m] = g[l] * g[m] * f[l][m];
            }
        }
        let mut star = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for l in 0..4 {
                    for m in 0..4 {
                        acc += levi_civita([i, j, l, m]) * raised[l][m];
                    }
                }
                star[i][j] = 0.5 * acc;
            }
        }
        FourForm2::from_tensor(&star, self.signature)
    }

    pub fn add(&self, other: &FourForm2) -> FourForm2 {
        let mut c = self.components;
        for (a, b) in c.iter_mut().zip(&other.components) {
            *a += b;
        }
        FourForm2::new(c, self.signature)
    }

    pub fn scale(&self, s: f64) -> FourForm2 {
        FourForm2::new(self.components.map(|c| c * s), self.signature)
    }

    pub fn max_abs_diff(&self, other: &FourForm2) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Anti-self-duality written componentwise: `F01 = -F23`, `F02 = -F31`, `F03 = -F12`.
    pub fn is_anti_self_dual_componentwise(&self, tol: f64) -> bool {
        let c = &self.components;
        // F31 = -F13.
        (c[0] + c[3]).abs() <= tol && (c[1] - c[4]).abs() <= tol && (c[2] + c[5]).abs() <= tol
    }
}

fn electric_sign(signature: Signature) -> f64 {
    match signature {
        Signature::Minkowski => 1.0,
        Signature::Euclidean => -1.0,
    }
}

fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut p = idx;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..4 {
        while p[i] != i {
            let t = p[i];
            p.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// Result of splitting a 2-form into its `*`-eigenparts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DualitySplit {
    /// Euclidean: `F+ = (F + *F)/2`, `F- = (F - *F)/2`, with `*F+ = F+` and `*F- = -F-`.
    Real { plus: FourForm2, minus: FourForm2 },
    /// Minkowski: `*` squares to -1, so the eigenparts `F+- = (F -+ i*F)/2` are complex,
    /// with `*F+ = iF+` and `*F- = -iF-`.
    Complex { plus: [Complex64; 6], minus: [Complex64; 6] },
}

pub fn sd_asd_split(f: &FourForm2) -> DualitySplit {
    let star = f.hodge_star();
    match f.signature {
        Signature::Euclidean => DualitySplit::Real {
            plus: f.add(&star).scale(0.5),
            minus: f.add(&star.scale(-1.0)).scale(0.5),
        },
        Signature::Minkowski => {
            let mut plus = [Complex64::new(0.0, 0.0); 6];
            let mut minus = plus;
            for k in 0..6 {
                plus[k] = Complex64::new(0.5 * f.components[k], -0.5 * star.components[k]);
                minus[k] = Complex64::new(0.5 * f.components[k], 0.5 * star.components[k]);
            }
            DualitySplit::Complex { plus, minus }
        }
    }
}

/// Hodge star applied to a complex combination of real forms (linear extension).
pub fn hodge_star_complex(c: &[Complex64; 6], signature: Signature) -> [Complex64; 6] {
    let re = FourForm2::new(c.map(|z| z.re), signature).hodge_star();
    let im = FourForm2::new(c.map(|z| z.im), signature).hodge_star();
    let mut out = [Complex64::new(0.0, 0.0); 6];
    for k in 0..6 {
        out[k] = Complex64::new(re.components[k], im.components[k]);
    }
    out
}

/// The 3+1 split of a 2-form: the time block as a 1-form `phi` and the spatial
/// block as a 2-form identified with its vector proxy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeSplit {
    /// `phi_i` with `F = phi ^ dt + ...`, i.e. `F0i = -phi_i`.
    pub phi: Vec3,
    /// Spatial block `(F23, F31, F12)`.
    pub spatial: Vec3,
}

pub fn hodge3_project(f: &FourForm2) -> SpaceTimeSplit {
    let c = &f.components;
    SpaceTimeSplit { phi: [-c[0], -c[1], -c[2]], spatial: [c[3], -c[4], c[5]] }
}

/// `Phi = phi ^ dt + *3 phi` as a Euclidean 2-form; always anti-self-dual.
pub fn assemble_from_phi(phi: Vec3) -> FourForm2 {
    // *3 phi = phi1 dy2^dy3 + phi2 dy3^dy1 + phi3 dy1^dy2.
    FourForm2::new([-phi[0], -phi[1], -phi[2], phi[0], -phi[1], phi[2]], Signature::Euclidean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(sig: Signature) -> impl Strategy<Value = FourForm2> {
        prop::array::uniform6(-10.0f64..10.0).prop_map(move |c| FourForm2::new(c, sig))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn minkowski_star_squares_to_minus_one(f in form(Signature::Minkowski)) {
            prop_assert_eq!(f.hodge_star().hodge_star(), f.scale(-1.0));
        }

        #[test]
        fn euclidean_star_squares_to_one(f in form(Signature::Euclidean)) {
            prop_assert_eq!(f.hodge_star().hodge_star(), f);
        }

        #[test]
        fn euclidean_split_is_exact_projection(f in form(Signature::Euclidean)) {
            let DualitySplit::Real { plus, minus } = sd_asd_split(&f) else { panic!() };
            prop_assert!(plus.add(&minus).max_abs_diff(&f) < 1e-14);
            prop_assert!(plus.hodge_star().max_abs_diff(&plus) < 1e-14);
            prop_assert!(minus.hodge_star().max_abs_diff(&minus.scale(-1.0)) < 1e-14);
            let DualitySplit::Real { plus: pp, minus: pm } = sd_asd_split(&plus) else { panic!() };
            prop_assert!(pp.max_abs_diff(&plus) < 1e-14);
            prop_assert!(pm.components.iter().all(|c| c.abs() < 1e-14));
            prop_assert!(minus.is_anti_self_dual_componentwise(1e-13));
        }

        #[test]
        fn minkowski_split_eigenparts(f in form(Signature::Minkowski)) {
            let DualitySplit::Complex { plus, minus } = sd_asd_split(&f) else { panic!() };
            let i = Complex64::new(0.0, 1.0);
            let sp = hodge_star_complex(&plus, Signature::Minkowski);
            let sm = hodge_star_complex(&minus, Signature::Minkowski);
            for k in 0..6 {
                prop_assert!((sp[k] - i * plus[k]).norm() < 1e-13);
                prop_assert!((sm[k] + i * minus[k]).norm() < 1e-13);
                prop_assert!(((plus[k] + minus[k]).re - f.components[k]).abs() < 1e-14);
            }
        }

        #[test]
        fn assembled_phi_form_is_anti_self_dual(phi in prop::array::uniform3(-5.0f64..5.0)) {
            let big_phi = assemble_from_phi(phi);
            prop_assert_eq!(big_phi.hodge_star(), big_phi.scale(-1.0));
            prop_assert!(big_phi.is_anti_self_dual_componentwise(0.0));
            let split = hodge3_project(&big_phi);
            prop_assert_eq!(split.phi, phi);
            prop_assert_eq!(split.spatial, phi);
            // -E = B for the assembled form.
            let e = big_phi.electric();
            let b = big_phi.magnetic();
            for a in 0..3 {
                prop_assert_eq!(-e[a], b[a]);
            }
        }

        #[test]
        fn eb_round_trip(e in prop::array::uniform3(-5.0f64..5.0), b in prop::array::uniform3(-5.0f64..5.0)) {
            for sig in [Signature::Minkowski, Signature::Euclidean] {
                let f = FourForm2::from_eb(e, b, sig);
                prop_assert_eq!(f.electric(), e);
                prop_assert_eq!(f.magnetic(), b);
            }
        }
    }

    #[test]
    fn magnetic_sign_table() {
        let f = FourForm2::from_eb([0.0; 3], [1.0, 2.0, 3.0], Signature::Minkowski);
        assert_eq!(f.components, [0.0, 0.0, 0.0, -1.0, 2.0, -3.0]);
        let f = FourForm2::from_eb([1.0, 2.0, 3.0], [0.0; 3], Signature::Minkowski);
        assert_eq!(f.components, [1.0, 2.0, 3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn minkowski_dual_of_pure_electric_field() {
        // *F = -B dx0^dxa - E1 dx2^dx3 + E2 dx1^dx3 - E3 dx1^dx2.
        let f = FourForm2::from_eb([1.0, 0.0, 0.0], [0.0; 3], Signature::Minkowski);
        let s = f.hodge_star();
        assert_eq!(s.components, [0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        assert_eq!(s.magnetic(), [1.0, 0.0, 0.0]);
        let f = FourForm2::from_eb([0.0; 3], [1.0, 0.0, 0.0], Signature::Minkowski);
        assert_eq!(f.hodge_star().components, [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let e = [0.3, -1.2, 2.0];
        let b = [0.7, 0.1, -0.4];
        let s = FourForm2::from_eb(e, b, Signature::Minkowski).hodge_star();
        assert_eq!(s.electric(), [-b[0], -b[1], -b[2]]);
        assert_eq!(s.magnetic(), e);
    }

    #[test]
    fn euclidean_split_on_duality_branches() {
        let e = [0.4, -1.0, 2.5];
        let asd = FourForm2::from_eb(e, [-e[0], -e[1], -e[2]], Signature::Euclidean);
        let DualitySplit::Real { plus, minus } = sd_asd_split(&asd) else { panic!() };
        assert!(plus.components.iter().all(|c| *c == 0.0));
        assert_eq!(minus, asd);
        assert!(asd.is_anti_self_dual_componentwise(0.0));

        let sd = FourForm2::from_eb(e, e, Signature::Euclidean);
        let DualitySplit::Real { plus, minus } = sd_asd_split(&sd) else { panic!() };
        assert!(minus.components.iter().all(|c| *c == 0.0));
        assert_eq!(plus, sd);
    }

    #[test]
    fn hodge3_of_dy1() {
        let phi = [1.0, 0.0, 0.0];
        let f = assemble_from_phi(phi);
        // dt block carries -phi, spatial block is dy2^dy3.
        assert_eq!(f.components, [-1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let zero = hodge3_project(&FourForm2::zero(Signature::Euclidean));
        assert_eq!(zero.phi, [0.0; 3]);
        assert_eq!(zero.spatial, [0.0; 3]);
    }
}
