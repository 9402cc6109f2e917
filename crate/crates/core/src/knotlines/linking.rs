use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::trace::FieldLine;
use crate::error::{Error, Result};
use crate::linalg::{cross, dot, norm, normalize, sub, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linking {
    pub integer: i64,
    pub raw: f64,
}

/// Signed solid angle (over 4 pi) subtended by segment `p1 p2` and segment `p3 p4`, exact for
/// straight segments.
fn segment_pair(p1: Vec3, p2: Vec3, p3: Vec3, p4: Vec3) -> f64 {
    let (r13, r14, r23, r24) = (sub(p3, p1), sub(p4, p1), sub(p3, p2), sub(p4, p2));
    let n = |a: Vec3, b: Vec3| normalize(cross(a, b));
    let (Some(n1), Some(n2), Some(n3), Some(n4)) = (n(r13, r14), n(r14, r24), n(r24, r23), n(r23, r13)) else {
        return 0.0;
    };
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(dot(n1, n2)) + asin(dot(n2, n3)) + asin(dot(n3, n4)) + asin(dot(n4, n1));
    let s = dot(cross(sub(p4, p3), sub(p2, p1)), r13);
    if s > 0.0 {
        omega / (4.0 * PI)
    } else if s < 0.0 {
        -omega / (4.0 * PI)
    } else {
        0.0
    }
}

fn segment_distance(p1: Vec3, p2: Vec3, q1: Vec3, q2: Vec3) -> f64 {
    let (d1, d2, r) = (sub(p2, p1), sub(q2, q1), sub(p1, q1));
    let (a, e, f) = (dot(d1, d1), dot(d2, d2), dot(d2, r));
    let (c, b) = (dot(d1, r), dot(d1, d2));
    let denom = a * e - b * b;
    let mut s = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = if e > 0.0 { (b * s + f) / e } else { 0.0 };
    if t < 0.0 {
        t = 0.0;
        s = if a > 0.0 { (-c / a).clamp(0.0, 1.0) } else { 0.0 };
    } else if t > 1.0 {
        t = 1.0;
        s = if a > 0.0 { ((b - c) / a).clamp(0.0, 1.0) } else { 0.0 };
    }
    norm(sub([p1[0] + s * d1[0], p1[1] + s * d1[1], p1[2] + s * d1[2]], [q1[0] + t * d2[0], q1[1] + t * d2[1], q1[2] + t * d2[2]]))
}

fn extent(c: &[Vec3]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in c {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    norm(sub(hi, lo))
}

/// Smallest distance between the two closed polygons.
pub fn polygon_separation(c1: &[Vec3], c2: &[Vec3]) -> f64 {
    let (n, m) = (c1.len(), c2.len());
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in 0..m {
            best = best.min(segment_distance(c1[i], c1[(i + 1) % n], c2[j], c2[(j + 1) % m]));
        }
    }
    best
}

/// Gauss linking number of two closed polygons (each implicitly closed from its last vertex
/// back to its first), summing exact segment-pair solid angles. Polygons closer than
/// `rel_floor` times their combined extent are rejected.
pub fn linking_number_polygons(c1: &[Vec3], c2: &[Vec3], rel_floor: f64) -> Result<Linking> {
    if c1.len() < 3 || c2.len() < 3 {
        return Err(Error::InvalidArgument("a closed polygon needs at least 3 vertices".into()));
    }
    let floor = rel_floor * extent(c1).max(extent(c2));
    let separation = polygon_separation(c1, c2);
    if !(separation > floor) {
        return Err(Error::CurvesTooClose { separation, floor });
    }
    let (n, m) = (c1.len(), c2.len());
    let mut raw = 0.0;
    for i in 0..n {
        let (p1, p2) = (c1[i], c1[(i + 1) % n]);
        let mut row = 0.0;
        for j in 0..m {
            row += segment_pair(p1, p2, c2[j], c2[(j + 1) % m]);
        }
        raw += row;
    }
    Ok(Linking { integer: raw.round() as i64, raw })
}

/// Linking number of two closed field lines.
pub fn linking_number(c1: &FieldLine, c2: &FieldLine) -> Result<Linking> {
    if !c1.closed || !c2.closed {
        return Err(Error::OpenCurve);
    }
    linking_number_polygons(c1.polygon(), c2.polygon(), 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(center: Vec3, u: Vec3, v: Vec3, r: f64, n: usize) -> Vec<Vec3> {
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                [0, 1, 2].map(|a| center[a] + r * (t.cos() * u[a] + t.sin() * v[a]))
            })
            .collect()
    }

    /// Midpoint-rule Gauss double integral over the polygon edges.
    fn gauss_midpoint(c1: &[Vec3], c2: &[Vec3]) -> f64 {
        let mut s = 0.0;
        for i in 0..c1.len() {
            let (a, b) = (c1[i], c1[(i + 1) % c1.len()]);
            let (m1, d1) = ([0, 1, 2].map(|k| 0.5 * (a[k] + b[k])), sub(b, a));
            for j in 0..c2.len() {
                let (c, d) = (c2[j], c2[(j + 1) % c2.len()]);
                let (m2, d2) = ([0, 1, 2].map(|k| 0.5 * (c[k] + d[k])), sub(d, c));
                let r = sub(m1, m2);
                s += dot(cross(d1, d2), r) / norm(r).powi(3);
            }
        }
        s / (4.0 * PI)
    }

    #[test]
    fn hopf_link_and_unlinked_pair() {
        let a = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 200);
        let b = circle([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1.0, 200);
        let l = linking_number_polygons(&a, &b, 1e-9).unwrap();
        let oracle = gauss_midpoint(&a, &b);
        assert_eq!(l.integer.abs(), 1);
        assert!((l.raw - oracle).abs() < 1e-3, "{} vs {oracle}", l.raw);
        assert!((l.raw.abs() - 1.0).abs() < 1e-12);
        // Symmetric and orientation-odd.
        let ba = linking_number_polygons(&b, &a, 1e-9).unwrap();
        assert!((ba.raw - l.raw).abs() < 1e-12);
        let rev: Vec<_> = b.iter().rev().copied().collect();
        assert!((linking_number_polygons(&a, &rev, 1e-9).unwrap().raw + l.raw).abs() < 1e-12);
        // Resampling leaves it unchanged.
        let coarse = circle([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1.0, 37);
        assert!((linking_number_polygons(&a, &coarse, 1e-9).unwrap().raw - l.raw).abs() < 0.05);

        let far = circle([5.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 100);
        let z = linking_number_polygons(&a, &far, 1e-9).unwrap();
        assert_eq!(z.integer, 0);
        assert!(z.raw.abs() < 1e-12);
    }

    #[test]
    fn right_handed_link_is_positive() {
        // x-y circle counterclockwise; second circle through its centre crossing upward.
        let a = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 120);
        let b = circle([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1.0, 120);
        let oracle = gauss_midpoint(&a, &b);
        let l = linking_number_polygons(&a, &b, 1e-9).unwrap();
        assert!(oracle.signum() == l.raw.signum() && l.integer == oracle.round() as i64);
    }

    #[test]
    fn close_and_open_curves_are_rejected() {
        let a = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 50);
        let b = circle([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 50);
        assert!(matches!(linking_number_polygons(&a, &b, 1e-9), Err(Error::CurvesTooClose { .. })));
        let open = FieldLine {
            seed: [0.0; 3],
            points: a.clone(),
            arc: vec![0.0; 50],
            closed: false,
            gap: 1.0,
            period: None,
            accepted: 0,
            rejected: 0,
            max_step: 0.0,
            speed_error: 0.0,
        };
        assert!(matches!(linking_number(&open, &open), Err(Error::OpenCurve)));
    }
}
