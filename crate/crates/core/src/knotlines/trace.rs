use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_forms::VectorField3;
use crate::linalg::{dot, norm, sub, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Arc length after which tracing stops.
    pub max_arc: f64,
    /// Local error per unit arc length.
    pub tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// `|B|` below this is a stagnation point.
    pub floor: f64,
    /// Closed iff the return gap is below `closure_tol` times the arc length at return.
    pub closure_tol: f64,
    pub stop_at_closure: bool,
    /// Axis-aligned box `(lo, hi)` the line must stay in.
    pub domain: Option<(Vec3, Vec3)>,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            max_arc: 100.0,
            tol: 1e-9,
            h_init: 1e-2,
            h_max: 0.1,
            floor: 1e-12,
            closure_tol: 1e-6,
            stop_at_closure: true,
            domain: None,
            max_steps: 2_000_000,
        }
    }
}

/// An integral curve of `dr/ds = B / |B|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldLine {
    pub seed: Vec3,
    pub points: Vec<Vec3>,
    /// Arc length at each point.
    pub arc: Vec<f64>,
    pub closed: bool,
    /// Smallest return distance to the seed seen after the line left it.
    pub gap: f64,
    /// Arc length at the first accepted return.
    pub period: Option<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub max_step: f64,
    /// Largest `| |dr/ds| - 1 |` over the evaluated directions.
    pub speed_error: f64,
}

impl FieldLine {
    pub fn length(&self) -> f64 {
        self.arc.last().copied().unwrap_or(0.0)
    }

    /// Vertices of the closed polygon, without the duplicated return point.
    pub fn polygon(&self) -> &[Vec3] {
        if self.closed && self.points.len() > 1 {
            &self.points[..self.points.len() - 1]
        } else {
            &self.points
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a> {
    field: &'a dyn Fn(Vec3) -> Vec3,
    floor: f64,
    speed_error: f64,
}

impl Stepper<'_> {
    fn direction(&mut self, p: Vec3) -> Result<Vec3> {
        let b = (self.field)(p);
        let m = norm(b);
        if !m.is_finite() {
            return Err(Error::NonFiniteMap(p));
        }
        if m < self.floor {
            return Err(Error::Stagnation { point: p, magnitude: m });
        }
        let d = [b[0] / m, b[1] / m, b[2] / m];
        self.speed_error = self.speed_error.max((norm(d) - 1.0).abs());
        Ok(d)
    }

    /// One Dormand-Prince step from `y` with first stage `k1`; returns the fifth-order point,
    /// its direction, and the embedded error vector.
    fn step(&mut self, y: Vec3, k1: Vec3, h: f64) -> Result<(Vec3, Vec3, Vec3)> {
        let mut k = [[0.0; 3]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut p = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for c in 0..3 {
                        p[c] += h * a * kj[c];
                    }
                }
            }
            if s == 6 {
                let dir = self.direction(p)?;
                k[6] = dir;
                let mut err = [0.0; 3];
                for (j, kj) in k.iter().enumerate() {
                    for c in 0..3 {
                        err[c] += h * E[j] * kj[c];
                    }
                }
                return Ok((p, dir, err));
            }
            k[s] = self.direction(p)?;
        }
        unreachable!()
    }
}

fn in_box(p: Vec3, domain: Option<(Vec3, Vec3)>) -> bool {
    match domain {
        None => true,
        Some((lo, hi)) => (0..3).all(|a| p[a] >= lo[a] && p[a] <= hi[a]),
    }
}

fn hermite(y0: Vec3, f0: Vec3, y1: Vec3, f1: Vec3, h: f64, t: f64) -> Vec3 {
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    [0, 1, 2].map(|c| h00 * y0[c] + h10 * h * f0[c] + h01 * y1[c] + h11 * h * f1[c])
}

/// Traces `dr/ds = B / |B|` from `seed` with an adaptive Dormand-Prince pair (fifth-order
/// solution propagated, error controlled per unit step).
///
/// After the line has left the seed, every step whose chord passes the seed is refined to the
/// nearest return; the line is closed when that return gap is below `closure_tol` times the arc
/// length.
pub fn trace_field_line(field: &dyn Fn(Vec3) -> Vec3, seed: Vec3, opts: &TraceOptions) -> Result<FieldLine> {
    for (what, value) in [("max_arc", opts.max_arc), ("tol", opts.tol), ("h_init", opts.h_init), ("h_max", opts.h_max)] {
        if !(value > 0.0) {
            return Err(Error::NonPositive { what, value });
        }
    }
    if !in_box(seed, opts.domain) {
        return Err(Error::OutOfDomain(seed));
    }
    let mut st = Stepper { field, floor: opts.floor, speed_error: 0.0 };
    let mut y = seed;
    let mut f = st.direction(y)?;
    let mut s = 0.0;
    let mut h = opts.h_init.min(opts.h_max);
    let mut line = FieldLine {
        seed,
        points: vec![seed],
        arc: vec![0.0],
        closed: false,
        gap: f64::INFINITY,
        period: None,
        accepted: 0,
        rejected: 0,
        max_step: 0.0,
        speed_error: 0.0,
    };
    let mut departed = false;

    while s < opts.max_arc && line.accepted < opts.max_steps {
        let h_try = h.min(opts.max_arc - s);
        let (y1, f1, e) = st.step(y, f, h_try)?;
        let err = norm(e) / (opts.tol * h_try);
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error estimate at s = {s}")));
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.25)).clamp(0.2, 5.0) };
        if err > 1.0 {
            line.rejected += 1;
            h = h_try * factor.min(1.0);
            if h < 1e-14 * (1.0 + s) {
                return Err(Error::Integration(format!("step size underflow at s = {s}")));
            }
            continue;
        }
        if !in_box(y1, opts.domain) {
            return Err(Error::OutOfDomain(y1));
        }
        line.accepted += 1;
        line.max_step = line.max_step.max(norm(sub(y1, y)));

        let chord = sub(y1, y);
        let w = sub(seed, y);
        let cc = dot(chord, chord);
        let t = if cc > 0.0 { dot(w, chord) / cc } else { -1.0 };
        if departed && (0.0..1.0).contains(&t) && norm(sub(w, chord.map(|c| c * t))) < cc.sqrt() {
            let (y_star, s_star) = refine_return(&mut st, seed, y, f, y1, f1, s, h_try)?;
            let gap = norm(sub(y_star, seed));
            line.gap = line.gap.min(gap);
            if gap < opts.closure_tol * s_star && line.period.is_none() {
                line.closed = true;
                line.period = Some(s_star);
                if opts.stop_at_closure {
                    line.points.push(y_star);
                    line.arc.push(s_star);
                    break;
                }
            }
        }

        y = y1;
        f = f1;
        s += h_try;
        line.points.push(y);
        line.arc.push(s);
        if !departed && norm(sub(y, seed)) > 4.0 * h_try {
            departed = true;
        }
        h = (h_try * factor).min(opts.h_max);
    }
    line.speed_error = st.speed_error;
    Ok(line)
}

/// Nearest return to `seed` inside the accepted step `[s, s + h]`, by Hermite projection and
/// tangent corrections with exact steps from the left end.
fn refine_return(st: &mut Stepper<'_>, seed: Vec3, y0: Vec3, f0: Vec3, y1: Vec3, f1: Vec3, s: f64, h: f64) -> Result<(Vec3, f64)> {
    let dist = |t: f64| norm(sub(hermite(y0, f0, y1, f1, h, t), seed));
    let (mut a, mut b) = (0.0, 1.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (m1, m2) = (b - g * (b - a), a + g * (b - a));
        if dist(m1) < dist(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let mut hs = 0.5 * (a + b) * h;
    let mut y = y0;
    for _ in 0..3 {
        y = if hs > 0.0 { st.step(y0, f0, hs)?.0 } else { y0 };
        let d = st.direction(y)?;
        let delta = dot(sub(seed, y), d);
        hs = (hs + delta).clamp(0.0, h);
    }
    Ok((y, s + hs))
}

/// Traces a sampled or closure-backed field. Sampled fields (interpolated trilinearly) are
/// only trusted inside their grid box.
pub fn trace_vector_field(v: &VectorField3, seed: Vec3, opts: &TraceOptions) -> Result<FieldLine> {
    let mut opts = *opts;
    if v.closure().is_none() && opts.domain.is_none() {
        let g = v.grid();
        let (lo, l) = (g.origin(), g.lengths());
        opts.domain = Some((lo, [lo[0] + l[0], lo[1] + l[1], lo[2] + l[2]]));
    }
    trace_field_line(&|p| v.eval(p), seed, &opts)
}

/// Traces several seeds concurrently; each seed succeeds or fails on its own.
pub fn trace_batch(v: &VectorField3, seeds: &[Vec3], opts: &TraceOptions) -> Vec<Result<FieldLine>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds.iter().map(|&seed| scope.spawn(move || trace_vector_field(v, seed, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Integration("tracer thread panicked".into()))))
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    pub closed: bool,
    /// Arc length at the nearest return.
    pub period: Option<f64>,
    pub min_distance: f64,
}

/// Nearest return of the polygon to its first point, counted only after the line has moved
/// away from it. Closed iff that distance is below `tol` times the arc length at the return.
pub fn detect_closure(line: &FieldLine, tol: f64) -> Closure {
    let pts = &line.points;
    let seed = match pts.first() {
        Some(&p) => p,
        None => return Closure { closed: false, period: None, min_distance: f64::INFINITY },
    };
    let mut departed = false;
    let mut best = (f64::INFINITY, 0.0);
    for i in 1..pts.len() {
        let (a, b) = (pts[i - 1], pts[i]);
        let step = norm(sub(b, a));
        if !departed {
            if norm(sub(a, seed)) > 4.0 * step {
                departed = true;
            } else {
                continue;
            }
        }
        let d = sub(b, a);
        let dd = dot(d, d);
        let t = if dd > 0.0 { (dot(sub(seed, a), d) / dd).clamp(0.0, 1.0) } else { 0.0 };
        let dist = norm(sub(seed, [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]));
        if dist < best.0 {
            best = (dist, line.arc[i - 1] + t * (line.arc[i] - line.arc[i - 1]));
        }
    }
    let closed = best.0.is_finite() && best.0 < tol * best.1;
    Closure { closed, period: closed.then_some(best.1), min_distance: best.0 }
}

/// `s,x,y,z` rows at 17 significant digits.
pub fn line_csv(line: &FieldLine) -> String {
    use crate::em_fields::fmt17;
    let mut out = String::from("s,x,y,z\n");
    for (p, s) in line.points.iter().zip(&line.arc) {
        out.push_str(&format!("{},{},{},{}\n", fmt17(*s), fmt17(p[0]), fmt17(p[1]), fmt17(p[2])));
    }
    out
}
