use serde::{Deserialize, Serialize};

use super::linking::linking_number;
use super::torus::{torus_knot_classify, KnotType};
use super::trace::FieldLine;
use crate::error::Result;
use crate::linalg::Vec3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSummary {
    pub id: String,
    pub seed: Vec3,
    pub closed: bool,
    pub gap: Option<f64>,
    pub period: Option<f64>,
    pub length: f64,
    pub points: usize,
    pub knot: String,
    /// Set when the trace failed (stagnation, leaving the domain, ...).
    pub error: Option<String>,
}

/// Aggregate of a batch of traces. Linking entries are `None` where either line is not closed
/// or the pair is too close to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub lines: Vec<LineSummary>,
    pub linking_matrix: Vec<Vec<Option<i64>>>,
    pub linking_raw: Vec<Vec<Option<f64>>>,
    pub knot_types: Vec<String>,
    pub hopf_invariant: Option<f64>,
}

impl KnotRecord {
    pub fn assemble(seeds: &[Vec3], traces: &[Result<FieldLine>], hopf_invariant: Option<f64>) -> Self {
        let n = traces.len();
        let mut lines = Vec::with_capacity(n);
        for (i, (seed, t)) in seeds.iter().zip(traces).enumerate() {
            let id = format!("line{i}");
            lines.push(match t {
                Ok(l) => LineSummary {
                    id,
                    seed: *seed,
                    closed: l.closed,
                    gap: l.gap.is_finite().then_some(l.gap),
                    period: l.period,
                    length: l.length(),
                    points: l.points.len(),
                    knot: torus_knot_classify(l, None).to_string(),
                    error: None,
                },
                Err(e) => LineSummary {
                    id,
                    seed: *seed,
                    closed: false,
                    gap: None,
                    period: None,
                    length: 0.0,
                    points: 0,
                    knot: KnotType::Open.to_string(),
                    error: Some(e.to_string()),
                },
            });
        }
        let mut linking_matrix = vec![vec![None; n]; n];
        let mut linking_raw = vec![vec![None; n]; n];
        for i in 0..n {
            if matches!(&traces[i], Ok(l) if l.closed) {
                linking_matrix[i][i] = Some(0);
                linking_raw[i][i] = Some(0.0);
            }
            for j in i + 1..n {
                if let (Ok(a), Ok(b)) = (&traces[i], &traces[j]) {
                    if let Ok(l) = linking_number(a, b) {
                        linking_matrix[i][j] = Some(l.integer);
                        linking_matrix[j][i] = Some(l.integer);
                        linking_raw[i][j] = Some(l.raw);
                        linking_raw[j][i] = Some(l.raw);
                    }
                }
            }
        }
        let knot_types = lines.iter().map(|l| l.knot.clone()).collect();
        Self { lines, linking_matrix, linking_raw, knot_types, hopf_invariant }
    }
}
