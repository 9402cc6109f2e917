//! Field-line tracing and the topology of the traced curves: closure, linking, Hopf
//! invariants, torus knots, and conserved Clebsch labels.

mod invariants;
mod linking;
mod record;
mod torus;
mod trace;

pub use invariants::{advection_invariants_check, hopf_invariant, AdvectionDrift, HopfInvariant, HopfOptions};
pub use linking::{linking_number, linking_number_polygons, polygon_separation, Linking};
pub use record::{KnotRecord, LineSummary};
pub use torus::{
    build_invariant_torus_field, build_torus_field_with_rotation, classify_polygon, fit_torus_frame, resonant_seed,
    torus_knot_classify, KnotType, TorusFrame, TORUS_MAJOR_RADIUS, TORUS_RESONANT_RADIUS, TORUS_SUPPORT_RADIUS,
};
pub use trace::{detect_closure, line_csv, trace_batch, trace_field_line, trace_vector_field, Closure, FieldLine, TraceOptions};
