use std::f64::consts::PI;
use std::fs;

use knotfield_core::beltrami::{build_beltrami_mode, build_beltrami_sum, BeltramiMode, Helicity};
use knotfield_core::contact::{hopfion_clebsch, hopfion_single_pair};
use knotfield_core::em_fields::{build_hopfion, build_mirror_hopfion, read_grid_text, DyonPair, EMField};
use knotfield_core::grid_forms::{GridSpec3, Signature, VectorField3};
use knotfield_core::knotlines::{build_invariant_torus_field, build_torus_field_with_rotation};

use crate::config::{FieldSpec, RunConfig};
use crate::error::CliError;

fn helicity(s: Option<&str>) -> Result<Helicity, CliError> {
    match s.unwrap_or("positive") {
        "positive" | "+" => Ok(Helicity::Positive),
        "negative" | "-" => Ok(Helicity::Negative),
        other => Err(CliError::usage(format!("helicity must be \"positive\" or \"negative\", got {other:?}"))),
    }
}

fn default_box(kind: &str) -> ([f64; 3], bool) {
    match kind {
        "beltrami" => ([2.0 * PI; 3], false),
        "torus" => ([4.0, 4.0, 2.0], true),
        _ => ([16.0; 3], true),
    }
}

fn grid_for(cfg: &RunConfig) -> Result<GridSpec3, CliError> {
    let (default, centered) = default_box(&cfg.field.kind);
    let lengths = cfg.box_lengths.unwrap_or(default);
    let g = if centered { GridSpec3::centered(cfg.grid, lengths) } else { GridSpec3::new(cfg.grid, lengths) };
    Ok(g?)
}

fn magnetic(b: VectorField3) -> Result<EMField, CliError> {
    let e = VectorField3::zeros(*b.grid());
    Ok(EMField::new(e, b, Signature::Minkowski)?)
}

/// Builds the configured field. Returns the field and provenance lines for file headers.
pub fn build_field(cfg: &RunConfig) -> Result<(EMField, Vec<String>), CliError> {
    let spec: &FieldSpec = &cfg.field;
    let mut provenance = vec![format!("knotfield {}", env!("CARGO_PKG_VERSION"))];
    let field = match spec.kind.as_str() {
        "from-file" => {
            let path = spec.path.as_ref().expect("validated");
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file = read_grid_text(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            provenance.extend(file.provenance.into_iter().filter(|l| !l.starts_with("knotfield ")));
            provenance.push(format!("source {}", path.display()));
            return Ok((file.field, provenance));
        }
        "hopfion" => {
            let g = grid_for(cfg)?;
            let scale = spec.scale.unwrap_or(1.0);
            if spec.mirror.unwrap_or(false) {
                build_mirror_hopfion(g, scale)?
            } else {
                build_hopfion(g, scale)?
            }
        }
        "dyon" => DyonPair::hopf(grid_for(cfg)?, spec.scale.unwrap_or(1.0))?.em_field(),
        "beltrami" => {
            let g = grid_for(cfg)?;
            let b = match &spec.modes {
                Some(modes) => {
                    if modes.is_empty() {
                        return Err(CliError::usage("beltrami modes list is empty"));
                    }
                    let modes = modes
                        .iter()
                        .map(|m| Ok(BeltramiMode::new(m.k, helicity(m.helicity.as_deref())?, m.amplitude.unwrap_or(1.0))))
                        .collect::<Result<Vec<_>, CliError>>()?;
                    build_beltrami_sum(&modes, g)?
                }
                None => {
                    let mode = BeltramiMode::new(spec.k.unwrap_or([0, 0, 1]), helicity(spec.helicity.as_deref())?, spec.amplitude.unwrap_or(1.0));
                    build_beltrami_mode(mode, g)?
                }
            };
            magnetic(b)?
        }
        "torus" => {
            let g = grid_for(cfg)?;
            let b = match spec.iota {
                Some(iota) => build_torus_field_with_rotation(iota, g)?,
                None => build_invariant_torus_field(spec.p.unwrap_or(2), spec.q.unwrap_or(3), g)?,
            };
            magnetic(b)?
        }
        "clebsch" => {
            let g = grid_for(cfg)?;
            let scale = spec.scale.unwrap_or(1.0);
            let data = match spec.pairs.unwrap_or(2) {
                1 => hopfion_single_pair(scale)?,
                2 => hopfion_clebsch(scale)?,
                n => return Err(CliError::usage(format!("clebsch pairs must be 1 or 2, got {n}"))),
            };
            magnetic(data.two_form_field(g))?
        }
        _ => unreachable!("kind validated"),
    };
    provenance.push(format!("field {}", serde_json::to_string(spec).expect("spec serializes")));
    Ok((field, provenance))
}
