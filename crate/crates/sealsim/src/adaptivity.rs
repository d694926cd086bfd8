//! Dynamic mesh refinement controller: every `refine_interval` steps, either
//! adapt towards the pressure field's gradient jumps (small clearance) or
//! sweep the mesh back towards the coarse level (large clearance).

use crate::config::AdaptivityConfig;
use crate::mesh::{AnnulusMesh, Mark};
use crate::reynolds::{kelly_indicator, PressureField};

/// Indicator maxima at or below this are treated as an exactly resolved
/// field: no cell is refined or coarsened on rounding noise.
pub const INDICATOR_ZERO_TOL: f64 = 1e-12;

/// One adapt decision. No-op unless `step_index` is a multiple of
/// `refine_interval`. When the clearance is below `g_trigger`, cells with
/// eta above theta_max * max eta are refined and cells below
/// theta_min * max eta coarsened (subject to the mesh's closure and level
/// limits); otherwise every cell above the coarse level is marked for one
/// coarsening sweep. Returns whether the mesh changed.
pub fn adapt_step(
    mesh: &mut AnnulusMesh,
    field: &PressureField,
    g: f64,
    step_index: usize,
    cfg: &AdaptivityConfig,
) -> bool {
    if step_index % cfg.refine_interval != 0 {
        return false;
    }
    mesh.set_max_level(cfg.max_refine_level);
    if g >= cfg.g_trigger {
        let marks: Vec<Mark> = mesh
            .active_cells()
            .iter()
            .map(|&id| {
                if mesh.cell(id).level > 0 {
                    Mark::Coarsen
                } else {
                    Mark::Keep
                }
            })
            .collect();
        if marks.iter().all(|&m| m == Mark::Keep) {
            return false;
        }
        return mesh.refine_and_coarsen(&marks);
    }

    let etas = kelly_indicator(mesh, field);
    let eta_max = etas.iter().fold(0.0f64, |m, &e| m.max(e));
    if eta_max <= INDICATOR_ZERO_TOL {
        return false;
    }
    let refine_at = cfg.theta_max * eta_max;
    let coarsen_at = cfg.theta_min * eta_max;
    let marks: Vec<Mark> = etas
        .iter()
        .map(|&e| {
            if e > refine_at {
                Mark::Refine
            } else if e < coarsen_at {
                Mark::Coarsen
            } else {
                Mark::Keep
            }
        })
        .collect();
    mesh.refine_and_coarsen(&marks)
}
