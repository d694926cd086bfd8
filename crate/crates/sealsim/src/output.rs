//! CSV and legacy-ASCII VTK writers for the experiment drivers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::diagnostics::PhasePoint;
use crate::dynamics::TimeSeriesRecord;
use crate::mesh::AnnulusMesh;
use crate::reynolds::PressureField;

pub const TIMESERIES_HEADER: &str = "t,h_s,dh_s_dt,F,g,dt,n_cells,n_dofs";

/// Streaming writer for the per-step time series.
pub struct TimeSeriesWriter {
    out: BufWriter<File>,
}

impl TimeSeriesWriter {
    pub fn create(path: &Path) -> io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{TIMESERIES_HEADER}")?;
        Ok(TimeSeriesWriter { out })
    }

    pub fn write_record(&mut self, r: &TimeSeriesRecord) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{}",
            r.t, r.h_s, r.dh_s_dt, r.force, r.g, r.dt, r.n_cells, r.n_dofs
        )
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

pub fn write_timeseries(path: &Path, records: &[TimeSeriesRecord]) -> io::Result<()> {
    let mut w = TimeSeriesWriter::create(path)?;
    for r in records {
        w.write_record(r)?;
    }
    w.finish()
}

/// Writes the active mesh and nodal pressure as a legacy ASCII VTK
/// unstructured grid (quad cells, point scalars, per-cell refinement level).
pub fn write_vtk(
    path: &Path,
    mesh: &AnnulusMesh,
    field: &PressureField,
    title: &str,
) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let nodes = mesh.active_nodes();
    let mut local = vec![usize::MAX; mesh.n_vertices()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", nodes.len())?;
    for &v in nodes {
        let p = mesh.vertex(v);
        writeln!(out, "{} {} 0", p[0], p[1])?;
    }
    let n_cells = mesh.n_active();
    writeln!(out, "CELLS {} {}", n_cells, 5 * n_cells)?;
    for &id in mesh.active_cells() {
        let v = mesh.cell(id).verts;
        writeln!(
            out,
            "4 {} {} {} {}",
            local[v[0]], local[v[1]], local[v[2]], local[v[3]]
        )?;
    }
    writeln!(out, "CELL_TYPES {n_cells}")?;
    for _ in 0..n_cells {
        writeln!(out, "9")?;
    }
    writeln!(out, "POINT_DATA {}", nodes.len())?;
    writeln!(out, "SCALARS pressure double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &v in nodes {
        writeln!(out, "{}", field.values[v])?;
    }
    writeln!(out, "CELL_DATA {n_cells}")?;
    writeln!(out, "SCALARS level int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &id in mesh.active_cells() {
        writeln!(out, "{}", mesh.cell(id).level)?;
    }
    out.flush()
}

/// Phase-portrait samples, one row per recorded step: period,t,g,dg_dt.
pub fn write_phase(path: &Path, points: &[PhasePoint], period: f64) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "period,t,g,dg_dt")?;
    for p in points {
        let k = (p.t / period).floor() as usize;
        writeln!(out, "{},{},{},{}", k, p.t, p.g, p.dg_dt)?;
    }
    out.flush()
}

/// Per-period closure distances: period,closure (period k against k-1).
pub fn write_closures(path: &Path, closures: &[f64]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "period,closure")?;
    for (k, c) in closures.iter().enumerate() {
        writeln!(out, "{},{}", k + 1, c)?;
    }
    out.flush()
}
