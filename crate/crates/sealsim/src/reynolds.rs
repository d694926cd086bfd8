//! Finite-element discretisation of the quasistatic modified Reynolds
//! equation: bilinear elements on the annulus mesh, a diagonal-preconditioned
//! CG solve, the pressure force on the stator, the jump-based local error
//! indicator, and film velocity reconstruction.
//!
//! The weak problem is: find the pressure Phi (with Dirichlet ring data)
//! such that
//!     integral h^3 grad(Phi) . grad(chi) = integral f chi
//! for all test functions chi vanishing on the rings, where
//!     f = 6 Re* r beta sin(theta - phase) - sigma_t dh/dt.

use crate::config::BearingConfig;
use crate::error::SolverError;
use crate::mesh::{AnnulusMesh, BoundaryTag, HangingConstraint, Point};
use crate::model::gap;
use crate::sparse::{solve_cg_jacobi, CsrMatrix};

/// 3-point Gauss rule on [-1, 1].
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// 2-point Gauss rule on [-1, 1], exact for the quadratic edge-jump
/// integrand of bilinear fields.
const GAUSS2: [(f64, f64); 2] = [(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)];

const CG_MAX_ITER_FLOOR: usize = 20_000;

/// Film state feeding one quasistatic pressure solve: stator height, rotor
/// centre height, the (spatially uniform) rate of change of the clearance,
/// and the model parameters copied from the config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmSnapshot {
    pub h_s: f64,
    pub h_rotor: f64,
    pub dh_dt: f64,
    pub beta: f64,
    pub source_phase: f64,
    pub sigma_t: f64,
    pub re_star: f64,
}

impl FilmSnapshot {
    pub fn from_config(cfg: &BearingConfig, h_s: f64, h_rotor: f64, dh_dt: f64) -> Self {
        FilmSnapshot {
            h_s,
            h_rotor,
            dh_dt,
            beta: cfg.beta,
            source_phase: cfg.source_phase,
            sigma_t: cfg.sigma_t,
            re_star: cfg.re_star,
        }
    }

    /// Film thickness at polar coordinates (r, theta).
    pub fn gap_at(&self, r: f64, theta: f64) -> f64 {
        gap(r, theta, self.h_s, self.h_rotor, self.beta, self.source_phase)
    }
}

/// Right-hand side of the quasistatic Reynolds solve:
/// 6 Re* r beta sin(theta - phase) - sigma_t dh/dt.
pub fn source_term(r: f64, theta: f64, snapshot: &FilmSnapshot) -> f64 {
    6.0 * snapshot.re_star * r * snapshot.beta * (theta - snapshot.source_phase).sin()
        - snapshot.sigma_t * snapshot.dh_dt
}

/// Nodal coefficients of the bilinear pressure approximation. `values` holds
/// one slot per mesh vertex; only slots of active nodes are meaningful.
/// Hanging-node slots carry their resolved (master-combined) values.
#[derive(Debug, Clone)]
pub struct PressureField {
    pub values: Vec<f64>,
    revision: u64,
}

impl PressureField {
    /// Builds a field directly from nodal values, e.g. an interpolant of an
    /// analytic function. Hanging nodes are overwritten with their master
    /// combinations so the field is continuous.
    pub fn from_nodal_values(mesh: &AnnulusMesh, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_vertices());
        for c in mesh.constraints().iter() {
            values[c.node] =
                c.masters[0].1 * values[c.masters[0].0] + c.masters[1].1 * values[c.masters[1].0];
        }
        PressureField {
            values,
            revision: mesh.revision(),
        }
    }

    pub fn matches_mesh(&self, mesh: &AnnulusMesh) -> bool {
        self.revision == mesh.revision()
    }
}

/// Assembled, constrained, Dirichlet-eliminated linear system.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    matrix: CsrMatrix,
    rhs: Vec<f64>,
    /// dense dof -> vertex id
    node_of_dof: Vec<usize>,
    dirichlet: Vec<(usize, f64)>,
    hangings: Vec<HangingConstraint>,
    n_vertices: usize,
    revision: u64,
}

impl LinearSystem {
    pub fn n_dofs(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }
}

fn shape(xi: f64, eta: f64) -> [f64; 4] {
    [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
    ]
}

fn shape_grad_ref(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    [
        [-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)],
        [0.25 * (1.0 - eta), -0.25 * (1.0 + xi)],
        [0.25 * (1.0 + eta), 0.25 * (1.0 + xi)],
        [-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)],
    ]
}

/// Physical point and Jacobian of the bilinear map at reference (xi, eta).
fn map_point(corners: &[Point; 4], xi: f64, eta: f64) -> (Point, [[f64; 2]; 2]) {
    let n = shape(xi, eta);
    let g = shape_grad_ref(xi, eta);
    let mut x = [0.0, 0.0];
    let mut jac = [[0.0; 2]; 2];
    for i in 0..4 {
        x[0] += n[i] * corners[i][0];
        x[1] += n[i] * corners[i][1];
        jac[0][0] += g[i][0] * corners[i][0];
        jac[0][1] += g[i][1] * corners[i][0];
        jac[1][0] += g[i][0] * corners[i][1];
        jac[1][1] += g[i][1] * corners[i][1];
    }
    (x, jac)
}

/// Inverts the bilinear map by Newton iteration. Points inside or on the
/// boundary of a non-degenerate cell converge in a handful of steps.
fn inverse_map(corners: &[Point; 4], x: f64, y: f64) -> (f64, f64) {
    let mut xi = 0.0;
    let mut eta = 0.0;
    for _ in 0..40 {
        let (p, jac) = map_point(corners, xi, eta);
        let rx = p[0] - x;
        let ry = p[1] - y;
        if rx * rx + ry * ry < 1e-28 {
            break;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        xi -= (jac[1][1] * rx - jac[0][1] * ry) / det;
        eta -= (-jac[1][0] * rx + jac[0][0] * ry) / det;
    }
    (xi, eta)
}

/// Gradient of the field inside `cell` at the physical point (x, y).
fn grad_in_cell(mesh: &AnnulusMesh, field: &PressureField, cell: usize, x: f64, y: f64) -> [f64; 2] {
    let corners = mesh.cell_corners(cell);
    let (xi, eta) = inverse_map(&corners, x, y);
    let (_, jac) = map_point(&corners, xi, eta);
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let gref = shape_grad_ref(xi, eta);
    let verts = mesh.cell(cell).verts;
    let mut gx = 0.0;
    let mut gy = 0.0;
    for i in 0..4 {
        let v = field.values[verts[i]];
        // grad_phys = J^{-T} grad_ref
        let dx = (jac[1][1] * gref[i][0] - jac[1][0] * gref[i][1]) / det;
        let dy = (-jac[0][1] * gref[i][0] + jac[0][0] * gref[i][1]) / det;
        gx += v * dx;
        gy += v * dy;
    }
    [gx, gy]
}

/// Value of the field inside `cell` at the physical point (x, y).
pub fn value_in_cell(
    mesh: &AnnulusMesh,
    field: &PressureField,
    cell: usize,
    x: f64,
    y: f64,
) -> f64 {
    let corners = mesh.cell_corners(cell);
    let (xi, eta) = inverse_map(&corners, x, y);
    let n = shape(xi, eta);
    let verts = mesh.cell(cell).verts;
    (0..4).map(|i| n[i] * field.values[verts[i]]).sum()
}

/// Assembles the FEM system for the film snapshot. Fails with
/// [`SolverError::NonPositiveGap`] if the film thickness is non-positive at
/// any quadrature point, signalling imminent contact to the caller.
pub fn assemble(
    mesh: &AnnulusMesh,
    snapshot: &FilmSnapshot,
    p_inner: f64,
    p_outer: f64,
) -> Result<LinearSystem, SolverError> {
    assemble_with(
        mesh,
        |r, theta| snapshot.gap_at(r, theta),
        |r, theta| source_term(r, theta, snapshot),
        p_inner,
        p_outer,
    )
}

/// General assembly with an arbitrary film-thickness coefficient h(r, theta)
/// and source f(r, theta); used by the model path and by manufactured
/// solutions.
pub fn assemble_with(
    mesh: &AnnulusMesh,
    thickness: impl Fn(f64, f64) -> f64,
    source: impl Fn(f64, f64) -> f64,
    p_inner: f64,
    p_outer: f64,
) -> Result<LinearSystem, SolverError> {
    let nodes = mesh.active_nodes();
    let n = nodes.len();
    let mut dof_of_node = vec![usize::MAX; mesh.n_vertices()];
    for (dof, &v) in nodes.iter().enumerate() {
        dof_of_node[v] = dof;
    }

    let constraints = mesh.constraints();
    // Dense Dirichlet data; hanging nodes never lie on the boundary rings.
    let mut dirichlet_value = vec![f64::NAN; n];
    let mut dirichlet = Vec::new();
    for (dof, &v) in nodes.iter().enumerate() {
        let g = match mesh.vertex_tag(v) {
            BoundaryTag::Inner => p_inner,
            BoundaryTag::Outer => p_outer,
            BoundaryTag::Interior => continue,
        };
        debug_assert!(constraints.get(v).is_none());
        dirichlet_value[dof] = g;
        dirichlet.push((dof, g));
    }
    let is_dirichlet = |dof: usize| !dirichlet_value[dof].is_nan();

    // Resolve a vertex to its unconstrained dof expansion.
    let resolve = |v: usize| -> ([(usize, f64); 2], usize) {
        if let Some(c) = constraints.get(v) {
            (
                [
                    (dof_of_node[c.masters[0].0], c.masters[0].1),
                    (dof_of_node[c.masters[1].0], c.masters[1].1),
                ],
                2,
            )
        } else {
            ([(dof_of_node[v], 1.0), (0, 0.0)], 1)
        }
    };

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(mesh.n_active() * 24);
    let mut rhs = vec![0.0; n];

    for &id in mesh.active_cells() {
        let corners = mesh.cell_corners(id);
        let verts = mesh.cell(id).verts;
        let mut ke = [[0.0f64; 4]; 4];
        let mut fe = [0.0f64; 4];
        for &(xi, wx) in &GAUSS3 {
            for &(eta, wy) in &GAUSS3 {
                let (p, jac) = map_point(&corners, xi, eta);
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let theta = p[1].atan2(p[0]);
                let h = thickness(r, theta);
                if h <= 0.0 {
                    return Err(SolverError::NonPositiveGap { r, theta, value: h });
                }
                let w = wx * wy * det;
                let coeff = h * h * h * w;
                let fw = source(r, theta) * w;
                let gref = shape_grad_ref(xi, eta);
                let mut gphys = [[0.0f64; 2]; 4];
                for i in 0..4 {
                    gphys[i][0] = (jac[1][1] * gref[i][0] - jac[1][0] * gref[i][1]) / det;
                    gphys[i][1] = (-jac[0][1] * gref[i][0] + jac[0][0] * gref[i][1]) / det;
                }
                let nsh = shape(xi, eta);
                for i in 0..4 {
                    fe[i] += fw * nsh[i];
                    for j in 0..4 {
                        ke[i][j] += coeff * (gphys[i][0] * gphys[j][0] + gphys[i][1] * gphys[j][1]);
                    }
                }
            }
        }
        for i in 0..4 {
            let (ri, ni) = resolve(verts[i]);
            for (di, wi) in ri.iter().take(ni).copied() {
                if is_dirichlet(di) {
                    continue;
                }
                rhs[di] += wi * fe[i];
                for j in 0..4 {
                    let (rj, nj) = resolve(verts[j]);
                    for (dj, wj) in rj.iter().take(nj).copied() {
                        let v = wi * wj * ke[i][j];
                        if is_dirichlet(dj) {
                            rhs[di] -= v * dirichlet_value[dj];
                        } else {
                            triplets.push((di, dj, v));
                        }
                    }
                }
            }
        }
    }

    // Placeholder identity rows keep eliminated dofs in the system so the
    // solution vector maps one-to-one onto the active nodes.
    for &(d, g) in &dirichlet {
        triplets.push((d, d, 1.0));
        rhs[d] = g;
    }
    let mut hangings = Vec::with_capacity(constraints.len());
    for c in constraints.iter() {
        let d = dof_of_node[c.node];
        triplets.push((d, d, 1.0));
        rhs[d] = 0.0;
        hangings.push(*c);
    }

    Ok(LinearSystem {
        matrix: CsrMatrix::from_triplets(n, triplets),
        rhs,
        node_of_dof: nodes.to_vec(),
        dirichlet,
        hangings,
        n_vertices: mesh.n_vertices(),
        revision: mesh.revision(),
    })
}

/// Solves the assembled system to a relative residual of `tol` and restores
/// Dirichlet and hanging-node values onto the nodal vector.
pub fn solve_pressure(system: &LinearSystem, tol: f64) -> Result<PressureField, SolverError> {
    let n = system.matrix.n();
    let max_iter = CG_MAX_ITER_FLOOR.max(10 * n);
    let (x, _iters) = solve_cg_jacobi(&system.matrix, &system.rhs, tol, max_iter)?;
    let mut values = vec![0.0; system.n_vertices];
    for (dof, &v) in system.node_of_dof.iter().enumerate() {
        values[v] = x[dof];
    }
    for &(d, g) in &system.dirichlet {
        values[system.node_of_dof[d]] = g;
    }
    for c in &system.hangings {
        values[c.node] =
            c.masters[0].1 * values[c.masters[0].0] + c.masters[1].1 * values[c.masters[1].0];
    }
    Ok(PressureField {
        values,
        revision: system.revision,
    })
}

/// Leading-order pressure force on the stator: integral of (Phi - p_ambient)
/// over the active cells, with the same quadrature as assembly.
pub fn pressure_force(mesh: &AnnulusMesh, field: &PressureField, p_ambient: f64) -> f64 {
    debug_assert!(field.matches_mesh(mesh));
    let mut force = 0.0;
    for &id in mesh.active_cells() {
        let corners = mesh.cell_corners(id);
        let verts = mesh.cell(id).verts;
        for &(xi, wx) in &GAUSS3 {
            for &(eta, wy) in &GAUSS3 {
                let (_, jac) = map_point(&corners, xi, eta);
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                let nsh = shape(xi, eta);
                let phi: f64 = (0..4).map(|i| nsh[i] * field.values[verts[i]]).sum();
                force += wx * wy * det * (phi - p_ambient);
            }
        }
    }
    force
}

/// L2 norm of (Phi - exact) over the active cells, with `exact` given in
/// polar coordinates.
pub fn l2_error(mesh: &AnnulusMesh, field: &PressureField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for &id in mesh.active_cells() {
        let corners = mesh.cell_corners(id);
        let verts = mesh.cell(id).verts;
        for &(xi, wx) in &GAUSS3 {
            for &(eta, wy) in &GAUSS3 {
                let (p, jac) = map_point(&corners, xi, eta);
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                let nsh = shape(xi, eta);
                let phi: f64 = (0..4).map(|i| nsh[i] * field.values[verts[i]]).sum();
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let theta = p[1].atan2(p[0]);
                let diff = phi - exact(r, theta);
                acc += wx * wy * det * diff * diff;
            }
        }
    }
    acc.sqrt()
}

/// Jump-squared integral over the segment (a, b) between two cells, using a
/// 2-point Gauss rule (exact: the normal-gradient jump of bilinear fields is
/// linear along a straight edge).
fn edge_jump_integral(
    mesh: &AnnulusMesh,
    field: &PressureField,
    cell_a: usize,
    cell_b: usize,
    pa: Point,
    pb: Point,
) -> f64 {
    let ex = pb[0] - pa[0];
    let ey = pb[1] - pa[1];
    let len = (ex * ex + ey * ey).sqrt();
    let nx = ey / len;
    let ny = -ex / len;
    let mut acc = 0.0;
    for &(s, w) in &GAUSS2 {
        let t = 0.5 * (1.0 + s);
        let x = pa[0] + t * ex;
        let y = pa[1] + t * ey;
        let ga = grad_in_cell(mesh, field, cell_a, x, y);
        let gb = grad_in_cell(mesh, field, cell_b, x, y);
        let jump = (ga[0] - gb[0]) * nx + (ga[1] - gb[1]) * ny;
        acc += w * jump * jump;
    }
    acc * 0.5 * len
}

/// Local error indicator per active cell:
/// eta_K^2 = diam(K) * integral over interior edges of [[grad Phi]]^2.
/// Each interior edge contributes its full integral to both adjacent cells;
/// boundary edges contribute zero.
pub fn kelly_indicator(mesh: &AnnulusMesh, field: &PressureField) -> Vec<f64> {
    debug_assert!(field.matches_mesh(mesh));
    let mut etas = Vec::with_capacity(mesh.n_active());
    for &id in mesh.active_cells() {
        let mut acc = 0.0;
        for k in 0..4 {
            let (p, q) = mesh.cell_edge(id, k);
            let pa = mesh.vertex(p);
            let pb = mesh.vertex(q);
            match mesh.edge_side(id, k) {
                crate::mesh::EdgeSide::Boundary => {}
                crate::mesh::EdgeSide::Conforming(n) => {
                    acc += edge_jump_integral(mesh, field, id, n, pa, pb);
                }
                crate::mesh::EdgeSide::Coarser(n) => {
                    acc += edge_jump_integral(mesh, field, id, n, pa, pb);
                }
                crate::mesh::EdgeSide::Finer { mid, first, second } => {
                    let pm = mesh.vertex(mid);
                    acc += edge_jump_integral(mesh, field, id, first, pa, pm);
                    acc += edge_jump_integral(mesh, field, id, second, pm, pb);
                }
            }
        }
        etas.push((mesh.cell_diameter(id) * acc).sqrt());
    }
    etas
}

/// Radial and azimuthal film velocities at (r, theta, z):
///   u = 1/2 dp/dr (z - h_s)(z - h_r)
///   v = 1/(2 Re* r) dp/dtheta (z - h_s)(z - h_r) - (r/h)(z - h_s)
/// with the pressure gradient taken from the cell containing the query
/// point (lowest cell index on ties).
pub fn velocity_profile(
    mesh: &AnnulusMesh,
    field: &PressureField,
    snapshot: &FilmSnapshot,
    r: f64,
    theta: f64,
    z: f64,
) -> Result<(f64, f64), SolverError> {
    let x = r * theta.cos();
    let y = r * theta.sin();
    let h_rotor_local = snapshot.h_rotor + r * snapshot.beta * (theta - snapshot.source_phase).sin();
    if z < h_rotor_local - 1e-12 || z > snapshot.h_s + 1e-12 {
        return Err(SolverError::OutOfFilm {
            z,
            h_rotor: h_rotor_local,
            h_stator: snapshot.h_s,
        });
    }
    let cell = locate_cell(mesh, x, y).ok_or(SolverError::PointNotFound { x, y })?;
    let g = grad_in_cell(mesh, field, cell, x, y);
    let dp_dr = theta.cos() * g[0] + theta.sin() * g[1];
    let dp_dtheta = r * (-theta.sin() * g[0] + theta.cos() * g[1]);
    let film = (z - snapshot.h_s) * (z - h_rotor_local);
    let h = snapshot.h_s - h_rotor_local;
    let u = 0.5 * dp_dr * film;
    let v = dp_dtheta * film / (2.0 * snapshot.re_star * r) - (r / h) * (z - snapshot.h_s);
    Ok((u, v))
}

/// Lowest-index active cell containing the physical point.
fn locate_cell(mesh: &AnnulusMesh, x: f64, y: f64) -> Option<usize> {
    const TOL: f64 = 1e-9;
    for &id in mesh.active_cells() {
        let corners = mesh.cell_corners(id);
        let (xi, eta) = inverse_map(&corners, x, y);
        if xi.abs() <= 1.0 + TOL && eta.abs() <= 1.0 + TOL {
            return Some(id);
        }
    }
    None
}

/// Assemble-and-solve convenience for the model path. Returns the field and
/// the pressure force.
pub fn solve_film(
    mesh: &AnnulusMesh,
    snapshot: &FilmSnapshot,
    cfg: &BearingConfig,
) -> Result<(PressureField, f64), SolverError> {
    let system = assemble(mesh, snapshot, cfg.p_inner, cfg.p_outer)?;
    let field = solve_pressure(&system, cfg.solver_tol)?;
    let force = pressure_force(mesh, &field, cfg.p_ambient);
    Ok((field, force))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mark;

    fn snapshot(h_s: f64, dh_dt: f64, beta: f64) -> FilmSnapshot {
        FilmSnapshot {
            h_s,
            h_rotor: 0.0,
            dh_dt,
            beta,
            source_phase: 0.0,
            sigma_t: 1.0,
            re_star: 1.0,
        }
    }

    #[test]
    fn source_term_values() {
        let s = snapshot(1.0, 0.0, 0.0);
        assert_eq!(source_term(0.7, 1.3, &s), 0.0);
        let s = snapshot(1.0, -2.0, 0.0);
        assert_eq!(source_term(0.7, 1.3, &s), 2.0);
        let s = snapshot(1.0, 0.0, 0.25);
        assert!((source_term(1.0, std::f64::consts::FRAC_PI_2, &s) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn stiffness_matches_plain_laplacian_for_unit_gap() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 16).unwrap();
        let s = snapshot(1.0, 0.0, 0.0);
        let film = assemble(&mesh, &s, 1.0, 2.0).unwrap();
        let plain = assemble_with(&mesh, |_, _| 1.0, |_, _| 0.0, 1.0, 2.0).unwrap();
        for i in 0..film.n_dofs() {
            for j in 0..film.n_dofs() {
                assert!((film.matrix().get(i, j) - plain.matrix().get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stiffness_is_symmetric() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 16).unwrap();
        // Introduce hanging nodes to exercise the constrained scatter.
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[5] = Mark::Refine;
        marks[20] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        let s = snapshot(1.3, -0.4, 0.2);
        let sys = assemble(&mesh, &s, 1.0, 2.0).unwrap();
        assert!(sys.matrix().max_asymmetry() < 1e-13);
    }

    #[test]
    fn non_positive_gap_is_reported() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 16).unwrap();
        let s = snapshot(0.3, 0.0, 0.5); // min gap = 0.3 - 0.5 < 0
        let err = assemble(&mesh, &s, 1.0, 2.0).unwrap_err();
        match err {
            SolverError::NonPositiveGap { value, .. } => assert!(value <= 0.0),
            other => panic!("expected NonPositiveGap, got {other:?}"),
        }
    }

    #[test]
    fn constant_solution_for_equal_boundary_data() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 20).unwrap();
        let s = snapshot(1.0, 0.0, 0.0);
        let sys = assemble(&mesh, &s, 1.0, 1.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        for &v in mesh.active_nodes() {
            assert!((field.values[v] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn log_profile_on_uniform_film() {
        let a = 0.2;
        let mesh = AnnulusMesh::build_coarse_annulus(a, 8, 40).unwrap();
        let s = snapshot(1.0, 0.0, 0.0);
        let sys = assemble(&mesh, &s, 1.0, 2.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        let exact = |r: f64| 1.0 + (r / a).ln() / (1.0 / a).ln();
        let mut worst: f64 = 0.0;
        for &v in mesh.active_nodes() {
            let p = mesh.vertex(v);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            worst = worst.max((field.values[v] - exact(r)).abs());
        }
        assert!(worst < 5e-3, "max nodal error {worst}");
    }

    #[test]
    fn squeeze_solution_matches_radial_ode() {
        // Uniform h = 1, dh/dt = c: -lap p = -sigma c, so p solves the radial
        // ODE (1/r)(r p')' = sigma c. Twice integrated and fitted to the
        // boundary data: p = A + B ln r + sigma c r^2 / 4.
        let a = 0.2;
        let (p_i, p_o) = (1.0, 2.0);
        let c = -1.5;
        let mut mesh = AnnulusMesh::build_coarse_annulus(a, 8, 40).unwrap();
        mesh.refine_uniform(1);
        let s = snapshot(1.0, c, 0.0);
        let sys = assemble(&mesh, &s, p_i, p_o).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        let big_a = p_o - c / 4.0;
        let big_b = (p_i - p_o - c * (a * a - 1.0) / 4.0) / a.ln();
        let exact = |r: f64| big_a + big_b * r.ln() + c * r * r / 4.0;
        let mut worst: f64 = 0.0;
        for &v in mesh.active_nodes() {
            let p = mesh.vertex(v);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            worst = worst.max((field.values[v] - exact(r)).abs());
        }
        assert!(worst < 5e-3, "max nodal error {worst}");
    }

    #[test]
    fn pressure_force_of_constant_offsets() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 40).unwrap();
        let ones = PressureField::from_nodal_values(&mesh, vec![2.5; mesh.n_vertices()]);
        let zero = pressure_force(&mesh, &ones, 2.5);
        assert!(zero.abs() < 1e-13);
        let area = pressure_force(&mesh, &ones, 1.5);
        assert!((area - mesh.total_area()).abs() < 1e-12);
    }

    #[test]
    fn discrete_maximum_principle_for_pure_boundary_data() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.3, 4, 24).unwrap();
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[7] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        let s = snapshot(1.4, 0.0, 0.0);
        let sys = assemble(&mesh, &s, 1.0, 2.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        for &v in mesh.active_nodes() {
            assert!(field.values[v] >= 1.0 - 1e-9 && field.values[v] <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn kelly_zero_for_linear_field() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 16).unwrap();
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[9] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        let vals: Vec<f64> = (0..mesh.n_vertices())
            .map(|v| {
                let p = mesh.vertex(v);
                0.7 + 1.3 * p[0] - 0.4 * p[1]
            })
            .collect();
        let field = PressureField::from_nodal_values(&mesh, vals);
        let etas = kelly_indicator(&mesh, &field);
        for (i, &e) in etas.iter().enumerate() {
            assert!(e < 1e-12, "cell {i}: eta = {e}");
        }
    }

    #[test]
    fn kelly_two_cell_strip_hand_value() {
        // Two unit squares sharing the edge x = 1. Field is 0 on the left
        // cell and (x - 1) on the right: unit normal-gradient jump on the
        // shared edge of length 1, diam sqrt(2).
        let vertices = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [2.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [2.0, 1.0],
        ];
        let quads = vec![[0, 1, 4, 3], [1, 2, 5, 4]];
        let mesh = AnnulusMesh::from_cells(vertices, quads).unwrap();
        let vals = vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let field = PressureField::from_nodal_values(&mesh, vals);
        let etas = kelly_indicator(&mesh, &field);
        let expect = (2.0f64).sqrt().sqrt(); // eta^2 = diam * L * jump^2
        for (i, &e) in etas.iter().enumerate() {
            assert!((e - expect).abs() < 1e-12, "cell {i}: {e} vs {expect}");
        }
    }

    #[test]
    fn kelly_zero_for_constant_field() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 2, 8).unwrap();
        let field = PressureField::from_nodal_values(&mesh, vec![3.0; mesh.n_vertices()]);
        for e in kelly_indicator(&mesh, &field) {
            assert!(e < 1e-14);
        }
    }

    #[test]
    fn constrained_field_is_continuous_across_hanging_edges() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 16).unwrap();
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[11] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        let vals: Vec<f64> = (0..mesh.n_vertices())
            .map(|v| {
                let p = mesh.vertex(v);
                0.2 - 0.9 * p[0] + 2.0 * p[1]
            })
            .collect();
        let field = PressureField::from_nodal_values(&mesh, vals);
        // Evaluate from both sides of every nonconforming edge.
        for &id in mesh.active_cells() {
            for k in 0..4 {
                if let crate::mesh::EdgeSide::Finer { mid, first, second } = mesh.edge_side(id, k) {
                    let (p, q) = mesh.cell_edge(id, k);
                    for (other, (ea, eb)) in [(first, (p, mid)), (second, (mid, q))] {
                        let a = mesh.vertex(ea);
                        let b = mesh.vertex(eb);
                        for t in [0.2, 0.5, 0.9] {
                            let x = a[0] + t * (b[0] - a[0]);
                            let y = a[1] + t * (b[1] - a[1]);
                            let from_coarse = value_in_cell(&mesh, &field, id, x, y);
                            let from_fine = value_in_cell(&mesh, &field, other, x, y);
                            assert!(
                                (from_coarse - from_fine).abs() < 1e-12,
                                "discontinuity {from_coarse} vs {from_fine}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn velocity_profile_boundary_conditions() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 8, 40).unwrap();
        let s = snapshot(1.0, 0.0, 0.0);
        let sys = assemble(&mesh, &s, 1.0, 2.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        // Stator no-slip.
        let (u, v) = velocity_profile(&mesh, &field, &s, 0.6, 1.0, s.h_s).unwrap();
        assert!(u.abs() < 1e-12 && v.abs() < 1e-12);
        // Rotor surface with zero pressure gradient: v = r.
        let flat = PressureField::from_nodal_values(&mesh, vec![1.0; mesh.n_vertices()]);
        let (u, v) = velocity_profile(&mesh, &flat, &s, 0.6, 1.0, 0.0).unwrap();
        assert!(u.abs() < 1e-12);
        assert!((v - 0.6).abs() < 1e-12);
        // Outside the film.
        assert!(velocity_profile(&mesh, &field, &s, 0.6, 1.0, 1.5).is_err());
    }

    #[test]
    fn velocity_profile_midfilm_radial_flow() {
        // Uniform film with the log pressure profile: at mid film
        // u = -h^2/8 dp/dr with dp/dr = (p_O - p_I) / (r ln(1/a)).
        // Bilinear gradients are most accurate at cell centres, so sample
        // there.
        let a = 0.2;
        let mut mesh = AnnulusMesh::build_coarse_annulus(a, 8, 40).unwrap();
        mesh.refine_uniform(1);
        let s = snapshot(1.0, 0.0, 0.0);
        let sys = assemble(&mesh, &s, 1.0, 2.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        // Centre of the active cell nearest to (r, theta) = (0.57, 0.8).
        let target = [0.57 * 0.8f64.cos(), 0.57 * 0.8f64.sin()];
        let cell = *mesh
            .active_cells()
            .iter()
            .min_by(|&&p, &&q| {
                let d = |id: usize| {
                    let c = mesh.cell_corners(id);
                    let cx = 0.25 * (c[0][0] + c[1][0] + c[2][0] + c[3][0]) - target[0];
                    let cy = 0.25 * (c[0][1] + c[1][1] + c[2][1] + c[3][1]) - target[1];
                    cx * cx + cy * cy
                };
                d(p).partial_cmp(&d(q)).unwrap()
            })
            .unwrap();
        let c = mesh.cell_corners(cell);
        let cx = 0.25 * (c[0][0] + c[1][0] + c[2][0] + c[3][0]);
        let cy = 0.25 * (c[0][1] + c[1][1] + c[2][1] + c[3][1]);
        let r = (cx * cx + cy * cy).sqrt();
        let theta = cy.atan2(cx);
        let (u, _) = velocity_profile(&mesh, &field, &s, r, theta, 0.5).unwrap();
        let dp_dr = 1.0 / (r * (1.0f64 / a).ln());
        let expect = -0.125 * dp_dr;
        assert!(
            (u - expect).abs() < 5e-3 * expect.abs(),
            "u = {u}, expect {expect}"
        );
    }

    #[test]
    fn squeeze_force_exceeds_static_force() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 8, 40).unwrap();
        let cfg = BearingConfig::default();
        let stat = snapshot(1.0, 0.0, 0.0);
        let squeeze = snapshot(1.0, -1.0, 0.0);
        let (_, f_static) = solve_film(&mesh, &stat, &cfg).unwrap();
        let (_, f_squeeze) = solve_film(&mesh, &squeeze, &cfg).unwrap();
        assert!(f_squeeze > f_static);
    }

    #[test]
    fn reflection_symmetry_in_beta() {
        // (beta, theta) -> (-beta, -theta) maps the problem onto itself; the
        // force is invariant under beta -> -beta.
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 8, 40).unwrap();
        let cfg = BearingConfig::default();
        let plus = snapshot(1.2, -0.3, 0.25);
        let minus = snapshot(1.2, -0.3, -0.25);
        let (_, f_plus) = solve_film(&mesh, &plus, &cfg).unwrap();
        let (_, f_minus) = solve_film(&mesh, &minus, &cfg).unwrap();
        assert!(
            (f_plus - f_minus).abs() < 1e-9 * f_plus.abs().max(1.0),
            "{f_plus} vs {f_minus}"
        );
    }

    #[test]
    fn rotation_equivariance_of_force() {
        // Shifting the source phase by one cell angle relabels the discrete
        // problem on the rotationally symmetric mesh: the force is invariant
        // and the multiset of nodal values is preserved.
        let n_theta = 40;
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, n_theta).unwrap();
        let cfg = BearingConfig::default();
        let phi = std::f64::consts::TAU / n_theta as f64;
        let s0 = FilmSnapshot {
            source_phase: 0.0,
            ..snapshot(1.2, -0.1, 0.25)
        };
        let s1 = FilmSnapshot {
            source_phase: phi,
            ..s0
        };
        let (f0, force0) = solve_film(&mesh, &s0, &cfg).unwrap();
        let (f1, force1) = solve_film(&mesh, &s1, &cfg).unwrap();
        assert!((force0 - force1).abs() < 1e-9 * force0.abs().max(1.0));
        let mut v0: Vec<f64> = mesh.active_nodes().iter().map(|&v| f0.values[v]).collect();
        let mut v1: Vec<f64> = mesh.active_nodes().iter().map(|&v| f1.values[v]).collect();
        v0.sort_by(f64::total_cmp);
        v1.sort_by(f64::total_cmp);
        let worst = v0
            .iter()
            .zip(&v1)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "sorted nodal values differ by {worst}");
    }
}
