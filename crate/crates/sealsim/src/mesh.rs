//! Hierarchical conforming quadrilateral mesh of the annulus with a
//! refinement tree and hanging-node continuity constraints.
//!
//! Cells are refined by quadrisection (edge midpoints joined to the
//! centroid). Active cells tile the polygonal annulus; refinement levels of
//! edge-adjacent active cells differ by at most one, and every vertex lying
//! in the interior of a coarser neighbour's edge is constrained to the mean
//! of that edge's endpoints so nodal fields stay continuous.

use std::collections::{HashMap, HashSet};

use crate::error::MeshError;

pub type Point = [f64; 2];

/// Boundary classification of a vertex. Inner/Outer vertices lie exactly on
/// the circles |x| = a and |x| = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    Interior,
    Inner,
    Outer,
}

/// Per-cell adapt decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Keep,
    Refine,
    Coarsen,
}

#[derive(Debug, Clone)]
pub struct Cell {
    /// Counter-clockwise vertex indices.
    pub verts: [usize; 4],
    /// Refinement level; coarse cells are level 0.
    pub level: u32,
    pub parent: Option<usize>,
    pub children: Option<[usize; 4]>,
    pub active: bool,
}

/// What lies on the other side of one edge of an active cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSide {
    Boundary,
    /// Active neighbour sharing the full edge.
    Conforming(usize),
    /// Two finer neighbours: `first` shares (p, mid), `second` shares (mid, q)
    /// where (p, q) is this cell's edge.
    Finer {
        mid: usize,
        first: usize,
        second: usize,
    },
    /// Coarser active neighbour; this cell's edge is half of the neighbour's.
    Coarser(usize),
}

/// Hanging node constrained to the mean of the two endpoints of the coarse
/// edge it bisects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HangingConstraint {
    pub node: usize,
    pub masters: [(usize, f64); 2],
}

/// Constraints for all hanging nodes of a mesh, sorted by node index.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    entries: Vec<HangingConstraint>,
    index: HashMap<usize, usize>,
}

impl ConstraintSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node: usize) -> Option<&HangingConstraint> {
        self.index.get(&node).map(|&i| &self.entries[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &HangingConstraint> {
        self.entries.iter()
    }

    fn rebuild_index(&mut self) {
        self.entries.sort_by_key(|c| c.node);
        self.index = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, c)| (c.node, i))
            .collect();
    }
}

fn edge_key(p: usize, q: usize) -> (usize, usize) {
    if p < q {
        (p, q)
    } else {
        (q, p)
    }
}

#[derive(Debug, Clone)]
pub struct AnnulusMesh {
    inner_radius: f64,
    vertices: Vec<Point>,
    vertex_tags: Vec<BoundaryTag>,
    cells: Vec<Cell>,
    max_level: u32,
    /// Active cell ids in ascending order.
    active: Vec<usize>,
    /// Vertex ids referenced by active cells, ascending.
    active_nodes: Vec<usize>,
    /// Edge (sorted vertex pair) -> up to two active cells.
    edge_cells: HashMap<(usize, usize), [Option<usize>; 2]>,
    /// Sorted vertex pair -> midpoint vertex created when the edge was split.
    edge_midpoint: HashMap<(usize, usize), usize>,
    /// Inverse of `edge_midpoint`.
    midpoint_of: HashMap<usize, (usize, usize)>,
    constraints: ConstraintSet,
    revision: u64,
}

impl AnnulusMesh {
    /// Builds the structured n_r x n_theta coarse grid mapped to the annulus
    /// of inner radius `a` and outer radius 1, azimuthally periodic.
    pub fn build_coarse_annulus(a: f64, n_r: usize, n_theta: usize) -> Result<Self, MeshError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(MeshError::InvalidInnerRadius(a));
        }
        if n_r < 1 || n_theta < 4 {
            return Err(MeshError::InvalidCoarseGrid { n_r, n_theta });
        }
        let mut vertices = Vec::with_capacity((n_r + 1) * n_theta);
        let mut vertex_tags = Vec::with_capacity((n_r + 1) * n_theta);
        for i in 0..=n_r {
            let r = a + (1.0 - a) * i as f64 / n_r as f64;
            let tag = if i == 0 {
                BoundaryTag::Inner
            } else if i == n_r {
                BoundaryTag::Outer
            } else {
                BoundaryTag::Interior
            };
            for j in 0..n_theta {
                let th = std::f64::consts::TAU * j as f64 / n_theta as f64;
                vertices.push([r * th.cos(), r * th.sin()]);
                vertex_tags.push(tag);
            }
        }
        let vid = |i: usize, j: usize| i * n_theta + (j % n_theta);
        let mut cells = Vec::with_capacity(n_r * n_theta);
        for i in 0..n_r {
            for j in 0..n_theta {
                cells.push(Cell {
                    verts: [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)],
                    level: 0,
                    parent: None,
                    children: None,
                    active: true,
                });
            }
        }
        let mut mesh = AnnulusMesh {
            inner_radius: a,
            vertices,
            vertex_tags,
            cells,
            max_level: 6,
            active: Vec::new(),
            active_nodes: Vec::new(),
            edge_cells: HashMap::new(),
            edge_midpoint: HashMap::new(),
            midpoint_of: HashMap::new(),
            constraints: ConstraintSet::default(),
            revision: 0,
        };
        mesh.rebuild_topology();
        mesh.check_orientation()?;
        Ok(mesh)
    }

    /// Builds a mesh directly from vertices and counter-clockwise quads, all
    /// at level 0 with the given boundary tags. Intended for tests and small
    /// synthetic geometries.
    pub fn from_cells_tagged(
        vertices: Vec<Point>,
        quads: Vec<[usize; 4]>,
        tags: Vec<BoundaryTag>,
        inner_radius: f64,
    ) -> Result<Self, MeshError> {
        assert_eq!(vertices.len(), tags.len());
        let cells = quads
            .into_iter()
            .map(|verts| Cell {
                verts,
                level: 0,
                parent: None,
                children: None,
                active: true,
            })
            .collect();
        let mut mesh = AnnulusMesh {
            inner_radius,
            vertices,
            vertex_tags: tags,
            cells,
            max_level: 6,
            active: Vec::new(),
            active_nodes: Vec::new(),
            edge_cells: HashMap::new(),
            edge_midpoint: HashMap::new(),
            midpoint_of: HashMap::new(),
            constraints: ConstraintSet::default(),
            revision: 0,
        };
        mesh.rebuild_topology();
        mesh.check_orientation()?;
        Ok(mesh)
    }

    /// Same as [`from_cells_tagged`](Self::from_cells_tagged) with every
    /// vertex interior (no Dirichlet boundary).
    pub fn from_cells(vertices: Vec<Point>, quads: Vec<[usize; 4]>) -> Result<Self, MeshError> {
        let tags = vec![BoundaryTag::Interior; vertices.len()];
        Self::from_cells_tagged(vertices, quads, tags, 0.0)
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn set_max_level(&mut self, max_level: u32) {
        self.max_level = max_level;
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn vertex_tag(&self, v: usize) -> BoundaryTag {
        self.vertex_tags[v]
    }

    pub fn cell(&self, id: usize) -> &Cell {
        &self.cells[id]
    }

    /// Ids of active cells, ascending.
    pub fn active_cells(&self) -> &[usize] {
        &self.active
    }

    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    /// Vertex ids referenced by at least one active cell, ascending.
    pub fn active_nodes(&self) -> &[usize] {
        &self.active_nodes
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// Corner coordinates of a cell in counter-clockwise order.
    pub fn cell_corners(&self, id: usize) -> [Point; 4] {
        let v = self.cells[id].verts;
        [
            self.vertices[v[0]],
            self.vertices[v[1]],
            self.vertices[v[2]],
            self.vertices[v[3]],
        ]
    }

    /// Straight-sided cell area by the shoelace formula.
    pub fn cell_area(&self, id: usize) -> f64 {
        let [p0, p1, p2, p3] = self.cell_corners(id);
        0.5 * ((p0[0] * p1[1] - p1[0] * p0[1])
            + (p1[0] * p2[1] - p2[0] * p1[1])
            + (p2[0] * p3[1] - p3[0] * p2[1])
            + (p3[0] * p0[1] - p0[0] * p3[1]))
    }

    /// Cell diameter: the largest pairwise corner distance.
    pub fn cell_diameter(&self, id: usize) -> f64 {
        let c = self.cell_corners(id);
        let mut best: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let dx = c[i][0] - c[j][0];
                let dy = c[i][1] - c[j][1];
                best = best.max((dx * dx + dy * dy).sqrt());
            }
        }
        best
    }

    /// Total area of the active cells.
    pub fn total_area(&self) -> f64 {
        self.active.iter().map(|&id| self.cell_area(id)).sum()
    }

    /// Endpoint vertex ids of local edge `k` (0..4) of a cell.
    pub fn cell_edge(&self, id: usize, k: usize) -> (usize, usize) {
        let v = self.cells[id].verts;
        (v[k], v[(k + 1) % 4])
    }

    /// What lies across local edge `k` of an active cell.
    pub fn edge_side(&self, id: usize, k: usize) -> EdgeSide {
        let (p, q) = self.cell_edge(id, k);
        let key = edge_key(p, q);
        if let Some(pair) = self.edge_cells.get(&key) {
            for slot in pair.iter().flatten() {
                if *slot != id {
                    return EdgeSide::Conforming(*slot);
                }
            }
        }
        if let Some(&mid) = self.edge_midpoint.get(&key) {
            let first = self.sole_cell_on(edge_key(p, mid));
            let second = self.sole_cell_on(edge_key(mid, q));
            if let (Some(first), Some(second)) = (first, second) {
                return EdgeSide::Finer { mid, first, second };
            }
        }
        // The edge may be half of a coarser neighbour's edge: one endpoint is
        // then the recorded midpoint of an edge whose other endpoint matches.
        for (m, other) in [(q, p), (p, q)] {
            if let Some(&(a, b)) = self.midpoint_of.get(&m) {
                if a == other || b == other {
                    if let Some(pair) = self.edge_cells.get(&edge_key(a, b)) {
                        if let Some(n) = pair.iter().flatten().next() {
                            return EdgeSide::Coarser(*n);
                        }
                    }
                }
            }
        }
        EdgeSide::Boundary
    }

    fn sole_cell_on(&self, key: (usize, usize)) -> Option<usize> {
        self.edge_cells
            .get(&key)
            .and_then(|pair| pair.iter().flatten().next().copied())
    }

    /// True if refinement levels of edge-adjacent active cells differ by at
    /// most one everywhere.
    pub fn is_one_irregular(&self) -> bool {
        for &id in &self.active {
            let level = self.cells[id].level;
            for k in 0..4 {
                match self.edge_side(id, k) {
                    EdgeSide::Conforming(n) => {
                        if self.cells[n].level != level {
                            return false;
                        }
                    }
                    EdgeSide::Finer { first, second, .. } => {
                        if self.cells[first].level != level + 1
                            || self.cells[second].level != level + 1
                        {
                            return false;
                        }
                    }
                    EdgeSide::Coarser(n) => {
                        if self.cells[n].level + 1 != level {
                            return false;
                        }
                    }
                    EdgeSide::Boundary => {}
                }
            }
        }
        true
    }

    /// Refines and coarsens active cells by the given marks (aligned with
    /// [`active_cells`](Self::active_cells)). Marks are adjusted so that
    /// 1-irregularity and the level limits hold: refine marks propagate to
    /// coarser neighbours, a coarsen happens only when all four siblings agree
    /// and no finer neighbour blocks it. Returns whether the mesh changed.
    pub fn refine_and_coarsen(&mut self, marks: &[Mark]) -> bool {
        assert_eq!(marks.len(), self.active.len(), "one mark per active cell");
        let mut refine: HashSet<usize> = HashSet::new();
        let mut coarsen: HashSet<usize> = HashSet::new();
        for (pos, &id) in self.active.iter().enumerate() {
            match marks[pos] {
                Mark::Refine => {
                    if self.cells[id].level < self.max_level {
                        refine.insert(id);
                    }
                }
                Mark::Coarsen => {
                    if self.cells[id].parent.is_some() {
                        coarsen.insert(id);
                    }
                }
                Mark::Keep => {}
            }
        }

        // Closure: a refined cell may not sit next to a strictly coarser
        // unrefined neighbour, so refine marks cascade down the levels.
        let mut worklist: Vec<usize> = {
            let mut w: Vec<usize> = refine.iter().copied().collect();
            w.sort_unstable();
            w
        };
        while let Some(id) = worklist.pop() {
            coarsen.remove(&id);
            for k in 0..4 {
                if let EdgeSide::Coarser(n) = self.edge_side(id, k) {
                    if refine.insert(n) {
                        worklist.push(n);
                    }
                }
            }
        }

        // Coarsen groups: all four siblings marked, none refining, and no
        // neighbour that would end up more than one level finer than the
        // parent. Infeasible marks are silently dropped.
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for &id in &coarsen {
            if refine.contains(&id) {
                continue;
            }
            groups
                .entry(self.cells[id].parent.expect("checked above"))
                .or_default()
                .push(id);
        }
        let mut merge_parents: Vec<usize> = Vec::new();
        'group: for (&parent, members) in &groups {
            if members.len() != 4 {
                continue;
            }
            for &child in members {
                for k in 0..4 {
                    match self.edge_side(child, k) {
                        EdgeSide::Finer { .. } => continue 'group,
                        EdgeSide::Conforming(n) => {
                            if !members.contains(&n) && refine.contains(&n) {
                                continue 'group;
                            }
                        }
                        _ => {}
                    }
                }
            }
            merge_parents.push(parent);
        }
        merge_parents.sort_unstable();

        let mut refine_list: Vec<usize> = refine.into_iter().collect();
        refine_list.sort_unstable();
        let changed = !refine_list.is_empty() || !merge_parents.is_empty();
        if !changed {
            return false;
        }

        for id in refine_list {
            self.refine_cell(id);
        }
        for parent in merge_parents {
            let children = self.cells[parent].children.expect("coarsen group");
            for c in children {
                self.cells[c].active = false;
            }
            self.cells[parent].active = true;
        }
        self.rebuild_topology();
        true
    }

    /// Refines every active cell `times` times.
    pub fn refine_uniform(&mut self, times: usize) {
        for _ in 0..times {
            let marks = vec![Mark::Refine; self.active.len()];
            self.refine_and_coarsen(&marks);
        }
    }

    fn refine_cell(&mut self, id: usize) {
        if let Some(children) = self.cells[id].children {
            // Children exist from an earlier refinement; reactivate them.
            for c in children {
                self.cells[c].active = true;
            }
            self.cells[id].active = false;
            return;
        }
        let [v0, v1, v2, v3] = self.cells[id].verts;
        let m01 = self.edge_midpoint_vertex(v0, v1);
        let m12 = self.edge_midpoint_vertex(v1, v2);
        let m23 = self.edge_midpoint_vertex(v2, v3);
        let m30 = self.edge_midpoint_vertex(v3, v0);
        let centre = {
            let c = [
                0.25 * (self.vertices[v0][0]
                    + self.vertices[v1][0]
                    + self.vertices[v2][0]
                    + self.vertices[v3][0]),
                0.25 * (self.vertices[v0][1]
                    + self.vertices[v1][1]
                    + self.vertices[v2][1]
                    + self.vertices[v3][1]),
            ];
            self.push_vertex(c, BoundaryTag::Interior)
        };
        let level = self.cells[id].level + 1;
        let base = self.cells.len();
        let child_verts = [
            [v0, m01, centre, m30],
            [m01, v1, m12, centre],
            [centre, m12, v2, m23],
            [m30, centre, m23, v3],
        ];
        for verts in child_verts {
            self.cells.push(Cell {
                verts,
                level,
                parent: Some(id),
                children: None,
                active: true,
            });
        }
        self.cells[id].children = Some([base, base + 1, base + 2, base + 3]);
        self.cells[id].active = false;
    }

    /// Midpoint vertex of edge (p, q), creating and recording it on first
    /// use. New vertices on a boundary ring are snapped to the exact circle.
    fn edge_midpoint_vertex(&mut self, p: usize, q: usize) -> usize {
        let key = edge_key(p, q);
        if let Some(&m) = self.edge_midpoint.get(&key) {
            return m;
        }
        let a = self.vertices[p];
        let b = self.vertices[q];
        let mut pos = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let tag = match (self.vertex_tags[p], self.vertex_tags[q]) {
            (BoundaryTag::Inner, BoundaryTag::Inner) => {
                pos = project_to_circle(pos, self.inner_radius);
                BoundaryTag::Inner
            }
            (BoundaryTag::Outer, BoundaryTag::Outer) => {
                pos = project_to_circle(pos, 1.0);
                BoundaryTag::Outer
            }
            _ => BoundaryTag::Interior,
        };
        let m = self.push_vertex(pos, tag);
        self.edge_midpoint.insert(key, m);
        self.midpoint_of.insert(m, key);
        m
    }

    fn push_vertex(&mut self, p: Point, tag: BoundaryTag) -> usize {
        self.vertices.push(p);
        self.vertex_tags.push(tag);
        self.vertices.len() - 1
    }

    fn rebuild_topology(&mut self) {
        self.active = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.active)
            .map(|(i, _)| i)
            .collect();
        self.edge_cells.clear();
        for &id in &self.active {
            for k in 0..4 {
                let (p, q) = self.cell_edge(id, k);
                let pair = self.edge_cells.entry(edge_key(p, q)).or_insert([None; 2]);
                if pair[0].is_none() {
                    pair[0] = Some(id);
                } else {
                    debug_assert!(pair[1].is_none(), "edge shared by more than two cells");
                    pair[1] = Some(id);
                }
            }
        }
        let mut nodes: Vec<usize> = self
            .active
            .iter()
            .flat_map(|&id| self.cells[id].verts)
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        self.active_nodes = nodes;
        self.rebuild_constraints();
        self.revision += 1;
    }

    fn rebuild_constraints(&mut self) {
        let mut set = ConstraintSet::default();
        let mut seen: HashSet<usize> = HashSet::new();
        for &id in &self.active {
            for k in 0..4 {
                let (p, q) = self.cell_edge(id, k);
                let key = edge_key(p, q);
                if let Some(&mid) = self.edge_midpoint.get(&key) {
                    let split = self.edge_cells.contains_key(&edge_key(p, mid))
                        || self.edge_cells.contains_key(&edge_key(mid, q));
                    if split && seen.insert(mid) {
                        set.entries.push(HangingConstraint {
                            node: mid,
                            masters: [(key.0, 0.5), (key.1, 0.5)],
                        });
                    }
                }
            }
        }
        set.rebuild_index();
        debug_assert!(
            set.entries
                .iter()
                .all(|c| c.masters.iter().all(|&(m, _)| set.get(m).is_none())),
            "hanging-node masters must be regular vertices"
        );
        self.constraints = set;
    }

    fn check_orientation(&self) -> Result<(), MeshError> {
        for &id in &self.active {
            let c = self.cell_corners(id);
            // det J of the bilinear map is affine in each reference
            // coordinate, so positivity at the four corners implies
            // positivity inside.
            for k in 0..4 {
                let prev = c[(k + 3) % 4];
                let here = c[k];
                let next = c[(k + 1) % 4];
                let det = (next[0] - here[0]) * (prev[1] - here[1])
                    - (next[1] - here[1]) * (prev[0] - here[0]);
                if det <= 0.0 {
                    return Err(MeshError::InvertedCell { cell: id, det });
                }
            }
        }
        Ok(())
    }
}

fn project_to_circle(p: Point, radius: f64) -> Point {
    let norm = (p[0] * p[0] + p[1] * p[1]).sqrt();
    [p[0] * radius / norm, p[1] * radius / norm]
}

/// Exact area of the inscribed polygonal annulus with `n_theta` sides:
/// (n/2) sin(2 pi / n) (1 - a^2). Converges to pi (1 - a^2).
pub fn polygonal_annulus_area(a: f64, n_theta: usize) -> f64 {
    let n = n_theta as f64;
    0.5 * n * (std::f64::consts::TAU / n).sin() * (1.0 - a * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_annulus_counts() {
        let mesh = AnnulusMesh::build_coarse_annulus(0.2, 8, 40).unwrap();
        assert_eq!(mesh.n_active(), 320);
        assert_eq!(mesh.n_vertices(), 9 * 40);

        let small = AnnulusMesh::build_coarse_annulus(0.5, 1, 4).unwrap();
        assert_eq!(small.n_active(), 4);
        assert_eq!(small.n_vertices(), 8);
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(AnnulusMesh::build_coarse_annulus(0.0, 8, 40).is_err());
        assert!(AnnulusMesh::build_coarse_annulus(1.0, 8, 40).is_err());
        assert!(AnnulusMesh::build_coarse_annulus(-0.2, 8, 40).is_err());
        assert!(AnnulusMesh::build_coarse_annulus(0.2, 0, 40).is_err());
        assert!(AnnulusMesh::build_coarse_annulus(0.2, 8, 3).is_err());
    }

    #[test]
    fn coarse_area_matches_polygon_formula() {
        for n_theta in [8, 40, 160] {
            let mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, n_theta).unwrap();
            let expect = polygonal_annulus_area(0.2, n_theta);
            assert!(
                (mesh.total_area() - expect).abs() < 1e-12,
                "n_theta = {n_theta}: {} vs {}",
                mesh.total_area(),
                expect
            );
        }
    }

    #[test]
    fn area_converges_under_azimuthal_refinement() {
        let exact = std::f64::consts::PI * (1.0 - 0.04);
        let mut last = f64::INFINITY;
        for n_theta in [20, 40, 80, 160] {
            let mesh = AnnulusMesh::build_coarse_annulus(0.2, 2, n_theta).unwrap();
            let err = (mesh.total_area() - exact).abs();
            assert!(err < last);
            last = err;
        }
        // Inscribed-polygon deficit at n_theta = 160: pi(1-a^2)(1 - sinc(2pi/160)).
        assert!(last < 1e-3);
    }

    #[test]
    fn refine_one_interior_cell() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 8).unwrap();
        let n0 = mesh.n_active();
        let mut marks = vec![Mark::Keep; n0];
        // Pick a cell away from the boundary rings.
        let pos = mesh
            .active_cells()
            .iter()
            .position(|&id| {
                mesh.cell_corners(id)
                    .iter()
                    .all(|p| {
                        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                        r > 0.3 && r < 0.9
                    })
            })
            .unwrap();
        marks[pos] = Mark::Refine;
        assert!(mesh.refine_and_coarsen(&marks));
        assert_eq!(mesh.n_active(), n0 + 3);
        assert!(mesh.is_one_irregular());
        assert_eq!(mesh.constraints().len(), 4);
        for c in mesh.constraints().iter() {
            assert_eq!(c.masters[0].1, 0.5);
            assert_eq!(c.masters[1].1, 0.5);
        }
    }

    #[test]
    fn refine_all_quadruples() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 2, 8).unwrap();
        let n0 = mesh.n_active();
        mesh.refine_uniform(1);
        assert_eq!(mesh.n_active(), 4 * n0);
        assert!(mesh.constraints().is_empty());
        assert!(mesh.is_one_irregular());
    }

    #[test]
    fn coarsen_round_trip() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 2, 8).unwrap();
        let n0 = mesh.n_active();
        let mut marks = vec![Mark::Keep; n0];
        marks[3] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        assert_eq!(mesh.n_active(), n0 + 3);
        let refined_id = 16; // first child created
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
        let _ = refined_id;
        assert!(mesh.refine_and_coarsen(&marks));
        assert_eq!(mesh.n_active(), n0);
        assert!(mesh.constraints().is_empty());
        // Identical active cells as the original coarse mesh.
        let levels: Vec<u32> = mesh
            .active_cells()
            .iter()
            .map(|&id| mesh.cell(id).level)
            .collect();
        assert!(levels.iter().all(|&l| l == 0));
    }

    #[test]
    fn partial_coarsen_group_is_demoted() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 2, 8).unwrap();
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[0] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        let n = mesh.n_active();
        // Mark only three of the four children.
        let mut marks = vec![Mark::Keep; n];
        let mut found = 0;
        for (pos, &id) in mesh.active_cells().iter().enumerate() {
            if mesh.cell(id).level == 1 && found < 3 {
                marks[pos] = Mark::Coarsen;
                found += 1;
            }
        }
        assert!(!mesh.refine_and_coarsen(&marks));
        assert_eq!(mesh.n_active(), n);
    }

    #[test]
    fn closure_keeps_one_irregularity() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 4, 16).unwrap();
        // Refine a single cell twice; the second round must drag neighbours up.
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[10] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        let child_pos = mesh
            .active_cells()
            .iter()
            .position(|&id| mesh.cell(id).level == 1)
            .unwrap();
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[child_pos] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        assert!(mesh.is_one_irregular());
        assert!(mesh
            .active_cells()
            .iter()
            .any(|&id| mesh.cell(id).level == 2));
    }

    #[test]
    fn max_level_is_enforced() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.5, 1, 4).unwrap();
        mesh.set_max_level(2);
        mesh.refine_uniform(5);
        let max = mesh
            .active_cells()
            .iter()
            .map(|&id| mesh.cell(id).level)
            .max()
            .unwrap();
        assert_eq!(max, 2);
    }

    #[test]
    fn boundary_midpoints_land_on_circles() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.3, 2, 8).unwrap();
        mesh.refine_uniform(2);
        for &v in mesh.active_nodes() {
            let p = mesh.vertex(v);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            match mesh.vertex_tag(v) {
                BoundaryTag::Inner => assert!((r - 0.3).abs() < 1e-14),
                BoundaryTag::Outer => assert!((r - 1.0).abs() < 1e-14),
                BoundaryTag::Interior => assert!(r > 0.3 - 1e-12 && r < 1.0 + 1e-12),
            }
        }
    }

    #[test]
    fn interior_area_preserved_under_refinement() {
        // Refining an interior cell tiles it exactly; only boundary cells may
        // change total area through circle snapping.
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 6, 12).unwrap();
        let before = mesh.total_area();
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        let pos = mesh
            .active_cells()
            .iter()
            .position(|&id| {
                mesh.cell_corners(id).iter().all(|p| {
                    let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                    r > 0.35 && r < 0.9
                })
            })
            .unwrap();
        marks[pos] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        assert!((mesh.total_area() - before).abs() < 1e-13);
    }

    #[test]
    fn conforming_fine_interface_has_no_hanging_node() {
        let mut mesh = AnnulusMesh::build_coarse_annulus(0.2, 2, 8).unwrap();
        // Refine two azimuthally adjacent cells in the same ring.
        let mut marks = vec![Mark::Keep; mesh.n_active()];
        marks[0] = Mark::Refine;
        marks[1] = Mark::Refine;
        mesh.refine_and_coarsen(&marks);
        // The interface between cells 0 and 1 is conforming: the midpoint on
        // the shared edge is a corner of children on both sides.
        // 2 refined cells -> 7 boundary edges of the refined patch minus the
        // shared one; hanging nodes only on coarse-facing interior edges.
        assert!(mesh.is_one_irregular());
        for c in mesh.constraints().iter() {
            // No constrained node may sit on the shared conforming edge:
            // each hanging node's masters must belong to exactly one
            // still-active coarse cell edge.
            let (p, q) = (c.masters[0].0, c.masters[1].0);
            let key = edge_key(p, q);
            let owners = mesh.edge_cells.get(&key).unwrap();
            assert!(owners.iter().flatten().count() == 1);
        }
        // 4 hanging nodes: each refined boundary-ring cell hangs on its ring
        // neighbour above and its free azimuthal side; the shared edge is
        // conforming and the inner-circle edge is boundary.
        assert_eq!(mesh.constraints().len(), 4);
    }
}
