//! Linear simplicial meshes of the polyhedral approximation Ω_h^(1).
//!
//! Every mesh built here satisfies:
//!
//! - boundary vertices (vertices of boundary faces) lie on Γ and are numbered
//!   first, `0..n_boundary_vertices`;
//! - cells are positively oriented;
//! - within each cell an interior vertex comes first, followed by the cell's
//!   boundary vertices, so that a cell's boundary face (when it has one) is
//!   the face opposite local vertex 0.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use crate::geometry::{Domain, DomainKind, ON_BOUNDARY_TOL};
use crate::linalg::{self, Mat3, Vec3};
use crate::{Error, Result};

pub type Cell = [usize; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Vec3>,
    cells: Vec<Cell>,
    /// `(cell, local face)`; local face `i` is opposite local vertex `i`.
    boundary_faces: Vec<(usize, usize)>,
    on_boundary: Vec<bool>,
    n_boundary_vertices: usize,
    h: f64,
}

/// Measurements collected by [`Mesh::check`].
#[derive(Clone, Debug, PartialEq)]
pub struct MeshAudit {
    pub interior_faces: usize,
    pub boundary_faces: usize,
    pub min_det: f64,
    /// max cell diameter / min inscribed-ball diameter
    pub quasi_uniformity: f64,
    pub max_boundary_distance: f64,
}

type FaceKey = [usize; 3];

fn face_key(cell: &[usize], local: usize) -> FaceKey {
    let mut key = [usize::MAX; 3];
    let mut m = 0;
    for (i, &v) in cell.iter().enumerate() {
        if i != local {
            key[m] = v;
            m += 1;
        }
    }
    key[..m].sort_unstable();
    key
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn cell_matrix(vertices: &[Vec3], cell: &[usize]) -> Mat3 {
    let n = cell.len() - 1;
    let origin = vertices[cell[0]];
    let mut b = [[0.0; 3]; 3];
    for j in 0..n {
        let e = linalg::sub(&vertices[cell[j + 1]], &origin);
        for i in 0..n {
            b[i][j] = e[i];
        }
    }
    b
}

fn cell_det(vertices: &[Vec3], cell: &[usize]) -> f64 {
    linalg::det(&cell_matrix(vertices, cell), cell.len() - 1)
}

fn cell_diameter(vertices: &[Vec3], cell: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..cell.len() {
        for j in (i + 1)..cell.len() {
            d = d.max(linalg::distance(&vertices[cell[i]], &vertices[cell[j]]));
        }
    }
    d
}

fn face_measure(vertices: &[Vec3], face: &[usize]) -> f64 {
    match face.len() {
        2 => linalg::distance(&vertices[face[0]], &vertices[face[1]]),
        3 => {
            let a = linalg::sub(&vertices[face[1]], &vertices[face[0]]);
            let b = linalg::sub(&vertices[face[2]], &vertices[face[0]]);
            0.5 * linalg::norm(&linalg::cross(&a, &b))
        }
        _ => 0.0,
    }
}

fn inscribed_diameter(vertices: &[Vec3], cell: &[usize]) -> f64 {
    let n = cell.len() - 1;
    let volume = cell_det(vertices, cell).abs() / if n == 2 { 2.0 } else { 6.0 };
    let surface: f64 = (0..=n)
        .map(|i| {
            let face: Vec<usize> = cell
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .collect();
            face_measure(vertices, &face)
        })
        .sum();
    2.0 * n as f64 * volume / surface
}

impl Mesh {
    /// Builds a mesh from raw vertices and cells.
    ///
    /// Boundary faces are the faces owned by exactly one cell; boundary
    /// vertices are their vertices. Cell vertex order is rearranged so that an
    /// interior vertex comes first and the cell is positively oriented. Vertex
    /// numbering is kept as given; see [`order_nodes_boundary_first`].
    pub fn new(dim: usize, vertices: Vec<Vec3>, cells: Vec<Cell>) -> Result<Mesh> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidInput(format!("unsupported dimension {dim}")));
        }
        let nv = vertices.len();
        for (c, cell) in cells.iter().enumerate() {
            if cell[..=dim].iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} references a missing vertex"
                )));
            }
        }

        let mut face_count: HashMap<FaceKey, usize> = HashMap::new();
        for cell in &cells {
            for i in 0..=dim {
                *face_count.entry(face_key(&cell[..=dim], i)).or_insert(0) += 1;
            }
        }
        if let Some((key, count)) = face_count.iter().find(|(_, &count)| count > 2) {
            return Err(Error::InvalidMesh(format!(
                "face {:?} is shared by {count} cells",
                &key[..dim]
            )));
        }

        let mut on_boundary = vec![false; nv];
        for cell in &cells {
            for i in 0..=dim {
                if face_count[&face_key(&cell[..=dim], i)] == 1 {
                    for (j, &v) in cell[..=dim].iter().enumerate() {
                        if j != i {
                            on_boundary[v] = true;
                        }
                    }
                }
            }
        }

        let mut canonical = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            canonical.push(canonicalize_cell(
                &vertices,
                &cell[..=dim],
                &on_boundary,
                c,
            )?);
        }

        let mut boundary_faces = Vec::new();
        for (c, cell) in canonical.iter().enumerate() {
            for i in 0..=dim {
                if face_count[&face_key(&cell[..=dim], i)] == 1 {
                    boundary_faces.push((c, i));
                }
            }
        }

        let n_boundary_vertices = on_boundary.iter().filter(|&&b| b).count();
        let mut mesh = Mesh {
            dim,
            vertices,
            cells: canonical,
            boundary_faces,
            on_boundary,
            n_boundary_vertices,
            h: 0.0,
        };
        mesh.h = mesh_size(&mesh);
        Ok(mesh)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Vertex indices of cell `c` (length `dim + 1`).
    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c][..=self.dim]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.cells.iter().map(move |c| &c[..=self.dim])
    }

    pub fn boundary_faces(&self) -> &[(usize, usize)] {
        &self.boundary_faces
    }

    /// Vertex indices of local face `local` of cell `c`, in increasing local order.
    pub fn face_vertices(&self, c: usize, local: usize) -> Vec<usize> {
        self.cell(c)
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != local)
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn n_boundary_vertices(&self) -> usize {
        self.n_boundary_vertices
    }

    /// Number of vertices of cell `c` on the boundary.
    pub fn cell_boundary_count(&self, c: usize) -> usize {
        self.cell(c)
            .iter()
            .filter(|&&v| self.on_boundary[v])
            .count()
    }

    /// Recorded mesh size `h`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cell_det(&self, c: usize) -> f64 {
        cell_det(&self.vertices, self.cell(c))
    }

    pub fn is_boundary_ordered(&self) -> bool {
        (0..self.n_vertices()).all(|v| self.on_boundary[v] == (v < self.n_boundary_vertices))
    }

    /// Checks every structural and geometric invariant against `domain`.
    pub fn check(&self, domain: &Domain) -> Result<MeshAudit> {
        if domain.dimension() != self.dim {
            return Err(Error::InvalidInput(format!(
                "mesh dimension {} does not match domain dimension {}",
                self.dim,
                domain.dimension()
            )));
        }
        if !self.is_boundary_ordered() {
            return Err(Error::InvalidMesh(
                "boundary vertices are not numbered first".into(),
            ));
        }
        let mut max_boundary_distance: f64 = 0.0;
        for v in 0..self.n_boundary_vertices {
            let d = domain.signed_distance(&self.vertices[v]).abs();
            if d > ON_BOUNDARY_TOL {
                return Err(Error::InvalidMesh(format!(
                    "boundary vertex {v} is at distance {d:e} from the boundary"
                )));
            }
            max_boundary_distance = max_boundary_distance.max(d);
        }

        let mut min_det = f64::INFINITY;
        let mut min_inscribed = f64::INFINITY;
        for c in 0..self.n_cells() {
            let det = self.cell_det(c);
            if det <= 0.0 {
                return Err(Error::InvertedCell { cell: c, det });
            }
            min_det = min_det.min(det);
            min_inscribed = min_inscribed.min(inscribed_diameter(&self.vertices, self.cell(c)));
            if self.cell_boundary_count(c) == self.dim + 1 {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} has all vertices on the boundary"
                )));
            }
        }

        let mut face_count: HashMap<FaceKey, usize> = HashMap::new();
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for cell in self.cells() {
            for i in 0..=self.dim {
                *face_count.entry(face_key(cell, i)).or_insert(0) += 1;
            }
            for i in 0..=self.dim {
                for j in (i + 1)..=self.dim {
                    edges.insert(edge_key(cell[i], cell[j]));
                }
            }
        }
        let boundary_keys: HashSet<FaceKey> = self
            .boundary_faces
            .iter()
            .map(|&(c, f)| face_key(self.cell(c), f))
            .collect();
        let mut interior_faces = 0;
        for (key, &count) in &face_count {
            match count {
                1 if boundary_keys.contains(key) => {}
                1 => {
                    return Err(Error::InvalidMesh(format!(
                        "unlisted boundary face {key:?}"
                    )))
                }
                2 => {
                    interior_faces += 1;
                    if key[..self.dim].iter().all(|&v| self.on_boundary[v]) {
                        return Err(Error::InvalidMesh(format!(
                            "interior face {:?} has all vertices on the boundary",
                            &key[..self.dim]
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "face {key:?} shared by {count} cells"
                    )))
                }
            }
        }
        if boundary_keys.len() != self.boundary_faces.len() {
            return Err(Error::InvalidMesh("duplicate boundary faces".into()));
        }

        if self.dim == 3 {
            let mut boundary_edges = HashSet::new();
            for &(c, f) in &self.boundary_faces {
                let face = self.face_vertices(c, f);
                for i in 0..face.len() {
                    for j in (i + 1)..face.len() {
                        boundary_edges.insert(edge_key(face[i], face[j]));
                    }
                }
            }
            for &(a, b) in &edges {
                if self.on_boundary[a] && self.on_boundary[b] && !boundary_edges.contains(&(a, b)) {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({a}, {b}) joins boundary vertices through the interior"
                    )));
                }
            }
        }

        for &(c, f) in &self.boundary_faces {
            if f != 0 {
                return Err(Error::InvalidMesh(format!(
                    "boundary face of cell {c} is not opposite its first vertex"
                )));
            }
            // containment Γ_h ⊂ U_δ, sampled at the face centroid and edge midpoints
            let face = self.face_vertices(c, f);
            let mut samples = Vec::new();
            let mut centroid = [0.0; 3];
            for &v in &face {
                linalg::axpy(1.0 / face.len() as f64, &self.vertices[v], &mut centroid);
            }
            samples.push(centroid);
            for i in 0..face.len() {
                for j in (i + 1)..face.len() {
                    samples.push(linalg::scale(
                        0.5,
                        &linalg::add(&self.vertices[face[i]], &self.vertices[face[j]]),
                    ));
                }
            }
            for x in samples {
                if !domain.in_strip(&x) {
                    return Err(Error::OutsideStrip {
                        distance: domain.signed_distance(&x),
                        strip_width: domain.strip_width(),
                    });
                }
            }
        }

        Ok(MeshAudit {
            interior_faces,
            boundary_faces: self.boundary_faces.len(),
            min_det,
            quasi_uniformity: self.h / min_inscribed,
            max_boundary_distance,
        })
    }

    /// Writes the mesh in the plain-text exchange format.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let mut s = String::new();
        writeln!(
            s,
            "{} {} {} {}",
            self.dim,
            self.n_vertices(),
            self.n_cells(),
            self.boundary_faces.len()
        )
        .unwrap();
        for v in &self.vertices {
            let coords: Vec<String> = v[..self.dim].iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(s, "{}", coords.join(" ")).unwrap();
        }
        for cell in self.cells() {
            let idx: Vec<String> = cell.iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", idx.join(" ")).unwrap();
        }
        for &(c, f) in &self.boundary_faces {
            writeln!(s, "{c} {f}").unwrap();
        }
        out.write_all(s.as_bytes())?;
        Ok(())
    }

    /// Reads a mesh in the plain-text exchange format.
    ///
    /// The listed boundary faces must agree with the faces owned by a single
    /// cell.
    pub fn read_text<R: Read>(input: R) -> Result<Mesh> {
        let reader = BufReader::new(input);
        let mut lines = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if !line.trim().is_empty() {
                lines.push((i + 1, line));
            }
        }
        let mut iter = lines.into_iter();
        let parse_err = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let (hl, header) = iter.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(hl, &e.to_string()))?;
        if head.len() != 4 {
            return Err(parse_err(hl, "expected `n nv nc nbf`"));
        }
        let (dim, nv, nc, nbf) = (head[0], head[1], head[2], head[3]);
        if dim != 2 && dim != 3 {
            return Err(parse_err(hl, "dimension must be 2 or 3"));
        }
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (l, line) = iter
                .next()
                .ok_or_else(|| parse_err(hl, "missing vertex lines"))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(l, &e.to_string()))?;
            if vals.len() != dim {
                return Err(parse_err(l, "wrong number of coordinates"));
            }
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(&vals);
            vertices.push(p);
        }
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (l, line) = iter
                .next()
                .ok_or_else(|| parse_err(hl, "missing cell lines"))?;
            let idx: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(l, &e.to_string()))?;
            if idx.len() != dim + 1 {
                return Err(parse_err(l, "wrong number of cell vertices"));
            }
            let mut cell = [0; 4];
            cell[..=dim].copy_from_slice(&idx);
            cells.push(cell);
        }
        let mut listed = HashSet::new();
        for _ in 0..nbf {
            let (l, line) = iter
                .next()
                .ok_or_else(|| parse_err(hl, "missing boundary face lines"))?;
            let idx: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(l, &e.to_string()))?;
            if idx.len() != 2 || idx[0] >= nc || idx[1] > dim {
                return Err(parse_err(l, "invalid boundary face"));
            }
            listed.insert(face_key(&cells[idx[0]][..=dim], idx[1]));
        }
        if let Some((l, _)) = iter.next() {
            return Err(parse_err(l, "trailing data"));
        }
        let mesh = Mesh::new(dim, vertices, cells)?;
        let found: HashSet<FaceKey> = mesh
            .boundary_faces
            .iter()
            .map(|&(c, f)| face_key(mesh.cell(c), f))
            .collect();
        if found != listed {
            return Err(Error::InvalidMesh(
                "listed boundary faces do not match the mesh topology".into(),
            ));
        }
        Ok(mesh)
    }
}

/// Orders a cell as `[interior, boundary..., remaining interior...]` with
/// positive orientation.
fn canonicalize_cell(
    vertices: &[Vec3],
    cell: &[usize],
    on_boundary: &[bool],
    c: usize,
) -> Result<Cell> {
    let n = cell.len() - 1;
    let interior: Vec<usize> = cell.iter().copied().filter(|&v| !on_boundary[v]).collect();
    let boundary: Vec<usize> = cell.iter().copied().filter(|&v| on_boundary[v]).collect();
    let mut order = Vec::with_capacity(n + 1);
    if interior.is_empty() {
        // rejected by `Mesh::check`, but kept constructible for single-cell meshes
        order.extend_from_slice(cell);
    } else {
        order.push(interior[0]);
        order.extend_from_slice(&boundary);
        order.extend_from_slice(&interior[1..]);
    }
    let det = cell_det(vertices, &order);
    if det == 0.0 || !det.is_finite() {
        return Err(Error::InvertedCell { cell: c, det });
    }
    if det < 0.0 {
        if boundary.len() >= 2 && !interior.is_empty() {
            order.swap(1, 2);
        } else {
            order.swap(n - 1, n);
        }
    }
    let mut out = [0; 4];
    out[..=n].copy_from_slice(&order);
    Ok(out)
}

/// Maximum over cells of the largest pairwise vertex distance.
pub fn mesh_size(mesh: &Mesh) -> f64 {
    mesh.cells()
        .map(|cell| cell_diameter(&mesh.vertices, cell))
        .fold(0.0, f64::max)
}

/// Renumbers vertices so boundary vertices occupy `0..n_boundary_vertices`.
/// Relative order within each class is preserved, so an already ordered mesh
/// is returned unchanged.
pub fn order_nodes_boundary_first(mesh: &Mesh) -> Mesh {
    let nv = mesh.n_vertices();
    let mut new_index = vec![0; nv];
    let mut next = 0;
    for (v, slot) in new_index.iter_mut().enumerate() {
        if mesh.on_boundary[v] {
            *slot = next;
            next += 1;
        }
    }
    for (v, slot) in new_index.iter_mut().enumerate() {
        if !mesh.on_boundary[v] {
            *slot = next;
            next += 1;
        }
    }
    let mut vertices = vec![[0.0; 3]; nv];
    let mut on_boundary = vec![false; nv];
    for v in 0..nv {
        vertices[new_index[v]] = mesh.vertices[v];
        on_boundary[new_index[v]] = mesh.on_boundary[v];
    }
    let cells = mesh
        .cells
        .iter()
        .map(|cell| {
            let mut out = [0; 4];
            for i in 0..=mesh.dim {
                out[i] = new_index[cell[i]];
            }
            out
        })
        .collect();
    Mesh {
        dim: mesh.dim,
        vertices,
        cells,
        boundary_faces: mesh.boundary_faces.clone(),
        on_boundary,
        n_boundary_vertices: mesh.n_boundary_vertices,
        h: mesh.h,
    }
}

/// Largest supported coarse-ring count (disk) / refinement count (ball) for
/// mesh generation.
const MAX_DISK_RINGS: usize = 4096;
const MAX_BALL_REFINEMENTS: usize = 6;

/// Builds a quasi-uniform linear mesh of the domain whose size is as close
/// to `target_h` as the mesh family allows, with `h ≤ 1.5 target_h`.
///
/// The disk is meshed by concentric rings (ring `i` carries `6i` vertices,
/// the outer ring lies on Γ); the ball starts from the icosahedron and is
/// refined with boundary projection.
pub fn generate_linear_mesh(domain: &Domain, target_h: f64) -> Result<Mesh> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "target h must be positive, got {target_h}"
        )));
    }
    // Walk the family from coarse to fine and keep the member whose size is
    // closest to the target on a log scale among those with h <= 1.5 target.
    let mut best: Option<Mesh> = None;
    let score = |m: &Mesh| (m.h() / target_h).ln().abs();
    let mut consider = |m: Mesh| -> bool {
        let below = m.h() <= target_h;
        if m.h() <= 1.5 * target_h && best.as_ref().is_none_or(|b| score(&m) < score(b)) {
            best = Some(m);
        }
        below
    };
    match domain.kind() {
        DomainKind::UnitDisk => {
            let mut rings = 1;
            while !consider(disk_ring_mesh(rings)?) {
                if rings >= MAX_DISK_RINGS {
                    return Err(Error::InvalidInput(format!(
                        "target h {target_h} is too small"
                    )));
                }
                rings += 1;
            }
        }
        DomainKind::UnitBall => {
            let mut mesh = order_nodes_boundary_first(&icosahedron_mesh()?);
            let mut level = 0;
            while !consider(mesh.clone()) {
                if level >= MAX_BALL_REFINEMENTS {
                    return Err(Error::InvalidInput(format!(
                        "target h {target_h} is too small"
                    )));
                }
                mesh = refine(&mesh, domain)?;
                level += 1;
            }
        }
    }
    let mesh = best.expect("the finest candidate satisfies h <= target");
    let mesh = order_nodes_boundary_first(&mesh);
    mesh.check(domain)?;
    Ok(mesh)
}

/// `levels` meshes starting from `generate_linear_mesh(domain, h0)`, each
/// with half the size of the previous one. Disk levels double the ring count;
/// ball levels are red refinements with boundary projection.
pub fn mesh_hierarchy(domain: &Domain, h0: f64, levels: usize) -> Result<Vec<Mesh>> {
    let coarse = generate_linear_mesh(domain, h0)?;
    let mut out = Vec::with_capacity(levels);
    match domain.kind() {
        DomainKind::UnitDisk => {
            let rings = coarse.n_boundary_vertices() / 6;
            out.push(coarse);
            for l in 1..levels {
                let m = order_nodes_boundary_first(&disk_ring_mesh(rings << l)?);
                m.check(domain)?;
                out.push(m);
            }
        }
        DomainKind::UnitBall => {
            out.push(coarse);
            for _ in 1..levels {
                let next = refine(out.last().expect("nonempty"), domain)?;
                out.push(next);
            }
        }
    }
    out.truncate(levels);
    Ok(out)
}

/// Concentric-ring triangulation of the unit disk with `rings` rings.
pub fn disk_ring_mesh(rings: usize) -> Result<Mesh> {
    assert!(rings >= 1);
    let m = rings;
    let mut vertices = vec![[0.0, 0.0, 0.0]];
    let mut ring_start = vec![0usize];
    for i in 1..=m {
        ring_start.push(vertices.len());
        let r = i as f64 / m as f64;
        let count = 6 * i;
        for j in 0..count {
            let phi = std::f64::consts::TAU * j as f64 / count as f64;
            let (s, c) = phi.sin_cos();
            if i == m {
                // exactly on Γ up to rounding of sin/cos
                let norm = c.hypot(s);
                vertices.push([c / norm, s / norm, 0.0]);
            } else {
                vertices.push([r * c, r * s, 0.0]);
            }
        }
    }
    let ring_vertex = |i: usize, j: usize| -> usize {
        if i == 0 {
            0
        } else {
            ring_start[i] + j % (6 * i)
        }
    };
    let mut cells = Vec::new();
    for i in 1..=m {
        for sector in 0..6 {
            if i == 1 {
                cells.push([0, ring_vertex(1, sector), ring_vertex(1, sector + 1), 0]);
                continue;
            }
            // zip inner ring (i-1 segments per sector) with outer ring (i segments)
            let (mut a, mut b) = (0usize, 0usize);
            let inner_n = i - 1;
            let outer_n = i;
            while a < inner_n || b < outer_n {
                let inner_next = (a + 1) as f64 / inner_n as f64;
                let outer_next = (b + 1) as f64 / outer_n as f64;
                let p = ring_vertex(i - 1, sector * inner_n + a);
                let q = ring_vertex(i, sector * outer_n + b);
                if b < outer_n && (a == inner_n || outer_next <= inner_next) {
                    let q1 = ring_vertex(i, sector * outer_n + b + 1);
                    cells.push([p, q, q1, 0]);
                    b += 1;
                } else {
                    let p1 = ring_vertex(i - 1, sector * inner_n + a + 1);
                    cells.push([p, q, p1, 0]);
                    a += 1;
                }
            }
        }
    }
    Mesh::new(2, vertices, cells)
}

/// The icosahedron inscribed in the unit sphere, split into twenty
/// tetrahedra around the origin.
pub fn icosahedron_mesh() -> Result<Mesh> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut vertices = vec![[0.0, 0.0, 0.0]];
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            vertices.push([0.0, a, b]);
            vertices.push([a, b, 0.0]);
            vertices.push([b, 0.0, a]);
        }
    }
    let norm = (1.0 + phi * phi).sqrt();
    for v in vertices.iter_mut().skip(1) {
        *v = linalg::scale(1.0 / norm, v);
    }
    let edge = 2.0 / norm;
    let is_edge =
        |a: usize, b: usize| (linalg::distance(&vertices[a], &vertices[b]) - edge).abs() < 1e-9;
    let mut cells = Vec::new();
    for a in 1..13 {
        for b in (a + 1)..13 {
            for c in (b + 1)..13 {
                if is_edge(a, b) && is_edge(b, c) && is_edge(a, c) {
                    cells.push([0, a, b, c]);
                }
            }
        }
    }
    Mesh::new(3, vertices, cells)
}

/// The octahedron `|x|₁ ≤ 1` split into eight tetrahedra around the origin.
pub fn octahedron_mesh() -> Result<Mesh> {
    let vertices = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut cells = Vec::new();
    for x in [1, 2] {
        for y in [3, 4] {
            for z in [5, 6] {
                cells.push([0, x, y, z]);
            }
        }
    }
    Mesh::new(3, vertices, cells)
}

/// Uniform red refinement. Midpoints of boundary edges are projected onto Γ.
pub fn refine(mesh: &Mesh, domain: &Domain) -> Result<Mesh> {
    let dim = mesh.dim;
    if domain.dimension() != dim {
        return Err(Error::InvalidInput(
            "mesh and domain dimensions differ".into(),
        ));
    }
    let mut boundary_edges = HashSet::new();
    for &(c, f) in &mesh.boundary_faces {
        let face = mesh.face_vertices(c, f);
        for i in 0..face.len() {
            for j in (i + 1)..face.len() {
                boundary_edges.insert(edge_key(face[i], face[j]));
            }
        }
    }

    let mut vertices = mesh.vertices.clone();
    let mut projected = Vec::new();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut children: Vec<Cell> = Vec::with_capacity(mesh.n_cells() * if dim == 2 { 4 } else { 8 });

    for cell in mesh.cells() {
        let mut mid = [[usize::MAX; 4]; 4];
        for i in 0..=dim {
            for j in (i + 1)..=dim {
                let key = edge_key(cell[i], cell[j]);
                let idx = *midpoint.entry(key).or_insert_with(|| {
                    let p = linalg::scale(0.5, &linalg::add(&vertices[key.0], &vertices[key.1]));
                    vertices.push(p);
                    if boundary_edges.contains(&key) {
                        projected.push(vertices.len() - 1);
                    }
                    vertices.len() - 1
                });
                mid[i][j] = idx;
                mid[j][i] = idx;
            }
        }
        if dim == 2 {
            let [a, b, c] = [cell[0], cell[1], cell[2]];
            children.push([a, mid[0][1], mid[0][2], 0]);
            children.push([mid[0][1], b, mid[1][2], 0]);
            children.push([mid[0][2], mid[1][2], c, 0]);
            children.push([mid[0][1], mid[1][2], mid[0][2], 0]);
        } else {
            for i in 0..4 {
                let mut child = [cell[i]; 4];
                let mut m = 1;
                for j in 0..4 {
                    if j != i {
                        child[m] = mid[i][j];
                        m += 1;
                    }
                }
                children.push(child);
            }
            // inner octahedron split along its shortest diagonal
            let diagonals = [
                ((0, 1), (2, 3), [(0, 2), (1, 3)], [(0, 3), (1, 2)]),
                ((0, 2), (1, 3), [(0, 1), (2, 3)], [(0, 3), (1, 2)]),
                ((0, 3), (1, 2), [(0, 1), (2, 3)], [(0, 2), (1, 3)]),
            ];
            let mut best = 0;
            let mut best_len = f64::INFINITY;
            for (d, diag) in diagonals.iter().enumerate() {
                let a = mid[diag.0 .0][diag.0 .1];
                let b = mid[diag.1 .0][diag.1 .1];
                let len = linalg::distance(&vertices[a], &vertices[b]);
                if len < best_len - 1e-14 * len.max(1.0) {
                    best_len = len;
                    best = d;
                }
            }
            let (e0, e1, pair_a, pair_b) = diagonals[best];
            let a = mid[e0.0][e0.1];
            let b = mid[e1.0][e1.1];
            let ring = [
                mid[pair_a[0].0][pair_a[0].1],
                mid[pair_b[0].0][pair_b[0].1],
                mid[pair_a[1].0][pair_a[1].1],
                mid[pair_b[1].0][pair_b[1].1],
            ];
            for r in 0..4 {
                children.push([a, b, ring[r], ring[(r + 1) % 4]]);
            }
        }
    }

    // orient with the unprojected coordinates, then project
    for child in children.iter_mut() {
        if cell_det(&vertices, &child[..=dim]) < 0.0 {
            child.swap(dim - 1, dim);
        }
    }
    for &v in &projected {
        vertices[v] = domain.closest_point_in_strip(&vertices[v])?;
    }
    for (c, child) in children.iter().enumerate() {
        let det = cell_det(&vertices, &child[..=dim]);
        if det <= 0.0 {
            return Err(Error::InvertedCell { cell: c, det });
        }
    }

    let refined = order_nodes_boundary_first(&Mesh::new(dim, vertices, children)?);
    refined.check(domain)?;
    Ok(refined)
}
