//! Global Lagrange nodes of the isoparametric space.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::element::{CurvedElementMap, ReferenceElement};
use crate::geometry::Domain;
use crate::linalg::Vec3;
use crate::mesh::Mesh;
use crate::{Error, Result};

/// A global node is identified by the mesh vertices it is attached to
/// together with their barycentric lattice weights, sorted by vertex.
type NodeKey = [(usize, usize); 4];

fn node_key(cell: &[usize], a: &[usize; 4], dim: usize) -> NodeKey {
    let mut key = [(usize::MAX, 0); 4];
    let mut m = 0;
    for i in 0..=dim {
        if a[i] > 0 {
            key[m] = (cell[i], a[i]);
            m += 1;
        }
    }
    key[..m].sort_unstable();
    key
}

/// The degree-`k` isoparametric finite element space on a mesh.
///
/// Nodes are numbered boundary first: boundary vertices, higher-order nodes
/// on boundary faces, interior vertices, interior higher-order nodes. Node
/// coordinates are the images of the reference lattice under the exact
/// curved maps, so boundary nodes lie on Γ.
#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: Mesh,
    domain: Domain,
    reference: ReferenceElement,
    maps: Vec<CurvedElementMap>,
    /// `n_cells × n_basis`, local node order of the reference element.
    connectivity: Vec<usize>,
    coordinates: Vec<Vec3>,
    n_boundary: usize,
}

struct NodeInfo {
    vertex: Option<usize>,
    boundary: bool,
    point: Vec3,
}

/// Builds the space of degree `degree` on `mesh`.
pub fn build_space(mesh: &Mesh, domain: &Domain, degree: usize) -> Result<FeSpace> {
    let dim = mesh.dimension();
    if domain.dimension() != dim {
        return Err(Error::InvalidInput(format!(
            "mesh of dimension {dim} on a domain of dimension {}",
            domain.dimension()
        )));
    }
    if !(1..=crate::element::reference::MAX_DEGREE).contains(&degree) {
        return Err(Error::InvalidInput(format!("unsupported degree {degree}")));
    }
    let reference = ReferenceElement::new(dim, degree);
    let maps = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| CurvedElementMap::new(mesh, c, domain, &reference))
        .collect::<Result<Vec<_>>>()?;

    let nb = reference.n_basis();
    let mut index: HashMap<NodeKey, usize> = HashMap::new();
    let mut nodes: Vec<NodeInfo> = Vec::new();
    let mut provisional = Vec::with_capacity(mesh.n_cells() * nb);
    for (c, map) in maps.iter().enumerate() {
        let cell = mesh.cell(c);
        for (j, a) in reference.multi_indices().iter().enumerate() {
            let key = node_key(cell, a, dim);
            let id = *index.entry(key).or_insert_with(|| {
                let vertex = (key[1].0 == usize::MAX).then_some(key[0].0);
                nodes.push(NodeInfo {
                    vertex,
                    boundary: false,
                    point: map.control_points()[j],
                });
                nodes.len() - 1
            });
            provisional.push(id);
        }
    }
    for &(c, f) in mesh.boundary_faces() {
        for &j in reference.face_nodes(f) {
            nodes[provisional[c * nb + j]].boundary = true;
        }
    }

    // boundary vertices, boundary others, interior vertices, interior others
    let class = |n: &NodeInfo| (!n.boundary as usize) * 2 + n.vertex.is_none() as usize;
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&i| (class(&nodes[i]), nodes[i].vertex.unwrap_or(0), i));
    let mut new_id = vec![0; nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let n_boundary = nodes.iter().filter(|n| n.boundary).count();
    let coordinates = order.iter().map(|&i| nodes[i].point).collect();
    let connectivity = provisional.iter().map(|&i| new_id[i]).collect();

    Ok(FeSpace {
        mesh: mesh.clone(),
        domain: *domain,
        reference,
        maps,
        connectivity,
        coordinates,
        n_boundary,
    })
}

impl FeSpace {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn reference(&self) -> &ReferenceElement {
        &self.reference
    }

    pub fn dimension(&self) -> usize {
        self.mesh.dimension()
    }

    pub fn degree(&self) -> usize {
        self.reference.degree()
    }

    /// Total number of nodes `N`.
    pub fn n_nodes(&self) -> usize {
        self.coordinates.len()
    }

    /// Number of boundary nodes `N_Γ`; they carry indices `0..N_Γ`.
    pub fn n_boundary_nodes(&self) -> usize {
        self.n_boundary
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    pub fn coordinates(&self) -> &[Vec3] {
        &self.coordinates
    }

    /// Global node indices of cell `c` in reference local order.
    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        let nb = self.reference.n_basis();
        &self.connectivity[c * nb..(c + 1) * nb]
    }

    pub fn map(&self, c: usize) -> &CurvedElementMap {
        &self.maps[c]
    }

    pub fn maps(&self) -> &[CurvedElementMap] {
        &self.maps
    }

    /// Global indices of the nodes on local face `f` of cell `c`.
    pub fn face_nodes(&self, c: usize, f: usize) -> Vec<usize> {
        let nodes = self.cell_nodes(c);
        self.reference
            .face_nodes(f)
            .iter()
            .map(|&j| nodes[j])
            .collect()
    }

    /// Nodal interpolant of `u`.
    pub fn interpolate(&self, u: impl Fn(&Vec3) -> f64 + Sync) -> FeFunction<'_> {
        #[allow(clippy::redundant_closure)]
        let coefficients = self.coordinates.par_iter().map(|x| u(x)).collect();
        FeFunction {
            space: self,
            coefficients,
        }
    }

    pub fn trace(&self) -> TraceOperator {
        TraceOperator {
            n: self.n_nodes(),
            n_boundary: self.n_boundary,
        }
    }
}

/// `u_h = Σ_j u_j φ_j`.
#[derive(Clone, Debug)]
pub struct FeFunction<'a> {
    space: &'a FeSpace,
    coefficients: Vec<f64>,
}

impl<'a> FeFunction<'a> {
    pub fn new(space: &'a FeSpace, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: space.n_nodes(),
                found: coefficients.len(),
            });
        }
        Ok(FeFunction {
            space,
            coefficients,
        })
    }

    pub fn space(&self) -> &'a FeSpace {
        self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Coefficients of the boundary nodes, `γ u`.
    pub fn boundary_coefficients(&self) -> &[f64] {
        &self.coefficients[..self.space.n_boundary]
    }
}

/// The selection `γ = (I_{N_Γ}, 0)` of boundary node values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOperator {
    n: usize,
    n_boundary: usize,
}

impl TraceOperator {
    pub fn new(n: usize, n_boundary: usize) -> Self {
        assert!(n_boundary <= n);
        TraceOperator { n, n_boundary }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_boundary_nodes(&self) -> usize {
        self.n_boundary
    }

    /// `γ v`: the first `N_Γ` entries.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(v[..self.n_boundary].to_vec())
    }

    /// `γᵀ w`: zero padding to length `N`.
    pub fn apply_transpose(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.n_boundary {
            return Err(Error::LengthMismatch {
                expected: self.n_boundary,
                found: w.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        out[..self.n_boundary].copy_from_slice(w);
        Ok(out)
    }
}
