//! Curved element maps.
//!
//! Every cell `T` of the linear mesh has its affine map `Φ_T(x̂) = B_T x̂ + b_T`.
//! A cell with `l ≥ 2` vertices on Γ is bent towards Γ by
//!
//! ```text
//!   ρ_T(x̂) = λ*(x̂)^(k+2) (p(y(x̂)) - y(x̂)),   λ*(x̂) = λ_1 + .. + λ_l,
//!   y(x̂)  = Σ_{j ≤ l} (λ_j / λ*) x_j,
//! ```
//!
//! giving the exact curved map `Φ_T^c = Φ_T + ρ_T` (ρ_T = 0 on the facet
//! `λ* = 0` and for cells with at most one boundary vertex). The
//! isoparametric map `Φ_T^(k)` is the degree-`k` Lagrange interpolant of
//! `Φ_T^c`.
//!
//! Cells follow the mesh convention: local vertex 0 is interior and the
//! boundary vertices are local vertices `1..=l`, which coincide with the
//! reference coordinates `x̂_0 .. x̂_{l-1}`.

use crate::element::reference::{ReferenceElement, Tabulation};
use crate::geometry::Domain;
use crate::linalg::{self, Mat3, Vec3};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Affine map of cell `c`: `B_T` has columns `x_i - x_0`, `b_T = x_0`.
pub fn affine_map(mesh: &Mesh, c: usize) -> Result<(Mat3, Vec3)> {
    let cell = mesh.cell(c);
    let n = mesh.dimension();
    let origin = mesh.vertices()[cell[0]];
    let mut b = [[0.0; 3]; 3];
    for j in 0..n {
        let e = linalg::sub(&mesh.vertices()[cell[j + 1]], &origin);
        for i in 0..n {
            b[i][j] = e[i];
        }
    }
    let det = linalg::det(&b, n);
    if det <= 0.0 || !det.is_finite() {
        return Err(Error::InvertedCell { cell: c, det });
    }
    Ok((b, origin))
}

/// `λ*(x̂) = Σ_{j<l} x̂_j`, the barycentric weight of the first `l` boundary
/// vertices.
pub fn lambda_star(xhat: &Vec3, l: usize) -> f64 {
    xhat[..l].iter().sum()
}

/// Projection `y(x̂)` of `Φ_T(x̂)` onto the boundary facet spanned by the
/// boundary vertices `vertices[1..=l]`.
pub fn face_projection_y(xhat: &Vec3, vertices: &[Vec3], l: usize) -> Result<Vec3> {
    let s = lambda_star(xhat, l);
    if s <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "face projection undefined where λ* = {s}"
        )));
    }
    Ok(project_to_facet(xhat, vertices, l, s))
}

fn project_to_facet(xhat: &Vec3, vertices: &[Vec3], l: usize, s: f64) -> Vec3 {
    let mut y = [0.0; 3];
    for j in 0..l {
        linalg::axpy(xhat[j] / s, &vertices[j + 1], &mut y);
    }
    y
}

/// Below this value of `λ*` the correction is taken as zero; the exact value
/// is smaller than `λ*^(k+2)` times the facet-to-Γ distance.
const SIGMA_TOL: f64 = 1e-200;

/// The correction `ρ_T(x̂)` for a cell with boundary vertices `vertices[1..=l]`.
pub fn rho(xhat: &Vec3, vertices: &[Vec3], l: usize, domain: &Domain, degree: usize) -> Vec3 {
    if l < 2 {
        return [0.0; 3];
    }
    let s = lambda_star(xhat, l);
    if s <= SIGMA_TOL {
        return [0.0; 3];
    }
    let y = project_to_facet(xhat, vertices, l, s);
    let py = domain.project_unchecked(&y);
    linalg::scale(s.powi(degree as i32 + 2), &linalg::sub(&py, &y))
}

/// `Dρ_T(x̂)`, derivative with respect to the reference coordinates.
pub fn rho_jacobian(
    xhat: &Vec3,
    vertices: &[Vec3],
    l: usize,
    domain: &Domain,
    degree: usize,
) -> Mat3 {
    let n = domain.dimension();
    let mut jac = [[0.0; 3]; 3];
    if l < 2 {
        return jac;
    }
    let s = lambda_star(xhat, l);
    if s <= SIGMA_TOL {
        return jac;
    }
    let y = project_to_facet(xhat, vertices, l, s);
    let py = domain.project_unchecked(&y);
    let gap = linalg::sub(&py, &y);
    let dp = domain.closest_point_jacobian(&y);
    let k2 = (degree + 2) as f64;
    let sk1 = s.powi(degree as i32 + 1);
    // ∂y/∂x̂_m = (x_{m+1} - y)/s for m < l; the factor 1/s is absorbed in s^(k+1)
    for m in 0..l {
        let dy = linalg::sub(&vertices[m + 1], &y);
        let mut col = linalg::mat_vec(&dp, &dy);
        col = linalg::sub(&col, &dy);
        for i in 0..n {
            jac[i][m] = sk1 * (k2 * gap[i] + col[i]);
        }
    }
    jac
}

/// Geometry of a boundary face at one point.
#[derive(Clone, Copy, Debug)]
pub struct FaceGeometry {
    pub point: Vec3,
    /// Columns of the `n×(n-1)` tangent matrix `G`.
    pub tangents: [Vec3; 2],
    /// `sqrt(det(Gᵀ G))`
    pub measure: f64,
    pub normal: Vec3,
    /// `(Gᵀ G)^{-1}`, leading `(n-1)×(n-1)` block.
    pub metric_inverse: [[f64; 2]; 2],
}

impl FaceGeometry {
    /// Builds the face geometry from the full Jacobian `jac` at the face point,
    /// the reference edge matrix `edges` and a point `inner` on the inside of
    /// the face (used to orient the normal).
    pub fn from_jacobian(
        n: usize,
        point: Vec3,
        jac: &Mat3,
        edges: &[Vec3; 2],
        inner: &Vec3,
    ) -> FaceGeometry {
        let mut tangents = [[0.0; 3]; 2];
        for m in 0..n - 1 {
            tangents[m] = linalg::mat_vec(jac, &edges[m]);
        }
        let (measure, mut normal, metric_inverse) = if n == 2 {
            let t = tangents[0];
            let len2 = linalg::dot(&t, &t);
            let len = len2.sqrt();
            (
                len,
                [t[1] / len, -t[0] / len, 0.0],
                [[1.0 / len2, 0.0], [0.0, 0.0]],
            )
        } else {
            let (a, b) = (tangents[0], tangents[1]);
            let g00 = linalg::dot(&a, &a);
            let g01 = linalg::dot(&a, &b);
            let g11 = linalg::dot(&b, &b);
            let det = g00 * g11 - g01 * g01;
            let c = linalg::cross(&a, &b);
            let len = linalg::norm(&c);
            (
                det.max(0.0).sqrt(),
                linalg::scale(1.0 / len, &c),
                [[g11 / det, -g01 / det], [-g01 / det, g00 / det]],
            )
        };
        if linalg::dot(&normal, &linalg::sub(&point, inner)) < 0.0 {
            normal = linalg::scale(-1.0, &normal);
        }
        FaceGeometry {
            point,
            tangents,
            measure,
            normal,
            metric_inverse,
        }
    }

    /// Surface gradient `G (GᵀG)^{-1} ∂_s ŵ` from the reference surface
    /// derivatives `ds` (components `∂ŵ/∂s_m`).
    pub fn surface_gradient(&self, n: usize, ds: &[f64; 2]) -> Vec3 {
        let mut out = [0.0; 3];
        for a in 0..n - 1 {
            let mut c = 0.0;
            for b in 0..n - 1 {
                c += self.metric_inverse[a][b] * ds[b];
            }
            linalg::axpy(c, &self.tangents[a], &mut out);
        }
        out
    }
}

/// Per-cell curved geometry: affine part, exact map data and the control
/// points `Φ_T^c(x̂^j)` of the isoparametric map.
#[derive(Clone, Debug)]
pub struct CurvedElementMap {
    cell: usize,
    dim: usize,
    degree: usize,
    vertices: [Vec3; 4],
    b: Mat3,
    b_inv: Mat3,
    b_vec: Vec3,
    n_boundary: usize,
    domain: Domain,
    control_points: Vec<Vec3>,
}

impl CurvedElementMap {
    pub fn new(
        mesh: &Mesh,
        c: usize,
        domain: &Domain,
        reference: &ReferenceElement,
    ) -> Result<Self> {
        let dim = mesh.dimension();
        if reference.dimension() != dim || domain.dimension() != dim {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let (b, b_vec) = affine_map(mesh, c)?;
        let b_inv = linalg::inverse(&b, dim).ok_or(Error::InvertedCell { cell: c, det: 0.0 })?;
        let cell = mesh.cell(c);
        let mut vertices = [[0.0; 3]; 4];
        for (i, &v) in cell.iter().enumerate() {
            vertices[i] = mesh.vertices()[v];
        }
        // a cell with every vertex on Γ (single-cell test meshes) stays straight
        let l = match mesh.cell_boundary_count(c) {
            l if l > dim => 0,
            l => l,
        };
        if l >= 2 && !(1..=l).all(|i| mesh.is_boundary_vertex(cell[i])) {
            return Err(Error::InvalidMesh(format!(
                "cell {c} does not list its boundary vertices first after an interior vertex"
            )));
        }
        let mut map = CurvedElementMap {
            cell: c,
            dim,
            degree: reference.degree(),
            vertices,
            b,
            b_inv,
            b_vec,
            n_boundary: if l >= 2 { l } else { 0 },
            domain: *domain,
            control_points: Vec::new(),
        };
        map.control_points = reference.nodes().iter().map(|x| map.exact_map(x)).collect();
        Ok(map)
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn affine_matrix(&self) -> &Mat3 {
        &self.b
    }

    pub fn affine_offset(&self) -> &Vec3 {
        &self.b_vec
    }

    /// Number `l` of boundary vertices used by the correction (0 for cells
    /// that are not bent).
    pub fn boundary_vertex_count(&self) -> usize {
        self.n_boundary
    }

    pub fn is_curved(&self) -> bool {
        self.n_boundary >= 2
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices[..=self.dim]
    }

    /// `Φ_T^c(x̂^j)` at the reference Lagrange nodes.
    pub fn control_points(&self) -> &[Vec3] {
        &self.control_points
    }

    pub fn affine(&self, xhat: &Vec3) -> Vec3 {
        linalg::add(&linalg::mat_vec(&self.b, xhat), &self.b_vec)
    }

    pub fn rho(&self, xhat: &Vec3) -> Vec3 {
        rho(
            xhat,
            &self.vertices,
            self.n_boundary,
            &self.domain,
            self.degree,
        )
    }

    pub fn rho_jacobian(&self, xhat: &Vec3) -> Mat3 {
        rho_jacobian(
            xhat,
            &self.vertices,
            self.n_boundary,
            &self.domain,
            self.degree,
        )
    }

    /// `Φ_T^c(x̂) = Φ_T(x̂) + ρ_T(x̂)`
    pub fn exact_map(&self, xhat: &Vec3) -> Vec3 {
        linalg::add(&self.affine(xhat), &self.rho(xhat))
    }

    /// `DΦ_T^c(x̂) = B_T + Dρ_T(x̂)`
    pub fn exact_jacobian(&self, xhat: &Vec3) -> Mat3 {
        if !self.is_curved() {
            return self.b;
        }
        linalg::mat_add(&self.b, &self.rho_jacobian(xhat))
    }

    /// `Φ_T^(k)(x̂) = Σ_j Φ_T^c(x̂^j) φ_j(x̂)`
    pub fn isoparametric_map(&self, xhat: &Vec3, reference: &ReferenceElement) -> Vec3 {
        let mut values = vec![0.0; reference.n_basis()];
        reference.eval_basis(xhat, &mut values);
        self.combine_points(&values)
    }

    pub(crate) fn combine_points(&self, values: &[f64]) -> Vec3 {
        let mut x = [0.0; 3];
        for (p, &v) in self.control_points.iter().zip(values) {
            linalg::axpy(v, p, &mut x);
        }
        x
    }

    pub(crate) fn combine_jacobian(&self, grads: &[Vec3]) -> Mat3 {
        let mut jac = [[0.0; 3]; 3];
        for (p, g) in self.control_points.iter().zip(grads) {
            for i in 0..self.dim {
                for m in 0..self.dim {
                    jac[i][m] += p[i] * g[m];
                }
            }
        }
        jac
    }

    /// Point and Jacobian of `Φ_T^(k)` at tabulated point `q`.
    pub fn isoparametric_at(&self, tab: &Tabulation, q: usize) -> (Vec3, Mat3) {
        (
            self.combine_points(tab.values_at(q)),
            self.combine_jacobian(tab.gradients_at(q)),
        )
    }

    /// `DΦ_T^(k)(x̂)` and its determinant; a nonpositive determinant is an error.
    pub fn bulk_jacobian(&self, xhat: &Vec3, reference: &ReferenceElement) -> Result<(Mat3, f64)> {
        let mut grads = vec![[0.0; 3]; reference.n_basis()];
        reference.eval_gradients(xhat, &mut grads);
        let jac = self.combine_jacobian(&grads);
        let det = linalg::det(&jac, self.dim);
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::InvertedCell {
                cell: self.cell,
                det,
            });
        }
        Ok((jac, det))
    }

    /// Geometry of local face `face` of `Φ_T^(k)(T̂)` at face coordinates `s`.
    pub fn face_jacobian(
        &self,
        s: &Vec3,
        reference: &ReferenceElement,
        face: usize,
    ) -> Result<FaceGeometry> {
        let (xhat, edges) = reference.face_point(face, s);
        let mut values = vec![0.0; reference.n_basis()];
        let mut grads = vec![[0.0; 3]; reference.n_basis()];
        reference.eval_basis(&xhat, &mut values);
        reference.eval_gradients(&xhat, &mut grads);
        let point = self.combine_points(&values);
        let jac = self.combine_jacobian(&grads);
        let inner = self.control_points[face];
        let geo = FaceGeometry::from_jacobian(self.dim, point, &jac, &edges, &inner);
        if geo.measure <= 0.0 || !geo.measure.is_finite() {
            return Err(Error::DegenerateFace {
                cell: self.cell,
                face,
                measure: geo.measure,
            });
        }
        Ok(geo)
    }

    /// Geometry of local face `face` of the exact curved cell `Φ_T^c(T̂)`.
    pub fn exact_face_geometry(
        &self,
        s: &Vec3,
        reference: &ReferenceElement,
        face: usize,
    ) -> Result<FaceGeometry> {
        let (xhat, edges) = reference.face_point(face, s);
        let point = self.exact_map(&xhat);
        let jac = self.exact_jacobian(&xhat);
        let inner = self.control_points[face];
        let geo = FaceGeometry::from_jacobian(self.dim, point, &jac, &edges, &inner);
        if geo.measure <= 0.0 || !geo.measure.is_finite() {
            return Err(Error::DegenerateFace {
                cell: self.cell,
                face,
                measure: geo.measure,
            });
        }
        Ok(geo)
    }

    /// `|Dρ_T(x̂) B_T^{-1}|` (spectral norm).
    pub fn rho_derivative_bound_at(&self, xhat: &Vec3) -> f64 {
        if !self.is_curved() {
            return 0.0;
        }
        let m = linalg::mat_mul(&self.rho_jacobian(xhat), &self.b_inv);
        linalg::spectral_norm(&m, self.dim)
    }

    /// Sampled `C_T = sup |Dρ_T B_T^{-1}|` over a lattice of the given resolution.
    pub fn rho_derivative_bound(&self, resolution: usize) -> f64 {
        if !self.is_curved() {
            return 0.0;
        }
        let r = resolution.max(1);
        let mut best: f64 = 0.0;
        let mut visit = |x: Vec3| best = best.max(self.rho_derivative_bound_at(&x));
        for a in 0..=r {
            for b in 0..=(r - a) {
                if self.dim == 2 {
                    visit([a as f64 / r as f64, b as f64 / r as f64, 0.0]);
                } else {
                    for c in 0..=(r - a - b) {
                        visit([
                            a as f64 / r as f64,
                            b as f64 / r as f64,
                            c as f64 / r as f64,
                        ]);
                    }
                }
            }
        }
        best
    }
}
