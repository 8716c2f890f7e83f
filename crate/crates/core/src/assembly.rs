//! Finite element spaces, sparse matrices and the discrete system
//!
//! ```text
//!   K = γᵀ(α M_Γ + β A_Γ)γ + κ M_Ω + A_Ω,    b = M_Ω f + γᵀ M_Γ g.
//! ```
//!
//! Local matrices are computed per cell (or boundary face) in parallel and
//! accumulated serially in cell order into a precomputed pattern, so repeated
//! assemblies are bit-identical.

mod space;
mod sparse;

pub use space::{build_space, FeFunction, FeSpace, TraceOperator};
pub use sparse::SparseSpdMatrix;

use rayon::prelude::*;

use crate::element::make_quadrature;
use crate::element::reference::Tabulation;
use crate::element::FaceGeometry;
use crate::linalg::{self, Vec3};
use crate::{Error, Result};

/// Cells whose local matrices are held in memory at once.
const CHUNK: usize = 8192;

/// Quadrature exactness used for the matrices.
pub fn assembly_quadrature_degree(k: usize) -> usize {
    2 * k + 2
}

/// Coefficients `α, β, κ` of the boundary value problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parameters {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Parameters {
    pub fn new(alpha: f64, beta: f64, kappa: f64) -> Result<Self> {
        let p = Parameters { alpha, beta, kappa };
        p.validate()?;
        Ok(p)
    }

    /// Coefficients must be finite and nonnegative, and `α > 0` or `κ > 0`
    /// so that constants are not in the kernel of `K`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("kappa", self.kappa),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InadmissibleParameters(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.alpha == 0.0 && self.kappa == 0.0 {
            return Err(Error::InadmissibleParameters(format!(
                "alpha = {}, beta = {}, kappa = {} leaves constants in the kernel",
                self.alpha, self.beta, self.kappa
            )));
        }
        Ok(())
    }
}

/// The four matrices of the discrete bilinear forms.
#[derive(Clone, Debug)]
pub struct Operators {
    pub bulk_mass: SparseSpdMatrix,
    pub bulk_stiffness: SparseSpdMatrix,
    pub surface_mass: SparseSpdMatrix,
    pub surface_stiffness: SparseSpdMatrix,
}

impl Operators {
    pub fn n_nodes(&self) -> usize {
        self.bulk_mass.dimension()
    }

    pub fn n_boundary_nodes(&self) -> usize {
        self.surface_mass.dimension()
    }

    pub fn system_matrix(&self, params: &Parameters) -> Result<SparseSpdMatrix> {
        params.validate()?;
        Ok(SparseSpdMatrix::combine(
            self.n_nodes(),
            &[
                (1.0, &self.bulk_stiffness),
                (params.kappa, &self.bulk_mass),
                (params.alpha, &self.surface_mass),
                (params.beta, &self.surface_stiffness),
            ],
        ))
    }

    /// `b = M_Ω f + γᵀ M_Γ g` for nodal values `f` (length `N`) and `g`
    /// (length `N_Γ`).
    pub fn load_vector(&self, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_nodes(), f.len())?;
        check_len(self.n_boundary_nodes(), g.len())?;
        let mut b = self.bulk_mass.mul_vec(f);
        for (bi, s) in b.iter_mut().zip(self.surface_mass.mul_vec(g)) {
            *bi += s;
        }
        Ok(b)
    }

    /// `wᵀ(M_Ω + A_Ω + γᵀ(M_Γ + A_Γ)γ)w`, the discrete `H¹(Ω_h; Γ_h)` norm squared.
    pub fn combined_h1_form(&self, w: &[f64]) -> f64 {
        let nb = self.n_boundary_nodes();
        self.bulk_mass.quadratic_form(w)
            + self.bulk_stiffness.quadratic_form(w)
            + self.surface_mass.quadratic_form(&w[..nb])
            + self.surface_stiffness.quadratic_form(&w[..nb])
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

fn bulk_pattern(space: &FeSpace) -> SparseSpdMatrix {
    let mut rows = vec![Vec::new(); space.n_nodes()];
    for c in 0..space.n_cells() {
        let nodes = space.cell_nodes(c);
        for &i in nodes {
            rows[i].extend_from_slice(nodes);
        }
    }
    SparseSpdMatrix::from_pattern(rows)
}

fn surface_pattern(space: &FeSpace) -> SparseSpdMatrix {
    let mut rows = vec![Vec::new(); space.n_boundary_nodes()];
    for &(c, f) in space.mesh().boundary_faces() {
        let nodes = space.face_nodes(c, f);
        for &i in &nodes {
            rows[i].extend_from_slice(&nodes);
        }
    }
    SparseSpdMatrix::from_pattern(rows)
}

/// Local mass and stiffness matrices of cell `c`, row-major.
fn bulk_local(
    space: &FeSpace,
    tab: &Tabulation,
    weights: &[f64],
    c: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = space.dimension();
    let nb = tab.n_basis;
    let map = space.map(c);
    let mut mass = vec![0.0; nb * nb];
    let mut stiff = vec![0.0; nb * nb];
    let mut grads = vec![[0.0; 3]; nb];
    for (q, &w) in weights.iter().enumerate() {
        let (_, jac) = map.isoparametric_at(tab, q);
        let det = linalg::det(&jac, n);
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::InvertedCell { cell: c, det });
        }
        let jinv = linalg::inverse(&jac, n).ok_or(Error::InvertedCell { cell: c, det })?;
        let wd = w * det;
        let values = tab.values_at(q);
        for (g, gh) in grads.iter_mut().zip(tab.gradients_at(q)) {
            *g = linalg::mat_t_vec(&jinv, gh);
        }
        for a in 0..nb {
            for b in a..nb {
                let m = wd * values[a] * values[b];
                let s = wd * linalg::dot(&grads[a], &grads[b]);
                mass[a * nb + b] += m;
                stiff[a * nb + b] += s;
            }
        }
    }
    for a in 0..nb {
        for b in 0..a {
            mass[a * nb + b] = mass[b * nb + a];
            stiff[a * nb + b] = stiff[b * nb + a];
        }
    }
    Ok((mass, stiff))
}

/// Per-face quadrature data: tabulations of the cell basis at the face
/// quadrature points of every local face, and the face edge matrices.
struct FaceRule {
    weights: Vec<f64>,
    points: Vec<Vec3>,
    tabs: Vec<Tabulation>,
    edges: Vec<[Vec3; 2]>,
}

impl FaceRule {
    fn new(space: &FeSpace, degree: usize) -> Result<Self> {
        let n = space.dimension();
        let rule = make_quadrature(n - 1, degree)?;
        let reference = space.reference();
        let mut tabs = Vec::new();
        let mut edges = Vec::new();
        for f in 0..=n {
            let pts: Vec<Vec3> = rule
                .points
                .iter()
                .map(|s| reference.face_point(f, s).0)
                .collect();
            tabs.push(reference.tabulate(&pts));
            edges.push(reference.face_point(f, &[0.0; 3]).1);
        }
        Ok(FaceRule {
            weights: rule.weights,
            points: rule.points,
            tabs,
            edges,
        })
    }
}

/// Face geometry of `Φ_T^(k)` restricted to local face `f`, at face point `q`.
fn discrete_face_geometry(
    space: &FeSpace,
    rule: &FaceRule,
    c: usize,
    f: usize,
    q: usize,
) -> Result<FaceGeometry> {
    let map = space.map(c);
    let (point, jac) = map.isoparametric_at(&rule.tabs[f], q);
    let inner = map.control_points()[f];
    let geo = FaceGeometry::from_jacobian(space.dimension(), point, &jac, &rule.edges[f], &inner);
    if geo.measure <= 0.0 || !geo.measure.is_finite() {
        return Err(Error::DegenerateFace {
            cell: c,
            face: f,
            measure: geo.measure,
        });
    }
    Ok(geo)
}

/// Local surface mass and stiffness on face `f` of cell `c`, indexed by the
/// face nodes of the reference element.
fn surface_local(
    space: &FeSpace,
    rule: &FaceRule,
    c: usize,
    f: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = space.dimension();
    let local = space.reference().face_nodes(f);
    let m = local.len();
    let tab = &rule.tabs[f];
    let edges = &rule.edges[f];
    let mut mass = vec![0.0; m * m];
    let mut stiff = vec![0.0; m * m];
    let mut sgrads = vec![[0.0; 3]; m];
    for (q, &w) in rule.weights.iter().enumerate() {
        let geo = discrete_face_geometry(space, rule, c, f, q)?;
        let wd = w * geo.measure;
        let values = tab.values_at(q);
        let grads = tab.gradients_at(q);
        for (sg, &j) in sgrads.iter_mut().zip(local) {
            let mut ds = [0.0; 2];
            for (d, e) in ds.iter_mut().zip(edges).take(n - 1) {
                *d = linalg::dot(&grads[j], e);
            }
            *sg = geo.surface_gradient(n, &ds);
        }
        for a in 0..m {
            for b in a..m {
                mass[a * m + b] += wd * values[local[a]] * values[local[b]];
                stiff[a * m + b] += wd * linalg::dot(&sgrads[a], &sgrads[b]);
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            mass[a * m + b] = mass[b * m + a];
            stiff[a * m + b] = stiff[b * m + a];
        }
    }
    Ok((mass, stiff))
}

/// Bulk mass and stiffness matrices `(M_Ω, A_Ω)`.
pub fn assemble_bulk(space: &FeSpace) -> Result<(SparseSpdMatrix, SparseSpdMatrix)> {
    let rule = make_quadrature(
        space.dimension(),
        assembly_quadrature_degree(space.degree()),
    )?;
    let tab = space.reference().tabulate(&rule.points);
    let mut mass = bulk_pattern(space);
    let mut stiff = mass.clone();
    for start in (0..space.n_cells()).step_by(CHUNK) {
        let end = (start + CHUNK).min(space.n_cells());
        let locals = (start..end)
            .into_par_iter()
            .map(|c| bulk_local(space, &tab, &rule.weights, c))
            .collect::<Result<Vec<_>>>()?;
        for (c, (m, s)) in (start..end).zip(locals) {
            mass.scatter(space.cell_nodes(c), &m);
            stiff.scatter(space.cell_nodes(c), &s);
        }
    }
    Ok((mass, stiff))
}

/// Surface mass and stiffness matrices `(M_Γ, A_Γ)` of dimension `N_Γ`.
pub fn assemble_surface(space: &FeSpace) -> Result<(SparseSpdMatrix, SparseSpdMatrix)> {
    let rule = FaceRule::new(space, assembly_quadrature_degree(space.degree()))?;
    let faces = space.mesh().boundary_faces();
    let mut mass = surface_pattern(space);
    let mut stiff = mass.clone();
    for chunk in faces.chunks(CHUNK) {
        let locals = chunk
            .par_iter()
            .map(|&(c, f)| surface_local(space, &rule, c, f))
            .collect::<Result<Vec<_>>>()?;
        for (&(c, f), (m, s)) in chunk.iter().zip(locals) {
            let nodes = space.face_nodes(c, f);
            mass.scatter(&nodes, &m);
            stiff.scatter(&nodes, &s);
        }
    }
    Ok((mass, stiff))
}

pub fn assemble_bulk_mass(space: &FeSpace) -> Result<SparseSpdMatrix> {
    Ok(assemble_bulk(space)?.0)
}

pub fn assemble_bulk_stiffness(space: &FeSpace) -> Result<SparseSpdMatrix> {
    Ok(assemble_bulk(space)?.1)
}

pub fn assemble_surface_mass(space: &FeSpace) -> Result<SparseSpdMatrix> {
    Ok(assemble_surface(space)?.0)
}

pub fn assemble_surface_stiffness(space: &FeSpace) -> Result<SparseSpdMatrix> {
    Ok(assemble_surface(space)?.1)
}

pub fn assemble_operators(space: &FeSpace) -> Result<Operators> {
    let (bulk_mass, bulk_stiffness) = assemble_bulk(space)?;
    let (surface_mass, surface_stiffness) = assemble_surface(space)?;
    Ok(Operators {
        bulk_mass,
        bulk_stiffness,
        surface_mass,
        surface_stiffness,
    })
}

pub fn trace_matrix(space: &FeSpace) -> TraceOperator {
    space.trace()
}

/// `K = γᵀ(α M_Γ + β A_Γ)γ + κ M_Ω + A_Ω`.
pub fn system_matrix(space: &FeSpace, params: &Parameters) -> Result<SparseSpdMatrix> {
    params.validate()?;
    assemble_operators(space)?.system_matrix(params)
}

/// `b = M_Ω f + γᵀ M_Γ g`.
pub fn load_vector(space: &FeSpace, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    check_len(space.n_nodes(), f.len())?;
    check_len(space.n_boundary_nodes(), g.len())?;
    let mut b = assemble_bulk_mass(space)?.mul_vec(f);
    for (bi, s) in b.iter_mut().zip(assemble_surface_mass(space)?.mul_vec(g)) {
        *bi += s;
    }
    Ok(b)
}

/// Total measure of the discrete boundary `|Γ_h^(k)|`, integrated face by face.
pub fn discrete_surface_measure(space: &FeSpace) -> Result<f64> {
    let rule = FaceRule::new(space, assembly_quadrature_degree(space.degree()))?;
    let parts = space
        .mesh()
        .boundary_faces()
        .par_iter()
        .map(|&(c, f)| {
            let mut s = 0.0;
            for (q, w) in rule.weights.iter().enumerate() {
                s += w * discrete_face_geometry(space, &rule, c, f, q)?.measure;
            }
            Ok(s)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

/// Total measure of the discrete domain `|Ω_h^(k)|`.
pub fn discrete_volume(space: &FeSpace) -> Result<f64> {
    let rule = make_quadrature(
        space.dimension(),
        assembly_quadrature_degree(space.degree()),
    )?;
    let tab = space.reference().tabulate(&rule.points);
    let parts = (0..space.n_cells())
        .into_par_iter()
        .map(|c| {
            let mut s = 0.0;
            for (q, w) in rule.weights.iter().enumerate() {
                let (_, jac) = space.map(c).isoparametric_at(&tab, q);
                s += w * linalg::det(&jac, space.dimension());
            }
            s
        })
        .collect::<Vec<f64>>();
    Ok(parts.iter().sum())
}

/// Boundary-face quadrature points of `Γ_h^(k)` (for proximity checks).
pub fn boundary_quadrature_points(space: &FeSpace) -> Result<Vec<Vec3>> {
    let rule = FaceRule::new(space, assembly_quadrature_degree(space.degree()))?;
    let mut out = Vec::new();
    for &(c, f) in space.mesh().boundary_faces() {
        for q in 0..rule.points.len() {
            out.push(space.map(c).isoparametric_at(&rule.tabs[f], q).0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::mesh::{generate_linear_mesh, Mesh};
    use std::f64::consts::PI;

    fn triangle(scale: f64) -> Mesh {
        let v = vec![[0.0, 0.0, 0.0], [scale, 0.0, 0.0], [0.0, scale, 0.0]];
        Mesh::new(2, v, vec![[0, 1, 2, 0]]).unwrap()
    }

    fn dense(m: &SparseSpdMatrix) -> Vec<f64> {
        m.to_dense()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn reference_triangle_matrices() {
        let disk = Domain::unit_disk();
        let space = build_space(&triangle(1.0), &disk, 1).unwrap();
        let (m, a) = assemble_bulk(&space).unwrap();
        let area = 0.5;
        let expected_m: Vec<f64> = [2.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0]
            .iter()
            .map(|v| v * area / 12.0)
            .collect();
        // node order follows vertex order for this mesh
        let perm: Vec<usize> = space.cell_nodes(0).to_vec();
        let mut dm = vec![0.0; 9];
        let mut da = vec![0.0; 9];
        for a_ in 0..3 {
            for b_ in 0..3 {
                dm[a_ * 3 + b_] = m.get(perm[a_], perm[b_]);
                da[a_ * 3 + b_] = a.get(perm[a_], perm[b_]);
            }
        }
        assert!(close(&dm, &expected_m, 1e-15));
        let expected_a = [1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5];
        assert!(close(&da, &expected_a, 1e-15));
    }

    #[test]
    fn scaling_the_mesh_scales_mass_by_area() {
        let disk = Domain::unit_disk();
        let m1 = assemble_bulk_mass(&build_space(&triangle(1.0), &disk, 2).unwrap()).unwrap();
        let m2 = assemble_bulk_mass(&build_space(&triangle(2.0), &disk, 2).unwrap()).unwrap();
        let scaled: Vec<f64> = dense(&m1).iter().map(|v| 4.0 * v).collect();
        assert!(close(&dense(&m2), &scaled, 1e-14));
    }

    #[test]
    fn straight_edge_surface_matrices() {
        // every edge of the single triangle is a boundary face
        let disk = Domain::unit_disk();
        let space = build_space(&triangle(1.0), &disk, 1).unwrap();
        let (mg, ag) = assemble_surface(&space).unwrap();
        let ids = space.cell_nodes(0);
        let (i, j) = (ids[0], ids[1]);
        let len = 1.0;
        assert!((mg.get(i, i) - len / 3.0 * 2.0).abs() < 1e-15); // two edges meet at vertex 0
        assert!((mg.get(i, j) - len / 6.0).abs() < 1e-15);
        assert!((ag.get(i, j) + 1.0 / len).abs() < 1e-15);
        let (k, l) = (ids[1], ids[2]);
        let hyp = 2f64.sqrt();
        assert!((mg.get(k, l) - hyp / 6.0).abs() < 1e-15);
        assert!((ag.get(k, l) + 1.0 / hyp).abs() < 1e-15);
    }

    #[test]
    fn constants_are_in_the_stiffness_kernels() {
        for (domain, h, k) in [(Domain::unit_disk(), 0.4, 2), (Domain::unit_ball(), 1.0, 2)] {
            let mesh = generate_linear_mesh(&domain, h).unwrap();
            let space = build_space(&mesh, &domain, k).unwrap();
            let ops = assemble_operators(&space).unwrap();
            let ones = vec![1.0; space.n_nodes()];
            let r = ops.bulk_stiffness.mul_vec(&ones);
            assert!(r
                .iter()
                .all(|v| v.abs() <= 1e-11 * ops.bulk_stiffness.max_abs()));
            let r = ops
                .surface_stiffness
                .mul_vec(&ones[..space.n_boundary_nodes()]);
            assert!(r
                .iter()
                .all(|v| v.abs() <= 1e-11 * ops.surface_stiffness.max_abs()));
            assert!(ops.bulk_mass.asymmetry() <= 1e-12 * ops.bulk_mass.max_abs());
            assert!(ops.surface_stiffness.asymmetry() <= 1e-12 * ops.surface_stiffness.max_abs());
        }
    }

    #[test]
    fn linear_function_energy_is_area_times_gradient_squared() {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.4).unwrap();
        let space = build_space(&mesh, &disk, 2).unwrap();
        let (m, a) = assemble_bulk(&space).unwrap();
        let c = [0.3, -1.2];
        let u = space.interpolate(|x| c[0] * x[0] + c[1] * x[1]);
        let area: f64 = m.mul_vec(&vec![1.0; space.n_nodes()]).iter().sum();
        let energy = a.quadratic_form(u.coefficients());
        assert!((energy - area * (c[0] * c[0] + c[1] * c[1])).abs() < 1e-12);
        assert!((area - discrete_volume(&space).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn surface_energy_of_xy_on_the_circle() {
        // ∫_0^{2π} |d/dθ (cos θ sin θ)|² dθ = ∫ cos² 2θ dθ = π
        let disk = Domain::unit_disk();
        let mut prev = f64::INFINITY;
        for h in [0.3, 0.15, 0.075] {
            let mesh = generate_linear_mesh(&disk, h).unwrap();
            let space = build_space(&mesh, &disk, 2).unwrap();
            let ag = assemble_surface_stiffness(&space).unwrap();
            let w = space.interpolate(|x| x[0] * x[1]);
            let err = (ag.quadratic_form(w.boundary_coefficients()) - PI).abs();
            assert!(err < prev / 4.0, "{err} vs {prev}");
            prev = err;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn constant_forms_give_measures() {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.3).unwrap();
        let space = build_space(&mesh, &disk, 2).unwrap();
        let ops = assemble_operators(&space).unwrap();
        let params = Parameters::new(1.0, 1.0, 1.0).unwrap();
        let k = ops.system_matrix(&params).unwrap();
        let ones = vec![1.0; space.n_nodes()];
        let vol = discrete_volume(&space).unwrap();
        let surf = discrete_surface_measure(&space).unwrap();
        assert!((k.quadratic_form(&ones) - (vol + surf)).abs() < 1e-11);
        assert!((vol - PI).abs() < 1e-3 && (surf - 2.0 * PI).abs() < 1e-3);
        assert!(k.asymmetry() <= 1e-12 * k.max_abs());

        // f ≡ κ, g ≡ α reproduces K·1
        let params = Parameters::new(0.7, 2.0, 1.3).unwrap();
        let k = ops.system_matrix(&params).unwrap();
        let b = ops
            .load_vector(
                &vec![params.kappa; space.n_nodes()],
                &vec![params.alpha; space.n_boundary_nodes()],
            )
            .unwrap();
        assert!(close(&b, &k.mul_vec(&ones), 1e-13));

        let zero = ops
            .load_vector(
                &vec![0.0; space.n_nodes()],
                &vec![0.0; space.n_boundary_nodes()],
            )
            .unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        assert!(matches!(
            ops.load_vector(&[1.0], &[]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn neumann_system_is_mass_plus_stiffness() {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.5).unwrap();
        let space = build_space(&mesh, &disk, 1).unwrap();
        let ops = assemble_operators(&space).unwrap();
        let k = ops
            .system_matrix(&Parameters::new(0.0, 0.0, 1.0).unwrap())
            .unwrap();
        let sum = SparseSpdMatrix::combine(
            space.n_nodes(),
            &[(1.0, &ops.bulk_mass), (1.0, &ops.bulk_stiffness)],
        );
        assert!(close(&k.to_dense(), &sum.to_dense(), 0.0));
    }

    #[test]
    fn rejects_singular_parameters() {
        assert!(matches!(
            Parameters::new(0.0, 0.0, 0.0),
            Err(Error::InadmissibleParameters(_))
        ));
        assert!(Parameters::new(-1.0, 1.0, 1.0).is_err());
        assert!(Parameters::new(1.0, f64::NAN, 1.0).is_err());
        assert!(Parameters::new(1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn repeated_assembly_is_bit_identical() {
        let ball = Domain::unit_ball();
        let mesh = generate_linear_mesh(&ball, 0.5).unwrap();
        let space = build_space(&mesh, &ball, 2).unwrap();
        let params = Parameters::new(1.0, 1.0, 1.0).unwrap();
        let a = system_matrix(&space, &params).unwrap();
        let b = system_matrix(&space, &params).unwrap();
        assert_eq!(a, b);
    }
}
