//! Error norms of discrete functions against an exact solution.
//!
//! Discrete and exact functions are compared at matching reference points.
//! With [`Lift::Exact`] the value of `u_h^l` at `Φ_T^c(x̂)` is `û_h(x̂)`, the
//! measure is `|det DΦ_T^c|` and lifted gradients are `(DΦ_T^c)^{-T} ∇̂û_h`.
//! [`Lift::Discrete`] uses `Φ_T^(k)` in all three places instead. Integrals
//! are pulled back to the reference element, so no map is ever inverted.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::assembly::{FeFunction, FeSpace};
use crate::element::reference::Tabulation;
use crate::element::{make_quadrature, CurvedElementMap, QuadratureRule, ReferenceElement};
use crate::geometry::tangential_gradient;
use crate::linalg::{self, Vec3};
use crate::manufactured::ExactSolution;
use crate::{Error, Result};

/// Quadrature exactness used for error integrals.
pub fn error_quadrature_degree(k: usize) -> usize {
    2 * k + 4
}

/// The same reference point on the exact curved cell and on the discrete
/// cell: `(Φ_T^c(x̂), Φ_T^(k)(x̂))`.
pub fn lift_pair(
    map: &CurvedElementMap,
    reference: &ReferenceElement,
    xhat: &Vec3,
) -> (Vec3, Vec3) {
    (map.exact_map(xhat), map.isoparametric_map(xhat, reference))
}

/// Where the exact solution is sampled for the reference point `x̂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Lift {
    /// At `Φ_T^c(x̂)`; errors are integrated over Ω and Γ.
    ///
    /// The blending factor of `ρ_T` makes the third and higher reference
    /// derivatives of `Φ_T^c` scale like `h²`, so for `k ≥ 2` the lifted
    /// space loses half an order in the boundary strip.
    Exact,
    /// At `Φ_T^(k)(x̂)`; errors are integrated over Ω_h and Γ_h and `u` is
    /// evaluated through its smooth extension.
    #[default]
    Discrete,
}

impl FromStr for Lift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Lift::Exact),
            "discrete" => Ok(Lift::Discrete),
            other => Err(Error::InvalidInput(format!(
                "unknown lift `{other}` (expected exact or discrete)"
            ))),
        }
    }
}

impl fmt::Display for Lift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lift::Exact => "exact",
            Lift::Discrete => "discrete",
        })
    }
}

/// Squared error contributions; each field is an integral of a squared
/// quantity over Ω or Γ.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorComponents {
    pub bulk_l2_sq: f64,
    pub bulk_h1_semi_sq: f64,
    pub surface_l2_sq: f64,
    pub surface_h1_semi_sq: f64,
}

impl ErrorComponents {
    /// `‖·‖_{L²(Ω;Γ)}`
    pub fn l2(&self) -> f64 {
        (self.bulk_l2_sq + self.surface_l2_sq).sqrt()
    }

    /// `‖·‖_{H¹(Ω;Γ)}`, including the `L²` parts.
    pub fn h1(&self) -> f64 {
        (self.bulk_l2_sq + self.bulk_h1_semi_sq + self.surface_l2_sq + self.surface_h1_semi_sq)
            .sqrt()
    }

    fn add(mut self, other: &ErrorComponents) -> Self {
        self.bulk_l2_sq += other.bulk_l2_sq;
        self.bulk_h1_semi_sq += other.bulk_h1_semi_sq;
        self.surface_l2_sq += other.surface_l2_sq;
        self.surface_h1_semi_sq += other.surface_h1_semi_sq;
        self
    }
}

/// Drops the components of a gradient beyond the spatial dimension.
fn truncate(mut g: Vec3, n: usize) -> Vec3 {
    g[n..].iter_mut().for_each(|v| *v = 0.0);
    g
}

fn local_values(tab: &Tabulation, q: usize, coeffs: &[f64]) -> (f64, Vec3) {
    let mut v = 0.0;
    let mut g = [0.0; 3];
    for ((phi, grad), c) in tab.values_at(q).iter().zip(tab.gradients_at(q)).zip(coeffs) {
        v += c * phi;
        linalg::axpy(*c, grad, &mut g);
    }
    (v, g)
}

fn bulk_cell(
    lift: Lift,
    space: &FeSpace,
    tab: &Tabulation,
    rule: &QuadratureRule,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    c: usize,
) -> Result<ErrorComponents> {
    let n = space.dimension();
    let map = space.map(c);
    let coeffs: Vec<f64> = space.cell_nodes(c).iter().map(|&j| u_h[j]).collect();
    let mut out = ErrorComponents::default();
    for (q, (xhat, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let (x, jac) = match lift {
            Lift::Exact => (map.exact_map(xhat), map.exact_jacobian(xhat)),
            Lift::Discrete => map.isoparametric_at(tab, q),
        };
        let det = linalg::det(&jac, n);
        let jinv = linalg::inverse(&jac, n)
            .filter(|_| det > 0.0)
            .ok_or(Error::InvertedCell { cell: c, det })?;
        let (v, g_ref) = local_values(tab, q, &coeffs);
        let g = linalg::mat_t_vec(&jinv, &g_ref);
        let e = exact.value(&x) - v;
        let ge = linalg::sub(&truncate(exact.gradient(&x), n), &g);
        out.bulk_l2_sq += w * det * e * e;
        out.bulk_h1_semi_sq += w * det * linalg::dot(&ge, &ge);
    }
    Ok(out)
}

fn surface_face(
    lift: Lift,
    space: &FeSpace,
    rule: &QuadratureRule,
    tab: &Tabulation,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    (c, f): (usize, usize),
) -> Result<ErrorComponents> {
    let n = space.dimension();
    let reference = space.reference();
    let map = space.map(c);
    let coeffs: Vec<f64> = space.cell_nodes(c).iter().map(|&j| u_h[j]).collect();
    let edges = reference.face_point(f, &[0.0; 3]).1;
    let mut out = ErrorComponents::default();
    for (q, (s, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let geo = match lift {
            Lift::Exact => map.exact_face_geometry(s, reference, f)?,
            Lift::Discrete => map.face_jacobian(s, reference, f)?,
        };
        let (v, g_ref) = local_values(tab, q, &coeffs);
        let mut ds = [0.0; 2];
        for (d, e) in ds.iter_mut().zip(&edges).take(n - 1) {
            *d = linalg::dot(&g_ref, e);
        }
        let g_h = geo.surface_gradient(n, &ds);
        let x = geo.point;
        let normal = match lift {
            Lift::Exact => linalg::scale(1.0 / linalg::norm(&x), &x),
            Lift::Discrete => geo.normal,
        };
        let g_u = tangential_gradient(&truncate(exact.gradient(&x), n), &normal);
        let e = exact.value(&x) - v;
        let ge = linalg::sub(&g_u, &g_h);
        out.surface_l2_sq += w * geo.measure * e * e;
        out.surface_h1_semi_sq += w * geo.measure * linalg::dot(&ge, &ge);
    }
    Ok(out)
}

/// `u - u_h^l` in the bulk and boundary `L²` and `H¹` (semi)norms.
pub fn error_components(
    space: &FeSpace,
    u_h: &[f64],
    exact: &dyn ExactSolution,
) -> Result<ErrorComponents> {
    error_components_with(space, u_h, exact, Lift::default())
}

/// [`error_components`] with an explicit choice of identification.
pub fn error_components_with(
    space: &FeSpace,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    lift: Lift,
) -> Result<ErrorComponents> {
    if u_h.len() != space.n_nodes() {
        return Err(Error::LengthMismatch {
            expected: space.n_nodes(),
            found: u_h.len(),
        });
    }
    let n = space.dimension();
    let degree = error_quadrature_degree(space.degree());
    let reference = space.reference();

    let rule = make_quadrature(n, degree)?;
    let tab = reference.tabulate(&rule.points);
    let bulk = (0..space.n_cells())
        .into_par_iter()
        .map(|c| bulk_cell(lift, space, &tab, &rule, u_h, exact, c))
        .collect::<Result<Vec<_>>>()?;

    let face_rule = make_quadrature(n - 1, degree)?;
    let face_tabs: Vec<Tabulation> = (0..=n)
        .map(|f| {
            let pts: Vec<Vec3> = face_rule
                .points
                .iter()
                .map(|s| reference.face_point(f, s).0)
                .collect();
            reference.tabulate(&pts)
        })
        .collect();
    let surface = space
        .mesh()
        .boundary_faces()
        .par_iter()
        .map(|&(c, f)| surface_face(lift, space, &face_rule, &face_tabs[f], u_h, exact, (c, f)))
        .collect::<Result<Vec<_>>>()?;

    Ok(bulk
        .iter()
        .chain(&surface)
        .fold(ErrorComponents::default(), |acc, e| acc.add(e)))
}

/// Bulk error contributions of every cell, in cell order.
pub fn cell_errors(
    space: &FeSpace,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    lift: Lift,
) -> Result<Vec<ErrorComponents>> {
    if u_h.len() != space.n_nodes() {
        return Err(Error::LengthMismatch {
            expected: space.n_nodes(),
            found: u_h.len(),
        });
    }
    let rule = make_quadrature(space.dimension(), error_quadrature_degree(space.degree()))?;
    let tab = space.reference().tabulate(&rule.points);
    (0..space.n_cells())
        .into_par_iter()
        .map(|c| bulk_cell(lift, space, &tab, &rule, u_h, exact, c))
        .collect()
}

/// Combined errors `(‖u - u_h^l‖_{L²(Ω;Γ)}, ‖u - u_h^l‖_{H¹(Ω;Γ)})` with the
/// default lift.
pub fn error_norms(u_h: &FeFunction<'_>, exact: &dyn ExactSolution) -> Result<(f64, f64)> {
    let e = error_components(u_h.space(), u_h.coefficients(), exact)?;
    Ok((e.l2(), e.h1()))
}

/// Nodal interpolant `Σ_j u(x_j) φ_j`.
pub fn interpolate<'a>(space: &'a FeSpace, exact: &dyn ExactSolution) -> FeFunction<'a> {
    space.interpolate(|x| exact.value(x))
}

/// Empirical orders `log(e_{i-1}/e_i) / log(h_{i-1}/h_i)` for `i ≥ 1`.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != hs.len() {
        return Err(Error::LengthMismatch {
            expected: hs.len(),
            found: errors.len(),
        });
    }
    if errors.len() < 2 {
        return Err(Error::InvalidInput("at least two levels are needed".into()));
    }
    if errors
        .iter()
        .chain(hs)
        .any(|&v| !(v > 0.0 && v.is_finite()))
    {
        return Err(Error::InvalidInput(
            "errors and mesh sizes must be positive".into(),
        ));
    }
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    pub h: f64,
    pub n_nodes: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    pub eoc_l2: Option<f64>,
    pub eoc_h1: Option<f64>,
}

/// A convergence table with the problem parameters it was computed for.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub degree: usize,
    pub records: Vec<LevelRecord>,
}

impl ErrorReport {
    pub fn new(alpha: f64, beta: f64, kappa: f64, degree: usize) -> Self {
        ErrorReport {
            alpha,
            beta,
            kappa,
            degree,
            records: Vec::new(),
        }
    }

    /// Appends a level, computing orders against the previous one. Orders are
    /// left undefined when either error is not positive.
    pub fn push(&mut self, h: f64, n_nodes: usize, err_l2: f64, err_h1: f64) {
        let prev = self.records.last().copied();
        let order = |a: f64, b: f64, ha: f64| eoc(&[a, b], &[ha, h]).ok().map(|v| v[0]);
        let level = self.records.len();
        self.records.push(LevelRecord {
            level,
            h,
            n_nodes,
            err_l2,
            err_h1,
            eoc_l2: prev.and_then(|p| order(p.err_l2, err_l2, p.h)),
            eoc_h1: prev.and_then(|p| order(p.err_h1, err_h1, p.h)),
        });
    }

    pub fn last(&self) -> Option<&LevelRecord> {
        self.records.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::build_space;
    use crate::geometry::Domain;
    use crate::manufactured::Builtin;
    use crate::mesh::{generate_linear_mesh, Mesh};

    #[test]
    fn eoc_examples() {
        assert_eq!(eoc(&[4.0, 1.0], &[2.0, 1.0]).unwrap(), vec![2.0]);
        assert_eq!(eoc(&[1.0, 1.0], &[2.0, 1.0]).unwrap(), vec![0.0]);
        assert!((eoc(&[8.0, 1.0], &[4.0, 1.0]).unwrap()[0] - 1.5).abs() < 1e-15);
        assert!(eoc(&[0.0, 1.0], &[2.0, 1.0]).is_err());
        assert!(eoc(&[1.0], &[1.0]).is_err());
        assert!(eoc(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn report_orders() {
        let mut r = ErrorReport::new(1.0, 1.0, 1.0, 1);
        r.push(0.2, 10, 4e-2, 2e-1);
        r.push(0.1, 40, 1e-2, 1e-1);
        assert_eq!(r.records[0].eoc_l2, None);
        assert!((r.records[1].eoc_l2.unwrap() - 2.0).abs() < 1e-12);
        assert!((r.records[1].eoc_h1.unwrap() - 1.0).abs() < 1e-12);
        r.push(0.05, 160, 0.0, 0.0);
        assert_eq!(r.records[2].eoc_l2, None);
    }

    #[test]
    fn lift_pair_on_interior_and_boundary_cells() {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.5).unwrap();
        let space = build_space(&mesh, &disk, 1).unwrap();
        let el = space.reference();
        let interior = (0..mesh.n_cells())
            .find(|&c| mesh.cell_boundary_count(c) == 0)
            .unwrap();
        let (a, b) = lift_pair(space.map(interior), el, &[0.2, 0.3, 0.0]);
        assert!(linalg::distance(&a, &b) < 1e-15);

        let &(c, _) = &mesh.boundary_faces()[0];
        for x in el.nodes() {
            let (a, b) = lift_pair(space.map(c), el, x);
            assert!(linalg::distance(&a, &b) < 1e-12);
        }
        // boundary-edge midpoint: local vertices 1 and 2
        let (a, b) = lift_pair(space.map(c), el, &[0.5, 0.5, 0.0]);
        assert!((linalg::norm(&a) - 1.0).abs() < 1e-14);
        assert!(linalg::norm(&b) < 1.0 - 1e-3);
    }

    #[test]
    fn polynomials_in_the_space_have_zero_error_on_affine_cells() {
        // a mesh of the single interior triangle in the disk has straight cells
        let mesh = Mesh::new(
            2,
            vec![[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.5, 0.0]],
            vec![[0, 1, 2, 0]],
        )
        .unwrap();
        let disk = Domain::unit_disk();
        for (k, u) in [
            (1, Builtin::Linear([0.3, -0.4, 0.0])),
            (2, Builtin::Quadratic),
        ] {
            let space = build_space(&mesh, &disk, k).unwrap();
            let e = error_components(&space, interpolate(&space, &u).coefficients(), &u).unwrap();
            assert!(
                e.bulk_l2_sq.sqrt() <= 1e-13 && e.bulk_h1_semi_sq.sqrt() <= 1e-12,
                "{e:?}"
            );
        }
    }

    #[test]
    fn constants_are_represented_exactly_on_curved_meshes() {
        for (domain, h) in [(Domain::unit_disk(), 0.4), (Domain::unit_ball(), 1.0)] {
            let mesh = generate_linear_mesh(&domain, h).unwrap();
            for k in 1..=3 {
                let space = build_space(&mesh, &domain, k).unwrap();
                let one = Builtin::Constant(1.0);
                let coeffs = interpolate(&space, &one).into_coefficients();
                for lift in [Lift::Exact, Lift::Discrete] {
                    let e = error_components_with(&space, &coeffs, &one, lift).unwrap();
                    assert!(e.l2() <= 1e-12 && e.h1() <= 1e-12, "k {k} {lift}: {e:?}");
                }
            }
        }
    }

    #[test]
    fn zero_error_measures_the_domain() {
        // ‖1‖² over Ω and Γ gives |Ω| and |Γ| up to quadrature error
        let ball = Domain::unit_ball();
        let mesh = generate_linear_mesh(&ball, 0.5).unwrap();
        let space = build_space(&mesh, &ball, 2).unwrap();
        let zero = vec![0.0; space.n_nodes()];
        let e = error_components_with(&space, &zero, &Builtin::Constant(1.0), Lift::Exact).unwrap();
        assert!((e.bulk_l2_sq - ball.volume()).abs() < 1e-7, "{e:?}");
        assert!(
            (e.surface_l2_sq - ball.surface_area()).abs() < 1e-6,
            "{e:?}"
        );
    }

    #[test]
    fn discrete_lift_measures_the_discrete_domain() {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.3).unwrap();
        let space = build_space(&mesh, &disk, 2).unwrap();
        let zero = vec![0.0; space.n_nodes()];
        let e =
            error_components_with(&space, &zero, &Builtin::Constant(1.0), Lift::Discrete).unwrap();
        let volume = crate::assembly::discrete_volume(&space).unwrap();
        let surface = crate::assembly::discrete_surface_measure(&space).unwrap();
        assert!((e.bulk_l2_sq - volume).abs() < 1e-13, "{e:?}");
        // the face measure is not polynomial, so the two quadrature degrees differ slightly
        assert!(
            (e.surface_l2_sq - surface).abs() < 1e-9,
            "{e:?} vs {surface}"
        );
        assert!(volume < std::f64::consts::PI);
    }

    #[test]
    fn lift_names_round_trip() {
        for lift in [Lift::Exact, Lift::Discrete] {
            assert_eq!(lift.to_string().parse::<Lift>().unwrap(), lift);
        }
        assert_eq!(Lift::default(), Lift::Discrete);
        assert!("closest".parse::<Lift>().is_err());
    }

    #[test]
    fn error_is_sign_symmetric() {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.4).unwrap();
        let space = build_space(&mesh, &disk, 2).unwrap();
        let u = Builtin::Poly2d;
        let coeffs: Vec<f64> = space.coordinates().iter().map(|x| x[0] * x[1]).collect();
        let neg: Vec<f64> = coeffs.iter().map(|v| -v).collect();
        struct Neg(Builtin);
        impl ExactSolution for Neg {
            fn value(&self, x: &Vec3) -> f64 {
                -self.0.value(x)
            }
            fn gradient(&self, x: &Vec3) -> Vec3 {
                linalg::scale(-1.0, &self.0.gradient(x))
            }
            fn hessian(&self, x: &Vec3) -> crate::linalg::Mat3 {
                let mut h = self.0.hessian(x);
                h.iter_mut().flatten().for_each(|v| *v = -*v);
                h
            }
        }
        let a = error_components(&space, &coeffs, &u).unwrap();
        let b = error_components(&space, &neg, &Neg(u)).unwrap();
        assert!((a.h1() - b.h1()).abs() <= 1e-14 * a.h1());
        assert!((a.l2() - b.l2()).abs() <= 1e-14 * a.l2());
    }
}
