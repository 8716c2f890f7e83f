use std::sync::OnceLock;

use isofem::assembly::FeSpace;
use isofem::assembly::{
    assemble_operators, build_space, discrete_surface_measure, discrete_volume, Operators,
    Parameters,
};
use isofem::geometry::{Domain, DomainKind};
use isofem::linalg::Vec3;
use isofem::mesh::{generate_linear_mesh, Mesh};
use isofem::norms::{error_components, interpolate};
use isofem::solver::{ah_norm, solve_spd, solve_spd_with, SolveOptions};
use isofem::study::{solve_level, StudyConfig};
use proptest::prelude::*;

struct Fixture {
    space: FeSpace,
    operators: Operators,
    volume: f64,
    surface: f64,
}

fn disk_fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.3).unwrap();
        let space = build_space(&mesh, &disk, 2).unwrap();
        let operators = assemble_operators(&space).unwrap();
        Fixture {
            volume: discrete_volume(&space).unwrap(),
            surface: discrete_surface_measure(&space).unwrap(),
            space,
            operators,
        }
    })
}

fn relabel(mesh: &Mesh, order: &[usize]) -> Mesh {
    let mut new_index = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let vertices: Vec<Vec3> = order.iter().map(|&i| mesh.vertices()[i]).collect();
    let cells = mesh
        .cells()
        .map(|c| {
            let mut cell = [0; 4];
            for (slot, &v) in cell.iter_mut().zip(c) {
                *slot = new_index[v];
            }
            cell
        })
        .collect();
    Mesh::new(mesh.dimension(), vertices, cells).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_of_constants_is_a_weighted_measure(alpha in 0.0..5.0f64, beta in 0.0..5.0f64, kappa in 0.01..5.0f64) {
        let fx = disk_fixture();
        let k = fx.operators.system_matrix(&Parameters::new(alpha, beta, kappa).unwrap()).unwrap();
        let ones = vec![1.0; k.dimension()];
        let energy = k.quadratic_form(&ones);
        let expected = kappa * fx.volume + alpha * fx.surface;
        prop_assert!((energy - expected).abs() <= 1e-11 * expected.max(1.0));
        prop_assert!(k.asymmetry() <= 1e-12 * k.max_abs());
    }

    #[test]
    fn energy_norm_is_positive_on_random_vectors(seed in proptest::collection::vec(-1.0..1.0f64, 8), beta in 0.0..2.0f64) {
        let fx = disk_fixture();
        let k = fx.operators.system_matrix(&Parameters::new(0.5, beta, 0.0).unwrap()).unwrap();
        let w: Vec<f64> = (0..k.dimension()).map(|i| seed[i % seed.len()] * ((i % 7) as f64 + 1.0)).collect();
        prop_assume!(w.iter().any(|&v| v != 0.0));
        prop_assert!(ah_norm(&k, &w).unwrap() > 0.0);
    }

    #[test]
    fn preconditioning_does_not_change_the_solution(kappa in 0.1..3.0f64, shift in -1.0..1.0f64) {
        let fx = disk_fixture();
        let k = fx.operators.system_matrix(&Parameters::new(1.0, 1.0, kappa).unwrap()).unwrap();
        let f = fx.space.interpolate(|x| x[0] * x[1] + shift);
        let g = fx.space.interpolate(|x| x[0] - shift);
        let b = fx.operators.load_vector(f.coefficients(), g.boundary_coefficients()).unwrap();
        let (u1, _) = solve_spd(&k, &b, 1e-12).unwrap();
        let opts = SolveOptions { jacobi: false, ..SolveOptions::default() };
        let (u2, _) = solve_spd_with(&k, &b, &opts).unwrap();
        let diff: Vec<f64> = u1.iter().zip(&u2).map(|(a, c)| a - c).collect();
        prop_assert!(ah_norm(&k, &diff).unwrap() <= 1e-9 * ah_norm(&k, &u1).unwrap().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solution_is_invariant_under_vertex_renumbering(
        order in Just((0..127).collect::<Vec<usize>>()).prop_shuffle(),
        k in 1..=2usize,
    ) {
        let disk = Domain::unit_disk();
        let mesh = generate_linear_mesh(&disk, 0.3).unwrap();
        prop_assume!(mesh.n_vertices() == order.len());
        let cfg = StudyConfig { degree: k, ..StudyConfig::default() };
        let exact = cfg.exact_solution();
        let a = solve_level(&mesh, &cfg, &exact).unwrap();
        let b = solve_level(&relabel(&mesh, &order), &cfg, &exact).unwrap();
        let ea = error_components(&a.space, &a.solution, &exact).unwrap();
        let eb = error_components(&b.space, &b.solution, &exact).unwrap();
        prop_assert!((ea.l2() - eb.l2()).abs() <= 1e-10 * ea.l2());
        prop_assert!((ea.h1() - eb.h1()).abs() <= 1e-10 * ea.h1());
    }
}

#[test]
fn galerkin_error_is_comparable_to_interpolation_error() {
    for (kind, degree) in [
        (DomainKind::UnitDisk, 1),
        (DomainKind::UnitDisk, 2),
        (DomainKind::UnitBall, 1),
        (DomainKind::UnitBall, 2),
    ] {
        let cfg = StudyConfig {
            domain: kind,
            degree,
            ..StudyConfig::default()
        };
        let exact = cfg.exact_solution();
        for mesh in cfg.meshes().unwrap().iter().take(2) {
            let level = solve_level(mesh, &cfg, &exact).unwrap();
            let galerkin = error_components(&level.space, &level.solution, &exact).unwrap();
            let interpolant = error_components(
                &level.space,
                interpolate(&level.space, &exact).coefficients(),
                &exact,
            )
            .unwrap();
            assert!(
                galerkin.h1() <= 5.0 * interpolant.h1(),
                "{kind:?} k={degree}: {} vs {}",
                galerkin.h1(),
                interpolant.h1()
            );
        }
    }
}

#[test]
fn boundary_nodes_come_first_for_every_degree() {
    let ball = Domain::new(DomainKind::UnitBall);
    let mesh = generate_linear_mesh(&ball, 0.8).unwrap();
    for k in 1..=3 {
        let space = build_space(&mesh, &ball, k).unwrap();
        let nb = space.n_boundary_nodes();
        for &(c, f) in mesh.boundary_faces() {
            assert!(space.face_nodes(c, f).iter().all(|&j| j < nb));
        }
        for x in &space.coordinates()[nb..] {
            assert!(ball.signed_distance(x) < -1e-12);
        }
    }
}
