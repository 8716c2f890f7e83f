//! Refinement studies: solve on a mesh hierarchy, measure errors and write
//! CSV tables.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::assembly::{
    assemble_operators, assembly_quadrature_degree, boundary_quadrature_points, build_space,
    discrete_surface_measure, discrete_volume, FeSpace, Operators, Parameters,
};
use crate::element::make_quadrature;
use crate::geometry::{Domain, DomainKind};
use crate::linalg;
use crate::manufactured::{check_derivatives, Builtin, ExactSolution, Manufactured};
use crate::mesh::{mesh_hierarchy, Mesh};
use crate::norms::{error_components_with, interpolate, ErrorComponents, ErrorReport, Lift};
use crate::solver::{solve_spd, SolveReport, DEFAULT_TOLERANCE};
use crate::{Error, Result};

pub const STUDY_HEADER: &str = "level,h,N,errL2,errH1,eocL2,eocH1";
pub const DIAGNOSTICS_HEADER: &str = "level,h,volume,surface,maxBoundaryDist,minJacobian,maxCT";

/// Which boundary condition is solved. `Robin` drops the Laplace–Beltrami
/// term (`β = 0`); `Neumann` also drops the mass term (`α = β = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Grp,
    Robin,
    Neumann,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grp" | "generalized" => Ok(Variant::Grp),
            "robin" => Ok(Variant::Robin),
            "neumann" => Ok(Variant::Neumann),
            other => Err(Error::InvalidInput(format!(
                "unknown variant `{other}` (expected grp, robin or neumann)"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Grp => "grp",
            Variant::Robin => "robin",
            Variant::Neumann => "neumann",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub domain: DomainKind,
    pub degree: usize,
    pub levels: usize,
    /// Target size of the coarsest mesh; defaults to 0.3 (disk) or 0.8 (ball).
    pub h0: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub variant: Variant,
    /// Defaults to the polynomial solution of the domain's dimension.
    pub solution: Option<Builtin>,
    pub tol: f64,
    pub lift: Lift,
    pub out: Option<PathBuf>,
    pub diagnostics: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            domain: DomainKind::UnitDisk,
            degree: 1,
            levels: 4,
            h0: None,
            alpha: 1.0,
            beta: 1.0,
            kappa: 1.0,
            variant: Variant::Grp,
            solution: None,
            tol: DEFAULT_TOLERANCE,
            lift: Lift::default(),
            out: None,
            diagnostics: None,
        }
    }
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| config_err(field, format!("cannot parse `{}`: {e}", value.trim())))
}

impl StudyConfig {
    /// Sets one field from its textual form; keys match the CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "domain" => self.domain = parse_field(key, value)?,
            "degree" => self.degree = parse_field(key, value)?,
            "levels" => self.levels = parse_field(key, value)?,
            "h0" => self.h0 = Some(parse_field(key, value)?),
            "alpha" => self.alpha = parse_field(key, value)?,
            "beta" => self.beta = parse_field(key, value)?,
            "kappa" => self.kappa = parse_field(key, value)?,
            "variant" => self.variant = parse_field(key, value)?,
            "solution" => self.solution = Some(parse_field(key, value)?),
            "tol" => self.tol = parse_field(key, value)?,
            "lift" => self.lift = parse_field(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "diagnostics" => self.diagnostics = Some(PathBuf::from(value.trim())),
            _ => return Err(config_err(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are ignored.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        Domain::new(self.domain)
    }

    pub fn dimension(&self) -> usize {
        self.domain().dimension()
    }

    pub fn coarse_h(&self) -> f64 {
        self.h0.unwrap_or(match self.domain {
            DomainKind::UnitDisk => 0.3,
            DomainKind::UnitBall => 0.8,
        })
    }

    pub fn exact_solution(&self) -> Builtin {
        self.solution
            .unwrap_or_else(|| Builtin::default_for(self.dimension()))
    }

    /// `α, β, κ` after the variant's zeroing.
    pub fn parameters(&self) -> Result<Parameters> {
        let (alpha, beta) = match self.variant {
            Variant::Grp => (self.alpha, self.beta),
            Variant::Robin => (self.alpha, 0.0),
            Variant::Neumann => (0.0, 0.0),
        };
        let p = Parameters {
            alpha,
            beta,
            kappa: self.kappa,
        };
        let field = match self.variant {
            Variant::Neumann => "kappa",
            _ => "alpha",
        };
        p.validate().map_err(|e| config_err(field, e.to_string()))?;
        if self.variant == Variant::Grp && beta <= 0.0 {
            return Err(config_err("beta", "the grp variant needs beta > 0"));
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(config_err(
                "levels",
                format!("need at least 2 levels, got {}", self.levels),
            ));
        }
        if !(1..=crate::element::reference::MAX_DEGREE).contains(&self.degree) {
            return Err(config_err(
                "degree",
                format!(
                    "must lie in 1..={}, got {}",
                    crate::element::reference::MAX_DEGREE,
                    self.degree
                ),
            ));
        }
        let h0 = self.coarse_h();
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(config_err("h0", format!("must be positive, got {h0}")));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return Err(config_err(
                "tol",
                format!("must lie in (0, 1e-4], got {}", self.tol),
            ));
        }
        self.parameters()?;
        Ok(())
    }

    pub fn meshes(&self) -> Result<Vec<Mesh>> {
        mesh_hierarchy(&self.domain(), self.coarse_h(), self.levels)
    }
}

/// Discrete solution on one mesh together with everything used to build it.
pub struct LevelSolution {
    pub space: FeSpace,
    pub operators: Operators,
    pub solution: Vec<f64>,
    pub solve: SolveReport,
}

/// Assembles and solves the problem with data manufactured from `exact`.
pub fn solve_level(
    mesh: &Mesh,
    config: &StudyConfig,
    exact: &dyn ExactSolution,
) -> Result<LevelSolution> {
    let params = config.parameters()?;
    let domain = config.domain();
    let space = build_space(mesh, &domain, config.degree)?;
    let operators = assemble_operators(&space)?;
    let k = operators.system_matrix(&params)?;
    let data = Manufactured::new(exact, params, domain.dimension());
    let f: Vec<f64> = space.coordinates().par_iter().map(|x| data.f(x)).collect();
    let g: Vec<f64> = space.coordinates()[..space.n_boundary_nodes()]
        .par_iter()
        .map(|x| data.g(x))
        .collect();
    let b = operators.load_vector(&f, &g)?;
    let (solution, solve) = solve_spd(&k, &b, config.tol)?;
    Ok(LevelSolution {
        space,
        operators,
        solution,
        solve,
    })
}

/// Per-level solver statistics and error components alongside the table.
pub struct StudyOutcome {
    pub report: ErrorReport,
    pub solves: Vec<SolveReport>,
    pub components: Vec<ErrorComponents>,
}

fn check_solution(config: &StudyConfig) -> Result<Builtin> {
    let exact = config.exact_solution();
    check_derivatives(&exact, config.dimension())
        .map_err(|e| config_err("solution", e.to_string()))?;
    Ok(exact)
}

pub fn run_study(config: &StudyConfig) -> Result<StudyOutcome> {
    config.validate()?;
    let exact = check_solution(config)?;
    let params = config.parameters()?;
    let mut report = ErrorReport::new(params.alpha, params.beta, params.kappa, config.degree);
    let mut solves = Vec::new();
    let mut components = Vec::new();
    for mesh in config.meshes()? {
        let level = solve_level(&mesh, config, &exact)?;
        let e = error_components_with(&level.space, &level.solution, &exact, config.lift)?;
        report.push(mesh.h(), level.space.n_nodes(), e.l2(), e.h1());
        solves.push(level.solve);
        components.push(e);
    }
    Ok(StudyOutcome {
        report,
        solves,
        components,
    })
}

/// Errors of the nodal interpolant of the exact solution on each level.
pub fn run_interpolation_study(config: &StudyConfig) -> Result<ErrorReport> {
    config.validate()?;
    let exact = check_solution(config)?;
    let params = config.parameters()?;
    let mut report = ErrorReport::new(params.alpha, params.beta, params.kappa, config.degree);
    for mesh in config.meshes()? {
        let space = build_space(&mesh, &config.domain(), config.degree)?;
        let e = error_components_with(
            &space,
            interpolate(&space, &exact).coefficients(),
            &exact,
            config.lift,
        )?;
        report.push(mesh.h(), space.n_nodes(), e.l2(), e.h1());
    }
    Ok(report)
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn study_csv(report: &ErrorReport) -> String {
    let mut out = String::from(STUDY_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.level,
            fmt_float(r.h),
            r.n_nodes,
            fmt_float(r.err_l2),
            fmt_float(r.err_h1),
            opt(r.eoc_l2),
            opt(r.eoc_h1)
        );
    }
    out
}

/// Geometry measurements of one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryRecord {
    pub level: usize,
    pub h: f64,
    /// `|Ω_h^(k)|`
    pub volume: f64,
    /// `|Γ_h^(k)|`
    pub surface: f64,
    /// Largest `|d|` over the boundary quadrature points of `Γ_h^(k)`.
    pub max_boundary_distance: f64,
    /// Smallest `det DΦ_T^(k)` over all bulk quadrature points.
    pub min_jacobian: f64,
    /// Largest sampled `sup |Dρ_T B_T^{-1}|`.
    pub max_ct: f64,
}

/// Lattice resolution for sampling `C_T`.
const CT_RESOLUTION: usize = 8;

pub fn geometry_record(level: usize, space: &FeSpace) -> Result<GeometryRecord> {
    let domain = space.domain();
    let max_boundary_distance = boundary_quadrature_points(space)?
        .iter()
        .map(|x| domain.signed_distance(x).abs())
        .fold(0.0, f64::max);
    let n = space.dimension();
    let rule = make_quadrature(n, assembly_quadrature_degree(space.degree()))?;
    let tab = space.reference().tabulate(&rule.points);
    let min_jacobian = (0..space.n_cells())
        .into_par_iter()
        .map(|c| {
            (0..rule.points.len())
                .map(|q| linalg::det(&space.map(c).isoparametric_at(&tab, q).1, n))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let max_ct = space
        .maps()
        .par_iter()
        .map(|m| m.rho_derivative_bound(CT_RESOLUTION))
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(GeometryRecord {
        level,
        h: space.mesh().h(),
        volume: discrete_volume(space)?,
        surface: discrete_surface_measure(space)?,
        max_boundary_distance,
        min_jacobian,
        max_ct,
    })
}

pub fn run_geometry_diagnostics(config: &StudyConfig) -> Result<Vec<GeometryRecord>> {
    config.validate()?;
    config
        .meshes()?
        .iter()
        .enumerate()
        .map(|(l, mesh)| geometry_record(l, &build_space(mesh, &config.domain(), config.degree)?))
        .collect()
}

pub fn diagnostics_csv(records: &[GeometryRecord]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.level,
            fmt_float(r.h),
            fmt_float(r.volume),
            fmt_float(r.surface),
            fmt_float(r.max_boundary_distance),
            fmt_float(r.min_jacobian),
            fmt_float(r.max_ct)
        );
    }
    out
}
