//! Exact solutions with closed-form derivatives and the data `f`, `g` they
//! induce.

use std::fmt;
use std::str::FromStr;

use crate::assembly::Parameters;
use crate::linalg::{self, Mat3, Vec3};
use crate::{Error, Result};

/// A smooth function on a neighbourhood of Ω̄ with its first and second
/// derivatives. Points are 3-vectors; 2D solutions ignore the last entry.
pub trait ExactSolution: Sync {
    fn value(&self, x: &Vec3) -> f64;
    fn gradient(&self, x: &Vec3) -> Vec3;
    fn hessian(&self, x: &Vec3) -> Mat3;

    fn laplacian(&self, x: &Vec3) -> f64 {
        let h = self.hessian(x);
        h[0][0] + h[1][1] + h[2][2]
    }
}

/// Built-in solutions selectable by name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// `xy (x² + y²)²`
    Poly2d,
    /// `x² + y² - x²z²`
    Poly3d,
    /// `u ≡ c`
    Constant(f64),
    /// `u = c · x`
    Linear(Vec3),
    /// `x² - 2xy + 3y² + yz - z²`
    Quadratic,
}

impl Builtin {
    /// The default solution for a spatial dimension.
    pub fn default_for(dim: usize) -> Builtin {
        if dim == 3 {
            Builtin::Poly3d
        } else {
            Builtin::Poly2d
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Poly2d => write!(f, "poly2d"),
            Builtin::Poly3d => write!(f, "poly3d"),
            Builtin::Constant(c) if *c == 1.0 => write!(f, "one"),
            Builtin::Constant(c) => write!(f, "constant:{c}"),
            Builtin::Linear(_) => write!(f, "linear"),
            Builtin::Quadratic => write!(f, "quadratic"),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some(c) = s.strip_prefix("constant:") {
            return c
                .parse()
                .map(Builtin::Constant)
                .map_err(|_| Error::InvalidInput(format!("bad constant value `{c}`")));
        }
        match s.as_str() {
            "poly2d" => Ok(Builtin::Poly2d),
            "poly3d" => Ok(Builtin::Poly3d),
            "one" | "constant" => Ok(Builtin::Constant(1.0)),
            "linear" => Ok(Builtin::Linear([1.0, -2.0, 0.5])),
            "quadratic" => Ok(Builtin::Quadratic),
            _ => Err(Error::InvalidInput(format!(
                "unknown solution `{s}` (expected poly2d, poly3d, one, constant:<c>, linear, quadratic)"
            ))),
        }
    }
}

impl ExactSolution for Builtin {
    fn value(&self, p: &Vec3) -> f64 {
        let [x, y, z] = *p;
        match self {
            Builtin::Poly2d => {
                let s = x * x + y * y;
                x * y * s * s
            }
            Builtin::Poly3d => x * x + y * y - x * x * z * z,
            Builtin::Constant(c) => *c,
            Builtin::Linear(c) => linalg::dot(c, p),
            Builtin::Quadratic => x * x - 2.0 * x * y + 3.0 * y * y + y * z - z * z,
        }
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        let [x, y, z] = *p;
        match self {
            Builtin::Poly2d => {
                let s = x * x + y * y;
                [
                    y * s * s + 4.0 * x * x * y * s,
                    x * s * s + 4.0 * x * y * y * s,
                    0.0,
                ]
            }
            Builtin::Poly3d => [2.0 * x - 2.0 * x * z * z, 2.0 * y, -2.0 * x * x * z],
            Builtin::Constant(_) => [0.0; 3],
            Builtin::Linear(c) => *c,
            Builtin::Quadratic => [2.0 * x - 2.0 * y, -2.0 * x + 6.0 * y + z, y - 2.0 * z],
        }
    }

    fn hessian(&self, p: &Vec3) -> Mat3 {
        let [x, y, z] = *p;
        match self {
            Builtin::Poly2d => {
                let s = x * x + y * y;
                let xx = 12.0 * x * y * s + 8.0 * x * x * x * y;
                let yy = 12.0 * x * y * s + 8.0 * x * y * y * y;
                let xy = 5.0 * s * s + 8.0 * x * x * y * y;
                [[xx, xy, 0.0], [xy, yy, 0.0], [0.0; 3]]
            }
            Builtin::Poly3d => {
                let xz = -4.0 * x * z;
                [
                    [2.0 - 2.0 * z * z, 0.0, xz],
                    [0.0, 2.0, 0.0],
                    [xz, 0.0, -2.0 * x * x],
                ]
            }
            Builtin::Constant(_) | Builtin::Linear(_) => [[0.0; 3]; 3],
            Builtin::Quadratic => [[2.0, -2.0, 0.0], [-2.0, 6.0, 1.0], [0.0, 1.0, -2.0]],
        }
    }
}

/// Laplace–Beltrami operator on the unit sphere `|x| = 1` applied to the
/// trace of `u`: `Δ_Γ u = Δu - (n - 1) ∂_r u - ∂_rr u`.
pub fn sphere_laplace_beltrami(u: &dyn ExactSolution, dim: usize, x: &Vec3) -> f64 {
    let r = linalg::norm(x);
    let nu = linalg::scale(1.0 / r, x);
    let dr = linalg::dot(&u.gradient(x), &nu);
    let drr = linalg::dot(&nu, &linalg::mat_vec(&u.hessian(x), &nu));
    u.laplacian(x) - (dim as f64 - 1.0) * dr - drr
}

/// Right-hand sides `f = -Δu + κu` and
/// `g = ∂u/∂ν + αu - βΔ_Γ u` of the problem posed on the unit disk or ball.
#[derive(Clone, Copy)]
pub struct Manufactured<'a> {
    pub exact: &'a dyn ExactSolution,
    pub params: Parameters,
    pub dim: usize,
}

impl<'a> Manufactured<'a> {
    pub fn new(exact: &'a dyn ExactSolution, params: Parameters, dim: usize) -> Self {
        Manufactured { exact, params, dim }
    }

    pub fn f(&self, x: &Vec3) -> f64 {
        -self.exact.laplacian(x) + self.params.kappa * self.exact.value(x)
    }

    /// `g` at a boundary point, with normal `x / |x|`.
    pub fn g(&self, x: &Vec3) -> f64 {
        let nu = linalg::scale(1.0 / linalg::norm(x), x);
        let mut g =
            linalg::dot(&nu, &self.exact.gradient(x)) + self.params.alpha * self.exact.value(x);
        if self.params.beta != 0.0 {
            g -= self.params.beta * sphere_laplace_beltrami(self.exact, self.dim, x);
        }
        g
    }
}

/// The data `f`, `g` induced by `exact` under `params`.
pub fn manufactured_rhs(
    exact: &dyn ExactSolution,
    params: Parameters,
    dim: usize,
) -> Manufactured<'_> {
    Manufactured::new(exact, params, dim)
}

/// Deterministic points in `[-1, 1]^dim` (Kronecker sequence).
fn sample_points(dim: usize, count: usize) -> Vec<Vec3> {
    let alpha = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_2,
        0.438_000_864_685_692,
    ];
    (1..=count)
        .map(|i| {
            let mut x = [0.0; 3];
            for m in 0..dim {
                x[m] = 2.0 * (i as f64 * alpha[m]).fract() - 1.0;
            }
            x
        })
        .collect()
}

/// Checks the closed-form gradient and Hessian against centred differences
/// (step `1e-5`) at 100 points, with relative tolerance `1e-6`.
pub fn check_derivatives(u: &dyn ExactSolution, dim: usize) -> Result<()> {
    let h = 1e-5;
    for x in sample_points(dim, 100) {
        let g = u.gradient(&x);
        let hess = u.hessian(&x);
        for m in 0..dim {
            let mut xp = x;
            let mut xm = x;
            xp[m] += h;
            xm[m] -= h;
            let fd = (u.value(&xp) - u.value(&xm)) / (2.0 * h);
            let scale = g[m].abs().max(1.0);
            if (fd - g[m]).abs() > 1e-6 * scale {
                return Err(Error::InvalidInput(format!(
                    "gradient component {m} at {x:?}: closed form {} vs difference {fd}",
                    g[m]
                )));
            }
            let gp = u.gradient(&xp);
            let gm = u.gradient(&xm);
            for l in 0..dim {
                let fd = (gp[l] - gm[l]) / (2.0 * h);
                if (fd - hess[l][m]).abs() > 1e-6 * hess[l][m].abs().max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "hessian entry ({l}, {m}) at {x:?}: closed form {} vs difference {fd}",
                        hess[l][m]
                    )));
                }
            }
        }
    }
    Ok(())
}
