//! Conjugate gradients for the symmetric positive definite system `K u = b`.

use rayon::prelude::*;

use crate::assembly::SparseSpdMatrix;
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Dot products are summed over fixed-size blocks, then across blocks in
/// order, so the result does not depend on the thread count.
const BLOCK: usize = 2048;

/// Restarts allowed without halving the best true residual seen so far.
const MAX_IDLE_RESTARTS: usize = 8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(BLOCK)
        .zip(b.par_chunks(BLOCK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// `b - K u` with error-free products and compensated sums, so the result is
/// accurate even when `K u` and `b` nearly cancel.
fn true_residual(k: &SparseSpdMatrix, u: &[f64], b: &[f64], r: &mut [f64]) {
    r.par_iter_mut().enumerate().for_each(|(i, ri)| {
        let (cols, vals) = k.row(i);
        let mut sum = b[i];
        let mut comp = 0.0;
        let mut add = |x: f64| {
            let t = sum + x;
            comp += if sum.abs() >= x.abs() {
                (sum - t) + x
            } else {
                (x - t) + sum
            };
            sum = t;
        };
        for (&j, &a) in cols.iter().zip(vals) {
            let p = -a * u[j];
            add(p);
            add((-a).mul_add(u[j], -p));
        }
        *ri = sum + comp;
    });
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target `‖K u - b‖ ≤ tol ‖b‖`.
    pub tol: f64,
    /// Defaults to `20 N` when `None`.
    pub max_iterations: Option<usize>,
    pub jacobi: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOLERANCE,
            max_iterations: None,
            jacobi: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    /// `(uᵀ K u)^{1/2}` of the returned solution.
    pub energy_norm: f64,
}

/// Solves `K u = b` with Jacobi-preconditioned CG and default options.
pub fn solve_spd(k: &SparseSpdMatrix, b: &[f64], tol: f64) -> Result<(Vec<f64>, SolveReport)> {
    solve_spd_with(
        k,
        b,
        &SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_spd_with(
    k: &SparseSpdMatrix,
    b: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = k.dimension();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if !(opts.tol > 0.0 && opts.tol <= 1e-4) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1e-4], got {}",
            opts.tol
        )));
    }
    if !k.values().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("system matrix"));
    }
    if !b.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("right-hand side"));
    }
    let inv_diag: Vec<f64> = if opts.jacobi {
        // a nonpositive diagonal entry rules out positive definiteness
        k.diagonal()
            .iter()
            .map(|&d| {
                if d > 0.0 && d.is_finite() {
                    Ok(1.0 / d)
                } else {
                    Err(Error::Indefinite {
                        iteration: 0,
                        curvature: d,
                    })
                }
            })
            .collect::<Result<_>>()?
    } else {
        vec![1.0; n]
    };
    let max_it = opts.max_iterations.unwrap_or(20 * n.max(1));

    let b_norm = dot(b, b).sqrt();
    if !b_norm.is_finite() {
        return Err(Error::NonFinite("right-hand side norm"));
    }
    let mut u = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((
            u,
            SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                energy_norm: 0.0,
            },
        ));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut kp = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut residual = 1.0;
    let mut best_restart = f64::INFINITY;
    let mut idle_restarts = 0;
    for it in 1..=max_it {
        k.mul_vec_into(&p, &mut kp);
        let curvature = dot(&p, &kp);
        if curvature <= 0.0 || !curvature.is_finite() {
            return Err(Error::Indefinite {
                iteration: it,
                curvature,
            });
        }
        let step = rz / curvature;
        u.par_iter_mut()
            .zip(&p)
            .for_each(|(ui, pi)| *ui += step * pi);
        r.par_iter_mut()
            .zip(&kp)
            .for_each(|(ri, qi)| *ri -= step * qi);
        residual = dot(&r, &r).sqrt() / b_norm;
        if residual <= opts.tol {
            // the recursive residual drifts from b - K u; confirm and restart if needed
            true_residual(k, &u, b, &mut r);
            residual = dot(&r, &r).sqrt() / b_norm;
            if !residual.is_finite() {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual,
                });
            }
            if residual > opts.tol {
                if residual < 0.5 * best_restart {
                    best_restart = residual;
                    idle_restarts = 0;
                } else {
                    idle_restarts += 1;
                    if idle_restarts > MAX_IDLE_RESTARTS {
                        return Err(Error::NotConverged {
                            iterations: it,
                            residual,
                        });
                    }
                }
                z.par_iter_mut()
                    .zip(&r)
                    .zip(&inv_diag)
                    .for_each(|((zi, ri), d)| *zi = ri * d);
                p.copy_from_slice(&z);
                rz = dot(&r, &z);
                continue;
            }
            let energy_norm = ah_norm(k, &u)?;
            return Ok((
                u,
                SolveReport {
                    iterations: it,
                    relative_residual: residual,
                    energy_norm,
                },
            ));
        }
        z.par_iter_mut()
            .zip(&r)
            .zip(&inv_diag)
            .for_each(|((zi, ri), d)| *zi = ri * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut()
            .zip(&z)
            .for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    Err(Error::NotConverged {
        iterations: max_it,
        residual,
    })
}

/// `‖w‖_{a_h} = (wᵀ K w)^{1/2}`; a negative quadratic form is reported as a
/// matrix defect.
pub fn ah_norm(k: &SparseSpdMatrix, w: &[f64]) -> Result<f64> {
    if w.len() != k.dimension() {
        return Err(Error::LengthMismatch {
            expected: k.dimension(),
            found: w.len(),
        });
    }
    let q = dot(&k.mul_vec(w), w);
    if q < 0.0 || !q.is_finite() {
        return Err(Error::NegativeQuadraticForm(q));
    }
    Ok(q.sqrt())
}
