//! Quadrature on the unit simplex of dimension 1, 2 and 3.
//!
//! Low degrees use the classical symmetric rules; everything else is a
//! collapsed (Duffy) tensor product of Gauss–Legendre rules, which has
//! positive weights and interior points for any exactness degree.

use crate::linalg::Vec3;
use crate::{Error, Result};

pub const MAX_EXACTNESS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub degree: usize,
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * z * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = p0;
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn points_for(degree: usize) -> usize {
    degree / 2 + 1
}

/// A rule on the reference simplex of dimension `dim` exact for all
/// polynomials of total degree `≤ degree`.
pub fn make_quadrature(dim: usize, degree: usize) -> Result<QuadratureRule> {
    if !(1..=3).contains(&dim) || degree > MAX_EXACTNESS {
        return Err(Error::UnsupportedQuadrature { dim, degree });
    }
    let (points, weights) = match (dim, degree) {
        (2, 0 | 1) => (vec![[1.0 / 3.0, 1.0 / 3.0, 0.0]], vec![0.5]),
        (2, 2) => {
            let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
            (
                vec![[a, a, 0.0], [b, a, 0.0], [a, b, 0.0]],
                vec![1.0 / 6.0; 3],
            )
        }
        (3, 0 | 1) => (vec![[0.25, 0.25, 0.25]], vec![1.0 / 6.0]),
        (3, 2) => {
            let a = (5.0 - 5f64.sqrt()) / 20.0;
            let b = (5.0 + 3.0 * 5f64.sqrt()) / 20.0;
            (
                vec![[a, a, a], [b, a, a], [a, b, a], [a, a, b]],
                vec![1.0 / 24.0; 4],
            )
        }
        (1, _) => {
            let (x, w) = gauss_legendre(points_for(degree));
            (x.iter().map(|&t| [t, 0.0, 0.0]).collect(), w)
        }
        (2, _) => {
            // x = u, y = (1 - u) v, dx dy = (1 - u) du dv
            let (xu, wu) = gauss_legendre(points_for(degree + 1));
            let (xv, wv) = gauss_legendre(points_for(degree));
            let mut p = Vec::new();
            let mut w = Vec::new();
            for (u, a) in xu.iter().zip(&wu) {
                for (v, b) in xv.iter().zip(&wv) {
                    p.push([*u, (1.0 - u) * v, 0.0]);
                    w.push(a * b * (1.0 - u));
                }
            }
            (p, w)
        }
        _ => {
            // x = u, y = (1 - u) v, z = (1 - u)(1 - v) t
            let (xu, wu) = gauss_legendre(points_for(degree + 2));
            let (xv, wv) = gauss_legendre(points_for(degree + 1));
            let (xt, wt) = gauss_legendre(points_for(degree));
            let mut p = Vec::new();
            let mut w = Vec::new();
            for (u, a) in xu.iter().zip(&wu) {
                for (v, b) in xv.iter().zip(&wv) {
                    for (t, c) in xt.iter().zip(&wt) {
                        p.push([*u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * t]);
                        w.push(a * b * c * (1.0 - u) * (1.0 - u) * (1.0 - v));
                    }
                }
            }
            (p, w)
        }
    };
    Ok(QuadratureRule {
        dim,
        degree,
        points,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    /// ∫ x^a y^b z^c over the unit simplex: a! b! c! / (a + b + c + dim)!
    fn monomial_integral(dim: usize, e: [usize; 3]) -> f64 {
        let num: f64 = e[..dim].iter().map(|&p| factorial(p)).product();
        num / factorial(e[..dim].iter().sum::<usize>() + dim)
    }

    fn exponents(dim: usize, degree: usize) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree {
                for c in 0..=degree {
                    let e = [a, if dim > 1 { b } else { 0 }, if dim > 2 { c } else { 0 }];
                    if e.iter().sum::<usize>() <= degree && !out.contains(&e) {
                        out.push(e);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn monomial_exactness() {
        for dim in 1..=3 {
            for q in 0..=12 {
                let rule = make_quadrature(dim, q).unwrap();
                let vol = 1.0 / factorial(dim);
                assert!((rule.weights.iter().sum::<f64>() - vol).abs() <= 1e-14);
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                for e in exponents(dim, q) {
                    let approx: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * (0..dim).map(|m| p[m].powi(e[m] as i32)).product::<f64>())
                        .sum();
                    let exact = monomial_integral(dim, e);
                    assert!(
                        (approx - exact).abs() <= 1e-13 * exact,
                        "dim {dim} q {q} e {e:?}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn named_rules() {
        let r = make_quadrature(2, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-16 && (r.weights[0] - 0.5).abs() < 1e-16);

        let r = make_quadrature(1, 3).unwrap();
        assert_eq!(r.len(), 2);
        let s3 = 3f64.sqrt();
        assert!((r.points[0][0] - (3.0 - s3) / 6.0).abs() < 1e-15);
        assert!((r.points[1][0] - (3.0 + s3) / 6.0).abs() < 1e-15);
        assert!(r.weights.iter().all(|w| (w - 0.5).abs() < 1e-15));

        let r = make_quadrature(3, 2).unwrap();
        assert_eq!(r.len(), 4);
        assert!((r.weights.iter().sum::<f64>() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(
            make_quadrature(2, MAX_EXACTNESS + 1),
            Err(Error::UnsupportedQuadrature { .. })
        ));
        assert!(make_quadrature(4, 2).is_err());
    }
}
