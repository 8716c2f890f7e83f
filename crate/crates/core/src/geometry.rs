//! Smooth domains described implicitly through their signed distance function.
//!
//! For a point `x` in the strip `U_δ = {|d(x)| < δ}` the closest point
//! `p(x)` on Γ is unique and `x = p(x) + d(x) ν(p(x))`.

use std::fmt;
use std::str::FromStr;

use crate::linalg::{self, Mat3, Vec3};
use crate::{Error, Result};

/// Tolerance on `|d(s)|` for a point to be accepted as lying on Γ.
pub const ON_BOUNDARY_TOL: f64 = 1e-10;

const STRIP_WIDTH: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    UnitDisk,
    UnitBall,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::UnitDisk => write!(f, "disk"),
            DomainKind::UnitBall => write!(f, "ball"),
        }
    }
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disk" | "unit-disk" | "circle" => Ok(DomainKind::UnitDisk),
            "ball" | "unit-ball" | "sphere" => Ok(DomainKind::UnitBall),
            other => Err(format!("unknown domain `{other}` (expected disk or ball)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    strip_width: f64,
}

impl Domain {
    pub fn new(kind: DomainKind) -> Self {
        Domain {
            kind,
            strip_width: STRIP_WIDTH,
        }
    }

    pub fn unit_disk() -> Self {
        Self::new(DomainKind::UnitDisk)
    }

    pub fn unit_ball() -> Self {
        Self::new(DomainKind::UnitBall)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            DomainKind::UnitDisk => 2,
            DomainKind::UnitBall => 3,
        }
    }

    /// Half-width δ of the strip in which the closest point is unique.
    pub fn strip_width(&self) -> f64 {
        self.strip_width
    }

    /// Exact volume |Ω|.
    pub fn volume(&self) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => std::f64::consts::PI,
            DomainKind::UnitBall => 4.0 * std::f64::consts::PI / 3.0,
        }
    }

    /// Exact surface measure |Γ|.
    pub fn surface_area(&self) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => 2.0 * std::f64::consts::PI,
            DomainKind::UnitBall => 4.0 * std::f64::consts::PI,
        }
    }

    fn radius(&self, x: &Vec3) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => x[0].hypot(x[1]),
            DomainKind::UnitBall => linalg::norm(x),
        }
    }

    /// Signed distance: negative inside, zero on Γ, positive outside.
    pub fn signed_distance(&self, x: &Vec3) -> f64 {
        self.radius(x) - 1.0
    }

    pub fn in_strip(&self, x: &Vec3) -> bool {
        self.signed_distance(x).abs() < self.strip_width
    }

    /// Closest-point projection `p(x)` onto Γ.
    ///
    /// For the disk and the ball the projection is radial and unique for every
    /// `x` except the centre, so only the centre is rejected. Callers that need
    /// the strip guarantee use [`Domain::closest_point_in_strip`].
    pub fn closest_point(&self, x: &Vec3) -> Result<Vec3> {
        if self.radius(x) < 1e-300 {
            return Err(Error::ProjectionNotUnique {
                distance: self.signed_distance(x),
            });
        }
        Ok(self.project_unchecked(x))
    }

    /// Closest-point projection restricted to the strip `U_δ`.
    pub fn closest_point_in_strip(&self, x: &Vec3) -> Result<Vec3> {
        let d = self.signed_distance(x);
        if d.abs() >= self.strip_width {
            return Err(Error::OutsideStrip {
                distance: d,
                strip_width: self.strip_width,
            });
        }
        Ok(self.project_unchecked(x))
    }

    /// Radial projection without any check; `x` must not be the centre.
    pub(crate) fn project_unchecked(&self, x: &Vec3) -> Vec3 {
        let r = self.radius(x);
        let mut p = linalg::scale(1.0 / r, x);
        if self.kind == DomainKind::UnitDisk {
            p[2] = 0.0;
        }
        p
    }

    /// Derivative `Dp(x)` of the closest-point projection.
    pub fn closest_point_jacobian(&self, x: &Vec3) -> Mat3 {
        let n = self.dimension();
        let r = self.radius(x);
        let p = self.project_unchecked(x);
        let mut jac = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                jac[i][j] = (delta - p[i] * p[j]) / r;
            }
        }
        jac
    }

    /// Outward unit normal ν at a point of Γ.
    pub fn outward_normal(&self, s: &Vec3) -> Result<Vec3> {
        let d = self.signed_distance(s);
        if d.abs() > ON_BOUNDARY_TOL {
            return Err(Error::OffBoundary { distance: d });
        }
        Ok(self.project_unchecked(s))
    }

    /// Gradient of the signed distance, defined away from the origin.
    pub fn distance_gradient(&self, x: &Vec3) -> Vec3 {
        self.project_unchecked(x)
    }
}

/// `∇_Γ w = ∇w - (∇w·ν) ν`.
pub fn tangential_gradient(gradient: &Vec3, normal: &Vec3) -> Vec3 {
    let s = linalg::dot(gradient, normal);
    linalg::sub(gradient, &linalg::scale(s, normal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &Vec3, b: &Vec3, tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    #[test]
    fn signed_distance_examples() {
        let disk = Domain::unit_disk();
        assert_eq!(disk.signed_distance(&[0.0, 0.0, 0.0]), -1.0);
        assert_eq!(disk.signed_distance(&[1.0, 0.0, 0.0]), 0.0);
        assert_eq!(Domain::unit_ball().signed_distance(&[2.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn closest_point_examples() {
        let disk = Domain::unit_disk();
        assert!(close(
            &disk.closest_point(&[2.0, 0.0, 0.0]).unwrap(),
            &[1.0, 0.0, 0.0],
            0.0
        ));
        assert!(close(
            &disk.closest_point(&[0.6, 0.8, 0.0]).unwrap(),
            &[0.6, 0.8, 0.0],
            1e-15
        ));
        let ball = Domain::unit_ball();
        assert!(close(
            &ball.closest_point(&[0.0, 0.0, 0.5]).unwrap(),
            &[0.0, 0.0, 1.0],
            1e-15
        ));
        assert!(matches!(
            ball.closest_point(&[0.0, 0.0, 0.0]),
            Err(Error::ProjectionNotUnique { .. })
        ));
    }

    #[test]
    fn strip_restricted_projection() {
        let disk = Domain::unit_disk();
        assert!(matches!(
            disk.closest_point_in_strip(&[2.0, 0.0, 0.0]),
            Err(Error::OutsideStrip { .. })
        ));
        assert!(matches!(
            disk.closest_point_in_strip(&[0.5, 0.0, 0.0]),
            Err(Error::OutsideStrip { .. })
        ));
        assert!(close(
            &disk.closest_point_in_strip(&[1.2, 0.0, 0.0]).unwrap(),
            &[1.0, 0.0, 0.0],
            1e-15
        ));
    }

    #[test]
    fn normal_examples() {
        let disk = Domain::unit_disk();
        assert!(close(
            &disk.outward_normal(&[0.0, 1.0, 0.0]).unwrap(),
            &[0.0, 1.0, 0.0],
            0.0
        ));
        assert!(close(
            &disk.outward_normal(&[-1.0, 0.0, 0.0]).unwrap(),
            &[-1.0, 0.0, 0.0],
            0.0
        ));
        let ball = Domain::unit_ball();
        assert!(close(
            &ball.outward_normal(&[1.0, 0.0, 0.0]).unwrap(),
            &[1.0, 0.0, 0.0],
            0.0
        ));
        assert!(matches!(
            disk.outward_normal(&[0.5, 0.0, 0.0]),
            Err(Error::OffBoundary { .. })
        ));
    }

    #[test]
    fn tangential_gradient_examples() {
        assert_eq!(
            tangential_gradient(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]),
            [1.0, 0.0, 0.0]
        );
        assert_eq!(
            tangential_gradient(&[0.0, 2.0, 0.0], &[0.0, 1.0, 0.0]),
            [0.0, 0.0, 0.0]
        );
        assert_eq!(
            tangential_gradient(&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]),
            [0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn eikonal_on_grid() {
        let h = 1e-6;
        for domain in [Domain::unit_disk(), Domain::unit_ball()] {
            let n = domain.dimension();
            for i in 0..12 {
                for j in 0..12 {
                    let t = 0.4 + 0.1 * i as f64;
                    let phi = 0.5 * j as f64;
                    let x = if n == 2 {
                        [t * phi.cos(), t * phi.sin(), 0.0]
                    } else {
                        [t * phi.cos() * 0.6, t * phi.sin() * 0.6, t * 0.8]
                    };
                    if !domain.in_strip(&x) {
                        continue;
                    }
                    let mut grad2 = 0.0;
                    for c in 0..n {
                        let mut xp = x;
                        let mut xm = x;
                        xp[c] += h;
                        xm[c] -= h;
                        let g =
                            (domain.signed_distance(&xp) - domain.signed_distance(&xm)) / (2.0 * h);
                        grad2 += g * g;
                    }
                    assert!((grad2.sqrt() - 1.0).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn closest_point_jacobian_matches_finite_differences() {
        let ball = Domain::unit_ball();
        let x = [0.7, -0.4, 0.5];
        let jac = ball.closest_point_jacobian(&x);
        let h = 1e-6;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let pp = ball.closest_point(&xp).unwrap();
            let pm = ball.closest_point(&xm).unwrap();
            for i in 0..3 {
                assert!((jac[i][j] - (pp[i] - pm[i]) / (2.0 * h)).abs() < 1e-8);
            }
        }
    }

    fn strip_point(n: usize) -> impl Strategy<Value = Vec3> {
        (0.55f64..1.45, 0.0f64..std::f64::consts::TAU, -1.0f64..1.0).prop_map(move |(r, phi, c)| {
            if n == 2 {
                [r * phi.cos(), r * phi.sin(), 0.0]
            } else {
                let s = (1.0 - c * c).sqrt();
                [r * s * phi.cos(), r * s * phi.sin(), r * c]
            }
        })
    }

    proptest! {
        #[test]
        fn projection_identities_disk(x in strip_point(2)) {
            let disk = Domain::unit_disk();
            let p = disk.closest_point_in_strip(&x).unwrap();
            prop_assert!(disk.signed_distance(&p).abs() <= 1e-12);
            let nu = disk.outward_normal(&p).unwrap();
            prop_assert!((linalg::norm(&nu) - 1.0).abs() <= 1e-14);
            let recon = linalg::add(&p, &linalg::scale(disk.signed_distance(&x), &nu));
            prop_assert!(close(&recon, &x, 1e-12));
            prop_assert!(close(&disk.closest_point(&p).unwrap(), &p, 1e-12));
        }

        #[test]
        fn projection_identities_ball(x in strip_point(3)) {
            let ball = Domain::unit_ball();
            let p = ball.closest_point_in_strip(&x).unwrap();
            prop_assert!(ball.signed_distance(&p).abs() <= 1e-12);
            let nu = ball.outward_normal(&p).unwrap();
            prop_assert!((linalg::norm(&nu) - 1.0).abs() <= 1e-14);
            let recon = linalg::add(&p, &linalg::scale(ball.signed_distance(&x), &nu));
            prop_assert!(close(&recon, &x, 1e-12));
            prop_assert!(close(&ball.closest_point(&p).unwrap(), &p, 1e-12));
        }

        #[test]
        fn tangential_gradient_is_orthogonal(
            g in prop::array::uniform3(-10.0f64..10.0),
            phi in 0.0f64..std::f64::consts::TAU,
            c in -1.0f64..1.0,
        ) {
            let s = (1.0 - c * c).sqrt();
            let nu = [s * phi.cos(), s * phi.sin(), c];
            let t = tangential_gradient(&g, &nu);
            prop_assert!(linalg::dot(&t, &nu).abs() <= 1e-13);
        }
    }
}
