//! Small fixed-size vector and matrix helpers.
//!
//! Points and matrices are stored with room for three dimensions; in two
//! dimensions the trailing components are zero and only the leading `n×n`
//! block of a matrix is meaningful.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const ZERO: Vec3 = [0.0; 3];

pub fn identity(n: usize) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate().take(n) {
        row[i] = 1.0;
    }
    m
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(s: f64, a: &Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn axpy(s: f64, x: &Vec3, y: &mut Vec3) {
    y[0] += s * x[0];
    y[1] += s * x[1];
    y[2] += s * x[2];
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// `mᵀ v`
#[inline]
pub fn mat_t_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for (i, row) in m.iter().enumerate() {
        axpy(v[i], row, &mut out);
    }
    out
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mat_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += b[i][j];
        }
    }
    c
}

/// Determinant of the leading `n×n` block.
pub fn det(m: &Mat3, n: usize) -> f64 {
    match n {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Inverse of the leading `n×n` block, or `None` when singular.
pub fn inverse(m: &Mat3, n: usize) -> Option<Mat3> {
    let d = det(m, n);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    match n {
        1 => inv[0][0] = 1.0 / d,
        2 => {
            inv[0][0] = m[1][1] / d;
            inv[0][1] = -m[0][1] / d;
            inv[1][0] = -m[1][0] / d;
            inv[1][1] = m[0][0] / d;
        }
        3 => {
            inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
            inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
            inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
            inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
            inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
            inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
            inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
            inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
            inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
        }
        _ => return None,
    }
    Some(inv)
}

/// Largest eigenvalue of a symmetric positive semidefinite `n×n` block
/// (cyclic Jacobi sweeps).
pub fn symmetric_max_eigenvalue(m: &Mat3, n: usize) -> f64 {
    let mut a = *m;
    for _ in 0..50 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Spectral norm of the leading `n×n` block.
pub fn spectral_norm(m: &Mat3, n: usize) -> f64 {
    let mtm = mat_mul(&transpose(m), m);
    symmetric_max_eigenvalue(&mtm, n).max(0.0).sqrt()
}
