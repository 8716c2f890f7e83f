//! Lagrange elements of degree `k` on the unit simplex.
//!
//! Reference vertex 0 sits at the origin and vertex `i ≥ 1` at the unit
//! vector `e_i`, so the barycentric coordinates of `x̂` are
//! `λ_0 = 1 - Σ x̂_m` and `λ_i = x̂_{i-1}`. Nodes are the equispaced lattice
//! points `λ = a / k` with `a` a multi-index of total degree `k`.

use crate::linalg::Vec3;

pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Debug)]
pub struct ReferenceElement {
    dim: usize,
    degree: usize,
    /// Barycentric multi-indices `(a_0, .., a_n)`, vertices first.
    multi_indices: Vec<[usize; 4]>,
    nodes: Vec<Vec3>,
    face_nodes: Vec<Vec<usize>>,
}

/// Basis values and reference gradients at a set of points, stored point-major.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_points: usize,
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec3>,
}

impl Tabulation {
    #[inline]
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    #[inline]
    pub fn gradients_at(&self, q: usize) -> &[Vec3] {
        &self.gradients[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

/// `ℓ_m(t) = Π_{j<m} (t - j)/(j + 1)` and its derivative.
#[inline]
fn lattice_factor(m: usize, t: f64) -> (f64, f64) {
    let mut value = 1.0;
    let mut deriv = 0.0;
    for j in 0..m {
        let f = (t - j as f64) / (j + 1) as f64;
        deriv = deriv * f + value / (j + 1) as f64;
        value *= f;
    }
    (value, deriv)
}

impl ReferenceElement {
    pub fn new(dim: usize, degree: usize) -> Self {
        assert!(dim == 2 || dim == 3, "unsupported dimension {dim}");
        assert!(
            (1..=MAX_DEGREE).contains(&degree),
            "unsupported degree {degree}"
        );
        let k = degree;
        let mut interior = Vec::new();
        let mut vertex_nodes = vec![[0usize; 4]; dim + 1];
        for (i, a) in vertex_nodes.iter_mut().enumerate() {
            a[i] = k;
        }
        let mut push = |a: [usize; 4]| {
            if a.iter().take(dim + 1).all(|&ai| ai != k) {
                interior.push(a);
            }
        };
        if dim == 2 {
            for a1 in (0..=k).rev() {
                for a2 in (0..=k - a1).rev() {
                    push([k - a1 - a2, a1, a2, 0]);
                }
            }
        } else {
            for a1 in (0..=k).rev() {
                for a2 in (0..=k - a1).rev() {
                    for a3 in (0..=k - a1 - a2).rev() {
                        push([k - a1 - a2 - a3, a1, a2, a3]);
                    }
                }
            }
        }
        let mut multi_indices = vertex_nodes;
        multi_indices.extend(interior);

        let nodes = multi_indices
            .iter()
            .map(|a| {
                let mut x = [0.0; 3];
                for m in 0..dim {
                    x[m] = a[m + 1] as f64 / k as f64;
                }
                x
            })
            .collect();
        let face_nodes = (0..=dim)
            .map(|f| {
                multi_indices
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a[f] == 0)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        ReferenceElement {
            dim,
            degree,
            multi_indices,
            nodes,
            face_nodes,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of local basis functions, `binomial(n + k, k)`.
    pub fn n_basis(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn multi_indices(&self) -> &[[usize; 4]] {
        &self.multi_indices
    }

    /// Local node indices on face `f` (opposite reference vertex `f`).
    pub fn face_nodes(&self, f: usize) -> &[usize] {
        &self.face_nodes[f]
    }

    pub fn barycentric(&self, x: &Vec3) -> [f64; 4] {
        let mut lambda = [0.0; 4];
        lambda[0] = 1.0 - x[..self.dim].iter().sum::<f64>();
        lambda[1..=self.dim].copy_from_slice(&x[..self.dim]);
        lambda
    }

    pub fn eval_basis(&self, x: &Vec3, values: &mut [f64]) {
        let lambda = self.barycentric(x);
        let k = self.degree as f64;
        for (j, a) in self.multi_indices.iter().enumerate() {
            values[j] = (0..=self.dim)
                .map(|i| lattice_factor(a[i], k * lambda[i]).0)
                .product();
        }
    }

    pub fn eval_gradients(&self, x: &Vec3, grads: &mut [Vec3]) {
        let lambda = self.barycentric(x);
        let k = self.degree as f64;
        let n = self.dim;
        for (j, a) in self.multi_indices.iter().enumerate() {
            let mut f = [(1.0, 0.0); 4];
            for i in 0..=n {
                f[i] = lattice_factor(a[i], k * lambda[i]);
            }
            // ∂φ/∂λ_i
            let mut dl = [0.0; 4];
            for i in 0..=n {
                let mut p = k * f[i].1;
                for (m, fm) in f.iter().enumerate().take(n + 1) {
                    if m != i {
                        p *= fm.0;
                    }
                }
                dl[i] = p;
            }
            let mut g = [0.0; 3];
            for m in 0..n {
                g[m] = dl[m + 1] - dl[0];
            }
            grads[j] = g;
        }
    }

    pub fn tabulate(&self, points: &[Vec3]) -> Tabulation {
        let nb = self.n_basis();
        let mut values = vec![0.0; points.len() * nb];
        let mut gradients = vec![[0.0; 3]; points.len() * nb];
        for (q, x) in points.iter().enumerate() {
            self.eval_basis(x, &mut values[q * nb..(q + 1) * nb]);
            self.eval_gradients(x, &mut gradients[q * nb..(q + 1) * nb]);
        }
        Tabulation {
            n_points: points.len(),
            n_basis: nb,
            values,
            gradients,
        }
    }

    /// Reference vertices of face `f`, in increasing local order.
    pub fn face_vertices(&self, f: usize) -> Vec<Vec3> {
        (0..=self.dim)
            .filter(|&i| i != f)
            .map(|i| {
                let mut v = [0.0; 3];
                if i > 0 {
                    v[i - 1] = 1.0;
                }
                v
            })
            .collect()
    }

    /// Maps a point of the reference `(n-1)`-simplex onto face `f` of the
    /// reference `n`-simplex. Returns the point and the `n×(n-1)` edge
    /// matrix `E` (columns `v̂_m - v̂_0`).
    pub fn face_point(&self, f: usize, s: &Vec3) -> (Vec3, [Vec3; 2]) {
        let verts = self.face_vertices(f);
        let mut x = verts[0];
        let mut edges = [[0.0; 3]; 2];
        for m in 0..self.dim - 1 {
            let e = crate::linalg::sub(&verts[m + 1], &verts[0]);
            crate::linalg::axpy(s[m], &e, &mut x);
            edges[m] = e;
        }
        (x, edges)
    }
}
