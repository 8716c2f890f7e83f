//! Compressed sparse row storage for the assembled matrices.

use std::io::Write;

use rayon::prelude::*;

use crate::{Error, Result};

/// Square CSR matrix with sorted column indices in every row. Symmetric
/// matrices keep both triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSpdMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
}

/// Rows below this size are multiplied serially.
const PARALLEL_ROWS: usize = 4096;

impl SparseSpdMatrix {
    /// Builds a zero-valued matrix from per-row column lists (sorted and
    /// deduplicated here).
    pub fn from_pattern(mut rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        let mut columns = Vec::new();
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            assert!(row.last().is_none_or(|&c| c < n), "column out of range");
            columns.extend_from_slice(row);
            row_offsets.push(columns.len());
        }
        let values = vec![0.0; columns.len()];
        SparseSpdMatrix {
            n,
            row_offsets,
            columns,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseSpdMatrix {
            n,
            row_offsets: (0..=n).collect(),
            columns: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Dense row-major input; exact zeros off the diagonal are dropped.
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n * n);
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| i == j || dense[i * n + j] != 0.0)
                    .collect()
            })
            .collect();
        let mut m = Self::from_pattern(rows);
        for i in 0..n {
            for p in m.row_offsets[i]..m.row_offsets[i + 1] {
                m.values[p] = dense[i * n + m.columns[p]];
            }
        }
        m
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.columns.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[usize] {
        &self.columns
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.columns[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_offsets[i];
        let cols = &self.columns[start..self.row_offsets[i + 1]];
        cols.binary_search(&j).ok().map(|p| start + p)
    }

    /// Entry `(i, j)`, zero outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Adds `v` to entry `(i, j)`, which must be in the pattern.
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside the sparsity pattern"));
        self.values[p] += v;
    }

    /// Adds the dense local matrix `local` (row-major, `dofs.len()` square)
    /// at the global indices `dofs`.
    pub fn scatter(&mut self, dofs: &[usize], local: &[f64]) {
        let m = dofs.len();
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                self.add_to(i, j, local[a * m + b]);
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |K_ij - K_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `y = K x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let row = |i: usize| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>()
        };
        if self.n >= PARALLEL_ROWS {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = row(i));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ K x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `Σ_t c_t P_tᵀ K_t P_t` where `P_t` embeds the smaller matrices into the
    /// leading block of an `n × n` matrix. The pattern is the union of all
    /// term patterns, including terms with zero coefficient.
    pub fn combine(n: usize, terms: &[(f64, &SparseSpdMatrix)]) -> Self {
        for (_, m) in terms {
            assert!(m.n <= n, "term of dimension {} exceeds {n}", m.n);
        }
        let rows = (0..n)
            .map(|i| {
                terms
                    .iter()
                    .filter(|(_, m)| i < m.n)
                    .flat_map(|(_, m)| m.row(i).0.iter().copied())
                    .collect()
            })
            .collect();
        let mut out = Self::from_pattern(rows);
        for (c, m) in terms {
            for i in 0..m.n {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    out.add_to(i, j, c * v);
                }
            }
        }
        out
    }

    /// Dense row-major copy (small matrices only).
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * self.n + j] = v;
            }
        }
        d
    }

    /// Writes the matrix in Matrix Market coordinate format, all stored
    /// entries listed (`real general`).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz())?;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }

    /// Reads a matrix written by [`write_matrix_market`](Self::write_matrix_market).
    pub fn read_matrix_market(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('%') && !l.trim().is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing size line"))?;
        let sizes: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln + 1, "bad size line")))
            .collect::<Result<_>>()?;
        if sizes.len() != 3 || sizes[0] != sizes[1] {
            return Err(parse_err(ln + 1, "expected a square size line"));
        }
        let n = sizes[0];
        let mut entries = Vec::with_capacity(sizes[2]);
        for (ln, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(parse_err(ln + 1, "expected `row col value`"));
            }
            let i: usize = t[0]
                .parse()
                .map_err(|_| parse_err(ln + 1, "bad row index"))?;
            let j: usize = t[1]
                .parse()
                .map_err(|_| parse_err(ln + 1, "bad column index"))?;
            let v: f64 = t[2].parse().map_err(|_| parse_err(ln + 1, "bad value"))?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(parse_err(ln + 1, "index out of range"));
            }
            entries.push((i - 1, j - 1, v));
        }
        if entries.len() != sizes[2] {
            return Err(parse_err(ln + 1, "entry count does not match header"));
        }
        let mut rows = vec![Vec::new(); n];
        for &(i, j, _) in &entries {
            rows[i].push(j);
        }
        let mut m = Self::from_pattern(rows);
        for (i, j, v) in entries {
            m.add_to(i, j, v);
        }
        Ok(m)
    }
}
