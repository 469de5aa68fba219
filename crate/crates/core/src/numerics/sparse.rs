//! Sparse Cholesky with minimum-degree ordering.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::assembly::SparseSym;
use crate::error::{invalid, Error, Result};

/// Relative pivot threshold: pivot `d_j <= PIVOT_TOL * |A_jj|` is rejected.
pub const PIVOT_TOL: f64 = 1e-12;

/// `P A Pᵀ = L Lᵀ`, with `L` stored by columns.
#[derive(Clone, Debug)]
pub struct Factor {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    /// Row indices (new numbering) of the strictly-lower part of each column.
    rows: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    matrix: SparseSym,
}

/// Fill-reducing order by exact minimum degree on the elimination graph.
/// Returns `(perm, patterns)` where `patterns[k]` lists the old indices that
/// are adjacent to pivot `k` when it is eliminated.
fn minimum_degree(adj: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = adj.len();
    let mut graph: Vec<Vec<usize>> = adj.to_vec();
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|v| Reverse((graph[v].len(), v))).collect();
    let mut perm = Vec::with_capacity(n);
    let mut patterns = Vec::with_capacity(n);
    while let Some(Reverse((deg, v))) = heap.pop() {
        if done[v] || deg != graph[v].len() {
            continue;
        }
        done[v] = true;
        let clique = std::mem::take(&mut graph[v]);
        for &u in &clique {
            let merged = merge_excluding(&graph[u], &clique, u, v);
            graph[u] = merged;
            heap.push(Reverse((graph[u].len(), u)));
        }
        perm.push(v);
        patterns.push(clique);
    }
    (perm, patterns)
}

/// Sorted union of `a` and `b` without `skip_a` and `skip_b`.
fn merge_excluding(a: &[usize], b: &[usize], skip_a: usize, skip_b: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if x != skip_a && x != skip_b {
            out.push(x);
        }
    }
    out
}

/// Full symmetric adjacency (off-diagonal) with values, rows sorted.
fn full_rows(a: &SparseSym) -> Vec<Vec<(usize, f64)>> {
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); a.dim()];
    for (r, c, v) in a.entries() {
        rows[r].push((c, v));
        if r != c {
            rows[c].push((r, v));
        }
    }
    for r in rows.iter_mut() {
        r.sort_by_key(|e| e.0);
    }
    rows
}

/// Factor a symmetric positive definite matrix.
pub fn factor_spd(a: &SparseSym) -> Result<Factor> {
    let n = a.dim();
    let full = full_rows(a);
    let adj: Vec<Vec<usize>> = full
        .iter()
        .enumerate()
        .map(|(r, row)| row.iter().map(|e| e.0).filter(|&c| c != r).collect())
        .collect();
    let (perm, patterns) = minimum_degree(&adj);
    let mut iperm = vec![0; n];
    for (k, &v) in perm.iter().enumerate() {
        iperm[v] = k;
    }
    let mut col_ptr = vec![0; n + 1];
    let mut rows = Vec::new();
    for (k, pat) in patterns.iter().enumerate() {
        let mut p: Vec<usize> = pat.iter().map(|&v| iperm[v]).collect();
        p.sort_unstable();
        debug_assert!(p.iter().all(|&r| r > k));
        rows.extend(p);
        col_ptr[k + 1] = rows.len();
    }
    // row lists: for row j, the columns k < j with L_jk structurally nonzero
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in 0..n {
        for &r in &rows[col_ptr[k]..col_ptr[k + 1]] {
            row_cols[r].push(k);
        }
    }

    let mut vals = vec![0.0; rows.len()];
    let mut diag = vec![0.0; n];
    let mut next: Vec<usize> = col_ptr[..n].to_vec();
    let mut x = vec![0.0; n];
    for j in 0..n {
        let old = perm[j];
        let mut ajj = 0.0;
        for &(c, v) in &full[old] {
            let i = iperm[c];
            if i >= j {
                x[i] += v;
            }
            if c == old {
                ajj = v;
            }
        }
        for &k in &row_cols[j] {
            let p = next[k];
            debug_assert_eq!(rows[p], j);
            let ljk = vals[p];
            for q in p..col_ptr[k + 1] {
                x[rows[q]] -= vals[q] * ljk;
            }
            next[k] += 1;
        }
        let d = x[j];
        x[j] = 0.0;
        if !(d > PIVOT_TOL * ajj.abs()) || !d.is_finite() {
            return Err(Error::NotSpd { step: j, pivot: d });
        }
        let ljj = d.sqrt();
        diag[j] = ljj;
        for q in col_ptr[j]..col_ptr[j + 1] {
            let r = rows[q];
            vals[q] = x[r] / ljj;
            x[r] = 0.0;
        }
    }
    Ok(Factor { n, perm, col_ptr, rows, vals, diag, matrix: a.clone() })
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `L`, diagonal included.
    pub fn nnz(&self) -> usize {
        self.vals.len() + self.n
    }

    fn solve_once(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.perm.iter().map(|&v| b[v]).collect();
        for k in 0..self.n {
            y[k] /= self.diag[k];
            let yk = y[k];
            for q in self.col_ptr[k]..self.col_ptr[k + 1] {
                y[self.rows[q]] -= self.vals[q] * yk;
            }
        }
        for k in (0..self.n).rev() {
            let mut s = y[k];
            for q in self.col_ptr[k]..self.col_ptr[k + 1] {
                s -= self.vals[q] * y[self.rows[q]];
            }
            y[k] = s / self.diag[k];
        }
        let mut x = vec![0.0; self.n];
        for (k, &v) in self.perm.iter().enumerate() {
            x[v] = y[k];
        }
        x
    }
}

/// Solve `A x = b` with one step of iterative refinement.
pub fn solve(f: &Factor, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != f.n {
        return Err(invalid(format!("rhs has length {}, matrix has order {}", b.len(), f.n)));
    }
    let mut x = f.solve_once(b);
    let ax = f.matrix.mul_vec(&x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let dx = f.solve_once(&r);
    for (xi, di) in x.iter_mut().zip(dx) {
        *xi += di;
    }
    Ok(x)
}
