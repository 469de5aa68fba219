//! Cotangent stiffness and weighted boundary mass.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::mesh::{heron_area, strict_triangle, Mesh};

/// Symmetric sparse matrix, upper triangle (with diagonal) in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Sum duplicate `(row, col, value)` triplets; either triangle may be given.
    /// Duplicates are added in input order, so the result is deterministic.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<SparseSym> {
        for t in triplets.iter_mut() {
            if t.0 >= n || t.1 >= n {
                return Err(invalid(format!("triplet ({}, {}) outside dimension {n}", t.0, t.1)));
            }
            if t.0 > t.1 {
                std::mem::swap(&mut t.0, &mut t.1);
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseSym { n, row_ptr, cols, vals })
    }

    pub fn identity(n: usize) -> SparseSym {
        SparseSym {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz_upper(&self) -> usize {
        self.vals.len()
    }

    /// Upper-triangle entries of row `r` as `(col, value)`, cols ascending.
    pub fn row_upper(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    /// All stored `(row, col, value)` with `row <= col`, sorted.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| self.row_upper(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (r, c, v) in self.entries() {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.entries()
            .map(|(r, c, v)| if r == c { v * x[r] * x[r] } else { 2.0 * v * x[r] * x[c] })
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| if r == c { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Principal submatrix on `idx` (new index `i` is old index `idx[i]`).
    pub fn principal(&self, idx: &[usize]) -> SparseSym {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in idx.iter().enumerate() {
            pos[v] = i;
        }
        let trip = self
            .entries()
            .filter(|&(r, c, _)| pos[r] != usize::MAX && pos[c] != usize::MAX)
            .map(|(r, c, v)| (pos[r], pos[c], v))
            .collect();
        SparseSym::from_triplets(idx.len(), trip).unwrap()
    }

    /// Sorted `row col value` triplets of the upper triangle, one per line.
    pub fn to_triplet_text(&self) -> String {
        let mut out = String::new();
        for (r, c, v) in self.entries() {
            writeln!(out, "{r} {c} {v:e}").unwrap();
        }
        out
    }
}

/// Boundary trace of the conformal factor `e^ω`, one value per vertex.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConformalWeight {
    values: Option<Vec<f64>>,
}

impl ConformalWeight {
    /// `e^ω ≡ 1`.
    pub fn ones() -> Self {
        ConformalWeight { values: None }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some((v, w)) = values.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(invalid(format!("conformal weight at vertex {v} must be positive, got {w}")));
        }
        Ok(ConformalWeight { values: Some(values) })
    }

    pub fn constant(n_vertices: usize, c: f64) -> Result<Self> {
        Self::from_values(vec![c; n_vertices])
    }

    pub fn at(&self, v: usize) -> f64 {
        self.values.as_ref().map_or(1.0, |w| w[v])
    }

    fn check(&self, mesh: &Mesh) -> Result<()> {
        match &self.values {
            Some(w) if w.len() != mesh.n_vertices() => Err(invalid(format!(
                "conformal weight has {} values for {} vertices",
                w.len(),
                mesh.n_vertices()
            ))),
            _ => Ok(()),
        }
    }
}

/// Cotangent weights of triangle `t`: `cot(angle at vertex k) / 2`, or an
/// invalid-mesh error for degenerate triangles.
pub(crate) fn half_cotangents(mesh: &Mesh, t: usize) -> Result<[f64; 3]> {
    let l = mesh.triangle_lengths(t);
    let area = if strict_triangle(l) { heron_area(l) } else { None };
    let area = area.ok_or_else(|| {
        Error::InvalidMesh(format!("triangle {t} violates the triangle inequality: {l:?}"))
    })?;
    let sq = [l[0] * l[0], l[1] * l[1], l[2] * l[2]];
    Ok([
        (sq[1] + sq[2] - sq[0]) / (8.0 * area),
        (sq[0] + sq[2] - sq[1]) / (8.0 * area),
        (sq[0] + sq[1] - sq[2]) / (8.0 * area),
    ])
}

/// Dirichlet-energy stiffness from edge lengths only. Obtuse angles give
/// negative weights, which are kept.
pub fn assemble_stiffness(mesh: &Mesh) -> Result<SparseSym> {
    stiffness_over(mesh, |_| true)
}

/// Stiffness of the triangles tagged `region`, in global vertex numbering.
pub fn assemble_stiffness_region(mesh: &Mesh, region: &str) -> Result<SparseSym> {
    if !mesh.has_region(region) {
        return Err(invalid(format!("mesh has no region '{region}'")));
    }
    stiffness_over(mesh, |t| mesh.region_of(t) == region)
}

fn stiffness_over(mesh: &Mesh, keep: impl Fn(usize) -> bool) -> Result<SparseSym> {
    let mut trip = Vec::with_capacity(mesh.triangles().len() * 9);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if !keep(t) {
            continue;
        }
        let w = half_cotangents(mesh, t)?;
        for k in 0..3 {
            // weight of vertex k's angle sits on the opposite edge
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            trip.push((i, i, w[k]));
            trip.push((j, j, w[k]));
            trip.push((i, j, -w[k]));
        }
    }
    SparseSym::from_triplets(mesh.n_vertices(), trip)
}

fn check_labels(mesh: &Mesh, labels: &[&str]) -> Result<()> {
    for l in labels {
        if !mesh.has_label(l) {
            return Err(invalid(format!("unknown boundary label '{l}'")));
        }
    }
    Ok(())
}

/// Consistent P1 mass of the boundary edges carrying any of `labels`,
/// scaled per edge by the trapezoidal mean of the weight.
pub fn assemble_boundary_mass(mesh: &Mesh, labels: &[&str], w: &ConformalWeight) -> Result<SparseSym> {
    boundary_mass(mesh, labels, w, false)
}

/// Row-sum lumped variant of [`assemble_boundary_mass`].
pub fn assemble_boundary_mass_lumped(
    mesh: &Mesh,
    labels: &[&str],
    w: &ConformalWeight,
) -> Result<SparseSym> {
    boundary_mass(mesh, labels, w, true)
}

pub(crate) fn boundary_mass(
    mesh: &Mesh,
    labels: &[&str],
    w: &ConformalWeight,
    lumped: bool,
) -> Result<SparseSym> {
    check_labels(mesh, labels)?;
    w.check(mesh)?;
    let mut trip = Vec::new();
    for (e, label) in mesh.boundary_labels() {
        if !labels.contains(&label.as_str()) {
            continue;
        }
        let (a, b) = (e.a(), e.b());
        let len = mesh.edge_lengths()[e];
        let m = len * 0.5 * (w.at(a) + w.at(b));
        if lumped {
            trip.push((a, a, m / 2.0));
            trip.push((b, b, m / 2.0));
        } else {
            trip.push((a, a, m / 3.0));
            trip.push((b, b, m / 3.0));
            trip.push((a, b, m / 6.0));
        }
    }
    SparseSym::from_triplets(mesh.n_vertices(), trip)
}

/// Weighted length of the boundary edges carrying any of `labels`.
pub fn boundary_length(mesh: &Mesh, labels: &[&str], w: &ConformalWeight) -> Result<f64> {
    check_labels(mesh, labels)?;
    w.check(mesh)?;
    Ok(mesh
        .boundary_labels()
        .iter()
        .filter(|(_, l)| labels.contains(&l.as_str()))
        .map(|(e, _)| mesh.edge_lengths()[e] * 0.5 * (w.at(e.a()) + w.at(e.b())))
        .sum())
}
