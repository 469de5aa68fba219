//! Intrinsic triangle meshes with labeled boundary.
//!
//! Geometry is carried by per-edge lengths; planar coordinates are optional
//! and only kept while they agree with the stored lengths. This is what lets
//! a strip be attached with either orientation without any global embedding.

mod build;
mod glue;
mod io;

pub use build::{
    make_annulus_mesh, make_disk_mesh, make_rectangle_mesh, ArcAnchor, DiskBuilder,
    RECT_FREE_LEFT, RECT_FREE_RIGHT, RECT_I_BOTTOM, RECT_I_TOP,
};
pub use glue::{align_arc, glue, BoundaryArc, GlueSpec, RECT_REGION, SEAM_SET};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Relative tolerance between coordinate distances and stored lengths.
pub const COORD_LENGTH_TOL: f64 = 1e-12;

/// Undirected edge, stored with the smaller vertex first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn a(self) -> usize {
        self.0
    }

    pub fn b(self) -> usize {
        self.1
    }
}

/// A closed boundary curve, listed as a cyclic vertex sequence.
///
/// Edge `i` joins `vertices[i]` and `vertices[(i + 1) % len]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryChain {
    pub vertices: Vec<usize>,
}

impl BoundaryChain {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The `i`-th edge as an ordered pair along the chain.
    pub fn edge(&self, i: usize) -> (usize, usize) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }
}

/// Raw ingredients of a mesh; [`Mesh::from_parts`] validates them.
#[derive(Clone, Debug, Default)]
pub struct MeshParts {
    pub n_vertices: usize,
    pub triangles: Vec<[usize; 3]>,
    pub edge_lengths: BTreeMap<Edge, f64>,
    pub boundary_labels: BTreeMap<Edge, String>,
    pub coords: Option<Vec<[f64; 2]>>,
    /// Region name per triangle; empty means every triangle is in `"base"`.
    pub regions: Vec<String>,
    pub vertex_sets: BTreeMap<String, Vec<usize>>,
}

/// Topological summary computed directly from the triangulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub boundary_components: usize,
    pub connected_components: usize,
    pub orientable: bool,
    /// Orientable genus, or number of cross-caps when non-orientable.
    pub genus: i64,
}

/// Validated, immutable triangulated surface with boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    n_vertices: usize,
    triangles: Vec<[usize; 3]>,
    edge_lengths: BTreeMap<Edge, f64>,
    boundary_labels: BTreeMap<Edge, String>,
    coords: Option<Vec<[f64; 2]>>,
    region_names: Vec<String>,
    triangle_region: Vec<usize>,
    vertex_sets: BTreeMap<String, Vec<usize>>,
    chains: Vec<BoundaryChain>,
}

pub const DEFAULT_REGION: &str = "base";

impl Mesh {
    pub fn from_parts(parts: MeshParts) -> Result<Mesh> {
        let MeshParts {
            n_vertices,
            triangles,
            edge_lengths,
            boundary_labels,
            coords,
            regions,
            vertex_sets,
        } = parts;
        let bad = |msg: String| Error::InvalidMesh(msg);

        if triangles.is_empty() {
            return Err(bad("mesh has no triangles".into()));
        }
        let mut used = vec![false; n_vertices];
        let mut edge_count: BTreeMap<Edge, usize> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n_vertices {
                    return Err(bad(format!("triangle {t} references vertex {v} >= {n_vertices}")));
                }
                used[v] = true;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(bad(format!("triangle {t} repeats a vertex: {tri:?}")));
            }
            for k in 0..3 {
                *edge_count.entry(Edge::new(tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(bad(format!("vertex {v} is not used by any triangle")));
        }
        for (e, &c) in &edge_count {
            if c > 2 {
                return Err(bad(format!("edge ({}, {}) is shared by {c} triangles", e.0, e.1)));
            }
            match edge_lengths.get(e) {
                Some(&l) if l.is_finite() && l > 0.0 => {}
                Some(&l) => return Err(bad(format!("edge ({}, {}) has length {l}", e.0, e.1))),
                None => return Err(bad(format!("edge ({}, {}) has no length", e.0, e.1))),
            }
            let labeled = boundary_labels.contains_key(e);
            if c == 1 && !labeled {
                return Err(bad(format!("boundary edge ({}, {}) has no label", e.0, e.1)));
            }
            if c == 2 && labeled {
                return Err(bad(format!("interior edge ({}, {}) carries a label", e.0, e.1)));
            }
        }
        if let Some(e) = edge_lengths.keys().find(|e| !edge_count.contains_key(e)) {
            return Err(bad(format!("length given for non-edge ({}, {})", e.0, e.1)));
        }
        if let Some(e) = boundary_labels.keys().find(|e| !edge_count.contains_key(e)) {
            return Err(bad(format!("label given for non-edge ({}, {})", e.0, e.1)));
        }
        for (t, tri) in triangles.iter().enumerate() {
            let l = tri_lengths(&edge_lengths, tri);
            if !strict_triangle(l) {
                return Err(bad(format!("triangle {t} {tri:?} violates the triangle inequality: {l:?}")));
            }
        }
        if let Some(c) = &coords {
            if c.len() != n_vertices {
                return Err(bad(format!("{} coordinates for {n_vertices} vertices", c.len())));
            }
            for (e, &l) in &edge_lengths {
                let d = dist(c[e.0], c[e.1]);
                if (d - l).abs() > COORD_LENGTH_TOL * l + 1e-15 {
                    return Err(bad(format!(
                        "edge ({}, {}) length {l} disagrees with coordinates ({d})",
                        e.0, e.1
                    )));
                }
            }
        }

        let (region_names, triangle_region) = if regions.is_empty() {
            (vec![DEFAULT_REGION.to_string()], vec![0; triangles.len()])
        } else {
            if regions.len() != triangles.len() {
                return Err(bad(format!("{} region tags for {} triangles", regions.len(), triangles.len())));
            }
            let names: Vec<String> = regions.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let idx = regions
                .iter()
                .map(|r| names.iter().position(|n| n == r).unwrap())
                .collect();
            (names, idx)
        };
        for (name, set) in &vertex_sets {
            if let Some(&v) = set.iter().find(|&&v| v >= n_vertices) {
                return Err(bad(format!("vertex set {name} references vertex {v}")));
            }
        }

        let chains = trace_chains(n_vertices, &triangles, &edge_count)?;
        Ok(Mesh {
            n_vertices,
            triangles,
            edge_lengths,
            boundary_labels,
            coords,
            region_names,
            triangle_region,
            vertex_sets,
            chains,
        })
    }

    /// Decompose into raw parts (for building modified meshes).
    pub fn to_parts(&self) -> MeshParts {
        MeshParts {
            n_vertices: self.n_vertices,
            triangles: self.triangles.clone(),
            edge_lengths: self.edge_lengths.clone(),
            boundary_labels: self.boundary_labels.clone(),
            coords: self.coords.clone(),
            regions: self
                .triangle_region
                .iter()
                .map(|&r| self.region_names[r].clone())
                .collect(),
            vertex_sets: self.vertex_sets.clone(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge_lengths(&self) -> &BTreeMap<Edge, f64> {
        &self.edge_lengths
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_lengths.get(&Edge::new(a, b)).copied()
    }

    /// Side lengths of triangle `t`, opposite to its vertices in order.
    pub fn triangle_lengths(&self, t: usize) -> [f64; 3] {
        tri_lengths(&self.edge_lengths, &self.triangles[t])
    }

    pub fn boundary_labels(&self) -> &BTreeMap<Edge, String> {
        &self.boundary_labels
    }

    pub fn label_of(&self, a: usize, b: usize) -> Option<&str> {
        self.boundary_labels.get(&Edge::new(a, b)).map(String::as_str)
    }

    /// All distinct boundary labels.
    pub fn labels(&self) -> BTreeSet<String> {
        self.boundary_labels.values().cloned().collect()
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.boundary_labels.values().any(|l| l == label)
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn chains(&self) -> &[BoundaryChain] {
        &self.chains
    }

    pub fn chain_length(&self, chain: usize) -> f64 {
        let c = &self.chains[chain];
        (0..c.len())
            .map(|i| {
                let (a, b) = c.edge(i);
                self.edge_length(a, b).unwrap()
            })
            .sum()
    }

    /// Sum of all boundary edge lengths.
    pub fn boundary_length(&self) -> f64 {
        self.boundary_labels
            .keys()
            .map(|e| self.edge_lengths[e])
            .sum()
    }

    pub fn region_names(&self) -> &[String] {
        &self.region_names
    }

    pub fn region_of(&self, t: usize) -> &str {
        &self.region_names[self.triangle_region[t]]
    }

    pub fn has_region(&self, name: &str) -> bool {
        self.region_names.iter().any(|r| r == name)
    }

    pub fn vertex_set(&self, name: &str) -> Option<&[usize]> {
        self.vertex_sets.get(name).map(Vec::as_slice)
    }

    pub fn vertex_sets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.vertex_sets
    }

    /// Vertices lying on at least one boundary edge, ascending.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .boundary_labels
            .keys()
            .flat_map(|e| [e.0, e.1])
            .collect();
        set.into_iter().collect()
    }

    /// Uniformly scale every length (and coordinate) by `t > 0`.
    pub fn scale(&self, t: f64) -> Result<Mesh> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(crate::error::invalid(format!("scale factor must be positive, got {t}")));
        }
        let mut out = self.clone();
        for l in out.edge_lengths.values_mut() {
            *l *= t;
        }
        if let Some(c) = &mut out.coords {
            for p in c.iter_mut() {
                p[0] *= t;
                p[1] *= t;
            }
        }
        Ok(out)
    }

    /// Largest ratio of longest edge to shortest altitude over all triangles.
    pub fn max_aspect_ratio(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let l = self.triangle_lengths(t);
                let lmax = l.iter().cloned().fold(0.0, f64::max);
                let area = heron_area(l).unwrap_or(0.0);
                lmax * lmax / (2.0 * area)
            })
            .fold(0.0, f64::max)
    }

    pub fn topology(&self) -> MeshTopology {
        let v = self.n_vertices;
        let e = self.edge_lengths.len();
        let f = self.triangles.len();
        let chi = v as i64 - e as i64 + f as i64;
        let (orientable, components) = orientation_check(&self.triangles);
        let k = self.chains.len();
        let genus = if orientable {
            (2 - chi - k as i64) / 2
        } else {
            2 - chi - k as i64
        };
        MeshTopology {
            vertices: v,
            edges: e,
            faces: f,
            euler_characteristic: chi,
            boundary_components: k,
            connected_components: components,
            orientable,
            genus,
        }
    }

    /// SHA-256 of the canonical text serialization.
    pub fn metadata_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        hex::encode(digest.as_slice())
    }
}

pub(crate) fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Side lengths `[a, b, c]`, `a` opposite `tri[0]`, and so on.
pub(crate) fn tri_lengths(lengths: &BTreeMap<Edge, f64>, tri: &[usize; 3]) -> [f64; 3] {
    let get = |p: usize, q: usize| lengths.get(&Edge::new(p, q)).copied().unwrap_or(f64::NAN);
    [get(tri[1], tri[2]), get(tri[2], tri[0]), get(tri[0], tri[1])]
}

pub(crate) fn strict_triangle(l: [f64; 3]) -> bool {
    l.iter().all(|x| x.is_finite() && *x > 0.0)
        && l[0] < l[1] + l[2]
        && l[1] < l[0] + l[2]
        && l[2] < l[0] + l[1]
}

/// Kahan's numerically stable Heron formula; `None` for degenerate input.
pub(crate) fn heron_area(l: [f64; 3]) -> Option<f64> {
    let mut s = l;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let (a, b, c) = (s[0], s[1], s[2]);
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p > 0.0 {
        Some(0.25 * p.sqrt())
    } else {
        None
    }
}

fn trace_chains(
    n: usize,
    triangles: &[[usize; 3]],
    edge_count: &BTreeMap<Edge, usize>,
) -> Result<Vec<BoundaryChain>> {
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &c) in edge_count {
        if c == 1 {
            nbrs[e.0].push(e.1);
            nbrs[e.1].push(e.0);
        }
    }
    for (v, nb) in nbrs.iter().enumerate() {
        if !nb.is_empty() && nb.len() != 2 {
            return Err(Error::InvalidMesh(format!(
                "boundary vertex {v} has {} boundary edges; boundary must be disjoint simple cycles",
                nb.len()
            )));
        }
    }
    // directed boundary edges as they appear in their triangle
    let mut forward: BTreeSet<(usize, usize)> = BTreeSet::new();
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if edge_count.get(&Edge::new(a, b)) == Some(&1) {
                forward.insert((a, b));
            }
        }
    }
    let mut visited = vec![false; n];
    let mut chains = Vec::new();
    for start in 0..n {
        if nbrs[start].is_empty() || visited[start] {
            continue;
        }
        let (w0, w1) = (nbrs[start][0], nbrs[start][1]);
        let first = match (forward.contains(&(start, w0)), forward.contains(&(start, w1))) {
            (true, false) => w0,
            (false, true) => w1,
            _ => w0.min(w1),
        };
        let mut verts = vec![start];
        visited[start] = true;
        let (mut prev, mut cur) = (start, first);
        while cur != start {
            if visited[cur] {
                return Err(Error::InvalidMesh(format!("boundary chain through {cur} is not simple")));
            }
            visited[cur] = true;
            verts.push(cur);
            let next = if nbrs[cur][0] != prev { nbrs[cur][0] } else { nbrs[cur][1] };
            prev = cur;
            cur = next;
        }
        chains.push(BoundaryChain { vertices: verts });
    }
    Ok(chains)
}

/// Returns (orientable, number of connected components).
fn orientation_check(triangles: &[[usize; 3]]) -> (bool, usize) {
    // directed edge -> triangles using it in that direction
    let mut by_edge: BTreeMap<Edge, Vec<(usize, bool)>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            by_edge.entry(Edge::new(a, b)).or_default().push((t, a < b));
        }
    }
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); triangles.len()];
    for uses in by_edge.values() {
        if let [(t0, d0), (t1, d1)] = uses.as_slice() {
            // same traversal direction means the neighbours need opposite flips
            let flip = d0 == d1;
            adj[*t0].push((*t1, flip));
            adj[*t1].push((*t0, flip));
        }
    }
    let mut sign: Vec<Option<bool>> = vec![None; triangles.len()];
    let mut orientable = true;
    let mut components = 0;
    for s in 0..triangles.len() {
        if sign[s].is_some() {
            continue;
        }
        components += 1;
        sign[s] = Some(false);
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            let st = sign[t].unwrap();
            for &(u, flip) in &adj[t] {
                let want = st ^ flip;
                match sign[u] {
                    None => {
                        sign[u] = Some(want);
                        stack.push(u);
                    }
                    Some(x) if x != want => orientable = false,
                    _ => {}
                }
            }
        }
    }
    (orientable, components)
}
