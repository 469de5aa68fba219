use super::build::{make_rectangle_mesh, RECT_I_BOTTOM, RECT_I_TOP};
use super::{Edge, Mesh, MeshParts};
use crate::error::{invalid, Error, Result};

/// Region tag carried by triangles that came from the attached rectangle.
pub const RECT_REGION: &str = "rect";
/// Vertex set holding the identified seam vertices (both arcs).
pub const SEAM_SET: &str = "I_eps";

/// Relative tolerance for arc positions and seam edge lengths.
const ALIGN_TOL: f64 = 1e-9;

/// A sub-arc `[s0, s1]` of a boundary chain, in arclength along the chain.
///
/// With `reversed` the arc is traversed against the chain direction when
/// identified with the rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryArc {
    pub chain: usize,
    pub s0: f64,
    pub s1: f64,
    pub reversed: bool,
}

impl BoundaryArc {
    pub fn length(&self) -> f64 {
        self.s1 - self.s0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlueSpec {
    pub epsilon: f64,
    pub h: f64,
    pub arc1: BoundaryArc,
    pub arc2: BoundaryArc,
    pub reverse_orientation: bool,
    pub nx: usize,
    pub ny: usize,
}

/// Chain vertices with cumulative arclength, closed by repeating the start.
fn chain_positions(mesh: &Mesh, chain: usize) -> Result<Vec<(usize, f64)>> {
    let c = mesh
        .chains()
        .get(chain)
        .ok_or_else(|| invalid(format!("chain {chain} does not exist ({} chains)", mesh.chains().len())))?;
    let mut out = Vec::with_capacity(c.len() + 1);
    let mut s = 0.0;
    for i in 0..c.len() {
        let (a, b) = c.edge(i);
        out.push((a, s));
        s += mesh.edge_length(a, b).unwrap();
    }
    out.push((c.vertices[0], s));
    Ok(out)
}

fn check_arc(arc: &BoundaryArc, total: f64) -> Result<()> {
    if !(arc.s0 >= 0.0 && arc.s0 < arc.s1 && arc.s1 <= total * (1.0 + 1e-12)) {
        return Err(invalid(format!(
            "arc [{}, {}] must satisfy 0 <= s0 < s1 <= {total}",
            arc.s0, arc.s1
        )));
    }
    Ok(())
}

/// Subdivide boundary edges so `arc` consists of exactly `nx` edges of equal
/// length, then relabel those edges with `label`.
///
/// Only splits are performed. A target point within `1e-9` (relative to the
/// arc length) of an existing vertex snaps to it; any other pre-existing
/// vertex strictly inside the arc is a glue mismatch, because moving it
/// would alter the boundary length.
pub fn align_arc(mesh: &Mesh, arc: &BoundaryArc, nx: usize, label: &str) -> Result<Mesh> {
    if nx < 1 {
        return Err(invalid("arc subdivision count must be >= 1"));
    }
    let pos = chain_positions(mesh, arc.chain)?;
    let total = pos.last().unwrap().1;
    check_arc(arc, total)?;
    let len = arc.length();
    let tol = ALIGN_TOL * len;
    let targets: Vec<f64> = (0..=nx).map(|k| arc.s0 + len * k as f64 / nx as f64).collect();

    // path through the region: vertices with positions, from the edge containing s0
    let first = pos.iter().rposition(|&(_, s)| s <= arc.s0 + tol).unwrap();
    let last = pos.iter().position(|&(_, s)| s >= arc.s1 - tol).unwrap_or(pos.len() - 1);
    let mut path: Vec<(usize, f64)> = pos[first..=last].to_vec();
    for &(v, s) in &path {
        let inside = s > arc.s0 + tol && s < arc.s1 - tol;
        if inside && !targets.iter().any(|t| (t - s).abs() <= tol) {
            return Err(Error::GlueMismatch(format!(
                "boundary vertex {v} at arclength {s} lies inside the arc [{}, {}] off the uniform subdivision",
                arc.s0, arc.s1
            )));
        }
    }

    let mut parts = mesh.to_parts();
    let mut arc_vertices = Vec::with_capacity(nx + 1);
    for &t in &targets {
        if let Some(&(v, _)) = path.iter().find(|&&(_, s)| (s - t).abs() <= tol) {
            arc_vertices.push(v);
            continue;
        }
        let i = path
            .windows(2)
            .position(|w| w[0].1 < t && t < w[1].1)
            .ok_or_else(|| Error::GlueMismatch(format!("arclength {t} not found on chain")))?;
        let (a, sa) = path[i];
        let (b, sb) = path[i + 1];
        let frac = (t - sa) / (sb - sa);
        let p = split_boundary_edge(&mut parts, a, b, frac)?;
        path.insert(i + 1, (p, t));
        arc_vertices.push(p);
    }
    for w in arc_vertices.windows(2) {
        parts.boundary_labels.insert(Edge::new(w[0], w[1]), label.to_string());
    }
    Mesh::from_parts(parts)
}

/// Insert a vertex on boundary edge `(a, b)` at fraction `t` from `a`.
fn split_boundary_edge(parts: &mut MeshParts, a: usize, b: usize, t: f64) -> Result<usize> {
    let e = Edge::new(a, b);
    let l_ab = parts.edge_lengths[&e];
    let ti = parts
        .triangles
        .iter()
        .position(|tri| tri.contains(&a) && tri.contains(&b))
        .ok_or_else(|| invalid(format!("no triangle on edge ({a}, {b})")))?;
    let tri = parts.triangles[ti];
    let k = (0..3)
        .find(|&k| Edge::new(tri[k], tri[(k + 1) % 3]) == e)
        .unwrap();
    let (u, w, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
    let p = parts.n_vertices;
    parts.n_vertices += 1;

    let label = parts.boundary_labels.remove(&e).unwrap_or_default();
    parts.edge_lengths.remove(&e);
    let (l_ap, l_pb, l_pc) = match &mut parts.coords {
        Some(coords) => {
            let (pa, pb) = (coords[a], coords[b]);
            let q = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            coords.push(q);
            (super::dist(pa, q), super::dist(q, pb), super::dist(q, coords[c]))
        }
        None => {
            let l_ac = parts.edge_lengths[&Edge::new(a, c)];
            let l_bc = parts.edge_lengths[&Edge::new(b, c)];
            // Stewart's theorem
            let sq = (1.0 - t) * l_ac * l_ac + t * l_bc * l_bc - t * (1.0 - t) * l_ab * l_ab;
            (t * l_ab, (1.0 - t) * l_ab, sq.max(0.0).sqrt())
        }
    };
    parts.edge_lengths.insert(Edge::new(a, p), l_ap);
    parts.edge_lengths.insert(Edge::new(p, b), l_pb);
    parts.edge_lengths.insert(Edge::new(p, c), l_pc);
    parts.boundary_labels.insert(Edge::new(a, p), label.clone());
    parts.boundary_labels.insert(Edge::new(p, b), label);

    parts.triangles[ti] = [u, p, c];
    parts.triangles.push([p, w, c]);
    if !parts.regions.is_empty() {
        let r = parts.regions[ti].clone();
        parts.regions.push(r);
    }
    Ok(p)
}

/// Attach the flat rectangle `R_{eps,h}` along `spec.arc1` and `spec.arc2`.
///
/// Arcs are read with the interior on the left. Arc 1 vertex `p_i` goes to
/// bottom vertex `(nx - i, 0)` and arc 2 vertex `p_i` to top vertex `(i, ny)`;
/// this yields an orientable attachment. A `reversed` arc is read backwards,
/// and `reverse_orientation` flips arc 2 once more.
pub fn glue(base: &Mesh, spec: &GlueSpec) -> Result<Mesh> {
    let GlueSpec { epsilon, h, arc1, arc2, reverse_orientation, nx, ny } = *spec;
    if !(epsilon > 0.0 && epsilon.is_finite() && h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("epsilon and h must be positive, got ({epsilon}, {h})")));
    }
    if nx < 2 || ny < 2 {
        return Err(invalid(format!("glue resolution must have nx, ny >= 2, got ({nx}, {ny})")));
    }
    if base.has_region(RECT_REGION) {
        return Err(invalid("base mesh already carries a rectangle region"));
    }
    let w = epsilon * epsilon;
    for arc in [&arc1, &arc2] {
        if (arc.length() - w).abs() > ALIGN_TOL * w {
            return Err(Error::GlueMismatch(format!(
                "arc length {} differs from epsilon^2 = {w}",
                arc.length()
            )));
        }
    }
    if arc1.chain == arc2.chain && arc1.s0 <= arc2.s1 && arc2.s0 <= arc1.s1 {
        return Err(invalid("attachment arcs overlap"));
    }

    let seam1 = arc_vertices(base, &arc1, nx, w)?;
    let seam2 = arc_vertices(base, &arc2, nx, w)?;
    if seam1.iter().any(|v| seam2.contains(v)) {
        return Err(invalid("attachment arcs share a vertex"));
    }
    let seam1: Vec<usize> = if arc1.reversed { seam1.into_iter().rev().collect() } else { seam1 };
    let seam2: Vec<usize> = if arc2.reversed ^ reverse_orientation {
        seam2.into_iter().rev().collect()
    } else {
        seam2
    };

    let rect = make_rectangle_mesh(epsilon, h, nx, ny)?;
    let stride = nx + 1;
    let mut map = vec![usize::MAX; rect.n_vertices()];
    let mut next = base.n_vertices();
    for j in 0..=ny {
        for i in 0..=nx {
            let v = j * stride + i;
            map[v] = if j == 0 {
                seam1[nx - i]
            } else if j == ny {
                seam2[i]
            } else {
                next += 1;
                next - 1
            };
        }
    }

    let mut parts = base.to_parts();
    parts.coords = None;
    parts.n_vertices = next;
    if parts.regions.is_empty() {
        parts.regions = vec![super::DEFAULT_REGION.to_string(); parts.triangles.len()];
    }
    for tri in rect.triangles() {
        parts.triangles.push([map[tri[0]], map[tri[1]], map[tri[2]]]);
        parts.regions.push(RECT_REGION.to_string());
    }
    for (e, &l) in rect.edge_lengths() {
        let me = Edge::new(map[e.a()], map[e.b()]);
        // seam edges keep the base length
        parts.edge_lengths.entry(me).or_insert(l);
    }
    for seam in [&seam1, &seam2] {
        for s in seam.windows(2) {
            parts.boundary_labels.remove(&Edge::new(s[0], s[1]));
        }
    }
    for (e, label) in rect.boundary_labels() {
        if label == RECT_I_BOTTOM || label == RECT_I_TOP {
            continue;
        }
        parts.boundary_labels.insert(Edge::new(map[e.a()], map[e.b()]), label.clone());
    }
    let mut seam: Vec<usize> = seam1.iter().chain(seam2.iter()).copied().collect();
    seam.sort_unstable();
    parts.vertex_sets.insert(SEAM_SET.to_string(), seam);
    Mesh::from_parts(parts)
}

/// The `nx + 1` chain vertices of an aligned arc, in chain order.
fn arc_vertices(mesh: &Mesh, arc: &BoundaryArc, nx: usize, w: f64) -> Result<Vec<usize>> {
    let pos = chain_positions(mesh, arc.chain)?;
    let total = pos.last().unwrap().1;
    check_arc(arc, total)?;
    let tol = ALIGN_TOL * total.max(w);
    let start = pos
        .iter()
        .position(|&(_, s)| (s - arc.s0).abs() <= tol)
        .ok_or_else(|| Error::GlueMismatch(format!("no boundary vertex at arclength {}", arc.s0)))?;
    if start + nx >= pos.len() {
        return Err(Error::GlueMismatch("arc runs past the end of its chain".into()));
    }
    let verts: Vec<usize> = pos[start..=start + nx].iter().map(|&(v, _)| v).collect();
    if (pos[start + nx].1 - arc.s1).abs() > tol {
        return Err(Error::GlueMismatch(format!(
            "arc [{}, {}] is not {nx} boundary edges long",
            arc.s0, arc.s1
        )));
    }
    let target = w / nx as f64;
    for p in verts.windows(2) {
        let l = mesh.edge_length(p[0], p[1]).unwrap();
        if (l - target).abs() > ALIGN_TOL * target {
            return Err(Error::GlueMismatch(format!(
                "seam edge ({}, {}) has length {l}, rectangle side needs {target}",
                p[0], p[1]
            )));
        }
    }
    Ok(verts)
}
