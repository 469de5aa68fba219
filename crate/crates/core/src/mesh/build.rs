use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{dist, BoundaryArc, Edge, Mesh, MeshParts};
use crate::error::{invalid, Result};

pub const RECT_I_BOTTOM: &str = "I_bottom";
pub const RECT_I_TOP: &str = "I_top";
pub const RECT_FREE_LEFT: &str = "free_left";
pub const RECT_FREE_RIGHT: &str = "free_right";

/// Gaussian half-width (radians) of the angular refinement bump.
const CLUSTER_WIDTH: f64 = 0.25;
/// Samples per unit angle when inverting a spacing density.
const DENSITY_SAMPLES: usize = 20_000;

/// Triangulated unit disk with boundary label `"outer"`.
///
/// Every ring shares the same angle list, so boundary grading propagates
/// inward. `cluster_factor` is the ratio between the coarsest and finest
/// boundary spacing, reached at each angle in `cluster_points`.
pub fn make_disk_mesh(
    n_radial: usize,
    n_angular: usize,
    cluster_points: &[f64],
    cluster_factor: f64,
) -> Result<Mesh> {
    if n_radial < 2 {
        return Err(invalid(format!("n_radial must be >= 2, got {n_radial}")));
    }
    if n_angular < 8 {
        return Err(invalid(format!("n_angular must be >= 8, got {n_angular}")));
    }
    if !(cluster_factor >= 1.0 && cluster_factor.is_finite()) {
        return Err(invalid(format!("cluster_factor must be >= 1, got {cluster_factor}")));
    }
    if cluster_points.iter().any(|c| !c.is_finite()) {
        return Err(invalid("cluster points must be finite"));
    }
    let angles = if cluster_points.is_empty() || cluster_factor == 1.0 {
        (0..n_angular).map(|k| 2.0 * PI * k as f64 / n_angular as f64).collect()
    } else {
        let density = |t: f64| {
            let bump = cluster_points
                .iter()
                .map(|&c| {
                    let d = wrap_angle(t - c);
                    (-(d / CLUSTER_WIDTH).powi(2)).exp()
                })
                .fold(0.0, f64::max);
            1.0 + (cluster_factor - 1.0) * bump
        };
        place_by_density(0.0, 2.0 * PI, n_angular, density)
    };
    let radii: Vec<f64> = (1..=n_radial).map(|i| i as f64 / n_radial as f64).collect();
    polar_mesh(&angles, &radii, true, "outer", "")
}

/// Annulus `r_inner < r < 1` with labels `"outer"` and `"inner"`.
pub fn make_annulus_mesh(r_inner: f64, n_radial: usize, n_angular: usize) -> Result<Mesh> {
    if !(r_inner > 0.0 && r_inner < 1.0) {
        return Err(invalid(format!("inner radius must lie in (0, 1), got {r_inner}")));
    }
    if n_radial < 1 || n_angular < 8 {
        return Err(invalid(format!(
            "annulus needs n_radial >= 1 and n_angular >= 8, got ({n_radial}, {n_angular})"
        )));
    }
    let angles: Vec<f64> = (0..n_angular).map(|k| 2.0 * PI * k as f64 / n_angular as f64).collect();
    let radii: Vec<f64> = (0..=n_radial)
        .map(|i| r_inner + (1.0 - r_inner) * i as f64 / n_radial as f64)
        .collect();
    polar_mesh(&angles, &radii, false, "outer", "inner")
}

/// Structured right-split mesh of `[-eps²/2, eps²/2] x [-eps·h/2, eps·h/2]`.
///
/// Vertex `(i, j)` has id `j * (nx + 1) + i`; `j = 0` is the `I_bottom` side.
/// Rows are graded toward both short sides with consecutive ratio at most 1.2.
pub fn make_rectangle_mesh(epsilon: f64, h: f64, nx: usize, ny: usize) -> Result<Mesh> {
    if !(epsilon > 0.0 && epsilon.is_finite() && h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("epsilon and h must be positive, got ({epsilon}, {h})")));
    }
    if nx < 1 || ny < 1 {
        return Err(invalid(format!("rectangle needs nx, ny >= 1, got ({nx}, {ny})")));
    }
    let width = epsilon * epsilon;
    let height = epsilon * h;
    let ys: Vec<f64> = graded_unit(ny).into_iter().map(|s| (s - 0.5) * height).collect();
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
    for &y in &ys {
        for i in 0..=nx {
            let x = if i == nx { 0.5 * width } else { (i as f64 / nx as f64 - 0.5) * width };
            coords.push([x, y]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut labels = BTreeMap::new();
    for i in 0..nx {
        labels.insert(Edge::new(id(i, 0), id(i + 1, 0)), RECT_I_BOTTOM.to_string());
        labels.insert(Edge::new(id(i, ny), id(i + 1, ny)), RECT_I_TOP.to_string());
    }
    for j in 0..ny {
        labels.insert(Edge::new(id(0, j), id(0, j + 1)), RECT_FREE_LEFT.to_string());
        labels.insert(Edge::new(id(nx, j), id(nx, j + 1)), RECT_FREE_RIGHT.to_string());
    }
    finish(coords, triangles, labels)
}

/// Anchor of an attachment arc on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcAnchor {
    /// Angle of the arc midpoint.
    pub center: f64,
    /// Polygonal length of the arc.
    pub length: f64,
    /// Number of boundary edges on the arc.
    pub segments: usize,
}

/// Unit-disk mesher whose boundary contains exact, uniformly subdivided arcs.
///
/// Away from the arcs the boundary spacing grows linearly with distance,
/// capped at `2π / n_angular`. Ring spacing can shrink geometrically toward
/// the boundary via `radial_ratio < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskBuilder {
    pub n_radial: usize,
    pub n_angular: usize,
    pub arcs: Vec<ArcAnchor>,
    pub growth: f64,
    pub radial_ratio: f64,
}

impl DiskBuilder {
    pub fn new(n_radial: usize, n_angular: usize) -> Self {
        DiskBuilder { n_radial, n_angular, arcs: Vec::new(), growth: 1.2, radial_ratio: 1.0 }
    }

    pub fn with_arc(mut self, center: f64, length: f64, segments: usize) -> Self {
        self.arcs.push(ArcAnchor { center, length, segments });
        self
    }

    /// Build the mesh and return the arcs in the order they were added.
    pub fn build(&self) -> Result<(Mesh, Vec<BoundaryArc>)> {
        if self.n_radial < 2 || self.n_angular < 8 {
            return Err(invalid(format!(
                "disk needs n_radial >= 2 and n_angular >= 8, got ({}, {})",
                self.n_radial, self.n_angular
            )));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(invalid(format!("growth must exceed 1, got {}", self.growth)));
        }
        if !(self.radial_ratio > 0.0 && self.radial_ratio <= 1.0) {
            return Err(invalid(format!("radial_ratio must lie in (0, 1], got {}", self.radial_ratio)));
        }
        if self.arcs.is_empty() {
            let angles: Vec<f64> =
                (0..self.n_angular).map(|k| 2.0 * PI * k as f64 / self.n_angular as f64).collect();
            let mesh = polar_mesh(&angles, &self.radii(), true, "outer", "")?;
            return Ok((mesh, Vec::new()));
        }

        // angular extent of each arc, sorted by start angle
        let mut spans = Vec::new();
        for (idx, a) in self.arcs.iter().enumerate() {
            if a.segments < 1 || !(a.length > 0.0) || !a.center.is_finite() {
                return Err(invalid(format!("bad arc anchor {a:?}")));
            }
            let chord = a.length / a.segments as f64;
            if chord >= 0.5 {
                return Err(invalid(format!("arc chord {chord} too long for the unit disk")));
            }
            let step = 2.0 * (0.5 * chord).asin();
            let half = 0.5 * step * a.segments as f64;
            let start = (a.center - half).rem_euclid(2.0 * PI);
            spans.push((start, step, a.segments, idx));
        }
        spans.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let coarse = 2.0 * PI / self.n_angular as f64;

        // angles in CCW order starting at the first arc's start
        let base = spans[0].0;
        let mut angles: Vec<f64> = Vec::new();
        let mut arc_vertex_range = vec![(0usize, 0usize); spans.len()];
        for (k, &(start, step, segs, idx)) in spans.iter().enumerate() {
            let s = base + (start - base).rem_euclid(2.0 * PI);
            if let Some(&last) = angles.last() {
                if s <= last {
                    return Err(invalid("attachment arcs overlap"));
                }
            }
            // the first arc vertex of every arc after the first follows a gap
            arc_vertex_range[idx] = (angles.len(), angles.len() + segs);
            for m in 0..=segs {
                angles.push(s + step * m as f64);
            }
            let end = s + step * segs as f64;
            let (next_start, next_step) = if k + 1 < spans.len() {
                let (ns, nstep, _, _) = spans[k + 1];
                (base + (ns - base).rem_euclid(2.0 * PI), nstep)
            } else {
                (base + 2.0 * PI, spans[0].1)
            };
            if next_start - end < step.max(next_step) {
                return Err(invalid("attachment arcs overlap or touch"));
            }
            let gap = graded_gap(end, next_start, step, next_step, coarse, self.growth);
            angles.extend(gap);
        }

        // rotate so the chain starts mid-gap, after the last arc
        let n = angles.len();
        let last_arc_end = arc_vertex_range.iter().map(|r| r.1).max().unwrap();
        let shift = if last_arc_end + 1 < n { (last_arc_end + n) / 2 } else { 0 };
        angles.rotate_left(shift);
        let rotated = |v: usize| (v + n - shift) % n;

        let mesh = polar_mesh(&angles, &self.radii(), true, "outer", "")?;

        // arclength positions along the single chain
        let chain = &mesh.chains()[0];
        let first_outer = 1 + (self.n_radial - 1) * n;
        let mut pos = vec![0.0; n];
        let mut s = 0.0;
        for i in 0..chain.len() {
            let (a, b) = chain.edge(i);
            pos[a - first_outer] = s;
            s += mesh.edge_length(a, b).unwrap();
        }
        let total = s;
        let arcs = arc_vertex_range
            .iter()
            .map(|&(v0, v1)| {
                let s0 = pos[rotated(v0)];
                let mut s1 = pos[rotated(v1)];
                if s1 <= s0 {
                    s1 = total;
                }
                BoundaryArc { chain: 0, s0, s1, reversed: false }
            })
            .collect();
        Ok((mesh, arcs))
    }

    fn radii(&self) -> Vec<f64> {
        let n = self.n_radial;
        let w: Vec<f64> = (0..n).map(|i| self.radial_ratio.powi(i as i32)).collect();
        let total: f64 = w.iter().sum();
        let mut r = 0.0;
        let mut out: Vec<f64> = w
            .iter()
            .map(|d| {
                r += d / total;
                r
            })
            .collect();
        out[n - 1] = 1.0;
        out
    }
}

/// Interior angles of a gap `(a, b)` whose end spacings are `da` and `db`.
fn graded_gap(a: f64, b: f64, da: f64, db: f64, coarse: f64, growth: f64) -> Vec<f64> {
    let g = growth - 1.0;
    let size = |t: f64| {
        let from_a = da + g * (t - a);
        let from_b = db + g * (b - t);
        from_a.min(from_b).min(coarse).max(da.min(db))
    };
    let density = |t: f64| 1.0 / size(t);
    let integral = integrate(a, b, &density);
    let count = integral.round().max(1.0) as usize;
    let pts = place_by_density(a, b, count, density);
    pts.into_iter().skip(1).collect()
}

fn integrate(a: f64, b: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let n = ((b - a) * DENSITY_SAMPLES as f64).ceil().max(64.0) as usize;
    let dt = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * dt)).sum::<f64>() * dt
}

/// `count` points in `[a, b)`, starting at `a`, equally spaced in the measure `density(t) dt`.
fn place_by_density(a: f64, b: f64, count: usize, density: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = ((b - a) * DENSITY_SAMPLES as f64).ceil().max(64.0) as usize;
    let dt = (b - a) / n as f64;
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for i in 0..n {
        let t = a + (i as f64 + 0.5) * dt;
        cum.push(cum[i] + density(t) * dt);
    }
    let total = cum[n];
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let target = total * k as f64 / count as f64;
        while seg + 1 < n && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        out.push(a + (seg as f64 + frac.clamp(0.0, 1.0)) * dt);
    }
    out
}

fn wrap_angle(t: f64) -> f64 {
    (t + PI).rem_euclid(2.0 * PI) - PI
}

/// y-nodes in `[0, 1]`, clustered toward both ends by a sine map.
fn graded_unit(ny: usize) -> Vec<f64> {
    let map = |s: f64, alpha: f64| s - alpha * (2.0 * PI * s).sin() / (2.0 * PI);
    let mut alpha: f64 = 0.5;
    loop {
        let ys: Vec<f64> = (0..=ny)
            .map(|j| if j == ny { 1.0 } else { map(j as f64 / ny as f64, alpha) })
            .collect();
        let ratio = ys
            .windows(3)
            .map(|w| {
                let (d0, d1) = (w[1] - w[0], w[2] - w[1]);
                (d0 / d1).max(d1 / d0)
            })
            .fold(1.0, f64::max);
        if ratio <= 1.2 || alpha < 1e-3 {
            return if ratio <= 1.2 {
                ys
            } else {
                (0..=ny).map(|j| j as f64 / ny as f64).collect()
            };
        }
        alpha *= 0.8;
    }
}

/// Rings of vertices sharing one angle list. With `center` the first ring is
/// joined to a center vertex (id 0); otherwise the first radius is an inner
/// boundary labeled `inner_label`.
fn polar_mesh(
    angles: &[f64],
    radii: &[f64],
    center: bool,
    outer_label: &str,
    inner_label: &str,
) -> Result<Mesh> {
    let m = angles.len();
    let offset = usize::from(center);
    let mut coords = Vec::with_capacity(offset + m * radii.len());
    if center {
        coords.push([0.0, 0.0]);
    }
    for &r in radii {
        for &t in angles {
            coords.push([r * t.cos(), r * t.sin()]);
        }
    }
    let ring = |i: usize, k: usize| offset + i * m + (k % m);
    let mut triangles = Vec::new();
    if center {
        for k in 0..m {
            triangles.push([0, ring(0, k), ring(0, k + 1)]);
        }
    }
    for i in 0..radii.len() - 1 {
        for k in 0..m {
            let (a, b, c, d) = (ring(i, k), ring(i, k + 1), ring(i + 1, k + 1), ring(i + 1, k));
            // counter-clockwise quad is (a, d, c, b)
            if dist(coords[a], coords[c]) <= dist(coords[b], coords[d]) {
                triangles.push([a, d, c]);
                triangles.push([a, c, b]);
            } else {
                triangles.push([a, d, b]);
                triangles.push([d, c, b]);
            }
        }
    }
    let last = radii.len() - 1;
    let mut labels = BTreeMap::new();
    for k in 0..m {
        labels.insert(Edge::new(ring(last, k), ring(last, k + 1)), outer_label.to_string());
        if !center {
            labels.insert(Edge::new(ring(0, k), ring(0, k + 1)), inner_label.to_string());
        }
    }
    finish(coords, triangles, labels)
}

fn finish(
    coords: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_labels: BTreeMap<Edge, String>,
) -> Result<Mesh> {
    let mut edge_lengths = BTreeMap::new();
    for tri in &triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edge_lengths.insert(Edge::new(a, b), dist(coords[a], coords[b]));
        }
    }
    Mesh::from_parts(MeshParts {
        n_vertices: coords.len(),
        triangles,
        edge_lengths,
        boundary_labels,
        coords: Some(coords),
        regions: Vec::new(),
        vertex_sets: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octagon_disk() {
        let m = make_disk_mesh(2, 8, &[], 1.0).unwrap();
        assert_eq!(m.chains().len(), 1);
        assert_eq!(m.chains()[0].len(), 8);
        let expected = 16.0 * (PI / 8.0).sin();
        assert!((m.boundary_length() - expected).abs() < 1e-13);
        assert!((expected - 6.1229).abs() < 1e-4);
        assert_eq!(m.topology().euler_characteristic, 1);
    }

    #[test]
    fn fine_disk_perimeter() {
        let m = make_disk_mesh(20, 160, &[], 1.0).unwrap();
        let l = m.boundary_length();
        assert!((l - 320.0 * (PI / 160.0).sin()).abs() < 1e-12, "{l}");
        assert!((l - 6.282782).abs() < 1e-6, "{l}");
        assert!((l - 2.0 * PI).abs() / (2.0 * PI) < 1e-3);
    }

    #[test]
    fn clustered_disk_grading() {
        let m = make_disk_mesh(20, 160, &[0.0, PI / 16.0], 4.0).unwrap();
        let coords = m.coords().unwrap();
        let chain = &m.chains()[0];
        let angle_len = |i: usize| {
            let (a, b) = chain.edge(i);
            let mid = [(coords[a][0] + coords[b][0]) / 2.0, (coords[a][1] + coords[b][1]) / 2.0];
            (mid[1].atan2(mid[0]), m.edge_length(a, b).unwrap())
        };
        let edges: Vec<(f64, f64)> = (0..chain.len()).map(angle_len).collect();
        let near = edges.iter().min_by(|x, y| x.0.abs().partial_cmp(&y.0.abs()).unwrap()).unwrap().1;
        let far = edges
            .iter()
            .min_by(|x, y| (PI - x.0.abs()).partial_cmp(&(PI - y.0.abs())).unwrap())
            .unwrap()
            .1;
        let ratio = far / near;
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn rectangle_perimeter_and_labels() {
        let m = make_rectangle_mesh(0.2, 1.0, 4, 40).unwrap();
        assert!((m.boundary_length() - 0.48).abs() < 1e-14);
        assert_eq!(m.labels().len(), 4);
        let unit = make_rectangle_mesh(1.0, 1.0, 2, 2).unwrap();
        assert_eq!(unit.labels().len(), 4);
        assert!((unit.boundary_length() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn thin_rectangle_is_valid() {
        let m = make_rectangle_mesh(0.1, 2.5, 4, 100).unwrap();
        let ar = m.max_aspect_ratio();
        assert!(ar.is_finite() && ar > 1.0);
        assert_eq!(m.topology().boundary_components, 1);
    }

    #[test]
    fn rectangle_grading_ratio_bounded() {
        let ys = graded_unit(48);
        for w in ys.windows(3) {
            let r = (w[2] - w[1]) / (w[1] - w[0]);
            assert!(r <= 1.2 + 1e-12 && r >= 1.0 / 1.2 - 1e-12);
        }
        assert!(ys[1] - ys[0] < ys[25] - ys[24]);
    }

    #[test]
    fn annulus_has_two_boundaries() {
        let m = make_annulus_mesh(0.5, 3, 24).unwrap();
        let t = m.topology();
        assert_eq!(t.boundary_components, 2);
        assert_eq!(t.euler_characteristic, 0);
        assert!(t.orientable);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(make_disk_mesh(1, 8, &[], 1.0).is_err());
        assert!(make_disk_mesh(2, 7, &[], 1.0).is_err());
        assert!(make_disk_mesh(2, 8, &[], 0.5).is_err());
        assert!(make_rectangle_mesh(0.0, 1.0, 2, 2).is_err());
    }

    #[test]
    fn builder_places_exact_arcs() {
        let eps: f64 = 0.15;
        let (m, arcs) = DiskBuilder::new(12, 96)
            .with_arc(0.0, eps * eps, 4)
            .with_arc(PI, eps * eps, 4)
            .build()
            .unwrap();
        assert_eq!(arcs.len(), 2);
        for a in &arcs {
            assert!(((a.s1 - a.s0) - eps * eps).abs() < 1e-14, "{a:?}");
        }
        // growth of consecutive boundary edges stays moderate
        let chain = &m.chains()[0];
        let lens: Vec<f64> = (0..chain.len())
            .map(|i| {
                let (a, b) = chain.edge(i);
                m.edge_length(a, b).unwrap()
            })
            .collect();
        for i in 0..lens.len() {
            let r = lens[(i + 1) % lens.len()] / lens[i];
            assert!(r < 1.35 && r > 1.0 / 1.35, "ratio {r} at {i}");
        }
    }
}
