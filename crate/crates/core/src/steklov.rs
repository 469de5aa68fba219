//! Steklov problems with mixed boundary conditions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_stiffness, assemble_stiffness_region, boundary_mass, ConformalWeight, SparseSym,
};
use crate::error::{invalid, Result};
use crate::mesh::{Mesh, RECT_REGION, SEAM_SET};
use crate::numerics::{condense, factor_spd, solve, sym_generalized_eig, DenseSym, DofPartition};

/// Boundary condition attached to a boundary label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// `∂_ν u = σ e^ω u`.
    Spectral,
    /// `u = 0`.
    Dirichlet,
    /// `∂_ν u = 0`.
    Neumann,
}

#[derive(Clone, Debug)]
pub struct SteklovProblem<'a> {
    pub mesh: &'a Mesh,
    pub conditions: BTreeMap<String, Condition>,
    pub weight: ConformalWeight,
    pub count: usize,
    pub lumped: bool,
}

impl<'a> SteklovProblem<'a> {
    /// Every boundary label Spectral, unit weight, consistent mass.
    pub fn new(mesh: &'a Mesh, count: usize) -> Self {
        let conditions = mesh.labels().into_iter().map(|l| (l, Condition::Spectral)).collect();
        SteklovProblem { mesh, conditions, weight: ConformalWeight::ones(), count, lumped: false }
    }

    pub fn with_condition(mut self, label: &str, c: Condition) -> Self {
        self.conditions.insert(label.to_string(), c);
        self
    }

    pub fn with_weight(mut self, w: ConformalWeight) -> Self {
        self.weight = w;
        self
    }

    fn validate(&self) -> Result<()> {
        for label in self.conditions.keys() {
            if !self.mesh.has_label(label) {
                return Err(invalid(format!("condition given for unknown label '{label}'")));
            }
        }
        for label in self.mesh.labels() {
            if !self.conditions.contains_key(&label) {
                return Err(invalid(format!("no condition for boundary label '{label}'")));
            }
        }
        if !self.conditions.values().any(|c| *c == Condition::Spectral) {
            return Err(invalid("problem has no Spectral label"));
        }
        Ok(())
    }

    fn labels_with(&self, c: Condition) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|(_, v)| **v == c)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Vertex partition. A boundary vertex on any Dirichlet edge is in D;
    /// otherwise one on any Spectral edge is in F; everything else is in E.
    pub fn partition(&self) -> Result<DofPartition> {
        self.validate()?;
        let n = self.mesh.n_vertices();
        let mut dirichlet = vec![false; n];
        let mut spectral = vec![false; n];
        for (e, label) in self.mesh.boundary_labels() {
            match self.conditions[label] {
                Condition::Dirichlet => {
                    dirichlet[e.a()] = true;
                    dirichlet[e.b()] = true;
                }
                Condition::Spectral => {
                    spectral[e.a()] = true;
                    spectral[e.b()] = true;
                }
                Condition::Neumann => {}
            }
        }
        let (mut f, mut e, mut d) = (Vec::new(), Vec::new(), Vec::new());
        for v in 0..n {
            if dirichlet[v] {
                d.push(v);
            } else if spectral[v] {
                f.push(v);
            } else {
                e.push(v);
            }
        }
        DofPartition::new(n, f, e, d)
    }
}

/// Solution of a Steklov problem. Vectors are B-normalized.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Eigenvectors restricted to F, in the order of `partition.spectral()`.
    pub vectors: Vec<Vec<f64>>,
    /// Harmonic extensions to every vertex (zero on D).
    pub fields: Vec<Vec<f64>>,
    /// `‖S y − σ B y‖ / (‖S‖_F ‖y‖)`.
    pub residuals: Vec<f64>,
    /// Per eigenvector: fraction of the boundary mass carried by each Spectral label.
    pub label_masses: Vec<BTreeMap<String, f64>>,
    pub partition: DofPartition,
    pub mesh_hash: String,
}

pub fn solve_steklov(p: &SteklovProblem) -> Result<Spectrum> {
    let part = p.partition()?;
    let fset = part.spectral();
    if p.count > fset.len() {
        return Err(invalid(format!(
            "requested {} eigenvalues but only {} spectral vertices",
            p.count,
            fset.len()
        )));
    }
    let k = assemble_stiffness(p.mesh)?;
    let spectral_labels = p.labels_with(Condition::Spectral);
    let b = boundary_mass(p.mesh, &spectral_labels, &p.weight, p.lumped)?;
    let cond = condense(&k, &part)?;
    let bff = dense_principal(&b, fset);
    let eig = sym_generalized_eig(&cond.s, &bff, p.count)?;

    let s_norm = cond.s.frobenius_norm();
    let n = p.mesh.n_vertices();
    let mut fields = Vec::with_capacity(p.count);
    let mut residuals = Vec::with_capacity(p.count);
    let mut label_masses = Vec::with_capacity(p.count);
    for (sigma, y) in eig.values.iter().zip(&eig.vectors) {
        let sy = cond.s.mul_vec(y);
        let by = bff.mul_vec(y);
        let r: f64 = sy.iter().zip(&by).map(|(a, c)| (a - sigma * c).powi(2)).sum::<f64>().sqrt();
        let yn: f64 = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        residuals.push(r / (s_norm.max(f64::MIN_POSITIVE) * yn.max(f64::MIN_POSITIVE)));

        let mut u = vec![0.0; n];
        for (&v, &val) in fset.iter().zip(y) {
            u[v] = val;
        }
        let ue = cond.extend(y)?;
        for (&v, &val) in part.eliminated().iter().zip(&ue) {
            u[v] = val;
        }
        let masses = label_mass(p.mesh, &spectral_labels, &p.weight, &u);
        let total: f64 = masses.values().sum();
        label_masses.push(masses.into_iter().map(|(l, m)| (l, m / total)).collect());
        fields.push(u);
    }
    Ok(Spectrum {
        values: eig.values,
        vectors: eig.vectors,
        fields,
        residuals,
        label_masses,
        partition: part,
        mesh_hash: p.mesh.metadata_hash(),
    })
}

fn dense_principal(a: &SparseSym, idx: &[usize]) -> DenseSym {
    let mut pos = vec![usize::MAX; a.dim()];
    for (i, &v) in idx.iter().enumerate() {
        pos[v] = i;
    }
    let mut m = DenseSym::zeros(idx.len());
    for (r, c, v) in a.entries() {
        if pos[r] != usize::MAX && pos[c] != usize::MAX {
            m.set(pos[r], pos[c], m.get(pos[r], pos[c]) + v);
        }
    }
    m
}

/// Weighted boundary `L²` mass of `u` on the edges of each label.
fn label_mass(mesh: &Mesh, labels: &[&str], w: &ConformalWeight, u: &[f64]) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = labels.iter().map(|l| (l.to_string(), 0.0)).collect();
    for (e, label) in mesh.boundary_labels() {
        if let Some(m) = out.get_mut(label) {
            let (a, b) = (e.a(), e.b());
            let len = mesh.edge_lengths()[e] * 0.5 * (w.at(a) + w.at(b));
            *m += len / 3.0 * (u[a] * u[a] + u[a] * u[b] + u[b] * u[b]);
        }
    }
    out
}

/// Discrete harmonic extension. `Some(x)` fixes the vertex value; `None`
/// vertices are solved for (natural Neumann condition on free boundary).
pub fn harmonic_extension(mesh: &Mesh, values: &[Option<f64>]) -> Result<Vec<f64>> {
    let k = assemble_stiffness(mesh)?;
    extend_with(&k, values)
}

fn extend_with(k: &SparseSym, values: &[Option<f64>]) -> Result<Vec<f64>> {
    let n = k.dim();
    if values.len() != n {
        return Err(invalid(format!("{} boundary values for {n} vertices", values.len())));
    }
    let free: Vec<usize> = (0..n).filter(|&v| values[v].is_none()).collect();
    let mut u: Vec<f64> = values.iter().map(|v| v.unwrap_or(0.0)).collect();
    if free.is_empty() {
        return Ok(u);
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        pos[v] = i;
    }
    let mut rhs = vec![0.0; free.len()];
    for (r, c, v) in k.entries() {
        if r == c {
            continue;
        }
        if pos[r] != usize::MAX && pos[c] == usize::MAX {
            rhs[pos[r]] -= v * u[c];
        } else if pos[c] != usize::MAX && pos[r] == usize::MAX {
            rhs[pos[c]] -= v * u[r];
        }
    }
    let f = factor_spd(&k.principal(&free))?;
    let x = solve(&f, &rhs)?;
    for (&v, xi) in free.iter().zip(x) {
        u[v] = xi;
    }
    Ok(u)
}

/// Solution of the rectangle problem: Dirichlet data on the seam,
/// zero Neumann on the free sides.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedSolution {
    /// Global ids of the rectangle vertices, ascending.
    pub vertices: Vec<usize>,
    pub values: Vec<f64>,
    /// Seam vertices and the data prescribed there.
    pub seam: Vec<usize>,
    pub data: Vec<f64>,
    /// Vertex attaining `max |v|`.
    pub argmax: usize,
    pub max_abs: f64,
}

impl MixedSolution {
    /// Field on all vertices of the glued mesh (zero off the rectangle).
    pub fn global_field(&self, n_vertices: usize) -> Vec<f64> {
        let mut u = vec![0.0; n_vertices];
        for (&v, &x) in self.vertices.iter().zip(&self.values) {
            u[v] = x;
        }
        u
    }
}

/// Solve `Δv = 0` on the attached rectangle with `v = data` on the seam
/// (vertex set `I_eps`, ascending order) and `∂_ν v = 0` on the free sides.
pub fn solve_mixed_bvp(glued: &Mesh, data: &[f64]) -> Result<MixedSolution> {
    if !glued.has_region(RECT_REGION) {
        return Err(invalid(format!("mesh has no '{RECT_REGION}' region")));
    }
    let seam = glued
        .vertex_set(SEAM_SET)
        .ok_or_else(|| invalid(format!("mesh has no '{SEAM_SET}' vertex set")))?
        .to_vec();
    if data.len() != seam.len() {
        return Err(invalid(format!("{} data values for {} seam vertices", data.len(), seam.len())));
    }
    let mut in_rect = vec![false; glued.n_vertices()];
    for (t, tri) in glued.triangles().iter().enumerate() {
        if glued.region_of(t) == RECT_REGION {
            for &v in tri {
                in_rect[v] = true;
            }
        }
    }
    let vertices: Vec<usize> = (0..glued.n_vertices()).filter(|&v| in_rect[v]).collect();
    let k = assemble_stiffness_region(glued, RECT_REGION)?.principal(&vertices);
    let mut local: Vec<Option<f64>> = vec![None; vertices.len()];
    for (&s, &x) in seam.iter().zip(data) {
        let i = vertices
            .binary_search(&s)
            .map_err(|_| invalid(format!("seam vertex {s} is not on the rectangle")))?;
        local[i] = Some(x);
    }
    let values = extend_with(&k, &local)?;
    let (imax, max_abs) = values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.abs()))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(MixedSolution {
        argmax: vertices[imax],
        max_abs,
        vertices,
        values,
        seam,
        data: data.to_vec(),
    })
}

/// Per eigenvector, the boundary-mass fraction of each named region, where
/// a region is a set of Spectral labels. Regions must partition them.
pub fn boundary_mass_split(spec: &Spectrum, regions: &[(&str, Vec<&str>)]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = spec.label_masses.first() else {
        return Ok(Vec::new());
    };
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for (name, labels) in regions {
        for l in labels {
            if !first.contains_key(*l) {
                return Err(invalid(format!("region '{name}' names '{l}', which is not a Spectral label")));
            }
            if let Some(other) = seen.insert(l, name) {
                return Err(invalid(format!("label '{l}' is in regions '{other}' and '{name}'")));
            }
        }
    }
    if let Some(l) = first.keys().find(|l| !seen.contains_key(l.as_str())) {
        return Err(invalid(format!("Spectral label '{l}' is not covered by any region")));
    }
    Ok(spec
        .label_masses
        .iter()
        .map(|m| regions.iter().map(|(_, labels)| labels.iter().map(|l| m[*l]).sum()).collect())
        .collect())
}

/// Serializable digest of a [`Spectrum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub mesh_hash: String,
    pub n_vertices: usize,
    pub n_spectral: usize,
    pub conditions: BTreeMap<String, Condition>,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub label_masses: Vec<BTreeMap<String, f64>>,
}

impl SpectrumReport {
    pub fn new(p: &SteklovProblem, s: &Spectrum) -> Self {
        SpectrumReport {
            mesh_hash: s.mesh_hash.clone(),
            n_vertices: p.mesh.n_vertices(),
            n_spectral: s.partition.spectral().len(),
            conditions: p.conditions.clone(),
            eigenvalues: s.values.clone(),
            residuals: s.residuals.clone(),
            label_masses: s.label_masses.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_disk_mesh, make_rectangle_mesh};

    #[test]
    fn coarse_disk_spectrum() {
        let m = make_disk_mesh(10, 80, &[], 1.0).unwrap();
        let s = solve_steklov(&SteklovProblem::new(&m, 5)).unwrap();
        assert!(s.values[0].abs() <= 1e-8 * s.values[1]);
        for (v, want) in s.values.iter().zip([0.0, 1.0, 1.0, 2.0, 2.0]) {
            assert!((v - want).abs() < 0.03, "{:?}", s.values);
        }
        assert!(s.residuals.iter().all(|r| *r < 1e-8));
        for m in &s.label_masses {
            assert!((m["outer"] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interface_vertex_rule() {
        let m = make_rectangle_mesh(1.0, 1.0, 2, 2).unwrap();
        let p = SteklovProblem::new(&m, 1)
            .with_condition("I_bottom", Condition::Dirichlet)
            .with_condition("I_top", Condition::Neumann);
        let part = p.partition().unwrap();
        // corners (0,0),(2,0) touch I_bottom -> D; (0,2),(2,2) touch free sides -> F
        assert_eq!(part.constrained(), &[0, 1, 2]);
        assert!(part.spectral().contains(&6) && part.spectral().contains(&8));
        assert_eq!(part.eliminated(), &[4, 7]);
    }

    #[test]
    fn problem_validation() {
        let m = make_rectangle_mesh(1.0, 1.0, 2, 2).unwrap();
        let all_dir = ["I_bottom", "I_top", "free_left", "free_right"]
            .iter()
            .fold(SteklovProblem::new(&m, 1), |p, l| p.with_condition(l, Condition::Dirichlet));
        assert!(solve_steklov(&all_dir).is_err());
        let unknown = SteklovProblem::new(&m, 1).with_condition("nope", Condition::Neumann);
        assert!(solve_steklov(&unknown).is_err());
        assert!(solve_steklov(&SteklovProblem::new(&m, 100)).is_err());
    }

    #[test]
    fn constant_and_linear_extension() {
        let m = make_rectangle_mesh(1.0, 1.0, 4, 4).unwrap();
        let bnd = m.boundary_vertices();
        let c = m.coords().unwrap();
        let constant: Vec<Option<f64>> =
            (0..m.n_vertices()).map(|v| bnd.binary_search(&v).ok().map(|_| 2.5)).collect();
        let u = harmonic_extension(&m, &constant).unwrap();
        assert!(u.iter().all(|x| (x - 2.5).abs() < 1e-12));
        let linear: Vec<Option<f64>> =
            (0..m.n_vertices()).map(|v| bnd.binary_search(&v).ok().map(|_| c[v][0])).collect();
        let u = harmonic_extension(&m, &linear).unwrap();
        for v in 0..m.n_vertices() {
            assert!((u[v] - c[v][0]).abs() < 1e-12);
        }
    }

    #[test]
    fn report_round_trip() {
        let m = make_disk_mesh(3, 16, &[], 1.0).unwrap();
        let p = SteklovProblem::new(&m, 3);
        let r = SpectrumReport::new(&p, &solve_steklov(&p).unwrap());
        let back: SpectrumReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
