//! Numerical experiments on glued surfaces.
//!
//! Every experiment takes a [`BaseSurface`] and glues a thin rectangle
//! across two antipodal boundary arcs of length `ε²` on its first boundary
//! chain. Reports serialize to JSON and to flat CSV tables.

mod converge;
mod lemmas;
mod monotonicity;
mod multiplicity;
mod sweep;
mod topology;

use std::f64::consts::PI;

use serde::Serialize;

pub use converge::{converge_eps, ConvergenceReport};
pub use lemmas::{check_lemma_inequalities, LemmaReport, LEMMA_TOL};
pub use monotonicity::{verify_monotonicity, MonotonicityReport, Verdict};
pub use multiplicity::{find_h_multiplicity, MultiplicityResult};
pub use sweep::{sweep_h, SweepReport, OVERLAP_TIE};
pub use topology::{topology_of_attachment, AttachmentResult};

use crate::error::{invalid, Error, Result};
use crate::mesh::{align_arc, glue, BoundaryArc, DiskBuilder, GlueSpec, Mesh, RECT_FREE_LEFT, RECT_FREE_RIGHT};
use crate::steklov::{solve_steklov, Spectrum, SteklovProblem};

/// Labels given to the two attachment arcs on the base.
pub const ARC_LABELS: [&str; 2] = ["arc1", "arc2"];

/// Surface the rectangle is attached to.
#[derive(Clone, Debug)]
pub enum BaseSurface {
    /// Unit disk, rebuilt for every `ε` with vertices placed exactly on the
    /// arcs at angles 0 and π.
    Disk { n_radial: usize, n_angular: usize },
    /// A given mesh. Arcs start at the first vertex of chain 0 and at the
    /// chain vertex closest to half its length.
    Fixed(Mesh),
}

impl BaseSurface {
    pub fn unit_disk(n_radial: usize, n_angular: usize) -> Self {
        BaseSurface::Disk { n_radial, n_angular }
    }

    /// The base without any arc refinement.
    pub fn plain(&self) -> Result<Mesh> {
        match self {
            BaseSurface::Disk { n_radial, n_angular } => {
                Ok(DiskBuilder::new(*n_radial, *n_angular).build()?.0)
            }
            BaseSurface::Fixed(m) => Ok(m.clone()),
        }
    }

    /// Base with both arcs split into `nx` equal edges and labelled
    /// [`ARC_LABELS`].
    pub fn with_arcs(&self, epsilon: f64, nx: usize) -> Result<(Mesh, [BoundaryArc; 2])> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let w = epsilon * epsilon;
        let (mesh, arcs) = match self {
            BaseSurface::Disk { n_radial, n_angular } => {
                let (m, arcs) = DiskBuilder::new(*n_radial, *n_angular)
                    .with_arc(0.0, w, nx)
                    .with_arc(PI, w, nx)
                    .build()?;
                (m, [arcs[0], arcs[1]])
            }
            BaseSurface::Fixed(m) => {
                let Some(chain) = m.chains().first() else {
                    return Err(invalid("base mesh has no boundary"));
                };
                let total = m.chain_length(0);
                let mut s = 0.0;
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..chain.len() {
                    let d = (s - 0.5 * total).abs();
                    if d < best.0 {
                        best = (d, s);
                    }
                    let (a, b) = chain.edge(i);
                    s += m.edge_length(a, b).unwrap();
                }
                let arc = |s0: f64| BoundaryArc { chain: 0, s0, s1: s0 + w, reversed: false };
                ((*m).clone(), [arc(0.0), arc(best.1)])
            }
        };
        let mesh = align_arc(&mesh, &arcs[0], nx, ARC_LABELS[0])?;
        let mesh = align_arc(&mesh, &arcs[1], nx, ARC_LABELS[1])?;
        Ok((mesh, arcs))
    }

    /// Copy scaled so that the total boundary length is `2π`. The disk is
    /// already in this normalization.
    pub fn normalized(&self) -> Result<BaseSurface> {
        match self {
            BaseSurface::Disk { .. } => Ok(self.clone()),
            BaseSurface::Fixed(m) => Ok(BaseSurface::Fixed(m.scale(2.0 * PI / m.boundary_length())?)),
        }
    }
}

/// Discretization and search controls shared by the experiments.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Settings {
    /// Rectangle subdivisions across the width (`ε²`).
    pub nx: usize,
    /// Rectangle subdivisions along the length (`εh`).
    pub ny: usize,
    pub reverse_orientation: bool,
    /// Grid size of the sweep preceding a multiplicity search.
    pub sweep_grid: usize,
    /// Eigenvalues computed per sweep point.
    pub sweep_count: usize,
    /// Relative gap below which `σ_1` counts as a double eigenvalue.
    pub multiplicity_tol: f64,
    /// Golden-section search stops once the bracket is this narrow.
    pub h_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            nx: 4,
            ny: 48,
            reverse_orientation: false,
            sweep_grid: 27,
            sweep_count: 6,
            multiplicity_tol: 1e-2,
            h_tol: 1e-7,
        }
    }
}

/// `Σ_{ε,h}` built from `base`.
pub fn glued_surface(base: &BaseSurface, epsilon: f64, h: f64, s: &Settings) -> Result<Mesh> {
    let (mesh, [arc1, arc2]) = base.with_arcs(epsilon, s.nx)?;
    glue(
        &mesh,
        &GlueSpec { epsilon, h, arc1, arc2, reverse_orientation: s.reverse_orientation, nx: s.nx, ny: s.ny },
    )
}

/// First `count` eigenpairs with the whole boundary Spectral.
pub(crate) fn full_spectrum(mesh: &Mesh, count: usize) -> Result<Spectrum> {
    solve_steklov(&SteklovProblem::new(mesh, count))
}

/// Fraction of each eigenvector's boundary mass lying on the base boundary
/// (everything except the rectangle's free sides).
pub(crate) fn base_fraction(spec: &Spectrum) -> Vec<f64> {
    spec.label_masses
        .iter()
        .map(|m| {
            m.iter()
                .filter(|(l, _)| l.as_str() != RECT_FREE_LEFT && l.as_str() != RECT_FREE_RIGHT)
                .map(|(_, v)| v)
                .sum()
        })
        .collect()
}

/// Smallest base eigenvalue strictly above `values[1]` (relative 1e-6).
pub(crate) fn next_distinct(values: &[f64]) -> Option<f64> {
    let s1 = *values.get(1)?;
    values[2..].iter().copied().find(|v| *v > s1 * (1.0 + 1e-6))
}

pub(crate) fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub(crate) fn to_json<R: Serialize>(r: &R) -> Result<String> {
    serde_json::to_string_pretty(r).map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_disk_mesh;

    #[test]
    fn fixed_base_arcs_are_antipodal() {
        let base = BaseSurface::Fixed(make_disk_mesh(4, 32, &[], 1.0).unwrap());
        let (m, arcs) = base.with_arcs(0.3, 3).unwrap();
        assert!(arcs[0].s0 == 0.0);
        assert!((arcs[1].s0 - 0.5 * m.chain_length(0)).abs() < 1e-12);
        assert!(m.has_label("arc1") && m.has_label("arc2"));
        let l = m.boundary_length();
        assert!((l - make_disk_mesh(4, 32, &[], 1.0).unwrap().boundary_length()).abs() < 1e-12);
    }

    #[test]
    fn glued_disk_length() {
        let s = Settings::default();
        let g = glued_surface(&BaseSurface::unit_disk(6, 48), 0.2, 2.0, &s).unwrap();
        let base = BaseSurface::unit_disk(6, 48).with_arcs(0.2, s.nx).unwrap().0;
        let want = base.boundary_length() - 2.0 * 0.04 + 2.0 * 0.2 * 2.0;
        assert!((g.boundary_length() - want).abs() < 1e-12);
    }

    #[test]
    fn normalization() {
        let m = make_disk_mesh(3, 16, &[], 1.0).unwrap().scale(3.0).unwrap();
        let BaseSurface::Fixed(n) = BaseSurface::Fixed(m).normalized().unwrap() else { unreachable!() };
        assert!((n.boundary_length() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn next_distinct_skips_multiplets() {
        assert_eq!(next_distinct(&[0.0, 1.0, 1.0 + 1e-9, 2.0]), Some(2.0));
        assert_eq!(next_distinct(&[0.0, 1.0, 1.0]), None);
    }
}
