use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{base_fraction, full_spectrum, glued_surface, to_csv, to_json, BaseSurface, Settings};
use crate::analytic::Window;
use crate::assembly::{assemble_boundary_mass, ConformalWeight};
use crate::error::{invalid, Result};

/// Two overlaps closer than this make the branch choice ambiguous.
pub const OVERLAP_TIE: f64 = 1e-3;

/// Glued spectra on a uniform `h` grid with one tracked branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub epsilon: f64,
    pub h: Vec<f64>,
    /// `eigenvalues[i][j]` is `σ_j(Σ_{ε,h_i})`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Index of the tracked branch at each grid point.
    pub tracked: Vec<usize>,
    /// Boundary mass of the tracked eigenvector lying on the base boundary.
    pub m: Vec<f64>,
    /// `σ_2 − σ_1`.
    pub gap: Vec<f64>,
    /// Grid points where the two best overlaps were within [`OVERLAP_TIE`].
    pub flagged_crossings: Vec<usize>,
    /// Grid point of the smallest gap, if it is interior.
    pub h_eps: Option<f64>,
}

#[derive(Serialize)]
struct Row {
    h: f64,
    j: usize,
    sigma: f64,
    tracked: bool,
    m: f64,
    gap: f64,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn to_csv(&self) -> Result<String> {
        to_csv((0..self.h.len()).flat_map(|i| {
            self.eigenvalues[i].iter().enumerate().map(move |(j, &sigma)| Row {
                h: self.h[i],
                j,
                sigma,
                tracked: self.tracked[i] == j,
                m: self.m[i],
                gap: self.gap[i],
            })
        }))
    }

    /// Index of the smallest gap on the grid.
    pub fn argmin_gap(&self) -> usize {
        (0..self.gap.len()).fold(0, |best, i| if self.gap[i] < self.gap[best] { i } else { best })
    }
}

struct Point {
    values: Vec<f64>,
    fields: Vec<Vec<f64>>,
    base_fraction: Vec<f64>,
    overlap_mass: crate::assembly::SparseSym,
}

/// Sweep `h` uniformly over the window. The tracked branch starts at the
/// nonzero eigenvector most concentrated on the rectangle and is followed
/// by the largest `|u_prev^T B u|` between consecutive grid points.
pub fn sweep_h(base: &BaseSurface, epsilon: f64, window: &Window, grid: usize, s: &Settings) -> Result<SweepReport> {
    if grid < 2 {
        return Err(invalid(format!("sweep grid needs at least 2 points, got {grid}")));
    }
    if !(window.h0 > 0.0 && window.h0 < window.h1) {
        return Err(invalid(format!("window ({}, {}) is empty", window.h0, window.h1)));
    }
    let count = s.sweep_count.max(3);
    let h: Vec<f64> = (0..grid)
        .map(|i| window.h0 + (window.h1 - window.h0) * i as f64 / (grid - 1) as f64)
        .collect();
    let points = h
        .par_iter()
        .map(|&hi| {
            let mesh = glued_surface(base, epsilon, hi, s)?;
            let spec = full_spectrum(&mesh, count)?;
            let labels = mesh.labels();
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            Ok(Point {
                base_fraction: base_fraction(&spec),
                overlap_mass: assemble_boundary_mass(&mesh, &labels, &ConformalWeight::ones())?,
                values: spec.values,
                fields: spec.fields,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let start = (1..count)
        .min_by(|&a, &b| points[0].base_fraction[a].total_cmp(&points[0].base_fraction[b]))
        .unwrap();
    let mut tracked = vec![start];
    let mut flagged = Vec::new();
    for i in 1..grid {
        let prev = &points[i - 1].fields[tracked[i - 1]];
        let bp = points[i].overlap_mass.mul_vec(prev);
        let mut ov: Vec<(f64, usize)> = (1..count)
            .map(|j| (points[i].fields[j].iter().zip(&bp).map(|(a, b)| a * b).sum::<f64>().abs(), j))
            .collect();
        ov.sort_by(|a, b| b.0.total_cmp(&a.0));
        if ov[0].0 - ov[1].0 < OVERLAP_TIE {
            flagged.push(i);
        }
        tracked.push(ov[0].1);
    }

    let gap: Vec<f64> = points.iter().map(|p| p.values[2] - p.values[1]).collect();
    let mut report = SweepReport {
        epsilon,
        m: (0..grid).map(|i| points[i].base_fraction[tracked[i]].clamp(0.0, 1.0)).collect(),
        eigenvalues: points.into_iter().map(|p| p.values).collect(),
        h,
        tracked,
        gap,
        flagged_crossings: flagged,
        h_eps: None,
    };
    let i = report.argmin_gap();
    if grid > 2 && i > 0 && i + 1 < grid {
        report.h_eps = Some(report.h[i]);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(h0: f64, h1: f64) -> Window {
        Window { h0, h1, h_star: 0.5 * (h0 + h1) }
    }

    #[test]
    fn two_point_grid_has_no_detection() {
        let base = BaseSurface::unit_disk(6, 48);
        let s = Settings { ny: 16, ..Settings::default() };
        let r = sweep_h(&base, 0.3, &window(2.0, 3.0), 2, &s).unwrap();
        assert_eq!(r.h, vec![2.0, 3.0]);
        assert!(r.h_eps.is_none());
        assert!(r.m.iter().all(|m| (0.0..=1.0).contains(m)));
        let back: SweepReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.to_csv().unwrap().lines().count(), 1 + 2 * s.sweep_count);
    }

    #[test]
    fn rejects_degenerate_input() {
        let base = BaseSurface::unit_disk(4, 32);
        let s = Settings::default();
        assert!(sweep_h(&base, 0.3, &window(2.0, 3.0), 1, &s).is_err());
        assert!(sweep_h(&base, 0.3, &window(3.0, 2.0), 5, &s).is_err());
    }
}
