use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{full_spectrum, glued_surface, to_csv, to_json, BaseSurface, Settings};
use crate::analytic::limit_spectrum;
use crate::error::{invalid, Result};

/// Glued spectra along a decreasing `ε` sequence against the limit spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub h: f64,
    pub epsilons: Vec<f64>,
    /// Computed spectrum of the base, `σ_0..σ_J`.
    pub base_values: Vec<f64>,
    /// Limit targets `σ_j(h)`, `j = 0..=J`.
    pub targets: Vec<f64>,
    /// `eigenvalues[i][j]` is `σ_j(Σ_{ε_i,h})`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// `max_j |σ_j(Σ_{ε_i,h}) − σ_j(h)|`.
    pub max_deviation: Vec<f64>,
    pub non_increasing: bool,
    pub strictly_decreasing: bool,
}

#[derive(Serialize)]
struct Row {
    epsilon: f64,
    j: usize,
    sigma: f64,
    target: f64,
    deviation: f64,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn to_csv(&self) -> Result<String> {
        to_csv(self.epsilons.iter().zip(&self.eigenvalues).flat_map(|(&epsilon, row)| {
            row.iter().zip(&self.targets).enumerate().map(move |(j, (&sigma, &target))| Row {
                epsilon,
                j,
                sigma,
                target,
                deviation: (sigma - target).abs(),
            })
        }))
    }
}

/// Compare `σ_0..σ_J` of `Σ_{ε,h}` with the limit spectrum for each `ε`.
pub fn converge_eps(
    base: &BaseSurface,
    h: f64,
    epsilons: &[f64],
    j_max: usize,
    s: &Settings,
) -> Result<ConvergenceReport> {
    if epsilons.is_empty() {
        return Err(invalid("epsilon list is empty"));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("epsilon list must be strictly decreasing"));
    }
    let count = j_max + 1;
    let base_values = full_spectrum(&base.plain()?, count)?.values;
    let targets = limit_spectrum(&base_values, h, count)?;
    let eigenvalues = epsilons
        .par_iter()
        .map(|&e| Ok(full_spectrum(&glued_surface(base, e, h, s)?, count)?.values))
        .collect::<Result<Vec<_>>>()?;
    let max_deviation: Vec<f64> = eigenvalues
        .iter()
        .map(|row| row.iter().zip(&targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    Ok(ConvergenceReport {
        h,
        epsilons: epsilons.to_vec(),
        base_values,
        targets,
        non_increasing: max_deviation.windows(2).all(|w| w[1] <= w[0]),
        strictly_decreasing: max_deviation.windows(2).all(|w| w[1] < w[0]),
        eigenvalues,
        max_deviation,
    })
}
