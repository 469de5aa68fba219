use serde::{Deserialize, Serialize};

use super::{find_h_multiplicity, full_spectrum, glued_surface, next_distinct, to_json, BaseSurface, Settings};
use crate::analytic::admissible_window;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

/// `σ_1·L` before and after attaching the rectangle at `h_ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub epsilon: f64,
    /// Factor applied to the input base to bring its boundary length to `2π`.
    pub normalization: f64,
    pub h0: Option<f64>,
    pub h_eps: Option<f64>,
    pub sigma1_base: f64,
    pub length_base: f64,
    pub product_base: f64,
    pub sigma1_glued: f64,
    pub length_glued: f64,
    pub product_glued: f64,
    /// Required gain `0.5·ε·h0·σ_1(Σ)`.
    pub margin: f64,
    pub verdict: Verdict,
}

impl MonotonicityReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

/// Locate `h_ε` in the admissible window of the (normalized) base and test
/// `σ_1(Σ_ε)L(∂Σ_ε) − σ_1(Σ)L(∂Σ) ≥ 0.5·ε·h0·σ_1(Σ)`.
pub fn verify_monotonicity(base: &BaseSurface, epsilon: f64, s: &Settings) -> Result<MonotonicityReport> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let raw = base.plain()?;
    let base = base.normalized()?;
    let plain = base.plain()?;
    let normalization = plain.boundary_length() / raw.boundary_length();
    let values = full_spectrum(&plain, 8.min(plain.boundary_vertices().len()))?.values;
    let sigma1 = values[1];
    let length_base = plain.boundary_length();
    let product_base = sigma1 * length_base;
    if epsilon == 0.0 {
        return Ok(MonotonicityReport {
            epsilon,
            normalization,
            h0: None,
            h_eps: None,
            sigma1_base: sigma1,
            length_base,
            product_base,
            sigma1_glued: sigma1,
            length_glued: length_base,
            product_glued: product_base,
            margin: 0.0,
            verdict: Verdict::NotApplicable,
        });
    }
    let next = next_distinct(&values)
        .ok_or_else(|| Error::InfeasibleWindow("no base eigenvalue above sigma_1 among the first 8".into()))?;
    let window = admissible_window(sigma1, next)?;
    let m = find_h_multiplicity(&base, epsilon, &window, s.multiplicity_tol, s)?;
    let glued = glued_surface(&base, epsilon, m.h_eps, s)?;
    let sigma1_glued = full_spectrum(&glued, 2)?.values[1];
    let length_glued = glued.boundary_length();
    let product_glued = sigma1_glued * length_glued;
    let margin = 0.5 * epsilon * window.h0 * sigma1;
    Ok(MonotonicityReport {
        epsilon,
        normalization,
        h0: Some(window.h0),
        h_eps: Some(m.h_eps),
        sigma1_base: sigma1,
        length_base,
        product_base,
        sigma1_glued,
        length_glued,
        product_glued,
        margin,
        verdict: if product_glued - product_base >= margin { Verdict::Pass } else { Verdict::Fail },
    })
}
