use serde::{Deserialize, Serialize};

use super::{full_spectrum, glued_surface, to_json, BaseSurface, Settings, ARC_LABELS};
use crate::analytic::{rectangle_spectrum, RectCondition};
use crate::error::Result;
use crate::steklov::{solve_steklov, Condition, SteklovProblem};

/// Relative slack allowed in both inequalities.
pub const LEMMA_TOL: f64 = 1e-6;

/// `σ_1^N(Σ, I_ε) ≤ σ_ε ≤ σ_0^D(R_ε, I_ε)` at one `(ε, h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub epsilon: f64,
    pub h: f64,
    /// `σ_1` of the glued surface.
    pub sigma_eps: f64,
    /// Next eigenvalue of the glued surface.
    pub sigma_eps_next: f64,
    pub relative_gap: f64,
    /// `σ_0` of the rectangle with Dirichlet on `I_ε` (closed form).
    pub sigma_dirichlet: f64,
    /// `σ_1` of the base with Neumann on the attachment arcs.
    pub sigma_neumann: f64,
    /// `(σ_0^D − σ_ε) / σ_0^D`.
    pub upper_slack: f64,
    /// `(σ_ε − σ_1^N) / σ_ε`.
    pub lower_slack: f64,
    pub upper_holds: bool,
    /// Only judged where `σ_1` is double (relative gap within the
    /// multiplicity tolerance).
    pub lower_holds: Option<bool>,
}

impl LemmaReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

pub fn check_lemma_inequalities(base: &BaseSurface, epsilon: f64, h: f64, s: &Settings) -> Result<LemmaReport> {
    let glued = full_spectrum(&glued_surface(base, epsilon, h, s)?, 3)?.values;
    let (sigma_eps, next) = (glued[1], glued[2]);
    let sigma_dirichlet = rectangle_spectrum(epsilon, h, RectCondition::DirichletOnI, 1)?[0];
    let (arcs, _) = base.with_arcs(epsilon, s.nx)?;
    let p = ARC_LABELS
        .iter()
        .fold(SteklovProblem::new(&arcs, 2), |p, l| p.with_condition(l, Condition::Neumann));
    let sigma_neumann = solve_steklov(&p)?.values[1];
    let upper_slack = (sigma_dirichlet - sigma_eps) / sigma_dirichlet;
    let lower_slack = (sigma_eps - sigma_neumann) / sigma_eps;
    let relative_gap = (next - sigma_eps) / sigma_eps;
    Ok(LemmaReport {
        epsilon,
        h,
        sigma_eps,
        sigma_eps_next: next,
        relative_gap,
        sigma_dirichlet,
        sigma_neumann,
        upper_slack,
        lower_slack,
        upper_holds: upper_slack >= -LEMMA_TOL,
        lower_holds: (relative_gap <= s.multiplicity_tol).then_some(lower_slack >= -LEMMA_TOL),
    })
}
