use serde::{Deserialize, Serialize};

use super::{full_spectrum, glued_surface, sweep_h, to_json, BaseSurface, Settings, SweepReport};
use crate::analytic::Window;
use crate::error::{Error, Result};

/// Outcome of the search for `h_ε`, where `σ_1(Σ_{ε,h})` is (nearly) double.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityResult {
    pub epsilon: f64,
    pub window: Window,
    pub h_eps: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub gap: f64,
    pub relative_gap: f64,
    /// Whether `relative_gap <= tol_gap` was reached.
    pub converged: bool,
    /// Glued solves spent in the golden-section stage.
    pub evaluations: usize,
    pub bracket: (f64, f64),
    pub sweep: SweepReport,
}

impl MultiplicityResult {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

/// Minimize `σ_2 − σ_1` over `h` in `window`: a uniform sweep locates an
/// interior grid minimum, then golden-section search refines it until the
/// relative gap is at most `tol_gap` or the bracket is narrower than
/// `s.h_tol`.
pub fn find_h_multiplicity(
    base: &BaseSurface,
    epsilon: f64,
    window: &Window,
    tol_gap: f64,
    s: &Settings,
) -> Result<MultiplicityResult> {
    let sweep = sweep_h(base, epsilon, window, s.sweep_grid.max(3), s)?;
    let i = sweep.argmin_gap();
    if i == 0 || i + 1 == sweep.h.len() {
        return Err(Error::NoCrossing(format!(
            "gap sigma_2 - sigma_1 is smallest at the window edge h = {} (window [{}, {}])",
            sweep.h[i], window.h0, window.h1
        )));
    }
    let eval = |h: f64| -> Result<(f64, f64)> {
        let v = full_spectrum(&glued_surface(base, epsilon, h, s)?, 3)?.values;
        Ok((v[1], v[2]))
    };
    let mut best = (sweep.h[i], sweep.eigenvalues[i][1], sweep.eigenvalues[i][2]);
    let rel = |b: &(f64, f64, f64)| (b.2 - b.1) / b.1;
    let (mut a, mut b) = (sweep.h[i - 1], sweep.h[i + 1]);
    let bracket = (a, b);
    let mut evaluations = 0;
    if rel(&best) > tol_gap {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let (p, q) = eval(x1)?;
        let mut f1 = (x1, p, q);
        let (p, q) = eval(x2)?;
        let mut f2 = (x2, p, q);
        evaluations = 2;
        loop {
            for f in [f1, f2] {
                if f.2 - f.1 < best.2 - best.1 {
                    best = f;
                }
            }
            if rel(&best) <= tol_gap || b - a <= s.h_tol {
                break;
            }
            if f1.2 - f1.1 <= f2.2 - f2.1 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                let (p, q) = eval(x1)?;
                f1 = (x1, p, q);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                let (p, q) = eval(x2)?;
                f2 = (x2, p, q);
            }
            evaluations += 1;
        }
    }
    Ok(MultiplicityResult {
        epsilon,
        window: *window,
        h_eps: best.0,
        sigma1: best.1,
        sigma2: best.2,
        gap: best.2 - best.1,
        relative_gap: rel(&best),
        converged: rel(&best) <= tol_gap,
        evaluations,
        bracket,
        sweep,
    })
}
