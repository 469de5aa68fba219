//! Closed-form spectra used as oracles.
//!
//! Rectangle `[-ε²/2, ε²/2] × [-εh/2, εh/2]`, Steklov condition on the long
//! sides `x = ±ε²/2`, Dirichlet or Neumann on the short sides `I`. With
//! `μ_j = jπ/(εh)` the modes separate into an even family (`cosh μx`) with
//! value `μ tanh(ε²μ/2)` and an odd family (`sinh μx`) with value
//! `μ coth(ε²μ/2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative margin applied to every inequality of the admissible window.
pub const WINDOW_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RectCondition {
    DirichletOnI,
    NeumannOnI,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Even in x: `cos/sin(μy) cosh(μx)`.
    F,
    /// Odd in x: `cos/sin(μy) sinh(μx)`.
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleEig {
    pub family: Family,
    pub j: usize,
    pub mu: f64,
    pub value: f64,
}

fn check_eps_h(epsilon: f64, h: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite() && h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("epsilon and h must be positive, got ({epsilon}, {h})")));
    }
    Ok(())
}

/// Value of mode `(family, j)`. For `j = 0` (Neumann only) the even mode is
/// the constant and the odd mode is `x`, with value `2/ε²`.
pub fn rectangle_mode(epsilon: f64, h: f64, family: Family, j: usize) -> RectangleEig {
    let w = epsilon * epsilon;
    let mu = j as f64 * PI / (epsilon * h);
    let value = match (family, j) {
        (Family::F, 0) => 0.0,
        (Family::G, 0) => 2.0 / w,
        (Family::F, _) => mu * (0.5 * w * mu).tanh(),
        (Family::G, _) => mu / (0.5 * w * mu).tanh(),
    };
    RectangleEig { family, j, mu, value }
}

/// Lowest `count` modes, ascending.
pub fn rectangle_modes(epsilon: f64, h: f64, condition: RectCondition, count: usize) -> Result<Vec<RectangleEig>> {
    check_eps_h(epsilon, h)?;
    let j0 = match condition {
        RectCondition::DirichletOnI => 1,
        RectCondition::NeumannOnI => 0,
    };
    let mut modes: Vec<RectangleEig> = (j0..j0 + count)
        .flat_map(|j| [rectangle_mode(epsilon, h, Family::F, j), rectangle_mode(epsilon, h, Family::G, j)])
        .collect();
    modes.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    modes.truncate(count);
    Ok(modes)
}

pub fn rectangle_spectrum(epsilon: f64, h: f64, condition: RectCondition, count: usize) -> Result<Vec<f64>> {
    Ok(rectangle_modes(epsilon, h, condition, count)?.into_iter().map(|m| m.value).collect())
}

/// `ρ_j(h) = j²π²/(2h²)`, the ε → 0 limit of the even family.
pub fn limit_rectangle_eig(j: i64, h: f64) -> Result<f64> {
    if j <= 0 {
        return Err(invalid(format!("mode index must be >= 1, got {j}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("h must be positive, got {h}")));
    }
    let j = j as f64;
    Ok(j * j * PI * PI / (2.0 * h * h))
}

/// Unit-disk Steklov spectrum `0, 1, 1, 2, 2, ...`.
pub fn disk_spectrum(count: usize) -> Vec<f64> {
    (0..count).map(|i| i.div_ceil(2) as f64).collect()
}

/// Sorted union of `base_values` with `{ρ_j(h) : j ≥ 1}`, truncated to `count`.
pub fn limit_spectrum(base_values: &[f64], h: f64, count: usize) -> Result<Vec<f64>> {
    if base_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("base spectrum must be ascending"));
    }
    let mut out: Vec<f64> = base_values.to_vec();
    for j in 1..=count as i64 {
        out.push(limit_rectangle_eig(j, h)?);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.truncate(count);
    Ok(out)
}

/// The `h` where `ρ_1(h)` equals `sigma1`.
pub fn h_star(sigma1: f64) -> Result<f64> {
    if !(sigma1 > 0.0 && sigma1.is_finite()) {
        return Err(invalid(format!("sigma_1 must be positive, got {sigma1}")));
    }
    Ok(PI / (2.0 * sigma1).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub h0: f64,
    pub h1: f64,
    pub h_star: f64,
}

/// Whether `ρ_1(h1) < σ_1 < ρ_1(h0) < ρ_2(h1) < σ_next` holds strictly.
pub fn window_holds(h0: f64, h1: f64, sigma1: f64, sigma_next: f64) -> bool {
    let rho = |j: i64, h: f64| limit_rectangle_eig(j, h).unwrap_or(f64::NAN);
    rho(1, h1) < sigma1 && sigma1 < rho(1, h0) && rho(1, h0) < rho(2, h1) && rho(2, h1) < sigma_next
}

/// Widest `(h0, h1)` satisfying the window chain with a 5% margin on every
/// inequality. `sigma_next` is the smallest base eigenvalue strictly above
/// `sigma1`.
///
/// With margin `m` the constraints read `h0 ≤ π√(1−m)/√(2σ₁)`,
/// `h1 ≥ π/√(2(1−m)σ₁)`, `h1 ≥ 2π/√(2(1−m)σ_next)` and `h1 ≤ 2√(1−m)·h0`;
/// `h1 − h0` is maximal at the largest `h0`.
pub fn admissible_window(sigma1: f64, sigma_next: f64) -> Result<Window> {
    let hs = h_star(sigma1)?;
    if !(sigma_next > sigma1) || !sigma_next.is_finite() {
        return Err(Error::InfeasibleWindow(format!(
            "need sigma_next > sigma_1, got {sigma_next} <= {sigma1}"
        )));
    }
    let q = 1.0 - WINDOW_MARGIN;
    let h0 = PI * q.sqrt() / (2.0 * sigma1).sqrt();
    let h1 = 2.0 * q.sqrt() * h0;
    let lower_a = PI / (2.0 * q * sigma1).sqrt();
    let lower_c = 2.0 * PI / (2.0 * q * sigma_next).sqrt();
    if h1 < lower_a.max(lower_c) {
        return Err(Error::InfeasibleWindow(format!(
            "no (h0, h1) with 5% margins: need h1 >= {:.6}, but h1 <= {h1:.6}",
            lower_a.max(lower_c)
        )));
    }
    Ok(Window { h0, h1, h_star: hs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dirichlet_rectangle_values() {
        let v = rectangle_spectrum(0.2, 1.0, RectCondition::DirichletOnI, 4).unwrap();
        // frozen from a 30-digit evaluation of the closed forms
        for (x, want) in v.iter().zip([4.778616783, 17.49531922, 34.70008150, 51.63421157]) {
            assert!(close(*x, want, 1e-8 * want), "{x} vs {want}");
        }
        let mu1 = PI / 0.2;
        assert!(close(mu1, 15.70796, 1e-5));
        assert!(close((0.02 * 15.70796f64).tanh(), 0.3042162, 1e-7));
    }

    #[test]
    fn neumann_rectangle_values() {
        let v = rectangle_spectrum(0.2, 1.0, RectCondition::NeumannOnI, 2).unwrap();
        assert_eq!(v[0], 0.0);
        assert!(close(v[1], 4.778616783, 1e-8));
        // odd j = 0 mode (the function x) sits at 2/ε²
        let all = rectangle_modes(0.2, 1.0, RectCondition::NeumannOnI, 12).unwrap();
        assert!(all.iter().any(|m| m.family == Family::G && m.j == 0 && close(m.value, 50.0, 1e-12)));
    }

    #[test]
    fn dirichlet_ground_equals_first_neumann() {
        for (e, h) in [(0.2, 1.0), (0.15, 2.2), (0.05, 3.0)] {
            let d = rectangle_spectrum(e, h, RectCondition::DirichletOnI, 1).unwrap()[0];
            let n = rectangle_spectrum(e, h, RectCondition::NeumannOnI, 2).unwrap()[1];
            assert_eq!(d, n);
        }
    }

    #[test]
    fn limit_values() {
        assert!(close(limit_rectangle_eig(1, 1.0).unwrap(), 4.934802, 1e-6));
        assert!(close(limit_rectangle_eig(1, 2.5).unwrap(), 0.789568, 1e-6));
        assert!(limit_rectangle_eig(0, 1.0).is_err());
        assert!(limit_rectangle_eig(-1, 1.0).is_err());
        let seq: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&e| rectangle_mode(e, 1.0, Family::F, 1).value)
            .collect();
        for (x, want) in seq.iter().zip([4.778616783, 4.894611697, 4.924680394]) {
            assert!(close(*x, want, 1e-8), "{x}");
        }
        assert!(seq.windows(2).all(|w| w[0] < w[1]) && seq[2] < 4.934802);
    }

    #[test]
    fn family_ordering() {
        for &e in &[0.4, 0.2, 0.1, 0.05] {
            for j in 1..=10 {
                let f = rectangle_mode(e, 1.7, Family::F, j).value;
                let g = rectangle_mode(e, 1.7, Family::G, j).value;
                assert!(g > f);
                assert!(rectangle_mode(e, 1.7, Family::F, j + 1).value > f);
                assert!(rectangle_mode(e, 1.7, Family::G, j + 1).value > g);
            }
        }
        let fs: Vec<f64> = [0.4, 0.2, 0.1, 0.05].iter().map(|&e| rectangle_mode(e, 1.7, Family::F, 1).value).collect();
        assert!(fs.windows(2).all(|w| w[0] < w[1]));
        let rho = limit_rectangle_eig(1, 1.7).unwrap();
        assert!(rectangle_mode(0.05, 1.7, Family::G, 1).value > 10.0 * rho);
    }

    #[test]
    fn disk_and_limit_spectrum() {
        assert_eq!(disk_spectrum(5), vec![0.0, 1.0, 1.0, 2.0, 2.0]);
        // base known up to sigma = 2 only
        let l = limit_spectrum(&disk_spectrum(5), 2.5, 7).unwrap();
        for (x, want) in l.iter().zip([0.0, 0.789568, 1.0, 1.0, 2.0, 2.0, 3.158274]) {
            assert!(close(*x, want, 1e-6), "{l:?}");
        }
        // with the full disk spectrum sigma = 3 comes before rho_2(2.5)
        let full = limit_spectrum(&disk_spectrum(20), 2.5, 8).unwrap();
        assert_eq!(&full[6..], &[3.0, 3.0]);
        let hs = h_star(1.0).unwrap();
        let at = limit_spectrum(&disk_spectrum(10), hs, 4).unwrap();
        assert!(close(at[1], 1.0, 1e-12) && close(at[2], 1.0, 1e-12));
        assert!(limit_spectrum(&[1.0, 0.0], 1.0, 2).is_err());
    }

    #[test]
    fn window_for_disk() {
        assert!(close(h_star(1.0).unwrap(), 2.221441, 1e-6));
        assert!(window_holds(2.0, 3.3, 1.0, 2.0));
        let w = admissible_window(1.0, 2.0).unwrap();
        assert!(window_holds(w.h0, w.h1, 1.0, 2.0));
        assert!(w.h0 < w.h_star && w.h_star < w.h1);
        assert!(close(w.h0, 2.165193315, 1e-8) && close(w.h1, 4.220738791, 1e-8), "{w:?}");
        assert!(matches!(admissible_window(1.0, 1.0), Err(Error::InfeasibleWindow(_))));
        // σ_next just above σ_1 leaves no room for ρ_2(h1) < σ_next
        assert!(matches!(admissible_window(1.0, 1.05), Err(Error::InfeasibleWindow(_))));
    }
}
