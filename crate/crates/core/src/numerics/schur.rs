use rayon::prelude::*;

use crate::assembly::SparseSym;
use crate::error::{invalid, Result};

use super::dense::DenseSym;
use super::sparse::{factor_spd, solve, Factor};

/// Split of the vertices into spectral (F), eliminated (E) and
/// constrained-to-zero (D) sets, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofPartition {
    f: Vec<usize>,
    e: Vec<usize>,
    d: Vec<usize>,
}

impl DofPartition {
    pub fn new(n: usize, mut f: Vec<usize>, mut e: Vec<usize>, mut d: Vec<usize>) -> Result<Self> {
        f.sort_unstable();
        e.sort_unstable();
        d.sort_unstable();
        if f.is_empty() {
            return Err(invalid("spectral set F is empty"));
        }
        let mut seen = vec![false; n];
        for &v in f.iter().chain(&e).chain(&d) {
            if v >= n {
                return Err(invalid(format!("partition references vertex {v} >= {n}")));
            }
            if seen[v] {
                return Err(invalid(format!("vertex {v} appears in two partition sets")));
            }
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(invalid(format!("vertex {v} is in no partition set")));
        }
        Ok(DofPartition { f, e, d })
    }

    pub fn spectral(&self) -> &[usize] {
        &self.f
    }

    pub fn eliminated(&self) -> &[usize] {
        &self.e
    }

    pub fn constrained(&self) -> &[usize] {
        &self.d
    }

    pub fn n_vertices(&self) -> usize {
        self.f.len() + self.e.len() + self.d.len()
    }
}

/// Schur complement onto F together with what is needed to extend
/// F-data harmonically into E.
#[derive(Debug)]
pub struct Condensation {
    pub s: DenseSym,
    factor: Option<Factor>,
    /// For each E index, the couplings `(F index, K_ef)`.
    k_ef: Vec<Vec<(usize, f64)>>,
}

impl Condensation {
    /// E-values of the discrete harmonic extension of F-data `y` (D held at 0).
    pub fn extend(&self, y: &[f64]) -> Result<Vec<f64>> {
        let Some(factor) = &self.factor else {
            return Ok(Vec::new());
        };
        let rhs: Vec<f64> = self
            .k_ef
            .iter()
            .map(|row| -row.iter().map(|&(j, v)| v * y[j]).sum::<f64>())
            .collect();
        solve(factor, &rhs)
    }

    /// Solve `K_EE x = rhs`.
    pub fn solve_interior(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.factor {
            Some(f) => solve(f, rhs),
            None => Ok(Vec::new()),
        }
    }
}

/// `S = K_FF − K_FE K_EE⁻¹ K_EF`, symmetrized.
pub fn schur_complement(k: &SparseSym, p: &DofPartition) -> Result<DenseSym> {
    Ok(condense(k, p)?.s)
}

pub fn condense(k: &SparseSym, p: &DofPartition) -> Result<Condensation> {
    let n = k.dim();
    if p.n_vertices() != n {
        return Err(invalid(format!("partition covers {} vertices, matrix has {n}", p.n_vertices())));
    }
    const NONE: usize = usize::MAX;
    let mut f_pos = vec![NONE; n];
    let mut e_pos = vec![NONE; n];
    for (i, &v) in p.f.iter().enumerate() {
        f_pos[v] = i;
    }
    for (i, &v) in p.e.iter().enumerate() {
        e_pos[v] = i;
    }
    let nf = p.f.len();
    let mut s = DenseSym::zeros(nf);
    let mut k_ef: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p.e.len()];
    let mut k_fe: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nf];
    for (r, c, v) in k.entries() {
        for (a, b) in [(r, c), (c, r)] {
            if f_pos[a] != NONE && f_pos[b] != NONE {
                if a <= b {
                    let (i, j) = (f_pos[a], f_pos[b]);
                    s.set(i, j, s.get(i, j) + v);
                }
            } else if f_pos[a] != NONE && e_pos[b] != NONE {
                k_fe[f_pos[a]].push((e_pos[b], v));
                k_ef[e_pos[b]].push((f_pos[a], v));
            }
            if r == c {
                break;
            }
        }
    }
    if p.e.is_empty() {
        return Ok(Condensation { s, factor: None, k_ef });
    }
    let factor = factor_spd(&k.principal(&p.e))?;
    let ne = p.e.len();
    let columns: Vec<Vec<f64>> = (0..nf)
        .into_par_iter()
        .map(|j| {
            let mut rhs = vec![0.0; ne];
            for &(e, v) in &k_fe[j] {
                rhs[e] = v;
            }
            let x = solve(&factor, &rhs)?;
            // column j of K_FE K_EE⁻¹ K_EF
            Ok((0..nf)
                .map(|i| k_fe[i].iter().map(|&(e, v)| v * x[e]).sum::<f64>())
                .collect())
        })
        .collect::<Result<_>>()?;
    for i in 0..nf {
        for j in 0..=i {
            let corr = 0.5 * (columns[j][i] + columns[i][j]);
            s.set(i, j, s.get(i, j) - corr);
        }
    }
    Ok(Condensation { s, factor: Some(factor), k_ef })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_elimination_gives_kff() {
        let k = SparseSym::from_triplets(2, vec![(0, 0, 2.0), (0, 1, -1.0), (1, 1, 3.0)]).unwrap();
        let p = DofPartition::new(2, vec![0, 1], vec![], vec![]).unwrap();
        let s = schur_complement(&k, &p).unwrap();
        assert_eq!((s.get(0, 0), s.get(0, 1), s.get(1, 1)), (2.0, -1.0, 3.0));
    }

    #[test]
    fn path_graph() {
        // 0 - 1 - 2 with unit weights, middle eliminated
        let k = SparseSym::from_triplets(
            3,
            vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 1.0), (0, 1, -1.0), (1, 2, -1.0)],
        )
        .unwrap();
        let p = DofPartition::new(3, vec![0, 2], vec![1], vec![]).unwrap();
        let s = schur_complement(&k, &p).unwrap();
        assert!((s.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((s.get(1, 1) - 0.5).abs() < 1e-15);
        assert!((s.get(0, 1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn partition_validation() {
        assert!(DofPartition::new(3, vec![], vec![0, 1, 2], vec![]).is_err());
        assert!(DofPartition::new(3, vec![0], vec![0, 1, 2], vec![]).is_err());
        assert!(DofPartition::new(3, vec![0], vec![1], vec![]).is_err());
        assert!(DofPartition::new(3, vec![0], vec![1], vec![5]).is_err());
    }
}
