#![allow(dead_code)]

use steklov_core::mesh::{
    align_arc, glue, make_annulus_mesh, BoundaryArc, DiskBuilder, GlueSpec, Mesh,
};
use steklov_core::numerics::DenseSym;

/// Base with two aligned arcs of length `ε²` on either one boundary chain
/// (disk, angles 0 and π) or two chains (annulus, one arc on each).
pub fn base_with_arcs(epsilon: f64, same_component: bool, nx: usize) -> (Mesh, BoundaryArc, BoundaryArc) {
    let w = epsilon * epsilon;
    if same_component {
        let (m, arcs) = DiskBuilder::new(6, 48)
            .with_arc(0.0, w, nx)
            .with_arc(std::f64::consts::PI, w, nx)
            .build()
            .unwrap();
        (m, arcs[0], arcs[1])
    } else {
        let m = make_annulus_mesh(0.5, 4, 48).unwrap();
        let a1 = BoundaryArc { chain: 0, s0: 0.0, s1: w, reversed: false };
        let a2 = BoundaryArc { chain: 1, s0: 0.0, s1: w, reversed: false };
        let m = align_arc(&m, &a1, nx, "arc1").unwrap();
        let m = align_arc(&m, &a2, nx, "arc2").unwrap();
        (m, a1, a2)
    }
}

pub fn glued(epsilon: f64, h: f64, same_component: bool, reverse: bool) -> (Mesh, Mesh) {
    let (base, arc1, arc2) = base_with_arcs(epsilon, same_component, 4);
    let g = glue(
        &base,
        &GlueSpec { epsilon, h, arc1, arc2, reverse_orientation: reverse, nx: 4, ny: 24 },
    )
    .unwrap();
    (base, g)
}

/// Number of eigenvalues of the pencil `(S, B)` below `x`, by Sylvester's
/// law of inertia applied to an LDLᵀ factorization of `S − xB`.
pub fn count_below(s: &DenseSym, b: &DenseSym, x: f64) -> usize {
    let n = s.dim();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s.get(i, j) - x * b.get(i, j)).collect()).collect();
    let mut negatives = 0;
    for k in 0..n {
        let d = a[k][k];
        if d < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = a[i][k] / d;
            for j in k + 1..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    negatives
}

/// All eigenvalues of the pencil by inertia bisection.
pub fn brute_force_eigenvalues(s: &DenseSym, b: &DenseSym) -> Vec<f64> {
    let n = s.dim();
    let bound = (0..n).map(|i| (0..n).map(|j| s.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max)
        / (0..n).map(|i| b.get(i, i)).fold(f64::INFINITY, f64::min)
        * 10.0
        + 1.0;
    (0..n)
        .map(|k| {
            // smallest x with count_below(x) > k
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(s, b, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
