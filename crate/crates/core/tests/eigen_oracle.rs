mod common;

use common::brute_force_eigenvalues;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steklov_core::numerics::{sym_generalized_eig, DenseSym};

fn random_spd(n: usize, rng: &mut impl Rng) -> DenseSym {
    let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseSym::from_fn(n, |i, j| {
        (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
    })
}

#[test]
fn small_pencils_match_inertia_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (s, b) = (random_spd(6, &mut rng), random_spd(6, &mut rng));
        let eig = sym_generalized_eig(&s, &b, 6).unwrap();
        let oracle = brute_force_eigenvalues(&s, &b);
        for (x, y) in eig.values.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-8 * y.abs().max(1.0), "{x} vs {y}");
        }
        let sn = s.frobenius_norm();
        for (sigma, y) in eig.values.iter().zip(&eig.vectors) {
            let (sy, by) = (s.mul_vec(y), b.mul_vec(y));
            let r = sy.iter().zip(&by).map(|(a, c)| (a - sigma * c).powi(2)).sum::<f64>().sqrt();
            let yn = y.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(r <= 1e-8 * sn * yn);
        }
        for i in 0..6 {
            let bi = b.mul_vec(&eig.vectors[i]);
            for j in 0..6 {
                let g: f64 = eig.vectors[j].iter().zip(&bi).map(|(a, c)| a * c).sum();
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn oracle_sanity() {
    let s = DenseSym::from_diag(&[0.0, 1.0, 4.0]);
    let v = brute_force_eigenvalues(&s, &DenseSym::identity(3));
    for (x, y) in v.iter().zip([0.0, 1.0, 4.0]) {
        assert!((x - y).abs() < 1e-12);
    }
    let s = DenseSym::from_fn(2, |i, j| if i == j { 0.5 } else { -0.5 });
    let b = DenseSym::from_diag(&[0.5, 0.5]);
    let v = brute_force_eigenvalues(&s, &b);
    assert!(v[0].abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
}
