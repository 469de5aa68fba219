//! Dense symmetric matrices and the definite generalized eigenproblem.

use crate::error::{invalid, Error, Result};

use super::sparse::PIVOT_TOL;

/// Symmetric matrix in packed lower-triangular storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSym {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        DenseSym { n, data: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.data[packed(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[packed(i, j)] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[packed(i, 0)..=packed(i, i)];
            let mut s = 0.0;
            for (j, &a) in row.iter().enumerate() {
                s += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
            y[i] += s;
        }
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    /// Row-major full copy.
    pub fn to_full(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }
}

/// Eigenpairs of `S y = σ B y`, values ascending, vectors B-orthonormal.
#[derive(Clone, Debug)]
pub struct GeneralizedEig {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Groups of consecutive indices whose values agree within
/// `1e-9 · max(1, |σ|)`.
pub fn multiplets(values: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (v - values[*g.last().unwrap()]).abs() <= 1e-9 * v.abs().max(1.0) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Dense Cholesky `B = L Lᵀ`, row-major lower factor.
fn cholesky(b: &DenseSym) -> Result<Vec<f64>> {
    let n = b.dim();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = b.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > PIVOT_TOL * b.get(j, j).abs()) || !d.is_finite() {
            return Err(Error::NotSpd { step: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut s = b.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(l)
}

/// First `count` eigenpairs of the definite pencil `(s, b)`.
///
/// Reduction `C = L⁻¹ S L⁻ᵀ` with `B = L Lᵀ`, Householder tridiagonalization,
/// implicit QL, back-transformation `y = L⁻ᵀ z`. Vectors inside a multiplet
/// are an arbitrary B-orthonormal basis of the eigenspace.
pub fn sym_generalized_eig(s: &DenseSym, b: &DenseSym, count: usize) -> Result<GeneralizedEig> {
    let n = s.dim();
    if b.dim() != n {
        return Err(invalid(format!("pencil orders differ: {} vs {}", n, b.dim())));
    }
    if count > n {
        return Err(invalid(format!("requested {count} eigenpairs of an order-{n} pencil")));
    }
    if n == 0 {
        return Ok(GeneralizedEig { values: Vec::new(), vectors: Vec::new() });
    }
    let l = cholesky(b)?;

    // W = L⁻¹ S, column by column (row-major n x n)
    let mut w = s.to_full();
    forward_solve_columns(&l, &mut w, n);
    // C = L⁻¹ Wᵀ
    let mut c = transpose(&w, n);
    forward_solve_columns(&l, &mut c, n);
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i * n + j] + c[j * n + i]);
            c[i * n + j] = avg;
            c[j * n + i] = avg;
        }
    }

    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut c, &mut d, &mut e, n);
    tql2(&mut c, &mut d, &mut e, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap());
    let mut values = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for &k in order.iter().take(count) {
        values.push(d[k]);
        let mut z: Vec<f64> = (0..n).map(|i| c[i * n + k]).collect();
        // y = L⁻ᵀ z
        for i in (0..n).rev() {
            let mut acc = z[i];
            for r in i + 1..n {
                acc -= l[r * n + i] * z[r];
            }
            z[i] = acc / l[i * n + i];
        }
        vectors.push(z);
    }
    Ok(GeneralizedEig { values, vectors })
}

fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Overwrite each column of row-major `x` with `L⁻¹ x`.
fn forward_solve_columns(l: &[f64], x: &mut [f64], n: usize) {
    for i in 0..n {
        let (done, rest) = x.split_at_mut(i * n);
        let row = &mut rest[..n];
        for k in 0..i {
            let lik = l[i * n + k];
            if lik != 0.0 {
                let xk = &done[k * n..k * n + n];
                for (r, &v) in row.iter_mut().zip(xk) {
                    *r -= lik * v;
                }
            }
        }
        let inv = 1.0 / l[i * n + i];
        for r in row.iter_mut() {
            *r *= inv;
        }
    }
}

/// Householder reduction to tridiagonal form (EISPACK tred2). On exit `v`
/// holds the orthogonal transform, `d` the diagonal, `e[1..]` the subdiagonal.
fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix (EISPACK tql2).
fn tql2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::NoConvergence(format!("QL iteration stalled at eigenvalue {l}")));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk1 = v[at(k, i + 1)];
                        let vk = v[at(k, i)];
                        v[at(k, i + 1)] = s * vk + c * vk1;
                        v[at(k, i)] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_pencil() {
        let s = DenseSym::from_diag(&[4.0, 0.0, 1.0]);
        let r = sym_generalized_eig(&s, &DenseSym::identity(3), 3).unwrap();
        assert_eq!(r.values.len(), 3);
        for (v, want) in r.values.iter().zip([0.0, 1.0, 4.0]) {
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_pencil() {
        let s = DenseSym::from_fn(2, |i, j| if i == j { 0.5 } else { -0.5 });
        let b = DenseSym::from_diag(&[0.5, 0.5]);
        let r = sym_generalized_eig(&s, &b, 2).unwrap();
        assert!(r.values[0].abs() < 1e-14);
        assert!((r.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let s = DenseSym::identity(2);
        assert!(matches!(sym_generalized_eig(&s, &s, 3), Err(Error::InvalidArgument(_))));
        let b = DenseSym::from_diag(&[1.0, -1.0]);
        assert!(matches!(sym_generalized_eig(&s, &b, 1), Err(Error::NotSpd { .. })));
    }

    #[test]
    fn random_pencil_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let g: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = DenseSym::from_fn(n, |i, j| g[i * n + j] + g[j * n + i]);
        let b = DenseSym::from_fn(n, |i, j| {
            let dot: f64 = (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum();
            dot + if i == j { 1.0 } else { 0.0 }
        });
        let r = sym_generalized_eig(&s, &b, n).unwrap();
        let sn = s.frobenius_norm();
        for (k, y) in r.vectors.iter().enumerate() {
            let sy = s.mul_vec(y);
            let by = b.mul_vec(y);
            let res: f64 = sy.iter().zip(&by).map(|(a, c)| (a - r.values[k] * c).powi(2)).sum::<f64>().sqrt();
            let yn: f64 = y.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(res <= 1e-8 * sn * yn, "residual {res}");
            for (m, z) in r.vectors.iter().enumerate() {
                let ip: f64 = by.iter().zip(z).map(|(a, c)| a * c).sum();
                let want = if k == m { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8);
            }
        }
        assert!(r.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn multiplet_grouping() {
        let g = multiplets(&[0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0 + 1e-6]);
        assert_eq!(g, vec![vec![0], vec![1, 2], vec![3], vec![4]]);
    }
}
