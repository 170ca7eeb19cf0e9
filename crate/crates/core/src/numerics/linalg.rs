use crate::{Error, Result};

/// Largest order accepted by [`sym_eig`] and [`solve_spd`].
pub const MAX_ORDER: usize = 512;

/// Dense symmetric matrix, stored in full row-major form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    /// Builds the matrix from its upper triangle: `f(i, j)` is called for `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Rows must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::invalid(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v' M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `a * self + b * u u'`.
    pub fn scaled_plus_outer(&self, a: f64, b: f64, u: &[f64]) -> Self {
        Self::from_fn(self.n, |i, j| a * self.get(i, j) + b * u[i] * u[j])
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Column `k` of `vectors` (stored row-major, `vectors[i][k]`) pairs with `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.iter().map(|row| row[k]).collect()
    }
}

/// Cyclic Jacobi eigendecomposition.
pub fn sym_eig(m: &SymMatrix) -> Result<SymEigen> {
    let n = m.order();
    if n > MAX_ORDER {
        return Err(Error::invalid(format!("order {n} exceeds {MAX_ORDER}")));
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale = m.max_abs();
    if scale > 0.0 {
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq.abs() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = v.iter().map(|row| order.iter().map(|&k| row[k]).collect()).collect();
    Ok(SymEigen { values, vectors })
}

/// Solves `m v = b` by Cholesky factorization.
///
/// Fails with [`Error::IllConditioned`] when a pivot falls below
/// `1e-12` times the largest diagonal entry, the working proxy for the
/// smallest/largest eigenvalue ratio.
pub fn solve_spd(m: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = m.order();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    if n > MAX_ORDER {
        return Err(Error::invalid(format!("order {n} exceeds {MAX_ORDER}")));
    }
    let max_diag = (0..n).map(|i| m.get(i, i)).fold(0.0f64, f64::max);
    if !(max_diag > 0.0) {
        return Err(Error::IllConditioned);
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 1e-12 * max_diag) {
            return Err(Error::IllConditioned);
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng_uniform;

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        let mut u = rng_uniform(seed);
        SymMatrix::from_fn(n, |_, _| 2.0 * u.next_f64() - 1.0)
    }

    fn random_spd(n: usize, seed: u64) -> SymMatrix {
        let mut u = rng_uniform(seed);
        let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| 2.0 * u.next_f64() - 1.0).collect()).collect();
        SymMatrix::from_fn(n, |i, j| (0..n).map(|k| a[i][k] * a[j][k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 })
    }

    fn check_decomposition(m: &SymMatrix) {
        let n = m.order();
        let e = sym_eig(m).unwrap();
        let mut orth: f64 = 0.0;
        let mut recon: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| e.vectors[k][i] * e.vectors[k][j]).sum();
                orth = orth.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
                let r: f64 = (0..n).map(|k| e.vectors[i][k] * e.values[k] * e.vectors[j][k]).sum();
                recon = recon.max((r - m.get(i, j)).abs());
            }
        }
        assert!(orth <= 1e-10, "orthonormality {orth}");
        assert!(recon <= 1e-9 * m.max_abs(), "reconstruction {recon}");
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted_axis_aligned() {
        let e = sym_eig(&SymMatrix::diagonal(&[1.0, 4.0])).unwrap();
        assert_eq!(e.values, vec![4.0, 1.0]);
        assert_eq!(e.vector(0).iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
        assert_eq!(e.vector(1).iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![1.0, 0.0]);
    }

    #[test]
    fn random_reconstruction_many_seeds() {
        check_decomposition(&random_sym(8, 11));
        for seed in 0..100 {
            check_decomposition(&random_sym(2 + (seed as usize % 15), seed));
        }
    }

    #[test]
    fn large_order_still_accurate() {
        check_decomposition(&random_sym(60, 5));
    }

    #[test]
    fn rejects_oversize() {
        assert!(sym_eig(&SymMatrix::zeros(MAX_ORDER + 1)).is_err());
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = [1.5, -2.0, 3.25];
        assert_eq!(solve_spd(&SymMatrix::identity(3), &b).unwrap(), b.to_vec());
        let d = [2.0, 4.0, 0.5];
        let x = solve_spd(&SymMatrix::diagonal(&d), &b).unwrap();
        for i in 0..3 {
            assert!((x[i] - b[i] / d[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn solve_random_residual() {
        let m = random_spd(6, 3);
        let b: Vec<f64> = rng_uniform(4).take(6).collect();
        let x = solve_spd(&m, &b).unwrap();
        let r = m.mul_vec(&x);
        let bmax = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(r.iter().zip(&b).all(|(a, c)| (a - c).abs() <= 1e-9 * bmax));
    }

    #[test]
    fn solve_matches_eigen_inverse() {
        for seed in 0..40u64 {
            let n = 1 + (seed as usize % 16);
            let m = random_spd(n, seed + 100);
            let b: Vec<f64> = rng_uniform(seed + 200).take(n).map(|u| u - 0.5).collect();
            let x = solve_spd(&m, &b).unwrap();
            let e = sym_eig(&m).unwrap();
            // x = U diag(1/lambda) U' b
            let utb: Vec<f64> = (0..n).map(|k| (0..n).map(|i| e.vectors[i][k] * b[i]).sum()).collect();
            let y: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|k| e.vectors[i][k] * utb[k] / e.values[k]).sum())
                .collect();
            let xmax = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..n {
                assert!((x[i] - y[i]).abs() <= 1e-8 * xmax, "seed {seed}");
            }
        }
    }

    #[test]
    fn singular_is_ill_conditioned() {
        let m = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(solve_spd(&m, &[1.0, 1.0]), Err(Error::IllConditioned));
        let neg = SymMatrix::diagonal(&[1.0, -1.0]);
        assert_eq!(solve_spd(&neg, &[1.0, 1.0]), Err(Error::IllConditioned));
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).is_err());
    }
}
