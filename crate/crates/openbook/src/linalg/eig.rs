//! Eigenvalue routines: a cyclic Jacobi solver for small dense symmetric
//! matrices and shift-inverted subspace iteration for the generalized
//! problem K v = lambda M v with K symmetric and M positive definite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::band::BandCholesky;
use super::csr::{dot, Csr};

/// Eigendecomposition of a small dense symmetric matrix (row-major, n*n).
/// Returns eigenvalues in ascending order with matching eigenvectors
/// (`vectors[k]` is the k-th eigenvector).
pub fn symmetric_eig_dense(n: usize, a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        let frob = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        if off.sqrt() < 1e-300_f64.max(1e-15 * frob) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    1.0 / (theta - (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    (values, vectors)
}

/// Smallest `k` eigenpairs of K v = lambda M v by subspace iteration on
/// (K + shift M)^{-1} M. The shift must make K + shift*M positive definite.
/// Vectors are returned M-orthonormal; eigenvalues ascend.
pub fn smallest_eigenpairs(
    k_mat: &Csr,
    m_mat: &Csr,
    count: usize,
    shift: f64,
    seed: u64,
) -> Result<Vec<(f64, Vec<f64>)>, String> {
    let n = k_mat.dim();
    assert_eq!(m_mat.dim(), n);
    if count == 0 || count >= n {
        return Err(format!("eigenpair count {count} out of range for {n} unknowns"));
    }
    let dim = (count + 2).min(n);
    let shifted = Csr::linear_combination(&[(1.0, k_mat), (shift, m_mat)]);
    let solver = BandCholesky::new(&shifted)
        .map_err(|e| format!("shifted operator factorization failed: {e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    m_orthonormalize(&mut basis, m_mat)?;

    let mut prev = vec![f64::INFINITY; dim];
    let mut stable = 0usize;
    for _ in 0..500 {
        let mut next: Vec<Vec<f64>> = basis
            .iter()
            .map(|x| solver.solve(&m_mat.mul_vec(x)))
            .collect();
        m_orthonormalize(&mut next, m_mat)?;
        // Rayleigh-Ritz in the M-orthonormal basis.
        let kv: Vec<Vec<f64>> = next.iter().map(|x| k_mat.mul_vec(x)).collect();
        let mut h = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in a..dim {
                let entry = 0.5 * (dot(&next[a], &kv[b]) + dot(&next[b], &kv[a]));
                h[a * dim + b] = entry;
                h[b * dim + a] = entry;
            }
        }
        let (theta, w) = symmetric_eig_dense(dim, &h);
        let mut rotated: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for col in 0..dim {
            let mut v = vec![0.0; n];
            for a in 0..dim {
                let c = w[col][a];
                for i in 0..n {
                    v[i] += c * next[a][i];
                }
            }
            rotated.push(v);
        }
        basis = rotated;
        let worst = theta
            .iter()
            .zip(&prev)
            .take(count)
            .map(|(t, p)| (t - p).abs() / (t.abs() + shift.abs()).max(1e-30))
            .fold(0.0f64, f64::max);
        prev = theta;
        if worst < 1e-13 {
            stable += 1;
            if stable >= 2 {
                break;
            }
        } else {
            stable = 0;
        }
    }
    Ok(prev
        .iter()
        .take(count)
        .zip(basis)
        .map(|(&l, v)| (l, v))
        .collect())
}

/// Modified Gram-Schmidt in the M inner product.
fn m_orthonormalize(vectors: &mut [Vec<f64>], m_mat: &Csr) -> Result<(), String> {
    for i in 0..vectors.len() {
        for j in 0..i {
            let mj = m_mat.mul_vec(&vectors[j]);
            let proj = dot(&vectors[i], &mj);
            let (head, tail) = vectors.split_at_mut(i);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= proj * y;
            }
        }
        let norm = m_mat.quadratic_form(&vectors[i]).sqrt();
        if !(norm > 1e-150) {
            return Err("rank-deficient subspace during M-orthonormalization".into());
        }
        for x in vectors[i].iter_mut() {
            *x /= norm;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_matches_hand_computed_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let (vals, vecs) = symmetric_eig_dense(2, &[2.0, 1.0, 1.0, 2.0]);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vecs[0][0] + vecs[0][1]).abs() < 1e-10);
    }

    #[test]
    fn subspace_iteration_finds_dirichlet_laplacian_modes() {
        // 1-d Dirichlet Laplacian: eigenvalues of tridiag(-1,2,-1)/h^2 vs 4 sin^2.
        let n = 120;
        let h = 1.0 / (n as f64 + 1.0);
        let mut t = Vec::new();
        let mut tm = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 / (h * h)));
            tm.push((i, i, 1.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0 / (h * h)));
                t.push((i + 1, i, -1.0 / (h * h)));
            }
        }
        let k = Csr::from_triplets(n, &t);
        let m = Csr::from_triplets(n, &tm);
        let pairs = smallest_eigenpairs(&k, &m, 3, 1.0, 7).unwrap();
        for (idx, (lambda, _)) in pairs.iter().enumerate() {
            let mode = (idx + 1) as f64;
            let exact = (2.0 / h * (mode * std::f64::consts::PI * h / 2.0).sin()).powi(2);
            assert!(
                (lambda - exact).abs() < 1e-7 * exact,
                "mode {idx}: {lambda} vs {exact}"
            );
        }
    }

    #[test]
    fn handles_singular_stiffness_with_positive_shift() {
        // Neumann-like chain: kernel is the constant vector, lambda_1 = 0.
        let n = 40;
        let mut t = Vec::new();
        let mut tm = Vec::new();
        for i in 0..n {
            let mut diag = 0.0;
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
                diag += 1.0;
            }
            if i > 0 {
                diag += 1.0;
            }
            t.push((i, i, diag));
            tm.push((i, i, 1.0));
        }
        let k = Csr::from_triplets(n, &t);
        let m = Csr::from_triplets(n, &tm);
        let pairs = smallest_eigenpairs(&k, &m, 2, 1.0, 3).unwrap();
        assert!(pairs[0].0.abs() < 1e-10);
        assert!(pairs[1].0 > 1e-4);
    }
}
