//! Direct solver for sparse symmetric positive definite systems.
//!
//! The matrices assembled on page meshes have small bandwidth once reordered,
//! so a reverse Cuthill-McKee permutation followed by a banded Cholesky
//! factorization is both simple and fast, and fully deterministic.

use super::csr::Csr;

/// Reverse Cuthill-McKee ordering of the sparsity pattern.
/// Returns `perm` with `perm[new] = old`. Handles disconnected patterns by
/// restarting from the lowest-degree unvisited node.
pub fn reverse_cuthill_mckee(a: &Csr) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    loop {
        let start = match (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)) {
            Some(s) => s,
            None => break,
        };
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut neighbors: Vec<usize> = a
                .row(u)
                .map(|(j, _)| j)
                .filter(|&j| j != u && !visited[j])
                .collect();
            neighbors.sort_by_key(|&j| (degree[j], j));
            for j in neighbors {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Banded Cholesky factorization of a permuted SPD matrix.
pub struct BandCholesky {
    n: usize,
    bandwidth: usize,
    /// Lower factor, stored as `band[d][j] = L[j+d, j]` for diagonals d = 0..=bandwidth.
    band: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl BandCholesky {
    /// Factors `a`, which must be symmetric positive definite.
    pub fn new(a: &Csr) -> Result<Self, String> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv_perm[old] = new;
        }
        let mut bandwidth = 0usize;
        for i in 0..n {
            for (j, _) in a.row(i) {
                let d = inv_perm[i].abs_diff(inv_perm[j]);
                bandwidth = bandwidth.max(d);
            }
        }
        let mut band = vec![vec![0.0; n]; bandwidth + 1];
        for i in 0..n {
            for (j, v) in a.row(i) {
                let (pi, pj) = (inv_perm[i], inv_perm[j]);
                if pi >= pj {
                    band[pi - pj][pj] = v;
                }
            }
        }
        // In-place banded Cholesky: column j updates columns j+1..=j+bandwidth.
        for j in 0..n {
            let mut diag = band[0][j];
            for d in 1..=bandwidth.min(j) {
                let l = band[d][j - d];
                diag -= l * l;
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(format!("matrix is not positive definite (pivot {diag:e} at column {j})"));
            }
            let diag = diag.sqrt();
            band[0][j] = diag;
            for i in (j + 1)..n.min(j + bandwidth + 1) {
                let mut v = band[i - j][j];
                let dmax = bandwidth.min(j);
                for d in 1..=dmax {
                    let k = j - d;
                    if i - k <= bandwidth {
                        v -= band[i - k][k] * band[d][k];
                    }
                }
                band[i - j][j] = v / diag;
            }
        }
        Ok(BandCholesky { n, bandwidth, band, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let bw = self.bandwidth;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = b[self.perm[i]];
        }
        // Forward substitution L y = Pb.
        for j in 0..n {
            let yj = y[j] / self.band[0][j];
            y[j] = yj;
            for i in (j + 1)..n.min(j + bw + 1) {
                y[i] -= self.band[i - j][j] * yj;
            }
        }
        // Backward substitution L' x = y.
        for j in (0..n).rev() {
            let mut v = y[j];
            for i in (j + 1)..n.min(j + bw + 1) {
                v -= self.band[i - j][j] * y[i];
            }
            y[j] = v / self.band[0][j];
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_plus_identity(n: usize) -> Csr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        Csr::from_triplets(n, &t)
    }

    #[test]
    fn solves_tridiagonal_system() {
        let a = laplacian_plus_identity(50);
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = BandCholesky::new(&a).unwrap().solve(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn solves_shuffled_grid_system() {
        // 2-d grid Laplacian + I under a scrambled numbering exercises the RCM path.
        let (nx, ny) = (9, 7);
        let n = nx * ny;
        let shuffle = |i: usize| (i * 29) % n;
        let mut t = Vec::new();
        for ix in 0..nx {
            for iy in 0..ny {
                let i = shuffle(ix * ny + iy);
                t.push((i, i, 5.0));
                if ix + 1 < nx {
                    let j = shuffle((ix + 1) * ny + iy);
                    t.push((i, j, -1.0));
                    t.push((j, i, -1.0));
                }
                if iy + 1 < ny {
                    let j = shuffle(ix * ny + iy + 1);
                    t.push((i, j, -1.0));
                    t.push((j, i, -1.0));
                }
            }
        }
        let a = Csr::from_triplets(n, &t);
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let b = a.mul_vec(&x_true);
        let x = BandCholesky::new(&a).unwrap().solve(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let a = Csr::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(BandCholesky::new(&a).is_err());
    }
}
