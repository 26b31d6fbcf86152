//! Compressed sparse row matrices, sized for the meshes produced by this crate.

/// Square sparse matrix in CSR layout. Entries within a row are sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    /// Builds an `n`×`n` matrix from unsorted triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut cursor = counts.clone();
        for &(i, j, v) in triplets {
            let k = cursor[i];
            cols[k] = j;
            vals[k] = v;
            cursor[i] += 1;
        }
        // Sort each row by column and merge duplicates in place.
        let mut row_ptr = vec![0usize; n + 1];
        let mut out_cols = Vec::with_capacity(triplets.len());
        let mut out_vals = Vec::with_capacity(triplets.len());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            scratch.clear();
            for k in counts[i]..counts[i + 1] {
                scratch.push((cols[k], vals[k]));
            }
            scratch.sort_by_key(|&(c, _)| c);
            let mut iter = scratch.iter().peekable();
            while let Some(&(c, v)) = iter.next() {
                let mut acc = v;
                while let Some(&&(c2, v2)) = iter.peek() {
                    if c2 == c {
                        acc += v2;
                        iter.next();
                    } else {
                        break;
                    }
                }
                out_cols.push(c);
                out_vals.push(acc);
            }
            row_ptr[i + 1] = out_cols.len();
        }
        Csr {
            n,
            row_ptr,
            col_idx: out_cols,
            values: out_vals,
        }
    }

    /// All-zero matrix with no stored entries.
    pub fn zeros(n: usize) -> Self {
        Csr {
            n,
            row_ptr: vec![0; n + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    /// x' A x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.values[k] * x[self.col_idx[k]];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// Sum of `coeff * matrix` terms; all operands must share the dimension.
    pub fn linear_combination(terms: &[(f64, &Csr)]) -> Csr {
        assert!(!terms.is_empty());
        let n = terms[0].1.n;
        let mut triplets = Vec::new();
        for &(c, m) in terms {
            assert_eq!(m.n, n);
            if c == 0.0 {
                continue;
            }
            for i in 0..n {
                for (j, v) in m.row(i) {
                    triplets.push((i, j, c * v));
                }
            }
        }
        Csr::from_triplets(n, &triplets)
    }

    /// Row sums (used for mass lumping).
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    /// Maximum absolute asymmetry |a_ij - a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let vt = self.get(j, i);
                worst = worst.max((v - vt).abs());
            }
        }
        worst
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_duplicates() {
        let a = Csr::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0), (0, 1, 4.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(0, 1), 4.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn matvec_and_quadratic_form_agree() {
        let a = Csr::from_triplets(3, &[(0, 0, 2.0), (1, 1, 3.0), (2, 2, 4.0), (0, 2, 1.0), (2, 0, 1.0)]);
        let x = vec![1.0, -2.0, 0.5];
        let y = a.mul_vec(&x);
        assert_eq!(dot(&x, &y), a.quadratic_form(&x));
    }

    #[test]
    fn linear_combination_matches_dense() {
        let a = Csr::from_triplets(2, &[(0, 0, 1.0), (1, 1, 2.0)]);
        let b = Csr::from_triplets(2, &[(0, 1, 1.0), (1, 0, 1.0)]);
        let c = Csr::linear_combination(&[(2.0, &a), (-1.0, &b)]);
        assert_eq!(c.get(0, 0), 2.0);
        assert_eq!(c.get(0, 1), -1.0);
        assert_eq!(c.get(1, 0), -1.0);
        assert_eq!(c.get(1, 1), 4.0);
    }
}
