//! Dense LU factorisation with partial pivoting for the small indefinite
//! systems Kriging produces (a few dozen unknowns).

/// Row-major LU factors of a square matrix, `P * A = L * U`, with unit-diagonal `L`
/// stored below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    min_pivot: f64,
}

impl LuFactors {
    /// Factors the `n x n` row-major `matrix`. Returns `None` if some pivot's
    /// magnitude falls below `pivot_tol`.
    pub fn factor(matrix: &[f64], n: usize, pivot_tol: f64) -> Option<Self> {
        assert_eq!(matrix.len(), n * n);
        let mut lu = matrix.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, max) = (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(max >= pivot_tol) {
                return None;
            }
            min_pivot = min_pivot.min(max);
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for r in k + 1..n {
                let f = lu[r * n + k] / pivot;
                lu[r * n + k] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        lu[r * n + c] -= f * lu[k * n + c];
                    }
                }
            }
        }
        Some(Self { n, lu, perm, min_pivot })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s / self.lu[r * n + r];
        }
        x
    }

    /// Solves and then applies `steps` rounds of iterative refinement against
    /// the original `matrix`.
    pub fn solve_refined(&self, matrix: &[f64], rhs: &[f64], steps: usize) -> Vec<f64> {
        let n = self.n;
        let mut x = self.solve(rhs);
        for _ in 0..steps {
            let residual: Vec<f64> = (0..n)
                .map(|r| rhs[r] - (0..n).map(|c| matrix[r * n + c] * x[c]).sum::<f64>())
                .collect();
            let dx = self.solve(&residual);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        x
    }
}
