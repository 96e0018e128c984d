/// Tridiagonal matrix of order `n`.
///
/// `sub[i]` is entry `(i + 1, i)`, `sup[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

/// Pivot smaller than this fraction of its row's largest entry is treated
/// as singular.
pub const PIVOT_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("singular tridiagonal system (pivot breakdown at row {row})")]
pub struct SingularMatrix {
    pub row: usize,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(sub.len() + 1, diag.len(), "sub-diagonal length");
        assert_eq!(sup.len() + 1, diag.len(), "super-diagonal length");
        Self { sub, diag, sup }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![0.0; n - 1], vec![1.0; n], vec![0.0; n - 1])
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    fn row_magnitude(&self, i: usize) -> f64 {
        let mut m = self.diag[i].abs();
        if i > 0 {
            m = m.max(self.sub[i - 1].abs());
        }
        if i < self.sup.len() {
            m = m.max(self.sup[i].abs());
        }
        m
    }

    /// Solves `self * x = rhs` by forward elimination and back substitution
    /// (Thomas algorithm, no pivoting).
    pub fn thomas_solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SingularMatrix> {
        let n = self.order();
        assert_eq!(rhs.len(), n, "right-hand side length");
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];

        let mut pivot = self.diag[0];
        let guard = |row: usize, pivot: f64| {
            let mag = self.row_magnitude(row);
            if mag == 0.0 || pivot.abs() < PIVOT_RTOL * mag || !pivot.is_finite() {
                Err(SingularMatrix { row })
            } else {
                Ok(())
            }
        };
        guard(0, pivot)?;
        if n > 1 {
            c[0] = self.sup[0] / pivot;
        }
        x[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * c[i - 1];
            guard(i, pivot)?;
            if i + 1 < n {
                c[i] = self.sup[i] / pivot;
            }
            x[i] = (rhs[i] - self.sub[i - 1] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}
