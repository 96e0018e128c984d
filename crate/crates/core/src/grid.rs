//! Uniform 1D grids, nodal fields and the discrete operators used by the
//! solver: mirror-closed Neumann Laplacian, second-order gradient and the
//! trapezoid rule.
//!
//! The trapezoid weights `(h/2, h, ..., h, h/2)` and the mirror stencil are
//! paired on purpose: the weighted sum of any discrete Laplacian telescopes
//! to zero, which is the discrete form of `∫ Δw dx = 0` under no-flux
//! boundaries.

use std::ops::{Add, Div, Mul, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field has {got} values, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field value at node {node} is not finite")]
    NonFinite { node: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Closed interval `[x0, x1]` split into `n_cells` equal cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x0: f64,
    x1: f64,
    n_cells: usize,
}

impl GridSpec {
    pub const MIN_CELLS: usize = 8;
    pub const DEFAULT_CELLS: usize = 512;

    pub fn new(x0: f64, x1: f64, n_cells: usize) -> Result<Self, GridError> {
        if !(x0.is_finite() && x1.is_finite()) || x1 <= x0 {
            return Err(GridError::InvalidGrid(format!(
                "need finite x0 < x1, got [{x0}, {x1}]"
            )));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(GridError::InvalidGrid(format!(
                "need at least {} cells, got {n_cells}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self { x0, x1, n_cells })
    }

    /// The unit interval with `n_cells` cells.
    pub fn unit(n_cells: usize) -> Result<Self, GridError> {
        Self::new(0.0, 1.0, n_cells)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn h(&self) -> f64 {
        (self.x1 - self.x0) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x1
        } else {
            self.x0 + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |i| self.node(i))
    }

    /// Same interval with the cell count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_cells: self.n_cells * factor,
            ..*self
        }
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_cells {
            0.5 * self.h()
        } else {
            self.h()
        }
    }
}

/// Nodal values of a function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.n_nodes() {
            return Err(GridError::LengthMismatch {
                expected: grid.n_nodes(),
                got: values.len(),
            });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { node });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.n_nodes()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise combination of two fields on the same grid.
    ///
    /// Panics if the grids differ; use [`ScalarField::same_grid`] first when
    /// the inputs are not known to match.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.same_grid(other), "fields live on different grids");
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn powf(&self, p: f64) -> Self {
        self.map(|v| v.powf(p))
    }

    /// `(max - min) / max |.|`, zero for the zero field.
    pub fn relative_range(&self) -> f64 {
        let scale = self.sup_norm();
        if scale == 0.0 {
            0.0
        } else {
            (self.max() - self.min()) / scale
        }
    }
}

macro_rules! field_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a ScalarField> for &'a ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &'a ScalarField) -> ScalarField {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}

field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);
field_binop!(Div, div, /);

/// Discrete Laplacian with homogeneous Neumann closure by mirror ghosts
/// `w[-1] = w[1]`, `w[N+1] = w[N-1]`.
pub fn neumann_laplacian(w: &ScalarField) -> ScalarField {
    let n = w.grid.n_cells();
    let inv_h2 = 1.0 / (w.grid.h() * w.grid.h());
    let v = &w.values;
    let mut out = vec![0.0; n + 1];
    out[0] = 2.0 * (v[1] - v[0]) * inv_h2;
    for i in 1..n {
        out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
    }
    out[n] = 2.0 * (v[n - 1] - v[n]) * inv_h2;
    ScalarField {
        grid: w.grid,
        values: out,
    }
}

/// Central differences inside, second-order one-sided stencils at the ends.
pub fn gradient(f: &ScalarField) -> ScalarField {
    let n = f.grid.n_cells();
    let inv_2h = 0.5 / f.grid.h();
    let v = &f.values;
    let mut out = vec![0.0; n + 1];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv_2h;
    for i in 1..n {
        out[i] = (v[i + 1] - v[i - 1]) * inv_2h;
    }
    out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) * inv_2h;
    ScalarField {
        grid: f.grid,
        values: out,
    }
}

/// Trapezoid rule over the whole grid.
pub fn integrate(f: &ScalarField) -> f64 {
    let n = f.grid.n_cells();
    let v = &f.values;
    let interior: f64 = v[1..n].iter().sum();
    f.grid.h() * (0.5 * (v[0] + v[n]) + interior)
}

pub fn inf_norm_diff(a: &ScalarField, b: &ScalarField) -> Result<f64, GridError> {
    if !a.same_grid(b) {
        return Err(GridError::GridMismatch);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// `sqrt(∫ f² dx)` by the trapezoid rule.
pub fn l2_norm(f: &ScalarField) -> f64 {
    integrate(&f.map(|v| v * v)).sqrt()
}
