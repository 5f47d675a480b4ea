use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pointconfig::grid_cell;

/// Symmetric jump intensity `c(x, y)` on `[0,1)`, with `c(x, x) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConductanceFn {
    Constant { kappa: f64 },
    /// `c(x, y) = d[i][j]` for `x` in grid cell `i` and `y` in grid cell `j` of the
    /// uniform grid with `d.len()` cells.
    PiecewiseConstant { d: Vec<Vec<f64>> },
}

impl ConductanceFn {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConductanceFn::Constant { kappa } => {
                if !(kappa.is_finite() && *kappa >= 0.0) {
                    return Err(invalid(format!("kappa must be finite and nonnegative, got {kappa}")));
                }
            }
            ConductanceFn::PiecewiseConstant { d } => {
                let k = d.len();
                if k == 0 || d.iter().any(|row| row.len() != k) {
                    return Err(invalid("conductance levels must form a nonempty square matrix"));
                }
                for i in 0..k {
                    for j in 0..k {
                        let v = d[i][j];
                        if !(v.is_finite() && v >= 0.0) {
                            return Err(invalid(format!("conductance d[{i}][{j}] = {v} is not a finite nonnegative number")));
                        }
                        if v != d[j][i] {
                            return Err(invalid(format!("conductance levels are not symmetric at ({i}, {j})")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of cells of the uniform grid the function is constant on.
    pub fn grid_len(&self) -> usize {
        match self {
            ConductanceFn::Constant { .. } => 1,
            ConductanceFn::PiecewiseConstant { d } => d.len(),
        }
    }

    pub fn cell_of(&self, x: f64) -> usize {
        grid_cell(x, self.grid_len())
    }

    /// Level on the product of grid cells `i` and `j`.
    pub fn level(&self, i: usize, j: usize) -> f64 {
        match self {
            ConductanceFn::Constant { kappa } => *kappa,
            ConductanceFn::PiecewiseConstant { d } => d[i][j],
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if x == y {
            0.0
        } else {
            self.level(self.cell_of(x), self.cell_of(y))
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            ConductanceFn::Constant { kappa } => *kappa,
            ConductanceFn::PiecewiseConstant { d } => d.iter().flatten().fold(0.0, |m, v| m.max(*v)),
        }
    }
}
