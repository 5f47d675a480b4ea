use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::partition::SetPartition;
use super::point::{Point, Region};
use crate::error::{invalid, Error, Result};

/// Bounded function of a single location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Indicator(Region),
    /// Value per site; zero off the listed sites and on coordinates.
    SiteWeights(Vec<f64>),
    /// Step function on the uniform grid of `[0,1)` with `levels.len()` cells.
    CellLevels(Vec<f64>),
    Product(Vec<Factor>),
}

impl Factor {
    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            Factor::Indicator(r) => {
                if r.contains(p) {
                    1.0
                } else {
                    0.0
                }
            }
            Factor::SiteWeights(w) => match p {
                Point::Site(s) => w.get(*s).copied().unwrap_or(0.0),
                Point::Coord(_) => 0.0,
            },
            Factor::CellLevels(levels) => match p {
                Point::Coord(x) => levels[grid_cell(*x, levels.len())],
                Point::Site(_) => 0.0,
            },
            Factor::Product(fs) => fs.iter().map(|f| f.eval(p)).product(),
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            Factor::Indicator(_) => 1.0,
            Factor::SiteWeights(w) | Factor::CellLevels(w) => {
                w.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
            Factor::Product(fs) => fs.iter().map(Factor::bound).product(),
        }
    }

    /// Points of `[0,1)` where the factor may jump.
    pub(crate) fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Factor::Indicator(r) => r.breakpoints(out),
            Factor::SiteWeights(_) => {}
            Factor::CellLevels(levels) => {
                let n = levels.len();
                out.extend((0..=n).map(|k| k as f64 / n as f64));
            }
            Factor::Product(fs) => fs.iter().for_each(|f| f.breakpoints(out)),
        }
    }
}

/// Index of the uniform-grid cell of `[0,1)` containing `x`.
pub(crate) fn grid_cell(x: f64, cells: usize) -> usize {
    ((x * cells as f64) as usize).min(cells - 1)
}

type Evaluator = Arc<dyn Fn(&[Point]) -> f64 + Send + Sync>;

/// Bounded function of `n` locations, integrated against `eta^(n)`, `eta^{⊗n}` or `lambda_n`.
#[derive(Clone)]
pub enum SymmetricFunctionSpec {
    /// `f(x_1..x_n) = g_1(x_1) ... g_n(x_n)`.
    Tensor(Vec<Factor>),
    Generic {
        arity: usize,
        eval: Evaluator,
        bound: f64,
    },
}

impl fmt::Debug for SymmetricFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetricFunctionSpec::Tensor(factors) => f.debug_tuple("Tensor").field(factors).finish(),
            SymmetricFunctionSpec::Generic { arity, bound, .. } => f
                .debug_struct("Generic")
                .field("arity", arity)
                .field("bound", bound)
                .finish_non_exhaustive(),
        }
    }
}

impl SymmetricFunctionSpec {
    /// `1_{B_1}^{⊗d_1} ⊗ ... ⊗ 1_{B_N}^{⊗d_N}` for pairwise disjoint cells.
    pub fn tensor_indicator(cells: &[Region], degrees: &[usize]) -> Result<Self> {
        if cells.len() != degrees.len() {
            return Err(Error::DimensionMismatch { expected: cells.len(), got: degrees.len() });
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if !cells[i].is_disjoint(&cells[j]) {
                    return Err(invalid(format!("cells {i} and {j} overlap")));
                }
            }
        }
        let factors = cells
            .iter()
            .zip(degrees)
            .flat_map(|(c, &d)| std::iter::repeat_n(Factor::Indicator(c.clone()), d))
            .collect();
        Ok(SymmetricFunctionSpec::Tensor(factors))
    }

    pub fn constant(value: f64, arity: usize) -> Self {
        SymmetricFunctionSpec::Generic {
            arity,
            eval: Arc::new(move |_| value),
            bound: value.abs(),
        }
    }

    pub fn generic(
        arity: usize,
        bound: f64,
        eval: impl Fn(&[Point]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !bound.is_finite() {
            return Err(invalid("generic functions must declare a finite bound"));
        }
        Ok(SymmetricFunctionSpec::Generic { arity, eval: Arc::new(eval), bound })
    }

    pub fn arity(&self) -> usize {
        match self {
            SymmetricFunctionSpec::Tensor(fs) => fs.len(),
            SymmetricFunctionSpec::Generic { arity, .. } => *arity,
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            SymmetricFunctionSpec::Tensor(fs) => fs.iter().map(Factor::bound).product(),
            SymmetricFunctionSpec::Generic { bound, .. } => *bound,
        }
    }

    pub fn eval(&self, args: &[Point]) -> f64 {
        debug_assert_eq!(args.len(), self.arity());
        match self {
            SymmetricFunctionSpec::Tensor(fs) => {
                fs.iter().zip(args).map(|(f, p)| f.eval(p)).product()
            }
            SymmetricFunctionSpec::Generic { eval, .. } => eval(args),
        }
    }

    pub(crate) fn check_arity(&self, n: usize) -> Result<()> {
        if self.arity() != n {
            return Err(Error::ArityMismatch { expected: self.arity(), got: n });
        }
        Ok(())
    }

    /// `(f)_sigma`: the arguments in each block are identified, blocks ordered by
    /// their least element.
    pub fn collapse(&self, sigma: &SetPartition) -> Result<Self> {
        self.check_arity(sigma.n())?;
        Ok(match self {
            SymmetricFunctionSpec::Tensor(fs) => SymmetricFunctionSpec::Tensor(
                sigma
                    .blocks()
                    .iter()
                    .map(|block| match block.as_slice() {
                        [i] => fs[*i].clone(),
                        _ => Factor::Product(block.iter().map(|&i| fs[i].clone()).collect()),
                    })
                    .collect(),
            ),
            SymmetricFunctionSpec::Generic { arity, eval, bound } => {
                let slot = sigma.block_of_each();
                let inner = Arc::clone(eval);
                let n = *arity;
                SymmetricFunctionSpec::Generic {
                    arity: sigma.block_count(),
                    eval: Arc::new(move |args: &[Point]| {
                        let full: Vec<Point> = (0..n).map(|i| args[slot[i]]).collect();
                        inner(&full)
                    }),
                    bound: *bound,
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointconfig::set_partitions;

    #[test]
    fn collapse_singletons_is_identity() {
        let f = SymmetricFunctionSpec::Tensor(vec![
            Factor::SiteWeights(vec![1.0, 2.0]),
            Factor::SiteWeights(vec![3.0, 5.0]),
        ]);
        let sigma = SetPartition::new(vec![vec![0], vec![1]]).unwrap();
        let g = f.collapse(&sigma).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let args = [Point::Site(a), Point::Site(b)];
                assert_eq!(f.eval(&args), g.eval(&args));
            }
        }
    }

    #[test]
    fn collapse_full_block() {
        let b = Region::Interval(0.2, 0.6);
        let f = SymmetricFunctionSpec::tensor_indicator(&[b], &[2]).unwrap();
        let sigma = SetPartition::new(vec![vec![0, 1]]).unwrap();
        let g = f.collapse(&sigma).unwrap();
        assert_eq!(g.arity(), 1);
        assert_eq!(g.eval(&[Point::Coord(0.3)]), 1.0);
        assert_eq!(g.eval(&[Point::Coord(0.7)]), 0.0);
    }

    #[test]
    fn collapse_generic_identifies_in_order() {
        // f(x,y,z) = g(x) h(y) g(z) with sigma = {{1,3},{2}} gives (u,v) -> g(u)^2 h(v).
        let g = |p: &Point| p.site().unwrap() as f64 + 2.0;
        let h = |p: &Point| 10.0 - p.site().unwrap() as f64;
        let f = SymmetricFunctionSpec::generic(3, 1e3, move |a| g(&a[0]) * h(&a[1]) * g(&a[2]))
            .unwrap();
        let sigma = SetPartition::new(vec![vec![0, 2], vec![1]]).unwrap();
        let c = f.collapse(&sigma).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                let (pu, pv) = (Point::Site(u), Point::Site(v));
                assert_eq!(c.eval(&[pu, pv]), g(&pu) * g(&pu) * h(&pv));
            }
        }
    }

    #[test]
    fn collapse_keeps_bound_and_checks_arity() {
        let f = SymmetricFunctionSpec::Tensor(vec![
            Factor::SiteWeights(vec![0.5, -2.0]),
            Factor::SiteWeights(vec![3.0, 1.0]),
            Factor::SiteWeights(vec![1.0, 1.5]),
        ]);
        for sigma in set_partitions(3).unwrap() {
            assert!(f.collapse(&sigma).unwrap().bound() <= f.bound());
        }
        let wrong = set_partitions(2).unwrap();
        assert!(f.collapse(&wrong[0]).is_err());
    }

    #[test]
    fn overlapping_cells_rejected() {
        let cells = [Region::Interval(0.0, 0.5), Region::Interval(0.4, 1.0)];
        assert!(SymmetricFunctionSpec::tensor_indicator(&cells, &[1, 1]).is_err());
        assert!(SymmetricFunctionSpec::generic(1, f64::INFINITY, |_| 0.0).is_err());
    }
}
