use serde::{Deserialize, Serialize};

use super::function::{grid_cell, Factor};
use super::point::{Point, Region};
use crate::error::{invalid, Result};

/// Finite measure on `[0,1)`: point masses plus a density that is constant on each
/// cell of a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphaRaw", into = "AlphaRaw")]
pub struct AlphaMeasure {
    cells: Vec<f64>,
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaRaw {
    #[serde(default)]
    cells: Vec<f64>,
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<AlphaRaw> for AlphaMeasure {
    type Error = crate::error::Error;
    fn try_from(raw: AlphaRaw) -> Result<Self> {
        AlphaMeasure::new(raw.cells, raw.atoms)
    }
}

impl From<AlphaMeasure> for AlphaRaw {
    fn from(a: AlphaMeasure) -> Self {
        AlphaRaw { cells: a.cells, atoms: a.atoms }
    }
}

impl AlphaMeasure {
    /// `cells[k]` is the density level on `[k/L, (k+1)/L)`; atoms are `(coord, mass)`.
    pub fn new(cells: Vec<f64>, mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if cells.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("density levels must be finite and nonnegative"));
        }
        for &(x, m) in &atoms {
            if !(0.0..1.0).contains(&x) {
                return Err(invalid(format!("atom location {x} outside [0,1)")));
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(invalid(format!("atom mass must be positive, got {m}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("atoms must sit at distinct locations"));
        }
        let a = Self { cells, atoms };
        if !(a.total() > 0.0) {
            return Err(invalid("alpha must have positive total mass"));
        }
        Ok(a)
    }

    pub fn uniform(total: f64) -> Result<Self> {
        Self::new(vec![total], Vec::new())
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Mass carried by the density on grid cell `k`.
    pub fn cell_mass(&self, k: usize) -> f64 {
        self.cells[k] / self.cells.len() as f64
    }

    pub fn density_at(&self, x: f64) -> f64 {
        if self.cells.is_empty() {
            0.0
        } else {
            self.cells[grid_cell(x, self.cells.len())]
        }
    }

    /// Mass of the atom at exactly `x`, zero if there is none.
    pub fn atom_at(&self, x: f64) -> f64 {
        self.atoms
            .binary_search_by(|a| a.0.total_cmp(&x))
            .map_or(0.0, |i| self.atoms[i].1)
    }

    pub fn total(&self) -> f64 {
        let density: f64 = (0..self.cells.len()).map(|k| self.cell_mass(k)).sum();
        density + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// `int g d alpha` for a step function `g`; exact up to rounding.
    pub fn integrate(&self, g: &Factor) -> f64 {
        self.integrate_map(g, |v| v)
    }

    /// `int phi(g(x)) alpha(dx)` for a step function `g`.
    pub fn integrate_map(&self, g: &Factor, phi: impl Fn(f64) -> f64) -> f64 {
        let h = |x: f64| phi(g.eval(&Point::Coord(x)));
        let atoms: f64 = self.atoms.iter().map(|&(x, m)| m * h(x)).sum();
        if self.cells.is_empty() {
            return atoms;
        }
        let mut cuts = Vec::new();
        g.breakpoints(&mut cuts);
        Factor::CellLevels(self.cells.clone()).breakpoints(&mut cuts);
        let mut cuts: Vec<f64> = cuts.into_iter().map(|c| c.clamp(0.0, 1.0)).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let density: f64 = cuts
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.density_at(mid) * h(mid) * (w[1] - w[0])
            })
            .sum();
        atoms + density
    }

    pub fn mass(&self, region: &Region) -> f64 {
        self.integrate(&Factor::Indicator(region.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masses() {
        let a = AlphaMeasure::new(vec![1.0, 3.0], vec![(0.25, 0.5)]).unwrap();
        assert!((a.total() - 2.5).abs() < 1e-15);
        assert!((a.mass(&Region::Interval(0.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((a.mass(&Region::Interval(0.25, 0.75)) - (0.25 + 0.5 + 0.75)).abs() < 1e-15);
        assert!((a.mass(&Region::Interval(0.3, 0.75)) - (0.2 + 0.75)).abs() < 1e-15);
        assert_eq!(a.atom_at(0.25), 0.5);
        assert_eq!(a.atom_at(0.3), 0.0);
    }

    #[test]
    fn step_function_integral() {
        let a = AlphaMeasure::new(vec![2.0], vec![]).unwrap();
        let g = Factor::Product(vec![
            Factor::CellLevels(vec![1.0, 2.0, 3.0]),
            Factor::Indicator(Region::Interval(0.5, 1.0)),
        ]);
        // 2 * (2 * (2/3 - 1/2) + 3 * 1/3)
        let expected = 2.0 * (2.0 * (2.0 / 3.0 - 0.5) + 1.0);
        assert!((a.integrate(&g) - expected).abs() < 1e-14);
    }

    #[test]
    fn validation_and_serde() {
        assert!(AlphaMeasure::new(vec![0.0], vec![]).is_err());
        assert!(AlphaMeasure::new(vec![], vec![(1.0, 1.0)]).is_err());
        assert!(AlphaMeasure::new(vec![-1.0, 2.0], vec![]).is_err());
        let a: AlphaMeasure = serde_json::from_str(r#"{"cells":[1,2],"atoms":[[0.5,1.5]]}"#).unwrap();
        assert!((a.total() - 3.0).abs() < 1e-15);
        assert!(serde_json::from_str::<AlphaMeasure>(r#"{"cells":[0]}"#).is_err());
    }
}
