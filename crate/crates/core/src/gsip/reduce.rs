use super::conductance::ConductanceFn;
use crate::discrete::SiteSystem;
use crate::error::{invalid, Result};
use crate::pointconfig::{AlphaMeasure, Point, Region};

const EDGE_TOL: f64 = 1e-12;

fn interval(cell: &Region) -> Result<(f64, f64)> {
    match cell {
        Region::Interval(lo, hi) if lo < hi => Ok((*lo, *hi)),
        other => Err(invalid(format!("partition cells must be nonempty intervals, got {other:?}"))),
    }
}

/// Checks that `cells` are intervals tiling `[0,1)` and returns them sorted, with
/// their original indices.
fn tiling(cells: &[Region]) -> Result<Vec<(f64, f64, usize)>> {
    let mut iv: Vec<(f64, f64, usize)> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| interval(c).map(|(lo, hi)| (lo, hi, i)))
        .collect::<Result<_>>()?;
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut edge = 0.0;
    for &(lo, hi, _) in &iv {
        if (lo - edge).abs() > EDGE_TOL {
            return Err(invalid("partition cells must tile [0,1) without gaps or overlaps"));
        }
        edge = hi;
    }
    if (edge - 1.0).abs() > EDGE_TOL {
        return Err(invalid("partition cells must tile [0,1) without gaps or overlaps"));
    }
    Ok(iv)
}

/// Discrete inclusion process followed by the cell counts when `c` is constant on
/// every product of partition cells: conductances `d_ij`, weights `alpha(A_i)`.
pub fn reduce_to_discrete(cells: &[Region], c: &ConductanceFn, alpha: &AlphaMeasure) -> Result<SiteSystem> {
    c.validate()?;
    let iv = tiling(cells)?;
    let k = c.grid_len();
    let m = cells.len();
    // grid cells of the conductance that overlap each partition cell
    let mut overlap: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(lo, hi, i) in &iv {
        for g in 0..k {
            let (glo, ghi) = (g as f64 / k as f64, (g + 1) as f64 / k as f64);
            if glo.max(lo) + EDGE_TOL < ghi.min(hi) {
                overlap[i].push(g);
            }
        }
    }
    let mut d = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let first = c.level(overlap[i][0], overlap[j][0]);
            if overlap[i].iter().any(|&g| overlap[j].iter().any(|&h| c.level(g, h) != first)) {
                return Err(invalid(format!("conductance is not constant on cells {i} x {j}")));
            }
            d[i][j] = first;
        }
    }
    let matrix: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 0.0 } else { d[i][j] }).collect())
        .collect();
    let weights: Vec<f64> = cells.iter().map(|r| alpha.mass(r)).collect();
    SiteSystem::new(m, matrix, weights, 1)
}

/// Number of points of `x` in each cell.
pub fn cell_counts(x: &[f64], cells: &[Region]) -> Vec<u32> {
    cells
        .iter()
        .map(|r| x.iter().filter(|&&v| r.contains(&Point::Coord(v))).count() as u32)
        .collect()
}

/// Cells `[k/m, (k+1)/m)` of the uniform grid.
pub fn uniform_cells(m: usize) -> Vec<Region> {
    (0..m)
        .map(|k| Region::Interval(k as f64 / m as f64, (k + 1) as f64 / m as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cells_constant() {
        let alpha = AlphaMeasure::new(vec![1.0, 3.0], vec![]).unwrap();
        let sys = reduce_to_discrete(&uniform_cells(2), &ConductanceFn::Constant { kappa: 0.7 }, &alpha).unwrap();
        assert_eq!(sys.m(), 2);
        assert_eq!(sys.c(0, 1), 0.7);
        assert_eq!(sys.alpha(), &[0.5, 1.5]);
        assert_eq!(sys.sigma(), 1);
    }

    #[test]
    fn coarser_partition_of_finer_grid() {
        let d = vec![
            vec![1.0, 1.0, 2.0, 2.0],
            vec![1.0, 1.0, 2.0, 2.0],
            vec![2.0, 2.0, 0.5, 0.5],
            vec![2.0, 2.0, 0.5, 0.5],
        ];
        let c = ConductanceFn::PiecewiseConstant { d };
        let alpha = AlphaMeasure::new(vec![1.0], vec![(0.9, 0.25)]).unwrap();
        let sys = reduce_to_discrete(&uniform_cells(2), &c, &alpha).unwrap();
        assert_eq!(sys.c(0, 1), 2.0);
        assert_eq!(sys.alpha(), &[0.5, 0.75]);
    }

    #[test]
    fn rejects_non_measurable() {
        let c = ConductanceFn::PiecewiseConstant { d: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]] };
        let alpha = AlphaMeasure::uniform(1.0).unwrap();
        assert!(reduce_to_discrete(&uniform_cells(2), &c, &alpha).is_err());
        let c = ConductanceFn::PiecewiseConstant { d: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]] };
        let cells = vec![Region::Interval(0.0, 1.0 / 3.0), Region::Interval(1.0 / 3.0, 1.0)];
        assert!(reduce_to_discrete(&cells, &c, &alpha).is_err());
        let gap = vec![Region::Interval(0.0, 0.4), Region::Interval(0.5, 1.0)];
        assert!(reduce_to_discrete(&gap, &ConductanceFn::Constant { kappa: 1.0 }, &alpha).is_err());
    }

    #[test]
    fn counting() {
        assert_eq!(cell_counts(&[0.1, 0.5, 0.7, 0.2], &uniform_cells(2)), vec![2, 2]);
    }
}
