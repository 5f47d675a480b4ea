use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A location in the state space: a site of a finite set, or a coordinate in `[0,1)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Site(usize),
    Coord(f64),
}

impl Point {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Point::Site(_) => Ok(()),
            Point::Coord(x) if (0.0..1.0).contains(&x) => Ok(()),
            Point::Coord(x) => Err(invalid(format!("coordinate {x} outside [0,1)"))),
        }
    }

    pub fn site(&self) -> Option<usize> {
        match *self {
            Point::Site(s) => Some(s),
            Point::Coord(_) => None,
        }
    }

    pub fn coord(&self) -> Option<f64> {
        match *self {
            Point::Coord(x) => Some(x),
            Point::Site(_) => None,
        }
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Point {}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Site(a), Point::Site(b)) => a.cmp(b),
            (Point::Coord(a), Point::Coord(b)) => a.total_cmp(b),
            (Point::Site(_), Point::Coord(_)) => Ordering::Less,
            (Point::Coord(_), Point::Site(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Site(s) => write!(f, "{s}"),
            Point::Coord(x) => write!(f, "{x}"),
        }
    }
}

/// A measurable set of locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Sites(BTreeSet<usize>),
    /// Half-open interval `[lo, hi)`.
    Interval(f64, f64),
    Union(Vec<Region>),
}

impl Region {
    pub fn site(s: usize) -> Self {
        Region::Sites(BTreeSet::from([s]))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Region::Sites(set), Point::Site(s)) => set.contains(s),
            (Region::Interval(lo, hi), Point::Coord(x)) => lo <= x && x < hi,
            (Region::Union(parts), _) => parts.iter().any(|r| r.contains(p)),
            _ => false,
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Union(parts), o) | (o, Region::Union(parts)) => {
                parts.iter().all(|r| r.is_disjoint(o))
            }
            (Region::Sites(a), Region::Sites(b)) => a.is_disjoint(b),
            (Region::Interval(a0, a1), Region::Interval(b0, b1)) => {
                a1 <= a0 || b1 <= b0 || a0.max(*b0) >= a1.min(*b1)
            }
            _ => true,
        }
    }

    /// Endpoints of the intervals making up the region.
    pub(crate) fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Region::Interval(lo, hi) => {
                out.push(*lo);
                out.push(*hi);
            }
            Region::Union(parts) => parts.iter().for_each(|r| r.breakpoints(out)),
            Region::Sites(_) => {}
        }
    }
}

/// Finite counting measure `eta = sum_i delta_{x_i}`, stored as a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct CountingMeasure {
    points: Vec<Point>,
}

impl std::hash::Hash for Point {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Point::Site(s) => {
                0u8.hash(state);
                s.hash(state);
            }
            Point::Coord(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

impl TryFrom<Vec<Point>> for CountingMeasure {
    type Error = crate::error::Error;
    fn try_from(points: Vec<Point>) -> Result<Self> {
        CountingMeasure::new(points)
    }
}

impl From<CountingMeasure> for Vec<Point> {
    fn from(m: CountingMeasure) -> Self {
        m.points
    }
}

impl CountingMeasure {
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        for p in &points {
            p.validate()?;
        }
        points.sort();
        Ok(Self { points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Configuration on sites `0..m` with the given occupation numbers.
    pub fn from_occupancy(occupancy: &[usize]) -> Self {
        let points = occupancy
            .iter()
            .enumerate()
            .flat_map(|(s, &k)| std::iter::repeat_n(Point::Site(s), k))
            .collect();
        Self { points }
    }

    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Point::Coord(x)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn total(&self) -> usize {
        self.points.len()
    }

    pub fn count_in(&self, region: &Region) -> usize {
        self.points.iter().filter(|p| region.contains(p)).count()
    }

    /// Occupation numbers on sites `0..m`; coordinates and sites `>= m` are ignored.
    pub fn occupancy(&self, m: usize) -> Vec<usize> {
        let mut occ = vec![0; m];
        for p in &self.points {
            if let Point::Site(s) = p {
                if *s < m {
                    occ[*s] += 1;
                }
            }
        }
        occ
    }

    pub fn with_point(&self, p: Point) -> Self {
        let mut points = self.points.clone();
        let at = points.partition_point(|q| *q <= p);
        points.insert(at, p);
        Self { points }
    }

    /// `eta - delta_{x_i}` for the particle stored at index `i`.
    pub fn without_index(&self, i: usize) -> Self {
        let mut points = self.points.clone();
        points.remove(i);
        Self { points }
    }

    /// Sub-configuration made of the particles with the given indices.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut points: Vec<Point> = indices.iter().map(|&i| self.points[i]).collect();
        points.sort();
        Self { points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_is_canonical() {
        let a = CountingMeasure::new(vec![Point::Site(2), Point::Site(0), Point::Site(2)]).unwrap();
        let b = CountingMeasure::from_occupancy(&[1, 0, 2]);
        assert_eq!(a, b);
        assert_eq!(a.total(), 3);
        assert_eq!(a.occupancy(3), vec![1, 0, 2]);
    }

    #[test]
    fn json_round_trip() {
        let m = CountingMeasure::from_coords(&[0.75, 0.25, 0.25]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[0.25,0.25,0.75]");
        let back: CountingMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let sites: CountingMeasure = serde_json::from_str("[3,1,1]").unwrap();
        assert_eq!(sites.occupancy(4), vec![0, 2, 0, 1]);
        assert!(serde_json::from_str::<CountingMeasure>("[1.5]").is_err());
    }

    #[test]
    fn region_membership_and_disjointness() {
        let a = Region::Interval(0.0, 0.5);
        let b = Region::Interval(0.5, 1.0);
        assert!(a.is_disjoint(&b));
        assert!(!a.is_disjoint(&Region::Interval(0.4, 0.6)));
        assert!(a.contains(&Point::Coord(0.0)));
        assert!(!a.contains(&Point::Coord(0.5)));
        assert!(!a.contains(&Point::Site(0)));
        let u = Region::Union(vec![Region::site(1), Region::site(3)]);
        assert!(u.contains(&Point::Site(3)));
        assert!(u.is_disjoint(&Region::site(2)));
    }

    #[test]
    fn counts() {
        let m = CountingMeasure::from_coords(&[0.1, 0.2, 0.7]).unwrap();
        assert_eq!(m.count_in(&Region::Interval(0.0, 0.5)), 2);
        assert_eq!(m.without_index(0).total(), 2);
        assert_eq!(m.with_point(Point::Coord(0.15)).points()[1], Point::Coord(0.15));
    }
}
