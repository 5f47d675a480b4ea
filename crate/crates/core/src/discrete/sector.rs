use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest state space the exact engines will build.
pub const SECTOR_LIMIT: usize = 200_000;

/// All occupation vectors on `m` sites with `n` particles (and `eta_x <= cap_x` if
/// capacities are given), in lexicographic order.
#[derive(Debug, Clone)]
pub struct SectorEnumeration {
    n: usize,
    m: usize,
    configs: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl SectorEnumeration {
    pub fn new(m: usize, n: usize, caps: Option<&[usize]>) -> Result<Self> {
        let size = count_configs(m, n, caps);
        if size > SECTOR_LIMIT {
            return Err(Error::SectorTooLarge { states: size, limit: SECTOR_LIMIT });
        }
        if size == 0 {
            return Err(Error::EmptySector { particles: n });
        }
        let mut configs = Vec::with_capacity(size);
        let mut cur = vec![0u32; m];
        fill(0, n, caps, &mut cur, &mut configs);
        let index = configs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(Self { n, m, configs, index })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Vec<u32>] {
        &self.configs
    }

    pub fn config(&self, i: usize) -> &[u32] {
        &self.configs[i]
    }

    pub fn index_of(&self, eta: &[u32]) -> Option<usize> {
        self.index.get(eta).copied()
    }
}

fn count_configs(m: usize, n: usize, caps: Option<&[usize]>) -> usize {
    // ways[k] = number of ways to place k particles on the sites processed so far
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for x in 0..m {
        let cap = caps.map_or(n, |c| c[x].min(n));
        let mut next = vec![0usize; n + 1];
        for (k, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for j in 0..=cap.min(n - k) {
                next[k + j] = next[k + j].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[n]
}

fn fill(x: usize, left: usize, caps: Option<&[usize]>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let m = cur.len();
    if x == m - 1 {
        if caps.is_none_or(|c| left <= c[x]) {
            cur[x] = left as u32;
            out.push(cur.clone());
        }
        return;
    }
    let cap = caps.map_or(left, |c| c[x].min(left));
    for k in 0..=cap {
        cur[x] = k as u32;
        fill(x + 1, left - k, caps, cur, out);
    }
    cur[x] = 0;
}

/// Labelled configurations `(x_1..x_n)` in `{0..m-1}^n`, restricted to occupations
/// within the capacities if given, in lexicographic order.
#[derive(Debug, Clone)]
pub struct LabelledSpace {
    n: usize,
    m: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl LabelledSpace {
    pub fn new(m: usize, n: usize, caps: Option<&[usize]>) -> Result<Self> {
        let size = (m as f64).powi(n as i32);
        if size > SECTOR_LIMIT as f64 {
            return Err(Error::SectorTooLarge { states: size as usize, limit: SECTOR_LIMIT });
        }
        let total = m.pow(n as u32);
        let mut states = Vec::new();
        for code in 0..total {
            let mut x = vec![0usize; n];
            let mut rest = code;
            for slot in x.iter_mut().rev() {
                *slot = rest % m;
                rest /= m;
            }
            let fits = caps.is_none_or(|c| occupancy(&x, m).iter().zip(c).all(|(o, cap)| *o as usize <= *cap));
            if fits {
                states.push(x);
            }
        }
        if states.is_empty() {
            return Err(Error::EmptySector { particles: n });
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { n, m, states, index })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn index_of(&self, x: &[usize]) -> Option<usize> {
        self.index.get(x).copied()
    }
}

/// Occupation numbers of a labelled configuration.
pub fn occupancy(x: &[usize], m: usize) -> Vec<u32> {
    let mut occ = vec![0u32; m];
    for &s in x {
        occ[s] += 1;
    }
    occ
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::binomial;

    #[test]
    fn unrestricted_sizes() {
        for m in 1..5 {
            for n in 0..5 {
                let s = SectorEnumeration::new(m, n, None).unwrap();
                let expected: f64 = binomial((n + m - 1) as u64, (m - 1) as u64);
                assert_eq!(s.len(), expected as usize);
            }
        }
    }

    #[test]
    fn lexicographic_and_bijective() {
        let s = SectorEnumeration::new(3, 2, None).unwrap();
        assert_eq!(s.config(0), &[0, 0, 2]);
        assert_eq!(s.config(s.len() - 1), &[2, 0, 0]);
        assert!(s.configs().windows(2).all(|w| w[0] < w[1]));
        for (i, c) in s.configs().iter().enumerate() {
            assert_eq!(s.index_of(c), Some(i));
        }
    }

    #[test]
    fn capacities_restrict() {
        let s = SectorEnumeration::new(2, 2, Some(&[1, 1])).unwrap();
        assert_eq!(s.configs(), &[vec![1, 1]]);
        assert!(matches!(
            SectorEnumeration::new(2, 3, Some(&[1, 1])),
            Err(Error::EmptySector { particles: 3 })
        ));
        let l = LabelledSpace::new(2, 2, Some(&[1, 1])).unwrap();
        assert_eq!(l.states(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn guard() {
        assert!(matches!(
            SectorEnumeration::new(30, 8, None),
            Err(Error::SectorTooLarge { .. })
        ));
    }
}
