use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Particle system on the finite set `{0..m-1}`: a move `x -> y` happens at rate
/// `c[x][y] * (alpha[y] + sigma * eta_y) * eta_x`.
///
/// `sigma = -1` is the exclusion process (site `y` holds at most `alpha[y]`
/// particles), `0` independent walkers, `+1` the inclusion process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SiteSystemRaw", into = "SiteSystemRaw")]
pub struct SiteSystem {
    m: usize,
    c: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    sigma: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteSystemRaw {
    m: usize,
    c: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    sigma: i8,
}

impl TryFrom<SiteSystemRaw> for SiteSystem {
    type Error = crate::error::Error;
    fn try_from(r: SiteSystemRaw) -> Result<Self> {
        SiteSystem::new(r.m, r.c, r.alpha, r.sigma)
    }
}

impl From<SiteSystem> for SiteSystemRaw {
    fn from(s: SiteSystem) -> Self {
        SiteSystemRaw { m: s.m, c: s.c, alpha: s.alpha, sigma: s.sigma }
    }
}

impl SiteSystem {
    pub fn new(m: usize, c: Vec<Vec<f64>>, alpha: Vec<f64>, sigma: i8) -> Result<Self> {
        if m == 0 {
            return Err(invalid("a site system needs at least one site"));
        }
        if c.len() != m || c.iter().any(|row| row.len() != m) {
            return Err(invalid(format!("conductance matrix must be {m}x{m}")));
        }
        if alpha.len() != m {
            return Err(invalid(format!("expected {m} site weights, got {}", alpha.len())));
        }
        if !(-1..=1).contains(&sigma) {
            return Err(invalid(format!("sigma must be -1, 0 or 1, got {sigma}")));
        }
        for x in 0..m {
            if c[x][x] != 0.0 {
                return Err(invalid(format!("conductance c[{x}][{x}] must be zero")));
            }
            for y in 0..m {
                let v = c[x][y];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(format!("conductance c[{x}][{y}] = {v} is not a nonnegative number")));
                }
                if v != c[y][x] {
                    return Err(invalid(format!("conductances must be symmetric: c[{x}][{y}] != c[{y}][{x}]")));
                }
            }
        }
        for (x, &a) in alpha.iter().enumerate() {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid(format!("site weight alpha[{x}] = {a} must be positive")));
            }
            if sigma == -1 && a.fract() != 0.0 {
                return Err(invalid(format!(
                    "exclusion needs integer capacities, alpha[{x}] = {a}"
                )));
            }
        }
        let sys = Self { m, c, alpha, sigma };
        if !sys.is_connected() {
            return Err(invalid("conductance graph must be connected"));
        }
        Ok(sys)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..self.m {
                if !seen[y] && self.c[x][y] > 0.0 {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self, x: usize, y: usize) -> f64 {
        self.c[x][y]
    }

    pub fn conductances(&self) -> &[Vec<f64>] {
        &self.c
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sigma(&self) -> i8 {
        self.sigma
    }

    /// Per-site occupation bounds (exclusion only).
    pub fn capacities(&self) -> Option<Vec<usize>> {
        (self.sigma == -1).then(|| self.alpha.iter().map(|&a| a as usize).collect())
    }
}
