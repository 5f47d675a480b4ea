use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::conductance::ConductanceFn;
use crate::error::{invalid, Error, Result};
use crate::pointconfig::{AlphaMeasure, CountingMeasure, Point};
use crate::rng::substream;

pub const DEFAULT_MAX_EVENTS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Atom { x: f64, mass: f64 },
    Uniform { lo: f64, hi: f64, mass: f64 },
}

impl Piece {
    fn mass(&self) -> f64 {
        match *self {
            Piece::Atom { mass, .. } | Piece::Uniform { mass, .. } => mass,
        }
    }
}

/// The pair `(alpha, c)` of a generalized inclusion process on `[0,1)`, with the
/// restriction of `alpha` to every cell of the conductance grid precomputed.
#[derive(Debug, Clone)]
pub struct GsipModel {
    alpha: AlphaMeasure,
    c: ConductanceFn,
    pieces: Vec<Vec<Piece>>,
    cell_mass: Vec<f64>,
}

/// `q_{i0} = int c(x_i, y) alpha(dy)`, `q_{ij} = c(x_i, x_j)`, `z_i = q_{i0} + sum_j q_{ij}`
/// and `z = sum_i z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRates {
    pub fresh: Vec<f64>,
    pub pair: Vec<Vec<f64>>,
    pub per_particle: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// The particle jumped onto the location of another particle.
    Join,
    /// The particle jumped to a location drawn from `c(x, .) alpha`.
    Fresh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsipEvent {
    pub time: f64,
    pub event: EventKind,
    pub particle: usize,
    pub destination: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsipTrajectoryConfig {
    pub t_end: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_events")]
    pub max_events: u64,
}

fn default_max_events() -> u64 {
    DEFAULT_MAX_EVENTS
}

impl GsipTrajectoryConfig {
    pub fn new(t_end: f64, seed: u64) -> Self {
        Self { t_end, seed, max_events: DEFAULT_MAX_EVENTS }
    }
}

impl GsipModel {
    pub fn new(alpha: AlphaMeasure, c: ConductanceFn) -> Result<Self> {
        c.validate()?;
        let k = c.grid_len();
        let mut pieces: Vec<Vec<Piece>> = vec![Vec::new(); k];
        for &(x, mass) in alpha.atoms() {
            pieces[c.cell_of(x)].push(Piece::Atom { x, mass });
        }
        let l = alpha.cells().len();
        let mut cuts: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
        cuts.extend((0..=l).map(|i| i as f64 / l.max(1) as f64));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let mass = alpha.density_at(mid) * (hi - lo);
            if mass > 0.0 {
                pieces[c.cell_of(mid)].push(Piece::Uniform { lo, hi, mass });
            }
        }
        let cell_mass = pieces.iter().map(|ps| ps.iter().map(Piece::mass).sum()).collect();
        Ok(Self { alpha, c, pieces, cell_mass })
    }

    pub fn alpha(&self) -> &AlphaMeasure {
        &self.alpha
    }

    pub fn conductance(&self) -> &ConductanceFn {
        &self.c
    }

    /// `int c(x, y) alpha(dy)`, leaving out an atom of `alpha` sitting at `x` itself.
    pub fn fresh_rate(&self, x: f64) -> f64 {
        let a = self.c.cell_of(x);
        let spread: f64 = (0..self.cell_mass.len()).map(|k| self.c.level(a, k) * self.cell_mass[k]).sum();
        (spread - self.c.level(a, a) * self.alpha.atom_at(x)).max(0.0)
    }

    pub fn rates(&self, x: &[f64]) -> JumpRates {
        let n = x.len();
        let fresh: Vec<f64> = x.iter().map(|&xi| self.fresh_rate(xi)).collect();
        let pair: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { self.c.eval(x[i], x[j]) }).collect())
            .collect();
        let per_particle: Vec<f64> = (0..n).map(|i| fresh[i] + pair[i].iter().sum::<f64>()).collect();
        let total = per_particle.iter().sum();
        JumpRates { fresh, pair, per_particle, total }
    }

    /// Upper bound `n bound(c) (alpha(E) + n)` on the total jump rate of `n` particles.
    pub fn rate_bound(&self, n: usize) -> f64 {
        n as f64 * self.c.bound() * (self.alpha.total() + n as f64)
    }

    fn sample_in_cell<R: Rng + ?Sized>(&self, k: usize, exclude_atom: Option<f64>, rng: &mut R) -> f64 {
        let excluded = exclude_atom.map_or(0.0, |x| self.alpha.atom_at(x));
        let live = |p: &Piece| !matches!((p, exclude_atom), (Piece::Atom { x, .. }, Some(e)) if *x == e);
        let mut u = rng.random::<f64>() * (self.cell_mass[k] - excluded);
        let mut last = None;
        for p in self.pieces[k].iter().filter(|p| live(p)) {
            last = Some(*p);
            if u < p.mass() {
                break;
            }
            u -= p.mass();
        }
        match last.expect("a cell with positive weight has a live piece") {
            Piece::Atom { x, .. } => x,
            Piece::Uniform { lo, hi, .. } => {
                let y = lo + rng.random::<f64>() * (hi - lo);
                if y < hi { y } else { lo }
            }
        }
    }

    /// Draw from `alpha / alpha(E)`.
    pub fn sample_alpha<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total: f64 = self.cell_mass.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut k = self.cell_mass.len() - 1;
        for (i, &m) in self.cell_mass.iter().enumerate() {
            if u < m {
                k = i;
                break;
            }
            u -= m;
        }
        while self.cell_mass[k] == 0.0 {
            k -= 1;
        }
        self.sample_in_cell(k, None, rng)
    }

    /// Draw from `c(x, y) alpha(dy)` normalised, with `alpha`'s atom at `x` removed.
    fn sample_fresh<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        let a = self.c.cell_of(x);
        let own = self.alpha.atom_at(x);
        let weights: Vec<f64> = (0..self.cell_mass.len())
            .map(|k| {
                let mass = if k == a { self.cell_mass[k] - own } else { self.cell_mass[k] };
                self.c.level(a, k) * mass.max(0.0)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut k = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                k = i;
                if u < w {
                    break;
                }
                u -= w;
            }
        }
        self.sample_in_cell(k, (own > 0.0 && k == a).then_some(x), rng)
    }

    /// Runs the jump-hold chain on the labelled positions `x` up to time `t_end`,
    /// returning the number of jumps.
    pub fn evolve<R: Rng + ?Sized>(
        &self,
        x: &mut [f64],
        t_end: f64,
        max_events: u64,
        rng: &mut R,
        mut log: Option<&mut Vec<GsipEvent>>,
    ) -> Result<u64> {
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(invalid(format!("t_end must be finite and nonnegative, got {t_end}")));
        }
        let n = x.len();
        let mut fresh = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut t = 0.0;
        let mut events = 0u64;
        loop {
            let mut total = 0.0;
            for i in 0..n {
                fresh[i] = self.fresh_rate(x[i]);
                let mut zi = fresh[i];
                for j in 0..n {
                    if j != i {
                        zi += self.c.eval(x[i], x[j]);
                    }
                }
                z[i] = zi;
                total += zi;
            }
            if total <= 0.0 {
                return Ok(events);
            }
            t += Exp::new(total).expect("positive rate").sample(rng);
            if t > t_end {
                return Ok(events);
            }
            if events >= max_events {
                return Err(Error::EventBudgetExceeded { max_events, time: t });
            }
            events += 1;

            let mut u = rng.random::<f64>() * total;
            let mut i = n - 1;
            for (k, &zk) in z.iter().enumerate() {
                if u < zk {
                    i = k;
                    break;
                }
                u -= zk;
            }
            while z[i] == 0.0 {
                i -= 1;
            }
            let mut v = rng.random::<f64>() * z[i];
            let (kind, dest) = if v < fresh[i] {
                (EventKind::Fresh, self.sample_fresh(x[i], rng))
            } else {
                v -= fresh[i];
                let mut target = None;
                for j in (0..n).filter(|&j| j != i) {
                    let q = self.c.eval(x[i], x[j]);
                    if q > 0.0 {
                        target = Some(j);
                        if v < q {
                            break;
                        }
                        v -= q;
                    }
                }
                match target {
                    Some(j) => (EventKind::Join, x[j]),
                    None => (EventKind::Fresh, self.sample_fresh(x[i], rng)),
                }
            };
            x[i] = dest;
            if let Some(log) = log.as_deref_mut() {
                log.push(GsipEvent { time: t, event: kind, particle: i, destination: dest });
            }
        }
    }
}

pub(crate) fn coords_of(eta: &CountingMeasure) -> Result<Vec<f64>> {
    eta.points()
        .iter()
        .map(|p| match p {
            Point::Coord(x) => Ok(*x),
            Point::Site(_) => Err(invalid("continuum dynamics need coordinate points")),
        })
        .collect()
}

/// Jump rates of the configuration `eta` (coordinates in `[0,1)`).
pub fn q_rates(eta: &CountingMeasure, c: &ConductanceFn, alpha: &AlphaMeasure) -> Result<JumpRates> {
    let model = GsipModel::new(alpha.clone(), c.clone())?;
    Ok(model.rates(&coords_of(eta)?))
}

/// State at `cfg.t_end` of the process started from `eta0`.
pub fn gsip_simulate(
    eta0: &CountingMeasure,
    c: &ConductanceFn,
    alpha: &AlphaMeasure,
    cfg: &GsipTrajectoryConfig,
) -> Result<CountingMeasure> {
    let model = GsipModel::new(alpha.clone(), c.clone())?;
    let mut x = coords_of(eta0)?;
    model.evolve(&mut x, cfg.t_end, cfg.max_events, &mut substream(cfg.seed, 0), None)?;
    CountingMeasure::from_coords(&x)
}

/// Same dynamics with particle identities kept; returns the positions in input
/// order and the event log.
pub fn labelled_gsip_simulate(
    x: &[f64],
    c: &ConductanceFn,
    alpha: &AlphaMeasure,
    cfg: &GsipTrajectoryConfig,
) -> Result<(Vec<f64>, Vec<GsipEvent>)> {
    if x.is_empty() {
        return Err(invalid("labelled dynamics need at least one particle"));
    }
    if let Some(bad) = x.iter().find(|v| !(0.0..1.0).contains(*v)) {
        return Err(invalid(format!("position {bad} outside [0,1)")));
    }
    let model = GsipModel::new(alpha.clone(), c.clone())?;
    let mut pos = x.to_vec();
    let mut log = Vec::new();
    model.evolve(&mut pos, cfg.t_end, cfg.max_events, &mut substream(cfg.seed, 0), Some(&mut log))?;
    Ok((pos, log))
}
