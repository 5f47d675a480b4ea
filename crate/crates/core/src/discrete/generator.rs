use super::sector::{LabelledSpace, SectorEnumeration};
use super::system::SiteSystem;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse rate matrix: off-diagonal rates per row plus the diagonal `-sum(rates)`.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix<T> {
    off: Vec<Vec<(usize, T)>>,
    diag: Vec<T>,
}

impl<T: Scalar> GeneratorMatrix<T> {
    fn from_rows(off: Vec<Vec<(usize, T)>>) -> Self {
        let diag = off
            .iter()
            .map(|row| -row.iter().fold(T::zero(), |acc, (_, r)| acc + r.clone()))
            .collect();
        Self { off, diag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.off[i]
    }

    pub fn diagonal(&self, i: usize) -> &T {
        &self.diag[i]
    }

    /// Rate from state `i` to state `j` (diagonal included).
    pub fn entry(&self, i: usize, j: usize) -> T {
        if i == j {
            return self.diag[i].clone();
        }
        self.off[i]
            .iter()
            .filter(|(k, _)| *k == j)
            .fold(T::zero(), |acc, (_, r)| acc + r.clone())
    }

    /// `Q v`: the generator acting on a function of the state.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        self.check_dim(v.len())?;
        Ok((0..self.dim())
            .map(|i| {
                self.off[i]
                    .iter()
                    .fold(self.diag[i].clone() * v[i].clone(), |acc, (j, r)| {
                        acc + r.clone() * v[*j].clone()
                    })
            })
            .collect())
    }

    /// `v Q`: the generator acting on a (row) measure over states.
    pub fn apply_transpose(&self, v: &[T]) -> Result<Vec<T>> {
        self.check_dim(v.len())?;
        let mut out: Vec<T> = (0..self.dim()).map(|i| self.diag[i].clone() * v[i].clone()).collect();
        for i in 0..self.dim() {
            for (j, r) in &self.off[i] {
                out[*j] = out[*j].clone() + r.clone() * v[i].clone();
            }
        }
        Ok(out)
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.to_f64().abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Generator of the unlabelled process restricted to one particle-number sector.
#[derive(Debug, Clone)]
pub struct SectorGenerator<T> {
    pub sector: SectorEnumeration,
    pub q: GeneratorMatrix<T>,
}

/// Generator of `n` labelled particles.
#[derive(Debug, Clone)]
pub struct LabelledGenerator<T> {
    pub space: LabelledSpace,
    pub q: GeneratorMatrix<T>,
}

struct Params<T> {
    c: Vec<Vec<T>>,
    alpha: Vec<T>,
    sigma: T,
}

impl<T: Scalar> Params<T> {
    fn new(sys: &SiteSystem) -> Self {
        Self {
            c: sys
                .conductances()
                .iter()
                .map(|row| row.iter().map(|&v| T::from_f64(v)).collect())
                .collect(),
            alpha: sys.alpha().iter().map(|&a| T::from_f64(a)).collect(),
            sigma: T::from_i64(sys.sigma().into()),
        }
    }

    /// `c_xy (alpha_y + sigma * k)` for a particle joining `k` others at `y`.
    fn hop(&self, x: usize, y: usize, others_at_y: u32) -> T {
        self.c[x][y].clone()
            * (self.alpha[y].clone() + self.sigma.clone() * T::from_i64(others_at_y.into()))
    }
}

/// Sector-`n` generator with rate `c_xy (alpha_y + sigma eta_y) eta_x` for
/// `eta -> eta - delta_x + delta_y`.
pub fn build_generator<T: Scalar>(sys: &SiteSystem, n: usize) -> Result<SectorGenerator<T>> {
    let caps = sys.capacities();
    let sector = SectorEnumeration::new(sys.m(), n, caps.as_deref())?;
    let params = Params::<T>::new(sys);
    let m = sys.m();
    let mut rows = Vec::with_capacity(sector.len());
    let mut target = vec![0u32; m];
    for eta in sector.configs() {
        let mut row = Vec::new();
        for x in 0..m {
            if eta[x] == 0 {
                continue;
            }
            for y in 0..m {
                if y == x || sys.c(x, y) == 0.0 {
                    continue;
                }
                let rate = params.hop(x, y, eta[y]) * T::from_i64(eta[x].into());
                if rate <= T::zero() {
                    continue;
                }
                target.copy_from_slice(eta);
                target[x] -= 1;
                target[y] += 1;
                let j = sector.index_of(&target).expect("move stays in the sector");
                row.push((j, rate));
            }
        }
        rows.push(row);
    }
    Ok(SectorGenerator { sector, q: GeneratorMatrix::from_rows(rows) })
}

/// Labelled `n`-particle generator: particle `i` at `x_i` jumps to `y` at rate
/// `c(x_i, y) (alpha_y + sigma #{j != i : x_j = y})`.
pub fn build_labelled_generator<T: Scalar>(sys: &SiteSystem, n: usize) -> Result<LabelledGenerator<T>> {
    let caps = sys.capacities();
    let space = LabelledSpace::new(sys.m(), n, caps.as_deref())?;
    let params = Params::<T>::new(sys);
    let m = sys.m();
    let mut rows = Vec::with_capacity(space.len());
    for x in space.states() {
        let occ = super::sector::occupancy(x, m);
        let mut row = Vec::new();
        for i in 0..n {
            for y in 0..m {
                if y == x[i] || sys.c(x[i], y) == 0.0 {
                    continue;
                }
                let rate = params.hop(x[i], y, occ[y]);
                if rate <= T::zero() {
                    continue;
                }
                let mut z = x.clone();
                z[i] = y;
                let j = space.index_of(&z).expect("move stays in the labelled space");
                row.push((j, rate));
            }
        }
        rows.push(row);
    }
    Ok(LabelledGenerator { space, q: GeneratorMatrix::from_rows(rows) })
}

/// Lowering operator from sector `n-1` functions to sector `n` functions:
/// `(A f)(eta) = sum_x eta_x f(eta - delta_x)`, as sparse rows over sector `n`.
pub fn lowering_matrix(
    sys: &SiteSystem,
    upper: &SectorEnumeration,
    lower: &SectorEnumeration,
) -> Result<Vec<Vec<(usize, f64)>>> {
    if upper.particles() != lower.particles() + 1 {
        return Err(Error::DimensionMismatch { expected: lower.particles() + 1, got: upper.particles() });
    }
    let m = sys.m();
    let mut rows = Vec::with_capacity(upper.len());
    let mut target = vec![0u32; m];
    for eta in upper.configs() {
        let mut row = Vec::new();
        for x in 0..m {
            if eta[x] == 0 {
                continue;
            }
            target.copy_from_slice(eta);
            target[x] -= 1;
            let j = lower.index_of(&target).expect("removal lands in the lower sector");
            row.push((j, f64::from(eta[x])));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn apply_lowering<T: Scalar>(rows: &[Vec<(usize, f64)>], f: &[T]) -> Vec<T> {
    rows.iter()
        .map(|row| {
            row.iter()
                .fold(T::zero(), |acc, (j, w)| acc + T::from_f64(*w) * f[*j].clone())
        })
        .collect()
}

/// Max-norm of `Q_n A - A Q_{n-1}` over all matrix entries, evaluated column by
/// column in the scalar field `T`.
pub fn consistency_commutator<T: Scalar>(sys: &SiteSystem, n: usize) -> Result<T> {
    if n == 0 {
        return Err(crate::error::invalid("the commutator needs n >= 1"));
    }
    let upper = build_generator::<T>(sys, n)?;
    let lower = build_generator::<T>(sys, n - 1)?;
    let lowering = lowering_matrix(sys, &upper.sector, &lower.sector)?;
    let mut worst = T::zero();
    for col in 0..lower.sector.len() {
        let mut e = vec![T::zero(); lower.sector.len()];
        e[col] = T::one();
        let left = upper.q.apply(&apply_lowering(&lowering, &e))?;
        let right = apply_lowering(&lowering, &lower.q.apply(&e)?);
        for (a, b) in left.into_iter().zip(right) {
            let d = (a - b).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}
