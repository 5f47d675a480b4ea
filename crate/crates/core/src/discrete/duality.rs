use serde::{Deserialize, Serialize};
use serde_json::json;

use super::generator::build_generator;
use super::reversible::{reversible_measure, ReversibleMeasure};
use super::semigroup::semigroup_apply;
use super::system::SiteSystem;
use crate::error::{invalid, Error, Result};
use crate::orthopoly::{charlier, falling_factorial, meixner, KrawtchoukBasis};
use crate::report::{combine, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualityKind {
    /// `1{eta = xi} / rho(xi)`
    Cheap,
    /// `prod_x (eta_x)_{xi_x} / (rho_x(xi_x) xi_x!)`
    Classical,
    /// `prod_x P_{xi_x}(eta_x) / (rho_x(xi_x) xi_x!)` with the monic orthogonal
    /// polynomials of `rho_x`.
    Orthogonal,
}

impl DualityKind {
    pub const ALL: [DualityKind; 3] = [DualityKind::Cheap, DualityKind::Classical, DualityKind::Orthogonal];

    pub fn name(self) -> &'static str {
        match self {
            DualityKind::Cheap => "cheap",
            DualityKind::Classical => "classical",
            DualityKind::Orthogonal => "orthogonal",
        }
    }
}

/// Self-duality functions of a site system relative to its reversible measure
/// `rho_theta`.
#[derive(Debug, Clone)]
pub struct DualityFunctions {
    sys: SiteSystem,
    rho: ReversibleMeasure,
    krawtchouk: Vec<Option<KrawtchoukBasis<f64>>>,
}

impl DualityFunctions {
    pub fn new(sys: &SiteSystem, theta: f64) -> Result<Self> {
        if sys.sigma() == -1 && theta >= 1.0 {
            return Err(invalid("duality functions for exclusion need theta < 1"));
        }
        let rho = reversible_measure(sys, theta)?;
        let krawtchouk = sys
            .alpha()
            .iter()
            .map(|&a| {
                if sys.sigma() == -1 {
                    KrawtchoukBasis::new(a as u32, theta).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { sys: sys.clone(), rho, krawtchouk })
    }

    pub fn measure(&self) -> &ReversibleMeasure {
        &self.rho
    }

    fn site_norm(&self, x: usize, k: u32) -> f64 {
        self.rho.marginals[x].pmf(k.into()) * falling_factorial(f64::from(k), k)
    }

    fn orthogonal_poly(&self, x: usize, k: u32, eta: u32) -> f64 {
        let a = self.sys.alpha()[x];
        let theta = self.rho.theta;
        match self.sys.sigma() {
            -1 => self.krawtchouk[x]
                .as_ref()
                .expect("bases are built for exclusion")
                .eval(k, eta.into())
                .unwrap_or(0.0),
            0 => charlier(k, eta.into(), a * theta),
            _ => meixner(k, eta.into(), a, theta / (1.0 + theta)),
        }
    }

    pub fn eval(&self, kind: DualityKind, xi: &[u32], eta: &[u32]) -> Result<f64> {
        let m = self.sys.m();
        if xi.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: xi.len() });
        }
        if eta.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: eta.len() });
        }
        Ok(match kind {
            DualityKind::Cheap => {
                if xi == eta {
                    1.0 / self.rho.pmf(xi)
                } else {
                    0.0
                }
            }
            DualityKind::Classical => (0..m)
                .map(|x| falling_factorial(f64::from(eta[x]), xi[x]) / self.site_norm(x, xi[x]))
                .product(),
            DualityKind::Orthogonal => (0..m)
                .map(|x| self.orthogonal_poly(x, xi[x], eta[x]) / self.site_norm(x, xi[x]))
                .product(),
        })
    }
}

/// `|E_eta D(xi, eta_t) - E_xi D(xi_t, eta)|` for one pair of configurations.
pub fn check_duality(
    sys: &SiteSystem,
    theta: f64,
    kind: DualityKind,
    t: f64,
    xi: &[u32],
    eta: &[u32],
    tolerance: f64,
) -> Result<VerificationReport> {
    let d = DualityFunctions::new(sys, theta)?;
    let n_xi = xi.iter().sum::<u32>() as usize;
    let n_eta = eta.iter().sum::<u32>() as usize;
    let gx = build_generator::<f64>(sys, n_xi)?;
    let ge = build_generator::<f64>(sys, n_eta)?;
    let i_xi = gx.sector.index_of(xi).ok_or_else(|| invalid(format!("xi = {xi:?} is not an admissible configuration")))?;
    let i_eta = ge.sector.index_of(eta).ok_or_else(|| invalid(format!("eta = {eta:?} is not an admissible configuration")))?;
    let over_eta: Vec<f64> = ge.sector.configs().iter().map(|e| d.eval(kind, xi, e)).collect::<Result<_>>()?;
    let over_xi: Vec<f64> = gx.sector.configs().iter().map(|z| d.eval(kind, z, eta)).collect::<Result<_>>()?;
    let lhs = semigroup_apply(&ge.q, t, &over_eta)?[i_eta];
    let rhs = semigroup_apply(&gx.q, t, &over_xi)?[i_xi];
    let inputs = json!({ "system": sys, "theta": theta, "kind": kind, "t": t, "xi": xi, "eta": eta });
    Ok(VerificationReport::exact(&format!("duality_{}", kind.name()), &inputs, lhs, rhs, tolerance))
}

/// Worst case of [`check_duality`] over every `xi` with `n_xi` particles and
/// every `eta` with `n_eta` particles.
pub fn check_duality_sectors(
    sys: &SiteSystem,
    theta: f64,
    kind: DualityKind,
    t: f64,
    n_xi: usize,
    n_eta: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let d = DualityFunctions::new(sys, theta)?;
    let gx = build_generator::<f64>(sys, n_xi)?;
    let ge = build_generator::<f64>(sys, n_eta)?;
    // table[i][j] = D(xi_i, eta_j)
    let table: Vec<Vec<f64>> = gx
        .sector
        .configs()
        .iter()
        .map(|xi| ge.sector.configs().iter().map(|eta| d.eval(kind, xi, eta)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    // moved_eta[i][j] = E_{eta_j} D(xi_i, eta_t)
    let moved_eta: Vec<Vec<f64>> = table
        .iter()
        .map(|row| semigroup_apply(&ge.q, t, row))
        .collect::<Result<_>>()?;
    let inputs = json!({ "system": sys, "theta": theta, "kind": kind, "t": t, "n_xi": n_xi, "n_eta": n_eta });
    let check = format!("duality_{}", kind.name());
    let mut parts = Vec::with_capacity(ge.sector.len());
    for j in 0..ge.sector.len() {
        let column: Vec<f64> = table.iter().map(|row| row[j]).collect();
        let moved_xi = semigroup_apply(&gx.q, t, &column)?;
        for i in 0..gx.sector.len() {
            parts.push(VerificationReport::exact(&check, &inputs, moved_eta[i][j], moved_xi[i], tolerance));
        }
    }
    Ok(combine(&check, &inputs, &parts))
}
