use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::generator::{build_generator, build_labelled_generator};
use super::gram_schmidt::{gram_schmidt_in, OrthogonalProjection};
use super::reversible::reversible_measure;
use super::sector::{occupancy, LabelledSpace, SectorEnumeration};
use super::semigroup::semigroup_apply;
use super::system::SiteSystem;
use crate::error::{invalid, Result};
use crate::orthopoly::falling_factorial;
use crate::pointconfig::{Point, SymmetricFunctionSpec};
use crate::report::{combine, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum IntertwiningMode {
    /// `J_n(f, eta) = sum over ordered n-tuples of distinct particles of f`.
    Classical,
    /// `I_n(f, .)`: the projection of `J_n(f, .)` orthogonal to lower degrees in
    /// `L^2(rho_theta)`.
    Orthogonal { theta: f64 },
}

/// `f` evaluated on every labelled state, sites read as [`Point::Site`].
fn labelled_values(f: &SymmetricFunctionSpec, space: &LabelledSpace) -> Vec<f64> {
    space
        .states()
        .iter()
        .map(|x| {
            let pts: Vec<Point> = x.iter().map(|&s| Point::Site(s)).collect();
            f.eval(&pts)
        })
        .collect()
}

/// `J_n(g, eta) = sum_x g(x) prod_y (eta_y)_{occ_y(x)}` for `g` on labelled states.
fn classical_lift(g: &[f64], space: &LabelledSpace, sector: &SectorEnumeration) -> Vec<f64> {
    let m = space.sites();
    let occ: Vec<Vec<u32>> = space.states().iter().map(|x| occupancy(x, m)).collect();
    sector
        .configs()
        .iter()
        .map(|eta| {
            occ.iter()
                .zip(g)
                .map(|(d, gx)| {
                    let w: f64 = d.iter().zip(eta).map(|(&k, &e)| falling_factorial(f64::from(e), k)).product();
                    gx * w
                })
                .sum()
        })
        .collect()
}

/// `I_n(g, eta) = sum_x g(x) Pi(occ(x))(eta)` with `Pi(d)` the orthogonal
/// projection of `prod_y eta_y^{d_y}`.
fn orthogonal_lift(
    g: &[f64],
    space: &LabelledSpace,
    sector: &SectorEnumeration,
    projections: &HashMap<Vec<u32>, OrthogonalProjection>,
) -> Vec<f64> {
    let m = space.sites();
    let occ: Vec<&OrthogonalProjection> = space.states().iter().map(|x| &projections[&occupancy(x, m)]).collect();
    sector
        .configs()
        .iter()
        .map(|eta| occ.iter().zip(g).map(|(p, gx)| gx * p.eval_counts(eta)).sum())
        .collect()
}

/// Compares `P_t L_n(f, .)(eta)` with `L_n(p_t^{[n]} f, eta)` for every `eta` with
/// `particles` particles, where `L_n` is `J_n` or `I_n` and `p_t^{[n]}` is the
/// labelled `n`-particle semigroup.
pub fn check_intertwining(
    sys: &SiteSystem,
    n: usize,
    particles: usize,
    t: f64,
    f: &SymmetricFunctionSpec,
    mode: IntertwiningMode,
    tolerance: f64,
) -> Result<VerificationReport> {
    f.check_arity(n)?;
    if n == 0 {
        return Err(invalid("intertwining needs n >= 1"));
    }
    let unlabelled = build_generator::<f64>(sys, particles)?;
    let labelled = build_labelled_generator::<f64>(sys, n)?;
    let values = labelled_values(f, &labelled.space);
    let moved = semigroup_apply(&labelled.q, t, &values)?;

    let (before, after) = match mode {
        IntertwiningMode::Classical => (
            classical_lift(&values, &labelled.space, &unlabelled.sector),
            classical_lift(&moved, &labelled.space, &unlabelled.sector),
        ),
        IntertwiningMode::Orthogonal { theta } => {
            let rho = reversible_measure(sys, theta)?;
            let mut projections = HashMap::new();
            for x in labelled.space.states() {
                let d = occupancy(x, sys.m());
                if let std::collections::hash_map::Entry::Vacant(slot) = projections.entry(d) {
                    let p = gram_schmidt_in(&rho.marginals, slot.key())?;
                    slot.insert(p);
                }
            }
            (
                orthogonal_lift(&values, &labelled.space, &unlabelled.sector, &projections),
                orthogonal_lift(&moved, &labelled.space, &unlabelled.sector, &projections),
            )
        }
    };
    let lhs = semigroup_apply(&unlabelled.q, t, &before)?;

    let check = match mode {
        IntertwiningMode::Classical => "intertwining_classical",
        IntertwiningMode::Orthogonal { .. } => "intertwining_orthogonal",
    };
    let inputs = json!({
        "system": sys, "n": n, "particles": particles, "t": t,
        "f": format!("{f:?}"), "mode": mode,
    });
    let parts: Vec<VerificationReport> = lhs
        .iter()
        .zip(&after)
        .map(|(l, r)| VerificationReport::exact(check, &inputs, *l, *r, tolerance))
        .collect();
    Ok(combine(check, &inputs, &parts))
}

/// Compares `(P_t F)(occ(x))` on the `n`-particle sector with `(p_t^{[n]} (F∘occ))(x)`
/// on labelled states, for a function `F` of the occupation numbers.
pub fn check_labelled_agreement(
    sys: &SiteSystem,
    n: usize,
    t: f64,
    f: &dyn Fn(&[u32]) -> f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let unlabelled = build_generator::<f64>(sys, n)?;
    let labelled = build_labelled_generator::<f64>(sys, n)?;
    let on_sector: Vec<f64> = unlabelled.sector.configs().iter().map(|eta| f(eta)).collect();
    let occ: Vec<Vec<u32>> = labelled.space.states().iter().map(|x| occupancy(x, sys.m())).collect();
    let on_labels: Vec<f64> = occ.iter().map(|o| f(o)).collect();
    let moved_sector = semigroup_apply(&unlabelled.q, t, &on_sector)?;
    let moved_labels = semigroup_apply(&labelled.q, t, &on_labels)?;
    let inputs = json!({ "system": sys, "n": n, "t": t });
    let parts: Vec<VerificationReport> = occ
        .iter()
        .zip(&moved_labels)
        .map(|(o, r)| {
            let i = unlabelled.sector.index_of(o).expect("labelled states map into the sector");
            VerificationReport::exact("labelled_agreement", &inputs, moved_sector[i], *r, tolerance)
        })
        .collect();
    Ok(combine("labelled_agreement", &inputs, &parts))
}
