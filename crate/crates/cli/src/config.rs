use std::path::Path;

use anyhow::{anyhow, Result};
use intertwine::discrete::{check_duality_sectors, DualityKind, IntertwiningMode, SiteSystem};
use intertwine::gsip::{ConductanceFn, GsipModel};
use intertwine::orthopoly::PolyParams;
use intertwine::pointconfig::{AlphaMeasure, Factor, Region, SymmetricFunctionSpec};
use intertwine::report::VerificationReport;
use intertwine::verify::{self, PointLaw};
use serde::{Deserialize, Serialize};

/// A suite: shared seed and sample count, and the checks to run in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellGroup {
    pub cells: Vec<Region>,
    pub degrees: Vec<u32>,
}

fn tol_1e_8() -> f64 {
    1e-8
}
fn tol_1e_9() -> f64 {
    1e-9
}
fn tol_1e_10() -> f64 {
    1e-10
}
fn tol_1e_12() -> f64 {
    1e-12
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Orthogonality {
        params: PolyParams,
        max_degree: u32,
        #[serde(default = "tol_1e_10")]
        tolerance: f64,
    },
    MeixnerConvolution {
        a: f64,
        b: f64,
        p: f64,
        max_degree: u32,
        max_x: u64,
        #[serde(default = "tol_1e_10")]
        tolerance: f64,
    },
    PartitionIdentities {
        instances: usize,
        max_points: usize,
        max_degree: usize,
        #[serde(default = "tol_1e_12")]
        tolerance: f64,
    },
    Consistency {
        system: SiteSystem,
        max_n: usize,
        #[serde(default = "yes")]
        exact: bool,
        #[serde(default = "tol_1e_12")]
        tolerance: f64,
    },
    DetailedBalance {
        system: SiteSystem,
        theta: f64,
        max_n: usize,
        #[serde(default = "tol_1e_12")]
        tolerance: f64,
    },
    Intertwining {
        system: SiteSystem,
        n: usize,
        particles: usize,
        t: f64,
        f: Vec<Factor>,
        mode: IntertwiningMode,
        #[serde(default = "tol_1e_9")]
        tolerance: f64,
    },
    Duality {
        system: SiteSystem,
        theta: f64,
        kind: DualityKind,
        t: f64,
        n_xi: usize,
        n_eta: usize,
        #[serde(default = "tol_1e_10")]
        tolerance: f64,
    },
    LambdaOrthogonality {
        alpha: AlphaMeasure,
        p: f64,
        cells: Vec<Region>,
        degrees: Vec<u32>,
        #[serde(default = "tol_1e_8")]
        tolerance: f64,
    },
    MeixnerProduct {
        alpha: AlphaMeasure,
        p: f64,
        cells: Vec<Region>,
        degrees: Vec<u32>,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default = "tol_1e_8")]
        tolerance: f64,
    },
    CharlierProduct {
        lambda: AlphaMeasure,
        cells: Vec<Region>,
        degrees: Vec<u32>,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default = "tol_1e_8")]
        tolerance: f64,
    },
    Factorization {
        law: PointLaw,
        alpha: AlphaMeasure,
        groups: Vec<CellGroup>,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default = "tol_1e_8")]
        tolerance: f64,
    },
    PascalSampler {
        alpha: AlphaMeasure,
        p: f64,
        cells: Vec<Region>,
        #[serde(default)]
        laplace: Vec<Factor>,
        #[serde(default)]
        samples: Option<usize>,
    },
    GsipStationarity {
        alpha: AlphaMeasure,
        c: ConductanceFn,
        p: f64,
        t: f64,
        cells: Vec<Region>,
        #[serde(default)]
        samples: Option<usize>,
    },
    GsipReduction {
        alpha: AlphaMeasure,
        c: ConductanceFn,
        cells: Vec<Region>,
        eta0: Vec<f64>,
        t: f64,
        #[serde(default)]
        samples: Option<usize>,
    },
    ReducedDetailedBalance {
        alpha: AlphaMeasure,
        c: ConductanceFn,
        cells: Vec<Region>,
        p: f64,
        max_particles: usize,
    },
    GsipIntertwining {
        alpha: AlphaMeasure,
        c: ConductanceFn,
        eta0: Vec<f64>,
        f: Vec<Factor>,
        t: f64,
        #[serde(default)]
        samples: Option<usize>,
    },
}

/// Seed and sample count resolved for one check.
#[derive(Debug, Clone, Copy)]
pub struct RunContext {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl RunContext {
    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| anyhow!("Monte Carlo checks need a seed (config \"seed\" or --seed)"))
    }

    fn samples(&self, own: Option<usize>) -> Result<usize> {
        self.samples
            .or(own)
            .ok_or_else(|| anyhow!("Monte Carlo checks need a sample count (config \"samples\" or --samples)"))
    }
}

impl CheckSpec {
    /// Whether the check draws random numbers.
    pub fn is_random(&self) -> bool {
        !matches!(
            self,
            CheckSpec::Orthogonality { .. }
                | CheckSpec::MeixnerConvolution { .. }
                | CheckSpec::Consistency { .. }
                | CheckSpec::DetailedBalance { .. }
                | CheckSpec::Intertwining { .. }
                | CheckSpec::Duality { .. }
                | CheckSpec::LambdaOrthogonality { .. }
                | CheckSpec::ReducedDetailedBalance { .. }
        )
    }

    fn own_samples(&self) -> Option<usize> {
        match self {
            CheckSpec::MeixnerProduct { samples, .. }
            | CheckSpec::CharlierProduct { samples, .. }
            | CheckSpec::Factorization { samples, .. }
            | CheckSpec::PascalSampler { samples, .. }
            | CheckSpec::GsipStationarity { samples, .. }
            | CheckSpec::GsipReduction { samples, .. }
            | CheckSpec::GsipIntertwining { samples, .. } => *samples,
            _ => None,
        }
    }

    /// Checks that a seed and sample count are available where needed.
    pub fn validate(&self, ctx: &RunContext) -> Result<()> {
        if self.is_random() {
            ctx.seed()?;
            if !matches!(self, CheckSpec::PartitionIdentities { .. }) {
                ctx.samples(self.own_samples())?;
            }
        }
        Ok(())
    }

    pub fn run(&self, ctx: &RunContext) -> Result<VerificationReport> {
        let report = match self {
            CheckSpec::Orthogonality { params, max_degree, tolerance } => {
                verify::orthogonality_check(*params, *max_degree, *tolerance)?
            }
            CheckSpec::MeixnerConvolution { a, b, p, max_degree, max_x, tolerance } => {
                verify::meixner_convolution_check(*a, *b, *p, *max_degree, *max_x, *tolerance)?
            }
            CheckSpec::PartitionIdentities { instances, max_points, max_degree, tolerance } => {
                verify::partition_identity_check(*instances, *max_points, *max_degree, ctx.seed()?, *tolerance)?
            }
            CheckSpec::Consistency { system, max_n, exact, tolerance } => {
                verify::consistency_check(system, *max_n, *exact, *tolerance)?
            }
            CheckSpec::DetailedBalance { system, theta, max_n, tolerance } => {
                verify::detailed_balance_check(system, *theta, *max_n, *tolerance)?
            }
            CheckSpec::Intertwining { system, n, particles, t, f, mode, tolerance } => {
                let f = SymmetricFunctionSpec::Tensor(f.clone());
                verify::exact_intertwining_discrete(system, *n, *particles, *t, &f, *mode, *tolerance)?
            }
            CheckSpec::Duality { system, theta, kind, t, n_xi, n_eta, tolerance } => {
                check_duality_sectors(system, *theta, *kind, *t, *n_xi, *n_eta, *tolerance)?
            }
            CheckSpec::LambdaOrthogonality { alpha, p, cells, degrees, tolerance } => {
                verify::lambda_orthogonality_check(alpha, *p, cells, degrees, *tolerance)?
            }
            CheckSpec::MeixnerProduct { alpha, p, cells, degrees, samples, tolerance } => {
                verify::meixner_product_check(alpha, *p, cells, degrees, ctx.samples(*samples)?, ctx.seed()?, *tolerance)?
            }
            CheckSpec::CharlierProduct { lambda, cells, degrees, samples, tolerance } => {
                verify::charlier_product_check(lambda, cells, degrees, ctx.samples(*samples)?, ctx.seed()?, *tolerance)?
            }
            CheckSpec::Factorization { law, alpha, groups, samples, tolerance } => {
                let groups: Vec<(Vec<Region>, Vec<u32>)> =
                    groups.iter().map(|g| (g.cells.clone(), g.degrees.clone())).collect();
                verify::factorization_check(*law, alpha, &groups, ctx.samples(*samples)?, ctx.seed()?, *tolerance)?
            }
            CheckSpec::PascalSampler { alpha, p, cells, laplace, samples } => {
                let model = GsipModel::new(alpha.clone(), ConductanceFn::Constant { kappa: 0.0 })?;
                verify::pascal_sampler_check(&model, *p, cells, laplace, ctx.samples(*samples)?, ctx.seed()?)?
            }
            CheckSpec::GsipStationarity { alpha, c, p, t, cells, samples } => {
                let model = GsipModel::new(alpha.clone(), c.clone())?;
                verify::stationarity_check_gsip(&model, *p, *t, ctx.samples(*samples)?, cells, ctx.seed()?)?
            }
            CheckSpec::GsipReduction { alpha, c, cells, eta0, t, samples } => {
                let model = GsipModel::new(alpha.clone(), c.clone())?;
                verify::reduction_check_gsip(&model, cells, eta0, *t, ctx.samples(*samples)?, ctx.seed()?)?
            }
            CheckSpec::ReducedDetailedBalance { alpha, c, cells, p, max_particles } => {
                let model = GsipModel::new(alpha.clone(), c.clone())?;
                verify::reduced_detailed_balance(&model, cells, *p, *max_particles)?
            }
            CheckSpec::GsipIntertwining { alpha, c, eta0, f, t, samples } => {
                let model = GsipModel::new(alpha.clone(), c.clone())?;
                let f = SymmetricFunctionSpec::Tensor(f.clone());
                verify::mc_classical_intertwining_gsip(&model, eta0, &f, *t, ctx.samples(*samples)?, ctx.seed()?)?
            }
        };
        Ok(report)
    }
}

/// Parses a suite file; errors carry `path:line:column`.
pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow!("cannot read {}: {e}", path.display()))?;
    parse(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

/// Parses suite JSON; errors read `line:column: message`.
pub fn parse(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde_json appends " at line L column C"; move the position to the front
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        anyhow!("{}:{}: {msg}", e.line(), e.column())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_reports_position() {
        let err = parse("{\n  \"checks\": [\n    {\"check\": \"nonsense\"}\n  ]\n}").unwrap_err().to_string();
        assert!(err.starts_with("3:"), "{err}");
        assert!(err.contains("nonsense"), "{err}");
    }

    #[test]
    fn invalid_system_is_rejected_while_parsing() {
        let text = r#"{"checks": [{"check": "consistency", "max_n": 2,
            "system": {"m": 2, "c": [[1, 1], [1, 0]], "alpha": [1, 1], "sigma": 0}}]}"#;
        assert!(parse(text).is_err());
    }

    #[test]
    fn random_checks_need_seed_and_samples() {
        let text = r#"{"checks": [{"check": "pascal_sampler", "alpha": {"cells": [1.0]}, "p": 0.5,
            "cells": [{"interval": [0.0, 0.5]}]}]}"#;
        let cfg = parse(text).unwrap();
        let check = &cfg.checks[0];
        assert!(check.is_random());
        assert!(check.validate(&RunContext { seed: None, samples: Some(10) }).is_err());
        assert!(check.validate(&RunContext { seed: Some(1), samples: None }).is_err());
        assert!(check.validate(&RunContext { seed: Some(1), samples: Some(10) }).is_ok());
    }

    #[test]
    fn defaults_fill_tolerances() {
        let text = r#"{"checks": [{"check": "orthogonality", "params": {"family": "charlier", "alpha": 1.0}, "max_degree": 3}]}"#;
        let cfg = parse(text).unwrap();
        match &cfg.checks[0] {
            CheckSpec::Orthogonality { tolerance, .. } => assert_eq!(*tolerance, 1e-10),
            other => panic!("{other:?}"),
        }
        assert!(!cfg.checks[0].is_random());
    }
}
