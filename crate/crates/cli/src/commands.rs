use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use intertwine::gsip::{
    cell_counts, labelled_gsip_simulate, sample_pascal_with, uniform_cells, ConductanceFn, GsipEvent, GsipModel,
    GsipTrajectoryConfig, DEFAULT_MAX_EVENTS,
};
use intertwine::orthopoly::PolyParams;
use intertwine::pointconfig::AlphaMeasure;
use intertwine::rng::substream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Writes to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

/// CSV `draw,cell_0,..,cell_{k-1}` of Pascal cell counts; draw `r` uses stream `r`.
pub fn pascal_counts_csv(alpha: &AlphaMeasure, p: f64, cells: usize, draws: usize, seed: u64) -> Result<String> {
    if cells == 0 {
        return Err(anyhow!("--cells must be positive"));
    }
    let model = GsipModel::new(alpha.clone(), ConductanceFn::Constant { kappa: 0.0 })?;
    let regions = uniform_cells(cells);
    let rows: Vec<Vec<u32>> = (0..draws)
        .into_par_iter()
        .map(|r| Ok(cell_counts(&sample_pascal_with(&model, p, &mut substream(seed, r as u64))?, &regions)))
        .collect::<intertwine::Result<_>>()?;
    let mut out = String::from("draw");
    for k in 0..cells {
        write!(out, ",cell_{k}")?;
    }
    out.push('\n');
    for (r, row) in rows.iter().enumerate() {
        write!(out, "{r}")?;
        for v in row {
            write!(out, ",{v}")?;
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn sample_pascal(
    alpha: Option<&Path>,
    mass: f64,
    p: f64,
    cells: usize,
    draws: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let alpha = match alpha {
        Some(path) => read_json(path)?,
        None => AlphaMeasure::uniform(mass)?,
    };
    emit(out, &pascal_counts_csv(&alpha, p, cells, draws, seed)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectorySpec {
    alpha: AlphaMeasure,
    c: ConductanceFn,
    eta0: Vec<f64>,
    t_end: f64,
    #[serde(default)]
    max_events: Option<u64>,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum TrajectoryLine<'a> {
    Start { time: f64, positions: &'a [f64] },
    Event(&'a GsipEvent),
    End { time: f64, positions: &'a [f64] },
}

pub fn simulate_gsip(config: &Path, seed: u64, out: Option<&Path>) -> Result<()> {
    let spec: TrajectorySpec = read_json(config)?;
    let cfg = GsipTrajectoryConfig {
        t_end: spec.t_end,
        seed,
        max_events: spec.max_events.unwrap_or(DEFAULT_MAX_EVENTS),
    };
    let (end, log) = labelled_gsip_simulate(&spec.eta0, &spec.c, &spec.alpha, &cfg)?;
    let mut text = String::new();
    let mut line = |l: TrajectoryLine| -> Result<()> {
        text.push_str(&serde_json::to_string(&l)?);
        text.push('\n');
        Ok(())
    };
    line(TrajectoryLine::Start { time: 0.0, positions: &spec.eta0 })?;
    for e in &log {
        line(TrajectoryLine::Event(e))?;
    }
    line(TrajectoryLine::End { time: spec.t_end, positions: &end })?;
    emit(out, &text)
}

/// CSV `n,x,value` for `0 <= n <= max_degree`, `0 <= x <= max_x`.
pub fn polynomial_table(params: PolyParams, max_degree: u32, max_x: u64) -> Result<String> {
    params.validate()?;
    let mut out = String::from("n,x,value\n");
    for n in 0..=max_degree {
        for x in 0..=max_x {
            writeln!(out, "{n},{x},{}", params.eval(n, x)?)?;
        }
    }
    Ok(out)
}

pub fn emit_polynomials(params: PolyParams, max_degree: u32, max_x: u64, out: Option<&Path>) -> Result<()> {
    emit(out, &polynomial_table(params, max_degree, max_x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meixner_table_size() {
        let t = polynomial_table(PolyParams::Meixner { a: 1.0, p: 0.5 }, 5, 20).unwrap();
        assert_eq!(t.lines().count(), 127);
        assert!(t.contains("\n1,0,-1\n"));
    }

    #[test]
    fn pascal_csv_is_deterministic() {
        let alpha = AlphaMeasure::uniform(2.0).unwrap();
        let a = pascal_counts_csv(&alpha, 0.5, 4, 50, 7).unwrap();
        assert_eq!(a, pascal_counts_csv(&alpha, 0.5, 4, 50, 7).unwrap());
        assert_eq!(a.lines().count(), 51);
        assert!(a.starts_with("draw,cell_0,cell_1,cell_2,cell_3\n"));
    }
}
