//! Cartesian-product sweeps over parameter axes.

use rayon::prelude::*;

use super::output::{Field, Output, Record, Report};
use super::{commands, usage, CliError, PointSpec, RunConfig, SweepTarget, VerifyTarget};
use crate::integral::SParameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rho,
    H,
    Alpha,
    Xi,
    S(usize),
}

impl Axis {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "rho" => Ok(Axis::Rho),
            "h" => Ok(Axis::H),
            "alpha" => Ok(Axis::Alpha),
            "xi" => Ok(Axis::Xi),
            _ => name
                .strip_prefix("s_")
                .or_else(|| name.strip_prefix('s'))
                .and_then(|i| i.parse().ok())
                .map(Axis::S)
                .ok_or_else(|| usage(format!("unknown sweep axis {name:?}"))),
        }
    }

    pub fn column(self) -> String {
        match self {
            Axis::Rho => "rho".into(),
            Axis::H => "h".into(),
            Axis::Alpha => "alpha".into(),
            Axis::Xi => "xi".into(),
            Axis::S(i) => format!("s_{i}"),
        }
    }
}

fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("bad number {t:?} in sweep grid")))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(usage(format!("range {text:?} must be start:stop:count")));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad count in range {text:?}")))?;
        return match n {
            0 => Err(usage("range count must be at least 1")),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    text.split(',').map(num).collect()
}

/// Parses `name=values;name=values`.
pub fn parse_grid(spec: &str) -> Result<Vec<(Axis, Vec<f64>)>, CliError> {
    let mut axes: Vec<(Axis, Vec<f64>)> = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, vals) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("grid entry {part:?} lacks '='")))?;
        let axis = Axis::parse(name.trim())?;
        if axes.iter().any(|(a, _)| *a == axis) {
            return Err(usage(format!("axis {name} given twice")));
        }
        axes.push((axis, parse_values(vals)?));
    }
    if axes.is_empty() {
        return Err(usage("empty sweep grid"));
    }
    Ok(axes)
}

/// All grid points, first axis slowest.
fn points(axes: &[(Axis, Vec<f64>)]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, (_, vals)| {
        acc.into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect()
    })
}

fn apply(base: &RunConfig, axes: &[(Axis, Vec<f64>)], point: &[f64]) -> Result<RunConfig, CliError> {
    let mut cfg = base.clone();
    let mut s = cfg.s.values().to_vec();
    for ((axis, _), &v) in axes.iter().zip(point) {
        match axis {
            Axis::Rho => cfg.rho = v,
            Axis::H => cfg.h = v,
            Axis::Alpha => cfg.alpha = v,
            Axis::Xi => cfg.point = PointSpec::Xi(v),
            Axis::S(i) => {
                let k = s.len() - 1;
                *s.get_mut(*i)
                    .ok_or_else(|| usage(format!("axis s_{i} exceeds K = {k}")))? = v;
            }
        }
    }
    cfg.s = SParameters::new(s).map_err(usage)?;
    cfg.validate()?;
    Ok(cfg)
}

enum Row {
    Table(Record),
    Reports(Vec<Report>),
}

pub fn run(base: &RunConfig, target: SweepTarget, grid: &str) -> Result<Output, CliError> {
    let axes = parse_grid(grid)?;
    let configs = points(&axes)
        .iter()
        .map(|p| apply(base, &axes, p).map(|c| (p.clone(), c)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = configs
        .par_iter()
        .map(|(_, cfg)| -> Result<Row, CliError> {
            Ok(match target {
                SweepTarget::EvalSeries => Row::Table(commands::eval_series(cfg)?),
                SweepTarget::EvalSn => Row::Table(commands::eval_sn(cfg)?),
                SweepTarget::HeunMap => Row::Table(commands::heun_map(cfg)?),
                SweepTarget::Ode => Row::Reports(commands::verify(cfg, VerifyTarget::Ode)?),
                SweepTarget::GfOrder0 => Row::Reports(commands::verify(cfg, VerifyTarget::GfOrder0)?),
                SweepTarget::GfOrder1 => Row::Reports(commands::verify(cfg, VerifyTarget::GfOrder1)?),
                SweepTarget::GfOrder2 => Row::Reports(commands::verify(cfg, VerifyTarget::GfOrder2)?),
            })
        })
        .collect::<Vec<_>>();
    let verify = !matches!(
        target,
        SweepTarget::EvalSeries | SweepTarget::EvalSn | SweepTarget::HeunMap
    );
    let mut table = Vec::new();
    let mut reports = Vec::new();
    for ((point, _), row) in configs.iter().zip(rows) {
        match row? {
            Row::Table(rec) => {
                let mut full = Record::default();
                for ((axis, _), &v) in axes.iter().zip(point) {
                    if !rec.has(&axis.column()) {
                        full.push(&axis.column(), v);
                    }
                }
                full.0.extend(rec.0);
                table.push(full);
            }
            Row::Reports(reps) => {
                for mut r in reps {
                    for ((axis, _), &v) in axes.iter().zip(point) {
                        r.params.insert(axis.column(), Field::Num(v));
                    }
                    reports.push(r);
                }
            }
        }
    }
    Ok(if verify {
        Output::Reports(reports)
    } else {
        Output::Table(table)
    })
}
