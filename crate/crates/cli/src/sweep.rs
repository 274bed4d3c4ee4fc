//! Cartesian-product parameter sweeps.

use std::cmp::Ordering;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use dlh_core::holonomy::HolonomyOptions;
use dlh_core::PhysicalConfig;
use rayon::prelude::*;
use serde_json::json;

use crate::args::{SweepArgs, SweepTarget};
use crate::commands::{phase_values, run_holonomy};
use crate::output::{Artifact, Cell, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Area,
    Ex1,
    Ex2,
    Ey1,
    Ey2,
    Lam1,
    Lam2,
    B1,
    B2,
    Steps,
}

impl AxisName {
    fn label(self) -> &'static str {
        match self {
            AxisName::Area => "area",
            AxisName::Ex1 => "Ex1",
            AxisName::Ex2 => "Ex2",
            AxisName::Ey1 => "Ey1",
            AxisName::Ey2 => "Ey2",
            AxisName::Lam1 => "lam1",
            AxisName::Lam2 => "lam2",
            AxisName::B1 => "B1",
            AxisName::B2 => "B2",
            AxisName::Steps => "steps",
        }
    }
}

impl FromStr for AxisName {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "area" | "S1" => AxisName::Area,
            "Ex1" => AxisName::Ex1,
            "Ex2" => AxisName::Ex2,
            "Ey1" => AxisName::Ey1,
            "Ey2" => AxisName::Ey2,
            "lam1" => AxisName::Lam1,
            "lam2" => AxisName::Lam2,
            "B1" => AxisName::B1,
            "B2" => AxisName::B2,
            "steps" => AxisName::Steps,
            _ => bail!("unknown sweep axis '{s}'"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

/// Parses `name=v1,v2,...` or `name=lo:hi:count`.
pub fn parse_axis(spec: &str) -> Result<Axis> {
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("axis '{spec}' must look like name=values"))?;
    let name: AxisName = name.trim().parse()?;
    let range = range.trim();
    if range.is_empty() {
        bail!("axis {} has an empty range", name.label());
    }
    let values = if range.contains(':') {
        let parts: Vec<&str> = range.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            bail!("axis {}: range must be lo:hi:count", name.label());
        };
        let (lo, hi): (f64, f64) = (lo.trim().parse()?, hi.trim().parse()?);
        let count: usize = count.trim().parse()?;
        if count >= 2 && lo == hi {
            bail!("axis {}: empty range {lo}:{hi}", name.label());
        }
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count.max(2) - 1) as f64)
            .collect()
    } else {
        range
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| anyhow!("axis {}: '{v}': {e}", name.label())))
            .collect::<Result<Vec<_>>>()?
    };
    let mut distinct = values.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        bail!("axis {} needs at least 2 distinct samples, got {}", name.label(), distinct.len());
    }
    if values.iter().any(|v| !v.is_finite()) {
        bail!("axis {}: samples must be finite", name.label());
    }
    if name == AxisName::Steps && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
        bail!("axis steps: samples must be positive integers");
    }
    Ok(Axis { name, values: distinct })
}

fn product(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new()];
    for axis in axes {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                axis.values.iter().map(move |v| {
                    let mut r = r.clone();
                    r.push(*v);
                    r
                })
            })
            .collect();
    }
    rows
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn evaluate(args: &SweepArgs, config: &PhysicalConfig, axes: &[Axis], values: &[f64]) -> Result<Vec<f64>> {
    let mut path = args.path.clone();
    let mut area = args.area;
    let mut steps = args.steps;
    for (axis, &v) in axes.iter().zip(values) {
        match axis.name {
            AxisName::Area => area = Some(v),
            AxisName::Ex1 => path.ex1 = Some(v),
            AxisName::Ex2 => path.ex2 = Some(v),
            AxisName::Ey1 => path.ey1 = Some(v),
            AxisName::Ey2 => path.ey2 = Some(v),
            AxisName::Lam1 => path.lam1 = Some(v),
            AxisName::Lam2 => path.lam2 = Some(v),
            AxisName::B1 => path.b1 = Some(v),
            AxisName::B2 => path.b2 = Some(v),
            AxisName::Steps => steps = v as usize,
        }
    }
    match args.target {
        SweepTarget::Phase => {
            let p = phase_values(&path, area, config)?;
            Ok(vec![p.area, p.gamma_paper, p.gamma_oracle_consistent, p.curvature_times_area])
        }
        SweepTarget::Holonomy => {
            let opts = HolonomyOptions::default().with_steps(steps).with_scheme(args.scheme);
            let r = run_holonomy(&path, config, args.window, &opts, None)?.result;
            Ok(vec![r.distance_from_identity(), r.unitarity_defect, r.convergence_estimate])
        }
    }
}

pub fn sweep(config: &PhysicalConfig, args: &SweepArgs) -> Result<Artifact> {
    let axes = args.axes.iter().map(|s| parse_axis(s)).collect::<Result<Vec<_>>>()?;
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            bail!("axis {} given twice", a.name.label());
        }
        let ok = match args.target {
            SweepTarget::Phase => a.name != AxisName::Steps,
            SweepTarget::Holonomy => a.name != AxisName::Area,
        };
        if !ok {
            bail!("axis {} does not apply to a {:?} sweep", a.name.label(), args.target);
        }
    }
    let mut points = product(&axes);
    points.sort_by(|a, b| lexicographic(a, b));
    let metrics: &[&str] = match args.target {
        SweepTarget::Phase => &["area", "gamma_paper", "gamma_oracle_consistent", "curvature_times_area"],
        SweepTarget::Holonomy => &["distance_from_identity", "unitarity_defect", "convergence_estimate"],
    };
    let results = points
        .par_iter()
        .map(|p| evaluate(args, config, &axes, p))
        .collect::<Vec<_>>();

    // The loop area is reported once, as an axis if it is swept.
    let skip_area = axes.iter().any(|a| a.name == AxisName::Area);
    let keep = |m: &str| !(skip_area && m == "area");
    let mut header: Vec<&str> = axes.iter().map(|a| a.name.label()).collect();
    header.extend(metrics.iter().copied().filter(|m| keep(m)));
    let mut table = Table::new(&header);
    let mut rows = Vec::with_capacity(points.len());
    for (p, r) in points.iter().zip(results) {
        let r = r?;
        let mut row: Vec<Cell> = axes
            .iter()
            .zip(p)
            .map(|(a, &v)| if a.name == AxisName::Steps { Cell::from(v as usize) } else { Cell::from(v) })
            .collect();
        let r: Vec<f64> = metrics.iter().zip(r).filter(|(m, _)| keep(m)).map(|(_, v)| v).collect();
        row.extend(r.iter().map(|&v| Cell::from(v)));
        table.push(row);
        rows.push(p.iter().chain(&r).copied().collect::<Vec<f64>>());
    }
    Ok(Artifact {
        json: json!({ "target": format!("{:?}", args.target).to_lowercase(), "columns": header, "rows": rows }),
        table: Some(table),
        default_format: Format::Csv,
    })
}
