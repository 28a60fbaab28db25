//! File outputs of a plan: cost and line tables, the iteration trace, sweep
//! curves and a GeoJSON map.
//!
//! Everything is written with fixed float formatting and in model order, so
//! the same inputs give byte-identical files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::analysis::{BcrCurve, ValueReport};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::planner::{fmt_f, PlanOutcome};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Write wall-clock times into `iterations.csv`.
    pub timings: bool,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Backend(format!("writing {}: {e}", path.display()))
}

/// Writes `costs.csv`: one row per cost family, then the total and the LP
/// objective it must match.
pub fn write_costs(path: &Path, out: &PlanOutcome) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = csv_err(path);
    let costs = &out.solution.costs;
    w.write_record(["component", "usd_per_year"]).map_err(&err)?;
    for (name, v) in crate::lp::CostBreakdown::NAMES.iter().zip(costs.values()) {
        w.write_record([name.to_string(), fmt_f(v)]).map_err(&err)?;
    }
    w.write_record(["total".to_string(), fmt_f(costs.total())]).map_err(&err)?;
    w.write_record(["objective".to_string(), fmt_f(out.objective())])
        .map_err(&err)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `lines.csv` with initial and planned capacity of every AC line
/// and DC link, plus the SSSC rating on AC lines.
pub fn write_lines(path: &Path, net: &Network, out: &PlanOutcome) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = csv_err(path);
    let sol = &out.solution;
    let ac = sol.ac_capacity();
    let dc = sol.dc_capacity();
    let q = sol.sssc_capacity();
    w.write_record(["kind", "id", "from_bus", "to_bus", "f0_mw", "f_star_mw", "q_star_mvar"])
        .map_err(&err)?;
    for (l, line) in net.ac_lines.iter().enumerate() {
        w.write_record([
            "ac",
            &line.id,
            &line.from_bus,
            &line.to_bus,
            &fmt_f(line.f0),
            &fmt_f(ac[l]),
            &fmt_f(q[l]),
        ])
        .map_err(&err)?;
    }
    for (i, link) in net.dc_links.iter().enumerate() {
        w.write_record(["dc", &link.id, &link.from_bus, &link.to_bus, &fmt_f(link.f0), &fmt_f(dc[i]), ""])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_iterations(path: &Path, out: &PlanOutcome, timings: bool) -> Result<()> {
    out.state.write_csv(create(path)?, timings)
}

pub fn write_bcr(path: &Path, curve: &BcrCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = csv_err(path);
    w.write_record([
        "cap_gvar",
        "cost",
        "saving",
        "sssc_invest_cost",
        "installed_gvar",
        "interval_bcr",
        "converged",
    ])
    .map_err(&err)?;
    for p in &curve.points {
        let cap = if p.cap_gvar.is_finite() { fmt_f(p.cap_gvar) } else { "inf".into() };
        w.write_record([
            cap,
            fmt_f(p.cost),
            fmt_f(p.saving),
            fmt_f(p.sssc_invest_cost),
            fmt_f(p.installed_gvar),
            p.interval_bcr.map(fmt_f).unwrap_or_default(),
            p.converged.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// GeoJSON of buses, lines and installed SSSCs. Elements without
/// coordinates are skipped.
pub fn network_geojson(net: &Network, out: Option<&PlanOutcome>) -> Value {
    let coord = |bus: &str| net.bus_index(bus).and_then(|b| net.buses[b].coordinates);
    let point = |(x, y): (f64, f64)| json!([round6(x), round6(y)]);
    let mut features = Vec::new();
    for bus in &net.buses {
        if let Some(c) = bus.coordinates {
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": point(c)},
                "properties": {"kind": "bus", "id": bus.id, "component": bus.component_label},
            }));
        }
    }
    let (ac, dc, q) = match out {
        Some(o) => (
            Some(o.solution.ac_capacity()),
            Some(o.solution.dc_capacity()),
            Some(o.solution.sssc_capacity()),
        ),
        None => (None, None, None),
    };
    for (l, line) in net.ac_lines.iter().enumerate() {
        let (Some(a), Some(b)) = (coord(&line.from_bus), coord(&line.to_bus)) else {
            continue;
        };
        let f_star = ac.as_ref().map_or(line.f0, |v| v[l]);
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": [point(a), point(b)]},
            "properties": {"kind": "ac_line", "id": line.id, "f0_mw": round6(line.f0), "f_star_mw": round6(f_star)},
        }));
        let q_l = q.as_ref().map_or(0.0, |v| v[l]);
        if q_l > 1e-6 {
            let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": point(mid)},
                "properties": {"kind": "sssc", "line": line.id, "q_mvar": round6(q_l)},
            }));
        }
    }
    for (i, link) in net.dc_links.iter().enumerate() {
        let (Some(a), Some(b)) = (coord(&link.from_bus), coord(&link.to_bus)) else {
            continue;
        };
        let f_star = dc.as_ref().map_or(link.f0, |v| v[i]);
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": [point(a), point(b)]},
            "properties": {"kind": "dc_link", "id": link.id, "f0_mw": round6(link.f0), "f_star_mw": round6(f_star)},
        }));
    }
    json!({"type": "FeatureCollection", "features": features})
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, v).map_err(|e| Error::Backend(format!("writing {}: {e}", path.display())))?;
    f.write_all(b"\n").and_then(|_| f.flush()).map_err(|e| Error::io(path, e))
}

pub fn write_value_report(path: &Path, report: &ValueReport) -> Result<()> {
    write_json(path, report)
}

/// Writes the standard output set for one plan into `dir` and returns the
/// paths written.
pub fn emit_report(dir: &Path, net: &Network, out: &PlanOutcome, opts: ReportOptions) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let costs = dir.join("costs.csv");
    let lines = dir.join("lines.csv");
    let iters = dir.join("iterations.csv");
    let geo = dir.join("network.geojson");
    write_costs(&costs, out)?;
    write_lines(&lines, net, out)?;
    write_iterations(&iters, out, opts.timings)?;
    write_json(&geo, &network_geojson(net, Some(out)))?;
    Ok(vec![costs, lines, iters, geo])
}
