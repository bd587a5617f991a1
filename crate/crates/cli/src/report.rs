//! Summary tables, layout dumps, and plot scripts from a finished run.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

use crate::experiment::Row;

/// Aggregate statistics of one (sweep value, method, precoder) cell.
#[derive(Debug, Clone)]
pub struct SummaryCell {
    pub sweep_axis: String,
    pub sweep_value: f64,
    pub method: String,
    pub precoder: String,
    pub draws: usize,
    pub mean_w: f64,
    pub min_w: f64,
    pub std_w: f64,
    pub iterations: usize,
    pub errors: usize,
}

/// Collapse raw rows into per-cell summaries, keyed and ordered by
/// (sweep value, method, precoder).
pub fn summarize(rows: &[Row]) -> Vec<SummaryCell> {
    let mut groups: BTreeMap<(String, String, String, String), Vec<&Row>> = BTreeMap::new();
    for r in rows {
        let key = (
            r.sweep_axis.clone(),
            format!("{:024.9}", r.sweep_value),
            r.method.clone(),
            r.precoder.clone(),
        );
        groups.entry(key).or_default().push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    for (_, cell_rows) in groups {
        let ok: Vec<f64> = cell_rows
            .iter()
            .filter(|r| r.status == "ok")
            .map(|r| r.min_power_w)
            .collect();
        let errors = cell_rows.len() - ok.len();
        let n = ok.len();
        let mean = if n > 0 { ok.iter().sum::<f64>() / n as f64 } else { f64::NAN };
        let min = ok.iter().cloned().fold(f64::INFINITY, f64::min);
        let var = if n > 1 {
            ok.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0)
        } else {
            0.0
        };
        let first = cell_rows[0];
        out.push(SummaryCell {
            sweep_axis: first.sweep_axis.clone(),
            sweep_value: first.sweep_value,
            method: first.method.clone(),
            precoder: first.precoder.clone(),
            draws: cell_rows.len(),
            mean_w: mean,
            min_w: if n > 0 { min } else { f64::NAN },
            std_w: var.sqrt(),
            iterations: first.iterations,
            errors,
        });
    }
    out
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

/// Write the summary CSV, a 2-D layout dump, and plot scripts that read
/// only the emitted files.
pub fn emit_report(rows: &[Row], out_dir: &Path) -> anyhow::Result<Vec<SummaryCell>> {
    if rows.is_empty() {
        anyhow::bail!("result table is empty");
    }
    std::fs::create_dir_all(out_dir)?;
    let cells = summarize(rows);
    let mut file = std::io::BufWriter::new(std::fs::File::create(out_dir.join("summary.csv"))?);
    writeln!(
        file,
        "sweep_axis,sweep_value,method,precoder,draws,mean_w,min_w,std_w,iterations,errors"
    )?;
    for c in &cells {
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{},{}",
            c.sweep_axis,
            fmt_f64(c.sweep_value),
            c.method,
            c.precoder,
            c.draws,
            fmt_f64(c.mean_w),
            fmt_f64(c.min_w),
            fmt_f64(c.std_w),
            c.iterations,
            c.errors
        )?;
    }
    file.flush()?;

    dump_layouts(out_dir)?;
    write_plot_scripts(out_dir)?;
    Ok(cells)
}

/// Collect the per-method layouts written by the run (first grid point of
/// each method) together with hotspot positions into one plot-friendly file.
fn dump_layouts(out_dir: &Path) -> anyhow::Result<()> {
    let cluster_path = out_dir.join("cluster.json");
    let deployments_dir = out_dir.join("deployments");
    if !cluster_path.exists() || !deployments_dir.exists() {
        return Ok(()); // report over a bare table; nothing to dump
    }
    let cluster: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cluster_path)?)?;
    let mut methods = serde_json::Map::new();
    let mut entries: Vec<_> = std::fs::read_dir(&deployments_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .collect();
    entries.sort();
    for path in entries {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("").to_string();
        let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        methods.insert(name, value);
    }
    let dump = serde_json::json!({
        "cluster": cluster,
        "deployments": methods,
    });
    std::fs::write(out_dir.join("layout_dump.json"), serde_json::to_string_pretty(&dump)?)
        .context("writing layout dump")?;
    Ok(())
}

fn write_plot_scripts(out_dir: &Path) -> anyhow::Result<()> {
    let sweep = r#"#!/usr/bin/env python3
"""Plot mean minimum received power per method over the sweep axis.

Reads summary.csv produced by the report stage; run from the output
directory or pass it as the first argument.
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
rows = list(csv.DictReader(open(out / "summary.csv")))
if not rows:
    raise SystemExit("summary.csv is empty")
axis = rows[0]["sweep_axis"]
for precoder in sorted({r["precoder"] for r in rows}):
    series = defaultdict(list)
    for r in rows:
        if r["precoder"] != precoder or r["mean_w"] == "NaN":
            continue
        series[r["method"]].append((float(r["sweep_value"]), float(r["mean_w"])))
    plt.figure(figsize=(6, 4))
    for method, pts in sorted(series.items()):
        pts.sort()
        plt.semilogy([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
    plt.xlabel(axis)
    plt.ylabel("mean min received power [W]")
    plt.title(f"{precoder} precoders")
    plt.grid(True, which="both", alpha=0.3)
    plt.legend()
    plt.tight_layout()
    plt.savefig(out / f"sweep_{precoder}.png", dpi=150)
    print(f"wrote sweep_{precoder}.png")
"#;
    let layout = r#"#!/usr/bin/env python3
"""Draw hotspots, cluster heads, and element positions per deployment.

Reads layout_dump.json; run from the output directory or pass it as the
first argument.
"""
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
dump = json.load(open(out / "layout_dump.json"))
cluster = dump["cluster"]
plt.figure(figsize=(7, 7))
for hs_list in [cluster.get("heads", [])]:
    xs = [h["x"] for h in hs_list]
    ys = [h["y"] for h in hs_list]
    plt.scatter(xs, ys, marker="s", s=60, label="cluster heads", zorder=5)
seen = set()
for name, stripes in sorted(dump["deployments"].items()):
    method = name.split("_", 2)[-1]
    if method in seen:
        continue
    seen.add(method)
    for stripe in stripes:
        xs = [e["x"] for e in stripe["layout"]["elements"]]
        ys = [e["y"] for e in stripe["layout"]["elements"]]
        plt.plot(xs, ys, ".-", ms=3, lw=0.7, alpha=0.8,
                 label=method if stripe is stripes[0] else None)
plt.xlabel("x [m]")
plt.ylabel("y [m]")
plt.axis("equal")
plt.grid(alpha=0.3)
plt.legend(fontsize=8)
plt.tight_layout()
plt.savefig(out / "layouts.png", dpi=150)
print("wrote layouts.png")
"#;
    std::fs::write(out_dir.join("plot_sweep.py"), sweep)?;
    std::fs::write(out_dir.join("plot_layouts.py"), layout)?;
    Ok(())
}

/// Parse a raw CSV back into rows (for the standalone report stage).
pub fn read_raw_csv(path: &Path) -> anyhow::Result<Vec<Row>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.splitn(9, ',').collect();
        if parts.len() != 9 {
            anyhow::bail!("malformed CSV line {}: {line}", lineno + 1);
        }
        let parse_f = |s: &str| -> f64 {
            if s == "NaN" {
                f64::NAN
            } else {
                s.parse().unwrap_or(f64::NAN)
            }
        };
        rows.push(Row {
            sweep_axis: parts[0].into(),
            sweep_value: parse_f(parts[1]),
            method: parts[2].into(),
            precoder: parts[3].into(),
            draw: parts[4].parse().unwrap_or(0),
            min_power_w: parse_f(parts[5]),
            runtime_s: parse_f(parts[6]),
            iterations: parts[7].parse().unwrap_or(0),
            status: parts[8].into(),
        });
    }
    Ok(rows)
}
