//! Scenario execution and file output.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kaonsim_core::dynamics::Trajectory;
use kaonsim_core::junction::{
    consts::HBAR, reduce_to_qubit, solve_well, well_window, JunctionParams, Potential,
};
use kaonsim_core::kaon::KaonParams;
use kaonsim_core::scenarios::{
    analytic_trajectory, cpv_sequence, mapped_two_qubit, regeneration, single_qubit_sequence,
    two_qubit_sequence, uniform_times, STATE_01, STATE_10,
};
use serde_json::{json, Value};

use crate::config::{Params, RunConfig, Scenario, SpectrumSpec};
use crate::error::CliError;
use crate::output::{render_svg, write_atomic, Table};

/// Command-line paths that take precedence over the config `output` block.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// Computed result of one scenario, before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub table: Table,
    pub summary: Value,
    pub title: String,
    /// Whether the table is a time series that can be plotted.
    pub plottable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv_path: PathBuf,
    pub rows: usize,
    pub svg_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
}

fn kaon_summary(k: &KaonParams) -> Value {
    json!({
        "tau1": k.tau1,
        "tau2": k.tau2,
        "delta_m": k.delta_m,
        "tau2_over_tau1": k.tau2 / k.tau1,
        "tau1_delta_m": k.tau1 * k.delta_m,
    })
}

fn series_summary(table: &Table) -> Vec<Value> {
    (1..table.header.len())
        .map(|k| {
            let col: Vec<f64> = table.rows.iter().map(|r| r[k]).collect();
            let (i_min, min) =
                col.iter()
                    .copied()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
                    );
            let max_after = col[i_min..]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            json!({
                "name": table.header[k],
                "first": col[0],
                "min": min,
                "t_over_tau1_at_min": table.rows[i_min][0],
                "max_after_min": max_after,
            })
        })
        .collect()
}

fn time_table(header: [&str; 3], ts_over: &[f64], traj: &Trajectory, cols: [usize; 2]) -> Table {
    let mut table = Table::new(&header);
    for (t, row) in ts_over.iter().zip(&traj.probs) {
        table.push(vec![*t, row[cols[0]], row[cols[1]]]);
    }
    table
}

fn spectrum(p: &JunctionParams, spec: &SpectrumSpec) -> Result<Product, CliError> {
    let pot = Potential::washboard(p);
    let grid = well_window(&pot, spec.well_index, spec.grid_points).map_err(CliError::numeric)?;
    let s = solve_well(p, spec.well_index, &grid, spec.n_levels).map_err(CliError::numeric)?;
    let q = reduce_to_qubit(p, &s).map_err(CliError::numeric)?;
    let mut table = Table::new(&["n", "E_n", "E_n_minus_E_0"]);
    for (n, e) in s.energies.iter().enumerate() {
        table.push(vec![n as f64, e - s.minimum.energy, e - s.energies[0]]);
    }
    let summary = json!({
        "scenario": "spectrum",
        "energy_reference": "well minimum U(delta_min), J",
        "delta_eps": q.delta_eps,
        "delta_eps_over_h": q.delta_eps / (2.0 * PI * HBAR),
        "omega_x": q.omega_x,
        "hbar_omega_x_over_delta_eps": HBAR * q.omega_x / q.delta_eps,
        "delta_01": q.delta_01,
        "delta_00": q.delta_00,
        "delta_11": q.delta_11,
        "well_index": spec.well_index,
        "well_minimum_delta": s.minimum.delta,
        "barrier_height": s.barrier_top.map(|b| b - s.minimum.energy),
        "window": [grid.delta_min, grid.delta_max],
        "grid_points": grid.n,
    });
    Ok(Product {
        table,
        summary,
        title: "spectrum".into(),
        plottable: false,
    })
}

/// Runs the scenario without touching the file system.
pub fn compute(cfg: &RunConfig) -> Result<Product, CliError> {
    let ts_over = uniform_times(cfg.sampling.t_max_over_tau1, cfg.sampling.n_points);
    let scaled = |k: &KaonParams| -> Vec<f64> { ts_over.iter().map(|t| t * k.tau1).collect() };
    let titled = |name: &str, k: &KaonParams| {
        format!(
            "{name}: tau2/tau1 = {}, tau1 dm = {}",
            k.tau2 / k.tau1,
            k.tau1 * k.delta_m
        )
    };
    let product = match (&cfg.params, cfg.scenario) {
        (
            Params::Spectrum {
                junction,
                spectrum: spec,
            },
            _,
        ) => return spectrum(junction, spec),
        (Params::Kaon(k), Scenario::MixAnalytic) => {
            let traj = analytic_trajectory(&scaled(k), k).map_err(CliError::numeric)?;
            let table = time_table(["t_over_tau1", "P_K0", "P_K0bar"], &ts_over, &traj, [0, 1]);
            (
                table,
                kaon_summary(k),
                titled("mix-analytic", k),
                json!(null),
            )
        }
        (Params::Kaon(k), _) => {
            let traj = single_qubit_sequence(&scaled(k), k).map_err(CliError::numeric)?;
            let table = time_table(["t_over_tau1", "P_0", "P_1"], &ts_over, &traj, [0, 1]);
            (table, kaon_summary(k), titled("mix-qubit", k), json!(null))
        }
        (Params::TwoQubit { kaon, coupling }, _) => {
            let p = mapped_two_qubit(kaon, *coupling).map_err(CliError::numeric)?;
            let traj = two_qubit_sequence(&scaled(kaon), &p).map_err(CliError::numeric)?;
            let leak = traj
                .probs
                .iter()
                .map(|r| r[0].max(r[3]))
                .fold(0.0, f64::max);
            let table = time_table(
                ["t_over_tau1", "P_10", "P_01"],
                &ts_over,
                &traj,
                [STATE_10, STATE_01],
            );
            let extra = json!({"coupling": coupling, "max_leakage_00_11": leak});
            (
                table,
                kaon_summary(kaon),
                titled("mix-two-qubit", kaon),
                extra,
            )
        }
        (Params::Cpv { kaon, epsilon }, _) => {
            let traj = cpv_sequence(&scaled(kaon), kaon, *epsilon).map_err(CliError::numeric)?;
            let table = time_table(["t_over_tau1", "P_0", "P_1"], &ts_over, &traj, [0, 1]);
            let extra = json!({"epsilon": [epsilon.0.re, epsilon.0.im]});
            (table, kaon_summary(kaon), titled("cpv", kaon), extra)
        }
        (
            Params::Regen {
                kaon,
                t1,
                t2,
                omega_x,
            },
            _,
        ) => {
            let k = KaonParams {
                omega_x: *omega_x,
                ..*kaon
            };
            let r = regeneration(*t1, *t2, &k).map_err(CliError::numeric)?;
            let mut table = Table::new(&[
                "t_over_tau1",
                "C2_re",
                "C2_im",
                "C1_re",
                "C1_im",
                "abs_C1_over_C2",
            ]);
            let (b2, b1) = (r.before.amplitude(0), r.before.amplitude(1));
            table.push(vec![
                t1 / k.tau1,
                b2.re,
                b2.im,
                b1.re,
                b1.im,
                r.ratio_before(),
            ]);
            table.push(vec![
                (t1 + t2) / k.tau1,
                r.c2.re,
                r.c2.im,
                r.c1.re,
                r.c1.im,
                r.ratio_after(),
            ]);
            let summary = json!({
                "scenario": "regen",
                "kaon": kaon_summary(kaon),
                "t1_over_tau1": t1 / k.tau1,
                "t2_over_tau1": t2 / k.tau1,
                "omega_x_t2": omega_x * t2,
                "ratio_before": r.ratio_before(),
                "ratio_after": r.ratio_after(),
                "c1": [r.c1.re, r.c1.im],
                "c2": [r.c2.re, r.c2.im],
            });
            return Ok(Product {
                table,
                summary,
                title: "regen".into(),
                plottable: false,
            });
        }
    };
    let (table, kaon, title, extra) = product;
    let summary = json!({
        "scenario": cfg.scenario.name(),
        "kaon": kaon,
        "t_max_over_tau1": cfg.sampling.t_max_over_tau1,
        "n_points": cfg.sampling.n_points,
        "series": series_summary(&table),
        "extra": extra,
    });
    Ok(Product {
        table,
        summary,
        title,
        plottable: true,
    })
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("finite JSON values");
    s.push('\n');
    s
}

/// Runs the scenario and writes the CSV plus any requested SVG/JSON.
pub fn run(cfg: &RunConfig, overrides: &Overrides) -> Result<Outcome, CliError> {
    let csv_path = overrides
        .out
        .clone()
        .or_else(|| cfg.output.csv_path.clone())
        .ok_or_else(|| CliError::schema("output.csv_path: required (or pass --out)"))?;
    let svg_path = overrides
        .svg
        .clone()
        .or_else(|| cfg.output.svg_path.clone());
    let mut json_path = overrides
        .json
        .clone()
        .or_else(|| cfg.output.json_path.clone());
    if svg_path.is_some() && matches!(cfg.scenario, Scenario::Spectrum | Scenario::Regen) {
        return Err(CliError::schema(format!(
            "output.svg_path: no plot for scenario {}",
            cfg.scenario.name()
        )));
    }
    if cfg.scenario == Scenario::Spectrum && json_path.is_none() {
        json_path = Some(sidecar(&csv_path));
    }

    let product = compute(cfg)?;
    write_atomic(&csv_path, product.table.to_csv().as_bytes())?;
    if let Some(p) = &svg_path {
        write_atomic(p, render_svg(&product.table, &product.title).as_bytes())?;
    }
    if let Some(p) = &json_path {
        write_atomic(p, json_text(&product.summary).as_bytes())?;
    }
    Ok(Outcome {
        csv_path,
        rows: product.table.rows.len(),
        svg_path,
        json_path,
    })
}

fn sidecar(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}
