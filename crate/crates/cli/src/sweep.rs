//! Grid and N sweeps, and their CSV output.

use std::io::{self, Write};

use colltherm::{
    qfi_chain, thermal_fisher_information, AncillaPrep, ChainConfig, ModelParams, QfiResult,
};
use rayon::prelude::*;

use crate::axis::AxisSpec;

pub const UNITS_NOTE: &str =
    "units: hbar = k_B = 1; temperature, omega and rates share one energy unit (omega = 1 unless overridden)";

/// Settings shared by both sweeps.
#[derive(Clone, Debug)]
pub struct Base {
    pub temperature: f64,
    pub omega: f64,
    pub max_ancillas: usize,
}

impl Base {
    fn params(
        &self,
        gamma_tau_se: f64,
        g_tau_sa: f64,
        prep: AncillaPrep,
    ) -> Result<ModelParams, String> {
        ModelParams::new(self.temperature, gamma_tau_se, g_tau_sa, prep)
            .and_then(|p| p.with_omega(self.omega))
            .map_err(|e| e.to_string())
    }

    fn chain(&self, params: ModelParams, n: usize) -> ChainConfig {
        ChainConfig::new(params, n).with_max_ancillas(self.max_ancillas)
    }
}

#[derive(Clone, Debug)]
pub struct HeatmapSpec {
    pub base: Base,
    pub gamma_tau_se: AxisSpec,
    pub g_tau_sa: AxisSpec,
    pub prep: AncillaPrep,
}

#[derive(Clone, Debug)]
pub struct ScalingSpec {
    pub base: Base,
    pub gamma_tau_se: f64,
    pub g_tau_sa: f64,
    pub preps: Vec<AncillaPrep>,
    pub n_max: usize,
}

pub struct HeatmapRow {
    pub gamma_tau_se: f64,
    pub g_tau_sa: f64,
    pub result: Result<(QfiResult, f64), String>,
}

pub struct ScalingRow {
    pub prep: String,
    pub n: usize,
    pub result: Result<(f64, f64, f64), String>,
}

/// Rows in row-major order: γτ_SE outer, gτ_SA inner.
pub fn run_heatmap(spec: &HeatmapSpec) -> Vec<HeatmapRow> {
    let points: Vec<(f64, f64)> = spec
        .gamma_tau_se
        .points()
        .into_iter()
        .flat_map(|g| spec.g_tau_sa.points().into_iter().map(move |t| (g, t)))
        .collect();
    points
        .par_iter()
        .map(|&(g, theta)| {
            let result = spec.base.params(g, theta, spec.prep.clone()).and_then(|p| {
                let f_th = thermal_fisher_information(&p);
                let r = qfi_chain(&spec.base.chain(p, 1)).map_err(|e| e.to_string())?;
                Ok((r, f_th))
            });
            HeatmapRow {
                gamma_tau_se: g,
                g_tau_sa: theta,
                result,
            }
        })
        .collect()
}

/// Rows ordered by preparation, then N.
pub fn run_scaling(spec: &ScalingSpec) -> Vec<ScalingRow> {
    let jobs: Vec<(usize, usize)> = (0..spec.preps.len())
        .flat_map(|i| (1..=spec.n_max).map(move |n| (i, n)))
        .collect();
    let values: Vec<Result<(f64, f64), String>> = jobs
        .par_iter()
        .map(|&(i, n)| {
            let p = spec
                .base
                .params(spec.gamma_tau_se, spec.g_tau_sa, spec.preps[i].clone())?;
            let f_th = thermal_fisher_information(&p);
            let f = qfi_chain(&spec.base.chain(p, n))
                .map_err(|e| e.to_string())?
                .value;
            Ok((f, f_th))
        })
        .collect();
    jobs.iter()
        .zip(&values)
        .map(|(&(i, n), value)| {
            let f1 = &values[i * spec.n_max];
            let result = match (value, f1) {
                (Ok((f, f_th)), Ok((f1, _))) => Ok((*f, f / f_th, f / (n as f64 * f1))),
                (Err(e), _) => Err(e.clone()),
                (Ok(_), Err(e)) => Err(format!("F_1 unavailable: {e}")),
            };
            ScalingRow {
                prep: spec.preps[i].label().to_string(),
                n,
                result,
            }
        })
        .collect()
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_comments(out: &mut dyn Write, lines: &[String]) -> io::Result<()> {
    for line in lines {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

pub fn heatmap_header(spec: &HeatmapSpec) -> Vec<String> {
    vec![
        "colltherm heatmap: single-ancilla QFI over (gamma_tau_se, g_tau_sa)".into(),
        UNITS_NOTE.into(),
        format!(
            "temperature = {}, omega = {}, prep = {}, n = 1, gamma_tau_se = {}, g_tau_sa = {}",
            spec.base.temperature, spec.base.omega, spec.prep, spec.gamma_tau_se, spec.g_tau_sa
        ),
    ]
}

pub fn scaling_header(spec: &ScalingSpec) -> Vec<String> {
    let preps: Vec<&str> = spec.preps.iter().map(|p| p.label()).collect();
    vec![
        "colltherm scaling: block QFI F_N against N".into(),
        UNITS_NOTE.into(),
        format!(
            "temperature = {}, omega = {}, gamma_tau_se = {}, g_tau_sa = {}, preps = {}, n_max = {}",
            spec.base.temperature,
            spec.base.omega,
            spec.gamma_tau_se,
            spec.g_tau_sa,
            preps.join(","),
            spec.n_max
        ),
    ]
}

/// Writes the comment header, then CSV rows; the `error` column appears
/// only when some row failed.
pub fn write_heatmap(
    out: &mut dyn Write,
    spec: &HeatmapSpec,
    rows: &[HeatmapRow],
) -> io::Result<()> {
    write_comments(out, &heatmap_header(spec))?;
    let any_error = rows.iter().any(|r| r.result.is_err());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "gamma_tau_se",
        "g_tau_sa",
        "f1",
        "f1_over_fth",
        "n_truncated",
        "richardson_err",
    ];
    if any_error {
        header.push("error");
    }
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![float(row.gamma_tau_se), float(row.g_tau_sa)];
        match &row.result {
            Ok((r, f_th)) => {
                record.push(float(r.value));
                record.push(float(r.value / f_th));
                record.push(r.n_truncated_pairs.to_string());
                record.push(float(r.richardson_error_estimate.unwrap_or(0.0)));
                if any_error {
                    record.push(String::new());
                }
            }
            Err(e) => {
                record.extend(["NaN", "NaN", "0", "NaN"].map(String::from));
                record.push(e.clone());
            }
        }
        w.write_record(&record)?;
    }
    w.flush()
}

pub fn write_scaling(
    out: &mut dyn Write,
    spec: &ScalingSpec,
    rows: &[ScalingRow],
) -> io::Result<()> {
    write_comments(out, &scaling_header(spec))?;
    let any_error = rows.iter().any(|r| r.result.is_err());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["prep", "n", "f_n", "f_n_over_fth", "f_n_over_n_f1"];
    if any_error {
        header.push("error");
    }
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![row.prep.clone(), row.n.to_string()];
        match &row.result {
            Ok((f, over_th, over_linear)) => {
                record.extend([float(*f), float(*over_th), float(*over_linear)]);
                if any_error {
                    record.push(String::new());
                }
            }
            Err(e) => {
                record.extend(["NaN", "NaN", "NaN"].map(String::from));
                record.push(e.clone());
            }
        }
        w.write_record(&record)?;
    }
    w.flush()
}
