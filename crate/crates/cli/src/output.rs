//! JSON and CSV emission. Floats are written in shortest round-trip form, so
//! every value reads back bit-for-bit.

use crate::Failure;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};
use shadowrt::asympt::AsymptoticReport;
use shadowrt::filling::SurgeryPresentation;
use shadowrt::geometry::{GeometricSolution, TorsionReport};
use shadowrt::qarith::LogComplex;
use shadowrt::Error;
use std::io::Write;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Emitter {
    format: Format,
    path: Option<PathBuf>,
}

fn io_err(e: impl std::fmt::Display) -> Failure {
    Failure::Lib(Error::Io(e.to_string()))
}

/// Scalar cell text for a JSON value; arrays are joined with spaces.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.into_inner().map_err(io_err)
}

fn object_to_csv(obj: &Map<String, Value>) -> Result<Vec<u8>, Failure> {
    let header: Vec<String> = obj.keys().cloned().collect();
    let row: Vec<String> = obj.values().map(cell).collect();
    csv_table(&header, &[row])
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(io_err)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn complex_cells(z: num_complex::Complex64) -> [String; 2] {
    [json!(z.re).to_string(), json!(z.im).to_string()]
}

impl Emitter {
    pub fn new(format: Format, path: Option<PathBuf>) -> Self {
        Emitter { format, path }
    }

    fn write_to(path: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| io_err(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(bytes).map_err(io_err),
        }
    }

    fn write(&self, json: Vec<u8>, csv: impl FnOnce() -> Result<Vec<u8>, Failure>) -> Result<(), Failure> {
        let bytes = match self.format {
            Format::Json => json,
            Format::Csv => csv()?,
        };
        Self::write_to(&self.path, &bytes)
    }

    /// A flat record.
    pub fn record(&self, v: &Value) -> Result<(), Failure> {
        let obj = v.as_object().cloned().unwrap_or_default();
        self.write(json_bytes(v)?, || object_to_csv(&obj))
    }

    /// A complex value with its metadata.
    pub fn value(&self, mut meta: Value, v: LogComplex) -> Result<(), Failure> {
        let z = v.to_complex();
        meta["log_mag"] = json!(v.log_mag);
        meta["phase"] = json!(v.phase);
        meta["re"] = json!(z.re);
        meta["im"] = json!(z.im);
        self.record(&meta)
    }

    fn solution_rows(sol: &GeometricSolution, s: &SurgeryPresentation) -> (Vec<String>, Vec<Vec<String>>) {
        let header = [
            "component",
            "filled",
            "theta",
            "mu",
            "h_u_re",
            "h_u_im",
            "h_v_re",
            "h_v_im",
            "h_gamma_re",
            "h_gamma_im",
            "length_re",
            "length_im",
        ]
        .map(String::from)
        .to_vec();
        let rows = (0..sol.h_u.len())
            .map(|k| {
                let mut row = vec![
                    (k + 1).to_string(),
                    s.filled.contains(&k).to_string(),
                    json!(sol.theta[k]).to_string(),
                    sol.mu[k].to_string(),
                ];
                for z in [sol.h_u[k], sol.h_v[k], sol.h_gamma[k], sol.lengths[k]] {
                    row.extend(complex_cells(z));
                }
                row
            })
            .collect();
        (header, rows)
    }

    /// Geometric solution: full JSON, or one CSV row per component.
    pub fn solution(&self, sol: &GeometricSolution, s: &SurgeryPresentation) -> Result<(), Failure> {
        self.write(json_bytes(sol)?, || {
            let (h, rows) = Self::solution_rows(sol, s);
            csv_table(&h, &rows)
        })
    }

    /// Torsion with the solution it was computed at.
    pub fn torsion(&self, sol: &GeometricSolution, t: &TorsionReport) -> Result<(), Failure> {
        let v = json!({ "solution": sol, "torsion": t });
        self.write(json_bytes(&v)?, || {
            let [tr, ti] = complex_cells(t.torsion);
            let [dr, di] = complex_cells(t.jacobian_det);
            let l35 = t.gram_identities.iter().map(|c| c.rel_err).fold(0.0, f64::max);
            let obj = json!({
                "vol": sol.vol, "cs": sol.cs, "torsion_re": tr, "torsion_im": ti,
                "jacobian_det_re": dr, "jacobian_det_im": di,
                "hessian_identity_rel_err": t.hessian_identity.rel_err, "gram_identity_rel_err": l35,
            });
            object_to_csv(obj.as_object().expect("object"))
        })
    }

    fn report_csv(rep: &AsymptoticReport) -> Result<Vec<u8>, Failure> {
        let header =
            ["r", "log_mag", "phase", "fitted_running_vol", "predicted_vol", "ratio_mag", "ratio_phase"]
                .map(String::from)
                .to_vec();
        let rows: Vec<Vec<String>> = rep
            .rows()
            .iter()
            .map(|row| {
                [
                    json!(row.r),
                    json!(row.log_mag),
                    json!(row.phase),
                    json!(row.fitted_running_vol),
                    json!(row.predicted_vol),
                    json!(row.ratio_mag),
                    json!(row.ratio_phase),
                ]
                .iter()
                .map(cell)
                .collect()
            })
            .collect();
        csv_table(&header, &rows)
    }

    /// Verification report. With an output path, the other format is written
    /// next to it with the matching extension.
    pub fn report(&self, rep: &AsymptoticReport) -> Result<(), Failure> {
        let json = json_bytes(rep)?;
        let csv = Self::report_csv(rep)?;
        if let Some(p) = &self.path {
            let (other, ext) = match self.format {
                Format::Json => (&csv, "csv"),
                Format::Csv => (&json, "json"),
            };
            Self::write_to(&Some(p.with_extension(ext)), other)?;
        }
        self.write(json, || Ok(csv))
    }
}
