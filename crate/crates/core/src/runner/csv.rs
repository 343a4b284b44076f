//! Plain CSV output. Floats are written in Rust's shortest round-trip form,
//! so reading a file back reproduces every value bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::analysis::{NormRecord, NormSeries};
use crate::error::RunError;
use crate::grid::StaggeredGrid;

use super::studies::SummaryRow;

pub const SERIES_HEADER: &str = "t,l1,l2,linf,mass,u_l2,div_residual,lambda_num,c_min";
pub const SUMMARY_HEADER: &str =
    "kappa,m0,lambda_theory,lambda_num_0,lambda_num_late,decay_pass,maxprin_pass";
pub const SNAPSHOT_HEADER: &str = "i,j,x,y,c";

fn float(x: f64) -> String {
    format!("{x:?}")
}

fn optional(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    let mut file = fs::File::create(path).map_err(|e| RunError::io(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| RunError::io(path, e))
}

pub fn format_series(series: &NormSeries) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for r in series.records() {
        let fields = [
            float(r.t),
            float(r.l1),
            float(r.l2),
            float(r.linf),
            float(r.mass),
            float(r.u_l2),
            float(r.div_residual),
            optional(r.lambda_num),
            float(r.c_min),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_series(series: &NormSeries, path: &Path) -> Result<(), RunError> {
    write_text(path, &format_series(series))
}

pub fn read_series(path: &Path) -> Result<NormSeries, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    let bad = |line: usize, message: String| RunError::Csv {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SERIES_HEADER => {}
        _ => return Err(bad(1, "missing series header".into())),
    }
    let mut series = NormSeries::new();
    for (index, line) in lines {
        let lineno = index + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(bad(
                lineno,
                format!("expected 9 fields, got {}", fields.len()),
            ));
        }
        let num = |k: usize| {
            fields[k]
                .parse::<f64>()
                .map_err(|_| bad(lineno, format!("bad number {:?}", fields[k])))
        };
        let lambda_num = if fields[7].is_empty() {
            None
        } else {
            Some(num(7)?)
        };
        let record = NormRecord {
            t: num(0)?,
            l1: num(1)?,
            l2: num(2)?,
            linf: num(3)?,
            mass: num(4)?,
            u_l2: num(5)?,
            div_residual: num(6)?,
            lambda_num,
            c_min: num(8)?,
        };
        series
            .push(record)
            .map_err(|e| bad(lineno, e.to_string()))?;
    }
    Ok(series)
}

/// Full concentration field at one time level, one row per cell.
pub fn write_snapshot(c: &[f64], grid: &StaggeredGrid, path: &Path) -> Result<(), RunError> {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.cell_center(i, j);
            let value = c[grid.cell(i, j)];
            out.push_str(&format!(
                "{i},{j},{},{},{}\n",
                float(x),
                float(y),
                float(value)
            ));
        }
    }
    write_text(path, &out)
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<(), RunError> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            float(r.kappa),
            float(r.m0),
            float(r.lambda_theory),
            optional(r.lambda_num_0),
            optional(r.lambda_num_late),
            r.decay_pass,
            r.maxprin_pass
        ));
    }
    write_text(path, &out)
}
