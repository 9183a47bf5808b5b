//! Trace and summary CSV files.
//!
//! Trace header: `iter,f,gap,alpha,a_k,l0_k,l1_k,grad_norm,inner_checks,regime`.
//! Floats carry 17 significant digits so values round-trip exactly.

use std::io::Write;
use std::path::Path;

use crate::domain::{IterateRecord, Regime};
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 10] = [
    "iter",
    "f",
    "gap",
    "alpha",
    "a_k",
    "l0_k",
    "l1_k",
    "grad_norm",
    "inner_checks",
    "regime",
];

pub const SUMMARY_HEADER: [&str; 10] = [
    "instance_id",
    "setting",
    "n",
    "d",
    "solver",
    "iters_to_tol",
    "final_gap",
    "final_f",
    "total_inner_checks",
    "wall_time_ms",
];

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv<W: Write>(records: &[IterateRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in records {
        w.write_record([
            r.iter.to_string(),
            fmt_f64(r.f_value),
            fmt_f64(r.fw_gap),
            fmt_f64(r.alpha),
            fmt_f64(r.a_k),
            fmt_f64(r.l0_k),
            fmt_f64(r.l1_k),
            fmt_f64(r.grad_norm),
            r.inner_checks.to_string(),
            r.regime.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a trace CSV. `d_norm` is not stored and comes back as NaN.
pub fn read_trace_csv(path: &Path) -> Result<Vec<IterateRecord>> {
    let malformed = |line: u64, msg: String| Error::Malformed {
        what: "trace csv",
        path: path.to_path_buf(),
        msg: format!("line {line}: {msg}"),
    };
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(malformed(1, format!("unexpected header {:?}", header)));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| malformed(line, e.to_string()))?;
        if rec.len() != TRACE_HEADER.len() {
            return Err(malformed(line, format!("expected 10 fields, found {}", rec.len())));
        }
        let float = |j: usize| -> Result<f64> {
            rec[j]
                .parse::<f64>()
                .map_err(|e| malformed(line, format!("{}: {e}", TRACE_HEADER[j])))
        };
        let regime = match &rec[9] {
            "T" => Regime::T,
            "K" => Regime::K,
            other => return Err(malformed(line, format!("bad regime `{other}`"))),
        };
        out.push(IterateRecord {
            iter: rec[0].parse().map_err(|e| malformed(line, format!("iter: {e}")))?,
            f_value: float(1)?,
            fw_gap: float(2)?,
            alpha: float(3)?,
            a_k: float(4)?,
            l0_k: float(5)?,
            l1_k: float(6)?,
            grad_norm: float(7)?,
            inner_checks: rec[8]
                .parse()
                .map_err(|e| malformed(line, format!("inner_checks: {e}")))?,
            regime,
            d_norm: f64::NAN,
        });
    }
    if out.is_empty() {
        return Err(malformed(1, "no records".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub instance_id: String,
    pub setting: String,
    pub n: usize,
    pub d: usize,
    pub solver: String,
    pub iters_to_tol: Option<usize>,
    pub final_gap: f64,
    pub final_f: f64,
    pub total_inner_checks: u64,
    pub wall_time_ms: u64,
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance_id.clone(),
            r.setting.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.solver.clone(),
            r.iters_to_tol.map(|k| k.to_string()).unwrap_or_default(),
            fmt_f64(r.final_gap),
            fmt_f64(r.final_f),
            r.total_inner_checks.to_string(),
            r.wall_time_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let malformed = |line: u64, msg: String| Error::Malformed {
        what: "summary csv",
        path: path.to_path_buf(),
        msg: format!("line {line}: {msg}"),
    };
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(SUMMARY_HEADER.iter().copied()) {
        return Err(malformed(1, "unexpected header".into()));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| malformed(line, e.to_string()))?;
        let bad = |e: &dyn std::fmt::Display| malformed(line, e.to_string());
        out.push(SummaryRow {
            instance_id: rec[0].to_string(),
            setting: rec[1].to_string(),
            n: rec[2].parse().map_err(|e| bad(&e))?,
            d: rec[3].parse().map_err(|e| bad(&e))?,
            solver: rec[4].to_string(),
            iters_to_tol: if rec[5].is_empty() {
                None
            } else {
                Some(rec[5].parse().map_err(|e| bad(&e))?)
            },
            final_gap: rec[6].parse().map_err(|e| bad(&e))?,
            final_f: rec[7].parse().map_err(|e| bad(&e))?,
            total_inner_checks: rec[8].parse().map_err(|e| bad(&e))?,
            wall_time_ms: rec[9].parse().map_err(|e| bad(&e))?,
        });
    }
    Ok(out)
}
