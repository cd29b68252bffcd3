//! CSV artifacts. Numbers are written with Rust's own float formatting, which
//! does not depend on the locale.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use preytaxis_core::analysis::{ModeSpectrum, PatternReport, SweepRow};
use preytaxis_core::bifurcation::{BranchVerdict, K2Result};
use preytaxis_core::solver::{Grid, MonitorEvent, RunRecord};
use preytaxis_core::stability::ThresholdTable;

/// Significant digits in summary tables.
pub const TABLE_DIGITS: usize = 6;
/// Significant digits in field snapshots and probes.
pub const FIELD_DIGITS: usize = 9;

/// `x` rounded to `digits` significant digits, printed in the shortest form
/// that reads back to the rounded value.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x).parse().expect("float round trip");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn t6(x: f64) -> String {
    sig(x, TABLE_DIGITS)
}

fn f9(x: f64) -> String {
    sig(x, FIELD_DIGITS)
}

pub fn create(dir: &Path, name: &str) -> io::Result<(PathBuf, csv::Writer<BufWriter<File>>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    Ok((path, w))
}

pub fn write_thresholds<W: Write>(w: &mut csv::Writer<W>, t: &ThresholdTable) -> csv::Result<()> {
    w.write_record(["k", "chi_s", "chi_h", "chi_m"])?;
    for r in &t.rows {
        w.write_record([r.k.to_string(), t6(r.chi_s), t6(r.chi_h), t6(r.chi_m)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(w: &mut csv::Writer<W>, rows: &[SweepRow]) -> csv::Result<()> {
    w.write_record(["L", "k0", "chi0", "kind"])?;
    for r in rows {
        w.write_record([t6(r.length), r.k0.to_string(), t6(r.chi0), r.kind.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Every intermediate quantity of the pitchfork coefficient, one per row.
pub fn write_k2_ledger<W: Write>(w: &mut csv::Writer<W>, r: &K2Result) -> csv::Result<()> {
    w.write_record(["quantity", "value"])?;
    let f = &r.first;
    let i = &f.integrals;
    let s = &r.second;
    let rows: Vec<(&str, f64)> = vec![
        ("k", r.k as f64),
        ("chi_s", r.chi_s),
        ("P", r.amplitudes.p),
        ("Q", r.amplitudes.q),
        ("det_M", r.det_m),
        ("M3", f.m3),
        ("M4", f.m4),
        ("mean_u", i.mean_u),
        ("mean_v", i.mean_v),
        ("mean_w", i.mean_w),
        ("double_u", i.double_u),
        ("double_v", i.double_v),
        ("double_w", i.double_w),
        ("B0_condition", f.b0.condition),
        ("B0_residual", f.b0.residual),
        ("B0_shadow_gap", f.b0.shadow_gap),
        ("C0_condition", f.c0.condition),
        ("C0_residual", f.c0.residual),
        ("C0_shadow_gap", f.c0.shadow_gap),
        ("second_u", s.u),
        ("second_v", s.v),
        ("second_w", s.w),
        ("M1", s.m1),
        ("M2", s.m2),
        ("A0_condition", r.a0.condition),
        ("A0_residual", r.a0.residual),
        ("A0_shadow_gap", r.a0.shadow_gap),
        ("K2", r.k2),
    ];
    for (name, value) in rows {
        w.write_record([name.to_string(), t6(value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_verdicts<W: Write>(w: &mut csv::Writer<W>, verdicts: &[BranchVerdict]) -> csv::Result<()> {
    w.write_record(["k", "branch", "stability", "k2", "reason"])?;
    for v in verdicts {
        let k2 = v.k2.map(t6).unwrap_or_default();
        w.write_record([v.k.to_string(), v.kind.to_string(), v.stability.to_string(), k2, v.reason.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: one row per snapshot and cell.
pub fn write_snapshots<W: Write>(w: &mut csv::Writer<W>, grid: &Grid, run: &RunRecord) -> csv::Result<()> {
    w.write_record(["t", "x", "u", "v", "w"])?;
    for st in &run.snapshots {
        let t = f9(st.t);
        for i in 0..grid.n() {
            w.write_record([t.clone(), f9(grid.x(i)), f9(st.u()[i]), f9(st.v()[i]), f9(st.w()[i])])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_probes<W: Write>(w: &mut csv::Writer<W>, run: &RunRecord) -> csv::Result<()> {
    w.write_record(["probe_x", "t", "u", "v", "w"])?;
    for p in &run.probes {
        let x = f9(p.x);
        for j in 0..p.t.len() {
            w.write_record([x.clone(), f9(p.t[j]), f9(p.u[j]), f9(p.v[j]), f9(p.w[j])])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_report<W: Write>(w: &mut csv::Writer<W>, run: &RunRecord, report: &PatternReport) -> csv::Result<()> {
    let last = run.last();
    let (cell, umax) = last
        .u()
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    let period = report.period.map(|p| t6(p.period)).unwrap_or_default();
    let confidence = report.period.map(|p| t6(p.confidence)).unwrap_or_default();
    let window = report.window_modes.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let rows = [
        ("pattern", report.pattern.to_string()),
        ("dominant_k", report.dominant.k.to_string()),
        ("purity", t6(report.dominant.purity)),
        ("amplitude", t6(report.amplitude)),
        ("period", period),
        ("period_confidence", confidence),
        ("window_modes", window),
        ("termination", run.termination.to_string()),
        ("t_final", t6(last.t)),
        ("steps", run.steps.to_string()),
        ("final_residual", t6(run.final_residual)),
        ("violations", run.violations().to_string()),
        ("u_max", t6(umax)),
        ("u_max_cell", cell.to_string()),
    ];
    w.write_record(["field", "value"])?;
    for (k, v) in rows {
        w.write_record([k.to_string(), v])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum<W: Write>(w: &mut csv::Writer<W>, names: &[String], spectra: &[ModeSpectrum]) -> csv::Result<()> {
    let mut header = vec!["k".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    let len = spectra.iter().map(|s| s.coeffs.len()).max().unwrap_or(0);
    for k in 0..len {
        let mut row = vec![k.to_string()];
        row.extend(spectra.iter().map(|s| s.coeffs.get(k).map(|&c| f9(c)).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_log(path: &Path, log: &[MonitorEvent]) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    for e in log {
        writeln!(f, "{e}")?;
    }
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1569.5312345, 6), "1569.53");
        assert_eq!(sig(-0.000123456789, 6), "-0.000123457");
        assert_eq!(sig(6.05, 6), "6.05");
        assert_eq!(sig(-0.0, 6), "0");
        assert_eq!(sig(f64::INFINITY, 6), "inf");
        assert_eq!(sig(1.0 / 3.0, 9), "0.333333333");
    }
}
