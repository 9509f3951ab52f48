//! CSV and JSON writers, plus a CSV reader for checking round trips.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::{Format, SweepSpec};
use crate::sweep::ResultRow;
use crate::CliError;

pub const HEADER: &str = "snr_db,n_r,alpha,eta1,eta2,eps1,eps2,pe_star,pe_exact,ser_mc,alice_ber,charlie_ber,fab_power,wall_time_s,method,seed";

const NA: &str = "NA";

/// 17 significant digits, enough to read back the same `f64`.
fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), number)
}

fn record(r: &ResultRow) -> [String; 16] {
    [
        number(r.snr_db),
        r.n_r.to_string(),
        opt(r.alpha),
        opt(r.eta1),
        opt(r.eta2),
        opt(r.eps1),
        opt(r.eps2),
        opt(r.pe_star),
        opt(r.pe_exact),
        opt(r.ser_mc),
        opt(r.alice_ber),
        opt(r.charlie_ber),
        opt(r.fab_power),
        opt(r.wall_time_s),
        r.method.clone(),
        r.seed.map_or_else(|| NA.to_string(), |s| s.to_string()),
    ]
}

/// Header, one line per row, then `# key = value` metadata lines.
pub fn write_csv<W: Write>(
    w: W,
    rows: &[ResultRow],
    metadata: &[(String, String)],
) -> io::Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wtr.write_record(HEADER.split(','))?;
    for r in rows {
        wtr.write_record(record(r))?;
    }
    let mut w = wtr.into_inner().map_err(|e| e.into_error())?;
    for (k, v) in metadata {
        writeln!(w, "# {k} = {v}")?;
    }
    w.flush()
}

pub fn write_json<W: Write>(mut w: W, rows: &[ResultRow]) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    w.flush()
}

fn with_target(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let ctx = |e: io::Error| CliError::Runtime(format!("writing {}: {e}", p.display()));
            let mut file = BufWriter::new(File::create(p).map_err(ctx)?);
            f(&mut file).map_err(ctx)
        }
        None => f(&mut io::stdout().lock())
            .map_err(|e| CliError::Runtime(format!("writing standard output: {e}"))),
    }
}

/// Writes CSV to `path`, or standard output when `None`.
pub fn emit_csv(
    path: Option<&Path>,
    rows: &[ResultRow],
    metadata: &[(String, String)],
) -> Result<(), CliError> {
    with_target(path, |w| write_csv(w, rows, metadata))
}

pub fn emit_json(path: Option<&Path>, rows: &[ResultRow]) -> Result<(), CliError> {
    with_target(path, |w| write_json(w, rows))
}

/// Writes `rows` in the format and to the place `spec` asks for.
pub fn emit(spec: &SweepSpec, rows: &[ResultRow]) -> Result<(), CliError> {
    match spec.format {
        Format::Csv => emit_csv(spec.out.as_deref(), rows, &spec.metadata()),
        Format::Json => emit_json(spec.out.as_deref(), rows),
    }
}

fn field<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<Option<T>, String> {
    if s == NA {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| format!("line {line}: bad {name} `{s}`"))
}

/// Reads back what [`write_csv`] produced. Metadata lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != HEADER {
        return Err(format!("unexpected header `{}`", header.join(",")));
    }
    let names: Vec<&str> = HEADER.split(',').collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = i + 2;
        let f = |k: usize| field::<f64>(&rec[k], names[k], line);
        let required =
            |v: Option<f64>, k: usize| v.ok_or(format!("line {line}: {} is NA", names[k]));
        rows.push(ResultRow {
            snr_db: required(f(0)?, 0)?,
            n_r: field(&rec[1], names[1], line)?.ok_or(format!("line {line}: n_r is NA"))?,
            alpha: f(2)?,
            eta1: f(3)?,
            eta2: f(4)?,
            eps1: f(5)?,
            eps2: f(6)?,
            pe_star: f(7)?,
            pe_exact: f(8)?,
            ser_mc: f(9)?,
            alice_ber: f(10)?,
            charlie_ber: f(11)?,
            fab_power: f(12)?,
            wall_time_s: f(13)?,
            method: rec[14].to_string(),
            seed: field(&rec[15], names[15], line)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 5e-324, -2.5e17, f64::MAX, 0.0] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(35.0), "3.5000000000000000e1");
    }

    #[test]
    fn header_only_for_no_rows() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[], &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{HEADER}\n"));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }
}
