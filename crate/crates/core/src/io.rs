//! CSV/JSON input and output: tabulated ψ and tails, bound reports, and
//! the number format shared by every emitted table.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fenchel::BoundReport;
use crate::gls::LogTable;
use crate::model::TabulatedTail;
use crate::scalar::Scalar;

/// Shortest decimal that parses back to the same `f64`.
///
/// Plain notation in `[1e-5, 1e16)`, scientific outside it so that tiny and
/// huge values stay short. Non-finite values are rejected: emitted tables
/// carry flag columns instead.
pub fn format_number(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "refusing to emit non-finite value {x}"
        )));
    }
    let a = x.abs();
    Ok(if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    })
}

fn csv_error(e: csv::Error) -> Error {
    Error::Table(e.to_string())
}

/// Two-column numeric table with the given header, `#` lines skipped.
fn read_pairs<R: Read>(reader: R, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found = rdr.headers().map_err(csv_error)?.clone();
    if found.len() != 2 || found[0] != *header[0] || found[1] != *header[1] {
        return Err(Error::Table(format!(
            "expected header `{},{}`, found `{}`",
            header[0],
            header[1],
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Table(format!("row {}: missing column", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Table(format!("row {}: {e}", i + 1)))
        };
        xs.push(parse(0)?);
        ys.push(parse(1)?);
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Table(format!(
            "`{}` column must be strictly increasing",
            header[0]
        )));
    }
    Ok((xs, ys))
}

/// Reads a `p,psi` table into a log-linear interpolant.
pub fn read_psi_table<T: Scalar, R: Read>(reader: R) -> Result<LogTable<T>> {
    let (p, psi) = read_pairs(reader, ["p", "psi"])?;
    let p = p.into_iter().map(T::lit).collect();
    let psi: Vec<T> = psi.into_iter().map(T::lit).collect();
    LogTable::from_values(p, &psi)
}

/// Reads a `t,T` table of a nonincreasing tail.
pub fn read_tail_table<T: Scalar, R: Read>(reader: R) -> Result<TabulatedTail<T>> {
    let (t, tail) = read_pairs(reader, ["t", "T"])?;
    TabulatedTail::new(
        t.into_iter().map(T::lit).collect(),
        tail.into_iter().map(T::lit).collect(),
    )
}

/// Writes a bound report as CSV.
///
/// Columns `t,lnR,R,argmax_p,boundary,underflow,vacuous`, plus
/// `exact_T,dominance` when the report carries a dominance audit. The
/// `comments` and then the report's warnings are written first as `# ` lines.
pub fn write_bound_csv<T: Scalar, W: Write>(
    report: &BoundReport<T>,
    comments: &[String],
    out: W,
) -> Result<()> {
    let mut out = out;
    let io_err = |e: std::io::Error| Error::Table(e.to_string());
    for c in comments {
        writeln!(out, "# {c}").map_err(io_err)?;
    }
    for w in &report.warnings {
        writeln!(out, "# warning: {w}").map_err(io_err)?;
    }
    let mut wtr = csv::Writer::from_writer(out);
    let dominance = report.has_dominance();
    let mut header = vec!["t", "lnR", "R", "argmax_p", "boundary", "underflow", "vacuous"];
    if dominance {
        header.extend(["exact_T", "dominance"]);
    }
    wtr.write_record(&header).map_err(csv_error)?;
    for row in &report.rows {
        let mut rec = vec![
            format_number(row.t.as_f64())?,
            format_number(row.ln_r.as_f64())?,
            format_number(row.r.as_f64())?,
            format_number(row.argmax_p.as_f64())?,
            row.boundary.as_str().to_string(),
            flag(row.underflow),
            flag(row.vacuous),
        ];
        if dominance {
            rec.push(match row.exact_tail {
                Some(v) => format_number(v.as_f64())?,
                None => String::new(),
            });
            rec.push(
                match row.dominance_ok {
                    Some(true) => "ok",
                    Some(false) => "FAIL",
                    None => "",
                }
                .to_string(),
            );
        }
        wtr.write_record(&rec).map_err(csv_error)?;
    }
    wtr.flush().map_err(|e| Error::Table(e.to_string()))?;
    Ok(())
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

/// Writes a bound report as one JSON document (`"v": 1`).
pub fn write_bound_json<T: Scalar, W: Write>(report: &BoundReport<T>, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, report).map_err(|e| Error::Table(e.to_string()))
}
