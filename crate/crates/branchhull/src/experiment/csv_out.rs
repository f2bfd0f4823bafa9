//! CSV emission of result tables: one header row, one row per trial,
//! RFC-4180 quoting, floats at 17 significant digits. Emission is a pure
//! function of the table, so re-emitting the same table is byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::ResultTable;

const HEADER: [&str; 13] = [
    "K",
    "N",
    "L",
    "alpha",
    "trial",
    "seed",
    "success",
    "abs_error",
    "rel_error",
    "theorem2_bound",
    "iters",
    "wallclock_s",
    "status",
];

fn write_rows<W: Write>(out: &mut csv::Writer<W>, table: &ResultTable) -> csv::Result<()> {
    out.write_record(HEADER)?;
    for r in &table.records {
        out.write_record([
            r.k.to_string(),
            r.n.to_string(),
            r.l.to_string(),
            format!("{:.16e}", r.alpha),
            r.trial.to_string(),
            r.seed.to_string(),
            r.success.to_string(),
            format!("{:.16e}", r.abs_error),
            format!("{:.16e}", r.rel_error),
            format!("{:.16e}", r.theorem2_bound),
            r.iters.to_string(),
            format!("{:.16e}", r.wallclock_s),
            r.status.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv_to<W: Write>(table: &ResultTable, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    write_rows(&mut out, table).map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))
}

pub fn emit_csv<P: AsRef<Path>>(table: &ResultTable, path: P) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    emit_csv_to(table, BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::TrialRecord;
    use crate::solver::Status;

    fn one_row() -> ResultTable {
        ResultTable {
            records: vec![TrialRecord {
                k: 2,
                n: 2,
                l: 10,
                alpha: 0.0,
                trial: 0,
                seed: 42,
                success: true,
                abs_error: 1e-9,
                rel_error: 7.07e-10,
                theorem2_bound: 0.0,
                iters: 1234,
                wallclock_s: 0.25,
                status: Status::Converged,
            }],
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        emit_csv_to(&ResultTable::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("K,N,L,alpha,"));
    }

    #[test]
    fn one_row_table_is_two_lines_and_deterministic() {
        let table = one_row();
        let mut a = Vec::new();
        emit_csv_to(&table, &mut a).unwrap();
        assert_eq!(String::from_utf8_lossy(&a).lines().count(), 2);
        let mut b = Vec::new();
        emit_csv_to(&table, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8_lossy(&a).contains("converged"));
    }
}
