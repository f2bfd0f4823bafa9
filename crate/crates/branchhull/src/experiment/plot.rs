//! Gnuplot script emission. Scripts are self-contained: the aggregated data
//! is embedded in heredoc blocks, so a single `gnuplot <file>` renders the
//! figure.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Success-rate heatmap over `(K + N, L)` with the `L = 2(K + N)` line.
    Phase,
    /// Max relative error against the sampling ratio, one curve per alpha.
    Noise,
}

fn phase_script(table: &ResultTable) -> Result<String> {
    if table.records.iter().any(|r| r.alpha != 0.0) {
        return Err(Error::TableShape(
            "phase plots need a noiseless table".into(),
        ));
    }
    let cells = table.success_rates();
    let mut s = String::new();
    s.push_str("# Success-rate heatmap: white = always recovered, black = never.\n");
    s.push_str("set terminal pngcairo size 900,700\n");
    s.push_str("set output 'phase.png'\n");
    s.push_str("set xlabel 'K + N'\nset ylabel 'L'\n");
    s.push_str("set palette gray\nset cbrange [0:1]\nset cblabel 'success rate'\n");
    s.push_str("$cells << EOD\n");
    for c in &cells {
        let _ = writeln!(s, "{} {} {:.4}", c.k + c.n, c.l, c.rate());
    }
    s.push_str("EOD\n");
    s.push_str("overlay(x) = 2*x\n");
    s.push_str(
        "plot $cells using 1:2:3 with points pt 5 ps 4 palette notitle, \\\n     overlay(x) with lines lw 2 lc rgb 'red' title 'L = 2(K+N)'\n",
    );
    Ok(s)
}

fn noise_script(table: &ResultTable) -> Result<String> {
    let cells = table.noise_cells();
    let mut alphas: Vec<f64> = Vec::new();
    for c in &cells {
        if !alphas.contains(&c.alpha) {
            alphas.push(c.alpha);
        }
    }
    let mut s = String::new();
    s.push_str("# Max relative recovery error vs sampling ratio L/(K+N).\n");
    s.push_str("set terminal pngcairo size 900,700\n");
    s.push_str("set output 'noise.png'\n");
    s.push_str("set xlabel 'L / (K + N)'\nset ylabel 'max relative error'\n");
    s.push_str("set logscale y\n");
    for (i, &alpha) in alphas.iter().enumerate() {
        let _ = writeln!(s, "$alpha{i} << EOD");
        for c in cells.iter().filter(|c| c.alpha == alpha) {
            let ratio = c.l as f64 / (c.k + c.n) as f64;
            let _ = writeln!(s, "{ratio:.6} {:.6e}", c.max_rel_error.max(1e-17));
        }
        s.push_str("EOD\n");
    }
    s.push_str("plot ");
    let curves: Vec<String> = alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| format!("$alpha{i} using 1:2 with linespoints title 'alpha={alpha}'"))
        .collect();
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    Ok(s)
}

pub fn emit_plot_script_to<W: Write>(table: &ResultTable, kind: PlotKind, mut writer: W) -> Result<()> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let script = match kind {
        PlotKind::Phase => phase_script(table)?,
        PlotKind::Noise => noise_script(table)?,
    };
    writer.write_all(script.as_bytes()).map_err(|source| Error::Io {
        path: "<writer>".into(),
        source,
    })
}

pub fn emit_plot_script<P: AsRef<Path>>(table: &ResultTable, kind: PlotKind, path: P) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    emit_plot_script_to(table, kind, BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::TrialRecord;
    use crate::solver::Status;

    fn record(k: usize, l: usize, alpha: f64, rel: f64) -> TrialRecord {
        TrialRecord {
            k,
            n: k,
            l,
            alpha,
            trial: 0,
            seed: 0,
            success: rel < 1e-5,
            abs_error: rel,
            rel_error: rel,
            theorem2_bound: 1.0,
            iters: 10,
            wallclock_s: 0.0,
            status: Status::Converged,
        }
    }

    #[test]
    fn phase_script_contains_overlay_line() {
        let table = ResultTable {
            records: vec![record(5, 40, 0.0, 1e-8), record(5, 10, 0.0, 0.5)],
        };
        let mut buf = Vec::new();
        emit_plot_script_to(&table, PlotKind::Phase, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("overlay(x) = 2*x"));
    }

    #[test]
    fn noise_script_has_one_curve_per_alpha() {
        let mut records = Vec::new();
        for &alpha in &[0.0, 0.5, 1.0] {
            for &l in &[40, 80] {
                records.push(record(20, l, alpha, alpha * 0.1 + 1e-9));
            }
        }
        let table = ResultTable { records };
        let mut buf = Vec::new();
        emit_plot_script_to(&table, PlotKind::Noise, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("title 'alpha=").count(), 3);
    }

    #[test]
    fn empty_table_is_an_error() {
        let mut buf = Vec::new();
        assert!(matches!(
            emit_plot_script_to(&ResultTable::default(), PlotKind::Phase, &mut buf),
            Err(Error::EmptyTable)
        ));
    }

    #[test]
    fn noisy_table_cannot_plot_as_phase() {
        let table = ResultTable {
            records: vec![record(5, 40, 0.5, 1e-2)],
        };
        let mut buf = Vec::new();
        assert!(emit_plot_script_to(&table, PlotKind::Phase, &mut buf).is_err());
    }
}
