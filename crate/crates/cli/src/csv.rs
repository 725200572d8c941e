//! CSV export of spectra and sweep summaries.
//!
//! UTF-8, LF line endings, numbers in scientific notation with 12 significant
//! digits. Output depends only on the values, so identical inputs give
//! byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use eit_core::spectrum::SweepSummaryRow;
use eit_core::Spectrum;
use thiserror::Error;

pub const SPECTRUM_HEADER: &str = "delta_p_mhz,absorption_im_rho21,dispersion_re_rho21";
pub const SUMMARY_HEADER: &str = "omega_c_mhz,n_peaks,n_dips,max_separation_mhz,deepest_dip_depth,dip_width_mhz";
pub const DRESSED_HEADER: &str = "state,delta_p_mhz";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// 12 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_spectrum<W: Write + ?Sized>(spectrum: &Spectrum, out: &mut W) -> io::Result<()> {
    let mut buf = String::with_capacity(64 * (spectrum.len() + 1));
    buf.push_str(SPECTRUM_HEADER);
    buf.push('\n');
    for ((x, a), d) in spectrum.grid().iter().zip(spectrum.absorption()).zip(spectrum.dispersion()) {
        buf.push_str(&format_number(*x));
        buf.push(',');
        buf.push_str(&format_number(*a));
        buf.push(',');
        buf.push_str(&format_number(*d));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
}

pub fn write_summary<W: Write + ?Sized>(rows: &[SweepSummaryRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_number(r.omega_c),
            r.n_peaks,
            r.n_dips,
            format_number(r.max_separation),
            format_number(r.deepest_dip_depth),
            format_number(r.dip_width)
        )?;
    }
    Ok(())
}

pub fn write_dressed<W: Write + ?Sized>(frequencies: &[f64], out: &mut W) -> io::Result<()> {
    writeln!(out, "{DRESSED_HEADER}")?;
    for (k, f) in frequencies.iter().enumerate() {
        writeln!(out, "{},{}", k + 1, format_number(*f))?;
    }
    Ok(())
}

/// Writes a spectrum to `path`.
pub fn emit_csv(spectrum: &Spectrum, path: &Path) -> Result<(), CsvError> {
    let mut buf = Vec::new();
    write_spectrum(spectrum, &mut buf).expect("writing to memory");
    fs::write(path, buf).map_err(|source| CsvError::Io { path: path.to_path_buf(), source })
}

/// Columns of a spectrum CSV: `(grid, absorption, dispersion)`.
pub type SpectrumColumns = (Vec<f64>, Vec<f64>, Vec<f64>);

pub fn parse_spectrum_csv(text: &str) -> Result<SpectrumColumns, CsvError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SPECTRUM_HEADER => {}
        other => {
            return Err(CsvError::Format { line: 1, message: format!("unexpected header {other:?}") });
        }
    }
    let (mut x, mut a, mut d) = (Vec::new(), Vec::new(), Vec::new());
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => {
                x.push(v[0]);
                a.push(v[1]);
                d.push(v[2]);
            }
            _ => {
                return Err(CsvError::Format { line: idx + 2, message: format!("bad row `{line}`") });
            }
        }
    }
    Ok((x, a, d))
}

pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumColumns, CsvError> {
    let text = fs::read_to_string(path).map_err(|source| CsvError::Io { path: path.to_path_buf(), source })?;
    parse_spectrum_csv(&text)
}
