use super::{broaden, find_peaks_dips, scan_probe, PeakReport, ScanWindow, Spectrum, SpectrumError};
use crate::model::{DriveParams, LevelScheme};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub prominence_floor: f64,
    /// Gaussian FWHM (MHz) applied before peak analysis.
    pub broadening_fwhm: Option<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { prominence_floor: super::DEFAULT_PROMINENCE_FLOOR, broadening_fwhm: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub omega_c: f64,
    pub spectrum: Spectrum,
    pub report: PeakReport,
}

/// One row of the coupling-sweep table. Quantities without dips are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSummaryRow {
    pub omega_c: f64,
    pub n_peaks: usize,
    pub n_dips: usize,
    pub max_separation: f64,
    pub deepest_dip_depth: f64,
    pub dip_width: f64,
}

impl SweepSummaryRow {
    fn from_report(omega_c: f64, report: &PeakReport) -> Self {
        let deepest = report.deepest_dip();
        Self {
            omega_c,
            n_peaks: report.peaks.len(),
            n_dips: report.dips.len(),
            max_separation: report.max_separation().unwrap_or(0.0),
            deepest_dip_depth: deepest.map_or(0.0, |d| d.depth),
            dip_width: deepest.map_or(0.0, |d| d.width),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSweep {
    pub entries: Vec<SweepEntry>,
    pub summary: Vec<SweepSummaryRow>,
}

/// Scans the probe once per coupling Rabi frequency in `omega_c_list`
/// (strictly ascending, MHz) and tabulates the peak structure.
pub fn sweep_coupling(
    scheme: &LevelScheme,
    drives_base: &DriveParams,
    omega_c_list: &[f64],
    window: &ScanWindow,
    options: &SweepOptions,
) -> Result<CouplingSweep, SpectrumError> {
    if omega_c_list.is_empty() {
        return Err(SpectrumError::InvalidArgument("omega_c list is empty".into()));
    }
    if omega_c_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectrumError::InvalidArgument("omega_c list must be strictly ascending".into()));
    }

    let mut entries = Vec::with_capacity(omega_c_list.len());
    let mut summary = Vec::with_capacity(omega_c_list.len());
    for &omega_c in omega_c_list {
        let mut spectrum = scan_probe(scheme, &drives_base.with_omega_c(omega_c), window)?;
        if let Some(fwhm) = options.broadening_fwhm {
            spectrum = broaden(&spectrum, fwhm)?;
        }
        let report = find_peaks_dips(&spectrum, options.prominence_floor)?;
        summary.push(SweepSummaryRow::from_report(omega_c, &report));
        entries.push(SweepEntry { omega_c, spectrum, report });
    }
    Ok(CouplingSweep { entries, summary })
}
