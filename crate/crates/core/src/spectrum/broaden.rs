use super::{Spectrum, SpectrumError};

/// FWHM / σ for a Gaussian, `2√(2 ln 2)`.
const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Kernel support in units of σ on each side.
const KERNEL_HALF_WIDTH_SIGMAS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Broadening {
    pub kernel: Kernel,
    /// MHz.
    pub fwhm: f64,
}

fn gaussian_weights(fwhm: f64, spacing: f64) -> Vec<f64> {
    let sigma = fwhm / FWHM_PER_SIGMA;
    let half = (KERNEL_HALF_WIDTH_SIGMAS * sigma / spacing).ceil() as isize;
    let mut w: Vec<f64> = (-half..=half)
        .map(|k| {
            let x = k as f64 * spacing / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn convolve_nearest(y: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = y.len() as isize;
    let half = (weights.len() / 2) as isize;
    (0..n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let j = (i + k as isize - half).clamp(0, n - 1);
                    w * y[j as usize]
                })
                .sum()
        })
        .collect()
}

/// Convolves absorption and dispersion with a unit-area Gaussian of the given
/// FWHM (MHz), truncated at ±4σ, extending the edges with their end values.
/// `fwhm = 0` returns the input unchanged.
pub fn broaden(spectrum: &Spectrum, fwhm: f64) -> Result<Spectrum, SpectrumError> {
    if !(fwhm >= 0.0 && fwhm.is_finite()) {
        return Err(SpectrumError::InvalidArgument(format!("fwhm must be >= 0, got {fwhm}")));
    }
    if fwhm == 0.0 {
        return Ok(spectrum.clone());
    }
    let spacing = spectrum.spacing();
    if fwhm < 2.0 * spacing {
        return Err(SpectrumError::GridTooCoarse { fwhm, spacing });
    }
    let weights = gaussian_weights(fwhm, spacing);
    let mut meta = *spectrum.meta();
    meta.broadening = Some(Broadening { kernel: Kernel::Gaussian, fwhm });
    Ok(spectrum.with_data(
        convolve_nearest(spectrum.absorption(), &weights),
        convolve_nearest(spectrum.dispersion(), &weights),
        meta,
    ))
}
