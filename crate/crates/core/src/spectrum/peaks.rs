use super::{Spectrum, SpectrumError};

/// Peaks whose prominence is below this fraction of the absorption range are
/// discarded.
pub const DEFAULT_PROMINENCE_FLOOR: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub index: usize,
    /// Δ_p, MHz.
    pub position: f64,
    pub value: f64,
}

/// Absorption minimum between two neighboring retained peaks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dip {
    pub index: usize,
    pub position: f64,
    pub value: f64,
    /// `(h − value) / h` with `h` the lower of the two flanking peaks; 1 means
    /// fully transparent at the dip.
    pub depth: f64,
    /// Width (MHz) of the region around the dip below `value + (h − value)/2`.
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakReport {
    pub peaks: Vec<Extremum>,
    /// `dips[k]` lies between `peaks[k]` and `peaks[k + 1]`.
    pub dips: Vec<Dip>,
    /// Distances between neighboring peaks, MHz.
    pub separations: Vec<f64>,
}

impl PeakReport {
    pub fn peak_positions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.position).collect()
    }

    pub fn dip_positions(&self) -> Vec<f64> {
        self.dips.iter().map(|d| d.position).collect()
    }

    pub fn max_separation(&self) -> Option<f64> {
        self.separations.iter().copied().reduce(f64::max)
    }

    /// Dip with the largest fractional depth (leftmost on ties).
    pub fn deepest_dip(&self) -> Option<&Dip> {
        self.dips.iter().reduce(|best, d| if d.depth > best.depth { d } else { best })
    }
}

/// Local maxima of the absorption by three-point comparison. A plateau counts
/// once, at its leftmost point, when both sides fall away from it.
fn local_maxima(y: &[f64]) -> Vec<(usize, usize)> {
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut end = i;
            while end + 1 < n && y[end + 1] == y[i] {
                end += 1;
            }
            if end + 1 < n && y[end + 1] < y[i] {
                out.push((i, end));
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Topographic prominence: height above the higher of the two lowest points
/// reached before meeting strictly higher ground (or the grid edge).
fn prominence(y: &[f64], start: usize, end: usize) -> f64 {
    let top = y[start];
    let mut left_base = top;
    for &v in y[..start].iter().rev() {
        if v > top {
            break;
        }
        left_base = left_base.min(v);
    }
    let mut right_base = top;
    for &v in &y[end + 1..] {
        if v > top {
            break;
        }
        right_base = right_base.min(v);
    }
    top - left_base.max(right_base)
}

fn dip_between(grid: &[f64], y: &[f64], left: usize, right: usize) -> Dip {
    let mut index = left;
    for k in left..=right {
        if y[k] < y[index] {
            index = k;
        }
    }
    let value = y[index];
    let flank = y[left].min(y[right]);
    let depth = if flank > 0.0 { (flank - value) / flank } else { 0.0 };

    let level = value + 0.5 * (flank - value);
    let crossing = |a: usize, b: usize| {
        let t = (level - y[a]) / (y[b] - y[a]);
        grid[a] + t * (grid[b] - grid[a])
    };
    let mut l = index;
    while l > left && y[l] < level {
        l -= 1;
    }
    let mut r = index;
    while r < right && y[r] < level {
        r += 1;
    }
    let x_left = if l < index { crossing(l, l + 1) } else { grid[index] };
    let x_right = if r > index { crossing(r - 1, r) } else { grid[index] };

    Dip { index, position: grid[index], value, depth, width: x_right - x_left }
}

/// Absorption peaks with prominence ≥ `prominence_floor × (max − min)` and
/// the dips separating neighboring peaks.
pub fn find_peaks_dips(spectrum: &Spectrum, prominence_floor: f64) -> Result<PeakReport, SpectrumError> {
    if !(prominence_floor >= 0.0 && prominence_floor.is_finite()) {
        return Err(SpectrumError::InvalidArgument(format!("prominence floor must be >= 0, got {prominence_floor}")));
    }
    let y = spectrum.absorption();
    let grid = spectrum.grid();
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let threshold = prominence_floor * (hi - lo);

    let peaks: Vec<Extremum> = local_maxima(y)
        .into_iter()
        .filter(|&(start, end)| prominence(y, start, end) >= threshold)
        .map(|(index, _)| Extremum { index, position: grid[index], value: y[index] })
        .collect();
    if peaks.is_empty() {
        return Err(SpectrumError::EmptyReport);
    }

    let dips = peaks.windows(2).map(|w| dip_between(grid, y, w[0].index, w[1].index)).collect();
    let separations = peaks.windows(2).map(|w| w[1].position - w[0].position).collect();
    Ok(PeakReport { peaks, dips, separations })
}
