//! Cosine spectra, dominant modes, period estimation, pattern
//! classification and threshold sweeps over the domain length.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::model::{Parameters, Sensitivity};
use crate::solver::{Grid, RunRecord, StateField, Termination};
use crate::stability::{chi_zero, tail_kmax, ThresholdKind};
use crate::{Error, Result};

/// Coefficients of `sum a_k cos(k pi x / L)`, `k = 0..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// `coeffs[0]` is the cell mean.
    pub coeffs: Vec<f64>,
}

impl ModeSpectrum {
    /// Sum of `|a_k|` over `k >= 1`.
    pub fn ac_mass(&self) -> f64 {
        self.coeffs.iter().skip(1).map(|a| a.abs()).sum()
    }
}

/// Midpoint-rule projection of a cell profile onto `cos(k pi x / L)`.
pub fn cosine_spectrum(profile: &[f64], grid: &Grid, kmax: usize) -> Result<ModeSpectrum> {
    let n = grid.n();
    if profile.len() != n {
        return Err(Error::InvalidConfig("profile does not match grid"));
    }
    if 2 * kmax >= n {
        return Err(Error::KmaxTooLarge { kmax, n });
    }
    let mut coeffs = vec![0.0; kmax + 1];
    coeffs[0] = profile.iter().sum::<f64>() / n as f64;
    let scale = 2.0 / n as f64;
    for (k, a) in coeffs.iter_mut().enumerate().skip(1) {
        let f = k as f64 * PI / n as f64;
        *a = scale
            * profile
                .iter()
                .enumerate()
                .map(|(i, &y)| y * libm::cos(f * (i as f64 + 0.5)))
                .sum::<f64>();
    }
    Ok(ModeSpectrum { coeffs })
}

/// Largest AC coefficient and its share of the AC mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantMode {
    /// Mode index, at least 1.
    pub k: usize,
    /// `|a_k| / sum_{j>=1} |a_j|`.
    pub purity: f64,
}

/// Dominant AC mode; ties go to the smaller `k`.
pub fn dominant_mode(spec: &ModeSpectrum) -> DominantMode {
    let mut best = (1, 0.0_f64);
    for (k, a) in spec.coeffs.iter().enumerate().skip(1) {
        if a.abs() > best.1 {
            best = (k, a.abs());
        }
    }
    let mass = spec.ac_mass();
    DominantMode { k: best.0, purity: if mass > 0.0 { best.1 / mass } else { 0.0 } }
}

/// Mean peak-to-peak gap of a sampled signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    /// Mean gap between successive peaks.
    pub period: f64,
    /// Standard deviation of the gaps over their mean.
    pub confidence: f64,
    /// Peaks used.
    pub peaks: usize,
}

impl PeriodEstimate {
    /// Whether the gap spread is below 5%.
    pub fn is_confident(&self) -> bool {
        self.confidence < 0.05
    }
}

/// Period from the peaks of `values(times)` after discarding the first
/// `transient` fraction of the time span.
pub fn estimate_period(times: &[f64], values: &[f64], transient: f64) -> Result<PeriodEstimate> {
    if times.len() != values.len() {
        return Err(Error::InvalidConfig("times and values differ in length"));
    }
    if times.len() < 3 {
        return Err(Error::InsufficientPeaks { found: 0 });
    }
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let cut = t0 + transient.clamp(0.0, 1.0) * (t1 - t0);
    let start = times.iter().position(|&t| t >= cut).unwrap_or(times.len());
    let (ts, vs) = (&times[start..], &values[start..]);
    if ts.len() < 3 {
        return Err(Error::InsufficientPeaks { found: 0 });
    }
    let hi = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo < 1e-6 {
        return Err(Error::NoOscillation);
    }
    let mid = 0.5 * (hi + lo);
    let mut peaks = Vec::new();
    for i in 1..vs.len() - 1 {
        if vs[i] > vs[i - 1] && vs[i] >= vs[i + 1] && vs[i] > mid {
            peaks.push(refine_peak([ts[i - 1], ts[i], ts[i + 1]], [vs[i - 1], vs[i], vs[i + 1]]));
        }
    }
    if peaks.len() < 4 {
        return Err(Error::InsufficientPeaks { found: peaks.len() });
    }
    let gaps: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / gaps.len() as f64;
    Ok(PeriodEstimate { period: mean, confidence: libm::sqrt(var) / mean, peaks: peaks.len() })
}

/// Vertex of the parabola through three samples.
fn refine_peak(t: [f64; 3], y: [f64; 3]) -> f64 {
    let (d0, d2) = (t[0] - t[1], t[2] - t[1]);
    let (e0, e2) = (y[0] - y[1], y[2] - y[1]);
    // y - y1 = a s^2 + b s with s = t - t1.
    let den = d0 * d2 * (d0 - d2);
    if den == 0.0 {
        return t[1];
    }
    let a = (e0 * d2 - e2 * d0) / den;
    let b = (e2 * d0 * d0 - e0 * d2 * d2) / den;
    if a >= 0.0 {
        return t[1];
    }
    let s = (-b / (2.0 * a)).clamp(d0, d2);
    t[1] + s
}

/// Classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    /// Minimum purity for a single-mode pattern.
    pub purity: f64,
    /// AC mass below this times `|a_0|` counts as homogeneous.
    pub homogeneity: f64,
    /// Leading fraction of the run ignored for period estimation.
    pub transient: f64,
    /// Highest mode in the spectra; `None` uses `n/2 - 1`.
    pub kmax: Option<usize>,
    /// Species used for spectra and periods (`0` = `u`).
    pub species: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { purity: 0.8, homogeneity: 1e-4, transient: 0.5, kmax: None, species: 0 }
    }
}

/// Pattern type of a finished run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pattern {
    /// Spatially constant.
    Homogeneous,
    /// Steady single-mode pattern.
    StationaryPattern {
        /// Dominant mode.
        k: usize,
    },
    /// Periodic oscillation with a fixed spatial mode.
    TimePeriodic {
        /// Dominant mode.
        k: usize,
        /// Period.
        period: f64,
    },
    /// None of the above.
    Irregular,
}

impl core::fmt::Display for Pattern {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Pattern::Homogeneous => f.write_str("Homogeneous"),
            Pattern::StationaryPattern { k } => write!(f, "StationaryPattern({k})"),
            Pattern::TimePeriodic { k, period } => write!(f, "TimePeriodic({k}, {period:.6})"),
            Pattern::Irregular => f.write_str("Irregular"),
        }
    }
}

/// Classification with its supporting data.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternReport {
    /// Pattern type.
    pub pattern: Pattern,
    /// `|a_k|` of the dominant mode of the final profile.
    pub amplitude: f64,
    /// Dominant mode of the final profile.
    pub dominant: DominantMode,
    /// Spectrum of the final profile.
    pub spectrum: ModeSpectrum,
    /// Period estimate of the first probe, when one was obtained.
    pub period: Option<PeriodEstimate>,
    /// Dominant modes of the last three periods, when checked.
    pub window_modes: Vec<usize>,
}

fn kmax_for(grid: &Grid, cfg: &ClassifyConfig) -> usize {
    let cap = (grid.n() - 1) / 2;
    cfg.kmax.map_or(cap, |k| k.min(cap))
}

/// Spectrum of one species of a state.
pub fn state_spectrum(st: &StateField, grid: &Grid, species: usize, kmax: usize) -> Result<ModeSpectrum> {
    cosine_spectrum(st.species(species), grid, kmax)
}

/// Classifies a finished run.
pub fn classify(run: &RunRecord, grid: &Grid, cfg: &ClassifyConfig) -> Result<PatternReport> {
    let kmax = kmax_for(grid, cfg);
    let last = run.last();
    let spectrum = state_spectrum(last, grid, cfg.species, kmax)?;
    let dominant = dominant_mode(&spectrum);
    let amplitude = spectrum.coeffs[dominant.k].abs();
    let mut report = PatternReport {
        pattern: Pattern::Irregular,
        amplitude,
        dominant,
        spectrum,
        period: None,
        window_modes: Vec::new(),
    };

    if report.spectrum.ac_mass() < cfg.homogeneity * report.spectrum.coeffs[0].abs() {
        report.pattern = Pattern::Homogeneous;
        return Ok(report);
    }
    if run.termination == Termination::Steady {
        if dominant.purity > cfg.purity {
            report.pattern = Pattern::StationaryPattern { k: dominant.k };
        }
        return Ok(report);
    }
    let Some(probe) = run.probes.first() else {
        return Ok(report);
    };
    let est = match estimate_period(&probe.t, probe.species(cfg.species), cfg.transient) {
        Ok(e) => e,
        Err(Error::InsufficientPeaks { .. } | Error::NoOscillation) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.period = Some(est);
    if !est.is_confident() {
        return Ok(report);
    }
    let t_last = last.t;
    let mut modes = Vec::with_capacity(3);
    for j in (0..3).rev() {
        let (a, b) = (t_last - (j + 1) as f64 * est.period, t_last - j as f64 * est.period);
        let mut acc = vec![0.0; kmax + 1];
        let mut count = 0;
        for st in run.snapshots.iter().filter(|s| s.t >= a && s.t < b) {
            let sp = state_spectrum(st, grid, cfg.species, kmax)?;
            for (x, y) in acc.iter_mut().zip(&sp.coeffs) {
                *x += y.abs();
            }
            count += 1;
        }
        if count == 0 {
            return Ok(report);
        }
        modes.push(dominant_mode(&ModeSpectrum { coeffs: acc }).k);
    }
    let stable = modes.iter().all(|&k| k == modes[0]);
    report.window_modes = modes;
    if stable {
        report.pattern = Pattern::TimePeriodic { k: report.window_modes[0], period: est.period };
    }
    Ok(report)
}

/// One line of a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Domain length.
    pub length: f64,
    /// Critical mode.
    pub k0: u32,
    /// Critical taxis strength.
    pub chi0: f64,
    /// Kind of the critical threshold.
    pub kind: ThresholdKind,
}

/// Critical mode and value for one domain length; `kmax = None` applies the
/// tail rule.
pub fn sweep_row(p: &Parameters, s: &Sensitivity, length: f64, kmax: Option<u32>) -> Result<SweepRow> {
    let p = p.with_length(length).validate()?;
    let kmax = match kmax {
        Some(k) => k,
        None => tail_kmax(&p, s)?,
    };
    let t = chi_zero(&p, s, kmax)?;
    Ok(SweepRow { length, k0: t.k_star, chi0: t.chi0, kind: t.kind })
}

/// [`sweep_row`] for every length, in order.
pub fn table_threshold_sweep(
    p: &Parameters,
    s: &Sensitivity,
    lengths: &[f64],
    kmax: Option<u32>,
) -> Result<Vec<SweepRow>> {
    lengths.iter().map(|&l| sweep_row(p, s, l, kmax)).collect()
}
