//! Mode-k linearization about the coexistence state, Routh-Hurwitz
//! coefficients, the critical taxis strengths and Hopf quantities.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{self, Mat3};
use crate::model::{equilibrium, Equilibrium, Parameters, Sensitivity, SensitivityValue};
use crate::{Error, Result};

/// Relative gap below which the minimizing steady-state and Hopf thresholds
/// are treated as coincident.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Relative band around zero inside which a Routh-Hurwitz quantity is
/// reported as marginal.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

/// `(k pi / L)^2`.
pub fn wavenumber_sq(length: f64, k: u32) -> f64 {
    let q = k as f64 * PI / length;
    q * q
}

/// Everything the mode-k analysis needs about the linearization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    /// Mode index.
    pub k: u32,
    /// Constant coexistence state.
    pub eq: Equilibrium,
    /// `phi`, `phi'`, `phi''` at the equilibrium prey density.
    pub sens: SensitivityValue,
    /// `(k pi / L)^2`.
    pub kk: f64,
    /// `d1 kk + alpha1 u_bar`.
    pub h1: f64,
    /// `d2 kk + alpha2 v_bar`.
    pub h2: f64,
    /// `d3 kk + alpha3 w_bar`.
    pub h3: f64,
}

impl ModeData {
    /// Evaluates the mode data; `k = 0` is allowed.
    pub fn new(p: &Parameters, s: &Sensitivity, k: u32) -> Result<Self> {
        let eq = equilibrium(p)?;
        let kk = wavenumber_sq(p.length, k);
        Ok(Self {
            k,
            eq,
            sens: s.eval(eq.w),
            kk,
            h1: p.d1 * kk + p.alpha1 * eq.u,
            h2: p.d2 * kk + p.alpha2 * eq.v,
            h3: p.d3 * kk + p.alpha3 * eq.w,
        })
    }

    /// Like [`ModeData::new`] but rejects `k = 0` and `phi(w_bar) = 0`,
    /// which the threshold formulas divide by.
    pub fn for_thresholds(p: &Parameters, s: &Sensitivity, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroMode);
        }
        let m = Self::new(p, s, k)?;
        if m.sens.phi == 0.0 {
            return Err(Error::SensitivityVanishesAtEquilibrium);
        }
        Ok(m)
    }

    /// Entry (1,3): `chi u_bar phi kk + beta1 u_bar`.
    pub fn a13(&self, p: &Parameters, chi: f64) -> f64 {
        chi * self.eq.u * self.sens.phi * self.kk + p.beta1 * self.eq.u
    }

    /// Entry (2,3): `xi v_bar phi kk + beta2 v_bar`.
    pub fn a23(&self, p: &Parameters) -> f64 {
        p.xi * self.eq.v * self.sens.phi * self.kk + p.beta2 * self.eq.v
    }

    /// `d chi / d eta1`-type coupling `beta31 w_bar u_bar phi kk`.
    fn chi_weight(&self, p: &Parameters) -> f64 {
        p.beta31 * self.eq.w * self.eq.u * self.sens.phi * self.kk
    }
}

/// The mode-k stability matrix.
pub fn stability_matrix(p: &Parameters, s: &Sensitivity, chi: f64, k: u32) -> Result<Mat3> {
    let m = ModeData::new(p, s, k)?;
    Ok(matrix_of(p, &m, chi))
}

pub(crate) fn matrix_of(p: &Parameters, m: &ModeData, chi: f64) -> Mat3 {
    let w = m.eq.w;
    [
        [-m.h1, 0.0, m.a13(p, chi)],
        [0.0, -m.h2, m.a23(p)],
        [-p.beta31 * w, -p.beta32 * w, -m.h3],
    ]
}

/// Coefficients of `sigma^3 + eta2 sigma^2 + eta1 sigma + eta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaCoefficients {
    /// Constant term.
    pub eta0: f64,
    /// Linear term.
    pub eta1: f64,
    /// Quadratic term, always positive.
    pub eta2: f64,
}

impl EtaCoefficients {
    /// From the invariants of a matrix: `(-det, minor sum, -trace)`.
    pub fn from_matrix(m: &Mat3) -> Self {
        Self {
            eta0: -linalg::det(m),
            eta1: linalg::principal_minor_sum(m),
            eta2: -linalg::trace(m),
        }
    }

    /// The Hurwitz determinant `eta1 eta2 - eta0`.
    pub fn hurwitz(&self) -> f64 {
        self.eta1 * self.eta2 - self.eta0
    }

    /// Cubic polynomial value at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z + self.eta2) * z + self.eta1) * z + self.eta0
    }
}

/// Closed-form characteristic coefficients.
pub fn eta(p: &Parameters, s: &Sensitivity, chi: f64, k: u32) -> Result<EtaCoefficients> {
    let m = ModeData::new(p, s, k)?;
    Ok(eta_of(p, &m, chi))
}

pub(crate) fn eta_of(p: &Parameters, m: &ModeData, chi: f64) -> EtaCoefficients {
    let (h1, h2, h3) = (m.h1, m.h2, m.h3);
    let w = m.eq.w;
    let a13 = m.a13(p, chi);
    let a23 = m.a23(p);
    EtaCoefficients {
        eta0: h1 * h2 * h3 + h1 * a23 * p.beta32 * w + h2 * a13 * p.beta31 * w,
        eta1: h1 * h2 + h1 * h3 + h2 * h3 + a13 * p.beta31 * w + a23 * p.beta32 * w,
        eta2: h1 + h2 + h3,
    }
}

/// Magnitudes against which the marginal band of each condition is measured.
fn eta_scales(p: &Parameters, m: &ModeData, chi: f64) -> [f64; 3] {
    let w = m.eq.w;
    let a13 = (m.a13(p, chi) * p.beta31 * w).abs();
    let a23 = (m.a23(p) * p.beta32 * w).abs();
    let s0 = m.h1 * m.h2 * m.h3 + m.h1 * a23 + m.h2 * a13;
    let s1 = m.h1 * m.h2 + m.h1 * m.h3 + m.h2 * m.h3 + a13 + a23;
    [s0, s1, s1 * (m.h1 + m.h2 + m.h3) + s0]
}

/// Steady-state threshold: the root of `eta0` in `chi`.
pub fn chi_s(p: &Parameters, s: &Sensitivity, k: u32) -> Result<f64> {
    Ok(chi_s_of(p, &ModeData::for_thresholds(p, s, k)?))
}

pub(crate) fn chi_s_of(p: &Parameters, m: &ModeData) -> f64 {
    let (h1, h2, h3) = (m.h1, m.h2, m.h3);
    let Equilibrium { u, v, w } = m.eq;
    let phik = m.sens.phi * m.kk;
    -(p.beta32 * v * h1 / (p.beta31 * u * h2)) * p.xi
        - (h1 * h2 * h3 + h2 * p.beta31 * p.beta1 * u * w + h1 * p.beta32 * p.beta2 * v * w)
            / (h2 * p.beta31 * u * w * phik)
}

/// Hopf threshold: the root of `eta1 eta2 - eta0` in `chi`.
pub fn chi_h(p: &Parameters, s: &Sensitivity, k: u32) -> Result<f64> {
    Ok(chi_h_of(p, &ModeData::for_thresholds(p, s, k)?))
}

pub(crate) fn chi_h_of(p: &Parameters, m: &ModeData) -> f64 {
    let (h1, h2, h3) = (m.h1, m.h2, m.h3);
    let Equilibrium { u, v, w } = m.eq;
    let phik = m.sens.phi * m.kk;
    let cubic = h1 * h1 * h2
        + h1 * h2 * h2
        + h1 * h1 * h3
        + h1 * h3 * h3
        + h2 * h2 * h3
        + h2 * h3 * h3
        + 2.0 * h1 * h2 * h3;
    let h13 = h1 + h3;
    -cubic / (h13 * p.beta31 * u * w * phik)
        - (h13 * p.beta31 * p.beta1 * u + (h2 + h3) * p.beta32 * p.beta2 * v)
            / (h13 * p.beta31 * u * phik)
        - (h2 + h3) * p.beta32 * v * p.xi / (h13 * p.beta31 * u)
}

/// Root of `eta1` in `chi`; separates the two threshold orderings.
pub fn chi_m(p: &Parameters, s: &Sensitivity, k: u32) -> Result<f64> {
    Ok(chi_m_of(p, &ModeData::for_thresholds(p, s, k)?))
}

pub(crate) fn chi_m_of(p: &Parameters, m: &ModeData) -> f64 {
    let (h1, h2, h3) = (m.h1, m.h2, m.h3);
    let Equilibrium { u, v, w } = m.eq;
    let phik = m.sens.phi * m.kk;
    -(h1 * h2 + h1 * h3 + h2 * h3
        + (p.beta31 * p.beta1 * u + p.beta32 * p.beta2 * v) * w
        + p.beta32 * v * p.xi * w * phik)
        / (p.beta31 * u * w * phik)
}

/// Which threshold sets `chi0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    /// A steady-state threshold is smallest.
    SteadyState,
    /// A Hopf threshold is smallest.
    Hopf,
    /// The two minima coincide within [`DEGENERACY_TOLERANCE`].
    Degenerate,
    /// `phi(w_bar) > 0`: no positive taxis strength destabilizes.
    AlwaysStable,
}

impl core::fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            ThresholdKind::SteadyState => "SteadyState",
            ThresholdKind::Hopf => "Hopf",
            ThresholdKind::Degenerate => "Degenerate",
            ThresholdKind::AlwaysStable => "AlwaysStable",
        })
    }
}

/// Thresholds of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    /// Mode index.
    pub k: u32,
    /// Steady-state threshold.
    pub chi_s: f64,
    /// Hopf threshold.
    pub chi_h: f64,
    /// Root of `eta1`.
    pub chi_m: f64,
}

/// Thresholds for `k = 1..=kmax` and the overall critical value.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    /// One row per mode.
    pub rows: Vec<ThresholdRow>,
    /// Smallest threshold; infinite when always stable.
    pub chi0: f64,
    /// Mode attaining `chi0`; 0 when always stable.
    pub k_star: u32,
    /// Kind of the minimizing threshold.
    pub kind: ThresholdKind,
}

impl ThresholdTable {
    /// Row for mode `k`.
    pub fn row(&self, k: u32) -> Option<&ThresholdRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    /// Smallest steady-state threshold and its mode.
    pub fn min_steady(&self) -> Option<(u32, f64)> {
        argmin(self.rows.iter().map(|r| (r.k, r.chi_s)))
    }

    /// Smallest Hopf threshold and its mode.
    pub fn min_hopf(&self) -> Option<(u32, f64)> {
        argmin(self.rows.iter().map(|r| (r.k, r.chi_h)))
    }
}

fn argmin(it: impl Iterator<Item = (u32, f64)>) -> Option<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for (k, x) in it {
        if best.is_none_or(|(_, b)| x < b) {
            best = Some((k, x));
        }
    }
    best
}

/// Tabulates the thresholds for `k = 1..=kmax` and selects the critical mode.
pub fn chi_zero(p: &Parameters, s: &Sensitivity, kmax: u32) -> Result<ThresholdTable> {
    if kmax == 0 {
        return Err(Error::InvalidConfig("kmax must be at least 1"));
    }
    let mut rows = Vec::with_capacity(kmax as usize);
    let mut phi = 0.0;
    for k in 1..=kmax {
        let m = ModeData::for_thresholds(p, s, k)?;
        phi = m.sens.phi;
        rows.push(ThresholdRow {
            k,
            chi_s: chi_s_of(p, &m),
            chi_h: chi_h_of(p, &m),
            chi_m: chi_m_of(p, &m),
        });
    }
    let mut table = ThresholdTable {
        rows,
        chi0: f64::INFINITY,
        k_star: 0,
        kind: ThresholdKind::AlwaysStable,
    };
    if phi > 0.0 {
        return Ok(table);
    }
    let (ks, s_min) = table.min_steady().expect("kmax >= 1");
    let (kh, h_min) = table.min_hopf().expect("kmax >= 1");
    let (chi0, k_star, kind) = if s_min <= h_min { (s_min, ks, ThresholdKind::SteadyState) } else { (h_min, kh, ThresholdKind::Hopf) };
    table.chi0 = chi0;
    table.k_star = k_star;
    table.kind = if (s_min - h_min).abs() <= DEGENERACY_TOLERANCE * chi0.abs() {
        ThresholdKind::Degenerate
    } else {
        kind
    };
    Ok(table)
}

/// Number of modes to scan: the smallest `kmax >= 30` such that both
/// thresholds have risen for five consecutive modes and exceed ten times the
/// running minimum. Both grow like `k^2`, so the minimum cannot lie further out.
pub fn tail_kmax(p: &Parameters, s: &Sensitivity) -> Result<u32> {
    const FLOOR: u32 = 30;
    const CAP: u32 = 1_000_000;
    let first = ModeData::for_thresholds(p, s, 1)?;
    if first.sens.phi > 0.0 {
        return Ok(FLOOR);
    }
    let mut prev = (chi_s_of(p, &first), chi_h_of(p, &first));
    let mut min = prev.0.min(prev.1);
    let (mut rise_s, mut rise_h) = (0u32, 0u32);
    for k in 2..=CAP {
        let m = ModeData::for_thresholds(p, s, k)?;
        let cur = (chi_s_of(p, &m), chi_h_of(p, &m));
        rise_s = if cur.0 > prev.0 { rise_s + 1 } else { 0 };
        rise_h = if cur.1 > prev.1 { rise_h + 1 } else { 0 };
        min = min.min(cur.0).min(cur.1);
        prev = cur;
        let far = cur.0 > 10.0 * min && cur.1 > 10.0 * min;
        if k >= FLOOR && rise_s >= 5 && rise_h >= 5 && far {
            return Ok(k);
        }
    }
    Err(Error::InvalidConfig("threshold tail did not settle"))
}

/// Routh-Hurwitz condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `eta0 > 0`.
    Eta0,
    /// `eta1 > 0`.
    Eta1,
    /// `eta1 eta2 - eta0 > 0`.
    Hurwitz,
}

impl core::fmt::Display for Condition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Condition::Eta0 => "eta0<0",
            Condition::Eta1 => "eta1<0",
            Condition::Hurwitz => "eta1*eta2-eta0<0",
        })
    }
}

/// Outcome of the Routh-Hurwitz sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityVerdict {
    /// Every condition holds strictly for every mode.
    Stable,
    /// Some condition fails. Among failing modes the one whose threshold
    /// is smallest is reported, i.e. the mode that lost stability first as
    /// `chi` grew.
    Unstable {
        /// Mode index.
        k: u32,
        /// Failed condition.
        condition: Condition,
    },
    /// No condition fails but one sits within the marginal band.
    Marginal {
        /// Mode index.
        k: u32,
        /// Marginal condition.
        condition: Condition,
    },
}

/// Routh-Hurwitz sweep over `k = 0..=kmax` at the given `chi`.
pub fn is_stable(p: &Parameters, s: &Sensitivity, chi: f64, kmax: u32) -> Result<StabilityVerdict> {
    let mut worst: Option<(f64, u32, Condition)> = None;
    let mut marginal: Option<(u32, Condition)> = None;
    for k in 0..=kmax {
        let m = ModeData::new(p, s, k)?;
        let e = eta_of(p, &m, chi);
        let scale = eta_scales(p, &m, chi);
        let checks = [
            (Condition::Eta0, e.eta0, scale[0]),
            (Condition::Eta1, e.eta1, scale[1]),
            (Condition::Hurwitz, e.hurwitz(), scale[2]),
        ];
        let ranked = k > 0 && m.sens.phi < 0.0;
        for (cond, value, scale) in checks {
            let band = MARGINAL_TOLERANCE * scale;
            if value < -band {
                // Order by the threshold the condition crosses; mode 0 and
                // non-group-defense cases fall back to scan order.
                let key = if !ranked {
                    if k == 0 { f64::NEG_INFINITY } else { k as f64 }
                } else {
                    match cond {
                        Condition::Eta0 => chi_s_of(p, &m),
                        Condition::Eta1 => chi_m_of(p, &m),
                        Condition::Hurwitz => chi_h_of(p, &m),
                    }
                };
                if worst.is_none_or(|(b, _, _)| key < b) {
                    worst = Some((key, k, cond));
                }
            } else if value.abs() <= band && marginal.is_none() {
                marginal = Some((k, cond));
            }
        }
    }
    Ok(match (worst, marginal) {
        (Some((_, k, condition)), _) => StabilityVerdict::Unstable { k, condition },
        (None, Some((k, condition))) => StabilityVerdict::Marginal { k, condition },
        (None, None) => StabilityVerdict::Stable,
    })
}

/// Roots of the characteristic cubic, sorted by descending real part and
/// then descending imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTriple(pub [Complex64; 3]);

/// Eigenvalues of a 3x3 matrix through its characteristic cubic.
pub fn eigenvalues(m: &Mat3) -> EigenTriple {
    cubic_roots(&EtaCoefficients::from_matrix(m))
}

/// Roots of `sigma^3 + eta2 sigma^2 + eta1 sigma + eta0` by the
/// Cardano/trigonometric resolvent, each polished by one Newton step.
pub fn cubic_roots(e: &EtaCoefficients) -> EigenTriple {
    let (a, b, c) = (e.eta2, e.eta1, e.eta0);
    let shift = a / 3.0;
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = qq * qq / 4.0 + pp * pp * pp / 27.0;
    let mut roots = if pp == 0.0 && qq == 0.0 {
        [Complex64::new(0.0, 0.0); 3]
    } else if disc > 0.0 {
        let sq = libm::sqrt(disc);
        // Pick the sign that avoids cancellation.
        let t = if qq > 0.0 { -qq / 2.0 - sq } else { -qq / 2.0 + sq };
        let cu = libm::cbrt(t);
        let cv = if cu != 0.0 { -pp / (3.0 * cu) } else { 0.0 };
        let re = -(cu + cv) / 2.0;
        let im = libm::sqrt(3.0) / 2.0 * (cu - cv);
        [
            Complex64::new(cu + cv, 0.0),
            Complex64::new(re, im.abs()),
            Complex64::new(re, -im.abs()),
        ]
    } else {
        let r = libm::sqrt(-pp / 3.0);
        let arg = (3.0 * qq / (2.0 * pp) * libm::sqrt(-3.0 / pp)).clamp(-1.0, 1.0);
        let theta = libm::acos(arg) / 3.0;
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (j, z) in out.iter_mut().enumerate() {
            *z = Complex64::new(2.0 * r * libm::cos(theta - 2.0 * PI * j as f64 / 3.0), 0.0);
        }
        out
    };
    for z in roots.iter_mut() {
        *z -= shift;
        let d = (3.0 * *z + 2.0 * a) * *z + b;
        if d.norm() > 0.0 {
            let step = e.eval(*z) / d;
            let polished = *z - step;
            if e.eval(polished).norm() <= e.eval(*z).norm() {
                *z = polished;
            }
        }
    }
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    EigenTriple(roots)
}

/// Hopf frequency and the linear-theory period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfFrequency {
    /// `sqrt(eta1(chi_H_k, k))`.
    pub tau0: f64,
    /// `2 pi / tau0`.
    pub period: f64,
}

/// Frequency of the purely imaginary pair at the Hopf threshold of mode `k`.
pub fn hopf_frequency(p: &Parameters, s: &Sensitivity, k: u32) -> Result<HopfFrequency> {
    let m = ModeData::for_thresholds(p, s, k)?;
    let e = eta_of(p, &m, chi_h_of(p, &m));
    if e.eta1 <= 0.0 {
        return Err(Error::NotAHopfPoint { k, eta1: e.eta1 });
    }
    let tau0 = libm::sqrt(e.eta1);
    Ok(HopfFrequency { tau0, period: 2.0 * PI / tau0 })
}

/// Crossing speed of the imaginary pair at the Hopf threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transversality {
    /// `beta31 w_bar u_bar phi kk (H1 + H3) / (tau0^2 + eta2^2)`; negative.
    pub sigma1_prime: f64,
    /// `d Re sigma / d chi = -sigma1_prime / 2`; positive.
    pub lambda_prime: f64,
}

/// Derivative of the real part of the critical pair with respect to `chi`.
pub fn transversality(p: &Parameters, s: &Sensitivity, k: u32) -> Result<Transversality> {
    let m = ModeData::for_thresholds(p, s, k)?;
    let e = eta_of(p, &m, chi_h_of(p, &m));
    if e.eta1 <= 0.0 {
        return Err(Error::NotAHopfPoint { k, eta1: e.eta1 });
    }
    let sigma1_prime = m.chi_weight(p) * (m.h1 + m.h3) / (e.eta1 + e.eta2 * e.eta2);
    Ok(Transversality { sigma1_prime, lambda_prime: -sigma1_prime / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{table1, table3};
    use approx::assert_relative_eq;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn table1_thresholds() {
        let (p, s) = table1();
        let chs = [66.98, 18.98, 10.30, 7.49, 6.41, 6.05, 6.09, 6.36, 6.80];
        let chh = [1204.20, 550.84, 504.20, 575.80, 705.50, 878.48, 1089.70, 1336.90, 1619.19];
        for k in 1..=9u32 {
            assert!(rel(chi_s(&p, &s, k).unwrap(), chs[k as usize - 1]) < 5e-3, "chi_S {k}");
            assert!(rel(chi_h(&p, &s, k).unwrap(), chh[k as usize - 1]) < 5e-3, "chi_H {k}");
        }
    }

    #[test]
    fn table3_thresholds() {
        let (p, s) = table3();
        assert!(rel(chi_s(&p, &s, 2).unwrap(), 98.63) < 5e-3);
        assert!(rel(chi_h(&p, &s, 3).unwrap(), 92.57) < 5e-3);
    }

    #[test]
    fn zero_mode_matrix_is_kinetic_jacobian() {
        let (p, s) = table1();
        let e = equilibrium(&p).unwrap();
        let m = stability_matrix(&p, &s, 8.0, 0).unwrap();
        let j = [
            [-p.alpha1 * e.u, 0.0, p.beta1 * e.u],
            [0.0, -p.alpha2 * e.v, p.beta2 * e.v],
            [-p.beta31 * e.w, -p.beta32 * e.w, -p.alpha3 * e.w],
        ];
        for i in 0..3 {
            for c in 0..3 {
                assert_relative_eq!(m[i][c], j[i][c], max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn singular_at_steady_threshold() {
        let (p, s) = table1();
        let chi = chi_s(&p, &s, 6).unwrap();
        let m = stability_matrix(&p, &s, chi, 6).unwrap();
        let scale = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(linalg::det(&m).abs() < 1e-8 * scale * scale * scale);
    }

    #[test]
    fn closed_form_eta_matches_invariants() {
        let (p, s) = table3();
        for k in 0..12 {
            for chi in [-50.0, 0.0, 91.0, 300.0] {
                let a = eta(&p, &s, chi, k).unwrap();
                let b = EtaCoefficients::from_matrix(&stability_matrix(&p, &s, chi, k).unwrap());
                assert_relative_eq!(a.eta0, b.eta0, max_relative = 1e-10, epsilon = 1e-12);
                assert_relative_eq!(a.eta1, b.eta1, max_relative = 1e-10, epsilon = 1e-12);
                assert_relative_eq!(a.eta2, b.eta2, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn critical_values() {
        let (p, s) = table1();
        let t = chi_zero(&p, &s, 30).unwrap();
        assert_eq!((t.k_star, t.kind), (6, ThresholdKind::SteadyState));
        assert!(rel(t.chi0, 6.05) < 5e-3);
        let (p, s) = table3();
        let t = chi_zero(&p, &s, 30).unwrap();
        assert_eq!((t.k_star, t.kind), (3, ThresholdKind::Hopf));
        assert!(rel(t.chi0, 92.57) < 5e-3);
    }

    #[test]
    fn positive_sensitivity_is_always_stable() {
        let (p, _) = table1();
        let w = equilibrium(&p).unwrap().w;
        let s = Sensitivity::group_defense(1.0, w + 0.1).unwrap();
        let t = chi_zero(&p, &s, 30).unwrap();
        assert_eq!(t.kind, ThresholdKind::AlwaysStable);
        assert!(t.rows.iter().all(|r| r.chi_s < 0.0 && r.chi_h < 0.0));
    }

    #[test]
    fn vanishing_sensitivity_is_rejected() {
        let (p, _) = table1();
        let w = equilibrium(&p).unwrap().w;
        let s = Sensitivity::group_defense(1.0, w).unwrap();
        assert_eq!(chi_s(&p, &s, 1), Err(Error::SensitivityVanishesAtEquilibrium));
        assert_eq!(chi_zero(&p, &s, 5).unwrap_err(), Error::SensitivityVanishesAtEquilibrium);
        assert_eq!(chi_h(&p, &table1().1, 0), Err(Error::ZeroMode));
    }

    #[test]
    fn routh_hurwitz_sweep() {
        let (p, s) = table1();
        assert_eq!(is_stable(&p, &s, 5.0, 30).unwrap(), StabilityVerdict::Stable);
        assert_eq!(
            is_stable(&p, &s, 8.0, 30).unwrap(),
            StabilityVerdict::Unstable { k: 6, condition: Condition::Eta0 }
        );
        let (p, s) = table3();
        assert_eq!(
            is_stable(&p, &s, 95.0, 30).unwrap(),
            StabilityVerdict::Unstable { k: 3, condition: Condition::Hurwitz }
        );
    }

    #[test]
    fn stability_flips_at_chi0() {
        for (p, s) in [table1(), table3()] {
            let t = chi_zero(&p, &s, 30).unwrap();
            let (mut lo, mut hi) = (0.5 * t.chi0, 1.5 * t.chi0);
            while hi - lo > 1e-10 * t.chi0 {
                let mid = 0.5 * (lo + hi);
                match is_stable(&p, &s, mid, 30).unwrap() {
                    StabilityVerdict::Stable => lo = mid,
                    _ => hi = mid,
                }
            }
            assert!((lo - t.chi0).abs() < 1e-8 * t.chi0);
        }
    }

    #[test]
    fn small_interval_selects_first_mode() {
        let (p, s) = table1();
        for length in [0.1, 0.25] {
            let p = p.with_length(length);
            for k in 1..=10 {
                assert!(chi_s(&p, &s, k).unwrap() < chi_h(&p, &s, k).unwrap());
            }
            assert_eq!(chi_zero(&p, &s, 30).unwrap().k_star, 1);
        }
    }

    #[test]
    fn tail_rule_covers_the_minimum() {
        let (p, s) = table1();
        for length in [7.0, 16.0, 40.0] {
            let p = p.with_length(length);
            let kmax = tail_kmax(&p, &s).unwrap();
            let a = chi_zero(&p, &s, kmax).unwrap();
            let b = chi_zero(&p, &s, 4 * kmax).unwrap();
            assert!(kmax >= 30);
            assert_eq!((a.k_star, a.chi0), (b.k_star, b.chi0));
        }
    }

    #[test]
    fn diagonal_spectrum() {
        let m = [[-1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -3.0]];
        let EigenTriple(r) = eigenvalues(&m);
        for (z, want) in r.iter().zip([-1.0, -2.0, -3.0]) {
            assert!((z.re - want).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_at_thresholds() {
        let (p, s) = table1();
        let chi = chi_s(&p, &s, 6).unwrap();
        let e = eta(&p, &s, chi, 6).unwrap();
        let EigenTriple(r) = eigenvalues(&stability_matrix(&p, &s, chi, 6).unwrap());
        assert!(r[0].norm() < 1e-8);
        let d = e.eta2 * e.eta2 - 4.0 * e.eta1;
        assert!(d > 0.0);
        assert_relative_eq!(r[1].re, (-e.eta2 + d.sqrt()) / 2.0, max_relative = 1e-8);
        assert_relative_eq!(r[2].re, (-e.eta2 - d.sqrt()) / 2.0, max_relative = 1e-8);

        let (p, s) = table3();
        let chi = chi_h(&p, &s, 3).unwrap();
        let e = eta(&p, &s, chi, 3).unwrap();
        let EigenTriple(r) = eigenvalues(&stability_matrix(&p, &s, chi, 3).unwrap());
        let tau = e.eta1.sqrt();
        assert!(r[0].re.abs() < 1e-8 && (r[0].im - tau).abs() < 1e-8);
        assert!(r[1].re.abs() < 1e-8 && (r[1].im + tau).abs() < 1e-8);
        assert!((r[2].re + e.eta2).abs() < 1e-8 && r[2].im.abs() < 1e-8);
        let f = hopf_frequency(&p, &s, 3).unwrap();
        assert_relative_eq!(f.tau0, tau, max_relative = 1e-12);
    }

    #[test]
    fn hopf_quantities() {
        let (p, s) = table3();
        let f = hopf_frequency(&p, &s, 3).unwrap();
        // Frozen from an independent numpy evaluation of the same rates.
        assert_relative_eq!(f.tau0, 0.27685, max_relative = 1e-4);
        assert_relative_eq!(f.period, 22.695, max_relative = 1e-4);
        let t = transversality(&p, &s, 3).unwrap();
        assert!(t.sigma1_prime < 0.0 && t.lambda_prime > 0.0);

        let (p, s) = table1();
        assert!(matches!(hopf_frequency(&p, &s, 6), Err(Error::NotAHopfPoint { k: 6, .. })));
    }
}
