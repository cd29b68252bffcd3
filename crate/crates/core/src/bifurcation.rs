//! Steady-state bifurcation from the constant state: null vector, the
//! determinant certificate, the second-order coefficient `K2` of the
//! pitchfork `chi(s) = chi_S + K2 s^2 + o(s^2)` and branch-stability verdicts.
//!
//! Notation: `kk = (k pi / L)^2`, `phi`, `phi'`, `phi''` are taken at
//! `w_bar`, and `chi = chi_S_k` throughout. The branch is written as
//! `(u_bar, v_bar, w_bar) + s (P, Q, 1) cos(k pi x / L) + s^2 (phi1, psi1, gamma1) + ...`.
//!
//! The first-order correction has a mean part and a `cos(2 k pi x / L)` part.
//! Projecting the `s^2` equations onto `1` and `cos(2 k pi x / L)` gives the
//! systems `B0` and `C0`; projecting the `s^3` equations onto
//! `cos(k pi x / L)` gives `A0`, whose solution feeds the `K2` extraction
//! from the first predator equation.

use alloc::vec::Vec;

use crate::linalg::{self, Mat3};
use crate::stability::{self, ModeData, ThresholdKind, DEGENERACY_TOLERANCE};
use crate::{Error, LinearSystem, Parameters, Result, Sensitivity};

/// Condition numbers above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Predator components of the null vector `(P, Q, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    /// Component along `u`.
    pub p: f64,
    /// Component along `v`.
    pub q: f64,
}

/// Null vector of the stability matrix at `chi_S_k`.
pub fn mode_amplitudes(p: &Parameters, s: &Sensitivity, k: u32) -> Result<ModeAmplitudes> {
    Ok(amplitudes_of(p, &ModeData::for_thresholds(p, s, k)?))
}

fn amplitudes_of(p: &Parameters, m: &ModeData) -> ModeAmplitudes {
    let q = m.a23(p) / m.h2;
    ModeAmplitudes {
        p: -(p.beta32 / p.beta31) * q - m.h3 / (p.beta31 * m.eq.w),
        q,
    }
}

fn matrix_m(p: &Parameters, m: &ModeData, a: &ModeAmplitudes) -> Mat3 {
    [
        [0.0, m.h2, -m.a23(p)],
        [p.beta31 * m.eq.w, p.beta32 * m.eq.w, m.h3],
        [a.p, a.q, 1.0],
    ]
}

/// Determinant of the matrix `M` with rows `(0, H2, -a23)`,
/// `(beta31 w, beta32 w, H3)`, `(P, Q, 1)`, by cofactor expansion.
pub fn det_m(p: &Parameters, s: &Sensitivity, k: u32) -> Result<f64> {
    let m = ModeData::for_thresholds(p, s, k)?;
    let a = amplitudes_of(p, &m);
    Ok(linalg::det(&matrix_m(p, &m, &a)))
}

/// Integrals of the first-order correction over `(0, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderIntegrals {
    /// Integral of `phi1`.
    pub mean_u: f64,
    /// Integral of `psi1`.
    pub mean_v: f64,
    /// Integral of `gamma1`.
    pub mean_w: f64,
    /// Integral of `phi1 cos(2 k pi x / L)`.
    pub double_u: f64,
    /// Integral of `psi1 cos(2 k pi x / L)`.
    pub double_v: f64,
    /// Integral of `gamma1 cos(2 k pi x / L)`.
    pub double_w: f64,
}

impl FirstOrderIntegrals {
    /// All six integrals zero.
    pub const ZERO: Self = Self {
        mean_u: 0.0,
        mean_v: 0.0,
        mean_w: 0.0,
        double_u: 0.0,
        double_v: 0.0,
        double_w: 0.0,
    };
}

/// Projections of the second-order correction onto `cos(k pi x / L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderIntegrals {
    /// Integral of `phi2 cos(k pi x / L)`.
    pub u: f64,
    /// Integral of `psi2 cos(k pi x / L)`.
    pub v: f64,
    /// Integral of `gamma2 cos(k pi x / L)`.
    pub w: f64,
    /// First right-hand side entry of the `A0` system.
    pub m1: f64,
    /// Second right-hand side entry of the `A0` system.
    pub m2: f64,
}

/// Solution of one 3x3 system with its audit data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveRecord {
    /// Cramer's-rule solution.
    pub x: [f64; 3],
    /// Right-hand side.
    pub rhs: [f64; 3],
    /// Determinant.
    pub det: f64,
    /// 1-norm condition number.
    pub condition: f64,
    /// Relative residual of the Cramer solution.
    pub residual: f64,
    /// Largest relative gap between Cramer and pivoted elimination.
    pub shadow_gap: f64,
}

fn solve(system: LinearSystem, a: &Mat3, b: [f64; 3]) -> Result<SolveRecord> {
    let condition = linalg::condition_number(a);
    if condition > CONDITION_LIMIT || !condition.is_finite() {
        return Err(Error::SingularSystem { system, condition });
    }
    let singular = || Error::SingularSystem { system, condition };
    let x = linalg::solve_cramer(a, &b).ok_or_else(singular)?;
    let y = linalg::solve_pivoted(a, &b).ok_or_else(singular)?;
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let shadow_gap = if scale > 0.0 {
        (0..3).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max) / scale
    } else {
        0.0
    };
    Ok(SolveRecord {
        x,
        rhs: b,
        det: linalg::det(a),
        condition,
        residual: linalg::relative_residual(a, &x, &b),
        shadow_gap,
    })
}

/// Everything the first-order stage produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderStage {
    /// The six integrals.
    pub integrals: FirstOrderIntegrals,
    /// `cos(2 k pi x / L)` taxis forcing of the `u` row.
    pub m3: f64,
    /// `cos(2 k pi x / L)` taxis forcing of the `v` row.
    pub m4: f64,
    /// Mean-mode solve.
    pub b0: SolveRecord,
    /// Double-mode solve.
    pub c0: SolveRecord,
}

/// Mean and double-mode integrals of the first-order correction at `chi_S_k`.
pub fn first_order_integrals(p: &Parameters, s: &Sensitivity, k: u32) -> Result<FirstOrderIntegrals> {
    let m = ModeData::for_thresholds(p, s, k)?;
    Ok(first_order_of(p, &m, &amplitudes_of(p, &m))?.integrals)
}

fn first_order_of(p: &Parameters, m: &ModeData, a: &ModeAmplitudes) -> Result<FirstOrderStage> {
    let chi = stability::chi_s_of(p, m);
    let (u, v, w) = (m.eq.u, m.eq.v, m.eq.w);
    let (phi, dphi) = (m.sens.phi, m.sens.dphi);
    let (kk, len) = (m.kk, p.length);
    let (pp, qq) = (a.p, a.q);
    let prey = p.beta31 * pp + p.beta32 * qq + p.alpha3;

    let b0 = [
        [p.alpha1 * u, 0.0, -p.beta1 * u],
        [0.0, p.alpha2 * v, -p.beta2 * v],
        [p.beta31 * w, p.beta32 * w, p.alpha3 * w],
    ];
    let b0_rhs = [
        -len / 2.0 * pp * (p.alpha1 * pp - p.beta1),
        -len / 2.0 * qq * (p.alpha2 * qq - p.beta2),
        -len / 2.0 * prey,
    ];
    let b0 = solve(LinearSystem::B0, &b0, b0_rhs)?;

    let c0 = [
        [4.0 * p.d1 * kk + p.alpha1 * u, 0.0, -4.0 * chi * u * phi * kk - p.beta1 * u],
        [0.0, 4.0 * p.d2 * kk + p.alpha2 * v, -4.0 * p.xi * v * phi * kk - p.beta2 * v],
        [p.beta31 * w, p.beta32 * w, 4.0 * p.d3 * kk + p.alpha3 * w],
    ];
    let m3 = chi * len / 2.0 * kk * (u * dphi + pp * phi) - len / 4.0 * (p.alpha1 * pp - p.beta1) * pp;
    let m4 = p.xi * len / 2.0 * kk * (v * dphi + qq * phi) - len / 4.0 * (p.alpha2 * qq - p.beta2) * qq;
    let c0 = solve(LinearSystem::C0, &c0, [m3, m4, -len / 4.0 * prey])?;

    Ok(FirstOrderStage {
        integrals: FirstOrderIntegrals {
            mean_u: b0.x[0],
            mean_v: b0.x[1],
            mean_w: b0.x[2],
            double_u: c0.x[0],
            double_v: c0.x[1],
            double_w: c0.x[2],
        },
        m3,
        m4,
        b0,
        c0,
    })
}

/// Second-order projections from the `A0` system driven by `f`.
pub fn second_order_integrals(
    p: &Parameters,
    s: &Sensitivity,
    k: u32,
    f: &FirstOrderIntegrals,
) -> Result<SecondOrderIntegrals> {
    let m = ModeData::for_thresholds(p, s, k)?;
    let a = amplitudes_of(p, &m);
    Ok(second_order_of(p, &m, &a, f)?.0)
}

fn second_order_of(
    p: &Parameters,
    m: &ModeData,
    a: &ModeAmplitudes,
    f: &FirstOrderIntegrals,
) -> Result<(SecondOrderIntegrals, SolveRecord)> {
    let (v, kk, len) = (m.eq.v, m.kk, p.length);
    let (phi, dphi, ddphi) = (m.sens.phi, m.sens.dphi, m.sens.ddphi);
    let (pp, qq) = (a.p, a.q);
    let xi = p.xi;
    // Cubic taxis term of the s^3 problem; it does not depend on the
    // first-order correction.
    let cubic = xi * kk * (0.5 * v * ddphi + qq * dphi) * len / 8.0;
    let m1 = -(p.alpha2 * qq - 0.5 * p.beta2 + 0.5 * xi * phi * kk) * f.double_v
        + 0.5 * (xi * v * dphi * kk + p.beta2 * qq + 2.0 * xi * qq * phi * kk) * f.double_w
        - (p.alpha2 * qq - 0.5 * p.beta2 - 0.5 * xi * phi * kk) * f.mean_v
        + 0.5 * (xi * v * dphi * kk + p.beta2 * qq) * f.mean_w
        + cubic;
    let m2 = -0.5 * p.beta31 * (f.mean_u + f.double_u)
        - 0.5 * p.beta32 * (f.mean_v + f.double_v)
        - 0.5 * (p.beta31 * pp + p.beta32 * qq + 2.0 * p.alpha3) * (f.mean_w + f.double_w);
    let rec = solve(LinearSystem::A0, &matrix_m(p, m, a), [m1, m2, 0.0])?;
    Ok((SecondOrderIntegrals { u: rec.x[0], v: rec.x[1], w: rec.x[2], m1, m2 }, rec))
}

/// `K2` with every intermediate quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K2Result {
    /// Mode index.
    pub k: u32,
    /// Steady-state threshold of the mode.
    pub chi_s: f64,
    /// Null-vector components.
    pub amplitudes: ModeAmplitudes,
    /// Determinant of `M`.
    pub det_m: f64,
    /// First-order stage.
    pub first: FirstOrderStage,
    /// Second-order projections and `M1`, `M2`.
    pub second: SecondOrderIntegrals,
    /// Second-order solve.
    pub a0: SolveRecord,
    /// The pitchfork coefficient.
    pub k2: f64,
}

impl K2Result {
    /// Largest Cramer-versus-elimination gap over the three solves.
    pub fn shadow_gap(&self) -> f64 {
        self.first.b0.shadow_gap.max(self.first.c0.shadow_gap).max(self.a0.shadow_gap)
    }

    /// Largest relative residual over the three solves.
    pub fn residual(&self) -> f64 {
        self.first.b0.residual.max(self.first.c0.residual).max(self.a0.residual)
    }
}

/// Runs the whole pipeline for mode `k`.
pub fn compute_k2(p: &Parameters, s: &Sensitivity, k: u32) -> Result<K2Result> {
    let m = ModeData::for_thresholds(p, s, k)?;
    let chi = stability::chi_s_of(p, &m);
    let chi_h = stability::chi_h_of(p, &m);
    if (chi - chi_h).abs() <= DEGENERACY_TOLERANCE * chi.abs() {
        return Err(Error::DegenerateBranch { k });
    }
    let a = amplitudes_of(p, &m);
    let det_m = linalg::det(&matrix_m(p, &m, &a));
    let first = first_order_of(p, &m, &a)?;
    let (second, a0) = second_order_of(p, &m, &a, &first.integrals)?;
    let f = &first.integrals;

    let (u, kk, len) = (m.eq.u, m.kk, p.length);
    let (phi, dphi, ddphi) = (m.sens.phi, m.sens.dphi, m.sens.ddphi);
    let pp = a.p;
    let rhs = m.h1 * second.u - m.a13(p, chi) * second.w
        + (p.alpha1 * pp - 0.5 * p.beta1 + 0.5 * chi * phi * kk) * f.double_u
        - 0.5 * (chi * u * dphi * kk + p.beta1 * pp + 2.0 * chi * pp * phi * kk) * f.double_w
        + (p.alpha1 * pp - 0.5 * p.beta1 - 0.5 * chi * phi * kk) * f.mean_u
        - 0.5 * (chi * u * dphi * kk + p.beta1 * pp) * f.mean_w
        - chi * kk * (0.5 * u * ddphi + pp * dphi) * len / 8.0;
    let k2 = rhs / (u * phi * kk * len / 2.0);

    Ok(K2Result { k, chi_s: chi, amplitudes: a, det_m, first, second, a0, k2 })
}

/// Which kind of bifurcating branch a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    /// Stationary branch from `chi_S_k`.
    SteadyState,
    /// Periodic branch from `chi_H_k`.
    Hopf,
}

/// Local stability of a bifurcating branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchStability {
    /// Asymptotically stable near the bifurcation point.
    Stable,
    /// Unstable near the bifurcation point.
    Unstable,
    /// Not decided by the available theory.
    Undetermined,
    /// The branch does not arise in this regime.
    NotApplicable,
}

impl core::fmt::Display for BranchStability {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            BranchStability::Stable => "Stable",
            BranchStability::Unstable => "Unstable",
            BranchStability::Undetermined => "Undetermined",
            BranchStability::NotApplicable => "NotApplicable",
        })
    }
}

impl core::fmt::Display for BranchKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            BranchKind::SteadyState => "SteadyState",
            BranchKind::Hopf => "Hopf",
        })
    }
}

/// Verdict for one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchVerdict {
    /// Mode index.
    pub k: u32,
    /// Branch kind.
    pub kind: BranchKind,
    /// Verdict.
    pub stability: BranchStability,
    /// Short justification.
    pub reason: &'static str,
    /// `K2` when it was needed for the verdict.
    pub k2: Option<f64>,
}

/// Branch verdicts for `k = 1..=kmax`, two per mode (steady, Hopf).
pub fn branch_verdict(p: &Parameters, s: &Sensitivity, kmax: u32) -> Result<Vec<BranchVerdict>> {
    let table = stability::chi_zero(p, s, kmax)?;
    match table.kind {
        ThresholdKind::Degenerate => return Err(Error::DegenerateBranch { k: table.k_star }),
        ThresholdKind::AlwaysStable => return Err(Error::NotGroupDefense),
        _ => {}
    }
    let steady_critical = table.kind == ThresholdKind::SteadyState;
    let mut out = Vec::with_capacity(2 * kmax as usize);
    for row in &table.rows {
        let k = row.k;
        let steady = if steady_critical && k == table.k_star {
            let k2 = compute_k2(p, s, k)?.k2;
            let (stability, reason) = if k2 > 0.0 {
                (BranchStability::Stable, "critical mode, K2 > 0")
            } else if k2 < 0.0 {
                (BranchStability::Unstable, "critical mode, K2 < 0")
            } else {
                (BranchStability::Undetermined, "critical mode, K2 = 0")
            };
            BranchVerdict { k, kind: BranchKind::SteadyState, stability, reason, k2: Some(k2) }
        } else {
            let reason = if steady_critical {
                "steady branch off the critical mode"
            } else {
                "steady branch while a Hopf threshold is critical"
            };
            BranchVerdict { k, kind: BranchKind::SteadyState, stability: BranchStability::Unstable, reason, k2: None }
        };
        out.push(steady);

        let hopf_point = row.chi_h < row.chi_s;
        let (stability, reason) = if steady_critical {
            (BranchStability::NotApplicable, "critical threshold is a steady-state one")
        } else if k == table.k_star {
            (BranchStability::Undetermined, "left-most Hopf branch, stable iff supercritical")
        } else if hopf_point {
            (BranchStability::Unstable, "Hopf branch right of the critical one")
        } else {
            (BranchStability::NotApplicable, "no Hopf point on this mode")
        };
        out.push(BranchVerdict { k, kind: BranchKind::Hopf, stability, reason, k2: None });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{table1, table3};
    use crate::stability::{chi_s, stability_matrix};
    use approx::assert_relative_eq;

    #[test]
    fn null_vector_at_threshold() {
        for (p, s) in [table1(), table3()] {
            for k in 1..=9 {
                let a = mode_amplitudes(&p, &s, k).unwrap();
                let m = stability_matrix(&p, &s, chi_s(&p, &s, k).unwrap(), k).unwrap();
                let r = linalg::mul_vec(&m, &[a.p, a.q, 1.0]);
                assert!(r.iter().all(|x| x.abs() < 1e-8), "{k}: {r:?}");
            }
        }
    }

    #[test]
    fn no_taxis_limit_of_q() {
        let (mut p, s) = table1();
        p.xi = 0.0;
        let m = ModeData::for_thresholds(&p, &s, 4).unwrap();
        let a = mode_amplitudes(&p, &s, 4).unwrap();
        assert_relative_eq!(a.q, p.beta2 * m.eq.v / (p.d2 * m.kk + p.alpha2 * m.eq.v), max_relative = 1e-15);
    }

    #[test]
    fn second_order_without_forcing() {
        // With xi = 0 the cubic taxis term drops and the system is homogeneous.
        let (mut p, s) = table1();
        p.xi = 0.0;
        let r = second_order_integrals(&p, &s, 6, &FirstOrderIntegrals::ZERO).unwrap();
        assert_eq!((r.m1, r.m2), (0.0, 0.0));
        assert_eq!((r.u, r.v, r.w), (0.0, 0.0, 0.0));
        // Otherwise only the cubic term drives it.
        let (p, s) = table1();
        let r = second_order_integrals(&p, &s, 6, &FirstOrderIntegrals::ZERO).unwrap();
        assert_eq!(r.m2, 0.0);
        assert!(r.m1 != 0.0);
    }

    #[test]
    fn a0_is_m() {
        let (p, s) = table3();
        for k in 1..=9 {
            let r = compute_k2(&p, &s, k).unwrap();
            assert_relative_eq!(r.a0.det.abs(), r.det_m.abs(), max_relative = 1e-12);
            assert!(r.det_m < 0.0);
        }
    }

    #[test]
    fn solves_are_tight() {
        for (p, s) in [table1(), table3()] {
            for k in 1..=9 {
                let r = compute_k2(&p, &s, k).unwrap();
                assert!(r.residual() < 1e-10, "{k}");
                assert!(r.shadow_gap() < 1e-9, "{k}");
            }
        }
    }

    #[test]
    fn k2_values_table1() {
        let (p, s) = table1();
        // Frozen from an independent numpy implementation, cross-checked for
        // k = 5, 6 against Newton continuation of the discretized branch.
        let want = [(1, -1569.5), (2, -487.4), (3, -342.25), (4, -563.7), (5, 379.07), (6, 102.33), (7, 78.0), (8, 106.2), (9, 177.7)];
        for (k, v) in want {
            assert_relative_eq!(compute_k2(&p, &s, k).unwrap().k2, v, max_relative = 2e-3);
        }
    }

    #[test]
    fn k2_values_table3() {
        let (p, s) = table3();
        assert_relative_eq!(compute_k2(&p, &s, 2).unwrap().k2, 6110.7, max_relative = 1e-3);
        assert_relative_eq!(compute_k2(&p, &s, 3).unwrap().k2, 10565.0, max_relative = 1e-3);
    }

    #[test]
    fn k2_is_invariant_under_joint_rescaling() {
        let (p, s) = table1();
        for k in 1..=6 {
            let a = compute_k2(&p, &s, k).unwrap().k2;
            let b = compute_k2(&p.with_length(2.0 * p.length), &s, 2 * k).unwrap().k2;
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn k2_is_deterministic() {
        let (p, s) = table1();
        assert_eq!(compute_k2(&p, &s, 6).unwrap(), compute_k2(&p, &s, 6).unwrap());
    }

    #[test]
    fn verdicts_table1() {
        let (p, s) = table1();
        let v = branch_verdict(&p, &s, 30).unwrap();
        for b in &v {
            match (b.kind, b.k) {
                (BranchKind::SteadyState, 6) => assert_eq!(b.stability, BranchStability::Stable),
                (BranchKind::SteadyState, _) => assert_eq!(b.stability, BranchStability::Unstable),
                (BranchKind::Hopf, _) => assert_eq!(b.stability, BranchStability::NotApplicable),
            }
        }
    }

    #[test]
    fn verdicts_table3() {
        let (p, s) = table3();
        let v = branch_verdict(&p, &s, 30).unwrap();
        let stable: Vec<_> = v.iter().filter(|b| b.stability == BranchStability::Stable).collect();
        assert!(stable.is_empty());
        for b in &v {
            match (b.kind, b.k) {
                (BranchKind::SteadyState, _) => assert_eq!(b.stability, BranchStability::Unstable),
                (BranchKind::Hopf, 3) => assert_eq!(b.stability, BranchStability::Undetermined),
                (BranchKind::Hopf, _) => assert_ne!(b.stability, BranchStability::Stable),
            }
        }
    }
}
