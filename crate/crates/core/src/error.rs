use core::fmt;

/// Which 3x3 system of the K2 pipeline failed to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSystem {
    /// Second-order projection system (same content as the matrix M).
    A0,
    /// Mean-mode system of the first-order correction.
    B0,
    /// Double-mode system of the first-order correction.
    C0,
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearSystem::A0 => "A0",
            LinearSystem::B0 => "B0",
            LinearSystem::C0 => "C0",
        })
    }
}

/// Errors raised by the analysis and the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A rate, diffusion coefficient or the domain length is not strictly positive.
    NonPositiveParameter(&'static str),
    /// A parameter or sensitivity coefficient is NaN or infinite.
    NonFiniteParameter(&'static str),
    /// `alpha3 <= beta31 + beta32`: no positive constant steady state.
    NoPositiveEquilibrium,
    /// `phi(w_bar) == 0`, so the threshold formulas divide by zero.
    SensitivityVanishesAtEquilibrium,
    /// The bifurcation analysis needs `phi(w_bar) < 0`.
    NotGroupDefense,
    /// Threshold formulas need `k >= 1`.
    ZeroMode,
    /// `eta1` at the Hopf threshold is not positive.
    NotAHopfPoint {
        /// Mode index.
        k: u32,
        /// Value of `eta1(chi_H_k, k)`.
        eta1: f64,
    },
    /// A 3x3 solve is numerically singular.
    SingularSystem {
        /// The offending system.
        system: LinearSystem,
        /// Its 1-norm condition number.
        condition: f64,
    },
    /// The steady-state and Hopf thresholds coincide within tolerance.
    DegenerateBranch {
        /// Mode index.
        k: u32,
    },
    /// A NaN or infinity appeared in the state.
    NonFiniteState {
        /// Cell index.
        cell: usize,
        /// Simulation time.
        t: f64,
    },
    /// A field exceeded the blow-up guard.
    BlowupGuard {
        /// Cell index.
        cell: usize,
        /// Simulation time.
        t: f64,
    },
    /// The admissible time step fell below the floor.
    StepSizeUnderflow {
        /// Step size that was rejected.
        dt: f64,
        /// Simulation time.
        t: f64,
    },
    /// Initial perturbation leaves the admissible range.
    AmplitudeTooLarge,
    /// Spectrum requested beyond the Nyquist limit of the grid.
    KmaxTooLarge {
        /// Requested number of modes.
        kmax: usize,
        /// Number of cells.
        n: usize,
    },
    /// Fewer than four peaks remain after the transient.
    InsufficientPeaks {
        /// Number of peaks found.
        found: usize,
    },
    /// The series does not oscillate.
    NoOscillation,
    /// Grid, solver or analysis settings are invalid.
    InvalidConfig(&'static str),
}

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveParameter(name) => write!(f, "parameter `{name}` must be positive"),
            Error::NonFiniteParameter(name) => write!(f, "parameter `{name}` must be finite"),
            Error::NoPositiveEquilibrium => {
                f.write_str("no positive equilibrium: alpha3 must exceed beta31 + beta32")
            }
            Error::SensitivityVanishesAtEquilibrium => {
                f.write_str("sensitivity vanishes at the equilibrium prey density")
            }
            Error::NotGroupDefense => {
                f.write_str("bifurcation analysis requires phi(w_bar) < 0 (group defense)")
            }
            Error::ZeroMode => f.write_str("mode index must be at least 1"),
            Error::NotAHopfPoint { k, eta1 } => {
                write!(f, "mode {k} has no Hopf point: eta1 at chi_H is {eta1:e}")
            }
            Error::SingularSystem { system, condition } => {
                write!(f, "linear system {system} is singular (condition number {condition:e})")
            }
            Error::DegenerateBranch { k } => {
                write!(f, "steady-state and Hopf thresholds coincide at mode {k}")
            }
            Error::NonFiniteState { cell, t } => {
                write!(f, "non-finite state in cell {cell} at t = {t}")
            }
            Error::BlowupGuard { cell, t } => {
                write!(f, "blow-up guard tripped in cell {cell} at t = {t}")
            }
            Error::StepSizeUnderflow { dt, t } => {
                write!(f, "time step {dt:e} below floor at t = {t}")
            }
            Error::AmplitudeTooLarge => {
                f.write_str("initial perturbation leaves the admissible range")
            }
            Error::KmaxTooLarge { kmax, n } => {
                write!(f, "kmax = {kmax} must be below n/2 for n = {n}")
            }
            Error::InsufficientPeaks { found } => {
                write!(f, "only {found} peaks after the transient, need 4")
            }
            Error::NoOscillation => f.write_str("series does not oscillate"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
        }
    }
}

impl core::error::Error for Error {}
