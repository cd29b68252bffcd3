//! Parameters, the prey sensitivity function, kinetics and the constant
//! coexistence state.

use crate::{Error, Result};

/// Rate constants, taxis coefficients and domain length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    /// Diffusion rate of the first predator `u`.
    pub d1: f64,
    /// Diffusion rate of the second predator `v`.
    pub d2: f64,
    /// Diffusion rate of the prey `w`.
    pub d3: f64,
    /// Intrinsic growth rate of `u`.
    pub alpha1: f64,
    /// Intrinsic growth rate of `v`.
    pub alpha2: f64,
    /// Intrinsic growth rate of `w`.
    pub alpha3: f64,
    /// Growth of `u` from predation.
    pub beta1: f64,
    /// Growth of `v` from predation.
    pub beta2: f64,
    /// Prey loss to `u`.
    pub beta31: f64,
    /// Prey loss to `v`.
    pub beta32: f64,
    /// Prey-taxis coefficient of `u`; the bifurcation parameter.
    pub chi: f64,
    /// Prey-taxis coefficient of `v`.
    pub xi: f64,
    /// Domain length.
    pub length: f64,
}

impl Parameters {
    /// Checks finiteness and positivity. Coexistence is not required here,
    /// see [`Parameters::coexistence`].
    pub fn validate(self) -> Result<Self> {
        let fields = [
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta31", self.beta31),
            ("beta32", self.beta32),
            ("L", self.length),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFiniteParameter(name));
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveParameter(name));
            }
        }
        if !self.chi.is_finite() {
            return Err(Error::NonFiniteParameter("chi"));
        }
        if !self.xi.is_finite() {
            return Err(Error::NonFiniteParameter("xi"));
        }
        Ok(self)
    }

    /// Whether a positive constant steady state exists (`alpha3 > beta31 + beta32`).
    pub fn coexistence(&self) -> bool {
        self.alpha3 > self.beta31 + self.beta32
    }

    /// Copy with a different `chi`.
    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    /// Copy with a different domain length.
    pub fn with_length(mut self, length: f64) -> Self {
        self.length = length;
        self
    }

    /// Largest diffusion rate.
    pub fn max_diffusion(&self) -> f64 {
        self.d1.max(self.d2).max(self.d3)
    }
}

/// Validates a raw parameter set; the coexistence flag is queried separately.
pub fn validate_parameters(raw: Parameters) -> Result<Parameters> {
    raw.validate()
}

/// Prey-density sensitivity `phi(w)`, a polynomial of degree at most four.
///
/// `coefficients[i]` multiplies `w^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    /// Monomial coefficients, lowest degree first.
    pub coefficients: [f64; 5],
}

/// `phi` and its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityValue {
    /// `phi(w)`.
    pub phi: f64,
    /// `phi'(w)`.
    pub dphi: f64,
    /// `phi''(w)`.
    pub ddphi: f64,
}

impl Sensitivity {
    /// General polynomial; rejects non-finite coefficients.
    pub fn polynomial(coefficients: [f64; 5]) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteParameter("sensitivity coefficient"));
        }
        Ok(Self { coefficients })
    }

    /// `phi(w) = c * w * (a - w)`.
    pub fn group_defense(prefactor: f64, a: f64) -> Result<Self> {
        Self::polynomial([0.0, prefactor * a, -prefactor, 0.0, 0.0])
    }

    /// `phi(w)` alone.
    pub fn phi(&self, w: f64) -> f64 {
        let c = &self.coefficients;
        (((c[4] * w + c[3]) * w + c[2]) * w + c[1]) * w + c[0]
    }

    /// `phi`, `phi'` and `phi''` at `w` by Horner's scheme.
    pub fn eval(&self, w: f64) -> SensitivityValue {
        let c = &self.coefficients;
        let dphi = ((4.0 * c[4] * w + 3.0 * c[3]) * w + 2.0 * c[2]) * w + c[1];
        let ddphi = (12.0 * c[4] * w + 6.0 * c[3]) * w + 2.0 * c[2];
        SensitivityValue { phi: self.phi(w), dphi, ddphi }
    }
}

/// `phi`, `phi'` and `phi''` at `w`.
pub fn sensitivity_eval(s: &Sensitivity, w: f64) -> SensitivityValue {
    s.eval(w)
}

/// The positive constant steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    /// First predator.
    pub u: f64,
    /// Second predator.
    pub v: f64,
    /// Prey.
    pub w: f64,
}

/// Constant coexistence state of the kinetics.
pub fn equilibrium(p: &Parameters) -> Result<Equilibrium> {
    if !p.coexistence() {
        return Err(Error::NoPositiveEquilibrium);
    }
    let w = (p.alpha3 - p.beta31 - p.beta32)
        / (p.alpha3 + p.beta1 * p.beta31 / p.alpha1 + p.beta2 * p.beta32 / p.alpha2);
    Ok(Equilibrium {
        u: 1.0 + p.beta1 / p.alpha1 * w,
        v: 1.0 + p.beta2 / p.alpha2 * w,
        w,
    })
}

/// Reaction terms `(f1, f2, f3)` at one point.
#[inline]
pub fn kinetics(p: &Parameters, u: f64, v: f64, w: f64) -> [f64; 3] {
    [
        p.alpha1 * (1.0 - u) * u + p.beta1 * u * w,
        p.alpha2 * (1.0 - v) * v + p.beta2 * v * w,
        p.alpha3 * (1.0 - w) * w - p.beta31 * u * w - p.beta32 * v * w,
    ]
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn table1() -> (Parameters, Sensitivity) {
        let p = Parameters {
            d1: 0.1,
            d2: 2.0,
            d3: 0.1,
            alpha1: 0.5,
            alpha2: 2.0,
            alpha3: 1.0,
            beta1: 0.5,
            beta2: 0.5,
            beta31: 0.1,
            beta32: 0.1,
            chi: 8.0,
            xi: 0.5,
            length: 7.0,
        };
        (p, Sensitivity::group_defense(1.0, 0.1).unwrap())
    }

    pub fn table3() -> (Parameters, Sensitivity) {
        let p = Parameters {
            d1: 1.0,
            d2: 0.01,
            d3: 1.0,
            alpha1: 0.02,
            alpha2: 0.04,
            alpha3: 8.0,
            beta1: 0.05,
            beta2: 0.5,
            beta31: 0.5,
            beta32: 0.5,
            chi: 120.0,
            xi: 0.05,
            length: 7.0,
        };
        (p, Sensitivity::group_defense(1.0, 0.1).unwrap())
    }
}
