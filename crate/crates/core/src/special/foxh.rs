//! Extended generalized bivariate Fox H-function by a double Mellin–Barnes
//! contour.
//!
//! With `Φ(u, v) = J(u, v)·A(u)·B(v)`, each factor a ratio of Gamma products,
//! the function evaluated here is
//! `H(x, y) = (1/2πi)² ∫∫ Φ(u, v) x^u y^v du dv`.
//! Definitions written with `x^{−s}` map onto this one by `u = −s` (negate the
//! weights).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::mellin::{ContourEstimate, ContourSettings, GammaTerm, Integrand};

/// Numerator and denominator Gamma factors of one block.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FactorGroup {
    pub numerator: Vec<GammaTerm>,
    pub denominator: Vec<GammaTerm>,
}

impl FactorGroup {
    pub fn new(numerator: Vec<GammaTerm>, denominator: Vec<GammaTerm>) -> Self {
        FactorGroup { numerator, denominator }
    }

    fn terms(&self) -> impl Iterator<Item = &GammaTerm> {
        self.numerator.iter().chain(&self.denominator)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivarFoxHSpec {
    /// Factors coupling both variables.
    pub joint: FactorGroup,
    /// Factors in the first variable only (weights `(w, 0)`).
    pub first: FactorGroup,
    /// Factors in the second variable only (weights `(0, w)`).
    pub second: FactorGroup,
}

impl BivarFoxHSpec {
    pub fn validate(&self) -> Result<()> {
        let all = self.joint.terms().chain(self.first.terms()).chain(self.second.terms());
        for t in all {
            if !t.coeff.is_finite() || !t.weights.0.is_finite() || !t.weights.1.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite Gamma factor {t:?}")));
            }
        }
        if let Some(t) = self.first.terms().find(|t| t.weights.1 != 0.0 || t.weights.0 == 0.0) {
            return Err(Error::InvalidParameter(format!("first-variable block holds {t:?}")));
        }
        if let Some(t) = self.second.terms().find(|t| t.weights.0 != 0.0 || t.weights.1 == 0.0) {
            return Err(Error::InvalidParameter(format!("second-variable block holds {t:?}")));
        }
        if let Some(t) = self.joint.terms().find(|t| t.weights == (0.0, 0.0)) {
            return Err(Error::InvalidParameter(format!("joint block holds a constant factor {t:?}")));
        }
        Ok(())
    }

    fn integrand(&self, ln_x: f64, ln_y: f64, ln_prefactor: f64) -> Integrand {
        let num = [&self.joint, &self.first, &self.second].iter().flat_map(|g| g.numerator.iter().copied()).collect();
        let den = [&self.joint, &self.first, &self.second].iter().flat_map(|g| g.denominator.iter().copied()).collect();
        Integrand { num, den, ln_base: (ln_x, ln_y), ln_prefactor, dims: 2 }
    }
}

/// `H(x, y)` for `x, y > 0`.
pub fn fox_h_bivariate(spec: &BivarFoxHSpec, x: f64, y: f64, ctr: &ContourSettings) -> Result<ContourEstimate> {
    for (name, v) in [("x", x), ("y", y)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain { function: "fox_h_bivariate", detail: format!("{name} must be positive, got {v}") });
        }
    }
    fox_h_bivariate_scaled(spec, x.ln(), y.ln(), 0.0, ctr)
}

/// `exp(ln_prefactor)·H(e^{ln_x}, e^{ln_y})`, with the prefactor folded into the
/// log-space accumulation so that neither it nor `H` needs to be representable.
pub fn fox_h_bivariate_scaled(
    spec: &BivarFoxHSpec,
    ln_x: f64,
    ln_y: f64,
    ln_prefactor: f64,
    ctr: &ContourSettings,
) -> Result<ContourEstimate> {
    spec.validate()?;
    ctr.validate()?;
    if !ln_x.is_finite() || !ln_y.is_finite() || !ln_prefactor.is_finite() {
        return Err(Error::InvalidParameter("non-finite argument or prefactor".into()));
    }
    let integrand = spec.integrand(ln_x, ln_y, ln_prefactor);
    integrand.validate()?;
    let (table, c, _) = integrand.place(ctr, false)?;
    integrand.integrate(&table, c, ctr)
}
