//! Meijer G-function by a single Mellin–Barnes contour.
//!
//! `G^{m,n}_{p,q}(x | a; b) = (1/2πi) ∫ Π_{j≤m}Γ(b_j+s) Π_{k≤n}Γ(1−a_k−s)
//!  / (Π_{j>m}Γ(1−b_j−s) Π_{k>n}Γ(a_k+s)) · x^{−s} ds`.
//!
//! When no vertical line separates the two pole families (parameters
//! interleave), the line is placed between singularities anyway and the
//! residues of the simple poles left on the wrong side are added back, which is
//! equivalent to bending the contour around them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::mellin::{ContourEstimate, ContourSettings, GammaTerm, Integrand};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub a_params: Vec<f64>,
    pub b_params: Vec<f64>,
}

impl MeijerGSpec {
    /// Builds the spec from the parameter lists; orders `p`, `q` follow their lengths.
    pub fn new(m: usize, n: usize, a_params: Vec<f64>, b_params: Vec<f64>) -> Result<Self> {
        let spec = MeijerGSpec { m, n, p: a_params.len(), q: b_params.len(), a_params, b_params };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a_params.len() != self.p || self.b_params.len() != self.q {
            return Err(Error::InvalidParameter(format!(
                "parameter lists have lengths ({}, {}) but orders p={}, q={}",
                self.a_params.len(),
                self.b_params.len(),
                self.p,
                self.q
            )));
        }
        if self.m > self.q || self.n > self.p {
            return Err(Error::InvalidParameter(format!(
                "orders violate m ≤ q, n ≤ p: m={}, n={}, p={}, q={}",
                self.m, self.n, self.p, self.q
            )));
        }
        if self.a_params.iter().chain(&self.b_params).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Meijer G parameter".into()));
        }
        for (k, a) in self.a_params.iter().take(self.n).enumerate() {
            for (j, b) in self.b_params.iter().take(self.m).enumerate() {
                let d = a - b;
                if d >= 1.0 - 1e-12 && (d - d.round()).abs() < 1e-12 {
                    return Err(Error::PoleCollision(format!(
                        "a_{} − b_{} = {d} is a positive integer: left and right poles coincide",
                        k + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    fn integrand(&self, x: f64) -> Integrand {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (j, &b) in self.b_params.iter().enumerate() {
            if j < self.m {
                num.push(GammaTerm::new(b, 1.0, 0.0));
            } else {
                den.push(GammaTerm::new(1.0 - b, -1.0, 0.0));
            }
        }
        for (k, &a) in self.a_params.iter().enumerate() {
            if k < self.n {
                num.push(GammaTerm::new(1.0 - a, -1.0, 0.0));
            } else {
                den.push(GammaTerm::new(a, 1.0, 0.0));
            }
        }
        Integrand { num, den, ln_base: (-x.ln(), 0.0), ln_prefactor: 0.0, dims: 1 }
    }
}

/// Evaluates `G^{m,n}_{p,q}(x)`; only the first entry of `ctr.c_offsets` is used.
pub fn meijer_g(spec: &MeijerGSpec, x: f64, ctr: &ContourSettings) -> Result<ContourEstimate> {
    meijer_g_scaled(spec, x, 0.0, ctr)
}

/// `exp(ln_prefactor)·G(x)`, keeping large or tiny prefactors in log space.
pub fn meijer_g_scaled(spec: &MeijerGSpec, x: f64, ln_prefactor: f64, ctr: &ContourSettings) -> Result<ContourEstimate> {
    spec.validate()?;
    ctr.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "meijer_g", detail: format!("argument must be positive, got {x}") });
    }
    let mut integrand = spec.integrand(x);
    integrand.ln_prefactor = ln_prefactor;
    let (table, c, misplaced) = integrand.place(ctr, true)?;
    let mut est = integrand.integrate(&table, c, ctr)?;
    if !misplaced.is_empty() {
        est.value += integrand.residue_correction(&misplaced)?;
        est.residue_corrections = misplaced.len();
    }
    Ok(est)
}
