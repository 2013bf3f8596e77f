//! Analytic laws of the instantaneous SNRs.
//!
//! * `GammaSquare`: the ideal-phase cascade amplitude `Σ αₙβₙ` moment-matched to
//!   a Gamma variable, SNR = its square.
//! * `RandomWalkExact`: the uniform-phase-error SNR, an isotropic planar random
//!   walk with double-Rayleigh step sizes (exact).
//! * `GammaV2I`: the equal-gain V2I SNR moment-matched to a Gamma law.
//! * `DoubleRayleigh`: the eavesdropper's cascaded Rayleigh SNR.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_bessel_k, ln_gamma, reg_inc_gamma_lower, reg_inc_gamma_upper};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SnrDistribution {
    GammaSquare { k_d: f64, eta_d: f64 },
    RandomWalkExact { n: u32, scale: f64 },
    GammaV2I { n: u32, scale: f64 },
    DoubleRayleigh { mean_snr: f64 },
}

/// Below this the pdf returns its x → 0⁺ limit.
pub const PDF_ZERO_CUTOFF: f64 = 1e-300;

/// Moment-matched Gamma-square law for the ideal-phase cascade.
///
/// `k_D = Nπ²/(16−π²)`, `η_D = √γ̄_D·(16−π²)·√(ν_SR ν_RD)/(4π)`.
pub fn fit_gamma_square(n: u32, nu_sr: f64, nu_rd: f64, mean_snr: f64) -> SnrDistribution {
    let pi2 = PI * PI;
    SnrDistribution::GammaSquare {
        k_d: n as f64 * pi2 / (16.0 - pi2),
        eta_d: mean_snr.sqrt() * (16.0 - pi2) * (nu_sr * nu_rd).sqrt() / (4.0 * PI),
    }
}

/// Ω_D = 1 + Γ(3/2)²(N−1) = 1 + (π/4)(N−1).
pub fn omega_v2i(n: u32) -> f64 {
    1.0 + 0.25 * PI * (n as f64 - 1.0)
}

impl SnrDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SnrDistribution::GammaSquare { k_d, eta_d } => k_d > 0.0 && eta_d > 0.0 && k_d.is_finite() && eta_d.is_finite(),
            SnrDistribution::RandomWalkExact { n, scale } | SnrDistribution::GammaV2I { n, scale } => {
                n >= 1 && scale > 0.0 && scale.is_finite()
            }
            SnrDistribution::DoubleRayleigh { mean_snr } => mean_snr > 0.0 && mean_snr.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid distribution parameters {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            // E[Z²] = k(k+1)η²
            SnrDistribution::GammaSquare { k_d, eta_d } => k_d * (k_d + 1.0) * eta_d * eta_d,
            SnrDistribution::RandomWalkExact { n, scale } | SnrDistribution::GammaV2I { n, scale } => n as f64 * scale,
            SnrDistribution::DoubleRayleigh { mean_snr } => mean_snr,
        }
    }

    /// Scale that sets the natural unit of x, for grids and quadrature breaks.
    pub fn typical_scale(&self) -> f64 {
        self.mean().max(f64::MIN_POSITIVE)
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { function: "snr distribution", detail: format!("x must be non-negative, got {x}") })
    }
}

/// ln of the random-walk pdf f(x) = 2 u^{(N−1)/2} K_{N−1}(2√u) / (Γ(N)·σ), u = x/σ.
fn random_walk_ln_pdf(n: u32, scale: f64, x: f64) -> Result<f64> {
    let u = x / scale;
    let nf = n as f64;
    Ok(2f64.ln() + 0.5 * (nf - 1.0) * u.ln() + ln_bessel_k(nf - 1.0, 2.0 * u.sqrt())? - ln_gamma(nf) - scale.ln())
}

/// Survival function Q(u) = 2 u^{N/2} K_N(2√u) / Γ(N), u = x/σ.
fn random_walk_sf(n: u32, u: f64) -> Result<f64> {
    let nf = n as f64;
    Ok((2f64.ln() + 0.5 * nf * u.ln() + ln_bessel_k(nf, 2.0 * u.sqrt())? - ln_gamma(nf)).exp().min(1.0))
}

/// F(u) = 1 − Q(u) from the small-argument expansion of K_N for integer N:
/// F = Σ_{k=1}^{N−1} (−1)^{k+1} (N−k−1)! u^k / ((N−1)! k!)
///   − (−1)^N Σ_{k≥0} u^{N+k} [ψ(k+1) + ψ(N+k+1) − ln u] / ((N−1)! k! (N+k)!).
/// Used where Q is close to one, so the subtraction 1 − Q would cancel.
fn random_walk_cdf_series(n: u32, u: f64) -> f64 {
    let lu = u.ln();
    let lg_n = ln_gamma(n as f64);
    let mut finite = 0.0;
    for k in 1..n {
        let t = (ln_gamma((n - k) as f64) - lg_n - ln_gamma(k as f64 + 1.0) + k as f64 * lu).exp();
        finite += if k % 2 == 1 { t } else { -t };
    }
    // ψ(k+1) = −γ + H_k
    let mut h_k = 0.0;
    let mut h_nk: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
    let mut tail = 0.0;
    let mut k = 0u32;
    loop {
        let ln_c = (n + k) as f64 * lu - lg_n - ln_gamma(k as f64 + 1.0) - ln_gamma((n + k) as f64 + 1.0);
        let t = ln_c.exp() * (h_k + h_nk - 2.0 * EULER_GAMMA - lu);
        tail += t;
        k += 1;
        if (k as f64) > u && t.abs() <= 1e-17 * tail.abs().max(1e-300) {
            break;
        }
        h_k += 1.0 / k as f64;
        h_nk += 1.0 / (n + k) as f64;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    (finite - sign * tail).clamp(0.0, 1.0)
}

pub fn eval_pdf(dist: &SnrDistribution, x: f64) -> Result<f64> {
    dist.validate()?;
    check_x(x)?;
    let tiny = x < PDF_ZERO_CUTOFF;
    match *dist {
        SnrDistribution::GammaSquare { k_d, eta_d } => {
            if tiny {
                return Ok(if k_d > 2.0 {
                    0.0
                } else if k_d == 2.0 {
                    0.5 / (eta_d * eta_d)
                } else {
                    f64::INFINITY
                });
            }
            // Z ~ Gamma(k, η), X = Z²: f(x) = x^{k/2−1} e^{−√x/η} / (2 η^k Γ(k))
            let ln = (0.5 * k_d - 1.0) * x.ln() - x.sqrt() / eta_d - 2f64.ln() - k_d * eta_d.ln() - ln_gamma(k_d);
            Ok(ln.exp())
        }
        SnrDistribution::RandomWalkExact { n, scale } => {
            if tiny {
                return Ok(if n == 1 { f64::INFINITY } else { 1.0 / ((n as f64 - 1.0) * scale) });
            }
            Ok(random_walk_ln_pdf(n, scale, x)?.exp())
        }
        SnrDistribution::GammaV2I { n, scale } => {
            if tiny {
                return Ok(if n == 1 { 1.0 / scale } else { 0.0 });
            }
            let nf = n as f64;
            Ok(((nf - 1.0) * (x / scale).ln() - x / scale - ln_gamma(nf) - scale.ln()).exp())
        }
        SnrDistribution::DoubleRayleigh { mean_snr } => {
            if tiny {
                return Ok(f64::INFINITY);
            }
            Ok(random_walk_ln_pdf(1, mean_snr, x)?.exp())
        }
    }
}

pub fn eval_cdf(dist: &SnrDistribution, x: f64) -> Result<f64> {
    dist.validate()?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    match *dist {
        SnrDistribution::GammaSquare { k_d, eta_d } => reg_inc_gamma_lower(k_d, x.sqrt() / eta_d),
        SnrDistribution::GammaV2I { n, scale } => reg_inc_gamma_lower(n as f64, x / scale),
        SnrDistribution::RandomWalkExact { n, scale } => random_walk_cdf(n, x / scale),
        SnrDistribution::DoubleRayleigh { mean_snr } => random_walk_cdf(1, x / mean_snr),
    }
}

/// Survival function 1 − F, accurate in the upper tail.
pub fn eval_sf(dist: &SnrDistribution, x: f64) -> Result<f64> {
    dist.validate()?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    match *dist {
        SnrDistribution::GammaSquare { k_d, eta_d } => reg_inc_gamma_upper(k_d, x.sqrt() / eta_d),
        SnrDistribution::GammaV2I { n, scale } => reg_inc_gamma_upper(n as f64, x / scale),
        SnrDistribution::RandomWalkExact { n, scale } => random_walk_sf(n, x / scale),
        SnrDistribution::DoubleRayleigh { mean_snr } => random_walk_sf(1, x / mean_snr),
    }
}

fn random_walk_cdf(n: u32, u: f64) -> Result<f64> {
    let q = random_walk_sf(n, u)?;
    if q <= 0.5 {
        Ok(1.0 - q)
    } else {
        Ok(random_walk_cdf_series(n, u))
    }
}
