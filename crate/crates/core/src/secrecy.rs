//! Secrecy outage probability: closed forms, single-integral and double-integral
//! reference paths.
//!
//! Outage happens when `γ_D ≤ Θγ_E + Θ − 1` with `Θ = e^{R_s}`.

use serde::{Deserialize, Serialize};

use crate::channel::{mean_snr_eve, mean_snr_v2i_main, mean_snr_v2v_main, V2IScenario, V2VScenario};
use crate::error::{Error, Result};
use crate::quadrature::integrate_breaks;
use crate::special::{
    fox_h_bivariate_scaled, ln_binomial, ln_gamma, meijer_g_scaled, BivarFoxHSpec, ContourEstimate, ContourSettings,
    FactorGroup, GammaTerm, MeijerGSpec,
};
use crate::statistics::{eval_cdf, eval_pdf, fit_gamma_square, omega_v2i, SnrDistribution};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecrecyTarget {
    /// Target secrecy rate in nats.
    pub rate_rs: f64,
    pub theta: f64,
}

impl SecrecyTarget {
    pub fn new(rate_rs: f64) -> Result<Self> {
        if !(rate_rs >= 0.0) || !rate_rs.is_finite() {
            return Err(Error::InvalidParameter(format!("secrecy rate must be finite and non-negative, got {rate_rs}")));
        }
        Ok(SecrecyTarget { rate_rs, theta: rate_rs.exp() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SopMethod {
    ClosedForm,
    SemiAnalytic,
    DoubleIntegral,
    MonteCarlo,
}

impl SopMethod {
    pub fn label(self) -> &'static str {
        match self {
            SopMethod::ClosedForm => "closed",
            SopMethod::SemiAnalytic => "semianalytic",
            SopMethod::DoubleIntegral => "double_integral",
            SopMethod::MonteCarlo => "mc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SopEstimate {
    pub value: f64,
    pub method: SopMethod,
    /// CI half-width for Monte Carlo, absolute error estimate otherwise.
    pub uncertainty: f64,
    pub diagnostics: Vec<String>,
}

impl SopEstimate {
    /// Clamps to [0, 1], noting any clamping in the diagnostics.
    fn clamped(raw: f64, method: SopMethod, uncertainty: f64, mut diagnostics: Vec<String>) -> Self {
        let value = raw.clamp(0.0, 1.0);
        if value != raw {
            diagnostics.push(format!("clamped raw value {raw:e} to {value}"));
        }
        SopEstimate { value, method, uncertainty: uncertainty.abs(), diagnostics }
    }
}

/// `[ln(1+γ_D) − ln(1+γ_E)]⁺` in nats.
pub fn secrecy_rate(gamma_d: f64, gamma_e: f64) -> f64 {
    (gamma_d.ln_1p() - gamma_e.ln_1p()).max(0.0)
}

const QUAD_ABS_TOL: f64 = 1e-15;
const QUAD_REL_TOL: f64 = 1e-11;

/// Break points for a `v = √(x/s)` substituted integral over [0, ∞), truncated
/// where a `e^{−2v}` weight is below 1e-50.
fn v_breaks(extra: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 60.0];
    for &e in extra {
        for f in [0.3, 1.0, 3.0] {
            let v = e * f;
            if v.is_finite() && v > 1e-8 && v < 60.0 {
                b.push(v);
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + b.abs()));
    b
}

/// P_o = ∫₀^∞ F_D(Θx + Θ − 1) f_E(x) dx for a double-Rayleigh eavesdropper.
///
/// With `x = γ̄_E v²` the weight becomes `4v K₀(2v)`, which decays like `e^{−2v}`.
pub fn sop_semianalytic(dist_d: &SnrDistribution, dist_e: &SnrDistribution, tgt: &SecrecyTarget) -> Result<SopEstimate> {
    dist_d.validate()?;
    let SnrDistribution::DoubleRayleigh { mean_snr: ge } = *dist_e else {
        return Err(Error::InvalidParameter("the eavesdropper law must be double Rayleigh".into()));
    };
    dist_e.validate()?;
    let theta = tgt.theta;
    let beta = theta - 1.0;
    let weight = |v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let fe = eval_pdf(dist_e, ge * v * v).unwrap_or(f64::NAN);
        2.0 * ge * v * fe
    };
    let f = |v: f64| -> f64 {
        let w = weight(v);
        if w == 0.0 {
            return 0.0;
        }
        eval_cdf(dist_d, theta * ge * v * v + beta).unwrap_or(f64::NAN) * w
    };
    // where the main-link CDF turns over, in v units
    let m = dist_d.typical_scale();
    let turn = ((m - beta).max(0.0) / (theta * ge)).sqrt();
    let r = integrate_breaks(f, &v_breaks(&[turn, 0.1 * turn]), QUAD_ABS_TOL, QUAD_REL_TOL)?;
    Ok(SopEstimate::clamped(
        r.value,
        SopMethod::SemiAnalytic,
        r.abs_error,
        vec![format!("{} quadrature intervals", r.intervals)],
    ))
}

/// Defining double integral ∫∫_{x ≤ Θy+Θ−1} f_D(x) f_E(y) dx dy, using the
/// densities only.
pub fn sop_double_integral(dist_d: &SnrDistribution, dist_e: &SnrDistribution, tgt: &SecrecyTarget) -> Result<SopEstimate> {
    dist_d.validate()?;
    dist_e.validate()?;
    let theta = tgt.theta;
    let beta = theta - 1.0;
    let sd = dist_d.typical_scale();
    let se = dist_e.typical_scale();
    // inner: ∫₀^X f_D(x) dx with x = s_D w², outer: y = s_E v²
    let inner = |upper: f64| -> Result<f64> {
        if upper <= 0.0 {
            return Ok(0.0);
        }
        let wmax = (upper / sd).sqrt();
        let g = |w: f64| {
            if w <= 0.0 {
                0.0
            } else {
                2.0 * sd * w * eval_pdf(dist_d, sd * w * w).unwrap_or(f64::NAN)
            }
        };
        let wtop = wmax.min(60.0);
        let mut breaks: Vec<f64> = vec![0.0];
        breaks.extend([0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0].into_iter().filter(|&b| b < wtop));
        breaks.push(wtop);
        Ok(integrate_breaks(g, &breaks, 1e-17, 1e-13)?.value.min(1.0))
    };
    let outer = |v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let y = se * v * v;
        let w = 2.0 * se * v * eval_pdf(dist_e, y).unwrap_or(f64::NAN);
        if w == 0.0 {
            return 0.0;
        }
        inner(theta * y + beta).unwrap_or(f64::NAN) * w
    };
    let turn = ((sd - beta).max(0.0) / (theta * se)).sqrt();
    let r = integrate_breaks(outer, &v_breaks(&[turn]), 1e-13, 1e-9)?;
    Ok(SopEstimate::clamped(
        r.value,
        SopMethod::DoubleIntegral,
        r.abs_error,
        vec![format!("{} outer intervals", r.intervals)],
    ))
}

fn require_theta_above_one(tgt: &SecrecyTarget) -> Result<f64> {
    let beta = tgt.theta - 1.0;
    if beta <= 0.0 {
        return Err(Error::ThetaDegenerate);
    }
    Ok(beta)
}

/// Mellin–Barnes kernel of the ideal-phase V2V closed form.
///
/// Returns `(spec, ln x, ln y, ln D)` such that `SOP = 1 + D·H(x, y)` with
/// `x = η_D/√(Θ−1)` (first variable) and `y = Θγ̄_E/(Θ−1)` (second variable).
pub fn v2v_ideal_kernel(sc: &V2VScenario, tgt: &SecrecyTarget) -> Result<(BivarFoxHSpec, f64, f64, f64)> {
    sc.validate()?;
    let beta = require_theta_above_one(tgt)?;
    let gd = mean_snr_v2v_main(sc);
    let ge = mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr);
    let SnrDistribution::GammaSquare { k_d, eta_d } = fit_gamma_square(sc.n_elements, sc.nu_sr, sc.nu_rd, gd) else {
        unreachable!()
    };
    let spec = BivarFoxHSpec {
        joint: FactorGroup::new(vec![GammaTerm::new(-1.0, 0.5, 1.0)], vec![]),
        first: FactorGroup::new(
            vec![GammaTerm::new(k_d, 1.0, 0.0), GammaTerm::new(0.0, -1.0, 0.0)],
            vec![GammaTerm::new(1.0, -1.0, 0.0), GammaTerm::new(0.0, 0.5, 0.0)],
        ),
        second: FactorGroup::new(
            vec![GammaTerm::new(1.0, 0.0, -1.0), GammaTerm::new(0.0, 0.0, 1.0), GammaTerm::new(0.0, 0.0, 1.0)],
            vec![],
        ),
    };
    let ln_x = eta_d.ln() - 0.5 * beta.ln();
    let ln_y = (tgt.theta * ge / beta).ln();
    let ln_d = beta.ln() - ge.ln() - tgt.theta.ln() - ln_gamma(k_d);
    Ok((spec, ln_x, ln_y, ln_d))
}

/// Mellin–Barnes kernel of the uniform-phase-error V2V closed form, in the same
/// `(spec, ln x, ln y, ln D)` layout with `x = γ̄_D ν_SR ν_RD/(Θ−1)`.
///
/// The integrand carries `x^ξ`; the companion factor `x^{−(N+1)/2}` is already
/// part of `D₂ = (Θ−1)^{(N+3)/2} / (Γ(N) σ^{(N+1)/2} Θ γ̄_E)`, σ = γ̄_D ν_SR ν_RD.
pub fn v2v_phase_error_kernel(sc: &V2VScenario, tgt: &SecrecyTarget) -> Result<(BivarFoxHSpec, f64, f64, f64)> {
    sc.validate()?;
    let beta = require_theta_above_one(tgt)?;
    let gd = mean_snr_v2v_main(sc);
    let ge = mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr);
    let n = sc.n_elements as f64;
    let sigma = gd * sc.nu_sr * sc.nu_rd;
    let spec = BivarFoxHSpec {
        joint: FactorGroup::new(vec![GammaTerm::new(-(n + 3.0) / 2.0, 1.0, 1.0)], vec![]),
        first: FactorGroup::new(
            vec![
                GammaTerm::new((n - 1.0) / 2.0, 1.0, 0.0),
                GammaTerm::new((1.0 - n) / 2.0, 1.0, 0.0),
                GammaTerm::new((1.0 + n) / 2.0, -1.0, 0.0),
            ],
            vec![GammaTerm::new((3.0 + n) / 2.0, -1.0, 0.0), GammaTerm::new(-(n + 1.0) / 2.0, 1.0, 0.0)],
        ),
        second: FactorGroup::new(
            vec![GammaTerm::new(1.0, 0.0, -1.0), GammaTerm::new(0.0, 0.0, 1.0), GammaTerm::new(0.0, 0.0, 1.0)],
            vec![],
        ),
    };
    let ln_x = (sigma / beta).ln();
    let ln_y = (tgt.theta * ge / beta).ln();
    let ln_d = 0.5 * (n + 3.0) * beta.ln() - ln_gamma(n) - 0.5 * (n + 1.0) * sigma.ln() - tgt.theta.ln() - ge.ln();
    Ok((spec, ln_x, ln_y, ln_d))
}

fn one_plus_scaled_h(
    (spec, ln_x, ln_y, ln_d): (BivarFoxHSpec, f64, f64, f64),
    ctr: &ContourSettings,
) -> Result<SopEstimate> {
    let est: ContourEstimate = fox_h_bivariate_scaled(&spec, ln_x, ln_y, ln_d, ctr)?;
    let diagnostics = vec![
        format!("contour crossing ({:.4}, {:.4})", est.contour.0, est.contour.1),
        format!("half-lengths ({:.2}, {:.2}), steps ({:.4}, {:.4})", est.truncation.0, est.truncation.1, est.steps.0, est.steps.1),
        format!("{} integrand evaluations, {} doublings", est.evaluations, est.doublings),
        format!("imaginary residual {:e}, cancellation ratio {:e}", est.imag_residual, est.abs_integral / est.value.abs()),
    ];
    Ok(SopEstimate::clamped(1.0 + est.value, SopMethod::ClosedForm, est.error_estimate, diagnostics))
}

/// Closed-form SOP of the ideal-phase V2V link (requires Θ > 1).
pub fn sop_v2v_ideal_closed(sc: &V2VScenario, tgt: &SecrecyTarget, ctr: &ContourSettings) -> Result<SopEstimate> {
    one_plus_scaled_h(v2v_ideal_kernel(sc, tgt)?, ctr)
}

/// Closed-form SOP of the V2V link with uniform phase errors (requires Θ > 1).
pub fn sop_v2v_phase_error_closed(sc: &V2VScenario, tgt: &SecrecyTarget, ctr: &ContourSettings) -> Result<SopEstimate> {
    one_plus_scaled_h(v2v_phase_error_kernel(sc, tgt)?, ctr)
}

/// Closed-form SOP of the V2I link:
///
/// `1 − (1/γ̄_E) Σ_{k=0}^{N−1} e^{−β/λ}/(λ^k k!) Σ_{j=0}^{k} C(k,j) Θ^j β^{k−j} (λ/Θ)^{j+1}
///  G^{2,1}_{1,2}(λ/(Θγ̄_E) | −j; 0, 0)`, with `β = Θ−1` and `λ = γ̄_D ν_SD Ω_D`.
///
/// All terms are positive and are summed in log space.
pub fn sop_v2i_closed(sc: &V2IScenario, tgt: &SecrecyTarget) -> Result<SopEstimate> {
    sc.validate()?;
    let n = sc.n_elements;
    let theta = tgt.theta;
    let beta = theta - 1.0;
    let ge = mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr);
    let lambda = mean_snr_v2i_main(sc) * sc.nu_sd * omega_v2i(n);
    let y = lambda / (theta * ge);
    let ctr = ContourSettings { rel_tol: 1e-13, ..ContourSettings::default() };

    // ln G_j and its absolute error; G_j grows like j!, so it is scaled by 1/j!
    let mut ln_g = Vec::with_capacity(n as usize);
    let mut rel_err = 0.0f64;
    for j in 0..n {
        let spec = MeijerGSpec::new(2, 1, vec![-(j as f64)], vec![0.0, 0.0])?;
        let lf = ln_gamma(j as f64 + 1.0);
        let est = meijer_g_scaled(&spec, y, -lf, &ctr)?;
        if !(est.value > 0.0) {
            return Err(Error::ContourFailure(format!("G^{{2,1}}_{{1,2}} term {j} evaluated to {}", est.value)));
        }
        rel_err = rel_err.max(est.error_estimate / est.value);
        ln_g.push(est.value.ln() + lf);
    }

    let mut terms = Vec::new();
    let ln_beta = if beta > 0.0 { beta.ln() } else { f64::NEG_INFINITY };
    for k in 0..n {
        let kf = k as f64;
        let base = -beta / lambda - kf * lambda.ln() - ln_gamma(kf + 1.0) - ge.ln();
        for j in 0..=k {
            let jf = j as f64;
            let bet = if k == j { 0.0 } else { (kf - jf) * ln_beta };
            if bet == f64::NEG_INFINITY {
                continue;
            }
            terms.push(
                base + ln_binomial(k as u64, j as u64) + jf * theta.ln() + bet + (jf + 1.0) * (lambda / theta).ln()
                    + ln_g[j as usize],
            );
        }
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    let survival = m.exp() * s;
    let value = 1.0 - survival;
    let uncertainty = survival * rel_err + 4.0 * f64::EPSILON * terms.len() as f64;
    Ok(SopEstimate::clamped(
        value,
        SopMethod::ClosedForm,
        uncertainty,
        vec![format!("{} series terms, worst G relative error {rel_err:e}", terms.len())],
    ))
}
