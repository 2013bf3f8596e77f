//! Distribution checks: Monte Carlo samples of the normalised main-link SNR
//! against the analytic laws.

use std::cell::RefCell;

use ris_secrecy_core::montecarlo::{empirical_pdf, ks_statistic, sample_normalized};
use ris_secrecy_core::{
    eval_cdf, eval_pdf, fit_gamma_square, omega_v2i, Error, PhaseModel, RngStream, Scenario, SnrDistribution,
};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, LinkKind};
use crate::report::{Gate, Report};

/// KS gate for the exact random-walk law.
pub const EXACT_KS_TOL: f64 = 0.002;
/// Sup-CDF gate for the Gamma approximations.
pub const APPROX_SUP_TOL: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    /// Gamma-square law, ideal-phase V2V.
    GammaSquare,
    /// Random-walk law, uniform phase error V2V.
    RandomWalk,
    /// Gamma law, V2I.
    V2iGamma,
}

impl Law {
    pub fn label(self) -> &'static str {
        match self {
            Law::GammaSquare => "gamma_square",
            Law::RandomWalk => "random_walk",
            Law::V2iGamma => "v2i_gamma",
        }
    }

    fn tolerance(self) -> f64 {
        match self {
            Law::RandomWalk => EXACT_KS_TOL,
            _ => APPROX_SUP_TOL,
        }
    }

    fn stream(self, n: u32) -> u64 {
        let p = match self {
            Law::GammaSquare => 1u64,
            Law::RandomWalk => 2,
            Law::V2iGamma => 3,
        };
        (p << 32) | n as u64
    }
}

pub fn laws(kind: LinkKind) -> &'static [Law] {
    match kind {
        LinkKind::V2v => &[Law::GammaSquare, Law::RandomWalk],
        LinkKind::V2i => &[Law::V2iGamma],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub law: String,
    pub n: u32,
    pub x: f64,
    pub analytic_pdf: f64,
    pub empirical_pdf: f64,
    /// Sup-CDF distance of the whole sample; repeated on every row of the block.
    pub ks: f64,
}

pub struct StatsCheck {
    pub law: Law,
    pub n: u32,
    pub ks: f64,
    pub rows: Vec<StatsRow>,
}

/// Analytic law of γ_D/γ̄_D and the scenario that samples it.
fn setup(cfg: &ExperimentConfig, law: Law, n: u32) -> (SnrDistribution, Scenario) {
    match law {
        Law::GammaSquare | Law::RandomWalk => {
            let sc = cfg.v2v(n, 1.0);
            if law == Law::GammaSquare {
                (fit_gamma_square(n, sc.nu_sr, sc.nu_rd, 1.0), Scenario::V2V { sc, phase: PhaseModel::Ideal })
            } else {
                (
                    SnrDistribution::RandomWalkExact { n, scale: sc.nu_sr * sc.nu_rd },
                    Scenario::V2V { sc, phase: PhaseModel::UniformError },
                )
            }
        }
        Law::V2iGamma => {
            let sc = cfg.v2i(n, 1.0);
            (SnrDistribution::GammaV2I { n, scale: sc.nu_sd * omega_v2i(n) }, Scenario::V2I { sc })
        }
    }
}

pub fn check(cfg: &ExperimentConfig, law: Law, n: u32) -> Result<StatsCheck, Error> {
    let (dist, scenario) = setup(cfg, law, n);
    dist.validate()?;
    let (mut samples, _) = sample_normalized(&scenario, cfg.mc_samples, &RngStream::new(cfg.seed, law.stream(n)))?;
    let failure = RefCell::new(None);
    let ks = ks_statistic(&mut samples, |x| {
        eval_cdf(&dist, x).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // samples are sorted now
    let hi = samples[((samples.len() as f64 * 0.995) as usize).min(samples.len() - 1)];
    let hist = empirical_pdf(&samples, cfg.bins, (0.0, hi))?;
    let rows = hist
        .centers()
        .iter()
        .zip(&hist.density)
        .map(|(&x, &d)| {
            Ok(StatsRow {
                law: law.label().to_string(),
                n,
                x,
                analytic_pdf: eval_pdf(&dist, x)?,
                empirical_pdf: d,
                ks,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(StatsCheck { law: law, n, ks, rows })
}

pub struct StatsVerification {
    pub rows: Vec<StatsRow>,
    pub report: Report,
}

/// Every applicable law at every N of the config, in (law, N) order.
pub fn stats_verify(cfg: &ExperimentConfig) -> Result<StatsVerification, Error> {
    let mut rows = Vec::new();
    let mut gates = Vec::new();
    for &law in laws(cfg.kind) {
        for &n in &cfg.n_list {
            let c = check(cfg, law, n)?;
            gates.push(Gate::below(format!("{}_ks_n{}", law.label(), n), c.ks, law.tolerance()));
            rows.extend(c.rows);
        }
    }
    Ok(StatsVerification { rows, report: Report::new(gates, cfg.seed) })
}
