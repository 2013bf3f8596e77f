//! Grid sweeps over (N, transmit SNR, R_s) and the cross-method validation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use ris_secrecy_core::montecarlo::Z99;
use ris_secrecy_core::{
    estimate_sop_batch, fit_gamma_square, mean_snr_eve, mean_snr_v2i_main, mean_snr_v2v_main, omega_v2i,
    sop_semianalytic, sop_v2i_closed, sop_v2v_ideal_closed, sop_v2v_phase_error_closed, Error, McResult, PhaseModel,
    RngStream, Scenario, SecrecyTarget, SnrDistribution,
};

use crate::config::{db_to_linear, ExperimentConfig, LinkKind, Method};
use crate::report::{Gate, Report, SweepRow};

/// Relative closed-vs-single-integral tolerance, applied where the reference exceeds the floor.
pub const CLOSED_REL_TOL: f64 = 1e-2;
pub const CLOSED_REL_FLOOR: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub n: u32,
    pub tx_snr_db: f64,
    pub rs: f64,
}

/// Grid in row order: N outermost, then transmit SNR, then R_s.
pub fn grid(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let rates = cfg.rates();
    let mut out = Vec::new();
    for &n in &cfg.n_list {
        for &tx in &cfg.tx_snr_db {
            for &rs in &rates {
                out.push(GridPoint { n, tx_snr_db: tx, rs });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub sop: f64,
    pub uncertainty: f64,
    pub mc: Option<McResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub point: GridPoint,
    pub method: Method,
    pub outcome: Result<Estimate, Error>,
}

impl Evaluation {
    pub fn row(&self) -> SweepRow {
        let (sop, uncertainty, status) = match &self.outcome {
            Ok(e) => (Some(e.sop), Some(e.uncertainty), "ok".to_string()),
            Err(err) => (None, None, format!("error: {err}")),
        };
        SweepRow {
            n: self.point.n,
            tx_snr_db: self.point.tx_snr_db,
            rs: self.point.rs,
            method: self.method.label().to_string(),
            sop,
            uncertainty,
            status,
        }
    }
}

fn target(p: &GridPoint) -> Result<SecrecyTarget, Error> {
    SecrecyTarget::new(p.rs)
}

fn laws(cfg: &ExperimentConfig, p: &GridPoint) -> (SnrDistribution, SnrDistribution) {
    let tx = db_to_linear(p.tx_snr_db);
    match cfg.kind {
        LinkKind::V2v => {
            let sc = cfg.v2v(p.n, tx);
            let gd = mean_snr_v2v_main(&sc);
            let main = match cfg.phase {
                PhaseModel::Ideal => fit_gamma_square(p.n, sc.nu_sr, sc.nu_rd, gd),
                PhaseModel::UniformError => SnrDistribution::RandomWalkExact { n: p.n, scale: gd * sc.nu_sr * sc.nu_rd },
            };
            (main, SnrDistribution::DoubleRayleigh { mean_snr: mean_snr_eve(sc.d_se, sc.p2, tx) })
        }
        LinkKind::V2i => {
            let sc = cfg.v2i(p.n, tx);
            let scale = mean_snr_v2i_main(&sc) * sc.nu_sd * omega_v2i(p.n);
            (
                SnrDistribution::GammaV2I { n: p.n, scale },
                SnrDistribution::DoubleRayleigh { mean_snr: mean_snr_eve(sc.d_se, sc.p2, tx) },
            )
        }
    }
}

fn closed(cfg: &ExperimentConfig, p: &GridPoint) -> Result<Estimate, Error> {
    let tgt = target(p)?;
    let tx = db_to_linear(p.tx_snr_db);
    let est = match (cfg.kind, cfg.phase) {
        (LinkKind::V2v, PhaseModel::Ideal) => sop_v2v_ideal_closed(&cfg.v2v(p.n, tx), &tgt, &cfg.contour)?,
        (LinkKind::V2v, PhaseModel::UniformError) => sop_v2v_phase_error_closed(&cfg.v2v(p.n, tx), &tgt, &cfg.contour)?,
        (LinkKind::V2i, _) => sop_v2i_closed(&cfg.v2i(p.n, tx), &tgt)?,
    };
    let s = cfg.closed_form_prefactor_scale;
    Ok(Estimate { sop: (1.0 - s * (1.0 - est.value)).clamp(0.0, 1.0), uncertainty: s * est.uncertainty, mc: None })
}

fn semianalytic(cfg: &ExperimentConfig, p: &GridPoint) -> Result<Estimate, Error> {
    let (main, eve) = laws(cfg, p);
    let est = sop_semianalytic(&main, &eve, &target(p)?)?;
    Ok(Estimate { sop: est.value, uncertainty: est.uncertainty, mc: None })
}

fn scenario(cfg: &ExperimentConfig, n: u32) -> Scenario {
    match cfg.kind {
        LinkKind::V2v => Scenario::V2V { sc: cfg.v2v(n, 1.0), phase: cfg.phase },
        LinkKind::V2i => Scenario::V2I { sc: cfg.v2i(n, 1.0) },
    }
}

/// Monte Carlo for every (transmit SNR, R_s) of one N from a shared set of draws;
/// the generator stream is the element count.
fn monte_carlo(cfg: &ExperimentConfig, n: u32) -> Result<Vec<Vec<McResult>>, Error> {
    let tx: Vec<f64> = cfg.tx_snr_db.iter().map(|&d| db_to_linear(d)).collect();
    let targets = cfg.rates().into_iter().map(SecrecyTarget::new).collect::<Result<Vec<_>, _>>()?;
    estimate_sop_batch(&scenario(cfg, n), &tx, &targets, cfg.mc_samples, &RngStream::new(cfg.seed, n as u64))
}

/// Every requested method at every grid point, in row order (grid order, then
/// method order). Runs on the current rayon pool.
pub fn evaluate(cfg: &ExperimentConfig, methods: &[Method]) -> Vec<Evaluation> {
    let points = grid(cfg);
    let n_rates = cfg.rates().len();
    let mut mc: BTreeMap<u32, Result<Vec<Vec<McResult>>, Error>> = BTreeMap::new();
    if methods.contains(&Method::Mc) {
        for &n in &cfg.n_list {
            mc.entry(n).or_insert_with(|| monte_carlo(cfg, n));
        }
    }
    let jobs: Vec<(usize, Method)> = (0..points.len()).flat_map(|i| methods.iter().map(move |&m| (i, m))).collect();
    jobs.par_iter()
        .map(|&(i, method)| {
            let p = points[i];
            let outcome = match method {
                Method::Closed => closed(cfg, &p),
                Method::Semianalytic => semianalytic(cfg, &p),
                Method::Mc => {
                    let per_point = i % (cfg.tx_snr_db.len() * n_rates);
                    let (ti, ri) = (per_point / n_rates, per_point % n_rates);
                    mc[&p.n].as_ref().map_err(Clone::clone).map(|table| {
                        let r = table[ti][ri];
                        Estimate { sop: r.estimate, uncertainty: r.ci95_halfwidth, mc: Some(r) }
                    })
                }
            };
            Evaluation { point: p, method, outcome }
        })
        .collect()
}

pub fn sop_sweep(cfg: &ExperimentConfig) -> Vec<SweepRow> {
    evaluate(cfg, &cfg.method_list()).iter().map(Evaluation::row).collect()
}

pub struct CrossValidation {
    pub rows: Vec<SweepRow>,
    pub report: Report,
}

/// Closed form against the single integral and both against the Monte Carlo
/// 99% interval, on the configured grid.
pub fn cross_validate(cfg: &ExperimentConfig) -> CrossValidation {
    let methods = [Method::Closed, Method::Semianalytic, Method::Mc];
    let evals = evaluate(cfg, &methods);
    let mut max_rel = 0.0f64;
    let mut compared = 0usize;
    let mut closed_out = 0usize;
    let mut semi_out = 0usize;
    let mut failures = 0usize;
    for chunk in evals.chunks(methods.len()) {
        let [c, s, m] = chunk else { unreachable!() };
        for e in chunk {
            match &e.outcome {
                // the closed forms are undefined at Θ = 1; the single integral covers it
                Err(Error::ThetaDegenerate) if e.method == Method::Closed => {}
                Err(_) => failures += 1,
                Ok(_) => {}
            }
        }
        let interval = m.outcome.as_ref().ok().and_then(|e| e.mc).map(|r| r.wilson_interval(Z99));
        let inside = |v: f64| interval.is_some_and(|(lo, hi)| v >= lo && v <= hi);
        if let Ok(cv) = &c.outcome {
            if !inside(cv.sop) {
                closed_out += 1;
            }
            if let Ok(sv) = &s.outcome {
                if sv.sop > CLOSED_REL_FLOOR {
                    max_rel = max_rel.max((cv.sop - sv.sop).abs() / sv.sop);
                    compared += 1;
                }
            }
        }
        if let Ok(sv) = &s.outcome {
            if !inside(sv.sop) {
                semi_out += 1;
            }
        }
    }
    let gates = vec![
        Gate::at_most("closed_vs_semianalytic_max_rel_dev", max_rel, CLOSED_REL_TOL),
        Gate::at_most("closed_outside_mc_ci99", closed_out as f64, 0.0),
        Gate::at_most("semianalytic_outside_mc_ci99", semi_out as f64, 0.0),
        Gate::at_most("failed_evaluations", failures as f64, 0.0),
        // at least one point must be compared for the deviation gate to mean anything
        Gate::at_most("uncompared_grid", if compared == 0 { 1.0 } else { 0.0 }, 0.0),
    ];
    CrossValidation { rows: evals.iter().map(Evaluation::row).collect(), report: Report::new(gates, cfg.seed) }
}
