//! Experiment configuration: one JSON document, SNRs in dB.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use ris_secrecy_core::channel::{DEFAULT_P1, DEFAULT_P2};
use ris_secrecy_core::{ContourSettings, PhaseModel, V2IScenario, V2VScenario};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    V2v,
    V2i,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Semianalytic,
    Mc,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Semianalytic => "semianalytic",
            Method::Mc => "mc",
        }
    }
}

/// Distances, path-loss exponents and fading variances. Unset fields take the
/// canonical layout of the chosen link kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub d_sr: Option<f64>,
    pub d_rd: Option<f64>,
    pub d_sd: Option<f64>,
    pub d_se: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub nu_sr: Option<f64>,
    pub nu_rd: Option<f64>,
    pub nu_sd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn default_methods() -> Vec<Method> {
    vec![Method::Closed, Method::Semianalytic]
}

fn default_mc_samples() -> u64 {
    1_000_000
}

fn default_bins() -> usize {
    50
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: LinkKind,
    #[serde(default)]
    pub geometry: Geometry,
    pub n_list: Vec<u32>,
    pub tx_snr_db: Vec<f64>,
    /// Target secrecy rate(s) in nats.
    pub rs: OneOrMany,
    #[serde(default = "default_phase")]
    pub phase: PhaseModel,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub seed: u64,
    /// Output directory used when `--out` is not given.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Histogram bins for `stats-verify`.
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub contour: ContourSettings,
    /// Test fixture: multiplies the closed-form outage complement `1 − SOP`,
    /// i.e. the lemma prefactor. 1 leaves the closed forms untouched.
    #[serde(default = "unit")]
    pub closed_form_prefactor_scale: f64,
}

fn default_phase() -> PhaseModel {
    PhaseModel::Ideal
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).context("malformed experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.n_list.is_empty(), "n_list must not be empty");
        ensure!(!self.tx_snr_db.is_empty(), "tx_snr_db must not be empty");
        ensure!(!self.methods.is_empty(), "methods must not be empty");
        let rs = self.rs.to_vec();
        ensure!(!rs.is_empty(), "rs must not be empty");
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0) {
            bail!("RIS element counts must be positive, got {n}");
        }
        if let Some(r) = rs.iter().find(|r| r.is_nan() || **r < 0.0 || !r.is_finite()) {
            bail!("secrecy rates must be finite and non-negative, got {r}");
        }
        if let Some(t) = self.tx_snr_db.iter().find(|t| !t.is_finite()) {
            bail!("transmit SNR must be finite, got {t} dB");
        }
        if self.methods.contains(&Method::Mc) {
            ensure!(self.mc_samples >= 10_000, "mc_samples must be at least 10000, got {}", self.mc_samples);
        }
        ensure!(self.bins >= 10, "bins must be at least 10");
        ensure!(
            self.closed_form_prefactor_scale.is_finite() && self.closed_form_prefactor_scale >= 0.0,
            "closed_form_prefactor_scale must be finite and non-negative"
        );
        self.contour.validate().map_err(anyhow::Error::from)?;
        let g = &self.geometry;
        match self.kind {
            LinkKind::V2v => {
                ensure!(g.d_sd.is_none() && g.nu_sd.is_none(), "d_sd and nu_sd only apply to v2i links");
            }
            LinkKind::V2i => {
                ensure!(
                    g.d_sr.is_none() && g.d_rd.is_none() && g.nu_sr.is_none() && g.nu_rd.is_none(),
                    "d_sr, d_rd, nu_sr and nu_rd only apply to v2v links"
                );
                ensure!(self.phase == PhaseModel::Ideal, "the phase model only applies to v2v links");
            }
        }
        // geometry is checked once through the core validators
        match self.kind {
            LinkKind::V2v => self.v2v(self.n_list[0], 1.0).validate()?,
            LinkKind::V2i => self.v2i(self.n_list[0], 1.0).validate()?,
        }
        Ok(())
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rs.to_vec()
    }

    /// Methods in first-seen order without repeats.
    pub fn method_list(&self) -> Vec<Method> {
        let mut out = Vec::new();
        for &m in &self.methods {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }

    pub fn v2v(&self, n: u32, tx_snr: f64) -> V2VScenario {
        let g = &self.geometry;
        let base = V2VScenario::canonical(n, tx_snr);
        V2VScenario {
            d_sr: g.d_sr.unwrap_or(base.d_sr),
            d_rd: g.d_rd.unwrap_or(base.d_rd),
            d_se: g.d_se.unwrap_or(base.d_se),
            p1: g.p1.unwrap_or(DEFAULT_P1),
            p2: g.p2.unwrap_or(DEFAULT_P2),
            nu_sr: g.nu_sr.unwrap_or(base.nu_sr),
            nu_rd: g.nu_rd.unwrap_or(base.nu_rd),
            ..base
        }
    }

    pub fn v2i(&self, n: u32, tx_snr: f64) -> V2IScenario {
        let g = &self.geometry;
        let base = V2IScenario::canonical(n, tx_snr);
        V2IScenario {
            d_sd: g.d_sd.unwrap_or(base.d_sd),
            d_se: g.d_se.unwrap_or(base.d_se),
            p1: g.p1.unwrap_or(DEFAULT_P1),
            p2: g.p2.unwrap_or(DEFAULT_P2),
            nu_sd: g.nu_sd.unwrap_or(base.nu_sd),
            ..base
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
