//! Link budgets of the vehicle-to-vehicle and vehicle-to-infrastructure layouts.
//!
//! Everything here is in the linear domain; dB conversion happens at the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// RIS phases perfectly cancel the cascade phases.
    Ideal,
    /// Residual phase of every element uniform on [0, 2π).
    UniformError,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct V2VScenario {
    pub n_elements: u32,
    pub d_sr: f64,
    pub d_rd: f64,
    pub d_se: f64,
    pub p1: f64,
    pub p2: f64,
    pub nu_sr: f64,
    pub nu_rd: f64,
    /// Transmit SNR P_s/N₀ (linear).
    pub tx_snr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct V2IScenario {
    pub n_elements: u32,
    pub d_sd: f64,
    pub d_se: f64,
    pub p1: f64,
    pub p2: f64,
    pub nu_sd: f64,
    pub tx_snr: f64,
}

pub const DEFAULT_P1: f64 = 2.1;
pub const DEFAULT_P2: f64 = 2.3;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl V2VScenario {
    /// Canonical layout: d_SR = d_RD = 20 m, d_SE = 10 m, unit variances.
    pub fn canonical(n_elements: u32, tx_snr: f64) -> Self {
        V2VScenario {
            n_elements,
            d_sr: 20.0,
            d_rd: 20.0,
            d_se: 10.0,
            p1: DEFAULT_P1,
            p2: DEFAULT_P2,
            nu_sr: 1.0,
            nu_rd: 1.0,
            tx_snr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidParameter("RIS needs at least one element".into()));
        }
        for (name, v) in [
            ("d_sr", self.d_sr),
            ("d_rd", self.d_rd),
            ("d_se", self.d_se),
            ("p1", self.p1),
            ("p2", self.p2),
            ("nu_sr", self.nu_sr),
            ("nu_rd", self.nu_rd),
            ("tx_snr", self.tx_snr),
        ] {
            positive(name, v)?;
        }
        Ok(())
    }
}

impl V2IScenario {
    /// Canonical layout: d_SD = 50 m, d_SE = 10 m, unit variance.
    pub fn canonical(n_elements: u32, tx_snr: f64) -> Self {
        V2IScenario { n_elements, d_sd: 50.0, d_se: 10.0, p1: DEFAULT_P1, p2: DEFAULT_P2, nu_sd: 1.0, tx_snr }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidParameter("RIS needs at least one element".into()));
        }
        for (name, v) in [
            ("d_sd", self.d_sd),
            ("d_se", self.d_se),
            ("p1", self.p1),
            ("p2", self.p2),
            ("nu_sd", self.nu_sd),
            ("tx_snr", self.tx_snr),
        ] {
            positive(name, v)?;
        }
        Ok(())
    }
}

/// γ̄_D = (P_s/N₀)·d_SR^{−p₁}·d_RD^{−p₁}.
pub fn mean_snr_v2v_main(sc: &V2VScenario) -> f64 {
    sc.tx_snr * sc.d_sr.powf(-sc.p1) * sc.d_rd.powf(-sc.p1)
}

/// γ̄_E = (P_s/N₀)·d_SE^{−p₂}.
pub fn mean_snr_eve(d_se: f64, p2: f64, tx_snr: f64) -> f64 {
    tx_snr * d_se.powf(-p2)
}

/// γ̄_D = (P_s/N₀)·d_SD^{−p₁}.
pub fn mean_snr_v2i_main(sc: &V2IScenario) -> f64 {
    sc.tx_snr * sc.d_sd.powf(-sc.p1)
}
