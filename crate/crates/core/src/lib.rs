//! Secrecy outage analysis of RIS-assisted vehicular links.
//!
//! | module | contents |
//! |---|---|
//! | [`special`] | log-gamma, Bessel K/J₀, incomplete gamma, Meijer G, bivariate Fox H |
//! | [`channel`] | scenario geometry and mean SNRs |
//! | [`statistics`] | SNR laws: Gamma-square, random-walk exact, V2I Gamma, double Rayleigh |
//! | [`secrecy`] | SOP by closed form, single integral and double integral |
//! | [`montecarlo`] | physical-channel sampling, SOP and distribution estimates |
//! | [`quadrature`] | adaptive Gauss–Kronrod |

pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod quadrature;
pub mod secrecy;
pub mod special;
pub mod statistics;

pub use channel::{mean_snr_eve, mean_snr_v2i_main, mean_snr_v2v_main, PhaseModel, V2IScenario, V2VScenario};
pub use error::{Error, Result};
pub use montecarlo::{estimate_sop, estimate_sop_batch, McResult, RngStream, Scenario};
pub use secrecy::{
    secrecy_rate, sop_double_integral, sop_semianalytic, sop_v2i_closed, sop_v2v_ideal_closed,
    sop_v2v_phase_error_closed, SecrecyTarget, SopEstimate, SopMethod,
};
pub use special::ContourSettings;
pub use statistics::{eval_cdf, eval_pdf, eval_sf, fit_gamma_square, omega_v2i, SnrDistribution};
