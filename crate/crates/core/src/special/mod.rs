//! Special functions and Mellin–Barnes integrals.

pub mod bessel;
pub mod foxh;
pub mod gamma;
pub mod incgamma;
pub mod meijer;
pub mod mellin;

pub use bessel::{bessel_j0, bessel_k, ln_bessel_k};
pub use foxh::{fox_h_bivariate, fox_h_bivariate_scaled, BivarFoxHSpec, FactorGroup};
pub use gamma::{gamma, ln_binomial, ln_gamma, ln_gamma_complex, ln_gamma_signed};
pub use incgamma::{reg_inc_gamma_lower, reg_inc_gamma_upper};
pub use meijer::{meijer_g, meijer_g_scaled, MeijerGSpec};
pub use mellin::{ContourEstimate, ContourSettings, GammaTerm};
