//! Monte Carlo simulation of the physical channels.
//!
//! Random numbers come from ChaCha8 keyed by `seed`, with `stream_id` as the
//! stream selector and the sample chunk index in the upper half of the 64-bit
//! block counter. Every chunk therefore has a fixed, position-addressable
//! sequence, and results do not depend on how chunks are spread over threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{mean_snr_eve, mean_snr_v2i_main, mean_snr_v2v_main, PhaseModel, V2IScenario, V2VScenario};
use crate::error::{Error, Result};
use crate::secrecy::SecrecyTarget;

/// Samples per independently addressed chunk.
pub const CHUNK: usize = 16_384;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Generator positioned at the start of chunk `chunk`.
    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos((chunk as u128) << 36);
        rng
    }

    /// Generator for a plain sequential stream.
    pub fn generator(&self) -> ChaCha8Rng {
        self.chunk_rng(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    /// 1.96·√(p̂(1−p̂)/n).
    pub ci95_halfwidth: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub hits: u64,
}

impl McResult {
    pub fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        McResult { estimate: p, ci95_halfwidth: 1.96 * (p * (1.0 - p) / n as f64).sqrt(), n_samples: n, seed, hits }
    }

    /// Wilson score interval at normal quantile `z`; unlike the Wald interval it
    /// does not collapse when no (or every) draw is an outage.
    pub fn wilson_interval(&self, z: f64) -> (f64, f64) {
        let n = self.n_samples as f64;
        let p = self.estimate;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        ((center - half).max(0.0), (center + half).min(1.0))
    }

    /// Two-sided 99% Wilson interval.
    pub fn ci99(&self) -> (f64, f64) {
        self.wilson_interval(Z99)
    }
}

/// Standard normal 0.995 quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Rayleigh amplitude with E[α²] = ν by inverse transform.
#[inline]
fn rayleigh<R: Rng>(rng: &mut R, nu: f64) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    (-nu * u.ln()).sqrt()
}

/// Squared product of two unit Rayleigh amplitudes (product of two Exp(1)).
#[inline]
fn double_rayleigh_power<R: Rng>(rng: &mut R) -> f64 {
    let a: f64 = 1.0 - rng.random::<f64>();
    let b: f64 = 1.0 - rng.random::<f64>();
    a.ln() * b.ln()
}

/// γ_D/γ̄_D for the V2V cascade.
pub fn sample_v2v_gain<R: Rng>(n: u32, nu_sr: f64, nu_rd: f64, phase: PhaseModel, rng: &mut R) -> f64 {
    match phase {
        PhaseModel::Ideal => {
            let mut s = 0.0;
            for _ in 0..n {
                s += rayleigh(rng, nu_sr) * rayleigh(rng, nu_rd);
            }
            s * s
        }
        PhaseModel::UniformError => {
            let (mut re, mut im) = (0.0, 0.0);
            for _ in 0..n {
                let amp = rayleigh(rng, nu_sr) * rayleigh(rng, nu_rd);
                let phi = 2.0 * PI * rng.random::<f64>();
                let (s, c) = phi.sin_cos();
                re += amp * c;
                im += amp * s;
            }
            re * re + im * im
        }
    }
}

/// γ_D/γ̄_D for the V2I equal-gain sum.
pub fn sample_v2i_gain<R: Rng>(n: u32, nu_sd: f64, rng: &mut R) -> f64 {
    let mut s = 0.0;
    for _ in 0..n {
        s += rayleigh(rng, nu_sd);
    }
    s * s
}

/// One (γ_D, γ_E) draw for the V2V layout.
pub fn sample_v2v_snr_pair<R: Rng>(sc: &V2VScenario, phase: PhaseModel, rng: &mut R) -> (f64, f64) {
    let gd = mean_snr_v2v_main(sc) * sample_v2v_gain(sc.n_elements, sc.nu_sr, sc.nu_rd, phase, rng);
    let ge = mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr) * double_rayleigh_power(rng);
    (gd, ge)
}

/// One (γ_D, γ_E) draw for the V2I layout.
pub fn sample_v2i_snr_pair<R: Rng>(sc: &V2IScenario, rng: &mut R) -> (f64, f64) {
    let gd = mean_snr_v2i_main(sc) * sample_v2i_gain(sc.n_elements, sc.nu_sd, rng);
    let ge = mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr) * double_rayleigh_power(rng);
    (gd, ge)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    V2V { sc: V2VScenario, phase: PhaseModel },
    V2I { sc: V2IScenario },
}

impl Scenario {
    fn tx_snr(&self) -> f64 {
        match self {
            Scenario::V2V { sc, .. } => sc.tx_snr,
            Scenario::V2I { sc } => sc.tx_snr,
        }
    }

    fn with_tx_snr(&self, tx: f64) -> Scenario {
        match *self {
            Scenario::V2V { sc, phase } => Scenario::V2V { sc: V2VScenario { tx_snr: tx, ..sc }, phase },
            Scenario::V2I { sc } => Scenario::V2I { sc: V2IScenario { tx_snr: tx, ..sc } },
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Scenario::V2V { sc, .. } => sc.validate(),
            Scenario::V2I { sc } => sc.validate(),
        }
    }

    /// (γ̄_D, γ̄_E) at the scenario's own transmit SNR.
    fn means(&self) -> (f64, f64) {
        match self {
            Scenario::V2V { sc, .. } => (mean_snr_v2v_main(sc), mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr)),
            Scenario::V2I { sc } => (mean_snr_v2i_main(sc), mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr)),
        }
    }

    /// Normalised draw (γ_D/γ̄_D, γ_E/γ̄_E).
    fn normalized<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let a = match self {
            Scenario::V2V { sc, phase } => sample_v2v_gain(sc.n_elements, sc.nu_sr, sc.nu_rd, *phase, rng),
            Scenario::V2I { sc } => sample_v2i_gain(sc.n_elements, sc.nu_sd, rng),
        };
        (a, double_rayleigh_power(rng))
    }
}

fn chunk_bounds(n: u64) -> impl Iterator<Item = (u64, u64)> {
    let chunks = n.div_ceil(CHUNK as u64);
    (0..chunks).map(move |c| (c, (n - c * CHUNK as u64).min(CHUNK as u64)))
}

/// Fraction of `n` draws with `γ_D ≤ Θγ_E + Θ − 1`.
pub fn estimate_sop(scenario: &Scenario, tgt: &SecrecyTarget, n: u64, rng: &RngStream) -> Result<McResult> {
    let tx = scenario.tx_snr();
    let out = estimate_sop_batch(scenario, &[tx], std::slice::from_ref(tgt), n, rng)?;
    Ok(out[0][0])
}

/// Outage estimates for every (transmit SNR, target) pair from the same draws.
///
/// Because both mean SNRs scale with the transmit power, one set of normalised
/// channel draws serves the whole grid; the result is indexed `[tx][target]`.
pub fn estimate_sop_batch(
    scenario: &Scenario,
    tx_snrs: &[f64],
    targets: &[SecrecyTarget],
    n: u64,
    rng: &RngStream,
) -> Result<Vec<Vec<McResult>>> {
    scenario.validate()?;
    if n < 10_000 {
        return Err(Error::InvalidParameter(format!("Monte Carlo needs at least 10⁴ samples, got {n}")));
    }
    if tx_snrs.is_empty() || targets.is_empty() {
        return Err(Error::InvalidParameter("empty transmit SNR or target list".into()));
    }
    let means: Vec<(f64, f64)> = tx_snrs
        .iter()
        .map(|&tx| {
            let s = scenario.with_tx_snr(tx);
            s.validate().map(|_| s.means())
        })
        .collect::<Result<_>>()?;
    let cells = tx_snrs.len() * targets.len();
    let per_chunk: Vec<Vec<u64>> = chunk_bounds(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, len)| {
            let mut r = rng.chunk_rng(c);
            let mut counts = vec![0u64; cells];
            for _ in 0..len {
                let (a, b) = scenario.normalized(&mut r);
                for (i, &(md, me)) in means.iter().enumerate() {
                    let gd = md * a;
                    let ge = me * b;
                    for (j, t) in targets.iter().enumerate() {
                        if gd <= t.theta * ge + t.theta - 1.0 {
                            counts[i * targets.len() + j] += 1;
                        }
                    }
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; cells];
    for counts in &per_chunk {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    Ok((0..tx_snrs.len())
        .map(|i| (0..targets.len()).map(|j| McResult::from_counts(total[i * targets.len() + j], n, rng.seed)).collect())
        .collect())
}

/// `n` normalised draws (γ_D/γ̄_D, γ_E/γ̄_E), chunk-addressed like the estimators.
pub fn sample_normalized(scenario: &Scenario, n: u64, rng: &RngStream) -> Result<(Vec<f64>, Vec<f64>)> {
    scenario.validate()?;
    let parts: Vec<Vec<(f64, f64)>> = chunk_bounds(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, len)| {
            let mut r = rng.chunk_rng(c);
            (0..len).map(|_| scenario.normalized(&mut r)).collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().unzip())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    /// Fraction of samples that fell inside the range.
    pub coverage: f64,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Density-normalised histogram over `range` (mass outside the range is
/// counted in the normalisation, so the density integrates to `coverage`).
pub fn empirical_pdf(samples: &[f64], n_bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if n_bins < 10 {
        return Err(Error::InvalidParameter(format!("need at least 10 bins, got {n_bins}")));
    }
    let (lo, hi) = range;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptyRange(format!("[{lo}, {hi}]")));
    }
    if samples.is_empty() {
        return Err(Error::EmptyRange("no samples".into()));
    }
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for &s in samples {
        if s >= lo && s <= hi {
            let b = (((s - lo) / width) as usize).min(n_bins - 1);
            counts[b] += 1;
        }
    }
    let n = samples.len() as f64;
    let inside: u64 = counts.iter().sum();
    Ok(Histogram {
        edges: (0..=n_bins).map(|i| lo + width * i as f64).collect(),
        density: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        coverage: inside as f64 / n,
    })
}

/// Kolmogorov–Smirnov distance between the samples and a CDF; sorts `samples`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}
