use approx::assert_relative_eq;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use ris_secrecy_core::montecarlo::{
    empirical_pdf, ks_statistic, sample_normalized, sample_v2i_gain, sample_v2v_gain, CHUNK,
};
use ris_secrecy_core::special::ln_binomial;
use ris_secrecy_core::{
    eval_cdf, eval_pdf, estimate_sop, estimate_sop_batch, fit_gamma_square, mean_snr_eve, mean_snr_v2v_main,
    omega_v2i, sop_semianalytic, Error, PhaseModel, RngStream, Scenario, SecrecyTarget, SnrDistribution, V2IScenario,
    V2VScenario,
};
use std::f64::consts::PI;

fn v2v(n: u32, phase: PhaseModel) -> Scenario {
    Scenario::V2V { sc: V2VScenario::canonical(n, 1e6), phase }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn uniform_phase_gain_follows_random_walk_law() {
    for &n in &[1u32, 2, 4, 8] {
        let (mut g, _) = sample_normalized(&v2v(n, PhaseModel::UniformError), 1_000_000, &RngStream::new(11, n as u64)).unwrap();
        let d = SnrDistribution::RandomWalkExact { n, scale: 1.0 };
        let ks = ks_statistic(&mut g, |x| eval_cdf(&d, x).unwrap());
        assert!(ks < 0.002, "N = {n}: KS = {ks}");
    }
}

#[test]
fn single_element_phase_is_irrelevant() {
    let dr = SnrDistribution::DoubleRayleigh { mean_snr: 1.0 };
    for phase in [PhaseModel::Ideal, PhaseModel::UniformError] {
        let (mut g, _) = sample_normalized(&v2v(1, phase), 1_000_000, &RngStream::new(5, 0)).unwrap();
        let ks = ks_statistic(&mut g, |x| eval_cdf(&dr, x).unwrap());
        assert!(ks < 0.002, "{phase:?}: KS = {ks}");
    }
    // identical amplitudes draw by draw on a fresh generator
    let mut a = RngStream::new(9, 3).generator();
    let mut b = RngStream::new(9, 3).generator();
    let ideal = sample_v2v_gain(1, 0.8, 1.7, PhaseModel::Ideal, &mut a);
    let rand_phase = sample_v2v_gain(1, 0.8, 1.7, PhaseModel::UniformError, &mut b);
    assert_relative_eq!(ideal, rand_phase, max_relative = 1e-12);
}

#[test]
fn ideal_gain_moments() {
    let (nu_sr, nu_rd) = (0.6, 1.5);
    let mut rng = RngStream::new(21, 0).generator();
    for &n in &[1u32, 4, 16] {
        let g: Vec<f64> = (0..400_000).map(|_| sample_v2v_gain(n, nu_sr, nu_rd, PhaseModel::Ideal, &mut rng)).collect();
        let (m, se) = mean_and_se(&g);
        let nf = n as f64;
        let second = nf * nu_sr * nu_rd + PI * PI * nu_sr * nu_rd * nf * (nf - 1.0) / 16.0;
        assert!((m - second).abs() < 5.0 * se, "N = {n}: {m} vs {second} (se {se})");
        // amplitude sum against the Gamma approximation's mean k_D·η_D
        let amp: Vec<f64> = g.iter().map(|x| x.sqrt()).collect();
        let (ma, sea) = mean_and_se(&amp);
        let SnrDistribution::GammaSquare { k_d, eta_d } = fit_gamma_square(n, nu_sr, nu_rd, 1.0) else { panic!() };
        assert!((ma - k_d * eta_d).abs() < 5.0 * sea, "N = {n}: amplitude mean {ma} vs {}", k_d * eta_d);
    }
}

#[test]
fn rayleigh_second_moment_and_v2i_moments() {
    let mut rng = RngStream::new(4, 4).generator();
    for &nu in &[0.5, 1.0, 3.0] {
        let g: Vec<f64> = (0..1_000_000).map(|_| sample_v2i_gain(1, nu, &mut rng)).collect();
        let (m, se) = mean_and_se(&g);
        assert!((m - nu).abs() < 3.0 * se, "ν = {nu}: {m}");
        // exponential law for a single element
        let mut g = g;
        let ks = ks_statistic(&mut g, |x| 1.0 - (-x / nu).exp());
        assert!(ks < 0.002);
    }
    for &n in &[2u32, 8, 32] {
        let g: Vec<f64> = (0..300_000).map(|_| sample_v2i_gain(n, 0.9, &mut rng)).collect();
        let (m, se) = mean_and_se(&g);
        let want = n as f64 * omega_v2i(n) * 0.9;
        assert!((m - want).abs() < 5.0 * se, "N = {n}: {m} vs {want}");
    }
}

#[test]
fn eavesdropper_draws_do_not_depend_on_n() {
    let sc = |n| Scenario::V2I { sc: V2IScenario::canonical(n, 1e6) };
    let (_, mut e4) = sample_normalized(&sc(4), 400_000, &RngStream::new(1, 1)).unwrap();
    let (_, mut e32) = sample_normalized(&sc(32), 400_000, &RngStream::new(2, 1)).unwrap();
    let dr = SnrDistribution::DoubleRayleigh { mean_snr: 1.0 };
    assert!(ks_statistic(&mut e4, |x| eval_cdf(&dr, x).unwrap()) < 0.004);
    assert!(ks_statistic(&mut e32, |x| eval_cdf(&dr, x).unwrap()) < 0.004);
    let (m, se) = mean_and_se(&e32);
    assert!((m - 1.0).abs() < 5.0 * se);
}

#[test]
fn histogram_of_uniform_is_flat() {
    let mut rng = RngStream::new(8, 0).generator();
    let u: Vec<f64> = (0..200_000).map(|_| rng.random::<f64>()).collect();
    let h = empirical_pdf(&u, 20, (0.0, 1.0)).unwrap();
    let n_per_bin: f64 = 200_000.0 / 20.0;
    let tol = 4.0 * (n_per_bin * (1.0 - 1.0 / 20.0)).sqrt() / n_per_bin;
    for &d in &h.density {
        assert!((d - 1.0).abs() < tol, "density {d}");
    }
    let mass: f64 = h.density.iter().sum::<f64>() / 20.0;
    assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
    assert_eq!(h.coverage, 1.0);
    assert_eq!(h.centers().len(), 20);
}

#[test]
fn histogram_of_gamma_square_samples_matches_pdf() {
    let d = fit_gamma_square(4, 1.0, 1.0, 1.0);
    let SnrDistribution::GammaSquare { k_d, eta_d } = d else { panic!() };
    let gamma = Gamma::new(k_d, eta_d).unwrap();
    let mut rng = RngStream::new(13, 0).generator();
    let s: Vec<f64> = (0..1_000_000).map(|_| gamma.sample(&mut rng).powi(2)).collect();
    let h = empirical_pdf(&s, 80, (0.0, 80.0)).unwrap();
    let sup = h
        .centers()
        .iter()
        .zip(&h.density)
        .map(|(&x, &dens)| (dens - eval_pdf(&d, x).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(sup < 0.03, "sup distance {sup}");
    assert!(h.coverage > 0.99);
}

#[test]
fn histogram_rejects_bad_input() {
    assert!(matches!(empirical_pdf(&[1.0], 10, (1.0, 1.0)), Err(Error::EmptyRange(_))));
    assert!(matches!(empirical_pdf(&[], 10, (0.0, 1.0)), Err(Error::EmptyRange(_))));
    assert!(empirical_pdf(&[0.5], 9, (0.0, 1.0)).is_err());
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let sc = v2v(8, PhaseModel::UniformError);
    let tgt = SecrecyTarget::new(0.5).unwrap();
    let n = 5 * CHUNK as u64 + 123;
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_sop(&sc, &tgt, n, &RngStream::new(77, 2)).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
    assert_ne!(one.hits, estimate_sop(&sc, &tgt, n, &RngStream::new(78, 2)).unwrap().hits);
    // the batch path reproduces the single-point path
    let batch = estimate_sop_batch(&sc, &[1e5, 1e6], &[SecrecyTarget::new(0.1).unwrap(), tgt], n, &RngStream::new(77, 2)).unwrap();
    assert_eq!(batch[1][1], one);
}

#[test]
fn huge_rate_target_is_certain_outage() {
    let tgt = SecrecyTarget::new(60.0).unwrap();
    let r = estimate_sop(&v2v(4, PhaseModel::Ideal), &tgt, 20_000, &RngStream::new(1, 0)).unwrap();
    assert_eq!(r.estimate, 1.0);
    assert!(estimate_sop(&v2v(4, PhaseModel::Ideal), &tgt, 9_999, &RngStream::new(1, 0)).is_err());
}

/// P(X ≤ k) for X ~ Binomial(n, p).
fn binom_cdf(k: u64, n: u64, p: f64) -> f64 {
    (0..=k).map(|i| (ln_binomial(n, i) + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp()).sum()
}

#[test]
fn confidence_intervals_are_calibrated() {
    let mut sc = V2VScenario::canonical(2, 1e3);
    sc.d_sr = 2.0;
    sc.d_rd = 2.0;
    sc.d_se = 20.0;
    let tgt = SecrecyTarget::new(1.0).unwrap();
    let dd = SnrDistribution::RandomWalkExact { n: 2, scale: mean_snr_v2v_main(&sc) };
    let de = SnrDistribution::DoubleRayleigh { mean_snr: mean_snr_eve(sc.d_se, sc.p2, sc.tx_snr) };
    let p = sop_semianalytic(&dd, &de, &tgt).unwrap().value;
    assert!(p > 0.05 && p < 0.95, "calibration point should be interior, got {p}");
    let scenario = Scenario::V2V { sc, phase: PhaseModel::UniformError };
    let repeats = 200u64;
    let covered = (0..repeats)
        .filter(|&i| {
            let r = estimate_sop(&scenario, &tgt, 10_000, &RngStream::new(2024, i)).unwrap();
            (r.estimate - p).abs() <= r.ci95_halfwidth
        })
        .count() as u64;
    // two-sided binomial test of 95% coverage at the 1% level
    let lower = binom_cdf(covered, repeats, 0.95);
    let upper = 1.0 - if covered == 0 { 0.0 } else { binom_cdf(covered - 1, repeats, 0.95) };
    assert!(lower.min(upper) > 0.005, "{covered}/{repeats} intervals covered p = {p}");
}
