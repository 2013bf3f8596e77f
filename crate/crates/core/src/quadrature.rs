//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Piece> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut lo = [0.0; 7];
    let mut hi = [0.0; 7];
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        lo[j] = f(center - dx);
        hi[j] = f(center + dx);
        kronrod += WGK[j] * (lo[j] + hi[j]);
        resabs += WGK[j] * (lo[j].abs() + hi[j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo[j] + hi[j]);
        }
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(Error::IntegrationFailure(format!("non-finite integrand on [{a}, {b}]")));
    }
    // QUADPACK error heuristic
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((lo[j] - mean).abs() + (hi[j] - mean).abs());
    }
    resasc *= half.abs();
    resabs *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Piece { a, b, value, error })
}

/// Integrates `f` over consecutive `breaks` (at least two increasing points),
/// bisecting the worst interval until the summed error meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("quadrature break points must increase".into()));
    }
    let mut pieces = Vec::new();
    for w in breaks.windows(2) {
        pieces.push(gk15(&f, w[0], w[1])?);
    }
    loop {
        // sequential sums keep the result independent of any outer parallelism
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult { value, abs_error: error, intervals: pieces.len() });
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::IntegrationFailure(format!(
                "error estimate {error:e} above tolerance after {} intervals",
                pieces.len()
            )));
        }
        let (idx, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::IntegrationFailure("interval can no longer be bisected".into()));
        }
        pieces[idx] = gk15(&f, worst.a, mid)?;
        pieces.push(gk15(&f, mid, worst.b)?);
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    integrate_breaks(f, &[a, b], abs_tol, rel_tol)
}

/// Highest even column of the Wynn ε-table built from the tail of `seq`.
pub fn wynn_epsilon(seq: &[f64]) -> f64 {
    let Some(&last) = seq.last() else { return f64::NAN };
    let mut best = last;
    let mut before = vec![0.0; seq.len() + 1];
    let mut cur = seq.to_vec();
    let mut k = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return best;
            }
            next.push(before[i + 1] + 1.0 / d);
        }
        k += 1;
        if k % 2 == 0 {
            let v = *next.last().expect("non-empty");
            if !v.is_finite() {
                return best;
            }
            best = v;
        }
        before = cur;
        cur = next;
    }
    best
}

/// ∫_{x₀}^∞ f for slowly decaying oscillatory `f`: integrates the panels
/// `[x_k, x_{k+1}]` given by `breaks(k)` and extrapolates the partial sums
/// with the ε-algorithm until three consecutive estimates agree.
pub fn integrate_oscillatory<F, B>(f: F, breaks: B, max_panels: usize, abs_tol: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
    B: Fn(usize) -> f64,
{
    let mut partial = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut intervals = 0;
    for k in 0..max_panels {
        let (a, b) = (breaks(k), breaks(k + 1));
        let piece = integrate(&f, a, b, 0.01 * abs_tol, (0.01 * rel_tol).max(1e-13))?;
        intervals += piece.intervals;
        total += piece.value;
        partial.push(total);
        // the ε-table only needs the most recent terms
        let window = &partial[partial.len().saturating_sub(24)..];
        estimates.push(wynn_epsilon(window));
        if estimates.len() >= 8 {
            let e = &estimates[estimates.len() - 3..];
            let spread = (e[2] - e[1]).abs().max((e[1] - e[0]).abs());
            if spread <= abs_tol.max(rel_tol * e[2].abs()) {
                return Ok(QuadResult { value: e[2], abs_error: spread, intervals });
            }
        }
    }
    Err(Error::IntegrationFailure(format!("ε-extrapolation did not settle in {max_panels} panels")))
}
