//! Mellin–Barnes contour machinery shared by the Meijer G and bivariate Fox H
//! evaluators.
//!
//! An integrand is a ratio of Gamma factors `Γ(c + w₁u + w₂v)` times
//! `exp(u·ℓ₁ + v·ℓ₂ + ln A)`, integrated over vertical lines `u = c_u + i t₁`,
//! `v = c_v + i t₂`. Everything is accumulated in log space. The trapezoidal
//! rule is used on each line; its step is tied to the distance of the nearest
//! pole so the discretisation error is negligible, and the truncation is
//! doubled until two successive windows agree.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma::{ln_gamma_complex, ln_gamma_signed};

/// One Gamma factor `Γ(coeff + weights.0·u + weights.1·v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub coeff: f64,
    pub weights: (f64, f64),
}

impl GammaTerm {
    pub fn new(coeff: f64, w1: f64, w2: f64) -> Self {
        GammaTerm { coeff, weights: (w1, w2) }
    }

    fn arg_re(&self, c: (f64, f64)) -> f64 {
        self.coeff + self.weights.0 * c.0 + self.weights.1 * c.1
    }

    fn weight(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.weights.0
        } else {
            self.weights.1
        }
    }

    fn is_finite(&self) -> bool {
        self.coeff.is_finite() && self.weights.0.is_finite() && self.weights.1.is_finite()
    }
}

/// Numerical realisation of the integration contours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSettings {
    /// Real-axis crossings of the two contours; `None` selects them automatically.
    pub c_offsets: Option<(f64, f64)>,
    /// Initial half-length of each line, in units of the integrand's exponential decay scale.
    pub truncation: f64,
    /// Minimum number of trapezoid nodes per half line.
    pub nodes: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for ContourSettings {
    fn default() -> Self {
        ContourSettings { c_offsets: None, truncation: 40.0, nodes: 512, rel_tol: 1e-9, abs_tol: 1e-13 }
    }
}

impl ContourSettings {
    pub fn with_offsets(mut self, c_u: f64, c_v: f64) -> Self {
        self.c_offsets = Some((c_u, c_v));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation > 0.0) || !self.truncation.is_finite() {
            return Err(Error::InvalidParameter(format!("truncation must be positive, got {}", self.truncation)));
        }
        if self.nodes < 64 {
            return Err(Error::InvalidParameter(format!("need at least 64 nodes, got {}", self.nodes)));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if let Some((a, b)) = self.c_offsets {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidParameter("contour offsets must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Result of a contour integral with its convergence diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourEstimate {
    pub value: f64,
    /// Difference between the last two truncation windows.
    pub error_estimate: f64,
    /// Imaginary part left over on the symmetric line(s); zero in exact arithmetic.
    pub imag_residual: f64,
    /// Integral of the integrand's modulus; `abs_integral / |value|` measures cancellation.
    pub abs_integral: f64,
    pub contour: (f64, f64),
    pub truncation: (f64, f64),
    pub steps: (f64, f64),
    pub doublings: usize,
    pub residue_corrections: usize,
    pub evaluations: usize,
}

const MAX_DOUBLINGS: usize = 6;
const MARGINS: [f64; 4] = [0.25, 0.1, 0.03, 0.005];
const SAME_PLANE_TOL: f64 = 1e-9;
const MAX_HALF_LENGTH: f64 = 5e3;

pub(crate) struct Integrand {
    pub num: Vec<GammaTerm>,
    pub den: Vec<GammaTerm>,
    /// Coefficients of u and v in the exponential factor.
    pub ln_base: (f64, f64),
    pub ln_prefactor: f64,
    pub dims: usize,
}

/// Distance from `a` to the nearest non-positive integer.
fn pole_distance(a: f64) -> f64 {
    if a >= 0.0 {
        a
    } else {
        (a - a.round()).abs()
    }
}

/// If term `b` is singular on the hyperplane where `a` has its level-`ka` pole,
/// returns b's level and the orientation ratio of the two weight vectors.
fn shared_level(a: &GammaTerm, ka: usize, b: &GammaTerm) -> Option<(usize, f64)> {
    let (a1, a2) = a.weights;
    let (b1, b2) = b.weights;
    let na = a1 * a1 + a2 * a2;
    let nb = b1 * b1 + b2 * b2;
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    if (a1 * b2 - a2 * b1).abs() > SAME_PLANE_TOL * (na * nb).sqrt() {
        return None;
    }
    let lambda = (a1 * b1 + a2 * b2) / na;
    let kb = lambda * (a.coeff + ka as f64) - b.coeff;
    let r = kb.round();
    if r >= 0.0 && (kb - r).abs() < SAME_PLANE_TOL * (1.0 + kb.abs()) {
        Some((r as usize, lambda))
    } else {
        None
    }
}

/// Uncancelled pole levels of every numerator term, up to `kmax`.
pub(crate) struct PoleTable {
    pub levels: Vec<Vec<usize>>,
}

impl Integrand {
    fn ln_real_abs(&self, c: (f64, f64)) -> Option<f64> {
        let mut acc = self.ln_prefactor + self.ln_base.0 * c.0 + self.ln_base.1 * c.1;
        for t in &self.num {
            acc += ln_gamma_signed(t.arg_re(c)).ok()?.0;
        }
        for t in &self.den {
            acc -= ln_gamma_signed(t.arg_re(c)).ok()?.0;
        }
        Some(acc)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.num.iter().chain(&self.den).all(GammaTerm::is_finite) {
            return Err(Error::InvalidParameter("non-finite Gamma coefficient or weight".into()));
        }
        if self.dims == 1 && self.num.iter().chain(&self.den).any(|t| t.weights.1 != 0.0) {
            return Err(Error::InvalidParameter("univariate integrand with a second-variable weight".into()));
        }
        Ok(())
    }

    pub fn pole_table(&self, kmax: usize) -> Result<PoleTable> {
        let mut levels = Vec::with_capacity(self.num.len());
        for (i, term) in self.num.iter().enumerate() {
            let mut mine = Vec::new();
            if term.weights == (0.0, 0.0) {
                if pole_distance(term.coeff) < SAME_PLANE_TOL {
                    return Err(Error::GammaPole(term.coeff));
                }
                levels.push(mine);
                continue;
            }
            for k in 0..=kmax {
                let (mut pos, mut neg, mut den) = (0usize, 0usize, 0usize);
                for other in &self.num {
                    if let Some((_, lambda)) = shared_level(term, k, other) {
                        if lambda > 0.0 {
                            pos += 1;
                        } else {
                            neg += 1;
                        }
                    }
                }
                for other in &self.den {
                    if shared_level(term, k, other).is_some() {
                        den += 1;
                    }
                }
                if pos + neg > den {
                    if pos > 0 && neg > 0 {
                        return Err(Error::PoleCollision(format!(
                            "numerator factor {i} (coefficient {}) has its level-{k} pole shared by factors on opposite sides",
                            term.coeff
                        )));
                    }
                    mine.push(k);
                }
            }
            levels.push(mine);
        }
        Ok(PoleTable { levels })
    }

    /// Every uncancelled pole lies on the side its factor requires.
    fn separates(&self, table: &PoleTable, c: (f64, f64)) -> bool {
        self.num.iter().zip(&table.levels).all(|(t, lv)| match lv.first() {
            Some(&k) => t.arg_re(c) + k as f64 > 0.0,
            None => true,
        })
    }

    fn clear_of_singularities(&self, c: (f64, f64), margin: f64) -> bool {
        self.num.iter().chain(&self.den).all(|t| t.weights == (0.0, 0.0) || pole_distance(t.arg_re(c)) >= margin)
    }

    fn misplaced(&self, table: &PoleTable, c: (f64, f64)) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, (t, lv)) in self.num.iter().zip(&table.levels).enumerate() {
            let a = t.arg_re(c);
            for &k in lv {
                if a + (k as f64) < 0.0 {
                    out.push((i, k));
                }
            }
        }
        out
    }

    /// Half-width of the analyticity strip around the line for axis `axis`.
    fn strip_width(&self, table: &PoleTable, c: (f64, f64), axis: usize) -> f64 {
        let mut d = f64::INFINITY;
        for (t, lv) in self.num.iter().zip(&table.levels) {
            let w = t.weight(axis).abs();
            if w == 0.0 {
                continue;
            }
            let a = t.arg_re(c);
            for &k in lv {
                d = d.min((a + k as f64).abs() / w);
            }
        }
        d
    }

    fn decay_rate(&self, axis: usize) -> f64 {
        let n: f64 = self.num.iter().map(|t| t.weight(axis).abs()).sum();
        let m: f64 = self.den.iter().map(|t| t.weight(axis).abs()).sum();
        0.5 * PI * (n - m)
    }

    fn ln_at(&self, u: Complex64, v: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(self.ln_prefactor, 0.0) + u * self.ln_base.0 + v * self.ln_base.1;
        for t in &self.num {
            acc += ln_gamma_complex(u * t.weights.0 + v * t.weights.1 + t.coeff)?;
        }
        for t in &self.den {
            acc -= ln_gamma_complex(u * t.weights.0 + v * t.weights.1 + t.coeff)?;
        }
        Ok(acc)
    }

    /// Box in which automatic contour placement searches.
    fn search_box(&self) -> [(f64, f64); 2] {
        let mut out = [(-3.0, 3.0); 2];
        for (axis, slot) in out.iter_mut().enumerate().take(self.dims) {
            let anchors: Vec<f64> = self
                .num
                .iter()
                .chain(&self.den)
                .filter(|t| t.weight(axis) != 0.0 && t.weight(1 - axis) == 0.0)
                .map(|t| -t.coeff / t.weight(axis))
                .collect();
            if !anchors.is_empty() {
                let lo = anchors.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = anchors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                *slot = (lo - 3.0, hi + 3.0);
            }
        }
        if self.dims == 1 {
            out[1] = (0.0, 0.0);
        }
        out
    }

    fn kmax_for(&self, bx: &[(f64, f64); 2]) -> usize {
        let mut worst = 0.0f64;
        for t in self.num.iter() {
            for &cu in &[bx[0].0, bx[0].1] {
                for &cv in &[bx[1].0, bx[1].1] {
                    worst = worst.max(-t.arg_re((cu, cv)));
                }
            }
        }
        (worst.ceil() as usize + 2).min(2000)
    }

    /// Grid search for the crossing that minimises the integrand at the real
    /// point, under a margin from all Gamma singularities.
    fn search(&self, table: &PoleTable, bx: &[(f64, f64); 2], require_separation: bool) -> Option<(f64, f64)> {
        let coarse = if self.dims == 1 { 481 } else { 161 };
        for &margin in &MARGINS {
            let admissible = |c: (f64, f64)| {
                self.clear_of_singularities(c, margin) && (!require_separation || self.separates(table, c))
            };
            let score = |c: (f64, f64)| if admissible(c) { self.ln_real_abs(c) } else { None };
            let better = |best: &mut Option<((f64, f64), f64)>, c: (f64, f64)| {
                if let Some(v) = score(c) {
                    if best.map_or(true, |(_, b)| v < b) {
                        *best = Some((c, v));
                    }
                }
            };
            let grid = |lo: f64, hi: f64, n: usize, i: usize| {
                if n == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            };
            let mut best = None;
            let n2 = if self.dims == 1 { 1 } else { coarse };
            for i in 0..coarse {
                for j in 0..n2 {
                    better(&mut best, (grid(bx[0].0, bx[0].1, coarse, i), grid(bx[1].0, bx[1].1, n2, j)));
                }
            }
            let Some((c0, _)) = best else { continue };
            let du = (bx[0].1 - bx[0].0) / (coarse - 1) as f64;
            let dv = if self.dims == 1 { 0.0 } else { (bx[1].1 - bx[1].0) / (coarse - 1) as f64 };
            let fine = 41;
            let fine2 = if self.dims == 1 { 1 } else { fine };
            for i in 0..fine {
                for j in 0..fine2 {
                    let cu = grid(c0.0 - 1.5 * du, c0.0 + 1.5 * du, fine, i);
                    let cv = if self.dims == 1 { 0.0 } else { grid(c0.1 - 1.5 * dv, c0.1 + 1.5 * dv, fine2, j) };
                    better(&mut best, (cu, cv));
                }
            }
            return best.map(|(c, _)| c);
        }
        None
    }

    /// Chooses (or checks) the contour. Returns the crossing point and the list
    /// of misplaced simple poles whose residues must be added back.
    pub fn place(&self, ctr: &ContourSettings, allow_residues: bool) -> Result<(PoleTable, (f64, f64), Vec<(usize, usize)>)> {
        let bx = self.search_box();
        let mut kmax = self.kmax_for(&bx);
        if let Some(c) = ctr.c_offsets {
            let c = if self.dims == 1 { (c.0, 0.0) } else { c };
            for t in &self.num {
                kmax = kmax.max((-t.arg_re(c)).ceil().max(0.0) as usize + 2);
            }
            let table = self.pole_table(kmax)?;
            if !self.clear_of_singularities(c, 1e-6) {
                return Err(Error::ContourFailure(format!("contour crossing {c:?} sits on a Gamma singularity")));
            }
            let bad = self.misplaced(&table, c);
            if !bad.is_empty() && !allow_residues {
                return Err(Error::ContourFailure(format!(
                    "contour crossing {c:?} leaves {} pole(s) on the wrong side",
                    bad.len()
                )));
            }
            return Ok((table, c, bad));
        }
        let table = self.pole_table(kmax)?;
        if let Some(c) = self.search(&table, &bx, true) {
            return Ok((table, c, Vec::new()));
        }
        if !allow_residues {
            return Err(Error::ContourFailure("no straight contour separates the pole families".into()));
        }
        let c = self
            .search(&table, &bx, false)
            .ok_or_else(|| Error::ContourFailure("no admissible contour crossing found".into()))?;
        let bad = self.misplaced(&table, c);
        Ok((table, c, bad))
    }

    /// Sum of residues at misplaced simple poles (univariate only).
    pub fn residue_correction(&self, poles: &[(usize, usize)]) -> Result<f64> {
        let mut total = 0.0;
        for &(i, k) in poles {
            let t = &self.num[i];
            let w = t.weights.0;
            let s = (-(k as f64) - t.coeff) / w;
            let c = (s, 0.0);
            let mut ln_mag = self.ln_prefactor + self.ln_base.0 * s - crate::special::gamma::ln_gamma(k as f64 + 1.0) - w.abs().ln();
            let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for (j, other) in self.num.iter().enumerate() {
                if j == i {
                    continue;
                }
                let a = other.arg_re(c);
                if pole_distance(a) < 1e-9 {
                    return Err(Error::ContourFailure(format!("misplaced pole at {s} is not simple")));
                }
                let (lg, sg) = ln_gamma_signed(a)?;
                ln_mag += lg;
                sign *= sg;
            }
            for other in &self.den {
                let a = other.arg_re(c);
                if pole_distance(a) < 1e-9 {
                    return Err(Error::ContourFailure(format!("misplaced pole at {s} meets a denominator zero")));
                }
                let (lg, sg) = ln_gamma_signed(a)?;
                ln_mag -= lg;
                sign *= sg;
            }
            total += sign * ln_mag.exp();
        }
        Ok(total)
    }

    /// Half-length per axis: the decay-scale guess, stretched until the
    /// integrand at the ends has fallen `truncation` below its peak.
    fn half_lengths(&self, c: (f64, f64), ctr: &ContourSettings) -> Result<(f64, f64)> {
        let mut out = [0.0f64; 2];
        for axis in 0..self.dims {
            let rate = self.decay_rate(axis);
            if !(rate > 1e-12) {
                return Err(Error::ContourFailure(format!(
                    "integrand has no exponential decay along contour {axis}"
                )));
            }
            let at = |t: f64| -> f64 {
                let (u, v) = if axis == 0 {
                    (Complex64::new(c.0, t), Complex64::new(c.1, 0.0))
                } else {
                    (Complex64::new(c.0, 0.0), Complex64::new(c.1, t))
                };
                self.ln_at(u, v).map(|z| z.re).unwrap_or(f64::NEG_INFINITY)
            };
            let mut tend = ctr.truncation / rate;
            let mut peak = f64::NEG_INFINITY;
            let mut scanned = 0.0;
            loop {
                let samples = 64;
                for s in 0..=samples {
                    let t = scanned + (tend - scanned) * s as f64 / samples as f64;
                    peak = peak.max(at(t)).max(at(-t));
                }
                scanned = tend;
                let edge = at(tend).max(at(-tend));
                if edge < peak - ctr.truncation {
                    break;
                }
                tend *= 1.25;
                if tend > MAX_HALF_LENGTH {
                    return Err(Error::ContourFailure(format!("integrand does not decay along contour {axis}")));
                }
            }
            out[axis] = tend;
        }
        Ok((out[0], out[1]))
    }

    /// Evaluates (1/(2πi))^d ∫ over the placed contour(s).
    pub fn integrate(&self, table: &PoleTable, c: (f64, f64), ctr: &ContourSettings) -> Result<ContourEstimate> {
        let (mut t1, mut t2) = self.half_lengths(c, ctr)?;
        let h1 = (t1 / ctr.nodes as f64).min(2.0 * PI * self.strip_width(table, c, 0).min(1.0) / 36.0);
        let h2 = if self.dims == 2 {
            (t2 / ctr.nodes as f64).min(2.0 * PI * self.strip_width(table, c, 1).min(1.0) / 36.0)
        } else {
            0.0
        };
        if !(h1 > 0.0) || (self.dims == 2 && !(h2 > 0.0)) {
            return Err(Error::ContourFailure("contour touches a pole".into()));
        }
        let mut evaluations = 0;
        for doubling in 0..MAX_DOUBLINGS {
            let n1 = (t1 / h1).ceil() as i64;
            let n2 = if self.dims == 2 { (t2 / h2).ceil() as i64 } else { 0 };
            let pass = if self.dims == 1 { self.pass_1d(c, h1, n1)? } else { self.pass_2d(c, (h1, h2), (n1, n2))? };
            evaluations += pass.evaluations;
            let tol = ctr.abs_tol.max(ctr.rel_tol * pass.full.abs()).max(64.0 * f64::EPSILON * pass.abs_integral);
            let err = (pass.full - pass.inner).abs();
            if err <= tol {
                let res_tol = tol.max(1e3 * f64::EPSILON * pass.abs_integral);
                if pass.imag_residual > res_tol {
                    return Err(Error::ContourFailure(format!(
                        "imaginary residual {:e} exceeds tolerance {res_tol:e}",
                        pass.imag_residual
                    )));
                }
                return Ok(ContourEstimate {
                    value: pass.full,
                    error_estimate: err,
                    imag_residual: pass.imag_residual,
                    abs_integral: pass.abs_integral,
                    contour: c,
                    truncation: (2.0 * t1, if self.dims == 2 { 2.0 * t2 } else { 0.0 }),
                    steps: (h1, h2),
                    doublings: doubling,
                    residue_corrections: 0,
                    evaluations,
                });
            }
            t1 *= 2.0;
            t2 *= 2.0;
        }
        Err(Error::ContourFailure(format!(
            "truncation did not converge after {MAX_DOUBLINGS} doublings"
        )))
    }

    /// Trapezoid over [-2T, 2T] and its inner half [-T, T] in a single sweep.
    fn pass_1d(&self, c: (f64, f64), h: f64, n: i64) -> Result<Pass> {
        let logs: Vec<Complex64> = (-2 * n..=2 * n)
            .into_par_iter()
            .map(|i| self.ln_at(Complex64::new(c.0, h * i as f64), Complex64::new(0.0, 0.0)))
            .collect::<Result<_>>()?;
        let m = logs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let mut full = Complex64::new(0.0, 0.0);
        let mut inner = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (idx, z) in logs.iter().enumerate() {
            let i = idx as i64 - 2 * n;
            let f = (z - m).exp();
            full += f;
            abs += f.norm();
            if i.abs() <= n {
                inner += f;
            }
        }
        let scale = m.exp() * h / (2.0 * PI);
        Ok(Pass {
            full: full.re * scale,
            inner: inner.re * scale,
            imag_residual: (full.im * scale).abs(),
            abs_integral: abs * scale,
            evaluations: logs.len(),
        })
    }

    fn pass_2d(&self, c: (f64, f64), h: (f64, f64), n: (i64, i64)) -> Result<Pass> {
        let only = |axis: usize, t: &GammaTerm| t.weight(axis) != 0.0 && t.weight(1 - axis) == 0.0;
        let mixed = |t: &GammaTerm| t.weights.0 != 0.0 && t.weights.1 != 0.0;
        let constant = |t: &GammaTerm| t.weights == (0.0, 0.0);

        let line = |axis: usize, z: Complex64| -> Result<Complex64> {
            let mut acc = z * if axis == 0 { self.ln_base.0 } else { self.ln_base.1 };
            for t in self.num.iter().filter(|t| only(axis, t)) {
                acc += ln_gamma_complex(z * t.weight(axis) + t.coeff)?;
            }
            for t in self.den.iter().filter(|t| only(axis, t)) {
                acc -= ln_gamma_complex(z * t.weight(axis) + t.coeff)?;
            }
            Ok(acc)
        };
        let mut base = self.ln_prefactor;
        for t in self.num.iter().filter(|t| constant(t)) {
            base += ln_gamma_signed(t.coeff)?.0;
        }
        for t in self.den.iter().filter(|t| constant(t)) {
            base -= ln_gamma_signed(t.coeff)?.0;
        }
        let sign = self
            .num
            .iter()
            .chain(&self.den)
            .filter(|t| constant(t))
            .map(|t| ln_gamma_signed(t.coeff).map(|x| x.1))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .product::<f64>();

        let us: Vec<Complex64> = (-2 * n.0..=2 * n.0).map(|i| Complex64::new(c.0, h.0 * i as f64)).collect();
        let vs: Vec<Complex64> = (0..=2 * n.1).map(|j| Complex64::new(c.1, h.1 * j as f64)).collect();
        let a: Vec<Complex64> = us.par_iter().map(|&u| line(0, u)).collect::<Result<_>>()?;
        let b: Vec<Complex64> = vs.par_iter().map(|&v| line(1, v)).collect::<Result<_>>()?;
        let joint_num: Vec<&GammaTerm> = self.num.iter().filter(|t| mixed(t)).collect();
        let joint_den: Vec<&GammaTerm> = self.den.iter().filter(|t| mixed(t)).collect();

        struct Row {
            m: f64,
            full: Complex64,
            inner: Complex64,
            abs: f64,
        }
        let rows: Vec<Row> = (0..vs.len())
            .into_par_iter()
            .map(|j| -> Result<Row> {
                let v = vs[j];
                let mut logs = Vec::with_capacity(us.len());
                for (i, &u) in us.iter().enumerate() {
                    let mut z = a[i] + b[j];
                    for t in &joint_num {
                        z += ln_gamma_complex(u * t.weights.0 + v * t.weights.1 + t.coeff)?;
                    }
                    for t in &joint_den {
                        z -= ln_gamma_complex(u * t.weights.0 + v * t.weights.1 + t.coeff)?;
                    }
                    logs.push(z);
                }
                let m = logs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                let mut full = Complex64::new(0.0, 0.0);
                let mut inner = Complex64::new(0.0, 0.0);
                let mut abs = 0.0;
                for (i, z) in logs.iter().enumerate() {
                    let f = (z - m).exp();
                    full += f;
                    abs += f.norm();
                    if (i as i64 - 2 * n.0).abs() <= n.0 {
                        inner += f;
                    }
                }
                // t₂ = 0 carries half weight on the half plane
                let w = if j == 0 { 0.5 } else { 1.0 };
                let inner = if j as i64 <= n.1 { inner * w } else { Complex64::new(0.0, 0.0) };
                Ok(Row { m, full: full * w, inner, abs: abs * w })
            })
            .collect::<Result<_>>()?;

        let m = rows.iter().map(|r| r.m).fold(f64::NEG_INFINITY, f64::max);
        let mut full = Complex64::new(0.0, 0.0);
        let mut inner = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for r in &rows {
            let s = (r.m - m).exp();
            full += r.full * s;
            inner += r.inner * s;
            abs += r.abs * s;
        }
        // conjugate symmetry: the lower half plane contributes the conjugate
        let scale = (base + m).exp() * h.0 * h.1 / (4.0 * PI * PI);
        let row0 = rows[0].full * 2.0 * (rows[0].m - m).exp();
        Ok(Pass {
            full: sign * 2.0 * full.re * scale,
            inner: sign * 2.0 * inner.re * scale,
            imag_residual: (row0.im * scale).abs(),
            abs_integral: 2.0 * abs * scale,
            evaluations: us.len() * vs.len(),
        })
    }
}

struct Pass {
    full: f64,
    inner: f64,
    imag_residual: f64,
    abs_integral: f64,
    evaluations: usize,
}
