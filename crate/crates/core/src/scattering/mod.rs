//! Jost solutions, scattering matrix, small-k data, Case classification and the
//! interpolated reflection data on the real axis.

mod jost;
mod spectrum;

pub use jost::{a1_imaginary, det, inverse, jost_at_origin, mul, n_minus, n_plus, scattering_matrix_at, Mat2, Potential};
pub use spectrum::{CaseTag, PureStepSpectrum, SmallK, SolitonSpectrum, Spectrum, SyntheticCaseII};

use crate::interp::CubicSpline;
use crate::ode::OdeOptions;
use crate::profiles::InitialProfile;
use crate::special::find_imag_axis_zero;
use crate::{Error, Result, C64};
use jost::{mirror_conj, q_left};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const CACHE_SCHEMA: &str = "nnls-spectral-cache/1";

/// Log-spaced |k| nodes on both signs plus optional refinement points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub per_sign: usize,
    #[serde(default)]
    pub refine: Vec<f64>,
}

impl Default for KGrid {
    fn default() -> Self {
        Self { k_min: 1e-3, k_max: 1e2, per_sign: 400, refine: Vec::new() }
    }
}

impl KGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_min > 0.0 && self.k_max > self.k_min && self.per_sign >= 8) {
            return Err(Error::Invalid(format!("bad k-grid {self:?}")));
        }
        Ok(())
    }

    /// Sorted nodes, negative side first; 0 is never a node.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.per_sign;
        let (lo, hi) = (self.k_min.ln(), self.k_max.ln());
        let mut mags: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect();
        mags.extend(self.refine.iter().map(|k| k.abs()).filter(|&k| k >= self.k_min && k <= self.k_max));
        mags.sort_by(f64::total_cmp);
        mags.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
        let mut out: Vec<f64> = mags.iter().rev().map(|k| -k).collect();
        out.extend(mags);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterOptions {
    pub ode: OdeOptionsSer,
    /// ε_case = case_eps · max(1, A).
    pub case_eps: f64,
    pub bracket: (f64, f64),
    pub extrapolation_gap: f64,
    pub reflectionless_tol: f64,
    pub assumption2_tol: f64,
    pub v_route_nodes: usize,
}

/// Serializable mirror of the ODE tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeOptionsSer {
    pub rtol: f64,
    pub atol: f64,
}

impl From<OdeOptionsSer> for OdeOptions {
    fn from(o: OdeOptionsSer) -> Self {
        OdeOptions { rtol: o.rtol, atol: o.atol, ..OdeOptions::default() }
    }
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptionsSer { rtol: 1e-11, atol: 1e-13 },
            case_eps: 1e-6,
            bracket: (1e-3, 1e3),
            extrapolation_gap: 1e-3,
            reflectionless_tol: 1e-8,
            assumption2_tol: 1e-2,
            v_route_nodes: 20_000,
        }
    }
}

/// Samples of a₁, a₂, b on the k-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSamples {
    pub k: Vec<f64>,
    pub a1: Vec<C64>,
    pub a2: Vec<C64>,
    pub b: Vec<C64>,
}

/// S(k) on every node (evaluated in parallel); a₁ = S₁₁, b = S₂₁, a₂ = S₂₂.
pub fn scattering_matrix<P: Potential>(p: &P, nodes: &[f64], opts: &OdeOptions) -> Result<SpectralSamples> {
    if nodes.iter().any(|&k| k == 0.0) {
        return Err(Error::Domain("k = 0 is not allowed on the grid".into()));
    }
    let mats: Vec<Mat2> = nodes.par_iter().map(|&k| scattering_matrix_at(p, k, opts)).collect::<Result<_>>()?;
    Ok(SpectralSamples {
        k: nodes.to_vec(),
        a1: mats.iter().map(|m| m[0][0]).collect(),
        a2: mats.iter().map(|m| m[1][1]).collect(),
        b: mats.iter().map(|m| m[1][0]).collect(),
    })
}

/// a₂(0) = 4(|v₂(0)|² − |v₁(0)|²)/A² from the k = 0 Volterra system
/// v₂ = −iA/2 − ∫ conj q₀(−y) v₁, v₁ = ∫ q₀ v₂, solved by Picard iteration with the
/// trapezoid rule on n and 2n nodes and Richardson-extrapolated.
pub fn a2_zero_v_route<P: Potential + ?Sized>(p: &P, n: usize) -> Result<f64> {
    let coarse = v_route(p, n)?;
    let fine = v_route(p, 2 * n)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn v_route<P: Potential + ?Sized>(p: &P, n: usize) -> Result<f64> {
    let a = p.amplitude();
    let r = p.radius();
    let h = r / n as f64;
    let ys: Vec<f64> = (0..=n).map(|j| if j == n { 0.0 } else { -r + j as f64 * h }).collect();
    let q: Vec<C64> = ys.iter().map(|&y| q_left(p, y)).collect();
    let pb: Vec<C64> = ys.iter().map(|&y| mirror_conj(p, y)).collect();
    let v2_inf = C64::new(0.0, -a / 2.0);
    let mut v2 = vec![v2_inf; n + 1];
    let mut v1 = vec![C64::new(0.0, 0.0); n + 1];
    for _ in 0..2000 {
        cumtrapz(&q, &v2, h, &mut v1);
        let mut next = vec![C64::new(0.0, 0.0); n + 1];
        cumtrapz(&pb, &v1, h, &mut next);
        let mut change = 0.0f64;
        for j in 0..=n {
            let v = v2_inf - next[j];
            change = change.max((v - v2[j]).norm());
            v2[j] = v;
        }
        if change <= 1e-15 * a.max(1.0) {
            cumtrapz(&q, &v2, h, &mut v1);
            return Ok(4.0 * (v2[n].norm_sqr() - v1[n].norm_sqr()) / (a * a));
        }
    }
    Err(Error::Diagnostics("v-route Picard iteration did not converge".into()))
}

fn cumtrapz(w: &[C64], v: &[C64], h: f64, out: &mut [C64]) {
    out[0] = C64::new(0.0, 0.0);
    for j in 1..w.len() {
        out[j] = out[j - 1] + (w[j - 1] * v[j - 1] + w[j] * v[j]) * (0.5 * h);
    }
}

/// Polynomial interpolation through (x_i, y_i) evaluated at x0 (Neville).
pub fn neville(xs: &[f64], ys: &[C64], x0: f64) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// Extrapolation to k = 0 from the `per_sign` smallest nodes of each sign.
fn extrapolate_to_zero(k: &[f64], f: &[C64], per_sign: usize) -> C64 {
    let mut idx: Vec<usize> = (0..k.len()).collect();
    idx.sort_by(|&i, &j| k[i].abs().total_cmp(&k[j].abs()));
    let neg: Vec<usize> = idx.iter().copied().filter(|&i| k[i] < 0.0).take(per_sign).collect();
    let pos: Vec<usize> = idx.iter().copied().filter(|&i| k[i] > 0.0).take(per_sign).collect();
    let sel: Vec<usize> = neg.into_iter().chain(pos).collect();
    let xs: Vec<f64> = sel.iter().map(|&i| k[i]).collect();
    let ys: Vec<C64> = sel.iter().map(|&i| f[i]).collect();
    neville(&xs, &ys, 0.0)
}

fn consistent(a: C64, b: C64, gap: f64) -> bool {
    (a - b).norm() <= gap * a.norm().max(b.norm()).max(1e-300)
}

/// Case I if |a₂(0)| > ε_case; otherwise Case II, which requires a₁₁a₂₁ real and positive.
pub fn classify_case(a2_zero: f64, case_eps: f64, amplitude: f64, case_two: Option<(C64, C64)>) -> Result<CaseTag> {
    if a2_zero.abs() > case_eps * amplitude.max(1.0) {
        return Ok(CaseTag::CaseI);
    }
    let (a11, a21) = case_two.ok_or_else(|| Error::Diagnostics("Case II needs a11 and a21".into()))?;
    let prod = a11 * a21;
    if a11.norm() == 0.0 || a21.norm() == 0.0 || prod.re <= 0.0 || prod.im.abs() > 1e-6 * prod.norm() {
        return Err(Error::Assumption2(format!("{prod}")));
    }
    Ok(CaseTag::CaseII)
}

/// Small-k data: a₂(0) by the v-route (cross-checked against the grid) in Case I,
/// a₁₁, a₂₁, b(0) by polynomial extrapolation of the grid samples in Case II.
pub fn small_k_data<P: Potential + ?Sized>(p: &P, s: &SpectralSamples, opts: &ScatterOptions) -> Result<SmallK> {
    let a = p.amplitude();
    let a2_zero = a2_zero_v_route(p, opts.v_route_nodes)?;
    if a2_zero.abs() > opts.case_eps * a.max(1.0) {
        let from_grid = extrapolate_to_zero(&s.k, &s.a2, 3);
        if !consistent(C64::from(a2_zero), from_grid, opts.extrapolation_gap) {
            return Err(Error::Diagnostics(format!(
                "a2(0): v-route {a2_zero} vs grid extrapolation {from_grid}"
            )));
        }
        classify_case(a2_zero, opts.case_eps, a, None)?;
        return Ok(SmallK::CaseI { a2_zero });
    }
    let ka1: Vec<C64> = s.k.iter().zip(&s.a1).map(|(k, v)| v * k).collect();
    let a2k: Vec<C64> = s.k.iter().zip(&s.a2).map(|(k, v)| v / k).collect();
    let a11 = extrapolate_to_zero(&s.k, &ka1, 3);
    let a21 = extrapolate_to_zero(&s.k, &a2k, 3);
    let b0 = extrapolate_to_zero(&s.k, &s.b, 3);
    for (name, hi, lo) in [
        ("a11", a11, extrapolate_to_zero(&s.k, &ka1, 2)),
        ("a21", a21, extrapolate_to_zero(&s.k, &a2k, 2)),
    ] {
        if !consistent(hi, lo, opts.extrapolation_gap) {
            return Err(Error::Diagnostics(format!("{name}: inconsistent extrapolations {hi} vs {lo}")));
        }
    }
    classify_case(a2_zero, opts.case_eps, a, Some((a11, a21)))?;
    Ok(SmallK::CaseII { a11, a21, b0 })
}

/// k₁ > 0 with a₁(ik₁) = 0.
pub fn locate_k1<P: Potential + ?Sized>(p: &P, opts: &ScatterOptions) -> Result<f64> {
    let a = p.amplitude();
    let ode: OdeOptions = opts.ode.into();
    find_imag_axis_zero(|rho| a1_imaginary(p, rho, &ode), (opts.bracket.0 * a, opts.bracket.1 * a))
}

/// Interpolated representation on one sign of k.
#[derive(Debug, Clone)]
struct Side {
    sign: f64,
    /// |k| nodes, increasing.
    mags: Vec<f64>,
    g: CubicSpline,
    rho: CubicSpline,
    l_far: C64,
    r1_far: C64,
}

#[derive(Debug, Clone)]
struct Interpolants {
    neg: Side,
    pos: Side,
    g0: C64,
    rho0: C64,
}

/// Spectral data computed from an initial profile; immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpectralCache", into = "SpectralCache")]
pub struct SpectralData {
    pub amplitude: f64,
    pub samples: SpectralSamples,
    pub k1: f64,
    pub small_k: SmallK,
    pub case: CaseTag,
    pub reflectionless: bool,
    /// lim arg(1 + r₁r₂) as k → 0⁻ on the continuous branch.
    pub assumption2: f64,
    pub fingerprint: String,
    interp: Interpolants,
}

/// On-disk form of [`SpectralData`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralCache {
    pub schema: String,
    pub amplitude: f64,
    pub k: Vec<f64>,
    pub a1: Vec<C64>,
    pub a2: Vec<C64>,
    pub b: Vec<C64>,
    pub k1: f64,
    pub small_k: SmallK,
    pub case: CaseTag,
    pub fingerprint: String,
}

impl From<SpectralData> for SpectralCache {
    fn from(sd: SpectralData) -> Self {
        SpectralCache {
            schema: CACHE_SCHEMA.to_string(),
            amplitude: sd.amplitude,
            k: sd.samples.k,
            a1: sd.samples.a1,
            a2: sd.samples.a2,
            b: sd.samples.b,
            k1: sd.k1,
            small_k: sd.small_k,
            case: sd.case,
            fingerprint: sd.fingerprint,
        }
    }
}

impl TryFrom<SpectralCache> for SpectralData {
    type Error = Error;
    fn try_from(c: SpectralCache) -> Result<Self> {
        if c.schema != CACHE_SCHEMA {
            return Err(Error::Invalid(format!("unsupported cache schema {}", c.schema)));
        }
        if c.small_k.case() != c.case {
            return Err(Error::Invalid("cache case tag disagrees with small-k data".into()));
        }
        let samples = SpectralSamples { k: c.k, a1: c.a1, a2: c.a2, b: c.b };
        SpectralData::from_parts(c.amplitude, samples, c.k1, c.small_k, c.fingerprint, &ScatterOptions::default())
    }
}

impl SpectralData {
    /// Full pipeline: samples on the grid, small-k data, k₁, interpolants.
    pub fn compute(p: &InitialProfile, grid: &KGrid, opts: &ScatterOptions) -> Result<Self> {
        p.validate()?;
        grid.validate()?;
        let ode: OdeOptions = opts.ode.into();
        let samples = scattering_matrix(p, &grid.nodes(), &ode)?;
        let small_k = small_k_data(p, &samples, opts)?;
        let k1 = locate_k1(p, opts)?;
        Self::from_parts(p.amplitude, samples, k1, small_k, p.fingerprint(), opts)
    }

    pub fn from_parts(
        amplitude: f64,
        samples: SpectralSamples,
        k1: f64,
        small_k: SmallK,
        fingerprint: String,
        opts: &ScatterOptions,
    ) -> Result<Self> {
        let n = samples.k.len();
        if samples.a1.len() != n || samples.a2.len() != n || samples.b.len() != n {
            return Err(Error::Invalid("sample vectors have different lengths".into()));
        }
        if !samples.k.windows(2).all(|w| w[1] > w[0]) || samples.k.iter().any(|&k| k == 0.0) {
            return Err(Error::Invalid("k-grid must be increasing and exclude 0".into()));
        }
        let max_b = samples.b.iter().fold(0.0f64, |m, b| m.max(b.norm()));
        let reflectionless = max_b < opts.reflectionless_tol;
        let case = small_k.case();
        let (interp, assumption2) = build_interpolants(amplitude, &samples, &small_k, reflectionless)?;
        Ok(Self { amplitude, samples, k1, small_k, case, reflectionless, assumption2, fingerprint, interp })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))
    }

    /// True when |assumption2| is within the tolerance that enables the asymptotics.
    pub fn assumption2_ok(&self, tol: f64) -> bool {
        self.assumption2.abs() <= tol
    }
}

/// The limit lim_{k→0⁻} arg(1 + r₁r₂) on the continuous branch.
pub fn check_assumption2(sd: &SpectralData) -> f64 {
    sd.assumption2
}

/// (r₁, r₂, 1 + r₁r₂) at k from the interpolated data.
pub fn reflection_coefficients<S: Spectrum + ?Sized>(sd: &S, k: f64) -> Result<(C64, C64, C64)> {
    sd.reflection(k)
}

fn build_interpolants(
    amplitude: f64,
    s: &SpectralSamples,
    small_k: &SmallK,
    reflectionless: bool,
) -> Result<(Interpolants, f64)> {
    let case = small_k.case();
    let g0 = match *small_k {
        SmallK::CaseI { a2_zero } => C64::from((4.0 / (amplitude * amplitude * a2_zero * a2_zero)).ln()),
        // a₁₁a₂₁ is real and positive; drop the rounding-level imaginary part
        SmallK::CaseII { a11, a21, .. } => C64::from(-(a11 * a21).norm().ln()),
    };
    let rho0 = match *small_k {
        SmallK::CaseI { .. } => C64::new(0.0, -2.0 / amplitude),
        SmallK::CaseII { a11, b0, .. } => b0 / a11,
    };
    let mut sides = Vec::new();
    let mut a2_limit = 0.0;
    for sign in [-1.0, 1.0] {
        let mut idx: Vec<usize> = (0..s.k.len()).filter(|&i| s.k[i] * sign > 0.0).collect();
        if idx.len() < 4 {
            return Err(Error::Invalid("need at least four nodes on each sign of k".into()));
        }
        idx.sort_by(|&i, &j| s.k[i].abs().total_cmp(&s.k[j].abs()));
        let mags: Vec<f64> = idx.iter().map(|&i| s.k[i].abs()).collect();
        // unwrap from the far end towards 0
        let mut l = vec![C64::new(0.0, 0.0); idx.len()];
        let mut prev: Option<f64> = None;
        for (m, &i) in idx.iter().enumerate().rev() {
            let raw = if reflectionless { C64::new(0.0, 0.0) } else { -(s.a1[i] * s.a2[i]).ln() };
            let mut im = raw.im;
            if let Some(p) = prev {
                im += 2.0 * PI * ((p - im) / (2.0 * PI)).round();
                if (im - p).abs() > PI / 2.0 {
                    return Err(Error::Branch(s.k[i]));
                }
            }
            prev = Some(im);
            l[m] = C64::new(raw.re, im);
        }
        let g: Vec<C64> = match case {
            CaseTag::CaseI => l.iter().zip(&mags).map(|(v, k)| v - (k * k).ln()).collect(),
            CaseTag::CaseII => l.clone(),
        };
        let rho: Vec<C64> = idx
            .iter()
            .map(|&i| if reflectionless { C64::new(0.0, 0.0) } else { s.b[i] / s.a1[i] / s.k[i] })
            .collect();
        if sign < 0.0 {
            let ks: Vec<f64> = mags[..3].iter().map(|m| -m).collect();
            a2_limit = crate::scattering::neville(&ks, &g[..3], 0.0).im;
        }
        let u: Vec<f64> = mags.iter().map(|k| k.ln()).collect();
        let last = idx.len() - 1;
        let r1_far = rho[last] * (sign * mags[last]);
        sides.push(Side {
            sign,
            mags,
            g: CubicSpline::new(u.clone(), g),
            rho: CubicSpline::new(u, rho),
            l_far: l[last],
            r1_far,
        });
    }
    let pos = sides.pop().expect("two sides");
    let neg = sides.pop().expect("two sides");
    let rho0 = if reflectionless { C64::new(0.0, 0.0) } else { rho0 };
    Ok((Interpolants { neg, pos, g0, rho0 }, a2_limit))
}

/// Quadratic through (0, f0), (k_a, f_a), (k_b, f_b): value and derivative at k.
fn near_zero(k: f64, f0: C64, ka: f64, fa: C64, kb: f64, fb: C64) -> (C64, C64) {
    let c1 = (fa - f0) / ka;
    let c2 = ((fb - f0) / kb - c1) / (kb - ka);
    // f = f0 + c1 k + c2 k (k − ka)
    (f0 + c1 * k + c2 * k * (k - ka), c1 + c2 * (2.0 * k - ka))
}

impl Side {
    fn in_range(&self, m: f64) -> bool {
        m >= self.mags[0] && m <= *self.mags.last().expect("nonempty")
    }
}

impl Interpolants {
    fn side(&self, k: f64) -> &Side {
        if k < 0.0 {
            &self.neg
        } else {
            &self.pos
        }
    }
}

impl Spectrum for SpectralData {
    fn amplitude(&self) -> f64 {
        self.amplitude
    }
    fn small_k(&self) -> SmallK {
        self.small_k
    }
    fn k1(&self) -> f64 {
        self.k1
    }
    fn is_reflectionless(&self) -> bool {
        self.reflectionless
    }

    fn regular_weight_at_zero(&self) -> C64 {
        self.interp.g0
    }

    fn assumption2(&self) -> f64 {
        self.assumption2
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = [&self.interp.neg, &self.interp.pos]
            .iter()
            .flat_map(|s| [s.mags[0], *s.mags.last().expect("nonempty")])
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn regular_weight(&self, k: f64) -> (C64, C64) {
        let case_one = self.case == CaseTag::CaseI;
        if self.reflectionless {
            return if case_one {
                (C64::from(-(k * k).ln()), C64::from(-2.0 / k))
            } else {
                (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
            };
        }
        let side = self.interp.side(k);
        let m = k.abs();
        if side.in_range(m) {
            let (g, dg) = side.g.eval_with_derivative(m.ln());
            return (g, dg / k);
        }
        if m < side.mags[0] {
            let ys = side.g.ys();
            return near_zero(k, self.interp.g0, side.sign * side.mags[0], ys[0], side.sign * side.mags[1], ys[1]);
        }
        let kmax = *side.mags.last().expect("nonempty");
        let l = side.l_far * (kmax / m).powi(2);
        let dl = -2.0 * l / k;
        if case_one {
            (l - (k * k).ln(), dl - 2.0 / k)
        } else {
            (l, dl)
        }
    }

    fn r1(&self, k: f64) -> C64 {
        if self.reflectionless {
            return C64::new(0.0, 0.0);
        }
        let side = self.interp.side(k);
        let m = k.abs();
        if side.in_range(m) {
            return side.rho.eval(m.ln()) * k;
        }
        if m < side.mags[0] {
            let ys = side.rho.ys();
            let (rho, _) = near_zero(k, self.interp.rho0, side.sign * side.mags[0], ys[0], side.sign * side.mags[1], ys[1]);
            return rho * k;
        }
        let kmax = *side.mags.last().expect("nonempty");
        side.r1_far * (kmax / m)
    }
}
