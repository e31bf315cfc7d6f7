//! The scalar phase functionals δ(0,ξ), ν̂(−s,t) and χ̂(z,s,t) built from
//! L(k) = ln(1 + r₁(k)r₂(k)), by direct quadrature and by their small-ξ expansions.
//!
//! All integrals over k ∈ (−∞, −ξ) are taken in the variable v = ln(−k), where the
//! logarithmic behaviour of L near k = 0 (Case I) becomes linear in v.

use crate::scattering::{CaseTag, SmallK, Spectrum};
use crate::special::{dilog, quad, Endpoint, QuadratureSpec};
use crate::{Error, Result, C64, I};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Range of s where the expansions are uniform.
pub const WORKING_BAND: (f64, f64) = (0.05, 20.0);

/// Largest |lim arg(1 + r₁r₂)| at k → 0⁻ accepted by the expansions.
pub const ASSUMPTION2_TOL: f64 = 1e-2;

/// Wedge scaling for a point (α, s, t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub alpha: f64,
    pub s: f64,
    pub t: f64,
    /// ℓ = ln(4st).
    pub log4st: f64,
    /// x = (4st)^{1/(2−α)}.
    pub x: f64,
    /// ε = x^{α−1}.
    pub eps: f64,
    /// ξ = s·ε.
    pub xi: f64,
}

impl Scaling {
    pub fn new(alpha: f64, s: f64, t: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if !(s > 0.0 && s.is_finite() && t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("need s > 0 and t > 0, got s={s}, t={t}")));
        }
        let log4st = (4.0 * s * t).ln();
        let lnx = log4st / (2.0 - alpha);
        let ln_eps = (alpha - 1.0) * lnx;
        Ok(Self { alpha, s, t, log4st, x: lnx.exp(), eps: ln_eps.exp(), xi: s * ln_eps.exp() })
    }

    /// ln ε = −β ℓ with β = (1−α)/(2−α).
    pub fn ln_eps(&self) -> f64 {
        (self.alpha - 1.0) / (2.0 - self.alpha) * self.log4st
    }
}

/// O(t^p ln^q t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorOrder {
    pub t_exponent: f64,
    pub log_power: f64,
}

impl ErrorOrder {
    pub fn new(t_exponent: f64, log_power: f64) -> Self {
        Self { t_exponent, log_power }
    }

    pub fn exact() -> Self {
        Self { t_exponent: f64::NEG_INFINITY, log_power: 0.0 }
    }

    pub fn magnitude(&self, t: f64) -> f64 {
        t.powf(self.t_exponent) * t.ln().powf(self.log_power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    DirectQuadrature,
    AsymptoticExpansion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFunctionalResult {
    pub nu_hat: C64,
    pub chi_zero: C64,
    pub chi_minus_s: C64,
    /// χ̂₀(s) in Case I, χ̂₁ in Case II.
    pub chi_const: C64,
    /// χ̂_{−s}(s) = χ̂₀(s) + iπ/6 in Case I; equal to `chi_const` in Case II.
    pub chi_const_minus_s: C64,
    /// Re χ̂(z) for large t, = ½ ln(Q/A).
    pub re_chi_plateau: f64,
    pub method: Method,
    pub error_order: ErrorOrder,
    /// Sum of quadrature error estimates (zero for expansions).
    pub quadrature_error: f64,
    pub out_of_band: bool,
}

pub fn quad_spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-11, max_subdivisions: 20_000, endpoint: Endpoint::None }
}

/// ∫_lo^hi f(v) dv, split at the given breakpoints; `log_left` flags a log singularity at lo.
fn integrate(f: &dyn Fn(f64) -> C64, lo: f64, hi: f64, log_left: bool, breaks: &[f64]) -> Result<(C64, f64)> {
    let mut pts = vec![lo];
    if log_left && lo.is_finite() {
        pts.push(lo + 1.0);
    }
    for &b in breaks {
        if b > *pts.last().expect("nonempty") + 1e-9 && b < hi - 1e-9 {
            pts.push(b);
        }
    }
    pts.push(hi);
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    for (i, w) in pts.windows(2).enumerate() {
        let mut spec = quad_spec();
        if i == 0 && log_left {
            spec.endpoint = Endpoint::LogAtLeftEnd;
        }
        // every integrand here decays at both ends of the v-axis; e^v over/underflows first
        let g = |v: f64| if v.abs() > 300.0 { C64::new(0.0, 0.0) } else { f(v) };
        let r = quad(g, w[0], w[1], &spec)?;
        value += r.value;
        error += r.error;
    }
    Ok((value, error))
}

fn v_breaks<S: Spectrum + ?Sized>(sd: &S) -> Vec<f64> {
    let mut b: Vec<f64> = sd.breakpoints().iter().map(|k| k.ln()).collect();
    b.push(0.0);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// k·L'(k) = dL/d(ln|k|).
fn dl_dv<S: Spectrum + ?Sized>(sd: &S, k: f64) -> C64 {
    sd.log_weight(k).1 * k
}

/// k·G'(k).
fn dg_dv<S: Spectrum + ?Sized>(sd: &S, k: f64) -> C64 {
    sd.regular_weight(k).1 * k
}

/// ln(e^v + c) for c ≥ −e^v, accurate when e^v + c is small.
fn ln_shifted(v: f64, c: f64) -> f64 {
    if c >= 0.0 {
        v + (c * (-v).exp()).ln_1p()
    } else {
        v + (-((-c).ln() - v).exp_m1()).ln()
    }
}

/// ν̂ evaluated at a negative spectral point k: −L(k)/2π.
pub fn nu_hat_at<S: Spectrum + ?Sized>(sd: &S, k: f64) -> Result<C64> {
    if sd.is_reflectionless() {
        return Ok(C64::new(0.0, 0.0));
    }
    let (l, _) = sd.log_weight(k);
    if !(l.re.is_finite() && l.im.is_finite()) || l.re < 1e-12f64.ln() {
        return Err(Error::LogSingularity(k));
    }
    Ok(-l / (2.0 * PI))
}

/// ν̂(−s,t) = −(1/2π) ln(1 + r̂₁(−s)r̂₂(−s)) with r̂ⱼ(−s) = rⱼ(−ξ).
pub fn nu_hat<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64, t: f64) -> Result<C64> {
    let sc = Scaling::new(alpha, s, t)?;
    nu_hat_at(sd, -sc.xi)
}

fn chi_direct_scaled<S: Spectrum + ?Sized>(sd: &S, z: f64, sc: &Scaling) -> Result<(C64, f64)> {
    if z < -sc.s * (1.0 + 1e-14) {
        return Err(Error::Domain(format!("chi_hat needs z >= -s, got z={z}, s={}", sc.s)));
    }
    if sd.is_reflectionless() {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let c = (z * sc.eps).max(-sc.xi);
    let singular = (z + sc.s).abs() <= 1e-14 * sc.s;
    let c = if singular { -sc.xi } else { c };
    let f = |v: f64| {
        let k = -v.exp();
        ln_shifted(v, c) * dl_dv(sd, k)
    };
    let (int, err) = integrate(&f, sc.xi.ln(), f64::INFINITY, singular, &v_breaks(sd))?;
    let l_xi = sd.log_weight(-sc.xi).0;
    // χ̂ = (ln ε/2πi) L(−ξ) + (1/2πi) ∫_{ln ξ}^∞ ln(zε + e^v) dL/dv dv
    let value = (sc.ln_eps() * l_xi + int) / (2.0 * PI * I);
    Ok((value, err / (2.0 * PI)))
}

/// χ̂(z,s,t) by a single quadrature over (−∞, −ξ) in v = ln(−k).
pub fn chi_hat<S: Spectrum + ?Sized>(sd: &S, z: f64, alpha: f64, s: f64, t: f64) -> Result<C64> {
    let sc = Scaling::new(alpha, s, t)?;
    chi_direct_scaled(sd, z, &sc).map(|r| r.0)
}

/// Point where χ̂ is evaluated by the split route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiPoint {
    Zero,
    MinusS,
}

fn chi_split_scaled<S: Spectrum + ?Sized>(sd: &S, at: ChiPoint, sc: &Scaling) -> Result<(C64, f64)> {
    let z = match at {
        ChiPoint::Zero => 0.0,
        ChiPoint::MinusS => -sc.s,
    };
    if sd.case() != CaseTag::CaseI || sc.xi >= 1.0 || sd.is_reflectionless() {
        return chi_direct_scaled(sd, z, sc);
    }
    let c = z * sc.eps;
    let lnxi = sc.xi.ln();
    let breaks = v_breaks(sd);
    // ∫_{−∞}^{−1} ln(zε − k) dL
    let far = |v: f64| ln_shifted(v, c) * dl_dv(sd, -v.exp());
    let (far_int, e1) = integrate(&far, 0.0, f64::INFINITY, false, &breaks)?;
    // ∫_{−1}^{−ξ} ln(zε − k) dG
    let near = |v: f64| ln_shifted(v, c) * dg_dv(sd, -v.exp());
    let (near_int, e2) = integrate(&near, lnxi, 0.0, at == ChiPoint::MinusS, &breaks)?;
    // ∫_{−1}^{−ξ} ln(zε − k)·2dk/k in closed form
    let closed = match at {
        ChiPoint::Zero => lnxi * lnxi,
        ChiPoint::MinusS => lnxi * lnxi + PI * PI / 3.0 - 2.0 * dilog(sc.xi),
    };
    let j = -far_int + -near_int + closed;
    let l_xi = sd.log_weight(-sc.xi).0;
    let value = (sc.ln_eps() * l_xi - j) / (2.0 * PI * I);
    Ok((value, (e1 + e2) / (2.0 * PI)))
}

/// χ̂ at z = 0 or z = −s with the k = 0 singularity of L integrated in closed form
/// (Case I); other cases fall back to [`chi_hat`].
pub fn chi_hat_split<S: Spectrum + ?Sized>(sd: &S, at: ChiPoint, alpha: f64, s: f64, t: f64) -> Result<C64> {
    let sc = Scaling::new(alpha, s, t)?;
    chi_split_scaled(sd, at, &sc).map(|r| r.0)
}

/// χ̂₀(s) = (i/2π)[ln²s + ∫_{−∞}^{−1} ln(−ζ) dL + ∫_{−1}^{0} ln(−ζ) dG] (Case I).
pub fn chi0<S: Spectrum + ?Sized>(sd: &S, s: f64) -> Result<C64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("chi0 needs s > 0, got {s}")));
    }
    if sd.case() != CaseTag::CaseI {
        return Err(Error::Invalid("chi0 is defined for Case I data".into()));
    }
    let breaks = v_breaks(sd);
    let far = |v: f64| v * dl_dv(sd, -v.exp());
    let near = |v: f64| v * dg_dv(sd, -v.exp());
    let (a, _) = integrate(&far, 0.0, f64::INFINITY, false, &breaks)?;
    let (b, _) = integrate(&near, f64::NEG_INFINITY, 0.0, false, &breaks)?;
    let ls = s.ln();
    Ok(I / (2.0 * PI) * (ls * ls - a - b))
}

/// χ̂₁ = (i/2π) ∫_{−∞}^{0} ln(−ζ) dL (Case II).
pub fn chi1<S: Spectrum + ?Sized>(sd: &S) -> Result<C64> {
    if sd.case() != CaseTag::CaseII {
        return Err(Error::Invalid("chi1 is defined for Case II data".into()));
    }
    if sd.is_reflectionless() {
        return Ok(C64::new(0.0, 0.0));
    }
    let f = |v: f64| v * dl_dv(sd, -v.exp());
    let (a, _) = integrate(&f, f64::NEG_INFINITY, f64::INFINITY, false, &v_breaks(sd))?;
    Ok(-I / (2.0 * PI) * a)
}

/// ln(Q/A) = (1/π) ∫_{−∞}^{0} arg(1 + r₁r₂)/ζ dζ.
pub fn log_q_ratio<S: Spectrum + ?Sized>(sd: &S) -> Result<f64> {
    if sd.is_reflectionless() {
        return Ok(0.0);
    }
    let f = |v: f64| C64::from(sd.log_weight(-v.exp()).0.im);
    let (a, _) = integrate(&f, f64::NEG_INFINITY, f64::INFINITY, false, &v_breaks(sd))?;
    Ok(-a.re / PI)
}

/// δ(0,ξ) = exp{(1/2πi) ∫_{−∞}^{−ξ} L(ζ)/ζ dζ}.
pub fn delta0<S: Spectrum + ?Sized>(sd: &S, xi: f64) -> Result<C64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("delta0 needs xi > 0, got {xi}")));
    }
    if sd.is_reflectionless() {
        return Ok(C64::new(1.0, 0.0));
    }
    let f = |v: f64| sd.log_weight(-v.exp()).0;
    let (a, _) = integrate(&f, xi.ln(), f64::INFINITY, false, &v_breaks(sd))?;
    Ok((-a / (2.0 * PI * I)).exp())
}

/// The small-ξ form of δ(0,ξ).
pub fn delta0_expansion<S: Spectrum + ?Sized>(sd: &S, xi: f64) -> Result<C64> {
    delta0_expansion_exponent(sd, xi).map(|e| e.exp())
}

/// Logarithm of [`delta0_expansion`], without branch reduction of its imaginary part.
pub fn delta0_expansion_exponent<S: Spectrum + ?Sized>(sd: &S, xi: f64) -> Result<C64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("delta0_expansion needs xi > 0, got {xi}")));
    }
    let lx = xi.ln();
    match sd.small_k() {
        SmallK::CaseI { a2_zero } => {
            let c = (sd.amplitude() * a2_zero.abs() / (2.0 * xi)).ln();
            Ok(I / PI * lx * c + chi0(sd, xi)?)
        }
        SmallK::CaseII { .. } => {
            let lambda = case_two_lambda(sd)?;
            Ok(I / (2.0 * PI) * lx * lambda + chi1(sd)?)
        }
    }
}

/// λ = ln(a₁₁a₂₁), requiring a₁₁a₂₁ real and positive; zero for reflectionless data,
/// where 1 + r₁r₂ ≡ 1.
pub fn case_two_lambda<S: Spectrum + ?Sized>(sd: &S) -> Result<f64> {
    if sd.is_reflectionless() && sd.case() == CaseTag::CaseII {
        return Ok(0.0);
    }
    match sd.small_k() {
        SmallK::CaseII { a11, a21, .. } => {
            let p = a11 * a21;
            if !(p.re > 0.0) || p.im.abs() > 1e-6 * p.norm().max(1.0) {
                return Err(Error::Assumption2(format!("a11*a21 = {p} is not real positive")));
            }
            Ok(p.re.ln())
        }
        SmallK::CaseI { .. } => Err(Error::Invalid("lambda is defined for Case II data".into())),
    }
}

fn in_band(s: f64) -> bool {
    s >= WORKING_BAND.0 && s <= WORKING_BAND.1
}

fn expansion_order(alpha: f64) -> ErrorOrder {
    ErrorOrder::new((1.0 - alpha) / (alpha - 2.0), 1.0)
}

/// ν̂, χ̂(0), χ̂(−s) by direct quadrature.
pub fn chi_nu_direct<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64, t: f64) -> Result<PhaseFunctionalResult> {
    let sc = Scaling::new(alpha, s, t)?;
    let nu = nu_hat_at(sd, -sc.xi)?;
    let (c0, e0) = chi_direct_scaled(sd, 0.0, &sc)?;
    let (cs, es) = chi_direct_scaled(sd, -s, &sc)?;
    let (chi_const, chi_const_minus_s) = match sd.case() {
        CaseTag::CaseI => {
            let c = chi0(sd, s)?;
            (c, c + I * PI / 6.0)
        }
        CaseTag::CaseII => {
            let c = chi1(sd)?;
            (c, c)
        }
    };
    Ok(PhaseFunctionalResult {
        nu_hat: nu,
        chi_zero: c0,
        chi_minus_s: cs,
        chi_const,
        chi_const_minus_s,
        re_chi_plateau: 0.5 * log_q_ratio(sd)?,
        method: Method::DirectQuadrature,
        error_order: ErrorOrder::new(f64::NEG_INFINITY, 0.0),
        quadrature_error: e0 + es,
        out_of_band: !in_band(s),
    })
}

/// The large-t expansions of ν̂ and χ̂.
///
/// Case I:
/// ν̂ ≈ βℓ/π + (1/π) ln(A|a₂(0)|/2s),
/// χ̂(0) ≈ −(iβ²/2π)ℓ² + (iβ/π) ln(2/(A|a₂(0)|))ℓ + χ̂₀(s), χ̂(−s) ≈ χ̂(0) + iπ/6,
/// with ℓ = ln 4st and β = (1−α)/(2−α).
/// Case II: ν̂ = λ/2π and χ̂ ≈ −(iβλ/2π)ℓ + χ̂₁, λ = ln(a₁₁a₂₁).
pub fn chi_nu_expansion<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64, t: f64) -> Result<PhaseFunctionalResult> {
    let sc = Scaling::new(alpha, s, t)?;
    if sd.assumption2().abs() > ASSUMPTION2_TOL {
        return Err(Error::Assumption2(format!("arg(1 + r1 r2) -> {} at k = 0-", sd.assumption2())));
    }
    let beta = (1.0 - alpha) / (2.0 - alpha);
    let l = sc.log4st;
    let a = sd.amplitude();
    let (nu, chi_zero, chi_minus_s, chi_const, chi_const_minus_s) = match sd.small_k() {
        SmallK::CaseI { a2_zero } => {
            let aa = a * a2_zero.abs();
            let nu = C64::from(beta * l / PI + (aa / (2.0 * s)).ln() / PI);
            let c0 = chi0(sd, s)?;
            let chi = -I * beta * beta / (2.0 * PI) * l * l + I * beta / PI * (2.0 / aa).ln() * l + c0;
            (nu, chi, chi + I * PI / 6.0, c0, c0 + I * PI / 6.0)
        }
        SmallK::CaseII { .. } => {
            let lambda = case_two_lambda(sd)?;
            let c1 = chi1(sd)?;
            let chi = -I * beta * lambda / (2.0 * PI) * l + c1;
            (C64::from(lambda / (2.0 * PI)), chi, chi, c1, c1)
        }
    };
    let exact = sd.is_reflectionless();
    Ok(PhaseFunctionalResult {
        nu_hat: nu,
        chi_zero,
        chi_minus_s,
        chi_const,
        chi_const_minus_s,
        re_chi_plateau: 0.5 * log_q_ratio(sd)?,
        method: Method::AsymptoticExpansion,
        error_order: if exact { ErrorOrder::exact() } else { expansion_order(alpha) },
        quadrature_error: 0.0,
        out_of_band: !in_band(s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{PureStepSpectrum, SolitonSpectrum, SyntheticCaseII};

    #[test]
    fn scaling_round_trip() {
        let sc = Scaling::new(0.8, 1.0, 200.0).unwrap();
        assert!((sc.x - 800f64.powf(1.0 / 1.2)).abs() < 1e-9);
        assert!((sc.x.powf(1.2) / (4.0 * 200.0) - 1.0).abs() < 1e-12);
        assert!((sc.xi - sc.x.powf(-0.2)).abs() < 1e-15);
        assert!(Scaling::new(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn nu_hat_pure_step_at_minus_one() {
        let sd = PureStepSpectrum { amplitude: 2.0 };
        let nu = nu_hat_at(&sd, -1.0).unwrap();
        assert!((nu.re - 2f64.ln() / (2.0 * PI)).abs() < 1e-14);
        assert_eq!(nu.im, 0.0);
    }

    #[test]
    fn soliton_functionals_vanish() {
        let sd = SolitonSpectrum { amplitude: 1.0 };
        let r = chi_nu_expansion(&sd, 0.6, 1.0, 1e3).unwrap();
        assert_eq!(r.nu_hat, C64::new(0.0, 0.0));
        assert_eq!(r.chi_const, C64::new(0.0, 0.0));
        assert_eq!(chi_hat(&sd, 0.0, 0.6, 1.0, 1e3).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(delta0(&sd, 0.3).unwrap(), C64::new(1.0, 0.0));
    }

    // mpmath: the same integral in k for the pure step A = 1
    //   chi(z) = ln(eps) L(-xi)/(2 pi i) - (1/(2 pi i)) quad(ln(z eps - k) L'(k), [-inf, -xi])
    // at alpha = 0.8, s = 1, t = 1e3.
    #[test]
    fn chi_hat_pure_step_matches_reference() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let c0 = chi_hat(&sd, 0.0, 0.8, 1.0, 1e3).unwrap();
        let cs = chi_hat(&sd, -1.0, 0.8, 1.0, 1e3).unwrap();
        assert!((c0 - C64::new(0.0, REF_CHI0)).norm() < 1e-9, "{c0}");
        assert!((cs - C64::new(0.0, REF_CHIS)).norm() < 1e-9, "{cs}");
    }
    const REF_CHI0: f64 = -0.187_583_307_008_771_08;
    const REF_CHIS: f64 = 0.092_274_593_290_326_30;

    #[test]
    fn split_route_agrees_with_direct() {
        let sd = PureStepSpectrum { amplitude: 1.3 };
        for t in [1e2, 1e5] {
            for at in [ChiPoint::Zero, ChiPoint::MinusS] {
                let z = if at == ChiPoint::Zero { 0.0 } else { -0.7 };
                let a = chi_hat(&sd, z, 0.7, 0.7, t).unwrap();
                let b = chi_hat_split(&sd, at, 0.7, 0.7, t).unwrap();
                assert!((a - b).norm() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn chi0_log_squared_term() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let s = 0.8;
        let d = chi0(&sd, 2.0 * s).unwrap() - chi0(&sd, s).unwrap();
        let want = I / (2.0 * PI) * ((2.0 * s).ln().powi(2) - s.ln().powi(2));
        assert!((d - want).norm() < 1e-12);
    }

    #[test]
    fn pure_step_delta_is_unimodular() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        for xi in [1e-3, 0.1, 2.0] {
            assert!((delta0(&sd, xi).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(log_q_ratio(&sd).unwrap().abs() < 1e-14);
    }

    #[test]
    fn delta_expansion_converges() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let gap = |xi: f64| (delta0(&sd, xi).unwrap() - delta0_expansion(&sd, xi).unwrap()).norm();
        assert!(gap(1e-4) < gap(1e-2));
        assert!(gap(1e-4) < 1e-3);
    }

    #[test]
    fn delta_relates_to_nu_and_chi() {
        // δ̂(0) = s^{iν̂} e^{χ̂(0)} = δ(0, ξ)
        let sd = SyntheticCaseII::new(1.0, 0.5, 0.8).unwrap();
        let (alpha, s, t) = (0.6, 1.4, 300.0);
        let sc = Scaling::new(alpha, s, t).unwrap();
        let nu = nu_hat(&sd, alpha, s, t).unwrap();
        let chi = chi_hat(&sd, 0.0, alpha, s, t).unwrap();
        let lhs = (I * nu * s.ln() + chi).exp();
        assert!((lhs - delta0(&sd, sc.xi).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn case_two_delta_limit_is_finite() {
        let sd = SyntheticCaseII::new(1.0, 0.5, 0.8).unwrap();
        let d = delta0(&sd, 1e-6).unwrap();
        let e = delta0_expansion(&sd, 1e-6).unwrap();
        assert!((d - e).norm() < 1e-4);
    }

    #[test]
    fn case_two_expansion_matches_direct() {
        let sd = SyntheticCaseII::new(1.0, 0.5, 0.8).unwrap();
        let ex = chi_nu_expansion(&sd, 0.5, 1.0, 1e6).unwrap();
        let di = chi_nu_direct(&sd, 0.5, 1.0, 1e6).unwrap();
        assert!((ex.nu_hat - di.nu_hat).norm() < 1e-2);
        assert!((ex.chi_zero - di.chi_zero).norm() < 1e-2);
        assert!((di.re_chi_plateau - di.chi_zero.re).abs() < 1e-2);
    }

    #[test]
    fn out_of_band_is_flagged() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        assert!(chi_nu_expansion(&sd, 0.5, 30.0, 1e3).unwrap().out_of_band);
        assert!(!chi_nu_expansion(&sd, 0.5, 1.0, 1e3).unwrap().out_of_band);
    }
}
