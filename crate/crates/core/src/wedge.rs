//! Long-time asymptotics of q(±x,t) along the curves t = x^{2−α}/(4s).
//!
//! `predict_q` evaluates the closed-form asymptotic formulas (leading oscillation,
//! decaying corrections, error orders). `gen_as_predict` evaluates the intermediate
//! formula built from ν̂, χ̂, δ̂ by direct quadrature and serves as an independent check.

use crate::phase::{
    case_two_lambda, chi0, chi1, chi_hat, delta0, delta0_expansion_exponent, log_q_ratio, nu_hat_at, ErrorOrder,
    Method, Scaling, WORKING_BAND,
};
use crate::scattering::{CaseTag, SmallK, Spectrum};
use crate::special::gamma;
use crate::{Error, Result, C64, I};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

const TWO_THIRDS: f64 = 2.0 / 3.0;
const FOUR_FIFTHS: f64 = 0.8;

/// Below this |r̂ⱼ^R(−s)| the parabolic-cylinder corrections are set to zero.
pub const DEGENERATE_REFLECTION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    PlusX,
    MinusX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgePoint {
    pub alpha: f64,
    pub s: f64,
    pub t: f64,
    pub x: f64,
    pub xi: f64,
    pub side: Side,
}

impl WedgePoint {
    pub fn new(alpha: f64, s: f64, t: f64, side: Side) -> Result<Self> {
        let sc = Scaling::new(alpha, s, t)?;
        Ok(Self { alpha, s, t, x: sc.x, xi: sc.xi, side })
    }

    pub fn scaling(&self) -> Scaling {
        Scaling::new(self.alpha, self.s, self.t).expect("validated at construction")
    }

    /// s recovered from (x, t): x^{2−α}/(4t).
    pub fn recovered_s(&self) -> f64 {
        self.x.powf(2.0 - self.alpha) / (4.0 * self.t)
    }

    /// Signed spatial coordinate of the point.
    pub fn signed_x(&self) -> f64 {
        match self.side {
            Side::PlusX => self.x,
            Side::MinusX => -self.x,
        }
    }
}

pub fn wedge_point(alpha: f64, s: f64, t: f64, side: Side) -> Result<WedgePoint> {
    WedgePoint::new(alpha, s, t, side)
}

/// Q = A·exp{(1/π) ∫_{−∞}^{0} arg(1 + r₁r₂)/ζ dζ}.
pub fn amplitude_q<S: Spectrum + ?Sized>(sd: &S) -> Result<f64> {
    Ok(sd.amplitude() * log_q_ratio(sd)?.exp())
}

/// Coefficients of the phase functions. Case I entries are zero for Case II data and
/// vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCoefficients {
    pub psi: f64,
    pub phi_i: f64,
    pub phi_ii: f64,
    pub phi0: f64,
    pub phi11: f64,
    pub phi12: f64,
    pub phi2: f64,
    pub phi31: f64,
    pub phi32: f64,
    pub phi4: f64,
    pub phi51: f64,
    pub phi52: f64,
    pub tilde_phi3: f64,
    pub hat_phi1: f64,
    pub hat_phi3: f64,
    pub hat_phi5: f64,
}

struct Consts {
    beta: f64,
    b: f64,
    kappa: f64,
}

fn consts(alpha: f64) -> Consts {
    let beta = (1.0 - alpha) / (2.0 - alpha);
    Consts { beta, b: beta / PI, kappa: (alpha + 2.0) / (2.0 * alpha - 4.0) }
}

fn check_alpha_s(alpha: f64, s: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0,1], got {alpha}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    Ok(())
}

/// φ₀(α,s) = 2^{2α/(2−α)} s^{2/(2−α)}, so that φ₀ t^{α/(2−α)} = s x^α.
pub fn phi0(alpha: f64, s: f64) -> f64 {
    2f64.powf(2.0 * alpha / (2.0 - alpha)) * s.powf(2.0 / (2.0 - alpha))
}

/// ψ(α) = (1−α)²/(π(2−α)²).
pub fn psi(alpha: f64) -> f64 {
    (1.0 - alpha).powi(2) / (PI * (2.0 - alpha).powi(2))
}

/// Coefficients entering the predictions. α = 1 is accepted for the matching limit.
pub fn phase_coefficients<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64) -> Result<PhaseCoefficients> {
    check_alpha_s(alpha, s)?;
    let Consts { beta, b, .. } = consts(alpha);
    let a = sd.amplitude();
    let mut pc = PhaseCoefficients {
        psi: psi(alpha),
        phi_i: 0.0,
        phi_ii: 0.0,
        phi0: phi0(alpha, s),
        phi11: 0.0,
        phi12: 0.0,
        phi2: 0.0,
        phi31: 0.0,
        phi32: 0.0,
        phi4: 0.0,
        phi51: 0.0,
        phi52: 0.0,
        tilde_phi3: 0.0,
        hat_phi1: psi(alpha),
        hat_phi3: 0.0,
        hat_phi5: 0.0,
    };
    let denom = PI * (2.0 - alpha).powi(2);
    match sd.small_k() {
        SmallK::CaseI { a2_zero } => {
            let aa = a * a2_zero.abs();
            // b·ln b → 0 at α = 1
            let lnb = if b > 0.0 { b.ln() } else { 0.0 };
            let ratio = if alpha < 1.0 { alpha / (1.0 - alpha) } else { 0.0 };
            pc.phi_i = 2.0 * b * (2.0 * s / aa).ln();
            pc.phi11 = -(1.0 - alpha) / denom;
            pc.phi12 = (1.0 - alpha) * (2.0 * alpha - 1.0) / denom;
            pc.phi2 = b;
            pc.phi4 = (aa / (2.0 * s)).ln() / PI;
            if b > 0.0 {
                pc.phi31 = b * (lnb + (2.0 * s / (aa * aa)).ln() + ratio * (2.0 * s / aa).ln() - 1.0);
                pc.phi32 = b * (-lnb + (8.0 * s.powi(3) / (aa * aa)).ln() + ratio * (aa / (2.0 * s)).ln() + 1.0);
                pc.tilde_phi3 = b * (lnb - 1.0);
                pc.hat_phi3 = b * (lnb + (2.0 * s / (aa * aa)).ln() - 1.0);
            } else {
                // α = 1: b·α/(1−α) → 1/π
                pc.phi31 = (2.0 * s / aa).ln() / PI;
                pc.phi32 = (aa / (2.0 * s)).ln() / PI;
            }
        }
        SmallK::CaseII { .. } => {
            let lambda = case_two_lambda(sd)?;
            pc.phi_ii = -beta * lambda / PI;
            pc.phi51 = -lambda / (2.0 * PI);
            pc.phi52 = (2.0 - 3.0 * alpha) * lambda / (2.0 * PI * (alpha - 2.0));
            pc.hat_phi5 = pc.phi_ii;
        }
    }
    Ok(pc)
}

/// The coefficients exactly as printed in the source formulas, for comparison with
/// [`phase_coefficients`].
pub fn printed_phase_coefficients<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64) -> Result<PhaseCoefficients> {
    check_alpha_s(alpha, s)?;
    let mut pc = phase_coefficients(sd, alpha, s)?;
    let denom = PI * (2.0 - alpha).powi(2);
    let b = consts(alpha).b;
    match sd.small_k() {
        SmallK::CaseI { a2_zero } => {
            let aa = sd.amplitude() * a2_zero.abs();
            pc.phi11 = (1.0 - alpha) * (1.0 - 2.0 * alpha) / denom;
            pc.phi12 = (1.0 - alpha) / denom;
            if alpha < 1.0 {
                let r = alpha / (PI * (1.0 - alpha));
                pc.phi31 = b * (b.ln() + (2.0 * s / (aa * aa)).ln() + r * (2.0 * s / aa).ln() - 1.0);
                pc.phi32 = b * ((1.0 / b).ln() + (8.0 * s.powi(3) / (aa * aa)).ln() + r * (aa / (2.0 * s)).ln() + 1.0);
            }
        }
        SmallK::CaseII { .. } => {
            let lambda = case_two_lambda(sd)?;
            pc.phi51 = lambda / (2.0 * PI * (alpha - 2.0));
            pc.phi52 = (4.0 * alpha - 5.0) * pc.phi51;
            pc.hat_phi5 = (1.0 - alpha) * lambda / (2.0 * PI * (alpha - 2.0));
        }
    }
    Ok(pc)
}

/// Phase as a combination of t^{α/(2−α)}, ℓ², ℓ·ln ℓ, ℓ, ln ℓ and 1, with ℓ = ln 4st.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseLedger {
    pub power: f64,
    pub log_sq: f64,
    pub log_loglog: f64,
    pub log: f64,
    pub loglog: f64,
    pub constant: f64,
}

impl PhaseLedger {
    pub fn as_array(&self) -> [f64; 6] {
        [self.power, self.log_sq, self.log_loglog, self.log, self.loglog, self.constant]
    }

    /// Phase value at ℓ = ln 4st (t^{α/(2−α)} is rebuilt from ℓ and s).
    pub fn evaluate(&self, alpha: f64, s: f64, log4st: f64) -> f64 {
        let l = log4st;
        let ll = l.ln();
        let mut v = self.log_sq * l * l + self.log_loglog * l * ll + self.log * l + self.loglog * ll + self.constant;
        if self.power != 0.0 {
            let e = alpha / (2.0 - alpha);
            v += self.power * (e * (l - (4.0 * s).ln())).exp();
        }
        v
    }
}

/// A decaying term c·t^p·(√ln t)·e^{iΦ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTerm {
    pub amplitude: C64,
    pub t_exponent: f64,
    pub sqrt_log: bool,
    pub ledger: PhaseLedger,
}

impl CorrectionTerm {
    pub fn value(&self, alpha: f64, s: f64, t: f64) -> C64 {
        let l = (4.0 * s * t).ln();
        let mut m = t.powf(self.t_exponent);
        if self.sqrt_log {
            m *= t.ln().sqrt();
        }
        self.amplitude * m * C64::from_polar(1.0, self.ledger.evaluate(alpha, s, l))
    }
}

/// Which piece of the asymptotic statement applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Case I, x > 0, α < 2/3: leading term plus the t^{α/(2α−4)}√ln t correction.
    CaseIPlusCorrected,
    /// Case I, x > 0, α ≥ 2/3.
    CaseIPlusLeading,
    /// Case I, x < 0, α ≤ 2/3: magnitude bound only.
    CaseIMinusBound,
    /// Case I, x < 0, α > 2/3: explicit decaying term.
    CaseIMinusTerm,
    /// Case II, x > 0, α < 1/2.
    CaseIIPlusCorrectedLow,
    /// Case II, x > 0, 1/2 ≤ α < 2/3.
    CaseIIPlusCorrectedMid,
    /// Case II, x > 0, α ≥ 2/3.
    CaseIIPlusLeading,
    /// Case II, x < 0, α ≤ 2/3: magnitude bound only.
    CaseIIMinusBound,
    /// Case II, x < 0, 2/3 < α ≤ 4/5.
    CaseIIMinusTermLow,
    /// Case II, x < 0, α > 4/5.
    CaseIIMinusTermHigh,
}

impl Regime {
    pub fn select(case: CaseTag, side: Side, alpha: f64) -> Self {
        use Regime::*;
        match (case, side) {
            (CaseTag::CaseI, Side::PlusX) => {
                if alpha < TWO_THIRDS {
                    CaseIPlusCorrected
                } else {
                    CaseIPlusLeading
                }
            }
            (CaseTag::CaseI, Side::MinusX) => {
                if alpha <= TWO_THIRDS {
                    CaseIMinusBound
                } else {
                    CaseIMinusTerm
                }
            }
            (CaseTag::CaseII, Side::PlusX) => {
                if alpha < 0.5 {
                    CaseIIPlusCorrectedLow
                } else if alpha < TWO_THIRDS {
                    CaseIIPlusCorrectedMid
                } else {
                    CaseIIPlusLeading
                }
            }
            (CaseTag::CaseII, Side::MinusX) => {
                if alpha <= TWO_THIRDS {
                    CaseIIMinusBound
                } else if alpha <= FOUR_FIFTHS {
                    CaseIIMinusTermLow
                } else {
                    CaseIIMinusTermHigh
                }
            }
        }
    }

    /// Short identifier used in output tables.
    pub fn code(&self) -> &'static str {
        use Regime::*;
        match self {
            CaseIPlusCorrected => "I+:a<2/3",
            CaseIPlusLeading => "I+:a>=2/3",
            CaseIMinusBound => "I-:a<=2/3",
            CaseIMinusTerm => "I-:a>2/3",
            CaseIIPlusCorrectedLow => "II+:a<1/2",
            CaseIIPlusCorrectedMid => "II+:1/2<=a<2/3",
            CaseIIPlusLeading => "II+:a>=2/3",
            CaseIIMinusBound => "II-:a<=2/3",
            CaseIIMinusTermLow => "II-:2/3<a<=4/5",
            CaseIIMinusTermHigh => "II-:a>4/5",
        }
    }

    /// Order of the remainder after the terms the prediction includes.
    pub fn error_order(&self, alpha: f64) -> ErrorOrder {
        use Regime::*;
        let a = alpha;
        match self {
            CaseIPlusCorrected => ErrorOrder::new(a / (2.0 * a - 4.0), -0.5),
            CaseIPlusLeading | CaseIIPlusCorrectedMid | CaseIIPlusLeading => {
                ErrorOrder::new((1.0 - a) / (a - 2.0), 1.0)
            }
            CaseIMinusBound | CaseIIMinusBound | CaseIIMinusTermLow => ErrorOrder::new(1.0 / (a - 2.0), 1.0),
            CaseIMinusTerm => ErrorOrder::new((4.0 - 3.0 * a) / (2.0 * a - 4.0), -0.5),
            CaseIIPlusCorrectedLow => ErrorOrder::new(a / (a - 2.0), 1.0),
            CaseIIMinusTermHigh => ErrorOrder::new((6.0 - 5.0 * a) / (2.0 * a - 4.0), 0.5),
        }
    }

    pub fn bound_only(&self) -> bool {
        matches!(self, Regime::CaseIMinusBound | Regime::CaseIIMinusBound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub point: WedgePoint,
    pub case: CaseTag,
    pub regime: Regime,
    pub leading: C64,
    pub correction: C64,
    /// Phase of the leading term (x > 0) or of the explicit decaying term (x < 0).
    pub ledger: PhaseLedger,
    pub terms: Vec<CorrectionTerm>,
    pub error_order: ErrorOrder,
    pub bound_only: bool,
    pub out_of_band: bool,
}

impl AsymptoticPrediction {
    pub fn value(&self) -> C64 {
        self.leading + self.correction
    }
}

/// Parabolic-cylinder constants at (s,t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaGamma {
    pub nu_hat: C64,
    pub r1_reg: C64,
    pub r2_reg: C64,
    pub beta: C64,
    pub gamma: C64,
    pub beta_tilde: C64,
    pub gamma_tilde: C64,
    /// Large-t forms of β̃ and γ̃ including their t-dependent phase and √ln t factor.
    pub beta_tilde_asymptotic: C64,
    pub gamma_tilde_asymptotic: C64,
    /// r̂^R(−s) vanished; corrections are zero.
    pub degenerate: bool,
}

/// t-independent parts of the asymptotic β̃ and γ̃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeConstants {
    pub beta: C64,
    pub gamma: C64,
}

/// Constants β̃_as(α,s), γ̃_as(α,s); `None` for reflectionless Case II data.
pub fn tilde_constants<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64) -> Result<Option<TildeConstants>> {
    check_alpha_s(alpha, s)?;
    let Consts { beta, b, kappa } = consts(alpha);
    let a = sd.amplitude();
    let k1 = sd.k1();
    let common = beta * s.ln() + kappa * LN_2;
    match sd.small_k() {
        SmallK::CaseI { a2_zero } => {
            if b == 0.0 {
                return Err(Error::Domain("Case I constants need alpha < 1".into()));
            }
            let c = (a * a2_zero.abs() / (2.0 * s)).ln() / PI;
            let chi = chi0(sd, s)?;
            let ph = C64::new(0.0, PI / 3.0 + c * (b * s / 2.0).ln());
            let beta_as = I * a * b.sqrt() / (2.0 * k1) * (common + 2.0 * chi + ph).exp();
            let gamma_as = -2.0 * I * k1 * b.sqrt() / a * (common - 2.0 * chi - ph).exp();
            Ok(Some(TildeConstants { beta: beta_as, gamma: gamma_as }))
        }
        SmallK::CaseII { a11, a21, b0 } => {
            if sd.is_reflectionless() || b0.norm() < DEGENERATE_REFLECTION {
                return Ok(None);
            }
            let lambda = case_two_lambda(sd)?;
            let nu = lambda / (2.0 * PI);
            let chi = chi1(sd)?;
            let quarter = (-0.25 * lambda).exp();
            let root = (2.0 * PI).sqrt();
            let beta_r = root * a11 * quarter * C64::from_polar(1.0, -PI / 4.0) / (k1 * b0 * gamma(C64::new(0.0, -nu))?);
            let gamma_r =
                root * k1 * a21 * quarter * C64::from_polar(1.0, -3.0 * PI / 4.0) / (b0.conj() * gamma(C64::new(0.0, nu))?);
            let lns2 = (s / 2.0).ln();
            let beta_as = I * beta_r * (I * nu * lns2 + common + 2.0 * chi).exp();
            let gamma_as = -I * gamma_r * (-I * nu * lns2 + common - 2.0 * chi).exp();
            Ok(Some(TildeConstants { beta: beta_as, gamma: gamma_as }))
        }
    }
}

/// β^R, γ^R and β̃^R, γ̃^R at (s,t), with ν̂ and χ̂(−s) from direct quadrature or from their
/// expansions.
pub fn beta_gamma<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64, t: f64, source: Method) -> Result<BetaGamma> {
    let sc = Scaling::new(alpha, s, t)?;
    let (nu, chi_s) = match source {
        Method::DirectQuadrature => (nu_hat_at(sd, -sc.xi)?, chi_hat(sd, -s, alpha, s, t)?),
        Method::AsymptoticExpansion => {
            let r = crate::phase::chi_nu_expansion(sd, alpha, s, t)?;
            (r.nu_hat, r.chi_minus_s)
        }
    };
    let k1 = sd.k1();
    let factor = 1.0 + I * k1 / (s * sc.eps);
    let (r1, r2) = if sd.is_reflectionless() {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    } else {
        let r1 = sd.r1(-sc.xi);
        (r1, sd.r2(-sc.xi))
    };
    let r1_reg = factor * r1;
    let r2_reg = r2 / factor;
    let zero = C64::new(0.0, 0.0);
    let asym = asymptotic_tilde(sd, &sc)?;
    if r1_reg.norm() < DEGENERATE_REFLECTION || r2_reg.norm() < DEGENERATE_REFLECTION {
        return Ok(BetaGamma {
            nu_hat: nu,
            r1_reg,
            r2_reg,
            beta: zero,
            gamma: zero,
            beta_tilde: zero,
            gamma_tilde: zero,
            beta_tilde_asymptotic: asym.0,
            gamma_tilde_asymptotic: asym.1,
            degenerate: true,
        });
    }
    let root = (2.0 * PI).sqrt();
    let damp = (-PI / 2.0 * nu).exp();
    let beta = root * damp * C64::from_polar(1.0, -3.0 * PI / 4.0) / (r1_reg * gamma(-I * nu)?);
    let gamma_r = root * damp * C64::from_polar(1.0, -PI / 4.0) / (r2_reg * gamma(I * nu)?);
    let Consts { beta: bexp, kappa, .. } = consts(alpha);
    let common = bexp * s.ln() + kappa * LN_2;
    let lns2 = (s / 2.0).ln();
    let beta_tilde = I * beta * (I * nu * lns2 + common + 2.0 * chi_s).exp();
    let gamma_tilde = -I * gamma_r * (-I * nu * lns2 + common - 2.0 * chi_s).exp();
    Ok(BetaGamma {
        nu_hat: nu,
        r1_reg,
        r2_reg,
        beta,
        gamma: gamma_r,
        beta_tilde,
        gamma_tilde,
        beta_tilde_asymptotic: asym.0,
        gamma_tilde_asymptotic: asym.1,
        degenerate: false,
    })
}

/// β̃_as·e^{iΨ̃₊}√ln t and γ̃_as·e^{iΨ̃₋}√ln t (Case I), β̃_as·e^{±iφ̂₅ℓ} (Case II).
fn asymptotic_tilde<S: Spectrum + ?Sized>(sd: &S, sc: &Scaling) -> Result<(C64, C64)> {
    let Some(tc) = tilde_constants(sd, sc.alpha, sc.s)? else {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    };
    let pc = phase_coefficients(sd, sc.alpha, sc.s)?;
    let l = sc.log4st;
    match sd.case() {
        CaseTag::CaseI => {
            let ph = -pc.hat_phi1 * l * l + pc.phi2 * l * l.ln() + pc.hat_phi3 * l + pc.phi4 * l.ln();
            let sq = sc.t.ln().sqrt();
            Ok((tc.beta * sq * C64::from_polar(1.0, ph), tc.gamma * sq * C64::from_polar(1.0, -ph)))
        }
        CaseTag::CaseII => {
            let ph = pc.hat_phi5 * l;
            Ok((tc.beta * C64::from_polar(1.0, ph), tc.gamma * C64::from_polar(1.0, -ph)))
        }
    }
}

/// Constant part K of the leading phase: Ψ = −ψℓ² + φ_Iℓ + K (Case I) or φ_IIℓ + K (Case II).
fn leading_constant<S: Spectrum + ?Sized>(sd: &S, s: f64) -> Result<f64> {
    match sd.small_k() {
        SmallK::CaseI { a2_zero } => {
            let aa = sd.amplitude() * a2_zero.abs();
            Ok(2.0 / PI * s.ln() * (aa / (2.0 * s)).ln() + 2.0 * chi0(sd, s)?.im)
        }
        SmallK::CaseII { .. } => Ok(case_two_lambda(sd)? / PI * s.ln() + 2.0 * chi1(sd)?.im),
    }
}

/// Leading phase ledger (Ψ_I or Ψ_II); valid for α ∈ (0,1].
pub fn leading_ledger<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64) -> Result<PhaseLedger> {
    let pc = phase_coefficients(sd, alpha, s)?;
    let k = leading_constant(sd, s)?;
    Ok(match sd.case() {
        CaseTag::CaseI => PhaseLedger { log_sq: -pc.psi, log: pc.phi_i, constant: k, ..Default::default() },
        CaseTag::CaseII => PhaseLedger { log: pc.phi_ii, constant: k, ..Default::default() },
    })
}

/// Phase of the first correction term, Ψ_{·,1}.
fn first_ledger(case: CaseTag, pc: &PhaseCoefficients) -> PhaseLedger {
    match case {
        CaseTag::CaseI => PhaseLedger {
            power: pc.phi0,
            log_sq: pc.phi11,
            log_loglog: pc.phi2,
            log: pc.phi31,
            loglog: pc.phi4,
            constant: 0.0,
        },
        CaseTag::CaseII => PhaseLedger { power: pc.phi0, log: pc.phi51, ..Default::default() },
    }
}

/// A₃(α,s) = s^{α/(2−α)} conj(γ̃_as)/(2^{(2−3α)/(2−α)} k₁); α = 1 allowed in Case II.
pub fn minus_side_amplitude<S: Spectrum + ?Sized>(sd: &S, alpha: f64, s: f64) -> Result<C64> {
    let Some(tc) = tilde_constants(sd, alpha, s)? else {
        return Ok(C64::new(0.0, 0.0));
    };
    let pre = (alpha / (2.0 - alpha) * s.ln() - (2.0 - 3.0 * alpha) / (2.0 - alpha) * LN_2).exp() / sd.k1();
    Ok(tc.gamma.conj() * pre)
}

/// The closed-form asymptotic prediction at a wedge point.
pub fn predict_q<S: Spectrum + ?Sized>(sd: &S, wp: &WedgePoint) -> Result<AsymptoticPrediction> {
    let (alpha, s, t) = (wp.alpha, wp.s, wp.t);
    let case = sd.case();
    if sd.assumption2().abs() > crate::phase::ASSUMPTION2_TOL {
        return Err(Error::Assumption2(format!("arg(1 + r1 r2) -> {} at k = 0-", sd.assumption2())));
    }
    let regime = Regime::select(case, wp.side, alpha);
    let pc = phase_coefficients(sd, alpha, s)?;
    let l = (4.0 * s * t).ln();
    let mut terms = Vec::new();
    let zero = C64::new(0.0, 0.0);
    let sqrt_log = case == CaseTag::CaseI;
    let k1 = sd.k1();
    let (leading, ledger) = match wp.side {
        Side::PlusX => {
            let q = amplitude_q(sd)?;
            let led = leading_ledger(sd, alpha, s)?;
            let lead = C64::from_polar(q, led.evaluate(alpha, s, l));
            let corrected = matches!(
                regime,
                Regime::CaseIPlusCorrected | Regime::CaseIIPlusCorrectedLow | Regime::CaseIIPlusCorrectedMid
            );
            if corrected {
                if let Some(tc) = tilde_constants(sd, alpha, s)? {
                    let p = alpha / (2.0 * alpha - 4.0);
                    terms.push(CorrectionTerm {
                        amplitude: -2.0 * k1 / s * tc.beta,
                        t_exponent: p,
                        sqrt_log,
                        ledger: first_ledger(case, &pc),
                    });
                    let second = match case {
                        CaseTag::CaseI => PhaseLedger {
                            power: -pc.phi0,
                            log_sq: pc.phi12,
                            log_loglog: -pc.phi2,
                            log: pc.phi32,
                            loglog: -pc.phi4,
                            constant: 2.0 * led.constant,
                        },
                        CaseTag::CaseII => PhaseLedger {
                            power: -pc.phi0,
                            log: pc.phi52,
                            constant: 2.0 * led.constant,
                            ..Default::default()
                        },
                    };
                    terms.push(CorrectionTerm {
                        amplitude: q * q / (2.0 * k1 * s) * tc.gamma,
                        t_exponent: p,
                        sqrt_log,
                        ledger: second,
                    });
                }
            }
            (lead, led)
        }
        Side::MinusX => {
            let led = first_ledger(case, &pc);
            if !regime.bound_only() {
                let a3 = minus_side_amplitude(sd, alpha, s)?;
                if a3 != zero {
                    terms.push(CorrectionTerm {
                        amplitude: a3,
                        t_exponent: (4.0 - 3.0 * alpha) / (2.0 * alpha - 4.0),
                        sqrt_log,
                        ledger: led,
                    });
                }
            }
            (zero, led)
        }
    };
    let correction = terms.iter().map(|c| c.value(alpha, s, t)).sum();
    Ok(AsymptoticPrediction {
        point: *wp,
        case,
        regime,
        leading,
        correction,
        ledger,
        terms,
        error_order: if sd.is_reflectionless() { ErrorOrder::exact() } else { regime.error_order(alpha) },
        bound_only: regime.bound_only(),
        out_of_band: s < WORKING_BAND.0 || s > WORKING_BAND.1,
    })
}

/// The intermediate formula evaluated with direct quadratures:
/// q(x,t) ≈ Aδ̂² + (A²/2k₁s)δ̂⁴B̃₂₁ − (2k₁/s)B̃₁₂ and q(−x,t) ≈ (2s/k₁)x^{2α−2}·conj(B̃₂₁).
pub fn gen_as_predict<S: Spectrum + ?Sized>(sd: &S, wp: &WedgePoint) -> Result<AsymptoticPrediction> {
    let (alpha, s, t) = (wp.alpha, wp.s, wp.t);
    let sc = wp.scaling();
    let case = sd.case();
    let regime = Regime::select(case, wp.side, alpha);
    let a = sd.amplitude();
    let k1 = sd.k1();
    let bg = beta_gamma(sd, alpha, s, t, Method::DirectQuadrature)?;
    let zero = C64::new(0.0, 0.0);
    let (b12, b21) = if bg.degenerate {
        (zero, zero)
    } else {
        let nu = bg.nu_hat;
        let osc = I * s * sc.x.powf(alpha) - I * alpha * nu * sc.log4st / (2.0 - alpha);
        let tp = t.powf(alpha / (2.0 * alpha - 4.0));
        (bg.beta_tilde * osc.exp() * tp, bg.gamma_tilde * (-osc).exp() * tp)
    };
    let (leading, correction) = match wp.side {
        Side::PlusX => {
            let d2 = delta0(sd, sc.xi)?.powi(2);
            (a * d2, a * a / (2.0 * k1 * s) * d2 * d2 * b21 - 2.0 * k1 / s * b12)
        }
        Side::MinusX => (zero, 2.0 * s / k1 * sc.x.powf(2.0 * alpha - 2.0) * b21.conj()),
    };
    Ok(AsymptoticPrediction {
        point: *wp,
        case,
        regime,
        leading,
        correction,
        ledger: PhaseLedger::default(),
        terms: Vec::new(),
        error_order: regime.error_order(alpha),
        bound_only: false,
        out_of_band: s < WORKING_BAND.0 || s > WORKING_BAND.1,
    })
}

/// One row of the α → 1 phase comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchRow {
    pub alpha: f64,
    pub log_t: f64,
    pub psi_value: f64,
    pub target: f64,
    pub residual: f64,
    /// Same comparison with the expansion taken at the wedge point's own ξ = s·x^{α−1}.
    pub residual_at_xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub case: CaseTag,
    pub s: f64,
    /// (i): Ψ(α,s,t) against 2·arg of the small-ξ form of δ(0,s), with (1−α)ln t fixed.
    pub phase_rows: Vec<PhaseMatchRow>,
    pub phase_residual_decreasing: bool,
    /// φ₀(1,s) − 4s².
    pub phi0_residual: f64,
    /// (ii), Case I: (ln t, ln|q(−x,t)|) along α = 1 − c/ln t and the fitted t-exponent.
    pub minus_side_samples: Vec<(f64, f64)>,
    pub minus_side_exponent: Option<f64>,
    /// (iii), Case II: ν(0) = ln(a₁₁a₂₁)/2π, the printed constant α̂₁ and the α → 1 limit
    /// of the x < 0 term it should match.
    pub nu_zero: Option<f64>,
    pub alpha_hat: Option<C64>,
    pub alpha_hat_limit: Option<C64>,
}

fn wrap_angle(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// Least-squares slope of y against x.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Consistency of the wedge asymptotics with the constant-ξ asymptotics as α → 1.
///
/// `alphas` is the ladder for item (i), evaluated at ln t = c/(1−α); `log_ts` is the
/// ladder for item (ii), evaluated at α = 1 − c/ln t.
pub fn matching_check<S: Spectrum + ?Sized>(
    sd: &S,
    s: f64,
    alphas: &[f64],
    log_ts: &[f64],
    c: f64,
) -> Result<MatchingReport> {
    check_alpha_s(0.5, s)?;
    let case = sd.case();
    let target = 2.0 * delta0_expansion_exponent(sd, s)?.im;
    let mut phase_rows = Vec::new();
    for &alpha in alphas {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("matching alpha must lie in (0,1), got {alpha}")));
        }
        let log_t = c / (1.0 - alpha);
        let l = log_t + (4.0 * s).ln();
        let psi_value = leading_ledger(sd, alpha, s)?.evaluate(alpha, s, l);
        let xi = s * (-(1.0 - alpha) / (2.0 - alpha) * l).exp();
        let at_xi = wrap_angle(psi_value - 2.0 * delta0_expansion_exponent(sd, xi)?.im);
        phase_rows.push(PhaseMatchRow {
            alpha,
            log_t,
            psi_value,
            target,
            residual: (psi_value - target).abs(),
            residual_at_xi: at_xi.abs(),
        });
    }
    let phase_residual_decreasing = phase_rows.windows(2).all(|w| w[1].residual < w[0].residual);
    let phi0_residual = phi0(1.0, s) - 4.0 * s * s;

    let mut minus_side_samples = Vec::new();
    let mut minus_side_exponent = None;
    let (mut nu_zero, mut alpha_hat, mut alpha_hat_limit) = (None, None, None);
    match sd.small_k() {
        SmallK::CaseI { .. } => {
            for &lt in log_ts {
                let alpha = 1.0 - c / lt;
                let a3 = minus_side_amplitude(sd, alpha, s)?;
                let p = (4.0 - 3.0 * alpha) / (2.0 * alpha - 4.0);
                minus_side_samples.push((lt, p * lt + 0.5 * lt.ln() + a3.norm().ln()));
            }
            if minus_side_samples.len() >= 2 {
                let (xs, ys): (Vec<f64>, Vec<f64>) = minus_side_samples.iter().copied().unzip();
                minus_side_exponent = Some(fit_slope(&xs, &ys));
            }
        }
        SmallK::CaseII { a21, b0, .. } => {
            let lambda = case_two_lambda(sd)?;
            let nu = lambda / (2.0 * PI);
            nu_zero = Some(nu);
            if !sd.is_reflectionless() && b0.norm() >= DEGENERATE_REFLECTION {
                let chi = chi1(sd)?;
                let num = PI.sqrt()
                    * (C64::from(-PI / 2.0 * nu) + I * PI / 4.0 - 2.0 * chi.conj() - 3.0 * I * nu * LN_2).exp();
                let den = b0 / (s * a21) * gamma(C64::new(0.0, -nu))?;
                alpha_hat = Some(-num / den);
                // t^{−1/2}·A₃(1,s)·e^{i(4s²t + φ₅₁ ln 4st)} = t^{−1/2}·[A₃(1,s)e^{−iν ln 4s}]·e^{i(4s²t − ν ln t)}
                let a3 = minus_side_amplitude(sd, 1.0, s)?;
                alpha_hat_limit = Some(a3 * C64::from_polar(1.0, -nu * (4.0 * s).ln()));
            }
        }
    }
    Ok(MatchingReport {
        case,
        s,
        phase_rows,
        phase_residual_decreasing,
        phi0_residual,
        minus_side_samples,
        minus_side_exponent,
        nu_zero,
        alpha_hat,
        alpha_hat_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{PureStepSpectrum, SolitonSpectrum, SyntheticCaseII};

    #[test]
    fn wedge_point_examples() {
        let wp = wedge_point(0.8, 1.0, 200.0, Side::PlusX).unwrap();
        assert!((wp.x - 262.568).abs() < 1e-3);
        assert!((wp.recovered_s() - 1.0).abs() < 1e-12);
        let near_one = wedge_point(0.999_999, 0.5, 10.0, Side::PlusX).unwrap();
        assert!((near_one.x - 20.0).abs() < 1e-3);
        assert!(wedge_point(0.0, 1.0, 1.0, Side::PlusX).is_err());
    }

    #[test]
    fn psi_and_phi0() {
        assert!((psi(0.5) - 1.0 / (9.0 * PI)).abs() < 1e-15);
        for s in [0.3, 1.0, 2.5] {
            assert!((phi0(1.0, s) - 4.0 * s * s).abs() < 1e-12);
        }
    }

    #[test]
    fn soliton_coefficients_vanish() {
        let sd = SolitonSpectrum { amplitude: 1.0 };
        let pc = phase_coefficients(&sd, 0.7, 1.0).unwrap();
        assert_eq!((pc.phi51, pc.phi52, pc.hat_phi5, pc.phi_ii), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn printed_and_derived_agree_where_expected() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let d = phase_coefficients(&sd, 0.6, 1.3).unwrap();
        let p = printed_phase_coefficients(&sd, 0.6, 1.3).unwrap();
        assert_eq!(d.psi, p.psi);
        assert_eq!(d.phi2, p.phi2);
        assert_eq!(d.hat_phi3, p.hat_phi3);
        assert_eq!(d.hat_phi1, d.psi);
        // the two ln² coefficients sum to −2ψ as derived, +2ψ as printed
        assert!((d.phi11 + d.phi12 + 2.0 * d.psi).abs() < 1e-15);
        assert!((p.phi11 + p.phi12 - 2.0 * p.psi).abs() < 1e-15);
    }

    #[test]
    fn beta_gamma_product_is_nu() {
        let step = PureStepSpectrum { amplitude: 1.5 };
        let syn = SyntheticCaseII::new(1.0, 0.5, 0.8).unwrap();
        for (s, t) in [(0.1, 1e2), (1.0, 1e5), (10.0, 1e8)] {
            for bg in [
                beta_gamma(&step, 0.7, s, t, Method::DirectQuadrature).unwrap(),
                beta_gamma(&syn, 0.7, s, t, Method::DirectQuadrature).unwrap(),
            ] {
                assert!((bg.beta * bg.gamma - bg.nu_hat).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn soliton_is_degenerate() {
        let sd = SolitonSpectrum { amplitude: 1.0 };
        let bg = beta_gamma(&sd, 0.7, 1.0, 1e3, Method::DirectQuadrature).unwrap();
        assert!(bg.degenerate);
        let wp = wedge_point(0.7, 1.0, 1e3, Side::PlusX).unwrap();
        let p = predict_q(&sd, &wp).unwrap();
        let g = gen_as_predict(&sd, &wp).unwrap();
        assert_eq!(p.value(), C64::new(1.0, 0.0));
        assert_eq!(g.value(), C64::new(1.0, 0.0));
        let wm = wedge_point(0.9, 1.0, 1e3, Side::MinusX).unwrap();
        assert_eq!(predict_q(&sd, &wm).unwrap().value(), C64::new(0.0, 0.0));
        assert_eq!(gen_as_predict(&sd, &wm).unwrap().value(), C64::new(0.0, 0.0));
    }

    #[test]
    fn leading_modulus_is_q() {
        let sd = SyntheticCaseII::new(1.0, 0.5, 0.8).unwrap();
        let q = amplitude_q(&sd).unwrap();
        for alpha in [0.3, 0.7, 0.95] {
            let wp = wedge_point(alpha, 1.2, 1e4, Side::PlusX).unwrap();
            let p = predict_q(&sd, &wp).unwrap();
            assert!((p.leading.norm() - q).abs() < 1e-14 * q);
        }
    }

    #[test]
    fn regime_boundaries() {
        use Regime::*;
        assert_eq!(Regime::select(CaseTag::CaseI, Side::PlusX, 2.0 / 3.0), CaseIPlusLeading);
        assert_eq!(Regime::select(CaseTag::CaseI, Side::MinusX, 2.0 / 3.0), CaseIMinusBound);
        assert_eq!(Regime::select(CaseTag::CaseII, Side::PlusX, 0.5), CaseIIPlusCorrectedMid);
        assert_eq!(Regime::select(CaseTag::CaseII, Side::MinusX, 0.8), CaseIIMinusTermLow);
        assert_eq!(Regime::select(CaseTag::CaseII, Side::MinusX, 0.81), CaseIIMinusTermHigh);
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let wp = wedge_point(0.5, 1.0, 1e3, Side::MinusX).unwrap();
        let p = predict_q(&sd, &wp).unwrap();
        assert!(p.bound_only);
        assert_eq!(p.value(), C64::new(0.0, 0.0));
        assert!((p.error_order.t_exponent - 1.0 / (0.5 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn predict_tracks_gen_as_for_pure_step() {
        let sd = PureStepSpectrum { amplitude: 1.0 };
        let (mut xs, mut gaps, mut orders) = (vec![], vec![], vec![]);
        for e in 4..=10 {
            let t = 10f64.powi(e);
            let wp = wedge_point(0.75, 1.0, t, Side::PlusX).unwrap();
            let p = predict_q(&sd, &wp).unwrap();
            let g = gen_as_predict(&sd, &wp).unwrap();
            xs.push(t.ln());
            gaps.push((p.value() - g.value()).norm().ln());
            orders.push(p.error_order.magnitude(t).ln());
        }
        assert!(fit_slope(&xs, &gaps) < fit_slope(&xs, &orders));
    }

    #[test]
    fn matching_limits() {
        let step = PureStepSpectrum { amplitude: 1.0 };
        let r = matching_check(&step, 1.0, &[0.9, 0.99, 0.999], &[10.0, 100.0, 1000.0], 1.0).unwrap();
        assert_eq!(r.phi0_residual, 0.0);
        assert!(r.phase_rows.iter().all(|row| row.residual_at_xi < 1e-12));
        assert!((r.minus_side_exponent.unwrap() + 0.5).abs() < 1e-3);
        let syn = SyntheticCaseII::new(1.0, 0.5, 0.8).unwrap();
        let r = matching_check(&syn, 1.0, &[0.9, 0.99], &[], 1.0).unwrap();
        let ratio = r.alpha_hat.unwrap() / r.alpha_hat_limit.unwrap();
        assert!((ratio + 1.0).norm() < 1e-10);
        assert!((r.nu_zero.unwrap() - (0.75f64).ln() / (2.0 * PI)).abs() < 1e-12);
    }
}
