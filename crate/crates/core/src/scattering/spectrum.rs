use crate::{Error, Result, C64, I};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    CaseI,
    CaseII,
}

/// Behaviour of the spectral functions at k = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmallK {
    /// a₂(0) ≠ 0 (real by symmetry).
    CaseI { a2_zero: f64 },
    /// a₂(0) = 0: a₁₁ = lim k·a₁(k), a₂₁ = lim a₂(k)/k, b₀ = b(0).
    CaseII { a11: C64, a21: C64, b0: C64 },
}

impl SmallK {
    pub fn case(&self) -> CaseTag {
        match self {
            SmallK::CaseI { .. } => CaseTag::CaseI,
            SmallK::CaseII { .. } => CaseTag::CaseII,
        }
    }
}

/// Real-axis spectral data as seen by the phase functionals and the asymptotic formulas.
///
/// `L(k) = ln(1 + r₁r₂)` is taken on the branch that is continuous on each half-axis and
/// vanishes at infinity. The regular weight is `G = L − ln k²` in Case I and `G = L` in
/// Case II; it stays bounded at k = 0.
pub trait Spectrum: Sync {
    fn amplitude(&self) -> f64;
    fn small_k(&self) -> SmallK;
    fn k1(&self) -> f64;
    fn is_reflectionless(&self) -> bool;
    /// G(k) and dG/dk for real k ≠ 0.
    fn regular_weight(&self, k: f64) -> (C64, C64);
    fn r1(&self, k: f64) -> C64;

    fn case(&self) -> CaseTag {
        self.small_k().case()
    }

    /// lim arg(1 + r₁r₂) as k → 0⁻; zero for closed-form spectra.
    fn assumption2(&self) -> f64 {
        0.0
    }

    /// |k| values where the representation of the data changes (sample range ends).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// lim G(k), k → 0.
    fn regular_weight_at_zero(&self) -> C64 {
        let a = self.amplitude();
        match self.small_k() {
            SmallK::CaseI { a2_zero } => C64::from((4.0 / (a * a * a2_zero * a2_zero)).ln()),
            SmallK::CaseII { a11, a21, .. } => -(a11 * a21).ln(),
        }
    }

    /// L(k) and dL/dk.
    fn log_weight(&self, k: f64) -> (C64, C64) {
        let (g, dg) = self.regular_weight(k);
        match self.case() {
            CaseTag::CaseI => (g + (k * k).ln(), dg + 2.0 / k),
            CaseTag::CaseII => (g, dg),
        }
    }

    /// r₂ = (e^L − 1)/r₁, so that 1 + r₁r₂ = e^L by construction.
    fn r2(&self, k: f64) -> C64 {
        if self.is_reflectionless() {
            return C64::new(0.0, 0.0);
        }
        let (l, _) = self.log_weight(k);
        expm1(l) / self.r1(k)
    }

    /// (r₁, r₂, 1 + r₁r₂); fails at a pole (r₁ = 0 while 1 + r₁r₂ ≠ 1).
    fn reflection(&self, k: f64) -> Result<(C64, C64, C64)> {
        if k == 0.0 {
            return Err(Error::Pole(0.0));
        }
        if self.is_reflectionless() {
            let z = C64::new(0.0, 0.0);
            return Ok((z, z, C64::new(1.0, 0.0)));
        }
        let r1 = self.r1(k);
        let (l, _) = self.log_weight(k);
        let r2 = self.r2(k);
        if !(r2.re.is_finite() && r2.im.is_finite()) {
            return Err(Error::Pole(k));
        }
        Ok((r1, r2, l.exp()))
    }
}

pub(crate) fn expm1(z: C64) -> C64 {
    if z.norm() < 1e-5 {
        z + z * z / 2.0 + z * z * z / 6.0
    } else {
        z.exp() - 1.0
    }
}

/// Closed-form spectrum of the pure step q₀ = A·H(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStepSpectrum {
    pub amplitude: f64,
}

impl PureStepSpectrum {
    /// S(k) = [[1 + A²/4k², −A/2ik], [A/2ik, 1]].
    pub fn matrix(&self, k: f64) -> [[C64; 2]; 2] {
        let a = self.amplitude;
        let kc = C64::new(k, 0.0);
        [[1.0 + a * a / (4.0 * kc * kc), -a / (2.0 * I * kc)], [a / (2.0 * I * kc), C64::new(1.0, 0.0)]]
    }
}

impl Spectrum for PureStepSpectrum {
    fn amplitude(&self) -> f64 {
        self.amplitude
    }
    fn small_k(&self) -> SmallK {
        SmallK::CaseI { a2_zero: 1.0 }
    }
    fn k1(&self) -> f64 {
        self.amplitude / 2.0
    }
    fn is_reflectionless(&self) -> bool {
        false
    }
    fn regular_weight(&self, k: f64) -> (C64, C64) {
        let a2 = self.amplitude * self.amplitude;
        let d = 4.0 * k * k + a2;
        (C64::from((4.0 / d).ln()), C64::from(-8.0 * k / d))
    }
    fn r1(&self, k: f64) -> C64 {
        let a = self.amplitude;
        C64::new(0.0, -2.0 * a * k / (4.0 * k * k + a * a))
    }
}

/// Closed-form spectrum of the stationary soliton: S = diag((k − iA/2)/k, k/(k − iA/2)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonSpectrum {
    pub amplitude: f64,
}

impl SolitonSpectrum {
    pub fn matrix(&self, k: f64) -> [[C64; 2]; 2] {
        let kc = C64::new(k, 0.0);
        let m = kc - I * self.amplitude / 2.0;
        let z = C64::new(0.0, 0.0);
        [[m / kc, z], [z, kc / m]]
    }
}

impl Spectrum for SolitonSpectrum {
    fn amplitude(&self) -> f64 {
        self.amplitude
    }
    fn small_k(&self) -> SmallK {
        let a = self.amplitude;
        SmallK::CaseII { a11: C64::new(0.0, -a / 2.0), a21: C64::new(0.0, 2.0 / a), b0: C64::new(0.0, 0.0) }
    }
    fn k1(&self) -> f64 {
        self.amplitude / 2.0
    }
    fn is_reflectionless(&self) -> bool {
        true
    }
    fn regular_weight(&self, _k: f64) -> (C64, C64) {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }
    fn r1(&self, _k: f64) -> C64 {
        C64::new(0.0, 0.0)
    }
}

/// Model Case II spectrum with nonzero reflection at k = 0.
///
/// b(k) = η e^{iθk}/(1+k²), a₁ = ((k − iA/2)/k)·f, a₂ = (k/(k − iA/2))·f with
/// f = √(1 − b(k)·conj(b(−k))). It has the symmetries and the determinant identity of a
/// genuine spectrum, a₁(iA/2) = 0, and a₁₁a₂₁ = 1 − η².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticCaseII {
    pub amplitude: f64,
    pub eta: f64,
    pub theta: f64,
}

impl SyntheticCaseII {
    pub fn new(amplitude: f64, eta: f64, theta: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !(eta.abs() < 1.0) {
            return Err(Error::Invalid(format!("need A > 0 and |eta| < 1, got A={amplitude}, eta={eta}")));
        }
        Ok(Self { amplitude, eta, theta })
    }

    pub fn b(&self, k: f64) -> C64 {
        C64::new(0.0, self.theta * k).exp() * (self.eta / (1.0 + k * k))
    }

    /// b(k)·conj(b(−k)).
    fn product(&self, k: f64) -> C64 {
        C64::new(0.0, 2.0 * self.theta * k).exp() * (self.eta * self.eta / (1.0 + k * k).powi(2))
    }

    pub fn a1(&self, k: f64) -> C64 {
        let kc = C64::new(k, 0.0);
        (kc - I * self.amplitude / 2.0) / kc * (1.0 - self.product(k)).sqrt()
    }

    pub fn a2(&self, k: f64) -> C64 {
        let kc = C64::new(k, 0.0);
        kc / (kc - I * self.amplitude / 2.0) * (1.0 - self.product(k)).sqrt()
    }
}

impl Spectrum for SyntheticCaseII {
    fn amplitude(&self) -> f64 {
        self.amplitude
    }
    fn small_k(&self) -> SmallK {
        let a = self.amplitude;
        let f = (1.0 - self.eta * self.eta).sqrt();
        SmallK::CaseII {
            a11: C64::new(0.0, -a / 2.0 * f),
            a21: C64::new(0.0, 2.0 / a * f),
            b0: C64::new(self.eta, 0.0),
        }
    }
    fn k1(&self) -> f64 {
        self.amplitude / 2.0
    }
    fn is_reflectionless(&self) -> bool {
        self.eta == 0.0
    }
    fn regular_weight(&self, k: f64) -> (C64, C64) {
        let p = self.product(k);
        let dp = p * (C64::new(0.0, 2.0 * self.theta) - 4.0 * k / (1.0 + k * k));
        (-(1.0 - p).ln(), dp / (1.0 - p))
    }
    fn r1(&self, k: f64) -> C64 {
        self.b(k) / self.a1(k)
    }
}
