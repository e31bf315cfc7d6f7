//! Step-like initial conditions and the exact one-soliton reference solution.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    PureStep,
    SmoothedStep,
    CompactStep,
    SolitonSnapshot,
}

/// Initial datum q₀ with q₀ = 0 for x ≤ −R and q₀ = A for x ≥ R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialProfile {
    pub kind: ProfileKind,
    pub amplitude: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub phase: f64,
    /// Location of the transition for smoothed and compact steps.
    #[serde(default)]
    pub center: f64,
}

fn default_width() -> f64 {
    1.0
}

fn default_radius() -> f64 {
    20.0
}

impl InitialProfile {
    pub fn new(kind: ProfileKind, amplitude: f64) -> Self {
        Self { kind, amplitude, width: default_width(), radius: default_radius(), phase: 0.0, center: 0.0 }
    }

    pub fn pure_step(amplitude: f64) -> Self {
        Self::new(ProfileKind::PureStep, amplitude)
    }

    pub fn smoothed_step(amplitude: f64, width: f64) -> Self {
        Self { width, ..Self::new(ProfileKind::SmoothedStep, amplitude) }
    }

    /// Soliton snapshot, clamped where its tails fall below e^{−40}.
    pub fn soliton(amplitude: f64, phase: f64) -> Self {
        let radius = (40.0 / amplitude).max(default_radius());
        Self { phase, radius, ..Self::new(ProfileKind::SolitonSnapshot, amplitude) }
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Invalid(format!("amplitude must be positive, got {}", self.amplitude)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Invalid(format!("support radius must be positive, got {}", self.radius)));
        }
        if !(self.width >= 0.0 && self.width.is_finite()) {
            return Err(Error::Invalid(format!("width must be nonnegative, got {}", self.width)));
        }
        if self.kind == ProfileKind::SolitonSnapshot && (self.phase.rem_euclid(std::f64::consts::TAU)).abs() < 1e-12 {
            return Err(Error::Invalid("soliton phase 0 puts the singularity at x=0, t=0".into()));
        }
        if !self.center.is_finite() || self.center.abs() >= self.radius {
            return Err(Error::Invalid(format!("center must lie inside the support, got {}", self.center)));
        }
        if self.center != 0.0 && matches!(self.kind, ProfileKind::PureStep | ProfileKind::SolitonSnapshot) {
            return Err(Error::Invalid("center applies to smoothed and compact steps only".into()));
        }
        if !self.phase.is_finite() {
            return Err(Error::Invalid("phase must be finite".into()));
        }
        Ok(())
    }

    /// q₀(x).
    pub fn eval(&self, x: f64) -> C64 {
        let a = self.amplitude;
        if x <= -self.radius {
            return C64::new(0.0, 0.0);
        }
        if x >= self.radius {
            return C64::new(a, 0.0);
        }
        let y = if self.kind == ProfileKind::PureStep { x } else { x - self.center };
        let pure = || {
            if y < 0.0 {
                0.0
            } else if y > 0.0 {
                a
            } else {
                0.5 * a
            }
        };
        match self.kind {
            ProfileKind::PureStep => C64::new(pure(), 0.0),
            ProfileKind::SmoothedStep => {
                if self.width == 0.0 {
                    C64::new(pure(), 0.0)
                } else {
                    C64::new(0.5 * a * (1.0 + ((x - self.center) / self.width).tanh()), 0.0)
                }
            }
            ProfileKind::CompactStep => {
                if self.width == 0.0 {
                    return C64::new(pure(), 0.0);
                }
                let u = ((x - self.center + self.width) / (2.0 * self.width)).clamp(0.0, 1.0);
                C64::new(a * u * u * (3.0 - 2.0 * u), 0.0)
            }
            ProfileKind::SolitonSnapshot => {
                a / (1.0 - C64::new(-a * x, self.phase).exp())
            }
        }
    }

    /// Hex SHA-256 of the canonical JSON form, used to tag cached spectra.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("profile serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// N nodes on [−L, L] with x_{N−1−j} = −x_j bit-exactly.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "symmetric grid needs odd n >= 3");
    let h = 2.0 * half_width / (n - 1) as f64;
    let mid = n / 2;
    let mut x = vec![0.0; n];
    for j in 0..mid {
        let v = -half_width + j as f64 * h;
        x[j] = v;
        x[n - 1 - j] = -v;
    }
    x
}

pub fn check_symmetric(grid: &[f64]) -> Result<()> {
    let n = grid.len();
    let scale = grid.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for j in 0..n {
        if (grid[j] + grid[n - 1 - j]).abs() > 1e-12 * scale {
            return Err(Error::AsymmetricGrid { index: j });
        }
    }
    Ok(())
}

/// q₀ on a grid symmetric about 0.
pub fn sample_profile(p: &InitialProfile, grid: &[f64]) -> Result<Vec<C64>> {
    p.validate()?;
    check_symmetric(grid)?;
    Ok(grid.iter().map(|&x| p.eval(x)).collect())
}

/// A / (1 − e^{−Ax − iA²t + iφ}).
pub fn soliton_exact(a: f64, phi: f64, x: f64, t: f64) -> Result<C64> {
    let denom = 1.0 - C64::new(-a * x, -a * a * t + phi).exp();
    let modulus = denom.norm();
    if modulus < 1e-8 {
        return Err(Error::BlowUpProximity { x, t, modulus });
    }
    Ok(a / denom)
}
