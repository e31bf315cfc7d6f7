use crate::{Error, Result, C64};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 607.0 / 128.0;

const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_5e-6,
];

/// Principal branch of ln Γ(z).
///
/// Lanczos approximation (g = 607/128, 15 terms) for Re z ≥ 1/2, reflection otherwise.
pub fn log_gamma(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Domain(format!("Gamma has a pole at z = {}", z.re)));
    }
    if z.im < 0.0 {
        return log_gamma(z.conj()).map(|w| w.conj());
    }
    if z.re >= 0.5 {
        return Ok(lanczos(z));
    }
    // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z), with ln sin taken continuously in Im z ≥ 0.
    let w = (C64::new(0.0, 2.0 * PI) * z).exp();
    let ln_sin = C64::new(0.0, -PI) * z + log1p(-w) - std::f64::consts::LN_2
        + C64::new(0.0, PI / 2.0);
    Ok(C64::from(PI.ln()) - ln_sin - lanczos(1.0 - z))
}

/// Γ(z) for z away from the poles.
pub fn gamma(z: C64) -> Result<C64> {
    log_gamma(z).map(|l| l.exp())
}

fn lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::from(LANCZOS_COEF[0]);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

fn log1p(w: C64) -> C64 {
    if w.norm() < 1e-4 {
        w - w * w / 2.0 + w * w * w / 3.0 - w * w * w * w / 4.0
    } else {
        (1.0 + w).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // mpmath.loggamma, 30 digits
    const REFERENCE: [((f64, f64), (f64, f64)); 10] = [
        ((0.5, 0.0), (0.5723649429247001, 0.0)),
        ((0.0, 1.0), (-0.6509231993018564, -1.8724366472624299)),
        ((0.0, -0.3), (1.1320265534262977, 1.7336169989627523)),
        ((2.5, 7.0), (-6.159823261541296, 9.486522412573896)),
        ((-1.5, 0.5), (0.0008154671525182346, -5.926765791507547)),
        ((-3.2, -4.0), (-10.91786884732527, 5.786611948083218)),
        ((0.1, 40.0), (-63.38846256993902, 106.92590126764406)),
        ((10.0, 0.0), (12.801827480081469, 0.0)),
        ((-0.5, 0.0), (1.2655121234846454, -3.141592653589793)),
        ((0.3, -12.0), (-18.42755005195729, -17.50652660788851)),
    ];

    #[test]
    fn matches_reference_values() {
        for ((zr, zi), (wr, wi)) in REFERENCE {
            let w = log_gamma(C64::new(zr, zi)).unwrap();
            let scale = C64::new(wr, wi).norm().max(1.0);
            assert!(
                (w - C64::new(wr, wi)).norm() < 1e-12 * scale,
                "z=({zr},{zi}) got {w} want ({wr},{wi})"
            );
        }
    }

    #[test]
    fn unit_argument_is_zero() {
        assert!(log_gamma(C64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(C64::new(2.0, 0.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        let g = gamma(C64::new(0.0, 1.0)).unwrap();
        assert_relative_eq!(g.norm(), (PI / PI.sinh()).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(g.norm(), 0.521_564_2, epsilon = 1e-6);
    }

    #[test]
    fn poles_rejected() {
        assert!(log_gamma(C64::new(0.0, 0.0)).is_err());
        assert!(log_gamma(C64::new(-3.0, 0.0)).is_err());
    }
}
