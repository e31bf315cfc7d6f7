use crate::ode::{dp45, OdeOptions};
use crate::profiles::InitialProfile;
use crate::{Error, Result, C64, I};

pub type Mat2 = [[C64; 2]; 2];

/// Anything that can serve as the t = 0 potential of the spectral problem.
pub trait Potential: Sync {
    fn q0(&self, x: f64) -> C64;
    fn amplitude(&self) -> f64;
    /// q0 is exactly 0 below −R and exactly A above R.
    fn radius(&self) -> f64;
}

impl Potential for InitialProfile {
    fn q0(&self, x: f64) -> C64 {
        self.eval(x)
    }
    fn amplitude(&self) -> f64 {
        self.amplitude
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

/// Left limit q0(0−) at x = 0 and right limit of the mirrored factor, so that the
/// midpoint convention of a jump at the origin never leaks into one-sided integrals.
pub(crate) fn q_left<P: Potential + ?Sized>(p: &P, x: f64) -> C64 {
    if x == 0.0 {
        p.q0(-f64::MIN_POSITIVE)
    } else {
        p.q0(x)
    }
}

pub(crate) fn mirror_conj<P: Potential + ?Sized>(p: &P, x: f64) -> C64 {
    if x == 0.0 {
        p.q0(f64::MIN_POSITIVE).conj()
    } else {
        p.q0(-x).conj()
    }
}

/// (q0(x), conj q0(−x)) with one-sided limits at x = 0 taken from the side of `from`.
fn coefficients<P: Potential + ?Sized>(p: &P, x: f64, from: f64) -> (C64, C64) {
    if x == 0.0 && from > 0.0 {
        (p.q0(f64::MIN_POSITIVE), p.q0(-f64::MIN_POSITIVE).conj())
    } else {
        (q_left(p, x), mirror_conj(p, x))
    }
}

/// N₋(k) = [[1, 0], [A/(2ik), 1]].
pub fn n_minus(a: f64, k: C64) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    [[one, z], [a / (2.0 * I * k), one]]
}

/// N₊(k) = [[1, A/(2ik)], [0, 1]].
pub fn n_plus(a: f64, k: C64) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    [[one, a / (2.0 * I * k)], [z, one]]
}

pub fn det(m: &Mat2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Inverse of a 2×2 matrix; fails when |det| < 1e-12.
pub fn inverse(m: &Mat2, k: f64) -> Result<Mat2> {
    let d = det(m);
    if d.norm() < 1e-12 {
        return Err(Error::Inversion { k, det: d.norm() });
    }
    Ok([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

fn flatten(m: &Mat2) -> [C64; 4] {
    [m[0][0], m[0][1], m[1][0], m[1][1]]
}

fn unflatten(v: &[C64; 4]) -> Mat2 {
    [[v[0], v[1]], [v[2], v[3]]]
}

/// Ψ' = UΨ − ik[σ₃, Ψ], U = [[0, q0(x)], [−conj q0(−x), 0]].
fn rhs<P: Potential + ?Sized>(p: &P, k: C64, x: f64, from: f64, y: &[C64; 4]) -> [C64; 4] {
    let (q, pb) = coefficients(p, x, from);
    let ik2 = 2.0 * I * k;
    [q * y[2], q * y[3] - ik2 * y[1], -pb * y[0] + ik2 * y[2], -pb * y[1]]
}

/// Ψ₁(0, 0, k) and Ψ₂(0, 0, k) for real k ≠ 0.
pub fn jost_at_origin<P: Potential + ?Sized>(p: &P, k: f64, opts: &OdeOptions) -> Result<(Mat2, Mat2)> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("Jost solutions need real k != 0, got {k}")));
    }
    let kc = C64::new(k, 0.0);
    let a = p.amplitude();
    let r = p.radius();
    let wrap = |e: Error| match e {
        Error::Ode { x, reason } => Error::Scattering { k, reason: format!("{reason} at x={x}") },
        other => other,
    };
    let psi1 = dp45(|x, y| rhs(p, kc, x, -r, y), -r, flatten(&n_minus(a, kc)), 0.0, opts).map_err(wrap)?;
    let psi2 = dp45(|x, y| rhs(p, kc, x, r, y), r, flatten(&n_plus(a, kc)), 0.0, opts).map_err(wrap)?;
    Ok((unflatten(&psi1), unflatten(&psi2)))
}

/// S(k) = Ψ₂(0,0,k)⁻¹ Ψ₁(0,0,k).
pub fn scattering_matrix_at<P: Potential + ?Sized>(p: &P, k: f64, opts: &OdeOptions) -> Result<Mat2> {
    let (psi1, psi2) = jost_at_origin(p, k, opts)?;
    Ok(mul(&inverse(&psi2, k)?, &psi1))
}

/// a₁(iρ) for ρ > 0 as det[Ψ₁⁽¹⁾, Ψ₂⁽²⁾] at x = 0, both columns integrated in their
/// decaying direction.
pub fn a1_imaginary<P: Potential + ?Sized>(p: &P, rho: f64, opts: &OdeOptions) -> Result<f64> {
    let a = p.amplitude();
    let r = p.radius();
    let wrap = |e: Error| match e {
        Error::Ode { x, reason } => Error::Scattering { k: rho, reason: format!("imaginary axis: {reason} at x={x}") },
        other => other,
    };
    // column 1 of Ψ₁: (ψ₁₁, ψ₂₁)' = (q ψ₂₁, −p̄ ψ₁₁ − 2ρ ψ₂₁)
    let col1 = dp45(
        |x, y: &[C64; 2]| {
            let q = q_left(p, x);
            let pb = mirror_conj(p, x);
            [q * y[1], -pb * y[0] - 2.0 * rho * y[1]]
        },
        -r,
        [C64::new(1.0, 0.0), C64::new(-a / (2.0 * rho), 0.0)],
        0.0,
        opts,
    )
    .map_err(wrap)?;
    // column 2 of Ψ₂: (ψ₁₂, ψ₂₂)' = (q ψ₂₂ + 2ρ ψ₁₂, −p̄ ψ₁₂)
    let col2 = dp45(
        |x, y: &[C64; 2]| {
            let (q, pb) = coefficients(p, x, r);
            [q * y[1] + 2.0 * rho * y[0], -pb * y[0]]
        },
        r,
        [C64::new(-a / (2.0 * rho), 0.0), C64::new(1.0, 0.0)],
        0.0,
        opts,
    )
    .map_err(wrap)?;
    let d = col1[0] * col2[1] - col2[0] * col1[1];
    Ok(d.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::InitialProfile;

    struct Zero;
    impl Potential for Zero {
        fn q0(&self, _x: f64) -> C64 {
            C64::new(0.0, 0.0)
        }
        fn amplitude(&self) -> f64 {
            0.0
        }
        fn radius(&self) -> f64 {
            5.0
        }
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < tol))
    }

    #[test]
    fn pure_step_jost_is_background() {
        let p = InitialProfile::pure_step(2.0);
        for k in [-3.0, -0.01, 0.5, 7.0] {
            let (p1, p2) = jost_at_origin(&p, k, &OdeOptions::default()).unwrap();
            assert!(close(&p1, &n_minus(2.0, C64::new(k, 0.0)), 1e-12));
            assert!(close(&p2, &n_plus(2.0, C64::new(k, 0.0)), 1e-12));
        }
    }

    #[test]
    fn zero_potential_gives_identity() {
        let (p1, p2) = jost_at_origin(&Zero, 1.3, &OdeOptions::default()).unwrap();
        let id = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
        assert!(close(&p1, &id, 1e-14) && close(&p2, &id, 1e-14));
    }

    #[test]
    fn step_scattering_matrix() {
        let s = scattering_matrix_at(&InitialProfile::pure_step(2.0), 1.0, &OdeOptions::default()).unwrap();
        let want = [[C64::new(2.0, 0.0), C64::new(0.0, 1.0)], [C64::new(0.0, -1.0), C64::new(1.0, 0.0)]];
        assert!(close(&s, &want, 1e-12));
    }

    #[test]
    fn smoothed_step_determinant_conserved() {
        let p = InitialProfile::smoothed_step(1.0, 1.0);
        let (p1, p2) = jost_at_origin(&p, 1.0, &OdeOptions::default()).unwrap();
        assert!((det(&p1) - 1.0).norm() < 1e-10);
        assert!((det(&p2) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn imaginary_axis_step() {
        let p = InitialProfile::pure_step(2.0);
        for rho in [0.3, 1.0, 4.0] {
            let v = a1_imaginary(&p, rho, &OdeOptions::default()).unwrap();
            assert!((v - (1.0 - 1.0 / (rho * rho))).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_k() {
        assert!(jost_at_origin(&InitialProfile::pure_step(1.0), 0.0, &OdeOptions::default()).is_err());
    }
}
