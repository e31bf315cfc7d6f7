use crate::{Error, Result, C64};
use std::collections::BinaryHeap;

/// Gauss-Kronrod 7/15 abscissae (non-negative half, descending) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Where the integrand has a logarithmic endpoint singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoint {
    #[default]
    None,
    LogAtLeftEnd,
    LogAtRightEnd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub endpoint: Endpoint,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 2000, endpoint: Endpoint::None }
    }
}

impl QuadratureSpec {
    pub fn with_endpoint(mut self, endpoint: Endpoint) -> Self {
        self.endpoint = endpoint;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Invalid(format!("bad quadrature spec {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
}

/// ∫_a^b f(ζ) dζ for complex-valued f; `a` may be −∞ and `b` may be +∞.
///
/// Infinite ends are mapped onto (0,1] by ζ = b − (1−u)/u. With a log flag the named end is
/// handled by writing the distance to it as e^u.
pub fn quad<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> C64,
{
    spec.validate()?;
    quad_dyn(&f, a, b, spec)
}

fn quad_dyn(f: &dyn Fn(f64) -> C64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Invalid("NaN integration limit".into()));
    }
    if a == b {
        return Ok(QuadResult { value: C64::new(0.0, 0.0), error: 0.0 });
    }
    if a > b {
        let flipped = QuadratureSpec {
            endpoint: match spec.endpoint {
                Endpoint::LogAtLeftEnd => Endpoint::LogAtRightEnd,
                Endpoint::LogAtRightEnd => Endpoint::LogAtLeftEnd,
                Endpoint::None => Endpoint::None,
            },
            ..*spec
        };
        return quad_dyn(f, b, a, &flipped).map(|r| QuadResult { value: -r.value, error: r.error });
    }
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => {
            let left = quad_dyn(f, a, 0.0, &spec.with_endpoint(Endpoint::None))?;
            let right = quad_dyn(f, 0.0, b, &spec.with_endpoint(Endpoint::None))?;
            Ok(combine(left, right))
        }
        (true, false) => {
            if spec.endpoint == Endpoint::LogAtRightEnd {
                let left = quad_dyn(f, a, b - 1.0, &spec.with_endpoint(Endpoint::None))?;
                let right = quad_dyn(f, b - 1.0, b, spec)?;
                return Ok(combine(left, right));
            }
            let g = move |u: f64| {
                if u <= 0.0 {
                    return C64::new(0.0, 0.0);
                }
                f(b - (1.0 - u) / u) / (u * u)
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        (false, true) => {
            if spec.endpoint == Endpoint::LogAtLeftEnd {
                let left = quad_dyn(f, a, a + 1.0, spec)?;
                let right = quad_dyn(f, a + 1.0, b, &spec.with_endpoint(Endpoint::None))?;
                return Ok(combine(left, right));
            }
            let g = move |u: f64| {
                if u <= 0.0 {
                    return C64::new(0.0, 0.0);
                }
                f(a + (1.0 - u) / u) / (u * u)
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        (false, false) => match spec.endpoint {
            Endpoint::None => adaptive(f, a, b, spec),
            Endpoint::LogAtLeftEnd => log_end(f, a, b - a, spec),
            Endpoint::LogAtRightEnd => log_end(f, b, a - b, spec),
        },
    }
}

/// Real-valued convenience wrapper.
pub fn quad_real<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    quad(|x| C64::new(f(x), 0.0), a, b, spec).map(|r| r.value.re)
}

fn combine(a: QuadResult, b: QuadResult) -> QuadResult {
    QuadResult { value: a.value + b.value, error: a.error + b.error }
}

/// ∫ over the interval from `end` to `end + span`, written as ζ = end + span·e^{u}, u ≤ 0,
/// then u = −(1−τ)/τ.
fn log_end(f: &dyn Fn(f64) -> C64, end: f64, span: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let g = |tau: f64| {
        if tau <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let u = -(1.0 - tau) / tau;
        let w = u.exp();
        let zeta = end + span * w;
        if w == 0.0 || zeta == end {
            // below the resolution of the endpoint; the weight ~ w|ln w| is negligible
            return C64::new(0.0, 0.0);
        }
        f(zeta) * (span * w / (tau * tau))
    };
    let r = adaptive(&g, 0.0, 1.0, spec)?;
    // g integrates from `end` towards `end + span`; flip when that runs right to left
    Ok(if span > 0.0 { r } else { QuadResult { value: -r.value, error: r.error } })
}

struct Segment {
    lo: f64,
    hi: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> C64 + ?Sized>(f: &F, lo: f64, hi: f64) -> Segment {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).norm();
    Segment { lo, hi, value, error }
}

fn adaptive<F: Fn(f64) -> C64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let first = gk15(f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut n = 1;
    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Quadrature { estimate: (total.re, total.im), error: f64::INFINITY });
        }
        if err <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            return Ok(QuadResult { value: total, error: err });
        }
        if n >= spec.max_subdivisions {
            return Err(Error::Quadrature { estimate: (total.re, total.im), error: err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval cannot be split further in floating point
            return Err(Error::Quadrature { estimate: (total.re, total.im), error: err });
        }
        let left = gk15(f, worst.lo, mid);
        let right = gk15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        n += 1;
        if n % 64 == 0 {
            // re-sum to shed accumulated rounding in the running totals
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn linear_on_unit_interval() {
        let r = quad(|x| C64::new(x, 0.0), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 0.5).norm() < 1e-15);
    }

    #[test]
    fn log_at_right_end() {
        let s = spec().with_endpoint(Endpoint::LogAtRightEnd);
        let r = quad(|x| C64::new((-x).ln(), 0.0), -1.0, 0.0, &s).unwrap();
        assert!((r.value + 1.0).norm() < 1e-11, "{}", r.value);
    }

    #[test]
    fn log_at_left_end() {
        let s = spec().with_endpoint(Endpoint::LogAtLeftEnd);
        // ∫_2^3 ln(ζ−2) dζ = −1
        let r = quad(|x| C64::new((x - 2.0).ln(), 0.0), 2.0, 3.0, &s).unwrap();
        assert!((r.value + 1.0).norm() < 1e-11, "{}", r.value);
    }

    #[test]
    fn semi_infinite_inverse_square() {
        let r = quad(|x| C64::new(1.0 / (x * x), 0.0), f64::NEG_INFINITY, -1.0, &spec()).unwrap();
        assert!((r.value - 1.0).norm() < 1e-12);
        let r = quad(|x| C64::new(1.0 / (x * x), 0.0), 1.0, f64::INFINITY, &spec()).unwrap();
        assert!((r.value - 1.0).norm() < 1e-12);
    }

    #[test]
    fn semi_infinite_with_log_end() {
        // ∫_{−∞}^{0} ln(−ζ) e^{ζ} dζ = −γ_E
        let s = spec().with_endpoint(Endpoint::LogAtRightEnd);
        let r = quad(|x| C64::new((-x).ln() * x.exp(), 0.0), f64::NEG_INFINITY, 0.0, &s).unwrap();
        assert!((r.value.re + 0.577_215_664_901_532_9).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let s = spec().with_endpoint(Endpoint::LogAtRightEnd);
        let r = quad(|x| C64::new((-x).ln(), 0.0), 0.0, -1.0, &s.with_endpoint(Endpoint::LogAtLeftEnd))
            .unwrap();
        assert!((r.value - 1.0).norm() < 1e-11);
    }

    #[test]
    fn complex_oscillatory() {
        // ∫_0^{2π} e^{3iζ} dζ = 0
        let r = quad(|x| C64::new(0.0, 3.0 * x).exp(), 0.0, std::f64::consts::TAU, &spec()).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn subdivision_limit_reports_estimate() {
        let s = QuadratureSpec { max_subdivisions: 2, ..spec() };
        let e = quad(|x| C64::new(1.0 / x.sqrt(), 0.0), 0.0, 1.0, &s).unwrap_err();
        assert!(matches!(e, Error::Quadrature { .. }));
    }

    #[test]
    fn rejects_bad_spec() {
        let s = QuadratureSpec { abs_tol: 0.0, ..spec() };
        assert!(quad(|_| C64::new(1.0, 0.0), 0.0, 1.0, &s).is_err());
    }
}
