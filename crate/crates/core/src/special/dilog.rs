use std::f64::consts::PI;

/// Li₂(x) for real x ≤ 1.
pub fn dilog(x: f64) -> f64 {
    assert!(x <= 1.0, "dilog needs x <= 1, got {x}");
    if x <= 0.0 {
        return dilog_neg(x);
    }
    if x <= 0.5 {
        return series(x);
    }
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    // Li₂(x) = π²/6 − ln x ln(1−x) − Li₂(1−x)
    PI * PI / 6.0 - x.ln() * (-x).ln_1p() - series(1.0 - x)
}

/// Li₂(x) for real x ≤ 0.
pub fn dilog_neg(x: f64) -> f64 {
    assert!(x <= 0.0, "dilog_neg needs x <= 0, got {x}");
    if x == 0.0 {
        return 0.0;
    }
    if x < -1.0 {
        // Li₂(x) = −π²/6 − ½ ln²(−x) − Li₂(1/x)
        let l = (-x).ln();
        return -PI * PI / 6.0 - 0.5 * l * l - dilog_neg(1.0 / x);
    }
    // Li₂(x) = −Li₂(y) − ½ ln²(1−x), y = x/(x−1) ∈ (0, 1/2]
    let y = x / (x - 1.0);
    let l = (1.0 - x).ln();
    -series(y) - 0.5 * l * l
}

fn series(y: f64) -> f64 {
    let mut term = y;
    let mut sum = 0.0f64;
    let mut n = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        sum += term / (n * n);
        term *= y;
        n += 1.0;
        if n > 200.0 {
            break;
        }
    }
    sum
}
