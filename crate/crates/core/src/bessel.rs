//! Bessel `J0` by its power series and the first positive zero by bisection.
//!
//! Used as an independent reference for the disc's first Dirichlet
//! eigenvalue `j_{0,1}^2`; nothing here touches the eigensolver.

/// `J0(x) = sum_k (-1)^k (x/2)^(2k) / (k!)^2`, accurate for `|x| <= 10`.
pub fn j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of `J0`, bracketed in `[2, 3]`.
pub fn j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    debug_assert!(j0(lo) > 0.0 && j0(hi) < 0.0);
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(j0(0.0), 1.0);
        // tabulated J0(1) = 0.7651976865579666
        assert!((j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        // tabulated j_{0,1} = 2.404825557695773
        assert!((j0_first_zero() - 2.404_825_557_695_773).abs() < 1e-14);
        assert!(j0(j0_first_zero()).abs() < 1e-14);
    }
}
