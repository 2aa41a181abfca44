use num_complex::Complex64;

use crate::error::{domain, Result};

use super::quadrature::{integrate, QuadratureResult, QuadratureSpec};

/// Chebyshev polynomial `T_2(r) = 2 r^2 - 1`.
pub fn chebyshev_t2(r: f64) -> f64 {
    2.0 * r * r - 1.0
}

/// `int_x^inf exp(-s^2) ds`, i.e. `sqrt(pi)/2 * erfc(x)`.
pub fn gauss_tail(x: f64) -> f64 {
    0.5 * std::f64::consts::PI.sqrt() * libm::erfc(x)
}

/// Tolerances used by [`li`]; tighter than the kernel defaults since the
/// integrand is cheap and smooth.
pub fn li_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-14,
        max_subdivisions: 400,
        tail_cutoff: 0.01,
    }
}

/// Logarithmic integral offset at 2: `int_2^u dxi / log xi` for `u > 1`,
/// computed by quadrature.
///
/// After `xi = e^s` the integrand is `e^s / s`; its `1/s` part is integrated
/// exactly so that the remaining integrand `expm1(s)/s` is smooth even as
/// `u -> 1+`.
pub fn li_with(u: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(u > 1.0 && u.is_finite()) {
        return Err(domain(format!(
            "li(u) needs u > 1 (the integrand is singular at 1), got {u}"
        )));
    }
    let lo = std::f64::consts::LN_2;
    let hi = u.ln();
    let smooth = integrate(|s: f64| s.exp_m1() / s, lo, hi, spec)?;
    let singular = (hi / lo).ln();
    Ok(QuadratureResult {
        value: smooth.value + singular,
        ..smooth
    })
}

pub fn li(u: f64) -> Result<f64> {
    li_with(u, &li_spec()).map(|r| r.value)
}

/// Hyperbolic distance between two points of the upper half-plane.
pub fn dist_hyp(z: Complex64, w: Complex64) -> Result<f64> {
    if !(z.im > 0.0 && w.im > 0.0) {
        return Err(domain(format!(
            "points must lie in the upper half-plane, got {z} and {w}"
        )));
    }
    // arcosh(1 + d^2/(2 y1 y2)) = 2 asinh(d / (2 sqrt(y1 y2)))
    let d = (z - w).norm();
    Ok(2.0 * (d / (2.0 * (z.im * w.im).sqrt())).asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn t2_values() {
        assert_eq!(chebyshev_t2(1.0), 1.0);
        assert_eq!(chebyshev_t2(2.0), 7.0);
        assert_eq!(chebyshev_t2(0.0), -1.0);
    }

    #[test]
    fn gauss_tail_limits() {
        assert!((gauss_tail(0.0) - SQRT_PI / 2.0).abs() < 1e-15);
        assert!((gauss_tail(-20.0) - SQRT_PI).abs() < 1e-12);
        for x in [0.1, 0.5, 1.0, 2.5, 4.0] {
            assert!((gauss_tail(x) + gauss_tail(-x) - SQRT_PI).abs() < 1e-12);
        }
    }

    #[test]
    fn li_sign_pattern() {
        assert_eq!(li(2.0).unwrap(), 0.0);
        assert!(li(5f64.ln()).unwrap() < 0.0);
        assert!(li(10.0).unwrap() > 0.0);
        assert!(li(1.0).is_err());
        assert!(li(0.5).is_err());
    }

    #[test]
    fn li_near_one_is_finite() {
        let v = li(1.0 + 1e-9).unwrap();
        assert!(v.is_finite() && v < -10.0);
    }

    #[test]
    fn distance_examples() {
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(dist_hyp(i, i).unwrap(), 0.0);
        let d = dist_hyp(i, Complex64::new(0.0, 2.0)).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-15);
        let d = dist_hyp(i, Complex64::new(1.0, 1.0)).unwrap();
        assert!((d - 1.5f64.acosh()).abs() < 1e-15);
        assert!(dist_hyp(i, Complex64::new(0.0, 0.0)).is_err());
    }

    fn point() -> impl Strategy<Value = Complex64> {
        (-5.0..5.0f64, 0.01..5.0f64).prop_map(|(x, y)| Complex64::new(x, y))
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in point(), b in point(), c in point()) {
            let ab = dist_hyp(a, b).unwrap();
            let bc = dist_hyp(b, c).unwrap();
            let ac = dist_hyp(a, c).unwrap();
            prop_assert!((ab - dist_hyp(b, a).unwrap()).abs() < 1e-12);
            prop_assert!(ac <= ab + bc + 1e-10);
        }

        #[test]
        fn gauss_tail_decreasing(x in -6.0..6.0f64, dx in 1e-3..1.0f64) {
            prop_assert!(gauss_tail(x + dx) <= gauss_tail(x));
        }

        #[test]
        fn li_increasing(u in 1.001..1e6f64, factor in 1.01..2.0f64) {
            prop_assert!(li(u * factor).unwrap() > li(u).unwrap());
        }
    }
}
