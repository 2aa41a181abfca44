//! Heat kernels on the upper half-plane for functions (`k0`) and for forms
//! of weight 1 (`k1`), the closed-form three-term upper bound for `k1`, and
//! the auxiliary functions behind the monotonicity of `k1` in `rho`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::error::{domain, require_positive, Result};
use crate::numerics::{
    chebyshev_t2, gauss_tail, integrate_singular, GaussianEnvelope, QuadratureResult, QuadratureSpec,
};

const LN_4: f64 = 2.0 * LN_2;

/// Heat time and hyperbolic distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub rho: f64,
}

impl KernelPoint {
    /// `rho = 0` is accepted; only the upper-bound terms reject it.
    pub fn new(t: f64, rho: f64) -> Result<Self> {
        require_positive("t", t)?;
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(domain(format!("rho must be nonnegative and finite, got {rho}")));
        }
        Ok(Self { t, rho })
    }
}

/// The three summands of the closed-form upper bound for `k1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K1UpperTerms {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl K1UpperTerms {
    pub fn sum(&self) -> f64 {
        self.a1 + self.a2 + self.a3
    }
}

/// `sqrt 2 e^{-t/4} / (4 pi t)^{3/2}`.
fn prefactor(t: f64) -> f64 {
    SQRT_2 * (-t / 4.0).exp() / (4.0 * PI * t).powf(1.5)
}

/// Heat kernel for functions:
/// `k0(t; rho) = sqrt 2 e^{-t/4} / (4 pi t)^{3/2} int_rho^inf r e^{-r^2/4t} / sqrt(cosh r - cosh rho) dr`.
pub fn k0(p: KernelPoint, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let KernelPoint { t, rho } = KernelPoint::new(p.t, p.rho)?;
    let g = |r: f64| r * (-r * r / (4.0 * t)).exp();
    let envelope = GaussianEnvelope {
        coeff: 1.0,
        growth: 0.0,
        t,
    };
    Ok(integrate_singular(g, &envelope, rho, spec)?.scaled(prefactor(t)))
}

/// Heat kernel for forms of weight 1: as [`k0`] with the extra factor
/// `T2(cosh(r/2) / cosh(rho/2))` in the integrand.
pub fn k1(p: KernelPoint, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let KernelPoint { t, rho } = KernelPoint::new(p.t, p.rho)?;
    let denom = (0.5 * rho).cosh();
    let g = |r: f64| r * (-r * r / (4.0 * t)).exp() * chebyshev_t2((0.5 * r).cosh() / denom);
    // T2(x) <= 2x^2 and cosh(r/2)/cosh(rho/2) <= 2 e^{(r - rho)/2}
    let envelope = GaussianEnvelope {
        coeff: 8.0 * (-rho).exp(),
        growth: 1.0,
        t,
    };
    Ok(integrate_singular(g, &envelope, rho, spec)?.scaled(prefactor(t)))
}

/// Closed-form upper bound `k1(t; rho) <= a1 + a2 + a3`, valid for all
/// `t, rho > 0`.
pub fn k1_upper_bound_terms(p: KernelPoint) -> Result<K1UpperTerms> {
    let KernelPoint { t, rho } = KernelPoint::new(p.t, p.rho)?;
    if rho == 0.0 {
        return Err(domain("the upper bound diverges at rho = 0 (sinh(rho)^(1/2) vanishes)"));
    }
    let st = t.sqrt();
    let pi32 = PI.powf(1.5);
    let a1 = 17.0 * prefactor(t) * (rho + LN_4) * (-rho * rho / (4.0 * t)).exp() / rho.sinh().sqrt();
    let shift = rho / (2.0 * st) + st / 2.0;
    let a2 = 4.0 * SQRT_2 * (-shift * shift).exp() / (pi32 * st);
    let a3 = 4.0 * SQRT_2 * (-rho).exp() * gauss_tail(rho / (2.0 * st) - st / 2.0) / pi32;
    Ok(K1UpperTerms { a1, a2, a3 })
}

fn check_range(t: f64, rho: f64, r: f64) -> Result<()> {
    require_positive("t", t)?;
    require_positive("rho", rho)?;
    if !(r >= rho && r.is_finite()) {
        return Err(domain(format!("need r >= rho, got r = {r}, rho = {rho}")));
    }
    Ok(())
}

/// `F(t; rho, r) = r e^{-r^2/4t} T2(cosh(r/2)/cosh(rho/2)) / sinh r`, the
/// integrand of `k1` after the substitution that makes its `rho`-dependence
/// explicit.
pub fn weight_one_integrand(t: f64, rho: f64, r: f64) -> Result<f64> {
    check_range(t, rho, r)?;
    Ok(integrand_unchecked(t, rho, r))
}

fn integrand_unchecked(t: f64, rho: f64, r: f64) -> f64 {
    let x = (0.5 * r).cosh() / (0.5 * rho).cosh();
    r * (-r * r / (4.0 * t)).exp() * chebyshev_t2(x) / r.sinh()
}

/// Partial derivatives `(dF/drho, dF/dr)` of [`weight_one_integrand`] in
/// closed form.
pub fn weight_one_integrand_partials(t: f64, rho: f64, r: f64) -> Result<(f64, f64)> {
    check_range(t, rho, r)?;
    let f = integrand_unchecked(t, rho, r);
    let x2 = ((0.5 * r).cosh() / (0.5 * rho).cosh()).powi(2);
    let ratio = 2.0 * x2 / (2.0 * x2 - 1.0);
    let d_rho = -f * ratio * (0.5 * rho).tanh();
    let d_r = f * (1.0 / r - r / (2.0 * t) + ratio * (0.5 * r).tanh() - 1.0 / r.tanh());
    Ok((d_rho, d_r))
}

/// `h_rho(r) = tanh(rho/2) sinh r - sinh rho tanh(r/2)`, which vanishes at
/// `r = rho` and is nondecreasing for `r >= rho`.
pub fn monotonicity_auxiliary(rho: f64, r: f64) -> Result<f64> {
    check_range(1.0, rho, r)?;
    Ok((0.5 * rho).tanh() * r.sinh() - rho.sinh() * (0.5 * r).tanh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn pt(t: f64, rho: f64) -> KernelPoint {
        KernelPoint::new(t, rho).unwrap()
    }

    #[test]
    fn kernels_are_positive_and_decay() {
        let a = k0(pt(1.0, 1.0), &spec()).unwrap();
        let b = k0(pt(1.0, 10.0), &spec()).unwrap();
        assert!(a.value > 0.0 && b.value > 0.0);
        assert!(b.upper() < a.lower());
        // e^{-rho^2/4t} = e^{-25} sets the scale at small t
        let tiny = k0(pt(0.01, 1.0), &spec()).unwrap();
        assert!((tiny.value - 1.016_124_138_662_814e-10).abs() <= tiny.error_estimate + 1e-20);
    }

    #[test]
    fn weight_one_dominates_functions() {
        for rho in [0.0, 0.5, 2.0] {
            let a = k0(pt(1.0, rho), &spec()).unwrap();
            let b = k1(pt(1.0, rho), &spec()).unwrap();
            assert!(b.lower() >= a.upper() - 1e-15, "rho = {rho}");
        }
    }

    #[test]
    fn upper_terms_dominate_at_reference_point() {
        let k = k1(pt(10.0, 1.0), &spec()).unwrap();
        let u = k1_upper_bound_terms(pt(10.0, 1.0)).unwrap();
        assert!(u.a1 > 0.0 && u.a2 > 0.0 && u.a3 > 0.0);
        assert!(k.upper() <= u.sum());
        let far = k1_upper_bound_terms(pt(10.0, 20.0)).unwrap();
        assert!(far.a1 < 1e-6 && far.a2 < 1e-6 && far.a3 < 1e-6);
        assert!(k1_upper_bound_terms(pt(10.0, 0.0)).is_err());
        let near = k1_upper_bound_terms(pt(10.0, 1e-16)).unwrap();
        assert!(near.a1 > 1e5);
    }

    #[test]
    fn integrand_examples() {
        let f = weight_one_integrand(1.0, 1.0, 1.0).unwrap();
        assert!((f - (-0.25f64).exp() / 1f64.sinh()).abs() < 1e-15);
        assert!(weight_one_integrand(1.0, 1.0, 2.0).unwrap() > 0.0);
        assert!(weight_one_integrand(1.0, 2.0, 1.0).is_err());
        assert_eq!(monotonicity_auxiliary(1.0, 1.0).unwrap(), 0.0);
        assert!(monotonicity_auxiliary(1.0, 2.0).unwrap() > 0.0);
        assert!(monotonicity_auxiliary(0.5, 3.0).unwrap() > 0.0);
    }

    #[test]
    fn partials_match_finite_differences() {
        let (t, rho, r) = (1.0, 1.0, 1.5);
        let (d_rho, d_r) = weight_one_integrand_partials(t, rho, r).unwrap();
        let h = 1e-5;
        let f = |a: f64, b: f64| integrand_unchecked(t, a, b);
        let fd_rho = (f(rho + h, r) - f(rho - h, r)) / (2.0 * h);
        let fd_r = (f(rho, r + h) - f(rho, r - h)) / (2.0 * h);
        assert!((d_rho - fd_rho).abs() <= 1e-6 * d_rho.abs());
        assert!((d_r - fd_r).abs() <= 1e-6 * d_r.abs());
        let (a, b) = weight_one_integrand_partials(1.0, 1.0, 1.0).unwrap();
        assert!(1f64.sinh() * a + 1f64.sinh() * b < 0.0);
    }

    proptest! {
        #[test]
        fn rho_partial_is_negative(t in 0.1..30.0f64, rho in 0.01..8.0f64, dr in 0.0..10.0f64) {
            let (d_rho, _) = weight_one_integrand_partials(t, rho, rho + dr).unwrap();
            prop_assert!(d_rho < 0.0 || (d_rho == 0.0 && integrand_unchecked(t, rho, rho + dr) == 0.0));
        }

        #[test]
        fn cosh_ratio_bound(r1 in 0.0..20.0f64, r2 in 0.0..20.0f64) {
            prop_assert!((r1 + r2).cosh() / r1.cosh() <= r2.exp() * (1.0 + 1e-14));
        }
    }
}
