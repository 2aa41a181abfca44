//! Upper bounds for the sup-norm ratio `S_X = sup mu_can / mu_shyp` of an
//! unramified cover `X -> X0`, in terms of the systole `ell0` of the base.
//!
//! Three levels are provided: the kernel integral itself (by nested
//! quadrature), the per-term closed forms `b1, b2, b3` at heat time 10, and
//! the final closed form `D2 e^{ell0/2} / (1 - e^{-ell0/4})^{5/2}`.

use std::cell::RefCell;
use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::error::{require_positive, Error, Result};
use crate::heat_kernel::{k1, k1_upper_bound_terms, KernelPoint};
use crate::numerics::{gauss_tail, gaussian_moment_tail, integrate, LogScalar, QuadratureResult, QuadratureSpec};

/// Heat time used by the closed forms.
pub const DEFAULT_T0: f64 = 10.0;
/// `D2` as it comes out of the aggregation, `4 * 88 pi`.
pub const D2_EXACT: f64 = 352.0 * PI;
/// `D2` as stated in rounded form.
pub const D2_ROUNDED: f64 = 1.2e3;

const LN_4: f64 = 2.0 * LN_2;

#[derive(Debug, Clone, PartialEq)]
pub struct SupNormReport {
    pub ell0: f64,
    pub t0: f64,
    pub quadrature_bound: QuadratureResult,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// `88 pi e^{3 ell0/4} / (sinh^2(ell0/8) (1 - e^{-ell0/2})^{1/2})`.
    pub aggregated: f64,
    pub closed_form: f64,
    pub d2_constant: f64,
}

/// Stieltjes weight `sinh(rho + ell0/2) / (2 sinh^2(ell0/8))`.
fn weight(ell0: f64, rho: f64) -> f64 {
    (rho + 0.5 * ell0).sinh() / (2.0 * (ell0 / 8.0).sinh().powi(2))
}

/// Coefficient `kappa` with `weight(rho) <= kappa e^rho`.
fn weight_envelope(ell0: f64) -> f64 {
    (0.5 * ell0).exp() / (4.0 * (ell0 / 8.0).sinh().powi(2))
}

fn boundary_factor(ell0: f64) -> f64 {
    ((3.0 * ell0 / 8.0).sinh() / (ell0 / 8.0).sinh()).powi(2) - 1.0
}

fn kernel_prefactor(t: f64) -> f64 {
    SQRT_2 * (-t / 4.0).exp() / (4.0 * PI * t).powf(1.5)
}

/// `int_{v0}^inf (s - v0) e^{-s^2} ds`, the integral of `gauss_tail` over
/// `[v0, inf)`.
fn gauss_tail_integral(v0: f64) -> f64 {
    if v0 >= 2.0 {
        // e^{-s^2} <= e^{-v0^2 - 2 v0 (s - v0)} gives a cancellation-free bound
        (-v0 * v0).exp() / (4.0 * v0 * v0)
    } else {
        (0.5 * (-v0 * v0).exp() - v0 * gauss_tail(v0)).max(0.0)
    }
}

/// Upper bounds for `int_cut^inf A_j(t; rho) weight(rho) d rho`, `j = 1, 2, 3`.
fn weighted_upper_tails(ell0: f64, t: f64, cut: f64) -> [f64; 3] {
    let kappa = weight_envelope(ell0);
    let st = t.sqrt();
    let pi32 = PI.powf(1.5);
    // (rho + log 4) e^{-rho^2/4t} / sinh^{1/2}(rho) with sinh(rho) >= sinh(cut)
    let t1 = 17.0 * kernel_prefactor(t) / cut.sinh().sqrt() * gaussian_moment_tail(LN_4, 1.0, 1.0, t, cut);
    // e^{-(rho/2 sqrt t + sqrt t/2)^2} e^rho = e^{-t/4} e^{rho/2 - rho^2/4t}
    let t2 = 4.0 * SQRT_2 * (-t / 4.0).exp() / (pi32 * st) * gaussian_moment_tail(1.0, 0.0, 0.5, t, cut);
    // e^{-rho} e^{rho} gauss_tail(rho/2 sqrt t - sqrt t/2)
    let t3 = 4.0 * SQRT_2 / pi32 * 2.0 * st * gauss_tail_integral(cut / (2.0 * st) - 0.5 * st);
    [kappa * t1, kappa * t2, kappa * t3]
}

/// Integrates `f(rho) weight(rho)` over `[ell0/4, inf)`, truncating where the
/// `tail` bound drops below `threshold`.
fn weighted_integral(
    ell0: f64,
    t: f64,
    f: impl Fn(f64) -> f64,
    tail: impl Fn(f64) -> f64,
    threshold: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let a = ell0 / 4.0;
    let step = t.sqrt().max(1.0);
    let mut cut = a + step;
    let mut tail_value = tail(cut);
    while tail_value > threshold {
        cut += step;
        if cut > 1e4 {
            return Err(Error::Convergence {
                value: f64::NAN,
                error_estimate: tail_value,
                subdivisions: 0,
            });
        }
        tail_value = tail(cut);
    }
    let body = integrate(|rho| f(rho) * weight(ell0, rho), a, cut, spec)?;
    Ok(QuadratureResult {
        value: body.value,
        error_estimate: body.error_estimate + tail_value,
        subdivisions_used: body.subdivisions_used,
        truncation_point: cut,
    })
}

fn check_inputs(ell0: f64, t0: f64) -> Result<()> {
    require_positive("ell0", ell0)?;
    require_positive("t0", t0)
}

/// Evaluates the kernel-integral bound
/// `4 pi int_{ell0/4}^inf k1(t0; rho) weight(rho) d rho + 4 pi k1(t0; ell0/4) (sinh^2(3 ell0/8)/sinh^2(ell0/8) - 1)`
/// for `S_X`, valid for every `t0 > 0`.
///
/// The inner kernel is computed with the relative tolerance of `spec`; its
/// errors are folded into the returned error estimate, so
/// `value + error_estimate` is a certified upper bound for the expression.
pub fn sup_ratio_quadrature_bound(ell0: f64, t0: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_inputs(ell0, t0)?;
    spec.validate()?;
    let inner_spec = spec.relative_only();
    let a = ell0 / 4.0;

    let edge = k1(KernelPoint::new(t0, a)?, &inner_spec)?;
    let boundary = 4.0 * PI * edge.value * boundary_factor(ell0);
    let boundary_err = 4.0 * PI * edge.error_estimate * boundary_factor(ell0);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let kernel = |rho: f64| match k1(KernelPoint { t: t0, rho }, &inner_spec) {
        Ok(r) => r.value,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let tail = |cut: f64| weighted_upper_tails(ell0, t0, cut).iter().sum::<f64>();
    let threshold = spec.tail_cutoff * spec.budget(boundary / (4.0 * PI));
    let body = weighted_integral(ell0, t0, kernel, tail, threshold, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let body = body?;

    // Each inner value is within max(pref * abs_tol, rel_tol * k1) of the
    // truth; integrate that envelope against the weight.
    let cut = body.truncation_point;
    let weight_mass = ((cut + 0.5 * ell0).cosh() - (a + 0.5 * ell0).cosh()) / (2.0 * (ell0 / 8.0).sinh().powi(2));
    let inner_err = inner_spec.rel_tol * body.value.abs() + kernel_prefactor(t0) * inner_spec.abs_tol * weight_mass;

    Ok(QuadratureResult {
        value: 4.0 * PI * body.value + boundary,
        error_estimate: 4.0 * PI * (body.error_estimate + inner_err) + boundary_err,
        subdivisions_used: body.subdivisions_used,
        truncation_point: cut,
    })
}

/// `int_{ell0/4}^inf A1(t0; rho) weight(rho) d rho` by quadrature, where
/// `A1` is the first closed-form upper-bound term of `k1`.
pub fn first_term_integral_quadrature(ell0: f64, t0: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_inputs(ell0, t0)?;
    let a1 = |rho: f64| {
        k1_upper_bound_terms(KernelPoint { t: t0, rho })
            .map(|u| u.a1)
            .unwrap_or(f64::NAN)
    };
    let tail = |cut: f64| weighted_upper_tails(ell0, t0, cut)[0];
    weighted_integral(ell0, t0, a1, tail, spec.tail_cutoff * spec.abs_tol, spec)
}

/// Closed-form upper bound for [`first_term_integral_quadrature`], valid for
/// any `t0`:
/// `34 e^{ell0/2} ((1 + log 4/t0) sqrt pi + 2/sqrt t0) / ((4 pi)^{3/2} sinh^2(ell0/8) (1 - e^{-ell0/2})^{1/2})`.
pub fn first_term_integral_closed(ell0: f64, t0: f64) -> Result<f64> {
    check_inputs(ell0, t0)?;
    let s2 = (ell0 / 8.0).sinh().powi(2);
    let p = (-(-0.5 * ell0).exp_m1()).sqrt();
    let bracket = (1.0 + LN_4 / t0) * PI.sqrt() + 2.0 / t0.sqrt();
    Ok(34.0 * (0.5 * ell0).exp() * bracket / ((4.0 * PI).powf(1.5) * s2 * p))
}

/// Closed forms `(b1, b2, b3)` bounding the three kernel-integral
/// contributions at `t0 = 10`.
pub fn b_terms_closed(ell0: f64) -> Result<(f64, f64, f64)> {
    require_positive("ell0", ell0)?;
    let s2 = (ell0 / 8.0).sinh().powi(2);
    let p = (-(-0.5 * ell0).exp_m1()).sqrt();
    let four_pi = 4.0 * PI;
    let b1 = four_pi * (3.0 * (0.5 * ell0).exp() + (5.0 * ell0 / 8.0).exp()) / (s2 * p);
    let b2 = four_pi * 3.0 * (0.75 * ell0).exp() / s2;
    let b3 = four_pi * 15.0 * (0.75 * ell0).exp() / s2;
    Ok((b1, b2, b3))
}

/// `88 pi e^{3 ell0/4} / (sinh^2(ell0/8) (1 - e^{-ell0/2})^{1/2})`, the sum of
/// the `b` terms after collecting numerators.
pub fn aggregated_bound(ell0: f64) -> Result<f64> {
    require_positive("ell0", ell0)?;
    let s2 = (ell0 / 8.0).sinh().powi(2);
    let p = (-(-0.5 * ell0).exp_m1()).sqrt();
    Ok(88.0 * PI * (0.75 * ell0).exp() / (s2 * p))
}

pub fn d2_constant(rounded: bool) -> f64 {
    if rounded {
        D2_ROUNDED
    } else {
        D2_EXACT
    }
}

/// `D2 e^{ell0/2} / (1 - e^{-ell0/4})^{5/2}` in log space.
pub fn sup_ratio_closed_log(ell0: f64, rounded: bool) -> Result<LogScalar> {
    require_positive("ell0", ell0)?;
    let q = -(-0.25 * ell0).exp_m1();
    Ok(LogScalar::exp(d2_constant(rounded).ln() + 0.5 * ell0 - 2.5 * q.ln()))
}

/// `D2 e^{ell0/2} / (1 - e^{-ell0/4})^{5/2}` with `D2 = 352 pi`, or `1.2e3`
/// when `rounded`.
pub fn sup_ratio_closed(ell0: f64, rounded: bool) -> Result<f64> {
    Ok(sup_ratio_closed_log(ell0, rounded)?.to_f64())
}

/// All levels of the sup-norm bound at one base systole.
pub fn sup_norm_report(ell0: f64, t0: f64, rounded: bool, spec: &QuadratureSpec) -> Result<SupNormReport> {
    let quadrature_bound = sup_ratio_quadrature_bound(ell0, t0, spec)?;
    let (b1, b2, b3) = b_terms_closed(ell0)?;
    Ok(SupNormReport {
        ell0,
        t0,
        quadrature_bound,
        b1,
        b2,
        b3,
        aggregated: aggregated_bound(ell0)?,
        closed_form: sup_ratio_closed(ell0, rounded)?,
        d2_constant: d2_constant(rounded),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_at_unit_systole() {
        let spec = QuadratureSpec::default();
        let q = sup_ratio_quadrature_bound(1.0, 10.0, &spec).unwrap();
        let (b1, b2, b3) = b_terms_closed(1.0).unwrap();
        assert!(q.value > 0.0);
        assert!(q.upper() <= b1 + b2 + b3);
        assert!(b1 + b2 + b3 <= aggregated_bound(1.0).unwrap() * (1.0 + 1e-12));
        assert!(aggregated_bound(1.0).unwrap() <= sup_ratio_closed(1.0, false).unwrap());
        assert!(sup_ratio_closed(1.0, false).unwrap() <= sup_ratio_closed(1.0, true).unwrap());
    }

    #[test]
    fn bound_grows_as_systole_shrinks() {
        let spec = QuadratureSpec::default();
        let small = sup_ratio_quadrature_bound(0.5, 10.0, &spec).unwrap();
        let large = sup_ratio_quadrature_bound(4.0, 10.0, &spec).unwrap();
        assert!(large.upper() < small.lower());
        assert!(sup_ratio_quadrature_bound(1.0, 5.0, &spec).unwrap().value > 0.0);
    }

    #[test]
    fn closed_forms() {
        const { assert!(D2_EXACT <= D2_ROUNDED) };
        assert!(b_terms_closed(0.0).is_err());
        let floor = 2.0 * 2f64.acosh();
        assert!(sup_ratio_closed(floor, true).unwrap().is_finite());
        let ell = 200.0;
        let ratio = sup_ratio_closed_log(ell, false).unwrap().ln_abs() - 0.5 * ell;
        assert!((ratio - D2_EXACT.ln()).abs() < 1e-12);
    }

    #[test]
    fn first_term_closed_form_dominates_quadrature() {
        let spec = QuadratureSpec::default();
        for ell in [0.25, 1.0, 4.0] {
            let q = first_term_integral_quadrature(ell, 10.0, &spec).unwrap();
            assert!(q.upper() <= first_term_integral_closed(ell, 10.0).unwrap());
        }
    }
}
