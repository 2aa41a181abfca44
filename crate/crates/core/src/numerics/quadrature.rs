//! Adaptive Gauss-Kronrod quadrature and the singular-kernel integrator.
//!
//! The kernels integrated here all have the shape
//! `g(r) / sqrt(cosh r - cosh rho)` on `(rho, inf)` with a numerator that
//! decays like a Gaussian. The inverse square root at `r = rho` is removed
//! with the substitution `r = rho + u^2`, and the infinite upper limit is cut
//! at a point where an analytic envelope certifies the discarded tail.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

use super::special::gauss_tail;

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Fraction of `abs_tol` that the discarded tail of an infinite range may
    /// contribute.
    pub tail_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-11,
            max_subdivisions: 400,
            tail_cutoff: 0.01,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize, tail_cutoff: f64) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
            tail_cutoff,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(domain("max_subdivisions must be at least 1"));
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff < 1.0) {
            return Err(domain(format!(
                "tail_cutoff must lie in (0, 1), got {}",
                self.tail_cutoff
            )));
        }
        Ok(())
    }

    /// The error budget for an integral of the given magnitude.
    pub fn budget(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Same relative tolerance, absolute tolerance effectively disabled.
    pub fn relative_only(&self) -> Self {
        Self {
            abs_tol: f64::MIN_POSITIVE,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Nonnegative bound on `|value - exact|`, including any truncated tail.
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    /// Upper limit actually integrated to (the finite endpoint for proper
    /// integrals).
    pub truncation_point: f64,
}

impl QuadratureResult {
    /// Upper end of the enclosure `value +- error_estimate`.
    pub fn upper(&self) -> f64 {
        self.value + self.error_estimate
    }

    /// Lower end of the enclosure `value +- error_estimate`.
    pub fn lower(&self) -> f64 {
        self.value - self.error_estimate
    }

    pub(crate) fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_548_021_734_830,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One Gauss-Kronrod panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for (j, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive bisection. `tolerance` maps the current total to the
/// allowed quadrature error.
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    max_subdivisions: usize,
    tolerance: impl Fn(f64) -> f64,
) -> Result<(f64, f64, usize)> {
    let (value, error) = gk21(f, a, b);
    if !value.is_finite() || !error.is_finite() {
        return Err(domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    loop {
        if total_err <= tolerance(total) {
            return Ok((total, total_err, heap.len()));
        }
        if heap.len() >= max_subdivisions {
            return Err(Error::Convergence {
                value: total,
                error_estimate: total_err,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in binary64.
            return Err(Error::Convergence {
                value: total,
                error_estimate: total_err,
                subdivisions: heap.len() + 1,
            });
        }
        let (lv, le) = gk21(f, worst.a, mid);
        let (rv, re) = gk21(f, mid, worst.b);
        if !(lv + rv).is_finite() || !(le + re).is_finite() {
            return Err(domain(format!("integrand is not finite on [{}, {}]", worst.a, worst.b)));
        }
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        if heap.len() % 32 == 0 {
            // Re-sum to keep the running totals from drifting.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Integrates a smooth function over the finite interval `[a, b]` (either
/// orientation).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            truncation_point: b,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (value, err, n) = adaptive(&f, lo, hi, spec.max_subdivisions, |v| spec.budget(v))?;
    Ok(QuadratureResult {
        value: sign * value,
        error_estimate: err,
        subdivisions_used: n,
        truncation_point: b,
    })
}

/// `int_cut^inf (c0 + c1 r) exp(b r - r^2/(4t)) dr` in closed form.
pub fn gaussian_moment_tail(c0: f64, c1: f64, b: f64, t: f64, cut: f64) -> f64 {
    let st = t.sqrt();
    let v0 = cut / (2.0 * st) - b * st;
    let shift = b * b * t;
    // 2 sqrt(t) e^{b^2 t} [ (c0 + 2 c1 b t) G(v0) + c1 sqrt(t) e^{-v0^2} ]
    let g = gauss_tail(v0);
    let linear = (c0 + 2.0 * c1 * b * t) * g;
    let bump = c1 * st * (-v0 * v0).exp();
    2.0 * st * shift.exp() * (linear + bump)
}

/// Gaussian envelope for a singular-kernel numerator:
/// `|g(r)| <= coeff * r * exp(growth * r - r^2 / (4 t))` for all `r >= rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    pub coeff: f64,
    pub growth: f64,
    pub t: f64,
}

impl GaussianEnvelope {
    /// Upper bound for `int_cut^inf |g(r)| / sqrt(cosh r - cosh rho) dr`,
    /// valid whenever `cut >= rho + log 4`, where
    /// `cosh r - cosh rho >= e^r / 4`.
    pub fn singular_tail(&self, cut: f64) -> f64 {
        // 1/sqrt(cosh r - cosh rho) <= 2 e^{-r/2}
        let bound = gaussian_moment_tail(0.0, 2.0 * self.coeff, self.growth - 0.5, self.t, cut);
        bound.max(0.0)
    }
}

/// `cosh(rho + s) - cosh(rho)` without cancellation.
pub(crate) fn cosh_gap(rho: f64, s: f64) -> f64 {
    2.0 * (rho + 0.5 * s).sinh() * (0.5 * s).sinh()
}

const MAX_TRUNCATION: f64 = 1.0e4;

/// Computes `int_rho^inf g(r) / sqrt(cosh r - cosh rho) dr`.
///
/// For `rho > 0` the substitution `r = rho + u^2` turns the endpoint
/// singularity into a bounded integrand. `rho = 0` is also accepted, in which
/// case the integrand is `g(r) / (sqrt 2 sinh(r/2))` and `g(r) = O(r)` is
/// required near the origin.
pub fn integrate_singular(
    g: impl Fn(f64) -> f64,
    envelope: &GaussianEnvelope,
    rho: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(domain(format!("rho must be nonnegative and finite, got {rho}")));
    }
    if !(envelope.t > 0.0 && envelope.coeff >= 0.0) {
        return Err(domain("envelope must have t > 0 and a nonnegative coefficient"));
    }

    let threshold = spec.tail_cutoff * spec.abs_tol;
    let mut cut = rho + 4f64.ln();
    let mut tail = envelope.singular_tail(cut);
    let step = (envelope.t.sqrt()).max(1.0);
    while tail > threshold {
        cut += step;
        if cut > MAX_TRUNCATION {
            return Err(Error::Convergence {
                value: f64::NAN,
                error_estimate: tail,
                subdivisions: 0,
            });
        }
        tail = envelope.singular_tail(cut);
    }

    let tolerance = |v: f64| spec.budget(v) - tail;
    let (value, err, n) = if rho > 0.0 {
        let integrand = |u: f64| {
            let s = u * u;
            2.0 * u * g(rho + s) / cosh_gap(rho, s).sqrt()
        };
        adaptive(&integrand, 0.0, (cut - rho).sqrt(), spec.max_subdivisions, tolerance)?
    } else {
        let integrand = |r: f64| g(r) / (std::f64::consts::SQRT_2 * (0.5 * r).sinh());
        adaptive(&integrand, 0.0, cut, spec.max_subdivisions, tolerance)?
    };
    Ok(QuadratureResult {
        value,
        error_estimate: err + tail,
        subdivisions_used: n,
        truncation_point: cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        // GK21 is exact through degree 31, the embedded Gauss rule through 19.
        for degree in [0, 1, 5, 19, 30] {
            let f = |x: f64| x.powi(degree);
            let (k, _) = gk21(&f, 0.0, 1.0);
            let exact = 1.0 / (degree as f64 + 1.0);
            assert!((k - exact).abs() < 1e-14, "degree {degree}: {k} vs {exact}");
        }
        let (_, err) = gk21(&|x: f64| x.powi(19), -1.0, 1.0);
        assert!(err < 1e-14);
    }

    #[test]
    fn integrates_smooth_functions() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, &spec).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.error_estimate <= spec.budget(r.value));
        let back = integrate(|x| x.sin(), std::f64::consts::PI, 0.0, &spec).unwrap();
        assert!((back.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn moment_tail_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let (c0, c1, b, t, cut) = (0.7, 1.3, 0.4, 3.0, 2.0);
        let closed = gaussian_moment_tail(c0, c1, b, t, cut);
        let f = |r: f64| (c0 + c1 * r) * (b * r - r * r / (4.0 * t)).exp();
        let numeric = integrate(f, cut, 80.0, &spec).unwrap().value;
        assert!((closed - numeric).abs() < 1e-10 * closed, "{closed} vs {numeric}");
    }

    #[test]
    fn zero_numerator_gives_zero() {
        let env = GaussianEnvelope {
            coeff: 0.0,
            growth: 0.0,
            t: 1.0,
        };
        let r = integrate_singular(|_| 0.0, &env, 1.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn single_panel_either_converges_or_reports() {
        let spec = QuadratureSpec {
            max_subdivisions: 1,
            ..QuadratureSpec::default()
        };
        let env = GaussianEnvelope {
            coeff: 1.0,
            growth: 0.0,
            t: 1.0,
        };
        match integrate_singular(|r| r * (-r * r / 4.0).exp(), &env, 1.0, &spec) {
            Ok(r) => {
                assert!(r.subdivisions_used <= 1);
                assert!(r.error_estimate <= spec.budget(r.value));
            }
            Err(Error::Convergence {
                value,
                error_estimate,
                subdivisions,
            }) => {
                assert!(value.is_finite());
                assert!(error_estimate > spec.budget(value));
                assert_eq!(subdivisions, 1);
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 10, 0.5).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-8, 0, 0.5).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-8, 10, 1.0).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-8, 10, 0.5).is_ok());
    }
}
