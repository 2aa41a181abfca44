//! Local factors of the Selberg zeta function, their logarithmic derivative
//! at `s = 1`, and counting utilities for user-supplied geodesic length
//! spectra.

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_positive, Result};

/// A truncated series together with a certified bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

const MAX_TERMS: usize = 10_000_000;

fn check(ell: f64, s: f64, tol: f64) -> Result<()> {
    require_positive("ell_gamma", ell)?;
    require_positive("s", s)?;
    require_positive("tol", tol)
}

/// Sums `sum_{n >= 0} term(x_n)` with `x_n = e^{-(s + n) l}` until the tail
/// bound `scale * x_N / ((1 - x_N)(1 - e^{-l}))` drops below `tol`. Valid
/// whenever `term(x) <= scale * x / (1 - x)`.
fn geometric_sum(ell: f64, s: f64, tol: f64, scale: f64, term: impl Fn(f64) -> f64) -> Result<SeriesValue> {
    let ratio = -(-ell).exp_m1();
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let x = (-(s + n as f64) * ell).exp();
        let tail = scale * x / ((1.0 - x) * ratio);
        if tail < tol {
            return Ok(SeriesValue {
                value: sum,
                tail_bound: tail,
                terms: n,
            });
        }
        sum += term(x);
    }
    Err(domain(format!(
        "series for ell_gamma = {ell} did not reach tolerance {tol} within {MAX_TERMS} terms"
    )))
}

/// `-log Z_gamma(s) = -sum_n log(1 - e^{-(s+n) l})`, using
/// `-log(1 - x) <= x / (1 - x)` for the tail.
pub fn neg_log_z_gamma(ell_gamma: f64, s: f64, tol: f64) -> Result<SeriesValue> {
    check(ell_gamma, s, tol)?;
    geometric_sum(ell_gamma, s, tol, 1.0, |x| -(-x).ln_1p())
}

/// `Z_gamma(s) = prod_{n >= 0} (1 - e^{-(s+n) l})`. The tail bound applies to
/// the value itself (`|e^{-a} - e^{-a-t}| <= t`).
pub fn z_gamma(ell_gamma: f64, s: f64, tol: f64) -> Result<SeriesValue> {
    let log = neg_log_z_gamma(ell_gamma, s, tol)?;
    Ok(SeriesValue {
        value: (-log.value).exp(),
        ..log
    })
}

/// `Z'_gamma / Z_gamma (1) = sum_{n >= 0} l e^{-(1+n) l} / (1 - e^{-(1+n) l})`.
pub fn z_log_deriv_at_1(ell_gamma: f64, tol: f64) -> Result<SeriesValue> {
    check(ell_gamma, 1.0, tol)?;
    geometric_sum(ell_gamma, 1.0, tol, ell_gamma, |x| ell_gamma * x / (1.0 - x))
}

/// Lengths of primitive closed geodesics, with multiplicity, sorted
/// ascending. Entries are counted as listed; whether a geodesic and its
/// inverse appear separately is up to the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct GeodesicLengthSpectrum {
    lengths: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    lengths: Vec<f64>,
}

impl TryFrom<RawSpectrum> for GeodesicLengthSpectrum {
    type Error = crate::Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        Self::new(raw.lengths)
    }
}

impl From<GeodesicLengthSpectrum> for RawSpectrum {
    fn from(s: GeodesicLengthSpectrum) -> Self {
        RawSpectrum { lengths: s.lengths }
    }
}

impl GeodesicLengthSpectrum {
    pub fn new(mut lengths: Vec<f64>) -> Result<Self> {
        for &l in &lengths {
            require_positive("geodesic length", l)?;
        }
        lengths.sort_by(f64::total_cmp);
        Ok(Self { lengths })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn systole(&self) -> Option<f64> {
        self.lengths.first().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Lengths strictly below `hi`.
    pub fn below(&self, hi: f64) -> &[f64] {
        &self.lengths[..self.lengths.partition_point(|&l| l < hi)]
    }
}

/// Prime geodesic counting function `#{l : e^l < u}`.
pub fn pi_x(spectrum: &GeodesicLengthSpectrum, u: f64) -> Result<usize> {
    if !(u > 1.0) {
        return Err(domain(format!("pi_x needs u > 1, got {u}")));
    }
    Ok(spectrum.below(u.ln()).len())
}

/// `2 arcosh(|tr| / 2)`.
pub fn trace_to_length(abs_trace: f64) -> Result<f64> {
    if !(abs_trace >= 2.0 && abs_trace.is_finite()) {
        return Err(domain(format!(
            "a hyperbolic element has |trace| >= 2, got {abs_trace}"
        )));
    }
    Ok(2.0 * (0.5 * abs_trace).acosh())
}

/// Number of lengths in the open window `(lo, hi)`.
pub fn n_geo_window(spectrum: &GeodesicLengthSpectrum, lo: f64, hi: f64) -> Result<usize> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(domain(format!("need 0 <= lo < hi, got lo = {lo}, hi = {hi}")));
    }
    Ok(spectrum.lengths.iter().filter(|&&l| lo < l && l < hi).count())
}
