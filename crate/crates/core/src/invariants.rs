//! Input data: hyperbolic invariants of a surface and covering scenarios.

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_positive, Error, Result};

/// Which set of constants the bound chains use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Replays the crude published constants exactly.
    #[serde(alias = "paper")]
    PaperFaithful,
    /// Keeps the sharpest computable intermediate values.
    Tight,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::PaperFaithful => "paper_faithful",
            Mode::Tight => "tight",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper_faithful" => Ok(Mode::PaperFaithful),
            "tight" => Ok(Mode::Tight),
            other => Err(Error::Usage(format!(
                "unknown mode {other:?} (expected paper, paper_faithful or tight)"
            ))),
        }
    }
}

/// Evaluation options shared by every bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundOptions {
    pub mode: Mode,
    /// Use the rounded statement constants (`1e3`, `1.2e3`, `1e11`, `1e15`)
    /// instead of the values the proofs actually produce.
    pub rounded: bool,
}

impl BoundOptions {
    pub const PAPER: BoundOptions = BoundOptions {
        mode: Mode::PaperFaithful,
        rounded: false,
    };
    pub const ROUNDED: BoundOptions = BoundOptions {
        mode: Mode::PaperFaithful,
        rounded: true,
    };
    pub const TIGHT: BoundOptions = BoundOptions {
        mode: Mode::Tight,
        rounded: false,
    };
}

/// Basic hyperbolic invariants of a compact Riemann surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceInvariants {
    pub genus: u64,
    /// Length of the shortest closed geodesic.
    pub systole: f64,
    /// Smallest nonzero Laplace eigenvalue.
    pub lambda1: f64,
    /// Number of eigenvalues in `[0, 1/4)`, counting 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ev: Option<u64>,
    /// Number of primitive closed geodesics with length in `(0, 5)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_geo5: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
}

impl SurfaceInvariants {
    pub fn new(genus: u64, systole: f64, lambda1: f64) -> Result<Self> {
        let s = Self {
            genus,
            systole,
            lambda1,
            n_ev: None,
            n_geo5: None,
            diameter: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        require_genus(self.genus)?;
        require_positive("systole", self.systole)?;
        require_positive("lambda1", self.lambda1)?;
        if let Some(n) = self.n_ev {
            if n < 1 || n > 4 * self.genus - 2 {
                return Err(domain(format!(
                    "n_ev must lie in [1, 4g - 2] = [1, {}], got {n}",
                    4 * self.genus - 2
                )));
            }
        }
        if let Some(d) = self.diameter {
            require_positive("diameter", d)?;
        }
        Ok(())
    }

    pub fn vol_hyp(&self) -> f64 {
        4.0 * std::f64::consts::PI * (self.genus as f64 - 1.0)
    }

    pub fn lambda_x(&self) -> f64 {
        lambda_x(self.lambda1).expect("validated lambda1")
    }

    pub fn s1(&self) -> f64 {
        s_small(self.lambda1).expect("validated lambda1")
    }
}

pub(crate) fn require_genus(g: u64) -> Result<()> {
    if g >= 2 {
        Ok(())
    } else {
        Err(domain(format!("genus must be at least 2, got {g}")))
    }
}

/// `lambda_X = min(lambda1, 7/64) / 2`.
pub fn lambda_x(lambda1: f64) -> Result<f64> {
    require_positive("lambda1", lambda1)?;
    Ok(0.5 * lambda1.min(7.0 / 64.0))
}

/// `s = 1/2 + sqrt(1/4 - lambda1)` for a small eigenvalue; clamped to `1/2`
/// when `lambda1 >= 1/4`.
pub fn s_small(lambda1: f64) -> Result<f64> {
    require_positive("lambda1", lambda1)?;
    Ok(0.5 + (0.25 - lambda1).max(0.0).sqrt())
}

/// `1 / (1 - s)` computed without cancellation as `s -> 1`.
pub fn inverse_spectral_gap(lambda1: f64) -> Result<f64> {
    require_positive("lambda1", lambda1)?;
    // 1 - s = 1/2 - sqrt(1/4 - l) = l / (1/2 + sqrt(1/4 - l))
    let root = (0.25 - lambda1).max(0.0).sqrt();
    if lambda1 >= 0.25 {
        return Ok(2.0);
    }
    Ok((0.5 + root) / lambda1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoveringKind {
    Trivial,
    Unramified,
    /// `r0` and `R0` are the min and max of the base systole and the
    /// pairwise distances of the ramification points.
    Ramified {
        r0: f64,
        #[serde(rename = "R0")]
        big_r0: f64,
    },
}

impl CoveringKind {
    pub fn name(&self) -> &'static str {
        match self {
            CoveringKind::Trivial => "trivial",
            CoveringKind::Unramified => "unramified",
            CoveringKind::Ramified { .. } => "ramified",
        }
    }
}

/// A covering `X -> X0`. For the trivial covering `cover` may be omitted and
/// then equals `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringScenario {
    pub base: SurfaceInvariants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<SurfaceInvariants>,
    pub kind: CoveringKind,
}

impl CoveringScenario {
    pub fn trivial(surface: SurfaceInvariants) -> Self {
        Self {
            base: surface,
            cover: None,
            kind: CoveringKind::Trivial,
        }
    }

    pub fn unramified(base: SurfaceInvariants, cover: SurfaceInvariants) -> Self {
        Self {
            base,
            cover: Some(cover),
            kind: CoveringKind::Unramified,
        }
    }

    pub fn ramified(base: SurfaceInvariants, cover: SurfaceInvariants, r0: f64, big_r0: f64) -> Self {
        Self {
            base,
            cover: Some(cover),
            kind: CoveringKind::Ramified { r0, big_r0 },
        }
    }

    pub fn cover(&self) -> &SurfaceInvariants {
        self.cover.as_ref().unwrap_or(&self.base)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.cover().validate()?;
        match self.kind {
            CoveringKind::Trivial => {
                if self.cover() != &self.base {
                    return Err(Error::Config(
                        "a trivial covering needs identical base and cover invariants".into(),
                    ));
                }
            }
            CoveringKind::Unramified => {
                if self.cover().genus < self.base.genus {
                    return Err(domain(format!(
                        "an unramified cover cannot have smaller genus than its base ({} < {})",
                        self.cover().genus,
                        self.base.genus
                    )));
                }
                if self.cover().systole < self.base.systole {
                    return Err(domain(format!(
                        "an unramified cover has systole at least that of its base ({} < {})",
                        self.cover().systole,
                        self.base.systole
                    )));
                }
            }
            CoveringKind::Ramified { r0, big_r0 } => {
                require_positive("r0", r0)?;
                require_positive("R0", big_r0)?;
                if r0 > big_r0 {
                    return Err(domain(format!("need r0 <= R0, got r0 = {r0}, R0 = {big_r0}")));
                }
                if r0 > self.base.systole || self.base.systole > big_r0 {
                    return Err(domain(format!(
                        "need r0 <= base systole <= R0, got {r0} <= {} <= {big_r0}",
                        self.base.systole
                    )));
                }
            }
        }
        Ok(())
    }
}
