//! Scenario files and JSON reports.

use serde::{Deserialize, Serialize};

use crate::delta_bounds::{parshin_bound, parshin_simplified, scenario_bound, BoundReport, Evaluation};
use crate::error::{Error, Result};
use crate::invariants::{BoundOptions, CoveringScenario, Mode};
use crate::numerics::{LogScalar, QuadratureSpec, Sign};
use crate::selberg::GeodesicLengthSpectrum;

pub const SCHEMA_VERSION: u32 = 1;

/// Inputs of the Parshin-type bound for a family of ramified covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParshinInputs {
    #[serde(rename = "ell_Xv")]
    pub ell_xv: f64,
    #[serde(rename = "g_XP")]
    pub g_xp: u64,
    /// Lower bound for `lambda_X (1 - s1)` over the family.
    pub lambda_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub scenario: CoveringScenario,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<GeodesicLengthSpectrum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parshin: Option<ParshinInputs>,
}

impl ScenarioFile {
    /// Parses and validates. JSON syntax and schema problems are
    /// configuration errors carrying serde's line and column; invariant
    /// violations keep their own kind.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        if let Some(q) = &file.quadrature {
            q.validate()?;
        }
        file.scenario.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files always serialize")
    }

    pub fn evaluation(&self, mode: Option<Mode>, rounded: bool) -> Evaluation {
        Evaluation {
            opts: BoundOptions {
                mode: mode.unwrap_or(self.mode),
                rounded,
            },
            quadrature: self.quadrature.unwrap_or_default(),
            spectrum: self.spectrum.clone(),
        }
    }
}

/// The bound for the scenario plus the optional Parshin pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub main: BoundReport,
    pub parshin: Option<(BoundReport, BoundReport)>,
}

pub fn evaluate(file: &ScenarioFile, ev: &Evaluation) -> Result<ScenarioOutcome> {
    let main = scenario_bound(&file.scenario, ev)?;
    let parshin = match &file.parshin {
        Some(p) => Some((
            parshin_bound(p.ell_xv, p.g_xp, file.scenario.cover().lambda1, ev.opts)?,
            parshin_simplified(p.ell_xv, p.g_xp, p.lambda_min, ev.opts)?,
        )),
        None => None,
    };
    Ok(ScenarioOutcome { main, parshin })
}

/// Rounds to 12 significant digits so reports do not depend on the last
/// bits of a computation.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Serialize)]
struct ValueJson {
    sign: i8,
    ln_abs: f64,
    log10_abs: f64,
    decimal: String,
}

impl From<LogScalar> for ValueJson {
    fn from(v: LogScalar) -> Self {
        let sign = match v.sign() {
            Sign::Positive => 1,
            Sign::Negative => -1,
            Sign::Zero => 0,
        };
        let (ln_abs, log10_abs) = if sign == 0 {
            (0.0, 0.0)
        } else {
            (round12(v.ln_abs()), round12(v.log10_abs()))
        };
        Self {
            sign,
            ln_abs,
            log10_abs,
            decimal: v.to_decimal_string(6),
        }
    }
}

#[derive(Serialize)]
struct TermJson {
    label: &'static str,
    description: &'static str,
    value: ValueJson,
}

#[derive(Serialize)]
struct BoundJson {
    bound: &'static str,
    mode: &'static str,
    rounded: bool,
    #[serde(rename = "final")]
    final_value: ValueJson,
    terms: Vec<TermJson>,
}

impl From<&BoundReport> for BoundJson {
    fn from(r: &BoundReport) -> Self {
        Self {
            bound: r.bound,
            mode: r.mode.as_str(),
            rounded: r.rounded,
            final_value: r.final_value.into(),
            terms: r
                .terms
                .iter()
                .map(|t| TermJson {
                    label: t.label,
                    description: t.description,
                    value: t.value.into(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct ParshinJson {
    bound: BoundJson,
    simplified: BoundJson,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema_version: u32,
    #[serde(flatten)]
    main: BoundJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    parshin: Option<ParshinJson>,
    inputs: &'a ScenarioFile,
}

/// Pretty JSON with a fixed field order and 12-digit floats.
pub fn report_json(file: &ScenarioFile, outcome: &ScenarioOutcome) -> String {
    let report = ReportJson {
        schema_version: SCHEMA_VERSION,
        main: (&outcome.main).into(),
        parshin: outcome.parshin.as_ref().map(|(b, s)| ParshinJson {
            bound: b.into(),
            simplified: s.into(),
        }),
        inputs: file,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("reports always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIVIAL: &str = r#"{
        "schema_version": 1,
        "mode": "paper_faithful",
        "scenario": {
            "kind": "trivial",
            "base": {"genus": 2, "systole": 1.0, "lambda1": 0.05}
        }
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let f = ScenarioFile::parse(TRIVIAL).unwrap();
        assert_eq!(f.scenario.base.genus, 2);
        let again = ScenarioFile::parse(&f.to_json()).unwrap();
        assert_eq!(f, again);
        let alias = TRIVIAL.replace("paper_faithful", "paper");
        assert_eq!(ScenarioFile::parse(&alias).unwrap().mode, Mode::PaperFaithful);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(ScenarioFile::parse("{"), Err(Error::Config(_))));
        let unknown = TRIVIAL.replace("\"mode\"", "\"extra\": 1, \"mode\"");
        assert!(matches!(ScenarioFile::parse(&unknown), Err(Error::Config(_))));
        let version = TRIVIAL.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(ScenarioFile::parse(&version), Err(Error::Config(_))));
        let genus = TRIVIAL.replace("\"genus\": 2", "\"genus\": 1");
        assert!(matches!(ScenarioFile::parse(&genus), Err(Error::Domain(_))));
        let ramified = TRIVIAL.replace("\"trivial\"", "{\"ramified\": {\"r0\": 2.0, \"R0\": 1.0}}");
        assert!(ScenarioFile::parse(&ramified).is_err());
    }

    #[test]
    fn report_is_deterministic() {
        let f = ScenarioFile::parse(TRIVIAL).unwrap();
        let ev = f.evaluation(None, false);
        let a = report_json(&f, &evaluate(&f, &ev).unwrap());
        let b = report_json(&f, &evaluate(&f, &ev).unwrap());
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["bound"], "intrinsic");
        let decimal = v["final"]["decimal"].as_str().unwrap();
        let parsed = LogScalar::parse_decimal(decimal).unwrap();
        let ln = v["final"]["ln_abs"].as_f64().unwrap();
        assert!((parsed.ln_abs() - ln).abs() < 1e-5);
    }

    #[test]
    fn rounding() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(0.0), 0.0);
    }
}
