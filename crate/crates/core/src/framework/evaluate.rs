use serde::{Deserialize, Serialize};

use super::{AnalysisResult, FrameworkError, Value};

/// Absolute tolerance for numeric equality.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Target {
    Exact { expect: Value },
    /// Inclusive bounds. For number lists, at least `min_fraction` of the
    /// elements must fall inside (all of them when unset).
    Range {
        min: f64,
        max: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        min_fraction: Option<f64>,
    },
}

impl Target {
    pub fn exact(value: impl Into<Value>) -> Self {
        Target::Exact { expect: value.into() }
    }

    pub fn range(min: f64, max: f64) -> Result<Self, FrameworkError> {
        Self::build_range(min, max, None)
    }

    pub fn range_with_fraction(min: f64, max: f64, fraction: f64) -> Result<Self, FrameworkError> {
        Self::build_range(min, max, Some(fraction))
    }

    fn build_range(min: f64, max: f64, min_fraction: Option<f64>) -> Result<Self, FrameworkError> {
        if min.is_nan() || max.is_nan() || min > max {
            return Err(FrameworkError::InvalidExpectation(format!("range [{min}, {max}] has min > max")));
        }
        if let Some(f) = min_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(FrameworkError::InvalidExpectation(format!("fraction {f} outside [0, 1]")));
            }
        }
        Ok(Target::Range { min, max, min_fraction })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub analyzer: String,
    #[serde(flatten)]
    pub target: Target,
}

impl Expectation {
    pub fn new(analyzer: impl Into<String>, target: Target) -> Self {
        Expectation {
            analyzer: analyzer.into(),
            target,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpectation {
    analyzer: String,
    expect: Option<Value>,
    min: Option<f64>,
    max: Option<f64>,
    min_fraction: Option<f64>,
}

impl TryFrom<RawExpectation> for Expectation {
    type Error = FrameworkError;

    fn try_from(raw: RawExpectation) -> Result<Self, Self::Error> {
        let target = match (raw.expect, raw.min, raw.max) {
            (Some(v), None, None) if raw.min_fraction.is_none() => Target::exact(v),
            (None, Some(min), Some(max)) => Target::build_range(min, max, raw.min_fraction)?,
            _ => {
                return Err(FrameworkError::InvalidExpectation(format!(
                    "`{}` needs either `expect` or both `min` and `max`",
                    raw.analyzer
                )))
            }
        };
        Ok(Expectation::new(raw.analyzer, target))
    }
}

/// Parses an expectation file: a JSON array of `{"analyzer", "expect"}` or
/// `{"analyzer", "min", "max"}` objects, the latter optionally with
/// `"min_fraction"`.
pub fn parse_expectations(json: &str) -> Result<Vec<Expectation>, FrameworkError> {
    let raw: Vec<RawExpectation> =
        serde_json::from_str(json).map_err(|e| FrameworkError::InvalidExpectation(e.to_string()))?;
    raw.into_iter().map(Expectation::try_from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Why an expectation could not be checked normally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Issue {
    MissingResult,
    AnalyzerFailed { message: String },
    TypeMismatch { expected: String, observed: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult {
    pub analyzer: String,
    pub observed: Option<Value>,
    pub expected: Target,
    pub verdict: Verdict,
    /// Share of list elements inside a range target.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub issue: Option<Issue>,
}

impl EvaluationResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Checks every expectation against the first result from its analyzer.
pub fn evaluate(results: &[AnalysisResult], expectations: &[Expectation]) -> Vec<EvaluationResult> {
    expectations
        .iter()
        .map(|exp| {
            let mut out = EvaluationResult {
                analyzer: exp.analyzer.clone(),
                observed: None,
                expected: exp.target.clone(),
                verdict: Verdict::Fail,
                within_fraction: None,
                issue: None,
            };
            let Some(result) = results.iter().find(|r| r.analyzer == exp.analyzer) else {
                out.issue = Some(Issue::MissingResult);
                return out;
            };
            let observed = match &result.outcome {
                Ok(v) => v,
                Err(e) => {
                    out.issue = Some(Issue::AnalyzerFailed { message: e.to_string() });
                    return out;
                }
            };
            out.observed = Some(observed.clone());
            match check(observed, &exp.target) {
                Ok((pass, fraction)) => {
                    out.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
                    out.within_fraction = fraction;
                }
                Err(issue) => out.issue = Some(issue),
            }
            out
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= NUMERIC_TOLERANCE
}

fn check(observed: &Value, target: &Target) -> Result<(bool, Option<f64>), Issue> {
    let mismatch = |expected: &str| Issue::TypeMismatch {
        expected: expected.to_string(),
        observed: observed.kind().to_string(),
    };
    match target {
        Target::Exact { expect } => {
            let equal = match (observed, expect) {
                (Value::Number(a), Value::Number(b)) => close(*a, *b),
                (Value::Text(a), Value::Text(b)) => a == b,
                (Value::NumberList(a), Value::NumberList(b)) => {
                    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y))
                }
                (Value::Distribution(a), Value::Distribution(b)) => {
                    a.len() == b.len() && a.iter().zip(b).all(|((ka, va), (kb, vb))| ka == kb && close(*va, *vb))
                }
                _ => return Err(mismatch(expect.kind())),
            };
            Ok((equal, None))
        }
        Target::Range { min, max, min_fraction } => {
            let inside = |v: f64| *min <= v && v <= *max;
            match observed {
                Value::Number(v) => Ok((inside(*v), None)),
                Value::NumberList(values) if !values.is_empty() => {
                    let fraction = values.iter().filter(|&&v| inside(v)).count() as f64 / values.len() as f64;
                    Ok((fraction >= min_fraction.unwrap_or(1.0), Some(fraction)))
                }
                Value::NumberList(_) => Ok((false, None)),
                _ => Err(mismatch("number or number-list")),
            }
        }
    }
}
