//! The JSON input document and its conversion to a validated sum.

use serde::{Deserialize, Serialize};

use wittsum::engine::DEFAULT_BUDGET_POINTS;
use wittsum::lfunction::DEFAULT_BUFFER;
use wittsum::sum::{ExponentialSum, RawPole, RawSum, RawTerm};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub p: u64,
    pub a: usize,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_modulus: Option<Vec<i64>>,
    pub poles: Vec<PoleDoc>,
    pub terms: Vec<TermDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinityTag {
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoleDoc {
    Infinity(InfinityTag),
    Finite(CoeffsDoc),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsDoc {
    pub coeffs: Vec<i64>,
}

/// `c x^k` at level `i` of pole `j` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub i: u32,
    pub j: usize,
    pub k: u32,
    pub coeff: CoeffsDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionsDoc {
    pub buffer: u32,
    pub budget_points: u64,
    pub allow_empty: bool,
}

impl Default for OptionsDoc {
    fn default() -> Self {
        Self { buffer: DEFAULT_BUFFER, budget_points: DEFAULT_BUDGET_POINTS, allow_empty: false }
    }
}

/// Coordinates reduced into `[0, p)`.
fn reduce(coeffs: &[i64], p: u64) -> Vec<u64> {
    coeffs.iter().map(|c| c.rem_euclid(p as i64) as u64).collect()
}

fn to_doc(values: &[u64]) -> Vec<i64> {
    values.iter().map(|&c| c as i64).collect()
}

/// Parse and validate; the returned document is the canonical echo with
/// every default written out.
pub fn parse_input(text: &str) -> Result<(InputDoc, ExponentialSum), CliError> {
    let doc: InputDoc = serde_json::from_str(text).map_err(CliError::Schema)?;
    let sum = to_sum(&doc)?;
    Ok((echo(&sum, &doc.options), sum))
}

pub fn to_sum(doc: &InputDoc) -> Result<ExponentialSum, CliError> {
    if doc.p < 2 || doc.p > i64::MAX as u64 {
        return Err(CliError::Input("p: must be a prime".into()));
    }
    if let Some(t) = doc.terms.iter().position(|t| t.j == 0) {
        return Err(CliError::Input(format!("terms[{t}].j: pole indices start at 1")));
    }
    let raw = RawSum {
        p: doc.p,
        a: doc.a,
        m: doc.m,
        field_modulus: doc.field_modulus.as_ref().map(|f| reduce(f, doc.p)),
        poles: doc
            .poles
            .iter()
            .map(|pole| match pole {
                PoleDoc::Infinity(_) => RawPole::Infinity,
                PoleDoc::Finite(c) => RawPole::Finite(reduce(&c.coeffs, doc.p)),
            })
            .collect(),
        terms: doc
            .terms
            .iter()
            .map(|t| RawTerm { level: t.i, pole: t.j - 1, exponent: t.k, coeff: reduce(&t.coeff.coeffs, doc.p) })
            .collect(),
        allow_empty: doc.options.allow_empty,
    };
    Ok(ExponentialSum::validate(&raw)?)
}

pub fn echo(sum: &ExponentialSum, options: &OptionsDoc) -> InputDoc {
    let raw = sum.echo();
    InputDoc {
        p: raw.p,
        a: raw.a,
        m: raw.m,
        field_modulus: raw.field_modulus.as_deref().map(to_doc),
        poles: raw
            .poles
            .iter()
            .map(|pole| match pole {
                RawPole::Infinity => PoleDoc::Infinity(InfinityTag::Inf),
                RawPole::Finite(c) => PoleDoc::Finite(CoeffsDoc { coeffs: to_doc(c) }),
            })
            .collect(),
        terms: raw
            .terms
            .iter()
            .map(|t| TermDoc { i: t.level, j: t.pole + 1, k: t.exponent, coeff: CoeffsDoc { coeffs: to_doc(&t.coeff) } })
            .collect(),
        options: options.clone(),
    }
}
