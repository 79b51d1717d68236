//! Serializable report sections and the pipeline that fills them.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use wittsum::artin_hasse::{
    classical_integrality_check, fijn_equality_certificate, fijn_valuation_analysis, fjn_valuation_analysis,
    gamma_valuation, theta_valuation_bound_check, truncated_coefficient_bound_check, EstimateError, ValuationReport,
};
use wittsum::cohomology::{
    basis, h0_dimension, independence_ranks, reduce, shaped_operator, shaped_orders, PartialFraction,
};
use wittsum::cyclotomic::CyclotomicNumber;
use wittsum::engine::{sum_sequence, EngineConfig, SumResult};
use wittsum::lfunction::{cf_identity_check, lfun_from_sums, LPolynomial};
use wittsum::polygon::{
    coincidence_predicate, hodge_polygon, lies_above, newton_polygon, truncated_hodge_polygon, DominanceReport,
    HodgeOptions, RatPolygon,
};
use wittsum::rational::{fmt_rat, rat, Rational};
use wittsum::sum::{ExponentialSum, Pole};

use crate::input::InputDoc;
use crate::CliError;

/// Series indices `i ≤ AH_COUNT` enter the estimate battery.
const AH_COUNT: usize = 50;

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub echo: Option<InputDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<DegreeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sums: Option<Vec<SumSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lfun: Option<LfunSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub newton: Option<PolygonDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hodge: Option<HodgeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coincidence: Option<CoincidenceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artin_hasse: Option<ArtinHasseSection>,
    pub checks: BTreeMap<String, bool>,
    pub meta: Meta,
}

impl RunReport {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !**ok).map(|(name, _)| name.as_str()).collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Meta {
    pub points: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<String, u128>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleDegreeDoc {
    pub pole: String,
    pub declared: Option<usize>,
    pub max_degree: u64,
    pub dominant_level: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSection {
    pub d: u64,
    pub standard_poles: bool,
    pub trivial: bool,
    pub poles: Vec<PoleDegreeDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SumSection {
    pub k: u32,
    pub points: u64,
    pub histogram: Vec<u64>,
    pub value: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityDoc {
    pub order: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LfunSection {
    pub degree: u64,
    pub verified: bool,
    pub buffer: u32,
    pub coeffs: Vec<Vec<i64>>,
    pub tail: Vec<Vec<i64>>,
    pub identity: IdentityDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexDoc {
    pub x: u64,
    pub y: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolygonDoc {
    pub vertices: Vec<VertexDoc>,
    pub slopes: Vec<String>,
}

impl From<&RatPolygon> for PolygonDoc {
    fn from(poly: &RatPolygon) -> Self {
        Self {
            vertices: poly.vertices.iter().map(|(x, y)| VertexDoc { x: *x, y: fmt_rat(y) }).collect(),
            slopes: poly.slope_strings(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HodgeSection {
    pub families: Vec<Vec<String>>,
    pub comparison: PolygonDoc,
    pub dropped_variant: Option<PolygonDoc>,
    pub truncated: PolygonDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceDoc {
    pub above: bool,
    pub worst_margin: String,
    pub worst_at: u64,
    pub checked_to: u64,
}

impl From<&DominanceReport> for DominanceDoc {
    fn from(r: &DominanceReport) -> Self {
        Self { above: r.above, worst_margin: fmt_rat(&r.worst_margin), worst_at: r.worst_at, checked_to: r.checked_to }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonSection {
    pub newton_above_hodge: DominanceDoc,
    pub hodge_above_truncated: DominanceDoc,
    pub newton_starts_at_origin: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoincidenceSection {
    pub applicable: bool,
    pub predicted: bool,
    pub modulus: u64,
    pub newton_slopes: Vec<String>,
    pub hodge_slopes: Vec<String>,
    /// Slope multisets agree.
    pub observed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionDoc {
    pub input: String,
    pub residue: String,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologySection {
    pub pole_orders: Vec<u64>,
    pub h0_dimension: u64,
    pub degree_formula: u64,
    /// `None` when some pole order is zero and no operator is shaped.
    pub operator: Option<String>,
    pub basis: Vec<String>,
    pub image_rank: Option<usize>,
    pub with_basis_rank: Option<usize>,
    pub reductions: Vec<ReductionDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaDoc {
    pub k: u32,
    pub count: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaDoc {
    pub k: u32,
    pub j: u32,
    pub unique_min: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermEstimateDoc {
    pub level: Option<u32>,
    pub pole: usize,
    pub n: u64,
    pub bound: String,
    pub minimum: Option<String>,
    pub achieved: bool,
    pub meets_bound: bool,
    /// Predicted achievement, reported where `n / d < p`.
    pub certificate: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArtinHasseSection {
    pub p: u64,
    pub theta: Vec<ThetaDoc>,
    pub classical_integral: bool,
    pub gamma: Vec<GammaDoc>,
    pub fijn: Vec<TermEstimateDoc>,
    pub fjn: Vec<TermEstimateDoc>,
    pub passed: bool,
}

pub fn cyclotomic_doc(c: &CyclotomicNumber) -> Result<Vec<i64>, CliError> {
    if !c.is_integral() {
        return Err(CliError::Inconsistent(format!("non-integral value with denominator {}", c.denominator())));
    }
    c.numerator()
        .iter()
        .map(|x| x.to_i64().ok_or_else(|| CliError::Inconsistent(format!("coefficient {x} exceeds 64 bits"))))
        .collect()
}

fn pole_label(pole: &Pole) -> String {
    match pole {
        Pole::Infinity => "inf".into(),
        Pole::Finite(x) => format!("{:?}", x.coeffs()),
    }
}

/// Lazily computed stages over one validated sum.
pub struct Pipeline<'a> {
    sum: &'a ExponentialSum,
    cfg: EngineConfig,
    timing: Option<BTreeMap<String, u128>>,
    sums: Vec<SumResult>,
    lfun: Option<LPolynomial>,
    buffer: u32,
}

impl<'a> Pipeline<'a> {
    pub fn new(sum: &'a ExponentialSum, cfg: EngineConfig, buffer: u32, timing: bool) -> Self {
        Self { sum, cfg, timing: timing.then(BTreeMap::new), sums: Vec::new(), lfun: None, buffer }
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        if let Some(t) = &mut self.timing {
            *t.entry(stage.to_string()).or_default() += start.elapsed().as_millis();
        }
        out
    }

    pub fn meta(&self) -> Meta {
        Meta { points: self.sums.iter().map(SumResult::points).sum(), timing_ms: self.timing.clone() }
    }

    pub fn degree(&self) -> DegreeSection {
        DegreeSection {
            d: self.sum.degree_formula(),
            standard_poles: self.sum.standard_poles(),
            trivial: self.sum.is_trivial(),
            poles: self
                .sum
                .effective_poles()
                .iter()
                .map(|e| PoleDegreeDoc {
                    pole: pole_label(&e.pole),
                    declared: e.declared.map(|j| j + 1),
                    max_degree: e.max_degree,
                    dominant_level: e.dominant_level,
                })
                .collect(),
        }
    }

    fn ensure_sums(&mut self, max_k: u32) -> Result<(), CliError> {
        if self.sums.len() >= max_k as usize {
            return Ok(());
        }
        let sum = self.sum;
        let cfg = self.cfg.clone();
        self.sums = self.timed("sums", |_| sum_sequence(sum, max_k, &cfg))?;
        Ok(())
    }

    pub fn sums(&mut self, max_k: u32) -> Result<Vec<SumSection>, CliError> {
        self.ensure_sums(max_k)?;
        self.sums[..max_k as usize]
            .iter()
            .map(|r| {
                Ok(SumSection {
                    k: r.k,
                    points: r.points(),
                    histogram: r.histogram.counts().to_vec(),
                    value: cyclotomic_doc(&r.value)?,
                })
            })
            .collect()
    }

    pub fn histograms(&mut self, max_k: u32) -> Result<Vec<(u32, Vec<u64>)>, CliError> {
        self.ensure_sums(max_k)?;
        Ok(self.sums[..max_k as usize].iter().map(|r| (r.k, r.histogram.counts().to_vec())).collect())
    }

    fn ensure_lfun(&mut self) -> Result<LPolynomial, CliError> {
        if let Some(l) = &self.lfun {
            return Ok(l.clone());
        }
        let needed = self.sum.degree_formula() as u32 + self.buffer;
        self.ensure_sums(needed)?;
        let values: Vec<CyclotomicNumber> = self.sums.iter().map(|r| r.value.clone()).collect();
        let l = lfun_from_sums(self.sum, &values, self.buffer)?;
        self.lfun = Some(l.clone());
        Ok(l)
    }

    pub fn lfun(&mut self) -> Result<LfunSection, CliError> {
        let l = self.ensure_lfun()?;
        let order = (self.sum.degree_formula() + self.buffer as u64) as usize;
        let values: Vec<CyclotomicNumber> = self.sums.iter().map(|r| r.value.clone()).collect();
        let q = self.sum.q();
        let report = self.timed("identity", |_| cf_identity_check(&values, q, &l.coeffs, order));
        Ok(LfunSection {
            degree: l.degree,
            verified: l.verified,
            buffer: self.buffer,
            coeffs: l.coeffs.iter().map(cyclotomic_doc).collect::<Result<_, _>>()?,
            tail: l.tail.iter().map(cyclotomic_doc).collect::<Result<_, _>>()?,
            identity: IdentityDoc { order: report.order, passed: report.passed, first_failure: report.first_failure },
        })
    }

    pub fn newton_polygon(&mut self) -> Result<RatPolygon, CliError> {
        let l = self.ensure_lfun()?;
        Ok(self.timed("newton", |_| newton_polygon(&l.coeffs)))
    }

    pub fn hodge(&mut self) -> (HodgeSection, RatPolygon, RatPolygon) {
        let sum = self.sum;
        self.timed("hodge", |_| {
            let report = hodge_polygon(sum, &HodgeOptions::default());
            let truncated = truncated_hodge_polygon(sum);
            let section = HodgeSection {
                families: report.families.iter().map(|f| f.iter().map(fmt_rat).collect()).collect(),
                comparison: (&report.comparison).into(),
                dropped_variant: report.dropped_variant.as_ref().map(Into::into),
                truncated: (&truncated).into(),
            };
            (section, report.comparison, truncated)
        })
    }

    pub fn comparison(&mut self) -> Result<(ComparisonSection, CoincidenceSection), CliError> {
        let np = self.newton_polygon()?;
        let (_, hodge, truncated) = self.hodge();
        let comparison = ComparisonSection {
            newton_above_hodge: (&lies_above(&np, &hodge)).into(),
            hodge_above_truncated: (&lies_above(&hodge, &truncated)).into(),
            newton_starts_at_origin: np.vertices.first().is_some_and(|(x, y)| *x == 0 && *y == Rational::default()),
        };
        let predicate = coincidence_predicate(self.sum);
        let coincidence = CoincidenceSection {
            applicable: predicate.applicable,
            predicted: predicate.predicted,
            modulus: predicate.modulus,
            newton_slopes: np.slope_strings(),
            hodge_slopes: hodge.slope_strings(),
            observed: np.slopes == hodge.slopes,
        };
        Ok((comparison, coincidence))
    }

    pub fn cohomology(&mut self) -> Result<CohomologySection, CliError> {
        let sum = self.sum;
        self.timed("cohomology", |_| cohomology_section(sum))
    }

    pub fn artin_hasse(&mut self) -> Result<ArtinHasseSection, CliError> {
        let sum = self.sum;
        self.timed("artin_hasse", |_| artin_hasse_section(sum))
    }
}

fn cohomology_section(sum: &ExponentialSum) -> Result<CohomologySection, CliError> {
    let (poles, orders) = shaped_orders(sum);
    let mut section = CohomologySection {
        h0_dimension: h0_dimension(&orders),
        degree_formula: sum.degree_formula(),
        pole_orders: orders.clone(),
        operator: None,
        basis: Vec::new(),
        image_rank: None,
        with_basis_rank: None,
        reductions: Vec::new(),
    };
    if orders.contains(&0) {
        return Ok(section);
    }
    let mut counter = 0i64;
    let h = shaped_operator(&poles, &orders, || {
        counter += 1;
        rat(counter % 5 + 1, counter % 3 + 1)
    });
    section.basis = basis(&h)?.iter().map(ToString::to_string).collect();
    let (image, with_basis) = independence_ranks(&h, 2)?;
    section.image_rank = Some(image);
    section.with_basis_rank = Some(with_basis);
    let mut inputs: Vec<PartialFraction> =
        orders.iter().enumerate().map(|(j, &r)| PartialFraction::monomial(&poles, j, r as u32 + 3)).collect();
    let combined = inputs.iter().fold(PartialFraction::constant(&poles, Rational::from_integer(BigInt::from(1))), |acc, g| acc.add(g));
    inputs.push(combined);
    for g in inputs {
        let r = reduce(&g, &h)?;
        section.reductions.push(ReductionDoc { input: g.to_string(), residue: r.residue.to_string(), steps: r.steps });
    }
    section.operator = Some(h.to_string());
    Ok(section)
}

fn estimate_doc(level: Option<u32>, pole: usize, n: u64, r: &ValuationReport, certificate: Option<bool>) -> TermEstimateDoc {
    TermEstimateDoc {
        level,
        pole,
        n,
        bound: fmt_rat(&r.bound),
        minimum: r.minimum.as_ref().map(fmt_rat),
        achieved: r.achieved,
        meets_bound: r.meets_bound(),
        certificate,
    }
}

fn artin_hasse_section(sum: &ExponentialSum) -> Result<ArtinHasseSection, CliError> {
    let p = sum.p();
    let m = sum.level();
    let top_k = (m as u64).min(p - 1) as u32;
    let mut theta = Vec::new();
    for k in 1..=top_k {
        let ok = match theta_valuation_bound_check(p, k, AH_COUNT) {
            Ok(_) => truncated_coefficient_bound_check(p, k, AH_COUNT).is_ok(),
            Err(EstimateError::BoundViolated { .. }) => false,
            Err(e) => return Err(e.into()),
        };
        theta.push(ThetaDoc { k, count: AH_COUNT, passed: ok });
    }
    let classical_integral = classical_integrality_check(p, AH_COUNT).is_ok();
    let mut gamma = Vec::new();
    for k in 1..=top_k {
        for j in 0..k {
            let unique_min = match gamma_valuation(p, k, j) {
                Ok(r) => r.unique_min,
                Err(EstimateError::GammaMinimum { .. }) => false,
                Err(e) => return Err(e.into()),
            };
            gamma.push(GammaDoc { k, j, unique_min });
        }
    }
    let mut fijn = Vec::new();
    let mut fjn = Vec::new();
    for (idx, effective) in sum.effective_poles().iter().enumerate() {
        let top_n = 3 * effective.max_degree;
        if let Some(pole) = effective.declared {
            for level in 0..m {
                let Some(d) = sum.terms().iter().filter(|t| t.level == level && t.pole == pole).map(|t| t.exponent).max()
                else {
                    continue;
                };
                for n in 1..=top_n {
                    let r = fijn_valuation_analysis(sum, level, pole, n)?;
                    let certificate = (n < p * d as u64).then(|| fijn_equality_certificate(p, d, n));
                    fijn.push(estimate_doc(Some(level), pole + 1, n, &r, certificate));
                }
            }
        }
        for n in 1..=top_n {
            let r = fjn_valuation_analysis(sum, idx, n)?;
            fjn.push(estimate_doc(None, idx + 1, n, &r, None));
        }
    }
    let passed = theta.iter().all(|t| t.passed)
        && classical_integral
        && gamma.iter().all(|g| g.unique_min)
        && fijn.iter().chain(&fjn).all(|e| e.meets_bound && e.certificate.is_none_or(|c| c == e.achieved));
    Ok(ArtinHasseSection { p, theta, classical_integral, gamma, fijn, fjn, passed })
}
